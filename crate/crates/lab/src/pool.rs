//! Worker-pool sizing.
//!
//! Per-epsilon runs are independent; `ENVELOPE_LAB_THREADS` caps the pool.

use rayon::prelude::*;

fn thread_cap() -> Option<usize> {
    std::env::var("ENVELOPE_LAB_THREADS").ok().and_then(|s| s.parse::<usize>().ok())
}

/// Map `items` in parallel, preserving order. Results are deterministic:
/// each item's work is self-contained and seeded, and the output vector is
/// assembled in input order regardless of scheduling.
pub fn map_ordered<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match thread_cap() {
        Some(n) if n >= 1 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(|| items.par_iter().map(&f).collect()),
        _ => items.par_iter().map(&f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_order() {
        let items: Vec<u64> = (0..64).collect();
        let out = map_ordered(&items, |&x| x * x);
        for (i, v) in out.iter().enumerate() {
            assert_eq!(*v, (i * i) as u64);
        }
    }
}
