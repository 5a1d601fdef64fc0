// scratch probes used while calibrating solver defaults
use envelope_core::ansatz::{make_profile, ProfileSpec};
use envelope_core::solvers::*;
use envelope_core::spectral::ramp_multiplier;
use envelope_core::*;

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "drift".into());
    match which.as_str() {
        "drift" => drift(),
        "remainder" => remainder(),
        "main" => main_convergence_probe(),
        "linear" => linear_probe(),
        "decay" => decay_probe_run(),
        _ => eprintln!("unknown probe {which}"),
    }
}

fn drift() {
    let g = Grid64::new(16, 2048).unwrap();
    let eps = 0.125f64;
    let psi0 = make_profile(&ProfileSpec::gaussian(), &g, eps).unwrap();
    let state0 = kg_rescaled_initial_state(&psi0, eps).unwrap();
    for div in [8.0, 16.0, 32.0] {
        let dt = eps * eps / div;
        let cfg = SolverConfig::new(dt).with_samples(33);
        let t0 = std::time::Instant::now();
        let traj = solve_kg(&state0, 1.0, &cfg).unwrap();
        println!(
            "dt=eps^2/{div:5}: drift = {:.3e}   ({} steps, {:?})",
            traj.meta.max_rel_energy_drift.unwrap(),
            traj.meta.steps,
            t0.elapsed()
        );
    }
}

fn remainder() {
    for (eps, n) in [(0.25f64, 1024usize), (0.125, 2048), (0.0625, 4096), (0.03125, 8192)] {
        let g = Grid64::new(16, n).unwrap();
        for (label, spec) in [
            ("gauss", ProfileSpec::gaussian()),
            ("tail0.5", ProfileSpec::fourier_tail(0.5)),
        ] {
            let psi0 = make_profile(&spec, &g, eps).unwrap();
            let dt = eps * eps / 16.0;
            let cfg = SolverConfig::new(dt).with_samples(17);
            let trackers = vec![
                SpectralTracker::weighted("r_h1eps", &g, TrackComponent::Remainder, 1.0, eps, |_| 1.0),
                SpectralTracker::weighted("psi_high_l2", &g, TrackComponent::Core, 0.0, eps, |xi| {
                    if xi.abs() > 1.0 / (100.0 * eps) { 1.0 } else { 0.0 }
                }),
                SpectralTracker::weighted("psi_ramp_h1", &g, TrackComponent::Core, 1.0, eps, |xi| {
                    ramp_multiplier(xi, eps.powf(-1.0 / 3.0))
                }),
            ];
            let t0 = std::time::Instant::now();
            let traj = solve_amplitude(&psi0, eps, 1.0, &cfg, &trackers).unwrap();
            let vals: Vec<f64> = traj.meta.tracked.iter().map(|t| t.max).collect();
            println!(
                "eps=1/{:<3} n={n:5} {label:8}: max|r|_He1 = {:.4e}  |P>1/(100e)psi| = {:.4e}  ramp = {:.4e}  ({:?})",
                (1.0 / eps) as u32,
                vals[0],
                vals[1],
                vals[2],
                t0.elapsed()
            );
        }
    }
}

fn main_convergence_probe() {
    use envelope_core::ansatz::*;
    let t_slow = 1.0;
    let profile = std::env::args().nth(2).unwrap_or_else(|| "gauss".into());
    let dt_div: f64 = std::env::args().nth(3).map(|s| s.parse().unwrap()).unwrap_or(16.0);
    for (eps, n_s) in [(0.25f64, 1024usize), (0.125, 1024), (0.0625, 1024)] {
        let slow = Grid64::new(16, n_s).unwrap();
        let n_p = (n_s as f64 / eps) as usize;
        let phys = Grid64::new((16.0 / eps) as u64, n_p).unwrap();
        let pair = GridPair::new(&slow, &phys, eps).unwrap();
        let spec = match profile.as_str() {
            "tail" => ProfileSpec::fourier_tail(1.5),
            _ => ProfileSpec::gaussian(),
        };
        let psi0 = make_profile(&spec, &slow, eps).unwrap();

        let t0 = std::time::Instant::now();
        let nls_cfg = SolverConfig::new(t_slow / 4096.0)
            .with_scheme(envelope_core::schemes::Scheme::StrangSplit4)
            .with_samples(65);
        let nls = solve_nls(&psi0, t_slow, &nls_cfg).unwrap();

        let (u0, ut0) = build_initial_data(&psi0, &pair).unwrap();
        let w0 = complexify(&u0, &ut0, KgScale::Physical).unwrap();
        let state0 = KgState { t: 0.0, w: w0, scale: KgScale::Physical };
        let t_end = t_slow / (eps * eps);
        let kg_cfg = SolverConfig::new(1.0 / dt_div).with_samples(65);
        let kg = solve_kg(&state0, t_end, &kg_cfg).unwrap();

        let e_l2 = approximation_error(&kg, &nls, &pair, ErrorFunctionalSpec { norm: ErrorNorm::L2 }).unwrap();
        let e_h1 = approximation_error(&kg, &nls, &pair, ErrorFunctionalSpec { norm: ErrorNorm::H1OverSqrtEps }).unwrap();
        println!(
            "eps=1/{:<3} n_p={:6}: L2 err = {:.5e}   H1/sqrt(eps) err = {:.5e}   ({:?}, drift {:.1e})",
            (1.0 / eps) as u32, n_p, e_l2, e_h1, t0.elapsed(),
            kg.meta.max_rel_energy_drift.unwrap()
        );
    }
}

fn linear_probe() {
    use envelope_core::propagators::linear_deviation;
    let g = Grid64::new(16, 4096).unwrap();
    for (label, spec) in [
        ("tail1.5", ProfileSpec::fourier_tail(1.5)),
        ("gauss", ProfileSpec::gaussian()),
    ] {
        let mut pts = Vec::new();
        for k in 2..=6 {
            let eps = 2f64.powi(-k);
            let psi0 = make_profile(&spec, &g, eps).unwrap();
            let d = linear_deviation(&psi0, eps, 1.0, 129).unwrap();
            pts.push((eps, d));
        }
        let slope = fit(&pts);
        println!("{label}: deviations {:?} slope {slope:.3}", pts.iter().map(|p| p.1).collect::<Vec<_>>());
    }
}

fn decay_probe_run() {
    use envelope_core::propagators::decay_probe;
    let g = Grid64::new(4096, 65536).unwrap();
    let times: Vec<f64> = (0..=16).map(|k| 100.0 * (10000.0f64 / 100.0).powf(k as f64 / 16.0)).collect();
    let t0 = std::time::Instant::now();
    let vals = decay_probe(&g, 1.0, 0.25, &times).unwrap();
    let pts: Vec<(f64, f64)> = times.iter().zip(&vals).map(|(&t, &v)| (t, v)).collect();
    println!("decay slope {:.4} ({:?})", fit(&pts), t0.elapsed());
}

fn fit(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in pts {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
