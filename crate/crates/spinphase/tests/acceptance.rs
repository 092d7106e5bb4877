//! Acceptance suite: one test per shipping criterion, each printing a single
//! `criterion NN PASS/FAIL` line (visible with `--nocapture`, and always for
//! failures).  Every check pits an independent route — brute-force
//! quadrature, finite differences, kernel traces, Monte Carlo — against the
//! closed forms the library implements.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinphase::channels::{lindblad_rhs_ladder, povm_apply_matrix};
use spinphase::linalg::dagger;
use spinphase::{
    build_quadrature, coherent_state, decay_rates, display_grid, expand, first_positive_time,
    heat_propagate_kernel, heat_propagate_spectral, heat_residual, lindblad_propagate_analytic,
    lindblad_propagate_numeric, positivity_iterations, positivity_scan, positivity_time,
    povm_factor, povm_iterate, povm_rate_large_j, quasidistribution, ratio_statistic, reconstruct,
    reconstruct_state, run_ensemble, spin_matrices, sw_kernel_matrix, DensityMatrix, HalfInt,
    KickConfig, LindbladParams, PhasePoint, SigmaIndex, TensorBasis,
};
use std::time::Instant;

fn report(n: u32, pass: bool, detail: &str) {
    println!(
        "criterion {n:02} {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

fn random_density(j: HalfInt, seed: u64) -> DensityMatrix {
    let d = j.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = Array2::from_shape_fn((d, d), |_| {
        C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    let h = g.dot(&dagger(&g));
    let tr: f64 = (0..d).map(|i| h[(i, i)].re).sum();
    DensityMatrix::new(j, h.mapv(|v| v / tr)).unwrap()
}

fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn half_steps(to: u32) -> impl Iterator<Item = HalfInt> {
    (1..=2 * to as i32).map(HalfInt::from_doubled)
}

#[test]
fn criterion_01_measurement_channel_eigenvalues() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for two_j in [1i32, 2, 3, 4, 6, 8] {
        let j = HalfInt::from_doubled(two_j);
        let quad = build_quadrature(j, 2 * j.doubled() as u32 + 4);
        let basis = TensorBasis::build(j);
        for (l, _k, t) in basis.iter() {
            let image = povm_apply_matrix(t, j, &quad).unwrap();
            let expected = t.mapv(|v| v * povm_factor(j, l));
            worst = worst.max(max_abs_diff(&image, &expected));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst <= 1e-11 && secs < 30.0;
    report(
        1,
        pass,
        &format!(
            "quadrature image of every tensor component is r_L times itself: \
             max gap {worst:.2e} (≤ 1e-11) over J ∈ {{1/2..4}} in {secs:.1} s (< 30 s)"
        ),
    );
    assert!(pass, "worst gap {worst:.3e}, runtime {secs:.1} s");
}

#[test]
fn criterion_02_flow_generator_eigenvalues() {
    let start = Instant::now();
    let gamma = 0.8;
    let mut worst = 0.0f64;
    for j in half_steps(5) {
        let ops = spin_matrices(j);
        let basis = TensorBasis::build(j);
        for (l, _k, t) in basis.iter() {
            let image = lindblad_rhs_ladder(t, &ops, gamma);
            let rate = -0.5 * gamma * f64::from(l) * f64::from(l + 1);
            let expected = t.mapv(|v| v * rate);
            worst = worst.max(max_abs_diff(&image, &expected));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst <= 1e-11 && secs < 5.0;
    report(
        2,
        pass,
        &format!(
            "generator maps each tensor component to −(γ/2)L(L+1) times itself: \
             max gap {worst:.2e} (≤ 1e-11) for all J ≤ 5 in {secs:.2} s (< 5 s)"
        ),
    );
    assert!(pass, "worst gap {worst:.3e}, runtime {secs:.2} s");
}

#[test]
fn criterion_03_closed_form_matches_runge_kutta() {
    let gamma = 1.0;
    let t = 1.0;
    let mut worst = 0.0f64;
    for j in half_steps(4) {
        let rho = random_density(j, 300 + j.doubled() as u64);
        let params = LindbladParams::new(gamma, j).unwrap();
        let basis = TensorBasis::build(j);
        let analytic = reconstruct(
            &lindblad_propagate_analytic(&expand(&rho, &basis).unwrap(), t, &params).unwrap(),
            &basis,
        )
        .unwrap()
        .matrix;
        let numeric = lindblad_propagate_numeric(&rho, t, &params, 1000).unwrap();
        worst = worst.max(max_abs_diff(numeric.matrix(), &analytic));
    }

    // fourth-order convergence: halving the step divides the error by ~16
    let j = HalfInt::from_int(2);
    let rho = random_density(j, 77);
    let params = LindbladParams::new(gamma, j).unwrap();
    let basis = TensorBasis::build(j);
    let exact = reconstruct(
        &lindblad_propagate_analytic(&expand(&rho, &basis).unwrap(), t, &params).unwrap(),
        &basis,
    )
    .unwrap()
    .matrix;
    let err = |steps: usize| {
        max_abs_diff(
            lindblad_propagate_numeric(&rho, t, &params, steps).unwrap().matrix(),
            &exact,
        )
    };
    let order = (err(25) / err(50)).log2();

    let pass = worst <= 1e-10 && (order - 4.0).abs() <= 0.5;
    report(
        3,
        pass,
        &format!(
            "closed form vs fourth-order integration (1000 steps, J ≤ 4): max gap \
             {worst:.2e} (≤ 1e-10); step-halving order {order:.2} (4 ± 0.5)"
        ),
    );
    assert!(pass, "gap {worst:.3e}, order {order:.3}");
}

#[test]
fn criterion_04_spin_half_models_coincide() {
    let j = HalfInt::from_doubled(1);
    let gamma = 0.9;
    let step = 3f64.ln() / gamma;
    let params = LindbladParams::new(gamma, j).unwrap();
    let basis = TensorBasis::build(j);
    let mut worst = 0.0f64;
    for seed in [40u64, 41, 42] {
        let m0 = expand(&random_density(j, seed), &basis).unwrap();
        for n in 0..=10u32 {
            let via_channel = povm_iterate(&m0, n);
            let via_flow =
                lindblad_propagate_analytic(&m0, f64::from(n) * step, &params).unwrap();
            for (l, k, v) in via_channel.iter() {
                worst = worst.max((v - via_flow.get(l, k)).norm());
            }
        }
    }
    let pass = worst <= 1e-12;
    report(
        4,
        pass,
        &format!(
            "spin-1/2: n measurements equal the flow at t = n·ln3/γ for n ≤ 10: \
             max gap {worst:.2e} (≤ 1e-12)"
        ),
    );
    assert!(pass, "worst gap {worst:.3e}");
}

#[test]
fn criterion_05_rate_ratios() {
    let j = HalfInt::from_int(1);
    let gamma = 1.0;
    let table = decay_rates(j, gamma).unwrap();
    let flow_ratio = table.lindblad(2) / table.lindblad(1);
    let step_ratio = table.povm(2) / table.povm(1);
    let expected_step = 10f64.ln() / 2f64.ln();
    let table_gap =
        (flow_ratio - 3.0).abs().max((step_ratio - expected_step).abs());

    // the same numbers recovered from propagated moment series
    let basis = TensorBasis::build(j);
    let m0 = expand(&coherent_state(j, PhasePoint::new(1.1, 0.4)).density(), &basis).unwrap();
    let params = LindbladParams::new(gamma, j).unwrap();
    let series = |kind: &str| -> (Vec<(f64, C64)>, Vec<(f64, C64)>) {
        let mut r1 = Vec::new();
        let mut r2 = Vec::new();
        for i in 0..4u32 {
            let (label, m) = match kind {
                "flow" => {
                    let t = 0.3 * f64::from(i);
                    (t, lindblad_propagate_analytic(&m0, t, &params).unwrap())
                }
                _ => (f64::from(i), povm_iterate(&m0, i)),
            };
            r1.push((label, m.get(1, 0)));
            r2.push((label, m.get(2, 0)));
        }
        (r1, r2)
    };
    let (f1, f2) = series("flow");
    let flow_stat = ratio_statistic(&f1, &f2).unwrap();
    let (p1, p2) = series("step");
    let step_stat = ratio_statistic(&p1, &p2).unwrap();
    let series_gap = (flow_stat.r - 3.0)
        .abs()
        .max((step_stat.r - expected_step).abs())
        .max(flow_stat.max_deviation)
        .max(step_stat.max_deviation);

    let pass = table_gap <= 1e-12 && series_gap <= 1e-12;
    report(
        5,
        pass,
        &format!(
            "spin-1 rank-2/rank-1 ratios: flow 3 exactly, per-measurement \
             log10/log2 = {expected_step:.12}; table gap {table_gap:.2e}, \
             series-statistic gap {series_gap:.2e} (≤ 1e-12)"
        ),
    );
    assert!(pass, "table gap {table_gap:.3e}, series gap {series_gap:.3e}");
}

#[test]
fn criterion_06_large_spin_agreement() {
    let mut worst_rel = 0.0f64; // gap relative to its 1/(2J) budget
    let mut details = Vec::new();
    for jv in [10i32, 50, 100] {
        let j = HalfInt::from_int(jv);
        let table = decay_rates(j, 1.0 / j.value()).unwrap();
        let rel_gap = (table.povm(1) - table.lindblad(1)).abs() / table.lindblad(1);
        let budget = 1.2 / (2.0 * j.value());
        worst_rel = worst_rel.max(rel_gap / budget);
        details.push(format!("J={jv}: {rel_gap:.4}/{budget:.4}"));
    }

    // the three-term expansion error falls off as J⁻⁴
    let pts: Vec<(f64, f64)> = [10i32, 20, 40, 80, 160]
        .iter()
        .map(|&jv| {
            let j = HalfInt::from_int(jv);
            let table = decay_rates(j, 1.0).unwrap();
            let err = (table.povm(1) - povm_rate_large_j(j, 1)).abs();
            (j.value().ln(), err.ln())
        })
        .collect();
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (sxx, sxy) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x * x, b + x * y));
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

    let pass = worst_rel <= 1.0 && (slope + 4.0).abs() <= 0.3;
    report(
        6,
        pass,
        &format!(
            "γ = 1/J rank-1 rates agree to O(1/2J) [{}]; expansion error slope \
             {slope:.2} (−4 ± 0.3)",
            details.join(", ")
        ),
    );
    assert!(pass, "relative budget use {worst_rel:.3}, slope {slope:.3}");
}

#[test]
fn criterion_07_channels_commute() {
    let t = 0.4;
    let gamma = 1.0;
    let mut worst = 0.0f64;
    for j in half_steps(4) {
        let rho = random_density(j, 700 + j.doubled() as u64);
        let quad = build_quadrature(j, 2 * j.doubled() as u32 + 4);
        let basis = TensorBasis::build(j);
        let params = LindbladParams::new(gamma, j).unwrap();
        let flow = |m: &Array2<C64>| -> Array2<C64> {
            let moments =
                spinphase::expand_matrix(m, &basis);
            reconstruct(&lindblad_propagate_analytic(&moments, t, &params).unwrap(), &basis)
                .unwrap()
                .matrix
        };
        let measure_then_flow =
            flow(&povm_apply_matrix(rho.matrix(), j, &quad).unwrap());
        let flow_then_measure =
            povm_apply_matrix(&flow(rho.matrix()), j, &quad).unwrap();
        worst = worst.max(max_abs_diff(&measure_then_flow, &flow_then_measure));
    }
    let pass = worst <= 1e-11;
    report(
        7,
        pass,
        &format!(
            "measurement channel and flow commute on random states (J ≤ 4, t = {t}): \
             max gap {worst:.2e} (≤ 1e-11)"
        ),
    );
    assert!(pass, "worst gap {worst:.3e}");
}

#[test]
fn criterion_08_heat_equation_suite() {
    let gamma = 0.7;
    let mut kernel_gap = 0.0f64;
    for (two_j, seed) in [(3i32, 80u64), (6, 81)] {
        let j = HalfInt::from_doubled(two_j);
        let rho = random_density(j, seed);
        let quad = build_quadrature(j, 2 * j.doubled() as u32 + 8);
        let f0 = quasidistribution(&rho, SigmaIndex::WIGNER, Some(&quad)).unwrap();
        for t in [0.1, 0.5, 1.0] {
            let spectral = heat_propagate_spectral(&f0, t, gamma).unwrap();
            let kernel = heat_propagate_kernel(&f0, &quad, t, gamma).unwrap();
            for ((p, _), kv) in quad.nodes().iter().zip(kernel.grid().unwrap()) {
                kernel_gap = kernel_gap.max((spectral.evaluate(*p) - kv).abs());
            }
        }
    }

    let j = HalfInt::from_doubled(3);
    let f0 = quasidistribution(&random_density(j, 82), SigmaIndex::WIGNER, None).unwrap();
    let f1 = heat_propagate_spectral(&f0, 1.0, gamma).unwrap();
    let residual = heat_residual(&f1, gamma, 1e-3, &display_grid(9, 16)).unwrap();

    // the decay factors carry no trace of the family index
    let mut sigma_gap = 0.0f64;
    let rho = random_density(j, 83);
    let mut baseline: Option<Vec<f64>> = None;
    for sigma in [SigmaIndex::HUSIMI, SigmaIndex::WIGNER, SigmaIndex::GLAUBER] {
        let f = quasidistribution(&rho, sigma, None).unwrap();
        let ft = heat_propagate_spectral(&f, 0.4, gamma).unwrap();
        let factors: Vec<f64> = (1..=j.doubled() as u32)
            .map(|l| ft.coefficients().get(l, 0).norm() / f.coefficients().get(l, 0).norm())
            .collect();
        match &baseline {
            None => baseline = Some(factors),
            Some(b) => {
                for (a, c) in b.iter().zip(&factors) {
                    sigma_gap = sigma_gap.max((a - c).abs());
                }
            }
        }
    }

    let pass = kernel_gap <= 1e-10 && residual <= 1e-6 && sigma_gap <= 1e-13;
    report(
        8,
        pass,
        &format!(
            "heat flow: spectral vs zonal-kernel gap {kernel_gap:.2e} (≤ 1e-10); \
             finite-difference residual {residual:.2e} (≤ 1e-6 at δt = 1e-3); \
             per-rank decay factors σ-independent to {sigma_gap:.2e}"
        ),
    );
    assert!(
        pass,
        "kernel {kernel_gap:.3e}, residual {residual:.3e}, sigma {sigma_gap:.3e}"
    );
}

#[test]
fn criterion_09_family_index_shift() {
    let mut worst = 0.0f64;
    let points = display_grid(17, 32);
    for two_j in [1i32, 2, 3, 4, 5, 6] {
        let j = HalfInt::from_doubled(two_j);
        let basis = TensorBasis::build(j);
        let rho = random_density(j, 900 + two_j as u64);
        let m0 = expand(&rho, &basis).unwrap();
        for sigma in [-1.0, 0.0, 1.0] {
            for n in 0..=3u32 {
                let moved = reconstruct_state(&povm_iterate(&m0, n), &basis).unwrap();
                let direct =
                    quasidistribution(&moved, SigmaIndex(sigma), None).unwrap();
                let relabeled =
                    quasidistribution(&rho, SigmaIndex(sigma - 2.0 * f64::from(n)), None)
                        .unwrap();
                for &p in &points {
                    worst = worst.max((direct.evaluate(p) - relabeled.evaluate(p)).abs());
                }
            }
        }
    }

    // consequence: the σ = +1 member is pointwise positive after one measurement
    let mut min_after = f64::INFINITY;
    for two_j in [1i32, 3, 4, 6] {
        let j = HalfInt::from_doubled(two_j);
        let basis = TensorBasis::build(j);
        let rho = random_density(j, 950 + two_j as u64);
        let moved =
            reconstruct_state(&povm_iterate(&expand(&rho, &basis).unwrap(), 1), &basis).unwrap();
        let f = quasidistribution(&moved, SigmaIndex::GLAUBER, None).unwrap();
        min_after = min_after.min(positivity_scan(&f, 33, 64).min);
    }

    let pass = worst <= 1e-10 && min_after >= -1e-12;
    report(
        9,
        pass,
        &format!(
            "measuring the state equals relabeling the family, σ → σ−2n (n ≤ 3, J ≤ 3): \
             max pointwise gap {worst:.2e} (≤ 1e-10); σ = +1 grid minimum after one \
             measurement {min_after:.2e} (≥ 0)"
        ),
    );
    assert!(pass, "gap {worst:.3e}, min {min_after:.3e}");
}

#[test]
fn criterion_10_spin_half_positivity_time() {
    let j = HalfInt::from_doubled(1);
    let gamma = 3f64.ln();
    let sigma = SigmaIndex::WIGNER;
    let rho = coherent_state(j, PhasePoint::new(0.0, 0.0)).density();
    let f0 = quasidistribution(&rho, sigma, None).unwrap();
    let measured = first_positive_time(&f0, gamma, 65, 128, 1e-5).unwrap();
    let target = 1.0;
    let formula = positivity_time(j, sigma, gamma);
    let pass = (measured - target).abs() <= 1e-3;
    report(
        10,
        pass,
        &format!(
            "spin-1/2, σ = 0, γ = ln3: bisected first grid-positive time {measured:.4}, \
             required {target:.3} ± 0.001 (the guaranteed-positivity time, \
             kind {:?}, t* = {:.4})",
            formula.kind, formula.t_star
        ),
    );
    if !pass {
        // record what does hold, so the gap is fully characterized
        let n_star = positivity_iterations(sigma);
        let after_one = {
            let basis = TensorBasis::build(j);
            let m1 = povm_iterate(&expand(&rho, &basis).unwrap(), n_star);
            let moved = reconstruct_state(&m1, &basis).unwrap();
            positivity_scan(&quasidistribution(&moved, sigma, None).unwrap(), 65, 128).min
        };
        println!(
            "             measured time sits at ln3/(2γ) = {:.4}: the distribution's own \
             minimum, ½(1 − √3·e^(−γt)), crosses zero after half a measurement's worth \
             of flow, while t* counts whole measurements (⌈(σ+1)/2⌉ = {n_star})",
            3f64.ln() / (2.0 * gamma)
        );
        println!(
            "             the whole-measurement statements do hold: grid minimum after \
             {n_star} measurement(s) = {after_one:.2e} ≥ 0, and for σ = +1 the bisected \
             time is {:.4} (matching t* = {:.4})",
            first_positive_time(
                &quasidistribution(&rho, SigmaIndex::GLAUBER, None).unwrap(),
                gamma,
                65,
                128,
                1e-5
            )
            .unwrap(),
            positivity_time(j, SigmaIndex::GLAUBER, gamma).t_star
        );
    }
    assert!(
        pass,
        "bisected first-positive time {measured:.4} is ln3/(2γ) = {:.4}, not the \
         whole-measurement time t* = {target}: the continuous minimum crosses zero \
         mid-measurement, so the stated 1.000 ± 0.001 cannot be met by bisection",
        3f64.ln() / (2.0 * gamma)
    );
}

#[test]
fn criterion_11_monte_carlo_unraveling() {
    let start = Instant::now();
    let j = HalfInt::from_int(1);
    let gamma = 1.0;
    let rho0 = coherent_state(j, PhasePoint::new(1.1, 0.4)).density();
    let cfg = KickConfig::new(gamma, 1e-3, 1000, 100_000, 2718).unwrap();
    let ens = run_ensemble(&rho0, &cfg, 1000).unwrap();
    let basis = TensorBasis::build(j);
    let params = LindbladParams::new(gamma, j).unwrap();
    let m0 = expand(&rho0, &basis).unwrap();
    let exact = lindblad_propagate_analytic(&m0, 1.0, &params).unwrap();

    let last = ens.n_records() - 1;
    let mut worst_pull = 0.0f64;
    let mut misses = Vec::new();
    for (l, k, v) in ens.mean_moments(last).iter() {
        let dev = (v - exact.get(l, k)).norm();
        // 1e-12 absolute floor: conserved moments drift by common-mode rounding,
        // which the cross-trajectory standard error cannot see
        let tol = 5.0 * ens.stderr(last, l, k) + 1e-12;
        worst_pull = worst_pull.max(dev / tol);
        if dev > tol {
            misses.push(format!("({l},{k})"));
        }
    }

    let slope = spinphase::block_error_slope(
        ens.final_states(),
        &basis,
        &exact,
        &[250, 1000, 4000],
    );
    let secs = start.elapsed().as_secs_f64();
    let pass = misses.is_empty() && (slope + 0.5).abs() <= 0.1 && secs < 300.0;
    report(
        11,
        pass,
        &format!(
            "10^5 kicked trajectories (J = 1, γ = 1, dt = 1e-3, t = 1): every moment \
             within 5 standard errors + 1e-12 of the closed form (worst {:.0}% of \
             tolerance); block-mean error slope {slope:.3} (−0.5 ± 0.1); {secs:.0} s \
             (< 300 s)",
            100.0 * worst_pull
        ),
    );
    assert!(
        pass,
        "missed moments: {misses:?}; slope {slope:.3}; runtime {secs:.0} s"
    );
}

#[test]
fn criterion_12_command_line_reproduces_figures() {
    use std::process::Command;
    let exe = env!("CARGO_BIN_EXE_spinphase");

    // moment curves: the flow decays each rank exponentially, the measurement
    // channel geometrically, at rates that differ by the analytic gap
    let mut curve_gap = 0.0f64;
    for (j_str, two_j) in [("1", 2i32), ("5", 10)] {
        let j = HalfInt::from_doubled(two_j);
        let gamma = 1.0 / j.value();
        let basis = TensorBasis::build(j);
        let m0 = expand(&coherent_state(j, PhasePoint::new(1.1, 0.4)).density(), &basis)
            .unwrap();
        for model in ["lindblad", "povm"] {
            let dir = tempfile::tempdir().unwrap();
            let status = Command::new(exe)
                .args([
                    "evolve", "--J", j_str, "--model", model, "--state", "coherent:1.1,0.4",
                    "--times", "0,0.5,1,1.5,2", "--iterations", "0,1,2,3,4",
                    "--output-dir", dir.path().to_str().unwrap(),
                ])
                .arg("--gamma")
                .arg(format!("{gamma}"))
                .status()
                .unwrap();
            assert!(status.success());
            let text = std::fs::read_to_string(dir.path().join("moments.csv")).unwrap();
            for line in text.lines().skip(1) {
                let f: Vec<&str> = line.split(',').collect();
                let (label, l, k): (f64, u32, i32) =
                    (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap());
                let got = C64::new(f[3].parse().unwrap(), f[4].parse().unwrap());
                let factor = match model {
                    "lindblad" => {
                        (-0.5 * gamma * f64::from(l) * f64::from(l + 1) * label).exp()
                    }
                    _ => povm_factor(j, l).powi(label as i32),
                };
                curve_gap = curve_gap.max((got - m0.get(l, k) * factor).norm());
            }
        }
    }
    // the rates the two curve families realize genuinely differ (spin 1, rank 1/2)
    let table = decay_rates(HalfInt::from_int(1), 1.0).unwrap();
    let rate_gap_1 = (table.lindblad(1) - table.povm(1)).abs();
    let rate_gap_2 = (table.lindblad(2) - table.povm(2)).abs();

    // phase-space panels: the written grids match the kernel-trace route at
    // their extremal points
    let mut panel_gap = 0.0f64;
    let panels: [(&str, &str, Box<dyn Fn(HalfInt) -> DensityMatrix>); 3] = [
        ("1", "coherent:0.9,0.7", Box::new(|j| {
            coherent_state(j, PhasePoint::new(0.9, 0.7)).density()
        })),
        ("5", "coherent:0.9,0.7", Box::new(|j| {
            coherent_state(j, PhasePoint::new(0.9, 0.7)).density()
        })),
        ("2", "cat", Box::new(|j| {
            let d = j.dim();
            let mut psi = Array1::<C64>::zeros(d);
            let amp = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            psi[0] = amp;
            psi[d - 1] += amp;
            let mat = Array2::from_shape_fn((d, d), |(r, c)| psi[r] * psi[c].conj());
            DensityMatrix::new(j, mat).unwrap()
        })),
    ];
    for (j_str, state, build) in &panels {
        let j: HalfInt = {
            let two: i32 = j_str.parse().unwrap();
            HalfInt::from_int(two)
        };
        let rho = build(j);
        let dir = tempfile::tempdir().unwrap();
        let status = Command::new(exe)
            .args([
                "wigner", "--J", *j_str, "--gamma", "1", "--state", *state, "--times", "0",
                "--iterations", "0", "--grid", "17x32",
                "--output-dir", dir.path().to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
        let text =
            std::fs::read_to_string(dir.path().join("wigner_lindblad_0.csv")).unwrap();
        let mut rows: Vec<(f64, f64, f64)> = Vec::new();
        for line in text.lines().skip(1) {
            let f: Vec<&str> = line.split(',').collect();
            rows.push((f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap()));
        }
        let lo = rows.iter().cloned().fold(rows[0], |a, b| if b.2 < a.2 { b } else { a });
        let hi = rows.iter().cloned().fold(rows[0], |a, b| if b.2 > a.2 { b } else { a });
        for (theta, phi, value) in [lo, hi] {
            let w = sw_kernel_matrix(j, SigmaIndex::WIGNER, PhasePoint::new(theta, phi));
            let trace: C64 = rho.matrix().dot(&w).diag().iter().sum();
            panel_gap = panel_gap.max((value - trace.re).abs());
        }
    }

    let pass = curve_gap <= 1e-12 && panel_gap <= 1e-10 && rate_gap_1 > 0.1;
    report(
        12,
        pass,
        &format!(
            "`evolve` curves equal the closed forms for J ∈ {{1, 5}}, γ = 1/J (gap \
             {curve_gap:.2e} ≤ 1e-12; flow and measurement rates differ by \
             {rate_gap_1:.3}/{rate_gap_2:.3} at ranks 1/2); `wigner` grid extrema match \
             the kernel-trace route to {panel_gap:.2e} (≤ 1e-10)"
        ),
    );
    assert!(pass, "curves {curve_gap:.3e}, panels {panel_gap:.3e}");
}
