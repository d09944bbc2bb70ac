use std::time::{Duration, Instant};

use qcorr::figures::{reproduce, FigureId};
use qcorr::ising::{exact_diag_oracle, ground_state_correlators, ground_state_energy, locate_peak, scan, ChainParams, FieldGrid};
use qcorr::measure::{
    apply_projector, corollary_check, subsystem_correlation, total_correlation_max, total_correlation_sequence, Variant,
};
use qcorr::oracle::{brute_force_projector_min, geometric_discord_qubit_oracle};
use qcorr::zoo::{build, random_local_unitary, random_mixed, random_probabilities, werner_ghz_reference_curves, StateSpec};
use qcorr::{DensityMatrix, Result};

struct Outcome {
    pass: bool,
    detail: String,
}

fn grid(lo: f64, step: f64, points: usize) -> Vec<f64> {
    (0..points).map(|i| lo + i as f64 * step).collect()
}

fn werner_closed_form() -> Result<Outcome> {
    let (mut err, mut second) = (0.0f64, 0.0f64);
    for m in 2..=4usize {
        let mf = m as f64;
        for x in grid(-1.0, 0.05, 41) {
            let r = total_correlation_max(&build(&StateSpec::Werner { m, x })?, Variant::Mu)?;
            let expected = (mf * x - 1.0).powi(2) / ((mf - 1.0) * (mf + 1.0).powi(2));
            err = err.max((r.total_mu - expected).abs());
            second = second.max(r.steps[1].value_plain.abs());
        }
    }
    Ok(Outcome {
        pass: err <= 1e-8 && second <= 1e-10,
        detail: format!("max |Q_mu - formula| = {err:.2e}, max second step = {second:.2e}"),
    })
}

fn werner_ghz() -> Result<Outcome> {
    let mut err = 0.0f64;
    for l in grid(0.0, 0.02, 51) {
        let rho = build(&StateSpec::WernerGhz { lambda: l })?;
        let r = total_correlation_sequence(&rho, &[1, 2, 3], Variant::Plain)?;
        let l2 = l * l;
        let steps = r.step_values(Variant::Plain);
        for (got, want) in steps.iter().zip([l2 / 2.0, l2 / 4.0, 0.0]) {
            err = err.max((got - want).abs());
        }
        err = err.max((r.total_plain - 0.75 * l2).abs());
        err = err.max((r.total_mu - l2 * (3.0 + l2) / (1.0 + l2)).abs());
        let best = total_correlation_max(&rho, Variant::Plain)?;
        err = err.max((best.total_plain - 0.75 * l2).abs());
    }
    let table = reproduce(FigureId::Fig3)?;
    let mut ref_err = 0.0f64;
    let lambdas = table.column("lambda").unwrap_or_default();
    let ds = table.column("d_s").unwrap_or_default();
    let dgg = table.column("d_gg").unwrap_or_default();
    for ((l, s), g) in lambdas.iter().zip(&ds).zip(&dgg) {
        let l = l.unwrap_or(f64::NAN);
        let (want_s, _) = werner_ghz_reference_curves(l);
        ref_err = ref_err.max((s.unwrap_or(f64::NAN) - want_s).abs());
        ref_err = ref_err.max((g.unwrap_or(f64::NAN) - l * l / 2.0).abs());
    }
    let emitted = lambdas.len() == 51;
    Ok(Outcome {
        pass: err <= 1e-8 && emitted && ref_err <= 1e-12,
        detail: format!("max step/total error = {err:.2e}, reference curves emitted for {} points", lambdas.len()),
    })
}

fn mixture_asymmetry() -> Result<Outcome> {
    let (mut err, mut worst_gap) = (0.0f64, f64::INFINITY);
    let lam = 0.5f64;
    for x in grid(0.0, 0.05, 21) {
        for r2 in grid(0.0, 0.05, 21) {
            let rho = build(&StateSpec::BdProductMixture {
                lambda: lam,
                t: [(2.0 * x - 1.0) / 3.0; 3],
                r: [0.0, r2, 0.0],
            })?;
            let t2 = ((2.0 * x - 1.0) / 3.0).powi(2);
            let a = lam * lam * t2;
            let b = r2 * r2 * (1.0 - lam).powi(2);
            let lr = 0.25 * (2.0 * a + a.min(b));
            let rl = 0.25 * (a + a.min(a + b));
            let ab = total_correlation_sequence(&rho, &[1, 2], Variant::Plain)?.total_plain;
            let ba = total_correlation_sequence(&rho, &[2, 1], Variant::Plain)?.total_plain;
            err = err.max((ab - lr).abs()).max((ba - rl).abs());
            worst_gap = worst_gap.min(ab - ba);
        }
    }
    Ok(Outcome {
        pass: err <= 1e-8 && worst_gap >= -1e-10,
        detail: format!("max formula error = {err:.2e}, min (Q_AB - Q_BA) = {worst_gap:.2e}"),
    })
}

fn w_ghz_jump() -> Result<Outcome> {
    let lambdas = grid(0.70, 0.001, 101);
    let q = lambdas
        .iter()
        .map(|&l| Ok(total_correlation_max(&build(&StateSpec::WGhz { lambda: l })?, Variant::Plain)?.total_plain))
        .collect::<Result<Vec<f64>>>()?;
    let mut jumps: Vec<(f64, usize)> = q.windows(2).enumerate().map(|(i, w)| ((w[1] - w[0]).abs(), i)).collect();
    let (largest, at) = jumps.iter().cloned().fold((0.0, 0), |b, j| if j.0 > b.0 { j } else { b });
    jumps.sort_by(|a, b| a.0.total_cmp(&b.0));
    let median = (jumps[49].0 + jumps[50].0) / 2.0;
    let location = lambdas[at];
    Ok(Outcome {
        pass: (location - 0.75).abs() <= 0.005 + 1e-12 && largest > 10.0 * median,
        detail: format!(
            "largest jump {largest:.4} between {:.3} and {:.3}, {:.1}x median",
            lambdas[at],
            lambdas[at + 1],
            largest / median
        ),
    })
}

fn qubit_oracle() -> Result<Outcome> {
    let mut err = 0.0f64;
    for k in 0..500u64 {
        let rho = random_mixed(&[2, 2], 1 + (k % 4) as usize, 1000 + k)?;
        let q = subsystem_correlation(&rho.coefficient_tensor()?, 1, Variant::Plain)?.value;
        err = err.max((q - geometric_discord_qubit_oracle(&rho)?).abs());
    }
    Ok(Outcome { pass: err <= 1e-6, detail: format!("500 states, max |Q_A - oracle| = {err:.2e}") })
}

fn projector_oracle() -> Result<Outcome> {
    let (mut err, mut dominance) = (0.0f64, f64::NEG_INFINITY);
    let mut checked = 0;
    for k in 0..100u64 {
        let dims: &[usize] = if k < 50 { &[2, 2, 2] } else { &[3, 2] };
        let total: usize = dims.iter().product();
        let rho = random_mixed(dims, 1 + (k as usize % total), 2000 + k)?;
        let perm: Vec<usize> = (1..=dims.len()).collect();
        let report = total_correlation_sequence(&rho, &perm, Variant::Plain)?;
        let mut c = rho.coefficient_tensor()?;
        for step in &report.steps {
            let search = brute_force_projector_min(&c, step.subsystem, Variant::Plain, 200, 500, 3000 + k)?;
            err = err.max((search.best - step.value_plain).abs());
            for v in search.start_values.iter().chain(&search.refined_values) {
                dominance = dominance.max(step.value_plain - v);
            }
            c = apply_projector(&c, step.subsystem, &step.projector)?;
            checked += 1;
        }
    }
    Ok(Outcome {
        pass: err <= 1e-6 && dominance <= 1e-9,
        detail: format!("{checked} steps, max |analytic - oracle| = {err:.2e}, max excess over samples = {dominance:.2e}"),
    })
}

fn smaller_first_party() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for k in 0..100u64 {
        let dims = if k % 2 == 0 { [2, 3] } else { [2, 4] };
        let rho = random_mixed(&dims, 1 + (k as usize % (dims[0] * dims[1])), 4000 + k)?;
        worst = worst.max(corollary_check(&rho)?.second);
    }
    Ok(Outcome { pass: worst <= 1e-10, detail: format!("100 states, max second step = {worst:.2e}") })
}

fn invariance() -> Result<Outcome> {
    let shapes: [&[usize]; 5] = [&[2, 2], &[2, 3], &[3, 3], &[2, 2, 2], &[2, 3, 2]];
    let mut worst = 0.0f64;
    for k in 0..200u64 {
        let dims = shapes[k as usize % shapes.len()];
        let total: usize = dims.iter().product();
        let rho = random_mixed(dims, 2 + (k as usize * 7) % (total - 1), 5000 + k)?;
        let base = total_correlation_max(&rho, Variant::Plain)?;
        let base_mu = total_correlation_max(&rho, Variant::Mu)?;
        for u in 0..5u64 {
            let rotated = rho.transformed(&random_local_unitary(dims, 6000 + 5 * k + u))?;
            let r = total_correlation_max(&rotated, Variant::Plain)?;
            let r_mu = total_correlation_max(&rotated, Variant::Mu)?;
            worst = worst
                .max((r.total_plain - base.total_plain).abs())
                .max((r_mu.total_mu - base_mu.total_mu).abs());
        }
    }
    Ok(Outcome { pass: worst <= 1e-8, detail: format!("200 mixed states x 5 rotations, max |dQ| = {worst:.2e}") })
}

fn ising_transition() -> Result<Outcome> {
    let mut ed_err = 0.0f64;
    let mut energy_ok = true;
    for n in [4, 6, 8, 10, 12] {
        for h in [0.25, 0.5, 1.0, 1.5, 2.0] {
            let p = ChainParams::ising(n, h)?;
            let ed = exact_diag_oracle(&p)?;
            ed_err = ed_err.max(ed.correlators.max_abs_diff(&ground_state_correlators(&p)?));
            energy_ok &= (ed.energy - ground_state_energy(&p)?).abs() <= 1e-9 * n as f64;
        }
    }
    let grid = FieldGrid::new(0.2, 1.8, 0.01)?;
    let mut peaks = Vec::new();
    for n in [16, 64, 256] {
        peaks.push(locate_peak(&scan(&ChainParams::ising(n, 0.0)?, &grid, Variant::Plain)?)?.0);
    }
    let start = Instant::now();
    let big = scan(&ChainParams::ising(1024, 0.0)?, &grid, Variant::Plain)?;
    let big_time = start.elapsed();
    let finite = big.h_grid.len() == 161 && big.q_values.iter().chain(&big.dq_dh).all(|v| v.is_finite());

    let dist: Vec<f64> = peaks.iter().map(|h| (h - 1.0).abs()).collect();
    let pass = ed_err <= 1e-8
        && energy_ok
        && (0.85 - 1e-9..=1.15 + 1e-9).contains(&peaks[0])
        && (0.95 - 1e-9..=1.05 + 1e-9).contains(&peaks[2])
        && dist[1] <= dist[0] + 1e-9
        && dist[2] <= dist[1] + 1e-9
        && finite
        && big_time < Duration::from_secs(300);
    Ok(Outcome {
        pass,
        detail: format!(
            "ED max diff {ed_err:.2e}; peaks N=16/64/256 at {:.2}/{:.2}/{:.2}; N=1024 scan {:.2} s",
            peaks[0],
            peaks[1],
            peaks[2],
            big_time.as_secs_f64()
        ),
    })
}

fn classical_zeros() -> Result<Outcome> {
    let shapes: [&[usize]; 4] = [&[2, 2], &[2, 3], &[2, 2, 2], &[3, 2, 2]];
    let mut worst = 0.0f64;
    for k in 0..50u64 {
        let dims = shapes[k as usize % shapes.len()].to_vec();
        let total: usize = dims.iter().product();
        let probs = random_probabilities(total, 7000 + k);
        let rho: DensityMatrix = build(&StateSpec::ClassicalDiagonal { dims, probs })?;
        for v in [Variant::Plain, Variant::Mu] {
            worst = worst.max(total_correlation_max(&rho, v)?.total().abs());
        }
    }
    Ok(Outcome { pass: worst <= 1e-9, detail: format!("50 states, max total = {worst:.2e}") })
}

type Criterion = (&'static str, fn() -> Result<Outcome>, u64);

fn main() {
    let criteria: [Criterion; 10] = [
        ("Werner closed form", werner_closed_form, 5),
        ("Werner-GHZ steps and totals", werner_ghz, 5),
        ("Bell-diagonal/product mixture asymmetry", mixture_asymmetry, 10),
        ("W-GHZ discontinuity", w_ghz_jump, 10),
        ("qubit measurement oracle", qubit_oracle, 120),
        ("brute-force projector oracle", projector_oracle, 300),
        ("second step vanishes for d_A < d_B", smaller_first_party, 10),
        ("local-unitary invariance", invariance, 120),
        ("Ising transition", ising_transition, 600),
        ("classical states give zero", classical_zeros, 10),
    ];
    let mut failures = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let secs = start.elapsed().as_secs_f64();
        let (pass, detail) = match result {
            Ok(o) => (o.pass && secs < *limit as f64, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {:>2} [{}] {name}: {detail} ({secs:.2} s, limit {limit} s)",
            i + 1,
            if pass { "PASS" } else { "FAIL" }
        );
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
