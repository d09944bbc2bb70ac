//! Direct numerical minimizations used to cross-check the eigenvalue
//! solution.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand_xoshiro::rand_core::SeedableRng;
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::Serialize;

use crate::basis::{gellmann_generators, CMatrix};
use crate::error::{QcorrError, Result};
use crate::measure::{correlation_matrix, Variant};
use crate::state::{CoefficientTensor, DensityMatrix};
use crate::zoo::gaussian_matrix;
use crate::Complex64;

const START_ANGLE: f64 = std::f64::consts::FRAC_PI_8;
const ANGLE_DECAY: f64 = 0.95;
const MIN_ANGLE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectorSearch {
    pub best: f64,
    /// Objective at each random starting projector.
    pub start_values: Vec<f64>,
    /// Objective after refining each start.
    pub refined_values: Vec<f64>,
}

/// `‖𝒯‖² − Σ_{j<k} o_jᵗ G o_j` for the kept columns of `o`.
fn residual(gram: &DMatrix<f64>, total: f64, o: &DMatrix<f64>, keep: usize) -> f64 {
    let mut captured = 0.0;
    for j in 0..keep {
        let col = o.column(j);
        captured += (gram * col).dot(&col);
    }
    total - captured
}

fn rotate(o: &mut DMatrix<f64>, i: usize, j: usize, angle: f64) {
    let (s, c) = angle.sin_cos();
    for r in 0..o.nrows() {
        let (a, b) = (o[(r, i)], o[(r, j)]);
        o[(r, i)] = c * a + s * b;
        o[(r, j)] = -s * a + c * b;
    }
}

fn refine(gram: &DMatrix<f64>, total: f64, o: &mut DMatrix<f64>, keep: usize, iters: usize, rng: &mut SplitMix64) -> f64 {
    let n = o.nrows();
    let mut planes: Vec<(usize, usize)> = (0..keep).flat_map(|i| (keep..n).map(move |j| (i, j))).collect();
    let mut value = residual(gram, total, o, keep);
    let mut angle = START_ANGLE;
    for _ in 0..iters {
        if angle < MIN_ANGLE {
            break;
        }
        planes.shuffle(rng);
        let mut improved = false;
        for &(i, j) in &planes {
            for sign in [1.0, -1.0] {
                rotate(o, i, j, sign * angle);
                let v = residual(gram, total, o, keep);
                if v < value {
                    value = v;
                    improved = true;
                    break;
                }
                rotate(o, i, j, -sign * angle);
            }
        }
        if !improved {
            angle *= ANGLE_DECAY;
        }
    }
    value
}

/// Minimizes `‖𝒯 − P𝒯‖²` over rank-`(d−1)` projectors `P = O_k O_kᵗ`, with
/// `O` a random orthogonal matrix refined by Givens rotations between kept
/// and discarded columns. Starts are independent and seeded per index.
pub fn brute_force_projector_min(
    c: &CoefficientTensor,
    s: usize,
    variant: Variant,
    samples: usize,
    refine_iters: usize,
    seed: u64,
) -> Result<ProjectorSearch> {
    if samples == 0 {
        return Err(QcorrError::ParameterDomain("at least one sample is required".into()));
    }
    let purity = match variant {
        Variant::Plain => 1.0,
        Variant::Mu => c.complement_purity(s)?,
    };
    let t = correlation_matrix(c, s, variant, purity)?;
    let gram = t.gram();
    let total = gram.trace();
    let n = gram.nrows();
    let keep = c.dims()[s - 1] - 1;

    let runs: Vec<(f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = SplitMix64::seed_from_u64(seed.wrapping_add((k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)));
            let mut o = gaussian_matrix(n, n, &mut rng).qr().q();
            let start = residual(&gram, total, &o, keep);
            let end = refine(&gram, total, &mut o, keep, refine_iters, &mut rng);
            (start, end)
        })
        .collect();

    let best = runs.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    Ok(ProjectorSearch {
        best,
        start_values: runs.iter().map(|r| r.0).collect(),
        refined_values: runs.iter().map(|r| r.1).collect(),
    })
}

/// `‖ρ − Σ_± (Π_± ⊗ I) ρ (Π_± ⊗ I)‖²` for the qubit measurement along the
/// Bloch direction `(θ, φ)`.
fn measurement_distance(rho: &CMatrix, paulis: &[CMatrix], rest: usize, theta: f64, phi: f64) -> f64 {
    let n = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
    let mut ns = CMatrix::zeros(2, 2);
    for k in 0..3 {
        ns += &paulis[k] * Complex64::new(n[k], 0.0);
    }
    let id = CMatrix::identity(2, 2);
    let half = Complex64::new(0.5, 0.0);
    let id_b = CMatrix::identity(rest, rest);
    let mut measured = CMatrix::zeros(rho.nrows(), rho.ncols());
    for p in [(&id + &ns) * half, (&id - &ns) * half] {
        let big = p.kronecker(&id_b);
        measured += &big * rho * &big;
    }
    (rho - measured).norm_squared()
}

/// Geometric discord with a qubit as the measured party: minimum over
/// projective measurements on subsystem 1, grid search over the Bloch sphere
/// followed by compass refinement.
pub fn geometric_discord_qubit_oracle(rho: &DensityMatrix) -> Result<f64> {
    let dims = rho.dims();
    if dims.len() < 2 || dims[0] != 2 {
        return Err(QcorrError::ParameterDomain(format!(
            "qubit oracle needs a measured qubit and a second party, got dims {dims:?}"
        )));
    }
    let rest: usize = dims[1..].iter().product();
    let g = gellmann_generators(2)?;
    let paulis = g.generators();
    let m = rho.matrix();
    let f = |t: f64, p: f64| measurement_distance(m, paulis, rest, t, p);

    const NT: usize = 24;
    const NP: usize = 48;
    let mut grid: Vec<(f64, f64, f64)> = Vec::with_capacity(NT * NP);
    for i in 0..=NT {
        let t = std::f64::consts::PI * i as f64 / NT as f64;
        for j in 0..NP {
            let p = 2.0 * std::f64::consts::PI * j as f64 / NP as f64;
            grid.push((f(t, p), t, p));
        }
    }
    grid.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut best = f64::INFINITY;
    for &(v0, t0, p0) in grid.iter().take(4) {
        let (mut v, mut t, mut p) = (v0, t0, p0);
        let mut step = std::f64::consts::PI / NT as f64;
        while step > 1e-10 {
            let mut moved = false;
            for (dt, dp) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
                let cand = f(t + dt, p + dp);
                if cand < v {
                    v = cand;
                    t += dt;
                    p += dp;
                    moved = true;
                    break;
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        best = best.min(v);
    }
    Ok(best)
}
