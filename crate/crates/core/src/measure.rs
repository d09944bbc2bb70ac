//! Subsystem correlation matrices, the projector minimization and the
//! sequential total correlation.
//!
//! For subsystem `s` the correlation matrix has one row per non-identity
//! basis element of `A_s` and one column per basis multi-index of the other
//! subsystems, so every coefficient with `i_s ≥ 1` appears exactly once.
//! Columns are grouped as `[V | partner 1 | partner 2 | …]`, where a column
//! belongs to the partner block of the first other subsystem whose index is
//! nonzero and `V` is the all-zero column. In the bipartite case this is
//! `√(2/(d_A² d_B)) [f x | √(2/d_B) f T]`.
//!
//! `min_P ‖𝒯 − P𝒯‖²` over rank-`(d−1)` projectors is the sum of all but the
//! `d − 1` largest eigenvalues of `𝒯𝒯ᵗ`, attained by the projector on the
//! leading eigenvectors.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use rand_xoshiro::rand_core::SeedableRng;
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{QcorrError, Result};
use crate::modes::{mode_product, strides, unravel};
use crate::state::{CoefficientTensor, DensityMatrix};

/// Eigenvalues of `𝒯𝒯ᵗ` below this are treated as zero.
pub const EIGEN_FLOOR: f64 = 1e-14;
/// Eigenvalues closer than this (relative to `max(1, τ_max)`) across the
/// projector cut are treated as one degenerate cluster.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Default cap on the number of subsystems for the permutation maximum.
pub const DEFAULT_MAX_PARTIES: usize = 8;
pub const COROLLARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// `f₁ = f₂ = 1`
    Plain,
    /// `f₁ = f₂ = 1/√μ(complement)`
    Mu,
}

impl std::str::FromStr for Variant {
    type Err = QcorrError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Variant::Plain),
            "mu" => Ok(Variant::Mu),
            other => Err(QcorrError::Parse(format!("unknown variant '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    subsystem: usize,
    variant: Variant,
    matrix: DMatrix<f64>,
}

impl CorrelationMatrix {
    pub fn subsystem(&self) -> usize {
        self.subsystem
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `𝒯𝒯ᵗ`
    pub fn gram(&self) -> DMatrix<f64> {
        &self.matrix * self.matrix.transpose()
    }

    /// Non-increasing eigenvalues of `𝒯𝒯ᵗ`, floored at zero.
    pub fn eigenvalues(&self) -> Vec<f64> {
        sorted_eigen(self.gram()).0
    }
}

/// Real symmetric idempotent matrix of rank `d − 1` on `ℝ^{d²−1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Projector {
    local_dim: usize,
    #[serde(serialize_with = "serialize_matrix")]
    matrix: DMatrix<f64>,
}

fn serialize_matrix<S: serde::Serializer>(m: &DMatrix<f64>, ser: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().cloned().collect()).collect();
    rows.serialize(ser)
}

impl Projector {
    pub fn new(local_dim: usize, matrix: DMatrix<f64>) -> Result<Self> {
        let n = local_dim * local_dim - 1;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(QcorrError::Shape(format!(
                "projector for d={local_dim} must be {n}x{n}, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let p = Projector { local_dim, matrix };
        p.check()?;
        Ok(p)
    }

    /// Projector on the span of orthonormal `vectors`.
    pub fn from_orthonormal(local_dim: usize, vectors: &[DVector<f64>]) -> Result<Self> {
        let n = local_dim * local_dim - 1;
        let mut m = DMatrix::zeros(n, n);
        for v in vectors {
            m += v * v.transpose();
        }
        let m = (&m + m.transpose()) * 0.5;
        Projector::new(local_dim, m)
    }

    fn check(&self) -> Result<()> {
        let p = &self.matrix;
        let asym = (p - p.transpose()).amax();
        let idem = (p * p - p).amax();
        let tr = p.trace();
        if asym > 1e-12 || idem > 1e-10 || (tr - (self.local_dim as f64 - 1.0)).abs() > 1e-10 {
            return Err(QcorrError::Shape(format!(
                "not a rank-{} projector (asym {asym:.1e}, idempotency {idem:.1e}, trace {tr})",
                self.local_dim - 1
            )));
        }
        Ok(())
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsystemCorrelation {
    pub value: f64,
    pub projector: Projector,
    /// Non-increasing eigenvalues of `𝒯𝒯ᵗ` for the requested variant.
    pub eigenvalues: Vec<f64>,
    /// The `(d−1)`-th and `d`-th eigenvalues coincide, so the optimal
    /// projector is not unique.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureStep {
    /// 1-based subsystem index.
    pub subsystem: usize,
    pub value_plain: f64,
    pub value_mu: f64,
    pub complement_purity: f64,
    pub eigenvalues: Vec<f64>,
    pub degenerate: bool,
    pub projector: Projector,
}

impl MeasureStep {
    pub fn value(&self, variant: Variant) -> f64 {
        match variant {
            Variant::Plain => self.value_plain,
            Variant::Mu => self.value_mu,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureReport {
    /// 1-based subsystem order.
    pub permutation: Vec<usize>,
    pub variant: Variant,
    pub steps: Vec<MeasureStep>,
    pub total_plain: f64,
    pub total_mu: f64,
}

impl MeasureReport {
    pub fn total(&self) -> f64 {
        self.total_for(self.variant)
    }

    pub fn total_for(&self, variant: Variant) -> f64 {
        match variant {
            Variant::Plain => self.total_plain,
            Variant::Mu => self.total_mu,
        }
    }

    pub fn degenerate(&self) -> bool {
        self.steps.iter().any(|s| s.degenerate)
    }

    pub fn step_values(&self, variant: Variant) -> Vec<f64> {
        self.steps.iter().map(|s| s.value(variant)).collect()
    }
}

fn check_subsystem(c: &CoefficientTensor, s: usize) -> Result<usize> {
    let m = c.parties();
    if s == 0 || s > m {
        return Err(QcorrError::InvalidSubsystem { index: s, parties: m });
    }
    Ok(s - 1)
}

/// Builds `𝒯^{(A_s)}` (1-based `s`). `complement_purity` only enters the
/// `Mu` variant.
pub fn correlation_matrix(
    c: &CoefficientTensor,
    s: usize,
    variant: Variant,
    complement_purity: f64,
) -> Result<CorrelationMatrix> {
    let axis = check_subsystem(c, s)?;
    let scale = match variant {
        Variant::Plain => 1.0,
        Variant::Mu => {
            if !(complement_purity > 0.0 && complement_purity.is_finite()) {
                return Err(QcorrError::ParameterDomain(format!(
                    "complement purity {complement_purity} must be positive"
                )));
            }
            1.0 / complement_purity.sqrt()
        }
    };

    let extents = c.extents();
    let st = strides(&extents);
    let others: Vec<usize> = (0..extents.len()).filter(|&k| k != axis).collect();
    let other_ext: Vec<usize> = others.iter().map(|&k| extents[k]).collect();
    let ncols: usize = other_ext.iter().product();

    // (block key, base offset) per column; key 0 is V, key k+1 is partner `others[k]`
    let mut idx = vec![0; others.len()];
    let mut columns: Vec<(usize, usize)> = (0..ncols)
        .map(|flat| {
            unravel(flat, &other_ext, &mut idx);
            let key = idx.iter().position(|&i| i != 0).map_or(0, |p| p + 1);
            let offset = idx.iter().zip(&others).map(|(&i, &k)| i * st[k]).sum();
            (key, offset)
        })
        .collect();
    columns.sort_by_key(|&(key, _)| key);

    let rows = extents[axis] - 1;
    let coeffs = c.coeffs();
    let matrix = DMatrix::from_fn(rows, ncols, |r, col| scale * coeffs[columns[col].1 + (r + 1) * st[axis]]);
    Ok(CorrelationMatrix { subsystem: s, variant, matrix })
}

fn sorted_eigen(gram: DMatrix<f64>) -> (Vec<f64>, Vec<DVector<f64>>) {
    let eig = SymmetricEigen::new(gram);
    let order: Vec<usize> = (0..eig.eigenvalues.len())
        .sorted_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]))
        .collect();
    let values = order
        .iter()
        .map(|&i| {
            let v = eig.eigenvalues[i];
            if v < EIGEN_FLOOR {
                0.0
            } else {
                v
            }
        })
        .collect();
    let vectors = order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
    (values, vectors)
}

/// How the projector is picked inside a degenerate eigenspace.
enum Choice<'a> {
    /// Span of the eigenspace projections of `e_1, e_2, …`, taken in index
    /// order. Picks the lowest-index generator directions whenever they lie
    /// in the eigenspace.
    Canonical,
    Random(&'a mut SplitMix64),
}

struct Solution {
    value: f64,
    projector: Projector,
    eigenvalues: Vec<f64>,
    degenerate: bool,
}

fn canonical_span(cluster: &[DVector<f64>], need: usize) -> Vec<DVector<f64>> {
    let n = cluster[0].len();
    let mut chosen: Vec<DVector<f64>> = Vec::with_capacity(need);
    for i in 0..n {
        if chosen.len() == need {
            break;
        }
        let mut p = DVector::zeros(n);
        for v in cluster {
            p += v * v[i];
        }
        for u in &chosen {
            let overlap = u.dot(&p);
            p -= u * overlap;
        }
        let norm = p.norm();
        if norm > 1e-6 {
            chosen.push(p / norm);
        }
    }
    chosen
}

fn random_span(cluster: &[DVector<f64>], need: usize, rng: &mut SplitMix64) -> Vec<DVector<f64>> {
    let k = cluster.len();
    let g = DMatrix::<f64>::from_fn(k, need, |_, _| rng.sample(StandardNormal));
    let q = g.qr().q();
    (0..need)
        .map(|c| {
            let mut v = DVector::zeros(cluster[0].len());
            for (j, u) in cluster.iter().enumerate() {
                v += u * q[(j, c)];
            }
            let norm = v.norm();
            v / norm
        })
        .collect()
}

fn solve(gram: DMatrix<f64>, local_dim: usize, choice: &mut Choice) -> Result<Solution> {
    let (values, vectors) = sorted_eigen(gram);
    let n = values.len();
    let keep = local_dim - 1;
    let value: f64 = values[keep..].iter().sum();

    let tol = DEGENERACY_TOL * values[0].max(1.0);
    let degenerate = values[keep - 1] - values[keep] < tol;
    let kept: Vec<DVector<f64>> = if degenerate {
        let mut lo = keep - 1;
        while lo > 0 && values[lo - 1] - values[lo] < tol {
            lo -= 1;
        }
        let mut hi = keep;
        while hi + 1 < n && values[hi] - values[hi + 1] < tol {
            hi += 1;
        }
        let cluster = &vectors[lo..=hi];
        let need = keep - lo;
        let picked = match choice {
            Choice::Canonical => canonical_span(cluster, need),
            Choice::Random(rng) => random_span(cluster, need, rng),
        };
        vectors[..lo].iter().cloned().chain(picked).collect()
    } else {
        vectors[..keep].to_vec()
    };

    Ok(Solution {
        value,
        projector: Projector::from_orthonormal(local_dim, &kept)?,
        eigenvalues: values,
        degenerate,
    })
}

/// `Q_{A_s}` and its optimal projector `P̃` (1-based `s`).
pub fn subsystem_correlation(c: &CoefficientTensor, s: usize, variant: Variant) -> Result<SubsystemCorrelation> {
    let axis = check_subsystem(c, s)?;
    let purity = match variant {
        Variant::Plain => 1.0,
        Variant::Mu => c.complement_purity(s)?,
    };
    let t = correlation_matrix(c, s, variant, purity)?;
    let sol = solve(t.gram(), c.dims()[axis], &mut Choice::Canonical)?;
    Ok(SubsystemCorrelation {
        value: sol.value,
        projector: sol.projector,
        eigenvalues: sol.eigenvalues,
        degenerate: sol.degenerate,
    })
}

/// Replaces the `i_s ≥ 1` sector of `C` by `P̃` applied along axis `s`;
/// the `i_s = 0` sector is untouched.
pub fn apply_projector(c: &CoefficientTensor, s: usize, projector: &Projector) -> Result<CoefficientTensor> {
    let axis = check_subsystem(c, s)?;
    let d = c.dims()[axis];
    if projector.local_dim() != d {
        return Err(QcorrError::Shape(format!(
            "projector is for d={}, subsystem {s} has d={d}",
            projector.local_dim()
        )));
    }
    let n = d * d;
    let mut block = vec![0.0; n * n];
    block[0] = 1.0;
    let p = projector.matrix();
    for r in 1..n {
        for k in 1..n {
            block[r * n + k] = p[(r - 1, k - 1)];
        }
    }
    let extents = c.extents();
    let coeffs = mode_product(c.coeffs(), &extents, axis, &block, n);
    let mut out = c.clone();
    out.coeffs_mut().copy_from_slice(&coeffs);
    Ok(out)
}

fn check_permutation(perm: &[usize], m: usize) -> Result<()> {
    let mut seen = vec![false; m];
    if perm.len() != m {
        return Err(QcorrError::InvalidPermutation(perm.to_vec()));
    }
    for &p in perm {
        if p == 0 || p > m || seen[p - 1] {
            return Err(QcorrError::InvalidPermutation(perm.to_vec()));
        }
        seen[p - 1] = true;
    }
    Ok(())
}

fn run_sequence(c: &CoefficientTensor, perm: &[usize], variant: Variant, choice: &mut Choice) -> Result<MeasureReport> {
    check_permutation(perm, c.parties())?;
    let mut current = c.clone();
    let mut steps = Vec::with_capacity(perm.len());
    for &s in perm {
        let purity = current.complement_purity(s)?;
        let t = correlation_matrix(&current, s, Variant::Plain, 1.0)?;
        let sol = solve(t.gram(), current.dims()[s - 1], choice)?;
        current = apply_projector(&current, s, &sol.projector)?;
        steps.push(MeasureStep {
            subsystem: s,
            value_plain: sol.value,
            value_mu: sol.value / purity,
            complement_purity: purity,
            eigenvalues: sol.eigenvalues,
            degenerate: sol.degenerate,
            projector: sol.projector,
        });
    }
    let total_plain = steps.iter().map(|s| s.value_plain).sum();
    let total_mu = steps.iter().map(|s| s.value_mu).sum();
    Ok(MeasureReport {
        permutation: perm.to_vec(),
        variant,
        steps,
        total_plain,
        total_mu,
    })
}

/// Total correlation along `perm` (1-based). Each step measures the current
/// projected tensor, then applies that step's optimal projector. The
/// projectors do not depend on the variant, so both totals are reported;
/// `variant` picks the one returned by [`MeasureReport::total`].
pub fn total_correlation_sequence(rho: &DensityMatrix, perm: &[usize], variant: Variant) -> Result<MeasureReport> {
    let c = rho.coefficient_tensor()?;
    sequence_from_tensor(&c, perm, variant)
}

pub fn sequence_from_tensor(c: &CoefficientTensor, perm: &[usize], variant: Variant) -> Result<MeasureReport> {
    run_sequence(c, perm, variant, &mut Choice::Canonical)
}

/// Maximum over all orderings; ties go to the lexicographically smallest.
pub fn total_correlation_max(rho: &DensityMatrix, variant: Variant) -> Result<MeasureReport> {
    total_correlation_max_limited(rho, variant, DEFAULT_MAX_PARTIES)
}

pub fn total_correlation_max_limited(rho: &DensityMatrix, variant: Variant, max_parties: usize) -> Result<MeasureReport> {
    let m = rho.parties();
    if m > max_parties {
        return Err(QcorrError::PermutationLimit { parties: m, limit: max_parties });
    }
    let c = rho.coefficient_tensor()?;
    let reports = all_sequences(&c, variant)?;
    Ok(pick_max(reports, variant))
}

/// Every ordering in lexicographic order.
pub fn all_sequences(c: &CoefficientTensor, variant: Variant) -> Result<Vec<MeasureReport>> {
    let perms: Vec<Vec<usize>> = (1..=c.parties()).permutations(c.parties()).collect();
    perms.par_iter().map(|p| sequence_from_tensor(c, p, variant)).collect()
}

fn pick_max(reports: Vec<MeasureReport>, variant: Variant) -> MeasureReport {
    let mut best: Option<MeasureReport> = None;
    for r in reports {
        match &best {
            Some(b) if r.total_for(variant) <= b.total_for(variant) + 1e-12 => {}
            _ => best = Some(r),
        }
    }
    best.expect("at least one permutation")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegenerateSpread {
    pub canonical_plain: f64,
    pub canonical_mu: f64,
    pub min_plain: f64,
    pub max_plain: f64,
    pub min_mu: f64,
    pub max_mu: f64,
}

/// Re-runs a sequence with random projector choices inside every degenerate
/// eigenspace and reports the range of totals next to the canonical one.
pub fn degenerate_spread(c: &CoefficientTensor, perm: &[usize], samples: usize, seed: u64) -> Result<DegenerateSpread> {
    let canonical = sequence_from_tensor(c, perm, Variant::Plain)?;
    let mut spread = DegenerateSpread {
        canonical_plain: canonical.total_plain,
        canonical_mu: canonical.total_mu,
        min_plain: canonical.total_plain,
        max_plain: canonical.total_plain,
        min_mu: canonical.total_mu,
        max_mu: canonical.total_mu,
    };
    if !canonical.degenerate() {
        return Ok(spread);
    }
    let mut rng = SplitMix64::seed_from_u64(seed);
    for _ in 0..samples {
        let r = run_sequence(c, perm, Variant::Plain, &mut Choice::Random(&mut rng))?;
        spread.min_plain = spread.min_plain.min(r.total_plain);
        spread.max_plain = spread.max_plain.max(r.total_plain);
        spread.min_mu = spread.min_mu.min(r.total_mu);
        spread.max_mu = spread.max_mu.max(r.total_mu);
    }
    Ok(spread)
}

/// Same as [`degenerate_spread`] but with a random projector choice in the
/// first degenerate step only. Used to probe whether downstream steps
/// depend on that choice.
pub fn sequence_with_random_choice(c: &CoefficientTensor, perm: &[usize], seed: u64) -> Result<MeasureReport> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    run_sequence(c, perm, Variant::Plain, &mut Choice::Random(&mut rng))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorollaryOutcome {
    pub first: f64,
    pub second: f64,
}

/// For a bipartite state with `d_A < d_B` the second step of the `AB`
/// sequence must vanish, so `Q_AB = Q_A`.
pub fn corollary_check(rho: &DensityMatrix) -> Result<CorollaryOutcome> {
    let dims = rho.dims();
    if dims.len() != 2 || dims[0] >= dims[1] {
        return Err(QcorrError::ParameterDomain(format!(
            "corollary needs a bipartite state with d_A < d_B, got {dims:?}"
        )));
    }
    let r = total_correlation_sequence(rho, &[1, 2], Variant::Plain)?;
    let outcome = CorollaryOutcome {
        first: r.steps[0].value_plain,
        second: r.steps[1].value_plain,
    };
    if outcome.second > COROLLARY_TOL {
        return Err(QcorrError::CorollaryViolated { second: outcome.second });
    }
    Ok(outcome)
}
