//! Ground state of the periodic transverse-field XY chain
//! `H = −(J/2) Σ [(1+γ) σˣσˣ + (1−γ) σʸσʸ] − h Σ σᶻ`
//! and correlation scans of its nearest-neighbour two-site state.
//!
//! Correlators come from the Jordan–Wigner free-fermion solution in the
//! even-parity sector (antiperiodic momenta `k = (2n+1)π/N`). With
//! `a_k = h + J cos k`, `b_k = γJ sin k`, `ω_k = √(a_k² + b_k²)`:
//! `⟨σᶻ⟩ = ⟨a/ω⟩`, `G(r) = ⟨(a cos kr − b sin kr)/ω⟩`, `⟨σˣσˣ⟩ = G(−1)`,
//! `⟨σʸσʸ⟩ = G(1)`, `⟨σᶻσᶻ⟩ = ⟨σᶻ⟩² − G(1)G(−1)`, `E₀ = −Σ ω_k`.
//!
//! For `γ < 1` and small `h` the true finite-chain ground state can sit in
//! the odd-parity sector, where these formulas do not apply.

mod exact;

use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::basis::CMatrix;
use crate::error::{QcorrError, Result};
use crate::measure::{total_correlation_max, Variant};
use crate::state::DensityMatrix;
use crate::Complex64;

pub use exact::{exact_diag_oracle, ExactGroundState, MAX_EXACT_SPINS};

pub const MIN_GRID_POINTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainParams {
    pub n_spins: usize,
    pub j: f64,
    pub h: f64,
    pub gamma: f64,
}

impl ChainParams {
    pub fn new(n_spins: usize, j: f64, h: f64, gamma: f64) -> Result<Self> {
        let p = ChainParams { n_spins, j, h, gamma };
        p.validate()?;
        Ok(p)
    }

    /// `γ = J = 1`.
    pub fn ising(n_spins: usize, h: f64) -> Result<Self> {
        Self::new(n_spins, 1.0, h, 1.0)
    }

    pub fn with_field(&self, h: f64) -> Result<Self> {
        Self::new(self.n_spins, self.j, h, self.gamma)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_spins < 4 || !self.n_spins.is_multiple_of(2) {
            return Err(QcorrError::InvalidChain(format!("n_spins={} must be even and ≥ 4", self.n_spins)));
        }
        if !(self.j.is_finite() && self.j > 0.0) {
            return Err(QcorrError::InvalidChain(format!("J={} must be positive", self.j)));
        }
        if !(self.h.is_finite() && self.h >= 0.0) {
            return Err(QcorrError::InvalidChain(format!("h={} must be non-negative", self.h)));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(QcorrError::InvalidChain(format!("gamma={} outside [0, 1]", self.gamma)));
        }
        Ok(())
    }
}

/// Translation-invariant single-site magnetization and nearest-neighbour
/// correlators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelatorSet {
    pub mz: f64,
    pub gxx: f64,
    pub gyy: f64,
    pub gzz: f64,
}

impl CorrelatorSet {
    pub fn max_abs_diff(&self, other: &CorrelatorSet) -> f64 {
        [
            self.mz - other.mz,
            self.gxx - other.gxx,
            self.gyy - other.gyy,
            self.gzz - other.gzz,
        ]
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

struct Modes {
    a: Vec<f64>,
    b: Vec<f64>,
    k: Vec<f64>,
    omega: Vec<f64>,
}

fn modes(p: &ChainParams) -> Modes {
    let n = p.n_spins;
    let k: Vec<f64> = (0..n)
        .map(|i| (2 * i + 1) as f64 * std::f64::consts::PI / n as f64)
        .collect();
    let a: Vec<f64> = k.iter().map(|k| p.h + p.j * k.cos()).collect();
    let b: Vec<f64> = k.iter().map(|k| p.gamma * p.j * k.sin()).collect();
    let omega = a.iter().zip(&b).map(|(a, b)| a.hypot(*b)).collect();
    Modes { a, b, k, omega }
}

pub fn ground_state_correlators(p: &ChainParams) -> Result<CorrelatorSet> {
    p.validate()?;
    let m = modes(p);
    let n = p.n_spins as f64;
    let mean = |f: &dyn Fn(usize) -> f64| (0..p.n_spins).map(f).sum::<f64>() / n;
    let mz = mean(&|i| m.a[i] / m.omega[i]);
    let g = |r: f64| mean(&|i| ((m.k[i] * r).cos() * m.a[i] - m.b[i] * (m.k[i] * r).sin()) / m.omega[i]);
    let (gp, gm) = (g(1.0), g(-1.0));
    Ok(CorrelatorSet {
        mz,
        gxx: gm,
        gyy: gp,
        gzz: mz * mz - gp * gm,
    })
}

pub fn ground_state_energy(p: &ChainParams) -> Result<f64> {
    p.validate()?;
    Ok(-modes(p).omega.iter().sum::<f64>())
}

/// `(1/4)[I⊗I + ⟨σᶻ⟩(σᶻ⊗I + I⊗σᶻ) + Σ_α ⟨σᵅσᵅ⟩ σᵅ⊗σᵅ]`.
pub fn two_site_rdm(c: &CorrelatorSet) -> Result<DensityMatrix> {
    let r = |v: f64| Complex64::new(v, 0.0);
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = r((1.0 + 2.0 * c.mz + c.gzz) / 4.0);
    m[(1, 1)] = r((1.0 - c.gzz) / 4.0);
    m[(2, 2)] = r((1.0 - c.gzz) / 4.0);
    m[(3, 3)] = r((1.0 - 2.0 * c.mz + c.gzz) / 4.0);
    m[(0, 3)] = r((c.gxx - c.gyy) / 4.0);
    m[(3, 0)] = r((c.gxx - c.gyy) / 4.0);
    m[(1, 2)] = r((c.gxx + c.gyy) / 4.0);
    m[(2, 1)] = r((c.gxx + c.gyy) / 4.0);
    DensityMatrix::new(vec![2, 2], m)
}

/// Uniform grid `lo + i·step`, `i = 0..=round((hi − lo)/step)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldGrid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl FieldGrid {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && step.is_finite()) || step <= 0.0 || hi <= lo {
            return Err(QcorrError::InvalidGrid(format!("need lo < hi and step > 0, got {lo}:{hi}:{step}")));
        }
        let g = FieldGrid { lo, hi, step };
        let points = g.len();
        if points < MIN_GRID_POINTS {
            return Err(QcorrError::GridTooCoarse { points, min: MIN_GRID_POINTS });
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        ((self.hi - self.lo) / self.step).round() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.lo + i as f64 * self.step).collect()
    }
}

/// `lo:hi:step`
impl FromStr for FieldGrid {
    type Err = QcorrError;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(QcorrError::Parse(format!("grid '{s}' must be lo:hi:step")));
        }
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| QcorrError::Parse(format!("bad grid value '{t}'")))
        };
        FieldGrid::new(num(parts[0])?, num(parts[1])?, num(parts[2])?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSeries {
    pub h_grid: Vec<f64>,
    pub q_values: Vec<f64>,
    /// Central differences at `h_grid[1..n−1]`.
    pub dq_dh: Vec<f64>,
}

impl ScanSeries {
    pub fn from_values(h_grid: Vec<f64>, q_values: Vec<f64>) -> Result<Self> {
        if h_grid.len() != q_values.len() {
            return Err(QcorrError::Shape(format!(
                "{} grid points but {} values",
                h_grid.len(),
                q_values.len()
            )));
        }
        if h_grid.len() < MIN_GRID_POINTS {
            return Err(QcorrError::GridTooCoarse { points: h_grid.len(), min: MIN_GRID_POINTS });
        }
        if h_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(QcorrError::InvalidGrid("grid must be strictly increasing".into()));
        }
        let dq_dh = (1..h_grid.len() - 1)
            .map(|i| (q_values[i + 1] - q_values[i - 1]) / (h_grid[i + 1] - h_grid[i - 1]))
            .collect();
        Ok(ScanSeries { h_grid, q_values, dq_dh })
    }

    /// Derivative aligned with `h_grid`; `None` at the endpoints.
    pub fn derivative_at(&self, i: usize) -> Option<f64> {
        if i == 0 || i + 1 >= self.h_grid.len() {
            None
        } else {
            Some(self.dq_dh[i - 1])
        }
    }
}

/// Scan with correlators supplied per field value.
pub fn scan_with<F>(grid: &FieldGrid, variant: Variant, correlators: F) -> Result<ScanSeries>
where
    F: Fn(f64) -> Result<CorrelatorSet> + Sync,
{
    let h = grid.values();
    let q = h
        .par_iter()
        .map(|&hv| {
            let rho = two_site_rdm(&correlators(hv)?)?;
            Ok(total_correlation_max(&rho, variant)?.total())
        })
        .collect::<Result<Vec<f64>>>()?;
    ScanSeries::from_values(h, q)
}

/// Total correlation of neighbouring spins across the field grid; the
/// template's own `h` is ignored.
pub fn scan(template: &ChainParams, grid: &FieldGrid, variant: Variant) -> Result<ScanSeries> {
    scan_with(grid, variant, |h| ground_state_correlators(&template.with_field(h)?))
}

/// Interior point with the largest `|dQ/dh|`; ties go to the smaller field.
pub fn locate_peak(s: &ScanSeries) -> Result<(f64, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, d) in s.dq_dh.iter().enumerate() {
        let m = d.abs();
        if m > best.map_or(0.0, |b| b.1) {
            best = Some((i, m));
        }
    }
    best.map(|(i, m)| (s.h_grid[i + 1], m)).ok_or(QcorrError::NoPeak)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strong_field_polarizes() {
        let c = ground_state_correlators(&ChainParams::ising(16, 100.0).unwrap()).unwrap();
        assert!((c.mz - 1.0).abs() < 1e-3);
        assert!(c.gxx.abs() < 1e-2);
        assert!((c.gzz - 1.0).abs() < 1e-3);
    }

    #[test]
    fn zero_field_aligns_along_x() {
        let c = ground_state_correlators(&ChainParams::ising(16, 0.0).unwrap()).unwrap();
        assert!((c.gxx - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rdm_limits() {
        let zero = CorrelatorSet { mz: 0.0, gxx: 0.0, gyy: 0.0, gzz: 0.0 };
        let rho = two_site_rdm(&zero).unwrap();
        assert!((rho.matrix() - CMatrix::identity(4, 4) * Complex64::new(0.25, 0.0)).camax() < 1e-15);
        let up = CorrelatorSet { mz: 1.0, gxx: 0.0, gyy: 0.0, gzz: 1.0 };
        let rho = two_site_rdm(&up).unwrap();
        assert_eq!(rho.matrix()[(0, 0)].re, 1.0);
        assert!((rho.purity() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn invalid_params() {
        assert!(ChainParams::ising(2, 1.0).is_err());
        assert!(ChainParams::ising(7, 1.0).is_err());
        assert!(ChainParams::ising(8, -1.0).is_err());
        assert!(ChainParams::new(8, 1.0, 1.0, 1.5).is_err());
    }

    #[test]
    fn grid_parsing() {
        let g: FieldGrid = "0.2:1.8:0.01".parse().unwrap();
        assert_eq!(g.len(), 161);
        let v = g.values();
        assert_eq!(v[0], 0.2);
        assert!((v[160] - 1.8).abs() < 1e-12);
        assert!(matches!("0:1:0.5".parse::<FieldGrid>(), Err(QcorrError::GridTooCoarse { points: 3, .. })));
        assert!("1:0:0.1".parse::<FieldGrid>().is_err());
        assert!("0:1".parse::<FieldGrid>().is_err());
    }

    #[test]
    fn constant_correlators_give_flat_series() {
        let grid = FieldGrid::new(0.0, 1.0, 0.1).unwrap();
        let fixed = CorrelatorSet { mz: 0.3, gxx: 0.4, gyy: -0.1, gzz: 0.2 };
        let s = scan_with(&grid, Variant::Plain, |_| Ok(fixed)).unwrap();
        assert!(s.dq_dh.iter().all(|&d| d == 0.0));
        assert_eq!(locate_peak(&s), Err(QcorrError::NoPeak));
    }

    #[test]
    fn peak_on_synthetic_spike() {
        let h: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let mut q = vec![0.0; 10];
        q[6] = 1.0;
        q[4] = -1.0;
        let s = ScanSeries::from_values(h, q).unwrap();
        assert_eq!(locate_peak(&s).unwrap(), (5.0, 1.0));
        assert_eq!(s.derivative_at(0), None);
        assert_eq!(s.derivative_at(5), Some(1.0));
    }

    #[test]
    fn scan_is_deterministic() {
        let p = ChainParams::ising(16, 0.0).unwrap();
        let grid = FieldGrid::new(0.5, 1.5, 0.05).unwrap();
        assert_eq!(scan(&p, &grid, Variant::Plain).unwrap(), scan(&p, &grid, Variant::Plain).unwrap());
    }
}
