//! Exact diagonalization of the spin Hamiltonian by Lanczos iteration in
//! each parity sector. Site 0 is the most significant bit; bit 0 is spin up
//! (`σᶻ = +1`).

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_xoshiro::rand_core::SeedableRng;
use rand_xoshiro::SplitMix64;
use serde::Serialize;

use super::{ChainParams, CorrelatorSet};
use crate::basis::CMatrix;
use crate::error::{QcorrError, Result};
use crate::state::DensityMatrix;
use crate::Complex64;

pub const MAX_EXACT_SPINS: usize = 12;
const RESIDUAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactGroundState {
    pub energy: f64,
    /// `+1` for an even number of down spins.
    pub parity: i8,
    pub correlators: CorrelatorSet,
    #[serde(skip)]
    pub rdm: DensityMatrix,
}

struct Sector {
    n: usize,
    states: Vec<usize>,
    index: Vec<usize>,
}

impl Sector {
    fn new(n: usize, odd: bool) -> Self {
        let full = 1usize << n;
        let states: Vec<usize> = (0..full).filter(|b| (b.count_ones() % 2 == 1) == odd).collect();
        let mut index = vec![usize::MAX; full];
        for (i, &b) in states.iter().enumerate() {
            index[b] = i;
        }
        Sector { n, states, index }
    }

    fn spin(&self, b: usize, site: usize) -> f64 {
        if (b >> (self.n - 1 - site)) & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    fn pair_mask(&self, site: usize) -> usize {
        let next = (site + 1) % self.n;
        (1 << (self.n - 1 - site)) | (1 << (self.n - 1 - next))
    }

    fn apply(&self, p: &ChainParams, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (i, &b) in self.states.iter().enumerate() {
            let xi = x[i];
            let mut diag = 0.0;
            for site in 0..self.n {
                diag += self.spin(b, site);
            }
            y[i] += -p.h * diag * xi;
            for site in 0..self.n {
                let ss = self.spin(b, site) * self.spin(b, (site + 1) % self.n);
                let off = -0.5 * p.j * ((1.0 + p.gamma) - (1.0 - p.gamma) * ss);
                y[self.index[b ^ self.pair_mask(site)]] += off * xi;
            }
        }
    }
}

/// Lowest eigenpair by Lanczos with full reorthogonalization.
fn lanczos_ground(sector: &Sector, p: &ChainParams) -> (f64, Vec<f64>) {
    let dim = sector.states.len();
    let mut rng = SplitMix64::seed_from_u64(0x1513);
    let mut q: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() - 0.5).collect();
    let norm = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    q.iter_mut().for_each(|v| *v /= norm);

    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0; dim];
    let ritz: (f64, DVector<f64>) = loop {
        let k = basis.len() - 1;
        sector.apply(p, &basis[k], &mut w);
        let alpha: f64 = w.iter().zip(&basis[k]).map(|(a, b)| a * b).sum();
        alphas.push(alpha);
        for _ in 0..2 {
            for v in &basis {
                let overlap: f64 = w.iter().zip(v).map(|(a, b)| a * b).sum();
                w.iter_mut().zip(v).for_each(|(a, b)| *a -= overlap * b);
            }
        }
        let beta = w.iter().map(|v| v * v).sum::<f64>().sqrt();

        let m = alphas.len();
        let t = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                alphas[i]
            } else if i + 1 == j {
                betas[i]
            } else if j + 1 == i {
                betas[j]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let low = eig.eigenvalues.imin();
        let y = eig.eigenvectors.column(low).into_owned();
        let residual = beta * y[m - 1].abs();
        let value = eig.eigenvalues[low];
        if residual < RESIDUAL_TOL * value.abs().max(1.0) || beta < RESIDUAL_TOL || m == dim {
            break (value, y);
        }
        betas.push(beta);
        basis.push(w.iter().map(|v| v / beta).collect());
    };

    let mut vec = vec![0.0; dim];
    for (coef, v) in ritz.1.iter().zip(&basis) {
        vec.iter_mut().zip(v).for_each(|(a, b)| *a += coef * b);
    }
    let norm = vec.iter().map(|v| v * v).sum::<f64>().sqrt();
    vec.iter_mut().for_each(|v| *v /= norm);
    (ritz.0, vec)
}

fn observables(sector: &Sector, psi: &[f64]) -> Result<(CorrelatorSet, DensityMatrix)> {
    let n = sector.n;
    let (mut mz, mut gxx, mut gyy, mut gzz) = (0.0, 0.0, 0.0, 0.0);
    for (i, &b) in sector.states.iter().enumerate() {
        let w = psi[i] * psi[i];
        for site in 0..n {
            let s0 = sector.spin(b, site);
            let s1 = sector.spin(b, (site + 1) % n);
            mz += w * s0;
            gzz += w * s0 * s1;
            let partner = psi[sector.index[b ^ sector.pair_mask(site)]] * psi[i];
            gxx += partner;
            gyy -= s0 * s1 * partner;
        }
    }
    let nf = n as f64;
    let corr = CorrelatorSet {
        mz: mz / nf,
        gxx: gxx / nf,
        gyy: gyy / nf,
        gzz: gzz / nf,
    };

    // sites 0 and 1 are the two most significant bits
    let shift = n - 2;
    let rest = 1usize << shift;
    let mut m = CMatrix::zeros(4, 4);
    for r in 0..rest {
        for a in 0..4 {
            let ia = sector.index[(a << shift) | r];
            if ia == usize::MAX {
                continue;
            }
            for bb in 0..4 {
                let ib = sector.index[(bb << shift) | r];
                if ib != usize::MAX {
                    m[(a, bb)] += Complex64::new(psi[ia] * psi[ib], 0.0);
                }
            }
        }
    }
    Ok((corr, DensityMatrix::new(vec![2, 2], m)?))
}

/// Ground state by direct diagonalization for `n_spins ≤ 12`. The even
/// sector is used unless the odd sector is lower by more than `1e-9·N`.
pub fn exact_diag_oracle(p: &ChainParams) -> Result<ExactGroundState> {
    p.validate()?;
    if p.n_spins > MAX_EXACT_SPINS {
        return Err(QcorrError::InvalidChain(format!(
            "exact diagonalization limited to {MAX_EXACT_SPINS} spins, got {}",
            p.n_spins
        )));
    }
    let even = Sector::new(p.n_spins, false);
    let odd = Sector::new(p.n_spins, true);
    let (e_even, v_even) = lanczos_ground(&even, p);
    let (e_odd, v_odd) = lanczos_ground(&odd, p);
    let (energy, parity, sector, psi) = if e_odd < e_even - 1e-9 * p.n_spins as f64 {
        (e_odd, -1, &odd, v_odd)
    } else {
        (e_even, 1, &even, v_even)
    };
    let (correlators, rdm) = observables(sector, &psi)?;
    Ok(ExactGroundState { energy, parity, correlators, rdm })
}
