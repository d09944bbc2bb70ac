//! Density matrices, their coefficient tensors in the product operator
//! basis, and the bipartite `{x, y, T}` description.
//!
//! Subsystems are numbered from 1, the leftmost tensor factor being
//! subsystem 1; composite indices are flattened row-major.

use nalgebra::{DMatrix, DVector};

use crate::basis::{gellmann_generators, orthonormal_basis, trace_product, CMatrix};
use crate::error::{QcorrError, Result};
use crate::modes::{mode_product, strides, unravel};
use crate::Complex64;

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_FLOOR: f64 = -1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: CMatrix,
}

fn check_dims(dims: &[usize], n: usize) -> Result<()> {
    if dims.is_empty() {
        return Err(QcorrError::Shape("empty dimension list".into()));
    }
    if let Some(&d) = dims.iter().find(|&&d| d < 2) {
        return Err(QcorrError::InvalidDimension(d));
    }
    let total: usize = dims.iter().product();
    if total != n {
        return Err(QcorrError::Shape(format!(
            "dims {dims:?} multiply to {total}, matrix is {n}x{n}"
        )));
    }
    Ok(())
}

impl DensityMatrix {
    /// Builds a state and checks every density-matrix invariant.
    pub fn new(dims: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        let rho = Self::new_unchecked(dims, matrix)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Checks only the shape. Used for intermediate matrices rebuilt from
    /// projected coefficient tensors, which need not be positive.
    pub fn new_unchecked(dims: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(QcorrError::Shape(format!(
                "matrix is {}x{}, expected square",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        check_dims(&dims, matrix.nrows())?;
        Ok(Self { dims, matrix })
    }

    pub fn from_pure(dims: Vec<usize>, amplitudes: &[Complex64]) -> Result<Self> {
        let psi = DVector::from_column_slice(amplitudes);
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(QcorrError::ParameterDomain("zero state vector".into()));
        }
        let psi = psi / Complex64::new(norm, 0.0);
        Self::new(dims, &psi * psi.adjoint())
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let n: usize = dims.iter().product();
        let m = CMatrix::identity(n, n) * Complex64::new(1.0 / n as f64, 0.0);
        Self::new(dims, m)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Hermiticity, unit trace and positivity, checked in that order.
    pub fn validate(&self) -> Result<()> {
        check_dims(&self.dims, self.matrix.nrows())?;
        let deviation = (&self.matrix - self.matrix.adjoint()).camax();
        if deviation.is_nan() || deviation > HERMITICITY_TOL {
            return Err(QcorrError::NotHermitian { deviation });
        }
        let tr = self.matrix.trace();
        if !((tr.re - 1.0).abs() <= TRACE_TOL && tr.im.abs() <= TRACE_TOL) {
            return Err(QcorrError::TraceViolation { trace: tr.re });
        }
        let min_eigenvalue = self.min_eigenvalue();
        if min_eigenvalue < POSITIVITY_FLOOR {
            return Err(QcorrError::NotPositive { min_eigenvalue });
        }
        Ok(())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        // symmetrize first so tiny anti-Hermitian noise does not leak in
        let h = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Reduced state on the subsystems listed in `keep` (1-based, any order;
    /// the result keeps the original factor order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let m = self.parties();
        if keep.is_empty() {
            return Err(QcorrError::InvalidSelection("keep set is empty".into()));
        }
        let mut kept = vec![false; m];
        for &k in keep {
            if k == 0 || k > m {
                return Err(QcorrError::InvalidSubsystem { index: k, parties: m });
            }
            if kept[k - 1] {
                return Err(QcorrError::InvalidSelection(format!("subsystem {k} listed twice")));
            }
            kept[k - 1] = true;
        }

        let kept_dims: Vec<usize> = (0..m).filter(|&s| kept[s]).map(|s| self.dims[s]).collect();
        let traced_dims: Vec<usize> = (0..m).filter(|&s| !kept[s]).map(|s| self.dims[s]).collect();
        let dk: usize = kept_dims.iter().product();
        let dt: usize = traced_dims.iter().product();
        let full_strides = strides(&self.dims);

        // flat index in the full space from (kept multi-index, traced multi-index)
        let compose = |kflat: usize, tflat: usize, kbuf: &mut Vec<usize>, tbuf: &mut Vec<usize>| {
            unravel(kflat, &kept_dims, kbuf);
            unravel(tflat, &traced_dims, tbuf);
            let (mut ki, mut ti, mut flat) = (0, 0, 0);
            for s in 0..m {
                let idx = if kept[s] {
                    ki += 1;
                    kbuf[ki - 1]
                } else {
                    ti += 1;
                    tbuf[ti - 1]
                };
                flat += idx * full_strides[s];
            }
            flat
        };

        let mut kbuf = vec![0; kept_dims.len()];
        let mut tbuf = vec![0; traced_dims.len()];
        let mut index = vec![0usize; dk * dt];
        for kf in 0..dk {
            for tf in 0..dt {
                index[kf * dt + tf] = compose(kf, tf, &mut kbuf, &mut tbuf);
            }
        }

        let mut out = CMatrix::zeros(dk, dk);
        for i in 0..dk {
            for j in 0..dk {
                let mut acc = Complex64::new(0.0, 0.0);
                for t in 0..dt {
                    acc += self.matrix[(index[i * dt + t], index[j * dt + t])];
                }
                out[(i, j)] = acc;
            }
        }
        DensityMatrix::new_unchecked(kept_dims, out)
    }

    /// `U ρ U†`, keeping the subsystem structure.
    pub fn transformed(&self, u: &CMatrix) -> Result<DensityMatrix> {
        if u.nrows() != self.total_dim() || u.ncols() != self.total_dim() {
            return Err(QcorrError::Shape("unitary does not match state dimension".into()));
        }
        DensityMatrix::new_unchecked(self.dims.clone(), u * &self.matrix * u.adjoint())
    }

    /// Same matrix viewed as a bipartite state: subsystems `1..=cut` form A,
    /// the rest form B.
    pub fn regrouped(&self, cut: usize) -> Result<DensityMatrix> {
        let m = self.parties();
        if cut == 0 || cut >= m {
            return Err(QcorrError::InvalidCut { cut, parties: m });
        }
        let da = self.dims[..cut].iter().product();
        let db = self.dims[cut..].iter().product();
        DensityMatrix::new_unchecked(vec![da, db], self.matrix.clone())
    }

    pub fn coefficient_tensor(&self) -> Result<CoefficientTensor> {
        let dims = &self.dims;
        let extents: Vec<usize> = dims.iter().map(|d| d * d).collect();
        let ext_strides = strides(&extents);
        let n = self.total_dim();
        let m = dims.len();

        // regroup ρ_{a,b} as a tensor over the per-subsystem pairs (a_s, b_s)
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        let mut ai = vec![0; m];
        let mut bi = vec![0; m];
        for a in 0..n {
            unravel(a, dims, &mut ai);
            for b in 0..n {
                unravel(b, dims, &mut bi);
                let flat: usize = (0..m).map(|s| (ai[s] * dims[s] + bi[s]) * ext_strides[s]).sum();
                data[flat] = self.matrix[(a, b)];
            }
        }

        let mut cur_extents = extents.clone();
        for (s, &d) in dims.iter().enumerate() {
            let basis = orthonormal_basis(d)?;
            let dd = d * d;
            // Tr(X ρ) = Σ_ab X_ba ρ_ab
            let mut mat = vec![Complex64::new(0.0, 0.0); dd * dd];
            for (i, x) in basis.elements().iter().enumerate() {
                for a in 0..d {
                    for b in 0..d {
                        mat[i * dd + a * d + b] = x[(b, a)];
                    }
                }
            }
            data = mode_product(&data, &cur_extents, s, &mat, dd);
            cur_extents[s] = dd;
        }

        let coeffs = data.iter().map(|z| z.re).collect();
        Ok(CoefficientTensor { dims: dims.clone(), coeffs })
    }

    /// `{x, y, T}` for the cut `A = 1..=cut`, `B = cut+1..=m`, from direct
    /// generator traces.
    pub fn bipartite_triple(&self, cut: usize) -> Result<BipartiteTriple> {
        let bip = self.regrouped(cut)?;
        let (da, db) = (bip.dims[0], bip.dims[1]);
        let ga = gellmann_generators(da)?;
        let gb = gellmann_generators(db)?;
        let rho_a = bip.partial_trace(&[1])?;
        let rho_b = bip.partial_trace(&[2])?;

        let x = DVector::from_iterator(
            ga.len(),
            ga.generators().iter().map(|l| 0.5 * da as f64 * trace_product(l, rho_a.matrix()).re),
        );
        let y = DVector::from_iterator(
            gb.len(),
            gb.generators().iter().map(|l| 0.5 * db as f64 * trace_product(l, rho_b.matrix()).re),
        );

        let mut t = DMatrix::zeros(ga.len(), gb.len());
        for (j, mu) in gb.generators().iter().enumerate() {
            // K_j = Tr_B[(I ⊗ μ_j) ρ]
            let mut k = CMatrix::zeros(da, da);
            for a in 0..da {
                for a2 in 0..da {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for b in 0..db {
                        for b2 in 0..db {
                            acc += mu[(b, b2)] * bip.matrix[(a * db + b2, a2 * db + b)];
                        }
                    }
                    k[(a, a2)] = acc;
                }
            }
            for (i, lam) in ga.generators().iter().enumerate() {
                t[(i, j)] = 0.25 * (da * db) as f64 * trace_product(lam, &k).re;
            }
        }
        Ok(BipartiteTriple { x, y, t })
    }
}

/// Real coefficients `C_{i_1…i_m} = Tr[(X_{i_1} ⊗ … ⊗ X_{i_m}) ρ]`, stored
/// row-major with extents `d_s²`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTensor {
    dims: Vec<usize>,
    coeffs: Vec<f64>,
}

impl CoefficientTensor {
    pub fn from_parts(dims: Vec<usize>, coeffs: Vec<f64>) -> Result<Self> {
        let len: usize = dims.iter().map(|d| d * d).product();
        if coeffs.len() != len {
            return Err(QcorrError::Shape(format!(
                "{} coefficients for dims {dims:?}, expected {len}",
                coeffs.len()
            )));
        }
        Ok(Self { dims, coeffs })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    pub fn extents(&self) -> Vec<usize> {
        self.dims.iter().map(|d| d * d).collect()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        let st = strides(&self.extents());
        self.coeffs[index.iter().zip(&st).map(|(i, s)| i * s).sum::<usize>()]
    }

    /// `Σ C X ⊗ … ⊗ X`. Hermitian with unit trace whenever `C_{0…0} = 1/√D`;
    /// positivity is not checked.
    pub fn reconstruct(&self) -> Result<DensityMatrix> {
        let dims = &self.dims;
        let m = dims.len();
        let mut data: Vec<Complex64> = self.coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect();
        let mut cur_extents = self.extents();
        for (s, &d) in dims.iter().enumerate() {
            let basis = orthonormal_basis(d)?;
            let dd = d * d;
            let mut mat = vec![Complex64::new(0.0, 0.0); dd * dd];
            for (i, x) in basis.elements().iter().enumerate() {
                for a in 0..d {
                    for b in 0..d {
                        mat[(a * d + b) * dd + i] = x[(a, b)];
                    }
                }
            }
            data = mode_product(&data, &cur_extents, s, &mat, dd);
            cur_extents[s] = dd;
        }

        let n: usize = dims.iter().product();
        let ext_strides = strides(&cur_extents);
        let mut out = CMatrix::zeros(n, n);
        let mut ai = vec![0; m];
        let mut bi = vec![0; m];
        for a in 0..n {
            unravel(a, dims, &mut ai);
            for b in 0..n {
                unravel(b, dims, &mut bi);
                let flat: usize = (0..m).map(|s| (ai[s] * dims[s] + bi[s]) * ext_strides[s]).sum();
                out[(a, b)] = data[flat];
            }
        }
        DensityMatrix::new_unchecked(dims.clone(), out)
    }

    /// Coefficients of `Tr_{A_s}` (1-based `s`) in the basis of the remaining
    /// subsystems: `√d_s · C_{…0_s…}`.
    pub fn trace_out(&self, s: usize) -> Result<CoefficientTensor> {
        let m = self.parties();
        if s == 0 || s > m {
            return Err(QcorrError::InvalidSubsystem { index: s, parties: m });
        }
        let axis = s - 1;
        let extents = self.extents();
        let scale = (self.dims[axis] as f64).sqrt();
        let mut sel = vec![0.0; extents[axis]];
        sel[0] = scale;
        let coeffs = mode_product(&self.coeffs, &extents, axis, &sel, 1);
        let mut dims = self.dims.clone();
        dims.remove(axis);
        Ok(CoefficientTensor { dims, coeffs })
    }

    /// `Tr(ρ²)` of the operator this tensor describes; the basis is
    /// orthonormal so it is the squared coefficient norm.
    pub fn purity(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// Purity of the state with subsystem `s` traced out.
    pub fn complement_purity(&self, s: usize) -> Result<f64> {
        Ok(self.trace_out(s)?.purity())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteTriple {
    pub x: DVector<f64>,
    pub y: DVector<f64>,
    pub t: DMatrix<f64>,
}

impl BipartiteTriple {
    /// The same triple from the coefficients of a two-party tensor.
    pub fn from_coefficients(c: &CoefficientTensor) -> Result<Self> {
        if c.parties() != 2 {
            return Err(QcorrError::Shape("triple needs a bipartite tensor".into()));
        }
        let (da, db) = (c.dims[0], c.dims[1]);
        let (na, nb) = (da * da, db * db);
        let (fa, fb) = (da as f64, db as f64);
        let at = |i: usize, j: usize| c.coeffs[i * nb + j];
        let x = DVector::from_fn(na - 1, |i, _| (fa * fa * fb / 2.0).sqrt() * at(i + 1, 0));
        let y = DVector::from_fn(nb - 1, |j, _| (fa * fb * fb / 2.0).sqrt() * at(0, j + 1));
        let t = DMatrix::from_fn(na - 1, nb - 1, |i, j| 0.5 * fa * fb * at(i + 1, j + 1));
        Ok(Self { x, y, t })
    }
}
