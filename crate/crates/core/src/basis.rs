//! Generalized Gell-Mann generators and the orthonormal Hermitian operator
//! basis built from them.
//!
//! Generator order is fixed for every dimension: symmetric pair matrices
//! `E_jk + E_kj` for `j < k` in lexicographic order, then the antisymmetric
//! ones `-i E_jk + i E_kj` in the same order, then the `d - 1` diagonal
//! matrices with growing support. For `d = 2` this is `(σx, σy, σz)`.
//! Correlation-matrix rows and projector indices throughout the crate refer
//! to this order.

use nalgebra::DMatrix;

use crate::error::{QcorrError, Result};
use crate::Complex64;

pub const MAX_LOCAL_DIM: usize = 16;

pub type CMatrix = DMatrix<Complex64>;

fn check_dim(d: usize) -> Result<()> {
    if (2..=MAX_LOCAL_DIM).contains(&d) {
        Ok(())
    } else {
        Err(QcorrError::InvalidDimension(d))
    }
}

/// The `d² - 1` traceless Hermitian generators of SU(d), normalized to
/// `Tr(λ_i λ_j) = 2 δ_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet {
    dim: usize,
    generators: Vec<CMatrix>,
}

impl GeneratorSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }

    pub fn get(&self, i: usize) -> &CMatrix {
        &self.generators[i]
    }
}

pub fn gellmann_generators(d: usize) -> Result<GeneratorSet> {
    check_dim(d)?;
    let zero = Complex64::new(0.0, 0.0);
    let mut generators = Vec::with_capacity(d * d - 1);

    for j in 0..d {
        for k in j + 1..d {
            let mut m = CMatrix::from_element(d, d, zero);
            m[(j, k)] = Complex64::new(1.0, 0.0);
            m[(k, j)] = Complex64::new(1.0, 0.0);
            generators.push(m);
        }
    }
    for j in 0..d {
        for k in j + 1..d {
            let mut m = CMatrix::from_element(d, d, zero);
            m[(j, k)] = Complex64::new(0.0, -1.0);
            m[(k, j)] = Complex64::new(0.0, 1.0);
            generators.push(m);
        }
    }
    for l in 1..d {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut m = CMatrix::from_element(d, d, zero);
        for a in 0..l {
            m[(a, a)] = Complex64::new(norm, 0.0);
        }
        m[(l, l)] = Complex64::new(-(l as f64) * norm, 0.0);
        generators.push(m);
    }

    Ok(GeneratorSet { dim: d, generators })
}

/// `{I/√d, λ_1/√2, …, λ_{d²-1}/√2}`, orthonormal under `Tr(X_i X_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    dim: usize,
    elements: Vec<CMatrix>,
}

impl OrthonormalBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn get(&self, i: usize) -> &CMatrix {
        &self.elements[i]
    }

    /// Expansion coefficients `Tr(X_i H)`; real for Hermitian `H`.
    pub fn expand(&self, h: &CMatrix) -> Vec<Complex64> {
        self.elements.iter().map(|x| trace_product(x, h)).collect()
    }

    pub fn synthesize(&self, coeffs: &[Complex64]) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for (x, &c) in self.elements.iter().zip(coeffs) {
            out += x * c;
        }
        out
    }
}

pub fn orthonormal_basis(d: usize) -> Result<OrthonormalBasis> {
    let gens = gellmann_generators(d)?;
    let mut elements = Vec::with_capacity(d * d);
    let id_scale = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    elements.push(CMatrix::identity(d, d) * id_scale);
    let g_scale = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    for g in gens.generators {
        elements.push(g * g_scale);
    }
    Ok(OrthonormalBasis { dim: d, elements })
}

/// `Tr(A B)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}
