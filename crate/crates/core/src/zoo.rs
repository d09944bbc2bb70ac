//! Named state families and seeded random states.
//!
//! Random numbers come from a SplitMix64 stream (`rand_xoshiro::SplitMix64`)
//! turned into standard normals by `rand_distr::StandardNormal`; a complex
//! Gaussian entry draws its real part, then its imaginary part. Matrices are
//! filled row by row. This is frozen so seeded states are reproducible.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use rand_xoshiro::rand_core::SeedableRng;
use rand_xoshiro::SplitMix64;

use crate::basis::{gellmann_generators, CMatrix};
use crate::error::{QcorrError, Result};
use crate::state::DensityMatrix;
use crate::Complex64;

const DOMAIN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Werner { m: usize, x: f64 },
    BellDiagonal { t: [f64; 3] },
    BdProductMixture { lambda: f64, t: [f64; 3], r: [f64; 3] },
    Ghz { n: usize },
    W { n: usize },
    WernerGhz { lambda: f64 },
    WGhz { lambda: f64 },
    ClassicalDiagonal { dims: Vec<usize>, probs: Vec<f64> },
    RandomMixed { dims: Vec<usize>, rank: usize, seed: u64 },
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn domain(msg: String) -> QcorrError {
    QcorrError::ParameterDomain(msg)
}

fn check_unit(name: &str, v: f64, lo: f64, hi: f64) -> Result<()> {
    if v.is_finite() && v >= lo - DOMAIN_TOL && v <= hi + DOMAIN_TOL {
        Ok(())
    } else {
        Err(domain(format!("{name}={v} outside [{lo}, {hi}]")))
    }
}

/// The four Bell-diagonal positivity conditions.
pub fn in_tetrahedron(t: [f64; 3]) -> bool {
    let [a, b, c] = t;
    [1.0 - a - b - c, 1.0 - a + b + c, 1.0 + a - b + c, 1.0 + a + b - c]
        .iter()
        .all(|&v| v >= -DOMAIN_TOL)
}

fn check_tetrahedron(t: [f64; 3]) -> Result<()> {
    if t.iter().all(|v| v.is_finite()) && in_tetrahedron(t) {
        Ok(())
    } else {
        Err(domain(format!("t={t:?} outside the Bell-diagonal tetrahedron")))
    }
}

fn check_qubits(n: usize, min: usize) -> Result<()> {
    if (min..=12).contains(&n) {
        Ok(())
    } else {
        Err(domain(format!("qubit count {n} outside {min}..=12")))
    }
}

fn swap(m: usize) -> CMatrix {
    let mut f = CMatrix::zeros(m * m, m * m);
    for a in 0..m {
        for b in 0..m {
            f[(b * m + a, a * m + b)] = c(1.0);
        }
    }
    f
}

fn paulis() -> [CMatrix; 3] {
    let g = gellmann_generators(2).expect("qubit generators");
    [g.get(0).clone(), g.get(1).clone(), g.get(2).clone()]
}

fn bell_diagonal_matrix(t: [f64; 3]) -> CMatrix {
    let s = paulis();
    let mut m = CMatrix::identity(4, 4);
    for i in 0..3 {
        m += s[i].kronecker(&s[i]) * c(t[i]);
    }
    m * c(0.25)
}

fn ghz_amplitudes(n: usize) -> Vec<Complex64> {
    let mut v = vec![c(0.0); 1 << n];
    v[0] = c(std::f64::consts::FRAC_1_SQRT_2);
    v[(1 << n) - 1] = c(std::f64::consts::FRAC_1_SQRT_2);
    v
}

/// Uniform superposition of single excitations, qubit 1 most significant.
fn w_amplitudes(n: usize) -> Vec<Complex64> {
    let mut v = vec![c(0.0); 1 << n];
    let a = 1.0 / (n as f64).sqrt();
    for k in 0..n {
        v[1 << k] = c(a);
    }
    v
}

fn projector(v: &[Complex64]) -> CMatrix {
    let col = CMatrix::from_column_slice(v.len(), 1, v);
    &col * col.adjoint()
}

pub fn build(spec: &StateSpec) -> Result<DensityMatrix> {
    match spec {
        StateSpec::Werner { m, x } => {
            if *m < 2 || *m > 16 {
                return Err(domain(format!("werner dimension m={m} outside 2..=16")));
            }
            check_unit("x", *x, -1.0, 1.0)?;
            let mf = *m as f64;
            let norm = mf * mf * mf - mf;
            let id = CMatrix::identity(m * m, m * m) * c((mf - x) / norm);
            DensityMatrix::new(vec![*m, *m], id + swap(*m) * c((mf * x - 1.0) / norm))
        }
        StateSpec::BellDiagonal { t } => {
            check_tetrahedron(*t)?;
            DensityMatrix::new(vec![2, 2], bell_diagonal_matrix(*t))
        }
        StateSpec::BdProductMixture { lambda, t, r } => {
            check_unit("lambda", *lambda, 0.0, 1.0)?;
            check_tetrahedron(*t)?;
            let rn = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !rn.is_finite() || rn > 1.0 + DOMAIN_TOL {
                return Err(domain(format!("|r|={rn} exceeds 1")));
            }
            let s = paulis();
            let mut rb = CMatrix::identity(2, 2);
            for i in 0..3 {
                rb += &s[i] * c(r[i]);
            }
            let prod = (CMatrix::identity(2, 2) * c(0.5)).kronecker(&(rb * c(0.5)));
            let m = bell_diagonal_matrix(*t) * c(*lambda) + prod * c(1.0 - lambda);
            DensityMatrix::new(vec![2, 2], m)
        }
        StateSpec::Ghz { n } => {
            check_qubits(*n, 2)?;
            DensityMatrix::from_pure(vec![2; *n], &ghz_amplitudes(*n))
        }
        StateSpec::W { n } => {
            check_qubits(*n, 2)?;
            DensityMatrix::from_pure(vec![2; *n], &w_amplitudes(*n))
        }
        StateSpec::WernerGhz { lambda } => {
            check_unit("lambda", *lambda, 0.0, 1.0)?;
            let m = CMatrix::identity(8, 8) * c((1.0 - lambda) / 8.0) + projector(&ghz_amplitudes(3)) * c(*lambda);
            DensityMatrix::new(vec![2, 2, 2], m)
        }
        StateSpec::WGhz { lambda } => {
            check_unit("lambda", *lambda, 0.0, 1.0)?;
            let m = projector(&w_amplitudes(3)) * c(*lambda) + projector(&ghz_amplitudes(3)) * c(1.0 - lambda);
            DensityMatrix::new(vec![2, 2, 2], m)
        }
        StateSpec::ClassicalDiagonal { dims, probs } => {
            let total: usize = dims.iter().product();
            if probs.len() != total {
                return Err(domain(format!("{} probabilities for total dimension {total}", probs.len())));
            }
            if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return Err(domain("probabilities must be non-negative".into()));
            }
            let sum: f64 = probs.iter().sum();
            if (sum - 1.0).abs() > DOMAIN_TOL {
                return Err(domain(format!("probabilities sum to {sum}")));
            }
            let diag = nalgebra::DVector::from_iterator(total, probs.iter().map(|&p| c(p)));
            DensityMatrix::new(dims.clone(), CMatrix::from_diagonal(&diag))
        }
        StateSpec::RandomMixed { dims, rank, seed } => random_mixed(dims, *rank, *seed),
    }
}

fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

fn ginibre<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let mut g = CMatrix::zeros(rows, cols);
    for r in 0..rows {
        for k in 0..cols {
            g[(r, k)] = complex_gaussian(rng);
        }
    }
    g
}

/// `GG†/Tr(GG†)` with `G` a `D × rank` complex Gaussian matrix.
pub fn random_mixed(dims: &[usize], rank: usize, seed: u64) -> Result<DensityMatrix> {
    for &d in dims {
        if !(2..=crate::basis::MAX_LOCAL_DIM).contains(&d) {
            return Err(QcorrError::InvalidDimension(d));
        }
    }
    if dims.is_empty() {
        return Err(QcorrError::Shape("no subsystems".into()));
    }
    let total: usize = dims.iter().product();
    if rank == 0 || rank > total {
        return Err(QcorrError::RankOutOfRange { rank, max: total });
    }
    let mut rng = SplitMix64::seed_from_u64(seed);
    let g = ginibre(total, rank, &mut rng);
    let mut m = &g * g.adjoint();
    let tr = m.trace().re;
    m /= c(tr);
    let m = (&m + m.adjoint()) * c(0.5);
    DensityMatrix::new(dims.to_vec(), m)
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix with
/// the phases of `R`'s diagonal absorbed into `Q`.
pub fn random_unitary<R: Rng>(d: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(d, d, rng).qr();
    let (mut q, r) = qr.unpack();
    for k in 0..d {
        let rk = r[(k, k)];
        let phase = if rk.norm() > 0.0 { rk / rk.norm() } else { c(1.0) };
        for i in 0..d {
            q[(i, k)] *= phase;
        }
    }
    q
}

/// `U_1 ⊗ … ⊗ U_m` with independent Haar-random factors.
pub fn random_local_unitary(dims: &[usize], seed: u64) -> CMatrix {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let mut u = CMatrix::identity(1, 1);
    for &d in dims {
        u = u.kronecker(&random_unitary(d, &mut rng));
    }
    u
}

/// Random probability vector of length `n` (normalized squared Gaussians).
pub fn random_probabilities(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let raw: Vec<f64> = (0..n)
        .map(|_| {
            let g: f64 = rng.sample(StandardNormal);
            g * g
        })
        .collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / s).collect()
}

/// `D_s` (entropic) and `D_GG` (geometric) discord of the Werner-GHZ
/// family, for comparison plots.
pub fn werner_ghz_reference_curves(lambda: f64) -> (f64, f64) {
    fn xlog2x(v: f64) -> f64 {
        if v <= 0.0 {
            0.0
        } else {
            v * v.log2()
        }
    }
    let ds = -0.25 * xlog2x(1.0 + 3.0 * lambda) + 0.125 * xlog2x(1.0 - lambda) + 0.125 * xlog2x(1.0 + 7.0 * lambda);
    (ds, lambda * lambda / 2.0)
}

/// Real Gaussian matrix, used to seed orthogonal frames.
pub fn gaussian_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

fn parse_dims(s: &str) -> Result<Vec<usize>> {
    s.split('x')
        .map(|p| p.trim().parse::<usize>().map_err(|_| QcorrError::Parse(format!("bad dims '{s}'"))))
        .collect()
}

fn join_dims(d: &[usize]) -> String {
    d.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("x")
}

struct Params<'a> {
    family: &'a str,
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Params<'a> {
    fn raw(&self, key: &str) -> Result<&'a str> {
        self.pairs
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| QcorrError::Parse(format!("{} needs parameter '{key}'", self.family)))
    }

    fn num<T: FromStr>(&self, key: &str) -> Result<T> {
        let v = self.raw(key)?;
        v.parse()
            .map_err(|_| QcorrError::Parse(format!("{}: cannot parse {key}='{v}'", self.family)))
    }

    fn num_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        if self.pairs.iter().any(|(k, _)| *k == key) {
            self.num(key)
        } else {
            Ok(default)
        }
    }

    fn only(&self, allowed: &[&str]) -> Result<()> {
        for (k, _) in &self.pairs {
            if !allowed.contains(k) {
                return Err(QcorrError::Parse(format!("{}: unknown parameter '{k}'", self.family)));
            }
        }
        Ok(())
    }
}

/// `family:key=value,…`, e.g. `werner:m=3,x=0.2`,
/// `bd_product_mixture:lambda=0.5,t1=0.1,t2=0.1,t3=0.1,r2=0.3`,
/// `classical_diagonal:dims=2x2,probs=0.1/0.2/0.3/0.4`,
/// `random_mixed:dims=2x3,rank=2,seed=7`.
impl FromStr for StateSpec {
    type Err = QcorrError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (family, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut pairs = Vec::new();
        for item in rest.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| QcorrError::Parse(format!("expected key=value, got '{item}'")))?;
            pairs.push((k.trim(), v.trim()));
        }
        let p = Params { family, pairs };
        let spec = match family {
            "werner" => {
                p.only(&["m", "x"])?;
                StateSpec::Werner { m: p.num("m")?, x: p.num("x")? }
            }
            "bell_diagonal" => {
                p.only(&["t1", "t2", "t3"])?;
                StateSpec::BellDiagonal { t: [p.num("t1")?, p.num("t2")?, p.num("t3")?] }
            }
            "bd_product_mixture" => {
                p.only(&["lambda", "t1", "t2", "t3", "r1", "r2", "r3"])?;
                StateSpec::BdProductMixture {
                    lambda: p.num("lambda")?,
                    t: [p.num("t1")?, p.num("t2")?, p.num("t3")?],
                    r: [p.num_or("r1", 0.0)?, p.num_or("r2", 0.0)?, p.num_or("r3", 0.0)?],
                }
            }
            "ghz" => {
                p.only(&["n"])?;
                StateSpec::Ghz { n: p.num_or("n", 3)? }
            }
            "w" => {
                p.only(&["n"])?;
                StateSpec::W { n: p.num_or("n", 3)? }
            }
            "werner_ghz" => {
                p.only(&["lambda"])?;
                StateSpec::WernerGhz { lambda: p.num("lambda")? }
            }
            "w_ghz" => {
                p.only(&["lambda"])?;
                StateSpec::WGhz { lambda: p.num("lambda")? }
            }
            "classical_diagonal" => {
                p.only(&["dims", "probs"])?;
                let probs = p
                    .raw("probs")?
                    .split('/')
                    .map(|v| v.trim().parse::<f64>().map_err(|_| QcorrError::Parse(format!("bad probability '{v}'"))))
                    .collect::<Result<Vec<_>>>()?;
                StateSpec::ClassicalDiagonal { dims: parse_dims(p.raw("dims")?)?, probs }
            }
            "random_mixed" => {
                p.only(&["dims", "rank", "seed"])?;
                StateSpec::RandomMixed {
                    dims: parse_dims(p.raw("dims")?)?,
                    rank: p.num("rank")?,
                    seed: p.num_or("seed", 0)?,
                }
            }
            other => return Err(QcorrError::Parse(format!("unknown state family '{other}'"))),
        };
        Ok(spec)
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::Werner { m, x } => write!(f, "werner:m={m},x={x}"),
            StateSpec::BellDiagonal { t } => write!(f, "bell_diagonal:t1={},t2={},t3={}", t[0], t[1], t[2]),
            StateSpec::BdProductMixture { lambda, t, r } => write!(
                f,
                "bd_product_mixture:lambda={lambda},t1={},t2={},t3={},r1={},r2={},r3={}",
                t[0], t[1], t[2], r[0], r[1], r[2]
            ),
            StateSpec::Ghz { n } => write!(f, "ghz:n={n}"),
            StateSpec::W { n } => write!(f, "w:n={n}"),
            StateSpec::WernerGhz { lambda } => write!(f, "werner_ghz:lambda={lambda}"),
            StateSpec::WGhz { lambda } => write!(f, "w_ghz:lambda={lambda}"),
            StateSpec::ClassicalDiagonal { dims, probs } => {
                let p: Vec<String> = probs.iter().map(|v| v.to_string()).collect();
                write!(f, "classical_diagonal:dims={},probs={}", join_dims(dims), p.join("/"))
            }
            StateSpec::RandomMixed { dims, rank, seed } => {
                write!(f, "random_mixed:dims={},rank={rank},seed={seed}", join_dims(dims))
            }
        }
    }
}
