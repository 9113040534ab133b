//! Small dense complex linear algebra: states, outcome-labelled channels and
//! dilation of contractions.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub use nalgebra::Complex;
pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Completeness tolerance for channels.
pub const CHANNEL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QkError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("channel is not complete (residual {0:.3e})")]
    Incomplete(f64),
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("spectral norm {norm:.6} of M/c exceeds 1; use a larger constant than {c}")]
    Contraction { norm: f64, c: f64 },
    #[error("zero state cannot be normalized")]
    ZeroState,
    #[error("channel has no branches")]
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    pub amplitudes: CVec,
}

impl QuantumState {
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = CVec::zeros(dim);
        v[k] = C64::new(1.0, 0.0);
        QuantumState { amplitudes: v }
    }

    pub fn from_real(v: &[f64]) -> Result<Self, QkError> {
        let amps = CVec::from_iterator(v.len(), v.iter().map(|&x| C64::new(x, 0.0)));
        QuantumState { amplitudes: amps }.normalized()
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    pub fn normalized(self) -> Result<Self, QkError> {
        let n = self.amplitudes.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(QkError::ZeroState);
        }
        Ok(QuantumState {
            amplitudes: self.amplitudes.unscale(n),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub label: String,
    #[serde(with = "matrix_serde")]
    pub op: CMat,
}

/// A selective quantum operation: one operator per outcome label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumChannel {
    pub dim: usize,
    pub branches: Vec<Branch>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelReport {
    pub residual: f64,
    pub branch_norms: Vec<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub label: String,
    pub probability: f64,
    pub post: Option<QuantumState>,
}

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn spectral_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

impl QuantumChannel {
    pub fn new(dim: usize, branches: Vec<(String, CMat)>) -> Self {
        QuantumChannel {
            dim,
            branches: branches
                .into_iter()
                .map(|(label, op)| Branch { label, op })
                .collect(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(dim, vec![("id".into(), CMat::identity(dim, dim))])
    }

    pub fn unitary(label: &str, u: CMat) -> Self {
        Self::new(u.nrows(), vec![(label.into(), u)])
    }

    /// Rotation by `theta` in the plane of the first two basis vectors.
    pub fn rotation(dim: usize, theta: f64) -> Self {
        let mut u = CMat::identity(dim, dim);
        let (s, co) = theta.sin_cos();
        u[(0, 0)] = c(co);
        u[(0, 1)] = c(-s);
        u[(1, 0)] = c(s);
        u[(1, 1)] = c(co);
        Self::unitary("rot", u)
    }

    /// Measurement in the computational basis; outcome labels are the indices.
    pub fn basis_measurement(dim: usize) -> Self {
        Self::new(
            dim,
            (0..dim)
                .map(|k| {
                    let mut p = CMat::zeros(dim, dim);
                    p[(k, k)] = c(1.0);
                    (k.to_string(), p)
                })
                .collect(),
        )
    }

    /// Resets the register to the first basis vector.
    pub fn reset(dim: usize) -> Self {
        Self::new(
            dim,
            (0..dim)
                .map(|k| {
                    let mut p = CMat::zeros(dim, dim);
                    p[(0, k)] = c(1.0);
                    (format!("r{k}"), p)
                })
                .collect(),
        )
    }

    /// A fair coin that also resets the register; labels `h*` and `t*`.
    pub fn coin(dim: usize) -> Self {
        let amp = std::f64::consts::FRAC_1_SQRT_2;
        let mut branches = Vec::with_capacity(2 * dim);
        for side in ["h", "t"] {
            for k in 0..dim {
                let mut p = CMat::zeros(dim, dim);
                p[(0, k)] = c(amp);
                branches.push((format!("{side}{k}"), p));
            }
        }
        Self::new(dim, branches)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.branches.iter().map(|b| b.label.as_str())
    }

    pub fn is_identity(&self) -> bool {
        self.branches.len() == 1
            && (&self.branches[0].op - CMat::identity(self.dim, self.dim)).norm() == 0.0
    }
}

pub fn check_channel(ch: &QuantumChannel) -> ChannelReport {
    let d = ch.dim;
    let mut sum = CMat::zeros(d, d);
    let mut norms = Vec::with_capacity(ch.branches.len());
    let mut finite = !ch.branches.is_empty();
    for b in &ch.branches {
        if b.op.nrows() != d || b.op.ncols() != d {
            finite = false;
            norms.push(f64::NAN);
            continue;
        }
        finite &= b.op.iter().all(|z| z.re.is_finite() && z.im.is_finite());
        sum += b.op.adjoint() * &b.op;
        norms.push(spectral_norm(&b.op));
    }
    let residual = if finite {
        spectral_norm(&(sum - CMat::identity(d, d)))
    } else {
        f64::INFINITY
    };
    ChannelReport {
        residual,
        branch_norms: norms,
        pass: finite && residual < CHANNEL_TOL,
    }
}

pub fn apply_channel(ch: &QuantumChannel, psi: &QuantumState) -> Result<Vec<Outcome>, QkError> {
    if psi.dim() != ch.dim {
        return Err(QkError::DimensionMismatch {
            expected: ch.dim,
            found: psi.dim(),
        });
    }
    let report = check_channel(ch);
    if !report.pass {
        return Err(QkError::Incomplete(report.residual));
    }
    Ok(ch
        .branches
        .iter()
        .map(|b| {
            let v = &b.op * &psi.amplitudes;
            let p = v.norm_squared();
            let post = QuantumState { amplitudes: v }.normalized().ok();
            Outcome {
                label: b.label.clone(),
                probability: p,
                post,
            }
        })
        .collect())
}

/// Principal square root of a Hermitian positive semidefinite matrix.
pub fn psd_sqrt(h: &CMat) -> CMat {
    let eig = h.clone().symmetric_eigen();
    let d = eig.eigenvalues.map(|l| c(l.max(0.0).sqrt()));
    &eig.eigenvectors * CMat::from_diagonal(&d) * eig.eigenvectors.adjoint()
}

/// Two-branch channel with `go = M/c` and `restart = sqrt(I - go^dagger go)`.
pub fn dilate_contraction(m: &DMatrix<f64>, scale: f64) -> Result<QuantumChannel, QkError> {
    if m.nrows() != m.ncols() {
        return Err(QkError::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    if !m.iter().all(|x| x.is_finite()) || !(scale > 0.0) {
        return Err(QkError::NonFinite);
    }
    let d = m.nrows();
    let go: CMat = m.map(|x| c(x / scale));
    let norm = spectral_norm(&go);
    if norm > 1.0 + CHANNEL_TOL {
        return Err(QkError::Contraction { norm, c: scale });
    }
    let restart = psd_sqrt(&(CMat::identity(d, d) - go.adjoint() * &go));
    let ch = QuantumChannel::new(d, vec![("go".into(), go), ("restart".into(), restart)]);
    let report = check_channel(&ch);
    if !report.pass {
        return Err(QkError::Incomplete(report.residual));
    }
    Ok(ch)
}

/// Writes `op = u psi^dagger` with `|u| = 1` when `op` has rank at most one.
pub fn rank_one(op: &CMat, tol: f64) -> Option<(CVec, CVec)> {
    let (mut best, mut best_norm) = (0, 0.0);
    for k in 0..op.ncols() {
        let n = op.column(k).norm_squared();
        if n > best_norm {
            best = k;
            best_norm = n;
        }
    }
    if best_norm == 0.0 {
        return Some((CVec::zeros(op.nrows()), CVec::zeros(op.ncols())));
    }
    let u: CVec = op.column(best).unscale(best_norm.sqrt());
    let psi: CVec = op.adjoint() * &u;
    let rebuilt = &u * psi.adjoint();
    ((op - rebuilt).norm() <= tol * (1.0 + op.norm())).then_some((u, psi))
}

mod matrix_serde {
    use super::{CMat, C64};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &CMat, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
            .map(|r| {
                (0..m.ncols())
                    .map(|k| [m[(r, k)].re, m[(r, k)].im])
                    .collect()
            })
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMat, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(d)?;
        let n = rows.len();
        let k = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != k) {
            return Err(serde::de::Error::custom("ragged matrix"));
        }
        Ok(CMat::from_fn(n, k, |r, col| {
            C64::new(rows[r][col][0], rows[r][col][1])
        }))
    }
}
