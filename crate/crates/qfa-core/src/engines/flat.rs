use crate::machine::MachineSpec;
use crate::qkernel::{rank_one, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum FlatKind {
    Identity,
    Unitary,
    General,
}

/// Row-major operators for the inner loops.
#[derive(Debug, Clone)]
pub(crate) struct FlatChannel {
    pub kind: FlatKind,
    pub ops: Vec<Vec<C64>>,
    /// `op = u psi^dagger` per branch when every branch has rank at most one.
    pub rank1: Option<Vec<(Vec<C64>, Vec<C64>)>>,
}

pub(crate) fn flatten(spec: &MachineSpec) -> Vec<FlatChannel> {
    spec.channels
        .iter()
        .map(|nc| {
            let ch = &nc.channel;
            let d = ch.dim;
            let ops: Vec<Vec<C64>> = ch
                .branches
                .iter()
                .map(|b| (0..d * d).map(|k| b.op[(k / d, k % d)]).collect())
                .collect();
            let kind = if ch.is_identity() {
                FlatKind::Identity
            } else if ch.branches.len() == 1 {
                FlatKind::Unitary
            } else {
                FlatKind::General
            };
            let rank1 = ch
                .branches
                .iter()
                .map(|b| {
                    rank_one(&b.op, 1e-12)
                        .map(|(u, p)| (u.iter().cloned().collect(), p.iter().cloned().collect()))
                })
                .collect::<Option<Vec<_>>>();
            FlatChannel { kind, ops, rank1 }
        })
        .collect()
}

#[inline]
pub(crate) fn matvec(op: &[C64], psi: &[C64], out: &mut [C64]) {
    let d = psi.len();
    for r in 0..d {
        let row = &op[r * d..(r + 1) * d];
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..d {
            acc += row[k] * psi[k];
        }
        out[r] = acc;
    }
}

/// `op rho op^dagger` for row-major `d x d` matrices.
pub(crate) fn sandwich(op: &[C64], rho: &[C64], d: usize, tmp: &mut [C64], out: &mut [C64]) {
    for r in 0..d {
        for k in 0..d {
            let mut acc = C64::new(0.0, 0.0);
            for l in 0..d {
                acc += op[r * d + l] * rho[l * d + k];
            }
            tmp[r * d + k] = acc;
        }
    }
    for r in 0..d {
        for k in 0..d {
            let mut acc = C64::new(0.0, 0.0);
            for l in 0..d {
                acc += tmp[r * d + l] * op[k * d + l].conj();
            }
            out[r * d + k] = acc;
        }
    }
}

/// `<psi| rho |psi>`.
pub(crate) fn expectation(psi: &[C64], rho: &[C64]) -> f64 {
    let d = psi.len();
    let mut acc = C64::new(0.0, 0.0);
    for r in 0..d {
        for k in 0..d {
            acc += psi[r].conj() * rho[r * d + k] * psi[k];
        }
    }
    acc.re.max(0.0)
}

pub(crate) fn trace(rho: &[C64], d: usize) -> f64 {
    (0..d).map(|k| rho[k * d + k].re).sum()
}
