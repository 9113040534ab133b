use super::flat::{flatten, matvec, FlatChannel, FlatKind};
use super::EngineError;
use crate::machine::{tape, validate_spec, MachineSpec, Verdict, NSYM};
use crate::qkernel::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub verdict: Verdict,
    pub steps: u64,
    pub seed: u64,
    pub stream: u64,
    /// FNV-1a hash of the visited `(state, position)` sequence.
    pub digest: Option<String>,
}

/// Independent stream `t` of the generator seeded by `seed`.
pub fn trial_rng(seed: u64, t: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(t);
    rng
}

pub(crate) struct Sampler<'a> {
    spec: &'a MachineSpec,
    tape: Vec<u8>,
    chans: Vec<FlatChannel>,
}

impl<'a> Sampler<'a> {
    pub fn new(spec: &'a MachineSpec, input: &str) -> Result<Self, EngineError> {
        let rep = validate_spec(spec);
        if !rep.pass {
            let first = &rep.violations[0];
            return Err(EngineError::Invalid(format!(
                "{} at {} ({} violations)",
                first.rule,
                first.location,
                rep.violations.len()
            )));
        }
        Ok(Sampler {
            spec,
            tape: tape(input)?,
            chans: flatten(spec),
        })
    }

    pub fn sample(
        &self,
        rng: &mut impl Rng,
        max_steps: u64,
        digest: bool,
    ) -> (Verdict, u64, Option<u64>) {
        let spec = self.spec;
        let d = spec.register_dim;
        let mut psi = vec![C64::new(0.0, 0.0); d];
        psi[0] = C64::new(1.0, 0.0);
        let mut buf = vec![C64::new(0.0, 0.0); d];
        let mut best = vec![C64::new(0.0, 0.0); d];
        let (mut q, mut pos) = (spec.q0, 0usize);
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut steps = 0u64;
        loop {
            if let Some(v) = spec.is_halting(q) {
                return (v, steps, digest.then_some(h));
            }
            if steps >= max_steps {
                return (Verdict::Cutoff, steps, digest.then_some(h));
            }
            if digest {
                for x in [q as u64, pos as u64] {
                    h ^= x;
                    h = h.wrapping_mul(0x0100_0000_01b3);
                }
            }
            let sym = self.tape[pos];
            let e = spec.table[q as usize * NSYM + sym as usize]
                .as_ref()
                .expect("validated spec is total");
            let ch = &self.chans[e.channel];
            let branch = match ch.kind {
                FlatKind::Identity => 0,
                FlatKind::Unitary => {
                    matvec(&ch.ops[0], &psi, &mut buf);
                    std::mem::swap(&mut psi, &mut buf);
                    0
                }
                FlatKind::General => {
                    let u: f64 = rng.gen();
                    let mut acc = 0.0;
                    let mut chosen = None;
                    let mut fallback = (0, 0.0);
                    for (b, op) in ch.ops.iter().enumerate() {
                        matvec(op, &psi, &mut buf);
                        let p: f64 = buf.iter().map(|z| z.norm_sqr()).sum();
                        acc += p;
                        if p > 0.0 {
                            fallback = (b, p);
                            best.copy_from_slice(&buf);
                        }
                        if u < acc && p > 0.0 {
                            chosen = Some((b, p));
                            break;
                        }
                    }
                    let (b, p) = chosen.unwrap_or(fallback);
                    let s = p.sqrt();
                    for (dst, src) in psi.iter_mut().zip(&best) {
                        *dst = src / s;
                    }
                    b
                }
            };
            let (nq, mv) = e.next[branch];
            q = nq;
            pos = (pos as i64 + mv as i64) as usize;
            steps += 1;
        }
    }
}

pub fn run_trajectory(
    spec: &MachineSpec,
    input: &str,
    seed: u64,
    max_steps: u64,
) -> Result<RunReport, EngineError> {
    let s = Sampler::new(spec, input)?;
    let mut rng = trial_rng(seed, 0);
    let (verdict, steps, h) = s.sample(&mut rng, max_steps, true);
    Ok(RunReport {
        verdict,
        steps,
        seed,
        stream: 0,
        digest: h.map(|x| format!("{x:016x}")),
    })
}
