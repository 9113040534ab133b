use super::trajectory::{trial_rng, Sampler};
use super::EngineError;
use crate::machine::{MachineSpec, Verdict};
use crate::par::{map_indexed, Parallelism};
use serde::{Deserialize, Serialize};

pub const REPORT_FORMAT: &str = "qsreport-1";
pub const Z95: f64 = 1.959_963_984_540_054;
pub const Z99: f64 = 2.575_829_303_548_901;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct VerdictCounts {
    pub accept: u64,
    pub reject: u64,
    pub cutoff: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub format: String,
    pub trials: u64,
    pub verdict_counts: VerdictCounts,
    pub p_hat: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub mean_steps: f64,
    pub median_steps: f64,
    pub cutoffs: u64,
    pub seed: u64,
}

/// Wilson score interval for `k` successes out of `n`.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

impl EstimateReport {
    pub fn from_runs(runs: &[(Verdict, u64)], seed: u64) -> Self {
        let mut counts = VerdictCounts::default();
        for (v, _) in runs {
            match v {
                Verdict::Accept => counts.accept += 1,
                Verdict::Reject => counts.reject += 1,
                Verdict::Cutoff => counts.cutoff += 1,
            }
        }
        let n = runs.len() as u64;
        let (lo, hi) = wilson_interval(counts.accept, n, Z95);
        let mut steps: Vec<u64> = runs.iter().map(|r| r.1).collect();
        steps.sort_unstable();
        let mean = steps.iter().map(|&s| s as f64).sum::<f64>() / n.max(1) as f64;
        let median = match steps.len() {
            0 => 0.0,
            k if k % 2 == 1 => steps[k / 2] as f64,
            k => (steps[k / 2 - 1] as f64 + steps[k / 2] as f64) / 2.0,
        };
        EstimateReport {
            format: REPORT_FORMAT.into(),
            trials: n,
            verdict_counts: counts,
            p_hat: counts.accept as f64 / n.max(1) as f64,
            wilson_lo: lo,
            wilson_hi: hi,
            mean_steps: mean,
            median_steps: median,
            cutoffs: counts.cutoff,
            seed,
        }
    }

    pub fn interval(&self, z: f64) -> (f64, f64) {
        wilson_interval(self.verdict_counts.accept, self.trials, z)
    }
}

/// Runs `trials` independent trajectories; trial `t` uses stream `t` of `seed`.
pub fn estimate(
    spec: &MachineSpec,
    input: &str,
    trials: u64,
    seed: u64,
    max_steps: u64,
    mode: Parallelism,
) -> Result<EstimateReport, EngineError> {
    let sampler = Sampler::new(spec, input)?;
    let runs = map_indexed(trials as usize, mode, |t| {
        let mut rng = trial_rng(seed, t as u64);
        let (v, s, _) = sampler.sample(&mut rng, max_steps, false);
        (v, s)
    });
    Ok(EstimateReport::from_runs(&runs, seed))
}
