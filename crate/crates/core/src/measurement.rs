//! Finite-shot click statistics.
//!
//! Every probe is fired `shots` times; each shot clicks independently with
//! the forward-model probability. Probe `k` draws from its own ChaCha stream
//! `k` under the campaign seed, so results do not depend on thread count or
//! on how many other probes a design contains.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::ProbabilityBreakdown;
use crate::geometry::CurvaturePoint;
use crate::tomography::{solve, ExperimentDesign, RecoveryResult};

/// Random stream for probe `index` of a campaign seeded with `seed`.
pub fn probe_stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A Binomial(n, p) draw.
pub fn sample_clicks<R: Rng + ?Sized>(p: f64, n: u64, rng: &mut R) -> Result<u64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("click probability {p} outside [0, 1]")));
    }
    let dist = Binomial::new(n, p).map_err(|e| Error::Domain(e.to_string()))?;
    Ok(dist.sample(rng))
}

/// `(p̂, σ)` with `p̂ = clicks/shots` and `σ = √(p̂(1 − p̂)/n)`, floored at
/// `√0.5 / n`.
pub fn estimate(clicks: u64, shots: u64) -> Result<(f64, f64)> {
    if shots == 0 {
        return Err(Error::InvalidInput("at least one shot is required".into()));
    }
    if clicks > shots {
        return Err(Error::InvalidInput(format!("{clicks} clicks exceed {shots} shots")));
    }
    let n = shots as f64;
    let p = clicks as f64 / n;
    let sigma = (p * (1.0 - p) / n).sqrt().max(0.5f64.sqrt() / n);
    Ok((p, sigma))
}

/// Shots per probe needed for the curvature correction to stand `z`
/// standard deviations above the flat-space probability.
pub fn shots_for_detection(b: &ProbabilityBreakdown, z: f64) -> f64 {
    let delta = b.p - b.p0;
    if delta == 0.0 {
        return f64::INFINITY;
    }
    z * z * b.p * (1.0 - b.p) / (delta * delta)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Campaign {
    pub design: ExperimentDesign,
    pub truth: CurvaturePoint,
    pub shots_per_probe: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeOutcome {
    pub id: String,
    pub p_truth: f64,
    pub clicks: u64,
    pub p_hat: f64,
    pub sigma: f64,
    pub shots_for_5_sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub shots_per_probe: u64,
    pub seed: u64,
    pub probes: Vec<ProbeOutcome>,
    pub recovery: RecoveryResult,
}

impl CampaignResult {
    pub fn measurements(&self) -> Vec<(f64, f64)> {
        self.probes.iter().map(|p| (p.p_hat, p.sigma)).collect()
    }
}

pub fn run_campaign(c: &Campaign) -> Result<CampaignResult> {
    if c.shots_per_probe == 0 {
        return Err(Error::InvalidInput("shots_per_probe must be at least 1".into()));
    }
    let forward = c.design.forward(&c.truth)?;
    let probes: Vec<ProbeOutcome> = forward
        .par_iter()
        .zip(c.design.probes.par_iter())
        .enumerate()
        .map(|(k, (b, probe))| {
            let mut rng = probe_stream(c.seed, k as u64);
            let clicks = sample_clicks(b.p, c.shots_per_probe, &mut rng)?;
            let (p_hat, sigma) = estimate(clicks, c.shots_per_probe)?;
            Ok(ProbeOutcome {
                id: probe.id.clone(),
                p_truth: b.p,
                clicks,
                p_hat,
                sigma,
                shots_for_5_sigma: shots_for_detection(b, 5.0),
            })
        })
        .collect::<Result<_>>()?;
    let measurements: Vec<(f64, f64)> = probes.iter().map(|p| (p.p_hat, p.sigma)).collect();
    let recovery = solve(&c.design, &measurements, &c.design.p0s()?)?;
    Ok(CampaignResult { shots_per_probe: c.shots_per_probe, seed: c.seed, probes, recovery })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn boundary_probabilities() {
        let mut rng = probe_stream(1, 0);
        assert_eq!(sample_clicks(0.0, 1000, &mut rng).unwrap(), 0);
        assert_eq!(sample_clicks(1.0, 1000, &mut rng).unwrap(), 1000);
        assert!(sample_clicks(1.5, 10, &mut rng).is_err());
    }

    #[test]
    fn estimates() {
        let (p, s) = estimate(50, 100).unwrap();
        assert_eq!(p, 0.5);
        assert_relative_eq!(s, 0.05, max_relative = 1e-15);
        let (p, s) = estimate(0, 100).unwrap();
        assert_eq!(p, 0.0);
        assert_relative_eq!(s, 0.5f64.sqrt() / 100.0, max_relative = 1e-15);
        assert!(estimate(1, 0).is_err());
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = sample_clicks(0.25, 1_000_000, &mut probe_stream(7, 3)).unwrap();
        let b = sample_clicks(0.25, 1_000_000, &mut probe_stream(7, 3)).unwrap();
        let c = sample_clicks(0.25, 1_000_000, &mut probe_stream(7, 4)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn mean_over_streams() {
        let n = 1_000_000u64;
        let total: u64 = (0..100).map(|k| sample_clicks(0.25, n, &mut probe_stream(11, k)).unwrap()).sum();
        let mean = total as f64 / 100.0;
        // standard error of the mean of 100 draws
        let se = (n as f64 * 0.25 * 0.75 / 100.0).sqrt();
        assert!((mean - 250_000.0).abs() < 4.0 * se);
    }
}
