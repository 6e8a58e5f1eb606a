use rand::Rng;

use crate::exec;
use crate::point_process::{sample_ppp, Point, Region};
use crate::rng::{StreamKey, Substream};
use crate::{Error, Result};

/// Source of the point field whose shot noise is tested.
#[derive(Clone, Debug, PartialEq)]
pub enum LemmaField {
    /// PPP of intensity `lambda_z` on `region`, conditioned non-empty.
    Poisson { lambda_z: f64, region: Region },
    /// Deterministic points, fading is still random.
    Fixed(Vec<Point>),
}

impl LemmaField {
    /// Expected number of points, λ_z·ν_z (the point count when fixed).
    pub fn mean_count(&self) -> f64 {
        match self {
            LemmaField::Poisson { lambda_z, region } => lambda_z * region.measure(),
            LemmaField::Fixed(p) => p.len() as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma1Params {
    pub field: LemmaField,
    pub alpha: f64,
    /// θ∞ < 0; the threshold at ω is ω^θ∞.
    pub theta_exponent: f64,
    pub omega_grid: Vec<f64>,
    pub trials: u64,
    /// Allowed excess of the exponent over the bound at the largest ω.
    pub tolerance: f64,
    pub max_resample: u64,
}

impl Lemma1Params {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta_exponent < 0.0) {
            return Err(Error::invalid("theta_exponent", "must be < 0"));
        }
        if !(self.alpha > 0.0) {
            return Err(Error::invalid("alpha", "must be > 0"));
        }
        if self.omega_grid.is_empty() || self.omega_grid.iter().any(|&w| !(w > 1.0 && w.is_finite())) {
            return Err(Error::invalid("omega_grid", "needs at least one value, all > 1"));
        }
        if self.trials < 1000 {
            return Err(Error::invalid("trials", "need at least 1000"));
        }
        if self.max_resample == 0 {
            return Err(Error::invalid("max_resample", "must be >= 1"));
        }
        match &self.field {
            LemmaField::Poisson { lambda_z, region } => {
                if !(*lambda_z > 0.0 && lambda_z.is_finite()) {
                    return Err(Error::invalid("lambda_z", "must be > 0"));
                }
                region.validate()?;
                if region.distance_to(&Point::ORIGIN) == 0.0 {
                    return Err(Error::invalid("region", "must keep away from the origin"));
                }
            }
            LemmaField::Fixed(points) => {
                if points.is_empty() {
                    return Err(Error::EmptyRelaySet);
                }
                if points.iter().any(|p| p.distance(&Point::ORIGIN) == 0.0) {
                    return Err(Error::ZeroDistance);
                }
            }
        }
        Ok(())
    }

    pub fn bound(&self) -> f64 {
        self.field.mean_count() * self.theta_exponent
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lemma1Row {
    pub omega: f64,
    pub theta: f64,
    pub successes: u64,
    pub p_hat: f64,
    /// ln P / ln ω. With zero successes this is the upper bound obtained
    /// from the one-sided 95% limit 3/n.
    pub exponent_hat: f64,
    pub bound: f64,
    pub upper_bound_only: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lemma1Report {
    pub rows: Vec<Lemma1Row>,
    pub trials: u64,
    pub rejected_empty: u64,
    /// Exponent at the largest ω is at most bound + tolerance.
    pub passes: bool,
}

/// Monte Carlo estimate of P[Σ g_k |Z_k|^−α < ω^θ∞] for every ω in the grid.
pub fn lemma1_check(params: &Lemma1Params, key: &StreamKey, threads: usize) -> Result<Lemma1Report> {
    params.validate()?;
    let thresholds: Vec<f64> = params.omega_grid.iter().map(|w| w.powf(params.theta_exponent)).collect();
    let k = thresholds.len();
    let blocks = exec::map_blocks(0..params.trials, threads, |range| -> Result<(Vec<u64>, u64)> {
        let mut hits = vec![0u64; k];
        let mut rejected = 0;
        for t in range {
            let mut rng = key.stream(Substream::Lemma, t);
            let (s, r) = shot_noise(params, &mut rng)?;
            rejected += r;
            for (h, th) in hits.iter_mut().zip(&thresholds) {
                *h += (s < *th) as u64;
            }
        }
        Ok((hits, rejected))
    });
    let mut hits = vec![0u64; k];
    let mut rejected_empty = 0;
    for b in blocks {
        let (h, r) = b?;
        for (a, x) in hits.iter_mut().zip(h) {
            *a += x;
        }
        rejected_empty += r;
    }

    let n = params.trials as f64;
    let bound = params.bound();
    let rows: Vec<Lemma1Row> = params
        .omega_grid
        .iter()
        .zip(&thresholds)
        .zip(&hits)
        .map(|((&omega, &theta), &successes)| {
            let p_hat = successes as f64 / n;
            let upper_bound_only = successes == 0;
            let p_used = if upper_bound_only { 3.0 / n } else { p_hat };
            Lemma1Row {
                omega,
                theta,
                successes,
                p_hat,
                exponent_hat: p_used.ln() / omega.ln(),
                bound,
                upper_bound_only,
            }
        })
        .collect();
    let top = rows
        .iter()
        .max_by(|a, b| a.omega.total_cmp(&b.omega))
        .expect("grid is non-empty");
    let passes = top.exponent_hat <= bound + params.tolerance;
    Ok(Lemma1Report {
        rows,
        trials: params.trials,
        rejected_empty,
        passes,
    })
}

fn shot_noise<R: Rng + ?Sized>(params: &Lemma1Params, rng: &mut R) -> Result<(f64, u64)> {
    let sum = |pts: &[Point], rng: &mut R| -> f64 {
        pts.iter()
            .map(|p| {
                let g = -(1.0 - rng.random::<f64>()).ln();
                g * p.distance(&Point::ORIGIN).powf(-params.alpha)
            })
            .sum()
    };
    match &params.field {
        LemmaField::Fixed(pts) => Ok((sum(pts, rng), 0)),
        LemmaField::Poisson { lambda_z, region } => {
            let mut rejected = 0;
            while rejected < params.max_resample {
                let pts = sample_ppp(*lambda_z, region, rng)?;
                if !pts.is_empty() {
                    return Ok((sum(&pts, rng), rejected));
                }
                rejected += 1;
            }
            Err(Error::RelayResampleLimit {
                attempts: params.max_resample,
            })
        }
    }
}
