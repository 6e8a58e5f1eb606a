//! Bidirectional outage: event definition, Monte Carlo estimation, diversity
//! slope fitting and the shot-noise lower-tail check.

mod estimator;
mod lemma;
mod slope;

pub use estimator::{estimate_outage, RelaySource, Scene, TrialModel, TrialOutcome, TrialPolicy};
pub use lemma::{lemma1_check, LemmaField, Lemma1Params, Lemma1Report, Lemma1Row};
pub use slope::{fit_diversity_slope, SlopeFit, DEFAULT_SLOPE_WINDOW};

use std::fmt;

use crate::protocols::MutualInfoPair;
use crate::{Error, Result};

/// Target rates and time split for one operating point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatePoint {
    pub tau_f: f64,
    pub tau_b: f64,
    /// Forward end-to-end rate, bits.
    pub r_ab: f64,
    /// Backward end-to-end rate, bits.
    pub r_ba: f64,
}

impl RatePoint {
    /// Rates scaling with the mean SINR: R_AB = m/(1+μ)·log₂γ̄, R_BA = μ·R_AB.
    pub fn from_multiplexing(m: f64, mu: f64, tau_f: f64, gamma_bar: f64) -> Result<Self> {
        if !(m >= 0.0 && m.is_finite()) {
            return Err(Error::invalid("m", format!("must be >= 0, got {m}")));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::invalid("mu", format!("must be > 0, got {mu}")));
        }
        if !(gamma_bar > 0.0) {
            return Err(Error::invalid("gamma_bar", format!("must be > 0, got {gamma_bar}")));
        }
        let r_ab = m / (1.0 + mu) * gamma_bar.log2();
        RatePoint::fixed(tau_f, r_ab.max(0.0), (mu * r_ab).max(0.0))
    }

    pub fn fixed(tau_f: f64, r_ab: f64, r_ba: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&tau_f) {
            return Err(Error::invalid("tau_f", format!("must lie in [0, 1], got {tau_f}")));
        }
        if !(r_ab >= 0.0 && r_ba >= 0.0) {
            return Err(Error::invalid("rate", "rates must be >= 0"));
        }
        Ok(RatePoint {
            tau_f,
            tau_b: 1.0 - tau_f,
            r_ab,
            r_ba,
        })
    }

    /// Traffic ratio R_BA/R_AB (NaN for zero forward rate).
    pub fn mu(&self) -> f64 {
        self.r_ba / self.r_ab
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct OutageEvent {
    pub forward_fail: bool,
    pub backward_fail: bool,
}

impl OutageEvent {
    pub fn any(&self) -> bool {
        self.forward_fail || self.backward_fail
    }
}

/// Forward fails iff τ_f·I_f < R_AB; backward iff τ_b·I_b < R_BA.
pub fn outage_event(mi: &MutualInfoPair, rates: &RatePoint) -> OutageEvent {
    OutageEvent {
        forward_fail: rates.tau_f * mi.forward < rates.r_ab,
        backward_fail: rates.tau_b * mi.backward < rates.r_ba,
    }
}

/// 1.96: two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `n`.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    ((center - half).max(0.0).min(p), (center + half).min(1.0).max(p))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quality {
    Ok,
    /// Fewer outage events than the policy minimum.
    LowConfidence,
    /// Relative CI half-width above the requested precision target.
    Imprecise,
}

impl Quality {
    pub fn as_str(self) -> &'static str {
        match self {
            Quality::Ok => "ok",
            Quality::LowConfidence => "low_confidence",
            Quality::Imprecise => "imprecise",
        }
    }
}

impl fmt::Display for Quality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OutageEstimate {
    pub gamma_bar_db: f64,
    pub eps_hat: f64,
    pub eps_f_hat: f64,
    pub eps_b_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: u64,
    pub outages: u64,
    pub forward_outages: u64,
    pub backward_outages: u64,
    pub rejected_empty: u64,
    pub quality: Quality,
}

impl OutageEstimate {
    pub fn from_counts(gamma_bar_db: f64, trials: u64, any: u64, fwd: u64, bwd: u64, rejected_empty: u64) -> Self {
        debug_assert!(any <= fwd + bwd && any >= fwd.max(bwd));
        let n = trials as f64;
        let (ci_low, ci_high) = wilson_interval(any, trials, Z95);
        OutageEstimate {
            gamma_bar_db,
            eps_hat: any as f64 / n,
            eps_f_hat: fwd as f64 / n,
            eps_b_hat: bwd as f64 / n,
            ci_low,
            ci_high,
            trials,
            outages: any,
            forward_outages: fwd,
            backward_outages: bwd,
            rejected_empty,
            quality: Quality::Ok,
        }
    }

    /// Wilson half-width divided by the normal quantile: a one-sigma width.
    pub fn wilson_sigma(&self) -> f64 {
        (self.ci_high - self.ci_low) / (2.0 * Z95)
    }
}
