//! Rayleigh fading, power-law path loss and Poisson shot-noise interference.
//!
//! Rates and mutual information elsewhere in the crate are in bits, so every
//! capacity term is `log2(1 + snr)`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::exec;
use crate::point_process::Point;
use crate::rng::{StreamKey, Substream};
use crate::{Error, Result};

pub use num_complex::Complex64 as Complex;

/// Zero-mean, unit-variance circularly symmetric complex Gaussian.
pub fn sample_complex_gain<R: Rng + ?Sized>(rng: &mut R) -> Complex {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkBudget {
    /// Transmit power, W.
    pub rho0: f64,
    /// Noise power, W.
    pub n0: f64,
    pub alpha: f64,
}

impl LinkBudget {
    pub fn new(rho0: f64, n0: f64, alpha: f64) -> Result<Self> {
        if !(rho0 > 0.0 && rho0.is_finite()) {
            return Err(Error::invalid("rho0", format!("must be > 0, got {rho0}")));
        }
        if !(n0 > 0.0 && n0.is_finite()) {
            return Err(Error::invalid("n0", format!("must be > 0, got {n0}")));
        }
        if !(alpha > 2.0 && alpha.is_finite()) {
            return Err(Error::invalid("alpha", format!("path-loss exponent must exceed 2, got {alpha}")));
        }
        Ok(LinkBudget { rho0, n0, alpha })
    }

    /// Budget whose interference-free SINR ρ₀/N₀ equals `gamma_db`.
    pub fn for_snr_db(rho0: f64, gamma_db: f64, alpha: f64) -> Result<Self> {
        LinkBudget::new(rho0, rho0 / db_to_linear(gamma_db), alpha)
    }

    pub fn noise_limited_snr(&self) -> f64 {
        self.rho0 / self.n0
    }
}

/// `distance^(−alpha)`. Zero distance is a singularity and is rejected.
pub fn path_gain(distance: f64, alpha: f64) -> Result<f64> {
    if distance == 0.0 {
        return Err(Error::ZeroDistance);
    }
    if !(distance > 0.0) {
        return Err(Error::invalid("distance", format!("must be > 0, got {distance}")));
    }
    Ok(distance.powf(-alpha))
}

/// Σ ρ₀|h|²‖X−Y‖^(−α) over the interferers, in W.
pub fn aggregate_interference(
    interferers: &[Point],
    receiver: Point,
    gains: &[Complex],
    budget: &LinkBudget,
) -> Result<f64> {
    if interferers.len() != gains.len() {
        return Err(Error::invalid(
            "gains",
            format!("{} gains for {} interferers", gains.len(), interferers.len()),
        ));
    }
    let mut total = 0.0;
    for (x, h) in interferers.iter().zip(gains) {
        total += budget.rho0 * h.norm_sqr() * path_gain(x.distance(&receiver), budget.alpha)?;
    }
    Ok(total)
}

/// Fading-free SINR scale ρ₀/(I + N₀).
pub fn sinr(budget: &LinkBudget, interference: f64) -> f64 {
    budget.rho0 / (interference + budget.n0)
}

/// Block-fading gains between the two sources and each candidate relay for
/// one exchange. The same coefficient serves both link directions.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelSnapshot {
    pub h_a: Vec<Complex>,
    pub h_b: Vec<Complex>,
}

impl ChannelSnapshot {
    /// Draws `h_a[i]` then `h_b[i]` for each relay in order.
    pub fn sample<R: Rng + ?Sized>(relays: usize, rng: &mut R) -> Self {
        let mut h_a = Vec::with_capacity(relays);
        let mut h_b = Vec::with_capacity(relays);
        for _ in 0..relays {
            h_a.push(sample_complex_gain(rng));
            h_b.push(sample_complex_gain(rng));
        }
        ChannelSnapshot { h_a, h_b }
    }

    pub fn source_a_to_relay(&self, i: usize) -> Complex {
        self.h_a[i]
    }

    pub fn relay_to_source_a(&self, i: usize) -> Complex {
        self.h_a[i]
    }

    pub fn source_b_to_relay(&self, i: usize) -> Complex {
        self.h_b[i]
    }

    pub fn relay_to_source_b(&self, i: usize) -> Complex {
        self.h_b[i]
    }
}

/// How co-channel interference enters the SINR.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InterferenceModel {
    /// Noise-limited: γ = ρ₀/N₀ on every hop.
    Off,
    /// PPP of transmitters with intensity `lambda_t`, realised on a disc of
    /// `truncation_radius` m around each receiver.
    On { lambda_t: f64, truncation_radius: f64 },
}

impl InterferenceModel {
    pub fn validate(&self) -> Result<()> {
        if let InterferenceModel::On {
            lambda_t,
            truncation_radius,
        } = *self
        {
            if !(lambda_t >= 0.0 && lambda_t.is_finite()) {
                return Err(Error::invalid("lambda_t", "must be >= 0"));
            }
            if !(truncation_radius > 0.0 && truncation_radius.is_finite()) {
                return Err(Error::invalid("truncation_radius_m", "must be > 0"));
            }
        }
        Ok(())
    }
}

/// Shot-noise power at `receiver` from one fresh interferer field.
///
/// Equivalent in law to sampling a PPP on the disc and calling
/// [`aggregate_interference`], without materialising the points.
pub fn sample_shot_noise<R: Rng + ?Sized>(
    lambda_t: f64,
    truncation_radius: f64,
    budget: &LinkBudget,
    rng: &mut R,
) -> Result<f64> {
    let mean = lambda_t * PI * truncation_radius * truncation_radius;
    if mean == 0.0 {
        return Ok(0.0);
    }
    let count = Poisson::new(mean)
        .map_err(|e| Error::invalid("lambda_t", e.to_string()))?
        .sample(rng) as u64;
    let half_alpha = 0.5 * budget.alpha;
    let mut total = 0.0;
    for _ in 0..count {
        // r² uniform on (0, R²]; |h|² ~ Exp(1).
        let u = 1.0 - rng.random::<f64>();
        let r2 = u * truncation_radius * truncation_radius;
        let g = -(1.0 - rng.random::<f64>()).ln();
        total += g * r2.powf(-half_alpha);
    }
    Ok(budget.rho0 * total)
}

/// Per-hop SINR scales for one exchange. Hop names follow the direction of
/// transmission; relay-side hops are evaluated at the relay-region centre.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HopSinr {
    pub a_to_relay: f64,
    pub relay_to_b: f64,
    pub b_to_relay: f64,
    pub relay_to_a: f64,
}

impl HopSinr {
    pub fn uniform(gamma: f64) -> Self {
        HopSinr {
            a_to_relay: gamma,
            relay_to_b: gamma,
            b_to_relay: gamma,
            relay_to_a: gamma,
        }
    }
}

impl From<f64> for HopSinr {
    fn from(gamma: f64) -> Self {
        HopSinr::uniform(gamma)
    }
}

/// SINR of every hop for one exchange. With interference on, each hop sees
/// an independent interferer field; `shared` uses a single field draw for
/// the whole exchange instead.
pub fn sample_hop_sinr<R: Rng + ?Sized>(
    budget: &LinkBudget,
    model: &InterferenceModel,
    shared: bool,
    rng: &mut R,
) -> Result<HopSinr> {
    match *model {
        InterferenceModel::Off => Ok(HopSinr::uniform(budget.noise_limited_snr())),
        InterferenceModel::On {
            lambda_t,
            truncation_radius,
        } => {
            let mut draw = || sample_shot_noise(lambda_t, truncation_radius, budget, rng).map(|i| sinr(budget, i));
            if shared {
                Ok(HopSinr::uniform(draw()?))
            } else {
                Ok(HopSinr {
                    a_to_relay: draw()?,
                    relay_to_b: draw()?,
                    b_to_relay: draw()?,
                    relay_to_a: draw()?,
                })
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SinrEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
}

impl SinrEstimate {
    pub fn mean_db(&self) -> f64 {
        linear_to_db(self.mean)
    }
}

/// Sample mean of ρ₀/(I + N₀) over independent interferer fields.
pub fn mean_sinr(
    budget: &LinkBudget,
    model: &InterferenceModel,
    trials: u64,
    key: &StreamKey,
    threads: usize,
) -> Result<SinrEstimate> {
    if trials < 1000 {
        return Err(Error::invalid("sinr_trials", format!("need at least 1000, got {trials}")));
    }
    model.validate()?;
    let (lambda_t, radius) = match *model {
        InterferenceModel::Off => {
            return Ok(SinrEstimate {
                mean: budget.noise_limited_snr(),
                std_error: 0.0,
                trials,
            })
        }
        InterferenceModel::On {
            lambda_t,
            truncation_radius,
        } => (lambda_t, truncation_radius),
    };
    let blocks = exec::map_blocks(0..trials, threads, |range| -> Result<(f64, f64)> {
        let (mut s, mut ss) = (0.0, 0.0);
        for t in range {
            let mut rng = key.stream(Substream::MeanSinr, t);
            let g = sinr(budget, sample_shot_noise(lambda_t, radius, budget, &mut rng)?);
            s += g;
            ss += g * g;
        }
        Ok((s, ss))
    });
    let (mut s, mut ss) = (0.0, 0.0);
    for b in blocks {
        let (bs, bss) = b?;
        s += bs;
        ss += bss;
    }
    let n = trials as f64;
    let mean = s / n;
    let var = ((ss / n - mean * mean) * n / (n - 1.0)).max(0.0);
    Ok(SinrEstimate {
        mean,
        std_error: (var / n).sqrt(),
        trials,
    })
}
