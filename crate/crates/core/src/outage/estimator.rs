use crate::channel::{sample_hop_sinr, ChannelSnapshot, HopSinr, InterferenceModel, LinkBudget};
use crate::exec;
use crate::point_process::{check_aloha_p, sample_relay_set, Point, Region};
use crate::protocols::{RelayLink, Scenario};
use crate::rng::{StreamKey, Substream};
use crate::{Error, Result};

use super::{outage_event, OutageEstimate, Quality, RatePoint};

/// Where the relays of one exchange come from.
#[derive(Clone, Debug, PartialEq)]
pub enum RelaySource {
    /// Idle nodes of a PPP of intensity `lambda` under ALOHA(`p`) inside
    /// `region`, conditioned on at least one such node.
    Poisson { lambda: f64, p: f64, region: Region },
    /// A deterministic relay set, identical in every trial.
    Fixed(Vec<Point>),
}

/// Geometry of one bidirectional exchange.
#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    pub source_a: Point,
    pub source_b: Point,
    pub relays: RelaySource,
}

impl Scene {
    /// Sources at (±separation/2, 0).
    pub fn symmetric(separation: f64, relays: RelaySource) -> Self {
        let h = 0.5 * separation;
        Scene {
            source_a: Point::new(-h, 0.0),
            source_b: Point::new(h, 0.0),
            relays,
        }
    }
}

/// Everything needed to run one trial except the scenario and the rates.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialModel {
    pub scene: Scene,
    pub budget: LinkBudget,
    pub interference: InterferenceModel,
    /// One interferer draw per exchange instead of one per hop.
    pub shared_gamma: bool,
    /// Cap on consecutive empty relay draws within one trial.
    pub max_resample: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct TrialOutcome {
    pub forward_fail: bool,
    pub backward_fail: bool,
    pub rejected: u64,
}

impl TrialModel {
    pub fn validate(&self) -> Result<()> {
        self.interference.validate()?;
        if self.max_resample == 0 {
            return Err(Error::invalid("max_resample", "must be >= 1"));
        }
        let (a, b) = (self.scene.source_a, self.scene.source_b);
        if a.distance(&b) == 0.0 {
            return Err(Error::invalid("source_separation_m", "sources coincide"));
        }
        match &self.scene.relays {
            RelaySource::Poisson { lambda, p, region } => {
                if !(*lambda > 0.0 && lambda.is_finite()) {
                    return Err(Error::invalid("lambda", format!("must be > 0, got {lambda}")));
                }
                check_aloha_p(*p)?;
                region.validate()?;
                if region.distance_to(&a) == 0.0 || region.distance_to(&b) == 0.0 {
                    return Err(Error::invalid("relay_region", "must not contain a source"));
                }
            }
            RelaySource::Fixed(points) => {
                if points.is_empty() {
                    return Err(Error::EmptyRelaySet);
                }
                if points.iter().any(|q| q.distance(&a) == 0.0 || q.distance(&b) == 0.0) {
                    return Err(Error::ZeroDistance);
                }
            }
        }
        Ok(())
    }

    /// Relay links of trial `t`: positions from the geometry stream, fading
    /// from the fading stream. Also returns the number of empty draws.
    pub fn relay_links(&self, key: &StreamKey, t: u64) -> Result<(Vec<RelayLink>, u64)> {
        let (positions, rejected) = match &self.scene.relays {
            RelaySource::Poisson { lambda, p, region } => {
                let mut rng = key.stream(Substream::Geometry, t);
                sample_relay_set(*lambda, *p, region, self.max_resample, &mut rng)?
            }
            RelaySource::Fixed(points) => (points.clone(), 0),
        };
        let mut rng = key.stream(Substream::Fading, t);
        let snap = ChannelSnapshot::sample(positions.len(), &mut rng);
        let links = positions
            .iter()
            .enumerate()
            .map(|(i, &q)| {
                RelayLink::new(
                    q,
                    snap.source_a_to_relay(i),
                    snap.source_b_to_relay(i),
                    self.scene.source_a,
                    self.scene.source_b,
                    self.budget.alpha,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((links, rejected))
    }

    pub fn hop_sinr(&self, key: &StreamKey, t: u64) -> Result<HopSinr> {
        let mut rng = key.stream(Substream::Interference, t);
        sample_hop_sinr(&self.budget, &self.interference, self.shared_gamma, &mut rng)
    }

    pub fn simulate_trial(&self, key: &StreamKey, t: u64, scenario: Scenario, rates: &RatePoint) -> Result<TrialOutcome> {
        let (links, rejected) = self.relay_links(key, t)?;
        let hops = self.hop_sinr(key, t)?;
        let mi = scenario.mutual_information(&links, hops)?;
        let ev = outage_event(&mi, rates);
        Ok(TrialOutcome {
            forward_fail: ev.forward_fail,
            backward_fail: ev.backward_fail,
            rejected,
        })
    }
}

/// Trial budget. Trials start at `initial` and double until `min_events`
/// outages are seen or `max` trials have been run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialPolicy {
    pub initial: u64,
    pub max: u64,
    pub min_events: u64,
    /// Requested relative 95% half-width; `None` disables the check.
    pub precision_target: Option<f64>,
}

impl Default for TrialPolicy {
    fn default() -> Self {
        TrialPolicy {
            initial: 100_000,
            max: 100_000_000,
            min_events: 50,
            precision_target: None,
        }
    }
}

impl TrialPolicy {
    /// Exactly `n` trials, no escalation.
    pub fn fixed(n: u64) -> Self {
        TrialPolicy {
            initial: n,
            max: n,
            ..TrialPolicy::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.initial < 1000 {
            return Err(Error::invalid("trials", format!("need at least 1000, got {}", self.initial)));
        }
        if self.max < self.initial {
            return Err(Error::invalid("max_trials", "must be >= initial trials"));
        }
        if let Some(t) = self.precision_target {
            if !(t > 0.0) {
                return Err(Error::invalid("precision_target", "must be > 0"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Default)]
struct Counts {
    any: u64,
    fwd: u64,
    bwd: u64,
    rejected: u64,
}

impl Counts {
    fn add(&mut self, o: Counts) {
        self.any += o.any;
        self.fwd += o.fwd;
        self.bwd += o.bwd;
        self.rejected += o.rejected;
    }
}

/// Monte Carlo estimate of the bidirectional outage probability.
///
/// Trial `t` always uses the same random streams, so estimates at different
/// SNR points or for different scenarios share geometry and fading.
pub fn estimate_outage(
    model: &TrialModel,
    scenario: Scenario,
    rates: &RatePoint,
    gamma_bar_db: f64,
    policy: &TrialPolicy,
    key: &StreamKey,
    threads: usize,
) -> Result<OutageEstimate> {
    model.validate()?;
    policy.validate()?;
    let run = |range: std::ops::Range<u64>| -> Result<Counts> {
        let parts = exec::map_blocks(range, threads, |block| -> Result<Counts> {
            let mut c = Counts::default();
            for t in block {
                let o = model.simulate_trial(key, t, scenario, rates)?;
                c.any += (o.forward_fail || o.backward_fail) as u64;
                c.fwd += o.forward_fail as u64;
                c.bwd += o.backward_fail as u64;
                c.rejected += o.rejected;
            }
            Ok(c)
        });
        let mut total = Counts::default();
        for p in parts {
            total.add(p?);
        }
        Ok(total)
    };

    let mut done = 0;
    let mut target = policy.initial;
    let mut counts = Counts::default();
    loop {
        counts.add(run(done..target)?);
        done = target;
        if counts.any >= policy.min_events || done >= policy.max {
            break;
        }
        target = done.saturating_mul(2).min(policy.max);
    }

    let mut est = OutageEstimate::from_counts(gamma_bar_db, done, counts.any, counts.fwd, counts.bwd, counts.rejected);
    est.quality = if counts.any < policy.min_events {
        Quality::LowConfidence
    } else if policy
        .precision_target
        .is_some_and(|t| 0.5 * (est.ci_high - est.ci_low) > t * est.eps_hat)
    {
        Quality::Imprecise
    } else {
        Quality::Ok
    };
    Ok(est)
}
