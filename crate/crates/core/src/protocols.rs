//! Mutual information of TDMH and NC exchanges and optimal relay selection.
//!
//! TDMH spends two slots per direction (pre-factor ½), NC spends three slots
//! for both directions (pre-factor ⅔). Functions here are pure: channel gains
//! and SINR scales come in as arguments.

use std::fmt;
use std::str::FromStr;

use crate::channel::{path_gain, Complex, HopSinr};
use crate::point_process::Point;
use crate::{Error, Result};

/// One candidate relay with its (reciprocal) channels to both sources.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelayLink {
    pub position: Point,
    pub h_a: Complex,
    pub h_b: Complex,
    pub r_a: f64,
    pub r_b: f64,
    loss_a: f64,
    loss_b: f64,
}

impl RelayLink {
    pub fn new(position: Point, h_a: Complex, h_b: Complex, source_a: Point, source_b: Point, alpha: f64) -> Result<Self> {
        let mut link = RelayLink::from_distances(h_a, h_b, position.distance(&source_a), position.distance(&source_b), alpha)?;
        link.position = position;
        Ok(link)
    }

    pub fn from_distances(h_a: Complex, h_b: Complex, r_a: f64, r_b: f64, alpha: f64) -> Result<Self> {
        Ok(RelayLink {
            position: Point::ORIGIN,
            h_a,
            h_b,
            r_a,
            r_b,
            loss_a: path_gain(r_a, alpha)?,
            loss_b: path_gain(r_b, alpha)?,
        })
    }

    pub fn g_a(&self) -> f64 {
        self.h_a.norm_sqr()
    }

    pub fn g_b(&self) -> f64 {
        self.h_b.norm_sqr()
    }

    /// |h_AD|²‖X_A−Y_D‖^(−α)
    pub fn effective_a(&self) -> f64 {
        self.g_a() * self.loss_a
    }

    /// |h_BD|²‖X_B−Y_D‖^(−α)
    pub fn effective_b(&self) -> f64 {
        self.g_b() * self.loss_b
    }

    /// Amplitude term h_AD‖X_A−Y_D‖^(−α/2) of a simultaneous broadcast.
    pub fn amplitude_a(&self) -> Complex {
        self.h_a * self.loss_a.sqrt()
    }

    pub fn amplitude_b(&self) -> Complex {
        self.h_b * self.loss_b.sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scenario {
    /// All relays collaborate (SIMO receive, MISO forward), four slots.
    TdmhCollab,
    /// Single relay chosen by the TDMH harmonic criterion.
    TdmhOptRelay,
    /// Collaborative receive, every relay broadcasts simultaneously.
    NcCollabAllBroadcast,
    /// Collaborative receive, the max-min relay broadcasts.
    NcCollabOptBroadcast,
    /// Single relay chosen by the weighted NC criterion receives and broadcasts.
    NcOptRelay,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::TdmhCollab,
        Scenario::TdmhOptRelay,
        Scenario::NcCollabAllBroadcast,
        Scenario::NcCollabOptBroadcast,
        Scenario::NcOptRelay,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::TdmhCollab => "tdmh_collab",
            Scenario::TdmhOptRelay => "tdmh_opt_relay",
            Scenario::NcCollabAllBroadcast => "nc_collab_all_broadcast",
            Scenario::NcCollabOptBroadcast => "nc_collab_opt_broadcast",
            Scenario::NcOptRelay => "nc_opt_relay",
        }
    }

    pub fn is_network_coding(self) -> bool {
        !matches!(self, Scenario::TdmhCollab | Scenario::TdmhOptRelay)
    }

    /// Forward/backward mutual information for this scenario.
    pub fn mutual_information(self, relays: &[RelayLink], sinr: impl Into<HopSinr>) -> Result<MutualInfoPair> {
        let sinr = sinr.into();
        match self {
            Scenario::TdmhCollab => mi_tdmh_collab(relays, sinr),
            Scenario::TdmhOptRelay => Ok(tdmh_single(select_relay_tdmh(relays)?, &sinr, self)),
            Scenario::NcCollabAllBroadcast => mi_nc_collab(relays, sinr, BroadcastMode::AllRelays),
            Scenario::NcCollabOptBroadcast => mi_nc_collab(relays, sinr, BroadcastMode::OptimalRelay),
            Scenario::NcOptRelay => Ok(nc_single(select_relay_nc(relays)?, &sinr, self)),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s.trim())
            .ok_or_else(|| Error::invalid("scenario", format!("unknown scenario `{s}`")))
    }
}

/// Time-normalised mutual information, bits. Pre-factors already applied.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MutualInfoPair {
    pub forward: f64,
    pub backward: f64,
    pub scenario: Scenario,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BroadcastMode {
    AllRelays,
    OptimalRelay,
}

fn capacity(snr: f64) -> f64 {
    snr.ln_1p() / std::f64::consts::LN_2
}

fn ensure_nonempty(relays: &[RelayLink]) -> Result<()> {
    if relays.is_empty() {
        Err(Error::EmptyRelaySet)
    } else {
        Ok(())
    }
}

/// Index of the first maximiser of `score`; ties go to the lowest index.
fn argmax_by<F: Fn(&RelayLink) -> f64>(relays: &[RelayLink], score: F) -> Result<usize> {
    ensure_nonempty(relays)?;
    let mut best = 0;
    let mut best_score = score(&relays[0]);
    for (i, r) in relays.iter().enumerate().skip(1) {
        let s = score(r);
        if s > best_score {
            best = i;
            best_score = s;
        }
    }
    Ok(best)
}

/// (r_a^α/g_a + r_b^α/g_b)^(−1)
pub fn tdmh_criterion(r: &RelayLink) -> f64 {
    1.0 / (1.0 / r.effective_a() + 1.0 / r.effective_b())
}

/// min{g_a r_a^(−α), g_b r_b^(−α)}
pub fn nc_broadcast_criterion(r: &RelayLink) -> f64 {
    r.effective_a().min(r.effective_b())
}

/// (2 r_b^α/g_b + r_a^α/g_a)^(−1)
pub fn nc_relay_criterion(r: &RelayLink) -> f64 {
    1.0 / (2.0 / r.effective_b() + 1.0 / r.effective_a())
}

pub fn select_relay_tdmh(relays: &[RelayLink]) -> Result<&RelayLink> {
    argmax_by(relays, tdmh_criterion).map(|i| &relays[i])
}

pub fn select_relay_nc_broadcast(relays: &[RelayLink]) -> Result<&RelayLink> {
    argmax_by(relays, nc_broadcast_criterion).map(|i| &relays[i])
}

pub fn select_relay_nc(relays: &[RelayLink]) -> Result<&RelayLink> {
    argmax_by(relays, nc_relay_criterion).map(|i| &relays[i])
}

/// SIMO receive capacities (I₁ from A, I₂ from B) of the collaborating set.
fn simo_capacities(relays: &[RelayLink], sinr: &HopSinr) -> (f64, f64) {
    let sum_a: f64 = relays.iter().map(RelayLink::effective_a).sum();
    let sum_b: f64 = relays.iter().map(RelayLink::effective_b).sum();
    (capacity(sinr.a_to_relay * sum_a), capacity(sinr.b_to_relay * sum_b))
}

/// Collaborative TDMH: each direction is ½min of the SIMO uplink and the
/// MISO downlink, which share the same channel sums by reciprocity.
pub fn mi_tdmh_collab(relays: &[RelayLink], sinr: impl Into<HopSinr>) -> Result<MutualInfoPair> {
    ensure_nonempty(relays)?;
    let sinr = sinr.into();
    let sum_a: f64 = relays.iter().map(RelayLink::effective_a).sum();
    let sum_b: f64 = relays.iter().map(RelayLink::effective_b).sum();
    let forward = 0.5 * capacity(sinr.a_to_relay * sum_a).min(capacity(sinr.relay_to_b * sum_b));
    let backward = 0.5 * capacity(sinr.b_to_relay * sum_b).min(capacity(sinr.relay_to_a * sum_a));
    Ok(MutualInfoPair {
        forward,
        backward,
        scenario: Scenario::TdmhCollab,
    })
}

fn tdmh_single(relay: &RelayLink, sinr: &HopSinr, scenario: Scenario) -> MutualInfoPair {
    let (ea, eb) = (relay.effective_a(), relay.effective_b());
    MutualInfoPair {
        forward: 0.5 * capacity(sinr.a_to_relay * ea).min(capacity(sinr.relay_to_b * eb)),
        backward: 0.5 * capacity(sinr.b_to_relay * eb).min(capacity(sinr.relay_to_a * ea)),
        scenario,
    }
}

/// TDMH over one relay: ½min of its two hop capacities.
pub fn mi_tdmh_single(relay: &RelayLink, sinr: impl Into<HopSinr>) -> MutualInfoPair {
    tdmh_single(relay, &sinr.into(), Scenario::TdmhOptRelay)
}

/// NC with collaborative reception.
///
/// Forward is ⅔min{I₁, Ĩ₁, Ĩ₂} and backward ⅔min{I₂, Ĩ₁, Ĩ₂}. With
/// `AllRelays` the broadcast terms use the magnitude of the non-coherent
/// complex sum Σ h·r^(−α/2); with `OptimalRelay` they use the max-min
/// broadcaster's own channel. The broadcaster belongs to the receive set, so
/// under a common SINR I₁ ≥ Ĩ₁ and I₂ ≥ Ĩ₂ and the optimal mode reduces to
/// ⅔min{Ĩ₁, Ĩ₂} in both directions.
pub fn mi_nc_collab(relays: &[RelayLink], sinr: impl Into<HopSinr>, mode: BroadcastMode) -> Result<MutualInfoPair> {
    ensure_nonempty(relays)?;
    let sinr = sinr.into();
    let (i1, i2) = simo_capacities(relays, &sinr);
    let (bc_a, bc_b, scenario) = match mode {
        BroadcastMode::AllRelays => {
            let sum_a: Complex = relays.iter().map(RelayLink::amplitude_a).sum();
            let sum_b: Complex = relays.iter().map(RelayLink::amplitude_b).sum();
            (sum_a.norm_sqr(), sum_b.norm_sqr(), Scenario::NcCollabAllBroadcast)
        }
        BroadcastMode::OptimalRelay => {
            let best = select_relay_nc_broadcast(relays)?;
            (best.effective_a(), best.effective_b(), Scenario::NcCollabOptBroadcast)
        }
    };
    let broadcast = capacity(sinr.relay_to_a * bc_a).min(capacity(sinr.relay_to_b * bc_b));
    Ok(MutualInfoPair {
        forward: 2.0 / 3.0 * i1.min(broadcast),
        backward: 2.0 / 3.0 * i2.min(broadcast),
        scenario,
    })
}

fn nc_single(relay: &RelayLink, sinr: &HopSinr, scenario: Scenario) -> MutualInfoPair {
    let (ea, eb) = (relay.effective_a(), relay.effective_b());
    let broadcast = capacity(sinr.relay_to_a * ea).min(capacity(sinr.relay_to_b * eb));
    MutualInfoPair {
        forward: 2.0 / 3.0 * capacity(sinr.a_to_relay * ea).min(broadcast),
        backward: 2.0 / 3.0 * capacity(sinr.b_to_relay * eb).min(broadcast),
        scenario,
    }
}

/// NC over one relay: ⅔min{Ĩ₁, Ĩ₂}. Uplink capacities are included so that
/// per-hop SINRs are honoured; under a common SINR they coincide with the
/// broadcast terms.
pub fn mi_nc_single(relay: &RelayLink, sinr: impl Into<HopSinr>) -> MutualInfoPair {
    nc_single(relay, &sinr.into(), Scenario::NcOptRelay)
}
