//! Flat experiment configuration.
//!
//! One `section.key = value` pair per line, `#` starts a comment. Every key
//! has a default, so a file only needs the keys it changes. Unknown and
//! repeated keys are errors. [`SimConfig::to_text`] writes every key in a
//! canonical form that parses back to an identical config.
//!
//! ```text
//! network.lambda = 0.1
//! geometry.relay_region = disc:0,0,5
//! traffic.tau_nc = hops:0.01,0.49
//! experiment.sinr_grid_db = 20,30,40
//! ```

use std::fmt::Write as _;
use std::path::Path;

use crate::channel::{db_to_linear, dbm_to_watts, InterferenceModel, LinkBudget};
use crate::dmt::{time_allocation_nc, time_allocation_tdmh};
use crate::outage::{LemmaField, Lemma1Params, RelaySource, Scene, TrialModel, TrialPolicy};
use crate::point_process::{check_aloha_p, Point, Region};
use crate::protocols::Scenario;
use crate::{Error, Result};

/// Time split, given directly or derived from per-hop slot times.
#[derive(Clone, Debug, PartialEq)]
pub enum TauSpec {
    Explicit(f64),
    Hops(Vec<f64>),
}

impl TauSpec {
    /// TDMH forward share. Hops are `t_ad,t_db` (backward mirrored) or
    /// `t_ad,t_db,t_bd,t_da`.
    pub fn tdmh(&self) -> Result<f64> {
        match self {
            TauSpec::Explicit(t) => Ok(*t),
            TauSpec::Hops(h) => match h[..] {
                [ad, db] => Ok(time_allocation_tdmh((ad, db), (db, ad))?.0),
                [ad, db, bd, da] => Ok(time_allocation_tdmh((ad, db), (bd, da))?.0),
                _ => Err(Error::invalid("traffic.tau_tdmh", "hops takes 2 or 4 values")),
            },
        }
    }

    /// NC forward share from `t_ad,t_db`.
    pub fn nc(&self) -> Result<f64> {
        match self {
            TauSpec::Explicit(t) => Ok(*t),
            TauSpec::Hops(h) => match h[..] {
                [ad, db] => Ok(time_allocation_nc(ad, db)?.0),
                _ => Err(Error::invalid("traffic.tau_nc", "hops takes 2 values")),
            },
        }
    }

    fn parse(s: &str) -> std::result::Result<Self, String> {
        if let Some(v) = s.strip_prefix("explicit:") {
            Ok(TauSpec::Explicit(parse_f64(v)?))
        } else if let Some(v) = s.strip_prefix("hops:") {
            Ok(TauSpec::Hops(parse_list(v)?))
        } else {
            // A bare number is shorthand for explicit.
            parse_f64(s).map(TauSpec::Explicit).map_err(|_| format!("expected explicit:<tau> or hops:<t,..>, got '{s}'"))
        }
    }

    fn render(&self) -> String {
        match self {
            TauSpec::Explicit(t) => format!("explicit:{t:?}"),
            TauSpec::Hops(h) => format!("hops:{}", render_list(h)),
        }
    }
}

/// Relay location: a region of the node process or fixed points.
#[derive(Clone, Debug, PartialEq)]
pub enum RelaySpec {
    Region(Region),
    Fixed(Vec<Point>),
}

impl RelaySpec {
    fn parse(s: &str) -> std::result::Result<Self, String> {
        match s.strip_prefix("fixed:") {
            Some(body) => {
                let pts = body
                    .split(';')
                    .map(|p| {
                        let v = parse_list(p)?;
                        match v[..] {
                            [x, y] => Ok(Point::new(x, y)),
                            _ => Err(format!("fixed point needs x,y, got '{p}'")),
                        }
                    })
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                Ok(RelaySpec::Fixed(pts))
            }
            None => parse_region(s).map(RelaySpec::Region),
        }
    }

    fn render(&self) -> String {
        match self {
            RelaySpec::Region(r) => render_region(r),
            RelaySpec::Fixed(p) => {
                let parts: Vec<String> = p.iter().map(|q| format!("{:?},{:?}", q.x, q.y)).collect();
                format!("fixed:{}", parts.join(";"))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    // network
    pub lambda: f64,
    pub p: f64,
    // channel
    pub alpha: f64,
    pub rho0_dbm: f64,
    pub interference: bool,
    /// Interferer intensity; `None` means λ·p.
    pub lambda_t: Option<f64>,
    pub truncation_radius_m: f64,
    pub shared_gamma: bool,
    /// Trials used to measure γ̄ when interference is on.
    pub sinr_trials: u64,
    // geometry
    pub source_separation_m: f64,
    pub relay: RelaySpec,
    // traffic
    pub mu: f64,
    pub m: f64,
    pub tau_tdmh: TauSpec,
    pub tau_nc: TauSpec,
    // experiment
    pub scenarios: Vec<Scenario>,
    pub sinr_grid_db: Vec<f64>,
    pub trials: u64,
    pub max_trials: u64,
    pub min_events: u64,
    pub precision_target: Option<f64>,
    pub seed: u64,
    pub max_resample: u64,
    pub slope_window: usize,
    // dmt
    /// λ_r·ν_r; `None` derives it from the network and relay region.
    pub l_eff: Option<f64>,
    pub dmt_points: usize,
    // lemma1
    pub lemma_mean_count: f64,
    pub lemma_region: Region,
    pub lemma_alpha: f64,
    pub lemma_theta_exponent: f64,
    pub lemma_omega_grid: Vec<f64>,
    pub lemma_trials: u64,
    pub lemma_tolerance: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            lambda: 0.1,
            p: 0.25,
            alpha: 3.5,
            rho0_dbm: 18.0,
            interference: false,
            lambda_t: None,
            truncation_radius_m: 200.0,
            shared_gamma: false,
            sinr_trials: 20_000,
            source_separation_m: 60.0,
            relay: RelaySpec::Region(Region::Disc {
                center: Point::ORIGIN,
                radius: 5.0,
            }),
            mu: 1.0,
            m: 0.25,
            tau_tdmh: TauSpec::Explicit(0.5),
            tau_nc: TauSpec::Explicit(0.5),
            scenarios: Scenario::ALL.to_vec(),
            sinr_grid_db: vec![20.0, 30.0, 40.0],
            trials: 100_000,
            max_trials: 100_000_000,
            min_events: 50,
            precision_target: None,
            seed: 1,
            max_resample: 1_000_000,
            slope_window: crate::outage::DEFAULT_SLOPE_WINDOW,
            l_eff: None,
            dmt_points: 101,
            lemma_mean_count: 2.0,
            lemma_region: Region::Annulus {
                center: Point::ORIGIN,
                r_in: 0.1,
                r_out: 1.0,
            },
            lemma_alpha: 3.5,
            lemma_theta_exponent: -0.5,
            lemma_omega_grid: vec![1e1, 1e2, 1e3, 1e4, 1e5, 1e6],
            lemma_trials: 4_000_000,
            lemma_tolerance: 0.3,
        }
    }
}

/// All keys in canonical order.
pub const KEYS: &[&str] = &[
    "network.lambda",
    "network.p",
    "channel.alpha",
    "channel.rho0_dbm",
    "channel.interference",
    "channel.lambda_t",
    "channel.truncation_radius_m",
    "channel.shared_gamma",
    "channel.sinr_trials",
    "geometry.source_separation_m",
    "geometry.relay_region",
    "traffic.mu",
    "traffic.m",
    "traffic.tau_tdmh",
    "traffic.tau_nc",
    "experiment.scenarios",
    "experiment.sinr_grid_db",
    "experiment.trials",
    "experiment.max_trials",
    "experiment.min_events",
    "experiment.precision_target",
    "experiment.seed",
    "experiment.max_resample",
    "experiment.slope_window",
    "dmt.l_eff",
    "dmt.points",
    "lemma1.mean_count",
    "lemma1.region",
    "lemma1.alpha",
    "lemma1.theta_exponent",
    "lemma1.omega_grid",
    "lemma1.trials",
    "lemma1.tolerance",
];

impl SimConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Parses a config, starting from the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = SimConfig::default();
        let mut seen = std::collections::HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| Error::Config {
                line,
                message: format!("expected 'key = value', got '{body}'"),
            })?;
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(Error::Config {
                    line,
                    message: format!("duplicate key '{key}'"),
                });
            }
            cfg.set(key, value.trim()).map_err(|message| Error::Config { line, message })?;
        }
        Ok(cfg)
    }

    /// Applies a `key=value` override (as given to `--set`).
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment.split_once('=').ok_or_else(|| Error::Config {
            line: 0,
            message: format!("override must be key=value, got '{assignment}'"),
        })?;
        self.set(k.trim(), v.trim()).map_err(|message| Error::Config { line: 0, message })
    }

    fn set(&mut self, key: &str, v: &str) -> std::result::Result<(), String> {
        match key {
            "network.lambda" => self.lambda = parse_f64(v)?,
            "network.p" => self.p = parse_f64(v)?,
            "channel.alpha" => self.alpha = parse_f64(v)?,
            "channel.rho0_dbm" => self.rho0_dbm = parse_f64(v)?,
            "channel.interference" => {
                self.interference = match v {
                    "on" => true,
                    "off" => false,
                    _ => return Err(format!("channel.interference must be on or off, got '{v}'")),
                }
            }
            "channel.lambda_t" => self.lambda_t = parse_auto(v, parse_f64)?,
            "channel.truncation_radius_m" => self.truncation_radius_m = parse_f64(v)?,
            "channel.shared_gamma" => self.shared_gamma = parse_bool(v)?,
            "channel.sinr_trials" => self.sinr_trials = parse_u64(v)?,
            "geometry.source_separation_m" => self.source_separation_m = parse_f64(v)?,
            "geometry.relay_region" => self.relay = RelaySpec::parse(v)?,
            "traffic.mu" => self.mu = parse_f64(v)?,
            "traffic.m" => self.m = parse_f64(v)?,
            "traffic.tau_tdmh" => self.tau_tdmh = TauSpec::parse(v)?,
            "traffic.tau_nc" => self.tau_nc = TauSpec::parse(v)?,
            "experiment.scenarios" => self.scenarios = parse_scenarios(v)?,
            "experiment.sinr_grid_db" => self.sinr_grid_db = parse_list(v)?,
            "experiment.trials" => self.trials = parse_u64(v)?,
            "experiment.max_trials" => self.max_trials = parse_u64(v)?,
            "experiment.min_events" => self.min_events = parse_u64(v)?,
            "experiment.precision_target" => {
                self.precision_target = if v == "none" { None } else { Some(parse_f64(v)?) }
            }
            "experiment.seed" => self.seed = parse_u64(v)?,
            "experiment.max_resample" => self.max_resample = parse_u64(v)?,
            "experiment.slope_window" => self.slope_window = parse_u64(v)? as usize,
            "dmt.l_eff" => self.l_eff = parse_auto(v, parse_f64)?,
            "dmt.points" => self.dmt_points = parse_u64(v)? as usize,
            "lemma1.mean_count" => self.lemma_mean_count = parse_f64(v)?,
            "lemma1.region" => self.lemma_region = parse_region(v)?,
            "lemma1.alpha" => self.lemma_alpha = parse_f64(v)?,
            "lemma1.theta_exponent" => self.lemma_theta_exponent = parse_f64(v)?,
            "lemma1.omega_grid" => self.lemma_omega_grid = parse_list(v)?,
            "lemma1.trials" => self.lemma_trials = parse_u64(v)?,
            "lemma1.tolerance" => self.lemma_tolerance = parse_f64(v)?,
            _ => return Err(format!("unknown key '{key}'")),
        }
        Ok(())
    }

    /// Canonical text form: every key, in [`KEYS`] order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            let _ = writeln!(out, "{key} = {}", self.get(key));
        }
        out
    }

    fn get(&self, key: &str) -> String {
        let auto = |v: Option<f64>| v.map_or("auto".to_string(), |x| format!("{x:?}"));
        match key {
            "network.lambda" => format!("{:?}", self.lambda),
            "network.p" => format!("{:?}", self.p),
            "channel.alpha" => format!("{:?}", self.alpha),
            "channel.rho0_dbm" => format!("{:?}", self.rho0_dbm),
            "channel.interference" => (if self.interference { "on" } else { "off" }).to_string(),
            "channel.lambda_t" => auto(self.lambda_t),
            "channel.truncation_radius_m" => format!("{:?}", self.truncation_radius_m),
            "channel.shared_gamma" => self.shared_gamma.to_string(),
            "channel.sinr_trials" => self.sinr_trials.to_string(),
            "geometry.source_separation_m" => format!("{:?}", self.source_separation_m),
            "geometry.relay_region" => self.relay.render(),
            "traffic.mu" => format!("{:?}", self.mu),
            "traffic.m" => format!("{:?}", self.m),
            "traffic.tau_tdmh" => self.tau_tdmh.render(),
            "traffic.tau_nc" => self.tau_nc.render(),
            "experiment.scenarios" => self.scenarios.iter().map(|s| s.name()).collect::<Vec<_>>().join(","),
            "experiment.sinr_grid_db" => render_list(&self.sinr_grid_db),
            "experiment.trials" => self.trials.to_string(),
            "experiment.max_trials" => self.max_trials.to_string(),
            "experiment.min_events" => self.min_events.to_string(),
            "experiment.precision_target" => self.precision_target.map_or("none".to_string(), |x| format!("{x:?}")),
            "experiment.seed" => self.seed.to_string(),
            "experiment.max_resample" => self.max_resample.to_string(),
            "experiment.slope_window" => self.slope_window.to_string(),
            "dmt.l_eff" => auto(self.l_eff),
            "dmt.points" => self.dmt_points.to_string(),
            "lemma1.mean_count" => format!("{:?}", self.lemma_mean_count),
            "lemma1.region" => render_region(&self.lemma_region),
            "lemma1.alpha" => format!("{:?}", self.lemma_alpha),
            "lemma1.theta_exponent" => format!("{:?}", self.lemma_theta_exponent),
            "lemma1.omega_grid" => render_list(&self.lemma_omega_grid),
            "lemma1.trials" => self.lemma_trials.to_string(),
            "lemma1.tolerance" => format!("{:?}", self.lemma_tolerance),
            _ => unreachable!("key list and getter out of sync: {key}"),
        }
    }

    /// Physical and experimental consistency checks.
    pub fn validate(&self) -> Result<()> {
        check_positive("network.lambda", self.lambda)?;
        check_aloha_p(self.p)?;
        if !(self.alpha > 2.0) {
            return Err(Error::invalid("channel.alpha", "must be > 2"));
        }
        if !self.rho0_dbm.is_finite() {
            return Err(Error::invalid("channel.rho0_dbm", "must be finite"));
        }
        check_positive("channel.truncation_radius_m", self.truncation_radius_m)?;
        if let Some(l) = self.lambda_t {
            if !(l >= 0.0 && l.is_finite()) {
                return Err(Error::invalid("channel.lambda_t", "must be >= 0"));
            }
        }
        check_positive("geometry.source_separation_m", self.source_separation_m)?;
        check_positive("traffic.mu", self.mu)?;
        if !(self.m >= 0.0 && self.m.is_finite()) {
            return Err(Error::invalid("traffic.m", "must be >= 0"));
        }
        for (name, tau) in [("traffic.tau_tdmh", self.tau_tdmh()?), ("traffic.tau_nc", self.tau_nc()?)] {
            if !(tau > 0.0 && tau < 1.0) {
                return Err(Error::invalid(name, format!("forward share must lie in (0, 1), got {tau}")));
            }
        }
        if self.scenarios.is_empty() {
            return Err(Error::invalid("experiment.scenarios", "must not be empty"));
        }
        if self.sinr_grid_db.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("experiment.sinr_grid_db", "values must be finite"));
        }
        if self.sinr_grid_db.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("experiment.sinr_grid_db", "must be strictly increasing"));
        }
        if self.dmt_points < 2 {
            return Err(Error::invalid("dmt.points", "need at least 2"));
        }
        if let Some(l) = self.l_eff {
            check_positive("dmt.l_eff", l)?;
        }
        self.policy().validate()?;
        if self.interference && self.sinr_trials < 1000 {
            return Err(Error::invalid("channel.sinr_trials", "need at least 1000"));
        }
        // Builds the trial model at a nominal SNR to run its checks.
        self.trial_model(0.0)?.validate()
    }

    pub fn tau_tdmh(&self) -> Result<f64> {
        self.tau_tdmh.tdmh()
    }

    pub fn tau_nc(&self) -> Result<f64> {
        self.tau_nc.nc()
    }

    /// Forward share for a scenario's protocol family.
    pub fn tau_for(&self, scenario: Scenario) -> Result<f64> {
        if scenario.is_network_coding() {
            self.tau_nc()
        } else {
            self.tau_tdmh()
        }
    }

    pub fn rho0_watts(&self) -> f64 {
        dbm_to_watts(self.rho0_dbm)
    }

    /// Link budget whose noise-limited SNR is `snr_db`.
    pub fn budget_at(&self, snr_db: f64) -> Result<LinkBudget> {
        let rho0 = self.rho0_watts();
        LinkBudget::new(rho0, rho0 / db_to_linear(snr_db), self.alpha)
    }

    pub fn interference_model(&self) -> InterferenceModel {
        if self.interference {
            InterferenceModel::On {
                lambda_t: self.lambda_t.unwrap_or(self.lambda * self.p),
                truncation_radius: self.truncation_radius_m,
            }
        } else {
            InterferenceModel::Off
        }
    }

    pub fn scene(&self) -> Scene {
        let relays = match &self.relay {
            RelaySpec::Region(region) => RelaySource::Poisson {
                lambda: self.lambda,
                p: self.p,
                region: *region,
            },
            RelaySpec::Fixed(p) => RelaySource::Fixed(p.clone()),
        };
        Scene::symmetric(self.source_separation_m, relays)
    }

    pub fn trial_model(&self, snr_db: f64) -> Result<TrialModel> {
        Ok(TrialModel {
            scene: self.scene(),
            budget: self.budget_at(snr_db)?,
            interference: self.interference_model(),
            shared_gamma: self.shared_gamma,
            max_resample: self.max_resample,
        })
    }

    pub fn policy(&self) -> TrialPolicy {
        TrialPolicy {
            initial: self.trials,
            max: self.max_trials,
            min_events: self.min_events,
            precision_target: self.precision_target,
        }
    }

    /// λ_r·ν_r: explicit, else λ(1−2p)·|region| (1 per fixed relay).
    pub fn effective_relays(&self) -> f64 {
        self.l_eff.unwrap_or_else(|| match &self.relay {
            RelaySpec::Region(r) => self.lambda * (1.0 - 2.0 * self.p) * r.measure(),
            RelaySpec::Fixed(p) => p.len() as f64,
        })
    }

    pub fn lemma_params(&self) -> Result<Lemma1Params> {
        check_positive("lemma1.mean_count", self.lemma_mean_count)?;
        self.lemma_region.validate()?;
        Ok(Lemma1Params {
            field: LemmaField::Poisson {
                lambda_z: self.lemma_mean_count / self.lemma_region.measure(),
                region: self.lemma_region,
            },
            alpha: self.lemma_alpha,
            theta_exponent: self.lemma_theta_exponent,
            omega_grid: self.lemma_omega_grid.clone(),
            trials: self.lemma_trials,
            tolerance: self.lemma_tolerance,
            max_resample: self.max_resample,
        })
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be > 0, got {v}")))
    }
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    s.trim().parse::<f64>().map_err(|_| format!("expected a number, got '{s}'"))
}

fn parse_u64(s: &str) -> std::result::Result<u64, String> {
    let s = s.trim();
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    // Accept integral scientific notation such as 1e6.
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < 1.8e19 => Ok(v as u64),
        _ => Err(format!("expected a non-negative integer, got '{s}'")),
    }
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("expected true or false, got '{s}'")),
    }
}

fn parse_auto<T>(s: &str, f: fn(&str) -> std::result::Result<T, String>) -> std::result::Result<Option<T>, String> {
    if s == "auto" {
        Ok(None)
    } else {
        f(s).map(Some)
    }
}

fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_f64).collect()
}

fn render_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",")
}

fn parse_scenarios(s: &str) -> std::result::Result<Vec<Scenario>, String> {
    if s == "all" {
        return Ok(Scenario::ALL.to_vec());
    }
    let mut out: Vec<Scenario> = s
        .split(',')
        .map(|n| n.trim().parse::<Scenario>().map_err(|e| e.to_string()))
        .collect::<std::result::Result<_, _>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

fn parse_region(s: &str) -> std::result::Result<Region, String> {
    let (kind, body) = s.split_once(':').ok_or_else(|| format!("expected kind:values, got '{s}'"))?;
    let v = parse_list(body)?;
    let r = match (kind, &v[..]) {
        ("disc", &[x, y, r]) => Region::disc(Point::new(x, y), r),
        ("annulus", &[x, y, a, b]) => Region::annulus(Point::new(x, y), a, b),
        ("rect", &[x0, y0, x1, y1]) => Region::rectangle(Point::new(x0, y0), Point::new(x1, y1)),
        _ => return Err(format!("bad region '{s}' (disc:x,y,r | annulus:x,y,r_in,r_out | rect:x0,y0,x1,y1)")),
    };
    r.map_err(|e| e.to_string())
}

fn render_region(r: &Region) -> String {
    match r {
        Region::Disc { center, radius } => format!("disc:{:?},{:?},{:?}", center.x, center.y, radius),
        Region::Annulus { center, r_in, r_out } => {
            format!("annulus:{:?},{:?},{:?},{:?}", center.x, center.y, r_in, r_out)
        }
        Region::Rectangle { min, max } => format!("rect:{:?},{:?},{:?},{:?}", min.x, min.y, max.x, max.y),
    }
}
