//! Experiment runners behind the `bidir-relay` subcommands. Each returns the
//! full CSV text so that callers (and tests) can compare outputs byte for byte.

pub mod csv;

use std::collections::BTreeMap;

use crate::channel::{db_to_linear, linear_to_db, mean_sinr};
use crate::config::SimConfig;
use crate::dmt::{DmtCurve, DmtParams};
use crate::outage::{
    estimate_outage, fit_diversity_slope, lemma1_check, Lemma1Report, OutageEstimate, Quality, RatePoint, SlopeFit,
};
use crate::protocols::Scenario;
use crate::rng::StreamKey;
use crate::{Error, Result};

use self::csv::{csv_err, fmt_g9, CsvWriter, Table};

pub const DMT_HEADER: &[&str] = &["scenario", "mu", "tau_f", "tau_b", "l_eff", "m", "d", "boundary"];
pub const SWEEP_HEADER: &[&str] = &[
    "scenario",
    "gamma_bar_db",
    "eps_hat",
    "eps_f",
    "eps_b",
    "ci_low",
    "ci_high",
    "trials",
    "rejected_empty",
    "seed",
    "quality",
];
pub const SLOPE_HEADER: &[&str] = &["scenario", "d_hat", "stderr", "window"];
pub const LEMMA_HEADER: &[&str] = &["omega", "theta", "p_hat", "exponent_hat", "bound", "quality"];

/// Analytic DMT curves of every configured scenario.
pub fn run_dmt_curve(cfg: &SimConfig) -> Result<String> {
    cfg.validate()?;
    let l_eff = cfg.effective_relays();
    let mut w = CsvWriter::new(DMT_HEADER);
    for &s in &cfg.scenarios {
        let params = DmtParams::new(cfg.mu, cfg.tau_for(s)?, l_eff)?;
        let curve = DmtCurve::sample(s, &params, cfg.dmt_points)?;
        for pt in &curve.points {
            w.row(&[
                s.name().to_string(),
                fmt_g9(params.mu),
                fmt_g9(params.tau_f),
                fmt_g9(params.tau_b),
                fmt_g9(params.l_eff),
                fmt_g9(pt.m),
                fmt_g9(pt.d),
                (pt.boundary as u8).to_string(),
            ]);
        }
    }
    Ok(w.finish())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub scenario: Scenario,
    pub estimate: OutageEstimate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOutput {
    pub csv: String,
    pub rows: Vec<SweepRow>,
}

impl SweepOutput {
    pub fn low_confidence(&self) -> usize {
        self.rows.iter().filter(|r| r.estimate.quality != Quality::Ok).count()
    }
}

/// Outage estimates for every (scenario, SNR) pair, sorted by scenario then
/// SNR. Grid values set N₀ so that ρ₀/N₀ hits the target; with interference
/// on, the reported γ̄ is the measured mean SINR at that N₀.
pub fn run_outage_sweep(cfg: &SimConfig, threads: usize) -> Result<SweepOutput> {
    cfg.validate()?;
    if cfg.sinr_grid_db.is_empty() {
        return Err(Error::invalid("experiment.sinr_grid_db", "must not be empty"));
    }
    let key = StreamKey::new(cfg.seed);
    let mut gamma_bar = Vec::with_capacity(cfg.sinr_grid_db.len());
    for &db in &cfg.sinr_grid_db {
        let budget = cfg.budget_at(db)?;
        let g = if cfg.interference {
            mean_sinr(&budget, &cfg.interference_model(), cfg.sinr_trials, &key, threads)?.mean
        } else {
            db_to_linear(db)
        };
        gamma_bar.push(g);
    }

    let mut scenarios = cfg.scenarios.clone();
    scenarios.sort();
    let policy = cfg.policy();
    let mut rows = Vec::new();
    for s in scenarios {
        let tau_f = cfg.tau_for(s)?;
        for (&db, &g) in cfg.sinr_grid_db.iter().zip(&gamma_bar) {
            let model = cfg.trial_model(db)?;
            let rates = RatePoint::from_multiplexing(cfg.m, cfg.mu, tau_f, g)?;
            let reported_db = if cfg.interference { linear_to_db(g) } else { db };
            let estimate = estimate_outage(&model, s, &rates, reported_db, &policy, &key, threads)?;
            rows.push(SweepRow { scenario: s, estimate });
        }
    }

    let mut w = CsvWriter::new(SWEEP_HEADER);
    for r in &rows {
        let e = &r.estimate;
        w.row(&[
            r.scenario.name().to_string(),
            fmt_g9(e.gamma_bar_db),
            fmt_g9(e.eps_hat),
            fmt_g9(e.eps_f_hat),
            fmt_g9(e.eps_b_hat),
            fmt_g9(e.ci_low),
            fmt_g9(e.ci_high),
            e.trials.to_string(),
            e.rejected_empty.to_string(),
            cfg.seed.to_string(),
            e.quality.to_string(),
        ]);
    }
    Ok(SweepOutput { csv: w.finish(), rows })
}

/// Reads an outage-sweep CSV into per-scenario `(gamma_bar_db, eps_hat)`
/// curves, keeping file order within a scenario.
pub fn read_sweep_curves(text: &str) -> Result<BTreeMap<Scenario, Vec<(f64, f64)>>> {
    let table = Table::parse(text)?;
    let (si, gi, ei) = (table.column("scenario")?, table.column("gamma_bar_db")?, table.column("eps_hat")?);
    let mut curves: BTreeMap<Scenario, Vec<(f64, f64)>> = BTreeMap::new();
    for (line, f) in &table.rows {
        let scenario: Scenario = f[si].parse().map_err(|e: Error| csv_err(*line, e.to_string()))?;
        let num = |i: usize, name: &str| -> Result<f64> {
            f[i].parse::<f64>()
                .map_err(|_| csv_err(*line, format!("{name}: expected a number, got '{}'", f[i])))
        };
        curves.entry(scenario).or_default().push((num(gi, "gamma_bar_db")?, num(ei, "eps_hat")?));
    }
    Ok(curves)
}

/// Fitted diversity slope per scenario of an outage-sweep CSV.
pub fn run_slope_fit(csv_in: &str, window: usize) -> Result<(String, Vec<(Scenario, SlopeFit)>)> {
    let curves = read_sweep_curves(csv_in)?;
    let mut fits = Vec::new();
    for (s, curve) in curves {
        let fit = fit_diversity_slope(&curve, window).map_err(|e| match e {
            Error::UnresolvedOutage { gamma_bar_db, .. } => Error::UnresolvedOutage {
                scenario: s.name().to_string(),
                gamma_bar_db,
            },
            Error::SlopeFit(msg) => Error::SlopeFit(format!("{}: {msg}", s.name())),
            other => other,
        })?;
        fits.push((s, fit));
    }
    let mut w = CsvWriter::new(SLOPE_HEADER);
    for (s, f) in &fits {
        w.row(&[s.name().to_string(), fmt_g9(f.d_hat), fmt_g9(f.stderr), f.window.to_string()]);
    }
    Ok((w.finish(), fits))
}

/// Shot-noise lower-tail exponents against the bound λ_z·ν_z·θ∞.
pub fn run_lemma1(cfg: &SimConfig, threads: usize) -> Result<(String, Lemma1Report)> {
    let params = cfg.lemma_params()?;
    let report = lemma1_check(&params, &StreamKey::new(cfg.seed), threads)?;
    let mut w = CsvWriter::new(LEMMA_HEADER);
    for r in &report.rows {
        w.row(&[
            fmt_g9(r.omega),
            fmt_g9(r.theta),
            fmt_g9(r.p_hat),
            fmt_g9(r.exponent_hat),
            fmt_g9(r.bound),
            (if r.upper_bound_only { "upper_bound" } else { "ok" }).to_string(),
        ]);
    }
    Ok((w.finish(), report))
}
