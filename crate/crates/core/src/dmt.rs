//! Closed-form diversity-multiplexing tradeoff curves.
//!
//! Every curve is affine in the multiplexing gain `m`:
//!
//! | scenario                               | d(m)                      | support end |
//! |----------------------------------------|---------------------------|-------------|
//! | `tdmh_collab`, `tdmh_opt_relay`        | L(1 − 2m/κ)               | κ/2         |
//! | `nc_collab_all_broadcast`              | 1 − 3m/(2κ)               | 2κ/3        |
//! | `nc_collab_opt_broadcast`, `nc_opt_relay` | L(1 − 3m/(2κ))         | 2κ/3        |
//!
//! with κ = min{(1+μ)τ_f, (1+1/μ)τ_b} and L = λ_rν_r, the mean relay count.
//! The time allocation that yields κ ≈ 0.68 in the classic asymmetric example
//! gives the NC slope 3/1.36 ≈ 2.2059, usually quoted rounded to 2.2.

use crate::protocols::Scenario;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DmtParams {
    pub mu: f64,
    pub tau_f: f64,
    pub tau_b: f64,
    /// Mean number of relays λ_r ν_r.
    pub l_eff: f64,
}

impl DmtParams {
    pub fn new(mu: f64, tau_f: f64, l_eff: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::invalid("mu", format!("must be > 0, got {mu}")));
        }
        if !(0.0..=1.0).contains(&tau_f) {
            return Err(Error::invalid("tau_f", format!("must lie in [0, 1], got {tau_f}")));
        }
        if !(l_eff > 0.0 && l_eff.is_finite()) {
            return Err(Error::invalid("l_eff", format!("must be > 0, got {l_eff}")));
        }
        Ok(DmtParams {
            mu,
            tau_f,
            tau_b: 1.0 - tau_f,
            l_eff,
        })
    }

    /// κ = min{(1+μ)τ_f, (1+1/μ)τ_b}.
    pub fn kappa(&self) -> f64 {
        ((1.0 + self.mu) * self.tau_f).min((1.0 + 1.0 / self.mu) * self.tau_b)
    }
}

/// `d(m) = intercept − slope·m` on `[0, m_max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineDmt {
    pub intercept: f64,
    pub slope: f64,
    pub m_max: f64,
}

impl AffineDmt {
    pub fn for_scenario(scenario: Scenario, params: &DmtParams) -> Self {
        let k = params.kappa();
        let l = params.l_eff;
        match scenario {
            Scenario::TdmhCollab | Scenario::TdmhOptRelay => AffineDmt {
                intercept: l,
                slope: 2.0 * l / k,
                m_max: 0.5 * k,
            },
            Scenario::NcCollabAllBroadcast => AffineDmt {
                intercept: 1.0,
                slope: 3.0 / (2.0 * k),
                m_max: 2.0 / 3.0 * k,
            },
            Scenario::NcCollabOptBroadcast | Scenario::NcOptRelay => AffineDmt {
                intercept: l,
                slope: 3.0 * l / (2.0 * k),
                m_max: 2.0 / 3.0 * k,
            },
        }
    }

    /// Evaluates at `m`. The support is open; both endpoints are accepted and
    /// flagged, with `d(m_max) = 0` exactly.
    pub fn eval(&self, m: f64) -> Result<DmtPoint> {
        let tol = 1e-12 * self.m_max;
        if !(m >= 0.0) || m > self.m_max + tol {
            return Err(Error::OutsideSupport { m, m_max: self.m_max });
        }
        if (m - self.m_max).abs() <= tol {
            return Ok(DmtPoint {
                m,
                d: 0.0,
                boundary: true,
            });
        }
        Ok(DmtPoint {
            m,
            d: self.intercept - self.slope * m,
            boundary: m == 0.0,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DmtPoint {
    pub m: f64,
    pub d: f64,
    pub boundary: bool,
}

/// Equal-time TDMH: d = L(1 − 2m/κ).
pub fn dmt_tdmh(m: f64, params: &DmtParams) -> Result<DmtPoint> {
    AffineDmt::for_scenario(Scenario::TdmhOptRelay, params).eval(m)
}

/// NC with every relay broadcasting: d = 1 − 3m/(2κ), no transmit diversity.
pub fn dmt_nc_full_broadcast(m: f64, params: &DmtParams) -> Result<DmtPoint> {
    AffineDmt::for_scenario(Scenario::NcCollabAllBroadcast, params).eval(m)
}

/// NC through an optimal relay (receive and/or broadcast): d = L(1 − 3m/(2κ)).
pub fn dmt_nc_opt_relay(m: f64, params: &DmtParams) -> Result<DmtPoint> {
    AffineDmt::for_scenario(Scenario::NcOptRelay, params).eval(m)
}

pub fn dmt_for(scenario: Scenario, m: f64, params: &DmtParams) -> Result<DmtPoint> {
    AffineDmt::for_scenario(scenario, params).eval(m)
}

pub fn max_multiplexing(scenario: Scenario, params: &DmtParams) -> f64 {
    AffineDmt::for_scenario(scenario, params).m_max
}

#[derive(Clone, Debug, PartialEq)]
pub struct DmtCurve {
    pub scenario: Scenario,
    pub params: DmtParams,
    pub points: Vec<DmtPoint>,
    pub m_max: f64,
}

impl DmtCurve {
    /// `n` equally spaced points covering `[0, m_max]`, endpoints included.
    pub fn sample(scenario: Scenario, params: &DmtParams, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("dmt_points", "need at least 2 grid points"));
        }
        let line = AffineDmt::for_scenario(scenario, params);
        let last = n - 1;
        let points = (0..n)
            .map(|i| {
                let m = if i == last { line.m_max } else { line.m_max * i as f64 / last as f64 };
                line.eval(m)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DmtCurve {
            scenario,
            params: *params,
            points,
            m_max: line.m_max,
        })
    }
}

/// Fraction of the exchange spent on forward traffic under NC, from the
/// hop durations between A and the relay set and between the relay set and B.
pub fn time_allocation_nc(t_ad: f64, t_db: f64) -> Result<(f64, f64)> {
    positive("t_ad", t_ad)?;
    positive("t_db", t_db)?;
    let tau_f = (t_ad + t_db) / ((t_ad + t_db) + 2.0 * t_db);
    Ok((tau_f, 1.0 - tau_f))
}

/// TDMH time split: forward hop times over the sum of both directions.
pub fn time_allocation_tdmh(forward: (f64, f64), backward: (f64, f64)) -> Result<(f64, f64)> {
    for (name, v) in [("t_ad", forward.0), ("t_db", forward.1), ("t_bd", backward.0), ("t_da", backward.1)] {
        positive(name, v)?;
    }
    let fwd = forward.0 + forward.1;
    let tau_f = fwd / (fwd + backward.0 + backward.1);
    Ok((tau_f, 1.0 - tau_f))
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("hop time must be > 0, got {v}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Winner {
    Tdmh,
    Nc,
    Tie,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub per_m: Vec<(f64, Winner)>,
    /// Multiplexing gains inside both supports where the two lines cross.
    pub crossovers: Vec<f64>,
}

/// TDMH (optimal relay) against NC (optimal relay) on `m_grid`. Outside a
/// protocol's support its diversity is taken as 0.
pub fn compare_protocols(tdmh: &DmtParams, nc: &DmtParams, m_grid: &[f64]) -> Comparison {
    let a = AffineDmt::for_scenario(Scenario::TdmhOptRelay, tdmh);
    let b = AffineDmt::for_scenario(Scenario::NcOptRelay, nc);
    let value = |line: &AffineDmt, m: f64| line.eval(m).map(|p| p.d).unwrap_or(0.0);
    let per_m = m_grid
        .iter()
        .map(|&m| {
            let (dt, dn) = (value(&a, m), value(&b, m));
            let w = if dn > dt {
                Winner::Nc
            } else if dt > dn {
                Winner::Tdmh
            } else {
                Winner::Tie
            };
            (m, w)
        })
        .collect();
    let mut crossovers = Vec::new();
    if a.slope != b.slope {
        let m = (a.intercept - b.intercept) / (a.slope - b.slope);
        if m > 0.0 && m < a.m_max.min(b.m_max) {
            crossovers.push(m);
        }
    }
    Comparison { per_m, crossovers }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(l: f64) -> DmtParams {
        DmtParams::new(1.0, 0.5, l).unwrap()
    }

    #[test]
    fn tdmh_values() {
        let p = sym(3.0);
        for m in [0.05, 0.1, 0.3, 0.45] {
            assert!((dmt_tdmh(m, &p).unwrap().d - 3.0 * (1.0 - 2.0 * m)).abs() < 1e-15);
        }
        assert_eq!(dmt_tdmh(0.0, &p).unwrap().d, 3.0);
        let skew = DmtParams::new(1.0, 0.34, 2.0).unwrap();
        let d = dmt_tdmh(0.1, &skew).unwrap().d;
        assert!((d - 2.0 * (1.0 - 0.2 / 0.68)).abs() < 1e-12);
        assert!((d - 1.4118).abs() < 1e-4);
    }

    #[test]
    fn nc_values() {
        let p = sym(4.0);
        assert!((dmt_nc_full_broadcast(0.2, &p).unwrap().d - 0.7).abs() < 1e-15);
        assert!((dmt_nc_full_broadcast(1e-9, &p).unwrap().d - 1.0).abs() < 1e-8);
        let end = dmt_nc_full_broadcast(2.0 / 3.0, &p).unwrap();
        assert_eq!(end.d, 0.0);
        assert!(end.boundary);
        assert!((dmt_nc_opt_relay(0.2, &p).unwrap().d - 4.0 * 0.7).abs() < 1e-14);
        let skew = DmtParams::new(1.0, 0.34, 1.0).unwrap();
        let line = AffineDmt::for_scenario(Scenario::NcOptRelay, &skew);
        assert!((line.slope - 3.0 / 1.36).abs() < 1e-12);
        assert!((line.slope - 2.2).abs() < 0.01);
    }

    #[test]
    fn support_is_enforced() {
        let p = sym(1.0);
        assert_eq!(max_multiplexing(Scenario::TdmhCollab, &p), 0.5);
        assert!((max_multiplexing(Scenario::NcOptRelay, &p) - 2.0 / 3.0).abs() < 1e-15);
        assert!(matches!(dmt_tdmh(0.51, &p), Err(Error::OutsideSupport { m_max, .. }) if m_max == 0.5));
        assert!(dmt_tdmh(-0.1, &p).is_err());
        let big_mu = DmtParams::new(1e6, 0.5, 1.0).unwrap();
        let expected = 0.5 * (1.0 + 1e-6) * 0.5;
        assert!((max_multiplexing(Scenario::TdmhCollab, &big_mu) - expected).abs() < 1e-15);
    }

    #[test]
    fn endpoints_are_exactly_zero() {
        for tau in [0.5, 0.34, 0.71] {
            for mu in [0.3, 1.0, 2.5] {
                let p = DmtParams::new(mu, tau, 2.7).unwrap();
                for sc in Scenario::ALL {
                    let m_max = max_multiplexing(sc, &p);
                    assert_eq!(dmt_for(sc, m_max, &p).unwrap().d, 0.0);
                }
            }
        }
    }

    #[test]
    fn curve_grid() {
        let curve = DmtCurve::sample(Scenario::TdmhOptRelay, &sym(2.0), 101).unwrap();
        assert_eq!(curve.points.len(), 101);
        assert_eq!(curve.points[50].m, 0.25);
        assert_eq!(curve.points[50].d, 1.0);
        assert!(curve.points[0].boundary && curve.points[100].boundary);
        assert!(curve.points[1..100].iter().all(|p| !p.boundary));
        assert!(curve.points.windows(2).all(|w| w[1].d < w[0].d));
    }

    #[test]
    fn time_allocation_example() {
        let (tf, tb) = time_allocation_nc(0.01, 0.49).unwrap();
        assert!((tf - 0.50 / 1.48).abs() < 1e-15);
        assert!((tf - 0.34).abs() < 0.005);
        assert!((tb - 0.6622).abs() < 1e-4);
        let (tf, _) = time_allocation_nc(0.2, 0.2).unwrap();
        assert_eq!(tf, 0.5);
        let (tf, tb) = time_allocation_tdmh((0.01, 0.49), (0.49, 0.01)).unwrap();
        assert_eq!((tf, tb), (0.5, 0.5));
        assert!(time_allocation_nc(0.0, 0.3).is_err());
        assert!(time_allocation_tdmh((0.1, -0.1), (0.1, 0.1)).is_err());
    }

    #[test]
    fn comparison() {
        let grid: Vec<f64> = (1..50).map(|i| i as f64 / 100.0).collect();
        let c = compare_protocols(&sym(2.0), &sym(2.0), &grid);
        assert!(c.per_m.iter().all(|&(_, w)| w == Winner::Nc));
        assert!(c.crossovers.is_empty());

        let nc = DmtParams::new(1.0, 0.34, 2.0).unwrap();
        let c = compare_protocols(&sym(2.0), &nc, &grid);
        assert!(c.per_m.iter().all(|&(_, w)| w == Winner::Tdmh));
        assert!(c.crossovers.is_empty());

        // κ_nc = 0.75 makes the NC line coincide with TDMH at κ = 1.
        let nc = DmtParams::new(1.0, 0.375, 2.0).unwrap();
        let same = compare_protocols(&sym(2.0), &nc, &grid);
        assert!(same.crossovers.is_empty());
        assert!(same.per_m.iter().all(|&(_, w)| w == Winner::Tie));

        // Different intercepts: NC with more relays but worse allocation.
        let nc = DmtParams::new(1.0, 0.34, 3.0).unwrap();
        let c = compare_protocols(&sym(2.0), &nc, &grid);
        assert_eq!(c.crossovers.len(), 1);
        let m = c.crossovers[0];
        let dt = dmt_tdmh(m, &sym(2.0)).unwrap().d;
        let dn = dmt_nc_opt_relay(m, &nc).unwrap().d;
        assert!((dt - dn).abs() < 1e-12);
    }
}
