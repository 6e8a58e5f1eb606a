use crate::{Error, Result};

/// Number of highest-SNR points used by default.
pub const DEFAULT_SLOPE_WINDOW: usize = 4;

/// Least-squares diversity estimate over a window of the outage curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeFit {
    pub d_hat: f64,
    pub stderr: f64,
    pub window: usize,
    pub lo_db: f64,
    pub hi_db: f64,
}

/// Slope of −log₁₀ε against log₁₀γ̄ over the top `window` points of `curve`,
/// given as `(gamma_bar_db, eps_hat)` pairs in increasing SNR order.
///
/// A zero estimate inside the window is reported as
/// [`Error::UnresolvedOutage`] with an empty scenario label; callers that know
/// the scenario fill it in.
pub fn fit_diversity_slope(curve: &[(f64, f64)], window: usize) -> Result<SlopeFit> {
    if curve.len() < 4 {
        return Err(Error::SlopeFit(format!("need at least 4 points, got {}", curve.len())));
    }
    if window < 3 {
        return Err(Error::SlopeFit(format!("window must be >= 3, got {window}")));
    }
    if curve.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::SlopeFit("SNR grid must be strictly increasing".into()));
    }
    let window = window.min(curve.len());
    let pts = &curve[curve.len() - window..];
    for &(db, eps) in pts {
        if !(eps > 0.0) {
            return Err(Error::UnresolvedOutage {
                scenario: String::new(),
                gamma_bar_db: db,
            });
        }
    }
    // log10(γ̄) = dB / 10.
    let xs: Vec<f64> = pts.iter().map(|p| p.0 / 10.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| -p.1.log10()).collect();
    let n = window as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = (sse / (n - 2.0) / sxx).sqrt();
    Ok(SlopeFit {
        d_hat: slope,
        stderr,
        window,
        lo_db: pts[0].0,
        hi_db: pts[window - 1].0,
    })
}
