//! Location verification from received-signal-strength measurements.
//!
//! A verifier that moved through several positions fits the transmitter
//! location by least squares under a log-distance path-loss model with the
//! transmit power treated as a nuisance (profiled out as the mean residual),
//! then compares the claimed position's residual cost against the fitted
//! optimum. Under Gaussian shadowing the cost gap behaves asymptotically as
//! a chi-square variable with two degrees of freedom, giving a calibrated
//! accept region.

use crate::channel::{PathLossModel, RssSample};
use crate::error::{Error, Result};

/// Levenberg-Marquardt iteration cap per start.
const MAX_ITERS: usize = 200;

/// Distances are clamped below this floor before entering the log to keep
/// the model finite when a candidate position crosses a probe point.
const MIN_DISTANCE: f64 = 1e-9;

/// Outcome of a proximity fit: the least-squares transmitter estimate, the
/// cost-gap statistic for the claimed position, and the chi-square accept
/// threshold it was compared against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProximityFit {
    /// Least-squares transmitter position.
    pub fitted_pos: [f64; 2],
    /// Residual sum of squares at the fitted position.
    pub fitted_ssr: f64,
    /// `(SSR(claimed) - SSR(fitted)) / sigma^2`, nonnegative.
    pub statistic: f64,
    /// Chi-square(2) quantile at the requested confidence.
    pub threshold: f64,
}

impl ProximityFit {
    pub fn accept(&self) -> bool {
        self.statistic <= self.threshold
    }
}

/// Fit the transmitter position and test the claimed one.
///
/// # Errors
/// Needs at least three measurements at pairwise-distinct, non-collinear
/// positions ([`Error::GeometryInsufficient`] otherwise); `confidence` must
/// lie strictly inside `(0, 1)`.
pub fn proximity_fit(
    claimed_pos: [f64; 2],
    measurements: &[RssSample],
    model: &PathLossModel,
    confidence: f64,
) -> Result<ProximityFit> {
    if !(confidence.is_finite() && confidence > 0.0 && confidence < 1.0) {
        return Err(Error::invalid(
            "confidence",
            format!("must lie strictly in (0, 1), got {confidence}"),
        ));
    }
    if !(claimed_pos[0].is_finite() && claimed_pos[1].is_finite()) {
        return Err(Error::invalid("claimed_pos", "must be finite"));
    }
    check_geometry(measurements)?;

    let exponent = model.exponent();
    // The claimed position, the probe centroid, and the strongest probe
    // bracket the plausible basins; keep the best of the three fits.
    let centroid = {
        let n = measurements.len() as f64;
        let sx: f64 = measurements.iter().map(|m| m.position[0]).sum();
        let sy: f64 = measurements.iter().map(|m| m.position[1]).sum();
        [sx / n, sy / n]
    };
    let strongest = measurements
        .iter()
        .max_by(|a, b| a.rss_db.total_cmp(&b.rss_db))
        .expect("nonempty by geometry check")
        .position;
    let mut best_pos = claimed_pos;
    let mut best_ssr = f64::INFINITY;
    for start in [claimed_pos, centroid, strongest] {
        let (pos, ssr) = refine(start, measurements, exponent);
        if ssr < best_ssr {
            best_ssr = ssr;
            best_pos = pos;
        }
    }

    let sigma = model.shadowing_std_db().max(1e-9);
    let claimed_ssr = ssr_at(claimed_pos, measurements, exponent);
    let statistic = ((claimed_ssr - best_ssr) / (sigma * sigma)).max(0.0);
    // Chi-square(2) quantile in closed form: -2 ln(1 - c).
    let threshold = -2.0 * (1.0 - confidence).ln();
    Ok(ProximityFit {
        fitted_pos: best_pos,
        fitted_ssr: best_ssr,
        statistic,
        threshold,
    })
}

/// Accept or reject a claimed transmitter position.
///
/// # Errors
/// Same conditions as [`proximity_fit`].
pub fn verify_proximity(
    claimed_pos: [f64; 2],
    measurements: &[RssSample],
    model: &PathLossModel,
    confidence: f64,
) -> Result<bool> {
    Ok(proximity_fit(claimed_pos, measurements, model, confidence)?.accept())
}

fn check_geometry(measurements: &[RssSample]) -> Result<()> {
    if measurements.len() < 3 {
        return Err(Error::GeometryInsufficient);
    }
    for (i, a) in measurements.iter().enumerate() {
        if !(a.position[0].is_finite() && a.position[1].is_finite() && a.rss_db.is_finite()) {
            return Err(Error::invalid("measurements", "entries must be finite"));
        }
        for b in &measurements[..i] {
            if a.position == b.position {
                return Err(Error::GeometryInsufficient);
            }
        }
    }
    // Rank of the centered position cloud: a (near-)zero determinant of the
    // second-moment matrix means all probes lie on one line, which leaves
    // the transmitter position unidentifiable.
    let n = measurements.len() as f64;
    let mx: f64 = measurements.iter().map(|m| m.position[0]).sum::<f64>() / n;
    let my: f64 = measurements.iter().map(|m| m.position[1]).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for m in measurements {
        let dx = m.position[0] - mx;
        let dy = m.position[1] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let det = sxx * syy - sxy * sxy;
    let scale = (sxx + syy).max(f64::MIN_POSITIVE);
    if det <= 1e-12 * scale * scale {
        return Err(Error::GeometryInsufficient);
    }
    Ok(())
}

/// Model mean at a candidate position with the transmit power profiled out:
/// per-probe `-10 * exponent * log10(d_i)` plus the offset that matches the
/// mean observed strength.
fn residuals(pos: [f64; 2], measurements: &[RssSample], exponent: f64) -> Vec<f64> {
    let n = measurements.len() as f64;
    let path: Vec<f64> = measurements
        .iter()
        .map(|m| {
            let d = dist(pos, m.position).max(MIN_DISTANCE);
            -10.0 * exponent * d.log10()
        })
        .collect();
    let offset = measurements
        .iter()
        .zip(&path)
        .map(|(m, p)| m.rss_db - p)
        .sum::<f64>()
        / n;
    measurements
        .iter()
        .zip(&path)
        .map(|(m, p)| m.rss_db - p - offset)
        .collect()
}

fn ssr_at(pos: [f64; 2], measurements: &[RssSample], exponent: f64) -> f64 {
    residuals(pos, measurements, exponent)
        .iter()
        .map(|e| e * e)
        .sum()
}

/// Levenberg-Marquardt descent on the profiled residual cost.
fn refine(start: [f64; 2], measurements: &[RssSample], exponent: f64) -> ([f64; 2], f64) {
    let n = measurements.len() as f64;
    let mut pos = start;
    let mut ssr = ssr_at(pos, measurements, exponent);
    let mut lambda = 1e-3;
    for _ in 0..MAX_ITERS {
        let e = residuals(pos, measurements, exponent);
        // Gradient of each path term: d/dpos[-10γ log10(d)] = -c (pos-x)/d².
        let c = 10.0 * exponent / std::f64::consts::LN_10;
        let grads: Vec<[f64; 2]> = measurements
            .iter()
            .map(|m| {
                let d2 = dist(pos, m.position).max(MIN_DISTANCE).powi(2);
                [
                    -c * (pos[0] - m.position[0]) / d2,
                    -c * (pos[1] - m.position[1]) / d2,
                ]
            })
            .collect();
        let gmean = [
            grads.iter().map(|g| g[0]).sum::<f64>() / n,
            grads.iter().map(|g| g[1]).sum::<f64>() / n,
        ];
        // Residual Jacobian rows (centered because the offset is profiled).
        let rows: Vec<[f64; 2]> = grads
            .iter()
            .map(|g| [-(g[0] - gmean[0]), -(g[1] - gmean[1])])
            .collect();
        let (mut jtj00, mut jtj01, mut jtj11) = (0.0, 0.0, 0.0);
        let (mut jte0, mut jte1) = (0.0, 0.0);
        for (row, ei) in rows.iter().zip(&e) {
            jtj00 += row[0] * row[0];
            jtj01 += row[0] * row[1];
            jtj11 += row[1] * row[1];
            jte0 += row[0] * ei;
            jte1 += row[1] * ei;
        }
        let mut stepped = false;
        for _ in 0..40 {
            let a00 = jtj00 + lambda;
            let a11 = jtj11 + lambda;
            let det = a00 * a11 - jtj01 * jtj01;
            if det <= 0.0 {
                lambda *= 10.0;
                continue;
            }
            let dx = (-jte0 * a11 + jte1 * jtj01) / det;
            let dy = (-jte1 * a00 + jte0 * jtj01) / det;
            let cand = [pos[0] + dx, pos[1] + dy];
            let cand_ssr = ssr_at(cand, measurements, exponent);
            if cand_ssr < ssr {
                if ssr - cand_ssr < 1e-15 * (1.0 + ssr) && dx.abs() + dy.abs() < 1e-10 {
                    return (cand, cand_ssr);
                }
                pos = cand;
                ssr = cand_ssr;
                lambda = (lambda * 0.3).max(1e-12);
                stepped = true;
                break;
            }
            lambda *= 10.0;
        }
        if !stepped {
            break;
        }
    }
    (pos, ssr)
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}
