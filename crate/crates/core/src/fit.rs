//! Least-squares helpers for scaling fits.

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return invalid("linear_fit needs at least two matched points");
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return invalid("linear_fit abscissae are degenerate");
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_stderr = if n > 2 {
        let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
        (sse / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LinearFit { slope, intercept, slope_stderr })
}

/// Slope of ln|y| against ln x.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().ln()).collect();
    Ok(linear_fit(&lx, &ly)?.slope)
}

/// y ≈ Σ_j c_j f_j(x); returns coefficients and the residual sum of squares.
pub fn least_squares(columns: &[Vec<f64>], y: &[f64]) -> Result<(Vec<f64>, f64)> {
    let n = y.len();
    let m = columns.len();
    if m == 0 || n < m || columns.iter().any(|c| c.len() != n) {
        return invalid("least_squares needs at least as many points as columns");
    }
    let a = DMatrix::from_fn(n, m, |i, j| columns[j][i]);
    let b = DVector::from_column_slice(y);
    let svd = a.clone().svd(true, true);
    let coef = svd.solve(&b, 1e-14).map_err(|e| crate::Error::Domain(e.to_string()))?;
    let resid = &a * &coef - &b;
    Ok((coef.iter().copied().collect(), resid.norm_squared()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerFit {
    /// coefficient of the linear term (zero for pure power fits)
    pub linear: f64,
    pub amplitude: f64,
    pub exponent: f64,
    pub constant: f64,
    pub sse: f64,
}

fn fit_at_exponent(x: &[f64], y: &[f64], p: f64, with_linear: bool) -> Result<PowerFit> {
    let pow: Vec<f64> = x.iter().map(|v| v.powf(p)).collect();
    let ones = vec![1.0; x.len()];
    if with_linear {
        let (c, sse) = least_squares(&[x.to_vec(), pow, ones], y)?;
        Ok(PowerFit { linear: c[0], amplitude: c[1], exponent: p, constant: c[2], sse })
    } else {
        let (c, sse) = least_squares(&[pow, ones], y)?;
        Ok(PowerFit { linear: 0.0, amplitude: c[0], exponent: p, constant: c[1], sse })
    }
}

fn scan_exponent(x: &[f64], y: &[f64], p_min: f64, p_max: f64, with_linear: bool) -> Result<PowerFit> {
    if !(p_min < p_max) {
        return invalid("empty exponent range");
    }
    let steps = 400;
    let mut best: Option<PowerFit> = None;
    for i in 0..=steps {
        let p = p_min + (p_max - p_min) * i as f64 / steps as f64;
        if p.abs() < 1e-9 {
            continue;
        }
        let f = fit_at_exponent(x, y, p, with_linear)?;
        if best.map_or(true, |b| f.sse < b.sse) {
            best = Some(f);
        }
    }
    let mut best = best.expect("non-empty scan");
    // golden-section refinement around the best grid point
    let h = (p_max - p_min) / steps as f64;
    let (mut a, mut b) = ((best.exponent - h).max(p_min), (best.exponent + h).min(p_max));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        let fc = fit_at_exponent(x, y, c, with_linear)?;
        let fd = fit_at_exponent(x, y, d, with_linear)?;
        if fc.sse < fd.sse {
            b = d;
            if fc.sse < best.sse {
                best = fc;
            }
        } else {
            a = c;
            if fd.sse < best.sse {
                best = fd;
            }
        }
    }
    Ok(best)
}

/// y ≈ c·x^p + e.
pub fn power_plus_constant_fit(x: &[f64], y: &[f64], p_min: f64, p_max: f64) -> Result<PowerFit> {
    if x.len() < 3 {
        return invalid("power fit needs at least three points");
    }
    scan_exponent(x, y, p_min, p_max, false)
}

/// y ≈ σ·x + c·x^p + e.
pub fn linear_plus_power_fit(x: &[f64], y: &[f64], p_min: f64, p_max: f64) -> Result<PowerFit> {
    if x.len() < 4 {
        return invalid("linear-plus-power fit needs at least four points");
    }
    scan_exponent(x, y, p_min, p_max, true)
}

/// Pairwise summation, independent of how the input was produced.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}
