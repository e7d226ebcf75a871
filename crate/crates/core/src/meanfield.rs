//! Bulk mean-field action of the r-bit model, its saddle points and the
//! Landau-Ginzburg coefficients near the critical point.

use serde::{Deserialize, Serialize};

use crate::constants::{CRITICAL_BAND, SADDLE_MAX_NEWTON, SADDLE_RESIDUAL_TOL};
use crate::couplings::{effective_interaction, CouplingForm, CouplingSpec};
use crate::error::{invalid, Error, Result};

/// Γ_c = 1/9.
pub const GAMMA_C: f64 = 1.0 / 9.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldParams {
    pub spec: CouplingSpec,
    /// measurement rate γ
    pub gamma: f64,
    /// Γ = γ/Ĵ_0
    pub big_gamma: f64,
    /// 𝒥 = (27/16) Σ_s 𝒥(s) = 27/(16 Ĵ_0)
    pub jcal: f64,
}

impl MeanFieldParams {
    pub fn new(spec: CouplingSpec, gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return invalid(format!("measurement rate must be non-negative, got {gamma}"));
        }
        let j0 = spec.j_hat_0()?;
        Ok(MeanFieldParams { spec, gamma, big_gamma: gamma / j0, jcal: 27.0 / (16.0 * j0) })
    }

    /// Same as `new`, but 𝒥 is taken from the numerically inverted interaction.
    pub fn from_inverted(spec: CouplingSpec, gamma: f64) -> Result<Self> {
        let mut p = Self::new(spec, gamma)?;
        p.jcal = 27.0 / 16.0 * effective_interaction(&spec)?.total();
        Ok(p)
    }

    pub fn with_big_gamma(spec: CouplingSpec, big_gamma: f64) -> Result<Self> {
        let j0 = spec.j_hat_0()?;
        Self::new(spec, big_gamma * j0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeanFieldPhase {
    Symmetric,
    Broken,
    Critical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldPoint {
    /// φ ≥ 0; the partner saddle is (-φ, Θ)
    pub phi: f64,
    pub theta: f64,
    pub phase: MeanFieldPhase,
    pub residual: f64,
}

impl MeanFieldPoint {
    pub fn partner(&self) -> (f64, f64) {
        (-self.phi, self.theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LgCoefficients {
    pub beta: f64,
    pub b: f64,
    pub delta: f64,
    pub quartic: f64,
}

/// I_MF per (N·T·L) = 𝒥(φ² - 3Θ²) - 9(Γ + 1/9)Θ - ½√(φ² + Θ²).
pub fn bulk_action(phi: f64, theta: f64, params: &MeanFieldParams) -> f64 {
    let j = params.jcal;
    j * (phi * phi - 3.0 * theta * theta) - 9.0 * (params.big_gamma + GAMMA_C) * theta - 0.5 * phi.hypot(theta)
}

pub fn bulk_gradient(phi: f64, theta: f64, params: &MeanFieldParams) -> [f64; 2] {
    let j = params.jcal;
    let r = phi.hypot(theta);
    [2.0 * j * phi - 0.5 * phi / r, -6.0 * j * theta - 9.0 * (params.big_gamma + GAMMA_C) - 0.5 * theta / r]
}

fn bulk_hessian(phi: f64, theta: f64, params: &MeanFieldParams) -> [[f64; 2]; 2] {
    let j = params.jcal;
    let r3 = phi.hypot(theta).powi(3);
    let off = 0.5 * phi * theta / r3;
    [[2.0 * j - 0.5 * theta * theta / r3, off], [off, -6.0 * j - 0.5 * phi * phi / r3]]
}

/// Θ* = -3(Γ_c + 2Γ)/(4𝒥).
pub fn symmetric_theta(params: &MeanFieldParams) -> f64 {
    -3.0 * (GAMMA_C + 2.0 * params.big_gamma) / (4.0 * params.jcal)
}

/// Θ* = -9(Γ_c + Γ)/(8𝒥) and φ*² = (1 - 9Γ)(3 + 9Γ)/(64𝒥²).
pub fn broken_guess(params: &MeanFieldParams) -> (f64, f64) {
    let g9 = 9.0 * params.big_gamma;
    let j = params.jcal;
    let phi2 = (1.0 - g9) * (3.0 + g9) / (64.0 * j * j);
    (phi2.max(0.0).sqrt(), -9.0 * (GAMMA_C + params.big_gamma) / (8.0 * j))
}

fn newton(mut x: [f64; 2], params: &MeanFieldParams) -> Result<([f64; 2], f64)> {
    let norm = |g: [f64; 2]| g[0].hypot(g[1]);
    let mut res = norm(bulk_gradient(x[0], x[1], params));
    for _ in 0..SADDLE_MAX_NEWTON {
        if res < 0.01 * SADDLE_RESIDUAL_TOL {
            break;
        }
        let g = bulk_gradient(x[0], x[1], params);
        let h = bulk_hessian(x[0], x[1], params);
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dx = [(h[1][1] * g[0] - h[0][1] * g[1]) / det, (h[0][0] * g[1] - h[1][0] * g[0]) / det];
        // damped step: halve until the residual drops
        let mut step = 1.0;
        loop {
            let trial = [x[0] - step * dx[0], x[1] - step * dx[1]];
            let r = norm(bulk_gradient(trial[0], trial[1], params));
            if r < res || step < 1e-6 {
                x = trial;
                res = r;
                break;
            }
            step *= 0.5;
        }
    }
    if res < SADDLE_RESIDUAL_TOL {
        Ok((x, res))
    } else {
        Err(Error::NonConvergence { iterations: SADDLE_MAX_NEWTON, residual: res })
    }
}

pub fn solve_saddle(params: &MeanFieldParams) -> Result<MeanFieldPoint> {
    if !(params.jcal > 0.0 && params.jcal.is_finite()) {
        return invalid("𝒥 must be positive and finite");
    }
    let d = params.big_gamma - GAMMA_C;
    if d.abs() <= CRITICAL_BAND {
        let theta = symmetric_theta(params);
        let res = bulk_gradient(0.0, theta, params);
        return Ok(MeanFieldPoint { phi: 0.0, theta, phase: MeanFieldPhase::Critical, residual: res[0].hypot(res[1]) });
    }
    if d > 0.0 {
        let (x, residual) = newton([0.0, symmetric_theta(params)], params)?;
        Ok(MeanFieldPoint { phi: 0.0, theta: x[1], phase: MeanFieldPhase::Symmetric, residual })
    } else {
        let (phi, theta) = broken_guess(params);
        let (x, residual) = newton([phi, theta], params)?;
        Ok(MeanFieldPoint { phi: x[0].abs(), theta: x[1], phase: MeanFieldPhase::Broken, residual })
    }
}

/// γ_c = Ĵ_0/9 = (J/9)(1 + 2gζ(2α)).
pub fn gamma_c(spec: &CouplingSpec) -> Result<f64> {
    if spec.form == CouplingForm::PowerLaw && spec.alpha <= 0.5 {
        return Err(Error::Divergent { two_alpha: 2.0 * spec.alpha });
    }
    Ok(spec.j_hat_0()? * GAMMA_C)
}

/// β, b and δ of the near-critical action at the symmetric saddle.
///
/// δ uses the uniform 𝒥 so that it vanishes exactly at Γ_c.
pub fn lg_coefficients(params: &MeanFieldParams, mu: f64) -> LgCoefficients {
    let th = symmetric_theta(params).abs();
    let th3 = th.powi(3);
    let pref = 27.0 * params.spec.j / 16.0;
    let e = (-mu).exp();
    let beta = 4.0 * th3 * pref * e * e * (1.0 - e) / (1.0 + e).powi(3);
    let b = 4.0 * th3 * pref;
    let delta = 8.0 * th3 * (1.0 / (4.0 * th) - params.jcal);
    LgCoefficients { beta, b, delta, quartic: 0.25 }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RbitBoundary {
    TraceClosure,
    FixedStates { initial: [f64; 2], fin: [f64; 2] },
}

/// ln 𝒦 for the time-ordered product of exp[(φσˣ + Θσᶻ)dt/2] over piecewise-constant fields.
///
/// `phi_of_t[i]` and `theta_of_t[i]` hold the fields on the i-th of n equal intervals of [0, T].
/// The identity-channel factor e^{BT/2} is not included.
pub fn rbit_log_propagator(phi_of_t: &[f64], theta_of_t: &[f64], t_total: f64, boundary: &RbitBoundary) -> Result<f64> {
    let n = phi_of_t.len();
    if n == 0 || theta_of_t.len() != n || !(t_total > 0.0) {
        return invalid("rbit_log_propagator needs matching non-empty samples and T > 0");
    }
    let dt = t_total / n as f64;
    let fmax = phi_of_t.iter().chain(theta_of_t).fold(0.0f64, |m, v| m.max(v.abs()));
    if fmax > 0.0 && dt > 0.01 / fmax * (1.0 + 1e-12) {
        return invalid(format!("time step {dt} exceeds 0.01/max|field| = {}", 0.01 / fmax));
    }
    let mut m = [[1.0, 0.0], [0.0, 1.0]];
    let mut log_scale = 0.0;
    for (p, t) in phi_of_t.iter().zip(theta_of_t) {
        let a = 0.5 * dt * p.hypot(*t);
        let (c, s) = if a == 0.0 { (1.0, 1.0) } else { (a.cosh(), a.sinh() / a) };
        let h = 0.5 * dt;
        let e = [[c + s * h * t, s * h * p], [s * h * p, c - s * h * t]];
        m = [
            [e[0][0] * m[0][0] + e[0][1] * m[1][0], e[0][0] * m[0][1] + e[0][1] * m[1][1]],
            [e[1][0] * m[0][0] + e[1][1] * m[1][0], e[1][0] * m[0][1] + e[1][1] * m[1][1]],
        ];
        let scale = m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        for row in m.iter_mut() {
            for v in row.iter_mut() {
                *v /= scale;
            }
        }
        log_scale += scale.ln();
    }
    let amp = match boundary {
        RbitBoundary::TraceClosure => m[0][0] + m[1][1],
        RbitBoundary::FixedStates { initial, fin } => {
            let v = [m[0][0] * initial[0] + m[0][1] * initial[1], m[1][0] * initial[0] + m[1][1] * initial[1]];
            fin[0] * v[0] + fin[1] * v[1]
        }
    };
    if !(amp > 0.0) {
        return Err(Error::Domain(format!("propagator amplitude {amp} is not positive")));
    }
    Ok(log_scale + amp.ln())
}
