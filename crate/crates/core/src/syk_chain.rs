//! Large-N saddle of the monitored Brownian SYK chain: the λ equation, the
//! saddle Green function, Goldstone stiffness and transition order.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{LAMBDA_RESIDUAL_TOL, LAMBDA_SCAN_POINTS};
use crate::couplings::epsilon_k;
use crate::entropy_code::{critical_exponents, EntropyForm, Phase};
use crate::error::{invalid, Error, Result};
use crate::specfun::riemann_zeta;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SykParams {
    pub j: f64,
    pub u: f64,
    pub q: u32,
    pub gamma: f64,
    pub alpha: f64,
    /// measurement strength √(γΔt), bookkeeping only
    pub s: f64,
    j_hat: f64,
}

impl SykParams {
    pub fn new(j: f64, u: f64, q: u32, gamma: f64, alpha: f64) -> Result<Self> {
        if !(j > 0.0) || !(u >= 0.0) || !(gamma >= 0.0) {
            return invalid("SYK parameters need J > 0, U >= 0, gamma >= 0");
        }
        if q < 2 || q % 2 != 0 {
            return invalid(format!("q must be an even integer >= 2, got {q}"));
        }
        if !(alpha > 0.5) {
            return Err(Error::Divergent { two_alpha: 2.0 * alpha });
        }
        let z = if alpha.is_infinite() { 1.0 } else { riemann_zeta(2.0 * alpha)? };
        Ok(SykParams { j, u, q, gamma, alpha, s: 0.0, j_hat: j * z })
    }

    /// Parameters with J = 1 and α → ∞ (Ĵ = 1), set by γ̃ and Ũ directly.
    pub fn reduced(gamma_tilde: f64, u_tilde: f64, q: u32) -> Result<Self> {
        Self::new(1.0, u_tilde, q, gamma_tilde, f64::INFINITY)
    }

    pub fn with_gamma_tilde(&self, gamma_tilde: f64) -> Self {
        SykParams { gamma: gamma_tilde * self.j_hat, ..*self }
    }

    /// Ĵ = Jζ(2α)
    pub fn j_hat(&self) -> f64 {
        self.j_hat
    }

    pub fn gamma_tilde(&self) -> f64 {
        self.gamma / self.j_hat
    }

    pub fn u_tilde(&self) -> f64 {
        self.u / self.j_hat
    }
}

/// (1-λ²)(1+Ũλ^{q-2})² - γ̃²
pub fn lambda_residual(lambda: f64, u_tilde: f64, gamma_tilde: f64, q: u32) -> f64 {
    let w = 1.0 + u_tilde * lambda.powi(q as i32 - 2);
    (1.0 - lambda * lambda) * w * w - gamma_tilde * gamma_tilde
}

fn lambda_residual_derivative(lambda: f64, u_tilde: f64, q: u32) -> f64 {
    let qm = q as i32 - 2;
    let w = 1.0 + u_tilde * lambda.powi(qm);
    let dw = if qm == 0 { 0.0 } else { u_tilde * qm as f64 * lambda.powi(qm - 1) };
    -2.0 * lambda * w * w + (1.0 - lambda * lambda) * 2.0 * w * dw
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaSolution {
    /// physical root: 0 for γ̃ ≥ 1, otherwise the largest root
    pub lambda: f64,
    /// every real root in (0, 1]
    pub roots: Vec<f64>,
    pub multiple: bool,
    pub max_residual: f64,
}

fn roots_in_unit_interval(u: f64, g: f64, q: u32) -> Vec<f64> {
    let f = |x: f64| lambda_residual(x, u, g, q);
    let n = LAMBDA_SCAN_POINTS;
    let mut roots = Vec::new();
    let mut prev_x = 0.0;
    let mut prev_f = f(0.0);
    for i in 1..=n {
        let x = i as f64 / n as f64;
        let fx = f(x);
        if fx == 0.0 {
            roots.push(x);
        } else if prev_f != 0.0 && prev_f.signum() != fx.signum() {
            let (mut lo, mut hi, mut flo) = (prev_x, x, prev_f);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if fm == 0.0 || hi - lo < 1e-15 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            let mut r = 0.5 * (lo + hi);
            for _ in 0..4 {
                let d = lambda_residual_derivative(r, u, q);
                if d == 0.0 {
                    break;
                }
                let next = r - f(r) / d;
                if (prev_x..=x).contains(&next) && f(next).abs() <= f(r).abs() {
                    r = next;
                } else {
                    break;
                }
            }
            roots.push(r);
        }
        prev_x = x;
        prev_f = fx;
    }
    roots.retain(|&r| r > 0.0);
    roots
}

pub fn solve_lambda(p: &SykParams) -> Result<LambdaSolution> {
    let (u, g) = (p.u_tilde(), p.gamma_tilde());
    let roots = if g == 0.0 { vec![1.0] } else { roots_in_unit_interval(u, g, p.q) };
    let max_residual = roots.iter().map(|&r| lambda_residual(r, u, g, p.q).abs()).fold(0.0, f64::max);
    if max_residual > LAMBDA_RESIDUAL_TOL {
        return Err(Error::NonConvergence { iterations: LAMBDA_SCAN_POINTS, residual: max_residual });
    }
    let lambda = if g >= 1.0 { 0.0 } else { roots.iter().copied().fold(0.0, f64::max) };
    Ok(LambdaSolution { lambda, multiple: roots.len() > 1, roots, max_residual })
}

/// Number of roots in (0, 1] just above the transition, at γ̃ = 1 + 1e-6.
pub fn root_multiplicity_near_transition(u_tilde: f64, q: u32) -> usize {
    roots_in_unit_interval(u_tilde, 1.0 + 1e-6, q).len()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TransitionOrder {
    First,
    Second,
    Tricritical,
}

/// Order of the transition at γ̃ = 1.
pub fn transition_order(p: &SykParams) -> TransitionOrder {
    let u = p.u_tilde();
    match p.q {
        2 => TransitionOrder::Second,
        4 => {
            let d = 2.0 * u - 1.0;
            if d == 0.0 {
                TransitionOrder::Tricritical
            } else if d > 0.0 {
                TransitionOrder::First
            } else {
                TransitionOrder::Second
            }
        }
        _ => {
            if root_multiplicity_near_transition(u, p.q) > 0 {
                TransitionOrder::First
            } else {
                TransitionOrder::Second
            }
        }
    }
}

/// 4×4 Green function, contour index ⊗ chain index.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddleGreen {
    pub lambda: f64,
    pub decay_rate: f64,
    pub matrix: [[Complex64; 4]; 4],
}

type M2 = [[Complex64; 2]; 2];

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

const I2: M2 = [[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]];
const SZ: M2 = [[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)], [Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)]];
/// iσʸ
const ISY: M2 = [[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)], [Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0)]];
const TY: M2 = [[Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0)], [Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)]];

fn kron(a: &M2, b: &M2) -> [[Complex64; 4]; 4] {
    let mut out = [[c(0.0); 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

fn combine(terms: &[(f64, [[Complex64; 4]; 4])]) -> [[Complex64; 4]; 4] {
    let mut out = [[c(0.0); 4]; 4];
    for (w, m) in terms {
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] += m[i][j] * *w;
            }
        }
    }
    out
}

fn matmul4(a: &[[Complex64; 4]; 4], b: &[[Complex64; 4]; 4]) -> [[Complex64; 4]; 4] {
    let mut out = [[c(0.0); 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            for j in 0..4 {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

fn sgn(t: f64) -> f64 {
    if t > 0.0 {
        1.0
    } else if t < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Decay rate a and the weights (λ, c) of G = e^{-a|t|}·½[sgn σᶻ - λ iσʸ + c τʸ].
fn green_parts(p: &SykParams, lambda: f64) -> (f64, f64, f64) {
    if p.gamma_tilde() >= 1.0 {
        (p.gamma / 2.0, 0.0, 1.0)
    } else {
        let w = p.j_hat() + p.u * lambda.powi(p.q as i32 - 2);
        (w / 2.0, lambda, p.gamma / w)
    }
}

pub fn saddle_green(p: &SykParams, t12: f64) -> Result<SaddleGreen> {
    let lambda = solve_lambda(p)?.lambda;
    let (a, lam, cy) = green_parts(p, lambda);
    let e = (-a * t12.abs()).exp() * 0.5;
    let m = combine(&[(e * sgn(t12), kron(&SZ, &I2)), (-e * lam, kron(&ISY, &I2)), (e * cy, kron(&I2, &TY))]);
    Ok(SaddleGreen { lambda, decay_rate: a, matrix: m })
}

/// max over the sampled t ≠ 0 of |(σᶻ∂_t - Σ)G(t)|, with Σ = -λa·iσʸ - (γ/2)τʸ.
pub fn schwinger_dyson_residual(p: &SykParams, times: &[f64]) -> Result<f64> {
    let lambda = solve_lambda(p)?.lambda;
    let (a, lam, _) = green_parts(p, lambda);
    let mut worst = 0.0f64;
    for &t in times {
        if t == 0.0 {
            continue;
        }
        let g = saddle_green(p, t)?.matrix;
        let op = combine(&[(-a * sgn(t), kron(&SZ, &I2)), (lam * a, kron(&ISY, &I2)), (p.gamma / 2.0, kron(&I2, &TY))]);
        let r = matmul4(&op, &g);
        let scale = (-a * t.abs()).exp().max(1e-300);
        for row in r.iter() {
            for v in row {
                worst = worst.max(v.norm() / scale);
            }
        }
    }
    Ok(worst)
}

/// ρ = Ĵ(1 - γ̃²), zero for γ̃ ≥ 1; defined for U = 0.
pub fn stiffness(p: &SykParams) -> Result<f64> {
    if p.u != 0.0 {
        return invalid("stiffness is defined on the U = 0 branch");
    }
    let g = p.gamma_tilde();
    Ok(if g >= 1.0 { 0.0 } else { p.j_hat() * (1.0 - g * g) })
}

/// (ρ/2)(Ω²/γ² + 1 - ε_k)
pub fn goldstone_action_quadratic(p: &SykParams, k: f64, omega: f64) -> Result<f64> {
    if !(p.gamma > 0.0) {
        return invalid("Goldstone action needs gamma > 0");
    }
    let rho = stiffness(p)?;
    if rho == 0.0 {
        return Ok(0.0);
    }
    let hop = if p.alpha.is_infinite() { k.cos() } else { epsilon_k(p.alpha, k)? };
    Ok(0.5 * rho * (omega * omega / (p.gamma * p.gamma) + 1.0 - hop))
}

/// Free-fermion entanglement form: log A or A^{3/2-α} when broken,
/// A^{2-2α} (α < 1) or bounded when symmetric.
pub fn free_fermion_entropy_scaling(alpha: f64, phase: Phase) -> Result<EntropyForm> {
    if !(alpha > 0.5) {
        return Err(Error::Domain(format!("alpha must exceed 1/2, got {alpha}")));
    }
    Ok(match phase {
        Phase::Broken if alpha >= 1.5 => EntropyForm::Log,
        Phase::Broken => EntropyForm::Power { exponent: 1.0 - critical_exponents(alpha)?.z },
        Phase::Symmetric if alpha < 1.0 => EntropyForm::Power { exponent: 2.0 - 2.0 * alpha },
        Phase::Symmetric => EntropyForm::Bounded,
    })
}
