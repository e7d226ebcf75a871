//! Landau-Ginzburg field on an L×T space-time lattice with a long-range spatial
//! kernel and SWAP-pinned boundary slices.
//!
//! The action is
//! S = Σ_r dr { Σ_links (Δ_tφ)²/(2dt) + Σ_t dt [ β(Δ_rφ)²/(2dr²) - δφ²/2 + qφ⁴ - b dr φ_r (K∗φ)_r ] }
//!     + pins,
//! with K(q) = 1/|q dr|^{2α} at minimum-image distance and K(0) = 0.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::constants::{LATTICE_GRAD_TOL, PIN_PREFACTOR};
use crate::error::{invalid, Error, Result};
use crate::fit::linear_fit;
use crate::meanfield::LgCoefficients;
use crate::specfun::hurwitz_zeta;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SwapRegion {
    /// no boundary wells at all
    Unpinned,
    /// top slice pinned positive on [start, start+len), negative elsewhere;
    /// len = 0 is the reference boundary
    Interval { start: usize, len: usize },
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundarySpec {
    pub swap_region: SwapRegion,
    pub pin_strength: f64,
}

impl BoundarySpec {
    pub fn with_default_pin(swap_region: SwapRegion, delta: f64) -> Self {
        BoundarySpec { swap_region, pin_strength: PIN_PREFACTOR * delta.abs().sqrt() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    /// 1/d^{2α} at ring distance d = min(q, L - q)
    MinimumImage,
    /// Σ_n 1/|q + nL|^{2α}, so every row sums to the infinite-chain value
    PeriodicImages,
}

fn build_kernel(l: usize, dr: f64, alpha: f64, kind: KernelKind) -> Result<Vec<f64>> {
    let s = 2.0 * alpha;
    (0..l)
        .map(|q| {
            if q == 0 {
                return Ok(0.0);
            }
            match kind {
                KernelKind::MinimumImage => Ok((q.min(l - q) as f64 * dr).powf(-s)),
                KernelKind::PeriodicImages => {
                    let x = q as f64 / l as f64;
                    Ok((hurwitz_zeta(s, x)? + hurwitz_zeta(s, 1.0 - x)?) * (l as f64 * dr).powf(-s))
                }
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatticeConfig {
    pub l: usize,
    pub t_steps: usize,
    pub dr: f64,
    pub dt: f64,
    pub coeffs: LgCoefficients,
    pub alpha: f64,
    pub kernel_kind: KernelKind,
    /// K(q) for q = 0..L, K(0) = 0
    pub kernel: Vec<f64>,
    pub boundary: BoundarySpec,
    pub grad_tol: f64,
    pub max_iter: usize,
    /// pin strengths tried in turn, as fractions of `boundary.pin_strength`
    pub pin_schedule: Vec<f64>,
}

impl LatticeConfig {
    pub fn new(l: usize, t_steps: usize, dt: f64, coeffs: LgCoefficients, alpha: f64, boundary: BoundarySpec) -> Result<Self> {
        let dr = 1.0;
        let kernel = if coeffs.b == 0.0 || !(alpha > 0.5) {
            (0..l).map(|q| if q == 0 { 0.0 } else { (q.min(l - q) as f64).powf(-2.0 * alpha) }).collect()
        } else {
            build_kernel(l, dr, alpha, KernelKind::MinimumImage)?
        };
        let c = LatticeConfig {
            l,
            t_steps,
            dr,
            dt,
            coeffs,
            alpha,
            kernel_kind: KernelKind::MinimumImage,
            kernel,
            boundary,
            grad_tol: LATTICE_GRAD_TOL * (l * t_steps) as f64,
            max_iter: 200_000,
            pin_schedule: vec![0.2, 1.0],
        };
        c.validate()?;
        Ok(c)
    }

    /// Chooses dt so that T_steps·dt = `t_phys`.
    pub fn with_extent(l: usize, t_steps: usize, t_phys: f64, coeffs: LgCoefficients, alpha: f64, region: SwapRegion) -> Result<Self> {
        let boundary = BoundarySpec::with_default_pin(region, coeffs.delta);
        Self::new(l, t_steps, t_phys / t_steps as f64, coeffs, alpha, boundary)
    }

    pub fn validate(&self) -> Result<()> {
        if self.l < 2 || self.t_steps < 3 {
            return invalid("lattice needs L >= 2 and T_steps >= 3");
        }
        if !(self.dt > 0.0) || !(self.dr > 0.0) {
            return invalid("lattice spacings must be positive");
        }
        if self.coeffs.b != 0.0 && !(self.alpha > 0.5) {
            return Err(Error::Divergent { two_alpha: 2.0 * self.alpha });
        }
        if !(self.coeffs.quartic > 0.0) || !(self.coeffs.beta >= 0.0) {
            return invalid("quartic coupling must be positive and beta non-negative");
        }
        if self.kernel.len() != self.l {
            return invalid("kernel length must equal L");
        }
        if let SwapRegion::Interval { start, len } = self.boundary.swap_region {
            if start >= self.l || len > self.l {
                return invalid("swap interval outside the chain");
            }
        }
        Ok(())
    }

    pub fn with_kernel(mut self, kind: KernelKind) -> Result<Self> {
        if !(self.alpha > 0.5) {
            return Err(Error::Divergent { two_alpha: 2.0 * self.alpha });
        }
        self.kernel = build_kernel(self.l, self.dr, self.alpha, kind)?;
        self.kernel_kind = kind;
        Ok(self)
    }

    pub fn with_region(&self, region: SwapRegion) -> Self {
        let mut c = self.clone();
        c.boundary.swap_region = region;
        c
    }

    pub fn t_phys(&self) -> f64 {
        self.t_steps as f64 * self.dt
    }

    pub fn kernel_sum(&self) -> f64 {
        self.kernel.iter().sum()
    }

    /// δ shifted by the uniform long-range field, δ + 2b·dr·Σ_q K(q).
    pub fn delta_eff(&self) -> f64 {
        self.coeffs.delta + 2.0 * self.coeffs.b * self.dr * self.kernel_sum()
    }

    /// Uniform saddle value √(δ_eff / 4q) (zero in the symmetric phase).
    pub fn vacuum(&self) -> f64 {
        (self.delta_eff().max(0.0) / (4.0 * self.coeffs.quartic)).sqrt()
    }

    /// Magnitude of the boundary pin target.
    pub fn pin_target(&self) -> f64 {
        (self.delta_eff().abs() / (4.0 * self.coeffs.quartic)).sqrt()
    }

    fn idx(&self, r: usize, t: usize) -> usize {
        r * self.t_steps + t
    }

    fn in_region(&self, r: usize) -> bool {
        match self.boundary.swap_region {
            SwapRegion::Unpinned => false,
            SwapRegion::Full => true,
            SwapRegion::Interval { start, len } => (r + self.l - start) % self.l < len,
        }
    }

    /// (bottom, top) pin targets for column r, or None when unpinned.
    fn pins(&self, r: usize) -> Option<(f64, f64)> {
        if self.boundary.swap_region == SwapRegion::Unpinned {
            return None;
        }
        let p = self.pin_target();
        Some((-p, if self.in_region(r) { p } else { -p }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InitGuess {
    Uniform(f64),
    /// tanh kink centred at physical time t0
    KinkGuess(f64),
    SwapGuess,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldSolution {
    /// index r·T_steps + t
    pub field: Vec<f64>,
    pub l: usize,
    pub t_steps: usize,
    pub action: f64,
    pub grad_norm: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl FieldSolution {
    pub fn at(&self, r: usize, t: usize) -> f64 {
        self.field[r * self.t_steps + t]
    }

    pub fn column(&self, r: usize) -> &[f64] {
        &self.field[r * self.t_steps..(r + 1) * self.t_steps]
    }
}

struct LongRange {
    khat: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl LongRange {
    fn new(config: &LatticeConfig) -> Option<Self> {
        if config.coeffs.b == 0.0 {
            return None;
        }
        let l = config.l;
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(l);
        let inv = planner.plan_fft_inverse(l);
        let mut buf: Vec<Complex64> = config.kernel.iter().map(|&k| Complex64::new(k, 0.0)).collect();
        fwd.process(&mut buf);
        let khat = buf.iter().map(|c| c.re / l as f64).collect();
        Some(LongRange { khat, fwd, inv })
    }

    /// (K∗φ)_r for every slice, same layout as the field.
    fn convolve(&self, config: &LatticeConfig, field: &[f64], out: &mut [f64]) {
        let (l, nt) = (config.l, config.t_steps);
        let mut buf = vec![Complex64::new(0.0, 0.0); l];
        let mut t = 0;
        while t < nt {
            let pair = t + 1 < nt;
            for r in 0..l {
                let im = if pair { field[r * nt + t + 1] } else { 0.0 };
                buf[r] = Complex64::new(field[r * nt + t], im);
            }
            self.fwd.process(&mut buf);
            for (b, k) in buf.iter_mut().zip(&self.khat) {
                *b *= *k;
            }
            self.inv.process(&mut buf);
            for r in 0..l {
                out[r * nt + t] = buf[r].re;
                if pair {
                    out[r * nt + t + 1] = buf[r].im;
                }
            }
            t += 2;
        }
    }
}

struct Evaluator<'a> {
    config: &'a LatticeConfig,
    long_range: Option<LongRange>,
    conv: Vec<f64>,
    pin_scale: f64,
}

impl<'a> Evaluator<'a> {
    fn new(config: &'a LatticeConfig) -> Self {
        Evaluator { config, long_range: LongRange::new(config), conv: vec![0.0; config.l * config.t_steps], pin_scale: 1.0 }
    }

    /// Action and, if requested, its gradient.
    fn eval(&mut self, field: &[f64], grad: Option<&mut [f64]>) -> f64 {
        let c = self.config;
        let (l, nt, dr, dt) = (c.l, c.t_steps, c.dr, c.dt);
        let LgCoefficients { beta, b, delta, quartic } = c.coeffs;
        if let Some(lr) = &self.long_range {
            lr.convolve(c, field, &mut self.conv);
        }
        let h = c.boundary.pin_strength * self.pin_scale;
        let kt = dr / dt;
        let kr = dt * beta / dr;
        let site = dr * dt;
        let lr_w = b * dr * dr * dt;
        let has_lr = self.long_range.is_some();
        let pinned = c.boundary.swap_region != SwapRegion::Unpinned;
        let mut total = 0.0;
        let mut g = grad;
        for r in 0..l {
            let rn = (r + 1) % l;
            let rp = (r + l - 1) % l;
            let pins = c.pins(r);
            let mut col = 0.0;
            for t in 0..nt {
                let i = c.idx(r, t);
                let p = field[i];
                let p2 = p * p;
                // trapezoid weight on pinned end slices
                let w = if pinned && (t == 0 || t == nt - 1) { 0.5 } else { 1.0 };
                let mut s = w * site * (-0.5 * delta * p2 + quartic * p2 * p2);
                let mut d = w * site * (-delta * p + 4.0 * quartic * p2 * p);
                if t + 1 < nt {
                    let diff = field[i + 1] - p;
                    s += 0.5 * kt * diff * diff;
                    d -= kt * diff;
                }
                if t > 0 {
                    d += kt * (p - field[i - 1]);
                }
                let right = field[c.idx(rn, t)];
                let left = field[c.idx(rp, t)];
                let diff = right - p;
                s += 0.5 * w * kr * diff * diff;
                d += w * kr * (2.0 * p - right - left);
                if has_lr {
                    let k = self.conv[i];
                    s -= w * lr_w * p * k;
                    d -= 2.0 * w * lr_w * k;
                }
                if let Some((bot, top)) = pins {
                    let target = if t == 0 {
                        Some(bot)
                    } else if t == nt - 1 {
                        Some(top)
                    } else {
                        None
                    };
                    if let Some(tg) = target {
                        let e = p - tg;
                        s += 0.5 * dr * h * e * e;
                        d += dr * h * e;
                    }
                }
                col += s;
                if let Some(g) = g.as_deref_mut() {
                    g[i] = d;
                }
            }
            total += col;
        }
        total
    }

    fn diag(&self) -> Vec<f64> {
        let c = self.config;
        let (dr, dt) = (c.dr, c.dt);
        let base = 2.0 * dr / dt + 2.0 * dt * c.coeffs.beta / dr + dr * dt * 2.0 * c.coeffs.delta.abs();
        let h = c.boundary.pin_strength * self.pin_scale;
        let mut d = vec![base; c.l * c.t_steps];
        if c.boundary.swap_region != SwapRegion::Unpinned {
            for r in 0..c.l {
                d[c.idx(r, 0)] += dr * h - dr / dt;
                d[c.idx(r, c.t_steps - 1)] += dr * h - dr / dt;
            }
        }
        d
    }
}

pub fn lattice_action(field: &[f64], config: &LatticeConfig) -> Result<f64> {
    check_len(field, config)?;
    Ok(Evaluator::new(config).eval(field, None))
}

pub fn lattice_gradient(field: &[f64], config: &LatticeConfig) -> Result<Vec<f64>> {
    check_len(field, config)?;
    let mut g = vec![0.0; field.len()];
    Evaluator::new(config).eval(field, Some(&mut g));
    Ok(g)
}

fn check_len(field: &[f64], config: &LatticeConfig) -> Result<()> {
    if field.len() != config.l * config.t_steps {
        return invalid(format!("field has {} entries, expected {}", field.len(), config.l * config.t_steps));
    }
    Ok(())
}

pub fn initial_field(config: &LatticeConfig, init: InitGuess) -> Vec<f64> {
    let (l, nt, dt) = (config.l, config.t_steps, config.dt);
    let de = config.delta_eff();
    let v = config.pin_target();
    let mut f = vec![0.0; l * nt];
    let time = |t: usize| (t as f64 + 0.5) * dt;
    match init {
        InitGuess::Uniform(sign) => f.iter_mut().for_each(|x| *x = sign.signum() * v),
        InitGuess::KinkGuess(t0) => {
            let k = (de.abs() / 2.0).sqrt();
            for r in 0..l {
                for t in 0..nt {
                    f[r * nt + t] = v * (k * (time(t) - t0)).tanh();
                }
            }
        }
        InitGuess::SwapGuess => {
            let tp = config.t_phys();
            if de > 0.0 {
                let w = (2.0 / de).sqrt();
                let t0 = tp - 2.0 * w;
                for r in 0..l {
                    let up = config.in_region(r) && config.boundary.swap_region != SwapRegion::Unpinned;
                    for t in 0..nt {
                        f[r * nt + t] = if up { v * ((time(t) - t0) / w).tanh() } else { -v };
                    }
                }
            } else {
                let xi = 1.0 / de.abs().max(1e-12).sqrt();
                for r in 0..l {
                    let top = match config.pins(r) {
                        Some((_, top)) => top,
                        None => 0.0,
                    };
                    for t in 0..nt {
                        let bottom = -v * (-time(t) / xi).exp();
                        let upper = top * (-(tp - time(t)) / xi).exp();
                        f[r * nt + t] = bottom + upper;
                    }
                }
            }
        }
    }
    f
}

/// Preconditioned Barzilai-Borwein descent with a nonmonotone Armijo test.
fn descend(ev: &mut Evaluator, x: &mut Vec<f64>, tol: f64, max_iter: usize) -> (f64, f64, usize, bool) {
    const MEMORY: usize = 10;
    let n = x.len();
    let diag = ev.diag();
    let mut g = vec![0.0; n];
    let mut f = ev.eval(x, Some(&mut g));
    let mut history = std::collections::VecDeque::with_capacity(MEMORY);
    history.push_back(f);
    let mut step = 1.0;
    let mut xt = vec![0.0; n];
    let mut gt = vec![0.0; n];
    let mut best = (f, norm(&g), x.clone());
    for it in 0..max_iter {
        let gn = norm(&g);
        if gn < tol {
            return (f, gn, it, true);
        }
        let fmax = history.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let slope: f64 = g.iter().zip(&diag).map(|(a, d)| -a * a / d).sum();
        let mut a = step;
        let mut accepted = false;
        for _ in 0..60 {
            for i in 0..n {
                xt[i] = x[i] - a * g[i] / diag[i];
            }
            let ft = ev.eval(&xt, Some(&mut gt));
            if ft.is_finite() && ft <= fmax + 1e-4 * a * slope {
                accepted = true;
                let (mut sy, mut ss) = (0.0, 0.0);
                for i in 0..n {
                    let s = xt[i] - x[i];
                    let y = gt[i] - g[i];
                    sy += s * y;
                    ss += s * s * diag[i];
                }
                step = if sy > 0.0 { (ss / sy).clamp(1e-6, 1e6) } else { 1.0 };
                std::mem::swap(x, &mut xt);
                std::mem::swap(&mut g, &mut gt);
                f = ft;
                break;
            }
            a *= 0.5;
        }
        if !accepted {
            let gn = norm(&g);
            return (f, gn, it, gn < tol);
        }
        if history.len() == MEMORY {
            history.pop_front();
        }
        history.push_back(f);
        let gn = norm(&g);
        if gn < best.1 {
            best = (f, gn, x.clone());
        }
    }
    let gn = norm(&g);
    if best.1 < gn {
        *x = best.2;
        return (best.0, best.1, max_iter, false);
    }
    (f, gn, max_iter, false)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Minimizes the action from `init`. Non-convergence is reported through
/// `converged = false` with the best field found.
pub fn minimize_field(config: &LatticeConfig, init: InitGuess) -> Result<FieldSolution> {
    config.validate()?;
    let mut x = initial_field(config, init);
    let mut ev = Evaluator::new(config);
    let mut iterations = 0;
    let mut out = (0.0, 0.0, false);
    let schedule = if config.boundary.swap_region == SwapRegion::Unpinned { vec![1.0] } else { config.pin_schedule.clone() };
    for (k, &scale) in schedule.iter().enumerate() {
        ev.pin_scale = scale;
        let last = k + 1 == schedule.len();
        let tol = if last { config.grad_tol } else { config.grad_tol * 100.0 };
        let (f, gn, it, ok) = descend(&mut ev, &mut x, tol, config.max_iter);
        iterations += it;
        out = (f, gn, ok);
    }
    if !out.0.is_finite() {
        return Err(Error::NonConvergence { iterations, residual: out.1 });
    }
    if !out.2 {
        log::warn!("lattice minimization stopped at |grad| = {:e} after {iterations} iterations", out.1);
    }
    Ok(FieldSolution { field: x, l: config.l, t_steps: config.t_steps, action: out.0, grad_norm: out.1, converged: out.2, iterations })
}

/// Minimizes with the reference boundary (top slice negative everywhere).
pub fn reference_solution(config: &LatticeConfig) -> Result<FieldSolution> {
    let c = config.with_region(SwapRegion::Interval { start: 0, len: 0 });
    minimize_field(&c, InitGuess::Uniform(-1.0))
}

pub fn swap_solution(config: &LatticeConfig, region: SwapRegion) -> Result<FieldSolution> {
    minimize_field(&config.with_region(region), InitGuess::SwapGuess)
}

fn require_converged(s: &FieldSolution) -> Result<()> {
    if s.converged {
        Ok(())
    } else {
        Err(Error::NonConvergence { iterations: s.iterations, residual: s.grad_norm })
    }
}

/// I_SWAP(A) - I_ref, the quasi-entropy per cluster member. A = [0, a).
pub fn quasi_entropy_numeric(config: &LatticeConfig, a: usize) -> Result<f64> {
    if a == 0 {
        return Ok(0.0);
    }
    let reference = reference_solution(config)?;
    require_converged(&reference)?;
    entropy_against(config, &reference, a)
}

fn entropy_against(config: &LatticeConfig, reference: &FieldSolution, a: usize) -> Result<f64> {
    if a == 0 {
        return Ok(0.0);
    }
    let region = if a >= config.l { SwapRegion::Full } else { SwapRegion::Interval { start: 0, len: a } };
    let s = swap_solution(config, region)?;
    require_converged(&s)?;
    log::debug!("A = {a}: I_swap = {:.12e}, I_ref = {:.12e}", s.action, reference.action);
    Ok(s.action - reference.action)
}

/// Quasi-entropies for each subsystem size, sharing one reference minimization.
pub fn entropy_sweep(config: &LatticeConfig, sizes: &[usize]) -> Result<Vec<f64>> {
    let reference = reference_solution(config)?;
    require_converged(&reference)?;
    sizes.par_iter().map(|&a| entropy_against(config, &reference, a)).collect()
}

/// Full-swap minus reference action per unit length.
pub fn kink_action_numeric(config: &LatticeConfig) -> Result<(f64, FieldSolution)> {
    let reference = reference_solution(config)?;
    require_converged(&reference)?;
    let full = minimize_field(&config.with_region(SwapRegion::Full), InitGuess::KinkGuess(0.5 * config.t_phys()))?;
    require_converged(&full)?;
    Ok(((full.action - reference.action) / (config.l as f64 * config.dr), full))
}

/// Action per unit length of the kink φ = √δ tanh(√(δ/2) t) above the uniform
/// vacuum, for unit-normalized kinetic term and quartic coupling 1/4.
pub fn kink_action_analytic(delta: f64) -> Result<f64> {
    if !(delta >= 0.0) {
        return Err(Error::Domain(format!("kink requires delta >= 0, got {delta}")));
    }
    // in x = √(δ/2) t the density is (δ²/2) sech⁴x and dt = √(2/δ) dx
    Ok(delta.powf(1.5) / 2f64.sqrt() * sech4_integral())
}

/// ∫ sech⁴x dx over the real line by composite Simpson on [-40, 40].
fn sech4_integral() -> f64 {
    let n = 20_000;
    let (a, b) = (-40.0f64, 40.0f64);
    let h = (b - a) / n as f64;
    let f = |x: f64| 1.0 / x.cosh().powi(4);
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinkFit {
    pub center: f64,
    pub width: f64,
    pub amplitude: f64,
}

/// Fits v·tanh((t - t0)/w) to a column using the points with |φ/v| < 0.9.
pub fn fit_kink(column: &[f64], dt: f64, amplitude: f64) -> Result<KinkFit> {
    let mut ts = Vec::new();
    let mut ys = Vec::new();
    for (t, &p) in column.iter().enumerate() {
        let u = p / amplitude;
        if u.abs() < 0.9 {
            ts.push((t as f64 + 0.5) * dt);
            ys.push(u.atanh());
        }
    }
    if ts.len() < 3 {
        return invalid("too few points inside the kink core");
    }
    let f = linear_fit(&ts, &ys)?;
    Ok(KinkFit { center: -f.intercept / f.slope, width: 1.0 / f.slope, amplitude })
}

/// Flat domain wall in the anisotropic long-range Ising model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainWallEnergy {
    /// |A|J + 4wK Σ_{r∈A, s∉A} |r-s|^{-2α} on a ring of L sites
    pub direct: f64,
    /// |A|J + 4wK·I(A) with the cutoff-regulated continuum integral
    pub asymptotic: f64,
}

pub fn flat_domain_wall_energy(a: usize, w: f64, j: f64, k: f64, alpha: f64, l: usize, eps: f64) -> Result<DomainWallEnergy> {
    if !(alpha > 0.5) {
        return Err(Error::Divergent { two_alpha: 2.0 * alpha });
    }
    if !(eps > 0.0) || (a as f64) < eps || 2 * a > l {
        return invalid("flat_domain_wall_energy requires eps <= A <= L/2");
    }
    let two_a = 2.0 * alpha;
    // pairs at ring distance d: count of (r∈A, s∉A) with min-image distance d
    let mut cross = 0.0;
    let kern: Vec<f64> = (0..l).map(|q| if q == 0 { 0.0 } else { (q.min(l - q) as f64).powf(-two_a) }).collect();
    for r in 0..a {
        for s in a..l {
            cross += kern[s - r];
        }
    }
    let af = a as f64;
    let ua = 2.0 - two_a;
    let integral = if ua.abs() < 1e-12 {
        2.0 / (two_a - 1.0) * (af / eps).ln() + 2.0 * eps.powf(ua) / (two_a - 1.0)
    } else {
        2.0 / ((two_a - 1.0) * ua) * (af.powf(ua) - eps.powf(ua)) + 2.0 * eps.powf(ua) / (two_a - 1.0)
    };
    Ok(DomainWallEnergy { direct: af * j + 4.0 * w * k * cross, asymptotic: af * j + 4.0 * w * k * integral })
}
