//! Momentum-space couplings Ĵ_k, the inverted replica-field interaction 𝒥(q),
//! and the power-law hopping dispersion ε_k.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::constants::DEFAULT_K_GRID;
use crate::error::{invalid, Error, Result};
use crate::fit::linear_fit;
use crate::specfun::{gamma_real, cos_pi, riemann_zeta, PolylogUnitCircle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CouplingForm {
    NearestNeighbor,
    PowerLaw,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingSpec {
    pub j: f64,
    pub g: f64,
    pub alpha: f64,
    pub form: CouplingForm,
    pub l: usize,
    pub k_grid: usize,
}

impl CouplingSpec {
    pub fn nearest_neighbor(j: f64, g: f64, l: usize) -> Self {
        CouplingSpec { j, g, alpha: f64::INFINITY, form: CouplingForm::NearestNeighbor, l, k_grid: DEFAULT_K_GRID }
    }

    pub fn power_law(j: f64, g: f64, alpha: f64, l: usize) -> Self {
        CouplingSpec { j, g, alpha, form: CouplingForm::PowerLaw, l, k_grid: DEFAULT_K_GRID }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.j > 0.0 && self.j.is_finite()) {
            return invalid(format!("J must be positive, got {}", self.j));
        }
        if !(self.g >= 0.0 && self.g.is_finite()) {
            return invalid(format!("g must be non-negative, got {}", self.g));
        }
        if self.l < 2 {
            return invalid(format!("chain length must be at least 2, got {}", self.l));
        }
        if self.k_grid < 2 {
            return invalid("k_grid must be at least 2");
        }
        if self.form == CouplingForm::PowerLaw {
            if self.alpha.is_nan() {
                return invalid("alpha is NaN");
            }
            if self.alpha <= 0.5 {
                return Err(Error::Divergent { two_alpha: 2.0 * self.alpha });
            }
        }
        Ok(())
    }

    /// Ĵ_0 = J(1 + 2g·ζ(2α)), or J(1 + 2g) for nearest neighbours.
    pub fn j_hat_0(&self) -> Result<f64> {
        self.validate()?;
        Ok(self.j * (1.0 + 2.0 * self.g * self.lattice_sum()?))
    }

    /// Σ_{r≥1} r^{-2α}.
    fn lattice_sum(&self) -> Result<f64> {
        match self.form {
            CouplingForm::NearestNeighbor => Ok(1.0),
            CouplingForm::PowerLaw if self.alpha.is_infinite() => Ok(1.0),
            CouplingForm::PowerLaw => riemann_zeta(2.0 * self.alpha),
        }
    }
}

/// Evaluates Ĵ_k for one spec at many momenta.
pub struct KernelEvaluator {
    spec: CouplingSpec,
    polylog: Option<PolylogUnitCircle>,
}

impl KernelEvaluator {
    pub fn new(spec: &CouplingSpec) -> Result<Self> {
        spec.validate()?;
        let polylog = match spec.form {
            CouplingForm::PowerLaw if spec.alpha.is_finite() => Some(PolylogUnitCircle::new(2.0 * spec.alpha)?),
            _ => None,
        };
        Ok(KernelEvaluator { spec: *spec, polylog })
    }

    /// Ĵ_k without the positivity check.
    pub fn value(&self, k: f64) -> Result<f64> {
        let s = &self.spec;
        let hop = match &self.polylog {
            None => k.cos(),
            Some(li) => li.eval_re(k)?,
        };
        Ok(s.j * (1.0 + 2.0 * s.g * hop))
    }

    pub fn checked(&self, k: f64) -> Result<f64> {
        let v = self.value(k)?;
        if !(v > 0.0) {
            return Err(Error::Stability { k, value: v });
        }
        Ok(v)
    }

    /// Ĵ at k_m = 2πm/n for m = 0..n, positivity-checked.
    pub fn sample(&self, n: usize) -> Result<Vec<f64>> {
        let mut out = vec![0.0; n];
        for m in 0..=n / 2 {
            let v = self.checked(2.0 * PI * m as f64 / n as f64)?;
            out[m] = v;
            out[(n - m) % n] = v;
        }
        Ok(out)
    }
}

pub fn j_hat_k(spec: &CouplingSpec, k: f64) -> Result<f64> {
    KernelEvaluator::new(spec)?.checked(k)
}

/// f(q) = (1/n) Σ_m F_m cos(2πmq/n) for a real, even spectrum F.
fn inverse_even_transform(spectrum: &[f64]) -> Vec<f64> {
    let n = spectrum.len();
    let mut buf: Vec<Complex64> = spectrum.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut buf);
    let mut out: Vec<f64> = buf.iter().map(|z| z.re / n as f64).collect();
    // enforce q -> n-q symmetry exactly
    for q in 1..=n / 2 {
        let avg = 0.5 * (out[q] + out[n - q]);
        out[q] = avg;
        out[n - q] = avg;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveInteraction {
    /// 𝒥(q) for q = 0..L-1 on the periodic chain
    pub values: Vec<f64>,
    /// decay rate of the alternating short-distance part
    pub mu_fit: f64,
    /// fitted power of the algebraic tail, power-law couplings only
    pub tail_exponent_fit: Option<f64>,
    pub j_hat_0: f64,
}

impl EffectiveInteraction {
    /// Σ_q 𝒥(q), equal to 1/Ĵ_0.
    pub fn total(&self) -> f64 {
        crate::fit::pairwise_sum(&self.values)
    }
}

pub fn effective_interaction(spec: &CouplingSpec) -> Result<EffectiveInteraction> {
    let eval = KernelEvaluator::new(spec)?;
    let l = spec.l;
    let spectrum = eval.sample(l)?;
    let inv: Vec<f64> = spectrum.iter().map(|v| 1.0 / v).collect();
    let values = inverse_even_transform(&inv);
    let mu_fit = fit_mu(&values);
    let tail_exponent_fit = match spec.form {
        CouplingForm::PowerLaw if spec.alpha.is_finite() => tail_exponent(&eval, spec)?,
        _ => None,
    };
    Ok(EffectiveInteraction { values, mu_fit, tail_exponent_fit, j_hat_0: spectrum[0] })
}

/// 𝒥(q) of the chain with period n, sampled on n momenta.
pub fn quasi_infinite_interaction(spec: &CouplingSpec, n: usize) -> Result<Vec<f64>> {
    let eval = KernelEvaluator::new(spec)?;
    let inv: Vec<f64> = eval.sample(n)?.iter().map(|v| 1.0 / v).collect();
    Ok(inverse_even_transform(&inv))
}

fn tail_exponent(eval: &KernelEvaluator, spec: &CouplingSpec) -> Result<Option<f64>> {
    let (lo, hi) = (spec.l / 8, spec.l / 4);
    if lo < 1 || hi <= lo + 1 {
        return Ok(None);
    }
    // a chain much longer than L so that periodic images do not bend the tail
    let n = spec.k_grid.max(16 * spec.l).next_power_of_two();
    let inv: Vec<f64> = eval.sample(n)?.iter().map(|v| 1.0 / v).collect();
    let vals = inverse_even_transform(&inv);
    let scale = vals[0].abs();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for q in lo..=hi {
        let v = vals[q].abs();
        if v > 1e-13 * scale {
            x.push((q as f64).ln());
            y.push(-v.ln());
        }
    }
    if x.len() < 2 {
        return Ok(None);
    }
    Ok(Some(linear_fit(&x, &y)?.slope))
}

/// Slope of -ln|𝒥(q)| over the leading sign-alternating stretch; infinite if 𝒥 is local.
fn fit_mu(values: &[f64]) -> f64 {
    let half = values.len() / 2;
    let scale = values[0].abs();
    let mut x = vec![0.0];
    let mut y = vec![-values[0].abs().ln()];
    for q in 1..=half {
        let v = values[q];
        let expected = if q % 2 == 1 { v < 0.0 } else { v > 0.0 };
        if !expected || v.abs() < 1e-8 * scale {
            break;
        }
        x.push(q as f64);
        y.push(-v.abs().ln());
    }
    if x.len() < 2 {
        return f64::INFINITY;
    }
    if x.len() > 2 {
        // drop q = 0, whose amplitude carries the local part
        x.remove(0);
        y.remove(0);
    }
    linear_fit(&x, &y).map(|f| f.slope).unwrap_or(f64::INFINITY)
}

/// J(q) on the periodic chain, the inverse transform of Ĵ_k.
pub fn real_space_kernel(spec: &CouplingSpec) -> Result<Vec<f64>> {
    let eval = KernelEvaluator::new(spec)?;
    let mut spectrum = vec![0.0; spec.l];
    for m in 0..=spec.l / 2 {
        let v = eval.value(2.0 * PI * m as f64 / spec.l as f64)?;
        spectrum[m] = v;
        spectrum[(spec.l - m) % spec.l] = v;
    }
    Ok(inverse_even_transform(&spectrum))
}

/// Infinite-chain nearest-neighbour inverse: (-1)^q e^{-μ|q|} / (J√(1-4g²)), μ = acosh(1/2g).
pub fn nearest_neighbor_closed_form(j: f64, g: f64, q: i64) -> f64 {
    let norm = 1.0 / (j * (1.0 - 4.0 * g * g).sqrt());
    if q == 0 {
        return norm;
    }
    if g == 0.0 {
        return 0.0;
    }
    let mu = (1.0 / (2.0 * g)).acosh();
    let sign = if q.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    sign * norm * (-mu * q.unsigned_abs() as f64).exp()
}

/// Same on a ring of length l, summing periodic images.
pub fn nearest_neighbor_closed_form_periodic(j: f64, g: f64, q: usize, l: usize) -> f64 {
    let li = l as i64;
    let q = q as i64;
    let mut acc = 0.0;
    let images = 1 + 64 / li.max(1);
    for n in -images..=images {
        acc += nearest_neighbor_closed_form(j, g, q + n * li);
    }
    acc
}

/// ε_k = Σ_r cos(kr) r^{-2α} / ζ(2α).
pub fn epsilon_k(alpha: f64, k: f64) -> Result<f64> {
    if !(alpha > 0.5) {
        return Err(Error::Domain(format!("epsilon_k requires alpha > 1/2, got {alpha}")));
    }
    if alpha.is_infinite() {
        return Ok(k.cos());
    }
    let z = riemann_zeta(2.0 * alpha)?;
    if k.rem_euclid(2.0 * PI) == 0.0 {
        return Ok(1.0);
    }
    Ok(PolylogUnitCircle::new(2.0 * alpha)?.eval_re(k)? / z)
}

/// Leading small-k form of 1 - ε_k.
pub fn kinetic_smallk(alpha: f64, k: f64) -> Result<f64> {
    if !(alpha > 0.5) {
        return Err(Error::Domain(format!("kinetic_smallk requires alpha > 1/2, got {alpha}")));
    }
    if alpha == 1.5 {
        return Err(Error::Unsupported("alpha = 3/2 is logarithmically marginal".into()));
    }
    let z = riemann_zeta(2.0 * alpha)?;
    if alpha > 1.5 {
        Ok(riemann_zeta(2.0 * alpha - 2.0)? / z * k * k / 2.0)
    } else {
        Ok(kinetic_coefficient(alpha)? * k.abs().powf(2.0 * alpha - 1.0))
    }
}

/// -Γ(1-2α) sin(πα)/ζ(2α), written as π/(2|cos πα| Γ(2α) ζ(2α)) so that α = 1 is regular.
pub fn kinetic_coefficient(alpha: f64) -> Result<f64> {
    if !(alpha > 0.5 && alpha < 1.5) {
        return Err(Error::Domain(format!("power-law kinetic branch needs 1/2 < alpha < 3/2, got {alpha}")));
    }
    Ok(-PI / (2.0 * cos_pi(alpha) * gamma_real(2.0 * alpha)? * riemann_zeta(2.0 * alpha)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nn_at_pi() {
        let s = CouplingSpec::nearest_neighbor(1.3, 0.2, 8);
        assert!((j_hat_k(&s, PI).unwrap() - 1.3 * 0.6).abs() < 1e-15);
    }

    #[test]
    fn pl_at_zero() {
        let s = CouplingSpec::power_law(1.0, 0.25, 1.0, 8);
        let v = j_hat_k(&s, 0.0).unwrap();
        assert!((v - (1.0 + 0.5 * PI * PI / 6.0)).abs() < 1e-13);
        assert!((s.j_hat_0().unwrap() - v).abs() < 1e-15);
    }

    #[test]
    fn pl_large_alpha_matches_nn() {
        let pl = CouplingSpec::power_law(1.0, 0.3, 40.0, 8);
        let nn = CouplingSpec::nearest_neighbor(1.0, 0.3, 8);
        for i in 0..50 {
            let k = 2.0 * PI * i as f64 / 50.0;
            assert!((j_hat_k(&pl, k).unwrap() - j_hat_k(&nn, k).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn stability_errors() {
        let s = CouplingSpec::nearest_neighbor(1.0, 0.5, 8);
        assert!(matches!(j_hat_k(&s, PI), Err(Error::Stability { .. })));
        // g = 1 exceeds 1/(2η(3)) for α = 1.5
        let s = CouplingSpec::power_law(1.0, 1.0, 1.5, 16);
        assert!(matches!(effective_interaction(&s), Err(Error::Stability { .. })));
        let s = CouplingSpec::power_law(1.0, 0.2, 0.5, 16);
        assert!(matches!(s.validate(), Err(Error::Divergent { .. })));
    }

    #[test]
    fn nn_closed_form_values() {
        let s = CouplingSpec::nearest_neighbor(1.0, 0.25, 64);
        let e = effective_interaction(&s).unwrap();
        assert!((e.values[0] - 1.0 / 0.75f64.sqrt()).abs() < 1e-12);
        assert!((e.values[1] + (2.0 - 3f64.sqrt()) / 0.75f64.sqrt()).abs() < 1e-12);
        assert!((e.mu_fit - 2f64.acosh()).abs() < 1e-7, "{}", e.mu_fit);
    }

    #[test]
    fn sum_rule_and_symmetry() {
        for spec in [CouplingSpec::nearest_neighbor(1.0, 0.3, 33), CouplingSpec::power_law(0.7, 0.2, 0.8, 40)] {
            let e = effective_interaction(&spec).unwrap();
            assert!((e.total() - 1.0 / e.j_hat_0).abs() < 1e-13);
            for q in 1..spec.l {
                assert_eq!(e.values[q], e.values[spec.l - q]);
            }
        }
    }

    #[test]
    fn round_trip_convolution() {
        let spec = CouplingSpec::power_law(1.0, 0.2, 0.9, 48);
        let e = effective_interaction(&spec).unwrap();
        let jq = real_space_kernel(&spec).unwrap();
        let l = spec.l;
        for q in 0..l {
            let c: f64 = (0..l).map(|s| jq[s] * e.values[(q + l - s) % l]).sum();
            let target = if q == 0 { 1.0 } else { 0.0 };
            assert!((c - target).abs() < 1e-8);
        }
    }

    #[test]
    fn alternating_signs() {
        let spec = CouplingSpec::power_law(1.0, 0.2, 1.2, 256);
        let e = effective_interaction(&spec).unwrap();
        for q in 1..4 {
            assert_eq!(e.values[q] < 0.0, q % 2 == 1);
        }
        assert!(e.mu_fit > 0.0 && e.mu_fit.is_finite());
        let local = effective_interaction(&CouplingSpec::power_law(1.0, 0.0, 1.2, 16)).unwrap();
        assert!(local.mu_fit.is_infinite());
    }

    #[test]
    fn tail_exponent_alpha_075() {
        let spec = CouplingSpec::power_law(1.0, 0.25, 0.75, 1024);
        let e = effective_interaction(&spec).unwrap();
        let p = e.tail_exponent_fit.unwrap();
        assert!((p - 1.5).abs() < 0.05, "{p}");
    }

    #[test]
    fn epsilon_properties() {
        for alpha in [0.6, 0.9, 1.4, 2.5] {
            assert_eq!(epsilon_k(alpha, 0.0).unwrap(), 1.0);
            for i in 1..40 {
                let k = 0.16 * i as f64;
                let e = epsilon_k(alpha, k).unwrap();
                assert!(e < 1.0);
                assert!((e - epsilon_k(alpha, -k).unwrap()).abs() < 1e-14);
                assert!((e - epsilon_k(alpha, k + 2.0 * PI).unwrap()).abs() < 1e-12);
            }
        }
        assert!((epsilon_k(40.0, 1.1).unwrap() - 1.1f64.cos()).abs() < 1e-8);
        assert!(epsilon_k(0.5, 1.0).is_err());
    }

    #[test]
    fn kinetic_branches() {
        let v = kinetic_smallk(2.0, 0.01).unwrap();
        let z2 = PI * PI / 6.0;
        let z4 = PI.powi(4) / 90.0;
        assert!((v - z2 / z4 * 5e-5).abs() < 1e-15);
        assert!(kinetic_smallk(1.5, 0.01).is_err());
        // α = 1: coefficient (π/2)/ζ(2)
        assert!((kinetic_coefficient(1.0).unwrap() - 3.0 / PI).abs() < 1e-13);
        let k = 0.01;
        let exact = 1.0 - epsilon_k(1.0, k).unwrap();
        assert!((kinetic_smallk(1.0, k).unwrap() / exact - 1.0).abs() < 0.02);
        let mut prev = f64::INFINITY;
        for k in [1e-2, 1e-3, 1e-4] {
            let d = (kinetic_smallk(1.2, k).unwrap() / (1.0 - epsilon_k(1.2, k).unwrap()) - 1.0).abs();
            assert!(d < prev);
            prev = d;
        }
        assert!(prev < 1e-2);
    }
}
