//! Closed-form entanglement scaling, complement-entropy min rule, mutual
//! information, crossover size A* and code distance.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    Symmetric,
    Broken,
}

/// σ, ξ_t and c are in units of J.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub alpha: f64,
    pub gamma_over_j: f64,
    pub phase: Phase,
    pub sigma: f64,
    pub xi_t: f64,
    pub c_fit: f64,
    pub n: usize,
    pub l: usize,
}

impl PhasePoint {
    /// υ = 2 - 2α
    pub fn upsilon(&self) -> f64 {
        2.0 - 2.0 * self.alpha
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.5) {
            return Err(Error::Divergent { two_alpha: 2.0 * self.alpha });
        }
        if !(self.xi_t > 0.0) || self.n == 0 || self.l == 0 {
            return invalid("xi_t must be positive and N, L non-zero");
        }
        match self.phase {
            Phase::Broken if !(self.sigma > 0.0) => invalid("broken phase needs sigma > 0"),
            Phase::Symmetric if self.sigma != 0.0 => invalid("symmetric phase has no line tension"),
            _ => Ok(()),
        }
    }

    fn power(&self, a: f64) -> f64 {
        if a <= 0.0 {
            0.0
        } else {
            self.c_fit * self.xi_t * a.powf(self.upsilon())
        }
    }
}

/// Ŝ_A = N(σA + cξ_t A^υ) in the broken phase, N cξ_t A^υ in the symmetric phase.
pub fn entropy_scaling(p: &PhasePoint, a: f64) -> f64 {
    entropy_scaling_with(p, a, false)
}

/// As `entropy_scaling`, optionally adding the capillary-wave term (3/2) ln A.
pub fn entropy_scaling_with(p: &PhasePoint, a: f64, capillary: bool) -> f64 {
    if a <= 0.0 {
        return 0.0;
    }
    let n = p.n as f64;
    let bulk = match p.phase {
        Phase::Broken => n * (p.sigma * a + p.power(a)),
        Phase::Symmetric => n * p.power(a),
    };
    if capillary {
        bulk + 1.5 * a.ln()
    } else {
        bulk
    }
}

/// Ŝ_R = NσL.
pub fn reference_entropy(p: &PhasePoint) -> f64 {
    p.n as f64 * p.sigma * p.l as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComplementBranch {
    /// Ŝ_A + Ŝ_R
    ThroughReference,
    /// N(σ(L-A) + cξ_t(L-A)^υ)
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplementEntropy {
    pub value: f64,
    pub branch: ComplementBranch,
}

fn require_broken(p: &PhasePoint) -> Result<()> {
    p.validate()?;
    if p.phase != Phase::Broken {
        return Err(Error::Phase("operation defined only in the broken phase".into()));
    }
    Ok(())
}

pub fn complement_entropy(p: &PhasePoint, a: f64) -> Result<ComplementEntropy> {
    require_broken(p)?;
    let l = p.l as f64;
    if !(0.0..=l).contains(&a) {
        return invalid(format!("subsystem size {a} outside [0, {l}]"));
    }
    let through = entropy_scaling(p, a) + reference_entropy(p);
    let rest = l - a;
    let direct = p.n as f64 * (p.sigma * rest + p.power(rest));
    Ok(if through <= direct {
        ComplementEntropy { value: through, branch: ComplementBranch::ThroughReference }
    } else {
        ComplementEntropy { value: direct, branch: ComplementBranch::Direct }
    })
}

/// Î(A:R) = Ŝ_A + Ŝ_R - Ŝ_{A^c}.
pub fn mutual_information(p: &PhasePoint, a: f64) -> Result<f64> {
    let c = complement_entropy(p, a)?;
    Ok(entropy_scaling(p, a) + reference_entropy(p) - c.value)
}

/// A* = cξ_t L^υ / (2σ), leading order in 1/N.
pub fn a_star(p: &PhasePoint) -> Result<f64> {
    require_broken(p)?;
    Ok(p.c_fit * p.xi_t * (p.l as f64).powf(p.upsilon()) / (2.0 * p.sigma))
}

/// Size where the two complement branches are equal, found by bisection (α < 1).
pub fn crossover_exact(p: &PhasePoint) -> Result<f64> {
    require_broken(p)?;
    if p.upsilon() <= 0.0 {
        return Err(Error::Unsupported("no power-law crossover for alpha >= 1".into()));
    }
    let l = p.l as f64;
    let h = |a: f64| p.power(l - a) - p.power(a) - 2.0 * p.sigma * a;
    let (mut lo, mut hi) = (0.0, l / 2.0);
    if h(hi) > 0.0 {
        return Ok(hi);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CodeDistance {
    /// N·A*
    PowerLaw(f64),
    /// grows as log L with a 1/N-suppressed prefactor that is not computed
    Logarithmic,
}

pub fn code_distance(p: &PhasePoint) -> Result<CodeDistance> {
    require_broken(p)?;
    if p.alpha >= 1.0 {
        return Ok(CodeDistance::Logarithmic);
    }
    Ok(CodeDistance::PowerLaw(p.n as f64 * a_star(p)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalExponents {
    pub z: f64,
    /// ν of the free-fermion chain
    pub nu: f64,
    pub nu_free_fermion: bool,
}

/// z = 1 for 2α ≥ 3, (2α-1)/2 for 1 < 2α < 3.
pub fn critical_exponents(alpha: f64) -> Result<CriticalExponents> {
    if !(alpha > 0.5) {
        return Err(Error::Domain(format!("critical_exponents requires alpha > 1/2, got {alpha}")));
    }
    let z = if 2.0 * alpha >= 3.0 { 1.0 } else { (2.0 * alpha - 1.0) / 2.0 };
    Ok(CriticalExponents { z, nu: 1.0, nu_free_fermion: true })
}

/// Functional form of Ŝ_A against A.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EntropyForm {
    /// σA, optionally with a sub-leading A^υ layer (υ > 0)
    Volume { correction: Option<f64> },
    Power { exponent: f64 },
    Log,
    Bounded,
}

impl EntropyForm {
    pub fn label(&self) -> String {
        match self {
            EntropyForm::Volume { correction: None } => "volume".into(),
            EntropyForm::Volume { correction: Some(u) } => format!("volume+A^{u:.4}"),
            EntropyForm::Power { exponent } => format!("A^{exponent:.4}"),
            EntropyForm::Log => "log".into(),
            EntropyForm::Bounded => "area".into(),
        }
    }
}

/// Spin-chain entanglement regions: volume law (with fractal correction for α < 1)
/// when broken, fractal A^{2-2α} or area law when symmetric.
pub fn spin_entropy_form(alpha: f64, phase: Phase) -> EntropyForm {
    let u = 2.0 - 2.0 * alpha;
    match (phase, alpha < 1.0) {
        (Phase::Broken, true) => EntropyForm::Volume { correction: Some(u) },
        (Phase::Broken, false) => EntropyForm::Volume { correction: None },
        (Phase::Symmetric, true) => EntropyForm::Power { exponent: u },
        (Phase::Symmetric, false) => EntropyForm::Bounded,
    }
}
