//! Numerical tolerances and fixed truncation orders shared by all modules.

/// Terms summed explicitly before the Euler-Maclaurin tail in `riemann_zeta`.
pub const ZETA_EM_TERMS: usize = 64;

/// Bernoulli correction terms in the Euler-Maclaurin tail.
pub const ZETA_EM_BERNOULLI: usize = 12;

/// Above this order the polylog is summed directly instead of by the
/// expansion around the branch point.
pub const POLYLOG_DIRECT_MIN_S: f64 = 6.0;

/// Maximum number of terms of the expansion Li_s(e^{ik}) = Γ(1-s)(-ik)^{s-1} + Σ ζ(s-n)(ik)^n/n!.
pub const POLYLOG_SERIES_MAX_TERMS: usize = 120;

/// Orders within this distance of an integer use the integer-order expansion.
pub const POLYLOG_INTEGER_SNAP: f64 = 1e-9;

/// Relative accuracy targets.
pub const ZETA_REL_TOL: f64 = 1e-12;
pub const POLYLOG_REL_TOL: f64 = 1e-10;
pub const GAMMA_REL_TOL: f64 = 1e-12;

/// Default momentum grid for quasi-infinite-chain kernels.
pub const DEFAULT_K_GRID: usize = 1 << 14;

/// Saddle-point residual bound and Newton budget.
pub const SADDLE_RESIDUAL_TOL: f64 = 1e-10;
pub const SADDLE_MAX_NEWTON: usize = 100;

/// Band around the critical point where the mean-field phase is labelled critical.
pub const CRITICAL_BAND: f64 = 1e-12;

/// Root residual bound for the SYK lambda equation.
pub const LAMBDA_RESIDUAL_TOL: f64 = 1e-12;

/// Grid used to bracket roots of the lambda equation.
pub const LAMBDA_SCAN_POINTS: usize = 1000;

/// Default pin strength prefactor: h = PIN_PREFACTOR * sqrt(|δ|).
pub const PIN_PREFACTOR: f64 = 50.0;

/// Lattice minimizer gradient tolerance per site: ||∇S|| < LATTICE_GRAD_TOL * L * T_steps.
pub const LATTICE_GRAD_TOL: f64 = 1e-8;

/// Unitarity bound on a single trajectory step.
pub const NORM_DRIFT_TOL: f64 = 1e-12;

/// Spin magnitude of the simulated qubits.
pub const SPIN: f64 = 0.5;
