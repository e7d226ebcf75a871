//! Subcommand parameters and drivers.

use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::json;

use lrmon_core::circuit_mc::{quasi_renyi_from_records, replica_limit_from_records, run_trajectories, CircuitParams, Estimate};
use lrmon_core::couplings::{effective_interaction, nearest_neighbor_closed_form_periodic, CouplingSpec};
use lrmon_core::entropy_code::{
    a_star, code_distance, complement_entropy, critical_exponents, crossover_exact, entropy_scaling_with, mutual_information, spin_entropy_form,
    CodeDistance, ComplementBranch, EntropyForm, Phase, PhasePoint,
};
use lrmon_core::fit::{linear_plus_power_fit, power_plus_constant_fit, PowerFit};
use lrmon_core::lattice_lg::{entropy_sweep, KernelKind, LatticeConfig, SwapRegion};
use lrmon_core::meanfield::{gamma_c, lg_coefficients, solve_saddle, LgCoefficients, MeanFieldParams, MeanFieldPhase};
use lrmon_core::syk_chain::{root_multiplicity_near_transition, solve_lambda, stiffness, transition_order, SykParams};

use crate::output::{Cell, Run, Table};
use crate::CliError;

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

#[derive(Debug, Args, Serialize)]
pub struct PhaseDiagramArgs {
    /// power-law exponents
    #[arg(long, value_delimiter = ',', required = true)]
    pub alpha: Vec<f64>,
    /// measurement rates in units of J
    #[arg(long, value_delimiter = ',', required = true)]
    pub gamma: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub j: f64,
    #[arg(long, default_value_t = 1.0)]
    pub g: f64,
    /// chain length used for the inverted interaction
    #[arg(long, default_value_t = 64)]
    pub l: usize,
}

fn phase_label(p: MeanFieldPhase) -> &'static str {
    match p {
        MeanFieldPhase::Symmetric => "symmetric",
        MeanFieldPhase::Broken => "broken",
        MeanFieldPhase::Critical => "critical",
    }
}

pub fn phase_diagram(a: &PhaseDiagramArgs) -> Result<Run, CliError> {
    if a.gamma.iter().any(|g| !(*g >= 0.0 && g.is_finite())) {
        return usage("--gamma values must be finite and non-negative");
    }
    let convergent: Vec<f64> = a.alpha.iter().copied().filter(|&al| 2.0 * al > 1.0).collect();
    for &al in &convergent {
        CouplingSpec::power_law(a.j, a.g, al, a.l).validate()?;
    }
    let mut run = Run::new("phase-diagram", a)?;
    let mut grid = Table::new("phase_diagram", &["alpha", "gamma_over_j", "phase", "phi", "delta", "z", "entropy_form"]);
    let mut curve = Table::new("gamma_c", &["alpha", "gamma_c_over_j", "status"]);
    for &al in &a.alpha {
        if 2.0 * al <= 1.0 {
            curve.push(vec![al.into(), f64::INFINITY.into(), "divergent".into()]);
            for &g in &a.gamma {
                grid.push(vec![al.into(), g.into(), "divergent".into(), f64::NAN.into(), f64::NAN.into(), f64::NAN.into(), "divergent".into()]);
            }
            continue;
        }
        let spec = CouplingSpec::power_law(a.j, a.g, al, a.l);
        curve.push(vec![al.into(), (gamma_c(&spec)? / a.j).into(), "ok".into()]);
        let mu = match effective_interaction(&spec) {
            Ok(e) => Some(e.mu_fit),
            Err(lrmon_core::Error::Stability { k, value }) => {
                run.notes.push(format!("alpha = {al}: kernel J_k = {value:.6} < 0 at k = {k:.6}, delta not defined"));
                None
            }
            Err(e) => return Err(e.into()),
        };
        let z = critical_exponents(al)?.z;
        for &g in &a.gamma {
            let params = MeanFieldParams::new(spec, g * a.j)?;
            let s = solve_saddle(&params)?;
            let form = match s.phase {
                MeanFieldPhase::Broken => spin_entropy_form(al, Phase::Broken).label(),
                MeanFieldPhase::Symmetric => spin_entropy_form(al, Phase::Symmetric).label(),
                MeanFieldPhase::Critical => "critical".into(),
            };
            let delta = mu.map_or(f64::NAN, |mu| lg_coefficients(&params, mu).delta);
            grid.push(vec![al.into(), g.into(), phase_label(s.phase).into(), s.phi.into(), delta.into(), z.into(), form.into()]);
        }
    }
    run.tables.push(grid);
    run.tables.push(curve);
    run.notes.push("rows with 2*alpha <= 1 have a divergent coupling sum and are marked, not computed".into());
    Ok(run)
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Form {
    NearestNeighbor,
    PowerLaw,
}

#[derive(Debug, Args, Serialize)]
pub struct CouplingsArgs {
    #[arg(long, value_enum)]
    pub form: Form,
    #[arg(long, default_value_t = 1.0)]
    pub j: f64,
    #[arg(long)]
    pub g: f64,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long)]
    pub l: usize,
}

pub fn couplings(a: &CouplingsArgs) -> Result<Run, CliError> {
    let spec = match a.form {
        Form::NearestNeighbor => CouplingSpec::nearest_neighbor(a.j, a.g, a.l),
        Form::PowerLaw => CouplingSpec::power_law(a.j, a.g, a.alpha, a.l),
    };
    spec.validate()?;
    let e = effective_interaction(&spec)?;
    let mut run = Run::new("couplings", a)?;
    let mut t = match a.form {
        Form::NearestNeighbor => Table::new("couplings", &["q", "jcal", "closed_form"]),
        Form::PowerLaw => Table::new("couplings", &["q", "jcal"]),
    };
    for (q, &v) in e.values.iter().enumerate() {
        let mut row: Vec<Cell> = vec![q.into(), v.into()];
        if let Form::NearestNeighbor = a.form {
            row.push(nearest_neighbor_closed_form_periodic(a.j, a.g, q, a.l).into());
        }
        t.push(row);
    }
    run.tables.push(t);
    run.summary = json!({
        "j_hat_0": e.j_hat_0,
        "total": e.total(),
        "mu_fit": e.mu_fit,
        "tail_exponent_fit": e.tail_exponent_fit,
    });
    Ok(run)
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kernel {
    MinimumImage,
    PeriodicImages,
}

#[derive(Debug, Args, Serialize)]
pub struct EntropyFitArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub delta: f64,
    #[arg(long)]
    pub b: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.25)]
    pub quartic: f64,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub l: usize,
    #[arg(long)]
    pub t_steps: usize,
    /// physical time extent
    #[arg(long)]
    pub t_phys: f64,
    /// subsystem sizes A, each in [2, L/4]
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
    #[arg(long, value_enum, default_value = "periodic-images")]
    pub kernel: Kernel,
}

fn fit_json(f: &PowerFit) -> serde_json::Value {
    json!({ "sigma": f.linear, "amplitude": f.amplitude, "exponent": f.exponent, "constant": f.constant, "sse": f.sse })
}

pub fn entropy_fit(a: &EntropyFitArgs) -> Result<Run, CliError> {
    if a.sizes.is_empty() {
        return usage("--sizes must not be empty");
    }
    if let Some(&bad) = a.sizes.iter().find(|&&s| s < 2 || s > a.l / 4) {
        return usage(format!("size {bad} outside [2, L/4 = {}]", a.l / 4));
    }
    let coeffs = LgCoefficients { beta: a.beta, b: a.b, delta: a.delta, quartic: a.quartic };
    let kind = match a.kernel {
        Kernel::MinimumImage => KernelKind::MinimumImage,
        Kernel::PeriodicImages => KernelKind::PeriodicImages,
    };
    let config = LatticeConfig::with_extent(a.l, a.t_steps, a.t_phys, coeffs, a.alpha, SwapRegion::Full)?.with_kernel(kind)?;
    let s = entropy_sweep(&config, &a.sizes)?;
    let x: Vec<f64> = a.sizes.iter().map(|&v| v as f64).collect();

    let mut run = Run::new("entropy-fit", a)?;
    let mut t = Table::new("entropy", &["a", "quasi_entropy"]);
    for (&size, &v) in a.sizes.iter().zip(&s) {
        t.push(vec![size.into(), v.into()]);
    }
    run.tables.push(t);

    let phase = if config.delta_eff() > 0.0 { Phase::Broken } else { Phase::Symmetric };
    let form = spin_entropy_form(a.alpha, phase);
    let predicted = match form {
        EntropyForm::Volume { correction } => correction,
        EntropyForm::Power { exponent } => Some(exponent),
        EntropyForm::Log | EntropyForm::Bounded => None,
    };
    let fit = match phase {
        Phase::Broken if x.len() >= 4 => Some(linear_plus_power_fit(&x, &s, 0.05, 0.95)?),
        Phase::Symmetric if x.len() >= 3 => Some(power_plus_constant_fit(&x, &s, -3.0, 1.5)?),
        _ => None,
    };
    if fit.is_none() {
        run.notes.push("too few sizes for a scaling fit".into());
    }
    run.summary = json!({
        "phase": if phase == Phase::Broken { "broken" } else { "symmetric" },
        "delta_eff": config.delta_eff(),
        "predicted_form": form.label(),
        "predicted_exponent": predicted,
        "fit": fit.as_ref().map(fit_json),
    });
    Ok(run)
}

#[derive(Debug, Args, Serialize)]
pub struct SykArgs {
    #[arg(long, default_value_t = 4)]
    pub q: u32,
    #[arg(long, default_value_t = 1.0)]
    pub j: f64,
    #[arg(long, default_value_t = 0.0)]
    pub u: f64,
    /// power-law exponent; inf for the nearest-neighbour limit
    #[arg(long, default_value_t = f64::INFINITY)]
    pub alpha: f64,
    /// reduced measurement rates γ/Ĵ
    #[arg(long, value_delimiter = ',', required = true)]
    pub gamma_tilde: Vec<f64>,
}

pub fn syk(a: &SykArgs) -> Result<Run, CliError> {
    let base = SykParams::new(a.j, a.u, a.q, 0.0, a.alpha)?;
    if a.gamma_tilde.iter().any(|g| !(*g >= 0.0 && g.is_finite())) {
        return usage("--gamma-tilde values must be finite and non-negative");
    }
    let mut run = Run::new("syk", a)?;
    let mut t = Table::new("syk", &["gamma_tilde", "lambda", "n_roots", "max_residual", "stiffness"]);
    for &g in &a.gamma_tilde {
        let p = base.with_gamma_tilde(g);
        let s = solve_lambda(&p)?;
        let rho = if a.u == 0.0 { stiffness(&p)? } else { f64::NAN };
        t.push(vec![g.into(), s.lambda.into(), s.roots.len().into(), s.max_residual.into(), rho.into()]);
    }
    run.tables.push(t);
    run.summary = json!({
        "j_hat": base.j_hat(),
        "u_tilde": base.u_tilde(),
        "transition_order": format!("{:?}", transition_order(&base)),
        "roots_above_transition": root_multiplicity_near_transition(base.u_tilde(), a.q),
    });
    Ok(run)
}

#[derive(Debug, Args, Serialize)]
pub struct McArgs {
    /// qubits per cluster
    #[arg(long)]
    pub n: usize,
    /// number of clusters
    #[arg(long)]
    pub l: usize,
    #[arg(long, default_value_t = 1.0)]
    pub j: f64,
    #[arg(long, default_value_t = 1.0)]
    pub g: f64,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// measurement rates in units of J
    #[arg(long, value_delimiter = ',', required = true)]
    pub gamma: Vec<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long)]
    pub t_total: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub n_traj: usize,
    /// subsystem sizes in clusters, counted from cluster 0 (default: 1..=L)
    #[arg(long, value_delimiter = ',')]
    pub clusters: Vec<usize>,
    /// also report the replica-limit identity gap (2NL <= 16)
    #[arg(long)]
    pub replica: bool,
    /// dump per-trajectory log weights
    #[arg(long)]
    pub dump_weights: bool,
}

pub fn mc(a: &McArgs) -> Result<Run, CliError> {
    let clusters: Vec<usize> = if a.clusters.is_empty() { (1..=a.l).collect() } else { a.clusters.clone() };
    if let Some(&bad) = clusters.iter().find(|&&c| c == 0 || c > a.l) {
        return usage(format!("cluster count {bad} outside [1, L = {}]", a.l));
    }
    let params: Vec<CircuitParams> = a
        .gamma
        .iter()
        .map(|&g| CircuitParams::new(a.n, a.l, a.j, a.g, a.alpha, g * a.j, a.dt, a.t_total, a.seed, a.n_traj))
        .collect::<Result<_, _>>()?;
    if a.replica && 2 * a.n * a.l > 16 {
        return Err(lrmon_core::Error::Resource("replica check limited to 2NL <= 16".into()).into());
    }
    let nq = a.n * a.l;
    let mut subsets: Vec<Vec<usize>> = clusters.iter().map(|&c| params[0].cluster_block(0, c)).collect();
    subsets.push((nq..2 * nq).collect());
    let full_q = clusters.iter().position(|&c| c == a.l);
    if full_q.is_none() {
        subsets.push((0..nq).collect());
    }
    let q_index = full_q.unwrap_or(subsets.len() - 1);
    let r_index = clusters.len();

    let mut run = Run::new("mc", a)?;
    let mut ent = Table::new("entropy", &["gamma_over_j", "clusters", "qubits", "quasi_renyi2", "stderr", "n_effective", "n_annihilated"]);
    let mut cons = Table::new("consistency", &["gamma_over_j", "entropy_q", "entropy_r", "difference"]);
    let mut rep = Table::new("replica", &["gamma_over_j", "clusters", "lhs", "rhs", "gap", "stderr"]);
    let mut weights = Table::new("weights", &["gamma_over_j", "trajectory", "log_norm", "annihilated"]);
    let mut curves: Vec<Vec<Estimate>> = vec![Vec::new(); clusters.len()];
    for (p, &g) in params.iter().zip(&a.gamma) {
        let recs = run_trajectories(p, &subsets)?;
        for (k, &c) in clusters.iter().enumerate() {
            let e = quasi_renyi_from_records(&recs, k, 2.0)?;
            if e.n_effective < 0.1 * a.n_traj as f64 {
                log::warn!("gamma = {g}: effective sample size {:.1} of {} trajectories", e.n_effective, a.n_traj);
            }
            ent.push(vec![g.into(), c.into(), (c * a.n).into(), e.value.into(), e.stderr.into(), e.n_effective.into(), e.n_annihilated.into()]);
            curves[k].push(e);
            if a.replica {
                let r = replica_limit_from_records(&recs, k)?;
                rep.push(vec![g.into(), c.into(), r.lhs.into(), r.rhs.into(), r.gap.into(), r.stderr.into()]);
            }
        }
        let sq = quasi_renyi_from_records(&recs, q_index, 2.0)?.value;
        let sr = quasi_renyi_from_records(&recs, r_index, 2.0)?.value;
        cons.push(vec![g.into(), sq.into(), sr.into(), (sq - sr).into()]);
        if a.dump_weights {
            for (i, r) in recs.iter().enumerate() {
                weights.push(vec![g.into(), i.into(), r.log_norm.into(), r.annihilated.into()]);
            }
        }
    }
    let monotone: Vec<bool> = curves
        .iter()
        .map(|c| c.windows(2).all(|w| w[1].value - w[0].value < 3.0 * w[0].stderr.hypot(w[1].stderr)))
        .collect();
    let mut trend = Table::new("trend", &["clusters", "monotone_in_gamma"]);
    for (&c, &m) in clusters.iter().zip(&monotone) {
        trend.push(vec![c.into(), m.into()]);
    }
    run.tables.extend([ent, cons, trend]);
    if a.replica {
        run.tables.push(rep);
    }
    if a.dump_weights {
        run.tables.push(weights);
    }
    if a.n_traj < 100 {
        log::warn!("only {} trajectories per point", a.n_traj);
    }
    run.summary = json!({ "monotone_trend": monotone.iter().all(|&m| m), "gamma_sorted": a.gamma.windows(2).all(|w| w[0] <= w[1]) });
    run.notes.push("exploratory: N <= 4 shows trends only; the large-N phase boundary is not reproducible at this scale".into());
    Ok(run)
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseArg {
    Broken,
    Symmetric,
}

#[derive(Debug, Args, Serialize)]
pub struct CodeArgs {
    #[arg(long)]
    pub alpha: f64,
    /// measurement rate in units of J, recorded for bookkeeping
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    #[arg(long, value_enum)]
    pub phase: PhaseArg,
    /// line tension (zero in the symmetric phase)
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub xi_t: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c_fit: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub l: usize,
    /// add the (3/2) ln A capillary term to the subsystem entropy
    #[arg(long)]
    pub capillary: bool,
}

pub fn code(a: &CodeArgs) -> Result<Run, CliError> {
    let phase = match a.phase {
        PhaseArg::Broken => Phase::Broken,
        PhaseArg::Symmetric => Phase::Symmetric,
    };
    let p = PhasePoint { alpha: a.alpha, gamma_over_j: a.gamma, phase, sigma: a.sigma, xi_t: a.xi_t, c_fit: a.c_fit, n: a.n, l: a.l };
    p.validate()?;
    if a.l > 1 << 20 {
        return Err(lrmon_core::Error::Resource(format!("L = {} exceeds 2^20 table rows", a.l)).into());
    }
    let mut run = Run::new("code", a)?;
    let z = critical_exponents(a.alpha)?.z;
    match phase {
        Phase::Broken => {
            let mut t = Table::new("code", &["a", "entropy_a", "entropy_complement", "branch", "mutual_information"]);
            for i in 0..=a.l {
                let x = i as f64;
                let c = complement_entropy(&p, x)?;
                let branch = match c.branch {
                    ComplementBranch::ThroughReference => "through-reference",
                    ComplementBranch::Direct => "direct",
                };
                t.push(vec![i.into(), entropy_scaling_with(&p, x, a.capillary).into(), c.value.into(), branch.into(), mutual_information(&p, x)?.into()]);
            }
            run.tables.push(t);
            let exact = if a.alpha < 1.0 { Some(crossover_exact(&p)?) } else { None };
            let distance = match code_distance(&p)? {
                CodeDistance::PowerLaw(d) => json!({ "kind": "power-law", "value": d }),
                CodeDistance::Logarithmic => json!({ "kind": "logarithmic" }),
            };
            run.summary = json!({
                "a_star": a_star(&p)?,
                "crossover_exact": exact,
                "code_distance": distance,
                "z": z,
                "entropy_form": spin_entropy_form(a.alpha, phase).label(),
            });
        }
        Phase::Symmetric => {
            let mut t = Table::new("code", &["a", "entropy_a"]);
            for i in 0..=a.l {
                t.push(vec![i.into(), entropy_scaling_with(&p, i as f64, a.capillary).into()]);
            }
            run.tables.push(t);
            run.summary = json!({ "z": z, "entropy_form": spin_entropy_form(a.alpha, phase).label() });
        }
    }
    Ok(run)
}
