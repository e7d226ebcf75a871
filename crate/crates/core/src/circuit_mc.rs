//! Exact state-vector trajectories of the monitored Brownian spin chain and
//! Monte Carlo estimators of quasi-Rényi entropies.
//!
//! Qubit q = r·N + i of the system Q sits at bit q; its reference partner sits
//! at bit N·L + q. Spin operators are σ/2.

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{NORM_DRIFT_TOL, SPIN};
use crate::error::{invalid, Error, Result};
use crate::fit::pairwise_sum;

const MAX_QUBITS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    pub n: usize,
    pub l: usize,
    pub j: f64,
    pub g: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub dt: f64,
    pub t_total: f64,
    pub spin: f64,
    pub seed: u64,
    pub n_traj: usize,
    /// each step's couplings are the mean of this many draws at step dt / refinement
    pub noise_refinement: usize,
}

impl CircuitParams {
    pub fn new(n: usize, l: usize, j: f64, g: f64, alpha: f64, gamma: f64, dt: f64, t_total: f64, seed: u64, n_traj: usize) -> Result<Self> {
        let p = CircuitParams { n, l, j, g, alpha, gamma, dt, t_total, spin: SPIN, seed, n_traj, noise_refinement: 1 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.l == 0 {
            return invalid("N and L must be positive");
        }
        if 2 * self.n * self.l > MAX_QUBITS {
            return Err(Error::Resource(format!("2NL = {} exceeds {MAX_QUBITS} qubits", 2 * self.n * self.l)));
        }
        if self.spin != SPIN {
            return Err(Error::Unsupported("only spin-1/2 qubits are simulated".into()));
        }
        if !(self.j >= 0.0) || !(self.g >= 0.0) || !(self.gamma >= 0.0) || !(self.t_total >= 0.0) {
            return invalid("J, g, gamma and T must be non-negative");
        }
        if !(self.dt > 0.0) || self.dt * self.j > 0.01 * (1.0 + 1e-12) || self.gamma * self.dt > 0.1 * (1.0 + 1e-12) {
            return invalid(format!("time step {} violates dt*J <= 0.01, gamma*dt <= 0.1", self.dt));
        }
        if self.g > 0.0 && self.l > 1 && !(self.alpha > 0.0) {
            return invalid("alpha must be positive");
        }
        if self.noise_refinement == 0 {
            return invalid("noise_refinement must be at least 1");
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_total / self.dt).round() as usize
    }

    pub fn system_qubits(&self) -> usize {
        self.n * self.l
    }

    /// System qubits of clusters [first, first + count).
    pub fn cluster_block(&self, first: usize, count: usize) -> Vec<usize> {
        (first * self.n..(first + count) * self.n).collect()
    }

    fn fourth(&self) -> f64 {
        (self.spin + 1.0).powi(4)
    }

    fn ring_distance(&self, r1: usize, r2: usize) -> usize {
        let d = r1.abs_diff(r2);
        d.min(self.l - d)
    }

    pub fn intra_variance(&self) -> f64 {
        self.j / (self.n as f64 * self.fourth()) / (self.dt / 2.0)
    }

    pub fn inter_variance(&self, r1: usize, r2: usize) -> f64 {
        let d = self.ring_distance(r1, r2) as f64;
        self.g * self.j * d.powf(-2.0 * self.alpha) / (self.n as f64 * self.fourth()) / (self.dt / 2.0)
    }

    pub fn field_variance(&self) -> f64 {
        self.gamma / (self.spin + 1.0).powi(2) / (self.dt / 2.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntraTerm {
    pub r: usize,
    pub i: usize,
    pub j: usize,
    pub c: [[f64; 3]; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterTerm {
    pub r1: usize,
    pub r2: usize,
    pub i: usize,
    pub j: usize,
    pub c: [[f64; 3]; 3],
}

/// One step's Brownian couplings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepCoefficients {
    pub intra: Vec<IntraTerm>,
    pub inter: Vec<InterTerm>,
    /// n_q for each system qubit
    pub fields: Vec<[f64; 3]>,
}

/// Σ c_{αβ} S_a^α S_b^β on the qubit pair a < b.
#[derive(Debug, Clone, PartialEq)]
pub struct PairHamiltonian {
    pub a: usize,
    pub b: usize,
    pub c: [[f64; 3]; 3],
}

impl StepCoefficients {
    /// Terms merged per unordered qubit pair, sorted lexicographically.
    pub fn pair_hamiltonians(&self, n: usize) -> Vec<PairHamiltonian> {
        let mut map = std::collections::BTreeMap::<(usize, usize), [[f64; 3]; 3]>::new();
        let mut add = |qa: usize, qb: usize, c: &[[f64; 3]; 3]| {
            let (a, b, flip) = if qa < qb { (qa, qb, false) } else { (qb, qa, true) };
            let e = map.entry((a, b)).or_insert([[0.0; 3]; 3]);
            for al in 0..3 {
                for be in 0..3 {
                    e[al][be] += if flip { c[be][al] } else { c[al][be] };
                }
            }
        };
        for t in &self.intra {
            add(t.r * n + t.i, t.r * n + t.j, &t.c);
        }
        for t in &self.inter {
            add(t.r1 * n + t.i, t.r2 * n + t.j, &t.c);
        }
        map.into_iter().map(|((a, b), c)| PairHamiltonian { a, b, c }).collect()
    }

    fn accumulate(&mut self, other: &StepCoefficients, w: f64) {
        for (x, y) in self.intra.iter_mut().zip(&other.intra) {
            add_scaled(&mut x.c, &y.c, w);
        }
        for (x, y) in self.inter.iter_mut().zip(&other.inter) {
            add_scaled(&mut x.c, &y.c, w);
        }
        for (x, y) in self.fields.iter_mut().zip(&other.fields) {
            for k in 0..3 {
                x[k] += w * y[k];
            }
        }
    }

    fn scale(&mut self, w: f64) {
        for x in &mut self.intra {
            x.c.iter_mut().flatten().for_each(|v| *v *= w);
        }
        for x in &mut self.inter {
            x.c.iter_mut().flatten().for_each(|v| *v *= w);
        }
        self.fields.iter_mut().flatten().for_each(|v| *v *= w);
    }
}

fn add_scaled(x: &mut [[f64; 3]; 3], y: &[[f64; 3]; 3], w: f64) {
    for a in 0..3 {
        for b in 0..3 {
            x[a][b] += w * y[a][b];
        }
    }
}

/// Counter-based stream for (seed, trajectory, step).
pub fn step_rng(seed: u64, trajectory: u64, step: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trajectory);
    rng.set_word_pos((step as u128) << 32);
    rng
}

/// Draws every coupling of one step in the fixed order intra (r, i<j, α, β),
/// inter (r1, r2≠r1, i, j, α, β), fields (q, α).
pub fn sample_step_hamiltonian(params: &CircuitParams, rng: &mut ChaCha8Rng) -> StepCoefficients {
    let (n, l) = (params.n, params.l);
    let mut gauss = |var: f64| -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        if var > 0.0 {
            z * var.sqrt()
        } else {
            0.0
        }
    };
    let mut block = |var: f64| {
        let mut c = [[0.0; 3]; 3];
        c.iter_mut().flatten().for_each(|v| *v = gauss(var));
        c
    };
    let vi = params.intra_variance();
    let mut intra = Vec::new();
    for r in 0..l {
        for i in 0..n {
            for j in i + 1..n {
                intra.push(IntraTerm { r, i, j, c: block(vi) });
            }
        }
    }
    let mut inter = Vec::new();
    for r1 in 0..l {
        for r2 in 0..l {
            if r1 == r2 {
                continue;
            }
            let v = params.inter_variance(r1, r2);
            for i in 0..n {
                for j in 0..n {
                    inter.push(InterTerm { r1, r2, i, j, c: block(v) });
                }
            }
        }
    }
    let vf = params.field_variance();
    let fields = (0..n * l).map(|_| [gauss(vf), gauss(vf), gauss(vf)]).collect();
    StepCoefficients { intra, inter, fields }
}

fn step_coefficients(params: &CircuitParams, trajectory: u64, step: u64) -> StepCoefficients {
    let s = params.noise_refinement;
    if s == 1 {
        return sample_step_hamiltonian(params, &mut step_rng(params.seed, trajectory, step));
    }
    let mut fine = *params;
    fine.dt = params.dt / s as f64;
    let mut acc: Option<StepCoefficients> = None;
    for k in 0..s {
        let c = sample_step_hamiltonian(&fine, &mut step_rng(params.seed, trajectory, step * s as u64 + k as u64));
        match acc.as_mut() {
            None => acc = Some(c),
            Some(a) => a.accumulate(&c, 1.0),
        }
    }
    let mut a = acc.expect("refinement >= 1");
    a.scale(1.0 / s as f64);
    a
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryState {
    pub amplitudes: Vec<Complex64>,
    /// ln of the unnormalized norm
    pub log_norm: f64,
    pub step: usize,
    pub qubits: usize,
}

impl TrajectoryState {
    /// Each system qubit maximally entangled with its reference partner.
    pub fn bell_pairs(system_qubits: usize) -> Self {
        let qubits = 2 * system_qubits;
        let dim = 1usize << qubits;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        let amp = (0.5f64).powf(system_qubits as f64 / 2.0);
        for x in 0..1usize << system_qubits {
            amplitudes[x | (x << system_qubits)] = Complex64::new(amp, 0.0);
        }
        TrajectoryState { amplitudes, log_norm: 0.0, step: 0, qubits }
    }

    pub fn norm(&self) -> f64 {
        norm_sqr_pairwise(&self.amplitudes).sqrt()
    }

    /// Trajectory weight tr ρ = e^{2 log_norm}.
    pub fn weight(&self) -> f64 {
        (2.0 * self.log_norm).exp()
    }

    fn apply_one(&mut self, q: usize, u: &[[Complex64; 2]; 2]) {
        let bit = 1usize << q;
        let amps = &mut self.amplitudes;
        for k in 0..amps.len() >> 1 {
            let x = insert_zero(k, q);
            let (a0, a1) = (amps[x], amps[x | bit]);
            amps[x] = u[0][0] * a0 + u[0][1] * a1;
            amps[x | bit] = u[1][0] * a0 + u[1][1] * a1;
        }
    }

    /// Applies a 4×4 gate in the basis |s_a s_b⟩, index 2s_a + s_b.
    pub fn apply_two(&mut self, a: usize, b: usize, u: &Matrix4<Complex64>) {
        let (ba, bb) = (1usize << a, 1usize << b);
        let (lo, hi) = (a.min(b), a.max(b));
        let m: [[Complex64; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| u[(i, j)]));
        let amps = &mut self.amplitudes;
        for k in 0..amps.len() >> 2 {
            let x = insert_zero(insert_zero(k, lo), hi);
            let idx = [x, x | bb, x | ba, x | ba | bb];
            let v = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
            for (row, &i) in idx.iter().enumerate() {
                let r = &m[row];
                amps[i] = r[0] * v[0] + r[1] * v[1] + r[2] * v[2] + r[3] * v[3];
            }
        }
    }

    /// Normalized reduced density matrix spectrum of the listed qubits.
    pub fn reduced_spectrum(&self, subset: &[usize]) -> Result<Vec<f64>> {
        let mut mask = 0usize;
        for &q in subset {
            if q >= self.qubits || mask & (1 << q) != 0 {
                return invalid("subset qubits must be distinct and in range");
            }
            mask |= 1 << q;
        }
        let rest: Vec<usize> = (0..self.qubits).filter(|q| mask & (1 << q) == 0).collect();
        let (na, nb) = (1usize << subset.len(), 1usize << rest.len());
        let nrm = self.norm();
        if !(nrm > 0.0) {
            return invalid("zero-norm state has no reduced density matrix");
        }
        let mut m = DMatrix::<Complex64>::zeros(na, nb);
        for (x, amp) in self.amplitudes.iter().enumerate() {
            let row = gather(x, subset);
            let col = gather(x, &rest);
            m[(row, col)] = amp / nrm;
        }
        let rho = if na <= nb { &m * m.adjoint() } else { m.adjoint() * &m };
        let mut ev: Vec<f64> = rho.symmetric_eigenvalues().iter().map(|v| v.max(0.0)).collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        Ok(ev)
    }
}

fn norm_sqr_pairwise(v: &[Complex64]) -> f64 {
    if v.len() <= 64 {
        return v.iter().map(|a| a.norm_sqr()).sum();
    }
    let mid = v.len() / 2;
    norm_sqr_pairwise(&v[..mid]) + norm_sqr_pairwise(&v[mid..])
}

fn insert_zero(k: usize, bit: usize) -> usize {
    let low = k & ((1 << bit) - 1);
    ((k >> bit) << (bit + 1)) | low
}

fn gather(x: usize, bits: &[usize]) -> usize {
    bits.iter().enumerate().fold(0, |acc, (k, &q)| acc | (((x >> q) & 1) << k))
}

fn spin_matrices() -> [[[Complex64; 2]; 2]; 3] {
    let z = Complex64::new(0.0, 0.0);
    let h = Complex64::new(0.5, 0.0);
    let ih = Complex64::new(0.0, 0.5);
    [[[z, h], [h, z]], [[z, -ih], [ih, z]], [[h, z], [z, -h]]]
}

/// 4×4 matrix of Σ c_{αβ} S_a^α ⊗ S_b^β.
pub fn pair_matrix(c: &[[f64; 3]; 3]) -> Matrix4<Complex64> {
    let s = spin_matrices();
    let mut m = Matrix4::<Complex64>::zeros();
    for al in 0..3 {
        for be in 0..3 {
            if c[al][be] == 0.0 {
                continue;
            }
            for (i, j) in (0..4).flat_map(|i| (0..4).map(move |j| (i, j))) {
                m[(i, j)] += s[al][i >> 1][j >> 1] * s[be][i & 1][j & 1] * c[al][be];
            }
        }
    }
    m
}

/// e^{-iHdt/2} by symmetric Trotter splitting over the pair terms.
pub fn apply_unitary_step(state: &mut TrajectoryState, coeffs: &StepCoefficients, n: usize, dt: f64) -> Result<()> {
    let pairs = coeffs.pair_hamiltonians(n);
    let gate = |p: &PairHamiltonian, tau: f64| (pair_matrix(&p.c) * Complex64::new(0.0, -tau)).exp();
    if let Some((last, head)) = pairs.split_last() {
        let gates: Vec<Matrix4<Complex64>> = head.iter().map(|p| gate(p, dt / 4.0)).collect();
        for (p, u) in head.iter().zip(&gates) {
            state.apply_two(p.a, p.b, u);
        }
        state.apply_two(last.a, last.b, &gate(last, dt / 2.0));
        for (p, u) in head.iter().zip(&gates).rev() {
            state.apply_two(p.a, p.b, u);
        }
    }
    let nrm = state.norm();
    if (nrm - 1.0).abs() > NORM_DRIFT_TOL {
        return Err(Error::NormDrift((nrm - 1.0).abs()));
    }
    state.amplitudes.iter_mut().for_each(|a| *a /= nrm);
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasurementOutcome {
    Survived,
    Annihilated,
}

/// Eigenvectors of n̂·σ as columns (+1 first).
fn eigenbasis(n: &[f64; 3]) -> Option<[[Complex64; 2]; 2]> {
    let m = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if m == 0.0 {
        return None;
    }
    let th = (n[2] / m).clamp(-1.0, 1.0).acos();
    let ph = n[1].atan2(n[0]);
    let (c, s) = ((th / 2.0).cos(), (th / 2.0).sin());
    let e = Complex64::from_polar(1.0, ph);
    Some([[Complex64::new(c, 0.0), -e.conj() * s], [e * s, Complex64::new(c, 0.0)]])
}

fn adjoint2(u: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    [[u[0][0].conj(), u[1][0].conj()], [u[0][1].conj(), u[1][1].conj()]]
}

/// Post-selected weak measurement of 𝒪_r = Σ_i n_i·S_i on every cluster:
/// M_r = (cos θ𝒪_r - sin θ𝒪_r)/√2 with θ = dt/2.
pub fn apply_measurement_step(state: &mut TrajectoryState, fields: &[[f64; 3]], n: usize, dt: f64) -> Result<MeasurementOutcome> {
    let nq = fields.len();
    if n == 0 || nq % n != 0 || 2 * nq != state.qubits {
        return invalid("field count must match the system qubits");
    }
    let theta = dt / 2.0;
    let bases: Vec<Option<[[Complex64; 2]; 2]>> = fields.iter().map(eigenbasis).collect();
    let mags: Vec<f64> = fields.iter().map(|f| 0.5 * (f[0] * f[0] + f[1] * f[1] + f[2] * f[2]).sqrt()).collect();
    for (q, b) in bases.iter().enumerate() {
        if let Some(u) = b {
            state.apply_one(q, &adjoint2(u));
        }
    }
    let clusters = nq / n;
    let sys_mask = (1usize << nq) - 1;
    let mut factor = vec![0.0; 1 << nq];
    for (x, f) in factor.iter_mut().enumerate() {
        let mut prod = 1.0;
        for r in 0..clusters {
            let lam: f64 = (0..n).map(|i| if (x >> (r * n + i)) & 1 == 0 { mags[r * n + i] } else { -mags[r * n + i] }).sum();
            prod *= ((theta * lam).cos() - (theta * lam).sin()) / std::f64::consts::SQRT_2;
        }
        *f = prod;
    }
    for (x, a) in state.amplitudes.iter_mut().enumerate() {
        *a *= factor[x & sys_mask];
    }
    for (q, b) in bases.iter().enumerate() {
        if let Some(u) = b {
            state.apply_one(q, u);
        }
    }
    let nrm = state.norm();
    if !(nrm > 0.0) || !nrm.is_finite() {
        state.log_norm = f64::NEG_INFINITY;
        return Ok(MeasurementOutcome::Annihilated);
    }
    state.log_norm += nrm.ln();
    state.amplitudes.iter_mut().for_each(|a| *a /= nrm);
    Ok(MeasurementOutcome::Survived)
}

/// Per-trajectory data needed by every estimator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub log_norm: f64,
    pub annihilated: bool,
    /// spectra of ρ̃_A for each requested subset
    pub spectra: Vec<Vec<f64>>,
}

pub fn run_trajectory(params: &CircuitParams, trajectory: u64, subsets: &[Vec<usize>]) -> Result<TrajectoryRecord> {
    let mut state = TrajectoryState::bell_pairs(params.system_qubits());
    for step in 0..params.n_steps() {
        let c = step_coefficients(params, trajectory, step as u64);
        apply_unitary_step(&mut state, &c, params.n, params.dt)?;
        if apply_measurement_step(&mut state, &c.fields, params.n, params.dt)? == MeasurementOutcome::Annihilated {
            return Ok(TrajectoryRecord { log_norm: f64::NEG_INFINITY, annihilated: true, spectra: vec![Vec::new(); subsets.len()] });
        }
        state.step = step + 1;
    }
    let spectra = subsets.iter().map(|s| state.reduced_spectrum(s)).collect::<Result<Vec<_>>>()?;
    Ok(TrajectoryRecord { log_norm: state.log_norm, annihilated: false, spectra })
}

pub fn run_trajectories(params: &CircuitParams, subsets: &[Vec<usize>]) -> Result<Vec<TrajectoryRecord>> {
    params.validate()?;
    let nq = params.system_qubits();
    if subsets.iter().flatten().any(|&q| q >= 2 * nq) {
        return invalid("subset refers to a qubit outside Q ∪ R");
    }
    (0..params.n_traj as u64).into_par_iter().map(|t| run_trajectory(params, t, subsets)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    /// Kish effective sample size of the weights entering the ratio
    pub n_effective: f64,
    pub n_annihilated: usize,
}

/// value = f(Σa/Σb) with a jackknife standard error.
fn ratio_estimate(a: &[f64], b: &[f64], f: impl Fn(f64) -> f64) -> (f64, f64) {
    let sa = pairwise_sum(a);
    let sb = pairwise_sum(b);
    let value = f(sa / sb);
    let n = a.len();
    if n < 2 {
        return (value, f64::NAN);
    }
    let loo: Vec<f64> = a.iter().zip(b).map(|(x, y)| f((sa - x) / (sb - y))).collect();
    let mean = pairwise_sum(&loo) / n as f64;
    let var = pairwise_sum(&loo.iter().map(|v| (v - mean).powi(2)).collect::<Vec<_>>());
    (value, ((n - 1) as f64 / n as f64 * var).sqrt())
}

fn kish(b: &[f64]) -> f64 {
    let s = pairwise_sum(b);
    let s2 = pairwise_sum(&b.iter().map(|v| v * v).collect::<Vec<_>>());
    if s2 > 0.0 {
        s * s / s2
    } else {
        0.0
    }
}

/// Shifted weights e^{2p(ℓ - ℓ_max)}, zero for annihilated trajectories.
fn shifted_weights(records: &[TrajectoryRecord], power: f64) -> Result<Vec<f64>> {
    let lmax = records.iter().filter(|r| !r.annihilated).map(|r| r.log_norm).fold(f64::NEG_INFINITY, f64::max);
    if !lmax.is_finite() {
        return Err(Error::InsufficientTrajectories { stderr: f64::INFINITY, tolerance: 0.0 });
    }
    Ok(records.iter().map(|r| if r.annihilated { 0.0 } else { (2.0 * power * (r.log_norm - lmax)).exp() }).collect())
}

fn trace_power(spectrum: &[f64], n: f64) -> f64 {
    spectrum.iter().filter(|&&l| l > 0.0).map(|l| l.powf(n)).sum()
}

fn von_neumann(spectrum: &[f64]) -> f64 {
    -spectrum.iter().filter(|&&l| l > 0.0).map(|l| l * l.ln()).sum::<f64>()
}

/// χ^{(n,m)} = ln[𝔼(tr ρ_A^n)^m / 𝔼(tr ρ_A)^{nm}] / (m(1-n)).
pub fn chi_estimate(records: &[TrajectoryRecord], subset: usize, n: f64, m: f64) -> Result<Estimate> {
    if n == 1.0 || m == 0.0 {
        return invalid("chi needs n != 1 and m != 0");
    }
    let w = shifted_weights(records, n * m)?;
    let a: Vec<f64> = records.iter().zip(&w).map(|(r, w)| if *w == 0.0 { 0.0 } else { w * trace_power(&r.spectra[subset], n).powf(m) }).collect();
    let (value, stderr) = ratio_estimate(&a, &w, |x| x.ln() / (m * (1.0 - n)));
    Ok(Estimate { value, stderr, n_effective: kish(&w), n_annihilated: records.iter().filter(|r| r.annihilated).count() })
}

/// Ŝ^{(n)}_A = ln[𝔼 tr ρ_A^n / 𝔼(tr ρ_A)^n] / (1-n).
pub fn quasi_renyi_from_records(records: &[TrajectoryRecord], subset: usize, n: f64) -> Result<Estimate> {
    chi_estimate(records, subset, n, 1.0)
}

pub fn estimate_quasi_renyi(params: &CircuitParams, subset: &[usize], n: f64, tolerance: Option<f64>) -> Result<Estimate> {
    let records = run_trajectories(params, &[subset.to_vec()])?;
    let e = quasi_renyi_from_records(&records, 0, n)?;
    if let Some(tol) = tolerance {
        if !(e.stderr <= tol) {
            return Err(Error::InsufficientTrajectories { stderr: e.stderr, tolerance: tol });
        }
    }
    Ok(e)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicaCheck {
    /// -∂_n ln[𝔼 tr ρ_A^n / 𝔼(tr ρ_A)^n] at n = 1 by central difference
    pub lhs: f64,
    /// 𝔼[tr ρ · S(ρ̃_A)] / 𝔼[tr ρ]
    pub rhs: f64,
    pub gap: f64,
    /// Monte Carlo error of the weighted von Neumann average
    pub stderr: f64,
}

pub const REPLICA_STEP: f64 = 1e-3;

pub fn replica_limit_from_records(records: &[TrajectoryRecord], subset: usize) -> Result<ReplicaCheck> {
    let log_ratio = |n: f64| -> Result<f64> {
        let w = shifted_weights(records, n)?;
        let a: Vec<f64> = records.iter().zip(&w).map(|(r, w)| if *w == 0.0 { 0.0 } else { w * trace_power(&r.spectra[subset], n) }).collect();
        Ok((pairwise_sum(&a) / pairwise_sum(&w)).ln())
    };
    let h = REPLICA_STEP;
    let lhs = -(log_ratio(1.0 + h)? - log_ratio(1.0 - h)?) / (2.0 * h);
    let w = shifted_weights(records, 1.0)?;
    let a: Vec<f64> = records.iter().zip(&w).map(|(r, w)| if *w == 0.0 { 0.0 } else { w * von_neumann(&r.spectra[subset]) }).collect();
    let (rhs, stderr) = ratio_estimate(&a, &w, |x| x);
    Ok(ReplicaCheck { lhs, rhs, gap: lhs - rhs, stderr })
}

pub fn replica_limit_identity_check(params: &CircuitParams, subset: &[usize]) -> Result<ReplicaCheck> {
    if 2 * params.system_qubits() > 16 {
        return Err(Error::Resource("replica check limited to 2NL <= 16".into()));
    }
    let records = run_trajectories(params, &[subset.to_vec()])?;
    replica_limit_from_records(&records, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, l: usize, gamma: f64, t: f64, n_traj: usize) -> CircuitParams {
        CircuitParams::new(n, l, 1.0, 1.0, 1.0, gamma, 0.01, t, 11, n_traj).unwrap()
    }

    #[test]
    fn bell_state_is_maximally_mixed() {
        let s = TrajectoryState::bell_pairs(3);
        assert!((s.norm() - 1.0).abs() < 1e-15);
        let sp = s.reduced_spectrum(&[0, 1]).unwrap();
        assert!(sp.iter().all(|v| (v - 0.25).abs() < 1e-14));
        let sp = s.reduced_spectrum(&[0, 3]).unwrap();
        assert!((sp[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_time_entropy() {
        let p = params(2, 2, 1.0, 0.0, 4);
        let e = estimate_quasi_renyi(&p, &p.cluster_block(0, 1), 2.0, None).unwrap();
        assert!((e.value - 2.0 * std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn inter_vanishes_without_g() {
        let mut p = params(2, 3, 1.0, 0.1, 1);
        p.g = 0.0;
        let c = sample_step_hamiltonian(&p, &mut step_rng(1, 0, 0));
        assert!(c.inter.iter().all(|t| t.c.iter().flatten().all(|&v| v == 0.0)));
        let a = sample_step_hamiltonian(&p, &mut step_rng(1, 0, 0));
        assert_eq!(a, c);
    }

    #[test]
    fn single_term_matches_closed_form() {
        // J σx⊗σx = 4J Sx⊗Sx
        let jx = 0.7;
        let dt = 0.01;
        let mut c = StepCoefficients { intra: vec![IntraTerm { r: 0, i: 0, j: 1, c: [[0.0; 3]; 3] }], inter: vec![], fields: vec![[0.0; 3]; 2] };
        c.intra[0].c[0][0] = 4.0 * jx;
        let mut s = TrajectoryState::bell_pairs(2);
        let before = s.amplitudes.clone();
        apply_unitary_step(&mut s, &c, 2, dt).unwrap();
        // exp(-i J dt/2 σxσx) = cos - i sin σxσx; σxσx flips bits 0 and 1
        let ang = jx * dt / 2.0;
        for x in 0..before.len() {
            let want = before[x] * ang.cos() - Complex64::i() * ang.sin() * before[x ^ 0b11];
            assert!((s.amplitudes[x] - want).norm() < 1e-12);
        }
        assert_eq!(s.log_norm, 0.0);
    }

    #[test]
    fn measurement_two_by_two() {
        let mut s = TrajectoryState::bell_pairs(1);
        let theta: f64 = 0.02;
        // 𝒪 = σz = 2 Sz
        apply_measurement_step(&mut s, &[[0.0, 0.0, 2.0]], 1, 2.0 * theta).unwrap();
        let up = (theta.cos() - theta.sin()) / std::f64::consts::SQRT_2;
        let dn = (theta.cos() + theta.sin()) / std::f64::consts::SQRT_2;
        let norm = ((up * up + dn * dn) / 2.0).sqrt();
        assert!((s.log_norm - norm.ln()).abs() < 1e-14);
        let a = 0.5f64.sqrt();
        assert!((s.amplitudes[0].re - a * up / norm).abs() < 1e-14);
        assert!((s.amplitudes[3].re - a * dn / norm).abs() < 1e-14);
        let mut z = TrajectoryState::bell_pairs(1);
        apply_measurement_step(&mut z, &[[0.0; 3]], 1, 0.01).unwrap();
        assert!((z.log_norm - 0.5f64.sqrt().ln()).abs() < 1e-15);
    }

    #[test]
    fn measurement_taylor() {
        // (cos θO - sin θO) vs 1 - θO - θ²O²/2 on a generic direction
        let n = [0.3, -0.5, 0.8];
        let dt = 2e-3;
        let theta = dt / 2.0;
        let mut s = TrajectoryState::bell_pairs(1);
        apply_measurement_step(&mut s, &[n], 1, dt).unwrap();
        let sm = spin_matrices();
        let mut op = [[Complex64::new(0.0, 0.0); 2]; 2];
        for a in 0..3 {
            for i in 0..2 {
                for j in 0..2 {
                    op[i][j] += sm[a][i][j] * n[a];
                }
            }
        }
        let mut o2 = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    o2[i][j] += op[i][k] * op[k][j];
                }
            }
        }
        let a = 0.5f64.sqrt();
        let scale = (2.0 * s.log_norm).exp().sqrt() * std::f64::consts::SQRT_2;
        for x in [0usize, 1, 2, 3] {
            let (q, r) = (x & 1, x >> 1);
            // column r of M applied to the Bell amplitude a|rr⟩
            let id = if q == r { 1.0 } else { 0.0 };
            let m = Complex64::new(id, 0.0) - op[q][r] * theta - o2[q][r] * (theta * theta / 2.0);
            let got = s.amplitudes[x] * scale;
            assert!((got - m * a).norm() < 1e-8, "{x}: {got} {}", m * a);
        }
    }

    #[test]
    fn complement_symmetry_and_bounds() {
        let p = params(1, 2, 1.0, 0.3, 1);
        let rec = run_trajectory(&p, 0, &[vec![0], vec![1, 2, 3], vec![0, 1]]).unwrap();
        let pa: f64 = rec.spectra[0].iter().map(|v| v * v).sum();
        let pc: f64 = rec.spectra[1].iter().map(|v| v * v).sum();
        assert!((pa - pc).abs() < 1e-10);
        assert!(pa >= 0.5 - 1e-12 && pa <= 1.0 + 1e-12);
        let p2: f64 = rec.spectra[2].iter().map(|v| v * v).sum();
        assert!(p2 >= 0.25 - 1e-12 && p2 <= 1.0 + 1e-12);
    }

    #[test]
    fn unitary_only_replica_identity() {
        let mut p = params(1, 2, 0.0, 0.2, 1);
        p.gamma = 0.0;
        let recs = run_trajectories(&p, &[vec![0]]).unwrap();
        let c = replica_limit_from_records(&recs, 0).unwrap();
        assert!(c.gap.abs() < 1e-6, "{c:?}");
    }

    #[test]
    fn deterministic_estimates() {
        let p = params(1, 2, 1.0, 0.1, 8);
        let a = estimate_quasi_renyi(&p, &[0], 2.0, None).unwrap();
        let b = estimate_quasi_renyi(&p, &[0], 2.0, None).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert!(matches!(estimate_quasi_renyi(&p, &[0], 2.0, Some(0.0)), Err(Error::InsufficientTrajectories { .. })) || a.stderr == 0.0);
    }

    #[test]
    fn parameter_bounds() {
        assert!(CircuitParams::new(4, 4, 1.0, 1.0, 1.0, 1.0, 0.01, 1.0, 0, 1).is_err());
        assert!(CircuitParams::new(1, 2, 1.0, 1.0, 1.0, 1.0, 0.02, 1.0, 0, 1).is_err());
        assert!(CircuitParams::new(1, 2, 1.0, 1.0, 1.0, 20.0, 0.01, 1.0, 0, 1).is_err());
    }
}
