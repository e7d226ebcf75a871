use approx::assert_relative_eq;
use num_complex::Complex64;

use lrmon_core::circuit_mc::{
    apply_measurement_step, apply_unitary_step, chi_estimate, pair_matrix, quasi_renyi_from_records, run_trajectories, run_trajectory,
    sample_step_hamiltonian, step_rng, CircuitParams, StepCoefficients, TrajectoryState,
};

fn params(n: usize, l: usize, gamma: f64, t: f64, n_traj: usize) -> CircuitParams {
    CircuitParams::new(n, l, 1.0, 1.0, 1.0, gamma, 0.01, t, 17, n_traj).unwrap()
}

#[test]
fn inter_cluster_variance_at_separation_two() {
    let p = CircuitParams::new(1, 5, 1.0, 0.7, 0.9, 0.0, 0.01, 1.0, 5, 1).unwrap();
    let draws = 100_000;
    let mut sum2 = 0.0;
    let mut count = 0usize;
    for step in 0..draws {
        let c = sample_step_hamiltonian(&p, &mut step_rng(p.seed, 0, step));
        let t = c.inter.iter().find(|t| t.r1 == 0 && t.r2 == 2).unwrap();
        sum2 += t.c[1][2] * t.c[1][2];
        count += 1;
    }
    let var = sum2 / count as f64;
    let want = 0.7 * 2f64.powf(-1.8) / (1.5f64.powi(4) * 0.005);
    assert_relative_eq!(want, p.inter_variance(0, 2), max_relative = 1e-14);
    let sd = want * (2.0 / count as f64).sqrt();
    assert!((var - want).abs() < 3.0 * sd, "{var} vs {want} ± {sd}");
}

#[test]
fn coefficient_stream_is_deterministic() {
    let p = params(2, 3, 1.0, 1.0, 1);
    let a = sample_step_hamiltonian(&p, &mut step_rng(9, 4, 11));
    let b = sample_step_hamiltonian(&p, &mut step_rng(9, 4, 11));
    assert_eq!(a, b);
    let c = sample_step_hamiltonian(&p, &mut step_rng(9, 5, 11));
    assert_ne!(a, c);
}

fn energy(state: &TrajectoryState, coeffs: &StepCoefficients, n: usize) -> f64 {
    let mut e = 0.0;
    for h in coeffs.pair_hamiltonians(n) {
        let mut hs = state.clone();
        hs.apply_two(h.a, h.b, &pair_matrix(&h.c));
        let z: Complex64 = state.amplitudes.iter().zip(&hs.amplitudes).map(|(a, b)| a.conj() * b).sum();
        e += z.re;
    }
    e
}

#[test]
fn frozen_hamiltonian_energy_drift_is_second_order() {
    let p = params(1, 3, 2.0, 1.0, 1);
    let mut state = TrajectoryState::bell_pairs(p.system_qubits());
    for step in 0..20 {
        let c = sample_step_hamiltonian(&p, &mut step_rng(1, 0, step));
        apply_measurement_step(&mut state, &c.fields, p.n, p.dt).unwrap();
    }
    let h = sample_step_hamiltonian(&p, &mut step_rng(2, 0, 0));
    let e0 = energy(&state, &h, p.n);
    let drift = |dt: f64| {
        let mut s = state.clone();
        apply_unitary_step(&mut s, &h, p.n, dt).unwrap();
        (energy(&s, &h, p.n) - e0).abs()
    };
    let (d1, d2) = (drift(1e-3), drift(5e-4));
    assert!(d1 > 0.0);
    assert!(d2 < d1 / 3.5, "{d1:e} {d2:e}");
}

#[test]
fn fuzz_invariants() {
    let p = params(1, 3, 4.0, 1.0, 1);
    let mut state = TrajectoryState::bell_pairs(p.system_qubits());
    for step in 0..2000 {
        let c = sample_step_hamiltonian(&p, &mut step_rng(p.seed, 3, step));
        let before = state.log_norm;
        apply_unitary_step(&mut state, &c, p.n, p.dt).unwrap();
        assert!((state.log_norm - before).abs() < 1e-12);
        apply_measurement_step(&mut state, &c.fields, p.n, p.dt).unwrap();
        assert!(state.log_norm <= before);
        assert!(state.log_norm <= 0.0);
        for subset in [vec![0], vec![0, 1], vec![1, 2, 3]] {
            let purity: f64 = state.reduced_spectrum(&subset).unwrap().iter().map(|v| v * v).sum();
            let lo = 0.5f64.powi(subset.len() as i32);
            assert!(purity >= lo - 1e-12 && purity <= 1.0 + 1e-12);
        }
    }
}

#[test]
fn complement_in_q_and_r_has_equal_renyi2() {
    let p = params(1, 3, 1.0, 0.3, 1);
    let a = vec![0, 1];
    let complement = vec![2, 3, 4, 5];
    for t in 0..5 {
        let r = run_trajectory(&p, t, &[a.clone(), complement.clone()]).unwrap();
        let s2 = |s: &[f64]| -s.iter().map(|v| v * v).sum::<f64>().ln();
        assert!((s2(&r.spectra[0]) - s2(&r.spectra[1])).abs() < 1e-10);
    }
}

#[test]
fn unitary_dynamics_saturates_entropy() {
    let p = params(2, 3, 0.0, 20.0, 2);
    let recs = run_trajectories(&p, &[p.cluster_block(0, 1)]).unwrap();
    let e = quasi_renyi_from_records(&recs, 0, 2.0).unwrap();
    assert!((e.value - 2.0 * std::f64::consts::LN_2).abs() < 1e-10);
}

#[test]
fn chi_at_unit_m_matches_quasi_renyi() {
    let p = params(1, 2, 1.0, 0.5, 400);
    let recs = run_trajectories(&p, &[vec![0]]).unwrap();
    let s = quasi_renyi_from_records(&recs, 0, 2.0).unwrap();
    let exact = chi_estimate(&recs, 0, 2.0, 1.0).unwrap();
    assert_eq!(exact.value, s.value);
    for m in [1.0 - 1e-4, 1.0 + 1e-4] {
        let c = chi_estimate(&recs, 0, 2.0, m).unwrap();
        assert!((c.value - s.value).abs() < s.stderr, "{} {}", c.value, s.value);
    }
}

#[test]
fn estimates_are_bit_identical_across_runs() {
    let p = params(1, 2, 1.5, 0.2, 64);
    let a = quasi_renyi_from_records(&run_trajectories(&p, &[vec![0]]).unwrap(), 0, 2.0).unwrap();
    let b = quasi_renyi_from_records(&run_trajectories(&p, &[vec![0]]).unwrap(), 0, 2.0).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
}
