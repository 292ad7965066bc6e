//! Assembly of the M-replica Liouvillian.
//!
//! The generator is the sum of four parts acting on the vectorized
//! generalized density matrix `R_M`:
//!
//! * `unitary`: `-i Σ_k [H_k, R]` with the rotating-frame Hamiltonian
//!   `H = -δ/2 Z + Ω/2 X` on every replica;
//! * `environment`: an ordinary thermal Lindblad dissipator inside each
//!   replica;
//! * `probe_same`: the probe dissipator with both vertices in one replica,
//!   carrying the multi-replica rates and `e^{±θ_b}` weights;
//! * `probe_cross`: probe jumps that move an excitation between replicas `i`
//!   and `i + N`, weighted by `e^{±(N∓1)θ_b}`-type factors.
//!
//! Every rate × Boltzmann factor is evaluated through
//! [`correlator`](crate::rates::correlator) so that cold probes stay finite.

use faer::{c64, Mat};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::ops::{self, add_left, add_right, add_sandwich, ReplicaOperator, SuperOperator};
use crate::rates::{correlator, env_rates};

/// Largest replica count [`assemble`] will build (`4^7 = 16384`).
pub const DEFAULT_MAX_REPLICAS: usize = 7;

const I: c64 = c64 { re: 0.0, im: 1.0 };

fn re(x: f64) -> c64 {
    c64::new(x, 0.0)
}

#[derive(Debug, Clone)]
pub struct LiouvillianParts {
    pub unitary: SuperOperator,
    pub environment: SuperOperator,
    pub probe_same: SuperOperator,
    pub probe_cross: SuperOperator,
    pub total: SuperOperator,
    pub replicas: usize,
    pub params: ModelParams,
}

/// Lowering and raising operators for every replica, index 0 = replica 1.
struct Ladders {
    lower: alloc::vec::Vec<ReplicaOperator>,
    raise: alloc::vec::Vec<ReplicaOperator>,
}

impl Ladders {
    fn new(m: usize) -> Result<Self> {
        let lower = (1..=m).map(|k| ops::lowering(k, m)).collect::<Result<alloc::vec::Vec<_>>>()?;
        let raise = lower.iter().map(ReplicaOperator::adjoint).collect();
        Ok(Self { lower, raise })
    }
}

fn require_replicas(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::ReplicaCount { min: 1, got: 0 });
    }
    Ok(())
}

fn add_commutator(target: &mut Mat<c64>, coeff: c64, h: &ReplicaOperator) {
    add_left(target, coeff, h.matrix());
    add_right(target, -coeff, h.matrix());
}

fn add_anticommutator(target: &mut Mat<c64>, coeff: c64, a: &ReplicaOperator) {
    add_left(target, coeff, a.matrix());
    add_right(target, coeff, a.matrix());
}

pub fn unitary_part(m: usize, params: &ModelParams) -> Result<SuperOperator> {
    require_replicas(m)?;
    let mut out = SuperOperator::zeros(m);
    for k in 1..=m {
        let h = &ops::pauli_z(k, m)?.scale(re(-params.delta / 2.0))
            + &ops::pauli_x(k, m)?.scale(re(params.omega / 2.0));
        add_commutator(out.matrix_mut(), -I, &h);
    }
    Ok(out)
}

pub fn environment_part(m: usize, params: &ModelParams) -> Result<SuperOperator> {
    require_replicas(m)?;
    let rates = env_rates(params.theta_e, params.gamma_e)?;
    let ladders = Ladders::new(m)?;
    let mut out = SuperOperator::zeros(m);
    let target = out.matrix_mut();
    for (s, sd) in ladders.lower.iter().zip(&ladders.raise) {
        let excited = sd * s;
        let ground = s * sd;
        add_commutator(target, -I * params.lamb_e, &excited);
        add_sandwich(target, re(rates.up), sd.matrix(), s.matrix());
        add_anticommutator(target, re(-0.5 * rates.up), &ground);
        add_sandwich(target, re(rates.down), s.matrix(), sd.matrix());
        add_anticommutator(target, re(-0.5 * rates.down), &excited);
    }
    Ok(out)
}

/// Same-world probe dissipator. With `S^{N,M}` the generalized correlator,
/// the jump `σ† R σ` carries `S^{M-1,M}`, the jump `σ R σ†` carries `S^{1,M}`,
/// and the anticommutators carry `½S^{M,M}` (on `σ†σ`) and `½S^{0,M}` (on
/// `σσ†`).
pub fn probe_same_world(m: usize, params: &ModelParams) -> Result<SuperOperator> {
    require_replicas(m)?;
    let (theta, gamma) = (params.theta_b, params.gamma_b);
    let excite = correlator(m - 1, m, theta, gamma)?;
    let relax = correlator(1, m, theta, gamma)?;
    let down = correlator(m, m, theta, gamma)?;
    let up = correlator(0, m, theta, gamma)?;

    let ladders = Ladders::new(m)?;
    let mut out = SuperOperator::zeros(m);
    let target = out.matrix_mut();
    for (s, sd) in ladders.lower.iter().zip(&ladders.raise) {
        let excited = sd * s;
        let ground = s * sd;
        add_commutator(target, -I * params.lamb_b, &excited);
        add_sandwich(target, re(excite), sd.matrix(), s.matrix());
        add_anticommutator(target, re(-0.5 * down), &excited);
        add_sandwich(target, re(relax), s.matrix(), sd.matrix());
        add_anticommutator(target, re(-0.5 * up), &ground);
    }
    Ok(out)
}

/// Cross-world probe terms summed over all replica pairs `(i, i+N)`.
/// Zero for a single replica.
pub fn probe_cross_world(m: usize, params: &ModelParams) -> Result<SuperOperator> {
    require_replicas(m)?;
    let (theta, gamma) = (params.theta_b, params.gamma_b);
    let s = |n: usize| correlator(n, m, theta, gamma);

    let ladders = Ladders::new(m)?;
    let mut out = SuperOperator::zeros(m);
    let target = out.matrix_mut();
    for i in 0..m {
        for n in 1..m - i {
            let j = i + n;
            let (si, sdi) = (&ladders.lower[i], &ladders.raise[i]);
            let (sj, sdj) = (&ladders.lower[j], &ladders.raise[j]);

            // Γ↓ group: Γ↓ e^{-(N-1)θ}, Γ↓ e^{-(N+1)θ}, Γ↓ e^{-Nθ}
            add_sandwich(target, re(s(m + 1 - n)?), sj.matrix(), sdi.matrix());
            add_sandwich(target, re(s(m - n - 1)?), sdi.matrix(), sj.matrix());
            add_anticommutator(target, re(-s(m - n)?), &(sdi * sj));

            // Γ↑ group: Γ↑ e^{(N-1)θ}, Γ↑ e^{(N+1)θ}, Γ↑ e^{Nθ}
            add_sandwich(target, re(s(n - 1)?), sdj.matrix(), si.matrix());
            add_sandwich(target, re(s(n + 1)?), si.matrix(), sdj.matrix());
            add_anticommutator(target, re(-s(n)?), &(si * sdj));
        }
    }
    Ok(out)
}

/// Builds all parts and their sum, refusing more than
/// [`DEFAULT_MAX_REPLICAS`] replicas.
pub fn assemble(m: usize, params: &ModelParams) -> Result<LiouvillianParts> {
    assemble_with_ceiling(m, params, DEFAULT_MAX_REPLICAS)
}

pub fn assemble_with_ceiling(m: usize, params: &ModelParams, ceiling: usize) -> Result<LiouvillianParts> {
    require_replicas(m)?;
    if m > ceiling {
        return Err(Error::DimensionCeiling { replicas: m, ceiling });
    }
    let params = params.validate()?;
    let unitary = unitary_part(m, &params)?;
    let environment = environment_part(m, &params)?;
    let probe_same = probe_same_world(m, &params)?;
    let probe_cross = probe_cross_world(m, &params)?;

    let mut total = unitary.clone();
    total += &environment;
    total += &probe_same;
    total += &probe_cross;

    Ok(LiouvillianParts {
        unitary,
        environment,
        probe_same,
        probe_cross,
        total,
        replicas: m,
        params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::{devectorize, vectorize};
    use crate::rates::bose;
    use core::f64::consts::LN_2;

    fn point() -> ModelParams {
        ModelParams {
            delta: 0.0,
            omega: 1.0,
            theta_e: 2.0,
            theta_b: 20.0,
            gamma_b: 1.0,
            ..ModelParams::default()
        }
    }

    fn vec_index(m: usize, row: usize, col: usize) -> usize {
        row * (1 << m) + col
    }

    fn trace_defect(l: &SuperOperator) -> f64 {
        let d = 1 << l.replicas();
        (0..l.dim())
            .map(|col| {
                let s: c64 = (0..d).map(|i| l.get(vec_index(l.replicas(), i, i), col)).sum();
                ops::abs(s)
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn undriven_unitary_vanishes() {
        let p = ModelParams { omega: 0.0, ..point() };
        for m in 1..=3 {
            assert_eq!(unitary_part(m, &p).unwrap().norm_l1(), 0.0);
        }
    }

    #[test]
    fn drive_entry_sign() {
        let l = unitary_part(1, &point()).unwrap();
        assert_eq!(l.get(vec_index(1, 0, 0), vec_index(1, 0, 1)), c64::new(0.0, 0.5));
        assert_eq!(l.get(vec_index(1, 0, 0), vec_index(1, 1, 0)), c64::new(0.0, -0.5));
    }

    #[test]
    fn unitary_preserves_hermiticity() {
        let p = ModelParams { delta: 0.3, ..point() };
        let l = unitary_part(2, &p).unwrap();
        let rho = ReplicaOperator::from_matrix(Mat::from_fn(4, 4, |i, j| {
            let x = (i * 4 + j) as f64;
            if i == j {
                c64::new(x, 0.0)
            } else if i < j {
                c64::new(x, x / 3.0)
            } else {
                c64::new((j * 4 + i) as f64, -((j * 4 + i) as f64) / 3.0)
            }
        }))
        .unwrap();
        let out = devectorize(&l.apply(&vectorize(&rho))).unwrap();
        let adj = out.adjoint();
        for i in 0..4 {
            for j in 0..4 {
                assert!(ops::abs(out.get(i, j) - adj.get(i, j)) < 1e-14);
            }
        }
    }

    #[test]
    fn environment_single_replica_preserves_trace() {
        let l = environment_part(1, &point()).unwrap();
        assert!(trace_defect(&l) < 1e-13);
    }

    #[test]
    fn environment_is_kronecker_sum() {
        let p = ModelParams { lamb_e: 0.4, ..point() };
        let single = environment_part(1, &p).unwrap();
        let double = environment_part(2, &p).unwrap();
        // ρ = A ⊗ B on two replicas evolves as L₁(A) ⊗ B + A ⊗ L₁(B)
        let a = ReplicaOperator::from_matrix(Mat::from_fn(2, 2, |i, j| c64::new((i + 2 * j) as f64 + 0.5, i as f64))).unwrap();
        let b = ReplicaOperator::from_matrix(Mat::from_fn(2, 2, |i, j| c64::new(1.0 - (i * j) as f64, 0.25 * j as f64))).unwrap();
        let kron = |x: &ReplicaOperator, y: &ReplicaOperator| {
            ReplicaOperator::from_matrix(Mat::from_fn(4, 4, |r, c| x.get(r >> 1, c >> 1) * y.get(r & 1, c & 1))).unwrap()
        };
        let la = devectorize(&single.apply(&vectorize(&a))).unwrap();
        let lb = devectorize(&single.apply(&vectorize(&b))).unwrap();
        let want = &kron(&la, &b) + &kron(&a, &lb);
        let got = double.apply(&vectorize(&kron(&a, &b)));
        for (x, y) in got.iter().zip(vectorize(&want)) {
            assert!(ops::abs(*x - y) < 1e-13);
        }
    }

    #[test]
    fn single_replica_probe_is_standard_dissipator() {
        let p = ModelParams { gamma_b: 0.7, theta_b: 1.3, ..point() };
        let l = probe_same_world(1, &p).unwrap();
        assert!(trace_defect(&l) < 1e-13);
        // n̄(x) e^x = n̄(x) + 1: the e^{±θ} weights turn the M=1 rates into
        // the plain thermal pair
        let up = 0.7 * bose(1.3).unwrap();
        let down = up + 0.7;
        let excite = l.get(vec_index(1, 1, 1), vec_index(1, 0, 0));
        let relax = l.get(vec_index(1, 0, 0), vec_index(1, 1, 1));
        assert!((excite.re - up).abs() < 1e-14 && (relax.re - down).abs() < 1e-14);
    }

    #[test]
    fn same_world_excitation_weight_two_replicas() {
        let p = ModelParams { theta_b: LN_2, gamma_b: 1.0, ..point() };
        let l = probe_same_world(2, &p).unwrap();
        // σ₂† R σ₂ maps |00⟩⟨00| onto |01⟩⟨01|
        let got = l.get(vec_index(2, 1, 1), vec_index(2, 0, 0));
        assert!((got.re - 2.0 / 3.0).abs() < 1e-15 && got.im == 0.0);
    }

    #[test]
    fn decoupled_probe_vanishes() {
        let p = ModelParams { gamma_b: 0.0, ..point() };
        for m in 1..=3 {
            assert_eq!(probe_same_world(m, &p).unwrap().norm_l1(), 0.0);
            assert_eq!(probe_cross_world(m, &p).unwrap().norm_l1(), 0.0);
        }
    }

    #[test]
    fn cross_world_two_replica_weights() {
        let (theta, gamma) = (0.8, 0.6);
        let p = ModelParams { theta_b: theta, gamma_b: gamma, ..point() };
        let l = probe_cross_world(2, &p).unwrap();
        let down = gamma * (bose(2.0 * theta).unwrap() + 1.0);
        let up = gamma * bose(2.0 * theta).unwrap();
        // σ₂ R σ₁†: |01⟩⟨10| ↦ |00⟩⟨00|
        let g = |r: usize, c: usize, rr: usize, cc: usize| l.get(vec_index(2, r, c), vec_index(2, rr, cc)).re;
        assert!((g(0, 0, 1, 2) - down).abs() < 1e-14);
        // σ₁† R σ₂: |00⟩⟨00| ↦ |10⟩⟨01|, weight e^{-2θ}
        assert!((g(2, 1, 0, 0) - down * (-2.0 * theta).exp()).abs() < 1e-14);
        // σ₂† R σ₁: |00⟩⟨00| ↦ |01⟩⟨10|, weight 1 on Γ↑
        assert!((g(1, 2, 0, 0) - up).abs() < 1e-14);
        // σ₁ R σ₂†: |10⟩⟨01| ↦ |00⟩⟨00|, weight e^{2θ}
        assert!((g(0, 0, 2, 1) - up * (2.0 * theta).exp()).abs() < 1e-13);
        // anticommutator {σ₁†σ₂, R} with weight e^{-θ}: R = |01⟩⟨01| ↦ -|10⟩⟨01|
        assert!((g(2, 1, 1, 1) + down * (-theta).exp()).abs() < 1e-14);
        assert_eq!(probe_cross_world(1, &p).unwrap().norm_l1(), 0.0);
    }

    #[test]
    fn cross_world_three_replica_far_pair() {
        let gamma = 0.9;
        let p = ModelParams { theta_b: LN_2, gamma_b: gamma, ..point() };
        let l = probe_cross_world(3, &p).unwrap();
        // pair (1,3), N = 2: σ₁ R σ₃† carries Γ↑ e^{3θ} = 8γ/7.
        // |100⟩⟨001| ↦ |000⟩⟨000|; no other pair reaches this entry.
        let got = l.get(vec_index(3, 0, 0), vec_index(3, 4, 1));
        assert!((got.re - 8.0 * gamma / 7.0).abs() < 1e-14);
    }

    #[test]
    fn assemble_dimensions_and_sum() {
        for m in 1..=3 {
            let parts = assemble(m, &point()).unwrap();
            assert_eq!(parts.total.dim(), 1 << (2 * m));
            let mut sum = parts.unitary.clone();
            sum += &parts.environment;
            sum += &parts.probe_same;
            sum += &parts.probe_cross;
            assert!(sum.max_abs_diff(&parts.total) <= 1e-14);
        }
    }

    #[test]
    fn assemble_guards() {
        assert_eq!(assemble(0, &point()).unwrap_err(), Error::ReplicaCount { min: 1, got: 0 });
        assert_eq!(
            assemble(8, &point()).unwrap_err(),
            Error::DimensionCeiling { replicas: 8, ceiling: 7 }
        );
        assert_eq!(
            assemble_with_ceiling(3, &point(), 2).unwrap_err(),
            Error::DimensionCeiling { replicas: 3, ceiling: 2 }
        );
        let bad = ModelParams { theta_b: 0.0, ..point() };
        assert!(assemble(2, &bad).is_err());
    }

    #[test]
    fn single_replica_total_preserves_trace() {
        for (omega, gb, te) in [(0.0, 0.05, 1.0), (1.7, 1.0, 4.0), (0.3, 0.5, 0.2)] {
            let p = ModelParams { omega, gamma_b: gb, theta_e: te, theta_b: 3.0, delta: 0.4, lamb_e: 0.1, lamb_b: -0.2, ..point() };
            let l = assemble(1, &p).unwrap().total;
            assert!(trace_defect(&l) < 1e-12);
        }
    }
}
