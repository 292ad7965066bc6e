//! Weak-coupling closed-form flows and the single-qubit steady state that
//! feeds them.

use faer::{c64, linalg::solvers::Solve, Mat};

use crate::error::{Error, Result};
use crate::liouvillian::assemble;
use crate::model::ModelParams;
use crate::ops::abs;
use crate::rates::{bose, prefactor_g, probe_rates, RatePair};

const STATE_TOL: f64 = 1e-12;

/// Qubit density matrix in the energy basis, `|0⟩` the ground state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub p0: f64,
    pub p1: f64,
    pub rho01: c64,
}

impl QubitState {
    pub fn new(p0: f64, p1: f64, rho01: c64) -> Result<Self> {
        if !(p0.is_finite() && p1.is_finite() && rho01.re.is_finite() && rho01.im.is_finite()) {
            return Err(Error::InvalidState("entries must be finite"));
        }
        if (p0 + p1 - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState("populations must sum to 1"));
        }
        if p0 < -STATE_TOL || p1 < -STATE_TOL || p0 > 1.0 + STATE_TOL || p1 > 1.0 + STATE_TOL {
            return Err(Error::InvalidState("populations must lie in [0, 1]"));
        }
        if rho01.norm_sqr() > p0 * p1 + STATE_TOL {
            return Err(Error::InvalidState("coherence exceeds the positivity bound"));
        }
        Ok(Self { p0, p1, rho01 })
    }

    /// Diagonal state with `p1 = p`.
    pub fn incoherent(p: f64) -> Result<Self> {
        Self::new(1.0 - p, p, c64::new(0.0, 0.0))
    }

    pub fn coherence_sq(&self) -> f64 {
        self.rho01.norm_sqr()
    }
}

/// Steady state of the single-replica generator. With `include_probe` unset
/// the probe coupling is switched off before solving.
pub fn steady_state_qubit(params: &ModelParams, include_probe: bool) -> Result<QubitState> {
    let mut p = params.validate()?;
    if !include_probe {
        p.gamma_b = 0.0;
    }
    let l = assemble(1, &p)?.total;
    let scale = l.norm_l1().max(1.0);

    let sv = l.matrix().singular_values().map_err(|_| Error::Eigensolver { dim: 4 })?;
    let kernel = sv.iter().filter(|&&s| s <= 1e-10 * scale).count();
    if kernel != 1 {
        return Err(Error::DegenerateSteadyState(kernel));
    }

    let one = c64::new(1.0, 0.0);
    let zero = c64::new(0.0, 0.0);
    let mut a = l.matrix().to_owned();
    for col in 0..4 {
        a[(0, col)] = if col == 0 || col == 3 { one } else { zero };
    }
    let mut rhs = Mat::<c64>::zeros(4, 1);
    rhs[(0, 0)] = one;
    let x = a.full_piv_lu().solve(&rhs);

    let p1 = x[(3, 0)].re.clamp(0.0, 1.0);
    QubitState::new(1.0 - p1, p1, x[(1, 0)])
}

/// Residual `‖L vec ρ‖₁` of a candidate steady state.
pub fn steady_state_residual(params: &ModelParams, state: &QubitState, include_probe: bool) -> Result<f64> {
    let mut p = params.validate()?;
    if !include_probe {
        p.gamma_b = 0.0;
    }
    let l = assemble(1, &p)?.total;
    let v = [
        c64::new(state.p0, 0.0),
        state.rho01,
        state.rho01.conj(),
        c64::new(state.p1, 0.0),
    ];
    Ok(l.apply(&v).iter().map(|z| abs(*z)).sum())
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WeakOptions {
    /// Multiplies the Rényi flow by this transition frequency, reproducing
    /// the literal dimensionful formula. `None` keeps rate units.
    pub literal_omega: Option<f64>,
}

fn exchange(rates: RatePair, state: &QubitState) -> f64 {
    rates.down * state.p1 - rates.up * state.p0 - rates.net() * state.coherence_sq()
}

fn single_quantum_rates(params: &ModelParams) -> Result<RatePair> {
    probe_rates(1, params.theta_b, params.gamma_b)
}

/// Weak-coupling Rényi-M flow `G_M (Γ↓ p1 − Γ↑ p0 − Γ|ρ01|²)`.
pub fn weak_flow_renyi(params: &ModelParams, m: usize, state: &QubitState, opts: &WeakOptions) -> Result<f64> {
    if m < 2 {
        return Err(Error::ReplicaCount { min: 2, got: m });
    }
    let p = params.validate()?;
    let g = prefactor_g(m, p.theta_b)?;
    let omega = opts.literal_omega.unwrap_or(1.0);
    Ok(g * omega * exchange(single_quantum_rates(&p)?, state))
}

/// Weak-coupling von Neumann flow `(Γ↓ p1 − Γ↑ p0 − Γ|ρ01|²) θ_b`.
pub fn weak_flow_vn_qubit(params: &ModelParams, state: &QubitState) -> Result<f64> {
    let p = params.validate()?;
    Ok(exchange(single_quantum_rates(&p)?, state) * p.theta_b)
}

/// Incoherent part of [`weak_flow_vn_qubit`], coherence dropped.
pub fn weak_flow_vn_incoherent(params: &ModelParams, state: &QubitState) -> Result<f64> {
    let diag = QubitState { rho01: c64::new(0.0, 0.0), ..*state };
    weak_flow_vn_qubit(params, &diag)
}

/// Von Neumann flow from a thermal oscillator at `θ_h` into a probe at `θ_b`.
pub fn weak_flow_vn_oscillator(theta_h: f64, theta_b: f64, chi_b: f64) -> Result<f64> {
    for t in [theta_h, theta_b] {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::NonPositive(t));
        }
    }
    Ok((bose(theta_h)? - bose(theta_b)?) * chi_b * theta_b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn undriven(theta_e: f64) -> ModelParams {
        ModelParams { omega: 0.0, theta_e, ..ModelParams::default() }
    }

    #[test]
    fn state_validation() {
        assert!(QubitState::new(0.6, 0.4, c64::new(0.1, 0.2)).is_ok());
        assert!(QubitState::new(0.6, 0.5, c64::new(0.0, 0.0)).is_err());
        assert!(QubitState::new(1.2, -0.2, c64::new(0.0, 0.0)).is_err());
        assert!(QubitState::new(0.5, 0.5, c64::new(0.6, 0.0)).is_err());
    }

    #[test]
    fn thermal_steady_state() {
        let s = steady_state_qubit(&undriven(1.0), false).unwrap();
        assert!((s.p1 - 0.268_941_421_369_995_1).abs() < 1e-12);
        assert!(abs(s.rho01) < 1e-14);
    }

    #[test]
    fn cold_steady_state() {
        let s = steady_state_qubit(&undriven(60.0), false).unwrap();
        assert!(s.p1 < 1e-20 && (s.p0 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn driven_residual() {
        let p = ModelParams { omega: 1.0, theta_e: 2.0, gamma_b: 0.0, ..ModelParams::default() };
        let s = steady_state_qubit(&p, true).unwrap();
        assert!(steady_state_residual(&p, &s, true).unwrap() <= 1e-12);
        assert!(abs(s.rho01) > 1e-3);
        for (omega, gb) in [(0.3, 0.05), (2.0, 1.0), (5.0, 0.5)] {
            let p = ModelParams { omega, gamma_b: gb, theta_e: 3.0, ..ModelParams::default() };
            let s = steady_state_qubit(&p, true).unwrap();
            assert!(steady_state_residual(&p, &s, true).unwrap() <= 1e-12 * 4.0);
        }
    }

    #[test]
    fn degenerate_without_dissipation() {
        let p = ModelParams { omega: 0.0, gamma_e: 1e-300, gamma_b: 0.0, ..ModelParams::default() };
        assert!(matches!(steady_state_qubit(&p, false), Err(Error::DegenerateSteadyState(_))));
    }

    #[test]
    fn empty_qubit_cold_probe() {
        let p = ModelParams { theta_b: 60.0, gamma_b: 0.5, ..ModelParams::default() };
        let s = QubitState::incoherent(0.0).unwrap();
        let f = weak_flow_renyi(&p, 2, &s, &WeakOptions::default()).unwrap();
        assert!(f.abs() < 1e-20);
    }

    #[test]
    fn thermal_renyi_flow() {
        let p = ModelParams { theta_e: 1.0, theta_b: 20.0, omega: 0.0, gamma_b: 0.05, ..ModelParams::default() };
        let s = QubitState::incoherent(1.0 / (1.0 + core::f64::consts::E)).unwrap();
        let f = weak_flow_renyi(&p, 2, &s, &WeakOptions::default()).unwrap();
        let want = prefactor_g(2, 20.0).unwrap() * probe_rates(1, 20.0, 0.05).unwrap().down * s.p1;
        assert!((f - want).abs() < 1e-7 * want);
        let lit = weak_flow_renyi(&p, 2, &s, &WeakOptions { literal_omega: Some(3.0) }).unwrap();
        assert!((lit - 3.0 * f).abs() < 1e-15);
        assert!(weak_flow_renyi(&p, 1, &s, &WeakOptions::default()).is_err());
    }

    #[test]
    fn probe_equilibrated_state_has_no_vn_flow() {
        let p = ModelParams { theta_b: 2.5, gamma_b: 0.8, ..ModelParams::default() };
        let r = probe_rates(1, 2.5, 0.8).unwrap();
        let s = QubitState::incoherent(r.up / (r.up + r.down)).unwrap();
        assert!(weak_flow_vn_qubit(&p, &s).unwrap().abs() < 1e-15);
    }

    #[test]
    fn oscillator_flow() {
        assert_eq!(weak_flow_vn_oscillator(2.0, 2.0, 1.0).unwrap(), 0.0);
        assert!(weak_flow_vn_oscillator(1.0, 5.0, 1.0).unwrap() > 0.0);
        assert!(weak_flow_vn_oscillator(5.0, 1.0, 1.0).unwrap() < 0.0);
        assert_eq!(weak_flow_vn_oscillator(0.0, 1.0, 1.0).unwrap_err(), Error::NonPositive(0.0));
    }

    proptest! {
        #[test]
        fn oscillator_sign_flip(a in 0.1f64..10.0, b in 0.1f64..10.0) {
            let fwd = weak_flow_vn_oscillator(a, b, 1.0).unwrap();
            let back = weak_flow_vn_oscillator(b, a, 1.0).unwrap();
            prop_assert!(fwd * back <= 0.0);
            prop_assert!((fwd / b + back / a).abs() <= 1e-12 * (fwd / b).abs().max(1e-300));
        }

        #[test]
        fn coherence_lowers_flows(p1 in 0.01f64..0.99, r1 in 0.0f64..1.0, r2 in 0.0f64..1.0, phase in 0.0f64..6.3,
                                  theta_b in 0.5f64..30.0, gb in 0.01f64..2.0) {
            let p = ModelParams { theta_b, gamma_b: gb, ..ModelParams::default() };
            let bound = (p1 * (1.0 - p1)).sqrt();
            let (lo, hi) = if r1 < r2 { (r1, r2) } else { (r2, r1) };
            prop_assume!(hi - lo > 1e-6);
            let at = |r: f64| QubitState::new(1.0 - p1, p1, c64::new(r * bound * phase.cos(), r * bound * phase.sin())).unwrap();
            prop_assert!(weak_flow_vn_qubit(&p, &at(hi)).unwrap() < weak_flow_vn_qubit(&p, &at(lo)).unwrap());
            let opts = WeakOptions::default();
            prop_assert!(weak_flow_renyi(&p, 3, &at(hi), &opts).unwrap() < weak_flow_renyi(&p, 3, &at(lo), &opts).unwrap());
        }

        #[test]
        fn hot_incoherent_qubit_emits(p1 in 0.0f64..0.5, theta_b in 0.5f64..30.0, gb in 0.01f64..2.0) {
            let p = ModelParams { theta_b, gamma_b: gb, ..ModelParams::default() };
            let r = probe_rates(1, theta_b, gb).unwrap();
            prop_assume!(p1 >= r.up / (r.up + r.down));
            let s = QubitState::incoherent(p1).unwrap();
            prop_assert!(weak_flow_vn_qubit(&p, &s).unwrap() >= 0.0);
            prop_assert!(weak_flow_renyi(&p, 2, &s, &WeakOptions::default()).unwrap() >= 0.0);
        }
    }
}
