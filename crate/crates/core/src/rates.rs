//! Bose factors, generalized multi-replica correlators and transition rates.
//!
//! Every rate that carries a Boltzmann prefactor is evaluated with the
//! exponents combined first, so cold probes (`θ_b` of order 100) never
//! overflow.

use crate::error::{Error, Result};

/// Bose occupation `1/(e^x - 1)` for `x > 0`.
pub fn bose(x: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::BoseDomain(x));
    }
    Ok(if x > 1.0 {
        let t = libm::exp(-x);
        t / -libm::expm1(-x)
    } else {
        1.0 / libm::expm1(x)
    })
}

/// Generalized correlator `S^{N,M} = γ e^{Nθ} n̄(Mθ)`, evaluated as
/// `γ e^{(N-M)θ} / (1 - e^{-Mθ})`.
pub fn correlator(n: usize, m: usize, theta: f64, gamma: f64) -> Result<f64> {
    if n > m {
        return Err(Error::CorrelatorOrder { n, m });
    }
    if m == 0 {
        return Err(Error::ReplicaCount { min: 1, got: 0 });
    }
    let mt = m as f64 * theta;
    if !(mt > 0.0 && mt.is_finite()) {
        return Err(Error::BoseDomain(mt));
    }
    let gap = (n as f64 - m as f64) * theta;
    Ok(gamma * libm::exp(gap) / -libm::expm1(-mt))
}

/// Absorption/emission rate pair obeying `down = up · e^{Mθ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePair {
    pub up: f64,
    pub down: f64,
}

impl RatePair {
    fn thermal(m: usize, theta: f64, gamma: f64) -> Result<Self> {
        let pair = Self {
            up: correlator(0, m, theta, gamma)?,
            down: correlator(m, m, theta, gamma)?,
        };
        let mt = m as f64 * theta;
        if mt < 700.0 {
            let balanced = pair.up * libm::exp(mt);
            debug_assert!((balanced - pair.down).abs() <= 1e-12 * pair.down.max(f64::MIN_POSITIVE));
        }
        Ok(pair)
    }

    /// `down - up`, the net relaxation rate.
    pub fn net(&self) -> f64 {
        self.down - self.up
    }
}

/// Probe rates seen by an `M`-replica same-world vertex:
/// `up = γ_b n̄(Mθ_b)`, `down = γ_b (n̄(Mθ_b) + 1)`.
pub fn probe_rates(m: usize, theta_b: f64, gamma_b: f64) -> Result<RatePair> {
    RatePair::thermal(m, theta_b, gamma_b)
}

/// Environment rates, the single-replica case of [`probe_rates`].
pub fn env_rates(theta_e: f64, gamma_e: f64) -> Result<RatePair> {
    RatePair::thermal(1, theta_e, gamma_e)
}

/// Weak-coupling prefactor `G_M = M n̄(Mθ) / (n̄((M-1)θ) n̄(θ))`, defined for
/// `M ≥ 2`. The Boltzmann factors cancel exactly, leaving
/// `M (1 - e^{-(M-1)θ})(1 - e^{-θ}) / (1 - e^{-Mθ})`.
pub fn prefactor_g(m: usize, theta: f64) -> Result<f64> {
    if m < 2 {
        return Err(Error::ReplicaCount { min: 2, got: m });
    }
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::BoseDomain(theta));
    }
    let mf = m as f64;
    let one_minus = |x: f64| -libm::expm1(-x);
    Ok(mf * one_minus((mf - 1.0) * theta) * one_minus(theta) / one_minus(mf * theta))
}
