//! Physical parameters of the driven qubit and its two reservoirs.

use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

/// Dimensionless model parameters. Rates, detuning, drive and Lamb shifts are
/// in units of the environment rate `Γ_e`; temperatures appear as `θ = ω/T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Drive detuning `δ = ω - ω_dr`.
    pub delta: f64,
    /// Rabi amplitude `Ω`.
    pub omega: f64,
    /// `ω/T_e` of the environment.
    pub theta_e: f64,
    /// `ω/T_b` of the probe.
    pub theta_b: f64,
    /// Probe susceptibility `γ_b = Γ_b/Γ_e`.
    pub gamma_b: f64,
    /// Environment susceptibility, 1 in the natural unit system.
    pub gamma_e: f64,
    /// Environment Lamb shift `Δ_e`.
    pub lamb_e: f64,
    /// Probe Lamb shift `Δ_b`, shared by all replicas.
    pub lamb_b: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            delta: 0.0,
            omega: 1.0,
            theta_e: 1.0,
            theta_b: 20.0,
            gamma_b: 1.0,
            gamma_e: 1.0,
            lamb_e: 0.0,
            lamb_b: 0.0,
        }
    }
}

impl ModelParams {
    /// Returns `self` unchanged if every invariant holds, otherwise the first
    /// violation (in field order).
    pub fn validate(self) -> Result<Self> {
        for key in ParamKey::ALL {
            let v = self.get(key);
            if !v.is_finite() {
                return Err(Error::InvalidParam {
                    field: key.name(),
                    requirement: "finite",
                });
            }
            let requirement = match key {
                ParamKey::Omega | ParamKey::GammaB if v < 0.0 => "≥ 0",
                ParamKey::ThetaE | ParamKey::ThetaB | ParamKey::GammaE if v <= 0.0 => "> 0",
                _ => continue,
            };
            return Err(Error::InvalidParam {
                field: key.name(),
                requirement,
            });
        }
        Ok(self)
    }

    pub fn get(&self, key: ParamKey) -> f64 {
        match key {
            ParamKey::Delta => self.delta,
            ParamKey::Omega => self.omega,
            ParamKey::ThetaE => self.theta_e,
            ParamKey::ThetaB => self.theta_b,
            ParamKey::GammaB => self.gamma_b,
            ParamKey::GammaE => self.gamma_e,
            ParamKey::LambE => self.lamb_e,
            ParamKey::LambB => self.lamb_b,
        }
    }

    pub fn set(&mut self, key: ParamKey, value: f64) {
        let slot = match key {
            ParamKey::Delta => &mut self.delta,
            ParamKey::Omega => &mut self.omega,
            ParamKey::ThetaE => &mut self.theta_e,
            ParamKey::ThetaB => &mut self.theta_b,
            ParamKey::GammaB => &mut self.gamma_b,
            ParamKey::GammaE => &mut self.gamma_e,
            ParamKey::LambE => &mut self.lamb_e,
            ParamKey::LambB => &mut self.lamb_b,
        };
        *slot = value;
    }

    pub fn with(mut self, key: ParamKey, value: f64) -> Self {
        self.set(key, value);
        self
    }
}

/// Names under which parameters appear in config files, CSV headers and CLI
/// flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParamKey {
    Delta,
    Omega,
    ThetaE,
    ThetaB,
    GammaB,
    GammaE,
    LambE,
    LambB,
}

impl ParamKey {
    pub const ALL: [ParamKey; 8] = [
        ParamKey::Delta,
        ParamKey::Omega,
        ParamKey::ThetaE,
        ParamKey::ThetaB,
        ParamKey::GammaB,
        ParamKey::GammaE,
        ParamKey::LambE,
        ParamKey::LambB,
    ];

    pub const fn name(self) -> &'static str {
        match self {
            ParamKey::Delta => "delta",
            ParamKey::Omega => "Omega",
            ParamKey::ThetaE => "theta_e",
            ParamKey::ThetaB => "theta_b",
            ParamKey::GammaB => "gamma_b",
            ParamKey::GammaE => "gamma_e",
            ParamKey::LambE => "lamb_e",
            ParamKey::LambB => "lamb_b",
        }
    }
}

impl fmt::Display for ParamKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ParamKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ParamKey::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownKey(s.into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn base() -> ModelParams {
        ModelParams {
            delta: 0.0,
            omega: 1.0,
            theta_e: 1.0,
            theta_b: 20.0,
            gamma_b: 1.0,
            ..ModelParams::default()
        }
    }

    #[test]
    fn accepts_reference_point() {
        assert_eq!(base().validate(), Ok(base()));
    }

    #[test]
    fn rejects_zero_theta_e() {
        let err = base().with(ParamKey::ThetaE, 0.0).validate().unwrap_err();
        assert_eq!(err.to_string(), "theta_e must be > 0");
    }

    #[test]
    fn rejects_negative_gamma_b() {
        let err = base().with(ParamKey::GammaB, -0.1).validate().unwrap_err();
        assert_eq!(err.to_string(), "gamma_b must be ≥ 0");
    }

    #[test]
    fn rejects_non_finite() {
        let err = base().with(ParamKey::LambB, f64::NAN).validate().unwrap_err();
        assert_eq!(err.to_string(), "lamb_b must be finite");
        let err = base().with(ParamKey::ThetaB, f64::INFINITY).validate().unwrap_err();
        assert_eq!(err.to_string(), "theta_b must be finite");
    }

    #[test]
    fn first_violation_wins() {
        let p = base().with(ParamKey::Omega, -1.0).with(ParamKey::GammaE, 0.0);
        assert_eq!(
            p.validate().unwrap_err(),
            Error::InvalidParam { field: "Omega", requirement: "≥ 0" }
        );
    }

    #[test]
    fn key_names_round_trip() {
        for k in ParamKey::ALL {
            assert_eq!(k.name().parse::<ParamKey>().unwrap(), k);
        }
        assert!("bogus".parse::<ParamKey>().is_err());
    }
}
