//! Brute-force reference assembly of the M-replica Liouvillian.
//!
//! Each column is obtained by applying the defining master-equation terms to
//! a basis matrix unit `E_ab` with explicit dense operator products. Nothing
//! here goes through the superoperator constructors of [`crate::ops`], and
//! the rate prefactors are evaluated from naive Bose factors and explicit
//! exponentials rather than the combined-exponent correlators, so agreement
//! with [`crate::liouvillian::assemble`] checks both the vectorization
//! convention and the rate bookkeeping.

use alloc::vec::Vec;

use faer::{c64, Mat};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::ops::{self, ReplicaOperator, SuperOperator};

/// Largest replica count the oracle accepts.
pub const ORACLE_MAX_REPLICAS: usize = 3;

fn naive_bose(x: f64) -> f64 {
    1.0 / (libm::exp(x) - 1.0)
}

fn comm(a: &ReplicaOperator, b: &ReplicaOperator) -> ReplicaOperator {
    &(a * b) + &(b * a).scale(c64::new(-1.0, 0.0))
}

fn anticomm(a: &ReplicaOperator, b: &ReplicaOperator) -> ReplicaOperator {
    &(a * b) + &(b * a)
}

fn unit(replicas: usize, a: usize, b: usize) -> ReplicaOperator {
    let d = 1 << replicas;
    let m = Mat::from_fn(d, d, |i, j| {
        if (i, j) == (a, b) {
            c64::new(1.0, 0.0)
        } else {
            c64::new(0.0, 0.0)
        }
    });
    ReplicaOperator::from_matrix(m).expect("unit matrix is valid")
}

/// Total Liouvillian built column by column from the master equation.
pub fn oracle_assemble(m: usize, params: &ModelParams) -> Result<SuperOperator> {
    if m == 0 {
        return Err(Error::ReplicaCount { min: 1, got: 0 });
    }
    if m > ORACLE_MAX_REPLICAS {
        return Err(Error::DimensionCeiling {
            replicas: m,
            ceiling: ORACLE_MAX_REPLICAS,
        });
    }
    let p = params.validate()?;
    let re = |x: f64| c64::new(x, 0.0);
    let minus_i = c64::new(0.0, -1.0);

    let sig: Vec<ReplicaOperator> = (1..=m).map(|k| ops::lowering(k, m)).collect::<Result<_>>()?;
    let sigd: Vec<ReplicaOperator> = sig.iter().map(ReplicaOperator::adjoint).collect();
    let hams: Vec<ReplicaOperator> = (1..=m)
        .map(|k| -> Result<ReplicaOperator> {
            Ok(&ops::pauli_z(k, m)?.scale(re(-p.delta / 2.0)) + &ops::pauli_x(k, m)?.scale(re(p.omega / 2.0)))
        })
        .collect::<Result<_>>()?;

    // environment: Γ↑ = γ_e n̄(θ_e), Γ↓ = Γ↑ e^{θ_e}
    let env_up = p.gamma_e * naive_bose(p.theta_e);
    let env_down = env_up * libm::exp(p.theta_e);

    // probe: Γ↑ = γ_b n̄(Mθ_b), Γ↓ = Γ↑ e^{Mθ_b}
    let mf = m as f64;
    let tb = p.theta_b;
    let pr_up = p.gamma_b * naive_bose(mf * tb);
    let pr_down = pr_up * libm::exp(mf * tb);

    let d = 1usize << m;
    let n = d * d;
    let mut out = Mat::<c64>::zeros(n, n);

    for a in 0..d {
        for b in 0..d {
            let r = unit(m, a, b);
            let mut dr = ReplicaOperator::from_matrix(Mat::zeros(d, d))?;

            for k in 0..m {
                let (s, sd) = (&sig[k], &sigd[k]);
                let excited = sd * s;
                let ground = s * sd;

                dr = &dr + &comm(&hams[k], &r).scale(minus_i);

                // environment dissipator
                dr = &dr + &comm(&excited, &r).scale(minus_i * p.lamb_e);
                let env_abs = &(&(sd * &r) * s) + &anticomm(&ground, &r).scale(re(-0.5));
                let env_emit = &(&(s * &r) * sd) + &anticomm(&excited, &r).scale(re(-0.5));
                dr = &dr + &env_abs.scale(re(env_up));
                dr = &dr + &env_emit.scale(re(env_down));

                // same-world probe
                dr = &dr + &comm(&excited, &r).scale(minus_i * p.lamb_b);
                let down_part = &(&(sd * &r) * s).scale(re(libm::exp(-tb)))
                    + &anticomm(&excited, &r).scale(re(-0.5));
                let up_part = &(&(s * &r) * sd).scale(re(libm::exp(tb)))
                    + &anticomm(&ground, &r).scale(re(-0.5));
                dr = &dr + &down_part.scale(re(pr_down));
                dr = &dr + &up_part.scale(re(pr_up));
            }

            // cross-world probe, pairs (i, i+N)
            for i in 0..m {
                for gap in 1..m - i {
                    let j = i + gap;
                    let g = gap as f64;
                    let down = &(&(&(&sig[j] * &r) * &sigd[i]).scale(re(libm::exp(-(g - 1.0) * tb)))
                        + &(&(&sigd[i] * &r) * &sig[j]).scale(re(libm::exp(-(g + 1.0) * tb))))
                        + &anticomm(&(&sigd[i] * &sig[j]), &r).scale(re(-libm::exp(-g * tb)));
                    let up = &(&(&(&sigd[j] * &r) * &sig[i]).scale(re(libm::exp((g - 1.0) * tb)))
                        + &(&(&sig[i] * &r) * &sigd[j]).scale(re(libm::exp((g + 1.0) * tb))))
                        + &anticomm(&(&sig[i] * &sigd[j]), &r).scale(re(-libm::exp(g * tb)));
                    dr = &dr + &down.scale(re(pr_down));
                    dr = &dr + &up.scale(re(pr_up));
                }
            }

            let col = a * d + b;
            for x in 0..d {
                for y in 0..d {
                    out[(x * d + y, col)] = dr.get(x, y);
                }
            }
        }
    }
    SuperOperator::from_matrix(out)
}
