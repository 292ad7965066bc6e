//! Liouvillian spectra and the Rényi flow read off the leading eigenvalue.

use alloc::vec::Vec;

use faer::{c64, Mat, MatRef};

use crate::error::{Error, Result};
use crate::liouvillian::assemble;
use crate::model::ModelParams;
use crate::ops::{abs, norm_l1, SuperOperator};

/// Tie and complex-leading tolerance, relative to `max(‖L‖₁, 1)`.
pub const DEFAULT_RELATIVE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<c64>,
    /// Eigenvalue with maximal real part (ties broken by minimal `|Im|`).
    pub leading: c64,
    pub leading_imag_residual: f64,
    /// `max Re λ`; physically this should not exceed round-off.
    pub max_positive_real_part: f64,
    /// Largest distance from an eigenvalue's conjugate to the nearest
    /// eigenvalue.
    pub pairing_defect: f64,
    pub norm_l1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Leading {
    pub value: c64,
    /// Set when `|Im Λ₀|` exceeds the tolerance.
    pub complex: bool,
}

impl Leading {
    pub fn re(&self) -> f64 {
        self.value.re
    }
}

/// Selects the max-real-part eigenvalue. Candidates within `tol` of the
/// maximum are ranked by `|Im|`, then by preferring `Im ≥ 0`.
pub fn leading_eigenvalue(eigenvalues: &[c64], tol: f64) -> Result<Leading> {
    let max_re = eigenvalues
        .iter()
        .map(|z| z.re)
        .fold(None, |acc: Option<f64>, x| Some(acc.map_or(x, |a| a.max(x))))
        .ok_or(Error::EmptySpectrum)?;
    let value = eigenvalues
        .iter()
        .filter(|z| z.re >= max_re - tol)
        .copied()
        .min_by(|a, b| {
            a.im.abs()
                .total_cmp(&b.im.abs())
                .then((a.im < 0.0).cmp(&(b.im < 0.0)))
                .then(b.re.total_cmp(&a.re))
        })
        .expect("max element is always a candidate");
    Ok(Leading {
        value,
        complex: value.im.abs() > tol,
    })
}

fn pairing_defect(eigs: &[c64]) -> f64 {
    eigs.iter()
        .map(|z| {
            let conj = z.conj();
            eigs.iter().map(|w| abs(*w - conj)).fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Full spectrum of an arbitrary dense square matrix with diagnostics.
pub fn spectrum_of(matrix: MatRef<'_, c64>) -> Result<SpectrumResult> {
    let n = matrix.nrows();
    if n != matrix.ncols() {
        return Err(Error::DimensionMismatch { left: n, right: matrix.ncols() });
    }
    for j in 0..n {
        for i in 0..n {
            let z = matrix[(i, j)];
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    if n == 0 {
        return Err(Error::EmptySpectrum);
    }
    let eigenvalues = matrix.eigenvalues().map_err(|_| Error::Eigensolver { dim: n })?;
    if eigenvalues.len() != n || eigenvalues.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Eigensolver { dim: n });
    }
    let norm = norm_l1(matrix);
    let leading = leading_eigenvalue(&eigenvalues, DEFAULT_RELATIVE_TOL * norm.max(1.0))?.value;
    let max_positive_real_part = eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    Ok(SpectrumResult {
        leading,
        leading_imag_residual: leading.im.abs(),
        max_positive_real_part,
        pairing_defect: pairing_defect(&eigenvalues),
        norm_l1: norm,
        eigenvalues,
    })
}

pub fn spectrum(l: &SuperOperator) -> Result<SpectrumResult> {
    spectrum_of(l.matrix())
}

/// Convenience for real matrices given column-major.
pub fn spectrum_of_real(n: usize, entries: &[f64]) -> Result<SpectrumResult> {
    assert_eq!(entries.len(), n * n, "entry count mismatch");
    let m = Mat::from_fn(n, n, |i, j| c64::new(entries[j * n + i], 0.0));
    spectrum_of(m.as_ref())
}

#[derive(Debug, Clone)]
pub struct FlowReport {
    pub replicas: usize,
    /// `F_M = -Re Λ₀`.
    pub flow: f64,
    pub leading: Leading,
    pub spectrum: SpectrumResult,
}

/// Rényi-M flow into the probe, `F_M = -Λ₀` of the assembled generator.
pub fn renyi_flow(params: &ModelParams, m: usize) -> Result<FlowReport> {
    let parts = assemble(m, params)?;
    let spectrum = spectrum(&parts.total)?;
    let leading = leading_eigenvalue(&spectrum.eigenvalues, DEFAULT_RELATIVE_TOL * spectrum.norm_l1.max(1.0))?;
    Ok(FlowReport {
        replicas: m,
        flow: -leading.re(),
        leading,
        spectrum,
    })
}
