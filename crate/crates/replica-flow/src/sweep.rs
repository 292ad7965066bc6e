//! Grid sweeps and their CSV output.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use replica_flow_core::{
    c64, renyi_flow,
    weak::{steady_state_qubit, weak_flow_renyi, weak_flow_vn_qubit, WeakOptions},
    ModelParams,
};

use crate::config::SweepSpec;
use crate::error::{AppError, Result};

pub const HEADER: [&str; 12] = [
    "M",
    "gamma_b",
    "Omega",
    "theta_e",
    "theta_b",
    "delta",
    "lambda0_re",
    "lambda0_im",
    "F_M",
    "F_weak_M",
    "F_vN_weak",
    "warn_flags",
];

/// Per-row diagnostics written to the `warn_flags` column, `;`-separated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Warn {
    /// `|Im Λ₀|` above tolerance; the real part is still reported.
    ComplexLeading,
    /// Some eigenvalue has `Re λ > 1e-10 ‖L‖₁`.
    PositiveRealPart,
    /// The spectrum is not closed under conjugation to `1e-9 ‖L‖₁`.
    PairingDefect,
    /// No weak-coupling Rényi flow exists for `M < 2`; the column holds 0.
    WeakMLt2,
    /// Assembly or eigensolve failed; spectral columns are empty.
    EigensolverFailed,
    /// The single-replica steady state is not unique; weak columns are empty.
    SteadyStateDegenerate,
}

impl Warn {
    pub const ALL: [Warn; 6] = [
        Warn::ComplexLeading,
        Warn::PositiveRealPart,
        Warn::PairingDefect,
        Warn::WeakMLt2,
        Warn::EigensolverFailed,
        Warn::SteadyStateDegenerate,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Warn::ComplexLeading => "complex_leading",
            Warn::PositiveRealPart => "positive_real_part",
            Warn::PairingDefect => "pairing_defect",
            Warn::WeakMLt2 => "weak_m_lt_2",
            Warn::EigensolverFailed => "eigensolver_failed",
            Warn::SteadyStateDegenerate => "steady_state_degenerate",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|w| w.token() == s)
    }

    /// Whether the row is missing a quantity it was asked for.
    pub fn is_failure(self) -> bool {
        matches!(self, Warn::EigensolverFailed | Warn::SteadyStateDegenerate)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub replicas: usize,
    pub params: ModelParams,
    pub lambda0: Option<c64>,
    pub flow: Option<f64>,
    pub flow_weak: Option<f64>,
    pub flow_vn_weak: Option<f64>,
    pub warnings: Vec<Warn>,
    pub spectrum: Option<Vec<c64>>,
}

impl SweepRow {
    pub fn failed(&self) -> bool {
        self.warnings.iter().any(|w| w.is_failure())
    }

    pub fn warn_flags(&self) -> String {
        self.warnings.iter().map(|w| w.token()).collect::<Vec<_>>().join(";")
    }
}

/// Runs the pipeline for one grid point. Never fails; problems go to the
/// warning list.
pub fn compute_row(params: ModelParams, m: usize, include_weak: bool, keep_spectrum: bool) -> SweepRow {
    let mut row = SweepRow {
        replicas: m,
        params,
        lambda0: None,
        flow: None,
        flow_weak: None,
        flow_vn_weak: None,
        warnings: Vec::new(),
        spectrum: None,
    };
    match renyi_flow(&params, m) {
        Ok(report) => {
            let scale = report.spectrum.norm_l1.max(1.0);
            row.lambda0 = Some(report.leading.value);
            row.flow = Some(report.flow);
            if report.leading.complex {
                row.warnings.push(Warn::ComplexLeading);
            }
            if report.spectrum.max_positive_real_part > 1e-10 * scale {
                row.warnings.push(Warn::PositiveRealPart);
            }
            if report.spectrum.pairing_defect > 1e-9 * scale {
                row.warnings.push(Warn::PairingDefect);
            }
            if keep_spectrum {
                row.spectrum = Some(report.spectrum.eigenvalues);
            }
        }
        Err(_) => row.warnings.push(Warn::EigensolverFailed),
    }
    if include_weak {
        match steady_state_qubit(&params, true) {
            Ok(state) => {
                row.flow_vn_weak = weak_flow_vn_qubit(&params, &state).ok();
                if m >= 2 {
                    row.flow_weak = weak_flow_renyi(&params, m, &state, &WeakOptions::default()).ok();
                } else {
                    row.flow_weak = Some(0.0);
                    row.warnings.push(Warn::WeakMLt2);
                }
            }
            Err(_) => row.warnings.push(Warn::SteadyStateDegenerate),
        }
    }
    row.warnings.sort();
    row
}

/// Runs every grid point on a pool of `workers` threads. Row order follows
/// [`SweepSpec::grid`] whatever the worker count.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<Vec<SweepRow>> {
    let grid = spec.grid();
    for (p, _) in &grid {
        p.validate()?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| AppError::Usage(format!("cannot start worker pool: {e}")))?;
    let rows = pool.install(|| {
        grid.par_iter()
            .map(|&(p, m)| compute_row(p, m, spec.include_weak, spec.dump_spectra))
            .collect()
    });
    Ok(rows)
}

pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

/// Writes the rows with the fixed header. Floats carry 17 significant
/// digits; missing quantities are empty fields.
pub fn emit_csv<W: Write>(rows: &[SweepRow], out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        let p = &r.params;
        w.write_record([
            r.replicas.to_string(),
            format_float(p.gamma_b),
            format_float(p.omega),
            format_float(p.theta_e),
            format_float(p.theta_b),
            format_float(p.delta),
            opt(r.lambda0.map(|z| z.re)),
            opt(r.lambda0.map(|z| z.im)),
            opt(r.flow),
            opt(r.flow_weak),
            opt(r.flow_vn_weak),
            r.warn_flags(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `re,im` pairs.
pub fn emit_spectrum<W: Write>(eigenvalues: &[c64], out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv_writer(out);
    w.write_record(["re", "im"])?;
    for z in eigenvalues {
        w.write_record([format_float(z.re), format_float(z.im)])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `row,re,im` for every row that kept its spectrum; `row` is the
/// zero-based data-row index of the sweep CSV.
pub fn emit_spectra<W: Write>(rows: &[SweepRow], out: W) -> std::result::Result<(), csv::Error> {
    let mut w = csv_writer(out);
    w.write_record(["row", "re", "im"])?;
    for (i, r) in rows.iter().enumerate() {
        for z in r.spectrum.iter().flatten() {
            w.write_record([i.to_string(), format_float(z.re), format_float(z.im)])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file(rows: &[SweepRow], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| AppError::io(path, e))?;
    emit_csv(rows, std::io::BufWriter::new(file)).map_err(|e| AppError::csv(path, e))
}

/// Path of the spectra dump that accompanies a sweep CSV.
pub fn spectra_path(out: &Path) -> std::path::PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.spectra.csv"))
}
