//! Reading sweep CSVs back and fitting one parameter point across `M`.

use std::fs::OpenOptions;
use std::io::{Read, Write};
use std::path::Path;

use replica_flow_core::{fit_flow_vs_m, FitResult};

use crate::error::{AppError, Result};
use crate::sweep::{format_float, HEADER};

/// Columns that identify a physical parameter point.
pub const POINT_COLUMNS: [&str; 5] = ["gamma_b", "Omega", "theta_e", "theta_b", "delta"];

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub replicas: usize,
    /// Values of [`POINT_COLUMNS`], in that order.
    pub point: [f64; 5],
    pub flow: Option<f64>,
}

fn parse_opt(field: &str) -> std::result::Result<Option<f64>, String> {
    if field.is_empty() {
        return Ok(None);
    }
    field.parse().map(Some).map_err(|_| format!("`{field}` is not a number"))
}

pub fn read_rows<R: Read>(input: R, path: &Path) -> Result<Vec<TableRow>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = reader.headers().map_err(|e| AppError::csv(path, e))?.clone();
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(AppError::Selection(format!("{}: not a sweep CSV (unexpected header)", path.display())));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| AppError::csv(path, e))?;
        let bad = |m: String| AppError::Selection(format!("{}: data row {}: {m}", path.display(), i + 1));
        let replicas = record[0].parse().map_err(|_| bad(format!("bad M `{}`", &record[0])))?;
        let mut point = [0.0; 5];
        for (k, slot) in point.iter_mut().enumerate() {
            *slot = parse_opt(&record[k + 1]).map_err(&bad)?.ok_or_else(|| bad("missing parameter".into()))?;
        }
        let flow = parse_opt(&record[8]).map_err(&bad)?;
        rows.push(TableRow { replicas, point, flow });
    }
    Ok(rows)
}

/// Parses `key=value,key=value` over [`POINT_COLUMNS`].
pub fn parse_selection(text: &str) -> Result<Vec<(usize, f64)>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| AppError::Usage(format!("selection item `{item}` is not key=value")))?;
            let col = POINT_COLUMNS
                .iter()
                .position(|c| *c == k.trim())
                .ok_or_else(|| AppError::Usage(format!("cannot select on `{}`", k.trim())))?;
            let v: f64 = v.trim().parse().map_err(|_| AppError::Usage(format!("`{}` is not a number", v.trim())))?;
            Ok((col, v))
        })
        .collect()
}

fn matches(x: f64, v: f64) -> bool {
    (x - v).abs() <= 1e-12 * v.abs().max(1.0)
}

/// Selected `(M, F_M)` pairs and the shared parameter point.
pub type Selected = (Vec<(usize, f64)>, [f64; 5]);

/// Rows with `M ≥ 2` and a flow at the selected point.
pub fn select_points(rows: &[TableRow], selection: &[(usize, f64)]) -> Result<Selected> {
    let chosen: Vec<&TableRow> = rows
        .iter()
        .filter(|r| selection.iter().all(|&(c, v)| matches(r.point[c], v)))
        .filter(|r| r.replicas >= 2 && r.flow.is_some())
        .collect();
    let first = chosen.first().ok_or_else(|| AppError::Selection("no rows with M ≥ 2 match the selection".into()))?;
    if chosen.iter().any(|r| r.point != first.point) {
        return Err(AppError::Selection("selection spans several parameter points; add more keys".into()));
    }
    let points: Vec<(usize, f64)> = chosen.iter().map(|r| (r.replicas, r.flow.unwrap_or_default())).collect();
    let mut ms: Vec<usize> = points.iter().map(|p| p.0).collect();
    ms.sort_unstable();
    if ms.windows(2).any(|w| w[0] == w[1]) {
        return Err(AppError::Selection("selected rows repeat a replica number".into()));
    }
    Ok((points, first.point))
}

pub fn fit_selection(rows: &[TableRow], selection: &[(usize, f64)]) -> Result<(FitResult, [f64; 5])> {
    let (points, point) = select_points(rows, selection)?;
    Ok((fit_flow_vs_m(&points)?, point))
}

/// `key = value` lines for a fit.
pub fn format_fit(fit: &FitResult) -> String {
    let mut s = String::new();
    for (k, v) in [("a", fit.a), ("b", fit.b), ("c", fit.c), ("rms_residual", fit.rms_residual), ("s_vN", fit.s_vn)] {
        s.push_str(&format!("{k} = {}\n", format_float(v)));
    }
    if fit.degenerate {
        s.push_str("degenerate = true\n");
    }
    s
}

pub const RESULTS_HEADER: [&str; 12] = [
    "gamma_b", "Omega", "theta_e", "theta_b", "delta", "M_min", "M_max", "a", "b", "c", "rms_residual", "s_vN",
];

/// Appends one line to a fit-results CSV, writing the header for a new file.
pub fn append_result(path: &Path, point: [f64; 5], fit: &FitResult) -> Result<()> {
    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let file = OpenOptions::new().create(true).append(true).open(path).map_err(|e| AppError::io(path, e))?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file);
    let err = |e| AppError::csv(path, e);
    if fresh {
        w.write_record(RESULTS_HEADER).map_err(err)?;
    }
    let m_min = fit.points.iter().map(|p| p.0).min().unwrap_or(0);
    let m_max = fit.points.iter().map(|p| p.0).max().unwrap_or(0);
    let mut record: Vec<String> = point.iter().map(|&v| format_float(v)).collect();
    record.extend([m_min.to_string(), m_max.to_string()]);
    record.extend([fit.a, fit.b, fit.c, fit.rms_residual, fit.s_vn].map(format_float));
    w.write_record(&record).map_err(err)?;
    w.flush().map_err(|e| AppError::io(path, e))?;
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| AppError::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| AppError::io(path, e))
}
