//! Sweep configuration files.
//!
//! One `key = value` per line, `#` starts a comment. Parameter keys take a
//! comma list (`1, 2.5, 4`) or a range `start:stop:count`, with a trailing
//! `log` for logarithmic spacing. `M` lists the replica numbers; `out`,
//! `weak` and `dump_spectra` set the output path and flags.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use replica_flow_core::{ModelParams, ParamKey};

use crate::error::{AppError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub key: ParamKey,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Outermost first; the replica list always varies fastest.
    pub axes: Vec<Axis>,
    pub replicas: Vec<usize>,
    pub output: Option<PathBuf>,
    pub include_weak: bool,
    pub dump_spectra: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            axes: Vec::new(),
            replicas: vec![2],
            output: None,
            include_weak: true,
            dump_spectra: false,
        }
    }
}

/// Parses one scalar for `key` and checks it against the model invariants.
pub fn parse_value(key: ParamKey, text: &str) -> std::result::Result<f64, String> {
    let v: f64 = text.trim().parse().map_err(|_| format!("{key}: `{}` is not a number", text.trim()))?;
    ModelParams::default().with(key, v).validate().map_err(|e| e.to_string())?;
    Ok(v)
}

fn parse_range(key: ParamKey, text: &str) -> std::result::Result<Vec<f64>, String> {
    let (body, log) = match text.trim().strip_suffix("log") {
        Some(rest) => (rest.trim(), true),
        None => (text.trim(), false),
    };
    let parts: Vec<&str> = body.split(':').collect();
    let [start, stop, count] = parts[..] else {
        return Err(format!("malformed range `{}`, expected start:stop:count", text.trim()));
    };
    let start: f64 = start.trim().parse().map_err(|_| format!("malformed range start `{}`", start.trim()))?;
    let stop: f64 = stop.trim().parse().map_err(|_| format!("malformed range stop `{}`", stop.trim()))?;
    let count: usize = count.trim().parse().map_err(|_| format!("malformed range count `{}`", count.trim()))?;
    if count == 0 {
        return Err("empty axis: range count must be positive".into());
    }
    if log && !(start > 0.0 && stop > 0.0) {
        return Err("log range bounds must be positive".into());
    }
    let values: Vec<f64> = (0..count)
        .map(|i| {
            if i == 0 {
                return start;
            }
            if i == count - 1 {
                return stop;
            }
            let t = i as f64 / (count - 1) as f64;
            if log {
                (start.ln() + t * (stop.ln() - start.ln())).exp()
            } else {
                start + t * (stop - start)
            }
        })
        .collect();
    for v in &values {
        ModelParams::default().with(key, *v).validate().map_err(|e| e.to_string())?;
    }
    Ok(values)
}

fn parse_axis(key: ParamKey, text: &str) -> std::result::Result<Vec<f64>, String> {
    if text.contains(':') {
        return parse_range(key, text);
    }
    let values = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err(format!("empty axis for {key}"));
    }
    Ok(values)
}

fn parse_replicas(text: &str) -> std::result::Result<Vec<usize>, String> {
    let values = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| match s.parse::<usize>() {
            Ok(m) if m >= 1 => Ok(m),
            _ => Err(format!("M values must be integers ≥ 1, got `{s}`")),
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err("empty axis for M".into());
    }
    Ok(values)
}

fn parse_flag(text: &str) -> std::result::Result<bool, String> {
    match text.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(format!("expected true or false, got `{other}`")),
    }
}

pub fn parse_sweep(text: &str) -> Result<SweepSpec> {
    let mut spec = SweepSpec::default();
    let mut seen: Vec<String> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| AppError::config(line_no, format!("expected `key = value`, got `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if seen.iter().any(|k| k == key) {
            return Err(AppError::config(line_no, format!("duplicate key `{key}`")));
        }
        seen.push(key.to_string());
        let err = |m: String| AppError::config(line_no, m);
        match key {
            "M" => spec.replicas = parse_replicas(value).map_err(err)?,
            "out" => {
                if value.is_empty() {
                    return Err(err("empty output path".into()));
                }
                spec.output = Some(PathBuf::from(value));
            }
            "weak" => spec.include_weak = parse_flag(value).map_err(err)?,
            "dump_spectra" => spec.dump_spectra = parse_flag(value).map_err(err)?,
            other => {
                let key = ParamKey::from_str(other).map_err(|_| err(format!("unknown key `{other}`")))?;
                let values = parse_axis(key, value).map_err(err)?;
                spec.axes.push(Axis { key, values });
            }
        }
    }
    Ok(spec)
}

impl SweepSpec {
    pub fn cardinality(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product::<usize>() * self.replicas.len()
    }

    /// Every `(params, M)` pair in document order, replica number innermost.
    pub fn grid(&self) -> Vec<(ModelParams, usize)> {
        let mut points = vec![ModelParams::default()];
        for axis in &self.axes {
            points = points
                .into_iter()
                .flat_map(|p| axis.values.iter().map(move |&v| p.with(axis.key, v)))
                .collect();
        }
        points
            .into_iter()
            .flat_map(|p| self.replicas.iter().map(move |&m| (p, m)))
            .collect()
    }
}

/// Writes a document that parses back to the same spec; ranges are expanded.
impl fmt::Display for SweepSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |it: &mut dyn Iterator<Item = String>| it.collect::<Vec<_>>().join(", ");
        for axis in &self.axes {
            writeln!(f, "{} = {}", axis.key, join(&mut axis.values.iter().map(|v| format!("{v:?}"))))?;
        }
        writeln!(f, "M = {}", join(&mut self.replicas.iter().map(|m| m.to_string())))?;
        if let Some(out) = &self.output {
            writeln!(f, "out = {}", out.display())?;
        }
        writeln!(f, "weak = {}", self.include_weak)?;
        writeln!(f, "dump_spectra = {}", self.dump_spectra)
    }
}
