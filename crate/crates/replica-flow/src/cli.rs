//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use replica_flow_core::{
    assemble, renyi_flow,
    weak::{steady_state_qubit, weak_flow_renyi, weak_flow_vn_incoherent, weak_flow_vn_qubit, WeakOptions},
    ModelParams, ParamKey, SuperOperator,
};

use crate::config::{parse_sweep, parse_value};
use crate::error::{AppError, Result};
use crate::sweep::{emit_csv, emit_spectra, emit_spectrum, format_float, run_sweep, spectra_path};
use crate::table::{append_result, fit_selection, format_fit, parse_selection, read_rows, write_text};

#[derive(Debug, Parser)]
#[command(name = "replica-flow", version, about = "Rényi and von Neumann entropy flow through a driven qubit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Model parameters; unset keys keep their defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    /// Drive detuning δ
    #[arg(long = "delta", allow_hyphen_values = true)]
    delta: Option<String>,
    /// Rabi amplitude Ω
    #[arg(long = "Omega", allow_hyphen_values = true)]
    omega: Option<String>,
    /// ω/T of the environment
    #[arg(long = "theta_e", allow_hyphen_values = true)]
    theta_e: Option<String>,
    /// ω/T of the probe
    #[arg(long = "theta_b", allow_hyphen_values = true)]
    theta_b: Option<String>,
    /// Probe coupling Γ_b/Γ_e
    #[arg(long = "gamma_b", allow_hyphen_values = true)]
    gamma_b: Option<String>,
    /// Environment coupling
    #[arg(long = "gamma_e", allow_hyphen_values = true)]
    gamma_e: Option<String>,
    /// Environment Lamb shift
    #[arg(long = "lamb_e", allow_hyphen_values = true)]
    lamb_e: Option<String>,
    /// Probe Lamb shift
    #[arg(long = "lamb_b", allow_hyphen_values = true)]
    lamb_b: Option<String>,
}

impl ParamArgs {
    pub fn to_params(&self) -> Result<ModelParams> {
        let mut p = ModelParams::default();
        let given = [
            (ParamKey::Delta, &self.delta),
            (ParamKey::Omega, &self.omega),
            (ParamKey::ThetaE, &self.theta_e),
            (ParamKey::ThetaB, &self.theta_b),
            (ParamKey::GammaB, &self.gamma_b),
            (ParamKey::GammaE, &self.gamma_e),
            (ParamKey::LambE, &self.lamb_e),
            (ParamKey::LambB, &self.lamb_b),
        ];
        for (key, text) in given {
            if let Some(text) = text {
                p.set(key, parse_value(key, text).map_err(AppError::Usage)?);
            }
        }
        Ok(p.validate()?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Part {
    Total,
    Unitary,
    Environment,
    ProbeSame,
    ProbeCross,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MatrixFormat {
    /// Nonzero entries as `row,col,re,im`
    Csv,
    /// Dense tab-separated grid
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the M-replica Liouvillian or one of its parts
    Build {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long = "M", default_value_t = 2)]
        replicas: usize,
        #[arg(long, value_enum, default_value_t = Part::Total)]
        part: Part,
        #[arg(long, value_enum, default_value_t = MatrixFormat::Csv)]
        format: MatrixFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Leading eigenvalue and Rényi flow at one parameter point
    Flow {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long = "M", default_value_t = 2)]
        replicas: usize,
        /// Also write the full spectrum as `re,im` CSV
        #[arg(long = "dump-spectrum", value_name = "PATH")]
        dump_spectrum: Option<PathBuf>,
    },
    /// Steady state and weak-coupling flows at one parameter point
    Reference {
        #[command(flatten)]
        params: ParamArgs,
        /// Replica numbers (≥ 2) for the Rényi flows
        #[arg(long = "M", value_delimiter = ',', default_values_t = [2, 3, 4, 5])]
        replicas: Vec<usize>,
        /// Solve the steady state with the probe (default)
        #[arg(long, conflicts_with = "exclude_probe")]
        include_probe: bool,
        /// Solve the steady state without the probe
        #[arg(long)]
        exclude_probe: bool,
        /// Multiply Rényi flows by this transition frequency
        #[arg(long, value_name = "OMEGA")]
        literal_omega: Option<f64>,
    },
    /// Run a parameter grid from a config file
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `out` from the config; stdout when neither is set
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = default_workers())]
        workers: usize,
        /// Write every spectrum to `<out stem>.spectra.csv`
        #[arg(long = "dump-spectrum")]
        dump_spectrum: bool,
    },
    /// Fit F_M across M at one point of a sweep CSV
    Fit {
        #[arg(long = "in")]
        input: PathBuf,
        /// `key=value` pairs over gamma_b, Omega, theta_e, theta_b, delta
        #[arg(long, default_value = "")]
        select: String,
        /// Append the fit to this CSV
        #[arg(long)]
        results: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full Liouvillian spectrum as `re,im` CSV
    Spectrum {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long = "M", default_value_t = 2)]
        replicas: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_text(path, text),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| AppError::io("<stdout>", e)),
    }
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> std::result::Result<(), csv::Error>) -> Result<String> {
    let mut buf = Vec::new();
    f(&mut buf).map_err(|e| AppError::csv("<buffer>", e))?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

fn render_matrix(l: &SuperOperator, format: MatrixFormat) -> String {
    let n = l.dim();
    let mut s = String::new();
    match format {
        MatrixFormat::Csv => {
            s.push_str("row,col,re,im\n");
            for i in 0..n {
                for j in 0..n {
                    let z = l.get(i, j);
                    if z.re != 0.0 || z.im != 0.0 {
                        s.push_str(&format!("{i},{j},{},{}\n", format_float(z.re), format_float(z.im)));
                    }
                }
            }
        }
        MatrixFormat::Text => {
            for i in 0..n {
                let line: Vec<String> = (0..n).map(|j| format!("{}", l.get(i, j))).collect();
                s.push_str(&line.join("\t"));
                s.push('\n');
            }
        }
    }
    s
}

fn kv(s: &mut String, key: &str, v: f64) {
    s.push_str(&format!("{key} = {}\n", format_float(v)));
}

/// Runs one invocation and returns the process exit code.
pub fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Build { params, replicas, part, format, out } => {
            let parts = assemble(replicas, &params.to_params()?)?;
            let l = match part {
                Part::Total => &parts.total,
                Part::Unitary => &parts.unitary,
                Part::Environment => &parts.environment,
                Part::ProbeSame => &parts.probe_same,
                Part::ProbeCross => &parts.probe_cross,
            };
            emit(out.as_deref(), &render_matrix(l, format))?;
        }
        Command::Flow { params, replicas, dump_spectrum } => {
            let report = renyi_flow(&params.to_params()?, replicas)?;
            let sp = &report.spectrum;
            let mut s = format!("M = {replicas}\n");
            kv(&mut s, "lambda0_re", report.leading.value.re);
            kv(&mut s, "lambda0_im", report.leading.value.im);
            kv(&mut s, "F_M", report.flow);
            kv(&mut s, "norm_l1", sp.norm_l1);
            kv(&mut s, "max_re", sp.max_positive_real_part);
            kv(&mut s, "pairing_defect", sp.pairing_defect);
            emit(None, &s)?;
            if report.leading.complex {
                eprintln!("warning: leading eigenvalue is complex, reporting its real part");
            }
            if let Some(path) = dump_spectrum {
                let text = csv_bytes(|b| emit_spectrum(&sp.eigenvalues, b))?;
                write_text(&path, &text)?;
            }
        }
        Command::Reference { params, replicas, include_probe: _, exclude_probe, literal_omega } => {
            let p = params.to_params()?;
            let state = steady_state_qubit(&p, !exclude_probe)?;
            let opts = WeakOptions { literal_omega };
            let mut s = String::new();
            kv(&mut s, "p0", state.p0);
            kv(&mut s, "p1", state.p1);
            kv(&mut s, "rho01_re", state.rho01.re);
            kv(&mut s, "rho01_im", state.rho01.im);
            kv(&mut s, "F_vN_weak", weak_flow_vn_qubit(&p, &state)?);
            kv(&mut s, "F_vN_incoh", weak_flow_vn_incoherent(&p, &state)?);
            for m in replicas {
                kv(&mut s, &format!("F_weak_{m}"), weak_flow_renyi(&p, m, &state, &opts)?);
            }
            emit(None, &s)?;
        }
        Command::Sweep { config, out, workers, dump_spectrum } => {
            let text = std::fs::read_to_string(&config).map_err(|e| AppError::io(&config, e))?;
            let mut spec = parse_sweep(&text)?;
            spec.dump_spectra |= dump_spectrum;
            let out = out.or_else(|| spec.output.clone());
            if spec.dump_spectra && out.is_none() {
                return Err(AppError::Usage("spectrum dump needs an output path".into()));
            }
            let rows = run_sweep(&spec, workers)?;
            let csv = csv_bytes(|b| emit_csv(&rows, b))?;
            emit(out.as_deref(), &csv)?;
            if let (true, Some(out)) = (spec.dump_spectra, &out) {
                let text = csv_bytes(|b| emit_spectra(&rows, b))?;
                write_text(&spectra_path(out), &text)?;
            }
            let failed: Vec<usize> = rows.iter().enumerate().filter(|(_, r)| r.failed()).map(|(i, _)| i).collect();
            if !failed.is_empty() {
                eprintln!("{} of {} rows failed: data rows {:?}", failed.len(), rows.len(), failed);
                return Ok(2);
            }
        }
        Command::Fit { input, select, results, out } => {
            let file = std::fs::File::open(&input).map_err(|e| AppError::io(&input, e))?;
            let rows = read_rows(file, &input)?;
            let (fit, point) = fit_selection(&rows, &parse_selection(&select)?)?;
            emit(out.as_deref(), &format_fit(&fit))?;
            if let Some(path) = results {
                append_result(&path, point, &fit)?;
            }
        }
        Command::Spectrum { params, replicas, out } => {
            let report = renyi_flow(&params.to_params()?, replicas)?;
            let text = csv_bytes(|b| emit_spectrum(&report.spectrum.eigenvalues, b))?;
            emit(out.as_deref(), &text)?;
        }
    }
    Ok(0)
}

/// Parses `args` and runs; usage and validation errors exit with 1.
pub fn main_with<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
