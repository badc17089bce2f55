//! Command-line front end: presets, config files, sweeps, validation and
//! CSV / JSON / SVG emission.

pub mod config;
pub mod svg;
pub mod table;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;
use xsrisk_core::bounds::{linear_grid, Method};
use xsrisk_core::oracle::{run_suite, SuiteOptions};

use config::{parse_assignment, preset, set_path, Format, RunConfig};
use table::build_table;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("computation failed: {0}")]
    Compute(xsrisk_core::Error),
    #[error("failed checks: {}", .0.join(", "))]
    ChecksFailed(Vec<String>),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    /// Configuration-type library errors are reported as usage errors.
    pub fn from_core(e: xsrisk_core::Error) -> Self {
        use xsrisk_core::Error as E;
        match e {
            E::Config(_) | E::Dimension(_) | E::Domain(_) | E::InvalidDistribution(_) | E::Scope(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Compute(other),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ChecksFailed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Compute(_) | CliError::Internal(_) => 4,
        }
    }
}

pub const OUT_ENV: &str = "XSRISK_OUT";

#[derive(Debug, Parser)]
#[command(name = "xsrisk", version, about = "Divergence-based bounds on excess minimum risk")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct GlobalArgs {
    /// First α of the grid
    #[arg(long, global = true)]
    pub alpha_start: Option<f64>,
    /// Last α of the grid
    #[arg(long, global = true)]
    pub alpha_stop: Option<f64>,
    /// Number of grid points
    #[arg(long, global = true)]
    pub alpha_count: Option<usize>,
    /// Output formats (comma separated)
    #[arg(long, global = true, value_enum, value_delimiter = ',')]
    pub format: Vec<Format>,
    /// Output directory (default: $XSRISK_OUT, then ./out)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Dirichlet prior seed, Monte Carlo seed, or oracle suite seed
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Gauss-Hermite order for Gaussian JS terms
    #[arg(long, global = true)]
    pub quad_order: Option<usize>,
    /// Built-in configuration (q2, q3, q5, q10, q100, q200, example2, example3)
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// JSON config file; flags override its fields
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Methods to sweep (comma separated)
    #[arg(long, global = true, value_delimiter = ',')]
    pub methods: Vec<String>,
    /// Monte Carlo samples for the Gaussian true excess risk
    #[arg(long, global = true)]
    pub mc_samples: Option<usize>,
    /// Override any config field, e.g. --set model.eps2=0
    #[arg(long = "set", global = true, value_name = "PATH=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cascaded q-ary symmetric channels (default preset q2)
    Qsc,
    /// Gaussian additive-noise chains (default preset example2)
    Gaussian,
    /// Generic sweep from --config or --preset
    Sweep,
    /// Run the oracle checks
    Validate(ValidateArgs),
}

#[derive(Debug, Args, Default)]
pub struct ValidateArgs {
    /// Restrict to check groups: limits, sibson, decoupling, gaussian-js
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<String>,
    #[arg(long)]
    pub limit_count: Option<usize>,
    #[arg(long)]
    pub identity_count: Option<usize>,
    #[arg(long)]
    pub bruteforce_count: Option<usize>,
    #[arg(long)]
    pub decoupling_count: Option<usize>,
    /// Samples for the Gaussian JS Monte Carlo cross-check
    #[arg(long)]
    pub js_mc_samples: Option<usize>,
}

/// What a successful command produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub written: Vec<PathBuf>,
    pub stdout: String,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Builds the effective config: file or preset, then flags, then `--set`.
pub fn assemble_config(g: &GlobalArgs, default_preset: Option<&str>) -> Result<RunConfig, CliError> {
    let mut doc = match (&g.config, &g.preset) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
            let mut v: Value =
                serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            if let Some(p) = &g.preset {
                // preset supplies defaults the file does not set
                let mut base = preset(p)?;
                merge(&mut base, v);
                v = base;
            }
            v
        }
        (None, Some(p)) => preset(p)?,
        (None, None) => match default_preset {
            Some(p) => preset(p)?,
            None => return Err(usage("this command needs --config or --preset")),
        },
    };

    if let Some(v) = g.alpha_start {
        set_path(&mut doc, "grid.start", json!(v))?;
    }
    if let Some(v) = g.alpha_stop {
        set_path(&mut doc, "grid.stop", json!(v))?;
    }
    if let Some(v) = g.alpha_count {
        set_path(&mut doc, "grid.count", json!(v))?;
    }
    if !g.format.is_empty() {
        set_path(&mut doc, "output.formats", serde_json::to_value(&g.format).expect("formats serialise"))?;
    }
    if let Some(q) = g.quad_order {
        set_path(&mut doc, "quad_order", json!(q))?;
    }
    if !g.methods.is_empty() {
        let ms = g
            .methods
            .iter()
            .map(|m| m.trim().parse::<Method>().map_err(|e| usage(format!("--methods: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        set_path(&mut doc, "methods", serde_json::to_value(ms).expect("methods serialise"))?;
    }
    let kind = doc.pointer("/model/kind").and_then(Value::as_str).unwrap_or("").to_string();
    if let Some(n) = g.mc_samples {
        if kind != "gaussian" {
            return Err(usage("--mc-samples only applies to gaussian models"));
        }
        set_path(&mut doc, "model.mc.samples", json!(n))?;
        if doc.pointer("/model/mc/seed").is_none() {
            set_path(&mut doc, "model.mc.seed", json!(1))?;
        }
    }
    if let Some(seed) = g.seed {
        if doc.pointer("/model/prior/dirichlet").is_some() {
            set_path(&mut doc, "model.prior.dirichlet.seed", json!(seed))?;
        } else if doc.pointer("/model/mc").is_some() {
            set_path(&mut doc, "model.mc.seed", json!(seed))?;
        } else {
            return Err(usage("--seed has no effect: the model has neither a Dirichlet prior nor a Monte Carlo block"));
        }
    }
    for a in &g.overrides {
        let (k, v) = parse_assignment(a)?;
        set_path(&mut doc, &k, v)?;
    }
    RunConfig::from_value(doc)
}

fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    // a different model kind replaces the block wholesale
                    Some(slot) if k != "model" => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, o) => *b = o,
    }
}

fn output_dir(g: &GlobalArgs, cfg: &RunConfig, env: Option<String>) -> PathBuf {
    g.out
        .clone()
        .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
        .or_else(|| env.filter(|s| !s.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

/// Writes every file via a temporary sibling and a rename.
pub fn write_atomic(dir: &Path, files: &[(String, String)]) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    let mut written = vec![];
    for (name, body) in files {
        let dest = dir.join(name);
        let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
        let res = fs::File::create(&tmp).and_then(|mut f| {
            f.write_all(body.as_bytes())?;
            f.sync_all()
        });
        if let Err(source) = res.and_then(|_| fs::rename(&tmp, &dest)) {
            let _ = fs::remove_file(&tmp);
            return Err(CliError::Io { path: dest, source });
        }
        written.push(dest);
    }
    Ok(written)
}

/// Renders every requested format for `cfg`; nothing touches disk.
pub fn render_outputs(cfg: &RunConfig) -> Result<Vec<(String, String)>, CliError> {
    let table = build_table(cfg)?;
    let mut formats = cfg.output.formats.clone();
    formats.dedup();
    if formats.is_empty() {
        return Err(usage("output.formats: at least one format is required"));
    }
    let stem = &cfg.output.stem;
    if stem.is_empty() || stem.contains(['/', '\\']) {
        return Err(usage(format!("output.stem: '{stem}' is not a plain file name")));
    }
    Ok(formats
        .iter()
        .map(|f| {
            let body = match f {
                Format::Csv => table.to_csv(),
                Format::Json => table.to_json(),
                Format::Svg => svg::render(&table, stem),
            };
            (format!("{stem}.{}", f.extension()), body)
        })
        .collect())
}

fn run_curves(g: &GlobalArgs, cfg: RunConfig, env: Option<String>) -> Result<Outcome, CliError> {
    let files = render_outputs(&cfg)?;
    let dir = output_dir(g, &cfg, env);
    let written = write_atomic(&dir, &files)?;
    let stdout = written.iter().map(|p| format!("wrote {}\n", p.display())).collect();
    Ok(Outcome { written, stdout })
}

fn run_validate(g: &GlobalArgs, v: &ValidateArgs) -> Result<Outcome, CliError> {
    if g.alpha_start.is_some() || g.alpha_stop.is_some() || g.alpha_count.is_some() {
        let d = config::GridConfig::default();
        linear_grid(g.alpha_start.unwrap_or(d.start), g.alpha_stop.unwrap_or(d.stop), g.alpha_count.unwrap_or(d.count))
            .map_err(|e| usage(format!("grid: {e}")))?;
    }
    let mut opts = SuiteOptions::default();
    if let Some(s) = g.seed {
        opts.seed = s;
    }
    if let Some(q) = g.quad_order {
        opts.quad_order = q;
    }
    let set = |slot: &mut usize, v: Option<usize>| {
        if let Some(v) = v {
            *slot = v;
        }
    };
    set(&mut opts.limit_count, v.limit_count);
    set(&mut opts.identity_count, v.identity_count);
    set(&mut opts.bruteforce_count, v.bruteforce_count);
    set(&mut opts.decoupling_count, v.decoupling_count);
    set(&mut opts.mc_samples, v.js_mc_samples);
    let only: Vec<String> = v.only.iter().map(|s| s.trim().to_string()).collect();
    let report = run_suite(&opts, &only).map_err(CliError::from_core)?;

    let mut stdout = String::new();
    for c in &report.checks {
        stdout.push_str(&serde_json::to_string(c).map_err(|e| CliError::Internal(e.to_string()))?);
        stdout.push('\n');
    }
    for c in &report.checks {
        stdout.push_str(&format!(
            "{} {:<40} discrepancy {:.3e} (tolerance {:.1e}, {} cases)\n",
            if c.pass { "ok  " } else { "FAIL" },
            c.name,
            c.discrepancy,
            c.tolerance,
            c.cases
        ));
    }
    let failed: Vec<String> = report.failures().map(|c| c.name.clone()).collect();
    stdout.push_str(&format!("{} checks, {} failed\n", report.checks.len(), failed.len()));
    if failed.is_empty() {
        Ok(Outcome { written: vec![], stdout })
    } else {
        print!("{stdout}");
        Err(CliError::ChecksFailed(failed))
    }
}

/// Executes a parsed command line; `env_out` is the value of `XSRISK_OUT`.
pub fn run(cli: &Cli, env_out: Option<String>) -> Result<Outcome, CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Qsc => {
            let cfg = assemble_config(g, Some("q2"))?;
            if !cfg.is_discrete() {
                return Err(usage("qsc needs a discrete model (kind qsc or chain)"));
            }
            run_curves(g, cfg, env_out)
        }
        Command::Gaussian => {
            let cfg = assemble_config(g, Some("example2"))?;
            if cfg.is_discrete() {
                return Err(usage("gaussian needs a model of kind gaussian"));
            }
            run_curves(g, cfg, env_out)
        }
        Command::Sweep => run_curves(g, assemble_config(g, None)?, env_out),
        Command::Validate(v) => run_validate(g, v),
    }
}

/// Parses `args` (including the program name) and runs them.
pub fn run_from<I, T>(args: I, env_out: Option<String>) -> Result<Outcome, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| usage(e.to_string()))?;
    run(&cli, env_out)
}
