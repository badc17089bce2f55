//! Run configuration: JSON documents, built-in presets and dotted-path overrides.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use xsrisk_core::bounds::{linear_grid, Method, Model, SubGaussProfile};
use xsrisk_core::discrete::{dirichlet_prior, DirichletConfig, MarkovChainSpec};
use xsrisk_core::divergence::Pmf;
use xsrisk_core::gaussian::{chain_expected_sigma2, ClampedAbsLoss, Direction, GaussianChainSpec};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorSource {
    Explicit(Vec<f64>),
    Dirichlet { concentration: f64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum ModelConfig {
    /// Two cascaded q-ary symmetric channels.
    Qsc { q: usize, prior: PriorSource, eps1: f64, eps2: f64 },
    /// Arbitrary prior and channel matrices.
    Chain { prior: Vec<f64>, w1: Vec<Vec<f64>>, w2: Vec<Vec<f64>> },
    Gaussian {
        var_input: f64,
        var_n1: f64,
        var_n2: f64,
        direction: Direction,
        c: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mc: Option<McConfig>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { start: 0.01, stop: 0.99, count: 99 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub dir: Option<String>,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
    #[serde(default = "default_stem")]
    pub stem: String,
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv]
}

fn default_stem() -> String {
    "sweep".into()
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: None, formats: default_formats(), stem: default_stem() }
    }
}

fn default_quad() -> usize {
    xsrisk_core::gaussian::DEFAULT_QUAD_ORDER
}

fn default_linf() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub methods: Vec<Method>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default = "default_quad")]
    pub quad_order: usize,
    /// Loss bound for discrete models (1 for the 0-1 loss).
    #[serde(default = "default_linf")]
    pub linf: f64,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Everything that determines the numbers, i.e. the config minus output routing.
#[derive(Debug, Serialize)]
pub struct ConfigEcho<'a> {
    pub model: &'a ModelConfig,
    pub methods: &'a [Method],
    pub grid: &'a GridConfig,
    pub quad_order: usize,
    pub linf: f64,
}

/// A config resolved into library inputs.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub model: Model,
    pub profile: SubGaussProfile,
    pub grid: Vec<f64>,
    pub mc: Option<(McConfig, ClampedAbsLoss, GaussianChainSpec)>,
}

fn usage(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("{field}: {msg}"))
}

impl RunConfig {
    pub fn from_value(v: Value) -> Result<Self, CliError> {
        serde_json::from_value(v).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn echo(&self) -> ConfigEcho<'_> {
        ConfigEcho { model: &self.model, methods: &self.methods, grid: &self.grid, quad_order: self.quad_order, linf: self.linf }
    }

    pub fn is_discrete(&self) -> bool {
        !matches!(self.model, ModelConfig::Gaussian { .. })
    }

    /// Seeds that feed the computation, for the metadata footer.
    pub fn seeds(&self) -> Vec<(&'static str, u64)> {
        match &self.model {
            ModelConfig::Qsc { prior: PriorSource::Dirichlet { seed, .. }, .. } => vec![("dirichlet", *seed)],
            ModelConfig::Gaussian { mc: Some(m), .. } => vec![("monte_carlo", m.seed)],
            _ => vec![],
        }
    }

    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let grid = linear_grid(self.grid.start, self.grid.stop, self.grid.count).map_err(|e| usage("grid", e))?;
        if self.methods.is_empty() {
            return Err(usage("methods", "at least one method is required"));
        }
        if !(self.quad_order >= 1 && self.quad_order <= xsrisk_core::gaussian::MAX_ORDER) {
            return Err(usage("quad_order", format!("must lie in 1..={}", xsrisk_core::gaussian::MAX_ORDER)));
        }
        let (model, profile, mc) = match &self.model {
            ModelConfig::Qsc { q, prior, eps1, eps2 } => {
                let prior = match prior {
                    PriorSource::Explicit(p) => {
                        if p.len() != *q {
                            return Err(usage("model.prior", format!("has {} entries but q = {q}", p.len())));
                        }
                        Pmf::new(p.clone()).map_err(|e| usage("model.prior", e))?
                    }
                    PriorSource::Dirichlet { concentration, seed } => {
                        dirichlet_prior(&DirichletConfig { q: *q, concentration: *concentration, seed: *seed })
                            .map_err(|e| usage("model.prior", e))?
                    }
                };
                let spec = MarkovChainSpec::qsc(prior, *eps1, *eps2).map_err(|e| usage("model.eps1/eps2", e))?;
                (Model::Discrete(spec), self.bounded()?, None)
            }
            ModelConfig::Chain { prior, w1, w2 } => {
                let prior = Pmf::new(prior.clone()).map_err(|e| usage("model.prior", e))?;
                let w1 = xsrisk_core::discrete::ChannelMatrix::from_rows(w1).map_err(|e| usage("model.w1", e))?;
                let w2 = xsrisk_core::discrete::ChannelMatrix::from_rows(w2).map_err(|e| usage("model.w2", e))?;
                let spec = MarkovChainSpec::new(prior, w1, w2).map_err(|e| usage("model", e))?;
                (Model::Discrete(spec), self.bounded()?, None)
            }
            ModelConfig::Gaussian { var_input, var_n1, var_n2, direction, c, mc } => {
                let spec = GaussianChainSpec::new(*var_input, *var_n1, *var_n2, *direction)
                    .map_err(|e| usage("model", e))?;
                let loss = ClampedAbsLoss::new(*c).map_err(|e| usage("model.c", e))?;
                let profile = SubGaussProfile::expected(chain_expected_sigma2(&spec, &loss)).map_err(|e| usage("model", e))?;
                (Model::Gaussian(spec), profile, mc.map(|m| (m, loss, spec)))
            }
        };
        Ok(Resolved { model, profile, grid, mc })
    }

    fn bounded(&self) -> Result<SubGaussProfile, CliError> {
        SubGaussProfile::bounded(self.linf).map_err(|e| usage("linf", e))
    }
}

pub const QSC_PRESETS: [&str; 6] = ["q2", "q3", "q5", "q10", "q100", "q200"];
pub const GAUSSIAN_PRESETS: [&str; 2] = ["example2", "example3"];
pub const DIRICHLET_SEED: u64 = 42;
pub const DIRICHLET_CONCENTRATION: f64 = 2.0;

/// The preset as a JSON document; `q2` and `2` are both accepted.
pub fn preset(name: &str) -> Result<Value, CliError> {
    let key = if name.chars().all(|c| c.is_ascii_digit()) { format!("q{name}") } else { name.to_string() };
    let qsc = |q: usize, prior: Value| {
        json!({
            "model": {"kind": "qsc", "q": q, "prior": prior, "eps1": 0.15, "eps2": 0.05},
            "methods": ["renyi", "js", "sibson"],
            "output": {"stem": key},
        })
    };
    let dirichlet = json!({"dirichlet": {"concentration": DIRICHLET_CONCENTRATION, "seed": DIRICHLET_SEED}});
    let gaussian = |v: (f64, f64, f64), dir: &str| {
        json!({
            "model": {"kind": "gaussian", "var_input": v.0, "var_n1": v.1, "var_n2": v.2, "direction": dir, "c": 1.0},
            "methods": ["renyi", "js"],
            "output": {"stem": key},
        })
    };
    Ok(match key.as_str() {
        "q2" => qsc(2, json!({"explicit": [0.3, 0.7]})),
        "q3" => qsc(3, json!({"explicit": [0.4, 0.2, 0.4]})),
        "q5" => qsc(5, json!({"explicit": [0.25, 0.1, 0.4, 0.15, 0.1]})),
        "q10" => qsc(10, dirichlet),
        "q100" => qsc(100, dirichlet),
        "q200" => qsc(200, dirichlet),
        "example2" => gaussian((1.0, 1.0, 1.0), "forward"),
        "example3" => gaussian((2.0, 39.0, 1.0), "reverse"),
        _ => {
            return Err(CliError::Usage(format!(
                "unknown preset '{name}'; presets: {}, {}",
                QSC_PRESETS.join(", "),
                GAUSSIAN_PRESETS.join(", ")
            )))
        }
    })
}

/// Sets `path` (dot separated) in `doc`, creating objects along the way.
pub fn set_path(doc: &mut Value, path: &str, value: Value) -> Result<(), CliError> {
    let parts: Vec<&str> = path.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(CliError::Usage(format!("bad override path '{path}'")));
    }
    let mut cur = doc;
    for (i, part) in parts.iter().enumerate() {
        if !cur.is_object() {
            return Err(CliError::Usage(format!("override path '{path}' passes through a non-object")));
        }
        let obj = cur.as_object_mut().expect("checked above");
        if i == parts.len() - 1 {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        cur = obj.entry(part.to_string()).or_insert_with(|| json!({}));
    }
    unreachable!("path has at least one part")
}

/// `key=value`; the value is parsed as JSON, falling back to a bare string.
pub fn parse_assignment(s: &str) -> Result<(String, Value), CliError> {
    let (k, v) = s.split_once('=').ok_or_else(|| CliError::Usage(format!("override '{s}' is not key=value")))?;
    let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
    Ok((k.trim().to_string(), value))
}
