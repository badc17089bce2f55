//! Curve tables and their CSV / JSON renderings.

use serde_json::{json, Map, Value};
use xsrisk_core::bounds::{sweep, BoundCurve, SweepOptions};
use xsrisk_core::gaussian::{mc_excess_risk_clamped, McEstimate};

use crate::config::RunConfig;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    /// `alpha` first, then α-dependent methods, then reference columns.
    pub columns: Vec<(String, Vec<f64>)>,
    pub metadata: Vec<(String, Value)>,
}

/// Rounds to 12 significant digits and prints the shortest decimal form.
pub fn format_number(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v.is_nan() {
        return "nan".into();
    }
    let r: f64 = format!("{v:.11e}").parse().unwrap_or(v);
    let s = format!("{r}");
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

fn json_number(v: f64) -> Value {
    if v.is_finite() {
        let r: f64 = format!("{v:.11e}").parse().unwrap_or(v);
        json!(if r == 0.0 { 0.0 } else { r })
    } else {
        Value::String(format_number(v))
    }
}

impl CurveTable {
    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.1.len())
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns.iter().find(|c| c.0 == name).map(|c| c.1.as_slice())
    }

    pub fn from_curve(curve: &BoundCurve, cfg: &RunConfig, mc: Option<&McEstimate>) -> Result<Self, CliError> {
        let n = curve.alphas.len();
        let mut columns = vec![("alpha".to_string(), curve.alphas.clone())];
        for (m, vals) in &curve.curves {
            columns.push((m.name().to_string(), vals.clone()));
        }
        columns.push(("mi".into(), vec![curve.mi; n]));
        columns.push(("lautum".into(), vec![curve.lautum; n]));
        if let Some(t) = curve.true_excess.or(mc.map(|m| m.excess)) {
            columns.push(("true_excess".into(), vec![t; n]));
        }

        let echo = serde_json::to_value(cfg.echo()).map_err(|e| CliError::Internal(e.to_string()))?;
        let mut metadata = vec![
            ("config".to_string(), echo),
            ("version".into(), json!(curve.meta.version)),
            ("model".into(), json!(curve.meta.model)),
            ("e_sigma2".into(), json_number(curve.meta.e_sigma2)),
        ];
        if let Some(l) = curve.meta.profile.linf {
            metadata.push(("linf".into(), json_number(l)));
        }
        if let Some(q) = curve.meta.quad_order {
            metadata.push(("quad_order".into(), json!(q)));
        }
        let seeds: Map<String, Value> = cfg.seeds().into_iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
        metadata.push(("seeds".into(), Value::Object(seeds)));
        metadata.push(("mi_gap".into(), json_number(curve.mi_gap)));
        metadata.push(("lautum_term".into(), json_number(curve.lautum_term)));
        if let Some(m) = mc {
            metadata.push(("true_excess_se".into(), json_number(m.se_excess)));
            metadata.push(("true_excess_samples".into(), json!(m.n)));
        }
        Ok(CurveTable { columns, metadata })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let names: Vec<&str> = self.columns.iter().map(|c| c.0.as_str()).collect();
        out.push_str(&names.join(","));
        out.push('\n');
        for i in 0..self.rows() {
            let row: Vec<String> = self.columns.iter().map(|c| format_number(c.1[i])).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        for (k, v) in &self.metadata {
            let text = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            out.push_str(&format!("# {k}: {text}\n"));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let metadata: Map<String, Value> = self.metadata.iter().cloned().collect();
        let columns: Vec<Value> = self
            .columns
            .iter()
            .map(|(name, vals)| json!({"name": name, "values": vals.iter().map(|&v| json_number(v)).collect::<Vec<_>>()}))
            .collect();
        let mut s = serde_json::to_string_pretty(&json!({"metadata": metadata, "columns": columns}))
            .expect("plain JSON values serialise");
        s.push('\n');
        s
    }
}

/// Runs the sweep (plus the optional Monte Carlo excess estimate) for `cfg`.
pub fn build_table(cfg: &RunConfig) -> Result<CurveTable, CliError> {
    let r = cfg.resolve()?;
    let opts = SweepOptions { quad_order: cfg.quad_order };
    let curve = sweep(&r.model, &cfg.methods, &r.grid, &r.profile, &opts).map_err(CliError::from_core)?;
    let mc = match r.mc {
        Some((m, loss, spec)) => Some(mc_excess_risk_clamped(&spec, &loss, m.samples, m.seed).map_err(CliError::from_core)?),
        None => None,
    };
    CurveTable::from_curve(&curve, cfg, mc.as_ref())
}
