//! Named reproduction scenarios, their parameters and reports.

mod scenarios;

pub use scenarios::spiral;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::numerics::{MinConfig, QuadConfig};
use crate::prekopa::Verdict;

const EMBEDDED_DEFAULTS: &str = include_str!("../../defaults/scenarios.json");

/// Environment variable naming an alternate defaults file.
pub const DEFAULTS_ENV: &str = "CONVLAB_DEFAULTS";

/// How `actual` is compared with `expected`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|actual − expected| ≤ tol`.
    Close,
    /// `actual ≤ expected + tol`.
    AtMost,
    /// `actual ≥ expected − tol`.
    AtLeast,
    /// A yes/no property; `actual` is 1 when it holds.
    Holds,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub description: String,
    pub relation: Relation,
    #[serde(with = "crate::extended")]
    pub expected: f64,
    #[serde(with = "crate::extended")]
    pub actual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(description: impl Into<String>, relation: Relation, expected: f64, actual: f64, tol: f64) -> Self {
        let pass = match relation {
            Relation::Close => (actual - expected).abs() <= tol || actual == expected,
            Relation::AtMost => actual <= expected + tol,
            Relation::AtLeast => actual >= expected - tol,
            Relation::Holds => actual == 1.0,
        };
        Self { description: description.into(), relation, expected, actual, tol, pass }
    }

    pub fn close(d: impl Into<String>, expected: f64, actual: f64, tol: f64) -> Self {
        Self::new(d, Relation::Close, expected, actual, tol)
    }

    pub fn at_most(d: impl Into<String>, bound: f64, actual: f64, tol: f64) -> Self {
        Self::new(d, Relation::AtMost, bound, actual, tol)
    }

    pub fn at_least(d: impl Into<String>, bound: f64, actual: f64, tol: f64) -> Self {
        Self::new(d, Relation::AtLeast, bound, actual, tol)
    }

    pub fn holds(d: impl Into<String>, ok: bool) -> Self {
        Self::new(d, Relation::Holds, 1.0, if ok { 1.0 } else { 0.0 }, 0.0)
    }
}

/// A numeric table emitted next to a report (written as CSV).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self { name: name.to_string(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r.iter().map(|v| crate::extended::fmt(*v)))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: String,
    pub params: Value,
    pub checks: Vec<Check>,
    pub verdict: Verdict,
    /// Seconds; the only field that varies between identical runs.
    pub wall_time: f64,
    #[serde(skip)]
    pub tables: Vec<Table>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Write every table as `<dir>/<scenario>_<table>.csv`.
    pub fn write_tables(&self, dir: &Path) -> Result<Vec<std::path::PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        for t in &self.tables {
            let p = dir.join(format!("{}_{}.csv", self.scenario, t.name));
            t.write_csv(std::fs::File::create(&p)?)?;
            out.push(p);
        }
        Ok(out)
    }
}

/// Scenario parameters: defaults merged with overrides.
#[derive(Clone, Debug, PartialEq)]
pub struct Params(pub Map<String, Value>);

impl Params {
    fn get(&self, key: &str) -> Result<&Value> {
        self.0.get(key).ok_or_else(|| Error::InvalidParam(format!("missing parameter `{key}`")))
    }

    fn bad(key: &str, want: &str) -> Error {
        Error::InvalidParam(format!("parameter `{key}` must be {want}"))
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        self.get(key)?.as_f64().ok_or_else(|| Self::bad(key, "a number"))
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        self.get(key)?.as_u64().map(|v| v as usize).ok_or_else(|| Self::bad(key, "a non-negative integer"))
    }

    pub fn u32(&self, key: &str) -> Result<u32> {
        let v = self.usize(key)?;
        u32::try_from(v).map_err(|_| Self::bad(key, "a 32-bit integer"))
    }

    pub fn f64s(&self, key: &str) -> Result<Vec<f64>> {
        self.get(key)?
            .as_array()
            .and_then(|a| a.iter().map(Value::as_f64).collect())
            .ok_or_else(|| Self::bad(key, "a list of numbers"))
    }

    pub fn u32s(&self, key: &str) -> Result<Vec<u32>> {
        self.get(key)?
            .as_array()
            .and_then(|a| a.iter().map(|v| v.as_u64().and_then(|x| u32::try_from(x).ok())).collect())
            .ok_or_else(|| Self::bad(key, "a list of non-negative integers"))
    }

    pub fn points(&self, key: &str) -> Result<Vec<[f64; 2]>> {
        let v: Vec<[f64; 2]> =
            serde_json::from_value(self.get(key)?.clone()).map_err(|_| Self::bad(key, "a list of [re, im] pairs"))?;
        Ok(v)
    }

    pub fn point(&self, key: &str) -> Result<[f64; 2]> {
        serde_json::from_value(self.get(key)?.clone()).map_err(|_| Self::bad(key, "an [re, im] pair"))
    }

    /// Optional `quad` object over the default quadrature settings.
    pub fn quad(&self) -> Result<QuadConfig> {
        let cfg = match self.0.get("quad") {
            None => QuadConfig::default(),
            Some(v) => serde_json::from_value(v.clone()).map_err(|_| Self::bad("quad", "a quadrature config"))?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Optional `min` object over the default minimization settings.
    pub fn min(&self) -> Result<MinConfig> {
        let cfg = match self.0.get("min") {
            None => MinConfig::default(),
            Some(v) => serde_json::from_value(v.clone()).map_err(|_| Self::bad("min", "a minimization config"))?,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Command-line style overrides applied on top of the defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub epsilon: Option<f64>,
    pub ks: Option<Vec<u32>>,
    pub tol: Option<f64>,
    /// Arbitrary parameter replacements (e.g. from a JSON config file).
    pub extra: Map<String, Value>,
}

fn set_param(params: &mut Map<String, Value>, key: &str, v: Value) -> Result<()> {
    if !params.contains_key(key) {
        return Err(Error::InvalidParam(format!("this scenario has no parameter `{key}`")));
    }
    params.insert(key.to_string(), v);
    Ok(())
}

impl Overrides {
    fn apply(&self, params: &mut Map<String, Value>) -> Result<()> {
        for (k, v) in &self.extra {
            set_param(params, k, v.clone())?;
        }
        if let Some(e) = self.epsilon {
            set_param(params, "epsilon", e.into())?;
        }
        if let Some(t) = self.tol {
            set_param(params, "tol", t.into())?;
        }
        if let Some(ks) = &self.ks {
            if params.contains_key("ks") {
                set_param(params, "ks", ks.clone().into())?;
            } else if ks.len() == 1 {
                set_param(params, "k", ks[0].into())?;
            } else {
                return Err(Error::InvalidParam("this scenario takes a single k".into()));
            }
        }
        Ok(())
    }
}

type Runner = fn(&Params) -> Result<Outcome>;

/// What a scenario produces before timing and verdict are attached.
pub struct Outcome {
    pub checks: Vec<Check>,
    pub tables: Vec<Table>,
}

/// Registry entry.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScenarioInfo {
    pub name: &'static str,
    pub summary: &'static str,
    /// Statements of the source results this scenario reproduces.
    pub references: &'static [&'static str],
    #[serde(skip)]
    run: Runner,
}

/// The scenario catalog, in a fixed order.
pub fn list_scenarios() -> &'static [ScenarioInfo] {
    scenarios::REGISTRY
}

pub fn find_scenario(name: &str) -> Result<&'static ScenarioInfo> {
    list_scenarios().iter().find(|s| s.name == name).ok_or_else(|| Error::UnknownScenario(name.to_string()))
}

/// Default parameters for every scenario: the file named by
/// `CONVLAB_DEFAULTS` if set, else the built-in table.
pub fn load_defaults() -> Result<BTreeMap<String, Map<String, Value>>> {
    let text = match std::env::var_os(DEFAULTS_ENV) {
        Some(p) => std::fs::read_to_string(p)?,
        None => EMBEDDED_DEFAULTS.to_string(),
    };
    parse_defaults(&text)
}

pub fn parse_defaults(text: &str) -> Result<BTreeMap<String, Map<String, Value>>> {
    #[derive(Deserialize)]
    struct File {
        #[allow(dead_code)]
        version: u32,
        scenarios: BTreeMap<String, Map<String, Value>>,
    }
    let f: File = serde_json::from_str(text)?;
    Ok(f.scenarios)
}

/// Merged parameters for `name`.
pub fn scenario_params(name: &str, overrides: &Overrides) -> Result<Params> {
    find_scenario(name)?;
    let mut params = load_defaults()?
        .remove(name)
        .ok_or_else(|| Error::InvalidParam(format!("no defaults for scenario `{name}`")))?;
    overrides.apply(&mut params)?;
    Ok(Params(params))
}

/// Run a registered scenario with the given overrides.
pub fn run_scenario(name: &str, overrides: &Overrides) -> Result<RunReport> {
    let info = find_scenario(name)?;
    let params = scenario_params(name, overrides)?;
    run_with_params(info, params)
}

pub fn run_with_params(info: &ScenarioInfo, params: Params) -> Result<RunReport> {
    let start = Instant::now();
    let outcome = (info.run)(&params)?;
    let verdict = Verdict::from_bool(outcome.checks.iter().all(|c| c.pass));
    Ok(RunReport {
        scenario: info.name.to_string(),
        params: Value::Object(params.0),
        checks: outcome.checks,
        verdict,
        wall_time: start.elapsed().as_secs_f64(),
        tables: outcome.tables,
    })
}
