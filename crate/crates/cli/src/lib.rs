//! Scenario runner: elaborates a scenario file into a regular Poisson structure,
//! executes its tasks and assembles a deterministic report.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::{json, Value as Json};

use poisfol::{expr, RegularPoissonStructure, Splitting, TorusFunction};

pub mod bundled;
pub mod scenario;
mod tasks;

pub use scenario::{Scenario, Task};
pub use tasks::DEFAULT_SEED;

/// Errors that abort a run before or during task execution.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("schema: {0}")]
    Schema(String),
    #[error("elaboration: {0}")]
    Elaboration(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Usage(_) | RunError::Schema(_) => 2,
            RunError::Elaboration(_) => 3,
        }
    }
}

/// Command-line overrides applied to every task.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub box_bound: Option<i32>,
    pub parallel: bool,
    pub seed: Option<u64>,
    pub full_complex: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

/// A finished run: the report document and the number of failed tasks.
#[derive(Clone, Debug)]
pub struct Report {
    pub document: Json,
    pub failed: usize,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.failed == 0 {
            0
        } else {
            1
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.document).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => render_text(&self.document),
        }
    }
}

fn render_text(doc: &Json) -> String {
    let mut out = String::new();
    out.push_str(&format!("scenario {}\n", doc["scenario"].as_str().unwrap_or("")));
    out.push_str(&format!("poisson  {}\n", doc["poisson"].as_str().unwrap_or("")));
    for t in doc["tasks"].as_array().into_iter().flatten() {
        let status = t["status"].as_str().unwrap_or("").to_uppercase();
        out.push_str(&format!("\n[{status}] {} ({})\n", t["id"].as_str().unwrap_or(""), t["type"].as_str().unwrap_or("")));
        if let Some(fields) = t["result"].as_object() {
            for (k, v) in fields {
                let text = match v {
                    Json::String(s) => s.clone(),
                    other => other.to_string(),
                };
                out.push_str(&format!("  {k}: {text}\n"));
            }
        }
        for c in t["checks"].as_array().into_iter().flatten() {
            let mark = if c["holds"].as_bool() == Some(true) { "ok" } else { "MISMATCH" };
            out.push_str(&format!(
                "  check {} {mark}: expected {} computed {}\n",
                c["check"].as_str().unwrap_or(""),
                c["expected"].as_str().unwrap_or(""),
                c["computed"].as_str().unwrap_or("")
            ));
        }
    }
    let s = &doc["summary"];
    out.push_str(&format!("\n{} tasks, {} failed\n", s["tasks"], s["failed"]));
    out
}

/// Builds the regular Poisson structure named by a scenario.
pub fn elaborate(sc: &Scenario) -> Result<RegularPoissonStructure, RunError> {
    let n = sc.dimension;
    let err = |e: poisfol::Error| RunError::Elaboration(e.to_string());
    let leaf: Vec<usize> = sc.splitting.leaf.iter().map(|i| i - 1).collect();
    let mut frame: BTreeMap<usize, Vec<TorusFunction>> = BTreeMap::new();
    for (key, coeffs) in &sc.splitting.frame {
        let a: usize = key.parse().map_err(|_| RunError::Schema(format!("frame key {key:?}")))?;
        let fs = coeffs.iter().map(|c| expr::parse_function(c, n)).collect::<poisfol::Result<Vec<_>>>().map_err(err)?;
        frame.insert(a - 1, fs);
    }
    let splitting = Splitting::new(n, &leaf, frame).map_err(err)?;
    let pi = expr::parse_multivector(&sc.poisson, n).map_err(err)?;
    RegularPoissonStructure::new(pi, splitting).map_err(err)
}

/// Runs every task of a scenario and assembles the report. Task order in the report
/// follows the scenario regardless of `--parallel`.
pub fn run(sc: &Scenario, opts: &RunOptions) -> Result<Report, RunError> {
    let rp = elaborate(sc)?;
    let ctx = tasks::Context { rp: &rp, opts, scenario_seed: sc.seed };
    let results: Vec<Result<Json, RunError>> = if opts.parallel {
        sc.tasks.par_iter().map(|t| tasks::run_task(&ctx, t)).collect()
    } else {
        sc.tasks.iter().map(|t| tasks::run_task(&ctx, t)).collect()
    };
    let records = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let failed = records.iter().filter(|r| r["status"] != "pass").count();
    let document = json!({
        "scenario": sc.name,
        "dimension": sc.dimension,
        "coordinates": sc.coordinate_names(),
        "poisson": expr::print_canonical(&poisfol::Value::Multivector(rp.pi.clone())),
        "leaf": sc.splitting.leaf,
        "gamma": expr::print_canonical(&poisfol::Value::Form(rp.gamma.clone())),
        "tasks": records,
        "summary": { "tasks": sc.tasks.len(), "failed": failed },
    });
    Ok(Report { document, failed })
}

/// Parses, validates and runs a scenario document.
pub fn run_text(text: &str, opts: &RunOptions) -> Result<Report, RunError> {
    run(&Scenario::from_json(text)?, opts)
}
