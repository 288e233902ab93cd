//! Batch front end: config parsing, scenario execution, parameter sweeps and
//! CSV/JSON emission.
//!
//! Every run writes its tables plus a `metadata.json` (toolkit version, seed,
//! SHA-256 of the config) into the output directory. Identical configs and seeds
//! give byte-identical files.

pub mod config;
pub mod error;
pub mod output;
pub mod scenario;

use std::path::{Path, PathBuf};

use serde_json::json;
use sha2::{Digest, Sha256};

pub use config::Document;
pub use error::{CliError, CliResult};
pub use output::{Cell, Format, Table};
pub use scenario::{execute, plan, Outcome, Plan, Scenario};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out: PathBuf,
    pub format: Format,
    /// Overrides the config's `seed`.
    pub seed: Option<u64>,
}

/// Parameter sweep request.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    /// Dotted path of a numeric config entry, e.g. `transduce.analyte_index`.
    pub param: String,
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

/// Files written by a run.
#[derive(Debug, Clone)]
pub struct Report {
    pub files: Vec<PathBuf>,
    pub notes: Vec<String>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn resolve_seed(doc: &Document, opts: &RunOptions) -> CliResult<u64> {
    Ok(opts.seed.or(scenario::config_seed(doc)?).unwrap_or(0))
}

fn metadata(doc: &Document, scenario: Scenario, seed: u64, format: Format, notes: &[String]) -> serde_json::Value {
    json!({
        "toolkit_version": VERSION,
        "scenario": scenario.name(),
        "seed": seed,
        "config_sha256": sha256_hex(&doc.bytes),
        "format": format.extension(),
        "notes": notes,
    })
}

/// Validates a config without executing it.
pub fn validate(config: &Path) -> CliResult<Scenario> {
    let doc = Document::load(config)?;
    scenario::config_seed(&doc)?;
    plan(&doc)?;
    scenario::scenario_of(&doc)
}

/// Runs the scenario named in `config`.
pub fn run(config: &Path, opts: &RunOptions) -> CliResult<Report> {
    let doc = Document::load(config)?;
    let scenario = scenario::scenario_of(&doc)?;
    let seed = resolve_seed(&doc, opts)?;
    let outcome = execute(&plan(&doc)?, seed)?;
    let meta = metadata(&doc, scenario, seed, opts.format, &outcome.notes);
    let files = output::emit(&opts.out, &outcome.tables, opts.format, meta)?;
    Ok(Report { files, notes: outcome.notes })
}

/// Runs the scenario at `points` linearly spaced values of one parameter.
///
/// Each table gains a leading column holding the swept value; point `i` uses the
/// seed derived from the run seed and stream `i`.
pub fn sweep(config: &Path, spec: &SweepSpec, opts: &RunOptions) -> CliResult<Report> {
    let doc = Document::load(config)?;
    let scenario = scenario::scenario_of(&doc)?;
    let seed = resolve_seed(&doc, opts)?;
    if spec.points < 2 {
        return Err(CliError::config("--points", format!("need at least 2 points, got {}", spec.points)));
    }
    if !spec.from.is_finite() || !spec.to.is_finite() {
        return Err(CliError::config("--from/--to", "sweep bounds must be finite"));
    }
    let values = scenario::linspace(spec.from, spec.to, spec.points);
    let mut combined: Vec<Table> = Vec::new();
    let mut notes = Vec::new();
    let mut seeds = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        let mut point = doc.clone();
        point.set_number(&spec.param, v)?;
        let point_seed = qplasm::mc::derive_seed(seed, i as u64);
        seeds.push(point_seed);
        let outcome = execute(&plan(&point)?, point_seed)?;
        let tag = output::format_float(v);
        notes.extend(outcome.notes.into_iter().map(|n| format!("{} = {tag}: {n}", spec.param)));
        for t in outcome.tables {
            let target = match combined.iter_mut().find(|c| c.name == t.name) {
                Some(c) => c,
                None => {
                    let mut columns = vec![spec.param.clone()];
                    columns.extend(t.columns.iter().cloned());
                    combined.push(Table { name: t.name.clone(), columns, rows: Vec::new() });
                    combined.last_mut().expect("just pushed")
                }
            };
            for row in t.rows {
                let mut r = vec![Cell::Num(v)];
                r.extend(row);
                target.rows.push(r);
            }
        }
    }
    let mut meta = metadata(&doc, scenario, seed, opts.format, &notes);
    meta["sweep"] = json!({
        "param": spec.param,
        "from": spec.from,
        "to": spec.to,
        "points": spec.points,
        "point_seeds": seeds,
    });
    let files = output::emit(&opts.out, &combined, opts.format, meta)?;
    Ok(Report { files, notes })
}
