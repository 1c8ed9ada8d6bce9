use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use simlink::config::ModelOptions;
use simlink::sdp::SolverOptions;
use simlink::LinkScenario;

use crate::table::Table;

/// Written next to every result set.
pub const AO_DEFINITION: &str =
    "cyclic per-atom coordinate search: every layer in sweep order, every atom in index order, phase chosen from a uniform grid maximising the achievable rate; the incumbent is kept unless a grid point is strictly better";

#[derive(Debug, Serialize)]
pub struct DesignDefaults {
    pub d2_path: String,
    pub los_mode: String,
    pub layer_order: String,
    pub candidate_selection: String,
    pub randomization_draws: usize,
    pub initial_td_s: f64,
    pub baseline_grid: usize,
    pub ao_definition: String,
    pub phase_init: String,
    pub layer_acceptance: String,
    pub sdp_feasibility_tol: f64,
    pub sdp_gap_tol: f64,
    pub sdp_max_iter: usize,
    pub wavelength_policy: String,
    pub reference_pathloss_policy: String,
}

impl DesignDefaults {
    pub fn from_options(o: &ModelOptions) -> Self {
        let sdp = SolverOptions::default();
        Self {
            d2_path: label(&o.d2_path),
            los_mode: label(&o.los_mode),
            layer_order: label(&o.layer_order),
            candidate_selection: label(&o.candidate_selection),
            randomization_draws: o.randomization_draws,
            initial_td_s: o.initial_td_s,
            baseline_grid: o.baseline_grid,
            ao_definition: AO_DEFINITION.into(),
            phase_init: "independent uniform on (0, 2pi] per atom from the cell seed".into(),
            layer_acceptance: "a layer update is kept only if the rate does not decrease".into(),
            sdp_feasibility_tol: sdp.feasibility_tol,
            sdp_gap_tol: sdp.gap_tol,
            sdp_max_iter: sdp.max_iter,
            wavelength_policy: "independent field; a warning is issued when it differs from c/f".into(),
            reference_pathloss_policy: "ref_pathloss_db when set, otherwise 20 log10(4 pi d0 / lambda)".into(),
        }
    }
}

/// Kebab-case name of a unit enum variant, as written in config files.
fn label<T: Serialize>(v: &T) -> String {
    toml::Value::try_from(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_hash: String,
    pub base_seed: u64,
    pub seeds: Vec<u64>,
    pub workers: usize,
    pub wall_time_s: f64,
    pub tables: Vec<String>,
    pub warnings: Vec<String>,
    pub design_defaults: DesignDefaults,
    pub scenario: LinkScenario,
}

impl Manifest {
    pub fn new(command: &str, scenario: &LinkScenario, base_seed: u64, seeds: Vec<u64>, workers: usize, wall_time_s: f64) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config_hash: scenario.config_hash(),
            base_seed,
            seeds,
            workers,
            wall_time_s,
            tables: Vec::new(),
            warnings: scenario.warnings(),
            design_defaults: DesignDefaults::from_options(&scenario.options),
            scenario: scenario.clone(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{path}: {source}")]
pub struct OutputError {
    pub path: PathBuf,
    #[source]
    pub source: std::io::Error,
}

fn write(path: &Path, text: &str) -> Result<(), OutputError> {
    fs::write(path, text).map_err(|source| OutputError {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `<name>.tsv` for every table, `timings.tsv` when given, and
/// `manifest.toml`. Returns the written paths.
pub fn emit_outputs(
    dir: &Path,
    tables: &[(&str, &Table)],
    timings: Option<&Table>,
    mut manifest: Manifest,
) -> Result<Vec<PathBuf>, OutputError> {
    fs::create_dir_all(dir).map_err(|source| OutputError {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    for (name, table) in tables {
        let path = dir.join(format!("{name}.tsv"));
        write(&path, &table.render())?;
        manifest.tables.push(format!("{name}.tsv"));
        written.push(path);
    }
    if let Some(t) = timings {
        let path = dir.join("timings.tsv");
        write(&path, &t.render())?;
        written.push(path);
    }
    let path = dir.join("manifest.toml");
    let text = toml::to_string(&manifest).unwrap_or_else(|e| format!("# manifest serialization failed: {e}\n"));
    write(&path, &text)?;
    written.push(path);
    Ok(written)
}
