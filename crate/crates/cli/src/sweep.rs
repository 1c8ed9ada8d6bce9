use std::time::Instant;

use rayon::prelude::*;
use simlink::optimizer::{run_algorithm, Algorithm};
use simlink::seed::derive_seed;
use simlink::{Error, LinkScenario, Result};

use crate::table::{fmt_f64, Table};

/// One axis of a rate experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// `streams`, `atoms`, `layers`, or any dotted scenario key.
    pub parameter: String,
    pub values: Vec<String>,
    pub replications: usize,
    pub iterations: usize,
    pub algorithms: Vec<Algorithm>,
    pub base: LinkScenario,
    pub base_seed: u64,
}

/// Scenario keys touched by a sweep parameter.
pub fn parameter_keys(parameter: &str) -> Vec<String> {
    match parameter {
        "streams" | "S" => vec!["num_streams".into()],
        "atoms" | "M" => vec!["atoms_tx".into(), "atoms_rx".into()],
        "layers" | "L" => vec!["layers_tx".into(), "layers_rx".into()],
        other => vec![other.to_string()],
    }
}

impl SweepSpec {
    pub fn scenario_for(&self, value: &str) -> Result<LinkScenario> {
        let overrides: Vec<String> = parameter_keys(&self.parameter)
            .into_iter()
            .map(|k| format!("{k}={value}"))
            .collect();
        self.base.with_overrides(&overrides)?.validated()
    }

    /// Checks replications and every swept scenario up front.
    pub fn validate(&self) -> Result<Vec<LinkScenario>> {
        if self.replications == 0 {
            return Err(Error::InvalidArgument("replications must be at least 1".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::InvalidArgument("no algorithm selected".into()));
        }
        self.values.iter().map(|v| self.scenario_for(v)).collect()
    }

    /// Seed of cell `(value index, replication)`; both algorithms share it.
    pub fn cell_seed(&self, value_index: usize, replication: usize) -> u64 {
        derive_seed(self.base_seed, &[value_index as u64, replication as u64])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: String,
    pub replication: usize,
    pub algorithm: Algorithm,
    pub seed: u64,
    /// `ok` or the error message of a failed cell.
    pub status: String,
    pub initial_v_data: f64,
    pub final_v_data: f64,
    pub mean_v_data: f64,
    pub final_t_d: f64,
    pub final_regret: f64,
    pub iterations: usize,
    pub runtime_s: f64,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub parameter: String,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Results without timing columns; byte-stable for fixed inputs.
    pub fn table(&self) -> Table {
        let mut t = Table::new(&[
            "parameter",
            "value",
            "replication",
            "algorithm",
            "seed",
            "status",
            "initial_v_data",
            "final_v_data",
            "mean_v_data",
            "final_t_d",
            "final_regret",
            "iterations",
        ]);
        for r in &self.rows {
            t.push(vec![
                self.parameter.clone(),
                r.value.clone(),
                r.replication.to_string(),
                r.algorithm.label().to_string(),
                r.seed.to_string(),
                r.status.clone(),
                fmt_f64(r.initial_v_data),
                fmt_f64(r.final_v_data),
                fmt_f64(r.mean_v_data),
                fmt_f64(r.final_t_d),
                fmt_f64(r.final_regret),
                r.iterations.to_string(),
            ]);
        }
        t
    }

    pub fn timings(&self) -> Table {
        let mut t = Table::new(&["value", "replication", "algorithm", "runtime_s"]);
        for r in &self.rows {
            t.push(vec![
                r.value.clone(),
                r.replication.to_string(),
                r.algorithm.label().to_string(),
                format!("{:.6}", r.runtime_s),
            ]);
        }
        t
    }

    /// Mean final rate per `(value, algorithm)` over successful replications.
    pub fn mean_final_rate(&self, value: &str, algorithm: Algorithm) -> Option<f64> {
        let v: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.value == value && r.algorithm == algorithm && r.status == "ok")
            .map(|r| r.final_v_data)
            .collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    }
}

fn run_cell(spec: &SweepSpec, scenario: &Result<LinkScenario>, vi: usize, rep: usize) -> Vec<SweepRow> {
    let seed = spec.cell_seed(vi, rep);
    spec.algorithms
        .iter()
        .map(|&algorithm| {
            let started = Instant::now();
            let outcome = scenario
                .as_ref()
                .map_err(|e| e.to_string())
                .and_then(|s| run_algorithm(algorithm, s, spec.iterations, seed).map_err(|e| e.to_string()));
            let runtime_s = started.elapsed().as_secs_f64();
            let base = SweepRow {
                value: spec.values[vi].clone(),
                replication: rep,
                algorithm,
                seed,
                status: "ok".into(),
                initial_v_data: f64::NAN,
                final_v_data: f64::NAN,
                mean_v_data: f64::NAN,
                final_t_d: f64::NAN,
                final_regret: f64::NAN,
                iterations: 0,
                runtime_s,
            };
            match outcome {
                Ok(o) => SweepRow {
                    initial_v_data: o.trace.initial_v_data,
                    final_v_data: o.trace.final_v_data(),
                    mean_v_data: o.trace.mean_v_data(),
                    final_t_d: o.trace.final_t_d(),
                    final_regret: o.trace.final_regret(),
                    iterations: o.trace.records.len(),
                    ..base
                },
                Err(e) => SweepRow {
                    status: format!("error: {}", e.replace(['\t', '\n'], " ")),
                    ..base
                },
            }
        })
        .collect()
}

/// Runs every `(value, replication, algorithm)` cell on a pool of `workers`
/// threads. Rows come back ordered by value, replication and algorithm
/// regardless of completion order. Failed cells become status rows.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<SweepResult> {
    if spec.replications == 0 {
        return Err(Error::InvalidArgument("replications must be at least 1".into()));
    }
    let scenarios: Vec<Result<LinkScenario>> = spec.values.iter().map(|v| spec.scenario_for(v)).collect();
    let cells: Vec<(usize, usize)> = (0..spec.values.len())
        .flat_map(|vi| (0..spec.replications).map(move |rep| (vi, rep)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(vi, rep)| run_cell(spec, &scenarios[vi], vi, rep))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    });
    Ok(SweepResult {
        parameter: spec.parameter.clone(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use simlink::config::default_scenario;

    fn tiny() -> LinkScenario {
        LinkScenario {
            atoms_tx: 4,
            atoms_rx: 4,
            layers_tx: 1,
            layers_rx: 1,
            num_streams: 1,
            ..default_scenario()
        }
    }

    fn spec(values: &[&str]) -> SweepSpec {
        SweepSpec {
            parameter: "streams".into(),
            values: values.iter().map(|s| s.to_string()).collect(),
            replications: 2,
            iterations: 1,
            algorithms: vec![Algorithm::Bcd, Algorithm::Ao],
            base: tiny(),
            base_seed: 9,
        }
    }

    #[test]
    fn cardinality_and_order() {
        let r = run_sweep(&spec(&["1", "2"]), 2).unwrap();
        assert_eq!(r.rows.len(), 2 * 2 * 2);
        let keys: Vec<(String, usize, Algorithm)> =
            r.rows.iter().map(|x| (x.value.clone(), x.replication, x.algorithm)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn failed_cells_become_rows() {
        // S = 5 exceeds M = 4
        let r = run_sweep(&spec(&["1", "5"]), 1).unwrap();
        assert_eq!(r.rows.len(), 8);
        assert!(r.rows[4..].iter().all(|x| x.status.starts_with("error")));
        assert!(r.rows[..4].iter().all(|x| x.status == "ok"));
    }

    #[test]
    fn empty_sweep_is_header_only() {
        let r = run_sweep(&spec(&[]), 1).unwrap();
        assert_eq!(r.table().render().lines().count(), 1);
    }

    #[test]
    fn aliases() {
        assert_eq!(parameter_keys("atoms"), vec!["atoms_tx", "atoms_rx"]);
        assert_eq!(parameter_keys("options.los_mode"), vec!["options.los_mode"]);
        let s = spec(&["9"]);
        let mut s = SweepSpec { parameter: "atoms".into(), ..s };
        s.base.num_streams = 1;
        assert_eq!(s.scenario_for("9").unwrap().atoms_rx, 9);
        assert!(s.scenario_for("10").is_err());
    }
}
