//! Replicated Monte Carlo evaluation of estimator grids.
//!
//! Replication `r` of spec `s` is simulated from
//! `mix_seed(master_seed, s, r)`, and every grid cell of that spec sees the
//! same paths. Replications run on the rayon pool in scope, results are
//! collected in replication order and reduced sequentially, so output does
//! not depend on the number of threads.

use lrvar_core::sim::{mix_seed, simulate_arma, ArmaSpec, SimConfig};
use lrvar_core::study::{
    aggregate_metrics, evaluate_cell, CellSpec, Estimate, EstimatorId, Smoothing,
};
use lrvar_core::truth::{finite_n_variance, sigma_f_sq, DEFAULT_TOL};
use rayon::prelude::*;

use crate::config::{Experiment, Target};

#[derive(Debug, Clone, PartialEq)]
pub struct MetricRecord {
    pub spec_id: usize,
    pub ar: f64,
    pub ma: f64,
    pub estimator: EstimatorId,
    pub parameter: Smoothing,
    /// Mean realized block length of adaptive cells.
    pub mean_adaptive_length: Option<f64>,
    pub squared: bool,
    pub truth: f64,
    pub bias: f64,
    pub variance: f64,
    pub mse: f64,
    pub std_error: f64,
    pub replications: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("spec {spec_id}, {estimator} at {parameter}, replication {replication}: {source}")]
pub struct CellError {
    pub spec_id: usize,
    pub estimator: EstimatorId,
    pub parameter: Smoothing,
    pub replication: usize,
    pub source: lrvar_core::Error,
}

pub type CellOutcome = Result<MetricRecord, CellError>;

/// Ground truth an experiment's estimates are compared with.
pub fn truth_for(exp: &Experiment, spec: &ArmaSpec) -> f64 {
    match exp.target {
        Target::SigmaSq => finite_n_variance(spec, exp.effective_n()).expect("n >= 1"),
        Target::SigmaFSq => sigma_f_sq(spec, DEFAULT_TOL).expect("default tolerance is valid"),
    }
}

/// Per-replication estimates for every grid cell of one spec,
/// indexed `[replication][cell]`.
pub fn replicate(exp: &Experiment, spec_id: usize) -> Vec<Vec<lrvar_core::Result<Estimate>>> {
    let spec = exp.specs[spec_id];
    (0..exp.replications)
        .into_par_iter()
        .map(|r| {
            let seed = mix_seed(exp.master_seed, spec_id as u64, r as u64);
            let cfg = SimConfig::new(exp.n, exp.burn_in, seed).expect("validated n");
            let series = simulate_arma(&spec, &cfg);
            exp.grid
                .iter()
                .map(|cell| evaluate_cell(&series, cell))
                .collect()
        })
        .collect()
}

fn summarize(
    exp: &Experiment,
    spec_id: usize,
    cell_index: usize,
    cell: &CellSpec,
    rows: &[Vec<lrvar_core::Result<Estimate>>],
    truth: f64,
) -> CellOutcome {
    let spec = exp.specs[spec_id];
    let mut values = Vec::with_capacity(rows.len());
    let mut lengths = 0.0;
    for (r, row) in rows.iter().enumerate() {
        match &row[cell_index] {
            Ok(e) => {
                values.push(e.value);
                lengths += e.block_length.unwrap_or(0.0);
            }
            Err(source) => {
                return Err(CellError {
                    spec_id,
                    estimator: cell.estimator,
                    parameter: cell.smoothing,
                    replication: r,
                    source: source.clone(),
                })
            }
        }
    }
    let m = aggregate_metrics(&values, truth).map_err(|source| CellError {
        spec_id,
        estimator: cell.estimator,
        parameter: cell.smoothing,
        replication: 0,
        source,
    })?;
    Ok(MetricRecord {
        spec_id,
        ar: spec.ar(),
        ma: spec.ma(),
        estimator: cell.estimator,
        parameter: cell.smoothing,
        mean_adaptive_length: cell
            .smoothing
            .is_adaptive()
            .then(|| lengths / values.len() as f64),
        squared: cell.square,
        truth,
        bias: m.bias,
        variance: m.variance,
        mse: m.mse,
        std_error: m.std_error,
        replications: values.len(),
    })
}

fn canonical_key(o: &CellOutcome) -> (usize, EstimatorId, f64) {
    match o {
        Ok(m) => (m.spec_id, m.estimator, m.parameter.order_key()),
        Err(e) => (e.spec_id, e.estimator, e.parameter.order_key()),
    }
}

/// Runs every (spec, estimator, parameter) cell. Failing cells are reported
/// in place and do not affect the others. Output is sorted by spec index,
/// estimator, then parameter (adaptive last).
pub fn run_experiment(exp: &Experiment) -> Vec<CellOutcome> {
    let mut outcomes: Vec<CellOutcome> = (0..exp.specs.len())
        .into_par_iter()
        .map(|spec_id| {
            let rows = replicate(exp, spec_id);
            let truth = truth_for(exp, &exp.specs[spec_id]);
            exp.grid
                .iter()
                .enumerate()
                .map(|(i, cell)| summarize(exp, spec_id, i, cell, &rows, truth))
                .collect::<Vec<_>>()
        })
        .flatten()
        .collect();
    outcomes.sort_by(|a, b| {
        let (ka, kb) = (canonical_key(a), canonical_key(b));
        ka.0.cmp(&kb.0)
            .then(ka.1.cmp(&kb.1))
            .then(ka.2.total_cmp(&kb.2))
    });
    outcomes
}
