//! Monte Carlo comparison of procedures over an alpha grid.

use std::fs;

use fdrfnr::{aggregate, summarize, AggregateReport, ProcedureSpec, Setting, TrialSummary};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::curves::SCHEMA_LINE;
use crate::error::{config, runtime, Result};
use crate::seed::child_rng;

pub const SIMULATION_COLUMNS: [&str; 11] = [
    "model",
    "alpha",
    "procedure",
    "n",
    "trials",
    "fdr",
    "fdr_se",
    "fnr",
    "fnr_se",
    "mfdr",
    "mfnr",
];

/// Per-trial summaries for one `(alpha, procedure)` cell, in trial order.
#[derive(Debug, Clone)]
pub struct CellSummaries {
    pub alpha: f64,
    pub procedure: String,
    pub summaries: Vec<TrialSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimRow {
    pub model: String,
    pub alpha: f64,
    pub procedure: String,
    pub n: usize,
    pub report: AggregateReport,
}

/// Runs every trial of every cell on a pool of `cfg.threads` workers.
///
/// Trial `t` of cell `(a, p)` draws its data and any randomization from
/// `child_rng(seed, a, p, t)`, so results do not depend on scheduling.
pub fn simulate_cells(cfg: &ExperimentConfig) -> Result<Vec<CellSummaries>> {
    let setting = Setting::from_model(&cfg.model.model);
    let mut cells = Vec::new();
    for (ai, alpha) in cfg.alphas.iter().enumerate() {
        for (pi, choice) in cfg.procedures.iter().enumerate() {
            let spec = ProcedureSpec {
                kind: choice.kind,
                alpha: *alpha,
            };
            let prepared = spec
                .prepare(&setting)
                .map_err(|e| config(format!("procedure `{}` at alpha={alpha}: {e}", choice.label)))?;
            cells.push((ai, pi, prepared));
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.unwrap_or(0))
        .build()
        .map_err(runtime)?;
    let trials = cfg.trials;
    let tasks: Vec<(usize, usize)> = (0..cells.len()).flat_map(|c| (0..trials).map(move |t| (c, t))).collect();
    let summaries: Vec<TrialSummary> = pool.install(|| {
        tasks
            .par_iter()
            .map(|(c, t)| {
                let (ai, pi, prepared) = &cells[*c];
                let mut rng = child_rng(cfg.master_seed, *ai, *pi, *t);
                let sample = cfg.model.model.sample(cfg.n, &mut rng);
                let d = prepared.apply(&sample.x, &mut rng).map_err(runtime)?;
                summarize(&d.reject, &sample.theta).map_err(runtime)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(cells
        .iter()
        .zip(summaries.chunks(trials))
        .map(|((ai, pi, _), chunk)| CellSummaries {
            alpha: cfg.alphas[*ai],
            procedure: cfg.procedures[*pi].label.clone(),
            summaries: chunk.to_vec(),
        })
        .collect())
}

pub fn run_simulation(cfg: &ExperimentConfig) -> Result<Vec<SimRow>> {
    let model = cfg.model.label();
    simulate_cells(cfg)?
        .into_iter()
        .map(|cell| {
            Ok(SimRow {
                model: model.clone(),
                alpha: cell.alpha,
                procedure: cell.procedure,
                n: cfg.n,
                report: aggregate(&cell.summaries).map_err(runtime)?,
            })
        })
        .collect()
}

pub fn simulation_csv(rows: &[SimRow]) -> Result<Vec<u8>> {
    let mut out = format!("{SCHEMA_LINE}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(SIMULATION_COLUMNS)?;
        for r in rows {
            let p = &r.report;
            w.write_record([
                r.model.clone(),
                r.alpha.to_string(),
                r.procedure.clone(),
                r.n.to_string(),
                p.trials.to_string(),
                p.fdr.to_string(),
                p.fdr_se.to_string(),
                p.fnr.to_string(),
                p.fnr_se.to_string(),
                p.mfdr.to_string(),
                p.mfnr.to_string(),
            ])?;
        }
        w.flush()?;
    }
    Ok(out)
}

/// Runs the experiment and writes the CSV to `cfg.out`.
pub fn write_simulation(cfg: &ExperimentConfig) -> Result<Vec<SimRow>> {
    let rows = run_simulation(cfg)?;
    fs::write(&cfg.out, simulation_csv(&rows)?)?;
    Ok(rows)
}
