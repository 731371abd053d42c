//! File emission: run traces, experiment tables, plot data.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use amrpbs::benchmarks::{
    render_experiment2_csv, render_experiment2_summary, render_markdown_table,
    render_results_csv, ComparisonRow, RunResult,
};
use amrpbs::trace::fmt_float;
use amrpbs::RunTrace;

fn write(outdir: &Path, name: &str, contents: &str) -> io::Result<PathBuf> {
    let path = outdir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

/// Write the full set of per-run files: the iteration trace, check and
/// event logs, plot data for convergence and model error, and the JSON
/// summary. Deterministic byte-for-byte given the same trace.
pub fn emit_run_outputs(trace: &RunTrace, outdir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(outdir)?;
    let mut files = vec![
        write(outdir, "trace.csv", &trace.render_iterations_csv())?,
        write(outdir, "checks.csv", &trace.render_checks_csv())?,
        write(outdir, "events.csv", &trace.render_events_csv())?,
        write(outdir, "batches.csv", &trace.render_batches_csv())?,
        write(outdir, "convergence.dat", &trace.render_convergence_dat())?,
        write(outdir, "model_error.dat", &trace.render_model_error_dat())?,
        write(outdir, "summary.json", &trace.render_summary())?,
    ];
    if let Some(checkpoint) = &trace.final_surrogate {
        files.push(write(outdir, "surrogate.txt", checkpoint)?);
    }
    Ok(files)
}

pub fn emit_experiment1_outputs(
    rows: &[ComparisonRow],
    outdir: &Path,
) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(outdir)?;
    Ok(vec![
        write(outdir, "results.csv", &render_results_csv(rows))?,
        write(outdir, "summary.md", &render_markdown_table(rows))?,
    ])
}

pub fn emit_experiment2_outputs(
    table: &[(usize, f64, Vec<RunResult>)],
    outdir: &Path,
) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(outdir)?;
    Ok(vec![
        write(outdir, "results.csv", &render_experiment2_csv(table))?,
        write(outdir, "summary.md", &render_experiment2_summary(table))?,
    ])
}

pub fn emit_bego_outputs(result: &RunResult, outdir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(outdir)?;
    let coords: Vec<String> = result.final_point.iter().map(|v| fmt_float(*v)).collect();
    let summary = format!(
        "{{\n  \"method\": \"{}\",\n  \"seed\": {},\n  \"point\": [{}],\n  \"value\": {},\n  \"rae\": {},\n  \"evals_used\": {}\n}}\n",
        result.method,
        result.seed,
        coords.join(", "),
        fmt_float(result.final_value),
        fmt_float(result.rae),
        result.evaluations_used
    );
    Ok(vec![write(outdir, "bego_summary.json", &summary)?])
}
