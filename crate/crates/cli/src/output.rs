//! Fixed-schema CSV tables.

use eigenscale::scaling::{CellSummary, MatrixRecord};
use serde::Serialize;

use crate::error::CliError;

pub const RECORD_HEADER: [&str; 11] = [
    "dim",
    "density",
    "dist",
    "seed",
    "slope",
    "intercept",
    "rms",
    "pearson",
    "spearman",
    "lambda_min",
    "degenerate",
];

pub const CELL_HEADER: [&str; 14] = [
    "dim",
    "density",
    "effective_density",
    "dist",
    "samples",
    "failures",
    "degenerate",
    "used",
    "rms_median",
    "rms_mean",
    "rms_stddev",
    "slope_mean",
    "intercept_mean",
    "valid",
];

pub const STATE_HEADER: [&str; 4] = ["index", "g", "s", "g_var"];

pub const SUMMARY_HEADER: [&str; 10] = [
    "model",
    "dim",
    "sites",
    "c",
    "e_scaling",
    "e_exact",
    "relative_error",
    "e_scaling_total",
    "e_exact_total",
    "degenerate_ansatz",
];

/// One per-matrix row; failed matrices keep their identity columns and
/// leave every statistic empty.
#[derive(Serialize)]
struct RecordRow<'a> {
    dim: usize,
    density: f64,
    dist: &'a str,
    seed: u64,
    slope: Option<f64>,
    intercept: Option<f64>,
    rms: Option<f64>,
    pearson: Option<f64>,
    spearman: Option<f64>,
    lambda_min: Option<f64>,
    degenerate: Option<bool>,
}

#[derive(Serialize)]
struct CellRow<'a> {
    dim: usize,
    density: f64,
    effective_density: f64,
    dist: &'a str,
    samples: usize,
    failures: usize,
    degenerate: usize,
    used: usize,
    rms_median: Option<f64>,
    rms_mean: Option<f64>,
    rms_stddev: Option<f64>,
    slope_mean: Option<f64>,
    intercept_mean: Option<f64>,
    valid: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct StateRow {
    pub index: usize,
    pub g: f64,
    pub s: f64,
    pub g_var: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    pub model: String,
    pub dim: usize,
    pub sites: usize,
    pub c: Option<f64>,
    pub e_scaling: f64,
    pub e_exact: f64,
    pub relative_error: Option<f64>,
    pub e_scaling_total: f64,
    pub e_exact_total: f64,
    pub degenerate_ansatz: bool,
}

fn table<T: Serialize>(
    header: &[&str],
    rows: impl IntoIterator<Item = T>,
) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.into_inner().map_err(|e| CliError::Output(e.to_string()))
}

pub fn records_csv(records: &[MatrixRecord]) -> Result<Vec<u8>, CliError> {
    table(
        &RECORD_HEADER,
        records.iter().map(|r| {
            let rep = r.report();
            RecordRow {
                dim: r.dim,
                density: r.effective_density,
                dist: &r.distribution,
                seed: r.seed,
                slope: rep.and_then(|x| x.slope),
                intercept: rep.and_then(|x| x.intercept),
                rms: rep.map(|x| x.rms),
                pearson: rep.and_then(|x| x.pearson),
                spearman: rep.and_then(|x| x.spearman),
                lambda_min: rep.map(|x| x.lambda_min),
                degenerate: rep.map(|x| x.is_degenerate()),
            }
        }),
    )
}

pub fn cells_csv(cells: &[CellSummary]) -> Result<Vec<u8>, CliError> {
    table(
        &CELL_HEADER,
        cells.iter().map(|c| CellRow {
            dim: c.dim,
            density: c.density,
            effective_density: c.effective_density,
            dist: &c.distribution,
            samples: c.sample_count,
            failures: c.failures,
            degenerate: c.degenerate,
            used: c.used,
            rms_median: c.rms_median,
            rms_mean: c.rms_mean,
            rms_stddev: c.rms_stddev,
            slope_mean: c.slope_mean,
            intercept_mean: c.intercept_mean,
            valid: c.valid,
        }),
    )
}

pub fn states_csv(rows: &[StateRow]) -> Result<Vec<u8>, CliError> {
    table(&STATE_HEADER, rows)
}

pub fn summary_csv(row: &SummaryRow) -> Result<Vec<u8>, CliError> {
    table(&SUMMARY_HEADER, [row])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_options_become_empty_fields() {
        let row = SummaryRow {
            model: "ising".into(),
            dim: 16,
            sites: 4,
            c: None,
            e_scaling: -1.5,
            e_exact: -2.0,
            relative_error: None,
            e_scaling_total: -6.0,
            e_exact_total: -8.0,
            degenerate_ansatz: true,
        };
        let text = String::from_utf8(summary_csv(&row).unwrap()).unwrap();
        assert_eq!(
            text,
            "model,dim,sites,c,e_scaling,e_exact,relative_error,e_scaling_total,e_exact_total,degenerate_ansatz\n\
             ising,16,4,,-1.5,-2.0,,-6.0,-8.0,true\n"
        );
    }
}
