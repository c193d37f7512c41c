//! Distinguishability before and after the time loop.
//!
//! Two inputs, `|0>` and `alpha|0> + beta|1>`, are sent through the `phi+`
//! branch of the loop and the trace distance between the results is compared
//! with the distance between the inputs. Distances use `Tr|A - B|` (no 1/2).

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::gates::BellTag;
use crate::protocols::time_loop_output;
use crate::qlinalg::{trace_distance, DensityOperator, PureState};
use crate::{Error, Result};

pub const CSV_HEADER: [&str; 5] = ["beta2", "d_input_paper", "d_after_paper", "d_after_numeric", "d_input_numeric"];

/// Significant digits kept in emitted tables.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub beta2: f64,
    /// `2 beta^2`
    pub d_input_paper: f64,
    /// `4 (beta^2 - beta^4)`
    pub d_after_paper: f64,
    /// Distance between the solved loop outputs.
    pub d_after_numeric: f64,
    /// Distance between the two pure inputs, `2|beta|`.
    pub d_input_numeric: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

pub fn d_input_paper(beta2: f64) -> f64 {
    2.0 * beta2
}

pub fn d_after_paper(beta2: f64) -> f64 {
    4.0 * (beta2 - beta2 * beta2)
}

/// Magnitudes below this are emitted as zero.
pub const EMIT_FLOOR: f64 = 5e-13;

/// Value as written to tables: [`SIGNIFICANT_DIGITS`] digits, round-off flushed to zero.
pub fn tidy(x: f64) -> f64 {
    if x.abs() < EMIT_FLOOR {
        0.0
    } else {
        round_significant(x, SIGNIFICANT_DIGITS)
    }
}

/// Applies [`tidy`] to every number in a JSON document.
pub fn tidy_json(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if let Some(x) = n.as_f64().filter(|_| n.is_f64()) {
                *value = serde_json::Number::from_f64(tidy(x)).map_or(Value::Null, Value::Number);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(tidy_json),
        Value::Object(map) => map.values_mut().for_each(tidy_json),
        _ => {}
    }
}

/// Rounds to `digits` significant decimal digits.
pub fn round_significant(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x).parse().expect("formatted float parses")
}

fn grid_value(k: usize, grid_points: usize) -> f64 {
    k as f64 / (grid_points - 1) as f64
}

fn reference_output() -> Result<(DensityOperator, DensityOperator)> {
    let reference = PureState::basis(1, 0)?.density();
    let out = time_loop_output(&reference, BellTag::PhiPlus)?;
    Ok((reference, out))
}

/// One grid point. Solves the loop for both inputs.
pub fn sweep_row(beta2: f64) -> Result<SweepRow> {
    row_against(&reference_output()?, beta2)
}

fn row_against((reference, out_ref): &(DensityOperator, DensityOperator), beta2: f64) -> Result<SweepRow> {
    if !(0.0..=1.0).contains(&beta2) {
        return Err(Error::InvalidArgument(format!("beta^2 = {beta2} outside [0, 1]")));
    }
    let probe = PureState::real_qubit(beta2)?.density();
    let out_probe = time_loop_output(&probe, BellTag::PhiPlus)?;
    Ok(SweepRow {
        beta2,
        d_input_paper: d_input_paper(beta2),
        d_after_paper: d_after_paper(beta2),
        d_after_numeric: trace_distance(out_ref, &out_probe)?,
        d_input_numeric: trace_distance(reference, &probe)?,
    })
}

fn check_grid(grid_points: usize) -> Result<()> {
    if grid_points < 3 {
        return Err(Error::InvalidArgument(format!("grid needs at least 3 points, got {grid_points}")));
    }
    Ok(())
}

/// `grid_points` rows with `beta^2` evenly spaced over `[0, 1]`, endpoints included.
pub fn trace_distance_curve(grid_points: usize) -> Result<SweepTable> {
    check_grid(grid_points)?;
    let reference = reference_output()?;
    let rows = (0..grid_points).map(|k| row_against(&reference, grid_value(k, grid_points))).collect::<Result<_>>()?;
    Ok(SweepTable { rows })
}

/// Same table computed on `jobs` worker threads; row order follows the grid.
pub fn trace_distance_curve_parallel(grid_points: usize, jobs: usize) -> Result<SweepTable> {
    check_grid(grid_points)?;
    if jobs == 0 {
        return Err(Error::InvalidArgument("jobs must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start {jobs} workers: {e}")))?;
    let reference = reference_output()?;
    let rows = pool.install(|| {
        (0..grid_points)
            .into_par_iter()
            .map(|k| row_against(&reference, grid_value(k, grid_points)))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(SweepTable { rows })
}

impl SweepTable {
    /// Every column passed through [`tidy`].
    pub fn rounded(&self) -> SweepTable {
        let r = tidy;
        let rows = self
            .rows
            .iter()
            .map(|row| SweepRow {
                beta2: r(row.beta2),
                d_input_paper: r(row.d_input_paper),
                d_after_paper: r(row.d_after_paper),
                d_after_numeric: r(row.d_after_numeric),
                d_input_numeric: r(row.d_input_numeric),
            })
            .collect();
        SweepTable { rows }
    }

    /// Writes the rounded table; the header row is [`CSV_HEADER`].
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::InvalidArgument(format!("writing CSV: {e}"));
        for row in self.rounded().rows {
            w.serialize(row).map_err(io)?;
        }
        w.flush().map_err(|e| Error::InvalidArgument(format!("writing CSV: {e}")))?;
        Ok(())
    }

    /// Rounded table as a JSON array of row objects.
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self.rounded()).expect("rows serialize")
    }

    /// Largest `|d_after_numeric - d_after_paper|` over the table.
    pub fn max_after_deviation(&self) -> f64 {
        self.rows.iter().map(|r| (r.d_after_numeric - r.d_after_paper).abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GreatCircleAverage {
    pub grid_points: usize,
    pub mean_d_input: f64,
    pub mean_d_after: f64,
}

impl GreatCircleAverage {
    pub fn distinguishability_reduced(&self) -> bool {
        self.mean_d_after < self.mean_d_input
    }
}

/// Means of the analytic curves over `alpha = cos(theta)`, `beta = sin(theta)`,
/// `theta` uniform on `[0, 2 pi)`.
pub fn great_circle_average(grid_points: usize) -> Result<GreatCircleAverage> {
    if grid_points < 360 {
        return Err(Error::InvalidArgument(format!("great-circle grid needs at least 360 points, got {grid_points}")));
    }
    let (mut d_in, mut d_after) = (0.0, 0.0);
    for k in 0..grid_points {
        let theta = std::f64::consts::TAU * k as f64 / grid_points as f64;
        let beta2 = theta.sin().powi(2);
        d_in += d_input_paper(beta2);
        d_after += d_after_paper(beta2);
    }
    let n = grid_points as f64;
    Ok(GreatCircleAverage { grid_points, mean_d_input: d_in / n, mean_d_after: d_after / n })
}
