//! Balanced fixed-effects two-way ANOVA with interaction.

use serde::{Deserialize, Serialize};

use super::fdist::f_tail_probability;
use crate::error::{Error, Result};

/// Balanced `rows x columns x replicates` grid of observations.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorialData {
    rows: usize,
    columns: usize,
    replicates: usize,
    // row-major over (row, column, replicate)
    values: Vec<f64>,
}

impl FactorialData {
    /// Builds the grid from `cells[row][column] = replicates`.
    pub fn from_cells(cells: &[Vec<Vec<f64>>]) -> Result<Self> {
        let rows = cells.len();
        let columns = cells.first().map_or(0, Vec::len);
        let replicates = cells.first().and_then(|r| r.first()).map_or(0, Vec::len);
        if rows < 2 || columns < 2 {
            return Err(Error::validation(format!(
                "two-way ANOVA needs at least 2 rows and 2 columns, got {rows}x{columns}"
            )));
        }
        if replicates < 2 {
            return Err(Error::validation(format!(
                "interaction needs at least 2 replicates per cell, got {replicates}"
            )));
        }
        let mut values = Vec::with_capacity(rows * columns * replicates);
        for (r, row) in cells.iter().enumerate() {
            if row.len() != columns {
                return Err(Error::validation(format!(
                    "unbalanced design: row {r} has {} columns, expected {columns}",
                    row.len()
                )));
            }
            for (c, cell) in row.iter().enumerate() {
                if cell.len() != replicates {
                    return Err(Error::validation(format!(
                        "unbalanced design: cell ({r}, {c}) has {} replicates, expected {replicates}",
                        cell.len()
                    )));
                }
                if let Some(v) = cell.iter().find(|v| !v.is_finite()) {
                    return Err(Error::validation(format!("cell ({r}, {c}) contains {v}")));
                }
                values.extend_from_slice(cell);
            }
        }
        Ok(Self {
            rows,
            columns,
            replicates,
            values,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn replicates(&self) -> usize {
        self.replicates
    }

    pub fn get(&self, row: usize, column: usize, replicate: usize) -> f64 {
        self.values[(row * self.columns + column) * self.replicates + replicate]
    }

    fn cell(&self, row: usize, column: usize) -> &[f64] {
        let start = (row * self.columns + column) * self.replicates;
        &self.values[start..start + self.replicates]
    }
}

/// One line of an ANOVA table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceRow {
    pub ss: f64,
    pub df: usize,
    pub ms: Option<f64>,
    pub f: Option<f64>,
    pub p: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaTable {
    pub columns: SourceRow,
    pub rows: SourceRow,
    pub interaction: SourceRow,
    pub error: SourceRow,
    pub total: SourceRow,
}

pub const SOURCE_NAMES: [&str; 5] = ["Columns", "Rows", "Interaction", "Error", "Total"];

impl AnovaTable {
    /// Completes a table from the four component sums of squares and the design shape.
    pub fn from_sums_of_squares(
        ss_columns: f64,
        ss_rows: f64,
        ss_interaction: f64,
        ss_error: f64,
        rows: usize,
        columns: usize,
        replicates: usize,
    ) -> Result<Self> {
        if rows < 2 || columns < 2 || replicates < 2 {
            return Err(Error::validation(format!(
                "design {rows}x{columns}x{replicates} has no error or interaction degrees of freedom"
            )));
        }
        let df_columns = columns - 1;
        let df_rows = rows - 1;
        let df_interaction = df_rows * df_columns;
        let df_error = rows * columns * (replicates - 1);
        let ms_error = ss_error / df_error as f64;
        if !(ms_error > 0.0) {
            return Err(Error::Degenerate(
                "error mean square is zero, F ratios are undefined".into(),
            ));
        }
        let effect = |ss: f64, df: usize| -> Result<SourceRow> {
            let ms = ss / df as f64;
            let f = ms / ms_error;
            Ok(SourceRow {
                ss,
                df,
                ms: Some(ms),
                f: Some(f),
                p: Some(f_tail_probability(f, df, df_error)?),
            })
        };
        Ok(Self {
            columns: effect(ss_columns, df_columns)?,
            rows: effect(ss_rows, df_rows)?,
            interaction: effect(ss_interaction, df_interaction)?,
            error: SourceRow {
                ss: ss_error,
                df: df_error,
                ms: Some(ms_error),
                f: None,
                p: None,
            },
            total: SourceRow {
                ss: ss_columns + ss_rows + ss_interaction + ss_error,
                df: rows * columns * replicates - 1,
                ms: None,
                f: None,
                p: None,
            },
        })
    }

    /// The five rows in table order.
    pub fn sources(&self) -> [(&'static str, &SourceRow); 5] {
        [
            (SOURCE_NAMES[0], &self.columns),
            (SOURCE_NAMES[1], &self.rows),
            (SOURCE_NAMES[2], &self.interaction),
            (SOURCE_NAMES[3], &self.error),
            (SOURCE_NAMES[4], &self.total),
        ]
    }
}

/// Component sums of squares `(columns, rows, interaction, error, total)` of a balanced grid.
pub fn sums_of_squares(data: &FactorialData) -> (f64, f64, f64, f64, f64) {
    let (nr, nc, nk) = (data.rows, data.columns, data.replicates);
    let n = data.values.len() as f64;
    let grand = data.values.iter().sum::<f64>() / n;

    let cell_means: Vec<f64> = (0..nr)
        .flat_map(|r| (0..nc).map(move |c| (r, c)))
        .map(|(r, c)| data.cell(r, c).iter().sum::<f64>() / nk as f64)
        .collect();
    let cell_mean = |r: usize, c: usize| cell_means[r * nc + c];
    let row_means: Vec<f64> = (0..nr)
        .map(|r| (0..nc).map(|c| cell_mean(r, c)).sum::<f64>() / nc as f64)
        .collect();
    let col_means: Vec<f64> = (0..nc)
        .map(|c| (0..nr).map(|r| cell_mean(r, c)).sum::<f64>() / nr as f64)
        .collect();

    let sq = |x: f64| x * x;
    let ss_rows = (nc * nk) as f64 * row_means.iter().map(|m| sq(m - grand)).sum::<f64>();
    let ss_columns = (nr * nk) as f64 * col_means.iter().map(|m| sq(m - grand)).sum::<f64>();
    let mut ss_interaction = 0.0;
    let mut ss_error = 0.0;
    for r in 0..nr {
        for c in 0..nc {
            let m = cell_mean(r, c);
            ss_interaction += sq(m - row_means[r] - col_means[c] + grand);
            ss_error += data.cell(r, c).iter().map(|v| sq(v - m)).sum::<f64>();
        }
    }
    ss_interaction *= nk as f64;
    let ss_total = data.values.iter().map(|v| sq(v - grand)).sum();
    (ss_columns, ss_rows, ss_interaction, ss_error, ss_total)
}

pub fn anova_two_way(data: &FactorialData) -> Result<AnovaTable> {
    let (ss_columns, ss_rows, ss_interaction, ss_error, ss_total) = sums_of_squares(data);
    let mut table = AnovaTable::from_sums_of_squares(
        ss_columns,
        ss_rows,
        ss_interaction,
        ss_error,
        data.rows,
        data.columns,
        data.replicates,
    )?;
    // keep the directly computed total rather than the sum of parts
    table.total.ss = ss_total;
    Ok(table)
}
