#![allow(dead_code)]

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{rngs::StdRng, Rng, SeedableRng};

/// Synthetic RR series: a mean interval modulated by an LF and an HF
/// oscillation (evaluated at the running beat time) plus uniform jitter.
pub fn synthetic_rr(seed: u64, beats: usize, lf_amp: f64, hf_amp: f64) -> Vec<f64> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut t = 0.0;
    (0..beats)
        .map(|_| {
            let rr = 820.0
                + lf_amp * (2.0 * PI * 0.1 * t).sin()
                + hf_amp * (2.0 * PI * 0.25 * t + 0.4).sin()
                + rng.gen_range(-15.0..15.0);
            t += rr / 1000.0;
            rr
        })
        .collect()
}

pub fn write_rr(path: &Path, rr: &[f64]) {
    let mut text = String::from("# synthetic RR intervals (ms)\n");
    for v in rr {
        writeln!(text, "{v}").unwrap();
    }
    std::fs::write(path, text).unwrap();
}

/// Writes `groups x per_group` recordings and a manifest; returns the manifest path.
pub fn write_study(dir: &Path, groups: &[&str], per_group: usize, beats: usize) -> PathBuf {
    let mut manifest = String::from("path,subject_id,group\n");
    for (g, group) in groups.iter().enumerate() {
        for s in 0..per_group {
            let id = format!("{group}-{s:02}");
            let file = format!("{id}.rr");
            let rr = synthetic_rr(
                (g * 100 + s) as u64,
                beats,
                20.0 + 15.0 * g as f64,
                10.0 + 4.0 * s as f64,
            );
            write_rr(&dir.join(&file), &rr);
            writeln!(manifest, "{file},{id},{group}").unwrap();
        }
    }
    let path = dir.join("manifest.csv");
    std::fs::write(&path, manifest).unwrap();
    path
}

/// Least-squares fitted values of `y` on the columns of `x` (normal equations,
/// Gaussian elimination with partial pivoting).
fn fitted(x: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let p = x[0].len();
    let mut a = vec![vec![0.0; p + 1]; p];
    for (row, &yi) in x.iter().zip(y) {
        for i in 0..p {
            for j in 0..p {
                a[i][j] += row[i] * row[j];
            }
            a[i][p] += row[i] * yi;
        }
    }
    for col in 0..p {
        let pivot = (col..p)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        for r in 0..p {
            if r != col {
                let factor = a[r][col] / a[col][col];
                for c in col..=p {
                    a[r][c] -= factor * a[col][c];
                }
            }
        }
    }
    let beta: Vec<f64> = (0..p).map(|i| a[i][p] / a[i][i]).collect();
    x.iter()
        .map(|row| row.iter().zip(&beta).map(|(u, v)| u * v).sum())
        .collect()
}

/// Sums of squares by nested-model comparison on a dummy-coded design.
pub fn ss_oracle(cells: &[Vec<Vec<f64>>]) -> [f64; 5] {
    let (nr, nc) = (cells.len(), cells[0].len());
    let mut y = Vec::new();
    let design = |with_rows: bool, with_cols: bool, with_inter: bool| -> Vec<Vec<f64>> {
        let mut x = Vec::new();
        for (r, row) in cells.iter().enumerate() {
            for (c, cell) in row.iter().enumerate() {
                for _ in cell {
                    let mut v = vec![1.0];
                    let rd: Vec<f64> = (1..nr).map(|i| f64::from(u8::from(r == i))).collect();
                    let cd: Vec<f64> = (1..nc).map(|j| f64::from(u8::from(c == j))).collect();
                    if with_rows {
                        v.extend(&rd);
                    }
                    if with_cols {
                        v.extend(&cd);
                    }
                    if with_inter {
                        for a in &rd {
                            for b in &cd {
                                v.push(a * b);
                            }
                        }
                    }
                    x.push(v);
                }
            }
        }
        x
    };
    for row in cells {
        for cell in row {
            y.extend(cell);
        }
    }
    let null = fitted(&design(false, false, false), &y);
    let rows = fitted(&design(true, false, false), &y);
    let cols = fitted(&design(false, true, false), &y);
    let additive = fitted(&design(true, true, false), &y);
    let full = fitted(&design(true, true, true), &y);
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>();
    [
        dist(&cols, &null),
        dist(&rows, &null),
        dist(&full, &additive),
        dist(&y, &full),
        dist(&y, &null),
    ]
}
