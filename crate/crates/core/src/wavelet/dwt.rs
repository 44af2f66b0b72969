//! Single-level periodized analysis and synthesis.

use super::filters::QuadFilterBank;
use crate::error::{Error, Result};

/// Splits `signal` into approximation and detail halves:
/// `approx[n] = sum_k dec_lo[k] * signal[(2n + k) mod N]`, detail likewise with `dec_hi`.
pub fn analysis_step(signal: &[f64], bank: &QuadFilterBank) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = signal.len();
    if n < 2 || n % 2 != 0 {
        return Err(Error::validation(format!(
            "analysis needs an even length of at least 2, got {n}"
        )));
    }
    let half = n / 2;
    let mut approx = vec![0.0; half];
    let mut detail = vec![0.0; half];
    for i in 0..half {
        let mut a = 0.0;
        let mut d = 0.0;
        for (k, (&lo, &hi)) in bank.dec_lo.iter().zip(&bank.dec_hi).enumerate() {
            let x = signal[(2 * i + k) % n];
            a += lo * x;
            d += hi * x;
        }
        approx[i] = a;
        detail[i] = d;
    }
    Ok((approx, detail))
}

/// Inverse of [`analysis_step`].
pub fn synthesis_step(approx: &[f64], detail: &[f64], bank: &QuadFilterBank) -> Result<Vec<f64>> {
    if approx.len() != detail.len() {
        return Err(Error::validation(format!(
            "approximation and detail lengths differ ({} vs {})",
            approx.len(),
            detail.len()
        )));
    }
    if approx.is_empty() {
        return Err(Error::validation("synthesis needs non-empty coefficients"));
    }
    let n = 2 * approx.len();
    let taps = bank.rec_lo.len();
    let mut out = vec![0.0; n];
    for (i, (&a, &d)) in approx.iter().zip(detail).enumerate() {
        for (j, (&lo, &hi)) in bank.rec_lo.iter().zip(&bank.rec_hi).enumerate() {
            out[(2 * i + taps - 1 - j) % n] += lo * a + hi * d;
        }
    }
    Ok(out)
}
