//! Daubechies orthonormal filter banks built by spectral factorization.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 10;

/// Two-channel orthonormal filter bank.
///
/// `dec_lo` holds the scaling coefficients in minimum-phase order (largest
/// taps first) and is applied by correlation; `dec_hi` is its quadrature
/// mirror, `dec_hi[k] = (-1)^k dec_lo[L-1-k]`. The synthesis filters are the
/// time reverses of the analysis filters, applied by convolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadFilterBank {
    pub dec_lo: Vec<f64>,
    pub dec_hi: Vec<f64>,
    pub rec_lo: Vec<f64>,
    pub rec_hi: Vec<f64>,
    pub order: usize,
}

impl QuadFilterBank {
    pub fn len(&self) -> usize {
        self.dec_lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dec_lo.is_empty()
    }

    fn from_scaling(order: usize, scaling: Vec<f64>) -> Self {
        let n = scaling.len();
        let dec_hi: Vec<f64> = (0..n)
            .map(|k| {
                let v = scaling[n - 1 - k];
                if k % 2 == 0 {
                    v
                } else {
                    -v
                }
            })
            .collect();
        let rec_lo = scaling.iter().rev().copied().collect();
        let rec_hi = dec_hi.iter().rev().copied().collect();
        Self {
            dec_lo: scaling,
            dec_hi,
            rec_lo,
            rec_hi,
            order,
        }
    }
}

/// Daubechies filter bank with `order` vanishing moments (`2 * order` taps).
/// Order 1 is the Haar pair; "db4" is order 4.
pub fn daubechies_filters(order: usize) -> Result<QuadFilterBank> {
    if !(1..=MAX_ORDER).contains(&order) {
        return Err(Error::validation(format!(
            "Daubechies order must be in 1..={MAX_ORDER}, got {order}"
        )));
    }

    // |m0|^2 = cos^{2N}(w/2) P(sin^2(w/2)) with P(y) = sum_k C(N-1+k, k) y^k.
    // Each root y of P gives a reciprocal pair z, 1/z from z + 1/z = 2 - 4y;
    // keeping the root inside the unit circle yields the minimum-phase factor.
    let p: Vec<f64> = (0..order).map(|k| binomial(order - 1 + k, k)).collect();
    let y_roots = polynomial_roots(&p);

    let mut poly = vec![Complex64::new(1.0, 0.0)];
    for y in y_roots {
        let s = Complex64::new(2.0, 0.0) - 4.0 * y;
        let disc = (s * s - 4.0).sqrt();
        let a = (s + disc) / 2.0;
        let b = (s - disc) / 2.0;
        let inside = if a.norm() < b.norm() { a } else { b };
        poly = multiply_linear(&poly, inside);
    }
    for _ in 0..order {
        poly = multiply_linear(&poly, Complex64::new(-1.0, 0.0));
    }

    let mut taps: Vec<f64> = poly.iter().map(|c| c.re).collect();
    let scale = std::f64::consts::SQRT_2 / taps.iter().sum::<f64>();
    taps.iter_mut().for_each(|t| *t *= scale);
    Ok(QuadFilterBank::from_scaling(order, taps))
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Multiplies a polynomial (coefficients in descending powers) by `(z - root)`.
fn multiply_linear(poly: &[Complex64], root: Complex64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
    for (i, &c) in poly.iter().enumerate() {
        out[i] += c;
        out[i + 1] -= c * root;
    }
    out
}

/// Roots of `sum_k coeffs[k] y^k` (ascending powers) by Aberth iteration,
/// followed by Newton polishing on the original coefficients.
fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let degree = coeffs.len() - 1;
    if degree == 0 {
        return Vec::new();
    }
    let lead = coeffs[degree];
    let monic: Vec<Complex64> = coeffs
        .iter()
        .map(|&c| Complex64::new(c / lead, 0.0))
        .collect();

    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in monic.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    };

    // initial guesses on a circle bounding the root moduli (Cauchy bound)
    let radius = 1.0
        + monic[..degree]
            .iter()
            .map(|c| c.norm())
            .fold(0.0_f64, f64::max);
    let mut roots: Vec<Complex64> = (0..degree)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / degree as f64 + 0.4;
            Complex64::from_polar(radius * 0.5, angle)
        })
        .collect();

    for _ in 0..500 {
        let mut max_step = 0.0_f64;
        for i in 0..degree {
            let (p, dp) = eval(roots[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..degree)
                .filter(|&j| j != i)
                .map(|j| 1.0 / (roots[i] - roots[j]))
                .sum();
            let step = ratio / (1.0 - ratio * repulsion);
            roots[i] -= step;
            max_step = max_step.max(step.norm() / roots[i].norm().max(1.0));
        }
        if max_step < 1e-15 {
            break;
        }
    }

    for root in &mut roots {
        for _ in 0..3 {
            let (p, dp) = eval(*root);
            if dp.norm() == 0.0 {
                break;
            }
            *root -= p / dp;
        }
    }
    roots
}
