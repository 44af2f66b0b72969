use std::collections::BTreeSet;
use std::f64::consts::PI;

use hrv_wpt::ingest::UniformSignal;
use hrv_wpt::wavelet::{
    analysis_step, daubechies_filters, node_frequency_range, synthesis_step, wpt_decompose,
    wpt_reconstruct_nodes, QuadFilterBank, MAX_ORDER,
};
use proptest::prelude::*;
use rand::{rngs::StdRng, Rng, SeedableRng};

fn energy(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn noise(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Explicit N x N periodized analysis matrix: row n of the low half is the
/// filter placed at offset 2n, wrapped modulo N.
fn analysis_matrix(bank: &QuadFilterBank, n: usize) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; n]; n];
    for row in 0..n / 2 {
        for k in 0..bank.len() {
            m[row][(2 * row + k) % n] += bank.dec_lo[k];
            m[n / 2 + row][(2 * row + k) % n] += bank.dec_hi[k];
        }
    }
    m
}

#[test]
fn filter_invariants_every_order() {
    for order in 1..=MAX_ORDER {
        let b = daubechies_filters(order).unwrap();
        let len = b.len();
        assert_eq!(len, 2 * order);
        assert!(
            (b.dec_lo.iter().sum::<f64>() - 2f64.sqrt()).abs() < 1e-12,
            "order {order}"
        );
        assert!(b.dec_hi.iter().sum::<f64>().abs() < 1e-12, "order {order}");
        for k in 0..len {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(b.dec_hi[k], sign * b.dec_lo[len - 1 - k]);
        }
        for shift in (0..len).step_by(2) {
            let lo: f64 = (0..len - shift)
                .map(|k| b.dec_lo[k] * b.dec_lo[k + shift])
                .sum();
            let hi: f64 = (0..len - shift)
                .map(|k| b.dec_hi[k] * b.dec_hi[k + shift])
                .sum();
            let want = if shift == 0 { 1.0 } else { 0.0 };
            assert!(
                (lo - want).abs() < 1e-12,
                "order {order} shift {shift}: {lo}"
            );
            assert!(
                (hi - want).abs() < 1e-12,
                "order {order} shift {shift}: {hi}"
            );
        }
        // `order` vanishing moments of the wavelet: sum_k k^p dec_hi[k] = 0, p < order
        for p in 0..order as i32 {
            let moment: f64 = (0..len).map(|k| (k as f64).powi(p) * b.dec_hi[k]).sum();
            let scale: f64 = (0..len)
                .map(|k| (k as f64).powi(p) * b.dec_hi[k].abs())
                .sum();
            assert!(
                moment.abs() < 1e-10 * scale.max(1.0),
                "order {order} moment {p}: {moment}"
            );
        }
    }
}

#[test]
fn db4_matches_published_taps() {
    // Daubechies' 8-tap scaling filter as tabulated in the wavelet literature
    let want = [
        0.230_377_813_308_855_2,
        0.714_846_570_552_541_5,
        0.630_880_767_929_590_4,
        -0.027_983_769_416_983_85,
        -0.187_034_811_718_881_14,
        0.030_841_381_835_986_965,
        0.032_883_011_666_982_945,
        -0.010_597_401_784_997_278,
    ];
    let b = daubechies_filters(4).unwrap();
    for (g, w) in b.dec_lo.iter().zip(want) {
        assert!((g - w).abs() < 1e-12, "{g} vs {w}");
    }
}

#[test]
fn db4_analysis_matches_matrix_oracle() {
    let bank = daubechies_filters(4).unwrap();
    let x = noise(7, 64);
    let m = analysis_matrix(&bank, 64);
    let direct: Vec<f64> = m
        .iter()
        .map(|row| row.iter().zip(&x).map(|(a, b)| a * b).sum())
        .collect();
    let (a, d) = analysis_step(&x, &bank).unwrap();
    for (i, v) in a.iter().chain(&d).enumerate() {
        assert!((v - direct[i]).abs() < 1e-13);
    }
    let rel = (energy(&a) + energy(&d) - energy(&x)).abs() / energy(&x);
    assert!(rel < 1e-10);

    // synthesis is the transpose of the analysis matrix
    let back = synthesis_step(&a, &d, &bank).unwrap();
    let coeffs: Vec<f64> = a.iter().chain(&d).copied().collect();
    for j in 0..64 {
        let t: f64 = (0..64).map(|i| m[i][j] * coeffs[i]).sum();
        assert!((back[j] - t).abs() < 1e-13);
    }
}

#[test]
fn db4_round_trip_on_length_128_noise() {
    let bank = daubechies_filters(4).unwrap();
    let x = noise(11, 128);
    let (a, d) = analysis_step(&x, &bank).unwrap();
    let y = synthesis_step(&a, &d, &bank).unwrap();
    let max = x
        .iter()
        .zip(&y)
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max);
    assert!(max < 1e-10, "{max}");
}

fn leaf_energies(tree: &hrv_wpt::WpTree) -> Vec<f64> {
    tree.leaves().iter().map(|l| energy(l.coeffs)).collect()
}

fn argmax(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap()
        .0
}

#[test]
fn sinusoid_at_017_hz_peaks_in_leaf_5() {
    let n = 1024;
    let rate = 4.0;
    let x: Vec<f64> = (0..n)
        .map(|i| (2.0 * PI * 0.17 * i as f64 / rate).sin())
        .collect();
    let sig = UniformSignal::new(x, rate, 0.0).unwrap();
    let tree = wpt_decompose(&sig, 6, &daubechies_filters(4).unwrap()).unwrap();
    assert_eq!(argmax(&leaf_energies(&tree)), 5);
}

#[test]
fn slot_centers_peak_in_their_own_leaf() {
    let bank = daubechies_filters(4).unwrap();
    let rate = 4.0;
    for depth in 1..=6usize {
        for slot in 0..1usize << depth {
            let (lo, hi) = node_frequency_range(depth, slot, rate).unwrap();
            let f = 0.5 * (lo + hi);
            let x: Vec<f64> = (0..2048)
                .map(|i| (2.0 * PI * f * i as f64 / rate + 0.3).cos())
                .collect();
            let sig = UniformSignal::new(x, rate, 0.0).unwrap();
            let tree = wpt_decompose(&sig, depth, &bank).unwrap();
            assert_eq!(
                argmax(&leaf_energies(&tree)),
                slot,
                "depth {depth} slot {slot}"
            );
        }
    }
}

#[test]
fn leaf_ranges_tile_the_nyquist_interval() {
    for depth in 0..=8 {
        let mut edge = 0.0;
        for j in 0..1usize << depth {
            let (lo, hi) = node_frequency_range(depth, j, 4.0).unwrap();
            assert_eq!(lo, edge);
            assert!(hi > lo);
            edge = hi;
        }
        assert_eq!(edge, 2.0);
    }
}

#[test]
fn level_lengths_and_parseval_for_all_orders() {
    let x = noise(3, 512);
    let total = energy(&x);
    let sig = UniformSignal::new(x, 4.0, 0.0).unwrap();
    for order in 1..=MAX_ORDER {
        let tree = wpt_decompose(&sig, 6, &daubechies_filters(order).unwrap()).unwrap();
        assert_eq!(tree.level(0).unwrap()[0].coeffs, sig.samples());
        for m in 0..=6 {
            let nodes = tree.level(m).unwrap();
            assert!(nodes.iter().all(|n| n.coeffs.len() == 512 >> m));
            let e: f64 = nodes.iter().map(|n| energy(n.coeffs)).sum();
            assert!((e - total).abs() / total < 1e-9, "order {order} level {m}");
        }
    }
}

#[test]
fn complementary_leaf_sets_sum_to_signal() {
    let mut rng = StdRng::seed_from_u64(99);
    let bank = daubechies_filters(4).unwrap();
    for trial in 0..20 {
        let x = noise(1000 + trial, 256);
        let sig = UniformSignal::new(x.clone(), 4.0, 0.0).unwrap();
        let tree = wpt_decompose(&sig, 5, &bank).unwrap();
        let a: BTreeSet<usize> = (0..32).filter(|_| rng.gen_bool(0.5)).collect();
        let b: BTreeSet<usize> = (0..32).filter(|j| !a.contains(j)).collect();
        let ra = wpt_reconstruct_nodes(&tree, &a).unwrap();
        let rb = wpt_reconstruct_nodes(&tree, &b).unwrap();
        let scale = energy(&x).sqrt();
        for i in 0..256 {
            assert!((ra[i] + rb[i] - x[i]).abs() < 1e-10 * scale);
        }
    }
}

proptest! {
    #[test]
    fn analysis_synthesis_round_trip(
        order in 1usize..=MAX_ORDER,
        half in 1usize..40,
        seed in any::<u64>(),
    ) {
        let bank = daubechies_filters(order).unwrap();
        let x = noise(seed, 2 * half);
        let (a, d) = analysis_step(&x, &bank).unwrap();
        let e = energy(&x);
        prop_assert!((energy(&a) + energy(&d) - e).abs() <= 1e-10 * e);
        let y = synthesis_step(&a, &d, &bank).unwrap();
        let err: f64 = x.iter().zip(&y).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        prop_assert!(err <= 1e-10 * e.sqrt());
    }

    #[test]
    fn full_tree_reconstruction(order in 1usize..=6, depth in 0usize..=5, seed in any::<u64>()) {
        let n = 64usize;
        let x = noise(seed, n);
        let sig = UniformSignal::new(x.clone(), 4.0, 0.0).unwrap();
        let tree = wpt_decompose(&sig, depth, &daubechies_filters(order).unwrap()).unwrap();
        let all: BTreeSet<usize> = (0..1usize << depth).collect();
        let y = wpt_reconstruct_nodes(&tree, &all).unwrap();
        let err: f64 = x.iter().zip(&y).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        prop_assert!(err <= 1e-10 * energy(&x).sqrt());
    }
}
