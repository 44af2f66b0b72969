//! Full wavelet packet tree with frequency-ordered node addressing.
//!
//! Splitting a high-pass branch mirrors its spectrum, so the natural
//! (filter-bank) order of nodes at a level is not monotone in frequency.
//! Nodes are stored in natural order; every public index is a frequency
//! index, mapped to the natural position through the binary reflected Gray
//! code.

use std::collections::BTreeSet;

use super::dwt::{analysis_step, synthesis_step};
use super::filters::QuadFilterBank;
use crate::error::{Error, Result};
use crate::ingest::UniformSignal;

/// Natural (filter-bank) position of the node in frequency slot `index`.
pub fn natural_position(index: usize) -> usize {
    index ^ (index >> 1)
}

/// Frequency slot of the node at natural position `position`.
pub fn frequency_index(position: usize) -> usize {
    let mut index = position;
    let mut shift = position >> 1;
    while shift != 0 {
        index ^= shift;
        shift >>= 1;
    }
    index
}

/// One coefficient set of the tree, addressed by level and frequency index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WpNode<'a> {
    pub level: usize,
    pub index: usize,
    pub coeffs: &'a [f64],
}

#[derive(Debug, Clone)]
pub struct WpTree {
    signal_len: usize,
    depth: usize,
    rate_hz: f64,
    bank: QuadFilterBank,
    // levels[m][p]: node at natural position p
    levels: Vec<Vec<Vec<f64>>>,
}

impl WpTree {
    pub fn signal_len(&self) -> usize {
        self.signal_len
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn rate_hz(&self) -> f64 {
        self.rate_hz
    }

    pub fn bank(&self) -> &QuadFilterBank {
        &self.bank
    }

    pub fn leaf_count(&self) -> usize {
        1 << self.depth
    }

    /// Coefficients of node `(level, index)`, `index` in frequency order.
    pub fn node(&self, level: usize, index: usize) -> Result<WpNode<'_>> {
        if level > self.depth {
            return Err(Error::validation(format!(
                "level {level} exceeds tree depth {}",
                self.depth
            )));
        }
        if index >= 1 << level {
            return Err(Error::validation(format!(
                "node index {index} out of range for level {level}"
            )));
        }
        Ok(WpNode {
            level,
            index,
            coeffs: &self.levels[level][natural_position(index)],
        })
    }

    /// Nodes of one level in frequency order.
    pub fn level(&self, level: usize) -> Result<Vec<WpNode<'_>>> {
        (0..1usize << level.min(self.depth))
            .map(|j| self.node(level, j))
            .collect()
    }

    pub fn leaves(&self) -> Vec<WpNode<'_>> {
        self.level(self.depth).expect("depth is a valid level")
    }
}

/// Decomposes `signal` into every packet node down to `depth`.
pub fn wpt_decompose(
    signal: &UniformSignal,
    depth: usize,
    bank: &QuadFilterBank,
) -> Result<WpTree> {
    let n = signal.len();
    let block = 1usize
        .checked_shl(depth as u32)
        .filter(|b| *b <= n)
        .ok_or_else(|| Error::validation(format!("depth {depth} needs more than {n} samples")))?;
    if n % block != 0 {
        return Err(Error::validation(format!(
            "signal length {n} is not a multiple of 2^{depth} = {block}"
        )));
    }

    let mut levels = Vec::with_capacity(depth + 1);
    levels.push(vec![signal.samples().to_vec()]);
    for m in 0..depth {
        let mut next = Vec::with_capacity(2 << m);
        for parent in &levels[m] {
            let (lo, hi) = analysis_step(parent, bank)?;
            next.push(lo);
            next.push(hi);
        }
        levels.push(next);
    }
    Ok(WpTree {
        signal_len: n,
        depth,
        rate_hz: signal.rate_hz(),
        bank: bank.clone(),
        levels,
    })
}

/// Time-domain component carried by the selected leaves (frequency indices);
/// every other leaf is zeroed before synthesis.
pub fn wpt_reconstruct_nodes(tree: &WpTree, node_set: &BTreeSet<usize>) -> Result<Vec<f64>> {
    let leaves = tree.leaf_count();
    if let Some(bad) = node_set.iter().find(|&&j| j >= leaves) {
        return Err(Error::validation(format!(
            "leaf index {bad} out of range (tree has {leaves} leaves)"
        )));
    }
    let mut current: Vec<Vec<f64>> = tree.levels[tree.depth]
        .iter()
        .enumerate()
        .map(|(p, coeffs)| {
            if node_set.contains(&frequency_index(p)) {
                coeffs.clone()
            } else {
                vec![0.0; coeffs.len()]
            }
        })
        .collect();
    while current.len() > 1 {
        current = current
            .chunks_exact(2)
            .map(|pair| synthesis_step(&pair[0], &pair[1], &tree.bank))
            .collect::<Result<_>>()?;
    }
    Ok(current.pop().expect("root node"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelet::daubechies_filters;

    #[test]
    fn gray_code_round_trip() {
        for j in 0..256 {
            assert_eq!(frequency_index(natural_position(j)), j);
        }
        assert_eq!(natural_position(2), 3);
        assert_eq!(natural_position(3), 2);
    }

    #[test]
    fn depth_zero_is_identity() {
        let sig = UniformSignal::new(vec![1.0, 2.0, 3.0], 4.0, 0.0).unwrap();
        let bank = daubechies_filters(4).unwrap();
        let tree = wpt_decompose(&sig, 0, &bank).unwrap();
        assert_eq!(tree.leaves().len(), 1);
        assert_eq!(tree.leaves()[0].coeffs, &[1.0, 2.0, 3.0]);
        let all: BTreeSet<usize> = [0].into();
        assert_eq!(
            wpt_reconstruct_nodes(&tree, &all).unwrap(),
            vec![1.0, 2.0, 3.0]
        );
    }

    #[test]
    fn constant_lands_in_lowest_leaf() {
        let sig = UniformSignal::new(vec![5.0; 256], 4.0, 0.0).unwrap();
        let bank = daubechies_filters(4).unwrap();
        let tree = wpt_decompose(&sig, 6, &bank).unwrap();
        for leaf in tree.leaves() {
            if leaf.index == 0 {
                let e: f64 = leaf.coeffs.iter().map(|c| c * c).sum();
                assert!((e - 25.0 * 256.0).abs() < 1e-8);
            } else {
                assert!(
                    leaf.coeffs.iter().all(|c| c.abs() <= 1e-9),
                    "leaf {}",
                    leaf.index
                );
            }
        }
    }

    #[test]
    fn rejects_bad_lengths_and_indices() {
        let bank = daubechies_filters(2).unwrap();
        let sig = UniformSignal::new(vec![0.0; 96], 4.0, 0.0).unwrap();
        assert!(wpt_decompose(&sig, 6, &bank).is_err());
        assert!(wpt_decompose(&sig, 7, &bank).is_err());
        let tree = wpt_decompose(&sig, 5, &bank).unwrap();
        assert!(tree.node(5, 32).is_err());
        assert!(tree.node(6, 0).is_err());
        let bad: BTreeSet<usize> = [32].into();
        assert!(wpt_reconstruct_nodes(&tree, &bad).is_err());
    }

    #[test]
    fn empty_selection_reconstructs_zero() {
        let bank = daubechies_filters(3).unwrap();
        let sig =
            UniformSignal::new((0..64).map(|i| (i as f64).sin()).collect(), 4.0, 0.0).unwrap();
        let tree = wpt_decompose(&sig, 4, &bank).unwrap();
        let out = wpt_reconstruct_nodes(&tree, &BTreeSet::new()).unwrap();
        assert_eq!(out, vec![0.0; 64]);
    }
}
