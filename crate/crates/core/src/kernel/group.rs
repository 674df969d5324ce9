use std::collections::HashSet;

use itertools::Itertools;

use super::perm::{block_sum_unchecked, Perm};
use crate::error::{invalid, Result};

/// The subgroup `H(k_1, .., k_n)` of `Σ_k`, stored by its elements.
#[derive(Clone, Debug)]
pub struct BlockSubgroup {
    pub block_sizes: Vec<usize>,
    pub elements: Vec<Perm>,
}

impl BlockSubgroup {
    pub fn degree(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.elements.binary_search(p).is_ok()
    }
}

/// Permutations `π` of the blocks with `sizes[π(i)] == sizes[i]`.
pub fn size_preserving_perms(sizes: &[usize]) -> Vec<Perm> {
    Perm::all(sizes.len()).into_iter().filter(|p| (0..sizes.len()).all(|i| sizes[p.image(i)] == sizes[i])).collect()
}

/// All block permutations preserving the consecutive blocks of the given sizes.
pub fn h_subgroup(block_sizes: &[usize]) -> Result<BlockSubgroup> {
    if block_sizes.is_empty() || block_sizes.contains(&0) {
        return invalid("block sizes must be a nonempty list of positive integers");
    }
    let inner_choices: Vec<Vec<Perm>> = block_sizes.iter().map(|&k| Perm::all(k)).collect();
    let mut elements = Vec::new();
    for outer in size_preserving_perms(block_sizes) {
        for inners in inner_choices.iter().multi_cartesian_product() {
            let inners: Vec<Perm> = inners.into_iter().cloned().collect();
            elements.push(block_sum_unchecked(&outer, &inners));
        }
    }
    elements.sort();
    Ok(BlockSubgroup { block_sizes: block_sizes.to_vec(), elements })
}

/// The wreath product `Σ_d ≀ Σ_p` inside `Σ_{dp}`.
pub fn wreath(d: usize, p: usize) -> Result<BlockSubgroup> {
    h_subgroup(&vec![d; p])
}

/// Checks closure under composition and inverses.
pub fn is_subgroup(elements: &[Perm]) -> bool {
    let set: HashSet<&Perm> = elements.iter().collect();
    elements.iter().all(|a| set.contains(&a.inverse()) && elements.iter().all(|b| set.contains(&a.then_unchecked(b))))
}
