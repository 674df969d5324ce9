use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A permutation of `{0, .., n-1}` stored as its image array.
///
/// Serialized as a one-line array of 1-based images.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u8>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u8).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::NotBijection(images));
            }
            seen[i] = true;
        }
        Ok(Perm(images.into_iter().map(|i| i as u8).collect()))
    }

    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::NotBijection(images.to_vec()));
        }
        Self::from_images(images.iter().map(|i| i - 1).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn image(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn images(&self) -> Vec<usize> {
        self.0.iter().map(|&i| i as usize).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| i == v as usize)
    }

    /// The composite `self ∘ other`, applying `other` first.
    pub fn compose(&self, other: &Perm) -> Result<Perm> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch { left: self.degree(), right: other.degree() });
        }
        Ok(self.then_unchecked(other))
    }

    pub(crate) fn then_unchecked(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&i| self.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u8; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v as usize] = i as u8;
        }
        Perm(inv)
    }

    /// The adjacent transposition swapping `i` and `i + 1`.
    pub fn adjacent(n: usize, i: usize) -> Perm {
        let mut p = Self::identity(n);
        p.0.swap(i, i + 1);
        p
    }

    /// All permutations of degree `n` in lexicographic order of image arrays.
    pub fn all(n: usize) -> Vec<Perm> {
        (0..n as u8).permutations(n).map(Perm).collect()
    }

    /// Indices `i_1, .., i_r` with `self = s_{i_r} ∘ .. ∘ s_{i_1}`.
    pub fn adjacent_word(&self) -> Vec<usize> {
        let mut h = self.0.clone();
        let mut word = Vec::new();
        loop {
            match (0..h.len().saturating_sub(1)).find(|&i| h[i] > h[i + 1]) {
                Some(i) => {
                    h.swap(i, i + 1);
                    word.push(i);
                }
                None => return word,
            }
        }
    }

    pub fn sign(&self) -> i8 {
        if self.adjacent_word().len().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Applies `self` to positions of a sequence: entry `i` moves to slot `self(i)`.
    pub fn permute_slots<T: Clone>(&self, items: &[T]) -> Vec<T> {
        let inv = self.inverse();
        (0..items.len()).map(|m| items[inv.image(m)].clone()).collect()
    }
}

/// The block permutation sending offset `j` of block `i` to offset
/// `inners[i](j)` of the target block `outer(i)`.
pub fn block_sum(outer: &Perm, inners: &[Perm]) -> Result<Perm> {
    let n = outer.degree();
    if inners.len() != n {
        return Err(Error::DegreeMismatch { left: n, right: inners.len() });
    }
    Ok(block_sum_unchecked(outer, inners))
}

pub(crate) fn block_sum_unchecked(outer: &Perm, inners: &[Perm]) -> Perm {
    let n = outer.degree();
    let inv = outer.inverse();
    let mut target_off = Vec::with_capacity(n);
    let mut acc = 0usize;
    for b in 0..n {
        target_off.push(acc);
        acc += inners[inv.image(b)].degree();
    }
    let mut out = Vec::with_capacity(acc);
    for (i, tau) in inners.iter().enumerate() {
        let base = target_off[outer.image(i)];
        out.extend(tau.0.iter().map(|&j| (base + j as usize) as u8));
    }
    Perm(out)
}

/// `block_sum(outer; id_{k_0}, .., id_{k_{n-1}})`.
pub fn block_sum_ids(outer: &Perm, sizes: &[usize]) -> Perm {
    let ids: Vec<Perm> = sizes.iter().map(|&k| Perm::identity(k)).collect();
    block_sum_unchecked(outer, &ids)
}

/// Concatenation `τ_0 ⊕ .. ⊕ τ_{n-1}` with blocks left in place.
pub fn direct_sum(inners: &[Perm]) -> Perm {
    block_sum_unchecked(&Perm::identity(inners.len()), inners)
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0.iter().map(|i| i + 1).join(","))
    }
}

impl Serialize for Perm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<usize> = self.0.iter().map(|&i| i as usize + 1).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Perm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        Perm::from_one_based(&v).map_err(serde::de::Error::custom)
    }
}
