//! Leveled profiles, their composites and decompositions, and the planar
//! leveled trees they index.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::symseq::orbit_types;

/// A leveled multiset profile. Level 0 holds the single root entry; level `j`
/// has as many entries as the sum of level `j - 1`. Each level is sorted descending.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<usize>>", try_from = "Vec<Vec<usize>>")]
pub struct Profile {
    levels: Vec<Vec<usize>>,
}

impl From<Profile> for Vec<Vec<usize>> {
    fn from(p: Profile) -> Self {
        p.levels
    }
}

impl TryFrom<Vec<Vec<usize>>> for Profile {
    type Error = Error;

    fn try_from(levels: Vec<Vec<usize>>) -> Result<Self> {
        Profile::new(levels)
    }
}

impl Profile {
    pub fn empty() -> Self {
        Profile { levels: Vec::new() }
    }

    /// Validates the level sizes and sorts each level.
    pub fn new(mut levels: Vec<Vec<usize>>) -> Result<Self> {
        for level in levels.iter_mut() {
            level.sort_unstable_by(|a, b| b.cmp(a));
        }
        let p = Profile { levels };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if let Some(first) = self.levels.first() {
            if first.len() != 1 {
                return invalid("first level must be a single entry");
            }
        }
        for j in 1..self.levels.len() {
            let want: usize = self.levels[j - 1].iter().sum();
            if self.levels[j].len() != want {
                return invalid(format!("level {} has {} entries, expected {want}", j + 1, self.levels[j].len()));
            }
        }
        Ok(())
    }

    /// A single-level profile `(n)`.
    pub fn root(n: usize) -> Self {
        Profile { levels: vec![vec![n]] }
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[Vec<usize>] {
        &self.levels
    }

    pub fn is_positive(&self) -> bool {
        self.levels.iter().flatten().all(|&v| v > 0)
    }

    /// Sum of the last level; the empty profile has weight 1.
    pub fn weight(&self) -> usize {
        self.levels.last().map_or(1, |l| l.iter().sum())
    }

    /// Multiset of all entries, sorted descending.
    pub fn colors(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.levels.iter().flatten().copied().collect();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    }

    /// Appends a level of entries.
    pub fn extend(&self, level: Vec<usize>) -> Result<Profile> {
        let mut levels = self.levels.clone();
        levels.push(level);
        Profile::new(levels)
    }

    /// Parses `(2,(1,1),(1,1))`, `(3)` or `()`.
    pub fn parse(s: &str) -> Result<Profile> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t == "()" || t == "∅" || t.is_empty() {
            return Ok(Profile::empty());
        }
        let inner = t
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Invalid(format!("profile {s:?} must be parenthesized")))?;
        let mut levels = Vec::new();
        let mut depth = 0;
        let mut cur = String::new();
        let mut parts = Vec::new();
        for ch in inner.chars() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                ',' if depth == 0 => {
                    parts.push(std::mem::take(&mut cur));
                    continue;
                }
                _ => {}
            }
            cur.push(ch);
        }
        parts.push(cur);
        for part in parts {
            let body = part.trim_start_matches('(').trim_end_matches(')');
            let level = body
                .split(',')
                .map(|x| x.parse::<usize>().map_err(|e| Error::Invalid(format!("{x:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            levels.push(level);
        }
        Profile::new(levels)
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.levels.is_empty() {
            return write!(f, "()");
        }
        let parts: Vec<String> = self
            .levels
            .iter()
            .enumerate()
            .map(|(j, l)| if j == 0 { l[0].to_string() } else { format!("({})", l.iter().join(",")) })
            .collect();
        write!(f, "({})", parts.join(","))
    }
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Levelwise multiset union.
pub fn amalgamate(p: &Profile, q: &Profile) -> Result<Vec<Vec<usize>>> {
    if p.depth() != q.depth() {
        return invalid("profiles have different depths");
    }
    Ok(p.levels
        .iter()
        .zip(&q.levels)
        .map(|(a, b)| {
            let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
            v.sort_unstable_by(|x, y| y.cmp(x));
            v
        })
        .collect())
}

/// Prefixes a root entry to a leveled multiset.
pub fn with_root(n: usize, levels: Vec<Vec<usize>>) -> Result<Profile> {
    let mut all = vec![vec![n]];
    all.extend(levels);
    Profile::new(all)
}

/// Substitution data: for each group `j`, the profiles attached to the entries
/// of level `j` of the base profile, as `(entry, profile)` pairs sorted descending.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProfileFamily {
    pub ells: Vec<usize>,
    pub entries: Vec<Vec<(usize, Profile)>>,
}

impl ProfileFamily {
    pub fn new(ells: Vec<usize>, mut entries: Vec<Vec<(usize, Profile)>>) -> Self {
        for e in entries.iter_mut() {
            e.sort_by(|a, b| b.cmp(a));
        }
        ProfileFamily { ells, entries }
    }

    /// Every entry replaced by its one-level profile.
    pub fn identity(p: &Profile) -> Self {
        let entries = p.levels.iter().map(|l| l.iter().map(|&v| (v, Profile::root(v))).collect()).collect();
        ProfileFamily::new(vec![1; p.depth()], entries)
    }
}

/// The composite `p'∘Q`.
pub fn compose_profiles(base: &Profile, fam: &ProfileFamily) -> Result<Profile> {
    if fam.ells.len() != base.depth() || fam.entries.len() != base.depth() {
        return invalid("family length differs from profile depth");
    }
    let mut levels: Vec<Vec<usize>> = Vec::new();
    for (j, group) in fam.entries.iter().enumerate() {
        let ell = fam.ells[j];
        let mut want: Vec<usize> = base.levels[j].clone();
        let mut got: Vec<usize> = group.iter().map(|(n, _)| *n).collect();
        want.sort_unstable();
        got.sort_unstable();
        if want != got {
            return invalid(format!("group {} entries do not match level {}", j + 1, j + 1));
        }
        let mut slice: Vec<Vec<usize>> = vec![Vec::new(); ell];
        for (n, q) in group {
            if q.depth() != ell {
                return invalid(format!("profile {q} has depth {}, expected {ell}", q.depth()));
            }
            if q.weight() != *n {
                return Err(Error::Invalid(format!("profile {q} has weight {}, expected {n}", q.weight())));
            }
            for (s, l) in q.levels.iter().enumerate() {
                slice[s].extend(l);
            }
        }
        levels.extend(slice);
    }
    Profile::new(levels)
}

/// Splits leveled multisets `slice` into profiles, one per entry of the first level.
fn split_slice(slice: &[Vec<usize>]) -> BTreeSet<Vec<Profile>> {
    let roots = &slice[0];
    let mut states: BTreeSet<Vec<Vec<Vec<usize>>>> = BTreeSet::new();
    states.insert(roots.iter().map(|&r| vec![vec![r]]).collect());
    for level in &slice[1..] {
        let mut next = BTreeSet::new();
        for state in &states {
            let counts: Vec<usize> = state.iter().map(|q| q.last().unwrap().iter().sum()).collect();
            for parts in distribute(level, &counts) {
                let mut s = state.clone();
                for (q, part) in s.iter_mut().zip(parts) {
                    q.push(part);
                }
                next.insert(s);
            }
        }
        states = next;
    }
    states
        .into_iter()
        .map(|s| {
            let mut qs: Vec<Profile> = s.into_iter().map(|l| Profile::new(l).expect("consistent split")).collect();
            qs.sort();
            qs
        })
        .collect()
}

/// All ways to split a multiset into sub-multisets of the given sizes.
fn distribute(items: &[usize], counts: &[usize]) -> Vec<Vec<Vec<usize>>> {
    if counts.iter().sum::<usize>() != items.len() {
        return Vec::new();
    }
    let mut out = BTreeSet::new();
    fn rec(left: &[usize], counts: &[usize], acc: &mut Vec<Vec<usize>>, out: &mut BTreeSet<Vec<Vec<usize>>>) {
        let Some((&c, rest)) = counts.split_first() else {
            out.insert(acc.clone());
            return;
        };
        for pick in (0..left.len()).combinations(c) {
            let mut chosen: Vec<usize> = pick.iter().map(|&i| left[i]).collect();
            chosen.sort_unstable_by(|a, b| b.cmp(a));
            let remaining: Vec<usize> = (0..left.len()).filter(|i| !pick.contains(i)).map(|i| left[i]).collect();
            acc.push(chosen);
            rec(&remaining, rest, acc, out);
            acc.pop();
        }
    }
    rec(items, counts, &mut Vec::new(), &mut out);
    out.into_iter().collect()
}

/// All `(p', Q)` with `p'∘Q = p` and the given group depths, without duplicates.
pub fn decompose(p: &Profile, ells: &[usize]) -> Result<Vec<(Profile, ProfileFamily)>> {
    if ells.iter().sum::<usize>() != p.depth() {
        return invalid("group depths do not sum to the profile depth");
    }
    let mut results: BTreeSet<(Profile, ProfileFamily)> = BTreeSet::new();
    // Each partial state: base levels so far, family groups so far.
    type State = (Vec<Vec<usize>>, Vec<Vec<(usize, Profile)>>);
    let mut states: Vec<State> = vec![(Vec::new(), Vec::new())];
    let mut start = 0;
    for &ell in ells {
        let slice = &p.levels[start..start + ell];
        start += ell;
        let mut next = Vec::new();
        for (base, groups) in &states {
            let slots: usize = base.last().map_or(1, |l: &Vec<usize>| l.iter().sum());
            let splits: Vec<Vec<Profile>> = if ell == 0 {
                vec![vec![Profile::empty(); slots]]
            } else if slice[0].len() != slots {
                continue;
            } else {
                split_slice(slice).into_iter().collect()
            };
            for qs in splits {
                let mut pairs: Vec<(usize, Profile)> = qs.into_iter().map(|q| (q.weight(), q)).collect();
                pairs.sort_by(|a, b| b.cmp(a));
                let mut b = base.clone();
                b.push(pairs.iter().map(|(n, _)| *n).collect());
                let mut g = groups.clone();
                g.push(pairs);
                next.push((b, g));
            }
        }
        states = next;
    }
    for (base, groups) in states {
        let bp = Profile::new(base)?;
        let fam = ProfileFamily::new(ells.to_vec(), groups);
        debug_assert_eq!(compose_profiles(&bp, &fam).ok().as_ref(), Some(p));
        results.insert((bp, fam));
    }
    Ok(results.into_iter().collect())
}

/// All profiles of depth `k` and weight `t`, in canonical order.
///
/// With zero entries allowed, `max_width` bounds every level size and sum.
pub fn enumerate_profiles(k: usize, t: usize, positive: bool, max_width: Option<usize>) -> Result<Vec<Profile>> {
    if !positive && max_width.is_none() {
        return invalid("a width bound is required when zero entries are allowed");
    }
    if k == 0 {
        return Ok(if t == 1 { vec![Profile::empty()] } else { Vec::new() });
    }
    let cap = if positive { t } else { max_width.unwrap().max(t) };
    let mut out = Vec::new();
    fn rec(levels: &mut Vec<Vec<usize>>, k: usize, t: usize, cap: usize, positive: bool, out: &mut Vec<Profile>) {
        let count: usize = levels.last().map_or(1, |l| l.iter().sum());
        if levels.len() == k {
            if count == t {
                out.push(Profile { levels: levels.clone() });
            }
            return;
        }
        if count > cap {
            return;
        }
        let remaining = k - levels.len();
        let sums: Vec<usize> = if remaining == 1 { vec![t] } else { (0..=cap).collect() };
        for s in sums {
            if positive && s < count {
                continue;
            }
            for level in orbit_types(count, s, cap, !positive) {
                levels.push(level);
                rec(levels, k, t, cap, positive, out);
                levels.pop();
            }
        }
    }
    rec(&mut Vec::new(), k, t, cap, positive, &mut out);
    out.sort();
    Ok(out)
}

/// A planar leveled tree: for each level below the root, the entries in planar order.
/// Entry `i` of level `j` hangs from the node of level `j - 1` whose consecutive
/// block of children contains `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TreeWitness {
    pub levels: Vec<Vec<usize>>,
}

impl TreeWitness {
    /// For each level, the parent index of every child of that level, 0-based.
    pub fn parent_maps(&self) -> Vec<Vec<usize>> {
        (0..self.levels.len())
            .map(|j| self.levels[j].iter().enumerate().flat_map(|(i, &n)| std::iter::repeat_n(i, n)).collect())
            .collect()
    }

    pub fn profile(&self) -> Profile {
        Profile::new(self.levels.clone()).expect("planar tree has a consistent profile")
    }
}

/// All planar leveled trees with profile `p`.
pub fn enumerate_trees(p: &Profile) -> Vec<TreeWitness> {
    p.levels
        .iter()
        .map(|l| l.iter().copied().permutations(l.len()).collect::<BTreeSet<_>>().into_iter().collect::<Vec<_>>())
        .multi_cartesian_product()
        .map(|levels| TreeWitness { levels })
        .collect()
}
