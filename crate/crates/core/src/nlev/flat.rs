//! Planar leveled trees with a leaf permutation, the normal form of elements
//! of iterated composition powers of `Σ`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::kernel::Perm;
use crate::profiles::Profile;

/// A planar leveled tree with identity vertex decorations and leaf permutation `lambda`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Flat {
    pub levels: Vec<Vec<usize>>,
    pub lambda: Perm,
}

/// Where each vertex of a grafted tree came from: `places[j][m][s][u]` is the
/// position, in result level `start_j + s`, of vertex `u` at level `s` of the
/// tree substituted at base vertex `(j, m)`.
pub type Places = Vec<Vec<Vec<Vec<usize>>>>;

impl Flat {
    pub fn new(levels: Vec<Vec<usize>>, lambda: Perm) -> Result<Self> {
        let f = Flat { levels, lambda };
        if let Some(first) = f.levels.first() {
            if first.len() != 1 {
                return invalid("a planar tree has one root");
            }
        }
        for j in 1..f.levels.len() {
            if f.levels[j].len() != f.levels[j - 1].iter().sum::<usize>() {
                return invalid("planar level sizes do not match");
            }
        }
        if f.lambda.degree() != f.weight() {
            return invalid("leaf permutation has the wrong degree");
        }
        Ok(f)
    }

    /// The `n`-corolla with leaf permutation `g`.
    pub fn corolla(g: Perm) -> Self {
        Flat { levels: vec![vec![g.degree()]], lambda: g }
    }

    /// The depth-zero tree with one leaf.
    pub fn trivial() -> Self {
        Flat { levels: Vec::new(), lambda: Perm::identity(1) }
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn weight(&self) -> usize {
        self.levels.last().map_or(1, |l| l.iter().sum())
    }

    pub fn profile(&self) -> Profile {
        Profile::new(self.levels.clone()).expect("planar tree has a profile")
    }

    pub fn with_lambda(&self, lambda: Perm) -> Flat {
        Flat { levels: self.levels.clone(), lambda }
    }

    /// The sorted slot of every planar vertex, per level; ties keep planar order.
    pub fn slots(&self) -> Vec<Vec<usize>> {
        self.levels.iter().map(|l| slot_order(l)).collect()
    }

    /// The planar position of every sorted slot, per level.
    pub fn vertices(&self) -> Vec<Vec<usize>> {
        self.slots().iter().map(|s| invert(s)).collect()
    }
}

/// `slot[m]` is the rank of planar entry `m` after a stable descending sort.
pub fn slot_order(level: &[usize]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..level.len()).collect();
    idx.sort_by(|&a, &b| level[b].cmp(&level[a]));
    invert(&idx)
}

pub(crate) fn invert(v: &[usize]) -> Vec<usize> {
    let mut out = vec![0; v.len()];
    for (i, &x) in v.iter().enumerate() {
        out[x] = i;
    }
    out
}

/// Substitutes `blow[j][m]` for every vertex `(j, m)` of `base`.
///
/// Every tree substituted at level `j` has depth `ells[j]` and weight equal to
/// the arity of its vertex. Leaf `r` of a substituted tree receives the child
/// `λ⁻¹(r)` of the vertex it replaces. The result's leaf permutation is the
/// Ass-evaluation of the decorated base composed with `base.lambda`.
pub fn graft(base: &Flat, ells: &[usize], blow: &[Vec<Flat>]) -> Result<(Flat, Places)> {
    let k = base.depth();
    if ells.len() != k || blow.len() != k {
        return invalid("one group per base level is required");
    }
    let mut levels: Vec<Vec<usize>> = Vec::new();
    let mut places: Places = Vec::with_capacity(k);
    // Base vertices of the current level in result order.
    let mut order: Vec<usize> = vec![0];
    for j in 0..k {
        if blow[j].len() != base.levels[j].len() {
            return invalid(format!("level {j} needs {} substituted trees", base.levels[j].len()));
        }
        let offsets = prefix(&base.levels[j]);
        let ell = ells[j];
        let start = levels.len();
        levels.extend(std::iter::repeat_n(Vec::new(), ell));
        let mut level_places: Vec<Vec<Vec<usize>>> = vec![Vec::new(); base.levels[j].len()];
        let mut next = Vec::new();
        for &m in &order {
            let t = &blow[j][m];
            let a = base.levels[j][m];
            if t.depth() != ell || t.weight() != a {
                return invalid(format!("substituted tree at ({j},{m}) has the wrong shape"));
            }
            let mut pl = Vec::with_capacity(ell);
            for s in 0..ell {
                let pos0 = levels[start + s].len();
                levels[start + s].extend(&t.levels[s]);
                pl.push((pos0..pos0 + t.levels[s].len()).collect());
            }
            level_places[m] = pl;
            let inv = t.lambda.inverse();
            next.extend((0..a).map(|r| offsets[m] + inv.image(r)));
        }
        places.push(level_places);
        order = next;
    }
    let t = if k == 0 { 1 } else { order.len() };
    if k == 0 {
        order = vec![0];
    }
    debug_assert_eq!(t, base.weight());
    // `order[f]` is the base leaf now at result position `f`.
    let moved = Perm::from_images(invert(&order)).expect("leaf order is a bijection");
    let lambda = moved.compose(&base.lambda)?;
    Ok((Flat { levels, lambda }, places))
}

/// Pushes vertex decorations `decs[j][m]` down to the leaves.
pub fn renormalize(base: &Flat, decs: &[Vec<Perm>]) -> Result<(Flat, Places)> {
    let blow: Vec<Vec<Flat>> = decs.iter().map(|l| l.iter().map(|g| Flat::corolla(g.clone())).collect()).collect();
    graft(base, &vec![1; base.depth()], &blow)
}

fn prefix(level: &[usize]) -> Vec<usize> {
    let mut acc = 0;
    level
        .iter()
        .map(|&a| {
            let o = acc;
            acc += a;
            o
        })
        .collect()
}
