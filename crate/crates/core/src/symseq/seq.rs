use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::kernel::{Elem, FinObj, GObj, Mode, Perm};

/// A symmetric sequence bounded in arity: `levels[n]` is `X[n]` with its `Σ_n`-action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymSeq {
    mode: Mode,
    levels: Vec<GObj>,
}

impl SymSeq {
    pub fn new(mode: Mode, levels: Vec<GObj>) -> Result<Self> {
        for (n, g) in levels.iter().enumerate() {
            if g.degree() != n {
                return invalid(format!("level {n} carries an action of degree {}", g.degree()));
            }
            if g.carrier.mode() != mode {
                return Err(Error::ModeMismatch);
            }
        }
        Ok(SymSeq { mode, levels })
    }

    /// The sequence with no non-base atoms up to `bound`.
    pub fn zero(mode: Mode, bound: usize) -> Self {
        let levels = (0..=bound).map(|n| GObj::trivial(FinObj::empty(mode), n)).collect();
        SymSeq { mode, levels }
    }

    /// Levels given by atoms with trivial actions.
    pub fn trivial(mode: Mode, atoms: Vec<Vec<Elem>>) -> Result<Self> {
        let levels = atoms
            .into_iter()
            .enumerate()
            .map(|(n, a)| Ok(GObj::trivial(FinObj::with_atoms(mode, a)?, n)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(mode, levels)
    }

    /// The unit `I`: the monoidal unit at arity 1, initial elsewhere.
    pub fn unit(mode: Mode, bound: usize) -> Self {
        let mut s = Self::zero(mode, bound);
        if bound >= 1 {
            s.levels[1] = GObj::trivial(FinObj::unit(mode), 1);
        }
        s
    }

    /// `Σ[k] = Σ_k` with right multiplication, for `1 ≤ k ≤ bound`.
    pub fn sigma(mode: Mode, bound: usize) -> Self {
        let mut s = Self::zero(mode, bound);
        for k in 1..=bound {
            let atoms = Perm::all(k).into_iter().map(Elem::Perm).collect();
            let carrier = FinObj::with_atoms(mode, atoms).expect("distinct permutations");
            s.levels[k] = GObj::from_right_action(carrier, k, |x, g| match x {
                Elem::Perm(p) => Elem::Perm(p.compose(g).expect("same degree")),
                other => other.clone(),
            })
            .expect("regular action");
        }
        s
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn arity_bound(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[GObj] {
        &self.levels
    }

    pub fn level(&self, n: usize) -> Option<&GObj> {
        self.levels.get(n)
    }

    /// Non-base atoms at arity `n` (empty above the bound).
    pub fn real_atoms(&self, n: usize) -> &[Elem] {
        self.levels.get(n).map(|g| g.carrier.real_atoms()).unwrap_or(&[])
    }

    pub fn contains(&self, n: usize, e: &Elem) -> bool {
        self.levels.get(n).is_some_and(|g| g.carrier.contains(e))
    }

    pub fn len_at(&self, n: usize) -> usize {
        self.levels.get(n).map_or(0, |g| g.len())
    }

    /// Right action `e·g` of `g ∈ Σ_n` on an atom of `X[n]`.
    pub fn act(&self, n: usize, e: &Elem, g: &Perm) -> Elem {
        if e.is_base() || g.is_identity() {
            return e.clone();
        }
        self.levels[n].act_elem(e, g).unwrap_or_else(|| panic!("atom {e:?} not in arity {n}")).clone()
    }

    /// Level 0 has no non-base atoms.
    pub fn is_reduced(&self) -> bool {
        self.levels[0].carrier.is_initial()
    }

    /// Restriction to arities `≤ bound`, padding with initial levels.
    pub fn with_bound(&self, bound: usize) -> SymSeq {
        let mut levels: Vec<GObj> = self.levels.iter().take(bound + 1).cloned().collect();
        for n in levels.len()..=bound {
            levels.push(GObj::trivial(FinObj::empty(self.mode), n));
        }
        SymSeq { mode: self.mode, levels }
    }

    /// `τ_n M`: levels above `n` replaced by the zero object.
    pub fn truncate(&self, n: usize) -> Result<SymSeq> {
        if self.mode != Mode::Pointed {
            return Err(Error::NeedsPointed);
        }
        let mut s = self.clone();
        for k in n + 1..s.levels.len() {
            s.levels[k] = GObj::trivial(FinObj::empty(self.mode), k);
        }
        Ok(s)
    }

    /// `i_n M`: only level `n` kept.
    pub fn concentrate(&self, n: usize) -> Result<SymSeq> {
        if self.mode != Mode::Pointed {
            return Err(Error::NeedsPointed);
        }
        let mut s = Self::zero(self.mode, self.arity_bound());
        if n < s.levels.len() {
            s.levels[n] = self.levels[n].clone();
        }
        Ok(s)
    }

    /// True when every level acts freely away from the basepoint.
    pub fn is_free(&self) -> bool {
        self.levels.iter().all(|g| g.is_free())
    }
}

/// An arity-preserving map of sequences, stored atomwise.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SeqMap {
    pub levels: Vec<HashMap<Elem, Elem>>,
}

impl SeqMap {
    pub fn from_fn(src: &SymSeq, f: impl Fn(usize, &Elem) -> Elem) -> SeqMap {
        let levels = src
            .levels()
            .iter()
            .enumerate()
            .map(|(n, g)| g.carrier.atoms().iter().map(|e| (e.clone(), f(n, e))).collect())
            .collect();
        SeqMap { levels }
    }

    pub fn identity(src: &SymSeq) -> SeqMap {
        Self::from_fn(src, |_, e| e.clone())
    }

    pub fn apply(&self, n: usize, e: &Elem) -> Elem {
        if e.is_base() {
            return Elem::Base;
        }
        self.levels[n].get(e).cloned().unwrap_or_else(|| panic!("map undefined at {e:?}"))
    }

    pub fn try_apply(&self, n: usize, e: &Elem) -> Option<Elem> {
        if e.is_base() {
            return Some(Elem::Base);
        }
        self.levels.get(n)?.get(e).cloned()
    }

    /// Checks that the map lands in `dst`, fixes the basepoint and is equivariant.
    pub fn check(&self, src: &SymSeq, dst: &SymSeq) -> Result<()> {
        for (n, g) in src.levels().iter().enumerate() {
            let gens: Vec<Perm> = (0..n.saturating_sub(1)).map(|i| Perm::adjacent(n, i)).collect();
            for e in g.carrier.atoms() {
                let fe = self.try_apply(n, e).ok_or_else(|| Error::Validation(format!("undefined at {e:?}")))?;
                if !dst.contains(n, &fe) {
                    return Err(Error::Validation(format!("image {fe:?} outside target")));
                }
                for s in &gens {
                    if self.apply(n, &src.act(n, e, s)) != dst.act(n, &fe, s) {
                        return Err(Error::Validation(format!("not equivariant at {e:?}")));
                    }
                }
            }
        }
        Ok(())
    }

    /// True when each level is a bijection onto the matching level of `dst`.
    pub fn is_bijection(&self, src: &SymSeq, dst: &SymSeq) -> bool {
        (0..=src.arity_bound().max(dst.arity_bound())).all(|n| {
            let mut img: Vec<Elem> =
                src.real_atoms(n).iter().map(|e| self.try_apply(n, e).unwrap_or(Elem::Base)).collect();
            let count = img.len();
            img.sort();
            img.dedup();
            img.len() == count
                && count == dst.real_atoms(n).len()
                && img.iter().all(|e| dst.contains(n, e) && !e.is_base())
        })
    }

    pub fn then(&self, next: &SeqMap) -> SeqMap {
        let levels = self
            .levels
            .iter()
            .enumerate()
            .map(|(n, m)| m.iter().map(|(k, v)| (k.clone(), next.apply(n, v))).collect())
            .collect();
        SeqMap { levels }
    }
}

#[derive(Serialize, Deserialize)]
struct LevelJson {
    arity: usize,
    atoms: Vec<Elem>,
    action: Vec<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct SymSeqJson {
    mode: Mode,
    arity_bound: usize,
    levels: Vec<LevelJson>,
}

impl SymSeq {
    /// JSON form; `action[i]` lists the index of `x·s_i` for each atom `x`.
    pub fn to_json(&self) -> serde_json::Value {
        let j = SymSeqJson {
            mode: self.mode,
            arity_bound: self.arity_bound(),
            levels: self
                .levels
                .iter()
                .enumerate()
                .map(|(n, g)| LevelJson {
                    arity: n,
                    atoms: g.carrier.atoms().to_vec(),
                    action: g.generator_tables().to_vec(),
                })
                .collect(),
        };
        serde_json::to_value(j).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        Self::from_json_at(v, "$")
    }

    pub(crate) fn from_json_at(v: &serde_json::Value, at: &str) -> Result<Self> {
        let j: SymSeqJson = crate::error::decode(v, at)?;
        let mut levels: Vec<GObj> = (0..=j.arity_bound).map(|n| GObj::trivial(FinObj::empty(j.mode), n)).collect();
        for l in j.levels {
            if l.arity > j.arity_bound {
                return invalid(format!("level {} above arity bound", l.arity));
            }
            let carrier = FinObj::new(j.mode, l.atoms)?;
            levels[l.arity] = GObj::from_tables(carrier, l.arity, l.action)?;
        }
        Self::new(j.mode, levels)
    }
}
