use std::collections::HashMap;

use super::circle::{assoc_left, assoc_right, circle, circle_map};
use super::operad::OperadData;
use super::seq::{SeqMap, SymSeq};
use crate::error::{Error, Result};
use crate::kernel::{Elem, FinObj, GObj, UnionFind};

/// A sequence with optional left and right actions of an operad.
#[derive(Clone, Debug)]
pub struct Bimodule {
    pub seq: SymSeq,
    /// `O∘M` and the left action on it.
    pub left: Option<(SymSeq, SeqMap)>,
    /// `M∘O` and the right action on it.
    pub right: Option<(SymSeq, SeqMap)>,
}

impl Bimodule {
    /// Validates that supplied action tables are equivariant maps into `seq`.
    pub fn new(seq: SymSeq, left: Option<(SymSeq, SeqMap)>, right: Option<(SymSeq, SeqMap)>) -> Result<Self> {
        for (src, map) in left.iter().chain(right.iter()) {
            map.check(src, &seq)?;
        }
        Ok(Bimodule { seq, left, right })
    }

    /// The operad acting on itself from both sides.
    pub fn regular(o: &OperadData) -> Bimodule {
        let act = (o.square.clone(), o.mult.clone());
        Bimodule { seq: o.carrier.clone(), left: Some(act.clone()), right: Some(act) }
    }

    /// `τ_n O` with actions through `O → τ_n O`.
    pub fn truncation(o: &OperadData, n: usize) -> Result<Bimodule> {
        let seq = o.carrier.truncate(n)?;
        let bound = o.arity_bound();
        let through = |k: usize, e: &Elem| {
            if k > n {
                Elem::Base
            } else {
                o.mult.apply(k, e)
            }
        };
        let lsrc = circle(&o.carrier, &seq, bound)?;
        let rsrc = circle(&seq, &o.carrier, bound)?;
        let lmap = SeqMap::from_fn(&lsrc, through);
        let rmap = SeqMap::from_fn(&rsrc, through);
        Bimodule::new(seq, Some((lsrc, lmap)), Some((rsrc, rmap)))
    }

    /// Left module over the unit operad: `I∘M → M`.
    pub fn over_unit(seq: SymSeq, unit: &OperadData) -> Result<Bimodule> {
        let bound = seq.arity_bound();
        let lsrc = circle(&unit.carrier, &seq, bound)?;
        let rsrc = circle(&seq, &unit.carrier, bound)?;
        let lmap = SeqMap::from_fn(&lsrc, |k, e| match e {
            Elem::Comp(c) => seq.act(k, &c.inners[0], &c.sigma),
            other => other.clone(),
        });
        let rmap = SeqMap::from_fn(&rsrc, |k, e| match e {
            Elem::Comp(c) => seq.act(k, &c.outer, &c.sigma),
            other => other.clone(),
        });
        Bimodule::new(seq, Some((lsrc, lmap)), Some((rsrc, rmap)))
    }
}

/// A quotient of a cover sequence, with class representatives as atoms.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub seq: SymSeq,
    pub cover: SymSeq,
    /// Per arity: cover atom to its class representative.
    pub class_of: Vec<HashMap<Elem, Elem>>,
}

impl Quotient {
    /// Builds classes from generating identifications on the cover.
    pub fn from_pairs(cover: SymSeq, pairs: Vec<Vec<(Elem, Elem)>>) -> Result<Quotient> {
        let mode = cover.mode();
        let mut levels = Vec::new();
        let mut class_of = Vec::new();
        for (k, g) in cover.levels().iter().enumerate() {
            let c = &g.carrier;
            let mut uf = UnionFind::new(c.len());
            for (a, b) in pairs.get(k).into_iter().flatten() {
                let ia = c.index_of(a).ok_or_else(|| Error::Validation(format!("{a:?} not in cover")))?;
                let ib = c.index_of(b).ok_or_else(|| Error::Validation(format!("{b:?} not in cover")))?;
                uf.union(ia, ib);
            }
            let roots = uf.roots();
            let map: HashMap<Elem, Elem> =
                c.atoms().iter().enumerate().map(|(i, e)| (e.clone(), c.get(roots[i]).clone())).collect();
            let reps: Vec<Elem> = (0..c.len()).filter(|&i| roots[i] == i).map(|i| c.get(i).clone()).collect();
            let carrier = FinObj::new(mode, reps)?;
            let level = GObj::from_right_action(carrier, k, |e, s| {
                map[&g.act_elem(e, s).expect("cover atom").clone()].clone()
            })?;
            levels.push(level);
            class_of.push(map);
        }
        Ok(Quotient { seq: SymSeq::new(mode, levels)?, cover, class_of })
    }

    pub fn class(&self, k: usize, e: &Elem) -> Elem {
        if e.is_base() {
            return Elem::Base;
        }
        self.class_of[k].get(e).cloned().unwrap_or_else(|| panic!("{e:?} not in cover"))
    }
}

/// `M ∘_O N`: the coequalizer of `M∘O∘N ⇉ M∘N`, with inherited outer actions.
pub fn relative_circle(m: &Bimodule, o: &OperadData, n: &Bimodule, bound: usize) -> Result<(Quotient, Bimodule)> {
    let (mo, rho) = m.right.as_ref().ok_or_else(|| Error::Invalid("left factor lacks a right action".into()))?;
    let (on, lam) = n.left.as_ref().ok_or_else(|| Error::Invalid("right factor lacks a left action".into()))?;
    let mo = mo.with_bound(bound);
    let on = on.with_bound(bound);
    let mn = circle(&m.seq, &n.seq, bound)?;
    let mon = circle(&mo, &n.seq, bound)?;
    let id_m = SeqMap::identity(&m.seq);
    let id_n = SeqMap::identity(&n.seq);
    let mut pairs = vec![Vec::new(); bound + 1];
    for (k, slot) in pairs.iter_mut().enumerate() {
        for e in mon.real_atoms(k) {
            let a = circle_map(rho, &id_n, e);
            let b = assoc_right(&m.seq, &o.carrier, &n.seq, &on, e);
            let b = circle_map(&id_m, lam, &b);
            slot.push((a, b));
        }
    }
    let q = Quotient::from_pairs(mn, pairs)?;

    let left = match &m.left {
        Some((om, lam_m)) => {
            let src = circle(&o.carrier, &q.seq, bound)?;
            let om = om.with_bound(bound);
            let map = SeqMap::from_fn(&src, |k, e| {
                let r = assoc_left(&o.carrier, &m.seq, &n.seq, &om, e);
                q.class(k, &circle_map(lam_m, &id_n, &r))
            });
            Some((src, map))
        }
        None => None,
    };
    let right = match &n.right {
        Some((no, rho_n)) => {
            let src = circle(&q.seq, &o.carrier, bound)?;
            let no = no.with_bound(bound);
            let map = SeqMap::from_fn(&src, |k, e| {
                let r = assoc_right(&m.seq, &n.seq, &o.carrier, &no, e);
                q.class(k, &circle_map(&id_m, rho_n, &r))
            });
            Some((src, map))
        }
        None => None,
    };
    let bimod = Bimodule::new(q.seq.clone(), left, right)?;
    Ok((q, bimod))
}
