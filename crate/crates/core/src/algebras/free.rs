//! Free operads on a symmetric sequence, truncated by tree height.

use std::collections::BTreeSet;

use super::classical::operad_to_oper_algebra;
use super::structure::AlgebraStructure;
use crate::error::{invalid, Error, Result};
use crate::kernel::{Elem, FinObj, GObj, Mode, Perm};
use crate::symseq::{OperadData, SymSeq};

const NODE_TAG: u32 = 0xF7EE;

/// A leaf carrying its label.
pub fn leaf(label: usize) -> Elem {
    Elem::Atom(label as u32)
}

/// A vertex decorated by `x` with the given children, left to right.
pub fn node(x: Elem, children: Vec<Elem>) -> Elem {
    Elem::Tag(NODE_TAG, Box::new(Elem::Tuple(vec![x, Elem::Tuple(children)])))
}

fn parts(t: &Elem) -> Option<(&Elem, &[Elem])> {
    match t {
        Elem::Tag(NODE_TAG, inner) => match inner.as_ref() {
            Elem::Tuple(v) if v.len() == 2 => match &v[1] {
                Elem::Tuple(ch) => Some((&v[0], ch.as_slice())),
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}

/// Number of leaves.
pub fn term_arity(t: &Elem) -> usize {
    match parts(t) {
        Some((_, ch)) => ch.iter().map(term_arity).sum(),
        None => 1,
    }
}

/// Longest path from the root to a leaf, counted in vertices.
pub fn term_height(t: &Elem) -> usize {
    match parts(t) {
        Some((_, ch)) => 1 + ch.iter().map(term_height).max().unwrap_or(0),
        None => 0,
    }
}

fn relabel(t: &Elem, f: &impl Fn(usize) -> usize) -> Elem {
    match parts(t) {
        Some((x, ch)) => node(x.clone(), ch.iter().map(|c| relabel(c, f)).collect()),
        None => match t {
            Elem::Atom(i) => leaf(f(*i as usize)),
            other => other.clone(),
        },
    }
}

/// `t·g`: the leaf labelled `g(i)` is relabelled `i`.
pub fn term_act(t: &Elem, g: &Perm) -> Elem {
    let inv = g.inverse();
    relabel(t, &|i| inv.image(i))
}

/// Chooses, at every vertex, the least pair of decoration and child list over
/// the reorderings `node(x, c) ~ node(x·π, c∘π)`.
pub fn canon(x: &SymSeq, t: &Elem) -> Elem {
    let Some((d, ch)) = parts(t) else {
        return t.clone();
    };
    let ch: Vec<Elem> = ch.iter().map(|c| canon(x, c)).collect();
    let n = ch.len();
    let mut best: Option<(Elem, Vec<Elem>)> = None;
    for pi in Perm::all(n) {
        let cand = (x.act(n, d, &pi), (0..n).map(|i| ch[pi.image(i)].clone()).collect::<Vec<_>>());
        if best.as_ref().is_none_or(|b| cand < *b) {
            best = Some(cand);
        }
    }
    let (d, ch) = best.expect("at least the identity");
    node(d, ch)
}

/// Substitutes `ys[i]` for leaf `i` of `t`, shifting labels by the arities before it.
pub fn substitute(t: &Elem, ys: &[Elem]) -> Elem {
    let mut offsets = Vec::with_capacity(ys.len());
    let mut acc = 0;
    for y in ys {
        offsets.push(acc);
        acc += term_arity(y);
    }
    fn go(t: &Elem, ys: &[Elem], offsets: &[usize]) -> Elem {
        match parts(t) {
            Some((x, ch)) => node(x.clone(), ch.iter().map(|c| go(c, ys, offsets)).collect()),
            None => match t {
                Elem::Atom(i) => {
                    let i = *i as usize;
                    relabel(&ys[i], &|l| l + offsets[i])
                }
                other => other.clone(),
            },
        }
    }
    go(t, ys, &offsets)
}

/// The generator `x ∈ X[n]` as the corolla with leaves in order.
pub fn generator(x: &Elem, n: usize) -> Elem {
    node(x.clone(), (0..n).map(leaf).collect())
}

/// Canonical terms of height at most `height` and arity at most `max_weight`, by arity.
pub fn free_terms(x: &SymSeq, height: usize, max_weight: usize) -> Vec<BTreeSet<Elem>> {
    let mut by_arity: Vec<BTreeSet<Elem>> = vec![BTreeSet::new(); max_weight + 1];
    if max_weight >= 1 {
        by_arity[1].insert(leaf(0));
    }
    for _ in 0..height {
        let prev = by_arity.clone();
        for n in 1..=max_weight.min(x.arity_bound()) {
            for d in x.real_atoms(n) {
                let mut acc: Vec<(Vec<Elem>, usize)> = vec![(Vec::new(), 0)];
                for _ in 0..n {
                    acc = acc
                        .into_iter()
                        .flat_map(|(pre, w)| {
                            let prev = &prev;
                            (1..=max_weight - w).flat_map(move |a| {
                                let pre = pre.clone();
                                prev[a].iter().map(move |c| {
                                    let mut v = pre.clone();
                                    v.push(c.clone());
                                    (v, w + a)
                                })
                            })
                        })
                        .collect();
                }
                for (children, w) in acc {
                    let t = substitute(&generator(d, n), &children);
                    for g in Perm::all(w) {
                        by_arity[w].insert(canon(x, &term_act(&t, &g)));
                    }
                }
            }
        }
    }
    by_arity
}

/// The free operad on `x` with every term of height above `height` sent to the basepoint.
pub fn free_operad(x: &SymSeq, height: usize, max_weight: usize) -> Result<OperadData> {
    if x.mode() != Mode::Pointed {
        return Err(Error::ModeMismatch);
    }
    if !x.is_reduced() {
        return invalid("the generating sequence must be reduced");
    }
    let terms = free_terms(x, height, max_weight);
    let levels = terms
        .iter()
        .enumerate()
        .map(|(n, set)| {
            let carrier = FinObj::with_atoms(Mode::Pointed, set.iter().cloned().collect())?;
            GObj::from_right_action(carrier, n, |t, g| if t.is_base() { Elem::Base } else { canon(x, &term_act(t, g)) })
        })
        .collect::<Result<Vec<_>>>()?;
    let carrier = SymSeq::new(Mode::Pointed, levels)?;
    OperadData::from_composition(carrier, leaf(0), |t, ys| {
        let s = substitute(t, ys);
        if term_height(&s) > height || term_arity(&s) > max_weight {
            Elem::Base
        } else {
            canon(x, &s)
        }
    })
}

/// `𝖮𝗉𝖾𝗋⊙_Σ(X)` cut at `height` levels: structure maps graft the decorating terms along the tree.
pub fn free_algebra(x: &SymSeq, height: usize, max_weight: usize) -> Result<AlgebraStructure> {
    operad_to_oper_algebra(&free_operad(x, height, max_weight)?, height.max(2))
}
