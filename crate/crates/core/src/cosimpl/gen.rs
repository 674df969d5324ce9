use rand::Rng;

use crate::error::Result;
use crate::kernel::{Elem, FinObj, GObj, Mode, Perm};
use crate::symseq::{SeqMap, SymSeq};

use super::object::{LevelFn, TruncCosimplicial};

/// Order-preserving maps `[k] → [n]` as tuples of atoms.
fn monotone(k: usize, n: usize) -> Vec<Elem> {
    fn rec(len: usize, lo: usize, n: usize, acc: &mut Vec<Elem>, out: &mut Vec<Elem>) {
        if acc.len() == len {
            out.push(Elem::Tuple(acc.clone()));
            return;
        }
        for v in lo..=n {
            acc.push(Elem::Atom(v as u32));
            rec(len, v, n, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(k + 1, 0, n, &mut Vec::new(), &mut out);
    out
}

fn post(e: &Elem, f: impl Fn(u32) -> u32) -> Elem {
    match e {
        Elem::Tuple(v) => Elem::Tuple(
            v.iter()
                .map(|a| match a {
                    Elem::Atom(i) => Elem::Atom(f(*i)),
                    other => other.clone(),
                })
                .collect(),
        ),
        other => other.clone(),
    }
}

/// The simplex `Δᵏ` as a cosimplicial set: degree `n` holds the maps `[k] → [n]`.
pub fn standard_simplex(mode: Mode, k: usize, degree_bound: usize) -> Result<TruncCosimplicial> {
    let atoms = (0..=degree_bound).map(|n| monotone(k, n)).collect();
    let coface = |_: usize, i: usize, e: &Elem| post(e, |v| if v < i as u32 { v } else { v + 1 });
    let codegen = |_: usize, j: usize, e: &Elem| post(e, |v| if v <= j as u32 { v } else { v - 1 });
    TruncCosimplicial::of_sets(mode, atoms, coface, Some(&codegen))
}

/// The constant cosimplicial set on `size` atoms.
pub fn constant_set(mode: Mode, size: usize, degree_bound: usize) -> Result<TruncCosimplicial> {
    let atoms = vec![(0..size as u32).map(Elem::Atom).collect(); degree_bound + 1];
    let id = |_: usize, _: usize, e: &Elem| e.clone();
    TruncCosimplicial::of_sets(mode, atoms, id, Some(&id))
}

/// Disjoint union of cosimplicial sets; atoms of summand `i` are tagged `i`.
pub fn coproduct_sets(parts: &[TruncCosimplicial]) -> Result<TruncCosimplicial> {
    let mode = parts[0].mode;
    let d = parts[0].degree_bound;
    let atoms = (0..=d)
        .map(|n| {
            parts
                .iter()
                .enumerate()
                .flat_map(|(i, x)| {
                    x.levels[n].real_atoms(0).iter().map(move |e| Elem::Tag(i as u32, Box::new(e.clone())))
                })
                .collect()
        })
        .collect();
    let lift = |e: &Elem, f: &dyn Fn(&TruncCosimplicial, &Elem) -> Elem| match e {
        Elem::Tag(i, inner) => match f(&parts[*i as usize], inner) {
            Elem::Base => Elem::Base,
            v => Elem::Tag(*i, Box::new(v)),
        },
        other => other.clone(),
    };
    let coface = |n: usize, i: usize, e: &Elem| lift(e, &|x, a| x.coface(n, i).apply(0, a));
    let with_codegens = parts.iter().all(|x| x.codegens.is_some());
    let codegen = |n: usize, j: usize, e: &Elem| lift(e, &|x, a| x.codegen(n, j).expect("present").apply(0, a));
    TruncCosimplicial::of_sets(mode, atoms, coface, with_codegens.then_some(&codegen as LevelFn<'_>))
}

/// A seeded cosimplicial set: a coproduct of one to three simplices `Δ⁰`, `Δ¹` and constant pieces.
pub fn random_cosimplicial_set(rng: &mut impl Rng, mode: Mode, degree_bound: usize) -> Result<TruncCosimplicial> {
    let count = rng.gen_range(1..=3);
    let mut parts = Vec::with_capacity(count);
    for _ in 0..count {
        let piece = match rng.gen_range(0..3) {
            0 => standard_simplex(mode, 0, degree_bound)?,
            1 => standard_simplex(mode, 1, degree_bound)?,
            _ => constant_set(mode, rng.gen_range(1..=2), degree_bound)?,
        };
        parts.push(piece);
    }
    coproduct_sets(&parts)
}

/// `Σ·Y`: arity `k` at degree `n` holds pairs `(g, y)` with `g ∈ Σ_k` and `y ∈ Y[k]ⁿ`.
///
/// `ys[k - 1]` is the cosimplicial set `Y[k]`; arity zero is empty, so the result is reduced.
pub fn sigma_free(ys: &[TruncCosimplicial]) -> Result<TruncCosimplicial> {
    let Some(first) = ys.first() else {
        return crate::error::invalid("at least one arity");
    };
    let (mode, d) = (first.mode, first.degree_bound);
    if ys.iter().any(|y| y.mode != mode || y.degree_bound != d || y.arity_bound() != 0) {
        return crate::error::invalid("factors must be cosimplicial finite sets of one mode and bound");
    }
    let bound = ys.len();
    let mut levels = Vec::with_capacity(d + 1);
    for n in 0..=d {
        let mut gobjs = vec![GObj::trivial(FinObj::empty(mode), 0)];
        for k in 1..=bound {
            let atoms: Vec<Elem> = Perm::all(k)
                .into_iter()
                .flat_map(|g| {
                    ys[k - 1].levels[n].real_atoms(0).iter().map(move |y| Elem::pair(Elem::Perm(g.clone()), y.clone()))
                })
                .collect();
            let carrier = FinObj::with_atoms(mode, atoms)?;
            gobjs.push(GObj::from_right_action(carrier, k, |e, s| match e {
                Elem::Tuple(v) => {
                    let g = v[0].as_perm().expect("perm");
                    Elem::pair(Elem::Perm(g.compose(s).expect("same degree")), v[1].clone())
                }
                other => other.clone(),
            })?);
        }
        levels.push(SymSeq::new(mode, gobjs)?);
    }
    let lift = |k: usize, e: &Elem, f: &dyn Fn(&TruncCosimplicial, &Elem) -> Elem| match e {
        Elem::Tuple(v) => match f(&ys[k - 1], &v[1]) {
            Elem::Base => Elem::Base,
            y => Elem::pair(v[0].clone(), y),
        },
        other => other.clone(),
    };
    let cofaces = (0..d)
        .map(|n| {
            (0..n + 2)
                .map(|i| SeqMap::from_fn(&levels[n], |k, e| lift(k, e, &|y, a| y.coface(n, i).apply(0, a))))
                .collect()
        })
        .collect();
    let codegens = ys.iter().all(|y| y.codegens.is_some()).then(|| {
        (0..=d)
            .map(|n| {
                (0..n)
                    .map(|j| {
                        SeqMap::from_fn(&levels[n], |k, e| {
                            lift(k, e, &|y, a| y.codegen(n, j).expect("present").apply(0, a))
                        })
                    })
                    .collect()
            })
            .collect()
    });
    TruncCosimplicial::new(d, levels, cofaces, codegens)
}
