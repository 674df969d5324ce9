use std::collections::{BTreeMap, HashSet};

use itertools::Itertools;

use super::seq::{SeqMap, SymSeq};
use crate::error::{invalid, Error, Result};
use crate::kernel::{block_sum, block_sum_ids, direct_sum, Comp, Elem, FinObj, GObj, Mode, Perm};

/// Options for composition products.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CircleOpts {
    /// Admit zero entries in orbit types, with outer arity at most this value.
    pub allow_zero: Option<usize>,
}

/// Block data of a canonicalizing group element `h = block_sum(outer; inners)`.
struct BlockMove {
    outer: Perm,
    inners: Vec<Perm>,
}

/// Greedy choice of `g ∈ H(sizes)` making `g∘σ` lexicographically least.
/// Returns `g⁻¹` in block form together with `g∘σ`.
fn least_in_coset(sizes: &[usize], sigma: &Perm) -> (BlockMove, Perm) {
    let n = sizes.len();
    let mut off = Vec::with_capacity(n);
    let mut block_of = Vec::with_capacity(sigma.degree());
    let mut acc = 0;
    for (b, &s) in sizes.iter().enumerate() {
        off.push(acc);
        block_of.extend(std::iter::repeat_n(b, s));
        acc += s;
    }
    let mut target: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; n];
    let mut next_off = vec![0usize; n];
    let mut inner_maps: Vec<Vec<usize>> = sizes.iter().map(|&s| vec![usize::MAX; s]).collect();
    for m in 0..sigma.degree() {
        let v = sigma.image(m);
        let b = block_of[v];
        let c = match target[b] {
            Some(c) => c,
            None => {
                let c = (0..n).find(|&c| !used[c] && sizes[c] == sizes[b]).expect("free block");
                used[c] = true;
                target[b] = Some(c);
                c
            }
        };
        inner_maps[b][v - off[b]] = next_off[c];
        next_off[c] += 1;
    }
    for b in 0..n {
        if target[b].is_none() {
            let c = (0..n).find(|&c| !used[c] && sizes[c] == sizes[b]).expect("free block");
            used[c] = true;
            target[b] = Some(c);
        }
    }
    let g_outer = Perm::from_images(target.into_iter().map(|c| c.unwrap()).collect()).expect("bijective");
    let g_inners: Vec<Perm> = inner_maps.into_iter().map(|m| Perm::from_images(m).expect("bijective")).collect();
    let g = block_sum(&g_outer, &g_inners).expect("consistent");
    let new_sigma = g.compose(sigma).expect("same degree");
    let h_outer = g_outer.inverse();
    let h_inners = (0..n).map(|i| g_inners[h_outer.image(i)].inverse()).collect();
    (BlockMove { outer: h_outer, inners: h_inners }, new_sigma)
}

/// True when `σ` is the least element of its coset `H(sizes)·σ`.
pub fn is_coset_least(sizes: &[usize], sigma: &Perm) -> bool {
    least_in_coset(sizes, sigma).1 == *sigma
}

/// Least representatives of `H(sizes)\Σ_k`, in lexicographic order.
pub fn coset_representatives(sizes: &[usize]) -> Vec<Perm> {
    let k = sizes.iter().sum();
    Perm::all(k).into_iter().filter(|s| is_coset_least(sizes, s)).collect()
}

/// Canonical form of the formal composite `γ(outer; inners)·sigma` in `X∘Y`.
///
/// Orbit types are sorted descending and `sigma` is least in its
/// `H`-coset; ties between zero-arity blocks are broken by atom order.
pub fn normalize(x: &SymSeq, y: &SymSeq, outer: Elem, inners: Vec<Elem>, arities: Vec<usize>, sigma: Perm) -> Elem {
    if outer.is_base() || inners.iter().any(Elem::is_base) {
        return Elem::Base;
    }
    let n = inners.len();
    let order: Vec<usize> = (0..n).sorted_by(|&a, &b| arities[b].cmp(&arities[a])).collect();
    let (outer, inners, arities, sigma) = if order.iter().enumerate().all(|(i, &j)| i == j) {
        (outer, inners, arities, sigma)
    } else {
        let pi = Perm::from_images(order.clone()).expect("sort order");
        let new_ar: Vec<usize> = order.iter().map(|&j| arities[j]).collect();
        let b = block_sum_ids(&pi, &new_ar);
        let new_outer = x.act(n, &outer, &pi);
        let new_inners = order.iter().map(|&j| inners[j].clone()).collect();
        (new_outer, new_inners, new_ar, b.inverse().compose(&sigma).expect("same degree"))
    };
    let (h, sigma) = least_in_coset(&arities, &sigma);
    let outer = x.act(n, &outer, &h.outer);
    let mut inners: Vec<Elem> = (0..n)
        .map(|i| {
            let j = h.outer.image(i);
            y.act(arities[i], &inners[j], &h.inners[i])
        })
        .collect();
    let zero_start = arities.iter().position(|&a| a == 0).unwrap_or(n);
    let mut outer = outer;
    if n - zero_start >= 2 {
        let zeros = n - zero_start;
        let mut best: Option<(Elem, Vec<Elem>)> = None;
        for rho in Perm::all(zeros) {
            let mut full: Vec<usize> = (0..zero_start).collect();
            full.extend((0..zeros).map(|i| zero_start + rho.image(i)));
            let p = Perm::from_images(full).expect("extension");
            let cand_outer = x.act(n, &outer, &p);
            let cand_inners: Vec<Elem> = (0..n).map(|i| inners[p.image(i)].clone()).collect();
            let cand = (cand_outer, cand_inners);
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
        let (o, i) = best.expect("nonempty");
        outer = o;
        inners = i;
    }
    Elem::comp(outer, inners, arities, sigma)
}

/// Right action of `g ∈ Σ_k` on a canonical element of `(X∘Y)[k]`.
pub fn act_circle(x: &SymSeq, y: &SymSeq, e: &Elem, g: &Perm) -> Elem {
    match e {
        Elem::Comp(c) => normalize(
            x,
            y,
            c.outer.clone(),
            c.inners.clone(),
            c.arities.clone(),
            c.sigma.compose(g).expect("same degree"),
        ),
        other => other.clone(),
    }
}

/// Descending sequences of `n` entries summing to `k`, each at most `max`,
/// positive unless `zero` is set.
pub fn orbit_types(n: usize, k: usize, max: usize, zero: bool) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, cap: usize, lo: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            if k == 0 {
                out.push(acc.clone());
            }
            return;
        }
        for v in (lo..=cap.min(k)).rev() {
            if v * n < k {
                break;
            }
            acc.push(v);
            rec(n - 1, k - v, v, lo, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, max, usize::from(!zero), &mut Vec::new(), &mut out);
    out
}

fn check_modes(x: &SymSeq, y: &SymSeq) -> Result<()> {
    if x.mode() != y.mode() {
        return Err(Error::ModeMismatch);
    }
    Ok(())
}

fn outer_lengths(x: &SymSeq, k: usize, opts: CircleOpts) -> Vec<usize> {
    let max_n = match opts.allow_zero {
        Some(m) => m.min(x.arity_bound()),
        None => x.arity_bound().min(k),
    };
    (0..=max_n).collect()
}

/// Canonical elements of the component of `(X∘Y)[k]` with a fixed orbit type.
pub fn circle_component(x: &SymSeq, y: &SymSeq, ty: &[usize], reps: &[Perm]) -> Vec<Elem> {
    let n = ty.len();
    let mut out = Vec::new();
    let inner_choices: Vec<&[Elem]> = ty.iter().map(|&k| y.real_atoms(k)).collect();
    let zeros = ty.iter().filter(|&&a| a == 0).count();
    let mut seen = HashSet::new();
    for sigma in reps {
        for xe in x.real_atoms(n) {
            for ys in inner_choices.iter().map(|v| v.iter()).multi_cartesian_product() {
                let inners: Vec<Elem> = ys.into_iter().cloned().collect();
                let e = if zeros >= 2 {
                    let e = normalize(x, y, xe.clone(), inners, ty.to_vec(), sigma.clone());
                    if !seen.insert(e.clone()) {
                        continue;
                    }
                    e
                } else {
                    Elem::comp(xe.clone(), inners, ty.to_vec(), sigma.clone())
                };
                out.push(e);
            }
        }
    }
    out
}

/// The composition product `X∘Y` up to arity `bound`.
pub fn circle(x: &SymSeq, y: &SymSeq, bound: usize) -> Result<SymSeq> {
    circle_with(x, y, bound, CircleOpts::default())
}

pub fn circle_with(x: &SymSeq, y: &SymSeq, bound: usize, opts: CircleOpts) -> Result<SymSeq> {
    check_modes(x, y)?;
    if !y.is_reduced() && opts.allow_zero.is_none() {
        return invalid("non-reduced right factor needs an explicit outer length bound");
    }
    let mode = x.mode();
    let mut levels = Vec::with_capacity(bound + 1);
    let mut rep_cache: BTreeMap<Vec<usize>, Vec<Perm>> = BTreeMap::new();
    for k in 0..=bound {
        let mut atoms = Vec::new();
        for n in outer_lengths(x, k, opts) {
            if x.real_atoms(n).is_empty() {
                continue;
            }
            for ty in orbit_types(n, k, y.arity_bound(), opts.allow_zero.is_some()) {
                let reps = rep_cache.entry(ty.clone()).or_insert_with(|| coset_representatives(&ty));
                atoms.extend(circle_component(x, y, &ty, reps));
            }
        }
        let carrier = FinObj::with_atoms(mode, atoms)?;
        levels.push(GObj::from_right_action(carrier, k, |e, g| act_circle(x, y, e, g))?);
    }
    SymSeq::new(mode, levels)
}

/// Components of the nonsymmetric product, keyed by arity then orbit type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HatFamily {
    pub mode: Mode,
    pub levels: Vec<BTreeMap<Vec<usize>, FinObj>>,
}

impl HatFamily {
    pub fn len_at(&self, k: usize) -> usize {
        self.levels.get(k).map_or(0, |m| m.values().map(FinObj::real_len).sum())
    }

    /// All components at each arity merged, with trivial actions.
    pub fn to_seq(&self) -> SymSeq {
        let atoms = self
            .levels
            .iter()
            .map(|m| {
                m.iter()
                    .flat_map(|(ty, o)| {
                        o.real_atoms().iter().map(move |e| {
                            Elem::pair(Elem::Tuple(ty.iter().map(|&v| Elem::Atom(v as u32)).collect()), e.clone())
                        })
                    })
                    .collect()
            })
            .collect();
        SymSeq::trivial(self.mode, atoms).expect("distinct atoms")
    }
}

/// The nonsymmetric product: `∐ X[n] ⊗ Y[k_1] ⊗ .. ⊗ Y[k_n]` over orbit types, unquotiented.
pub fn circle_hat(x: &SymSeq, y: &SymSeq, bound: usize) -> Result<HatFamily> {
    check_modes(x, y)?;
    if !y.is_reduced() {
        return invalid("non-reduced right factor");
    }
    let mut levels = Vec::with_capacity(bound + 1);
    for k in 0..=bound {
        let mut comps = BTreeMap::new();
        for n in 0..=x.arity_bound().min(k) {
            for ty in orbit_types(n, k, y.arity_bound(), false) {
                let mut atoms = Vec::new();
                let choices: Vec<&[Elem]> = ty.iter().map(|&a| y.real_atoms(a)).collect();
                for xe in x.real_atoms(n) {
                    for ys in choices.iter().map(|v| v.iter()).multi_cartesian_product() {
                        let mut t = vec![xe.clone()];
                        t.extend(ys.into_iter().cloned());
                        atoms.push(Elem::Tuple(t));
                    }
                }
                if !atoms.is_empty() {
                    comps.insert(ty, FinObj::with_atoms(x.mode(), atoms)?);
                }
            }
        }
        levels.push(comps);
    }
    Ok(HatFamily { mode: x.mode(), levels })
}

/// `(X∘Y)∘Z → X∘(Y∘Z)` on canonical elements.
pub fn assoc_right(x: &SymSeq, y: &SymSeq, z: &SymSeq, yz: &SymSeq, e: &Elem) -> Elem {
    let Elem::Comp(c) = e else { return e.clone() };
    let Elem::Comp(u) = &c.outer else {
        return Elem::Base;
    };
    let m = u.sigma.degree();
    let inv = u.sigma.inverse();
    // z'_j = z_{σ⁻¹(j)}: inputs re-indexed along the planar composite γ(x; y).
    let zs: Vec<(&Elem, usize)> = (0..m).map(|j| (&c.inners[inv.image(j)], c.arities[inv.image(j)])).collect();
    let mut cursor = 0;
    let mut new_inners = Vec::with_capacity(u.inners.len());
    let mut new_ar = Vec::with_capacity(u.inners.len());
    for (yi, &ki) in u.inners.iter().zip(&u.arities) {
        let block = &zs[cursor..cursor + ki];
        cursor += ki;
        let total: usize = block.iter().map(|b| b.1).sum();
        let inner = normalize(
            y,
            z,
            yi.clone(),
            block.iter().map(|b| b.0.clone()).collect(),
            block.iter().map(|b| b.1).collect(),
            Perm::identity(total),
        );
        new_inners.push(inner);
        new_ar.push(total);
    }
    let zar: Vec<usize> = c.arities.clone();
    let sigma = block_sum_ids(&u.sigma, &zar).compose(&c.sigma).expect("same degree");
    normalize(x, yz, u.outer.clone(), new_inners, new_ar, sigma)
}

/// `X∘(Y∘Z) → (X∘Y)∘Z` on canonical elements.
pub fn assoc_left(x: &SymSeq, y: &SymSeq, z: &SymSeq, xy: &SymSeq, e: &Elem) -> Elem {
    let Elem::Comp(c) = e else { return e.clone() };
    let mut ys = Vec::new();
    let mut yar = Vec::new();
    let mut zs = Vec::new();
    let mut zar = Vec::new();
    let mut inner_sigmas = Vec::new();
    for inner in &c.inners {
        let Elem::Comp(v) = inner else {
            return Elem::Base;
        };
        ys.push(v.outer.clone());
        yar.push(v.inners.len());
        zs.extend(v.inners.iter().cloned());
        zar.extend(v.arities.iter().copied());
        inner_sigmas.push(v.sigma.clone());
    }
    let m: usize = yar.iter().sum();
    let u = normalize(x, y, c.outer.clone(), ys, yar, Perm::identity(m));
    let sigma = direct_sum(&inner_sigmas).compose(&c.sigma).expect("same degree");
    normalize(xy, z, u, zs, zar, sigma)
}

/// Applies `f` at outer position and `g` at inner positions, keeping canonical form.
pub fn circle_map(f: &SeqMap, g: &SeqMap, e: &Elem) -> Elem {
    match e {
        Elem::Comp(c) => {
            let outer = f.apply(c.inners.len(), &c.outer);
            let inners: Vec<Elem> = c.inners.iter().zip(&c.arities).map(|(y, &k)| g.apply(k, y)).collect();
            if outer.is_base() || inners.iter().any(Elem::is_base) {
                return Elem::Base;
            }
            Elem::Comp(Box::new(Comp { sigma: c.sigma.clone(), arities: c.arities.clone(), outer, inners }))
        }
        other => other.clone(),
    }
}

/// The bijection `X∘I → X`.
pub fn right_unit_map(x: &SymSeq, xi: &SymSeq) -> SeqMap {
    SeqMap::from_fn(xi, |k, e| match e {
        Elem::Comp(c) => x.act(k, &c.outer, &c.sigma),
        other => other.clone(),
    })
}

/// The bijection `I∘X → X`.
pub fn left_unit_map(x: &SymSeq, ix: &SymSeq) -> SeqMap {
    SeqMap::from_fn(ix, |k, e| match e {
        Elem::Comp(c) => x.act(k, &c.inners[0], &c.sigma),
        other => other.clone(),
    })
}

/// The inclusion `X → X∘I`.
pub fn right_unit_inverse(x: &SymSeq, unit: &SymSeq) -> SeqMap {
    SeqMap::from_fn(x, |k, e| {
        if e.is_base() {
            return Elem::Base;
        }
        normalize(x, unit, e.clone(), vec![Elem::point(); k], vec![1; k], Perm::identity(k))
    })
}
