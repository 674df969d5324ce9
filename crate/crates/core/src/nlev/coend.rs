//! Coendomorphism leveled operads of `Σ`-free cosimplicial symmetric sequences,
//! over the restricted simplex category truncated at a degree bound.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::flat::{graft, slot_order, Flat};
use super::object::{Key, NLevObject};
use super::odot::{assoc_forward, left_unit_inverse, odot, odot_elems, right_unit_inverse, Bounds, OdotElem};
use crate::cosimpl::{boxcirc, sigma_free, sigma_free_factor, BoxProduct, TruncCosimplicial};
use crate::error::{invalid, Error, Result};
use crate::kernel::{block_sum, Comp, Elem, FinObj, Mode, Perm, UnionFind};
use crate::profiles::{enumerate_profiles, Profile};
use crate::symseq::{normalize, Report, SymSeq};

/// An element of a box power of `Σ·Y` split into a planar tree and vertex labels.
///
/// Level `j` of the tree carries `chunks[j]` cosimplicial degrees, and
/// `labels[j][m] ∈ Y` decorates its planar vertex `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    pub flat: Flat,
    pub chunks: Vec<usize>,
    pub labels: Vec<Vec<Elem>>,
}

/// The maps at one key, each encoded as the tuple, per degree, of the images of
/// the orbit representatives `(id, y)`.
#[derive(Clone, Debug, Default)]
pub struct CoEndKey {
    pub maps: Vec<Elem>,
    index: HashMap<Elem, u32>,
}

impl CoEndKey {
    fn new(maps: Vec<Elem>) -> Self {
        let index = maps.iter().enumerate().map(|(i, m)| (m.clone(), i as u32)).collect();
        CoEndKey { maps, index }
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn index_of(&self, map: &Elem) -> Option<usize> {
        self.index.get(map).map(|&i| i as usize)
    }
}

/// Box-product classes by arity: representative to members.
type Members = Vec<HashMap<Elem, Vec<Elem>>>;

/// `coEnd(Σ·Y)` at levels `≤ max_level`, weights `≤ max_weight` and degrees `≤ degree_bound`.
#[derive(Clone, Debug)]
pub struct CoEnd {
    mode: Mode,
    max_level: usize,
    max_weight: usize,
    degree_bound: usize,
    factors: Vec<TruncCosimplicial>,
    unit: TruncCosimplicial,
    powers: Vec<TruncCosimplicial>,
    boxes: Vec<BoxProduct>,
    members: Vec<Vec<Members>>,
    rep_index: Vec<Vec<HashMap<Elem, usize>>>,
    targets: BTreeMap<(usize, usize, usize), BTreeMap<Profile, Vec<Elem>>>,
    keys: BTreeMap<Key, CoEndKey>,
}

/// Comparison of `coEnd₃(p)` with `coEnd₂(n,(kᵢ);k) ⊗_{Σ_k} coEnd₂(k,(tⱼ);t)`.
#[derive(Clone, Debug)]
pub struct Quadratic {
    pub profile: Profile,
    /// `|coEnd₃(p;t)|`.
    pub direct: usize,
    /// Number of pairs before the `Σ_k` quotient.
    pub pairs: usize,
    /// Number of `Σ_k`-classes of pairs.
    pub tensor: usize,
    /// Composition of pairs: lands in `coEnd₃`, constant on classes, injective and surjective.
    pub report: Report,
}

fn label(e: &Elem) -> Result<(Perm, Elem)> {
    match e {
        Elem::Tuple(v) if v.len() == 2 => match &v[0] {
            Elem::Perm(g) => Ok((g.clone(), v[1].clone())),
            _ => invalid("a vertex of Σ·Y is a pair (g, y)"),
        },
        _ => invalid("a vertex of Σ·Y is a pair (g, y)"),
    }
}

fn tag(p: usize, e: Elem) -> Elem {
    if e.is_base() {
        Elem::Base
    } else {
        Elem::Tag(p as u32, Box::new(e))
    }
}

/// `coEnd` of a `Σ`-free input, re-presented as `Σ·Y` on its stable orbit representatives.
///
/// Fails with a certificate when no `Σ·Y` factorization exists.
pub fn coend_operad(x: &TruncCosimplicial, max_level: usize, max_weight: usize, degree_bound: usize) -> Result<CoEnd> {
    let x = x.truncate_degree(degree_bound)?.restricted();
    if x.levels.iter().any(|l| !l.real_atoms(0).is_empty()) {
        return invalid("arity zero must be empty");
    }
    let reps = sigma_free_factor(&x)?;
    let factors = (1..=max_weight)
        .map(|k| {
            let atoms = reps.iter().map(|r| r.get(k).cloned().unwrap_or_default()).collect();
            TruncCosimplicial::of_sets(x.mode, atoms, |n, i, e| x.coface(n, i).apply(k, e), None)
        })
        .collect::<Result<Vec<_>>>()?;
    CoEnd::from_factors(&factors, max_level, max_weight)
}

impl CoEnd {
    /// `coEnd(Σ·Y)` with `factors[k - 1] = Y[k]`.
    pub fn from_factors(factors: &[TruncCosimplicial], max_level: usize, max_weight: usize) -> Result<Self> {
        if max_weight == 0 || factors.len() < max_weight {
            return Err(Error::Bound(format!("{} factors for weight bound {max_weight}", factors.len())));
        }
        let factors: Vec<TruncCosimplicial> = factors[..max_weight].iter().map(TruncCosimplicial::restricted).collect();
        let x = sigma_free(&factors)?;
        let (mode, d) = (x.mode, x.degree_bound);
        let mut powers = vec![x.clone()];
        let mut boxes = Vec::new();
        for _ in 2..=max_level {
            let b = boxcirc(powers.last().expect("nonempty"), &x, max_weight)?;
            powers.push(b.result.clone());
            boxes.push(b);
        }
        let members = boxes.iter().map(|b| (0..=d).map(|m| b.members(m)).collect()).collect();
        let rep_index = factors
            .iter()
            .map(|y| {
                y.levels
                    .iter()
                    .map(|l| l.real_atoms(0).iter().enumerate().map(|(i, a)| (a.clone(), i)).collect())
                    .collect()
            })
            .collect();
        let mut co = CoEnd {
            mode,
            max_level,
            max_weight,
            degree_bound: d,
            factors,
            unit: TruncCosimplicial::constant(&SymSeq::unit(mode, 1), d, false),
            powers,
            boxes,
            members,
            rep_index,
            targets: BTreeMap::new(),
            keys: BTreeMap::new(),
        };
        for level in 1..=max_level {
            for t in 1..=max_weight {
                for m in 0..=d {
                    let mut by_profile: BTreeMap<Profile, Vec<Elem>> = BTreeMap::new();
                    for e in co.power(level).levels[m].real_atoms(t) {
                        let p = co.split(level, m, e)?.flat.profile();
                        by_profile.entry(p).or_default().push(e.clone());
                    }
                    co.targets.insert((level, t, m), by_profile);
                }
            }
        }
        co.keys.insert((0, Profile::empty()), CoEndKey::new(co.enumerate(0, &Profile::empty())?));
        for level in 1..=max_level {
            for t in 1..=max_weight {
                for p in enumerate_profiles(level, t, true, None)? {
                    let maps = co.enumerate(level, &p)?;
                    if !maps.is_empty() {
                        co.keys.insert((level, p), CoEndKey::new(maps));
                    }
                }
            }
        }
        Ok(co)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn max_level(&self) -> usize {
        self.max_level
    }

    pub fn max_weight(&self) -> usize {
        self.max_weight
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    /// `Y[k]`.
    pub fn factor(&self, k: usize) -> &TruncCosimplicial {
        &self.factors[k - 1]
    }

    /// `Σ·Y`.
    pub fn source(&self) -> &TruncCosimplicial {
        &self.powers[0]
    }

    /// `(Σ·Y)^{∘̊ℓ}` expanded from the left; the unit at `ℓ = 0`.
    pub fn power(&self, level: usize) -> &TruncCosimplicial {
        match level {
            0 => &self.unit,
            l => &self.powers[l - 1],
        }
    }

    pub fn key(&self, level: usize, p: &Profile) -> Option<&CoEndKey> {
        self.keys.get(&(level, p.clone()))
    }

    pub fn keys(&self) -> impl Iterator<Item = (&Key, &CoEndKey)> {
        self.keys.iter()
    }

    /// Atoms of `(Σ·Y)^{∘̊ℓ}[p]` at degree `m`.
    pub fn component(&self, level: usize, p: &Profile, m: usize) -> &[Elem] {
        self.targets.get(&(level, p.weight(), m)).and_then(|t| t.get(p)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// The leveled object of all maps.
    pub fn object(&self) -> Result<NLevObject> {
        let mut o = NLevObject::empty(self.mode);
        for ((l, p), k) in &self.keys {
            o.insert(*l, p.clone(), FinObj::with_atoms(self.mode, k.maps.clone())?)?;
        }
        Ok(o)
    }

    /// Splits an atom of `(Σ·Y)^{∘̊ℓ}` at degree `m`: vertex permutations are pushed to the leaves.
    pub fn split(&self, level: usize, m: usize, e: &Elem) -> Result<Tree> {
        if level == 1 {
            let (g, y) = label(e)?;
            return Ok(Tree { flat: Flat::corolla(g), chunks: vec![m], labels: vec![vec![y]] });
        }
        let Elem::Tag(a, c) = e else {
            return invalid("not an atom of a box power");
        };
        let a = *a as usize;
        let Some(c) = c.as_comp() else {
            return invalid("not an atom of a box power");
        };
        let head = self.split(level - 1, a, &c.outer)?;
        Self::extend(head, c, m - a)
    }

    fn extend(head: Tree, c: &Comp, chunk: usize) -> Result<Tree> {
        let (gs, ys): (Vec<Perm>, Vec<Elem>) =
            c.inners.iter().map(label).collect::<Result<Vec<_>>>()?.into_iter().unzip();
        let inv = head.flat.lambda.inverse();
        let n = c.arities.len();
        let last: Vec<usize> = (0..n).map(|i| c.arities[inv.image(i)]).collect();
        let labels: Vec<Elem> = (0..n).map(|i| ys[inv.image(i)].clone()).collect();
        let lambda = block_sum(&head.flat.lambda, &gs)?.compose(&c.sigma)?;
        let mut levels = head.flat.levels;
        levels.push(last);
        let mut chunks = head.chunks;
        chunks.push(chunk);
        let mut all = head.labels;
        all.push(labels);
        Ok(Tree { flat: Flat::new(levels, lambda)?, chunks, labels: all })
    }

    /// Every split of every cover member of a class, recursively.
    pub fn splits(&self, level: usize, m: usize, t: usize, e: &Elem) -> Result<Vec<Tree>> {
        if level == 1 {
            return Ok(vec![self.split(1, m, e)?]);
        }
        let members = self.members[level - 2][m].get(t).and_then(|mm| mm.get(e));
        let mut out = Vec::new();
        for member in members.into_iter().flatten() {
            let Elem::Tag(a, c) = member else { continue };
            let a = *a as usize;
            let Some(c) = c.as_comp() else { continue };
            for head in self.splits(level - 1, a, c.arities.len(), &c.outer)? {
                out.push(Self::extend(head, c, m - a)?);
            }
        }
        if out.is_empty() {
            return Err(Error::Validation(format!("no cover member for a class at degree {m}")));
        }
        Ok(out)
    }

    /// The class of a tree; see [`CoEnd::build_padded`].
    pub fn build(&self, tree: &Tree) -> Result<Elem> {
        self.build_padded(tree, &vec![0; tree.flat.depth() + 1])
    }

    /// The class of a tree whose levels are interleaved with unit levels: `pads[r]` degrees
    /// sit before level `r`, and `pads[depth]` after the last level.
    ///
    /// A unit level is absorbed by the last coface of the part above it, or by `d⁰` when
    /// nothing lies above it.
    pub fn build_padded(&self, tree: &Tree, pads: &[usize]) -> Result<Elem> {
        let f = &tree.flat;
        let depth = f.depth();
        if depth == 0 {
            return Ok(Elem::point());
        }
        let root = f.levels[0][0];
        let outer_lambda = if depth == 1 { f.lambda.clone() } else { Perm::identity(root) };
        let mut u = Elem::pair(Elem::Perm(outer_lambda), tree.labels[0][0].clone());
        let mut a = tree.chunks[0];
        for (r, &pad) in pads.iter().enumerate().take(depth).skip(1) {
            if pad > 0 {
                u = self.pad_last(r, a, root_weight(f, r - 1), &u, pad);
                a += pad;
            }
            if u.is_base() {
                return Ok(Elem::Base);
            }
            let arities = f.levels[r].clone();
            let t: usize = arities.iter().sum();
            let sigma = if r + 1 == depth { f.lambda.clone() } else { Perm::identity(t) };
            let chunk = tree.chunks[r];
            let inners = arities
                .iter()
                .zip(&tree.labels[r])
                .map(|(&k, y)| Elem::pair(Elem::Perm(Perm::identity(k)), y.clone()))
                .collect();
            let e = normalize(&self.power(r).levels[a], &self.source().levels[chunk], u, inners, arities, sigma);
            u = self.boxes[r - 1].class(a + chunk, t, &tag(a, e));
            a += chunk;
        }
        let t = f.weight();
        if pads[depth] > 0 {
            u = self.pad_last(depth, a, t, &u, pads[depth]);
            a += pads[depth];
        }
        for s in 0..pads[0] {
            u = self.power(depth).coface(a + s, 0).apply(t, &u);
        }
        Ok(u)
    }

    fn pad_last(&self, level: usize, a: usize, t: usize, u: &Elem, b: usize) -> Elem {
        let mut u = u.clone();
        for s in 0..b {
            u = self.power(level).coface(a + s, a + s + 1).apply(t, &u);
        }
        u
    }

    /// Image of the representative `(id, y)` under a map at weight `t`.
    pub fn image(&self, t: usize, m: usize, map: &Elem, y: &Elem) -> Result<Elem> {
        if map.is_base() {
            return Ok(Elem::Base);
        }
        let i =
            self.rep_index[t - 1][m].get(y).ok_or_else(|| Error::Invalid(format!("not in Y[{t}] at degree {m}")))?;
        match map {
            Elem::Tuple(per) => match per.get(m) {
                Some(Elem::Tuple(v)) => v.get(*i).cloned().ok_or_else(|| Error::Invalid("short image table".into())),
                _ => invalid("map table has no such degree"),
            },
            _ => invalid("not a map table"),
        }
    }

    /// Overwrites map `index` at a key, for fault injection.
    pub fn corrupt(&mut self, level: usize, p: &Profile, index: usize, value: Elem) {
        if let Some(k) = self.keys.get_mut(&(level, p.clone())) {
            let mut maps = std::mem::take(&mut k.maps);
            maps[index] = value;
            *k = CoEndKey::new(maps);
        }
    }

    /// A map evaluated on any atom `(g, y)` of `(Σ·Y)[t]`: `ψ(id, y)·g`.
    pub fn eval(&self, level: usize, t: usize, m: usize, map: &Elem, x: &Elem) -> Result<Elem> {
        let (g, y) = label(x)?;
        let z = self.image(t, m, map, &y)?;
        Ok(self.power(level).levels[m].act(t, &z, &g))
    }

    /// `ψ ↦ ψ∘L_g`, where `L_g(h, y) = (gh, y)`; on representatives this is `ψ(id, y)·g`.
    pub fn act(&self, level: usize, t: usize, map: &Elem, g: &Perm) -> Result<Elem> {
        if map.is_base() {
            return Ok(Elem::Base);
        }
        self.tabulate(t, |m, y| Ok(self.power(level).levels[m].act(t, &self.image(t, m, map, y)?, g)))
    }

    fn tabulate(&self, t: usize, f: impl Fn(usize, &Elem) -> Result<Elem>) -> Result<Elem> {
        let y = self.factor(t);
        let per = y
            .levels
            .iter()
            .enumerate()
            .map(|(m, l)| Ok(Elem::Tuple(l.real_atoms(0).iter().map(|a| f(m, a)).collect::<Result<Vec<_>>>()?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Elem::Tuple(per))
    }

    /// All coface-compatible maps `Y[t] → (Σ·Y)^{∘̊ℓ}[p]`, equivalently the `Σ_t`-equivariant
    /// maps out of `(Σ·Y)[t]`, by backtracking over degrees.
    fn enumerate(&self, level: usize, p: &Profile) -> Result<Vec<Elem>> {
        let t = p.weight();
        let y = self.factor(t);
        let d = self.degree_bound;
        let target = self.power(level);
        let mut cands: Vec<Vec<Elem>> = match level {
            0 => vec![vec![Elem::point()]; d + 1],
            _ => (0..=d).map(|m| self.component(level, p, m).to_vec()).collect(),
        };
        if self.mode == Mode::Pointed {
            for c in &mut cands {
                c.push(Elem::Base);
            }
        }
        let sizes: Vec<usize> = y.levels.iter().map(|l| l.real_atoms(0).len()).collect();
        // (m, i) ↦ the constraints on degree m + 1 coming from rep i.
        let mut preds: Vec<Vec<Vec<(usize, usize)>>> = sizes.iter().map(|&s| vec![Vec::new(); s]).collect();
        let mut to_base: Vec<Vec<Vec<usize>>> = sizes.iter().map(|&s| vec![Vec::new(); s]).collect();
        for m in 0..d {
            for (i, a) in y.levels[m].real_atoms(0).iter().enumerate() {
                for f in 0..m + 2 {
                    let b = y.coface(m, f).apply(0, a);
                    match self.rep_index[t - 1][m + 1].get(&b) {
                        Some(&j) => preds[m + 1][j].push((i, f)),
                        None => to_base[m][i].push(f),
                    }
                }
            }
        }
        let order: Vec<(usize, usize)> = (0..=d).flat_map(|m| (0..sizes[m]).map(move |i| (m, i))).collect();
        let mut assign: Vec<Vec<Elem>> = sizes.iter().map(|&s| vec![Elem::Base; s]).collect();
        let mut out = Vec::new();
        let ctx = Search { order: &order, preds: &preds, to_base: &to_base, cands: &cands, target, t };
        ctx.run(0, &mut assign, &mut out);
        out.retain(|m| !is_zero(m));
        Ok(out)
    }
}

/// The constant map at the basepoint, which is the basepoint of a mapping object.
fn is_zero(map: &Elem) -> bool {
    match map {
        Elem::Tuple(per) => per.iter().all(|v| matches!(v, Elem::Tuple(xs) if xs.iter().all(Elem::is_base))),
        _ => map.is_base(),
    }
}

/// Attached maps agree on slots of equal arity within every level, so that grafting them does
/// not depend on how equal-arity vertices are ordered.
pub fn tie_invariant(e: &OdotElem) -> bool {
    e.base
        .levels()
        .iter()
        .zip(&e.ys)
        .all(|(level, ys)| level.windows(2).zip(ys.windows(2)).all(|(a, y)| a[0] != a[1] || y[0] == y[1]))
}

/// Records `lhs = rhs`; an undefined side is a failure whose missing value shows as the basepoint.
fn compare(report: &mut Report, diagram: &str, arity: usize, element: &Elem, lhs: Result<Elem>, rhs: Result<Elem>) {
    match (lhs, rhs) {
        (Ok(a), Ok(b)) => report.record(diagram, arity, element, a, b),
        (a, b) => report.check(&format!("{diagram} (undefined)"), arity, false, || {
            (element.clone(), a.unwrap_or(Elem::Base), b.unwrap_or(Elem::Base))
        }),
    }
}

fn root_weight(f: &Flat, upto: usize) -> usize {
    f.levels[upto].iter().sum()
}

struct Search<'a> {
    order: &'a [(usize, usize)],
    preds: &'a [Vec<Vec<(usize, usize)>>],
    to_base: &'a [Vec<Vec<usize>>],
    cands: &'a [Vec<Elem>],
    target: &'a TruncCosimplicial,
    t: usize,
}

impl Search<'_> {
    fn fits(&self, m: usize, i: usize, v: &Elem) -> bool {
        self.to_base[m][i].iter().all(|&f| self.target.coface(m, f).apply(self.t, v).is_base())
    }

    fn run(&self, pos: usize, assign: &mut Vec<Vec<Elem>>, out: &mut Vec<Elem>) {
        let Some(&(m, i)) = self.order.get(pos) else {
            out.push(Elem::Tuple(assign.iter().map(|v| Elem::Tuple(v.clone())).collect()));
            return;
        };
        let forced: Option<Elem> = match self.preds[m][i].split_first() {
            None => None,
            Some((&(j, f), rest)) => {
                let v = self.target.coface(m - 1, f).apply(self.t, &assign[m - 1][j]);
                if rest.iter().any(|&(j2, f2)| self.target.coface(m - 1, f2).apply(self.t, &assign[m - 1][j2]) != v) {
                    return;
                }
                Some(v)
            }
        };
        match forced {
            Some(v) => {
                if !self.cands[m].contains(&v) || !self.fits(m, i, &v) {
                    return;
                }
                assign[m][i] = v;
                self.run(pos + 1, assign, out);
            }
            None => {
                for v in &self.cands[m] {
                    if self.fits(m, i, v) {
                        assign[m][i] = v.clone();
                        self.run(pos + 1, assign, out);
                    }
                }
            }
        }
    }
}

impl CoEnd {
    /// `ε`: the identity of `(Σ·Y)[n]`.
    pub fn eps(&self, n: usize) -> Result<Elem> {
        self.tabulate(n, |_, y| Ok(Elem::pair(Elem::Perm(Perm::identity(n)), y.clone())))
    }

    /// `ξ = μ∘(id ⊗ Γ)`: the base map followed by the attached maps applied vertexwise,
    /// regrouped along a common split of every level.
    pub fn xi(&self, e: &OdotElem) -> Result<Elem> {
        let (level, p) = e.key()?;
        let key =
            self.key(level, &p).ok_or_else(|| Error::Bound(format!("{p} at level {level} is outside the bounds")))?;
        let t = p.weight();
        let map = self.tabulate(t, |m, y| self.xi_at(e, m, t, y))?;
        if is_zero(&map) {
            return Ok(Elem::Base);
        }
        if key.index_of(&map).is_none() {
            return Err(Error::Validation(format!("composite at {p} is not a coface-compatible map")));
        }
        Ok(map)
    }

    fn xi_at(&self, e: &OdotElem, m: usize, t: usize, y: &Elem) -> Result<Elem> {
        let k = e.ells.len();
        let v = self.image(t, m, &e.x, y)?;
        if v.is_base() || k == 0 {
            return Ok(v);
        }
        let starts: Vec<usize> = e.ells.iter().scan(0, |acc, &l| Some(std::mem::replace(acc, *acc + l))).collect();
        let total: usize = e.ells.iter().sum();
        'outer: for base in self.splits(k, m, t, &v)? {
            let mut blow: Vec<Vec<Flat>> = Vec::with_capacity(k);
            let mut chosen: Vec<Vec<Tree>> = Vec::with_capacity(k);
            let mut splits: Vec<Vec<usize>> = Vec::with_capacity(k);
            for (j, level) in base.flat.levels.iter().enumerate() {
                let slots = slot_order(level);
                let b = base.chunks[j];
                if e.ells[j] == 0 {
                    for (pos, lab) in base.labels[j].iter().enumerate() {
                        if self.image(1, b, &e.ys[j][slots[pos]], lab)?.is_base() {
                            return Ok(Elem::Base);
                        }
                    }
                    blow.push(vec![Flat::trivial(); level.len()]);
                    chosen.push(Vec::new());
                    splits.push(Vec::new());
                    continue;
                }
                let mut options: Vec<BTreeMap<Vec<usize>, Tree>> = Vec::with_capacity(level.len());
                for (pos, &n) in level.iter().enumerate() {
                    let beta = &e.ys[j][slots[pos]];
                    let w = self.image(n, b, beta, &base.labels[j][pos])?;
                    if w.is_base() {
                        return Ok(Elem::Base);
                    }
                    let mut by_split = BTreeMap::new();
                    for tr in self.splits(e.ells[j], b, n, &w)? {
                        by_split.entry(tr.chunks.clone()).or_insert(tr);
                    }
                    options.push(by_split);
                }
                let common: Option<Vec<usize>> =
                    options[0].keys().find(|c| options.iter().all(|o| o.contains_key(*c))).cloned();
                let Some(c) = common else { continue 'outer };
                let trees: Vec<Tree> = options.iter().map(|o| o[&c].clone()).collect();
                blow.push(trees.iter().map(|tr| tr.flat.clone()).collect());
                chosen.push(trees);
                splits.push(c);
            }
            let (g, places) = graft(&base.flat, &e.ells, &blow)?;
            let mut labels: Vec<Vec<Elem>> = g.levels.iter().map(|l| vec![Elem::Base; l.len()]).collect();
            let mut chunks = vec![0; total];
            let mut pads = vec![0; total + 1];
            for j in 0..k {
                if e.ells[j] == 0 {
                    pads[starts[j]] += base.chunks[j];
                    continue;
                }
                for (s, &c) in splits[j].iter().enumerate() {
                    chunks[starts[j] + s] = c;
                }
                for (pos, tr) in chosen[j].iter().enumerate() {
                    for (s, row) in tr.labels.iter().enumerate() {
                        for (u, lab) in row.iter().enumerate() {
                            labels[starts[j] + s][places[j][pos][s][u]] = lab.clone();
                        }
                    }
                }
            }
            return self.build_padded(&Tree { flat: g, chunks, labels }, &pads);
        }
        Err(Error::Validation(format!("no common split for a composite at degree {m}")))
    }

    /// `ξ` applied to every attached element of `e`, then to the result.
    fn xi_nested(&self, e: &OdotElem) -> Result<Elem> {
        let inner: Vec<Vec<OdotElem>> =
            e.ys.iter().map(|g| g.iter().map(OdotElem::decode).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
        let ys =
            inner.iter().map(|g| g.iter().map(|w| self.xi(w)).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
        let family =
            inner.iter().map(|g| g.iter().map(OdotElem::profile).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
        self.xi(&OdotElem { ells: e.ells.clone(), base: e.base.clone(), x: e.x.clone(), family, ys })
    }

    /// Associativity of `ξ` on the elements of `(P⊙P)⊙P` whose attached families are
    /// tie-invariant (`ties = false`) or not (`ties = true`).
    fn associativity(&self, bounds: Bounds, ties: bool) -> Result<Report> {
        let o = self.object()?.restrict(bounds.max_level, bounds.max_weight);
        let oo = odot(&o, &o, bounds)?;
        let mut report = Report::default();
        for ((_, p), elems) in odot_elems(&oo, &o, bounds)? {
            for e in elems {
                let z = OdotElem::decode(&e.x)?;
                if ties == (tie_invariant(&e) && tie_invariant(&z)) {
                    continue;
                }
                let lhs = self.xi(&z).and_then(|inner| self.xi(&OdotElem { x: inner, ..e.clone() }));
                let rhs = assoc_forward(&e).and_then(|f| self.xi_nested(&f));
                compare(&mut report, &format!("xi associativity at {p}"), p.weight(), &e.encode(), lhs, rhs);
            }
        }
        Ok(report)
    }

    /// Associativity on elements whose families separate equal-arity slots. There the
    /// composite depends on the order of tied vertices, so failures are expected.
    pub fn check_tie_dependent(&self, bounds: Bounds) -> Result<Report> {
        self.associativity(bounds, true)
    }

    /// Associativity on tie-invariant elements of `(P⊙P)⊙P`, and both unit laws on every map.
    pub fn check_laws(&self, bounds: Bounds) -> Result<Report> {
        let mut report = self.associativity(bounds, false)?;
        for ((l, p), k) in &self.keys {
            if *l > bounds.max_level || p.weight() > bounds.max_weight {
                continue;
            }
            let eps_row = |lv: &Vec<usize>| lv.iter().map(|&n| self.eps(n)).collect::<Result<Vec<_>>>();
            let ys = p.levels().iter().map(eps_row).collect::<Result<Vec<_>>>()?;
            for x in &k.maps {
                let right = OdotElem { ys: ys.clone(), ..right_unit_inverse(&(*l, p.clone()), x) };
                compare(&mut report, &format!("right unit at {p}"), p.weight(), x, self.xi(&right), Ok(x.clone()));
                let left = OdotElem { x: self.eps(p.weight())?, ..left_unit_inverse(&(*l, p.clone()), x) };
                compare(&mut report, &format!("left unit at {p}"), p.weight(), x, self.xi(&left), Ok(x.clone()));
            }
        }
        Ok(report)
    }

    /// `ξ` is `Σ_t`-equivariant for the action `ψ ↦ ψ∘L_g` on base maps and composites.
    pub fn check_equivariance(&self, bounds: Bounds) -> Result<Report> {
        let o = self.object()?.restrict(bounds.max_level, bounds.max_weight);
        let mut report = Report::default();
        for ((l, p), elems) in odot_elems(&o, &o, bounds)? {
            if l == 0 {
                continue;
            }
            let t = p.weight();
            for e in elems {
                let k = e.ells.len();
                for i in 0..t.saturating_sub(1) {
                    let g = Perm::adjacent(t, i);
                    let moved = OdotElem { x: self.act(k, t, &e.x, &g)?, ..e.clone() };
                    let lhs = self.xi(&moved);
                    let rhs = self.xi(&e).and_then(|v| self.act(l, t, &v, &g));
                    compare(&mut report, &format!("xi equivariance at {p}"), t, &e.encode(), lhs, rhs);
                }
            }
        }
        Ok(report)
    }
}

impl CoEnd {
    /// `L_g` on the outer vertex of a class of `(Σ·Y)^{∘̊2}`.
    pub fn left_translate(&self, m: usize, t: usize, v: &Elem, g: &Perm) -> Result<Elem> {
        if v.is_base() {
            return Ok(Elem::Base);
        }
        let Elem::Tag(a, c) = v else {
            return invalid("not an atom of a box power");
        };
        let a = *a as usize;
        let Some(c) = c.as_comp() else {
            return invalid("not an atom of a box power");
        };
        let (h, y) = label(&c.outer)?;
        let outer = Elem::pair(Elem::Perm(g.compose(&h)?), y);
        let x = self.source();
        let e = normalize(&x.levels[a], &x.levels[m - a], outer, c.inners.clone(), c.arities.clone(), c.sigma.clone());
        Ok(self.boxes[0].class(m, t, &tag(a, e)))
    }

    /// `(ψ₂∘̊id)∘ψ₁`.
    pub fn compose_quadratic(&self, k: usize, t: usize, psi2: &Elem, psi1: &Elem) -> Result<Elem> {
        let f = |p: usize, _: usize, x: &Elem| self.eval(2, k, p, psi2, x).ok();
        let id = |_: usize, _: usize, z: &Elem| Some(z.clone());
        self.tabulate(t, |m, y| {
            let v = self.image(t, m, psi1, y)?;
            self.boxes[0]
                .map_into(&self.boxes[1], m, t, &v, &f, &id)
                .ok_or_else(|| Error::Validation(format!("composite undefined at degree {m}")))
        })
    }

    /// Compares `coEnd₃(p;t)` with the `Σ_k`-quotient of pairs of two-level maps.
    pub fn quadratic(&self, p: &Profile) -> Result<Quadratic> {
        if p.depth() != 3 || self.max_level < 3 {
            return invalid(format!("{p} is not a three-level profile within the bounds"));
        }
        let lv = p.levels();
        let (ks, ts) = (lv[1].clone(), lv[2].clone());
        let (k, t) = (ks.iter().sum::<usize>(), p.weight());
        let upper = Profile::new(vec![lv[0].clone(), ks])?;
        let lower = Profile::new(vec![vec![k], ts])?;
        let empty = CoEndKey::default();
        let a = self.key(2, &upper).unwrap_or(&empty);
        let b = self.key(2, &lower).unwrap_or(&empty);
        let c = self.key(3, p).unwrap_or(&empty);
        let nb = b.len();
        let mut uf = UnionFind::new(a.len() * nb);
        let mut report = Report::default();
        for i in 0..k.saturating_sub(1) {
            let g = Perm::adjacent(k, i);
            let a_moved: Vec<Option<usize>> =
                a.maps.iter().map(|m| self.act(2, k, m, &g).ok().and_then(|v| a.index_of(&v))).collect();
            let b_moved: Vec<Option<usize>> = b
                .maps
                .iter()
                .map(|m| {
                    self.tabulate(t, |deg, y| self.left_translate(deg, t, &self.image(t, deg, m, y)?, &g))
                        .ok()
                        .and_then(|v| b.index_of(&v))
                })
                .collect();
            for (ia, am) in a_moved.iter().enumerate() {
                report.check(&format!("Σ_{k} preserves the upper factor at {upper}"), k, am.is_some(), || {
                    (a.maps[ia].clone(), Elem::Base, a.maps[ia].clone())
                });
            }
            for (ib, bm) in b_moved.iter().enumerate() {
                report.check(&format!("Σ_{k} preserves the lower factor at {lower}"), t, bm.is_some(), || {
                    (b.maps[ib].clone(), Elem::Base, b.maps[ib].clone())
                });
            }
            for (ia, am) in a_moved.iter().enumerate() {
                for (ib, bm) in b_moved.iter().enumerate() {
                    if let (Some(am), Some(bm)) = (am, bm) {
                        uf.union(am * nb + ib, ia * nb + bm);
                    }
                }
            }
        }
        let roots = uf.roots();
        let classes: BTreeSet<usize> = roots.iter().copied().collect();
        let mut value: HashMap<usize, (usize, Elem)> = HashMap::new();
        let mut hit: Vec<Option<usize>> = vec![None; c.len()];
        let name = format!("quadratic law at {p}");
        for ia in 0..a.len() {
            for ib in 0..nb {
                let id = ia * nb + ib;
                let comp = self.compose_quadratic(k, t, &a.maps[ia], &b.maps[ib]).unwrap_or(Elem::Base);
                let pair = Elem::pair(a.maps[ia].clone(), b.maps[ib].clone());
                let at = c.index_of(&comp);
                report.check(&format!("{name}: composite is a three-level map"), t, at.is_some(), || {
                    (pair.clone(), comp.clone(), Elem::Base)
                });
                let root = roots[id];
                match value.get(&root) {
                    Some((_, v)) => {
                        report.record(&format!("{name}: constant on classes"), t, &pair, comp.clone(), v.clone())
                    }
                    None => {
                        value.insert(root, (id, comp.clone()));
                        if let Some(at) = at {
                            let clash = hit[at].filter(|&r| r != root);
                            report.check(&format!("{name}: injective"), t, clash.is_none(), || {
                                (pair.clone(), comp.clone(), Elem::Base)
                            });
                            hit[at] = Some(root);
                        }
                    }
                }
            }
        }
        for (i, h) in hit.iter().enumerate() {
            report.check(&format!("{name}: surjective"), t, h.is_some(), || {
                (c.maps[i].clone(), Elem::Base, c.maps[i].clone())
            });
        }
        Ok(Quadratic { profile: p.clone(), direct: c.len(), pairs: a.len() * nb, tensor: classes.len(), report })
    }
}
