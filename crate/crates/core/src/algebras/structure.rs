use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::kernel::{Elem, Perm};
use crate::nlev::{decorate, graft, slot_order, Flat};
use crate::symseq::{Report, SeqMap, SymSeq};

/// Which leveled operad acts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LevelOperad {
    /// Concentrated at level one with `Σ_n` at `(n)`; algebras are symmetric sequences.
    ISigma,
    /// The operad of leveled trees; algebras are operads.
    Oper,
}

impl LevelOperad {
    pub fn max_level(self, requested: usize) -> usize {
        match self {
            LevelOperad::ISigma => requested.min(1),
            LevelOperad::Oper => requested,
        }
    }
}

/// Values of one structure map: per leveled tree, per list of vertex
/// decorations given level by level in sorted slot order.
pub type Table = HashMap<Flat, Entries>;

/// Values of one structure map on one tree, keyed by decorations.
pub type Entries = HashMap<Vec<Elem>, Elem>;

/// Structure map values, per level.
pub type Tables = Vec<Table>;

pub(crate) fn tabulated(tables: &Tables, f: &Flat) -> bool {
    tables.get(f.depth()).is_some_and(|t| t.contains_key(f))
}

pub(crate) fn lookup<'a>(tables: &'a Tables, f: &Flat, decs: &[Elem]) -> Option<&'a Elem> {
    tables.get(f.depth())?.get(f)?.get(decs)
}

type SortedEntries<'a> = Vec<(&'a Vec<Elem>, &'a Elem)>;

pub(crate) fn sorted(table: &Table) -> Vec<(&Flat, SortedEntries<'_>)> {
    let mut out: Vec<_> = table
        .iter()
        .map(|(f, m)| {
            let mut v: Vec<_> = m.iter().collect();
            v.sort();
            (f, v)
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(b.0));
    out
}

/// Planar level lists of the given depth. Entries above the last level are
/// taken from `inner`, entries of the last level from `last`; the last level
/// sums to at most `max_weight` and no level exceeds `max_vertices` vertices.
pub fn planar_levels(
    depth: usize,
    inner: &[usize],
    last: &[usize],
    max_weight: usize,
    max_vertices: usize,
) -> Vec<Vec<Vec<usize>>> {
    if depth == 0 {
        return if max_weight >= 1 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    let mut partial: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for j in 0..depth {
        let choices = if j + 1 == depth { last } else { inner };
        let mut next = Vec::new();
        for levels in partial {
            let count = levels.last().map_or(1, |l: &Vec<usize>| l.iter().sum());
            if count > max_vertices {
                continue;
            }
            let mut acc = vec![Vec::new()];
            for _ in 0..count {
                acc = acc
                    .into_iter()
                    .flat_map(|pre: Vec<usize>| {
                        choices.iter().map(move |&c| {
                            let mut v = pre.clone();
                            v.push(c);
                            v
                        })
                    })
                    .collect();
            }
            for lv in acc {
                if j + 1 == depth && lv.iter().sum::<usize>() > max_weight {
                    continue;
                }
                let mut l = levels.clone();
                l.push(lv);
                next.push(l);
            }
        }
        partial = next;
    }
    out.extend(partial);
    out
}

/// Every leaf permutation of every planar tree in `levels`.
pub fn flats_of(levels: Vec<Vec<Vec<usize>>>) -> Vec<Flat> {
    levels
        .into_iter()
        .flat_map(|l| {
            let t = l.last().map_or(1, |v| v.iter().sum());
            Perm::all(t).into_iter().map(move |lambda| Flat { levels: l.clone(), lambda })
        })
        .collect()
}

/// Slot arities of a tree in the order decorations are listed.
pub fn slot_arities(f: &Flat) -> Vec<Vec<usize>> {
    f.levels
        .iter()
        .map(|l| {
            let mut v = l.clone();
            v.sort_unstable_by(|a, b| b.cmp(a));
            v
        })
        .collect()
}

/// All decoration lists of `f`; the atoms at level `j` and arity `n` are `atoms(j, n)`.
pub fn decorations<'a>(f: &Flat, atoms: impl Fn(usize, usize) -> &'a [Elem]) -> Vec<Vec<Elem>> {
    let mut acc: Vec<Vec<Elem>> = vec![Vec::new()];
    for (j, level) in slot_arities(f).iter().enumerate() {
        for &n in level {
            let choices = atoms(j, n);
            acc = acc
                .into_iter()
                .flat_map(|pre| {
                    choices.iter().map(move |c| {
                        let mut v = pre.clone();
                        v.push(c.clone());
                        v
                    })
                })
                .collect();
        }
    }
    acc
}

pub(crate) fn level_offsets(f: &Flat) -> Vec<usize> {
    let mut acc = 0;
    f.levels
        .iter()
        .map(|l| {
            let o = acc;
            acc += l.len();
            o
        })
        .collect()
}

/// `Tuple[levels, λ, decorations]`, used to locate witnesses.
pub fn encode_entry(f: &Flat, decs: &[Elem]) -> Elem {
    let levels =
        Elem::Tuple(f.levels.iter().map(|l| Elem::Tuple(l.iter().map(|&a| Elem::Atom(a as u32)).collect())).collect());
    Elem::Tuple(vec![levels, Elem::Perm(f.lambda.clone()), Elem::Tuple(decs.to_vec())])
}

/// Evaluates the planar composite of a decorated tree with `gamma(x, children, child arities)`,
/// then applies the leaf permutation with `act`.
pub(crate) fn eval_planar(
    f: &Flat,
    decs: &[Elem],
    unit: &Elem,
    gamma: impl Fn(&Elem, &[Elem], &[usize]) -> Elem,
    act: impl Fn(usize, &Elem, &Perm) -> Elem,
) -> Elem {
    let d = f.depth();
    if d == 0 {
        return unit.clone();
    }
    let offs = level_offsets(f);
    let slots = f.slots();
    let mut vals: Vec<(Elem, usize)> =
        (0..f.levels[d - 1].len()).map(|m| (decs[offs[d - 1] + slots[d - 1][m]].clone(), f.levels[d - 1][m])).collect();
    for j in (0..d - 1).rev() {
        let mut next = Vec::with_capacity(f.levels[j].len());
        let mut at = 0;
        for (m, &a) in f.levels[j].iter().enumerate() {
            let x = &decs[offs[j] + slots[j][m]];
            let ch = &vals[at..at + a];
            at += a;
            let ar: Vec<usize> = ch.iter().map(|c| c.1).collect();
            let v = if ch.iter().any(|c| c.0.is_base()) {
                Elem::Base
            } else {
                let ys: Vec<Elem> = ch.iter().map(|c| c.0.clone()).collect();
                gamma(x, &ys, &ar)
            };
            next.push((v, ar.iter().sum()));
        }
        vals = next;
    }
    let (v, t) = vals.pop().expect("one root");
    if v.is_base() {
        v
    } else {
        act(t, &v, &f.lambda)
    }
}

/// An algebra over a leveled operad: a symmetric sequence with structure maps
/// `μ_k` tabulated on every decorated tree of depth `k ≤ max_level`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraStructure {
    pub operad: LevelOperad,
    pub carrier: SymSeq,
    pub max_level: usize,
    pub max_weight: usize,
    pub mu: Tables,
}

impl AlgebraStructure {
    /// Positive arities at which the carrier has atoms.
    pub fn support(&self) -> Vec<usize> {
        support(&self.carrier, 1, self.max_weight)
    }

    /// Tabulates `f` on every decorated tree within the bounds.
    pub fn from_fn(
        operad: LevelOperad,
        carrier: SymSeq,
        max_level: usize,
        max_weight: usize,
        f: impl Fn(&Flat, &[Elem]) -> Elem,
    ) -> Self {
        let max_level = operad.max_level(max_level);
        let max_weight = max_weight.min(carrier.arity_bound());
        let sup = support(&carrier, 1, max_weight);
        let mut mu = Vec::with_capacity(max_level + 1);
        for k in 0..=max_level {
            let mut table = Table::new();
            if k == 0 && operad == LevelOperad::ISigma {
                mu.push(table);
                continue;
            }
            for fl in flats_of(planar_levels(k, &sup, &sup, max_weight, max_weight)) {
                let values = decorations(&fl, |_, n| carrier.real_atoms(n))
                    .into_iter()
                    .map(|decs| {
                        let v = f(&fl, &decs);
                        (decs, v)
                    })
                    .collect();
                table.insert(fl, values);
            }
            mu.push(table);
        }
        AlgebraStructure { operad, carrier, max_level, max_weight, mu }
    }

    pub fn mu(&self, f: &Flat, decs: &[Elem]) -> Option<&Elem> {
        lookup(&self.mu, f, decs)
    }

    /// `μ₀` at the trivial tree.
    pub fn unit(&self) -> Option<&Elem> {
        self.mu(&Flat::trivial(), &[])
    }

    /// Overwrites one entry, for fault-injection tests.
    pub fn corrupt(&mut self, f: &Flat, decs: &[Elem], value: Elem) {
        self.mu[f.depth()].entry(f.clone()).or_default().insert(decs.to_vec(), value);
    }

    pub fn len(&self) -> usize {
        self.mu.iter().flat_map(|t| t.values()).map(HashMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Restriction along the unit `𝓘^Σ → 𝖮𝗉𝖾𝗋`: only the one-level structure map remains.
    pub fn restrict_to_isigma(&self) -> AlgebraStructure {
        let mut mu = vec![Table::new(); 2.min(self.mu.len())];
        if let Some(level) = self.mu.get(1) {
            mu[1] = level.clone();
        }
        AlgebraStructure {
            operad: LevelOperad::ISigma,
            carrier: self.carrier.clone(),
            max_level: self.max_level.min(1),
            max_weight: self.max_weight,
            mu,
        }
    }
}

pub(crate) fn support(s: &SymSeq, from: usize, to: usize) -> Vec<usize> {
    (from..=to.min(s.arity_bound())).filter(|&n| !s.real_atoms(n).is_empty()).collect()
}

/// The structure of a symmetric sequence as an algebra over `𝓘^Σ`.
pub fn symmetric_sequence_algebra(carrier: SymSeq) -> AlgebraStructure {
    let bound = carrier.arity_bound();
    let c = carrier.clone();
    AlgebraStructure::from_fn(LevelOperad::ISigma, carrier, 1, bound, move |f, decs| {
        c.act(f.weight(), &decs[0], &f.lambda)
    })
}

pub(crate) type Eval<'a> = Box<dyn Fn(&Flat, &[Elem]) -> Option<Elem> + 'a>;

/// Decorations and structure maps for the associativity check. With
/// `module` set, the last level of every tree carries the module and the
/// last attached group is evaluated by the module map.
pub(crate) struct Layer<'a> {
    pub inner: Vec<usize>,
    pub last: Vec<usize>,
    pub module: bool,
    /// Atoms at a level of a tree of the given depth, by arity.
    pub atoms: Box<dyn Fn(usize, usize, usize) -> &'a [Elem] + 'a>,
    /// The algebra map; the module map is used for the base and the last group when `module` is set.
    pub algebra: Eval<'a>,
    pub top: Eval<'a>,
    /// Whether the top map is tabulated on a tree.
    pub covers: Box<dyn Fn(&Flat) -> bool + 'a>,
}

/// Trees of a depth and weight with entries from `inner` above the last level and `last` on it.
pub(crate) fn trees(depth: usize, weight: usize, inner: &[usize], last: &[usize], max_vertices: usize) -> Vec<Flat> {
    if depth == 0 {
        return if weight == 1 { vec![Flat::trivial()] } else { Vec::new() };
    }
    planar_levels(depth, inner, last, weight, max_vertices)
        .into_iter()
        .filter(|l| l.last().expect("positive depth").iter().sum::<usize>() == weight)
        .flat_map(|l| Perm::all(weight).into_iter().map(move |lambda| Flat { levels: l.clone(), lambda }))
        .collect()
}

/// Elementwise associativity: evaluating a grafted tree agrees with evaluating
/// every attached tree first and then the base. Attached trees range over
/// class representatives, those with identity leaf permutation.
pub(crate) fn check_associativity(
    report: &mut Report,
    layer: &Layer<'_>,
    max_level: usize,
    max_weight: usize,
    max_vertices: usize,
) -> Result<()> {
    for k in 1..=max_level {
        let min_last = usize::from(layer.module);
        for ells in level_splittings(k, max_level, min_last) {
            let total: usize = ells.iter().sum();
            for t in 0..=max_weight {
                for x in trees(k, t, &layer.inner, &layer.last, max_vertices) {
                    check_base(report, layer, &x, &ells, total, max_vertices)?;
                }
            }
        }
    }
    Ok(())
}

fn level_splittings(k: usize, max_level: usize, min_last: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for j in 0..k {
        let lo = if j + 1 == k { min_last } else { 0 };
        out = out
            .into_iter()
            .flat_map(|pre: Vec<usize>| {
                let used: usize = pre.iter().sum();
                (lo..=max_level.saturating_sub(used)).map(move |l| {
                    let mut v = pre.clone();
                    v.push(l);
                    v
                })
            })
            .collect();
    }
    out.retain(|v| v.iter().sum::<usize>() <= max_level);
    out
}

fn check_base(
    report: &mut Report,
    layer: &Layer<'_>,
    x: &Flat,
    ells: &[usize],
    total: usize,
    max_vertices: usize,
) -> Result<()> {
    let k = x.depth();
    let arities = slot_arities(x);
    let mut slot_choices: Vec<Vec<Flat>> = Vec::new();
    for (j, level) in arities.iter().enumerate() {
        let last = if layer.module && j + 1 == k { &layer.last } else { &layer.inner };
        for &a in level {
            if ells[j] == 0 && a != 1 {
                return Ok(());
            }
            let mut ys = trees(ells[j], a, &layer.inner, last, max_vertices);
            ys.retain(|y| y.lambda.is_identity());
            if ys.is_empty() {
                return Ok(());
            }
            slot_choices.push(ys);
        }
    }
    let mut idx = vec![0usize; slot_choices.len()];
    loop {
        let mut at = 0;
        let per_slot: Vec<Vec<&Flat>> = arities
            .iter()
            .map(|level| {
                level
                    .iter()
                    .map(|_| {
                        let y = &slot_choices[at][idx[at]];
                        at += 1;
                        y
                    })
                    .collect()
            })
            .collect();
        check_composite(report, layer, x, ells, total, &per_slot)?;
        if !advance(&mut idx, &slot_choices) {
            return Ok(());
        }
    }
}

fn advance<T>(idx: &mut [usize], choices: &[Vec<T>]) -> bool {
    for i in (0..idx.len()).rev() {
        idx[i] += 1;
        if idx[i] < choices[i].len() {
            return true;
        }
        idx[i] = 0;
    }
    false
}

fn check_composite(
    report: &mut Report,
    layer: &Layer<'_>,
    x: &Flat,
    ells: &[usize],
    total: usize,
    per_slot: &[Vec<&Flat>],
) -> Result<()> {
    let k = x.depth();
    let blow: Vec<Vec<Flat>> = x
        .levels
        .iter()
        .enumerate()
        .map(|(j, level)| slot_order(level).iter().map(|&s| per_slot[j][s].clone()).collect())
        .collect();
    let (f, places) = graft(x, ells, &blow)?;
    if !(layer.covers)(&f) {
        return Ok(());
    }
    let f_slots = f.slots();
    let f_offs = level_offsets(&f);
    let starts: Vec<usize> = ells
        .iter()
        .scan(0, |acc, &l| {
            let s = *acc;
            *acc += l;
            Some(s)
        })
        .collect();
    let x_vertices = x.vertices();
    for decs in decorations(&f, |level, n| (layer.atoms)(level, total, n)) {
        let Some(lhs) = (layer.top)(&f, &decs) else {
            continue;
        };
        let mut values = Vec::new();
        let mut ok = true;
        for (j, row) in per_slot.iter().enumerate() {
            for (s, y) in row.iter().enumerate() {
                let m = x_vertices[j][s];
                let mut ydecs = vec![Elem::Base; y.levels.iter().map(Vec::len).sum()];
                let y_offs = level_offsets(y);
                for (u, level) in y.levels.iter().enumerate() {
                    let y_slots = slot_order(level);
                    for v in 0..level.len() {
                        let pos = places[j][m][u][v];
                        let fl = starts[j] + u;
                        ydecs[y_offs[u] + y_slots[v]] = decs[f_offs[fl] + f_slots[fl][pos]].clone();
                    }
                }
                let eval = if layer.module && j + 1 == k { &layer.top } else { &layer.algebra };
                match eval(y, &ydecs) {
                    Some(v) => values.push(v),
                    None => ok = false,
                }
            }
        }
        if !ok {
            continue;
        }
        let rhs = if values.iter().any(Elem::is_base) {
            Elem::Base
        } else {
            match (layer.top)(x, &values) {
                Some(v) => v,
                None => continue,
            }
        };
        let label = format!("associativity {:?} at {}", ells, f.profile());
        report.record(&label, f.weight(), &encode_entry(&f, &decs), lhs, rhs);
    }
    Ok(())
}

/// Leaf and vertex equivariance of one table: `μ(λ∘g) = μ·g`, and decorating a
/// vertex by `g` agrees with acting on that vertex's decoration.
pub(crate) fn check_equivariance(
    report: &mut Report,
    name: &str,
    table: &Table,
    out: &SymSeq,
    act_dec: impl Fn(usize, usize, &Elem, &Perm) -> Elem,
) -> Result<()> {
    for (f, entries) in sorted(table) {
        let t = f.weight();
        let leaf: Vec<(Perm, Option<&Entries>)> = (0..t.saturating_sub(1))
            .map(|i| {
                let g = Perm::adjacent(t, i);
                let moved = f.with_lambda(f.lambda.compose(&g).expect("same degree"));
                (g, table.get(&moved))
            })
            .collect();
        let offs = level_offsets(f);
        let mut vertex = Vec::new();
        for (j, level) in slot_arities(f).iter().enumerate() {
            for (s, &n) in level.iter().enumerate() {
                for i in 0..n.saturating_sub(1) {
                    let g = Perm::adjacent(n, i);
                    let (h, rho) = decorate(f, j, s, &g)?;
                    let at: Vec<usize> = rho
                        .iter()
                        .enumerate()
                        .flat_map(|(jj, row)| {
                            let o = offs[jj];
                            row.iter().map(move |&to| o + to)
                        })
                        .collect();
                    vertex.push((j, s, n, g, at, table.get(&h)));
                }
            }
        }
        for (decs, v) in entries {
            let el = || encode_entry(f, decs);
            for (g, other) in &leaf {
                let lhs = other.and_then(|m| m.get(decs));
                let rhs = out.act(t, v, g);
                report.check(&format!("{name} leaf equivariance"), t, lhs == Some(&rhs), || {
                    (el(), lhs.cloned().unwrap_or(Elem::Base), rhs.clone())
                });
            }
            for (j, s, n, g, at, other) in &vertex {
                let mut moved = vec![Elem::Base; decs.len()];
                let here = offs[*j] + s;
                for (from, &to) in at.iter().enumerate() {
                    moved[to] = if from == here { act_dec(*j, *n, &decs[from], g) } else { decs[from].clone() };
                }
                let w = other.and_then(|m| m.get(&moved));
                report.check(&format!("{name} vertex equivariance"), t, w == Some(v), || {
                    (el(), v.clone(), w.cloned().unwrap_or(Elem::Base))
                });
            }
        }
    }
    Ok(())
}

/// All laws of an algebra within its bounds: equivariance of every table,
/// associativity along grafting, and the unit `μ₁(id; w) = w`.
pub fn check_algebra(a: &AlgebraStructure) -> Result<Report> {
    let mut report = Report::default();
    let c = &a.carrier;
    for table in &a.mu {
        check_equivariance(&mut report, "structure map", table, c, |_, n, d, g| c.act(n, d, g))?;
    }
    if a.max_level >= 1 {
        for n in a.support() {
            for w in c.real_atoms(n) {
                let f = Flat::corolla(Perm::identity(n));
                let v = a.mu(&f, std::slice::from_ref(w)).cloned();
                report.check("unit", n, v.as_ref() == Some(w), || {
                    (w.clone(), v.clone().unwrap_or(Elem::Base), w.clone())
                });
            }
        }
    }
    let sup = a.support();
    let layer = Layer {
        inner: sup.clone(),
        last: sup,
        module: false,
        atoms: Box::new(|_, _, n| c.real_atoms(n)),
        algebra: Box::new(|f, decs| a.mu(f, decs).cloned()),
        top: Box::new(|f, decs| a.mu(f, decs).cloned()),
        covers: Box::new(|f| tabulated(&a.mu, f)),
    };
    check_associativity(&mut report, &layer, a.max_level, a.max_weight, a.max_weight)?;
    Ok(report)
}

/// `f` is an algebra map when it commutes with every structure map.
pub fn check_algebra_map(src: &AlgebraStructure, dst: &AlgebraStructure, f: &SeqMap) -> Result<Report> {
    if src.operad != dst.operad {
        return Err(Error::Validation("algebras over different operads".into()));
    }
    let mut report = Report::default();
    for table in &src.mu {
        for (fl, entries) in sorted(table) {
            for (decs, v) in entries {
                let arities: Vec<usize> = slot_arities(fl).into_iter().flatten().collect();
                let mapped: Vec<Elem> = decs.iter().zip(&arities).map(|(d, &n)| f.apply(n, d)).collect();
                let lhs = f.try_apply(fl.weight(), v).unwrap_or(Elem::Base);
                let rhs = if mapped.iter().any(Elem::is_base) {
                    Elem::Base
                } else {
                    dst.mu(fl, &mapped).cloned().unwrap_or(Elem::Base)
                };
                report.record("algebra map", fl.weight(), &encode_entry(fl, decs), lhs, rhs);
            }
        }
    }
    Ok(report)
}
