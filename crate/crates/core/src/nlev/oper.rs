//! The leveled operad whose algebras are operads: iterated composition powers
//! of `Σ`, evaluated profile by profile.

use std::collections::{BTreeMap, HashMap};

use super::flat::{graft, renormalize, slot_order, Flat};
use super::object::{Key, NLevObject};
use super::odot::{Bounds, OdotElem};
use super::sym::{sigma_classes, sigma_groups_for, KeyActions, RightGen, SigmaGroup, SymNLevObject};
use crate::error::{invalid, Error, Result};
use crate::kernel::{block_sum, Elem, FinObj, Mode, Perm};
use crate::profiles::Profile;
use crate::symseq::{circle, normalize, Report, SymSeq};

/// The atoms of one key, in flat and in canonical circle form.
#[derive(Clone, Debug)]
pub struct OperKey {
    pub flats: Vec<Flat>,
    pub atoms: Vec<Elem>,
    index: HashMap<Flat, u32>,
}

impl OperKey {
    pub fn len(&self) -> usize {
        self.flats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flats.is_empty()
    }

    pub fn index_of(&self, f: &Flat) -> Option<usize> {
        self.index.get(f).map(|&i| i as usize)
    }
}

/// `Oper_ℓ(p; t) ≅ Σ^{∘ℓ}[p]` for `ℓ ≤ max_level`, `t ≤ max_weight`.
#[derive(Clone, Debug)]
pub struct Oper {
    mode: Mode,
    max_level: usize,
    max_weight: usize,
    tower: Vec<SymSeq>,
    keys: BTreeMap<Key, OperKey>,
}

impl Oper {
    pub fn new(mode: Mode, max_level: usize, max_weight: usize) -> Result<Self> {
        let sigma = SymSeq::sigma(mode, max_weight);
        let mut tower = vec![SymSeq::unit(mode, max_weight)];
        if max_level >= 1 {
            tower.push(sigma.clone());
        }
        for _ in 2..=max_level {
            let next = circle(tower.last().expect("nonempty tower"), &sigma, max_weight)?;
            tower.push(next);
        }
        let mut o = Oper { mode, max_level, max_weight, tower, keys: BTreeMap::new() };
        let mut keys: BTreeMap<Key, OperKey> = BTreeMap::new();
        for level in 0..=max_level {
            for t in 1..=max_weight {
                for e in o.tower[level].real_atoms(t) {
                    let f = o.flatten(level, e)?;
                    let entry = keys.entry((level, f.profile())).or_insert_with(|| OperKey {
                        flats: Vec::new(),
                        atoms: Vec::new(),
                        index: HashMap::new(),
                    });
                    entry.index.insert(f.clone(), entry.flats.len() as u32);
                    entry.flats.push(f);
                    entry.atoms.push(e.clone());
                }
            }
        }
        o.keys = keys;
        Ok(o)
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

    /// `Σ^{∘ℓ}` up to the weight bound.
    pub fn power(&self, level: usize) -> Option<&SymSeq> {
        self.tower.get(level)
    }

    /// Replaces atom `index` of a key by the flat `f`, keeping the lookup consistent.
    pub fn corrupt(&mut self, level: usize, p: &Profile, index: usize, f: Flat) {
        if let Some(k) = self.keys.get_mut(&(level, p.clone())) {
            k.index.remove(&k.flats[index]);
            k.index.insert(f.clone(), index as u32);
            k.flats[index] = f;
        }
    }

    pub fn key(&self, level: usize, p: &Profile) -> Option<&OperKey> {
        self.keys.get(&(level, p.clone()))
    }

    pub fn keys(&self) -> impl Iterator<Item = (&Key, &OperKey)> {
        self.keys.iter()
    }

    /// The planar tree and leaf permutation of a canonical element of `Σ^{∘ℓ}`.
    pub fn flatten(&self, level: usize, e: &Elem) -> Result<Flat> {
        match level {
            0 if *e == Elem::point() => Ok(Flat::trivial()),
            1 => match e.as_perm() {
                Some(p) => Ok(Flat::corolla(p.clone())),
                None => invalid("a one-level element is a permutation"),
            },
            _ => {
                let Some(c) = e.as_comp() else {
                    return invalid(format!("not an element of level {level}"));
                };
                let outer = self.flatten(level - 1, &c.outer)?;
                let inv = outer.lambda.inverse();
                let last: Vec<usize> = (0..c.arities.len()).map(|m| c.arities[inv.image(m)]).collect();
                let inners = c
                    .inners
                    .iter()
                    .map(|z| z.as_perm().cloned().ok_or_else(|| Error::Invalid("inner is not a permutation".into())))
                    .collect::<Result<Vec<_>>>()?;
                let lambda = block_sum(&outer.lambda, &inners)?.compose(&c.sigma)?;
                let mut levels = outer.levels;
                levels.push(last);
                Flat::new(levels, lambda)
            }
        }
    }

    /// The canonical element of `Σ^{∘ℓ}` with a given planar tree and leaf permutation.
    pub fn unflatten(&self, f: &Flat) -> Result<Elem> {
        let d = f.depth();
        match d {
            0 => Ok(Elem::point()),
            1 => Ok(Elem::Perm(f.lambda.clone())),
            _ => {
                if d > self.max_level || f.weight() > self.max_weight {
                    return Err(Error::Bound(format!("tree of depth {d} and weight {} exceeds the tower", f.weight())));
                }
                let head = Flat { levels: f.levels[..d - 1].to_vec(), lambda: Perm::identity(f.levels[d - 1].len()) };
                let outer = self.unflatten(&head)?;
                let arities = f.levels[d - 1].clone();
                let inners = arities.iter().map(|&a| Elem::Perm(Perm::identity(a))).collect();
                Ok(normalize(&self.tower[d - 1], &self.tower[1], outer, inners, arities, f.lambda.clone()))
            }
        }
    }

    /// The leveled object with these values.
    pub fn object(&self) -> Result<NLevObject> {
        let mut o = NLevObject::empty(self.mode);
        for ((l, p), k) in &self.keys {
            o.insert(*l, p.clone(), FinObj::with_atoms(self.mode, k.atoms.clone())?)?;
        }
        Ok(o)
    }

    /// The multiplication: graft the attached trees into the vertices of the base.
    pub fn xi(&self, e: &OdotElem) -> Result<Elem> {
        let f = self.xi_flat(e)?;
        let (l, p) = (f.depth(), f.profile());
        let k = self.key(l, &p).ok_or_else(|| Error::Bound(format!("{p} at level {l} is outside the bounds")))?;
        let i = k.index_of(&f).ok_or_else(|| Error::Validation("grafted tree is not an atom".into()))?;
        Ok(k.atoms[i].clone())
    }

    pub fn xi_flat(&self, e: &OdotElem) -> Result<Flat> {
        let base = self.flatten(e.ells.len(), &e.x)?;
        if base.profile() != e.base {
            return invalid("base element does not have the stated profile");
        }
        let mut blow = Vec::with_capacity(base.depth());
        for (j, level) in base.levels.iter().enumerate() {
            let slots = slot_order(level);
            let row =
                (0..level.len()).map(|m| self.flatten(e.ells[j], &e.ys[j][slots[m]])).collect::<Result<Vec<_>>>()?;
            blow.push(row);
        }
        Ok(graft(&base, &e.ells, &blow)?.0)
    }

    /// The unit: the identity of `Σ_n` at the corolla `(n)`.
    pub fn eps(&self, n: usize) -> Elem {
        Elem::Perm(Perm::identity(n))
    }

    /// Left `Σ_t`-action on leaves and right action of the vertex groups, tabulated per key.
    pub fn sym_object(&self) -> Result<SymNLevObject> {
        let mut actions = BTreeMap::new();
        for (key, k) in &self.keys {
            actions.insert(key.clone(), key_actions(k, &key.1)?);
        }
        SymNLevObject::new(self.object()?, actions)
    }
}

/// `g·x = x·g⁻¹` on leaves, and vertex decoration followed by renormalization.
pub(crate) fn key_actions(k: &OperKey, p: &Profile) -> Result<KeyActions> {
    let t = p.weight();
    let left = (0..t.saturating_sub(1))
        .map(|i| {
            let g = Perm::adjacent(t, i);
            k.flats
                .iter()
                .map(|f| {
                    let moved = f.with_lambda(f.lambda.compose(&g).expect("same degree"));
                    k.index_of(&moved).expect("closed under the leaf action") as u32
                })
                .collect()
        })
        .collect();
    let mut relabels: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut relabel_index: HashMap<Vec<Vec<usize>>, u32> = HashMap::new();
    let mut right = Vec::new();
    for (j, level) in p.levels().iter().enumerate() {
        for (s, &n) in level.iter().enumerate() {
            for i in 0..n.saturating_sub(1) {
                let mut image = Vec::with_capacity(k.len());
                let mut relabel = Vec::with_capacity(k.len());
                for f in &k.flats {
                    let (g, rho) = decorate(f, j, s, &Perm::adjacent(n, i))?;
                    image.push(
                        k.index_of(&g)
                            .ok_or_else(|| Error::Validation("decoration left the key".into()))?
                            as u32,
                    );
                    let next = relabels.len() as u32;
                    let r = *relabel_index.entry(rho.clone()).or_insert_with(|| {
                        relabels.push(rho);
                        next
                    });
                    relabel.push(r);
                }
                right.push(RightGen { level: j, slot: s, index: i, image, relabel });
            }
        }
    }
    Ok(KeyActions { left, right, relabels })
}

/// Decorates the vertex in sorted slot `s` of level `j` by `g` and renormalizes.
/// Returns the new tree and, per level, where each old slot's vertex now sits.
pub fn decorate(f: &Flat, j: usize, s: usize, g: &Perm) -> Result<(Flat, Vec<Vec<usize>>)> {
    let vertices = f.vertices();
    let target = vertices[j][s];
    let decs: Vec<Vec<Perm>> = f
        .levels
        .iter()
        .enumerate()
        .map(|(jj, l)| {
            l.iter()
                .enumerate()
                .map(|(m, &a)| if jj == j && m == target { g.clone() } else { Perm::identity(a) })
                .collect()
        })
        .collect();
    let (out, places) = renormalize(f, &decs)?;
    let new_slots = out.slots();
    let rho = (0..f.depth())
        .map(|jj| (0..f.levels[jj].len()).map(|ss| new_slots[jj][places[jj][vertices[jj][ss]][0][0]]).collect())
        .collect();
    Ok((out, rho))
}

/// Result of checking one multiplication component `ξ_{k,(ℓ₁,…,ℓ_k)}`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct XiSummary {
    pub targets: usize,
    pub pre_quotient: usize,
    pub classes: usize,
}

impl Oper {
    /// The graft of pre-quotient element `id` of `g`, as an index into the target key.
    fn xi_index(&self, g: &SigmaGroup, id: usize) -> Result<Option<usize>> {
        let (d, x, ys) = g.decode(id);
        let k = g.ells.len();
        let base_key = self.key(k, &g.base).ok_or_else(|| Error::Validation("base key missing".into()))?;
        let base = &base_key.flats[x];
        let fam = &g.decomps[d].family;
        let mut at = 0;
        let mut per_slot: Vec<Vec<&Flat>> = Vec::with_capacity(k);
        for (j, group) in fam.iter().enumerate() {
            let mut row = Vec::with_capacity(group.len());
            for qp in group {
                let qk = self.key(g.ells[j], qp).ok_or_else(|| Error::Validation("attached key missing".into()))?;
                row.push(&qk.flats[ys[at]]);
                at += 1;
            }
            per_slot.push(row);
        }
        let blow: Vec<Vec<Flat>> = base
            .levels
            .iter()
            .enumerate()
            .map(|(j, level)| slot_order(level).iter().map(|&s| per_slot[j][s].clone()).collect())
            .collect();
        let (f, _) = graft(base, &g.ells, &blow)?;
        Ok(self.key(g.target.0, &g.target.1).and_then(|t| t.index_of(&f)))
    }

    /// Checks that `ξ` descends to the symmetric quotient and is a bijection onto
    /// `Oper_ℓ(p)` for every target of weight at most `max_weight`.
    pub fn check_xi(&self, sym: &SymNLevObject, ells: &[usize], max_weight: usize) -> Result<(Report, XiSummary)> {
        let level: usize = ells.iter().sum();
        if level > self.max_level || max_weight > self.max_weight {
            return Err(Error::Bound("signature exceeds the operad's bounds".into()));
        }
        let obj = sym.object();
        let groups = sigma_groups_for(obj, obj, Bounds { max_level: level, max_weight }, Some(ells))?;
        let mut by_target: BTreeMap<Key, Vec<&SigmaGroup>> = BTreeMap::new();
        for g in &groups {
            by_target.entry(g.target.clone()).or_default().push(g);
        }
        let mut report = Report::default();
        let mut summary = XiSummary::default();
        let sig = format!("{ells:?}");
        for ((l, p), target) in
            self.keys.iter().filter(|((l, p), _)| *l == level && p.weight() <= max_weight && p.is_positive())
        {
            summary.targets += 1;
            let label = format!("xi {sig} at {p}");
            let mut hit: Vec<Option<(usize, usize)>> = vec![None; target.len()];
            for (gi, g) in by_target.get(&(*l, p.clone())).into_iter().flatten().enumerate() {
                let cl = sigma_classes(sym, sym, g)?;
                summary.pre_quotient += g.total;
                summary.classes += cl.count();
                let mut value: Vec<Option<usize>> = vec![None; cl.count()];
                for id in 0..g.total {
                    let v = self.xi_index(g, id)?;
                    let c = cl.class_of[id] as usize;
                    let rep = cl.reps[c];
                    let ok = v.is_some() && (value[c].is_none() || value[c] == v);
                    report.check(&format!("{label}: constant on classes"), p.weight(), ok, || {
                        (g.element(obj, obj, id).encode(), g.element(obj, obj, rep).encode(), Elem::Base)
                    });
                    if value[c].is_none() {
                        value[c] = v;
                    }
                }
                for (c, v) in value.iter().enumerate() {
                    let Some(v) = *v else { continue };
                    let clash = hit[v].filter(|&(hg, hc)| (hg, hc) != (gi, c));
                    report.check(&format!("{label}: injective"), p.weight(), clash.is_none(), || {
                        (g.element(obj, obj, cl.reps[c]).encode(), target.atoms[v].clone(), Elem::Base)
                    });
                    hit[v] = Some((gi, c));
                }
            }
            for (v, h) in hit.iter().enumerate() {
                report.check(&format!("{label}: surjective"), p.weight(), h.is_some(), || {
                    (target.atoms[v].clone(), Elem::Base, target.atoms[v].clone())
                });
            }
        }
        Ok((report, summary))
    }
}

impl Oper {
    /// The multiplication applied to every attached element of `e`, then to the result.
    fn xi_nested(&self, e: &OdotElem) -> Result<Elem> {
        let ys =
            e.ys.iter()
                .map(|g| g.iter().map(|w| self.xi(&OdotElem::decode(w)?)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
        let family =
            e.ys.iter()
                .map(|g| g.iter().map(|w| OdotElem::decode(w)?.profile()).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
        self.xi(&OdotElem { ells: e.ells.clone(), base: e.base.clone(), x: e.x.clone(), family, ys })
    }

    /// Associativity and unitality of `ξ`, elementwise on `(O⊙O)⊙O` and on every atom.
    pub fn check_laws(&self, bounds: Bounds) -> Result<Report> {
        let o = self.object()?.restrict(bounds.max_level, bounds.max_weight);
        let oo = super::odot::odot(&o, &o, Bounds { max_level: bounds.max_level, max_weight: bounds.max_weight })?;
        let mut report = Report::default();
        for ((_, p), elems) in super::odot::odot_elems(&oo, &o, bounds)? {
            for e in elems {
                let z = OdotElem::decode(&e.x)?;
                let inner = self.xi(&z)?;
                let lhs = self.xi(&OdotElem { x: inner, ..e.clone() })?;
                let rhs = self.xi_nested(&super::odot::assoc_forward(&e)?)?;
                report.record(&format!("xi associativity at {p}"), p.weight(), &e.encode(), lhs, rhs);
            }
        }
        for ((l, p), k) in &self.keys {
            if *l > bounds.max_level || p.weight() > bounds.max_weight {
                continue;
            }
            for x in &k.atoms {
                let right = super::odot::right_unit_inverse(&(*l, p.clone()), x);
                let right = OdotElem {
                    ys: p.levels().iter().map(|lv| lv.iter().map(|&n| self.eps(n)).collect()).collect(),
                    ..right
                };
                report.record(&format!("right unit at {p}"), p.weight(), x, self.xi(&right)?, x.clone());
                let left = super::odot::left_unit_inverse(&(*l, p.clone()), x);
                let left = OdotElem { x: self.eps(p.weight()), ..left };
                report.record(&format!("left unit at {p}"), p.weight(), x, self.xi(&left)?, x.clone());
            }
        }
        Ok(report)
    }

    /// `𝓘^Σ`: the level-one part of this operad with its actions.
    pub fn isigma(&self) -> Result<SymNLevObject> {
        let mut obj = NLevObject::empty(self.mode);
        let mut actions = BTreeMap::new();
        for ((l, p), k) in self.keys.iter().filter(|((l, _), _)| *l == 1) {
            obj.insert(*l, p.clone(), FinObj::with_atoms(self.mode, k.atoms.clone())?)?;
            actions.insert((*l, p.clone()), key_actions(k, p)?);
        }
        SymNLevObject::new(obj, actions)
    }
}

/// Entries of the underlying colored operad: input colors (sorted descending)
/// and output color, listing the contributing keys and atoms.
pub type ColoredTable = BTreeMap<(Vec<usize>, usize), Vec<(Key, Elem)>>;

/// `(𝕌P)(c₁,…,c_k; t)`: the disjoint union of `P_ℓ(p; t)` over profiles whose
/// entries are `c₁,…,c_k`.
pub fn forget_to_colored(p: &NLevObject) -> ColoredTable {
    let mut out: ColoredTable = BTreeMap::new();
    for ((l, prof), obj) in p.iter() {
        let colors = prof.colors();
        let entry = out.entry((colors, prof.weight())).or_default();
        entry.extend(obj.real_atoms().iter().map(|a| ((*l, prof.clone()), a.clone())));
    }
    out.retain(|_, v| !v.is_empty());
    out
}
