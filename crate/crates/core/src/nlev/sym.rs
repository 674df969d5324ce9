//! Symmetric leveled objects: leaf and vertex actions of `𝓘^Σ`, and the
//! symmetric composition product as a quotient of the nonsymmetric one.

use std::collections::{BTreeMap, HashMap};

use super::object::{Key, NLevObject};
use super::odot::{composite_levels, composite_slots, compositions, product, split, Bounds, OdotElem};
use crate::error::{Error, Result};
use crate::kernel::{Elem, FinObj, UnionFind};
use crate::profiles::Profile;

/// The adjacent transposition `index` of the vertex group at sorted slot
/// `slot` of `level`, acting on the right. Acting on atom `a` gives
/// `image[a]`, and the vertices of every level move to the slots
/// `relabels[relabel[a]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RightGen {
    pub level: usize,
    pub slot: usize,
    pub index: usize,
    pub image: Vec<u32>,
    pub relabel: Vec<u32>,
}

/// Action tables at one key, indexed by position among the real atoms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KeyActions {
    /// `left[i][a]`: the adjacent transposition `i` of `Σ_t` applied to `a`.
    pub left: Vec<Vec<u32>>,
    pub right: Vec<RightGen>,
    pub relabels: Vec<Vec<Vec<usize>>>,
}

impl KeyActions {
    pub fn right_gen(&self, level: usize, slot: usize, index: usize) -> Option<&RightGen> {
        self.right.iter().find(|g| g.level == level && g.slot == slot && g.index == index)
    }
}

/// A leveled object with compatible actions of `𝓘^Σ` on both sides.
#[derive(Clone, Debug)]
pub struct SymNLevObject {
    obj: NLevObject,
    actions: BTreeMap<Key, KeyActions>,
}

impl SymNLevObject {
    /// Validates table shapes, involutivity of every generator, and that
    /// relabelings only exchange slots of equal arity.
    pub fn new(obj: NLevObject, actions: BTreeMap<Key, KeyActions>) -> Result<Self> {
        for ((l, p), o) in obj.iter() {
            let n = o.real_len();
            let a =
                actions.get(&(*l, p.clone())).ok_or_else(|| Error::Validation(format!("no action tables at {p}")))?;
            if a.left.len() != p.weight().saturating_sub(1) {
                return Err(Error::Validation(format!("wrong number of leaf generators at {p}")));
            }
            for row in &a.left {
                check_involution(row, n, p)?;
            }
            let want: usize = p.levels().iter().flatten().map(|&v| v.saturating_sub(1)).sum();
            if a.right.len() != want {
                return Err(Error::Validation(format!("wrong number of vertex generators at {p}")));
            }
            for g in &a.right {
                check_involution(&g.image, n, p)?;
                if g.relabel.len() != n || g.relabel.iter().any(|&r| r as usize >= a.relabels.len()) {
                    return Err(Error::Validation(format!("bad relabel table at {p}")));
                }
            }
            for rho in &a.relabels {
                for (j, level) in p.levels().iter().enumerate() {
                    if rho.get(j).map(Vec::len) != Some(level.len())
                        || rho[j].iter().enumerate().any(|(s, &r)| level.get(r) != Some(&level[s]))
                    {
                        return Err(Error::Validation(format!("relabeling at {p} moves a slot to a different arity")));
                    }
                }
            }
        }
        Ok(SymNLevObject { obj, actions })
    }

    pub fn object(&self) -> &NLevObject {
        &self.obj
    }

    pub fn actions(&self, level: usize, p: &Profile) -> Option<&KeyActions> {
        self.actions.get(&(level, p.clone()))
    }

    /// Trivial actions on every key: a valid structure whenever no relabelling is needed.
    pub fn trivial(obj: NLevObject) -> Result<Self> {
        let mut actions = BTreeMap::new();
        for ((l, p), o) in obj.iter() {
            let n = o.real_len();
            let id: Vec<u32> = (0..n as u32).collect();
            let rho: Vec<Vec<usize>> = p.levels().iter().map(|l| (0..l.len()).collect()).collect();
            let mut right = Vec::new();
            for (j, level) in p.levels().iter().enumerate() {
                for (s, &v) in level.iter().enumerate() {
                    for i in 0..v.saturating_sub(1) {
                        right.push(RightGen { level: j, slot: s, index: i, image: id.clone(), relabel: vec![0; n] });
                    }
                }
            }
            let left = vec![id.clone(); p.weight().saturating_sub(1)];
            actions.insert((*l, p.clone()), KeyActions { left, right, relabels: vec![rho] });
        }
        SymNLevObject::new(obj, actions)
    }
}

fn check_involution(row: &[u32], n: usize, p: &Profile) -> Result<()> {
    if row.len() != n || row.iter().enumerate().any(|(a, &b)| b as usize >= n || row[b as usize] as usize != a) {
        return Err(Error::Validation(format!("generator at {p} is not an involution")));
    }
    Ok(())
}

/// One labelled family of attached profiles within a [`SigmaGroup`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomp {
    pub family: Vec<Vec<Profile>>,
    pub offset: usize,
    /// Atom counts: the base first, then every slot in level order.
    pub radices: Vec<usize>,
}

/// All pre-quotient elements of `P⊙Q` with a fixed target, base profile and
/// level splitting, numbered consecutively.
#[derive(Clone, Debug)]
pub struct SigmaGroup {
    pub target: Key,
    pub base: Profile,
    pub ells: Vec<usize>,
    pub decomps: Vec<Decomp>,
    pub total: usize,
    index: HashMap<Vec<Vec<Profile>>, usize>,
}

impl SigmaGroup {
    pub fn sizes(&self) -> Vec<usize> {
        self.base.levels().iter().map(Vec::len).collect()
    }

    /// The decomposition, base atom and per-slot atoms of element `id`.
    pub fn decode(&self, id: usize) -> (usize, usize, Vec<usize>) {
        let d = self.decomps.partition_point(|dc| dc.offset <= id) - 1;
        let dc = &self.decomps[d];
        let mut rest = id - dc.offset;
        let mut digits = vec![0; dc.radices.len()];
        for (i, &r) in dc.radices.iter().enumerate().rev() {
            digits[i] = rest % r;
            rest /= r;
        }
        (d, digits[0], digits[1..].to_vec())
    }

    pub fn encode(&self, d: usize, x: usize, ys: &[usize]) -> usize {
        let dc = &self.decomps[d];
        let mut id = x;
        for (r, &y) in dc.radices[1..].iter().zip(ys) {
            id = id * r + y;
        }
        dc.offset + id
    }

    pub fn decomp_of(&self, family: &[Vec<Profile>]) -> Option<usize> {
        self.index.get(family).copied()
    }

    /// Materializes element `id` as a product element.
    pub fn element(&self, p: &NLevObject, q: &NLevObject, id: usize) -> OdotElem {
        let (d, x, ys) = self.decode(id);
        let fam = &self.decomps[d].family;
        let k = self.ells.len();
        let xa = p.real_atoms(k, &self.base)[x].clone();
        let mut at = 0;
        let ys = fam
            .iter()
            .enumerate()
            .map(|(j, g)| {
                g.iter()
                    .map(|qp| {
                        let a = q.real_atoms(self.ells[j], qp)[ys[at]].clone();
                        at += 1;
                        a
                    })
                    .collect()
            })
            .collect();
        OdotElem { ells: self.ells.clone(), base: self.base.clone(), x: xa, family: fam.clone(), ys }
    }
}

/// Pre-quotient elements of `P⊙Q` grouped by target, base and level splitting.
pub fn sigma_groups(p: &NLevObject, q: &NLevObject, bounds: Bounds) -> Result<Vec<SigmaGroup>> {
    sigma_groups_for(p, q, bounds, None)
}

/// As [`sigma_groups`], keeping only the level splitting `only` when given.
pub fn sigma_groups_for(
    p: &NLevObject,
    q: &NLevObject,
    bounds: Bounds,
    only: Option<&[usize]>,
) -> Result<Vec<SigmaGroup>> {
    if p.mode() != q.mode() {
        return Err(Error::ModeMismatch);
    }
    let mut by_weight: HashMap<(usize, usize), Vec<(&Profile, usize)>> = HashMap::new();
    for ((l, qp), o) in q.iter() {
        if o.real_len() > 0 {
            by_weight.entry((*l, qp.weight())).or_default().push((qp, o.real_len()));
        }
    }
    type Members = Vec<(Vec<Vec<Profile>>, Vec<usize>)>;
    let mut groups: BTreeMap<(Key, Profile, Vec<usize>), Members> = BTreeMap::new();
    for ((k, base), o) in p.iter() {
        if base.weight() > bounds.max_weight || o.real_len() == 0 {
            continue;
        }
        let sizes: Vec<usize> = base.levels().iter().map(Vec::len).collect();
        for total in 0..=bounds.max_level {
            for ells in compositions(total, *k) {
                if only.is_some_and(|o| o != ells.as_slice()) {
                    continue;
                }
                let choices: Option<Vec<&Vec<(&Profile, usize)>>> = base
                    .levels()
                    .iter()
                    .zip(&ells)
                    .flat_map(|(level, &ell)| level.iter().map(move |&n| (ell, n)))
                    .map(|key| by_weight.get(&key))
                    .collect();
                let Some(choices) = choices else { continue };
                for pick in product(&choices) {
                    let flat: Vec<Profile> = pick.iter().map(|(qp, _)| (*qp).clone()).collect();
                    let family = split(&flat, &sizes);
                    let target = Profile::new(composite_levels(&ells, &family))?;
                    let mut radices = vec![o.real_len()];
                    radices.extend(pick.iter().map(|(_, n)| *n));
                    groups.entry(((total, target), base.clone(), ells.clone())).or_default().push((family, radices));
                }
            }
        }
    }
    Ok(groups
        .into_iter()
        .map(|((target, base, ells), ds)| {
            let mut decomps = Vec::with_capacity(ds.len());
            let mut index = HashMap::new();
            let mut offset = 0;
            for (family, radices) in ds {
                index.insert(family.clone(), decomps.len());
                let size: usize = radices.iter().product();
                decomps.push(Decomp { family, offset, radices });
                offset += size;
            }
            SigmaGroup { target, base, ells, decomps, total: offset, index }
        })
        .filter(|g| g.total > 0)
        .collect())
}

/// Equivalence classes of a group under `(x·τ, ys) ~ (x, τ·ys)`.
#[derive(Clone, Debug)]
pub struct Classes {
    /// Class number of every pre-quotient element.
    pub class_of: Vec<u32>,
    /// Least element of every class.
    pub reps: Vec<usize>,
}

impl Classes {
    pub fn count(&self) -> usize {
        self.reps.len()
    }
}

/// The partner of element `id` under vertex generator `gen` of the base.
pub fn partner(p: &SymNLevObject, q: &SymNLevObject, g: &SigmaGroup, id: usize, gen: &RightGen) -> Result<usize> {
    let k = g.ells.len();
    let pa = p.actions(k, &g.base).ok_or_else(|| Error::Validation("missing base actions".into()))?;
    let (d, x, ys) = g.decode(id);
    let fam = &g.decomps[d].family;
    let rho = &pa.relabels[gen.relabel[x] as usize];
    let sizes = g.sizes();
    let mut new_fam: Vec<Vec<Option<Profile>>> = sizes.iter().map(|&n| vec![None; n]).collect();
    let mut new_ys: Vec<Vec<usize>> = sizes.iter().map(|&n| vec![0; n]).collect();
    let mut at = 0;
    for (j, group) in fam.iter().enumerate() {
        for (s, qp) in group.iter().enumerate() {
            let mut y = ys[at];
            at += 1;
            if j == gen.level && s == gen.slot {
                let qa =
                    q.actions(g.ells[j], qp).ok_or_else(|| Error::Validation(format!("missing actions at {qp}")))?;
                y = qa.left[gen.index][y] as usize;
            }
            new_fam[j][rho[j][s]] = Some(qp.clone());
            new_ys[j][rho[j][s]] = y;
        }
    }
    let new_fam: Vec<Vec<Profile>> =
        new_fam.into_iter().map(|l| l.into_iter().map(|q| q.expect("relabel is a bijection")).collect()).collect();
    let d2 = g.decomp_of(&new_fam).ok_or_else(|| Error::Validation("relabelled family is missing".into()))?;
    let flat: Vec<usize> = new_ys.into_iter().flatten().collect();
    Ok(g.encode(d2, gen.image[x] as usize, &flat))
}

/// Union-find over the pre-quotient elements of one group.
pub fn sigma_classes(p: &SymNLevObject, q: &SymNLevObject, g: &SigmaGroup) -> Result<Classes> {
    let k = g.ells.len();
    let pa = p.actions(k, &g.base).ok_or_else(|| Error::Validation("missing base actions".into()))?;
    let mut uf = UnionFind::new(g.total);
    for id in 0..g.total {
        for gen in &pa.right {
            let other = partner(p, q, g, id, gen)?;
            uf.union(id, other);
        }
    }
    let mut class_of = vec![u32::MAX; g.total];
    let mut root_class: HashMap<usize, u32> = HashMap::new();
    let mut reps = Vec::new();
    for (id, slot) in class_of.iter_mut().enumerate() {
        let r = uf.find(id);
        let c = *root_class.entry(r).or_insert_with(|| {
            reps.push(id);
            reps.len() as u32 - 1
        });
        *slot = c;
    }
    Ok(Classes { class_of, reps })
}

/// `P⊙_Σ Q`: every class is stored by its least pre-quotient element. The leaf
/// action comes from `P`; the vertex actions come from the attached elements.
pub fn odot_sigma(p: &SymNLevObject, q: &SymNLevObject, bounds: Bounds) -> Result<SymNLevObject> {
    let (po, qo) = (p.object(), q.object());
    let groups = sigma_groups(po, qo, bounds)?;
    let mut atoms: BTreeMap<Key, Vec<Elem>> = BTreeMap::new();
    // Per group: classes and the position of each class's atom at its target.
    let mut placed = Vec::with_capacity(groups.len());
    for g in &groups {
        let cl = sigma_classes(p, q, g)?;
        let list = atoms.entry(g.target.clone()).or_default();
        let start = list.len();
        list.extend(cl.reps.iter().map(|&id| g.element(po, qo, id).encode()));
        placed.push((cl, start));
    }
    let mut obj = NLevObject::empty(po.mode());
    for ((l, prof), list) in &atoms {
        obj.insert(*l, prof.clone(), FinObj::with_atoms(po.mode(), list.clone())?)?;
    }
    let mut actions: BTreeMap<Key, KeyActions> = BTreeMap::new();
    for (key, list) in &atoms {
        let t = key.1.weight();
        let n = list.len();
        let rho: Vec<Vec<usize>> = key.1.levels().iter().map(|l| (0..l.len()).collect()).collect();
        let mut right = Vec::new();
        for (j, level) in key.1.levels().iter().enumerate() {
            for (s, &v) in level.iter().enumerate() {
                for i in 0..v.saturating_sub(1) {
                    right.push(RightGen { level: j, slot: s, index: i, image: vec![0; n], relabel: vec![0; n] });
                }
            }
        }
        actions.insert(
            key.clone(),
            KeyActions { left: vec![vec![0; n]; t.saturating_sub(1)], right, relabels: vec![rho] },
        );
    }
    let mut relabel_ids: BTreeMap<Key, HashMap<Vec<Vec<usize>>, u32>> =
        actions.iter().map(|(k, a)| (k.clone(), HashMap::from([(a.relabels[0].clone(), 0)]))).collect();
    for (g, (cl, start)) in groups.iter().zip(&placed) {
        let k = g.ells.len();
        let pa = p.actions(k, &g.base).ok_or_else(|| Error::Validation("missing base actions".into()))?;
        for (c, &rep) in cl.reps.iter().enumerate() {
            let here = start + c;
            let (d, x, ys) = g.decode(rep);
            for (i, row) in pa.left.iter().enumerate() {
                let other = g.encode(d, row[x] as usize, &ys);
                let dst = start + cl.class_of[other] as usize;
                actions.get_mut(&g.target).expect("target present").left[i][here] = dst as u32;
            }
            let fam = &g.decomps[d].family;
            let mut at = 0;
            let mut offsets = Vec::new();
            for group in fam {
                offsets.push(at);
                at += group.len();
            }
            let mut level_start = 0;
            for (j, &ell) in g.ells.iter().enumerate() {
                let slots = composite_slots(&fam[j], ell);
                for (u, qp) in fam[j].iter().enumerate() {
                    let qa = q.actions(ell, qp).ok_or_else(|| Error::Validation(format!("missing actions at {qp}")))?;
                    let y = ys[offsets[j] + u];
                    for qgen in &qa.right {
                        let mut new_ys = ys.clone();
                        new_ys[offsets[j] + u] = qgen.image[y] as usize;
                        let other = g.encode(d, x, &new_ys);
                        let dst = start + cl.class_of[other] as usize;
                        let qrho = &qa.relabels[qgen.relabel[y] as usize];
                        let out_level = level_start + qgen.level;
                        let out_slot = slots[qgen.level][u][qgen.slot];
                        let mut rho: Vec<Vec<usize>> =
                            g.target.1.levels().iter().map(|l| (0..l.len()).collect()).collect();
                        for (r, level_slots) in slots.iter().enumerate() {
                            for (v, &ps) in level_slots[u].iter().enumerate() {
                                rho[level_start + r][ps] = level_slots[u][qrho[r][v]];
                            }
                        }
                        let ids = relabel_ids.entry(g.target.clone()).or_default();
                        let ka = actions.get_mut(&g.target).expect("target present");
                        let next = ka.relabels.len() as u32;
                        let rid = *ids.entry(rho.clone()).or_insert_with(|| {
                            ka.relabels.push(rho);
                            next
                        });
                        let slot = ka
                            .right
                            .iter_mut()
                            .find(|rg| rg.level == out_level && rg.slot == out_slot && rg.index == qgen.index)
                            .ok_or_else(|| Error::Validation("vertex generator missing at target".into()))?;
                        slot.image[here] = dst as u32;
                        slot.relabel[here] = rid;
                    }
                }
                level_start += ell;
            }
        }
    }
    SymNLevObject::new(obj, actions)
}
