//! The nonsymmetric composition product of leveled objects.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use itertools::Itertools;

use super::flat::slot_order;
use super::object::{Key, NLevObject};
use crate::error::{invalid, Error, Result};
use crate::kernel::{Elem, FinObj};
use crate::profiles::Profile;
use crate::symseq::Report;

const ODOT_TAG: u32 = 0x0D07;

/// Output bounds for a composition product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub max_level: usize,
    pub max_weight: usize,
}

/// One summand element of `P⊙Q`: a base element `x ∈ P_k(base)` and, for every
/// sorted slot `s` of level `j` of `base`, an element `ys[j][s] ∈ Q_{ells[j]}(family[j][s])`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OdotElem {
    pub ells: Vec<usize>,
    pub base: Profile,
    pub x: Elem,
    pub family: Vec<Vec<Profile>>,
    pub ys: Vec<Vec<Elem>>,
}

pub(crate) fn encode_profile(p: &Profile) -> Elem {
    Elem::Tuple(p.levels().iter().map(|l| Elem::Tuple(l.iter().map(|&v| Elem::Atom(v as u32)).collect())).collect())
}

pub(crate) fn decode_profile(e: &Elem) -> Result<Profile> {
    let Elem::Tuple(levels) = e else {
        return invalid("profile encoding");
    };
    let levels = levels
        .iter()
        .map(|l| match l {
            Elem::Tuple(vs) => vs
                .iter()
                .map(|v| match v {
                    Elem::Atom(a) => Ok(*a as usize),
                    _ => invalid("profile entry"),
                })
                .collect::<Result<Vec<_>>>(),
            _ => invalid("profile level"),
        })
        .collect::<Result<Vec<_>>>()?;
    Profile::new(levels)
}

fn nat_tuple(v: &[usize]) -> Elem {
    Elem::Tuple(v.iter().map(|&a| Elem::Atom(a as u32)).collect())
}

fn tuple(e: &Elem) -> Result<&[Elem]> {
    match e {
        Elem::Tuple(v) => Ok(v),
        _ => invalid("expected a tuple"),
    }
}

/// Levels of the composite profile: level `s` of group `j` concatenates level `s`
/// of every attached profile in slot order.
pub(crate) fn composite_levels(ells: &[usize], family: &[Vec<Profile>]) -> Vec<Vec<usize>> {
    let mut levels = Vec::new();
    for (j, &ell) in ells.iter().enumerate() {
        for s in 0..ell {
            levels.push(family[j].iter().flat_map(|q| q.levels()[s].iter().copied()).collect());
        }
    }
    levels
}

impl OdotElem {
    pub fn level(&self) -> usize {
        self.ells.iter().sum()
    }

    pub fn profile(&self) -> Result<Profile> {
        Profile::new(composite_levels(&self.ells, &self.family))
    }

    pub fn key(&self) -> Result<Key> {
        Ok((self.level(), self.profile()?))
    }

    pub fn encode(&self) -> Elem {
        let family =
            Elem::Tuple(self.family.iter().map(|g| Elem::Tuple(g.iter().map(encode_profile).collect())).collect());
        let ys = Elem::Tuple(self.ys.iter().map(|g| Elem::Tuple(g.clone())).collect());
        Elem::Tag(
            ODOT_TAG,
            Box::new(Elem::Tuple(vec![nat_tuple(&self.ells), encode_profile(&self.base), self.x.clone(), family, ys])),
        )
    }

    pub fn decode(e: &Elem) -> Result<OdotElem> {
        let Elem::Tag(ODOT_TAG, inner) = e else {
            return invalid("not a composition product element");
        };
        let parts = tuple(inner)?;
        if parts.len() != 5 {
            return invalid("composition product element has five parts");
        }
        let ells = tuple(&parts[0])?
            .iter()
            .map(|a| match a {
                Elem::Atom(v) => Ok(*v as usize),
                _ => invalid("level entry"),
            })
            .collect::<Result<Vec<_>>>()?;
        let base = decode_profile(&parts[1])?;
        let family = tuple(&parts[3])?
            .iter()
            .map(|g| tuple(g)?.iter().map(decode_profile).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let ys = tuple(&parts[4])?.iter().map(|g| Ok(tuple(g)?.to_vec())).collect::<Result<Vec<_>>>()?;
        Ok(OdotElem { ells, base, x: parts[2].clone(), family, ys })
    }
}

/// Ordered compositions of `total` into `k` non-negative parts.
pub(crate) fn compositions(total: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    (0..=total)
        .flat_map(|first| {
            compositions(total - first, k - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

/// Nonempty entries of an object grouped by `(level, weight)`.
type Support<'a> = HashMap<(usize, usize), Vec<(&'a Profile, &'a [Elem])>>;

fn support(q: &NLevObject) -> Support<'_> {
    let mut out: Support<'_> = HashMap::new();
    for ((l, p), obj) in q.iter() {
        if obj.real_len() > 0 {
            out.entry((*l, p.weight())).or_default().push((p, obj.real_atoms()));
        }
    }
    out
}

/// Every element of `P⊙Q` within the bounds, grouped by output key.
pub fn odot_elems(p: &NLevObject, q: &NLevObject, bounds: Bounds) -> Result<BTreeMap<Key, Vec<OdotElem>>> {
    if p.mode() != q.mode() {
        return Err(Error::ModeMismatch);
    }
    let qs = &support(q);
    let mut out: BTreeMap<Key, Vec<OdotElem>> = BTreeMap::new();
    for ((k, base), obj) in p.iter() {
        if base.weight() > bounds.max_weight || obj.real_len() == 0 {
            continue;
        }
        for total in 0..=bounds.max_level {
            for ells in compositions(total, *k) {
                // Profile choices per slot, flattened over all levels.
                let slot_choices: Vec<&Vec<(&Profile, &[Elem])>> = match base
                    .levels()
                    .iter()
                    .zip(&ells)
                    .flat_map(|(level, &ell)| level.iter().map(move |&n| qs.get(&(ell, n))))
                    .collect::<Option<Vec<_>>>()
                {
                    Some(c) => c,
                    None => continue,
                };
                let sizes: Vec<usize> = base.levels().iter().map(Vec::len).collect();
                for pick in product(&slot_choices) {
                    let family = split(&pick.iter().map(|(q, _)| (*q).clone()).collect::<Vec<_>>(), &sizes);
                    let target = Profile::new(composite_levels(&ells, &family))?;
                    let atom_lists: Vec<&[Elem]> = pick.iter().map(|(_, a)| *a).collect();
                    let atom_lists: Vec<Vec<Elem>> = atom_lists.iter().map(|a| a.to_vec()).collect();
                    let bucket = out.entry((total, target)).or_default();
                    for x in obj.real_atoms() {
                        for ys in product(&atom_lists) {
                            bucket.push(OdotElem {
                                ells: ells.clone(),
                                base: base.clone(),
                                x: x.clone(),
                                family: family.clone(),
                                ys: split(&ys, &sizes),
                            });
                        }
                    }
                }
            }
        }
    }
    out.retain(|_, v| !v.is_empty());
    Ok(out)
}

/// Cartesian product that yields one empty tuple for no factors.
pub(crate) fn product<T: Clone, S: AsRef<[T]>>(factors: &[S]) -> Vec<Vec<T>> {
    if factors.is_empty() {
        return vec![Vec::new()];
    }
    factors.iter().map(|f| f.as_ref().iter().cloned()).multi_cartesian_product().collect()
}

pub(crate) fn split<T: Clone>(flat: &[T], sizes: &[usize]) -> Vec<Vec<T>> {
    let mut out = Vec::with_capacity(sizes.len());
    let mut at = 0;
    for &s in sizes {
        out.push(flat[at..at + s].to_vec());
        at += s;
    }
    out
}

/// `P⊙Q` as a leveled object whose atoms are encoded [`OdotElem`]s.
pub fn odot(p: &NLevObject, q: &NLevObject, bounds: Bounds) -> Result<NLevObject> {
    let mut out = NLevObject::empty(p.mode());
    for ((l, prof), elems) in odot_elems(p, q, bounds)? {
        let atoms = elems.iter().map(OdotElem::encode).collect();
        out.insert(l, prof, FinObj::with_atoms(p.mode(), atoms)?)?;
    }
    Ok(out)
}

/// For attached profiles listed in slot order, the sorted slot of the composite
/// level `s` taken by entry `v` of level `s` of profile `u`: `result[s][u][v]`.
pub(crate) fn composite_slots(parts: &[Profile], ell: usize) -> Vec<Vec<Vec<usize>>> {
    (0..ell)
        .map(|s| {
            let level: Vec<usize> = parts.iter().flat_map(|q| q.levels()[s].iter().copied()).collect();
            let rank = slot_order(&level);
            let mut at = 0;
            parts
                .iter()
                .map(|q| {
                    let n = q.levels()[s].len();
                    let r = rank[at..at + n].to_vec();
                    at += n;
                    r
                })
                .collect()
        })
        .collect()
}

/// Regroups `((x; ys); rs) ∈ (P⊙Q)⊙R` as `(x; (ys; rs)) ∈ P⊙(Q⊙R)`.
pub fn assoc_forward(e: &OdotElem) -> Result<OdotElem> {
    let z = OdotElem::decode(&e.x)?;
    let mut start = 0;
    let mut ells = Vec::with_capacity(z.ells.len());
    let mut family = Vec::with_capacity(z.ells.len());
    let mut ws = Vec::with_capacity(z.ells.len());
    for (i, &ki) in z.ells.iter().enumerate() {
        let sub_ells = e.ells[start..start + ki].to_vec();
        let slots = composite_slots(&z.family[i], ki);
        let mut fam_i = Vec::with_capacity(z.family[i].len());
        let mut ws_i = Vec::with_capacity(z.family[i].len());
        for (u, q) in z.family[i].iter().enumerate() {
            let mut rfam = Vec::with_capacity(ki);
            let mut rys = Vec::with_capacity(ki);
            for (s, row) in slots.iter().enumerate() {
                rfam.push(row[u].iter().map(|&r| e.family[start + s][r].clone()).collect());
                rys.push(row[u].iter().map(|&r| e.ys[start + s][r].clone()).collect());
            }
            let w = OdotElem { ells: sub_ells.clone(), base: q.clone(), x: z.ys[i][u].clone(), family: rfam, ys: rys };
            fam_i.push(w.profile()?);
            ws_i.push(w.encode());
        }
        ells.push(sub_ells.iter().sum());
        family.push(fam_i);
        ws.push(ws_i);
        start += ki;
    }
    Ok(OdotElem { ells, base: z.base, x: z.x, family, ys: ws })
}

/// Inverse regrouping. Fails when the elements attached along one level of the
/// base come from summands with different level splittings, since those have no
/// counterpart in `(P⊙Q)⊙R`.
pub fn assoc_backward(e: &OdotElem) -> Result<OdotElem> {
    let mut eq = Vec::new();
    let mut er = Vec::new();
    let mut qfam = Vec::new();
    let mut qys = Vec::new();
    let mut inner: Vec<Vec<OdotElem>> = Vec::new();
    for (i, group) in e.ys.iter().enumerate() {
        let ws = group.iter().map(OdotElem::decode).collect::<Result<Vec<_>>>()?;
        let Some(first) = ws.first() else {
            return invalid(format!("level {i} of the base has no vertices"));
        };
        if let Some(w) = ws.iter().find(|w| w.ells != first.ells) {
            return invalid(format!("level {i} mixes splittings {:?} and {:?}", first.ells, w.ells));
        }
        eq.push(first.ells.len());
        er.extend(first.ells.iter().copied());
        qfam.push(ws.iter().map(|w| w.base.clone()).collect::<Vec<_>>());
        qys.push(ws.iter().map(|w| w.x.clone()).collect::<Vec<_>>());
        inner.push(ws);
    }
    let z = OdotElem { ells: eq.clone(), base: e.base.clone(), x: e.x.clone(), family: qfam, ys: qys };
    let mid = z.profile()?;
    let mut rfam: Vec<Vec<Option<Profile>>> = mid.levels().iter().map(|l| vec![None; l.len()]).collect();
    let mut rys: Vec<Vec<Option<Elem>>> = mid.levels().iter().map(|l| vec![None; l.len()]).collect();
    let mut start = 0;
    for (i, &ki) in eq.iter().enumerate() {
        let slots = composite_slots(&z.family[i], ki);
        for (u, w) in inner[i].iter().enumerate() {
            for s in 0..ki {
                for (v, &r) in slots[s][u].iter().enumerate() {
                    rfam[start + s][r] = Some(w.family[s][v].clone());
                    rys[start + s][r] = Some(w.ys[s][v].clone());
                }
            }
        }
        start += ki;
    }
    let family = rfam.into_iter().map(|l| l.into_iter().map(|q| q.expect("every slot filled")).collect()).collect();
    let ys = rys.into_iter().map(|l| l.into_iter().map(|y| y.expect("every slot filled")).collect()).collect();
    Ok(OdotElem { ells: er, base: mid, x: z.encode(), family, ys })
}

/// `P⊙𝓘 → P`: defined on elements whose attached profiles are all corollas.
pub fn right_unit(e: &OdotElem) -> Result<(Key, Elem)> {
    if e.ells.iter().any(|&l| l != 1) || e.family.iter().flatten().any(|q| q.depth() != 1) {
        return invalid("not an element of P⊙𝓘");
    }
    Ok(((e.base.depth(), e.base.clone()), e.x.clone()))
}

/// `𝓘⊙P → P`: the base is a single corolla carrying one attached element.
pub fn left_unit(e: &OdotElem) -> Result<(Key, Elem)> {
    if e.ells.len() != 1 || e.base.depth() != 1 {
        return invalid("not an element of 𝓘⊙P");
    }
    Ok(((e.ells[0], e.family[0][0].clone()), e.ys[0][0].clone()))
}

/// Inverse of [`right_unit`].
pub fn right_unit_inverse(key: &Key, x: &Elem) -> OdotElem {
    let (k, p) = key;
    OdotElem {
        ells: vec![1; *k],
        base: p.clone(),
        x: x.clone(),
        family: p.levels().iter().map(|l| l.iter().map(|&n| Profile::root(n)).collect()).collect(),
        ys: p.levels().iter().map(|l| vec![Elem::point(); l.len()]).collect(),
    }
}

/// Inverse of [`left_unit`].
pub fn left_unit_inverse(key: &Key, y: &Elem) -> OdotElem {
    let (l, p) = key;
    let t = p.weight();
    OdotElem {
        ells: vec![*l],
        base: Profile::root(t),
        x: Elem::point(),
        family: vec![vec![p.clone()]],
        ys: vec![vec![y.clone()]],
    }
}

fn key_label(diagram: &str, key: &Key) -> String {
    format!("{diagram} at level {} profile {}", key.0, key.1)
}

/// The image of one element under a tabulated structure map, or the reason it has none.
pub type Mapped = std::result::Result<(Key, Elem), String>;

type StructureMap<'a> = dyn Fn(&Key, &Elem) -> Result<(Key, Elem)> + 'a;

/// A structure map `src → dst` and its claimed inverse, tabulated on every element.
#[derive(Clone, Debug)]
pub struct BijectionTable {
    pub diagram: String,
    src: BTreeMap<Key, Vec<Elem>>,
    dst: BTreeMap<Key, BTreeSet<Elem>>,
    forward: HashMap<(Key, Elem), Mapped>,
    backward: HashMap<(Key, Elem), Mapped>,
}

impl BijectionTable {
    fn new(
        diagram: &str,
        src: BTreeMap<Key, Vec<Elem>>,
        dst: BTreeMap<Key, BTreeSet<Elem>>,
        f: impl Fn(&Key, &Elem) -> Result<(Key, Elem)>,
        g: impl Fn(&Key, &Elem) -> Result<(Key, Elem)>,
    ) -> Self {
        let tab =
            |k: &Key, e: &Elem, h: &StructureMap| ((k.clone(), e.clone()), h(k, e).map_err(|err| err.to_string()));
        let mut forward = HashMap::new();
        let mut backward = HashMap::new();
        for (k, elems) in &src {
            for e in elems {
                let (at, img) = tab(k, e, &f);
                if let Ok((k2, e2)) = &img {
                    let (b, v) = tab(k2, e2, &g);
                    backward.insert(b, v);
                }
                forward.insert(at, img);
            }
        }
        for (k, elems) in &dst {
            for e in elems {
                let (b, v) = tab(k, e, &g);
                backward.insert(b, v);
            }
        }
        BijectionTable { diagram: diagram.to_string(), src, dst, forward, backward }
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    /// The first source element in key order.
    pub fn first(&self) -> Option<(Key, Elem)> {
        self.src.iter().find_map(|(k, v)| v.first().map(|e| (k.clone(), e.clone())))
    }

    /// Overwrites the forward image of `e`.
    pub fn corrupt(&mut self, key: &Key, e: &Elem, image: Mapped) {
        self.forward.insert((key.clone(), e.clone()), image);
    }

    /// Checks that the forward map sends `src` bijectively onto `dst`, key by key,
    /// with the backward map as inverse.
    pub fn check(&self, report: &mut Report) {
        let diagram = self.diagram.as_str();
        let missing = || Err("untabulated".to_string());
        let mut hit: BTreeMap<Key, BTreeSet<Elem>> = BTreeMap::new();
        for (key, elems) in &self.src {
            for e in elems {
                let label = key_label(diagram, key);
                match self.forward.get(&(key.clone(), e.clone())).cloned().unwrap_or_else(missing) {
                    Ok((k2, e2)) => {
                        let present = self.dst.get(&k2).is_some_and(|s| s.contains(&e2));
                        let back = self.backward.get(&(k2.clone(), e2.clone())).and_then(|b| b.as_ref().ok());
                        let fresh = hit.entry(k2.clone()).or_default().insert(e2.clone());
                        let ok = present && fresh && k2 == *key && back == Some(&(key.clone(), e.clone()));
                        let rhs = if ok { e2.clone() } else { Elem::Base };
                        report.record(&label, key.1.weight(), e, e2, rhs);
                    }
                    Err(err) => report.record(&format!("{label} ({err})"), key.1.weight(), e, e.clone(), Elem::Base),
                }
            }
        }
        for (key, elems) in &self.dst {
            for e in elems {
                if !hit.get(key).is_some_and(|s| s.contains(e)) {
                    let reason = match self.backward.get(&(key.clone(), e.clone())).cloned().unwrap_or_else(missing) {
                        Ok(_) => "not in image".to_string(),
                        Err(err) => format!("not in image: {err}"),
                    };
                    report.record(
                        &format!("{} ({reason})", key_label(diagram, key)),
                        key.1.weight(),
                        e,
                        e.clone(),
                        Elem::Base,
                    );
                }
            }
        }
    }
}

fn encoded(m: BTreeMap<Key, Vec<OdotElem>>) -> BTreeMap<Key, Vec<Elem>> {
    m.into_iter().map(|(k, v)| (k, v.iter().map(OdotElem::encode).collect())).collect()
}

fn as_sets(m: &BTreeMap<Key, Vec<Elem>>) -> BTreeMap<Key, BTreeSet<Elem>> {
    m.iter().map(|(k, v)| (k.clone(), v.iter().cloned().collect())).collect()
}

fn atoms_by_key(p: &NLevObject, bounds: Bounds) -> BTreeMap<Key, Vec<Elem>> {
    p.iter()
        .filter(|((l, q), o)| *l <= bounds.max_level && q.weight() <= bounds.max_weight && o.real_len() > 0)
        .map(|(k, o)| (k.clone(), o.real_atoms().to_vec()))
        .collect()
}

/// The associativity regrouping `(P⊙Q)⊙R → P⊙(Q⊙R)` and both unit maps, tabulated within the bounds.
pub fn monoidal_tables(p: &NLevObject, q: &NLevObject, r: &NLevObject, bounds: Bounds) -> Result<Vec<BijectionTable>> {
    let wide = Bounds { max_level: p.max_level() * q.max_level().max(1), max_weight: bounds.max_weight };
    let pq = odot(p, q, wide)?;
    let left = encoded(odot_elems(&pq, r, bounds)?);
    let qr = odot(q, r, bounds)?;
    let right = as_sets(&encoded(odot_elems(p, &qr, bounds)?));
    let fwd = |_: &Key, e: &Elem| {
        let out = assoc_forward(&OdotElem::decode(e)?)?;
        Ok((out.key()?, out.encode()))
    };
    let bwd = |_: &Key, e: &Elem| {
        let out = assoc_backward(&OdotElem::decode(e)?)?;
        Ok((out.key()?, out.encode()))
    };
    let assoc = BijectionTable::new("associativity", left, right, fwd, bwd);

    let unit = NLevObject::unit(p.mode(), bounds.max_weight, false);
    let target_sets = as_sets(&atoms_by_key(p, bounds));
    let pi = encoded(odot_elems(p, &unit, bounds)?);
    let right_unit = BijectionTable::new(
        "right unit",
        pi,
        target_sets.clone(),
        |_, e| right_unit(&OdotElem::decode(e)?),
        |k, x| {
            let e = right_unit_inverse(k, x);
            Ok((e.key()?, e.encode()))
        },
    );
    let ip = encoded(odot_elems(&unit, p, bounds)?);
    let left_unit = BijectionTable::new(
        "left unit",
        ip,
        target_sets,
        |_, e| left_unit(&OdotElem::decode(e)?),
        |k, y| {
            let e = left_unit_inverse(k, y);
            Ok((e.key()?, e.encode()))
        },
    );
    Ok(vec![assoc, right_unit, left_unit])
}

/// Elementwise check of the associativity regrouping `(P⊙Q)⊙R ≅ P⊙(Q⊙R)` and
/// both unit bijections, within the bounds.
pub fn check_monoidal(p: &NLevObject, q: &NLevObject, r: &NLevObject, bounds: Bounds) -> Result<Report> {
    let mut report = Report::default();
    for table in monoidal_tables(p, q, r, bounds)? {
        table.check(&mut report);
    }
    Ok(report)
}
