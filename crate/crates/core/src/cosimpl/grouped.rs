use std::collections::HashMap;

use crate::error::Result;
use crate::kernel::Elem;
use crate::symseq::Report;

use super::boxprod::{boxcirc, BoxProduct};
use super::object::{sigma_free_factor, TruncCosimplicial};
use super::theta::{check_grouping, Triple};

/// An elementwise map between cosimplicial sequences, indexed by degree and arity; `None` where undefined.
pub type CoTable = Vec<Vec<HashMap<Elem, Option<Elem>>>>;

fn lookup(t: &CoTable, n: usize, k: usize, e: &Elem) -> Option<Elem> {
    if e.is_base() {
        return Some(Elem::Base);
    }
    t.get(n)?.get(k)?.get(e).cloned().flatten()
}

fn tabulate(src: &TruncCosimplicial, f: impl Fn(usize, usize, &Elem) -> Option<Elem>) -> CoTable {
    src.levels
        .iter()
        .enumerate()
        .map(|(n, l)| {
            (0..=l.arity_bound()).map(|k| l.real_atoms(k).iter().map(|e| (e.clone(), f(n, k, e))).collect()).collect()
        })
        .collect()
}

fn identity(src: &TruncCosimplicial) -> CoTable {
    tabulate(src, |_, _, e| Some(e.clone()))
}

fn then(a: &CoTable, b: &CoTable) -> CoTable {
    a.iter()
        .enumerate()
        .map(|(n, l)| {
            l.iter()
                .enumerate()
                .map(|(k, m)| m.iter().map(|(e, v)| (e.clone(), v.as_ref().and_then(|v| lookup(b, n, k, v)))).collect())
                .collect()
        })
        .collect()
}

/// `f∘̊id` or `id∘̊g` from `src` into `dst`.
fn box_map(src: &BoxProduct, dst: &BoxProduct, left: Option<&CoTable>, right: Option<&CoTable>) -> CoTable {
    let f = |p: usize, k: usize, x: &Elem| left.map_or(Some(x.clone()), |t| lookup(t, p, k, x));
    let g = |q: usize, k: usize, y: &Elem| right.map_or(Some(y.clone()), |t| lookup(t, q, k, y));
    tabulate(&src.result, |n, k, e| src.map_into(dst, n, k, e, &f, &g))
}

fn left_power(factors: &[TruncCosimplicial], bound: usize) -> Result<TruncCosimplicial> {
    let mut acc = factors[0].clone();
    for f in &factors[1..] {
        acc = boxcirc(&acc, f, bound)?.result;
    }
    Ok(acc)
}

/// The comparison between a grouped power and the left-expanded power of the same factors.
#[derive(Clone, Debug)]
pub struct Grouped {
    /// `X^{∘̊ℓ₁}∘̊⋯∘̊X^{∘̊ℓ_k}`.
    pub grouped: TruncCosimplicial,
    /// `X^{∘̊ℓ}` expanded from the left.
    pub flat: TruncCosimplicial,
    /// `μ`: grouped to flat, by regrouping.
    pub mu: CoTable,
    /// The composite of comparison maps `θ`: flat to grouped.
    pub theta: CoTable,
}

impl Grouped {
    /// `μ∘θ = id` and `θ∘μ = id` atomwise.
    pub fn inverse_report(&self) -> Report {
        let mut report = Report::default();
        let round = |obj: &TruncCosimplicial, a: &CoTable, b: &CoTable, name: &str, report: &mut Report| {
            for (n, l) in obj.levels.iter().enumerate() {
                for k in 0..=l.arity_bound() {
                    for e in l.real_atoms(k) {
                        let back = lookup(a, n, k, e).and_then(|v| lookup(b, n, k, &v)).unwrap_or(Elem::Base);
                        report.record(&format!("{name} at degree {n}"), k, e, back, e.clone());
                    }
                }
            }
        };
        round(&self.flat, &self.theta, &self.mu, "mu theta = id", &mut report);
        round(&self.grouped, &self.mu, &self.theta, "theta mu = id", &mut report);
        report
    }

    /// True when `μ` is the identity table.
    pub fn mu_is_identity(&self) -> bool {
        self.mu.iter().enumerate().all(|(n, l)| {
            l.iter()
                .enumerate()
                .all(|(k, m)| m.iter().all(|(e, v)| v.as_ref() == Some(e) && self.flat.levels[n].contains(k, e)))
        })
    }
}

/// `μ_{ℓ₁,…,ℓ_k}` and the matching `θ` for `Σ`-free factors.
///
/// Each factor must admit a `Σ·Y` factorization; the first one that does not is reported.
pub fn sigma_free_mu(factors: &[TruncCosimplicial], grouping: &[usize], bound: usize) -> Result<Grouped> {
    check_grouping(grouping, factors.len())?;
    for f in factors {
        sigma_free_factor(f)?;
    }
    let mut groups = Vec::with_capacity(grouping.len());
    let mut start = 0;
    for &l in grouping {
        groups.push(factors[start..start + l].to_vec());
        start += l;
    }
    flatten(&groups, bound)
}

fn flatten(groups: &[Vec<TruncCosimplicial>], bound: usize) -> Result<Grouped> {
    if groups.len() == 1 {
        let obj = left_power(&groups[0], bound)?;
        let id = identity(&obj);
        return Ok(Grouped { grouped: obj.clone(), flat: obj, mu: id.clone(), theta: id });
    }
    let (head, last) = groups.split_at(groups.len() - 1);
    let last = &last[0];
    let inner = flatten(head, bound)?;
    let p_last = left_power(last, bound)?;
    let g = boxcirc(&inner.grouped, &p_last, bound)?;
    let mid = boxcirc(&inner.flat, &p_last, bound)?;
    let to_mid = box_map(&g, &mid, Some(&inner.mu), None);
    let from_mid = box_map(&mid, &g, Some(&inner.theta), None);
    let (flat, attach_mu, attach_theta) = attach(&inner.flat, last, bound)?;
    Ok(Grouped { grouped: g.result, flat, mu: then(&to_mid, &attach_mu), theta: then(&attach_theta, &from_mid) })
}

/// Maps between `A∘̊P(g)` and `A` followed by the factors of `g`, expanded from the left.
fn attach(
    a: &TruncCosimplicial,
    g: &[TruncCosimplicial],
    bound: usize,
) -> Result<(TruncCosimplicial, CoTable, CoTable)> {
    if g.len() == 1 {
        let obj = boxcirc(a, &g[0], bound)?.result;
        let id = identity(&obj);
        return Ok((obj, id.clone(), id));
    }
    let (g_head, w) = g.split_at(g.len() - 1);
    let w = &w[0];
    let q = left_power(g_head, bound)?;
    let tri = Triple::new(a, &q, w, bound)?;
    let d = tri.x_yz.result.degree_bound;
    let yz_members: Vec<_> = (0..=d).map(|n| tri.yz.members(n)).collect();
    let t_members: Vec<_> = (0..=d).map(|n| tri.x_yz.members(n)).collect();
    let regroup = tabulate(&tri.x_yz.result, |n, k, t| tri.regroup(n, k, t, &t_members[n], &yz_members));
    let theta = tabulate(&tri.xy_z.result, |n, k, e| Some(tri.theta(n, k, e)));
    let (inner_flat, inner_mu, inner_theta) = attach(a, g_head, bound)?;
    let outer = boxcirc(&inner_flat, w, bound)?;
    let up = box_map(&tri.xy_z, &outer, Some(&inner_mu), None);
    let down = box_map(&outer, &tri.xy_z, Some(&inner_theta), None);
    Ok((outer.result, then(&regroup, &up), then(&down, &theta)))
}
