use std::collections::HashMap;

use crate::error::{invalid, Result};
use crate::kernel::Elem;
use crate::symseq::{assoc_left, assoc_right, normalize, Report};

use super::boxprod::{boxcirc, tag, BoxProduct};
use super::grouped::CoTable;
use super::object::{sigma_free_factor, TruncCosimplicial};

/// The two groupings of `X∘̊Y∘̊Z` with the comparison `θ: (X∘̊Y)∘̊Z → X∘̊(Y∘̊Z)`.
#[derive(Clone, Debug)]
pub struct Triple {
    pub xy: BoxProduct,
    pub xy_z: BoxProduct,
    pub yz: BoxProduct,
    pub x_yz: BoxProduct,
}

/// Bijectivity of `θ` per degree, with the first collision and missed element.
#[derive(Clone, Debug, Default)]
pub struct ThetaReport {
    pub bijective: bool,
    pub source_sizes: Vec<usize>,
    pub target_sizes: Vec<usize>,
    /// Two source atoms with the same image: `(degree, arity, a, b)`.
    pub collision: Option<(usize, usize, Elem, Elem)>,
    /// A target atom outside the image: `(degree, arity, t)`.
    pub missed: Option<(usize, usize, Elem)>,
    /// Independence of the chosen representative.
    pub well_defined: Report,
}

impl Triple {
    pub fn new(x: &TruncCosimplicial, y: &TruncCosimplicial, z: &TruncCosimplicial, bound: usize) -> Result<Self> {
        let xy = boxcirc(x, y, bound)?;
        let xy_z = boxcirc(&xy.result, z, bound)?;
        let yz = boxcirc(y, z, bound)?;
        let x_yz = boxcirc(x, &yz.result, bound)?;
        Ok(Triple { xy, xy_z, yz, x_yz })
    }

    fn x(&self) -> &TruncCosimplicial {
        &self.xy.left
    }

    fn y(&self) -> &TruncCosimplicial {
        &self.xy.right
    }

    fn z(&self) -> &TruncCosimplicial {
        &self.yz.right
    }

    /// `θ` on a cover atom `Tag(a, u∘(z…))` of `((X∘̊Y)∘̊Z)ⁿ` with `u = Tag(p, x∘(y…))`.
    pub fn theta(&self, n: usize, k: usize, e: &Elem) -> Elem {
        let Elem::Tag(a, c) = e else {
            return Elem::Base;
        };
        let a = *a as usize;
        let Elem::Comp(c) = c.as_ref() else {
            return Elem::Base;
        };
        let Elem::Tag(p, v) = &c.outer else {
            return Elem::Base;
        };
        let p = *p as usize;
        let (q, r) = (a - p, n - a);
        let flat = Elem::comp(v.as_ref().clone(), c.inners.clone(), c.arities.clone(), c.sigma.clone());
        let (xs, ys, zs) = (&self.x().levels[p], &self.y().levels[q], &self.z().levels[r]);
        let Elem::Comp(w) = assoc_right(xs, ys, zs, &self.yz.parts[q][r], &flat) else {
            return Elem::Base;
        };
        let inners: Vec<Elem> =
            w.inners.iter().zip(&w.arities).map(|(v, &ki)| self.yz.class(q + r, ki, &tag(q, v.clone()))).collect();
        let yz_level = &self.yz.result.levels[q + r];
        let out = normalize(xs, yz_level, w.outer.clone(), inners, w.arities.clone(), w.sigma.clone());
        self.x_yz.class(n, k, &tag(p, out))
    }

    /// A preimage of a target atom found by regrouping along a common split of its inner factors.
    ///
    /// Every member of the target class is tried; `None` when no member admits a common split.
    pub fn regroup(
        &self,
        n: usize,
        k: usize,
        t: &Elem,
        members: &[HashMap<Elem, Vec<Elem>>],
        yz_members: &[Vec<HashMap<Elem, Vec<Elem>>>],
    ) -> Option<Elem> {
        for m in members[k].get(t)? {
            let Elem::Tag(p, c) = m else { continue };
            let p = *p as usize;
            let Elem::Comp(c) = c.as_ref() else { continue };
            let b = n - p;
            'split: for q in 0..=b {
                let mut inners = Vec::with_capacity(c.inners.len());
                for (w, &ki) in c.inners.iter().zip(&c.arities) {
                    let found = yz_members[b][ki].get(w).and_then(|list| {
                        list.iter().find_map(|v| match v {
                            Elem::Tag(s, inner) if *s as usize == q => Some(inner.as_ref().clone()),
                            _ => None,
                        })
                    });
                    match found {
                        Some(v) => inners.push(v),
                        None => continue 'split,
                    }
                }
                let r = b - q;
                let (xs, ys, zs) = (&self.x().levels[p], &self.y().levels[q], &self.z().levels[r]);
                let nested = Elem::comp(c.outer.clone(), inners, c.arities.clone(), c.sigma.clone());
                let Elem::Comp(g) = assoc_left(xs, ys, zs, &self.xy.parts[p][q], &nested) else {
                    continue;
                };
                let u = self.xy.class(p + q, g.inners.len(), &tag(p, g.outer.clone()));
                let out = normalize(
                    &self.xy.result.levels[p + q],
                    zs,
                    u,
                    g.inners.clone(),
                    g.arities.clone(),
                    g.sigma.clone(),
                );
                return Some(self.xy_z.class(n, k, &tag(p + q, out)));
            }
        }
        None
    }

    /// Tabulates `θ` on representatives and compares it across each class.
    pub fn theta_report(&self) -> ThetaReport {
        let d = self.xy_z.result.degree_bound;
        let mut rep = ThetaReport { bijective: true, ..Default::default() };
        for n in 0..=d {
            let src = &self.xy_z.result.levels[n];
            let dst = &self.x_yz.result.levels[n];
            let bound = src.arity_bound().max(dst.arity_bound());
            let mut size_s = 0;
            let mut size_t = 0;
            for k in 0..=bound {
                let mut seen: HashMap<Elem, Elem> = HashMap::new();
                let atoms = if k <= src.arity_bound() { src.real_atoms(k) } else { &[] };
                for e in atoms {
                    let img = self.theta(n, k, e);
                    if let Some(prev) = seen.insert(img.clone(), e.clone()) {
                        rep.bijective = false;
                        rep.collision.get_or_insert((n, k, prev, e.clone()));
                    }
                }
                let cover = &self.xy_z.quotients[n].cover;
                if k <= cover.arity_bound() {
                    for e in cover.real_atoms(k) {
                        let lhs = self.theta(n, k, e);
                        let rhs = self.theta(n, k, &self.xy_z.class(n, k, e));
                        rep.well_defined.record(
                            &format!("theta independent of representative at degree {n}"),
                            k,
                            e,
                            lhs,
                            rhs,
                        );
                    }
                }
                let targets = if k <= dst.arity_bound() { dst.real_atoms(k) } else { &[] };
                for t in targets {
                    if !seen.contains_key(t) {
                        rep.bijective = false;
                        rep.missed.get_or_insert((n, k, t.clone()));
                    }
                }
                size_s += atoms.len();
                size_t += targets.len();
            }
            rep.source_sizes.push(size_s);
            rep.target_sizes.push(size_t);
        }
        rep
    }

    /// `μ∘θ = id` and `θ∘μ = id` on every atom, with `μ` the regrouping inverse.
    pub fn inverse_report(&self) -> Report {
        let d = self.xy_z.result.degree_bound;
        let mut report = Report::default();
        let yz_members: Vec<_> = (0..=d).map(|n| self.yz.members(n)).collect();
        for n in 0..=d {
            let t_members = self.x_yz.members(n);
            let src = &self.xy_z.result.levels[n];
            for k in 0..=src.arity_bound() {
                for e in src.real_atoms(k) {
                    let t = self.theta(n, k, e);
                    let back = self.regroup(n, k, &t, &t_members, &yz_members).unwrap_or(Elem::Base);
                    report.record(&format!("mu theta = id at degree {n}"), k, e, back, e.clone());
                }
            }
            let dst = &self.x_yz.result.levels[n];
            for k in 0..=dst.arity_bound() {
                for t in dst.real_atoms(k) {
                    let there = self.regroup(n, k, t, &t_members, &yz_members);
                    let back = there.map(|s| self.theta(n, k, &s)).unwrap_or(Elem::Base);
                    report.record(&format!("theta mu = id at degree {n}"), k, t, back, t.clone());
                }
            }
        }
        report
    }
}

/// The regrouping inverse of `θ` on a triple of `Σ`-free factors.
///
/// Returns the triple together with `μ` tabulated per degree and arity.
pub fn sigma_free_mu_triple(
    x: &TruncCosimplicial,
    y: &TruncCosimplicial,
    z: &TruncCosimplicial,
    bound: usize,
) -> Result<(Triple, CoTable)> {
    for f in [x, y, z] {
        sigma_free_factor(f)?;
    }
    let tri = Triple::new(x, y, z, bound)?;
    let d = tri.x_yz.result.degree_bound;
    let yz_members: Vec<_> = (0..=d).map(|n| tri.yz.members(n)).collect();
    let mut table = Vec::with_capacity(d + 1);
    for n in 0..=d {
        let members = tri.x_yz.members(n);
        let dst = &tri.x_yz.result.levels[n];
        let per_arity = (0..=dst.arity_bound())
            .map(|k| {
                dst.real_atoms(k).iter().map(|t| (t.clone(), tri.regroup(n, k, t, &members, &yz_members))).collect()
            })
            .collect();
        table.push(per_arity);
    }
    Ok((tri, table))
}

/// Grouping `(ℓ₁,…,ℓ_k)` of `ℓ` factors, checked for positivity.
pub fn check_grouping(grouping: &[usize], factors: usize) -> Result<()> {
    if grouping.is_empty() || grouping.contains(&0) || grouping.iter().sum::<usize>() != factors {
        return invalid(format!("grouping {grouping:?} does not partition {factors} factors"));
    }
    Ok(())
}
