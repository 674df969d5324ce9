use crate::error::{Error, Result};
use crate::kernel::{Elem, Mode, Perm};
use crate::symseq::{
    assoc_left, assoc_right, circle, normalize, relative_circle, Bimodule, OperadData, Quotient, Report, SeqMap, SymSeq,
};

use super::boxprod::{boxcirc, BoxProduct};
use super::object::{validate_cosimplicial, TruncCosimplicial};
use super::theta::Triple;

/// A cosimplicial symmetric sequence with a pairing against `∘̊` and a unit.
///
/// `pairing[n]` is defined on every cover atom of `(X∘̊X)ⁿ`, so that its
/// compatibility with the staircase identifications can be checked; `m` is
/// its value on class representatives. `unit[n]` is the image of the unit atom
/// of `I` in `Xⁿ[1]`.
#[derive(Clone, Debug)]
pub struct BoxcircMonoid {
    pub carrier: TruncCosimplicial,
    pub square: BoxProduct,
    pub pairing: Vec<SeqMap>,
    pub unit: Vec<Elem>,
    pub bound: usize,
}

impl BoxcircMonoid {
    fn from_pairing(
        carrier: TruncCosimplicial,
        bound: usize,
        unit: Vec<Elem>,
        m: impl Fn(usize, usize, usize, &Elem) -> Elem,
    ) -> Result<Self> {
        let square = boxcirc(&carrier, &carrier, bound)?;
        let pairing = square
            .quotients
            .iter()
            .enumerate()
            .map(|(n, q)| {
                SeqMap::from_fn(&q.cover, |k, e| match e {
                    Elem::Tag(p, inner) => m(*p as usize, n - *p as usize, k, inner),
                    other => other.clone(),
                })
            })
            .collect();
        Ok(BoxcircMonoid { carrier, square, pairing, unit, bound })
    }

    /// `m` on an atom of `(X∘̊X)ⁿ`.
    pub fn m(&self, n: usize, k: usize, e: &Elem) -> Elem {
        self.pairing[n].apply(k, e)
    }

    /// Overwrites one pairing value on a cover atom.
    pub fn corrupt_pairing(&mut self, n: usize, k: usize, at: &Elem, value: Elem) {
        self.pairing[n].levels[k].insert(at.clone(), value);
    }
}

/// The constant object on `O` with `m` from `O∘O → O` and `u` from `I → O`.
pub fn build_constant_monoid(o: &OperadData, degree_bound: usize) -> Result<BoxcircMonoid> {
    let check = o.check();
    if !check.passed() {
        return Err(Error::Validation(format!("operad laws fail: {:?}", check.witnesses.first())));
    }
    let carrier = TruncCosimplicial::constant(&o.carrier, degree_bound, true);
    let unit = vec![o.unit.clone(); degree_bound + 1];
    BoxcircMonoid::from_pairing(carrier, o.arity_bound(), unit, |_, _, k, e| o.mult.apply(k, e))
}

/// Relative circle powers `C(O)ᵏ = J∘_O⋯∘_O J` with `J = τ₁O`, up to one degree past the bound.
struct Powers<'a> {
    o: &'a OperadData,
    j: SymSeq,
    jj: SymSeq,
    seqs: Vec<SymSeq>,
    /// `quotients[k]` presents `C(O)ᵏ` as a quotient of `C(O)ᵏ⁻¹∘J`; empty at `k = 0`.
    quotients: Vec<Option<Quotient>>,
}

impl Powers<'_> {
    fn class(&self, k: usize, arity: usize, e: Elem) -> Elem {
        self.quotients[k].as_ref().expect("positive power").class(arity, &e)
    }

    /// `dⁱ: C(O)ᵏ → C(O)ᵏ⁺¹`, inserting a layer of units at position `i`.
    fn insert(&self, k: usize, i: usize, arity: usize, e: &Elem) -> Elem {
        if e.is_base() {
            return Elem::Base;
        }
        let one = self.o.unit.clone();
        let (outer, inners, ar, sigma) = if i == k + 1 {
            (e.clone(), vec![one; arity], vec![1; arity], Perm::identity(arity))
        } else if k == 0 {
            (one, vec![e.clone()], vec![arity], Perm::identity(arity))
        } else {
            let Some(c) = e.as_comp() else {
                return Elem::Base;
            };
            let outer = self.insert(k - 1, i, c.inners.len(), &c.outer);
            (outer, c.inners.clone(), c.arities.clone(), c.sigma.clone())
        };
        let comp = normalize(&self.seqs[k], &self.j, outer, inners, ar, sigma);
        self.class(k + 1, arity, comp)
    }

    /// `sʲ: C(O)ᵏ → C(O)ᵏ⁻¹`, composing the layers `j` and `j + 1` in `J`.
    fn collapse(&self, k: usize, j: usize, arity: usize, e: &Elem) -> Elem {
        let Some(c) = e.as_comp() else {
            return Elem::Base;
        };
        if j + 1 < k {
            let outer = self.collapse(k - 1, j, c.inners.len(), &c.outer);
            let comp =
                normalize(&self.seqs[k - 2], &self.j, outer, c.inners.clone(), c.arities.clone(), c.sigma.clone());
            return self.class(k - 1, arity, comp);
        }
        if k == 1 {
            return self.compose_in_j(arity, e);
        }
        let Elem::Comp(w) = assoc_right(&self.seqs[k - 2], &self.j, &self.j, &self.jj, e) else {
            return Elem::Base;
        };
        let inners: Vec<Elem> = w.inners.iter().zip(&w.arities).map(|(v, &a)| self.compose_in_j(a, v)).collect();
        let comp = normalize(&self.seqs[k - 2], &self.j, w.outer.clone(), inners, w.arities.clone(), w.sigma.clone());
        self.class(k - 1, arity, comp)
    }

    /// `J∘J → J` through the composition of `O`, truncated above arity one.
    fn compose_in_j(&self, arity: usize, e: &Elem) -> Elem {
        let Some(c) = e.as_comp() else {
            return Elem::Base;
        };
        if arity > 1 {
            return Elem::Base;
        }
        let o = &self.o.carrier;
        let comp = normalize(o, o, c.outer.clone(), c.inners.clone(), c.arities.clone(), c.sigma.clone());
        self.o.mult.apply(arity, &comp)
    }

    /// `m_{p,q}: C(O)ᵖ∘C(O)ᑫ → C(O)ᵖ⁺ᑫ`, merging the last layer of the left factor with the first of the right.
    fn pair(&self, square: &BoxProduct, p: usize, q: usize, arity: usize, e: &Elem) -> Elem {
        let Some(c) = e.as_comp() else {
            return Elem::Base;
        };
        if q == 0 {
            let comp = normalize(
                &self.seqs[p],
                &self.j,
                c.outer.clone(),
                c.inners.clone(),
                c.arities.clone(),
                c.sigma.clone(),
            );
            let joined = self.class(p + 1, arity, comp);
            return self.collapse(p + 1, p, arity, &joined);
        }
        let left = &self.seqs[p];
        let Elem::Comp(g) = assoc_left(left, &self.seqs[q - 1], &self.j, &square.parts[p][q - 1], e) else {
            return Elem::Base;
        };
        let u = self.pair(square, p, q - 1, g.inners.len(), &g.outer);
        let comp = normalize(&self.seqs[p + q - 1], &self.j, u, g.inners.clone(), g.arities.clone(), g.sigma.clone());
        self.class(p + q, arity, comp)
    }
}

/// The strict resolution `C(O)` up to `degree_bound`, as a `∘̊`-monoid.
pub fn build_co(o: &OperadData, degree_bound: usize) -> Result<BoxcircMonoid> {
    if o.carrier.mode() != Mode::Pointed {
        return Err(Error::NeedsPointed);
    }
    let check = o.check();
    if !check.passed() {
        return Err(Error::Validation(format!("operad laws fail: {:?}", check.witnesses.first())));
    }
    let bound = o.arity_bound();
    let j = Bimodule::truncation(o, 1)?;
    let mut seqs = vec![j.seq.clone()];
    let mut quotients = vec![None];
    let mut acc = j.clone();
    for _ in 1..=degree_bound + 1 {
        let (q, next) = relative_circle(&acc, o, &j, bound)?;
        seqs.push(q.seq.clone());
        quotients.push(Some(q));
        acc = next;
    }
    let jj = circle(&j.seq, &j.seq, bound)?;
    let pw = Powers { o, j: j.seq.clone(), jj, seqs: seqs.clone(), quotients };
    let cofaces = (0..degree_bound)
        .map(|k| (0..k + 2).map(|i| SeqMap::from_fn(&seqs[k], |a, e| pw.insert(k, i, a, e))).collect())
        .collect();
    let codegens = (0..=degree_bound)
        .map(|k| (0..k).map(|s| SeqMap::from_fn(&seqs[k], |a, e| pw.collapse(k, s, a, e))).collect())
        .collect();
    let carrier = TruncCosimplicial::new(degree_bound, seqs[..=degree_bound].to_vec(), cofaces, Some(codegens))?;
    let mut unit = vec![o.unit.clone()];
    for k in 0..degree_bound {
        let next = carrier.coface(k, 0).apply(1, &unit[k]);
        unit.push(next);
    }
    let square = boxcirc(&carrier, &carrier, bound)?;
    BoxcircMonoid::from_pairing(carrier, bound, unit, |p, q, k, e| pw.pair(&square, p, q, k, e))
}

/// The coaugmentation `O → J = C(O)⁰` equalizes `d⁰` and `d¹`.
pub fn check_coaugmentation(o: &OperadData, co: &BoxcircMonoid) -> Report {
    let mut report = Report::default();
    if co.carrier.degree_bound == 0 {
        return report;
    }
    for k in 0..=o.arity_bound() {
        for x in o.carrier.real_atoms(k) {
            let eta = if k <= 1 { x.clone() } else { Elem::Base };
            let d0 = co.carrier.coface(0, 0).apply(k, &eta);
            let d1 = co.carrier.coface(0, 1).apply(k, &eta);
            report.record("coaugmentation d0 = d1", k, x, d0, d1);
        }
    }
    report
}

/// Diagrams (5.4) and (5.5) and the supporting compatibilities, elementwise.
pub fn check_boxcirc_monoid(mon: &BoxcircMonoid) -> Result<Report> {
    let x = &mon.carrier;
    let d = x.degree_bound;
    let mut report = validate_cosimplicial(x);
    report.merge(mon.square.check_well_defined());

    for n in 0..=d {
        let cover = &mon.square.quotients[n].cover;
        for k in 0..=cover.arity_bound() {
            for e in cover.real_atoms(k) {
                let rep = mon.square.class(n, k, e);
                report.record(
                    &format!("pairing respects staircase at degree {n}"),
                    k,
                    e,
                    mon.m(n, k, e),
                    mon.m(n, k, &rep),
                );
            }
        }
        let sq = &mon.square.result.levels[n];
        for k in 0..=sq.arity_bound() {
            for e in sq.real_atoms(k) {
                let me = mon.m(n, k, e);
                if n < d {
                    for i in 0..n + 2 {
                        let lhs = mon.m(n + 1, k, &mon.square.result.coface(n, i).apply(k, e));
                        let rhs = x.coface(n, i).apply(k, &me);
                        report.record(&format!("m commutes with d^{i} at degree {n}"), k, e, lhs, rhs);
                    }
                }
                if let (Some(s), Some(t)) = (&mon.square.result.codegens, &x.codegens) {
                    for j in 0..n {
                        let lhs = mon.m(n - 1, k, &s[n][j].apply(k, e));
                        report.record(
                            &format!("m commutes with s^{j} at degree {n}"),
                            k,
                            e,
                            lhs,
                            t[n][j].apply(k, &me),
                        );
                    }
                }
            }
        }
    }
    for n in 0..d {
        for i in 0..n + 2 {
            let lhs = x.coface(n, i).apply(1, &mon.unit[n]);
            report.record(
                &format!("u commutes with d^{i} at degree {n}"),
                1,
                &mon.unit[n],
                lhs,
                mon.unit[n + 1].clone(),
            );
        }
    }
    if let Some(s) = &x.codegens {
        for (n, sn) in s.iter().enumerate().skip(1) {
            for (j, m) in sn.iter().enumerate() {
                let lhs = m.apply(1, &mon.unit[n]);
                report.record(
                    &format!("u commutes with s^{j} at degree {n}"),
                    1,
                    &mon.unit[n],
                    lhs,
                    mon.unit[n - 1].clone(),
                );
            }
        }
    }

    let tri = Triple::new(x, x, x, mon.bound)?;
    let m_left = |p: usize, k: usize, u: &Elem| Some(mon.m(p, k, u));
    let ident = |_: usize, _: usize, v: &Elem| Some(v.clone());
    for n in 0..=d {
        let src = &tri.xy_z.result.levels[n];
        for k in 0..=src.arity_bound() {
            for e in src.real_atoms(k) {
                let lhs = tri.xy_z.map_into(&mon.square, n, k, e, &m_left, &ident).map(|v| mon.m(n, k, &v));
                let t = tri.theta(n, k, e);
                let rhs = tri.x_yz.map_into(&mon.square, n, k, &t, &ident, &m_left).map(|v| mon.m(n, k, &v));
                let diagram = format!("associativity (5.4) at degree {n}");
                report.record(&diagram, k, e, lhs.unwrap_or(Elem::Base), rhs.unwrap_or(Elem::Base));
            }
        }
    }

    let unit_seq = SymSeq::unit(x.mode, mon.bound);
    let unit_const = TruncCosimplicial::constant(&unit_seq, d, x.codegens.is_some());
    let one = Elem::point();
    let right = boxcirc(x, &unit_const, mon.bound)?;
    let left = boxcirc(&unit_const, x, mon.bound)?;
    let u0 = &mon.unit[0];
    for n in 0..=d {
        let level = &x.levels[n];
        for k in 0..=level.arity_bound() {
            let mut right_img = Vec::new();
            let mut left_img = Vec::new();
            for e in level.real_atoms(k) {
                let r = mon.square.right_vertex(n, k, e, u0);
                report.record(&format!("right unit (5.5) at degree {n}"), k, e, mon.m(n, k, &r), e.clone());
                let l = mon.square.left_vertex(n, k, u0, e);
                report.record(&format!("left unit (5.5) at degree {n}"), k, e, mon.m(n, k, &l), e.clone());
                right_img.push(right.right_vertex(n, k, e, &one));
                left_img.push(left.left_vertex(n, k, &one, e));
            }
            for (name, img, prod) in [("X o I = X", right_img, &right), ("I o X = X", left_img, &left)] {
                let mut sorted = img.clone();
                sorted.sort();
                sorted.dedup();
                let target = prod.result.levels[n].real_atoms(k);
                let ok = sorted.len() == img.len() && sorted.len() == target.len() && !sorted.iter().any(Elem::is_base);
                report.check(&format!("{name} at degree {n}"), k, ok, || {
                    (Elem::Atom(k as u32), Elem::Atom(sorted.len() as u32), Elem::Atom(target.len() as u32))
                });
            }
        }
    }
    Ok(report)
}
