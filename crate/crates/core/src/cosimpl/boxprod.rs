use std::collections::HashMap;

use crate::error::{invalid, Error, Result};
use crate::kernel::{tensor_obj, Elem, FinObj, GObj, Perm};
use crate::symseq::{act_circle, circle, normalize, Quotient, Report, SeqMap, SymSeq};

use super::object::{validate_cosimplicial, TruncCosimplicial};

/// How two levels are paired inside a box product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pairing {
    /// Levels are finite sets and are paired by `⊗`.
    Tensor,
    /// Levels are symmetric sequences paired by `∘` up to an arity bound.
    Circle { bound: usize },
}

/// `X□Y` or `X∘̊Y`, with the staircase data it was built from.
///
/// Atoms of level `n` are classes of `Tag(p, e)` with `e` in the pairing of
/// `Xᵖ` and `Yⁿ⁻ᵖ`, represented by their least member.
#[derive(Clone, Debug)]
pub struct BoxProduct {
    pub pairing: Pairing,
    pub left: TruncCosimplicial,
    pub right: TruncCosimplicial,
    /// `parts[p][q]` pairs `Xᵖ` with `Yᑫ`, for `p + q ≤ d`.
    pub parts: Vec<Vec<SymSeq>>,
    pub quotients: Vec<Quotient>,
    pub result: TruncCosimplicial,
}

/// Which factor map a structure map of the product reduces to.
enum Side {
    Left(usize),
    Right(usize),
}

/// `X□Y` over finite sets.
pub fn box_product(x: &TruncCosimplicial, y: &TruncCosimplicial) -> Result<BoxProduct> {
    if x.arity_bound() != 0 || y.arity_bound() != 0 {
        return invalid("the tensor box product takes cosimplicial finite sets");
    }
    BoxProduct::build(Pairing::Tensor, x, y)
}

/// `X∘̊Y` over symmetric sequences, up to arity `bound`.
pub fn boxcirc(x: &TruncCosimplicial, y: &TruncCosimplicial, bound: usize) -> Result<BoxProduct> {
    BoxProduct::build(Pairing::Circle { bound }, x, y)
}

/// Left-expanded power `((X∘̊X)∘̊X)⋯` of a list of factors.
pub fn boxcirc_chain(factors: &[TruncCosimplicial], bound: usize) -> Result<Vec<BoxProduct>> {
    let Some((first, rest)) = factors.split_first() else {
        return invalid("empty factor list");
    };
    let mut out: Vec<BoxProduct> = Vec::new();
    for f in rest {
        let acc = out.last().map(|b| &b.result).unwrap_or(first);
        let next = boxcirc(acc, f, bound)?;
        out.push(next);
    }
    Ok(out)
}

impl BoxProduct {
    fn build(pairing: Pairing, x: &TruncCosimplicial, y: &TruncCosimplicial) -> Result<Self> {
        if x.mode != y.mode {
            return Err(Error::ModeMismatch);
        }
        if x.degree_bound != y.degree_bound {
            return Err(Error::Bound(format!("degree bounds {} and {}", x.degree_bound, y.degree_bound)));
        }
        let d = x.degree_bound;
        let mode = x.mode;
        let mut parts: Vec<Vec<SymSeq>> = Vec::with_capacity(d + 1);
        for p in 0..=d {
            let mut row = Vec::with_capacity(d + 1 - p);
            for q in 0..=d - p {
                row.push(pair_levels(pairing, &x.levels[p], &y.levels[q])?);
            }
            parts.push(row);
        }
        let mut bp = BoxProduct {
            pairing,
            left: x.clone(),
            right: y.clone(),
            parts,
            quotients: Vec::with_capacity(d + 1),
            result: TruncCosimplicial { mode, degree_bound: d, levels: vec![], cofaces: vec![], codegens: None },
        };
        for n in 0..=d {
            let cover = bp.cover(n)?;
            let bound = cover.arity_bound();
            let mut pairs: Vec<Vec<(Elem, Elem)>> = vec![Vec::new(); bound + 1];
            for r in 0..n {
                let s = n - 1 - r;
                let part = &bp.parts[r][s];
                for (k, slot) in pairs.iter_mut().enumerate() {
                    for e in part.real_atoms(k) {
                        let a = bp.induced(r, s, Side::Right(0), e);
                        let b = bp.induced(r, s, Side::Left(r + 1), e);
                        slot.push((a, b));
                    }
                }
            }
            bp.quotients.push(Quotient::from_pairs(cover, pairs)?);
        }
        let levels: Vec<SymSeq> = bp.quotients.iter().map(|q| q.seq.clone()).collect();
        let cofaces = (0..d)
            .map(|n| (0..n + 2).map(|i| SeqMap::from_fn(&levels[n], |k, e| bp.coface_on(n, i, k, e))).collect())
            .collect();
        let codegens = match (&x.codegens, &y.codegens) {
            (Some(_), Some(_)) => Some(
                (0..=d)
                    .map(|n| (0..n).map(|j| SeqMap::from_fn(&levels[n], |k, e| bp.codegen_on(n, j, k, e))).collect())
                    .collect(),
            ),
            _ => None,
        };
        bp.result = TruncCosimplicial::new(d, levels, cofaces, codegens)?;
        Ok(bp)
    }

    /// `∐_{p+q=n} P(Xᵖ, Yᑫ)` with atoms tagged by `p`.
    fn cover(&self, n: usize) -> Result<SymSeq> {
        let mode = self.left.mode;
        let bound = (0..=n).map(|p| self.parts[p][n - p].arity_bound()).max().unwrap_or(0);
        let mut levels = Vec::with_capacity(bound + 1);
        for k in 0..=bound {
            let mut atoms = Vec::new();
            for p in 0..=n {
                let part = &self.parts[p][n - p];
                if k <= part.arity_bound() {
                    atoms.extend(part.real_atoms(k).iter().map(|e| Elem::Tag(p as u32, Box::new(e.clone()))));
                }
            }
            let carrier = FinObj::with_atoms(mode, atoms)?;
            levels.push(GObj::from_right_action(carrier, k, |e, s| match e {
                Elem::Tag(p, inner) => {
                    let p = *p as usize;
                    Elem::Tag(p as u32, Box::new(self.act_part(p, n - p, inner, s)))
                }
                other => other.clone(),
            })?);
        }
        SymSeq::new(mode, levels)
    }

    fn act_part(&self, p: usize, q: usize, e: &Elem, s: &Perm) -> Elem {
        match self.pairing {
            Pairing::Tensor => e.clone(),
            Pairing::Circle { .. } => act_circle(&self.left.levels[p], &self.right.levels[q], e, s),
        }
    }

    /// Tags an element of `P(Xᵖ, Yᑫ)` after applying one coface of a factor; the result lies in the cover.
    fn induced(&self, p: usize, q: usize, side: Side, e: &Elem) -> Elem {
        let (x, y) = (&self.left, &self.right);
        match side {
            Side::Left(i) => {
                tag(p + 1, pair_map(self.pairing, &x.levels[p + 1], &y.levels[q], Some(x.coface(p, i)), None, e))
            }
            Side::Right(i) => {
                tag(p, pair_map(self.pairing, &x.levels[p], &y.levels[q + 1], None, Some(y.coface(q, i)), e))
            }
        }
    }

    fn coface_on(&self, n: usize, i: usize, k: usize, e: &Elem) -> Elem {
        let Elem::Tag(p, inner) = e else {
            return Elem::Base;
        };
        let p = *p as usize;
        let q = n - p;
        let (x, y) = (&self.left, &self.right);
        let moved = if i <= p {
            tag(p + 1, pair_map(self.pairing, &x.levels[p + 1], &y.levels[q], Some(x.coface(p, i)), None, inner))
        } else {
            tag(p, pair_map(self.pairing, &x.levels[p], &y.levels[q + 1], None, Some(y.coface(q, i - p)), inner))
        };
        self.quotients[n + 1].class(k, &moved)
    }

    fn codegen_on(&self, n: usize, j: usize, k: usize, e: &Elem) -> Elem {
        let Elem::Tag(p, inner) = e else {
            return Elem::Base;
        };
        let p = *p as usize;
        let q = n - p;
        let (x, y) = (&self.left, &self.right);
        let moved = if j < p {
            let s = x.codegen(p, j).expect("present");
            tag(p - 1, pair_map(self.pairing, &x.levels[p - 1], &y.levels[q], Some(s), None, inner))
        } else {
            let s = y.codegen(q, j - p).expect("present");
            tag(p, pair_map(self.pairing, &x.levels[p], &y.levels[q - 1], None, Some(s), inner))
        };
        self.quotients[n - 1].class(k, &moved)
    }

    /// Class of `Tag(p, e)` at degree `n`.
    pub fn class(&self, n: usize, k: usize, e: &Elem) -> Elem {
        self.quotients[n].class(k, e)
    }

    /// Every cover member of each class, grouped by representative.
    pub fn members(&self, n: usize) -> Vec<HashMap<Elem, Vec<Elem>>> {
        self.quotients[n]
            .class_of
            .iter()
            .map(|m| {
                let mut out: HashMap<Elem, Vec<Elem>> = HashMap::new();
                let mut keys: Vec<&Elem> = m.keys().filter(|e| !e.is_base()).collect();
                keys.sort();
                for e in keys {
                    out.entry(m[e].clone()).or_default().push(e.clone());
                }
                out
            })
            .collect()
    }

    /// Structure maps computed on every cover member agree with those on its representative.
    pub fn check_well_defined(&self) -> Report {
        let mut report = Report::default();
        let d = self.result.degree_bound;
        for n in 0..=d {
            let cover = &self.quotients[n].cover;
            for k in 0..=cover.arity_bound() {
                for e in cover.real_atoms(k) {
                    let rep = self.class(n, k, e);
                    if n < d {
                        for i in 0..n + 2 {
                            let diagram = format!("d^{i} independent of representative at degree {n}");
                            let lhs = self.coface_on(n, i, k, e);
                            report.record(&diagram, k, e, lhs, self.result.coface(n, i).apply(k, &rep));
                        }
                    }
                    if let Some(s) = &self.result.codegens {
                        for (j, m) in s[n].iter().enumerate() {
                            let diagram = format!("s^{j} independent of representative at degree {n}");
                            report.record(&diagram, k, e, self.codegen_on(n, j, k, e), m.apply(k, &rep));
                        }
                    }
                }
            }
        }
        report
    }

    /// Validation of the product together with representative independence.
    pub fn validate(&self) -> Report {
        let mut report = validate_cosimplicial(&self.result);
        report.merge(self.check_well_defined());
        report
    }

    /// Applies factor maps levelwise: `Tag(p, e) ↦ [Tag(p, P(f, g)(e))]` in `target`.
    ///
    /// `f(p, arity, x)` and `g(q, arity, y)` act on the factors; `None` means undefined.
    pub fn map_into(
        &self,
        target: &BoxProduct,
        n: usize,
        k: usize,
        e: &Elem,
        f: &dyn Fn(usize, usize, &Elem) -> Option<Elem>,
        g: &dyn Fn(usize, usize, &Elem) -> Option<Elem>,
    ) -> Option<Elem> {
        let Elem::Tag(p, inner) = e else {
            return Some(Elem::Base);
        };
        let p = *p as usize;
        let q = n - p;
        let xs = &target.left.levels[p];
        let ys = &target.right.levels[q];
        let out = match (self.pairing, inner.as_ref()) {
            (Pairing::Tensor, Elem::Tuple(v)) => {
                let a = f(p, 0, &v[0])?;
                let b = g(q, 0, &v[1])?;
                if a.is_base() || b.is_base() {
                    Elem::Base
                } else {
                    Elem::pair(a, b)
                }
            }
            (Pairing::Circle { .. }, Elem::Comp(c)) => {
                let outer = f(p, c.inners.len(), &c.outer)?;
                let mut inners = Vec::with_capacity(c.inners.len());
                for (y, &a) in c.inners.iter().zip(&c.arities) {
                    inners.push(g(q, a, y)?);
                }
                normalize(xs, ys, outer, inners, c.arities.clone(), c.sigma.clone())
            }
            _ => return None,
        };
        Some(target.class(n, k, &tag(p, out)))
    }

    /// The vertex inclusion `Xⁿ → (X∘̊Y)ⁿ`, `x ↦ [Tag(n, x∘(y,…,y))]`, for `Y⁰` with a single arity-one atom `y`.
    pub fn right_vertex(&self, n: usize, k: usize, x: &Elem, y: &Elem) -> Elem {
        let xs = &self.left.levels[n];
        let ys = &self.right.levels[0];
        let e = match self.pairing {
            Pairing::Tensor => Elem::pair(x.clone(), y.clone()),
            Pairing::Circle { .. } => normalize(xs, ys, x.clone(), vec![y.clone(); k], vec![1; k], Perm::identity(k)),
        };
        self.class(n, k, &tag(n, e))
    }

    /// The vertex inclusion `Yⁿ → (X∘̊Y)ⁿ`, `y ↦ [Tag(0, x∘y)]`, for `X⁰` with a single arity-one atom `x`.
    pub fn left_vertex(&self, n: usize, k: usize, x: &Elem, y: &Elem) -> Elem {
        let xs = &self.left.levels[0];
        let ys = &self.right.levels[n];
        let e = match self.pairing {
            Pairing::Tensor => Elem::pair(x.clone(), y.clone()),
            Pairing::Circle { .. } => normalize(xs, ys, x.clone(), vec![y.clone()], vec![k], Perm::identity(k)),
        };
        self.class(n, k, &tag(0, e))
    }
}

pub(crate) fn tag(p: usize, e: Elem) -> Elem {
    if e.is_base() {
        Elem::Base
    } else {
        Elem::Tag(p as u32, Box::new(e))
    }
}

fn pair_levels(pairing: Pairing, a: &SymSeq, b: &SymSeq) -> Result<SymSeq> {
    match pairing {
        Pairing::Tensor => {
            let obj = tensor_obj(&a.levels()[0].carrier, &b.levels()[0].carrier)?;
            SymSeq::new(a.mode(), vec![GObj::trivial(obj, 0)])
        }
        Pairing::Circle { bound } => circle(a, b, bound),
    }
}

/// `P(f, g)` on one part; `None` stands for an identity.
fn pair_map(pairing: Pairing, xs: &SymSeq, ys: &SymSeq, f: Option<&SeqMap>, g: Option<&SeqMap>, e: &Elem) -> Elem {
    let fa = |k: usize, a: &Elem| f.map_or_else(|| a.clone(), |m| m.apply(k, a));
    let gb = |k: usize, b: &Elem| g.map_or_else(|| b.clone(), |m| m.apply(k, b));
    match (pairing, e) {
        (Pairing::Tensor, Elem::Tuple(v)) => {
            let (a, b) = (fa(0, &v[0]), gb(0, &v[1]));
            if a.is_base() || b.is_base() {
                Elem::Base
            } else {
                Elem::pair(a, b)
            }
        }
        (Pairing::Circle { .. }, Elem::Comp(c)) => {
            let outer = fa(c.inners.len(), &c.outer);
            let inners = c.inners.iter().zip(&c.arities).map(|(y, &k)| gb(k, y)).collect();
            normalize(xs, ys, outer, inners, c.arities.clone(), c.sigma.clone())
        }
        _ => Elem::Base,
    }
}
