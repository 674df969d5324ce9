use serde::Serialize;

use super::circle::{assoc_right, circle, circle_map, normalize};
use super::seq::{SeqMap, SymSeq};
use crate::error::{Error, Result};
use crate::kernel::{block_sum, Comp, Elem, FinObj, GObj, Mode, Perm};

/// A one-colored operad: multiplication tabulated on `(O∘O)[k]`.
#[derive(Clone, Debug)]
pub struct OperadData {
    pub carrier: SymSeq,
    /// `O∘O` up to the carrier's arity bound.
    pub square: SymSeq,
    pub mult: SeqMap,
    pub unit: Elem,
}

const MAX_WITNESSES: usize = 16;

/// One failed diagram instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub diagram: String,
    pub arity: usize,
    pub element: Elem,
    pub lhs: Elem,
    pub rhs: Elem,
}

/// Outcome of an elementwise law check.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub checked: usize,
    pub failures: usize,
    pub witnesses: Vec<Witness>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn record(&mut self, diagram: &str, arity: usize, element: &Elem, lhs: Elem, rhs: Elem) {
        self.checked += 1;
        if lhs != rhs {
            self.failures += 1;
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(Witness { diagram: diagram.into(), arity, element: element.clone(), lhs, rhs });
            }
        }
    }

    /// Counts one check, building the witness only on failure.
    pub fn check(&mut self, diagram: &str, arity: usize, ok: bool, witness: impl FnOnce() -> (Elem, Elem, Elem)) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.witnesses.len() < MAX_WITNESSES {
                let (element, lhs, rhs) = witness();
                self.witnesses.push(Witness { diagram: diagram.into(), arity, element, lhs, rhs });
            }
        }
    }

    pub fn merge(&mut self, other: Report) {
        self.checked += other.checked;
        self.failures += other.failures;
        self.witnesses.extend(other.witnesses);
        self.witnesses.truncate(MAX_WITNESSES);
    }
}

impl OperadData {
    /// Tabulates `γ(x; y_1, .., y_n)` given on planar composites.
    pub fn from_composition(carrier: SymSeq, unit: Elem, gamma: impl Fn(&Elem, &[Elem]) -> Elem) -> Result<Self> {
        let c2 = carrier.clone();
        Self::from_square_fn(carrier, unit, move |k, e| match e {
            Elem::Comp(c) => {
                let v = gamma(&c.outer, &c.inners);
                c2.act(k, &v, &c.sigma)
            }
            other => other.clone(),
        })
    }

    /// Tabulates the multiplication from its values on canonical elements of `O∘O`.
    pub fn from_square_fn(carrier: SymSeq, unit: Elem, f: impl Fn(usize, &Elem) -> Elem) -> Result<Self> {
        if !carrier.contains(1, &unit) || unit.is_base() {
            return Err(Error::Validation("unit is not an arity-one atom".into()));
        }
        let square = circle(&carrier, &carrier, carrier.arity_bound())?;
        let mult = SeqMap::from_fn(&square, f);
        mult.check(&square, &carrier)?;
        Ok(OperadData { carrier, square, mult, unit })
    }

    pub fn mode(&self) -> Mode {
        self.carrier.mode()
    }

    pub fn arity_bound(&self) -> usize {
        self.carrier.arity_bound()
    }

    /// `γ(x; ys) ∈ O[Σ k_i]`.
    pub fn gamma(&self, x: &Elem, ys: &[Elem], arities: &[usize]) -> Elem {
        let k: usize = arities.iter().sum();
        if k > self.arity_bound() {
            return Elem::Base;
        }
        let e = normalize(&self.carrier, &self.carrier, x.clone(), ys.to_vec(), arities.to_vec(), Perm::identity(k));
        self.mult.apply(k, &e)
    }

    /// Replaces one multiplication entry, for fault-injection tests.
    pub fn corrupt(&mut self, k: usize, at: &Elem, value: Elem) {
        self.mult.levels[k].insert(at.clone(), value);
    }

    /// Associativity and both unit laws, checked on every canonical element.
    pub fn check(&self) -> Report {
        let o = &self.carrier;
        let bound = self.arity_bound();
        let mut report = Report::default();
        let cube = circle(&self.square, o, bound).expect("same mode");
        let id = SeqMap::identity(o);
        for k in 0..=bound {
            for e in cube.real_atoms(k) {
                let lhs = self.mult.apply(k, &circle_map(&self.mult, &id, e));
                let r = assoc_right(o, o, o, &self.square, e);
                let r = circle_map(&id, &self.mult, &r);
                let rhs = self.mult.apply(k, &r);
                report.record("associativity", k, e, lhs, rhs);
            }
            for x in o.real_atoms(k) {
                let left = normalize(o, o, self.unit.clone(), vec![x.clone()], vec![k], Perm::identity(k));
                report.record("left unit", k, x, self.mult.apply(k, &left), x.clone());
                let right_e = normalize(o, o, x.clone(), vec![self.unit.clone(); k], vec![1; k], Perm::identity(k));
                report.record("right unit", k, x, self.mult.apply(k, &right_e), x.clone());
            }
        }
        report
    }

    /// `τ_n O`: composites landing above arity `n` become the basepoint.
    pub fn truncate(&self, n: usize) -> Result<OperadData> {
        let carrier = self.carrier.truncate(n)?;
        OperadData::from_square_fn(
            carrier,
            self.unit.clone(),
            |k, e| {
                if k > n {
                    Elem::Base
                } else {
                    self.mult.apply(k, e)
                }
            },
        )
    }

    /// The quotient map `O → τ_n O` as an atom table.
    pub fn truncation_map(&self, n: usize) -> SeqMap {
        SeqMap::from_fn(&self.carrier, |k, e| if k > n { Elem::Base } else { e.clone() })
    }
}

/// `Ass[n] = Σ_n` with block-sum composition.
pub fn ass(mode: Mode, bound: usize) -> OperadData {
    let carrier = SymSeq::sigma(mode, bound);
    let unit = Elem::Perm(Perm::identity(1));
    OperadData::from_composition(carrier, unit, |x, ys| {
        let outer = x.as_perm().expect("permutation");
        let inners: Vec<Perm> = ys.iter().map(|y| y.as_perm().expect("permutation").clone()).collect();
        Elem::Perm(block_sum(outer, &inners).expect("consistent"))
    })
    .expect("associative operad")
}

/// `Com[n] = {*}` for `n ≥ 1`.
pub fn com(mode: Mode, bound: usize) -> OperadData {
    let levels = (0..=bound)
        .map(|n| {
            let atoms = if n == 0 { vec![] } else { vec![Elem::Atom(0)] };
            GObj::trivial(FinObj::with_atoms(mode, atoms).expect("atoms"), n)
        })
        .collect();
    let carrier = SymSeq::new(mode, levels).expect("levels");
    OperadData::from_composition(carrier, Elem::Atom(0), |_, _| Elem::Atom(0)).expect("commutative operad")
}

/// The operad map check: `f∘m = m∘(f∘f)` and `f(1) = 1`.
pub fn check_operad_map(src: &OperadData, dst: &OperadData, f: &SeqMap) -> Report {
    let mut report = Report::default();
    for k in 0..=src.arity_bound() {
        for e in src.square.real_atoms(k) {
            let lhs = f.apply(k, &src.mult.apply(k, e));
            let Elem::Comp(c) = e else { continue };
            let outer = f.apply(c.inners.len(), &c.outer);
            let inners: Vec<Elem> = c.inners.iter().zip(&c.arities).map(|(y, &a)| f.apply(a, y)).collect();
            let rhs = if outer.is_base() || inners.iter().any(Elem::is_base) || k > dst.arity_bound() {
                Elem::Base
            } else {
                let img =
                    Elem::Comp(Box::new(Comp { sigma: c.sigma.clone(), arities: c.arities.clone(), outer, inners }));
                dst.mult.apply(k, &img)
            };
            report.record("map multiplicativity", k, e, lhs, rhs);
        }
    }
    report.record("map unit", 1, &src.unit, f.apply(1, &src.unit), dst.unit.clone());
    report
}
