use super::structure::{
    check_associativity, check_equivariance, decorations, eval_planar, flats_of, planar_levels, slot_arities, support,
    tabulated, AlgebraStructure, Layer, Table, Tables,
};
use crate::error::{Error, Result};
use crate::kernel::{Elem, FinObj, GObj, Perm};
use crate::nlev::Flat;
use crate::symseq::{Report, SymSeq};

/// A module `M` over an algebra `W`: maps `η_ℓ` on trees of depth `ℓ ≥ 1`
/// whose last level is decorated by `M` and all other levels by `W`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleStructure {
    pub algebra: AlgebraStructure,
    pub carrier: SymSeq,
    pub max_level: usize,
    pub max_weight: usize,
    pub max_vertices: usize,
    pub eta: Tables,
}

impl ModuleStructure {
    /// Tabulates `f` on every decorated tree of depth `1..=max_level`.
    pub fn from_fn(
        algebra: AlgebraStructure,
        carrier: SymSeq,
        max_level: usize,
        max_weight: usize,
        max_vertices: usize,
        f: impl Fn(&Flat, &[Elem]) -> Elem,
    ) -> Result<Self> {
        if carrier.mode() != algebra.carrier.mode() {
            return Err(Error::ModeMismatch);
        }
        let max_level = algebra.operad.max_level(max_level.min(algebra.max_level + 1));
        let max_weight = max_weight.min(carrier.arity_bound());
        let inner = algebra.support();
        let last = support(&carrier, 0, max_weight);
        let mut eta = vec![Table::new()];
        for k in 1..=max_level {
            let mut table = Table::new();
            for fl in flats_of(planar_levels(k, &inner, &last, max_weight, max_vertices)) {
                let values =
                    decorations(
                        &fl,
                        |j, n| {
                            if j + 1 == k {
                                carrier.real_atoms(n)
                            } else {
                                algebra.carrier.real_atoms(n)
                            }
                        },
                    )
                    .into_iter()
                    .map(|decs| {
                        let v = f(&fl, &decs);
                        (decs, v)
                    })
                    .collect();
                table.insert(fl, values);
            }
            eta.push(table);
        }
        Ok(ModuleStructure { algebra, carrier, max_level, max_weight, max_vertices, eta })
    }

    pub fn eta(&self, f: &Flat, decs: &[Elem]) -> Option<&Elem> {
        super::structure::lookup(&self.eta, f, decs)
    }

    pub fn corrupt(&mut self, f: &Flat, decs: &[Elem], value: Elem) {
        self.eta[f.depth()].entry(f.clone()).or_default().insert(decs.to_vec(), value);
    }

    /// Profiles that carry at least one entry.
    pub fn support_profiles(&self) -> Vec<Vec<Vec<usize>>> {
        let mut out: Vec<Vec<Vec<usize>>> = self
            .eta
            .iter()
            .flat_map(|t| t.iter().filter(|(_, m)| !m.is_empty()).map(|(f, _)| slot_arities(f)))
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

/// A symmetric sequence concentrated at arity zero.
pub fn concentrated_at_zero(m: FinObj) -> Result<SymSeq> {
    let mode = m.mode();
    SymSeq::new(mode, vec![GObj::trivial(m, 0)])
}

/// The module on `M` concentrated at arity zero given by a classical action
/// `a(w; m_1, .., m_n)` of the operad underlying `algebra`.
pub fn module_from_action(
    algebra: AlgebraStructure,
    m: FinObj,
    max_level: usize,
    max_vertices: usize,
    action: impl Fn(&Elem, &[Elem]) -> Elem,
) -> Result<ModuleStructure> {
    let carrier = concentrated_at_zero(m)?;
    let unit = Elem::Base;
    ModuleStructure::from_fn(algebra, carrier, max_level, 0, max_vertices, |f, decs| {
        eval_planar(f, decs, &unit, |w, ms, _| action(w, ms), |_, v, _| v.clone())
    })
}

/// `W` as a module over itself, with `η = μ`.
pub fn regular_module(algebra: &AlgebraStructure, max_vertices: usize) -> Result<ModuleStructure> {
    let a = algebra.clone();
    ModuleStructure::from_fn(
        algebra.clone(),
        algebra.carrier.clone(),
        algebra.max_level,
        algebra.max_weight,
        max_vertices,
        move |f, decs| a.mu(f, decs).cloned().unwrap_or(Elem::Base),
    )
}

/// Equivariance, the unit `η₁(id; m) = m`, and associativity of every `η_ℓ`
/// against grafting, with attached groups evaluated by `μ` and the last by `η`.
pub fn check_module(m: &ModuleStructure) -> Result<Report> {
    let mut report = Report::default();
    let w = &m.algebra;
    let mc = &m.carrier;
    for (k, table) in m.eta.iter().enumerate().skip(1) {
        check_equivariance(&mut report, "module map", table, mc, |j, n, d, g| {
            if j + 1 == k {
                mc.act(n, d, g)
            } else {
                w.carrier.act(n, d, g)
            }
        })?;
    }
    if m.max_level >= 1 {
        for n in support(mc, 0, m.max_weight) {
            for x in mc.real_atoms(n) {
                let f = Flat::corolla(Perm::identity(n));
                let v = m.eta(&f, std::slice::from_ref(x)).cloned();
                report.check("module unit", n, v.as_ref() == Some(x), || {
                    (x.clone(), v.clone().unwrap_or(Elem::Base), x.clone())
                });
            }
        }
    }
    let layer = Layer {
        inner: w.support(),
        last: support(mc, 0, m.max_weight),
        module: true,
        atoms: Box::new(|level, depth, n| if level + 1 == depth { mc.real_atoms(n) } else { w.carrier.real_atoms(n) }),
        algebra: Box::new(|f, decs| w.mu(f, decs).cloned()),
        top: Box::new(|f, decs| m.eta(f, decs).cloned()),
        covers: Box::new(|f| tabulated(&m.eta, f)),
    };
    check_associativity(&mut report, &layer, m.max_level, m.max_weight, m.max_vertices)?;
    Ok(report)
}

/// The product algebra on pairs, with structure maps computed componentwise.
pub fn product(a: &AlgebraStructure, b: &AlgebraStructure) -> Result<AlgebraStructure> {
    if a.operad != b.operad {
        return Err(Error::Validation("algebras over different operads".into()));
    }
    let mode = a.carrier.mode();
    if b.carrier.mode() != mode {
        return Err(Error::ModeMismatch);
    }
    let bound = a.max_weight.min(b.max_weight);
    let levels = (0..=bound)
        .map(|n| {
            let atoms: Vec<Elem> = a
                .carrier
                .real_atoms(n)
                .iter()
                .flat_map(|x| b.carrier.real_atoms(n).iter().map(move |y| Elem::pair(x.clone(), y.clone())))
                .collect();
            GObj::from_right_action(FinObj::with_atoms(mode, atoms)?, n, |e, g| match e {
                Elem::Tuple(v) => pair_or_base(a.carrier.act(n, &v[0], g), b.carrier.act(n, &v[1], g)),
                other => other.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let carrier = SymSeq::new(mode, levels)?;
    let level = a.max_level.min(b.max_level);
    Ok(AlgebraStructure::from_fn(a.operad, carrier, level, bound, |f, decs| {
        let (xs, ys): (Vec<Elem>, Vec<Elem>) = decs
            .iter()
            .map(|d| match d {
                Elem::Tuple(v) => (v[0].clone(), v[1].clone()),
                _ => (Elem::Base, Elem::Base),
            })
            .unzip();
        let x = a.mu(f, &xs).cloned().unwrap_or(Elem::Base);
        let y = b.mu(f, &ys).cloned().unwrap_or(Elem::Base);
        pair_or_base(x, y)
    }))
}

fn pair_or_base(x: Elem, y: Elem) -> Elem {
    if x.is_base() || y.is_base() {
        Elem::Base
    } else {
        Elem::pair(x, y)
    }
}
