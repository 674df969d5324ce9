use super::structure::{check_algebra, eval_planar, AlgebraStructure, LevelOperad};
use crate::error::{Error, Result};
use crate::kernel::Elem;
use crate::nlev::Flat;
use crate::symseq::{OperadData, Report};

fn failure(what: &str, report: &Report) -> Error {
    let at = report.witnesses.first().map(|w| w.diagram.clone()).unwrap_or_default();
    Error::Validation(format!("{what}: {} failures, first at {at}", report.failures))
}

/// `μ_k(T, λ; w)`: compose the decorations along the planar tree, then act by `λ`.
pub fn operad_to_oper_algebra(o: &OperadData, max_level: usize) -> Result<AlgebraStructure> {
    let report = o.check();
    if !report.passed() {
        return Err(failure("operad laws fail", &report));
    }
    let c = &o.carrier;
    Ok(AlgebraStructure::from_fn(LevelOperad::Oper, c.clone(), max_level, c.arity_bound(), |f, decs| {
        eval_planar(f, decs, &o.unit, |x, ys, ar| o.gamma(x, ys, ar), |t, v, g| c.act(t, v, g))
    }))
}

/// `γ(x; y_1, .., y_n)·σ = μ₂((n, (k_1, .., k_n)), σ; x, y_1, .., y_n)` and the unit is `μ₀`.
pub fn oper_algebra_to_operad(a: &AlgebraStructure) -> Result<OperadData> {
    if a.operad != LevelOperad::Oper || a.max_level < 2 {
        return Err(Error::Validation("needs structure maps up to level two".into()));
    }
    let report = check_algebra(a)?;
    if !report.passed() {
        return Err(failure("algebra laws fail", &report));
    }
    let unit = a.unit().cloned().ok_or_else(|| Error::Validation("no unit".into()))?;
    OperadData::from_square_fn(a.carrier.with_bound(a.max_weight), unit, |k, e| match e {
        Elem::Comp(c) => {
            let f = Flat { levels: vec![vec![c.arities.len()], c.arities.clone()], lambda: c.sigma.clone() };
            let mut decs = vec![c.outer.clone()];
            decs.extend(c.inners.iter().cloned());
            a.mu(&f, &decs).cloned().unwrap_or_else(|| panic!("no structure map at arity {k}"))
        }
        other => other.clone(),
    })
}
