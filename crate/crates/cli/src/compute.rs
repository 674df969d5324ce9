//! JSON artifacts for the `compute` command.

use std::collections::HashSet;

use clap::ValueEnum;
use opnl::cosimpl::{box_product, build_co, sigma_free, TruncCosimplicial};
use opnl::kernel::Mode;
use opnl::nlev::{coend_operad, odot, Bounds, Oper};
use opnl::profiles::Profile;
use opnl::symseq::{circle, relative_circle, Bimodule, SymSeq};
use opnl::{Error, Result};
use serde_json::{json, Value};

use crate::inputs::{self, envelope};
use crate::suites::{two_point_factor, OperadName};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Circle,
    RelativeCircle,
    Odot,
    Oper,
    Coend,
    Box,
    Co,
}

pub struct Request {
    pub target: Target,
    pub left: Option<String>,
    pub right: Option<String>,
    pub input: Option<String>,
    pub profile: Option<String>,
    pub operad: OperadName,
    pub mode: Mode,
    pub levels: usize,
    pub max_weight: usize,
    pub arity: usize,
    pub degrees: usize,
}

fn seq_sizes(x: &SymSeq) -> Vec<usize> {
    (0..=x.arity_bound()).map(|k| x.real_atoms(k).len()).collect()
}

fn degree_sizes(x: &TruncCosimplicial) -> Vec<usize> {
    (0..=x.degree_bound).map(|n| x.size_at(n)).collect()
}

fn with(mut v: Value, extra: Value) -> Value {
    if let (Some(obj), Value::Object(more)) = (v.as_object_mut(), extra) {
        obj.extend(more);
    }
    v
}

fn positive(name: &str, n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::Bound(format!("{name} must be positive")));
    }
    Ok(n)
}

pub fn compute(r: &Request) -> Result<Value> {
    let name = |o: &Option<String>, default: &str| o.clone().unwrap_or_else(|| default.to_string());
    match r.target {
        Target::Circle => {
            let bound = positive("arity", r.arity)?;
            let x = inputs::symseq(&name(&r.left, "sigma"), r.mode, bound)?;
            let y = inputs::symseq(&name(&r.right, "sigma"), r.mode, bound)?;
            let c = circle(&x, &y, bound)?;
            Ok(with(envelope("symseq", c.to_json()), json!({ "sizes": seq_sizes(&c) })))
        }
        Target::RelativeCircle => {
            let bound = positive("arity", r.arity)?;
            let o = r.operad.build(r.mode, bound);
            let reg = Bimodule::regular(&o);
            let (_, m) = relative_circle(&reg, &o, &reg, bound)?;
            let extra = json!({ "sizes": seq_sizes(&m.seq), "operad_sizes": seq_sizes(&o.carrier) });
            Ok(with(envelope("symseq", m.seq.to_json()), extra))
        }
        Target::Odot => {
            let (l, w) = (positive("levels", r.levels)?, positive("max-weight", r.max_weight)?);
            let p = inputs::leveled(&name(&r.left, "oper"), r.mode, l, w)?;
            let q = inputs::leveled(&name(&r.right, "oper"), r.mode, l, w)?;
            let pq = odot(&p, &q, Bounds { max_level: l, max_weight: w })?;
            Ok(with(envelope("leveled", pq.to_json()), json!({ "size": pq.size() })))
        }
        Target::Oper => match &r.profile {
            Some(s) => {
                let p = Profile::parse(s)?;
                if p.depth() == 0 {
                    return Err(Error::Bound("the profile needs at least one level".into()));
                }
                let o = Oper::new(r.mode, p.depth(), p.weight())?;
                let atoms = o.key(p.depth(), &p).map(|k| k.atoms.clone()).unwrap_or_default();
                let value = json!({ "level": p.depth(), "profile": p, "size": atoms.len(), "atoms": atoms });
                Ok(envelope("oper-component", value))
            }
            None => {
                let o = Oper::new(r.mode, positive("levels", r.levels)?, positive("max-weight", r.max_weight)?)?;
                let obj = o.object()?;
                Ok(with(envelope("leveled", obj.to_json()), json!({ "size": obj.size() })))
            }
        },
        Target::Coend => {
            let (l, w, d) =
                (positive("levels", r.levels)?, positive("max-weight", r.max_weight)?, positive("degrees", r.degrees)?);
            let x = match &r.input {
                Some(spec) => inputs::cosimplicial(spec, r.mode, d)?,
                None => sigma_free(&(0..w).map(|_| two_point_factor(r.mode, d)).collect::<Result<Vec<_>>>()?)?,
            };
            let co = coend_operad(&x, l, w, d)?;
            let entries: Vec<Value> = co
                .keys()
                .map(|((level, p), k)| json!({ "level": level, "profile": p, "size": k.len(), "maps": k.maps }))
                .collect();
            let value = json!({ "degree_bound": co.degree_bound(), "entries": entries });
            Ok(envelope("coend", value))
        }
        Target::Box => {
            let d = positive("degrees", r.degrees)?;
            let x = inputs::cosimplicial(&name(&r.left, "simplex:1"), r.mode, d)?;
            let y = inputs::cosimplicial(&name(&r.right, "unit"), r.mode, d)?;
            let b = box_product(&x, &y)?;
            let unit_right = y.arity_bound() == 0 && (0..=d).all(|n| y.size_at(n) == 1);
            let iso = unit_right.then(|| {
                (0..=d).all(|n| {
                    let pt = &y.levels[n].real_atoms(0)[0];
                    let img: HashSet<_> =
                        x.levels[n].real_atoms(0).iter().map(|a| b.right_vertex(n, 0, a, pt)).collect();
                    img.len() == x.size_at(n) && img.len() == b.result.size_at(n)
                })
            });
            let extra = json!({
                "sizes": degree_sizes(&b.result),
                "right_is_unit": unit_right,
                "canonical_iso_to_left": iso,
            });
            Ok(with(envelope("cosimplicial", b.result.to_json()), extra))
        }
        Target::Co => {
            let (d, bound) = (positive("degrees", r.degrees)?, positive("arity", r.arity)?);
            let co = build_co(&r.operad.build(r.mode, bound), d)?;
            Ok(with(envelope("cosimplicial", co.carrier.to_json()), json!({ "sizes": degree_sizes(&co.carrier) })))
        }
    }
}
