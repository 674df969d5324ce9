//! Canonical listings of profiles, decompositions and planar trees.

use clap::ValueEnum;
use itertools::Itertools;
use opnl::profiles::{decompose, enumerate_profiles, enumerate_trees, Profile};
use opnl::{Error, Result};
use serde_json::{json, Value};

use crate::inputs::SCHEMA;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Profiles,
    Decompositions,
    Trees,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Profiles => "profiles",
            Kind::Decompositions => "decompositions",
            Kind::Trees => "trees",
        }
    }
}

pub struct Request {
    pub kind: Kind,
    pub levels: Option<usize>,
    pub weight: Option<usize>,
    pub positive: bool,
    pub max_width: Option<usize>,
    pub profile: Option<String>,
    pub ells: Vec<usize>,
}

/// Rows in canonical order, each as JSON and as a line of text.
pub struct Listing {
    kind: Kind,
    rows: Vec<(Value, String)>,
}

fn required<T: Copy>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::Invalid(format!("--{flag} is required")))
}

pub fn enumerate(r: &Request) -> Result<Listing> {
    let profile =
        || Profile::parse(r.profile.as_deref().ok_or_else(|| Error::Invalid("--profile is required".into()))?);
    let rows = match r.kind {
        Kind::Profiles => {
            let k = required(r.levels, "levels")?;
            let t = required(r.weight, "weight")?;
            enumerate_profiles(k, t, r.positive, r.max_width)?.into_iter().map(|p| (json!(p), p.to_string())).collect()
        }
        Kind::Decompositions => {
            let p = profile()?;
            let ells = if r.ells.is_empty() { vec![1; p.depth()] } else { r.ells.clone() };
            decompose(&p, &ells)?
                .into_iter()
                .map(|(base, fam)| {
                    let groups = fam
                        .entries
                        .iter()
                        .map(|g| format!("[{}]", g.iter().map(|(n, q)| format!("{n}:{q}")).join(" ")))
                        .join(" ");
                    let text = format!("{base} | {groups}");
                    (json!({ "base": base, "family": fam }), text)
                })
                .collect()
        }
        Kind::Trees => {
            let p = profile()?;
            enumerate_trees(&p)
                .into_iter()
                .map(|t| {
                    let text = t.levels.iter().map(|l| format!("[{}]", l.iter().join(","))).join(" ");
                    (json!({ "levels": t.levels, "parents": t.parent_maps() }), text)
                })
                .collect()
        }
    };
    Ok(Listing { kind: r.kind, rows })
}

impl Listing {
    pub fn to_json(&self) -> Value {
        let rows: Vec<&Value> = self.rows.iter().map(|(v, _)| v).collect();
        json!({ "schema": SCHEMA, "kind": self.kind.name(), "count": rows.len(), "rows": rows })
    }

    pub fn to_text(&self) -> String {
        self.rows.iter().map(|(_, t)| format!("{t}\n")).collect()
    }
}
