use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::kernel::{Elem, FinObj, Mode};
use crate::profiles::{enumerate_profiles, Profile};

/// A level together with a profile of that depth. The output arity is the profile's weight.
pub type Key = (usize, Profile);

/// A reduced leveled object stored sparsely; absent keys are initial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NLevObject {
    mode: Mode,
    values: BTreeMap<Key, FinObj>,
}

impl NLevObject {
    /// The object that is initial everywhere.
    pub fn empty(mode: Mode) -> Self {
        NLevObject { mode, values: BTreeMap::new() }
    }

    /// Initial everywhere except the unit at `(0, ∅)`.
    pub fn reduced(mode: Mode) -> Self {
        let mut o = Self::empty(mode);
        o.values.insert((0, Profile::empty()), FinObj::unit(mode));
        o
    }

    /// The monoidal unit: a point at every one-level profile `(n)`, `n ≤ max_weight`.
    pub fn unit(mode: Mode, max_weight: usize, zero: bool) -> Self {
        let mut o = Self::empty(mode);
        for n in usize::from(!zero)..=max_weight {
            o.values.insert((1, Profile::root(n)), FinObj::unit(mode));
        }
        o
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn insert(&mut self, level: usize, p: Profile, obj: FinObj) -> Result<()> {
        if p.depth() != level {
            return invalid(format!("profile {p} does not have depth {level}"));
        }
        if obj.mode() != self.mode {
            return Err(Error::ModeMismatch);
        }
        if obj.real_len() == 0 {
            self.values.remove(&(level, p));
        } else {
            self.values.insert((level, p), obj);
        }
        Ok(())
    }

    pub fn get(&self, level: usize, p: &Profile) -> Option<&FinObj> {
        self.values.get(&(level, p.clone()))
    }

    /// Non-base atoms at a key, empty when absent.
    pub fn real_atoms(&self, level: usize, p: &Profile) -> &[Elem] {
        self.get(level, p).map(FinObj::real_atoms).unwrap_or(&[])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Key, &FinObj)> {
        self.values.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &Key> {
        self.values.keys()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Total number of non-base atoms.
    pub fn size(&self) -> usize {
        self.values.values().map(FinObj::real_len).sum()
    }

    pub fn max_level(&self) -> usize {
        self.values.keys().map(|(l, _)| *l).max().unwrap_or(0)
    }

    pub fn max_weight(&self) -> usize {
        self.values.keys().map(|(_, p)| p.weight()).max().unwrap_or(0)
    }

    /// Level 0 is the unit at `∅` and nothing else.
    pub fn is_reduced(&self) -> bool {
        self.get(0, &Profile::empty()).is_some_and(|o| o.real_len() == 1)
    }

    /// The part at levels `≤ max_level` and weights `≤ max_weight`.
    pub fn restrict(&self, max_level: usize, max_weight: usize) -> NLevObject {
        let values = self
            .values
            .iter()
            .filter(|((l, p), _)| *l <= max_level && p.weight() <= max_weight)
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        NLevObject { mode: self.mode, values }
    }

    /// A reduced object with random positive support: each profile is filled
    /// with probability one half, with between one and `max_atoms` atoms.
    pub fn random_reduced(
        mode: Mode,
        max_level: usize,
        max_weight: usize,
        max_atoms: usize,
        rng: &mut impl Rng,
    ) -> NLevObject {
        let mut o = Self::reduced(mode);
        for level in 1..=max_level {
            for t in 1..=max_weight {
                for p in enumerate_profiles(level, t, true, None).expect("positive enumeration") {
                    if rng.gen_bool(0.5) {
                        let n = rng.gen_range(1..=max_atoms.max(1));
                        let atoms = (0..n as u32).map(Elem::Atom).collect();
                        o.values.insert((level, p), FinObj::with_atoms(mode, atoms).expect("distinct atoms"));
                    }
                }
            }
        }
        o
    }
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    level: usize,
    profile: Vec<Vec<usize>>,
    t: usize,
    obj: Vec<Elem>,
}

#[derive(Serialize, Deserialize)]
struct NLevJson {
    mode: Mode,
    entries: Vec<EntryJson>,
}

impl NLevObject {
    /// Sparse JSON listing of `{level, profile, t, obj}` entries.
    pub fn to_json(&self) -> serde_json::Value {
        let entries = self
            .values
            .iter()
            .map(|((l, p), o)| EntryJson {
                level: *l,
                profile: p.levels().to_vec(),
                t: p.weight(),
                obj: o.atoms().to_vec(),
            })
            .collect();
        serde_json::to_value(NLevJson { mode: self.mode, entries }).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: NLevJson = crate::error::decode(v, "$")?;
        let mut o = Self::empty(j.mode);
        for e in j.entries {
            let p = Profile::new(e.profile)?;
            if p.weight() != e.t {
                return invalid(format!("entry at {p} has t = {}, expected {}", e.t, p.weight()));
            }
            o.insert(e.level, p, FinObj::new(j.mode, e.obj)?)?;
        }
        Ok(o)
    }
}
