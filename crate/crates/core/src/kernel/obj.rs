use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::perm::Perm;
use super::uf::UnionFind;
use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Plain,
    Pointed,
}

/// Structural atoms. Every finite object in the crate is a list of these.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Elem {
    Base,
    Atom(u32),
    Perm(Perm),
    Tuple(Vec<Elem>),
    Tag(u32, Box<Elem>),
    Comp(Box<Comp>),
}

/// A formal composite `γ(outer; inners) · sigma`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Comp {
    pub sigma: Perm,
    pub arities: Vec<usize>,
    pub outer: Elem,
    pub inners: Vec<Elem>,
}

impl Elem {
    pub fn point() -> Elem {
        Elem::Tuple(Vec::new())
    }

    pub fn pair(a: Elem, b: Elem) -> Elem {
        Elem::Tuple(vec![a, b])
    }

    pub fn comp(outer: Elem, inners: Vec<Elem>, arities: Vec<usize>, sigma: Perm) -> Elem {
        Elem::Comp(Box::new(Comp { sigma, arities, outer, inners }))
    }

    pub fn is_base(&self) -> bool {
        matches!(self, Elem::Base)
    }

    pub fn as_comp(&self) -> Option<&Comp> {
        match self {
            Elem::Comp(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_perm(&self) -> Option<&Perm> {
        match self {
            Elem::Perm(p) => Some(p),
            _ => None,
        }
    }
}

/// A finite set or pointed finite set. Interning order is canonical order;
/// in pointed mode the basepoint sits at index 0.
#[derive(Clone, Debug)]
pub struct FinObj {
    mode: Mode,
    atoms: Vec<Elem>,
    index: HashMap<Elem, usize>,
}

impl PartialEq for FinObj {
    fn eq(&self, other: &Self) -> bool {
        self.mode == other.mode && self.atoms == other.atoms
    }
}

impl Eq for FinObj {}

impl FinObj {
    /// Builds an object from atoms; in pointed mode the basepoint is moved to the front.
    pub fn new(mode: Mode, atoms: Vec<Elem>) -> Result<Self> {
        let bases = atoms.iter().filter(|a| a.is_base()).count();
        let atoms = match mode {
            Mode::Plain if bases > 0 => return invalid("plain object contains a basepoint"),
            Mode::Plain => atoms,
            Mode::Pointed if bases != 1 => return invalid("pointed object needs exactly one basepoint"),
            Mode::Pointed => {
                let mut v = vec![Elem::Base];
                v.extend(atoms.into_iter().filter(|a| !a.is_base()));
                v
            }
        };
        let mut index = HashMap::with_capacity(atoms.len());
        for (i, a) in atoms.iter().enumerate() {
            if index.insert(a.clone(), i).is_some() {
                return invalid(format!("duplicate atom {a:?}"));
            }
        }
        Ok(FinObj { mode, atoms, index })
    }

    /// Plain mode: the given atoms. Pointed mode: the atoms plus a basepoint.
    pub fn with_atoms(mode: Mode, atoms: Vec<Elem>) -> Result<Self> {
        match mode {
            Mode::Plain => Self::new(mode, atoms),
            Mode::Pointed => {
                let mut v = vec![Elem::Base];
                v.extend(atoms);
                Self::new(mode, v)
            }
        }
    }

    pub fn empty(mode: Mode) -> Self {
        Self::with_atoms(mode, Vec::new()).expect("empty object")
    }

    /// The monoidal unit: `{*}` or `S^0`.
    pub fn unit(mode: Mode) -> Self {
        Self::with_atoms(mode, vec![Elem::point()]).expect("unit object")
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn atoms(&self) -> &[Elem] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn get(&self, i: usize) -> &Elem {
        &self.atoms[i]
    }

    pub fn index_of(&self, e: &Elem) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn contains(&self, e: &Elem) -> bool {
        self.index.contains_key(e)
    }

    pub fn basepoint(&self) -> Option<usize> {
        (self.mode == Mode::Pointed).then_some(0)
    }

    /// Atoms other than the basepoint.
    pub fn real_atoms(&self) -> &[Elem] {
        match self.mode {
            Mode::Plain => &self.atoms,
            Mode::Pointed => &self.atoms[1..],
        }
    }

    /// Number of atoms other than the basepoint.
    pub fn real_len(&self) -> usize {
        self.real_atoms().len()
    }

    /// True for the initial object (empty set, or the one-point pointed set).
    pub fn is_initial(&self) -> bool {
        self.real_len() == 0
    }
}

/// Product / smash product. Non-base pairs are `Tuple([a, b])`.
pub fn tensor_obj(a: &FinObj, b: &FinObj) -> Result<FinObj> {
    if a.mode != b.mode {
        return Err(Error::ModeMismatch);
    }
    let mut atoms = Vec::with_capacity(a.real_len() * b.real_len());
    for x in a.real_atoms() {
        for y in b.real_atoms() {
            atoms.push(Elem::pair(x.clone(), y.clone()));
        }
    }
    FinObj::with_atoms(a.mode, atoms)
}

/// Disjoint union / wedge. Non-base atoms are tagged `0` or `1`.
pub fn coproduct_obj(a: &FinObj, b: &FinObj) -> Result<FinObj> {
    if a.mode != b.mode {
        return Err(Error::ModeMismatch);
    }
    let mut atoms = Vec::with_capacity(a.real_len() + b.real_len());
    atoms.extend(a.real_atoms().iter().map(|x| Elem::Tag(0, Box::new(x.clone()))));
    atoms.extend(b.real_atoms().iter().map(|y| Elem::Tag(1, Box::new(y.clone()))));
    FinObj::with_atoms(a.mode, atoms)
}

/// The right-unit bijection `a ⊗ 1 → a` as an index table.
pub fn right_unitor(a: &FinObj) -> Result<Vec<usize>> {
    let t = tensor_obj(a, &FinObj::unit(a.mode))?;
    t.atoms()
        .iter()
        .map(|e| match e {
            Elem::Base => Ok(0),
            Elem::Tuple(v) => a.index_of(&v[0]).ok_or_else(|| Error::Invalid("unitor".into())),
            _ => invalid("unexpected atom in tensor"),
        })
        .collect()
}

/// A finite object with a `Σ_n`-action.
///
/// Actions are right actions `x·g`, stored as left actions `g * x := x·g⁻¹`.
/// Only the adjacent transpositions are tabulated; since `s_i⁻¹ = s_i`,
/// `gens[i][x]` is both `x·s_i` and `s_i * x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GObj {
    pub carrier: FinObj,
    degree: usize,
    gens: Vec<Vec<u32>>,
}

impl GObj {
    pub fn trivial(carrier: FinObj, degree: usize) -> Self {
        let id: Vec<u32> = (0..carrier.len() as u32).collect();
        GObj { carrier, degree, gens: vec![id; degree.saturating_sub(1)] }
    }

    /// Tabulates a right action given on atoms; `f(x, s_i)` must return an atom of `carrier`.
    pub fn from_right_action(carrier: FinObj, degree: usize, f: impl Fn(&Elem, &Perm) -> Elem) -> Result<Self> {
        let mut gens = Vec::with_capacity(degree.saturating_sub(1));
        for i in 0..degree.saturating_sub(1) {
            let s = Perm::adjacent(degree, i);
            let mut row = Vec::with_capacity(carrier.len());
            for x in carrier.atoms() {
                let y = f(x, &s);
                let j =
                    carrier.index_of(&y).ok_or_else(|| Error::Validation(format!("action leaves carrier: {y:?}")))?;
                row.push(j as u32);
            }
            gens.push(row);
        }
        let g = GObj { carrier, degree, gens };
        g.validate()?;
        Ok(g)
    }

    pub fn from_tables(carrier: FinObj, degree: usize, gens: Vec<Vec<u32>>) -> Result<Self> {
        let g = GObj { carrier, degree, gens };
        g.validate()?;
        Ok(g)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn generator_tables(&self) -> &[Vec<u32>] {
        &self.gens
    }

    pub fn act_left(&self, g: &Perm, x: usize) -> usize {
        g.adjacent_word().into_iter().fold(x, |y, i| self.gens[i][y] as usize)
    }

    pub fn act_right(&self, x: usize, g: &Perm) -> usize {
        self.act_left(&g.inverse(), x)
    }

    /// Right action on atoms; `None` if `x` is not in the carrier.
    pub fn act_elem(&self, x: &Elem, g: &Perm) -> Option<&Elem> {
        let i = self.carrier.index_of(x)?;
        Some(self.carrier.get(self.act_right(i, g)))
    }

    /// Checks the Coxeter relations on generators and that the basepoint is fixed.
    pub fn validate(&self) -> Result<()> {
        let n = self.carrier.len();
        let m = self.degree.saturating_sub(1);
        if self.gens.len() != m || self.gens.iter().any(|r| r.len() != n) {
            return Err(Error::Validation("generator table shape".into()));
        }
        let g = |i: usize, x: usize| self.gens[i][x] as usize;
        for x in 0..n {
            for i in 0..m {
                if g(i, x) >= n || g(i, g(i, x)) != x {
                    return Err(Error::Validation(format!("s_{i} is not an involution at {x}")));
                }
                if i + 1 < m {
                    let mut y = x;
                    for _ in 0..3 {
                        y = g(i, g(i + 1, y));
                    }
                    if y != x {
                        return Err(Error::Validation(format!("braid relation fails at s_{i}, {x}")));
                    }
                }
                for j in i + 2..m {
                    if g(i, g(j, x)) != g(j, g(i, x)) {
                        return Err(Error::Validation(format!("s_{i}, s_{j} do not commute at {x}")));
                    }
                }
            }
        }
        if self.carrier.mode() == Mode::Pointed && (0..m).any(|i| g(i, 0) != 0) {
            return Err(Error::Validation("basepoint not fixed".into()));
        }
        Ok(())
    }

    /// True when the non-base atoms have trivial stabilizers.
    pub fn is_free(&self) -> bool {
        let ps = Perm::all(self.degree);
        let start = usize::from(self.carrier.mode() == Mode::Pointed);
        (start..self.len()).all(|x| ps.iter().filter(|p| self.act_left(p, x) == x).count() == 1)
    }
}

/// Orbit decomposition with least-index representatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbits {
    pub rep: Vec<usize>,
    pub reps: Vec<usize>,
}

impl Orbits {
    pub fn count(&self) -> usize {
        self.reps.len()
    }

    pub fn members(&self, r: usize) -> Vec<usize> {
        (0..self.rep.len()).filter(|&i| self.rep[i] == r).collect()
    }
}

/// Orbits of the subgroup generated by `generators`.
pub fn orbit_quotient(obj: &GObj, generators: &[Perm]) -> Result<Orbits> {
    let n = obj.len();
    let mut uf = UnionFind::new(n);
    for g in generators {
        if g.degree() != obj.degree() {
            return Err(Error::DegreeMismatch { left: g.degree(), right: obj.degree() });
        }
        for x in 0..n {
            uf.union(x, obj.act_left(g, x));
        }
    }
    let rep = uf.roots();
    let mut reps: Vec<usize> = rep.iter().copied().filter(|&r| rep[r] == r).collect();
    reps.dedup();
    Ok(Orbits { rep, reps })
}
