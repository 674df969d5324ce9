use rand::Rng;

use super::seq::SymSeq;
use crate::kernel::{Elem, FinObj, GObj, Mode, Perm};

/// Transitive actions used to assemble test sequences.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrbitKind {
    /// `Σ_n` acting on itself.
    Free,
    /// A fixed atom.
    Fixed,
    /// Two atoms exchanged by odd permutations.
    Sign,
}

fn orbit_atoms(kind: OrbitKind, id: u32, n: usize) -> Vec<Elem> {
    match kind {
        OrbitKind::Free => Perm::all(n).into_iter().map(|p| Elem::Tag(id, Box::new(Elem::Perm(p)))).collect(),
        OrbitKind::Fixed => vec![Elem::Atom(id)],
        OrbitKind::Sign if n < 2 => vec![Elem::Atom(id)],
        OrbitKind::Sign => (0..2).map(|s| Elem::Tag(id, Box::new(Elem::Atom(s)))).collect(),
    }
}

fn orbit_act(x: &Elem, g: &Perm) -> Elem {
    match x {
        Elem::Tag(id, inner) => match inner.as_ref() {
            Elem::Perm(p) => Elem::Tag(*id, Box::new(Elem::Perm(p.compose(g).expect("degree")))),
            Elem::Atom(s) if g.sign() < 0 => Elem::Tag(*id, Box::new(Elem::Atom(1 - s))),
            _ => x.clone(),
        },
        _ => x.clone(),
    }
}

/// A sequence whose level `n` is the disjoint union of the listed orbits.
pub fn orbit_seq(mode: Mode, levels: &[Vec<OrbitKind>]) -> SymSeq {
    let mut gobjs = Vec::with_capacity(levels.len());
    let mut id = 0u32;
    for (n, kinds) in levels.iter().enumerate() {
        let mut atoms = Vec::new();
        for &k in kinds {
            atoms.extend(orbit_atoms(k, id, n));
            id += 1;
        }
        let carrier = FinObj::with_atoms(mode, atoms).expect("distinct atoms");
        gobjs.push(GObj::from_right_action(carrier, n, orbit_act).expect("valid action"));
    }
    SymSeq::new(mode, gobjs).expect("levels")
}

/// A random reduced sequence with at most `max_orbits` orbits per positive arity.
pub fn random_reduced(mode: Mode, bound: usize, max_orbits: usize, free_only: bool, rng: &mut impl Rng) -> SymSeq {
    let levels: Vec<Vec<OrbitKind>> = (0..=bound)
        .map(|n| {
            if n == 0 {
                return Vec::new();
            }
            let count = rng.gen_range(0..=max_orbits);
            (0..count)
                .map(|_| match (free_only, rng.gen_range(0..3)) {
                    (true, _) | (false, 0) => OrbitKind::Free,
                    (false, 1) => OrbitKind::Fixed,
                    _ => OrbitKind::Sign,
                })
                .collect()
        })
        .collect();
    orbit_seq(mode, &levels)
}
