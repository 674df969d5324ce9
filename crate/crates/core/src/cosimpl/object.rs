use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::kernel::{Elem, FinObj, GObj, Mode, Perm};
use crate::symseq::{Report, SeqMap, SymSeq};

/// A map on atoms indexed by degree and face or degeneracy index.
pub type LevelFn<'a> = &'a dyn Fn(usize, usize, &Elem) -> Elem;

/// A cosimplicial object truncated at `degree_bound`.
///
/// Level `n` is a symmetric sequence; finite sets are the sequences
/// concentrated in arity zero. `cofaces[n][i]` is `dⁱ: Xⁿ → Xⁿ⁺¹` and
/// `codegens[n][j]` is `sʲ: Xⁿ → Xⁿ⁻¹` (empty at `n = 0`).
#[derive(Clone, Debug)]
pub struct TruncCosimplicial {
    pub mode: Mode,
    pub degree_bound: usize,
    pub levels: Vec<SymSeq>,
    pub cofaces: Vec<Vec<SeqMap>>,
    pub codegens: Option<Vec<Vec<SeqMap>>>,
}

impl TruncCosimplicial {
    /// Checks shapes and that every structure map is an equivariant map of the right levels.
    pub fn new(
        degree_bound: usize,
        levels: Vec<SymSeq>,
        cofaces: Vec<Vec<SeqMap>>,
        codegens: Option<Vec<Vec<SeqMap>>>,
    ) -> Result<Self> {
        if levels.len() != degree_bound + 1 {
            return invalid(format!("expected {} levels, got {}", degree_bound + 1, levels.len()));
        }
        let mode = levels[0].mode();
        if levels.iter().any(|l| l.mode() != mode) {
            return Err(Error::ModeMismatch);
        }
        if cofaces.len() != degree_bound {
            return invalid("one coface family per degree below the bound");
        }
        for (n, fam) in cofaces.iter().enumerate() {
            if fam.len() != n + 2 {
                return invalid(format!("degree {n} needs {} cofaces", n + 2));
            }
            for (i, d) in fam.iter().enumerate() {
                d.check(&levels[n], &levels[n + 1]).map_err(|e| Error::Validation(format!("d^{i} at {n}: {e}")))?;
            }
        }
        if let Some(s) = &codegens {
            if s.len() != degree_bound + 1 || !s[0].is_empty() {
                return invalid("codegeneracies are indexed by source degree");
            }
            for (n, fam) in s.iter().enumerate().skip(1) {
                if fam.len() != n {
                    return invalid(format!("degree {n} needs {n} codegeneracies"));
                }
                for (j, m) in fam.iter().enumerate() {
                    m.check(&levels[n], &levels[n - 1]).map_err(|e| Error::Validation(format!("s^{j} at {n}: {e}")))?;
                }
            }
        }
        Ok(TruncCosimplicial { mode, degree_bound, levels, cofaces, codegens })
    }

    /// The constant object with identity structure maps.
    pub fn constant(seq: &SymSeq, degree_bound: usize, with_codegens: bool) -> Self {
        let id = SeqMap::identity(seq);
        let levels = vec![seq.clone(); degree_bound + 1];
        let cofaces = (0..degree_bound).map(|n| vec![id.clone(); n + 2]).collect();
        let codegens = with_codegens.then(|| (0..=degree_bound).map(|n| vec![id.clone(); n]).collect());
        TruncCosimplicial { mode: seq.mode(), degree_bound, levels, cofaces, codegens }
    }

    /// A cosimplicial finite set from atoms per degree and structure maps given as functions.
    pub fn of_sets(
        mode: Mode,
        atoms: Vec<Vec<Elem>>,
        coface: impl Fn(usize, usize, &Elem) -> Elem,
        codegen: Option<LevelFn<'_>>,
    ) -> Result<Self> {
        if atoms.is_empty() {
            return invalid("at least one degree");
        }
        let levels: Vec<SymSeq> = atoms
            .into_iter()
            .map(|a| SymSeq::new(mode, vec![GObj::trivial(FinObj::with_atoms(mode, a)?, 0)]))
            .collect::<Result<_>>()?;
        Self::from_fns(levels, coface, codegen)
    }

    /// Tabulates structure maps over given levels.
    pub fn from_fns(
        levels: Vec<SymSeq>,
        coface: impl Fn(usize, usize, &Elem) -> Elem,
        codegen: Option<LevelFn<'_>>,
    ) -> Result<Self> {
        let d = levels.len().checked_sub(1).ok_or_else(|| Error::Invalid("at least one degree".into()))?;
        let cofaces =
            (0..d).map(|n| (0..n + 2).map(|i| SeqMap::from_fn(&levels[n], |_, e| coface(n, i, e))).collect()).collect();
        let codegens = codegen.map(|s| {
            (0..=d).map(|n| (0..n).map(|j| SeqMap::from_fn(&levels[n], |_, e| s(n, j, e))).collect()).collect()
        });
        Self::new(d, levels, cofaces, codegens)
    }

    pub fn coface(&self, n: usize, i: usize) -> &SeqMap {
        &self.cofaces[n][i]
    }

    pub fn codegen(&self, n: usize, j: usize) -> Option<&SeqMap> {
        self.codegens.as_ref().map(|s| &s[n][j])
    }

    pub fn arity_bound(&self) -> usize {
        self.levels.iter().map(SymSeq::arity_bound).max().unwrap_or(0)
    }

    /// Drops codegeneracies.
    pub fn restricted(&self) -> Self {
        TruncCosimplicial { codegens: None, ..self.clone() }
    }

    /// Keeps degrees up to `d`.
    pub fn truncate_degree(&self, d: usize) -> Result<Self> {
        if d > self.degree_bound {
            return Err(Error::Bound(format!("degree {d} above {}", self.degree_bound)));
        }
        Ok(TruncCosimplicial {
            mode: self.mode,
            degree_bound: d,
            levels: self.levels[..=d].to_vec(),
            cofaces: self.cofaces[..d].to_vec(),
            codegens: self.codegens.as_ref().map(|s| s[..=d].to_vec()),
        })
    }

    /// Overwrites one value of `dⁱ` at degree `n`.
    pub fn corrupt_coface(&mut self, n: usize, i: usize, arity: usize, at: &Elem, value: Elem) {
        self.cofaces[n][i].levels[arity].insert(at.clone(), value);
    }

    /// Total number of non-base atoms at degree `n`.
    pub fn size_at(&self, n: usize) -> usize {
        let l = &self.levels[n];
        (0..=l.arity_bound()).map(|k| l.real_atoms(k).len()).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let tables = |m: &SeqMap| -> Vec<Vec<(Elem, Elem)>> {
            m.levels
                .iter()
                .map(|t| {
                    let mut v: Vec<(Elem, Elem)> =
                        t.iter().filter(|(k, _)| !k.is_base()).map(|(k, v)| (k.clone(), v.clone())).collect();
                    v.sort();
                    v
                })
                .collect()
        };
        let j = CosimplicialJson {
            degree_bound: self.degree_bound,
            levels: self.levels.iter().map(SymSeq::to_json).collect(),
            cofaces: self.cofaces.iter().map(|f| f.iter().map(tables).collect()).collect(),
            codegens: self.codegens.as_ref().map(|s| s.iter().map(|f| f.iter().map(tables).collect()).collect()),
        };
        serde_json::to_value(j).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: CosimplicialJson = crate::error::decode(v, "$")?;
        let levels: Vec<SymSeq> = j
            .levels
            .iter()
            .enumerate()
            .map(|(n, l)| SymSeq::from_json_at(l, &format!("$.levels[{n}]")))
            .collect::<Result<_>>()?;
        let pointed = levels.first().is_some_and(|l| l.mode() == Mode::Pointed);
        let map = |t: &Vec<Vec<(Elem, Elem)>>| SeqMap {
            levels: t
                .iter()
                .map(|l| {
                    let mut m: HashMap<Elem, Elem> = l.iter().cloned().collect();
                    if pointed {
                        m.insert(Elem::Base, Elem::Base);
                    }
                    m
                })
                .collect(),
        };
        let cofaces = j.cofaces.iter().map(|f| f.iter().map(map).collect()).collect();
        let codegens = j.codegens.as_ref().map(|s| s.iter().map(|f| f.iter().map(map).collect()).collect());
        Self::new(j.degree_bound, levels, cofaces, codegens)
    }
}

type Tables = Vec<Vec<(Elem, Elem)>>;

#[derive(Serialize, Deserialize)]
struct CosimplicialJson {
    degree_bound: usize,
    levels: Vec<serde_json::Value>,
    cofaces: Vec<Vec<Tables>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    codegens: Option<Vec<Vec<Tables>>>,
}

/// Checks every cosimplicial identity instance within the degree bound.
pub fn validate_cosimplicial(x: &TruncCosimplicial) -> Report {
    let mut report = Report::default();
    let d = x.degree_bound;
    let chain = |maps: &[&SeqMap], k: usize, e: &Elem| maps.iter().fold(e.clone(), |acc, m| m.apply(k, &acc));
    for n in 0..d.saturating_sub(1) {
        for j in 0..n + 3 {
            for i in 0..j {
                let lhs = [x.coface(n, i), x.coface(n + 1, j)];
                let rhs = [x.coface(n, j - 1), x.coface(n + 1, i)];
                let diagram = format!("d^{j} d^{i} = d^{i} d^{} at degree {n}", j - 1);
                run(&mut report, x, n, &diagram, &lhs, &rhs, chain);
            }
        }
    }
    if x.codegens.is_none() {
        return report;
    }
    let s = |n: usize, j: usize| x.codegen(n, j).expect("present");
    for n in 0..d {
        for j in 0..=n {
            for i in 0..n + 2 {
                let lhs = [x.coface(n, i), s(n + 1, j)];
                let diagram = format!("s^{j} d^{i} at degree {n}");
                if i < j {
                    run(&mut report, x, n, &diagram, &lhs, &[s(n, j - 1), x.coface(n - 1, i)], chain);
                } else if i == j || i == j + 1 {
                    run(&mut report, x, n, &diagram, &lhs, &[], chain);
                } else if n >= 1 {
                    run(&mut report, x, n, &diagram, &lhs, &[s(n, j), x.coface(n - 1, i - 1)], chain);
                }
            }
        }
    }
    for n in 2..=d {
        for j in 0..n - 1 {
            for i in 0..=j {
                let diagram = format!("s^{j} s^{i} = s^{i} s^{} at degree {n}", j + 1);
                run(&mut report, x, n, &diagram, &[s(n, i), s(n - 1, j)], &[s(n, j + 1), s(n - 1, i)], chain);
            }
        }
    }
    report
}

fn run(
    report: &mut Report,
    x: &TruncCosimplicial,
    n: usize,
    diagram: &str,
    lhs: &[&SeqMap],
    rhs: &[&SeqMap],
    chain: impl Fn(&[&SeqMap], usize, &Elem) -> Elem,
) {
    let l = &x.levels[n];
    for k in 0..=l.arity_bound() {
        for e in l.real_atoms(k) {
            report.record(diagram, k, e, chain(lhs, k, e), chain(rhs, k, e));
        }
    }
}

/// Orbit representatives `Y` with `X = Σ·Y`, stable under all structure maps.
///
/// Fails with the first arity and degree where the action is not free or no
/// compatible choice of representatives exists.
#[allow(clippy::needless_range_loop)]
pub fn sigma_free_factor(x: &TruncCosimplicial) -> Result<Vec<Vec<Vec<Elem>>>> {
    let bound = x.arity_bound();
    let mut out = vec![vec![Vec::new(); bound + 1]; x.degree_bound + 1];
    for k in 0..=bound {
        let group = Perm::all(k);
        let level = |n: usize| x.levels[n].real_atoms(k);
        let mut rep_of: Vec<HashMap<Elem, (usize, Perm)>> = Vec::new();
        let mut orbits: Vec<Vec<Elem>> = Vec::new();
        for n in 0..=x.degree_bound {
            let seq = &x.levels[n];
            if k > seq.arity_bound() {
                rep_of.push(HashMap::new());
                orbits.push(Vec::new());
                continue;
            }
            let mut map = HashMap::new();
            let mut reps = Vec::new();
            for e in level(n) {
                if map.contains_key(e) {
                    continue;
                }
                let idx = reps.len();
                for g in &group {
                    let img = seq.act(k, e, g);
                    if map.insert(img.clone(), (idx, g.clone())).is_some() {
                        return Err(Error::NotSigmaFree(format!("action not free at degree {n}, arity {k}, on {e:?}")));
                    }
                }
                reps.push(e.clone());
            }
            rep_of.push(map);
            orbits.push(reps);
        }
        // Edge (n, o) → (n', o') along f: representatives are chosen so that f(R_o) = R_{o'}.
        let mut maps: Vec<(usize, usize, &SeqMap)> = Vec::new();
        for n in 0..x.degree_bound {
            maps.extend(x.cofaces[n].iter().map(|d| (n, n + 1, d)));
        }
        if let Some(s) = &x.codegens {
            for (n, sn) in s.iter().enumerate().skip(1) {
                maps.extend(sn.iter().map(|m| (n, n - 1, m)));
            }
        }
        let mut edges: Vec<(usize, usize, usize, usize, &SeqMap)> = Vec::new();
        for &(src, dst, m) in &maps {
            for (o, r) in orbits[src].iter().enumerate() {
                let img = m.apply(k, r);
                if !img.is_base() {
                    edges.push((src, o, dst, rep_of[dst][&img].0, m));
                }
            }
        }
        let mut chosen: Vec<Vec<Option<Elem>>> = orbits.iter().map(|o| vec![None; o.len()]).collect();
        let mut adj: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (idx, (n, o, n2, o2, _)) in edges.iter().enumerate() {
            adj.entry((*n, *o)).or_default().push(idx);
            adj.entry((*n2, *o2)).or_default().push(idx);
        }
        for n in 0..orbits.len() {
            for o in 0..orbits[n].len() {
                if chosen[n][o].is_some() {
                    continue;
                }
                chosen[n][o] = Some(orbits[n][o].clone());
                let mut queue = VecDeque::from([(n, o)]);
                while let Some((a, b)) = queue.pop_front() {
                    for &idx in adj.get(&(a, b)).into_iter().flatten() {
                        let (n1, o1, n2, o2, m) = edges[idx];
                        if (n1, o1) == (a, b) && chosen[n2][o2].is_none() {
                            chosen[n2][o2] = Some(m.apply(k, chosen[a][b].as_ref().expect("set")));
                            queue.push_back((n2, o2));
                        }
                        if (n2, o2) == (a, b) && chosen[n1][o1].is_none() {
                            let target = chosen[a][b].as_ref().expect("set");
                            let r = &orbits[n1][o1];
                            let h = group
                                .iter()
                                .find(|h| &m.apply(k, &x.levels[n1].act(k, r, h)) == target)
                                .expect("same orbit");
                            chosen[n1][o1] = Some(x.levels[n1].act(k, r, h));
                            queue.push_back((n1, o1));
                        }
                    }
                }
            }
        }
        for &(n, o, n2, o2, m) in &edges {
            let r = chosen[n][o].as_ref().expect("set");
            if Some(m.apply(k, r)) != chosen[n2][o2] {
                return Err(Error::NotSigmaFree(format!(
                    "arity {k}: structure maps from degree {n} to {n2} twist the orbit of {r:?} inconsistently"
                )));
            }
        }
        for n in 0..orbits.len() {
            out[n][k] = chosen[n].iter().map(|r| r.clone().expect("set")).collect();
        }
    }
    Ok(out)
}
