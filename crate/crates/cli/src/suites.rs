//! Verification suites and their fault injections.

use std::collections::BTreeSet;

use clap::ValueEnum;
use opnl::algebras::{
    check_algebra, check_module, free_operad, module_from_action, oper_algebra_to_operad, operad_to_oper_algebra,
};
use opnl::cosimpl::{
    box_product, boxcirc, build_co, check_boxcirc_monoid, check_coaugmentation, constant_set, random_cosimplicial_set,
    sigma_free, sigma_free_factor, standard_simplex, validate_cosimplicial, Triple, TruncCosimplicial,
};
use opnl::kernel::{tensor_obj, Elem, FinObj, Mode, Perm};
use opnl::nlev::{monoidal_tables, Bounds, CoEnd, Flat, NLevObject, Oper};
use opnl::profiles::enumerate_profiles;
use opnl::symseq::{ass, com, OperadData, Report, SymSeq};
use opnl::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const NON_FREE: &str = include_str!("../data/theta_non_free.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Suite {
    #[value(alias = "xi")]
    OperXi,
    OdotMonoidal,
    OperEquiv,
    #[value(alias = "boxcirc")]
    BoxIdentities,
    Theta,
    CoMonoid,
    CoendQuadratic,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::OperXi,
        Suite::OdotMonoidal,
        Suite::OperEquiv,
        Suite::BoxIdentities,
        Suite::Theta,
        Suite::CoMonoid,
        Suite::CoendQuadratic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::OperXi => "oper-xi",
            Suite::OdotMonoidal => "odot-monoidal",
            Suite::OperEquiv => "oper-equiv",
            Suite::BoxIdentities => "box-identities",
            Suite::Theta => "theta",
            Suite::CoMonoid => "co-monoid",
            Suite::CoendQuadratic => "coend-quadratic",
            Suite::All => "all",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OperadName {
    Ass,
    Com,
}

impl OperadName {
    pub fn build(self, mode: Mode, bound: usize) -> OperadData {
        match self {
            OperadName::Ass => ass(mode, bound),
            OperadName::Com => com(mode, bound),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OperadName::Ass => "ass",
            OperadName::Com => "com",
        }
    }
}

/// Requested bounds; unset values fall back to per-suite defaults.
#[derive(Clone, Debug, Default)]
pub struct Requested {
    pub levels: Option<usize>,
    pub max_weight: Option<usize>,
    pub arity: Option<usize>,
    pub degrees: Option<usize>,
    pub samples: Option<usize>,
    pub mode: Option<Mode>,
    pub operad: Option<OperadName>,
    pub seed: u64,
    pub inject_fault: bool,
}

/// The bounds one suite actually runs with.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub levels: usize,
    pub max_weight: usize,
    pub arity: usize,
    pub degrees: usize,
    pub samples: usize,
    pub mode: Mode,
    pub operad: OperadName,
    pub seed: u64,
    pub inject_fault: bool,
}

struct Defaults {
    levels: usize,
    max_weight: usize,
    arity: usize,
    degrees: usize,
    samples: usize,
    modes: &'static [Mode],
}

const BOTH: &[Mode] = &[Mode::Plain, Mode::Pointed];
const POINTED: &[Mode] = &[Mode::Pointed];

fn defaults(suite: Suite) -> Defaults {
    let d = |levels, max_weight, arity, degrees, samples, modes| Defaults {
        levels,
        max_weight,
        arity,
        degrees,
        samples,
        modes,
    };
    match suite {
        Suite::OperXi => d(3, 4, 4, 2, 0, BOTH),
        Suite::OdotMonoidal => d(2, 3, 4, 2, 20, BOTH),
        Suite::OperEquiv => d(2, 4, 4, 2, 12, POINTED),
        Suite::BoxIdentities => d(2, 3, 3, 3, 20, BOTH),
        Suite::Theta => d(3, 3, 3, 2, 0, POINTED),
        Suite::CoMonoid => d(2, 3, 4, 2, 0, POINTED),
        Suite::CoendQuadratic | Suite::All => d(3, 3, 3, 2, 0, BOTH),
    }
}

impl SuiteConfig {
    pub fn resolve(suite: Suite, req: &Requested) -> Result<Self> {
        let d = defaults(suite);
        let mode = req.mode.unwrap_or(d.modes[0]);
        if !d.modes.contains(&mode) {
            return Err(Error::Invalid(format!("suite {} runs in pointed mode only", suite.name())));
        }
        let cfg = SuiteConfig {
            suite,
            levels: req.levels.unwrap_or(d.levels),
            max_weight: req.max_weight.unwrap_or(d.max_weight),
            arity: req.arity.unwrap_or(d.arity),
            degrees: req.degrees.unwrap_or(d.degrees),
            samples: req.samples.unwrap_or(d.samples),
            mode,
            operad: req.operad.unwrap_or(OperadName::Ass),
            seed: req.seed,
            inject_fault: req.inject_fault,
        };
        if cfg.levels == 0 || cfg.max_weight == 0 || cfg.arity == 0 || cfg.degrees == 0 {
            return Err(Error::Bound("levels, max-weight, arity and degrees must be positive".into()));
        }
        if suite == Suite::CoendQuadratic && cfg.levels < 3 {
            return Err(Error::Bound("the quadratic comparison needs three levels".into()));
        }
        Ok(cfg)
    }
}

/// One named check and its outcome.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub report: Report,
}

impl Check {
    fn new(name: impl Into<String>, report: Report) -> Self {
        Check { name: name.into(), report }
    }

    /// A check with one instance, passing iff `ok`.
    fn single(name: impl Into<String>, ok: bool, witness: impl FnOnce() -> (Elem, Elem, Elem)) -> Self {
        let name = name.into();
        let mut report = Report::default();
        report.check(&name, 0, ok, witness);
        Check { name, report }
    }
}

pub fn run(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    match cfg.suite {
        Suite::OperXi => oper_xi(cfg),
        Suite::OdotMonoidal => odot_monoidal(cfg),
        Suite::OperEquiv => oper_equiv(cfg),
        Suite::BoxIdentities => box_identities(cfg),
        Suite::Theta => theta(cfg),
        Suite::CoMonoid => co_monoid(cfg),
        Suite::CoendQuadratic => coend_quadratic(cfg),
        Suite::All => Err(Error::Invalid("`all` is a list of suites".into())),
    }
}

fn no_fault_site(suite: Suite) -> Error {
    Error::Bound(format!("no structure entry to corrupt for suite {} at these bounds", suite.name()))
}

/// Ordered sequences of positive integers summing to `n`.
pub fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    (1..=n)
        .flat_map(|first| {
            compositions(n - first).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

fn oper_xi(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut o = Oper::new(cfg.mode, cfg.levels, cfg.max_weight)?;
    let sym = o.sym_object()?;
    if cfg.inject_fault {
        let (p, f) = o
            .keys()
            .find(|((l, p), k)| *l == cfg.levels && p.is_positive() && k.len() >= 2)
            .map(|((_, p), k)| (p.clone(), k.flats[1].clone()))
            .ok_or_else(|| no_fault_site(cfg.suite))?;
        o.corrupt(cfg.levels, &p, 0, f);
    }
    let mut checks = Vec::new();
    for ells in compositions(cfg.levels) {
        let (report, _) = o.check_xi(&sym, &ells, cfg.max_weight)?;
        checks.push(Check::new(format!("xi {ells:?} bijective on classes"), report));
    }
    Ok(checks)
}

fn odot_monoidal(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let bounds = Bounds { max_level: cfg.levels, max_weight: cfg.max_weight };
    let names = ["associativity", "right unit", "left unit"];
    let mut reports = vec![Report::default(); names.len()];
    for i in 0..cfg.samples {
        let mut draw = || NLevObject::random_reduced(cfg.mode, cfg.levels, cfg.max_weight, 2, &mut rng);
        let (a, b, c) = (draw(), draw(), draw());
        let mut tables = monoidal_tables(&a, &b, &c, bounds)?;
        if cfg.inject_fault && i == 0 {
            let (key, e) = tables[1].first().ok_or_else(|| no_fault_site(cfg.suite))?;
            tables[1].corrupt(&key, &e, Ok((key.clone(), Elem::Base)));
        }
        for (table, report) in tables.iter().zip(reports.iter_mut()) {
            table.check(report);
        }
    }
    Ok(names.iter().zip(reports).map(|(n, r)| Check::new(format!("{n} bijection"), r)).collect())
}

/// The binary generator with trivial action, in arity two only.
fn binary_generator(mode: Mode, bound: usize) -> Result<SymSeq> {
    let mut atoms = vec![Vec::new(); bound.max(2) + 1];
    atoms[2] = vec![Elem::Atom(0)];
    SymSeq::trivial(mode, atoms)
}

/// A binary operation on `{0, 1}` with a zero, encoded base three.
fn binary_table(code: u32) -> impl Fn(&Elem, &Elem) -> Elem {
    let all = [Elem::Base, Elem::Atom(0), Elem::Atom(1)];
    move |x, y| match (x, y) {
        (Elem::Atom(i), Elem::Atom(j)) => all[((code / 3u32.pow(2 * i + j)) % 3) as usize].clone(),
        _ => Elem::Base,
    }
}

fn satisfies_classical_laws(op: &impl Fn(&Elem, &Elem) -> Elem, commutative: bool) -> bool {
    let all = [Elem::Base, Elem::Atom(0), Elem::Atom(1)];
    let assoc = all.iter().all(|x| all.iter().all(|y| all.iter().all(|z| op(&op(x, y), z) == op(x, &op(y, z)))));
    let comm = all.iter().all(|x| all.iter().all(|y| op(x, y) == op(y, x)));
    assoc && (comm || !commutative)
}

fn oper_equiv(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let (mode, w) = (cfg.mode, cfg.max_weight);
    let operads = [
        ("ass", ass(mode, w)),
        ("com", com(mode, w)),
        ("free binary of height 2", free_operad(&binary_generator(mode, w)?, 2, w)?),
    ];
    let mut checks = Vec::new();
    for (i, (name, o)) in operads.iter().enumerate() {
        let mut a = operad_to_oper_algebra(o, cfg.levels)?;
        if cfg.inject_fault && i == 0 {
            if cfg.levels < 2 || w < 2 {
                return Err(no_fault_site(cfg.suite));
            }
            let f = Flat::new(vec![vec![2], vec![1, 1]], Perm::identity(2))?;
            let id = |n| Elem::Perm(Perm::identity(n));
            a.corrupt(&f, &[id(2), id(1), id(1)], Elem::Perm(Perm::adjacent(2, 0)));
        }
        checks.push(Check::new(format!("{name}: algebra laws"), check_algebra(&a)?));
        let mut round = Report::default();
        match oper_algebra_to_operad(&a) {
            Ok(back) => {
                let same_carrier = back.carrier == o.carrier && back.unit == o.unit;
                round.check("operad round trip: carrier and unit", 0, same_carrier, || {
                    (o.unit.clone(), back.unit.clone(), o.unit.clone())
                });
                for k in 0..=o.square.arity_bound() {
                    for e in o.square.real_atoms(k) {
                        let lhs = back.mult.try_apply(k, e).unwrap_or(Elem::Base);
                        round.record("operad round trip: composition", k, e, lhs, o.mult.apply(k, e));
                    }
                }
                let again = operad_to_oper_algebra(&back, cfg.levels)?;
                for (level, table) in a.mu.iter().enumerate() {
                    let mut flats: Vec<&Flat> = table.keys().collect();
                    flats.sort();
                    for f in flats {
                        let mut entries: Vec<_> = table[f].iter().collect();
                        entries.sort();
                        for (decs, v) in entries {
                            let got = again.mu(f, decs).cloned().unwrap_or(Elem::Base);
                            let at = opnl::algebras::encode_entry(f, decs);
                            round.record(
                                &format!("algebra round trip at level {level}"),
                                f.weight(),
                                &at,
                                got,
                                v.clone(),
                            );
                        }
                    }
                }
            }
            Err(e) => {
                round.check(&format!("operad round trip ({e})"), 0, false, || (Elem::Base, Elem::Base, Elem::Base))
            }
        }
        checks.push(Check::new(format!("{name}: round trips"), round));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let m = FinObj::with_atoms(mode, vec![Elem::Atom(0), Elem::Atom(1)])?;
    let mut modules = Report::default();
    for (name, o, commutative) in [("ass", ass(mode, 3), false), ("com", com(mode, 3), true)] {
        let a = operad_to_oper_algebra(&o, 2)?;
        let mut codes = BTreeSet::new();
        while codes.len() < cfg.samples.min(81) {
            codes.insert(rng.gen_range(0..81u32));
        }
        for code in codes {
            let op = binary_table(code);
            let md = module_from_action(a.clone(), m.clone(), 3, 4, |w, ms| {
                let order: Vec<Elem> = match w.as_perm() {
                    Some(p) => (0..ms.len()).map(|i| ms[p.inverse().image(i)].clone()).collect(),
                    None => ms.to_vec(),
                };
                order.iter().skip(1).fold(order[0].clone(), |acc, y| op(&acc, y))
            })?;
            let ok = check_module(&md)?.passed() == satisfies_classical_laws(&op, commutative);
            modules.check(&format!("{name} level-zero module matches the classical laws"), 2, ok, || {
                (Elem::Atom(code), Elem::Base, Elem::Base)
            });
        }
    }
    checks.push(Check::new("level-zero modules against classical laws", modules));
    Ok(checks)
}

fn box_identities(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut identities = Report::default();
    let mut level_zero = Report::default();
    let mut pending_fault = cfg.inject_fault;
    for _ in 0..cfg.samples {
        let x = random_cosimplicial_set(&mut rng, cfg.mode, cfg.degrees)?;
        let y = random_cosimplicial_set(&mut rng, cfg.mode, cfg.degrees)?;
        let mut b = box_product(&x, &y)?;
        if pending_fault {
            let at = b.result.levels[0].real_atoms(0)[0].clone();
            let current = b.result.coface(0, 0).apply(0, &at);
            if let Some(v) = b.result.levels[1].real_atoms(0).iter().find(|v| **v != current).cloned() {
                b.result.corrupt_coface(0, 0, 0, &at, v);
                pending_fault = false;
            }
        }
        identities.merge(b.validate());
        let t = tensor_obj(&x.levels[0].levels()[0].carrier, &y.levels[0].levels()[0].carrier)?;
        let want: BTreeSet<&Elem> = t.real_atoms().iter().collect();
        let mut seen = BTreeSet::new();
        for e in b.result.levels[0].real_atoms(0) {
            let inner = match e {
                Elem::Tag(0, inner) => Some(inner.as_ref()),
                _ => None,
            };
            let ok = inner.is_some_and(|i| want.contains(i));
            level_zero.check("degree-zero box atom is a tensor atom", 0, ok, || (e.clone(), e.clone(), Elem::Base));
            seen.extend(inner);
        }
        for a in &want {
            level_zero.check("tensor atom appears in degree zero", 0, seen.contains(a), || {
                ((*a).clone(), Elem::Base, (*a).clone())
            });
        }
    }
    if pending_fault {
        return Err(no_fault_site(cfg.suite));
    }
    let o = cfg.operad.build(cfg.mode, cfg.arity);
    let c = TruncCosimplicial::constant(&o.carrier, cfg.degrees, true);
    let circ = boxcirc(&c, &c, cfg.arity)?;
    Ok(vec![
        Check::new("box product identities", identities),
        Check::new("degree zero is the tensor product", level_zero),
        Check::new(format!("boxcirc identities for constant {}", cfg.operad.name()), circ.validate()),
    ])
}

/// Σ-free inputs with `Y[1]` constant on two atoms, or `Y[1] = Δ⁰`, and `Y[2]` a point.
fn sigma_free_inputs(mode: Mode, d: usize) -> Result<Vec<(&'static str, TruncCosimplicial)>> {
    Ok(vec![
        ("constant factors", sigma_free(&[constant_set(mode, 2, d)?, constant_set(mode, 1, d)?])?),
        ("simplex factor", sigma_free(&[standard_simplex(mode, 0, d)?, constant_set(mode, 1, d)?])?),
    ])
}

fn theta_checks(name: &str, tri: &Triple) -> Vec<Check> {
    let r = tri.theta_report();
    let mut products = tri.xy.validate();
    for b in [&tri.xy_z, &tri.yz, &tri.x_yz] {
        products.merge(b.validate());
    }
    let mut bijective = Report::default();
    if let Some((n, k, a, b)) = &r.collision {
        bijective.record(&format!("theta injective at degree {n}"), *k, a, tri.theta(*n, *k, a), tri.theta(*n, *k, b));
    }
    if let Some((n, k, t)) = &r.missed {
        bijective.record(&format!("theta surjective at degree {n}"), *k, t, Elem::Base, t.clone());
    }
    if r.bijective {
        bijective.check("theta bijective", 0, true, || unreachable!());
    }
    vec![
        Check::new(format!("{name}: products validate"), products),
        Check::new(format!("{name}: theta bijective"), bijective),
        Check::new(format!("{name}: theta well defined"), r.well_defined),
        Check::new(format!("{name}: mu inverts theta"), tri.inverse_report()),
    ]
}

fn theta(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (i, (name, x)) in sigma_free_inputs(cfg.mode, cfg.degrees)?.into_iter().enumerate() {
        let mut tri = Triple::new(&x, &x, &x, cfg.arity)?;
        if cfg.inject_fault && i == 0 {
            let res = &mut tri.xy_z.result;
            let k = (1..=res.levels[0].arity_bound()).find(|&k| res.levels[1].real_atoms(k).len() >= 2);
            let k = k.ok_or_else(|| no_fault_site(cfg.suite))?;
            let at = res.levels[0].real_atoms(k)[0].clone();
            let current = res.coface(0, 0).apply(k, &at);
            let v = res.levels[1].real_atoms(k).iter().find(|v| **v != current).cloned().expect("two atoms");
            res.corrupt_coface(0, 0, k, &at, v);
        }
        checks.extend(theta_checks(name, &tri));
    }
    let raw: serde_json::Value = serde_json::from_str(NON_FREE).map_err(|e| Error::Invalid(e.to_string()))?;
    let x = TruncCosimplicial::from_json(&raw)?;
    checks.push(Check::new("stored instance: cosimplicial identities", validate_cosimplicial(&x)));
    let rejected = matches!(sigma_free_factor(&x), Err(Error::NotSigmaFree(_)));
    checks.push(Check::single("stored instance: rejected as not sigma-free", rejected, || {
        (Elem::Base, Elem::Base, Elem::Base)
    }));
    let r = Triple::new(&x, &x, &x, 3)?.theta_report();
    checks.push(Check::single("stored instance: theta fails bijectivity", !r.bijective, || {
        let sizes = |v: &[usize]| Elem::Tuple(v.iter().map(|&n| Elem::Atom(n as u32)).collect());
        (Elem::Base, sizes(&r.source_sizes), sizes(&r.target_sizes))
    }));
    Ok(checks)
}

fn co_monoid(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let o = cfg.operad.build(cfg.mode, cfg.arity);
    let mut co = build_co(&o, cfg.degrees)?;
    if cfg.inject_fault {
        let cover = &co.square.quotients[1].cover;
        let k = (0..=cover.arity_bound()).find(|&k| !cover.real_atoms(k).is_empty());
        let k = k.ok_or_else(|| no_fault_site(cfg.suite))?;
        let at = cover.real_atoms(k)[0].clone();
        co.corrupt_pairing(1, k, &at, Elem::Base);
    }
    Ok(vec![
        Check::new("carrier cosimplicial identities", validate_cosimplicial(&co.carrier)),
        Check::new("boxcirc monoid diagrams", check_boxcirc_monoid(&co)?),
        Check::new("coaugmentation square", check_coaugmentation(&o, &co)),
    ])
}

/// `Y[n]` on two atoms `{a, b}` with `d⁰` constant at `a` and the other cofaces identities.
pub fn two_point_factor(mode: Mode, d: usize) -> Result<TruncCosimplicial> {
    let atoms = vec![vec![Elem::Atom(0), Elem::Atom(1)]; d + 1];
    TruncCosimplicial::of_sets(mode, atoms, |_, i, e| if i == 0 { Elem::Atom(0) } else { e.clone() }, None)
}

fn coend_quadratic(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let factors = (0..cfg.max_weight).map(|_| two_point_factor(cfg.mode, cfg.degrees)).collect::<Result<Vec<_>>>()?;
    let mut co = CoEnd::from_factors(&factors, 3, cfg.max_weight)?;
    let profiles =
        (1..=cfg.max_weight).map(|t| enumerate_profiles(3, t, true, None)).collect::<Result<Vec<_>>>()?.concat();
    if cfg.inject_fault {
        let (p, v) = profiles
            .iter()
            .find_map(|p| co.key(3, p).filter(|k| k.len() >= 2).map(|k| (p.clone(), k.maps[1].clone())))
            .ok_or_else(|| no_fault_site(cfg.suite))?;
        co.corrupt(3, &p, 0, v);
    }
    let mut laws = Report::default();
    let mut sizes = Report::default();
    for p in &profiles {
        let q = co.quadratic(p)?;
        let count = |n: usize| Elem::Atom(n as u32);
        let label = Elem::Tuple(p.levels().iter().flatten().map(|&n| Elem::Atom(n as u32)).collect());
        sizes.record(&format!("cardinality at {p}"), p.weight(), &label, count(q.direct), count(q.tensor));
        laws.merge(q.report);
    }
    Ok(vec![
        Check::new("three-level maps against the two-level tensor", laws),
        Check::new("three-level cardinality equals the two-level tensor", sizes),
    ])
}
