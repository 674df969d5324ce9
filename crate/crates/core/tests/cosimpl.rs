use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use opnl::algebras::free_operad;
use opnl::cosimpl::*;
use opnl::kernel::{tensor_obj, Elem, FinObj, GObj, Mode, Perm};
use opnl::symseq::{ass, circle, com, SeqMap, SymSeq};
use opnl::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const P: Mode = Mode::Pointed;

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn sizes(x: &TruncCosimplicial) -> Vec<usize> {
    (0..=x.degree_bound).map(|n| x.size_at(n)).collect()
}

/// `Y[1] = Δ⁰` and `Y[2]` a single constant atom.
fn moving_sigma_free(d: usize) -> TruncCosimplicial {
    sigma_free(&[standard_simplex(P, 0, d).unwrap(), constant_set(P, 1, d).unwrap()]).unwrap()
}

fn constant_sigma_free(d: usize) -> TruncCosimplicial {
    sigma_free(&[constant_set(P, 2, d).unwrap(), constant_set(P, 1, d).unwrap()]).unwrap()
}

type Node = (usize, Elem, Elem);

/// Components of the staircase graph at degree `n`, by breadth-first search over explicit pairs.
fn staircase_classes(x: &TruncCosimplicial, y: &TruncCosimplicial, n: usize) -> usize {
    let node = |p: usize, a: &Elem, b: &Elem| (p, a.clone(), b.clone());
    let mut nodes = Vec::new();
    for p in 0..=n {
        for a in x.levels[p].real_atoms(0) {
            for b in y.levels[n - p].real_atoms(0) {
                nodes.push(node(p, a, b));
            }
        }
    }
    let mut adj: HashMap<Node, Vec<Node>> = HashMap::new();
    let mut to_base = HashSet::new();
    for r in 0..n {
        let s = n - 1 - r;
        for a in x.levels[r].real_atoms(0) {
            for b in y.levels[s].real_atoms(0) {
                let (a1, b1) = (a.clone(), y.coface(s, 0).apply(0, b));
                let (a2, b2) = (x.coface(r, r + 1).apply(0, a), b.clone());
                let u = if b1.is_base() { None } else { Some(node(r, &a1, &b1)) };
                let v = if a2.is_base() { None } else { Some(node(r + 1, &a2, &b2)) };
                match (u, v) {
                    (Some(u), Some(v)) => {
                        adj.entry(u.clone()).or_default().push(v.clone());
                        adj.entry(v).or_default().push(u);
                    }
                    (Some(w), None) | (None, Some(w)) => {
                        to_base.insert(w);
                    }
                    (None, None) => {}
                }
            }
        }
    }
    let mut seen = HashSet::new();
    let mut count = 0;
    for start in &nodes {
        if seen.contains(start) {
            continue;
        }
        let mut hits_base = false;
        let mut queue = VecDeque::from([start.clone()]);
        seen.insert(start.clone());
        while let Some(v) = queue.pop_front() {
            hits_base |= to_base.contains(&v);
            for w in adj.get(&v).into_iter().flatten() {
                if seen.insert(w.clone()) {
                    queue.push_back(w.clone());
                }
            }
        }
        if !hits_base {
            count += 1;
        }
    }
    count
}

#[test]
fn constant_objects_validate() {
    let o = ass(P, 3);
    for with_codegens in [false, true] {
        let x = TruncCosimplicial::constant(&o.carrier, 3, with_codegens);
        let r = validate_cosimplicial(&x);
        assert!(r.passed());
        assert!(r.checked > 0);
    }
}

#[test]
fn simplices_validate_with_binomial_sizes() {
    for k in 0..3 {
        let x = standard_simplex(Mode::Plain, k, 4).unwrap();
        assert!(validate_cosimplicial(&x).passed());
        let expected: Vec<usize> = (0..=4).map(|n| binomial(n + k + 1, k + 1)).collect();
        assert_eq!(sizes(&x), expected);
    }
}

#[test]
fn corrupted_coface_is_located() {
    let mut x = standard_simplex(Mode::Plain, 1, 3).unwrap();
    let at = x.levels[1].real_atoms(0)[0].clone();
    let wrong = x.levels[2].real_atoms(0).iter().find(|e| **e != x.coface(1, 1).apply(0, &at)).unwrap().clone();
    x.corrupt_coface(1, 1, 0, &at, wrong);
    let r = validate_cosimplicial(&x);
    assert!(!r.passed());
    assert!(r.witnesses.iter().any(|w| w.diagram.contains("d^1") && w.element == at));
}

#[test]
fn json_round_trip() {
    let x = moving_sigma_free(2);
    let back = TruncCosimplicial::from_json(&x.to_json()).unwrap();
    assert_eq!(back.to_json(), x.to_json());
    let y = standard_simplex(Mode::Plain, 1, 2).unwrap();
    let back = TruncCosimplicial::from_json(&y.to_json()).unwrap();
    assert_eq!(back.to_json(), y.to_json());
    assert!(validate_cosimplicial(&back).passed());
}

#[test]
fn box_level_zero_is_the_tensor() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for mode in [Mode::Plain, P] {
        let x = random_cosimplicial_set(&mut rng, mode, 2).unwrap();
        let y = random_cosimplicial_set(&mut rng, mode, 2).unwrap();
        let b = box_product(&x, &y).unwrap();
        let t = tensor_obj(&x.levels[0].levels()[0].carrier, &y.levels[0].levels()[0].carrier).unwrap();
        let got: BTreeSet<Elem> = b.result.levels[0]
            .real_atoms(0)
            .iter()
            .map(|e| match e {
                Elem::Tag(0, inner) => inner.as_ref().clone(),
                other => panic!("unexpected {other:?}"),
            })
            .collect();
        let want: BTreeSet<Elem> = t.real_atoms().iter().cloned().collect();
        assert_eq!(got, want);
    }
}

#[test]
fn box_with_the_unit_is_the_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..4 {
        let x = random_cosimplicial_set(&mut rng, P, 3).unwrap();
        let one = constant_set(P, 1, 3).unwrap();
        let b = box_product(&x, &one).unwrap();
        assert_eq!(sizes(&b.result), sizes(&x));
        for n in 0..=3 {
            let img: HashSet<Elem> =
                x.levels[n].real_atoms(0).iter().map(|a| b.right_vertex(n, 0, a, &Elem::Atom(0))).collect();
            assert_eq!(img.len(), x.size_at(n));
        }
    }
}

#[test]
fn box_degree_one_regression() {
    let plain = Mode::Plain;
    let two =
        |tag: &str| -> Vec<Elem> { (0..2).map(|i| Elem::Tag(tag.len() as u32, Box::new(Elem::Atom(i)))).collect() };
    let x = TruncCosimplicial::of_sets(
        plain,
        vec![two("x"), two("xx")],
        |_, _, e| match e {
            Elem::Tag(_, a) => Elem::Tag(2, a.clone()),
            o => o.clone(),
        },
        None,
    )
    .unwrap();
    let y = TruncCosimplicial::of_sets(
        plain,
        vec![two("y"), two("yy")],
        |_, i, e| match (i, e) {
            (0, Elem::Tag(..)) => Elem::Tag(2, Box::new(Elem::Atom(0))),
            (_, Elem::Tag(_, a)) => Elem::Tag(2, a.clone()),
            (_, o) => o.clone(),
        },
        None,
    )
    .unwrap();
    assert!(validate_cosimplicial(&x).passed() && validate_cosimplicial(&y).passed());
    let b = box_product(&x, &y).unwrap();
    assert_eq!(b.result.size_at(1), staircase_classes(&x, &y, 1));
    assert_eq!(b.result.size_at(1), 4);
    assert!(b.validate().passed());
}

#[test]
fn boxes_of_simplices_are_joins() {
    for (p, q) in [(0, 0), (0, 1), (1, 1)] {
        let x = standard_simplex(Mode::Plain, p, 3).unwrap();
        let y = standard_simplex(Mode::Plain, q, 3).unwrap();
        let b = box_product(&x, &y).unwrap();
        let expected: Vec<usize> = (0..=3).map(|n| binomial(n + p + q + 2, p + q + 2)).collect();
        assert_eq!(sizes(&b.result), expected);
        for n in 0..=3 {
            assert_eq!(b.result.size_at(n), staircase_classes(&x, &y, n));
        }
    }
}

#[test]
fn boxcirc_level_zero_is_the_composition_product() {
    let x = moving_sigma_free(2);
    let b = boxcirc(&x, &x, 3).unwrap();
    let c = circle(&x.levels[0], &x.levels[0], 3).unwrap();
    for k in 0..=3 {
        let got: BTreeSet<Elem> = b.result.levels[0].real_atoms(k).iter().cloned().collect();
        let want: BTreeSet<Elem> = c.real_atoms(k).iter().map(|e| Elem::Tag(0, Box::new(e.clone()))).collect();
        assert_eq!(got, want);
    }
    assert!(b.validate().passed());
}

#[test]
fn boxcirc_unit_isomorphisms() {
    let x = moving_sigma_free(2);
    let unit = TruncCosimplicial::constant(&SymSeq::unit(P, 3), 2, true);
    let right = boxcirc(&x, &unit, 3).unwrap();
    let left = boxcirc(&unit, &x, 3).unwrap();
    let one = Elem::point();
    for n in 0..=2 {
        for k in 0..=3 {
            let atoms = x.levels[n].real_atoms(k);
            let r: HashSet<Elem> = atoms.iter().map(|e| right.right_vertex(n, k, e, &one)).collect();
            let l: HashSet<Elem> = atoms.iter().map(|e| left.left_vertex(n, k, &one, e)).collect();
            assert_eq!(r.len(), atoms.len());
            assert_eq!(l.len(), atoms.len());
            assert_eq!(right.result.levels[n].real_atoms(k).len(), atoms.len());
            assert_eq!(left.result.levels[n].real_atoms(k).len(), atoms.len());
        }
    }
}

#[test]
fn sigma_free_certificates() {
    let x = moving_sigma_free(2);
    let ys = sigma_free_factor(&x).unwrap();
    assert_eq!(ys[1][2].len(), 1);
    assert_eq!(ys[2][1].len(), 3);

    let trivial = SymSeq::new(
        P,
        vec![
            GObj::trivial(FinObj::empty(P), 0),
            GObj::trivial(FinObj::empty(P), 1),
            GObj::trivial(FinObj::with_atoms(P, vec![Elem::Atom(0)]).unwrap(), 2),
        ],
    )
    .unwrap();
    let c = TruncCosimplicial::constant(&trivial, 1, false);
    assert!(matches!(sigma_free_factor(&c), Err(Error::NotSigmaFree(_))));

    // Free at every degree, but d⁰ and d¹ disagree by a transposition.
    let free = |tag: u32| {
        let atoms = Perm::all(2).into_iter().map(|g| Elem::pair(Elem::Perm(g), Elem::Atom(tag))).collect();
        let carrier = FinObj::with_atoms(P, atoms).unwrap();
        let g = GObj::from_right_action(carrier, 2, |e, s| match e {
            Elem::Tuple(v) => Elem::pair(Elem::Perm(v[0].as_perm().unwrap().compose(s).unwrap()), v[1].clone()),
            o => o.clone(),
        })
        .unwrap();
        SymSeq::new(P, vec![GObj::trivial(FinObj::empty(P), 0), GObj::trivial(FinObj::empty(P), 1), g]).unwrap()
    };
    let swap = Perm::adjacent(2, 0);
    let twisted = TruncCosimplicial::from_fns(
        vec![free(0), free(1)],
        |_, i, e| match e {
            Elem::Tuple(v) => {
                let g = v[0].as_perm().unwrap().clone();
                let g = if i == 1 { swap.compose(&g).unwrap() } else { g };
                Elem::pair(Elem::Perm(g), Elem::Atom(1))
            }
            o => o.clone(),
        },
        None,
    )
    .unwrap();
    assert!(validate_cosimplicial(&twisted).passed());
    assert!(matches!(sigma_free_factor(&twisted), Err(Error::NotSigmaFree(_))));
}

#[test]
fn theta_is_bijective_at_degree_zero() {
    let x = moving_sigma_free(1);
    let r = Triple::new(&x, &x, &x, 3).unwrap().theta_report();
    assert_eq!(r.source_sizes[0], r.target_sizes[0]);
    assert!(r.missed.as_ref().is_none_or(|m| m.0 > 0));
    assert!(r.collision.as_ref().is_none_or(|c| c.0 > 0));
}

#[test]
fn theta_inverts_on_constant_sigma_free_factors() {
    let x = constant_sigma_free(2);
    let tri = Triple::new(&x, &x, &x, 3).unwrap();
    let r = tri.theta_report();
    assert!(r.bijective);
    assert!(r.well_defined.passed());
    assert!(tri.inverse_report().passed());
    let g = sigma_free_mu(&[x.clone(), x.clone(), x.clone()], &[1, 2], 3).unwrap();
    assert!(g.inverse_report().passed());
}

/// With `Y[1] = Δ⁰` the two inner factors of `x∘(w₁, w₂)` can sit at different
/// staircase splits, and such an element has no preimage.
#[test]
fn theta_misses_mixed_splits_on_sigma_free_factors() {
    let x = moving_sigma_free(2);
    let tri = Triple::new(&x, &x, &x, 3).unwrap();
    let r = tri.theta_report();
    assert!(r.well_defined.passed());
    assert!(r.collision.is_none());
    assert!(!r.bijective);
    let (n, k, t) = r.missed.clone().unwrap();
    let Elem::Tag(p, c) = &t else { panic!() };
    let c = c.as_comp().unwrap();
    let splits: Vec<BTreeSet<u32>> = c
        .inners
        .iter()
        .zip(&c.arities)
        .map(|(w, &a)| yz_members_at(&tri, n - *p as usize, a, w).into_iter().collect::<BTreeSet<u32>>())
        .collect();
    let common = splits.iter().skip(1).fold(splits[0].clone(), |acc, s| acc.intersection(s).cloned().collect());
    assert!(common.is_empty(), "{splits:?}");
    assert!(k >= 2);

    let inv = tri.inverse_report();
    assert!(inv.witnesses.iter().all(|w| w.diagram.starts_with("theta mu")));
    let g = sigma_free_mu(&[x.clone(), x.clone(), x.clone()], &[1, 2], 3).unwrap();
    let rep = g.inverse_report();
    assert_eq!(rep.failures, inv.failures);
}

fn yz_members_at(tri: &Triple, b: usize, arity: usize, w: &Elem) -> Vec<u32> {
    let members = tri.yz.members(b);
    members[arity]
        .get(w)
        .map(|list| list.iter().filter_map(|e| if let Elem::Tag(q, _) = e { Some(*q) } else { None }).collect())
        .unwrap_or_default()
}

#[test]
fn stored_non_free_counterexample() {
    let raw = include_str!("data/theta_non_free.json");
    let x = TruncCosimplicial::from_json(&serde_json::from_str(raw).unwrap()).unwrap();
    assert!(validate_cosimplicial(&x).passed());
    assert!(matches!(sigma_free_factor(&x), Err(Error::NotSigmaFree(_))));
    let r = Triple::new(&x, &x, &x, 3).unwrap().theta_report();
    assert!(!r.bijective);
    assert_eq!(r.source_sizes, vec![13, 70, 224]);
    assert_eq!(r.target_sizes, vec![13, 84, 300]);
    assert!(matches!(sigma_free_mu(&[x.clone(), x.clone(), x], &[1, 2], 3), Err(Error::NotSigmaFree(_))));
}

#[test]
fn trivial_groupings_give_identities() {
    let x = moving_sigma_free(2);
    let fs = vec![x.clone(), x.clone(), x];
    for g in [vec![1, 1, 1], vec![3], vec![2, 1]] {
        let m = sigma_free_mu(&fs, &g, 3).unwrap();
        assert!(m.mu_is_identity(), "{g:?}");
        assert!(m.inverse_report().passed());
    }
    assert!(sigma_free_mu(&fs, &[1, 1], 3).is_err());
    assert!(sigma_free_mu(&fs, &[0, 3], 3).is_err());
}

#[test]
fn constant_monoids_pass() {
    for o in [ass(P, 4), com(P, 4), ass(Mode::Plain, 3)] {
        let m = build_constant_monoid(&o, 2).unwrap();
        let r = check_boxcirc_monoid(&m).unwrap();
        assert!(r.passed(), "{:?}", r.witnesses.first());
        for k in 0..=o.arity_bound() {
            for x in o.carrier.real_atoms(k) {
                let e = m.square.right_vertex(0, k, x, &o.unit);
                assert_eq!(m.m(0, k, &e), *x);
            }
        }
    }
}

#[test]
fn resolution_of_ass_and_com() {
    for o in [ass(P, 4), com(P, 4)] {
        let co = build_co(&o, 3).unwrap();
        assert_eq!(co.carrier.levels[0], o.carrier.truncate(1).unwrap());
        assert!(validate_cosimplicial(&co.carrier).passed());
        let r = check_boxcirc_monoid(&co).unwrap();
        assert!(r.passed(), "{:?}", r.witnesses.first());
        assert!(check_coaugmentation(&o, &co).passed());
    }
    assert!(matches!(build_co(&ass(Mode::Plain, 3), 2), Err(Error::NeedsPointed)));
}

#[test]
fn resolution_with_unary_operations() {
    let gens = SymSeq::new(
        P,
        vec![
            GObj::trivial(FinObj::empty(P), 0),
            GObj::trivial(FinObj::with_atoms(P, vec![Elem::Atom(0)]).unwrap(), 1),
            GObj::trivial(FinObj::with_atoms(P, vec![Elem::Atom(1)]).unwrap(), 2),
        ],
    )
    .unwrap();
    let o = free_operad(&gens, 2, 3).unwrap();
    let co = build_co(&o, 2).unwrap();
    for n in 0..=2 {
        assert_eq!(co.carrier.levels[n].real_atoms(1).len(), o.carrier.real_atoms(1).len());
    }
    assert!(check_boxcirc_monoid(&co).unwrap().passed());
    assert!(check_coaugmentation(&o, &co).passed());
}

#[test]
fn corrupted_pairing_on_the_com_resolution_fails() {
    let mut co = build_co(&com(P, 3), 2).unwrap();
    let cover = &co.square.quotients[1].cover;
    let at = cover.real_atoms(1)[0].clone();
    co.corrupt_pairing(1, 1, &at, Elem::Base);
    let r = check_boxcirc_monoid(&co).unwrap();
    assert!(!r.passed());
    assert!(!r.witnesses.is_empty());
}

#[test]
fn corrupted_unit_fails_a_triangle() {
    let mut m = build_constant_monoid(&ass(P, 3), 1).unwrap();
    m.unit[1] = Elem::Base;
    let r = check_boxcirc_monoid(&m).unwrap();
    assert!(r.witnesses.iter().any(|w| w.diagram.starts_with("u commutes")));
}

#[test]
fn sigma_free_inputs_carry_regular_actions() {
    let x = moving_sigma_free(1);
    for n in 0..=1 {
        for k in 1..=2 {
            let per_orbit = x.levels[n].real_atoms(k).len() / Perm::all(k).len();
            assert_eq!(per_orbit * Perm::all(k).len(), x.levels[n].real_atoms(k).len());
        }
    }
    let id = SeqMap::identity(&x.levels[0]);
    assert!(id.check(&x.levels[0], &x.levels[0]).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn seeded_boxes_are_cosimplicial(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_cosimplicial_set(&mut rng, P, 3).unwrap();
        let y = random_cosimplicial_set(&mut rng, P, 3).unwrap();
        prop_assert!(validate_cosimplicial(&x).passed());
        let b = box_product(&x, &y).unwrap();
        prop_assert!(b.validate().passed());
        for n in 0..=3 {
            prop_assert_eq!(b.result.size_at(n), staircase_classes(&x, &y, n));
        }
    }
}

#[test]
fn malformed_json_reports_its_path() {
    let mut v = constant_set(P, 2, 1).unwrap().to_json();
    v["levels"][1]["levels"][0]["atoms"] = serde_json::json!("oops");
    match TruncCosimplicial::from_json(&v) {
        Err(Error::Schema { path, .. }) => assert_eq!(path, "$.levels[1].levels[0].atoms"),
        other => panic!("{other:?}"),
    }
    let mut v = constant_set(P, 2, 1).unwrap().to_json();
    v.as_object_mut().unwrap().remove("cofaces");
    assert!(matches!(TruncCosimplicial::from_json(&v), Err(Error::Schema { path, .. }) if path == "$"));
}
