use std::collections::HashMap;

use itertools::Itertools;
use opnl::kernel::{block_sum, h_subgroup, Elem, Mode, Perm, UnionFind};
use opnl::symseq::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Classes of `(σ, x, y_1..y_n)` under the explicit relation
/// `(x, y, σ) ~ (x·π, (y_{π(i)}·τ_i), h⁻¹σ)` for all `h = block_sum(π; τ) ∈ H`.
fn brute_force_classes(x: &SymSeq, y: &SymSeq, ty: &[usize]) -> usize {
    let n = ty.len();
    let k: usize = ty.iter().sum();
    let mut tuples = Vec::new();
    for sigma in Perm::all(k) {
        for xe in x.real_atoms(n) {
            for ys in ty.iter().map(|&a| y.real_atoms(a).iter()).multi_cartesian_product() {
                tuples.push((sigma.clone(), xe.clone(), ys.into_iter().cloned().collect::<Vec<_>>()));
            }
        }
    }
    let index: HashMap<_, _> = tuples.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    let mut blocks = Vec::new();
    for outer in Perm::all(n).into_iter().filter(|p| (0..n).all(|i| ty[p.image(i)] == ty[i])) {
        for inners in ty.iter().map(|&a| Perm::all(a)).multi_cartesian_product() {
            blocks.push((outer.clone(), inners));
        }
    }
    if !ty.contains(&0) {
        assert_eq!(blocks.len(), h_subgroup(ty).unwrap().order());
    }
    let mut uf = UnionFind::new(tuples.len());
    for (i, (sigma, xe, ys)) in tuples.iter().enumerate() {
        for (pi, tau) in &blocks {
            let hh = block_sum(pi, tau).unwrap();
            let nx = x.act(n, xe, pi);
            let ny: Vec<Elem> = (0..n).map(|j| y.act(ty[j], &ys[pi.image(j)], &tau[j])).collect();
            let ns = hh.inverse().compose(sigma).unwrap();
            uf.union(i, index[&(ns, nx, ny)]);
        }
    }
    let roots = uf.roots();
    (0..tuples.len()).filter(|&i| roots[i] == i).count()
}

fn count_type(s: &SymSeq, k: usize, ty: &[usize]) -> usize {
    s.real_atoms(k).iter().filter(|e| e.as_comp().is_some_and(|c| c.arities == ty)).count()
}

#[test]
fn sigma_circle_sigma_small_type() {
    let s = SymSeq::sigma(Mode::Plain, 2);
    let ss = circle(&s, &s, 2).unwrap();
    assert_eq!(count_type(&ss, 2, &[1, 1]), 2);
    assert_eq!(brute_force_classes(&s, &s, &[1, 1]), 2);
}

#[test]
fn sigma_circle_sigma_cardinality_law() {
    let s = SymSeq::sigma(Mode::Plain, 6);
    for n in 1..=4 {
        for k in n..=6 {
            for ty in orbit_types(n, k, 6, false) {
                let reps = coset_representatives(&ty);
                let size = circle_component(&s, &s, &ty, &reps).len();
                let mult: usize = ty.iter().counts().values().map(|&m| factorial(m)).product();
                assert_eq!(size, factorial(n) * factorial(k) / mult, "{ty:?}");
                if k <= 4 {
                    assert_eq!(size, brute_force_classes(&s, &s, &ty), "{ty:?}");
                }
            }
        }
    }
}

#[test]
fn circle_matches_brute_force_on_mixed_actions() {
    let x = orbit_seq(
        Mode::Plain,
        &[vec![], vec![OrbitKind::Fixed], vec![OrbitKind::Sign, OrbitKind::Fixed], vec![OrbitKind::Sign]],
    );
    let y = orbit_seq(
        Mode::Plain,
        &[vec![], vec![OrbitKind::Fixed, OrbitKind::Fixed], vec![OrbitKind::Sign], vec![OrbitKind::Free]],
    );
    let xy = circle(&x, &y, 4).unwrap();
    for k in 1..=4 {
        for n in 1..=3 {
            for ty in orbit_types(n, k, 3, false) {
                assert_eq!(count_type(&xy, k, &ty), brute_force_classes(&x, &y, &ty), "{ty:?}");
            }
        }
    }
}

#[test]
fn canonical_form_is_brute_force_minimum() {
    let s = SymSeq::sigma(Mode::Plain, 4);
    for ty in [vec![2, 1, 1], vec![2, 2], vec![1, 1, 1]] {
        let k: usize = ty.iter().sum();
        let h = h_subgroup(&ty).unwrap();
        for sigma in Perm::all(k) {
            let best = h.elements.iter().map(|g| g.compose(&sigma).unwrap()).min().unwrap();
            assert_eq!(is_coset_least(&ty, &sigma), best == sigma);
            let xe = Elem::Perm(Perm::identity(ty.len()));
            let ys: Vec<Elem> = ty.iter().map(|&a| Elem::Perm(Perm::identity(a))).collect();
            let e = normalize(&s, &s, xe, ys, ty.clone(), sigma.clone());
            assert_eq!(e.as_comp().unwrap().sigma, best);
        }
    }
}

#[test]
fn unit_laws_are_bijections() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for mode in [Mode::Plain, Mode::Pointed] {
        let x = random_reduced(mode, 4, 2, false, &mut rng);
        let unit = SymSeq::unit(mode, 4);
        let xi = circle(&x, &unit, 4).unwrap();
        let ix = circle(&unit, &x, 4).unwrap();
        let r = right_unit_map(&x, &xi);
        r.check(&xi, &x).unwrap();
        assert!(r.is_bijection(&xi, &x));
        let l = left_unit_map(&x, &ix);
        l.check(&ix, &x).unwrap();
        assert!(l.is_bijection(&ix, &x));
        let back = right_unit_inverse(&x, &unit);
        assert_eq!(back.then(&r), SeqMap::identity(&x));
    }
}

#[test]
fn arity_one_is_tensor() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = random_reduced(Mode::Plain, 3, 3, false, &mut rng);
    let y = random_reduced(Mode::Plain, 3, 3, false, &mut rng);
    let xy = circle(&x, &y, 3).unwrap();
    assert_eq!(xy.real_atoms(1).len(), x.real_atoms(1).len() * y.real_atoms(1).len());
}

#[test]
fn rejects_mode_mismatch_and_unreduced() {
    let a = SymSeq::sigma(Mode::Plain, 2);
    let b = SymSeq::sigma(Mode::Pointed, 2);
    assert!(circle(&a, &b, 2).is_err());
    let c = SymSeq::trivial(Mode::Plain, vec![vec![Elem::Atom(0)], vec![Elem::Atom(1)]]).unwrap();
    assert!(circle(&a, &c, 2).is_err());
    let z = circle_with(&a, &c, 2, CircleOpts { allow_zero: Some(2) }).unwrap();
    // Outer arity 2 with inner types (1,0) and (0,0) appear.
    assert!(z.real_atoms(1).iter().any(|e| e.as_comp().unwrap().arities == vec![1, 0]));
    assert!(z.real_atoms(0).iter().any(|e| e.as_comp().unwrap().arities == vec![0, 0]));
}

#[test]
fn zero_arity_classes_match_brute_force() {
    let a = orbit_seq(Mode::Plain, &[vec![], vec![OrbitKind::Fixed], vec![OrbitKind::Free, OrbitKind::Sign]]);
    let c = SymSeq::trivial(Mode::Plain, vec![vec![Elem::Atom(0), Elem::Atom(1)], vec![Elem::Atom(2)]]).unwrap();
    let z = circle_with(&a, &c, 2, CircleOpts { allow_zero: Some(2) }).unwrap();
    for (k, ty) in [(0, vec![0, 0]), (1, vec![1, 0]), (2, vec![1, 1])] {
        assert_eq!(count_type(&z, k, &ty), brute_force_classes(&a, &c, &ty), "{ty:?}");
    }
}

fn assoc_bijection(x: &SymSeq, y: &SymSeq, z: &SymSeq, bound: usize) {
    let xy = circle(x, y, bound).unwrap();
    let yz = circle(y, z, bound).unwrap();
    let l = circle(&xy, z, bound).unwrap();
    let r = circle(x, &yz, bound).unwrap();
    let fwd = SeqMap::from_fn(&l, |_, e| assoc_right(x, y, z, &yz, e));
    let bwd = SeqMap::from_fn(&r, |_, e| assoc_left(x, y, z, &xy, e));
    fwd.check(&l, &r).unwrap();
    assert!(fwd.is_bijection(&l, &r));
    assert_eq!(fwd.then(&bwd), SeqMap::identity(&l));
    assert_eq!(bwd.then(&fwd), SeqMap::identity(&r));
}

#[test]
fn associativity_regrouping_on_sigma() {
    let s = SymSeq::sigma(Mode::Plain, 5);
    assoc_bijection(&s, &s, &s, 5);
}

#[test]
fn operad_checks() {
    let a = ass(Mode::Plain, 5);
    let r = a.check();
    assert!(r.passed(), "{:?}", r.witnesses.first());
    assert!(r.checked > 1000);
    assert!(com(Mode::Pointed, 4).check().passed());
    let mut bad = ass(Mode::Plain, 3);
    let e = bad.square.real_atoms(3)[5].clone();
    let good = bad.mult.apply(3, &e);
    let wrong = bad.carrier.real_atoms(3).iter().find(|v| **v != good).unwrap().clone();
    bad.corrupt(3, &e, wrong);
    let r = bad.check();
    assert!(!r.passed());
    assert!(r.witnesses.iter().any(|w| w.arity == 3));
}

#[test]
fn truncation_is_an_operad_map() {
    let a = ass(Mode::Pointed, 4);
    let t = a.truncate(1).unwrap();
    assert!(t.check().passed());
    assert!(check_operad_map(&a, &t, &a.truncation_map(1)).passed());
    assert!(ass(Mode::Plain, 2).truncate(1).is_err());
    let seq = a.carrier.truncate(4).unwrap();
    assert_eq!(seq, a.carrier);
    let conc = a.carrier.concentrate(2).unwrap();
    for k in [0, 1, 3, 4] {
        assert!(conc.real_atoms(k).is_empty());
    }
    assert_eq!(conc.real_atoms(2).len(), 2);
}

#[test]
fn relative_circle_units() {
    let mode = Mode::Pointed;
    let a = ass(mode, 3);
    let reg = Bimodule::regular(&a);
    let (q, _) = relative_circle(&reg, &a, &reg, 3).unwrap();
    for k in 0..=3 {
        assert_eq!(q.seq.real_atoms(k).len(), a.carrier.real_atoms(k).len());
    }
    let unit_op = OperadData::from_composition(SymSeq::unit(mode, 3), Elem::point(), |_, _| Elem::point()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let m = random_reduced(mode, 3, 2, false, &mut rng);
    let n = random_reduced(mode, 3, 2, false, &mut rng);
    let (q, _) = relative_circle(
        &Bimodule::over_unit(m.clone(), &unit_op).unwrap(),
        &unit_op,
        &Bimodule::over_unit(n.clone(), &unit_op).unwrap(),
        3,
    )
    .unwrap();
    let mn = circle(&m, &n, 3).unwrap();
    assert_eq!(q.seq, mn);
}

#[test]
fn truncated_ass_relative_square_regression() {
    let a = ass(Mode::Pointed, 3);
    let j = Bimodule::truncation(&a, 1).unwrap();
    let (q, jj) = relative_circle(&j, &a, &j, 3).unwrap();
    // Independent count: J is concentrated in arity 1, so J∘J has no arity-2 atoms.
    let direct = circle(&j.seq, &j.seq, 3).unwrap();
    assert_eq!(direct.len_at(2), 1);
    assert_eq!(q.seq.len_at(2), 1);
    assert_eq!(q.seq.len_at(1), 2);
    assert!(jj.left.is_some() && jj.right.is_some());
}

#[test]
fn hat_product_examples() {
    let x = SymSeq::trivial(Mode::Plain, vec![vec![], vec![], vec![Elem::Atom(0), Elem::Atom(1)]]).unwrap();
    let y = SymSeq::trivial(
        Mode::Plain,
        vec![vec![], vec![], vec![Elem::Atom(2)], vec![Elem::Atom(3), Elem::Atom(4), Elem::Atom(5)]],
    )
    .unwrap();
    let h = circle_hat(&x, &y, 5).unwrap();
    assert_eq!(h.levels[5][&vec![3, 2]].real_len(), 6);
    let unit = SymSeq::unit(Mode::Plain, 4);
    let s = SymSeq::sigma(Mode::Plain, 4);
    let hu = circle_hat(&s, &unit, 4).unwrap();
    for (k, comps) in hu.levels.iter().enumerate() {
        assert!(comps.keys().all(|ty| ty.iter().all(|&v| v == 1) && ty.len() == k));
    }
}

#[test]
fn hat_product_is_not_associative() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut found = None;
    for _ in 0..50 {
        let x = random_reduced(Mode::Plain, 4, 2, false, &mut rng);
        let y = random_reduced(Mode::Plain, 4, 2, false, &mut rng);
        let z = random_reduced(Mode::Plain, 4, 2, false, &mut rng);
        let l = circle_hat(&circle_hat(&x, &y, 4).unwrap().to_seq(), &z, 4).unwrap();
        let r = circle_hat(&x, &circle_hat(&y, &z, 4).unwrap().to_seq(), 4).unwrap();
        if let Some(k) = (0..=4).find(|&k| l.len_at(k) != r.len_at(k)) {
            found = Some(k);
            break;
        }
    }
    assert!(found.is_some());
}

#[test]
fn json_round_trip() {
    let x = orbit_seq(Mode::Pointed, &[vec![], vec![OrbitKind::Fixed], vec![OrbitKind::Sign, OrbitKind::Free]]);
    let j = x.to_json();
    assert_eq!(SymSeq::from_json(&j).unwrap(), x);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn regrouping_is_bijective_on_random_sequences(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mode = if seed % 2 == 0 { Mode::Plain } else { Mode::Pointed };
        let x = random_reduced(mode, 4, 2, false, &mut rng);
        let y = random_reduced(mode, 4, 2, false, &mut rng);
        let z = random_reduced(mode, 4, 2, false, &mut rng);
        assoc_bijection(&x, &y, &z, 4);
    }

    #[test]
    fn circle_action_is_an_action(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_reduced(Mode::Plain, 4, 2, false, &mut rng);
        let y = random_reduced(Mode::Plain, 4, 2, false, &mut rng);
        let xy = circle(&x, &y, 4).unwrap();
        for k in 0..=4 {
            prop_assert!(xy.level(k).unwrap().validate().is_ok());
            for e in xy.real_atoms(k).iter().take(10) {
                for g in Perm::all(k).iter().step_by(5) {
                    let direct = act_circle(&x, &y, e, g);
                    prop_assert_eq!(&direct, &xy.act(k, e, g));
                }
            }
        }
    }
}
