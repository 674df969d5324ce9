use std::collections::BTreeSet;

use opnl::algebras::*;
use opnl::kernel::{Elem, FinObj, Mode, Perm};
use opnl::nlev::Flat;
use opnl::symseq::{ass, check_operad_map, com, OperadData, SeqMap, SymSeq};
use proptest::prelude::*;

const P: Mode = Mode::Pointed;

fn atoms(n: u32) -> Vec<Elem> {
    (0..n).map(Elem::Atom).collect()
}

/// Every binary operation on `{0, 1}` with an optional zero, encoded base three.
fn table(code: u32) -> impl Fn(&Elem, &Elem) -> Elem {
    let all = [Elem::Base, Elem::Atom(0), Elem::Atom(1)];
    move |x, y| match (x, y) {
        (Elem::Atom(i), Elem::Atom(j)) => all[((code / 3u32.pow(2 * i + j)) % 3) as usize].clone(),
        _ => Elem::Base,
    }
}

fn with_base() -> [Elem; 3] {
    [Elem::Base, Elem::Atom(0), Elem::Atom(1)]
}

fn fold(op: &impl Fn(&Elem, &Elem) -> Elem, ms: &[Elem]) -> Elem {
    ms.iter().skip(1).fold(ms[0].clone(), |acc, y| op(&acc, y))
}

fn is_associative(op: &impl Fn(&Elem, &Elem) -> Elem) -> bool {
    let all = with_base();
    all.iter().all(|x| all.iter().all(|y| all.iter().all(|z| op(&op(x, y), z) == op(x, &op(y, z)))))
}

fn is_commutative(op: &impl Fn(&Elem, &Elem) -> Elem) -> bool {
    let all = with_base();
    all.iter().all(|x| all.iter().all(|y| op(x, y) == op(y, x)))
}

#[test]
fn round_trip_recovers_the_operad() {
    for o in [ass(P, 4), com(P, 4)] {
        let a = operad_to_oper_algebra(&o, 2).unwrap();
        let back = oper_algebra_to_operad(&a).unwrap();
        assert_eq!(back.carrier, o.carrier);
        assert_eq!(back.unit, o.unit);
        for k in 0..=4 {
            for e in o.square.real_atoms(k) {
                assert_eq!(back.mult.apply(k, e), o.mult.apply(k, e));
            }
        }
    }
}

#[test]
fn operad_algebras_satisfy_the_laws_at_three_levels() {
    for o in [ass(P, 3), com(P, 3)] {
        let rep = check_algebra(&operad_to_oper_algebra(&o, 3).unwrap()).unwrap();
        assert!(rep.checked > 1000);
        assert!(rep.passed(), "{:?}", rep.witnesses.first());
    }
}

#[test]
fn corrupted_structure_maps_are_caught() {
    let mut a = operad_to_oper_algebra(&ass(P, 3), 2).unwrap();
    let f = Flat::new(vec![vec![2], vec![1, 1]], Perm::identity(2)).unwrap();
    let id = |n| Elem::Perm(Perm::identity(n));
    let decs = vec![id(2), id(1), id(1)];
    assert_eq!(a.mu(&f, &decs), Some(&id(2)));
    a.corrupt(&f, &decs, Elem::Perm(Perm::from_images(vec![1, 0]).unwrap()));
    let rep = check_algebra(&a).unwrap();
    assert!(!rep.passed());
    assert!(oper_algebra_to_operad(&a).is_err());
}

#[test]
fn level_zero_modules_match_commutative_semigroups() {
    let c = operad_to_oper_algebra(&com(P, 3), 2).unwrap();
    let m = FinObj::with_atoms(P, atoms(2)).unwrap();
    let mut accepted = 0;
    for code in 0..81 {
        let op = table(code);
        let md = module_from_action(c.clone(), m.clone(), 3, 4, |_, ms| fold(&op, ms)).unwrap();
        let rep = check_module(&md).unwrap();
        let want = is_associative(&op) && is_commutative(&op);
        assert_eq!(rep.passed(), want, "table {code}");
        accepted += want as usize;
    }
    assert!(accepted >= 10);
}

#[test]
fn level_zero_modules_match_semigroups() {
    let a = operad_to_oper_algebra(&ass(P, 3), 2).unwrap();
    let m = FinObj::with_atoms(P, atoms(2)).unwrap();
    let mut accepted = 0;
    for code in 0..81 {
        let op = table(code);
        let md = module_from_action(a.clone(), m.clone(), 3, 4, |w, ms| {
            let p = w.as_perm().expect("permutation");
            let ordered: Vec<Elem> = (0..ms.len()).map(|i| ms[p.inverse().image(i)].clone()).collect();
            fold(&op, &ordered)
        })
        .unwrap();
        let want = is_associative(&op);
        assert_eq!(check_module(&md).unwrap().passed(), want, "table {code}");
        accepted += want as usize;
    }
    assert!(accepted >= 10);
}

#[test]
fn regular_module_passes_and_corruption_fails() {
    let a = operad_to_oper_algebra(&ass(P, 3), 2).unwrap();
    let mut m = regular_module(&a, 4).unwrap();
    let rep = check_module(&m).unwrap();
    assert!(rep.checked > 0 && rep.passed());
    let f = Flat::corolla(Perm::identity(2));
    let x = Elem::Perm(Perm::identity(2));
    m.corrupt(&f, &[x], Elem::Perm(Perm::from_images(vec![1, 0]).unwrap()));
    assert!(!check_module(&m).unwrap().passed());
}

#[test]
fn products_and_projections() {
    let a = operad_to_oper_algebra(&ass(P, 3), 2).unwrap();
    let c = operad_to_oper_algebra(&com(P, 3), 2).unwrap();
    let p = product(&a, &c).unwrap();
    assert!(check_algebra(&p).unwrap().passed());
    let proj = |i: usize| {
        SeqMap::from_fn(&p.carrier, move |_, e| match e {
            Elem::Tuple(v) => v[i].clone(),
            other => other.clone(),
        })
    };
    assert!(check_algebra_map(&p, &a, &proj(0)).unwrap().passed());
    assert!(check_algebra_map(&p, &c, &proj(1)).unwrap().passed());
    assert!(product(&a, &operad_to_oper_algebra(&ass(P, 3), 2).unwrap().restrict_to_isigma()).is_err());
}

/// All equivariant, basepoint preserving maps between the carriers.
fn equivariant_maps(src: &OperadData, dst: &OperadData) -> Vec<SeqMap> {
    let mut maps = vec![SeqMap::default()];
    for n in 0..=src.arity_bound() {
        let mut targets = vec![Elem::Base];
        targets.extend(dst.carrier.real_atoms(n).iter().cloned());
        let mut levels: Vec<Vec<(Elem, Elem)>> = vec![vec![(Elem::Base, Elem::Base)]];
        for x in src.carrier.real_atoms(n) {
            levels = levels
                .into_iter()
                .flat_map(|l| {
                    targets.iter().map(move |t| {
                        let mut l = l.clone();
                        l.push((x.clone(), t.clone()));
                        l
                    })
                })
                .collect();
        }
        maps = maps
            .into_iter()
            .flat_map(|m| {
                levels.iter().map(move |l| {
                    let mut m = m.clone();
                    m.levels.push(l.iter().cloned().collect());
                    m
                })
            })
            .collect();
    }
    maps.into_iter().filter(|m| m.check(&src.carrier, &dst.carrier).is_ok()).collect()
}

#[test]
fn algebra_maps_are_operad_maps() {
    let ops = [ass(P, 3), com(P, 3), ass(P, 3).truncate(2).unwrap()];
    let mut operad_maps = 0;
    for s in &ops {
        let sa = operad_to_oper_algebra(s, 2).unwrap();
        for d in &ops {
            let da = operad_to_oper_algebra(d, 2).unwrap();
            for f in equivariant_maps(s, d) {
                let want = check_operad_map(s, d, &f).passed();
                assert_eq!(check_algebra_map(&sa, &da, &f).unwrap().passed(), want, "{:?}", f.levels);
                operad_maps += want as usize;
            }
        }
    }
    assert_eq!(operad_maps, 17);
}

#[test]
fn symmetric_sequences_are_isigma_algebras() {
    let s = ass(P, 3).carrier;
    let a = symmetric_sequence_algebra(s.clone());
    assert_eq!(a.operad, LevelOperad::ISigma);
    assert!(check_algebra(&a).unwrap().passed());
    let r = operad_to_oper_algebra(&ass(P, 3), 2).unwrap().restrict_to_isigma();
    assert_eq!(r.mu, a.mu);
    let mut bad = a.clone();
    let f = Flat::corolla(Perm::from_images(vec![1, 0]).unwrap());
    bad.corrupt(&f, &[Elem::Perm(Perm::identity(2))], Elem::Perm(Perm::identity(2)));
    assert!(!check_algebra(&bad).unwrap().passed());
}

fn binary_generator(free: bool) -> SymSeq {
    let mut levels = SymSeq::zero(P, 4).levels().to_vec();
    levels[2] = if free {
        SymSeq::sigma(P, 2).levels()[2].clone()
    } else {
        SymSeq::trivial(P, vec![vec![], vec![], atoms(1)]).unwrap().levels()[2].clone()
    };
    SymSeq::new(P, levels).unwrap()
}

/// Binary trees on a set of labelled leaves with at most `height` internal levels,
/// planar or up to swapping children.
fn binary_trees(leaves: &[usize], height: usize, planar: bool) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    if leaves.len() == 1 {
        out.insert(leaves[0].to_string());
        return out;
    }
    if height == 0 {
        return out;
    }
    let n = leaves.len();
    for mask in 1..(1u32 << n) - 1 {
        let (l, r): (Vec<usize>, Vec<usize>) = {
            let l = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| leaves[i]).collect();
            let r = (0..n).filter(|i| mask >> i & 1 == 0).map(|i| leaves[i]).collect();
            (l, r)
        };
        for a in binary_trees(&l, height - 1, planar) {
            for b in binary_trees(&r, height - 1, planar) {
                let pair = if planar || a < b { format!("({a} {b})") } else { format!("({b} {a})") };
                out.insert(pair);
            }
        }
    }
    out
}

#[test]
fn free_operad_counts_match_binary_trees() {
    for free in [false, true] {
        let x = binary_generator(free);
        for height in 1..=3 {
            let o = free_operad(&x, height, 4).unwrap();
            assert!(o.check().passed());
            for n in 1..=4 {
                let leaves: Vec<usize> = (0..n).collect();
                let want = binary_trees(&leaves, height, free).len();
                assert_eq!(o.carrier.real_atoms(n).len(), want, "free {free} height {height} arity {n}");
            }
        }
    }
    let sizes: Vec<usize> =
        (0..=4).map(|n| free_operad(&binary_generator(false), 2, 4).unwrap().carrier.real_atoms(n).len()).collect();
    assert_eq!(sizes, vec![0, 1, 1, 3, 3]);
}

#[test]
fn free_operad_on_nothing_is_the_unit() {
    let o = free_operad(&SymSeq::zero(P, 3), 2, 3).unwrap();
    let sizes: Vec<usize> = (0..=3).map(|n| o.carrier.real_atoms(n).len()).collect();
    assert_eq!(sizes, vec![0, 1, 0, 0]);
    assert_eq!(o.unit, leaf(0));
    assert!(free_operad(&SymSeq::zero(Mode::Plain, 3), 2, 3).is_err());
    assert!(free_operad(&SymSeq::trivial(P, vec![atoms(1)]).unwrap(), 2, 3).is_err());
}

#[test]
fn free_operad_maps_are_determined_by_generators() {
    let x = binary_generator(false);
    let f = free_operad(&x, 2, 3).unwrap();
    let target = com(P, 3);
    let g = generator(&Elem::Atom(0), 2);
    let maps: Vec<SeqMap> = equivariant_maps(&f, &target)
        .into_iter()
        .filter(|m| check_operad_map(&f, &target, m).passed() && !m.apply(2, &g).is_base())
        .collect();
    assert_eq!(maps.len(), 1);
    assert!(f.carrier.real_atoms(3).iter().all(|t| !maps[0].apply(3, t).is_base()));
}

#[test]
fn free_algebras_satisfy_the_laws() {
    let a = free_algebra(&binary_generator(true), 2, 4).unwrap();
    let rep = check_algebra(&a).unwrap();
    assert!(rep.passed());
    assert_eq!(oper_algebra_to_operad(&a).unwrap().carrier.real_atoms(4).len(), 24);
}

fn some_term() -> impl Strategy<Value = (Elem, Perm, Perm)> {
    let terms: Vec<Elem> = free_terms(&binary_generator(true), 2, 4)[4].iter().cloned().collect();
    (0..terms.len(), 0..24usize, 0..24usize).prop_map(move |(i, g, h)| {
        let all = Perm::all(4);
        (terms[i].clone(), all[g].clone(), all[h].clone())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn term_action_is_a_right_action((t, g, h) in some_term()) {
        let lhs = term_act(&term_act(&t, &g), &h);
        prop_assert_eq!(lhs, term_act(&t, &g.compose(&h).unwrap()));
        prop_assert_eq!(term_arity(&t), 4);
        prop_assert_eq!(term_height(&t), 2);
    }

    #[test]
    fn canonical_forms_are_stable((t, g, _h) in some_term()) {
        let x = binary_generator(true);
        let moved = canon(&x, &term_act(&t, &g));
        prop_assert_eq!(canon(&x, &moved), moved.clone());
        prop_assert!(free_terms(&x, 2, 4)[4].contains(&moved));
    }

    #[test]
    fn substitution_adds_arities(i in 0usize..3) {
        let x = binary_generator(false);
        let t2 = free_terms(&x, 1, 2)[2].iter().next().unwrap().clone();
        let ys: Vec<Elem> = (0..2).map(|j| if (i >> j) & 1 == 1 { t2.clone() } else { leaf(0) }).collect();
        let s = substitute(&t2, &ys);
        prop_assert_eq!(term_arity(&s), 2 + ys.iter().filter(|y| **y != leaf(0)).count());
    }
}
