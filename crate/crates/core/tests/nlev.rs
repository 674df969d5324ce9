use std::collections::BTreeMap;
use std::sync::OnceLock;

use opnl::kernel::{Mode, Perm};
use opnl::nlev::*;
use opnl::profiles::{enumerate_profiles, Profile};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn p(s: &str) -> Profile {
    Profile::parse(s).unwrap()
}

fn oper3() -> &'static Oper {
    static O: OnceLock<Oper> = OnceLock::new();
    O.get_or_init(|| Oper::new(Mode::Plain, 3, 3).unwrap())
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Planar level lists of depth `k` and weight `t`, grouped by sorted profile.
fn planar_trees(k: usize, t: usize) -> BTreeMap<Profile, usize> {
    fn tuples(len: usize, sum: usize) -> Vec<Vec<usize>> {
        if len == 0 {
            return if sum == 0 { vec![vec![]] } else { vec![] };
        }
        (1..=sum)
            .flat_map(|first| {
                tuples(len - 1, sum - first).into_iter().map(move |mut rest| {
                    rest.insert(0, first);
                    rest
                })
            })
            .collect()
    }
    let mut partial: Vec<Vec<Vec<usize>>> = (1..=t).map(|n| vec![vec![n]]).collect();
    for _ in 1..k {
        let mut next = Vec::new();
        for levels in partial {
            let count: usize = levels.last().unwrap().iter().sum();
            for sum in count..=t {
                for lv in tuples(count, sum) {
                    let mut l = levels.clone();
                    l.push(lv);
                    next.push(l);
                }
            }
        }
        partial = next;
    }
    let mut out = BTreeMap::new();
    for levels in partial {
        if levels.last().unwrap().iter().sum::<usize>() == t {
            *out.entry(Profile::new(levels).unwrap()).or_insert(0) += 1;
        }
    }
    out
}

#[test]
fn flat_shapes() {
    let f = Flat::new(vec![vec![2], vec![1, 3]], Perm::identity(4)).unwrap();
    assert_eq!(f.weight(), 4);
    assert_eq!(f.profile(), p("(2,(3,1))"));
    assert_eq!(f.slots(), vec![vec![0], vec![1, 0]]);
    assert!(Flat::new(vec![vec![2], vec![1]], Perm::identity(1)).is_err());
    assert_eq!(slot_order(&[1, 3, 1, 2]), vec![2, 0, 3, 1]);
}

#[test]
fn renormalize_by_identities_is_identity() {
    let f = Flat::new(vec![vec![2], vec![2, 1]], Perm::from_images(vec![2, 0, 1]).unwrap()).unwrap();
    let decs = vec![vec![Perm::identity(2)], vec![Perm::identity(2), Perm::identity(1)]];
    let (g, _) = renormalize(&f, &decs).unwrap();
    assert_eq!(g, f);
}

#[test]
fn graft_into_corolla() {
    let base = Flat::corolla(Perm::identity(2));
    let blow = vec![vec![Flat::new(vec![vec![2], vec![1, 1]], Perm::identity(2)).unwrap()]];
    let (g, places) = graft(&base, &[2], &blow).unwrap();
    assert_eq!(g.levels, vec![vec![2], vec![1, 1]]);
    assert_eq!(places[0][0], vec![vec![0], vec![0, 1]]);
}

#[test]
fn counts_match_planar_trees() {
    let o = oper3();
    for k in 1..=3 {
        for t in 1..=3 {
            let oracle = planar_trees(k, t);
            for q in enumerate_profiles(k, t, true, None).unwrap() {
                let got = o.key(k, &q).map_or(0, |x| x.len());
                let want = oracle.get(&q).copied().unwrap_or(0) * factorial(t);
                assert_eq!(got, want, "level {k} profile {q}");
            }
        }
    }
    assert_eq!(o.key(1, &p("(3)")).unwrap().len(), 6);
    let o4 = Oper::new(Mode::Plain, 2, 4).unwrap();
    assert_eq!(o4.key(2, &p("(2,(2,2))")).unwrap().len(), 24);
}

#[test]
fn flatten_round_trips() {
    let o = oper3();
    for ((l, _), k) in o.keys() {
        for x in &k.atoms {
            let f = o.flatten(*l, x).unwrap();
            assert_eq!(o.unflatten(&f).unwrap(), *x);
        }
    }
}

#[test]
fn multiplication_is_bijective_on_classes() {
    let o = oper3();
    let s = o.sym_object().unwrap();
    for ells in [vec![1, 1], vec![2], vec![1, 2], vec![2, 1], vec![3]] {
        let (rep, sum) = o.check_xi(&s, &ells, 3).unwrap();
        assert!(rep.passed(), "{ells:?}: {:?}", rep.witnesses.first().map(|w| &w.diagram));
        assert!(sum.classes > 0 && sum.classes <= sum.pre_quotient);
    }
}

#[test]
fn multiplication_laws() {
    let o = Oper::new(Mode::Plain, 2, 2).unwrap();
    let rep = o.check_laws(Bounds { max_level: 2, max_weight: 2 }).unwrap();
    assert!(rep.checked > 0);
    assert!(rep.passed());
}

#[test]
fn isigma_is_idempotent() {
    let i = oper3().isigma().unwrap();
    let ii = odot_sigma(&i, &i, Bounds { max_level: 1, max_weight: 3 }).unwrap();
    let sizes = |o: &NLevObject| o.iter().map(|(k, v)| (k.clone(), v.real_len())).collect::<Vec<_>>();
    assert_eq!(sizes(ii.object()), sizes(i.object()));
}

#[test]
fn colored_table_collects_profiles() {
    let o = oper3().object().unwrap();
    let c = forget_to_colored(&o);
    assert_eq!(c[&(vec![2], 2)].len(), 2);
    // (2,(1,1)) at level two and (1,(2),(1,1)) at level three share their colors.
    let entry = &c[&(vec![2, 1, 1], 2)];
    assert_eq!(entry.len(), 4);
    assert!(entry.iter().any(|((l, _), _)| *l == 2) && entry.iter().any(|((l, _), _)| *l == 3));
    assert_eq!(c.values().map(Vec::len).sum::<usize>(), o.size());
}

#[test]
fn odot_units_on_random_objects() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let x = NLevObject::random_reduced(Mode::Plain, 2, 3, 2, &mut rng);
        let unit = NLevObject::unit(Mode::Plain, 3, false);
        let rep = check_monoidal(&x, &unit, &unit, Bounds { max_level: 2, max_weight: 3 }).unwrap();
        let unit_failures = rep.witnesses.iter().filter(|w| w.diagram.contains("unit")).count();
        assert_eq!(unit_failures, 0);
    }
}

#[test]
fn regrouping_misses_mixed_summands() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let bounds = Bounds { max_level: 2, max_weight: 3 };
    let found = (0..20).any(|_| {
        let a = NLevObject::random_reduced(Mode::Plain, 2, 3, 2, &mut rng);
        let b = NLevObject::random_reduced(Mode::Plain, 2, 3, 2, &mut rng);
        let c = NLevObject::random_reduced(Mode::Plain, 2, 3, 2, &mut rng);
        let rep = check_monoidal(&a, &b, &c, bounds).unwrap();
        rep.witnesses.iter().any(|w| w.diagram.starts_with("associativity") && w.diagram.contains("not in image"))
    });
    assert!(found);
}

#[test]
fn regrouping_round_trips_on_its_domain() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let a = NLevObject::random_reduced(Mode::Plain, 2, 3, 2, &mut rng);
    let b = NLevObject::random_reduced(Mode::Plain, 1, 3, 2, &mut rng);
    let c = NLevObject::random_reduced(Mode::Plain, 1, 3, 2, &mut rng);
    let ab = odot(&a, &b, Bounds { max_level: 2, max_weight: 3 }).unwrap();
    for elems in odot_elems(&ab, &c, Bounds { max_level: 2, max_weight: 3 }).unwrap().values() {
        for e in elems {
            let f = assoc_forward(e).unwrap();
            assert_eq!(f.key().unwrap(), e.key().unwrap());
            assert_eq!(assoc_backward(&f).unwrap(), *e);
        }
    }
}

#[test]
fn odot_element_encoding_round_trips() {
    let o = oper3().object().unwrap();
    let elems = odot_elems(&o, &o, Bounds { max_level: 2, max_weight: 2 }).unwrap();
    for e in elems.values().flatten() {
        assert_eq!(OdotElem::decode(&e.encode()).unwrap(), *e);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn json_round_trip(seed in any::<u64>(), pointed in any::<bool>()) {
        let mode = if pointed { Mode::Pointed } else { Mode::Plain };
        let x = NLevObject::random_reduced(mode, 3, 3, 3, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(x.is_reduced());
        prop_assert_eq!(NLevObject::from_json(&x.to_json()).unwrap(), x);
    }

    #[test]
    fn leaf_relabelling_commutes_with_flatten(i in 0usize..6) {
        let o = oper3();
        let key = o.key(2, &p("(2,(1,1))")).unwrap();
        let x = &key.atoms[i % key.len()];
        let f = o.flatten(2, x).unwrap();
        let g = Perm::from_images(vec![1, 0]).unwrap();
        let moved = f.with_lambda(f.lambda.compose(&g).unwrap());
        prop_assert_eq!(o.flatten(2, &o.unflatten(&moved).unwrap()).unwrap(), moved);
    }

    #[test]
    fn decorate_preserves_profile(j in 0usize..2, s in 0usize..2) {
        let f = Flat::new(vec![vec![2], vec![2, 1]], Perm::identity(3)).unwrap();
        let slots = f.levels[j].len();
        let s = s % slots;
        let arity = f.levels[j][f.vertices()[j][s]];
        let g = Perm::from_images((0..arity).rev().collect()).unwrap();
        let (h, rho) = decorate(&f, j, s, &g).unwrap();
        prop_assert_eq!(h.profile(), f.profile());
        prop_assert_eq!(rho.len(), f.depth());
    }
}
