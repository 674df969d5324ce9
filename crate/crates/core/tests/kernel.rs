use std::collections::BTreeSet;

use itertools::Itertools;
use opnl::kernel::*;
use proptest::prelude::*;

fn perm(v: &[usize]) -> Perm {
    Perm::from_one_based(v).unwrap()
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Stabilizer of the consecutive block partition under Σ_k acting on set partitions.
fn partition_stabilizer(sizes: &[usize]) -> BTreeSet<Perm> {
    let k: usize = sizes.iter().sum();
    let mut blocks = Vec::new();
    let mut off = 0;
    for &s in sizes {
        blocks.push((off..off + s).collect::<BTreeSet<_>>());
        off += s;
    }
    let partition: BTreeSet<BTreeSet<usize>> = blocks.iter().cloned().collect();
    Perm::all(k)
        .into_iter()
        .filter(|p| {
            let image: BTreeSet<BTreeSet<usize>> =
                blocks.iter().map(|b| b.iter().map(|&i| p.image(i)).collect()).collect();
            image == partition
        })
        .collect()
}

fn expected_order(sizes: &[usize]) -> usize {
    let inner: usize = sizes.iter().map(|&k| factorial(k)).product();
    let mult: usize = sizes.iter().counts().values().map(|&m| factorial(m)).product();
    inner * mult
}

fn compositions(total_max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn rec(acc: &mut Vec<usize>, left: usize, out: &mut Vec<Vec<usize>>) {
        if !acc.is_empty() {
            out.push(acc.clone());
        }
        for k in 1..=left {
            acc.push(k);
            rec(acc, left - k, out);
            acc.pop();
        }
    }
    rec(&mut Vec::new(), total_max, &mut out);
    out
}

#[test]
fn transposition_composite_matches_pointwise_oracle() {
    let a = perm(&[2, 1, 3]);
    let b = perm(&[1, 3, 2]);
    let c = a.compose(&b).unwrap();
    let pointwise: Vec<usize> = (0..3).map(|i| a.image(b.image(i))).collect();
    assert_eq!(c.images(), pointwise);
    assert_eq!(c, perm(&[2, 3, 1]));
}

#[test]
fn compose_rejects_degree_mismatch() {
    assert!(Perm::identity(2).compose(&Perm::identity(3)).is_err());
}

#[test]
fn h_subgroup_small_cases() {
    let h = h_subgroup(&[1, 2]).unwrap();
    assert_eq!(h.order(), 2);
    assert_eq!(h.elements.iter().cloned().collect::<BTreeSet<_>>(), partition_stabilizer(&[1, 2]));
    let h = h_subgroup(&[2, 2]).unwrap();
    assert_eq!(h.order(), 8);
    assert_eq!(h.order(), wreath(2, 2).unwrap().order());
    assert_eq!(h_subgroup(&[4]).unwrap().order(), 24);
    assert!(h_subgroup(&[]).is_err());
}

#[test]
fn h_subgroup_is_partition_stabilizer_up_to_six() {
    for sizes in compositions(6) {
        let h = h_subgroup(&sizes).unwrap();
        assert_eq!(h.order(), expected_order(&sizes), "{sizes:?}");
        let set: BTreeSet<Perm> = h.elements.iter().cloned().collect();
        assert_eq!(set, partition_stabilizer(&sizes), "{sizes:?}");
    }
}

#[test]
fn h_subgroup_is_closed() {
    for sizes in compositions(5) {
        assert!(is_subgroup(&h_subgroup(&sizes).unwrap().elements));
    }
}

#[test]
fn block_sum_examples() {
    let id = block_sum(&Perm::identity(3), &[Perm::identity(1), Perm::identity(2), Perm::identity(1)]);
    assert!(id.unwrap().is_identity());
    let swap = perm(&[2, 1]);
    let b = block_sum(&swap, &[Perm::identity(1), Perm::identity(2)]).unwrap();
    // The unique permutation sending block {1} after block {2,3}, order kept inside blocks.
    let oracle: Vec<Perm> =
        Perm::all(3).into_iter().filter(|p| p.image(1) == 0 && p.image(2) == 1 && p.image(0) == 2).collect();
    assert_eq!(oracle, vec![b]);
}

#[test]
fn block_sum_injective_with_distinct_sizes() {
    for n in 1..=3 {
        for sizes in (1..=3).permutations(n) {
            let mut seen = BTreeSet::new();
            for outer in Perm::all(n) {
                for inners in sizes.iter().map(|&k| Perm::all(k)).multi_cartesian_product() {
                    assert!(seen.insert(block_sum(&outer, &inners).unwrap()));
                }
            }
        }
    }
}

#[test]
fn wreath_multiplication_law() {
    for n in 1..=3 {
        for sizes in (0..n).map(|_| 1..=2usize).multi_cartesian_product() {
            let inner_all: Vec<Vec<Perm>> = sizes.iter().map(|&k| Perm::all(k)).collect();
            for s2 in Perm::all(n) {
                // τ' lives on the blocks of sizes; σ' permutes them into sizes∘σ'⁻¹.
                let sizes2: Vec<usize> = (0..n).map(|b| sizes[s2.inverse().image(b)]).collect();
                let inner2: Vec<Vec<Perm>> = sizes2.iter().map(|&k| Perm::all(k)).collect();
                for s1 in Perm::all(n) {
                    for t2 in inner_all.iter().multi_cartesian_product() {
                        let t2: Vec<Perm> = t2.into_iter().cloned().collect();
                        for t1 in inner2.iter().multi_cartesian_product() {
                            let t1: Vec<Perm> = t1.into_iter().cloned().collect();
                            let lhs = block_sum(&s1, &t1).unwrap().compose(&block_sum(&s2, &t2).unwrap()).unwrap();
                            let inner: Vec<Perm> = (0..n).map(|i| t1[s2.image(i)].compose(&t2[i]).unwrap()).collect();
                            let rhs = block_sum(&s1.compose(&s2).unwrap(), &inner).unwrap();
                            assert_eq!(lhs, rhs);
                        }
                    }
                }
            }
        }
    }
}

fn regular_set(n: usize) -> GObj {
    let atoms: Vec<Elem> = Perm::all(n).into_iter().map(Elem::Perm).collect();
    let carrier = FinObj::new(Mode::Plain, atoms).unwrap();
    GObj::from_right_action(carrier, n, |x, g| match x {
        Elem::Perm(p) => Elem::Perm(p.compose(g).unwrap()),
        _ => unreachable!(),
    })
    .unwrap()
}

#[test]
fn orbit_examples() {
    let carrier = FinObj::with_atoms(Mode::Plain, (0..3).map(Elem::Atom).collect()).unwrap();
    let triv = GObj::trivial(carrier, 3);
    assert_eq!(orbit_quotient(&triv, &Perm::all(3)).unwrap().count(), 3);

    // Σ_2 acting freely on four atoms, swapping 0↔1 and 2↔3.
    let carrier = FinObj::with_atoms(Mode::Plain, (0..4).map(Elem::Atom).collect()).unwrap();
    let free = GObj::from_tables(carrier, 2, vec![vec![1, 0, 3, 2]]).unwrap();
    let orbits = orbit_quotient(&free, &[perm(&[2, 1])]).unwrap();
    assert_eq!(orbits.count(), 2);
    let explicit: BTreeSet<BTreeSet<usize>> =
        (0..4).map(|x| [x, free.act_left(&perm(&[2, 1]), x)].into_iter().collect()).collect();
    assert_eq!(explicit.len(), 2);
    assert!(free.is_free());

    let carrier = FinObj::with_atoms(Mode::Pointed, (0..2).map(Elem::Atom).collect()).unwrap();
    let pointed = GObj::from_tables(carrier, 2, vec![vec![0, 2, 1]]).unwrap();
    let orbits = orbit_quotient(&pointed, &[perm(&[2, 1])]).unwrap();
    assert_eq!(orbits.members(0), vec![0]);
    assert_eq!(
        orbit_quotient(&pointed, &[Perm::identity(3)]).unwrap_err(),
        opnl::Error::DegreeMismatch { left: 3, right: 2 }
    );
}

#[test]
fn invalid_actions_are_rejected() {
    let carrier = FinObj::with_atoms(Mode::Pointed, (0..2).map(Elem::Atom).collect()).unwrap();
    assert!(GObj::from_tables(carrier.clone(), 2, vec![vec![1, 0, 2]]).is_err());
    assert!(GObj::from_tables(carrier, 2, vec![vec![0, 2, 2]]).is_err());
}

#[test]
fn action_is_a_right_action() {
    let g = regular_set(4);
    let all = Perm::all(4);
    for x in 0..g.len() {
        for a in all.iter().step_by(5) {
            for b in all.iter().step_by(7) {
                let lhs = g.act_right(g.act_right(x, a), b);
                let rhs = g.act_right(x, &a.compose(b).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
        let p = g.carrier.get(x).as_perm().unwrap().clone();
        let q = all[11].clone();
        assert_eq!(g.act_elem(&Elem::Perm(p.clone()), &q), Some(&Elem::Perm(p.compose(&q).unwrap())));
    }
}

#[test]
fn base_category_products() {
    let a = FinObj::with_atoms(Mode::Plain, (0..2).map(Elem::Atom).collect()).unwrap();
    let b = FinObj::with_atoms(Mode::Plain, (0..3).map(Elem::Atom).collect()).unwrap();
    assert_eq!(tensor_obj(&a, &b).unwrap().len(), 6);
    assert_eq!(coproduct_obj(&a, &b).unwrap().len(), 5);
    let pa = FinObj::with_atoms(Mode::Pointed, (0..2).map(Elem::Atom).collect()).unwrap();
    let smash = tensor_obj(&pa, &pa).unwrap();
    // Oracle: quotient of the full product by the wedge of axes.
    let full = pa.len() * pa.len();
    let axes = pa.len() + pa.len() - 1;
    assert_eq!(smash.len(), full - axes + 1);
    assert_eq!(smash.len(), 5);
    assert!(tensor_obj(&a, &pa).is_err());
    for obj in [&a, &pa] {
        let u = right_unitor(obj).unwrap();
        assert_eq!(u.iter().copied().collect::<BTreeSet<_>>().len(), obj.len());
    }
}

proptest! {
    #[test]
    fn group_laws(v in Just((0..5usize).collect::<Vec<_>>()).prop_shuffle(),
                  w in Just((0..5usize).collect::<Vec<_>>()).prop_shuffle(),
                  u in Just((0..5usize).collect::<Vec<_>>()).prop_shuffle()) {
        let (a, b, c) = (Perm::from_images(v).unwrap(), Perm::from_images(w).unwrap(), Perm::from_images(u).unwrap());
        let id = Perm::identity(5);
        prop_assert_eq!(id.compose(&a).unwrap(), a.clone());
        prop_assert!(a.compose(&a.inverse()).unwrap().is_identity());
        prop_assert_eq!(a.compose(&b).unwrap().compose(&c).unwrap(), a.compose(&b.compose(&c).unwrap()).unwrap());
        let word = a.adjacent_word();
        let rebuilt = word.iter().fold(id, |acc, &i| Perm::adjacent(5, i).compose(&acc).unwrap());
        prop_assert_eq!(rebuilt, a);
    }

    #[test]
    fn orbit_reps_ignore_generator_order(gens in proptest::collection::vec(0usize..24, 1..4), seed in 0usize..24) {
        let g = regular_set(4);
        let all = Perm::all(4);
        let mut list: Vec<Perm> = gens.iter().map(|&i| all[i].clone()).collect();
        let a = orbit_quotient(&g, &list).unwrap();
        let len = list.len();
        list.rotate_left(seed % len);
        let b = orbit_quotient(&g, &list).unwrap();
        prop_assert_eq!(&a, &b);
        for &r in &a.reps {
            prop_assert_eq!(a.rep[r], r);
            prop_assert!(a.members(r).iter().all(|&m| m >= r));
        }
    }
}
