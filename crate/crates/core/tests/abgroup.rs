use num_bigint::BigInt;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use std::collections::BTreeSet;
use tricore::abgroup::{enumerate_extensions, groups_of_order, FgAbelianGroup, GradedGroup, DEFAULT_EXTENSION_BOUND};
use tricore::exactlin::Field;

type G = FgAbelianGroup;

fn cyclic_sum(orders: &[u64]) -> G {
    orders.iter().fold(G::zero(), |acc, &n| acc.direct_sum(&G::cyclic(n)))
}

fn orders_of(g: &G) -> Vec<u64> {
    g.torsion().iter().map(|d| d.to_u64().unwrap()).collect()
}

fn elements(ord: &[u64]) -> Vec<Vec<u64>> {
    ord.iter().fold(vec![vec![]], |acc, &n| {
        acc.into_iter().flat_map(|v| (0..n).map(move |x| [v.clone(), vec![x]].concat())).collect()
    })
}

fn add(a: &[u64], b: &[u64], ord: &[u64]) -> Vec<u64> {
    a.iter().zip(b).zip(ord).map(|((x, y), n)| (x + y) % n).collect()
}

fn scale(a: &[u64], k: u64, ord: &[u64]) -> Vec<u64> {
    a.iter().zip(ord).map(|(x, n)| x * k % n).collect()
}

/// Abelian groups of order n are told apart by #{x : m·x = 0} for m | n.
fn signature(count: impl Fn(u64) -> u64, n: u64) -> Vec<u64> {
    (1..=n).filter(|m| n.is_multiple_of(*m)).map(count).collect()
}

fn count_killed(ord: &[u64], m: u64) -> u64 {
    elements(ord).iter().filter(|x| scale(x, m, ord).iter().all(|v| *v == 0)).count() as u64
}

/// Brute force: does G contain a copy of H with quotient ≅ K?
fn is_extension(g: &G, h: &G, k: &G) -> bool {
    let (go, ho, ko) = (orders_of(g), orders_of(h), orders_of(k));
    let n: u64 = go.iter().product();
    let hn: u64 = ho.iter().product();
    if n != hn * ko.iter().product::<u64>() {
        return false;
    }
    let elems = elements(&go);
    let zero = vec![0; go.len()];
    let h_sig = signature(|m| count_killed(&ho, m), n);
    let k_sig = signature(|m| count_killed(&ko, m), n);
    // Images of the generators of H.
    let mut tuples: Vec<Vec<Vec<u64>>> = vec![vec![]];
    for &d in &ho {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                elems.iter().filter(|e| scale(e, d, &go) == zero).map(move |e| [t.clone(), vec![e.clone()]].concat())
            })
            .collect();
    }
    let mut seen = BTreeSet::new();
    for t in tuples {
        let sub: BTreeSet<Vec<u64>> = elements(&ho)
            .iter()
            .map(|x| x.iter().zip(&t).fold(zero.clone(), |acc, (c, e)| add(&acc, &scale(e, *c, &go), &go)))
            .collect();
        if sub.len() as u64 != hn || !seen.insert(sub.clone()) {
            continue;
        }
        let sub_sig = signature(|m| sub.iter().filter(|x| scale(x, m, &go) == zero).count() as u64, n);
        // #{x+S : m·x ∈ S} = #{x : m·x ∈ S} / |S|
        let quot_sig = signature(|m| elems.iter().filter(|x| sub.contains(&scale(x, m, &go))).count() as u64 / hn, n);
        if sub_sig == h_sig && quot_sig == k_sig {
            return true;
        }
    }
    false
}

fn small_finite() -> impl Strategy<Value = G> {
    proptest::collection::vec(prop_oneof![Just(2u64), Just(3), Just(4), Just(6)], 0..3).prop_map(|v| cyclic_sum(&v))
}

fn group() -> impl Strategy<Value = G> {
    (0usize..3, proptest::collection::vec(1u64..13, 0..4)).prop_map(|(r, v)| G::free(r).direct_sum(&cyclic_sum(&v)))
}

fn graded2() -> impl Strategy<Value = GradedGroup> {
    (group(), group()).prop_map(|(a, b)| GradedGroup::new(2).unwrap().with(0, a).with(1, b))
}

#[test]
fn extension_examples() {
    let z2 = G::cyclic(2);
    let got = enumerate_extensions(&z2, &z2, DEFAULT_EXTENSION_BOUND).unwrap();
    let want: BTreeSet<G> = [G::cyclic(4), cyclic_sum(&[2, 2])].into();
    assert_eq!(got.into_iter().collect::<BTreeSet<_>>(), want);
    assert_eq!(enumerate_extensions(&z2, &G::zero(), DEFAULT_EXTENSION_BOUND).unwrap(), vec![z2.clone()]);
    assert_eq!(enumerate_extensions(&z2, &G::cyclic(3), DEFAULT_EXTENSION_BOUND).unwrap(), vec![G::cyclic(6)]);
    assert!(enumerate_extensions(&G::free(1), &z2, DEFAULT_EXTENSION_BOUND).is_err());
    assert!(enumerate_extensions(&G::cyclic(64), &G::cyclic(128), DEFAULT_EXTENSION_BOUND).is_err());
}

#[test]
fn canonical_form_of_mixed_cyclics() {
    let g = cyclic_sum(&[6, 4, 10]);
    assert_eq!(g.torsion(), &[BigInt::from(2), BigInt::from(2), BigInt::from(60)][..]);
    assert_eq!(g.order(), Some(BigInt::from(240)));
    assert_eq!(G::cyclic(1), G::zero());
}

#[test]
fn groups_of_small_orders() {
    let counts: Vec<usize> = (1..=16).map(|n| groups_of_order(n).len()).collect();
    assert_eq!(counts, vec![1, 1, 1, 2, 1, 1, 1, 3, 2, 1, 1, 2, 1, 1, 1, 5]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn canonicalization_is_idempotent(g in group()) {
        let again = G::from_invariant_factors(g.rank(), g.torsion().to_vec());
        prop_assert_eq!(&again, &g);
        let ds = g.torsion().windows(2).all(|w| &w[1] % &w[0] == BigInt::from(0));
        prop_assert!(ds);
        prop_assert!(g.torsion().iter().all(|d| *d >= BigInt::from(2)));
    }

    #[test]
    fn direct_sum_commutes_and_associates(a in group(), b in group(), c in group()) {
        prop_assert_eq!(a.direct_sum(&b), b.direct_sum(&a));
        prop_assert_eq!(a.direct_sum(&b).direct_sum(&c), a.direct_sum(&b.direct_sum(&c)));
    }

    #[test]
    fn dim_mod_p_is_additive(a in group(), b in group(), p in prop_oneof![Just(2u64), Just(3), Just(5), Just(7)]) {
        prop_assert_eq!(
            a.direct_sum(&b).dim_mod_p(p).unwrap(),
            a.dim_mod_p(p).unwrap() + b.dim_mod_p(p).unwrap()
        );
    }

    #[test]
    fn l_space_predicate_splits(a in graded2(), p in prop_oneof![Just(2u64), Just(3), Just(5)]) {
        let lhs = a.is_l_space(Field::Prime(p)).unwrap();
        let rhs = a.is_l_space(Field::Rational).unwrap() && !a.has_p_torsion(p);
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn extensions_match_brute_force(h in small_finite(), k in small_finite()) {
        let n = (h.order().unwrap() * k.order().unwrap()).to_u64().unwrap();
        prop_assume!(n <= 48);
        let got: BTreeSet<G> = enumerate_extensions(&h, &k, DEFAULT_EXTENSION_BOUND).unwrap().into_iter().collect();
        let want: BTreeSet<G> = groups_of_order(n).into_iter().filter(|g| is_extension(g, &h, &k)).collect();
        prop_assert_eq!(&got, &want);
        for g in &got {
            for p in [2u64, 3] {
                let (dg, dh, dk) = (g.p_rank(p), h.p_rank(p), k.p_rank(p));
                prop_assert!(dh.max(dk) <= dg && dg <= dh + dk);
            }
        }
    }
}
