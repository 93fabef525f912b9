use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;
use std::collections::BTreeMap;
use std::sync::Arc;
use tricore::abgroup::FgAbelianGroup;
use tricore::chain::{
    extend_scalars, homology, homology_dims, is_acyclic, mapping_cone, specialize, spectral_sequence, ChainComplex,
    ComplexExt, Filtration, GradedMap, Grading, IntComplex, Specialized,
};
use tricore::exactlin::nilpotent::EvalPoint;
use tricore::exactlin::{Field, IntMatrix};

type G = FgAbelianGroup;

fn cellular(diffs: &[(i64, Vec<Vec<i64>>)], ranks: &[(i64, usize)]) -> IntComplex {
    IntComplex::from_i64(Grading::Integer, ranks, diffs).unwrap()
}

fn rp2() -> IntComplex {
    cellular(&[(1, vec![vec![0]]), (2, vec![vec![2]])], &[(0, 1), (1, 1), (2, 1)])
}

fn klein_bottle() -> IntComplex {
    // one vertex, edges a b, face a b a⁻¹ b
    cellular(&[(1, vec![vec![0, 0]]), (2, vec![vec![0], vec![2]])], &[(0, 1), (1, 2), (2, 1)])
}

fn lens(p: i64) -> IntComplex {
    cellular(
        &[(1, vec![vec![0]]), (2, vec![vec![p]]), (3, vec![vec![0]])],
        &[(0, 1), (1, 1), (2, 1), (3, 1)],
    )
}

fn dims(c: &IntComplex, f: Field) -> Vec<usize> {
    let d = homology_dims(c, f);
    (0..=c.grades().last().copied().unwrap_or(0)).map(|g| d.get(&g).copied().unwrap_or(0)).collect()
}

#[test]
fn rp2_homology() {
    let h = homology(&rp2()).unwrap();
    assert_eq!(h.group(0), G::free(1));
    assert_eq!(h.group(1), G::cyclic(2));
    assert_eq!(h.group(2), G::zero());
    assert_eq!(dims(&rp2(), Field::Prime(2)), vec![1, 1, 1]);
    assert_eq!(dims(&rp2(), Field::Rational), vec![1, 0, 0]);
    assert_eq!(dims(&rp2(), Field::Prime(3)), vec![1, 0, 0]);
}

#[test]
fn klein_bottle_homology() {
    let k = klein_bottle();
    let h = homology(&k).unwrap();
    assert_eq!(h.group(0), G::free(1));
    assert_eq!(h.group(1), G::free(1).direct_sum(&G::cyclic(2)));
    assert_eq!(h.group(2), G::zero());
    assert_eq!(h.euler_characteristic(), 0);
    assert_eq!(dims(&k, Field::Prime(2)), vec![1, 2, 1]);
}

#[test]
fn lens_space_homology() {
    for p in 1..=7 {
        let c = lens(p);
        let h = homology(&c).unwrap();
        assert_eq!(h.group(0), G::free(1));
        assert_eq!(h.group(1), G::cyclic(p));
        assert_eq!(h.group(2), G::zero());
        assert_eq!(h.group(3), G::free(1));
        assert_eq!(h.euler_characteristic(), 0);
        // |H_1| = p matches a rank-p Floer group with χ = p
        assert_eq!(h.group(1).order(), Some(BigInt::from(p)));
        for q in [2u64, 3, 5, 7] {
            let t = if (p as u64).is_multiple_of(q) { 1 } else { 0 };
            assert_eq!(dims(&c, Field::Prime(q)), vec![1, t, t, 1], "L({p},1) over F_{q}");
        }
    }
}

#[test]
fn circle_and_zero_complex() {
    let s1 = cellular(&[(1, vec![vec![0]])], &[(0, 1), (1, 1)]);
    let h = homology(&s1).unwrap();
    assert_eq!((h.group(0), h.group(1)), (G::free(1), G::free(1)));
    let z = IntComplex::zero(Grading::Integer);
    assert!(homology(&z).unwrap().is_zero());
    assert!(homology_dims(&z, Field::Prime(2)).values().all(|d| *d == 0));
}

#[test]
fn laurent_homology_is_refused() {
    assert!(homology(&extend_scalars(&rp2())).is_err());
}

#[test]
fn cone_examples() {
    let z = Arc::new(cellular(&[], &[(0, 1)]));
    let id = z.identity();
    assert!(is_acyclic(&mapping_cone(&id).unwrap().complex));

    let two = id.scale(&BigInt::from(2));
    let cone = mapping_cone(&two).unwrap();
    let h = homology(&cone.complex).unwrap();
    assert_eq!(h.group(0), G::cyclic(2));
    assert_eq!(h.group(1), G::zero());

    // cone of the zero map is B ⊕ A[1]
    let a = Arc::new(rp2());
    let b = Arc::new(lens(3));
    let zero = GradedMap::zero(a.clone(), b.clone(), 0);
    let hc = homology(&mapping_cone(&zero).unwrap().complex).unwrap();
    let (ha, hb) = (homology(&a).unwrap(), homology(&b).unwrap());
    for g in -1..=5 {
        assert_eq!(hc.group(g), hb.group(g).direct_sum(&ha.group(g - 1)), "grade {g}");
    }
    // f₁ = [1], f₂ = 0 fails ∂f = f∂ on the 2-cell
    let bad = GradedMap::new(a.clone(), a.clone(), 0, BTreeMap::from([(1, IntMatrix::identity(1))])).unwrap();
    assert!(mapping_cone(&bad).is_err());
}

#[test]
fn specialization_examples() {
    let c = rp2();
    assert_eq!(specialize(&extend_scalars(&c), EvalPoint::One).unwrap(), Specialized::Int(c.clone()));
    match specialize(&extend_scalars(&c), EvalPoint::ModP { p: 2, unit: 1 }).unwrap() {
        Specialized::ModP(f) => {
            assert!(f.diff(2).is_zero());
            assert_eq!(f.homology_dims().values().sum::<usize>(), 3);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn trivial_and_cone_filtrations() {
    let c = Arc::new(lens(4));
    let ss = spectral_sequence(&Filtration::trivial(c.clone()), Field::Prime(2)).unwrap();
    assert_eq!(ss.stabilized_at, 1);
    assert_eq!(ss.pages[0].total_dim(), 4);
    assert!(ss.abutment_ok);

    let z = Arc::new(cellular(&[], &[(0, 1), (1, 1)]));
    let cone = mapping_cone(&z.identity()).unwrap();
    let levels: BTreeMap<i64, Vec<i64>> =
        cone.complex.grades().into_iter().map(|g| (g, cone.sum.owners(g).iter().map(|k| *k as i64).collect())).collect();
    let ss = spectral_sequence(&Filtration::new(cone.complex.clone(), levels).unwrap(), Field::Rational).unwrap();
    assert!(ss.page(2).unwrap().is_zero());
}

/// Direct sum of elementary pieces: `Free(g)` is ℤ in grade g, `Arrow(g, d)`
/// is multiplication by d from ℤ in grade g to ℤ in grade g − 1.
#[derive(Clone, Debug)]
enum Piece {
    Free(i64),
    Arrow(i64, i64),
}

#[derive(Clone, Debug)]
struct Model {
    pieces: Vec<(Piece, i64)>,
    complex: IntComplex,
    levels: BTreeMap<i64, Vec<i64>>,
}

impl Model {
    fn expected(&self) -> BTreeMap<i64, G> {
        let mut out: BTreeMap<i64, G> = BTreeMap::new();
        let mut put = |g: i64, x: G| {
            let e = out.entry(g).or_default();
            *e = e.direct_sum(&x);
        };
        for (p, _) in &self.pieces {
            match *p {
                Piece::Free(g) => put(g, G::free(1)),
                Piece::Arrow(g, 0) => {
                    put(g, G::free(1));
                    put(g - 1, G::free(1));
                }
                Piece::Arrow(g, d) => put(g - 1, G::cyclic(d.abs())),
            }
        }
        out.retain(|_, x| !x.is_zero());
        out
    }

    fn expected_dims(&self, p: Option<i64>) -> usize {
        self.pieces
            .iter()
            .map(|(piece, _)| match *piece {
                Piece::Free(_) => 1,
                Piece::Arrow(_, d) => match p {
                    _ if d == 0 => 2,
                    Some(p) if d % p == 0 => 2,
                    _ => 0,
                },
            })
            .sum()
    }
}

fn elementary(n: usize, i: usize, j: usize, c: i64) -> (IntMatrix, IntMatrix) {
    let mut e = IntMatrix::identity(n);
    let mut f = IntMatrix::identity(n);
    e.set(i, j, BigInt::from(c));
    f.set(i, j, BigInt::from(-c));
    (e, f)
}

/// Builds the pieces, then changes basis in each grade by elementary
/// operations that keep every F_s = span{level ≤ s} invariant.
fn build(pieces: Vec<(Piece, i64)>, ops: &[(usize, usize, usize, i64)]) -> Model {
    let mut basis: BTreeMap<i64, Vec<(usize, i64)>> = BTreeMap::new();
    for (k, (p, lvl)) in pieces.iter().enumerate() {
        match *p {
            Piece::Free(g) => basis.entry(g).or_default().push((k, *lvl)),
            Piece::Arrow(g, _) => {
                basis.entry(g).or_default().push((k, *lvl));
                basis.entry(g - 1).or_default().push((k, *lvl - 1));
            }
        }
    }
    let index = |g: i64, k: usize| basis[&g].iter().position(|(piece, _)| *piece == k).unwrap();
    let mut diffs: BTreeMap<i64, IntMatrix> = BTreeMap::new();
    for (k, (p, _)) in pieces.iter().enumerate() {
        if let Piece::Arrow(g, d) = *p {
            let m = diffs.entry(g).or_insert_with(|| IntMatrix::zeros(basis[&(g - 1)].len(), basis[&g].len()));
            m.set(index(g - 1, k), index(g, k), BigInt::from(d));
        }
    }
    let grades: Vec<i64> = basis.keys().copied().collect();
    let mut change: BTreeMap<i64, (IntMatrix, IntMatrix)> =
        grades.iter().map(|g| (*g, (IntMatrix::identity(basis[g].len()), IntMatrix::identity(basis[g].len())))).collect();
    for &(gi, i, j, c) in ops {
        let g = grades[gi % grades.len()];
        let n = basis[&g].len();
        let (i, j) = (i % n, j % n);
        // e_j ↦ e_j + c·e_i needs level(e_i) ≤ level(e_j)
        if i == j || basis[&g][i].1 > basis[&g][j].1 {
            continue;
        }
        let (e, f) = elementary(n, i, j, c);
        let (p, q) = change.get_mut(&g).unwrap();
        *p = e.mul(p);
        *q = q.mul(&f);
    }
    let mut new_diffs = BTreeMap::new();
    for (g, d) in diffs {
        new_diffs.insert(g, change[&(g - 1)].0.mul(&d).mul(&change[&g].1));
    }
    let ranks = basis.iter().map(|(g, b)| (*g, b.len())).collect();
    let complex = ChainComplex::new(Grading::Integer, ranks, new_diffs).unwrap();
    let levels = basis.iter().map(|(g, b)| (*g, b.iter().map(|x| x.1).collect())).collect();
    Model { pieces, complex, levels }
}

fn piece() -> impl Strategy<Value = (Piece, i64)> {
    (
        prop_oneof![
            (-2i64..3).prop_map(Piece::Free),
            (-1i64..3, prop_oneof![Just(0i64), Just(1), Just(-1), Just(2), Just(3), Just(4), Just(6), Just(-12)])
                .prop_map(|(g, d)| Piece::Arrow(g, d)),
        ],
        0i64..4,
    )
}

fn model() -> impl Strategy<Value = Model> {
    (
        proptest::collection::vec(piece(), 1..7),
        proptest::collection::vec((0usize..8, 0usize..8, 0usize..8, -3i64..=3), 0..30),
    )
        .prop_map(|(p, o)| build(p, &o))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn homology_matches_construction(m in model()) {
        let h = homology(&m.complex).unwrap();
        prop_assert_eq!(&h.groups, &m.expected());
    }

    #[test]
    fn euler_characteristic_is_alternating_rank_sum(m in model()) {
        let h = homology(&m.complex).unwrap();
        prop_assert_eq!(Some(h.euler_characteristic()), m.complex.euler_characteristic());
    }

    #[test]
    fn field_dims_follow_universal_coefficients(m in model(), p in prop_oneof![Just(2i64), Just(3), Just(5)]) {
        let fp: usize = homology_dims(&m.complex, Field::Prime(p as u64)).values().sum();
        prop_assert_eq!(fp, m.expected_dims(Some(p)));
        let q: usize = homology_dims(&m.complex, Field::Rational).values().sum();
        prop_assert_eq!(q, m.expected_dims(None));
    }

    #[test]
    fn homology_commutes_with_direct_sum(a in model(), b in model()) {
        let s = a.complex.direct_sum(&b.complex).unwrap();
        let (hs, ha, hb) = (homology(&s).unwrap(), homology(&a.complex).unwrap(), homology(&b.complex).unwrap());
        for g in -4..=4 {
            prop_assert_eq!(hs.group(g), ha.group(g).direct_sum(&hb.group(g)));
        }
    }

    #[test]
    fn cone_is_acyclic_iff_quasi_iso(m in model(), k in prop_oneof![Just(1i64), Just(-1), Just(0), Just(2), Just(5)]) {
        let c = Arc::new(m.complex.clone());
        let f = c.identity().scale(&BigInt::from(k));
        let acyclic = is_acyclic(&mapping_cone(&f).unwrap().complex);
        // k acts invertibly on H iff H is finite with order prime to k, or k = ±1
        let h = m.expected();
        let quasi = k.abs() == 1
            || h.values().all(|x| x.rank() == 0 && x.torsion().iter().all(|d| d.gcd(&BigInt::from(k)).is_one()));
        prop_assert_eq!(acyclic, quasi);
    }

    #[test]
    fn spectral_sequence_abuts_to_homology(m in model(), f in prop_oneof![Just(Field::Prime(2)), Just(Field::Prime(3)), Just(Field::Rational)]) {
        let filt = Filtration::new(Arc::new(m.complex.clone()), m.levels.clone()).unwrap();
        let ss = spectral_sequence(&filt, f).unwrap();
        let want = match f {
            Field::Prime(p) => m.expected_dims(Some(p as i64)),
            Field::Rational => m.expected_dims(None),
        };
        prop_assert!(ss.abutment_ok);
        prop_assert_eq!(ss.homology_total, want);
        prop_assert_eq!(ss.infinity().total_dim(), want);
        prop_assert!(ss.pages.windows(2).all(|w| w[1].total_dim() <= w[0].total_dim()));
    }

    #[test]
    fn extend_then_specialize_is_identity(m in model()) {
        prop_assert_eq!(specialize(&extend_scalars(&m.complex), EvalPoint::One).unwrap(), Specialized::Int(m.complex.clone()));
    }

    #[test]
    fn boundaries_square_to_zero(m in model()) {
        for g in m.complex.grades() {
            prop_assert!(m.complex.diff(g - 1).mul(&m.complex.diff(g)).entries().iter().all(Zero::is_zero));
        }
    }
}
