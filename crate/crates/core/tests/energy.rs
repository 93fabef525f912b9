use proptest::prelude::*;
use tricore::energy::*;
use tricore::exactlin::{invert_id_plus_nilpotent, is_nilpotent_upper, IntMatrix, LaurentMatrix, LaurentPoly};

fn lp(terms: &[(i64, i64)]) -> LaurentPoly {
    LaurentPoly::from_terms(terms.iter().map(|(e, c)| (*e, (*c).into())))
}

fn int(rows: &[Vec<i64>]) -> LaurentMatrix {
    IntMatrix::from_i64(rows).to_laurent()
}

#[test]
fn diagonal_matrix() {
    let b = OrderedBasis::indexed(vec![0, 1, 1]).unwrap();
    let d = int(&[vec![2, 0, 0], vec![0, 3, 0], vec![0, 0, 5]]);
    assert!(check_energy_ordered(&d, &b, false).unwrap().ok);
    let s = check_energy_ordered(&d, &b, true).unwrap();
    assert!(!s.ok);
    assert_eq!(s.violation.unwrap().reason, "nonzero diagonal");
}

#[test]
fn below_order_entry_is_reported() {
    let b = OrderedBasis::new(vec!["a".into(), "b".into(), "c".into()], vec![2, 2, 2], vec![2, 0, 1]).unwrap();
    // order c < a < b, so (0, 1) is fine and (0, 2) is below
    let mut m = LaurentMatrix::zeros(3, 3);
    m.set(0, 1, lp(&[(1, 1)]));
    assert!(check_energy_ordered(&m, &b, true).unwrap().ok);
    m.set(0, 2, lp(&[(0, 4)]));
    let c = check_energy_ordered(&m, &b, true).unwrap();
    let v = c.violation.unwrap();
    assert_eq!((v.row, v.col, v.row_label.as_str(), v.col_label.as_str()), (0, 2, "a", "c"));
    assert_eq!(v.reason, "below the order");
}

#[test]
fn mixed_grading_is_reported() {
    let b = OrderedBasis::indexed(vec![0, 1]).unwrap();
    let m = int(&[vec![0, 1], vec![0, 0]]);
    assert!(check_energy_ordered(&m, &b, true).unwrap().violation.unwrap().reason.contains("mixes"));
    assert!(check_energy_ordered(&int(&[vec![0]]), &b, true).is_err());
    assert!(OrderedBasis::indexed(vec![4]).is_err());
}

fn zero_datum(n: usize) -> PiAlgebraDatum {
    let z = LaurentMatrix::zeros(n, n);
    PiAlgebraDatum {
        basis: OrderedBasis::indexed(vec![0; n]).unwrap(),
        d: z.clone(),
        pi_plus: LaurentMatrix::identity(n),
        pi_minus: z.clone(),
        n_plus: z.clone(),
        n_minus: z.clone(),
        k_plus: z.clone(),
        k_minus: z.clone(),
        k_sum: z,
    }
}

#[test]
fn identity_datum() {
    let d = zero_datum(3);
    let c = pi_combination_certificate(&d).unwrap();
    assert!(c.n.is_zero());
    assert_eq!(c.inverse, LaurentMatrix::identity(3));
    assert_eq!(c.exponent, 1);
    c.replay(&d).unwrap();
}

#[test]
fn two_by_two_datum() {
    let mut d = zero_datum(2);
    d.pi_plus = int(&[vec![0, 1], vec![0, 0]]);
    d.pi_minus = int(&[vec![1, -1], vec![0, 1]]);
    d.n_plus = int(&[vec![0, 1], vec![0, 0]]);
    d.n_minus = int(&[vec![0, 1], vec![0, 0]]);
    let c = pi_combination_certificate(&d).unwrap();
    // N = N₊(T + T⁻¹ − 1) − N₋ = [[0, T + T⁻¹ − 2], [0, 0]]
    let mut n = LaurentMatrix::zeros(2, 2);
    n.set(0, 1, lp(&[(1, 1), (-1, 1), (0, -2)]));
    assert_eq!(c.n, n);
    assert_eq!(c.exponent, 2);
    assert_eq!(c.inverse, LaurentMatrix::identity(2).sub(&n));
    let p = d.pi_plus.add(&d.pi_minus.scale(&LaurentPoly::t_pow(-1)));
    let q = d.pi_plus.add(&d.pi_minus.scale(&LaurentPoly::t_pow(1)));
    assert_eq!(p.mul(&q), LaurentMatrix::identity(2).add(&n));
}

#[test]
fn broken_sum_relation_reports_residual() {
    let mut d = zero_datum(2);
    d.pi_minus = LaurentMatrix::identity(2);
    d.n_minus = LaurentMatrix::zeros(2, 2);
    match pi_combination_certificate(&d) {
        Err(tricore::Error::RelationFailed { name, detail }) => {
            assert_eq!(name, "pi_plus + pi_minus ~ id");
            assert!(detail.contains("residual"));
        }
        other => panic!("expected a relation failure, got {other:?}"),
    }
}

#[test]
fn non_upper_n_is_rejected() {
    let mut d = zero_datum(2);
    d.pi_plus = int(&[vec![0, 0], vec![1, 0]]);
    d.pi_minus = int(&[vec![1, 0], vec![-1, 1]]);
    d.n_plus = int(&[vec![0, 0], vec![1, 0]]);
    d.n_minus = int(&[vec![0, 0], vec![1, 0]]);
    assert!(matches!(pi_combination_certificate(&d), Err(tricore::Error::InvalidOrder(_))));
}

#[test]
fn generated_data_are_nontrivial() {
    let mut nonzero_n = 0;
    let mut nonzero_k = 0;
    for seed in 0..20 {
        let d = generate_pi_datum(seed, 4, 2).unwrap();
        let c = pi_combination_certificate(&d).unwrap();
        nonzero_n += usize::from(!c.n.is_zero());
        nonzero_k += usize::from(!d.k_sum.is_zero());
    }
    assert!(nonzero_n >= 10);
    assert!(nonzero_k >= 10);
}

fn pow(m: &LaurentMatrix, k: usize) -> LaurentMatrix {
    let mut p = LaurentMatrix::identity(m.rows());
    for _ in 0..k {
        p = p.mul(m);
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn certificate_on_seeded_data(seed in any::<u64>(), v in 1usize..5, e in 0usize..3) {
        let d = generate_pi_datum(seed, v, e).unwrap();
        let c = pi_combination_certificate(&d).unwrap();
        let id = LaurentMatrix::identity(d.basis.len());
        prop_assert_eq!(id.add(&c.n).mul(&c.inverse), id.clone());
        prop_assert!(pow(&c.n, c.exponent).is_zero());
        c.replay(&d).unwrap();
        // T = 1 commutes with the certificate
        let (n1, inv1) = c.at_one();
        prop_assert_eq!(n1.clone(), d.n_plus.eval_one().sub(&d.n_minus.eval_one()));
        prop_assert_eq!(inv1, invert_id_plus_nilpotent(&n1).unwrap());
    }

    #[test]
    fn strictly_upper_is_nilpotent(seed in any::<u64>(), v in 1usize..6) {
        let d = generate_pi_datum(seed, v, 0).unwrap();
        let n = d.n();
        prop_assert!(check_energy_ordered(&n, &d.basis, true).unwrap().ok);
        let w = is_nilpotent_upper(&n, &d.basis.block_order()).unwrap();
        prop_assert!(w.upper);
        let k = w.exponent.unwrap();
        prop_assert!(k <= d.basis.block_order().max_class_size());
        prop_assert!(pow(&n, k).is_zero());
        if k > 0 {
            prop_assert!(!pow(&n, k - 1).is_zero());
        }
    }
}
