use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::sync::Arc;
use tricore::chain::{contracting_homotopy, ComplexExt, homology, homology_dims, spectral_sequence, ChainComplex, GradedMap, Grading, IntComplex};
use tricore::exactlin::Field;
use tricore::lin::*;
use tricore::Error;

fn zero_triangle() -> IntTriangle {
    let z = Arc::new(ChainComplex::zero(Grading::Integer));
    let m = |d| GradedMap::zero(z.clone(), z.clone(), d);
    TriangleHypotheses::complete(
        [z.clone(), z.clone(), z.clone()],
        [m(0), m(0), m(-1)],
        [m(1), m(0), m(0)],
        [m(1), m(1), m(1)],
    )
    .unwrap()
}

fn rp2() -> Arc<IntComplex> {
    Arc::new(
        IntComplex::from_i64(Grading::Integer, &[(0, 1), (1, 1), (2, 1)], &[(1, vec![vec![0]]), (2, vec![vec![2]])])
            .unwrap(),
    )
}

fn seeded_rotation(seed: u64) -> IntTriangle {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = Arc::new(random_complex(&mut rng, 2, 2, 2));
    let b = Arc::new(random_complex(&mut rng, 2, 2, 2));
    let u = random_chain_map(&mut rng, &a, &b, 2).unwrap();
    rotation_instance(&u).unwrap()
}

#[test]
fn zero_complexes_pass() {
    let h = zero_triangle();
    assert!(verify_hypotheses(&h, QuasiIsoMode::Cone).passed());
    let t = build_total(&h).unwrap();
    assert!(check_acyclic(&t.complex, None, &[]).unwrap().is_acyclic());
    let d = build_delta(&h).unwrap();
    assert!(d.map.is_zero());
    assert!(d.is_quasi_iso());
}

#[test]
fn rotation_of_rp2_identity_passes_every_check() {
    let c = rp2();
    let h = rotation_instance(&c.identity()).unwrap();
    for mode in [QuasiIsoMode::Cone, QuasiIsoMode::Certificate] {
        let rep = verify_hypotheses(&h, mode);
        assert!(rep.passed(), "{mode:?}: {:?}", rep.failed());
    }
    assert!(h.g[1].is_zero());
    let t = build_total(&h).unwrap();
    assert_eq!(check_acyclic(&t.complex, None, &[]).unwrap(), Acyclicity::Integral { acyclic: true });
}

#[test]
fn rotation_delta_is_zero_then_inclusion() {
    for seed in 0..5 {
        let h = seeded_rotation(seed);
        let d = build_delta(&h).unwrap();
        // H₁ = 0, so δ(x) = (0, f₁x) and f₁ is the inclusion into the cone
        for g in h.c[1].grades() {
            let blk = d.map.block(g);
            let tgt = g + d.map.degree();
            let (offs, _) = d.cone.sum.offsets(tgt);
            let n = h.c[1].rank(g);
            for i in 0..blk.rows() {
                for j in 0..n {
                    let owner = d.cone.sum.owners(tgt)[i];
                    let expect = if owner == 1 { h.f[1].block(g).get(i - offs[1], j).clone() } else { BigInt::from(0) };
                    assert_eq!(blk.get(i, j), &expect);
                }
            }
        }
        assert!(d.is_quasi_iso(), "seed {seed}");
    }
}

#[test]
fn g1_perturbation_fails_homotopy_and_breaks_total() {
    let (h, bad) = (0..20u64)
        .find_map(|seed| {
            let h = generate_valid_instance(seed, &InstanceParams::default()).unwrap();
            inject_fault(&h, Fault::Homotopy(1), seed).ok().map(|b| (h, b))
        })
        .expect("an instance with room for g₁");
    let rep = verify_hypotheses(&bad, QuasiIsoMode::Cone);
    assert_eq!(rep.failed(), vec![Check::Homotopy(1), Check::G1Zero]);
    assert!(!rep.outcome(Check::Homotopy(1)).unwrap().residual.is_empty());
    // the datum with g₁ ≠ 0 built honestly: H₁ perturbed, g₁ recomputed
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut hh = h.h.clone();
    let mut t = None;
    for _ in 0..RETRY_BUDGET {
        let e = random_map(&mut rng, &h.c[1], &h.c[0], h.h[1].degree(), 1);
        hh[1] = h.h[1].add(&e).unwrap();
        let cand = TriangleHypotheses::complete(h.c.clone(), h.f.clone(), hh.clone(), h.big_g.clone()).unwrap();
        if !cand.g[1].is_zero() {
            t = Some(cand);
            break;
        }
    }
    let t = t.expect("a perturbation with g₁ ≠ 0");
    assert!(!build_total_unchecked(&t).unwrap().complex.verify_complex());
    assert!(matches!(build_total(&t), Err(Error::Unverified(_))));
}

#[test]
fn hundred_seeded_instances() {
    for seed in 0..100u64 {
        let params = InstanceParams { perturb: seed % 5 != 1, ..Default::default() };
        let h = generate_valid_instance(seed, &params).unwrap();
        for c in &h.c {
            assert!(c.ranks().values().all(|r| *r <= 4));
        }
        let rep = verify_hypotheses(&h, QuasiIsoMode::Cone);
        assert!(rep.passed(), "seed {seed}: {:?}", rep.failed());
        let t = build_total(&h).unwrap();
        assert!(check_acyclic(&t.complex, None, &[]).unwrap().is_acyclic(), "seed {seed}");
        assert!(build_delta(&h).unwrap().is_quasi_iso(), "seed {seed}");
        let datum = build_phi_cone(&h).unwrap();
        assert!(datum.phi_is_commutator(), "seed {seed}");
        assert!(datum.phi.is_anti_chain_map());
        assert!(phi_kills_homology(&datum));
        for p in [2, 3] {
            let tr = run_six_step_ss(&datum, p).unwrap();
            assert!(tr.e1_no_cross && tr.e2_g_vanish && tr.e3_vertical_iso, "seed {seed} p {p}");
            tr.into_result().unwrap();
        }
    }
}

#[test]
fn unperturbed_generator_gives_rotation() {
    let params = InstanceParams { perturb: false, ..Default::default() };
    let h = generate_valid_instance(1, &params).unwrap();
    assert!(h.h[1].is_zero());
    assert!(h.big_g.iter().all(|g| g.is_zero()));
    assert_eq!(h.c[2].total_rank(), h.c[0].total_rank() + h.c[1].total_rank());
}

#[test]
fn single_faults_are_detected() {
    let mut injected = 0;
    for seed in 0..4u64 {
        let h = generate_valid_instance(100 + seed, &InstanceParams::default()).unwrap();
        for fault in Fault::catalog() {
            let bad = match inject_fault(&h, fault, seed) {
                Ok(b) => b,
                Err(Error::Invalid(_)) => continue,
                Err(e) => panic!("{e}"),
            };
            injected += 1;
            let failed = verify_hypotheses(&bad, QuasiIsoMode::Cone).failed();
            assert!(failed.contains(&fault.designated()), "{fault:?}: {failed:?}");
            if let Some(exact) = fault.expected_failures() {
                assert_eq!(failed, exact, "{fault:?}");
            }
        }
    }
    assert!(injected >= 20, "only {injected} faults injected");
}

#[test]
fn h0_is_not_needed_once_total_is_acyclic() {
    // rotation with H₀ = 0: every equation holds, F₀ = 0 and F₂ degenerates,
    // yet the total
    // complex does not see H₀ and the sequence still dies by E⁴
    let c = rp2();
    let rot = rotation_instance(&c.identity()).unwrap();
    let mut h = rot.h.clone();
    h[0] = GradedMap::zero(rot.c[0].clone(), rot.c[2].clone(), rot.h[0].degree());
    let t = TriangleHypotheses::complete(rot.c.clone(), rot.f.clone(), h, rot.big_g.clone()).unwrap();
    let rep = verify_hypotheses(&t, QuasiIsoMode::Cone);
    assert!(rep.equations_hold());
    assert_eq!(rep.failed(), vec![Check::QuasiIso(0), Check::QuasiIso(2)]);
    let total = build_total_unchecked(&t).unwrap();
    assert!(check_acyclic(&total.complex, None, &[]).unwrap().is_acyclic());
    assert!(run_six_step_ss(&build_phi_cone(&t).unwrap(), 2).unwrap().collapsed());
}

#[test]
fn non_quasi_iso_f0_shows_up_on_e4() {
    // C₀ = ℝP² cells, C₁ = C₂ = 0, all maps zero: only F₀ = 0 is wrong
    let c0 = rp2();
    let z = Arc::new(ChainComplex::zero(Grading::Integer));
    let cs = [c0.clone(), z.clone(), z.clone()];
    let m = |i: usize, j: usize, d: i64| GradedMap::zero(cs[i].clone(), cs[j].clone(), d);
    let t = TriangleHypotheses::complete(
        cs.clone(),
        [m(0, 1, 0), m(1, 2, 0), m(2, 0, -1)],
        [m(0, 2, 1), m(1, 0, 0), m(2, 1, 0)],
        [m(0, 0, 1), m(1, 1, 1), m(2, 2, 1)],
    )
    .unwrap();
    let rep = verify_hypotheses(&t, QuasiIsoMode::Cone);
    assert!(rep.equations_hold());
    assert_eq!(rep.failed(), vec![Check::QuasiIso(0)]);
    let total = build_total_unchecked(&t).unwrap();
    assert!(!check_acyclic(&total.complex, None, &[]).unwrap().is_acyclic());
    for p in [2, 3] {
        let tr = run_six_step_ss(&build_phi_cone(&t).unwrap(), p).unwrap();
        assert!(!tr.e4_zero, "p = {p}");
        assert!(matches!(tr.into_result(), Err(Error::NonCollapse(_))));
    }
}

#[test]
fn laurent_total_needs_certificate_or_is_flagged() {
    let h = generate_valid_instance(3, &InstanceParams::default()).unwrap();
    let lh = h.to_laurent().unwrap();
    assert!(verify_hypotheses(&lh, QuasiIsoMode::Skip).passed());
    let zt = build_total(&h).unwrap();
    let lt = build_total(&lh).unwrap();
    let flagged = check_acyclic(&lt.complex, None, &[2, 3]).unwrap();
    assert!(flagged.flagged() && flagged.is_acyclic());
    let k = contracting_homotopy(&zt.complex).unwrap().expect("acyclic over ℤ");
    let lk = k.to_laurent(lt.complex.clone(), lt.complex.clone());
    assert_eq!(check_acyclic(&lt.complex, Some(&lk), &[]).unwrap(), Acyclicity::Certified { acyclic: true });
}

#[test]
fn certificate_mode_on_rotation() {
    let h = seeded_rotation(4);
    let rep = verify_hypotheses(&h, QuasiIsoMode::Certificate);
    assert!(rep.passed(), "{:?}", rep.failed());
    let lh = h.to_laurent().unwrap();
    assert!(verify_hypotheses(&lh, QuasiIsoMode::Certificate).passed());
}

#[test]
fn phi_trace_on_rotation_over_f2() {
    let h = seeded_rotation(9);
    let datum = build_phi_cone(&h).unwrap();
    assert!(datum.cone.complex.verify_complex());
    let tr = run_six_step_ss(&datum, 2).unwrap();
    assert!(tr.collapsed());
    assert!(tr.ss.abutment_ok);
}

fn check_iterated(data: &[IntTriangle]) {
    let it = iterated_cone_filtration(data).unwrap();
    assert_eq!(it.corners.len(), 1 << data.len());
    for p in [2, 3] {
        let field = Field::prime(p).unwrap();
        let ss = spectral_sequence(&it.filtration, field).unwrap();
        assert!(ss.abutment_ok);
        let e1 = ss.page(1).unwrap();
        let by_level: BTreeMap<i64, usize> =
            (0..=data.len() as i64).map(|s| (s, e1.level_dim(s))).filter(|(_, d)| *d > 0).collect();
        assert_eq!(by_level, it.corner_dims_by_level(field));
        let total: usize = homology_dims(&it.filtration.complex, field).values().sum();
        assert_eq!(ss.infinity().total_dim(), total);
    }
}

#[test]
fn iterated_cone_one_and_two_steps() {
    let a = generate_valid_instance(21, &InstanceParams::default()).unwrap();
    let b = generate_valid_instance(22, &InstanceParams::default()).unwrap();
    check_iterated(std::slice::from_ref(&a));
    check_iterated(&[a.clone(), b.clone()]);
    check_iterated(&[seeded_rotation(5), seeded_rotation(6)]);
    assert!(matches!(iterated_cone_filtration(&[]), Err(Error::Invalid(_))));
}

#[test]
fn iterated_cone_rejects_mixed_gradings() {
    let a = zero_triangle();
    let z4 = Arc::new(ChainComplex::zero(Grading::Cyclic(4)));
    let m = |d| GradedMap::zero(z4.clone(), z4.clone(), d);
    let b = TriangleHypotheses::complete(
        [z4.clone(), z4.clone(), z4.clone()],
        [m(0), m(0), m(-1)],
        [m(1), m(0), m(0)],
        [m(1), m(1), m(1)],
    )
    .unwrap();
    assert!(matches!(iterated_cone_filtration(&[a, b]), Err(Error::Grading(_))));
}

#[test]
fn fault_on_acyclic_complex_is_refused() {
    let h = zero_triangle();
    assert!(matches!(inject_fault(&h, Fault::QuasiIso(0), 0), Err(Error::Invalid(_))));
    assert!(homology(&*h.c[0]).unwrap().is_zero());
}
