//! Randomized valid instances, rotation instances, and single-fault injection.

use super::hypotheses::{
    next, prev, verify_hypotheses, Check, IntTriangle, QuasiIsoMode,
    TriangleHypotheses,
};
use crate::chain::{
    homology, mapping_cone, ChainComplex, ComplexExt, DirectSum, GradedMap, Grading, IntComplex, IntMap,
};
use crate::error::{Error, Result};
use crate::exactlin::{smith_normal_form, IntMatrix, Matrix, Ring};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::sync::Arc;

pub const RETRY_BUDGET: usize = 50;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceParams {
    /// Rank bound per grade for the two complexes A, B of the underlying
    /// chain map; the cone then has rank at most twice this.
    pub max_rank: usize,
    /// Complexes live in grades 0..=top.
    pub top: i64,
    /// Entries of random matrices are drawn from [−bound, bound].
    pub bound: i64,
    /// When false the rotation instance is returned unchanged.
    pub perturb: bool,
}

impl Default for InstanceParams {
    fn default() -> Self {
        InstanceParams { max_rank: 2, top: 2, bound: 2, perturb: true }
    }
}

fn rand_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    let data = (0..rows * cols).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect();
    IntMatrix::from_vec(rows, cols, data).expect("sized data")
}

/// Random ℤ-graded complex in grades 0..=top; ∂_g is (ker ∂_{g−1}) · random.
pub fn random_complex(rng: &mut ChaCha8Rng, top: i64, max_rank: usize, bound: i64) -> IntComplex {
    let ranks: BTreeMap<i64, usize> = (0..=top).map(|g| (g, rng.gen_range(0..=max_rank))).collect();
    let mut diffs: BTreeMap<i64, IntMatrix> = BTreeMap::new();
    for g in 1..=top {
        let below = diffs.get(&(g - 1)).cloned().unwrap_or_else(|| IntMatrix::zeros(0, ranks[&(g - 1)]));
        let k = smith_normal_form(&below).kernel_basis();
        let d = k.mul(&rand_matrix(rng, k.cols(), ranks[&g], bound));
        diffs.insert(g, d);
    }
    ChainComplex::new(Grading::Integer, ranks, diffs).expect("kernel construction gives ∂² = 0")
}

/// Random degree-`degree` module map (not necessarily a chain map).
pub fn random_map(
    rng: &mut ChaCha8Rng,
    src: &Arc<IntComplex>,
    tgt: &Arc<IntComplex>,
    degree: i64,
    bound: i64,
) -> IntMap {
    let blocks = src
        .grades()
        .into_iter()
        .map(|g| (g, rand_matrix(rng, tgt.rank(g + degree), src.rank(g), bound)))
        .collect();
    GradedMap::new(src.clone(), tgt.clone(), degree, blocks).expect("sized blocks")
}

/// Random degree 0 chain map: a small combination of a ℤ-basis of the
/// solutions of ∂X = X∂.
pub fn random_chain_map(
    rng: &mut ChaCha8Rng,
    src: &Arc<IntComplex>,
    tgt: &Arc<IntComplex>,
    bound: i64,
) -> Result<IntMap> {
    let grades = src.grades();
    // unknowns: X_g entries (row-major) for each g
    let mut offset = BTreeMap::new();
    let mut nvar = 0;
    for &g in &grades {
        offset.insert(g, nvar);
        nvar += tgt.rank(g) * src.rank(g);
    }
    let var = |g: i64, i: usize, j: usize| offset[&g] + i * src.rank(g) + j;
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for &g in &grades {
        // (∂_T X_g − X_{g−1} ∂_S)[i][j] = 0, i over T_{g−1}, j over S_g
        let dt = tgt.diff(g);
        let ds = src.diff(g);
        for i in 0..tgt.rank(g - 1) {
            for j in 0..src.rank(g) {
                let mut row = vec![BigInt::from(0); nvar];
                for k in 0..tgt.rank(g) {
                    row[var(g, k, j)] += dt.get(i, k);
                }
                if src.rank(g - 1) > 0 && offset.contains_key(&(g - 1)) {
                    for k in 0..src.rank(g - 1) {
                        row[var(g - 1, i, k)] -= ds.get(k, j);
                    }
                }
                rows.push(row);
            }
        }
    }
    let sol = if rows.is_empty() {
        IntMatrix::identity(nvar)
    } else {
        smith_normal_form(&IntMatrix::from_rows(rows)?).kernel_basis()
    };
    let coeffs: Vec<BigInt> = (0..sol.cols()).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect();
    let x: Vec<BigInt> = (0..nvar)
        .map(|r| (0..sol.cols()).map(|c| sol.get(r, c) * &coeffs[c]).sum())
        .collect();
    let mut blocks = BTreeMap::new();
    for &g in &grades {
        let (m, n) = (tgt.rank(g), src.rank(g));
        let data = (0..m * n).map(|t| x[offset[&g] + t].clone()).collect();
        blocks.insert(g, IntMatrix::from_vec(m, n, data)?);
    }
    let f = GradedMap::new(src.clone(), tgt.clone(), 0, blocks)?;
    debug_assert!(f.is_chain_map());
    Ok(f)
}

/// Canonical rotation of the triangle A → B → C(u) → A[1] of a chain map u:
/// f₀ = u, f₁ the inclusion, f₂ = (−1)^g·projection (degree −1),
/// H₀(a) = (0, a), H₁ = 0, H₂(b, a) = −(−1)^g b, G = 0.
pub fn rotation_instance(u: &IntMap) -> Result<IntTriangle> {
    if u.degree() != 0 || u.grading() != Grading::Integer {
        return Err(Error::Invalid("rotation needs a degree 0 map of ℤ-graded complexes".into()));
    }
    let a = u.source().clone();
    let b = u.target().clone();
    let cone = mapping_cone(u)?;
    let c2 = cone.complex.clone();
    let f0 = u.clone();
    let f1 = cone.inclusion.clone();
    let f2 = cone.projection.parity_twist()?;
    let mut sa = DirectSum::new(Grading::Integer);
    sa.push(a.clone(), 0)?;
    let h0 = sa.assemble_map(&cone.sum, a.clone(), c2.clone(), &[(1, 0, a.identity())], 1)?;
    let h1 = GradedMap::zero(b.clone(), a.clone(), 0);
    let mut sb = DirectSum::new(Grading::Integer);
    sb.push(b.clone(), 0)?;
    let h2 = cone.sum.assemble_map(&sb, c2.clone(), b.clone(), &[(0, 0, b.identity())], 0)?.parity_twist()?.neg();
    let big_g = [
        GradedMap::zero(a.clone(), a.clone(), 1),
        GradedMap::zero(b.clone(), b.clone(), 1),
        GradedMap::zero(c2.clone(), c2.clone(), 1),
    ];
    TriangleHypotheses::complete([a, b, c2], [f0, f1, f2], [h0, h1, h2], big_g)
}

/// Per-grade basis change (P, P⁻¹) for each of the three complexes.
pub type BasisChange<R> = [BTreeMap<i64, (Matrix<R>, Matrix<R>)>; 3];

fn change_of<R: Ring>(ch: &BTreeMap<i64, (Matrix<R>, Matrix<R>)>, n: usize, g: i64) -> (Matrix<R>, Matrix<R>) {
    ch.get(&g).cloned().unwrap_or_else(|| (Matrix::identity(n), Matrix::identity(n)))
}

/// Transports every datum along x ↦ P x: ∂ ↦ P∂P⁻¹ and X ↦ P_t X P_s⁻¹.
pub fn conjugate<R: Ring>(h: &TriangleHypotheses<R>, ch: &BasisChange<R>) -> Result<TriangleHypotheses<R>> {
    let gr = h.grading();
    let mut cs = Vec::new();
    for i in 0..3 {
        let c = &h.c[i];
        let mut diffs = BTreeMap::new();
        for g in c.grades() {
            let (p_lo, _) = change_of(&ch[i], c.rank(g - 1), gr.norm(g - 1));
            let (_, q_hi) = change_of(&ch[i], c.rank(g), g);
            diffs.insert(g, p_lo.mul(&c.diff(g)).mul(&q_hi));
        }
        cs.push(Arc::new(ChainComplex::new(gr, c.ranks().clone(), diffs)?));
    }
    let c: [Arc<ChainComplex<R>>; 3] = cs.try_into().expect("three complexes");
    let tr = |m: &GradedMap<R>, s: usize, t: usize| -> Result<GradedMap<R>> {
        let mut blocks = BTreeMap::new();
        for g in h.c[s].grades() {
            let tg = gr.norm(g + m.degree());
            let (pt, _) = change_of(&ch[t], h.c[t].rank(tg), tg);
            let (_, ps_inv) = change_of(&ch[s], h.c[s].rank(g), g);
            blocks.insert(g, pt.mul(&m.block(g)).mul(&ps_inv));
        }
        GradedMap::new(c[s].clone(), c[t].clone(), m.degree(), blocks)
    };
    let mut f = Vec::new();
    let mut g = Vec::new();
    let mut hh = Vec::new();
    let mut bf = Vec::new();
    let mut bg = Vec::new();
    for i in 0..3 {
        f.push(tr(&h.f[i], i, next(i))?);
        g.push(tr(&h.g[i], i, prev(i))?);
        hh.push(tr(&h.h[i], i, prev(i))?);
        bf.push(tr(&h.big_f[i], i, i)?);
        bg.push(tr(&h.big_g[i], i, i)?);
    }
    let arr = |v: Vec<GradedMap<R>>| -> [GradedMap<R>; 3] { v.try_into().expect("three maps") };
    TriangleHypotheses::new(c, arr(f), arr(g), arr(hh), arr(bf), arr(bg))
}

/// Random unimodular matrix with its inverse, as a product of elementary moves.
pub fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> (IntMatrix, IntMatrix) {
    let mut p = IntMatrix::identity(n);
    let mut q = IntMatrix::identity(n);
    if n == 0 {
        return (p, q);
    }
    for _ in 0..2 * n {
        let k = rng.gen_range(0..n);
        let l = rng.gen_range(0..n);
        if k == l {
            if rng.gen_bool(0.5) {
                // negate row k of P and column k of P⁻¹
                for j in 0..n {
                    p.set(k, j, -p.get(k, j));
                    q.set(j, k, -q.get(j, k));
                }
            }
            continue;
        }
        let c = BigInt::from(rng.gen_range(-1i64..=1));
        // P ← (I + c e_l e_kᵀ) P, P⁻¹ ← P⁻¹ (I − c e_l e_kᵀ)
        for j in 0..n {
            let v = p.get(l, j) + &c * p.get(k, j);
            p.set(l, j, v);
        }
        for i in 0..n {
            let v = q.get(i, k) - &c * q.get(i, l);
            q.set(i, k, v);
        }
    }
    (p, q)
}

fn random_basis_change(rng: &mut ChaCha8Rng, h: &IntTriangle) -> BasisChange<BigInt> {
    std::array::from_fn(|i| {
        h.c[i].grades().into_iter().map(|g| (g, random_unimodular(rng, h.c[i].rank(g)))).collect()
    })
}

fn perturbed(rng: &mut ChaCha8Rng, rot: &IntTriangle, bound: i64) -> Result<IntTriangle> {
    let c = rot.c.clone();
    let small = bound.min(1);
    // f₀ moves within its homotopy class; g₀ and g₂ become nonzero
    let k0 = random_map(rng, &c[0], &c[1], rot.f[0].degree() + 1, small);
    let f0 = rot.f[0].add(&k0.boundary_residual(1))?;
    let mut h = rot.h.clone();
    for (i, hi) in h.iter_mut().enumerate() {
        // ∂Q − Q∂ anti-commutes with ∂, so ∂H + H∂ is unchanged
        let q = random_map(rng, &c[i], &c[prev(i)], hi.degree() + 1, small);
        *hi = hi.add(&q.boundary_residual(-1))?;
    }
    let big_g: [IntMap; 3] = std::array::from_fn(|i| random_map(rng, &c[i], &c[i], rot.big_g[i].degree(), small));
    let t = TriangleHypotheses::complete(c, [f0, rot.f[1].clone(), rot.f[2].clone()], h, big_g)?;
    let ch = random_basis_change(rng, &t);
    conjugate(&t, &ch)
}

/// Instance satisfying every hypothesis: a rotation instance, homotopy
/// perturbations of f₀ and of the H_i, random G_i, and unimodular basis
/// changes, re-verified with the cone criterion.
pub fn generate_valid_instance(seed: u64, params: &InstanceParams) -> Result<IntTriangle> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RETRY_BUDGET {
        let a = Arc::new(random_complex(&mut rng, params.top, params.max_rank, params.bound));
        let b = Arc::new(random_complex(&mut rng, params.top, params.max_rank, params.bound));
        let u = random_chain_map(&mut rng, &a, &b, params.bound)?;
        let rot = rotation_instance(&u)?;
        let t = if params.perturb { perturbed(&mut rng, &rot, params.bound)? } else { rot };
        if verify_hypotheses(&t, QuasiIsoMode::Cone).passed() {
            return Ok(t);
        }
    }
    Err(Error::RetryExhausted(RETRY_BUDGET))
}

/// A single broken hypothesis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Fault {
    /// f_i += E with ∂E ≠ E∂.
    ChainMap(usize),
    /// g_i += E.
    Homotopy(usize),
    /// F_i += ∂X − X∂ (still a quasi-isomorphism).
    GEquation(usize),
    /// F_i := 0 on a complex with nonzero homology.
    QuasiIso(usize),
}

impl Fault {
    pub fn catalog() -> Vec<Fault> {
        let mut v = Vec::new();
        for i in 0..3 {
            v.extend([Fault::ChainMap(i), Fault::Homotopy(i), Fault::GEquation(i), Fault::QuasiIso(i)]);
        }
        v
    }

    /// The check that must report the fault.
    pub fn designated(&self) -> Check {
        match self {
            Fault::ChainMap(i) => Check::ChainMap(*i),
            Fault::Homotopy(i) => Check::Homotopy(*i),
            Fault::GEquation(i) => Check::GEquation(*i),
            Fault::QuasiIso(i) => Check::QuasiIso(*i),
        }
    }

    /// Exact set of failing checks, where the fault touches data that enter
    /// only those hypotheses. A perturbed f_i enters several equations, so
    /// only its designated check is pinned.
    pub fn expected_failures(&self) -> Option<Vec<Check>> {
        match self {
            Fault::ChainMap(_) => None,
            Fault::Homotopy(1) => Some(vec![Check::Homotopy(1), Check::G1Zero]),
            Fault::Homotopy(i) => Some(vec![Check::Homotopy(*i)]),
            Fault::GEquation(i) => Some(vec![Check::GEquation(*i)]),
            Fault::QuasiIso(i) => Some(vec![Check::GEquation(*i), Check::QuasiIso(*i)]),
        }
    }
}

fn nonzero_draw(rng: &mut ChaCha8Rng, mut draw: impl FnMut(&mut ChaCha8Rng) -> IntMap) -> Result<IntMap> {
    for _ in 0..RETRY_BUDGET {
        let m = draw(rng);
        if !m.is_zero() {
            return Ok(m);
        }
    }
    Err(Error::RetryExhausted(RETRY_BUDGET))
}

/// Applies one fault. Fails with `Invalid` when the instance cannot carry it
/// (e.g. every map out of an empty complex is zero).
pub fn inject_fault(h: &IntTriangle, fault: Fault, seed: u64) -> Result<IntTriangle> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = h.clone();
    let c = h.c.clone();
    let unusable = |what: &str| Error::Invalid(format!("instance cannot carry this fault: {what}"));
    match fault {
        Fault::ChainMap(i) => {
            let mut pert = None;
            for _ in 0..RETRY_BUDGET {
                let e = random_map(&mut rng, &c[i], &c[next(i)], h.f[i].degree(), 1);
                if !e.is_chain_map() {
                    pert = Some(e);
                    break;
                }
            }
            let e = pert.ok_or_else(|| unusable("every small map is a chain map"))?;
            t.f[i] = h.f[i].add(&e)?;
        }
        Fault::Homotopy(i) => {
            let e = nonzero_draw(&mut rng, |r| random_map(r, &c[i], &c[prev(i)], h.g[i].degree(), 1))
                .map_err(|_| unusable("g has no room"))?;
            t.g[i] = h.g[i].add(&e)?;
        }
        Fault::GEquation(i) => {
            let e = nonzero_draw(&mut rng, |r| random_map(r, &c[i], &c[i], 1, 1).boundary_residual(-1))
                .map_err(|_| unusable("∂X − X∂ vanishes"))?;
            t.big_f[i] = h.big_f[i].add(&e)?;
        }
        Fault::QuasiIso(i) => {
            if homology(&*c[i])?.is_zero() {
                return Err(unusable("complex is acyclic"));
            }
            t.big_f[i] = GradedMap::zero(c[i].clone(), c[i].clone(), h.big_f[i].degree());
        }
    }
    Ok(t)
}
