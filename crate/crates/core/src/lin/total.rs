use super::hypotheses::{verify_hypotheses, QuasiIsoMode, TriangleHypotheses};
use crate::chain::{
    anti_cone, is_contracting_homotopy, mapping_cone, specialize, ChainComplex, ComplexExt, Cone,
    DirectSum, GradedMap, IntComplex, LaurentComplex, Specialized,
};
use crate::error::{Error, Result};
use crate::exactlin::{EvalPoint, Ring};
use num_bigint::BigInt;
use serde::Serialize;
use std::any::Any;
use std::sync::Arc;

/// C = C₀ ⊕ C₂ ⊕ C₁ with differential
/// [[∂₀, f₂, −H₁], [0, −∂₂, f₁], [0, 0, ∂₁]].
///
/// Summand k of `sum` is C₀, C₂, C₁ for k = 0, 1, 2.
#[derive(Clone, Debug)]
pub struct TotalComplex<R: Ring> {
    pub complex: Arc<ChainComplex<R>>,
    pub sum: DirectSum<R>,
}

/// Grading shifts of C₀, C₂, C₁ inside the total complex.
pub fn total_shifts<R: Ring>(h: &TriangleHypotheses<R>) -> Result<[i64; 3]> {
    let [a0, a1, a2] = h.degrees();
    if !h.grading().same_degree(a0 + a1 + a2, -1) {
        return Err(Error::Degree(a0 + a1 + a2));
    }
    Ok([0, 1 + a2, 2 + a1 + a2])
}

fn total_sum<R: Ring>(h: &TriangleHypotheses<R>) -> Result<DirectSum<R>> {
    let s = total_shifts(h)?;
    let mut sum = DirectSum::new(h.grading());
    sum.push(h.c[0].clone(), s[0])?;
    sum.push(h.c[2].clone(), s[1])?;
    sum.push(h.c[1].clone(), s[2])?;
    Ok(sum)
}

/// Assembles the total differential without checking ∂² = 0.
pub fn build_total_unchecked<R: Ring>(h: &TriangleHypotheses<R>) -> Result<TotalComplex<R>> {
    let sum = total_sum(h)?;
    let entries = [
        (0, 0, h.c[0].differential()),
        (0, 1, h.f[2].clone()),
        (0, 2, h.h[1].neg()),
        (1, 1, h.c[2].differential().neg()),
        (1, 2, h.f[1].clone()),
        (2, 2, h.c[1].differential()),
    ];
    let complex = Arc::new(sum.assemble_complex_unchecked(&entries)?);
    Ok(TotalComplex { complex, sum })
}

/// Total complex of data whose equations all hold.
pub fn build_total<R: Ring>(h: &TriangleHypotheses<R>) -> Result<TotalComplex<R>> {
    let report = verify_hypotheses(h, QuasiIsoMode::Skip);
    if !report.passed() {
        let failed: Vec<String> = report.failed().iter().map(|c| c.to_string()).collect();
        return Err(Error::Unverified(failed.join(", ")));
    }
    let t = build_total_unchecked(h)?;
    if !t.complex.verify_complex() {
        return Err(Error::NotComplex("total differential does not square to zero".into()));
    }
    Ok(t)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Acyclicity {
    /// Integral homology computed by Smith normal form.
    Integral { acyclic: bool },
    /// A contracting homotopy was checked exactly.
    Certified { acyclic: bool },
    /// Laurent complex without a certificate: only specializations checked.
    Specialized { at_one: bool, mod_p: Vec<(u64, u64, bool)> },
}

impl Acyclicity {
    pub fn is_acyclic(&self) -> bool {
        match self {
            Acyclicity::Integral { acyclic } | Acyclicity::Certified { acyclic } => *acyclic,
            Acyclicity::Specialized { at_one, mod_p } => *at_one && mod_p.iter().all(|x| x.2),
        }
    }

    /// True when acyclicity is only known after specialization.
    pub fn flagged(&self) -> bool {
        matches!(self, Acyclicity::Specialized { .. })
    }
}

fn laurent_specialized(c: &LaurentComplex, primes: &[u64]) -> Result<Acyclicity> {
    let at_one = match specialize(c, EvalPoint::One)? {
        Specialized::Int(z) => super::hypotheses::int_complex_is_acyclic(&z),
        Specialized::ModP(_) => unreachable!("evaluation at one"),
    };
    let mut mod_p = Vec::new();
    for &p in primes {
        for unit in 1..p {
            let ok = match specialize(c, EvalPoint::ModP { p, unit })? {
                Specialized::ModP(f) => f.homology_dims().values().all(|d| *d == 0),
                Specialized::Int(_) => unreachable!("mod-p evaluation"),
            };
            mod_p.push((p, unit, ok));
        }
    }
    Ok(Acyclicity::Specialized { at_one, mod_p })
}

/// Acyclicity of a complex over ℤ (homology) or ℤ[T, T⁻¹] (certificate, or
/// flagged specializations at T = 1 and at every unit of F_p for `primes`).
pub fn check_acyclic<R: Ring>(
    complex: &Arc<ChainComplex<R>>,
    certificate: Option<&GradedMap<R>>,
    primes: &[u64],
) -> Result<Acyclicity> {
    if let Some(k) = certificate {
        if !Arc::ptr_eq(k.source(), complex) && **k.source() != **complex {
            return Err(Error::Shape("certificate is for a different complex".into()));
        }
        return Ok(Acyclicity::Certified { acyclic: is_contracting_homotopy(k) });
    }
    let any = &**complex as &dyn Any;
    if let Some(z) = any.downcast_ref::<IntComplex>() {
        return Ok(Acyclicity::Integral { acyclic: super::hypotheses::int_complex_is_acyclic(z) });
    }
    if let Some(l) = any.downcast_ref::<LaurentComplex>() {
        return laurent_specialized(l, primes);
    }
    Err(Error::UnsupportedRing("unknown coefficient ring".into()))
}

/// δ : C₁ → C(f₂), x ↦ (−H₁x, f₁x), together with the cone of f₂.
#[derive(Clone, Debug)]
pub struct Delta<R: Ring> {
    pub map: GradedMap<R>,
    pub cone: Cone<R>,
}

impl<R: Ring> Delta<R> {
    /// Under the printed sign placement δ anti-commutes with the differentials.
    pub fn is_anti_chain_map(&self) -> bool {
        self.map.is_anti_chain_map()
    }
}

pub fn build_delta<R: Ring>(h: &TriangleHypotheses<R>) -> Result<Delta<R>> {
    let cone = mapping_cone(&h.f[2])?;
    let mut src = DirectSum::new(h.grading());
    src.push(h.c[1].clone(), 0)?;
    let degree = h.h[1].degree();
    let map = src.assemble_map(
        &cone.sum,
        h.c[1].clone(),
        cone.complex.clone(),
        &[(0, 0, h.h[1].neg()), (1, 0, h.f[1].clone())],
        degree,
    )?;
    Ok(Delta { map, cone })
}

impl Delta<BigInt> {
    /// δ is a quasi-isomorphism: its (anti-)cone is acyclic over ℤ.
    pub fn is_quasi_iso(&self) -> bool {
        self.is_anti_chain_map()
            && anti_cone(&self.map)
                .map(|c| super::hypotheses::int_complex_is_acyclic(&c.complex))
                .unwrap_or(false)
    }
}
