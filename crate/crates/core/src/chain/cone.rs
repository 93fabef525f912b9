use super::complex::{ChainComplex, ComplexExt, DirectSum, GradedMap, Grading, IntComplex, IntMap};
use crate::error::{Error, Result};
use crate::exactlin::{smith_normal_form, IntMatrix, Ring};
use num_bigint::BigInt;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Cone T ⊕ S[1+d] of a map f: S → T of degree d, with its canonical maps.
#[derive(Clone, Debug)]
pub struct Cone<R: Ring> {
    pub complex: Arc<ChainComplex<R>>,
    pub sum: DirectSum<R>,
    /// T → cone, degree 0.
    pub inclusion: GradedMap<R>,
    /// cone → S, degree −(1+d).
    pub projection: GradedMap<R>,
}

fn build<R: Ring>(f: &GradedMap<R>, sign_source: bool) -> Result<Cone<R>> {
    let s = f.source().clone();
    let t = f.target().clone();
    let mut sum = DirectSum::new(s.grading());
    sum.push(t.clone(), 0)?;
    sum.push(s.clone(), 1 + f.degree())?;
    let ds = s.differential();
    let ds = if sign_source { ds.neg() } else { ds };
    let complex = sum.assemble_complex(&[(0, 0, t.differential()), (0, 1, f.clone()), (1, 1, ds)])?;
    let complex = Arc::new(complex);

    let mut tsum = DirectSum::new(s.grading());
    tsum.push(t.clone(), 0)?;
    let inclusion = tsum.assemble_map(&sum, t.clone(), complex.clone(), &[(0, 0, t.identity())], 0)?;
    let mut ssum = DirectSum::new(s.grading());
    ssum.push(s.clone(), 0)?;
    let projection = sum.assemble_map(
        &ssum,
        complex.clone(),
        s.clone(),
        &[(0, 1, s.identity())],
        -(1 + f.degree()),
    )?;
    Ok(Cone { complex, sum, inclusion, projection })
}

/// Cone with differential [[∂_T, f], [0, −∂_S]].
pub fn mapping_cone<R: Ring>(f: &GradedMap<R>) -> Result<Cone<R>> {
    if !f.is_chain_map() {
        return Err(Error::Invalid("mapping cone needs a chain map".into()));
    }
    build(f, true)
}

/// Cone of an anti-chain map φ (∂φ + φ∂ = 0): differential [[∂_T, φ], [0, ∂_S]].
pub fn anti_cone<R: Ring>(phi: &GradedMap<R>) -> Result<Cone<R>> {
    if !phi.is_anti_chain_map() {
        return Err(Error::Invalid("anti-cone needs an anti-chain map".into()));
    }
    build(phi, false)
}

/// Pair of maps a, b with a candidate homotopy h of degree deg(a) + 1.
#[derive(Clone, Debug)]
pub struct Homotopy<R: Ring> {
    pub a: GradedMap<R>,
    pub b: GradedMap<R>,
    pub h: GradedMap<R>,
}

#[derive(Clone, Debug)]
pub struct HomotopyCheck<R: Ring> {
    pub holds: bool,
    /// ∂h + ε h∂ − (a − b)
    pub residual: GradedMap<R>,
}

impl<R: Ring> Homotopy<R> {
    pub fn new(a: GradedMap<R>, b: GradedMap<R>, h: GradedMap<R>) -> Self {
        Homotopy { a, b, h }
    }

    /// Checks ∂h + ε·h∂ = a − b exactly.
    pub fn verify(&self, eps: i64) -> Result<HomotopyCheck<R>> {
        if !self.h.grading().same_degree(self.h.degree(), self.a.degree() + 1) {
            return Err(Error::Degree(self.h.degree()));
        }
        let lhs = self.h.boundary_residual(eps);
        let rhs = self.a.sub(&self.b)?;
        let residual = lhs.sub(&rhs)?;
        Ok(HomotopyCheck { holds: residual.is_zero(), residual })
    }
}

pub fn verify_homotopy<R: Ring>(h: &Homotopy<R>, eps: i64) -> Result<HomotopyCheck<R>> {
    h.verify(eps)
}

/// ∂K + K∂ = Id certifies acyclicity over any ring.
pub fn is_contracting_homotopy<R: Ring>(k: &GradedMap<R>) -> bool {
    let c = k.source().clone();
    let zero = GradedMap::zero(c.clone(), c.clone(), 0);
    Homotopy::new(c.identity(), zero, k.clone()).verify(1).map(|r| r.holds).unwrap_or(false)
}

/// Contraction K of a bounded acyclic ℤ-graded complex over ℤ, built grade
/// by grade from ∂K_g = Id − K_{g−1}∂. `None` when the complex is not acyclic.
pub fn contracting_homotopy(c: &Arc<IntComplex>) -> Result<Option<IntMap>> {
    if c.grading() != Grading::Integer {
        return Err(Error::Grading("contraction is built for ℤ-graded complexes".into()));
    }
    let grades = c.grades();
    let (Some(&lo), Some(&hi)) = (grades.first(), grades.last()) else {
        return Ok(Some(GradedMap::zero(c.clone(), c.clone(), 1)));
    };
    let mut blocks: BTreeMap<i64, IntMatrix> = BTreeMap::new();
    let mut prev = IntMatrix::zeros(c.rank(lo), c.rank(lo - 1));
    for g in lo..=hi {
        let n = c.rank(g);
        let rhs = IntMatrix::identity(n).sub(&prev.mul(&c.diff(g)));
        let up = c.diff(g + 1);
        let snf = smith_normal_form(&up);
        let mut k = IntMatrix::zeros(c.rank(g + 1), n);
        for col in 0..n {
            let b: Vec<BigInt> = (0..n).map(|r| rhs.get(r, col).clone()).collect();
            let Some(x) = snf.solve(&b) else { return Ok(None) };
            for (r, v) in x.into_iter().enumerate() {
                k.set(r, col, v);
            }
        }
        blocks.insert(g, k.clone());
        prev = k;
    }
    Ok(Some(GradedMap::new(c.clone(), c.clone(), 1, blocks)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abgroup::FgAbelianGroup;
    use crate::chain::homology::homology;

    fn z0() -> Arc<IntComplex> {
        Arc::new(IntComplex::from_i64(Grading::Integer, &[(0, 1)], &[]).unwrap())
    }

    fn scalar(c: &Arc<IntComplex>, k: i64) -> GradedMap<num_bigint::BigInt> {
        let mut b = BTreeMap::new();
        b.insert(0, IntMatrix::from_i64(&[vec![k]]));
        GradedMap::new(c.clone(), c.clone(), 0, b).unwrap()
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let c = z0();
        let cone = mapping_cone(&c.identity()).unwrap();
        assert!(homology(&*cone.complex).unwrap().is_zero());
    }

    #[test]
    fn cone_of_two() {
        let c = z0();
        let cone = mapping_cone(&scalar(&c, 2)).unwrap();
        let h = homology(&*cone.complex).unwrap();
        assert_eq!(h.group(0), FgAbelianGroup::cyclic(2));
        assert!(h.group(1).is_zero());
        assert!(cone.inclusion.is_chain_map());
        assert!(cone.projection.compose(&cone.inclusion).unwrap().is_zero());
    }

    #[test]
    fn cone_of_zero_splits() {
        let c = z0();
        let cone = mapping_cone(&scalar(&c, 0)).unwrap();
        let h = homology(&*cone.complex).unwrap();
        assert_eq!(h.group(0), FgAbelianGroup::free(1));
        assert_eq!(h.group(1), FgAbelianGroup::free(1));
    }

    #[test]
    fn homotopy_checks() {
        let c = z0();
        let zero1 = GradedMap::zero(c.clone(), c.clone(), 1);
        let id = c.identity();
        assert!(Homotopy::new(id.clone(), id.clone(), zero1.clone()).verify(1).unwrap().holds);
        let bad = Homotopy::new(id.clone(), scalar(&c, 3), zero1).verify(1).unwrap();
        assert!(!bad.holds);
        assert!(!bad.residual.is_zero());
    }

    #[test]
    fn contraction_of_acyclic_cone() {
        let c = z0();
        let cone = mapping_cone(&scalar(&c, -1)).unwrap();
        let k = contracting_homotopy(&cone.complex).unwrap().unwrap();
        assert!(is_contracting_homotopy(&k));
        let cone2 = mapping_cone(&scalar(&c, 2)).unwrap();
        assert!(contracting_homotopy(&cone2.complex).unwrap().is_none());
    }
}
