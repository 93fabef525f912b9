use super::hypotheses::TriangleHypotheses;
use crate::chain::{
    homology_dims, mapping_cone, tensor, ChainComplex, ComplexExt, DirectSum, Filtration, Grading, IntComplex,
};
use crate::error::{Error, Result};
use crate::exactlin::Field;
use num_bigint::BigInt;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Tensor product of the cones C(f₂) of k triangle data, filtered by the
/// number of C₂ factors. Corner ε ∈ {±1}^k picks C₀ (+1) or C₂ (−1) in
/// each factor.
#[derive(Clone, Debug)]
pub struct IteratedCone {
    pub filtration: Filtration,
    pub corners: BTreeMap<Vec<i8>, Arc<IntComplex>>,
}

impl IteratedCone {
    /// Σ over corners of the total homology dimension, grouped by level.
    pub fn corner_dims_by_level(&self, field: Field) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for (eps, c) in &self.corners {
            let level = eps.iter().filter(|e| **e < 0).count() as i64;
            let d: usize = homology_dims(c, field).values().sum();
            *out.entry(level).or_insert(0) += d;
        }
        out.retain(|_, d| *d > 0);
        out
    }
}

fn unit(grading: Grading) -> Result<IntComplex> {
    ChainComplex::new(grading, [(0, 1)].into_iter().collect(), BTreeMap::new())
}

pub fn iterated_cone_filtration(data: &[TriangleHypotheses<BigInt>]) -> Result<IteratedCone> {
    let first = data.first().ok_or_else(|| Error::Invalid("need at least one triangle".into()))?;
    let grading = first.grading();
    if data.iter().any(|d| d.grading() != grading) {
        return Err(Error::Grading("triangle data are not composable: gradings differ".into()));
    }
    let mut acc = unit(grading)?;
    let mut levels: BTreeMap<i64, Vec<i64>> = [(0, vec![0])].into_iter().collect();
    let mut corners: BTreeMap<Vec<i8>, IntComplex> = [(Vec::new(), unit(grading)?)].into_iter().collect();
    for d in data {
        let cone = mapping_cone(&d.f[2])?;
        let cone_levels: BTreeMap<i64, Vec<i64>> = cone
            .complex
            .grades()
            .into_iter()
            .map(|g| (g, cone.sum.owners(g).into_iter().map(|o| o as i64).collect()))
            .collect();
        let t = tensor(&acc, &cone.complex)?;
        levels = t
            .origin
            .iter()
            .map(|(n, idx)| {
                let lv = idx.iter().map(|x| levels[&x.p][x.i] + cone_levels[&x.q][x.j]).collect();
                (*n, lv)
            })
            .collect();
        acc = t.complex;

        // C₂ enters the cone with the sign −∂ and its shift
        let mut shifted = DirectSum::new(grading);
        shifted.push(d.c[2].clone(), cone.sum.shift(1))?;
        let minus = shifted.assemble_complex(&[(0, 0, d.c[2].differential().neg())])?;
        let mut next = BTreeMap::new();
        for (eps, c) in corners {
            let mut plus = eps.clone();
            plus.push(1);
            next.insert(plus, tensor(&c, &d.c[0])?.complex);
            let mut neg = eps;
            neg.push(-1);
            next.insert(neg, tensor(&c, &minus)?.complex);
        }
        corners = next;
    }
    let filtration = Filtration::new(Arc::new(acc), levels)?;
    Ok(IteratedCone { filtration, corners: corners.into_iter().map(|(k, v)| (k, Arc::new(v))).collect() })
}
