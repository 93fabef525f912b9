use super::complex::ChainComplex;
use crate::error::{Error, Result};
use crate::exactlin::{Matrix, Ring};
use std::collections::BTreeMap;

/// Basis element a_i ⊗ b_j with a_i in grade p and b_j in grade q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TensorIndex {
    pub p: i64,
    pub i: usize,
    pub q: i64,
    pub j: usize,
}

#[derive(Clone, Debug)]
pub struct Tensor<R: Ring> {
    pub complex: ChainComplex<R>,
    /// Origin of every basis element, per total grade.
    pub origin: BTreeMap<i64, Vec<TensorIndex>>,
}

/// A ⊗ B with ∂(a ⊗ b) = ∂a ⊗ b + (−1)^{|a|} a ⊗ ∂b.
pub fn tensor<R: Ring>(a: &ChainComplex<R>, b: &ChainComplex<R>) -> Result<Tensor<R>> {
    let gr = a.grading();
    if gr != b.grading() {
        return Err(Error::Grading("tensor factors have different gradings".into()));
    }
    gr.parity_sign(0)?;
    let mut origin: BTreeMap<i64, Vec<TensorIndex>> = BTreeMap::new();
    for p in a.grades() {
        for q in b.grades() {
            let n = gr.norm(p + q);
            let v = origin.entry(n).or_default();
            for i in 0..a.rank(p) {
                for j in 0..b.rank(q) {
                    v.push(TensorIndex { p, i, q, j });
                }
            }
        }
    }
    let index: BTreeMap<TensorIndex, usize> = origin
        .values()
        .flat_map(|v| v.iter().enumerate().map(|(k, t)| (*t, k)))
        .collect();
    let ranks: BTreeMap<i64, usize> = origin.iter().map(|(n, v)| (*n, v.len())).collect();
    let rank_of = |n: i64| ranks.get(&gr.norm(n)).copied().unwrap_or(0);
    let mut diffs = BTreeMap::new();
    for (n, basis) in &origin {
        let mut d = Matrix::<R>::zeros(rank_of(n - 1), basis.len());
        for (col, t) in basis.iter().enumerate() {
            let da = a.diff(t.p);
            for k in 0..da.rows() {
                let c = da.get(k, t.i);
                if !c.is_zero() {
                    let tgt = TensorIndex { p: gr.norm(t.p - 1), i: k, q: t.q, j: t.j };
                    let row = index[&tgt];
                    d.set(row, col, d.get(row, col).add(c));
                }
            }
            let db = b.diff(t.q);
            let sign = gr.parity_sign(t.p)?;
            for l in 0..db.rows() {
                let c = db.get(l, t.j);
                if !c.is_zero() {
                    let tgt = TensorIndex { p: t.p, i: t.i, q: gr.norm(t.q - 1), j: l };
                    let row = index[&tgt];
                    let c = if sign > 0 { c.clone() } else { c.neg() };
                    d.set(row, col, d.get(row, col).add(&c));
                }
            }
        }
        if !d.is_zero() {
            diffs.insert(*n, d);
        }
    }
    let complex = ChainComplex::new(gr, ranks, diffs)?;
    Ok(Tensor { complex, origin })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::complex::{Grading, IntComplex};
    use crate::chain::homology::homology_dims;
    use crate::exactlin::Field;

    #[test]
    fn kunneth_over_field() {
        let rp2 = IntComplex::from_i64(
            Grading::Integer,
            &[(0, 1), (1, 1), (2, 1)],
            &[(1, vec![vec![0]]), (2, vec![vec![2]])],
        )
        .unwrap();
        let t = tensor(&rp2, &rp2).unwrap();
        assert!(t.complex.verify_complex());
        let f2: usize = homology_dims(&t.complex, Field::Prime(2)).values().sum();
        assert_eq!(f2, 9);
        let q: usize = homology_dims(&t.complex, Field::Rational).values().sum();
        assert_eq!(q, 1);
    }

    #[test]
    fn unit_is_neutral() {
        let unit = IntComplex::from_i64(Grading::Integer, &[(0, 1)], &[]).unwrap();
        let c = IntComplex::from_i64(Grading::Integer, &[(0, 1), (1, 1)], &[(1, vec![vec![3]])]).unwrap();
        assert_eq!(tensor(&unit, &c).unwrap().complex, c);
    }
}
