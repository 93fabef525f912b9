use super::field::{is_prime, FpMatrix};
use super::matrix::{IntMatrix, LaurentMatrix, Matrix};
use super::ring::Ring;
use crate::error::{Error, Result};

/// Basis partition into grading classes with a total order inside each class.
///
/// `class[i]` is the grading of basis index `i`; `order` lists all indices
/// from first to last, and only the relative order within a class matters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockOrder {
    pub class: Vec<i64>,
    pub order: Vec<usize>,
}

impl BlockOrder {
    /// Position of each index in `order`, after checking it is a permutation.
    pub fn positions(&self) -> Result<Vec<usize>> {
        let n = self.class.len();
        if self.order.len() != n {
            return Err(Error::InvalidOrder(format!(
                "order has {} entries for {n} indices",
                self.order.len()
            )));
        }
        let mut pos = vec![usize::MAX; n];
        for (k, &i) in self.order.iter().enumerate() {
            if i >= n || pos[i] != usize::MAX {
                return Err(Error::InvalidOrder(format!("index {i} repeated or out of range")));
            }
            pos[i] = k;
        }
        Ok(pos)
    }

    pub fn max_class_size(&self) -> usize {
        let mut counts = std::collections::BTreeMap::new();
        for c in &self.class {
            *counts.entry(*c).or_insert(0usize) += 1;
        }
        counts.values().copied().max().unwrap_or(0)
    }

    /// Single class ordered by index.
    pub fn trivial(n: usize) -> Self {
        BlockOrder { class: vec![0; n], order: (0..n).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilpotencyWitness {
    pub upper: bool,
    /// Least k with N^k = 0, when `upper` holds.
    pub exponent: Option<usize>,
}

/// Nonzero entries of `N` lie within a class and strictly above the diagonal
/// in the class order.
pub fn is_strictly_upper<R: Ring>(n: &Matrix<R>, order: &BlockOrder) -> Result<Option<(usize, usize)>> {
    if !n.is_square() || n.rows() != order.class.len() {
        return Err(Error::Shape("matrix does not match the basis order".into()));
    }
    let pos = order.positions()?;
    for (i, j) in n.nonzero_positions() {
        if order.class[i] != order.class[j] || pos[i] >= pos[j] {
            return Ok(Some((i, j)));
        }
    }
    Ok(None)
}

/// Least k ≤ bound with N^k = 0.
pub fn nilpotency_exponent<R: Ring>(n: &Matrix<R>, bound: usize) -> Option<usize> {
    let mut p = Matrix::<R>::identity(n.rows());
    for k in 0..=bound {
        if p.is_zero() {
            return Some(k);
        }
        p = p.mul(n);
    }
    None
}

pub fn is_nilpotent_upper(n: &LaurentMatrix, order: &BlockOrder) -> Result<NilpotencyWitness> {
    if is_strictly_upper(n, order)?.is_some() {
        return Ok(NilpotencyWitness { upper: false, exponent: None });
    }
    let bound = order.max_class_size();
    let k = nilpotency_exponent(n, bound).ok_or(Error::NotNilpotent)?;
    Ok(NilpotencyWitness { upper: true, exponent: Some(k) })
}

/// (Id + N)⁻¹ = Σ_{j<k} (−N)^j for nilpotent `N`.
pub fn invert_id_plus_nilpotent<R: Ring>(n: &Matrix<R>) -> Result<Matrix<R>> {
    if !n.is_square() {
        return Err(Error::Shape("square matrix required".into()));
    }
    let k = nilpotency_exponent(n, n.rows()).ok_or(Error::NotNilpotent)?;
    let minus = n.neg();
    let mut acc = Matrix::<R>::zeros(n.rows(), n.cols());
    let mut term = Matrix::<R>::identity(n.rows());
    for _ in 0..k {
        acc = acc.add(&term);
        term = term.mul(&minus);
    }
    Ok(acc)
}

/// Ring map applied to a Laurent matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalPoint {
    One,
    ModP { p: u64, unit: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Evaluated {
    Int(IntMatrix),
    ModP(FpMatrix),
}

pub fn laurent_eval(m: &LaurentMatrix, at: EvalPoint) -> Result<Evaluated> {
    match at {
        EvalPoint::One => Ok(Evaluated::Int(m.eval_one())),
        EvalPoint::ModP { p, unit } => {
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            if unit % p == 0 {
                return Err(Error::Invalid(format!("T must map to a unit mod {p}")));
            }
            Ok(Evaluated::ModP(FpMatrix {
                p,
                rows: m.rows(),
                cols: m.cols(),
                data: m.entries().iter().map(|x| x.eval_mod(p, unit)).collect(),
            }))
        }
    }
}
