use super::laurent::mod_inverse;
use super::matrix::IntMatrix;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt::Debug;

/// Coefficient field selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Field {
    Prime(u64),
    Rational,
}

impl Field {
    pub fn prime(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(Field::Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    /// Rank of an integer matrix after extension of scalars.
    pub fn rank(&self, m: &IntMatrix) -> usize {
        match self {
            Field::Prime(p) => {
                let f = PrimeField::new(*p);
                rank(&f, reduce(&f, m))
            }
            Field::Rational => super::snf::rank(m),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Field::Prime(p) => format!("F{p}"),
            Field::Rational => "Q".into(),
        }
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Arithmetic of a field whose elements are `E`.
pub trait FieldOps: Clone + Debug {
    type E: Clone + PartialEq + Debug;
    fn zero(&self) -> Self::E;
    fn one(&self) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn inv(&self, a: &Self::E) -> Self::E;
    fn from_int(&self, a: &BigInt) -> Self::E;
}

#[derive(Clone, Debug)]
pub struct PrimeField {
    pub p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Self {
        PrimeField { p }
    }
}

impl FieldOps for PrimeField {
    type E = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + *b as u128) % self.p as u128) as u64
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + (self.p - b % self.p) as u128) % self.p as u128) as u64
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    fn inv(&self, a: &u64) -> u64 {
        mod_inverse(*a, self.p).expect("inverse of zero")
    }
    fn from_int(&self, a: &BigInt) -> u64 {
        let r = a.mod_floor(&BigInt::from(self.p));
        r.try_into().expect("residue fits")
    }
}

#[derive(Clone, Debug)]
pub struct RationalField;

impl FieldOps for RationalField {
    type E = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        a.recip()
    }
    fn from_int(&self, a: &BigInt) -> BigRational {
        BigRational::from_integer(a.clone())
    }
}

pub fn reduce<F: FieldOps>(f: &F, m: &IntMatrix) -> Vec<Vec<F::E>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|x| f.from_int(x)).collect()).collect()
}

/// In-place reduced row echelon form; returns pivot columns.
pub fn rref<F: FieldOps>(f: &F, a: &mut [Vec<F::E>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r >= a.len() {
            break;
        }
        let Some(pr) = (r..a.len()).find(|&i| !f.is_zero(&a[i][c])) else { continue };
        a.swap(r, pr);
        let inv = f.inv(&a[r][c]);
        for x in a[r].iter_mut() {
            *x = f.mul(x, &inv);
        }
        for i in 0..a.len() {
            if i != r && !f.is_zero(&a[i][c]) {
                let factor = a[i][c].clone();
                for j in 0..ncols {
                    let t = f.mul(&factor, &a[r][j]);
                    a[i][j] = f.sub(&a[i][j], &t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<F: FieldOps>(f: &F, mut a: Vec<Vec<F::E>>) -> usize {
    let ncols = a.first().map_or(0, |r| r.len());
    rref(f, &mut a, ncols).len()
}

/// Dimension of the span of the given vectors of length `n`.
pub fn span_dim<F: FieldOps>(f: &F, vecs: &[Vec<F::E>], n: usize) -> usize {
    let mut a = vecs.to_vec();
    rref(f, &mut a, n).len()
}

/// Basis of {x : A x = 0} where `A` has `ncols` columns.
pub fn nullspace<F: FieldOps>(f: &F, a: &[Vec<F::E>], ncols: usize) -> Vec<Vec<F::E>> {
    let mut m = a.to_vec();
    let pivots = rref(f, &mut m, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![f.zero(); ncols];
            v[fc] = f.one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = f.sub(&f.zero(), &m[row][fc]);
            }
            v
        })
        .collect()
}

/// y = A x
pub fn apply<F: FieldOps>(f: &F, a: &[Vec<F::E>], x: &[F::E]) -> Vec<F::E> {
    a.iter()
        .map(|row| {
            row.iter().zip(x).fold(f.zero(), |acc, (r, v)| f.add(&acc, &f.mul(r, v)))
        })
        .collect()
}

/// Dense matrix over F_p, produced by specialization of Laurent data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpMatrix {
    pub p: u64,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u64>,
}

impl FpMatrix {
    pub fn zeros(p: u64, rows: usize, cols: usize) -> Self {
        FpMatrix { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec()).collect()
    }

    pub fn mul(&self, other: &FpMatrix) -> Result<FpMatrix> {
        if self.cols != other.rows || self.p != other.p {
            return Err(Error::Shape("F_p matrix product".into()));
        }
        let f = PrimeField::new(self.p);
        let mut out = FpMatrix::zeros(self.p, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * out.cols + j;
                    out.data[idx] = f.add(&out.data[idx], &f.mul(&a, &other.get(k, j)));
                }
            }
        }
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        rank(&PrimeField::new(self.p), self.to_rows())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| *x == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_depend_on_field() {
        let m = IntMatrix::from_i64(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(Field::Prime(2).rank(&m), 1);
        assert_eq!(Field::Prime(3).rank(&m), 1);
        assert_eq!(Field::Prime(5).rank(&m), 2);
        assert_eq!(Field::Rational.rank(&m), 2);
    }

    #[test]
    fn nullspace_is_annihilated() {
        let f = PrimeField::new(3);
        let a = vec![vec![1, 2, 0], vec![0, 0, 1]];
        let ns = nullspace(&f, &a, 3);
        assert_eq!(ns.len(), 1);
        assert!(apply(&f, &a, &ns[0]).iter().all(|x| *x == 0));
    }

    #[test]
    fn prime_check() {
        assert!(Field::prime(7).is_ok());
        assert_eq!(Field::prime(9), Err(Error::NotPrime(9)));
    }
}
