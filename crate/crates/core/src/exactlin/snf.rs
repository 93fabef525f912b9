use super::matrix::IntMatrix;
use crate::abgroup::FgAbelianGroup;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// `U · M · V = D` with `U`, `V` unimodular and `D` in Smith form.
#[derive(Clone, Debug, PartialEq)]
pub struct SnfDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SnfDecomposition {
    /// Diagonal entries of `D` (length min(rows, cols)).
    pub fn diagonal(&self) -> Vec<BigInt> {
        let k = self.d.rows().min(self.d.cols());
        (0..k).map(|i| self.d.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }

    /// Columns of `V` spanning the integer kernel of the source matrix.
    pub fn kernel_basis(&self) -> IntMatrix {
        let r = self.rank();
        let n = self.v.cols();
        let idx: Vec<usize> = (r..n).collect();
        self.v.select_columns(&idx)
    }

    /// Some integer `x` with `M x = b`, if one exists.
    pub fn solve(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        let m = self.u.rows();
        if b.len() != m {
            return None;
        }
        let bcol = IntMatrix::from_vec(m, 1, b.to_vec()).ok()?;
        let ub = self.u.mul(&bcol);
        let n = self.v.cols();
        let diag = self.diagonal();
        let mut y = vec![BigInt::zero(); n];
        for i in 0..m {
            let c = ub.get(i, 0);
            match diag.get(i) {
                Some(d) if !d.is_zero() => {
                    let (q, r) = c.div_rem(d);
                    if !r.is_zero() {
                        return None;
                    }
                    y[i] = q;
                }
                _ => {
                    if !c.is_zero() {
                        return None;
                    }
                }
            }
        }
        let ycol = IntMatrix::from_vec(n, 1, y).ok()?;
        let x = self.v.mul(&ycol);
        Some((0..n).map(|i| x.get(i, 0).clone()).collect())
    }
}

fn swap_rows(a: &mut [Vec<BigInt>], i: usize, j: usize) {
    a.swap(i, j);
}

fn swap_cols(a: &mut [Vec<BigInt>], i: usize, j: usize) {
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

/// row_i -= q · row_j
fn row_axpy(a: &mut [Vec<BigInt>], i: usize, j: usize, q: &BigInt) {
    let (src, dst) = if i < j {
        let (lo, hi) = a.split_at_mut(j);
        (&hi[0], &mut lo[i])
    } else {
        let (lo, hi) = a.split_at_mut(i);
        (&lo[j], &mut hi[0])
    };
    for (d, s) in dst.iter_mut().zip(src.iter()) {
        if !s.is_zero() {
            *d -= q * s;
        }
    }
}

/// col_i -= q · col_j
fn col_axpy(a: &mut [Vec<BigInt>], i: usize, j: usize, q: &BigInt) {
    for row in a.iter_mut() {
        if !row[j].is_zero() {
            let t = q * &row[j];
            row[i] -= t;
        }
    }
}

/// Smith normal form with smallest-absolute-value pivoting.
pub fn smith_normal_form(m: &IntMatrix) -> SnfDecomposition {
    let (rows, cols) = m.shape();
    let mut a = m.to_rows();
    let mut u = IntMatrix::identity(rows).to_rows();
    // V is tracked transposed so column operations become row operations.
    let mut vt = IntMatrix::identity(cols).to_rows();

    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero()
                    && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        swap_rows(&mut a, t, pi);
        swap_rows(&mut u, t, pi);
        swap_cols(&mut a, t, pj);
        swap_rows(&mut vt, t, pj);

        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                row_axpy(&mut a, i, t, &q);
                row_axpy(&mut u, i, t, &q);
                if !a[i][t].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                col_axpy(&mut a, j, t, &q);
                row_axpy(&mut vt, j, t, &q);
                if !a[t][j].is_zero() {
                    dirty = true;
                }
            }
            if !dirty {
                // divisibility of the trailing block by the pivot
                let bad = (t + 1..rows)
                    .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                    .find(|&(i, j)| !a[i][j].is_multiple_of(&a[t][t]));
                match bad {
                    None => break,
                    Some((i, _)) => {
                        let neg_one = -BigInt::one();
                        row_axpy(&mut a, t, i, &neg_one);
                        row_axpy(&mut u, t, i, &neg_one);
                        continue;
                    }
                }
            }
            // move the new smallest entry of row/column t into the pivot slot
            let mut best = (t, t);
            for i in t + 1..rows {
                if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t + 1..cols {
                if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            if best.0 != t {
                swap_rows(&mut a, t, best.0);
                swap_rows(&mut u, t, best.0);
            } else if best.1 != t {
                swap_cols(&mut a, t, best.1);
                swap_rows(&mut vt, t, best.1);
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
        t += 1;
    }

    let to_mat = |rws: Vec<Vec<BigInt>>, r: usize, c: usize| {
        if r == 0 || c == 0 {
            IntMatrix::zeros(r, c)
        } else {
            IntMatrix::from_rows(rws).expect("rectangular")
        }
    };
    SnfDecomposition {
        u: to_mat(u, rows, rows),
        d: to_mat(a, rows, cols),
        v: to_mat(vt, cols, cols).transpose(),
    }
}

/// The group ℤ^cols / rowspace(M): columns index generators, rows are relations.
pub fn cokernel_presentation(m: &IntMatrix) -> FgAbelianGroup {
    let s = smith_normal_form(m);
    let diag = s.diagonal();
    let nonzero = diag.iter().filter(|x| !x.is_zero()).count();
    let rank = m.cols() - nonzero;
    let torsion: Vec<BigInt> = diag.into_iter().filter(|x| !x.is_zero() && !x.is_one()).collect();
    FgAbelianGroup::from_invariant_factors(rank, torsion)
}

/// Rank over ℚ.
pub fn rank(m: &IntMatrix) -> usize {
    smith_normal_form(m).rank()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &IntMatrix) -> SnfDecomposition {
        let s = smith_normal_form(m);
        assert_eq!(s.u.mul(m).mul(&s.v), s.d);
        assert!(s.u.determinant().unwrap().abs().is_one());
        assert!(s.v.determinant().unwrap().abs().is_one());
        let diag = s.diagonal();
        for w in diag.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]) || w[0].is_zero() && w[1].is_zero());
        }
        s
    }

    #[test]
    fn zero_one_by_one() {
        let s = check(&IntMatrix::from_i64(&[vec![0]]));
        assert_eq!(s.d, IntMatrix::from_i64(&[vec![0]]));
        assert_eq!(s.u, IntMatrix::identity(1));
        assert_eq!(s.v, IntMatrix::identity(1));
    }

    #[test]
    fn two_by_two() {
        let s = check(&IntMatrix::from_i64(&[vec![2, 4], vec![6, 8]]));
        assert_eq!(s.diagonal(), vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn identity_stays() {
        let s = check(&IntMatrix::identity(3));
        assert_eq!(s.d, IntMatrix::identity(3));
    }

    #[test]
    fn empty_shapes() {
        let s = check(&IntMatrix::zeros(0, 3));
        assert_eq!(s.v, IntMatrix::identity(3));
        let s = check(&IntMatrix::zeros(2, 0));
        assert_eq!(s.u, IntMatrix::identity(2));
    }

    #[test]
    fn cokernels() {
        assert_eq!(cokernel_presentation(&IntMatrix::from_i64(&[vec![2]])).to_string(), "Z/2");
        assert_eq!(cokernel_presentation(&IntMatrix::zeros(0, 3)).to_string(), "Z^3");
        assert_eq!(
            cokernel_presentation(&IntMatrix::from_i64(&[vec![2, 0], vec![0, 3]])).to_string(),
            "Z/6"
        );
    }

    #[test]
    fn solve_and_kernel() {
        let m = IntMatrix::from_i64(&[vec![2, 4, 6]]);
        let s = smith_normal_form(&m);
        let k = s.kernel_basis();
        assert_eq!(k.cols(), 2);
        assert!(m.mul(&k).is_zero());
        let x = s.solve(&[BigInt::from(10)]).unwrap();
        let lhs: BigInt = x.iter().zip([2, 4, 6]).map(|(a, b)| a * b).sum();
        assert_eq!(lhs, BigInt::from(10));
        assert!(s.solve(&[BigInt::from(3)]).is_none());
    }
}
