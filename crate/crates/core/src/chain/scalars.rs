use super::complex::{Grading, IntComplex, LaurentComplex};
use crate::error::Result;
use crate::exactlin::{laurent_eval, EvalPoint, Evaluated, FpMatrix};
use std::collections::BTreeMap;

/// Complex over F_p obtained by specializing Laurent data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpComplex {
    pub p: u64,
    pub grading: Grading,
    pub ranks: BTreeMap<i64, usize>,
    pub diffs: BTreeMap<i64, FpMatrix>,
}

impl FpComplex {
    pub fn rank(&self, g: i64) -> usize {
        self.ranks.get(&self.grading.norm(g)).copied().unwrap_or(0)
    }

    pub fn diff(&self, g: i64) -> FpMatrix {
        let k = self.grading.norm(g);
        self.diffs
            .get(&k)
            .cloned()
            .unwrap_or_else(|| FpMatrix::zeros(self.p, self.rank(k - 1), self.rank(k)))
    }

    pub fn verify_complex(&self) -> bool {
        self.ranks.keys().all(|&g| {
            self.diff(g - 1).mul(&self.diff(g)).map(|m| m.is_zero()).unwrap_or(false)
        })
    }

    pub fn homology_dims(&self) -> BTreeMap<i64, usize> {
        self.ranks
            .keys()
            .map(|&g| (g, self.rank(g) - self.diff(g).rank() - self.diff(g + 1).rank()))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Specialized {
    Int(IntComplex),
    ModP(FpComplex),
}

pub fn extend_scalars(c: &IntComplex) -> LaurentComplex {
    c.to_laurent()
}

/// Applies T ↦ 1 (over ℤ) or T ↦ unit (over F_p) to every differential.
pub fn specialize(c: &LaurentComplex, at: EvalPoint) -> Result<Specialized> {
    match at {
        EvalPoint::One => Ok(Specialized::Int(c.map_ring(|x| x.eval_one()))),
        EvalPoint::ModP { p, .. } => {
            let mut diffs = BTreeMap::new();
            for g in c.grades() {
                match laurent_eval(&c.diff(g), at)? {
                    Evaluated::ModP(m) => {
                        if !m.is_zero() {
                            diffs.insert(g, m);
                        }
                    }
                    Evaluated::Int(_) => unreachable!("mod-p evaluation"),
                }
            }
            Ok(Specialized::ModP(FpComplex {
                p,
                grading: c.grading(),
                ranks: c.ranks().clone(),
                diffs,
            }))
        }
    }
}

/// Integer complex reduced mod p (T-free).
pub fn reduce_mod_p(c: &IntComplex, p: u64) -> Result<FpComplex> {
    match specialize(&extend_scalars(c), EvalPoint::ModP { p, unit: 1 })? {
        Specialized::ModP(f) => Ok(f),
        Specialized::Int(_) => unreachable!("mod-p evaluation"),
    }
}
