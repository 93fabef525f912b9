use super::complex::{ChainComplex, Grading, IntComplex};
use crate::abgroup::{FgAbelianGroup, GradedGroup};
use crate::error::{Error, Result};
use crate::exactlin::{smith_normal_form, Field, Ring};
use num_traits::{One, Zero};
use std::any::Any;
use std::collections::BTreeMap;

/// Homology groups indexed by (normalized) grade; zero groups omitted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homology {
    pub grading: Grading,
    pub groups: BTreeMap<i64, FgAbelianGroup>,
}

impl Homology {
    pub fn group(&self, g: i64) -> FgAbelianGroup {
        self.groups.get(&self.grading.norm(g)).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.groups.is_empty()
    }

    /// Σ (−1)^g rank H_g.
    pub fn euler_characteristic(&self) -> i64 {
        self.groups
            .iter()
            .map(|(g, h)| if g.rem_euclid(2) == 0 { h.rank() as i64 } else { -(h.rank() as i64) })
            .sum()
    }

    /// Collapses the grading to ℤ/modulus.
    pub fn to_graded_group(&self, modulus: u32) -> Result<GradedGroup> {
        if let Grading::Cyclic(m) = self.grading {
            if m % modulus != 0 {
                return Err(Error::ModulusMismatch(m, modulus));
            }
        }
        let mut out = GradedGroup::new(modulus)?;
        for (g, h) in &self.groups {
            out.add_component(*g, h.clone());
        }
        Ok(out)
    }
}

/// Integral homology via Smith normal forms.
///
/// H_g ≅ ℤ^{n − rk ∂_g − rk ∂_{g+1}} ⊕ (torsion of coker ∂_{g+1}).
pub fn homology<R: Ring>(c: &ChainComplex<R>) -> Result<Homology> {
    let c: &IntComplex = (c as &dyn Any)
        .downcast_ref()
        .ok_or_else(|| Error::UnsupportedRing("homology is only computed over the integers".into()))?;
    let mut groups = BTreeMap::new();
    for g in c.grades() {
        let n = c.rank(g);
        let out = smith_normal_form(&c.diff(g)).rank();
        let inc = smith_normal_form(&c.diff(g + 1));
        let diag = inc.diagonal();
        let rk_in = diag.iter().filter(|x| !Zero::is_zero(*x)).count();
        let torsion = diag.into_iter().filter(|x| !Zero::is_zero(x) && !x.is_one()).collect();
        let h = FgAbelianGroup::from_invariant_factors(n - out - rk_in, torsion);
        if !h.is_zero() {
            groups.insert(g, h);
        }
    }
    Ok(Homology { grading: c.grading(), groups })
}

/// Betti numbers over a field; every grade with nonzero rank appears.
pub fn homology_dims(c: &IntComplex, field: Field) -> BTreeMap<i64, usize> {
    c.grades()
        .into_iter()
        .map(|g| (g, c.rank(g) - field.rank(&c.diff(g)) - field.rank(&c.diff(g + 1))))
        .collect()
}

pub fn is_acyclic(c: &IntComplex) -> bool {
    homology(c).map(|h| h.is_zero()).unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rp2() -> IntComplex {
        IntComplex::from_i64(
            Grading::Integer,
            &[(0, 1), (1, 1), (2, 1)],
            &[(1, vec![vec![0]]), (2, vec![vec![2]])],
        )
        .unwrap()
    }

    #[test]
    fn circle() {
        let c = IntComplex::from_i64(Grading::Integer, &[(0, 1), (1, 1)], &[]).unwrap();
        let h = homology(&c).unwrap();
        assert_eq!(h.group(0), FgAbelianGroup::free(1));
        assert_eq!(h.group(1), FgAbelianGroup::free(1));
    }

    #[test]
    fn projective_plane() {
        let h = homology(&rp2()).unwrap();
        assert_eq!(h.group(0), FgAbelianGroup::free(1));
        assert_eq!(h.group(1), FgAbelianGroup::cyclic(2));
        assert!(h.group(2).is_zero());
        let f2: Vec<usize> = homology_dims(&rp2(), Field::Prime(2)).into_values().collect();
        assert_eq!(f2, vec![1, 1, 1]);
        let q: Vec<usize> = homology_dims(&rp2(), Field::Rational).into_values().collect();
        assert_eq!(q, vec![1, 0, 0]);
    }

    #[test]
    fn laurent_homology_refused() {
        let c = rp2().to_laurent();
        assert!(matches!(homology(&c), Err(Error::UnsupportedRing(_))));
    }

    #[test]
    fn zero_complex() {
        let c = IntComplex::zero(Grading::Integer);
        assert!(homology(&c).unwrap().is_zero());
        assert!(homology_dims(&c, Field::Prime(3)).is_empty());
    }
}
