use super::group::FgAbelianGroup;
use crate::error::{Error, Result};
use crate::exactlin::{field::is_prime, Field};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;

/// Group graded by ℤ/modulus; zero components are not stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GradedGroup {
    modulus: u32,
    components: BTreeMap<u32, FgAbelianGroup>,
}

impl GradedGroup {
    pub fn new(modulus: u32) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::Invalid("grading modulus must be positive".into()));
        }
        Ok(GradedGroup { modulus, components: BTreeMap::new() })
    }

    pub fn reduce(&self, g: i64) -> u32 {
        g.rem_euclid(self.modulus as i64) as u32
    }

    /// Adds `group` into grading `g` (summing with anything already there).
    pub fn with(mut self, g: i64, group: FgAbelianGroup) -> Self {
        self.add_component(g, group);
        self
    }

    pub fn add_component(&mut self, g: i64, group: FgAbelianGroup) {
        let k = self.reduce(g);
        let cur = self.components.remove(&k).unwrap_or_default();
        let sum = cur.direct_sum(&group);
        if !sum.is_zero() {
            self.components.insert(k, sum);
        }
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn component(&self, g: i64) -> FgAbelianGroup {
        self.components.get(&self.reduce(g)).cloned().unwrap_or_default()
    }

    pub fn components(&self) -> &BTreeMap<u32, FgAbelianGroup> {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn total_rank(&self) -> usize {
        self.components.values().map(|c| c.rank()).sum()
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus, other.modulus));
        }
        let mut out = self.clone();
        for (g, c) in &other.components {
            out.add_component(*g as i64, c.clone());
        }
        Ok(out)
    }

    pub fn shift_grading(&self, n: i64) -> Self {
        let mut out = GradedGroup { modulus: self.modulus, components: BTreeMap::new() };
        for (g, c) in &self.components {
            out.add_component(*g as i64 + n, c.clone());
        }
        out
    }

    /// rank(even) − rank(odd).
    pub fn euler_characteristic(&self) -> Result<i64> {
        if self.modulus != 2 {
            return Err(Error::WrongModulus { expected: 2, got: self.modulus });
        }
        let even = self.component(0).rank() as i64;
        let odd = self.component(1).rank() as i64;
        Ok(even - odd)
    }

    pub fn dim_mod_p(&self, p: u64) -> Result<usize> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(self.components.values().map(|c| c.rank() + 2 * c.p_rank(p)).sum())
    }

    /// Dimension of the homology with coefficients in `k`, regarding `self`
    /// as integral homology.
    pub fn dim_over(&self, k: Field) -> Result<usize> {
        match k {
            Field::Rational => Ok(self.total_rank()),
            Field::Prime(p) => self.dim_mod_p(p),
        }
    }

    /// dim_K = χ.
    pub fn is_l_space(&self, k: Field) -> Result<bool> {
        Ok(self.dim_over(k)? as i64 == self.euler_characteristic()?)
    }

    pub fn has_p_torsion(&self, p: u64) -> bool {
        self.components.values().any(|c| c.has_p_torsion(p))
    }
}

impl fmt::Display for GradedGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.components.iter().map(|(g, c)| format!("({c})_({g})")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Serialize, Deserialize)]
struct GradedJson {
    #[serde(rename = "mod")]
    modulus: u32,
    components: BTreeMap<String, FgAbelianGroup>,
}

impl Serialize for GradedGroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let components = self.components.iter().map(|(g, c)| (g.to_string(), c.clone())).collect();
        GradedJson { modulus: self.modulus, components }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GradedGroup {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = GradedJson::deserialize(d)?;
        let mut out = GradedGroup::new(j.modulus).map_err(serde::de::Error::custom)?;
        for (k, c) in j.components {
            let g: i64 = k.parse().map_err(serde::de::Error::custom)?;
            out.add_component(g, c);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(r: usize) -> FgAbelianGroup {
        FgAbelianGroup::free(r)
    }

    fn z2() -> FgAbelianGroup {
        FgAbelianGroup::cyclic(2)
    }

    #[test]
    fn shift_examples() {
        let a = GradedGroup::new(2).unwrap().with(0, z(1));
        assert_eq!(a.shift_grading(1), GradedGroup::new(2).unwrap().with(1, z(1)));
        assert_eq!(a.shift_grading(2), a);
        let c = GradedGroup::new(2).unwrap().with(1, z(1)).with(0, z2());
        assert_eq!(c.shift_grading(1), GradedGroup::new(2).unwrap().with(0, z(1)).with(1, z2()));
    }

    #[test]
    fn euler_and_l_space() {
        let l5 = GradedGroup::new(2).unwrap().with(0, z(5));
        assert_eq!(l5.euler_characteristic().unwrap(), 5);
        assert!(l5.is_l_space(Field::Prime(2)).unwrap());
        let p = GradedGroup::new(2).unwrap().with(0, z(1)).with(1, z2());
        assert_eq!(p.euler_characteristic().unwrap(), 1);
        assert!(!p.is_l_space(Field::Prime(2)).unwrap());
        assert!(p.is_l_space(Field::Rational).unwrap());
        assert!(p.is_l_space(Field::Prime(3)).unwrap());
        assert_eq!(GradedGroup::new(2).unwrap().euler_characteristic().unwrap(), 0);
    }

    #[test]
    fn modulus_checks() {
        let a = GradedGroup::new(2).unwrap();
        let b = GradedGroup::new(4).unwrap();
        assert_eq!(a.direct_sum(&b), Err(Error::ModulusMismatch(2, 4)));
        assert!(b.euler_characteristic().is_err());
    }
}
