use crate::error::{Error, Result};
use crate::exactlin::{field::is_prime, smith_normal_form, IntMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use crate::json::IntJson;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;

/// ℤ^rank ⊕ ℤ/d₁ ⊕ … ⊕ ℤ/d_k with d₁ | d₂ | … and every dᵢ ≥ 2.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, PartialOrd, Ord)]
pub struct FgAbelianGroup {
    rank: usize,
    torsion: Vec<BigInt>,
}

impl FgAbelianGroup {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        FgAbelianGroup { rank, torsion: Vec::new() }
    }

    pub fn cyclic(n: impl Into<BigInt>) -> Self {
        let n: BigInt = n.into();
        if n.is_zero() {
            return Self::free(1);
        }
        Self::from_invariant_factors(0, vec![n])
    }

    /// Accepts any list of cyclic orders and recomputes invariant factors.
    pub fn from_invariant_factors(rank: usize, orders: Vec<BigInt>) -> Self {
        let mut extra_rank = 0;
        let mut nonzero = Vec::new();
        for o in orders {
            let o = o.abs();
            if o.is_zero() {
                extra_rank += 1;
            } else if !o.is_one() {
                nonzero.push(o);
            }
        }
        let already = nonzero.windows(2).all(|w| w[1].is_multiple_of(&w[0]));
        let torsion = if already {
            nonzero
        } else {
            let d = smith_normal_form(&IntMatrix::diagonal(&nonzero)).diagonal();
            d.into_iter().filter(|x| !x.is_one()).collect()
        };
        FgAbelianGroup { rank: rank + extra_rank, torsion }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn torsion_part(&self) -> FgAbelianGroup {
        FgAbelianGroup { rank: 0, torsion: self.torsion.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.rank == 0
    }

    /// Order of a finite group.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.torsion.iter().product())
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut t = self.torsion.clone();
        t.extend(other.torsion.iter().cloned());
        Self::from_invariant_factors(self.rank + other.rank, t)
    }

    /// Number of invariant factors divisible by p.
    pub fn p_rank(&self, p: u64) -> usize {
        let pb = BigInt::from(p);
        self.torsion.iter().filter(|d| d.is_multiple_of(&pb)).count()
    }

    pub fn has_p_torsion(&self, p: u64) -> bool {
        self.p_rank(p) > 0
    }

    /// dim over F_p of G ⊗ F_p plus Tor(G, F_p).
    pub fn dim_mod_p(&self, p: u64) -> Result<usize> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(self.rank + 2 * self.p_rank(p))
    }

    /// Primes dividing the torsion order.
    pub fn torsion_primes(&self) -> Vec<u64> {
        let mut ps: Vec<u64> = self.primary_parts().keys().copied().collect();
        ps.sort_unstable();
        ps
    }

    /// Prime → partition (descending exponents) of the p-primary part.
    ///
    /// Factors by trial division; invariant factors must fit in u64.
    pub fn primary_parts(&self) -> BTreeMap<u64, Vec<u32>> {
        let mut parts: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for d in &self.torsion {
            let d = d.to_u64().expect("invariant factor exceeds u64");
            for (p, e) in factorize(d) {
                parts.entry(p).or_default().push(e);
            }
        }
        for v in parts.values_mut() {
            v.sort_unstable_by(|a, b| b.cmp(a));
        }
        parts
    }

    /// Inverse of [`FgAbelianGroup::primary_parts`].
    pub fn from_primary_parts(rank: usize, parts: &BTreeMap<u64, Vec<u32>>) -> Self {
        let len = parts.values().map(|v| v.len()).max().unwrap_or(0);
        let mut factors = vec![BigInt::one(); len];
        for (p, exps) in parts {
            // largest exponent goes to the last invariant factor
            for (i, e) in exps.iter().enumerate() {
                factors[len - 1 - i] *= BigInt::from(*p).pow(*e);
            }
        }
        let torsion = factors.into_iter().filter(|x| !x.is_one()).collect();
        FgAbelianGroup { rank, torsion }
    }
}

pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        let mut e = 0;
        while n.is_multiple_of(d) {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

impl fmt::Display for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct GroupJson {
    rank: usize,
    #[serde(default)]
    torsion: Vec<IntJson>,
}

impl Serialize for FgAbelianGroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let torsion = self
            .torsion
            .iter()
            .map(IntJson::from_big)
            .collect();
        GroupJson { rank: self.rank, torsion }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FgAbelianGroup {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = GroupJson::deserialize(d)?;
        let mut orders = Vec::new();
        for t in j.torsion {
            let v = t.to_big().map_err(serde::de::Error::custom)?;
            if v.is_zero() || v.is_negative() {
                return Err(serde::de::Error::custom("torsion orders must be positive"));
            }
            orders.push(v);
        }
        Ok(FgAbelianGroup::from_invariant_factors(j.rank, orders))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(rank: usize, t: &[i64]) -> FgAbelianGroup {
        FgAbelianGroup::from_invariant_factors(rank, t.iter().map(|x| BigInt::from(*x)).collect())
    }

    #[test]
    fn crt_sum() {
        assert_eq!(g(0, &[2]).direct_sum(&g(0, &[3])), g(0, &[6]));
        assert_eq!(g(0, &[2, 3]).torsion(), &[BigInt::from(6)]);
    }

    #[test]
    fn zero_is_identity() {
        let a = g(2, &[4, 2]);
        assert_eq!(a.direct_sum(&FgAbelianGroup::zero()), a);
        assert_eq!(a.torsion(), &[BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn mod_p_dimensions() {
        assert_eq!(g(1, &[2]).dim_mod_p(2).unwrap(), 3);
        assert_eq!(g(5, &[]).dim_mod_p(7).unwrap(), 5);
        assert_eq!(g(0, &[4, 8]).dim_mod_p(2).unwrap(), 4);
        assert!(g(0, &[4]).dim_mod_p(4).is_err());
    }

    #[test]
    fn primary_round_trip() {
        let a = g(1, &[2, 12, 36]);
        let parts = a.primary_parts();
        assert_eq!(parts[&2], vec![2, 2, 1]);
        assert_eq!(parts[&3], vec![2, 1]);
        assert_eq!(FgAbelianGroup::from_primary_parts(1, &parts), a);
    }

    #[test]
    fn display() {
        assert_eq!(g(3, &[2]).to_string(), "Z^3 + Z/2");
        assert_eq!(FgAbelianGroup::zero().to_string(), "0");
    }
}
