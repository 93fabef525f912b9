use super::ring::Ring;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Element of ℤ[T, T⁻¹]; exponent → nonzero coefficient.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: impl Into<BigInt>, exp: i64) -> Self {
        let mut p = LaurentPoly::default();
        p.add_term(exp, c.into());
        p
    }

    /// T^e
    pub fn t_pow(exp: i64) -> Self {
        Self::monomial(1, exp)
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, BigInt)>>(it: I) -> Self {
        let mut p = LaurentPoly::default();
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, exp: i64, c: BigInt) {
        if Zero::is_zero(&c) {
            return;
        }
        let slot = self.terms.entry(exp).or_insert_with(<BigInt as Zero>::zero);
        *slot += c;
        if Zero::is_zero(slot) {
            self.terms.remove(&exp);
        }
    }

    /// Terms in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        self.terms.get(&exp).cloned().unwrap_or_default()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| *e == 0)
    }

    /// Value at T = 1.
    pub fn eval_one(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Value in F_p at T = unit (unit must be nonzero mod p).
    pub fn eval_mod(&self, p: u64, unit: u64) -> u64 {
        let inv = mod_inverse(unit % p, p).expect("unit must be invertible mod p");
        let pb = BigInt::from(p);
        let mut acc: u64 = 0;
        for (e, c) in &self.terms {
            let base = if *e >= 0 { unit % p } else { inv };
            let tp = mod_pow(base, e.unsigned_abs(), p);
            let cm = c.mod_floor(&pb);
            let cm: u64 = cm.try_into().unwrap_or(0);
            acc = ((acc as u128 + (cm as u128 * tp as u128) % p as u128) % p as u128) as u64;
        }
        acc
    }

    /// Substitute T ↦ T⁻¹.
    pub fn bar(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, c)| (-e, c.clone())))
    }
}

pub(crate) fn mod_pow(b: u64, mut e: u64, p: u64) -> u64 {
    let mut r: u128 = 1 % p as u128;
    let mut bb = (b % p) as u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * bb % p as u128;
        }
        bb = bb * bb % p as u128;
        e >>= 1;
    }
    r as u64
}

pub(crate) fn mod_inverse(a: u64, p: u64) -> Option<u64> {
    if a.is_multiple_of(p) {
        return None;
    }
    let g = (a as i128).extended_gcd(&(p as i128));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(p as i128) as u64)
}

impl Ring for LaurentPoly {
    fn zero() -> Self {
        LaurentPoly::default()
    }
    fn one() -> Self {
        LaurentPoly::constant(1)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in &other.terms {
            r.add_term(*e, c.clone());
        }
        r
    }
    fn sub(&self, other: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in &other.terms {
            r.add_term(*e, -c);
        }
        r
    }
    fn mul(&self, other: &Self) -> Self {
        let mut r = LaurentPoly::default();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                r.add_term(e1 + e2, c1 * c2);
            }
        }
        r
    }
    fn neg(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, c)| (*e, -c)))
    }
    fn from_int(v: &BigInt) -> Self {
        LaurentPoly::constant(v.clone())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            let neg = c.is_negative();
            let a = if neg { -c } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match *e {
                0 => write!(f, "{a}")?,
                _ => {
                    if !a.is_one() {
                        write!(f, "{a}")?;
                    }
                    if *e == 1 {
                        write!(f, "T")?;
                    } else {
                        write!(f, "T^{e}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(terms.iter().map(|(e, c)| (*e, BigInt::from(*c))))
    }

    #[test]
    fn canonical_no_zero_terms() {
        let a = p(&[(1, 2), (1, -2), (0, 3)]);
        assert_eq!(a.terms().count(), 1);
        assert_eq!(a, LaurentPoly::constant(3));
    }

    #[test]
    fn eval_at_one() {
        assert_eq!(p(&[(1, 1), (-1, 1), (0, -1)]).eval_one(), BigInt::from(1));
        assert_eq!(p(&[(0, 1), (-1, -1)]).eval_one(), BigInt::from(0));
    }

    #[test]
    fn eval_mod_p_with_inverse() {
        // T + T^-1 at T = 2 mod 5: 2 + 3 = 0
        assert_eq!(p(&[(1, 1), (-1, 1)]).eval_mod(5, 2), 0);
        assert_eq!(p(&[(0, -1)]).eval_mod(7, 3), 6);
    }

    #[test]
    fn product_and_display() {
        let a = p(&[(1, 1), (0, 1)]);
        let b = p(&[(-1, 1), (0, -1)]);
        // (T+1)(T^-1 - 1) = T^-1 - T
        assert_eq!(a.mul(&b), p(&[(-1, 1), (1, -1)]));
        assert_eq!(format!("{}", p(&[(-1, 1), (0, -2), (2, 3)])), "T^-1 - 2 + 3T^2");
    }
}
