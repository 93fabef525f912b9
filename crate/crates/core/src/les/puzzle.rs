//! Exact triangles X →ψ Y →f₁ Z →f₂ X[·] of graded groups with one corner
//! unknown.

use super::family::{Component, Family};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slot {
    Known(Family),
    Unknown,
}

impl Slot {
    pub fn family(&self) -> Option<&Family> {
        match self {
            Slot::Known(f) => Some(f),
            Slot::Unknown => None,
        }
    }
}

/// Bounds on the free rank of the unknown corner in one grading.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankBound {
    pub grade: u32,
    pub lo: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hi: Option<usize>,
}

impl RankBound {
    pub fn exact(grade: u32, rank: usize) -> Self {
        RankBound { grade, lo: rank, hi: Some(rank) }
    }
}

/// Slots are ordered X, Y, Z with maps ψ: X → Y, f₁: Y → Z, f₂: Z → X and
/// `degrees = [deg ψ, deg f₁, deg f₂]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrianglePuzzle {
    pub modulus: u32,
    pub slots: [Slot; 3],
    pub degrees: [i64; 3],
    #[serde(default)]
    pub rank_bounds: Vec<RankBound>,
    /// Torsion of the unknown may only involve these primes (an axiom,
    /// not something the rules derive).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allowed_primes: Option<BTreeSet<u64>>,
}

impl TrianglePuzzle {
    /// Puzzle with X unknown.
    pub fn new(modulus: u32, y: Family, z: Family, degrees: [i64; 3]) -> Self {
        TrianglePuzzle {
            modulus,
            slots: [Slot::Unknown, Slot::Known(y), Slot::Known(z)],
            degrees,
            rank_bounds: Vec::new(),
            allowed_primes: None,
        }
    }

    pub fn with_rank(mut self, grade: u32, rank: usize) -> Self {
        self.rank_bounds.push(RankBound::exact(grade, rank));
        self
    }

    pub fn with_primes(mut self, primes: impl IntoIterator<Item = u64>) -> Self {
        self.allowed_primes = Some(primes.into_iter().collect());
        self
    }

    pub fn unknown_index(&self) -> Result<usize> {
        let u: Vec<usize> = (0..3).filter(|&i| self.slots[i] == Slot::Unknown).collect();
        match u.as_slice() {
            [i] => Ok(*i),
            [] => Err(Error::Puzzle("no unknown corner".into())),
            _ => Err(Error::Puzzle(format!("{} unknown corners, expected one", u.len()))),
        }
    }

    /// Rotates so that the unknown sits in slot X.
    pub fn normalized(&self) -> Result<TrianglePuzzle> {
        self.validate()?;
        let k = self.unknown_index()?;
        let mut out = self.clone();
        for i in 0..3 {
            out.slots[i] = self.slots[(i + k) % 3].clone();
            out.degrees[i] = self.degrees[(i + k) % 3];
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        if self.modulus == 0 {
            return Err(Error::Invalid("modulus must be positive".into()));
        }
        self.unknown_index()?;
        let m = self.modulus as i64;
        let s = self.degrees.iter().sum::<i64>().rem_euclid(m);
        if s != (m - 1) % m && s != 1 % m {
            return Err(Error::Parity(format!(
                "map degrees sum to {s} mod {m}, an exact triangle needs ±1"
            )));
        }
        for slot in &self.slots {
            if let Some(f) = slot.family() {
                if f.modulus != self.modulus {
                    return Err(Error::ModulusMismatch(f.modulus, self.modulus));
                }
            }
        }
        if let (Some(a), Some(b)) = (self.known(0), self.known(1)) {
            for v in a.var_names().intersection(&b.var_names()) {
                if a.vars.get(v) != b.vars.get(v) {
                    return Err(Error::Puzzle(format!("unknown {v} has different constraints in two corners")));
                }
            }
        }
        for b in &self.rank_bounds {
            if b.grade >= self.modulus || b.hi.is_some_and(|h| h < b.lo) {
                return Err(Error::Invalid(format!("bad rank bound {b:?}")));
            }
        }
        Ok(())
    }

    /// The two known corners in the order they appear after the unknown.
    fn known(&self, which: usize) -> Option<&Family> {
        let k = self.unknown_index().ok()?;
        self.slots[(k + 1 + which) % 3].family()
    }

    pub fn rank_bound(&self, g: u32) -> (usize, Option<usize>) {
        let mut lo = 0;
        let mut hi: Option<usize> = None;
        for b in self.rank_bounds.iter().filter(|b| b.grade == g) {
            lo = lo.max(b.lo);
            hi = match (hi, b.hi) {
                (Some(a), Some(c)) => Some(a.min(c)),
                (a, c) => a.or(c),
            };
        }
        (lo, hi)
    }
}

/// 0 → coker(f)[sub_shift] → X → ker(f)[quot_shift] → 0 where f is the map
/// between the two known corners and (M[s])_g = M_{g−s}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SesSchema {
    pub sub_shift: i64,
    pub quot_shift: i64,
    pub modulus: u32,
    /// Set when a known corner is zero and X is a shifted copy of the other.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iso: Option<IsoShape>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoShape {
    /// 1 when X ≅ Y-corner, 2 when X ≅ Z-corner (normalized positions).
    pub corner: usize,
    pub shift: i64,
    pub family: Family,
}

impl SesSchema {
    pub fn render(&self) -> String {
        format!(
            "0 -> coker(f){} -> X -> ker(f){} -> 0",
            shift_str(self.sub_shift, self.modulus),
            shift_str(self.quot_shift, self.modulus)
        )
    }
}

fn shift_str(s: i64, m: u32) -> String {
    let s = s.rem_euclid(m as i64);
    if s == 0 {
        String::new()
    } else {
        format!("[{s}]")
    }
}

fn shift_family(f: &Family, s: i64) -> Family {
    let m = f.modulus as i64;
    let mut out = f.clone();
    out.components = f
        .components
        .iter()
        .map(|(g, c)| (((*g as i64) + s).rem_euclid(m) as u32, c.clone()))
        .collect();
    out
}

fn is_zero_family(f: &Family) -> bool {
    f.components.values().all(Component::is_zero)
}

/// The SES the long exact sequence gives for the unknown corner.
pub fn split_les(p: &TrianglePuzzle) -> Result<SesSchema> {
    let n = p.normalized()?;
    let [dpsi, _, d2] = n.degrees;
    let mut schema = SesSchema { sub_shift: d2, quot_shift: -(dpsi), modulus: n.modulus, iso: None };
    let y = n.slots[1].family().expect("known");
    let z = n.slots[2].family().expect("known");
    if is_zero_family(y) {
        schema.iso = Some(IsoShape { corner: 2, shift: d2, family: shift_family(z, d2) });
    } else if is_zero_family(z) {
        schema.iso = Some(IsoShape { corner: 1, shift: -dpsi, family: shift_family(y, -dpsi) });
    }
    Ok(schema)
}
