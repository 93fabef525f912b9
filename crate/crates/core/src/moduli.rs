//! Reducible ASD solutions as lattice points on spheres with rational
//! centre, their (k, l) charges and the ξ-twist pairing.
//!
//! The lattice is the diagonal negative definite form on H² with basis
//! e₁..eₙ, eᵢ·eᵢ = −1. A reducible splits as L ⊕ L^∨ and is determined by
//! the class c = α·PD[Σ] + D of its curvature, where D = Σ aᵢeᵢ plus, in the
//! shifted variant, ±½·PD[Σ₂]. Then κ = −c·c = Σ (aᵢ − cᵢ)².

use crate::error::{Error, Result};
use crate::rational::{self, q, qi, serde_q, serde_q_vec, show, Q};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// scale · Σ (aᵢ − cᵢ)² = target over aᵢ ∈ ℤ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeProblem {
    #[serde(with = "serde_q_vec")]
    pub offsets: Vec<Q>,
    #[serde(with = "serde_q")]
    pub target: Q,
    #[serde(with = "serde_q", default = "one")]
    pub scale: Q,
}

fn one() -> Q {
    Q::one()
}

impl LatticeProblem {
    pub fn new(offsets: Vec<Q>, target: Q) -> Self {
        LatticeProblem { offsets, target, scale: Q::one() }
    }

    pub fn dim(&self) -> usize {
        self.offsets.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.target.is_negative() {
            return Err(Error::Invalid(format!("negative target {}", show(&self.target))));
        }
        if !self.scale.is_positive() {
            return Err(Error::Invalid(format!("scale {} must be positive", show(&self.scale))));
        }
        Ok(())
    }

    /// Σ (aᵢ − cᵢ)² must equal this.
    pub fn radius_squared(&self) -> Q {
        &self.target / &self.scale
    }

    pub fn residual(&self, a: &[i64]) -> Q {
        let s: Q = a.iter().zip(&self.offsets).map(|(x, c)| {
            let d = qi(*x) - c;
            &d * &d
        }).sum();
        &self.scale * s - &self.target
    }
}

fn lcm_denoms<'a>(xs: impl Iterator<Item = &'a Q>) -> BigInt {
    xs.fold(BigInt::one(), |l, x| l.lcm(x.denom()))
}

/// Every integer point, in lexicographic order. Denominators are cleared
/// first: with L·cᵢ = Cᵢ and L²r = R integral, search Σ (L·aᵢ − Cᵢ)² = R
/// inside the box |aᵢ − cᵢ| ≤ √r.
pub fn enumerate_reducibles(p: &LatticeProblem) -> Result<Vec<Vec<i64>>> {
    p.validate()?;
    let r = p.radius_squared();
    let l = lcm_denoms(p.offsets.iter().chain(std::iter::once(&r)));
    let cs: Vec<BigInt> = p.offsets.iter().map(|c| (c * Q::from_integer(l.clone())).to_integer()).collect();
    let big_r = (&r * Q::from_integer(&l * &l)).to_integer();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(cs.len());
    search(&cs, &l, &big_r, &mut cur, &mut out)?;
    Ok(out)
}

fn search(cs: &[BigInt], l: &BigInt, rem: &BigInt, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) -> Result<()> {
    let i = cur.len();
    if i == cs.len() {
        if rem.is_zero() {
            out.push(cur.clone());
        }
        return Ok(());
    }
    // |L·a − C| ≤ ⌊√rem⌋
    let s = rem.sqrt();
    let lo = (&cs[i] - &s).div_ceil(l);
    let hi = (&cs[i] + &s).div_floor(l);
    let to_i64 = |x: &BigInt| i64::try_from(x).map_err(|_| Error::Invalid("lattice coordinate out of range".into()));
    let (lo, hi) = (to_i64(&lo)?, to_i64(&hi)?);
    for a in lo..=hi {
        let d = l * BigInt::from(a) - &cs[i];
        let next = rem - &d * &d;
        if next.is_negative() {
            continue;
        }
        cur.push(a);
        search(cs, l, &next, cur, out)?;
        cur.pop();
    }
    Ok(())
}

/// Which bundle the reducible lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftVariant {
    /// w₂ = 0 near the end, flat limit trivial.
    Trivial,
    /// w₂ = PD[Σ₂]; `sign` picks the integer lift ±½·PD[Σ₂].
    Shifted { sign: i8 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryLimit {
    Trivial,
    Nontrivial,
}

impl BoundaryLimit {
    pub fn other(self) -> Self {
        match self {
            BoundaryLimit::Trivial => BoundaryLimit::Nontrivial,
            BoundaryLimit::Nontrivial => BoundaryLimit::Trivial,
        }
    }
}

/// Curvature bookkeeping: PD[Σ] = Σ sᵢeᵢ, holonomy parameter α, and an
/// integer lift PD[Σ₂] = Σ wᵢeᵢ of w₂ for the shifted bundle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChargeModel {
    pub surface: Vec<i64>,
    #[serde(with = "serde_q")]
    pub alpha: Q,
    pub w2_lift: Vec<i64>,
}

impl ChargeModel {
    /// Two exceptional spheres, Σ₁ = −e₁ − e₂, traceless holonomy, Σ₂ = e₂ − e₁.
    pub fn blow_up_pair() -> Self {
        ChargeModel { surface: vec![-1, -1], alpha: q(1, 4), w2_lift: vec![-1, 1] }
    }

    pub fn dim(&self) -> usize {
        self.surface.len()
    }

    fn validate(&self) -> Result<()> {
        if self.w2_lift.len() != self.surface.len() {
            return Err(Error::Shape(format!("surface has {} coordinates, w2 lift {}", self.surface.len(), self.w2_lift.len())));
        }
        Ok(())
    }

    fn shift(&self, v: ShiftVariant) -> Result<Vec<Q>> {
        match v {
            ShiftVariant::Trivial => Ok(vec![Q::zero(); self.dim()]),
            ShiftVariant::Shifted { sign } if sign == 1 || sign == -1 => {
                Ok(self.w2_lift.iter().map(|w| q(*w * sign as i64, 2)).collect())
            }
            ShiftVariant::Shifted { sign } => Err(Error::Invalid(format!("lift sign must be ±1, got {sign}"))),
        }
    }

    /// cᵢ = −α sᵢ − shiftᵢ, so that the curvature coefficient is aᵢ − cᵢ.
    pub fn offsets(&self, v: ShiftVariant) -> Result<Vec<Q>> {
        self.validate()?;
        let sh = self.shift(v)?;
        Ok(self.surface.iter().zip(sh).map(|(s, h)| -(&self.alpha * qi(*s)) - h).collect())
    }

    /// The problem for energy κ, normalized as target = 2κ.
    pub fn problem(&self, v: ShiftVariant, kappa: &Q) -> Result<LatticeProblem> {
        Ok(LatticeProblem { offsets: self.offsets(v)?, target: qi(2) * kappa, scale: qi(2) })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducibleSolution {
    pub a: Vec<i64>,
    #[serde(with = "serde_q")]
    pub k: Q,
    #[serde(with = "serde_q")]
    pub l: Q,
    #[serde(with = "serde_q")]
    pub kappa: Q,
    pub variant: ShiftVariant,
    pub boundary_limit: BoundaryLimit,
}

/// Charges of the point `a`: with D = a + shift, k = −D·D and l = −D·Σ, so
/// κ = k + l/2 − α²Σ·Σ. Checks 2l ≡ ⟨w₂, Σ⟩ (mod 2) and 4k ≡ w₂² (mod 4).
pub fn assemble_charges(model: &ChargeModel, a: &[i64], v: ShiftVariant) -> Result<ReducibleSolution> {
    model.validate()?;
    if a.len() != model.dim() {
        return Err(Error::Shape(format!("point has {} coordinates, model {}", a.len(), model.dim())));
    }
    let sh = model.shift(v)?;
    let d: Vec<Q> = a.iter().zip(&sh).map(|(x, h)| qi(*x) + h).collect();
    // eᵢ·eⱼ = −δᵢⱼ
    let k: Q = d.iter().map(|x| x * x).sum();
    let l: Q = d.iter().zip(&model.surface).map(|(x, s)| x * qi(*s)).sum();
    let kappa: Q = d
        .iter()
        .zip(&model.surface)
        .map(|(x, s)| {
            let c = &model.alpha * qi(*s) + x;
            &c * &c
        })
        .sum();
    let (w2_sigma, w2_sq) = match v {
        ShiftVariant::Trivial => (0, 0),
        ShiftVariant::Shifted { .. } => (
            -model.w2_lift.iter().zip(&model.surface).map(|(w, s)| w * s).sum::<i64>(),
            -model.w2_lift.iter().map(|w| w * w).sum::<i64>(),
        ),
    };
    let two_l = rational::to_i64(&(qi(2) * &l)).ok_or_else(|| Error::Parity(format!("2l = {} is not an integer", show(&(qi(2) * &l)))))?;
    let four_k = rational::to_i64(&(qi(4) * &k)).ok_or_else(|| Error::Parity(format!("4k = {} is not an integer", show(&(qi(4) * &k)))))?;
    if (two_l - w2_sigma).rem_euclid(2) != 0 {
        return Err(Error::Parity(format!("2l = {two_l} but <w2, Sigma> = {w2_sigma} (mod 2)")));
    }
    if (four_k - w2_sq).rem_euclid(4) != 0 {
        return Err(Error::Parity(format!("4k = {four_k} but w2^2 = {w2_sq} (mod 4)")));
    }
    let sigma_sq: i64 = -model.surface.iter().map(|s| s * s).sum::<i64>();
    debug_assert_eq!(kappa, &k + &l / qi(2) - &model.alpha * &model.alpha * qi(sigma_sq));
    let boundary_limit = match v {
        ShiftVariant::Trivial => BoundaryLimit::Trivial,
        ShiftVariant::Shifted { .. } => BoundaryLimit::Nontrivial,
    };
    Ok(ReducibleSolution { a: a.to_vec(), k, l, kappa, variant: v, boundary_limit })
}

fn partner(v: ShiftVariant, lift_sign: i8) -> ShiftVariant {
    match v {
        ShiftVariant::Trivial => ShiftVariant::Shifted { sign: lift_sign },
        ShiftVariant::Shifted { .. } => ShiftVariant::Trivial,
    }
}

/// Tensoring with the nontrivial flat real line bundle: c ↦ −c on the
/// curvature class, which moves the point between the two bundles. The
/// shifted side uses the lift sign of `s` (or `lift_sign` when `s` is on
/// the trivial side).
pub fn xi_twist(model: &ChargeModel, s: &ReducibleSolution, lift_sign: i8) -> Result<ReducibleSolution> {
    let sign = match s.variant {
        ShiftVariant::Shifted { sign } => sign,
        ShiftVariant::Trivial => lift_sign,
    };
    let to = partner(s.variant, sign);
    let from_off = model.offsets(s.variant)?;
    let to_off = model.offsets(to)?;
    let mut a = Vec::with_capacity(s.a.len());
    for ((x, c0), c1) in s.a.iter().zip(&from_off).zip(&to_off) {
        let y = c0 + c1 - qi(*x);
        a.push(rational::to_i64(&y).ok_or_else(|| {
            Error::Invalid(format!("xi twist leaves the lattice: coordinate {}", show(&y)))
        })?);
    }
    assemble_charges(model, &a, to)
}

/// All reducibles of energy κ on both bundles, with the ξ-twist matching.
#[derive(Clone, Debug, Serialize)]
pub struct ReducibleCensus {
    pub trivial: Vec<ReducibleSolution>,
    pub shifted: Vec<ReducibleSolution>,
    /// (index into trivial, index into shifted).
    pub matching: Vec<(usize, usize)>,
    pub perfect: bool,
}

pub fn reducible_census(model: &ChargeModel, kappa: &Q, lift_sign: i8) -> Result<ReducibleCensus> {
    let mut sides = Vec::new();
    for v in [ShiftVariant::Trivial, ShiftVariant::Shifted { sign: lift_sign }] {
        let pts = enumerate_reducibles(&model.problem(v, kappa)?)?;
        sides.push(pts.iter().map(|a| assemble_charges(model, a, v)).collect::<Result<Vec<_>>>()?);
    }
    let shifted = sides.pop().expect("two sides");
    let trivial = sides.pop().expect("two sides");
    let mut matching = Vec::new();
    for (i, s) in trivial.iter().enumerate() {
        let t = xi_twist(model, s, lift_sign)?;
        if let Some(j) = shifted.iter().position(|x| *x == t) {
            matching.push((i, j));
        }
    }
    let perfect = trivial.len() == shifted.len() && matching.len() == trivial.len();
    Ok(ReducibleCensus { trivial, shifted, matching, perfect })
}
