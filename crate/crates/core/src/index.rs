//! Index arithmetic for the linearized anti-self-duality operator: the closed
//! and orbifold formula, gluing along flat limits, the ℝP³ cylinder lemma,
//! the S²×S¹ end bound and the charge scan.

use crate::error::{Error, Result};
use crate::rational::{self, in_lattice, q, qi, serde_q, serde_q_opt, show, Q};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

/// Topology of a closed pair (Z, Σ). The topological term may be given as
/// χ, σ or as b₁, b⁺ (connected Z); when both are present they must agree.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedPairTopology {
    #[serde(default)]
    pub chi: Option<i64>,
    #[serde(default)]
    pub sigma: Option<i64>,
    #[serde(default)]
    pub chi_surface: i64,
    #[serde(default)]
    pub self_intersection: i64,
    #[serde(default)]
    pub b1: Option<i64>,
    #[serde(default)]
    pub b_plus: Option<i64>,
}

impl ClosedPairTopology {
    pub fn from_chi_sigma(chi: i64, sigma: i64) -> Self {
        ClosedPairTopology { chi: Some(chi), sigma: Some(sigma), ..Default::default() }
    }

    pub fn from_betti(b1: i64, b_plus: i64) -> Self {
        ClosedPairTopology { b1: Some(b1), b_plus: Some(b_plus), ..Default::default() }
    }

    pub fn with_surface(mut self, chi_surface: i64, self_intersection: i64) -> Self {
        self.chi_surface = chi_surface;
        self.self_intersection = self_intersection;
        self
    }

    pub fn s2xs2() -> Self {
        ClosedPairTopology { chi: Some(4), sigma: Some(0), b1: Some(0), b_plus: Some(1), ..Default::default() }
    }

    /// S¹ × L(2,1), the closed-up ℝP³ cylinder.
    pub fn s1_x_rp3() -> Self {
        ClosedPairTopology { chi: Some(0), sigma: Some(0), b1: Some(1), b_plus: Some(0), ..Default::default() }
    }

    /// (3/2)(χ+σ), checked against 3(1 − b₁ + b⁺) when both are supplied.
    pub fn topological_term(&self) -> Result<Q> {
        let cs = match (self.chi, self.sigma) {
            (Some(c), Some(s)) => Some(q(3 * (c + s), 2)),
            (None, None) => None,
            _ => return Err(Error::Invalid("chi and sigma must be given together".into())),
        };
        let bb = match (self.b1, self.b_plus) {
            (Some(b1), Some(bp)) => Some(qi(3 * (1 - b1 + bp))),
            (None, None) => None,
            _ => return Err(Error::Invalid("b1 and b_plus must be given together".into())),
        };
        match (cs, bb) {
            (Some(a), Some(b)) if a != b => Err(Error::Inconsistent {
                rule: "topological_term".into(),
                detail: format!("(3/2)(chi+sigma) = {} but 3(1-b1+b+) = {}", show(&a), show(&b)),
            }),
            (Some(a), _) | (None, Some(a)) => Ok(a),
            (None, None) => Err(Error::Invalid("topology needs (chi, sigma) or (b1, b_plus)".into())),
        }
    }

    /// Disjoint union. Needs χ and σ on both sides since the b-form assumes
    /// a connected manifold.
    pub fn disjoint_union(&self, other: &Self) -> Result<Self> {
        let need = |t: &Self| -> Result<(i64, i64)> {
            match (t.chi, t.sigma) {
                (Some(c), Some(s)) => Ok((c, s)),
                _ => Err(Error::Invalid("disjoint union needs chi and sigma".into())),
            }
        };
        let (c1, s1) = need(self)?;
        let (c2, s2) = need(other)?;
        Ok(ClosedPairTopology {
            chi: Some(c1 + c2),
            sigma: Some(s1 + s2),
            chi_surface: self.chi_surface + other.chi_surface,
            self_intersection: self.self_intersection + other.self_intersection,
            b1: None,
            b_plus: None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexValue {
    #[serde(with = "serde_q")]
    pub value: Q,
    pub integral: bool,
}

impl IndexValue {
    pub fn as_i64(&self) -> Option<i64> {
        rational::to_i64(&self.value)
    }
}

/// 8κ − (3/2)(χ+σ) + χ(Σ) + ½Σ·Σ. The same formula holds with one cone
/// point on L(2,1) away from Σ and trivial bundle near it.
pub fn index_closed(t: &ClosedPairTopology, kappa: &Q) -> Result<IndexValue> {
    let value = qi(8) * kappa - t.topological_term()? + qi(t.chi_surface) + q(t.self_intersection, 2);
    Ok(IndexValue { integral: value.is_integer(), value })
}

/// The excision bookkeeping for one L(2,1) cone point: the capped manifold
/// plus the Thom space piece (H¹ = 0, h⁰ = h⁺ = 3, index −6), minus the
/// S²×S² term. Returns each summand and the total.
#[derive(Clone, Debug, Serialize)]
pub struct OrbifoldExcision {
    #[serde(with = "serde_q")]
    pub capped: Q,
    pub thom_piece: i64,
    pub s2xs2: i64,
    #[serde(with = "serde_q")]
    pub total: Q,
}

pub fn orbifold_excision(t: &ClosedPairTopology, kappa: &Q) -> Result<OrbifoldExcision> {
    let capped = index_closed(t, kappa)?.value;
    let thom_piece = 0 - 3 - 3;
    let s2xs2 = index_closed(&ClosedPairTopology::s2xs2(), &Q::zero())?
        .as_i64()
        .expect("integral");
    let total = &capped + qi(thom_piece) - qi(s2xs2);
    Ok(OrbifoldExcision { capped, thom_piece, s2xs2, total })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatLimit {
    pub name: String,
    pub h0: u32,
    pub h1: u32,
}

impl FlatLimit {
    pub fn new(name: &str, h0: u32, h1: u32) -> Result<Self> {
        let b = FlatLimit { name: name.to_string(), h0, h1 };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.h0 > 3 {
            return Err(Error::Invalid(format!("h0({}) = {} exceeds dim su(2) = 3", self.name, self.h0)));
        }
        Ok(())
    }

    pub fn h(&self) -> i64 {
        (self.h0 + self.h1) as i64
    }

    /// Central limit on ℝP³ or S³: stabilizer SU(2), H¹ = 0.
    pub fn central() -> Self {
        FlatLimit { name: "central".into(), h0: 3, h1: 0 }
    }

    /// Non-central point of the S²×S¹ character variety.
    pub fn non_central() -> Self {
        FlatLimit { name: "non_central".into(), h0: 1, h1: 1 }
    }

    /// The reducible on (S³, U): stabilized by U(1), H¹ = 0.
    pub fn unknot_reducible() -> Self {
        FlatLimit { name: "unknot_reducible".into(), h0: 1, h1: 0 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexConvention {
    /// Plain weighted index.
    #[default]
    Weighted,
    /// Ind⁺ = Ind − h⁰ of the limit on the glued end, for each input piece.
    WeightedPlus,
}

/// Ind(A₁ ∪ A₂) = Ind(A₁) + Ind(A₂) + h⁰(b) + h¹(b).
pub fn glue_index(i1: i64, i2: i64, b: &FlatLimit) -> i64 {
    i1 + i2 + b.h()
}

/// As [`glue_index`], with inputs read in the given convention. The output
/// is always the plain weighted index of the glued connection.
pub fn glue_index_with(conv: IndexConvention, i1: i64, i2: i64, b: &FlatLimit) -> i64 {
    match conv {
        IndexConvention::Weighted => glue_index(i1, i2, b),
        IndexConvention::WeightedPlus => glue_index(i1 + b.h0 as i64, i2 + b.h0 as i64, b),
    }
}

/// Index of a W-type cap (e.g. S¹×D³) whose double along the limit is a
/// closed manifold of index `closed`: 2·Ind + h(b) = closed.
pub fn cap_index(closed: i64, b: &FlatLimit) -> Result<i64> {
    let r = closed - b.h();
    if r % 2 != 0 {
        return Err(Error::Parity(format!("closed index {closed} minus h = {} is odd", b.h())));
    }
    Ok(r / 2)
}

/// A cited congruence used as an axiom.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Axiom {
    pub label: String,
    pub statement: String,
}

fn axiom(label: &str, statement: &str) -> Axiom {
    Axiom { label: label.into(), statement: statement.into() }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KappaIndex {
    #[serde(with = "serde_q")]
    pub kappa: Q,
    pub index: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Rp3Report {
    pub same_limits: bool,
    pub kappa_positive: bool,
    pub formula: String,
    pub axioms: Vec<Axiom>,
    /// Admissible (κ, Ind) pairs with κ ≤ the scan bound.
    pub admissible: Vec<KappaIndex>,
    pub min_index: Option<i64>,
    /// (modulus, residue) every admissible index satisfies.
    pub residue: (i64, i64),
    pub never_one: bool,
    pub gluing_chain: Vec<String>,
}

/// Admissible indices of an ASD connection on ℝ × L(2,1) with trivial
/// bundle, scanning κ ≤ `kappa_max`.
///
/// Equal limits α: gluing the ends gives Ind(A') = Ind(A) + h(α) with
/// h(α) = 3, and Ind(A') = 8κ on S¹×L(2,1), so Ind = 8κ − 3 with κ = −p₁/4,
/// p₁ ≡ 0 (mod 4). Unequal limits: capping to S²×S² with the w₂ described
/// gives Ind(A') = −2p₁ − 6 with p₁ ≡ 2 (mod 4), and Ind(A) = Ind(A') − 3.
pub fn rp3_cylinder_indices(same_limits: bool, kappa_positive: bool, kappa_max: u64) -> Rp3Report {
    let theta = FlatLimit::central();
    let mut admissible = Vec::new();
    let (formula, axioms, residue, gluing_chain);
    if same_limits {
        formula = "Ind = 8κ - 3, κ = -p1/4 ∈ Z≥0".to_string();
        axioms = vec![axiom("p1_0_mod_4", "p1(P') ≡ 0 (mod 4) for the closed-up bundle on S^1 x L(2,1)")];
        let start = if kappa_positive { 1 } else { 0 };
        for m in start..=kappa_max as i64 {
            let closed = index_closed(&ClosedPairTopology::s1_x_rp3(), &qi(m)).expect("consistent").as_i64().expect("integral");
            admissible.push(KappaIndex { kappa: qi(m), index: closed - theta.h() });
        }
        residue = (8, 5);
        gluing_chain = vec![format!("Ind(A') = Ind(A) + h0 + h1 = Ind(A) + {}", theta.h()), "Ind(A') = 8κ(A) - 3(1-1+0)".into()];
    } else {
        formula = "Ind = -2 p1 - 9 = 8κ - 9, κ = -p1/4 ∈ 1/2 + Z≥0".to_string();
        axioms = vec![axiom("p1_2_mod_4", "p1(P') ≡ 2 (mod 4) on S^2 x S^2 with w2 dual to S^2 x * + * x S^2")];
        // κ > 0 holds automatically here.
        let mut j = 0i64;
        loop {
            let p1 = -2 - 4 * j;
            let kappa = q(-p1, 4);
            if kappa > qi(kappa_max as i64) {
                break;
            }
            let closed = index_closed(&ClosedPairTopology::s2xs2(), &kappa).expect("consistent").as_i64().expect("integral");
            debug_assert_eq!(closed, -2 * p1 - 6);
            admissible.push(KappaIndex { kappa, index: closed - 3 });
            j += 1;
        }
        residue = (8, 3);
        let caps = glue_caps_total();
        gluing_chain = vec![
            format!("Ind(A') = Ind(A) + (-3-3) + (-3) + 3 + 3 + 0 + 0 = Ind(A) {caps:+}"),
            "Ind(A') = 8κ(A') - 3(1-0+1) = -2 p1 - 6".into(),
            "Ind(A) = Ind(A') - 3 = -2 p1 - 9".into(),
        ];
    }
    let min_index = admissible.iter().map(|e| e.index).min();
    let never_one = admissible.iter().all(|e| e.index != 1);
    debug_assert!(admissible.iter().all(|e| e.index.rem_euclid(residue.0) == residue.1));
    Rp3Report { same_limits, kappa_positive, formula, axioms, admissible, min_index, residue, never_one, gluing_chain }
}

/// Net change from capping both ends of the unequal-limit cylinder:
/// cap indices −6 and −3 glued along θ₋ and θ₊ (h⁰ = 3, h¹ = 0 each).
pub fn glue_caps_total() -> i64 {
    let theta = FlatLimit::central();
    let with_minus = glue_index(0, -3 - 3, &theta);
    glue_index(with_minus, -3, &theta)
}

#[derive(Clone, Debug, Serialize)]
pub struct BreakingBound {
    pub flat: bool,
    /// c in 8κ = Ind + c.
    pub offset: i64,
    pub relation: String,
    #[serde(with = "serde_q")]
    pub kappa: Q,
    pub index: i64,
    /// Lower bound on Ind over the admissible κ for this case.
    pub bound: i64,
    pub axioms: Vec<Axiom>,
}

/// 8κ = Ind(A₋) + h(ρ) + Ind(A) + h(ρ) + Ind(A₊) for A on ℝ × S²×S¹ capped
/// by S¹×D³ at both ends, limits at `limit`, caps of index `cap`.
pub fn s2xs1_offset(limit: &FlatLimit, cap: i64) -> i64 {
    2 * (cap + limit.h())
}

/// The S²×S¹ end: non-central limits (h⁰ = h¹ = 1) and caps of index −1
/// give 8κ = Ind + 2. Flat means κ = 0; otherwise κ ∈ ℤ≥1.
pub fn s2xs1_breaking_bound(flat: bool) -> BreakingBound {
    let offset = s2xs1_offset(&FlatLimit::non_central(), -1);
    let kappa = if flat { Q::zero() } else { qi(1) };
    let index = rational::to_i64(&(qi(8) * &kappa)).expect("integral") - offset;
    BreakingBound {
        flat,
        offset,
        relation: format!("8κ = Ind {offset:+}"),
        kappa,
        index,
        bound: index,
        axioms: vec![axiom("kappa_integral", "κ ∈ Z≥0 for the closed-up bundle over S^1 x S^2 x S^1")],
    }
}

/// A W-type moduli problem with expected dimension fixed: Ind + h⁰(ρ) does
/// not depend on the limit ρ, so moving ρ from `generic` to `special`
/// shifts the index by h⁰(generic) − h⁰(special).
pub fn limit_shifted_index(generic_index: i64, generic: &FlatLimit, special: &FlatLimit) -> i64 {
    generic_index + generic.h0 as i64 - special.h0 as i64
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChargePoint {
    #[serde(with = "serde_q")]
    pub k0: Q,
    #[serde(with = "serde_q")]
    pub l0: Q,
    #[serde(with = "serde_q")]
    pub kappa: Q,
    pub index: i64,
}

/// Charge pairs (k₀, l₀) ∈ ¼ℤ × ½ℤ with |k₀|, |l₀| ≤ `bound` and
/// κ = k₀ + l₀/2 + 1/8 ≥ 0, with Ind = 8κ − 3 + 2 − 1 = 8k₀ + 4l₀ − 1.
/// Sorted by index, then k₀, then l₀.
pub fn charge_index_scan(bound: &Q) -> Result<Vec<ChargePoint>> {
    if bound.is_negative() {
        return Err(Error::Invalid(format!("negative bound {}", show(bound))));
    }
    let kmax = rational::floor_i64(&(bound * qi(4)));
    let lmax = rational::floor_i64(&(bound * qi(2)));
    let mut out = Vec::new();
    for a in -kmax..=kmax {
        for b in -lmax..=lmax {
            let (k0, l0) = (q(a, 4), q(b, 2));
            let kappa = &k0 + &l0 / qi(2) + q(1, 8);
            if kappa.is_negative() {
                continue;
            }
            let index = charge_index(&k0, &l0)?;
            debug_assert_eq!(qi(index), qi(8) * &kappa - qi(3) + qi(2) - qi(1));
            out.push(ChargePoint { k0, l0, kappa, index });
        }
    }
    out.sort_by(|x, y| (x.index, &x.k0, &x.l0).cmp(&(y.index, &y.k0, &y.l0)));
    Ok(out)
}

/// 8k₀ + 4l₀ − 1, requiring k₀ ∈ ¼ℤ and l₀ ∈ ½ℤ.
pub fn charge_index(k0: &Q, l0: &Q) -> Result<i64> {
    if !in_lattice(k0, 4) || !in_lattice(l0, 2) {
        return Err(Error::Invalid(format!("k0 = {} must lie in Z/4 and l0 = {} in Z/2", show(k0), show(l0))));
    }
    Ok(rational::to_i64(&(qi(8) * k0 + qi(4) * l0 - qi(1))).expect("integral"))
}

/// Energy and charge data attached to a connection.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnergyData {
    #[serde(with = "serde_q")]
    pub kappa: Q,
    #[serde(default, with = "serde_q_opt", skip_serializing_if = "Option::is_none")]
    pub k: Option<Q>,
    #[serde(default, with = "serde_q_opt", skip_serializing_if = "Option::is_none")]
    pub l: Option<Q>,
    #[serde(default, with = "serde_q_opt", skip_serializing_if = "Option::is_none")]
    pub k0: Option<Q>,
    #[serde(default, with = "serde_q_opt", skip_serializing_if = "Option::is_none")]
    pub l0: Option<Q>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p1: Option<i64>,
}

impl EnergyData {
    pub fn validate(&self) -> Result<()> {
        for (name, x, d) in [("k", &self.k, 4), ("l", &self.l, 2), ("k0", &self.k0, 4), ("l0", &self.l0, 2)] {
            if let Some(x) = x {
                if !in_lattice(x, d) {
                    return Err(Error::Invalid(format!("{name} = {} is not in Z/{d}", show(x))));
                }
            }
        }
        if let Some(p1) = self.p1 {
            if self.kappa != q(-p1, 4) {
                return Err(Error::Inconsistent {
                    rule: "kappa_p1".into(),
                    detail: format!("kappa = {} but -p1/4 = {}", show(&self.kappa), show(&q(-p1, 4))),
                });
            }
        }
        Ok(())
    }
}

/// Checks a dimension formula −3(1 − b₁ + b⁺) + χ(S) + ½S·S, rejecting
/// non-integral right-hand sides.
pub fn dimension_term(b1: i64, b_plus: i64, chi_surface: i64, self_intersection: i64) -> Result<i64> {
    let v = qi(-3 * (1 - b1 + b_plus) + chi_surface) + q(self_intersection, 2);
    rational::to_i64(&v).ok_or_else(|| Error::Invalid(format!("dimension term {} is not an integer", show(&v))))
}
