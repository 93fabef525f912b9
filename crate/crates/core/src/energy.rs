//! Energy-ordered bases and the Π-algebra certificate over ℤ[T, T⁻¹].
//!
//! Everything here lives on one free chain group C with differential ∂. A
//! homotopy X ≃ Y is witnessed by K with X − Y = ∂K + K∂.

use crate::error::{Error, Result};
use crate::exactlin::{invert_id_plus_nilpotent, is_nilpotent_upper, BlockOrder, LaurentMatrix, LaurentPoly, Ring};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Generators with a ℤ/4 grading and a total order inside each grading.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderedBasis {
    pub labels: Vec<String>,
    pub grading: Vec<u8>,
    /// All indices from lowest to highest energy.
    pub order: Vec<usize>,
}

impl OrderedBasis {
    pub fn new(labels: Vec<String>, grading: Vec<u8>, order: Vec<usize>) -> Result<Self> {
        let b = OrderedBasis { labels, grading, order };
        b.validate()?;
        Ok(b)
    }

    /// Labels g0, g1, ... in index order.
    pub fn indexed(grading: Vec<u8>) -> Result<Self> {
        let n = grading.len();
        Self::new((0..n).map(|i| format!("g{i}")).collect(), grading, (0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.grading.len() != self.labels.len() {
            return Err(Error::Shape(format!("{} labels but {} gradings", self.labels.len(), self.grading.len())));
        }
        if let Some(g) = self.grading.iter().find(|g| **g >= 4) {
            return Err(Error::Invalid(format!("grading {g} is not in Z/4")));
        }
        self.block_order().positions()?;
        Ok(())
    }

    pub fn block_order(&self) -> BlockOrder {
        BlockOrder { class: self.grading.iter().map(|g| *g as i64).collect(), order: self.order.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderViolation {
    pub row: usize,
    pub col: usize,
    pub row_label: String,
    pub col_label: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderCheck {
    pub ok: bool,
    pub strict: bool,
    pub violation: Option<OrderViolation>,
}

/// Entry (i, j) may be nonzero only when i, j share a grading and i comes
/// before j (or i = j when not strict).
pub fn check_energy_ordered(l: &LaurentMatrix, basis: &OrderedBasis, strict: bool) -> Result<OrderCheck> {
    basis.validate()?;
    if l.rows() != basis.len() || l.cols() != basis.len() {
        return Err(Error::Shape(format!("{}x{} matrix on a basis of size {}", l.rows(), l.cols(), basis.len())));
    }
    let pos = basis.block_order().positions()?;
    for (i, j) in l.nonzero_positions() {
        let reason = if basis.grading[i] != basis.grading[j] {
            Some(format!("mixes gradings {} and {}", basis.grading[i], basis.grading[j]))
        } else if pos[i] > pos[j] {
            Some("below the order".to_string())
        } else if strict && i == j {
            Some("nonzero diagonal".to_string())
        } else {
            None
        };
        if let Some(reason) = reason {
            let violation = OrderViolation {
                row: i,
                col: j,
                row_label: basis.labels[i].clone(),
                col_label: basis.labels[j].clone(),
                reason,
            };
            return Ok(OrderCheck { ok: false, strict, violation: Some(violation) });
        }
    }
    Ok(OrderCheck { ok: true, strict, violation: None })
}

/// Π± and N± on C with witnesses for
/// Π₊² ≃ Π₊ − N₊, Π₋² ≃ Π₋ − N₋ and Π₊ + Π₋ ≃ Id.
#[derive(Clone, Debug, PartialEq)]
pub struct PiAlgebraDatum {
    pub basis: OrderedBasis,
    pub d: LaurentMatrix,
    pub pi_plus: LaurentMatrix,
    pub pi_minus: LaurentMatrix,
    pub n_plus: LaurentMatrix,
    pub n_minus: LaurentMatrix,
    pub k_plus: LaurentMatrix,
    pub k_minus: LaurentMatrix,
    pub k_sum: LaurentMatrix,
}

fn t(e: i64) -> LaurentPoly {
    LaurentPoly::t_pow(e)
}

fn bracket(d: &LaurentMatrix, k: &LaurentMatrix) -> LaurentMatrix {
    d.mul(k).add(&k.mul(d))
}

/// One homotopy X ≃ Y with its witness, replayable as X − Y = ∂K + K∂.
#[derive(Clone, Debug, PartialEq)]
pub struct HomotopyStep {
    pub name: String,
    pub lhs: LaurentMatrix,
    pub rhs: LaurentMatrix,
    pub witness: LaurentMatrix,
}

impl HomotopyStep {
    pub fn residual(&self, d: &LaurentMatrix) -> LaurentMatrix {
        self.lhs.sub(&self.rhs).sub(&bracket(d, &self.witness))
    }
}

fn relation(d: &LaurentMatrix, name: &str, lhs: LaurentMatrix, rhs: LaurentMatrix, witness: LaurentMatrix) -> Result<HomotopyStep> {
    let s = HomotopyStep { name: name.into(), lhs, rhs, witness };
    let r = s.residual(d);
    if !r.is_zero() {
        return Err(Error::RelationFailed { name: name.into(), detail: format!("residual {r}") });
    }
    Ok(s)
}

fn commutes(d: &LaurentMatrix, x: &LaurentMatrix, name: &str) -> Result<()> {
    let r = d.mul(x).sub(&x.mul(d));
    if !r.is_zero() {
        return Err(Error::RelationFailed { name: format!("{name} chain map"), detail: format!("residual {r}") });
    }
    Ok(())
}

impl PiAlgebraDatum {
    /// Shape, ∂² = 0, chain maps, strict order of N±, and the three
    /// witnessed relations.
    pub fn check(&self) -> Result<Vec<HomotopyStep>> {
        self.basis.validate()?;
        let n = self.basis.len();
        for (name, m) in [
            ("d", &self.d),
            ("pi_plus", &self.pi_plus),
            ("pi_minus", &self.pi_minus),
            ("n_plus", &self.n_plus),
            ("n_minus", &self.n_minus),
            ("k_plus", &self.k_plus),
            ("k_minus", &self.k_minus),
            ("k_sum", &self.k_sum),
        ] {
            if m.shape() != (n, n) {
                return Err(Error::Shape(format!("{name} is {:?}, basis has {n} elements", m.shape())));
            }
        }
        if !self.d.mul(&self.d).is_zero() {
            return Err(Error::NotComplex("d^2 != 0".into()));
        }
        commutes(&self.d, &self.pi_plus, "pi_plus")?;
        commutes(&self.d, &self.pi_minus, "pi_minus")?;
        for (name, m) in [("n_plus", &self.n_plus), ("n_minus", &self.n_minus)] {
            let c = check_energy_ordered(m, &self.basis, true)?;
            if let Some(v) = c.violation {
                return Err(Error::InvalidOrder(format!("{name} entry ({}, {}) {}", v.row_label, v.col_label, v.reason)));
            }
        }
        let d = &self.d;
        let id = LaurentMatrix::identity(n);
        Ok(vec![
            relation(d, "pi_plus^2 ~ pi_plus - n_plus", self.pi_plus.mul(&self.pi_plus), self.pi_plus.sub(&self.n_plus), self.k_plus.clone())?,
            relation(d, "pi_minus^2 ~ pi_minus - n_minus", self.pi_minus.mul(&self.pi_minus), self.pi_minus.sub(&self.n_minus), self.k_minus.clone())?,
            relation(d, "pi_plus + pi_minus ~ id", self.pi_plus.add(&self.pi_minus), id, self.k_sum.clone())?,
        ])
    }

    /// Π₊ + T⁻¹Π₋.
    pub fn combination(&self) -> LaurentMatrix {
        self.pi_plus.add(&self.pi_minus.scale(&t(-1)))
    }

    /// Π₊ + TΠ₋.
    pub fn conjugate_combination(&self) -> LaurentMatrix {
        self.pi_plus.add(&self.pi_minus.scale(&t(1)))
    }

    /// N = −N₋ + N₊(T + T⁻¹ − 1).
    pub fn n(&self) -> LaurentMatrix {
        let c = t(1).add(&t(-1)).sub(&LaurentPoly::one());
        self.n_plus.scale(&c).sub(&self.n_minus)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PiCertificate {
    pub n: LaurentMatrix,
    pub exponent: usize,
    pub inverse: LaurentMatrix,
    /// Witnessed relations followed by the derived steps, ending in
    /// (Π₊ + T⁻¹Π₋)(Π₊ + TΠ₋) ≃ Id + N.
    pub log: Vec<HomotopyStep>,
    pub total_witness: LaurentMatrix,
}

impl PiCertificate {
    /// Re-checks every logged step, the composite and (Id + N)·inverse = Id.
    pub fn replay(&self, datum: &PiAlgebraDatum) -> Result<()> {
        let d = &datum.d;
        for s in &self.log {
            let r = s.residual(d);
            if !r.is_zero() {
                return Err(Error::RelationFailed { name: s.name.clone(), detail: format!("residual {r}") });
            }
        }
        let n = datum.basis.len();
        let id = LaurentMatrix::identity(n);
        let product = datum.combination().mul(&datum.conjugate_combination());
        relation(d, "composite", product.clone(), id.add(&self.n), self.total_witness.clone())?;
        if id.add(&self.n).mul(&self.inverse) != id {
            return Err(Error::RelationFailed { name: "inverse".into(), detail: "(Id + N) * inverse != Id".into() });
        }
        commutes(d, &self.inverse, "inverse")?;
        // P·Q·inverse − Id = (∂K + K∂)·inverse = ∂(K·inverse) + (K·inverse)∂
        relation(d, "composite * inverse ~ id", product.mul(&self.inverse), id, self.total_witness.mul(&self.inverse))?;
        Ok(())
    }

    /// N(1) and the inverse at T = 1.
    pub fn at_one(&self) -> (crate::exactlin::IntMatrix, crate::exactlin::IntMatrix) {
        (self.n.eval_one(), self.inverse.eval_one())
    }
}

/// Combines the witnessed relations into (Π₊ + T⁻¹Π₋)(Π₊ + TΠ₋) ≃ Id + N,
/// checks N is nilpotent in the basis order and inverts Id + N.
pub fn pi_combination_certificate(datum: &PiAlgebraDatum) -> Result<PiCertificate> {
    let mut log = datum.check()?;
    let d = &datum.d;
    let (pp, pm) = (&datum.pi_plus, &datum.pi_minus);
    let np = &datum.n_plus;
    let (kp, km, ks) = (&datum.k_plus, &datum.k_minus, &datum.k_sum);

    let pp_pm = pp.mul(pm);
    let pm_pp = pm.mul(pp);
    log.push(relation(d, "pi_plus pi_minus ~ n_plus", pp_pm.clone(), np.clone(), pp.mul(ks).sub(kp))?);
    log.push(relation(d, "pi_minus pi_plus ~ n_plus", pm_pp.clone(), np.clone(), ks.mul(pp).sub(kp))?);

    let n = datum.n();
    let total = kp
        .add(km)
        .add(&pp.mul(ks).sub(kp).scale(&t(1)))
        .add(&ks.mul(pp).sub(kp).scale(&t(-1)))
        .add(ks);
    let id = LaurentMatrix::identity(datum.basis.len());
    let product = datum.combination().mul(&datum.conjugate_combination());
    log.push(relation(d, "composite ~ id + N", product, id.add(&n), total.clone())?);

    let w = is_nilpotent_upper(&n, &datum.basis.block_order())?;
    let exponent = match (w.upper, w.exponent) {
        (true, Some(k)) => k,
        _ => return Err(Error::NotNilpotent),
    };
    let inverse = invert_id_plus_nilpotent(&n)?;
    let cert = PiCertificate { n, exponent, inverse, log, total_witness: total };
    cert.replay(datum)?;
    Ok(cert)
}

fn random_poly(rng: &mut ChaCha8Rng, bound: i64) -> LaurentPoly {
    let terms = rng.gen_range(1..=2);
    LaurentPoly::from_terms((0..terms).map(|_| {
        let c = rng.gen_range(1..=bound) * if rng.gen() { 1 } else { -1 };
        (rng.gen_range(-1..=1), c.into())
    }))
}

/// A seeded datum on C = V ⊕ E: V has ∂ = 0 and carries Π₊ = P + M with P a
/// 0/1 diagonal and M strictly upper in the order, N₊ = Π₊ − Π₊², and
/// Π₋ = Id − Π₊ on V, Id on the contractible E. Both Π± are then moved by
/// random null-homotopic terms and the witnesses are updated to match.
pub fn generate_pi_datum(seed: u64, v_dim: usize, e_pairs: usize) -> Result<PiAlgebraDatum> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = v_dim + 2 * e_pairs;
    let mut grading: Vec<u8> = (0..v_dim).map(|_| 2 * rng.gen_range(0..2)).collect();
    for _ in 0..e_pairs {
        let g: u8 = rng.gen_range(0..4);
        grading.push(g);
        grading.push((g + 3) % 4);
    }
    let basis = OrderedBasis::indexed(grading.clone())?;

    let mut d = LaurentMatrix::zeros(n, n);
    for j in 0..e_pairs {
        let (x, y) = (v_dim + 2 * j, v_dim + 2 * j + 1);
        d.set(y, x, LaurentPoly::one());
    }

    // P is constant on each grading class, so M survives in Π₊ − Π₊².
    let idempotent: [bool; 4] = [rng.gen(), rng.gen(), rng.gen(), rng.gen()];
    let mut pi_plus = LaurentMatrix::zeros(n, n);
    for i in 0..v_dim {
        if idempotent[grading[i] as usize] {
            pi_plus.set(i, i, LaurentPoly::one());
        }
        for j in i + 1..v_dim {
            if grading[i] == grading[j] && rng.gen_bool(0.8) {
                pi_plus.set(i, j, random_poly(&mut rng, 2));
            }
        }
    }
    let n_plus = pi_plus.sub(&pi_plus.mul(&pi_plus));
    let mut pi_minus = LaurentMatrix::identity(n).sub(&pi_plus);
    let n_minus = pi_minus.sub(&pi_minus.mul(&pi_minus));
    let mut k_plus = LaurentMatrix::zeros(n, n);
    let mut k_minus = LaurentMatrix::zeros(n, n);
    let mut k_sum = LaurentMatrix::zeros(n, n);

    if e_pairs > 0 {
        // Homotopies supported on E so that V keeps the strict order of N±.
        let perturb = |pi: &mut LaurentMatrix, k_rel: &mut LaurentMatrix, rng: &mut ChaCha8Rng| {
            let mut k = LaurentMatrix::zeros(n, n);
            for i in v_dim..n {
                for j in v_dim..n {
                    if rng.gen_bool(0.4) {
                        k.set(i, j, random_poly(rng, 2));
                    }
                }
            }
            let h = bracket(&d, &k);
            // (Π + H)² − (Π + H) + N = ∂W + W∂, W = ΠK + KΠ + KH − K
            let w = pi.mul(&k).add(&k.mul(pi)).add(&k.mul(&h)).sub(&k);
            *pi = pi.add(&h);
            *k_rel = k_rel.add(&w);
            k
        };
        let k1 = perturb(&mut pi_plus, &mut k_plus, &mut rng);
        let k2 = perturb(&mut pi_minus, &mut k_minus, &mut rng);
        k_sum = k1.add(&k2);
    }
    Ok(PiAlgebraDatum { basis, d, pi_plus, pi_minus, n_plus, n_minus, k_plus, k_minus, k_sum })
}
