use crate::chain::{anti_cone, homology, same_complex, ChainComplex, GradedMap, Grading, IntComplex};
use crate::error::{Error, Result};
use crate::exactlin::{invert_id_plus_nilpotent, LaurentPoly, Matrix, Ring};
use num_bigint::BigInt;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub(crate) fn next(i: usize) -> usize {
    (i + 1) % 3
}

pub(crate) fn prev(i: usize) -> usize {
    (i + 2) % 3
}

/// Data (C_i, f_i, g_i, H_i, F_i, G_i), i ∈ ℤ/3, with f_i : C_i → C_{i+1},
/// g_i, H_i : C_i → C_{i+2} and F_i, G_i : C_i → C_i.
#[derive(Clone, Debug)]
pub struct TriangleHypotheses<R: Ring> {
    pub c: [Arc<ChainComplex<R>>; 3],
    pub f: [GradedMap<R>; 3],
    pub g: [GradedMap<R>; 3],
    pub h: [GradedMap<R>; 3],
    pub big_f: [GradedMap<R>; 3],
    pub big_g: [GradedMap<R>; 3],
}

pub type IntTriangle = TriangleHypotheses<BigInt>;
pub type LaurentTriangle = TriangleHypotheses<LaurentPoly>;

fn check_ends<R: Ring>(
    name: &str,
    m: &GradedMap<R>,
    src: &Arc<ChainComplex<R>>,
    tgt: &Arc<ChainComplex<R>>,
) -> Result<()> {
    if !same_complex(m.source(), src) || !same_complex(m.target(), tgt) {
        return Err(Error::Shape(format!("{name} has the wrong source or target")));
    }
    Ok(())
}

impl<R: Ring> TriangleHypotheses<R> {
    pub fn new(
        c: [Arc<ChainComplex<R>>; 3],
        f: [GradedMap<R>; 3],
        g: [GradedMap<R>; 3],
        h: [GradedMap<R>; 3],
        big_f: [GradedMap<R>; 3],
        big_g: [GradedMap<R>; 3],
    ) -> Result<Self> {
        if c[1].grading() != c[0].grading() || c[2].grading() != c[0].grading() {
            return Err(Error::Grading("the three complexes have different gradings".into()));
        }
        for i in 0..3 {
            check_ends(&format!("f{i}"), &f[i], &c[i], &c[next(i)])?;
            check_ends(&format!("g{i}"), &g[i], &c[i], &c[prev(i)])?;
            check_ends(&format!("H{i}"), &h[i], &c[i], &c[prev(i)])?;
            check_ends(&format!("F{i}"), &big_f[i], &c[i], &c[i])?;
            check_ends(&format!("G{i}"), &big_g[i], &c[i], &c[i])?;
        }
        Ok(TriangleHypotheses { c, f, g, h, big_f, big_g })
    }

    /// Fills in g_i = f_{i+1}f_i − (∂H_i + H_i∂) and
    /// F_i = f_{i+2}H_i − H_{i+1}f_i + (∂G_i − G_i∂).
    pub fn complete(
        c: [Arc<ChainComplex<R>>; 3],
        f: [GradedMap<R>; 3],
        h: [GradedMap<R>; 3],
        big_g: [GradedMap<R>; 3],
    ) -> Result<Self> {
        let mut g = Vec::with_capacity(3);
        let mut big_f = Vec::with_capacity(3);
        for i in 0..3 {
            g.push(f[next(i)].compose(&f[i])?.sub(&h[i].boundary_residual(1))?);
            big_f.push(homotopy_term(&f, &h, i)?.add(&big_g[i].boundary_residual(-1))?);
        }
        let g: [GradedMap<R>; 3] = g.try_into().expect("three maps");
        let big_f: [GradedMap<R>; 3] = big_f.try_into().expect("three maps");
        Self::new(c, f, g, h, big_f, big_g)
    }

    pub fn grading(&self) -> Grading {
        self.c[0].grading()
    }

    /// Degrees (a₀, a₁, a₂) of the f_i.
    pub fn degrees(&self) -> [i64; 3] {
        [self.f[0].degree(), self.f[1].degree(), self.f[2].degree()]
    }

    /// Same data with every coefficient mapped through a ring homomorphism.
    pub fn map_ring<S: Ring>(&self, phi: impl Fn(&R) -> S + Copy) -> Result<TriangleHypotheses<S>> {
        let c: [Arc<ChainComplex<S>>; 3] =
            std::array::from_fn(|i| Arc::new(self.c[i].map_ring(phi)));
        let conv = |m: &GradedMap<R>, s: usize, t: usize| m.map_ring(c[s].clone(), c[t].clone(), phi);
        let f = std::array::from_fn(|i| conv(&self.f[i], i, next(i)));
        let g = std::array::from_fn(|i| conv(&self.g[i], i, prev(i)));
        let h = std::array::from_fn(|i| conv(&self.h[i], i, prev(i)));
        let big_f = std::array::from_fn(|i| conv(&self.big_f[i], i, i));
        let big_g = std::array::from_fn(|i| conv(&self.big_g[i], i, i));
        TriangleHypotheses::new(c.clone(), f, g, h, big_f, big_g)
    }
}

impl IntTriangle {
    pub fn to_laurent(&self) -> Result<LaurentTriangle> {
        self.map_ring(|x| LaurentPoly::constant(x.clone()))
    }
}

/// f_{i+2}H_i − H_{i+1}f_i.
pub(crate) fn homotopy_term<R: Ring>(
    f: &[GradedMap<R>; 3],
    h: &[GradedMap<R>; 3],
    i: usize,
) -> Result<GradedMap<R>> {
    f[prev(i)].compose(&h[i])?.sub(&h[next(i)].compose(&f[i])?)
}

/// The individual hypotheses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Check {
    /// ∂f_i − f_i∂ = 0
    ChainMap(usize),
    /// ∂H_i + H_i∂ = f_{i+1}f_i − g_i
    Homotopy(usize),
    /// ∂G_i − G_i∂ = F_i − (f_{i+2}H_i − H_{i+1}f_i)
    GEquation(usize),
    G1Zero,
    QuasiIso(usize),
}

impl Check {
    pub fn all() -> Vec<Check> {
        let mut v = Vec::new();
        for i in 0..3 {
            v.push(Check::ChainMap(i));
        }
        for i in 0..3 {
            v.push(Check::Homotopy(i));
        }
        for i in 0..3 {
            v.push(Check::GEquation(i));
        }
        v.push(Check::G1Zero);
        for i in 0..3 {
            v.push(Check::QuasiIso(i));
        }
        v
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Check::ChainMap(i) => write!(f, "chain_map[{i}]"),
            Check::Homotopy(i) => write!(f, "homotopy[{i}]"),
            Check::GEquation(i) => write!(f, "g_equation[{i}]"),
            Check::G1Zero => write!(f, "g1_zero"),
            Check::QuasiIso(i) => write!(f, "quasi_iso[{i}]"),
        }
    }
}

/// How "F_i is a quasi-isomorphism" is established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum QuasiIsoMode {
    /// F_i anti-commutes with ∂ and its cone is acyclic over ℤ.
    Cone,
    /// ±(−1)^g F_i = Id + N with N nilpotent, inverse checked exactly.
    Certificate,
    Skip,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub check: Check,
    pub passed: bool,
    pub detail: String,
    /// Nonzero residual blocks by source grade, entries rendered as strings.
    pub residual: BTreeMap<i64, Vec<Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub outcomes: Vec<CheckOutcome>,
}

impl HypothesisReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn failed(&self) -> Vec<Check> {
        self.outcomes.iter().filter(|o| !o.passed).map(|o| o.check).collect()
    }

    pub fn outcome(&self, check: Check) -> Option<&CheckOutcome> {
        self.outcomes.iter().find(|o| o.check == check)
    }

    /// Everything except the quasi-isomorphism checks passed.
    pub fn equations_hold(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed || matches!(o.check, Check::QuasiIso(_)))
    }
}

fn render<R: Ring>(m: &GradedMap<R>) -> BTreeMap<i64, Vec<Vec<String>>> {
    m.blocks()
        .iter()
        .map(|(g, b)| (*g, b.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()))
        .collect()
}

fn from_residual<R: Ring>(check: Check, r: Result<GradedMap<R>>) -> CheckOutcome {
    match r {
        Ok(m) if m.is_zero() => {
            CheckOutcome { check, passed: true, detail: "holds".into(), residual: BTreeMap::new() }
        }
        Ok(m) => CheckOutcome {
            check,
            passed: false,
            detail: "nonzero residual".into(),
            residual: render(&m),
        },
        Err(e) => CheckOutcome { check, passed: false, detail: e.to_string(), residual: BTreeMap::new() },
    }
}

fn quasi_iso_outcome<R: Ring>(i: usize, m: &GradedMap<R>, mode: QuasiIsoMode) -> CheckOutcome {
    let check = Check::QuasiIso(i);
    let fail = |detail: String| CheckOutcome { check, passed: false, detail, residual: BTreeMap::new() };
    if mode == QuasiIsoMode::Skip {
        return CheckOutcome { check, passed: true, detail: "skipped".into(), residual: BTreeMap::new() };
    }
    if !m.is_anti_chain_map() {
        return CheckOutcome {
            check,
            passed: false,
            detail: "not an anti-chain map".into(),
            residual: render(&m.boundary_residual(1)),
        };
    }
    match mode {
        QuasiIsoMode::Cone => match anti_cone(m).and_then(|c| homology(&*c.complex)) {
            Ok(h) if h.is_zero() => {
                CheckOutcome { check, passed: true, detail: "cone acyclic".into(), residual: BTreeMap::new() }
            }
            Ok(h) => fail(format!("cone has homology in grades {:?}", h.groups.keys().collect::<Vec<_>>())),
            Err(e) => fail(e.to_string()),
        },
        QuasiIsoMode::Certificate => match unipotent_certificate(m) {
            Ok(sign) => CheckOutcome {
                check,
                passed: true,
                detail: format!("{}(−1)^g F = Id + nilpotent", if sign > 0 { "" } else { "−" }),
                residual: BTreeMap::new(),
            },
            Err(e) => fail(e.to_string()),
        },
        QuasiIsoMode::Skip => unreachable!(),
    }
}

/// Finds ε ∈ {1, −1} with ε(−1)^g m − Id nilpotent in every grade, and checks
/// the resulting inverse exactly.
pub fn unipotent_certificate<R: Ring>(m: &GradedMap<R>) -> Result<i64> {
    if m.degree() != 0 || !same_complex(m.source(), m.target()) {
        return Err(Error::Invalid("certificate needs a degree 0 endomorphism".into()));
    }
    let twisted = m.parity_twist()?;
    'sign: for eps in [1i64, -1] {
        for g in m.source().grades() {
            let b = twisted.block(g).scale(&R::from_i64(eps));
            let n = b.sub(&Matrix::identity(b.rows()));
            match invert_id_plus_nilpotent(&n) {
                Ok(inv) if b.mul(&inv) == Matrix::identity(b.rows()) => {}
                _ => continue 'sign,
            }
        }
        return Ok(eps);
    }
    Err(Error::NotNilpotent)
}

/// Checks every hypothesis exactly and reports residuals.
pub fn verify_hypotheses<R: Ring>(h: &TriangleHypotheses<R>, mode: QuasiIsoMode) -> HypothesisReport {
    let mut outcomes = Vec::new();
    for i in 0..3 {
        outcomes.push(from_residual(Check::ChainMap(i), Ok(h.f[i].boundary_residual(-1))));
    }
    for i in 0..3 {
        let r = h.f[next(i)]
            .compose(&h.f[i])
            .and_then(|ff| ff.sub(&h.g[i]))
            .and_then(|rhs| h.h[i].boundary_residual(1).sub(&rhs));
        outcomes.push(from_residual(Check::Homotopy(i), r));
    }
    for i in 0..3 {
        let r = homotopy_term(&h.f, &h.h, i)
            .and_then(|t| h.big_f[i].sub(&t))
            .and_then(|rhs| h.big_g[i].boundary_residual(-1).sub(&rhs));
        outcomes.push(from_residual(Check::GEquation(i), r));
    }
    outcomes.push(from_residual(Check::G1Zero, Ok(h.g[1].clone())));
    for i in 0..3 {
        outcomes.push(quasi_iso_outcome(i, &h.big_f[i], mode));
    }
    HypothesisReport { outcomes }
}

/// Over ℤ, whether a degree 0 anti-chain map is a quasi-isomorphism.
pub fn is_anti_quasi_iso(m: &GradedMap<BigInt>) -> bool {
    m.is_anti_chain_map()
        && anti_cone(m).and_then(|c| homology(&*c.complex)).map(|h| h.is_zero()).unwrap_or(false)
}

pub(crate) fn int_complex_is_acyclic(c: &IntComplex) -> bool {
    homology(c).map(|h| h.is_zero()).unwrap_or(false)
}
