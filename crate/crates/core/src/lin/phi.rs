use super::hypotheses::TriangleHypotheses;
use super::total::{build_total_unchecked, TotalComplex};
use crate::chain::{anti_cone, spectral_sequence, Cone, Filtration, GradedMap, IntComplex, SpectralSequence};
use crate::error::{Error, Result};
use crate::exactlin::{Field, Ring};
use num_bigint::BigInt;
use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct PhiConeDatum<R: Ring> {
    pub total: TotalComplex<R>,
    /// [[G₀, 0, 0], [H₀, −G₂, 0], [f₀, H₂, G₁]] on C₀ ⊕ C₂ ⊕ C₁.
    pub g_matrix: GradedMap<R>,
    pub phi: GradedMap<R>,
    /// M_φ = Ĉ ⊕ C with differential [[∂̂, φ], [0, ∂]].
    pub cone: Cone<R>,
}

impl<R: Ring> PhiConeDatum<R> {
    /// φ coincides with ∂G − G∂.
    pub fn phi_is_commutator(&self) -> bool {
        self.g_matrix.boundary_residual(-1) == self.phi
    }

    /// Filtration level of every basis element of M_φ: 0, 1, 2 for Ĉ₀, Ĉ₂, Ĉ₁
    /// and 3, 4, 5 for C₀, C₂, C₁.
    pub fn six_levels(&self) -> BTreeMap<i64, Vec<i64>> {
        let shift = self.cone.sum.shift(1);
        self.cone
            .complex
            .grades()
            .into_iter()
            .map(|n| {
                let mut lv: Vec<i64> = self.total.sum.owners(n).into_iter().map(|o| o as i64).collect();
                lv.extend(self.total.sum.owners(n - shift).into_iter().map(|o| 3 + o as i64));
                (n, lv)
            })
            .collect()
    }
}

/// φ with the printed sign placement:
/// [[F₀, −f₂G₂ − H₁H₂ − G₀f₂, −H₁G₁ + G₀H₁],
///  [g₀, F₂, f₁G₁ + H₀H₁ + G₂f₁],
///  [0, −g₂, F₁]].
pub fn build_phi_cone<R: Ring>(h: &TriangleHypotheses<R>) -> Result<PhiConeDatum<R>> {
    let total = build_total_unchecked(h)?;
    if !total.complex.verify_complex() {
        return Err(Error::NotComplex("total differential does not square to zero".into()));
    }
    let (f, hh, gg) = (&h.f, &h.h, &h.big_g);
    let g_deg = gg[0].degree();
    let g_matrix = total.sum.assemble_map(
        &total.sum,
        total.complex.clone(),
        total.complex.clone(),
        &[
            (0, 0, gg[0].clone()),
            (1, 0, hh[0].clone()),
            (1, 1, gg[2].neg()),
            (2, 0, f[0].clone()),
            (2, 1, hh[2].clone()),
            (2, 2, gg[1].clone()),
        ],
        g_deg,
    )?;
    let e01 = f[2]
        .compose(&gg[2])?
        .neg()
        .sub(&hh[1].compose(&hh[2])?)?
        .sub(&gg[0].compose(&f[2])?)?;
    let e02 = gg[0].compose(&hh[1])?.sub(&hh[1].compose(&gg[1])?)?;
    let e12 = f[1].compose(&gg[1])?.add(&hh[0].compose(&hh[1])?)?.add(&gg[2].compose(&f[1])?)?;
    let phi = total.sum.assemble_map(
        &total.sum,
        total.complex.clone(),
        total.complex.clone(),
        &[
            (0, 0, h.big_f[0].clone()),
            (0, 1, e01),
            (0, 2, e02),
            (1, 0, h.g[0].clone()),
            (1, 1, h.big_f[2].clone()),
            (1, 2, e12),
            (2, 1, h.g[2].neg()),
            (2, 2, h.big_f[1].clone()),
        ],
        g_deg - 1,
    )?;
    let cone = anti_cone(&phi)?;
    Ok(PhiConeDatum { total, g_matrix, phi, cone })
}

/// Page-by-page record of the spectral sequence of the six-column filtration.
#[derive(Clone, Debug, Serialize)]
pub struct SixStepTrace {
    pub prime: u64,
    /// E¹ has no differential from C₀ to Ĉ₁.
    pub e1_no_cross: bool,
    /// The E² maps induced by g₀ and −g₂ vanish.
    pub e2_g_vanish: bool,
    /// The E³ maps C_i → Ĉ_i are isomorphisms.
    pub e3_vertical_iso: bool,
    pub e4_zero: bool,
    pub abutment_ok: bool,
    /// (r, level, dimension) for every nonzero entry of the pages.
    pub page_dims: Vec<(usize, i64, usize)>,
    #[serde(skip)]
    pub ss: SpectralSequence,
}

impl SixStepTrace {
    pub fn collapsed(&self) -> bool {
        self.e4_zero && self.abutment_ok
    }

    /// Err with the failed stage when the collapse fails.
    pub fn into_result(self) -> Result<Self> {
        if self.collapsed() {
            Ok(self)
        } else {
            Err(Error::NonCollapse(format!(
                "over F_{}: E1 cross {}, E2 g-maps {}, E3 verticals {}, E4 zero {}",
                self.prime, self.e1_no_cross, self.e2_g_vanish, self.e3_vertical_iso, self.e4_zero
            )))
        }
    }
}

/// Spectral sequence of M_φ over F_p for the filtration Ĉ₀ ⊂ Ĉ₂ ⊂ Ĉ₁ ⊂ C₀ ⊂ C₂ ⊂ C₁.
pub fn run_six_step_ss(datum: &PhiConeDatum<BigInt>, p: u64) -> Result<SixStepTrace> {
    let field = Field::prime(p)?;
    let complex: Arc<IntComplex> = datum.cone.complex.clone();
    let filt = Filtration::new(complex, datum.six_levels())?;
    let ss = spectral_sequence(&filt, field)?;
    let page = |r: usize| ss.page(r).cloned();
    let e1_no_cross = page(1).is_none_or(|e| e.diff_rank(3) == 0);
    let e2_g_vanish = page(2).is_none_or(|e| e.diff_rank(3) == 0 && e.diff_rank(4) == 0);
    let e3_vertical_iso = page(3).is_none_or(|e| {
        (3..6).all(|s| {
            let d = e.level_dim(s);
            e.diff_rank(s) == d && e.level_dim(s - 3) == d
        })
    });
    let e4_zero = page(4).is_none_or(|e| e.is_zero());
    let mut page_dims = Vec::new();
    for pg in &ss.pages {
        for s in 0..6 {
            let d = pg.level_dim(s);
            if d > 0 {
                page_dims.push((pg.r, s, d));
            }
        }
    }
    Ok(SixStepTrace {
        prime: p,
        e1_no_cross,
        e2_g_vanish,
        e3_vertical_iso,
        e4_zero,
        abutment_ok: ss.abutment_ok,
        page_dims,
        ss,
    })
}

/// φ sends every cycle of the total complex to a boundary (it equals ∂G on
/// cycles). Checked on a ℤ-basis of the cycles.
pub fn phi_kills_homology(datum: &PhiConeDatum<BigInt>) -> bool {
    use crate::exactlin::smith_normal_form;
    let c = &datum.total.complex;
    c.grades().into_iter().all(|g| {
        let z = smith_normal_form(&c.diff(g)).kernel_basis();
        let image = datum.phi.block(g).mul(&z);
        let up = smith_normal_form(&c.diff(g + 1));
        (0..image.cols()).all(|j| {
            let col: Vec<BigInt> = (0..image.rows()).map(|i| image.get(i, j).clone()).collect();
            up.solve(&col).is_some()
        })
    })
}
