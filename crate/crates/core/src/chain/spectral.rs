//! Spectral sequence of an increasing filtration over a field.
//!
//! With F_s spanned by basis vectors of level ≤ s and
//! Z^r_s = {x ∈ F_s : ∂x ∈ F_{s−r}}, the pages are
//! E^r_s = Z^r_s / (Z^{r−1}_{s−1} + ∂Z^{r−1}_{s+r−1}) and
//! rank(d_r out of E^r_s) = dim Z^r_s − dim(Z^{r+1}_s + Z^{r−1}_{s−1}).

use super::complex::IntComplex;
use super::homology::homology_dims;
use crate::error::{Error, Result};
use crate::exactlin::field::{apply, nullspace, reduce, span_dim, FieldOps, PrimeField, RationalField};
use crate::exactlin::Field;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Filtration level of every basis element, per grade.
#[derive(Clone, Debug, PartialEq)]
pub struct Filtration {
    pub complex: Arc<IntComplex>,
    pub levels: BTreeMap<i64, Vec<i64>>,
}

impl Filtration {
    /// Checks lengths and that ∂ never raises the level.
    pub fn new(complex: Arc<IntComplex>, levels: BTreeMap<i64, Vec<i64>>) -> Result<Self> {
        let gr = complex.grading();
        let levels: BTreeMap<i64, Vec<i64>> =
            levels.into_iter().map(|(g, l)| (gr.norm(g), l)).collect();
        let f = Filtration { complex, levels };
        for g in f.complex.grades() {
            if f.level_vec(g).len() != f.complex.rank(g) {
                return Err(Error::Filtration(format!("grade {g}: level list has wrong length")));
            }
        }
        for g in f.complex.grades() {
            let d = f.complex.diff(g);
            let (src, tgt) = (f.level_vec(g), f.level_vec(g - 1));
            for (i, j) in d.nonzero_positions() {
                if tgt[i] > src[j] {
                    return Err(Error::Filtration(format!(
                        "differential raises level at grade {g} ({} → {})",
                        src[j], tgt[i]
                    )));
                }
            }
        }
        Ok(f)
    }

    /// Single level 0 for everything.
    pub fn trivial(complex: Arc<IntComplex>) -> Self {
        let levels = complex.ranks().iter().map(|(g, r)| (*g, vec![0; *r])).collect();
        Filtration { complex, levels }
    }

    pub fn level_vec(&self, g: i64) -> Vec<i64> {
        self.levels.get(&self.complex.grading().norm(g)).cloned().unwrap_or_default()
    }

    pub fn level_range(&self) -> Option<(i64, i64)> {
        let all: Vec<i64> = self.levels.values().flatten().copied().collect();
        Some((*all.iter().min()?, *all.iter().max()?))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PageDifferential {
    pub from_level: i64,
    pub from_grade: i64,
    pub to_level: i64,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Page {
    pub r: usize,
    /// (level, grade) → dimension; zero entries omitted.
    pub dims: BTreeMap<(i64, i64), usize>,
    /// Nonzero differentials d_r only.
    pub differentials: Vec<PageDifferential>,
}

impl Page {
    pub fn total_dim(&self) -> usize {
        self.dims.values().sum()
    }

    pub fn level_dim(&self, level: i64) -> usize {
        self.dims.iter().filter(|((s, _), _)| *s == level).map(|(_, d)| d).sum()
    }

    /// Total rank of d_r from `from` to `from − r`, over all grades.
    pub fn diff_rank(&self, from: i64) -> usize {
        self.differentials.iter().filter(|d| d.from_level == from).map(|d| d.rank).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralSequence {
    pub field: Field,
    /// Pages E¹ … E^{L+1}, where L is the filtration length.
    pub pages: Vec<Page>,
    /// First page after which every differential vanishes.
    pub stabilized_at: usize,
    pub homology_total: usize,
    pub abutment_ok: bool,
}

impl SpectralSequence {
    pub fn page(&self, r: usize) -> Option<&Page> {
        self.pages.iter().find(|p| p.r == r)
    }

    pub fn infinity(&self) -> &Page {
        self.pages.last().expect("at least one page")
    }
}

struct Engine<'a, F: FieldOps> {
    f: F,
    filt: &'a Filtration,
    diffs: BTreeMap<i64, Vec<Vec<F::E>>>,
}

impl<'a, F: FieldOps> Engine<'a, F> {
    fn new(f: F, filt: &'a Filtration) -> Self {
        let c = &filt.complex;
        let grades = c.grades();
        let diffs = grades
            .iter()
            .flat_map(|g| [*g, g + 1])
            .map(|g| {
                let g = c.grading().norm(g);
                (g, reduce(&f, &c.diff(g)))
            })
            .collect();
        Engine { f, filt, diffs }
    }

    fn diff(&self, g: i64) -> &Vec<Vec<F::E>> {
        &self.diffs[&self.filt.complex.grading().norm(g)]
    }

    /// Basis of Z^r_s in grade g, as vectors in C_g.
    fn z(&self, r: i64, s: i64, g: i64) -> Vec<Vec<F::E>> {
        let n = self.filt.complex.rank(g);
        let lv = self.filt.level_vec(g);
        let support: Vec<usize> = (0..n).filter(|&i| lv[i] <= s).collect();
        if support.is_empty() {
            return Vec::new();
        }
        let tl = self.filt.level_vec(g - 1);
        let d = self.diff(g);
        let rows: Vec<Vec<F::E>> = (0..tl.len())
            .filter(|&i| tl[i] > s - r)
            .map(|i| support.iter().map(|&j| d[i][j].clone()).collect())
            .collect();
        let kernel = if rows.is_empty() {
            (0..support.len())
                .map(|k| {
                    let mut v = vec![self.f.zero(); support.len()];
                    v[k] = self.f.one();
                    v
                })
                .collect()
        } else {
            nullspace(&self.f, &rows, support.len())
        };
        kernel
            .into_iter()
            .map(|kv| {
                let mut v = vec![self.f.zero(); n];
                for (k, &j) in support.iter().enumerate() {
                    v[j] = kv[k].clone();
                }
                v
            })
            .collect()
    }

    fn image(&self, g_from: i64, vecs: Vec<Vec<F::E>>) -> Vec<Vec<F::E>> {
        let d = self.diff(g_from);
        vecs.iter().map(|v| apply(&self.f, d, v)).collect()
    }

    fn page(&self, r: i64, lo: i64, hi: i64) -> Page {
        let c = &self.filt.complex;
        let mut dims = BTreeMap::new();
        let mut differentials = Vec::new();
        for g in c.grades() {
            let n = c.rank(g);
            for s in lo..=hi {
                let z = self.z(r, s, g);
                if z.is_empty() {
                    continue;
                }
                let zdim = span_dim(&self.f, &z, n);
                let mut denom = self.z(r - 1, s - 1, g);
                denom.extend(self.image(g + 1, self.z(r - 1, s + r - 1, g + 1)));
                let e = zdim - span_dim(&self.f, &denom, n);
                if e > 0 {
                    dims.insert((s, g), e);
                    let mut kern = self.z(r + 1, s, g);
                    kern.extend(self.z(r - 1, s - 1, g));
                    let rank = zdim - span_dim(&self.f, &kern, n);
                    if rank > 0 {
                        differentials.push(PageDifferential {
                            from_level: s,
                            from_grade: g,
                            to_level: s - r,
                            rank,
                        });
                    }
                }
            }
        }
        Page { r: r as usize, dims, differentials }
    }
}

fn run<F: FieldOps>(f: F, filt: &Filtration, field: Field) -> SpectralSequence {
    let homology_total: usize = homology_dims(&filt.complex, field).values().sum();
    let Some((lo, hi)) = filt.level_range() else {
        let empty = Page { r: 1, dims: BTreeMap::new(), differentials: Vec::new() };
        return SpectralSequence {
            field,
            pages: vec![empty],
            stabilized_at: 1,
            homology_total,
            abutment_ok: homology_total == 0,
        };
    };
    let engine = Engine::new(f, filt);
    let last = (hi - lo + 1) as usize;
    let pages: Vec<Page> = (1..=last).map(|r| engine.page(r as i64, lo, hi)).collect();
    let stabilized_at = pages
        .iter()
        .rposition(|p| !p.differentials.is_empty())
        .map_or(1, |k| pages[k].r + 1);
    let abutment_ok = pages.last().map(|p| p.total_dim()) == Some(homology_total);
    SpectralSequence { field, pages, stabilized_at, homology_total, abutment_ok }
}

pub fn spectral_sequence(filt: &Filtration, field: Field) -> Result<SpectralSequence> {
    match field {
        Field::Prime(p) => {
            Field::prime(p)?;
            Ok(run(PrimeField::new(p), filt, field))
        }
        Field::Rational => Ok(run(RationalField, filt, field)),
    }
}

/// Filtration of a direct sum by summand index → level.
pub fn summand_filtration(
    complex: Arc<IntComplex>,
    sum: &super::complex::DirectSum<num_bigint::BigInt>,
    summand_levels: &[i64],
) -> Result<Filtration> {
    let levels = complex
        .grades()
        .into_iter()
        .map(|g| (g, sum.owners(g).into_iter().map(|k| summand_levels[k]).collect()))
        .collect();
    Filtration::new(complex, levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::complex::Grading;
    use crate::chain::complex::ComplexExt;
    use crate::chain::cone::mapping_cone;

    #[test]
    fn one_level_gives_homology() {
        let c = IntComplex::from_i64(
            Grading::Integer,
            &[(0, 1), (1, 1), (2, 1)],
            &[(1, vec![vec![0]]), (2, vec![vec![2]])],
        )
        .unwrap();
        let ss = spectral_sequence(&Filtration::trivial(Arc::new(c)), Field::Prime(2)).unwrap();
        assert_eq!(ss.pages.len(), 1);
        assert_eq!(ss.pages[0].total_dim(), 3);
        assert_eq!(ss.stabilized_at, 1);
        assert!(ss.abutment_ok);
    }

    #[test]
    fn cone_of_identity_dies_on_e2() {
        let z = Arc::new(IntComplex::from_i64(Grading::Integer, &[(0, 2)], &[]).unwrap());
        let cone = mapping_cone(&z.identity()).unwrap();
        let filt = summand_filtration(cone.complex.clone(), &cone.sum, &[0, 1]).unwrap();
        let ss = spectral_sequence(&filt, Field::Prime(3)).unwrap();
        assert_eq!(ss.page(1).unwrap().total_dim(), 4);
        assert_eq!(ss.page(1).unwrap().diff_rank(1), 2);
        assert!(ss.page(2).unwrap().is_zero());
        assert!(ss.abutment_ok);
    }

    #[test]
    fn level_raising_rejected() {
        let c = Arc::new(
            IntComplex::from_i64(Grading::Integer, &[(0, 1), (1, 1)], &[(1, vec![vec![1]])]).unwrap(),
        );
        let levels = [(0, vec![1]), (1, vec![0])].into_iter().collect();
        assert!(Filtration::new(c, levels).is_err());
    }
}
