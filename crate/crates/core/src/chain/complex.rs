use crate::error::{Error, Result};
use crate::exactlin::{IntMatrix, LaurentPoly, Matrix, Ring};
use num_bigint::BigInt;
use std::collections::BTreeMap;
use std::sync::Arc;

/// ℤ-grading or ℤ/m-grading; `Cyclic(1)` means ungraded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Grading {
    Integer,
    Cyclic(u32),
}

impl Grading {
    pub fn norm(&self, g: i64) -> i64 {
        match self {
            Grading::Integer => g,
            Grading::Cyclic(m) => g.rem_euclid(*m as i64),
        }
    }

    pub fn modulus(&self) -> Option<u32> {
        match self {
            Grading::Integer => None,
            Grading::Cyclic(m) => Some(*m),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Grading::Cyclic(0) => Err(Error::Grading("cyclic modulus must be positive".into())),
            _ => Ok(()),
        }
    }

    pub fn same_degree(&self, a: i64, b: i64) -> bool {
        self.norm(a) == self.norm(b)
    }

    /// (−1)^g, defined for ℤ and even moduli.
    pub fn parity_sign(&self, g: i64) -> Result<i64> {
        match self {
            Grading::Cyclic(m) if m % 2 != 0 => {
                Err(Error::Parity(format!("grading mod {m} has no parity")))
            }
            _ => Ok(if g.rem_euclid(2) == 0 { 1 } else { -1 }),
        }
    }
}

/// Free graded module with differential ∂_g : C_g → C_{g−1}.
#[derive(Clone, PartialEq, Debug)]
pub struct ChainComplex<R: Ring> {
    grading: Grading,
    ranks: BTreeMap<i64, usize>,
    diffs: BTreeMap<i64, Matrix<R>>,
}

pub type IntComplex = ChainComplex<BigInt>;
pub type LaurentComplex = ChainComplex<LaurentPoly>;

impl<R: Ring> ChainComplex<R> {
    /// Builds and checks shapes; does not check ∂² = 0.
    pub fn new_unchecked(
        grading: Grading,
        ranks: BTreeMap<i64, usize>,
        diffs: BTreeMap<i64, Matrix<R>>,
    ) -> Result<Self> {
        grading.validate()?;
        let mut nr = BTreeMap::new();
        for (g, r) in ranks {
            if r > 0 {
                let k = grading.norm(g);
                if nr.insert(k, r).is_some() {
                    return Err(Error::Grading(format!("grade {g} given twice")));
                }
            }
        }
        let mut c = ChainComplex { grading, ranks: nr, diffs: BTreeMap::new() };
        for (g, d) in diffs {
            let k = grading.norm(g);
            let want = (c.rank(k - 1), c.rank(k));
            if d.shape() != want {
                return Err(Error::Shape(format!(
                    "differential at grade {g} is {}x{}, expected {}x{}",
                    d.rows(),
                    d.cols(),
                    want.0,
                    want.1
                )));
            }
            if !d.is_zero() {
                c.diffs.insert(k, d);
            }
        }
        Ok(c)
    }

    pub fn new(
        grading: Grading,
        ranks: BTreeMap<i64, usize>,
        diffs: BTreeMap<i64, Matrix<R>>,
    ) -> Result<Self> {
        let c = Self::new_unchecked(grading, ranks, diffs)?;
        if let Some(g) = c.first_nonzero_square() {
            return Err(Error::NotComplex(format!("∂∘∂ ≠ 0 starting at grade {g}")));
        }
        Ok(c)
    }

    pub fn zero(grading: Grading) -> Self {
        ChainComplex { grading, ranks: BTreeMap::new(), diffs: BTreeMap::new() }
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    pub fn rank(&self, g: i64) -> usize {
        self.ranks.get(&self.grading.norm(g)).copied().unwrap_or(0)
    }

    pub fn ranks(&self) -> &BTreeMap<i64, usize> {
        &self.ranks
    }

    /// Grades with nonzero rank.
    pub fn grades(&self) -> Vec<i64> {
        self.ranks.keys().copied().collect()
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.values().sum()
    }

    /// ∂_g as a rank(g−1) × rank(g) matrix.
    pub fn diff(&self, g: i64) -> Matrix<R> {
        let k = self.grading.norm(g);
        self.diffs
            .get(&k)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(self.rank(k - 1), self.rank(k)))
    }

    fn first_nonzero_square(&self) -> Option<i64> {
        self.grades()
            .into_iter()
            .find(|&g| !self.diff(g - 1).mul(&self.diff(g)).is_zero())
    }

    /// All composites ∂∘∂ vanish.
    pub fn verify_complex(&self) -> bool {
        self.first_nonzero_square().is_none()
    }

    pub fn map_ring<S: Ring>(&self, f: impl Fn(&R) -> S) -> ChainComplex<S> {
        ChainComplex {
            grading: self.grading,
            ranks: self.ranks.clone(),
            diffs: self
                .diffs
                .iter()
                .map(|(g, d)| (*g, d.map(&f)))
                .filter(|(_, d)| !d.is_zero())
                .collect(),
        }
    }

    /// Euler characteristic Σ (−1)^g rank; meaningful for ℤ or even-modulus gradings.
    pub fn euler_characteristic(&self) -> Option<i64> {
        if let Grading::Cyclic(m) = self.grading {
            if m % 2 != 0 {
                return None;
            }
        }
        Some(
            self.ranks
                .iter()
                .map(|(g, r)| if g.rem_euclid(2) == 0 { *r as i64 } else { -(*r as i64) })
                .sum(),
        )
    }

    /// Direct sum of complexes (block-diagonal differentials).
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let a = Arc::new(self.clone());
        let b = Arc::new(other.clone());
        let mut ds = DirectSum::new(self.grading);
        ds.push(a.clone(), 0)?;
        ds.push(b.clone(), 0)?;
        ds.assemble_complex(&[(0, 0, a.differential()), (1, 1, b.differential())])
    }
}

impl<R: Ring> ChainComplex<R> {
    pub fn arc(self) -> Arc<Self> {
        Arc::new(self)
    }
}

pub trait ComplexExt<R: Ring> {
    fn differential(&self) -> GradedMap<R>;
    fn identity(&self) -> GradedMap<R>;
}

impl<R: Ring> ComplexExt<R> for Arc<ChainComplex<R>> {
    /// ∂ as a degree −1 self-map.
    fn differential(&self) -> GradedMap<R> {
        GradedMap {
            source: self.clone(),
            target: self.clone(),
            degree: -1,
            blocks: self.diffs.clone(),
        }
    }

    fn identity(&self) -> GradedMap<R> {
        let blocks = self.ranks.iter().map(|(g, r)| (*g, Matrix::identity(*r))).collect();
        GradedMap { source: self.clone(), target: self.clone(), degree: 0, blocks }
    }
}

pub fn same_complex<R: Ring>(a: &Arc<ChainComplex<R>>, b: &Arc<ChainComplex<R>>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Homogeneous module map C_g → D_{g+degree}.
#[derive(Clone, PartialEq, Debug)]
pub struct GradedMap<R: Ring> {
    source: Arc<ChainComplex<R>>,
    target: Arc<ChainComplex<R>>,
    degree: i64,
    blocks: BTreeMap<i64, Matrix<R>>,
}

pub type IntMap = GradedMap<BigInt>;

impl<R: Ring> GradedMap<R> {
    pub fn new(
        source: Arc<ChainComplex<R>>,
        target: Arc<ChainComplex<R>>,
        degree: i64,
        blocks: BTreeMap<i64, Matrix<R>>,
    ) -> Result<Self> {
        if source.grading != target.grading {
            return Err(Error::Grading("source and target gradings differ".into()));
        }
        let gr = source.grading;
        let mut m = GradedMap { source, target, degree, blocks: BTreeMap::new() };
        for (g, b) in blocks {
            let k = gr.norm(g);
            let want = (m.target.rank(k + degree), m.source.rank(k));
            if b.shape() != want {
                return Err(Error::Shape(format!(
                    "map block at grade {g} is {}x{}, expected {}x{}",
                    b.rows(),
                    b.cols(),
                    want.0,
                    want.1
                )));
            }
            if !b.is_zero() {
                m.blocks.insert(k, b);
            }
        }
        Ok(m)
    }

    pub fn zero(source: Arc<ChainComplex<R>>, target: Arc<ChainComplex<R>>, degree: i64) -> Self {
        GradedMap { source, target, degree, blocks: BTreeMap::new() }
    }

    pub fn source(&self) -> &Arc<ChainComplex<R>> {
        &self.source
    }

    pub fn target(&self) -> &Arc<ChainComplex<R>> {
        &self.target
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn grading(&self) -> Grading {
        self.source.grading
    }

    /// Block C_g → D_{g+degree}.
    pub fn block(&self, g: i64) -> Matrix<R> {
        let k = self.grading().norm(g);
        self.blocks.get(&k).cloned().unwrap_or_else(|| {
            Matrix::zeros(self.target.rank(k + self.degree), self.source.rank(k))
        })
    }

    pub fn blocks(&self) -> &BTreeMap<i64, Matrix<R>> {
        &self.blocks
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if !same_complex(&self.source, &other.source)
            || !same_complex(&self.target, &other.target)
            || !self.grading().same_degree(self.degree, other.degree)
        {
            return Err(Error::Shape("maps have different source, target or degree".into()));
        }
        Ok(())
    }

    fn combine(&self, other: &Self, f: impl Fn(&Matrix<R>, &Matrix<R>) -> Matrix<R>) -> Result<Self> {
        self.same_shape(other)?;
        let mut blocks = BTreeMap::new();
        for g in self.source.grades() {
            let b = f(&self.block(g), &other.block(g));
            if !b.is_zero() {
                blocks.insert(g, b);
            }
        }
        Ok(GradedMap { blocks, ..self.clone() })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a.sub(b))
    }

    pub fn neg(&self) -> Self {
        GradedMap { blocks: self.blocks.iter().map(|(g, b)| (*g, b.neg())).collect(), ..self.clone() }
    }

    pub fn scale(&self, s: &R) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|(g, b)| (*g, b.scale(s)))
            .filter(|(_, b)| !b.is_zero())
            .collect();
        GradedMap { blocks, ..self.clone() }
    }

    /// Block at source grade g multiplied by (−1)^g.
    pub fn parity_twist(&self) -> Result<Self> {
        let gr = self.grading();
        let mut blocks = BTreeMap::new();
        for (g, b) in &self.blocks {
            let s = gr.parity_sign(*g)?;
            blocks.insert(*g, if s > 0 { b.clone() } else { b.neg() });
        }
        Ok(GradedMap { blocks, ..self.clone() })
    }

    /// self ∘ other.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if !same_complex(&other.target, &self.source) {
            return Err(Error::Shape("composition: target does not match source".into()));
        }
        let degree = self.degree + other.degree;
        let mut blocks = BTreeMap::new();
        for g in other.source.grades() {
            let b = self.block(g + other.degree).mul(&other.block(g));
            if !b.is_zero() {
                blocks.insert(g, b);
            }
        }
        Ok(GradedMap { source: other.source.clone(), target: self.target.clone(), degree, blocks })
    }

    /// ∂_target ∘ self + ε · self ∘ ∂_source.
    pub fn boundary_residual(&self, eps: i64) -> Self {
        let left = self.target.differential().compose(self).expect("matching complexes");
        let right = self.compose(&self.source.differential()).expect("matching complexes");
        let right = if eps >= 0 { right } else { right.neg() };
        left.add(&right).expect("same shape")
    }

    /// ∂f − f∂ = 0.
    pub fn is_chain_map(&self) -> bool {
        self.boundary_residual(-1).is_zero()
    }

    /// ∂f + f∂ = 0.
    pub fn is_anti_chain_map(&self) -> bool {
        self.boundary_residual(1).is_zero()
    }

    pub fn map_ring<S: Ring>(
        &self,
        source: Arc<ChainComplex<S>>,
        target: Arc<ChainComplex<S>>,
        f: impl Fn(&R) -> S,
    ) -> GradedMap<S> {
        GradedMap {
            source,
            target,
            degree: self.degree,
            blocks: self
                .blocks
                .iter()
                .map(|(g, b)| (*g, b.map(&f)))
                .filter(|(_, b)| !b.is_zero())
                .collect(),
        }
    }

    /// Replaces the source and target by equal complexes (e.g. after
    /// reconstruction) without touching the matrices.
    pub fn rebase(&self, source: Arc<ChainComplex<R>>, target: Arc<ChainComplex<R>>) -> Result<Self> {
        GradedMap::new(source, target, self.degree, self.blocks.clone())
    }
}

impl IntMap {
    pub fn to_laurent(
        &self,
        source: Arc<LaurentComplex>,
        target: Arc<LaurentComplex>,
    ) -> GradedMap<LaurentPoly> {
        self.map_ring(source, target, |x| LaurentPoly::constant(x.clone()))
    }
}

impl IntComplex {
    pub fn to_laurent(&self) -> LaurentComplex {
        self.map_ring(|x| LaurentPoly::constant(x.clone()))
    }

    /// Cellular-style constructor from a list of (grade, differential) pairs
    /// given as i64 rows; ranks are read off the matrix shapes.
    pub fn from_i64(grading: Grading, ranks: &[(i64, usize)], diffs: &[(i64, Vec<Vec<i64>>)]) -> Result<Self> {
        let ranks: BTreeMap<i64, usize> = ranks.iter().copied().collect();
        let mut dm = BTreeMap::new();
        for (g, rows) in diffs {
            let m = if rows.is_empty() {
                IntMatrix::zeros(0, 0)
            } else {
                IntMatrix::from_i64(rows)
            };
            dm.insert(*g, m);
        }
        Self::new(grading, ranks, dm)
    }
}

/// Bookkeeping for a direct sum ⊕ₖ Sₖ[sₖ], where the summand grade g sits
/// in total grade g + sₖ.
#[derive(Clone, Debug)]
pub struct DirectSum<R: Ring> {
    grading: Grading,
    summands: Vec<(Arc<ChainComplex<R>>, i64)>,
}

impl<R: Ring> DirectSum<R> {
    pub fn new(grading: Grading) -> Self {
        DirectSum { grading, summands: Vec::new() }
    }

    pub fn push(&mut self, c: Arc<ChainComplex<R>>, shift: i64) -> Result<usize> {
        if c.grading != self.grading {
            return Err(Error::Grading("summand grading differs".into()));
        }
        self.summands.push((c, shift));
        Ok(self.summands.len() - 1)
    }

    pub fn summand(&self, k: usize) -> &Arc<ChainComplex<R>> {
        &self.summands[k].0
    }

    pub fn shift(&self, k: usize) -> i64 {
        self.summands[k].1
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    /// Normalized total grades with nonzero rank.
    pub fn total_grades(&self) -> Vec<i64> {
        let mut gs: Vec<i64> = self
            .summands
            .iter()
            .flat_map(|(c, s)| c.grades().into_iter().map(move |g| self.grading.norm(g + s)))
            .collect();
        gs.sort_unstable();
        gs.dedup();
        gs
    }

    /// Offsets of each summand inside total grade `g`, plus the total rank.
    pub fn offsets(&self, g: i64) -> (Vec<usize>, usize) {
        let mut off = Vec::with_capacity(self.summands.len());
        let mut acc = 0;
        for (c, s) in &self.summands {
            off.push(acc);
            acc += c.rank(g - s);
        }
        (off, acc)
    }

    pub fn total_ranks(&self) -> BTreeMap<i64, usize> {
        self.total_grades().into_iter().map(|g| (g, self.offsets(g).1)).collect()
    }

    /// Summand index of every basis element of total grade `g`.
    pub fn owners(&self, g: i64) -> Vec<usize> {
        let mut out = Vec::new();
        for (k, (c, s)) in self.summands.iter().enumerate() {
            out.extend(std::iter::repeat_n(k, c.rank(g - s)));
        }
        out
    }

    /// Total operator of degree `total_degree` on the sum (to itself), or
    /// between `self` (source) and `target` sums.
    fn assemble_blocks(
        &self,
        target: &DirectSum<R>,
        entries: &[(usize, usize, GradedMap<R>)],
        total_degree: i64,
    ) -> Result<BTreeMap<i64, Matrix<R>>> {
        for (i, j, m) in entries {
            let (src, s_j) = &self.summands[*j];
            let (tgt, s_i) = &target.summands[*i];
            if !same_complex(m.source(), src) || !same_complex(m.target(), tgt) {
                return Err(Error::Shape(format!("block ({i},{j}) has wrong source or target")));
            }
            let want = s_j - s_i + total_degree;
            if !self.grading.same_degree(m.degree(), want) {
                return Err(Error::Degree(m.degree()));
            }
        }
        let mut blocks = BTreeMap::new();
        for g in self.total_grades() {
            let (soff, srank) = self.offsets(g);
            let (toff, trank) = target.offsets(g + total_degree);
            let mut mat = Matrix::<R>::zeros(trank, srank);
            for (i, j, m) in entries {
                let s_j = self.summands[*j].1;
                let b = m.block(g - s_j);
                if b.rows() == 0 || b.cols() == 0 {
                    continue;
                }
                let cur = mat.submatrix(toff[*i], toff[*i] + b.rows(), soff[*j], soff[*j] + b.cols());
                mat.paste(toff[*i], soff[*j], &cur.add(&b));
            }
            if !mat.is_zero() {
                blocks.insert(g, mat);
            }
        }
        Ok(blocks)
    }

    /// Complex whose differential is the block matrix of `entries`
    /// (row = target summand, column = source summand). Checks ∂² = 0.
    pub fn assemble_complex(&self, entries: &[(usize, usize, GradedMap<R>)]) -> Result<ChainComplex<R>> {
        let c = self.assemble_complex_unchecked(entries)?;
        if !c.verify_complex() {
            return Err(Error::NotComplex("assembled differential does not square to zero".into()));
        }
        Ok(c)
    }

    pub fn assemble_complex_unchecked(
        &self,
        entries: &[(usize, usize, GradedMap<R>)],
    ) -> Result<ChainComplex<R>> {
        let blocks = self.assemble_blocks(self, entries, -1)?;
        ChainComplex::new_unchecked(self.grading, self.total_ranks(), blocks)
    }

    /// Block operator between two assembled sums.
    pub fn assemble_map(
        &self,
        target: &DirectSum<R>,
        source_complex: Arc<ChainComplex<R>>,
        target_complex: Arc<ChainComplex<R>>,
        entries: &[(usize, usize, GradedMap<R>)],
        total_degree: i64,
    ) -> Result<GradedMap<R>> {
        let blocks = self.assemble_blocks(target, entries, total_degree)?;
        GradedMap::new(source_complex, target_complex, total_degree, blocks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_term_complex() {
        let c = IntComplex::from_i64(Grading::Integer, &[(0, 1), (1, 1)], &[(1, vec![vec![2]])]).unwrap();
        assert!(c.verify_complex());
    }

    #[test]
    fn non_complex_rejected() {
        let r = IntComplex::from_i64(
            Grading::Integer,
            &[(0, 1), (1, 1), (2, 1)],
            &[(1, vec![vec![1]]), (2, vec![vec![2]])],
        );
        assert!(matches!(r, Err(Error::NotComplex(_))));
        let c = IntComplex::new_unchecked(
            Grading::Integer,
            [(0, 1), (1, 1), (2, 1)].into_iter().collect(),
            [(1, IntMatrix::from_i64(&[vec![1]])), (2, IntMatrix::from_i64(&[vec![2]]))]
                .into_iter()
                .collect(),
        )
        .unwrap();
        assert!(!c.verify_complex());
    }

    #[test]
    fn cyclic_grading_wraps() {
        // ℤ/2-graded: ∂_0: C_0 → C_1, ∂_1: C_1 → C_0
        let c = IntComplex::from_i64(
            Grading::Cyclic(2),
            &[(0, 1), (1, 1)],
            &[(0, vec![vec![0]]), (1, vec![vec![3]])],
        )
        .unwrap();
        assert_eq!(c.diff(3), IntMatrix::from_i64(&[vec![3]]));
        assert_eq!(c.rank(-2), 1);
    }

    #[test]
    fn shape_errors() {
        let r = IntComplex::from_i64(Grading::Integer, &[(0, 1), (1, 2)], &[(1, vec![vec![1]])]);
        assert!(matches!(r, Err(Error::Shape(_))));
    }
}
