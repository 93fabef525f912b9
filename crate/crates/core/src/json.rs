//! File formats and canonical serialization.
//!
//! Integers are JSON numbers when they fit in an i64 and decimal strings
//! otherwise. Laurent polynomials are `{"exp": "coeff"}` maps. Canonical
//! output is compact JSON with object keys sorted.

use crate::chain::{ChainComplex, Filtration, GradedMap, Grading};
use crate::error::{Error, Result};
use crate::exactlin::{LaurentPoly, Matrix, Ring};
use crate::lin::TriangleHypotheses;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntJson {
    Num(i64),
    Str(String),
}

impl IntJson {
    pub fn from_big(x: &BigInt) -> Self {
        x.to_i64().map(IntJson::Num).unwrap_or_else(|| IntJson::Str(x.to_string()))
    }

    pub fn to_big(&self) -> Result<BigInt> {
        match self {
            IntJson::Num(n) => Ok(BigInt::from(*n)),
            IntJson::Str(s) => s.trim().parse().map_err(|_| Error::Malformed(format!("not an integer: {s:?}"))),
        }
    }
}

/// Rings with a JSON entry format.
pub trait JsonRing: Ring {
    const TAG: &'static str;
    type Entry: Serialize + for<'de> Deserialize<'de>;
    fn to_entry(&self) -> Self::Entry;
    fn from_entry(e: &Self::Entry) -> Result<Self>;
}

impl JsonRing for BigInt {
    const TAG: &'static str = "Z";
    type Entry = IntJson;

    fn to_entry(&self) -> IntJson {
        IntJson::from_big(self)
    }

    fn from_entry(e: &IntJson) -> Result<Self> {
        e.to_big()
    }
}

impl JsonRing for LaurentPoly {
    const TAG: &'static str = "Z[T,T^-1]";
    type Entry = BTreeMap<String, String>;

    fn to_entry(&self) -> Self::Entry {
        self.terms().map(|(e, c)| (e.to_string(), c.to_string())).collect()
    }

    fn from_entry(e: &Self::Entry) -> Result<Self> {
        let mut terms = Vec::with_capacity(e.len());
        for (k, v) in e {
            let exp: i64 = k.trim().parse().map_err(|_| Error::Malformed(format!("bad exponent {k:?}")))?;
            let c: BigInt = v.trim().parse().map_err(|_| Error::Malformed(format!("bad coefficient {v:?}")))?;
            terms.push((exp, c));
        }
        Ok(LaurentPoly::from_terms(terms))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "E: Deserialize<'de>"))]
pub struct MatrixJson<E> {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<E>>,
}

pub fn matrix_to_json<R: JsonRing>(m: &Matrix<R>) -> MatrixJson<R::Entry> {
    MatrixJson {
        rows: m.rows(),
        cols: m.cols(),
        entries: m.to_rows().iter().map(|r| r.iter().map(|x| x.to_entry()).collect()).collect(),
    }
}

pub fn matrix_from_json<R: JsonRing>(j: &MatrixJson<R::Entry>) -> Result<Matrix<R>> {
    if j.entries.len() != j.rows || j.entries.iter().any(|r| r.len() != j.cols) {
        return Err(Error::Malformed(format!("matrix entries do not match {}x{}", j.rows, j.cols)));
    }
    let data = j.entries.iter().flatten().map(R::from_entry).collect::<Result<Vec<R>>>()?;
    Matrix::from_vec(j.rows, j.cols, data)
}

fn grade_key(k: &str) -> Result<i64> {
    k.trim().parse().map_err(|_| Error::Malformed(format!("bad grade {k:?}")))
}

/// `modulus` absent means ℤ-graded; the differential keyed by g maps grade
/// g to grade g − 1.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "E: Deserialize<'de>"))]
pub struct ComplexJson<E> {
    pub ring: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u32>,
    pub ranks: BTreeMap<String, usize>,
    #[serde(default)]
    pub differentials: BTreeMap<String, MatrixJson<E>>,
}

pub fn complex_to_json<R: JsonRing>(c: &ChainComplex<R>) -> ComplexJson<R::Entry> {
    ComplexJson {
        ring: R::TAG.to_string(),
        modulus: c.grading().modulus(),
        ranks: c.ranks().iter().map(|(g, r)| (g.to_string(), *r)).collect(),
        differentials: c
            .grades()
            .into_iter()
            .filter_map(|g| {
                let d = c.diff(g);
                (!d.is_zero()).then(|| (g.to_string(), matrix_to_json(&d)))
            })
            .collect(),
    }
}

pub fn complex_from_json<R: JsonRing>(j: &ComplexJson<R::Entry>) -> Result<ChainComplex<R>> {
    if j.ring != R::TAG {
        return Err(Error::UnsupportedRing(format!("expected ring {}, got {}", R::TAG, j.ring)));
    }
    let grading = match j.modulus {
        None => Grading::Integer,
        Some(m) => Grading::Cyclic(m),
    };
    let ranks = j.ranks.iter().map(|(k, r)| Ok((grade_key(k)?, *r))).collect::<Result<_>>()?;
    let diffs = j
        .differentials
        .iter()
        .map(|(k, m)| Ok((grade_key(k)?, matrix_from_json::<R>(m)?)))
        .collect::<Result<_>>()?;
    ChainComplex::new(grading, ranks, diffs)
}

/// Reads the ring tag of a complex without decoding it.
pub fn ring_tag(v: &Value) -> Result<String> {
    v.get("ring")
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| Error::Malformed("complex has no ring tag".into()))
}

/// Homogeneous map between complexes given elsewhere.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "E: Deserialize<'de>"))]
pub struct MapJson<E> {
    #[serde(default)]
    pub degree: i64,
    #[serde(default)]
    pub blocks: BTreeMap<String, MatrixJson<E>>,
}

pub fn map_to_json<R: JsonRing>(m: &GradedMap<R>) -> MapJson<R::Entry> {
    MapJson {
        degree: m.degree(),
        blocks: m.blocks().iter().map(|(g, b)| (g.to_string(), matrix_to_json(b))).collect(),
    }
}

pub fn map_from_json<R: JsonRing>(
    j: &MapJson<R::Entry>,
    source: Arc<ChainComplex<R>>,
    target: Arc<ChainComplex<R>>,
) -> Result<GradedMap<R>> {
    let blocks = j.blocks.iter().map(|(k, m)| Ok((grade_key(k)?, matrix_from_json::<R>(m)?))).collect::<Result<_>>()?;
    GradedMap::new(source, target, j.degree, blocks)
}

/// A map together with its source and target.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "E: Deserialize<'de>"))]
pub struct ChainMapJson<E> {
    pub source: ComplexJson<E>,
    pub target: ComplexJson<E>,
    #[serde(default)]
    pub degree: i64,
    #[serde(default)]
    pub blocks: BTreeMap<String, MatrixJson<E>>,
}

pub fn chain_map_from_json<R: JsonRing>(j: &ChainMapJson<R::Entry>) -> Result<GradedMap<R>> {
    let s = Arc::new(complex_from_json::<R>(&j.source)?);
    let t = Arc::new(complex_from_json::<R>(&j.target)?);
    let blocks = j.blocks.iter().map(|(k, m)| Ok((grade_key(k)?, matrix_from_json::<R>(m)?))).collect::<Result<_>>()?;
    GradedMap::new(s, t, j.degree, blocks)
}

pub fn chain_map_to_json<R: JsonRing>(m: &GradedMap<R>) -> ChainMapJson<R::Entry> {
    let j = map_to_json(m);
    ChainMapJson { source: complex_to_json(m.source()), target: complex_to_json(m.target()), degree: j.degree, blocks: j.blocks }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "E: Deserialize<'de>"))]
pub struct FiltrationJson<E> {
    pub complex: ComplexJson<E>,
    pub levels: BTreeMap<String, Vec<i64>>,
}

pub fn filtration_from_json(j: &FiltrationJson<IntJson>) -> Result<Filtration> {
    let c = Arc::new(complex_from_json::<BigInt>(&j.complex)?);
    let levels = j.levels.iter().map(|(k, l)| Ok((grade_key(k)?, l.clone()))).collect::<Result<_>>()?;
    Filtration::new(c, levels)
}

pub fn filtration_to_json(f: &Filtration) -> FiltrationJson<IntJson> {
    FiltrationJson {
        complex: complex_to_json(&f.complex),
        levels: f.levels.iter().map(|(g, l)| (g.to_string(), l.clone())).collect(),
    }
}

/// Triangle data. Maps are indexed by i ∈ {0, 1, 2}: f_i : C_i → C_{i+1},
/// g_i, H_i : C_i → C_{i+2}, F_i, G_i : C_i → C_i. When `g` and `F` are
/// omitted they are filled in from the defining identities.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "E: Deserialize<'de>"))]
pub struct TriangleJson<E> {
    pub complexes: [ComplexJson<E>; 3],
    pub f: [MapJson<E>; 3],
    pub h: [MapJson<E>; 3],
    #[serde(rename = "G")]
    pub big_g: [MapJson<E>; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<[MapJson<E>; 3]>,
    #[serde(rename = "F", default, skip_serializing_if = "Option::is_none")]
    pub big_f: Option<[MapJson<E>; 3]>,
}

pub fn triangle_to_json<R: JsonRing>(t: &TriangleHypotheses<R>) -> TriangleJson<R::Entry> {
    TriangleJson {
        complexes: std::array::from_fn(|i| complex_to_json(&t.c[i])),
        f: std::array::from_fn(|i| map_to_json(&t.f[i])),
        h: std::array::from_fn(|i| map_to_json(&t.h[i])),
        big_g: std::array::from_fn(|i| map_to_json(&t.big_g[i])),
        g: Some(std::array::from_fn(|i| map_to_json(&t.g[i]))),
        big_f: Some(std::array::from_fn(|i| map_to_json(&t.big_f[i]))),
    }
}

pub fn triangle_from_json<R: JsonRing>(j: &TriangleJson<R::Entry>) -> Result<TriangleHypotheses<R>> {
    let c: Vec<Arc<ChainComplex<R>>> =
        j.complexes.iter().map(|x| complex_from_json::<R>(x).map(Arc::new)).collect::<Result<_>>()?;
    let c: [Arc<ChainComplex<R>>; 3] = c.try_into().expect("three complexes");
    let maps = |ms: &[MapJson<R::Entry>; 3], off: usize| -> Result<[GradedMap<R>; 3]> {
        let v: Vec<GradedMap<R>> = (0..3)
            .map(|i| map_from_json::<R>(&ms[i], c[i].clone(), c[(i + off) % 3].clone()))
            .collect::<Result<_>>()?;
        Ok(v.try_into().expect("three maps"))
    };
    let f = maps(&j.f, 1)?;
    let h = maps(&j.h, 2)?;
    let big_g = maps(&j.big_g, 0)?;
    match (&j.g, &j.big_f) {
        (Some(g), Some(bf)) => TriangleHypotheses::new(c.clone(), f, maps(g, 2)?, h, maps(bf, 0)?, big_g),
        (None, None) => TriangleHypotheses::complete(c.clone(), f, h, big_g),
        _ => Err(Error::Malformed("give both g and F or neither".into())),
    }
}

/// Parses JSON text, mapping syntax and shape errors to `Malformed`.
pub fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))
}

pub fn from_value<T: for<'de> Deserialize<'de>>(v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::Malformed(e.to_string()))
}

/// Compact JSON with sorted keys.
pub fn canonical<T: Serialize>(v: &T) -> Result<String> {
    let v = serde_json::to_value(v).map_err(|e| Error::Invalid(e.to_string()))?;
    Ok(v.to_string())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
