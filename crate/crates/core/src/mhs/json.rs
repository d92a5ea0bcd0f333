//! JSON encoding of structures and extensions.
//!
//! Schema (all exact numbers are strings; Gaussian rationals are written
//! `"a/b"`, `"a/b+c/di"` or `"c/di"`):
//!
//! ```text
//! structure = { "rank": n,
//!               "weights": [ { "k": int,  "basis": [[q, ...], ...] } ],
//!               "hodge":   [ { "p": int,  "basis": [[z, ...], ...] } ] }
//! extension = { "sub": structure, "total": structure, "quotient": structure,
//!               "inclusion": [[int]], "projection": [[int]],
//!               "retraction": [[int]], "section": [[z]] }
//! ```
//!
//! Bases are lists of vectors (the columns of the basis matrix). Matrices
//! are lists of rows.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{CSpace, ExtensionOfMHS, MhsError, MhsResult, MixedHodgeStructure, QSpace};
use crate::exact::{GaussMatrix, IntMatrix, Matrix};
use crate::scalar::{GaussianRational, Rational};

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct WeightStepJson {
    pub k: i32,
    pub basis: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct HodgeStepJson {
    pub p: i32,
    pub basis: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct MhsJson {
    pub rank: usize,
    pub weights: Vec<WeightStepJson>,
    pub hodge: Vec<HodgeStepJson>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct ExtensionJson {
    pub sub: MhsJson,
    pub total: MhsJson,
    pub quotient: MhsJson,
    pub inclusion: Vec<Vec<String>>,
    pub projection: Vec<Vec<String>>,
    pub retraction: Vec<Vec<String>>,
    pub section: Vec<Vec<String>>,
}

pub fn format_gauss(z: &GaussianRational) -> String {
    if z.im.is_zero() {
        z.re.to_string()
    } else if z.re.is_zero() {
        format!("{}i", z.im)
    } else if z.im.is_negative() {
        format!("{}{}i", z.re, z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

pub fn parse_rational(s: &str) -> MhsResult<Rational> {
    Rational::from_str(s.trim()).map_err(|_| MhsError::Shape(format!("not a rational number: {s:?}")))
}

pub fn parse_gauss(s: &str) -> MhsResult<GaussianRational> {
    let t = s.trim();
    let Some(body) = t.strip_suffix('i') else {
        return Ok(GaussianRational::new(parse_rational(t)?, Rational::zero()));
    };
    let split = body
        .char_indices()
        .filter(|&(i, c)| i > 0 && (c == '+' || c == '-'))
        .map(|(i, _)| i)
        .last();
    match split {
        Some(i) => {
            let im = body[i..].trim_start_matches('+');
            Ok(GaussianRational::new(parse_rational(&body[..i])?, parse_rational(im)?))
        }
        None => Ok(GaussianRational::new(Rational::zero(), parse_rational(body)?)),
    }
}

fn cols_to_strings<T: Clone + num_traits::Zero + num_traits::One>(m: &Matrix<T>, f: impl Fn(&T) -> String) -> Vec<Vec<String>> {
    m.col_vecs().iter().map(|v| v.iter().map(&f).collect()).collect()
}

fn rows_to_strings<T: Clone + num_traits::Zero + num_traits::One>(m: &Matrix<T>, f: impl Fn(&T) -> String) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(&f).collect()).collect()
}

fn parse_rows<T: Clone + num_traits::Zero + num_traits::One>(
    rows: &[Vec<String>],
    width: Option<usize>,
    f: impl Fn(&str) -> MhsResult<T>,
) -> MhsResult<Matrix<T>> {
    let parsed: Vec<Vec<T>> = rows
        .iter()
        .map(|r| r.iter().map(|s| f(s)).collect::<MhsResult<Vec<T>>>())
        .collect::<MhsResult<_>>()?;
    if parsed.iter().any(|r| Some(r.len()) != parsed.first().map(|x| x.len())) {
        return Err(MhsError::Shape("ragged matrix".into()));
    }
    if parsed.is_empty() {
        return Ok(Matrix::zeros(0, width.unwrap_or(0)));
    }
    Ok(Matrix::from_rows(parsed))
}

fn parse_cols<T: Clone + num_traits::Zero + num_traits::One>(
    n: usize,
    cols: &[Vec<String>],
    f: impl Fn(&str) -> MhsResult<T>,
) -> MhsResult<Matrix<T>> {
    let parsed: Vec<Vec<T>> = cols
        .iter()
        .map(|r| r.iter().map(|s| f(s)).collect::<MhsResult<Vec<T>>>())
        .collect::<MhsResult<_>>()?;
    if parsed.iter().any(|v| v.len() != n) {
        return Err(MhsError::Shape(format!("basis vector length differs from rank {n}")));
    }
    Ok(Matrix::from_cols(n, &parsed))
}

fn parse_int(s: &str) -> MhsResult<BigInt> {
    BigInt::from_str(s.trim()).map_err(|_| MhsError::Shape(format!("not an integer: {s:?}")))
}

impl MixedHodgeStructure {
    pub fn to_json(&self) -> MhsJson {
        MhsJson {
            rank: self.rank(),
            weights: self
                .weight_steps()
                .iter()
                .map(|(k, s)| WeightStepJson { k: *k, basis: cols_to_strings(s.basis(), |x| x.to_string()) })
                .collect(),
            hodge: self
                .hodge_steps()
                .iter()
                .map(|(p, s)| HodgeStepJson { p: *p, basis: cols_to_strings(s.basis(), format_gauss) })
                .collect(),
        }
    }

    pub fn from_json(j: &MhsJson) -> MhsResult<Self> {
        let n = j.rank;
        let weights = j
            .weights
            .iter()
            .map(|w| Ok((w.k, QSpace::span(&parse_cols::<Rational>(n, &w.basis, parse_rational)?))))
            .collect::<MhsResult<Vec<_>>>()?;
        let hodge = j
            .hodge
            .iter()
            .map(|h| Ok((h.p, CSpace::span(&parse_cols::<GaussianRational>(n, &h.basis, parse_gauss)?))))
            .collect::<MhsResult<Vec<_>>>()?;
        MixedHodgeStructure::new(n, weights, hodge)
    }
}

impl ExtensionOfMHS {
    pub fn to_json(&self) -> ExtensionJson {
        let ints = |m: &IntMatrix| rows_to_strings(m, |x| x.to_string());
        ExtensionJson {
            sub: self.sub.to_json(),
            total: self.total.to_json(),
            quotient: self.quotient.to_json(),
            inclusion: ints(&self.inclusion),
            projection: ints(&self.projection),
            retraction: ints(&self.retraction),
            section: rows_to_strings(&self.section, format_gauss),
        }
    }

    pub fn from_json(j: &ExtensionJson) -> MhsResult<Self> {
        let sub = MixedHodgeStructure::from_json(&j.sub)?;
        let total = MixedHodgeStructure::from_json(&j.total)?;
        let quotient = MixedHodgeStructure::from_json(&j.quotient)?;
        let (a, h, b) = (sub.rank(), total.rank(), quotient.rank());
        let inclusion = parse_rows(&j.inclusion, Some(a), parse_int)?;
        let projection = parse_rows(&j.projection, Some(h), parse_int)?;
        let retraction = parse_rows(&j.retraction, Some(h), parse_int)?;
        let section: GaussMatrix = parse_rows(&j.section, Some(b), parse_gauss)?;
        ExtensionOfMHS::with_splitting(sub, total, quotient, inclusion, projection, retraction, section)
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{gauss, rat};
    use crate::mhs::random::{disguised_extension, separated_pair, small_gauss_matrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gauss_strings_roundtrip() {
        for z in [
            gauss(rat(1, 2), rat(0, 1)),
            gauss(rat(0, 1), rat(-3, 4)),
            gauss(rat(-5, 3), rat(7, 2)),
            gauss(rat(2, 1), rat(-1, 1)),
        ] {
            assert_eq!(parse_gauss(&format_gauss(&z)).unwrap(), z);
        }
        assert!(parse_gauss("1/0x").is_err());
    }

    #[test]
    fn extension_roundtrip_through_text() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (a, b) = separated_pair(&mut rng, 4);
        let r = small_gauss_matrix(&mut rng, a.rank(), b.rank());
        let e = disguised_extension(&mut rng, &a, &b, &r).unwrap();
        let text = serde_json::to_string(&e.to_json()).unwrap();
        let back: ExtensionJson = serde_json::from_str(&text).unwrap();
        let e2 = ExtensionOfMHS::from_json(&back).unwrap();
        assert_eq!(e, e2);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        for key in ["sub", "total", "quotient", "inclusion", "projection", "retraction", "section"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        for key in ["rank", "weights", "hodge"] {
            assert!(v["total"].get(key).is_some(), "{key}");
        }
    }
}
