//! Expressiveness indicators of binary matrices and the probability that two
//! uniformly random sample matrices share all indicators.
//!
//! Vectors of length n are packed into `u32` with row i at bit i. Columns of
//! `A` are stored in the order given; [`BinaryMatrix::canonical`] sorts them
//! by Hamming weight, then by packed value.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MAX_ROWS: usize = 20;

/// Default cap on 2tn, the number of random bits in a pair (x, y).
pub const DEFAULT_BRUTE_FORCE_BITS: usize = 30;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid column {index}: {reason}")]
    InvalidColumn { index: usize, reason: String },
    #[error("instance needs {needed} bits of enumeration, cap is {cap}")]
    InstanceTooLarge { needed: usize, cap: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, ExprError>;

/// n × cols binary matrix, column-major, one packed word per column.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    rows: usize,
    columns: Vec<u32>,
}

impl BinaryMatrix {
    pub fn new(rows: usize, columns: Vec<u32>) -> Result<Self> {
        if rows > MAX_ROWS {
            return Err(ExprError::ShapeMismatch(format!("{rows} rows exceeds {MAX_ROWS}")));
        }
        if let Some(index) = columns.iter().position(|&c| c >> rows != 0) {
            return Err(ExprError::InvalidColumn {
                index,
                reason: format!("bits set beyond row {rows}"),
            });
        }
        Ok(Self { rows, columns })
    }

    /// Column-coefficient matrix: columns nonzero and pairwise distinct.
    pub fn coefficients(rows: usize, columns: Vec<u32>) -> Result<Self> {
        let m = Self::new(rows, columns)?;
        for (index, &c) in m.columns.iter().enumerate() {
            if c == 0 {
                return Err(ExprError::InvalidColumn {
                    index,
                    reason: "zero column".into(),
                });
            }
            if m.columns[..index].contains(&c) {
                return Err(ExprError::InvalidColumn {
                    index,
                    reason: "duplicate column".into(),
                });
            }
        }
        Ok(m)
    }

    /// Parse from row-major 0/1 entries.
    pub fn from_rows(rows: &[&[u8]]) -> Result<Self> {
        let n = rows.len();
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(ExprError::ShapeMismatch("ragged rows".into()));
        }
        let columns = (0..cols)
            .map(|j| (0..n).fold(0u32, |acc, i| acc | (u32::from(rows[i][j] != 0) << i)))
            .collect();
        Self::new(n, columns)
    }

    /// Parse one bitstring per column; character i is row i.
    pub fn from_bitstrings<S: AsRef<str>>(columns: &[S]) -> Result<Self> {
        let rows = columns.first().map_or(0, |c| c.as_ref().len());
        let mut packed = Vec::with_capacity(columns.len());
        for (index, col) in columns.iter().enumerate() {
            let s = col.as_ref();
            if s.len() != rows {
                return Err(ExprError::ShapeMismatch(format!(
                    "column {index} has length {}, expected {rows}",
                    s.len()
                )));
            }
            let mut word = 0u32;
            for (i, ch) in s.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => word |= 1 << i,
                    _ => {
                        return Err(ExprError::InvalidColumn {
                            index,
                            reason: format!("character {ch:?} is not 0 or 1"),
                        })
                    }
                }
            }
            packed.push(word);
        }
        Self::new(rows, packed)
    }

    pub fn to_bitstrings(&self) -> Vec<String> {
        self.columns
            .iter()
            .map(|&c| (0..self.rows).map(|i| if c >> i & 1 == 1 { '1' } else { '0' }).collect())
            .collect()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[u32] {
        &self.columns
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.columns[col] >> row & 1 == 1
    }

    /// Columns sorted by (weight, packed value).
    pub fn canonical(&self) -> Self {
        let mut columns = self.columns.clone();
        columns.sort_by_key(|&c| (c.count_ones(), c));
        Self {
            rows: self.rows,
            columns,
        }
    }

    pub fn with_columns(&self, columns: Vec<u32>) -> Result<Self> {
        Self::new(self.rows, columns)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::coefficients(n, (0..n).map(|i| 1 << i).collect())
    }

    /// Weight-one columns plus weight-two columns through row 0.
    pub fn star(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(ExprError::InvalidParameter("star needs n ≥ 1".into()));
        }
        let mut cols: Vec<u32> = (0..n).map(|i| 1 << i).collect();
        cols.extend((1..n).map(|j| 1 | 1 << j));
        Self::coefficients(n, cols)
    }

    /// All 2ⁿ − 1 nonzero columns.
    pub fn maximal(n: usize) -> Result<Self> {
        weight_leq_k_matrix(n, n)
    }
}

/// All nonzero columns of weight ≤ k, in canonical order.
pub fn weight_leq_k_matrix(n: usize, k: usize) -> Result<BinaryMatrix> {
    if k == 0 || k > n || n > MAX_ROWS {
        return Err(ExprError::InvalidParameter(format!("need 1 ≤ k ≤ n ≤ {MAX_ROWS}, got n={n}, k={k}")));
    }
    let cols: Vec<u32> = (1u32..1 << n).filter(|c| c.count_ones() as usize <= k).collect();
    Ok(BinaryMatrix::coefficients(n, cols)?.canonical())
}

fn parity(x: u32) -> u32 {
    x.count_ones() & 1
}

/// m_i = Σ_j ⟨a_i, x_j⟩ mod 2, summed over the integers.
pub fn indicators(a: &BinaryMatrix, x: &BinaryMatrix) -> Result<Vec<u32>> {
    if a.rows != x.rows {
        return Err(ExprError::ShapeMismatch(format!("A has {} rows, x has {}", a.rows, x.rows)));
    }
    Ok(indicator_values(&a.columns, &x.columns))
}

fn indicator_values(a: &[u32], x: &[u32]) -> Vec<u32> {
    a.iter().map(|&ai| x.iter().map(|&xj| parity(ai & xj)).sum()).collect()
}

/// Exact probability as a fraction of big integers.
pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

fn pow2(e: usize) -> BigInt {
    BigInt::one() << e
}

/// P(m(x) = m(y)) over uniform n × t matrices x, y by histogramming the
/// 2^{tn} indicator vectors and summing squared counts.
pub fn match_probability_bruteforce(a: &BinaryMatrix, t: usize, max_bits: usize) -> Result<BigRational> {
    let bits = 2 * t * a.rows;
    if bits > max_bits || t * a.rows >= 63 {
        return Err(ExprError::InstanceTooLarge {
            needed: bits,
            cap: max_bits,
        });
    }
    let n = a.rows;
    let mask = if n == 0 { 0 } else { (1u64 << n) - 1 };
    let total = 1u64 << (t * n);
    let hist = (0..total)
        .into_par_iter()
        .fold(HashMap::<Vec<u32>, u64>::new, |mut h, code| {
            let x: Vec<u32> = (0..t).map(|j| ((code >> (j * n)) & mask) as u32).collect();
            *h.entry(indicator_values(&a.columns, &x)).or_default() += 1;
            h
        })
        .reduce(HashMap::new, |mut acc, h| {
            for (k, v) in h {
                *acc.entry(k).or_default() += v;
            }
            acc
        });
    let pairs: BigUint = hist.values().map(|&c| BigUint::from(c) * c).sum();
    Ok(ratio(pairs, pow2(bits)))
}

/// Identity A: C(2t, t)ⁿ / 2^{2tn}.
pub fn closed_form_identity(n: usize, t: usize) -> BigRational {
    let c: BigInt = binomial(BigInt::from(2 * t), BigInt::from(t));
    ratio(num_traits::pow(c, n), pow2(2 * t * n))
}

/// Star A: Σ_k (C(2k,k)·C(2(t−k),t−k))^{n−1} · C(t,k)² / 2^{2tn}.
pub fn closed_form_star(n: usize, t: usize) -> Result<BigRational> {
    if n == 0 {
        return Err(ExprError::InvalidParameter("star needs n ≥ 1".into()));
    }
    let central = |k: usize| -> BigInt { binomial(BigInt::from(2 * k), BigInt::from(k)) };
    let sum: BigInt = (0..=t)
        .map(|k| {
            let ctk: BigInt = binomial(BigInt::from(t), BigInt::from(k));
            num_traits::pow(central(k) * central(t - k), n - 1) * &ctk * &ctk
        })
        .sum();
    Ok(ratio(sum, pow2(2 * t * n)))
}

/// Largest n accepted by [`maximal_abelian_probability`].
pub const MAX_ABELIAN_ROWS: usize = 16;

/// Full A: two uniform strings of length t over 2ⁿ symbols are anagrams.
/// The count Σ multinomial(t; c)² is (t!)² [zᵗ] (Σ_k zᵏ/(k!)²)^{2ⁿ}, with the
/// power taken by n squarings of a degree-t truncated series.
pub fn maximal_abelian_probability(n: usize, t: usize) -> Result<BigRational> {
    if n > MAX_ABELIAN_ROWS {
        return Err(ExprError::InstanceTooLarge {
            needed: n,
            cap: MAX_ABELIAN_ROWS,
        });
    }
    let mut fact = vec![BigInt::one()];
    for k in 1..=t {
        let next = &fact[k - 1] * BigInt::from(k);
        fact.push(next);
    }
    let mut series: Vec<BigRational> = (0..=t)
        .map(|k| BigRational::new(BigInt::one(), &fact[k] * &fact[k]))
        .collect();
    for _ in 0..n {
        series = truncated_square(&series);
    }
    let count = &series[t] * BigRational::from_integer(&fact[t] * &fact[t]);
    Ok(count / BigRational::from_integer(pow2(2 * t * n)))
}

fn truncated_square(p: &[BigRational]) -> Vec<BigRational> {
    let len = p.len();
    (0..len)
        .map(|d| (0..=d).fold(BigRational::zero(), |acc, i| acc + &p[i] * &p[d - i]))
        .collect()
}

/// φ_x = Σ_i θ_i (−1)^{⟨a_i, x⟩} for every x ∈ {0,1}ⁿ, indexed by packed x.
pub fn circuit_phases(a: &BinaryMatrix, theta: &[f64]) -> Result<Vec<f64>> {
    if theta.len() != a.cols() {
        return Err(ExprError::ShapeMismatch(format!(
            "{} angles for {} columns",
            theta.len(),
            a.cols()
        )));
    }
    Ok((0u32..1 << a.rows)
        .map(|x| {
            a.columns
                .iter()
                .zip(theta)
                .map(|(&c, &th)| if parity(c & x) == 0 { th } else { -th })
                .sum()
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Brute,
    Identity,
    Star,
    Maximal,
}

/// Dispatch on `method`. Closed forms check that `a` is the matching family.
pub fn match_probability(a: &BinaryMatrix, t: usize, method: Method, max_bits: usize) -> Result<BigRational> {
    let n = a.rows;
    let expect = |family: BinaryMatrix, name: &str| -> Result<()> {
        if a.canonical() == family.canonical() {
            Ok(())
        } else {
            Err(ExprError::InvalidParameter(format!("A is not the {name} family on {n} rows")))
        }
    };
    match method {
        Method::Brute => match_probability_bruteforce(a, t, max_bits),
        Method::Identity => {
            expect(BinaryMatrix::identity(n)?, "identity")?;
            Ok(closed_form_identity(n, t))
        }
        Method::Star => {
            expect(BinaryMatrix::star(n)?, "star")?;
            closed_form_star(n, t)
        }
        Method::Maximal => {
            expect(BinaryMatrix::maximal(n)?, "maximal")?;
            maximal_abelian_probability(n, t)
        }
    }
}

/// JSON form of a probability: each part a number when it fits in u64, a
/// decimal string otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalJson {
    pub num: serde_json::Value,
    pub den: serde_json::Value,
}

impl From<&BigRational> for RationalJson {
    fn from(r: &BigRational) -> Self {
        let part = |x: &BigInt| match x.to_u64() {
            Some(v) => serde_json::Value::from(v),
            None => serde_json::Value::from(x.to_string()),
        };
        Self {
            num: part(r.numer()),
            den: part(r.denom()),
        }
    }
}
