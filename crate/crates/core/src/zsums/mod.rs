//! Finite sums `Σ c·∏(linear form)·q^(linear form)` over a Presburger
//! domain in `Z^r`, their exact evaluation, canonical merging, and bounds of
//! the shape `|h| ≤ q^{a+b|λ|}`.
//!
//! Text format (the domain defaults to all of `Z^r`):
//!
//! ```text
//! tsum h := 3*(L+1)*(2L-1)*q^(L-2) - 1/2*q^(-L) on {L >= 0}
//! ```
//!
//! `q` is reserved; every other identifier is a variable, ordered by first
//! appearance unless a header `tsum h(L, M) := ...` fixes the order.

mod bound;
mod parse;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::presburger::{PresburgerError, PresburgerSet};

pub use bound::{ceil_log, tsum_bound, BoundCertificate, BoundOptions, ProgressionCert, DEFAULT_Q0};
pub use parse::{parse_tsum, parse_tsum_at};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ZsumError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("point {0} is outside the domain")]
    OutsideDomain(String),
    #[error("expected {expected} coordinates, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("q must be at least 2, got {0}")]
    BadQ(u64),
    #[error("cap exceeded: {0}")]
    Cap(String),
    #[error(transparent)]
    Presburger(#[from] PresburgerError),
}

/// `c_0 + Σ c_i λ_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinForm {
    pub coeffs: Vec<i64>,
    pub constant: i64,
}

impl LinForm {
    pub fn constant(r: usize, c: i64) -> LinForm {
        LinForm {
            coeffs: vec![0; r],
            constant: c,
        }
    }

    pub fn var(r: usize, i: usize) -> LinForm {
        let mut coeffs = vec![0; r];
        coeffs[i] = 1;
        LinForm { coeffs, constant: 0 }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0)
    }

    pub fn is_zero(&self) -> bool {
        self.is_constant() && self.constant == 0
    }

    pub fn eval(&self, point: &[i128]) -> BigInt {
        let mut acc = BigInt::from(self.constant);
        for (c, x) in self.coeffs.iter().zip(point) {
            acc += BigInt::from(*c) * BigInt::from(*x);
        }
        acc
    }

    pub fn add(&self, o: &LinForm) -> LinForm {
        LinForm {
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect(),
            constant: self.constant + o.constant,
        }
    }

    pub fn scale(&self, k: i64) -> LinForm {
        LinForm {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
            constant: self.constant * k,
        }
    }

    fn content(&self) -> i64 {
        self.coeffs.iter().fold(self.constant.abs(), |g, c| g.gcd(c))
    }

    fn leading_sign(&self) -> i64 {
        self.coeffs
            .iter()
            .chain(std::iter::once(&self.constant))
            .find(|c| **c != 0)
            .map_or(0, |c| c.signum())
    }

    /// Renders with the given variable names, e.g. `2L-1`.
    pub fn render(&self, vars: &[String]) -> String {
        let mut out = String::new();
        for (c, v) in self.coeffs.iter().zip(vars) {
            if *c == 0 {
                continue;
            }
            let mag = c.abs();
            if *c < 0 {
                out.push('-');
            } else if !out.is_empty() {
                out.push('+');
            }
            if mag != 1 {
                out.push_str(&mag.to_string());
            }
            out.push_str(v);
        }
        if self.constant != 0 || out.is_empty() {
            if self.constant >= 0 && !out.is_empty() {
                out.push('+');
            }
            out.push_str(&self.constant.to_string());
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TsTerm {
    pub coeff: BigRational,
    pub factors: Vec<LinForm>,
    pub exponent: LinForm,
}

impl TsTerm {
    /// `coeff·∏ factors(λ)·q^{exponent(λ)}`.
    pub fn eval(&self, q: &BigInt, point: &[i128]) -> BigRational {
        let mut v = self.coeff.clone();
        for f in &self.factors {
            v *= BigRational::from_integer(f.eval(point));
        }
        v * q_pow(q, &self.exponent.eval(point))
    }

    /// Total degree of the polynomial part.
    pub fn degree(&self) -> usize {
        self.factors.iter().filter(|f| !f.is_constant()).count()
    }
}

/// `q^e` for a possibly negative integer `e`.
pub fn q_pow(q: &BigInt, e: &BigInt) -> BigRational {
    let n: u32 = e.abs().try_into().expect("exponent fits in u32");
    let p = num_traits::pow(q.clone(), n as usize);
    if e.is_negative() {
        BigRational::new(BigInt::one(), p)
    } else {
        BigRational::from_integer(p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermSum {
    pub name: String,
    pub vars: Vec<String>,
    pub terms: Vec<TsTerm>,
    pub domain: PresburgerSet,
}

impl TermSum {
    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn contains(&self, point: &[i128]) -> bool {
        let env: BTreeMap<String, i128> = self.vars.iter().cloned().zip(point.iter().copied()).collect();
        self.domain.contains_map(&env)
    }

    /// Value ignoring the domain.
    pub fn value_at(&self, q: &BigInt, point: &[i128]) -> BigRational {
        self.terms.iter().fold(BigRational::zero(), |acc, t| acc + t.eval(q, point))
    }
}

/// Exact value of `h` at `(q, λ)`.
pub fn tsum_eval(h: &TermSum, q: u64, point: &[i128]) -> Result<BigRational, ZsumError> {
    if q < 2 {
        return Err(ZsumError::BadQ(q));
    }
    if point.len() != h.dim() {
        return Err(ZsumError::Arity {
            expected: h.dim(),
            got: point.len(),
        });
    }
    if !h.contains(point) {
        let shown: Vec<String> = h.vars.iter().zip(point).map(|(v, x)| format!("{v}={x}")).collect();
        return Err(ZsumError::OutsideDomain(shown.join(", ")));
    }
    Ok(h.value_at(&BigInt::from(q), point))
}

fn term_key(t: &TsTerm) -> (LinForm, Vec<LinForm>) {
    (t.exponent.clone(), t.factors.clone())
}

fn canonical_term(t: &TsTerm) -> TsTerm {
    let mut coeff = t.coeff.clone();
    let mut factors = Vec::new();
    for f in &t.factors {
        if f.is_constant() {
            coeff *= BigRational::from_integer(f.constant.into());
            continue;
        }
        let g = f.content();
        let s = f.leading_sign();
        let k = g * s;
        coeff *= BigRational::from_integer(k.into());
        factors.push(LinForm {
            coeffs: f.coeffs.iter().map(|c| c / k).collect(),
            constant: f.constant / k,
        });
    }
    factors.sort();
    TsTerm {
        coeff,
        factors,
        exponent: t.exponent.clone(),
    }
}

/// Folds constant factors into the coefficient, scales every other factor
/// to content 1 with a positive leading coefficient, combines terms with
/// the same factor multiset and exponent, and drops zeros. Terms come out
/// by decreasing exponent, then decreasing factor list.
pub fn tsum_merge(h: &TermSum) -> TermSum {
    let mut acc: BTreeMap<(LinForm, Vec<LinForm>), BigRational> = BTreeMap::new();
    for t in &h.terms {
        let c = canonical_term(t);
        *acc.entry(term_key(&c)).or_insert_with(BigRational::zero) += c.coeff;
    }
    let mut terms: Vec<TsTerm> = acc
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|((exponent, factors), coeff)| TsTerm {
            coeff,
            factors,
            exponent,
        })
        .collect();
    terms.sort_by(|x, y| match y.exponent.cmp(&x.exponent) {
        Ordering::Equal => y.factors.cmp(&x.factors),
        o => o,
    });
    TermSum {
        name: h.name.clone(),
        vars: h.vars.clone(),
        terms,
        domain: h.domain.clone(),
    }
}

fn render_term(t: &TsTerm, vars: &[String], first: bool) -> String {
    let mut parts: Vec<String> = Vec::new();
    let neg = t.coeff.is_negative();
    let mag = t.coeff.abs();
    let only_coeff = t.factors.is_empty() && t.exponent.is_zero();
    if !mag.is_one() || only_coeff {
        parts.push(if mag.is_integer() {
            mag.numer().to_string()
        } else {
            format!("{}/{}", mag.numer(), mag.denom())
        });
    }
    for f in &t.factors {
        let s = f.render(vars);
        let bare = f.constant == 0 && f.coeffs.iter().filter(|c| **c != 0).count() == 1 && !f.coeffs.iter().any(|c| *c < 0);
        parts.push(if bare { s } else { format!("({s})") });
    }
    if !t.exponent.is_zero() {
        let s = t.exponent.render(vars);
        let plain = s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        parts.push(if plain { format!("q^{s}") } else { format!("q^({s})") });
    }
    let body = parts.join("*");
    match (first, neg) {
        (true, false) => body,
        (true, true) => format!("-{body}"),
        (false, false) => format!(" + {body}"),
        (false, true) => format!(" - {body}"),
    }
}

impl fmt::Display for TermSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tsum {}({}) := ", self.name, self.vars.join(", "))?;
        if self.terms.is_empty() {
            f.write_str("0")?;
        }
        for (i, t) in self.terms.iter().enumerate() {
            f.write_str(&render_term(t, &self.vars, i == 0))?;
        }
        if self.domain.is_universe_syntactically() {
            f.write_str(";")
        } else {
            write!(f, " on {{{}}}", self.domain)
        }
    }
}
