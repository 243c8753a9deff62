//! Truncated arithmetic in `Q_p` and `F_p((t))`.
//!
//! An element is stored as `ϖ^v · u` where the unit part `u` is known modulo
//! `ϖ^rel` (its *relative precision*), or exactly. Constants coming from
//! integer polynomials and the cell representatives produced by
//! [`FieldDesc::enumerate_ball`] are exact; inversion and negation in `Q_p`
//! generally are not. Operations never guess digits they do not know: a sum
//! whose known window cancels completely is a [`FieldError::PrecisionExhausted`].

mod literal;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use literal::{format_element, parse_element, parse_field, LiteralError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    /// `Q_p`.
    MixedChar,
    /// `F_p((t))`.
    EqualChar,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::MixedChar => "Qp",
            Family::EqualChar => "FpT",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Working precision used when a field spec omits `N`.
pub const DEFAULT_PRECISION: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldDesc {
    pub family: Family,
    pub p: u32,
    /// Number of stored ϖ-adic digits.
    pub precision: usize,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("inversion of exact zero")]
    InvertZero,
    #[error("ord of exact zero")]
    OrdOfZero,
    /// All known digits cancelled: the result is only known to lie in
    /// `ϖ^known_from · O`.
    #[error("precision exhausted: result only known to have valuation >= {known_from}")]
    PrecisionExhausted { known_from: i64 },
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldDesc {
    pub fn new(family: Family, p: u32, precision: usize) -> Result<FieldDesc, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::InvalidField(format!("{p} is not prime")));
        }
        if p >= 1 << 15 {
            return Err(FieldError::InvalidField(format!("p = {p} is too large (limit 32768)")));
        }
        if precision < 2 {
            return Err(FieldError::InvalidField(format!("precision must be at least 2, got {precision}")));
        }
        Ok(FieldDesc {
            family,
            p,
            precision,
        })
    }

    pub fn qp(p: u32, precision: usize) -> Result<FieldDesc, FieldError> {
        FieldDesc::new(Family::MixedChar, p, precision)
    }

    pub fn fpt(p: u32, precision: usize) -> Result<FieldDesc, FieldError> {
        FieldDesc::new(Family::EqualChar, p, precision)
    }

    /// Cardinality of the residue field.
    pub fn q(&self) -> u32 {
        self.p
    }

    fn pb(&self) -> BigInt {
        BigInt::from(self.p)
    }

    fn ppow(&self, k: usize) -> BigInt {
        num_traits::pow(self.pb(), k)
    }

    fn cap(&self, rel: Option<usize>) -> usize {
        rel.map_or(self.precision, |r| r.min(self.precision))
    }

    // ---- constructors ----

    pub fn zero(&self) -> VFElem {
        VFElem::Zero
    }

    pub fn one(&self) -> VFElem {
        self.embed_int(1)
    }

    /// The uniformizer ϖ (`p` in `Q_p`, `t` in `F_p((t))`).
    pub fn uniformizer(&self) -> VFElem {
        match self.family {
            Family::MixedChar => VFElem::Padic {
                val: 1,
                unit: BigInt::one(),
                rel: None,
            },
            Family::EqualChar => VFElem::Series {
                val: 1,
                coeffs: vec![1],
                rel: None,
            },
        }
    }

    pub fn embed_int(&self, n: i64) -> VFElem {
        self.embed_constant(&[BigInt::from(n)])
    }

    /// Image of the integer polynomial `Σ c_i t^i` under the constant
    /// embedding: integers go to `Z_p` (resp. reduce into `F_p`), `t` goes to
    /// the uniformizer.
    pub fn embed_constant(&self, coeffs: &[BigInt]) -> VFElem {
        match self.family {
            Family::MixedChar => {
                let mut acc = BigInt::zero();
                for c in coeffs.iter().rev() {
                    acc = acc * self.pb() + c;
                }
                self.padic_exact(0, acc)
            }
            Family::EqualChar => {
                let p = BigInt::from(self.p);
                let cs = coeffs
                    .iter()
                    .map(|c| c.mod_floor(&p).to_u32().unwrap_or(0))
                    .collect();
                self.series_exact(0, cs)
            }
        }
    }

    /// Element `Σ digits[i] ϖ^{val+i}`. Digits outside `[0, p)` are allowed and
    /// carried (`Q_p`) or reduced (`F_p((t))`). When `exact` is false the
    /// element is known modulo `ϖ^{val+precision}`.
    pub fn from_digits(&self, val: i64, digits: &[i64], exact: bool) -> VFElem {
        let window = if exact { None } else { Some(self.precision) };
        match self.family {
            Family::MixedChar => {
                let mut acc = BigInt::zero();
                for d in digits.iter().rev() {
                    acc = acc * self.pb() + BigInt::from(*d);
                }
                match window {
                    None => self.padic_exact(val, acc),
                    Some(w) => self.padic_window(val, acc, val + w as i64).unwrap_or(VFElem::Zero),
                }
            }
            Family::EqualChar => {
                let cs: Vec<u32> = digits.iter().map(|d| d.rem_euclid(self.p as i64) as u32).collect();
                match window {
                    None => self.series_exact(val, cs),
                    Some(w) => self.series_window(val, cs, val + w as i64).unwrap_or(VFElem::Zero),
                }
            }
        }
    }

    fn padic_exact(&self, val: i64, mut unit: BigInt) -> VFElem {
        if unit.is_zero() {
            return VFElem::Zero;
        }
        let p = self.pb();
        let mut val = val;
        loop {
            let (q, r) = unit.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            unit = q;
            val += 1;
        }
        VFElem::Padic {
            val,
            unit,
            rel: None,
        }
    }

    /// Normalizes `value · p^val` known modulo `p^abs_prec`.
    fn padic_window(&self, val: i64, value: BigInt, abs_prec: i64) -> Result<VFElem, FieldError> {
        if abs_prec <= val {
            return Err(FieldError::PrecisionExhausted { known_from: abs_prec });
        }
        let width = (abs_prec - val) as usize;
        let mut unit = value.mod_floor(&self.ppow(width));
        if unit.is_zero() {
            return Err(FieldError::PrecisionExhausted { known_from: abs_prec });
        }
        let p = self.pb();
        let mut val = val;
        loop {
            let (q, r) = unit.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            unit = q;
            val += 1;
        }
        let rel = ((abs_prec - val) as usize).min(self.precision);
        let unit = unit.mod_floor(&self.ppow(rel));
        Ok(VFElem::Padic {
            val,
            unit,
            rel: Some(rel),
        })
    }

    fn series_exact(&self, val: i64, mut coeffs: Vec<u32>) -> VFElem {
        let lead = coeffs.iter().position(|&c| c != 0);
        let Some(lead) = lead else {
            return VFElem::Zero;
        };
        coeffs.drain(..lead);
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        VFElem::Series {
            val: val + lead as i64,
            coeffs,
            rel: None,
        }
    }

    fn series_window(&self, val: i64, mut coeffs: Vec<u32>, abs_prec: i64) -> Result<VFElem, FieldError> {
        if abs_prec <= val {
            return Err(FieldError::PrecisionExhausted { known_from: abs_prec });
        }
        let width = (abs_prec - val) as usize;
        coeffs.resize(width, 0);
        let lead = coeffs
            .iter()
            .position(|&c| c != 0)
            .ok_or(FieldError::PrecisionExhausted { known_from: abs_prec })?;
        coeffs.drain(..lead);
        let rel = coeffs.len().min(self.precision);
        coeffs.truncate(rel);
        Ok(VFElem::Series {
            val: val + lead as i64,
            coeffs,
            rel: Some(rel),
        })
    }

    // ---- ring operations ----

    pub fn add(&self, x: &VFElem, y: &VFElem) -> Result<VFElem, FieldError> {
        let (xv, yv) = match (x.valuation(), y.valuation()) {
            (None, _) => return Ok(y.clone()),
            (_, None) => return Ok(x.clone()),
            (Some(a), Some(b)) => (a, b),
        };
        let vmin = xv.min(yv);
        let abs = match (x.abs_precision(), y.abs_precision()) {
            (None, None) => None,
            (a, b) => Some(a.unwrap_or(i64::MAX).min(b.unwrap_or(i64::MAX))),
        };
        match (x, y) {
            (VFElem::Padic { unit: ux, .. }, VFElem::Padic { unit: uy, .. }) => {
                let shift = |u: &BigInt, v: i64| -> Option<BigInt> {
                    let s = (v - vmin) as usize;
                    match abs {
                        Some(a) if v >= a => None,
                        _ => Some(u * self.ppow(s)),
                    }
                };
                let mut sum = BigInt::zero();
                if let Some(t) = shift(ux, xv) {
                    sum += t;
                }
                if let Some(t) = shift(uy, yv) {
                    sum += t;
                }
                match abs {
                    None => Ok(self.padic_exact(vmin, sum)),
                    Some(a) => self.padic_window(vmin, sum, a),
                }
            }
            (VFElem::Series { coeffs: cx, .. }, VFElem::Series { coeffs: cy, .. }) => {
                let width = match abs {
                    None => ((xv + cx.len() as i64).max(yv + cy.len() as i64) - vmin) as usize,
                    Some(a) => (a - vmin) as usize,
                };
                let mut out = vec![0u32; width];
                for (c, v) in [(cx, xv), (cy, yv)] {
                    let off = (v - vmin) as usize;
                    for (i, d) in c.iter().enumerate() {
                        if off + i < width {
                            out[off + i] = (out[off + i] + d) % self.p;
                        }
                    }
                }
                match abs {
                    None => Ok(self.series_exact(vmin, out)),
                    Some(a) => self.series_window(vmin, out, a),
                }
            }
            _ => Err(FieldError::InvalidField("operands from different field families".into())),
        }
    }

    pub fn neg(&self, x: &VFElem) -> VFElem {
        match x {
            VFElem::Zero => VFElem::Zero,
            VFElem::Padic { val, unit, rel } => match rel {
                None => VFElem::Padic {
                    val: *val,
                    unit: -unit,
                    rel: None,
                },
                Some(r) => VFElem::Padic {
                    val: *val,
                    unit: (-unit).mod_floor(&self.ppow(*r)),
                    rel: Some(*r),
                },
            },
            VFElem::Series { val, coeffs, rel } => VFElem::Series {
                val: *val,
                coeffs: coeffs.iter().map(|c| (self.p - c) % self.p).collect(),
                rel: *rel,
            },
        }
    }

    pub fn sub(&self, x: &VFElem, y: &VFElem) -> Result<VFElem, FieldError> {
        self.add(x, &self.neg(y))
    }

    pub fn mul(&self, x: &VFElem, y: &VFElem) -> Result<VFElem, FieldError> {
        let (xv, yv) = match (x.valuation(), y.valuation()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Ok(VFElem::Zero),
        };
        let rel = match (x.rel(), y.rel()) {
            (None, None) => None,
            (a, b) => Some(a.unwrap_or(usize::MAX).min(b.unwrap_or(usize::MAX)).min(self.precision)),
        };
        match (x, y) {
            (VFElem::Padic { unit: ux, .. }, VFElem::Padic { unit: uy, .. }) => {
                let prod = ux * uy;
                Ok(match rel {
                    None => VFElem::Padic {
                        val: xv + yv,
                        unit: prod,
                        rel: None,
                    },
                    Some(r) => VFElem::Padic {
                        val: xv + yv,
                        unit: prod.mod_floor(&self.ppow(r)),
                        rel: Some(r),
                    },
                })
            }
            (VFElem::Series { coeffs: cx, .. }, VFElem::Series { coeffs: cy, .. }) => {
                let width = rel.unwrap_or(cx.len() + cy.len() - 1);
                let mut out = vec![0u64; width];
                for (i, a) in cx.iter().enumerate().take(width) {
                    for (j, b) in cy.iter().enumerate() {
                        if i + j >= width {
                            break;
                        }
                        out[i + j] = (out[i + j] + (*a as u64) * (*b as u64)) % self.p as u64;
                    }
                }
                let out: Vec<u32> = out.into_iter().map(|c| c as u32).collect();
                Ok(match rel {
                    None => self.series_exact(xv + yv, out),
                    Some(r) => VFElem::Series {
                        val: xv + yv,
                        coeffs: out,
                        rel: Some(r),
                    },
                })
            }
            _ => Err(FieldError::InvalidField("operands from different field families".into())),
        }
    }

    pub fn inv(&self, x: &VFElem) -> Result<VFElem, FieldError> {
        match x {
            VFElem::Zero => Err(FieldError::InvertZero),
            VFElem::Padic { val, unit, rel } => {
                if rel.is_none() && unit.abs().is_one() {
                    return Ok(VFElem::Padic {
                        val: -val,
                        unit: unit.clone(),
                        rel: None,
                    });
                }
                let r = self.cap(*rel);
                let m = self.ppow(r);
                let u = unit.mod_floor(&m);
                let eg = u.extended_gcd(&m);
                Ok(VFElem::Padic {
                    val: -val,
                    unit: eg.x.mod_floor(&m),
                    rel: Some(r),
                })
            }
            VFElem::Series { val, coeffs, rel } => {
                let c0inv = rf_inv(self.p, coeffs[0]);
                if rel.is_none() && coeffs.len() == 1 {
                    return Ok(VFElem::Series {
                        val: -val,
                        coeffs: vec![c0inv],
                        rel: None,
                    });
                }
                let r = self.cap(*rel);
                let p = self.p as u64;
                let mut out = vec![0u32; r];
                out[0] = c0inv;
                for k in 1..r {
                    let mut s = 0u64;
                    for i in 1..=k.min(coeffs.len() - 1) {
                        s = (s + coeffs[i] as u64 * out[k - i] as u64) % p;
                    }
                    out[k] = (((p - s) % p) * c0inv as u64 % p) as u32;
                }
                Ok(VFElem::Series {
                    val: -val,
                    coeffs: out,
                    rel: Some(r),
                })
            }
        }
    }

    /// Power with a nonnegative exponent.
    pub fn pow(&self, x: &VFElem, e: u32) -> Result<VFElem, FieldError> {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, x)?;
        }
        Ok(acc)
    }

    /// Compares two elements: `Some(true)` when provably equal, `Some(false)`
    /// when provably different, `None` when they agree on every known digit.
    pub fn compare(&self, x: &VFElem, y: &VFElem) -> Option<bool> {
        match self.sub(x, y) {
            Ok(VFElem::Zero) => Some(true),
            Ok(_) => Some(false),
            Err(_) => None,
        }
    }

    // ---- ord / ac ----

    pub fn ord(&self, x: &VFElem) -> Result<i64, FieldError> {
        x.valuation().ok_or(FieldError::OrdOfZero)
    }

    /// Angular component: the first nonzero ϖ-adic digit, and 0 at 0.
    pub fn ac(&self, x: &VFElem) -> RFElem {
        match x {
            VFElem::Zero => RFElem(0),
            VFElem::Padic { unit, .. } => RFElem(unit.mod_floor(&self.pb()).to_u32().unwrap_or(0)),
            VFElem::Series { coeffs, .. } => RFElem(coeffs[0]),
        }
    }

    /// Digit of `x` at absolute index `i` (coefficient of `ϖ^i`), or `None`
    /// when `i` is beyond the known precision.
    pub fn digit_at(&self, x: &VFElem, i: i64) -> Option<u32> {
        match x {
            VFElem::Zero => Some(0),
            _ => {
                let v = x.valuation().unwrap_or(0);
                if i < v {
                    return Some(0);
                }
                if let Some(a) = x.abs_precision() {
                    if i >= a {
                        return None;
                    }
                }
                let k = (i - v) as usize;
                Some(match x {
                    VFElem::Padic { unit, .. } => {
                        let m = unit.mod_floor(&self.ppow(k + 1));
                        (m / self.ppow(k)).to_u32().unwrap_or(0)
                    }
                    VFElem::Series { coeffs, .. } => coeffs.get(k).copied().unwrap_or(0),
                    VFElem::Zero => 0,
                })
            }
        }
    }

    /// Known digits starting at the valuation, padded with zeros to the
    /// working precision for exact elements.
    pub fn digits(&self, x: &VFElem) -> Vec<u32> {
        let Some(v) = x.valuation() else {
            return Vec::new();
        };
        let n = self.cap(x.rel());
        (0..n as i64).filter_map(|k| self.digit_at(x, v + k)).collect()
    }

    // ---- residue field ----

    pub fn rf(&self, n: i64) -> RFElem {
        RFElem(n.rem_euclid(self.p as i64) as u32)
    }

    pub fn rf_add(&self, a: RFElem, b: RFElem) -> RFElem {
        RFElem((a.0 + b.0) % self.p)
    }

    pub fn rf_sub(&self, a: RFElem, b: RFElem) -> RFElem {
        RFElem((a.0 + self.p - b.0) % self.p)
    }

    pub fn rf_mul(&self, a: RFElem, b: RFElem) -> RFElem {
        RFElem(((a.0 as u64 * b.0 as u64) % self.p as u64) as u32)
    }

    pub fn rf_neg(&self, a: RFElem) -> RFElem {
        RFElem((self.p - a.0) % self.p)
    }

    /// Residue of an element of the valuation ring; `None` outside it.
    pub fn residue(&self, x: &VFElem) -> Option<RFElem> {
        match x.valuation() {
            None => Some(RFElem(0)),
            Some(v) if v > 0 => Some(RFElem(0)),
            Some(0) => Some(self.ac(x)),
            Some(_) => None,
        }
    }

    /// Lift of a residue class to its digit representative in `O_F`.
    pub fn lift(&self, a: RFElem) -> VFElem {
        self.embed_int(a.0 as i64)
    }

    // ---- cells ----

    /// Exact zero followed by one representative per class
    /// `{x : ord x = v, x fixed mod ϖ^{v+depth}}` for `v` in `[vmin, vmax]`,
    /// valuations ascending and digits lexicographic.
    pub fn enumerate_ball(&self, vmin: i64, vmax: i64, depth: usize) -> Vec<VFElem> {
        let mut out = vec![VFElem::Zero];
        for v in vmin..=vmax {
            out.extend(self.shell(v, depth));
        }
        out
    }

    /// The `(p-1)·p^(depth-1)` representatives at valuation `v`.
    pub fn shell(&self, v: i64, depth: usize) -> Vec<VFElem> {
        let depth = depth.max(1);
        let p = self.p as usize;
        let count = (p - 1) * p.pow(depth as u32 - 1);
        let mut out = Vec::with_capacity(count);
        let mut digits = vec![0u32; depth];
        digits[0] = 1;
        loop {
            out.push(match self.family {
                Family::MixedChar => {
                    let mut acc = BigInt::zero();
                    for d in digits.iter().rev() {
                        acc = acc * self.pb() + *d;
                    }
                    VFElem::Padic {
                        val: v,
                        unit: acc,
                        rel: None,
                    }
                }
                Family::EqualChar => self.series_exact(v, digits.clone()),
            });
            // Lexicographic successor, first digit most significant.
            let mut i = depth;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                let lo = if i == 0 { 1 } else { 0 };
                if digits[i] + 1 < self.p {
                    digits[i] += 1;
                    break;
                }
                digits[i] = lo;
            }
        }
    }

    /// The cell `{ord = v, first depth digits fixed}` is a coset of
    /// `ϖ^{v+depth} O` and has Haar mass `p^-e` for the returned `e`.
    pub fn cell_mass_exponent(&self, v: i64, depth: usize) -> i64 {
        v + depth as i64
    }
}

/// Truncated element of `Q_p` or `F_p((t))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum VFElem {
    /// Exact zero.
    Zero,
    /// `p^val · unit`; with `rel = Some(r)` the unit is known mod `p^r` and
    /// stored in `[0, p^r)`, with `rel = None` it is an exact integer prime
    /// to `p`.
    Padic { val: i64, unit: BigInt, rel: Option<usize> },
    /// `t^val · Σ coeffs[i] t^i`, `coeffs[0] != 0`; with `rel = None` the
    /// series is the finite polynomial shown.
    Series { val: i64, coeffs: Vec<u32>, rel: Option<usize> },
}

impl VFElem {
    pub fn is_zero(&self) -> bool {
        matches!(self, VFElem::Zero)
    }

    /// `None` for exact zero.
    pub fn valuation(&self) -> Option<i64> {
        match self {
            VFElem::Zero => None,
            VFElem::Padic { val, .. } | VFElem::Series { val, .. } => Some(*val),
        }
    }

    /// Relative precision; `None` when exact.
    pub fn rel(&self) -> Option<usize> {
        match self {
            VFElem::Zero => None,
            VFElem::Padic { rel, .. } | VFElem::Series { rel, .. } => *rel,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.rel().is_none()
    }

    /// The element is known modulo `ϖ^abs_precision`; `None` when exact.
    pub fn abs_precision(&self) -> Option<i64> {
        match (self.valuation(), self.rel()) {
            (Some(v), Some(r)) => Some(v + r as i64),
            _ => None,
        }
    }
}

/// Residue-field element in `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RFElem(pub u32);

impl fmt::Display for RFElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn rf_inv(p: u32, a: u32) -> u32 {
    let eg = (a as i64).extended_gcd(&(p as i64));
    eg.x.rem_euclid(p as i64) as u32
}
