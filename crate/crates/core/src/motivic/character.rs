//! The canonical additive character and its unit twists.
//!
//! `Q_p`: `Λ(x) = e^{2πi·{x/p}}` with `{·}` the `p`-adic fractional part.
//! `F_p((t))`: `Λ(Σ a_i t^i) = e^{2πi·(Σ_{i≤0} a_i)/p}`.
//! Both are trivial on `ϖO` and nontrivial on `O`, and both only read the
//! digits at indices `≤ 0`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::localfield::{Family, FieldDesc, RFElem, VFElem};

use super::cyclo::RootOfUnity;
use super::MotivicError;

/// A value of a character: an exact root of unity and its float rendering.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CharacterValue {
    pub root: RootOfUnity,
    pub re: f64,
    pub im: f64,
}

impl CharacterValue {
    pub fn from_root(root: RootOfUnity) -> CharacterValue {
        let (re, im) = root.to_complex();
        CharacterValue { root, re, im }
    }
}

/// `x ↦ Λ(c·x)` for an integer unit `c`; the induced residue character is
/// `u ↦ Λ̄(c·u)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Twist {
    pub c: i64,
}

impl Twist {
    pub fn canonical(_p: u32) -> Twist {
        Twist { c: 1 }
    }

    /// Fails unless `c` is a unit at `p`.
    pub fn new(p: u32, c: i64) -> Result<Twist, MotivicError> {
        if c.rem_euclid(p as i64) == 0 {
            return Err(MotivicError::Parse(format!("twist {c} is not a unit at p = {p}")));
        }
        Ok(Twist { c })
    }

    /// `Λ̄(c·u)`.
    pub fn residue(&self, fd: &FieldDesc, u: RFElem) -> RootOfUnity {
        let e = (u.0 as i64 * self.c).rem_euclid(fd.p as i64);
        RootOfUnity::new(fd.p, 1, e as u64)
    }
}

fn root_of(fd: &FieldDesc, x: &VFElem) -> Result<RootOfUnity, MotivicError> {
    let v = match x.valuation() {
        None => return Ok(RootOfUnity::one(fd.p)),
        Some(v) if v >= 1 => return Ok(RootOfUnity::one(fd.p)),
        Some(v) => v,
    };
    if fd.digit_at(x, 0).is_none() {
        return Err(MotivicError::Precision(format!(
            "digits known below index {} only, the character reads index 0",
            x.abs_precision().unwrap_or(0)
        )));
    }
    let digits = (v..=0).map(|i| fd.digit_at(x, i).unwrap_or(0));
    match fd.family {
        Family::MixedChar => {
            // N = Σ_{i=v}^{0} c_i p^{i-v}, root e^{2πi N / p^{1-v}}.
            let level = (1 - v) as u32;
            let n = (fd.p as u64).checked_pow(level).filter(|n| *n < 1 << 62).ok_or_else(|| {
                MotivicError::Precision(format!("valuation {v} is too negative for an exact root of unity"))
            })?;
            let mut acc = BigInt::from(0);
            let mut scale = BigInt::from(1);
            for d in digits {
                acc += &scale * d;
                scale *= fd.p;
            }
            let e = (acc % BigInt::from(n)).to_u64().unwrap_or(0);
            Ok(RootOfUnity::new(fd.p, level, e))
        }
        Family::EqualChar => {
            let s: u64 = digits.map(u64::from).sum();
            Ok(RootOfUnity::new(fd.p, 1, s % fd.p as u64))
        }
    }
}

/// `Λ(x)`; fails when the digit at index 0 is beyond the known precision.
pub fn canonical_character(fd: &FieldDesc, x: &VFElem) -> Result<CharacterValue, MotivicError> {
    root_of(fd, x).map(CharacterValue::from_root)
}

/// `Λ̄(u) = e^{2πi u/p}`.
pub fn residue_character(fd: &FieldDesc, u: RFElem) -> CharacterValue {
    CharacterValue::from_root(RootOfUnity::new(fd.p, 1, u.0 as u64))
}

/// `Λ(c·x)`.
pub fn twisted_character(fd: &FieldDesc, twist: &Twist, x: &VFElem) -> Result<CharacterValue, MotivicError> {
    if twist.c == 1 {
        return canonical_character(fd, x);
    }
    let cx = fd.mul(&fd.embed_int(twist.c), x).map_err(|e| MotivicError::Precision(e.to_string()))?;
    canonical_character(fd, &cx)
}
