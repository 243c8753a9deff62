//! Exact arithmetic in the cyclotomic fields `Q(ζ_{p^k})`.
//!
//! An element is kept in the power basis `1, ζ, …, ζ^{φ(n)-1}` of the
//! smallest level `k` containing it (`n = p^k`, `ζ = e^{2πi/n}`). Reduction
//! uses `Σ_{j<p} ζ^{r + j·p^{k-1}} = 0`, which removes exactly the exponents
//! `≥ (p-1)·p^{k-1}`, so equal elements have equal representations.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `e^{2πi·exp/p^level}` with `exp` reduced and the level minimal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct RootOfUnity {
    pub p: u32,
    pub level: u32,
    pub exp: u64,
}

impl RootOfUnity {
    pub fn one(p: u32) -> RootOfUnity {
        RootOfUnity { p, level: 0, exp: 0 }
    }

    pub fn new(p: u32, level: u32, exp: u64) -> RootOfUnity {
        let n = (p as u64).pow(level);
        let mut r = RootOfUnity {
            p,
            level,
            exp: if n == 0 { 0 } else { exp % n },
        };
        while r.level > 0 && r.exp % p as u64 == 0 {
            r.exp /= p as u64;
            r.level -= 1;
        }
        r
    }

    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.level)
    }

    fn lifted(&self, level: u32) -> u64 {
        self.exp * (self.p as u64).pow(level - self.level)
    }

    pub fn mul(&self, o: &RootOfUnity) -> RootOfUnity {
        let level = self.level.max(o.level);
        RootOfUnity::new(self.p, level, self.lifted(level) + o.lifted(level))
    }

    pub fn conj(&self) -> RootOfUnity {
        RootOfUnity::new(self.p, self.level, self.order() - self.exp)
    }

    pub fn is_one(&self) -> bool {
        self.level == 0
    }

    /// `(cos θ, sin θ)`.
    pub fn to_complex(&self) -> (f64, f64) {
        let theta = TAU * self.exp as f64 / self.order() as f64;
        (theta.cos(), theta.sin())
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.level == 0 {
            f.write_str("1")
        } else {
            write!(f, "e(2pi i*{}/{})", self.exp, self.order())
        }
    }
}

/// An element of `Q(ζ_{p^k})` for some `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cyclo {
    p: u32,
    level: u32,
    coeffs: BTreeMap<u64, BigRational>,
}

impl Cyclo {
    pub fn zero(p: u32) -> Cyclo {
        Cyclo {
            p,
            level: 0,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn rational(p: u32, r: BigRational) -> Cyclo {
        let mut c = Cyclo::zero(p);
        if !r.is_zero() {
            c.coeffs.insert(0, r);
        }
        c
    }

    pub fn root(z: RootOfUnity) -> Cyclo {
        let mut c = Cyclo::zero(z.p);
        c.add_root(&z, &BigRational::one());
        c
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The value when it is rational.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.level {
            0 => Some(self.coeffs.get(&0).cloned().unwrap_or_else(BigRational::zero)),
            _ => None,
        }
    }

    fn lift_to(&mut self, level: u32) {
        if level <= self.level {
            return;
        }
        let f = (self.p as u64).pow(level - self.level);
        self.coeffs = std::mem::take(&mut self.coeffs).into_iter().map(|(e, c)| (e * f, c)).collect();
        self.level = level;
    }

    fn bump(&mut self, e: u64, c: &BigRational) {
        let entry = self.coeffs.entry(e).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&e);
        }
    }

    /// Rewrites exponents outside the power basis and lowers the level.
    fn normalize(&mut self) {
        if self.level > 0 {
            let m = (self.p as u64).pow(self.level - 1);
            let top = (self.p as u64 - 1) * m;
            let high: Vec<(u64, BigRational)> = self.coeffs.range(top..).map(|(e, c)| (*e, c.clone())).collect();
            for (e, c) in high {
                self.coeffs.remove(&e);
                let r = e - top;
                let neg = -c;
                for j in 0..self.p as u64 - 1 {
                    self.bump(r + j * m, &neg);
                }
            }
        }
        while self.level > 0 && self.coeffs.keys().all(|e| e % self.p as u64 == 0) {
            let p = self.p as u64;
            self.coeffs = std::mem::take(&mut self.coeffs).into_iter().map(|(e, c)| (e / p, c)).collect();
            self.level -= 1;
        }
        if self.coeffs.is_empty() {
            self.level = 0;
        }
    }

    /// `self += c·z`.
    pub fn add_root(&mut self, z: &RootOfUnity, c: &BigRational) {
        if c.is_zero() {
            return;
        }
        let level = self.level.max(z.level);
        self.lift_to(level);
        self.bump(z.lifted(level), c);
        self.normalize();
    }

    pub fn add(&self, o: &Cyclo) -> Cyclo {
        assert_eq!(self.p, o.p, "cyclotomic values over different primes");
        let level = self.level.max(o.level);
        let mut a = self.clone();
        a.lift_to(level);
        let mut b = o.clone();
        b.lift_to(level);
        for (e, c) in &b.coeffs {
            a.bump(*e, c);
        }
        a.normalize();
        a
    }

    pub fn sub(&self, o: &Cyclo) -> Cyclo {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Cyclo {
        Cyclo {
            p: self.p,
            level: self.level,
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }

    pub fn scale(&self, r: &BigRational) -> Cyclo {
        if r.is_zero() {
            return Cyclo::zero(self.p);
        }
        Cyclo {
            p: self.p,
            level: self.level,
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, c * r)).collect(),
        }
    }

    pub fn mul(&self, o: &Cyclo) -> Cyclo {
        let level = self.level.max(o.level);
        let n = (self.p as u64).pow(level);
        let mut a = self.clone();
        a.lift_to(level);
        let mut b = o.clone();
        b.lift_to(level);
        let mut out = Cyclo {
            p: self.p,
            level,
            coeffs: BTreeMap::new(),
        };
        for (e, c) in &a.coeffs {
            for (f, d) in &b.coeffs {
                out.bump((e + f) % n.max(1), &(c * d));
            }
        }
        out.normalize();
        out
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Cyclo {
        let mut out = Cyclo::zero(self.p);
        for (e, c) in &self.coeffs {
            let z = RootOfUnity::new(self.p, self.level, *e).conj();
            out.add_root(&z, c);
        }
        out
    }

    /// `|z|²`, exactly; it is a real element of the field.
    pub fn norm_sq(&self) -> Cyclo {
        self.mul(&self.conj())
    }

    /// The rational `r` with `self = r·o`, if there is one.
    pub fn rational_multiple_of(&self, o: &Cyclo) -> Option<BigRational> {
        let (k, c) = o.coeffs.iter().next()?;
        let r = self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero) / c;
        (o.scale(&r) == *self).then_some(r)
    }

    pub fn to_complex(&self) -> (f64, f64) {
        let n = (self.p as f64).powi(self.level as i32);
        let mut re = 0.0;
        let mut im = 0.0;
        for (e, c) in &self.coeffs {
            let w = rational_to_f64(c);
            let theta = TAU * *e as f64 / n;
            re += w * theta.cos();
            im += w * theta.sin();
        }
        (re, im)
    }

    pub fn abs(&self) -> f64 {
        let (re, im) = self.to_complex();
        re.hypot(im)
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() && d != 0.0 => n / d,
        _ => {
            // Scale down huge numerators/denominators before dividing.
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
            let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let n = (self.p as u64).pow(self.level);
        let mut first = true;
        for (e, c) in &self.coeffs {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            if *e == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "z{n}^{e}")?;
            } else {
                write!(f, "{mag}*z{n}^{e}")?;
            }
        }
        Ok(())
    }
}

impl serde::Serialize for Cyclo {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `BigRational` from an integer.
pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_sums_vanish() {
        for p in [2u32, 3, 5, 7] {
            for level in 1..=3 {
                let n = (p as u64).pow(level);
                let mut s = Cyclo::zero(p);
                for e in 0..n {
                    s.add_root(&RootOfUnity::new(p, level, e), &rat(1));
                }
                assert!(s.is_zero(), "p={p} level={level}: {s}");
            }
        }
    }

    #[test]
    fn levels_are_canonical() {
        let a = Cyclo::root(RootOfUnity::new(5, 2, 10));
        let b = Cyclo::root(RootOfUnity::new(5, 1, 2));
        assert_eq!(a, b);
        assert_eq!(a.level(), 1);
        // ζ^4 = -(1 + ζ + ζ² + ζ³) at level 1.
        let c = Cyclo::root(RootOfUnity::new(5, 1, 4));
        let mut d = Cyclo::rational(5, rat(-1));
        for e in 1..4 {
            d.add_root(&RootOfUnity::new(5, 1, e), &rat(-1));
        }
        assert_eq!(c, d);
    }

    #[test]
    fn gauss_sum_norm() {
        for p in [3u32, 5, 7, 11, 13] {
            let mut g = Cyclo::zero(p);
            for y in 0..p as u64 {
                g.add_root(&RootOfUnity::new(p, 1, y * y), &rat(1));
            }
            assert_eq!(g.norm_sq().as_rational(), Some(rat(p as i64)));
            assert!((g.abs() - (p as f64).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn products_match_roots() {
        let p = 3;
        let a = RootOfUnity::new(p, 2, 4);
        let b = RootOfUnity::new(p, 3, 7);
        assert_eq!(Cyclo::root(a).mul(&Cyclo::root(b)), Cyclo::root(a.mul(&b)));
        assert_eq!(Cyclo::root(a).mul(&Cyclo::root(a.conj())).as_rational(), Some(rat(1)));
        let x = Cyclo::root(a).add(&Cyclo::rational(p, rat(2)));
        assert_eq!(x.scale(&rat(-3)).rational_multiple_of(&x), Some(rat(-3)));
        assert_eq!(Cyclo::root(b).rational_multiple_of(&x), None);
    }
}
