use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::ser::SerializeStruct;

use crate::motivic::{rational_to_f64, Cyclo};

/// An integral value: exact (rational or cyclotomic) while every step was
/// exact, a float pair once an approximate tail entered.
#[derive(Clone, Debug, PartialEq)]
pub enum Amount {
    Exact(Cyclo),
    Float { re: f64, im: f64 },
}

impl Amount {
    pub fn zero(p: u32) -> Amount {
        Amount::Exact(Cyclo::zero(p))
    }

    pub fn rational(p: u32, r: BigRational) -> Amount {
        Amount::Exact(Cyclo::rational(p, r))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Amount::Exact(c) => c.is_zero(),
            Amount::Float { re, im } => *re == 0.0 && *im == 0.0,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Amount::Exact(_))
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            Amount::Exact(c) => c.as_rational(),
            Amount::Float { .. } => None,
        }
    }

    pub fn to_complex(&self) -> (f64, f64) {
        match self {
            Amount::Exact(c) => c.to_complex(),
            Amount::Float { re, im } => (*re, *im),
        }
    }

    pub fn abs(&self) -> f64 {
        let (re, im) = self.to_complex();
        re.hypot(im)
    }

    pub fn add(&self, o: &Amount) -> Amount {
        match (self, o) {
            (Amount::Exact(a), Amount::Exact(b)) => Amount::Exact(a.add(b)),
            _ => {
                let (a, b) = self.to_complex();
                let (c, d) = o.to_complex();
                Amount::Float { re: a + c, im: b + d }
            }
        }
    }

    pub fn scale(&self, r: &BigRational) -> Amount {
        match self {
            Amount::Exact(c) => Amount::Exact(c.scale(r)),
            Amount::Float { re, im } => {
                let f = rational_to_f64(r);
                Amount::Float { re: re * f, im: im * f }
            }
        }
    }

    /// Complex multiplication by a float pair.
    pub fn mul_complex(&self, (c, d): (f64, f64)) -> Amount {
        let (a, b) = self.to_complex();
        Amount::Float {
            re: a * c - b * d,
            im: a * d + b * c,
        }
    }

    /// `|self|`, exact for rationals.
    pub fn magnitude(&self) -> Amount {
        match self.as_rational() {
            Some(r) => Amount::Exact(Cyclo::rational(self.p_or(2), r.abs())),
            None => Amount::Float { re: self.abs(), im: 0.0 },
        }
    }

    fn p_or(&self, d: u32) -> u32 {
        match self {
            Amount::Exact(c) => c.p(),
            Amount::Float { .. } => d,
        }
    }

    /// Orders magnitudes: exactly when both are rational.
    pub fn cmp_abs(&self, o: &Amount) -> std::cmp::Ordering {
        match (self.as_rational(), o.as_rational()) {
            (Some(a), Some(b)) => a.abs().cmp(&b.abs()),
            _ => self.abs().total_cmp(&o.abs()),
        }
    }

    /// `self = r·prev` for a rational `r`, when both are exact.
    pub fn exact_ratio(&self, prev: &Amount) -> Option<BigRational> {
        match (self, prev) {
            (Amount::Exact(a), Amount::Exact(b)) => {
                if a.is_zero() && b.is_zero() {
                    Some(BigRational::zero())
                } else {
                    a.rational_multiple_of(b)
                }
            }
            _ => None,
        }
    }
}

impl fmt::Display for Amount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Amount::Exact(c) => write!(f, "{c}"),
            Amount::Float { re, im } if *im == 0.0 => write!(f, "{re}"),
            Amount::Float { re, im } => write!(f, "{re} + {im}i"),
        }
    }
}

impl serde::Serialize for Amount {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let (re, im) = self.to_complex();
        let mut st = s.serialize_struct("Amount", 3)?;
        st.serialize_field("exact", &matches!(self, Amount::Exact(_)).then(|| self.to_string()))?;
        st.serialize_field("re", &re)?;
        st.serialize_field("im", &im)?;
        st.end()
    }
}
