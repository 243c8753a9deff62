//! Geometric extrapolation of slice sequences.

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::Amount;

/// Number of trailing increments inspected.
pub const TAIL_K: usize = 5;
/// Allowed spread of the ratios.
pub const TAIL_EPS: f64 = 0.01;
/// Ratios must stay below this in modulus.
pub const TAIL_R_MAX: f64 = 0.9;
/// Increments used to fit (two) and check (the rest) a two-term recurrence.
pub const TWO_TERM_SPAN: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailStatus {
    ResolvedGeometric,
    Truncated,
    DivergentSuspected,
}

impl TailStatus {
    pub fn name(self) -> &'static str {
        match self {
            TailStatus::ResolvedGeometric => "resolved-geometric",
            TailStatus::Truncated => "truncated",
            TailStatus::DivergentSuspected => "divergent-suspected",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tail {
    pub status: TailStatus,
    /// Extrapolated remainder beyond the last increment.
    pub value: Amount,
    pub ratio: Option<(f64, f64)>,
}

fn cdiv((a, b): (f64, f64), (c, d): (f64, f64)) -> Option<(f64, f64)> {
    let n = c * c + d * d;
    if n == 0.0 {
        return if a == 0.0 && b == 0.0 { Some((0.0, 0.0)) } else { None };
    }
    Some(((a * c + b * d) / n, (b * c - a * d) / n))
}

fn cabs((a, b): (f64, f64)) -> f64 {
    a.hypot(b)
}

/// Remainder of a sequence of increments ordered outward (the last element
/// is at the edge of the window), under the tail policy: the last
/// [`TAIL_K`] increments must have ratios within [`TAIL_EPS`] of one
/// constant `r` with `|r| <` [`TAIL_R_MAX`]; the remainder is then
/// `Δ_last · r/(1 − r)`, exact when the ratios are exactly equal. Exact
/// increments that are a sum of two geometric sequences are summed exactly
/// as well.
pub fn geometric_tail(p: u32, outward: &[Amount]) -> Tail {
    let truncated = |status| Tail {
        status,
        value: Amount::zero(p),
        ratio: None,
    };
    if outward.len() < TAIL_K {
        return truncated(TailStatus::Truncated);
    }
    let last = &outward[outward.len() - TAIL_K..];
    let edge = &last[TAIL_K - 1];

    let exact: Option<Vec<BigRational>> = last.windows(2).map(|w| w[1].exact_ratio(&w[0])).collect();
    if let Some(rs) = exact {
        let r = &rs[0];
        if rs.iter().all(|x| x == r) {
            let rf = r.to_f64().unwrap_or(f64::INFINITY);
            if rf.abs() < TAIL_R_MAX {
                let factor = r / (BigRational::one() - r);
                return Tail {
                    status: TailStatus::ResolvedGeometric,
                    value: edge.scale(&factor),
                    ratio: Some((rf, 0.0)),
                };
            }
            if r.abs() >= BigRational::one() && !edge.is_zero() {
                return Tail {
                    status: TailStatus::DivergentSuspected,
                    value: Amount::zero(p),
                    ratio: Some((rf, 0.0)),
                };
            }
            return truncated(TailStatus::Truncated);
        }
    }

    if let Some((value, r)) = two_term_tail(outward) {
        return Tail {
            status: TailStatus::ResolvedGeometric,
            value: Amount::rational(p, value),
            ratio: Some((r, 0.0)),
        };
    }

    let ratios: Vec<Option<(f64, f64)>> = last.windows(2).map(|w| cdiv(w[1].to_complex(), w[0].to_complex())).collect();
    if ratios.iter().all(|r| r.map_or(true, |r| cabs(r) >= 1.0)) && !edge.is_zero() {
        return Tail {
            status: TailStatus::DivergentSuspected,
            value: Amount::zero(p),
            ratio: ratios.last().copied().flatten(),
        };
    }
    let Some(rs) = ratios.into_iter().collect::<Option<Vec<_>>>() else {
        return truncated(TailStatus::Truncated);
    };
    let r = rs[rs.len() - 1];
    let close = rs.iter().all(|x| cabs((x.0 - r.0, x.1 - r.1)) <= TAIL_EPS);
    if close && cabs(r) < TAIL_R_MAX {
        let factor = cdiv(r, (1.0 - r.0, -r.1)).unwrap_or((0.0, 0.0));
        return Tail {
            status: TailStatus::ResolvedGeometric,
            value: edge.mul_complex(factor),
            ratio: Some(r),
        };
    }
    truncated(TailStatus::Truncated)
}

/// Rational increments obeying `Δ_{n+2} = c1 Δ_{n+1} + c2 Δ_n` exactly (a
/// sum of two geometric sequences) on the last [`TWO_TERM_SPAN`] terms,
/// with both roots of `x² - c1 x - c2` of modulus below [`TAIL_R_MAX`].
/// Returns the exact remainder `(c1 Δ_N + c2 (Δ_N + Δ_{N-1})) / (1 - c1 - c2)`
/// and the larger root's modulus.
fn two_term_tail(outward: &[Amount]) -> Option<(BigRational, f64)> {
    if outward.len() < TWO_TERM_SPAN {
        return None;
    }
    let d: Vec<BigRational> = outward[outward.len() - TWO_TERM_SPAN..]
        .iter()
        .map(Amount::as_rational)
        .collect::<Option<_>>()?;
    let det = &d[1] * &d[1] - &d[0] * &d[2];
    if det.is_zero() {
        return None;
    }
    let c1 = (&d[1] * &d[2] - &d[0] * &d[3]) / &det;
    let c2 = (&d[1] * &d[3] - &d[2] * &d[2]) / &det;
    if d.windows(3).any(|w| w[2] != &c1 * &w[1] + &c2 * &w[0]) {
        return None;
    }
    // Schur–Cohn for x² - (c1/ρ) x - c2/ρ²: both roots inside |x| < ρ.
    let rho = BigRational::new(9.into(), 10.into());
    let (a1, a0) = (&c1 / &rho, &c2 / (&rho * &rho));
    if a0.abs() >= BigRational::one() || a1.abs() >= BigRational::one() - &a0 {
        return None;
    }
    let denom = BigRational::one() - &c1 - &c2;
    let n = d.len() - 1;
    let value = (&c1 * &d[n] + &c2 * (&d[n] + &d[n - 1])) / denom;
    let (f1, f2) = (c1.to_f64().unwrap_or(0.0), c2.to_f64().unwrap_or(0.0));
    let disc = f1 * f1 + 4.0 * f2;
    let r = if disc >= 0.0 { (f1.abs() + disc.sqrt()) / 2.0 } else { (-f2).sqrt() };
    Some((value, r))
}
