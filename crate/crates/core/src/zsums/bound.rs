//! Minimal `(a, b)` with `|h(q, λ)| ≤ q^{a+b|λ|}` for all integers
//! `q ≥ q0` and all `λ` in the domain.
//!
//! One variable: the domain splits into points and rays `λ = ε·u`,
//! `u = u0 + m·k`. On a ray, `h·q^{-a-bu}` is a sum of pieces
//! `c·u^d·q^{k·u+l}` and is governed by the pieces of largest slope `k`.
//! For `b` below the dominant slope (or equal to it with a `u`-dependent
//! dominant group) the quotient is unbounded; this gives the minimal `b`
//! by a slope/degree argument. For a candidate `a`, the slope-0 part
//! `γ(q)` and the decaying rest `T(q, u)` are separated: beyond a
//! threshold `U*`, `|T| ≤ C·u^D·q^{L-u}` is below the margin
//! `min(1 - γ, 1 + γ) ≥ μ·q^δ`, and below `U*` every `u` is checked exactly
//! as a Laurent polynomial in `q` (root bound, then finitely many `q`).
//!
//! Several variables: no certificate; the smallest `b` whose required `a`
//! is the same on the windows `[-30, 30]^r` and `[-60, 60]^r` is returned.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::presburger::{normalize_1d, Direction, Progression1D};

use super::{q_pow, tsum_merge, TermSum, ZsumError};

pub const DEFAULT_Q0: u64 = 2;
/// Largest `q` range enumerated when checking a Laurent polynomial.
const Q_SPAN_CAP: u64 = 200_000;
/// Largest threshold `U*` searched for.
const U_CAP: i64 = 5_000;
/// How far above the window lower bound `a` is searched.
const A_SLACK: i64 = 16;
const WINDOW: i128 = 60;
const WINDOW_QS: std::ops::RangeInclusive<u64> = 2..=13;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundOptions {
    pub q0: u64,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions { q0: DEFAULT_Q0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProgressionCert {
    /// The piece of the domain, e.g. `{3}` or `0 + 2N`.
    pub progression: String,
    /// Largest exponent slope in `|λ|` among non-cancelling terms.
    pub dominant_slope: Option<i64>,
    /// Degree in `|λ|` of the dominant group.
    pub dominant_degree: usize,
    /// Rendering of the dominant term (ties: degree, then coefficient sum).
    pub dominant_term: Option<String>,
    /// Smallest `b` this piece allows.
    pub b_needed: Option<i64>,
    /// `|λ|` from which the decaying part is bounded analytically.
    pub threshold: Option<i64>,
    /// Number of values of `λ` checked exactly as polynomials in `q`.
    pub exact_checks: usize,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundCertificate {
    pub a: i64,
    pub b: i64,
    pub q0: u64,
    /// Whether the bound is proved for all `q ≥ q0` and the whole domain.
    pub certified: bool,
    /// Whether `(a-1, b)` and `(a, b-1)` are shown to fail.
    pub minimal: bool,
    /// A point `(q, λ)` where `(a-1, b)` fails, when `a > 0`.
    pub a_witness: Option<(u64, Vec<i128>)>,
    pub b_argument: String,
    pub b_cap: i64,
    pub progressions: Vec<ProgressionCert>,
}

type Laurent = BTreeMap<i64, BigRational>;

fn lr_add(p: &mut Laurent, k: i64, c: BigRational) {
    if c.is_zero() {
        return;
    }
    let e = p.entry(k).or_insert_with(BigRational::zero);
    *e += c;
    if e.is_zero() {
        p.remove(&k);
    }
}

fn lr_value(p: &Laurent, q: &BigInt) -> BigRational {
    p.iter()
        .fold(BigRational::zero(), |acc, (k, c)| acc + c * q_pow(q, &BigInt::from(*k)))
}

/// `P(q) ≥ 0` for every integer `q ≥ q0`.
fn nonneg_from(p: &Laurent, q0: u64) -> Result<bool, ZsumError> {
    let (Some((&lo, _)), Some((&hi, _))) = (p.iter().next(), p.iter().next_back()) else {
        return Ok(true);
    };
    let den = p.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let coeffs: Vec<BigInt> = (lo..=hi)
        .map(|k| p.get(&k).map_or_else(BigInt::zero, |c| (c * BigRational::from_integer(den.clone())).to_integer()))
        .collect();
    let n = coeffs.len() - 1;
    let lead = &coeffs[n];
    if lead.is_negative() {
        return Ok(false);
    }
    let horner = |q: &BigInt| coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * q + c);
    // Beyond R the leading term outweighs the rest: |a_n| R^n > Σ |a_i| R^i.
    let dominates = |r: &BigInt| {
        let mut rest = BigInt::zero();
        let mut pw = BigInt::one();
        for c in &coeffs[..n] {
            rest += c.abs() * &pw;
            pw *= r;
        }
        lead * pw > rest
    };
    // Fujiwara-style estimate, then certified by `dominates`.
    let lf = lead.to_f64().unwrap_or(f64::MAX);
    let mut est = 1.0f64;
    for (i, c) in coeffs[..n].iter().enumerate() {
        let ratio = c.abs().to_f64().unwrap_or(f64::MAX) / lf;
        if ratio > 0.0 {
            est = est.max(2.0 * ratio.powf(1.0 / (n - i) as f64));
        }
    }
    let mut r = BigInt::from((est.min(1e15) as u64).max(q0) + 1);
    while !dominates(&r) {
        r *= 2;
    }
    let r_u = r.to_u64().unwrap_or(u64::MAX);
    if r_u.saturating_sub(q0) > Q_SPAN_CAP {
        return Err(ZsumError::Cap(format!(
            "root bound {r} leaves more than {Q_SPAN_CAP} values of q to check"
        )));
    }
    for q in q0..r_u {
        if horner(&BigInt::from(q)).is_negative() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `|P(q)| ≤ 1` for every integer `q ≥ q0`.
fn within_one(p: &Laurent, q0: u64) -> Result<bool, ZsumError> {
    for s in [1i64, -1] {
        let mut m: Laurent = Laurent::new();
        lr_add(&mut m, 0, BigRational::one());
        for (k, c) in p {
            lr_add(&mut m, *k, -BigRational::from_integer(s.into()) * c);
        }
        if !nonneg_from(&m, q0)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `h(q, λ)` at a fixed `λ` as a Laurent polynomial in `q`.
fn at_point(h: &TermSum, lambda: i128) -> Laurent {
    let mut out = Laurent::new();
    for t in &h.terms {
        let mut c = t.coeff.clone();
        for f in &t.factors {
            c *= BigRational::from_integer(f.eval(&[lambda]));
        }
        let e = t.exponent.eval(&[lambda]).to_i64().expect("exponent fits in i64");
        lr_add(&mut out, e, c);
    }
    out
}

fn shift(p: &Laurent, by: i64) -> Laurent {
    p.iter().map(|(k, c)| (k + by, c.clone())).collect()
}

/// `h(q, ε·u) = Σ c·u^d·q^{s·u + l}`, keyed by `(s, l, d)`.
type Pieces = BTreeMap<(i64, i64, usize), BigRational>;

fn ray_pieces(h: &TermSum, eps: i64) -> Pieces {
    let mut out = Pieces::new();
    for t in &h.terms {
        // Product of the factors as a polynomial in u.
        let mut poly: Vec<BigInt> = vec![BigInt::one()];
        for f in &t.factors {
            let (c0, c1) = (BigInt::from(f.constant), BigInt::from(f.coeffs[0] * eps));
            let mut next = vec![BigInt::zero(); poly.len() + 1];
            for (i, a) in poly.iter().enumerate() {
                next[i] += a * &c0;
                next[i + 1] += a * &c1;
            }
            poly = next;
        }
        let s = t.exponent.coeffs[0] * eps;
        let l = t.exponent.constant;
        for (d, a) in poly.into_iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let e = out.entry((s, l, d)).or_insert_with(BigRational::zero);
            *e += &t.coeff * BigRational::from_integer(a);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Value at a fixed `u` of `Σ c·u^d·q^{(s-b)·u + l - a}` as a Laurent polynomial.
fn pieces_at(pieces: &Pieces, u: i64, a: i64, b: i64) -> Laurent {
    let mut out = Laurent::new();
    let ub = BigRational::from_integer(u.into());
    for ((s, l, d), c) in pieces {
        lr_add(&mut out, (s - b) * u + l - a, c * num_traits::pow(ub.clone(), *d));
    }
    out
}

struct RayShape {
    slope: Option<i64>,
    degree: usize,
    b_needed: Option<i64>,
}

fn ray_shape(pieces: &Pieces) -> RayShape {
    let Some(top) = pieces.keys().map(|k| k.0).max() else {
        return RayShape {
            slope: None,
            degree: 0,
            b_needed: None,
        };
    };
    let degree = pieces.keys().filter(|k| k.0 == top).map(|k| k.2).max().unwrap_or(0);
    RayShape {
        slope: Some(top),
        degree,
        b_needed: Some(if degree == 0 { top } else { top + 1 }),
    }
}

/// The dominant term: largest slope in `|λ|`, then degree, then coefficient sum.
fn dominant_term(h: &TermSum, eps: i64) -> Option<String> {
    h.terms
        .iter()
        .max_by(|x, y| {
            let kx = (x.exponent.coeffs[0] * eps, x.degree());
            let ky = (y.exponent.coeffs[0] * eps, y.degree());
            kx.cmp(&ky).then_with(|| x.coeff.cmp(&y.coeff))
        })
        .map(|t| super::render_term(t, &h.vars, true))
}

enum RayCheck {
    Holds { threshold: i64, exact: usize },
    Fails(String),
}

/// Lower bound `μ·q^δ ≤ M(q)` for all `q ≥ q0`, `μ > 0`, if there is one.
fn margin(m: &Laurent, q0: u64) -> Option<(BigRational, i64)> {
    let (&delta, top) = m.iter().next_back()?;
    if !top.is_positive() {
        return None;
    }
    let half = top / BigRational::from_integer(2.into());
    // Below-top coefficients in absolute value, scaled down by q^{k-δ}.
    let rest = |q: &BigInt| {
        m.iter()
            .filter(|(k, _)| **k < delta)
            .fold(BigRational::zero(), |acc, (k, c)| acc + c.abs() * q_pow(q, &BigInt::from(k - delta)))
    };
    let mut mu = half.clone();
    let mut q = q0;
    while rest(&BigInt::from(q)) > half {
        let v = lr_value(m, &BigInt::from(q)) * q_pow(&BigInt::from(q), &BigInt::from(-delta));
        if !v.is_positive() {
            return None;
        }
        mu = mu.min(v);
        q += 1;
        if q - q0 > Q_SPAN_CAP {
            return None;
        }
    }
    Some((mu, delta))
}

fn check_ray(pieces: &Pieces, u0: i64, step: i64, a: i64, b: i64, q0: u64) -> Result<RayCheck, ZsumError> {
    let shape = ray_shape(pieces);
    let Some(need) = shape.b_needed else {
        return Ok(RayCheck::Holds { threshold: u0, exact: 0 });
    };
    if need > b {
        return Ok(RayCheck::Fails(format!("needs b >= {need}")));
    }
    let mut gamma = Laurent::new();
    let mut tail: Vec<(i64, i64, usize, BigRational)> = Vec::new();
    for ((s, l, d), c) in pieces {
        let k = s - b;
        if k == 0 {
            debug_assert_eq!(*d, 0);
            lr_add(&mut gamma, l - a, c.clone());
        } else {
            tail.push((k, l - a, *d, c.clone()));
        }
    }
    if tail.is_empty() {
        return Ok(if within_one(&gamma, q0)? {
            RayCheck::Holds { threshold: u0, exact: 0 }
        } else {
            RayCheck::Fails("constant ratio exceeds 1 for some q".into())
        });
    }
    // Margins 1 - γ and 1 + γ.
    let mut margins = Vec::new();
    for s in [1i64, -1] {
        let mut m = Laurent::new();
        lr_add(&mut m, 0, BigRational::one());
        for (k, c) in &gamma {
            lr_add(&mut m, *k, -BigRational::from_integer(s.into()) * c);
        }
        match margin(&m, q0) {
            Some(x) => margins.push(x),
            None => return Ok(RayCheck::Fails("no positive margin around the slope-0 part".into())),
        }
    }
    let big_c: BigRational = tail.iter().fold(BigRational::zero(), |acc, t| acc + t.3.abs());
    let big_d = tail.iter().map(|t| t.2).max().unwrap_or(0);
    let big_l = tail.iter().map(|t| t.1).max().unwrap_or(0);
    let qb = BigInt::from(q0);
    // Smallest U ≥ u0 from which C·u^D·q0^{L-δ-u} ≤ μ for every larger u.
    let mut threshold = u0.max(1);
    for (mu, delta) in &margins {
        let mut u = threshold.max(big_l - delta);
        loop {
            if u > U_CAP {
                return Err(ZsumError::Cap(format!("tail threshold beyond {U_CAP}")));
            }
            let ur = BigInt::from(u);
            let g = &big_c * BigRational::from_integer(num_traits::pow(ur.clone(), big_d)) * q_pow(&qb, &BigInt::from(big_l - delta - u));
            let decreasing = num_traits::pow(&ur + 1, big_d) <= &qb * num_traits::pow(ur.clone(), big_d);
            if decreasing && &g <= mu {
                break;
            }
            u += 1;
        }
        threshold = threshold.max(u);
    }
    let mut exact = 0;
    let mut u = u0;
    while u < threshold {
        exact += 1;
        if !within_one(&pieces_at(pieces, u, a, b), q0)? {
            return Ok(RayCheck::Fails(format!("violated at |λ| = {u}")));
        }
        u += step;
    }
    Ok(RayCheck::Holds { threshold, exact })
}

/// A piece of the domain after splitting rays at 0: a point, or
/// `λ = ε·u` with `u ∈ u0 + m·N`.
#[derive(Clone, Debug)]
enum Piece {
    Point(i128),
    Ray { eps: i64, u0: i64, step: i64 },
}

fn pieces_of(progs: &[Progression1D]) -> Result<Vec<Piece>, ZsumError> {
    let mut out = Vec::new();
    for p in progs {
        match *p {
            Progression1D::Point(x) => out.push(Piece::Point(x)),
            Progression1D::Ray { base, step, dir } => {
                let eps: i128 = if dir == Direction::Up { 1 } else { -1 };
                let mut x = base;
                while x * eps < 0 {
                    out.push(Piece::Point(x));
                    x += eps * step;
                }
                let fit = |v: i128| i64::try_from(v).map_err(|_| ZsumError::Cap(format!("progression {p} too large")));
                out.push(Piece::Ray {
                    eps: eps as i64,
                    u0: fit(x * eps)?,
                    step: fit(step)?,
                });
            }
        }
    }
    Ok(out)
}

/// Smallest integer `E` with `|v| ≤ q^E`, for `v ≠ 0`.
pub fn ceil_log(q: &BigInt, v: &BigRational) -> i64 {
    let v = v.abs();
    let bits = v.numer().bits() as f64 - v.denom().bits() as f64;
    let mut e = (bits / q.to_f64().unwrap_or(2.0).log2()).floor() as i64 - 1;
    while v > q_pow(q, &BigInt::from(e)) {
        e += 1;
    }
    while e > i64::MIN && v <= q_pow(q, &BigInt::from(e - 1)) {
        e -= 1;
    }
    e
}

/// Largest `a` needed on the brute-force window, with its location.
fn window_a(h: &TermSum, b: i64, q0: u64, window: i128) -> Option<(i64, u64, Vec<i128>)> {
    let mut best: Option<(i64, u64, Vec<i128>)> = None;
    let r = h.dim();
    let mut point = vec![-window; r];
    let qs: Vec<u64> = WINDOW_QS.filter(|q| *q >= q0).chain(std::iter::once(q0.max(14))).collect();
    loop {
        if h.contains(&point) {
            let norm: i128 = point.iter().map(|x| x.abs()).sum();
            for &q in &qs {
                let qb = BigInt::from(q);
                let v = h.value_at(&qb, &point);
                if v.is_zero() {
                    continue;
                }
                let need = ceil_log(&qb, &v) - b * norm as i64;
                if best.as_ref().map_or(true, |(a, _, _)| need > *a) {
                    best = Some((need, q, point.clone()));
                }
            }
        }
        let mut i = 0;
        loop {
            if i == r {
                return best;
            }
            if point[i] < window {
                point[i] += 1;
                break;
            }
            point[i] = -window;
            i += 1;
        }
    }
}

fn b_cap(h: &TermSum) -> i64 {
    let slope = h.terms.iter().map(|t| t.exponent.coeffs.iter().map(|c| c.abs()).sum::<i64>()).max().unwrap_or(0);
    let degree = h.terms.iter().map(|t| t.degree()).max().unwrap_or(0);
    slope + degree as i64
}

/// Minimal `(a, b)` (smallest `b`, then smallest `a`, both `≥ 0`) with
/// `|h| ≤ q^{a+b|λ|}` for `q ≥ q0` on the domain. `None` when no `b` up to
/// the cap works.
pub fn tsum_bound(h: &TermSum, opts: &BoundOptions) -> Result<Option<BoundCertificate>, ZsumError> {
    if opts.q0 < 2 {
        return Err(ZsumError::BadQ(opts.q0));
    }
    let h = tsum_merge(h);
    if h.dim() != 1 {
        return Ok(window_candidate(&h, opts));
    }
    let cap = b_cap(&h);
    let progs = normalize_1d(&h.domain)?;
    let pieces = pieces_of(&progs)?;
    let rays: Vec<(Piece, Pieces, RayShape)> = pieces
        .iter()
        .filter_map(|p| match p {
            Piece::Ray { eps, .. } => {
                let pc = ray_pieces(&h, *eps);
                let sh = ray_shape(&pc);
                Some((p.clone(), pc, sh))
            }
            Piece::Point(_) => None,
        })
        .collect();

    let b_from_rays = rays.iter().filter_map(|r| r.2.b_needed).max();
    let b = b_from_rays.unwrap_or(0).max(0);
    if b > cap {
        return Ok(None);
    }
    let b_argument = match rays.iter().filter(|r| r.2.b_needed == Some(b)).map(|r| &r.2).next() {
        _ if b == 0 => "b >= 0 by convention".to_string(),
        Some(sh) if sh.degree == 0 => format!(
            "dominant slope {} with a constant dominant group: with b = {} the quotient grows like q^|λ| wherever that group is nonzero",
            b,
            b - 1
        ),
        Some(sh) => format!(
            "dominant slope {} with degree {} in |λ|: with b = {} the quotient grows like |λ|^{}",
            b - 1,
            sh.degree,
            b - 1,
            sh.degree
        ),
        None => unreachable!("b > 0 comes from a ray"),
    };

    let lower = window_a(&h, b, opts.q0, WINDOW);
    let a_lo = lower.as_ref().map_or(0, |x| x.0).max(0);
    for a in a_lo..=a_lo + A_SLACK {
        let mut certs = Vec::new();
        let mut ok = true;
        for piece in &pieces {
            match piece {
                Piece::Point(x) => {
                    let norm = x.unsigned_abs() as i64;
                    let scaled = shift(&at_point(&h, *x), -(a + b * norm));
                    let holds = within_one(&scaled, opts.q0)?;
                    ok &= holds;
                    certs.push(ProgressionCert {
                        progression: format!("{{{x}}}"),
                        dominant_slope: None,
                        dominant_degree: 0,
                        dominant_term: None,
                        b_needed: None,
                        threshold: None,
                        exact_checks: 1,
                        note: if holds { "checked exactly in q" } else { "violated" }.into(),
                    });
                }
                Piece::Ray { eps, u0, step } => {
                    let pc = ray_pieces(&h, *eps);
                    let sh = ray_shape(&pc);
                    let shown = if *eps > 0 {
                        format!("{u0} + {step}N")
                    } else {
                        format!("{} - {step}N", -u0)
                    };
                    let (threshold, exact, note) = match check_ray(&pc, *u0, *step, a, b, opts.q0)? {
                        RayCheck::Holds { threshold, exact } => (
                            Some(threshold),
                            exact,
                            format!("exact for |λ| < {threshold}, decaying part below the margin beyond"),
                        ),
                        RayCheck::Fails(why) => {
                            ok = false;
                            (None, 0, why)
                        }
                    };
                    certs.push(ProgressionCert {
                        progression: shown,
                        dominant_slope: sh.slope,
                        dominant_degree: sh.degree,
                        dominant_term: dominant_term(&h, *eps),
                        b_needed: sh.b_needed,
                        threshold,
                        exact_checks: exact,
                        note,
                    });
                }
            }
            if !ok {
                break;
            }
        }
        if ok {
            let a_witness = (a > 0 && a == a_lo).then(|| lower.as_ref().map(|x| (x.1, x.2.clone()))).flatten();
            return Ok(Some(BoundCertificate {
                a,
                b,
                q0: opts.q0,
                certified: true,
                minimal: a == 0 || a_witness.is_some(),
                a_witness,
                b_argument,
                b_cap: cap,
                progressions: certs,
            }));
        }
    }
    Err(ZsumError::Cap(format!("no certificate for a in {a_lo}..={}", a_lo + A_SLACK)))
}

fn window_candidate(h: &TermSum, opts: &BoundOptions) -> Option<BoundCertificate> {
    let cap = b_cap(h);
    for b in 0..=cap {
        let inner = window_a(h, b, opts.q0, WINDOW / 2).map_or(0, |x| x.0).max(0);
        let outer = window_a(h, b, opts.q0, WINDOW);
        let a = outer.as_ref().map_or(0, |x| x.0).max(0);
        if a == inner {
            return Some(BoundCertificate {
                a,
                b,
                q0: opts.q0,
                certified: false,
                minimal: false,
                a_witness: outer.filter(|_| a > 0).map(|x| (x.1, x.2)),
                b_argument: format!("required a stable between windows ±{} and ±{WINDOW}", WINDOW / 2),
                b_cap: cap,
                progressions: Vec::new(),
            });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::super::parse_tsum;
    use super::*;

    fn bound(text: &str) -> BoundCertificate {
        tsum_bound(&parse_tsum(text).unwrap(), &BoundOptions::default()).unwrap().unwrap()
    }

    #[test]
    fn spec_examples() {
        let c = bound("tsum h := q^L on {L >= 0}");
        assert_eq!((c.a, c.b, c.certified, c.minimal), (0, 1, true, true));
        let c = bound("tsum h := (L+1)*q^(-L) on {L >= 0}");
        assert_eq!((c.a, c.b, c.certified), (0, 0, true));
        let c = bound("tsum h := q^L - q^L on {L >= 0}");
        assert_eq!((c.a, c.b), (0, 0));
    }

    #[test]
    fn polynomial_factors_raise_b() {
        let c = bound("tsum h := L*q^L on {L >= 0}");
        assert_eq!((c.a, c.b), (0, 2));
        let c = bound("tsum h := L on {L >= 0}");
        assert_eq!((c.a, c.b), (0, 1));
    }

    #[test]
    fn constants_set_a() {
        let c = bound("tsum h := 5*q^L on {L >= 0}");
        // 5 ≤ q^3 for q ≥ 2, but 5 > 2^2.
        assert_eq!((c.a, c.b, c.minimal), (3, 1, true));
        assert_eq!(c.a_witness.as_ref().map(|w| w.0), Some(2));
        let c = bound("tsum h := 5*q^L on {L >= 0}");
        assert!(c.certified);
    }

    #[test]
    fn two_sided_domain() {
        // q^L on Z: q^{|λ|} on both sides.
        let c = bound("tsum h := q^L");
        assert_eq!((c.a, c.b), (0, 1));
        let c = bound("tsum h := q^L - q^(L-1)");
        assert_eq!((c.a, c.b), (0, 1));
    }

    #[test]
    fn laurent_checks() {
        let mut p = Laurent::new();
        // q^2 - 5q + 6 = (q-2)(q-3) ≥ 0 at every integer.
        lr_add(&mut p, 2, BigRational::one());
        lr_add(&mut p, 1, BigRational::from_integer((-5).into()));
        lr_add(&mut p, 0, BigRational::from_integer(6.into()));
        assert!(nonneg_from(&p, 2).unwrap());
        // q^2 - 5q + 5 < 0 at q = 2, 3.
        lr_add(&mut p, 0, -BigRational::one());
        assert!(!nonneg_from(&p, 2).unwrap());
        assert!(nonneg_from(&p, 4).unwrap());
    }

    #[test]
    fn ceil_logs() {
        let q = BigInt::from(3);
        assert_eq!(ceil_log(&q, &BigRational::from_integer(9.into())), 2);
        assert_eq!(ceil_log(&q, &BigRational::from_integer(10.into())), 3);
        assert_eq!(ceil_log(&q, &BigRational::new(1.into(), 9.into())), -2);
        assert_eq!(ceil_log(&q, &BigRational::new(1.into(), 8.into())), -1);
    }
}
