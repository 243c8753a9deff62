//! Subsets of `Z` as finite unions of points and one-sided progressions.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::{PresburgerError, PresburgerSet};

/// Upper bound on membership tests spent by [`normalize_1d`].
const WALK_CAP: i128 = 20_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    Up,
    Down,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Progression1D {
    Point(i128),
    /// `{base + k·step : k >= 0}` (`Up`) or `{base - k·step : k >= 0}` (`Down`).
    Ray { base: i128, step: i128, dir: Direction },
}

impl Progression1D {
    pub fn contains(&self, x: i128) -> bool {
        match *self {
            Progression1D::Point(a) => x == a,
            Progression1D::Ray { base, step, dir } => {
                let off = match dir {
                    Direction::Up => x - base,
                    Direction::Down => base - x,
                };
                off >= 0 && off % step == 0
            }
        }
    }
}

impl fmt::Display for Progression1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Progression1D::Point(a) => write!(f, "{{{a}}}"),
            Progression1D::Ray { base, step, dir: Direction::Up } => write!(f, "{base} + {step}N"),
            Progression1D::Ray { base, step, dir: Direction::Down } => write!(f, "{base} - {step}N"),
        }
    }
}

/// Smallest divisor `m` of `period` such that `member` restricted to
/// `[start, start + period)` is `m`-periodic.
fn minimal_period(member: &dyn Fn(i128) -> bool, start: i128, period: i128) -> i128 {
    let mut divisors: Vec<i128> = (1..=period).filter(|d| period % d == 0).collect();
    divisors.sort();
    for m in divisors {
        if (start..start + period).all(|x| member(x) == member(x + m)) {
            return m;
        }
    }
    period
}

/// Rewrites a one-variable set as points and rays. Rays run in both regions
/// where membership is periodic; each residue class is extended as far
/// towards the middle as it stays in the set. Classes that are in the set on
/// all of `Z` are split at 0. Afterwards two rays that interleave into a
/// single progression are merged, and points adjacent to a ray are absorbed.
pub fn normalize_1d(s: &PresburgerSet) -> Result<Vec<Progression1D>, PresburgerError> {
    if s.dim() != 1 {
        return Err(PresburgerError::NotPresburger(format!(
            "normalize_1d needs a set in one variable, got {}",
            s.dim()
        )));
    }
    let member = |x: i128| s.contains(&[x]);
    let (period, reach) = s.shape();
    // Beyond ±t every inequality is constant.
    let t = reach + 1;
    let up_m = minimal_period(&member, t, period);
    let down_m = minimal_period(&member, -t - period + 1, period);
    let span = up_m.lcm(&down_m);
    if (2 * t + 2 * span) / up_m.min(down_m) * (up_m + down_m) > WALK_CAP {
        return Err(PresburgerError::Resource(format!(
            "one-dimensional normal form needs more than {WALK_CAP} membership tests"
        )));
    }
    let floor = -t - span;
    let ceil = t + span;
    let mut out: Vec<Progression1D> = Vec::new();
    let mut two_sided: Vec<i128> = Vec::new(); // residues mod up_m
    for x0 in t + 1..=t + up_m {
        if !member(x0) {
            continue;
        }
        let mut x = x0;
        while x - up_m >= floor && member(x - up_m) {
            x -= up_m;
        }
        if x - up_m < floor {
            let base = x0.rem_euclid(up_m);
            two_sided.push(base);
            out.push(Progression1D::Ray { base, step: up_m, dir: Direction::Up });
            out.push(Progression1D::Ray { base: base - up_m, step: up_m, dir: Direction::Down });
        } else {
            out.push(Progression1D::Ray { base: x, step: up_m, dir: Direction::Up });
        }
    }
    for x0 in (-t - down_m..-t).rev() {
        if !member(x0) {
            continue;
        }
        let covered = (0..span / down_m).all(|k| two_sided.contains(&(x0 - k * down_m).rem_euclid(up_m)));
        if covered {
            continue;
        }
        let mut x = x0;
        while x + down_m <= ceil && member(x + down_m) {
            x += down_m;
        }
        out.push(Progression1D::Ray { base: x, step: down_m, dir: Direction::Down });
    }
    for x in floor..=ceil {
        if member(x) && !out.iter().any(|r| r.contains(x)) {
            out.push(Progression1D::Point(x));
        }
    }
    merge(&mut out);
    out.sort();
    Ok(out)
}

fn merge(items: &mut Vec<Progression1D>) {
    loop {
        let mut changed = false;
        'outer: for i in 0..items.len() {
            for j in 0..items.len() {
                if i == j {
                    continue;
                }
                if let Some(m) = merge_pair(items[i], items[j]) {
                    let (a, b) = (i.max(j), i.min(j));
                    items.remove(a);
                    items.remove(b);
                    items.push(m);
                    changed = true;
                    break 'outer;
                }
            }
        }
        if !changed {
            return;
        }
    }
}

fn merge_pair(a: Progression1D, b: Progression1D) -> Option<Progression1D> {
    use Progression1D::*;
    match (a, b) {
        (Ray { base: b1, step: s1, dir: d1 }, Ray { base: b2, step: s2, dir: d2 }) => {
            if d1 != d2 || s1 != s2 || s1 % 2 != 0 || (b1 - b2).abs() != s1 / 2 {
                return None;
            }
            let base = match d1 {
                Direction::Up => b1.min(b2),
                Direction::Down => b1.max(b2),
            };
            Some(Ray { base, step: s1 / 2, dir: d1 })
        }
        (Point(x), Ray { base, step, dir }) => {
            let next = match dir {
                Direction::Up => base - step,
                Direction::Down => base + step,
            };
            (x == next).then_some(Ray { base: x, step, dir })
        }
        _ => None,
    }
}
