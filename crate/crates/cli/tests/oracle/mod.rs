//! Exact brute-force evaluation of generated value-group formulas, without
//! quantifier elimination.
//!
//! A quantifier over a quantifier-free body is decided by scanning around
//! the body's critical points: between consecutive thresholds every `≤` and
//! `=` atom is constant and congruences repeat with period `L`, so `L + 1`
//! values on either side of each threshold see every behaviour. A
//! quantifier whose body holds another quantifier scans a window past every
//! crossing of the inner thresholds plus one full period, beyond which the
//! body is periodic.

use num_integer::Integer;

use wb_core::presburger::{Atom as QeAtom, PresburgerSet};
use wb_core::syntax::{Formula, Quantifier, Term};

use crate::common::{BOUND, FREE};

pub const SLOTS: usize = 5;

fn slot(name: &str) -> usize {
    FREE.iter().chain(BOUND.iter()).position(|v| *v == name).unwrap_or_else(|| panic!("unexpected variable {name}"))
}

#[derive(Clone, Copy, Debug)]
pub enum Kind {
    Le,
    Eq,
    Cong(i64),
}

/// `c · env + k  (≤ | = | ≡ mod m)  0`.
#[derive(Clone, Copy, Debug)]
pub struct Atom {
    kind: Kind,
    c: [i64; SLOTS],
    k: i64,
}

impl Atom {
    fn value(&self, env: &[i64; SLOTS]) -> i64 {
        self.c.iter().zip(env).map(|(a, b)| a * b).sum::<i64>() + self.k
    }

    fn holds(&self, env: &[i64; SLOTS]) -> bool {
        let v = self.value(env);
        match self.kind {
            Kind::Le => v <= 0,
            Kind::Eq => v == 0,
            Kind::Cong(m) => v.rem_euclid(m) == 0,
        }
    }

    /// The value without the contributions of `skip`.
    fn rest(&self, env: &[i64; SLOTS], skip: &[usize]) -> i64 {
        (0..SLOTS).filter(|i| !skip.contains(i)).map(|i| self.c[i] * env[i]).sum::<i64>() + self.k
    }
}

pub enum Node {
    True,
    False,
    Atom(Atom),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Not(Box<Node>),
    Quant {
        exists: bool,
        slot: usize,
        inner: Option<usize>,
        atoms: Vec<Atom>,
        body: Box<Node>,
    },
}

fn linear(t: &Term, sign: i64, c: &mut [i64; SLOTS], k: &mut i64) {
    match t {
        Term::Var(v) => c[slot(&v.name)] += sign,
        Term::Lit { value, .. } => *k += sign * *value as i64,
        Term::Add(a, b) => {
            linear(a, sign, c, k);
            linear(b, sign, c, k);
        }
        Term::Sub(a, b) => {
            linear(a, sign, c, k);
            linear(b, -sign, c, k);
        }
        Term::Neg(a) => linear(a, -sign, c, k),
        other => panic!("not a linear value-group term: {other:?}"),
    }
}

fn diff(a: &Term, b: &Term, kind: Kind) -> Atom {
    let (mut c, mut k) = ([0; SLOTS], 0);
    linear(a, 1, &mut c, &mut k);
    linear(b, -1, &mut c, &mut k);
    Atom { kind, c, k }
}

impl Node {
    pub fn compile(f: &Formula) -> Node {
        match f {
            Formula::True => Node::True,
            Formula::False => Node::False,
            Formula::Le(a, b) => Node::Atom(diff(a, b, Kind::Le)),
            Formula::Eq(a, b) => Node::Atom(diff(a, b, Kind::Eq)),
            Formula::Cong { lhs, rhs, modulus } => Node::Atom(diff(lhs, rhs, Kind::Cong(*modulus as i64))),
            Formula::And(a, b) => Node::And(Box::new(Node::compile(a)), Box::new(Node::compile(b))),
            Formula::Or(a, b) => Node::Or(Box::new(Node::compile(a)), Box::new(Node::compile(b))),
            Formula::Not(a) => Node::Not(Box::new(Node::compile(a))),
            Formula::Quant { q, var, body } => {
                let body = Node::compile(body);
                let mut atoms = Vec::new();
                body.atoms(&mut atoms);
                let inner = body.inner_slot();
                Node::Quant {
                    exists: *q == Quantifier::Exists,
                    slot: slot(&var.name),
                    inner,
                    atoms,
                    body: Box::new(body),
                }
            }
        }
    }

    fn atoms(&self, out: &mut Vec<Atom>) {
        match self {
            Node::Atom(a) => out.push(*a),
            Node::And(a, b) | Node::Or(a, b) => {
                a.atoms(out);
                b.atoms(out);
            }
            Node::Not(a) => a.atoms(out),
            Node::Quant { atoms, .. } => out.extend(atoms),
            Node::True | Node::False => {}
        }
    }

    /// The slot of the (single, innermost) quantifier below this node.
    fn inner_slot(&self) -> Option<usize> {
        match self {
            Node::And(a, b) | Node::Or(a, b) => a.inner_slot().or(b.inner_slot()),
            Node::Not(a) => a.inner_slot(),
            Node::Quant { slot, inner, .. } => {
                assert!(inner.is_none(), "at most two nested quantifiers");
                Some(*slot)
            }
            _ => None,
        }
    }

    pub fn eval(&self, env: &mut [i64; SLOTS]) -> bool {
        match self {
            Node::True => true,
            Node::False => false,
            Node::Atom(a) => a.holds(env),
            Node::And(a, b) => a.eval(env) && b.eval(env),
            Node::Or(a, b) => a.eval(env) || b.eval(env),
            Node::Not(a) => !a.eval(env),
            Node::Quant {
                exists,
                slot,
                inner,
                atoms,
                body,
            } => {
                let saved = env[*slot];
                let ranges = match inner {
                    None => candidates(atoms, *slot, env),
                    Some(t) => {
                        let w = window(atoms, *slot, *t, env);
                        vec![(-w, w)]
                    }
                };
                let mut found = false;
                'scan: for (lo, hi) in ranges {
                    for v in lo..=hi {
                        env[*slot] = v;
                        if body.eval(env) == *exists {
                            found = true;
                            break 'scan;
                        }
                    }
                }
                env[*slot] = saved;
                if found {
                    *exists
                } else {
                    !*exists
                }
            }
        }
    }
}

/// Period in `slot` of the congruence atoms.
fn period(atoms: &[Atom], slot: usize) -> i64 {
    atoms
        .iter()
        .filter_map(|a| match a.kind {
            Kind::Cong(m) if a.c[slot] != 0 => Some(m / a.c[slot].abs().gcd(&m)),
            _ => None,
        })
        .fold(1, |acc, p| acc.lcm(&p))
}

fn candidates(atoms: &[Atom], slot: usize, env: &[i64; SLOTS]) -> Vec<(i64, i64)> {
    let l = period(atoms, slot);
    let mut out: Vec<(i64, i64)> = atoms
        .iter()
        .filter(|a| !matches!(a.kind, Kind::Cong(_)) && a.c[slot] != 0)
        .map(|a| {
            let (num, den) = (-a.rest(env, &[slot]), a.c[slot]);
            (Integer::div_floor(&num, &den) - l - 1, Integer::div_ceil(&num, &den) + l + 1)
        })
        .collect();
    if out.is_empty() {
        out.push((-1, l + 1));
    }
    out
}

/// Half-width of a window in `s` beyond which the body (with an inner
/// quantifier over `t`) is periodic, plus one period.
fn window(atoms: &[Atom], s: usize, t: usize, env: &[i64; SLOTS]) -> i64 {
    let lt = period(atoms, t);
    let thresholds: Vec<&Atom> = atoms.iter().filter(|a| !matches!(a.kind, Kind::Cong(_))).collect();
    let rest = |a: &Atom| a.rest(env, &[s, t]) as i128;
    let mut b: i128 = 0;
    for a in &thresholds {
        if a.c[t] == 0 && a.c[s] != 0 {
            b = b.max(rest(a).abs() / a.c[s].abs() as i128 + 1);
        }
    }
    let inner: Vec<&&Atom> = thresholds.iter().filter(|a| a.c[t] != 0).collect();
    for (i, ai) in inner.iter().enumerate() {
        for aj in &inner[i + 1..] {
            let (si, ti, sj, tj) = (ai.c[s] as i128, ai.c[t] as i128, aj.c[s] as i128, aj.c[t] as i128);
            let d = si * tj - sj * ti;
            if d != 0 {
                let crossing = (rest(aj) * ti - rest(ai) * tj).abs() / d.abs() + 1;
                let spread = (lt as i128 + 2) * (ti * tj).abs() / d.abs() + 1;
                b = b.max(crossing + spread);
            }
        }
    }
    let mut p: i64 = lt;
    for a in atoms {
        match a.kind {
            Kind::Cong(m) => p = p.lcm(&m),
            _ if a.c[t] != 0 => p = p.lcm(&(a.c[t].abs() * lt)),
            _ => {}
        }
    }
    let w = b + p as i128 + 2;
    assert!(w < 100_000, "window {w} too large");
    w as i64
}

/// A quantifier-free output set with its atoms over point indices.
pub struct CompiledSet {
    dnf: Vec<Vec<(u8, i128, Vec<i128>, i128)>>,
}

impl CompiledSet {
    pub fn new(set: &PresburgerSet) -> CompiledSet {
        let dnf = set
            .dnf
            .iter()
            .map(|conj| {
                conj.iter()
                    .map(|atom| {
                        let (tag, m) = match atom {
                            QeAtom::Le(_) => (0, 0),
                            QeAtom::Dvd(d, _) => (1, *d),
                            QeAtom::NotDvd(d, _) => (2, *d),
                        };
                        let t = atom.term();
                        let mut c = vec![0i128; set.vars.len()];
                        for (name, v) in &t.coeffs {
                            let i = set.vars.iter().position(|n| n == name).unwrap_or_else(|| panic!("stray variable {name}"));
                            c[i] = *v;
                        }
                        (tag, m, c, t.constant)
                    })
                    .collect()
            })
            .collect();
        CompiledSet { dnf }
    }

    pub fn contains(&self, pt: &[i128]) -> bool {
        self.dnf.iter().any(|conj| {
            conj.iter().all(|(tag, m, c, k)| {
                let v = c.iter().zip(pt).map(|(a, b)| a * b).sum::<i128>() + k;
                match tag {
                    0 => v <= 0,
                    1 => v.rem_euclid(*m) == 0,
                    _ => v.rem_euclid(*m) != 0,
                }
            })
        })
    }
}
