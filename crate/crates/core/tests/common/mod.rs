//! Shared generators and brute-force oracles for integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use wb_core::syntax::{Formula, Quantifier, Sort, Term, Var};

pub const FREE: [&str; 3] = ["x", "y", "z"];
pub const BOUND: [&str; 2] = ["u", "w"];

fn zz(name: &str) -> Term {
    Term::var(name, Sort::ZZ)
}

fn scaled(name: &str, c: i64) -> Option<Term> {
    let v = zz(name);
    match c {
        0 => None,
        1 => Some(v),
        -1 => Some(Term::neg(v)),
        2 => Some(Term::add(v.clone(), v)),
        -2 => Some(Term::neg(Term::add(v.clone(), v))),
        _ => unreachable!(),
    }
}

/// `Σ c_i v_i + k` with small coefficients.
pub fn lin_term(rng: &mut ChaCha8Rng, vars: &[&str]) -> Term {
    let mut acc: Option<Term> = None;
    for v in vars {
        if rng.gen_bool(0.6) {
            if let Some(t) = scaled(v, rng.gen_range(-2..=2)) {
                acc = Some(match acc {
                    None => t,
                    Some(a) => Term::add(a, t),
                });
            }
        }
    }
    let k: i64 = rng.gen_range(-5..=5);
    let lit = Term::lit(k.unsigned_abs(), Sort::ZZ);
    match acc {
        None if k < 0 => Term::neg(lit),
        None => lit,
        Some(a) if k > 0 => Term::add(a, lit),
        Some(a) if k < 0 => Term::sub(a, lit),
        Some(a) => a,
    }
}

pub fn atom(rng: &mut ChaCha8Rng, vars: &[&str]) -> Formula {
    let a = lin_term(rng, vars);
    let b = lin_term(rng, vars);
    let f = match rng.gen_range(0..3) {
        0 => Formula::Le(a, b),
        1 => Formula::Eq(a, b),
        _ => Formula::Cong {
            lhs: a,
            rhs: b,
            modulus: rng.gen_range(2..=4),
        },
    };
    if rng.gen_bool(0.2) {
        Formula::not(f)
    } else {
        f
    }
}

pub fn qf(rng: &mut ChaCha8Rng, vars: &[&str], depth: u32) -> Formula {
    if depth == 0 || rng.gen_bool(0.35) {
        return atom(rng, vars);
    }
    let a = qf(rng, vars, depth - 1);
    let b = qf(rng, vars, depth - 1);
    match rng.gen_range(0..5) {
        0 | 1 => Formula::and(a, b),
        2 | 3 => Formula::or(a, b),
        _ => Formula::not(Formula::and(a, b)),
    }
}

fn quant(rng: &mut ChaCha8Rng, name: &str, body: Formula) -> Formula {
    let var = Var::new(name, Sort::ZZ);
    if rng.gen_bool(0.6) {
        Formula::exists(var, body)
    } else {
        Formula::forall(var, body)
    }
}

/// A value-group formula with at most three variables and at most two
/// quantifiers; returns it with its free variables.
pub fn presburger_formula(rng: &mut ChaCha8Rng) -> (Formula, Vec<&'static str>) {
    let q = rng.gen_range(0..=2usize);
    let r = rng.gen_range(1..=3 - q);
    let free: Vec<&str> = FREE[..r].to_vec();
    let mut all = free.clone();
    all.extend(&BOUND[..q]);
    let f = match q {
        0 => qf(rng, &all, 2),
        1 => {
            let body = qf(rng, &all, 2);
            quant(rng, BOUND[0], body)
        }
        _ => {
            let body = qf(rng, &all, 2);
            let inner = quant(rng, BOUND[1], body);
            let outer_vars = &all[..all.len() - 1];
            let body = match rng.gen_range(0..3) {
                0 => inner,
                1 => Formula::and(atom(rng, outer_vars), inner),
                _ => Formula::or(atom(rng, outer_vars), inner),
            };
            quant(rng, BOUND[0], body)
        }
    };
    (f, free)
}

// ---- brute force ----

fn term_val(t: &Term, env: &[(String, i64)]) -> i64 {
    match t {
        Term::Var(v) => env.iter().rev().find(|(n, _)| *n == v.name).expect("bound").1,
        Term::Lit { value, .. } => *value as i64,
        Term::Add(a, b) => term_val(a, env) + term_val(b, env),
        Term::Sub(a, b) => term_val(a, env) - term_val(b, env),
        Term::Neg(a) => -term_val(a, env),
        Term::Mul(a, b) => term_val(a, env) * term_val(b, env),
        other => panic!("not a value-group term: {other:?}"),
    }
}

/// Direct evaluation with quantifiers ranging over `[-w, w]`, where the
/// window widens by a factor of three with each nesting level so that inner
/// witnesses for outer values near the edge are still found.
pub fn brute(f: &Formula, env: &mut Vec<(String, i64)>, window: i64) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Eq(a, b) => term_val(a, env) == term_val(b, env),
        Formula::Le(a, b) => term_val(a, env) <= term_val(b, env),
        Formula::Cong { lhs, rhs, modulus } => (term_val(lhs, env) - term_val(rhs, env)).rem_euclid(*modulus as i64) == 0,
        Formula::And(a, b) => brute(a, env, window) && brute(b, env, window),
        Formula::Or(a, b) => brute(a, env, window) || brute(b, env, window),
        Formula::Not(a) => !brute(a, env, window),
        Formula::Quant { q, var, body } => {
            let want = *q == Quantifier::Exists;
            let mut hit = !want;
            for v in -window..=window {
                env.push((var.name.clone(), v));
                let b = brute(body, env, window * 3);
                env.pop();
                if b == want {
                    hit = want;
                    break;
                }
            }
            hit
        }
    }
}
