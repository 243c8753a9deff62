use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;

use super::PresburgerError;

/// Magnitude cap for coefficients and constants during elimination.
pub const COEFF_CAP: i128 = 1_000_000_000_000_000;
/// Cap on divisibility moduli.
pub const MODULUS_CAP: i128 = 1_000_000;

/// `constant + Σ coeffs[v]·v` with nonzero coefficients only.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinTerm {
    pub coeffs: BTreeMap<String, i128>,
    pub constant: i128,
}

fn check(x: i128) -> Result<i128, PresburgerError> {
    if x.abs() > COEFF_CAP {
        Err(PresburgerError::Resource(format!("coefficient {x} exceeds {COEFF_CAP}")))
    } else {
        Ok(x)
    }
}

impl LinTerm {
    pub fn constant(c: i128) -> LinTerm {
        LinTerm {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn var(name: &str) -> LinTerm {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(name.to_string(), 1);
        LinTerm { coeffs, constant: 0 }
    }

    pub fn coeff(&self, name: &str) -> i128 {
        self.coeffs.get(name).copied().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &LinTerm) -> Result<LinTerm, PresburgerError> {
        let mut out = self.clone();
        for (v, c) in &other.coeffs {
            let e = out.coeffs.entry(v.clone()).or_insert(0);
            *e = check(*e + c)?;
            if *e == 0 {
                out.coeffs.remove(v);
            }
        }
        out.constant = check(out.constant + other.constant)?;
        Ok(out)
    }

    pub fn scale(&self, k: i128) -> Result<LinTerm, PresburgerError> {
        if k == 0 {
            return Ok(LinTerm::default());
        }
        let mut coeffs = BTreeMap::new();
        for (v, c) in &self.coeffs {
            coeffs.insert(v.clone(), check(c * k)?);
        }
        Ok(LinTerm {
            coeffs,
            constant: check(self.constant * k)?,
        })
    }

    pub fn neg(&self) -> LinTerm {
        LinTerm {
            coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), -c)).collect(),
            constant: -self.constant,
        }
    }

    pub fn sub(&self, other: &LinTerm) -> Result<LinTerm, PresburgerError> {
        self.add(&other.neg())
    }

    pub fn add_const(&self, c: i128) -> Result<LinTerm, PresburgerError> {
        let mut out = self.clone();
        out.constant = check(out.constant + c)?;
        Ok(out)
    }

    /// The term with `name` removed.
    pub fn without(&self, name: &str) -> LinTerm {
        let mut out = self.clone();
        out.coeffs.remove(name);
        out
    }

    /// Replaces `name` by `by`.
    pub fn substitute(&self, name: &str, by: &LinTerm) -> Result<LinTerm, PresburgerError> {
        let c = self.coeff(name);
        if c == 0 {
            return Ok(self.clone());
        }
        self.without(name).add(&by.scale(c)?)
    }

    pub fn eval(&self, env: &dyn Fn(&str) -> i128) -> i128 {
        self.coeffs
            .iter()
            .fold(self.constant, |acc, (v, c)| acc + c * env(v))
    }

    pub fn content(&self) -> i128 {
        self.coeffs.values().fold(0i128, |g, c| g.gcd(c))
    }
}

impl fmt::Display for LinTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.coeffs {
            let (sign, mag) = if *c < 0 { ("-", -c) } else { ("+", *c) };
            if first {
                if sign == "-" {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if mag == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{mag}*{v}")?;
            }
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)?;
        } else if self.constant != 0 {
            let (sign, mag) = if self.constant < 0 { ("-", -self.constant) } else { ("+", self.constant) };
            write!(f, " {sign} {mag}")?;
        }
        Ok(())
    }
}

/// Quantifier-free atoms. `Le(t)` means `t <= 0`; `Dvd(d, t)` means `d | t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Le(LinTerm),
    Dvd(i128, LinTerm),
    NotDvd(i128, LinTerm),
}

/// Outcome of normalizing an atom: a constant truth value or a canonical atom.
pub enum Norm {
    Const(bool),
    Atom(Atom),
}

impl Atom {
    pub fn term(&self) -> &LinTerm {
        match self {
            Atom::Le(t) | Atom::Dvd(_, t) | Atom::NotDvd(_, t) => t,
        }
    }

    pub fn negate(&self) -> Result<Atom, PresburgerError> {
        Ok(match self {
            // not (t <= 0)  <=>  -t + 1 <= 0
            Atom::Le(t) => Atom::Le(t.neg().add_const(1)?),
            Atom::Dvd(d, t) => Atom::NotDvd(*d, t.clone()),
            Atom::NotDvd(d, t) => Atom::Dvd(*d, t.clone()),
        })
    }

    pub fn holds(&self, env: &dyn Fn(&str) -> i128) -> bool {
        match self {
            Atom::Le(t) => t.eval(env) <= 0,
            Atom::Dvd(d, t) => t.eval(env).rem_euclid(*d) == 0,
            Atom::NotDvd(d, t) => t.eval(env).rem_euclid(*d) != 0,
        }
    }

    /// Canonical form: `Le` divided by the content of its variable part,
    /// divisibility reduced modulo `d` and by common factors.
    pub fn normalize(self) -> Result<Norm, PresburgerError> {
        match self {
            Atom::Le(t) => {
                if t.is_constant() {
                    return Ok(Norm::Const(t.constant <= 0));
                }
                let g = t.content();
                // g·s + c <= 0  <=>  s + ceil(c/g) <= 0
                let c = Integer::div_ceil(&t.constant, &g);
                let coeffs = t.coeffs.iter().map(|(v, k)| (v.clone(), k / g)).collect();
                Ok(Norm::Atom(Atom::Le(LinTerm { coeffs, constant: c })))
            }
            Atom::Dvd(d, t) => normalize_dvd(d, t, true),
            Atom::NotDvd(d, t) => normalize_dvd(d, t, false),
        }
    }
}

fn normalize_dvd(d: i128, t: LinTerm, positive: bool) -> Result<Norm, PresburgerError> {
    let d = d.abs();
    if d > MODULUS_CAP {
        return Err(PresburgerError::Resource(format!("divisibility modulus {d} exceeds {MODULUS_CAP}")));
    }
    if d == 1 {
        return Ok(Norm::Const(positive));
    }
    let mut coeffs = BTreeMap::new();
    for (v, c) in &t.coeffs {
        let r = c.rem_euclid(d);
        if r != 0 {
            coeffs.insert(v.clone(), r);
        }
    }
    let constant = t.constant.rem_euclid(d);
    if coeffs.is_empty() {
        return Ok(Norm::Const((constant == 0) == positive));
    }
    let g = coeffs.values().fold(constant.gcd(&d), |g, c| g.gcd(c));
    let (d, coeffs, constant) = if g > 1 {
        (d / g, coeffs.into_iter().map(|(v, c)| (v, c / g)).collect(), constant / g)
    } else {
        (d, coeffs, constant)
    };
    let t = LinTerm { coeffs, constant };
    Ok(Norm::Atom(if positive { Atom::Dvd(d, t) } else { Atom::NotDvd(d, t) }))
}
