//! Quantifier elimination for the value-group fragment: linear terms over
//! `Z`, `<=`, congruences, boolean connectives and `ZZ` quantifiers.
//!
//! Elimination is Cooper's procedure run on disjunctive normal forms. A
//! conjunction `C(x)` with lower bounds `x >= l_i`, upper bounds `x <= u_j` and
//! divisibility constraints of lcm `D` satisfies
//! `∃x C(x) <=> ⋁_{i, 0<=k<D} C(l_i + k)` (or the symmetric version over the
//! upper bounds, whichever is shorter). Results are canonical: atoms are
//! normalized, conjunctions sorted and deduplicated, subsumed disjuncts
//! dropped, and disjuncts sorted.

mod linear;
mod normal1d;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;
use thiserror::Error;

use crate::syntax::{parse_formula_with, Decls, Formula, Quantifier, Sort, Term};

pub use linear::{Atom, LinTerm, Norm, COEFF_CAP, MODULUS_CAP};
pub use normal1d::{normalize_1d, Direction, Progression1D};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum PresburgerError {
    /// An intermediate quantity exceeded a configured cap.
    #[error("resource limit: {0}")]
    Resource(String),
    /// The input leaves the value-group fragment.
    #[error("not a Presburger formula: {0}")]
    NotPresburger(String),
}

/// Upper limit on the number of disjuncts kept at any point.
pub const DNF_CAP: usize = 50_000;

type Conj = Vec<Atom>;

/// A quantifier-free set in canonical disjunctive normal form. `vars` fixes
/// the coordinate order used by [`PresburgerSet::contains`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PresburgerSet {
    pub vars: Vec<String>,
    pub dnf: Vec<Conj>,
}

/// How non-Presburger leaves are resolved while converting a formula. The
/// pure fragment rejects them; the evaluator substitutes known values.
pub trait Leaves {
    /// A value-group term that is not built from variables, literals and
    /// `+`/`-` (for instance `ord(x)` with `x` assigned).
    fn term(&mut self, t: &Term) -> Result<LinTerm, PresburgerError>;
    /// An atom between valued-field or residue-field terms.
    fn atom(&mut self, f: &Formula) -> Result<bool, PresburgerError>;
    /// A value-group atom whose truth does not depend on the variables
    /// (for instance because a side is infinite), if it is one.
    fn constant_atom(&mut self, _f: &Formula) -> Result<Option<bool>, PresburgerError> {
        Ok(None)
    }
}

/// Rejects everything outside the pure fragment.
pub struct Pure;

impl Leaves for Pure {
    fn term(&mut self, t: &Term) -> Result<LinTerm, PresburgerError> {
        Err(PresburgerError::NotPresburger(format!("term `{t}`")))
    }

    fn atom(&mut self, f: &Formula) -> Result<bool, PresburgerError> {
        Err(PresburgerError::NotPresburger(format!("atom `{f}`")))
    }
}

// ---- DNF algebra ----

fn dnf_true() -> Vec<Conj> {
    vec![Vec::new()]
}

fn dnf_atom(a: Atom) -> Result<Vec<Conj>, PresburgerError> {
    Ok(match a.normalize()? {
        Norm::Const(true) => dnf_true(),
        Norm::Const(false) => Vec::new(),
        Norm::Atom(a) => vec![vec![a]],
    })
}

fn cap(n: usize) -> Result<(), PresburgerError> {
    if n > DNF_CAP {
        Err(PresburgerError::Resource(format!("normal form exceeds {DNF_CAP} disjuncts")))
    } else {
        Ok(())
    }
}

fn dnf_or(mut a: Vec<Conj>, b: Vec<Conj>) -> Result<Vec<Conj>, PresburgerError> {
    a.extend(b);
    cap(a.len())?;
    Ok(canonical(a))
}

fn dnf_and(a: &[Conj], b: &[Conj]) -> Result<Vec<Conj>, PresburgerError> {
    cap(a.len().saturating_mul(b.len()))?;
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            let mut c = x.clone();
            c.extend(y.iter().cloned());
            if let Some(c) = tighten(c) {
                out.push(c);
            }
        }
    }
    Ok(canonical(out))
}

fn dnf_not(a: &[Conj]) -> Result<Vec<Conj>, PresburgerError> {
    let mut acc = dnf_true();
    for conj in a {
        let mut clause = Vec::new();
        for atom in conj {
            clause.extend(dnf_atom(atom.negate()?)?);
        }
        acc = dnf_and(&acc, &canonical(clause))?;
        if acc.is_empty() {
            break;
        }
    }
    Ok(acc)
}

/// Sorts and deduplicates a conjunction, keeps only the strongest of parallel
/// inequalities, and returns `None` when it is visibly unsatisfiable.
fn tighten(conj: Conj) -> Option<Conj> {
    // Strongest constant per variable part for `s + c <= 0`.
    let mut le: BTreeMap<BTreeMap<String, i128>, i128> = BTreeMap::new();
    let mut dvd: BTreeMap<(i128, BTreeMap<String, i128>), i128> = BTreeMap::new();
    let mut rest: BTreeSet<Atom> = BTreeSet::new();
    for a in conj {
        match a {
            Atom::Le(t) => {
                let e = le.entry(t.coeffs).or_insert(t.constant);
                *e = (*e).max(t.constant);
            }
            Atom::Dvd(d, t) => {
                if let Some(&c) = dvd.get(&(d, t.coeffs.clone())) {
                    if c != t.constant {
                        return None;
                    }
                }
                dvd.insert((d, t.coeffs), t.constant);
            }
            a @ Atom::NotDvd(..) => {
                rest.insert(a);
            }
        }
    }
    for (s, c) in &le {
        let neg: BTreeMap<String, i128> = s.iter().map(|(v, k)| (v.clone(), -k)).collect();
        if let Some(c2) = le.get(&neg) {
            // s <= -c and s >= c2
            if c + c2 > 0 {
                return None;
            }
        }
    }
    let mut out: BTreeSet<Atom> = BTreeSet::new();
    for (coeffs, constant) in le {
        out.insert(Atom::Le(LinTerm { coeffs, constant }));
    }
    for ((d, coeffs), constant) in &dvd {
        out.insert(Atom::Dvd(*d, LinTerm { coeffs: coeffs.clone(), constant: *constant }));
    }
    for a in rest {
        if let Atom::NotDvd(d, t) = &a {
            match dvd.get(&(*d, t.coeffs.clone())) {
                Some(&c) if c == t.constant => return None,
                // Implied by the positive constraint with another residue.
                Some(_) => continue,
                None => {}
            }
        }
        out.insert(a);
    }
    Some(out.into_iter().collect())
}

/// Sorted, deduplicated disjuncts with subsumed ones removed.
fn canonical(dnf: Vec<Conj>) -> Vec<Conj> {
    let mut set: BTreeSet<Conj> = BTreeSet::new();
    for c in dnf {
        if let Some(c) = tighten(c) {
            if c.is_empty() {
                return dnf_true();
            }
            set.insert(c);
        }
    }
    let mut items: Vec<Conj> = set.into_iter().collect();
    // Absorption: drop any conjunction that contains another one.
    items.sort_by_key(|c| c.len());
    let mut kept: Vec<Conj> = Vec::new();
    for c in items {
        if kept.len() < 2000 && kept.iter().any(|k| k.iter().all(|a| c.binary_search(a).is_ok())) {
            continue;
        }
        kept.push(c);
    }
    kept.sort();
    kept
}

// ---- elimination ----

/// Rewrites `atom` so that `x` has coefficient `±1`, given that every atom
/// has been scaled by `delta / |coef_x|`.
fn scale_for(atom: &Atom, x: &str, delta: i128) -> Result<Atom, PresburgerError> {
    let c = atom.term().coeff(x);
    if c == 0 {
        return Ok(atom.clone());
    }
    let k = delta / c.abs();
    let unit = |t: &LinTerm| -> Result<LinTerm, PresburgerError> {
        let mut t = t.scale(k)?;
        t.coeffs.insert(x.to_string(), c.signum());
        Ok(t)
    };
    Ok(match atom {
        Atom::Le(t) => Atom::Le(unit(t)?),
        Atom::Dvd(d, t) => Atom::Dvd(d * k, unit(t)?),
        Atom::NotDvd(d, t) => Atom::NotDvd(d * k, unit(t)?),
    })
}

fn subst_atom(atom: &Atom, x: &str, by: &LinTerm) -> Result<Atom, PresburgerError> {
    Ok(match atom {
        Atom::Le(t) => Atom::Le(t.substitute(x, by)?),
        Atom::Dvd(d, t) => Atom::Dvd(*d, t.substitute(x, by)?),
        Atom::NotDvd(d, t) => Atom::NotDvd(*d, t.substitute(x, by)?),
    })
}

fn lcm_capped(a: i128, b: i128) -> Result<i128, PresburgerError> {
    let l = a.lcm(&b);
    if l > MODULUS_CAP {
        Err(PresburgerError::Resource(format!("modulus lcm {l} exceeds {MODULUS_CAP}")))
    } else {
        Ok(l)
    }
}

/// `∃x` of a single conjunction.
fn eliminate_conj(x: &str, conj: &Conj) -> Result<Vec<Conj>, PresburgerError> {
    let (with, without): (Vec<&Atom>, Vec<&Atom>) = conj.iter().partition(|a| a.term().coeff(x) != 0);
    if with.is_empty() {
        return Ok(vec![conj.clone()]);
    }
    let mut delta = 1i128;
    for a in &with {
        delta = lcm_capped(delta, a.term().coeff(x).abs())?;
    }
    let mut scaled: Vec<Atom> = with.iter().map(|a| scale_for(a, x, delta)).collect::<Result<_, _>>()?;
    if delta > 1 {
        scaled.push(Atom::Dvd(delta, LinTerm::var(x)));
    }
    let mut lower = Vec::new(); // x >= l
    let mut upper = Vec::new(); // x <= u
    let mut modulus = 1i128;
    let mut congr = Vec::new();
    for a in &scaled {
        match a {
            Atom::Le(t) => {
                let rest = t.without(x);
                if t.coeff(x) > 0 {
                    upper.push(rest.neg());
                } else {
                    lower.push(rest);
                }
            }
            Atom::Dvd(d, _) | Atom::NotDvd(d, _) => {
                modulus = lcm_capped(modulus, *d)?;
                congr.push(a.clone());
            }
        }
    }
    let base: Conj = without.into_iter().cloned().collect();
    let mut out = Vec::new();
    let mut emit = |atoms: &[Atom], by: &LinTerm| -> Result<(), PresburgerError> {
        let mut c = base.clone();
        for a in atoms {
            match subst_atom(a, x, by)?.normalize()? {
                Norm::Const(true) => {}
                Norm::Const(false) => return Ok(()),
                Norm::Atom(a) => c.push(a),
            }
        }
        if let Some(c) = tighten(c) {
            out.push(c);
            cap(out.len())?;
        }
        Ok(())
    };
    if lower.is_empty() || upper.is_empty() {
        // Unbounded on one side: only the congruences matter.
        for k in 0..modulus {
            emit(&congr, &LinTerm::constant(k))?;
        }
    } else if lower.len() <= upper.len() {
        for l in &lower {
            for k in 0..modulus {
                emit(&scaled, &l.add_const(k)?)?;
            }
        }
    } else {
        for u in &upper {
            for k in 0..modulus {
                emit(&scaled, &u.add_const(-k)?)?;
            }
        }
    }
    Ok(canonical(out))
}

fn eliminate(x: &str, dnf: &[Conj]) -> Result<Vec<Conj>, PresburgerError> {
    let mut out = Vec::new();
    for c in dnf {
        out.extend(eliminate_conj(x, c)?);
        cap(out.len())?;
    }
    Ok(canonical(out))
}

// ---- conversion ----

/// Linear form of a value-group term.
pub fn linearize(t: &Term, leaves: &mut dyn Leaves) -> Result<LinTerm, PresburgerError> {
    Ok(match t {
        Term::Var(v) if v.sort == Sort::ZZ => LinTerm::var(&v.name),
        Term::Lit { value, sort: Sort::ZZ } => LinTerm::constant(*value as i128),
        Term::Add(a, b) => linearize(a, leaves)?.add(&linearize(b, leaves)?)?,
        Term::Sub(a, b) => linearize(a, leaves)?.sub(&linearize(b, leaves)?)?,
        Term::Neg(a) => linearize(a, leaves)?.neg(),
        Term::Mul(a, b) => {
            let (la, lb) = (linearize(a, leaves)?, linearize(b, leaves)?);
            if la.is_constant() {
                lb.scale(la.constant)?
            } else if lb.is_constant() {
                la.scale(lb.constant)?
            } else {
                return Err(PresburgerError::NotPresburger(format!("product `{t}`")));
            }
        }
        _ => leaves.term(t)?,
    })
}

fn is_zz(t: &Term) -> bool {
    crate::syntax::term_sort(t).map(|s| s == Sort::ZZ).unwrap_or(false)
}

fn to_dnf(f: &Formula, leaves: &mut dyn Leaves) -> Result<Vec<Conj>, PresburgerError> {
    if matches!(f, Formula::Eq(..) | Formula::Le(..) | Formula::Cong { .. }) {
        if let Some(b) = leaves.constant_atom(f)? {
            return Ok(if b { dnf_true() } else { Vec::new() });
        }
    }
    match f {
        Formula::True => Ok(dnf_true()),
        Formula::False => Ok(Vec::new()),
        Formula::Eq(a, b) if is_zz(a) => {
            let d = linearize(a, leaves)?.sub(&linearize(b, leaves)?)?;
            dnf_and(&dnf_atom(Atom::Le(d.clone()))?, &dnf_atom(Atom::Le(d.neg()))?)
        }
        Formula::Le(a, b) => dnf_atom(Atom::Le(linearize(a, leaves)?.sub(&linearize(b, leaves)?)?)),
        Formula::Cong { lhs, rhs, modulus } => dnf_atom(Atom::Dvd(
            *modulus as i128,
            linearize(lhs, leaves)?.sub(&linearize(rhs, leaves)?)?,
        )),
        Formula::Eq(..) => Ok(if leaves.atom(f)? { dnf_true() } else { Vec::new() }),
        Formula::And(a, b) => {
            let da = to_dnf(a, leaves)?;
            if da.is_empty() {
                return Ok(da);
            }
            dnf_and(&da, &to_dnf(b, leaves)?)
        }
        Formula::Or(a, b) => dnf_or(to_dnf(a, leaves)?, to_dnf(b, leaves)?),
        Formula::Not(a) => dnf_not(&to_dnf(a, leaves)?),
        Formula::Quant { q, var, body } => {
            if var.sort != Sort::ZZ {
                return Err(PresburgerError::NotPresburger(format!("quantifier over {}", var.sort)));
            }
            let inner = to_dnf(body, leaves)?;
            match q {
                Quantifier::Exists => eliminate(&var.name, &inner),
                Quantifier::Forall => dnf_not(&eliminate(&var.name, &dnf_not(&inner)?)?),
            }
        }
    }
}

/// Eliminates all quantifiers of a pure value-group formula. The set's
/// coordinates are the formula's free variables in order of occurrence.
pub fn presburger_qe(f: &Formula) -> Result<PresburgerSet, PresburgerError> {
    presburger_qe_with(f, &mut Pure)
}

/// As [`presburger_qe`], resolving foreign leaves through `leaves`.
pub fn presburger_qe_with(f: &Formula, leaves: &mut dyn Leaves) -> Result<PresburgerSet, PresburgerError> {
    let dnf = to_dnf(f, leaves)?;
    let mut vars: Vec<String> = f
        .free_vars()
        .into_iter()
        .filter(|v| v.sort == Sort::ZZ)
        .map(|v| v.name)
        .collect();
    // Variables of substituted leaves, if any, come last.
    for c in &dnf {
        for a in c {
            for v in a.term().coeffs.keys() {
                if !vars.contains(v) {
                    vars.push(v.clone());
                }
            }
        }
    }
    Ok(PresburgerSet { vars, dnf })
}

/// Truth of a formula at a point, by elimination first.
pub fn pres_eval(f: &Formula, point: &BTreeMap<String, i128>) -> Result<bool, PresburgerError> {
    Ok(presburger_qe(f)?.contains_map(point))
}

impl PresburgerSet {
    pub fn empty(vars: Vec<String>) -> PresburgerSet {
        PresburgerSet { vars, dnf: Vec::new() }
    }

    /// The same set with coordinates `vars` (which must include every
    /// variable the normal form mentions).
    pub fn with_vars(mut self, vars: &[&str]) -> PresburgerSet {
        self.vars = vars.iter().map(|v| v.to_string()).collect();
        self
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty_syntactically(&self) -> bool {
        self.dnf.is_empty()
    }

    pub fn is_universe_syntactically(&self) -> bool {
        self.dnf.len() == 1 && self.dnf[0].is_empty()
    }

    /// Membership of a point given in the order of `vars`.
    pub fn contains(&self, point: &[i128]) -> bool {
        let env = |name: &str| {
            self.vars
                .iter()
                .position(|v| v == name)
                .map_or(0, |i| point.get(i).copied().unwrap_or(0))
        };
        self.dnf.iter().any(|c| c.iter().all(|a| a.holds(&env)))
    }

    /// Membership with coordinates by name; missing names read as 0.
    pub fn contains_map(&self, point: &BTreeMap<String, i128>) -> bool {
        let env = |name: &str| point.get(name).copied().unwrap_or(0);
        self.dnf.iter().any(|c| c.iter().all(|a| a.holds(&env)))
    }

    /// Largest modulus and largest constant magnitude, used to bound the
    /// region where membership is not yet periodic.
    pub fn shape(&self) -> (i128, i128) {
        let mut period = 1i128;
        let mut reach = 0i128;
        for c in &self.dnf {
            for a in c {
                match a {
                    Atom::Le(t) => {
                        let g = t.content().max(1);
                        reach = reach.max(t.constant.abs() / g + 1);
                    }
                    Atom::Dvd(d, _) | Atom::NotDvd(d, _) => period = period.lcm(d),
                }
            }
        }
        (period, reach)
    }

    /// The set as a quantifier-free formula of the syntax module.
    pub fn to_formula(&self) -> Formula {
        let decls: Decls = self.vars.iter().map(|v| (v.clone(), Sort::ZZ)).collect();
        parse_formula_with(&self.to_string(), &decls).expect("rendered sets reparse")
    }
}

fn sides(t: &LinTerm) -> (String, String) {
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    let show = |v: &str, k: i128| if k == 1 { v.to_string() } else { format!("{k}*{v}") };
    for (v, k) in &t.coeffs {
        if *k > 0 {
            lhs.push(show(v, *k));
        } else {
            rhs.push(show(v, -k));
        }
    }
    if t.constant > 0 {
        lhs.push(t.constant.to_string());
    } else if t.constant < 0 {
        rhs.push((-t.constant).to_string());
    }
    let join = |xs: Vec<String>| if xs.is_empty() { "0".to_string() } else { xs.join(" + ") };
    (join(lhs), join(rhs))
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Le(t) => {
                let (l, r) = sides(t);
                write!(f, "{l} <= {r}")
            }
            Atom::Dvd(d, t) => {
                let (l, r) = sides(t);
                write!(f, "{l} === {r} mod {d}")
            }
            Atom::NotDvd(d, t) => {
                let (l, r) = sides(t);
                write!(f, "~({l} === {r} mod {d})")
            }
        }
    }
}

impl fmt::Display for PresburgerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dnf.is_empty() {
            return f.write_str("false");
        }
        let several = self.dnf.len() > 1;
        for (i, c) in self.dnf.iter().enumerate() {
            if i > 0 {
                f.write_str(" \\/ ")?;
            }
            if c.is_empty() {
                f.write_str("true")?;
                continue;
            }
            let text: Vec<String> = c.iter().map(|a| a.to_string()).collect();
            if several && c.len() > 1 {
                write!(f, "({})", text.join(" /\\ "))?;
            } else {
                f.write_str(&text.join(" /\\ "))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn qe(text: &str) -> PresburgerSet {
        presburger_qe(&parse_formula(text).unwrap()).unwrap()
    }

    #[test]
    fn parity() {
        let s = qe("exists y:ZZ (x = y + y)");
        assert_eq!(s.to_string(), "x === 0 mod 2");
        for x in -100..=100 {
            assert_eq!(s.contains(&[x]), x % 2 == 0);
        }
    }

    #[test]
    fn unbounded_witness() {
        let s = qe("exists y:ZZ (y <= x)");
        assert!(s.is_universe_syntactically());
    }

    #[test]
    fn thirds_nonnegative() {
        let s = qe("exists y:ZZ (x = y + y + y /\\ 0 <= y)");
        for x in -100..=100 {
            assert_eq!(s.contains(&[x]), x >= 0 && x % 3 == 0, "x = {x}: {s}");
        }
    }

    #[test]
    fn forall_and_rendering_reparses() {
        let s = qe("forall y:ZZ (y <= x \\/ x + 2 <= y)");
        // Fails exactly when y = x + 1 is available, i.e. never holds.
        assert!(s.is_empty_syntactically(), "{s}");
        let s = qe("exists y:ZZ (x <= 2*y /\\ 3*y <= x + 4 /\\ z <= y)");
        let back = presburger_qe(&s.to_formula()).unwrap();
        for x in -20..=20 {
            for z in -20..=20 {
                let p = [("x".to_string(), x), ("z".to_string(), z)].into_iter().collect();
                assert_eq!(s.contains_map(&p), back.contains_map(&p));
            }
        }
    }

    #[test]
    fn evaluation_via_qe() {
        let f = parse_formula("exists y:ZZ (x = y + y)").unwrap();
        let at = |x| [("x".to_string(), x)].into_iter().collect();
        assert!(pres_eval(&f, &at(6)).unwrap());
        assert!(!pres_eval(&f, &at(7)).unwrap());
    }

    #[test]
    fn rejects_other_sorts() {
        let f = parse_formula("exists y:VF (ord(y) = z)").unwrap();
        assert!(matches!(presburger_qe(&f), Err(PresburgerError::NotPresburger(_))));
    }
}
