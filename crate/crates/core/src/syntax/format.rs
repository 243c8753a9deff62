use std::fmt::{self, Write};

use super::ast::{Formula, Term};

/// Fully parenthesized rendering of a formula; reparses to the same tree.
pub fn format(f: &Formula) -> String {
    f.to_string()
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(&v.name),
            Term::Lit { value, .. } => write!(f, "{value}"),
            Term::Uniformizer => f.write_char('t'),
            Term::Add(a, b) => write!(f, "({a} + {b})"),
            Term::Sub(a, b) => write!(f, "({a} - {b})"),
            Term::Mul(a, b) => write!(f, "({a} * {b})"),
            Term::Neg(a) => write!(f, "-{a}"),
            Term::Ord(a) => write!(f, "ord({a})"),
            Term::Ac(a) => write!(f, "ac({a})"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Eq(a, b) => write!(f, "{a} = {b}"),
            Formula::Le(a, b) => write!(f, "{a} <= {b}"),
            Formula::Cong { lhs, rhs, modulus } => write!(f, "{lhs} === {rhs} mod {modulus}"),
            Formula::And(a, b) => write!(f, "({a} /\\ {b})"),
            Formula::Or(a, b) => write!(f, "({a} \\/ {b})"),
            Formula::Not(a) => match **a {
                Formula::Eq(..) | Formula::Le(..) | Formula::Cong { .. } => write!(f, "~({a})"),
                _ => write!(f, "~{a}"),
            },
            Formula::Quant { q, var, body } => {
                write!(f, "{} {}:{} ", q.keyword(), var.name, var.sort)?;
                match **body {
                    Formula::And(..) | Formula::Or(..) => write!(f, "{body}"),
                    _ => write!(f, "({body})"),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    #[test]
    fn units_round_trip_text() {
        let f = parse_formula("exists y:VF (y*x = 1)").unwrap();
        assert_eq!(format(&f), "exists y:VF ((y * x) = 1)");
    }

    #[test]
    fn parity_round_trip_text() {
        let f = parse_formula("exists y:ZZ (x = y + y)").unwrap();
        assert_eq!(format(&f), "exists y:ZZ (x = (y + y))");
    }

    #[test]
    fn nested_quantifiers_fully_parenthesized() {
        let f = parse_formula("forall a:ZZ exists b:ZZ (a <= b /\\ ~b = a)").unwrap();
        let text = format(&f);
        assert_eq!(text, "forall a:ZZ (exists b:ZZ (a <= b /\\ ~(b = a)))");
        assert_eq!(parse_formula(&text).unwrap(), f);
    }
}
