//! Text forms: field specs `Qp:5`, `FpT:7:N=20`, and element literals
//! `Qp(5,N=12){v=-1; 2,3,0,...}`, `FpT(5){v=1; 2}`, `0!`.
//!
//! A literal ending in `...` is known to the working precision only; without
//! the ellipsis the listed digits are the whole expansion.

use thiserror::Error;

use super::{Family, FieldDesc, VFElem, DEFAULT_PRECISION};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum LiteralError {
    #[error("bad field spec `{0}` (expected Qp:<p>[:N=<n>] or FpT:<p>[:N=<n>])")]
    Field(String),
    #[error("bad element literal `{text}`: {msg}")]
    Element { text: String, msg: String },
}

fn family_of(tag: &str) -> Option<Family> {
    match tag {
        "Qp" => Some(Family::MixedChar),
        "FpT" => Some(Family::EqualChar),
        _ => None,
    }
}

pub fn parse_field(spec: &str) -> Result<FieldDesc, LiteralError> {
    let bad = || LiteralError::Field(spec.to_string());
    let mut parts = spec.trim().split(':');
    let family = parts.next().and_then(family_of).ok_or_else(bad)?;
    let p: u32 = parts.next().and_then(|s| s.trim().parse().ok()).ok_or_else(bad)?;
    let mut precision = DEFAULT_PRECISION;
    for extra in parts {
        let n = extra.trim().strip_prefix("N=").ok_or_else(bad)?;
        precision = n.parse().map_err(|_| bad())?;
    }
    FieldDesc::new(family, p, precision).map_err(|_| bad())
}

/// Parses an element literal. When `fd` is given, the literal's field must
/// match it (a literal without `N=` takes the precision of `fd`).
pub fn parse_element(text: &str, fd: Option<&FieldDesc>) -> Result<(FieldDesc, VFElem), LiteralError> {
    let err = |msg: &str| LiteralError::Element {
        text: text.to_string(),
        msg: msg.to_string(),
    };
    let t = text.trim();
    if t == "0!" {
        let fd = fd.copied().ok_or_else(|| err("exact zero needs a field context"))?;
        return Ok((fd, VFElem::Zero));
    }
    let open = t.find('(').ok_or_else(|| err("missing `(`"))?;
    let family = family_of(&t[..open]).ok_or_else(|| err("unknown field family"))?;
    let close = t.find(')').ok_or_else(|| err("missing `)`"))?;
    let mut args = t[open + 1..close].split(',');
    let p: u32 = args
        .next()
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| err("bad prime"))?;
    let mut precision = fd.map_or(DEFAULT_PRECISION, |f| f.precision);
    for a in args {
        let n = a.trim().strip_prefix("N=").ok_or_else(|| err("expected N=<precision>"))?;
        precision = n.trim().parse().map_err(|_| err("bad precision"))?;
    }
    let field = FieldDesc::new(family, p, precision).map_err(|e| err(&e.to_string()))?;
    if let Some(ctx) = fd {
        if ctx.family != field.family || ctx.p != field.p {
            return Err(err(&format!("literal is over {}{} but the field is {}{}", field.family, field.p, ctx.family, ctx.p)));
        }
    }
    let rest = t[close + 1..].trim();
    let body = rest
        .strip_prefix('{')
        .and_then(|r| r.strip_suffix('}'))
        .ok_or_else(|| err("expected `{v=<val>; digits}`"))?;
    let (vpart, dpart) = body.split_once(';').ok_or_else(|| err("expected `;` after the valuation"))?;
    let val: i64 = vpart
        .trim()
        .strip_prefix("v=")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| err("expected v=<integer>"))?;
    let mut digits = Vec::new();
    let mut exact = true;
    for d in dpart.split(',') {
        let d = d.trim();
        if d == "..." {
            exact = false;
            continue;
        }
        if !exact {
            return Err(err("`...` must come last"));
        }
        digits.push(d.parse::<i64>().map_err(|_| err("bad digit"))?);
    }
    Ok((field, field.from_digits(val, &digits, exact)))
}

/// Renders an element; inexact elements (and exact ones whose expansion
/// does not terminate within the working precision) end in `...`.
pub fn format_element(fd: &FieldDesc, x: &VFElem) -> String {
    let Some(v) = x.valuation() else {
        return "0!".to_string();
    };
    let digits = fd.digits(x);
    let terminates = match x {
        VFElem::Padic { unit, rel: None, .. } => {
            use num_traits::Signed;
            !unit.is_negative() && unit < &num_traits::pow(num_bigint::BigInt::from(fd.p), fd.precision)
        }
        VFElem::Series { coeffs, rel: None, .. } => coeffs.len() <= fd.precision,
        _ => false,
    };
    let shown: Vec<String> = if terminates {
        let last = digits.iter().rposition(|&d| d != 0).unwrap_or(0);
        digits[..=last].iter().map(|d| d.to_string()).collect()
    } else {
        digits.iter().map(|d| d.to_string()).chain(std::iter::once("...".into())).collect()
    };
    format!(
        "{}({},N={}){{v={}; {}}}",
        fd.family.tag(),
        fd.p,
        fd.precision,
        v,
        shown.join(",")
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_specs() {
        let fd = parse_field("Qp:5").unwrap();
        assert_eq!((fd.family, fd.p, fd.precision), (Family::MixedChar, 5, DEFAULT_PRECISION));
        let fd = parse_field("FpT:7:N=20").unwrap();
        assert_eq!((fd.family, fd.p, fd.precision), (Family::EqualChar, 7, 20));
        assert!(parse_field("Qp:6").is_err());
        assert!(parse_field("R:5").is_err());
    }

    #[test]
    fn element_literals() {
        let (fd, x) = parse_element("Qp(5,N=12){v=-1; 2,3,0,...}", None).unwrap();
        assert_eq!(fd.precision, 12);
        assert_eq!(x.valuation(), Some(-1));
        assert!(!x.is_exact());
        assert_eq!(&fd.digits(&x)[..3], &[2, 3, 0]);

        let (fd, y) = parse_element("FpT(5,N=12){v=1; 2,0,...}", None).unwrap();
        assert_eq!(fd.family, Family::EqualChar);
        assert_eq!(y.valuation(), Some(1));

        // Digits >= p are carried: 7 = 2 + 1·5.
        let ctx = FieldDesc::qp(5, 10).unwrap();
        let (_, z) = parse_element("Qp(5){v=0;7}", Some(&ctx)).unwrap();
        assert_eq!(z, ctx.embed_int(7));

        let (_, zero) = parse_element("0!", Some(&ctx)).unwrap();
        assert!(zero.is_zero());
        assert!(parse_element("Qp(7){v=0;1}", Some(&ctx)).is_err());
    }

    #[test]
    fn format_then_parse() {
        let fd = FieldDesc::qp(5, 8).unwrap();
        for x in [fd.embed_int(7), fd.from_digits(-2, &[1, 4, 0, 3], false), VFElem::Zero] {
            let text = format_element(&fd, &x);
            let (_, back) = parse_element(&text, Some(&fd)).unwrap();
            assert_eq!(back, x, "{text}");
        }
        assert_eq!(format_element(&fd, &fd.embed_int(7)), "Qp(5,N=8){v=0; 2,1}");
    }
}
