use std::collections::BTreeMap;

use crate::localfield::{format_element, parse_element, FieldDesc, RFElem, VFElem};
use crate::syntax::{Signature, Sort};

use super::EvalError;

/// A value of one of the three sorts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    VF(VFElem),
    RF(RFElem),
    ZZ(i64),
}

impl Value {
    pub fn sort(&self) -> Sort {
        match self {
            Value::VF(_) => Sort::VF,
            Value::RF(_) => Sort::RF,
            Value::ZZ(_) => Sort::ZZ,
        }
    }

    pub fn render(&self, fd: &FieldDesc) -> String {
        match self {
            Value::VF(x) => format_element(fd, x),
            Value::RF(a) => a.0.to_string(),
            Value::ZZ(z) => z.to_string(),
        }
    }
}

/// Values for free variables, by name.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    values: BTreeMap<String, Value>,
}

impl Assignment {
    pub fn new() -> Assignment {
        Assignment::default()
    }

    pub fn insert(&mut self, name: &str, v: Value) {
        self.values.insert(name.to_string(), v);
    }

    pub fn with(mut self, name: &str, v: Value) -> Assignment {
        self.insert(name, v);
        self
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.values.get(name)
    }

    pub fn remove(&mut self, name: &str) -> Option<Value> {
        self.values.remove(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Value)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Parses a value of the given sort. Valued-field values are element
/// literals, `0!`, or plain integers (embedded as constants).
pub fn parse_value(text: &str, sort: Sort, fd: &FieldDesc) -> Result<Value, EvalError> {
    let t = text.trim();
    let bad = |msg: &str| EvalError::Assignment {
        text: t.to_string(),
        msg: msg.to_string(),
    };
    match sort {
        Sort::VF => {
            if let Ok(n) = t.parse::<i64>() {
                return Ok(Value::VF(fd.embed_int(n)));
            }
            let (_, x) = parse_element(t, Some(fd)).map_err(|e| bad(&e.to_string()))?;
            Ok(Value::VF(x))
        }
        Sort::RF => {
            let n: i64 = t.parse().map_err(|_| bad("expected an integer residue"))?;
            Ok(Value::RF(fd.rf(n)))
        }
        Sort::ZZ => Ok(Value::ZZ(t.parse().map_err(|_| bad("expected an integer"))?)),
    }
}

/// Splits `a=1, x=Qp(5){v=0; 7}` at commas outside brackets.
fn split_top(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' | '{' | '[' => depth += 1,
            ')' | '}' | ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts.into_iter().map(str::trim).filter(|s| !s.is_empty()).collect()
}

/// Parses `name=value` pairs, taking sorts from the signature.
pub fn parse_assignment(text: &str, sig: &Signature, fd: &FieldDesc) -> Result<Assignment, EvalError> {
    let mut a = Assignment::default();
    for part in split_top(text) {
        let (name, value) = part.split_once('=').ok_or_else(|| EvalError::Assignment {
            text: part.to_string(),
            msg: "expected name=value".into(),
        })?;
        let name = name.trim();
        let var = sig.get(name).ok_or_else(|| EvalError::Assignment {
            text: part.to_string(),
            msg: format!("`{name}` is not a free variable of the formula"),
        })?;
        a.insert(name, parse_value(value, var.sort, fd)?);
    }
    Ok(a)
}
