//! Fitting `|f(w, λ)| ≤ p^{a+b‖λ‖}` to window data.
//!
//! On finite windows every `b` fits with a large enough `a`, so `b` is the
//! smallest value for which the required `a` is the same on the inner half
//! of the value-group window as on the whole window; `a` is then the
//! required value (at least 0). Before fitting, each slice `λ = const` is
//! checked for growth toward a valuation edge: that would contradict the
//! boundedness hypothesis of the uniform bound.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::eval::{DefinableSet, Value};
use crate::integrate::{grows_at_edge, visit_cells, Amount, IntegrateConfig};
use crate::localfield::FieldDesc;
use crate::motivic::Integrand;
use crate::zsums::ceil_log;

use super::{p_pow, render_cell, z_norm, TransferError};

/// Largest `b` tried.
pub const FIT_B_CAP: i64 = 16;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitRecord {
    pub a: i64,
    pub b: i64,
    /// `max |f| / p^{a+b‖λ‖}` over the data, exact.
    pub max_ratio: String,
    pub max_ratio_f64: f64,
    /// Field and cell of the maximum.
    pub argmax: Option<(String, String)>,
    /// `(a-1, b)` fails somewhere on the windows (or `a = 0`).
    pub a_minimal: bool,
    /// `(a, b-1)` fails somewhere on the windows (or `b = 0`).
    pub b_minimal: bool,
    pub cells: u64,
}

struct Sample {
    field: usize,
    cell: String,
    p: u32,
    norm: i64,
    inner: bool,
    /// Smallest `E` with `|f| ≤ p^E`.
    e: i64,
    value: BigRational,
}

pub fn uniform_bound_fit(
    f: &Integrand,
    domain: &DefinableSet,
    fields: &[FieldDesc],
    cfg: &IntegrateConfig,
) -> Result<FitRecord, TransferError> {
    let b = cfg.search;
    let (zlo, zhi) = (b.zmin / 2, b.zmax / 2);
    let mut samples: Vec<Sample> = Vec::new();
    let mut cells = 0u64;
    for (fi, fd) in fields.iter().enumerate() {
        // λ → per VF coordinate: valuation → largest |f|.
        let mut slices: BTreeMap<Vec<i64>, BTreeMap<String, BTreeMap<i64, Amount>>> = BTreeMap::new();
        let mut bad: Option<String> = None;
        visit_cells(fd, f, domain, cfg, &mut |cell, v| {
            cells += 1;
            let Some(r) = v.as_rational() else {
                bad.get_or_insert_with(|| format!("non-rational value at {}", render_cell(fd, cell)));
                return;
            };
            let lambda: Vec<i64> = cell
                .iter()
                .filter_map(|(_, x)| match x {
                    Value::ZZ(z) => Some(*z),
                    _ => None,
                })
                .collect();
            let m = v.magnitude();
            let per = slices.entry(lambda.clone()).or_default();
            for (name, x) in cell.iter() {
                if let Value::VF(w) = x {
                    if let Some(val) = w.valuation() {
                        let slot = per.entry(name.clone()).or_default().entry(val).or_insert_with(|| m.clone());
                        if m.cmp_abs(slot).is_gt() {
                            *slot = m.clone();
                        }
                    }
                }
            }
            if r.is_zero() {
                return;
            }
            samples.push(Sample {
                field: fi,
                cell: render_cell(fd, cell),
                p: fd.p,
                norm: z_norm(cell),
                inner: lambda.iter().all(|z| (zlo..=zhi).contains(z)),
                e: ceil_log(&BigInt::from(fd.p), &r),
                value: r.abs(),
            });
        })?;
        if let Some(msg) = bad {
            return Err(TransferError::Parse(format!("uniform_bound_fit needs a motivic function: {msg}")));
        }
        for (lambda, per) in &slices {
            for (name, maxima) in per {
                if grows_at_edge(maxima, b.vmin, b.vmax) {
                    let shown: Vec<String> = maxima.iter().map(|(v, m)| format!("{v}:{m}")).collect();
                    return Err(TransferError::Hypothesis {
                        field: format!("{}:{}", fd.family.tag(), fd.p),
                        at: format!("λ = {lambda:?}, growing in `{name}`"),
                        maxima: shown.join(" "),
                    });
                }
            }
        }
    }

    let need = |b: i64, inner_only: bool| {
        samples
            .iter()
            .filter(|s| !inner_only || s.inner)
            .map(|s| s.e - b * s.norm)
            .max()
            .unwrap_or(0)
            .max(0)
    };
    let b_fit = (0..=FIT_B_CAP).find(|&b| need(b, false) == need(b, true)).ok_or(TransferError::NoFit(FIT_B_CAP))?;
    let a_fit = need(b_fit, false);
    let violated = |a: i64, b: i64| samples.iter().any(|s| s.value > p_pow(s.p, a + b * s.norm));
    let mut best: Option<(BigRational, &Sample)> = None;
    for s in &samples {
        let ratio = &s.value / p_pow(s.p, a_fit + b_fit * s.norm);
        if best.as_ref().map_or(true, |(r, _)| ratio > *r) {
            best = Some((ratio, s));
        }
    }
    Ok(FitRecord {
        a: a_fit,
        b: b_fit,
        max_ratio: best.as_ref().map_or_else(|| "0".to_string(), |(r, _)| r.to_string()),
        max_ratio_f64: best.as_ref().map_or(0.0, |(r, _)| crate::motivic::rational_to_f64(r)),
        argmax: best.map(|(_, s)| {
            let fd = &fields[s.field];
            (format!("{}:{}", fd.family.tag(), fd.p), s.cell.clone())
        }),
        a_minimal: a_fit == 0 || violated(a_fit - 1, b_fit),
        b_minimal: b_fit == 0 || violated(a_fit, b_fit - 1),
        cells,
    })
}
