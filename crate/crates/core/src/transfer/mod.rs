//! Runs one statement over `Q_p` and `F_p((t))` for several primes and
//! character twists and reports where the two families agree.
//!
//! Verdicts are three-valued. Only definite verdicts enter the agreement
//! statistics; a row with an `Unknown` side is kept but flagged. `M` is the
//! smallest tested prime from which every definite row agrees.

mod fit;
mod parse;

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;
use thiserror::Error;

use crate::eval::{eval_formula, DefinableSet, EvalError, SearchBox, TruthVal, Value};
use crate::integrate::{
    check_bounded, check_integrable, integration_vars, visit_cells, Amount, BoundVerdict, IntegrateConfig, IntegrateError, Verdict,
};
use crate::localfield::{Family, FieldDesc, FieldError, DEFAULT_PRECISION};
use crate::motivic::{Integrand, MotivicError, Twist};
use crate::syntax::{Formula, Sort};

pub use fit::{uniform_bound_fit, FitRecord, FIT_B_CAP};
pub use parse::{integrand_of, parse_workbook, Item, Workbook};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum TransferError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("prime {0} is not allowed (primes must be at least 3)")]
    BadPrime(u32),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Motivic(#[from] MotivicError),
    #[error("boundedness hypothesis violated over {field} at {at}: maxima {maxima}")]
    Hypothesis { field: String, at: String, maxima: String },
    #[error("no (a, b) with b <= {0} fits the window data")]
    NoFit(i64),
}

impl TransferError {
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            TransferError::Integrate(IntegrateError::Budget { .. }) | TransferError::Eval(EvalError::Budget { .. })
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StatementKind {
    Integrability,
    Boundedness,
    BoundWithExponents { a: i64, b: i64 },
    FormulaTruth,
}

impl StatementKind {
    pub fn name(&self) -> String {
        match self {
            StatementKind::Integrability => "integrability".into(),
            StatementKind::Boundedness => "boundedness".into(),
            StatementKind::BoundWithExponents { a, b } => format!("bound({a}, {b})"),
            StatementKind::FormulaTruth => "truth".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Payload {
    Function {
        name: String,
        integrand: Integrand,
        domain: DefinableSet,
    },
    Formula(Formula),
}

#[derive(Clone, Debug, PartialEq)]
pub struct StatementSpec {
    pub name: String,
    pub kind: StatementKind,
    pub payload: Payload,
    /// Unit twists `c` of the character, `x ↦ Λ(c·x)`.
    pub twists: Vec<i64>,
}

impl StatementSpec {
    fn check(&self) -> Result<(), TransferError> {
        match (&self.kind, &self.payload) {
            (StatementKind::FormulaTruth, Payload::Formula(f)) => {
                if let Some(v) = f.free_vars().into_iter().next() {
                    return Err(TransferError::Parse(format!(
                        "statement `{}`: formula has free variable `{}`",
                        self.name, v.name
                    )));
                }
                Ok(())
            }
            (StatementKind::FormulaTruth, _) => Err(TransferError::Parse(format!("statement `{}` needs a formula", self.name))),
            (_, Payload::Formula(_)) => Err(TransferError::Parse(format!("statement `{}` needs a function", self.name))),
            _ => Ok(()),
        }
    }
}

/// Windows, budget and precision shared by every run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransferConfig {
    pub search: SearchBox,
    pub budget: u64,
    pub precision: usize,
}

impl Default for TransferConfig {
    fn default() -> Self {
        let ic = IntegrateConfig::default();
        TransferConfig {
            search: ic.search,
            budget: ic.budget,
            precision: DEFAULT_PRECISION,
        }
    }
}

impl TransferConfig {
    fn integrate(&self, twist: i64) -> IntegrateConfig {
        let mut c = IntegrateConfig::new(self.search);
        c.budget = self.budget;
        c.twist = Twist { c: twist };
        c
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyVerdict {
    pub verdict: TruthVal,
    pub evidence: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub p: u32,
    pub twist: i64,
    pub qp: FamilyVerdict,
    pub fpt: FamilyVerdict,
    /// `None` when either side is indefinite.
    pub agree: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransferReport {
    pub statement: String,
    pub kind: StatementKind,
    pub primes: Vec<u32>,
    pub twists: Vec<i64>,
    pub rows: Vec<ReportRow>,
    /// Smallest tested prime from which every definite row agrees.
    pub m: Option<u32>,
    pub disagreements: Vec<ReportRow>,
    /// `(p, twist)` rows left out of the statistics, with the reason.
    pub excluded: Vec<(u32, i64, String)>,
    /// False when no row was definite on both sides.
    pub informative: bool,
}

impl TransferReport {
    /// One line per row: `p,twist,Qp,FpT,agree`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,twist,Qp,FpT,agree\n");
        for r in &self.rows {
            let agree = match r.agree {
                Some(true) => "yes",
                Some(false) => "no",
                None => "excluded",
            };
            let _ = writeln!(out, "{},{},{},{},{}", r.p, r.twist, r.qp.verdict.name(), r.fpt.verdict.name(), agree);
        }
        out
    }

    pub fn all_agree(&self) -> bool {
        self.informative && self.disagreements.is_empty()
    }
}

fn unknown(evidence: impl Into<String>) -> FamilyVerdict {
    FamilyVerdict {
        verdict: TruthVal::Unknown,
        evidence: evidence.into(),
    }
}

/// Budget errors abort the run; every other failure is an `Unknown`.
fn soften<T>(r: Result<T, IntegrateError>) -> Result<Result<T, String>, TransferError> {
    match r {
        Ok(v) => Ok(Ok(v)),
        Err(e @ IntegrateError::Budget { .. }) => Err(e.into()),
        Err(IntegrateError::Eval(e @ EvalError::Budget { .. })) => Err(e.into()),
        Err(e) => Ok(Err(e.to_string())),
    }
}

/// `p^e` as an exact rational.
pub(crate) fn p_pow(p: u32, e: i64) -> BigRational {
    let b = num_traits::pow(BigInt::from(p), e.unsigned_abs() as usize);
    if e >= 0 {
        BigRational::from_integer(b)
    } else {
        BigRational::new(BigInt::one(), b)
    }
}

/// `‖λ‖ = Σ|λ_i|` over the value-group coordinates of a cell.
pub(crate) fn z_norm(a: &crate::eval::Assignment) -> i64 {
    a.iter()
        .filter_map(|(_, v)| match v {
            Value::ZZ(z) => Some(z.abs()),
            _ => None,
        })
        .sum()
}

pub(crate) fn render_cell(fd: &FieldDesc, a: &crate::eval::Assignment) -> String {
    a.iter().map(|(n, v)| format!("{n}={}", v.render(fd))).collect::<Vec<_>>().join(", ")
}

/// `|v| ≤ bound`, exactly for rational values.
fn within(v: &Amount, bound: &BigRational) -> bool {
    match v.as_rational() {
        Some(r) => r.abs() <= *bound,
        None => v.abs() <= crate::motivic::rational_to_f64(bound) * (1.0 + 1e-12),
    }
}

/// The verdict of one statement over one field for one twist.
pub fn decide(s: &StatementSpec, fd: &FieldDesc, twist: i64, cfg: &TransferConfig) -> Result<FamilyVerdict, TransferError> {
    let icfg = cfg.integrate(twist);
    match (&s.kind, &s.payload) {
        (StatementKind::FormulaTruth, Payload::Formula(f)) => match eval_formula(fd, &cfg.search, &Default::default(), f) {
            Ok(v) => Ok(FamilyVerdict {
                verdict: v,
                evidence: format!("evaluated in box {:?}", cfg.search),
            }),
            Err(e @ EvalError::Budget { .. }) => Err(e.into()),
            Err(e) => Ok(unknown(e.to_string())),
        },
        (StatementKind::Integrability, Payload::Function { integrand, domain, .. }) => {
            let over = integration_vars(integrand, domain);
            Ok(match soften(check_integrable(fd, integrand, &over, domain, &Default::default(), &icfg))? {
                Err(e) => unknown(e),
                Ok(v) => FamilyVerdict {
                    verdict: match v.verdict {
                        Verdict::LikelyIntegrable => TruthVal::True,
                        Verdict::LikelyDivergent => TruthVal::False,
                        Verdict::Inconclusive => TruthVal::Unknown,
                    },
                    evidence: format!("{}; increment ratios {:?}; partial integrals {:?}", v.verdict.name(), v.ratios, v.partial_integrals),
                },
            })
        }
        (StatementKind::Boundedness, Payload::Function { integrand, domain, .. }) => {
            Ok(match soften(check_bounded(fd, integrand, domain, &icfg))? {
                Err(e) => unknown(e),
                Ok(r) => FamilyVerdict {
                    verdict: match r.verdict {
                        BoundVerdict::Bounded | BoundVerdict::Empty => TruthVal::True,
                        BoundVerdict::UnboundedSuspected => TruthVal::False,
                    },
                    evidence: format!(
                        "{}; sup {}; edge maxima {:?}",
                        r.verdict.name(),
                        r.sup.map_or_else(|| "none".to_string(), |s| s.to_string()),
                        r.edge_maxima
                    ),
                },
            })
        }
        (StatementKind::BoundWithExponents { a, b }, Payload::Function { integrand, domain, .. }) => {
            let mut violation: Option<String> = None;
            let mut cells = 0u64;
            let res = visit_cells(fd, integrand, domain, &icfg, &mut |cell, v| {
                cells += 1;
                if violation.is_some() {
                    return;
                }
                let bound = p_pow(fd.p, a + b * z_norm(cell));
                if !within(v, &bound) {
                    violation = Some(format!("|f| = {} > {} at {}", v.magnitude(), bound, render_cell(fd, cell)));
                }
            });
            Ok(match soften(res)? {
                Err(e) => unknown(e),
                Ok(_) if violation.is_some() => FamilyVerdict {
                    verdict: TruthVal::False,
                    evidence: violation.unwrap_or_default(),
                },
                Ok(0) => FamilyVerdict {
                    verdict: TruthVal::True,
                    evidence: format!("no violation on {cells} cells"),
                },
                Ok(n) => unknown(format!("no violation on {cells} cells, {n} cells undetermined")),
            })
        }
        _ => Err(TransferError::Parse(format!("statement `{}` does not match its payload", s.name))),
    }
}

/// Evaluates `s` over both families for every prime and twist.
///
/// Only residue field `F_p` is modelled on either side; fields with residue
/// field `F_{p^r}`, `r > 1`, are not part of the experiment.
pub fn transfer_experiment(s: &StatementSpec, primes: &[u32], cfg: &TransferConfig) -> Result<TransferReport, TransferError> {
    s.check()?;
    let mut primes: Vec<u32> = primes.to_vec();
    primes.sort_unstable();
    primes.dedup();
    if let Some(p) = primes.iter().find(|p| **p < 3) {
        return Err(TransferError::BadPrime(*p));
    }
    let twists = if s.twists.is_empty() { vec![1] } else { s.twists.clone() };
    let mut rows = Vec::new();
    let mut excluded = Vec::new();
    for &p in &primes {
        let qp = FieldDesc::new(Family::MixedChar, p, cfg.precision)?;
        let fpt = FieldDesc::new(Family::EqualChar, p, cfg.precision)?;
        for &c in &twists {
            if c.rem_euclid(p as i64) == 0 {
                excluded.push((p, c, format!("twist {c} is not a unit at {p}")));
                continue;
            }
            let vq = decide(s, &qp, c, cfg)?;
            let vf = decide(s, &fpt, c, cfg)?;
            let agree = (vq.verdict.is_definite() && vf.verdict.is_definite()).then(|| vq.verdict == vf.verdict);
            if agree.is_none() {
                excluded.push((p, c, "indefinite verdict".to_string()));
            }
            rows.push(ReportRow {
                p,
                twist: c,
                qp: vq,
                fpt: vf,
                agree,
            });
        }
    }
    let disagreements: Vec<ReportRow> = rows.iter().filter(|r| r.agree == Some(false)).cloned().collect();
    let informative = rows.iter().any(|r| r.agree.is_some());
    let m = if !informative {
        None
    } else {
        match disagreements.iter().map(|r| r.p).max() {
            None => primes.first().copied(),
            Some(last_bad) => primes.iter().copied().find(|p| *p > last_bad),
        }
    };
    Ok(TransferReport {
        statement: s.name.clone(),
        kind: s.kind,
        primes,
        twists,
        rows,
        m,
        disagreements,
        excluded,
        informative,
    })
}

/// Variables of a function payload by sort, for diagnostics.
pub fn payload_vars(s: &StatementSpec) -> Vec<(String, Sort)> {
    match &s.payload {
        Payload::Function { integrand, domain, .. } => integration_vars(integrand, domain).into_iter().map(|v| (v.name, v.sort)).collect(),
        Payload::Formula(_) => Vec::new(),
    }
}
