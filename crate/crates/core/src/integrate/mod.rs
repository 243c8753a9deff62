//! Integration against the canonical measure: Haar measure on each VF
//! coordinate with `O` of mass 1, counting measure on RF and ZZ
//! coordinates.
//!
//! Integrals are Riemann sums over ϖ-adic cells, taken one coordinate at a
//! time (Fubini). A VF coordinate is cut into valuation slices; the cell
//! `{ord x = v, first d digits fixed}` is a coset of `ϖ^{v+d} O` and has mass
//! `p^{-(v+d)}`, and the shell at valuation `v` holds `(p-1)p^{d-1}` of them.
//! Slices beyond the window are extrapolated only when the last slices are
//! visibly geometric (see [`geometric_tail`]). Exact zero has measure zero
//! and is skipped.

mod amount;
mod tail;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;
use thiserror::Error;

use crate::eval::{eval_with, Assignment, DefinableSet, EvalError, Evaluator, SearchBox, TruthVal, Value};
use crate::localfield::{FieldDesc, RFElem};
use crate::motivic::{rational_to_f64, Integrand, MotivicError, MotivicEval, MotivicFunction, Twist};
use crate::syntax::{Formula, Sort, Term, Var};

pub use amount::Amount;
pub use tail::{geometric_tail, Tail, TailStatus, TAIL_EPS, TAIL_K, TAIL_R_MAX, TWO_TERM_SPAN};

/// Default cap on integrand evaluations.
pub const DEFAULT_CELL_BUDGET: u64 = 2_000_000;

/// Window growth steps used by [`check_integrable`].
pub const GROWTH_STEPS: usize = 8;

/// Consecutive edge maxima that must increase for [`check_bounded`] to
/// suspect unboundedness.
pub const EDGE_RUN: usize = 3;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum IntegrateError {
    #[error(transparent)]
    Motivic(#[from] MotivicError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("integration needs {needed} cells, over the budget of {cap}")]
    Budget { needed: u128, cap: u64 },
    #[error("{cells} cells have unknown domain membership (total mass at most {mass})")]
    Unknown { cells: u64, mass: f64 },
    #[error("refusing to integrate: the slice is {}", .0.verdict.name())]
    Refused(Box<IntegrabilityVerdict>),
    #[error("density is negative at {0}")]
    NegativeDensity(String),
    #[error("{0}")]
    Setup(String),
}

/// Windows, depth, budget, character twist, and an optional density
/// multiplying the integrand.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegrateConfig {
    pub search: SearchBox,
    pub budget: u64,
    pub twist: Twist,
    pub density: Option<MotivicFunction>,
}

impl IntegrateConfig {
    pub fn new(search: SearchBox) -> IntegrateConfig {
        IntegrateConfig {
            search,
            budget: DEFAULT_CELL_BUDGET,
            twist: Twist { c: 1 },
            density: None,
        }
    }

    pub fn with_depth(mut self, depth: usize) -> IntegrateConfig {
        self.search.depth = depth;
        self
    }

    pub fn with_vrange(mut self, vmin: i64, vmax: i64) -> IntegrateConfig {
        self.search.vmin = vmin;
        self.search.vmax = vmax;
        self
    }
}

impl Default for IntegrateConfig {
    /// Valuations `-3..=9`, depth 2, value-group window `-12..=12`.
    fn default() -> IntegrateConfig {
        IntegrateConfig::new(SearchBox {
            vmin: -3,
            vmax: 9,
            depth: 2,
            zmin: -12,
            zmax: 12,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegralResult {
    pub value: Amount,
    pub status: TailStatus,
    /// Integrand evaluations performed.
    pub cells: u64,
    /// Running sums over the slices of the outermost coordinate.
    pub partial_sums: Vec<(f64, f64)>,
    pub tail_ratio: Option<(f64, f64)>,
    pub notes: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    LikelyIntegrable,
    LikelyDivergent,
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::LikelyIntegrable => "LikelyIntegrable",
            Verdict::LikelyDivergent => "LikelyDivergent",
            Verdict::Inconclusive => "Inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegrabilityVerdict {
    pub verdict: Verdict,
    /// `∫|f|` over the nested windows.
    pub partial_integrals: Vec<f64>,
    /// Ratios of consecutive increments (`None` for `x/0`).
    pub ratios: Vec<Option<f64>>,
    pub tail_bound: Option<f64>,
    pub note: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum BoundVerdict {
    Bounded,
    UnboundedSuspected,
    /// No cell of the box lies in the domain.
    Empty,
}

impl BoundVerdict {
    pub fn name(self) -> &'static str {
        match self {
            BoundVerdict::Bounded => "Bounded",
            BoundVerdict::UnboundedSuspected => "UnboundedSuspected",
            BoundVerdict::Empty => "Empty",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub sup: Option<Amount>,
    /// The arg-max cell representative, rendered.
    pub witness: Vec<(String, String)>,
    pub verdict: BoundVerdict,
    /// Per ordered coordinate: the maxima by valuation (VF) or value (ZZ).
    pub edge_maxima: Vec<(String, Vec<(i64, f64)>)>,
}

fn p_pow(p: u32, e: i64) -> BigRational {
    let b = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from_integer(b)
    } else {
        BigRational::new(BigInt::one(), b)
    }
}

struct Partial {
    value: Amount,
    status: TailStatus,
    slices: Vec<Amount>,
    ratio: Option<(f64, f64)>,
}

impl Partial {
    fn leaf(value: Amount) -> Partial {
        Partial {
            value,
            status: TailStatus::ResolvedGeometric,
            slices: Vec::new(),
            ratio: None,
        }
    }
}

struct Engine<'c> {
    ev: Evaluator,
    twist: Twist,
    f: &'c Integrand,
    domain: &'c DefinableSet,
    density: Option<&'c MotivicFunction>,
    abs: bool,
    cells: u64,
    budget: u64,
    unknown_cells: u64,
    unknown_mass: f64,
    notes: Vec<String>,
}

impl<'c> Engine<'c> {
    fn new(fd: &FieldDesc, f: &'c Integrand, domain: &'c DefinableSet, cfg: &'c IntegrateConfig) -> Engine<'c> {
        Engine {
            ev: Evaluator::new(*fd, cfg.search),
            twist: cfg.twist.clone(),
            f,
            domain,
            density: cfg.density.as_ref(),
            abs: false,
            cells: 0,
            budget: cfg.budget,
            unknown_cells: 0,
            unknown_mass: 0.0,
            notes: Vec::new(),
        }
    }

    fn p(&self) -> u32 {
        self.ev.fd.p
    }

    fn note(&mut self, msg: String) {
        if self.notes.len() < 16 && !self.notes.contains(&msg) {
            self.notes.push(msg);
        }
    }

    fn member(&mut self, a: &Assignment) -> Result<TruthVal, IntegrateError> {
        Ok(eval_with(&mut self.ev, a, &self.domain.formula)?)
    }

    /// `f·density` at a point of the domain, or `None` outside it.
    fn value(&mut self, a: &Assignment) -> Result<Option<Amount>, IntegrateError> {
        self.cells += 1;
        if self.cells > self.budget {
            return Err(IntegrateError::Budget {
                needed: self.cells as u128,
                cap: self.budget,
            });
        }
        match self.member(a)? {
            TruthVal::False => return Ok(None),
            TruthVal::Unknown => {
                self.unknown_cells += 1;
                return Ok(None);
            }
            TruthVal::True => {}
        }
        let v = MotivicEval::with_twist(&mut self.ev, self.twist.clone()).integrand(self.f, a)?;
        let mut v = Amount::Exact(v);
        if self.abs {
            v = v.magnitude();
        }
        if let Some(d) = self.density {
            let w = MotivicEval::new(&mut self.ev).motivic(d, a)?;
            if w.is_negative() {
                let at = a.iter().map(|(n, x)| format!("{n}={}", x.render(&self.ev.fd))).collect::<Vec<_>>();
                return Err(IntegrateError::NegativeDensity(at.join(", ")));
            }
            v = v.scale(&w);
        }
        Ok(Some(v))
    }

    fn point(&mut self, a: &Assignment, mass: f64) -> Result<Partial, IntegrateError> {
        let before = self.unknown_cells;
        let v = self.value(a)?;
        if self.unknown_cells > before {
            self.unknown_mass += mass;
        }
        Ok(Partial::leaf(v.unwrap_or_else(|| Amount::zero(self.p()))))
    }

    /// Integral over `coords` with the other variables fixed by `a`.
    fn integrate(&mut self, coords: &[Var], a: &mut Assignment, mass: f64) -> Result<Partial, IntegrateError> {
        let Some((c, rest)) = coords.split_first() else {
            return self.point(a, mass);
        };
        let p = self.p();
        let b = self.ev.search;
        let mut status = TailStatus::ResolvedGeometric;
        let mut slices = Vec::new();
        match c.sort {
            Sort::VF => {
                let fd = self.ev.fd;
                for v in b.vmin..=b.vmax {
                    let m = p_pow(p, -fd.cell_mass_exponent(v, b.depth));
                    let mf = mass * rational_to_f64(&m);
                    let mut s = Amount::zero(p);
                    for x in fd.shell(v, b.depth) {
                        a.insert(&c.name, Value::VF(x));
                        let inner = self.integrate(rest, a, mf)?;
                        status = status.max(inner.status);
                        s = s.add(&inner.value);
                    }
                    slices.push(s.scale(&m));
                }
                a.remove(&c.name);
                if !slices[0].is_zero() {
                    status = status.max(TailStatus::Truncated);
                    self.note(format!("`{}` has mass at the lowest valuation {} of the window", c.name, b.vmin));
                }
                let up = geometric_tail(p, &slices);
                status = status.max(up.status);
                let mut total = up.value.clone();
                for s in &slices {
                    total = total.add(s);
                }
                Ok(Partial {
                    value: total,
                    status,
                    slices,
                    ratio: up.ratio,
                })
            }
            Sort::ZZ => {
                for z in b.zmin..=b.zmax {
                    a.insert(&c.name, Value::ZZ(z));
                    let inner = self.integrate(rest, a, mass)?;
                    status = status.max(inner.status);
                    slices.push(inner.value);
                }
                a.remove(&c.name);
                let up = geometric_tail(p, &slices);
                let down: Vec<Amount> = slices.iter().rev().cloned().collect();
                let down = geometric_tail(p, &down);
                status = status.max(up.status).max(down.status);
                let mut total = up.value.add(&down.value);
                for s in &slices {
                    total = total.add(s);
                }
                Ok(Partial {
                    value: total,
                    status,
                    slices,
                    ratio: up.ratio,
                })
            }
            Sort::RF => {
                let mut total = Amount::zero(p);
                for u in 0..p {
                    a.insert(&c.name, Value::RF(RFElem(u)));
                    let inner = self.integrate(rest, a, mass)?;
                    status = status.max(inner.status);
                    total = total.add(&inner.value);
                    slices.push(inner.value);
                }
                a.remove(&c.name);
                Ok(Partial {
                    value: total,
                    status,
                    slices,
                    ratio: None,
                })
            }
        }
    }
}

fn cells_per_coordinate(fd: &FieldDesc, b: &SearchBox, sort: Sort, grow: i64) -> u128 {
    let p = fd.p as u128;
    match sort {
        Sort::VF => {
            let shells = (b.vmax - b.vmin + 1 + 2 * grow) as u128;
            shells * (p - 1) * p.saturating_pow(b.depth as u32 - 1)
        }
        Sort::RF => p,
        Sort::ZZ => (b.zmax - b.zmin + 1 + 2 * grow) as u128,
    }
}

fn precheck(fd: &FieldDesc, cfg: &IntegrateConfig, over: &[Var], grow: i64) -> Result<(), IntegrateError> {
    cfg.search.validate()?;
    let needed = over
        .iter()
        .map(|v| cells_per_coordinate(fd, &cfg.search, v.sort, grow))
        .fold(1u128, |acc, n| acc.saturating_mul(n));
    if needed > cfg.budget as u128 {
        return Err(IntegrateError::Budget {
            needed,
            cap: cfg.budget,
        });
    }
    Ok(())
}

/// Checks that every variable of `f` and the domain is integrated or fixed.
fn check_coverage(f: &Integrand, domain: &DefinableSet, over: &[Var], x: &Assignment) -> Result<(), IntegrateError> {
    let mut names: Vec<&Var> = f.base().iter().collect();
    names.extend(domain.signature.vars.iter());
    for v in names {
        let integrated = over.iter().any(|o| o.name == v.name);
        if integrated == x.get(&v.name).is_some() {
            return Err(IntegrateError::Setup(if integrated {
                format!("`{}` is both integrated and assigned", v.name)
            } else {
                format!("`{}` is neither integrated nor assigned", v.name)
            }));
        }
    }
    for v in over {
        if let Some(d) = domain.signature.get(&v.name) {
            if d.sort != v.sort {
                return Err(IntegrateError::Setup(format!("`{}` has conflicting sorts", v.name)));
            }
        }
    }
    Ok(())
}

/// The variables of `f` followed by the remaining variables of the domain.
pub fn integration_vars(f: &Integrand, domain: &DefinableSet) -> Vec<Var> {
    let mut out: Vec<Var> = f.base().to_vec();
    for v in &domain.signature.vars {
        if !out.iter().any(|o| o.name == v.name) {
            out.push(v.clone());
        }
    }
    out
}

/// `ord(x) >= 0` for every VF variable: the unit polydisc `O^n`.
pub fn unit_polydisc(vars: &[Var]) -> Result<DefinableSet, EvalError> {
    DefinableSet::new(Formula::all(
        vars.iter()
            .filter(|v| v.sort == Sort::VF)
            .map(|v| Formula::Le(Term::lit(0, Sort::ZZ), Term::ord(Term::Var(v.clone())))),
    ))
}

fn run(
    fd: &FieldDesc,
    f: &Integrand,
    over: &[Var],
    domain: &DefinableSet,
    x: &Assignment,
    cfg: &IntegrateConfig,
) -> Result<IntegralResult, IntegrateError> {
    check_coverage(f, domain, over, x)?;
    precheck(fd, cfg, over, 0)?;
    let mut e = Engine::new(fd, f, domain, cfg);
    let mut a = x.clone();
    let part = e.integrate(over, &mut a, 1.0)?;
    if e.unknown_cells > 0 {
        return Err(IntegrateError::Unknown {
            cells: e.unknown_cells,
            mass: e.unknown_mass,
        });
    }
    let mut run = Amount::zero(fd.p);
    let partial_sums = part
        .slices
        .iter()
        .map(|s| {
            run = run.add(s);
            run.to_complex()
        })
        .collect();
    let mut notes = e.notes;
    notes.extend(e.ev.take_diagnostics());
    Ok(IntegralResult {
        value: part.value,
        status: part.status,
        cells: e.cells,
        partial_sums,
        tail_ratio: part.ratio,
        notes,
    })
}

/// `∫_domain f dμ` over all variables of `f` and the domain.
pub fn integrate(fd: &FieldDesc, f: &Integrand, domain: &DefinableSet, cfg: &IntegrateConfig) -> Result<IntegralResult, IntegrateError> {
    let over = integration_vars(f, domain);
    run(fd, f, &over, domain, &Assignment::new(), cfg)
}

/// `g(x) = ∫ f(x, y) dμ(y)` over the variables `over`, after checking that
/// the slice is not visibly divergent.
pub fn integrate_out(
    fd: &FieldDesc,
    f: &Integrand,
    over: &[Var],
    domain: &DefinableSet,
    x: &Assignment,
    cfg: &IntegrateConfig,
) -> Result<IntegralResult, IntegrateError> {
    let verdict = check_integrable(fd, f, over, domain, x, cfg)?;
    if verdict.verdict == Verdict::LikelyDivergent {
        return Err(IntegrateError::Refused(Box::new(verdict)));
    }
    run(fd, f, over, domain, x, cfg)
}

/// Index of the smallest grown window containing a coordinate value.
fn outside(v: i64, lo: i64, hi: i64) -> usize {
    (lo - v).max(v - hi).max(0) as usize
}

struct Growth<'e, 'c> {
    e: &'e mut Engine<'c>,
    buckets: Vec<f64>,
}

impl Growth<'_, '_> {
    fn walk(&mut self, coords: &[Var], a: &mut Assignment, mass: f64, idx: usize) -> Result<(), IntegrateError> {
        let Some((c, rest)) = coords.split_first() else {
            if let Some(v) = self.e.value(a)? {
                self.buckets[idx] += mass * v.abs();
            }
            return Ok(());
        };
        let b = self.e.ev.search;
        let g = GROWTH_STEPS as i64;
        let fd = self.e.ev.fd;
        match c.sort {
            Sort::VF => {
                for v in b.vmin - g..=b.vmax + g {
                    let m = rational_to_f64(&p_pow(fd.p, -fd.cell_mass_exponent(v, b.depth)));
                    let i = idx.max(outside(v, b.vmin, b.vmax));
                    for x in fd.shell(v, b.depth) {
                        a.insert(&c.name, Value::VF(x));
                        self.walk(rest, a, mass * m, i)?;
                    }
                }
            }
            Sort::ZZ => {
                for z in b.zmin - g..=b.zmax + g {
                    a.insert(&c.name, Value::ZZ(z));
                    self.walk(rest, a, mass, idx.max(outside(z, b.zmin, b.zmax)))?;
                }
            }
            Sort::RF => {
                for u in 0..fd.p {
                    a.insert(&c.name, Value::RF(RFElem(u)));
                    self.walk(rest, a, mass, idx)?;
                }
            }
        }
        a.remove(&c.name);
        Ok(())
    }
}

/// Integrals of `|f|` over windows growing by one valuation (and one
/// value-group step) at each end, classified by the ratios of the last
/// [`TAIL_K`] increments: all `≥ 1` is `LikelyDivergent`, all `≤ 1 - ε`
/// is `LikelyIntegrable`. Evaluation failures give `Inconclusive`; only
/// an exceeded budget is an error.
pub fn check_integrable(
    fd: &FieldDesc,
    f: &Integrand,
    over: &[Var],
    domain: &DefinableSet,
    x: &Assignment,
    cfg: &IntegrateConfig,
) -> Result<IntegrabilityVerdict, IntegrateError> {
    check_coverage(f, domain, over, x)?;
    precheck(fd, cfg, over, GROWTH_STEPS as i64)?;
    let mut e = Engine::new(fd, f, domain, cfg);
    e.abs = true;
    let mut g = Growth {
        e: &mut e,
        buckets: vec![0.0; GROWTH_STEPS + 1],
    };
    let mut a = x.clone();
    let inconclusive = |note: String| IntegrabilityVerdict {
        verdict: Verdict::Inconclusive,
        partial_integrals: Vec::new(),
        ratios: Vec::new(),
        tail_bound: None,
        note: Some(note),
    };
    match g.walk(over, &mut a, 1.0, 0) {
        Ok(()) => {}
        Err(err @ IntegrateError::Budget { .. }) => return Err(err),
        Err(err) => return Ok(inconclusive(err.to_string())),
    }
    let buckets = g.buckets;
    if e.unknown_cells > 0 {
        return Ok(inconclusive(format!("{} cells have unknown domain membership", e.unknown_cells)));
    }
    let mut acc = 0.0;
    let partial_integrals: Vec<f64> = buckets
        .iter()
        .map(|b| {
            acc += b;
            acc
        })
        .collect();
    let inc = &buckets[buckets.len() - TAIL_K..];
    let ratios: Vec<Option<f64>> = inc
        .windows(2)
        .map(|w| match (w[0], w[1]) {
            (a, b) if a == 0.0 && b == 0.0 => Some(0.0),
            (a, _) if a == 0.0 => None,
            (a, b) => Some(b / a),
        })
        .collect();
    let last = inc[TAIL_K - 1];
    let (verdict, tail_bound) = if inc.iter().all(|&d| d == 0.0) {
        (Verdict::LikelyIntegrable, Some(0.0))
    } else if ratios.iter().all(|r| r.map_or(true, |r| r >= 1.0)) && last > 0.0 {
        (Verdict::LikelyDivergent, None)
    } else if ratios.iter().all(|r| r.is_some_and(|r| r <= 1.0 - TAIL_EPS)) {
        let r = ratios.iter().flatten().fold(0.0f64, |m, &r| m.max(r));
        (Verdict::LikelyIntegrable, Some(last * r / (1.0 - r)))
    } else {
        (Verdict::Inconclusive, None)
    };
    Ok(IntegrabilityVerdict {
        verdict,
        partial_integrals,
        ratios,
        tail_bound,
        note: None,
    })
}

struct Bounds<'e, 'c> {
    e: &'e mut Engine<'c>,
    sup: Option<(Amount, Assignment)>,
    /// Per coordinate: index → largest magnitude seen.
    maxima: Vec<std::collections::BTreeMap<i64, Amount>>,
}

impl Bounds<'_, '_> {
    fn walk(&mut self, coords: &[Var], k: usize, a: &mut Assignment, keys: &mut Vec<i64>) -> Result<(), IntegrateError> {
        let Some(c) = coords.get(k) else {
            let Some(v) = self.e.value(a)? else {
                return Ok(());
            };
            let m = v.magnitude();
            for (j, key) in keys.iter().enumerate() {
                let slot = self.maxima[j].entry(*key).or_insert_with(|| m.clone());
                if m.cmp_abs(slot).is_gt() {
                    *slot = m.clone();
                }
            }
            if self.sup.as_ref().map_or(true, |(s, _)| m.cmp_abs(s).is_gt()) {
                self.sup = Some((m, a.clone()));
            }
            return Ok(());
        };
        let b = self.e.ev.search;
        let fd = self.e.ev.fd;
        match c.sort {
            Sort::VF => {
                for v in b.vmin..=b.vmax {
                    keys[k] = v;
                    for x in fd.shell(v, b.depth) {
                        a.insert(&c.name, Value::VF(x));
                        self.walk(coords, k + 1, a, keys)?;
                    }
                }
            }
            Sort::ZZ => {
                for z in b.zmin..=b.zmax {
                    keys[k] = z;
                    a.insert(&c.name, Value::ZZ(z));
                    self.walk(coords, k + 1, a, keys)?;
                }
            }
            Sort::RF => {
                keys[k] = 0;
                for u in 0..fd.p {
                    a.insert(&c.name, Value::RF(RFElem(u)));
                    self.walk(coords, k + 1, a, keys)?;
                }
            }
        }
        a.remove(&c.name);
        Ok(())
    }
}

/// Whether the maxima keep growing toward an edge that the window reaches.
pub(crate) fn grows_at_edge(m: &std::collections::BTreeMap<i64, Amount>, lo: i64, hi: i64) -> bool {
    let seq: Vec<(&i64, &Amount)> = m.iter().collect();
    if seq.len() < EDGE_RUN {
        return false;
    }
    let up = &seq[seq.len() - EDGE_RUN..];
    if *up[EDGE_RUN - 1].0 == hi && up.windows(2).all(|w| w[1].1.cmp_abs(w[0].1).is_gt()) {
        return true;
    }
    let down = &seq[..EDGE_RUN];
    *down[0].0 == lo && down.windows(2).all(|w| w[0].1.cmp_abs(w[1].1).is_gt())
}

/// The largest `|f|` over the cells of the box, with its cell, and whether
/// the per-valuation (per-value for ZZ) maxima grow toward a window edge.
pub fn check_bounded(fd: &FieldDesc, f: &Integrand, domain: &DefinableSet, cfg: &IntegrateConfig) -> Result<BoundReport, IntegrateError> {
    let over = integration_vars(f, domain);
    check_coverage(f, domain, &over, &Assignment::new())?;
    precheck(fd, cfg, &over, 0)?;
    let mut e = Engine::new(fd, f, domain, cfg);
    let mut bounds = Bounds {
        e: &mut e,
        sup: None,
        maxima: vec![Default::default(); over.len()],
    };
    let mut keys = vec![0; over.len()];
    bounds.walk(&over, 0, &mut Assignment::new(), &mut keys)?;
    let (sup, maxima) = (bounds.sup, bounds.maxima);
    if e.unknown_cells > 0 {
        return Err(IntegrateError::Unknown {
            cells: e.unknown_cells,
            mass: f64::NAN,
        });
    }
    let b = cfg.search;
    let mut verdict = if sup.is_some() { BoundVerdict::Bounded } else { BoundVerdict::Empty };
    let mut edge_maxima = Vec::new();
    for (v, m) in over.iter().zip(&maxima) {
        let (lo, hi) = match v.sort {
            Sort::VF => (b.vmin, b.vmax),
            Sort::ZZ => (b.zmin, b.zmax),
            Sort::RF => continue,
        };
        if grows_at_edge(m, lo, hi) {
            verdict = BoundVerdict::UnboundedSuspected;
        }
        edge_maxima.push((v.name.clone(), m.iter().map(|(k, a)| (*k, a.abs())).collect()));
    }
    let witness = sup
        .as_ref()
        .map(|(_, a)| a.iter().map(|(n, x)| (n.clone(), x.render(fd))).collect())
        .unwrap_or_default();
    Ok(BoundReport {
        sup: sup.map(|(m, _)| m),
        witness,
        verdict,
        edge_maxima,
    })
}

struct Visit<'e, 'c, 'v> {
    e: &'e mut Engine<'c>,
    visit: &'v mut dyn FnMut(&Assignment, &Amount),
}

impl Visit<'_, '_, '_> {
    fn walk(&mut self, coords: &[Var], a: &mut Assignment) -> Result<(), IntegrateError> {
        let Some((c, rest)) = coords.split_first() else {
            if let Some(v) = self.e.value(a)? {
                (self.visit)(a, &v);
            }
            return Ok(());
        };
        let b = self.e.ev.search;
        let fd = self.e.ev.fd;
        match c.sort {
            Sort::VF => {
                for v in b.vmin..=b.vmax {
                    for x in fd.shell(v, b.depth) {
                        a.insert(&c.name, Value::VF(x));
                        self.walk(rest, a)?;
                    }
                }
            }
            Sort::ZZ => {
                for z in b.zmin..=b.zmax {
                    a.insert(&c.name, Value::ZZ(z));
                    self.walk(rest, a)?;
                }
            }
            Sort::RF => {
                for u in 0..fd.p {
                    a.insert(&c.name, Value::RF(RFElem(u)));
                    self.walk(rest, a)?;
                }
            }
        }
        a.remove(&c.name);
        Ok(())
    }
}

/// Calls `visit` on every cell representative of the box that lies in the
/// domain, with the value of `f` there. Returns the number of cells whose
/// membership is unknown.
pub fn visit_cells(
    fd: &FieldDesc,
    f: &Integrand,
    domain: &DefinableSet,
    cfg: &IntegrateConfig,
    visit: &mut dyn FnMut(&Assignment, &Amount),
) -> Result<u64, IntegrateError> {
    let over = integration_vars(f, domain);
    check_coverage(f, domain, &over, &Assignment::new())?;
    precheck(fd, cfg, &over, 0)?;
    let mut e = Engine::new(fd, f, domain, cfg);
    Visit { e: &mut e, visit }.walk(&over, &mut Assignment::new())?;
    Ok(e.unknown_cells)
}
