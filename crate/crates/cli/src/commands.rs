use std::path::Path;

use serde_json::{json, Value as Json};

use wb_core::eval::{
    enumerate_set, eval_formula, parse_assignment, Assignment, DefinableSet, EvalError, SearchBox, TruthVal,
};
use wb_core::integrate::{
    check_bounded, check_integrable, integrate, integration_vars, unit_polydisc, IntegrateConfig, IntegrateError,
    TailStatus, Verdict, DEFAULT_CELL_BUDGET,
};
use wb_core::localfield::{parse_field, FieldDesc};
use wb_core::motivic::{Block, Integrand, MotivicError};
use wb_core::syntax::{format, parse_formula, parse_formula_with, Decls, Formula, Var};
use wb_core::transfer::{
    integrand_of, parse_workbook, transfer_experiment, uniform_bound_fit, Item, TransferConfig, TransferError, Workbook,
};
use wb_core::zsums::{tsum_bound, tsum_eval, tsum_merge, BoundOptions, TermSum, ZsumError};

use crate::{input, BoxArgs, BoundArgs, CliError, Command, EnumerateArgs, EvalArgs, IntegrateArgs, Outcome, TransferArgs, ZsumArgs};

pub(crate) fn dispatch(c: &Command, cap: Option<u64>) -> Result<Outcome, CliError> {
    match c {
        Command::Parse(a) => parse(&a.file),
        Command::Eval(a) => eval(a, cap),
        Command::Enumerate(a) => enumerate(a, cap),
        Command::Integrate(a) => integrate_cmd(a, cap),
        Command::Transfer(a) => transfer(a, cap),
        Command::Bound(a) => bound(a, cap),
        Command::Zsum(a) => zsum(a),
    }
}

fn done(payload: Json) -> Result<Outcome, CliError> {
    Ok(Outcome {
        payload,
        inconclusive: false,
    })
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn eval_err(e: EvalError) -> CliError {
    match e {
        EvalError::Budget { .. } => CliError::Budget(e.to_string()),
        e => input(e),
    }
}

fn motivic_err(e: MotivicError) -> CliError {
    match e {
        MotivicError::Eval(e) => eval_err(e),
        e => input(e),
    }
}

fn integrate_err(e: IntegrateError) -> CliError {
    match e {
        IntegrateError::Budget { .. } => CliError::Budget(e.to_string()),
        IntegrateError::Eval(e) => eval_err(e),
        IntegrateError::Motivic(e) => motivic_err(e),
        e => input(e),
    }
}

fn transfer_err(e: TransferError) -> CliError {
    if e.is_budget() {
        CliError::Budget(e.to_string())
    } else {
        input(e)
    }
}

fn search_box(w: &BoxArgs) -> Result<SearchBox, CliError> {
    SearchBox::new(w.vrange.0, w.vrange.1, w.depth, w.zwindow.0, w.zwindow.1).map_err(input)
}

fn budget(w: &BoxArgs, cap: Option<u64>) -> u64 {
    let b = w.budget.unwrap_or(DEFAULT_CELL_BUDGET);
    cap.map_or(b, |c| b.min(c))
}

fn field(text: &str) -> Result<FieldDesc, CliError> {
    parse_field(text).map_err(input)
}

/// A file holding either one bare formula or a workbook.
enum Source {
    Formula(Formula),
    Workbook(Workbook),
}

fn load(path: &Path) -> Result<Source, CliError> {
    let text = read(path)?;
    match parse_workbook(&text) {
        Ok(wb) => Ok(Source::Workbook(wb)),
        Err(wb_err) => match parse_formula(&text) {
            Ok(f) => Ok(Source::Formula(f)),
            Err(f_err) => {
                let first = text
                    .lines()
                    .map(str::trim)
                    .find(|l| !l.is_empty() && !l.starts_with('#'))
                    .and_then(|l| l.split_whitespace().next())
                    .unwrap_or("");
                let keyword = matches!(first, "formula" | "motivic" | "exp" | "tsum" | "statement");
                let msg = if keyword { wb_err.to_string() } else { f_err.to_string() };
                Err(CliError::Input(format!("{}: {msg}", path.display())))
            }
        },
    }
}

fn load_workbook(path: &Path) -> Result<Workbook, CliError> {
    match load(path)? {
        Source::Workbook(wb) => Ok(wb),
        Source::Formula(_) => Err(CliError::Input(format!("{}: expected a workbook, found a bare formula", path.display()))),
    }
}

fn load_formula(path: &Path, name: Option<&str>) -> Result<Formula, CliError> {
    match load(path)? {
        Source::Formula(f) => Ok(f),
        Source::Workbook(wb) => {
            let found = match name {
                Some(n) => wb.formula(n).cloned(),
                None => wb.formulas().next().map(|(_, f)| f.clone()),
            };
            found.ok_or_else(|| {
                CliError::Input(match name {
                    Some(n) => format!("no formula named `{n}`"),
                    None => format!("{}: no formula", path.display()),
                })
            })
        }
    }
}

fn pick_block<'a>(wb: &'a Workbook, name: Option<&str>) -> Result<&'a Block, CliError> {
    match name {
        Some(n) => wb.block(n).ok_or_else(|| CliError::Input(format!("no function named `{n}`"))),
        None => wb.blocks().next().ok_or_else(|| CliError::Input("no motivic or exp block".into())),
    }
}

fn domain_of(spec: &str, f: &Integrand, wb: &Workbook) -> Result<DefinableSet, CliError> {
    let spec = spec.trim();
    let formula = match spec {
        "O" => return unit_polydisc(f.base()).map_err(eval_err),
        "all" | "true" => Formula::True,
        s if s.starts_with('@') => wb
            .formula(&s[1..])
            .cloned()
            .ok_or_else(|| CliError::Input(format!("no formula named `{}`", &s[1..])))?,
        s => {
            let decls: Decls = f.base().iter().map(|v| (v.name.clone(), v.sort)).collect();
            parse_formula_with(s, &decls).map_err(input)?
        }
    };
    DefinableSet::new(formula).map_err(eval_err)
}

fn assignment(text: &str, set: &DefinableSet, fd: &FieldDesc) -> Result<Assignment, CliError> {
    if text.trim().is_empty() {
        return Ok(Assignment::default());
    }
    parse_assignment(text, &set.signature, fd).map_err(eval_err)
}

fn vars_json(vars: &[Var]) -> Json {
    Json::Array(vars.iter().map(|v| json!({ "name": v.name, "sort": v.sort.name() })).collect())
}

fn parse(path: &Path) -> Result<Outcome, CliError> {
    let items = match load(path)? {
        Source::Formula(f) => {
            let set = DefinableSet::new(f).map_err(eval_err)?;
            vec![json!({ "kind": "formula", "text": format(&set.formula), "free": vars_json(&set.signature.vars) })]
        }
        Source::Workbook(wb) => wb.items.iter().map(item_json).collect::<Result<_, _>>()?,
    };
    done(json!({ "items": items }))
}

fn item_json(item: &Item) -> Result<Json, CliError> {
    Ok(match item {
        Item::Formula(n, f) => {
            let set = DefinableSet::new(f.clone()).map_err(eval_err)?;
            json!({ "kind": "formula", "name": n, "text": format(f), "free": vars_json(&set.signature.vars) })
        }
        Item::Block(b) => {
            let (kind, terms) = match b {
                Block::Motivic(_, f) => ("motivic", f.terms.len()),
                Block::Exp(_, f) => ("exp", f.terms.len()),
            };
            json!({ "kind": kind, "name": b.name(), "base": vars_json(integrand_of(b).base()), "terms": terms })
        }
        Item::TermSum(t) => json!({ "kind": "tsum", "name": t.name, "text": t.to_string() }),
        Item::Statement(s) => json!({
            "kind": "statement",
            "name": s.name,
            "statement": s.kind,
            "twists": s.twists,
        }),
    })
}

fn eval(a: &EvalArgs, _cap: Option<u64>) -> Result<Outcome, CliError> {
    let fd = field(&a.field)?;
    let search = search_box(&a.window)?;
    let set = DefinableSet::new(load_formula(&a.formula, a.name.as_deref())?).map_err(eval_err)?;
    let x = assignment(&a.assign, &set, &fd)?;
    let v = eval_formula(&fd, &search, &x, &set.formula).map_err(eval_err)?;
    Ok(Outcome {
        payload: json!({
            "formula": format(&set.formula),
            "field": format!("{}:{}", fd.family.tag(), fd.p),
            "verdict": v.name(),
        }),
        inconclusive: v == TruthVal::Unknown,
    })
}

fn enumerate(a: &EnumerateArgs, cap: Option<u64>) -> Result<Outcome, CliError> {
    let fd = field(&a.field)?;
    let search = search_box(&a.window)?;
    let set = DefinableSet::new(load_formula(&a.formula, a.name.as_deref())?).map_err(eval_err)?;
    let x = assignment(&a.assign, &set, &fd)?;
    let e = enumerate_set(&fd, &search, &set, &x, budget(&a.window, cap) as u128).map_err(eval_err)?;
    let render = |ts: &[Vec<wb_core::eval::Value>]| -> Json {
        ts.iter()
            .take(a.limit)
            .map(|t| Json::Array(t.iter().map(|v| Json::String(v.render(&fd))).collect()))
            .collect()
    };
    Ok(Outcome {
        payload: json!({
            "formula": format(&set.formula),
            "vars": vars_json(&e.vars),
            "examined": e.examined.to_string(),
            "true_count": e.true_tuples.len(),
            "unknown_count": e.unknown_tuples.len(),
            "true": render(&e.true_tuples),
            "unknown": render(&e.unknown_tuples),
        }),
        inconclusive: e.true_tuples.is_empty() && !e.unknown_tuples.is_empty(),
    })
}

fn integrate_config(w: &BoxArgs, cap: Option<u64>, twist: i64) -> Result<IntegrateConfig, CliError> {
    let mut cfg = IntegrateConfig::new(search_box(w)?);
    cfg.budget = budget(w, cap);
    cfg.twist = wb_core::motivic::Twist { c: twist };
    Ok(cfg)
}

fn integrate_cmd(a: &IntegrateArgs, cap: Option<u64>) -> Result<Outcome, CliError> {
    let fd = field(&a.field)?;
    let wb = load_workbook(&a.file)?;
    let block = pick_block(&wb, a.name.as_deref())?;
    let f = integrand_of(block);
    let domain = domain_of(&a.domain, &f, &wb)?;
    let cfg = integrate_config(&a.window, cap, a.twist)?;
    if a.check {
        let over = integration_vars(&f, &domain);
        let v = check_integrable(&fd, &f, &over, &domain, &Assignment::default(), &cfg).map_err(integrate_err)?;
        return Ok(Outcome {
            inconclusive: v.verdict == Verdict::Inconclusive,
            payload: json!({ "function": block.name(), "integrability": v }),
        });
    }
    let r = integrate(&fd, &f, &domain, &cfg).map_err(integrate_err)?;
    Ok(Outcome {
        inconclusive: r.status == TailStatus::DivergentSuspected,
        payload: json!({
            "function": block.name(),
            "value": r.value.to_string(),
            "status": r.status.name(),
            "integral": r,
        }),
    })
}

fn transfer(a: &TransferArgs, cap: Option<u64>) -> Result<Outcome, CliError> {
    let wb = load_workbook(&a.file)?;
    let statements: Vec<_> = wb.statements().filter(|s| a.statement.as_ref().map_or(true, |n| *n == s.name)).collect();
    if statements.is_empty() {
        return Err(CliError::Input(match &a.statement {
            Some(n) => format!("no statement named `{n}`"),
            None => format!("{}: no statements", a.file.display()),
        }));
    }
    let cfg = TransferConfig {
        search: search_box(&a.window)?,
        budget: budget(&a.window, cap),
        precision: a.precision,
    };
    let mut reports = Vec::new();
    let mut csv = String::from("statement,p,twist,Qp,FpT,agree\n");
    for s in statements {
        let r = transfer_experiment(s, &a.primes, &cfg).map_err(transfer_err)?;
        for line in r.to_csv().lines().skip(1) {
            csv.push_str(&format!("{},{line}\n", r.statement));
        }
        reports.push(r);
    }
    if let Some(path) = &a.csv {
        std::fs::write(path, &csv)?;
    }
    let inconclusive = reports.iter().all(|r| !r.informative);
    let all_agree = reports.iter().all(|r| r.all_agree());
    Ok(Outcome {
        payload: json!({ "all_agree": all_agree, "reports": reports }),
        inconclusive,
    })
}

fn bound(a: &BoundArgs, cap: Option<u64>) -> Result<Outcome, CliError> {
    let fields: Vec<FieldDesc> = a.field.iter().map(|f| field(f)).collect::<Result<_, _>>()?;
    let wb = load_workbook(&a.file)?;
    let block = pick_block(&wb, a.name.as_deref())?;
    let f = integrand_of(block);
    let domain = domain_of(&a.domain, &f, &wb)?;
    let cfg = integrate_config(&a.window, cap, 1)?;
    if a.fit {
        return match uniform_bound_fit(&f, &domain, &fields, &cfg) {
            Ok(fit) => done(json!({ "function": block.name(), "fit": fit })),
            Err(TransferError::Hypothesis { field, at, maxima }) => Ok(Outcome {
                payload: json!({
                    "function": block.name(),
                    "fit": null,
                    "hypothesis_violation": { "field": field, "at": at, "maxima": maxima },
                }),
                inconclusive: true,
            }),
            Err(e) => Err(transfer_err(e)),
        };
    }
    let mut per_field = Vec::new();
    for fd in &fields {
        let r = check_bounded(fd, &f, &domain, &cfg).map_err(integrate_err)?;
        per_field.push(json!({ "field": format!("{}:{}", fd.family.tag(), fd.p), "verdict": r.verdict.name(), "report": r }));
    }
    done(json!({ "function": block.name(), "fields": per_field }))
}

fn zsum_err(e: ZsumError) -> CliError {
    match e {
        ZsumError::Cap(_) => CliError::Budget(e.to_string()),
        e => input(e),
    }
}

fn pick_tsum<'a>(wb: &'a Workbook, name: Option<&str>) -> Result<&'a TermSum, CliError> {
    let mut all = wb.tsums();
    match name {
        Some(n) => all.find(|t| t.name == n).ok_or_else(|| CliError::Input(format!("no term sum named `{n}`"))),
        None => all.next().ok_or_else(|| CliError::Input("no term sum".into())),
    }
}

/// `q=5 L=2` → `(q, point)` in the order of `h.vars`.
fn eval_point(text: &str, h: &TermSum) -> Result<(u64, Vec<i128>), CliError> {
    let mut q = None;
    let mut vals = vec![None; h.vars.len()];
    for part in text.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| CliError::Input(format!("expected `name=value`, got `{part}`")))?;
        if k == "q" {
            q = Some(v.parse::<u64>().map_err(|e| CliError::Input(format!("q=`{v}`: {e}")))?);
            continue;
        }
        let i = h.vars.iter().position(|n| n == k).ok_or_else(|| CliError::Input(format!("`{k}` is not a variable of `{}`", h.name)))?;
        vals[i] = Some(v.parse::<i128>().map_err(|e| CliError::Input(format!("{k}=`{v}`: {e}")))?);
    }
    let q = q.ok_or_else(|| CliError::Input("missing `q=`".into()))?;
    let point = vals
        .into_iter()
        .zip(&h.vars)
        .map(|(v, n)| v.ok_or_else(|| CliError::Input(format!("missing value for `{n}`"))))
        .collect::<Result<_, _>>()?;
    Ok((q, point))
}

fn zsum(a: &ZsumArgs) -> Result<Outcome, CliError> {
    let wb = load_workbook(&a.file)?;
    let h = pick_tsum(&wb, a.name.as_deref())?;
    let mut payload = json!({ "name": h.name, "input": h.to_string(), "merged": tsum_merge(h).to_string() });
    let mut inconclusive = false;
    if let Some(text) = &a.eval {
        let (q, point) = eval_point(text, h)?;
        let v = tsum_eval(h, q, &point).map_err(zsum_err)?;
        payload["eval"] = json!({ "q": q, "point": point.iter().map(|x| x.to_string()).collect::<Vec<_>>(), "value": v.to_string() });
    }
    if a.bound {
        let cert = tsum_bound(h, &BoundOptions { q0: a.q0 }).map_err(zsum_err)?;
        inconclusive = cert.as_ref().map_or(true, |c| !c.certified);
        payload["bound"] = json!(cert);
    }
    Ok(Outcome { payload, inconclusive })
}
