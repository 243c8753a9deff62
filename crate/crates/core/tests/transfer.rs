use wb_core::eval::DefinableSet;
use wb_core::integrate::IntegrateConfig;
use wb_core::localfield::FieldDesc;
use wb_core::motivic::parse_block;
use wb_core::transfer::{integrand_of, parse_workbook, transfer_experiment, uniform_bound_fit, TransferConfig, TransferError};
use wb_core::eval::TruthVal;
use wb_core::syntax::{parse_formula_with, Decls};

const SUITE: &str = include_str!("../../../suite/stmts/transfer_suite.stmt");

#[test]
fn suite_agrees_at_every_prime() {
    let wb = parse_workbook(SUITE).unwrap();
    let cfg = TransferConfig::default();
    let stmts: Vec<_> = wb.statements().collect();
    assert!(stmts.len() >= 10);
    for s in stmts {
        let r = transfer_experiment(s, &[5, 7, 11, 13, 17], &cfg).unwrap();
        let verdicts: Vec<String> = r.rows.iter().map(|x| format!("{}/{}:{}|{}", x.p, x.twist, x.qp.verdict.name(), x.fpt.verdict.name())).collect();
        println!("{}: m={:?} {}", s.name, r.m, verdicts.join(" "));
        assert!(r.all_agree(), "{}: {:?}", s.name, r.disagreements);
        assert!(r.excluded.is_empty(), "{}: {:?}", s.name, r.excluded);
    }
}

#[test]
fn square_root_of_two_depends_on_p() {
    let wb = parse_workbook(SUITE).unwrap();
    let s = wb.statements().find(|s| s.name == "sqrt2_residue").unwrap();
    let r = transfer_experiment(s, &[5, 7, 11, 13], &TransferConfig::default()).unwrap();
    let at = |p| r.rows.iter().find(|x| x.p == p).unwrap().qp.verdict;
    assert_eq!(at(5), TruthVal::False);
    assert_eq!(at(7), TruthVal::True);
    assert_eq!(r.m, Some(5));
    assert!(r.to_csv().starts_with("p,twist,Qp,FpT,agree\n5,1,False,False,yes\n"));
}

fn fit(text: &str, domain: &str) -> Result<wb_core::transfer::FitRecord, TransferError> {
    let f = integrand_of(&parse_block(text).unwrap());
    let decls: Decls = f.base().iter().map(|v| (v.name.clone(), v.sort)).collect();
    let d = DefinableSet::new(parse_formula_with(domain, &decls).unwrap()).unwrap();
    let fields = [FieldDesc::qp(5, 12).unwrap(), FieldDesc::fpt(5, 12).unwrap(), FieldDesc::qp(7, 12).unwrap()];
    uniform_bound_fit(&f, &d, &fields, &IntegrateConfig::default())
}

#[test]
fn uniform_fit_examples() {
    let r = fit("motivic f(L:ZZ) { term { alpha: L } }", "true").unwrap();
    assert_eq!((r.a, r.b, r.a_minimal, r.b_minimal), (0, 1, true, true));
    assert_eq!(r.max_ratio, "1");
    let r = fit("motivic f(L:ZZ) { term { alpha: -L; beta: L + 1; fiber: L >= 0 } }", "true").unwrap();
    assert_eq!((r.a, r.b), (0, 0));
    let e = fit("motivic f(w:VF, L:ZZ) { term { alpha: ord(w) } }", "ord(w) >= 0 /\\ L = 0").unwrap_err();
    assert!(matches!(e, TransferError::Hypothesis { .. }), "{e}");
}
