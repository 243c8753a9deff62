use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use wb_core::eval::{Assignment, DefinableSet};
use wb_core::integrate::{
    check_bounded, check_integrable, integrate, unit_polydisc, BoundVerdict, IntegrateConfig, IntegrateError, TailStatus,
    Verdict,
};
use wb_core::localfield::{Family, FieldDesc};
use wb_core::motivic::{parse_block, Integrand};
use wb_core::syntax::{parse_formula_with, Decls};
use wb_core::transfer::integrand_of;

fn integrand(text: &str) -> Integrand {
    integrand_of(&parse_block(text).unwrap())
}

fn domain(f: &Integrand, text: &str) -> DefinableSet {
    let decls: Decls = f.base().iter().map(|v| (v.name.clone(), v.sort)).collect();
    DefinableSet::new(parse_formula_with(text, &decls).unwrap()).unwrap()
}

fn p_pow(p: u32, e: i64) -> BigRational {
    let b = BigRational::from_integer(BigInt::from(p).pow(e.unsigned_abs() as u32));
    if e >= 0 {
        b
    } else {
        b.recip()
    }
}

fn fields() -> Vec<FieldDesc> {
    [3, 5, 7]
        .into_iter()
        .flat_map(|p| [FieldDesc::new(Family::MixedChar, p, 12).unwrap(), FieldDesc::new(Family::EqualChar, p, 12).unwrap()])
        .collect()
}

#[test]
fn powers_of_the_absolute_value_over_the_unit_disc() {
    for s in 1..=3i64 {
        let f = integrand(&format!("motivic f(x:VF) {{ term {{ alpha: -{s} * ord(x) }} }}"));
        let o = unit_polydisc(f.base()).unwrap();
        for fd in fields() {
            let r = integrate(&fd, &f, &o, &IntegrateConfig::default()).unwrap();
            // Σ_v (1 − p⁻¹) p^{−v(1+s)}.
            let want = (BigRational::one() - p_pow(fd.p, -1)) / (BigRational::one() - p_pow(fd.p, -1 - s));
            assert_eq!(r.value.as_rational(), Some(want), "s = {s} over {fd:?}");
            assert_eq!(r.status, TailStatus::ResolvedGeometric);
        }
    }
}

#[test]
fn balls_have_measure_p_to_minus_k() {
    let f = integrand("motivic one(x:VF) { term { } }");
    for k in -2..=3i64 {
        let d = domain(&f, &format!("ord(x) >= {k}"));
        for fd in fields() {
            let r = integrate(&fd, &f, &d, &IntegrateConfig::default()).unwrap();
            assert_eq!(r.value.as_rational(), Some(p_pow(fd.p, -k)), "k = {k} over {fd:?}");
        }
    }
}

#[test]
fn angular_component_slices_split_evenly() {
    // {ord x = 0, ac x = a} has measure p⁻¹ for each nonzero a.
    let f = integrand("motivic one(x:VF) { term { } }");
    for fd in fields() {
        for a in 1..fd.p {
            let d = domain(&f, &format!("ord(x) = 0 /\\ ac(x) = {a}"));
            let r = integrate(&fd, &f, &d, &IntegrateConfig::default()).unwrap();
            assert_eq!(r.value.as_rational(), Some(p_pow(fd.p, -1)));
        }
    }
}

#[test]
fn integrability_heuristic() {
    let fd = FieldDesc::qp(5, 12).unwrap();
    let x = Assignment::new();
    let good = integrand("motivic f(x:VF) { term { alpha: -ord(x) } }");
    let bad = integrand("motivic f(x:VF) { term { alpha: 2 * ord(x) } }");
    let o = unit_polydisc(good.base()).unwrap();
    let cfg = IntegrateConfig::default();
    let over = good.base().to_vec();
    assert_eq!(check_integrable(&fd, &good, &over, &o, &x, &cfg).unwrap().verdict, Verdict::LikelyIntegrable);
    assert_eq!(check_integrable(&fd, &bad, &over, &o, &x, &cfg).unwrap().verdict, Verdict::LikelyDivergent);
}

#[test]
fn boundedness_check() {
    let fd = FieldDesc::fpt(3, 12).unwrap();
    let small = integrand("motivic f(x:VF) { term { alpha: -ord(x) } }");
    let big = integrand("motivic f(x:VF) { term { alpha: ord(x) } }");
    let o = unit_polydisc(small.base()).unwrap();
    let cfg = IntegrateConfig::default();
    let r = check_bounded(&fd, &small, &o, &cfg).unwrap();
    assert_eq!(r.verdict, BoundVerdict::Bounded);
    assert_eq!(r.sup.unwrap().as_rational(), Some(BigRational::one()));
    assert_eq!(check_bounded(&fd, &big, &o, &cfg).unwrap().verdict, BoundVerdict::UnboundedSuspected);
}

#[test]
fn budget_is_enforced() {
    let fd = FieldDesc::qp(5, 12).unwrap();
    let f = integrand("motivic f(x:VF) { term { alpha: -ord(x) } }");
    let o = unit_polydisc(f.base()).unwrap();
    let cfg = IntegrateConfig { budget: 10, ..IntegrateConfig::default() };
    assert!(matches!(integrate(&fd, &f, &o, &cfg), Err(IntegrateError::Budget { cap: 10, .. })));
}

#[test]
fn deeper_cells_do_not_change_step_functions() {
    let f = integrand("motivic f(x:VF) { term { alpha: -ord(x); fiber(e:RF): e * e = ac(x) } }");
    let o = unit_polydisc(f.base()).unwrap();
    for fd in fields() {
        let vals: Vec<_> = (1..=3)
            .map(|d| integrate(&fd, &f, &o, &IntegrateConfig::default().with_depth(d)).unwrap().value.as_rational())
            .collect();
        assert!(vals[0].is_some() && vals.iter().all(|v| *v == vals[0]), "{fd:?}: {vals:?}");
    }
}
