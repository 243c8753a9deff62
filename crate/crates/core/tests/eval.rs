use wb_core::eval::{enumerate_set, eval_formula, Assignment, DefinableSet, SearchBox, TruthVal, Value, DEFAULT_BUDGET};
use wb_core::localfield::{Family, FieldDesc};
use wb_core::syntax::parse_formula;

const ODD: [u32; 4] = [3, 5, 7, 11];

fn fields(p: u32) -> [FieldDesc; 2] {
    [FieldDesc::new(Family::MixedChar, p, 12).unwrap(), FieldDesc::new(Family::EqualChar, p, 12).unwrap()]
}

fn sentence(fd: &FieldDesc, text: &str) -> TruthVal {
    eval_formula(fd, &SearchBox::default(), &Assignment::new(), &parse_formula(text).unwrap()).unwrap()
}

fn is_square_mod(a: u32, p: u32) -> bool {
    (0..p).any(|y| y * y % p == a % p)
}

#[test]
fn residue_squares_follow_quadratic_residues() {
    for p in ODD {
        for fd in fields(p) {
            for a in 0..p {
                let got = sentence(&fd, &format!("exists e:RF (e * e = {a})"));
                assert_eq!(got, TruthVal::from_bool(is_square_mod(a, p)), "p = {p}, a = {a}");
            }
        }
    }
}

#[test]
fn valued_field_quantifiers_inside_the_box() {
    for fd in fields(5) {
        assert_eq!(sentence(&fd, "exists x:VF (ord(x) = 1)"), TruthVal::True);
        // The box holds elements of negative valuation.
        assert_eq!(sentence(&fd, "forall x:VF (ord(x) >= 0)"), TruthVal::False);
        // A universal with no counterexample in the box stays open.
        assert_eq!(sentence(&fd, "forall x:VF (ord(x * x) = ord(x) + ord(x))"), TruthVal::Unknown);
        assert_eq!(sentence(&fd, "exists x:VF (ord(x * x) = 2 /\\ ac(x) = 2)"), TruthVal::True);
        // No witness of valuation 40 can be seen.
        assert_eq!(sentence(&fd, "exists x:VF (ord(x) = 40)"), TruthVal::Unknown);
    }
}

#[test]
fn value_group_sentences() {
    let fd = FieldDesc::qp(3, 8).unwrap();
    assert_eq!(sentence(&fd, "forall k:ZZ (exists m:ZZ (k = 2 * m \\/ k = 2 * m + 1))"), TruthVal::True);
    assert_eq!(sentence(&fd, "exists k:ZZ (k + k = 7)"), TruthVal::False);
    assert_eq!(sentence(&fd, "forall k:ZZ (k === 0 mod 2 \\/ k + 1 === 0 mod 2)"), TruthVal::True);
}

#[test]
fn characteristic_shows_in_sums() {
    // 1 + 1 + 1 = 0 only in F_3((t)); in Q_3 it has valuation one.
    let [qp, fpt] = fields(3);
    assert_eq!(sentence(&qp, "ord(1 + 1 + 1) = 1"), TruthVal::True);
    // Bare literals default to ZZ; the bound variable pins the sort to VF.
    assert_eq!(sentence(&fpt, "exists x:VF (x + 1 + 1 + 1 = x)"), TruthVal::True);
    assert_eq!(sentence(&qp, "exists x:VF (~(x + 1 + 1 + 1 = x))"), TruthVal::True);
    // Without a witness in the box an existential stays open.
    assert_eq!(sentence(&qp, "exists x:VF (x + 1 + 1 + 1 = x)"), TruthVal::Unknown);
    assert_eq!(sentence(&fpt, "1 + 1 + 1 = 0"), TruthVal::False);
}

#[test]
fn free_variables_use_the_assignment() {
    let fd = FieldDesc::fpt(7, 8).unwrap();
    let f = parse_formula("ord(x) = k /\\ ac(x) = 3").unwrap();
    let x = fd.from_digits(2, &[3, 1], true);
    let sb = SearchBox::default();
    let at = |k: i64| Assignment::new().with("x", Value::VF(x.clone())).with("k", Value::ZZ(k));
    assert_eq!(eval_formula(&fd, &sb, &at(2), &f).unwrap(), TruthVal::True);
    assert_eq!(eval_formula(&fd, &sb, &at(1), &f).unwrap(), TruthVal::False);
    assert!(eval_formula(&fd, &sb, &Assignment::new(), &f).is_err());
}

#[test]
fn enumeration_counts_square_classes_of_units() {
    let set = DefinableSet::new(parse_formula("ord(x) = 0 /\\ exists e:RF (e * e = ac(x))").unwrap()).unwrap();
    for p in [3, 5, 7] {
        for fd in fields(p) {
            for depth in 1..=2usize {
                let sb = SearchBox::new(-1, 2, depth, -12, 12).unwrap();
                let e = enumerate_set(&fd, &sb, &set, &Assignment::new(), DEFAULT_BUDGET).unwrap();
                // (p − 1)/2 square residues, p^{depth−1} lifts each.
                let want = (p as usize - 1) / 2 * (p as usize).pow(depth as u32 - 1);
                assert_eq!(e.true_tuples.len(), want, "p = {p}, depth = {depth}");
                assert!(e.unknown_tuples.is_empty());
            }
        }
    }
}

#[test]
fn enumeration_respects_the_budget() {
    let set = DefinableSet::new(parse_formula("ord(x) >= ord(y)").unwrap()).unwrap();
    let fd = FieldDesc::qp(5, 8).unwrap();
    assert!(enumerate_set(&fd, &SearchBox::default(), &set, &Assignment::new(), 100).is_err());
}
