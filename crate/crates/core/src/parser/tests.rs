use super::*;
use crate::rational::Rational;
use crate::syntax::{ArithOp, FuncKind, Sort, Symbol, Var};

fn vocab() -> Vocabulary {
    let text = "object pred Bird/1; object pred Fly/1; object pred fly/1; object pred bird/1;
                object pred P/1; object pred Q/1; object pred R/1;
                object pred Lawyer/1; object pred Engineer/1; object pred Politician/1;
                object pred Rare/1; object pred Animal/1; object pred Zoo/1; object pred Have/2;
                object pred X1/1; object pred X2/1; object pred X3/1; object pred X4/1;
                measure weight/1; object const Tweety; field const h;";
    parse_file(text, &Vocabulary::new()).unwrap().vocab
}

fn formula(s: &str) -> Formula {
    parse_formula(s, &vocab()).unwrap_or_else(|e| panic!("{s}: {e}")).node
}

fn canonical(s: &str) {
    let f = formula(s);
    assert_eq!(print_formula(&f), s, "not canonical");
    assert_eq!(formula(&print_formula(&f)), f);
}

#[test]
fn conditional_threshold() {
    let f = formula("[Fly(x) | Bird(x)]{x} > 0.9");
    let expected = Formula::Gt(
        Term::cond_prob(Formula::atom("Fly", "x"), Formula::atom("Bird", "x"), &["x"]),
        Term::Num(Rational::frac(9, 10)),
    );
    assert_eq!(f, expected);
    assert_eq!(print_formula(&f), "[Fly(x) | Bird(x)]{x} > 9/10");
}

#[test]
fn golden_sentences_are_canonical() {
    for s in [
        "[Lawyer(x) | Politician(x)]{x} > [Engineer(x) | Politician(x)]{x}",
        "forall y:field. [fly(x) | bird(x) & weight(x) < y]{x} > [fly(x) | bird(x) & weight(x) > y]{x}",
        "[P(x) & Q(x) | R(x)]{x} = [P(x) | R(x)]{x} * [Q(x) | R(x)]{x}",
        "[X1(x) & X2(x) & X3(x) & X4(x)]{x} = [X4(x) | X3(x) & X2(x)]{x} * [X3(x) | X1(x)]{x} * [X2(x) | X1(x)]{x} * [X1(x)]{x}",
        "[X1(x) & !X2(x) & X3(x) & !X4(x)]{x} = [!X4(x) | X3(x) & !X2(x)]{x} * [X3(x) | X1(x)]{x} * [!X2(x) | X1(x)]{x} * [X1(x)]{x}",
        "forall y, z. Rare(y) & !Rare(z) & Animal(y) & Animal(z) -> [Have(z, x) & Zoo(x)]{x} > [Have(y, x) & Zoo(x)]{x}",
        "[P(x) & (R(y) or !R(y))]{x, y} = [P(x)]{x}",
    ] {
        canonical(s);
    }
}

#[test]
fn weight_example_structure() {
    let f = formula(
        "forall y:field. [fly(x) | bird(x) & weight(x) < y]{x} >= [fly(x) | bird(x) & weight(x) > y]{x}",
    );
    let y = Term::Var(Var::field("y"));
    let w = Term::App { kind: FuncKind::Measure, name: "weight".into(), args: vec![Term::object_var("x")] };
    let side = |cmp: Formula| {
        Term::cond_prob(Formula::atom("fly", "x"), Formula::and(Formula::atom("bird", "x"), cmp), &["x"])
    };
    let expected = Formula::forall(
        Var::field("y"),
        Formula::Geq(side(Formula::Lt(w.clone(), y.clone())), side(Formula::Gt(w, y))),
    );
    assert_eq!(f, expected);
}

#[test]
fn independence_structure() {
    let f = formula("[P(x) & Q(x) | R(x)]{x} = [P(x)|R(x)]{x} * [Q(x)|R(x)]{x}");
    let c = |a: Formula| Term::cond_prob(a, Formula::atom("R", "x"), &["x"]);
    let expected = Formula::field_eq(
        c(Formula::and(Formula::atom("P", "x"), Formula::atom("Q", "x"))),
        Term::arith(ArithOp::Mul, c(Formula::atom("P", "x")), c(Formula::atom("Q", "x"))),
    );
    assert_eq!(f, expected);
}

#[test]
fn precedence_and_minimal_parentheses() {
    let v = vocab();
    let cases = [
        ("P(Tweety) | Q(Tweety) & R(Tweety)", "P(Tweety) | Q(Tweety) & R(Tweety)"),
        ("(P(Tweety) | Q(Tweety)) & R(Tweety)", "(P(Tweety) | Q(Tweety)) & R(Tweety)"),
        ("P(Tweety) -> Q(Tweety) -> R(Tweety)", "P(Tweety) -> Q(Tweety) -> R(Tweety)"),
        ("(P(Tweety) -> Q(Tweety)) -> R(Tweety)", "(P(Tweety) -> Q(Tweety)) -> R(Tweety)"),
        ("!(h >= 1)", "!h >= 1"),
        ("h - (1 - h) >= h * (h + 1)", "h - (1 - h) >= h * (h + 1)"),
        ("((h)) = 1 / 2", "h = 1 / 2"),
        ("h = 1/2", "h = 1/2"),
        ("h >= -3/4", "h >= -3/4"),
        ("(forall x. P(x)) & Q(Tweety)", "(forall x. P(x)) & Q(Tweety)"),
        ("Q(Tweety) & forall x. P(x)", "Q(Tweety) & forall x. P(x)"),
        ("h in [0, 1]", "h in [0, 1]"),
        ("exists x. P(x) | Q(x)", "exists x. P(x) | Q(x)"),
    ];
    for (input, want) in cases {
        let f = parse_formula(input, &v).unwrap_or_else(|e| panic!("{input}: {e}")).node;
        assert_eq!(print_formula(&f), want, "printing {input}");
        assert_eq!(parse_formula(want, &v).unwrap().node, f);
    }
}

#[test]
fn disjunction_inside_brackets_must_be_or() {
    let v = vocab();
    let f = parse_formula("[P(x) or Q(x)]{x} >= 0", &v).unwrap().node;
    assert_eq!(print_formula(&f), "[P(x) or Q(x)]{x} >= 0");
    let err = parse_formula("[(P(x) | Q(x))]{x} >= 0", &v).unwrap_err();
    assert!(matches!(err, ParseError::Syntax { .. }), "{err}");
}

#[test]
fn terms_parse_as_items() {
    let t = parse_term("[Fly(x) | Bird(x)]{x}", &vocab()).unwrap().node;
    assert!(matches!(t, Term::CondProb { .. }));
    assert!(parse_term("Bird(Tweety)", &vocab()).is_err());
}

#[test]
fn header_declarations_in_text() {
    let p = parse_formula("object pred Cat/1; object const tom; Cat(tom)", &Vocabulary::new()).unwrap();
    assert_eq!(p.node, Formula::pred("Cat", vec![Term::ObjectConst("tom".into())]));
}

#[test]
fn sort_error_carries_span_of_offending_node() {
    let text = "forall y:field. Bird(y)";
    let err = parse_formula(text, &vocab()).unwrap_err();
    match &err {
        ParseError::Sort { error: crate::syntax::SortError::SortMismatch { .. }, span } => {
            assert_eq!(&text[span.start..span.end], "y");
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn duplicate_binder_reported() {
    let err = parse_term("[Fly(x)]{x, x}", &vocab()).unwrap_err();
    assert!(matches!(
        err,
        ParseError::Sort { error: crate::syntax::SortError::DuplicateBoundVariable { .. }, .. }
    ));
}

#[test]
fn unknown_symbol_has_span() {
    let text = "Penguin(Tweety)";
    let err = parse_formula(text, &vocab()).unwrap_err();
    assert!(err.span().end <= text.len());
}

#[test]
fn errors_stay_inside_input() {
    let v = vocab();
    for bad in ["", "[", "[P(x)]", "[P(x)]{", "P(x", "forall . P(x)", "h >=", "1 +", "P(Tweety) &", "h $ 1", "[P(x)]{x} >= 1 1"] {
        let err = parse(bad, &v).unwrap_err();
        let s = err.span();
        assert!(s.start <= s.end && s.end <= bad.len(), "{bad:?}: {err} {s:?}");
    }
}

#[test]
fn field_binder_annotation_conflicts_with_declaration() {
    let v = Vocabulary::new().object_pred("P", 1).with("z", Symbol::Variable(Sort::Field));
    assert!(parse_formula("forall z:object. P(z)", &v).is_err());
    assert!(parse_formula("forall z. z >= 0", &v).is_ok());
}

#[test]
fn file_with_several_items() {
    let f = parse_file("object pred P/1;\n[P(x)]{x} = 0.6;\n[P(x)]{x};\n", &Vocabulary::new()).unwrap();
    assert_eq!(f.items.len(), 2);
    assert!(matches!(f.items[1].node, Ast::Term(_)));
}
