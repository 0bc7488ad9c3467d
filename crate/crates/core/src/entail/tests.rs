use super::*;
use crate::parser::{parse_file, parse_formula, parse_term};
use crate::syntax::Vocabulary;

fn vocab() -> Vocabulary {
    parse_file(
        "object pred P/1; object pred Q/1; object pred R/1; object pred Fly/1; object pred Bird/1; \
         object pred Penguin/1; measure weight/1; object const c;",
        &Vocabulary::new(),
    )
    .unwrap()
    .vocab
}

fn entail(base: &[&str], query: &str) -> Result<Entailment, EntailError> {
    let v = vocab();
    let sentences: Vec<Formula> = base.iter().map(|s| parse_formula(s, &v).unwrap().node).collect();
    entail_lp_sentences(&sentences, &parse_term(query, &v).unwrap().node)
}

fn interval(base: &[&str], query: &str) -> Interval {
    match entail(base, query).unwrap() {
        Entailment::Bounds(i) => i,
        other => panic!("{other:?}"),
    }
}

fn r(s: &str) -> Rational {
    s.parse().unwrap()
}

#[test]
fn modus_ponens_bounds() {
    let i = interval(&["[P(x)]{x} = 0.6", "[P(x) -> Q(x)]{x} = 0.8"], "[Q(x)]{x}");
    assert_eq!(i, Interval::closed(r("2/5"), r("4/5")));
    assert_eq!(i.to_string(), "[2/5, 4/5]");
}

#[test]
fn conjunction_bounds_both_conjuncts() {
    for q in ["[P(x)]{x}", "[Q(x)]{x}"] {
        let i = interval(&["[P(x) & Q(x)]{x} = 1/2"], q);
        assert_eq!(i, Interval::closed(r("1/2"), r("1")));
    }
}

#[test]
fn trivial_cases() {
    assert_eq!(interval(&["[P(x)]{x} = 1"], "[P(x)]{x}"), Interval::closed(r("1"), r("1")));
    assert_eq!(entail(&["[P(x)]{x} = 3/5", "[!P(x)]{x} = 3/5"], "[P(x)]{x}").unwrap(), Entailment::Infeasible);
    assert_eq!(interval(&[], "[P(x)]{x}"), Interval::closed(r("0"), r("1")));
}

#[test]
fn build_lp_rows() {
    let v = vocab();
    let sentences = [
        parse_formula("[P(x)]{x} = 3/5", &v).unwrap().node,
        parse_formula("[P(x) -> Q(x)]{x} = 4/5", &v).unwrap().node,
    ];
    let p = problem_from_sentences(&sentences, &parse_term("[Q(x)]{x}", &v).unwrap().node).unwrap();
    let lp = build_lp(&p).unwrap();
    assert_eq!(lp.atoms, ["P", "Q"]);
    assert_eq!(lp.worlds(), 4);
    assert_eq!(lp.rows.len(), 3);
    let ones = |row: &LpRow| -> Vec<String> {
        (0..4).filter(|&w| row.coeffs.get(w).is_one()).map(|w| lp.world_label(w)).collect()
    };
    assert_eq!(ones(&lp.rows[0]).len(), 4);
    assert_eq!(ones(&lp.rows[1]), ["P & !Q", "P & Q"]);
    assert_eq!(lp.rows[1].rhs, r("3/5"));
    assert_eq!(ones(&lp.rows[2]), ["!P & !Q", "!P & Q", "P & Q"]);
    assert_eq!(lp.rows[2].rhs, r("4/5"));
    assert_eq!(lp.objective, [false, false, true, true]);
}

#[test]
fn empty_base_has_only_normalization() {
    let v = vocab();
    let p = problem_from_sentences(&[], &parse_term("[P(x)]{x}", &v).unwrap().node).unwrap();
    let lp = build_lp(&p).unwrap();
    assert_eq!(lp.rows.len(), 1);
    assert_eq!(lp.rows[0].source, RowSource::Normalization);
    assert_eq!(lp.objective, [false, true]);
}

#[test]
fn strict_conditional_gives_open_endpoint() {
    let i = interval(&["[Fly(x) | Bird(x)]{x} > 0.9"], "[Fly(y) | Bird(y)]{y}");
    assert_eq!(i.lo, r("9/10"));
    assert_eq!(i.hi, r("1"));
    assert!(i.lo_open && !i.hi_open);
    assert_eq!(i.to_string(), "(9/10, 1]");
}

#[test]
fn subclass_is_unconstrained() {
    let i = interval(&["[Fly(x) | Bird(x)]{x} > 0.9"], "[Fly(x) | Bird(x) & Penguin(x)]{x}");
    assert_eq!((i.lo.clone(), i.hi.clone()), (r("0"), r("1")));
}

#[test]
fn strict_and_undefined_cases() {
    assert_eq!(entail(&["[P(x)]{x} > 1"], "[P(x)]{x}").unwrap(), Entailment::Infeasible);
    assert_eq!(entail(&["[P(x)]{x} < 0"], "[P(x)]{x}").unwrap(), Entailment::Infeasible);
    assert_eq!(entail(&["[P(x)]{x} = 0"], "[Q(x) | P(x)]{x}").unwrap(), Entailment::QueryUndefined);
    let i = interval(&["[P(x)]{x} < 1/2"], "[P(x)]{x}");
    assert_eq!(i.to_string(), "[0, 1/2)");
    let i = interval(&["[P(x)]{x} in [1/4, 1/2]", "[Q(x)]{x} >= 1/2"], "[P(x) & Q(x)]{x}");
    assert_eq!(i, Interval::closed(r("0"), r("1/2")));
}

#[test]
fn conditional_query_bounds() {
    // [Q|P] with [P] = 1/2 and [Q] = 1/4: at most all of Q inside P.
    let i = interval(&["[P(x)]{x} = 1/2", "[Q(x)]{x} = 1/4"], "[Q(x) | P(x)]{x}");
    assert_eq!(i, Interval::closed(r("0"), r("1/2")));
    let i = interval(&["[Q(x) | P(x)]{x} = 1/3", "[P(x)]{x} >= 3/4"], "[P(x) & Q(x)]{x}");
    assert_eq!(i, Interval::closed(r("1/4"), r("1/3")));
}

#[test]
fn fragment_violations() {
    let cases = [
        ("[weight(x) > 1]{x} = 1/2", "[P(x)]{x}"),
        ("[P(c)]{x} = 1/2", "[P(x)]{x}"),
        ("[P(x) & Q(y)]{x, y} = 1/2", "[P(x)]{x}"),
        ("[forall y. P(y)]{x} = 1/2", "[P(x)]{x}"),
        ("[P(x)]{x} = [Q(x)]{x}", "[P(x)]{x}"),
        ("P(c)", "[P(x)]{x}"),
        ("[P(x)]{x} = 1/2", "[P(x)]{x} + 1"),
    ];
    for (s, q) in cases {
        assert!(matches!(entail(&[s], q), Err(EntailError::OutsideFragment { .. })), "{s}");
    }
}

#[test]
fn literal_on_left_is_flipped() {
    let i = interval(&["0.3 >= [P(x)]{x}"], "[P(x)]{x}");
    assert_eq!(i, Interval::closed(r("0"), r("3/10")));
}

#[test]
fn too_many_atoms() {
    let atoms: Vec<String> = (0..21).map(|i| format!("A{i}")).collect();
    let p = EntailmentProblem {
        atoms: atoms.clone(),
        base: vec![],
        query: Formula::atom("A0", "x"),
        query_given: None,
    };
    assert_eq!(build_lp(&p), Err(EntailError::TooManyAtoms { count: 21 }));
}

#[test]
fn many_atoms_merge_columns() {
    let atoms: Vec<String> = (0..12).map(|i| format!("A{i}")).collect();
    let chain = (1..12).fold(Formula::atom("A0", "x"), |f, i| Formula::and(f, Formula::atom(&format!("A{i}"), "x")));
    let p = EntailmentProblem {
        atoms,
        base: vec![Statement { body: chain, given: None, constraint: Constraint::Eq(r("1/3")) }],
        query: Formula::atom("A5", "x"),
        query_given: None,
    };
    assert_eq!(bounds(&p).unwrap(), Entailment::Bounds(Interval::closed(r("1/3"), r("1"))));
}
