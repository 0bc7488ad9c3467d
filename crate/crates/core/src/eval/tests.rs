use super::*;
use crate::model::{generate_random, GenParams, StructureBuilder, WeightStyle};
use crate::parser::{parse_file, parse_formula, parse_term};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn vocab(decls: &str) -> Vocabulary {
    parse_file(decls, &Vocabulary::new()).unwrap().vocab
}

fn truth(m: &LpStructure, v: &Vocabulary, s: &str) -> Result<bool, EvalError> {
    eval_formula(m, v, &Assignment::new(), &parse_formula(s, v).unwrap().node)
}

fn value(m: &LpStructure, v: &Vocabulary, s: &str) -> Result<Rational, EvalError> {
    Evaluator::new(m, v).field(&Assignment::new(), &parse_term(s, v).unwrap().node)
}

fn birds() -> (Vocabulary, LpStructure) {
    let v = vocab("object pred Bird/1; object pred Fly/1; object const Tweety; measure weight/1;");
    let names: Vec<String> = (0..10).map(|i| format!("b{i}")).collect();
    let mut b = StructureBuilder::new(&names);
    for (i, n) in names.iter().enumerate() {
        if i < 6 {
            b.fact("Bird", &[n]);
        }
        if i < 5 || i == 8 {
            b.fact("Fly", &[n]);
        }
        b.measuring("weight", &[n], Rational::from_integer(i as i64 % 4));
    }
    b.object_constant("Tweety", "b0");
    (v.clone(), b.build(&v).unwrap())
}

#[test]
fn ground_atom() {
    let (v, m) = birds();
    assert!(truth(&m, &v, "Bird(Tweety)").unwrap());
    assert!(!truth(&m, &v, "!Bird(Tweety)").unwrap());
}

#[test]
fn counting_birds() {
    let (v, m) = birds();
    assert_eq!(value(&m, &v, "[Bird(x)]{x}").unwrap(), Rational::frac(3, 5));
    // 5 of the 6 birds fly.
    assert_eq!(value(&m, &v, "[Fly(x) | Bird(x)]{x}").unwrap(), Rational::frac(5, 6));
}

#[test]
fn contradiction_is_false() {
    let (v, m) = generate_random(2, &GenParams::new(4, vec![1, 2], WeightStyle::Random).with_extras());
    let g = crate::gen::SemanticGen::from_vocab(&v, &[]);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let f = g.sentence(&mut rng, 3);
        let contra = Formula::and(f.clone(), Formula::not(f));
        assert!(!eval_formula(&m, &v, &Assignment::new(), &contra).unwrap());
    }
}

#[test]
fn independence_sentence_matches_counts() {
    let v = vocab("object pred P/1; object pred Q/1; object pred R/1;");
    let sentence = "[P(x) & Q(x) | R(x)]{x} = [P(x) | R(x)]{x} * [Q(x) | R(x)]{x}";
    // Counting oracle over a uniform domain: compare |PQR|*|R| with |PR|*|QR|.
    for mask in 0u32..(1 << 12) {
        let names = ["a", "b", "c", "d"];
        let mut b = StructureBuilder::new(names);
        let (mut r, mut pr, mut qr, mut pqr) = (0, 0, 0, 0);
        for (i, n) in names.iter().enumerate() {
            let bits = mask >> (3 * i);
            let (p, q, rr) = (bits & 1 == 1, bits & 2 == 2, bits & 4 == 4);
            b.predicate("P").predicate("Q").predicate("R");
            if p {
                b.fact("P", &[n]);
            }
            if q {
                b.fact("Q", &[n]);
            }
            if rr {
                b.fact("R", &[n]);
                r += 1;
                pr += p as i32;
                qr += q as i32;
                pqr += (p && q) as i32;
            }
        }
        let m = b.build(&v).unwrap();
        let got = truth(&m, &v, sentence);
        if r == 0 {
            assert!(matches!(got, Err(EvalError::DivisionByZero { .. })));
        } else {
            assert_eq!(got.unwrap(), pqr * r == pr * qr, "mask {mask:b}");
        }
    }
}

#[test]
fn tautology_and_permutation() {
    for seed in 0..20 {
        let (_, m) = generate_random(
            seed,
            &GenParams { predicate_arities: vec![1, 1, 2], ..GenParams::new(4, vec![], WeightStyle::Random) },
        );
        let v2 = vocab("object pred P0/1; object pred P1/1; object pred P2/2;");
        assert!(truth(&m, &v2, "[P0(x) & (P1(y) or !P1(y))]{x, y} = [P0(x)]{x}").unwrap());
        assert!(truth(&m, &v2, "[P2(x, y) & P0(y)]{x, y} = [P2(x, y) & P0(y)]{y, x}").unwrap());
    }
}

#[test]
fn closed_formula_measure_is_zero_or_one() {
    let (v, m) = birds();
    assert_eq!(value(&m, &v, "[forall x. Bird(x)]{y}").unwrap(), Rational::zero());
    assert_eq!(value(&m, &v, "[exists x. Bird(x)]{y}").unwrap(), Rational::one());
}

#[test]
fn conditioning_on_empty_set_errors() {
    let (v, m) = birds();
    let err = value(&m, &v, "[Fly(x) | Bird(x) & !Bird(x)]{x}").unwrap_err();
    assert!(matches!(err, EvalError::DivisionByZero { .. }));
    assert!(matches!(truth(&m, &v, "1 / 0 = 1"), Err(EvalError::DivisionByZero { .. })));
    // A false left conjunct guards the undefined right one.
    assert!(!truth(&m, &v, "[Bird(x) & !Bird(x)]{x} > 0 & [Fly(x) | Bird(x) & !Bird(x)]{x} > 0").unwrap());
}

#[test]
fn weight_sentence_decided_over_field() {
    let (v, m) = birds();
    // Heavier birds are never more likely to fly here, except where one side is undefined.
    let guarded = "forall y:field. [bird(x) & weight(x) < y]{x} > 0 & [bird(x) & weight(x) > y]{x} > 0 \
                   -> [fly(x) | bird(x) & weight(x) < y]{x} >= [fly(x) | bird(x) & weight(x) > y]{x}"
        .replace("bird", "Bird")
        .replace("fly", "Fly");
    // Birds b0..b5 have weights 0,1,2,3,0,1; b5 is the only non-flyer (weight 1).
    assert!(!truth(&m, &v, &guarded).unwrap());
    let unguarded = "forall y:field. [Fly(x) | Bird(x) & weight(x) < y]{x} >= [Fly(x) | Bird(x) & weight(x) > y]{x}";
    assert!(matches!(truth(&m, &v, unguarded), Err(EvalError::DivisionByZero { .. })));
}

#[test]
fn field_quantifier_test_points() {
    let (v, m) = birds();
    assert!(truth(&m, &v, "exists y:field. forall x. weight(x) < y").unwrap());
    assert!(!truth(&m, &v, "forall y:field. exists x. weight(x) < y").unwrap());
    assert!(truth(&m, &v, "exists y:field. [weight(x) < y]{x} = 3/10").unwrap());
    assert!(!truth(&m, &v, "exists y:field. [weight(x) < y]{x} = 1/2").unwrap());
    assert!(truth(&m, &v, "exists y:field. y > 1 & y < 2").unwrap());
    assert!(!truth(&m, &v, "exists y:field. y > 1 & y < 1").unwrap());
    assert!(truth(&m, &v, "forall y:field. y in [0, 1] | y < 0 | y > 1").unwrap());
    assert!(truth(&m, &v, "forall y:field. y = y").unwrap());
}

#[test]
fn field_quantifier_refuses_arithmetic() {
    let (v, m) = birds();
    for s in ["forall y:field. y + 1 > y", "exists y:field. y * y = 2", "forall y:field. y >= [weight(x) < y]{x}"] {
        assert!(matches!(truth(&m, &v, s), Err(EvalError::FieldQuantifierUnsupported { .. })), "{s}");
    }
}

#[test]
fn nested_probability_terms() {
    let (v, m) = birds();
    // Individuals whose weight is at least that of half the domain.
    let t = value(&m, &v, "[[weight(y) <= weight(x)]{y} >= 1/2]{x}").unwrap();
    // Weights: 0,1,2,3,0,1,2,3,0,1 -> fraction <= w: w=0: 3/10, 1: 6/10, 2: 8/10, 3: 1.
    assert_eq!(t, Rational::frac(7, 10));
}

#[test]
fn free_variables_from_assignment() {
    let (v, m) = birds();
    let v = {
        let mut v = v;
        v.declare("z", Symbol::Variable(Sort::Object)).unwrap();
        v
    };
    let f = parse_formula("Bird(z)", &v).unwrap().node;
    assert!(eval_formula(&m, &v, &Assignment::new().with_object("z", 2), &f).unwrap());
    assert!(!eval_formula(&m, &v, &Assignment::new().with_object("z", 7), &f).unwrap());
    assert_eq!(eval_formula(&m, &v, &Assignment::new(), &f), Err(EvalError::UnboundVariable("z".into())));
}

#[test]
fn enumeration_cap() {
    let (v, m) = birds();
    let t = parse_term("[Bird(x)]{x, y, z}", &v).unwrap().node;
    let ev = Evaluator::new(&m, &v).with_options(EvalOptions { max_enum: 999, ..Default::default() });
    assert!(matches!(ev.field(&Assignment::new(), &t), Err(EvalError::EnumerationCapExceeded { .. })));
    let ev = ev.with_options(EvalOptions { max_enum: 1000, ..Default::default() });
    assert_eq!(ev.field(&Assignment::new(), &t).unwrap(), Rational::frac(3, 5));
}

#[test]
fn sequential_and_parallel_agree() {
    let (v, m) = generate_random(11, &GenParams::new(6, vec![1, 2, 3], WeightStyle::Random).with_extras());
    let t = parse_term("[P2(x, y, z) & P0(x) or P1(z, u)]{x, y, z, u}", &{
        let mut v = v.clone();
        v.declare("u", Symbol::Variable(Sort::Object)).unwrap();
        v
    });
    let t = t.unwrap().node;
    let seq = Evaluator::new(&m, &v).with_options(EvalOptions { parallelism: Parallelism::Sequential, ..Default::default() });
    let par = Evaluator::new(&m, &v).with_options(EvalOptions { parallelism: Parallelism::Parallel, ..Default::default() });
    let sigma = Assignment::new();
    assert_eq!(seq.field(&sigma, &t).unwrap(), par.field(&sigma, &t).unwrap());

    let bad = parse_term("[1 / w(x) >= 0]{x, y, z, u}", &{
        let mut v = v.clone();
        v.declare("u", Symbol::Variable(Sort::Object)).unwrap();
        v
    })
    .unwrap()
    .node;
    let a = seq.field(&sigma, &bad);
    let b = par.field(&sigma, &bad);
    assert_eq!(a, b);
}

#[test]
fn desugared_forms_agree() {
    let (v, m) = generate_random(8, &GenParams::new(4, vec![1, 2], WeightStyle::Random).with_extras());
    let g = crate::gen::SemanticGen::from_vocab(&v, &[]);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let f = g.sentence(&mut rng, 3);
        let a = eval_formula(&m, &v, &Assignment::new(), &f).unwrap();
        let b = eval_formula(&m, &v, &Assignment::new(), &f.desugar()).unwrap();
        assert_eq!(a, b, "{}", crate::parser::print_formula(&f));
    }
}
