use lp_logic::gen::{syntax_vocab, SyntaxGen};
use lp_logic::parser::{parse_file, parse_formula, parse_term, print_formula, print_term};
use lp_logic::syntax::Vocabulary;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const EXAMPLES: &str = include_str!("../../../paper-examples/sentences.lp");

#[test]
fn example_sentences_print_canonically() {
    let file = parse_file(EXAMPLES, &Vocabulary::new()).unwrap();
    let sentences: Vec<_> = file.formulas().collect();
    assert_eq!(sentences.len(), 6);
    for f in sentences {
        let text = print_formula(f);
        let again = parse_formula(&text, &file.vocab).unwrap().node;
        assert_eq!(&again, f, "{text}");
        assert_eq!(print_formula(&again), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn generated_sentences_round_trip(seed in any::<u64>(), depth in 0usize..5) {
        let vocab = syntax_vocab();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = SyntaxGen::new().sentence(&mut rng, depth);
        let text = print_formula(&f);
        let back = parse_formula(&text, &vocab);
        prop_assert!(back.is_ok(), "{text}: {:?}", back.err());
        let back = back.unwrap().node;
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(print_formula(&back), text);
    }

    #[test]
    fn generated_terms_round_trip(seed in any::<u64>(), depth in 0usize..5) {
        let vocab = syntax_vocab();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = SyntaxGen::new().term(&mut rng, depth);
        let text = print_term(&t);
        let back = parse_term(&text, &vocab);
        prop_assert!(back.is_ok(), "{text}: {:?}", back.err());
        let back = back.unwrap().node;
        prop_assert_eq!(&back, &t);
        prop_assert_eq!(print_term(&back), text);
    }
}
