use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{LpStructure, StructureBuilder};
use crate::rational::Rational;
use crate::syntax::{Sort, Symbol, Vocabulary};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightStyle {
    Uniform,
    /// Integer weights in `0..=4`, normalized; zero weights are allowed.
    Random,
}

/// Shape of a generated structure. Predicates are named `P0`, `P1`, ...
/// in the order of `predicate_arities`; the object constant is `c`, the
/// unary object function `f`, the unary measuring function `w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenParams {
    pub domain_size: usize,
    pub predicate_arities: Vec<usize>,
    pub weight_style: WeightStyle,
    pub with_constant: bool,
    pub with_function: bool,
    pub with_measuring: bool,
}

impl GenParams {
    pub fn new(domain_size: usize, predicate_arities: Vec<usize>, weight_style: WeightStyle) -> Self {
        GenParams {
            domain_size,
            predicate_arities,
            weight_style,
            with_constant: false,
            with_function: false,
            with_measuring: false,
        }
    }

    pub fn with_extras(mut self) -> Self {
        self.with_constant = true;
        self.with_function = true;
        self.with_measuring = true;
        self
    }
}

pub fn generate_random(seed: u64, params: &GenParams) -> (Vocabulary, LpStructure) {
    assert!(params.domain_size >= 1, "domain must be nonempty");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.domain_size;
    let names: Vec<String> = (0..n).map(|i| format!("o{i}")).collect();

    let mut vocab = Vocabulary::new();
    for (i, &arity) in params.predicate_arities.iter().enumerate() {
        vocab = vocab.object_pred(&format!("P{i}"), arity);
    }
    if params.with_constant {
        vocab = vocab.object_const("c");
    }
    if params.with_function {
        vocab = vocab.with("f", Symbol::Function { sort: Sort::Object, arity: 1 });
    }
    if params.with_measuring {
        vocab = vocab.with("w", Symbol::Measure { arity: 1 });
    }

    let mut b = StructureBuilder::new(&names);
    if params.weight_style == WeightStyle::Random {
        let mut raw: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=4)).collect();
        if raw.iter().all(|&w| w == 0) {
            raw[rng.gen_range(0..n)] = 1;
        }
        let total: i64 = raw.iter().sum();
        for (name, w) in names.iter().zip(raw) {
            b.weight(name, Rational::frac(w, total));
        }
    }
    for (i, &arity) in params.predicate_arities.iter().enumerate() {
        let pred = format!("P{i}");
        b.predicate(&pred);
        let count = n.pow(arity as u32);
        for k in 0..count {
            if rng.gen_bool(0.5) {
                let mut t = Vec::with_capacity(arity);
                let mut rest = k;
                for _ in 0..arity {
                    t.push(names[rest % n].clone());
                    rest /= n;
                }
                t.reverse();
                b.fact(&pred, &t);
            }
        }
    }
    if params.with_constant {
        b.object_constant("c", &names[rng.gen_range(0..n)]);
    }
    if params.with_function {
        for name in &names {
            b.function("f", &[name], &names[rng.gen_range(0..n)]);
        }
    }
    if params.with_measuring {
        for name in &names {
            b.measuring("w", &[name], Rational::from_integer(rng.gen_range(0..=3)));
        }
    }
    let model = b.build(&vocab).expect("generated structures are valid");
    (vocab, model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{parse_model, render_model};

    #[test]
    fn deterministic_in_seed() {
        let p = GenParams::new(5, vec![1, 2], WeightStyle::Random).with_extras();
        assert_eq!(generate_random(7, &p), generate_random(7, &p));
        let differ = (0..10).any(|s| generate_random(s, &p).1 != generate_random(7, &p).1);
        assert!(differ);
    }

    #[test]
    fn uniform_style() {
        let (_, m) = generate_random(1, &GenParams::new(4, vec![1], WeightStyle::Uniform));
        assert!(m.weights().iter().all(|w| *w == Rational::frac(1, 4)));
    }

    #[test]
    fn random_weights_normalized_and_round_trip() {
        for seed in 0..50 {
            let p = GenParams::new(1 + (seed as usize % 6), vec![1, 1, 2, 0], WeightStyle::Random).with_extras();
            let (v, m) = generate_random(seed, &p);
            let sum: Rational = m.weights().iter().sum();
            assert!(sum.is_one());
            let (v2, m2) = parse_model(&render_model(&v, &m)).unwrap();
            assert_eq!((v, m), (v2, m2));
        }
    }
}
