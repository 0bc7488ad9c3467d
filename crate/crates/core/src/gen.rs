//! Random formulas for property checks.
//!
//! [`SemanticGen`] builds formulas that always evaluate without error on
//! structures from [`crate::model::generate_random`]. [`SyntaxGen`] builds
//! closed sentences using every construct of the concrete syntax, for
//! print/parse round-trips.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::rational::Rational;
use crate::syntax::{ArithOp, FuncKind, Formula, Sort, Symbol, Term, Var, Vocabulary};

const BOUND_POOL: [&str; 3] = ["u", "v", "s"];

/// Formulas over the object symbols of a vocabulary with free variables
/// drawn from a fixed list.
#[derive(Clone, Debug)]
pub struct SemanticGen {
    preds: Vec<(String, usize)>,
    constants: Vec<String>,
    functions: Vec<String>,
    measures: Vec<String>,
    free: Vec<String>,
}

fn small_fraction<R: Rng>(rng: &mut R) -> Rational {
    let choices = [(0, 1), (1, 4), (1, 3), (1, 2), (2, 3), (3, 4), (1, 1)];
    let (p, q) = choices[rng.gen_range(0..choices.len())];
    Rational::frac(p, q)
}

impl SemanticGen {
    /// Uses object predicates, object constants, unary object functions and
    /// unary measuring functions of `vocab`.
    pub fn from_vocab(vocab: &Vocabulary, free: &[&str]) -> Self {
        let mut g = SemanticGen {
            preds: Vec::new(),
            constants: Vec::new(),
            functions: Vec::new(),
            measures: Vec::new(),
            free: free.iter().map(|s| s.to_string()).collect(),
        };
        for (name, sym) in vocab.iter() {
            match sym {
                Symbol::Predicate { sort: Sort::Object, arity } => g.preds.push((name.to_string(), *arity)),
                Symbol::Constant(Sort::Object) => g.constants.push(name.to_string()),
                Symbol::Function { sort: Sort::Object, arity: 1 } => g.functions.push(name.to_string()),
                Symbol::Measure { arity: 1 } => g.measures.push(name.to_string()),
                _ => {}
            }
        }
        assert!(!g.preds.is_empty(), "vocabulary needs an object predicate");
        g
    }

    pub fn free_vars(&self) -> &[String] {
        &self.free
    }

    /// A formula whose free variables are among the generator's list.
    pub fn formula<R: Rng>(&self, rng: &mut R, depth: usize) -> Formula {
        let mut scope = self.free.clone();
        self.formula_in(rng, depth, &mut scope)
    }

    /// A sentence: `formula` closed by random quantifiers over its free variables.
    pub fn sentence<R: Rng>(&self, rng: &mut R, depth: usize) -> Formula {
        let mut f = self.formula(rng, depth);
        for v in f.free_vars().into_iter().rev() {
            f = if rng.gen_bool(0.5) { Formula::forall(v, f) } else { Formula::exists(v, f) };
        }
        f
    }

    fn object_term<R: Rng>(&self, rng: &mut R, scope: &[String]) -> Term {
        let roll = rng.gen_range(0..10);
        if roll == 0 && !self.constants.is_empty() {
            Term::ObjectConst(self.constants.choose(rng).unwrap().clone())
        } else if roll == 1 && !self.functions.is_empty() && !scope.is_empty() {
            Term::App {
                kind: FuncKind::Object,
                name: self.functions.choose(rng).unwrap().clone(),
                args: vec![Term::object_var(scope.choose(rng).unwrap())],
            }
        } else if let Some(v) = scope.choose(rng) {
            Term::object_var(v)
        } else if let Some(c) = self.constants.first() {
            Term::ObjectConst(c.clone())
        } else {
            unreachable!("no object terms available")
        }
    }

    fn atom<R: Rng>(&self, rng: &mut R, scope: &[String]) -> Formula {
        let (name, arity) = self.preds.choose(rng).unwrap();
        let args = (0..*arity).map(|_| self.object_term(rng, scope)).collect();
        Formula::pred(name, args)
    }

    fn fresh(scope: &[String]) -> String {
        for stem in BOUND_POOL {
            for i in 0.. {
                let name = if i == 0 { stem.to_string() } else { format!("{stem}{i}") };
                if !scope.contains(&name) {
                    return name;
                }
                if i > 8 {
                    break;
                }
            }
        }
        unreachable!("scope exhausted")
    }

    fn formula_in<R: Rng>(&self, rng: &mut R, depth: usize, scope: &mut Vec<String>) -> Formula {
        let can_atom = !scope.is_empty() || !self.constants.is_empty();
        if depth == 0 || (can_atom && rng.gen_range(0..4) == 0) {
            return self.leaf(rng, depth, scope);
        }
        match rng.gen_range(0..10) {
            0 | 1 => Formula::not(self.formula_in(rng, depth - 1, scope)),
            2 | 3 => Formula::and(self.formula_in(rng, depth - 1, scope), self.formula_in(rng, depth - 1, scope)),
            4 | 5 => Formula::or(self.formula_in(rng, depth - 1, scope), self.formula_in(rng, depth - 1, scope)),
            6 => Formula::implies(self.formula_in(rng, depth - 1, scope), self.formula_in(rng, depth - 1, scope)),
            7 | 8 => {
                let v = Self::fresh(scope);
                scope.push(v.clone());
                let body = self.formula_in(rng, depth - 1, scope);
                scope.pop();
                if rng.gen_bool(0.5) {
                    Formula::forall(Var::object(v), body)
                } else {
                    Formula::exists(Var::object(v), body)
                }
            }
            _ => self.probability_comparison(rng, depth - 1, scope),
        }
    }

    fn leaf<R: Rng>(&self, rng: &mut R, depth: usize, scope: &mut Vec<String>) -> Formula {
        if scope.is_empty() && self.constants.is_empty() {
            return self.probability_comparison(rng, depth.saturating_sub(1), scope);
        }
        match rng.gen_range(0..12) {
            0 => Formula::Eq {
                sort: Sort::Object,
                lhs: self.object_term(rng, scope),
                rhs: self.object_term(rng, scope),
            },
            1 if !self.measures.is_empty() => {
                let m = Term::App {
                    kind: FuncKind::Measure,
                    name: self.measures.choose(rng).unwrap().clone(),
                    args: vec![self.object_term(rng, scope)],
                };
                let k = Term::Num(Rational::from_integer(rng.gen_range(0..=3)));
                if rng.gen_bool(0.5) {
                    Formula::Geq(m, k)
                } else {
                    Formula::Lt(m, k)
                }
            }
            2 if !self.measures.is_empty() && !scope.is_empty() => self.field_quantified(rng, scope),
            _ => self.atom(rng, scope),
        }
    }

    fn probability_comparison<R: Rng>(&self, rng: &mut R, depth: usize, scope: &mut Vec<String>) -> Formula {
        let v = Self::fresh(scope);
        scope.push(v.clone());
        let body = self.formula_in(rng, depth.min(1), scope);
        scope.pop();
        let p = Term::prob(body, &[&v]);
        let q = Term::Num(small_fraction(rng));
        match rng.gen_range(0..3) {
            0 => Formula::Geq(p, q),
            1 => Formula::Gt(p, q),
            _ => Formula::field_eq(p, q),
        }
    }

    /// `Q r:field. c1 * c2` where each `ci` compares `r` directly against a
    /// measuring value, possibly under a probability term.
    fn field_quantified<R: Rng>(&self, rng: &mut R, scope: &mut Vec<String>) -> Formula {
        let r = Term::Var(Var::field("r"));
        let measure = |rng: &mut R, arg: Term| Term::App {
            kind: FuncKind::Measure,
            name: self.measures.choose(rng).unwrap().clone(),
            args: vec![arg],
        };
        let part = |rng: &mut R, scope: &mut Vec<String>| -> Formula {
            if rng.gen_bool(0.5) {
                let arg = self.object_term(rng, scope);
                let m = measure(rng, arg);
                if rng.gen_bool(0.5) {
                    Formula::Lt(m, r.clone())
                } else {
                    Formula::Geq(m, r.clone())
                }
            } else {
                let v = Self::fresh(scope);
                scope.push(v.clone());
                let cmp = Formula::Lt(measure(rng, Term::object_var(&v)), r.clone());
                let body = Formula::and(self.atom(rng, scope), cmp);
                scope.pop();
                Formula::Geq(Term::prob(body, &[&v]), Term::Num(small_fraction(rng)))
            }
        };
        let a = part(rng, scope);
        let b = part(rng, scope);
        let body = if rng.gen_bool(0.5) { Formula::or(a, b) } else { Formula::and(a, Formula::not(b)) };
        if rng.gen_bool(0.5) {
            Formula::forall(Var::field("r"), body)
        } else {
            Formula::exists(Var::field("r"), body)
        }
    }
}

/// Vocabulary used by [`SyntaxGen`].
pub fn syntax_vocab() -> Vocabulary {
    Vocabulary::new()
        .object_pred("A", 1)
        .object_pred("B", 2)
        .object_pred("C", 0)
        .object_const("a")
        .with("g", Symbol::Function { sort: Sort::Object, arity: 1 })
        .with("m", Symbol::Measure { arity: 1 })
        .with("k", Symbol::Constant(Sort::Field))
        .with("h", Symbol::Function { sort: Sort::Field, arity: 2 })
        .with("Le", Symbol::Predicate { sort: Sort::Field, arity: 2 })
}

/// Closed sentences over [`syntax_vocab`] exercising every construct.
#[derive(Debug, Default)]
pub struct SyntaxGen {
    counter: usize,
    objects: Vec<String>,
    fields: Vec<String>,
}

impl SyntaxGen {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn sentence<R: Rng>(&mut self, rng: &mut R, depth: usize) -> Formula {
        self.counter = 0;
        self.objects.clear();
        self.fields.clear();
        self.formula(rng, depth)
    }

    /// A closed field term.
    pub fn term<R: Rng>(&mut self, rng: &mut R, depth: usize) -> Term {
        self.counter = 0;
        self.objects.clear();
        self.fields.clear();
        self.field_term(rng, depth)
    }

    fn fresh(&mut self, stem: &str) -> String {
        self.counter += 1;
        format!("{stem}{}", self.counter)
    }

    fn formula<R: Rng>(&mut self, rng: &mut R, depth: usize) -> Formula {
        if depth == 0 {
            return self.atomic(rng, 0);
        }
        let d = depth - 1;
        match rng.gen_range(0..13) {
            0 => Formula::not(self.formula(rng, d)),
            1 => Formula::and(self.formula(rng, d), self.formula(rng, d)),
            2 => Formula::or(self.formula(rng, d), self.formula(rng, d)),
            3 => Formula::implies(self.formula(rng, d), self.formula(rng, d)),
            4..=6 => {
                let sort = if rng.gen_bool(0.3) { Sort::Field } else { Sort::Object };
                let name = self.fresh(if sort == Sort::Field { "y" } else { "x" });
                let stack = if sort == Sort::Field { &mut self.fields } else { &mut self.objects };
                stack.push(name.clone());
                let body = self.formula(rng, d);
                let stack = if sort == Sort::Field { &mut self.fields } else { &mut self.objects };
                stack.pop();
                let v = Var { name, sort };
                if rng.gen_bool(0.5) {
                    Formula::forall(v, body)
                } else {
                    Formula::exists(v, body)
                }
            }
            _ => self.atomic(rng, d),
        }
    }

    fn atomic<R: Rng>(&mut self, rng: &mut R, depth: usize) -> Formula {
        match rng.gen_range(0..11) {
            0 => Formula::pred("C", vec![]),
            1 => Formula::pred("A", vec![self.object_term(rng, depth)]),
            2 => Formula::pred("B", vec![self.object_term(rng, depth), self.object_term(rng, depth)]),
            3 => Formula::pred("Le", vec![self.field_term(rng, depth), self.field_term(rng, depth)]),
            4 => Formula::Eq {
                sort: Sort::Object,
                lhs: self.object_term(rng, depth),
                rhs: self.object_term(rng, depth),
            },
            5 => Formula::field_eq(self.field_term(rng, depth), self.field_term(rng, depth)),
            6 => Formula::Geq(self.field_term(rng, depth), self.field_term(rng, depth)),
            7 => Formula::Leq(self.field_term(rng, depth), self.field_term(rng, depth)),
            8 => Formula::Lt(self.field_term(rng, depth), self.field_term(rng, depth)),
            9 => Formula::Gt(self.field_term(rng, depth), self.field_term(rng, depth)),
            _ => Formula::InInterval(
                self.field_term(rng, depth),
                self.field_term(rng, depth),
                self.field_term(rng, depth),
            ),
        }
    }

    fn object_term<R: Rng>(&mut self, rng: &mut R, depth: usize) -> Term {
        match rng.gen_range(0..4) {
            0 if depth > 0 => Term::App {
                kind: FuncKind::Object,
                name: "g".into(),
                args: vec![self.object_term(rng, depth - 1)],
            },
            1 | 2 if !self.objects.is_empty() => Term::object_var(self.objects.choose(rng).unwrap()),
            _ => Term::ObjectConst("a".into()),
        }
    }

    fn field_term<R: Rng>(&mut self, rng: &mut R, depth: usize) -> Term {
        let leaf = depth == 0 || rng.gen_range(0..3) == 0;
        if leaf {
            return match rng.gen_range(0..5) {
                0 => Term::FieldConst("k".into()),
                1 if !self.fields.is_empty() => Term::Var(Var::field(self.fields.choose(rng).unwrap().clone())),
                2 => Term::App { kind: FuncKind::Measure, name: "m".into(), args: vec![self.object_term(rng, 0)] },
                _ => {
                    let num = rng.gen_range(-9..=9);
                    let den = rng.gen_range(1..=4);
                    Term::Num(Rational::frac(num, den))
                }
            };
        }
        let d = depth - 1;
        match rng.gen_range(0..7) {
            0 => {
                let op = [ArithOp::Add, ArithOp::Sub, ArithOp::Mul, ArithOp::Div][rng.gen_range(0..4)];
                Term::arith(op, self.field_term(rng, d), self.field_term(rng, d))
            }
            1 => Term::App { kind: FuncKind::Field, name: "h".into(), args: vec![self.field_term(rng, d), self.field_term(rng, d)] },
            2..=4 => {
                let n = rng.gen_range(1..=2);
                let vars: Vec<String> = (0..n).map(|_| self.fresh("x")).collect();
                let depth_before = self.objects.len();
                self.objects.extend(vars.iter().cloned());
                let body = Box::new(self.formula(rng, d));
                let result = if rng.gen_bool(0.4) {
                    let given = Box::new(self.formula(rng, d));
                    Term::CondProb { body, given, vars }
                } else {
                    Term::Prob { body, vars }
                };
                self.objects.truncate(depth_before);
                result
            }
            _ => Term::arith(ArithOp::Add, self.field_term(rng, d), Term::Num(Rational::one())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_random, GenParams, WeightStyle};
    use crate::syntax::well_formed_formula;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn syntax_sentences_are_well_formed_and_closed() {
        let v = syntax_vocab();
        let mut g = SyntaxGen::new();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let f = g.sentence(&mut rng, 4);
            well_formed_formula(&f, &v).unwrap();
            assert!(f.is_closed());
        }
    }

    #[test]
    fn semantic_formulas_stay_in_vocabulary() {
        let (v, _) = generate_random(1, &GenParams::new(3, vec![1, 2], WeightStyle::Random).with_extras());
        let g = SemanticGen::from_vocab(&v, &["x", "y"]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let f = g.formula(&mut rng, 3);
            assert!(f.free_vars().iter().all(|x| x.sort == Sort::Object && g.free_vars().contains(&x.name)));
            assert!(g.sentence(&mut rng, 3).is_closed());
        }
    }
}
