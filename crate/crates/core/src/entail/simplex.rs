//! Dense two-phase simplex over exact rationals. Bland's rule picks the
//! entering and leaving variables, so the method terminates without
//! cycling.

use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

/// `maximize objective·x` subject to the rows and `x >= 0`.
#[derive(Clone, Debug, Default)]
pub struct Lp {
    pub vars: usize,
    pub rows: Vec<(Vec<Rational>, Sense, Rational)>,
    pub objective: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, x: Vec<Rational> },
    Infeasible,
    Unbounded,
}

impl Lp {
    pub fn new(vars: usize) -> Self {
        Lp { vars, rows: Vec::new(), objective: vec![Rational::zero(); vars] }
    }

    pub fn row(&mut self, coeffs: Vec<Rational>, sense: Sense, rhs: Rational) {
        assert_eq!(coeffs.len(), self.vars);
        self.rows.push((coeffs, sense, rhs));
    }

    pub fn maximize(&self) -> LpOutcome {
        Tableau::build(self).solve(&self.objective)
    }

    pub fn minimize(&self) -> LpOutcome {
        let neg: Vec<Rational> = self.objective.iter().map(|c| -c.clone()).collect();
        match Tableau::build(self).solve(&neg) {
            LpOutcome::Optimal { value, x } => LpOutcome::Optimal { value: -value, x },
            other => other,
        }
    }
}

struct Tableau {
    /// `rows[i]` holds the coefficients of every column followed by the rhs.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    structural: usize,
    artificial_from: usize,
    cols: usize,
}

enum Step {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn build(lp: &Lp) -> Tableau {
        let n = lp.vars;
        let mut slack_count = 0;
        let mut art_count = 0;
        let mut norm = Vec::with_capacity(lp.rows.len());
        for (coeffs, sense, rhs) in &lp.rows {
            let (coeffs, sense, rhs) = if rhs.is_negative() {
                let flipped = match sense {
                    Sense::Le => Sense::Ge,
                    Sense::Ge => Sense::Le,
                    Sense::Eq => Sense::Eq,
                };
                (coeffs.iter().map(|c| -c.clone()).collect::<Vec<_>>(), flipped, -rhs.clone())
            } else {
                (coeffs.clone(), *sense, rhs.clone())
            };
            match sense {
                Sense::Le => slack_count += 1,
                Sense::Ge => {
                    slack_count += 1;
                    art_count += 1;
                }
                Sense::Eq => art_count += 1,
            }
            norm.push((coeffs, sense, rhs));
        }
        let artificial_from = n + slack_count;
        let cols = artificial_from + art_count;
        let mut rows = Vec::with_capacity(norm.len());
        let mut basis = Vec::with_capacity(norm.len());
        let (mut s, mut a) = (n, artificial_from);
        for (coeffs, sense, rhs) in norm {
            let mut row = coeffs;
            row.resize(cols + 1, Rational::zero());
            row[cols] = rhs;
            match sense {
                Sense::Le => {
                    row[s] = Rational::one();
                    basis.push(s);
                    s += 1;
                }
                Sense::Ge => {
                    row[s] = -Rational::one();
                    row[a] = Rational::one();
                    basis.push(a);
                    s += 1;
                    a += 1;
                }
                Sense::Eq => {
                    row[a] = Rational::one();
                    basis.push(a);
                    a += 1;
                }
            }
            rows.push(row);
        }
        Tableau { rows, basis, structural: n, artificial_from, cols }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            let inv = p.recip().expect("pivot is nonzero");
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v = &*v * &inv;
                }
            }
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = &*v - &(&f * pv);
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost` over columns `< limit`, starting from the current basis.
    fn optimize(&mut self, cost: &[Rational], limit: usize) -> Step {
        let zero = Rational::zero();
        let c = |j: usize| cost.get(j).unwrap_or(&zero);
        loop {
            let mut entering = None;
            for j in 0..limit {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut reduced = c(j).clone();
                for (i, row) in self.rows.iter().enumerate() {
                    let cb = c(self.basis[i]);
                    if !cb.is_zero() && !row[j].is_zero() {
                        reduced = &reduced - &(cb * &row[j]);
                    }
                }
                if reduced > zero {
                    entering = Some(j);
                    break;
                }
            }
            let Some(j) = entering else { return Step::Optimal };
            let mut leaving: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[j] > zero {
                    let ratio = row[self.cols].checked_div(&row[j]).expect("positive");
                    let better = match &leaving {
                        None => true,
                        Some((l, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l]),
                    };
                    if better {
                        leaving = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = leaving else { return Step::Unbounded };
            self.pivot(r, j);
        }
    }

    fn value(&self, cost: &[Rational]) -> Rational {
        self.basis
            .iter()
            .zip(&self.rows)
            .filter_map(|(&b, row)| cost.get(b).map(|c| c * &row[self.cols]))
            .sum()
    }

    fn solve(mut self, objective: &[Rational]) -> LpOutcome {
        if self.artificial_from < self.cols {
            let mut phase1 = vec![Rational::zero(); self.cols];
            for c in &mut phase1[self.artificial_from..] {
                *c = -Rational::one();
            }
            if let Step::Unbounded = self.optimize(&phase1, self.cols) {
                unreachable!("phase one is bounded by zero");
            }
            if self.value(&phase1).is_negative() {
                return LpOutcome::Infeasible;
            }
            // Drive remaining (zero-valued) artificials out of the basis.
            let mut i = 0;
            while i < self.rows.len() {
                if self.basis[i] >= self.artificial_from {
                    match (0..self.artificial_from).find(|&j| !self.rows[i][j].is_zero()) {
                        Some(j) => self.pivot(i, j),
                        None => {
                            self.rows.remove(i);
                            self.basis.remove(i);
                            continue;
                        }
                    }
                }
                i += 1;
            }
        }
        match self.optimize(objective, self.artificial_from) {
            Step::Unbounded => LpOutcome::Unbounded,
            Step::Optimal => {
                let mut x = vec![Rational::zero(); self.structural];
                for (&b, row) in self.basis.iter().zip(&self.rows) {
                    if b < self.structural {
                        x[b] = row[self.cols].clone();
                    }
                }
                let value = objective.iter().zip(&x).map(|(c, v)| c * v).sum();
                LpOutcome::Optimal { value, x }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
        let mut lp = Lp::new(2);
        lp.objective = vec![r(3), r(5)];
        lp.row(vec![r(1), r(0)], Sense::Le, r(4));
        lp.row(vec![r(0), r(2)], Sense::Le, r(12));
        lp.row(vec![r(3), r(2)], Sense::Le, r(18));
        assert_eq!(lp.maximize(), LpOutcome::Optimal { value: r(36), x: vec![r(2), r(6)] });
    }

    #[test]
    fn equality_and_ge_rows() {
        // min x + y, x + y >= 1, x - y = 1/2
        let mut lp = Lp::new(2);
        lp.objective = vec![r(1), r(1)];
        lp.row(vec![r(1), r(1)], Sense::Ge, r(1));
        lp.row(vec![r(1), r(-1)], Sense::Eq, Rational::frac(1, 2));
        match lp.minimize() {
            LpOutcome::Optimal { value, x } => {
                assert_eq!(value, r(1));
                assert_eq!(x, vec![Rational::frac(3, 4), Rational::frac(1, 4)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = Lp::new(1);
        lp.row(vec![r(1)], Sense::Ge, r(2));
        lp.row(vec![r(1)], Sense::Le, r(1));
        assert_eq!(lp.maximize(), LpOutcome::Infeasible);
        let mut lp = Lp::new(1);
        lp.objective = vec![r(1)];
        lp.row(vec![r(1)], Sense::Ge, r(2));
        assert_eq!(lp.maximize(), LpOutcome::Unbounded);
    }

    #[test]
    fn negative_rhs_and_redundant_equalities() {
        let mut lp = Lp::new(2);
        lp.objective = vec![r(1), r(0)];
        lp.row(vec![r(-1), r(-1)], Sense::Eq, r(-1));
        lp.row(vec![r(2), r(2)], Sense::Eq, r(2));
        lp.row(vec![r(-1), r(0)], Sense::Ge, Rational::frac(-1, 3));
        match lp.maximize() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, Rational::frac(1, 3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn degenerate_problem_terminates() {
        // A classic cycling example for the largest-coefficient rule.
        let f = Rational::frac;
        let mut lp = Lp::new(4);
        lp.objective = vec![f(3, 4), r(-150), f(1, 50), r(-6)];
        lp.row(vec![f(1, 4), r(-60), f(-1, 25), r(9)], Sense::Le, r(0));
        lp.row(vec![f(1, 2), r(-90), f(-1, 50), r(3)], Sense::Le, r(0));
        lp.row(vec![r(0), r(0), r(1), r(0)], Sense::Le, r(1));
        match lp.maximize() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, f(1, 20)),
            other => panic!("{other:?}"),
        }
    }
}
