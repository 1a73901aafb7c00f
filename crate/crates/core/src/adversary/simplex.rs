//! Dense tableau simplex over exact rationals.
//!
//! Solves `maximize g·v  subject to  H v <= c, v >= 0` with `c >= 0`, so the
//! all-slack basis is feasible and no phase one is needed. At an optimum the
//! objective row under the slack columns holds the optimal dual multipliers.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq)]
pub enum SimplexOutcome {
    Optimal {
        /// Optimal primal point `v`.
        point: Vec<Rational>,
        /// Multipliers of the `H v <= c` rows.
        duals: Vec<Rational>,
        objective: Rational,
    },
    Unbounded,
}

struct Tableau {
    /// `rows[i]` has `vars + slacks` coefficients followed by the right-hand side.
    rows: Vec<Vec<Rational>>,
    /// Reduced costs, same width as a row; the last entry is the objective value.
    cost: Vec<Rational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        self.rows[i].last().expect("non-empty row")
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.rows[row][col].recip();
        for x in self.rows[row].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[row]);
        let nonzero: Vec<usize> = (0..pivot_row.len())
            .filter(|&j| !pivot_row[j].is_zero())
            .collect();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let factor = r[col].clone();
            for &j in &nonzero {
                r[j] -= &factor * &pivot_row[j];
            }
        }
        if !self.cost[col].is_zero() {
            let factor = self.cost[col].clone();
            for &j in &nonzero {
                self.cost[j] -= &factor * &pivot_row[j];
            }
        }
        self.rows[row] = pivot_row;
        self.basis[row] = col;
    }
}

/// Maximizes `g·v` over `H v <= c, v >= 0`. Panics if `c` has a negative entry
/// or the dimensions disagree.
pub fn maximize(h: &[Vec<Rational>], c: &[Rational], g: &[Rational]) -> SimplexOutcome {
    let m = h.len();
    let k = g.len();
    assert_eq!(c.len(), m, "one bound per row");
    assert!(c.iter().all(|x| !x.is_negative()), "origin must be feasible");
    let width = k + m + 1;

    let rows = h
        .iter()
        .zip(c)
        .enumerate()
        .map(|(i, (coeffs, bound))| {
            assert_eq!(coeffs.len(), k, "row width");
            let mut row = Vec::with_capacity(width);
            row.extend(coeffs.iter().cloned());
            row.extend((0..m).map(|j| {
                if i == j {
                    Rational::from_integer(1.into())
                } else {
                    Rational::zero()
                }
            }));
            row.push(bound.clone());
            row
        })
        .collect();
    let mut cost: Vec<Rational> = g.iter().map(|x| -x.clone()).collect();
    cost.resize(width, Rational::zero());
    let mut t = Tableau {
        rows,
        cost,
        basis: (k..k + m).collect(),
    };

    // Dantzig pricing, switching to Bland's rule while pivots are degenerate;
    // any cycle would consist of Bland pivots only, which cannot cycle.
    let mut use_bland = false;
    loop {
        let entering = if use_bland {
            (0..width - 1).find(|&j| t.cost[j].is_negative())
        } else {
            (0..width - 1)
                .filter(|&j| t.cost[j].is_negative())
                .min_by(|&a, &b| t.cost[a].cmp(&t.cost[b]).then(a.cmp(&b)))
        };
        let Some(col) = entering else { break };

        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            let a = &t.rows[i][col];
            if !a.is_positive() {
                continue;
            }
            let ratio = t.rhs(i) / a;
            let better = match &leave {
                None => true,
                Some((r, best)) => {
                    ratio < *best || (ratio == *best && t.basis[i] < t.basis[*r])
                }
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let Some((row, ratio)) = leave else {
            return SimplexOutcome::Unbounded;
        };
        use_bland = ratio.is_zero();
        t.pivot(row, col);
    }

    let mut point = vec![Rational::zero(); k];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < k {
            point[b] = t.rhs(i).clone();
        }
    }
    let duals = t.cost[k..k + m].to_vec();
    let objective = t.cost[width - 1].clone();
    SimplexOutcome::Optimal {
        point,
        duals,
        objective,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn qs(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| q(x, 1)).collect()
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let h = vec![qs(&[1, 0]), qs(&[0, 2]), qs(&[3, 2])];
        let out = maximize(&h, &qs(&[4, 12, 18]), &qs(&[3, 5]));
        let SimplexOutcome::Optimal {
            point,
            duals,
            objective,
        } = out
        else {
            panic!("expected optimum");
        };
        assert_eq!(point, qs(&[2, 6]));
        assert_eq!(objective, q(36, 1));
        // dual of the textbook problem: (0, 3/2, 1)
        assert_eq!(duals, vec![q(0, 1), q(3, 2), q(1, 1)]);
    }

    #[test]
    fn detects_unbounded() {
        let h = vec![qs(&[1, -1])];
        assert_eq!(maximize(&h, &qs(&[1]), &qs(&[0, 1])), SimplexOutcome::Unbounded);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Beale's cycling example (max form), degenerate at the origin.
        let h = vec![
            vec![q(1, 4), q(-8, 1), q(-1, 1), q(9, 1)],
            vec![q(1, 2), q(-12, 1), q(-1, 2), q(3, 1)],
            qs(&[0, 0, 1, 0]),
        ];
        let g = vec![q(3, 4), q(-20, 1), q(1, 2), q(-6, 1)];
        let SimplexOutcome::Optimal { objective, .. } = maximize(&h, &qs(&[0, 0, 1]), &g) else {
            panic!("expected optimum");
        };
        assert_eq!(objective, q(5, 4));
    }
}
