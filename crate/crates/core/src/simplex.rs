//! Two-phase dense simplex over exact rationals.
//!
//! Problems here are tiny (a handful of variables and constraints), so a
//! dense tableau with Bland's rule is plenty. Variables are free; they are
//! split into positive and negative parts internally.

use crate::rat::{Rat, RatMat};
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq)]
pub enum LpResult {
    Optimal { x: Vec<Rat>, value: Rat },
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// m constraint rows then the objective row; each row has ncols+1 entries.
    t: Vec<Vec<Rat>>,
    basis: Vec<usize>,
    m: usize,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.t[r][c].clone();
        for x in self.t[r].iter_mut() {
            *x = &*x / &piv;
        }
        for i in 0..=self.m {
            if i == r || self.t[i][c].is_zero() {
                continue;
            }
            let f = self.t[i][c].clone();
            for j in 0..=self.ncols {
                let sub = &f * &self.t[r][j];
                self.t[i][j] = &self.t[i][j] - sub;
            }
        }
        self.basis[r] = c;
    }

    /// Bland's rule; returns false on unboundedness.
    fn run<F: Fn(usize) -> bool>(&mut self, allowed: F) -> bool {
        loop {
            let obj = self.m;
            let Some(c) = (0..self.ncols)
                .find(|&j| allowed(j) && self.t[obj][j].is_negative())
            else {
                return true;
            };
            let mut leave: Option<usize> = None;
            for i in 0..self.m {
                if self.t[i][c].is_positive() {
                    let better = match leave {
                        None => true,
                        Some(l) => {
                            let ratio_i = &self.t[i][self.ncols] / &self.t[i][c];
                            let ratio_l = &self.t[l][self.ncols] / &self.t[l][c];
                            ratio_i < ratio_l
                                || (ratio_i == ratio_l && self.basis[i] < self.basis[l])
                        }
                    };
                    if better {
                        leave = Some(i);
                    }
                }
            }
            match leave {
                Some(r) => self.pivot(r, c),
                None => return false,
            }
        }
    }
}

/// Minimize `c . x` subject to `a_ub x <= b_ub` and `a_eq x = b_eq`, x free.
pub fn solve_lp(c: &[Rat], a_ub: &RatMat, b_ub: &[Rat], a_eq: &RatMat, b_eq: &[Rat]) -> LpResult {
    let n = c.len();
    let m_ub = a_ub.nrows();
    let m_eq = a_eq.nrows();
    let m = m_ub + m_eq;
    // Columns: x+ (n), x- (n), slacks (m_ub), artificials (m).
    let nv = 2 * n + m_ub;
    let ncols = nv + m;

    let mut t: Vec<Vec<Rat>> = Vec::with_capacity(m + 1);
    let push_row = |a_row: &[Rat], b: &Rat, slack: Option<usize>, idx: usize, t: &mut Vec<Vec<Rat>>| {
        let mut row = vec![Rat::zero(); ncols + 1];
        for j in 0..n {
            row[j] = a_row[j].clone();
            row[n + j] = -a_row[j].clone();
        }
        if let Some(s) = slack {
            row[2 * n + s] = Rat::one();
        }
        row[ncols] = b.clone();
        if b.is_negative() {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
        }
        row[nv + idx] = Rat::one();
        t.push(row);
    };
    for i in 0..m_ub {
        push_row(&a_ub.rows[i], &b_ub[i], Some(i), i, &mut t);
    }
    for i in 0..m_eq {
        push_row(&a_eq.rows[i], &b_eq[i], None, m_ub + i, &mut t);
    }

    // Phase 1 objective: minimize the sum of artificials. With the artificial
    // basis, the reduced-cost row is minus the column sums over structural vars.
    let mut obj = vec![Rat::zero(); ncols + 1];
    for j in 0..=ncols {
        if (nv..ncols).contains(&j) {
            continue;
        }
        obj[j] = -t.iter().map(|row| row[j].clone()).sum::<Rat>();
    }
    t.push(obj);

    let mut tab = Tableau {
        t,
        basis: (nv..ncols).collect(),
        m,
        ncols,
    };
    if !tab.run(|_| true) {
        // Phase 1 is bounded below by 0; unboundedness cannot happen.
        return LpResult::Infeasible;
    }
    if tab.t[m][ncols].is_negative() {
        return LpResult::Infeasible;
    }

    // Phase 2: real objective, artificials barred from entering.
    let mut obj = vec![Rat::zero(); ncols + 1];
    for j in 0..n {
        obj[j] = c[j].clone();
        obj[n + j] = -c[j].clone();
    }
    for i in 0..m {
        let k = tab.basis[i];
        if k < 2 * n {
            let ck = if k < n {
                c[k].clone()
            } else {
                -c[k - n].clone()
            };
            if !ck.is_zero() {
                for j in 0..=ncols {
                    let sub = &ck * &tab.t[i][j];
                    obj[j] = &obj[j] - sub;
                }
            }
        }
    }
    tab.t[m] = obj;
    if !tab.run(|j| j < nv) {
        return LpResult::Unbounded;
    }

    let mut x = vec![Rat::zero(); n];
    for i in 0..m {
        let k = tab.basis[i];
        if k < n {
            x[k] = &x[k] + &tab.t[i][ncols];
        } else if k < 2 * n {
            x[k - n] = &x[k - n] - &tab.t[i][ncols];
        }
    }
    let value = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    LpResult::Optimal { x, value }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    fn mat(rows: Vec<Vec<Rat>>, ncols: usize) -> RatMat {
        RatMat::new(rows, ncols)
    }

    #[test]
    fn simple_bounded() {
        // min -x - y  s.t. x + y <= 4, x <= 2  (free vars, so y is capped by first)
        let c = vec![rat_int(-1), rat_int(-1)];
        let a = mat(
            vec![
                vec![rat_int(1), rat_int(1)],
                vec![rat_int(1), rat_int(0)],
            ],
            2,
        );
        let b = vec![rat_int(4), rat_int(2)];
        match solve_lp(&c, &a, &b, &mat(vec![], 2), &[]) {
            LpResult::Optimal { value, .. } => assert_eq!(value, rat_int(-4)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unbounded() {
        let c = vec![rat_int(1)];
        let a = mat(vec![vec![rat_int(1)]], 1);
        let b = vec![rat_int(0)];
        assert_eq!(solve_lp(&c, &a, &b, &mat(vec![], 1), &[]), LpResult::Unbounded);
    }

    #[test]
    fn infeasible() {
        // x <= 0 and x = 1
        let c = vec![rat_int(0)];
        let a = mat(vec![vec![rat_int(1)]], 1);
        let b = vec![rat_int(0)];
        let ae = mat(vec![vec![rat_int(1)]], 1);
        let be = vec![rat_int(1)];
        assert_eq!(solve_lp(&c, &a, &b, &ae, &be), LpResult::Infeasible);
    }

    #[test]
    fn equality_mix() {
        // min x + y s.t. x + 2y = 3, x >= 1/2 encoded as -x <= -1/2
        let c = vec![rat_int(1), rat_int(1)];
        let a = mat(vec![vec![rat_int(-1), rat_int(0)]], 2);
        let b = vec![rat(-1, 2)];
        let ae = mat(vec![vec![rat_int(1), rat_int(2)]], 2);
        let be = vec![rat_int(3)];
        match solve_lp(&c, &a, &b, &ae, &be) {
            LpResult::Optimal { x, .. } => {
                assert_eq!(&x[0] + rat_int(2) * &x[1], rat_int(3));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
