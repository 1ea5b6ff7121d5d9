//! Exact rational scalars and dense rational linear algebra.
//!
//! Polyhedral computations (faces, hulls, recession cones, LP) run over
//! `BigRational` so that combinatorial decisions never flip on rounding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// Exact conversion; every finite f64 is a dyadic rational.
pub fn rat_from_f64(x: f64) -> Option<Rat> {
    Rat::from_float(x)
}

pub fn rat_to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Fallback for magnitudes outside f64 range.
        if x.is_positive() {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    })
}

pub fn vec_from_f64(xs: &[f64]) -> Option<Vec<Rat>> {
    xs.iter().map(|&x| rat_from_f64(x)).collect()
}

pub fn vec_to_f64(xs: &[Rat]) -> Vec<f64> {
    xs.iter().map(rat_to_f64).collect()
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dense rational matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RatMat {
    pub rows: Vec<Vec<Rat>>,
    pub ncols: usize,
}

impl RatMat {
    pub fn new(rows: Vec<Vec<Rat>>, ncols: usize) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == ncols));
        RatMat { rows, ncols }
    }

    pub fn from_f64(rows: &[Vec<f64>]) -> Option<Self> {
        let ncols = rows.first().map_or(0, |r| r.len());
        let rr: Option<Vec<Vec<Rat>>> = rows.iter().map(|r| vec_from_f64(r)).collect();
        Some(RatMat::new(rr?, ncols))
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Rat::one() } else { Rat::zero() })
                    .collect()
            })
            .collect();
        RatMat::new(rows, n)
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        self.rows.iter().map(|r| dot(r, v)).collect()
    }

    pub fn transpose(&self) -> RatMat {
        let rows = (0..self.ncols)
            .map(|j| self.rows.iter().map(|r| r[j].clone()).collect())
            .collect();
        RatMat::new(rows, self.nrows())
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.ncols {
            if row >= self.nrows() {
                break;
            }
            let Some(p) = (row..self.nrows()).find(|&i| !self.rows[i][col].is_zero()) else {
                continue;
            };
            self.rows.swap(row, p);
            let inv = self.rows[row][col].clone();
            for x in self.rows[row].iter_mut() {
                *x = &*x / &inv;
            }
            for i in 0..self.nrows() {
                if i != row && !self.rows[i][col].is_zero() {
                    let f = self.rows[i][col].clone();
                    for j in 0..self.ncols {
                        let sub = &f * &self.rows[row][j];
                        self.rows[i][j] = &self.rows[i][j] - sub;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis for the right null space.
    pub fn null_space(&self) -> Vec<Vec<Rat>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.ncols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rat::zero(); self.ncols];
                v[f] = Rat::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -m.rows[r][f].clone();
                }
                v
            })
            .collect()
    }

    /// Solve `A x = b` if a solution exists (A may be rectangular).
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        let mut aug = self.clone();
        for (r, bi) in aug.rows.iter_mut().zip(b) {
            r.push(bi.clone());
        }
        aug.ncols += 1;
        let pivots = aug.rref();
        if pivots.contains(&self.ncols) {
            return None; // inconsistent
        }
        let mut x = vec![Rat::zero(); self.ncols];
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = aug.rows[r][self.ncols].clone();
        }
        Some(x)
    }

    /// Inverse of a square matrix, if nonsingular.
    pub fn inverse(&self) -> Option<RatMat> {
        let n = self.nrows();
        if n != self.ncols {
            return None;
        }
        let mut aug = RatMat::new(
            self.rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let mut row = r.clone();
                    row.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
                    row
                })
                .collect(),
            2 * n,
        );
        let pivots = aug.rref();
        if pivots.len() < n || pivots.iter().any(|&p| p >= n) {
            return None;
        }
        Some(RatMat::new(
            aug.rows.into_iter().map(|r| r[n..].to_vec()).collect(),
            n,
        ))
    }
}

/// Basis of the orthogonal complement of `span(vs)` inside R^n.
pub fn orthogonal_complement(vs: &[Vec<Rat>], n: usize) -> Vec<Vec<Rat>> {
    if vs.is_empty() {
        return RatMat::identity(n).rows;
    }
    RatMat::new(vs.to_vec(), n).null_space()
}
