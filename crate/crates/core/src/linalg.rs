//! Exact rational linear algebra.

use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::expr::Q;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut [Vec<Q>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<Q>]) -> usize {
    let mut w = m.to_vec();
    rref(&mut w).len()
}

/// Solve `a x = b`. Free variables are set to zero; `None` if inconsistent.
pub fn solve(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = a.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut x = alloc::vec![Q::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r][n].clone();
    }
    Some(x)
}

/// Basis of the null space of `a`.
pub fn null_space(a: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let n = a.first().map_or(0, Vec::len);
    let mut w = a.to_vec();
    let pivots = rref(&mut w);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = alloc::vec![Q::zero(); n];
            v[f] = Q::one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -w[r][f].clone();
            }
            v
        })
        .collect()
}

/// 3x3 rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix3(pub [[Q; 3]; 3]);

impl RatMatrix3 {
    pub fn zero() -> Self {
        RatMatrix3(core::array::from_fn(|_| core::array::from_fn(|_| Q::zero())))
    }

    pub fn identity() -> Self {
        RatMatrix3(core::array::from_fn(|i| {
            core::array::from_fn(|j| if i == j { Q::one() } else { Q::zero() })
        }))
    }

    pub fn from_ints(m: [[i64; 3]; 3]) -> Self {
        RatMatrix3(m.map(|r| r.map(crate::expr::q)))
    }

    /// Exact binary value of each float.
    pub fn from_f64(m: &[[f64; 3]; 3]) -> Option<Self> {
        let mut out = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] = BigRational::from_float(m[i][j])?;
            }
        }
        Some(out)
    }

    pub fn to_f64(&self) -> [[f64; 3]; 3] {
        use num_traits::ToPrimitive;
        self.0.clone().map(|r| r.map(|x| x.to_f64().unwrap_or(f64::NAN)))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    out.0[i][j] += &self.0[i][k] * &o.0[k][j];
                }
            }
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] -= &o.0[i][j];
            }
        }
        out
    }

    pub fn det(&self) -> Q {
        let m = &self.0;
        &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1]) - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
            + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
    }

    pub fn inverse(&self) -> Option<Self> {
        let mut aug: Vec<Vec<Q>> = (0..3)
            .map(|i| {
                let mut r = self.0[i].to_vec();
                r.extend((0..3).map(|j| if i == j { Q::one() } else { Q::zero() }));
                r
            })
            .collect();
        let piv = rref(&mut aug);
        if piv != [0, 1, 2] {
            return None;
        }
        let mut out = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] = aug[i][3 + j].clone();
            }
        }
        Some(out)
    }

    pub fn rows(&self) -> Vec<Vec<Q>> {
        self.0.iter().map(|r| r.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().flatten().all(Zero::is_zero)
    }
}
