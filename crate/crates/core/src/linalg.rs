//! Small dense vector and covector types for the model spaces.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};

/// A tangent vector (or Lie algebra element) in a fixed basis.
#[derive(Clone, PartialEq, Default)]
pub struct Vector(Vec<f64>);

/// A linear functional in the dual basis.
#[derive(Clone, PartialEq, Default)]
pub struct Covector(Vec<f64>);

impl Vector {
    pub fn new(components: Vec<f64>) -> Self {
        Vector(components)
    }

    pub fn zeros(dim: usize) -> Self {
        Vector(vec![0.0; dim])
    }

    /// The `i`-th standard basis vector of `R^dim`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        Vector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector(self.0.iter().map(|x| s * x).collect())
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: f64, other: &Vector) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += s * b;
        }
    }

    pub fn to_dvector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.0)
    }

    pub fn from_dvector(v: &DVector<f64>) -> Self {
        Vector(v.iter().copied().collect())
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }
}

impl Covector {
    pub fn new(components: Vec<f64>) -> Self {
        Covector(components)
    }

    pub fn zeros(dim: usize) -> Self {
        Covector(vec![0.0; dim])
    }

    /// The `i`-th dual basis covector.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        Covector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn apply(&self, v: &Vector) -> f64 {
        self.0.iter().zip(&v.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Covector {
        Covector(self.0.iter().map(|x| s * x).collect())
    }

    /// Pull back along a linear map: `(M^T tau)(w) = tau(M w)`.
    pub fn pullback(&self, map: &DMatrix<f64>) -> Covector {
        let c = map.transpose() * DVector::from_column_slice(&self.0);
        Covector(c.iter().copied().collect())
    }

    pub fn to_dvector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.0)
    }
}

impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        Vector(v)
    }
}

impl From<&[f64]> for Vector {
    fn from(v: &[f64]) -> Self {
        Vector(v.to_vec())
    }
}

impl<const N: usize> From<[f64; N]> for Vector {
    fn from(v: [f64; N]) -> Self {
        Vector(v.to_vec())
    }
}

impl From<Vec<f64>> for Covector {
    fn from(v: Vec<f64>) -> Self {
        Covector(v)
    }
}

impl<const N: usize> From<[f64; N]> for Covector {
    fn from(v: [f64; N]) -> Self {
        Covector(v.to_vec())
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Index<usize> for Covector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add<&Vector> for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), rhs.dim());
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub<&Vector> for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        debug_assert_eq!(self.dim(), rhs.dim());
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        Vector(self.0.iter().map(|x| -x).collect())
    }
}

impl Mul<&Vector> for f64 {
    type Output = Vector;
    fn mul(self, rhs: &Vector) -> Vector {
        rhs.scale(self)
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

impl fmt::Debug for Covector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Covector")?;
        f.debug_list().entries(&self.0).finish()
    }
}

/// Numerical rank by Gaussian elimination with partial pivoting.
pub(crate) fn rank(rows: &[Vec<f64>], tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let ncols = m[0].len();
    let mut rank = 0;
    for col in 0..ncols {
        let pivot = (rank..m.len()).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()));
        let Some(p) = pivot else { break };
        if m[p][col].abs() <= tol {
            continue;
        }
        m.swap(rank, p);
        for r in rank + 1..m.len() {
            let f = m[r][col] / m[rank][col];
            for c in col..ncols {
                m[r][c] -= f * m[rank][c];
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}
