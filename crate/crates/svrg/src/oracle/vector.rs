//! Dense parameter vector used for both iterates and gradients.

use std::ops::{Index, IndexMut};

/// A dense vector in `R^d`. Dimension is fixed at construction; all in-place
/// operations require matching dimensions and panic otherwise (shape bugs are
/// programmer errors, not recoverable conditions).
#[derive(Clone, Debug, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn zeros(dim: usize) -> Self {
        Vector(vec![0.0; dim])
    }

    pub fn from_vec(coords: Vec<f64>) -> Self {
        Vector(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn fill(&mut self, value: f64) {
        self.0.fill(value);
    }

    pub fn copy_from(&mut self, other: &Vector) {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        self.0.copy_from_slice(&other.0);
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|a| a * a).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: f64, x: &Vector) {
        assert_eq!(self.dim(), x.dim(), "vector dimension mismatch");
        for (s, v) in self.0.iter_mut().zip(&x.0) {
            *s += a * v;
        }
    }

    pub fn scale(&mut self, a: f64) {
        for s in &mut self.0 {
            *s *= a;
        }
    }

    pub fn dist_sq(&self, other: &Vector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|a| a.is_finite())
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

impl From<Vec<f64>> for Vector {
    fn from(coords: Vec<f64>) -> Self {
        Vector(coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axpy_and_dot() {
        let mut v = Vector::from_vec(vec![1.0, 2.0]);
        let w = Vector::from_vec(vec![3.0, -1.0]);
        v.axpy(2.0, &w);
        assert_eq!(v.as_slice(), &[7.0, 0.0]);
        assert_eq!(v.dot(&w), 21.0);
    }

    #[test]
    fn subtracting_identical_gradients_is_exact() {
        // v - v + g must reproduce g bit for bit; the SVRG direction at the
        // snapshot relies on this.
        let g = Vector::from_vec(vec![0.1, -0.7, 3.3e-9]);
        let a = Vector::from_vec(vec![1.0 / 3.0, 2.0 / 7.0, -5.5]);
        let mut v = a.clone();
        v.axpy(-1.0, &a);
        v.axpy(1.0, &g);
        assert_eq!(v, g);
    }

    #[test]
    #[should_panic(expected = "dimension mismatch")]
    fn mismatched_dims_panic() {
        let mut v = Vector::zeros(2);
        v.axpy(1.0, &Vector::zeros(3));
    }
}
