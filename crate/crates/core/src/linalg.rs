//! Dense linear algebra over an exact (or tolerance-based) [`Field`].

use crate::scalar::Field;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Field> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix whose rows are the given vectors.
    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Matrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().cloned().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        Self::from_fn(self.rows, rhs.cols, |i, j| {
            (0..self.cols).fold(S::zero(), |acc, k| {
                acc.add(&self.get(i, k).mul(rhs.get(k, j)))
            })
        })
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j).sub(rhs.get(i, j)))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j).add(rhs.get(i, j)))
    }

    pub fn scaled(&self, c: &S) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j).mul(c))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(S::is_zero)
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let best = (r..m.rows)
                .map(|i| (i, m.get(i, c).pivot_weight()))
                .filter(|(_, w)| *w > 0.0)
                .max_by(|a, b| a.1.total_cmp(&b.1));
            let Some((p, _)) = best else { continue };
            m.swap_rows(r, p);
            let inv = m.get(r, c).inv().expect("nonzero pivot");
            for j in c..m.cols {
                let v = m.get(r, j).mul(&inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let factor = m.get(i, c).clone();
                for j in c..m.cols {
                    let v = m.get(i, j).sub(&factor.mul(m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right null space `{x : M x = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<S>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![S::zero(); self.cols];
                x[f] = S::one();
                for (row, &p) in pivots.iter().enumerate() {
                    x[p] = r.get(row, f).neg();
                }
                x
            })
            .collect()
    }

    /// Some solution of `M x = b`, if one exists.
    pub fn solve(&self, b: &[S]) -> Option<Vec<S>> {
        assert_eq!(b.len(), self.rows, "dimension mismatch");
        let aug = Self::from_fn(self.rows, self.cols + 1, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                b[i].clone()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![S::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = r.get(row, self.cols).clone();
        }
        Some(x)
    }
}

pub fn dot<S: Field>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (x, y)| acc.add(&x.mul(y)))
}

/// Linearly independent subset spanning the same space (row-echelon basis).
pub fn span_basis<S: Field>(vectors: &[Vec<S>]) -> Vec<Vec<S>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let (r, pivots) = Matrix::from_rows(vectors).rref();
    (0..pivots.len()).map(|i| r.row(i).to_vec()).collect()
}

pub fn rank_of<S: Field>(vectors: &[Vec<S>]) -> usize {
    if vectors.is_empty() {
        0
    } else {
        Matrix::from_rows(vectors).rank()
    }
}

/// Gram-Schmidt without normalization: an orthogonal basis of the span,
/// exact over the rationals.
pub fn orthogonal_basis<S: Field>(vectors: &[Vec<S>]) -> Vec<Vec<S>> {
    let mut out: Vec<Vec<S>> = Vec::new();
    for v in span_basis(vectors) {
        let mut w = v;
        for b in &out {
            let c = dot(b, &w).div(&dot(b, b)).expect("nonzero basis vector");
            for (x, y) in w.iter_mut().zip(b) {
                *x = x.sub(&c.mul(y));
            }
        }
        out.push(w);
    }
    out
}

/// Orthogonal projection onto a subspace under the plain dot product.
///
/// The spanning set need not be orthogonal or independent; an orthogonal
/// basis is computed once, so projections need no square roots.
#[derive(Debug, Clone)]
pub struct Projector<S> {
    basis: Vec<Vec<S>>,
    norms: Vec<S>,
}

impl<S: Field> Projector<S> {
    pub fn new(spanning: &[Vec<S>]) -> Self {
        let basis = orthogonal_basis(spanning);
        let norms = basis.iter().map(|b| dot(b, b)).collect();
        Projector { basis, norms }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Mutually orthogonal (not normalized) basis vectors.
    pub fn basis(&self) -> &[Vec<S>] {
        &self.basis
    }

    pub fn coordinates(&self, v: &[S]) -> Vec<S> {
        self.basis
            .iter()
            .zip(&self.norms)
            .map(|(b, n)| dot(b, v).div(n).expect("nonzero basis vector"))
            .collect()
    }

    pub fn project(&self, v: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); v.len()];
        for (c, b) in self.coordinates(v).iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(b) {
                *o = o.add(&c.mul(x));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    fn m(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(
            &rows
                .iter()
                .map(|r| r.iter().map(|&x| rat(x, 1)).collect())
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn rank_and_nullspace() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 1);
        assert!(a.mul_vec(&ns[0]).iter().all(|x| x == &rat(0, 1)));
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let a = m(&[&[2, 1], &[1, 3]]);
        let x = a.solve(&[rat(3, 1), rat(5, 1)]).unwrap();
        assert_eq!(x, vec![rat(4, 5), rat(7, 5)]);
        let b = m(&[&[1, 1], &[1, 1]]);
        assert!(b.solve(&[rat(1, 1), rat(2, 1)]).is_none());
    }

    #[test]
    fn projection_is_idempotent() {
        let p = Projector::new(&[vec![rat(1, 1), rat(1, 1), rat(0, 1)], vec![rat(2, 1), rat(2, 1), rat(0, 1)]]);
        assert_eq!(p.dim(), 1);
        let v = vec![rat(3, 1), rat(1, 1), rat(5, 1)];
        let pv = p.project(&v);
        assert_eq!(pv, vec![rat(2, 1), rat(2, 1), rat(0, 1)]);
        assert_eq!(p.project(&pv), pv);
    }

    #[test]
    fn gram_schmidt_is_orthogonal() {
        let vs = vec![
            vec![rat(1, 1), rat(1, 1), rat(0, 1)],
            vec![rat(1, 1), rat(0, 1), rat(1, 1)],
            vec![rat(0, 1), rat(1, 1), rat(1, 1)],
        ];
        let b = orthogonal_basis(&vs);
        assert_eq!(b.len(), 3);
        for i in 0..3 {
            for j in 0..i {
                assert_eq!(dot(&b[i], &b[j]), rat(0, 1));
            }
        }
    }

    #[test]
    fn float_rank_uses_tolerance() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0 + 1e-12]]);
        assert_eq!(a.rank(), 1);
    }
}
