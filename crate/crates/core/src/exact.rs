//! Exact linear algebra: dense matrices over any ring, row reduction and
//! subspace arithmetic over exact fields, and Smith normal form over `Z`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::{Field, GaussianRational, Rational};

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IntMatrix = Matrix<BigInt>;
pub type RatMatrix = Matrix<Rational>;
pub type GaussMatrix = Matrix<GaussianRational>;

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Builds an `n x k` matrix whose columns are the given vectors.
    pub fn from_cols(n: usize, cols: &[Vec<T>]) -> Self {
        let mut m = Self::zeros(n, cols.len());
        for (j, v) in cols.iter().enumerate() {
            assert_eq!(v.len(), n);
            for i in 0..n {
                m.data[i * m.cols + j] = v[i].clone();
            }
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn col_vecs(&self) -> Vec<Vec<T>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn block_diag(&self, other: &Self) -> Self {
        Self::from_fn(self.rows + other.rows, self.cols + other.cols, |i, j| {
            match (i < self.rows, j < self.cols) {
                (true, true) => self.get(i, j).clone(),
                (false, false) => other.get(i - self.rows, j - self.cols).clone(),
                _ => T::zero(),
            }
        })
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows.start + i, cols.start + j).clone())
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T>
    where
        T: Mul<Output = T> + Add<Output = T>,
    {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(T::zero(), |s, j| s + self.get(i, j).clone() * v[j].clone())
            })
            .collect()
    }

    pub fn scale(&self, k: &T) -> Self
    where
        T: Mul<Output = T>,
    {
        self.map(|x| x.clone() * k.clone())
    }
}

impl<T: Clone + Zero + One + Neg<Output = T>> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.map(|x| -x.clone())
    }
}

impl<T: Clone + Zero + One> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in product");
        let mut out = Matrix::<T>::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let idx = i * rhs.cols + j;
                    out.data[idx] = out.data[idx].clone() + a.clone() * rhs.get(l, j).clone();
                }
            }
        }
        out
    }
}

impl<T: Clone + Zero + One> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }
}

impl<T: Clone + Zero + One + Sub<Output = T>> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }
}

pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn gauss(re: Rational, im: Rational) -> GaussianRational {
    GaussianRational::new(re, im)
}

pub fn int_to_rat(m: &IntMatrix) -> RatMatrix {
    m.map(|x| Rational::from_integer(x.clone()))
}

pub fn int_to_gauss(m: &IntMatrix) -> GaussMatrix {
    m.map(|x| GaussianRational::new(Rational::from_integer(x.clone()), Rational::zero()))
}

pub fn rat_to_gauss(m: &RatMatrix) -> GaussMatrix {
    m.map(|x| GaussianRational::new(x.clone(), Rational::zero()))
}

pub fn conj_matrix<F: Field>(m: &Matrix<F>) -> Matrix<F> {
    m.map(|x| x.conjugate())
}

/// Splits a Gaussian-rational matrix into real and imaginary parts.
pub fn split_gauss(m: &GaussMatrix) -> (RatMatrix, RatMatrix) {
    (m.map(|z| z.re.clone()), m.map(|z| z.im.clone()))
}

/// Returns the integer matrix when every entry is an integer.
pub fn rat_to_int(m: &RatMatrix) -> Option<IntMatrix> {
    if m.data.iter().all(|x| x.is_integer()) {
        Some(m.map(|x| x.to_integer()))
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Field linear algebra
// ---------------------------------------------------------------------------

/// Reduced row echelon form. Returns the reduced matrix and pivot columns.
pub fn rref<F: Field>(m: &Matrix<F>) -> (Matrix<F>, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(p) = (r..a.rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..a.cols {
                a.data.swap(p * a.cols + j, r * a.cols + j);
            }
        }
        let inv = F::one() / a.get(r, c).clone();
        for j in 0..a.cols {
            let v = a.get(r, j).clone() * inv.clone();
            a.set(r, j, v);
        }
        for i in 0..a.rows {
            if i == r {
                continue;
            }
            let fct = a.get(i, c).clone();
            if fct.is_zero() {
                continue;
            }
            for j in 0..a.cols {
                let v = a.get(i, j).clone() - fct.clone() * a.get(r, j).clone();
                a.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank<F: Field>(m: &Matrix<F>) -> usize {
    rref(m).1.len()
}

/// Basis of the right kernel `{x : m x = 0}`, as columns.
pub fn kernel<F: Field>(m: &Matrix<F>) -> Matrix<F> {
    let (r, piv) = rref(m);
    let free: Vec<usize> = (0..m.cols).filter(|c| !piv.contains(c)).collect();
    let mut out = Matrix::zeros(m.cols, free.len());
    for (k, &fc) in free.iter().enumerate() {
        out.set(fc, k, F::one());
        for (row, &pc) in piv.iter().enumerate() {
            out.set(pc, k, -r.get(row, fc).clone());
        }
    }
    out
}

/// One solution of `m x = b`, if any.
pub fn solve<F: Field>(m: &Matrix<F>, b: &Matrix<F>) -> Option<Matrix<F>> {
    assert_eq!(m.rows, b.rows);
    let aug = m.hstack(b);
    let (r, piv) = rref(&aug);
    if piv.iter().any(|&c| c >= m.cols) {
        return None;
    }
    let mut x = Matrix::zeros(m.cols, b.cols);
    for (row, &pc) in piv.iter().enumerate() {
        for j in 0..b.cols {
            x.set(pc, j, r.get(row, m.cols + j).clone());
        }
    }
    Some(x)
}

pub fn inverse<F: Field>(m: &Matrix<F>) -> Option<Matrix<F>> {
    if m.rows != m.cols {
        return None;
    }
    let x = solve(m, &Matrix::identity(m.rows))?;
    if rank(m) == m.rows {
        Some(x)
    } else {
        None
    }
}

/// Linear subspace of `F^n`, stored by a canonical basis: the rows of the
/// reduced row echelon form, written as columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace<F> {
    ambient: usize,
    basis: Matrix<F>,
}

impl<F: Field> Subspace<F> {
    pub fn zero(n: usize) -> Self {
        Subspace { ambient: n, basis: Matrix::zeros(n, 0) }
    }

    pub fn full(n: usize) -> Self {
        Subspace { ambient: n, basis: Matrix::identity(n) }
    }

    /// Span of the columns of `m`.
    pub fn span(m: &Matrix<F>) -> Self {
        let (r, piv) = rref(&m.transpose());
        let k = piv.len();
        let basis = r.submatrix(0..k, 0..m.rows).transpose();
        Subspace { ambient: m.rows, basis }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.cols
    }

    /// Basis vectors as columns.
    pub fn basis(&self) -> &Matrix<F> {
        &self.basis
    }

    pub fn sum(&self, other: &Self) -> Self {
        Self::span(&self.basis.hstack(&other.basis))
    }

    pub fn intersect(&self, other: &Self) -> Self {
        if self.dim() == 0 || other.dim() == 0 {
            return Self::zero(self.ambient);
        }
        let m = self.basis.hstack(&-&other.basis);
        let k = kernel(&m);
        let coeff = k.submatrix(0..self.dim(), 0..k.cols);
        Self::span(&(&self.basis * &coeff))
    }

    pub fn contains_vec(&self, v: &[F]) -> bool {
        let b = Matrix::from_cols(self.ambient, &[v.to_vec()]);
        solve(&self.basis, &b).is_some()
    }

    pub fn contains(&self, other: &Self) -> bool {
        solve(&self.basis, &other.basis).is_some()
    }

    /// Image under a linear map `m : F^ambient -> F^k`.
    pub fn image(&self, m: &Matrix<F>) -> Self {
        assert_eq!(m.cols, self.ambient);
        Self::span(&(m * &self.basis))
    }

    /// Preimage `{x : m x in self}`.
    pub fn preimage(&self, m: &Matrix<F>) -> Self {
        assert_eq!(m.rows, self.ambient);
        let ann = self.annihilator();
        Self::span(&kernel(&(&ann * m)))
    }

    /// Rows spanning the linear functionals vanishing on the subspace.
    pub fn annihilator(&self) -> Matrix<F> {
        kernel(&self.basis.transpose()).transpose()
    }

    pub fn conjugate(&self) -> Self {
        Self::span(&conj_matrix(&self.basis))
    }

    pub fn map_field<G: Field>(&self, f: impl Fn(&F) -> G) -> Subspace<G> {
        Subspace::span(&self.basis.map(f))
    }
}

// ---------------------------------------------------------------------------
// Integer linear algebra
// ---------------------------------------------------------------------------

/// Smith normal form `u * a * v = d` with `u`, `v` unimodular and `d`
/// diagonal with non-negative entries, each dividing the next.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub rank: usize,
}

impl Smith {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.d.get(i, i).clone()).collect()
    }
}

fn swap_rows(m: &mut IntMatrix, a: usize, b: usize) {
    if a != b {
        for j in 0..m.cols {
            m.data.swap(a * m.cols + j, b * m.cols + j);
        }
    }
}

fn swap_cols(m: &mut IntMatrix, a: usize, b: usize) {
    if a != b {
        for i in 0..m.rows {
            m.data.swap(i * m.cols + a, i * m.cols + b);
        }
    }
}

/// row_dst += k * row_src
fn add_row(m: &mut IntMatrix, dst: usize, src: usize, k: &BigInt) {
    for j in 0..m.cols {
        let v = m.get(dst, j).clone() + k * m.get(src, j);
        m.set(dst, j, v);
    }
}

fn add_col(m: &mut IntMatrix, dst: usize, src: usize, k: &BigInt) {
    for i in 0..m.rows {
        let v = m.get(i, dst).clone() + k * m.get(i, src);
        m.set(i, dst, v);
    }
}

fn neg_row(m: &mut IntMatrix, r: usize) {
    for j in 0..m.cols {
        let v = -m.get(r, j).clone();
        m.set(r, j, v);
    }
}

pub fn smith(a: &IntMatrix) -> Smith {
    let (nr, nc) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntMatrix::identity(nr);
    let mut v = IntMatrix::identity(nc);
    let mut t = 0;
    while t < nr.min(nc) {
        // pivot: smallest nonzero absolute value in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..nr {
            for j in t..nc {
                let x = d.get(i, j);
                if !x.is_zero() && best.map_or(true, |(bi, bj)| x.abs() < d.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        swap_rows(&mut d, t, pi);
        swap_rows(&mut u, t, pi);
        swap_cols(&mut d, t, pj);
        swap_cols(&mut v, t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..nr {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let q = d.get(i, t).div_floor(d.get(t, t));
                add_row(&mut d, i, t, &-&q);
                add_row(&mut u, i, t, &-&q);
                if !d.get(i, t).is_zero() {
                    swap_rows(&mut d, t, i);
                    swap_rows(&mut u, t, i);
                    dirty = true;
                }
            }
            for j in t + 1..nc {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let q = d.get(t, j).div_floor(d.get(t, t));
                add_col(&mut d, j, t, &-&q);
                add_col(&mut v, j, t, &-&q);
                if !d.get(t, j).is_zero() {
                    swap_cols(&mut d, t, j);
                    swap_cols(&mut v, t, j);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // divisibility of the remaining block by the pivot
            let piv = d.get(t, t).clone();
            let bad = (t + 1..nr)
                .flat_map(|i| (t + 1..nc).map(move |j| (i, j)))
                .find(|&(i, j)| !d.get(i, j).is_multiple_of(&piv));
            match bad {
                Some((i, _)) => {
                    add_row(&mut d, t, i, &BigInt::one());
                    add_row(&mut u, t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            neg_row(&mut d, t);
            neg_row(&mut u, t);
        }
        t += 1;
    }
    Smith { u, d, v, rank: t }
}

/// Inverse of a unimodular integer matrix.
pub fn unimodular_inverse(m: &IntMatrix) -> Option<IntMatrix> {
    let inv = inverse(&int_to_rat(m))?;
    rat_to_int(&inv)
}

/// One integer solution `x` of `a x = b` (column blocks solved jointly).
pub fn integer_solve(a: &IntMatrix, b: &IntMatrix) -> Option<IntMatrix> {
    assert_eq!(a.rows, b.rows);
    let s = smith(a);
    // d y = u b, x = v y
    let ub = &s.u * b;
    let mut y = IntMatrix::zeros(a.cols, b.cols);
    for i in 0..a.rows {
        for j in 0..b.cols {
            let rhs = ub.get(i, j);
            if i < s.rank {
                let di = s.d.get(i, i);
                if !rhs.is_multiple_of(di) {
                    return None;
                }
                y.set(i, j, rhs / di);
            } else if !rhs.is_zero() {
                return None;
            }
        }
    }
    Some(&s.v * &y)
}

/// Lattice basis of the integer kernel `{x in Z^n : a x = 0}`, as columns.
pub fn integer_kernel(a: &IntMatrix) -> IntMatrix {
    let s = smith(a);
    s.v.submatrix(0..a.cols, s.rank..a.cols)
}

/// True when the column span of `a` is a saturated sublattice (the quotient
/// `Z^n / span` is torsion free) and the columns are independent.
pub fn is_saturated_injective(a: &IntMatrix) -> bool {
    let s = smith(a);
    s.rank == a.cols && s.diagonal().iter().all(|x| x.is_one())
}

/// Integer left inverse of a saturated injective `a`.
pub fn integer_left_inverse(a: &IntMatrix) -> Option<IntMatrix> {
    let s = smith(a);
    if s.rank != a.cols || !s.diagonal().iter().all(|x| x.is_one()) {
        return None;
    }
    // u a v = [I; 0]  =>  v [I 0] u is a left inverse
    let e = IntMatrix::from_fn(a.cols, a.rows, |i, j| if i == j { BigInt::one() } else { BigInt::zero() });
    Some(&(&s.v * &e) * &s.u)
}

/// Integer right inverse of a surjective `a : Z^n -> Z^m`.
pub fn integer_right_inverse(a: &IntMatrix) -> Option<IntMatrix> {
    integer_solve(a, &IntMatrix::identity(a.rows))
}

/// Quotient of `Z^n` by a saturated sublattice spanned by the columns of
/// `sub`: returns `(q, lift)` with `q : Z^n -> Z^(n-k)` surjective,
/// `ker q = span(sub)` and `q * lift = I`. `None` if the quotient has torsion.
pub fn lattice_quotient(sub: &IntMatrix) -> Option<(IntMatrix, IntMatrix)> {
    let n = sub.rows;
    let s = smith(sub);
    if !s.diagonal().iter().all(|x| x.is_one()) {
        return None;
    }
    let k = s.rank;
    // rows k.. of u kill span(sub) and are unimodular-complementary
    let q = s.u.submatrix(k..n, 0..n);
    let uinv = unimodular_inverse(&s.u)?;
    let lift = uinv.submatrix(0..n, k..n);
    Some((q, lift))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn im(rows: Vec<Vec<i64>>) -> IntMatrix {
        IntMatrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(int).collect()).collect())
    }

    #[test]
    fn smith_known_example() {
        let a = im(vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = smith(&a);
        assert_eq!(s.diagonal(), vec![int(2), int(6), int(12)]);
        assert_eq!(&(&s.u * &a) * &s.v, s.d);
    }

    #[test]
    fn kernel_and_solve() {
        let a = im(vec![vec![1, 2, 3], vec![2, 4, 6]]);
        let k = integer_kernel(&a);
        assert_eq!(k.cols(), 2);
        assert!((&a * &k).is_zero());
        let b = im(vec![vec![5], vec![10]]);
        let x = integer_solve(&a, &b).unwrap();
        assert_eq!(&a * &x, b);
        assert!(integer_solve(&a, &im(vec![vec![1], vec![1]])).is_none());
        assert!(integer_solve(&im(vec![vec![2]]), &im(vec![vec![1]])).is_none());
    }

    #[test]
    fn quotient_by_saturated() {
        let sub = im(vec![vec![1], vec![1], vec![0]]);
        let (q, lift) = lattice_quotient(&sub).unwrap();
        assert!((&q * &sub).is_zero());
        assert_eq!(&q * &lift, IntMatrix::identity(2));
        assert!(lattice_quotient(&im(vec![vec![2], vec![0]])).is_none());
    }

    #[test]
    fn subspace_ops() {
        let r = |n| Rational::from_integer(BigInt::from(n));
        let u = Subspace::span(&RatMatrix::from_cols(3, &[vec![r(1), r(0), r(0)], vec![r(0), r(1), r(0)]]));
        let v = Subspace::span(&RatMatrix::from_cols(3, &[vec![r(0), r(1), r(0)], vec![r(0), r(0), r(1)]]));
        let w = u.intersect(&v);
        assert_eq!(w.dim(), 1);
        assert!(w.contains_vec(&[r(0), r(5), r(0)]));
        assert_eq!(u.sum(&v).dim(), 3);
        assert_eq!(u.annihilator().rows(), 1);
        let p = RatMatrix::from_rows(vec![vec![r(1), r(1), r(0)]]);
        let pre = Subspace::<Rational>::zero(1).preimage(&p);
        assert_eq!(pre.dim(), 2);
    }

    proptest! {
        #[test]
        fn smith_is_valid(entries in prop::collection::vec(-9i64..10, 12), shape in 0usize..3) {
            let (r, c) = [(3, 4), (4, 3), (2, 6)][shape];
            let a = IntMatrix::from_fn(r, c, |i, j| int(entries[i * c + j]));
            let s = smith(&a);
            prop_assert_eq!(&(&s.u * &a) * &s.v, s.d.clone());
            prop_assert!(unimodular_inverse(&s.u).is_some());
            prop_assert!(unimodular_inverse(&s.v).is_some());
            for i in 0..r {
                for j in 0..c {
                    if i != j { prop_assert!(s.d.get(i, j).is_zero()); }
                }
            }
            let dg = s.diagonal();
            for w in dg.windows(2) {
                prop_assert!(w[1].is_multiple_of(&w[0]));
            }
            prop_assert_eq!(s.rank, rank(&int_to_rat(&a)));
        }

        #[test]
        fn rational_kernel_annihilates(entries in prop::collection::vec(-5i64..6, 12)) {
            let a = RatMatrix::from_fn(3, 4, |i, j| rat(entries[i * 4 + j], 1 + (i + j) as i64 % 3));
            let k = kernel(&a);
            prop_assert!((&a * &k).is_zero());
            prop_assert_eq!(k.cols() + rank(&a), 4);
        }
    }
}
