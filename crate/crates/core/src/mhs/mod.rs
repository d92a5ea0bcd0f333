//! Finite-rank mixed Hodge structures in exact arithmetic.
//!
//! The lattice is always `Z^rank` with its standard basis. The weight
//! filtration is stored over `Q`, the Hodge filtration over `Q(i)`. Both are
//! kept as lists of jumps in canonical form so that structural equality of
//! two values means equality of the structures.

mod extension;
pub mod json;
pub mod random;
mod rabi;
pub mod selftest;

pub use extension::{baer_sum, BaerSign, CarlsonClass, ExtensionOfMHS, MhsMorphism};
pub use rabi::{generalized_baer_difference, CrossDiagram, GeneralizedBaerDifference};
pub use selftest::{run_selftest, SelfTestReport};


use num_traits::Zero;
use thiserror::Error;

use crate::exact::{
    int_to_gauss, int_to_rat, rat_to_gauss, GaussMatrix, IntMatrix, Matrix, Subspace,
};
use crate::scalar::{GaussianRational, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MhsError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
}

pub type MhsResult<T> = Result<T, MhsError>;

pub type QSpace = Subspace<Rational>;
pub type CSpace = Subspace<GaussianRational>;

#[derive(Clone, Debug, PartialEq)]
pub struct MixedHodgeStructure {
    rank: usize,
    /// `(k, W_k)`, increasing; `W_j` is the entry with the largest `k <= j`,
    /// zero below the first entry. The last entry is the whole space.
    weights: Vec<(i32, QSpace)>,
    /// `(p, F^p)`, increasing `p`; `F^q` is the entry with the smallest
    /// `p >= q`, zero above the last entry. The first entry is the whole space.
    hodge: Vec<(i32, CSpace)>,
}

fn canonical_weights(mut w: Vec<(i32, QSpace)>) -> Vec<(i32, QSpace)> {
    w.sort_by_key(|x| x.0);
    let mut out: Vec<(i32, QSpace)> = Vec::new();
    for (k, s) in w {
        if out.last().map_or(s.dim() == 0, |(_, prev)| *prev == s) {
            continue;
        }
        out.push((k, s));
    }
    out
}

fn canonical_hodge(mut f: Vec<(i32, CSpace)>) -> Vec<(i32, CSpace)> {
    f.sort_by_key(|x| x.0);
    let mut out: Vec<(i32, CSpace)> = Vec::new();
    for (p, s) in f {
        if let Some((_, prev)) = out.last() {
            if *prev == s {
                out.pop();
            }
        }
        out.push((p, s));
    }
    out.retain(|(_, s)| s.dim() > 0);
    out
}

impl MixedHodgeStructure {
    /// Builds and validates a structure. Filtration steps may be listed in
    /// any order; redundant steps are dropped.
    pub fn new(rank: usize, weights: Vec<(i32, QSpace)>, hodge: Vec<(i32, CSpace)>) -> MhsResult<Self> {
        if weights.iter().any(|(_, s)| s.ambient() != rank) || hodge.iter().any(|(_, s)| s.ambient() != rank) {
            return Err(MhsError::Shape("filtration step has wrong ambient dimension".into()));
        }
        let m = MixedHodgeStructure {
            rank,
            weights: canonical_weights(weights),
            hodge: canonical_hodge(hodge),
        };
        m.validate()?;
        Ok(m)
    }

    fn new_unchecked(rank: usize, weights: Vec<(i32, QSpace)>, hodge: Vec<(i32, CSpace)>) -> Self {
        MixedHodgeStructure { rank, weights: canonical_weights(weights), hodge: canonical_hodge(hodge) }
    }

    /// The Tate structure `Z(n)`: rank one, weight `-2n`, type `(-n,-n)`.
    pub fn tate(n: i32) -> Self {
        Self::new_unchecked(
            1,
            vec![(-2 * n, QSpace::full(1))],
            vec![(-n, CSpace::full(1)), (-n + 1, CSpace::zero(1))],
        )
    }

    pub fn tate_power(n: i32, copies: usize) -> Self {
        (0..copies).fold(Self::zero(), |acc, _| acc.direct_sum(&Self::tate(n)))
    }

    pub fn zero() -> Self {
        MixedHodgeStructure { rank: 0, weights: vec![], hodge: vec![] }
    }

    /// Pure weight `-1` structure of rank two with `F^0` spanned by `(1, tau)`
    /// (the first homology of the elliptic curve `C / (Z + tau Z)`).
    pub fn elliptic(tau: GaussianRational) -> MhsResult<Self> {
        let one = GaussianRational::new(Rational::from_integer(1.into()), Rational::zero());
        let f0 = CSpace::span(&GaussMatrix::from_cols(2, &[vec![one, tau]]));
        Self::new(2, vec![(-1, QSpace::full(2))], vec![(-1, CSpace::full(2)), (0, f0), (1, CSpace::zero(2))])
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn weight_steps(&self) -> &[(i32, QSpace)] {
        &self.weights
    }

    pub fn hodge_steps(&self) -> &[(i32, CSpace)] {
        &self.hodge
    }

    pub fn w(&self, k: i32) -> QSpace {
        self.weights
            .iter()
            .rev()
            .find(|(j, _)| *j <= k)
            .map_or_else(|| QSpace::zero(self.rank), |(_, s)| s.clone())
    }

    pub fn f(&self, p: i32) -> CSpace {
        self.hodge
            .iter()
            .find(|(q, _)| *q >= p)
            .map_or_else(|| CSpace::zero(self.rank), |(_, s)| s.clone())
    }

    pub fn w_c(&self, k: i32) -> CSpace {
        complexify(&self.w(k))
    }

    /// Weights `k` with `gr^W_k != 0`.
    pub fn weights_present(&self) -> Vec<i32> {
        self.weights.iter().map(|(k, _)| *k).collect()
    }

    fn hodge_range(&self) -> (i32, i32) {
        match (self.hodge.first(), self.hodge.last()) {
            (Some(a), Some(b)) => (a.0, b.0),
            _ => (0, 0),
        }
    }

    fn validate(&self) -> MhsResult<()> {
        if self.rank == 0 {
            return Ok(());
        }
        let full_w = self.weights.last().is_some_and(|(_, s)| s.dim() == self.rank);
        if !full_w {
            return Err(MhsError::Invariant("weight filtration is not exhaustive".into()));
        }
        for pair in self.weights.windows(2) {
            if !pair[1].1.contains(&pair[0].1) {
                return Err(MhsError::Invariant(format!("W_{} not contained in W_{}", pair[0].0, pair[1].0)));
            }
        }
        let full_f = self.hodge.first().is_some_and(|(_, s)| s.dim() == self.rank);
        if !full_f {
            return Err(MhsError::Invariant("Hodge filtration is not exhaustive".into()));
        }
        for pair in self.hodge.windows(2) {
            if !pair[0].1.contains(&pair[1].1) {
                return Err(MhsError::Invariant(format!("F^{} not contained in F^{}", pair[1].0, pair[0].0)));
            }
        }
        for k in self.weights_present() {
            self.check_pure_graded(k)?;
        }
        Ok(())
    }

    /// `F` induces a pure structure of weight `k` on `gr^W_k`.
    fn check_pure_graded(&self, k: i32) -> MhsResult<()> {
        let wk = self.w_c(k);
        let wk1 = self.w_c(k - 1);
        let (lo, hi) = self.hodge_range();
        let plo = lo.min(k - hi) - 1;
        let phi = hi.max(k + 1 - lo) + 1;
        for p in plo..=phi {
            let s1 = self.f(p).intersect(&wk).sum(&wk1);
            let s2 = self.f(k - p + 1).conjugate().intersect(&wk).sum(&wk1);
            let ok = s1.dim() + s2.dim() == wk.dim() + wk1.dim() && s1.sum(&s2).dim() == wk.dim();
            if !ok {
                return Err(MhsError::Invariant(format!(
                    "gr^W_{k} is not pure: F^{p} and conj F^{} are not opposed",
                    k - p + 1
                )));
            }
        }
        Ok(())
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let (n, m) = (self.rank, other.rank);
        let mut wk: Vec<i32> = self.weights_present();
        wk.extend(other.weights_present());
        wk.sort();
        wk.dedup();
        let weights = wk
            .iter()
            .map(|&k| (k, QSpace::span(&self.w(k).basis().block_diag(other.w(k).basis()))))
            .collect();
        let mut pk: Vec<i32> = self.hodge.iter().chain(&other.hodge).map(|x| x.0).collect();
        pk.sort();
        pk.dedup();
        let hodge = pk
            .iter()
            .map(|&p| (p, CSpace::span(&self.f(p).basis().block_diag(other.f(p).basis()))))
            .collect();
        Self::new_unchecked(n + m, weights, hodge)
    }

    /// Structure induced on the saturated sublattice spanned by the columns
    /// of `basis`, in the coordinates given by those columns.
    pub fn restrict(&self, basis: &IntMatrix) -> MhsResult<Self> {
        if basis.rows() != self.rank {
            return Err(MhsError::Shape("sublattice basis has wrong length".into()));
        }
        let bq = int_to_rat(basis);
        let bc = int_to_gauss(basis);
        let weights = self.weights.iter().map(|(k, s)| (*k, s.preimage(&bq))).collect();
        let hodge = self.hodge.iter().map(|(p, s)| (*p, s.preimage(&bc))).collect();
        Self::new(basis.cols(), weights, hodge)
    }

    /// Structure induced on the quotient by a surjection `q : Z^rank -> Z^m`.
    pub fn quotient(&self, q: &IntMatrix) -> MhsResult<Self> {
        if q.cols() != self.rank {
            return Err(MhsError::Shape("quotient map has wrong width".into()));
        }
        let qq = int_to_rat(q);
        let qc = int_to_gauss(q);
        let weights = self.weights.iter().map(|(k, s)| (*k, s.image(&qq))).collect();
        let hodge = self.hodge.iter().map(|(p, s)| (*p, s.image(&qc))).collect();
        Self::new(q.rows(), weights, hodge)
    }

    /// Transports the structure along a unimodular change of basis `u`.
    pub fn transform(&self, u: &IntMatrix) -> MhsResult<Self> {
        self.quotient(u)
    }

    /// `Hom(B, A)` for `B = self`, `A = target`, vectorized row-major: the
    /// homomorphism with matrix `phi` (rows indexed by `A`) has coordinate
    /// `phi[i][j]` at index `i * rank(B) + j`.
    pub fn hom_to(&self, target: &Self) -> Self {
        let (b, a) = (self.rank, target.rank);
        let n = a * b;
        if n == 0 {
            return Self::new_unchecked(0, vec![], vec![]);
        }
        let wa = target.weights_present();
        let wb = self.weights_present();
        let (amin, amax) = (wa[0], *wa.last().unwrap());
        let (bmin, bmax) = (wb[0], *wb.last().unwrap());
        let mut weights = Vec::new();
        for k in (amin - bmax)..=(amax - bmin) {
            let mut rows: Vec<Vec<Rational>> = Vec::new();
            for (j, wbj) in &self.weights {
                let ann = target.w(j + k).annihilator();
                push_constraints(&mut rows, &ann, wbj.basis(), a, b);
            }
            weights.push((k, QSpace::span(&kernel_of_rows(rows, n))));
        }
        let (fa_lo, fa_hi) = target.hodge_range();
        let (fb_lo, fb_hi) = self.hodge_range();
        let mut hodge = Vec::new();
        for p in (fa_lo - fb_hi - 1)..=(fa_hi - fb_lo + 1) {
            let mut rows: Vec<Vec<GaussianRational>> = Vec::new();
            for (q, fbq) in &self.hodge {
                let ann = target.f(q + p).annihilator();
                push_constraints(&mut rows, &ann, fbq.basis(), a, b);
            }
            hodge.push((p, CSpace::span(&kernel_of_rows(rows, n))));
        }
        Self::new_unchecked(n, weights, hodge)
    }

    /// Checks that an integer matrix `m : self -> target` respects both
    /// filtrations, shifted by a Tate twist: `W_k -> W_{k+2t}`, `F^p -> F^{p+t}`.
    pub fn is_morphism_to(&self, target: &Self, m: &IntMatrix, twist: i32) -> bool {
        if m.rows() != target.rank || m.cols() != self.rank {
            return false;
        }
        let mq = int_to_rat(m);
        let mc = int_to_gauss(m);
        let w_ok = self
            .weights
            .iter()
            .all(|(k, s)| target.w(k + 2 * twist).contains(&s.image(&mq)));
        let f_ok = self
            .hodge
            .iter()
            .all(|(p, s)| target.f(p + twist).contains(&s.image(&mc)));
        w_ok && f_ok
    }
}

pub fn complexify(s: &QSpace) -> CSpace {
    CSpace::span(&rat_to_gauss(s.basis()))
}

/// For each basis vector `v` (column of `vs`, length `b`) adds the rows of
/// `ann * (phi v) = 0` as linear conditions on the row-major entries of
/// `phi` (an `a x b` matrix).
fn push_constraints<F: crate::scalar::Field>(
    rows: &mut Vec<Vec<F>>,
    ann: &Matrix<F>,
    vs: &Matrix<F>,
    a: usize,
    b: usize,
) {
    for col in 0..vs.cols() {
        for r in 0..ann.rows() {
            let mut row = vec![F::zero(); a * b];
            for i in 0..a {
                let l = ann.get(r, i);
                if l.is_zero() {
                    continue;
                }
                for j in 0..b {
                    row[i * b + j] = row[i * b + j].clone() + l.clone() * vs.get(j, col).clone();
                }
            }
            rows.push(row);
        }
    }
}

fn kernel_of_rows<F: crate::scalar::Field>(rows: Vec<Vec<F>>, n: usize) -> Matrix<F> {
    if rows.is_empty() {
        return Matrix::identity(n);
    }
    crate::exact::kernel(&Matrix::from_rows(rows))
}

/// Vectorizes an `a x b` matrix row-major into a column.
pub fn vectorize<T: Clone + num_traits::Zero + num_traits::One>(m: &Matrix<T>) -> Matrix<T> {
    Matrix::from_fn(m.rows() * m.cols(), 1, |i, _| m.get(i / m.cols(), i % m.cols()).clone())
}

pub fn unvectorize<T: Clone + num_traits::Zero + num_traits::One>(v: &Matrix<T>, a: usize, b: usize) -> Matrix<T> {
    Matrix::from_fn(a, b, |i, j| v.get(i * b + j, 0).clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{gauss, int, rat};

    #[test]
    fn tate_and_elliptic_are_valid() {
        let z1 = MixedHodgeStructure::tate(1);
        assert_eq!(z1.weights_present(), vec![-2]);
        assert_eq!(z1.f(-1).dim(), 1);
        assert_eq!(z1.f(0).dim(), 0);
        let e = MixedHodgeStructure::elliptic(gauss(rat(1, 3), rat(2, 1))).unwrap();
        assert_eq!(e.f(0).dim(), 1);
        assert!(MixedHodgeStructure::elliptic(gauss(rat(1, 3), rat(0, 1))).is_err());
    }

    #[test]
    fn hom_weights_and_f0() {
        let z0 = MixedHodgeStructure::tate(0);
        let z1 = MixedHodgeStructure::tate(1);
        let h = z0.hom_to(&z1);
        assert_eq!(h, z1);
        let e = MixedHodgeStructure::elliptic(gauss(rat(0, 1), rat(1, 1))).unwrap();
        let h2 = z0.direct_sum(&z0).hom_to(&e);
        assert_eq!(h2.rank(), 4);
        assert_eq!(h2.weights_present(), vec![-1]);
        assert_eq!(h2.f(0).dim(), 2);
    }

    #[test]
    fn restrict_and_quotient() {
        let s = MixedHodgeStructure::tate(1).direct_sum(&MixedHodgeStructure::tate(0));
        let sub = s.restrict(&IntMatrix::from_rows(vec![vec![int(1)], vec![int(0)]])).unwrap();
        assert_eq!(sub, MixedHodgeStructure::tate(1));
        let q = s.quotient(&IntMatrix::from_rows(vec![vec![int(0), int(1)]])).unwrap();
        assert_eq!(q, MixedHodgeStructure::tate(0));
        assert!(s.is_morphism_to(&MixedHodgeStructure::tate(0), &IntMatrix::from_rows(vec![vec![int(0), int(1)]]), 0));
        assert!(!s.is_morphism_to(&MixedHodgeStructure::tate(1), &IntMatrix::from_rows(vec![vec![int(0), int(1)]]), 0));
    }

    #[test]
    fn impure_rejected() {
        // weight 0 rank 1 with Hodge type (1, -1) is not pure
        let r = MixedHodgeStructure::new(
            1,
            vec![(0, QSpace::full(1))],
            vec![(1, CSpace::full(1)), (2, CSpace::zero(1))],
        );
        assert!(matches!(r, Err(MhsError::Invariant(_))));
    }
}
