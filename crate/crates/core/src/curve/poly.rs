//! Dense complex polynomials in one and two variables.

use crate::scalar::{c, cone, czero, Real, C};

/// `sum coeffs[k] x^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<T: Real> {
    pub coeffs: Vec<C<T>>,
}

impl<T: Real> Poly<T> {
    pub fn new(mut coeffs: Vec<C<T>>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|z| z.norm() == T::zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(czero());
        }
        Poly { coeffs }
    }

    pub fn constant(z: C<T>) -> Self {
        Poly::new(vec![z])
    }

    pub fn x() -> Self {
        Poly::new(vec![czero(), cone()])
    }

    pub fn from_roots(roots: &[C<T>]) -> Self {
        roots.iter().fold(Poly::constant(cone()), |acc, &r| acc.mul(&Poly::new(vec![-r, cone()])))
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|z| z.norm() == T::zero())
    }

    pub fn leading(&self) -> C<T> {
        *self.coeffs.last().unwrap()
    }

    pub fn eval(&self, x: C<T>) -> C<T> {
        self.coeffs.iter().rev().fold(czero(), |acc, &a| acc * x + a)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Poly::constant(czero());
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &a)| a * T::from_usize(k).unwrap())
                .collect(),
        )
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new(
            (0..n)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or_else(czero) + o.coeffs.get(k).copied().unwrap_or_else(czero)
                })
                .collect(),
        )
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Poly::new(self.coeffs.iter().map(|&a| a * s).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = vec![czero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// Roots by Aberth-Ehrlich iteration followed by Newton polishing.
    /// Multiple roots come back as clusters.
    pub fn roots(&self) -> Vec<C<T>> {
        let n = self.degree();
        if n == 0 {
            return Vec::new();
        }
        let lead = self.leading();
        let monic: Vec<C<T>> = self.coeffs.iter().map(|&a| a / lead).collect();
        let radius = (0..n)
            .map(|k| monic[k].norm().powf(T::one() / T::from_usize(n - k).unwrap()))
            .fold(T::zero(), |m, r| m.max(r))
            .max(T::lit(1e-3));
        let nn = T::from_usize(n).unwrap();
        let mut z: Vec<C<T>> = (0..n)
            .map(|k| {
                let th = T::TAU() * T::from_usize(k).unwrap() / nn + T::lit(0.4);
                c(radius * th.cos(), radius * th.sin())
            })
            .collect();
        let dp = self.derivative();
        for _ in 0..800 {
            let mut worst = T::zero();
            for k in 0..n {
                let pv = self.eval(z[k]);
                let dv = dp.eval(z[k]);
                if pv.norm() == T::zero() {
                    continue;
                }
                let ratio = pv / dv;
                let mut s = czero();
                for j in 0..n {
                    if j != k {
                        let d = z[k] - z[j];
                        if d.norm() > T::zero() {
                            s += cone::<T>() / d;
                        }
                    }
                }
                let step = ratio / (cone::<T>() - ratio * s);
                if step.re.is_finite() && step.im.is_finite() {
                    z[k] -= step;
                    worst = worst.max(step.norm() / (T::one() + z[k].norm()));
                }
            }
            if worst < T::epsilon() * T::lit(4.0) {
                break;
            }
        }
        for zk in z.iter_mut() {
            for _ in 0..3 {
                let dv = dp.eval(*zk);
                if dv.norm() == T::zero() {
                    break;
                }
                let step = self.eval(*zk) / dv;
                if step.norm() < T::lit(1e-6) * (T::one() + zk.norm()) {
                    *zk -= step;
                }
            }
        }
        z.sort_by(|a, b| {
            (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap_or(std::cmp::Ordering::Equal)
        });
        z
    }
}

/// Roots grouped into clusters of numerically coincident values, each
/// refined as a simple root of the `(m-1)`-th derivative.
pub fn clustered_roots<T: Real>(p: &Poly<T>, tol: T) -> Vec<(C<T>, usize)> {
    let roots = p.roots();
    // Single-linkage grouping: a root of multiplicity m spreads over a
    // radius of order eps^(1/m), so chains of near neighbours are merged.
    let close = |a: C<T>, b: C<T>| (a - b).norm() <= tol * (T::one() + a.norm().max(b.norm()));
    let mut label: Vec<usize> = (0..roots.len()).collect();
    loop {
        let mut changed = false;
        for i in 0..roots.len() {
            for j in 0..roots.len() {
                if label[j] != label[i] && close(roots[i], roots[j]) {
                    let (lo, hi) = (label[i].min(label[j]), label[i].max(label[j]));
                    label.iter_mut().filter(|l| **l == hi).for_each(|l| *l = lo);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut out = Vec::new();
    for i in 0..roots.len() {
        if label[i] != i {
            continue;
        }
        let members: Vec<C<T>> = (0..roots.len()).filter(|&j| label[j] == i).map(|j| roots[j]).collect();
        let m = members.len();
        let mut center = members.iter().fold(czero::<T>(), |a, &b| a + b) / T::from_usize(m).unwrap();
        let mut d = p.clone();
        for _ in 1..m {
            d = d.derivative();
        }
        let dd = d.derivative();
        for _ in 0..8 {
            let dv = dd.eval(center);
            if dv.norm() == T::zero() {
                break;
            }
            let step = d.eval(center) / dv;
            if !(step.norm() < tol) {
                break;
            }
            center -= step;
        }
        out.push((center, m));
    }
    out
}

/// `sum coeffs[i][j] x^i y^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly2<T: Real> {
    pub coeffs: Vec<Vec<C<T>>>,
}

impl<T: Real> Poly2<T> {
    pub fn zero() -> Self {
        Poly2 { coeffs: vec![vec![czero()]] }
    }

    pub fn constant(z: C<T>) -> Self {
        Poly2 { coeffs: vec![vec![z]] }
    }

    pub fn x() -> Self {
        Poly2 { coeffs: vec![vec![czero()], vec![cone()]] }
    }

    pub fn y() -> Self {
        Poly2 { coeffs: vec![vec![czero(), cone()]] }
    }

    pub fn from_x_poly(p: &Poly<T>) -> Self {
        Poly2 { coeffs: p.coeffs.iter().map(|&a| vec![a]).collect() }.trimmed()
    }

    pub fn get(&self, i: usize, j: usize) -> C<T> {
        self.coeffs.get(i).and_then(|r| r.get(j)).copied().unwrap_or_else(czero)
    }

    fn trimmed(mut self) -> Self {
        let w = self.coeffs.iter().map(|r| r.len()).max().unwrap_or(1).max(1);
        for r in self.coeffs.iter_mut() {
            r.resize(w, czero());
        }
        while self.coeffs.len() > 1 && self.coeffs.last().unwrap().iter().all(|z| z.norm() == T::zero()) {
            self.coeffs.pop();
        }
        let mut w = w;
        while w > 1 && self.coeffs.iter().all(|r| r[w - 1].norm() == T::zero()) {
            w -= 1;
        }
        for r in self.coeffs.iter_mut() {
            r.truncate(w);
        }
        self
    }

    pub fn deg_x(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn deg_y(&self) -> usize {
        self.coeffs[0].len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|r| r.iter().all(|z| z.norm() == T::zero()))
    }

    /// True when no monomial involves `y`.
    pub fn is_x_only(&self) -> bool {
        self.deg_y() == 0
    }

    pub fn x_part(&self) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(|r| r[0]).collect())
    }

    /// Coefficient polynomials `a_j(x)` with `self = sum a_j(x) y^j`.
    pub fn y_coefficients(&self) -> Vec<Poly<T>> {
        (0..=self.deg_y())
            .map(|j| Poly::new(self.coeffs.iter().map(|r| r[j]).collect()))
            .collect()
    }

    pub fn eval(&self, x: C<T>, y: C<T>) -> C<T> {
        self.coeffs.iter().rev().fold(czero(), |acc, row| {
            acc * x + row.iter().rev().fold(czero(), |a, &b| a * y + b)
        })
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let m = self.deg_y().max(o.deg_y()) + 1;
        let coeffs = (0..n).map(|i| (0..m).map(|j| self.get(i, j) + o.get(i, j)).collect()).collect();
        Poly2 { coeffs }.trimmed()
    }

    pub fn neg(&self) -> Self {
        self.scale(-cone::<T>())
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Poly2 { coeffs: self.coeffs.iter().map(|r| r.iter().map(|&z| z * s).collect()).collect() }.trimmed()
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.coeffs.len() + o.coeffs.len() - 1;
        let m = self.deg_y() + o.deg_y() + 1;
        let mut out = vec![vec![czero(); m]; n];
        for (i, r) in self.coeffs.iter().enumerate() {
            for (j, &a) in r.iter().enumerate() {
                if a.norm() == T::zero() {
                    continue;
                }
                for (k, s) in o.coeffs.iter().enumerate() {
                    for (l, &b) in s.iter().enumerate() {
                        out[i + k][j + l] += a * b;
                    }
                }
            }
        }
        Poly2 { coeffs: out }.trimmed()
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Poly2::constant(cone()), |acc, _| acc.mul(self))
    }

    pub fn dx(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Poly2::zero();
        }
        Poly2 {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, r)| r.iter().map(|&z| z * T::from_usize(i).unwrap()).collect())
                .collect(),
        }
        .trimmed()
    }

    pub fn dy(&self) -> Self {
        if self.deg_y() == 0 {
            return Poly2::zero();
        }
        Poly2 {
            coeffs: self
                .coeffs
                .iter()
                .map(|r| r.iter().enumerate().skip(1).map(|(j, &z)| z * T::from_usize(j).unwrap()).collect())
                .collect(),
        }
        .trimmed()
    }

    pub fn max_coeff(&self) -> T {
        self.coeffs.iter().flat_map(|r| r.iter()).fold(T::zero(), |m, z| m.max(z.norm()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cl;

    #[test]
    fn roots_of_unity() {
        let p = Poly::new(vec![cl(-1.0, 0.0), czero(), czero(), czero(), czero(), cone()]);
        let r = p.roots();
        assert_eq!(r.len(), 5);
        for z in r {
            assert!(((z as C<f64>).powu(5) - cone::<f64>()).norm() < 1e-14);
        }
    }

    #[test]
    fn double_root_cluster() {
        let p = Poly::from_roots(&[cl(1.0, 0.0), cl(1.0, 0.0), cl(-2.0, 0.5)]);
        let cl_ = clustered_roots(&p, 1e-5);
        assert_eq!(cl_.len(), 2);
        let (z, m) = cl_.iter().find(|(_, m)| *m == 2).unwrap();
        assert_eq!(*m, 2);
        assert!((z - cl::<f64>(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn bivariate_arithmetic() {
        let f = Poly2::<f64>::x().pow(3).add(&Poly2::y().pow(3)).add(&Poly2::constant(cl(-1.0, 0.0)));
        assert_eq!(f.eval(cl(1.0, 0.0), czero()), czero());
        assert_eq!(f.dx().eval(cl(2.0, 0.0), czero()), cl(12.0, 0.0));
        assert_eq!(f.dy().deg_y(), 2);
    }
}
