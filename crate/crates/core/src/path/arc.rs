//! Arcs in the x-plane, parametrized on `[0, 1]`.

use crate::scalar::{c, Real, C};

#[derive(Clone, Debug, PartialEq)]
pub enum Arc<T: Real> {
    Segment { a: C<T>, b: C<T> },
    /// `center + radius exp(i (theta0 + sweep t))`.
    Circle { center: C<T>, radius: T, theta0: T, sweep: T },
    /// `e + (from - e) (1 - t)^n`: ends at the branch point `e`, along which
    /// `y` vanishes linearly in `1 - t`.
    ToBranch { e: C<T>, from: C<T>, n: usize },
}

impl<T: Real> Arc<T> {
    pub fn circle_from(center: C<T>, start: C<T>, sweep: T) -> Self {
        let d = start - center;
        Arc::Circle { center, radius: d.norm(), theta0: d.arg(), sweep }
    }

    pub fn x(&self, t: T) -> C<T> {
        match *self {
            Arc::Segment { a, b } => a + (b - a) * t,
            Arc::Circle { center, radius, theta0, sweep } => {
                let th = theta0 + sweep * t;
                center + c(radius * th.cos(), radius * th.sin())
            }
            Arc::ToBranch { e, from, n } => e + (from - e) * (T::one() - t).powi(n as i32),
        }
    }

    pub fn dx(&self, t: T) -> C<T> {
        match *self {
            Arc::Segment { a, b } => b - a,
            Arc::Circle { radius, theta0, sweep, .. } => {
                let th = theta0 + sweep * t;
                c(-radius * th.sin(), radius * th.cos()) * sweep
            }
            Arc::ToBranch { e, from, n } => {
                (from - e) * (-T::from_usize(n).unwrap() * (T::one() - t).powi(n as i32 - 1))
            }
        }
    }

    pub fn start(&self) -> C<T> {
        self.x(T::zero())
    }

    pub fn end(&self) -> C<T> {
        self.x(T::one())
    }

    pub fn length(&self) -> T {
        match *self {
            Arc::Segment { a, b } => (b - a).norm(),
            Arc::Circle { radius, sweep, .. } => radius * sweep.abs(),
            Arc::ToBranch { e, from, .. } => (from - e).norm(),
        }
    }

    /// The same arc traversed backwards, when that is again an [`Arc`].
    pub fn reversed(&self) -> Option<Self> {
        match *self {
            Arc::Segment { a, b } => Some(Arc::Segment { a: b, b: a }),
            Arc::Circle { center, radius, theta0, sweep } => {
                Some(Arc::Circle { center, radius, theta0: theta0 + sweep, sweep: -sweep })
            }
            Arc::ToBranch { .. } => None,
        }
    }

    /// Distance from `p` to the arc.
    pub fn distance_to(&self, p: C<T>) -> T {
        match *self {
            Arc::Segment { a, b } => segment_distance(a, b, p),
            Arc::ToBranch { e, from, .. } => segment_distance(e, from, p),
            Arc::Circle { center, radius, theta0, sweep } => {
                let d = p - center;
                let ends = (self.start() - p).norm().min((self.end() - p).norm());
                if d.norm() == T::zero() {
                    return radius;
                }
                // Is the direction of p inside the swept angular range?
                let (lo, hi) = if sweep >= T::zero() { (theta0, theta0 + sweep) } else { (theta0 + sweep, theta0) };
                if hi - lo >= T::TAU() {
                    return (d.norm() - radius).abs();
                }
                let mut a = d.arg();
                while a < lo {
                    a += T::TAU();
                }
                while a > lo + T::TAU() {
                    a -= T::TAU();
                }
                if a <= hi {
                    (d.norm() - radius).abs()
                } else {
                    ends
                }
            }
        }
    }
}

pub fn segment_distance<T: Real>(a: C<T>, b: C<T>, p: C<T>) -> T {
    let ab = b - a;
    let l2 = ab.norm_sqr();
    if l2 == T::zero() {
        return (p - a).norm();
    }
    let s = ((p - a) * ab.conj()).re / l2;
    let s = s.max(T::zero()).min(T::one());
    (a + ab * s - p).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cl;

    #[test]
    fn derivatives_match_differences() {
        let arcs: [Arc<f64>; 3] = [
            Arc::Segment { a: cl(0.0, 0.0), b: cl(1.0, 2.0) },
            Arc::circle_from(cl(1.0, 0.0), cl(1.3, 0.1), -5.0),
            Arc::ToBranch { e: cl(1.0, 0.0), from: cl(0.5, 0.5), n: 3 },
        ];
        for a in &arcs {
            for &t in &[0.1, 0.5, 0.9] {
                let h = 1e-6;
                let fd = (a.x(t + h) - a.x(t - h)) / (2.0 * h);
                assert!((fd - a.dx(t)).norm() < 1e-6);
            }
        }
        let circ = &arcs[1];
        assert!((circ.distance_to(cl(1.0, 0.0)) - circ.length() / 5.0).abs() < 1e-12);
        let r = circ.reversed().unwrap();
        assert!((r.x(0.25) - circ.x(0.75)).norm() < 1e-14);
    }
}
