//! Polygonal routes in the x-plane that keep clear of obstacles.

use super::arc::{segment_distance, Arc};
use crate::error::{NumError, NumResult};
use crate::scalar::{c, Real, C};

/// Straight route from `a` to `b`, with detour vertices inserted beside
/// any obstacle closer than `clearance`. `exempt` obstacles (such as the
/// endpoint's own branch point) are ignored.
pub fn route<T: Real>(a: C<T>, b: C<T>, obstacles: &[C<T>], clearance: T) -> NumResult<Vec<Arc<T>>> {
    let mut pts = vec![a, b];
    for _ in 0..64 {
        let mut inserted = false;
        let mut i = 0;
        while i + 1 < pts.len() {
            let (p, q) = (pts[i], pts[i + 1]);
            let worst = obstacles
                .iter()
                .filter(|o| (**o - p).norm() > clearance * T::lit(0.5) && (**o - q).norm() > clearance * T::lit(0.5))
                .map(|o| (segment_distance(p, q, *o), *o))
                .filter(|(d, _)| *d < clearance)
                .fold(None::<(T, C<T>)>, |m, v| match m {
                    Some(w) if w.0 <= v.0 => Some(w),
                    _ => Some(v),
                });
            if let Some((_, o)) = worst {
                let dir = q - p;
                let len = dir.norm();
                if len == T::zero() {
                    i += 1;
                    continue;
                }
                let u = dir / len;
                let normal = u * c(T::zero(), T::one());
                // Side of the segment on which the obstacle lies.
                let side = ((o - p) * u.conj()).im;
                let sign = if side >= T::zero() { -T::one() } else { T::one() };
                let w = o + normal * (sign * clearance * T::lit(2.5));
                pts.insert(i + 1, w);
                inserted = true;
            }
            i += 1;
        }
        if !inserted {
            return Ok(pts.windows(2).map(|w| Arc::Segment { a: w[0], b: w[1] }).collect());
        }
    }
    Err(NumError::Clearance(format!("could not route from {a} to {b} around the obstacles")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cl;

    #[test]
    fn detours_keep_clearance() {
        let obstacles = [cl(0.5, 0.0), cl(0.8, 0.05)];
        let arcs = route(cl(0.0, 0.0), cl(1.2, 0.0), &obstacles, 0.1).unwrap();
        assert!(arcs.len() > 1);
        for a in &arcs {
            for o in &obstacles {
                assert!(a.distance_to(*o) >= 0.1 - 1e-12);
            }
        }
        assert_eq!(arcs.first().unwrap().start(), cl(0.0, 0.0));
        assert_eq!(arcs.last().unwrap().end(), cl(1.2, 0.0));
    }
}
