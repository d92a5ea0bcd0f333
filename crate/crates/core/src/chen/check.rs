//! Randomized checks of the basic identities of length-two iterated
//! integrals: composition, shuffle, and the two rules for an exact form.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{signature, ChenOptions};
use crate::curve::expr::parse_poly;
use crate::curve::forms::DifferentialForm;
use crate::curve::function::RationalFunction;
use crate::curve::CurveModel;
use crate::error::NumResult;
use crate::path::{Arc, SurfacePath};
use crate::scalar::{c, Real, C};

#[derive(Clone, Debug, Serialize)]
pub struct ChenSuiteReport {
    pub seed: u64,
    pub samples: usize,
    /// Rejected random paths (too close to a branch point).
    pub rejected: usize,
    /// Largest relative error of each identity: composition, shuffle,
    /// `int df w`, `int w df`.
    pub max_relative_error: [f64; 4],
}

impl ChenSuiteReport {
    pub fn worst(&self) -> f64 {
        self.max_relative_error.iter().copied().fold(0.0, f64::max)
    }
}

fn rel<T: Real>(lhs: C<T>, rhs: C<T>, terms: &[C<T>]) -> f64 {
    let scale = terms.iter().fold(lhs.norm().max(rhs.norm()), |m, z| m.max(z.norm())).max(T::lit(1e-300));
    ((lhs - rhs).norm() / scale).to_f64().unwrap_or(f64::NAN)
}

fn random_c<T: Real, R: Rng>(rng: &mut R, r: f64) -> C<T> {
    c(T::lit(rng.gen_range(-r..r)), T::lit(rng.gen_range(-r..r)))
}

fn random_form<T: Real, R: Rng>(rng: &mut R) -> DifferentialForm<T> {
    let w = DifferentialForm::Monomial { coeff: random_c(rng, 1.0), a: rng.gen_range(0..4), b: rng.gen_range(0..3) };
    if rng.gen_bool(0.3) {
        w.conj()
    } else {
        w
    }
}

fn random_function<T: Real, R: Rng>(rng: &mut R) -> NumResult<RationalFunction<T>> {
    let (a, b, k) = (rng.gen_range(-3..=3), rng.gen_range(-3..=3), rng.gen_range(-3..=3));
    let num = parse_poly(&format!("({a}) * x + ({b}) * y + ({k}) + x^2"))?;
    let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let d = 3.5 + rng.gen_range(0.0..1.0);
    let den = parse_poly(&format!("x - ({:.6}) - ({:.6}) * i", d * th.cos(), d * th.sin()))?;
    RationalFunction::new(num, den)
}

/// A segment followed by a circular arc, starting in `|x| < 1.6`.
fn random_path<T: Real, R: Rng>(rng: &mut R, model: &CurveModel<T>) -> Option<SurfacePath<T>> {
    let x0: C<T> = random_c(rng, 1.6);
    let x1 = x0 + random_c(rng, 0.8);
    let center = x1 + random_c(rng, 0.6);
    let sweep = T::lit(rng.gen_range(0.5..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 });
    let arcs = [Arc::Segment { a: x0, b: x1 }, Arc::circle_from(center, x1, sweep)];
    if arcs.iter().any(|a| a.x(T::one()).norm() > T::lit(2.7) || a.x(T::lit(0.5)).norm() > T::lit(2.7)) {
        return None;
    }
    let ys = model.y_values(x0).ok()?;
    let y0 = ys[rng.gen_range(0..ys.len())];
    SurfacePath::continue_arcs(model, &arcs, y0, T::lit(0.05)).ok()
}

pub fn chen_suite<T: Real>(model: &CurveModel<T>, seed: u64, samples: usize, opts: &ChenOptions<T>) -> NumResult<ChenSuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = [0.0f64; 4];
    let mut rejected = 0;
    let mut done = 0;
    while done < samples {
        let Some(path) = random_path(&mut rng, model) else {
            rejected += 1;
            if rejected > 50 * samples.max(1) {
                break;
            }
            continue;
        };
        let f = random_function(&mut rng)?;
        let (w1, w2) = (random_form(&mut rng), random_form(&mut rng));
        let forms = vec![w1.clone(), w2, DifferentialForm::Exact(f.clone()), DifferentialForm::Times(f.clone(), Box::new(w1))];
        let a = SurfacePath { segments: vec![path.segments[0].clone()] };
        let b = SurfacePath { segments: path.segments[1..].to_vec() };
        let s = signature(&path, &forms, 2, opts)?;
        let sa = signature(&a, &forms, 2, opts)?;
        let sb = signature(&b, &forms, 2, opts)?;
        // (1) composition.
        let rhs = sa.two(0, 1) + sb.two(0, 1) + sa.one(0) * sb.one(1);
        worst[0] = worst[0].max(rel(s.two(0, 1), rhs, &[sa.two(0, 1), sb.two(0, 1), sa.one(0) * sb.one(1)]));
        // (2) shuffle.
        let lhs = s.two(0, 1) + s.two(1, 0);
        worst[1] = worst[1].max(rel(lhs, s.one(0) * s.one(1), &[s.two(0, 1), s.two(1, 0)]));
        // (3), (4) with f at the endpoints.
        let (xs, ys) = path.start().expect("nonempty path");
        let (xe, ye) = path.end().expect("nonempty path");
        let (f0, f1) = (f.eval(xs, ys)?, f.eval(xe, ye)?);
        let r3 = s.one(3) - f0 * s.one(0);
        worst[2] = worst[2].max(rel(s.two(2, 0), r3, &[s.one(3), f0 * s.one(0)]));
        let r4 = f1 * s.one(0) - s.one(3);
        worst[3] = worst[3].max(rel(s.two(0, 2), r4, &[s.one(3), f1 * s.one(0)]));
        done += 1;
    }
    Ok(ChenSuiteReport { seed, samples: done, rejected, max_relative_error: worst })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_few_samples() {
        let m = CurveModel::hyperelliptic(parse_poly::<f64>("x^5-1").unwrap().x_part(), None).unwrap();
        let r = chen_suite(&m, 3, 8, &ChenOptions::default()).unwrap();
        assert_eq!(r.samples, 8);
        assert!(r.worst() < 1e-10, "{r:?}");
    }
}
