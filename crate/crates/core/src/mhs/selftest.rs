//! Seeded exact-arithmetic suite: Baer additivity of Carlson classes,
//! exactness of the generalized Baer difference, and its pushforward
//! identity.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::random::{cross_diagram, diagram_blocks, diagram_data, disguised_extension, separated_pair, small_gauss_matrix, DiagramData};
use crate::exact::{integer_right_inverse, is_saturated_injective};

use super::{baer_sum, generalized_baer_difference, BaerSign, MhsResult};

#[derive(Clone, Debug, Default, Serialize)]
pub struct SuiteCount {
    pub cases: usize,
    pub failures: usize,
    /// First failure, if any.
    pub first_failure: Option<String>,
}

impl SuiteCount {
    fn record(&mut self, label: &str, r: MhsResult<bool>) {
        self.cases += 1;
        let msg = match r {
            Ok(true) => return,
            Ok(false) => format!("{label}: identity fails"),
            Err(e) => format!("{label}: {e}"),
        };
        self.failures += 1;
        self.first_failure.get_or_insert(msg);
    }

    pub fn passed(&self) -> bool {
        self.cases > 0 && self.failures == 0
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SelfTestReport {
    pub seed: u64,
    pub baer_additivity: SuiteCount,
    pub difference_exactness: SuiteCount,
    pub pushforward_identity: SuiteCount,
}

impl SelfTestReport {
    pub fn passed(&self) -> bool {
        self.baer_additivity.passed() && self.difference_exactness.passed() && self.pushforward_identity.passed()
    }
}

/// `cases` random separated extensions of rank at most 4 and `diagrams`
/// random pairs of cross diagrams.
pub fn run_selftest(seed: u64, cases: usize, diagrams: usize) -> SelfTestReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SelfTestReport { seed, ..Default::default() };
    for k in 0..cases {
        let r = (|| -> MhsResult<bool> {
            let (a, b) = separated_pair(&mut rng, 4);
            let r1 = small_gauss_matrix(&mut rng, a.rank(), b.rank());
            let r2 = small_gauss_matrix(&mut rng, a.rank(), b.rank());
            let e1 = disguised_extension(&mut rng, &a, &b, &r1)?;
            let e2 = disguised_extension(&mut rng, &a, &b, &r2)?;
            let s = baer_sum(&e1, &e2, BaerSign::Sum)?;
            let d = baer_sum(&e1, &e2, BaerSign::Difference)?;
            let (c1, c2) = (e1.carlson_class()?, e2.carlson_class()?);
            Ok(s.carlson_class()?.same_class(&c1.add(&c2)) && d.carlson_class()?.same_class(&c1.sub_class(&c2)))
        })();
        rep.baer_additivity.record(&format!("case {k}"), r);
    }
    for k in 0..diagrams {
        let (a1, c1, b3) = diagram_blocks(&mut rng);
        let dd1 = diagram_data(&mut rng, a1.rank(), c1.rank(), b3.rank());
        let dd2 = if k % 2 == 0 {
            DiagramData { r_ac: dd1.r_ac.clone(), ..diagram_data(&mut rng, a1.rank(), c1.rank(), b3.rank()) }
        } else {
            diagram_data(&mut rng, a1.rank(), c1.rank(), b3.rank())
        };
        let built = (|| {
            let d1 = cross_diagram(&mut rng, &a1, &c1, &b3, &dd1, true)?;
            let d2 = cross_diagram(&mut rng, &a1, &c1, &b3, &dd2, true)?;
            let out = generalized_baer_difference(&d1, &d2)?;
            Ok((d1, d2, out))
        })();
        let (d1, d2, out) = match built {
            Ok(v) => v,
            Err(e) => {
                rep.difference_exactness.record(&format!("diagram {k}"), Err(e));
                continue;
            }
        };
        // Both output sequences are rebuilt through the validating constructors.
        let exact = (|| -> MhsResult<bool> {
            out.bb1.carlson_class()?;
            out.f.carlson_class()?;
            let ranks = out.bb1.total.rank() + out.f.total.rank() == out.bb2.rank();
            Ok(ranks
                && is_saturated_injective(&out.bb1_into_bb2)
                && integer_right_inverse(&out.eta).is_some()
                && (&out.eta * &out.bb1_into_bb2).is_zero())
        })();
        rep.difference_exactness.record(&format!("diagram {k}"), exact);
        if dd1.r_ac == dd2.r_ac {
            let id = (|| -> MhsResult<bool> {
                let lhs = out.f.carlson_class()?;
                let p1 = d1.pushed_horizontal()?.carlson_class()?;
                let p2 = d2.pushed_horizontal()?.carlson_class()?;
                Ok(lhs.same_class(&p1.sub_class(&p2)))
            })();
            rep.pushforward_identity.record(&format!("diagram {k}"), id);
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes() {
        let r = run_selftest(1, 20, 6);
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.pushforward_identity.cases, 3);
    }
}
