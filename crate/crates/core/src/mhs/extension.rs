use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{vectorize, CSpace, MhsError, MhsResult, MixedHodgeStructure};
use crate::exact::{
    self, int_to_gauss, integer_kernel, integer_left_inverse, integer_right_inverse, integer_solve,
    is_saturated_injective, lattice_quotient, rank, split_gauss, GaussMatrix, IntMatrix, RatMatrix,
};
use crate::scalar::{GaussianRational, Rational};

/// Integer matrix between two structures, compatible with the filtrations
/// up to a Tate twist.
#[derive(Clone, Debug, PartialEq)]
pub struct MhsMorphism {
    pub source: MixedHodgeStructure,
    pub target: MixedHodgeStructure,
    pub matrix: IntMatrix,
    pub twist: i32,
}

impl MhsMorphism {
    pub fn new(source: MixedHodgeStructure, target: MixedHodgeStructure, matrix: IntMatrix) -> MhsResult<Self> {
        Self::with_twist(source, target, matrix, 0)
    }

    pub fn with_twist(
        source: MixedHodgeStructure,
        target: MixedHodgeStructure,
        matrix: IntMatrix,
        twist: i32,
    ) -> MhsResult<Self> {
        if matrix.rows() != target.rank() || matrix.cols() != source.rank() {
            return Err(MhsError::Shape(format!(
                "morphism matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.rank(),
                source.rank()
            )));
        }
        if !source.is_morphism_to(&target, &matrix, twist) {
            return Err(MhsError::Invariant("matrix does not preserve the filtrations".into()));
        }
        Ok(MhsMorphism { source, target, matrix, twist })
    }

    pub fn identity(m: &MixedHodgeStructure) -> Self {
        MhsMorphism { source: m.clone(), target: m.clone(), matrix: IntMatrix::identity(m.rank()), twist: 0 }
    }
}

/// Short exact sequence `0 -> A -> H -> B -> 0` with a chosen integral
/// retraction `r : H -> A` and a filtered section `s : B_C -> H_C`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionOfMHS {
    pub sub: MixedHodgeStructure,
    pub total: MixedHodgeStructure,
    pub quotient: MixedHodgeStructure,
    pub inclusion: IntMatrix,
    pub projection: IntMatrix,
    pub retraction: IntMatrix,
    pub section: GaussMatrix,
}

fn check_exact(inclusion: &IntMatrix, projection: &IntMatrix, a: usize, h: usize, b: usize, what: &str) -> MhsResult<()> {
    if inclusion.rows() != h || inclusion.cols() != a || projection.rows() != b || projection.cols() != h {
        return Err(MhsError::Shape(format!("{what}: map shapes do not fit ranks {a}, {h}, {b}")));
    }
    if a + b != h {
        return Err(MhsError::Invariant(format!("{what}: ranks are not additive")));
    }
    if !is_saturated_injective(inclusion) {
        return Err(MhsError::Invariant(format!("{what}: inclusion is not a saturated injection")));
    }
    if integer_right_inverse(projection).is_none() {
        return Err(MhsError::Invariant(format!("{what}: projection is not surjective")));
    }
    if !(projection * inclusion).is_zero() {
        return Err(MhsError::Invariant(format!("{what}: image of inclusion is not in kernel of projection")));
    }
    Ok(())
}

impl ExtensionOfMHS {
    /// Validates the sequence and computes a retraction and the greedy
    /// filtered section.
    pub fn new(
        sub: MixedHodgeStructure,
        total: MixedHodgeStructure,
        quotient: MixedHodgeStructure,
        inclusion: IntMatrix,
        projection: IntMatrix,
    ) -> MhsResult<Self> {
        check_exact(&inclusion, &projection, sub.rank(), total.rank(), quotient.rank(), "extension")?;
        if !sub.is_morphism_to(&total, &inclusion, 0) {
            return Err(MhsError::Invariant("inclusion is not a morphism of mixed Hodge structures".into()));
        }
        if !total.is_morphism_to(&quotient, &projection, 0) {
            return Err(MhsError::Invariant("projection is not a morphism of mixed Hodge structures".into()));
        }
        let retraction = integer_left_inverse(&inclusion).expect("saturated injection has a left inverse");
        let section = greedy_section(&total, &quotient, &projection)?;
        Ok(ExtensionOfMHS { sub, total, quotient, inclusion, projection, retraction, section })
    }

    /// Same as [`ExtensionOfMHS::new`] but with caller-provided splitting
    /// data, which is checked.
    pub fn with_splitting(
        sub: MixedHodgeStructure,
        total: MixedHodgeStructure,
        quotient: MixedHodgeStructure,
        inclusion: IntMatrix,
        projection: IntMatrix,
        retraction: IntMatrix,
        section: GaussMatrix,
    ) -> MhsResult<Self> {
        let mut e = Self::new(sub, total, quotient, inclusion, projection)?;
        if &retraction * &e.inclusion != IntMatrix::identity(e.sub.rank()) {
            return Err(MhsError::Invariant("retraction does not split the inclusion".into()));
        }
        if &int_to_gauss(&e.projection) * &section != GaussMatrix::identity(e.quotient.rank()) {
            return Err(MhsError::Invariant("section does not split the projection".into()));
        }
        for (p, s) in e.quotient.hodge_steps() {
            if !e.total.f(*p).contains(&s.image(&section)) {
                return Err(MhsError::Invariant(format!("section does not preserve F^{p}")));
            }
        }
        e.retraction = retraction;
        e.section = section;
        Ok(e)
    }

    /// Replaces the retraction by `r + m * projection`, another valid choice.
    pub fn with_retraction_shift(&self, m: &IntMatrix) -> Self {
        let mut e = self.clone();
        e.retraction = &e.retraction + &(m * &e.projection);
        e
    }

    pub fn is_separated(&self) -> bool {
        match (self.sub.weights_present().last(), self.quotient.weights_present().first()) {
            (Some(a), Some(b)) => b > a,
            _ => true,
        }
    }

    pub fn hom_space(&self) -> MixedHodgeStructure {
        self.quotient.hom_to(&self.sub)
    }

    /// `Z(n)` extension class in lattice coordinates: `r_Z o s_F`.
    pub fn carlson_class(&self) -> MhsResult<CarlsonClass> {
        if !self.is_separated() {
            return Err(MhsError::Unsupported("extension is not separated".into()));
        }
        let rep = &int_to_gauss(&self.retraction) * &self.section;
        Ok(CarlsonClass::new(self.sub.clone(), self.quotient.clone(), rep))
    }

    /// The extension with the inclusion negated; its class is the negative.
    pub fn negate(&self) -> Self {
        let mut e = self.clone();
        e.inclusion = -&e.inclusion;
        e.retraction = -&e.retraction;
        e
    }

    /// Extension with the lattice of the middle term rewritten by a
    /// unimodular `u` (coordinates `x -> u x`).
    pub fn transform(&self, u: &IntMatrix) -> MhsResult<Self> {
        let uinv = exact::unimodular_inverse(u).ok_or_else(|| MhsError::Invariant("matrix is not unimodular".into()))?;
        Ok(ExtensionOfMHS {
            sub: self.sub.clone(),
            total: self.total.transform(u)?,
            quotient: self.quotient.clone(),
            inclusion: u * &self.inclusion,
            projection: &self.projection * &uinv,
            retraction: &self.retraction * &uinv,
            section: &int_to_gauss(u) * &self.section,
        })
    }

    /// Pullback along `m : B' -> B`.
    pub fn pullback(&self, m: &MhsMorphism) -> MhsResult<Self> {
        if m.target != self.quotient || m.twist != 0 {
            return Err(MhsError::Shape("pullback morphism must land in the quotient".into()));
        }
        let (a, h, b2) = (self.sub.rank(), self.total.rank(), m.source.rank());
        // H' = ker [pi, -m] in H + B'
        let psi = self.projection.hstack(&-&m.matrix);
        let k = integer_kernel(&psi);
        let sum = self.total.direct_sum(&m.source);
        let total = sum.restrict(&k)?;
        let incl_full = self.inclusion.vstack(&IntMatrix::zeros(b2, a));
        let inclusion = integer_solve(&k, &incl_full).ok_or_else(|| MhsError::Invariant("inclusion not in pullback".into()))?;
        let proj_full = IntMatrix::zeros(b2, h).hstack(&IntMatrix::identity(b2));
        let projection = &proj_full * &k;
        let retraction = &self.retraction.hstack(&IntMatrix::zeros(a, b2)) * &k;
        let s_full = (&self.section * &int_to_gauss(&m.matrix)).vstack(&GaussMatrix::identity(b2));
        let section = exact::solve(&int_to_gauss(&k), &s_full).ok_or_else(|| MhsError::Invariant("section not in pullback".into()))?;
        Self::with_splitting(self.sub.clone(), total, m.source.clone(), inclusion, projection, retraction, section)
    }

    /// Pushforward along `m : A -> A'`.
    pub fn pushforward(&self, m: &MhsMorphism) -> MhsResult<Self> {
        if m.source != self.sub || m.twist != 0 {
            return Err(MhsError::Shape("pushforward morphism must start at the sub object".into()));
        }
        let (a2, h, b) = (m.target.rank(), self.total.rank(), self.quotient.rank());
        // H' = (A' + H) / {(-m a, i a)}
        let g = (-&m.matrix).vstack(&self.inclusion);
        let (q, lift) = lattice_quotient(&g).ok_or_else(|| MhsError::Invariant("pushout has torsion".into()))?;
        let total = m.target.direct_sum(&self.total).quotient(&q)?;
        let inclusion = &q * &IntMatrix::identity(a2).vstack(&IntMatrix::zeros(h, a2));
        let projection = &IntMatrix::zeros(b, a2).hstack(&self.projection) * &lift;
        let r_full = IntMatrix::identity(a2).hstack(&(&m.matrix * &self.retraction));
        let retraction = &r_full * &lift;
        let s_full = GaussMatrix::zeros(a2, b).vstack(&self.section);
        let section = &int_to_gauss(&q) * &s_full;
        Self::with_splitting(m.target.clone(), total, self.quotient.clone(), inclusion, projection, retraction, section)
    }

    /// The split extension `A + B`.
    pub fn split(sub: &MixedHodgeStructure, quotient: &MixedHodgeStructure) -> MhsResult<Self> {
        let (a, b) = (sub.rank(), quotient.rank());
        let inclusion = IntMatrix::identity(a).vstack(&IntMatrix::zeros(b, a));
        let projection = IntMatrix::zeros(b, a).hstack(&IntMatrix::identity(b));
        Self::new(sub.clone(), sub.direct_sum(quotient), quotient.clone(), inclusion, projection)
    }

    /// Extension of `B` by `A` on the lattice `A + B` whose Hodge filtration
    /// is `F^p = {(R y + x, y) : x in F^p A, y in F^p B}`. Its class is `R`.
    pub fn from_class(sub: &MixedHodgeStructure, quotient: &MixedHodgeStructure, r: &GaussMatrix) -> MhsResult<Self> {
        let (a, b) = (sub.rank(), quotient.rank());
        if r.rows() != a || r.cols() != b {
            return Err(MhsError::Shape("class matrix must be rank(A) x rank(B)".into()));
        }
        let t = GaussMatrix::identity(a).hstack(r).vstack(&GaussMatrix::zeros(b, a).hstack(&GaussMatrix::identity(b)));
        let plain = sub.direct_sum(quotient);
        let hodge = plain.hodge_steps().iter().map(|(p, s)| (*p, s.image(&t))).collect();
        let total = MixedHodgeStructure::new(a + b, plain.weight_steps().to_vec(), hodge)?;
        let inclusion = IntMatrix::identity(a).vstack(&IntMatrix::zeros(b, a));
        let projection = IntMatrix::zeros(b, a).hstack(&IntMatrix::identity(b));
        let retraction = IntMatrix::identity(a).hstack(&IntMatrix::zeros(a, b));
        let section = r.vstack(&GaussMatrix::identity(b));
        Self::with_splitting(sub.clone(), total, quotient.clone(), inclusion, projection, retraction, section)
    }
}

/// Filtered section of `projection : total -> quotient`. The quotient's
/// Hodge steps are visited from the smallest subspace upward and each step's
/// canonical basis vectors are taken in order when they enlarge the span.
fn greedy_section(
    total: &MixedHodgeStructure,
    quotient: &MixedHodgeStructure,
    projection: &IntMatrix,
) -> MhsResult<GaussMatrix> {
    let b = quotient.rank();
    let pc = int_to_gauss(projection);
    let mut chosen: Vec<Vec<GaussianRational>> = Vec::new();
    let mut lifts: Vec<Vec<GaussianRational>> = Vec::new();
    for (p, step) in quotient.hodge_steps().iter().rev() {
        let fh = total.f(*p);
        let image = pc.clone();
        let fh_basis = fh.basis();
        let pf = &image * fh_basis;
        for v in step.basis().col_vecs() {
            let mut trial = chosen.clone();
            trial.push(v.clone());
            if rank(&GaussMatrix::from_cols(b, &trial)) <= chosen.len() {
                continue;
            }
            let rhs = GaussMatrix::from_cols(b, &[v.clone()]);
            let y = exact::solve(&pf, &rhs).ok_or_else(|| {
                MhsError::Invariant(format!("projection is not strict on F^{p}; no filtered lift exists"))
            })?;
            lifts.push((fh_basis * &y).col(0));
            chosen = trial;
        }
    }
    if chosen.len() != b {
        return Err(MhsError::Invariant("Hodge filtration of the quotient is not exhaustive".into()));
    }
    let h = total.rank();
    let vmat = GaussMatrix::from_cols(b, &chosen);
    let lmat = GaussMatrix::from_cols(h, &lifts);
    let vinv = exact::inverse(&vmat).expect("chosen vectors form a basis");
    Ok(&lmat * &vinv)
}

/// Which Baer combination to form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaerSign {
    Sum,
    Difference,
}

/// Baer sum or difference of two extensions of `B` by `A`, computed as the
/// middle term `ker(psi) / image(Delta_A)` with the induced splitting data.
pub fn baer_sum(e1: &ExtensionOfMHS, e2: &ExtensionOfMHS, sign: BaerSign) -> MhsResult<ExtensionOfMHS> {
    if e1.sub != e2.sub || e1.quotient != e2.quotient {
        return Err(MhsError::Shape("Baer sum needs identical sub and quotient".into()));
    }
    for (e, name) in [(e1, "first"), (e2, "second")] {
        check_exact(&e.inclusion, &e.projection, e.sub.rank(), e.total.rank(), e.quotient.rank(), name)?;
    }
    let e2 = match sign {
        BaerSign::Difference => e2.clone(),
        BaerSign::Sum => e2.negate(),
    };
    let (a, h2, b) = (e1.sub.rank(), e2.total.rank(), e1.quotient.rank());
    let psi = e1.projection.hstack(&-&e2.projection);
    let k = integer_kernel(&psi);
    let h_mhs = e1.total.direct_sum(&e2.total).restrict(&k)?;
    let delta = e1.inclusion.vstack(&e2.inclusion);
    let dk = integer_solve(&k, &delta).ok_or_else(|| MhsError::Invariant("diagonal of A not in kernel".into()))?;
    let (q, lift) = lattice_quotient(&dk).ok_or_else(|| MhsError::Invariant("Baer quotient has torsion".into()))?;
    let total = h_mhs.quotient(&q)?;
    let incl_full = e1.inclusion.vstack(&IntMatrix::zeros(h2, a));
    let inclusion = &q * &integer_solve(&k, &incl_full).expect("(f1 a, 0) lies in the kernel");
    let projection = &(&e1.projection.hstack(&IntMatrix::zeros(b, h2)) * &k) * &lift;
    let retraction = &(&e1.retraction.hstack(&-&e2.retraction) * &k) * &lift;
    let s_full = e1.section.vstack(&e2.section);
    let s_k = exact::solve(&int_to_gauss(&k), &s_full).ok_or_else(|| MhsError::Invariant("sections disagree on B".into()))?;
    let section = &int_to_gauss(&q) * &s_k;
    ExtensionOfMHS::with_splitting(e1.sub.clone(), total, e1.quotient.clone(), inclusion, projection, retraction, section)
}

/// Point of the intermediate Jacobian `J_0(Hom(B, A))`, in lattice
/// coordinates: the representative is an `a x b` complex matrix taken
/// modulo `F^0 Hom(B, A)` and integer matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct CarlsonClass {
    pub sub: MixedHodgeStructure,
    pub quotient: MixedHodgeStructure,
    pub hom_space: MixedHodgeStructure,
    pub representative: GaussMatrix,
    pub f0_subspace: CSpace,
}

impl CarlsonClass {
    pub fn new(sub: MixedHodgeStructure, quotient: MixedHodgeStructure, representative: GaussMatrix) -> Self {
        let hom_space = quotient.hom_to(&sub);
        let f0_subspace = hom_space.f(0);
        CarlsonClass { sub, quotient, hom_space, representative, f0_subspace }
    }

    pub fn with_representative(&self, representative: GaussMatrix) -> Self {
        CarlsonClass { representative, ..self.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.with_representative(&self.representative + &other.representative)
    }

    pub fn sub_class(&self, other: &Self) -> Self {
        self.with_representative(&self.representative - &other.representative)
    }

    pub fn scale(&self, k: i64) -> Self {
        let kk = GaussianRational::new(Rational::from_integer(k.into()), Rational::zero());
        self.with_representative(self.representative.scale(&kk))
    }

    /// Integer matrix `n` with `rep(self) - rep(other) - n in F^0`, if any.
    pub fn difference_witness(&self, other: &Self) -> Option<IntMatrix> {
        if self.hom_space != other.hom_space {
            return None;
        }
        let d = vectorize(&(&self.representative - &other.representative));
        let ann = self.f0_subspace.annihilator();
        let rhs = &ann * &d;
        let (ar, ai) = split_gauss(&ann);
        let (br, bi) = split_gauss(&rhs);
        let a = ar.vstack(&ai);
        let b = br.vstack(&bi);
        let (a_int, b_int) = clear_denominators(&a, &b);
        let n = integer_solve(&a_int, &b_int)?;
        Some(super::unvectorize(&n, self.sub.rank(), self.quotient.rank()))
    }

    pub fn same_class(&self, other: &Self) -> bool {
        self.difference_witness(other).is_some()
    }

    pub fn is_zero(&self) -> bool {
        self.same_class(&self.with_representative(GaussMatrix::zeros(self.sub.rank(), self.quotient.rank())))
    }

    /// `class o m` for `m : B' -> B`.
    pub fn pullback(&self, m: &MhsMorphism) -> Self {
        let rep = &self.representative * &int_to_gauss(&m.matrix);
        CarlsonClass::new(self.sub.clone(), m.source.clone(), rep)
    }

    /// `m o class` for `m : A -> A'`.
    pub fn pushforward(&self, m: &MhsMorphism) -> Self {
        let rep = &int_to_gauss(&m.matrix) * &self.representative;
        CarlsonClass::new(m.target.clone(), self.quotient.clone(), rep)
    }
}

/// Scales each row of the rational system `a x = b` to integers.
fn clear_denominators(a: &RatMatrix, b: &RatMatrix) -> (IntMatrix, IntMatrix) {
    let mut ai = IntMatrix::zeros(a.rows(), a.cols());
    let mut bi = IntMatrix::zeros(b.rows(), b.cols());
    for r in 0..a.rows() {
        let l = a
            .row(r)
            .iter()
            .chain(b.row(r).iter())
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let lr = Rational::from_integer(l);
        for c in 0..a.cols() {
            ai.set(r, c, (a.get(r, c) * &lr).to_integer());
        }
        for c in 0..b.cols() {
            bi.set(r, c, (b.get(r, c) * &lr).to_integer());
        }
    }
    (ai, bi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{gauss, int, rat};

    fn g(re: i64, im: i64, d: i64) -> GaussianRational {
        gauss(rat(re, d), rat(im, d))
    }

    fn kummer(w: GaussianRational) -> ExtensionOfMHS {
        let a = MixedHodgeStructure::tate(1);
        let b = MixedHodgeStructure::tate(0);
        ExtensionOfMHS::from_class(&a, &b, &GaussMatrix::from_rows(vec![vec![w]])).unwrap()
    }

    #[test]
    fn kummer_class_is_its_parameter_mod_integers() {
        let e = kummer(g(1, 3, 4));
        let c = e.carlson_class().unwrap();
        assert!(c.same_class(&c.with_representative(GaussMatrix::from_rows(vec![vec![g(5, 3, 4)]]))));
        assert!(!c.same_class(&c.with_representative(GaussMatrix::from_rows(vec![vec![g(3, 3, 4)]]))));
        assert!(!c.is_zero());
    }

    #[test]
    fn recomputed_splitting_gives_same_class() {
        let e = kummer(g(2, -1, 3));
        let fresh = ExtensionOfMHS::new(
            e.sub.clone(),
            e.total.clone(),
            e.quotient.clone(),
            e.inclusion.clone(),
            e.projection.clone(),
        )
        .unwrap();
        assert!(fresh.carlson_class().unwrap().same_class(&e.carlson_class().unwrap()));
        let shifted = e.with_retraction_shift(&IntMatrix::from_rows(vec![vec![int(3)]]));
        assert!(shifted.carlson_class().unwrap().same_class(&e.carlson_class().unwrap()));
        assert_ne!(shifted.carlson_class().unwrap().representative, e.carlson_class().unwrap().representative);
    }

    #[test]
    fn baer_sum_of_kummer_classes() {
        let (w1, w2) = (g(1, 1, 3), g(1, -2, 5));
        let (e1, e2) = (kummer(w1.clone()), kummer(w2.clone()));
        let s = baer_sum(&e1, &e2, BaerSign::Sum).unwrap().carlson_class().unwrap();
        let expect = s.with_representative(GaussMatrix::from_rows(vec![vec![w1.clone() + w2.clone()]]));
        assert!(s.same_class(&expect));
        let d = baer_sum(&e1, &e1, BaerSign::Difference).unwrap().carlson_class().unwrap();
        assert!(d.is_zero());
        let split = ExtensionOfMHS::split(&e1.sub, &e1.quotient).unwrap();
        assert!(baer_sum(&split, &split, BaerSign::Sum).unwrap().carlson_class().unwrap().is_zero());
    }

    #[test]
    fn pullback_by_multiplication_scales() {
        let e = kummer(g(1, 2, 7));
        let b = e.quotient.clone();
        let m = MhsMorphism::new(b.clone(), b.clone(), IntMatrix::from_rows(vec![vec![int(3)]])).unwrap();
        let pb = e.pullback(&m).unwrap();
        let c = pb.carlson_class().unwrap();
        assert!(c.same_class(&e.carlson_class().unwrap().scale(3)));
        let id = MhsMorphism::identity(&b);
        assert!(e.pullback(&id).unwrap().carlson_class().unwrap().same_class(&e.carlson_class().unwrap()));
        let pf = e.pushforward(&MhsMorphism::new(e.sub.clone(), e.sub.clone(), IntMatrix::from_rows(vec![vec![int(-2)]])).unwrap()).unwrap();
        assert!(pf.carlson_class().unwrap().same_class(&e.carlson_class().unwrap().scale(-2)));
    }

    #[test]
    fn torsion_multiple_vanishes() {
        let e = kummer(g(1, 0, 3));
        let mut acc = e.clone();
        for _ in 1..3 {
            acc = baer_sum(&acc, &e, BaerSign::Sum).unwrap();
        }
        assert!(acc.carlson_class().unwrap().is_zero());
        assert!(!e.carlson_class().unwrap().is_zero());
    }

    #[test]
    fn non_separated_rejected() {
        let z0 = MixedHodgeStructure::tate(0);
        let e = ExtensionOfMHS::split(&z0, &z0).unwrap();
        assert!(matches!(e.carlson_class(), Err(MhsError::Unsupported(_))));
    }
}
