//! Seeded generators of small separated extensions and cross diagrams, used
//! by the property suites and the `mhs-selftest` stage.

use rand::Rng;

use super::{CrossDiagram, ExtensionOfMHS, MhsResult, MixedHodgeStructure};
use crate::exact::{gauss, int, rat, unimodular_inverse, GaussMatrix, IntMatrix};
use crate::scalar::GaussianRational;

pub fn small_gauss<R: Rng>(rng: &mut R) -> GaussianRational {
    let den = rng.gen_range(1..=6);
    gauss(rat(rng.gen_range(-6..=6), den), rat(rng.gen_range(-6..=6), den))
}

pub fn small_gauss_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> GaussMatrix {
    GaussMatrix::from_rows((0..rows).map(|_| (0..cols).map(|_| small_gauss(rng)).collect()).collect())
}

pub fn small_int_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> IntMatrix {
    IntMatrix::from_rows((0..rows).map(|_| (0..cols).map(|_| int(rng.gen_range(-3..=3))).collect()).collect())
}

/// Product of a few random elementary integer operations.
pub fn unimodular<R: Rng>(rng: &mut R, n: usize) -> IntMatrix {
    let mut u = IntMatrix::identity(n);
    if n < 2 {
        if n == 1 && rng.gen_bool(0.5) {
            u.set(0, 0, int(-1));
        }
        return u;
    }
    for _ in 0..(2 * n) {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let k = int(rng.gen_range(-2..=2));
        for c in 0..n {
            let v = u.get(i, c) + &k * u.get(j, c);
            u.set(i, c, v);
        }
    }
    debug_assert!(unimodular_inverse(&u).is_some());
    u
}

/// `tau` in `Q(i)` with positive imaginary part.
pub fn upper_half_plane<R: Rng>(rng: &mut R) -> GaussianRational {
    let den = rng.gen_range(1..=4);
    gauss(rat(rng.gen_range(-4..=4), den), rat(rng.gen_range(1..=6), den))
}

/// `A` of negative weight (copies of `Z(1)` and possibly one elliptic block)
/// and `B = Z(0)^b`, with total rank at most `max_rank`.
pub fn separated_pair<R: Rng>(rng: &mut R, max_rank: usize) -> (MixedHodgeStructure, MixedHodgeStructure) {
    loop {
        let tate_copies = rng.gen_range(0..=2);
        let elliptic = rng.gen_bool(0.5);
        let a = tate_copies + if elliptic { 2 } else { 0 };
        let b = rng.gen_range(1..=2);
        if a == 0 || a + b > max_rank {
            continue;
        }
        let mut sub = MixedHodgeStructure::tate_power(1, tate_copies);
        if elliptic {
            let e = MixedHodgeStructure::elliptic(upper_half_plane(rng)).expect("tau off the real line");
            sub = sub.direct_sum(&e);
        }
        return (sub, MixedHodgeStructure::tate_power(0, b));
    }
}

/// Random extension of `b` by `a` with class `r`, with the middle lattice
/// disguised by a unimodular change of basis and a shifted retraction.
pub fn disguised_extension<R: Rng>(
    rng: &mut R,
    a: &MixedHodgeStructure,
    b: &MixedHodgeStructure,
    r: &GaussMatrix,
) -> MhsResult<ExtensionOfMHS> {
    let e = ExtensionOfMHS::from_class(a, b, r)?;
    let u = unimodular(rng, a.rank() + b.rank());
    let e = e.transform(&u)?;
    Ok(e.with_retraction_shift(&small_int_matrix(rng, a.rank(), b.rank())))
}

/// Data of a cross diagram built on `A1 + C1 + B3` with unipotent Hodge
/// twisting, before disguise.
#[derive(Clone, Debug)]
pub struct DiagramData {
    pub r_ac: GaussMatrix,
    pub r_ab: GaussMatrix,
    pub r_cb: GaussMatrix,
}

/// Builds a cross diagram whose horizontal sequence pushed along `pi` has
/// class `r_cb` and whose vertical sequence has class `r_ac`.
pub fn cross_diagram<R: Rng>(
    rng: &mut R,
    a1: &MixedHodgeStructure,
    c1: &MixedHodgeStructure,
    b3: &MixedHodgeStructure,
    data: &DiagramData,
    disguise: bool,
) -> MhsResult<CrossDiagram> {
    let (a, c, b) = (a1.rank(), c1.rank(), b3.rank());
    let vertical = ExtensionOfMHS::from_class(a1, c1, &data.r_ac)?;
    let b1 = vertical.total.clone();
    let id = |n| GaussMatrix::identity(n);
    let z = |r, c| GaussMatrix::zeros(r, c);
    let t = id(a)
        .hstack(&data.r_ac)
        .hstack(&data.r_ab)
        .vstack(&z(c, a).hstack(&id(c)).hstack(&data.r_cb))
        .vstack(&z(b, a + c).hstack(&id(b)));
    let plain = a1.direct_sum(c1).direct_sum(b3);
    let hodge = plain.hodge_steps().iter().map(|(p, s)| (*p, s.image(&t))).collect();
    let b2 = MixedHodgeStructure::new(a + b + c, plain.weight_steps().to_vec(), hodge)?;
    let iz = |n| IntMatrix::identity(n);
    let zz = |r, c| IntMatrix::zeros(r, c);
    let mut d = CrossDiagram {
        a1: a1.clone(),
        b1,
        c1: c1.clone(),
        b2,
        b3: b3.clone(),
        i: vertical.inclusion.clone(),
        pi: vertical.projection.clone(),
        f: iz(a + c).vstack(&zz(b, a + c)),
        p: zz(b, a + c).hstack(&iz(b)),
    };
    if disguise {
        let u1 = unimodular(rng, a + c);
        let u2 = unimodular(rng, a + b + c);
        let u1i = unimodular_inverse(&u1).expect("unimodular");
        let u2i = unimodular_inverse(&u2).expect("unimodular");
        d.b1 = d.b1.transform(&u1)?;
        d.b2 = d.b2.transform(&u2)?;
        d.i = &u1 * &d.i;
        d.pi = &d.pi * &u1i;
        d.f = &(&u2 * &d.f) * &u1i;
        d.p = &d.p * &u2i;
    }
    Ok(d)
}

/// Shared blocks `A1 < C1 < B3` in weight order, ranks kept small.
pub fn diagram_blocks<R: Rng>(rng: &mut R) -> (MixedHodgeStructure, MixedHodgeStructure, MixedHodgeStructure) {
    let a1 = if rng.gen_bool(0.7) {
        MixedHodgeStructure::tate(1)
    } else {
        MixedHodgeStructure::elliptic(upper_half_plane(rng)).expect("tau off the real line")
    };
    let c1 = MixedHodgeStructure::tate_power(0, rng.gen_range(1..=2).min(if a1.rank() == 2 { 1 } else { 2 }));
    let b3 = MixedHodgeStructure::tate(-1);
    (a1, c1, b3)
}

pub fn diagram_data<R: Rng>(rng: &mut R, a: usize, c: usize, b: usize) -> DiagramData {
    DiagramData {
        r_ac: small_gauss_matrix(rng, a, c),
        r_ab: small_gauss_matrix(rng, a, b),
        r_cb: small_gauss_matrix(rng, c, b),
    }
}
