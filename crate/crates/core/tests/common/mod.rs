#![allow(dead_code)]

use acm5_core::scalar::{rat, Rational};
use acm5_core::{FamilyParams, PointwiseFrame};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn small_rational(rng: &mut StdRng) -> Rational {
    rat(rng.random_range(-6..=6), rng.random_range(1..=3))
}

/// Parameters with `a1 a4 = a2 a3`: either `(a3, a4) = t (a1, a2)` or
/// `a1 = a2 = 0`.
pub fn valid_params(rng: &mut StdRng) -> FamilyParams {
    let r = |rng: &mut StdRng| rat(rng.random_range(-4..=4), rng.random_range(1..=2));
    if rng.random_range(0..5) == 0 {
        FamilyParams::new(rat(0, 1), rat(0, 1), r(rng), r(rng)).unwrap()
    } else {
        let (a1, a2) = (r(rng), r(rng));
        let t = [rat(0, 1), rat(0, 1), rat(1, 1), rat(-1, 2), rat(2, 1), rat(-1, 5), rat(3, 2)]
            [rng.random_range(0..7)]
        .clone();
        FamilyParams::new(a1.clone(), a2.clone(), &a1 * &t, &a2 * &t).unwrap()
    }
}

pub fn random_frame(rng: &mut StdRng) -> PointwiseFrame<Rational> {
    PointwiseFrame::from_upper(|_, _, _| small_rational(rng))
}

pub fn params(a: [i64; 4]) -> FamilyParams {
    FamilyParams::from_ints(a[0], a[1], a[2], a[3]).unwrap()
}
