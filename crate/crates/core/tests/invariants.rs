use proptest::prelude::*;
use std::collections::BTreeSet;
use superpluecker::cluster::{
    enumerate_triangulations, random_moves, sample_generic_plane, verify_walk,
    DecoratedTriangulation,
};
use superpluecker::ptolemy::{check_quad, sample_quad};
use superpluecker::{Parity, Sampler, SamplingProfile, SuperMatrix};

fn invertible(s: &mut Sampler, r: usize, q: usize) -> Option<SuperMatrix> {
    let labels = SuperMatrix::standard_labels(r, q);
    (0..10).find_map(|_| {
        let m = SuperMatrix::sample(
            s,
            labels.clone(),
            labels.clone(),
            BTreeSet::new(),
            BTreeSet::new(),
        )
        .ok()?;
        (m.ber().is_ok() && m.ber_star().is_ok()).then_some(m)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn berezinian_is_multiplicative(seed in any::<u64>(), r in 0usize..=2, q in 1usize..=2) {
        let mut s = Sampler::new(seed, 0, 5, SamplingProfile::shared());
        let (m, n) = (invertible(&mut s, r, q).unwrap(), invertible(&mut s, r, q).unwrap());
        // the product of two invertible samples can still have a singular even block
        let product = m.mul(&n).unwrap().ber();
        prop_assume!(product.is_ok());
        prop_assert_eq!(product.unwrap(), &m.ber().unwrap() * &n.ber().unwrap());
        prop_assert!((&m.ber().unwrap() * &m.ber_star().unwrap()).is_one());
    }

    #[test]
    fn odd_row_scaling_divides(seed in any::<u64>()) {
        let mut s = Sampler::new(seed, 0, 5, SamplingProfile::shared());
        let m = invertible(&mut s, 1, 2).unwrap();
        let lambda = s.sample_even();
        let row = 1 + s.gen_index(2);
        prop_assert_eq!(m.row_parities()[row], Parity::Odd);
        let scaled = m.scale_row(row, &lambda).unwrap().ber().unwrap();
        prop_assert_eq!(&scaled * &lambda, m.ber().unwrap());
    }

    #[test]
    fn flips_are_involutions(n in 4usize..=8, pick in any::<prop::sample::Index>()) {
        let all = enumerate_triangulations(n).unwrap();
        let t = &all[pick.index(all.len())];
        for &d in t.diagonals() {
            let (flipped, quad) = t.flip(d).unwrap();
            prop_assert!(!flipped.contains(d));
            prop_assert_eq!(&flipped.flip(quad.target).unwrap().0, t);
        }
    }

    #[test]
    fn random_walks_stay_consistent(seed in any::<u64>(), n in 4usize..=7) {
        let plane = sample_generic_plane(seed, n).unwrap();
        let start = DecoratedTriangulation::canonical_seed(n).unwrap();
        let moves = random_moves(&start, 60, seed);
        let report = verify_walk(&plane, &start, &moves).unwrap();
        prop_assert!(report.is_consistent(), "{:?}", report.discrepancy);
    }

    #[test]
    fn ptolemy_identities_hold(seed in any::<u64>()) {
        let sampled = sample_quad(seed).unwrap();
        prop_assert!(check_quad(&sampled.quad).unwrap().passed());
    }
}
