use super::*;
use crate::rational::{int, ratio};
use crate::sample::{Sampler, SamplingProfile};

const E: Parity = Parity::Even;
const O: Parity = Parity::Odd;

fn c(n: usize, v: i64) -> GrassmannElement {
    GrassmannElement::from_int(n, v)
}

fn g(n: usize, i: usize) -> GrassmannElement {
    GrassmannElement::generator(n, i).unwrap()
}

fn set(items: &[usize]) -> BTreeSet<usize> {
    items.iter().copied().collect()
}

fn sample_even_matrix(seed: u64, even: usize, odd: usize) -> SuperMatrix {
    let labels = SuperMatrix::standard_labels(even, odd);
    let fresh = 2 * even * odd;
    let mut s = Sampler::auto(seed, fresh, SamplingProfile::default());
    SuperMatrix::sample(
        &mut s,
        labels.clone(),
        labels,
        BTreeSet::new(),
        BTreeSet::new(),
    )
    .unwrap()
}

#[test]
fn identity_has_unit_berezinian() {
    for (r, s) in [(0, 1), (1, 0), (1, 1), (2, 3), (3, 2)] {
        let id = SuperMatrix::identity(SuperMatrix::standard_labels(r, s), 2);
        assert!(id.ber().unwrap().is_one());
        assert!(id.ber_star().unwrap().is_one());
        assert_eq!(id.inverse().unwrap(), id);
    }
}

#[test]
fn one_one_berezinian_matches_hand_expansion() {
    // a, d even with soul; beta, gamma odd
    let n = 4;
    let a = &c(n, 2) + &(&g(n, 3) * &g(n, 4));
    let d = &c(n, -3) + &(&g(n, 1) * &g(n, 4));
    let beta = g(n, 1);
    let gamma = &g(n, 2) + &g(n, 3);
    let m = SuperMatrix::new(
        vec![E, O],
        vec![E, O],
        vec![
            vec![a.clone(), beta.clone()],
            vec![gamma.clone(), d.clone()],
        ],
    )
    .unwrap();
    let dinv = d.invert().unwrap();
    let expected = &(&a * &dinv) - &(&(&beta * &gamma) * &dinv.square());
    assert_eq!(m.ber().unwrap(), expected);
    assert_eq!(m.ber_star().unwrap(), expected.invert().unwrap());
}

#[test]
fn wrong_one_one_example_vanishes() {
    let n = 3;
    let xi = g(n, 1);
    let x = &c(n, 5) + &(&g(n, 2) * &g(n, 3));
    let m = SuperMatrix::with_wrong(
        vec![E, O],
        vec![E, O],
        set(&[0]),
        BTreeSet::new(),
        vec![vec![xi.clone(), x.clone()], vec![xi.clone(), x.clone()]],
    )
    .unwrap();
    assert!(m.ber().unwrap().is_zero());
    // allowed: subtract the correct row from the wrong one
    let reduced = m.add_row_multiple(0, 1, &c(n, -1)).unwrap();
    assert!(reduced.ber().unwrap().is_zero());
    // prohibited: subtract the wrong row from the correct one
    assert_eq!(
        m.add_row_multiple(1, 0, &c(n, -1)),
        Err(MatrixError::ProhibitedDirection {
            target: 1,
            source_index: 0
        })
    );
}

#[test]
fn entry_parity_is_validated() {
    let n = 2;
    let err = SuperMatrix::new(
        vec![E, O],
        vec![E, O],
        vec![vec![c(n, 1), c(n, 1)], vec![c(n, 0), c(n, 1)]],
    );
    assert!(matches!(
        err,
        Err(MatrixError::EntryParity { row: 0, col: 1, .. })
    ));
    let mixed = &c(n, 1) + &g(n, 1);
    let err = SuperMatrix::new(vec![E], vec![E], vec![vec![mixed]]);
    assert!(matches!(err, Err(MatrixError::EntryParity { .. })));
}

#[test]
fn inverse_examples() {
    let n = 2;
    let diag = SuperMatrix::new(
        vec![E, E],
        vec![E, E],
        vec![vec![c(n, 2), c(n, 0)], vec![c(n, 0), c(n, 3)]],
    )
    .unwrap();
    let inv = diag.inverse().unwrap();
    assert_eq!(inv.get(0, 0).body(), ratio(1, 2));
    assert_eq!(inv.get(1, 1).body(), ratio(1, 3));
    assert!(inv.get(0, 1).is_zero());

    let nil = &g(n, 1) * &g(n, 2);
    let upper = SuperMatrix::new(
        vec![E, E],
        vec![E, E],
        vec![vec![c(n, 1), nil.clone()], vec![c(n, 0), c(n, 1)]],
    )
    .unwrap();
    let expected = SuperMatrix::new(
        vec![E, E],
        vec![E, E],
        vec![vec![c(n, 1), -nil], vec![c(n, 0), c(n, 1)]],
    )
    .unwrap();
    assert_eq!(upper.inverse().unwrap(), expected);

    let singular = SuperMatrix::new(
        vec![E, E],
        vec![E, E],
        vec![vec![c(n, 1), c(n, 2)], vec![c(n, 2), c(n, 4)]],
    )
    .unwrap();
    assert_eq!(singular.inverse(), Err(MatrixError::Singular));
}

#[test]
fn random_inverses_are_two_sided() {
    for seed in 0..20 {
        let m = sample_even_matrix(seed, 2, 2);
        let Ok(x) = m.inverse() else { continue };
        let id = SuperMatrix::identity(m.row_parities().to_vec(), m.generators());
        assert_eq!(m.mul(&x).unwrap(), id);
        assert_eq!(x.mul(&m).unwrap(), id);
    }
}

#[test]
fn ber_star_is_reciprocal_and_parity_reversed() {
    for seed in 0..20 {
        let m = sample_even_matrix(100 + seed, 2, 1);
        let (Ok(b), Ok(bs)) = (m.ber(), m.ber_star()) else {
            continue;
        };
        assert!((&b * &bs).is_one());
        assert_eq!(m.parity_reverse().ber().unwrap(), bs);
        assert_eq!(m.parity_reverse().parity_reverse(), m);
    }
}

fn shared_even_matrix(s: &mut Sampler, even: usize, odd: usize) -> SuperMatrix {
    let labels = SuperMatrix::standard_labels(even, odd);
    SuperMatrix::sample(s, labels.clone(), labels, BTreeSet::new(), BTreeSet::new()).unwrap()
}

#[test]
fn berezinian_is_multiplicative() {
    for (r, s) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
        for seed in 0..8 {
            let mut sampler = Sampler::new(1000 + seed, 0, 6, SamplingProfile::shared());
            let m = shared_even_matrix(&mut sampler, r, s);
            let k = shared_even_matrix(&mut sampler, r, s);
            let (Ok(bm), Ok(bk)) = (m.ber(), k.ber()) else {
                continue;
            };
            let prod = m.mul(&k).unwrap();
            assert_eq!(
                prod.ber().unwrap(),
                &bm * &bk,
                "format {r}|{s}, seed {seed}"
            );
        }
    }
}

#[test]
fn standardization_tracks_sign() {
    assert_eq!(permutation_sign(&[0, 1, 2]), 1);
    assert_eq!(permutation_sign(&[1, 0, 2]), -1);
    assert_eq!(permutation_sign(&[1, 2, 0]), 1);
    let m = sample_even_matrix(7, 2, 1);
    // [O, E, E] neither keeps labels nor is standard
    assert!(matches!(
        m.permute_rows(&[2, 0, 1]),
        Err(MatrixError::InvalidPermutation(_))
    ));
    let shuffled = m.reorder_rows(&[2, 0, 1]).reorder_cols(&[2, 0, 1]);
    assert!(!shuffled.is_standard_format());
    let (back, sign) = shuffled.to_standard_format();
    assert_eq!(back, m);
    assert_eq!(sign, 1);
    assert_eq!(shuffled.ber().unwrap(), m.ber().unwrap());
    // a single even-row swap flips the sign of the result
    let swapped = m.reorder_rows(&[1, 0, 2]);
    assert_eq!(swapped.ber().unwrap(), -m.ber().unwrap());
    assert_eq!(swapped.ber_star().unwrap(), -m.ber_star().unwrap());
}

#[test]
fn permutations_within_groups() {
    let m = sample_even_matrix(8, 2, 2);
    let (p, sign) = m.permute_rows(&[1, 0, 2, 3]).unwrap();
    assert_eq!(sign, -1);
    assert_eq!(p.ber().unwrap(), -m.ber().unwrap());
    let (p, sign) = m.permute_cols(&[0, 1, 3, 2]).unwrap();
    assert_eq!(sign, -1);
    assert_eq!(p.ber().unwrap(), -m.ber().unwrap());
    assert!(m.permute_rows(&[0, 0, 1, 2]).is_err());
}

#[test]
fn forgetful_determinant_examples() {
    let n = 3;
    let plain = SuperMatrix::new(
        vec![E, E],
        vec![E, E],
        vec![vec![c(n, 1), c(n, 2)], vec![c(n, 3), c(n, 4)]],
    )
    .unwrap();
    assert_eq!(plain.det_forgetful().unwrap(), c(n, -2));
    let a = c(n, 2);
    let v = &c(n, 7) + &(&g(n, 2) * &g(n, 3));
    let u = g(n, 2);
    let lambda = g(n, 1);
    let m = SuperMatrix::with_wrong(
        vec![E, O],
        vec![E, O],
        BTreeSet::new(),
        set(&[1]),
        vec![vec![a.clone(), u.clone()], vec![lambda.clone(), v.clone()]],
    );
    // u is odd in an even row of a wrong column, so this labelling is invalid
    assert!(m.is_err());
    let m = SuperMatrix::new(
        vec![E, O],
        vec![E, O],
        vec![vec![a.clone(), u.clone()], vec![lambda.clone(), v.clone()]],
    )
    .unwrap();
    assert_eq!(m.det_forgetful().unwrap(), &(&a * &v) - &(&u * &lambda));
    assert_eq!(
        m.det_forgetful_ordered(FactorOrder::Columns).unwrap(),
        &(&a * &v) - &(&lambda * &u)
    );
}

fn sample_wrong(seed: u64, even: usize, odd: usize, row: bool, slot: usize) -> SuperMatrix {
    let labels = SuperMatrix::standard_labels(even, odd);
    let (wr, wc) = if row {
        (set(&[slot]), BTreeSet::new())
    } else {
        (BTreeSet::new(), set(&[slot]))
    };
    let fresh = SuperMatrix::odd_entry_count(&labels, &labels, &wr, &wc);
    let mut s = Sampler::auto(seed, fresh, SamplingProfile::default());
    SuperMatrix::sample(&mut s, labels.clone(), labels, wr, wc).unwrap()
}

#[test]
fn wrong_identity_r_one() {
    for r in 1..=3 {
        for seed in 0..5 {
            for row in [false, true] {
                let a = sample_wrong(seed, r, 1, row, r);
                let check = a.check_wrong_identity_r1().unwrap();
                assert!(check.equal, "r|1 r={r} seed={seed} row={row}");
                assert_eq!(check.lhs.parity(), ParityClass::Odd);
                let b = sample_wrong(seed, 1, r, row, 0);
                let check = b.check_wrong_identity_r1().unwrap();
                assert!(check.equal, "1|r r={r} seed={seed} row={row}");
            }
        }
    }
}

#[test]
fn wrong_identity_rejects_singular_block() {
    let n = 4;
    // A00 = [[1, 2], [2, 4]] has zero determinant
    let labels = vec![E, E, O];
    let entries = vec![
        vec![c(n, 1), c(n, 2), c(n, 3)],
        vec![c(n, 2), c(n, 4), c(n, 1)],
        vec![g(n, 1), g(n, 2), g(n, 3)],
    ];
    let a = SuperMatrix::with_wrong(labels.clone(), labels, BTreeSet::new(), set(&[2]), entries)
        .unwrap();
    assert_eq!(
        a.check_wrong_identity_r1(),
        Err(MatrixError::BlockNotInvertible("A00"))
    );
}

#[test]
fn normalized_ber_star_is_antisymmetric_in_columns() {
    for seed in 0..5 {
        let a = sample_wrong(50 + seed, 3, 1, false, 3);
        let base = a.normalized_ber_star().unwrap();
        for (i, j) in [(0, 1), (1, 2), (0, 3), (2, 3)] {
            let swapped = a.swap_column_entries(i, j).unwrap();
            assert_eq!(
                swapped.normalized_ber_star().unwrap(),
                -base.clone(),
                "swap {i},{j}"
            );
        }
    }
}

#[test]
fn wrong_target_absorbs_correct_rows() {
    for seed in 0..5 {
        let a = sample_wrong(70 + seed, 2, 1, true, 0);
        let before = a.ber().unwrap();
        let mut s = Sampler::new(900 + seed, 0, a.generators(), SamplingProfile::default());
        // source row 1 is even and correct, target row 0 is wrong (odd): factor odd
        let f = GrassmannElement::generator(a.generators(), a.generators())
            .unwrap()
            .scale(&int(2));
        let after = a.add_row_multiple(0, 1, &f).unwrap();
        assert_eq!(after.ber().unwrap(), before);
        // source row 2 is odd and correct: factor even
        let t = s.sample_even();
        let after = a.add_row_multiple(0, 2, &t).unwrap();
        assert_eq!(after.ber().unwrap(), before);
    }
}

#[test]
fn factor_parity_is_checked() {
    let m = sample_even_matrix(3, 1, 1);
    let n = m.generators();
    assert!(matches!(
        m.add_row_multiple(0, 1, &c(n, 1)),
        Err(MatrixError::FactorParity { .. })
    ));
    assert!(m.add_row_multiple(0, 1, &g(n, 1)).is_ok());
}

#[test]
fn blocks_reassemble() {
    let m = sample_even_matrix(9, 2, 1);
    let b = m.blocks();
    assert_eq!(b.a00.rows(), 2);
    assert_eq!(b.a11.cols(), 1);
    assert_eq!(b.reassemble(), m);
}

#[test]
fn json_round_trip() {
    let a = sample_wrong(4, 2, 1, false, 2);
    let text = serde_json::to_string(&a).unwrap();
    let record: SuperMatrixRecord = serde_json::from_str(&text).unwrap();
    assert_eq!(
        SuperMatrix::from_record(&record, a.generators()).unwrap(),
        a
    );
    assert!(text.contains("\"wrong_cols\":[2]"));
}
