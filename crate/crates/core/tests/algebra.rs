use proptest::prelude::*;
use superpluecker::{GrassmannElement, Rational};

const GENS: usize = 5;

fn element(
    max_terms: usize,
    mask_filter: fn(u32) -> bool,
) -> impl Strategy<Value = GrassmannElement> {
    prop::collection::vec((0u32..(1 << GENS), -4i64..=4, 1i64..=3), 0..=max_terms).prop_map(
        move |terms| {
            terms.into_iter().filter(|(m, ..)| mask_filter(*m)).fold(
                GrassmannElement::zero(GENS),
                |acc, (mask, p, q)| {
                    let gens: Vec<usize> = (0..GENS)
                        .filter(|i| mask >> i & 1 == 1)
                        .map(|i| i + 1)
                        .collect();
                    let coeff = Rational::new(p.into(), q.into());
                    &acc + &GrassmannElement::monomial(GENS, &gens, coeff).unwrap()
                },
            )
        },
    )
}

fn any_element() -> impl Strategy<Value = GrassmannElement> {
    element(6, |_| true)
}

fn even_element() -> impl Strategy<Value = GrassmannElement> {
    element(6, |m| m.count_ones() % 2 == 0)
}

fn odd_element() -> impl Strategy<Value = GrassmannElement> {
    element(6, |m| m.count_ones() % 2 == 1)
}

proptest! {
    #[test]
    fn ring_axioms(a in any_element(), b in any_element(), c in any_element()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!(&a * &GrassmannElement::one(GENS), a);
    }

    #[test]
    fn even_elements_are_central(e in even_element(), x in any_element()) {
        prop_assert_eq!(&e * &x, &x * &e);
    }

    #[test]
    fn odd_elements_anticommute(x in odd_element(), y in odd_element()) {
        prop_assert_eq!(&x * &y, -(&y * &x));
        prop_assert!(x.square().is_zero());
    }

    #[test]
    fn inverse_of_unit(e in even_element(), body in 1i64..=7) {
        let u = &e.soul() + &GrassmannElement::from_int(GENS, body);
        prop_assert!((&u * &u.invert().unwrap()).is_one());
    }

    #[test]
    fn square_root_squares_back(e in even_element(), k in 1i64..=5) {
        let u = &e.soul() + &GrassmannElement::from_int(GENS, k * k);
        prop_assert_eq!(u.sqrt().unwrap().square(), u);
    }

    #[test]
    fn souls_are_nilpotent(x in any_element()) {
        let s = x.soul();
        prop_assert!(s.pow(GENS as u32 + 1).is_zero());
    }
}

#[test]
fn odd_generators_square_to_zero() {
    let t = GrassmannElement::generator(3, 2).unwrap();
    assert!(t.square().is_zero());
    assert!(GrassmannElement::from_int(3, 0).invert().is_err());
}
