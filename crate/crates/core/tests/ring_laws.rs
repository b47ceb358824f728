mod common;

use kp_core::random;
use kp_core::ring::{normalize, Ring, RingMap};
use proptest::prelude::*;

proptest! {
    #![proptest_config(common::config(100))]

    #[test]
    fn commutative_ring_axioms(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let ring = Ring::new(["x", "y", "z"]);
        let a = random::element(&mut r, &ring, 2);
        let b = random::element(&mut r, &ring, 2);
        let c = random::element(&mut r, &ring, 2);
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &ring.one(), a.clone());
    }

    #[test]
    fn partials_are_derivations(seed in any::<u64>(), i in 0usize..3) {
        let mut r = common::rng(seed);
        let ring = Ring::new(["x", "y", "z"]);
        let a = random::element(&mut r, &ring, 3);
        let b = random::element(&mut r, &ring, 3);
        let lhs = (&a * &b).partial(i).unwrap();
        let rhs = &(&a.partial(i).unwrap() * &b) + &(&a * &b.partial(i).unwrap());
        prop_assert_eq!(lhs, rhs);
        let sum = (&a + &b).partial(i).unwrap();
        prop_assert_eq!(sum, &a.partial(i).unwrap() + &b.partial(i).unwrap());
    }

    #[test]
    fn substitution_is_a_homomorphism(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let src = Ring::new(["x", "y"]);
        let tgt = Ring::new(["u", "v", "w"]);
        let images = vec![random::poly(&mut r, &tgt, 2, 3), random::poly(&mut r, &tgt, 2, 3)];
        let map = RingMap::new(&src, &tgt, images).unwrap();
        let a = random::poly(&mut r, &src, 3, 3);
        let b = random::poly(&mut r, &src, 3, 3);
        let s = |e: &kp_core::ring::RingElem| e.substitute(&map).unwrap();
        prop_assert_eq!(s(&(&a * &b)), &s(&a) * &s(&b));
        prop_assert_eq!(s(&(&a + &b)), &s(&a) + &s(&b));
        prop_assert!(s(&src.one()).is_one());
    }

    #[test]
    fn normalize_is_idempotent(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let ring = Ring::new(["x", "y"]);
        let f = random::nonzero_poly(&mut r, &ring, 2, 2);
        let num = &random::poly(&mut r, &ring, 2, 3) * &f;
        let den = &random::nonzero_poly(&mut r, &ring, 2, 2) * &f;
        let once = normalize(&ring, &num, &den).unwrap();
        let twice = normalize(&ring, &once, &ring.one()).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(once.try_mul(&den).unwrap(), num);
    }

    #[test]
    fn square_roots_square_back(seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let ring = Ring::new(["x", "y"]);
        let a = random::element(&mut r, &ring, 2);
        let f = &a * &a;
        let root = f.sqrt().expect("a square has a root");
        prop_assert_eq!(&root * &root, f);
        prop_assert!(root == a || root == -a);
    }
}
