mod common;

use std::sync::Arc;

use kp_core::constructions::{
    check_subalgebra_along, direct_sum, embed_factor, tensor_product, Side, SumSpec, TensorSpec,
};
use kp_core::kp::verify_kp;
use kp_core::morphism::check_kp_morphism;
use kp_core::random;
use proptest::prelude::*;

proptest! {
    #![proptest_config(common::config(100))]

    #[test]
    fn direct_sums_close(seed in any::<u64>(), m1 in 1usize..=3, m2 in 1usize..=3) {
        let mut r = common::rng(seed);
        let k1 = Arc::new(random::kp_algebra(&mut r, "x", m1, 2));
        let k2 = Arc::new(random::kp_algebra(&mut r, "y", m2, 2));
        let sum = direct_sum(&SumSpec::new(k1, k2).unwrap()).unwrap();
        prop_assert!(verify_kp(&sum.algebra).unwrap().is_pass());
        prop_assert_eq!(sum.algebra.dim(), m1 + m2);
        for side in [Side::Left, Side::Right] {
            let e = embed_factor(&sum, side).unwrap();
            prop_assert!(check_kp_morphism(&e).unwrap().is_pass());
            let v = check_subalgebra_along(sum.factor(side), &sum.algebra, sum.embedding_map(side)).unwrap();
            prop_assert!(v.is_pass());
        }
    }

    #[test]
    fn tensor_products_close(seed in any::<u64>(), m1 in 1usize..=2, m2 in 1usize..=2) {
        let mut r = common::rng(seed);
        let k1 = Arc::new(random::square_eta_algebra(&mut r, "x", m1, 2));
        let k2 = Arc::new(random::square_eta_algebra(&mut r, "y", m2, 2));
        let spec = TensorSpec::new(k1.clone(), k2.clone()).unwrap();
        let rho = spec.rho(Side::Left);
        prop_assert_eq!(&(rho * rho), k1.eta().unwrap());
        let t = tensor_product(&spec).unwrap();
        prop_assert!(verify_kp(&t).unwrap().is_pass());
        prop_assert!(t.eta().unwrap().is_one());
        prop_assert_eq!(t.dim(), m1 + m2);
    }
}
