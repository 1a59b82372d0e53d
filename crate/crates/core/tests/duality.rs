use holodual_core::harmonics::{hermitian_form, kelvin_extend, BallForm};
use holodual_core::pairings::{
    contour_independence, energy_identity_check, paper_pairing_exact, random_admissible, random_holomorphic,
};
use holodual_core::types::rational;
use holodual_core::KelvinFunction;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn pairing_is_radius_independent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_holomorphic(2, 3, &mut rng);
        let v = random_admissible(2, 3, &mut rng);
        let r = contour_independence(&u, &v, &[0.6, 0.8, 0.95], None).unwrap();
        prop_assert!(r.radius_independent);
        prop_assert!(r.exact_deviation <= 1e-10);
    }

    #[test]
    fn pairing_is_sesquilinear(seed in any::<u64>(), a in -5i64..5, b in -5i64..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u1 = random_holomorphic(2, 2, &mut rng);
        let u2 = random_holomorphic(2, 2, &mut rng);
        let v = random_admissible(2, 2, &mut rng);
        let alpha = holodual_core::types::exact_int(a, b);
        let lhs = paper_pairing_exact(&u1.scale(&alpha).add(&u2), &v).unwrap();
        let rhs = paper_pairing_exact(&u1, &v).unwrap().scale(&alpha).add(&paper_pairing_exact(&u2, &v).unwrap());
        prop_assert_eq!(lhs, rhs);
        let lhs = paper_pairing_exact(&u1, &v.scale(&alpha)).unwrap();
        let rhs = paper_pairing_exact(&u1, &v).unwrap().scale(&alpha.conj());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn energy_identity_balances(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_admissible(2, 3, &mut rng);
        let r = energy_identity_check(&v, 1.0, None).unwrap();
        prop_assert!(r.identity_holds);
        prop_assert!(r.energy.re > 0.0);
    }
}

#[test]
fn exterior_form_agrees_with_energy() {
    let one = KelvinFunction::one(2);
    let h = hermitian_form(&one, &one, &rational(1, 1)).unwrap();
    let e = energy_identity_check(&kelvin_extend(&one).unwrap(), 1.0, None).unwrap();
    assert!((h.exterior_f64() - e.energy.re).abs() < 1e-12);
}

#[test]
fn projection_is_idempotent_and_self_adjoint() {
    let form = BallForm::with_degree(2, 3, rational(1, 1)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..3 {
        let w1 = random_holomorphic(2, 2, &mut rng).add(&KelvinFunction::zbar(2, 0));
        let w2 = random_holomorphic(2, 2, &mut rng).add(&KelvinFunction::zbar(2, 1).mul(&KelvinFunction::z(2, 0)));
        let p1 = form.project_holomorphic(&w1).unwrap().function;
        let p2 = form.project_holomorphic(&w2).unwrap().function;
        assert!(form.project_holomorphic(&p1).unwrap().function.equals(&p1));
        let l = form.value(&p1, &w2).unwrap().total;
        let r = form.value(&w1, &p2).unwrap().total;
        assert_eq!(l, r);
    }
}
