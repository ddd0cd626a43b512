use proptest::prelude::*;

use keller_core::casebook::generators as gen;
use keller_core::inversion::formal_inverse;
use keller_core::linalg::{self, determinant, kernel_basis, right_inverse};
use keller_core::pairing::{gz_lift, gz_reduce, pull_back};
use keller_core::polymap::euler_form_check;
use keller_core::waring::{expand_terms, waring_decompose};
use keller_core::{
    default_var_names, parse_polynomial, HomogeneousProfile, Monomial, PolyMap, Polynomial,
    RatMatrix, Scalar, SplitMix64,
};

const ARITY: usize = 3;

fn poly_strategy() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((prop::array::uniform3(0u32..4), -9i64..10, 1i64..5), 0..6).prop_map(|terms| {
        Polynomial::from_terms(
            ARITY,
            terms
                .into_iter()
                .map(|(e, p, q)| (Monomial::new(e.to_vec()), Scalar::frac(p, q))),
        )
    })
}

fn matrix_strategy(rows: usize, cols: usize) -> impl Strategy<Value = RatMatrix> {
    prop::collection::vec(-3i64..4, rows * cols).prop_map(move |v| {
        RatMatrix::from_rows(
            v.chunks(cols)
                .map(|r| r.iter().map(|&x| Scalar::from_int(x)).collect())
                .collect(),
        )
        .unwrap()
    })
}

fn point() -> impl Strategy<Value = Vec<Scalar>> {
    prop::collection::vec((-5i64..6, 1i64..4), ARITY)
        .prop_map(|v| v.into_iter().map(|(p, q)| Scalar::frac(p, q)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(p in poly_strategy(), q in poly_strategy(), r in poly_strategy()) {
        prop_assert_eq!(&p + &q, &q + &p);
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert!((&p - &p).is_zero());
    }

    #[test]
    fn evaluation_is_a_homomorphism(p in poly_strategy(), q in poly_strategy(), a in point()) {
        let pq = (&p * &q).evaluate(&a).unwrap();
        prop_assert_eq!(pq, &p.evaluate(&a).unwrap() * &q.evaluate(&a).unwrap());
    }

    #[test]
    fn substitution_commutes_with_evaluation(
        p in poly_strategy(),
        g in prop::collection::vec(poly_strategy(), ARITY),
        a in point(),
    ) {
        let ga: Vec<Scalar> = g.iter().map(|gi| gi.evaluate(&a).unwrap()).collect();
        prop_assert_eq!(p.substitute(&g).unwrap().evaluate(&a).unwrap(), p.evaluate(&ga).unwrap());
    }

    #[test]
    fn leibniz_rule(p in poly_strategy(), q in poly_strategy(), j in 0..ARITY) {
        let lhs = (&p * &q).differentiate(j).unwrap();
        let rhs = &(&p.differentiate(j).unwrap() * &q) + &(&p * &q.differentiate(j).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn render_parse_round_trip(p in poly_strategy()) {
        let names = default_var_names(ARITY);
        prop_assert_eq!(parse_polynomial(&p.render(&names), &names).unwrap(), p);
    }

    #[test]
    fn homogeneous_parts_sum_back(p in poly_strategy()) {
        let sum = p
            .homogeneous_components()
            .values()
            .fold(Polynomial::zero(ARITY), |acc, c| &acc + c);
        prop_assert_eq!(sum, p);
    }

    #[test]
    fn waring_terms_expand_to_input(p in poly_strategy(), d in 2u32..4) {
        let part = p.homogeneous_components().remove(&d).unwrap_or_else(|| Polynomial::zero(ARITY));
        let terms = waring_decompose(&part).unwrap();
        prop_assert_eq!(expand_terms(&terms, ARITY), part);
    }

    #[test]
    fn determinant_is_multiplicative(a in matrix_strategy(3, 3), b in matrix_strategy(3, 3)) {
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(determinant(&ab).unwrap(), &determinant(&a).unwrap() * &determinant(&b).unwrap());
    }

    #[test]
    fn rank_nullity_and_kernel(m in matrix_strategy(3, 5)) {
        let kb = kernel_basis(&m);
        prop_assert_eq!(linalg::rank(&m) + kb.len(), 5);
        for v in &kb {
            prop_assert!(m.mul_vec(v).unwrap().iter().all(Scalar::is_zero));
        }
    }

    #[test]
    fn right_inverse_when_full_rank(m in matrix_strategy(2, 4)) {
        match right_inverse(&m) {
            Ok(c) => prop_assert_eq!(m.mul(&c).unwrap(), RatMatrix::identity(2)),
            Err(_) => prop_assert!(linalg::rank(&m) < 2),
        }
    }

    #[test]
    fn euler_identity_on_homogeneous_maps(seed in any::<u64>()) {
        let mut rng = SplitMix64::new(seed);
        let n = rng.range_usize(1, 3);
        let d = rng.range_i64(2, 3) as u32;
        let f = gen::random_homogeneous_map(&mut rng, n, d);
        let profile = HomogeneousProfile::infer(&f).unwrap();
        prop_assert!(euler_form_check(&f, &profile).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lift_then_reduce_preserves_invariants(seed in any::<u64>()) {
        let mut rng = SplitMix64::new(seed);
        let r = rng.range_usize(1, 3);
        let f = gen::liftable_map(&mut rng, r.max(2), 3, true);
        let r = f.dim();
        let pair = gz_lift(&f).unwrap();
        let back = gz_reduce(&pair.big, r).unwrap();
        prop_assert_eq!(back.f.jacobian_determinant(), f.jacobian_determinant());
        let d0 = formal_inverse(&f, None).unwrap().inverse_degree();
        let d1 = formal_inverse(&back.f, None).unwrap().inverse_degree();
        prop_assert_eq!(d0, d1);
    }

    /// If `f(λBa) = f(μBa)` then `b = (F(λa) - F(μa))/(μ - λ)` lies in
    /// `ker B` and `F(λ(a+b)) = F(μ(a+b))`.
    #[test]
    fn coincidences_lift_along_the_kernel(seed in any::<u64>()) {
        let mut rng = SplitMix64::new(seed);
        let f = gen::liftable_map(&mut rng, 2, 2, true);
        let pair = gz_lift(&f).unwrap();
        let n = pair.n();
        let lambda = rng.small_rational(4, 3);
        let mu = loop {
            let m = rng.small_rational(4, 3);
            if m != lambda {
                break m;
            }
        };
        // premise holds for a in ker B, and random a otherwise
        let basis = kernel_basis(&pair.b);
        let a: Vec<Scalar> = if rng.chance(1, 2) && !basis.is_empty() {
            let w = rng.small_rational(3, 2);
            basis[0].iter().map(|v| v * &w).collect()
        } else {
            (0..n).map(|_| rng.small_rational(3, 2)).collect()
        };
        let ba = pair.b.mul_vec(&a).unwrap();
        let scaled = |s: &Scalar, v: &[Scalar]| -> Vec<Scalar> { v.iter().map(|x| x * s).collect() };
        let premise = f.evaluate(&scaled(&lambda, &ba)).unwrap() == f.evaluate(&scaled(&mu, &ba)).unwrap();
        if premise {
            let fl = pair.big.evaluate(&scaled(&lambda, &a)).unwrap();
            let fm = pair.big.evaluate(&scaled(&mu, &a)).unwrap();
            let inv = (&mu - &lambda).recip().unwrap();
            let b: Vec<Scalar> = fl.iter().zip(&fm).map(|(x, y)| &(x - y) * &inv).collect();
            prop_assert!(pair.b.mul_vec(&b).unwrap().iter().all(Scalar::is_zero));
            let ab: Vec<Scalar> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            prop_assert_eq!(
                pair.big.evaluate(&scaled(&lambda, &ab)).unwrap(),
                pair.big.evaluate(&scaled(&mu, &ab)).unwrap()
            );
        }
    }

    #[test]
    fn pull_back_of_lift_recovers_f(seed in any::<u64>()) {
        let mut rng = SplitMix64::new(seed);
        let r = rng.range_usize(1, 3);
        let f = gen::liftable_map(&mut rng, r, 3, false);
        let pair = gz_lift(&f).unwrap();
        prop_assert_eq!(PolyMap::new(pull_back(&pair.big, &pair.b, &pair.c).unwrap()).unwrap(), f);
    }
}
