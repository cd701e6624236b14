//! Randomised invariants: parsing, tree geometry, polynomial arithmetic,
//! stochasticity and the rotation symmetry of the coordinate system.

use num::complex::Complex64;
use num::{BigRational, One, Zero};
use proptest::prelude::*;

use treewalk::cli::commands::{parse_z, Analysis};
use treewalk::cli::config::parse_rational;
use treewalk::cli::stock;
use treewalk::numeric::{rat, RatPoly};
use treewalk::tree_model::Vertex;

fn word() -> impl Strategy<Value = String> {
    proptest::collection::vec(prop_oneof![Just('a'), Just('b'), Just('c')], 0..9).prop_map(|v| v.into_iter().collect())
}

fn poly() -> impl Strategy<Value = RatPoly> {
    proptest::collection::vec((-9i64..10, 1i64..6), 0..6)
        .prop_map(|c| RatPoly::new(c.into_iter().map(|(n, d)| rat(n, d)).collect()))
}

proptest! {
    #[test]
    fn complex_literals_round_trip(re in -1e3f64..1e3, im in -1e3f64..1e3) {
        let z = parse_z(&format!("{re}{im:+}i"), None).unwrap();
        prop_assert_eq!(z, Complex64::new(re, im));
    }

    #[test]
    fn radius_multiples_scale(t in 0.0f64..1.0, r in 0.5f64..2.0) {
        let z = parse_z(&format!("{t}R"), Some(r)).unwrap();
        prop_assert!((z - Complex64::new(t * r, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rationals_parse_exactly(n in -1000i64..1000, d in 1i64..1000) {
        prop_assert_eq!(parse_rational(&format!("{n}/{d}")).unwrap(), rat(n, d));
    }

    #[test]
    fn free_product_is_a_group_and_a_tree(x in word(), y in word(), w in word()) {
        let cfg = stock("srw_free").unwrap();
        let t = cfg.model.tree();
        let fp = t.as_free_product().unwrap();
        let (x, y, w) = (t.reduce(&x).unwrap(), t.reduce(&y).unwrap(), t.reduce(&w).unwrap());
        prop_assert_eq!(fp.mul(&x, &fp.inverse(&x)), Vertex::root());
        prop_assert_eq!(t.distance(&x, &y), t.distance(&y, &x));
        prop_assert!(t.distance(&x, &w) <= t.distance(&x, &y) + t.distance(&y, &w));
        // Left multiplication is an isometry.
        prop_assert_eq!(t.distance(&fp.mul(&w, &x), &fp.mul(&w, &y)), t.distance(&x, &y));
        let g = t.geodesic(&x, &y);
        prop_assert_eq!(g.len(), t.distance(&x, &y) + 1);
        prop_assert!(g.windows(2).all(|p| t.distance(&p[0], &p[1]) == 1));
    }

    #[test]
    fn polynomial_division(a in poly(), d in poly()) {
        prop_assume!(!d.is_zero());
        let (q, r) = a.divrem(&d);
        prop_assert_eq!(q.mul(&d).add(&r), a.clone());
        prop_assert!(r.is_zero() || r.degree() < d.degree());
        let g = a.gcd(&d);
        prop_assert!(a.divrem(&g).1.is_zero() && d.divrem(&g).1.is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn n_step_distributions_are_stochastic(x in word(), n in 0usize..5) {
        let cfg = stock("mu").unwrap();
        let m = &cfg.model;
        let x = m.tree().reduce(&x).unwrap();
        let total = m
            .enumerate_paths(&x, n)
            .into_iter()
            .fold(BigRational::zero(), |acc, (_, w)| acc + w);
        prop_assert_eq!(total, BigRational::one());
    }

    #[test]
    fn rotation_maps_solutions_to_solutions(t in 0.05f64..0.9, theta in 0.0f64..std::f64::consts::TAU) {
        let a = Analysis::owned(stock("nu").unwrap()).unwrap();
        let r = a.singular().unwrap().r;
        let psi = a.sys.psi();
        let d = a.cfg.model.d();
        let zeta = Complex64::from_polar(1.0, std::f64::consts::TAU / d as f64);
        let z = Complex64::from_polar(t * r, theta);
        let v = treewalk::curve_solver::newton_eval(psi, z, None, 1e-14).unwrap();
        let w = treewalk::curve_solver::newton_eval(psi, zeta * z, None, 1e-14).unwrap();
        for (x, y) in w.iter().zip(&a.sys.apply_a(&v)) {
            prop_assert!((x - y).norm() < 1e-11);
        }
    }
}
