use dmlat::arithmetic::{projective_defect, projective_order, Cx, ExtOrder, Mat3, PiRational};
use dmlat::catalog::{catalog, cone_angles, derive_params, LatticeSignature};
use dmlat::moves::{
    check_braid, compose, inverse, isometry_defect, move_a1, move_p, move_r1, move_r2, Configuration,
};
use dmlat::polyhedron::arg_in;
use dmlat::verification::{euler_characteristic, stabilizer_bfs};
use num_rational::Rational64;
use proptest::prelude::*;

const DEN: i64 = 72;

/// Standard charts on a grid of π/72: θ + φ < π, α ∈ (φ, π), β ∈ (θ, π).
fn standard_config() -> impl Strategy<Value = Configuration> {
    (1..DEN - 1)
        .prop_flat_map(|t| (Just(t), 1..DEN - t))
        .prop_flat_map(|(t, f)| (Just(t), Just(f), f + 1..DEN, t + 1..DEN))
        .prop_map(|(t, f, a, b)| {
            let q = |n| PiRational::new(n, DEN);
            Configuration::new(q(a), q(b), q(t), q(f))
        })
}

fn matrix() -> impl Strategy<Value = Mat3> {
    proptest::collection::vec(-2.0..2.0f64, 18).prop_map(|v| Mat3::from_fn(|i, j| Cx::new(v[2 * (3 * i + j)], v[2 * (3 * i + j) + 1])))
}

fn reflection(n: u32, slot: usize) -> Mat3 {
    let mut m = Mat3::identity();
    m[(slot, slot)] = PiRational::new(2, n as i64).cis();
    m
}

proptest! {
    #[test]
    fn cis_is_additive(a in -50i64..50, b in -50i64..50, d in 1i64..40) {
        let (x, y) = (PiRational::new(a, d), PiRational::new(b, d));
        prop_assert!(((x + y).cis() - x.cis() * y.cis()).norm() < 1e-12);
    }

    #[test]
    fn projective_defect_ignores_scalars(m in matrix(), r in 0.1..10.0f64, t in 0.0..6.3f64) {
        prop_assume!(m.iter().any(|z| z.norm() > 1e-3));
        let lambda = Cx::from_polar(r, t);
        prop_assert!(projective_defect(&m, &(m * lambda)).unwrap() < 1e-9);
    }

    #[test]
    fn reflection_order(n in 1u32..60) {
        prop_assert_eq!(projective_order(&reflection(n, 0), 200, 1e-9).unwrap(), ExtOrder::PositiveInt(n as u64));
    }

    #[test]
    fn bfs_commuting_reflections(a in 1u32..12, b in 1u32..12) {
        let n = stabilizer_bfs(&[reflection(a, 0), reflection(b, 1)], 1000, 1e-7).unwrap();
        prop_assert_eq!(n, (a * b) as usize);
    }

    #[test]
    fn arg_in_contains_its_window(lo in -0.9..0.9f64, w in 0.01..1.0f64, s in 0.0..1.0f64, r in 0.01..10.0f64) {
        let hi = lo + w;
        let z = Cx::from_polar(r, std::f64::consts::PI * (lo + s * w));
        prop_assert!(arg_in(z, lo, hi, 1e-12));
        let outside = Cx::from_polar(r, std::f64::consts::PI * (hi + 0.5 * (2.0 - w)));
        prop_assert!(!arg_in(outside, lo, hi, 1e-9));
    }

    #[test]
    fn r1_and_a1_are_isometries(c in standard_config()) {
        prop_assert!(isometry_defect(&move_r1(&c).unwrap()).unwrap() <= 1e-9);
        prop_assert!(isometry_defect(&move_a1(&c).unwrap()).unwrap() <= 1e-9);
    }

    #[test]
    fn inverse_is_involutive(c in standard_config()) {
        let f = move_r1(&c).unwrap();
        let g = inverse(&inverse(&f).unwrap()).unwrap();
        prop_assert!(g.source == f.source && g.target == f.target);
        prop_assert!(projective_defect(&f.matrix, &g.matrix).unwrap() < 1e-9);
    }

    #[test]
    fn p_is_r1_after_r2(c in standard_config()) {
        let (Ok(r2), Ok(p)) = (move_r2(&c), move_p(&c)) else { return Ok(()) };
        let Ok(r1) = move_r1(&r2.target) else { return Ok(()) };
        let q = compose(&r1, &r2).unwrap();
        prop_assert_eq!(q.target, p.target);
        prop_assert!(projective_defect(&q.matrix, &p.matrix).unwrap() < 1e-9);
    }

    #[test]
    fn braid_holds_where_defined(c in standard_config()) {
        if let Ok(ok) = check_braid(&c) {
            prop_assert!(ok, "braid fails at {}", c);
        }
    }

    #[test]
    fn cone_angles_sum_to_six_pi(p in 2u32..40, k in 2u32..40, q in 2u32..40) {
        if let Ok(a) = cone_angles(LatticeSignature::new(p, k, q)) {
            let total = a.iter().fold(PiRational::zero(), |s, &x| s + x);
            prop_assert_eq!(total, PiRational::new(6, 1));
            prop_assert_eq!(a[1], a[2]);
        }
    }

    #[test]
    fn euler_volume_proportion(s in proptest::sample::select(catalog())) {
        let e = euler_characteristic(s).unwrap();
        prop_assert_eq!(e.volume_coeff, e.chi * Rational64::new(8, 3));
        prop_assert!(e.chi > Rational64::new(0, 1));
        prop_assert_eq!(e.per_dimension.iter().sum::<Rational64>(), e.chi);
    }

    #[test]
    fn params_reproduce_defining_angles(s in proptest::sample::select(catalog())) {
        let dp = derive_params(s).unwrap();
        prop_assert_eq!(dp.theta, PiRational::new(1, s.p as i64));
        prop_assert_eq!(dp.phi, PiRational::new(1, s.k as i64));
        prop_assert_eq!(dp.alpha - PiRational::new(1, 2), PiRational::new(1, s.p_prime as i64));
    }
}
