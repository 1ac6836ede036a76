use ndarray::Array2;
use proptest::prelude::*;
use ternlab::dbar::cauchy_transform;
use ternlab::ergodic::{Scheme, TranslateSampler};
use ternlab::field::ComplexField;
use ternlab::geometry::{EpsilonSpec, PointClass, Square, TernaryParams};
use ternlab::growth::{levsasha_select, GoodnessField};
use ternlab::nevanlinna::{chordal, winding_number, Circle, ExtComplex, MeromorphicHandle, Weierstrass};
use ternlab::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn beta_is_the_mean_over_subsquares(bits in proptest::collection::vec(any::<bool>(), 64), k in prop::sample::select(vec![2usize, 4])) {
        let flags = Array2::from_shape_vec((8, 8), bits).unwrap();
        let g = GoodnessField::from_flags(0.5, flags).unwrap();
        let sub = 8 / k;
        let mean: f64 = (0..k * k).map(|i| g.beta_sub((i % k) * sub, (i / k) * sub, sub)).sum::<f64>() / (k * k) as f64;
        prop_assert!((mean - g.beta()).abs() < 1e-15);
    }

    #[test]
    fn selection_keeps_a_third_of_beta(seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let p: f64 = rng.random_range(0.4..0.9);
        let flags = Array2::from_shape_fn((256, 256), |_| rng.random_bool(p));
        let g = GoodnessField::from_flags(0.5, flags).unwrap();
        let chain = levsasha_select(&g, None, None).unwrap();
        prop_assert!(chain.steps.iter().all(|s| (1..=3).contains(&s.case)));
        prop_assert!(chain.beta_third_ok);
    }

    #[test]
    fn classify_round_trips_to_copy_center(x in -13.0f64..13.0, y in -13.0f64..13.0) {
        let p = TernaryParams::build(EpsilonSpec::Geometric, 2).unwrap();
        let z = c(x, y);
        if let PointClass::InCopy(idx) = p.classify_point(z, 2).unwrap() {
            let center = p.translate_center(&idx).unwrap();
            prop_assert!(Square::new(-center, p.a(idx.k)).contains(z));
        }
    }

    #[test]
    fn translation_bookkeeping(zx in -3.0f64..3.0, zy in -3.0f64..3.0) {
        // Fraction of w in S_2 with w in Q, against w + zeta in Q.
        let p = TernaryParams::build(EpsilonSpec::Geometric, 2).unwrap();
        let s = p.s(2);
        let q = Square::new(c(2.0, -1.0), 4.0);
        let sampler = TranslateSampler::new(s, Scheme::Grid { per_side: 400 });
        let zeta = c(zx, zy);
        let a = sampler.fraction(|w| q.contains(w)).unwrap().fraction;
        let b = sampler.fraction(|w| q.contains(w + zeta)).unwrap().fraction;
        let bound = 2.0 * q.side() * (zx.abs() + zy.abs()) / s.area() + 4.0 * q.side() / (400.0 * s.side());
        prop_assert!((a - b).abs() <= bound, "{} > {bound}", (a - b).abs());
    }

    #[test]
    fn powers_wind_k_times(k in 1u32..6, r in 0.0f64..3.0, t in 0.0f64..6.3) {
        prop_assume!((r - 1.0).abs() > 0.05);
        let zeta = Complex64::from_polar(r, t);
        let rep = winding_number(&MeromorphicHandle::power(k), Circle::new(c(0.0, 0.0), 1.0), zeta).unwrap();
        let expected = if r < 1.0 { k as i64 } else { 0 };
        prop_assert_eq!(rep.index, expected);
        prop_assert_eq!(rep.doubled_index, expected);
        prop_assert!(rep.rounding_distance < 0.1);
    }

    #[test]
    fn wp_even_bitwise(x in -3.0f64..3.0, y in -3.0f64..3.0) {
        prop_assume!(x.abs() + y.abs() > 1e-3);
        let wp = Weierstrass::square(20.0);
        prop_assert_eq!(wp.value_direct(c(x, y)), wp.value_direct(c(-x, -y)));
    }

    #[test]
    fn chordal_is_a_metric(a in (-5.0f64..5.0, -5.0f64..5.0), b in (-5.0f64..5.0, -5.0f64..5.0), inf in any::<bool>()) {
        let pa = ExtComplex::Finite(c(a.0, a.1));
        let pb = ExtComplex::Finite(c(b.0, b.1));
        let pc = if inf { ExtComplex::Infinity } else { ExtComplex::Finite(c(b.1, a.0)) };
        prop_assert!((chordal(pa, pb) - chordal(pb, pa)).abs() < 1e-15);
        prop_assert!(chordal(pa, pb) <= chordal(pa, pc) + chordal(pc, pb) + 1e-12);
        prop_assert!(chordal(pa, pb) <= 1.0 + 1e-15);
    }

    #[test]
    fn cauchy_transform_is_linear(alpha in (-2.0f64..2.0, -2.0f64..2.0), beta in (-2.0f64..2.0, -2.0f64..2.0)) {
        let sq = Square::centered(1.0);
        let f = ComplexField::sample(&sq, 32, |z| if z.norm() < 0.6 { z.conj() } else { c(0.0, 0.0) });
        let g = ComplexField::sample(&sq, 32, |z| c((3.0 * z.re).cos() * (1.0 - z.norm_sqr()).max(0.0), z.im));
        let (a, b) = (c(alpha.0, alpha.1), c(beta.0, beta.1));
        let mut combo = f.clone();
        combo.values = &f.values * a + &g.values * b;
        let lhs = cauchy_transform(&combo);
        let (cf, cg) = (cauchy_transform(&f), cauchy_transform(&g));
        let err = lhs.values.iter().zip(cf.values.iter().zip(cg.values.iter()))
            .map(|(l, (x, y))| (l - (a * x + b * y)).norm())
            .fold(0.0, f64::max);
        prop_assert!(err < 1e-12, "{err}");
    }
}

#[test]
fn identity_spherical_area_is_round() {
    let p = ternlab::nevanlinna::tfr_profile(
        &MeromorphicHandle::identity(),
        8.0,
        &ternlab::nevanlinna::ProfileOptions::default(),
    )
    .unwrap();
    for (r, a) in p.radii.iter().zip(&p.a) {
        assert!((a - r * r / (1.0 + r * r)).abs() < 1e-9);
    }
}
