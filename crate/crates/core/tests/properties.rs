use proptest::prelude::*;

use trackside::{
    capacity_at_position, capacity_at_time, closed_form_half_integral_alpha2, dominant_ratio, half_integral,
    pairwise_interval, ChannelParams, SolverSettings, TrackPlan, TrainProfile,
};

fn params() -> impl Strategy<Value = ChannelParams> {
    (0.01f64..1e3, 0.1f64..50.0, 1.1f64..6.0).prop_map(|(rho, d0, alpha)| ChannelParams::new(rho, d0, alpha).unwrap())
}

proptest! {
    #[test]
    fn capacity_is_even(p in params(), x in -1e4f64..1e4) {
        prop_assert_eq!(capacity_at_position(x, &p), capacity_at_position(-x, &p));
    }

    #[test]
    fn capacity_decays_with_distance(p in params(), x1 in 0.0f64..100.0, gap in 1e-3f64..100.0) {
        let x2 = x1 + gap;
        prop_assert!(capacity_at_position(x1, &p) > capacity_at_position(x2, &p));
        prop_assert!(capacity_at_position(x2, &p) > 0.0);
    }

    #[test]
    fn capacity_time_matches_position(p in params(), t in -100.0f64..100.0, v in 0.01f64..300.0) {
        let train = TrainProfile::new(v).unwrap();
        let a = capacity_at_time(t, &p, train);
        let b = capacity_at_position(v * t, &p);
        prop_assert!((a - b).abs() <= 4.0 * f64::EPSILON * b.abs());
    }

    #[test]
    fn capacity_increases_with_rho(p in params(), x in 0.0f64..100.0, factor in 1.001f64..100.0) {
        let q = p.with_rho(p.rho() * factor).unwrap();
        prop_assert!(capacity_at_position(x, &q) > capacity_at_position(x, &p));
    }

    #[test]
    fn pairwise_is_mean(a in 0.0f64..1e4, b in 0.0f64..1e4) {
        let d = pairwise_interval(a, b).unwrap();
        prop_assert_eq!(d, pairwise_interval(b, a).unwrap());
        prop_assert!(d >= a.min(b) && d <= a.max(b));
    }

    #[test]
    fn homogeneous_plans_tile_the_track(length in 0.5f64..1e4, d_s in 0.1f64..500.0) {
        let plan = TrackPlan::homogeneous(length, d_s).unwrap();
        plan.check_tiling().unwrap();
        prop_assert_eq!(plan.stations[0].region_start, 0.0);
        prop_assert_eq!(plan.stations.last().unwrap().region_end, length);
        for w in plan.stations.windows(2) {
            prop_assert_eq!(w[0].region_end, w[1].region_start);
            prop_assert!(w[0].position < w[1].position);
        }
        for st in &plan.stations {
            prop_assert!(st.region_end - st.region_start <= d_s * (1.0 + 1e-9));
            prop_assert!((st.region_start - (st.position - st.service_distance / 2.0)).abs() <= 1e-9 * length);
        }
        prop_assert_eq!(plan.intervals.len(), plan.stations.len() - 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn quadrature_matches_closed_form(rho in 0.1f64..500.0, d0 in 0.1f64..50.0, length in 0.0f64..1e3) {
        let p = ChannelParams::new(rho, d0, 2.0).unwrap();
        let s = SolverSettings::default();
        let q = half_integral(length, &p, &s).unwrap();
        let c = closed_form_half_integral_alpha2(length, &p).unwrap();
        prop_assert!((q - c).abs() <= 1e-8 * c.abs() + 1e-12, "{} vs {}", q, c);
    }

    #[test]
    fn dominant_ratio_is_monotone_and_bounded(p in params(), a in 0.0f64..200.0, gap in 1e-2f64..200.0) {
        let s = SolverSettings::default();
        let lo = dominant_ratio(a, &p, &s).unwrap();
        let hi = dominant_ratio(a + gap, &p, &s).unwrap();
        prop_assert!((0.0..1.0).contains(&lo));
        prop_assert!(hi > lo);
        prop_assert!(hi <= 1.0);
    }
}
