use std::f64::consts::PI;

use dsgeom::ambient::{plane_boost, plane_rotation};
use dsgeom::charts::{beltrami_lift, beltrami_project};
use dsgeom::cli::RunConfig;
use dsgeom::geodesic::{integrate, GeodesicState};
use dsgeom::isometry::{all_generators, killing_residual, PulledBackField};
use dsgeom::tensor::{christoffel, riemann, StaticDeSitter};
use dsgeom::warped::{psi, WarpedMetric};
use dsgeom::{AmbientPoint, Chart, ChartKind, JacobianSource, MinkowskiPoint, StepPolicy};
use proptest::prelude::*;

fn radius() -> impl Strategy<Value = f64> {
    0.5f64..2.0
}

/// Static-chart coordinates scaled by the radius, away from the axis and horizon.
fn static_coords() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (-3.0f64..3.0, 0.05f64..0.95, 0.2f64..PI - 0.2, 0.0f64..2.0 * PI)
}

fn scaled(r: f64, (t, u, th, ph): (f64, f64, f64, f64)) -> [f64; 4] {
    [t * r, u * r, th, ph]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn corrected_static_chart_lands_on_the_quadric(r in radius(), c in static_coords()) {
        let chart = Chart::new(ChartKind::Static47Corrected, r).unwrap();
        let res = chart.constraint_residual(&scaled(r, c)).unwrap();
        prop_assert!(res.abs() <= 1e-12 * r * r, "residual {res}");
    }

    #[test]
    fn printed_static_chart_misses_by_a_fixed_amount(r in radius(), c in static_coords()) {
        let chart = Chart::new(ChartKind::Static47Printed, r).unwrap();
        let p = scaled(r, c);
        let res = chart.constraint_residual(&p).unwrap();
        prop_assert!((res - (2.0 * p[1] * p[1] - 2.0 * r * r)).abs() <= 1e-12 * r * r);
    }

    #[test]
    fn ambient_isometries_preserve_the_quadric(
        r in radius(), c in static_coords(), angle in 0.0f64..2.0 * PI, rapidity in -1.5f64..1.5,
        a in 1usize..5, b in 1usize..5,
    ) {
        prop_assume!(a != b);
        let chart = Chart::new(ChartKind::Static47Corrected, r).unwrap();
        let xi = chart.embed(&scaled(r, c)).unwrap();
        let m = plane_boost(5, 0, a, rapidity) * plane_rotation(5, a, b, angle);
        let moved = &m * xi.to_vector();
        let res = chart.target().residual(moved.as_slice()).unwrap();
        prop_assert!(res.abs() <= 1e-12 * moved.norm_squared().max(r * r));
    }

    #[test]
    fn beltrami_round_trip(r in radius(), x in prop::array::uniform4(-2.0f64..2.0)) {
        let x = MinkowskiPoint(x.map(|v| v * r));
        prop_assume!(1.0 + x.interval() / (r * r) > 0.1);
        let xi = beltrami_lift(&x, r).unwrap();
        prop_assert!(xi.coords()[4] < 0.0);
        let back = beltrami_project(&xi, r).unwrap();
        for m in 0..4 {
            prop_assert!((back.0[m] - x.0[m]).abs() <= 1e-12 * r.max(1.0));
        }
    }

    #[test]
    fn projection_of_lifted_ambient_points(r in radius(), c in static_coords()) {
        // Any lower-hemisphere point projects and lifts back to itself.
        let chart = Chart::new(ChartKind::Static47Corrected, r).unwrap();
        let xi = chart.embed(&scaled(r, c)).unwrap();
        let lower = AmbientPoint::new(xi.coords().iter().enumerate()
            .map(|(i, v)| if i == 4 { -v.abs() } else { *v }).collect());
        prop_assume!(lower.coords()[4].abs() > 1e-3 * r);
        let back = beltrami_lift(&beltrami_project(&lower, r).unwrap(), r).unwrap();
        for (a, b) in back.coords().iter().zip(lower.coords()) {
            prop_assert!((a - b).abs() <= 1e-9 * r.max(1.0));
        }
    }

    #[test]
    fn pullback_metrics_are_symmetric(r in radius(), seed in any::<u64>()) {
        let mut rng = dsgeom::sampling::rng(seed);
        for chart in Chart::registry(r).unwrap() {
            let p = dsgeom::sampling::chart_point(&mut rng, &chart);
            let g = chart.pullback_metric(&p, JacobianSource::Analytic).unwrap();
            prop_assert!((&g - g.transpose()).amax() <= 1e-14 * g.amax().max(1.0), "{}", chart.name());
        }
    }

    #[test]
    fn christoffel_symbols_are_symmetric(r in radius(), c in static_coords()) {
        let g = StaticDeSitter::new(r);
        let gamma = christoffel(&g, &scaled(r, c), &StepPolicy::default()).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                for d in 0..4 {
                    prop_assert_eq!(gamma.get(a, b, d), gamma.get(a, d, b));
                }
            }
        }
    }

    #[test]
    fn sectional_curvature_is_constant(r in radius(), c in static_coords(),
        u in prop::array::uniform4(-1.0f64..1.0), v in prop::array::uniform4(-1.0f64..1.0)) {
        let g = StaticDeSitter::new(r);
        let curv = riemann(&g, &scaled(r, c), &StepPolicy::default()).unwrap();
        let u = nalgebra::DVector::from_column_slice(&u);
        let v = nalgebra::DVector::from_column_slice(&v);
        let m = curv.metric.clone();
        let gram = (u.dot(&(&m * &u)) * v.dot(&(&m * &v)) - u.dot(&(&m * &v)).powi(2)).abs();
        prop_assume!(gram > 1e-2 * (u.norm() * v.norm()).powi(2));
        let k = curv.sectional(&u, &v).unwrap();
        prop_assert!((k * r * r + 1.0).abs() <= 1e-4, "K R^2 = {}", k * r * r);
    }

    #[test]
    fn pulled_back_generators_are_killing(r in radius(), c in static_coords(), which in 0usize..10) {
        let chart = Chart::new(ChartKind::Static47Corrected, r).unwrap();
        let gen = all_generators(chart.target()).swap_remove(which);
        let field = PulledBackField::new(chart, gen);
        let res = killing_residual(&StaticDeSitter::new(r), &field, &scaled(r, c), &StepPolicy::default()).unwrap();
        prop_assert!(res.amax() <= 1e-6, "{} residual {}", field.label(), res.amax());
    }

    #[test]
    fn warp_function_is_continuous_in_k(r in 0.1f64..3.0, k in 1e-12f64..1e-9) {
        let at0 = psi(0.0, r).unwrap();
        prop_assert!((psi(k, r).unwrap() - at0).abs() <= 1e-8);
        prop_assert!((psi(-k, r).unwrap() - at0).abs() <= 1e-8);
    }

    #[test]
    fn config_round_trips_through_toml(r in 0.1f64..10.0, seed in any::<u64>(), samples in 1usize..500) {
        let mut cfg = RunConfig::default();
        cfg.general.radius = r;
        cfg.general.seed = seed;
        cfg.general.samples = samples;
        let back = RunConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn radial_geodesics_stay_radial(k in prop::sample::select(vec![-1.0, 0.0, 1.0]), r0 in 0.3f64..1.0, vr in 0.1f64..0.5) {
        let g = WarpedMetric::new(4, k).unwrap();
        let x = g.point_at(r0);
        let mut v = vec![0.0; 4];
        v[0] = vr;
        let traj = integrate(&g, &GeodesicState::new(x, v), 1.0, 1e-3, &StepPolicy::default()).unwrap();
        for s in &traj.samples {
            prop_assert!(s.v[1..].iter().all(|w| w.abs() <= 1e-10));
        }
    }
}
