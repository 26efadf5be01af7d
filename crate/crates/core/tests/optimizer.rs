use approx::assert_relative_eq;
use greencell::analytics::gauss_hermite;
use greencell::channel::{AssociationScheme, ChannelModel};
use greencell::optimizer::{
    calibrate_beta, find_positive_fixed_point, iterate_fixed_point, map_l, map_lc, maximize_direct, solve_fixed_point,
    sweep_optimal_intensity, FixedPointKind, FixedPointProblem, GreenMapParams, LoadContext, DIRECT_BRACKET,
    FIXED_POINT_MAX_ITER, FIXED_POINT_TOL, LOAD_BRACKET,
};
use greencell::powergreen::PowerModel;
use greencell::preset;
use greencell::Error;
use proptest::prelude::*;

/// Argmax over a dense log grid, the brute-force reference for golden section.
fn grid_argmax<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> f64 {
    let r = (hi / lo).powf(1.0 / (n - 1) as f64);
    (0..n)
        .map(|i| lo * r.powi(i as i32))
        .max_by(|a, b| f(*a).total_cmp(&f(*b)))
        .unwrap()
}

#[test]
fn fixed_point_of_square_root_map() {
    let fp = find_positive_fixed_point(|v| Ok(2.0 * v.sqrt()), LOAD_BRACKET, 1e-13, 500).unwrap();
    assert_relative_eq!(fp.v_star, 4.0, max_relative = 1e-12);
    assert!(fp.residual < 1e-13);
}

#[test]
fn plain_iteration_finds_dottie_number() {
    let fp = iterate_fixed_point(|v| Ok(v.cos()), 1.0, 1e-14, 1000).unwrap();
    assert_relative_eq!(fp.v_star, 0.739_085_133_215_160_6, max_relative = 1e-13);
}

#[test]
fn map_without_crossing_has_no_fixed_point() {
    let r = find_positive_fixed_point(|v| Ok(v + 1.0), LOAD_BRACKET, 1e-12, 100);
    assert!(matches!(r, Err(Error::NoInteriorOptimum { .. })));
}

#[test]
fn golden_section_finds_known_maximum() {
    let m = maximize_direct(|v| Ok(v * (-v / 2.0).exp()), DIRECT_BRACKET, 1e-9).unwrap();
    assert_relative_eq!(m.v_opt, 2.0, max_relative = 1e-6);
    assert_relative_eq!(m.value, 2.0 * (-1f64).exp(), max_relative = 1e-12);
}

#[test]
fn golden_section_rejects_monotone_and_bimodal_objectives() {
    assert!(maximize_direct(Ok, DIRECT_BRACKET, 1e-9).is_err());
    let bimodal = |v: f64| Ok((-(v.ln() - 0.0).powi(2) * 8.0).exp() + (-(v.ln() - 3.0).powi(2) * 8.0).exp());
    assert!(maximize_direct(bimodal, DIRECT_BRACKET, 1e-9).is_err());
}

#[test]
fn direct_argmax_matches_grid_search_on_throughput() {
    let ctx = preset::canonical_context().unwrap();
    for kind in FixedPointKind::ALL {
        let m = maximize_direct(|v| ctx.objective(kind, v), DIRECT_BRACKET, 1e-9).unwrap();
        let brute = grid_argmax(|v| ctx.objective(kind, v).unwrap(), 0.01, 100.0, 4001);
        assert_relative_eq!(m.v_opt, brute, max_relative = 5e-3);
    }
}

#[test]
fn solved_fixed_points_satisfy_their_maps() {
    let ctx = preset::canonical_context().unwrap();
    for (kind, beta) in [
        (FixedPointKind::UserThroughput, 2.0),
        (FixedPointKind::GreenCell, 3.0),
        (FixedPointKind::GreenUser, 4.0),
    ] {
        let p = FixedPointProblem::new(kind, beta, ctx.clone()).unwrap();
        let sol = solve_fixed_point(&p, FIXED_POINT_TOL, FIXED_POINT_MAX_ITER).unwrap();
        assert!((p.map(sol.v_star).unwrap() - sol.v_star).abs() < 1e-10, "{kind:?}");
        assert_relative_eq!(sol.lambda_b_star * sol.v_star, ctx.lambda_u(), max_relative = 1e-12);
    }
}

#[test]
fn calibration_aligns_user_throughput_fixed_point() {
    let ctx = preset::canonical_context().unwrap();
    let cal = calibrate_beta(FixedPointKind::UserThroughput, &ctx, (1.0, 20.0)).unwrap();
    assert!(cal.rel_gap < 1e-6);
    assert!(cal.warning.is_none());
    let p = FixedPointProblem::new(FixedPointKind::UserThroughput, cal.beta, ctx).unwrap();
    let sol = solve_fixed_point(&p, FIXED_POINT_TOL, FIXED_POINT_MAX_ITER).unwrap();
    assert_relative_eq!(sol.v_star, cal.v_direct, max_relative = 1e-6);
}

#[test]
fn green_maps_need_a_power_gap() {
    let params = GreenMapParams {
        zeta: 1.0,
        rho: 3.5,
        alpha: 4.0,
        beta: 2.0,
        lambda_u: 370.0,
        power: PowerModel::new(5.0, 5.0, 1.0, 1.0).unwrap(),
    };
    assert!(matches!(map_lc(1.0, &params), Err(Error::NoGreenGap { .. })));
}

#[test]
fn invalid_problems_are_rejected() {
    let ctx = preset::canonical_context().unwrap();
    assert!(FixedPointProblem::new(FixedPointKind::UserThroughput, 1.0, ctx.clone()).is_err());
    assert!(calibrate_beta(FixedPointKind::UserThroughput, &ctx, (0.5, 4.0)).is_err());
    let ch = ChannelModel::rayleigh(4.0).unwrap();
    let quad = gauss_hermite(3).unwrap();
    let power = preset::power_model().unwrap();
    assert!(LoadContext::new(ch, AssociationScheme::NearestBs, 370.0, power, &quad).is_err());
    assert!("green".parse::<FixedPointKind>().is_err());
    assert_eq!("green_user".parse::<FixedPointKind>().unwrap(), FixedPointKind::GreenUser);
}

#[test]
fn sweep_reports_every_intensity() {
    let ctx = preset::canonical_context().unwrap();
    let rows = sweep_optimal_intensity(&[100.0, 300.0, 600.0], FixedPointKind::GreenCell, &ctx, 3.0).unwrap();
    assert_eq!(rows.len(), 3);
    let lb: Vec<f64> = rows.iter().map(|r| r.outcome.as_ref().unwrap().lambda_b_star).collect();
    assert!(lb.windows(2).all(|w| w[1] > w[0]));
    assert!(sweep_optimal_intensity(&[], FixedPointKind::GreenCell, &ctx, 3.0).is_err());
}

proptest! {
    #[test]
    fn user_map_is_an_increasing_fraction(v in 1e-4f64..50.0, dv in 1e-3f64..5.0, rho in 1.0f64..40.0, beta in 1.01f64..20.0) {
        let a = map_l(v, rho, beta);
        prop_assert!(a > 0.0 && a <= 1.0);
        prop_assert!(map_l(v + dv, rho, beta) >= a);
    }

    #[test]
    fn user_fixed_point_lies_in_unit_interval(rho in 1.5f64..40.0, beta in 1.01f64..20.0) {
        let fp = find_positive_fixed_point(|v| Ok(map_l(v, rho, beta)), LOAD_BRACKET, 1e-12, 500).unwrap();
        prop_assert!(fp.v_star > 0.0 && fp.v_star < 1.0);
        prop_assert!((map_l(fp.v_star, rho, beta) - fp.v_star).abs() < 1e-10);
    }
}
