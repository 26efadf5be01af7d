use approx::assert_relative_eq;
use greencell::analytics::{gauss_hermite, throughput_integral, void_prob};
use greencell::channel::{AssociationScheme, ChannelModel};
use greencell::geomsim::stats::ks_p_value;
use greencell::geomsim::{
    associate_nearest, conservation_check, estimate_cell_throughput, sample_ppp, simulate_void_fraction,
    voronoi_area_stats, MarkLaw, PointPattern, RunningStats, SimConfig, SimWindow, Stream,
};
use greencell::geomsim::rng::stream_rng;
use proptest::prelude::*;

#[test]
fn ppp_counts_are_poisson() {
    let w = SimWindow::new(5.0).unwrap();
    let mut rng = stream_rng(11, Stream::BaseStations, 0, 0, 0);
    let counts: Vec<f64> = (0..4000).map(|_| sample_ppp(2.0, &w, &mut rng).unwrap().len() as f64).collect();
    let stats: RunningStats = counts.iter().copied().collect();
    assert!((stats.mean() - 50.0).abs() < 4.0 * (50.0f64 / 4000.0).sqrt());
    assert!((stats.variance() / 50.0 - 1.0).abs() < 0.1);
    let pts = sample_ppp(2.0, &w, &mut rng).unwrap();
    assert!(pts.iter().all(|p| (0.0..5.0).contains(&p[0]) && (0.0..5.0).contains(&p[1])));
    assert!(sample_ppp(0.0, &w, &mut rng).unwrap().is_empty());
    assert!(sample_ppp(-1.0, &w, &mut rng).is_err());
}

#[test]
fn patterns_are_reproducible_per_trial() {
    let w = SimWindow::new(3.0).unwrap();
    let a = PointPattern::sample(10.0, 40.0, w, 5, 2).unwrap();
    let b = PointPattern::sample(10.0, 40.0, w, 5, 2).unwrap();
    let c = PointPattern::sample(10.0, 40.0, w, 5, 3).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.bs, c.bs);
}

#[test]
fn nearest_association_wraps_around_the_torus() {
    let w = SimWindow::new(10.0).unwrap();
    let bs = vec![[0.5, 5.0], [5.0, 5.0]];
    let users = vec![[9.8, 5.0], [4.0, 5.0], [2.0, 5.0]];
    let t = associate_nearest(&PointPattern::from_points(w, bs, users)).unwrap();
    assert_eq!(t.serving(), &[0, 1, 0]);
    assert_eq!(t.load(), &[2, 1]);
    assert_eq!(t.void_count(), 0);
    let empty = PointPattern::from_points(w, vec![], vec![[1.0, 1.0]]);
    assert!(associate_nearest(&empty).is_err());
}

#[test]
fn voronoi_areas_follow_known_moments() {
    let w = SimWindow::new(45.0).unwrap();
    let mut rng = stream_rng(3, Stream::BaseStations, 0, 0, 0);
    let bs = sample_ppp(1.0, &w, &mut rng).unwrap();
    let mut probes = stream_rng(3, Stream::Probes, 0, 0, 0);
    let stats = voronoi_area_stats(&bs, &w, 400 * bs.len(), &mut probes).unwrap();
    assert!(!stats.widened);
    assert_relative_eq!(stats.mean, 1.0, max_relative = 0.02);
    // The normalized area variance of a Poisson-Voronoi cell is 0.2802.
    assert!((stats.variance - 0.2802).abs() < 0.03, "variance {}", stats.variance);
    assert!((stats.empty_cell_prob(1.0) - void_prob(1.0, 3.5)).abs() < 0.01);
}

#[test]
fn nearest_void_fraction_matches_gamma_approximation() {
    let ch = ChannelModel::rayleigh(3.76).unwrap();
    let w = SimWindow::new(20.0).unwrap();
    let est = simulate_void_fraction(&ch, &AssociationScheme::NearestBs, 2.0, 4.0, w, 20, 17).unwrap();
    let target = void_prob(2.0, 3.5);
    assert!((est.mean - target).abs() < 0.01 + 3.0 * est.stderr, "{} vs {target}", est.mean);
}

#[test]
fn simulated_cell_throughput_factors_match_their_oracles() {
    let ch = ChannelModel::rayleigh(4.0).unwrap();
    let quad = gauss_hermite(6).unwrap();
    let lambda_b = 1.0;
    let mut cfg = SimConfig::new(SimWindow::for_expected_count(lambda_b, 600.0).unwrap(), 6, 23);
    cfg.users_per_trial = 1500;
    let mut means = Vec::new();
    for v in [1.0, 2.0, 4.0] {
        let sim = estimate_cell_throughput(&cfg, &ch, &AssociationScheme::NearestBs, lambda_b, v * lambda_b).unwrap();
        let rate = throughput_integral(void_prob(v, 3.5), 1.0, &ch, &quad).unwrap() / std::f64::consts::LN_2;
        assert!((sim.rate.mean / rate - 1.0).abs() < 0.05, "v={v}: rate {} vs {rate}", sim.rate.mean);
        // The serving cell of a typical user is area-biased, so E[1/Â] = λ_B.
        assert!((sim.inv_area.mean / lambda_b - 1.0).abs() < 0.03, "v={v}: 1/area {}", sim.inv_area.mean);
        means.push(sim.throughput.mean / v);
    }
    // At fixed λ_U the cell throughput falls as the load grows.
    assert!(means.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn conservation_holds_for_constant_marks() {
    let w = SimWindow::new(20.0).unwrap();
    let r = conservation_check(1.0, &MarkLaw::Constant(2.0), 4.0, w, 2000, 9).unwrap();
    assert!(r.p_value > 1e-3);
    assert_relative_eq!(r.mean_d2, 1.0 / r.predicted_rate, max_relative = 0.1);
    assert!(conservation_check(1.0, &MarkLaw::Constant(1.0), 4.0, w, 100, 9).is_err());
}

#[test]
fn kolmogorov_tail_values() {
    let n = 1_000_000;
    let sn = (n as f64).sqrt();
    assert!((ks_p_value(1.358 / sn, n) - 0.05).abs() < 2e-3);
    assert!((ks_p_value(1.628 / sn, n) - 0.01).abs() < 5e-4);
    assert_eq!(ks_p_value(0.0, n), 1.0);
}

proptest! {
    #[test]
    fn merged_stats_equal_sequential(xs in prop::collection::vec(-1e3f64..1e3, 0..60), ys in prop::collection::vec(-1e3f64..1e3, 0..60)) {
        let a: RunningStats = xs.iter().copied().collect();
        let b: RunningStats = ys.iter().copied().collect();
        let all: RunningStats = xs.iter().chain(&ys).copied().collect();
        let m = a.merge(&b);
        prop_assert_eq!(m.count(), all.count());
        if all.count() > 0 {
            prop_assert!((m.mean() - all.mean()).abs() <= 1e-9 * (1.0 + all.mean().abs()));
        }
        if all.count() > 1 {
            prop_assert!((m.variance() - all.variance()).abs() <= 1e-7 * (1.0 + all.variance()));
        }
    }

    #[test]
    fn torus_distance_is_symmetric_and_bounded(side in 0.5f64..100.0, a in prop::array::uniform2(0.0f64..1.0), b in prop::array::uniform2(0.0f64..1.0)) {
        let w = SimWindow::new(side).unwrap();
        let p = [a[0] * side, a[1] * side];
        let q = [b[0] * side, b[1] * side];
        let d = w.dist2(p, q);
        prop_assert!((d - w.dist2(q, p)).abs() <= 1e-9 * side * side);
        prop_assert!(d <= 0.5 * side * side * (1.0 + 1e-12));
    }
}
