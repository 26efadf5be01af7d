use std::f64::consts::{LN_10, PI};

use approx::assert_relative_eq;
use greencell::channel::{sample_gain, AssociationScheme, ChannelModel, ShadowConvention, RHO_HAT};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use statrs::function::gamma::gamma;

fn mrp_zeta_oracle(alpha: f64, sigma: f64) -> f64 {
    let d = 2.0 / alpha;
    gamma(1.0 + d) * gamma(1.0 - d) * (d * d * sigma * sigma).exp()
}

#[test]
fn zeta_is_one_for_nearest_association() {
    let ch = ChannelModel::new(3.76, 0.3, 1.2).unwrap();
    assert_eq!(AssociationScheme::NearestBs.zeta(&ch).unwrap(), 1.0);
    assert_eq!(AssociationScheme::NearestBs.rho(&ch).unwrap(), RHO_HAT);
}

#[test]
fn mrp_zeta_matches_gamma_product() {
    for &(alpha, sigma) in &[(3.76, 0.0), (4.0, 0.5), (3.0, 1.8), (2.5, 0.92)] {
        let ch = ChannelModel::new(alpha, 0.0, sigma).unwrap();
        let z = AssociationScheme::MaxReceivedPower.zeta(&ch).unwrap();
        assert_relative_eq!(z, mrp_zeta_oracle(alpha, sigma), max_relative = 1e-12);
        assert_relative_eq!(AssociationScheme::MaxReceivedPower.rho(&ch).unwrap(), 3.5 * z, max_relative = 1e-15);
    }
}

#[test]
fn rayleigh_mrp_zeta_at_alpha_four_is_pi_over_two() {
    let ch = ChannelModel::rayleigh(4.0).unwrap();
    assert_relative_eq!(AssociationScheme::MaxReceivedPower.zeta(&ch).unwrap(), PI / 2.0, max_relative = 1e-13);
}

#[test]
fn sampled_fractional_moments_match_closed_form() {
    let ch = ChannelModel::new(3.76, 0.2, 0.8).unwrap();
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(7);
    let n = 400_000;
    let samples: Vec<f64> = (0..n).map(|_| ch.sample_h(&mut rng)).collect();
    for &t in &[0.5, ch.delta(), 1.0] {
        let mc = samples.iter().map(|h| h.powf(t)).sum::<f64>() / n as f64;
        assert_relative_eq!(mc, ch.frac_moment_h(t).unwrap(), max_relative = 0.01);
    }
    let shadow_mean = (0..n).map(|_| ch.sample_shadow(&mut rng)).sum::<f64>() / n as f64;
    assert_relative_eq!(shadow_mean, (0.2f64 + 0.32).exp(), max_relative = 0.01);
}

#[test]
fn negative_moment_of_order_minus_one_diverges() {
    let ch = ChannelModel::rayleigh(4.0).unwrap();
    assert!(ch.frac_moment_h(-1.0).is_err());
    assert!(ch.frac_moment_h(-0.5).unwrap().is_finite());
}

#[test]
fn weights_follow_the_scheme() {
    let ch = ChannelModel::new(4.0, 0.0, 1.0).unwrap();
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(3);
    for _ in 0..100 {
        let g = sample_gain(&ch, &AssociationScheme::NearestBs, &mut rng);
        assert_relative_eq!(g.w * g.h, 1.0, max_relative = 1e-12);
        let g = sample_gain(&ch, &AssociationScheme::MaxReceivedPower, &mut rng);
        assert_eq!(g.w, 1.0);
    }
}

#[test]
fn invalid_channels_are_rejected() {
    assert!(ChannelModel::new(2.0, 0.0, 0.0).is_err());
    assert!(ChannelModel::new(4.0, f64::NAN, 0.0).is_err());
    assert!(ChannelModel::new(4.0, 0.0, -0.1).is_err());
    assert!("db".parse::<ShadowConvention>().is_err());
}

proptest! {
    #[test]
    fn db_conversion_follows_convention(db in 0.0f64..20.0, alpha in 2.1f64..6.0) {
        let std = ChannelModel::from_db(alpha, db, db, ShadowConvention::StdDb).unwrap();
        prop_assert!((std.sigma_s() - db * LN_10 / 10.0).abs() < 1e-12);
        prop_assert!((std.mu_s() - db * LN_10 / 10.0).abs() < 1e-12);
        let var = ChannelModel::from_db(alpha, 0.0, db, ShadowConvention::VarDb).unwrap();
        prop_assert!((var.sigma_s() - db.sqrt() * LN_10 / 10.0).abs() < 1e-12);
    }

    #[test]
    fn mrp_zeta_at_least_one_and_grows_with_shadowing(alpha in 2.2f64..6.0, s1 in 0.0f64..2.0, ds in 0.01f64..1.0) {
        let lo = AssociationScheme::MaxReceivedPower.zeta(&ChannelModel::new(alpha, 0.0, s1).unwrap()).unwrap();
        let hi = AssociationScheme::MaxReceivedPower.zeta(&ChannelModel::new(alpha, 0.0, s1 + ds).unwrap()).unwrap();
        prop_assert!(lo >= 1.0);
        prop_assert!(hi > lo);
    }

    #[test]
    fn zeta_is_independent_of_mean_shadowing(alpha in 2.2f64..6.0, mu in -3.0f64..3.0, sigma in 0.0f64..2.0) {
        let a = AssociationScheme::MaxReceivedPower.zeta(&ChannelModel::new(alpha, mu, sigma).unwrap()).unwrap();
        let b = AssociationScheme::MaxReceivedPower.zeta(&ChannelModel::new(alpha, 0.0, sigma).unwrap()).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b);
    }
}
