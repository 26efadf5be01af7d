use std::f64::consts::PI;

use approx::assert_relative_eq;
use greencell::analytics::{avg_cell_throughput, avg_user_throughput, gauss_hermite, NetworkScenario, VoidModel};
use greencell::channel::{AssociationScheme, ChannelModel};
use greencell::powergreen::{
    avg_power, dbm_to_watts, green_cell_throughput, green_user_throughput, transmit_power, LinkBudget, PowerModel,
};
use proptest::prelude::*;
use statrs::function::gamma::gamma;

fn model() -> PowerModel {
    PowerModel::new(6.8, 4.3, 4.0, 1e-3).unwrap()
}

#[test]
fn dbm_conversion() {
    assert_relative_eq!(dbm_to_watts(30.0), 1.0, max_relative = 1e-15);
    assert_relative_eq!(dbm_to_watts(0.0), 1e-3, max_relative = 1e-15);
    assert_relative_eq!(dbm_to_watts(-106.0), 10f64.powf(-13.6), max_relative = 1e-12);
}

#[test]
fn transmit_power_closed_form() {
    // λ_B = 1e6/π per km² is one BS per π m², so πλζ = ζ in m⁻².
    let lb = 1e6 / PI;
    assert_relative_eq!(transmit_power(lb, 1.0, 4.0, 2.0).unwrap(), 2.0 * gamma(3.0), max_relative = 1e-12);
    assert_relative_eq!(
        transmit_power(lb, 2.0, 3.0, 1.0).unwrap(),
        gamma(2.5) / 2f64.powf(1.5),
        max_relative = 1e-12
    );
    assert!(transmit_power(0.0, 1.0, 4.0, 1.0).is_err());
    assert!(transmit_power(1.0, 0.5, 4.0, 1.0).is_err());
}

#[test]
fn average_power_interpolates_between_modes() {
    let m = model();
    assert_relative_eq!(avg_power(0.0, &m, 0.5), 6.8 + 4.0 * 0.5);
    assert_relative_eq!(avg_power(1.0, &m, 0.5), 4.3);
    assert_relative_eq!(avg_power(0.25, &m, 0.0), 0.75 * 6.8 + 0.25 * 4.3);
}

#[test]
fn power_model_validation() {
    assert!(PowerModel::new(4.0, 6.0, 1.0, 1.0).is_err());
    assert!(PowerModel::new(6.0, 0.0, 1.0, 1.0).is_err());
    assert!(PowerModel::new(6.0, 4.0, -1.0, 1.0).is_err());
    assert!(PowerModel::new(6.0, 4.0, 1.0, 0.0).is_err());
    assert!(PowerModel::new(4.0, 4.0, 0.0, 1.0).is_ok());
}

#[test]
fn green_throughput_is_throughput_per_watt() {
    let ch = ChannelModel::new(3.76, 0.0, 1.0).unwrap();
    let quad = gauss_hermite(6).unwrap();
    let m = model();
    for scheme in [AssociationScheme::NearestBs, AssociationScheme::MaxReceivedPower] {
        let vm = VoidModel::new(&ch, &scheme).unwrap();
        for &v in &[0.3, 2.0, 9.0] {
            let sc = NetworkScenario::from_load(370.0, v).unwrap();
            let p_t = transmit_power(sc.lambda_b(), vm.zeta, ch.alpha(), m.p_min()).unwrap();
            let psi = avg_power(vm.void_prob(v), &m, p_t);
            let tc = avg_cell_throughput(&sc, &ch, &scheme, &quad).unwrap();
            let tu = avg_user_throughput(&sc, &ch, &scheme, &quad).unwrap();
            assert_relative_eq!(
                green_cell_throughput(&sc, &ch, &scheme, &m, &quad).unwrap(),
                tc / (sc.lambda_b() * psi),
                max_relative = 1e-12
            );
            assert_relative_eq!(
                green_user_throughput(&sc, &ch, &scheme, &m, &quad).unwrap(),
                tu / psi,
                max_relative = 1e-12
            );
        }
    }
}

#[test]
fn urban_micro_link_budget() {
    let lb = LinkBudget::URBAN_MICRO;
    assert_relative_eq!(lb.alpha(), 3.76, max_relative = 1e-15);
    assert_relative_eq!(lb.path_loss_1m_db(), 27.9, max_relative = 1e-12);
    assert_relative_eq!(lb.mean_penetration(), 80.2, max_relative = 1e-12);
    assert_relative_eq!(lb.effective_p_min(1.0), 10f64.powf(2.29) * 80.2, max_relative = 1e-12);
}

proptest! {
    #[test]
    fn transmit_power_scales_with_density(lb in 1.0f64..5000.0, k in 1.1f64..10.0, alpha in 2.2f64..6.0, zeta in 1.0f64..10.0) {
        let a = transmit_power(lb, zeta, alpha, 1.0).unwrap();
        let b = transmit_power(k * lb, zeta, alpha, 1.0).unwrap();
        prop_assert!((a / b - k.powf(alpha / 2.0)).abs() <= 1e-9 * k.powf(alpha / 2.0));
    }

    #[test]
    fn average_power_bounded_by_modes(p in 0.0f64..=1.0, p_t in 0.0f64..10.0) {
        let m = model();
        let psi = avg_power(p, &m, p_t);
        prop_assert!(psi >= m.p_off() - 1e-12);
        prop_assert!(psi <= m.p_on() + m.delta() * p_t + 1e-12);
    }
}
