//! Welfare costs checked against seeded Monte Carlo oracles.

mod common;

use gridqos::consumer::{
    delay_cost, outage_loss_rate, tabulate_costs_with, LogUtility, QuadratureConfig,
};
use gridqos::market::stationary_load_prior;
use gridqos::scenario::pjm_bus;

const MC_SAMPLES: usize = 1_000_000;

#[test]
fn delay_cost_matches_monte_carlo_on_bus_d() {
    let curve = pjm_bus("D").unwrap();
    let prior = stationary_load_prior(&curve);
    let util = LogUtility::default();
    let quad = delay_cost(&curve, &util, 10, 100.0, &prior).unwrap();
    let mc = common::mc_delay_cost(&curve, util.scale, 10, 100.0, MC_SAMPLES, 0xCAFE);
    assert!(
        (quad - mc).abs() <= 0.02 * mc.abs(),
        "quadrature {quad} vs monte carlo {mc}"
    );
}

#[test]
fn outage_rate_matches_monte_carlo_on_bus_d() {
    let curve = pjm_bus("D").unwrap();
    let prior = stationary_load_prior(&curve);
    let util = LogUtility::default();
    let quad = outage_loss_rate(&curve, &util, &prior);
    let mc = common::mc_outage_rate(&curve, util.scale, MC_SAMPLES, 0xBEEF);
    assert!(
        (quad - mc).abs() <= 0.02 * mc.abs(),
        "quadrature {quad} vs monte carlo {mc}"
    );
}

#[test]
fn bus_e_costs_sit_below_bus_d_costs() {
    let util = LogUtility::default();
    let bus_d = pjm_bus("D").unwrap();
    let bus_e = pjm_bus("E").unwrap();
    let d_grid = [2, 6, 12];
    let zeta_grid = [0.01, 0.05, 0.1];
    let cfg = QuadratureConfig { prior_points: 1024, kernel_panels: 2048 };
    let (dc_d, oc_d) = tabulate_costs_with(
        &bus_d,
        &util,
        &d_grid,
        &zeta_grid,
        100.0,
        &stationary_load_prior(&bus_d),
        cfg,
    )
    .unwrap();
    let (dc_e, oc_e) = tabulate_costs_with(
        &bus_e,
        &util,
        &d_grid,
        &zeta_grid,
        100.0,
        &stationary_load_prior(&bus_e),
        cfg,
    )
    .unwrap();
    for (d, e) in dc_d.points().iter().zip(dc_e.points()) {
        assert!(e.1 < d.1, "delay cost at {}: E {} !< D {}", d.0, e.1, d.1);
    }
    for (d, e) in oc_d.points().iter().zip(oc_e.points()) {
        assert!(e.1 <= d.1, "outage cost at {}: E {} !<= D {}", d.0, e.1, d.1);
    }
}
