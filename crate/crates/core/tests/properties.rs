use proptest::prelude::*;

use quasiwave::flux_solver::{flux_cfl_timestep, init_flux, momentum_total, step_flux};
use quasiwave::harness::ScenarioConfig;
use quasiwave::initial_data::{riemann_initial, sample_profile, Grid, Profile, Scenario};
use quasiwave::riemann_solver::{cfl_timestep, step, RiemannState, SolverSettings};
use quasiwave::wavespeed::WaveSpeedModel;

fn config_text(a: f64, mass: f64, radius: f64, n: usize, t_end: f64, cfl: f64) -> String {
    format!(
        r#"
[model]
kind = "zabusky"
a = {a:?}
[u0]
kind = "zero"
[u1]
kind = "bump"
mass = {mass:?}
radius = {radius:?}
[grid]
n = {n}
[run]
t_end = {t_end:?}
cfl = {cfl:?}
"#
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn config_survives_serialization(
        a in 0.1f64..8.0,
        mass in -4.0f64..4.0,
        radius in 0.2f64..3.0,
        n in 64usize..4096,
        t_end in 0.1f64..30.0,
        cfl in 0.05f64..0.95,
    ) {
        let c = ScenarioConfig::from_toml_str(&config_text(a, mass, radius, n, t_end, cfl)).unwrap();
        let back = ScenarioConfig::from_toml_str(&c.to_toml_string()).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.hash(), c.hash());
        let g = c.build_grid().unwrap();
        prop_assert_eq!(g.n(), n);
    }

    #[test]
    fn sized_domains_hold_the_cone(
        a in 0.1f64..8.0,
        radius in 0.2f64..3.0,
        n in 64usize..4096,
        t_end in 0.1f64..30.0,
    ) {
        let c = ScenarioConfig::from_toml_str(&config_text(a, -0.1, radius, n, t_end, 0.45)).unwrap();
        let g = c.build_grid().unwrap();
        let half_width = g.x_max() + 0.5 * g.dx();
        // u0 = 0, so c_max = c(0) = 1
        prop_assert!(half_width >= radius + t_end + 10.0 * g.dx() - 1e-9);
    }

    #[test]
    fn bump_mass_is_exact(mass in -10.0f64..10.0, radius in 0.3f64..2.0) {
        let grid = Grid::centered(radius + 1.0, 2048).unwrap();
        let f = sample_profile(&Profile::bump_with_mass(mass, radius), &grid).unwrap();
        prop_assert!((f.integral() - mass).abs() <= 1e-10 * (1.0 + mass.abs()));
    }

    #[test]
    fn primitive_is_additive(a in 0.1f64..8.0, x in 0.0f64..1.0, y in 0.0f64..1.0, z in 0.0f64..1.0) {
        let model = WaveSpeedModel::zabusky(a).unwrap();
        let theta0 = model.theta0();
        let mut p = [x, y, z].map(|s| theta0 * (1.0 - s) * 0.999);
        p.sort_by(f64::total_cmp);
        let whole = model.primitive(p[0], p[2]).unwrap();
        let parts = model.primitive(p[0], p[1]).unwrap() + model.primitive(p[1], p[2]).unwrap();
        prop_assert!((whole - parts).abs() <= 1e-9 * (1.0 + whole.abs()));
    }

    #[test]
    fn flux_momentum_is_conserved(a in 0.5f64..4.0, mass in -0.4f64..0.4, amp0 in -0.2f64..0.2) {
        let model = WaveSpeedModel::zabusky(a).unwrap();
        let grid = Grid::centered(8.0, 256).unwrap();
        let u0 = Profile::Bump { amplitude: amp0 / a, radius: 1.0 };
        let s = Scenario::from_profiles(model.clone(), grid, &u0, &Profile::bump_with_mass(mass, 1.0)).unwrap();
        let settings = SolverSettings::defaults(&model, 1.0);
        let dt = flux_cfl_timestep(&init_flux(&s, 1e-3).unwrap(), &model, &settings).unwrap();
        let mut state = init_flux(&s, dt).unwrap();
        let m0 = momentum_total(&state).value;
        for _ in 0..200 {
            state = step_flux(&state, dt, &model, &settings).unwrap();
        }
        prop_assert!((momentum_total(&state).value - m0).abs() <= 1e-10 * (1.0 + m0.abs()));
    }

    #[test]
    fn incoming_signs_stay_nonpositive(a in 0.5f64..4.0, frac in 0.1f64..0.9, radius in 0.5f64..1.5) {
        let model = WaveSpeedModel::zabusky(a).unwrap();
        let grid = Grid::centered(4.0, 256).unwrap();
        let mass = -frac * model.primitive(model.theta0(), 0.0).unwrap();
        let s = Scenario::from_profiles(model.clone(), grid, &Profile::Zero, &Profile::bump_with_mass(mass, radius)).unwrap();
        let (r1, r2) = riemann_initial(&s).unwrap();
        let scale = r1.max_abs().max(r2.max_abs()).max(1.0);
        let settings = SolverSettings::defaults(&model, scale);
        let mut state = RiemannState::initial(&s).unwrap();
        for _ in 0..150 {
            let dt = cfl_timestep(&state, &model, &settings).unwrap();
            state = step(&state, dt, &model, &settings).unwrap().0;
            prop_assert!(state.r1.max() <= 1e-8 * scale && state.r2.max() <= 1e-8 * scale);
        }
    }
}
