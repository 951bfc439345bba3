use super::*;
use crate::catalog::{list_cases, Nonlinearity, Params};
use crate::expr::{parse, rat, DEFAULT_PARAMETERS};

fn e(s: &str) -> Expr {
    parse(s, DEFAULT_PARAMETERS).unwrap().normalize()
}

fn system(a: &str, b: &str, c: &str, f: &str, d: &str, g: &str) -> PdeSystem {
    PdeSystem::new(e(a), e(b), e(c), e(f), e(d), e(g)).unwrap()
}

fn linear(a: &str) -> PdeSystem {
    system(a, a, "0", "0", "0", "0")
}

fn case_b_params() -> Params {
    [
        ("alpha", rat(2, 1)),
        ("beta", rat(2, 1)),
        ("gamma", rat(1, 1)),
        ("b", rat(1, 1)),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

/// Case (b) instance with `f = v^3`, `g = u^3`, and its three densities.
fn case_b() -> (PdeSystem, Vec<(&'static str, Expr)>) {
    let nl = Nonlinearity::Concrete {
        f: e("v^3"),
        g: e("u^3"),
    };
    let mut out = Vec::new();
    let mut sys = None;
    for (name, family) in [("energy", "T2"), ("momentum", "T3"), ("boost", "T4")] {
        let entry = list_cases().into_iter().find(|c| c.family == family).unwrap();
        let inst = entry.instantiate(&case_b_params(), &nl, 0).unwrap();
        out.push((name, inst.system.functions().expand_definitions(&inst.pair.t_density)));
        sys = Some(inst.system);
    }
    (sys.unwrap(), out)
}

fn case_b_config(cells: usize) -> SimConfig {
    let (sys, monitors) = case_b();
    let mut cfg = SimConfig::new(sys, (-20.0, 20.0), cells, 0.5, 10.0).with_initial(
        e("exp(-x^2/4)"),
        e("(1/2)*exp(-(x - 1)^2/4)"),
        e("(x/2)*exp(-x^2/4)"),
        e("0"),
    );
    for (name, d) in monitors {
        cfg = cfg.with_monitor(name, d);
    }
    cfg
}

#[test]
fn zero_data_stays_zero() {
    let cfg = SimConfig::new(system("1", "1", "u^3", "v", "v^3", "u"), (0.0, 1.0), 16, 0.5, 1.0);
    let s = init(&cfg).unwrap();
    assert!(s.u_curr.iter().chain(&s.v_curr).chain(&s.u_prev).all(|&x| x == 0.0));
    let s = step(&s, &cfg).unwrap();
    assert!(s.u_curr.iter().chain(&s.v_curr).all(|&x| x == 0.0));
    assert_eq!(measure(&s, &e("u_t*v_x"), &cfg).unwrap(), 0.0);
}

#[test]
fn unstable_cfl_is_rejected() {
    let cfg = SimConfig::new(linear("1"), (0.0, 1.0), 16, 1.5, 1.0);
    assert!(matches!(init(&cfg), Err(SimError::Config(_))));
    let cfg = SimConfig::new(linear("1"), (0.0, 1.0), 16, 0.0, 1.0);
    assert!(matches!(init(&cfg), Err(SimError::Config(_))));
}

#[test]
fn singular_floor_guards_initial_data() {
    let sys = system("1", "1", "u", "1/v", "v", "1/u").with_singular_at_zero(true);
    let cfg = SimConfig::new(sys.clone(), (0.0, 1.0), 16, 0.5, 1.0).with_initial(e("2"), e("x"), e("0"), e("0"));
    assert!(matches!(init(&cfg), Err(SimError::SingularFloor { var: "v", .. })));
    let cfg = SimConfig::new(sys, (0.0, 1.0), 16, 0.5, 1.0).with_initial(e("2"), e("1 + x"), e("0"), e("0"));
    assert!(init(&cfg).is_ok());
}

#[test]
fn taylor_seed_is_third_order() {
    // u = sin(x) cos(t) solves u_tt = u_xx on [0, 2*pi].
    let error = |cells: usize| {
        let cfg = SimConfig::new(linear("1"), (0.0, 2.0 * std::f64::consts::PI), cells, 0.5, 1.0).with_initial(
            e("sin(x)"),
            e("0"),
            e("0"),
            e("0"),
        );
        let s = step(&init(&cfg).unwrap(), &cfg).unwrap();
        let nodes = cfg.nodes();
        let err = s
            .u_curr
            .iter()
            .zip(&nodes)
            .map(|(u, x)| (u - x.sin() * s.t.cos()).abs())
            .fold(0.0, f64::max);
        (err, s.dt)
    };
    let (e1, dt1) = error(64);
    let (e2, dt2) = error(128);
    assert!(e1 < dt1.powi(3), "{} vs dt^3 = {}", e1, dt1.powi(3));
    assert!(e2 < dt2.powi(3));
    assert!(e1 / e2 > 6.0, "ratio {}", e1 / e2);
}

#[test]
fn measure_gradient_energy_of_sine() {
    let cfg = SimConfig::new(linear("1"), (0.0, 2.0 * std::f64::consts::PI), 512, 0.5, 1.0).with_initial(
        e("sin(x)"),
        e("0"),
        e("0"),
        e("0"),
    );
    let s = init(&cfg).unwrap();
    let c = measure(&s, &e("u_x^2"), &cfg).unwrap();
    // The central difference of sin is cos * sin(h)/h, so the rectangle
    // rule returns pi * (sin(h)/h)^2 exactly.
    let h = cfg.dx();
    let discrete = std::f64::consts::PI * (h.sin() / h).powi(2);
    assert!((c - discrete).abs() < 1e-12);
    assert!((c - std::f64::consts::PI).abs() < std::f64::consts::PI * h * h / 3.0 * 1.01);
}

/// Composite Simpson rule, the reference quadrature for monitor tests.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn initial_energy_matches_reference_quadrature() {
    // Energy of the case (b) instance with exact derivatives of the data.
    let energy = |x: f64| {
        let u = (-x * x / 4.0).exp();
        let v = 0.5 * (-(x - 1.0) * (x - 1.0) / 4.0).exp();
        let ut = x / 2.0 * u;
        let vt = 0.0;
        let ux = -x / 2.0 * u;
        let vx = -(x - 1.0) / 2.0 * v;
        let (big_f, big_g) = (v.powi(4) / 4.0, u.powi(4) / 4.0);
        3.0 * (big_f + big_g) - (ut * vt + ux * vx + u * v) + (vt * vt + vx * vx + v * v) + (ut * ut + ux * ux + u * u)
    };
    let reference = simpson(energy, -20.0, 20.0, 20_000);
    let measured = |cells| {
        let cfg = case_b_config(cells);
        measure(&init(&cfg).unwrap(), &cfg.monitors[0].density, &cfg).unwrap()
    };
    let (m1, m2) = (measured(800), measured(1600));
    assert!((m1 - reference).abs() / reference < 1e-3, "{} vs {}", m1, reference);
    assert!((m2 - reference).abs() < (m1 - reference).abs() / 3.0);
}

#[test]
fn case_b_monitors_are_conserved() {
    let series = run(&case_b_config(800)).unwrap();
    for name in ["energy", "momentum", "boost"] {
        let d = series.drift_of(name).unwrap();
        assert!(d <= 1e-3, "{} drift {}", name, d);
    }
    assert_eq!(series.times.len(), series.steps + 1);
    assert!(series.contact_time.is_none());
    assert!(series.to_csv().starts_with("t,energy,momentum,boost\n"));
}

#[test]
fn leapfrog_is_time_reversible() {
    let cfg = case_b_config(200);
    let s0 = init(&cfg).unwrap();
    let mut s = step(&s0, &cfg).unwrap();
    for _ in 0..49 {
        s = step(&s, &cfg).unwrap();
    }
    // Reversed, level 50 is `prev` and level 49 is `curr`; 49 more steps
    // bring level 0 back into `curr`.
    let mut back = s.reversed();
    for _ in 0..49 {
        back = step(&back, &cfg).unwrap();
    }
    let err = back
        .u_curr
        .iter()
        .zip(&s0.u_curr)
        .chain(back.v_curr.iter().zip(&s0.v_curr))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-10, "{}", err);
}

#[test]
fn plane_wave_amplitude_error_is_second_order() {
    // u = cos(x - w t) with w^2 = 1 + gamma for u_tt = u_xx - gamma u.
    let run_period = |cells: usize| {
        let sys = system("1", "1", "3*u", "0", "3*v", "0");
        let w = 2.0;
        let period = 2.0 * std::f64::consts::PI / w;
        let cfg = SimConfig::new(sys, (0.0, 2.0 * std::f64::consts::PI), cells, 0.5, period).with_initial(
            e("cos(x)"),
            e("0"),
            e("2*sin(x)"),
            e("0"),
        );
        let (steps, _) = cfg.time_grid().unwrap();
        let mut s = step(&init(&cfg).unwrap(), &cfg).unwrap();
        for _ in 1..steps {
            s = step(&s, &cfg).unwrap();
        }
        let amp = s.u_curr.iter().map(|x| x.abs()).fold(0.0, f64::max);
        (amp - 1.0).abs().max(
            s.u_curr
                .iter()
                .zip(cfg.nodes())
                .map(|(u, x)| (u - x.cos()).abs())
                .fold(0.0, f64::max),
        )
    };
    let (e1, e2) = (run_period(64), run_period(128));
    assert!(e1 < 0.05);
    assert!((e1 / e2 - 4.0).abs() < 0.6, "ratio {}", e1 / e2);
}

#[test]
fn exact_solution_error_order() {
    // d'Alembert: u = sin(x - t) for u_tt = u_xx.
    let errors: Vec<(f64, f64)> = [32, 64, 128]
        .into_iter()
        .map(|cells| {
            let cfg = SimConfig::new(linear("1"), (0.0, 2.0 * std::f64::consts::PI), cells, 0.5, 1.0).with_initial(
                e("sin(x)"),
                e("0"),
                e("-cos(x)"),
                e("0"),
            );
            let (steps, _) = cfg.time_grid().unwrap();
            let mut s = init(&cfg).unwrap();
            for _ in 0..steps {
                s = step(&s, &cfg).unwrap();
            }
            let err = s
                .u_curr
                .iter()
                .zip(cfg.nodes())
                .map(|(u, x)| (u - (x - s.t).sin()).abs())
                .fold(0.0, f64::max);
            (cfg.dx(), err)
        })
        .collect();
    let (dx, err): (Vec<f64>, Vec<f64>) = errors.into_iter().unzip();
    let p = fitted_slope(&dx, &err);
    assert!((p - 2.0).abs() <= 0.2, "order {}", p);
}

#[test]
fn zero_data_converges_exactly() {
    let cfg = SimConfig::new(linear("1"), (0.0, 1.0), 8, 0.5, 0.5).with_monitor("u2", e("u^2"));
    let study = convergence_study(&cfg, 3).unwrap();
    assert_eq!(study.orders, vec![Order::Exact]);
    assert!(convergence_study(&cfg, 2).is_err());
}

#[test]
fn dirichlet_uses_trapezoid() {
    let cfg = SimConfig::new(linear("1"), (0.0, 1.0), 10, 0.5, 0.1)
        .with_boundary(Boundary::DirichletZero)
        .with_initial(e("x*(1 - x)"), e("0"), e("0"), e("0"));
    let s = init(&cfg).unwrap();
    assert_eq!(s.u_curr.len(), 11);
    // Trapezoid of x(1-x) with h = 1/10: 1/6 - h^2/6.
    let c = measure(&s, &e("u"), &cfg).unwrap();
    assert!((c - (1.0 / 6.0 - 0.01 / 6.0)).abs() < 1e-14);
    let s = step(&s, &cfg).unwrap();
    assert_eq!((s.u_curr[0], s.u_curr[10]), (0.0, 0.0));
}

#[test]
fn non_conserved_monitor_drifts() {
    let cfg = case_b_config(200).with_monitor("kinetic_u", e("u_t^2"));
    let coarse = run(&cfg).unwrap().drift_of("kinetic_u").unwrap();
    let fine = run(&cfg.refined(400).unwrap()).unwrap().drift_of("kinetic_u").unwrap();
    assert!(coarse > 0.1 && fine > 0.1, "{} {}", coarse, fine);
    assert!(fine > 0.5 * coarse);
}

#[test]
fn blow_up_is_reported() {
    let cfg = SimConfig::new(system("1", "1", "-u^3", "0", "0", "0"), (0.0, 1.0), 8, 0.9, 50.0).with_initial(
        e("10"),
        e("0"),
        e("0"),
        e("0"),
    );
    assert!(matches!(run(&cfg), Err(SimError::BlowUp { .. })));
}

#[test]
fn config_from_json() {
    let text = r#"{
        "system": {"a": 1, "b": 1, "c": "2*u^3 + u", "f": "v^3", "d": "2*v^3 + v", "g": "u^3"},
        "domain": [-20, 20], "cells": 100, "cfl": 0.5, "t_final": 0.5,
        "initial_u": "exp(-x^2)",
        "monitors": [
            {"name": "energy", "family": "T2", "params": {"alpha": 2, "beta": 2, "gamma": 1, "b": 1}},
            {"name": "scaled", "density": "k*u^2"}
        ],
        "parameters": {"k": "1/2"}
    }"#;
    let cfg = ConfigFile::from_json(text).unwrap().build().unwrap();
    assert_eq!(cfg.monitors.len(), 2);
    assert_eq!(cfg.monitors[1].density, e("(1/2)*u^2"));
    let (_, monitors) = case_b();
    assert_eq!(cfg.monitors[0].density, monitors[0].1);
    let series = run(&cfg).unwrap();
    assert_eq!(series.names, vec!["energy", "scaled"]);

    let mismatch = text.replace("\"gamma\": 1", "\"gamma\": 2");
    let err = ConfigFile::from_json(&mismatch).unwrap().build().unwrap_err();
    assert!(err.to_string().contains("needs c"), "{}", err);
    let unknown = text.replace("\"T2\"", "\"T0\"");
    assert!(ConfigFile::from_json(&unknown).unwrap().build().is_err());
    assert!(ConfigFile::from_json("{\"system\": 3}").is_err());
    let samples = text.replace("\"exp(-x^2)\"", "[1, 2]");
    assert!(matches!(
        ConfigFile::from_json(&samples).unwrap().build(),
        Err(SimError::Config(_))
    ));
}

/// `u = v = φ(x + c t)` with `φ = exp(-x^2/4)/2`; the case (b) momentum is
/// `2∫u_t u_x = 2c∫φ'^2 = c√(2π)/8`.
fn packet_momentum(c: i64) -> Vec<f64> {
    let (sys, monitors) = case_b();
    let momentum = monitors.into_iter().find(|(n, _)| *n == "momentum").unwrap().1;
    let ut = e(&format!("-({})*(x/4)*exp(-x^2/4)", c));
    let cfg = SimConfig::new(sys, (-20.0, 20.0), 800, 0.5, 10.0)
        .with_initial(e("(1/2)*exp(-x^2/4)"), e("(1/2)*exp(-x^2/4)"), ut.clone(), ut)
        .with_monitor("momentum", momentum);
    run(&cfg).unwrap().values.remove(0)
}

#[test]
fn momentum_sign_follows_sign_of_ut_times_ux() {
    let exact = (2.0 * std::f64::consts::PI).sqrt() / 8.0;
    let same_sign = packet_momentum(1);
    assert!((same_sign[0] - exact).abs() < 1e-3 * exact, "{}", same_sign[0]);
    assert!(same_sign.iter().all(|m| *m > 0.0));
    let opposite_sign = packet_momentum(-1);
    assert!((opposite_sign[0] + exact).abs() < 1e-3 * exact);
    assert!(opposite_sign.iter().all(|m| *m < 0.0));
}
