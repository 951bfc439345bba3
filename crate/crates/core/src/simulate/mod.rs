//! Explicit leapfrog integration of the coupled system with numerical
//! monitors of conserved densities.
//!
//! The grid has `N` cells on `[x_min, x_max]`. Periodic runs use the `N`
//! left cell edges as nodes; `dirichlet_zero` runs use all `N + 1` edges
//! with both end values pinned to zero. Monitors are integrated with the
//! rectangle rule (periodic) or the trapezoid rule (Dirichlet), taking
//! `u_t` from centered differences over three time levels and `u_x` from
//! central differences.

mod config;
mod plan;

#[cfg(test)]
mod tests;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::CatalogError;
use crate::expr::{Atom, Expr, Indep};
use crate::jetcalc::{PdeSystem, SystemError};

pub use config::{ConfigFile, ExprText, InitialSpec, MonitorSpec, SystemSpec};
pub use plan::{Inputs, Plan, PlanError};

pub const SCHEME_ORDER: u32 = 2;

#[derive(Clone, Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("|{var}| = {value:e} fell below the singular floor at t = {t}")]
    SingularFloor { var: &'static str, value: f64, t: f64 },
    #[error("non-finite values at t = {t}")]
    BlowUp { t: f64 },
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Periodic,
    DirichletZero,
}

/// Initial profile: an expression in `x` or samples at the grid nodes.
#[derive(Clone, Debug)]
pub enum InitialData {
    Expr(Expr),
    Samples(Vec<f64>),
}

impl InitialData {
    pub fn zero() -> Self {
        InitialData::Expr(Expr::zero())
    }
}

#[derive(Clone, Debug)]
pub struct Monitor {
    pub name: String,
    /// Density with every defined function already expanded.
    pub density: Expr,
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub system: PdeSystem,
    pub domain: (f64, f64),
    pub cells: usize,
    pub boundary: Boundary,
    pub cfl: f64,
    pub t_final: f64,
    pub initial_u: InitialData,
    pub initial_v: InitialData,
    pub initial_ut: InitialData,
    pub initial_vt: InitialData,
    pub monitors: Vec<Monitor>,
    /// Record monitors every this many steps (the final level is always
    /// recorded).
    pub record_every: usize,
    /// Lower bound on `|u|`, `|v|` for systems singular at zero.
    pub singular_floor: f64,
    /// Amplitude above which the solution counts as touching the boundary.
    pub contact_tolerance: f64,
}

impl SimConfig {
    pub fn new(system: PdeSystem, domain: (f64, f64), cells: usize, cfl: f64, t_final: f64) -> Self {
        SimConfig {
            system,
            domain,
            cells,
            boundary: Boundary::Periodic,
            cfl,
            t_final,
            initial_u: InitialData::zero(),
            initial_v: InitialData::zero(),
            initial_ut: InitialData::zero(),
            initial_vt: InitialData::zero(),
            monitors: Vec::new(),
            record_every: 1,
            singular_floor: 1e-8,
            contact_tolerance: 1e-6,
        }
    }

    pub fn with_initial(mut self, u: Expr, v: Expr, ut: Expr, vt: Expr) -> Self {
        self.initial_u = InitialData::Expr(u);
        self.initial_v = InitialData::Expr(v);
        self.initial_ut = InitialData::Expr(ut);
        self.initial_vt = InitialData::Expr(vt);
        self
    }

    pub fn with_monitor(mut self, name: impl Into<String>, density: Expr) -> Self {
        let density = self.system.functions().expand_definitions(&density);
        self.monitors.push(Monitor {
            name: name.into(),
            density,
        });
        self
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    /// The same run with `cells` replaced (samples cannot be refined).
    pub fn refined(&self, cells: usize) -> Result<Self, SimError> {
        let samples = [&self.initial_u, &self.initial_v, &self.initial_ut, &self.initial_vt]
            .iter()
            .any(|d| matches!(d, InitialData::Samples(_)));
        if samples {
            return Err(SimError::Config("sampled initial data cannot be refined".into()));
        }
        let mut c = self.clone();
        c.cells = cells;
        Ok(c)
    }

    pub fn dx(&self) -> f64 {
        (self.domain.1 - self.domain.0) / self.cells as f64
    }

    pub fn node_count(&self) -> usize {
        match self.boundary {
            Boundary::Periodic => self.cells,
            Boundary::DirichletZero => self.cells + 1,
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.node_count()).map(|i| self.domain.0 + i as f64 * dx).collect()
    }

    fn speeds(&self) -> Result<(f64, f64), SimError> {
        let num = |e: &Expr, name: &str| {
            e.constant_value()
                .and_then(|r| num_traits::ToPrimitive::to_f64(&r))
                .ok_or_else(|| SimError::Config(format!("wave speed {} = {} is not numeric", name, e)))
        };
        Ok((num(&self.system.a, "a")?, num(&self.system.b, "b")?))
    }

    /// Number of steps and the step size: the largest `dt` not exceeding
    /// `cfl * dx / max(a, b)` that divides `t_final` evenly.
    pub fn time_grid(&self) -> Result<(usize, f64), SimError> {
        let (a, b) = self.speeds()?;
        let c = a.abs().max(b.abs());
        let dt_max = self.cfl * self.dx() / c;
        if self.t_final == 0.0 {
            return Ok((0, dt_max));
        }
        let steps = (self.t_final / dt_max - 1e-9).ceil().max(1.0) as usize;
        Ok((steps, self.t_final / steps as f64))
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::Config(m));
        if !(self.domain.1 > self.domain.0) || !self.domain.0.is_finite() || !self.domain.1.is_finite() {
            return bad(format!("domain [{}, {}] is empty", self.domain.0, self.domain.1));
        }
        if self.cells < 3 {
            return bad(format!("need at least 3 cells, got {}", self.cells));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return bad(format!("cfl = {} is outside (0, 1]", self.cfl));
        }
        if !(self.t_final >= 0.0) || !self.t_final.is_finite() {
            return bad(format!("t_final = {} must be finite and non-negative", self.t_final));
        }
        if self.record_every == 0 {
            return bad("record_every must be positive".into());
        }
        let (a, b) = self.speeds()?;
        if !(a > 0.0 && b > 0.0) {
            return bad(format!("wave speeds must be positive, got a = {}, b = {}", a, b));
        }
        for (name, d) in [
            ("initial_u", &self.initial_u),
            ("initial_v", &self.initial_v),
            ("initial_ut", &self.initial_ut),
            ("initial_vt", &self.initial_vt),
        ] {
            match d {
                InitialData::Samples(s) if s.len() != self.node_count() => {
                    return bad(format!(
                        "{} has {} samples, grid has {} nodes",
                        name,
                        s.len(),
                        self.node_count()
                    ));
                }
                InitialData::Expr(e) => {
                    if !e.jets().is_empty() || e.contains_atom(&Atom::Indep(Indep::T)) {
                        return bad(format!("{} must depend on x only", name));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Two consecutive time levels.
#[derive(Clone, Debug, PartialEq)]
pub struct SimState {
    pub n: usize,
    pub t: f64,
    pub dt: f64,
    pub u_prev: Vec<f64>,
    pub u_curr: Vec<f64>,
    pub v_prev: Vec<f64>,
    pub v_curr: Vec<f64>,
}

impl SimState {
    /// Swap the two levels: stepping the result runs the scheme backwards.
    pub fn reversed(mut self) -> Self {
        std::mem::swap(&mut self.u_prev, &mut self.u_curr);
        std::mem::swap(&mut self.v_prev, &mut self.v_curr);
        self.dt = -self.dt;
        self
    }
}

/// Lowered system: numeric speeds and mass/coupling plans.
struct Kernel {
    a2: f64,
    b2: f64,
    c: Plan,
    f: Plan,
    d: Plan,
    g: Plan,
    dx: f64,
    boundary: Boundary,
    singular: Option<f64>,
}

impl Kernel {
    fn new(cfg: &SimConfig) -> Result<Self, SimError> {
        let (a, b) = cfg.speeds()?;
        let table = cfg.system.functions();
        Ok(Kernel {
            a2: a * a,
            b2: b * b,
            c: Plan::compile(&cfg.system.c, table)?,
            f: Plan::compile(&cfg.system.f, table)?,
            d: Plan::compile(&cfg.system.d, table)?,
            g: Plan::compile(&cfg.system.g, table)?,
            dx: cfg.dx(),
            boundary: cfg.boundary,
            singular: cfg.system.singular_at_zero.then_some(cfg.singular_floor),
        })
    }

    fn second_difference(&self, w: &[f64], i: usize) -> f64 {
        let n = w.len();
        let (l, r) = match self.boundary {
            Boundary::Periodic => (w[(i + n - 1) % n], w[(i + 1) % n]),
            Boundary::DirichletZero => {
                if i == 0 || i == n - 1 {
                    return 0.0;
                }
                (w[i - 1], w[i + 1])
            }
        };
        (l - 2.0 * w[i] + r) / (self.dx * self.dx)
    }

    /// `(u_tt, v_tt)` at node `i` from the equations.
    fn acceleration(&self, u: &[f64], v: &[f64], i: usize) -> (f64, f64) {
        let mut inp = [0.0; 8];
        inp[plan::U] = u[i];
        inp[plan::V] = v[i];
        let au = self.a2 * self.second_difference(u, i) - self.c.eval(&inp) - self.f.eval(&inp);
        let av = self.b2 * self.second_difference(v, i) - self.d.eval(&inp) - self.g.eval(&inp);
        (au, av)
    }

    fn pinned(&self, i: usize, n: usize) -> bool {
        self.boundary == Boundary::DirichletZero && (i == 0 || i == n - 1)
    }

    fn check(&self, u: &[f64], v: &[f64], t: f64) -> Result<(), SimError> {
        if u.iter().chain(v).any(|x| !x.is_finite()) {
            return Err(SimError::BlowUp { t });
        }
        if let Some(floor) = self.singular {
            let n = u.len();
            for (var, w) in [("u", u), ("v", v)] {
                for (i, x) in w.iter().enumerate() {
                    if !self.pinned(i, n) && x.abs() < floor {
                        return Err(SimError::SingularFloor { var, value: x.abs(), t });
                    }
                }
            }
        }
        Ok(())
    }

    /// Next level from `(prev, curr)`.
    fn advance(&self, s: &SimState) -> (Vec<f64>, Vec<f64>) {
        let n = s.u_curr.len();
        let dt2 = s.dt * s.dt;
        let mut u = vec![0.0; n];
        let mut v = vec![0.0; n];
        for i in 0..n {
            if self.pinned(i, n) {
                continue;
            }
            let (au, av) = self.acceleration(&s.u_curr, &s.v_curr, i);
            u[i] = 2.0 * s.u_curr[i] - s.u_prev[i] + dt2 * au;
            v[i] = 2.0 * s.v_curr[i] - s.v_prev[i] + dt2 * av;
        }
        (u, v)
    }
}

fn sample(d: &InitialData, nodes: &[f64], cfg: &SimConfig) -> Result<Vec<f64>, SimError> {
    match d {
        InitialData::Samples(s) => Ok(s.clone()),
        InitialData::Expr(e) => {
            let p = Plan::compile(e, cfg.system.functions())?;
            let mut inp = [0.0; 8];
            Ok(nodes
                .iter()
                .map(|&x| {
                    inp[plan::X] = x;
                    p.eval(&inp)
                })
                .collect())
        }
    }
}

/// Sample the initial data. The returned state holds level 0 in `*_curr`
/// and the backward Taylor level `u⁰ - Δt u_t⁰ + (Δt²/2) u_tt⁰` in
/// `*_prev`, so the first `step` yields the forward Taylor seed
/// `u¹ = u⁰ + Δt u_t⁰ + (Δt²/2) u_tt⁰`.
pub fn init(cfg: &SimConfig) -> Result<SimState, SimError> {
    cfg.validate()?;
    let kernel = Kernel::new(cfg)?;
    let (_, dt) = cfg.time_grid()?;
    let nodes = cfg.nodes();
    let mut u0 = sample(&cfg.initial_u, &nodes, cfg)?;
    let mut v0 = sample(&cfg.initial_v, &nodes, cfg)?;
    let mut ut = sample(&cfg.initial_ut, &nodes, cfg)?;
    let mut vt = sample(&cfg.initial_vt, &nodes, cfg)?;
    if cfg.boundary == Boundary::DirichletZero {
        let last = nodes.len() - 1;
        for w in [&mut u0, &mut v0, &mut ut, &mut vt] {
            w[0] = 0.0;
            w[last] = 0.0;
        }
    }
    kernel.check(&u0, &v0, 0.0)?;
    let n = nodes.len();
    let mut u_prev = vec![0.0; n];
    let mut v_prev = vec![0.0; n];
    for i in 0..n {
        if kernel.pinned(i, n) {
            continue;
        }
        let (au, av) = kernel.acceleration(&u0, &v0, i);
        u_prev[i] = u0[i] - dt * ut[i] + 0.5 * dt * dt * au;
        v_prev[i] = v0[i] - dt * vt[i] + 0.5 * dt * dt * av;
    }
    Ok(SimState {
        n: 0,
        t: 0.0,
        dt,
        u_prev,
        u_curr: u0,
        v_prev,
        v_curr: v0,
    })
}

/// One leapfrog step `w^{n+1} = 2w^n - w^{n-1} + Δt² (speed² δ_xx w^n - mass - coupling)`.
pub fn step(s: &SimState, cfg: &SimConfig) -> Result<SimState, SimError> {
    let kernel = Kernel::new(cfg)?;
    step_with(&kernel, s)
}

fn step_with(kernel: &Kernel, s: &SimState) -> Result<SimState, SimError> {
    let (u, v) = kernel.advance(s);
    let t = s.t + s.dt;
    kernel.check(&u, &v, t)?;
    Ok(SimState {
        n: s.n + 1,
        t,
        dt: s.dt,
        u_prev: s.u_curr.clone(),
        u_curr: u,
        v_prev: s.v_curr.clone(),
        v_curr: v,
    })
}

struct Quadrature {
    dx: f64,
    boundary: Boundary,
    nodes: Vec<f64>,
}

impl Quadrature {
    fn new(cfg: &SimConfig) -> Self {
        Quadrature {
            dx: cfg.dx(),
            boundary: cfg.boundary,
            nodes: cfg.nodes(),
        }
    }

    fn space_derivative(&self, w: &[f64], i: usize) -> f64 {
        let n = w.len();
        let h = self.dx;
        match self.boundary {
            Boundary::Periodic => (w[(i + 1) % n] - w[(i + n - 1) % n]) / (2.0 * h),
            Boundary::DirichletZero => {
                if i == 0 {
                    (-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2.0 * h)
                } else if i == n - 1 {
                    (3.0 * w[n - 1] - 4.0 * w[n - 2] + w[n - 3]) / (2.0 * h)
                } else {
                    (w[i + 1] - w[i - 1]) / (2.0 * h)
                }
            }
        }
    }

    /// Integral of each plan at time level `t` with `(prev, curr, next)`.
    fn integrate(&self, plans: &[Plan], t: f64, dt: f64, u: [&[f64]; 3], v: [&[f64]; 3]) -> Vec<f64> {
        let n = self.nodes.len();
        let mut totals = vec![0.0; plans.len()];
        let mut inp = [0.0; 8];
        inp[plan::T] = t;
        for i in 0..n {
            inp[plan::X] = self.nodes[i];
            inp[plan::U] = u[1][i];
            inp[plan::V] = v[1][i];
            inp[plan::U_T] = (u[2][i] - u[0][i]) / (2.0 * dt);
            inp[plan::V_T] = (v[2][i] - v[0][i]) / (2.0 * dt);
            inp[plan::U_X] = self.space_derivative(u[1], i);
            inp[plan::V_X] = self.space_derivative(v[1], i);
            let w = match self.boundary {
                Boundary::DirichletZero if i == 0 || i == n - 1 => 0.5 * self.dx,
                _ => self.dx,
            };
            for (total, p) in totals.iter_mut().zip(plans) {
                *total += w * p.eval(&inp);
            }
        }
        totals
    }
}

/// Discrete `∫ T dx` at the current level of `s`.
pub fn measure(s: &SimState, density: &Expr, cfg: &SimConfig) -> Result<f64, SimError> {
    let kernel = Kernel::new(cfg)?;
    let plan = Plan::compile(density, cfg.system.functions())?;
    let (u_next, v_next) = kernel.advance(s);
    let q = Quadrature::new(cfg);
    Ok(q.integrate(
        &[plan],
        s.t,
        s.dt,
        [&s.u_prev, &s.u_curr, &u_next],
        [&s.v_prev, &s.v_curr, &v_next],
    )[0])
}

/// Recorded monitor values and their drift.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticSeries {
    pub names: Vec<String>,
    pub times: Vec<f64>,
    /// `values[k][j]`: monitor `k` at record `j`.
    pub values: Vec<Vec<f64>>,
    /// `max_n |C_n - C_0| / max(1, |C_0|)` per monitor.
    pub drift: Vec<f64>,
    pub dx: f64,
    pub dt: f64,
    pub steps: usize,
    pub scheme_order: u32,
    /// First recorded time at which the solution reached the outer 1% of
    /// the grid, tracked only when a monitor depends explicitly on `x`.
    pub contact_time: Option<f64>,
}

impl DiagnosticSeries {
    pub fn drift_of(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|k| self.drift[k])
    }

    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|k| self.values[k].as_slice())
    }

    /// `t,<monitor>...` header and one row per record.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for n in &self.names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for (j, t) in self.times.iter().enumerate() {
            out.push_str(&format!("{:e}", t));
            for v in &self.values {
                out.push_str(&format!(",{:e}", v[j]));
            }
            out.push('\n');
        }
        out
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "monitors": self
                .names
                .iter()
                .zip(&self.drift)
                .zip(&self.values)
                .map(|((n, d), v)| serde_json::json!({
                    "name": n,
                    "drift": d,
                    "initial": v.first(),
                    "final": v.last(),
                }))
                .collect::<Vec<_>>(),
            "dx": self.dx,
            "dt": self.dt,
            "steps": self.steps,
            "scheme_order": self.scheme_order,
            "contact_time": self.contact_time,
        })
    }
}

/// Whether `x` enters other than through `cos`/`sin`, whose periodicity
/// the domain is expected to respect.
fn weighted_by_x(e: &Expr) -> bool {
    let stripped = crate::expr::substitute(e, &|a| match a {
        Atom::Func(app) if app.name == "cos" || app.name == "sin" => Some(Expr::one()),
        _ => None,
    });
    stripped.contains_atom(&Atom::Indep(Indep::X))
}

fn drift(values: &[f64]) -> f64 {
    let Some(&c0) = values.first() else { return 0.0 };
    values.iter().map(|c| (c - c0).abs()).fold(0.0, f64::max) / c0.abs().max(1.0)
}

/// Evolve to `t_final`, recording every monitor.
pub fn run(cfg: &SimConfig) -> Result<DiagnosticSeries, SimError> {
    let mut state = init(cfg)?;
    let kernel = Kernel::new(cfg)?;
    let (steps, dt) = cfg.time_grid()?;
    let plans = cfg
        .monitors
        .iter()
        .map(|m| Plan::compile(&m.density, cfg.system.functions()))
        .collect::<Result<Vec<_>, _>>()?;
    let track_contact = cfg.monitors.iter().any(|m| weighted_by_x(&m.density));
    let q = Quadrature::new(cfg);
    let nodes = q.nodes.len();
    let margin = (nodes / 100).max(1);
    let mut times = Vec::new();
    let mut values = vec![Vec::new(); plans.len()];
    let mut contact_time = None;
    for n in 0..=steps {
        let (u_next, v_next) = kernel.advance(&state);
        kernel.check(&u_next, &v_next, state.t + dt)?;
        if n % cfg.record_every == 0 || n == steps {
            let totals = q.integrate(
                &plans,
                state.t,
                dt,
                [&state.u_prev, &state.u_curr, &u_next],
                [&state.v_prev, &state.v_curr, &v_next],
            );
            times.push(state.t);
            for (k, c) in totals.into_iter().enumerate() {
                values[k].push(c);
            }
            if track_contact && contact_time.is_none() {
                let touches = (0..margin)
                    .chain(nodes - margin..nodes)
                    .any(|i| state.u_curr[i].abs().max(state.v_curr[i].abs()) > cfg.contact_tolerance);
                if touches {
                    contact_time = Some(state.t);
                }
            }
        }
        if n == steps {
            break;
        }
        state.u_prev = std::mem::replace(&mut state.u_curr, u_next);
        state.v_prev = std::mem::replace(&mut state.v_curr, v_next);
        state.n += 1;
        state.t = (n + 1) as f64 * dt;
    }
    Ok(DiagnosticSeries {
        names: cfg.monitors.iter().map(|m| m.name.clone()).collect(),
        drift: values.iter().map(|v| drift(v)).collect(),
        times,
        values,
        dx: cfg.dx(),
        dt,
        steps,
        scheme_order: SCHEME_ORDER,
        contact_time,
    })
}

/// Fitted convergence order of a monitor's drift.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    /// Drift identically zero at every level.
    Exact,
    Fitted(f64),
    /// Some levels drift and some do not.
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub names: Vec<String>,
    pub cells: Vec<usize>,
    pub dx: Vec<f64>,
    /// `drift[k][level]`.
    pub drift: Vec<Vec<f64>>,
    pub orders: Vec<Order>,
}

impl ConvergenceStudy {
    pub fn order_of(&self, name: &str) -> Option<Order> {
        self.names.iter().position(|n| n == name).map(|k| self.orders[k])
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "cells": self.cells,
            "dx": self.dx,
            "monitors": self.names.iter().enumerate().map(|(k, n)| serde_json::json!({
                "name": n,
                "drift": self.drift[k],
                "order": match self.orders[k] {
                    Order::Exact => serde_json::json!("exact"),
                    Order::Fitted(p) => serde_json::json!(p),
                    Order::Undetermined => serde_json::json!(null),
                },
            })).collect::<Vec<_>>(),
        })
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn fitted_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Run at `N, 2N, 4N, ...` cells (time step scaled with `dx`) and fit the
/// drift order of every monitor.
pub fn convergence_study(cfg: &SimConfig, levels: usize) -> Result<ConvergenceStudy, SimError> {
    if levels < 3 {
        return Err(SimError::Config(format!(
            "a convergence study needs at least 3 levels, got {}",
            levels
        )));
    }
    let cells: Vec<usize> = (0..levels).map(|k| cfg.cells << k).collect();
    let configs = cells.iter().map(|&n| cfg.refined(n)).collect::<Result<Vec<_>, _>>()?;
    let runs = configs.par_iter().map(run).collect::<Result<Vec<_>, _>>()?;
    let dx: Vec<f64> = configs.iter().map(SimConfig::dx).collect();
    let names: Vec<String> = cfg.monitors.iter().map(|m| m.name.clone()).collect();
    let drift: Vec<Vec<f64>> = (0..names.len())
        .map(|k| runs.iter().map(|r| r.drift[k]).collect())
        .collect();
    let orders = drift
        .iter()
        .map(|d| {
            if d.iter().all(|&x| x == 0.0) {
                Order::Exact
            } else if d.iter().any(|&x| x == 0.0) {
                Order::Undetermined
            } else {
                Order::Fitted(fitted_slope(&dx, d))
            }
        })
        .collect();
    Ok(ConvergenceStudy {
        names,
        cells,
        dx,
        drift,
        orders,
    })
}
