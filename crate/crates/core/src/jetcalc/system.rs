use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use super::{Dir, JetError, JetSpace};
use crate::expr::{integrate, substitute, Atom, Expr, FunctionTable, JetCoordinate, Var, DEFAULT_MAX_JET_ORDER};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SystemError {
    #[error("nonlinearity {name} must depend only on {var}, found `{found}`")]
    WrongDependence {
        name: &'static str,
        var: &'static str,
        found: String,
    },
}

/// The coupled system
/// `u_tt - a^2 u_xx + c(u) + f(v) = 0`, `v_tt - b^2 v_xx + d(v) + g(u) = 0`.
///
/// Concrete nonlinearities are registered in the function table as
/// definitions of `c`, `f`, `d`, `g`, and the antiderivatives
/// `F' = f`, `G' = g` are registered as rules (with closed forms where the
/// integrator finds them). Nonlinearities given as the bare formal
/// application `f(v)` (resp. `g(u)`, ...) stay arbitrary.
#[derive(Clone, Debug)]
pub struct PdeSystem {
    pub a: Expr,
    pub b: Expr,
    pub c: Expr,
    pub f: Expr,
    pub d: Expr,
    pub g: Expr,
    pub space: JetSpace,
    pub singular_at_zero: bool,
    cache: Arc<Mutex<BTreeMap<JetCoordinate, Expr>>>,
}

fn check_dependence(e: &Expr, name: &'static str, var: Var) -> Result<(), SystemError> {
    let mut bad = None;
    e.for_each_atom(&mut |a| match a {
        Atom::Jet(j) if j.dependent == var && j.order() == 0 => {}
        Atom::Jet(_) | Atom::Indep(_) | Atom::Slot(_) => bad = Some(a.to_string()),
        _ => {}
    });
    match bad {
        Some(found) => Err(SystemError::WrongDependence {
            name,
            var: var.name(),
            found,
        }),
        None => Ok(()),
    }
}

fn in_slot(e: &Expr, var: Var) -> Expr {
    let target = Atom::Jet(JetCoordinate::new(var, 0, 0));
    substitute(e, &|a| (*a == target).then(|| Expr::slot(0))).normalize()
}

fn is_formal_application(e: &Expr, name: &str, var: Var) -> bool {
    matches!(e, Expr::Atom(Atom::Func(app))
        if app.name == name
            && app.derivs == [0]
            && app.args == [Expr::jet(var, 0, 0)])
}

impl PdeSystem {
    pub fn new(a: Expr, b: Expr, c: Expr, f: Expr, d: Expr, g: Expr) -> Result<Self, SystemError> {
        Self::with_table(a, b, c, f, d, g, FunctionTable::with_builtins(), DEFAULT_MAX_JET_ORDER)
    }

    /// Build with additional function rules (mode constraints, definitions)
    /// and a jet-order bound.
    pub fn with_table(
        a: Expr,
        b: Expr,
        c: Expr,
        f: Expr,
        d: Expr,
        g: Expr,
        mut table: FunctionTable,
        max_order: u32,
    ) -> Result<Self, SystemError> {
        let (c, f, d, g) = (c.normalize(), f.normalize(), d.normalize(), g.normalize());
        check_dependence(&c, "c", Var::U)?;
        check_dependence(&f, "f", Var::V)?;
        check_dependence(&d, "d", Var::V)?;
        check_dependence(&g, "g", Var::U)?;
        for (name, e, var) in [
            ("c", &c, Var::U),
            ("f", &f, Var::V),
            ("d", &d, Var::V),
            ("g", &g, Var::U),
        ] {
            if !is_formal_application(e, name, var) && !mentions_function(e, name) {
                table.define(name, 1, in_slot(e, var));
            }
        }
        for (anti, name, e, var) in [("F", "f", &f, Var::V), ("G", "g", &g, Var::U)] {
            let body = in_slot(e, var);
            table.add_rule(anti, vec![1], body.clone());
            if !is_formal_application(e, name, var) {
                if let Ok(closed) = integrate(&body, &Atom::Slot(0), &table) {
                    table.define(anti, 1, closed);
                }
            }
        }
        Ok(PdeSystem {
            a: a.normalize(),
            b: b.normalize(),
            c,
            f,
            d,
            g,
            space: JetSpace::new(table, max_order),
            singular_at_zero: false,
            cache: Arc::new(Mutex::new(BTreeMap::new())),
        })
    }

    /// Both speeds symbolic (`a`, `b`), `c = d = 0`, and `f`, `g` formal.
    pub fn formal_coupling() -> Self {
        Self::new(
            Expr::param("a"),
            Expr::param("b"),
            Expr::zero(),
            Expr::func("f", vec![Expr::v()]),
            Expr::zero(),
            Expr::func("g", vec![Expr::u()]),
        )
        .expect("formal system is well formed")
    }

    pub fn with_singular_at_zero(mut self, flag: bool) -> Self {
        self.singular_at_zero = flag;
        self
    }

    pub fn functions(&self) -> &FunctionTable {
        &self.space.functions
    }

    /// Expand definitions of concrete functions and normalize.
    pub fn prepare(&self, e: &Expr) -> Expr {
        self.space.functions.expand_definitions(e)
    }

    pub fn total_d(&self, e: &Expr, dir: Dir) -> Result<Expr, JetError> {
        self.space.total_d(&self.prepare(e), dir)
    }

    /// `Δ_u = u_tt - a^2 u_xx + c(u) + f(v)`.
    pub fn delta_u(&self) -> Expr {
        (Expr::jet(Var::U, 2, 0) - self.a.clone().pow(2) * Expr::jet(Var::U, 0, 2) + self.c.clone() + self.f.clone())
            .normalize()
    }

    /// `Δ_v = v_tt - b^2 v_xx + d(v) + g(u)`.
    pub fn delta_v(&self) -> Expr {
        (Expr::jet(Var::V, 2, 0) - self.b.clone().pow(2) * Expr::jet(Var::V, 0, 2) + self.d.clone() + self.g.clone())
            .normalize()
    }

    pub fn delta(&self, w: Var) -> Expr {
        match w {
            Var::U => self.delta_u(),
            Var::V => self.delta_v(),
        }
    }

    /// Right-hand side of `w_tt = ...`.
    fn second_time_derivative(&self, w: Var) -> Expr {
        let e = match w {
            Var::U => self.a.clone().pow(2) * Expr::jet(Var::U, 0, 2) - self.c.clone() - self.f.clone(),
            Var::V => self.b.clone().pow(2) * Expr::jet(Var::V, 0, 2) - self.d.clone() - self.g.clone(),
        };
        self.prepare(&e)
    }

    /// Reduced form of a jet with `t_order ≥ 2`.
    fn reduced_jet(&self, j: JetCoordinate) -> Result<Expr, JetError> {
        if let Some(e) = self.cache.lock().unwrap().get(&j) {
            return Ok(e.clone());
        }
        let out = if j.t_order == 2 {
            self.space
                .total_d_n(&self.second_time_derivative(j.dependent), Dir::X, j.x_order)?
        } else {
            let lower = self.reduced_jet(JetCoordinate::new(j.dependent, j.t_order - 1, j.x_order))?;
            let dt = self.space.total_d(&lower, Dir::T)?;
            self.restrict(&dt)?
        };
        if out.max_jet_order() > self.space.max_order {
            return Err(JetError::OrderOverflow {
                jet: j,
                max: self.space.max_order,
            });
        }
        self.cache.lock().unwrap().insert(j, out.clone());
        Ok(out)
    }

    /// Eliminate every jet with `t_order ≥ 2` using the equations and their
    /// prolongations.
    pub fn restrict(&self, e: &Expr) -> Result<Expr, JetError> {
        let e = self.prepare(e);
        let high: Vec<JetCoordinate> = e.jets().into_iter().filter(|j| j.t_order >= 2).collect();
        if high.is_empty() {
            return Ok(e);
        }
        let mut map = BTreeMap::new();
        for j in high {
            map.insert(j, self.reduced_jet(j)?);
        }
        let out = substitute(&e, &|a| match a {
            Atom::Jet(j) => map.get(j).cloned(),
            _ => None,
        });
        Ok(self.space.functions.reduce(&out))
    }
}

fn mentions_function(e: &Expr, name: &str) -> bool {
    let mut found = false;
    e.for_each_atom(&mut |a| {
        if let Atom::Func(app) = a {
            found |= app.name == name;
        }
    });
    found
}
