//! JSON configuration mirroring [`SimConfig`](super::SimConfig).
//!
//! Expressions are strings in the expression grammar; numbers are accepted
//! wherever an expression is. Symbols listed under `parameters` are
//! substituted everywhere before lowering.
//!
//! ```json
//! {
//!   "system": {"a": 1, "b": 1, "c": "2*u^3 + u", "f": "v^3", "d": "2*v^3 + v", "g": "u^3"},
//!   "domain": [-20, 20], "cells": 800, "cfl": 0.5, "t_final": 10,
//!   "initial_u": "exp(-x^2)", "initial_vt": [0.0, ...],
//!   "monitors": [
//!     {"name": "energy", "family": "T2", "params": {"alpha": 2, "beta": 2, "gamma": 1, "b": 1}},
//!     {"name": "kinetic", "density": "u_t^2"}
//!   ]
//! }
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Boundary, InitialData, Monitor, SimConfig, SimError};
use crate::catalog::{list_cases, Nonlinearity, Params};
use crate::expr::{substitute, Atom, Expr, FunctionTable, Parser, Rational, DEFAULT_MAX_JET_ORDER};
use crate::jetcalc::PdeSystem;

/// Expression given as a string or a bare JSON number.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExprText {
    Number(serde_json::Number),
    Text(String),
}

impl ExprText {
    pub fn text(&self) -> String {
        match self {
            ExprText::Number(n) => n.to_string(),
            ExprText::Text(s) => s.clone(),
        }
    }
}

impl Default for ExprText {
    fn default() -> Self {
        ExprText::Text("0".into())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub a: ExprText,
    pub b: ExprText,
    #[serde(default)]
    pub c: ExprText,
    #[serde(default)]
    pub f: ExprText,
    #[serde(default)]
    pub d: ExprText,
    #[serde(default)]
    pub g: ExprText,
    /// Guard `|u|`, `|v|` against the singular floor. Implied by catalog
    /// monitors of singular families.
    #[serde(default)]
    pub singular_at_zero: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialSpec {
    Samples(Vec<f64>),
    Expr(ExprText),
}

impl Default for InitialSpec {
    fn default() -> Self {
        InitialSpec::Expr(ExprText::default())
    }
}

/// A monitor given by its density, or by a catalog family whose density
/// is instantiated with `params` and the system's `f`, `g`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonitorSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, ExprText>,
    #[serde(default)]
    pub mode: usize,
}

fn default_record_every() -> usize {
    1
}

fn default_floor() -> f64 {
    1e-8
}

fn default_contact() -> f64 {
    1e-6
}

fn default_boundary() -> Boundary {
    Boundary::Periodic
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigFile {
    pub system: SystemSpec,
    #[serde(default)]
    pub parameters: BTreeMap<String, ExprText>,
    pub domain: [f64; 2],
    pub cells: usize,
    #[serde(default = "default_boundary")]
    pub boundary: Boundary,
    pub cfl: f64,
    pub t_final: f64,
    #[serde(default)]
    pub initial_u: InitialSpec,
    #[serde(default)]
    pub initial_v: InitialSpec,
    #[serde(default)]
    pub initial_ut: InitialSpec,
    #[serde(default)]
    pub initial_vt: InitialSpec,
    #[serde(default)]
    pub monitors: Vec<MonitorSpec>,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    #[serde(default = "default_floor")]
    pub singular_floor: f64,
    #[serde(default = "default_contact")]
    pub contact_tolerance: f64,
}

fn config_err(m: impl Into<String>) -> SimError {
    SimError::Config(m.into())
}

fn number(text: &ExprText, what: &str) -> Result<Rational, SimError> {
    Parser::new(&[])
        .parse(&text.text())
        .ok()
        .and_then(|e| e.normalize().constant_value())
        .ok_or_else(|| config_err(format!("{} = `{}` is not a rational number", what, text.text())))
}

struct Substitution {
    parser: Parser,
    values: BTreeMap<String, Rational>,
}

impl Substitution {
    fn new(parameters: &BTreeMap<String, ExprText>) -> Result<Self, SimError> {
        let values = parameters
            .iter()
            .map(|(k, v)| Ok((k.clone(), number(v, k)?)))
            .collect::<Result<BTreeMap<_, _>, SimError>>()?;
        let parser = Parser::with_params(values.keys().cloned());
        Ok(Substitution { parser, values })
    }

    fn expr(&self, text: &str, what: &str) -> Result<Expr, SimError> {
        let e = self
            .parser
            .parse(text)
            .map_err(|err| config_err(format!("{}: {}", what, err)))?;
        Ok(substitute(&e, &|a| match a {
            Atom::Param(p) => self.values.get(p).map(|r| Expr::rational(r.clone())),
            _ => None,
        })
        .normalize())
    }
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self, SimError> {
        serde_json::from_str(text).map_err(|e| config_err(e.to_string()))
    }

    /// Build the runtime configuration: parse every expression, construct
    /// the system, and instantiate catalog monitors.
    pub fn build(&self) -> Result<SimConfig, SimError> {
        let sub = Substitution::new(&self.parameters)?;
        let s = &self.system;
        let [a, b, c, f, d, g] = [
            ("a", &s.a),
            ("b", &s.b),
            ("c", &s.c),
            ("f", &s.f),
            ("d", &s.d),
            ("g", &s.g),
        ]
        .map(|(name, text)| sub.expr(&text.text(), name));
        let (f, g) = (f?, g?);
        let table = FunctionTable::with_builtins();
        let mut system = PdeSystem::with_table(a?, b?, c?, f.clone(), d?, g.clone(), table, DEFAULT_MAX_JET_ORDER)?
            .with_singular_at_zero(s.singular_at_zero);
        let mut monitors = Vec::new();
        for m in &self.monitors {
            let (density, singular) = self.monitor_density(m, &sub, &system, &f, &g)?;
            system.singular_at_zero |= singular;
            monitors.push(Monitor {
                name: m.name.clone(),
                density,
            });
        }
        let initial = |spec: &InitialSpec, what: &str| -> Result<InitialData, SimError> {
            Ok(match spec {
                InitialSpec::Samples(xs) => InitialData::Samples(xs.clone()),
                InitialSpec::Expr(t) => InitialData::Expr(sub.expr(&t.text(), what)?),
            })
        };
        let cfg = SimConfig {
            system,
            domain: (self.domain[0], self.domain[1]),
            cells: self.cells,
            boundary: self.boundary,
            cfl: self.cfl,
            t_final: self.t_final,
            initial_u: initial(&self.initial_u, "initial_u")?,
            initial_v: initial(&self.initial_v, "initial_v")?,
            initial_ut: initial(&self.initial_ut, "initial_ut")?,
            initial_vt: initial(&self.initial_vt, "initial_vt")?,
            monitors,
            record_every: self.record_every,
            singular_floor: self.singular_floor,
            contact_tolerance: self.contact_tolerance,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn monitor_density(
        &self,
        m: &MonitorSpec,
        sub: &Substitution,
        system: &PdeSystem,
        f: &Expr,
        g: &Expr,
    ) -> Result<(Expr, bool), SimError> {
        match (&m.density, &m.family) {
            (Some(text), None) => {
                let e = sub.expr(text, &m.name)?;
                Ok((system.functions().expand_definitions(&e), false))
            }
            (None, Some(family)) => {
                let entry = list_cases()
                    .into_iter()
                    .find(|e| e.family == family.as_str())
                    .ok_or_else(|| config_err(format!("monitor {}: unknown family `{}`", m.name, family)))?;
                let params: Params = m
                    .params
                    .iter()
                    .map(|(k, v)| Ok((k.clone(), number(v, k)?)))
                    .collect::<Result<_, SimError>>()?;
                let nl = if entry.arbitrary_nonlinearity {
                    Nonlinearity::Concrete {
                        f: f.clone(),
                        g: g.clone(),
                    }
                } else {
                    Nonlinearity::Formal
                };
                let inst = entry.instantiate(&params, &nl, m.mode)?;
                let ours = [&system.a, &system.b, &system.c, &system.f, &system.d, &system.g];
                let theirs = [
                    &inst.system.a,
                    &inst.system.b,
                    &inst.system.c,
                    &inst.system.f,
                    &inst.system.d,
                    &inst.system.g,
                ];
                for ((name, x), y) in ["a", "b", "c", "f", "d", "g"].iter().zip(ours).zip(theirs) {
                    if x.normalize() != y.normalize() {
                        return Err(config_err(format!(
                            "monitor {}: family {} needs {} = {}, the system has {}",
                            m.name, family, name, y, x
                        )));
                    }
                }
                let density = inst.system.functions().expand_definitions(&inst.pair.t_density);
                Ok((density, entry.singular_at_zero))
            }
            _ => Err(config_err(format!(
                "monitor {}: give exactly one of `density` and `family`",
                m.name
            ))),
        }
    }
}
