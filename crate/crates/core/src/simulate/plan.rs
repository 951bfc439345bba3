//! Lowering of expressions to `f64` evaluation plans.
//!
//! A plan reads eight inputs: `t, x, u, v, u_t, v_t, u_x, v_x`. Defined
//! functions are expanded before lowering; anything else that is not a
//! builtin (`cos`, `sin`) is rejected.

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::expr::{Atom, Expr, FunctionTable, Indep, Var};

pub const T: usize = 0;
pub const X: usize = 1;
pub const U: usize = 2;
pub const V: usize = 3;
pub const U_T: usize = 4;
pub const V_T: usize = 5;
pub const U_X: usize = 6;
pub const V_X: usize = 7;

pub type Inputs = [f64; 8];

#[derive(Clone, Debug, Error, PartialEq)]
pub enum PlanError {
    #[error("parameter `{0}` has no numeric value")]
    UnassignedParameter(String),
    #[error("`{0}` is not available to numerical monitors")]
    UnavailableAtom(String),
}

#[derive(Clone, Debug)]
enum Node {
    Const(f64),
    Input(usize),
    Sum(Vec<Node>),
    Product(Vec<Node>),
    Pow(Box<Node>, i32),
    Exp(Box<Node>),
    Ln(Box<Node>),
    Cos(Box<Node>),
    Sin(Box<Node>),
}

/// Compiled expression tree over `f64`.
#[derive(Clone, Debug)]
pub struct Plan {
    root: Node,
}

impl Plan {
    /// Expand the table's definitions in `e`, then lower.
    pub fn compile(e: &Expr, table: &FunctionTable) -> Result<Plan, PlanError> {
        let expanded = table.expand_definitions(e);
        Ok(Plan {
            root: lower(&expanded)?,
        })
    }

    pub fn eval(&self, inputs: &Inputs) -> f64 {
        eval(&self.root, inputs)
    }

    /// Whether the plan reads input `index`.
    pub fn reads(&self, index: usize) -> bool {
        fn walk(n: &Node, index: usize) -> bool {
            match n {
                Node::Const(_) => false,
                Node::Input(i) => *i == index,
                Node::Sum(xs) | Node::Product(xs) => xs.iter().any(|x| walk(x, index)),
                Node::Pow(b, _) | Node::Exp(b) | Node::Ln(b) | Node::Cos(b) | Node::Sin(b) => walk(b, index),
            }
        }
        walk(&self.root, index)
    }
}

fn input_index(a: &Atom) -> Result<usize, PlanError> {
    match a {
        Atom::Indep(Indep::T) => Ok(T),
        Atom::Indep(Indep::X) => Ok(X),
        Atom::Jet(j) => match (j.dependent, j.t_order, j.x_order) {
            (Var::U, 0, 0) => Ok(U),
            (Var::V, 0, 0) => Ok(V),
            (Var::U, 1, 0) => Ok(U_T),
            (Var::V, 1, 0) => Ok(V_T),
            (Var::U, 0, 1) => Ok(U_X),
            (Var::V, 0, 1) => Ok(V_X),
            _ => Err(PlanError::UnavailableAtom(a.to_string())),
        },
        Atom::Param(p) => Err(PlanError::UnassignedParameter(p.clone())),
        _ => Err(PlanError::UnavailableAtom(a.to_string())),
    }
}

fn lower(e: &Expr) -> Result<Node, PlanError> {
    Ok(match e {
        Expr::Const(r) => Node::Const(r.to_f64().unwrap_or(f64::NAN)),
        Expr::Atom(Atom::Func(app)) if app.args.len() == 1 && (app.name == "cos" || app.name == "sin") => {
            let arg = Box::new(lower(&app.args[0])?);
            // cos^(n) = cos(z + n*pi/2), likewise sin.
            let shift = app.derivs[0] % 4;
            let (name, sign) = match (app.name.as_str(), shift) {
                ("cos", 0) => ("cos", 1.0),
                ("cos", 1) => ("sin", -1.0),
                ("cos", 2) => ("cos", -1.0),
                ("cos", _) => ("sin", 1.0),
                (_, 0) => ("sin", 1.0),
                (_, 1) => ("cos", 1.0),
                (_, 2) => ("sin", -1.0),
                _ => ("cos", -1.0),
            };
            let node = if name == "cos" { Node::Cos(arg) } else { Node::Sin(arg) };
            if sign < 0.0 {
                Node::Product(vec![Node::Const(-1.0), node])
            } else {
                node
            }
        }
        Expr::Atom(a) => Node::Input(input_index(a)?),
        Expr::Sum(xs) => Node::Sum(xs.iter().map(lower).collect::<Result<_, _>>()?),
        Expr::Product(xs) => Node::Product(xs.iter().map(lower).collect::<Result<_, _>>()?),
        Expr::Pow(b, n) => Node::Pow(Box::new(lower(b)?), (*n).clamp(i32::MIN as i64, i32::MAX as i64) as i32),
        Expr::Exp(b) => Node::Exp(Box::new(lower(b)?)),
        Expr::Ln(b) => Node::Ln(Box::new(lower(b)?)),
    })
}

fn eval(n: &Node, inp: &Inputs) -> f64 {
    match n {
        Node::Const(c) => *c,
        Node::Input(i) => inp[*i],
        Node::Sum(xs) => xs.iter().map(|x| eval(x, inp)).sum(),
        Node::Product(xs) => xs.iter().map(|x| eval(x, inp)).product(),
        Node::Pow(b, k) => eval(b, inp).powi(*k),
        Node::Exp(b) => eval(b, inp).exp(),
        Node::Ln(b) => eval(b, inp).ln(),
        Node::Cos(b) => eval(b, inp).cos(),
        Node::Sin(b) => eval(b, inp).sin(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, DEFAULT_PARAMETERS};

    fn plan(s: &str) -> Result<Plan, PlanError> {
        Plan::compile(&parse(s, &[]).unwrap(), &FunctionTable::with_builtins())
    }

    #[test]
    fn evaluates_all_inputs() {
        let p = plan("t + 2*x + 3*u + 4*v + 5*u_t + 6*v_t + 7*u_x + 8*v_x").unwrap();
        assert_eq!(p.eval(&[1.0; 8]), 36.0);
        assert!(p.reads(V_X));
    }

    #[test]
    fn builtin_derivatives_cycle() {
        let p = plan("cos'(x) + sin''(x) + exp(u)*u^(-2)").unwrap();
        let mut inp = [0.0; 8];
        inp[X] = 0.3;
        inp[U] = 2.0;
        let want = -(0.3f64).sin() - (0.3f64).sin() + 2f64.exp() / 4.0;
        assert!((p.eval(&inp) - want).abs() < 1e-14);
    }

    #[test]
    fn rejects_symbols() {
        let e = parse("alpha*u", DEFAULT_PARAMETERS).unwrap();
        let err = Plan::compile(&e, &FunctionTable::new()).unwrap_err();
        assert_eq!(err, PlanError::UnassignedParameter("alpha".into()));
        assert!(matches!(plan("u_xx"), Err(PlanError::UnavailableAtom(_))));
        assert!(matches!(plan("F(v)"), Err(PlanError::UnavailableAtom(_))));
    }

    #[test]
    fn definitions_are_expanded() {
        let mut table = FunctionTable::with_builtins();
        table.define("F", 1, Expr::slot(0).pow(4) * Expr::rational(crate::expr::rat(1, 4)));
        let p = Plan::compile(&parse("F(v)", &[]).unwrap(), &table).unwrap();
        let mut inp = [0.0; 8];
        inp[V] = 2.0;
        assert_eq!(p.eval(&inp), 4.0);
    }
}
