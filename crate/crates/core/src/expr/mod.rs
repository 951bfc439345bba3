//! Expression trees over jet coordinates, parameters and formal functions.
//!
//! An [`Expr`] is an immutable tree. Arithmetic through the operator impls
//! builds raw trees; [`Expr::normalize`] brings any tree to the canonical
//! expanded form in which two expressions are equal iff they are
//! structurally identical. All coefficients are exact rationals.

pub(crate) mod calculus;
mod eval;
mod normal;
mod parse;
mod print;
mod table;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub use calculus::{integrate, integrate_gradient, partial, partial_in, substitute, substitute_atom, CalculusError};
pub use eval::{eval_rational, eval_value, zero_check, EvalError, Point, Value, ZeroCheck};
pub use normal::Monomial;
pub use parse::{parse, ParseError, ParseErrorKind, Parser, DEFAULT_PARAMETERS};
pub use table::{fill_slots, FunctionDef, FunctionRule, FunctionTable};

/// Exact rational coefficient.
pub type Rational = BigRational;

/// Default bound on the total differential order of a jet coordinate.
pub const DEFAULT_MAX_JET_ORDER: u32 = 8;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    U,
    V,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::U => "u",
            Var::V => "v",
        }
    }

    pub fn other(self) -> Var {
        match self {
            Var::U => Var::V,
            Var::V => Var::U,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Indep {
    T,
    X,
}

/// A derivative of `u` or `v`: `(dependent, t_order, x_order)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetCoordinate {
    pub dependent: Var,
    pub t_order: u32,
    pub x_order: u32,
}

impl JetCoordinate {
    pub const fn new(dependent: Var, t_order: u32, x_order: u32) -> Self {
        JetCoordinate {
            dependent,
            t_order,
            x_order,
        }
    }

    pub fn order(&self) -> u32 {
        self.t_order + self.x_order
    }
}

impl fmt::Display for JetCoordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.dependent.name())?;
        if self.order() > 0 {
            f.write_str("_")?;
            for _ in 0..self.t_order {
                f.write_str("t")?;
            }
            for _ in 0..self.x_order {
                f.write_str("x")?;
            }
        }
        Ok(())
    }
}

/// Application of a named formal function. `derivs[i]` counts the partial
/// derivatives taken in the `i`-th argument slot.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FuncApp {
    pub name: String,
    pub derivs: Vec<u32>,
    pub args: Vec<Expr>,
}

impl FuncApp {
    pub fn new(name: impl Into<String>, args: Vec<Expr>) -> Self {
        let derivs = vec![0; args.len()];
        FuncApp {
            name: name.into(),
            derivs,
            args,
        }
    }

    pub fn total_derivative_order(&self) -> u32 {
        self.derivs.iter().sum()
    }
}

/// Leaf of an expression. The derived ordering is the canonical atom order:
/// independents, then jets, then parameters, then function applications.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Indep(Indep),
    Jet(JetCoordinate),
    Param(String),
    Func(FuncApp),
    /// Placeholder for the `i`-th argument in function rules and definitions.
    Slot(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Const(Rational),
    Atom(Atom),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Box<Expr>, i64),
    Exp(Box<Expr>),
    Ln(Box<Expr>),
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Const(Rational::zero())
    }

    pub fn one() -> Expr {
        Expr::Const(Rational::one())
    }

    pub fn int(n: i64) -> Expr {
        Expr::Const(int(n))
    }

    pub fn rational(r: Rational) -> Expr {
        Expr::Const(r)
    }

    pub fn t() -> Expr {
        Expr::Atom(Atom::Indep(Indep::T))
    }

    pub fn x() -> Expr {
        Expr::Atom(Atom::Indep(Indep::X))
    }

    pub fn jet(dependent: Var, t_order: u32, x_order: u32) -> Expr {
        Expr::Atom(Atom::Jet(JetCoordinate::new(dependent, t_order, x_order)))
    }

    pub fn u() -> Expr {
        Expr::jet(Var::U, 0, 0)
    }

    pub fn v() -> Expr {
        Expr::jet(Var::V, 0, 0)
    }

    pub fn param(name: impl Into<String>) -> Expr {
        Expr::Atom(Atom::Param(name.into()))
    }

    pub fn func(name: impl Into<String>, args: Vec<Expr>) -> Expr {
        Expr::Atom(Atom::Func(FuncApp::new(name, args)))
    }

    pub fn func_deriv(name: impl Into<String>, derivs: Vec<u32>, args: Vec<Expr>) -> Expr {
        Expr::Atom(Atom::Func(FuncApp {
            name: name.into(),
            derivs,
            args,
        }))
    }

    pub fn slot(i: u32) -> Expr {
        Expr::Atom(Atom::Slot(i))
    }

    pub fn pow(self, n: i64) -> Expr {
        Expr::Pow(Box::new(self), n)
    }

    pub fn exp(self) -> Expr {
        Expr::Exp(Box::new(self))
    }

    pub fn ln(self) -> Expr {
        Expr::Ln(Box::new(self))
    }

    pub fn as_const(&self) -> Option<&Rational> {
        match self {
            Expr::Const(c) => Some(c),
            _ => None,
        }
    }

    /// True iff the canonical form of `self` is zero.
    pub fn is_zero(&self) -> bool {
        match self {
            Expr::Const(c) => c.is_zero(),
            _ => self.normalize().as_const().is_some_and(|c| c.is_zero()),
        }
    }

    /// Visit every atom of the tree, including atoms nested in function
    /// arguments (the function atom itself is visited first).
    pub fn for_each_atom(&self, f: &mut impl FnMut(&Atom)) {
        match self {
            Expr::Const(_) => {}
            Expr::Atom(a) => {
                f(a);
                if let Atom::Func(app) = a {
                    for arg in &app.args {
                        arg.for_each_atom(f);
                    }
                }
            }
            Expr::Sum(items) | Expr::Product(items) => {
                for item in items {
                    item.for_each_atom(f);
                }
            }
            Expr::Pow(base, _) => base.for_each_atom(f),
            Expr::Exp(arg) | Expr::Ln(arg) => arg.for_each_atom(f),
        }
    }

    pub fn atoms(&self) -> std::collections::BTreeSet<Atom> {
        let mut out = std::collections::BTreeSet::new();
        self.for_each_atom(&mut |a| {
            out.insert(a.clone());
        });
        out
    }

    pub fn jets(&self) -> std::collections::BTreeSet<JetCoordinate> {
        let mut out = std::collections::BTreeSet::new();
        self.for_each_atom(&mut |a| {
            if let Atom::Jet(j) = a {
                out.insert(*j);
            }
        });
        out
    }

    pub fn contains_atom(&self, target: &Atom) -> bool {
        let mut found = false;
        self.for_each_atom(&mut |a| found |= a == target);
        found
    }

    /// Highest total jet order appearing anywhere in the tree.
    pub fn max_jet_order(&self) -> u32 {
        self.jets().iter().map(|j| j.order()).max().unwrap_or(0)
    }
}

impl From<Atom> for Expr {
    fn from(a: Atom) -> Expr {
        Expr::Atom(a)
    }
}

impl From<JetCoordinate> for Expr {
    fn from(j: JetCoordinate) -> Expr {
        Expr::Atom(Atom::Jet(j))
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<Rational> for Expr {
    fn from(r: Rational) -> Expr {
        Expr::Const(r)
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        match (self, rhs) {
            (Expr::Sum(mut a), Expr::Sum(b)) => {
                a.extend(b);
                Expr::Sum(a)
            }
            (Expr::Sum(mut a), b) => {
                a.push(b);
                Expr::Sum(a)
            }
            (a, b) => Expr::Sum(vec![a, b]),
        }
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        self + (-rhs)
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(-c),
            e => Expr::Product(vec![Expr::int(-1), e]),
        }
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        match (self, rhs) {
            (Expr::Product(mut a), Expr::Product(b)) => {
                a.extend(b);
                Expr::Product(a)
            }
            (Expr::Product(mut a), b) => {
                a.push(b);
                Expr::Product(a)
            }
            (a, b) => Expr::Product(vec![a, b]),
        }
    }
}

impl<'a> Add<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        self.clone() + rhs.clone()
    }
}

impl<'a> Sub<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        self.clone() - rhs.clone()
    }
}

impl<'a> Mul<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        self.clone() * rhs.clone()
    }
}

pub fn sum(items: impl IntoIterator<Item = Expr>) -> Expr {
    Expr::Sum(items.into_iter().collect())
}

pub fn product(items: impl IntoIterator<Item = Expr>) -> Expr {
    Expr::Product(items.into_iter().collect())
}
