//! Jet-space calculus: total derivatives, spatial and higher Euler
//! operators, variational derivatives and the divergence test.

mod system;

use num_bigint::BigInt;
use thiserror::Error;

use crate::expr::calculus::partial_normal;
use crate::expr::{Atom, Expr, FunctionTable, Indep, JetCoordinate, Rational, Var, DEFAULT_MAX_JET_ORDER};

pub use system::{PdeSystem, SystemError};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum JetError {
    #[error("jet coordinate {jet} exceeds the maximum order {max}")]
    OrderOverflow { jet: JetCoordinate, max: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    T,
    X,
}

/// Dependent-variable family for the spatial Euler operators: `u`, `v`,
/// `u_t` or `v_t`, each with its own tower of x-derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Family {
    pub dependent: Var,
    pub t_order: u32,
}

impl Family {
    pub const U: Family = Family {
        dependent: Var::U,
        t_order: 0,
    };
    pub const V: Family = Family {
        dependent: Var::V,
        t_order: 0,
    };
    pub const UT: Family = Family {
        dependent: Var::U,
        t_order: 1,
    };
    pub const VT: Family = Family {
        dependent: Var::V,
        t_order: 1,
    };

    pub fn jet(self, x_order: u32) -> JetCoordinate {
        JetCoordinate::new(self.dependent, self.t_order, x_order)
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.jet(0))
    }
}

/// Total derivatives with a function table and a bound on jet order.
#[derive(Clone, Debug, PartialEq)]
pub struct JetSpace {
    pub functions: FunctionTable,
    pub max_order: u32,
}

impl Default for JetSpace {
    fn default() -> Self {
        JetSpace {
            functions: FunctionTable::with_builtins(),
            max_order: DEFAULT_MAX_JET_ORDER,
        }
    }
}

fn binomial(n: u32, k: u32) -> Rational {
    let mut r = BigInt::from(1);
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Rational::from_integer(r)
}

impl JetSpace {
    pub fn new(functions: FunctionTable, max_order: u32) -> Self {
        JetSpace { functions, max_order }
    }

    /// Total derivative `D_t` or `D_x`.
    pub fn total_d(&self, e: &Expr, dir: Dir) -> Result<Expr, JetError> {
        let e = self.functions.reduce(e);
        let mut terms = Vec::new();
        for a in e.atoms() {
            let step = match &a {
                Atom::Jet(j) => {
                    let next = match dir {
                        Dir::T => JetCoordinate::new(j.dependent, j.t_order + 1, j.x_order),
                        Dir::X => JetCoordinate::new(j.dependent, j.t_order, j.x_order + 1),
                    };
                    if next.order() > self.max_order {
                        return Err(JetError::OrderOverflow {
                            jet: next,
                            max: self.max_order,
                        });
                    }
                    Expr::from(next)
                }
                Atom::Indep(Indep::T) if dir == Dir::T => Expr::one(),
                Atom::Indep(Indep::X) if dir == Dir::X => Expr::one(),
                _ => continue,
            };
            let d = partial_normal(&e, &a);
            if !d.is_zero() {
                terms.push(d * step);
            }
        }
        Ok(self.functions.reduce(&Expr::Sum(terms)))
    }

    pub fn total_d_n(&self, e: &Expr, dir: Dir, n: u32) -> Result<Expr, JetError> {
        let mut out = e.normalize();
        for _ in 0..n {
            if out.is_zero() {
                break;
            }
            out = self.total_d(&out, dir)?;
        }
        Ok(out)
    }

    fn top_x_order(e: &Expr, fam: Family) -> Option<u32> {
        e.jets()
            .iter()
            .filter(|j| j.dependent == fam.dependent && j.t_order == fam.t_order)
            .map(|j| j.x_order)
            .max()
    }

    /// `E_w = Σ_j (-D_x)^j ∂/∂w_{x^j}` for the family `w`.
    pub fn euler_spatial(&self, e: &Expr, fam: Family) -> Result<Expr, JetError> {
        self.euler_higher_inner(e, fam, 0)
    }

    /// `E_w^{(k)} = Σ_{j≥k} C(j,k) (-D_x)^{j-k} ∂/∂w_{x^j}`.
    pub fn euler_higher(&self, e: &Expr, fam: Family, k: u32) -> Result<Expr, JetError> {
        self.euler_higher_inner(e, fam, k)
    }

    fn euler_higher_inner(&self, e: &Expr, fam: Family, k: u32) -> Result<Expr, JetError> {
        let e = self.functions.reduce(e);
        let Some(top) = Self::top_x_order(&e, fam) else {
            return Ok(Expr::zero());
        };
        if top < k {
            return Ok(Expr::zero());
        }
        // Horner form: P_k - D_x(P_{k+1} - D_x(P_{k+2} - ...)), with
        // P_j = C(j,k) ∂e/∂w_{x^j}.
        let mut acc = Expr::zero();
        for j in (k..=top).rev() {
            let pj = partial_normal(&e, &Atom::Jet(fam.jet(j)));
            let pj = Expr::Const(binomial(j, k)) * pj;
            acc = if j == top {
                pj.normalize()
            } else {
                (pj - self.total_d(&acc, Dir::X)?).normalize()
            };
        }
        Ok(self.functions.reduce(&acc))
    }

    /// Full space-time variational derivative `δe/δw`.
    pub fn variational_derivative(&self, e: &Expr, w: Var) -> Result<Expr, JetError> {
        let e = self.functions.reduce(e);
        let jets: Vec<JetCoordinate> = e.jets().into_iter().filter(|j| j.dependent == w).collect();
        let mut terms = Vec::new();
        for j in jets {
            let mut d = partial_normal(&e, &Atom::Jet(j));
            for _ in 0..j.t_order {
                d = (-self.total_d(&d, Dir::T)?).normalize();
            }
            for _ in 0..j.x_order {
                d = (-self.total_d(&d, Dir::X)?).normalize();
            }
            terms.push(d);
        }
        Ok(self.functions.reduce(&Expr::Sum(terms)))
    }

    /// Whether `e` is an identical space-time divergence; returns the two
    /// variational derivatives as witnesses.
    pub fn is_divergence(&self, e: &Expr) -> Result<(bool, Expr, Expr), JetError> {
        let ru = self.variational_derivative(e, Var::U)?;
        let rv = self.variational_derivative(e, Var::V)?;
        Ok((ru.is_zero() && rv.is_zero(), ru, rv))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Parser, DEFAULT_PARAMETERS};

    fn p(s: &str) -> Expr {
        parse(s, DEFAULT_PARAMETERS).unwrap()
    }

    fn n(s: &str) -> Expr {
        p(s).normalize()
    }

    #[test]
    fn total_derivatives() {
        let js = JetSpace::default();
        assert_eq!(js.total_d(&p("u"), Dir::T).unwrap(), n("u_t"));
        assert_eq!(js.total_d(&p("u_t*v"), Dir::X).unwrap(), n("u_tx*v + u_t*v_x"));
        assert_eq!(js.total_d(&p("t*x^2"), Dir::X).unwrap(), n("2*t*x"));
        assert_eq!(js.total_d(&p("f(v)"), Dir::T).unwrap(), n("f'(v)*v_t"));
    }

    #[test]
    fn total_derivative_uses_antiderivative_rule() {
        let mut ft = FunctionTable::new();
        ft.add_rule("F", vec![1], Expr::func("f", vec![Expr::slot(0)]));
        let js = JetSpace::new(ft, 8);
        assert_eq!(js.total_d(&p("F(v)"), Dir::T).unwrap(), n("f(v)*v_t"));
    }

    #[test]
    fn jet_order_overflow() {
        let js = JetSpace::new(FunctionTable::new(), 3);
        assert!(js.total_d(&p("u_txx"), Dir::X).is_err());
        let e = Parser::new(DEFAULT_PARAMETERS)
            .with_max_jet_order(10)
            .parse("u_ttttxxxx")
            .unwrap();
        assert!(matches!(
            JetSpace::default().total_d(&e, Dir::T),
            Err(JetError::OrderOverflow { .. })
        ));
    }

    #[test]
    fn euler_operator_examples() {
        let js = JetSpace::default();
        assert_eq!(js.euler_spatial(&p("u_x^2"), Family::U).unwrap(), n("-2*u_xx"));
        assert_eq!(
            js.euler_spatial(&p("(1/2)*alpha*v_t^2 + (1/2)*beta*u_t^2 - u_t*v_t"), Family::UT)
                .unwrap(),
            n("beta*u_t - v_t")
        );
        let div = js.total_d(&p("u^2*u_x"), Dir::X).unwrap();
        assert!(js.euler_spatial(&div, Family::U).unwrap().is_zero());
    }

    #[test]
    fn higher_euler_examples() {
        let js = JetSpace::default();
        assert_eq!(js.euler_higher(&p("u_x^2"), Family::U, 1).unwrap(), n("2*u_x"));
        assert_eq!(js.euler_higher(&p("u*u_xx"), Family::U, 2).unwrap(), n("u"));
        assert!(js.euler_higher(&p("u"), Family::U, 1).unwrap().is_zero());
        assert_eq!(js.euler_higher(&p("u_xx^2"), Family::U, 1).unwrap(), n("-4*u_xxx"));
    }

    #[test]
    fn variational_derivative_examples() {
        let js = JetSpace::default();
        assert_eq!(js.variational_derivative(&p("u_t*v_t"), Var::U).unwrap(), n("-v_tt"));
        assert_eq!(
            js.variational_derivative(&p("(1/2)*u_t^2 - (1/2)*a^2*u_x^2"), Var::U)
                .unwrap(),
            n("-u_tt + a^2*u_xx")
        );
        let e = js.total_d(&p("u*v"), Dir::T).unwrap() + js.total_d(&p("u_x*v"), Dir::X).unwrap();
        assert!(js.variational_derivative(&e, Var::U).unwrap().is_zero());
    }

    #[test]
    fn divergence_examples() {
        let js = JetSpace::default();
        let e = p("(u_tt - b^2*u_xx + f(v))*v_x + (v_tt - b^2*v_xx + g(u))*u_x");
        assert!(js.is_divergence(&e).unwrap().0);
        let e = p("(u_tt - a^2*u_xx + f(v))*v_x + (v_tt - b^2*v_xx + g(u))*u_x");
        let (ok, ru, rv) = js.is_divergence(&e).unwrap();
        assert!(!ok);
        // Each residual carries the factor a^2 - b^2.
        for r in [ru, rv] {
            let b_eq_a = r.substitute_atom(&Atom::Param("b".into()), &Expr::param("a"));
            assert!(b_eq_a.is_zero());
            assert!(!r.is_zero());
        }
        let (ok, ru, _) = js.is_divergence(&p("u_t*v_t")).unwrap();
        assert!(!ok);
        assert_eq!(ru, n("-v_tt"));
    }
}
