//! Partial derivatives, substitution and the restricted single-variable
//! integrator used by reconstruction.

use num_traits::One;
use thiserror::Error;

use super::{Atom, Expr, FuncApp, FunctionTable, Rational};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum CalculusError {
    #[error("cannot integrate `{term}` with respect to {var}")]
    Unsupported { term: String, var: String },
    #[error("gradient components are incompatible: {0}")]
    Incompatible(String),
}

fn normalize_atom(a: &Atom) -> Atom {
    match Expr::Atom(a.clone()).normalize() {
        Expr::Atom(n) => n,
        _ => a.clone(),
    }
}

/// `∂e/∂a`, every other atom held fixed. Differentiates through function
/// arguments by the chain rule. The result is normalized.
pub fn partial(e: &Expr, a: &Atom) -> Expr {
    let a = normalize_atom(a);
    let e = e.normalize();
    match diff(&e, &a) {
        Some(d) => d.normalize(),
        None => Expr::zero(),
    }
}

/// [`partial`] for an already normalized `e` and atom `a`.
pub(crate) fn partial_normal(e: &Expr, a: &Atom) -> Expr {
    match diff(e, a) {
        Some(d) => d.normalize(),
        None => Expr::zero(),
    }
}

/// [`partial`] followed by rule reduction in `table`.
pub fn partial_in(e: &Expr, a: &Atom, table: &FunctionTable) -> Expr {
    table.reduce(&partial(e, a))
}

fn diff(e: &Expr, a: &Atom) -> Option<Expr> {
    match e {
        Expr::Const(_) => None,
        Expr::Atom(b) => {
            if b == a {
                return Some(Expr::one());
            }
            let Atom::Func(app) = b else { return None };
            let mut terms = Vec::new();
            for (k, arg) in app.args.iter().enumerate() {
                if let Some(d) = diff(arg, a) {
                    let mut derivs = app.derivs.clone();
                    derivs[k] += 1;
                    let outer = Expr::Atom(Atom::Func(FuncApp {
                        name: app.name.clone(),
                        derivs,
                        args: app.args.clone(),
                    }));
                    terms.push(outer * d);
                }
            }
            non_empty_sum(terms)
        }
        Expr::Sum(items) => non_empty_sum(items.iter().filter_map(|i| diff(i, a)).collect()),
        Expr::Product(items) => {
            let mut terms = Vec::new();
            for (i, item) in items.iter().enumerate() {
                if let Some(d) = diff(item, a) {
                    let mut factors = Vec::with_capacity(items.len());
                    for (j, other) in items.iter().enumerate() {
                        if i != j {
                            factors.push(other.clone());
                        }
                    }
                    factors.push(d);
                    terms.push(Expr::Product(factors));
                }
            }
            non_empty_sum(terms)
        }
        Expr::Pow(base, n) => {
            let d = diff(base, a)?;
            Some(Expr::Product(vec![Expr::int(*n), Expr::Pow(base.clone(), n - 1), d]))
        }
        Expr::Exp(arg) => {
            let d = diff(arg, a)?;
            Some(Expr::Product(vec![e.clone(), d]))
        }
        Expr::Ln(arg) => {
            let d = diff(arg, a)?;
            Some(Expr::Product(vec![Expr::Pow(arg.clone(), -1), d]))
        }
    }
}

fn non_empty_sum(mut terms: Vec<Expr>) -> Option<Expr> {
    match terms.len() {
        0 => None,
        1 => terms.pop(),
        _ => Some(Expr::Sum(terms)),
    }
}

/// Replace atoms for which `f` returns `Some`. Function arguments are
/// visited only when `f` declines the whole function atom. Not normalized.
pub fn substitute(e: &Expr, f: &dyn Fn(&Atom) -> Option<Expr>) -> Expr {
    match e {
        Expr::Const(_) => e.clone(),
        Expr::Atom(a) => {
            if let Some(r) = f(a) {
                return r;
            }
            match a {
                Atom::Func(app) => Expr::Atom(Atom::Func(FuncApp {
                    name: app.name.clone(),
                    derivs: app.derivs.clone(),
                    args: app.args.iter().map(|x| substitute(x, f)).collect(),
                })),
                _ => e.clone(),
            }
        }
        Expr::Sum(items) => Expr::Sum(items.iter().map(|x| substitute(x, f)).collect()),
        Expr::Product(items) => Expr::Product(items.iter().map(|x| substitute(x, f)).collect()),
        Expr::Pow(b, n) => Expr::Pow(Box::new(substitute(b, f)), *n),
        Expr::Exp(x) => Expr::Exp(Box::new(substitute(x, f))),
        Expr::Ln(x) => Expr::Ln(Box::new(substitute(x, f))),
    }
}

/// Replace one atom by an expression. Normalized.
pub fn substitute_atom(e: &Expr, target: &Atom, value: &Expr) -> Expr {
    let target = normalize_atom(target);
    substitute(&e.normalize(), &|a| (a == &target).then(|| value.clone())).normalize()
}

fn unsupported(term: &Expr, s: &Atom) -> CalculusError {
    CalculusError::Unsupported {
        term: term.to_string(),
        var: s.to_string(),
    }
}

/// Antiderivative of `e` in the atom `s` (no constant of integration).
///
/// Each monomial must have one of the shapes `c * s^m`,
/// `c * s^m * exp(λ s + r)` with `m ≥ 0`, or `c * s^m * F(λ s + r)` with
/// `m ≥ 0`, where `λ` and `c` are free of `s`. For a formal `F` the
/// antiderivative is found by lowering a derivative index or through a rule
/// `H' = k F` in `table`.
pub fn integrate(e: &Expr, s: &Atom, table: &FunctionTable) -> Result<Expr, CalculusError> {
    let s = normalize_atom(s);
    let mut out = Vec::new();
    for m in e.normalize().monomials() {
        let term = Expr::from_monomials([m.clone()]);
        if !term.contains_atom(&s) {
            out.push(term * Expr::Atom(s.clone()));
            continue;
        }
        let mut free = vec![Expr::Const(m.coeff.clone())];
        let mut power = 0i64;
        let mut special: Option<Expr> = None;
        for (k, n) in &m.factors {
            if !k.contains_atom(&s) {
                free.push(Expr::Pow(Box::new(k.clone()), *n));
            } else if matches!(k, Expr::Atom(a) if *a == s) {
                power = *n;
            } else if *n == 1 && special.is_none() && matches!(k, Expr::Atom(Atom::Func(_))) {
                special = Some(k.clone());
            } else {
                return Err(unsupported(&term, &s));
            }
        }
        if let Some(arg) = &m.exp {
            if arg.contains_atom(&s) {
                if special.is_some() {
                    return Err(unsupported(&term, &s));
                }
                special = Some(Expr::Exp(Box::new(arg.clone())));
            } else {
                free.push(Expr::Exp(Box::new(arg.clone())));
            }
        }
        let free = Expr::Product(free);
        let piece = match special {
            None => {
                if power == -1 {
                    Expr::Atom(s.clone()).ln()
                } else {
                    Expr::Const(Rational::one() / Rational::from_integer((power + 1).into()))
                        * Expr::Atom(s.clone()).pow(power + 1)
                }
            }
            Some(k) => {
                if power < 0 {
                    return Err(unsupported(&term, &s));
                }
                integrate_special(power as u32, &k, &s, table).ok_or_else(|| unsupported(&term, &s))?
            }
        };
        out.push(free * piece);
    }
    Ok(table.reduce(&Expr::Sum(out)))
}

/// Linear coefficient of `arg` in `s`, if `arg = λ s + r` with `λ` free of `s`.
fn linear_coefficient(arg: &Expr, s: &Atom) -> Option<Expr> {
    let lambda = partial(arg, s);
    if lambda.is_zero() || lambda.contains_atom(s) {
        return None;
    }
    Some(lambda)
}

/// `∫ s^m k ds` for `k = exp(λ s + r)` or `k = F^{(n)}(..., λ s + r, ...)`.
fn integrate_special(m: u32, k: &Expr, s: &Atom, table: &FunctionTable) -> Option<Expr> {
    let sv = Expr::Atom(s.clone());
    match k {
        Expr::Exp(arg) => {
            let lambda = linear_coefficient(arg, s)?;
            let inv = lambda.pow(-1);
            // ∫ s^m e^{λs} = e^{λs} Σ_j (-1)^j m!/(m-j)! s^{m-j} / λ^{j+1}
            let mut terms = Vec::new();
            let mut falling = Rational::one();
            for j in 0..=m {
                if j > 0 {
                    falling *= Rational::from_integer((m - j + 1).into());
                }
                let sign = if j % 2 == 0 { Rational::one() } else { -Rational::one() };
                terms.push(Expr::Product(vec![
                    Expr::Const(sign * falling.clone()),
                    sv.clone().pow((m - j) as i64),
                    inv.clone().pow(j as i64 + 1),
                ]));
            }
            Some(Expr::Sum(terms) * k.clone())
        }
        Expr::Atom(Atom::Func(app)) => {
            let dependent: Vec<usize> = (0..app.args.len()).filter(|&i| app.args[i].contains_atom(s)).collect();
            if dependent.len() != 1 {
                return None;
            }
            let slot = dependent[0];
            let lambda = linear_coefficient(&app.args[slot], s)?;
            let lower = if app.derivs[slot] > 0 {
                let mut derivs = app.derivs.clone();
                derivs[slot] -= 1;
                Expr::Atom(Atom::Func(FuncApp {
                    name: app.name.clone(),
                    derivs,
                    args: app.args.clone(),
                }))
            } else if app.args.len() == 1 {
                let (h, c) = table.antiderivative_of(&app.name)?;
                Expr::Const(c.recip()) * Expr::func(h, app.args.clone())
            } else {
                return None;
            };
            let inv = lambda.pow(-1);
            let head = Expr::Product(vec![sv.clone().pow(m as i64), lower.clone(), inv.clone()]);
            if m == 0 {
                return Some(head);
            }
            let lower = match &lower {
                Expr::Atom(_) => lower.clone(),
                other => table.reduce(other),
            };
            let rest = integrate(&(sv.pow(m as i64 - 1) * lower), s, table).ok()?;
            Some(head - Expr::Product(vec![Expr::int(m as i64), inv, rest]))
        }
        _ => None,
    }
}

/// Potential `Φ` with `∂Φ/∂s_i = c_i` for every `(s_i, c_i)`.
pub fn integrate_gradient(components: &[(Atom, Expr)], table: &FunctionTable) -> Result<Expr, CalculusError> {
    let mut phi = Expr::zero();
    for (i, (s, c)) in components.iter().enumerate() {
        let rem = table.reduce(&(c.clone() - partial_in(&phi, s, table)));
        if rem.is_zero() {
            continue;
        }
        if let Some((prev, _)) = components[..i].iter().find(|(p, _)| rem.contains_atom(p)) {
            return Err(CalculusError::Incompatible(format!(
                "component for {} depends on {}",
                s, prev
            )));
        }
        phi = (phi + integrate(&rem, s, table)?).normalize();
    }
    for (s, c) in components {
        if !table.reduce(&(partial_in(&phi, s, table) - c.clone())).is_zero() {
            return Err(CalculusError::Incompatible(format!("∂/∂{} mismatch", s)));
        }
    }
    Ok(table.reduce(&phi))
}

impl Expr {
    pub fn partial(&self, a: &Atom) -> Expr {
        partial(self, a)
    }

    pub fn substitute_atom(&self, target: &Atom, value: &Expr) -> Expr {
        substitute_atom(self, target, value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Var, DEFAULT_PARAMETERS};

    fn p(s: &str) -> Expr {
        parse(s, DEFAULT_PARAMETERS).unwrap()
    }

    fn jet(d: Var, i: u32, j: u32) -> Atom {
        Atom::Jet(crate::expr::JetCoordinate::new(d, i, j))
    }

    #[test]
    fn basic_partials() {
        assert_eq!(partial(&p("u_t*v_x"), &jet(Var::U, 1, 0)), p("v_x").normalize());
        assert_eq!(
            partial(&p("exp(delta*u)"), &jet(Var::U, 0, 0)),
            p("delta*exp(delta*u)").normalize()
        );
        assert_eq!(partial(&p("ln(u^2)"), &jet(Var::U, 0, 0)), p("2/u").normalize());
    }

    #[test]
    fn chain_rule_through_function_argument() {
        let zeta = "alpha*u_t - v_t + b*(alpha*u_x - v_x)";
        let e = p(&format!("B({})", zeta));
        let d = partial(&e, &jet(Var::U, 1, 0));
        assert_eq!(d, p(&format!("alpha*B'({})", zeta)).normalize());
    }

    #[test]
    fn partial_by_function_atom() {
        let f = match p("f(v)").normalize() {
            Expr::Atom(a) => a,
            _ => unreachable!(),
        };
        assert_eq!(partial(&p("3*f(v)^2*u"), &f), p("6*f(v)*u").normalize());
    }

    #[test]
    fn integrate_powers_and_logs() {
        let t = FunctionTable::new();
        let u = jet(Var::U, 0, 0);
        assert_eq!(
            integrate(&p("3*u^2 + alpha"), &u, &t).unwrap(),
            p("u^3 + alpha*u").normalize()
        );
        assert_eq!(integrate(&p("beta/u"), &u, &t).unwrap(), p("beta*ln(u)").normalize());
        assert_eq!(integrate(&p("u^(-3)"), &u, &t).unwrap(), p("-(1/2)*u^(-2)").normalize());
    }

    #[test]
    fn integrate_exponentials() {
        let t = FunctionTable::new();
        let u = jet(Var::U, 0, 0);
        let r = integrate(&p("u*exp(2*u + v)"), &u, &t).unwrap();
        assert_eq!(partial(&r, &u), p("u*exp(2*u + v)").normalize());
        let r = integrate(&p("u^3*exp(-delta*u)"), &u, &t).unwrap();
        assert_eq!(partial(&r, &u), p("u^3*exp(-delta*u)").normalize());
    }

    #[test]
    fn integrate_formal_functions() {
        let mut t = FunctionTable::with_builtins();
        t.add_rule("F", vec![1], Expr::func("f", vec![Expr::slot(0)]));
        let v = jet(Var::V, 0, 0);
        assert_eq!(integrate(&p("f(v)"), &v, &t).unwrap(), p("F(v)").normalize());
        let ut = jet(Var::U, 1, 0);
        let e = p("u_t*B''(alpha*u_t - v_t)");
        let r = integrate(&e, &ut, &t).unwrap();
        assert_eq!(partial(&r, &ut), e.normalize());
        let x = Atom::Indep(crate::expr::Indep::X);
        let r = integrate(&p("x*sin(2*x)"), &x, &t).unwrap();
        assert_eq!(partial_in(&r, &x, &t), p("x*sin(2*x)").normalize());
        assert!(integrate(&p("g(v)"), &v, &t).is_err());
        assert!(integrate(&p("exp(v^2)"), &v, &t).is_err());
    }

    #[test]
    fn gradient_integration() {
        let t = FunctionTable::new();
        let (u, v) = (jet(Var::U, 0, 0), jet(Var::V, 0, 0));
        let phi = integrate_gradient(&[(u.clone(), p("2*u*v")), (v.clone(), p("u^2 + 1"))], &t).unwrap();
        assert_eq!(phi, p("u^2*v + v").normalize());
        assert!(integrate_gradient(&[(u, p("v")), (v, p("2*u"))], &t).is_err());
    }
}
