//! Pretty-printer emitting the parser's grammar.

use std::fmt;

use num_traits::{One, Signed};

use super::{Atom, Expr, Indep, Rational};

const PREC_SUM: u8 = 1;
const PREC_PRODUCT: u8 = 2;
const PREC_POWER: u8 = 4;
const PREC_ATOM: u8 = 5;

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self, 0)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Indep(Indep::T) => f.write_str("t"),
            Atom::Indep(Indep::X) => f.write_str("x"),
            Atom::Jet(j) => write!(f, "{}", j),
            Atom::Param(p) => f.write_str(p),
            Atom::Slot(i) => write!(f, "#{}", i),
            Atom::Func(app) => {
                f.write_str(&app.name)?;
                if app.args.len() == 1 {
                    for _ in 0..app.derivs[0] {
                        f.write_str("'")?;
                    }
                } else if app.derivs.iter().any(|&d| d > 0) {
                    let idx: Vec<String> = app.derivs.iter().map(|d| d.to_string()).collect();
                    write!(f, "[{}]", idx.join(","))?;
                }
                f.write_str("(")?;
                for (i, arg) in app.args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write_expr(f, arg, 0)?;
                }
                f.write_str(")")
            }
        }
    }
}

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Const(c) => {
            if c.is_negative() || !c.is_integer() {
                PREC_PRODUCT
            } else {
                PREC_ATOM
            }
        }
        Expr::Atom(_) | Expr::Exp(_) | Expr::Ln(_) => PREC_ATOM,
        Expr::Sum(items) if items.len() == 1 => precedence(&items[0]),
        Expr::Sum(items) if items.is_empty() => PREC_ATOM,
        Expr::Sum(_) => PREC_SUM,
        Expr::Product(items) if items.len() == 1 => precedence(&items[0]),
        Expr::Product(items) if items.is_empty() => PREC_ATOM,
        Expr::Product(_) => PREC_PRODUCT,
        Expr::Pow(_, _) => PREC_POWER,
    }
}

/// Split off a leading negative sign: `Some(-e)` if `e` prints as a
/// negated term.
fn negated(e: &Expr) -> Option<Expr> {
    match e {
        Expr::Const(c) if c.is_negative() => Some(Expr::Const(-c)),
        Expr::Product(items) if !items.is_empty() => match &items[0] {
            Expr::Const(c) if c.is_negative() => {
                let c = -c;
                let mut rest = items[1..].to_vec();
                if !c.is_one() || rest.is_empty() {
                    rest.insert(0, Expr::Const(c));
                }
                Some(if rest.len() == 1 {
                    rest.pop().unwrap()
                } else {
                    Expr::Product(rest)
                })
            }
            _ => None,
        },
        _ => None,
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, c: &Rational) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr, ctx: u8) -> fmt::Result {
    let paren = precedence(e) < ctx
        || (ctx > PREC_PRODUCT && matches!(e, Expr::Const(c) if c.is_negative() || !c.is_integer()));
    if paren {
        f.write_str("(")?;
    }
    match e {
        Expr::Const(c) => write_rational(f, c)?,
        Expr::Atom(a) => write!(f, "{}", a)?,
        Expr::Sum(items) => {
            if items.is_empty() {
                f.write_str("0")?;
            }
            for (i, item) in items.iter().enumerate() {
                if i == 0 {
                    write_expr(f, item, PREC_SUM)?;
                } else if let Some(pos) = negated(item) {
                    f.write_str(" - ")?;
                    write_expr(f, &pos, PREC_PRODUCT)?;
                } else {
                    f.write_str(" + ")?;
                    write_expr(f, item, PREC_PRODUCT)?;
                }
            }
        }
        Expr::Product(items) => {
            if items.is_empty() {
                f.write_str("1")?;
            }
            // Parameters print ahead of jets: `alpha*v_t^2`.
            let mut items: Vec<&Expr> = items.iter().collect();
            items.sort_by_key(|x| !is_parameter_factor(x));
            let mut first = true;
            for (i, item) in items.iter().enumerate() {
                if i == 0 && items.len() > 1 {
                    if let Expr::Const(c) = item {
                        if (-c).is_one() {
                            f.write_str("-")?;
                            continue;
                        }
                        if c.is_negative() {
                            f.write_str("-")?;
                            write_coefficient(f, &-c)?;
                            f.write_str("*")?;
                            continue;
                        }
                        write_coefficient(f, c)?;
                        f.write_str("*")?;
                        continue;
                    }
                }
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                write_expr(f, item, PREC_POWER)?;
            }
        }
        Expr::Pow(base, n) => {
            write_expr(f, base, PREC_ATOM)?;
            if *n < 0 {
                write!(f, "^({})", n)?;
            } else {
                write!(f, "^{}", n)?;
            }
        }
        Expr::Exp(arg) => {
            f.write_str("exp(")?;
            write_expr(f, arg, 0)?;
            f.write_str(")")?;
        }
        Expr::Ln(arg) => {
            f.write_str("ln(")?;
            write_expr(f, arg, 0)?;
            f.write_str(")")?;
        }
    }
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}

fn is_parameter_factor(e: &Expr) -> bool {
    match e {
        Expr::Const(_) | Expr::Atom(Atom::Param(_)) => true,
        Expr::Pow(b, _) => matches!(**b, Expr::Atom(Atom::Param(_))),
        _ => false,
    }
}

fn write_coefficient(f: &mut fmt::Formatter<'_>, c: &Rational) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "({}/{})", c.numer(), c.denom())
    }
}
