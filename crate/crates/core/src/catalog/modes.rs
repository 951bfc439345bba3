//! Mode functions of the families with arbitrary functions: formal modes
//! carry their constraint as a derivative rewrite rule, closed-form modes
//! become definitions.

use num_traits::{Signed, Zero};

use super::{CatalogEntry, CatalogError, Params};
use crate::expr::{substitute, Atom, Expr, FunctionTable, Indep, Parser, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeKind {
    /// `A(t) B(x)` with two second-order ODEs.
    Separated,
    /// `A(t,x)` solving a Klein-Gordon equation.
    KleinGordon,
    /// Arbitrary profile `B` of one argument.
    Profile,
    /// `A(t,x)` constant along one light-cone direction.
    Travelling,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModeFamily {
    pub name: &'static str,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModeSpec {
    pub kind: ModeKind,
    pub functions: &'static [&'static str],
    /// Expressions required to vanish.
    pub constraints: &'static [&'static str],
    pub families: Vec<ModeFamily>,
}

fn families(names: &[&'static str]) -> Vec<ModeFamily> {
    names.iter().map(|&name| ModeFamily { name }).collect()
}

impl ModeSpec {
    pub fn separated() -> Self {
        ModeSpec {
            kind: ModeKind::Separated,
            functions: &["A(t)", "B(x)"],
            constraints: &[
                "(a^2 - b^2)*A''(t) + (a^2*gamma - b^2*delta)*A(t)",
                "(a^2 - b^2)*B''(x) + (gamma - delta)*B(x)",
            ],
            families: families(&["formal", "even-even", "odd-odd", "even-odd", "odd-even"]),
        }
    }

    pub fn klein_gordon() -> Self {
        ModeSpec {
            kind: ModeKind::KleinGordon,
            functions: &["A(t,x)"],
            constraints: &["A[2,0](t,x) - b^2*A[0,2](t,x) + gamma*A(t,x)"],
            families: families(&["formal", "cos-plane-wave", "sin-plane-wave", "travelling", "bilinear"]),
        }
    }

    pub fn profile() -> Self {
        ModeSpec {
            kind: ModeKind::Profile,
            functions: &["B(zeta)"],
            constraints: &[],
            families: families(&["formal", "square", "cube", "exponential"]),
        }
    }

    pub fn travelling() -> Self {
        ModeSpec {
            kind: ModeKind::Travelling,
            functions: &["A(t,x)"],
            constraints: &["A[1,0](t,x) - s*b*A[0,1](t,x)"],
            families: families(&["formal", "constant", "travelling", "exponential"]),
        }
    }

    /// Function table carrying the chosen mode family, and its name.
    pub fn table(
        &self,
        entry: &CatalogEntry,
        params: &Params,
        index: usize,
    ) -> Result<(FunctionTable, String), CatalogError> {
        let fam = self.families.get(index).ok_or_else(|| CatalogError::ModeUnavailable {
            index,
            reason: format!("{} has {} mode families", entry.family, self.families.len()),
        })?;
        let unavailable = |reason: String| CatalogError::ModeUnavailable { index, reason };
        let mut table = FunctionTable::with_builtins();
        let tmpl = |text: &str| entry.parse_template(text, params);
        match self.kind {
            ModeKind::Separated => {
                if index == 0 {
                    table.add_rule(
                        "A",
                        vec![2],
                        in_slots(&tmpl("-(a^2*gamma - b^2*delta)/(a^2 - b^2)*A(t)")?, &[Indep::T]),
                    );
                    table.add_rule(
                        "B",
                        vec![2],
                        in_slots(&tmpl("-(gamma - delta)/(a^2 - b^2)*B(x)")?, &[Indep::X]),
                    );
                } else {
                    let w2 = numeric(&tmpl("(a^2*gamma - b^2*delta)/(a^2 - b^2)")?)
                        .ok_or_else(|| unavailable("closed-form modes need numeric a, b, gamma, delta".into()))?;
                    let k2 = numeric(&tmpl("(gamma - delta)/(a^2 - b^2)")?)
                        .ok_or_else(|| unavailable("closed-form modes need numeric a, b, gamma, delta".into()))?;
                    let even_a = index == 1 || index == 3;
                    let even_b = index == 1 || index == 4;
                    let a = second_order_mode(&w2, even_a)
                        .ok_or_else(|| unavailable(format!("frequency^2 = {} has no rational square root", w2)))?;
                    let b = second_order_mode(&k2, even_b)
                        .ok_or_else(|| unavailable(format!("wave number^2 = {} has no rational square root", k2)))?;
                    table.define("A", 1, a);
                    table.define("B", 1, b);
                }
            }
            ModeKind::KleinGordon => {
                let gamma = params.get("gamma");
                match index {
                    0 => {
                        let rhs = tmpl("b^2*A[0,2](t,x) - gamma*A(t,x)")?;
                        table.add_rule("A", vec![2, 0], in_slots(&rhs, &[Indep::T, Indep::X]));
                    }
                    1 | 2 => {
                        let (Some(b), Some(gamma)) = (params.get("b"), gamma) else {
                            return Err(unavailable("plane waves need numeric b, gamma".into()));
                        };
                        let (k, w) = plane_wave(b, gamma).ok_or_else(|| {
                            unavailable(format!(
                                "no rational wave number with rational frequency for b = {}, gamma = {}",
                                b, gamma
                            ))
                        })?;
                        let phase = Expr::rational(k) * Expr::slot(1) - Expr::rational(w) * Expr::slot(0);
                        let name = if index == 1 { "cos" } else { "sin" };
                        table.define("A", 2, Expr::func(name, vec![phase]));
                    }
                    _ => {
                        if gamma.map_or(true, |g| !g.is_zero()) {
                            return Err(unavailable("travelling and bilinear modes need gamma = 0".into()));
                        }
                        let body = if index == 3 {
                            in_slots(&tmpl("W(x - b*t)")?, &[Indep::T, Indep::X])
                        } else {
                            Expr::slot(0) * Expr::slot(1)
                        };
                        table.define("A", 2, body);
                    }
                }
            }
            ModeKind::Profile => {
                if index > 0 {
                    let text = ["", "z^2", "z^3", "exp(z)"][index];
                    let body = Parser::new(&[])
                        .with_locals(&["z"])
                        .parse(text)
                        .expect("static profile");
                    table.define("B", 1, body);
                }
            }
            ModeKind::Travelling => match index {
                0 => {
                    let rhs = tmpl("s*b*A[0,1](t,x)")?;
                    table.add_rule("A", vec![1, 0], in_slots(&rhs, &[Indep::T, Indep::X]));
                }
                1 => table.define("A", 2, Expr::one()),
                2 => table.define("A", 2, in_slots(&tmpl("W(x + s*b*t)")?, &[Indep::T, Indep::X])),
                _ => table.define("A", 2, in_slots(&tmpl("exp(x + s*b*t)")?, &[Indep::T, Indep::X])),
            },
        }
        Ok((table, fam.name.to_string()))
    }

    /// Constraint expressions reduced with the chosen family's table; all
    /// vanish for a valid mode.
    pub fn constraint_residuals(
        &self,
        entry: &CatalogEntry,
        params: &Params,
        index: usize,
    ) -> Result<Vec<Expr>, CatalogError> {
        let (table, _) = self.table(entry, params, index)?;
        self.constraints
            .iter()
            .map(|c| Ok(table.expand_definitions(&entry.parse_template(c, params)?)))
            .collect()
    }
}

fn numeric(e: &Expr) -> Option<Rational> {
    e.normalize().constant_value()
}

fn in_slots(e: &Expr, order: &[Indep]) -> Expr {
    substitute(e, &|a| match a {
        Atom::Indep(i) => order.iter().position(|o| o == i).map(|k| Expr::slot(k as u32)),
        _ => None,
    })
    .normalize()
}

pub(crate) fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}

/// Solution of `y'' + λ² y = 0` in slot 0: `cos`/`sin` when λ² > 0,
/// `exp(±r s)` when λ² = -r² < 0, and `1`/`s` when λ² = 0.
fn second_order_mode(lambda2: &Rational, even: bool) -> Option<Expr> {
    let s = Expr::slot(0);
    if lambda2.is_zero() {
        return Some(if even { Expr::one() } else { s });
    }
    if lambda2.is_positive() {
        let l = rational_sqrt(lambda2)?;
        let name = if even { "cos" } else { "sin" };
        return Some(Expr::func(name, vec![Expr::rational(l) * s]));
    }
    let r = rational_sqrt(&-lambda2.clone())?;
    let r = if even { r } else { -r };
    Some((Expr::rational(r) * s).exp())
}

/// Smallest `k = n/m` (n ≤ 24, m ≤ 4) with `b²k² + γ` a positive rational
/// square `w²`.
fn plane_wave(b: &Rational, gamma: &Rational) -> Option<(Rational, Rational)> {
    for m in 1..=4i64 {
        for n in 1..=24i64 {
            let k = Rational::new(n.into(), m.into());
            let w2 = b * b * &k * &k + gamma;
            if w2.is_positive() {
                if let Some(w) = rational_sqrt(&w2) {
                    return Some((k, w));
                }
            }
        }
    }
    None
}
