//! Reflection `u ↔ v` and scaling `u → p u`, `v → q v`, acting on systems
//! and density/flux pairs.
//!
//! Formal nonlinearities keep their canonical names: under scaling the
//! formal `f` of the new system is `f_new(v) = f_old(q v) / p`, so every
//! application of the old function is rewritten in terms of the new one.

use num_traits::{One, Zero};

use super::CatalogError;
use crate::expr::{Atom, Expr, FuncApp, JetCoordinate, Rational, Var};
use crate::jetcalc::PdeSystem;
use crate::verifier::DensityFluxPair;

#[derive(Clone, Debug, PartialEq)]
pub enum EquivalenceTransform {
    Reflect,
    Scale(Rational, Rational),
}

impl EquivalenceTransform {
    pub fn inverse(&self) -> Result<Self, CatalogError> {
        match self {
            EquivalenceTransform::Reflect => Ok(EquivalenceTransform::Reflect),
            EquivalenceTransform::Scale(p, q) => {
                if p.is_zero() || q.is_zero() {
                    return Err(CatalogError::ZeroScale);
                }
                Ok(EquivalenceTransform::Scale(p.recip(), q.recip()))
            }
        }
    }
}

const NONLINEAR_NAMES: [&str; 6] = ["c", "f", "d", "g", "F", "G"];

fn reflect_name(name: &str) -> Option<&'static str> {
    Some(match name {
        "c" => "d",
        "d" => "c",
        "f" => "g",
        "g" => "f",
        "F" => "G",
        "G" => "F",
        _ => return None,
    })
}

fn map_expr(e: &Expr, tr: &EquivalenceTransform) -> Expr {
    crate::expr::substitute(e, &|a| match a {
        Atom::Jet(j) => Some(match tr {
            EquivalenceTransform::Reflect => Expr::from(JetCoordinate::new(j.dependent.other(), j.t_order, j.x_order)),
            EquivalenceTransform::Scale(p, q) => {
                let k = if j.dependent == Var::U { p } else { q };
                Expr::rational(k.clone()) * Expr::from(*j)
            }
        }),
        Atom::Func(app) if NONLINEAR_NAMES.contains(&app.name.as_str()) => {
            let args: Vec<Expr> = app.args.iter().map(|x| map_expr(x, tr)).collect();
            Some(map_function(app, args, tr))
        }
        _ => None,
    })
}

fn map_function(app: &FuncApp, args: Vec<Expr>, tr: &EquivalenceTransform) -> Expr {
    match tr {
        EquivalenceTransform::Reflect => Expr::func_deriv(
            reflect_name(&app.name).expect("nonlinearity name"),
            app.derivs.clone(),
            args,
        ),
        EquivalenceTransform::Scale(p, q) => {
            // (amplitude, argument scale) of old = amplitude * new(arg / scale).
            let (amp, s) = match app.name.as_str() {
                "c" => (p.clone(), p.clone()),
                "f" => (p.clone(), q.clone()),
                "d" => (q.clone(), q.clone()),
                "g" => (q.clone(), p.clone()),
                "F" => (p * q, q.clone()),
                _ => (p * q, p.clone()),
            };
            let n: u32 = app.derivs.iter().sum();
            let mut factor = amp;
            for _ in 0..n {
                factor /= &s;
            }
            let args = args.into_iter().map(|x| Expr::rational(s.recip()) * x).collect();
            Expr::rational(factor) * Expr::func_deriv(app.name.clone(), app.derivs.clone(), args)
        }
    }
}

/// Transform a system and a density/flux pair. The transformed pair is
/// conserved for the transformed system whenever the input pair is.
pub fn apply_equivalence(
    tr: &EquivalenceTransform,
    sys: &PdeSystem,
    pair: &DensityFluxPair,
) -> Result<(PdeSystem, DensityFluxPair), CatalogError> {
    let one = Rational::one();
    let (amp_u, amp_v) = match tr {
        EquivalenceTransform::Reflect => (one.clone(), one),
        EquivalenceTransform::Scale(p, q) => {
            if p.is_zero() || q.is_zero() {
                return Err(CatalogError::ZeroScale);
            }
            (p.recip(), q.recip())
        }
    };
    let m = |e: &Expr| map_expr(&sys.prepare(e), tr).normalize();
    let (a, b, c, f, d, g) = match tr {
        EquivalenceTransform::Reflect => (sys.b.clone(), sys.a.clone(), m(&sys.d), m(&sys.g), m(&sys.c), m(&sys.f)),
        EquivalenceTransform::Scale(..) => (
            sys.a.clone(),
            sys.b.clone(),
            Expr::rational(amp_u.clone()) * m(&sys.c),
            Expr::rational(amp_u) * m(&sys.f),
            Expr::rational(amp_v.clone()) * m(&sys.d),
            Expr::rational(amp_v) * m(&sys.g),
        ),
    };
    let mut table = sys.functions().clone();
    for name in NONLINEAR_NAMES {
        table.remove(name);
    }
    let new_sys = PdeSystem::with_table(a, b, c, f, d, g, table, sys.space.max_order)?
        .with_singular_at_zero(sys.singular_at_zero);
    let new_pair = DensityFluxPair::new(m(&pair.t_density), m(&pair.x_flux));
    Ok((new_sys, new_pair))
}
