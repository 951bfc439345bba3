//! Canonical normal form.
//!
//! The normal form is a fully expanded sum of monomials. A monomial is a
//! rational coefficient times a sorted list of `(kernel, exponent)` pairs and
//! at most one exponential whose argument collects every `Exp` factor.
//! Kernels are atoms (with normalized function arguments), `Ln` of a
//! normalized argument, or a normalized multi-term sum raised to a negative
//! power with unit leading coefficient.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::{Atom, Expr, FuncApp, Rational};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Mono {
    factors: Vec<(Expr, i64)>,
    exp: Option<Poly>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Poly(BTreeMap<Mono, Rational>);

/// Public view of one monomial of a normalized expression.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub coeff: Rational,
    /// Kernels with their integer exponents, in canonical order.
    pub factors: Vec<(Expr, i64)>,
    /// Argument of the merged exponential factor, if any.
    pub exp: Option<Expr>,
}

impl Mono {
    fn unit() -> Mono {
        Mono {
            factors: Vec::new(),
            exp: None,
        }
    }

    fn kernel(k: Expr) -> Mono {
        Mono {
            factors: vec![(k, 1)],
            exp: None,
        }
    }

    fn mul(&self, other: &Mono) -> Mono {
        let mut factors = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.factors, &other.factors);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    factors.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    factors.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let e = a[i].1 + b[j].1;
                    if e != 0 {
                        factors.push((a[i].0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        factors.extend_from_slice(&a[i..]);
        factors.extend_from_slice(&b[j..]);
        let exp = match (&self.exp, &other.exp) {
            (None, None) => None,
            (Some(p), None) | (None, Some(p)) => Some(p.clone()),
            (Some(p), Some(q)) => {
                let s = p.add(q);
                if s.is_zero() {
                    None
                } else {
                    Some(s)
                }
            }
        };
        Mono { factors, exp }
    }
}

impl Poly {
    pub(crate) fn zero() -> Poly {
        Poly(BTreeMap::new())
    }

    pub(crate) fn constant(c: Rational) -> Poly {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(Mono::unit(), c);
        }
        Poly(m)
    }

    fn from_mono(m: Mono, c: Rational) -> Poly {
        let mut p = BTreeMap::new();
        if !c.is_zero() {
            p.insert(m, c);
        }
        Poly(p)
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn as_constant(&self) -> Option<Rational> {
        if self.0.is_empty() {
            return Some(Rational::zero());
        }
        if self.0.len() == 1 {
            let (m, c) = self.0.iter().next().unwrap();
            if m.factors.is_empty() && m.exp.is_none() {
                return Some(c.clone());
            }
        }
        None
    }

    fn add_term(&mut self, m: Mono, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.0.entry(m) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub(crate) fn add(&self, other: &Poly) -> Poly {
        let (big, small) = if self.0.len() >= other.0.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = big.clone();
        for (m, c) in &small.0 {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    fn add_assign(&mut self, other: Poly) {
        for (m, c) in other.0 {
            self.add_term(m, c);
        }
    }

    fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|(m, k)| (m.clone(), k * c)).collect())
    }

    pub(crate) fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.0 {
            for (mb, cb) in &other.0 {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    fn pow(&self, n: i64) -> Poly {
        if n == 0 {
            return Poly::constant(Rational::one());
        }
        if n > 0 {
            let mut result = self.clone();
            for _ in 1..n {
                result = result.mul(self);
            }
            return result;
        }
        if self.is_zero() {
            return Poly::from_mono(
                Mono {
                    factors: vec![(Expr::zero(), n)],
                    exp: None,
                },
                Rational::one(),
            );
        }
        if self.0.len() == 1 {
            let (m, c) = self.0.iter().next().unwrap();
            return mono_pow(m, c, n);
        }
        // Multi-term base with negative exponent: becomes an opaque kernel,
        // scaled so the leading coefficient is one.
        let lead = self.0.values().next().unwrap().clone();
        let unit = self.scale(&lead.recip());
        let coeff = rational_pow(&lead, n);
        Poly::from_mono(
            Mono {
                factors: vec![(unit.to_expr(), n)],
                exp: None,
            },
            coeff,
        )
    }

    pub(crate) fn to_expr(&self) -> Expr {
        let mut terms: Vec<Expr> = self.0.iter().map(|(m, c)| mono_to_expr(m, c)).collect();
        match terms.len() {
            0 => Expr::zero(),
            1 => terms.pop().unwrap(),
            _ => Expr::Sum(terms),
        }
    }

    pub(crate) fn monomials(&self) -> Vec<Monomial> {
        self.0
            .iter()
            .map(|(m, c)| Monomial {
                coeff: c.clone(),
                factors: m.factors.clone(),
                exp: m.exp.as_ref().map(|p| p.to_expr()),
            })
            .collect()
    }
}

fn rational_pow(c: &Rational, n: i64) -> Rational {
    if n >= 0 {
        num_traits::pow(c.clone(), n as usize)
    } else {
        num_traits::pow(c.recip(), (-n) as usize)
    }
}

fn mono_pow(m: &Mono, c: &Rational, n: i64) -> Poly {
    let coeff = rational_pow(c, n);
    let mut factors = Vec::with_capacity(m.factors.len());
    let mut expand = Vec::new();
    for (k, e) in &m.factors {
        let e = e * n;
        if e > 0 && matches!(k, Expr::Sum(_)) {
            expand.push((k.clone(), e));
        } else {
            factors.push((k.clone(), e));
        }
    }
    let exp = m.exp.as_ref().map(|p| p.scale(&Rational::from_integer(n.into())));
    let mut out = Poly::from_mono(Mono { factors, exp }, coeff);
    for (k, e) in expand {
        out = out.mul(&to_poly(&k).pow(e));
    }
    out
}

fn mono_to_expr(m: &Mono, c: &Rational) -> Expr {
    let mut parts: Vec<Expr> = Vec::with_capacity(m.factors.len() + 2);
    for (k, e) in &m.factors {
        if *e == 1 {
            parts.push(k.clone());
        } else {
            parts.push(Expr::Pow(Box::new(k.clone()), *e));
        }
    }
    if let Some(p) = &m.exp {
        parts.push(Expr::Exp(Box::new(p.to_expr())));
    }
    if parts.is_empty() {
        return Expr::Const(c.clone());
    }
    if c.is_one() && parts.len() == 1 {
        return parts.pop().unwrap();
    }
    if !c.is_one() {
        parts.insert(0, Expr::Const(c.clone()));
    }
    Expr::Product(parts)
}

fn normalize_atom(a: &Atom) -> Atom {
    match a {
        Atom::Func(app) => Atom::Func(FuncApp {
            name: app.name.clone(),
            derivs: app.derivs.clone(),
            args: app.args.iter().map(|x| to_poly(x).to_expr()).collect(),
        }),
        other => other.clone(),
    }
}

pub(crate) fn to_poly(e: &Expr) -> Poly {
    match e {
        Expr::Const(c) => Poly::constant(c.clone()),
        Expr::Atom(a) => Poly::from_mono(Mono::kernel(Expr::Atom(normalize_atom(a))), Rational::one()),
        Expr::Sum(items) => {
            let mut acc = Poly::zero();
            for item in items {
                acc.add_assign(to_poly(item));
            }
            acc
        }
        Expr::Product(items) => {
            let mut acc = Poly::constant(Rational::one());
            for item in items {
                let p = to_poly(item);
                if p.is_zero() {
                    return Poly::zero();
                }
                acc = acc.mul(&p);
            }
            acc
        }
        Expr::Pow(base, n) => to_poly(base).pow(*n),
        Expr::Exp(arg) => {
            let p = to_poly(arg);
            if p.is_zero() {
                Poly::constant(Rational::one())
            } else {
                Poly::from_mono(
                    Mono {
                        factors: Vec::new(),
                        exp: Some(p),
                    },
                    Rational::one(),
                )
            }
        }
        Expr::Ln(arg) => {
            let p = to_poly(arg);
            if p.as_constant().is_some_and(|c| c.is_one()) {
                Poly::zero()
            } else {
                Poly::from_mono(Mono::kernel(Expr::Ln(Box::new(p.to_expr()))), Rational::one())
            }
        }
    }
}

impl Expr {
    /// Canonical normal form. Idempotent.
    pub fn normalize(&self) -> Expr {
        to_poly(self).to_expr()
    }

    /// Monomials of the normal form of `self`.
    pub fn monomials(&self) -> Vec<Monomial> {
        to_poly(self).monomials()
    }

    /// Rebuild an expression from monomials (the result is normalized).
    pub fn from_monomials(ms: impl IntoIterator<Item = Monomial>) -> Expr {
        let mut terms = Vec::new();
        for m in ms {
            let mut parts = vec![Expr::Const(m.coeff)];
            for (k, e) in m.factors {
                parts.push(Expr::Pow(Box::new(k), e));
            }
            if let Some(x) = m.exp {
                parts.push(Expr::Exp(Box::new(x)));
            }
            terms.push(Expr::Product(parts));
        }
        Expr::Sum(terms).normalize()
    }

    /// True if the normal form is a constant; returns it.
    pub fn constant_value(&self) -> Option<Rational> {
        to_poly(self).as_constant()
    }

    pub fn is_negative_constant(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_negative())
    }
}
