//! Exact evaluation at rational points.
//!
//! Values live in the group algebra `Q[E^r]` over rational exponents, where
//! `E` stands for Euler's number kept symbolic. Exponentials of rational
//! values are then exact (`exp(r) = E^r`) and every algebraic identity the
//! normal form relies on, including `exp(p)exp(q) = exp(p+q)`, holds for the
//! evaluated values. Formal function applications without an explicit
//! assignment receive deterministic pseudo-random rational values derived
//! from the function name, derivative index and argument values.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{Atom, Expr, Rational};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("no value assigned to `{0}`")]
    MissingAssignment(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("value is not rational: {0}")]
    NotRational(String),
    #[error("argument slot `{0}` cannot be evaluated")]
    Slot(u32),
}

/// Element of `Q[E^r]`: a finite map from exponent to coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Value(BTreeMap<Rational, Rational>);

impl Value {
    pub fn rational(r: Rational) -> Value {
        let mut m = BTreeMap::new();
        if !r.is_zero() {
            m.insert(Rational::zero(), r);
        }
        Value(m)
    }

    pub fn zero() -> Value {
        Value(BTreeMap::new())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        match self.0.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.0.iter().next().unwrap();
                e.is_zero().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Approximate value with `E = e`.
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.0
            .iter()
            .map(|(e, c)| c.to_f64().unwrap_or(f64::NAN) * e.to_f64().unwrap_or(f64::NAN).exp())
            .sum()
    }

    fn add(&self, other: &Value) -> Value {
        let mut out = self.0.clone();
        for (e, c) in &other.0 {
            let entry = out.entry(e.clone()).or_insert_with(Rational::zero);
            *entry += c;
            if entry.is_zero() {
                out.remove(e);
            }
        }
        Value(out)
    }

    fn mul(&self, other: &Value) -> Value {
        let mut out = Value::zero();
        for (e1, c1) in &self.0 {
            for (e2, c2) in &other.0 {
                out = out.add(&Value([(e1 + e2, c1 * c2)].into_iter().collect()));
            }
        }
        out
    }

    fn pow(&self, n: i64) -> Result<Value, EvalError> {
        if n >= 0 {
            let mut out = Value::rational(Rational::one());
            for _ in 0..n {
                out = out.mul(self);
            }
            return Ok(out);
        }
        match self.0.len() {
            0 => Err(EvalError::DivisionByZero),
            1 => {
                let (e, c) = self.0.iter().next().unwrap();
                let inv = Value([(-e, c.recip())].into_iter().collect());
                inv.pow(-n)
            }
            _ => Err(EvalError::NotRational(format!(
                "inverse of a sum of exponentials ({} terms)",
                self.0.len()
            ))),
        }
    }
}

/// Assignment of rational values to atoms.
#[derive(Clone, Debug, Default)]
pub struct Point {
    pub values: BTreeMap<Atom, Rational>,
    /// When set, function applications and logarithms without an exact
    /// value receive deterministic pseudo-random values keyed by this seed.
    pub function_seed: Option<u64>,
}

impl Point {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, atom: Atom, value: Rational) -> &mut Self {
        let atom = match Expr::Atom(atom.clone()).normalize() {
            Expr::Atom(a) => a,
            _ => atom,
        };
        self.values.insert(atom, value);
        self
    }

    pub fn with(mut self, atom: Atom, value: Rational) -> Self {
        self.set(atom, value);
        self
    }

    /// Random nonzero rational values for every non-function atom of the
    /// given expressions, with a function seed derived from `seed`.
    pub fn random_for<'a>(exprs: impl IntoIterator<Item = &'a Expr>, seed: u64) -> Point {
        let mut atoms = BTreeSet::new();
        for e in exprs {
            e.for_each_atom(&mut |a| {
                if !matches!(a, Atom::Func(_) | Atom::Slot(_)) {
                    atoms.insert(a.clone());
                }
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = Point::new();
        for a in atoms {
            p.values.insert(a, random_rational(&mut rng));
        }
        p.function_seed = Some(rng.gen());
        p
    }
}

fn random_rational(rng: &mut impl Rng) -> Rational {
    let mut n: i64 = rng.gen_range(-12..=12);
    if n == 0 {
        n = 13;
    }
    let d: i64 = rng.gen_range(1..=7);
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn hashed_rational(seed: u64, key: &impl Hash) -> Rational {
    let mut h = DefaultHasher::new();
    seed.hash(&mut h);
    key.hash(&mut h);
    let mut rng = ChaCha8Rng::seed_from_u64(h.finish());
    random_rational(&mut rng)
}

/// Evaluate to an element of `Q[E^r]`.
pub fn eval_value(e: &Expr, point: &Point) -> Result<Value, EvalError> {
    match e {
        Expr::Const(c) => Ok(Value::rational(c.clone())),
        Expr::Atom(a) => eval_atom(a, point),
        Expr::Sum(items) => {
            let mut acc = Value::zero();
            for i in items {
                acc = acc.add(&eval_value(i, point)?);
            }
            Ok(acc)
        }
        Expr::Product(items) => {
            let mut acc = Value::rational(Rational::one());
            for i in items {
                acc = acc.mul(&eval_value(i, point)?);
            }
            Ok(acc)
        }
        Expr::Pow(b, n) => eval_value(b, point)?.pow(*n),
        Expr::Exp(arg) => {
            let v = eval_value(arg, point)?;
            match v.as_rational() {
                Some(r) => Ok(Value([(r, Rational::one())].into_iter().collect())),
                None => opaque(point, &("exp", &v), "exp of a non-rational value"),
            }
        }
        Expr::Ln(arg) => {
            let v = eval_value(arg, point)?;
            if v.is_zero() {
                return Err(EvalError::DivisionByZero);
            }
            if v.0.len() == 1 {
                let (e, c) = v.0.iter().next().unwrap();
                if c.is_one() {
                    return Ok(Value::rational(e.clone()));
                }
            }
            opaque(point, &("ln", &v), "logarithm of a non-power value")
        }
    }
}

fn opaque(point: &Point, key: &impl Hash, what: &str) -> Result<Value, EvalError> {
    match point.function_seed {
        Some(seed) => Ok(Value::rational(hashed_rational(seed, key))),
        None => Err(EvalError::NotRational(what.to_string())),
    }
}

fn eval_atom(a: &Atom, point: &Point) -> Result<Value, EvalError> {
    if let Some(v) = point.values.get(a) {
        return Ok(Value::rational(v.clone()));
    }
    match a {
        Atom::Slot(i) => Err(EvalError::Slot(*i)),
        Atom::Func(app) => {
            let args = app
                .args
                .iter()
                .map(|x| eval_value(x, point))
                .collect::<Result<Vec<_>, _>>()?;
            match point.function_seed {
                Some(seed) => Ok(Value::rational(hashed_rational(seed, &(&app.name, &app.derivs, &args)))),
                None => Err(EvalError::MissingAssignment(a.to_string())),
            }
        }
        other => Err(EvalError::MissingAssignment(other.to_string())),
    }
}

/// Exact rational value of `e` at `point`.
pub fn eval_rational(e: &Expr, point: &Point) -> Result<Rational, EvalError> {
    let v = eval_value(e, point)?;
    v.as_rational()
        .ok_or_else(|| EvalError::NotRational(format!("{:?}", v)))
}

/// Outcome of the random-point cross-check of a symbolic zero test.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroCheck {
    pub symbolic_zero: bool,
    /// Points at which the raw tree evaluated (points raising an
    /// evaluation error such as division by zero are skipped).
    pub points: usize,
    /// Number of evaluated points with a nonzero value.
    pub nonzero_points: usize,
}

impl ZeroCheck {
    /// Symbolic and numeric verdicts agree: zero everywhere if symbolically
    /// zero, nonzero somewhere otherwise.
    pub fn agrees(&self) -> bool {
        if self.symbolic_zero {
            self.nonzero_points == 0
        } else {
            self.nonzero_points > 0
        }
    }
}

/// Symbolic zero test of `raw` cross-checked by evaluating the unnormalized
/// tree at `n` random points.
pub fn zero_check(raw: &Expr, n: usize, seed: u64) -> ZeroCheck {
    let symbolic_zero = raw.is_zero();
    let mut points = 0;
    let mut nonzero_points = 0;
    let mut attempt = 0u64;
    while points < n && attempt < 4 * n as u64 + 8 {
        let p = Point::random_for([raw], seed.wrapping_mul(0x9E37_79B9).wrapping_add(attempt));
        attempt += 1;
        if let Ok(v) = eval_value(raw, &p) {
            points += 1;
            if !v.is_zero() {
                nonzero_points += 1;
            }
        }
    }
    ZeroCheck {
        symbolic_zero,
        points,
        nonzero_points,
    }
}

impl Expr {
    pub fn eval_rational(&self, point: &Point) -> Result<Rational, EvalError> {
        eval_rational(self, point)
    }
}
