//! Named formal functions, their derivative rewrite rules and closed-form
//! definitions.
//!
//! All rule right-hand sides and definition bodies are written in argument
//! slots: `Expr::slot(i)` stands for the `i`-th argument.

use std::collections::BTreeMap;

use super::calculus::{partial, substitute};
use super::{Atom, Expr, FuncApp};

/// `name^(pattern)(#0, #1, ...) = rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionRule {
    pub pattern: Vec<u32>,
    pub rhs: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunctionDef {
    pub arity: usize,
    pub rules: Vec<FunctionRule>,
    pub definition: Option<Expr>,
}

impl FunctionDef {
    pub fn formal(arity: usize) -> Self {
        FunctionDef {
            arity,
            rules: Vec::new(),
            definition: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FunctionTable {
    defs: BTreeMap<String, FunctionDef>,
}

const MAX_REWRITE_DEPTH: usize = 64;

impl FunctionTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Table holding `cos` and `sin` with `cos' = -sin`, `sin' = cos`.
    pub fn with_builtins() -> Self {
        let mut t = Self::new();
        t.add_rule("cos", vec![1], -Expr::func("sin", vec![Expr::slot(0)]));
        t.add_rule("sin", vec![1], Expr::func("cos", vec![Expr::slot(0)]));
        t
    }

    pub fn get(&self, name: &str) -> Option<&FunctionDef> {
        self.defs.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.defs.keys().map(|s| s.as_str())
    }

    pub fn declare(&mut self, name: &str, arity: usize) -> &mut FunctionDef {
        self.defs
            .entry(name.to_string())
            .or_insert_with(|| FunctionDef::formal(arity))
    }

    pub fn add_rule(&mut self, name: &str, pattern: Vec<u32>, rhs: Expr) {
        let arity = pattern.len();
        self.declare(name, arity).rules.push(FunctionRule {
            pattern,
            rhs: rhs.normalize(),
        });
    }

    /// Give `name` a closed form in slots. Defined functions are replaced by
    /// [`FunctionTable::expand_definitions`].
    pub fn define(&mut self, name: &str, arity: usize, body: Expr) {
        self.declare(name, arity).definition = Some(body.normalize());
    }

    pub fn remove(&mut self, name: &str) -> Option<FunctionDef> {
        self.defs.remove(name)
    }

    pub fn is_defined(&self, name: &str) -> bool {
        self.defs.get(name).is_some_and(|d| d.definition.is_some())
    }

    pub fn merge(&mut self, other: &FunctionTable) {
        for (name, def) in &other.defs {
            let entry = self
                .defs
                .entry(name.clone())
                .or_insert_with(|| FunctionDef::formal(def.arity));
            for r in &def.rules {
                if !entry.rules.contains(r) {
                    entry.rules.push(r.clone());
                }
            }
            if def.definition.is_some() {
                entry.definition = def.definition.clone();
            }
        }
    }

    /// Name and scale `c` of a one-argument function `H` with a rule
    /// `H' = c * name(#0)`, so that `name` integrates to `H / c`.
    pub fn antiderivative_of(&self, name: &str) -> Option<(String, super::Rational)> {
        let target = Expr::func(name, vec![Expr::slot(0)]);
        for (h, def) in &self.defs {
            for r in &def.rules {
                if r.pattern != [1] {
                    continue;
                }
                let ms = r.rhs.monomials();
                if ms.len() == 1 && ms[0].exp.is_none() && ms[0].factors == [(target.clone(), 1)] {
                    return Some((h.clone(), ms[0].coeff.clone()));
                }
            }
        }
        None
    }

    /// Rewrite every function application whose derivative index dominates a
    /// rule pattern. The result is normalized.
    pub fn reduce(&self, e: &Expr) -> Expr {
        if !self.defs.values().any(|d| !d.rules.is_empty()) {
            return e.normalize();
        }
        self.reduce_depth(&e.normalize(), 0)
    }

    fn reduce_depth(&self, e: &Expr, depth: usize) -> Expr {
        let changed = std::cell::Cell::new(false);
        let out = substitute(e, &|a| {
            let Atom::Func(app) = a else { return None };
            let args: Vec<Expr> = app.args.iter().map(|x| self.reduce_depth(x, depth)).collect();
            let app = FuncApp {
                name: app.name.clone(),
                derivs: app.derivs.clone(),
                args,
            };
            let r = self.apply_rule(&app);
            if r.is_some() {
                changed.set(true);
            }
            Some(r.unwrap_or(Expr::Atom(Atom::Func(app))))
        });
        let out = out.normalize();
        if changed.get() && depth < MAX_REWRITE_DEPTH {
            self.reduce_depth(&out, depth + 1)
        } else {
            out
        }
    }

    fn apply_rule(&self, app: &FuncApp) -> Option<Expr> {
        let def = self.defs.get(&app.name)?;
        let rule = def
            .rules
            .iter()
            .find(|r| r.pattern.len() == app.derivs.len() && r.pattern.iter().zip(&app.derivs).all(|(p, d)| d >= p))?;
        let mut body = rule.rhs.clone();
        for (k, (p, d)) in rule.pattern.iter().zip(&app.derivs).enumerate() {
            for _ in 0..(d - p) {
                body = partial(&body, &Atom::Slot(k as u32));
            }
        }
        Some(fill_slots(&body, &app.args))
    }

    /// Replace every application of a defined function by its closed form
    /// (differentiated as required). The result is normalized and reduced.
    pub fn expand_definitions(&self, e: &Expr) -> Expr {
        if !self.defs.values().any(|d| d.definition.is_some()) {
            return self.reduce(e);
        }
        let out = substitute(e, &|a| {
            let Atom::Func(app) = a else { return None };
            let args: Vec<Expr> = app.args.iter().map(|x| self.expand_definitions(x)).collect();
            match self.defs.get(&app.name).and_then(|d| d.definition.as_ref()) {
                Some(body) => {
                    let mut body = body.clone();
                    for (k, d) in app.derivs.iter().enumerate() {
                        for _ in 0..*d {
                            body = partial(&body, &Atom::Slot(k as u32));
                        }
                    }
                    Some(self.expand_definitions(&fill_slots(&body, &args)))
                }
                None => Some(Expr::Atom(Atom::Func(FuncApp {
                    name: app.name.clone(),
                    derivs: app.derivs.clone(),
                    args,
                }))),
            }
        });
        self.reduce(&out)
    }
}

/// Substitute `args[i]` for every `Slot(i)`.
pub fn fill_slots(body: &Expr, args: &[Expr]) -> Expr {
    substitute(body, &|a| match a {
        Atom::Slot(i) => args.get(*i as usize).cloned(),
        _ => None,
    })
    .normalize()
}
