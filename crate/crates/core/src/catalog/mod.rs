//! The nine low-order conservation-law families of the coupled system,
//! with their hypotheses, multipliers, densities, fluxes, mode functions
//! and the equivalence transformations.

mod entries;
mod equivalence;
mod modes;
#[cfg(test)]
mod tests;

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::expr::{Expr, FunctionTable, ParseError, Parser, Rational, Var, DEFAULT_MAX_JET_ORDER};
use crate::jetcalc::{PdeSystem, SystemError};
use crate::verifier::{
    check_determining, check_onsolution, compare_up_to_equivalence, multiplier_of_density, reconstruct,
    DensityFluxPair, MultiplierPair, VerificationReport, VerifyError,
};

pub use entries::list_cases;
pub use equivalence::{apply_equivalence, EquivalenceTransform};
pub use modes::{ModeFamily, ModeSpec};

/// Rational parameter assignment. Unassigned parameters stay symbolic.
pub type Params = BTreeMap<String, Rational>;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum CatalogError {
    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),
    #[error("parameter `{0}` must be given a value")]
    MissingParameter(String),
    #[error("mode family {index} is not available: {reason}")]
    ModeUnavailable { index: usize, reason: String },
    #[error("case ({0}) has fixed nonlinearities")]
    FixedNonlinearity(CaseId),
    #[error("template `{text}`: {error}")]
    Template { text: String, error: ParseError },
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error("scale factors must be nonzero")]
    ZeroScale,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CaseId {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            CaseId::A => "a",
            CaseId::B => "b",
            CaseId::C => "c",
            CaseId::D => "d",
            CaseId::E => "e",
            CaseId::F => "f",
            CaseId::G => "g",
        };
        f.write_str(c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpeedCondition {
    Equal,
    Unequal,
    Any,
}

impl fmt::Display for SpeedCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpeedCondition::Equal => "equal",
            SpeedCondition::Unequal => "unequal",
            SpeedCondition::Any => "any",
        })
    }
}

/// Admissibility constraint on the parameters of a family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constraint {
    Positive(&'static str),
    NonZero(&'static str),
    Distinct(&'static str, &'static str),
    /// Must be assigned `1` or `-1`.
    Sign(&'static str),
    /// Must be assigned an integer outside the listed values.
    IntegerExcept(&'static str, &'static [i64]),
}

impl Constraint {
    pub fn check(&self, params: &Params) -> Result<(), CatalogError> {
        let get = |p: &str| params.get(p);
        let bad = |msg: String| Err(CatalogError::Inadmissible(msg));
        match *self {
            Constraint::Positive(p) => match get(p) {
                Some(v) if v <= &Rational::from_integer(0.into()) => bad(format!("{} = {} must be positive", p, v)),
                _ => Ok(()),
            },
            Constraint::NonZero(p) => match get(p) {
                Some(v) if v == &Rational::from_integer(0.into()) => bad(format!("{} must be nonzero", p)),
                _ => Ok(()),
            },
            Constraint::Distinct(p, q) => match (get(p), get(q)) {
                (Some(x), Some(y)) if x == y => bad(format!("{} and {} must differ", p, q)),
                _ => Ok(()),
            },
            Constraint::Sign(p) => match get(p) {
                None => Err(CatalogError::MissingParameter(p.into())),
                Some(v) if v.is_integer() && (v.numer() == &1.into() || v.numer() == &(-1).into()) => Ok(()),
                Some(v) => bad(format!("{} = {} must be 1 or -1", p, v)),
            },
            Constraint::IntegerExcept(p, excluded) => match get(p) {
                None => Err(CatalogError::MissingParameter(p.into())),
                Some(v) if !v.is_integer() => bad(format!("{} = {} must be an integer", p, v)),
                Some(v) => {
                    let n: i64 = v.numer().try_into().unwrap_or(i64::MAX);
                    if excluded.contains(&n) {
                        bad(format!("{} = {} is excluded", p, n))
                    } else {
                        Ok(())
                    }
                }
            },
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Positive(p) => write!(f, "{} > 0", p),
            Constraint::NonZero(p) => write!(f, "{} != 0", p),
            Constraint::Distinct(p, q) => write!(f, "{} != {}", p, q),
            Constraint::Sign(p) => write!(f, "{} in {{1, -1}}", p),
            Constraint::IntegerExcept(p, ex) => {
                let ex: Vec<String> = ex.iter().map(|n| n.to_string()).collect();
                write!(f, "{} integer, not in {{{}}}", p, ex.join(", "))
            }
        }
    }
}

/// One conservation-law family. Template strings are in the expression
/// grammar over the family's parameters; `zeta` abbreviates
/// `alpha*u_t - v_t + s*b*(alpha*u_x - v_x)`.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    /// `T1` through `T9`.
    pub family: &'static str,
    pub case_id: CaseId,
    pub name: &'static str,
    pub hypothesis: &'static str,
    pub speed_condition: SpeedCondition,
    pub parameter_symbols: &'static [&'static str],
    pub constraints: &'static [Constraint],
    /// `f` and `g` are arbitrary and may be chosen concretely.
    pub arbitrary_nonlinearity: bool,
    /// Templates for `c(u)`, `f(v)`, `d(v)`, `g(u)`.
    pub nonlinearities: [&'static str; 4],
    pub multiplier: [&'static str; 2],
    /// Shipped density and flux: consistent with the multiplier.
    pub density_flux: [&'static str; 2],
    /// As printed in the source classification, where it differs from
    /// the shipped pair.
    pub printed: Option<[&'static str; 2]>,
    pub modes: Option<ModeSpec>,
    pub singular_at_zero: bool,
    /// Alternative multiplier forms of overlapping subcases.
    pub aliases: &'static [&'static str],
}

/// Choice of `f`, `g` for families where they are arbitrary.
#[derive(Clone, Debug, PartialEq)]
pub enum Nonlinearity {
    Formal,
    /// `f` in `v`, `g` in `u`.
    Concrete {
        f: Expr,
        g: Expr,
    },
}

/// An instantiated family.
#[derive(Clone, Debug)]
pub struct Instance {
    pub family: &'static str,
    pub case_id: CaseId,
    pub params: Params,
    pub mode: String,
    pub system: PdeSystem,
    pub multiplier: MultiplierPair,
    pub pair: DensityFluxPair,
    pub functions: FunctionTable,
}

const ZETA: &str = "(alpha*u_t - v_t + s*b*(alpha*u_x - v_x))";

fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        format!("({})", r.numer())
    } else {
        format!("({}/{})", r.numer(), r.denom())
    }
}

/// Replace whole identifiers of `text` by the given strings.
pub(crate) fn replace_identifiers(text: &str, map: &dyn Fn(&str) -> Option<String>) -> String {
    let mut out = String::with_capacity(text.len());
    let mut ident = String::new();
    let flush = |ident: &mut String, out: &mut String| {
        if !ident.is_empty() {
            match map(ident) {
                Some(r) => out.push_str(&r),
                None => out.push_str(ident),
            }
            ident.clear();
        }
    };
    for ch in text.chars() {
        if ch.is_ascii_alphanumeric() || ch == '_' {
            if ident.is_empty() && ch.is_ascii_digit() {
                out.push(ch);
            } else {
                ident.push(ch);
            }
        } else {
            flush(&mut ident, &mut out);
            out.push(ch);
        }
    }
    flush(&mut ident, &mut out);
    out
}

impl CatalogEntry {
    pub fn speeds(&self) -> (&'static str, &'static str) {
        match self.speed_condition {
            SpeedCondition::Unequal | SpeedCondition::Any => ("a", "b"),
            SpeedCondition::Equal => ("b", "b"),
        }
    }

    pub fn check_params(&self, params: &Params) -> Result<(), CatalogError> {
        for name in params.keys() {
            if !self.parameter_symbols.contains(&name.as_str()) {
                return Err(CatalogError::Inadmissible(format!(
                    "`{}` is not a parameter of {}",
                    name, self.family
                )));
            }
        }
        self.constraints.iter().try_for_each(|c| c.check(params))
    }

    fn parser(&self) -> Parser {
        Parser::with_params(self.parameter_symbols.iter().copied())
    }

    /// Parse a template of this family with `params` substituted.
    pub fn parse_template(&self, text: &str, params: &Params) -> Result<Expr, CatalogError> {
        let text = replace_identifiers(text, &|id| {
            if id == "zeta" {
                Some(ZETA.to_string())
            } else {
                params.get(id).map(format_rational)
            }
        });
        let text = replace_identifiers(&text, &|id| params.get(id).map(format_rational));
        self.parser()
            .parse(&text)
            .map_err(|error| CatalogError::Template { text, error })
    }

    pub fn mode_count(&self) -> usize {
        self.modes.as_ref().map_or(1, |m| m.families.len())
    }

    /// Substitute parameters, nonlinearities and a mode family.
    pub fn instantiate(
        &self,
        params: &Params,
        nonlinearity: &Nonlinearity,
        mode: usize,
    ) -> Result<Instance, CatalogError> {
        self.check_params(params)?;
        let (table, mode_name) = match &self.modes {
            Some(spec) => spec.table(self, params, mode)?,
            None if mode == 0 => (FunctionTable::with_builtins(), "none".to_string()),
            None => {
                return Err(CatalogError::ModeUnavailable {
                    index: mode,
                    reason: format!("{} has no mode functions", self.family),
                })
            }
        };
        let mut nl_table = FunctionTable::new();
        if let Nonlinearity::Concrete { f, g } = nonlinearity {
            if !self.arbitrary_nonlinearity {
                return Err(CatalogError::FixedNonlinearity(self.case_id));
            }
            nl_table.define("f", 1, slot_in(f, Var::V));
            nl_table.define("g", 1, slot_in(g, Var::U));
        }
        let expand = |text: &str| -> Result<Expr, CatalogError> {
            let e = self.parse_template(text, params)?;
            Ok(nl_table.expand_definitions(&e))
        };
        let [c, f, d, g] = self.nonlinearities.map(expand);
        let (sa, sb) = self.speeds();
        let a = self.parse_template(sa, params)?;
        let b = self.parse_template(sb, params)?;
        let system = PdeSystem::with_table(a, b, c?, f?, d?, g?, table, DEFAULT_MAX_JET_ORDER)?
            .with_singular_at_zero(self.singular_at_zero);
        let prep = |e: Expr| system.prepare(&e);
        let multiplier = MultiplierPair::new(prep(expand(self.multiplier[0])?), prep(expand(self.multiplier[1])?));
        let pair = DensityFluxPair::new(prep(expand(self.density_flux[0])?), prep(expand(self.density_flux[1])?));
        Ok(Instance {
            family: self.family,
            case_id: self.case_id,
            params: params.clone(),
            mode: mode_name,
            functions: system.functions().clone(),
            system,
            multiplier,
            pair,
        })
    }

    /// The printed density/flux, parsed under the default parameter set
    /// (plus `s`) so that misprinted symbols survive as free parameters.
    pub fn printed_pair(&self, params: &Params) -> Option<Result<[Expr; 2], CatalogError>> {
        let printed = self.printed?;
        Some(printed_variant(printed, params, false))
    }

    /// Draw an admissible rational parameter assignment.
    pub fn random_params(&self, rng: &mut impl Rng) -> Params {
        loop {
            let mut p = Params::new();
            for &name in self.parameter_symbols {
                let v = match name {
                    "a" | "b" => Rational::new(rng.gen_range(1..=4).into(), rng.gen_range(1..=2).into()),
                    "s" => Rational::from_integer(if rng.gen_bool(0.5) { 1 } else { -1 }.into()),
                    "k" => Rational::from_integer([-5i64, -4, -3, 3, 4, 5][rng.gen_range(0..6)].into()),
                    _ => {
                        let n: i64 = rng.gen_range(-5..=5);
                        Rational::new(n.into(), rng.gen_range(1..=3).into())
                    }
                };
                p.insert(name.to_string(), v);
            }
            if self.check_params(&p).is_ok() {
                return p;
            }
        }
    }
}

fn printed_variant(printed: [&str; 2], params: &Params, swap: bool) -> Result<[Expr; 2], CatalogError> {
    let mut names: Vec<&str> = crate::expr::DEFAULT_PARAMETERS.to_vec();
    names.push("s");
    let parser = Parser::new(&names);
    let parse = |text: &str| -> Result<Expr, CatalogError> {
        let text = replace_identifiers(text, &|id| {
            if id == "zeta" {
                Some(ZETA.to_string())
            } else if swap && id == "alpha" {
                Some("beta".into())
            } else if swap && id == "beta" {
                Some("alpha".into())
            } else {
                None
            }
        });
        let text = replace_identifiers(&text, &|id| params.get(id).map(format_rational));
        parser
            .parse(&text)
            .map_err(|error| CatalogError::Template { text, error })
    };
    Ok([parse(printed[0])?, parse(printed[1])?])
}

fn slot_in(e: &Expr, var: Var) -> Expr {
    let target = crate::expr::Atom::Jet(crate::expr::JetCoordinate::new(var, 0, 0));
    crate::expr::substitute(e, &|a| (*a == target).then(|| Expr::slot(0))).normalize()
}

fn difference_report(name: &str, got: &MultiplierPair, want: &MultiplierPair, seed: u64) -> VerificationReport {
    VerificationReport::from_raw(
        vec![
            (format!("{}(Q^u)", name), got.q_u.clone() - want.q_u.clone()),
            (format!("{}(Q^v)", name), got.q_v.clone() - want.q_v.clone()),
        ],
        seed,
    )
}

/// Determining system, divergence, multiplier and round-trip checks of one
/// instance.
pub fn verify_instance(inst: &Instance) -> VerificationReport {
    let sys = &inst.system;
    let q = &inst.multiplier;
    let run = || -> Result<Vec<(String, VerificationReport)>, VerifyError> {
        let mut parts = vec![
            ("determining".to_string(), check_determining(q, sys)?),
            (
                "divergence".to_string(),
                check_onsolution(&inst.pair.t_density, &inst.pair.x_flux, sys)?,
            ),
        ];
        let q_of_t = multiplier_of_density(&inst.pair.t_density, sys)?;
        parts.push(("multiplier".to_string(), difference_report("E(T) - Q", &q_of_t, q, 7)));
        let rec = reconstruct(q, sys)?;
        let q_rt = multiplier_of_density(&rec.t_density, sys)?;
        parts.push((
            "round_trip".to_string(),
            difference_report("E(T_rec) - Q", &q_rt, q, 11),
        ));
        parts.push((
            "equivalent".to_string(),
            compare_up_to_equivalence(&rec, &inst.pair, sys)?,
        ));
        Ok(parts)
    };
    match run() {
        Ok(parts) => VerificationReport::combine(parts),
        Err(e) => VerificationReport::failure(e.to_string()),
    }
}

fn entry_seed(seed: u64, entry: &CatalogEntry) -> u64 {
    entry
        .family
        .bytes()
        .fold(seed ^ 0x5bd1_e995, |h, b| h.wrapping_mul(31).wrapping_add(b as u64))
}

/// Parameter assignments and mode choices used by [`verify_all`]: mode
/// families are cycled, falling back to the formal mode when a family is
/// unavailable at the drawn parameters.
pub fn instances_for(entry: &CatalogEntry, count: usize, seed: u64) -> Vec<Result<Instance, CatalogError>> {
    let mut rng = ChaCha8Rng::seed_from_u64(entry_seed(seed, entry));
    (0..count)
        .map(|i| {
            let params = entry.random_params(&mut rng);
            let mode = i % entry.mode_count();
            match entry.instantiate(&params, &Nonlinearity::Formal, mode) {
                Err(CatalogError::ModeUnavailable { .. }) => entry.instantiate(&params, &Nonlinearity::Formal, 0),
                other => other,
            }
        })
        .collect()
}

fn describe_params(p: &Params) -> String {
    let items: Vec<String> = p.iter().map(|(k, v)| format!("{}={}", k, v)).collect();
    items.join(",")
}

/// Verify every family at `instantiations` parameter assignments.
pub fn verify_all(instantiations: usize, seed: u64) -> VerificationReport {
    verify_entries(&list_cases(), instantiations, seed)
}

pub fn verify_entries(entries: &[CatalogEntry], instantiations: usize, seed: u64) -> VerificationReport {
    let jobs: Vec<(usize, &CatalogEntry, usize, Result<Instance, CatalogError>)> = entries
        .iter()
        .enumerate()
        .flat_map(|(k, e)| {
            instances_for(e, instantiations.max(1), seed)
                .into_iter()
                .enumerate()
                .map(move |(i, inst)| (k, e, i, inst))
        })
        .collect();
    let mut results: Vec<(usize, usize, String, VerificationReport)> = jobs
        .into_par_iter()
        .map(|(k, e, i, inst)| {
            let (label, report) = match inst {
                Ok(inst) => (
                    format!(
                        "{}({})#{}[{}; mode={}]",
                        e.family,
                        e.case_id,
                        i,
                        describe_params(&inst.params),
                        inst.mode
                    ),
                    verify_instance(&inst),
                ),
                Err(err) => (
                    format!("{}({})#{}", e.family, e.case_id, i),
                    VerificationReport::failure(err.to_string()),
                ),
            };
            (k, i, label, report)
        })
        .collect();
    results.sort_by_key(|(k, i, _, _)| (*k, *i));
    VerificationReport::combine(results.into_iter().map(|(_, _, l, r)| (l, r)).collect())
}

/// Outcome of checking a printed density/flux against its α↔β-swapped
/// placement.
#[derive(Clone, Debug, PartialEq)]
pub struct Adjudication {
    pub family: &'static str,
    pub printed_passes: bool,
    pub swapped_passes: bool,
    /// Variants agree up to equivalence at `alpha = beta`.
    pub equal_at_alpha_eq_beta: bool,
    /// Placement the catalog ships.
    pub shipped: &'static str,
}

impl Adjudication {
    pub fn passing_variant(&self) -> Option<&'static str> {
        match (self.printed_passes, self.swapped_passes) {
            (true, false) => Some("printed"),
            (false, true) => Some("swapped"),
            _ => None,
        }
    }

    /// Exactly one variant passes, the catalog ships it, and the two agree
    /// at `alpha = beta`.
    pub fn settled(&self) -> bool {
        self.passing_variant() == Some(self.shipped) && self.equal_at_alpha_eq_beta
    }
}

/// Check the printed placement of α, β in a case (b) family against the
/// swapped placement for symbolic independent α, β and formal `f`, `g`.
pub fn adjudicate(entry: &CatalogEntry) -> Result<Adjudication, CatalogError> {
    let printed = entry.printed.unwrap_or(entry.density_flux);
    let generic = entry.instantiate(&Params::new(), &Nonlinearity::Formal, 0)?;
    let sys = &generic.system;
    let passes = |swap: bool| -> Result<bool, CatalogError> {
        let [t, x] = printed_variant(printed, &Params::new(), swap)?;
        Ok(check_onsolution(&t, &x, sys)?.passed)
    };
    let printed_passes = passes(false)?;
    let swapped_passes = passes(true)?;
    let mut equal = Params::new();
    equal.insert("alpha".into(), Rational::from_integer(2.into()));
    equal.insert("beta".into(), Rational::from_integer(2.into()));
    let inst = entry.instantiate(&equal, &Nonlinearity::Formal, 0)?;
    let [t1, x1] = printed_variant(printed, &equal, false)?;
    let [t2, x2] = printed_variant(printed, &equal, true)?;
    let equal_at_alpha_eq_beta = compare_up_to_equivalence(
        &DensityFluxPair::new(t1, x1),
        &DensityFluxPair::new(t2, x2),
        &inst.system,
    )?
    .passed;
    Ok(Adjudication {
        family: entry.family,
        printed_passes,
        swapped_passes,
        equal_at_alpha_eq_beta,
        shipped: match entry.printed {
            Some(p) if p != entry.density_flux => "swapped",
            _ => "printed",
        },
    })
}

/// Key-value text export, one block per family.
pub fn export_catalog() -> String {
    let mut out = String::new();
    for e in list_cases() {
        let kv = |out: &mut String, k: &str, v: &str| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        };
        out.push_str(&format!("[{}]\n", e.family));
        kv(&mut out, "case", &e.case_id.to_string());
        kv(&mut out, "name", e.name);
        kv(&mut out, "hypothesis", e.hypothesis);
        kv(&mut out, "speeds", &e.speed_condition.to_string());
        kv(&mut out, "parameters", &e.parameter_symbols.join(", "));
        let cs: Vec<String> = e.constraints.iter().map(|c| c.to_string()).collect();
        kv(&mut out, "constraints", &cs.join("; "));
        for (k, v) in ["c", "f", "d", "g"].iter().zip(e.nonlinearities) {
            kv(&mut out, k, v);
        }
        kv(&mut out, "Q_u", e.multiplier[0]);
        kv(&mut out, "Q_v", e.multiplier[1]);
        kv(&mut out, "T", e.density_flux[0]);
        kv(&mut out, "X", e.density_flux[1]);
        if let Some(p) = e.printed {
            kv(&mut out, "T_printed", p[0]);
            kv(&mut out, "X_printed", p[1]);
        }
        if e.density_flux[0].contains("zeta") || e.multiplier[0].contains("zeta") {
            kv(&mut out, "zeta", ZETA);
        }
        if let Some(m) = &e.modes {
            kv(&mut out, "mode_constraints", &m.constraints.join("; "));
            let fams: Vec<&str> = m.families.iter().map(|f| f.name).collect();
            kv(&mut out, "modes", &fams.join(", "));
        }
        kv(
            &mut out,
            "singular_at_zero",
            if e.singular_at_zero { "true" } else { "false" },
        );
        for a in e.aliases {
            kv(&mut out, "alias", a);
        }
        out.push('\n');
    }
    out
}
