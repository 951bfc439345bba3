//! Multiplier extraction, characteristic-form verification, the multiplier
//! determining system, density/flux reconstruction and equivalence of
//! conservation laws.

mod reconstruct;

use serde_json::json;
use thiserror::Error;

use crate::expr::{zero_check, Atom, CalculusError, Expr, JetCoordinate, Var};
use crate::jetcalc::{Dir, Family, JetError, PdeSystem};

pub use reconstruct::reconstruct;

/// Random points used to cross-check every symbolic zero test.
pub const CROSS_CHECK_POINTS: usize = 20;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum VerifyError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Calculus(#[from] CalculusError),
    #[error("not low order: {0}")]
    HigherOrder(String),
    #[error("inconsistent multiplier: {0}")]
    Inconsistent(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiplierPair {
    pub q_u: Expr,
    pub q_v: Expr,
}

impl MultiplierPair {
    pub fn new(q_u: Expr, q_v: Expr) -> Self {
        MultiplierPair {
            q_u: q_u.normalize(),
            q_v: q_v.normalize(),
        }
    }

    pub fn get(&self, w: Var) -> &Expr {
        match w {
            Var::U => &self.q_u,
            Var::V => &self.q_v,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.q_u.is_zero() && self.q_v.is_zero()
    }

    /// Jets of total order two or more, if any.
    pub fn high_order_jets(&self) -> Vec<JetCoordinate> {
        let mut js: Vec<_> = self.q_u.jets().union(&self.q_v.jets()).copied().collect();
        js.retain(|j| j.order() >= 2);
        js
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityFluxPair {
    pub t_density: Expr,
    pub x_flux: Expr,
}

impl DensityFluxPair {
    pub fn new(t_density: Expr, x_flux: Expr) -> Self {
        DensityFluxPair {
            t_density: t_density.normalize(),
            x_flux: x_flux.normalize(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub passed: bool,
    pub residuals: Vec<(String, Expr)>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    /// Build a report from raw residual trees. Each residual is normalized
    /// for the symbolic verdict and the raw tree is evaluated at random
    /// points; a disagreement between the two fails the report.
    pub fn from_raw(raw: Vec<(String, Expr)>, seed: u64) -> Self {
        let mut residuals = Vec::with_capacity(raw.len());
        let mut notes = Vec::new();
        let mut passed = true;
        for (i, (name, r)) in raw.into_iter().enumerate() {
            let zc = zero_check(&r, CROSS_CHECK_POINTS, seed.wrapping_add(i as u64));
            if !zc.agrees() {
                notes.push(format!(
                    "{}: symbolic zero test ({}) disagrees with evaluation at {} points ({} nonzero)",
                    name, zc.symbolic_zero, zc.points, zc.nonzero_points
                ));
                passed = false;
            }
            let n = r.normalize();
            passed &= n.is_zero();
            residuals.push((name, n));
        }
        VerificationReport {
            passed,
            residuals,
            notes,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// Merge several reports, prefixing residual names.
    pub fn combine(parts: Vec<(String, VerificationReport)>) -> Self {
        let mut out = VerificationReport {
            passed: true,
            residuals: Vec::new(),
            notes: Vec::new(),
        };
        for (prefix, r) in parts {
            out.passed &= r.passed;
            out.residuals
                .extend(r.residuals.into_iter().map(|(n, e)| (format!("{}/{}", prefix, n), e)));
            out.notes
                .extend(r.notes.into_iter().map(|n| format!("{}: {}", prefix, n)));
        }
        out
    }

    pub fn failure(note: impl Into<String>) -> Self {
        VerificationReport {
            passed: false,
            residuals: Vec::new(),
            notes: vec![note.into()],
        }
    }

    pub fn nonzero_residuals(&self) -> impl Iterator<Item = &(String, Expr)> {
        self.residuals.iter().filter(|(_, e)| !e.is_zero())
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "passed": self.passed,
            "residuals": self.residuals.iter().map(|(n, e)| json!({
                "name": n,
                "zero": e.is_zero(),
                "value": e.to_string(),
            })).collect::<Vec<_>>(),
            "notes": self.notes,
        })
    }
}

fn seed_of(tag: &str) -> u64 {
    tag.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

fn family_t(w: Var) -> Family {
    Family {
        dependent: w,
        t_order: 1,
    }
}

/// `Q = (E_{u_t} T̂, E_{v_t} T̂)` with `T̂ = restrict(T)`.
pub fn multiplier_of_density(t: &Expr, sys: &PdeSystem) -> Result<MultiplierPair, VerifyError> {
    let that = sys.restrict(t)?;
    let q = MultiplierPair::new(
        sys.space.euler_spatial(&that, Family::UT)?,
        sys.space.euler_spatial(&that, Family::VT)?,
    );
    let high = q.high_order_jets();
    if !high.is_empty() {
        let names: Vec<String> = high.iter().map(|j| j.to_string()).collect();
        return Err(VerifyError::HigherOrder(format!(
            "multiplier of `{}` involves {}",
            t,
            names.join(", ")
        )));
    }
    Ok(q)
}

/// Trivial flux `Ψ̂ = -Σ_{k≥1} D_x^{k-1}(E^{(k)}_{w_t}(T̂) Δ_w)`, summed over
/// `w = u, v`. It vanishes when `T̂` has no mixed derivatives `w_{tx...}`.
pub fn trivial_flux(that: &Expr, sys: &PdeSystem) -> Result<Expr, VerifyError> {
    let mut terms = Vec::new();
    for w in [Var::U, Var::V] {
        let fam = family_t(w);
        let top = that
            .jets()
            .iter()
            .filter(|j| j.dependent == w && j.t_order == 1)
            .map(|j| j.x_order)
            .max()
            .unwrap_or(0);
        for k in 1..=top {
            let ek = sys.space.euler_higher(that, fam, k)?;
            if ek.is_zero() {
                continue;
            }
            let piece = sys.space.total_d_n(&(ek * sys.delta(w)), Dir::X, k - 1)?;
            terms.push(-piece);
        }
    }
    Ok(Expr::Sum(terms).normalize())
}

/// Characteristic identity
/// `D_t T̂ + D_x(X̂ + Ψ̂) - (Δ_u Q^u + Δ_v Q^v) = 0`, checked identically.
pub fn check_characteristic(
    t: &Expr,
    x: &Expr,
    q: &MultiplierPair,
    sys: &PdeSystem,
) -> Result<VerificationReport, VerifyError> {
    let that = sys.restrict(t)?;
    let xhat = sys.restrict(x)?;
    let psi = trivial_flux(&that, sys)?;
    let qu = sys.prepare(&q.q_u);
    let qv = sys.prepare(&q.q_v);
    let raw = Expr::Sum(vec![
        sys.space.total_d(&that, Dir::T)?,
        sys.space.total_d(&(xhat + psi), Dir::X)?,
        -(sys.delta_u() * qu),
        -(sys.delta_v() * qv),
    ]);
    let raw = sys.prepare(&raw);
    Ok(VerificationReport::from_raw(
        vec![("characteristic".into(), raw)],
        seed_of("characteristic"),
    ))
}

/// `restrict(D_t T + D_x X) = 0`.
pub fn check_onsolution(t: &Expr, x: &Expr, sys: &PdeSystem) -> Result<VerificationReport, VerifyError> {
    let div = sys.total_d(t, Dir::T)? + sys.total_d(x, Dir::X)?;
    let r = sys.restrict(&div)?;
    Ok(VerificationReport::from_raw(
        vec![("divergence".into(), r)],
        seed_of("divergence"),
    ))
}

fn derivative_of_nonlinearity(e: &Expr, w: Var, sys: &PdeSystem) -> Expr {
    crate::expr::partial_in(
        &sys.prepare(e),
        &Atom::Jet(JetCoordinate::new(w, 0, 0)),
        sys.functions(),
    )
}

/// Adjoint-symmetry equations and Helmholtz conditions, each restricted to
/// solutions.
pub fn check_determining(q: &MultiplierPair, sys: &PdeSystem) -> Result<VerificationReport, VerifyError> {
    let qu = sys.prepare(&q.q_u);
    let qv = sys.prepare(&q.q_v);
    let space = &sys.space;
    let mut raw = Vec::new();

    let cp = derivative_of_nonlinearity(&sys.c, Var::U, sys);
    let gp = derivative_of_nonlinearity(&sys.g, Var::U, sys);
    let dp = derivative_of_nonlinearity(&sys.d, Var::V, sys);
    let fp = derivative_of_nonlinearity(&sys.f, Var::V, sys);
    let adj_u = Expr::Sum(vec![
        space.total_d_n(&qu, Dir::T, 2)?,
        -(sys.a.clone().pow(2) * space.total_d_n(&qu, Dir::X, 2)?),
        cp * qu.clone(),
        gp * qv.clone(),
    ]);
    let adj_v = Expr::Sum(vec![
        space.total_d_n(&qv, Dir::T, 2)?,
        -(sys.b.clone().pow(2) * space.total_d_n(&qv, Dir::X, 2)?),
        dp * qv.clone(),
        fp * qu.clone(),
    ]);
    raw.push(("adjoint_symmetry_u".to_string(), sys.restrict(&adj_u)?));
    raw.push(("adjoint_symmetry_v".to_string(), sys.restrict(&adj_v)?));

    // ∂Q^b/∂(a_t)_{x^j} = (-1)^j E^{(j)}_{b_t}(Q^a), for a, b in {u, v}.
    let top = [&qu, &qv]
        .iter()
        .flat_map(|e| e.jets())
        .filter(|j| j.t_order == 1)
        .map(|j| j.x_order)
        .max()
        .unwrap_or(0)
        .max(1);
    for j in 0..=top {
        for a in [Var::U, Var::V] {
            for b in [Var::U, Var::V] {
                let qa = if a == Var::U { &qu } else { &qv };
                let qb = if b == Var::U { &qu } else { &qv };
                let lhs = crate::expr::partial_in(qb, &Atom::Jet(family_t(a).jet(j)), sys.functions());
                let rhs = space.euler_higher(qa, family_t(b), j)?;
                let r = if j % 2 == 0 { lhs - rhs } else { lhs + rhs };
                let name = format!("helmholtz_{}(Q^{}, {})", j, b.name(), family_t(a).jet(j));
                raw.push((name, sys.restrict(&r)?));
            }
        }
    }
    Ok(VerificationReport::from_raw(raw, seed_of("determining")))
}

/// Whether two density/flux pairs differ by a locally trivial law: the
/// multiplier of `T1 - T2` vanishes and its restriction is annihilated by
/// the spatial Euler operators in `u` and `v`.
pub fn compare_up_to_equivalence(
    p1: &DensityFluxPair,
    p2: &DensityFluxPair,
    sys: &PdeSystem,
) -> Result<VerificationReport, VerifyError> {
    let diff = sys.restrict(&(p1.t_density.clone() - p2.t_density.clone()))?;
    let mut raw = Vec::new();
    for fam in [Family::UT, Family::VT, Family::U, Family::V] {
        raw.push((format!("E_{}(T1 - T2)", fam), sys.space.euler_spatial(&diff, fam)?));
    }
    Ok(VerificationReport::from_raw(raw, seed_of("equivalence")))
}
