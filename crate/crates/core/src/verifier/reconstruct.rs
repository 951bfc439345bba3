//! Density and flux from a first-order multiplier by integrating the split
//! characteristic equation.

use crate::expr::{integrate, integrate_gradient, partial_in, substitute, Atom, Expr, Indep, JetCoordinate, Var};
use crate::jetcalc::{Dir, PdeSystem};

use super::{check_characteristic, DensityFluxPair, MultiplierPair, VerifyError};

fn jet(w: Var, t: u32, x: u32) -> Atom {
    Atom::Jet(JetCoordinate::new(w, t, x))
}

fn first_order_jets() -> [Atom; 4] {
    [
        jet(Var::U, 1, 0),
        jet(Var::V, 1, 0),
        jet(Var::U, 0, 1),
        jet(Var::V, 0, 1),
    ]
}

fn set_zero(e: &Expr, atoms: &[Atom]) -> Expr {
    substitute(e, &|a| atoms.contains(a).then(Expr::zero)).normalize()
}

fn inconsistent(msg: impl Into<String>) -> VerifyError {
    VerifyError::Inconsistent(msg.into())
}

/// Reconstruct `(T, X)` from a first-order multiplier. The result is
/// verified with [`check_characteristic`]; failure is reported as
/// [`VerifyError::Inconsistent`].
pub fn reconstruct(q: &MultiplierPair, sys: &PdeSystem) -> Result<DensityFluxPair, VerifyError> {
    let high = q.high_order_jets();
    if !high.is_empty() {
        return Err(VerifyError::HigherOrder(format!(
            "multiplier involves {}",
            high.iter().map(|j| j.to_string()).collect::<Vec<_>>().join(", ")
        )));
    }
    let table = sys.functions();
    let qu = sys.prepare(&q.q_u);
    let qv = sys.prepare(&q.q_v);
    let [ut, vt, ux, vx] = first_order_jets();
    let (u, v) = (jet(Var::U, 0, 0), jet(Var::V, 0, 0));
    let a2 = sys.a.clone().pow(2);
    let b2 = sys.b.clone().pow(2);

    // T_{u_t} = Q^u, T_{v_t} = Q^v.
    let i_part = integrate_gradient(&[(ut.clone(), qu.clone()), (vt.clone(), qv.clone())], table)
        .map_err(|e| inconsistent(format!("T_(u_t), T_(v_t): {}", e)))?;
    // X_{u_x} = -a^2 Q^u, X_{v_x} = -b^2 Q^v.
    let k_part = integrate_gradient(
        &[(ux.clone(), -(a2 * qu.clone())), (vx.clone(), -(b2 * qv.clone()))],
        table,
    )
    .map_err(|e| inconsistent(format!("X_(u_x), X_(v_x): {}", e)))?;

    // X1_{w_t} + T0_{w_x} = -I_{w_x} - K_{w_t}: split into a part free of
    // (u_x, v_x) for X1 and a part free of (u_t, v_t) for T0.
    let mut psi = Vec::new();
    let mut phi = Vec::new();
    for (wt, wx) in [(&ut, &ux), (&vt, &vx)] {
        let r = (-(partial_in(&i_part, wx, table) + partial_in(&k_part, wt, table))).normalize();
        let p = set_zero(&r, &[ut.clone(), vt.clone()]);
        let f = (r - p.clone()).normalize();
        if f.contains_atom(&ux) || f.contains_atom(&vx) {
            return Err(inconsistent(format!("mixed terms in `{}`", f)));
        }
        psi.push(p);
        phi.push(f);
    }
    let t0 = integrate_gradient(&[(ux.clone(), psi[0].clone()), (vx.clone(), psi[1].clone())], table)
        .map_err(|e| inconsistent(format!("T0: {}", e)))?;
    let x1 = integrate_gradient(&[(ut.clone(), phi[0].clone()), (vt.clone(), phi[1].clone())], table)
        .map_err(|e| inconsistent(format!("X1: {}", e)))?;

    // The remaining transport equation: S = s0 + s1 u_t + s2 v_t + s3 u_x
    // + s4 v_x + κ (u_t v_x - v_t u_x) with coefficients in (t, x, u, v).
    let t_known = (i_part.clone() + t0.clone()).normalize();
    let x_known = (k_part.clone() + x1.clone()).normalize();
    let transport = sys.restrict(&(sys.space.total_d(&t_known, Dir::T)? + sys.space.total_d(&x_known, Dir::X)?))?;
    if transport.max_jet_order() > 1 {
        return Err(inconsistent(format!(
            "second-order terms remain in the transport equation: `{}`",
            transport
        )));
    }
    let s = (-transport).normalize();
    let jets = first_order_jets();
    let at_zero = |e: &Expr| set_zero(e, &jets);
    let s0 = at_zero(&s);
    let s1 = at_zero(&partial_in(&s, &ut, table));
    let s2 = at_zero(&partial_in(&s, &vt, table));
    let s3 = at_zero(&partial_in(&s, &ux, table));
    let s4 = at_zero(&partial_in(&s, &vx, table));
    let kappa = at_zero(&partial_in(&partial_in(&s, &ut, table), &vx, table));
    let model = Expr::Sum(vec![
        s0.clone(),
        s1.clone() * Expr::Atom(ut.clone()),
        s2.clone() * Expr::Atom(vt.clone()),
        s3.clone() * Expr::Atom(ux.clone()),
        s4.clone() * Expr::Atom(vx.clone()),
        kappa.clone()
            * (Expr::Atom(ut.clone()) * Expr::Atom(vx.clone()) - Expr::Atom(vt.clone()) * Expr::Atom(ux.clone())),
    ]);
    if !(s.clone() - model).is_zero() {
        return Err(inconsistent(format!(
            "transport remainder `{}` is not of the admissible form",
            s
        )));
    }

    // Gauge h_u = 0, h_v = ∫κ du.
    let h2 = integrate(&kappa, &u, table)?;
    let (tt, xx) = (Atom::Indep(Indep::T), Atom::Indep(Indep::X));
    let h2_t = partial_in(&h2, &tt, table);
    let h2_x = partial_in(&h2, &xx, table);
    let t00 = integrate_gradient(&[(u.clone(), s1), (v.clone(), (s2 + h2_x).normalize())], table)
        .map_err(|e| inconsistent(format!("T00: {}", e)))?;
    let x10 = integrate_gradient(&[(u.clone(), s3), (v.clone(), (s4 - h2_t).normalize())], table)
        .map_err(|e| inconsistent(format!("X10: {}", e)))?;
    let r = (s0 - partial_in(&t00, &tt, table) - partial_in(&x10, &xx, table)).normalize();
    if r.contains_atom(&u) || r.contains_atom(&v) {
        return Err(inconsistent(format!("residual source `{}` depends on u or v", r)));
    }
    let (tau, chi) = if r.is_zero() {
        (Expr::zero(), Expr::zero())
    } else {
        match integrate(&r, &xx, table) {
            Ok(chi) => (Expr::zero(), chi),
            Err(_) => (integrate(&r, &tt, table)?, Expr::zero()),
        }
    };

    let vx_e = Expr::Atom(vx.clone());
    let vt_e = Expr::Atom(vt.clone());
    let t_density = table.reduce(&Expr::Sum(vec![t_known, vx_e * h2.clone(), t00, tau]));
    let x_flux = table.reduce(&Expr::Sum(vec![x_known, -(vt_e * h2), x10, chi]));
    let report = check_characteristic(&t_density, &x_flux, q, sys)?;
    if !report.passed {
        let res: Vec<String> = report.nonzero_residuals().map(|(_, e)| e.to_string()).collect();
        return Err(inconsistent(format!(
            "reconstructed pair fails the characteristic identity: {}",
            res.join("; ")
        )));
    }
    Ok(DensityFluxPair::new(t_density, x_flux))
}
