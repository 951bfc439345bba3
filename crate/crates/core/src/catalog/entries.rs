use super::modes::ModeSpec;
use super::{CaseId, CatalogEntry, Constraint, SpeedCondition};

use Constraint::*;

const ENERGY_T: &str = "(alpha*beta - 1)*(F(v) + G(u)) - (u_t*v_t + b^2*u_x*v_x + gamma*u*v) \
     + (1/2)*beta*(v_t^2 + b^2*v_x^2 + gamma*v^2) + (1/2)*alpha*(u_t^2 + b^2*u_x^2 + gamma*u^2)";
const ENERGY_X: &str = "b^2*(u_t*(v_x - alpha*u_x) + v_t*(u_x - beta*v_x))";

const MOMENTUM_T: &str = "(alpha*u_x - v_x)*u_t + (beta*v_x - u_x)*v_t";
const MOMENTUM_X: &str = "(alpha*beta - 1)*(F(v) + G(u)) + u_t*v_t + b^2*u_x*v_x - gamma*u*v \
     - (1/2)*beta*(v_t^2 + b^2*v_x^2 - gamma*v^2) - (1/2)*alpha*(u_t^2 + b^2*u_x^2 - gamma*u^2)";

const BOOST_T: &str = "(alpha*beta - 1)*x*(F(v) + G(u)) - x*(u_t*v_t + b^2*u_x*v_x + gamma*u*v) \
     + (1/2)*alpha*x*(u_t^2 + b^2*u_x^2 + gamma*u^2) + (1/2)*beta*x*(v_t^2 + b^2*v_x^2 + gamma*v^2) \
     + b^2*t*(alpha*u_t*u_x + beta*v_t*v_x - u_t*v_x - u_x*v_t)";
const BOOST_X: &str = "b^2*(alpha*beta - 1)*t*(F(v) + G(u)) + b^2*t*(u_t*v_t + b^2*u_x*v_x - gamma*u*v) \
     - (1/2)*alpha*b^2*t*(u_t^2 + b^2*u_x^2 - gamma*u^2) - (1/2)*beta*b^2*t*(v_t^2 + b^2*v_x^2 - gamma*v^2) \
     + b^2*x*(u_t*v_x + u_x*v_t - alpha*u_t*u_x - beta*v_t*v_x)";

const HYPER_T: &str = "((alpha*beta - 1)*(F(v) + G(u)) \
     + (1/2)*alpha*(u_t + s*b*u_x)^2 + (1/2)*beta*(v_t + s*b*v_x)^2 - (u_t + s*b*u_x)*(v_t + s*b*v_x))*A(t,x) \
     + 2*(alpha/delta - 1/mu)*(u_t*A[1,0](t,x) - u*A[2,0](t,x)) \
     + 2*(beta/mu - 1/delta)*(v_t*A[1,0](t,x) - v*A[2,0](t,x))";
const HYPER_X: &str = "s*b*(((alpha*beta - 1)*(F(v) + G(u)) \
     - (1/2)*alpha*(u_t + s*b*u_x)^2 - (1/2)*beta*(v_t + s*b*v_x)^2 + (u_t + s*b*u_x)*(v_t + s*b*v_x))*A(t,x) \
     - 2*b^2*(alpha/delta - 1/mu)*(u_x*A[0,1](t,x) - u*A[0,2](t,x)) \
     - 2*b^2*(beta/mu - 1/delta)*(v_x*A[0,1](t,x) - v*A[0,2](t,x)))";

const HYPER_T_PRINTED: &str = "((alpha*beta - 1)*(lambda*gamma*exp(delta*u) + delta*kappa*exp(gamma*v)) \
     + (1/2)*delta*gamma*(alpha*(u_t + s*b*u_x)^2 + beta*(v_t + s*b*v_x)^2) \
     - delta*gamma*(u_t + s*b*u_x)*(v_t + s*b*v_x))*A(t,x) \
     + 2*((delta*beta - gamma)*v_t + (gamma*alpha - delta)*u_t)*A[1,0](t,x) \
     + 2*((delta - gamma*alpha)*u + (gamma - delta*beta)*v)*A[2,0](t,x)";
const HYPER_X_PRINTED: &str = "s*b*(((alpha*beta - 1)*(lambda*gamma*exp(delta*u) + delta*kappa*exp(gamma*v)) \
     - (1/2)*delta*gamma*(alpha*(u_t + s*b*u_x)^2 + beta*(v_t + s*b*v_x)^2) \
     + delta*gamma*(u_t + s*b*u_x)*(v_t + s*b*v_x))*A(t,x) \
     + 2*((delta - gamma*alpha)*u_x + (gamma - delta*beta)*v_x)*A[0,1](t,x) \
     + 2*b^2*((delta*beta - gamma)*v + (gamma*alpha - delta)*u)*A[0,2](t,x))";

const ENERGY_T_PRINTED: &str = "(alpha*beta - 1)*(F(v) + G(u)) - (u_t*v_t + b^2*u_x*v_x + gamma*u*v) \
     + (1/2)*alpha*(v_t^2 + b^2*v_x^2 + gamma*v^2) + (1/2)*beta*(u_t^2 + b^2*u_x^2 + gamma*u^2)";
const ENERGY_X_PRINTED: &str = "b^2*(u_t*(v_x - beta*u_x) + v_t*(u_x - alpha*v_x))";
const MOMENTUM_T_PRINTED: &str = "(beta*u_x - v_x)*u_t + (alpha*v_x - u_x)*v_t";
const MOMENTUM_X_PRINTED: &str = "(alpha*beta - 1)*(F(v) + G(u)) + u_t*v_t + b^2*u_x*v_x - gamma*u*v \
     - (1/2)*alpha*(v_t^2 + b^2*v_x^2 - gamma*v^2) - (1/2)*beta*(u_t^2 + b^2*u_x^2 - gamma*u^2)";

/// All nine families, ordered `T1` to `T9`.
pub fn list_cases() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            family: "T1",
            case_id: CaseId::A,
            name: "elementary mode projection",
            hypothesis: "a != b; c(u) = (1/alpha)*g(u) + delta*u; d(v) = alpha*f(v) + gamma*v; f, g arbitrary",
            speed_condition: SpeedCondition::Unequal,
            parameter_symbols: &["a", "b", "alpha", "gamma", "delta"],
            constraints: &[Positive("a"), Positive("b"), Distinct("a", "b"), NonZero("alpha")],
            arbitrary_nonlinearity: true,
            nonlinearities: ["(1/alpha)*g(u) + delta*u", "f(v)", "alpha*f(v) + gamma*v", "g(u)"],
            multiplier: ["-alpha*A(t)*B(x)", "A(t)*B(x)"],
            density_flux: [
                "((v_t - alpha*u_t)*A(t) + (alpha*u - v)*A'(t))*B(x)",
                "((alpha*a^2*u_x - b^2*v_x)*B(x) + (b^2*v - alpha*a^2*u)*B'(x))*A(t)",
            ],
            printed: None,
            modes: Some(ModeSpec::separated()),
            singular_at_zero: false,
            aliases: &[],
        },
        CatalogEntry {
            family: "T2",
            case_id: CaseId::B,
            name: "energy",
            hypothesis: "a = b; c(u) = beta*g(u) + gamma*u; d(v) = alpha*f(v) + gamma*v; f, g arbitrary",
            speed_condition: SpeedCondition::Equal,
            parameter_symbols: &["b", "alpha", "beta", "gamma"],
            constraints: &[Positive("b")],
            arbitrary_nonlinearity: true,
            nonlinearities: ["beta*g(u) + gamma*u", "f(v)", "alpha*f(v) + gamma*v", "g(u)"],
            multiplier: ["alpha*u_t - v_t", "beta*v_t - u_t"],
            density_flux: [ENERGY_T, ENERGY_X],
            printed: Some([ENERGY_T_PRINTED, ENERGY_X_PRINTED]),
            modes: None,
            singular_at_zero: false,
            aliases: &["c = d = 0: Q = (v_t, u_t)", "d = 0, c = kappa*g(u): Q = (v_t, u_t - kappa*v_t)"],
        },
        CatalogEntry {
            family: "T3",
            case_id: CaseId::B,
            name: "momentum",
            hypothesis: "a = b; c(u) = beta*g(u) + gamma*u; d(v) = alpha*f(v) + gamma*v; f, g arbitrary",
            speed_condition: SpeedCondition::Equal,
            parameter_symbols: &["b", "alpha", "beta", "gamma"],
            constraints: &[Positive("b")],
            arbitrary_nonlinearity: true,
            nonlinearities: ["beta*g(u) + gamma*u", "f(v)", "alpha*f(v) + gamma*v", "g(u)"],
            multiplier: ["alpha*u_x - v_x", "beta*v_x - u_x"],
            density_flux: [MOMENTUM_T, MOMENTUM_X],
            printed: Some([MOMENTUM_T_PRINTED, MOMENTUM_X_PRINTED]),
            modes: None,
            singular_at_zero: false,
            aliases: &["c = d = 0: Q = (v_x, u_x)", "d = 0, c = kappa*g(u): Q = (v_x, u_x - kappa*v_x)"],
        },
        CatalogEntry {
            family: "T4",
            case_id: CaseId::B,
            name: "boost momentum",
            hypothesis: "a = b; c(u) = beta*g(u) + gamma*u; d(v) = alpha*f(v) + gamma*v; f, g arbitrary",
            speed_condition: SpeedCondition::Equal,
            parameter_symbols: &["b", "alpha", "beta", "gamma"],
            constraints: &[Positive("b")],
            arbitrary_nonlinearity: true,
            nonlinearities: ["beta*g(u) + gamma*u", "f(v)", "alpha*f(v) + gamma*v", "g(u)"],
            multiplier: [
                "b^2*t*(alpha*u_x - v_x) + x*(alpha*u_t - v_t)",
                "b^2*t*(beta*v_x - u_x) + x*(beta*v_t - u_t)",
            ],
            density_flux: [BOOST_T, BOOST_X],
            printed: None,
            modes: None,
            singular_at_zero: false,
            aliases: &["c = d = 0: Q = (b^2*t*v_x + x*v_t, b^2*t*u_x + x*u_t)"],
        },
        CatalogEntry {
            family: "T5",
            case_id: CaseId::C,
            name: "elementary mode projection",
            hypothesis: "a = b; c(u) = (1/alpha)*g(u) + gamma*u; d(v) = alpha*f(v) + gamma*v; f, g arbitrary",
            speed_condition: SpeedCondition::Equal,
            parameter_symbols: &["b", "alpha", "gamma"],
            constraints: &[Positive("b"), NonZero("alpha")],
            arbitrary_nonlinearity: true,
            nonlinearities: ["(1/alpha)*g(u) + gamma*u", "f(v)", "alpha*f(v) + gamma*v", "g(u)"],
            multiplier: ["alpha*A(t,x)", "-A(t,x)"],
            density_flux: [
                "(alpha*u_t - v_t)*A(t,x) + (v - alpha*u)*A[1,0](t,x)",
                "b^2*((v_x - alpha*u_x)*A(t,x) + (alpha*u - v)*A[0,1](t,x))",
            ],
            printed: None,
            modes: Some(ModeSpec::klein_gordon()),
            singular_at_zero: false,
            aliases: &["Q = (-alpha*A(t,x), A(t,x)) with A replaced by -A"],
        },
        CatalogEntry {
            family: "T6",
            case_id: CaseId::D,
            name: "light-cone energy-momentum",
            hypothesis: "a = b; c(u) = (1/alpha)*g(u); d(v) = alpha*f(v); f, g arbitrary",
            speed_condition: SpeedCondition::Equal,
            parameter_symbols: &["b", "alpha", "s"],
            constraints: &[Positive("b"), NonZero("alpha"), Sign("s")],
            arbitrary_nonlinearity: true,
            nonlinearities: ["(1/alpha)*g(u)", "f(v)", "alpha*f(v)", "g(u)"],
            multiplier: ["alpha*B'(zeta)", "-B'(zeta)"],
            density_flux: ["B(zeta)", "-s*b*B(zeta)"],
            printed: None,
            modes: Some(ModeSpec::profile()),
            singular_at_zero: false,
            aliases: &["Q = (-alpha*A(zeta), A(zeta)) with A = -B'"],
        },
        CatalogEntry {
            family: "T7",
            case_id: CaseId::E,
            name: "hyperbolic energy",
            hypothesis: "a = b; c(u) = beta*g(u); d(v) = alpha*f(v); f(v) = kappa*exp(mu*v); g(u) = lambda*exp(delta*u)",
            speed_condition: SpeedCondition::Equal,
            parameter_symbols: &["b", "alpha", "beta", "kappa", "mu", "lambda", "delta", "s"],
            constraints: &[
                Positive("b"),
                NonZero("kappa"),
                NonZero("mu"),
                NonZero("lambda"),
                NonZero("delta"),
                Sign("s"),
            ],
            arbitrary_nonlinearity: false,
            nonlinearities: [
                "beta*lambda*exp(delta*u)",
                "kappa*exp(mu*v)",
                "alpha*kappa*exp(mu*v)",
                "lambda*exp(delta*u)",
            ],
            multiplier: [
                "(alpha*u_t - v_t + s*b*(alpha*u_x - v_x))*A(t,x) + 2*(alpha/delta - 1/mu)*A[1,0](t,x)",
                "(beta*v_t - u_t + s*b*(beta*v_x - u_x))*A(t,x) + 2*(beta/mu - 1/delta)*A[1,0](t,x)",
            ],
            density_flux: [HYPER_T, HYPER_X],
            printed: Some([HYPER_T_PRINTED, HYPER_X_PRINTED]),
            modes: Some(ModeSpec::travelling()),
            singular_at_zero: false,
            aliases: &[
                "c = d = 0 with exponential f, g: same structure under separate exponent names",
                "d = 0, c proportional to g, exponential f, g: same structure under separate exponent names",
            ],
        },
        CatalogEntry {
            family: "T8",
            case_id: CaseId::F,
            name: "rotation charge",
            hypothesis: "a = b; c(u) = gamma*u; d(v) = gamma*v; f(v) = alpha/v; g(u) = beta/u; gamma != 0",
            speed_condition: SpeedCondition::Equal,
            parameter_symbols: &["b", "alpha", "beta", "gamma"],
            constraints: &[Positive("b"), NonZero("alpha"), NonZero("beta"), NonZero("gamma")],
            arbitrary_nonlinearity: false,
            nonlinearities: ["gamma*u", "alpha/v", "gamma*v", "beta/u"],
            multiplier: ["-v", "u"],
            density_flux: ["u*v_t - v*u_t", "b^2*(v*u_x - u*v_x) + (beta - alpha)*x"],
            printed: None,
            modes: None,
            singular_at_zero: true,
            aliases: &[],
        },
        CatalogEntry {
            family: "T9",
            case_id: CaseId::G,
            name: "dilational energy-momentum",
            hypothesis: "a = b; c = d = 0; f(v) = alpha*v^(k-1); g(u) = beta*u^(-k-1)",
            speed_condition: SpeedCondition::Equal,
            parameter_symbols: &["b", "alpha", "beta", "k"],
            constraints: &[Positive("b"), NonZero("alpha"), NonZero("beta"), IntegerExcept("k", &[-2, -1, 0, 1, 2])],
            arbitrary_nonlinearity: false,
            nonlinearities: ["0", "alpha*v^(k-1)", "0", "beta*u^(-k-1)"],
            multiplier: ["k*t*v_t + k*x*v_x + 2*v", "k*t*u_t + k*x*u_x - 2*u"],
            density_flux: [
                "k*t*(v_t*u_t + b^2*v_x*u_x) + k*x*(v_x*u_t + u_x*v_t) + 2*(v*u_t - u*v_t) + t*(alpha*v^k - beta*u^(-k))",
                "-b^2*k*t*(v_t*u_x + u_t*v_x) - k*x*(v_t*u_t + b^2*v_x*u_x) + x*(alpha*v^k - beta*u^(-k)) \
                 - 2*b^2*(v*u_x - u*v_x)",
            ],
            printed: Some([
                "k*t*(v_t*u_t + b^2*v_x*u_x) + k*x*(v_x*u_t + u_x*v_t) + 2*(v*u_t - u*v_t) + t*(alpha*v^k - beta*u^(-k))",
                "-b^2*k*t*(v_t*u_x + u_t*v_x) - k*x*(v_t*u_t + b^2*v_x*u_x) + x*(alpha*v^k - beta*u^(-k))",
            ]),
            modes: None,
            singular_at_zero: true,
            aliases: &["with alpha and beta exchanged: f(v) = beta*v^(k-1), g(u) = alpha*u^(-k-1)"],
        },
    ]
}
