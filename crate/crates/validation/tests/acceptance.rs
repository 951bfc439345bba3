//! Acceptance criteria AC-1..AC-8, one line each. Run with
//! `cargo test -p conslaw-validation --test acceptance`; the process fails
//! if any criterion does.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use conslaw::catalog::{adjudicate, list_cases, verify_entries};
use conslaw::expr::{parse, substitute_atom, zero_check, Atom, Expr, DEFAULT_PARAMETERS};
use conslaw::jetcalc::{Dir, Family, JetSpace, PdeSystem};
use conslaw::simulate::{convergence_study, run, ConfigFile, ExprText, InitialSpec, MonitorSpec, Order};
use conslaw::verifier::{check_determining, MultiplierPair};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn p(s: &str) -> Expr {
    parse(s, DEFAULT_PARAMETERS).unwrap()
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn config_file(name: &str) -> ConfigFile {
    let text = std::fs::read_to_string(configs().join(name)).unwrap();
    ConfigFile::from_json(&text).unwrap()
}

fn ac1() -> Outcome {
    let start = Instant::now();
    let mut failed = Vec::new();
    let mut checks = 0;
    let cases = list_cases();
    for entry in &cases {
        let r = verify_entries(std::slice::from_ref(entry), 3, 42);
        checks += r.residuals.len();
        let labels: BTreeSet<&str> = r
            .residuals
            .iter()
            .filter_map(|(n, _)| n.split_once("]/").map(|(l, _)| l))
            .collect();
        let kinds = ["determining", "divergence", "round_trip"];
        let covered = labels.iter().all(|l| {
            kinds.iter().all(|k| {
                r.residuals
                    .iter()
                    .any(|(n, _)| n.starts_with(&format!("{}]/{}/", l, k)))
            })
        });
        if !r.passed || labels.len() < 3 || !covered {
            failed.push(format!("{} ({} instantiations)", entry.family, labels.len()));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let detail = format!(
        "{} families x 3 instantiations, {} zero residuals, {:.1} s",
        cases.len(),
        checks,
        secs
    );
    if cases.len() == 9 && failed.is_empty() && secs <= 60.0 {
        Ok(detail)
    } else {
        Err(format!("{}; failing {:?}", detail, failed))
    }
}

fn ac2() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for entry in list_cases().iter().filter(|e| ["T2", "T3", "T4"].contains(&e.family)) {
        let adj = adjudicate(entry).map_err(|e| e.to_string())?;
        ok &= adj.settled();
        lines.push(format!(
            "{}: {} passes, shipped {}, equal at alpha = beta {}",
            adj.family,
            adj.passing_variant().unwrap_or("none or both"),
            adj.shipped,
            adj.equal_at_alpha_eq_beta
        ));
    }
    let detail = lines.join("; ");
    if ok && lines.len() == 3 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// `r` vanishes at `b = a` and at `b = -a`, so `a^2 - b^2` divides it.
fn has_speed_factor(r: &Expr) -> bool {
    let b = Atom::Param("b".into());
    substitute_atom(r, &b, &p("a")).is_zero() && substitute_atom(r, &b, &p("-a")).is_zero()
}

/// Residual is nonzero symbolically and at each of 20 random points.
fn nonzero_at_points(r: &Expr, seed: u64) -> bool {
    let zc = zero_check(r, 20, seed);
    !zc.symbolic_zero && zc.points == 20 && zc.nonzero_points == 20
}

fn ac3() -> Outcome {
    let sys = PdeSystem::new(p("a"), p("b"), p("0"), p("f(v)"), p("0"), p("g(u)")).map_err(|e| e.to_string())?;
    let report = check_determining(&MultiplierPair::new(p("v_t"), p("u_t")), &sys).map_err(|e| e.to_string())?;
    let nonzero: Vec<&(String, Expr)> = report.nonzero_residuals().collect();
    let determining_ok = !report.passed
        && !nonzero.is_empty()
        && nonzero.iter().all(|(_, r)| has_speed_factor(r))
        && nonzero
            .iter()
            .enumerate()
            .all(|(i, (_, r))| nonzero_at_points(r, 100 + i as u64));

    let space = JetSpace::new(sys.functions().clone(), 8);
    let product = sys.delta_u() * p("v_x") + sys.delta_v() * p("u_x");
    let (divergence, ru, rv) = space.is_divergence(&product).map_err(|e| e.to_string())?;
    let divergence_ok = !divergence
        && [&ru, &rv].iter().all(|r| r.is_zero() || has_speed_factor(r))
        && [&ru, &rv].iter().filter(|r| !r.is_zero()).count() > 0
        && [&ru, &rv]
            .iter()
            .filter(|r| !r.is_zero())
            .enumerate()
            .all(|(i, r)| nonzero_at_points(r, 200 + i as u64));

    // At equal speeds the same product is a divergence.
    let equal = PdeSystem::new(p("b"), p("b"), p("0"), p("f(v)"), p("0"), p("g(u)")).map_err(|e| e.to_string())?;
    let equal_product = equal.delta_u() * p("v_x") + equal.delta_v() * p("u_x");
    let control = space.is_divergence(&equal_product).map_err(|e| e.to_string())?.0;

    let detail = format!(
        "determining: {} nonzero residuals with factor a^2-b^2; (v_x,u_x) product: E_u = {}",
        nonzero.len(),
        ru
    );
    if determining_ok && divergence_ok && control {
        Ok(detail)
    } else {
        Err(format!(
            "{} (determining ok {}, divergence ok {}, equal-speed control {})",
            detail, determining_ok, divergence_ok, control
        ))
    }
}

const JET_FACTORS: &[&str] = &[
    "u", "v", "u_t", "v_t", "u_x", "v_x", "u_xx", "v_xx", "u_tx", "x", "t", "exp(u)", "sin(v)", "f(v)", "g(u)",
];

fn random_expr(rng: &mut ChaCha8Rng) -> Expr {
    let terms = rng.gen_range(1..=4);
    let mut text = Vec::new();
    for _ in 0..terms {
        let c = rng.gen_range(1..=5) * if rng.gen_bool(0.5) { 1 } else { -1 };
        let k = rng.gen_range(1..=3);
        let factors: Vec<&str> = (0..k).map(|_| *JET_FACTORS.choose(rng).unwrap()).collect();
        text.push(format!("({})*{}", c, factors.join("*")));
    }
    p(&text.join(" + "))
}

fn ac4() -> Outcome {
    let js = JetSpace::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut annihilated = 0;
    for _ in 0..100 {
        let e = random_expr(&mut rng);
        let dx = js.total_d(&e, Dir::X).map_err(|e| e.to_string())?;
        let all = [Family::U, Family::V, Family::UT, Family::VT]
            .iter()
            .all(|&fam| js.euler_spatial(&dx, fam).map(|r| r.is_zero()).unwrap_or(false));
        annihilated += all as usize;
    }

    let mut characterized = 0;
    for i in 0..100 {
        let a = random_expr(&mut rng);
        let b = random_expr(&mut rng);
        let div =
            js.total_d(&a, Dir::T).map_err(|e| e.to_string())? + js.total_d(&b, Dir::X).map_err(|e| e.to_string())?;
        let accepted = js.is_divergence(&div).map_err(|e| e.to_string())?.0;
        // A source term u^p v^q with p >= 1 has δ/δu = p u^(p-1) v^q.
        let source = p(&format!("{}*u^{}*v^{}", i % 7 + 1, i % 3 + 1, i % 2));
        let rejected = !js.is_divergence(&(div + source)).map_err(|e| e.to_string())?.0;
        characterized += (accepted && rejected) as usize;
    }

    // Hand expansions of E^(k) = Σ_{j≥k} C(j,k) (-D_x)^(j-k) ∂/∂u_{x^j}.
    let cases = [
        ("u_x^2", 1, "2*u_x"),
        ("u_xx^2", 1, "-4*u_xxx"),
        ("u_xx^2", 2, "2*u_xx"),
        ("u*u_xx", 1, "-2*u_x"),
        ("u*u_xx", 2, "u"),
        ("u_x*u_xxx", 1, "4*u_xxx"),
        ("u_x*u_xxx", 2, "-3*u_xx"),
        ("x*u_x^2", 1, "2*x*u_x"),
        ("v*u_xxx", 2, "-3*v_x"),
        ("u", 1, "0"),
    ];
    let mut hand = 0;
    for (e, k, expected) in cases {
        let got = js.euler_higher(&p(e), Family::U, k).map_err(|e| e.to_string())?;
        hand += (got == p(expected).normalize()) as usize;
    }

    let detail = format!(
        "{}/100 annihilation, {}/100 divergence characterization, {}/{} hand-expanded E^(1), E^(2)",
        annihilated,
        characterized,
        hand,
        cases.len()
    );
    if annihilated == 100 && characterized == 100 && hand == cases.len() {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ac5() -> Outcome {
    let start = Instant::now();
    let cfg = config_file("case_b.json").build().map_err(|e| e.to_string())?;
    let series = run(&cfg).map_err(|e| e.to_string())?;
    let drift_ok = series.drift.iter().all(|d| *d <= 1e-3);
    let coarse = cfg.refined(200).map_err(|e| e.to_string())?;
    let study = convergence_study(&coarse, 3).map_err(|e| e.to_string())?;
    let orders: Vec<String> = study
        .orders
        .iter()
        .map(|o| match o {
            Order::Fitted(p) => format!("{:.2}", p),
            Order::Exact => "exact".into(),
            Order::Undetermined => "undetermined".into(),
        })
        .collect();
    let order_ok = study
        .orders
        .iter()
        .all(|o| matches!(o, Order::Fitted(p) if (p - 2.0).abs() <= 0.3));
    let secs = start.elapsed().as_secs_f64();
    let detail = format!(
        "drift {} ; orders over N = {:?}: {} ; {:.1} s",
        series
            .names
            .iter()
            .zip(&series.drift)
            .map(|(n, d)| format!("{} {:.2e}", n, d))
            .collect::<Vec<_>>()
            .join(", "),
        study.cells,
        orders.join(", "),
        secs
    );
    if drift_ok && order_ok && secs <= 60.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ac6() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for name in ["case_d.json", "case_e.json", "case_a.json"] {
        let cfg = config_file(name).build().map_err(|e| format!("{}: {}", name, e))?;
        let series = run(&cfg).map_err(|e| format!("{}: {}", name, e))?;
        for (n, d) in series.names.iter().zip(&series.drift) {
            ok &= *d <= 1e-3;
            parts.push(format!("{} {:.2e}", n, d));
        }
        ok &= series.contact_time.is_none();
    }
    let detail = parts.join(", ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn text(s: &str) -> InitialSpec {
    InitialSpec::Expr(ExprText::Text(s.into()))
}

/// Case (b) momentum at the AC-5 resolution for `u = v = φ(x - c t)`,
/// `φ = exp(-x^2/4)/2`.
fn packet_momentum(c: i32) -> Result<(f64, f64), String> {
    let mut file = config_file("case_b.json");
    file.initial_u = text("(1/2)*exp(-x^2/4)");
    file.initial_v = text("(1/2)*exp(-x^2/4)");
    // u_t = -c φ'(x) = c (x/4) exp(-x^2/4).
    let ut = format!("({})*(x/4)*exp(-x^2/4)", c);
    file.initial_ut = text(&ut);
    file.initial_vt = text(&ut);
    file.monitors.retain(|m| m.name == "momentum");
    let series = run(&file.build().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let values = &series.values[0];
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok((min, max))
}

fn ac7() -> Outcome {
    let (right_min, right_max) = packet_momentum(1)?;
    let (left_min, left_max) = packet_momentum(-1)?;
    let detail = format!(
        "right-moving momentum in [{:.4}, {:.4}], mirrored in [{:.4}, {:.4}]",
        right_min, right_max, left_min, left_max
    );
    if right_min > 0.0 && left_max < 0.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ac8() -> Outcome {
    let mut file = config_file("case_b.json");
    file.monitors = vec![MonitorSpec {
        name: "kinetic_u".into(),
        density: Some("u_t^2".into()),
        family: None,
        params: Default::default(),
        mode: 0,
    }];
    let cfg = file.build().map_err(|e| e.to_string())?;
    let coarse = run(&cfg).map_err(|e| e.to_string())?.drift[0];
    let fine = run(&cfg.refined(2 * cfg.cells).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?
        .drift[0];
    let detail = format!("u_t^2 drift {:.3} at N = 800, {:.3} at N = 1600", coarse, fine);
    if coarse > 0.1 && fine >= coarse {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("AC-1", ac1),
        ("AC-2", ac2),
        ("AC-3", ac3),
        ("AC-4", ac4),
        ("AC-5", ac5),
        ("AC-6", ac6),
        ("AC-7", ac7),
        ("AC-8", ac8),
    ];
    let results: Vec<(&str, Outcome)> = criteria.into_iter().map(|(name, f)| (name, f())).collect();
    let mut failures = 0;
    for (name, r) in &results {
        match r {
            Ok(d) => println!("{} PASS  {}", name, d),
            Err(d) => {
                failures += 1;
                println!("{} FAIL  {}", name, d);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        results.len() - failures,
        results.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
