//! One-line system specification `a=..,b=..,c=..,d=..,f=..,g=..`.
//!
//! Commas inside parentheses or brackets belong to the expression. `a` and
//! `b` are required; `c`, `d` default to `0` and `f`, `g` to the formal
//! `f(v)`, `g(u)`.

use conslaw::expr::{Expr, Parser, DEFAULT_MAX_JET_ORDER};
use conslaw::jetcalc::PdeSystem;

pub const ENV_MAX_ORDER: &str = "CONSLAW_MAX_JET_ORDER";

/// Jet-order bound from the environment (default 8).
pub fn max_jet_order() -> Result<u32, String> {
    match std::env::var(ENV_MAX_ORDER) {
        Ok(v) => v
            .trim()
            .parse::<u32>()
            .ok()
            .filter(|n| *n >= 2)
            .ok_or_else(|| format!("{} = `{}` is not an integer >= 2", ENV_MAX_ORDER, v)),
        Err(_) => Ok(DEFAULT_MAX_JET_ORDER),
    }
}

pub fn parser() -> Result<Parser, String> {
    Ok(Parser::new(conslaw::expr::DEFAULT_PARAMETERS).with_max_jet_order(max_jet_order()?))
}

pub fn parse_expr(text: &str, what: &str) -> Result<Expr, String> {
    parser()?.parse(text).map_err(|e| format!("{}: {}", what, e))
}

fn split_top_level(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}

/// The six component texts in the order `a, b, c, f, d, g`.
pub fn components(text: &str) -> Result<[String; 6], String> {
    let names = ["a", "b", "c", "f", "d", "g"];
    let mut values: [Option<String>; 6] = Default::default();
    for part in split_top_level(text) {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| format!("system: `{}` is not of the form key=expression", part))?;
        let key = key.trim();
        let k = names
            .iter()
            .position(|n| *n == key)
            .ok_or_else(|| format!("system: unknown key `{}` (expected a, b, c, d, f, g)", key))?;
        if values[k].replace(value.trim().to_string()).is_some() {
            return Err(format!("system: `{}` given twice", key));
        }
    }
    let defaults = [None, None, Some("0"), Some("f(v)"), Some("0"), Some("g(u)")];
    let mut out: [String; 6] = Default::default();
    for k in 0..6 {
        out[k] = match (&values[k], defaults[k]) {
            (Some(v), _) => v.clone(),
            (None, Some(d)) => d.to_string(),
            (None, None) => return Err(format!("system: `{}` is required", names[k])),
        };
    }
    Ok(out)
}

pub fn parse_system(text: &str) -> Result<PdeSystem, String> {
    let parts = components(text)?;
    let names = ["a", "b", "c", "f", "d", "g"];
    let mut exprs = Vec::with_capacity(6);
    for (name, part) in names.iter().zip(&parts) {
        exprs.push(parse_expr(part, &format!("system {}", name))?);
    }
    let [a, b, c, f, d, g]: [Expr; 6] = exprs.try_into().expect("six components");
    PdeSystem::with_table(
        a,
        b,
        c,
        f,
        d,
        g,
        conslaw::expr::FunctionTable::with_builtins(),
        max_jet_order()?,
    )
    .map_err(|e| format!("system: {}", e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commas_inside_calls_stay() {
        let c = components("a=1, b=1, f=A[1,0](t,x)*v, g=exp(u)-1").unwrap();
        assert_eq!(c[3], "A[1,0](t,x)*v");
        assert_eq!(c[2], "0");
        assert_eq!(c[5], "exp(u)-1");
    }

    #[test]
    fn defaults_and_errors() {
        let c = components("a=2,b=1").unwrap();
        assert_eq!(c, ["2", "1", "0", "f(v)", "0", "g(u)"].map(String::from));
        assert!(components("b=1").is_err());
        assert!(components("a=1,b=1,h=0").is_err());
        assert!(components("a=1,a=2,b=1").is_err());
        assert!(components("a=1,b").is_err());
    }

    #[test]
    fn builds_system() {
        let sys = parse_system("a=1,b=1,c=0,d=0,f=exp(v)-1,g=exp(u)-1").unwrap();
        assert_eq!(sys.f.to_string(), "-1 + exp(v)");
        assert!(parse_system("a=1,b=1,c=w").is_err());
        assert!(parse_system("a=1,b=1,c=v").is_err());
    }
}
