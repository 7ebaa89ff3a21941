//! Text fixtures for inequality systems.
//!
//! ```text
//! # comment
//! params nc=2 ns=1 nr=3 nf=0
//! vars Rc1 Rc2 R1d R2d
//! Rc1 + 2*Rc2 + R1d + R2d <= n_c
//! Rc1 <= n_r - n_c
//! R1 = Rc1 + Rc2 + R1d
//! R2 = Rc1 + Rc2 + R2d
//! ```
//!
//! Right-hand sides are integer combinations of `n_c`, `n_s`, `n_r`, `n_f`
//! and constants. The `vars` line is optional; without it variables are
//! declared in order of first appearance.

use std::collections::BTreeMap;

use super::{IneqSystem, LinearIneq, RateDef};
use crate::error::{Error, Result};
use crate::gf2signal::ChannelParams;
use crate::rate_region::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixture {
    pub params: ChannelParams,
    pub system: IneqSystem,
    pub r1: RateDef,
    pub r2: RateDef,
}

/// Parses `text`. Parameters on a `params` line fill in whatever `overrides`
/// leaves as `None`; missing parameters default to 0.
pub fn parse_fixture(text: &str, overrides: [Option<usize>; 4]) -> Result<Fixture> {
    let mut params = [None; 4];
    let mut declared: Option<Vec<String>> = None;
    let mut seen: Vec<String> = Vec::new();
    let mut raw_ineqs: Vec<(usize, Vec<(String, i64)>, Vec<(Term, i64)>)> = Vec::new();
    let mut defs: [Option<RateDef>; 2] = [None, None];

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("params ") {
            for kv in rest.split_whitespace() {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| err(format!("expected name=value, got {kv:?}")))?;
                let slot = param_index(k).ok_or_else(|| err(format!("unknown parameter {k:?}")))?;
                params[slot] = Some(
                    v.parse::<usize>()
                        .map_err(|_| err(format!("bad value for {k}: {v:?}")))?,
                );
            }
        } else if let Some(rest) = line.strip_prefix("vars ") {
            declared = Some(rest.split_whitespace().map(str::to_string).collect());
        } else if let Some((lhs, rhs)) = line.split_once("<=") {
            let lhs = parse_sum(lhs).map_err(err)?;
            let mut vars = Vec::new();
            for (term, c) in lhs {
                match term {
                    Term::Var(v) => {
                        if !seen.contains(&v) {
                            seen.push(v.clone());
                        }
                        vars.push((v, c));
                    }
                    Term::Const | Term::Param(_) => {
                        return Err(err("left-hand side must only contain variables".into()))
                    }
                }
            }
            let rhs = parse_sum(rhs).map_err(err)?;
            if rhs.iter().any(|(t, _)| matches!(t, Term::Var(_))) {
                return Err(err("right-hand side must only contain parameters and constants".into()));
            }
            raw_ineqs.push((line_no, vars, rhs));
        } else if let Some((lhs, rhs)) = line.split_once('=') {
            let slot = match lhs.trim() {
                "R1" => 0,
                "R2" => 1,
                other => return Err(err(format!("unknown definition target {other:?}"))),
            };
            let mut def = RateDef::new();
            for (term, c) in parse_sum(rhs).map_err(err)? {
                match term {
                    Term::Var(v) => {
                        if c < 0 {
                            return Err(err(format!("negative coefficient on {v}")));
                        }
                        if !seen.contains(&v) {
                            seen.push(v.clone());
                        }
                        *def.entry(v).or_insert(0) += c;
                    }
                    Term::Const if c == 0 => {}
                    _ => return Err(err("rate definitions may only contain variables".into())),
                }
            }
            defs[slot] = Some(def);
        } else {
            return Err(err(format!("unrecognised line {line:?}")));
        }
    }

    let mut values = [0usize; 4];
    for i in 0..4 {
        values[i] = overrides[i].or(params[i]).unwrap_or(0);
    }
    let params = ChannelParams::new(values[0], values[1], values[2], values[3]);
    let vars = declared.unwrap_or(seen);
    let mut system = IneqSystem::new(&vars)?;
    for (line, lhs, rhs) in raw_ineqs {
        let bound: i64 = rhs
            .iter()
            .map(|(t, c)| {
                c * match t {
                    Term::Const => 1,
                    Term::Param(i) => values[*i] as i64,
                    Term::Var(_) => unreachable!(),
                }
            })
            .sum();
        let terms = lhs
            .into_iter()
            .map(|(v, c)| (v, Rational::from(c)))
            .collect();
        system
            .push(LinearIneq::new(terms, bound.into()))
            .map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
    }
    let [r1, r2] = defs;
    let missing = |n: &str| Error::Parse {
        line: 0,
        message: format!("missing definition of {n}"),
    };
    Ok(Fixture {
        params,
        system,
        r1: r1.ok_or_else(|| missing("R1"))?,
        r2: r2.ok_or_else(|| missing("R2"))?,
    })
}

fn param_index(name: &str) -> Option<usize> {
    match name {
        "nc" | "n_c" => Some(0),
        "ns" | "n_s" => Some(1),
        "nr" | "n_r" => Some(2),
        "nf" | "n_f" => Some(3),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Term {
    Var(String),
    Param(usize),
    Const,
}

/// Parses `a*x + b - y - 3` into signed terms; constants fold into `Term::Const`.
fn parse_sum(s: &str) -> std::result::Result<Vec<(Term, i64)>, String> {
    let mut out: BTreeMap<usize, (Term, i64)> = BTreeMap::new();
    let mut order = 0;
    let s = s.replace('-', "+-");
    for piece in s.split('+') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        let (neg, body) = match piece.strip_prefix('-') {
            Some(rest) => (true, rest.trim()),
            None => (false, piece),
        };
        let (coeff, name) = match body.split_once('*') {
            Some((c, n)) => (
                c.trim()
                    .parse::<i64>()
                    .map_err(|_| format!("bad coefficient {c:?}"))?,
                n.trim(),
            ),
            None => match body.parse::<i64>() {
                Ok(k) => (k, ""),
                Err(_) => (1, body),
            },
        };
        let coeff = if neg { -coeff } else { coeff };
        let term = if name.is_empty() {
            Term::Const
        } else if let Some(i) = param_index(name) {
            Term::Param(i)
        } else if name.chars().all(|c| c.is_alphanumeric() || c == '_')
            && name.chars().next().is_some_and(char::is_alphabetic)
        {
            Term::Var(name.to_string())
        } else {
            return Err(format!("bad term {piece:?}"));
        };
        out.insert(order, (term, coeff));
        order += 1;
    }
    if out.is_empty() {
        return Err("empty expression".into());
    }
    Ok(out.into_values().collect())
}
