//! Exact Fourier-Motzkin projection of component-rate systems onto `(R1, R2)`.
//!
//! Every variable is implicitly non-negative. Internally each inequality is
//! scaled to a primitive integer row so eliminations never lose precision.

mod lp;
mod parse;

pub use parse::{parse_fixture, Fixture};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rate_region::{canonicalize, Halfspace, RateRegion, Rational};

/// Linear map from component rates to a user rate, e.g. `R1 = Rc + R1d`.
pub type RateDef = BTreeMap<String, i64>;

/// `Σ coeff·var <= bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearIneq {
    pub coefficients: BTreeMap<String, Rational>,
    pub bound: Rational,
}

impl LinearIneq {
    pub fn new<S: Into<String>>(terms: Vec<(S, Rational)>, bound: Rational) -> Self {
        let mut coefficients = BTreeMap::new();
        for (v, c) in terms {
            *coefficients.entry(v.into()).or_insert_with(Rational::zero) += c;
        }
        coefficients.retain(|_, c| !c.is_zero());
        Self {
            coefficients,
            bound,
        }
    }

    /// Integer coefficients and bound.
    pub fn int(terms: &[(&str, i64)], bound: i64) -> Self {
        Self::new(
            terms.iter().map(|&(v, c)| (v, Rational::from(c))).collect(),
            bound.into(),
        )
    }

    pub fn coefficient(&self, var: &str) -> Rational {
        self.coefficients.get(var).copied().unwrap_or_else(Rational::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coefficients.is_empty()
    }

    fn holds_at(&self, assignment: &BTreeMap<&str, i64>) -> bool {
        let lhs: Rational = self
            .coefficients
            .iter()
            .map(|(v, c)| *c * Rational::from(assignment.get(v.as_str()).copied().unwrap_or(0)))
            .sum();
        lhs <= self.bound
    }
}

impl fmt::Display for LinearIneq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficients.is_empty() {
            return write!(f, "0 <= {}", self.bound);
        }
        let mut first = true;
        for (v, c) in &self.coefficients {
            let (sign, mag) = if c.is_negative() { ("-", -*c) } else { ("+", *c) };
            match (first, sign) {
                (true, "-") => f.write_str("-")?,
                (true, _) => {}
                (false, s) => write!(f, " {s} ")?,
            }
            if mag == Rational::from(1) {
                write!(f, "{v}")?;
            } else {
                write!(f, "{mag}*{v}")?;
            }
            first = false;
        }
        write!(f, " <= {}", self.bound)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct IneqSystem {
    vars: Vec<String>,
    inequalities: Vec<LinearIneq>,
}

impl IneqSystem {
    pub fn new<S: AsRef<str>>(vars: &[S]) -> Result<Self> {
        let vars: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
        let unique: BTreeSet<&String> = vars.iter().collect();
        if unique.len() != vars.len() {
            return Err(Error::Parameter(format!("duplicate variable in {vars:?}")));
        }
        Ok(Self {
            vars,
            inequalities: Vec::new(),
        })
    }

    pub fn with(mut self, ineq: LinearIneq) -> Result<Self> {
        self.push(ineq)?;
        Ok(self)
    }

    pub fn push(&mut self, ineq: LinearIneq) -> Result<()> {
        if let Some(v) = ineq.coefficients.keys().find(|v| !self.vars.contains(v)) {
            return Err(Error::Parameter(format!("undeclared variable {v} in {ineq}")));
        }
        self.inequalities.push(ineq);
        Ok(())
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn inequalities(&self) -> &[LinearIneq] {
        &self.inequalities
    }

    /// True iff a constant row reads `0 <= negative`.
    pub fn has_contradiction(&self) -> bool {
        self.inequalities
            .iter()
            .any(|i| i.is_constant() && i.bound.is_negative())
    }

    fn to_rows(&self) -> Vec<Row> {
        self.inequalities
            .iter()
            .map(|i| {
                let coeffs: Vec<Rational> = self.vars.iter().map(|v| i.coefficient(v)).collect();
                Row::from_rational(&coeffs, i.bound)
            })
            .collect()
    }

    fn from_rows(vars: Vec<String>, rows: &[Row]) -> Self {
        let inequalities = rows
            .iter()
            .map(|r| {
                LinearIneq::new(
                    vars.iter()
                        .zip(&r.coeffs)
                        .map(|(v, c)| (v.clone(), Rational::from(*c as i64)))
                        .collect(),
                    Rational::from(r.bound as i64),
                )
            })
            .collect();
        Self { vars, inequalities }
    }
}

impl fmt::Display for IneqSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars {}", self.vars.join(" "))?;
        for i in &self.inequalities {
            writeln!(f, "{i}")?;
        }
        Ok(())
    }
}

/// Primitive integer row `coeffs · x <= bound`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Row {
    coeffs: Vec<i128>,
    bound: i128,
}

impl Row {
    fn from_rational(coeffs: &[Rational], bound: Rational) -> Self {
        let l = coeffs
            .iter()
            .chain(std::iter::once(&bound))
            .fold(1i64, |acc, c| acc.lcm(c.denom()));
        let scale = |c: &Rational| (*c * Rational::from(l)).to_integer() as i128;
        Row {
            coeffs: coeffs.iter().map(scale).collect(),
            bound: scale(&bound),
        }
        .normalized()
    }

    fn normalized(mut self) -> Self {
        let g = self
            .coeffs
            .iter()
            .fold(self.bound.abs(), |acc, c| acc.gcd(c));
        if g > 1 {
            self.coeffs.iter_mut().for_each(|c| *c /= g);
            self.bound /= g;
        }
        self
    }

    /// Implied by non-negativity alone.
    fn is_tautology(&self) -> bool {
        self.bound >= 0 && self.coeffs.iter().all(|c| *c <= 0)
    }

    fn is_contradiction(&self) -> bool {
        self.bound < 0 && self.coeffs.iter().all(|c| *c == 0)
    }

    /// Is `other` implied by `self` for non-negative variables? Checks for a
    /// `λ >= 0` with `other.coeffs <= λ·self.coeffs` and `λ·self.bound <= other.bound`.
    fn dominates(&self, other: &Row) -> bool {
        // λ lives in [lo, hi] with rational endpoints p/q, compared exactly.
        let mut lo = (0i128, 1i128);
        let mut hi: Option<(i128, i128)> = None;
        let raise = |lo: &mut (i128, i128), n: i128, d: i128| {
            if n * lo.1 > lo.0 * d {
                *lo = (n, d);
            }
        };
        let lower = |hi: &mut Option<(i128, i128)>, n: i128, d: i128| match hi {
            Some((hn, hd)) if n * *hd >= *hn * d => {}
            _ => *hi = Some((n, d)),
        };
        for (a, s) in self.coeffs.iter().zip(&other.coeffs) {
            // need s <= λ a
            match a.signum() {
                1 => raise(&mut lo, *s, *a),
                -1 => lower(&mut hi, -*s, -*a),
                _ => {
                    if *s > 0 {
                        return false;
                    }
                }
            }
        }
        // need λ b <= other.bound
        match self.bound.signum() {
            1 => lower(&mut hi, other.bound, self.bound),
            -1 => raise(&mut lo, -other.bound, -self.bound),
            _ => {
                if other.bound < 0 {
                    return false;
                }
            }
        }
        match hi {
            None => true,
            Some((hn, hd)) => lo.0 * hd <= hn * lo.1,
        }
    }
}

/// Drops tautologies, duplicates and rows implied by a single other row.
fn prune(rows: Vec<Row>) -> Vec<Row> {
    let mut rows: Vec<Row> = rows.into_iter().filter(|r| !r.is_tautology()).collect();
    rows.sort();
    rows.dedup();
    if let Some(bad) = rows.iter().find(|r| r.is_contradiction()) {
        return vec![bad.clone()];
    }
    let mut keep = vec![true; rows.len()];
    for i in 0..rows.len() {
        if !keep[i] {
            continue;
        }
        for j in 0..rows.len() {
            if i != j && keep[j] && rows[j].dominates(&rows[i]) {
                keep[i] = false;
                break;
            }
        }
    }
    let rows: Vec<Row> = rows
        .into_iter()
        .zip(keep)
        .filter_map(|(r, k)| k.then_some(r))
        .collect();
    drop_lp_redundant(rows)
}

/// Removes, one at a time, every row whose bound is never reached on the
/// polyhedron of the remaining rows. Skipped when some bound is negative.
fn drop_lp_redundant(mut rows: Vec<Row>) -> Vec<Row> {
    if rows.iter().any(|r| r.bound < 0) {
        return rows;
    }
    let mut i = 0;
    while i < rows.len() {
        let others: Vec<&[i128]> = rows
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, r)| r.coeffs.as_slice())
            .collect();
        let bounds: Vec<i128> = rows
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, r)| r.bound)
            .collect();
        if lp::exceeds(&others, &bounds, &rows[i].coeffs, rows[i].bound) {
            i += 1;
        } else {
            rows.remove(i);
        }
    }
    rows
}

fn eliminate_rows(rows: &[Row], k: usize) -> Vec<Row> {
    let mut out = Vec::new();
    let mut pos = Vec::new();
    // -x_k <= 0 participates as a negative row.
    let mut nonneg = Row {
        coeffs: vec![0; rows.first().map_or(0, |r| r.coeffs.len())],
        bound: 0,
    };
    if !nonneg.coeffs.is_empty() {
        nonneg.coeffs[k] = -1;
    }
    let mut neg = vec![nonneg];
    for r in rows {
        match r.coeffs[k].signum() {
            1 => pos.push(r),
            -1 => neg.push(r.clone()),
            _ => out.push(r.clone()),
        }
    }
    for p in &pos {
        for n in &neg {
            let (a, b) = (-n.coeffs[k], p.coeffs[k]);
            let combined = Row {
                coeffs: p
                    .coeffs
                    .iter()
                    .zip(&n.coeffs)
                    .map(|(x, y)| a * x + b * y)
                    .collect(),
                bound: a * p.bound + b * n.bound,
            };
            out.push(combined.normalized());
        }
    }
    out.iter_mut().for_each(|r| {
        r.coeffs.remove(k);
    });
    prune(out)
}

/// One Fourier-Motzkin step removing `v`.
pub fn eliminate(system: &IneqSystem, v: &str) -> Result<IneqSystem> {
    let k = system
        .vars
        .iter()
        .position(|x| x == v)
        .ok_or_else(|| Error::Parameter(format!("variable {v} is not declared")))?;
    let rows = eliminate_rows(&system.to_rows(), k);
    let mut vars = system.vars.clone();
    vars.remove(k);
    Ok(IneqSystem::from_rows(vars, &rows))
}

fn check_def(system: &IneqSystem, def: &RateDef, name: &str) -> Result<()> {
    for (v, c) in def {
        if !system.vars.contains(v) {
            return Err(Error::Parameter(format!("{name} references undeclared {v}")));
        }
        if *c < 0 {
            return Err(Error::Parameter(format!("{name} has negative coefficient on {v}")));
        }
    }
    Ok(())
}

/// Projects onto `(R1, R2)`, eliminating component variables in declared order.
pub fn project_to_rates(system: &IneqSystem, r1: &RateDef, r2: &RateDef) -> Result<RateRegion> {
    let order: Vec<&str> = system.vars.iter().map(String::as_str).collect();
    project_to_rates_in_order(system, r1, r2, &order)
}

/// As [`project_to_rates`] with an explicit elimination order, which must be
/// a permutation of the system's variables.
pub fn project_to_rates_in_order(
    system: &IneqSystem,
    r1: &RateDef,
    r2: &RateDef,
    order: &[&str],
) -> Result<RateRegion> {
    check_def(system, r1, "R1")?;
    check_def(system, r2, "R2")?;
    let mut sorted_order: Vec<&str> = order.to_vec();
    sorted_order.sort_unstable();
    let mut declared: Vec<&str> = system.vars.iter().map(String::as_str).collect();
    declared.sort_unstable();
    if sorted_order != declared {
        return Err(Error::Parameter(format!(
            "elimination order {order:?} is not a permutation of {:?}",
            system.vars
        )));
    }
    if system.vars.iter().any(|v| v == "R1" || v == "R2") {
        return Err(Error::Parameter("component variables may not be named R1 or R2".into()));
    }
    let n = system.vars.len();
    // Columns: component variables in elimination order, then R1, R2.
    let mut rows: Vec<Row> = Vec::new();
    for ineq in &system.inequalities {
        let mut coeffs: Vec<Rational> = order.iter().map(|v| ineq.coefficient(v)).collect();
        coeffs.extend([Rational::zero(), Rational::zero()]);
        rows.push(Row::from_rational(&coeffs, ineq.bound));
    }
    for (slot, def) in [(n, r1), (n + 1, r2)] {
        let mut up = vec![0i128; n + 2];
        for (i, v) in order.iter().enumerate() {
            up[i] = *def.get(*v).unwrap_or(&0) as i128;
        }
        up[slot] = -1;
        let down: Vec<i128> = up.iter().map(|c| -c).collect();
        rows.push(Row { coeffs: up, bound: 0 }.normalized());
        rows.push(Row { coeffs: down, bound: 0 }.normalized());
    }
    let mut rows = prune(rows);
    for _ in 0..n {
        rows = eliminate_rows(&rows, 0);
    }
    if let Some(bad) = rows.iter().find(|r| r.is_contradiction()) {
        return Err(Error::Infeasible(format!(
            "elimination produced 0 <= {}",
            bad.bound
        )));
    }
    let halfspaces = rows
        .iter()
        .map(|r| {
            Halfspace::int(r.coeffs[0] as i64, r.coeffs[1] as i64, r.bound as i64)
        })
        .collect();
    canonicalize(&RateRegion::new(halfspaces))
}

/// Brute-force oracle: every `(R1, R2)` reached by a non-negative integer
/// assignment with each component in `0..=bound`.
pub fn enumerate_integer_projection(
    system: &IneqSystem,
    r1: &RateDef,
    r2: &RateDef,
    bound: i64,
) -> Result<BTreeSet<(i64, i64)>> {
    check_def(system, r1, "R1")?;
    check_def(system, r2, "R2")?;
    let n = system.vars.len() as u32;
    let combos = ((bound.max(0) + 1) as f64).powi(n as i32);
    if combos > 1e8 {
        return Err(Error::Capacity(format!(
            "{n} variables up to {bound} is {combos:.0} assignments; use a smaller instance"
        )));
    }
    let vars: Vec<&str> = system.vars.iter().map(String::as_str).collect();
    let rows: Vec<(Vec<Rational>, Rational)> = system
        .inequalities
        .iter()
        .map(|i| (vars.iter().map(|v| i.coefficient(v)).collect(), i.bound))
        .collect();
    let mut out = BTreeSet::new();
    let mut values = vec![0i64; vars.len()];
    enumerate_rec(&rows, bound, 0, &mut values, &mut |vals| {
        let assign: BTreeMap<&str, i64> = vars.iter().copied().zip(vals.iter().copied()).collect();
        debug_assert!(system.inequalities.iter().all(|i| i.holds_at(&assign)));
        let eval = |def: &RateDef| def.iter().map(|(v, c)| c * assign[v.as_str()]).sum::<i64>();
        out.insert((eval(r1), eval(r2)));
    });
    Ok(out)
}

fn enumerate_rec(
    rows: &[(Vec<Rational>, Rational)],
    bound: i64,
    depth: usize,
    values: &mut Vec<i64>,
    visit: &mut dyn FnMut(&[i64]),
) {
    // Smallest reachable left-hand side given the fixed prefix.
    let feasible = rows.iter().all(|(coeffs, b)| {
        let mut lhs = Rational::zero();
        for (i, c) in coeffs.iter().enumerate() {
            if i < depth {
                lhs += *c * Rational::from(values[i]);
            } else if c.is_negative() {
                lhs += *c * Rational::from(bound);
            }
        }
        lhs <= *b
    });
    if !feasible {
        return;
    }
    if depth == values.len() {
        visit(values);
        return;
    }
    for x in 0..=bound {
        values[depth] = x;
        enumerate_rec(rows, bound, depth + 1, values, visit);
    }
    values[depth] = 0;
}

/// Largest right-hand side of the system, a safe enumeration bound when
/// every coefficient is a non-negative integer.
pub fn natural_bound(system: &IneqSystem) -> i64 {
    system
        .inequalities
        .iter()
        .map(|i| i.bound.floor().to_integer())
        .max()
        .unwrap_or(0)
        .max(0)
}

pub fn rate_def(terms: &[(&str, i64)]) -> RateDef {
    terms.iter().map(|&(v, c)| (v.to_string(), c)).collect()
}
