//! n-cycle noncontextuality inequalities and their quantum bounds.
//!
//! For a dichotomic n-cycle, `Σ γ_i <M_i M_{i+1}> <= n - 2` for every sign
//! vector with an odd number of `-1`; together these are the nontrivial
//! facets of the noncontextual polytope.

use std::f64::consts::PI;

use num_traits::{One, Signed};
use serde::Serialize;

use crate::behavior::Behavior;
use crate::error::{Error, Result};
use crate::paradox::CycleView;
use crate::rational::{self, int, Rational};

/// Tolerance used when comparing a value with the quantum bound.
pub const QUANTUM_BOUND_TOL: f64 = 1e-12;

fn cycle_of(b: &Behavior) -> Result<CycleView> {
    let s = b.scenario();
    let view = CycleView::of_cycle_scenario(s)?;
    if !s.is_dichotomic() {
        return Err(Error::NotCycle("correlators need two outcomes per measurement".into()));
    }
    Ok(view)
}

fn correlator_on(b: &Behavior, view: &CycleView, i: usize) -> Rational {
    // Both orientations give the same diagonal.
    let c = view.contexts[i];
    let same = b.prob(c, &[0, 0]) + b.prob(c, &[1, 1]);
    int(2) * same - Rational::one()
}

/// `<M_i M_{i+1}> = 2 (p_i(0,0) + p_i(1,1)) - 1`, `i` a view index.
pub fn correlator(b: &Behavior, i: usize) -> Result<Rational> {
    let view = cycle_of(b)?;
    if i >= view.len() {
        return Err(Error::InvalidParameter(format!("context {i} out of range")));
    }
    Ok(correlator_on(b, &view, i))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NcycleInequality {
    pub signs: Vec<i8>,
}

impl NcycleInequality {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.len() < 3 || signs.iter().any(|&g| g != 1 && g != -1) {
            return Err(Error::InvalidParameter("signs must be +-1, at least three".into()));
        }
        if signs.iter().filter(|&&g| g == -1).count() % 2 == 0 {
            return Err(Error::InvalidParameter("the number of -1 signs must be odd".into()));
        }
        Ok(NcycleInequality { signs })
    }

    pub fn bound(&self) -> Rational {
        int(self.signs.len() as i64 - 2)
    }

    pub fn value(&self, b: &Behavior) -> Result<Rational> {
        let view = cycle_of(b)?;
        if view.len() != self.signs.len() {
            return Err(Error::InvalidParameter(format!(
                "{} signs for a {}-cycle",
                self.signs.len(),
                view.len()
            )));
        }
        Ok(self
            .signs
            .iter()
            .enumerate()
            .map(|(i, &g)| int(g as i64) * correlator_on(b, &view, i))
            .sum())
    }
}

/// Maximum quantum value of the n-cycle expression.
pub fn tsirelson_bound(n: usize) -> f64 {
    let nf = n as f64;
    let c = (PI / nf).cos();
    if n % 2 == 1 {
        (3.0 * nf * c - nf) / (1.0 + c)
    } else {
        nf * c
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationReport {
    pub n: usize,
    #[serde(serialize_with = "ser_rationals")]
    pub correlators: Vec<Rational>,
    #[serde(serialize_with = "ser_rational")]
    pub max_value: Rational,
    pub max_value_f64: f64,
    pub signs: Vec<i8>,
    pub classical_bound: i64,
    pub quantum_bound: f64,
    pub violates_classical: bool,
    pub violates_quantum: bool,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational::format(r))
}

fn ser_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(rational::format))
}

/// Maximum over all odd sign vectors, by the parity argument: take each
/// sign from its correlator and, if that leaves an even number of `-1`,
/// flip the sign at the smallest `|E_i|` (first such index).
fn best_signs(e: &[Rational]) -> Vec<i8> {
    let mut signs: Vec<i8> = e.iter().map(|x| if x.is_negative() { -1 } else { 1 }).collect();
    if signs.iter().filter(|&&g| g == -1).count() % 2 == 0 {
        let k = (0..e.len()).min_by(|&a, &b| e[a].abs().cmp(&e[b].abs())).unwrap();
        signs[k] = -signs[k];
    }
    signs
}

pub fn evaluate_all(b: &Behavior) -> Result<ViolationReport> {
    let view = cycle_of(b)?;
    b.require_nondisturbing()?;
    let n = view.len();
    let correlators: Vec<Rational> = (0..n).map(|i| correlator_on(b, &view, i)).collect();
    let signs = best_signs(&correlators);
    let max_value: Rational = signs
        .iter()
        .zip(&correlators)
        .map(|(&g, e)| int(g as i64) * e)
        .sum();
    let max_value_f64 = rational::to_f64(&max_value);
    let quantum_bound = tsirelson_bound(n);
    Ok(ViolationReport {
        n,
        violates_classical: max_value > int(n as i64 - 2),
        violates_quantum: max_value_f64 > quantum_bound + QUANTUM_BOUND_TOL,
        correlators,
        max_value,
        max_value_f64,
        signs,
        classical_bound: n as i64 - 2,
        quantum_bound,
    })
}

/// The same maximum by enumerating all `2^(n-1)` odd sign vectors.
pub fn brute_force_max(b: &Behavior) -> Result<Rational> {
    let view = cycle_of(b)?;
    let n = view.len();
    if n > 24 {
        return Err(Error::InvalidParameter(format!("brute force limited to n <= 24, got {n}")));
    }
    let e: Vec<Rational> = (0..n).map(|i| correlator_on(b, &view, i)).collect();
    let mut best: Option<Rational> = None;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() % 2 == 0 {
            continue;
        }
        let v: Rational = e
            .iter()
            .enumerate()
            .map(|(i, x)| if mask >> i & 1 == 1 { -x.clone() } else { x.clone() })
            .sum();
        if best.as_ref().is_none_or(|b| v > *b) {
            best = Some(v);
        }
    }
    Ok(best.unwrap())
}
