//! Pure-state projective quantum models and their behaviors, plus the
//! qutrit (odd n) and two-qubit (even n) constructions of Hardy-type
//! paradoxes on the n-cycle.
//!
//! Probabilities are computed in floating point as
//! `p_C(s) = <η| Π_{m∈C} P_{m;s(m)} |η>` and converted to exact rationals:
//! values within [`ZERO_TOL`] of zero become exact zeros, the rest are
//! snapped by continued fractions. For dichotomic two-measurement contexts
//! the conversion goes through the snapped single-measurement marginals, so
//! the result is exactly nondisturbing.

pub mod even;
pub mod odd;
pub mod optimize;

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::behavior::Behavior;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::scenario::Scenario;

pub use even::{build_even_cycle, EvenCycleConstruction, EvenCycleParams};
pub use odd::{build_odd_cycle, OddCycleConstruction, OddCycleParams};
pub use optimize::{check_hardy_tsirelson, optimize_gamma, GammaConfig, GammaResult};

pub type C64 = Complex64;

/// Entries with `|p| <= ZERO_TOL` are exact zeros.
pub const ZERO_TOL: f64 = 1e-10;
/// Tolerance of the model invariants (Frobenius norm).
pub const INVARIANT_TOL: f64 = 1e-10;
/// Default denominator cap of the rational snap.
pub const DEFAULT_MAX_DENOMINATOR: u64 = 1_000_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapOptions {
    pub zero_tol: f64,
    pub max_denominator: u64,
}

impl Default for SnapOptions {
    fn default() -> Self {
        SnapOptions {
            zero_tol: ZERO_TOL,
            max_denominator: DEFAULT_MAX_DENOMINATOR,
        }
    }
}

/// A pure state and, per measurement, one projector per outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumModel {
    state: DVector<C64>,
    projectors: Vec<Vec<DMatrix<C64>>>,
}

fn frobenius(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

impl QuantumModel {
    /// Checks that the state is a unit vector and that every measurement is
    /// a family of Hermitian idempotents summing to the identity.
    pub fn new(state: DVector<C64>, projectors: Vec<Vec<DMatrix<C64>>>) -> Result<Self> {
        let d = state.len();
        let bad = |why: String| Err(Error::InvalidModel(why));
        if (state.norm() - 1.0).abs() > INVARIANT_TOL {
            return bad(format!("state has norm {}", state.norm()));
        }
        let id = DMatrix::<C64>::identity(d, d);
        for (m, family) in projectors.iter().enumerate() {
            let mut sum = DMatrix::<C64>::zeros(d, d);
            for (o, p) in family.iter().enumerate() {
                if p.nrows() != d || p.ncols() != d {
                    return bad(format!("measurement {m}, outcome {o}: projector is not {d}x{d}"));
                }
                if frobenius(&(p - p.adjoint())) > INVARIANT_TOL {
                    return bad(format!("measurement {m}, outcome {o}: projector is not Hermitian"));
                }
                if frobenius(&(p * p - p)) > INVARIANT_TOL {
                    return bad(format!("measurement {m}, outcome {o}: projector is not idempotent"));
                }
                sum += p;
            }
            if frobenius(&(sum - &id)) > INVARIANT_TOL {
                return bad(format!("measurement {m}: projectors do not sum to the identity"));
            }
        }
        Ok(QuantumModel { state, projectors })
    }

    pub fn dimension(&self) -> usize {
        self.state.len()
    }

    pub fn state(&self) -> &DVector<C64> {
        &self.state
    }

    pub fn projector(&self, m: usize, o: usize) -> &DMatrix<C64> {
        &self.projectors[m][o]
    }

    /// One family per scenario measurement, matching outcome counts, and
    /// commuting projectors within every context.
    pub fn check_scenario(&self, s: &Scenario) -> Result<()> {
        if self.projectors.len() != s.measurement_count() {
            return Err(Error::InvalidModel(format!(
                "{} measurements in the model, {} in the scenario",
                self.projectors.len(),
                s.measurement_count()
            )));
        }
        for m in 0..s.measurement_count() {
            if self.projectors[m].len() != s.outcome_count(m) {
                return Err(Error::InvalidModel(format!(
                    "measurement {}: {} projectors for {} outcomes",
                    s.name(m),
                    self.projectors[m].len(),
                    s.outcome_count(m)
                )));
            }
        }
        for ctx in s.contexts() {
            for (k, &x) in ctx.iter().enumerate() {
                for &y in &ctx[k + 1..] {
                    for p in &self.projectors[x] {
                        for q in &self.projectors[y] {
                            if frobenius(&(p * q - q * p)) > INVARIANT_TOL {
                                return Err(Error::InvalidModel(format!(
                                    "{} and {} share a context but do not commute",
                                    s.name(x),
                                    s.name(y)
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Floating-point tables `<η| Π P |η>`.
    pub fn probabilities(&self, s: &Scenario) -> Result<FloatBehavior> {
        self.check_scenario(s)?;
        let tables = (0..s.context_count())
            .map(|c| {
                (0..s.joint_count(c))
                    .map(|i| {
                        let o = s.decode(c, i);
                        let mut v = self.state.clone();
                        for (&m, &x) in s.context(c).iter().zip(&o).rev() {
                            v = &self.projectors[m][x] * v;
                        }
                        self.state.dotc(&v).re
                    })
                    .collect()
            })
            .collect();
        Ok(FloatBehavior { tables })
    }
}

/// Floating-point probability tables, same layout as [`Behavior`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FloatBehavior {
    pub tables: Vec<Vec<f64>>,
}

impl FloatBehavior {
    pub fn prob(&self, s: &Scenario, c: usize, outcome: &[usize]) -> f64 {
        self.tables[c][s.encode(c, outcome)]
    }
}

/// Eq.-5 behavior of a model with the default snap options.
pub fn behavior_from_model(m: &QuantumModel, s: Arc<Scenario>) -> Result<Behavior> {
    let fb = m.probabilities(&s)?;
    to_rational(s, &fb, SnapOptions::default())
}

fn snap_unit(x: f64, opts: SnapOptions) -> Rational {
    if x.abs() <= opts.zero_tol {
        Rational::zero()
    } else if (1.0 - x).abs() <= opts.zero_tol {
        Rational::one()
    } else {
        rational::snap(x, opts.max_denominator)
    }
}

/// Exact conversion of a float behavior (see the module docs).
pub fn to_rational(s: Arc<Scenario>, fb: &FloatBehavior, opts: SnapOptions) -> Result<Behavior> {
    for (c, t) in fb.tables.iter().enumerate() {
        if let Some(&v) = t.iter().find(|&&v| v < -opts.zero_tol) {
            return Err(Error::NegativeProbability { context: c, value: v });
        }
    }
    let ones = marginals(&s, fb, opts);
    let tables = (0..s.context_count())
        .map(|c| {
            let ctx = s.context(c);
            let pair = ctx.len() == 2 && ctx.iter().all(|&m| s.outcome_count(m) == 2);
            pair.then(|| snap_pair(&fb.tables[c], ones[ctx[0]].clone().unwrap(), ones[ctx[1]].clone().unwrap(), opts))
                .flatten()
                .unwrap_or_else(|| snap_entries(&fb.tables[c], opts))
        })
        .collect();
    Behavior::new(s, tables)
}

fn find(parent: &mut [usize], parity: &mut [bool], m: usize) -> (usize, bool) {
    if parent[m] == m {
        return (m, false);
    }
    let (r, p) = find(parent, parity, parent[m]);
    parent[m] = r;
    parity[m] ^= p;
    (r, parity[m])
}

/// `P(m = 1)` for each dichotomic measurement, snapped so that the zero
/// pattern of every dichotomic pair can be met exactly. Two zeros in a pair
/// tie its marginals (`my = mx`, `my = 1 - mx`, or a fixed 0 or 1); tied
/// measurements share one snapped value.
fn marginals(s: &Scenario, fb: &FloatBehavior, opts: SnapOptions) -> Vec<Option<Rational>> {
    let n = s.measurement_count();
    let mut float: Vec<Option<f64>> = vec![None; n];
    for c in 0..s.context_count() {
        for (k, &m) in s.context(c).iter().enumerate() {
            if float[m].is_none() && s.outcome_count(m) == 2 {
                let p: f64 = (0..s.joint_count(c))
                    .filter(|&i| s.decode(c, i)[k] == 1)
                    .map(|i| fb.tables[c][i])
                    .sum();
                float[m] = Some(p);
            }
        }
    }
    // value(m) = value(root), or 1 - value(root) when parity(m) is set.
    let mut parent: Vec<usize> = (0..n).collect();
    let mut parity = vec![false; n];
    let mut fixed: Vec<Option<bool>> = vec![None; n];
    for c in 0..s.context_count() {
        let ctx = s.context(c);
        if ctx.len() != 2 || ctx.iter().any(|&m| s.outcome_count(m) != 2) {
            continue;
        }
        let z: Vec<bool> = fb.tables[c].iter().map(|v| v.abs() <= opts.zero_tol).collect();
        let (x, y) = (ctx[0], ctx[1]);
        for (m, zeros, v) in [(x, [0, 1], true), (x, [2, 3], false), (y, [0, 2], true), (y, [1, 3], false)] {
            if z[zeros[0]] && z[zeros[1]] {
                let (r, p) = find(&mut parent, &mut parity, m);
                fixed[r] = Some(v ^ p);
            }
        }
        let flip = if z[1] && z[2] {
            false
        } else if z[0] && z[3] {
            true
        } else {
            continue;
        };
        let (rx, px) = find(&mut parent, &mut parity, x);
        let (ry, py) = find(&mut parent, &mut parity, y);
        if rx != ry {
            parent[ry] = rx;
            parity[ry] = px ^ py ^ flip;
            if let Some(v) = fixed[ry] {
                fixed[rx].get_or_insert(v ^ parity[ry]);
            }
        }
    }
    let mut root_value: Vec<Option<Rational>> = vec![None; n];
    (0..n)
        .map(|m| {
            let f = float[m]?;
            let (r, p) = find(&mut parent, &mut parity, m);
            let v = root_value[r]
                .get_or_insert_with(|| match fixed[r] {
                    Some(true) => Rational::one(),
                    Some(false) => Rational::zero(),
                    None => snap_unit(if p { 1.0 - f } else { f }, opts),
                })
                .clone();
            Some(if p { Rational::one() - v } else { v })
        })
        .collect()
}

/// `[p00, p01, p10, p11]` from the marginals `mx = P(x=1)`, `my = P(y=1)`
/// and `p11`, with `p11` chosen to make a near-zero entry exactly zero.
/// `None` when the result does not reproduce the float zero pattern.
fn snap_pair(f: &[f64], mx: Rational, my: Rational, opts: SnapOptions) -> Option<Vec<Rational>> {
    let zero = |i: usize| f[i].abs() <= opts.zero_tol;
    let p11 = if zero(3) {
        Rational::zero()
    } else if zero(2) {
        mx.clone()
    } else if zero(1) {
        my.clone()
    } else if zero(0) {
        &mx + &my - Rational::one()
    } else {
        rational::snap(f[3], opts.max_denominator)
    };
    let p10 = &mx - &p11;
    let p01 = &my - &p11;
    let p00 = Rational::one() - &mx - &my + &p11;
    let t = vec![p00, p01, p10, p11];
    let consistent = t
        .iter()
        .enumerate()
        .all(|(i, p)| if zero(i) { p.is_zero() } else { p.is_positive() });
    consistent.then_some(t)
}

fn snap_entries(f: &[f64], opts: SnapOptions) -> Vec<Rational> {
    let raw: Vec<Rational> = f
        .iter()
        .map(|&x| {
            if x.abs() <= opts.zero_tol {
                Rational::zero()
            } else {
                rational::snap(x, opts.max_denominator)
            }
        })
        .collect();
    let total: Rational = raw.iter().sum();
    raw.into_iter().map(|x| x / &total).collect()
}

/// `|v><v|` for a complex vector.
pub fn rank_one(v: &DVector<C64>) -> DMatrix<C64> {
    v * v.adjoint()
}
