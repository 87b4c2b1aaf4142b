//! Two-qubit construction for even n.
//!
//! State `cos α |00> + sin α |11>`, vectors
//! `p_k = q_k ∝ ((-1)^k cos^{k-1/2} α, i sin^{k-1/2} α)`. Measurements
//! alternate between Alice (`P ⊗ I`) and Bob (`I ⊗ Q`) around the cycle:
//! `M_{n/2+1} = p_1`, `M_{n/2+2} = q_1`, then one index up per step in both
//! directions (`M_{n/2+3} = p_2, q_3, ...` forward to `M_1`, and
//! `M_{n/2} = q_2, p_3, ...` backward to `M_2`).
//!
//! Outcome 1 is the rank-2 projector onto the complement of `p_k` (resp.
//! `q_k`). In that convention the behavior has `p_j(1,0) = 0` for
//! `2 <= j <= n/2`, `p_{n/2+1}(1,1) = 0`, `p_j(0,1) = 0` for `j > n/2+1`,
//! and `p_1(1,1)` is given by the closed form [`closed_form`].

use std::f64::consts::FRAC_PI_4;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{rank_one, FloatBehavior, QuantumModel, SnapOptions, C64, ZERO_TOL};
use crate::behavior::Behavior;
use crate::error::{Error, Result};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvenCycleParams {
    pub n: usize,
    pub alpha: f64,
}

impl EvenCycleParams {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if n < 4 || n % 2 == 1 {
            return Err(Error::InvalidParameter(format!("even construction needs even n >= 4, got {n}")));
        }
        if !(alpha > 0.0 && alpha < FRAC_PI_4) {
            return Err(Error::DegenerateParams(format!(
                "α = {alpha} must lie strictly between 0 and π/4"
            )));
        }
        Ok(EvenCycleParams { n, alpha })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Party {
    Alice,
    Bob,
}

/// Party and vector index of `M_1, ..., M_n`.
pub fn layout(n: usize) -> Vec<(Party, usize)> {
    let flip = |(p, k): (Party, usize)| (if p == Party::Alice { Party::Bob } else { Party::Alice }, k + 1);
    let h = n / 2;
    let mut out = vec![(Party::Alice, 0); n];
    out[h] = (Party::Alice, 1);
    out[h + 1] = (Party::Bob, 1);
    let mut cur = (Party::Bob, 1);
    for pos in h + 2..=n {
        cur = flip(cur);
        out[pos % n] = cur;
    }
    let mut cur = (Party::Alice, 1);
    for pos in (1..h).rev() {
        cur = flip(cur);
        out[pos] = cur;
    }
    out
}

/// `p_1(1,1)` in closed form.
pub fn closed_form(n: usize, alpha: f64) -> f64 {
    let (s, c) = alpha.sin_cos();
    let k = (n - 1) as i32;
    let num = c * s.powi(k) - s * c.powi(k);
    (num / (c.powi(k) + s.powi(k))).powi(2)
}

/// The zero pattern as `(context, outcome)` with 0-based contexts.
pub fn zero_pattern(n: usize) -> Vec<(usize, [usize; 2])> {
    let h = n / 2;
    (1..n)
        .map(|c| {
            let o = if c < h {
                [1, 0]
            } else if c == h {
                [1, 1]
            } else {
                [0, 1]
            };
            (c, o)
        })
        .collect()
}

fn local_vector(k: usize, alpha: f64) -> DVector<C64> {
    let (s, c) = alpha.sin_cos();
    let e = k as f64 - 0.5;
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let v = DVector::from_vec(vec![C64::new(sign * c.powf(e), 0.0), C64::new(0.0, s.powf(e))]);
    let norm = v.norm();
    v / C64::new(norm, 0.0)
}

fn complement(v: &DVector<C64>) -> DVector<C64> {
    DVector::from_vec(vec![-v[1].conj(), v[0].conj()])
}

#[derive(Debug, Clone)]
pub struct EvenCycleConstruction {
    pub params: EvenCycleParams,
    pub scenario: Arc<Scenario>,
    pub model: QuantumModel,
    pub probabilities: FloatBehavior,
    pub behavior: Behavior,
    /// `p_1(1,1)` from the trace formula.
    pub witness_probability: f64,
}

pub fn build_even_cycle(params: &EvenCycleParams) -> Result<EvenCycleConstruction> {
    build_even_cycle_with(params, SnapOptions::default())
}

pub fn build_even_cycle_with(params: &EvenCycleParams, opts: SnapOptions) -> Result<EvenCycleConstruction> {
    let EvenCycleParams { n, alpha } = EvenCycleParams::new(params.n, params.alpha)?;
    let (s, c) = alpha.sin_cos();
    let state = DVector::from_vec(vec![
        C64::new(c, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(s, 0.0),
    ]);
    let id2 = DMatrix::<C64>::identity(2, 2);
    let id4 = DMatrix::<C64>::identity(4, 4);
    let projectors = layout(n)
        .into_iter()
        .map(|(party, k)| {
            let local = rank_one(&complement(&local_vector(k, alpha)));
            let fire = match party {
                Party::Alice => local.kronecker(&id2),
                Party::Bob => id2.kronecker(&local),
            };
            vec![&id4 - &fire, fire]
        })
        .collect();
    let model = QuantumModel::new(state, projectors)?;
    let scenario = Arc::new(Scenario::n_cycle(n, 2)?);
    let probabilities = model.probabilities(&scenario)?;
    for (ctx, o) in zero_pattern(n) {
        let p = probabilities.prob(&scenario, ctx, &o);
        if p.abs() > ZERO_TOL {
            return Err(Error::InvalidModel(format!("p{}({},{}) = {p}, expected 0", ctx + 1, o[0], o[1])));
        }
    }
    let witness_probability = probabilities.prob(&scenario, 0, &[1, 1]);
    let expected = closed_form(n, alpha);
    if (witness_probability - expected).abs() > 1e-10 {
        return Err(Error::InvalidModel(format!(
            "p1(1,1) = {witness_probability} disagrees with the closed form {expected}"
        )));
    }
    let behavior = super::to_rational(scenario.clone(), &probabilities, opts)?;
    Ok(EvenCycleConstruction {
        params: EvenCycleParams { n, alpha },
        scenario,
        model,
        probabilities,
        behavior,
        witness_probability,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn layouts() {
        use Party::*;
        assert_eq!(layout(4), vec![(Alice, 2), (Bob, 2), (Alice, 1), (Bob, 1)]);
        assert_eq!(
            layout(6),
            vec![(Bob, 3), (Alice, 3), (Bob, 2), (Alice, 1), (Bob, 1), (Alice, 2)]
        );
        // Neighbours are always on different parties.
        for n in (4..=12).step_by(2) {
            let l = layout(n);
            for i in 0..n {
                assert_ne!(l[i].0, l[(i + 1) % n].0);
            }
        }
    }

    #[test]
    fn hardy_point_matches_the_closed_form() {
        let c = build_even_cycle(&EvenCycleParams::new(4, PI / 8.0).unwrap()).unwrap();
        assert!((c.witness_probability - closed_form(4, PI / 8.0)).abs() < 1e-10);
        assert!((c.witness_probability - 0.087_610_065_69).abs() < 1e-10);
        assert!(c.behavior.is_nondisturbing());
    }

    #[test]
    fn closed_form_vanishes_at_the_endpoints() {
        for n in [4, 6, 8] {
            assert!(closed_form(n, 1e-9) < 1e-15);
            assert!(closed_form(n, FRAC_PI_4) < 1e-30);
        }
        assert!(EvenCycleParams::new(4, 0.0).is_err());
        assert!(EvenCycleParams::new(4, FRAC_PI_4).is_err());
        assert!(EvenCycleParams::new(5, 0.3).is_err());
    }

    #[test]
    fn every_even_n_constructs() {
        for n in (4..=12).step_by(2) {
            for alpha in [0.1, 0.3, 0.5, 0.7] {
                let c = build_even_cycle(&EvenCycleParams::new(n, alpha).unwrap()).unwrap();
                assert!(c.behavior.is_nondisturbing());
            }
        }
    }
}
