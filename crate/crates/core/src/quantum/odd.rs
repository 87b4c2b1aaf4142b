//! Qutrit construction for odd n.
//!
//! Real unit vectors `v_1..v_n` in R^3 with `v_k ⊥ v_{k+1}` and `v_1 ⊥ v_n`:
//! `v_4` is `η` orthogonalised against `v_3`; for odd `k >= 5`,
//! `v_k = R(θ_k, v_{k-1}) v_{k-2}` and `v_{k+1}` is `η` orthogonalised against
//! `v_k`; `v_1` is `η` orthogonalised against `v_n`; `v_2 = v_1 × v_3`
//! normalised. Measurement `M_i` has outcome 1 on `|v_i><v_i|`. Because `η`
//! lies in the span of `v_k, v_{k+1}` for odd `k >= 3` and of `v_n, v_1`,
//! the resulting behavior has `p_{2j}(1,1) = 0`, `p_{2j+1}(0,0) = 0`,
//! `p_n(0,0) = 0`, and `p_1(0,1) = (v_2·η)^2` is the paradox probability.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Rotation3, Unit, Vector3};
use serde::Serialize;

use super::{rank_one, FloatBehavior, QuantumModel, SnapOptions, C64, ZERO_TOL};
use crate::behavior::Behavior;
use crate::error::{Error, Result};
use crate::scenario::Scenario;

const DEGENERATE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OddCycleParams {
    pub n: usize,
    pub eta: [f64; 3],
    pub v3: [f64; 3],
    /// `θ_5, θ_7, ..., θ_n`.
    pub thetas: Vec<f64>,
}

impl OddCycleParams {
    pub fn new(n: usize, eta: [f64; 3], v3: [f64; 3], thetas: Vec<f64>) -> Result<Self> {
        if n < 5 || n.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("odd construction needs odd n >= 5, got {n}")));
        }
        if thetas.len() != (n - 3) / 2 {
            return Err(Error::InvalidParameter(format!(
                "n = {n} needs {} angles (θ5..θ{n}), got {}",
                (n - 3) / 2,
                thetas.len()
            )));
        }
        for (name, v) in [("eta", eta), ("v3", v3)] {
            if (Vector3::from(v).norm() - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!("{name} is not a unit vector")));
            }
        }
        Ok(OddCycleParams { n, eta, v3, thetas })
    }

    /// `η = (cos φ, sin φ, 0)` and `v_3 = (1, 0, 0)`: `φ` is the η–v_3 angle.
    pub fn from_angles(n: usize, phi: f64, thetas: Vec<f64>) -> Result<Self> {
        Self::new(n, [phi.cos(), phi.sin(), 0.0], [1.0, 0.0, 0.0], thetas)
    }

    /// Free parameters as `[φ, θ_5, ..., θ_n]`, for the optimizer.
    pub fn from_free(n: usize, x: &[f64]) -> Result<Self> {
        Self::from_angles(n, x[0], x[1..].to_vec())
    }

    /// The published five-cycle instance.
    pub fn cabello() -> Self {
        let r = 1.0 / 3f64.sqrt();
        Self::new(5, [r, r, r], [1.0, 0.0, 0.0], vec![PI / 4.0]).unwrap()
    }
}

fn orthogonalise(eta: &Vector3<f64>, v: &Vector3<f64>, what: &str) -> Result<Vector3<f64>> {
    let w = eta - v * v.dot(eta);
    let norm = w.norm();
    if norm < DEGENERATE {
        return Err(Error::DegenerateParams(format!("η is parallel to {what}")));
    }
    Ok(w / norm)
}

/// `v_1, ..., v_n` (index 0 is `v_1`).
pub fn vectors(p: &OddCycleParams) -> Result<Vec<Vector3<f64>>> {
    let n = p.n;
    let eta = Vector3::from(p.eta);
    let mut v = vec![Vector3::zeros(); n + 1];
    v[3] = Vector3::from(p.v3);
    if v[3].dot(&eta).abs() < DEGENERATE {
        return Err(Error::DegenerateParams("<v3|η> = 0".into()));
    }
    v[4] = orthogonalise(&eta, &v[3], "v3")?;
    for (t, k) in (5..=n).step_by(2).enumerate() {
        let theta = p.thetas[t];
        if theta.sin().abs() < 1e-12 {
            return Err(Error::DegenerateParams(format!("θ{k} is a multiple of π")));
        }
        let axis = Unit::new_normalize(v[k - 1]);
        v[k] = Rotation3::from_axis_angle(&axis, theta) * v[k - 2];
        if k < n {
            v[k + 1] = orthogonalise(&eta, &v[k], &format!("v{k}"))?;
        }
    }
    v[1] = orthogonalise(&eta, &v[n], &format!("v{n}"))?;
    let cross = v[1].cross(&v[3]);
    if cross.norm() < DEGENERATE {
        return Err(Error::DegenerateParams("v1 is parallel to v3".into()));
    }
    v[2] = cross.normalize();
    Ok(v.split_off(1))
}

/// `p_1(0,1) = (v_2·η)^2`; zero for degenerate parameters.
pub fn witness_probability(n: usize, free: &[f64]) -> f64 {
    OddCycleParams::from_free(n, free)
        .and_then(|p| vectors(&p).map(|v| v[1].dot(&Vector3::from(p.eta)).powi(2)))
        .unwrap_or(0.0)
}

/// The zero pattern, as `(context, outcome)` with 0-based contexts.
pub fn zero_pattern(n: usize) -> Vec<(usize, [usize; 2])> {
    (1..n).map(|c| (c, if c % 2 == 1 { [1, 1] } else { [0, 0] })).collect()
}

#[derive(Debug, Clone)]
pub struct OddCycleConstruction {
    pub params: OddCycleParams,
    pub vectors: Vec<Vector3<f64>>,
    pub scenario: Arc<Scenario>,
    pub model: QuantumModel,
    pub probabilities: FloatBehavior,
    pub behavior: Behavior,
    /// `p_1(0,1)`.
    pub witness_probability: f64,
}

pub fn build_odd_cycle(params: &OddCycleParams) -> Result<OddCycleConstruction> {
    build_odd_cycle_with(params, SnapOptions::default())
}

pub fn build_odd_cycle_with(params: &OddCycleParams, opts: SnapOptions) -> Result<OddCycleConstruction> {
    let n = params.n;
    let v = vectors(params)?;
    for i in 0..n {
        let d = v[i].dot(&v[(i + 1) % n]);
        if d.abs() > 1e-10 {
            return Err(Error::InvalidModel(format!("<v{}|v{}> = {d}", i + 1, (i + 1) % n + 1)));
        }
    }
    let to_c = |x: &Vector3<f64>| DVector::from_iterator(3, x.iter().map(|&r| C64::new(r, 0.0)));
    let id = DMatrix::<C64>::identity(3, 3);
    let projectors = v
        .iter()
        .map(|x| {
            let p = rank_one(&to_c(x));
            vec![&id - &p, p]
        })
        .collect();
    let model = QuantumModel::new(to_c(&Vector3::from(params.eta)), projectors)?;
    let scenario = Arc::new(Scenario::n_cycle(n, 2)?);
    let probabilities = model.probabilities(&scenario)?;
    for (c, o) in zero_pattern(n) {
        let p = probabilities.prob(&scenario, c, &o);
        if p.abs() > ZERO_TOL {
            return Err(Error::InvalidModel(format!("p{}({},{}) = {p}, expected 0", c + 1, o[0], o[1])));
        }
    }
    let witness_probability = probabilities.prob(&scenario, 0, &[0, 1]);
    let behavior = super::to_rational(scenario.clone(), &probabilities, opts)?;
    Ok(OddCycleConstruction {
        params: params.clone(),
        vectors: v,
        scenario,
        model,
        probabilities,
        behavior,
        witness_probability,
    })
}
