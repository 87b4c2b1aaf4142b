//! Maximisation of the paradox probability `γ_n`.
//!
//! Even n: one parameter, the Schmidt angle; the closed form is scanned on
//! a grid and refined by golden-section search. Odd n: multi-start
//! Nelder–Mead over `[φ, θ_5, ..., θ_n]` with seeded starting points. Both
//! are best-effort; the result is the best value found.

use std::f64::consts::{FRAC_PI_4, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{even, odd};
use crate::error::{Error, Result};

/// `(5√5 - 11)/2`, the largest Hardy probability in the CHSH scenario.
pub fn hardy_tsirelson_bound() -> f64 {
    (5.0 * 5f64.sqrt() - 11.0) / 2.0
}

/// Is `value` within the n = 4 Hardy bound (plus 1e-9)?
pub fn check_hardy_tsirelson(n: usize, value: f64) -> Result<bool> {
    if n != 4 {
        return Err(Error::InvalidParameter(format!("the bound is known for n = 4 only, got {n}")));
    }
    Ok(value <= hardy_tsirelson_bound() + 1e-9)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaConfig {
    pub restarts: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for GammaConfig {
    fn default() -> Self {
        GammaConfig {
            restarts: 64,
            tol: 1e-10,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestartTrace {
    pub restart: usize,
    pub start: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaResult {
    pub n: usize,
    pub gamma: f64,
    /// `[α]` for even n, `[φ, θ_5, ..., θ_n]` for odd n.
    pub params: Vec<f64>,
    pub trace: Vec<RestartTrace>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Minimises `f` from `x0` with initial simplex edge `step`. Stops when the
/// spread of simplex values and its diameter both fall below `tol`, or
/// after `max_evals` evaluations. Returns `(x, f(x), evaluations)`.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    step: f64,
    tol: f64,
    max_evals: usize,
) -> (Vec<f64>, f64, usize) {
    let d = x0.len();
    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        f(x)
    };
    let mut simplex: Vec<Vec<f64>> = (0..=d)
        .map(|k| {
            let mut x = x0.to_vec();
            if k > 0 {
                x[k - 1] += step;
            }
            x
        })
        .collect();
    let mut values: Vec<f64> = simplex.iter().map(|x| eval(x, &mut evals)).collect();
    let lerp = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect() };
    while evals < max_evals {
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        let spread = values[d] - values[0];
        let diameter = simplex[1..]
            .iter()
            .map(|x| x.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if (spread <= tol && diameter <= tol) || diameter < 1e-15 {
            break;
        }
        let centroid: Vec<f64> = (0..d).map(|j| simplex[..d].iter().map(|x| x[j]).sum::<f64>() / d as f64).collect();
        let reflected = lerp(&centroid, &simplex[d], -1.0);
        let fr = eval(&reflected, &mut evals);
        if fr < values[0] {
            let expanded = lerp(&centroid, &simplex[d], -2.0);
            let fe = eval(&expanded, &mut evals);
            if fe < fr {
                simplex[d] = expanded;
                values[d] = fe;
            } else {
                simplex[d] = reflected;
                values[d] = fr;
            }
        } else if fr < values[d - 1] {
            simplex[d] = reflected;
            values[d] = fr;
        } else {
            let (target, ft) = if fr < values[d] { (reflected, fr) } else { (simplex[d].clone(), values[d]) };
            let contracted = lerp(&centroid, &target, 0.5);
            let fc = eval(&contracted, &mut evals);
            if fc < ft {
                simplex[d] = contracted;
                values[d] = fc;
            } else {
                for k in 1..=d {
                    simplex[k] = lerp(&simplex[0], &simplex[k], 0.5);
                    values[k] = eval(&simplex[k], &mut evals);
                }
            }
        }
    }
    let best = (0..=d).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    (simplex[best].clone(), values[best], evals)
}

/// Maximises a unimodal `f` on `[lo, hi]`; returns `(x, f(x))`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - r * (hi - lo);
    let mut b = lo + r * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + r * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - r * (hi - lo);
            fa = f(a);
        }
    }
    let x = (lo + hi) / 2.0;
    (x, f(x))
}

fn optimize_even(n: usize, config: &GammaConfig) -> GammaResult {
    let grid = 2000;
    let h = FRAC_PI_4 / grid as f64;
    let k = (1..grid)
        .max_by(|&a, &b| even::closed_form(n, a as f64 * h).total_cmp(&even::closed_form(n, b as f64 * h)))
        .unwrap();
    let mut evaluations = grid;
    let (alpha, gamma) = golden_section(
        |a| {
            evaluations += 1;
            even::closed_form(n, a)
        },
        (k as f64 - 1.0) * h,
        (k as f64 + 1.0) * h,
        config.tol,
    );
    GammaResult {
        n,
        gamma,
        params: vec![alpha],
        trace: vec![RestartTrace {
            restart: 0,
            start: vec![k as f64 * h],
            value: gamma,
            evaluations,
        }],
        note: None,
    }
}

fn optimize_odd(n: usize, config: &GammaConfig) -> GammaResult {
    let dim = (n - 1) / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut trace = Vec::with_capacity(config.restarts);
    let objective = |x: &[f64]| -odd::witness_probability(n, x);
    for restart in 0..config.restarts.max(1) {
        let mut start = vec![rng.gen_range(0.0..PI)];
        start.extend((1..dim).map(|_| rng.gen_range(-PI..PI)));
        let max_evals = 4000 * dim;
        let (x, _, e1) = nelder_mead(objective, &start, 0.4, config.tol, max_evals);
        // A second pass from the converged point guards against a
        // collapsed simplex.
        let (x, fx, e2) = nelder_mead(objective, &x, 0.05, config.tol, max_evals);
        let value = -fx;
        trace.push(RestartTrace {
            restart,
            start,
            value,
            evaluations: e1 + e2,
        });
        if best.as_ref().is_none_or(|(v, _)| value > *v) {
            best = Some((value, x));
        }
    }
    let (gamma, params) = best.unwrap();
    let note = (n == 9).then(|| {
        format!(
            "best value {gamma:.6}; the earlier analytic claim (1 + 16/sqrt(27))^-1 = {:.6} is reported for comparison",
            1.0 / (1.0 + 16.0 / 27f64.sqrt())
        )
    });
    GammaResult {
        n,
        gamma,
        params,
        trace,
        note,
    }
}

pub fn optimize_gamma(n: usize, config: &GammaConfig) -> Result<GammaResult> {
    if n < 4 {
        return Err(Error::InvalidParameter(format!("γ_n is defined for n >= 4, got {n}")));
    }
    Ok(if n.is_multiple_of(2) {
        optimize_even(n, config)
    } else {
        optimize_odd(n, config)
    })
}

/// The five-cycle paradox probability `p_1(0,1)` with `α` the η–v_3 angle
/// and `β = θ_5`:
/// `[sin α cos α sin 2β]^2 / ([cos α sin 2β]^2 + (2 sin α)^2)`.
/// (Written with `sin 2α` in the numerator this needs an extra factor 1/4;
/// without it the maximum would be 4/9.)
pub fn five_cycle_closed_form(alpha: f64, beta: f64) -> f64 {
    let num = (alpha.sin() * alpha.cos() * (2.0 * beta).sin()).powi(2);
    let den = (alpha.cos() * (2.0 * beta).sin()).powi(2) + (2.0 * alpha.sin()).powi(2);
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Maximum of [`five_cycle_closed_form`] over `[0, π)^2` (grid, then
/// Nelder–Mead).
pub fn five_cycle_closed_form_max() -> f64 {
    let grid = 200;
    let h = PI / grid as f64;
    let mut start = (0.0, 0.0, f64::MIN);
    for i in 0..grid {
        for j in 0..grid {
            let v = five_cycle_closed_form(i as f64 * h, j as f64 * h);
            if v > start.2 {
                start = (i as f64 * h, j as f64 * h, v);
            }
        }
    }
    let (_, fx, _) = nelder_mead(|x| -five_cycle_closed_form(x[0], x[1]), &[start.0, start.1], h, 1e-12, 20_000);
    -fx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nelder_mead_finds_the_rosenbrock_minimum() {
        let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let (x, fx, _) = nelder_mead(rosen, &[-1.2, 1.0], 0.5, 1e-10, 100_000);
        assert!(fx < 1e-14, "{fx}");
        assert!((x[0] - 1.0).abs() < 1e-6 && (x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn golden_section_on_a_parabola() {
        let (x, fx) = golden_section(|x| -(x - 0.3).powi(2), 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-9);
        assert!(fx.abs() < 1e-17);
    }

    #[test]
    fn hardy_bound_checks() {
        assert!(check_hardy_tsirelson(4, 0.0).unwrap());
        assert!(!check_hardy_tsirelson(4, 0.1).unwrap());
        assert!(check_hardy_tsirelson(5, 0.0).is_err());
        let g4 = optimize_gamma(4, &GammaConfig::default()).unwrap();
        assert!(check_hardy_tsirelson(4, g4.gamma).unwrap());
        assert!((g4.gamma - hardy_tsirelson_bound()).abs() < 1e-9);
    }

    #[test]
    fn five_cycle_closed_form_maximum_is_one_ninth() {
        assert!((five_cycle_closed_form_max() - 1.0 / 9.0).abs() < 1e-10);
    }

    #[test]
    fn five_cycle_closed_form_is_the_construction() {
        for (phi, theta) in [(0.3, 0.4), (0.9, 2.1), (1.3, -0.7), (2.0, 1.0)] {
            let w = odd::witness_probability(5, &[phi, theta]);
            assert!((w - five_cycle_closed_form(phi, theta)).abs() < 1e-12, "{w}");
        }
    }

    #[test]
    fn gamma_five_matches_the_closed_form() {
        let r = optimize_gamma(5, &GammaConfig { restarts: 16, ..Default::default() }).unwrap();
        assert!((r.gamma - five_cycle_closed_form_max()).abs() < 1e-9, "{}", r.gamma);
        let c = odd::build_odd_cycle(&odd::OddCycleParams::from_free(5, &r.params).unwrap()).unwrap();
        assert!((c.witness_probability - r.gamma).abs() < 1e-12);
    }

    #[test]
    fn seeded_runs_are_deterministic() {
        let cfg = GammaConfig { restarts: 4, tol: 1e-8, seed: 3 };
        assert_eq!(optimize_gamma(7, &cfg).unwrap(), optimize_gamma(7, &cfg).unwrap());
    }
}
