//! The three canonical possibility tables of the CHSH scenario.
//!
//! Measurements are `A1, B1, A2, B2` and contexts, in order,
//! `{A1,B1}, {B1,A2}, {A2,B2}, {B2,A1}`, i.e. the 4-cycle with
//! `M1=A1, M2=B1, M3=A2, M4=B2`.

use std::sync::Arc;

use crate::behavior::{Behavior, PossibilisticBehavior};
use crate::classical::{self, DEFAULT_ENUMERATION_CAP};
use crate::rational::{int, ratio};
use crate::scenario::{numeric_outcomes, Scenario};

pub const NAMES: [&str; 3] = ["bell", "hardy", "pr-box"];

pub fn chsh_cycle() -> Arc<Scenario> {
    let names: Vec<String> = ["A1", "B1", "A2", "B2"].iter().map(|s| s.to_string()).collect();
    let contexts = [["A1", "B1"], ["B1", "A2"], ["A2", "B2"], ["B2", "A1"]].map(|c| c.to_vec());
    Arc::new(Scenario::new(names, vec![numeric_outcomes(2); 4], &contexts).unwrap())
}

fn from_impossible(impossible: [&[[usize; 2]]; 4]) -> PossibilisticBehavior {
    PossibilisticBehavior::from_fn(chsh_cycle(), |c, o| {
        !impossible[c].iter().any(|x| x[..] == *o)
    })
    .unwrap()
}

/// Bell's model: `{A1,B1}` perfectly correlated, everything else possible.
pub fn bell_model() -> PossibilisticBehavior {
    from_impossible([&[[1, 0], [0, 1]], &[], &[], &[]])
}

/// Hardy's model: one zero in each of the last three contexts.
pub fn hardy_model() -> PossibilisticBehavior {
    from_impossible([&[], &[[1, 0]], &[[1, 1]], &[[0, 1]]])
}

/// PR box: three correlated contexts and one anticorrelated.
pub fn pr_box() -> PossibilisticBehavior {
    let corr: &[[usize; 2]] = &[[1, 0], [0, 1]];
    from_impossible([corr, corr, corr, &[[0, 0], [1, 1]]])
}

pub fn by_name(name: &str) -> Option<PossibilisticBehavior> {
    match name {
        "bell" => Some(bell_model()),
        "hardy" => Some(hardy_model()),
        "pr-box" | "pr" => Some(pr_box()),
        _ => None,
    }
}

/// A nondisturbing behavior with exact weights whose collapse is the named
/// table. Bell's model and the PR box take uniform weights on their
/// possible entries. Uniform weights on Hardy's table disturb, so Hardy's
/// model is half a PR-type box (correlated except on `{A2,B2}`) and half
/// the uniform mixture of its five global assignments.
pub fn completion(name: &str) -> Option<Behavior> {
    match name {
        "hardy" => {
            let s = chsh_cycle();
            let anti = [false, false, true, false];
            let pr = Behavior::from_fn(s.clone(), |c, o| {
                if (o[0] != o[1]) == anti[c] {
                    ratio(1, 2)
                } else {
                    int(0)
                }
            })
            .expect("PR-type box");
            let support = classical::support(&hardy_model(), DEFAULT_ENUMERATION_CAP).expect("16 assignments");
            let w = ratio(1, support.len() as i64);
            let nc = Behavior::from_fn(s.clone(), |c, o| {
                support.iter().filter(|g| g.restrict(&s, c) == o).map(|_| w.clone()).sum()
            })
            .expect("mixture of assignments");
            Some(Behavior::mixture(&[(ratio(1, 2), &pr), (ratio(1, 2), &nc)]).expect("weights sum to one"))
        }
        _ => by_name(name).map(|pb| pb.uniform_completion()),
    }
}
