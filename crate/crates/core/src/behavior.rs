//! Probability and possibility tables, marginals, nondisturbance and the
//! possibilistic collapse.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::scenario::Scenario;

/// One exact probability table per context.
#[derive(Debug, Clone, PartialEq)]
pub struct Behavior {
    scenario: Arc<Scenario>,
    tables: Vec<Vec<Rational>>,
}

/// One Boolean possibility table per context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PossibilisticBehavior {
    scenario: Arc<Scenario>,
    tables: Vec<Vec<bool>>,
}

/// First disagreement between two overlapping contexts' marginals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Disturbance {
    pub contexts: (usize, usize),
    /// Shared measurements, ascending.
    pub overlap: Vec<usize>,
    /// Outcome on `overlap` where the marginals differ.
    pub outcome: Vec<usize>,
}

fn check_shape<T>(scenario: &Scenario, tables: &[Vec<T>]) -> Result<()> {
    if tables.len() != scenario.context_count() {
        return Err(Error::InvalidBehavior(format!(
            "{} tables for {} contexts",
            tables.len(),
            scenario.context_count()
        )));
    }
    for (c, t) in tables.iter().enumerate() {
        if t.len() != scenario.joint_count(c) {
            return Err(Error::InvalidBehavior(format!(
                "context {c}: {} entries, expected {}",
                t.len(),
                scenario.joint_count(c)
            )));
        }
    }
    Ok(())
}

/// Positions (within context `c`) of the measurements in `subset`, or
/// `None` if some measurement is not in the context.
fn positions(scenario: &Scenario, c: usize, subset: &[usize]) -> Option<Vec<usize>> {
    let ctx = scenario.context(c);
    subset
        .iter()
        .map(|m| ctx.iter().position(|x| x == m))
        .collect()
}

fn overlap(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut o: Vec<usize> = a.iter().copied().filter(|m| b.contains(m)).collect();
    o.sort_unstable();
    o
}

/// Generic marginalisation: folds every table entry into its restriction.
fn marginalize<T: Clone, F: Fn(&mut T, &T)>(
    scenario: &Scenario,
    c: usize,
    table: &[T],
    subset: &[usize],
    zero: T,
    add: F,
) -> Result<BTreeMap<Vec<usize>, T>> {
    let pos = positions(scenario, c, subset).ok_or(Error::SubsetNotInContext(c))?;
    let mut out = BTreeMap::new();
    // Seed every outcome on the subset so the map is total.
    let dims: Vec<usize> = subset.iter().map(|&m| scenario.outcome_count(m)).collect();
    for key in tuples(&dims) {
        out.insert(key, zero.clone());
    }
    for (i, v) in table.iter().enumerate() {
        let s = scenario.decode(c, i);
        let key: Vec<usize> = pos.iter().map(|&p| s[p]).collect();
        add(out.get_mut(&key).unwrap(), v);
    }
    Ok(out)
}

/// All tuples in `[0, dims[0]) x ... x [0, dims[k-1])`, lexicographically.
pub fn tuples(dims: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = dims.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut cur = vec![0; dims.len()];
    for _ in 0..total {
        out.push(cur.clone());
        for k in (0..dims.len()).rev() {
            cur[k] += 1;
            if cur[k] < dims[k] {
                break;
            }
            cur[k] = 0;
        }
    }
    out
}

impl Behavior {
    /// Validates shape, nonnegativity and exact normalisation of every table.
    pub fn new(scenario: Arc<Scenario>, tables: Vec<Vec<Rational>>) -> Result<Self> {
        check_shape(&scenario, &tables)?;
        for (c, t) in tables.iter().enumerate() {
            if let Some(p) = t.iter().find(|p| p.is_negative()) {
                return Err(Error::InvalidBehavior(format!(
                    "context {c}: negative probability {}",
                    rational::format(p)
                )));
            }
            let sum: Rational = t.iter().sum();
            if !sum.is_one() {
                return Err(Error::InvalidBehavior(format!(
                    "context {c}: probabilities sum to {}, not 1",
                    rational::format(&sum)
                )));
            }
        }
        Ok(Behavior { scenario, tables })
    }

    /// Builds tables from `f(context, joint outcome)`.
    pub fn from_fn(
        scenario: Arc<Scenario>,
        mut f: impl FnMut(usize, &[usize]) -> Rational,
    ) -> Result<Self> {
        let tables = (0..scenario.context_count())
            .map(|c| {
                (0..scenario.joint_count(c))
                    .map(|i| f(c, &scenario.decode(c, i)))
                    .collect()
            })
            .collect();
        Self::new(scenario, tables)
    }

    /// Every table uniform.
    pub fn uniform(scenario: Arc<Scenario>) -> Self {
        let tables = (0..scenario.context_count())
            .map(|c| {
                let k = scenario.joint_count(c);
                vec![rational::ratio(1, k as i64); k]
            })
            .collect();
        Behavior { scenario, tables }
    }

    /// Convex combination `Σ w_i b_i`; weights must be nonnegative, sum to
    /// one, and all parts share the scenario.
    pub fn mixture(parts: &[(Rational, &Behavior)]) -> Result<Self> {
        let Some((_, first)) = parts.first() else {
            return Err(Error::InvalidBehavior("empty mixture".into()));
        };
        let scenario = first.scenario.clone();
        if parts.iter().any(|(_, b)| *b.scenario != *scenario) {
            return Err(Error::InvalidBehavior("mixture parts use different scenarios".into()));
        }
        let mut tables: Vec<Vec<Rational>> = first
            .tables
            .iter()
            .map(|t| vec![Rational::zero(); t.len()])
            .collect();
        for (w, b) in parts {
            for (acc, t) in tables.iter_mut().zip(&b.tables) {
                for (a, p) in acc.iter_mut().zip(t) {
                    *a += w * p;
                }
            }
        }
        Self::new(scenario, tables)
    }

    pub fn scenario(&self) -> &Arc<Scenario> {
        &self.scenario
    }

    pub fn tables(&self) -> &[Vec<Rational>] {
        &self.tables
    }

    pub fn table(&self, c: usize) -> &[Rational] {
        &self.tables[c]
    }

    pub fn prob(&self, c: usize, outcome: &[usize]) -> &Rational {
        &self.tables[c][self.scenario.encode(c, outcome)]
    }

    /// Marginal of context `c` on `subset` (measurement indices, any order);
    /// keys are outcome tuples in the order of `subset`.
    pub fn marginal(&self, c: usize, subset: &[usize]) -> Result<BTreeMap<Vec<usize>, Rational>> {
        marginalize(&self.scenario, c, &self.tables[c], subset, Rational::zero(), |a, p| {
            *a += p
        })
    }

    /// First pair of overlapping contexts whose marginals disagree exactly.
    pub fn nondisturbance_violation(&self) -> Option<Disturbance> {
        let s = &self.scenario;
        for a in 0..s.context_count() {
            for b in a + 1..s.context_count() {
                let shared = overlap(s.context(a), s.context(b));
                if shared.is_empty() {
                    continue;
                }
                let ma = self.marginal(a, &shared).unwrap();
                let mb = self.marginal(b, &shared).unwrap();
                if let Some((u, _)) = ma.iter().find(|(u, p)| mb[*u] != **p) {
                    return Some(Disturbance {
                        contexts: (a, b),
                        overlap: shared,
                        outcome: u.clone(),
                    });
                }
            }
        }
        None
    }

    pub fn is_nondisturbing(&self) -> bool {
        self.nondisturbance_violation().is_none()
    }

    pub fn require_nondisturbing(&self) -> Result<()> {
        match self.nondisturbance_violation() {
            Some(d) => Err(Error::NotNondisturbing(d.contexts.0, d.contexts.1)),
            None => Ok(()),
        }
    }

    /// Entrywise `p > 0`.
    pub fn collapse(&self) -> PossibilisticBehavior {
        PossibilisticBehavior {
            scenario: self.scenario.clone(),
            tables: self
                .tables
                .iter()
                .map(|t| t.iter().map(|p| p.is_positive()).collect())
                .collect(),
        }
    }
}

impl PossibilisticBehavior {
    /// Validates shape and that every table has a possible entry.
    pub fn new(scenario: Arc<Scenario>, tables: Vec<Vec<bool>>) -> Result<Self> {
        check_shape(&scenario, &tables)?;
        if let Some(c) = tables.iter().position(|t| !t.iter().any(|&x| x)) {
            return Err(Error::InvalidBehavior(format!(
                "context {c}: no joint outcome is possible"
            )));
        }
        Ok(PossibilisticBehavior { scenario, tables })
    }

    pub fn from_fn(
        scenario: Arc<Scenario>,
        mut f: impl FnMut(usize, &[usize]) -> bool,
    ) -> Result<Self> {
        let tables = (0..scenario.context_count())
            .map(|c| {
                (0..scenario.joint_count(c))
                    .map(|i| f(c, &scenario.decode(c, i)))
                    .collect()
            })
            .collect();
        Self::new(scenario, tables)
    }

    /// Every joint outcome possible.
    pub fn full(scenario: Arc<Scenario>) -> Self {
        let tables = (0..scenario.context_count())
            .map(|c| vec![true; scenario.joint_count(c)])
            .collect();
        PossibilisticBehavior { scenario, tables }
    }

    pub fn scenario(&self) -> &Arc<Scenario> {
        &self.scenario
    }

    pub fn tables(&self) -> &[Vec<bool>] {
        &self.tables
    }

    pub fn table(&self, c: usize) -> &[bool] {
        &self.tables[c]
    }

    pub fn is_possible(&self, c: usize, outcome: &[usize]) -> bool {
        self.tables[c][self.scenario.encode(c, outcome)]
    }

    /// Joint outcomes of context `c` that are possible, lexicographically.
    pub fn possible_outcomes(&self, c: usize) -> Vec<Vec<usize>> {
        self.tables[c]
            .iter()
            .enumerate()
            .filter(|(_, &p)| p)
            .map(|(i, _)| self.scenario.decode(c, i))
            .collect()
    }

    /// Boolean marginal (OR over extensions).
    pub fn marginal(&self, c: usize, subset: &[usize]) -> Result<BTreeMap<Vec<usize>, bool>> {
        marginalize(&self.scenario, c, &self.tables[c], subset, false, |a, p| *a |= *p)
    }

    pub fn nondisturbance_violation(&self) -> Option<Disturbance> {
        let s = &self.scenario;
        for a in 0..s.context_count() {
            for b in a + 1..s.context_count() {
                let shared = overlap(s.context(a), s.context(b));
                if shared.is_empty() {
                    continue;
                }
                let ma = self.marginal(a, &shared).unwrap();
                let mb = self.marginal(b, &shared).unwrap();
                if let Some((u, _)) = ma.iter().find(|(u, p)| mb[*u] != **p) {
                    return Some(Disturbance {
                        contexts: (a, b),
                        overlap: shared,
                        outcome: u.clone(),
                    });
                }
            }
        }
        None
    }

    pub fn is_nondisturbing(&self) -> bool {
        self.nondisturbance_violation().is_none()
    }

    pub fn require_nondisturbing(&self) -> Result<()> {
        match self.nondisturbance_violation() {
            Some(d) => Err(Error::NotPossibilisticallyNd(d.contexts.0, d.contexts.1)),
            None => Ok(()),
        }
    }

    /// Uniform weights on the possible entries of each table.
    ///
    /// The result is a valid behavior but need not be nondisturbing even when
    /// `self` is possibilistically nondisturbing.
    pub fn uniform_completion(&self) -> Behavior {
        let tables = self
            .tables
            .iter()
            .map(|t| {
                let k = t.iter().filter(|&&p| p).count() as i64;
                t.iter()
                    .map(|&p| if p { rational::ratio(1, k) } else { Rational::zero() })
                    .collect()
            })
            .collect();
        Behavior {
            scenario: self.scenario.clone(),
            tables,
        }
    }

    /// Entrywise OR with another possibilistic behavior on the same scenario.
    pub fn union(&self, other: &PossibilisticBehavior) -> PossibilisticBehavior {
        assert_eq!(*self.scenario, *other.scenario, "union across scenarios");
        PossibilisticBehavior {
            scenario: self.scenario.clone(),
            tables: self
                .tables
                .iter()
                .zip(&other.tables)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| *x || *y).collect())
                .collect(),
        }
    }

    /// The same tables, reinterpreted on a scenario with identical shape
    /// (used to view a possibility table under relabelled measurements).
    pub fn with_scenario(&self, scenario: Arc<Scenario>) -> Result<Self> {
        Self::new(scenario, self.tables.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::ratio;

    fn pr_box() -> Behavior {
        fixtures::pr_box().uniform_completion()
    }

    #[test]
    fn pr_box_marginal_is_uniform() {
        let b = pr_box();
        let a1 = b.scenario().index_of("A1").unwrap();
        let m = b.marginal(0, &[a1]).unwrap();
        assert_eq!(m[&vec![0]], ratio(1, 2));
        assert_eq!(m[&vec![1]], ratio(1, 2));
    }

    #[test]
    fn full_subset_marginal_is_the_table() {
        let b = pr_box();
        let ctx = b.scenario().context(2).to_vec();
        let m = b.marginal(2, &ctx).unwrap();
        for (i, p) in b.table(2).iter().enumerate() {
            assert_eq!(&m[&b.scenario().decode(2, i)], p);
        }
    }

    #[test]
    fn deterministic_marginal_is_point_mass() {
        let s = Arc::new(Scenario::n_cycle(3, 2).unwrap());
        let b = Behavior::from_fn(s.clone(), |c, o| {
            let target: &[usize] = if c == 0 { &[0, 1] } else if c == 1 { &[1, 0] } else { &[0, 0] };
            if o == target { ratio(1, 1) } else { ratio(0, 1) }
        })
        .unwrap();
        let m = b.marginal(0, &[1]).unwrap();
        assert_eq!(m[&vec![1]], ratio(1, 1));
        assert_eq!(m[&vec![0]], ratio(0, 1));
        assert_eq!(b.marginal(0, &[2]), Err(Error::SubsetNotInContext(0)));
    }

    #[test]
    fn nondisturbance_examples() {
        let uni = Behavior::uniform(Arc::new(Scenario::n_cycle(4, 2).unwrap()));
        assert!(uni.is_nondisturbing());
        assert!(pr_box().is_nondisturbing());

        // Point mass on (0,0) in the first PR-box context.
        let b = pr_box();
        let mut tables = b.tables().to_vec();
        tables[0] = vec![ratio(1, 1), ratio(0, 1), ratio(0, 1), ratio(0, 1)];
        let broken = Behavior::new(b.scenario().clone(), tables).unwrap();
        let d = broken.nondisturbance_violation().unwrap();
        assert_eq!(d.contexts.0, 0);
        assert!(d.contexts.1 == 1 || d.contexts.1 == 3);
    }

    #[test]
    fn normalisation_is_exact() {
        let s = Arc::new(Scenario::n_cycle(3, 2).unwrap());
        let mut t = vec![vec![ratio(1, 4); 4]; 3];
        t[1][0] = ratio(1, 4) + ratio(1, 1_000_000);
        assert!(Behavior::new(s.clone(), t).is_err());
        let mut t = vec![vec![ratio(1, 4); 4]; 3];
        t[2] = vec![ratio(1, 2), ratio(1, 2), ratio(1, 2), ratio(-1, 2)];
        assert!(Behavior::new(s, t).is_err());
    }

    #[test]
    fn collapse_of_uniform_pr_box_is_table_3() {
        assert_eq!(pr_box().collapse(), fixtures::pr_box());
    }

    #[test]
    fn possibilistic_nd_examples() {
        assert!(fixtures::bell_model().is_nondisturbing());
        assert!(fixtures::pr_box().is_nondisturbing());
        assert!(fixtures::hardy_model().is_nondisturbing());

        let s = Arc::new(Scenario::from_edges(3, 2, &[(0, 1), (1, 2)]).unwrap());
        let pb = PossibilisticBehavior::from_fn(s, |c, o| match c {
            0 => o == [0, 0],
            _ => o == [1, 0],
        })
        .unwrap();
        let d = pb.nondisturbance_violation().unwrap();
        assert_eq!(d.overlap, vec![1]);
    }

    #[test]
    fn empty_possibility_table_is_rejected() {
        let s = Arc::new(Scenario::n_cycle(3, 2).unwrap());
        assert!(PossibilisticBehavior::from_fn(s, |c, _| c != 1).is_err());
    }
}
