//! Compatibility scenarios and the graph algorithms run on them.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};

/// A compatibility scenario: measurements, an outcome list per measurement and
/// a family of contexts (maximal jointly measurable subsets).
///
/// Contexts keep the measurement order given at construction; joint outcomes
/// of a context are tuples in that order and are indexed in mixed radix with
/// the first measurement most significant, so index order is lexicographic
/// tuple order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    measurements: Vec<String>,
    outcomes: Vec<Vec<String>>,
    contexts: Vec<Vec<usize>>,
    index: HashMap<String, usize>,
}

impl Scenario {
    /// Builds and validates a scenario. Contexts are given by measurement
    /// label.
    pub fn new<S: AsRef<str>>(
        measurements: Vec<String>,
        outcomes: Vec<Vec<String>>,
        contexts: &[Vec<S>],
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        if measurements.is_empty() {
            return bad("no measurements".into());
        }
        if outcomes.len() != measurements.len() {
            return bad(format!(
                "{} outcome lists for {} measurements",
                outcomes.len(),
                measurements.len()
            ));
        }
        let mut index = HashMap::with_capacity(measurements.len());
        for (i, m) in measurements.iter().enumerate() {
            if m.is_empty() {
                return bad(format!("measurement {i} has an empty label"));
            }
            if index.insert(m.clone(), i).is_some() {
                return bad(format!("duplicate measurement `{m}`"));
            }
        }
        for (m, outs) in measurements.iter().zip(&outcomes) {
            if outs.len() < 2 {
                return bad(format!("measurement `{m}` has fewer than 2 outcomes"));
            }
            let distinct: BTreeSet<&String> = outs.iter().collect();
            if distinct.len() != outs.len() {
                return bad(format!("measurement `{m}` has repeated outcome labels"));
            }
            if let Some(o) = outs.iter().find(|o| o.is_empty() || o.contains(',')) {
                return bad(format!(
                    "measurement `{m}`: outcome label `{o}` is empty or contains ','"
                ));
            }
        }
        let mut ctx_idx = Vec::with_capacity(contexts.len());
        for (c, ctx) in contexts.iter().enumerate() {
            if ctx.is_empty() {
                return bad(format!("context {c} is empty"));
            }
            let mut members = Vec::with_capacity(ctx.len());
            for name in ctx {
                let name = name.as_ref();
                let Some(&m) = index.get(name) else {
                    return bad(format!("context {c} names unknown measurement `{name}`"));
                };
                if members.contains(&m) {
                    return bad(format!("context {c} repeats measurement `{name}`"));
                }
                members.push(m);
            }
            ctx_idx.push(members);
        }
        let covered: BTreeSet<usize> = ctx_idx.iter().flatten().copied().collect();
        if let Some(m) = (0..measurements.len()).find(|m| !covered.contains(m)) {
            return bad(format!(
                "measurement `{}` belongs to no context (union of contexts must be X)",
                measurements[m]
            ));
        }
        let sets: Vec<BTreeSet<usize>> = ctx_idx
            .iter()
            .map(|c| c.iter().copied().collect())
            .collect();
        for (i, a) in sets.iter().enumerate() {
            for (j, b) in sets.iter().enumerate() {
                if i != j && a.is_subset(b) {
                    return bad(format!(
                        "context {i} is contained in context {j} (contexts must form an antichain)"
                    ));
                }
            }
        }
        Ok(Scenario {
            measurements,
            outcomes,
            contexts: ctx_idx,
            index,
        })
    }

    /// Measurements `M1..Mn`, `l` outcomes `0..l-1` each, contexts
    /// `{M_i, M_{i+1}}` cyclically.
    pub fn n_cycle(n: usize, l: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!("n-cycle needs n >= 3, got {n}")));
        }
        if l < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 outcomes, got {l}")));
        }
        let names: Vec<String> = (1..=n).map(|i| format!("M{i}")).collect();
        let contexts: Vec<Vec<String>> = (0..n)
            .map(|i| vec![names[i].clone(), names[(i + 1) % n].clone()])
            .collect();
        Self::new(names, vec![numeric_outcomes(l); n], &contexts)
    }

    /// Bipartite Bell scenario with `k` settings per party and `l` outcomes:
    /// measurements `A1..Ak, B1..Bk`, contexts `{A_i, B_j}` in row-major order.
    pub fn bipartite_bell(k: usize, l: usize) -> Result<Self> {
        if k < 2 || l < 2 {
            return Err(Error::InvalidParameter(format!(
                "Bell scenario needs k >= 2 and l >= 2, got k={k}, l={l}"
            )));
        }
        let mut names: Vec<String> = (1..=k).map(|i| format!("A{i}")).collect();
        names.extend((1..=k).map(|j| format!("B{j}")));
        let mut contexts = Vec::with_capacity(k * k);
        for i in 1..=k {
            for j in 1..=k {
                contexts.push(vec![format!("A{i}"), format!("B{j}")]);
            }
        }
        Self::new(names, vec![numeric_outcomes(l); 2 * k], &contexts)
    }

    /// A simple scenario from an edge list over `M1..Mn` with `l` outcomes
    /// each. Isolated measurements are not allowed.
    pub fn from_edges(n: usize, l: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let names: Vec<String> = (1..=n).map(|i| format!("M{i}")).collect();
        let contexts: Vec<Vec<String>> = edges
            .iter()
            .map(|&(a, b)| vec![names[a].clone(), names[b].clone()])
            .collect();
        Self::new(names, vec![numeric_outcomes(l); n], &contexts)
    }

    pub fn measurements(&self) -> &[String] {
        &self.measurements
    }

    pub fn measurement_count(&self) -> usize {
        self.measurements.len()
    }

    pub fn name(&self, m: usize) -> &str {
        &self.measurements[m]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn outcomes(&self, m: usize) -> &[String] {
        &self.outcomes[m]
    }

    pub fn outcome_count(&self, m: usize) -> usize {
        self.outcomes[m].len()
    }

    pub fn outcome_index(&self, m: usize, label: &str) -> Option<usize> {
        self.outcomes[m].iter().position(|o| o == label)
    }

    pub fn contexts(&self) -> &[Vec<usize>] {
        &self.contexts
    }

    pub fn context(&self, c: usize) -> &[usize] {
        &self.contexts[c]
    }

    pub fn context_count(&self) -> usize {
        self.contexts.len()
    }

    /// Index of the context whose measurement set equals `members`.
    pub fn find_context(&self, members: &[usize]) -> Option<usize> {
        let want: BTreeSet<usize> = members.iter().copied().collect();
        self.contexts
            .iter()
            .position(|c| c.len() == want.len() && c.iter().all(|m| want.contains(m)))
    }

    /// Number of joint outcomes of context `c`.
    pub fn joint_count(&self, c: usize) -> usize {
        self.contexts[c]
            .iter()
            .map(|&m| self.outcomes[m].len())
            .product()
    }

    pub fn encode(&self, c: usize, outcome: &[usize]) -> usize {
        debug_assert_eq!(outcome.len(), self.contexts[c].len());
        self.contexts[c]
            .iter()
            .zip(outcome)
            .fold(0, |acc, (&m, &o)| acc * self.outcomes[m].len() + o)
    }

    pub fn decode(&self, c: usize, mut index: usize) -> Vec<usize> {
        let ctx = &self.contexts[c];
        let mut out = vec![0; ctx.len()];
        for (slot, &m) in out.iter_mut().zip(ctx).rev() {
            let l = self.outcomes[m].len();
            *slot = index % l;
            index /= l;
        }
        out
    }

    /// Outcome labels of a joint outcome of context `c`.
    pub fn labels(&self, c: usize, outcome: &[usize]) -> Vec<String> {
        self.contexts[c]
            .iter()
            .zip(outcome)
            .map(|(&m, &o)| self.outcomes[m][o].clone())
            .collect()
    }

    /// `|O|^|X|` as an exact count (saturating).
    pub fn assignment_count(&self) -> u128 {
        self.outcomes
            .iter()
            .try_fold(1u128, |acc, o| acc.checked_mul(o.len() as u128))
            .unwrap_or(u128::MAX)
    }

    /// Every context has at most two measurements.
    pub fn is_simple(&self) -> bool {
        self.contexts.iter().all(|c| c.len() <= 2)
    }

    pub fn is_dichotomic(&self) -> bool {
        self.outcomes.iter().all(|o| o.len() == 2)
    }

    pub fn require_simple(&self) -> Result<()> {
        match self.contexts.iter().enumerate().find(|(_, c)| c.len() > 2) {
            Some((context, c)) => Err(Error::NonSimpleScenario {
                context,
                size: c.len(),
            }),
            None => Ok(()),
        }
    }

    pub fn require_dichotomic(&self) -> Result<()> {
        match (0..self.measurement_count()).find(|&m| self.outcome_count(m) != 2) {
            Some(m) => Err(Error::NonDichotomic(self.measurements[m].clone())),
            None => Ok(()),
        }
    }

    /// Adjacency lists of the compatibility graph (simple scenarios).
    pub fn adjacency(&self) -> Vec<BTreeSet<usize>> {
        let mut adj = vec![BTreeSet::new(); self.measurement_count()];
        for c in &self.contexts {
            if let [a, b] = c[..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        adj
    }

    /// All induced (chordless) cycles of the compatibility graph.
    ///
    /// Each cycle starts at its smallest measurement index and is oriented
    /// so that its second element is smaller than its last; the list is
    /// sorted.
    pub fn chordless_cycles(&self) -> Result<CycleDecomposition> {
        self.require_simple()?;
        let adj = self.adjacency();
        let mut found = BTreeSet::new();
        let mut path = Vec::new();
        for start in 0..self.measurement_count() {
            path.clear();
            path.push(start);
            extend_chordless(&adj, &mut path, &mut found);
        }
        let cycles: Vec<Vec<usize>> = found.into_iter().collect();
        Ok(CycleDecomposition {
            is_acyclic: cycles.is_empty(),
            cycles,
        })
    }
}

fn extend_chordless(adj: &[BTreeSet<usize>], path: &mut Vec<usize>, found: &mut BTreeSet<Vec<usize>>) {
    let start = path[0];
    let last = *path.last().unwrap();
    for &w in &adj[last] {
        if w <= start || path.contains(&w) {
            continue;
        }
        // w may only touch the path at its last vertex (and at the start,
        // which closes the cycle).
        if path.len() > 2 && path[1..path.len() - 1].iter().any(|v| adj[w].contains(v)) {
            continue;
        }
        if path.len() > 1 && adj[w].contains(&start) {
            if path[1] < w {
                let mut cycle = path.clone();
                cycle.push(w);
                found.insert(cycle);
            }
            continue;
        }
        path.push(w);
        extend_chordless(adj, path, found);
        path.pop();
    }
}

/// Outcome labels `"0".."l-1"`.
pub fn numeric_outcomes(l: usize) -> Vec<String> {
    (0..l).map(|o| o.to_string()).collect()
}

/// Induced cycles of a simple scenario's compatibility graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleDecomposition {
    pub cycles: Vec<Vec<usize>>,
    pub is_acyclic: bool,
}

impl CycleDecomposition {
    pub fn named(&self, s: &Scenario) -> Vec<Vec<String>> {
        self.cycles
            .iter()
            .map(|c| c.iter().map(|&m| s.name(m).to_string()).collect())
            .collect()
    }
}
