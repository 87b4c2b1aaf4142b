//! Possibilistic paradoxes on cycles: detection by reachable-set
//! propagation, certificates, and the strongly contextual (PR-box) form.
//!
//! Along a cycle `M_1, ..., M_n` with contexts `C_i = {M_i, M_{i+1}}`, a
//! possible pair `(a, b)` in `C_i` extends to a global assignment iff `a` can
//! be reached from `b` by walking possible pairs through
//! `C_{i+1}, ..., C_{i+n-1}`. The reachable sets `R_j` and their complements
//! `F_j` are exactly the chain of impossibilities that proves the paradox:
//! every pair in `R_{j-1} x F_j` is impossible in `C_{i+j}` and `a ∈ F_{n-1}`.
//! With two outcomes and a nondisturbing table each `R_j` is a single value
//! `r_j` and the chain is the Hardy-type one with `α_j = ¬r_j`.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use crate::behavior::PossibilisticBehavior;
use crate::error::{Error, Result};
use crate::scenario::Scenario;

/// An n-cycle inside a scenario: measurements in cycle order and, for each
/// consecutive pair, the scenario context that holds it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleView {
    /// Scenario indices of `M_1, ..., M_n`.
    pub measurements: Vec<usize>,
    /// Scenario index of the context `{M_i, M_{i+1}}`.
    pub contexts: Vec<usize>,
    /// True when the scenario lists that context as `(M_{i+1}, M_i)`.
    pub reversed: Vec<bool>,
}

impl CycleView {
    /// Walks a scenario whose compatibility graph is a single cycle,
    /// starting at context 0 in its listed orientation. For `n_cycle`
    /// scenarios view index `i` is context `i`.
    pub fn of_cycle_scenario(s: &Scenario) -> Result<Self> {
        let n = s.measurement_count();
        let not_cycle = |why: &str| Err(Error::NotCycle(why.to_string()));
        if n < 3 || s.context_count() != n {
            return not_cycle("a cycle has as many contexts as measurements, at least 3");
        }
        if s.contexts().iter().any(|c| c.len() != 2) {
            return not_cycle("every context of a cycle has two measurements");
        }
        let mut holding: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (c, ctx) in s.contexts().iter().enumerate() {
            for &m in ctx {
                holding[m].push(c);
            }
        }
        if holding.iter().any(|h| h.len() != 2) {
            return not_cycle("every measurement of a cycle lies in exactly two contexts");
        }
        let first = s.context(0);
        let mut order = vec![first[0], first[1]];
        let mut via = 0;
        loop {
            let last = *order.last().unwrap();
            via = if holding[last][0] == via { holding[last][1] } else { holding[last][0] };
            let ctx = s.context(via);
            let next = if ctx[0] == last { ctx[1] } else { ctx[0] };
            if next == order[0] {
                break;
            }
            if order.contains(&next) {
                return not_cycle("compatibility graph is not a single cycle");
            }
            order.push(next);
        }
        if order.len() != n {
            return not_cycle("compatibility graph is disconnected");
        }
        Self::from_cycle(s, &order)
    }

    /// The view of a cycle given by its measurements in order.
    pub fn from_cycle(s: &Scenario, cycle: &[usize]) -> Result<Self> {
        let n = cycle.len();
        if n < 3 {
            return Err(Error::NotCycle(format!("{n} measurements do not form a cycle")));
        }
        let mut contexts = Vec::with_capacity(n);
        let mut reversed = Vec::with_capacity(n);
        for i in 0..n {
            let (x, y) = (cycle[i], cycle[(i + 1) % n]);
            let c = s.find_context(&[x, y]).filter(|&c| s.context(c).len() == 2).ok_or_else(|| {
                Error::NotCycle(format!("no context {{{}, {}}}", s.name(x), s.name(y)))
            })?;
            contexts.push(c);
            reversed.push(s.context(c)[0] != x);
        }
        Ok(CycleView {
            measurements: cycle.to_vec(),
            contexts,
            reversed,
        })
    }

    pub fn len(&self) -> usize {
        self.measurements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measurements.is_empty()
    }

    /// Scenario measurement `M_i` (indices taken mod n).
    pub fn measurement(&self, i: usize) -> usize {
        self.measurements[i % self.len()]
    }

    pub fn outcome_count(&self, s: &Scenario, i: usize) -> usize {
        s.outcome_count(self.measurement(i))
    }

    /// Is `(M_i = x, M_{i+1} = y)` possible?
    pub fn possible(&self, pb: &PossibilisticBehavior, i: usize, x: usize, y: usize) -> bool {
        let i = i % self.len();
        let c = self.contexts[i];
        if self.reversed[i] {
            pb.is_possible(c, &[y, x])
        } else {
            pb.is_possible(c, &[x, y])
        }
    }

    /// Rotates and possibly reverses the view so that it starts with the
    /// directed pair `(first, second)`.
    pub fn starting_at(&self, s: &Scenario, first: usize, second: usize) -> Result<Self> {
        let n = self.len();
        let p = self.measurements.iter().position(|&m| m == first).ok_or_else(|| {
            Error::NotCycle(format!("{} is not on the cycle", s.name(first)))
        })?;
        let order: Vec<usize> = if self.measurement(p + 1) == second {
            (0..n).map(|k| self.measurement(p + k)).collect()
        } else if self.measurement(p + n - 1) == second {
            (0..n).map(|k| self.measurement(p + n - k)).collect()
        } else {
            return Err(Error::NotCycle(format!(
                "{} and {} are not adjacent on the cycle",
                s.name(first),
                s.name(second)
            )));
        };
        Self::from_cycle(s, &order)
    }
}

/// One step of the chain: in `C_{i+j}`, every pair from `reachable_from`
/// to `forbidden` is impossible.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParadoxStep {
    /// View index of the context.
    pub context: usize,
    pub reachable_from: Vec<usize>,
    pub reachable: Vec<usize>,
    pub forbidden: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParadoxCertificate {
    pub view: CycleView,
    /// View index `i` of the witness context `C_i`.
    pub base: usize,
    /// `(a, b)`: outcomes of `M_i` and `M_{i+1}`.
    pub witness: (usize, usize),
    /// `n - 1` steps through `C_{i+1}, ..., C_{i+n-1}`.
    pub steps: Vec<ParadoxStep>,
}

fn set_of(mask: &[bool]) -> Vec<usize> {
    mask.iter().enumerate().filter(|(_, &b)| b).map(|(o, _)| o).collect()
}

/// Propagation from a possible pair `(a, b)` in `C_i`; a certificate if `a`
/// is not reachable back.
pub fn certify_at(
    pb: &PossibilisticBehavior,
    view: &CycleView,
    i: usize,
    a: usize,
    b: usize,
) -> Option<ParadoxCertificate> {
    let s = pb.scenario();
    let n = view.len();
    let i = i % n;
    if !view.possible(pb, i, a, b) {
        return None;
    }
    let mut current = vec![false; view.outcome_count(s, i + 1)];
    current[b] = true;
    let mut steps = Vec::with_capacity(n - 1);
    for j in 1..n {
        let ctx = (i + j) % n;
        let width = view.outcome_count(s, ctx + 1);
        let mut next = vec![false; width];
        for x in set_of(&current) {
            for (y, slot) in next.iter_mut().enumerate() {
                if !*slot && view.possible(pb, ctx, x, y) {
                    *slot = true;
                }
            }
        }
        steps.push(ParadoxStep {
            context: ctx,
            reachable_from: set_of(&current),
            reachable: set_of(&next),
            forbidden: (0..width).filter(|&y| !next[y]).collect(),
        });
        current = next;
    }
    if current[a] {
        return None;
    }
    Some(ParadoxCertificate {
        view: view.clone(),
        base: i,
        witness: (a, b),
        steps,
    })
}

/// First certificate in canonical order: view context index, then `(a, b)`
/// lexicographically. On a cycle this decides logical contextuality
/// exactly.
pub fn detect_on_view(pb: &PossibilisticBehavior, view: &CycleView) -> Option<ParadoxCertificate> {
    let s = pb.scenario();
    for i in 0..view.len() {
        for a in 0..view.outcome_count(s, i) {
            for b in 0..view.outcome_count(s, i + 1) {
                if let Some(cert) = certify_at(pb, view, i, a, b) {
                    return Some(cert);
                }
            }
        }
    }
    None
}

/// Paradox detection on an n-cycle scenario with any number of outcomes.
pub fn detect_cycle_paradox(pb: &PossibilisticBehavior) -> Result<Option<ParadoxCertificate>> {
    let view = CycleView::of_cycle_scenario(pb.scenario())?;
    pb.require_nondisturbing()?;
    Ok(detect_on_view(pb, &view))
}

/// Paradox detection on a simple scenario with dichotomic measurements:
/// each chordless cycle is scanned in order and the first certificate is
/// returned; its view names the cycle.
pub fn detect_simple_scenario_paradox(pb: &PossibilisticBehavior) -> Result<Option<ParadoxCertificate>> {
    let s = pb.scenario();
    s.require_simple()?;
    s.require_dichotomic()?;
    pb.require_nondisturbing()?;
    for cycle in s.chordless_cycles()?.cycles {
        let view = CycleView::from_cycle(s, &cycle)?;
        if let Some(cert) = detect_on_view(pb, &view) {
            return Ok(Some(cert));
        }
    }
    Ok(None)
}

impl ParadoxCertificate {
    pub fn len(&self) -> usize {
        self.view.len()
    }

    pub fn is_empty(&self) -> bool {
        self.view.is_empty()
    }

    /// Scenario index of the witness context.
    pub fn base_context_index(&self) -> usize {
        self.view.contexts[self.base]
    }

    /// Re-checks the certificate against the tables, independently of how
    /// it was found.
    pub fn validate(&self, pb: &PossibilisticBehavior) -> std::result::Result<(), String> {
        let s = pb.scenario();
        let n = self.view.len();
        let fresh = CycleView::from_cycle(s, &self.view.measurements).map_err(|e| e.to_string())?;
        if fresh != self.view {
            return Err("cycle view does not match the scenario".into());
        }
        let (a, b) = self.witness;
        if a >= self.view.outcome_count(s, self.base) || b >= self.view.outcome_count(s, self.base + 1) {
            return Err("witness outcome out of range".into());
        }
        if !self.view.possible(pb, self.base, a, b) {
            return Err("witness pair is impossible".into());
        }
        if self.steps.len() != n - 1 {
            return Err(format!("{} steps, expected {}", self.steps.len(), n - 1));
        }
        let mut from = vec![b];
        for (j, step) in self.steps.iter().enumerate() {
            let ctx = (self.base + j + 1) % n;
            if step.context != ctx {
                return Err(format!("step {} names context {}, expected {ctx}", j + 1, step.context));
            }
            if step.reachable_from != from {
                return Err(format!("step {} does not continue the previous one", j + 1));
            }
            let width = self.view.outcome_count(s, ctx + 1);
            let mut seen = vec![false; width];
            for &y in step.reachable.iter().chain(&step.forbidden) {
                if y >= width || seen[y] {
                    return Err(format!("step {} is not a partition of the outcomes", j + 1));
                }
                seen[y] = true;
            }
            if seen.iter().any(|x| !x) {
                return Err(format!("step {} is not a partition of the outcomes", j + 1));
            }
            for &x in &step.reachable_from {
                for &y in &step.forbidden {
                    if self.view.possible(pb, ctx, x, y) {
                        return Err(format!("step {}: pair ({x}, {y}) is possible", j + 1));
                    }
                }
            }
            from = step.reachable.clone();
        }
        if !self.steps.last().unwrap().forbidden.contains(&a) {
            return Err("the witness outcome is not forbidden at the end of the chain".into());
        }
        Ok(())
    }

    /// All impossible pairs the certificate relies on, as
    /// `(view context, x, y)` with `x` on `M_k`, `y` on `M_{k+1}`.
    pub fn forbidden_pairs(&self) -> Vec<(usize, usize, usize)> {
        self.steps
            .iter()
            .flat_map(|st| {
                st.reachable_from
                    .iter()
                    .flat_map(move |&x| st.forbidden.iter().map(move |&y| (st.context, x, y)))
            })
            .collect()
    }

    /// The Hardy-type chain `α_1, ..., α_{n-2}` when every intermediate
    /// forbidden set is a single outcome (always the case for dichotomic
    /// nondisturbing tables).
    pub fn alphas(&self) -> Option<Vec<usize>> {
        let n = self.view.len();
        self.steps[..n - 2]
            .iter()
            .map(|st| match st.forbidden[..] {
                [f] if st.reachable_from.len() == 1 => Some(f),
                _ => None,
            })
            .collect()
    }

    /// Human-readable JSON with measurement names and outcome labels.
    pub fn describe(&self, s: &Scenario) -> Value {
        let n = self.view.len();
        let name = |i: usize| s.name(self.view.measurement(i)).to_string();
        let label = |i: usize, o: usize| s.outcomes(self.view.measurement(i))[o].clone();
        let labels = |i: usize, set: &[usize]| set.iter().map(|&o| label(i, o)).collect::<Vec<_>>();
        let (a, b) = self.witness;
        let steps: Vec<Value> = self
            .steps
            .iter()
            .map(|st| {
                let k = st.context;
                json!({
                    "context": [name(k), name(k + 1)],
                    "context_index": self.view.contexts[k],
                    "reachable_from": labels(k, &st.reachable_from),
                    "reachable": labels(k + 1, &st.reachable),
                    "forbidden": labels(k + 1, &st.forbidden),
                })
            })
            .collect();
        let chain: Vec<Value> = self
            .forbidden_pairs()
            .into_iter()
            .map(|(k, x, y)| {
                json!({
                    "context": [name(k), name(k + 1)],
                    "outcome": [label(k, x), label(k + 1, y)],
                })
            })
            .collect();
        let mut out = json!({
            "cycle": (0..n).map(name).collect::<Vec<_>>(),
            "base_context_index": self.base_context_index(),
            "witness": {
                "context": [name(self.base), name(self.base + 1)],
                "outcome": [label(self.base, a), label(self.base + 1, b)],
            },
            "steps": steps,
            "impossible": chain,
        });
        if let Some(alphas) = self.alphas() {
            out["alphas"] = json!(alphas
                .iter()
                .enumerate()
                .map(|(j, &o)| label(self.base + j + 2, o))
                .collect::<Vec<_>>());
        }
        out
    }

    pub fn to_text(&self, s: &Scenario) -> String {
        let name = |i: usize| s.name(self.view.measurement(i)).to_string();
        let label = |i: usize, o: usize| s.outcomes(self.view.measurement(i))[o].clone();
        let (a, b) = self.witness;
        let mut out = format!(
            "possible: ({},{}) = ({},{})\n",
            name(self.base),
            name(self.base + 1),
            label(self.base, a),
            label(self.base + 1, b)
        );
        for (k, x, y) in self.forbidden_pairs() {
            out.push_str(&format!(
                "impossible: ({},{}) = ({},{})\n",
                name(k),
                name(k + 1),
                label(k, x),
                label(k + 1, y)
            ));
        }
        out
    }
}

/// A paradox in a bipartite Bell scenario with two outcomes, in the form
/// `p_ij(a,b) > 0, p_mj(α1,b) = 0, p_iℓ(a,α2) = 0, p_mℓ(¬α1,¬α2) = 0`.
/// Setting indices are 1-based positions within each party.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bell22Paradox {
    pub i: usize,
    pub j: usize,
    pub m: usize,
    pub l: usize,
    pub a: usize,
    pub b: usize,
    pub alpha1: usize,
    pub alpha2: usize,
    /// Certificate on the view `A_i, B_j, A_m, B_ℓ`.
    pub certificate: ParadoxCertificate,
}

/// Parties of a complete bipartite scenario; Alice holds measurement 0.
fn bell_parties(s: &Scenario) -> Result<(Vec<usize>, Vec<usize>)> {
    let shape = |why: String| Error::WrongScenarioShape(why);
    if !s.is_simple() || !s.is_dichotomic() {
        return Err(shape("expected a simple scenario with two outcomes per measurement".into()));
    }
    let adj = s.adjacency();
    let mut side = vec![None; s.measurement_count()];
    side[0] = Some(0usize);
    let mut queue = vec![0usize];
    while let Some(x) = queue.pop() {
        for &y in &adj[x] {
            match side[y] {
                None => {
                    side[y] = Some(1 - side[x].unwrap());
                    queue.push(y);
                }
                Some(t) if t == side[x].unwrap() => return Err(shape("compatibility graph is not bipartite".into())),
                _ => {}
            }
        }
    }
    if side.iter().any(|x| x.is_none()) {
        return Err(shape("compatibility graph is disconnected".into()));
    }
    let alice: Vec<usize> = (0..side.len()).filter(|&m| side[m] == Some(0)).collect();
    let bob: Vec<usize> = (0..side.len()).filter(|&m| side[m] == Some(1)).collect();
    if alice.len() != bob.len() || alice.len() < 2 || s.context_count() != alice.len() * bob.len() {
        return Err(shape(format!(
            "expected k x k settings with all {} cross contexts",
            alice.len() * bob.len()
        )));
    }
    Ok((alice, bob))
}

/// Bell-scenario specialization of [`detect_simple_scenario_paradox`].
pub fn detect_bell22_paradox(pb: &PossibilisticBehavior) -> Result<Option<Bell22Paradox>> {
    let s = pb.scenario();
    let (alice, bob) = bell_parties(s)?;
    let Some(cert) = detect_simple_scenario_paradox(pb)? else {
        return Ok(None);
    };
    let (x, y) = (cert.view.measurement(cert.base), cert.view.measurement(cert.base + 1));
    let (ai, bj, a, b) = if alice.contains(&x) {
        (x, y, cert.witness.0, cert.witness.1)
    } else {
        (y, x, cert.witness.1, cert.witness.0)
    };
    let view = cert.view.starting_at(s, ai, bj)?;
    let cert = certify_at(pb, &view, 0, a, b).expect("the same pair is a witness on every orientation");
    let alphas = cert
        .alphas()
        .ok_or_else(|| Error::InvalidBehavior("chain is not of Hardy type".into()))?;
    let pos = |list: &[usize], m: usize| list.iter().position(|&x| x == m).unwrap() + 1;
    Ok(Some(Bell22Paradox {
        i: pos(&alice, ai),
        j: pos(&bob, bj),
        m: pos(&alice, view.measurement(2)),
        l: pos(&bob, view.measurement(3)),
        a,
        b,
        alpha1: alphas[0],
        // α2 is the value reached at B_ℓ; the chain forbids its complement.
        alpha2: 1 - alphas[1],
        certificate: cert,
    }))
}

/// Chen-type paradox on a 4-cycle with ordered outcomes: for some `i`,
/// `C_i` has a possible pair with `x < y` while `C_{i+1}, C_{i+2}, C_{i+3}`
/// have no possible pair with `x > y`. Returns the view index `i`.
pub fn detect_chen_paradox(pb: &PossibilisticBehavior) -> Result<Option<usize>> {
    let s = pb.scenario();
    let view = CycleView::of_cycle_scenario(s).map_err(|e| Error::WrongScenarioShape(e.to_string()))?;
    if view.len() != 4 {
        return Err(Error::WrongScenarioShape(format!("expected a 4-cycle, got a {}-cycle", view.len())));
    }
    let any = |k: usize, pred: fn(usize, usize) -> bool| {
        (0..view.outcome_count(s, k))
            .any(|x| (0..view.outcome_count(s, k + 1)).any(|y| pred(x, y) && view.possible(pb, k, x, y)))
    };
    Ok((0..4).find(|&i| any(i, |x, y| x < y) && (1..4).all(|d| !any(i + d, |x, y| x > y))))
}

/// A strongly contextual dichotomic n-cycle table: context `k` is
/// anticorrelated around `(a_k, a_{k+1})`, every other context correlated
/// around `(a_i, a_{i+1})`.
///
/// `(k, a)` and `(k, ¬a)` give the same table, and so does any other `k`
/// with a suitably relabelled `a`. The canonical form returned by
/// [`classify_strong_contextuality`] has `a_1 = 0` and `k` the first
/// context whose possible pairs disagree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrBoxForm {
    /// View index of the anticorrelated context.
    pub flip_context: usize,
    pub assignment: Vec<usize>,
}

impl PrBoxForm {
    pub fn new(flip_context: usize, assignment: Vec<usize>) -> Result<Self> {
        if assignment.len() < 3 || flip_context >= assignment.len() || assignment.iter().any(|&x| x > 1) {
            return Err(Error::InvalidParameter(
                "need n >= 3 binary values and a context index below n".into(),
            ));
        }
        Ok(PrBoxForm { flip_context, assignment })
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    /// Is `(x, y)` possible in view context `i`?
    pub fn allows(&self, i: usize, x: usize, y: usize) -> bool {
        let n = self.n();
        let (ai, aj) = (self.assignment[i % n], self.assignment[(i + 1) % n]);
        let flip = usize::from(i % n == self.flip_context);
        (x ^ ai) == (y ^ aj ^ flip)
    }

    /// The table on a view of a dichotomic cycle.
    pub fn on_view(&self, s: Arc<Scenario>, view: &CycleView) -> Result<PossibilisticBehavior> {
        if view.len() != self.n() {
            return Err(Error::InvalidParameter(format!(
                "form has n = {}, cycle has {}",
                self.n(),
                view.len()
            )));
        }
        let mut tables: Vec<Vec<bool>> = (0..s.context_count()).map(|c| vec![false; s.joint_count(c)]).collect();
        for i in 0..view.len() {
            let c = view.contexts[i];
            for x in 0..2 {
                for y in 0..2 {
                    if self.allows(i, x, y) {
                        let o = if view.reversed[i] { [y, x] } else { [x, y] };
                        tables[c][s.encode(c, &o)] = true;
                    }
                }
            }
        }
        PossibilisticBehavior::new(s, tables)
    }

    /// The table on `n_cycle(n, 2)`.
    pub fn possibilistic(&self) -> PossibilisticBehavior {
        let s = Arc::new(Scenario::n_cycle(self.n(), 2).expect("n >= 3"));
        let view = CycleView::of_cycle_scenario(&s).expect("n-cycle");
        self.on_view(s, &view).expect("shape matches")
    }
}

/// For a strongly contextual dichotomic n-cycle table, its PR-box form;
/// `None` if the table is not strongly contextual.
pub fn classify_strong_contextuality(pb: &PossibilisticBehavior) -> Result<Option<PrBoxForm>> {
    let s = pb.scenario();
    let view = CycleView::of_cycle_scenario(s)?;
    s.require_dichotomic()?;
    pb.require_nondisturbing()?;
    // Strong contextuality: every possible pair of C_1 is a witness.
    let sc = (0..2).all(|a| (0..2).all(|b| !view.possible(pb, 0, a, b) || certify_at(pb, &view, 0, a, b).is_some()));
    if !sc {
        return Ok(None);
    }
    let n = view.len();
    let mut parity = Vec::with_capacity(n);
    for i in 0..n {
        let possible: BTreeSet<(usize, usize)> = (0..2)
            .flat_map(|x| (0..2).map(move |y| (x, y)))
            .filter(|&(x, y)| view.possible(pb, i, x, y))
            .collect();
        let correlated: BTreeSet<_> = [(0, 0), (1, 1)].into();
        let anti: BTreeSet<_> = [(0, 1), (1, 0)].into();
        parity.push(if possible == correlated {
            0
        } else if possible == anti {
            1
        } else {
            return Err(Error::InvalidBehavior(format!(
                "strongly contextual table with context {i} neither correlated nor anticorrelated"
            )));
        });
    }
    let k = parity.iter().position(|&p| p == 1).ok_or_else(|| {
        Error::InvalidBehavior("strongly contextual table with even parity".into())
    })?;
    let mut assignment = vec![0usize; n];
    for i in 0..n - 1 {
        assignment[i + 1] = assignment[i] ^ parity[i] ^ usize::from(i == k);
    }
    let form = PrBoxForm::new(k, assignment)?;
    if form.on_view(s.clone(), &view)? != *pb {
        return Err(Error::InvalidBehavior("table does not match its PR-box form".into()));
    }
    Ok(Some(form))
}
