//! Global assignments and the brute-force decision layer: support,
//! logical and strong contextuality, noncontextuality by exact LP and the
//! contextual fraction.
//!
//! Everything here enumerates `O^X` (with pruning), so it is exponential in
//! the number of measurements and guarded by an enumeration cap. It is the
//! oracle the structured paradox detectors are checked against.

use std::ops::ControlFlow;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::behavior::{Behavior, PossibilisticBehavior};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::rational::{self, Rational};
use crate::scenario::Scenario;

/// Default bound on `|O|^|X|` for enumeration.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1 << 24;

/// An outcome for every measurement, indexed by measurement.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GlobalAssignment {
    pub values: Vec<usize>,
}

impl GlobalAssignment {
    pub fn restrict(&self, s: &Scenario, c: usize) -> Vec<usize> {
        s.context(c).iter().map(|&m| self.values[m]).collect()
    }

    pub fn labels(&self, s: &Scenario) -> Vec<String> {
        self.values
            .iter()
            .enumerate()
            .map(|(m, &o)| s.outcomes(m)[o].clone())
            .collect()
    }
}

/// A possible joint outcome that no global assignment extends.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub context_index: usize,
    pub context: Vec<String>,
    pub outcome: Vec<String>,
    #[serde(skip)]
    pub outcome_index: Vec<usize>,
}

impl Witness {
    fn new(s: &Scenario, c: usize, outcome: Vec<usize>) -> Self {
        Witness {
            context_index: c,
            context: s.context(c).iter().map(|&m| s.name(m).to_string()).collect(),
            outcome: s.labels(c, &outcome),
            outcome_index: outcome,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LcVerdict {
    pub contextual: bool,
    /// First uncovered possible entry in (context, lexicographic) order.
    pub witness: Option<Witness>,
    pub support_size: usize,
}

fn check_cap(s: &Scenario, cap: u128) -> Result<()> {
    let required = s.assignment_count();
    if required > cap {
        return Err(Error::EnumerationCapExceeded { required, cap });
    }
    Ok(())
}

/// Visits every global assignment whose restrictions are all possible, in
/// lexicographic order (measurement 0 most significant).
pub fn for_each_support<F>(pb: &PossibilisticBehavior, cap: u128, mut visit: F) -> Result<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    let s = pb.scenario();
    check_cap(s, cap)?;
    let n = s.measurement_count();
    // Each context is checked once its highest-indexed measurement is set.
    let mut closing: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (c, ctx) in s.contexts().iter().enumerate() {
        closing[*ctx.iter().max().unwrap()].push(c);
    }
    let mut values = vec![0usize; n];
    let mut scratch = Vec::new();
    let _ = dfs(pb, &closing, 0, &mut values, &mut scratch, &mut visit);
    Ok(())
}

fn dfs<F>(
    pb: &PossibilisticBehavior,
    closing: &[Vec<usize>],
    depth: usize,
    values: &mut Vec<usize>,
    scratch: &mut Vec<usize>,
    visit: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    let s = pb.scenario();
    if depth == values.len() {
        return visit(values);
    }
    for o in 0..s.outcome_count(depth) {
        values[depth] = o;
        let ok = closing[depth].iter().all(|&c| {
            scratch.clear();
            scratch.extend(s.context(c).iter().map(|&m| values[m]));
            pb.is_possible(c, scratch)
        });
        if ok {
            dfs(pb, closing, depth + 1, values, scratch, visit)?;
        }
    }
    ControlFlow::Continue(())
}

/// `{ t ∈ O^X : t|_C possible for every C }`.
pub fn support(pb: &PossibilisticBehavior, cap: u128) -> Result<Vec<GlobalAssignment>> {
    let mut out = Vec::new();
    for_each_support(pb, cap, |t| {
        out.push(GlobalAssignment { values: t.to_vec() });
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// For each context, which joint outcomes are restrictions of some global
/// assignment (the edges lying on some loop of the bundle diagram).
pub fn covered_entries(pb: &PossibilisticBehavior, cap: u128) -> Result<(Vec<Vec<bool>>, usize)> {
    let s = pb.scenario();
    let mut covered: Vec<Vec<bool>> = (0..s.context_count())
        .map(|c| vec![false; s.joint_count(c)])
        .collect();
    let mut count = 0usize;
    let mut scratch = Vec::new();
    for_each_support(pb, cap, |t| {
        count += 1;
        for (c, cov) in covered.iter_mut().enumerate() {
            scratch.clear();
            scratch.extend(s.context(c).iter().map(|&m| t[m]));
            cov[s.encode(c, &scratch)] = true;
        }
        ControlFlow::Continue(())
    })?;
    Ok((covered, count))
}

/// Logical contextuality: some possible joint outcome extends to no global
/// assignment.
pub fn is_logically_contextual(pb: &PossibilisticBehavior, cap: u128) -> Result<LcVerdict> {
    let s = pb.scenario();
    let (covered, support_size) = covered_entries(pb, cap)?;
    for c in 0..s.context_count() {
        for (i, &possible) in pb.table(c).iter().enumerate() {
            if possible && !covered[c][i] {
                return Ok(LcVerdict {
                    contextual: true,
                    witness: Some(Witness::new(s, c, s.decode(c, i))),
                    support_size,
                });
            }
        }
    }
    Ok(LcVerdict {
        contextual: false,
        witness: None,
        support_size,
    })
}

/// Strong contextuality: the support is empty.
pub fn is_strongly_contextual(pb: &PossibilisticBehavior, cap: u128) -> Result<bool> {
    let mut any = false;
    for_each_support(pb, cap, |_| {
        any = true;
        ControlFlow::Break(())
    })?;
    Ok(!any)
}

/// A global distribution with its nonzero weights.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalDistribution {
    pub weights: Vec<(GlobalAssignment, Rational)>,
}

impl GlobalDistribution {
    /// Marginal of the global distribution on context `c`, as a table.
    pub fn context_table(&self, s: &Scenario, c: usize) -> Vec<Rational> {
        let mut t = vec![Rational::zero(); s.joint_count(c)];
        for (g, w) in &self.weights {
            t[s.encode(c, &g.restrict(s, c))] += w;
        }
        t
    }
}

/// Variables of the classical programs: the support of the collapse, since
/// any other global assignment is forced to weight zero.
fn support_rows(b: &Behavior, cap: u128) -> Result<(Vec<GlobalAssignment>, Vec<(usize, usize, Vec<usize>)>)> {
    let s = b.scenario();
    let vars = support(&b.collapse(), cap)?;
    let mut rows = Vec::new();
    for c in 0..s.context_count() {
        let mut by_entry: Vec<Vec<usize>> = vec![Vec::new(); s.joint_count(c)];
        for (j, g) in vars.iter().enumerate() {
            by_entry[s.encode(c, &g.restrict(s, c))].push(j);
        }
        for (i, cols) in by_entry.into_iter().enumerate() {
            if b.table(c)[i].is_positive() {
                rows.push((c, i, cols));
            }
        }
    }
    Ok((vars, rows))
}

/// Noncontextuality by exact LP feasibility; returns a global distribution
/// reproducing `b` by marginals when one exists.
pub fn is_noncontextual(b: &Behavior, cap: u128) -> Result<Option<GlobalDistribution>> {
    b.require_nondisturbing()?;
    check_cap(b.scenario(), cap)?;
    let (vars, rows) = support_rows(b, cap)?;
    if rows.iter().any(|(_, _, cols)| cols.is_empty()) {
        // A possible entry no global assignment reaches: logically contextual.
        return Ok(None);
    }
    let mut lp = LinearProgram::new(vars.len());
    for (c, i, cols) in rows {
        lp.constraint(
            cols.into_iter().map(|j| (j, Rational::one())).collect(),
            Relation::Eq,
            b.table(c)[i].clone(),
        );
    }
    match lp.solve()? {
        LpOutcome::Optimal { x, .. } => Ok(Some(GlobalDistribution {
            weights: vars
                .into_iter()
                .zip(x)
                .filter(|(_, w)| !w.is_zero())
                .collect(),
        })),
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => Err(Error::Lp("feasibility program reported unbounded".into())),
    }
}

/// `1 - max Σ w_t` over subnormalised global weights dominated by `b`.
pub fn contextual_fraction(b: &Behavior, cap: u128) -> Result<Rational> {
    b.require_nondisturbing()?;
    check_cap(b.scenario(), cap)?;
    let (vars, rows) = support_rows(b, cap)?;
    if vars.is_empty() {
        return Ok(Rational::one());
    }
    let mut lp = LinearProgram::new(vars.len());
    lp.maximize(vec![Rational::one(); vars.len()]);
    for (c, i, cols) in rows {
        if !cols.is_empty() {
            lp.constraint(
                cols.into_iter().map(|j| (j, Rational::one())).collect(),
                Relation::Le,
                b.table(c)[i].clone(),
            );
        }
    }
    match lp.solve()? {
        LpOutcome::Optimal { value, .. } => Ok(Rational::one() - value),
        _ => Err(Error::Lp("weight-extraction program did not reach an optimum".into())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Nd,
    Nc,
    Lc,
    Sc,
    All,
}

impl std::str::FromStr for Level {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nd" => Ok(Level::Nd),
            "nc" => Ok(Level::Nc),
            "lc" => Ok(Level::Lc),
            "sc" => Ok(Level::Sc),
            "all" => Ok(Level::All),
            _ => Err(Error::InvalidParameter(format!("unknown level `{s}`"))),
        }
    }
}

/// Position in the hierarchy. `None` marks a flag that was not requested or
/// is undefined because its nondisturbance precondition failed: `nc` needs
/// `nd`, and the possibilistic flags need `possibilistic_nd`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct HierarchyReport {
    pub nd: Option<bool>,
    pub possibilistic_nd: Option<bool>,
    pub nc: Option<bool>,
    #[serde(rename = "lc")]
    pub logically_contextual: Option<bool>,
    #[serde(rename = "sc")]
    pub strongly_contextual: Option<bool>,
    pub witness: Option<Witness>,
    pub support_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contextual_fraction: Option<String>,
}

fn possibilistic_levels(report: &mut HierarchyReport, pb: &PossibilisticBehavior, level: Level, cap: u128) -> Result<()> {
    let pnd = pb.is_nondisturbing();
    report.possibilistic_nd = Some(pnd);
    if !pnd || matches!(level, Level::Nd | Level::Nc) {
        return Ok(());
    }
    if matches!(level, Level::Lc | Level::All) {
        let v = is_logically_contextual(pb, cap)?;
        report.logically_contextual = Some(v.contextual);
        report.witness = v.witness;
        report.support_size = Some(v.support_size);
        if level == Level::All {
            report.strongly_contextual = Some(v.support_size == 0);
        }
    } else {
        let support = support(pb, cap)?;
        report.support_size = Some(support.len());
        report.strongly_contextual = Some(support.is_empty());
    }
    Ok(())
}

pub fn classify(b: &Behavior, level: Level, cap: u128) -> Result<HierarchyReport> {
    let mut report = HierarchyReport {
        nd: Some(b.is_nondisturbing()),
        ..Default::default()
    };
    if report.nd == Some(true) && matches!(level, Level::Nc | Level::All) {
        report.nc = Some(is_noncontextual(b, cap)?.is_some());
        if level == Level::All {
            report.contextual_fraction = Some(rational::format(&contextual_fraction(b, cap)?));
        }
    }
    possibilistic_levels(&mut report, &b.collapse(), level, cap)?;
    Ok(report)
}

pub fn classify_possibilistic(pb: &PossibilisticBehavior, level: Level, cap: u128) -> Result<HierarchyReport> {
    let mut report = HierarchyReport::default();
    possibilistic_levels(&mut report, pb, level, cap)?;
    Ok(report)
}
