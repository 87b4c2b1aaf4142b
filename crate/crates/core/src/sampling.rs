//! Random generators of nondisturbing behaviors, used by the property tests,
//! the acceptance harness and the benches.
//!
//! The building block is a *bijection box*: some measurements are fixed to
//! one outcome; the free ones each get an outcome subset `S_m`, all of the
//! same size `r` within a connected free component, and every context pairs
//! those subsets by random bijections. Every measurement then has the same
//! marginal support (or, with uniform weights, the same marginal) in every
//! context, so unions and mixtures of boxes are nondisturbing. `r = 1`
//! gives deterministic assignments; dichotomic boxes with `r = 2` are
//! PR-type boxes or their classical relabellings.

use std::sync::Arc;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::behavior::{Behavior, PossibilisticBehavior};
use crate::classical::GlobalAssignment;
use crate::rational::Rational;
use crate::scenario::Scenario;

/// Joint outcomes of one bijection box, per context (each listed once).
#[derive(Debug, Clone)]
pub struct BijectionBox {
    pub rows: Vec<Vec<Vec<usize>>>,
}

impl BijectionBox {
    pub fn possibilistic(&self, s: &Arc<Scenario>) -> PossibilisticBehavior {
        let mut tables: Vec<Vec<bool>> = (0..s.context_count()).map(|c| vec![false; s.joint_count(c)]).collect();
        for (c, rows) in self.rows.iter().enumerate() {
            for r in rows {
                tables[c][s.encode(c, r)] = true;
            }
        }
        PossibilisticBehavior::new(s.clone(), tables).expect("every context has a row")
    }

    /// Uniform weight on the rows of each context.
    pub fn uniform(&self, s: &Arc<Scenario>) -> Behavior {
        let mut tables: Vec<Vec<Rational>> = (0..s.context_count())
            .map(|c| vec![Rational::zero(); s.joint_count(c)])
            .collect();
        for (c, rows) in self.rows.iter().enumerate() {
            let w = Rational::new(1.into(), (rows.len() as i64).into());
            for r in rows {
                tables[c][s.encode(c, r)] = w.clone();
            }
        }
        Behavior::new(s.clone(), tables).expect("rows sum to one")
    }
}

fn free_components(s: &Scenario, free: &[bool]) -> Vec<usize> {
    let n = s.measurement_count();
    let mut comp: Vec<usize> = (0..n).collect();
    fn find(comp: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while comp[r] != r {
            r = comp[r];
        }
        comp[x] = r;
        r
    }
    for ctx in s.contexts() {
        let members: Vec<usize> = ctx.iter().copied().filter(|&m| free[m]).collect();
        for w in members.windows(2) {
            let (a, b) = (find(&mut comp, w[0]), find(&mut comp, w[1]));
            comp[a] = b;
        }
    }
    (0..n).map(|m| find(&mut comp, m)).collect()
}

/// A random bijection box. Each measurement is fixed with probability
/// `p_fixed`.
pub fn bijection_box<R: Rng>(s: &Scenario, rng: &mut R, p_fixed: f64) -> BijectionBox {
    box_with(s, rng, p_fixed, false)
}

/// `full`: every free component uses its largest common size.
fn box_with<R: Rng>(s: &Scenario, rng: &mut R, p_fixed: f64, full: bool) -> BijectionBox {
    let n = s.measurement_count();
    let free: Vec<bool> = (0..n).map(|_| !rng.gen_bool(p_fixed)).collect();
    let comp = free_components(s, &free);
    let mut size = vec![0usize; n];
    for m in 0..n {
        if free[m] && size[comp[m]] == 0 {
            // Common size for the component: at most the smallest alphabet,
            // biased to the largest.
            let smallest = (0..n)
                .filter(|&x| free[x] && comp[x] == comp[m])
                .map(|x| s.outcome_count(x))
                .min()
                .unwrap();
            size[comp[m]] = if full || rng.gen_bool(0.6) { smallest } else { rng.gen_range(1..=smallest) };
        }
    }
    // Outcome subset (free) or the fixed value (as a one-element subset).
    let subsets: Vec<Vec<usize>> = (0..n)
        .map(|m| {
            let mut all: Vec<usize> = (0..s.outcome_count(m)).collect();
            all.shuffle(rng);
            let k = if free[m] { size[comp[m]] } else { 1 };
            all.truncate(k);
            all
        })
        .collect();
    let rows = s
        .contexts()
        .iter()
        .map(|ctx| {
            let r = ctx.iter().map(|&m| subsets[m].len()).max().unwrap();
            let columns: Vec<Vec<usize>> = ctx
                .iter()
                .map(|&m| {
                    let mut col = subsets[m].clone();
                    col.shuffle(rng);
                    if col.len() == 1 {
                        col = vec![col[0]; r];
                    }
                    col
                })
                .collect();
            (0..r).map(|t| columns.iter().map(|col| col[t]).collect()).collect()
        })
        .collect();
    BijectionBox { rows }
}

fn random_box<R: Rng>(s: &Scenario, rng: &mut R) -> BijectionBox {
    let p_fixed = *[0.0, 0.0, 0.15, 0.4, 1.0].choose(rng).unwrap();
    bijection_box(s, rng, p_fixed)
}

/// Every context covers every outcome of each of its measurements, so all
/// marginal supports are full: a covering table, nondisturbing whatever
/// else it holds. Extra joint outcomes are added with probability `density`.
pub fn covering_table<R: Rng>(s: &Arc<Scenario>, rng: &mut R, density: f64) -> PossibilisticBehavior {
    let mut tables: Vec<Vec<bool>> = (0..s.context_count()).map(|c| vec![false; s.joint_count(c)]).collect();
    for (c, table) in tables.iter_mut().enumerate() {
        let ctx = s.context(c);
        let r = ctx.iter().map(|&m| s.outcome_count(m)).max().unwrap();
        let columns: Vec<Vec<usize>> = ctx
            .iter()
            .map(|&m| {
                let l = s.outcome_count(m);
                let mut col: Vec<usize> = (0..r).map(|t| if t < l { t } else { rng.gen_range(0..l) }).collect();
                col.shuffle(rng);
                col
            })
            .collect();
        for t in 0..r {
            let row: Vec<usize> = columns.iter().map(|col| col[t]).collect();
            table[s.encode(c, &row)] = true;
        }
        for cell in table.iter_mut() {
            *cell |= rng.gen_bool(density);
        }
    }
    PossibilisticBehavior::new(s.clone(), tables).expect("every context has a row")
}

/// A random possibilistically nondisturbing table, from one of three
/// families: unions of one to three bijection boxes; a full-size box with
/// every measurement free joined to one or two deterministic boxes; and
/// covering tables.
pub fn random_nd_possibilistic<R: Rng>(s: &Arc<Scenario>, rng: &mut R) -> PossibilisticBehavior {
    match rng.gen_range(0..3) {
        0 => {
            let k = rng.gen_range(1..=3);
            let mut pb = random_box(s, rng).possibilistic(s);
            for _ in 1..k {
                pb = pb.union(&random_box(s, rng).possibilistic(s));
            }
            pb
        }
        1 => {
            let mut pb = box_with(s, rng, 0.0, true).possibilistic(s);
            for _ in 0..rng.gen_range(1..=2) {
                pb = pb.union(&bijection_box(s, rng, 1.0).possibilistic(s));
            }
            pb
        }
        _ => {
            let density = *[0.1, 0.25, 0.5].choose(rng).unwrap();
            covering_table(s, rng, density)
        }
    }
}

fn random_weights<R: Rng>(rng: &mut R, k: usize) -> Vec<Rational> {
    let raw: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=12)).collect();
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|w| Rational::new(w.into(), total.into())).collect()
}

/// Rational mixture of one to three uniformly weighted bijection boxes:
/// nondisturbing, contextual or not.
pub fn random_nd_behavior<R: Rng>(s: &Arc<Scenario>, rng: &mut R) -> Behavior {
    let k = rng.gen_range(1..=3);
    let parts: Vec<Behavior> = (0..k)
        .map(|_| random_box(s, rng).uniform(s))
        .collect();
    let weights = random_weights(rng, k);
    let pairs: Vec<(Rational, &Behavior)> = weights.into_iter().zip(&parts).collect();
    Behavior::mixture(&pairs).expect("weights sum to one")
}

pub fn random_assignment<R: Rng>(s: &Scenario, rng: &mut R) -> GlobalAssignment {
    GlobalAssignment {
        values: (0..s.measurement_count()).map(|m| rng.gen_range(0..s.outcome_count(m))).collect(),
    }
}

/// Mixture of `k` random global assignments with random rational weights;
/// noncontextual by construction.
pub fn deterministic_mixture<R: Rng>(
    s: &Arc<Scenario>,
    rng: &mut R,
    k: usize,
) -> (Behavior, Vec<(GlobalAssignment, Rational)>) {
    let weights: Vec<(GlobalAssignment, Rational)> = random_weights(rng, k)
        .into_iter()
        .map(|w| (random_assignment(s, rng), w))
        .collect();
    let mut tables: Vec<Vec<Rational>> = (0..s.context_count())
        .map(|c| vec![Rational::zero(); s.joint_count(c)])
        .collect();
    for (g, w) in &weights {
        for (c, t) in tables.iter_mut().enumerate() {
            t[s.encode(c, &g.restrict(s, c))] += w;
        }
    }
    (Behavior::new(s.clone(), tables).expect("weights sum to one"), weights)
}

/// A random tree on `n` measurements with `l` outcomes each.
pub fn random_tree<R: Rng>(n: usize, l: usize, rng: &mut R) -> Arc<Scenario> {
    let edges: Vec<(usize, usize)> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
    Arc::new(Scenario::from_edges(n, l, &edges).expect("trees are valid scenarios"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{self, DEFAULT_ENUMERATION_CAP};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_behaviors_are_nondisturbing() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (n, l) in [(3, 2), (5, 3), (6, 2)] {
            let s = Arc::new(Scenario::n_cycle(n, l).unwrap());
            for _ in 0..200 {
                assert!(random_nd_possibilistic(&s, &mut rng).is_nondisturbing());
                assert!(random_nd_behavior(&s, &mut rng).is_nondisturbing());
            }
        }
        let s = Arc::new(Scenario::bipartite_bell(3, 2).unwrap());
        for _ in 0..200 {
            assert!(random_nd_behavior(&s, &mut rng).is_nondisturbing());
        }
    }

    #[test]
    fn generator_reaches_every_level() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = Arc::new(Scenario::n_cycle(4, 2).unwrap());
        let (mut lc, mut sc, mut classical_) = (0, 0, 0);
        for _ in 0..300 {
            let pb = random_nd_possibilistic(&s, &mut rng);
            let v = classical::is_logically_contextual(&pb, DEFAULT_ENUMERATION_CAP).unwrap();
            match (v.contextual, v.support_size) {
                (true, 0) => sc += 1,
                (true, _) => lc += 1,
                _ => classical_ += 1,
            }
        }
        assert!(lc > 10 && sc > 10 && classical_ > 10, "{lc} {sc} {classical_}");
    }

    #[test]
    #[ignore]
    fn level_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut shapes: Vec<Arc<Scenario>> = Vec::new();
        for n in 3..=8 {
            for l in [2, 3] {
                shapes.push(Arc::new(Scenario::n_cycle(n, l).unwrap()));
            }
        }
        shapes.push(Arc::new(Scenario::bipartite_bell(2, 2).unwrap()));
        shapes.push(Arc::new(Scenario::bipartite_bell(3, 2).unwrap()));
        for s in shapes {
            let (mut lc, mut sc, mut cl) = (0, 0, 0);
            for _ in 0..1000 {
                let pb = random_nd_possibilistic(&s, &mut rng);
                let v = classical::is_logically_contextual(&pb, DEFAULT_ENUMERATION_CAP).unwrap();
                match (v.contextual, v.support_size) {
                    (true, 0) => sc += 1,
                    (true, _) => lc += 1,
                    _ => cl += 1,
                }
            }
            println!("{} {lc} {sc} {cl}", s.measurement_count());
        }
    }

    #[test]
    fn trees_are_acyclic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..9 {
            let s = random_tree(n, 2, &mut rng);
            assert!(s.chordless_cycles().unwrap().is_acyclic);
        }
    }
}
