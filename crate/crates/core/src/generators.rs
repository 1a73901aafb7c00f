//! Instance construction: the heavy 7-cycle family, random trees and
//! connected graphs, and lazy rejection of instances whose play ties.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::game::{Instance, InstanceError, TiePolicy};
use crate::solver::{solve, SolveError, SolveReport};

/// Smallest accepted scale for [`gen_cycle7_family`].
pub const CYCLE7_MIN_M: u64 = 96;
/// Light-vertex weights of the 7-cycle family and the offsets of the heavy ones.
pub const CYCLE7_LIGHT_TOTAL: u64 = 95;
/// Default upper end of random weights.
pub const DEFAULT_WEIGHT_MAX: u64 = 1_000_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("M = {0} is too small, the cycle family needs M >= {CYCLE7_MIN_M}")]
    MTooSmall(u64),
    #[error("vertex count must be at least 1")]
    NoVertices,
    #[error("weight_max must be at least 1")]
    NoWeights,
    #[error("{requested} extra edges requested, at most {max} fit")]
    TooManyExtraEdges { requested: usize, max: usize },
    #[error("no tie-free instance within {attempts} attempts")]
    ExhaustedAttempts { attempts: usize },
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Solve(SolveError),
}

/// The 7-cycle `a..g` (vertices `0..7`) weighted `M, M+15, 17, 7, 12, M+26, 18`.
pub fn gen_cycle7_family(m: u64) -> Result<Instance, GenError> {
    if m < CYCLE7_MIN_M {
        return Err(GenError::MTooSmall(m));
    }
    let weights = vec![m, m + 15, 17, 7, 12, m + 26, 18];
    Ok(Instance::new(weights, cycle_edges(7))?)
}

/// Exact upper bound on the family's value: `(M + 69) / (3M + 95)`.
pub fn cycle7_bound(m: u64) -> crate::game::Fraction {
    crate::game::Fraction::new(m + 69, 3 * m + CYCLE7_LIGHT_TOTAL)
}

pub fn cycle_edges(n: usize) -> Vec<(usize, usize)> {
    match n {
        0 | 1 => Vec::new(),
        2 => vec![(0, 1)],
        _ => (0..n).map(|i| (i, (i + 1) % n)).collect(),
    }
}

pub fn path_edges(n: usize) -> Vec<(usize, usize)> {
    (1..n).map(|v| (v - 1, v)).collect()
}

fn random_weights(n: usize, weight_max: u64, rng: &mut ChaCha8Rng) -> Vec<u64> {
    (0..n).map(|_| rng.gen_range(1..=weight_max)).collect()
}

/// Decodes a uniformly random Prüfer sequence into tree edges.
fn random_tree_edges(n: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    match n {
        0 | 1 => return Vec::new(),
        2 => return vec![(0, 1)],
        _ => {}
    }
    let code: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &v in &code {
        degree[v] += 1;
    }
    let mut leaves: BTreeSet<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &v in &code {
        let leaf = leaves.pop_first().expect("Prüfer decoding always has a leaf");
        edges.push((leaf, v));
        degree[v] -= 1;
        if degree[v] == 1 {
            leaves.insert(v);
        }
    }
    let last: Vec<usize> = leaves.into_iter().collect();
    edges.push((last[0], last[1]));
    edges
}

/// Uniform random labeled tree with weights uniform in `[1, weight_max]`.
pub fn gen_random_tree(n: usize, seed: u64, weight_max: u64) -> Result<Instance, GenError> {
    if n == 0 {
        return Err(GenError::NoVertices);
    }
    if weight_max == 0 {
        return Err(GenError::NoWeights);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = random_tree_edges(n, &mut rng);
    let weights = random_weights(n, weight_max, &mut rng);
    Ok(Instance::new(weights, edges)?)
}

/// Random spanning tree plus `extra_edges` distinct random non-tree edges.
pub fn gen_random_connected(
    n: usize,
    extra_edges: usize,
    seed: u64,
    weight_max: u64,
) -> Result<Instance, GenError> {
    if n == 0 {
        return Err(GenError::NoVertices);
    }
    if weight_max == 0 {
        return Err(GenError::NoWeights);
    }
    let max = n * (n - 1) / 2 - (n - 1);
    if extra_edges > max {
        return Err(GenError::TooManyExtraEdges {
            requested: extra_edges,
            max,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = random_tree_edges(n, &mut rng);
    let present: BTreeSet<(usize, usize)> =
        edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
    let mut candidates: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|e| !present.contains(e))
        .collect();
    candidates.shuffle(&mut rng);
    edges.extend(candidates.into_iter().take(extra_edges));
    let weights = random_weights(n, weight_max, &mut rng);
    Ok(Instance::new(weights, edges)?)
}

/// An instance accepted by [`resample_on_tie`] together with its solution.
#[derive(Debug, Clone)]
pub struct Resampled {
    pub instance: Instance,
    pub report: SolveReport,
    /// Draws rejected because play reached a tie.
    pub rejected: usize,
}

/// Draws instances from `generate(attempt)` until one solves without a tie
/// under `policy`. Only `ForbidTies` can reject; other policies accept the
/// first draw.
pub fn resample_on_tie<F>(
    mut generate: F,
    policy: TiePolicy,
    attempts: usize,
) -> Result<Resampled, GenError>
where
    F: FnMut(usize) -> Result<Instance, GenError>,
{
    for attempt in 0..attempts {
        let instance = generate(attempt)?;
        match solve(&instance, policy) {
            Ok(report) => {
                return Ok(Resampled {
                    instance,
                    report,
                    rejected: attempt,
                })
            }
            Err(err) if err.is_tie() => continue,
            Err(err) => return Err(GenError::Solve(err)),
        }
    }
    Err(GenError::ExhaustedAttempts { attempts })
}

/// Canonical string of a rooted tree (AHU encoding).
fn rooted_code(adj: &[Vec<usize>], v: usize, parent: usize) -> String {
    let mut kids: Vec<String> = adj[v]
        .iter()
        .filter(|&&u| u != parent)
        .map(|&u| rooted_code(adj, u, v))
        .collect();
    kids.sort();
    format!("({})", kids.concat())
}

fn tree_centers(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &leaf in &layer {
            degree[leaf] = 0;
            for &u in &adj[leaf] {
                if degree[u] > 0 {
                    degree[u] -= 1;
                    if degree[u] == 1 {
                        next.push(u);
                    }
                }
            }
        }
        layer = next;
    }
    layer
}

fn canonical_tree(n: usize, edges: &[(usize, usize)]) -> String {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    tree_centers(&adj)
        .into_iter()
        .map(|c| rooted_code(&adj, c, usize::MAX))
        .min()
        .unwrap_or_default()
}

/// One representative of every unlabeled tree on `n` vertices, in a fixed order.
pub fn enumerate_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n == 0 {
        return Vec::new();
    }
    let mut level: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    for size in 1..n {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for tree in &level {
            for v in 0..size {
                let mut grown = tree.clone();
                grown.push((v, size));
                if seen.insert(canonical_tree(size + 1, &grown)) {
                    next.push(grown);
                }
            }
        }
        level = next;
    }
    level
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle7_family_examples() {
        let inst = gen_cycle7_family(1000).unwrap();
        assert_eq!(inst.weights(), &[1000, 1015, 17, 7, 12, 1026, 18]);
        assert_eq!(inst.total_weight(), 3095);
        assert_eq!(gen_cycle7_family(96).unwrap().total_weight(), 383);
        assert_eq!(gen_cycle7_family(95), Err(GenError::MTooSmall(95)));
    }

    #[test]
    fn small_random_trees() {
        let one = gen_random_tree(1, 3, 10).unwrap();
        assert_eq!(one.vertex_count(), 1);
        let two = gen_random_tree(2, 3, 10).unwrap();
        assert_eq!(two.edges(), &[(0, 1)]);
        let a = gen_random_tree(8, 42, 1_000_000_000).unwrap();
        let b = gen_random_tree(8, 42, 1_000_000_000).unwrap();
        assert_eq!(a, b);
        assert!(a.is_tree());
        assert_eq!(
            crate::io::format_instance(&a),
            crate::io::format_instance(&b)
        );
    }

    #[test]
    fn random_connected_bounds() {
        let tree = gen_random_connected(9, 0, 1, 100).unwrap();
        assert!(tree.is_tree());
        assert_eq!(
            gen_random_connected(3, 2, 1, 100),
            Err(GenError::TooManyExtraEdges {
                requested: 2,
                max: 1
            })
        );
        let tri = gen_random_connected(3, 1, 1, 100).unwrap();
        assert_eq!(tri.edges().len(), 3);
        let g = gen_random_connected(7, 1, 7, 100).unwrap();
        assert_eq!(g.edges().len(), 7);
        assert_eq!(g, gen_random_connected(7, 1, 7, 100).unwrap());
    }

    #[test]
    fn resampling() {
        let ok = resample_on_tie(
            |a| gen_random_tree(10, a as u64, DEFAULT_WEIGHT_MAX),
            TiePolicy::ForbidTies,
            20,
        )
        .unwrap();
        assert_eq!(ok.instance.vertex_count(), 10);

        let err = resample_on_tie(
            |a| gen_random_connected(3, 0, a as u64, 1),
            TiePolicy::ForbidTies,
            5,
        )
        .unwrap_err();
        assert_eq!(err, GenError::ExhaustedAttempts { attempts: 5 });

        let single = resample_on_tie(|_| gen_random_tree(1, 0, 1), TiePolicy::ForbidTies, 1).unwrap();
        assert_eq!(single.rejected, 0);
    }

    #[test]
    fn tree_counts_match_known_sequence() {
        let counts: Vec<usize> = (1..=9).map(|n| enumerate_trees(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 3, 6, 11, 23, 47]);
        for edges in enumerate_trees(7) {
            assert!(Instance::new(vec![1; 7], edges).unwrap().is_tree());
        }
    }
}
