//! Worst-case instance search.
//!
//! The main loop alternates two steps on a fixed graph shape. The exact solver
//! fixes Second's optimal replies and records who moved at every state; those
//! annotations become linear constraints on the weights. A linear program then
//! picks weights minimizing the best First leaf while keeping every recorded
//! mover consistent. Whatever the LP suggests is re-solved exactly before it is
//! reported: LP objectives are never reported as game values.

pub mod simplex;

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::game::{
    format_fraction, legal_moves, mover, Fraction, GameState, Instance, InstanceError, Player,
    TiePolicy, VertexSet,
};
use crate::generators::{cycle_edges, enumerate_trees};
use crate::io::format_instance;
use crate::solver::{solve, Search, SolveError, SolveReport};

use simplex::{maximize, Rational, SimplexOutcome};

/// Largest shape accepted by [`alternate_optimize`].
pub const ALTERNATE_VERTEX_CAP: usize = 10;
/// Largest shape accepted by [`hill_climb`].
pub const HILL_VERTEX_CAP: usize = 12;
/// LP weights are rounded onto this many units when they are not exact integers.
pub const INTEGER_SCALE: u64 = 1_000_000_000_000_000;
/// Upper end of the random offset added to rounded weights under `ForbidTies`.
/// Far below `margin * INTEGER_SCALE` for the default margin.
pub const JITTER: u64 = 100_000;
/// Draws tried before giving up on a tie-free rounding.
const TIE_RETRIES: usize = 32;
/// Smallest improvement counted as progress.
const IMPROVEMENT_EPS: f64 = 1e-9;

/// Default strictness margin for mover inequalities (10^-9).
pub fn default_margin() -> Rational {
    Rational::new(BigInt::one(), BigInt::from(1_000_000_000u64))
}

/// Default weight floor (10^-6).
pub fn default_floor() -> Rational {
    Rational::new(BigInt::one(), BigInt::from(1_000_000u64))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdversaryError {
    #[error("weight LP is infeasible: the annotations contradict each other")]
    Infeasible,
    #[error("malformed scenario forest: {0}")]
    InvalidForest(String),
    #[error("shape has {n} vertices, this method accepts at most {cap}")]
    ShapeTooLarge { n: usize, cap: usize },
    #[error("unknown shape `{0}` (expected cycle7|cycle:<n>|tree-enum:<n>|edge)")]
    BadShape(String),
    #[error("no tie-free weights found for shape {0}")]
    TieLocked(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// A graph without weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphShape {
    pub name: String,
    pub vertex_count: usize,
    pub edges: Vec<(usize, usize)>,
}

impl GraphShape {
    pub fn new(name: impl Into<String>, vertex_count: usize, edges: Vec<(usize, usize)>) -> Self {
        GraphShape {
            name: name.into(),
            vertex_count,
            edges,
        }
    }

    pub fn cycle(n: usize) -> Self {
        GraphShape::new(format!("cycle:{n}"), n, cycle_edges(n))
    }

    pub fn edge() -> Self {
        GraphShape::new("edge", 2, vec![(0, 1)])
    }

    pub fn with_weights(&self, weights: Vec<u64>) -> Result<Instance, InstanceError> {
        Instance::new(weights, self.edges.clone())
    }
}

/// Parses `cycle7`, `cycle:<n>`, `tree-enum:<n>` (every tree on n vertices) or `edge`.
pub fn parse_shapes(text: &str) -> Result<Vec<GraphShape>, AdversaryError> {
    let bad = || AdversaryError::BadShape(text.to_string());
    let count = |s: &str| s.parse::<usize>().ok().filter(|&n| n >= 1).ok_or_else(bad);
    if text == "cycle7" {
        return Ok(vec![GraphShape::cycle(7)]);
    }
    if text == "edge" {
        return Ok(vec![GraphShape::edge()]);
    }
    if let Some(n) = text.strip_prefix("cycle:") {
        return Ok(vec![GraphShape::cycle(count(n)?)]);
    }
    if let Some(n) = text.strip_prefix("tree-enum:") {
        let n = count(n)?;
        if n > ALTERNATE_VERTEX_CAP.max(HILL_VERTEX_CAP) {
            return Err(AdversaryError::ShapeTooLarge {
                n,
                cap: HILL_VERTEX_CAP,
            });
        }
        return Ok(enumerate_trees(n)
            .into_iter()
            .enumerate()
            .map(|(i, edges)| GraphShape::new(format!("tree:{n}#{i}"), n, edges))
            .collect());
    }
    Err(bad())
}

/// A node of an annotated scenario forest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForestNode {
    pub state: GameState,
    /// Player to move; `None` at terminal states.
    pub mover: Option<Player>,
    /// Totals were equal and the tie policy picked the mover.
    pub tie: bool,
    /// `(vertex taken, child node index)`.
    pub children: Vec<(usize, usize)>,
}

/// Per-opening game trees in which Second's replies are fixed and First
/// branches on every legal move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioForest {
    pub vertex_count: usize,
    pub policy: TiePolicy,
    pub nodes: Vec<ForestNode>,
    /// `roots[a]` is the node after First opens at `a`.
    pub roots: Vec<usize>,
}

impl ScenarioForest {
    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.children.is_empty()).count()
    }

    /// Second's fixed replies; two forests with equal replies carry equal annotations.
    pub fn second_replies(&self) -> BTreeSet<(u64, u64, usize)> {
        self.nodes
            .iter()
            .filter(|n| n.mover == Some(Player::Second))
            .flat_map(|n| {
                n.children
                    .iter()
                    .map(move |&(v, _)| (n.state.first.0, n.state.second.0, v))
            })
            .collect()
    }

    /// Checks the structure against the graph of `instance` (weights are ignored).
    pub fn validate(&self, instance: &Instance) -> Result<(), AdversaryError> {
        let fail = |msg: String| Err(AdversaryError::InvalidForest(msg));
        if instance.vertex_count() != self.vertex_count {
            return fail("vertex count differs from the instance".into());
        }
        for (a, &root) in self.roots.iter().enumerate() {
            if self.nodes.get(root).map(|n| n.state) != Some(GameState::opening(a)) {
                return fail(format!("root {a} is not the opening at {a}"));
            }
        }
        for (i, node) in self.nodes.iter().enumerate() {
            if !node.state.is_valid_for(instance) {
                return fail(format!("node {i} holds an invalid state"));
            }
            if node.children.is_empty() {
                if !node.state.is_terminal(instance) || node.mover.is_some() {
                    return fail(format!("leaf {i} is not a terminal state"));
                }
                continue;
            }
            let Some(who) = node.mover else {
                return fail(format!("inner node {i} has no mover"));
            };
            let legal = legal_moves(instance, &node.state);
            let moves: VertexSet = node.children.iter().map(|&(v, _)| v).collect();
            match who {
                Player::Second if node.children.len() != 1 => {
                    return fail(format!("Second node {i} must have exactly one child"))
                }
                Player::First if moves != legal || node.children.len() != legal.len() => {
                    return fail(format!("First node {i} must branch on every legal move"))
                }
                _ => {}
            }
            for &(v, child) in &node.children {
                let mut expected = node.state;
                match who {
                    Player::First => expected.first.insert(v),
                    Player::Second => expected.second.insert(v),
                }
                if !legal.contains(v) || self.nodes.get(child).map(|c| c.state) != Some(expected) {
                    return fail(format!("edge {i} -> {child} is not the move {v}"));
                }
            }
        }
        Ok(())
    }
}

/// Fixes Second's canonical optimal replies and branches on all First moves.
pub fn extract_forest(instance: &Instance, policy: TiePolicy) -> Result<ScenarioForest, SolveError> {
    let mut search = Search::new(instance, policy)?;
    let mut nodes = Vec::new();
    let mut roots = Vec::with_capacity(instance.vertex_count());
    for a in instance.all_vertices() {
        roots.push(grow(&mut search, &mut nodes, GameState::opening(a))?);
    }
    Ok(ScenarioForest {
        vertex_count: instance.vertex_count(),
        policy,
        nodes,
        roots,
    })
}

fn grow(
    search: &mut Search<'_>,
    nodes: &mut Vec<ForestNode>,
    state: GameState,
) -> Result<usize, SolveError> {
    let instance = search.instance();
    let idx = nodes.len();
    if state.is_terminal(instance) {
        nodes.push(ForestNode {
            state,
            mover: None,
            tie: false,
            children: Vec::new(),
        });
        return Ok(idx);
    }
    let who = mover(instance, &state, search.policy())?;
    let (f, s) = state.totals(instance);
    nodes.push(ForestNode {
        state,
        mover: Some(who),
        tie: f == s,
        children: Vec::new(),
    });
    let moves: Vec<usize> = match who {
        Player::First => legal_moves(instance, &state).iter().collect(),
        Player::Second => vec![search.best_move(&state)?.expect("non-terminal").1],
    };
    let mut children = Vec::with_capacity(moves.len());
    for v in moves {
        let mut next = state;
        match who {
            Player::First => next.first.insert(v),
            Player::Second => next.second.insert(v),
        }
        children.push((v, grow(search, nodes, next)?));
    }
    nodes[idx].children = children;
    Ok(idx)
}

/// Optimal weights and bound of the weight LP.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    /// Normalized weights (summing to one).
    pub weights: Vec<Rational>,
    /// Least upper bound on every First leaf share.
    pub t: Rational,
    /// Distinct inequality rows after deduplication.
    pub constraint_count: usize,
}

/// One inequality `Σ_{plus} u - Σ_{minus} u - [uses_t] t <= rhs` over `u = w - floor`.
struct Row {
    plus: VertexSet,
    minus: VertexSet,
    uses_t: bool,
    rhs: Rational,
}

fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn weight_rows(forest: &ScenarioForest, floor: &Rational, margin: &Rational) -> Vec<Row> {
    let (first_margin, second_margin) = match forest.policy {
        TiePolicy::ForbidTies => (margin.clone(), margin.clone()),
        TiePolicy::FirstMoves => (Rational::zero(), margin.clone()),
        TiePolicy::SecondMoves => (margin.clone(), Rational::zero()),
    };
    let mut seen = HashSet::new();
    let mut rows = Vec::new();
    for node in &forest.nodes {
        let (fs, ss) = (node.state.first, node.state.second);
        let size_gap = fs.len() as i64 - ss.len() as i64;
        let row = match node.mover {
            None => {
                if !seen.insert((0u8, fs.0, 0u64)) {
                    continue;
                }
                Row {
                    plus: fs,
                    minus: VertexSet::EMPTY,
                    uses_t: true,
                    rhs: -(floor * int(fs.len() as i64)),
                }
            }
            // First moves: w(F) + margin <= w(S)
            Some(Player::First) => {
                if !seen.insert((1, fs.0, ss.0)) {
                    continue;
                }
                Row {
                    plus: fs,
                    minus: ss,
                    uses_t: false,
                    rhs: -(&first_margin) - floor * int(size_gap),
                }
            }
            Some(Player::Second) => {
                if !seen.insert((2, fs.0, ss.0)) {
                    continue;
                }
                Row {
                    plus: ss,
                    minus: fs,
                    uses_t: false,
                    rhs: -(&second_margin) + floor * int(size_gap),
                }
            }
        };
        rows.push(row);
    }
    rows
}

/// Minimizes the largest First leaf share over weights consistent with the
/// forest's mover annotations.
///
/// Variables are `u_v = w_v - floor >= 0` and `t >= 0`. The LP is solved
/// through its dual, whose origin is feasible because the only positive cost
/// is on `t`.
pub fn lp_minimize(
    forest: &ScenarioForest,
    epsilon_floor: &Rational,
    margin: &Rational,
) -> Result<LpSolution, AdversaryError> {
    let n = forest.vertex_count;
    if !epsilon_floor.is_positive() || margin.is_negative() {
        return Err(AdversaryError::InvalidForest(
            "floor must be positive and margin non-negative".into(),
        ));
    }
    let budget = int(1) - epsilon_floor * int(n as i64);
    if budget.is_negative() {
        return Err(AdversaryError::Infeasible);
    }
    let rows = weight_rows(forest, epsilon_floor, margin);
    let m = rows.len();

    // Dual: maximize -b·y + r z+ - r z-  s.t.  -A^T y + E^T (z+ - z-) <= cost.
    let vars = n + 1;
    let mut h = vec![vec![Rational::zero(); m + 2]; vars];
    for (k, row) in rows.iter().enumerate() {
        for v in row.plus {
            h[v][k] = int(-1);
        }
        for v in row.minus {
            h[v][k] = int(1);
        }
        if row.uses_t {
            h[n][k] = int(1);
        }
    }
    for hv in h.iter_mut().take(n) {
        hv[m] = int(1);
        hv[m + 1] = int(-1);
    }
    let mut cost = vec![Rational::zero(); vars];
    cost[n] = int(1);
    let mut gain: Vec<Rational> = rows.iter().map(|r| -r.rhs.clone()).collect();
    gain.push(budget.clone());
    gain.push(-budget.clone());

    let SimplexOutcome::Optimal {
        duals, objective, ..
    } = maximize(&h, &cost, &gain)
    else {
        return Err(AdversaryError::Infeasible);
    };
    let t = duals[n].clone();
    debug_assert_eq!(t, objective);
    let u = &duals[..n];

    // exact feasibility check of the recovered primal point
    let sum_over = |set: VertexSet| set.iter().map(|v| u[v].clone()).sum::<Rational>();
    let feasible = u.iter().all(|x| !x.is_negative())
        && u.iter().cloned().sum::<Rational>() == budget
        && rows.iter().all(|r| {
            let mut lhs = sum_over(r.plus) - sum_over(r.minus);
            if r.uses_t {
                lhs -= &t;
            }
            lhs <= r.rhs
        });
    assert!(feasible, "simplex returned an infeasible primal point");

    Ok(LpSolution {
        weights: u.iter().map(|x| x + epsilon_floor).collect(),
        t,
        constraint_count: m,
    })
}

/// Turns normalized rational weights into positive integers.
///
/// Exact scaling by the common denominator when that stays within
/// [`INTEGER_SCALE`]; otherwise rounding onto `INTEGER_SCALE` units. With a
/// jitter source every weight also gets a random offset below [`JITTER`].
pub fn integer_weights(weights: &[Rational], jitter: Option<&mut ChaCha8Rng>) -> Vec<u64> {
    let scale = BigInt::from(INTEGER_SCALE);
    let lcm = weights
        .iter()
        .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
    let mut out: Vec<u64> = if jitter.is_none() && lcm <= scale {
        weights
            .iter()
            .map(|w| (w.numer() * (&lcm / w.denom())).to_u64().expect("fits"))
            .collect()
    } else {
        weights
            .iter()
            .map(|w| {
                let x = (w * Rational::from_integer(scale.clone())).round();
                x.to_integer().to_u64().unwrap_or(INTEGER_SCALE).max(1)
            })
            .collect()
    };
    if let Some(rng) = jitter {
        for w in &mut out {
            *w += rng.gen_range(0..JITTER);
        }
    }
    out
}

/// Exactly solves `shape` with integer versions of `weights`, re-drawing the
/// jitter when `ForbidTies` play reaches a tie.
fn certify(
    shape: &GraphShape,
    weights: &[Rational],
    policy: TiePolicy,
    rng: &mut ChaCha8Rng,
) -> Result<(Instance, SolveReport), AdversaryError> {
    for _ in 0..TIE_RETRIES {
        let ints = match policy {
            TiePolicy::ForbidTies => integer_weights(weights, Some(rng)),
            _ => integer_weights(weights, None),
        };
        let instance = shape.with_weights(ints)?;
        match solve(&instance, policy) {
            Ok(report) => return Ok((instance, report)),
            Err(err) if err.is_tie() => continue,
            Err(err) => return Err(err.into()),
        }
    }
    Err(AdversaryError::TieLocked(shape.name.clone()))
}

/// Draws `samples` random weightings and keeps the lowest certified value.
/// Draws whose play ties under `ForbidTies` are skipped.
fn screened_start(
    shape: &GraphShape,
    policy: TiePolicy,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Instance, Fraction), AdversaryError> {
    let mut best: Option<(Instance, Fraction)> = None;
    let mut draws = 0;
    while draws < samples.max(1) || (best.is_none() && draws < samples.max(1) + TIE_RETRIES) {
        draws += 1;
        let instance = shape.with_weights(random_weights(shape.vertex_count, rng))?;
        match solve(&instance, policy) {
            Ok(report) => {
                if best.as_ref().is_none_or(|(_, b)| report.value < *b) {
                    best = Some((instance, report.value));
                }
            }
            Err(err) if err.is_tie() => {}
            Err(err) => return Err(err.into()),
        }
    }
    best.ok_or_else(|| AdversaryError::TieLocked(shape.name.clone()))
}

/// Random starting weights from a mixture: uniform, log-uniform, or two-scale
/// (a few heavy vertices, near-equal or spread, over light ones).
fn random_weights(n: usize, rng: &mut ChaCha8Rng) -> Vec<u64> {
    match rng.gen_range(0..6) {
        0 => (0..n).map(|_| rng.gen_range(1..=1_000_000)).collect(),
        1 => (0..n)
            .map(|_| 10f64.powf(rng.gen_range(0.0..6.0)).round().max(1.0) as u64)
            .collect(),
        style => {
            let heavy = rng.gen_range(1..=n.div_ceil(2));
            let light_max: u64 = rng.gen_range(10..=1_000);
            let base = rng.gen_range(100_000..=1_000_000);
            let mut weights: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=light_max)).collect();
            for w in weights.iter_mut().take(heavy) {
                *w = if style >= 3 {
                    base + rng.gen_range(0..=light_max * 3 / 2)
                } else {
                    rng.gen_range(100_000..=1_000_000)
                };
            }
            for i in (1..n).rev() {
                weights.swap(i, rng.gen_range(0..=i));
            }
            weights
        }
    }
}

fn to_f64(x: &Fraction) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct AltConfig {
    pub max_iters: usize,
    pub epsilon_floor: Rational,
    pub margin: Rational,
    pub seed: u64,
    /// Independent restarts tried in turn.
    pub restarts: usize,
    /// Random weightings screened by exact value to pick each restart's start.
    pub screen: usize,
}

impl Default for AltConfig {
    fn default() -> Self {
        AltConfig {
            max_iters: 30,
            epsilon_floor: default_floor(),
            margin: default_margin(),
            seed: 0,
            restarts: 4,
            screen: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    MaxIters,
    NoImprovement,
    RepeatedAnnotations,
    Infeasible,
    TieLocked,
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StopReason::MaxIters => "max-iters",
            StopReason::NoImprovement => "no-improvement",
            StopReason::RepeatedAnnotations => "repeated-annotations",
            StopReason::Infeasible => "infeasible",
            StopReason::TieLocked => "tie-locked",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub restart: usize,
    pub iter: usize,
    /// Exact value of the instance produced at this step.
    pub value: Fraction,
    /// Best certified value so far, over all restarts.
    pub best: Fraction,
    /// LP bound that produced the next weights, if the LP was solved.
    pub lp_bound: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub instance: Instance,
    /// Exact solver value of `instance`.
    pub value: Fraction,
    pub trace: Vec<TraceEntry>,
    pub stops: Vec<StopReason>,
}

/// Alternates exact solving with LP re-weighting from several random starts
/// and returns the best certified instance. Local search: no global guarantee.
pub fn alternate_optimize(
    shape: &GraphShape,
    policy: TiePolicy,
    config: &AltConfig,
) -> Result<SearchOutcome, AdversaryError> {
    let n = shape.vertex_count;
    if n > ALTERNATE_VERTEX_CAP {
        return Err(AdversaryError::ShapeTooLarge {
            n,
            cap: ALTERNATE_VERTEX_CAP,
        });
    }
    let mut best: Option<(Instance, Fraction)> = None;
    let mut trace = Vec::new();
    let mut stops = Vec::new();

    for restart in 0..config.restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(
            config.seed ^ (restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
        );
        let (mut instance, mut value) =
            screened_start(shape, policy, config.screen, &mut rng)?;
        if best.as_ref().is_none_or(|(_, b)| value < *b) {
            best = Some((instance.clone(), value));
        }
        let mut seen = HashSet::new();
        let mut reason = StopReason::MaxIters;
        for iter in 0..config.max_iters.max(1) {
            if n == 1 {
                reason = StopReason::NoImprovement;
                break;
            }
            let forest = extract_forest(&instance, policy)?;
            if !seen.insert(forest.second_replies()) {
                reason = StopReason::RepeatedAnnotations;
                break;
            }
            let lp = match lp_minimize(&forest, &config.epsilon_floor, &config.margin) {
                Ok(lp) => lp,
                Err(AdversaryError::Infeasible) => {
                    reason = StopReason::Infeasible;
                    break;
                }
                Err(err) => return Err(err),
            };
            let (next, report) = match certify(shape, &lp.weights, policy, &mut rng) {
                Ok(found) => found,
                Err(AdversaryError::TieLocked(_)) => {
                    reason = StopReason::TieLocked;
                    break;
                }
                Err(err) => return Err(err),
            };
            let improved = to_f64(&value) - to_f64(&report.value) > IMPROVEMENT_EPS;
            if improved {
                instance = next;
                value = report.value;
                if best.as_ref().is_none_or(|(_, b)| value < *b) {
                    best = Some((instance.clone(), value));
                }
            }
            trace.push(TraceEntry {
                restart,
                iter,
                value: report.value,
                best: best.as_ref().map(|(_, b)| *b).expect("set"),
                lp_bound: Some(lp.t),
            });
            if !improved {
                reason = StopReason::NoImprovement;
                break;
            }
        }
        stops.push(reason);
    }
    let (instance, value) = best.expect("at least one restart");
    Ok(SearchOutcome {
        instance,
        value,
        trace,
        stops,
    })
}

/// Seeded derivative-free local search over integer weights.
///
/// The first quarter of the budget screens
/// random weightings for a start; the rest proposes single-coordinate changes
/// and keeps one only when the exact value strictly decreases.
pub fn hill_climb(
    shape: &GraphShape,
    policy: TiePolicy,
    seed: u64,
    iters: usize,
) -> Result<SearchOutcome, AdversaryError> {
    let n = shape.vertex_count;
    if n > HILL_VERTEX_CAP {
        return Err(AdversaryError::ShapeTooLarge {
            n,
            cap: HILL_VERTEX_CAP,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let screen = (iters / 4).max(1);
    let (mut instance, mut value) = screened_start(shape, policy, screen, &mut rng)?;
    let mut trace = vec![TraceEntry {
        restart: 0,
        iter: 0,
        value,
        best: value,
        lp_bound: None,
    }];
    if n == 1 {
        return Ok(SearchOutcome {
            instance,
            value,
            trace,
            stops: vec![StopReason::NoImprovement],
        });
    }
    const CAP: u64 = 1 << 40;
    for iter in screen + 1..=iters.max(screen) {
        let v = rng.gen_range(0..n);
        let mut weights = instance.weights().to_vec();
        let old = weights[v];
        let proposal = match rng.gen_range(0..8) {
            // fresh value on either scale
            0 => rng.gen_range(1..=CAP.min(instance.total_weight())),
            1 => rng.gen_range(1..=instance.weights().iter().copied().min().unwrap_or(1) * 2),
            // near copy of another vertex
            2 => {
                let u = rng.gen_range(0..n);
                let step = (weights[u] / 1_000).max(2);
                weights[u] + rng.gen_range(0..step) - step / 2
            }
            // small additive step
            3 => {
                let step = rng.gen_range(1..=old.max(2) / 2 + 1);
                if rng.gen_bool(0.5) {
                    old.saturating_add(step)
                } else {
                    old.saturating_sub(step)
                }
            }
            k => {
                let spread: f64 = [0.01, 0.1, 0.5, 2.0][k % 4];
                (old as f64 * rng.gen_range(-spread..=spread).exp()).round() as u64
            }
        };
        weights[v] = proposal.clamp(1, CAP);
        if weights[v] == old {
            continue;
        }
        let Ok(candidate) = shape.with_weights(weights) else {
            continue;
        };
        match solve(&candidate, policy) {
            Ok(r) if r.value < value => {
                instance = candidate;
                value = r.value;
                trace.push(TraceEntry {
                    restart: 0,
                    iter,
                    value,
                    best: value,
                    lp_bound: None,
                });
            }
            Ok(_) => {}
            Err(err) if err.is_tie() => {}
            Err(err) => return Err(err.into()),
        }
    }
    Ok(SearchOutcome {
        instance,
        value,
        trace,
        stops: vec![StopReason::MaxIters],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Alternate,
    HillClimb,
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "alt" => Ok(Method::Alternate),
            "hill" => Ok(Method::HillClimb),
            other => Err(format!("unknown method `{other}` (expected alt|hill)")),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Alternate => "alt",
            Method::HillClimb => "hill",
        })
    }
}

/// Best result over a list of shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeSearch {
    pub shape: String,
    pub outcome: SearchOutcome,
    pub shapes_searched: usize,
}

impl ShapeSearch {
    /// Instance text followed by a `key=value` result block.
    pub fn render(&self, method: Method, policy: TiePolicy, seed: u64) -> String {
        let mut out = format_instance(&self.outcome.instance);
        let _ = writeln!(out, "shape={}", self.shape);
        let _ = writeln!(out, "method={method}");
        let _ = writeln!(out, "policy={policy}");
        let _ = writeln!(out, "seed={seed}");
        let _ = writeln!(out, "shapes_searched={}", self.shapes_searched);
        let _ = writeln!(out, "value={}", format_fraction(&self.outcome.value));
        let _ = writeln!(out, "value_approx={:.9}", to_f64(&self.outcome.value));
        let stops: Vec<String> = self.outcome.stops.iter().map(|s| s.to_string()).collect();
        let _ = writeln!(out, "stops={}", stops.join(","));
        out
    }
}

/// Runs `method` on every shape and keeps the lowest certified value (first
/// shape wins ties).
pub fn search_shapes(
    shapes: &[GraphShape],
    policy: TiePolicy,
    method: Method,
    seed: u64,
    iters: usize,
) -> Result<ShapeSearch, AdversaryError> {
    let mut best: Option<ShapeSearch> = None;
    for (i, shape) in shapes.iter().enumerate() {
        let shape_seed = seed.wrapping_add(i as u64);
        let outcome = match method {
            Method::Alternate => alternate_optimize(
                shape,
                policy,
                &AltConfig {
                    max_iters: iters,
                    seed: shape_seed,
                    ..AltConfig::default()
                },
            ),
            Method::HillClimb => hill_climb(shape, policy, shape_seed, iters),
        };
        let outcome = match outcome {
            Ok(o) => o,
            Err(AdversaryError::TieLocked(_)) => continue,
            Err(err) => return Err(err),
        };
        if best.as_ref().is_none_or(|b| outcome.value < b.outcome.value) {
            best = Some(ShapeSearch {
                shape: shape.name.clone(),
                outcome,
                shapes_searched: 0,
            });
        }
    }
    let mut best = best.ok_or_else(|| AdversaryError::TieLocked("every shape".into()))?;
    best.shapes_searched = shapes.len();
    Ok(best)
}

#[cfg(test)]
mod tests;
