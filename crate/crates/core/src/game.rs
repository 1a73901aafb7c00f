//! Instances, states, the weight-driven turn rule and a referee loop.
//!
//! Weights are positive integers. A player's share of an instance is the
//! exact fraction `collected / total_weight`; no floating point is used
//! anywhere in game logic.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use thiserror::Error;

/// Exact share of the total weight.
pub type Fraction = Ratio<u64>;

/// Largest supported vertex count (vertex sets are single machine words).
pub const MAX_VERTICES: usize = 64;

/// Renders a fraction as `p/q` in lowest terms, including `1/1`.
pub fn format_fraction(value: &Fraction) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Parses `p/q` (or a bare integer) into a reduced fraction.
pub fn parse_fraction(text: &str) -> Option<Fraction> {
    let (numer, denom) = match text.split_once('/') {
        Some((p, q)) => (p.trim().parse().ok()?, q.trim().parse().ok()?),
        None => (text.trim().parse().ok()?, 1),
    };
    if denom == 0 {
        return None;
    }
    Some(Fraction::new(numer, denom))
}

/// A set of vertex ids in `0..64`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(pub u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        if n >= 64 {
            VertexSet(u64::MAX)
        } else {
            VertexSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(v: usize) -> Self {
        VertexSet(1u64 << v)
    }

    pub fn contains(self, v: usize) -> bool {
        v < 64 && self.0 >> v & 1 == 1
    }

    #[must_use]
    pub fn with(self, v: usize) -> Self {
        VertexSet(self.0 | 1u64 << v)
    }

    pub fn insert(&mut self, v: usize) {
        self.0 |= 1u64 << v;
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        VertexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        VertexSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        VertexSet(self.0 & !other.0)
    }

    /// Ascending iterator over members.
    pub fn iter(self) -> VertexIter {
        VertexIter(self.0)
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut set = VertexSet::EMPTY;
        for v in iter {
            set.insert(v);
        }
        set
    }
}

impl IntoIterator for VertexSet {
    type Item = usize;
    type IntoIter = VertexIter;

    fn into_iter(self) -> VertexIter {
        self.iter()
    }
}

pub struct VertexIter(u64);

impl Iterator for VertexIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let v = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(v)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for VertexIter {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("instance has no vertices")]
    Empty,
    #[error("instance has {0} vertices, at most {MAX_VERTICES} are supported")]
    TooManyVertices(usize),
    #[error("vertex {vertex} has non-positive weight")]
    NonPositiveWeight { vertex: usize },
    #[error("edge {u}-{v} references a vertex outside 0..{n}")]
    VertexOutOfRange { u: usize, v: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {u}-{v}")]
    DuplicateEdge { u: usize, v: usize },
    #[error("graph is not connected")]
    Disconnected,
    #[error("total weight overflows 64 bits")]
    WeightOverflow,
}

/// A connected vertex-weighted graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    weights: Vec<u64>,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<VertexSet>,
    total_weight: u64,
}

impl Instance {
    /// Validates and builds an instance. Edges are kept in input order.
    pub fn new(weights: Vec<u64>, edges: Vec<(usize, usize)>) -> Result<Self, InstanceError> {
        let n = weights.len();
        if n == 0 {
            return Err(InstanceError::Empty);
        }
        if n > MAX_VERTICES {
            return Err(InstanceError::TooManyVertices(n));
        }
        if let Some(vertex) = weights.iter().position(|&w| w == 0) {
            return Err(InstanceError::NonPositiveWeight { vertex });
        }
        let total_weight = weights
            .iter()
            .try_fold(0u64, |acc, &w| acc.checked_add(w))
            .ok_or(InstanceError::WeightOverflow)?;

        let mut adjacency = vec![VertexSet::EMPTY; n];
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(InstanceError::VertexOutOfRange { u, v, n });
            }
            if u == v {
                return Err(InstanceError::SelfLoop(u));
            }
            if adjacency[u].contains(v) {
                return Err(InstanceError::DuplicateEdge { u, v });
            }
            adjacency[u].insert(v);
            adjacency[v].insert(u);
        }

        let instance = Instance {
            weights,
            edges,
            adjacency,
            total_weight,
        };
        if instance.reach(VertexSet::singleton(0), VertexSet::full(n)) != VertexSet::full(n) {
            return Err(InstanceError::Disconnected);
        }
        Ok(instance)
    }

    pub fn vertex_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn weight(&self, v: usize) -> u64 {
        self.weights[v]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> VertexSet {
        self.adjacency[v]
    }

    pub fn total_weight(&self) -> u64 {
        self.total_weight
    }

    pub fn max_weight(&self) -> u64 {
        self.weights.iter().copied().max().unwrap_or(0)
    }

    pub fn all_vertices(&self) -> VertexSet {
        VertexSet::full(self.vertex_count())
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.vertex_count()
    }

    pub fn set_weight(&self, set: VertexSet) -> u64 {
        set.iter().map(|v| self.weights[v]).sum()
    }

    /// Vertices outside `set` adjacent to some member of `set`.
    pub fn frontier(&self, set: VertexSet) -> VertexSet {
        let mut out = VertexSet::EMPTY;
        for v in set {
            out = out.union(self.adjacency[v]);
        }
        out.difference(set)
    }

    /// Whether the subgraph induced on `set` is connected (empty counts as connected).
    pub fn is_connected_subset(&self, set: VertexSet) -> bool {
        match set.iter().next() {
            None => true,
            Some(v) => self.reach(VertexSet::singleton(v), set) == set,
        }
    }

    /// Same graph with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: u64) -> Result<Self, InstanceError> {
        let weights = self
            .weights
            .iter()
            .map(|&w| w.checked_mul(factor).ok_or(InstanceError::WeightOverflow))
            .collect::<Result<Vec<_>, _>>()?;
        Instance::new(weights, self.edges.clone())
    }

    /// Same graph with new weights.
    pub fn with_weights(&self, weights: Vec<u64>) -> Result<Self, InstanceError> {
        Instance::new(weights, self.edges.clone())
    }

    fn reach(&self, seed: VertexSet, within: VertexSet) -> VertexSet {
        let mut seen = seed;
        loop {
            let next = seen.union(self.frontier(seen).intersection(within));
            if next == seen {
                return seen;
            }
            seen = next;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    First,
    Second,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::First => Player::Second,
            Player::Second => Player::First,
        }
    }

    /// One-letter tag used in move-line serializations.
    pub fn tag(self) -> char {
        match self {
            Player::First => 'F',
            Player::Second => 'S',
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::First => "first",
            Player::Second => "second",
        })
    }
}

impl FromStr for Player {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "first" | "1" | "F" => Ok(Player::First),
            "second" | "2" | "S" => Ok(Player::Second),
            other => Err(format!("unknown player `{other}` (expected first|second)")),
        }
    }
}

/// Who moves when both collected totals are equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TiePolicy {
    /// Equal totals abort play with [`GameError::TieEncountered`].
    ForbidTies,
    FirstMoves,
    SecondMoves,
}

impl TiePolicy {
    pub const ALL: [TiePolicy; 3] = [
        TiePolicy::ForbidTies,
        TiePolicy::FirstMoves,
        TiePolicy::SecondMoves,
    ];
}

impl fmt::Display for TiePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TiePolicy::ForbidTies => "forbid",
            TiePolicy::FirstMoves => "first",
            TiePolicy::SecondMoves => "second",
        })
    }
}

impl FromStr for TiePolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "forbid" => Ok(TiePolicy::ForbidTies),
            "first" => Ok(TiePolicy::FirstMoves),
            "second" => Ok(TiePolicy::SecondMoves),
            other => Err(format!(
                "unknown tie policy `{other}` (expected forbid|first|second)"
            )),
        }
    }
}

/// Partition of the taken vertices between the two players.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct GameState {
    pub first: VertexSet,
    pub second: VertexSet,
}

impl GameState {
    pub fn new(first: VertexSet, second: VertexSet) -> Self {
        GameState { first, second }
    }

    pub fn opening(start: usize) -> Self {
        GameState::new(VertexSet::singleton(start), VertexSet::EMPTY)
    }

    pub fn taken(&self) -> VertexSet {
        self.first.union(self.second)
    }

    pub fn is_terminal(&self, instance: &Instance) -> bool {
        self.taken() == instance.all_vertices()
    }

    pub fn set_of(&self, player: Player) -> VertexSet {
        match player {
            Player::First => self.first,
            Player::Second => self.second,
        }
    }

    /// `(f, s)`: collected weights of First and Second.
    pub fn totals(&self, instance: &Instance) -> (u64, u64) {
        (instance.set_weight(self.first), instance.set_weight(self.second))
    }

    /// Checks the state invariants against `instance`.
    pub fn is_valid_for(&self, instance: &Instance) -> bool {
        let all = instance.all_vertices();
        self.first.intersection(self.second).is_empty()
            && self.taken().difference(all).is_empty()
            && (self.taken().is_empty() || !self.first.is_empty())
            && instance.is_connected_subset(self.taken())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("tie encountered: both players hold weight {weight} at state {state:?}")]
    TieEncountered { state: GameState, weight: u64 },
    #[error("illegal move: vertex {vertex}{}", step.map(|s| format!(" at step {s}")).unwrap_or_default())]
    IllegalMove { vertex: usize, step: Option<usize> },
    #[error("game is over, no player is to move")]
    GameOver,
}

/// Non-taken vertices a player may take next.
pub fn legal_moves(instance: &Instance, state: &GameState) -> VertexSet {
    let taken = state.taken();
    if taken.is_empty() {
        instance.all_vertices()
    } else {
        instance.frontier(taken)
    }
}

/// The turn rule applied to collected totals `f` and `s` of a non-empty state.
pub fn mover_for_totals(f: u64, s: u64, policy: TiePolicy) -> Option<Player> {
    use std::cmp::Ordering::*;
    match f.cmp(&s) {
        Less => Some(Player::First),
        Greater => Some(Player::Second),
        Equal => match policy {
            TiePolicy::ForbidTies => None,
            TiePolicy::FirstMoves => Some(Player::First),
            TiePolicy::SecondMoves => Some(Player::Second),
        },
    }
}

/// The player to move at a non-terminal state.
pub fn mover(instance: &Instance, state: &GameState, policy: TiePolicy) -> Result<Player, GameError> {
    if state.taken().is_empty() {
        return Ok(Player::First);
    }
    if state.is_terminal(instance) {
        return Err(GameError::GameOver);
    }
    let (f, s) = state.totals(instance);
    mover_for_totals(f, s, policy).ok_or(GameError::TieEncountered {
        state: *state,
        weight: f,
    })
}

/// Hands `vertex` to the player to move.
pub fn apply(
    instance: &Instance,
    state: &GameState,
    policy: TiePolicy,
    vertex: usize,
) -> Result<GameState, GameError> {
    if !legal_moves(instance, state).contains(vertex) {
        return Err(GameError::IllegalMove { vertex, step: None });
    }
    let mut next = *state;
    match mover(instance, state, policy)? {
        Player::First => next.first.insert(vertex),
        Player::Second => next.second.insert(vertex),
    }
    Ok(next)
}

/// Anything able to pick a move for the player to move.
pub trait Strategy {
    fn choose(&mut self, instance: &Instance, state: &GameState, me: Player) -> usize;
}

impl<F> Strategy for F
where
    F: FnMut(&Instance, &GameState, Player) -> usize,
{
    fn choose(&mut self, instance: &Instance, state: &GameState, me: Player) -> usize {
        self(instance, state, me)
    }
}

/// Result of a completed game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub final_first_set: VertexSet,
    pub final_second_set: VertexSet,
    pub first_weight: u64,
    pub second_weight: u64,
    pub total_weight: u64,
    pub move_log: Vec<(Player, usize)>,
}

impl Outcome {
    pub fn first_value(&self) -> Fraction {
        Fraction::new(self.first_weight, self.total_weight)
    }

    pub fn second_value(&self) -> Fraction {
        Fraction::new(self.second_weight, self.total_weight)
    }
}

fn finish(instance: &Instance, state: GameState, move_log: Vec<(Player, usize)>) -> Outcome {
    let (f, s) = state.totals(instance);
    Outcome {
        final_first_set: state.first,
        final_second_set: state.second,
        first_weight: f,
        second_weight: s,
        total_weight: instance.total_weight(),
        move_log,
    }
}

/// Referee loop: asks the mover's strategy for a move until every vertex is taken.
pub fn play_out(
    instance: &Instance,
    policy: TiePolicy,
    first: &mut dyn Strategy,
    second: &mut dyn Strategy,
) -> Result<Outcome, GameError> {
    let mut state = GameState::default();
    let mut log = Vec::with_capacity(instance.vertex_count());
    while !state.is_terminal(instance) {
        let step = log.len();
        let who = mover(instance, &state, policy)?;
        let vertex = match who {
            Player::First => first.choose(instance, &state, who),
            Player::Second => second.choose(instance, &state, who),
        };
        state = apply(instance, &state, policy, vertex).map_err(|err| match err {
            GameError::IllegalMove { vertex, .. } => GameError::IllegalMove {
                vertex,
                step: Some(step),
            },
            other => other,
        })?;
        log.push((who, vertex));
    }
    Ok(finish(instance, state, log))
}

/// Replays a logged line from the empty state, checking every mover and move.
/// The line must be complete.
pub fn replay(
    instance: &Instance,
    policy: TiePolicy,
    line: &[(Player, usize)],
) -> Result<Outcome, GameError> {
    let mut state = GameState::default();
    for (step, &(who, vertex)) in line.iter().enumerate() {
        let expected = mover(instance, &state, policy)?;
        if expected != who {
            return Err(GameError::IllegalMove {
                vertex,
                step: Some(step),
            });
        }
        state = apply(instance, &state, policy, vertex).map_err(|_| GameError::IllegalMove {
            vertex,
            step: Some(step),
        })?;
    }
    if !state.is_terminal(instance) {
        return Err(GameError::IllegalMove {
            vertex: usize::MAX,
            step: Some(line.len()),
        });
    }
    Ok(finish(instance, state, line.to_vec()))
}

/// Renders a move line as `F3 S4 F2`.
pub fn format_line(line: &[(Player, usize)]) -> String {
    line.iter()
        .map(|(p, v)| format!("{}{}", p.tag(), v))
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    // a..g = 0..6
    fn cycle7() -> Instance {
        let m = 1000;
        Instance::new(
            vec![m, m + 15, 17, 7, 12, m + 26, 18],
            (0..7).map(|i| (i, (i + 1) % 7)).collect(),
        )
        .unwrap()
    }

    fn path3() -> Instance {
        Instance::new(vec![1, 1, 1], vec![(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn rejects_malformed_instances() {
        assert_eq!(Instance::new(vec![], vec![]), Err(InstanceError::Empty));
        assert_eq!(
            Instance::new(vec![1, 0], vec![(0, 1)]),
            Err(InstanceError::NonPositiveWeight { vertex: 1 })
        );
        assert_eq!(
            Instance::new(vec![3, 5], vec![(0, 0)]),
            Err(InstanceError::SelfLoop(0))
        );
        assert_eq!(
            Instance::new(vec![3, 5], vec![(0, 1), (1, 0)]),
            Err(InstanceError::DuplicateEdge { u: 1, v: 0 })
        );
        assert_eq!(
            Instance::new(vec![3, 5, 1], vec![(0, 1)]),
            Err(InstanceError::Disconnected)
        );
        assert!(matches!(
            Instance::new(vec![1, 1], vec![(0, 2)]),
            Err(InstanceError::VertexOutOfRange { .. })
        ));
        assert_eq!(
            Instance::new(vec![u64::MAX, 1], vec![(0, 1)]),
            Err(InstanceError::WeightOverflow)
        );
    }

    #[test]
    fn legal_moves_examples() {
        let c7 = cycle7();
        assert_eq!(legal_moves(&c7, &GameState::default()), VertexSet::full(7));
        let d = GameState::opening(3);
        assert_eq!(legal_moves(&c7, &d).iter().collect::<Vec<_>>(), vec![2, 4]);
        let p = path3();
        let st = GameState::new(VertexSet::singleton(0), VertexSet::singleton(1));
        assert_eq!(legal_moves(&p, &st), VertexSet::singleton(2));
        let done = GameState::new(VertexSet::full(3), VertexSet::EMPTY);
        assert!(legal_moves(&p, &done).is_empty());
    }

    #[test]
    fn mover_examples() {
        let inst = Instance::new(vec![5, 5, 1], vec![(0, 1), (1, 2)]).unwrap();
        let empty = GameState::default();
        for policy in TiePolicy::ALL {
            assert_eq!(mover(&inst, &empty, policy), Ok(Player::First));
            assert_eq!(mover(&inst, &GameState::opening(0), policy), Ok(Player::Second));
        }
        let tied = GameState::new(VertexSet::singleton(0), VertexSet::singleton(1));
        assert_eq!(mover(&inst, &tied, TiePolicy::FirstMoves), Ok(Player::First));
        assert_eq!(mover(&inst, &tied, TiePolicy::SecondMoves), Ok(Player::Second));
        assert_eq!(
            mover(&inst, &tied, TiePolicy::ForbidTies),
            Err(GameError::TieEncountered { state: tied, weight: 5 })
        );
    }

    #[test]
    fn apply_examples() {
        let c7 = cycle7();
        let d = GameState::opening(3);
        let next = apply(&c7, &d, TiePolicy::ForbidTies, 4).unwrap();
        assert_eq!(next, GameState::new(VertexSet::singleton(3), VertexSet::singleton(4)));
        assert_eq!(
            apply(&c7, &d, TiePolicy::ForbidTies, 0),
            Err(GameError::IllegalMove { vertex: 0, step: None })
        );
        assert_eq!(
            apply(&c7, &d, TiePolicy::ForbidTies, 3),
            Err(GameError::IllegalMove { vertex: 3, step: None })
        );
        let single = Instance::new(vec![1], vec![]).unwrap();
        assert_eq!(
            apply(&single, &GameState::default(), TiePolicy::ForbidTies, 0).unwrap(),
            GameState::opening(0)
        );
    }

    #[test]
    fn play_out_reports_offending_step() {
        let p = path3();
        let mut first = |_: &Instance, _: &GameState, _: Player| 0;
        let mut second = |_: &Instance, _: &GameState, _: Player| 2;
        let err = play_out(&p, TiePolicy::FirstMoves, &mut first, &mut second).unwrap_err();
        assert_eq!(err, GameError::IllegalMove { vertex: 2, step: Some(1) });
    }

    #[test]
    fn play_out_single_vertex() {
        let single = Instance::new(vec![1], vec![]).unwrap();
        let mut any = |_: &Instance, _: &GameState, _: Player| 0;
        let mut none = |_: &Instance, _: &GameState, _: Player| unreachable!();
        let out = play_out(&single, TiePolicy::ForbidTies, &mut any, &mut none).unwrap();
        assert_eq!(out.first_value(), Fraction::from_integer(1));
        assert_eq!(out.move_log, vec![(Player::First, 0)]);
    }

    #[test]
    fn replay_checks_movers() {
        let inst = Instance::new(vec![3, 5], vec![(0, 1)]).unwrap();
        let good = [(Player::First, 1), (Player::Second, 0)];
        let out = replay(&inst, TiePolicy::ForbidTies, &good).unwrap();
        assert_eq!(out.first_value(), Fraction::new(5, 8));
        let bad = [(Player::First, 1), (Player::First, 0)];
        assert!(replay(&inst, TiePolicy::ForbidTies, &bad).is_err());
        assert!(replay(&inst, TiePolicy::ForbidTies, &good[..1]).is_err());
    }

    #[test]
    fn fractions_render_in_lowest_terms() {
        assert_eq!(format_fraction(&Fraction::new(2, 4)), "1/2");
        assert_eq!(format_fraction(&Fraction::from_integer(1)), "1/1");
        assert_eq!(parse_fraction("6/8"), Some(Fraction::new(3, 4)));
        assert_eq!(parse_fraction("1/0"), None);
    }

    #[test]
    fn vertex_set_iteration_is_ascending() {
        let s: VertexSet = [5, 1, 63, 0].into_iter().collect();
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 1, 5, 63]);
        assert_eq!(s.len(), 4);
        assert_eq!(VertexSet::full(64).len(), 64);
    }
}
