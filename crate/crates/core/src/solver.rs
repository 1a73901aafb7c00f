//! Exact optimal play by memoized game-tree search.
//!
//! First maximizes its final collected weight, Second minimizes it (the game
//! is zero-sum over a fixed total). The memo key is the pair of taken sets;
//! the player to move is always re-derived from the weights and tie policy.
//! Among equally good moves both players pick the lowest vertex id.

use std::fmt::Write as _;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::game::{
    format_fraction, format_line, legal_moves, mover_for_totals, Fraction, GameError, GameState,
    Instance, Player, TiePolicy, VertexSet,
};

/// Hard cap on the vertex count accepted by [`solve`].
pub const SOLVE_VERTEX_CAP: usize = 18;
/// Above this many vertices the CLI warns that solving may be slow.
pub const SOLVE_WARN_VERTICES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("instance has {n} vertices, the exact solver accepts at most {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("state is not valid for this instance")]
    InvalidState,
    #[error("vertex {0} does not exist")]
    NoSuchVertex(usize),
    #[error("a response map needs at least two vertices")]
    TooSmall,
}

impl SolveError {
    pub fn is_tie(&self) -> bool {
        matches!(self, SolveError::Game(GameError::TieEncountered { .. }))
    }
}

/// A legal move and the final First weight it leads to.
pub type MoveValue = (usize, u64);

/// Memoized search over one instance and tie policy.
///
/// The memo lives as long as the `Search` value; nothing is shared between
/// separate `solve` calls.
pub struct Search<'a> {
    instance: &'a Instance,
    policy: TiePolicy,
    all: u64,
    memo: FxHashMap<(u64, u64), u64>,
}

impl<'a> Search<'a> {
    pub fn new(instance: &'a Instance, policy: TiePolicy) -> Result<Self, SolveError> {
        let n = instance.vertex_count();
        if n > SOLVE_VERTEX_CAP {
            return Err(SolveError::TooLarge {
                n,
                cap: SOLVE_VERTEX_CAP,
            });
        }
        Ok(Search {
            instance,
            policy,
            all: instance.all_vertices().0,
            memo: FxHashMap::default(),
        })
    }

    pub fn instance(&self) -> &Instance {
        self.instance
    }

    pub fn policy(&self) -> TiePolicy {
        self.policy
    }

    /// Number of memoized states so far.
    pub fn state_count(&self) -> usize {
        self.memo.len()
    }

    /// First's final collected weight under optimal play from `state`.
    pub fn final_first_weight(&mut self, state: &GameState) -> Result<u64, SolveError> {
        if !state.is_valid_for(self.instance) {
            return Err(SolveError::InvalidState);
        }
        if state.taken().is_empty() {
            let mut best = 0;
            for v in self.instance.all_vertices() {
                best = best.max(self.final_first_weight(&GameState::opening(v))?);
            }
            return Ok(best);
        }
        let (f, s) = state.totals(self.instance);
        Ok(self.eval(state.first.0, state.second.0, f, s)?)
    }

    fn eval(&mut self, first: u64, second: u64, f: u64, s: u64) -> Result<u64, GameError> {
        let taken = first | second;
        if taken == self.all {
            return Ok(f);
        }
        if let Some(&v) = self.memo.get(&(first, second)) {
            return Ok(v);
        }
        let who = self.who_moves(first, second, f, s)?;
        let frontier = self.instance.frontier(VertexSet(taken));
        let mut best = match who {
            Player::First => 0,
            Player::Second => u64::MAX,
        };
        for v in frontier {
            let w = self.instance.weight(v);
            let bit = 1u64 << v;
            let value = match who {
                Player::First => self.eval(first | bit, second, f + w, s)?,
                Player::Second => self.eval(first, second | bit, f, s + w)?,
            };
            best = match who {
                Player::First => best.max(value),
                Player::Second => best.min(value),
            };
        }
        self.memo.insert((first, second), best);
        Ok(best)
    }

    fn who_moves(&self, first: u64, second: u64, f: u64, s: u64) -> Result<Player, GameError> {
        mover_for_totals(f, s, self.policy).ok_or(GameError::TieEncountered {
            state: GameState::new(VertexSet(first), VertexSet(second)),
            weight: f,
        })
    }

    /// Every legal move at a non-terminal state with the final First weight it
    /// leads to, in ascending vertex order, plus the player to move.
    pub fn move_values(
        &mut self,
        state: &GameState,
    ) -> Result<Option<(Player, Vec<MoveValue>)>, SolveError> {
        if !state.is_valid_for(self.instance) {
            return Err(SolveError::InvalidState);
        }
        if state.is_terminal(self.instance) {
            return Ok(None);
        }
        let who = crate::game::mover(self.instance, state, self.policy)?;
        let mut out = Vec::new();
        for v in legal_moves(self.instance, state) {
            let mut next = *state;
            match who {
                Player::First => next.first.insert(v),
                Player::Second => next.second.insert(v),
            }
            out.push((v, self.final_first_weight(&next)?));
        }
        Ok(Some((who, out)))
    }

    /// Canonical optimal move: best for the mover, lowest id among equals.
    pub fn best_move(&mut self, state: &GameState) -> Result<Option<(Player, usize)>, SolveError> {
        Ok(self.move_values(state)?.map(|(who, values)| {
            let target = optimum(who, &values);
            let v = values.iter().find(|(_, x)| *x == target).map(|(v, _)| *v);
            (who, v.expect("non-terminal state has a legal move"))
        }))
    }

    /// All moves attaining the optimum for the mover.
    pub fn optimal_moves(&mut self, state: &GameState) -> Result<Vec<usize>, SolveError> {
        Ok(match self.move_values(state)? {
            None => Vec::new(),
            Some((who, values)) => {
                let target = optimum(who, &values);
                values
                    .into_iter()
                    .filter(|(_, x)| *x == target)
                    .map(|(v, _)| v)
                    .collect()
            }
        })
    }

    /// Canonical line from `state` to the end of the game (moves after `state` only).
    pub fn line_from(&mut self, state: &GameState) -> Result<Vec<(Player, usize)>, SolveError> {
        let mut state = *state;
        let mut line = Vec::new();
        while let Some((who, v)) = self.best_move(&state)? {
            match who {
                Player::First => state.first.insert(v),
                Player::Second => state.second.insert(v),
            }
            line.push((who, v));
        }
        Ok(line)
    }
}

fn optimum(who: Player, values: &[(usize, u64)]) -> u64 {
    let it = values.iter().map(|(_, x)| *x);
    match who {
        Player::First => it.max(),
        Player::Second => it.min(),
    }
    .expect("non-empty move list")
}

fn check_vertex(instance: &Instance, v: usize) -> Result<(), SolveError> {
    if v < instance.vertex_count() {
        Ok(())
    } else {
        Err(SolveError::NoSuchVertex(v))
    }
}

/// First's optimal final share from `state`.
pub fn value_from(
    instance: &Instance,
    policy: TiePolicy,
    state: &GameState,
) -> Result<Fraction, SolveError> {
    let weight = Search::new(instance, policy)?.final_first_weight(state)?;
    Ok(Fraction::new(weight, instance.total_weight()))
}

/// Per-opening result inside a [`SolveReport`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StartValue {
    pub start: usize,
    /// w(F_a): First's final collected weight after opening at `start`.
    pub first_weight: u64,
    pub value: Fraction,
    pub line: Vec<(Player, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub per_start: Vec<StartValue>,
    pub value: Fraction,
    pub best_start: usize,
    pub policy: TiePolicy,
    pub total_weight: u64,
    pub state_count: usize,
}

impl SolveReport {
    /// `key=value` lines, fractions as `p/q`.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "policy={}", self.policy);
        let _ = writeln!(out, "total_weight={}", self.total_weight);
        for sv in &self.per_start {
            let _ = writeln!(out, "start.{}.value={}", sv.start, format_fraction(&sv.value));
            let _ = writeln!(out, "start.{}.line={}", sv.start, format_line(&sv.line));
        }
        let _ = writeln!(out, "value={}", format_fraction(&self.value));
        let _ = writeln!(out, "best_start={}", self.best_start);
        let _ = writeln!(out, "state_count={}", self.state_count);
        out
    }
}

/// Optimal values for every opening, the instance value and witness lines.
pub fn solve(instance: &Instance, policy: TiePolicy) -> Result<SolveReport, SolveError> {
    let mut search = Search::new(instance, policy)?;
    let total = instance.total_weight();
    let mut per_start = Vec::with_capacity(instance.vertex_count());
    for start in instance.all_vertices() {
        let opening = GameState::opening(start);
        let first_weight = search.final_first_weight(&opening)?;
        let mut line = vec![(Player::First, start)];
        line.extend(search.line_from(&opening)?);
        per_start.push(StartValue {
            start,
            first_weight,
            value: Fraction::new(first_weight, total),
            line,
        });
    }
    // max_by_key keeps the last maximum; walk in reverse for the lowest id.
    let best = per_start
        .iter()
        .rev()
        .max_by_key(|sv| sv.first_weight)
        .expect("instances are non-empty");
    Ok(SolveReport {
        value: best.value,
        best_start: best.start,
        policy,
        total_weight: total,
        state_count: search.state_count(),
        per_start,
    })
}

/// Canonical optimal line when First opens at `start`.
pub fn principal_line(
    instance: &Instance,
    policy: TiePolicy,
    start: usize,
) -> Result<Vec<(Player, usize)>, SolveError> {
    check_vertex(instance, start)?;
    let mut search = Search::new(instance, policy)?;
    let mut line = vec![(Player::First, start)];
    line.extend(search.line_from(&GameState::opening(start))?);
    Ok(line)
}

/// All optimal first replies of Second when First opens at `start`.
pub fn optimal_responses(
    instance: &Instance,
    policy: TiePolicy,
    start: usize,
) -> Result<Vec<usize>, SolveError> {
    check_vertex(instance, start)?;
    Search::new(instance, policy)?.optimal_moves(&GameState::opening(start))
}

/// Second's canonical optimal first reply to every opening.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseMap {
    pub reply: Vec<usize>,
}

impl ResponseMap {
    pub fn get(&self, opening: usize) -> usize {
        self.reply[opening]
    }

    /// Edges `{a, a'}` (with `a < a'`) answered by each other.
    pub fn mutual_edges(&self) -> Vec<(usize, usize)> {
        self.reply
            .iter()
            .enumerate()
            .filter(|&(a, &b)| a < b && self.reply[b] == a)
            .map(|(a, &b)| (a, b))
            .collect()
    }
}

pub fn response_map(instance: &Instance, policy: TiePolicy) -> Result<ResponseMap, SolveError> {
    if instance.vertex_count() < 2 {
        return Err(SolveError::TooSmall);
    }
    let mut search = Search::new(instance, policy)?;
    let mut reply = Vec::with_capacity(instance.vertex_count());
    for a in instance.all_vertices() {
        let (who, v) = search
            .best_move(&GameState::opening(a))?
            .expect("two or more vertices");
        debug_assert_eq!(who, Player::Second);
        reply.push(v);
    }
    Ok(ResponseMap { reply })
}
