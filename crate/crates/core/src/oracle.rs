//! Brute-force reference values and play-line audits.
//!
//! Nothing here shares search code with [`crate::solver`]: the recursion is
//! the plain definition of optimal play over the rules in [`crate::game`],
//! without memoization or pruning.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::game::{apply, legal_moves, mover, Fraction, GameError, GameState, Instance, Player, TiePolicy};

/// Largest instance [`brute_value`] accepts.
pub const BRUTE_VERTEX_CAP: usize = 10;
/// Largest instance [`audit_lines`] enumerates exhaustively.
pub const AUDIT_EXHAUSTIVE_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("instance has {n} vertices, the oracle accepts at most {cap}")]
    InstanceTooLarge { n: usize, cap: usize },
    #[error("vertex {0} does not exist")]
    NoSuchVertex(usize),
}

fn brute(instance: &Instance, policy: TiePolicy, state: &GameState) -> Result<u64, GameError> {
    if state.is_terminal(instance) {
        return Ok(instance.set_weight(state.first));
    }
    let who = mover(instance, state, policy)?;
    let mut outcomes = Vec::new();
    for v in legal_moves(instance, state) {
        let next = apply(instance, state, policy, v)?;
        outcomes.push(brute(instance, policy, &next)?);
    }
    let best = match who {
        Player::First => outcomes.into_iter().max(),
        Player::Second => outcomes.into_iter().min(),
    };
    Ok(best.expect("connected instance has a move"))
}

/// First's optimal final share after opening at `start`, by exhaustive recursion.
pub fn brute_value(
    instance: &Instance,
    policy: TiePolicy,
    start: usize,
) -> Result<Fraction, OracleError> {
    let n = instance.vertex_count();
    if n > BRUTE_VERTEX_CAP {
        return Err(OracleError::InstanceTooLarge {
            n,
            cap: BRUTE_VERTEX_CAP,
        });
    }
    if start >= n {
        return Err(OracleError::NoSuchVertex(start));
    }
    let opening = apply(instance, &GameState::default(), policy, start)?;
    let weight = brute(instance, policy, &opening)?;
    Ok(Fraction::new(weight, instance.total_weight()))
}

/// A state where the leading player is ahead by too much.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeadViolation {
    /// Index of the move after which the state was observed.
    pub step: usize,
    pub leader: Player,
    pub lead: u64,
    pub last_weight: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineAudit {
    pub line: Vec<(Player, usize)>,
    /// Play stopped at an equal-totals state under [`TiePolicy::ForbidTies`].
    pub skipped_tie: bool,
    /// Some mover on this line was chosen by the tie policy.
    pub tie_resolved: bool,
    pub final_first: u64,
    pub final_second: u64,
    pub max_lead_violation: Option<LeadViolation>,
    /// Final totals break `|f - s| < w_max` (or, with Second ahead,
    /// `2f > W - w_max`) on a tie-free line.
    pub endgame_violation: bool,
}

impl LineAudit {
    pub fn is_violation(&self) -> bool {
        self.max_lead_violation.is_some() || self.endgame_violation
    }
}

/// Checks the lead bound along `line`.
///
/// At every state in which both players hold a vertex, a strict leader must
/// lead by less than the weight of its most recently taken vertex (`strict`),
/// or by at most that weight (`!strict`, for lines whose movers were decided
/// by a tie policy). The line is not checked for legality.
pub fn check_leads(
    weights: &[u64],
    line: &[(Player, usize)],
    strict: bool,
) -> Option<LeadViolation> {
    let (mut f, mut s) = (0u64, 0u64);
    let (mut last_first, mut last_second) = (None, None);
    let mut worst: Option<(i128, LeadViolation)> = None;
    for (step, &(who, v)) in line.iter().enumerate() {
        let w = weights[v];
        match who {
            Player::First => {
                f += w;
                last_first = Some(w);
            }
            Player::Second => {
                s += w;
                last_second = Some(w);
            }
        }
        let (Some(lf), Some(ls)) = (last_first, last_second) else {
            continue;
        };
        let (leader, lead, last_weight) = match f.cmp(&s) {
            std::cmp::Ordering::Greater => (Player::First, f - s, lf),
            std::cmp::Ordering::Less => (Player::Second, s - f, ls),
            std::cmp::Ordering::Equal => continue,
        };
        let bad = if strict {
            lead >= last_weight
        } else {
            lead > last_weight
        };
        if bad {
            let excess = lead as i128 - last_weight as i128;
            if worst.as_ref().is_none_or(|(e, _)| excess > *e) {
                worst = Some((
                    excess,
                    LeadViolation {
                        step,
                        leader,
                        lead,
                        last_weight,
                    },
                ));
            }
        }
    }
    worst.map(|(_, v)| v)
}

/// Endgame corollary of the lead bound on a complete tie-free line.
pub fn endgame_holds(instance: &Instance, final_first: u64, final_second: u64) -> bool {
    let w_max = instance.max_weight();
    let total = instance.total_weight();
    let lead = final_first.abs_diff(final_second);
    let ahead_ok = final_second <= final_first || 2 * final_first > total - w_max;
    lead < w_max && ahead_ok
}

fn audit_one(
    instance: &Instance,
    line: Vec<(Player, usize)>,
    skipped_tie: bool,
    tie_resolved: bool,
) -> LineAudit {
    let (mut f, mut s) = (0, 0);
    for &(who, v) in &line {
        match who {
            Player::First => f += instance.weight(v),
            Player::Second => s += instance.weight(v),
        }
    }
    let max_lead_violation = if skipped_tie {
        None
    } else {
        check_leads(instance.weights(), &line, !tie_resolved)
    };
    let endgame_violation = !skipped_tie
        && !tie_resolved
        && instance.vertex_count() >= 2
        && !endgame_holds(instance, f, s);
    LineAudit {
        line,
        skipped_tie,
        tie_resolved,
        final_first: f,
        final_second: s,
        max_lead_violation,
        endgame_violation,
    }
}

/// Whether the mover at `state` was decided by the tie policy.
fn tie_at(instance: &Instance, state: &GameState) -> bool {
    if state.taken().is_empty() {
        return false;
    }
    let (f, s) = state.totals(instance);
    f == s
}

struct Walker<'a> {
    instance: &'a Instance,
    policy: TiePolicy,
    out: Vec<LineAudit>,
}

impl Walker<'_> {
    fn walk(&mut self, state: GameState, line: &mut Vec<(Player, usize)>, tie_resolved: bool) {
        if state.is_terminal(self.instance) {
            let audit = audit_one(self.instance, line.clone(), false, tie_resolved);
            self.out.push(audit);
            return;
        }
        let who = match mover(self.instance, &state, self.policy) {
            Ok(who) => who,
            Err(_) => {
                let audit = audit_one(self.instance, line.clone(), true, tie_resolved);
                self.out.push(audit);
                return;
            }
        };
        let tie_resolved = tie_resolved || tie_at(self.instance, &state);
        for v in legal_moves(self.instance, &state) {
            let next = apply(self.instance, &state, self.policy, v).expect("legal move");
            line.push((who, v));
            self.walk(next, line, tie_resolved);
            line.pop();
        }
    }
}

/// Line sampling parameters for instances too large to enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampling {
    pub line_limit: usize,
    pub seed: u64,
}

/// Audits play lines that open at `start`: all of them, or a seeded sample.
pub fn audit_lines(
    instance: &Instance,
    policy: TiePolicy,
    start: usize,
    sampling: Option<Sampling>,
) -> Result<Vec<LineAudit>, OracleError> {
    let n = instance.vertex_count();
    if start >= n {
        return Err(OracleError::NoSuchVertex(start));
    }
    match sampling {
        None => {
            if n > AUDIT_EXHAUSTIVE_CAP {
                return Err(OracleError::InstanceTooLarge {
                    n,
                    cap: AUDIT_EXHAUSTIVE_CAP,
                });
            }
            let mut walker = Walker {
                instance,
                policy,
                out: Vec::new(),
            };
            let mut line = vec![(Player::First, start)];
            walker.walk(GameState::opening(start), &mut line, false);
            Ok(walker.out)
        }
        Some(Sampling { line_limit, seed }) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = Vec::with_capacity(line_limit);
            for _ in 0..line_limit {
                out.push(sample_line(instance, policy, start, &mut rng));
            }
            Ok(out)
        }
    }
}

fn sample_line(
    instance: &Instance,
    policy: TiePolicy,
    start: usize,
    rng: &mut ChaCha8Rng,
) -> LineAudit {
    let mut state = GameState::opening(start);
    let mut line = vec![(Player::First, start)];
    let mut tie_resolved = false;
    while !state.is_terminal(instance) {
        let Ok(who) = mover(instance, &state, policy) else {
            return audit_one(instance, line, true, tie_resolved);
        };
        tie_resolved |= tie_at(instance, &state);
        let moves: Vec<usize> = legal_moves(instance, &state).iter().collect();
        let v = *moves.choose(rng).expect("frontier is non-empty");
        state = apply(instance, &state, policy, v).expect("legal move");
        line.push((who, v));
    }
    audit_one(instance, line, false, tie_resolved)
}
