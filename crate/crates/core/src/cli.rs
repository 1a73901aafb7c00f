//! Command-line front end.
//!
//! [`run`] takes the argument list and the three standard streams so that the
//! whole command surface can be driven from tests. Exit codes: 0 success,
//! 1 suite failure, 2 usage or input error, 3 play stopped at a tie.

use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::adversary::{parse_shapes, search_shapes, AdversaryError, Method};
use crate::game::{
    apply, format_fraction, format_line, legal_moves, mover, Fraction, GameError, GameState,
    Instance, Outcome, Player, TiePolicy,
};
use crate::generators::{gen_cycle7_family, gen_random_connected, gen_random_tree, DEFAULT_WEIGHT_MAX};
use crate::io::{format_instance, parse_instance};
use crate::solver::{solve, Search, SolveError, SOLVE_WARN_VERTICES};
use crate::verify::{run_suite, VerifyError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SUITE_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_TIE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "graphshare", version, about = "Exact solver and checks for the connected graph sharing game")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve an instance file exactly.
    Solve {
        file: PathBuf,
        #[arg(long, default_value = "forbid")]
        policy: TiePolicy,
        /// Report only this opening.
        #[arg(long)]
        start: Option<usize>,
    },
    /// Play against the engine on the terminal.
    Play {
        file: PathBuf,
        #[arg(long)]
        human: Player,
        #[arg(long, default_value = "forbid")]
        policy: TiePolicy,
    },
    /// Run a named check suite.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        seed: u64,
        /// Suite parameter `key=value`; repeatable.
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, String)>,
    },
    /// Generate an instance: cycle7:<M>, tree:<n>, connected:<n>,<extra> or edge:<a>,<b>.
    Gen {
        #[arg(long)]
        kind: String,
        /// Required for the random kinds.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Search for weights that minimize First's guaranteed share.
    Adversary {
        /// cycle7, cycle:<n>, tree-enum:<n> or edge.
        #[arg(long)]
        shape: String,
        #[arg(long, default_value = "forbid")]
        policy: TiePolicy,
        #[arg(long, default_value = "alt")]
        method: Method,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 30)]
        iters: usize,
    },
}

fn parse_param(text: &str) -> Result<(String, String), String> {
    match text.split_once('=') {
        Some((k, v)) if !k.is_empty() => Ok((k.to_string(), v.to_string())),
        _ => Err(format!("expected key=value, got `{text}`")),
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve { file, policy, start } => cmd_solve(&file, policy, start, out, err),
        Command::Play { file, human, policy } => cmd_play(&file, policy, human, input, out),
        Command::Verify { suite, seed, params } => cmd_verify(&suite, seed, &params, out),
        Command::Gen { kind, seed, output } => cmd_gen(&kind, seed, output.as_deref(), out),
        Command::Adversary {
            shape,
            policy,
            method,
            seed,
            iters,
        } => cmd_adversary(&shape, policy, method, seed, iters, out),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message);
            failure.code
        }
    }
}

struct Failed {
    code: i32,
    message: String,
}

fn usage(message: impl ToString) -> Failed {
    Failed {
        code: EXIT_USAGE,
        message: message.to_string(),
    }
}

fn from_solve(e: SolveError) -> Failed {
    Failed {
        code: if e.is_tie() { EXIT_TIE } else { EXIT_USAGE },
        message: e.to_string(),
    }
}

fn io_failed(e: std::io::Error) -> Failed {
    usage(format!("i/o error: {e}"))
}

fn load(file: &std::path::Path) -> Result<Instance, Failed> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| usage(format!("cannot read {}: {e}", file.display())))?;
    parse_instance(&text).map_err(|e| usage(format!("{}: {e}", file.display())))
}

fn cmd_solve(
    file: &std::path::Path,
    policy: TiePolicy,
    start: Option<usize>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failed> {
    let instance = load(file)?;
    if instance.vertex_count() > SOLVE_WARN_VERTICES {
        let _ = writeln!(
            err,
            "warning: {} vertices; exact solving may take a long time",
            instance.vertex_count()
        );
    }
    if let Some(v) = start {
        if v >= instance.vertex_count() {
            return Err(usage(format!("vertex {v} does not exist")));
        }
    }
    let report = solve(&instance, policy).map_err(from_solve)?;
    let text = match start {
        None => report.to_kv(),
        Some(v) => {
            let sv = &report.per_start[v];
            format!(
                "policy={policy}\ntotal_weight={}\nstart={v}\nvalue={}\nline={}\n",
                report.total_weight,
                format_fraction(&sv.value),
                format_line(&sv.line)
            )
        }
    };
    out.write_all(text.as_bytes()).map_err(io_failed)?;
    Ok(EXIT_OK)
}

fn cmd_play(
    file: &std::path::Path,
    policy: TiePolicy,
    human: Player,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
) -> Result<i32, Failed> {
    let instance = load(file)?;
    match run_play(&instance, policy, human, input, out) {
        Ok(_) => Ok(EXIT_OK),
        Err(PlayError::Tie(e)) => Err(Failed {
            code: EXIT_TIE,
            message: format!("{e}; the tie policy `forbid` leaves the game undefined here"),
        }),
        Err(PlayError::EndOfInput) => Err(usage("input ended before the game finished")),
        Err(PlayError::Io(e)) => Err(io_failed(e)),
        Err(PlayError::Solve(e)) => Err(from_solve(e)),
    }
}

fn cmd_verify(
    suite: &str,
    seed: u64,
    params: &[(String, String)],
    out: &mut dyn Write,
) -> Result<i32, Failed> {
    let report = run_suite(suite, seed, params).map_err(|e: VerifyError| usage(e))?;
    out.write_all(report.render().as_bytes()).map_err(io_failed)?;
    Ok(if report.passed() {
        EXIT_OK
    } else {
        EXIT_SUITE_FAILED
    })
}

fn numbers<const K: usize>(kind: &str, text: &str) -> Result<[u64; K], Failed> {
    let parts: Vec<u64> = text
        .split(',')
        .map(|x| x.trim().parse::<u64>())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("bad numbers in --kind {kind}")))?;
    parts
        .try_into()
        .map_err(|_| usage(format!("--kind {kind} expects {K} number(s)")))
}

fn cmd_gen(
    kind: &str,
    seed: Option<u64>,
    output: Option<&std::path::Path>,
    out: &mut dyn Write,
) -> Result<i32, Failed> {
    let (name, arg) = kind
        .split_once(':')
        .ok_or_else(|| usage(format!("unknown kind `{kind}`")))?;
    let need_seed = || seed.ok_or_else(|| usage(format!("--kind {name} needs --seed")));
    let instance = match name {
        "cycle7" => {
            let [m] = numbers(kind, arg)?;
            gen_cycle7_family(m).map_err(usage)?
        }
        "tree" => {
            let [n] = numbers(kind, arg)?;
            gen_random_tree(n as usize, need_seed()?, DEFAULT_WEIGHT_MAX).map_err(usage)?
        }
        "connected" => {
            let [n, extra] = numbers(kind, arg)?;
            gen_random_connected(n as usize, extra as usize, need_seed()?, DEFAULT_WEIGHT_MAX)
                .map_err(usage)?
        }
        "edge" => {
            let [a, b] = numbers(kind, arg)?;
            Instance::new(vec![a, b], vec![(0, 1)]).map_err(usage)?
        }
        _ => return Err(usage(format!("unknown kind `{kind}`"))),
    };
    let mut text = format!("# kind={kind}");
    if let Some(s) = seed {
        text.push_str(&format!(" seed={s}"));
    }
    text.push('\n');
    text.push_str(&format_instance(&instance));
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?,
        None => out.write_all(text.as_bytes()).map_err(io_failed)?,
    }
    Ok(EXIT_OK)
}

fn cmd_adversary(
    shape: &str,
    policy: TiePolicy,
    method: Method,
    seed: u64,
    iters: usize,
    out: &mut dyn Write,
) -> Result<i32, Failed> {
    if iters == 0 {
        return Err(usage("--iters must be at least 1"));
    }
    let shapes = parse_shapes(shape).map_err(usage)?;
    let found = search_shapes(&shapes, policy, method, seed, iters).map_err(|e| match e {
        AdversaryError::TieLocked(_) => Failed {
            code: EXIT_TIE,
            message: e.to_string(),
        },
        AdversaryError::Solve(s) => from_solve(s),
        other => usage(other),
    })?;
    out.write_all(found.render(method, policy, seed).as_bytes())
        .map_err(io_failed)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Error)]
pub enum PlayError {
    #[error(transparent)]
    Tie(GameError),
    #[error("input ended before the game finished")]
    EndOfInput,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Solve(SolveError),
}

impl From<SolveError> for PlayError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Game(g @ GameError::TieEncountered { .. }) => PlayError::Tie(g),
            other => PlayError::Solve(other),
        }
    }
}

fn share(weight: u64, total: u64) -> String {
    format_fraction(&Fraction::new(weight, total))
}

fn set_text(set: crate::game::VertexSet) -> String {
    let ids: Vec<String> = set.iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", ids.join(","))
}

/// Terminal game between a human on `input`/`out` and the engine, which plays
/// the solver's canonical optimal moves. Illegal or unreadable input is
/// answered with a new prompt.
pub fn run_play(
    instance: &Instance,
    policy: TiePolicy,
    human: Player,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
) -> Result<Outcome, PlayError> {
    let mut engine = Search::new(instance, policy)?;
    let total = instance.total_weight();
    let mut state = GameState::default();
    let mut log = Vec::with_capacity(instance.vertex_count());
    writeln!(out, "you play {human}; tie policy {policy}; total weight {total}")?;
    while !state.is_terminal(instance) {
        let who = match mover(instance, &state, policy) {
            Ok(p) => p,
            Err(e) => {
                writeln!(out, "play stopped: {e}")?;
                return Err(PlayError::Tie(e));
            }
        };
        let (f, s) = state.totals(instance);
        let frontier = legal_moves(instance, &state);
        writeln!(
            out,
            "first {} = {} | second {} = {}",
            set_text(state.first),
            share(f, total),
            set_text(state.second),
            share(s, total)
        )?;
        writeln!(out, "frontier: {}", frontier.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "))?;
        let vertex = if who == human {
            loop {
                write!(out, "your move ({who}): ")?;
                out.flush()?;
                let mut line = String::new();
                if input.read_line(&mut line)? == 0 {
                    writeln!(out)?;
                    return Err(PlayError::EndOfInput);
                }
                match line.trim().parse::<usize>() {
                    Ok(v) if frontier.contains(v) => break v,
                    _ => writeln!(out, "`{}` is not a legal vertex; choose from the frontier", line.trim())?,
                }
            }
        } else {
            let (_, v) = engine.best_move(&state)?.expect("game not over");
            writeln!(out, "engine ({who}) takes {v}")?;
            v
        };
        state = apply(instance, &state, policy, vertex).map_err(PlayError::Tie)?;
        log.push((who, vertex));
    }
    let (f, s) = state.totals(instance);
    let outcome = Outcome {
        final_first_set: state.first,
        final_second_set: state.second,
        first_weight: f,
        second_weight: s,
        total_weight: total,
        move_log: log,
    };
    writeln!(out, "game over: first {} second {}", share(f, total), share(s, total))?;
    writeln!(out, "moves: {}", format_line(&outcome.move_log))?;
    let value = engine.final_first_weight(&GameState::default())?;
    writeln!(out, "optimal value for first: {}", share(value, total))?;
    Ok(outcome)
}
