//! Plain-text instance format.
//!
//! ```text
//! # comment
//! n m
//! w_0 w_1 ... w_{n-1}
//! u v        (m edge lines, 0-indexed)
//! ```
//!
//! Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;

use thiserror::Error;

use crate::game::{Instance, InstanceError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("graph is not connected")]
    DisconnectedGraph,
    #[error("vertex {vertex} has non-positive weight")]
    NonPositiveWeight { vertex: usize },
    #[error("duplicate edge {u}-{v}")]
    DuplicateEdge { u: usize, v: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error(transparent)]
    Invalid(InstanceError),
}

impl From<InstanceError> for ParseError {
    fn from(err: InstanceError) -> Self {
        match err {
            InstanceError::Disconnected => ParseError::DisconnectedGraph,
            InstanceError::NonPositiveWeight { vertex } => ParseError::NonPositiveWeight { vertex },
            InstanceError::DuplicateEdge { u, v } => ParseError::DuplicateEdge { u, v },
            InstanceError::SelfLoop(v) => ParseError::SelfLoop(v),
            other => ParseError::Invalid(other),
        }
    }
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

fn numbers(line_no: usize, text: &str) -> Result<Vec<i128>, ParseError> {
    text.split_whitespace()
        .map(|tok| {
            tok.parse::<i128>()
                .map_err(|_| syntax(line_no, format!("`{tok}` is not an integer")))
        })
        .collect()
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hl, header) = lines.next().ok_or_else(|| syntax(1, "missing `n m` header"))?;
    let header = numbers(hl, header)?;
    let [n, m] = header[..] else {
        return Err(syntax(hl, "header must be `n m`"));
    };
    if n < 1 || m < 0 {
        return Err(syntax(hl, "need n >= 1 and m >= 0"));
    }
    let (n, m) = (n as usize, m as usize);

    let (wl, weights) = lines
        .next()
        .ok_or_else(|| syntax(hl + 1, "missing weight line"))?;
    let weights = numbers(wl, weights)?;
    if weights.len() != n {
        return Err(syntax(wl, format!("expected {n} weights, found {}", weights.len())));
    }
    if let Some(vertex) = weights.iter().position(|&w| w <= 0) {
        return Err(ParseError::NonPositiveWeight { vertex });
    }
    let weights = weights
        .into_iter()
        .map(|w| u64::try_from(w).map_err(|_| syntax(wl, "weight exceeds 64 bits")))
        .collect::<Result<Vec<_>, _>>()?;

    let mut edges = Vec::with_capacity(m);
    let mut last_line = wl;
    for _ in 0..m {
        let (el, text) = lines
            .next()
            .ok_or_else(|| syntax(last_line + 1, format!("expected {m} edge lines")))?;
        last_line = el;
        let pair = numbers(el, text)?;
        let [u, v] = pair[..] else {
            return Err(syntax(el, "edge line must be `u v`"));
        };
        if u < 0 || v < 0 || u as usize >= n || v as usize >= n {
            return Err(syntax(el, format!("edge endpoint outside 0..{n}")));
        }
        edges.push((u as usize, v as usize));
    }
    if let Some((el, _)) = lines.next() {
        return Err(syntax(el, "unexpected trailing content"));
    }
    Ok(Instance::new(weights, edges)?)
}

pub fn format_instance(instance: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", instance.vertex_count(), instance.edges().len());
    let weights: Vec<String> = instance.weights().iter().map(u64::to_string).collect();
    let _ = writeln!(out, "{}", weights.join(" "));
    for (u, v) in instance.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}
