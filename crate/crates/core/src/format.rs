//! Line-oriented instance files.
//!
//! ```text
//! c optional comments
//! p apnae <n> <k> <m>        (or: p aphg <n> <k> <m>)
//! <a> <x> <s1s2...sk>        one clause per line (apnae)
//! <a> <x>                    one edge per line (aphg)
//! ```
//!
//! Sign character i is `1` when literal i is negated.

use std::fmt::Write as _;

use crate::ap::{PrimeModulus, Progression};
use crate::error::{Error, Result};
use crate::generators::{ApHypergraph, Formula, SignedClause};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Formula(Formula),
    Hypergraph(ApHypergraph),
}

impl Instance {
    pub fn model(&self) -> &'static str {
        match self {
            Instance::Formula(_) => "apnae",
            Instance::Hypergraph(_) => "aphg",
        }
    }
}

pub fn write_formula(f: &Formula, comments: &[String]) -> String {
    let mut out = header(comments, "apnae", f.n, f.k, f.m());
    for c in &f.clauses {
        let signs: String = (0..f.k)
            .map(|i| if c.sign(i) { '1' } else { '0' })
            .collect();
        let _ = writeln!(out, "{} {} {}", c.prog.start, c.prog.step, signs);
    }
    out
}

pub fn write_hypergraph(h: &ApHypergraph, comments: &[String]) -> String {
    let mut out = header(comments, "aphg", h.n, h.k, h.m());
    for e in &h.edges {
        let _ = writeln!(out, "{} {}", e.start, e.step);
    }
    out
}

pub fn write_instance(inst: &Instance, comments: &[String]) -> String {
    match inst {
        Instance::Formula(f) => write_formula(f, comments),
        Instance::Hypergraph(h) => write_hypergraph(h, comments),
    }
}

fn header(comments: &[String], model: &str, n: PrimeModulus, k: usize, m: usize) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "c {c}");
    }
    let _ = writeln!(out, "p {model} {n} {k} {m}");
    out
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_num(tok: Option<&str>, line: usize, what: &str) -> Result<usize> {
    let tok = tok.ok_or_else(|| perr(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| {
        perr(
            line,
            format!("{what} {tok:?} is not a non-negative integer"),
        )
    })
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut header: Option<(bool, PrimeModulus, usize, usize)> = None;
    let mut progs = Vec::new();
    let mut signs = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line == "c" || line.starts_with("c ") {
            continue;
        }
        let mut toks = line.split_whitespace();
        let Some((is_formula, n, k, _)) = header else {
            if toks.next() != Some("p") {
                return Err(perr(
                    line_no,
                    "expected header line `p <model> <n> <k> <m>`",
                ));
            }
            let is_formula = match toks.next() {
                Some("apnae") => true,
                Some("aphg") => false,
                other => return Err(perr(line_no, format!("unknown model {other:?}"))),
            };
            let n = parse_num(toks.next(), line_no, "n")?;
            let k = parse_num(toks.next(), line_no, "k")?;
            let m = parse_num(toks.next(), line_no, "m")?;
            if toks.next().is_some() {
                return Err(perr(line_no, "trailing tokens in header"));
            }
            let n = PrimeModulus::new(n).map_err(|e| perr(line_no, e.to_string()))?;
            n.check_length(k)
                .map_err(|e| perr(line_no, e.to_string()))?;
            if is_formula && k > 32 {
                return Err(perr(line_no, "clauses are limited to 32 literals"));
            }
            header = Some((is_formula, n, k, m));
            continue;
        };
        let a = parse_num(toks.next(), line_no, "start")?;
        let x = parse_num(toks.next(), line_no, "step")?;
        if a >= n.get() || x >= n.get() {
            return Err(perr(line_no, format!("residue out of range for n = {n}")));
        }
        progs.push(Progression::new(a, x, k));
        if is_formula {
            let s = toks
                .next()
                .ok_or_else(|| perr(line_no, "missing sign string"))?;
            if s.len() != k {
                return Err(perr(
                    line_no,
                    format!("sign string {s:?} must have length {k}"),
                ));
            }
            let mut mask = 0u32;
            for (i, ch) in s.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => mask |= 1 << i,
                    _ => return Err(perr(line_no, format!("invalid sign character {ch:?}"))),
                }
            }
            signs.push(mask);
        }
        if toks.next().is_some() {
            return Err(perr(line_no, "trailing tokens"));
        }
    }

    let (is_formula, n, k, m) = header.ok_or_else(|| perr(0, "missing header"))?;
    if progs.len() != m {
        return Err(perr(
            0,
            format!("header declares {m} items, found {}", progs.len()),
        ));
    }
    Ok(if is_formula {
        let clauses = progs
            .into_iter()
            .zip(signs)
            .map(|(prog, signs)| SignedClause { prog, signs })
            .collect();
        Instance::Formula(Formula::new(n, k, clauses)?)
    } else {
        Instance::Hypergraph(ApHypergraph::new(n, k, progs)?)
    })
}
