//! Text format for group definitions. Line-oriented key/value:
//!
//! ```text
//! # anything after '#' is a comment
//! name = p4
//! rank = 2
//! qorder = 4
//! qmul = 0 1 2 3 ; 1 2 3 0 ; 2 3 0 1 ; 3 0 1 2
//! mat 1 = 0 -1 ; 1 0
//! cocycle 1 1 = 0 0
//! ```
//!
//! `qmul` lists the multiplication table of Q row by row. `mat q` gives the
//! action matrix of element q (row by row); omitted matrices default to the
//! identity. `cocycle q r` gives the vector c(q, r); omitted entries are
//! zero. Everything is validated against the presentation invariants on
//! load.

use crate::error::{Error, Result};
use crate::fingroup::FiniteGroup;
use crate::intmat::{self, IMat};
use crate::presentation::{Cocycle, LatticeAction, VAPresentation};

fn parse_i64_list(s: &str, line: usize) -> Result<Vec<i64>> {
    s.split_whitespace()
        .map(|tok| {
            tok.parse::<i64>().map_err(|_| Error::Parse {
                line,
                msg: format!("expected integer, got `{tok}`"),
            })
        })
        .collect()
}

fn parse_rows(s: &str, line: usize) -> Result<Vec<Vec<i64>>> {
    s.split(';').map(|row| parse_i64_list(row, line)).collect()
}

pub fn parse(text: &str) -> Result<VAPresentation> {
    let mut name: Option<String> = None;
    let mut rank: Option<usize> = None;
    let mut qorder: Option<usize> = None;
    let mut qmul: Option<Vec<Vec<i64>>> = None;
    let mut mats: Vec<(usize, IMat, usize)> = Vec::new();
    let mut cocycle_entries: Vec<(usize, usize, Vec<i64>, usize)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body.split_once('=').ok_or(Error::Parse {
            line,
            msg: "expected `key = value`".into(),
        })?;
        let key = key.trim();
        let value = value.trim();
        let mut words = key.split_whitespace();
        match words.next() {
            Some("name") => name = Some(value.to_string()),
            Some("rank") => {
                rank = Some(value.parse().map_err(|_| Error::Parse {
                    line,
                    msg: format!("bad rank `{value}`"),
                })?)
            }
            Some("qorder") => {
                qorder = Some(value.parse().map_err(|_| Error::Parse {
                    line,
                    msg: format!("bad qorder `{value}`"),
                })?)
            }
            Some("qmul") => qmul = Some(parse_rows(value, line)?),
            Some("mat") => {
                let idx: usize = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .ok_or(Error::Parse {
                        line,
                        msg: "expected `mat <q-index> = ...`".into(),
                    })?;
                mats.push((idx, parse_rows(value, line)?, line));
            }
            Some("cocycle") => {
                let a: usize = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .ok_or(Error::Parse {
                        line,
                        msg: "expected `cocycle <q> <r> = ...`".into(),
                    })?;
                let b: usize = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .ok_or(Error::Parse {
                        line,
                        msg: "expected `cocycle <q> <r> = ...`".into(),
                    })?;
                cocycle_entries.push((a, b, parse_i64_list(value, line)?, line));
            }
            Some(other) => {
                return Err(Error::Parse {
                    line,
                    msg: format!("unknown key `{other}`"),
                })
            }
            None => unreachable!(),
        }
    }

    let rank = rank.ok_or(Error::Parse {
        line: 0,
        msg: "missing `rank`".into(),
    })?;
    let qorder = qorder.ok_or(Error::Parse {
        line: 0,
        msg: "missing `qorder`".into(),
    })?;
    let qmul = qmul.ok_or(Error::Parse {
        line: 0,
        msg: "missing `qmul`".into(),
    })?;

    if qmul.len() != qorder || qmul.iter().any(|r| r.len() != qorder) {
        return Err(Error::Invalid(format!(
            "qmul must be a {qorder}x{qorder} table"
        )));
    }
    let mut table = Vec::with_capacity(qorder * qorder);
    for row in &qmul {
        for &x in row {
            if x < 0 || x as usize >= qorder {
                return Err(Error::Invalid(format!("qmul entry {x} out of range")));
            }
            table.push(x as u32);
        }
    }
    let q = FiniteGroup::from_mul_table(qorder as u32, table)?;

    let mut action = LatticeAction::trivial(rank, qorder);
    for (idx, m, line) in mats {
        if idx >= qorder {
            return Err(Error::Parse {
                line,
                msg: format!("mat index {idx} out of range"),
            });
        }
        action.mats[idx] = m;
    }

    let mut cocycle = Cocycle::zero(rank, qorder);
    for (a, b, v, line) in cocycle_entries {
        if a >= qorder || b >= qorder {
            return Err(Error::Parse {
                line,
                msg: format!("cocycle index ({a}, {b}) out of range"),
            });
        }
        cocycle.set(a as u32, b as u32, v);
    }

    VAPresentation::new(rank, q, action, cocycle, name)
}

pub fn parse_file(path: &std::path::Path) -> Result<VAPresentation> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

/// Serializes a presentation in the format accepted by [`parse`].
pub fn render(p: &VAPresentation) -> String {
    let mut out = String::new();
    if let Some(name) = &p.name {
        out.push_str(&format!("name = {name}\n"));
    }
    out.push_str(&format!("rank = {}\n", p.rank));
    out.push_str(&format!("qorder = {}\n", p.q.order()));
    let rows: Vec<String> = (0..p.q.order())
        .map(|a| {
            (0..p.q.order())
                .map(|b| p.q.mul(a, b).to_string())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    out.push_str(&format!("qmul = {}\n", rows.join(" ; ")));
    for (i, m) in p.action.mats.iter().enumerate() {
        if intmat::is_identity(m) {
            continue;
        }
        let rows: Vec<String> = m
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        out.push_str(&format!("mat {i} = {}\n", rows.join(" ; ")));
    }
    for a in 0..p.q.order() {
        for b in 0..p.q.order() {
            let v = p.cocycle.get(a, b);
            if !intmat::is_zero_vec(v) {
                let body: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                out.push_str(&format!("cocycle {a} {b} = {}\n", body.join(" ")));
            }
        }
    }
    out
}
