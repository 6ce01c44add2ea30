//! Line-oriented circuit format.
//!
//! ```text
//! circuit tier=physical grid=14x16 lanes=1
//! atom 0 site=0,0 role=data
//! atom 8 site=1,4 role=ldu_flag:3
//! block c4 @0 1 2 3
//! sample 0 1
//! PREP @0
//! GR 1.5707963267948966 0
//! RZ -1.5707963267948966 @2
//! CZ @0 1
//! MOVE 0 -4 @4
//! MEASURE @0
//! CC 0 @1
//! moment 0 1
//! ```
//!
//! Gate lines are `KIND arg... @operands...`. For CC the operands are the target logical bit and
//! the args are the parity sources. Angles use Rust's shortest round-trip float formatting.

use std::collections::BTreeMap;

use super::{AtomId, Block, Circuit, CircuitError, Encoding, Gate, GateKind, Role, Site, SiteGrid, Tier};

pub(crate) fn role_name(r: Role) -> String {
    match r {
        Role::Data => "data".into(),
        Role::PrepFlag => "prep_flag".into(),
        Role::LduFlag(t) => format!("ldu_flag:{t}"),
        Role::Ancilla => "ancilla".into(),
        Role::Unused => "unused".into(),
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

pub fn write_circuit(c: &Circuit) -> String {
    let tier = match c.tier {
        Tier::Logical => "logical",
        Tier::Physical => "physical",
    };
    let mut out =
        format!("circuit tier={tier} grid={}x{} lanes={}\n", c.grid.rows, c.grid.cols, u8::from(c.grid.lanes));
    for (a, s) in &c.grid.occupancy {
        out.push_str(&format!("atom {a} site={},{} role={}\n", s.row, s.col, role_name(c.role(*a))));
    }
    for b in &c.blocks {
        out.push_str(&format!("block {} @{}\n", b.encoding.name(), join(&b.atoms)));
    }
    for s in &c.samples {
        out.push_str(&format!("sample {}\n", join(s)));
    }
    for g in &c.gates {
        out.push_str(&gate_line(g));
        out.push('\n');
    }
    for m in &c.moments {
        out.push_str(&format!("moment {}\n", join(m)));
    }
    out
}

/// One gate in the text syntax, without the trailing newline.
pub(crate) fn gate_line(g: &Gate) -> String {
    let name = g.kind.tag().name();
    match g.kind {
        GateKind::GR { theta, phi } => format!("{name} {theta} {phi}"),
        GateKind::Rz { theta } => format!("{name} {theta} @{}", join(&g.operands)),
        GateKind::Move { drow, dcol } => format!("{name} {drow} {dcol} @{}", join(&g.operands)),
        GateKind::ClassicalCorrection => {
            format!("{name} {} @{}", join(&g.operands[1..]), g.operands.first().copied().unwrap_or(0))
        }
        _ => format!("{name} @{}", join(&g.operands)),
    }
}

fn perr(line: usize, msg: impl std::fmt::Display) -> CircuitError {
    CircuitError::Parse(format!("line {line}: {msg}"))
}

fn kv<'a>(tok: &'a str, key: &str, line: usize) -> Result<&'a str, CircuitError> {
    tok.strip_prefix(key)
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| perr(line, format!("expected {key}=..., got {tok:?}")))
}

fn num<T: std::str::FromStr>(s: &str, line: usize) -> Result<T, CircuitError> {
    s.parse().map_err(|_| perr(line, format!("bad number {s:?}")))
}

pub(crate) fn parse_role(s: &str, line: usize) -> Result<Role, CircuitError> {
    Ok(match s {
        "data" => Role::Data,
        "prep_flag" => Role::PrepFlag,
        "ancilla" => Role::Ancilla,
        "unused" => Role::Unused,
        _ => match s.strip_prefix("ldu_flag:") {
            Some(t) => Role::LduFlag(num(t, line)?),
            None => return Err(perr(line, format!("unknown role {s:?}"))),
        },
    })
}

pub fn parse_circuit(text: &str) -> Result<Circuit, CircuitError> {
    let mut circuit: Option<Circuit> = None;
    let mut roles = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (head, ops) = match line.split_once('@') {
            Some((h, o)) => (h.trim(), Some(o.trim())),
            None => (line, None),
        };
        let toks: Vec<&str> = head.split_whitespace().collect();
        let Some(&kw) = toks.first() else {
            return Err(perr(ln, "missing gate kind before '@'"));
        };
        let args = &toks[1..];
        if kw == "circuit" {
            if circuit.is_some() {
                return Err(perr(ln, "duplicate header"));
            }
            if args.len() != 3 {
                return Err(perr(ln, "header needs tier=, grid=, lanes="));
            }
            let tier = match kv(args[0], "tier", ln)? {
                "logical" => Tier::Logical,
                "physical" => Tier::Physical,
                t => return Err(perr(ln, format!("unknown tier {t:?}"))),
            };
            let (r, c) = kv(args[1], "grid", ln)?.split_once('x').ok_or_else(|| perr(ln, "grid must be ROWSxCOLS"))?;
            let (rows, cols): (i32, i32) = (num(r, ln)?, num(c, ln)?);
            if rows <= 0 || cols <= 0 || rows > 4096 || cols > 4096 {
                return Err(perr(ln, "grid dimensions out of range"));
            }
            let lanes = match kv(args[2], "lanes", ln)? {
                "0" => false,
                "1" => true,
                other => return Err(perr(ln, format!("lanes must be 0 or 1, got {other:?}"))),
            };
            let mut grid = SiteGrid::new(rows, cols);
            grid.lanes = lanes;
            circuit = Some(Circuit::new(tier, grid));
            continue;
        }
        let c = circuit.as_mut().ok_or_else(|| perr(ln, "statement before `circuit` header"))?;
        let operands = |required: bool| -> Result<Vec<u32>, CircuitError> {
            match ops {
                Some(o) => o.split_whitespace().map(|t| num::<u32>(t, ln)).collect(),
                None if required => Err(perr(ln, "missing @operands")),
                None => Ok(Vec::new()),
            }
        };
        let want_args = |n: usize| -> Result<(), CircuitError> {
            if args.len() == n {
                Ok(())
            } else {
                Err(perr(ln, format!("{kw} takes {n} argument(s), got {}", args.len())))
            }
        };
        match kw {
            "atom" => {
                want_args(3)?;
                let a: AtomId = num(args[0], ln)?;
                let (r, col) =
                    kv(args[1], "site", ln)?.split_once(',').ok_or_else(|| perr(ln, "site must be ROW,COL"))?;
                let site = Site::new(num(r, ln)?, num(col, ln)?);
                if c.grid.occupancy.insert(a, site).is_some() {
                    return Err(perr(ln, format!("atom {a} declared twice")));
                }
                roles.insert(a, parse_role(kv(args[2], "role", ln)?, ln)?);
            }
            "block" => {
                want_args(1)?;
                let encoding = match args[0] {
                    "bare" => Encoding::Bare,
                    "c4" => Encoding::C4,
                    "hypercube" => Encoding::Hypercube,
                    e => return Err(perr(ln, format!("unknown encoding {e:?}"))),
                };
                c.blocks.push(Block { encoding, atoms: operands(true)? });
            }
            "sample" => {
                if ops.is_some() {
                    return Err(perr(ln, "sample takes no @operands"));
                }
                c.samples.push(args.iter().map(|t| num(t, ln)).collect::<Result<_, _>>()?);
            }
            "moment" => {
                if ops.is_some() {
                    return Err(perr(ln, "moment takes no @operands"));
                }
                c.moments.push(args.iter().map(|t| num(t, ln)).collect::<Result<_, _>>()?);
            }
            _ => {
                let kind = match kw {
                    "PREP" => GateKind::Prep,
                    "CZ" => GateKind::CZ,
                    "MEASURE" => GateKind::Measure,
                    "CX" => GateKind::CX,
                    "H" => GateKind::H,
                    "X" => GateKind::X,
                    "SWAP" => GateKind::SWAP,
                    "GR" => {
                        want_args(2)?;
                        GateKind::GR { theta: num(args[0], ln)?, phi: num(args[1], ln)? }
                    }
                    "RZ" => {
                        want_args(1)?;
                        GateKind::Rz { theta: num(args[0], ln)? }
                    }
                    "MOVE" => {
                        want_args(2)?;
                        GateKind::Move { drow: num(args[0], ln)?, dcol: num(args[1], ln)? }
                    }
                    "CC" => GateKind::ClassicalCorrection,
                    other => return Err(perr(ln, format!("unknown statement {other:?}"))),
                };
                let gate = match kind {
                    GateKind::GR { .. } => {
                        if ops.is_some() {
                            return Err(perr(ln, "GR takes no operands"));
                        }
                        Gate::new(kind, &[])
                    }
                    GateKind::ClassicalCorrection => {
                        let target = operands(true)?;
                        if target.len() != 1 {
                            return Err(perr(ln, "CC needs exactly one target"));
                        }
                        let sources: Vec<u32> = args.iter().map(|t| num(t, ln)).collect::<Result<_, _>>()?;
                        Gate::correction(target[0], &sources)
                    }
                    GateKind::Rz { .. } | GateKind::Move { .. } => Gate::new(kind, &operands(true)?),
                    _ => {
                        want_args(0)?;
                        Gate::new(kind, &operands(true)?)
                    }
                };
                c.gates.push(gate);
            }
        }
    }
    let mut c = circuit.ok_or_else(|| CircuitError::Parse("missing `circuit` header".into()))?;
    c.roles = roles;
    Ok(c)
}
