//! Plain-text code format.
//!
//! ```text
//! # comment
//! code n=4 k=2 d=2
//! stabilizer XXXX
//! stabilizer ZZZZ
//! logical_x IXIX
//! logical_z ZZII
//! ```
//!
//! `d=?` marks an unverified distance. Logical lines pair up by order of appearance.

use super::{CodeError, PauliString, StabilizerCode};

pub fn write_code(code: &StabilizerCode) -> String {
    let d = code.d.map_or_else(|| "?".to_string(), |d| d.to_string());
    let mut out = format!("code n={} k={} d={}\n", code.n, code.k, d);
    for s in &code.stabilizers {
        out.push_str(&format!("stabilizer {s}\n"));
    }
    for x in &code.logical_x {
        out.push_str(&format!("logical_x {x}\n"));
    }
    for z in &code.logical_z {
        out.push_str(&format!("logical_z {z}\n"));
    }
    out
}

fn header_field(tok: &str, key: &str, line: usize) -> Result<String, CodeError> {
    tok.strip_prefix(key)
        .and_then(|t| t.strip_prefix('='))
        .map(str::to_string)
        .ok_or_else(|| CodeError::Parse(format!("line {line}: expected {key}=<value>, got {tok:?}")))
}

/// Parses and validates a code in the text format.
pub fn parse_code(text: &str) -> Result<StabilizerCode, CodeError> {
    let mut header: Option<(usize, usize, Option<usize>)> = None;
    let (mut stabilizers, mut logical_x, mut logical_z) = (Vec::new(), Vec::new(), Vec::new());
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let kw = toks.next().unwrap_or("");
        let rest: Vec<&str> = toks.collect();
        match kw {
            "code" => {
                if header.is_some() {
                    return Err(CodeError::Parse(format!("line {line_no}: duplicate header")));
                }
                if rest.len() != 3 {
                    return Err(CodeError::Parse(format!("line {line_no}: header needs n=, k=, d=")));
                }
                let num = |key: &str, tok: &str| -> Result<usize, CodeError> {
                    header_field(tok, key, line_no)?
                        .parse()
                        .map_err(|_| CodeError::Parse(format!("line {line_no}: {key} is not a number")))
                };
                let n = num("n", rest[0])?;
                let k = num("k", rest[1])?;
                let d = header_field(rest[2], "d", line_no)?;
                let d = if d == "?" {
                    None
                } else {
                    Some(d.parse().map_err(|_| CodeError::Parse(format!("line {line_no}: d is not a number")))?)
                };
                if n == 0 || n > super::MAX_QUBITS || k > n {
                    return Err(CodeError::Capacity(format!("line {line_no}: unsupported n={n} k={k}")));
                }
                header = Some((n, k, d));
            }
            "stabilizer" | "logical_x" | "logical_z" => {
                let Some((n, _, _)) = header else {
                    return Err(CodeError::Parse(format!("line {line_no}: operator before header")));
                };
                if rest.len() != 1 {
                    return Err(CodeError::Parse(format!("line {line_no}: expected one Pauli string")));
                }
                let p: PauliString = rest[0].parse().map_err(|e| CodeError::Parse(format!("line {line_no}: {e}")))?;
                if p.n() != n {
                    return Err(CodeError::Parse(format!("line {line_no}: length {} but n={n}", p.n())));
                }
                match kw {
                    "stabilizer" => stabilizers.push(p),
                    "logical_x" => logical_x.push(p),
                    _ => logical_z.push(p),
                }
            }
            other => return Err(CodeError::Parse(format!("line {line_no}: unknown keyword {other:?}"))),
        }
    }
    let (n, k, d) = header.ok_or_else(|| CodeError::Parse("missing `code` header".into()))?;
    let code = StabilizerCode { n, k, d, stabilizers, logical_x, logical_z };
    code.validate()?;
    Ok(code)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{c4_code, hypercube_code};

    #[test]
    fn round_trip() {
        for code in [c4_code(), hypercube_code()] {
            let text = write_code(&code);
            assert_eq!(parse_code(&text).unwrap(), code);
        }
    }

    #[test]
    fn unknown_distance() {
        let c = parse_code("code n=4 k=2 d=?\nstabilizer XXXX\nstabilizer ZZZZ\nlogical_x IXIX\nlogical_x IIXX\nlogical_z ZZII\nlogical_z ZIZI\n").unwrap();
        assert_eq!(c.d, None);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_code("code n=4 k=2 d=2\nstabilizer XXX\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(parse_code("stabilizer XXXX").is_err());
        assert!(parse_code("code n=4 k=2\n").is_err());
    }
}
