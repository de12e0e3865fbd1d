//! Text formats: the line-oriented matrix file and the certificate document.
//!
//! Matrix file:
//!
//! ```text
//! p=3 r=1 n=4 modulus=2,1,1
//! 1 1 1 0
//! 0 1 2 1
//! case=Q3_TABLE(4) repaired=0
//! ```
//!
//! Entries are decimal element encodings; the last line is optional.

use std::fmt::Write as _;

use serde::Serialize;

use crate::construct::{CaseTag, GeneratorMatrix};
use crate::error::{Error, Result};
use crate::gf::{make_field, make_field_experimental, Element, FieldCtx};
use crate::verify::{CodeCertificate, Purity, QuantumParams};

/// Provenance carried on the optional fourth line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatrixMeta {
    pub case: CaseTag,
    pub repaired: bool,
}

pub fn write_matrix(ctx: &FieldCtx, m: &GeneratorMatrix, meta: Option<MatrixMeta>) -> String {
    let modulus: Vec<String> = ctx.modulus().iter().map(u32::to_string).collect();
    let mut out = format!(
        "p={} r={} n={} modulus={}\n",
        ctx.p(),
        ctx.r(),
        m.n(),
        modulus.join(",")
    );
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(Element::to_string).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    if let Some(meta) = meta {
        let _ = writeln!(out, "case={} repaired={}", meta.case, u8::from(meta.repaired));
    }
    out
}

/// A matrix file after syntax checks, before the field is built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixFile {
    pub p: u32,
    pub r: u32,
    pub n: usize,
    pub modulus: Vec<u32>,
    pub rows: [Vec<u32>; 2],
    pub meta: Option<MatrixMeta>,
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Splits on single spaces, reporting 1-based start columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch == ' ', start) {
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn key_value<'a>(line: usize, (col, tok): (usize, &'a str), key: &str) -> Result<(usize, &'a str)> {
    tok.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .map(|v| (col + key.len() + 1, v))
        .ok_or_else(|| parse_err(line, col, format!("expected {key}=...")))
}

fn number<T: std::str::FromStr>(line: usize, col: usize, s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| parse_err(line, col, format!("expected a nonnegative integer, found {s:?}")))
}

pub fn parse_matrix(text: &str) -> Result<MatrixFile> {
    let lines: Vec<&str> = text.lines().collect();
    let header = *lines.first().ok_or_else(|| parse_err(1, 1, "empty file"))?;
    let toks = tokens(header);
    if toks.len() != 4 {
        return Err(parse_err(1, 1, "header needs p=, r=, n= and modulus="));
    }
    let (c, v) = key_value(1, toks[0], "p")?;
    let p: u32 = number(1, c, v)?;
    let (c, v) = key_value(1, toks[1], "r")?;
    let r: u32 = number(1, c, v)?;
    let (c, v) = key_value(1, toks[2], "n")?;
    let n: usize = number(1, c, v)?;
    let (mut c, v) = key_value(1, toks[3], "modulus")?;
    let mut modulus = Vec::new();
    for part in v.split(',') {
        modulus.push(number(1, c, part)?);
        c += part.len() + 1;
    }

    let mut rows: [Vec<u32>; 2] = [Vec::new(), Vec::new()];
    for (i, row) in rows.iter_mut().enumerate() {
        let lineno = i + 2;
        let line = lines
            .get(i + 1)
            .ok_or_else(|| parse_err(lineno, 1, format!("missing row {}", i + 1)))?;
        let toks = tokens(line);
        if toks.len() != n {
            let col = toks.get(n).map_or(line.len() + 1, |t| t.0);
            return Err(parse_err(
                lineno,
                col,
                format!("expected {n} entries, found {}", toks.len()),
            ));
        }
        for (col, tok) in toks {
            row.push(number(lineno, col, tok)?);
        }
    }

    let meta = match lines.get(3) {
        None => None,
        Some(line) if line.is_empty() && lines.len() == 4 => None,
        Some(line) => {
            let toks = tokens(line);
            if toks.len() != 2 {
                return Err(parse_err(4, 1, "expected case=<tag> repaired=<0|1>"));
            }
            let (c, v) = key_value(4, toks[0], "case")?;
            let case = v.parse::<CaseTag>().map_err(|e| parse_err(4, c, e))?;
            let (c, v) = key_value(4, toks[1], "repaired")?;
            let repaired = match v {
                "0" => false,
                "1" => true,
                _ => return Err(parse_err(4, c, "repaired must be 0 or 1")),
            };
            Some(MatrixMeta { case, repaired })
        }
    };
    if let Some(extra) = lines.iter().skip(4).position(|l| !l.is_empty()) {
        return Err(parse_err(extra + 5, 1, "unexpected trailing content"));
    }
    Ok(MatrixFile {
        p,
        r,
        n,
        modulus,
        rows,
        meta,
    })
}

impl MatrixFile {
    /// Builds the field and the matrix; `allow_even` admits p = 2.
    pub fn load(&self, allow_even: bool) -> Result<(FieldCtx, GeneratorMatrix)> {
        let ctx = if allow_even {
            make_field_experimental(self.p, self.r)?
        } else {
            make_field(self.p, self.r)?
        };
        if ctx.modulus() != self.modulus.as_slice() {
            return Err(parse_err(
                1,
                1,
                format!(
                    "modulus {:?} differs from the canonical {:?} for p={} r={}",
                    self.modulus,
                    ctx.modulus(),
                    self.p,
                    self.r
                ),
            ));
        }
        let lift = |line: usize, row: &[u32]| -> Result<Vec<Element>> {
            row.iter()
                .enumerate()
                .map(|(i, &e)| ctx.element(e).map_err(|_| parse_err(line, i + 1, format!("entry {e} is not a field element"))))
                .collect()
        };
        let m = GeneratorMatrix::new(lift(2, &self.rows[0])?, lift(3, &self.rows[1])?)?;
        Ok((ctx, m))
    }
}

/// Flat certificate document with a fixed key order.
#[derive(Serialize)]
struct CertificateDoc<'a> {
    p: u32,
    r: u32,
    n: usize,
    case: Option<String>,
    repaired: Option<bool>,
    passes: bool,
    self_orthogonal: bool,
    rank: usize,
    min_distance: Option<usize>,
    dual_distance: Option<u8>,
    purity: &'a str,
    quantum: Option<QuantumParams>,
    oracle_agreement: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    experimental: Option<&'static str>,
}

pub const EXPERIMENTAL_MARKER: &str = "even characteristic: exploratory result, existence is an open question";

fn purity_label(p: Option<Purity>) -> &'static str {
    match p {
        Some(Purity::Pure) => "pure",
        Some(Purity::Impure) => "impure",
        Some(Purity::ZeroDimSpecial) => "zero_dim_special",
        None => "n/a",
    }
}

pub fn certificate_json(cert: &CodeCertificate, meta: Option<MatrixMeta>) -> String {
    let doc = CertificateDoc {
        p: cert.p,
        r: cert.r,
        n: cert.n,
        case: meta.map(|m| m.case.label()),
        repaired: meta.map(|m| m.repaired),
        passes: cert.passes(),
        self_orthogonal: cert.self_orthogonal,
        rank: cert.rank,
        min_distance: cert.min_distance,
        dual_distance: cert.dual_distance,
        purity: purity_label(cert.purity),
        quantum: cert.quantum,
        oracle_agreement: cert.oracle.as_str(),
        experimental: (cert.p == 2).then_some(EXPERIMENTAL_MARKER),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("certificate serializes");
    s.push('\n');
    s
}

pub fn certificate_text(cert: &CodeCertificate, meta: Option<MatrixMeta>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "field          GF({}^2), p={} r={}", cert.q, cert.p, cert.r);
    let _ = writeln!(out, "length         {}", cert.n);
    if let Some(m) = meta {
        let _ = writeln!(out, "case           {}{}", m.case, if m.repaired { " (repaired)" } else { "" });
    }
    let opt = |v: Option<String>| v.unwrap_or_else(|| "n/a".into());
    let _ = writeln!(out, "self-orthogonal {}", cert.self_orthogonal);
    let _ = writeln!(out, "rank           {}", cert.rank);
    let _ = writeln!(out, "min distance   {}", opt(cert.min_distance.map(|d| d.to_string())));
    let _ = writeln!(out, "dual distance  {}", opt(cert.dual_distance.map(|d| d.to_string())));
    let _ = writeln!(out, "purity         {}", purity_label(cert.purity));
    let _ = writeln!(out, "oracle         {}", cert.oracle.as_str());
    match cert.quantum {
        Some(qp) => {
            let _ = writeln!(out, "quantum        {qp}{}", if qp.mds { " MDS" } else { "" });
        }
        None => {
            let _ = writeln!(out, "quantum        n/a");
        }
    }
    if cert.p == 2 {
        let _ = writeln!(out, "note           {EXPERIMENTAL_MARKER}");
    }
    let _ = writeln!(out, "verdict        {}", if cert.passes() { "PASS" } else { "FAIL" });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::construct;
    use crate::verify::certify;

    #[test]
    fn h24_file_is_exact() {
        let ctx = make_field(3, 1).unwrap();
        let c = construct(&ctx, 4).unwrap();
        let meta = MatrixMeta {
            case: c.case,
            repaired: c.repaired,
        };
        let text = write_matrix(&ctx, &c.matrix, Some(meta));
        assert_eq!(text, "p=3 r=1 n=4 modulus=2,1,1\n1 1 1 0\n0 1 2 1\ncase=Q3_TABLE(4) repaired=0\n");
        let parsed = parse_matrix(&text).unwrap();
        assert_eq!(parsed.meta, Some(meta));
        let (ctx2, m2) = parsed.load(false).unwrap();
        assert_eq!(ctx2, ctx);
        assert_eq!(m2, c.matrix);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = parse_matrix("p=3 r=1 n=4 modulus=2,1,1\n1 1 1 0\n").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 3,
                column: 1,
                message: "missing row 2".into()
            }
        );
        let err = parse_matrix("p=3 r=1 n=4 modulus=2,1,1\n1 1 x 0\n0 1 2 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, column: 5, .. }));
        let err = parse_matrix("p=3 r=1 n=4 modulus=2,1,1\n1 1 1\n0 1 2 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, column: 6, .. }));
        assert!(matches!(parse_matrix(""), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_matrix("q=3 r=1 n=4 modulus=2,1,1\n"), Err(Error::Parse { line: 1, column: 1, .. })));
        let err = parse_matrix("p=3 r=1 n=2 modulus=2,1,1\n1 0\n0 1\ncase=C9 repaired=0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, column: 6, .. }));
    }

    #[test]
    fn wrong_modulus_or_entry() {
        let f = parse_matrix("p=3 r=1 n=2 modulus=1,0,1\n1 0\n0 1\n").unwrap();
        assert!(matches!(f.load(false), Err(Error::Parse { line: 1, .. })));
        let f = parse_matrix("p=3 r=1 n=2 modulus=2,1,1\n1 9\n0 1\n").unwrap();
        assert!(matches!(f.load(false), Err(Error::Parse { line: 2, column: 2, .. })));
    }

    #[test]
    fn certificate_key_order() {
        let ctx = make_field(3, 1).unwrap();
        let c = construct(&ctx, 4).unwrap();
        let cert = certify(&ctx, &c.matrix);
        let json = certificate_json(&cert, Some(MatrixMeta { case: c.case, repaired: false }));
        let keys: Vec<&str> = json
            .lines()
            .filter_map(|l| l.trim().strip_prefix('"'))
            .filter_map(|l| l.split('"').next())
            .collect();
        assert_eq!(
            keys,
            [
                "p", "r", "n", "case", "repaired", "passes", "self_orthogonal", "rank", "min_distance",
                "dual_distance", "purity", "quantum", "n", "k", "d", "q", "mds", "oracle_agreement"
            ]
        );
        assert!(json.contains("\"purity\": \"zero_dim_special\""));
        assert!(certificate_text(&cert, None).contains("[[4, 0, 3]]_3 MDS"));
    }
}
