//! Text formats for series (`.ncfps`, `.cfps`) and the JSON run report.
//!
//! ```text
//! # comment
//! nc alphabet=3 components=1 maxdeg=4
//! e 1
//! x1x2 -1/2
//! ```
//!
//! A `.cfps` file starts with `comm alphabet=<variables> components=<m> maxdeg=<N> tail=zero|unknown`
//! and lists exponent vectors such as `2,0` followed by one coefficient per component.
//! `tail=zero` marks a polynomial.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{FpaError, Result};
use crate::series::{parse_q, CommSeries, Monomial, NCSeries};
use crate::word::Word;

/// Line and 1-based column of a token.
type Pos = (usize, usize);

fn perr((line, column): Pos, msg: impl Into<String>) -> FpaError {
    FpaError::Parse { line, column, msg: msg.into() }
}

fn relabel(e: FpaError, at: Pos) -> FpaError {
    match e {
        FpaError::Parse { msg, .. } => perr(at, msg),
        FpaError::DegreeExceeded { len, maxdeg } => perr(at, format!("term of degree {len} above maxdeg {maxdeg}")),
        FpaError::ShapeMismatch(m) => perr(at, m),
        other => other,
    }
}

struct Header {
    kind: String,
    alphabet: usize,
    components: usize,
    maxdeg: usize,
    tail_zero: bool,
}

/// Non-empty lines with comments removed, split into positioned tokens.
fn content_lines(text: &str) -> impl Iterator<Item = Vec<(Pos, &str)>> {
    text.lines().enumerate().map(|(i, l)| tokens(i + 1, l.split('#').next().unwrap())).filter(|t| !t.is_empty())
}

fn tokens(line: usize, l: &str) -> Vec<(Pos, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (col, (i, ch)) in l.char_indices().enumerate() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some((col + 1, i)),
            (true, Some((c, s))) => {
                out.push(((line, c), &l[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some((c, s)) = start {
        out.push(((line, c), &l[s..]));
    }
    out
}

fn parse_header(toks: &[(Pos, &str)]) -> Result<Header> {
    let (at, kind) = toks[0];
    let line = (at.0, 1);
    if kind != "nc" && kind != "comm" {
        return Err(perr(at, format!("unknown series kind `{kind}`")));
    }
    let kind = kind.to_string();
    let (mut alphabet, mut components, mut maxdeg, mut tail_zero) = (None, None, None, false);
    for &(at, t) in &toks[1..] {
        let (k, v) = t.split_once('=').ok_or_else(|| perr(at, format!("expected key=value, got `{t}`")))?;
        let num = || v.parse::<usize>().map_err(|_| perr(at, format!("bad value for {k}: `{v}`")));
        match k {
            "alphabet" => alphabet = Some(num()?),
            "components" => components = Some(num()?),
            "maxdeg" => maxdeg = Some(num()?),
            "tail" if kind == "comm" => {
                tail_zero = match v {
                    "zero" => true,
                    "unknown" => false,
                    _ => return Err(perr(at, format!("tail must be zero or unknown, got `{v}`"))),
                }
            }
            _ => return Err(perr(at, format!("unknown header key `{k}`"))),
        }
    }
    let need = |x: Option<usize>, name: &str| x.ok_or_else(|| perr(line, format!("header is missing {name}")));
    let h = Header {
        kind,
        alphabet: need(alphabet, "alphabet")?,
        components: need(components, "components")?,
        maxdeg: need(maxdeg, "maxdeg")?,
        tail_zero,
    };
    if h.alphabet == 0 || h.components == 0 {
        return Err(perr(line, "alphabet and components must be positive"));
    }
    if h.kind == "nc" && h.alphabet > 255 {
        return Err(perr(line, "alphabet too large"));
    }
    Ok(h)
}

pub fn parse_ncfps(text: &str) -> Result<NCSeries> {
    let mut lines = content_lines(text);
    let header = lines.next().ok_or_else(|| perr((1, 1), "empty file"))?;
    let h = parse_header(&header)?;
    if h.kind != "nc" {
        return Err(perr(header[0].0, "expected an `nc` header"));
    }
    let mut s = NCSeries::zero(h.alphabet - 1, h.components, h.maxdeg);
    let mut seen = BTreeSet::new();
    for toks in lines {
        let (at, word) = toks[0];
        let w = Word::parse(word).map_err(|e| relabel(e, at))?;
        if !seen.insert(w.clone()) {
            return Err(perr(at, format!("duplicate word {w}")));
        }
        let cs = &toks[1..];
        if cs.len() != h.components {
            return Err(perr(at, format!("expected {} coefficients, found {}", h.components, cs.len())));
        }
        for (i, &(cat, c)) in cs.iter().enumerate() {
            let v = parse_q(c).map_err(|e| relabel(e, cat))?;
            s.set(w.clone(), i, v).map_err(|e| relabel(e, at))?;
        }
    }
    Ok(s)
}

pub fn write_ncfps(s: &NCSeries) -> String {
    let mut out = format!("nc alphabet={} components={} maxdeg={}\n", s.alphabet_size(), s.ell(), s.maxdeg());
    for w in s.support() {
        let cs = s.coeffs(&w).expect("support word within truncation");
        let cs: Vec<String> = cs.iter().map(|c| c.to_string()).collect();
        writeln!(out, "{w} {}", cs.join(" ")).unwrap();
    }
    out
}

pub fn parse_cfps(text: &str) -> Result<CommSeries> {
    let mut lines = content_lines(text);
    let header = lines.next().ok_or_else(|| perr((1, 1), "empty file"))?;
    let h = parse_header(&header)?;
    if h.kind != "comm" {
        return Err(perr(header[0].0, "expected a `comm` header"));
    }
    let mut d = CommSeries::zero(h.alphabet, h.components, h.maxdeg, false);
    let mut seen = BTreeSet::new();
    for toks in lines {
        let (at, exps) = toks[0];
        let k: Vec<u32> =
            exps.split(',').map(|e| e.parse::<u32>().map_err(|_| perr(at, format!("bad exponent vector `{exps}`")))).collect::<Result<_>>()?;
        if k.len() != h.alphabet {
            return Err(perr(at, format!("exponent vector of length {} for {} variables", k.len(), h.alphabet)));
        }
        let mono = Monomial(k);
        if mono.degree() > h.maxdeg {
            return Err(perr(at, format!("term of degree {} above maxdeg {}", mono.degree(), h.maxdeg)));
        }
        if !seen.insert(mono.clone()) {
            return Err(perr(at, format!("duplicate monomial {mono:?}")));
        }
        let cs = &toks[1..];
        if cs.len() != h.components {
            return Err(perr(at, format!("expected {} coefficients, found {}", h.components, cs.len())));
        }
        for (i, &(cat, c)) in cs.iter().enumerate() {
            let v = parse_q(c).map_err(|e| relabel(e, cat))?;
            d.add_coeff(mono.clone(), i, v).map_err(|e| relabel(e, at))?;
        }
    }
    d.set_polynomial(h.tail_zero);
    Ok(d)
}

pub fn write_cfps(d: &CommSeries) -> String {
    let mut out = format!(
        "comm alphabet={} components={} maxdeg={} tail={}\n",
        d.nvars(),
        d.ncomps(),
        d.maxdeg(),
        if d.is_polynomial() { "zero" } else { "unknown" }
    );
    for k in d.support() {
        let exps: Vec<String> = k.0.iter().map(|e| e.to_string()).collect();
        let cs: Vec<String> = (0..d.ncomps()).map(|i| d.terms(i).get(&k).cloned().unwrap_or_else(Zero::zero).to_string()).collect();
        writeln!(out, "{} {}", exps.join(","), cs.join(" ")).unwrap();
    }
    out
}

/// Writes through a temporary sibling and renames, so failed runs leave no partial file.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| std::io::Error::new(std::io::ErrorKind::InvalidInput, "output path has no file name"))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path).inspect_err(|_| {
        let _ = std::fs::remove_file(&tmp);
    })
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), pass, detail: detail.into() }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Report {
    pub command: String,
    pub inputs: Vec<String>,
    pub maxdeg: Option<usize>,
    pub result_path: Option<String>,
    pub checks: Vec<Check>,
}
