//! Spec files (`.phorma`) and index images (`.phx`).
//!
//! Spec files are line oriented. `#` starts a comment and indented lines
//! continue the previous directive:
//!
//! ```text
//! dim 7
//! bounds 15^2 17^2 19^3
//! B: (a2 >= a1) & (a4 >= a3)
//!    & (a7 >= a6)
//! C: all | list (3,4),(7) | expr d1 >= d2
//! ```
//!
//! `B-list: 1,1,2; 2,1,1` replaces `B` with explicit reduced sequences.
//!
//! Index images are text: a version header, the spec echo, the reduced
//! table, the vertex store bucket by bucket, a summary, and a SHA-256
//! trailer over everything before it.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::boolexpr::{parse_with_prefix, BoolExpr};
use crate::compositions::{CompConstraint, Composition};
use crate::count::Count;
use crate::error::{Error, Result};
use crate::hfamily::HVertexStore;
use crate::index::PhormaIndex;
use crate::seqcore::{AscendingSeq, Bounds, PhormaSpec, ReducedSeq, Restriction};

pub const FORMAT_VERSION: u32 = 1;

/// Whitespace-separated positive integers; `v^k` repeats `v` k times.
pub fn parse_bounds_list(text: &str) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    for tok in text.split_whitespace() {
        let (v, k) = match tok.split_once('^') {
            Some((v, k)) => (v, k),
            None => (tok, "1"),
        };
        let bad = || Error::Spec(format!("bad bound `{tok}`"));
        let v: u32 = v.parse().map_err(|_| bad())?;
        let k: usize = k.parse().map_err(|_| bad())?;
        if v == 0 || k == 0 {
            return Err(bad());
        }
        out.extend(std::iter::repeat_n(v, k));
    }
    if out.is_empty() {
        return Err(Error::Spec("empty bounds".into()));
    }
    Ok(out)
}

/// Comma-separated positive integers, optionally wrapped in parentheses.
pub fn parse_seq(text: &str) -> Result<Vec<u32>> {
    let t = text.trim();
    let t = t.strip_prefix('(').and_then(|t| t.strip_suffix(')')).unwrap_or(t);
    let bad = || Error::InvalidSequence(format!("`{}`", text.trim()));
    if t.trim().is_empty() {
        return Err(bad());
    }
    t.split(',').map(|x| x.trim().parse::<u32>().map_err(|_| bad())).collect()
}

/// A directive with its text and the source position of every byte.
struct Directive {
    key: &'static str,
    line: usize,
    text: String,
    pos: Vec<(usize, usize)>,
}

impl Directive {
    fn at(&self, offset: usize) -> (usize, usize) {
        match self.pos.get(offset).or(self.pos.last()) {
            Some(&p) => p,
            None => (self.line, 1),
        }
    }

    fn error(&self, offset: usize, message: impl Into<String>) -> Error {
        let (line, column) = self.at(offset);
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    /// Rewrites an error from parsing `self.text` into source coordinates.
    fn relocate(&self, e: Error) -> Error {
        match e {
            Error::Syntax { column, message, .. } => self.error(column.saturating_sub(1), message),
            other => self.error(0, other.to_string()),
        }
    }

    fn leading_ws(&self) -> usize {
        self.text.len() - self.text.trim_start().len()
    }
}

const KEYS: [&str; 5] = ["dim", "bounds", "B-list:", "B:", "C:"];

fn split_directives(text: &str) -> Result<Vec<Directive>> {
    let mut out: Vec<Directive> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let indent = body.len() - body.trim_start().len();
        if indent > 0 {
            if let Some(d) = out.last_mut().filter(|d| d.key != "dim" && d.key != "bounds") {
                d.text.push(' ');
                d.pos.push((line_no, 1));
                d.text.push_str(body);
                d.pos.extend((0..body.len()).map(|c| (line_no, c + 1)));
                continue;
            }
            return Err(Error::Syntax {
                line: line_no,
                column: indent + 1,
                message: "continuation line without a directive".into(),
            });
        }
        let key = KEYS
            .iter()
            .find(|k| {
                body.strip_prefix(*k)
                    .is_some_and(|rest| k.ends_with(':') || rest.is_empty() || rest.starts_with(char::is_whitespace))
            })
            .ok_or_else(|| Error::Syntax {
                line: line_no,
                column: 1,
                message: format!("unknown directive `{}`", body.split_whitespace().next().unwrap_or("")),
            })?;
        if let Some(prev) = out.iter().find(|d| d.key == *key) {
            return Err(Error::Syntax {
                line: line_no,
                column: 1,
                message: format!("duplicate `{key}` (first at line {})", prev.line),
            });
        }
        let start = key.len();
        out.push(Directive {
            key,
            line: line_no,
            text: body[start..].to_string(),
            pos: (start..body.len()).map(|c| (line_no, c + 1)).collect(),
        });
    }
    Ok(out)
}

/// Items of `text` separated by `sep`, each with its byte offset.
fn items(text: &str, sep: char) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = 0;
    for (k, c) in text.char_indices() {
        if c == sep {
            out.push((start, &text[start..k]));
            start = k + 1;
        }
    }
    out.push((start, &text[start..]));
    out.into_iter().filter(|(_, s)| !s.trim().is_empty()).collect()
}

/// `(x,y),(z)` groups with their offsets.
fn groups(d: &Directive, from: usize) -> Result<Vec<(usize, Vec<u32>)>> {
    let text = &d.text;
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut k = from;
    loop {
        while k < bytes.len() && (bytes[k] == b',' || bytes[k].is_ascii_whitespace()) {
            k += 1;
        }
        if k == bytes.len() {
            return Ok(out);
        }
        if bytes[k] != b'(' {
            return Err(d.error(k, "expected `(`"));
        }
        let close = text[k..].find(')').ok_or_else(|| d.error(k, "unclosed `(`"))? + k;
        let seq = parse_seq(&text[k..=close]).map_err(|e| d.error(k, e.to_string()))?;
        out.push((k, seq));
        k = close + 1;
    }
}

pub fn parse_spec(text: &str) -> Result<PhormaSpec> {
    let ds = split_directives(text)?;
    let get = |key: &str| ds.iter().find(|d| d.key == key);
    let bd = get("bounds").ok_or_else(|| Error::Syntax {
        line: 1,
        column: 1,
        message: "missing `bounds`".into(),
    })?;
    let bounds = parse_bounds_list(&bd.text).map_err(|e| bd.relocate(e))?;
    let n = bounds.len();
    if let Some(dd) = get("dim") {
        let dim: usize = dd.text.trim().parse().map_err(|_| dd.error(dd.leading_ws(), "expected an integer"))?;
        if dim != n {
            return Err(bd.error(bd.leading_ws(), format!("{n} bounds given but dim is {dim}")));
        }
    }
    let restriction = match (get("B:"), get("B-list:")) {
        (Some(b), Some(l)) => {
            return Err(l.error(0, format!("`B-list:` conflicts with `B:` on line {}", b.line)));
        }
        (Some(b), None) => Restriction::Expr(parse_with_prefix(&b.text, n, 'a').map_err(|e| b.relocate(e))?),
        (None, Some(l)) => {
            let mut list = Vec::new();
            for (off, item) in items(&l.text, ';') {
                let seq = parse_seq(item)
                    .and_then(ReducedSeq::new)
                    .map_err(|e| l.error(off + item.len() - item.trim_start().len(), e.to_string()))?;
                if seq.len() != n {
                    return Err(l.error(off, format!("reduced sequence has length {}, dim is {n}", seq.len())));
                }
                list.push(seq);
            }
            Restriction::List(list)
        }
        (None, None) => Restriction::Expr(BoolExpr::Empty),
    };
    let constraint = match get("C:") {
        None => CompConstraint::All,
        Some(c) => {
            let lead = c.leading_ws();
            let body = c.text.trim();
            let word = body.split_whitespace().next().unwrap_or("");
            let rest = lead + word.len();
            match word {
                "all" if body == "all" => CompConstraint::All,
                "list" => {
                    let mut comps = Vec::new();
                    for (off, parts) in groups(c, rest)? {
                        let comp = Composition::new(parts).map_err(|e| c.error(off, e.to_string()))?;
                        if comp.n() as usize != n {
                            return Err(c.error(off, format!("{comp} is not a composition of {n}")));
                        }
                        comps.push(comp);
                    }
                    CompConstraint::Explicit(comps)
                }
                "expr" => {
                    let e = parse_with_prefix(&c.text[rest..], n, 'd').map_err(|e| match e {
                        Error::Syntax { column, message, .. } => c.error(rest + column - 1, message),
                        other => c.error(rest, other.to_string()),
                    })?;
                    CompConstraint::Restricted(e)
                }
                _ => return Err(c.error(lead, "expected `all`, `list` or `expr`")),
            }
        }
    };
    PhormaSpec::new(Bounds::new(bounds)?, restriction, constraint)
}

pub fn read_spec_file(path: impl AsRef<Path>) -> Result<PhormaSpec> {
    let text = std::fs::read_to_string(path.as_ref()).map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_spec(&text)
}

fn join(seq: &[u32]) -> String {
    seq.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

/// Canonical spec text; `parse_spec` reads it back to an equal spec.
pub fn spec_to_text(spec: &PhormaSpec) -> String {
    let mut s = String::new();
    let bounds: Vec<String> = spec.bounds().as_slice().iter().map(|v| v.to_string()).collect();
    writeln!(s, "dim {}", spec.n()).unwrap();
    writeln!(s, "bounds {}", bounds.join(" ")).unwrap();
    match spec.restriction() {
        Restriction::Expr(BoolExpr::Empty) => s.push_str("B:\n"),
        Restriction::Expr(e) => writeln!(s, "B: {e}").unwrap(),
        Restriction::List(list) => {
            let items: Vec<String> = list.iter().map(|b| join(b.as_slice())).collect();
            writeln!(s, "B-list: {}", items.join("; ")).unwrap();
        }
    }
    match spec.constraint() {
        CompConstraint::All => s.push_str("C: all\n"),
        CompConstraint::Explicit(list) => {
            let items: Vec<String> = list.iter().map(|c| format!("({})", join(c.parts()))).collect();
            writeln!(s, "C: list {}", items.join(",")).unwrap();
        }
        CompConstraint::Restricted(e) => writeln!(s, "C: expr {}", e.display_with('d')).unwrap(),
    }
    s
}

/// Short stable identifier of a spec.
pub fn spec_id(spec: &PhormaSpec) -> String {
    hex::encode(&Sha256::digest(spec_to_text(spec).as_bytes())[..8])
}

/// The index image as text.
pub fn index_to_string<C: Count>(idx: &PhormaIndex<C>) -> String {
    let mut s = String::new();
    writeln!(s, "phx {FORMAT_VERSION}").unwrap();
    let spec = spec_to_text(idx.spec());
    writeln!(s, "[spec] {}", spec.lines().count()).unwrap();
    s.push_str(&spec);
    writeln!(s, "[reduced] {}", idx.reduced().len()).unwrap();
    for e in idx.reduced() {
        writeln!(s, "{} {} {} {}", join(e.beta.as_slice()), join(e.roof.as_slice()), e.order, e.offset).unwrap();
    }
    let store = idx.store();
    writeln!(s, "[store] {}", store.buckets().len()).unwrap();
    for b in store.buckets() {
        writeln!(s, "bucket {} {} {}", b.last, b.len, b.vertices.len()).unwrap();
        for v in &b.vertices {
            let w = v.w_order().map_or("-".to_string(), |w| w.to_string());
            writeln!(s, "{} {} {}", join(v.seq()), v.order(), w).unwrap();
        }
    }
    let st = idx.stats();
    s.push_str("[summary]\n");
    writeln!(s, "total {}", idx.count()).unwrap();
    for (k, v) in summary_ints(idx) {
        writeln!(s, "{k} {v}").unwrap();
    }
    writeln!(s, "mu {:.6}", st.mu).unwrap();
    writeln!(s, "density {:.9}", st.density).unwrap();
    let digest = hex::encode(Sha256::digest(s.as_bytes()));
    writeln!(s, "checksum {digest}").unwrap();
    s
}

fn summary_ints<C: Count>(idx: &PhormaIndex<C>) -> [(&'static str, usize); 9] {
    let st = idx.stats();
    [
        ("v_g", st.v_g),
        ("v_h", st.v_h),
        ("red_count", st.red_count),
        ("roof_count", st.roof_count),
        ("max_roof_count", st.max_roof_count),
        ("lambda", st.lambda),
        ("nu", st.nu),
        ("a_star", st.a_star as usize),
        ("n_star", st.n_star),
    ]
}

pub fn save_index<C: Count, W: Write>(idx: &PhormaIndex<C>, mut sink: W) -> Result<()> {
    sink.write_all(index_to_string(idx).as_bytes())
        .and_then(|_| sink.flush())
        .map_err(|e| Error::Io(e.to_string()))
}

pub fn load_index<C: Count, R: Read>(mut source: R) -> Result<PhormaIndex<C>> {
    let mut text = String::new();
    source.read_to_string(&mut text).map_err(|e| Error::Io(e.to_string()))?;
    index_from_str(&text)
}

struct Lines<'a> {
    it: std::str::Lines<'a>,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str> {
        self.it.next().ok_or(Error::Truncated)
    }

    fn header(&mut self, name: &str) -> Result<usize> {
        let line = self.next()?;
        line.strip_prefix(name)
            .and_then(|r| r.trim().parse().ok())
            .ok_or_else(|| Error::Corrupt(format!("expected `{name} <count>`, got `{line}`")))
    }
}

fn corrupt(what: &str, line: &str) -> Error {
    Error::Corrupt(format!("bad {what} line `{line}`"))
}

fn num<C: Count>(tok: &str) -> Option<C> {
    tok.parse().ok()
}

pub fn index_from_str<C: Count>(text: &str) -> Result<PhormaIndex<C>> {
    let first = text.lines().next().ok_or(Error::Truncated)?;
    let version = first
        .strip_prefix("phx ")
        .ok_or_else(|| Error::Corrupt("missing `phx` header".into()))?
        .trim();
    if version != FORMAT_VERSION.to_string() {
        return Err(Error::VersionMismatch(version.to_string()));
    }
    let body_end = match text.strip_suffix('\n').and_then(|t| t.rfind('\n')) {
        Some(k) if text[k + 1..].starts_with("checksum ") => k + 1,
        _ => return Err(Error::Truncated),
    };
    let (body, trailer) = text.split_at(body_end);
    let stored = trailer.trim_end().strip_prefix("checksum ").unwrap_or("");
    if hex::encode(Sha256::digest(body.as_bytes())) != stored {
        return Err(Error::Checksum);
    }

    let mut lines = Lines { it: body.lines() };
    lines.next()?;
    let spec_lines = lines.header("[spec]")?;
    let mut spec_text = String::new();
    for _ in 0..spec_lines {
        spec_text.push_str(lines.next()?);
        spec_text.push('\n');
    }
    let spec = parse_spec(&spec_text)?;

    let nred = lines.header("[reduced]")?;
    let mut rows = Vec::with_capacity(nred);
    let mut stored_rows = Vec::with_capacity(nred);
    for _ in 0..nred {
        let line = lines.next()?;
        let f: Vec<&str> = line.split(' ').collect();
        let [beta, roof, order, offset] = f[..] else {
            return Err(corrupt("reduced", line));
        };
        let beta = parse_seq(beta).and_then(ReducedSeq::new).map_err(|_| corrupt("reduced", line))?;
        let roof = parse_seq(roof).and_then(AscendingSeq::new).map_err(|_| corrupt("reduced", line))?;
        let order: C = num(order).ok_or_else(|| corrupt("reduced", line))?;
        let offset: C = num(offset).ok_or_else(|| corrupt("reduced", line))?;
        rows.push((beta, roof));
        stored_rows.push((order, offset));
    }

    let nbuckets = lines.header("[store]")?;
    let mut vertices = HashSet::new();
    let mut stored_vertices = Vec::new();
    for _ in 0..nbuckets {
        let line = lines.next()?;
        let size: usize = match line.split(' ').collect::<Vec<_>>()[..] {
            ["bucket", _, _, size] => size.parse().map_err(|_| corrupt("bucket", line))?,
            _ => return Err(corrupt("bucket", line)),
        };
        for _ in 0..size {
            let line = lines.next()?;
            let f: Vec<&str> = line.split(' ').collect();
            let [seq, order, w] = f[..] else {
                return Err(corrupt("vertex", line));
            };
            let seq = parse_seq(seq).map_err(|_| corrupt("vertex", line))?;
            let order: C = num(order).ok_or_else(|| corrupt("vertex", line))?;
            let w: Option<C> = match w {
                "-" => None,
                w => Some(num(w).ok_or_else(|| corrupt("vertex", line))?),
            };
            if !vertices.insert(seq.clone()) {
                return Err(corrupt("duplicate vertex", line));
            }
            stored_vertices.push((seq, order, w));
        }
    }

    let mut roofs: Vec<AscendingSeq> = rows.iter().map(|(_, r)| r.clone()).collect();
    roofs.sort();
    roofs.dedup();
    let store = HVertexStore::<C>::from_vertex_set(vertices, &roofs)?;
    for (seq, order, w) in &stored_vertices {
        let v = store.vertex(seq).ok_or_else(|| Error::VertexNotFound(join(seq)))?;
        if v.order() != order || v.w_order() != w.as_ref() {
            return Err(Error::Corrupt(format!("order of ({}) does not match its successors", join(seq))));
        }
    }
    let idx = PhormaIndex::assemble(spec, rows, store)?;
    for (e, (order, offset)) in idx.reduced().iter().zip(&stored_rows) {
        if &e.order != order || &e.offset != offset {
            return Err(Error::Corrupt(format!("row {} disagrees with the store", e.beta)));
        }
    }

    if lines.next()? != "[summary]" {
        return Err(Error::Corrupt("missing summary".into()));
    }
    let line = lines.next()?;
    if line.strip_prefix("total ").and_then(num::<C>).as_ref() != Some(idx.count()) {
        return Err(Error::Corrupt(format!("total disagrees: `{line}`")));
    }
    for (k, v) in summary_ints(&idx) {
        let line = lines.next()?;
        if line != format!("{k} {v}") {
            return Err(Error::Corrupt(format!("summary disagrees: `{line}`")));
        }
    }
    Ok(idx)
}

pub fn save_index_file<C: Count>(idx: &PhormaIndex<C>, path: impl AsRef<Path>) -> Result<()> {
    let f = std::fs::File::create(path.as_ref()).map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    save_index(idx, std::io::BufWriter::new(f))
}

pub fn load_index_file<C: Count>(path: impl AsRef<Path>) -> Result<PhormaIndex<C>> {
    let f = std::fs::File::open(path.as_ref()).map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    load_index(std::io::BufReader::new(f))
}
