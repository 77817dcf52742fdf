//! Line-oriented text format for structures.
//!
//! ```text
//! kind two|three
//! pred <name> <arity>        # eq is implicit
//! node <id>                  # declaration order is the canonical order
//! summary <id>               # marks eq(id,id) = 1/2 (3-valued only)
//! <pred> <id>... = 0|1|1/2   # omitted tuples default to 0 in 2-valued
//!                            # files; 3-valued files list every tuple
//! ```
//!
//! Blank lines and `#` comments are accepted on input and never emitted.

use super::{table_len, ThreeValuedStructure, TruthValue, TwoValuedStructure, Violation};
use crate::error::Error;
use crate::logic::{Vocabulary, EQ};

/// A structure loaded from the text format.
#[derive(Debug, Clone)]
pub enum StructureFile {
    Two(TwoValuedStructure),
    Three(ThreeValuedStructure),
}

impl StructureFile {
    pub fn vocabulary(&self) -> &Vocabulary {
        match self {
            StructureFile::Two(s) => &s.voc,
            StructureFile::Three(s) => &s.voc,
        }
    }

    pub fn as_two(&self) -> Option<&TwoValuedStructure> {
        match self {
            StructureFile::Two(s) => Some(s),
            StructureFile::Three(_) => None,
        }
    }

    pub fn as_three(&self) -> Option<&ThreeValuedStructure> {
        match self {
            StructureFile::Three(s) => Some(s),
            StructureFile::Two(_) => None,
        }
    }
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::StructureFile { line, msg: msg.into() }
}

/// Parses the text format. 3-valued files must give a fact for every non-`eq`
/// tuple; missing tuples are reported as violations.
pub fn parse_structure_file(text: &str) -> Result<StructureFile, Error> {
    let mut kind: Option<bool> = None; // true = three
    let mut preds: Vec<(String, usize)> = Vec::new();
    let mut nodes: Vec<String> = Vec::new();
    let mut summaries: Vec<(usize, String)> = Vec::new();
    let mut facts: Vec<(usize, Vec<String>, TruthValue)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        match toks[0] {
            "kind" => {
                if kind.is_some() {
                    return Err(err(lineno, "duplicate `kind` line"));
                }
                match toks.get(1) {
                    Some(&"two") => kind = Some(false),
                    Some(&"three") => kind = Some(true),
                    _ => return Err(err(lineno, "expected `kind two` or `kind three`")),
                }
            }
            "pred" => {
                if toks.len() != 3 {
                    return Err(err(lineno, "expected `pred <name> <arity>`"));
                }
                let arity: usize =
                    toks[2].parse().map_err(|_| err(lineno, "arity must be a non-negative integer"))?;
                preds.push((toks[1].to_string(), arity));
            }
            "node" => {
                if toks.len() != 2 {
                    return Err(err(lineno, "expected `node <id>`"));
                }
                nodes.push(toks[1].to_string());
            }
            "summary" => {
                if toks.len() != 2 {
                    return Err(err(lineno, "expected `summary <id>`"));
                }
                summaries.push((lineno, toks[1].to_string()));
            }
            pred => {
                let eq_pos = toks.iter().position(|t| *t == "=");
                let eq_pos = eq_pos.ok_or_else(|| err(lineno, "expected `<pred> <id>... = <value>`"))?;
                if eq_pos + 2 != toks.len() {
                    return Err(err(lineno, "expected exactly one value after `=`"));
                }
                let value: TruthValue = toks[eq_pos + 1]
                    .parse()
                    .map_err(|_| err(lineno, "value must be 0, 1 or 1/2"))?;
                if pred == EQ {
                    return Err(err(lineno, "eq is implicit; use node/summary lines"));
                }
                facts.push((lineno, toks[..eq_pos].iter().map(|t| t.to_string()).collect(), value));
            }
        }
    }

    let three = kind.ok_or_else(|| err(0, "missing `kind` line"))?;
    let voc = Vocabulary::new(preds)?;

    if three {
        let mut s = ThreeValuedStructure::new(&voc, nodes)?;
        for (lineno, id) in summaries {
            s.mark_summary(&id).map_err(|_| err(lineno, format!("unknown node `{id}`")))?;
        }
        let mut seen: Vec<Vec<bool>> =
            (0..voc.len()).map(|p| vec![false; table_len(s.node_count(), voc.arity(p))]).collect();
        for (lineno, toks, value) in facts {
            let (p, tuple) = resolve_fact(&voc, &s.universe, &toks, lineno)?;
            let idx = super::tuple_index(s.node_count(), &tuple);
            if seen[p][idx] {
                return Err(err(lineno, "duplicate fact"));
            }
            seen[p][idx] = true;
            s.set(p, &tuple, value);
        }
        let mut missing = Vec::new();
        let mut buf = Vec::new();
        for (p, decl) in voc.decls() {
            if p == voc.eq_index() {
                continue;
            }
            for (idx, &covered) in seen[p].iter().enumerate() {
                if !covered {
                    super::decode_tuple(s.node_count(), decl.arity, idx, &mut buf);
                    missing.push(Violation::MissingFact {
                        pred: decl.name.clone(),
                        tuple: buf.iter().map(|&u| s.universe[u].clone()).collect(),
                    });
                }
            }
        }
        if !missing.is_empty() {
            return Err(Error::InvalidStructure(missing));
        }
        Ok(StructureFile::Three(s))
    } else {
        if let Some((lineno, _)) = summaries.first() {
            return Err(err(*lineno, "summary nodes are not allowed in 2-valued files"));
        }
        let mut s = TwoValuedStructure::new(&voc, nodes)?;
        for (lineno, toks, value) in facts {
            let (p, tuple) = resolve_fact(&voc, &s.universe, &toks, lineno)?;
            match value.as_bool() {
                Some(b) => s.set(p, &tuple, b),
                None => return Err(err(lineno, "1/2 is not allowed in a 2-valued file")),
            }
        }
        Ok(StructureFile::Two(s))
    }
}

fn resolve_fact(
    voc: &Vocabulary,
    universe: &[String],
    toks: &[String],
    lineno: usize,
) -> Result<(usize, Vec<usize>), Error> {
    let pred = &toks[0];
    let p = voc
        .pred_index(pred)
        .ok_or_else(|| err(lineno, format!("unknown predicate `{pred}`")))?;
    let args = &toks[1..];
    if args.len() != voc.arity(p) {
        return Err(err(
            lineno,
            format!("predicate `{pred}` has arity {}, got {} node(s)", voc.arity(p), args.len()),
        ));
    }
    let mut tuple = Vec::with_capacity(args.len());
    for id in args {
        let u = universe
            .iter()
            .position(|n| n == id)
            .ok_or_else(|| err(lineno, format!("unknown node `{id}`")))?;
        tuple.push(u);
    }
    Ok((p, tuple))
}

fn write_header(out: &mut String, kind: &str, voc: &Vocabulary, nodes: &[String]) {
    out.push_str("kind ");
    out.push_str(kind);
    out.push('\n');
    for (p, decl) in voc.decls() {
        if p == voc.eq_index() {
            continue;
        }
        out.push_str(&format!("pred {} {}\n", decl.name, decl.arity));
    }
    for id in nodes {
        out.push_str(&format!("node {id}\n"));
    }
}

pub(super) fn write_two(s: &TwoValuedStructure) -> String {
    let mut out = String::new();
    let voc = &s.voc;
    write_header(&mut out, "two", voc, &s.universe);
    let n = s.node_count();
    let mut buf = Vec::new();
    for (p, decl) in voc.decls() {
        if p == voc.eq_index() {
            continue;
        }
        for idx in 0..table_len(n, decl.arity) {
            if s.raw_table(p)[idx] {
                super::decode_tuple(n, decl.arity, idx, &mut buf);
                push_fact(&mut out, &decl.name, &buf, &s.universe, "1");
            }
        }
    }
    out
}

pub(super) fn write_three(s: &ThreeValuedStructure) -> String {
    let mut out = String::new();
    let voc = &s.voc;
    write_header(&mut out, "three", voc, &s.universe);
    for (u, id) in s.universe.iter().enumerate() {
        if s.is_summary(u) {
            out.push_str(&format!("summary {id}\n"));
        }
    }
    let n = s.node_count();
    let mut buf = Vec::new();
    for (p, decl) in voc.decls() {
        if p == voc.eq_index() {
            continue;
        }
        for idx in 0..table_len(n, decl.arity) {
            super::decode_tuple(n, decl.arity, idx, &mut buf);
            let value = s.tables[p][idx].to_string();
            push_fact(&mut out, &decl.name, &buf, &s.universe, &value);
        }
    }
    out
}

fn push_fact(out: &mut String, pred: &str, tuple: &[usize], universe: &[String], value: &str) {
    out.push_str(pred);
    for &u in tuple {
        out.push(' ');
        out.push_str(&universe[u]);
    }
    out.push_str(" = ");
    out.push_str(value);
    out.push('\n');
}

/// Serializes either kind of structure.
pub fn write_structure_file(s: &StructureFile) -> String {
    match s {
        StructureFile::Two(s) => write_two(s),
        StructureFile::Three(s) => write_three(s),
    }
}
