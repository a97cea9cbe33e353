//! Text format for state-space models and the shared block tokenizer used
//! by scenario files.
//!
//! A model block looks like
//!
//! ```text
//! model {
//!   name: sq
//!   scalar: rational
//!   dim: 3
//!   u: [0, 0, 1]
//!   omega_vertices: [[1,0,1], [0,1,1], [-1,0,1], [0,-1,1]]
//! }
//! ```
//!
//! Fields are `key: value` pairs separated by newlines or semicolons;
//! rational entries are written `p/q` and round-trip bit-exactly.

use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::scalar::{Backend, Scalar};
use crate::space::{make_state_space, StateSpace};

/// A parsed `key: value` block with its kind tag (`model`, `group`, ...).
#[derive(Debug, Clone)]
pub struct Block {
    pub kind: String,
    pub fields: Vec<(String, String)>,
}

impl Block {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::Parse(format!("{} block is missing `{key}`", self.kind)))
    }
}

/// Split a source file into `<kind> { ... }` blocks and bare statement
/// lines (anything outside braces).
pub fn parse_blocks(source: &str) -> Result<(Vec<Block>, Vec<String>)> {
    let mut blocks = Vec::new();
    let mut statements = Vec::new();
    let mut rest = source;
    while let Some(next) = next_token_start(rest) {
        rest = next;
        if let Some((head, after_brace)) = split_block_head(rest) {
            let (body, tail) = take_braced(after_brace)
                .ok_or_else(|| Error::Parse(format!("unclosed block `{head}`")))?;
            blocks.push(Block {
                kind: head.to_string(),
                fields: parse_fields(body)?,
            });
            rest = tail;
        } else {
            let line_end = rest.find('\n').unwrap_or(rest.len());
            let line = rest[..line_end].trim();
            if !line.is_empty() {
                statements.push(line.to_string());
            }
            rest = &rest[line_end..];
        }
    }
    Ok((blocks, statements))
}

fn next_token_start(s: &str) -> Option<&str> {
    let mut rest = s;
    loop {
        rest = rest.trim_start();
        if let Some(stripped) = rest.strip_prefix('#') {
            let end = stripped.find('\n').map(|i| i + 1).unwrap_or(stripped.len());
            rest = &stripped[end..];
            continue;
        }
        if rest.is_empty() {
            return None;
        }
        return Some(rest);
    }
}

fn split_block_head(s: &str) -> Option<(&str, &str)> {
    let brace = s.find('{')?;
    let head = s[..brace].trim();
    if head.is_empty()
        || !head
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
    {
        return None;
    }
    // the head must be on the same line as the brace
    if s[..brace].contains('\n') {
        return None;
    }
    Some((head, &s[brace + 1..]))
}

fn take_braced(s: &str) -> Option<(&str, &str)> {
    let mut depth = 1;
    for (i, c) in s.char_indices() {
        match c {
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth == 0 {
                    return Some((&s[..i], &s[i + 1..]));
                }
            }
            _ => {}
        }
    }
    None
}

fn parse_fields(body: &str) -> Result<Vec<(String, String)>> {
    // strip comments first, then split on newlines and semicolons outside
    // brackets
    let stripped: String = body
        .lines()
        .map(|line| line.split_once('#').map_or(line, |(head, _)| head))
        .collect::<Vec<_>>()
        .join("\n");
    let mut fields = Vec::new();
    let mut current = String::new();
    let mut depth = 0i32;
    let push = |buf: &mut String, fields: &mut Vec<(String, String)>| -> Result<()> {
        let item = buf.trim();
        if !item.is_empty() {
            let (key, value) = item
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected `key: value`, got `{item}`")))?;
            fields.push((key.trim().to_string(), value.trim().to_string()));
        }
        buf.clear();
        Ok(())
    };
    for c in stripped.chars() {
        match c {
            '[' | '(' => {
                depth += 1;
                current.push(c);
            }
            ']' | ')' => {
                depth -= 1;
                current.push(c);
            }
            '\n' | ';' if depth == 0 => push(&mut current, &mut fields)?,
            _ => current.push(c),
        }
    }
    push(&mut current, &mut fields)?;
    Ok(fields)
}

/// Parse `[a, b, c]` with scalar entries.
pub fn parse_vector<S: Scalar>(text: &str) -> Result<Vector<S>> {
    let inner = text
        .trim()
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected a vector, got `{text}`")))?;
    let mut entries = Vec::new();
    for item in split_top_level(inner) {
        entries.push(S::parse(&item)?);
    }
    Ok(Vector::new(entries))
}

/// Parse `[[..],[..]]` as a list of vectors.
pub fn parse_vector_list<S: Scalar>(text: &str) -> Result<Vec<Vector<S>>> {
    let inner = text
        .trim()
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected a list, got `{text}`")))?;
    let mut out = Vec::new();
    for item in split_top_level(inner) {
        out.push(parse_vector(&item)?);
    }
    Ok(out)
}

/// Split on commas not nested inside brackets.
pub fn split_top_level(text: &str) -> Vec<String> {
    let mut items = Vec::new();
    let mut depth = 0i32;
    let mut current = String::new();
    for c in text.chars() {
        match c {
            '[' | '(' => {
                depth += 1;
                current.push(c);
            }
            ']' | ')' => {
                depth -= 1;
                current.push(c);
            }
            ',' if depth == 0 => {
                if !current.trim().is_empty() {
                    items.push(current.trim().to_string());
                }
                current.clear();
            }
            _ => current.push(c),
        }
    }
    if !current.trim().is_empty() {
        items.push(current.trim().to_string());
    }
    items
}

/// Read a state space from a model block.
pub fn model_from_block<S: Scalar>(block: &Block) -> Result<StateSpace<S>> {
    if block.kind != "model" {
        return Err(Error::Parse(format!("expected a model block, got {}", block.kind)));
    }
    let name = block.require("name")?;
    if let Some(kind) = block.get("kind") {
        let kind = crate::space::parse_model_kind(kind)?;
        let mut space = crate::space::make_model::<S>(&kind)?;
        space.name = name.to_string();
        return Ok(space);
    }
    if let Some(scalar) = block.get("scalar") {
        let declared = match scalar {
            "rational" => Backend::Rational,
            "f64" => Backend::Float64,
            other => return Err(Error::Parse(format!("unknown scalar backend `{other}`"))),
        };
        if declared != S::BACKEND {
            return Err(Error::BackendMismatch(format!(
                "model `{name}` declares {scalar}, running on {}",
                S::BACKEND
            )));
        }
    }
    let dim: usize = block
        .require("dim")?
        .parse()
        .map_err(|_| Error::Parse("bad dim".into()))?;
    let unit: Vector<S> = parse_vector(block.require("u")?)?;
    let vertices: Vec<Vector<S>> = parse_vector_list(block.require("omega_vertices")?)?;
    if unit.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: unit.dim(),
        });
    }
    make_state_space(name, vertices, unit)
}

/// Write a state space as a model block; exact on the rational backend.
pub fn model_to_string<S: Scalar>(space: &StateSpace<S>) -> String {
    let verts: Vec<String> = space.omega_vertices.iter().map(|v| v.repr()).collect();
    format!(
        "model {{\n  name: {}\n  scalar: {}\n  dim: {}\n  u: {}\n  omega_vertices: [{}]\n}}\n",
        space.name,
        S::BACKEND,
        space.dim,
        space.unit.repr(),
        verts.join(", ")
    )
}
