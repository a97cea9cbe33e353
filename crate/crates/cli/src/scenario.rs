//! Scenario file parsing: named models, composites and groups, an ordered
//! task list, and assert statements checked against task results.
//!
//! ```text
//! scenario { backend: rational; seed: 7 }
//! model { name: A; kind: polygon(4) }
//! composite { name: S; recipe: min(A, max(A, A)) }
//! group { name: G; model: A; kind: cyclic(4) }
//! task teleport-synthesize t1 { model: A; group: G }
//! assert t1 deterministic true
//! ```

use gptt_core::error::{Error, Result};
use gptt_core::io::{parse_blocks, split_top_level, Block};

#[derive(Debug, Clone)]
pub struct ScenarioFile {
    pub backend: Option<String>,
    pub seed: u64,
    pub tol: Option<f64>,
    pub models: Vec<Block>,
    pub composites: Vec<(String, RecipeExpr)>,
    pub groups: Vec<GroupDef>,
    pub protocols: Vec<Block>,
    pub tasks: Vec<TaskDef>,
    pub asserts: Vec<AssertDef>,
}

#[derive(Debug, Clone)]
pub struct GroupDef {
    pub name: String,
    pub model: String,
    pub kind: String,
}

#[derive(Debug, Clone)]
pub struct TaskDef {
    pub kind: String,
    pub name: String,
    pub block: Block,
}

#[derive(Debug, Clone)]
pub struct AssertDef {
    pub task: String,
    pub key: String,
    pub expected: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RecipeExpr {
    Leaf(String),
    Min(Vec<RecipeExpr>),
    Max(Vec<RecipeExpr>),
}

pub fn parse_recipe_expr(text: &str) -> Result<RecipeExpr> {
    let text = text.trim();
    if let Some(rest) = text.strip_prefix("min") {
        return parse_children(rest, true);
    }
    if let Some(rest) = text.strip_prefix("max") {
        return parse_children(rest, false);
    }
    if text.is_empty() || text.contains(['(', ')', ',']) {
        return Err(Error::Parse(format!("bad recipe expression: `{text}`")));
    }
    Ok(RecipeExpr::Leaf(text.to_string()))
}

fn parse_children(rest: &str, is_min: bool) -> Result<RecipeExpr> {
    let inner = rest
        .trim()
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("bad recipe arguments: `{rest}`")))?;
    let children: Vec<RecipeExpr> = split_top_level(inner)
        .iter()
        .map(|c| parse_recipe_expr(c))
        .collect::<Result<_>>()?;
    if children.len() < 2 {
        return Err(Error::Parse("tensor nodes need at least two children".into()));
    }
    Ok(if is_min {
        RecipeExpr::Min(children)
    } else {
        RecipeExpr::Max(children)
    })
}

/// Task blocks have multi-word heads (`task <kind> <name> { ... }`), which
/// the generic block splitter does not handle, so a pre-pass rewrites them
/// into indexed single-word kinds before block parsing.
pub fn parse_scenario(source: &str) -> Result<ScenarioFile> {
    let mut rewritten = String::new();
    let mut tasks_meta: Vec<(String, String)> = Vec::new();
    for line in source.lines() {
        let trimmed = line.trim_start();
        if let Some(rest) = trimmed.strip_prefix("task ") {
            if let Some(brace) = rest.find('{') {
                let head: Vec<&str> = rest[..brace].split_whitespace().collect();
                if head.len() != 2 {
                    return Err(Error::Parse(format!(
                        "task header needs `task <kind> <name>`: `{line}`"
                    )));
                }
                let idx = tasks_meta.len();
                tasks_meta.push((head[0].to_string(), head[1].to_string()));
                rewritten.push_str(&format!("task_{idx} {}", &rest[brace..]));
                rewritten.push('\n');
                continue;
            }
        }
        rewritten.push_str(line);
        rewritten.push('\n');
    }

    let (blocks, statements) = parse_blocks(&rewritten)?;
    if blocks.is_empty() {
        return Err(Error::Parse("scenario has no blocks".into()));
    }
    let mut scenario = ScenarioFile {
        backend: None,
        seed: 0,
        tol: None,
        models: Vec::new(),
        composites: Vec::new(),
        groups: Vec::new(),
        protocols: Vec::new(),
        tasks: Vec::new(),
        asserts: Vec::new(),
    };
    for block in blocks {
        if let Some(idx) = block.kind.strip_prefix("task_") {
            let idx: usize = idx
                .parse()
                .map_err(|_| Error::Parse("bad task index".into()))?;
            let (kind, name) = tasks_meta[idx].clone();
            scenario.tasks.push(TaskDef { kind, name, block });
            continue;
        }
        match block.kind.as_str() {
            "scenario" => {
                scenario.backend = block.get("backend").map(str::to_string);
                if let Some(seed) = block.get("seed") {
                    scenario.seed = seed
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad seed: {seed}")))?;
                }
                if let Some(tol) = block.get("tol") {
                    scenario.tol = Some(
                        tol.parse()
                            .map_err(|_| Error::Parse(format!("bad tol: {tol}")))?,
                    );
                }
            }
            "model" => scenario.models.push(block),
            "composite" => {
                let name = block.require("name")?.to_string();
                let recipe = parse_recipe_expr(block.require("recipe")?)?;
                scenario.composites.push((name, recipe));
            }
            "group" => scenario.groups.push(GroupDef {
                name: block.require("name")?.to_string(),
                model: block.require("model")?.to_string(),
                kind: block.require("kind")?.to_string(),
            }),
            "protocol" => {
                block.require("name")?;
                scenario.protocols.push(block);
            }
            other => {
                return Err(Error::Parse(format!("unknown block kind `{other}`")));
            }
        }
    }
    for statement in statements {
        let words: Vec<&str> = statement.split_whitespace().collect();
        match words.as_slice() {
            ["assert", task, key, expected @ ..] if !expected.is_empty() => {
                scenario.asserts.push(AssertDef {
                    task: task.to_string(),
                    key: key.to_string(),
                    expected: expected.join(" "),
                });
            }
            _ => {
                return Err(Error::Parse(format!(
                    "unrecognized statement: `{statement}`"
                )))
            }
        }
    }
    Ok(scenario)
}
