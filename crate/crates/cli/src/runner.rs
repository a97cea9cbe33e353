//! Task execution over a chosen scalar backend. Each task produces an
//! ordered record of key/value fields plus replayable certificates; assert
//! statements compare against the recorded fields.

use std::collections::BTreeMap;

use gptt_core::composite::{tensor, Composite, Recipe, Regularity};
use gptt_core::error::{Error, Result};
use gptt_core::io::{model_from_block, parse_vector, parse_vector_list, Block};
use gptt_core::linalg::{Matrix, Vector};
use gptt_core::scalar::Scalar;
use gptt_core::space::{Effect, Observable, Role, StateSpace, Validation};
use gptt_core::swap::{audit_nonregularity, AuditOutcome};
use gptt_core::symmetry::{
    cyclic_action, equivariant_self_duality, GroupAction, SelfDualityWitness,
};
use gptt_core::teleport::{classify, verify_deterministic, DeterministicOutcome, ProtocolCandidate, ProtocolClass};

use crate::report::{CertRecord, Record, Report};
use crate::scenario::{RecipeExpr, ScenarioFile, TaskDef};

pub struct Env<S: Scalar> {
    pub models: BTreeMap<String, StateSpace<S>>,
    pub composites: BTreeMap<String, Composite<S>>,
    pub groups: BTreeMap<String, GroupAction<S>>,
    pub protocols: BTreeMap<String, Block>,
}

impl<S: Scalar> Env<S> {
    pub fn build(scenario: &ScenarioFile) -> Result<Self> {
        let mut models = BTreeMap::new();
        for block in &scenario.models {
            let space: StateSpace<S> = model_from_block(block)?;
            models.insert(space.name.clone(), space);
        }
        let mut composites = BTreeMap::new();
        for (name, expr) in &scenario.composites {
            let recipe = realize_recipe(expr, &models)?;
            composites.insert(name.clone(), tensor(&recipe));
        }
        let mut groups = BTreeMap::new();
        for def in &scenario.groups {
            let space = models
                .get(&def.model)
                .ok_or_else(|| Error::UnknownModel(def.model.clone()))?;
            if !def.kind.starts_with("cyclic") {
                return Err(Error::Invalid(format!("unknown group kind {}", def.kind)));
            }
            groups.insert(def.name.clone(), cyclic_action(space)?);
        }
        let mut protocols = BTreeMap::new();
        for block in &scenario.protocols {
            protocols.insert(block.require("name")?.to_string(), block.clone());
        }
        Ok(Env {
            models,
            composites,
            groups,
            protocols,
        })
    }

    fn model(&self, name: &str) -> Result<&StateSpace<S>> {
        self.models
            .get(name)
            .ok_or_else(|| Error::UnknownModel(name.to_string()))
    }

    fn composite(&self, name: &str) -> Result<&Composite<S>> {
        self.composites
            .get(name)
            .ok_or_else(|| Error::UnknownModel(name.to_string()))
    }
}

pub fn realize_recipe<S: Scalar>(
    expr: &RecipeExpr,
    models: &BTreeMap<String, StateSpace<S>>,
) -> Result<Recipe<S>> {
    match expr {
        RecipeExpr::Leaf(name) => models
            .get(name)
            .map(Recipe::leaf)
            .ok_or_else(|| Error::UnknownModel(name.clone())),
        RecipeExpr::Min(children) => Ok(Recipe::Min(
            children
                .iter()
                .map(|c| realize_recipe(c, models))
                .collect::<Result<_>>()?,
        )),
        RecipeExpr::Max(children) => Ok(Recipe::Max(
            children
                .iter()
                .map(|c| realize_recipe(c, models))
                .collect::<Result<_>>()?,
        )),
    }
}

pub fn run_tasks<S: Scalar>(env: &Env<S>, tasks: &[TaskDef], jobs: usize) -> Result<Vec<Record>> {
    if jobs <= 1 || tasks.len() <= 1 {
        return tasks.iter().map(|t| run_task(env, t)).collect();
    }
    // fan out over scoped threads; records keep scenario order
    let results: Vec<Result<Record>> = std::thread::scope(|scope| {
        let handles: Vec<_> = tasks
            .iter()
            .map(|t| scope.spawn(move || run_task(env, t)))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    results.into_iter().collect()
}

fn run_task<S: Scalar>(env: &Env<S>, task: &TaskDef) -> Result<Record> {
    let mut record = Record::new(&task.name, &task.kind);
    match task.kind.as_str() {
        "validate" => run_validate(env, &task.block, &mut record)?,
        "tensor" => run_tensor(env, &task.block, &mut record)?,
        "teleport-classify" => run_classify(env, &task.block, &mut record)?,
        "teleport-synthesize" => run_synthesize(env, &task.block, &mut record)?,
        "regularity" => run_regularity(env, &task.block, &mut record)?,
        "swap-audit" => run_swap_audit(env, &task.block, &mut record)?,
        other => return Err(Error::Parse(format!("unknown task kind `{other}`"))),
    }
    Ok(record)
}

fn run_validate<S: Scalar>(env: &Env<S>, block: &Block, record: &mut Record) -> Result<()> {
    let space = env.model(block.require("model")?)?;
    let (role, text) = if let Some(v) = block.get("state") {
        (Role::State, v)
    } else if let Some(v) = block.get("effect") {
        (Role::EffectRole, v)
    } else if let Some(v) = block.get("observable") {
        let outcomes = parse_vector_list::<S>(v)?
            .into_iter()
            .enumerate()
            .map(|(i, functional)| Effect {
                functional,
                label: format!("f{i}"),
            })
            .collect();
        let validation = space.validate_observable(&Observable { outcomes })?;
        record.field("valid", if validation.is_valid() { "true" } else { "false" });
        if let Validation::Invalid(reason) = validation {
            record.field("reason", &reason);
        }
        return Ok(());
    } else {
        return Err(Error::Parse("validate needs state, effect or observable".into()));
    };
    let vector: Vector<S> = parse_vector(text)?;
    let validation = space.validate(&vector, role)?;
    record.field("valid", if validation.is_valid() { "true" } else { "false" });
    if let Validation::Invalid(reason) = validation {
        record.field("reason", &reason);
    }
    Ok(())
}

fn run_tensor<S: Scalar>(env: &Env<S>, block: &Block, record: &mut Record) -> Result<()> {
    let composite = env.composite(block.require("composite")?)?;
    record.field("dim", &composite.dim.to_string());
    record.field("leaves", &composite.leaves.len().to_string());
    // only the explicit side of the cone is counted by default; the other
    // side needs a vertex enumeration and is produced on request
    let full = block.get("enumerate") == Some("full");
    let min_side = !matches!(composite.top, gptt_core::composite::TopKind::Max);
    if min_side || full {
        record.field("generators", &composite.generators().len().to_string());
    } else {
        record.field("generators", "implicit");
    }
    if !min_side || full {
        record.field(
            "dual_generators",
            &composite.dual_generators().len().to_string(),
        );
    } else {
        record.field("dual_generators", "implicit");
    }
    Ok(())
}

fn parse_matrix<S: Scalar>(text: &str) -> Result<Matrix<S>> {
    Ok(Matrix::from_rows(parse_vector_list(text)?))
}

fn run_classify<S: Scalar>(env: &Env<S>, block: &Block, record: &mut Record) -> Result<()> {
    // the candidate either references a named protocol block or carries
    // the fields inline
    let storage;
    let block = match block.get("protocol") {
        Some(name) => {
            storage = env
                .protocols
                .get(name)
                .ok_or_else(|| Error::UnknownModel(name.to_string()))?
                .clone();
            &storage
        }
        None => block,
    };
    let a1 = env.model(block.require("a1")?)?.clone();
    let a2 = env.model(block.require("a2")?)?.clone();
    let b = env.model(block.require("b")?)?.clone();
    // effects and states are given in operator form, or flat with the
    // designated first factor
    let f_hat = match (block.get("f_hat"), block.get("f")) {
        (Some(text), _) => parse_matrix::<S>(text)?,
        (None, Some(text)) => {
            let flat: Vector<S> = parse_vector(text)?;
            let pair = tensor(&Recipe::min(vec![Recipe::leaf(&a1), Recipe::leaf(&a2)]));
            gptt_core::composite::hat(&pair, &[0], &flat)
        }
        (None, None) => return Err(Error::Parse("protocol needs f or f_hat".into())),
    };
    let omega_hat = match (block.get("omega_hat"), block.get("omega")) {
        (Some(text), _) => parse_matrix::<S>(text)?,
        (None, Some(text)) => {
            let flat: Vector<S> = parse_vector(text)?;
            let pair = tensor(&Recipe::max(vec![Recipe::leaf(&a2), Recipe::leaf(&b)]));
            gptt_core::composite::hat(&pair, &[0], &flat)
        }
        (None, None) => return Err(Error::Parse("protocol needs omega or omega_hat".into())),
    };
    let eta_text = block.require("eta")?;
    let eta = if eta_text == "identity" {
        Matrix::identity(a1.dim)
    } else {
        parse_matrix::<S>(eta_text)?
    };
    let cand = ProtocolCandidate::new(a1, a2, b, f_hat, omega_hat, eta)?;
    let verdict = classify(&cand)?;
    record.field(
        "class",
        match verdict.class {
            ProtocolClass::NotTp => "NotTP",
            ProtocolClass::Conclusive => "Conclusive",
            ProtocolClass::Strong => "Strong",
        },
    );
    if let Some(scale) = &verdict.scale {
        record.field("scale", &scale.repr());
    }
    if let Some(correction) = &verdict.correction {
        record.field("correction", &correction.repr());
    }
    if !verdict.per_vertex_success.is_empty() {
        let items: Vec<String> = verdict
            .per_vertex_success
            .iter()
            .map(|t| t.repr())
            .collect();
        record.field("per_vertex_success", &format!("[{}]", items.join(",")));
    }
    Ok(())
}

fn run_synthesize<S: Scalar>(env: &Env<S>, block: &Block, record: &mut Record) -> Result<()> {
    let space = env.model(block.require("model")?)?;
    let action = match block.get("group") {
        Some(name) => env
            .groups
            .get(name)
            .ok_or_else(|| Error::UnknownModel(name.to_string()))?
            .clone(),
        None => cyclic_action(space)?,
    };
    let witness = equivariant_self_duality(space, &action)
        .ok_or_else(|| Error::Invalid("no equivariant self-duality witness found".into()))?;
    let synth = gptt_core::symmetry::synthesize_protocol(space, &action, &witness)?;
    let outcome = verify_deterministic(
        &synth.observable,
        space,
        space,
        space,
        &synth.omega_hat,
        &Matrix::identity(space.dim),
    )?;
    match outcome {
        DeterministicOutcome::Deterministic { corrections } => {
            record.field("deterministic", "true");
            record.field("outcomes", &synth.observable.outcomes.len().to_string());
            // per-outcome probability on normalized states: the strong scale
            let mut probabilities = Vec::new();
            for f_hat in &synth.effect_hats {
                let mu = synth.omega_hat.mul_mat(f_hat);
                let p = space.unit.dot(&mu.mul_vec(&space.omega_vertices[0]));
                probabilities.push(p.repr());
            }
            record.field("probabilities", &format!("[{}]", probabilities.join(",")));
            let labels: Vec<String> = synth
                .corrections
                .iter()
                .map(|&gi| action.labels[gi].clone())
                .collect();
            record.field("corrections", &format!("[{}]", labels.join(",")));
            let _ = corrections;
        }
        DeterministicOutcome::Fails { outcome, .. } => {
            record.field("deterministic", "false");
            record.field("failed_outcome", &outcome.to_string());
        }
    }
    Ok(())
}

fn parse_partition(text: &str, leaves: usize) -> Result<Vec<Vec<usize>>> {
    // `[[1,2],[3]]` with one-based leaf indices
    let parts = parse_nested_indices(text)?;
    let mut partition = Vec::new();
    for part in parts {
        let mut zero_based = Vec::new();
        for idx in part {
            if idx == 0 || idx > leaves {
                return Err(Error::Parse(format!("leaf index {idx} out of range")));
            }
            zero_based.push(idx - 1);
        }
        partition.push(zero_based);
    }
    Ok(partition)
}

fn parse_nested_indices(text: &str) -> Result<Vec<Vec<usize>>> {
    let inner = text
        .trim()
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected a partition list, got `{text}`")))?;
    let mut out = Vec::new();
    for item in gptt_core::io::split_top_level(inner) {
        let part = item
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("expected an index list, got `{item}`")))?;
        let indices: Vec<usize> = gptt_core::io::split_top_level(part)
            .iter()
            .map(|t| {
                t.parse()
                    .map_err(|_| Error::Parse(format!("bad index `{t}`")))
            })
            .collect::<Result<_>>()?;
        out.push(indices);
    }
    Ok(out)
}

fn all_bipartitions(leaves: usize) -> Vec<Vec<Vec<usize>>> {
    // all two-part partitions plus the partition into singletons
    let mut out = Vec::new();
    for mask in 1..(1u32 << (leaves - 1)) {
        let left: Vec<usize> = (0..leaves).filter(|&i| mask >> i & 1 == 1).collect();
        let right: Vec<usize> = (0..leaves).filter(|&i| mask >> i & 1 == 0).collect();
        if !left.is_empty() && !right.is_empty() {
            out.push(vec![left, right]);
        }
    }
    out.push((0..leaves).map(|i| vec![i]).collect());
    out
}

fn format_partition(partition: &[Vec<usize>]) -> String {
    let parts: Vec<String> = partition
        .iter()
        .map(|p| {
            let items: Vec<String> = p.iter().map(|i| (i + 1).to_string()).collect();
            format!("[{}]", items.join(","))
        })
        .collect();
    format!("[{}]", parts.join(","))
}

fn run_regularity<S: Scalar>(env: &Env<S>, block: &Block, record: &mut Record) -> Result<()> {
    let name = block.require("composite")?;
    let composite = env.composite(name)?;
    let partitions = match block.get("partitions") {
        None | Some("all") => all_bipartitions(composite.leaves.len()),
        Some(text) => vec![parse_partition(text, composite.leaves.len())?],
    };
    let mut all_regular = true;
    for partition in &partitions {
        match composite.check_regular(partition)? {
            Regularity::Regular => {
                record.field(&format!("partition{}", format_partition(partition)), "Regular");
            }
            Regularity::NotRegular {
                element,
                witness,
                dual_side,
            } => {
                all_regular = false;
                record.field(
                    &format!("partition{}", format_partition(partition)),
                    "NotRegular",
                );
                record.certs.push(CertRecord {
                    task: record.name.clone(),
                    kind: "separation".into(),
                    fields: vec![
                        ("composite".into(), name.to_string()),
                        (
                            "side".into(),
                            if dual_side { "effect" } else { "state" }.into(),
                        ),
                        ("functional".into(), witness.repr()),
                        ("element".into(), element.repr()),
                    ],
                });
            }
        }
    }
    record.field("verdict", if all_regular { "Regular" } else { "NotRegular" });
    Ok(())
}

fn run_swap_audit<S: Scalar>(env: &Env<S>, block: &Block, record: &mut Record) -> Result<()> {
    let name = block.require("composite")?;
    let composite = env.composite(name)?;
    if let Some(pairing) = block.get("pairing") {
        let normalized: String = pairing.chars().filter(|c| !c.is_whitespace()).collect();
        if normalized != "[1-3,2-4]" {
            return Err(Error::Invalid(format!(
                "unsupported pairing {pairing}; the audit pairs 1-3 and 2-4"
            )));
        }
    }
    match audit_nonregularity(composite)? {
        AuditOutcome::NoWitnessFound => {
            record.field("verdict", "NoWitnessFound");
        }
        AuditOutcome::NotRegular(cert) => {
            record.field("verdict", "NotRegular");
            record.certs.push(CertRecord {
                task: record.name.clone(),
                kind: "swap-separation".into(),
                fields: vec![
                    ("composite".into(), name.to_string()),
                    ("subsystem".into(), "3,4".into()),
                    ("functional".into(), cert.witness.repr()),
                    ("element".into(), cert.pivoted.repr()),
                ],
            });
        }
    }
    Ok(())
}

/// Re-verify every certificate in a report against a freshly built
/// environment, by direct substitution only.
pub fn replay_certificates<S: Scalar>(env: &Env<S>, report: &Report) -> Result<Vec<(String, bool)>> {
    let mut results = Vec::new();
    for cert in &report.certs {
        let get = |key: &str| -> Result<&str> {
            cert.fields
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| Error::Parse(format!("certificate missing `{key}`")))
        };
        let composite = env.composite(get("composite")?)?;
        let functional: Vector<S> = parse_vector(get("functional")?)?;
        let element: Vector<S> = parse_vector(get("element")?)?;
        let ok = match cert.kind.as_str() {
            "separation" => {
                let dual_side = get("side")? == "effect";
                let negative = functional.dot(&element).is_negative();
                let nonneg = if dual_side {
                    composite
                        .dual_generators()
                        .iter()
                        .all(|g| !functional.dot(g).is_negative())
                } else {
                    // for a max top the witness must be a dual generator;
                    // otherwise check it against the explicit generators
                    match composite.top {
                        gptt_core::composite::TopKind::Max => composite
                            .dual_generators()
                            .iter()
                            .any(|g| g.same_ray(&functional)),
                        _ => composite
                            .generators()
                            .iter()
                            .all(|g| !functional.dot(g).is_negative()),
                    }
                };
                negative && nonneg
            }
            "swap-separation" => {
                let indices: Vec<usize> = get("subsystem")?
                    .split(',')
                    .map(|t| t.trim().parse::<usize>().unwrap_or(0) - 1)
                    .collect();
                let sub = composite.partial_subsystem(&indices)?;
                functional.dot(&element).is_negative()
                    && sub
                        .generators()
                        .iter()
                        .all(|g| !functional.dot(g).is_negative())
            }
            other => return Err(Error::Parse(format!("unknown certificate kind `{other}`"))),
        };
        results.push((format!("{} {}", cert.task, cert.kind), ok));
    }
    Ok(results)
}

/// Shared helpers for the describe subcommand.
pub fn describe_model<S: Scalar>(space: &StateSpace<S>) -> Vec<(String, String)> {
    let mut out = vec![
        ("dim".to_string(), space.dim.to_string()),
        ("vertices".to_string(), space.omega_vertices.len().to_string()),
        (
            "dual_cone_rays".to_string(),
            space.dual.generators.len().to_string(),
        ),
    ];
    let self_dual = space
        .dual
        .generators
        .iter()
        .all(|h| space.cone.generators.iter().any(|g| g.same_ray(h)));
    let weakly = if self_dual {
        "yes (self-dual)".to_string()
    } else if space.dual.generators.len() != space.omega_vertices.len() {
        "no (ray counts differ)".to_string()
    } else {
        match cyclic_action(space)
            .ok()
            .and_then(|action| equivariant_self_duality(space, &action))
        {
            Some(SelfDualityWitness { .. }) => "yes".to_string(),
            None => "unknown".to_string(),
        }
    };
    out.push(("weakly_self_dual".to_string(), weakly));
    out
}
