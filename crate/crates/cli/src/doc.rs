//! JSON surface forms of instances and strategy profiles.
//!
//! Shape problems (unparsable rationals, wrong row lengths, malformed
//! partitions) are schema errors carrying a JSON-pointer location; inputs
//! that parse but violate a model invariant surface the model's own
//! validation error.

use dsplab_core::{
    format_rational, parse_rational, Instance, ModelError, Partition, StrategyProfile,
};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DocError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("{pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn schema(pointer: String, message: impl ToString) -> DocError {
    DocError::Schema {
        pointer,
        message: message.to_string(),
    }
}

/// Surface form of an instance. Weights and valuations are rational
/// strings (`"p/q"` or `"p"`); name lists are optional labels.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub items: Option<Vec<String>>,
    pub weights: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bidders: Option<Vec<String>>,
    pub valuations: Vec<Vec<String>>,
    pub mediators: Vec<MediatorDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediatorDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub parts: Vec<Vec<usize>>,
}

/// Surface form of a strategy profile: one partition (as a parts list)
/// per mediator, each a coarsening of that mediator's base partition.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileDoc {
    pub reports: Vec<Vec<Vec<usize>>>,
}

pub fn instance_to_doc(inst: &Instance) -> InstanceDoc {
    InstanceDoc {
        items: Some(inst.item_names().to_vec()),
        weights: inst.weights().iter().map(format_rational).collect(),
        bidders: Some(inst.bidder_names().to_vec()),
        valuations: inst
            .valuations()
            .iter()
            .map(|row| row.iter().map(format_rational).collect())
            .collect(),
        mediators: inst
            .mediator_names()
            .iter()
            .zip(inst.mediators())
            .map(|(name, p)| MediatorDoc {
                name: Some(name.clone()),
                parts: p.parts().to_vec(),
            })
            .collect(),
    }
}

pub fn doc_to_instance(doc: InstanceDoc) -> Result<Instance, DocError> {
    let n = doc.weights.len();
    let mut weights = Vec::with_capacity(n);
    for (j, s) in doc.weights.iter().enumerate() {
        weights.push(parse_rational(s).map_err(|e| schema(format!("/weights/{j}"), e))?);
    }
    let mut valuations = Vec::with_capacity(doc.valuations.len());
    for (i, row) in doc.valuations.iter().enumerate() {
        if row.len() != n {
            return Err(schema(
                format!("/valuations/{i}"),
                format!("expected {n} entries, found {}", row.len()),
            ));
        }
        let mut parsed = Vec::with_capacity(n);
        for (j, s) in row.iter().enumerate() {
            parsed.push(parse_rational(s).map_err(|e| schema(format!("/valuations/{i}/{j}"), e))?);
        }
        valuations.push(parsed);
    }
    let mut mediator_names = Vec::with_capacity(doc.mediators.len());
    let mut mediators = Vec::with_capacity(doc.mediators.len());
    for (t, med) in doc.mediators.into_iter().enumerate() {
        let p = Partition::new(n, med.parts)
            .map_err(|e| schema(format!("/mediators/{t}/parts"), e))?;
        mediator_names.push(med.name.unwrap_or_else(|| format!("mediator{t}")));
        mediators.push(p);
    }
    let item_names = doc
        .items
        .unwrap_or_else(|| (0..n).map(|j| format!("item{j}")).collect());
    let bidder_names = doc
        .bidders
        .unwrap_or_else(|| (0..valuations.len()).map(|i| format!("bidder{i}")).collect());
    Ok(Instance::with_names(
        item_names,
        weights,
        bidder_names,
        valuations,
        mediator_names,
        mediators,
    )?)
}

fn read_text(path: &Path) -> Result<String, DocError> {
    fs::read_to_string(path).map_err(|source| DocError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_instance(path: &Path) -> Result<Instance, DocError> {
    let text = read_text(path)?;
    let doc: InstanceDoc = serde_json::from_str(&text).map_err(|source| DocError::Json {
        path: path.display().to_string(),
        source,
    })?;
    doc_to_instance(doc)
}

pub fn render_instance(inst: &Instance) -> String {
    let mut s =
        serde_json::to_string_pretty(&instance_to_doc(inst)).expect("documents serialize");
    s.push('\n');
    s
}

pub fn save_instance(inst: &Instance, path: &Path) -> Result<(), DocError> {
    fs::write(path, render_instance(inst)).map_err(|source| DocError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_profile(path: &Path, inst: &Instance) -> Result<StrategyProfile, DocError> {
    let text = read_text(path)?;
    let doc: ProfileDoc = serde_json::from_str(&text).map_err(|source| DocError::Json {
        path: path.display().to_string(),
        source,
    })?;
    if doc.reports.len() != inst.mediator_count() {
        return Err(schema(
            "/reports".to_string(),
            format!(
                "expected {} reports, found {}",
                inst.mediator_count(),
                doc.reports.len()
            ),
        ));
    }
    let mut reports = Vec::with_capacity(doc.reports.len());
    for (t, parts) in doc.reports.into_iter().enumerate() {
        reports.push(
            Partition::new(inst.item_count(), parts)
                .map_err(|e| schema(format!("/reports/{t}"), e))?,
        );
    }
    Ok(StrategyProfile::new(inst, reports)?)
}
