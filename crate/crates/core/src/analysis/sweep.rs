use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::profile::{profile_dataset, DatasetProfile, ProfileOptions};
use crate::error::{Error, Result};
use crate::ingestion::{group_by_label, LabeledEmbeddings};
use crate::simulation::{derive_seed, sample_indices, sample_size};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub profile: ProfileOptions,
    pub seed: u64,
    /// Sample within each class (default) instead of over the whole set.
    pub stratified: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            profile: ProfileOptions::default(),
            seed: 0,
            stratified: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub fraction: f64,
    /// Number of sequences (distinct label/id pairs) kept.
    pub size: usize,
    pub profile: DatasetProfile,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub scores: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

/// Sequences of each class in first-appearance order. A sequence is a
/// (label, id) pair and may have one record per layer.
fn sequences_by_label(embeddings: &LabeledEmbeddings) -> BTreeMap<&str, Vec<&str>> {
    let mut seen = HashSet::new();
    let mut out: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for r in embeddings.records() {
        if seen.insert((r.label.as_str(), r.id.as_str())) {
            out.entry(r.label.as_str()).or_default().push(r.id.as_str());
        }
    }
    out
}

pub fn validate_fractions(fractions: &[f64]) -> Result<()> {
    if fractions.is_empty() {
        return Err(Error::InvalidSpec("no fractions given".into()));
    }
    if let Some(f) = fractions.iter().find(|&&f| !(f > 0.0 && f <= 1.0)) {
        return Err(Error::InvalidSpec(format!(
            "fraction {f} is outside (0, 1]"
        )));
    }
    if fractions.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::InvalidSpec(
            "fractions must be strictly decreasing".into(),
        ));
    }
    Ok(())
}

/// Profiles random subsets of the dataset at each fraction.
///
/// Every layer of a sampled sequence is kept, so class sizes stay equal
/// across layers. With stratification each class keeps
/// `round(fraction * class size)` sequences.
pub fn downsample_sweep(
    embeddings: &LabeledEmbeddings,
    fractions: &[f64],
    options: &SweepOptions,
) -> Result<SweepTable> {
    validate_fractions(fractions)?;
    let classes = sequences_by_label(embeddings);
    if classes.is_empty() {
        return Err(Error::DegenerateInput("dataset has no records".into()));
    }

    let rows = fractions
        .par_iter()
        .enumerate()
        .map(|(row, &fraction)| {
            let seed = derive_seed(options.seed, row);
            let keep = select_sequences(&classes, fraction, seed, options.stratified)?;
            let records = embeddings
                .records()
                .iter()
                .filter(|r| keep.contains(&(r.label.as_str(), r.id.as_str())))
                .cloned()
                .collect();
            let subset = LabeledEmbeddings::new(records)?;
            let profile = profile_dataset(&group_by_label(&subset), &options.profile)?;
            Ok(SweepRow {
                fraction,
                size: keep.len(),
                profile,
                scores: BTreeMap::new(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SweepTable { rows })
}

fn select_sequences<'a>(
    classes: &BTreeMap<&'a str, Vec<&'a str>>,
    fraction: f64,
    seed: u64,
    stratified: bool,
) -> Result<HashSet<(&'a str, &'a str)>> {
    let mut keep = HashSet::new();
    if stratified {
        for (class_idx, (&label, ids)) in classes.iter().enumerate() {
            let k = sample_size(ids.len(), fraction);
            if k == 0 {
                return Err(Error::EmptyClass {
                    label: label.to_string(),
                    fraction,
                });
            }
            for i in sample_indices(ids.len(), k, derive_seed(seed, class_idx)) {
                keep.insert((label, ids[i]));
            }
        }
    } else {
        let all: Vec<(&str, &str)> = classes
            .iter()
            .flat_map(|(&label, ids)| ids.iter().map(move |&id| (label, id)))
            .collect();
        let k = sample_size(all.len(), fraction);
        for i in sample_indices(all.len(), k, seed) {
            keep.insert(all[i]);
        }
        if let Some(&label) = classes
            .keys()
            .find(|&&label| !keep.iter().any(|(l, _)| *l == label))
        {
            return Err(Error::EmptyClass {
                label: label.to_string(),
                fraction,
            });
        }
    }
    Ok(keep)
}
