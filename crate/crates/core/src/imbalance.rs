//! Class-imbalance handling: ratio-controlled under-sampling and
//! plurality-vote ensembles of models trained on independent samples.
//!
//! A ratio is the number of majority instances kept per minority instance,
//! so a 1:2 class proportion is ratio 2. Every class other than the minority
//! class counts as majority.

use std::collections::BTreeMap;

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{ClassId, Dataset};
use crate::error::{Error, Result};
use crate::features::{Extractor, FeatureConfig, FeatureSpace, FeatureVector};
use crate::resources::Resources;
use crate::svm::{self, LinearModel, TrainParams};

/// Result of [`undersample_indices`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    /// Positions into the input, in shuffled order.
    pub indices: Vec<usize>,
    pub minority: usize,
    pub majority: usize,
    /// How many majority instances were missing to reach the requested ratio.
    pub shortfall: usize,
}

/// Keeps every `minority` position and `⌊ratio × |minority|⌋` majority
/// positions drawn uniformly without replacement, then shuffles.
pub fn undersample_indices(labels: &[ClassId], minority: ClassId, ratio: f64, seed: u64) -> Result<Sample> {
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(Error::Invalid(format!("sampling ratio must be positive, got {ratio}")));
    }
    let (min_idx, maj_idx): (Vec<usize>, Vec<usize>) =
        (0..labels.len()).partition(|&i| labels[i] == minority);
    if min_idx.is_empty() {
        return Err(Error::Invalid(format!("minority class {minority} is absent")));
    }
    let wanted = (ratio * min_idx.len() as f64).floor() as usize;
    let take = wanted.min(maj_idx.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices = min_idx.clone();
    indices.extend(index::sample(&mut rng, maj_idx.len(), take).iter().map(|k| maj_idx[k]));
    indices.shuffle(&mut rng);
    if take < wanted {
        log::warn!(
            "under-sampling wanted {wanted} majority instances but only {} exist; keeping all",
            maj_idx.len()
        );
    }
    Ok(Sample {
        indices,
        minority: min_idx.len(),
        majority: take,
        shortfall: wanted - take,
    })
}

/// A sampled dataset plus the shortfall report.
#[derive(Debug, Clone)]
pub struct Undersampled {
    pub dataset: Dataset,
    pub sample: Sample,
}

/// Dataset-level [`undersample_indices`].
pub fn undersample(d: &Dataset, minority: ClassId, ratio: f64, seed: u64) -> Result<Undersampled> {
    let labels = d.labels()?;
    let sample = undersample_indices(&labels, minority, ratio, seed)?;
    Ok(Undersampled {
        dataset: d.subset(&sample.indices),
        sample,
    })
}

/// How a tied vote is resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TiePolicy {
    /// The given class wins any tie it takes part in; otherwise the smallest id.
    Favor(ClassId),
    SmallestId,
}

/// Plurality vote over member predictions.
pub fn vote(predictions: &[ClassId], policy: TiePolicy) -> Option<ClassId> {
    let mut tally: BTreeMap<ClassId, usize> = BTreeMap::new();
    for &p in predictions {
        *tally.entry(p).or_default() += 1;
    }
    let top = *tally.values().max()?;
    let tied: Vec<ClassId> = tally.iter().filter(|(_, &n)| n == top).map(|(&c, _)| c).collect();
    Some(match policy {
        TiePolicy::Favor(c) if tied.contains(&c) => c,
        _ => tied[0],
    })
}

/// Voting ensemble. All members share one feature space and class set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    members: Vec<LinearModel>,
    ratios: Vec<f64>,
    tie_policy: TiePolicy,
}

impl Ensemble {
    pub fn new(members: Vec<LinearModel>, ratios: Vec<f64>, tie_policy: TiePolicy) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Invalid("an ensemble needs at least one member".into()));
        }
        if members.len() != ratios.len() {
            return Err(Error::LengthMismatch(members.len(), ratios.len()));
        }
        let first = &members[0];
        if members
            .iter()
            .any(|m| m.classes() != first.classes() || m.space_size() != first.space_size())
        {
            return Err(Error::Invalid("ensemble members disagree on classes or space".into()));
        }
        Ok(Ensemble {
            members,
            ratios,
            tie_policy,
        })
    }

    /// Trains member `k` on an under-sample drawn with seed `seed + k`.
    /// Binary ensembles favor `minority` on ties.
    #[allow(clippy::too_many_arguments)]
    pub fn fit(
        xs: &[FeatureVector],
        ys: &[ClassId],
        dim: usize,
        labels: &[ClassId],
        minority: ClassId,
        ratios: &[f64],
        params: &TrainParams,
    ) -> Result<Self> {
        if ratios.is_empty() {
            return Err(Error::Invalid("no ensemble ratios given".into()));
        }
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch(xs.len(), ys.len()));
        }
        let members = ratios
            .par_iter()
            .enumerate()
            .map(|(k, &ratio)| {
                let seed = params.seed.wrapping_add(k as u64);
                let sample = undersample_indices(ys, minority, ratio, seed)?;
                let sx: Vec<FeatureVector> = sample.indices.iter().map(|&i| xs[i].clone()).collect();
                let sy: Vec<ClassId> = sample.indices.iter().map(|&i| ys[i]).collect();
                let p = TrainParams {
                    seed,
                    ..params.clone()
                };
                svm::train(&sx, &sy, dim, &p, labels)
            })
            .collect::<Result<Vec<_>>>()?;
        let policy = if members[0].is_binary() {
            TiePolicy::Favor(minority)
        } else {
            TiePolicy::SmallestId
        };
        Ensemble::new(members, ratios.to_vec(), policy)
    }

    pub fn members(&self) -> &[LinearModel] {
        &self.members
    }

    pub fn ratios(&self) -> &[f64] {
        &self.ratios
    }

    pub fn tie_policy(&self) -> TiePolicy {
        self.tie_policy
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member_predictions(&self, x: &FeatureVector) -> Result<Vec<ClassId>> {
        self.members.iter().map(|m| m.predict(x)).collect()
    }

    pub fn predict(&self, x: &FeatureVector) -> Result<ClassId> {
        let votes = self.member_predictions(x)?;
        Ok(vote(&votes, self.tie_policy).expect("non-empty ensemble"))
    }
}

/// The least frequent class; ties go to the larger id.
pub fn minority_class(labels: &[ClassId]) -> Option<ClassId> {
    let mut counts: BTreeMap<ClassId, usize> = BTreeMap::new();
    for &y in labels {
        *counts.entry(y).or_default() += 1;
    }
    counts
        .into_iter()
        .rev()
        .min_by_key(|&(_, n)| n)
        .map(|(c, _)| c)
}

/// Extracts features over all of `d` into one shared space and trains one
/// member per ratio against the least frequent class.
pub fn train_ensemble(
    d: &Dataset,
    ratios: &[f64],
    params: &TrainParams,
    cfg: &FeatureConfig,
    res: &Resources,
    seed: u64,
) -> Result<(Ensemble, FeatureSpace)> {
    if ratios.is_empty() {
        return Err(Error::Invalid("no ensemble ratios given".into()));
    }
    let ys = d.labels()?;
    let minority = minority_class(&ys).ok_or_else(|| Error::Training("empty dataset".into()))?;
    let extractor = Extractor::new(cfg, res)?;
    let texts: Vec<&str> = d.iter().map(|t| t.text.as_str()).collect();
    let (space, xs) = extractor.fit_space(&texts);
    let labels: Vec<ClassId> = d.label_domain().iter().copied().collect();
    let params = TrainParams {
        seed,
        ..params.clone()
    };
    let ensemble = Ensemble::fit(&xs, &ys, space.len(), &labels, minority, ratios, &params)?;
    Ok((ensemble, space))
}
