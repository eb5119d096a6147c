use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::MetricReport;
use crate::corpus::{ClassId, Dataset};
use crate::error::{Error, Result};
use crate::pipeline::{PipelineConfig, TrainedPipeline};
use crate::resources::Resources;

/// Shuffles `0..n` with `seed` and cuts it into `k` contiguous folds. The
/// first `n % k` folds get one extra element.
pub fn fold_assignment(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::Invalid(format!("need at least 2 folds, got {k}")));
    }
    if n < k {
        return Err(Error::Invalid(format!("cannot split {n} instances into {k} folds")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (base, extra) = (n / k, n % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let size = base + usize::from(f < extra);
        folds.push(order[start..start + size].to_vec());
        start += size;
    }
    Ok(folds)
}

/// Training and test indices of one cross-validation round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// k-fold rounds over `0..n`: each fold is tested once against the rest.
pub fn kfold_splits(n: usize, k: usize, seed: u64) -> Result<Vec<Split>> {
    Ok(fold_assignment(n, k, seed)?
        .into_iter()
        .map(|test| Split {
            train: complement(n, &test),
            test,
        })
        .collect())
}

/// Dev-fold augmented rounds over the concatenation of a training set
/// (`0..n_train`) and a dev set (`n_train..n_train + n_dev`). Every round
/// trains on the whole training set plus the other dev folds and tests on
/// one dev fold.
pub fn augmented_splits(n_train: usize, n_dev: usize, k: usize, seed: u64) -> Result<Vec<Split>> {
    Ok(kfold_splits(n_dev, k, seed)?
        .into_iter()
        .map(|s| Split {
            train: (0..n_train).chain(s.train.iter().map(|i| n_train + i)).collect(),
            test: s.test.iter().map(|i| n_train + i).collect(),
        })
        .collect())
}

fn run_splits(d: &Dataset, splits: &[Split], cfg: &PipelineConfig, res: &Resources) -> Result<CvReport> {
    let reports = splits
        .par_iter()
        .map(|s| holdout_eval(&d.subset(&s.train), &d.subset(&s.test), cfg, res))
        .collect::<Result<Vec<_>>>()?;
    Ok(CvReport {
        mean: MetricReport::mean(&reports)?,
        folds: reports,
    })
}

/// Per-fold reports and their mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub folds: Vec<MetricReport>,
    pub mean: MetricReport,
}

fn check_class_sizes(d: &Dataset, k: usize) -> Result<()> {
    for (class, n) in &d.class_counts()?.counts {
        if *n > 0 && *n < k {
            return Err(Error::Invalid(format!(
                "class {class} has {n} instances, fewer than the {k} folds"
            )));
        }
    }
    Ok(())
}

fn complement(n: usize, held_out: &[usize]) -> Vec<usize> {
    let mut mask = vec![true; n];
    for &i in held_out {
        mask[i] = false;
    }
    (0..n).filter(|&i| mask[i]).collect()
}

/// Trains on `train`, predicts `test`, and scores with the task metric.
pub fn holdout_eval(train: &Dataset, test: &Dataset, cfg: &PipelineConfig, res: &Resources) -> Result<MetricReport> {
    let (model, _) = TrainedPipeline::fit(cfg, train, res)?;
    let pred = model.predict(test, res)?;
    let gold = test.labels()?;
    let domain: Vec<ClassId> = cfg.task.label_domain();
    MetricReport::from_labels(&gold, &pred, &domain, &cfg.task.eval_classes())
}

/// k-fold cross-validation. Each fold builds its own feature space from
/// its training part only.
pub fn kfold_cv(d: &Dataset, k: usize, cfg: &PipelineConfig, res: &Resources, seed: u64) -> Result<CvReport> {
    check_class_sizes(d, k)?;
    run_splits(d, &kfold_splits(d.len(), k, seed)?, cfg, res)
}

/// Splits `dev` into `k` folds; round `f` trains on all of `train` plus the
/// other dev folds and tests on dev fold `f`.
pub fn augmented_fold_cv(
    train: &Dataset,
    dev: &Dataset,
    k: usize,
    cfg: &PipelineConfig,
    res: &Resources,
    seed: u64,
) -> Result<CvReport> {
    check_class_sizes(dev, k)?;
    let combined = train.concat(dev)?;
    run_splits(&combined, &augmented_splits(train.len(), dev.len(), k, seed)?, cfg, res)
}

impl CvReport {
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (f, r) in self.folds.iter().enumerate() {
            for line in r.to_tsv().lines() {
                out.push_str(&format!("fold{}\t{line}\n", f + 1));
            }
        }
        for line in self.mean.to_tsv().lines() {
            out.push_str(&format!("mean\t{line}\n"));
        }
        out
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (f, r) in self.folds.iter().enumerate() {
            out.push_str(&format!("fold {}\n{}\n", f + 1, r.render()));
        }
        out.push_str(&format!("mean over {} folds\n{}", self.folds.len(), self.mean.render()));
        out
    }
}
