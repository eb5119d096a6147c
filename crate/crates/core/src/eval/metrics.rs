use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::corpus::ClassId;
use crate::error::{Error, Result};

/// Full confusion matrix; rows are gold classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    classes: Vec<ClassId>,
    matrix: Vec<Vec<usize>>,
}

impl Confusion {
    /// Counts over an explicit class list; labels outside it are an error.
    pub fn with_classes(gold: &[ClassId], pred: &[ClassId], classes: &[ClassId]) -> Result<Self> {
        if gold.len() != pred.len() {
            return Err(Error::LengthMismatch(gold.len(), pred.len()));
        }
        let mut classes = classes.to_vec();
        classes.sort_unstable();
        classes.dedup();
        let k = classes.len();
        let mut matrix = vec![vec![0; k]; k];
        let pos = |c: ClassId| {
            classes.binary_search(&c).map_err(|_| Error::LabelOutOfDomain {
                label: c,
                domain: classes.clone(),
            })
        };
        for (&g, &p) in gold.iter().zip(pred) {
            matrix[pos(g)?][pos(p)?] += 1;
        }
        Ok(Confusion { classes, matrix })
    }

    pub fn classes(&self) -> &[ClassId] {
        &self.classes
    }

    fn index(&self, c: ClassId) -> Option<usize> {
        self.classes.binary_search(&c).ok()
    }

    /// Instances of gold class `gold` predicted as `pred`.
    pub fn count(&self, gold: ClassId, pred: ClassId) -> usize {
        match (self.index(gold), self.index(pred)) {
            (Some(g), Some(p)) => self.matrix[g][p],
            _ => 0,
        }
    }

    pub fn tp(&self, c: ClassId) -> usize {
        self.count(c, c)
    }

    pub fn fp(&self, c: ClassId) -> usize {
        self.index(c)
            .map(|j| (0..self.classes.len()).filter(|&i| i != j).map(|i| self.matrix[i][j]).sum())
            .unwrap_or(0)
    }

    pub fn fn_(&self, c: ClassId) -> usize {
        self.index(c)
            .map(|i| (0..self.classes.len()).filter(|&j| j != i).map(|j| self.matrix[i][j]).sum())
            .unwrap_or(0)
    }

    pub fn gold_count(&self, c: ClassId) -> usize {
        self.index(c).map(|i| self.matrix[i].iter().sum()).unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.matrix.iter().flatten().sum()
    }

    pub fn correct(&self) -> usize {
        (0..self.classes.len()).map(|i| self.matrix[i][i]).sum()
    }
}

/// Confusion over the classes occurring in either sequence.
pub fn confusion(gold: &[ClassId], pred: &[ClassId]) -> Result<Confusion> {
    let classes: Vec<ClassId> = gold.iter().chain(pred).copied().collect();
    Confusion::with_classes(gold, pred, &classes)
}

/// Precision, recall and F1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
}

impl Prf {
    /// Any ratio with a zero denominator is 0.
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Prf {
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Prf { precision, recall, f }
    }

    fn mean(items: &[Prf]) -> Prf {
        let n = items.len().max(1) as f64;
        Prf {
            precision: items.iter().map(|p| p.precision).sum::<f64>() / n,
            recall: items.iter().map(|p| p.recall).sum::<f64>() / n,
            f: items.iter().map(|p| p.f).sum::<f64>() / n,
        }
    }
}

pub fn prf_class(c: &Confusion, class: ClassId) -> Prf {
    Prf::from_counts(c.tp(class), c.fp(class), c.fn_(class))
}

/// P, R and F from TP/FP/FN pooled over `classes`.
pub fn micro_prf(c: &Confusion, classes: &[ClassId]) -> Prf {
    let mut tp = 0;
    let mut fp = 0;
    let mut fn_ = 0;
    for &k in classes {
        tp += c.tp(k);
        fp += c.fp(k);
        fn_ += c.fn_(k);
    }
    Prf::from_counts(tp, fp, fn_)
}

/// Per-class metrics plus the micro average over a declared class subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub per_class: BTreeMap<ClassId, Prf>,
    pub micro_classes: Vec<ClassId>,
    pub micro: Prf,
}

fn subset_name(classes: &[ClassId]) -> String {
    classes.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("+")
}

impl MetricReport {
    pub fn from_confusion(c: &Confusion, micro_classes: &[ClassId]) -> Self {
        MetricReport {
            per_class: c.classes().iter().map(|&k| (k, prf_class(c, k))).collect(),
            micro_classes: micro_classes.to_vec(),
            micro: micro_prf(c, micro_classes),
        }
    }

    pub fn from_labels(gold: &[ClassId], pred: &[ClassId], domain: &[ClassId], micro_classes: &[ClassId]) -> Result<Self> {
        Ok(MetricReport::from_confusion(
            &Confusion::with_classes(gold, pred, domain)?,
            micro_classes,
        ))
    }

    /// Value-wise mean over several reports (e.g. folds).
    pub fn mean(reports: &[MetricReport]) -> Result<MetricReport> {
        let first = reports
            .first()
            .ok_or_else(|| Error::Invalid("no reports to average".into()))?;
        let per_class = first
            .per_class
            .keys()
            .map(|&k| {
                let items: Vec<Prf> = reports.iter().filter_map(|r| r.per_class.get(&k).copied()).collect();
                (k, Prf::mean(&items))
            })
            .collect();
        let micro: Vec<Prf> = reports.iter().map(|r| r.micro).collect();
        Ok(MetricReport {
            per_class,
            micro_classes: first.micro_classes.clone(),
            micro: Prf::mean(&micro),
        })
    }

    pub fn subset_name(&self) -> String {
        subset_name(&self.micro_classes)
    }

    /// `metric<TAB>subset<TAB>value` lines, values to 4 decimals.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (k, p) in &self.per_class {
            for (name, v) in [("precision", p.precision), ("recall", p.recall), ("f", p.f)] {
                let _ = writeln!(out, "{name}\t{k}\t{v:.4}");
            }
        }
        let subset = self.subset_name();
        for (name, v) in [
            ("micro_precision", self.micro.precision),
            ("micro_recall", self.micro.recall),
            ("micro_f", self.micro.f),
        ] {
            let _ = writeln!(out, "{name}\t{subset}\t{v:.4}");
        }
        out
    }

    /// Aligned human-readable table.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<12} {:>9} {:>9} {:>9}", "class", "P", "R", "F");
        for (k, p) in &self.per_class {
            let _ = writeln!(out, "{:<12} {:>9.4} {:>9.4} {:>9.4}", k, p.precision, p.recall, p.f);
        }
        let label = format!("micro {}", self.subset_name());
        let m = self.micro;
        let _ = writeln!(out, "{:<12} {:>9.4} {:>9.4} {:>9.4}", label, m.precision, m.recall, m.f);
        out
    }
}
