use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::corpus::{ClassId, Dataset};
use crate::error::{Error, Result};
use crate::features::{Extractor, FeatureConfig};
use crate::resources::Resources;

/// Mutual information (natural log) between a binary feature and the class,
/// from the number of documents containing the feature per class.
///
/// `present[c]` counts documents of class `c` that contain the feature and
/// `class_totals[c]` all documents of class `c`.
pub fn mutual_information(present: &BTreeMap<ClassId, usize>, class_totals: &BTreeMap<ClassId, usize>) -> f64 {
    let n: usize = class_totals.values().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    let with: usize = present.values().sum();
    let p_present = with as f64 / n;
    let mut mi = 0.0;
    for (c, &total) in class_totals {
        let p_class = total as f64 / n;
        let k = present.get(c).copied().unwrap_or(0);
        for (joint, p_f) in [(k, p_present), (total - k, 1.0 - p_present)] {
            if joint > 0 {
                let p = joint as f64 / n;
                mi += p * (p / (p_f * p_class)).ln();
            }
        }
    }
    mi.max(0.0)
}

/// Ranks the features produced by `cfg` over `d` by the mutual information
/// of their presence with the class. Descending, ties (to 1e-12) by name; `top_k = 0`
/// keeps every feature.
pub fn mi_rank(d: &Dataset, cfg: &FeatureConfig, res: &Resources, top_k: usize) -> Result<Vec<(String, f64)>> {
    if d.is_empty() {
        return Err(Error::Invalid("cannot rank features of an empty dataset".into()));
    }
    let labels = d.labels()?;
    let extractor = Extractor::new(cfg, res)?;
    let docs: Vec<BTreeSet<String>> = d
        .tweets()
        .par_iter()
        .map(|t| extractor.named_features(&t.text).into_iter().map(|(n, _)| n).collect())
        .collect();
    let mut class_totals: BTreeMap<ClassId, usize> = BTreeMap::new();
    for &y in &labels {
        *class_totals.entry(y).or_default() += 1;
    }
    let mut present: BTreeMap<String, BTreeMap<ClassId, usize>> = BTreeMap::new();
    for (names, &y) in docs.into_iter().zip(&labels) {
        for name in names {
            *present.entry(name).or_default().entry(y).or_default() += 1;
        }
    }
    let mut ranked: Vec<(String, f64)> = present
        .into_iter()
        .map(|(name, counts)| {
            let mi = mutual_information(&counts, &class_totals);
            (name, mi)
        })
        .collect();
    // Values equal up to rounding noise (e.g. mirrored count tables) tie and
    // fall back to the name order.
    let key = |mi: f64| (mi * 1e12).round() as i64;
    ranked.sort_by(|a, b| key(b.1).cmp(&key(a.1)).then_with(|| a.0.cmp(&b.0)));
    if top_k > 0 {
        ranked.truncate(top_k);
    }
    Ok(ranked)
}

/// Numbered `rank<TAB>feature<TAB>MI` lines.
pub fn render_ranking(ranked: &[(String, f64)]) -> String {
    ranked
        .iter()
        .enumerate()
        .map(|(i, (name, mi))| format!("{}\t{name}\t{mi:.4}\n", i + 1))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(pairs: &[(ClassId, usize)]) -> BTreeMap<ClassId, usize> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn anchors() {
        let totals = counts(&[(0, 4), (1, 4)]);
        let perfect = mutual_information(&counts(&[(1, 4)]), &totals);
        assert!((perfect - std::f64::consts::LN_2).abs() < 1e-12);
        let independent = mutual_information(&counts(&[(0, 2), (1, 2)]), &totals);
        assert!(independent.abs() < 1e-12);
        assert_eq!(mutual_information(&counts(&[]), &totals), 0.0);
    }
}
