use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

pub type FeatureId = u32;

/// Interned feature names. Ids are dense from 0 in insertion order. Once
/// frozen, unknown names map to no feature.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpace {
    names: IndexSet<String>,
    frozen: bool,
}

impl FeatureSpace {
    pub fn new() -> Self {
        FeatureSpace::default()
    }

    /// A frozen space over `names`, in order.
    pub fn from_names<I: IntoIterator<Item = String>>(names: I) -> Self {
        FeatureSpace {
            names: names.into_iter().collect(),
            frozen: true,
        }
    }

    /// Id of `name`, allocating a new one unless the space is frozen.
    pub fn intern(&mut self, name: &str) -> Option<FeatureId> {
        if let Some(id) = self.get(name) {
            return Some(id);
        }
        if self.frozen {
            return None;
        }
        let (idx, _) = self.names.insert_full(name.to_owned());
        Some(idx as FeatureId)
    }

    pub fn get(&self, name: &str) -> Option<FeatureId> {
        self.names.get_index_of(name).map(|i| i as FeatureId)
    }

    pub fn name(&self, id: FeatureId) -> Option<&str> {
        self.names.get_index(id as usize).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn freeze(&mut self) {
        self.frozen = true;
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }
}

/// Sparse vector: strictly increasing ids, no zero values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    entries: Vec<(FeatureId, f64)>,
}

impl FeatureVector {
    pub fn new() -> Self {
        FeatureVector::default()
    }

    /// Builds a vector from arbitrary pairs: sorted by id, values of repeated
    /// ids summed, zeros dropped.
    pub fn from_pairs(mut pairs: Vec<(FeatureId, f64)>) -> Self {
        pairs.sort_by_key(|&(id, _)| id);
        let mut entries: Vec<(FeatureId, f64)> = Vec::with_capacity(pairs.len());
        for (id, v) in pairs {
            match entries.last_mut() {
                Some((last, acc)) if *last == id => *acc += v,
                _ => entries.push((id, v)),
            }
        }
        entries.retain(|&(_, v)| v != 0.0);
        FeatureVector { entries }
    }

    pub fn entries(&self) -> &[(FeatureId, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: FeatureId) -> Option<f64> {
        self.entries
            .binary_search_by_key(&id, |&(i, _)| i)
            .ok()
            .map(|k| self.entries[k].1)
    }

    pub fn max_id(&self) -> Option<FeatureId> {
        self.entries.last().map(|&(i, _)| i)
    }

    pub fn squared_norm(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v * v).sum()
    }

    /// Dot product with a dense vector; ids past its end contribute nothing.
    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.entries
            .iter()
            .filter_map(|&(i, v)| dense.get(i as usize).map(|w| w * v))
            .sum()
    }

    /// `dense += scale * self`. Ids past the end of `dense` are ignored.
    pub fn add_to(&self, dense: &mut [f64], scale: f64) {
        for &(i, v) in &self.entries {
            if let Some(w) = dense.get_mut(i as usize) {
                *w += scale * v;
            }
        }
    }

    /// Pairs resolved to their feature names.
    pub fn named<'a>(&'a self, space: &'a FeatureSpace) -> Vec<(&'a str, f64)> {
        self.entries
            .iter()
            .map(|&(i, v)| (space.name(i).unwrap_or("?"), v))
            .collect()
    }
}
