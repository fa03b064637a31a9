use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graph::NodeId;

/// Normalized concept → weight map. Entries are strictly positive and sum
/// to 1 (within floating-point error) unless the map is empty.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TopicDistribution(BTreeMap<NodeId, f64>);

impl TopicDistribution {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Drops non-positive entries and rescales the rest to sum 1.
    pub fn normalized(weights: BTreeMap<NodeId, f64>) -> Self {
        let kept: BTreeMap<NodeId, f64> = weights
            .into_iter()
            .filter(|(_, w)| *w > 0.0 && w.is_finite())
            .collect();
        let total: f64 = kept.values().sum();
        if total <= 0.0 {
            return Self::empty();
        }
        TopicDistribution(kept.into_iter().map(|(k, w)| (k, w / total)).collect())
    }

    /// Unweighted mean of `parts`, renormalized. Empty parts contribute
    /// nothing.
    pub fn mean<'a, I>(parts: I) -> Self
    where
        I: IntoIterator<Item = &'a TopicDistribution>,
    {
        let mut acc: BTreeMap<NodeId, f64> = BTreeMap::new();
        let mut n = 0usize;
        for part in parts {
            if part.is_empty() {
                continue;
            }
            n += 1;
            for (k, w) in part.iter() {
                *acc.entry(k.clone()).or_insert(0.0) += w;
            }
        }
        if n == 0 {
            return Self::empty();
        }
        let n = n as f64;
        Self::normalized(acc.into_iter().map(|(k, w)| (k, w / n)).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, id: &NodeId) -> f64 {
        self.0.get(id).copied().unwrap_or(0.0)
    }

    pub fn contains(&self, id: &NodeId) -> bool {
        self.0.contains_key(id)
    }

    /// Entries in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = (&NodeId, f64)> {
        self.0.iter().map(|(k, w)| (k, *w))
    }

    pub fn total(&self) -> f64 {
        self.0.values().sum()
    }

    pub fn as_map(&self) -> &BTreeMap<NodeId, f64> {
        &self.0
    }

    /// Cosine similarity treating both distributions as sparse vectors.
    pub fn cosine(&self, other: &TopicDistribution) -> f64 {
        if self.is_empty() || other.is_empty() {
            return 0.0;
        }
        let mut dot = 0.0;
        for (k, w) in self.iter() {
            if let Some(v) = other.0.get(k) {
                dot += w * v;
            }
        }
        let na: f64 = self.0.values().map(|w| w * w).sum();
        let nb: f64 = other.0.values().map(|w| w * w).sum();
        (dot / (na * nb).sqrt()).clamp(0.0, 1.0)
    }
}

impl FromIterator<(NodeId, f64)> for TopicDistribution {
    /// Collects and normalizes.
    fn from_iter<T: IntoIterator<Item = (NodeId, f64)>>(iter: T) -> Self {
        let mut acc = BTreeMap::new();
        for (k, w) in iter {
            *acc.entry(k).or_insert(0.0) += w;
        }
        Self::normalized(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(pairs: &[(&str, f64)]) -> TopicDistribution {
        pairs.iter().map(|(k, w)| (NodeId::from(*k), *w)).collect()
    }

    #[test]
    fn renormalizes() {
        let x = d(&[("f1", 0.4), ("f2", 0.4)]);
        assert_eq!(x.get(&"f1".into()), 0.5);
        assert_eq!(x.get(&"f2".into()), 0.5);
        assert_eq!(d(&[("f1", 0.7)]).get(&"f1".into()), 1.0);
    }

    #[test]
    fn drops_zero_entries() {
        let x = d(&[("a", 0.0), ("b", 2.0)]);
        assert_eq!(x.len(), 1);
        assert!(d(&[]).is_empty());
    }

    #[test]
    fn mean_of_disjoint() {
        let m = TopicDistribution::mean([&d(&[("f1", 1.0)]), &d(&[("f2", 1.0)])]);
        assert_eq!(m, d(&[("f1", 0.5), ("f2", 0.5)]));
        assert!(TopicDistribution::mean([&TopicDistribution::empty()]).is_empty());
    }

    #[test]
    fn cosine_identical_is_one() {
        let x = d(&[("a", 0.3), ("b", 0.7)]);
        assert_eq!(x.cosine(&x), 1.0);
        assert_eq!(x.cosine(&d(&[("c", 1.0)])), 0.0);
        assert_eq!(x.cosine(&TopicDistribution::empty()), 0.0);
    }
}
