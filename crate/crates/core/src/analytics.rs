//! Trend series per taxonomy level, citation comparison and the
//! institution overview.
//!
//! Trends use fractional counting: each publication contributes unit mass
//! split across its rolled-up concepts. Citation comparison counts a
//! publication's full citation number once for every field it touches.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distribution::TopicDistribution;
use crate::graph::{Node, NodeId, NodeKind};
use crate::snapshot::Snapshot;

/// Widest accepted year window.
pub const MAX_YEAR_SPAN: i64 = 500;

#[derive(Debug, Error, PartialEq)]
pub enum AnalyticsError {
    #[error("invalid year range {from}..={to}")]
    InvalidYearRange { from: i64, to: i64 },
    #[error("trend score needs at least two years, got {0}")]
    TooFewYears(usize),
    #[error("unknown concept `{0}`")]
    UnknownConcept(NodeId),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendSeries {
    pub fos: NodeId,
    pub level: u32,
    /// Every year of the requested range, zero-filled.
    pub counts: BTreeMap<i64, f64>,
    /// Least-squares slope over year index divided by `max(mean, 1)`.
    pub trend_score: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitationComparison {
    pub fos: NodeId,
    pub total_citations: u64,
    pub publication_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverviewTile {
    pub fos: NodeId,
    pub publication_count: u64,
    pub researcher_count: u64,
    pub total_citations: u64,
}

pub fn year_of(node: &Node) -> Option<i64> {
    node.int_prop("year")
}

pub fn citations_of(node: &Node) -> u64 {
    node.int_prop("citations").unwrap_or(0).max(0) as u64
}

/// Slope of `counts` regressed on 0..n, normalized by `max(mean, 1)`.
pub fn trend_score(counts: &[f64]) -> Result<f64, AnalyticsError> {
    let n = counts.len();
    if n < 2 {
        return Err(AnalyticsError::TooFewYears(n));
    }
    let nf = n as f64;
    let mean_x = (nf - 1.0) / 2.0;
    let mean_y = counts.iter().sum::<f64>() / nf;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (i, y) in counts.iter().enumerate() {
        let dx = i as f64 - mean_x;
        sxy += dx * (y - mean_y);
        sxx += dx * dx;
    }
    Ok(sxy / sxx / mean_y.max(1.0))
}

fn check_range(from: i64, to: i64) -> Result<(), AnalyticsError> {
    if from > to || to - from >= MAX_YEAR_SPAN {
        return Err(AnalyticsError::InvalidYearRange { from, to });
    }
    Ok(())
}

/// Most recent `years`-long window ending at the newest publication year.
pub fn default_window(snap: &Snapshot, years: i64) -> Option<(i64, i64)> {
    let newest = snap
        .graph
        .nodes_of_kind(NodeKind::Publication)
        .filter_map(year_of)
        .max()?;
    Some((newest - years.max(1) + 1, newest))
}

pub fn trend_series(
    snap: &Snapshot,
    level: u32,
    from: i64,
    to: i64,
) -> Result<Vec<TrendSeries>, AnalyticsError> {
    check_range(from, to)?;
    let mut mass: BTreeMap<NodeId, BTreeMap<i64, f64>> = BTreeMap::new();
    for node in snap.graph.nodes_of_kind(NodeKind::Publication) {
        let Some(year) = year_of(node).filter(|y| (from..=to).contains(y)) else {
            continue;
        };
        let dist = &snap.profiles.publications[&node.id];
        for (fos, w) in snap.taxonomy.rollup_distribution(dist, level).iter() {
            *mass
                .entry(fos.clone())
                .or_default()
                .entry(year)
                .or_insert(0.0) += w;
        }
    }
    let mut series: Vec<TrendSeries> = mass
        .into_iter()
        .map(|(fos, by_year)| {
            let counts: BTreeMap<i64, f64> = (from..=to)
                .map(|y| (y, by_year.get(&y).copied().unwrap_or(0.0)))
                .collect();
            let values: Vec<f64> = counts.values().copied().collect();
            TrendSeries {
                fos,
                level,
                trend_score: trend_score(&values).unwrap_or(0.0),
                counts,
            }
        })
        .collect();
    series.sort_by(|a, b| {
        b.trend_score
            .total_cmp(&a.trend_score)
            .then_with(|| a.fos.cmp(&b.fos))
    });
    Ok(series)
}

/// Citation totals per field, in the order requested.
pub fn compare_citations(
    snap: &Snapshot,
    fos_ids: &[NodeId],
) -> Result<Vec<CitationComparison>, AnalyticsError> {
    let levels: Vec<u32> = fos_ids
        .iter()
        .map(|f| {
            snap.taxonomy
                .level(f)
                .ok_or_else(|| AnalyticsError::UnknownConcept(f.clone()))
        })
        .collect::<Result<_, _>>()?;
    let mut out: Vec<CitationComparison> = fos_ids
        .iter()
        .map(|f| CitationComparison {
            fos: f.clone(),
            total_citations: 0,
            publication_count: 0,
        })
        .collect();
    let mut rollups: BTreeMap<u32, TopicDistribution> = BTreeMap::new();
    for node in snap.graph.nodes_of_kind(NodeKind::Publication) {
        let dist = &snap.profiles.publications[&node.id];
        if dist.is_empty() {
            continue;
        }
        rollups.clear();
        for (row, level) in out.iter_mut().zip(&levels) {
            let rolled = rollups
                .entry(*level)
                .or_insert_with(|| snap.taxonomy.rollup_distribution(dist, *level));
            if rolled.get(&row.fos) > 0.0 {
                row.total_citations += citations_of(node);
                row.publication_count += 1;
            }
        }
    }
    Ok(out)
}

/// One tile per active root concept, busiest first.
pub fn institution_overview(snap: &Snapshot) -> Vec<OverviewTile> {
    let mut tiles: BTreeMap<NodeId, OverviewTile> = snap
        .taxonomy
        .roots()
        .iter()
        .map(|r| {
            (
                r.clone(),
                OverviewTile {
                    fos: r.clone(),
                    publication_count: 0,
                    researcher_count: 0,
                    total_citations: 0,
                },
            )
        })
        .collect();
    for node in snap.graph.nodes_of_kind(NodeKind::Publication) {
        let dist = &snap.profiles.publications[&node.id];
        for (root, _) in snap.taxonomy.rollup_distribution(dist, 0).iter() {
            let tile = tiles.get_mut(root).expect("level-0 concept is a root");
            tile.publication_count += 1;
            tile.total_citations += citations_of(node);
        }
    }
    for dist in snap.profiles.researchers.values() {
        for (root, _) in snap.taxonomy.rollup_distribution(dist, 0).iter() {
            tiles.get_mut(root).expect("root").researcher_count += 1;
        }
    }
    let mut out: Vec<OverviewTile> = tiles
        .into_values()
        .filter(|t| t.publication_count > 0 || t.researcher_count > 0)
        .collect();
    out.sort_by(|a, b| {
        b.publication_count
            .cmp(&a.publication_count)
            .then_with(|| a.fos.cmp(&b.fos))
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series_scores_zero() {
        assert_eq!(trend_score(&[3.0, 3.0, 3.0]).unwrap(), 0.0);
    }

    #[test]
    fn linear_series_hand_computed() {
        let s = trend_score(&[0.0, 1.0, 2.0, 3.0]).unwrap();
        assert!((s - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn small_means_are_not_amplified() {
        // slope 0.2, mean 0.3 -> divided by 1, not 0.3
        let s = trend_score(&[0.1, 0.3, 0.5]).unwrap();
        assert!((s - 0.2).abs() < 1e-12);
    }

    #[test]
    fn decreasing_series_negative() {
        assert!(trend_score(&[5.0, 4.0, 2.0, 1.0]).unwrap() < 0.0);
    }

    #[test]
    fn too_few_years() {
        assert_eq!(trend_score(&[1.0]), Err(AnalyticsError::TooFewYears(1)));
        assert_eq!(trend_score(&[]), Err(AnalyticsError::TooFewYears(0)));
    }

    #[test]
    fn range_checks() {
        assert!(check_range(2020, 2019).is_err());
        assert!(check_range(0, MAX_YEAR_SPAN).is_err());
        assert!(check_range(2020, 2020).is_ok());
    }
}
