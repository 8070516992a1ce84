use std::collections::BTreeMap;

use super::dem::{merge_probability, DetectorErrorModel};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub u: u32,
    /// Second endpoint; equals the graph's boundary id for boundary edges.
    pub v: u32,
    pub probability: f64,
    pub weight: f64,
    pub observable: bool,
    /// Indices of DEM mechanisms folded into this edge.
    pub sources: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatchingGraph {
    pub num_detectors: usize,
    pub edges: Vec<Edge>,
}

impl MatchingGraph {
    pub fn boundary(&self) -> u32 {
        self.num_detectors as u32
    }
}

pub fn edge_weight(p: f64) -> f64 {
    ((1.0 - p) / p).ln()
}

type Key = (u32, u32, bool);

struct Search<'a> {
    table: &'a BTreeMap<Key, (f64, Vec<usize>)>,
    boundary: u32,
    best: Option<(f64, Vec<Key>)>,
}

impl Search<'_> {
    fn weight(&self, key: &Key) -> Option<f64> {
        self.table.get(key).map(|(p, _)| edge_weight(*p))
    }

    /// Partition `rest` into existing 1- and 2-detector symptoms whose
    /// observable bits XOR to `parity`.
    fn run(&mut self, rest: &[u32], parity: bool, acc: f64, chosen: &mut Vec<Key>) {
        if let Some((best, _)) = &self.best {
            if acc >= *best {
                return;
            }
        }
        let Some((&first, tail)) = rest.split_first() else {
            if !parity {
                self.best = Some((acc, chosen.clone()));
            }
            return;
        };
        for i in 0..tail.len() {
            let other = tail[i];
            let remaining: Vec<u32> = tail
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &d)| d)
                .collect();
            for obs in [false, true] {
                let key = (first, other, obs);
                if let Some(w) = self.weight(&key) {
                    chosen.push(key);
                    self.run(&remaining, parity ^ obs, acc + w, chosen);
                    chosen.pop();
                }
            }
        }
        for obs in [false, true] {
            let key = (first, self.boundary, obs);
            if let Some(w) = self.weight(&key) {
                chosen.push(key);
                self.run(tail, parity ^ obs, acc + w, chosen);
                chosen.pop();
            }
        }
    }
}

/// Turn a merged DEM into a matching graph. Mechanisms touching more than
/// two detectors are split into existing graphlike symptoms (cheapest split,
/// first in lexicographic order on ties) and their probability is folded
/// into each part. When no such split exists, a mechanism carrying factor
/// parts is split along them instead.
pub fn decompose_to_graphlike(dem: &DetectorErrorModel) -> Result<MatchingGraph> {
    let boundary = dem.num_detectors as u32;
    let sector = |d: u32| dem.sectors.as_ref().map_or(0, |s| s[d as usize]);
    // split each mechanism into single-sector parts; the observable rides
    // on the observable sector's part when there is one
    let split = |dets: &[u32], observable: bool| -> Vec<(Vec<u32>, bool)> {
        let mut parts: BTreeMap<u8, Vec<u32>> = BTreeMap::new();
        for &d in dets {
            parts.entry(sector(d)).or_default().push(d);
        }
        let carrier = if parts.contains_key(&dem.observable_sector) {
            dem.observable_sector
        } else {
            parts.keys().next().copied().unwrap_or(0)
        };
        parts
            .into_iter()
            .map(|(s, dets)| (dets, observable && s == carrier))
            .collect()
    };
    let key_of = |dets: &[u32], obs: bool| match *dets {
        [a] => Some((a, boundary, obs)),
        [a, b] => Some((a, b, obs)),
        _ => None,
    };
    // pieces as existing edges: direct when graphlike, else the cheapest split
    let resolve = |table: &BTreeMap<Key, (f64, Vec<usize>)>,
                   pieces: &[(Vec<u32>, bool)]|
     -> Option<Vec<Key>> {
        let mut out = Vec::new();
        for (dets, obs) in pieces {
            if let Some(key) = key_of(dets, *obs) {
                out.push(key);
                continue;
            }
            let mut search = Search {
                table,
                boundary,
                best: None,
            };
            search.run(dets, *obs, 0.0, &mut Vec::new());
            out.extend(search.best?.1);
        }
        Some(out)
    };

    let mut table: BTreeMap<Key, (f64, Vec<usize>)> = BTreeMap::new();
    let mut folds: Vec<(Vec<Key>, f64, usize)> = Vec::new();
    for (idx, m) in dem.mechanisms.iter().enumerate() {
        let parts = split(&m.detectors, m.observable);
        match (parts.len(), key_of(&m.detectors, m.observable)) {
            (1, Some(key)) => {
                let entry = table.entry(key).or_insert((0.0, Vec::new()));
                entry.0 = merge_probability(entry.0, m.probability);
                entry.1.push(idx);
            }
            _ => folds.push((Vec::new(), m.probability, idx)),
        }
    }
    for (parts_out, _, idx) in folds.iter_mut() {
        let m = &dem.mechanisms[*idx];
        let factored = || -> Option<Vec<Key>> {
            if m.parts.is_empty() || m.parts.iter().any(|(d, _)| d.is_empty()) {
                return None;
            }
            let pieces: Vec<_> = m.parts.iter().flat_map(|(d, o)| split(d, *o)).collect();
            resolve(&table, &pieces)
        };
        match resolve(&table, &split(&m.detectors, m.observable)).or_else(factored) {
            Some(keys) => *parts_out = keys,
            None => {
                return Err(Error::UndecomposableMechanism {
                    detectors: m.detectors.iter().map(|&d| d as usize).collect(),
                    observable: m.observable,
                })
            }
        }
    }
    // folding after all searches keeps the result independent of DEM order
    for (parts, p, idx) in folds {
        for key in parts {
            let entry = table.entry(key).or_insert((0.0, Vec::new()));
            entry.0 = merge_probability(entry.0, p);
            entry.1.push(idx);
        }
    }

    let mut edges = Vec::with_capacity(table.len());
    for ((u, v, observable), (p, sources)) in table {
        if !(p > 0.0 && p < 0.5) {
            return Err(Error::invalid(format!(
                "edge ({u}, {v}) has probability {p}, outside (0, 1/2)"
            )));
        }
        edges.push(Edge {
            u,
            v,
            probability: p,
            weight: edge_weight(p),
            observable,
            sources,
        });
    }
    Ok(MatchingGraph {
        num_detectors: dem.num_detectors,
        edges,
    })
}
