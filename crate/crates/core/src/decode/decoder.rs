use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::graph::MatchingGraph;
use super::matching::min_weight_perfect_matching;
use crate::error::{Error, Result};

// Shortest-path weights are quantised to integers for the blossom solver.
const SCALE: f64 = (1u64 << 24) as f64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prediction {
    pub observable: bool,
    /// Total shortest-path weight of the chosen matching.
    pub weight: f64,
}

/// Exact minimum-weight perfect matching decoder with precomputed
/// all-pairs shortest paths.
#[derive(Clone, Debug)]
pub struct Decoder {
    n: usize,
    dist: Vec<f64>,
    parity: Vec<bool>,
    boundary_dist: Vec<f64>,
    boundary_parity: Vec<bool>,
    component: Vec<u32>,
    /// Components in which some path can flip the observable.
    relevant: Vec<bool>,
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        parent[x as usize] = parent[parent[x as usize] as usize];
        x = parent[x as usize];
    }
    x
}

impl Decoder {
    pub fn new(graph: &MatchingGraph) -> Self {
        let n = graph.num_detectors;
        let nodes = n + 1;
        // lightest edge per node pair
        let mut adj: Vec<Vec<(usize, f64, bool)>> = vec![Vec::new(); nodes];
        for e in &graph.edges {
            let (u, v) = (e.u as usize, e.v as usize);
            for (a, b) in [(u, v), (v, u)] {
                match adj[a].iter_mut().find(|x| x.0 == b) {
                    Some(x) if e.weight < x.1 => *x = (b, e.weight, e.observable),
                    Some(_) => {}
                    None => adj[a].push((b, e.weight, e.observable)),
                }
            }
        }

        let mut parent: Vec<u32> = (0..n as u32).collect();
        for e in &graph.edges {
            if (e.v as usize) < n {
                let (a, b) = (find(&mut parent, e.u), find(&mut parent, e.v));
                parent[a.max(b) as usize] = a.min(b);
            }
        }
        let component: Vec<u32> = (0..n as u32).map(|d| find(&mut parent, d)).collect();
        let mut relevant = vec![false; n];
        for e in graph.edges.iter().filter(|e| e.observable) {
            relevant[component[e.u as usize] as usize] = true;
        }

        let mut dist = vec![f64::INFINITY; n * n];
        let mut parity = vec![false; n * n];
        let mut boundary_dist = vec![f64::INFINITY; n];
        let mut boundary_parity = vec![false; n];
        let mut d = vec![f64::INFINITY; nodes];
        let mut par = vec![false; nodes];
        let mut done = vec![false; nodes];
        let mut heap = BinaryHeap::new();
        for src in 0..n {
            d.fill(f64::INFINITY);
            done.fill(false);
            d[src] = 0.0;
            par[src] = false;
            heap.push(Entry(0.0, src));
            while let Some(Entry(du, u)) = heap.pop() {
                if done[u] {
                    continue;
                }
                done[u] = true;
                for &(v, w, obs) in &adj[u] {
                    let nd = du + w;
                    if nd < d[v] {
                        d[v] = nd;
                        par[v] = par[u] ^ obs;
                        heap.push(Entry(nd, v));
                    }
                }
            }
            dist[src * n..(src + 1) * n].copy_from_slice(&d[..n]);
            parity[src * n..(src + 1) * n].copy_from_slice(&par[..n]);
            boundary_dist[src] = d[n];
            boundary_parity[src] = par[n];
        }
        Decoder {
            n,
            dist,
            parity,
            boundary_dist,
            boundary_parity,
            component,
            relevant,
        }
    }

    pub fn num_detectors(&self) -> usize {
        self.n
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        self.dist[a * self.n + b]
    }

    pub fn boundary_distance(&self, a: usize) -> f64 {
        self.boundary_dist[a]
    }

    /// Observable prediction, skipping components that cannot flip it.
    pub fn predict(&self, flipped: &[u32]) -> Result<bool> {
        Ok(self.decode_filtered(flipped, true)?.observable)
    }

    /// Full matching over every flipped detector.
    pub fn decode(&self, flipped: &[u32]) -> Result<Prediction> {
        self.decode_filtered(flipped, false)
    }

    fn decode_filtered(&self, flipped: &[u32], relevant_only: bool) -> Result<Prediction> {
        let mut nodes: Vec<u32> = flipped
            .iter()
            .copied()
            .filter(|&d| !relevant_only || self.relevant[self.component[d as usize] as usize])
            .collect();
        if nodes.is_empty() {
            return Ok(Prediction {
                observable: false,
                weight: 0.0,
            });
        }
        nodes.sort_unstable_by_key(|&d| (self.component[d as usize], d));
        let mut result = Prediction {
            observable: false,
            weight: 0.0,
        };
        for group in
            nodes.chunk_by(|&a, &b| self.component[a as usize] == self.component[b as usize])
        {
            let p = self.match_group(group)?;
            result.observable ^= p.observable;
            result.weight += p.weight;
        }
        Ok(result)
    }

    fn match_group(&self, nodes: &[u32]) -> Result<Prediction> {
        let n = self.n;
        let b = |i: u32| {
            (
                self.boundary_dist[i as usize],
                self.boundary_parity[i as usize],
            )
        };
        let pair = |i: u32, j: u32| {
            let k = i as usize * n + j as usize;
            (self.dist[k], self.parity[k])
        };
        match *nodes {
            [a] => {
                let (w, p) = b(a);
                if w.is_finite() {
                    Ok(Prediction {
                        observable: p,
                        weight: w,
                    })
                } else {
                    Err(Error::DisconnectedSyndrome(a as usize))
                }
            }
            [a, c] => {
                let (wp, pp) = pair(a, c);
                let ((wa, pa), (wc, pc)) = (b(a), b(c));
                let wb = wa + wc;
                if !wp.is_finite() && !wb.is_finite() {
                    let bad = if wa.is_finite() { c } else { a };
                    return Err(Error::DisconnectedSyndrome(bad as usize));
                }
                if wp <= wb {
                    Ok(Prediction {
                        observable: pp,
                        weight: wp,
                    })
                } else {
                    Ok(Prediction {
                        observable: pa ^ pc,
                        weight: wb,
                    })
                }
            }
            _ => self.blossom(nodes),
        }
    }

    /// Detectors `0..m`, boundary copies `m..2m`; copies pair up for free.
    fn blossom(&self, nodes: &[u32]) -> Result<Prediction> {
        let m = nodes.len();
        let mut edges = Vec::with_capacity(m * m);
        for (i, &a) in nodes.iter().enumerate() {
            let mut connected = false;
            for (j, &c) in nodes.iter().enumerate().skip(i + 1) {
                let w = self.distance(a as usize, c as usize);
                if w.is_finite() {
                    edges.push((i, j, (w * SCALE).round() as i64));
                    connected = true;
                }
            }
            let w = self.boundary_dist[a as usize];
            if w.is_finite() {
                edges.push((i, m + i, (w * SCALE).round() as i64));
                connected = true;
            }
            connected |= nodes[..i]
                .iter()
                .any(|&c| self.distance(a as usize, c as usize).is_finite());
            if !connected {
                return Err(Error::DisconnectedSyndrome(a as usize));
            }
            for j in i + 1..m {
                edges.push((m + i, m + j, 0));
            }
        }
        let mate = min_weight_perfect_matching(2 * m, &edges)
            .ok_or_else(|| Error::DisconnectedSyndrome(nodes[0] as usize))?;
        let mut result = Prediction {
            observable: false,
            weight: 0.0,
        };
        for (i, &a) in nodes.iter().enumerate() {
            let j = mate[i];
            if j >= m {
                result.observable ^= self.boundary_parity[a as usize];
                result.weight += self.boundary_dist[a as usize];
            } else if j > i {
                let k = a as usize * self.n + nodes[j] as usize;
                result.observable ^= self.parity[k];
                result.weight += self.dist[k];
            }
        }
        Ok(result)
    }
}

/// Decode one syndrome against a graph (builds the decoder each call).
pub fn mwpm_decode(graph: &MatchingGraph, flipped: &[u32]) -> Result<bool> {
    Decoder::new(graph).predict(flipped)
}
