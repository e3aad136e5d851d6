use std::collections::HashMap;

use serde::Serialize;

use crate::arith::{format_rational, ExtRational, Rational};

/// The functional digraph of a map restricted to its rational preperiodic
/// points. `types[i] = (l, t)`: node `i` lands after `t` steps on an `l`-cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Portrait {
    pub nodes: Vec<ExtRational>,
    pub edges: Vec<usize>,
    pub types: Vec<(u32, u32)>,
}

impl Portrait {
    /// Builds the portrait of `points` (in any order) under `image`.
    /// Panics if the set is not forward closed.
    pub fn from_points(mut points: Vec<ExtRational>, mut image: impl FnMut(&ExtRational) -> ExtRational) -> Self {
        points.sort();
        points.dedup();
        let index: HashMap<&ExtRational, usize> = points.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let edges: Vec<usize> = points
            .iter()
            .map(|p| {
                let q = image(p);
                *index
                    .get(&q)
                    .unwrap_or_else(|| panic!("preperiodic set not forward closed: {p} maps to {q}"))
            })
            .collect();
        let types = node_types(&edges);
        Portrait {
            nodes: points,
            edges,
            types,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, p: &ExtRational) -> bool {
        self.nodes.binary_search(p).is_ok()
    }

    pub fn index_of(&self, p: &ExtRational) -> Option<usize> {
        self.nodes.binary_search(p).ok()
    }

    /// Distinct cycle lengths, ascending.
    pub fn cycle_lengths(&self) -> Vec<u32> {
        let mut ls: Vec<u32> = self.types.iter().filter(|ty| ty.1 == 0).map(|ty| ty.0).collect();
        ls.sort_unstable();
        ls.dedup();
        ls
    }

    pub fn max_cycle(&self) -> u32 {
        self.types.iter().map(|ty| ty.0).max().unwrap_or(0)
    }

    pub fn has_type(&self, l: u32, t: u32) -> bool {
        self.types.contains(&(l, t))
    }

    /// A string that depends only on the isomorphism class of the digraph.
    pub fn shape_key(&self) -> String {
        let n = self.len();
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, &j) in self.edges.iter().enumerate() {
            if self.types[i].1 > 0 {
                children[j].push(i);
            }
        }
        fn tree_code(v: usize, children: &[Vec<usize>]) -> String {
            let mut subs: Vec<String> = children[v].iter().map(|&c| tree_code(c, children)).collect();
            subs.sort();
            format!("({})", subs.concat())
        }
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if self.types[start].1 != 0 || seen[start] {
                continue;
            }
            let mut codes = Vec::new();
            let mut v = start;
            while !seen[v] {
                seen[v] = true;
                codes.push(tree_code(v, &children));
                v = self.edges[v];
            }
            let best = (0..codes.len())
                .map(|r| {
                    let mut rot = codes[r..].to_vec();
                    rot.extend_from_slice(&codes[..r]);
                    rot.concat()
                })
                .min()
                .unwrap_or_default();
            cycles.push(format!("[{best}]"));
        }
        cycles.sort();
        cycles.concat()
    }

    pub fn record(&self, t: &Rational) -> PortraitRecord {
        PortraitRecord {
            t: format_rational(t),
            nodes: self.nodes.iter().map(ToString::to_string).collect(),
            edges: self.edges.clone(),
            types: self.types.iter().map(|&(l, t)| [l, t]).collect(),
        }
    }
}

/// JSON form `{t, nodes, edges, types}`.
#[derive(Clone, Debug, Serialize)]
pub struct PortraitRecord {
    pub t: String,
    pub nodes: Vec<String>,
    pub edges: Vec<usize>,
    pub types: Vec<[u32; 2]>,
}

/// `(period, tail length)` of every node of a functional graph.
pub fn node_types(edges: &[usize]) -> Vec<(u32, u32)> {
    let n = edges.len();
    let mut out = vec![(0, 0); n];
    let mut pos = vec![usize::MAX; n];
    for start in 0..n {
        let mut path = Vec::new();
        let mut v = start;
        while pos[v] == usize::MAX {
            pos[v] = path.len();
            path.push(v);
            v = edges[v];
        }
        let entry = pos[v];
        let period = (path.len() - entry) as u32;
        for (k, &w) in path.iter().enumerate() {
            out[w] = (period, entry.saturating_sub(k) as u32);
        }
        for &w in &path {
            pos[w] = usize::MAX;
        }
    }
    out
}
