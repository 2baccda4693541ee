//! Condensing a pair matrix into networks.
//!
//! The complete weighted graph over all non-degenerate pairs is thinned
//! by repeatedly removing the least-preferred remaining edge until the
//! next removal would disconnect the node set; that edge is restored and
//! kept as the bridge. Removal halts at the first disconnection (later
//! removable edges are not attempted) and a single isolated node counts
//! as disconnection.
//!
//! Three preference orders act on the fit channels (convergent on the
//! most negative strength, strength on the largest, stability on the
//! smallest p-value; the stability sorting is the one that prefers the
//! most probable correlations) and one on the ultrametric distance. A
//! minimum spanning tree is provided as the classical baseline.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pairs::PairMatrix;

/// One undirected weighted edge, stored as indices into the node list
/// with `code(u) < code(v)` lexicographically.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// Undirected weighted graph over entity codes; no self-loops, at most
/// one edge per unordered pair, all weights finite.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    nodes: Vec<String>,
    edges: Vec<Edge>,
}

/// Which value of a pair drives edge weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Channel {
    Gamma,
    Beta,
    Ud,
}

/// Edge preference used for the percolation-threshold thinning. Each tag
/// fixes a channel and a direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preference {
    /// Most negative strength preferred: converging series survive.
    Convergent,
    /// Largest strength preferred: strong divergence survives.
    Strength,
    /// Smallest p-value preferred: the most stable fits survive.
    Stability,
    /// Smallest ultrametric distance preferred.
    SmallDistance,
}

impl Preference {
    pub fn channel(&self) -> Channel {
        match self {
            Preference::Convergent | Preference::Strength => Channel::Gamma,
            Preference::Stability => Channel::Beta,
            Preference::SmallDistance => Channel::Ud,
        }
    }

    /// Whether smaller weights are preferred (kept longest).
    pub fn prefers_smaller(&self) -> bool {
        !matches!(self, Preference::Strength)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Preference::Convergent => "cp",
            Preference::Strength => "sp",
            Preference::Stability => "s",
            Preference::SmallDistance => "ud",
        }
    }
}

/// The network remaining on the percolation threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdNetwork {
    /// Surviving graph; always connected.
    pub graph: WeightedGraph,
    /// Edges removed before the threshold, in removal order. The bridge
    /// is not among them.
    pub removed: Vec<Edge>,
    /// The edge whose removal disconnected the graph and was re-added.
    pub bridge: Edge,
    pub preference: Preference,
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
    components: usize,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
            components: n,
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        self.components -= 1;
        true
    }
}

impl WeightedGraph {
    /// Build a graph from node codes and `(u, v, weight)` index triples.
    /// Edges are reoriented so the lexicographically smaller code comes
    /// first.
    pub fn new(nodes: Vec<String>, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Contract("graph needs at least one node".into()));
        }
        for (i, code) in nodes.iter().enumerate() {
            if nodes[..i].contains(code) {
                return Err(Error::Contract(format!("duplicate node code {code}")));
            }
        }
        let mut seen = HashSet::new();
        let mut oriented = Vec::with_capacity(edges.len());
        for (u, v, weight) in edges {
            if u == v {
                return Err(Error::Contract(format!("self-loop on node {}", nodes[u])));
            }
            if u >= nodes.len() || v >= nodes.len() {
                return Err(Error::Contract(format!("edge ({u}, {v}) out of range")));
            }
            if !weight.is_finite() {
                return Err(Error::Contract(format!(
                    "non-finite weight on ({}, {})",
                    nodes[u], nodes[v]
                )));
            }
            let (u, v) = if nodes[u] < nodes[v] { (u, v) } else { (v, u) };
            if !seen.insert((u, v)) {
                return Err(Error::Contract(format!(
                    "duplicate edge ({}, {})",
                    nodes[u], nodes[v]
                )));
            }
            oriented.push(Edge { u, v, weight });
        }
        Ok(Self {
            nodes,
            edges: oriented,
        })
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Entity codes of an edge, smaller first.
    pub fn edge_codes(&self, e: &Edge) -> (&str, &str) {
        (&self.nodes[e.u], &self.nodes[e.v])
    }

    /// Connected components as sorted code lists, sorted by first member.
    pub fn components(&self) -> Vec<Vec<String>> {
        let mut uf = UnionFind::new(self.nodes.len());
        for e in &self.edges {
            uf.union(e.u, e.v);
        }
        let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        for i in 0..self.nodes.len() {
            let root = uf.find(i);
            groups.entry(root).or_default().push(self.nodes[i].clone());
        }
        let mut out: Vec<Vec<String>> = groups.into_values().collect();
        for g in &mut out {
            g.sort();
        }
        out.sort();
        out
    }

    pub fn is_connected(&self) -> bool {
        let mut uf = UnionFind::new(self.nodes.len());
        for e in &self.edges {
            uf.union(e.u, e.v);
        }
        uf.components == 1
    }

    /// Degree of every node plus the mean degree 2|E|/|V|.
    pub fn degrees(&self) -> (BTreeMap<String, usize>, f64) {
        let mut map: BTreeMap<String, usize> =
            self.nodes.iter().map(|n| (n.clone(), 0)).collect();
        for e in &self.edges {
            *map.get_mut(&self.nodes[e.u]).unwrap() += 1;
            *map.get_mut(&self.nodes[e.v]).unwrap() += 1;
        }
        let mean = 2.0 * self.edges.len() as f64 / self.nodes.len() as f64;
        (map, mean)
    }

    /// The `k` highest-degree nodes, ties broken lexicographically.
    pub fn hubs(&self, k: usize) -> Vec<String> {
        assert!(k >= 1, "k must be at least 1");
        let (degrees, _) = self.degrees();
        let mut ranked: Vec<(&String, usize)> =
            degrees.iter().map(|(n, &d)| (n, d)).collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        ranked.into_iter().take(k).map(|(n, _)| n.clone()).collect()
    }

    /// All maximal cliques with at least `min_size` members, enumerated
    /// by pivoted recursion, each clique sorted, the list ordered by size
    /// descending then lexicographically.
    pub fn cliques(&self, min_size: usize) -> Vec<Vec<String>> {
        assert!(min_size >= 3, "min_size must be at least 3");
        let n = self.nodes.len();
        let mut adj = vec![HashSet::new(); n];
        for e in &self.edges {
            adj[e.u].insert(e.v);
            adj[e.v].insert(e.u);
        }
        let mut found = Vec::new();
        let mut r = Vec::new();
        let mut p: HashSet<usize> = (0..n).collect();
        let mut x = HashSet::new();
        bron_kerbosch(&adj, &mut r, &mut p, &mut x, &mut found);

        let mut out: Vec<Vec<String>> = found
            .into_iter()
            .filter(|c| c.len() >= min_size)
            .map(|c| {
                let mut names: Vec<String> =
                    c.into_iter().map(|i| self.nodes[i].clone()).collect();
                names.sort();
                names
            })
            .collect();
        out.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        out
    }
}

fn bron_kerbosch(
    adj: &[HashSet<usize>],
    r: &mut Vec<usize>,
    p: &mut HashSet<usize>,
    x: &mut HashSet<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() && x.is_empty() {
        out.push(r.clone());
        return;
    }
    // pivot: the candidate covering the most of P
    let pivot = p
        .iter()
        .chain(x.iter())
        .max_by_key(|&&u| p.intersection(&adj[u]).count())
        .copied()
        .expect("P or X nonempty");
    let todo: Vec<usize> = p.difference(&adj[pivot]).copied().collect();
    for v in todo {
        r.push(v);
        let mut next_p: HashSet<usize> = p.intersection(&adj[v]).copied().collect();
        let mut next_x: HashSet<usize> = x.intersection(&adj[v]).copied().collect();
        bron_kerbosch(adj, r, &mut next_p, &mut next_x, out);
        r.pop();
        p.remove(&v);
        x.insert(v);
    }
}

/// Adapter from a pair matrix to the complete weighted graph: one edge
/// per non-degenerate pair. Errors if no edge remains or the missing
/// pairs alone disconnect the node set.
pub fn build_graph<T>(
    matrix: &PairMatrix<T>,
    weight: impl Fn(&T) -> f64,
) -> Result<WeightedGraph> {
    let edges: Vec<(usize, usize, f64)> = matrix
        .pairs()
        .filter_map(|(i, j, cell)| cell.value().map(|v| (i, j, weight(v))))
        .collect();
    if edges.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let g = WeightedGraph::new(matrix.entities().to_vec(), edges)?;
    if !g.is_connected() {
        return Err(Error::Disconnected(g.components()));
    }
    Ok(g)
}

/// Edges ordered from most preferred to least preferred, ties broken by
/// the lexicographic entity pair so runs are reproducible.
pub fn sort_edges(g: &WeightedGraph, p: Preference) -> Vec<Edge> {
    let mut edges = g.edges().to_vec();
    edges.sort_by(|a, b| {
        let by_weight = if p.prefers_smaller() {
            a.weight.partial_cmp(&b.weight)
        } else {
            b.weight.partial_cmp(&a.weight)
        }
        .expect("finite weights");
        by_weight
            .then_with(|| g.nodes[a.u].cmp(&g.nodes[b.u]))
            .then_with(|| g.nodes[a.v].cmp(&g.nodes[b.v]))
    });
    edges
}

/// Thin the graph to its percolation threshold under a preference.
///
/// Equivalent to the greedy loop (remove the least-preferred remaining
/// edge, verify integrity, restore and stop at the first disconnection)
/// but computed incrementally: connectivity is monotone in the preferred
/// prefix, so the surviving network is the shortest prefix of the sorted
/// edge list that connects every node, and the bridge is the prefix's
/// last edge.
pub fn npt(g: &WeightedGraph, p: Preference) -> Result<ThresholdNetwork> {
    if g.n_nodes() < 2 {
        return Err(Error::Contract("threshold network needs at least 2 nodes".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected(g.components()));
    }
    let sorted = sort_edges(g, p);
    let mut uf = UnionFind::new(g.n_nodes());
    let mut threshold = sorted.len() - 1;
    for (k, e) in sorted.iter().enumerate() {
        uf.union(e.u, e.v);
        if uf.components == 1 {
            threshold = k;
            break;
        }
    }
    let surviving = sorted[..=threshold].to_vec();
    let bridge = sorted[threshold].clone();
    let removed: Vec<Edge> = sorted[threshold + 1..].iter().rev().cloned().collect();
    Ok(ThresholdNetwork {
        graph: WeightedGraph {
            nodes: g.nodes.clone(),
            edges: surviving,
        },
        removed,
        bridge,
        preference: p,
    })
}

/// Minimum spanning tree by Kruskal's method, ties broken by the
/// lexicographic entity pair for determinism.
pub fn mst(g: &WeightedGraph) -> Result<WeightedGraph> {
    if !g.is_connected() {
        return Err(Error::Disconnected(g.components()));
    }
    let mut edges = g.edges().to_vec();
    edges.sort_by(|a, b| {
        a.weight
            .partial_cmp(&b.weight)
            .expect("finite weights")
            .then_with(|| g.nodes[a.u].cmp(&g.nodes[b.u]))
            .then_with(|| g.nodes[a.v].cmp(&g.nodes[b.v]))
    });
    let mut uf = UnionFind::new(g.n_nodes());
    let mut tree = Vec::with_capacity(g.n_nodes().saturating_sub(1));
    for e in edges {
        if uf.union(e.u, e.v) {
            tree.push(e);
            if uf.components == 1 {
                break;
            }
        }
    }
    Ok(WeightedGraph {
        nodes: g.nodes.clone(),
        edges: tree,
    })
}
