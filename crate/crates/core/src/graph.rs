//! Static undirected graphs, the bipartite generator families, and the
//! metrics (diameter, longest simple path) that the runtime bounds are
//! stated in.
//!
//! Vertex numbering per family is canonical:
//!
//! * `Path`: vertices in path order, edge `i` joins `i` and `i + 1`.
//! * `Star` / `DepthKStar`: center is `0`; arm `a` of a depth-k star holds
//!   vertices `1 + a*k ..= (a + 1)*k`, ordered outwards.
//! * `CompleteBipartite`: left side `0..n1`, right side `n1..n1 + n2`.
//! * `Toroid`: row-major, `v = row * side + col`.
//! * `Hypercube`: vertex id is its binary label.
//! * `CompleteKAryTree`: heap order, children of `v` are `k*v + 1 ..= k*v + k`.
//! * `WorstCaseTree`: root `0`, children `1..=c`, child `i` has leaves
//!   `c + 2i - 1` and `c + 2i` where `c = (n - 1) / 3`. The `c` root edges
//!   come first in the edge list, then the child-to-leaf edges.

use std::collections::{HashSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exhaustive longest-path search is restricted to graphs up to this size.
pub const BRUTE_FORCE_LIMIT: usize = 20;

/// A generator family together with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum GraphFamily {
    Path { n: usize },
    Star { n: usize },
    /// Center with `(n - 1) / k` arms, each a path of `k` edges.
    DepthKStar { n: usize, k: usize },
    CompleteBipartite { n1: usize, n2: usize },
    /// `side x side` grid with wrap-around; `side` must be even and ≥ 4.
    Toroid { side: usize },
    Hypercube { dim: usize },
    CompleteKAryTree { branching: usize, depth: usize },
    /// Root with `(n - 1) / 3` children, each of which has two leaves.
    WorstCaseTree { n: usize },
}

impl GraphFamily {
    pub fn name(&self) -> &'static str {
        match self {
            GraphFamily::Path { .. } => "path",
            GraphFamily::Star { .. } => "star",
            GraphFamily::DepthKStar { .. } => "depth-k-star",
            GraphFamily::CompleteBipartite { .. } => "complete-bipartite",
            GraphFamily::Toroid { .. } => "toroid",
            GraphFamily::Hypercube { .. } => "hypercube",
            GraphFamily::CompleteKAryTree { .. } => "complete-k-ary-tree",
            GraphFamily::WorstCaseTree { .. } => "worst-case-tree",
        }
    }

    /// Parses the compact form `name:p1[:p2]`, e.g. `depth-k-star:19:3`.
    pub fn parse_spec(spec: &str) -> Result<Self> {
        let mut parts = spec.trim().split(':');
        let name = parts.next().unwrap_or_default();
        let params = parts
            .map(|t| t.parse::<usize>().map_err(|e| Error::Parse(format!("{spec:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let family = match (name, params.as_slice()) {
            ("path", &[n]) => GraphFamily::Path { n },
            ("star", &[n]) => GraphFamily::Star { n },
            ("depth-k-star", &[n, k]) => GraphFamily::DepthKStar { n, k },
            ("complete-bipartite", &[n1, n2]) => GraphFamily::CompleteBipartite { n1, n2 },
            ("toroid", &[side]) => GraphFamily::Toroid { side },
            ("hypercube", &[dim]) => GraphFamily::Hypercube { dim },
            ("complete-k-ary-tree", &[branching, depth]) => GraphFamily::CompleteKAryTree { branching, depth },
            ("worst-case-tree", &[n]) => GraphFamily::WorstCaseTree { n },
            _ => return Err(Error::Parse(format!("unrecognized family spec {spec:?}"))),
        };
        family.validate()?;
        Ok(family)
    }

    pub fn to_spec(&self) -> String {
        let params = match *self {
            GraphFamily::Path { n } | GraphFamily::Star { n } | GraphFamily::WorstCaseTree { n } => vec![n],
            GraphFamily::DepthKStar { n, k } => vec![n, k],
            GraphFamily::CompleteBipartite { n1, n2 } => vec![n1, n2],
            GraphFamily::Toroid { side } => vec![side],
            GraphFamily::Hypercube { dim } => vec![dim],
            GraphFamily::CompleteKAryTree { branching, depth } => vec![branching, depth],
        };
        let mut out = self.name().to_string();
        for p in params {
            out.push(':');
            out.push_str(&p.to_string());
        }
        out
    }

    /// Checks the family invariants.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameters(msg));
        match *self {
            GraphFamily::Path { n } if n < 2 => bad(format!("path needs n >= 2, got {n}")),
            GraphFamily::Star { n } if n < 2 => bad(format!("star needs n >= 2, got {n}")),
            GraphFamily::DepthKStar { n, k } => {
                if n < 4 || k == 0 || (n - 1) % k != 0 {
                    return bad(format!("depth-k star needs (n-1)/k integral, got n={n}, k={k}"));
                }
                if k > (n - 1) / 3 {
                    return bad(format!("depth-k star needs k <= (n-1)/3, got n={n}, k={k}"));
                }
                Ok(())
            }
            GraphFamily::CompleteBipartite { n1, n2 } if n1 == 0 || n2 == 0 => {
                bad(format!("complete bipartite needs both sides nonempty, got {n1}x{n2}"))
            }
            GraphFamily::Toroid { side } if side < 4 || side % 2 != 0 => {
                bad(format!("toroid side must be even and >= 4, got {side}"))
            }
            GraphFamily::Hypercube { dim } if dim == 0 || dim > 24 => {
                bad(format!("hypercube dimension must be in 1..=24, got {dim}"))
            }
            GraphFamily::CompleteKAryTree { branching, depth } => {
                if branching < 2 || depth == 0 {
                    return bad(format!(
                        "k-ary tree needs branching >= 2 and depth >= 1, got k={branching}, depth={depth}"
                    ));
                }
                if (branching as f64).powi(depth as i32 + 1) > 1e8 {
                    return bad("k-ary tree too large".into());
                }
                Ok(())
            }
            GraphFamily::WorstCaseTree { n } if n < 4 || n % 3 != 1 => {
                bad(format!("worst-case tree needs n = 1 mod 3 and n >= 4, got {n}"))
            }
            _ => Ok(()),
        }
    }

    /// Closed-form vertex count.
    pub fn vertex_count(&self) -> usize {
        match *self {
            GraphFamily::Path { n }
            | GraphFamily::Star { n }
            | GraphFamily::DepthKStar { n, .. }
            | GraphFamily::WorstCaseTree { n } => n,
            GraphFamily::CompleteBipartite { n1, n2 } => n1 + n2,
            GraphFamily::Toroid { side } => side * side,
            GraphFamily::Hypercube { dim } => 1 << dim,
            GraphFamily::CompleteKAryTree { branching, depth } => {
                (branching.pow(depth as u32 + 1) - 1) / (branching - 1)
            }
        }
    }

    /// Closed-form edge count.
    pub fn edge_count(&self) -> usize {
        match *self {
            GraphFamily::CompleteBipartite { n1, n2 } => n1 * n2,
            GraphFamily::Toroid { side } => 2 * side * side,
            GraphFamily::Hypercube { dim } => dim << (dim - 1),
            _ => self.vertex_count() - 1,
        }
    }

    /// Analytic longest simple path length in edges.
    pub fn longest_path(&self) -> usize {
        match *self {
            GraphFamily::Path { n } => n - 1,
            GraphFamily::Star { n } => (n - 1).min(2),
            GraphFamily::DepthKStar { k, .. } => 2 * k,
            GraphFamily::CompleteBipartite { n1, n2 } => {
                if n1 == n2 {
                    2 * n1 - 1
                } else {
                    2 * n1.min(n2)
                }
            }
            GraphFamily::Toroid { .. } | GraphFamily::Hypercube { .. } => self.vertex_count() - 1,
            GraphFamily::CompleteKAryTree { depth, .. } => 2 * depth,
            GraphFamily::WorstCaseTree { n } => {
                if n == 4 {
                    2
                } else {
                    4
                }
            }
        }
    }
}

/// Which method [`Graph::longest_path`] uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathMode {
    Analytic,
    BruteForce,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphMetrics {
    pub diameter: usize,
    pub longest_path: usize,
    pub longest_path_source: PathMode,
}

/// Immutable undirected simple graph.
///
/// Edges are stored with `u < v`; `adjacency[v]` lists `(neighbor, edge index)`.
#[derive(Clone, Debug)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<(usize, usize)>>,
    family: Option<GraphFamily>,
}

impl Graph {
    /// Builds a graph from an edge list, rejecting self-loops, duplicate
    /// edges and out-of-range endpoints.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut list = Vec::new();
        let mut adjacency = vec![Vec::new(); n];
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::VertexOutOfRange(a.max(b)));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {a}")));
            }
            let (u, v) = (a.min(b), a.max(b));
            if !seen.insert((u, v)) {
                return Err(Error::InvalidGraph(format!("duplicate edge {{{u}, {v}}}")));
            }
            let idx = list.len();
            list.push((u, v));
            adjacency[u].push((v, idx));
            adjacency[v].push((u, idx));
        }
        Ok(Graph {
            n,
            edges: list,
            adjacency,
            family: None,
        })
    }

    /// Generates a member of `family` with canonical numbering.
    pub fn generate(family: GraphFamily) -> Result<Self> {
        family.validate()?;
        let n = family.vertex_count();
        let mut edges = Vec::with_capacity(family.edge_count());
        match family {
            GraphFamily::Path { n } => edges.extend((0..n - 1).map(|i| (i, i + 1))),
            GraphFamily::Star { n } => edges.extend((1..n).map(|i| (0, i))),
            GraphFamily::DepthKStar { n, k } => {
                for arm in 0..(n - 1) / k {
                    let first = 1 + arm * k;
                    edges.push((0, first));
                    edges.extend((first..first + k - 1).map(|v| (v, v + 1)));
                }
            }
            GraphFamily::CompleteBipartite { n1, n2 } => {
                for u in 0..n1 {
                    edges.extend((n1..n1 + n2).map(|v| (u, v)));
                }
            }
            GraphFamily::Toroid { side } => {
                for r in 0..side {
                    for c in 0..side {
                        let v = r * side + c;
                        edges.push((v, r * side + (c + 1) % side));
                        edges.push((v, ((r + 1) % side) * side + c));
                    }
                }
            }
            GraphFamily::Hypercube { dim } => {
                for v in 0..n {
                    for bit in 0..dim {
                        let w = v ^ (1 << bit);
                        if v < w {
                            edges.push((v, w));
                        }
                    }
                }
            }
            GraphFamily::CompleteKAryTree { branching, .. } => {
                edges.extend((1..n).map(|v| ((v - 1) / branching, v)));
            }
            GraphFamily::WorstCaseTree { n } => {
                let c = (n - 1) / 3;
                edges.extend((1..=c).map(|i| (0, i)));
                for i in 1..=c {
                    edges.push((i, c + 2 * i - 1));
                    edges.push((i, c + 2 * i));
                }
            }
        }
        let mut g = Graph::from_edges(n, edges)?;
        g.family = Some(family);
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, idx: usize) -> (usize, usize) {
        self.edges[idx]
    }

    /// `(neighbor, edge index)` pairs incident to `v`.
    pub fn incident(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[v].iter().map(|&(w, _)| w)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn family(&self) -> Option<GraphFamily> {
        self.family
    }

    /// BFS distances from `source`; `usize::MAX` marks unreachable vertices.
    pub fn bfs_distances(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for w in self.neighbors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.bfs_distances(0).iter().all(|&d| d != usize::MAX)
    }

    /// A 2-partition (side per vertex) with no intra-side edge, if one exists.
    pub fn is_bipartite(&self) -> Option<Vec<u8>> {
        let mut side = vec![u8::MAX; self.n];
        let mut queue = VecDeque::new();
        for root in 0..self.n {
            if side[root] != u8::MAX {
                continue;
            }
            side[root] = 0;
            queue.push_back(root);
            while let Some(u) = queue.pop_front() {
                for w in self.neighbors(u) {
                    if side[w] == u8::MAX {
                        side[w] = 1 - side[u];
                        queue.push_back(w);
                    } else if side[w] == side[u] {
                        return None;
                    }
                }
            }
        }
        Some(side)
    }

    /// Exact diameter by BFS from every vertex.
    pub fn diameter(&self) -> Result<usize> {
        let mut diam = 0;
        for s in 0..self.n {
            for d in self.bfs_distances(s) {
                if d == usize::MAX {
                    return Err(Error::Disconnected);
                }
                diam = diam.max(d);
            }
        }
        Ok(diam)
    }

    /// Number of edges on a longest simple path.
    pub fn longest_path(&self, mode: PathMode) -> Result<usize> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        match mode {
            PathMode::Analytic => self
                .family
                .map(|f| f.longest_path())
                .ok_or(Error::UnknownFamily),
            PathMode::BruteForce => self.longest_path_exhaustive(),
        }
    }

    /// Enumerates every (vertex set, end vertex) pair reachable by a simple
    /// path. `ends[mask]` holds the possible end vertices of a simple path
    /// whose vertex set is `mask`.
    fn longest_path_exhaustive(&self) -> Result<usize> {
        if self.n > BRUTE_FORCE_LIMIT {
            return Err(Error::TooLarge {
                n: self.n,
                limit: BRUTE_FORCE_LIMIT,
            });
        }
        if self.n <= 1 {
            return Ok(0);
        }
        let nbr: Vec<u32> = (0..self.n)
            .map(|v| self.neighbors(v).fold(0u32, |acc, w| acc | (1 << w)))
            .collect();
        let mut ends = vec![0u32; 1 << self.n];
        for v in 0..self.n {
            ends[1 << v] = 1 << v;
        }
        let mut best = 0;
        for mask in 1..ends.len() {
            let mut e = ends[mask];
            if e == 0 {
                continue;
            }
            best = best.max(mask.count_ones() as usize - 1);
            while e != 0 {
                let v = e.trailing_zeros() as usize;
                e &= e - 1;
                let mut ext = nbr[v] & !(mask as u32);
                while ext != 0 {
                    let w = ext.trailing_zeros();
                    ext &= ext - 1;
                    ends[mask | (1 << w)] |= 1 << w;
                }
            }
        }
        Ok(best)
    }

    /// Diameter plus longest path, using the analytic formula when the
    /// family is known and exhaustive search otherwise.
    pub fn metrics(&self) -> Result<GraphMetrics> {
        let diameter = self.diameter()?;
        let (longest_path, longest_path_source) = match self.family {
            Some(f) => (f.longest_path(), PathMode::Analytic),
            None => (self.longest_path_exhaustive()?, PathMode::BruteForce),
        };
        Ok(GraphMetrics {
            diameter,
            longest_path,
            longest_path_source,
        })
    }

    /// Edge-list text: `"n m"` then one `"u v"` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n, self.m());
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty edge list".into()))?;
        let (n, m) = parse_pair(header)?;
        let edges = lines.map(parse_pair).collect::<Result<Vec<_>>>()?;
        if edges.len() != m {
            return Err(Error::Parse(format!(
                "header declares {m} edges, found {}",
                edges.len()
            )));
        }
        Graph::from_edges(n, edges)
    }
}

fn parse_pair(line: &str) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace().map(|t| {
        t.parse::<usize>()
            .map_err(|e| Error::Parse(format!("{line:?}: {e}")))
    });
    match (it.next(), it.next(), it.next()) {
        (Some(a), Some(b), None) => Ok((a?, b?)),
        _ => Err(Error::Parse(format!("expected two integers, got {line:?}"))),
    }
}
