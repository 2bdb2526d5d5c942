//! Edge insertion orders.
//!
//! An order is a permutation of edge indices. Traversal orders (BFS, DFS,
//! generic) never let an inserted edge join two components of the
//! edge-induced prefix subgraph; the worst-case and uniformly random orders
//! carry no such guarantee.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphFamily};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderKind {
    Bfs,
    Dfs,
    GenericTraversal,
    WorstCase,
    UniformRandom,
}

impl OrderKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            OrderKind::Bfs => "bfs",
            OrderKind::Dfs => "dfs",
            OrderKind::GenericTraversal => "generic",
            OrderKind::WorstCase => "worst-case",
            OrderKind::UniformRandom => "random",
        }
    }

    pub fn is_traversal(&self) -> bool {
        matches!(self, OrderKind::Bfs | OrderKind::Dfs | OrderKind::GenericTraversal)
    }
}

impl fmt::Display for OrderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OrderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "bfs" => OrderKind::Bfs,
            "dfs" => OrderKind::Dfs,
            "generic" => OrderKind::GenericTraversal,
            "worst-case" => OrderKind::WorstCase,
            "random" => OrderKind::UniformRandom,
            other => return Err(Error::Parse(format!("unknown order kind {other:?}"))),
        })
    }
}

/// Neighbor selection policy for [`dfs_order`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DfsMode {
    /// Scan incident edges in random order, emitting each when met and
    /// descending whenever the far endpoint is new.
    #[default]
    Scan,
    /// Always descend to an unvisited neighbor when one exists; non-tree
    /// edges are emitted when the vertex has no unvisited neighbor left.
    DepthGreedy,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeOrder {
    pub permutation: Vec<usize>,
    pub kind: OrderKind,
    pub start_vertex: Option<usize>,
    pub seed: Option<u64>,
}

impl EdgeOrder {
    pub fn len(&self) -> usize {
        self.permutation.len()
    }

    pub fn is_empty(&self) -> bool {
        self.permutation.is_empty()
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Checks that the permutation is a bijection on `0..g.m()`.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.permutation.len() != g.m() {
            return Err(Error::InvalidOrder(format!(
                "order has {} entries, graph has {} edges",
                self.permutation.len(),
                g.m()
            )));
        }
        let mut seen = vec![false; g.m()];
        for &e in &self.permutation {
            if e >= g.m() || std::mem::replace(&mut seen[e], true) {
                return Err(Error::InvalidOrder(format!("edge index {e} invalid or repeated")));
            }
        }
        Ok(())
    }

    /// Text form: `kind seed start e0 e1 ...`, with `-` for an absent seed
    /// or start vertex.
    pub fn to_line(&self) -> String {
        let opt = |o: Option<String>| o.unwrap_or_else(|| "-".into());
        let mut parts = vec![
            self.kind.to_string(),
            opt(self.seed.map(|s| s.to_string())),
            opt(self.start_vertex.map(|s| s.to_string())),
        ];
        parts.extend(self.permutation.iter().map(|e| e.to_string()));
        parts.join(" ")
    }

    pub fn parse_line(line: &str) -> Result<Self> {
        let mut tok = line.split_whitespace();
        let mut next = |what: &str| {
            tok.next()
                .ok_or_else(|| Error::Parse(format!("edge order line missing {what}")))
        };
        let kind: OrderKind = next("kind")?.parse()?;
        let opt = |s: &str| -> Result<Option<u64>> {
            if s == "-" {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|e| Error::Parse(format!("{s:?}: {e}")))
            }
        };
        let seed = opt(next("seed")?)?;
        let start_vertex = opt(next("start")?)?.map(|v| v as usize);
        let permutation = tok
            .map(|t| t.parse().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
            .collect::<Result<Vec<usize>>>()?;
        Ok(EdgeOrder {
            permutation,
            kind,
            start_vertex,
            seed,
        })
    }
}

fn pick_start<R: Rng + ?Sized>(g: &Graph, start: Option<usize>, rng: &mut R) -> Result<usize> {
    match start {
        Some(s) if s < g.n() => Ok(s),
        Some(s) => Err(Error::VertexOutOfRange(s)),
        None if g.n() == 0 => Err(Error::InvalidGraph("empty graph".into())),
        None => Ok(rng.gen_range(0..g.n())),
    }
}

fn require_connected(g: &Graph) -> Result<()> {
    if g.is_connected() {
        Ok(())
    } else {
        Err(Error::Disconnected)
    }
}

/// Breadth-first order: when a vertex is dequeued, all of its not yet
/// emitted incident edges are emitted consecutively in random order.
/// `start = None` picks a uniformly random start vertex.
pub fn bfs_order<R: Rng + ?Sized>(g: &Graph, start: Option<usize>, rng: &mut R) -> Result<EdgeOrder> {
    require_connected(g)?;
    let s = pick_start(g, start, rng)?;
    let mut emitted = vec![false; g.m()];
    let mut visited = vec![false; g.n()];
    let mut permutation = Vec::with_capacity(g.m());
    let mut queue = VecDeque::from([s]);
    visited[s] = true;
    let mut scan = Vec::new();
    while let Some(u) = queue.pop_front() {
        scan.clear();
        scan.extend_from_slice(g.incident(u));
        scan.shuffle(rng);
        for &(w, e) in &scan {
            if emitted[e] {
                continue;
            }
            emitted[e] = true;
            permutation.push(e);
            if !visited[w] {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    Ok(EdgeOrder {
        permutation,
        kind: OrderKind::Bfs,
        start_vertex: Some(s),
        seed: None,
    })
}

/// Depth-first order. Tree edges are emitted on descent; in
/// [`DfsMode::Scan`] a non-tree edge is emitted when the scan first meets it.
pub fn dfs_order<R: Rng + ?Sized>(
    g: &Graph,
    start: Option<usize>,
    mode: DfsMode,
    rng: &mut R,
) -> Result<EdgeOrder> {
    require_connected(g)?;
    let s = pick_start(g, start, rng)?;
    let mut emitted = vec![false; g.m()];
    let mut visited = vec![false; g.n()];
    let mut permutation = Vec::with_capacity(g.m());
    // per-vertex shuffled incidence list and scan cursor
    let mut scan: Vec<Vec<(usize, usize)>> = vec![Vec::new(); g.n()];
    let mut cursor = vec![0usize; g.n()];
    let enter = |v: usize, scan: &mut Vec<Vec<(usize, usize)>>, rng: &mut R| {
        let mut list = g.incident(v).to_vec();
        list.shuffle(rng);
        scan[v] = list;
    };
    visited[s] = true;
    enter(s, &mut scan, rng);
    let mut stack = vec![s];
    while let Some(&u) = stack.last() {
        match mode {
            DfsMode::Scan => {
                if cursor[u] == scan[u].len() {
                    stack.pop();
                    continue;
                }
                let (w, e) = scan[u][cursor[u]];
                cursor[u] += 1;
                if emitted[e] {
                    continue;
                }
                emitted[e] = true;
                permutation.push(e);
                if !visited[w] {
                    visited[w] = true;
                    enter(w, &mut scan, rng);
                    stack.push(w);
                }
            }
            DfsMode::DepthGreedy => {
                let descend = scan[u]
                    .iter()
                    .find(|&&(w, e)| !visited[w] && !emitted[e])
                    .copied();
                if let Some((w, e)) = descend {
                    emitted[e] = true;
                    permutation.push(e);
                    visited[w] = true;
                    enter(w, &mut scan, rng);
                    stack.push(w);
                } else {
                    for &(_, e) in &scan[u] {
                        if !emitted[e] {
                            emitted[e] = true;
                            permutation.push(e);
                        }
                    }
                    stack.pop();
                }
            }
        }
    }
    Ok(EdgeOrder {
        permutation,
        kind: OrderKind::Dfs,
        start_vertex: Some(s),
        seed: None,
    })
}

/// Random connectivity-preserving order: the first edge is uniform over all
/// edges, afterwards each step picks uniformly among the unemitted edges
/// touching the component built so far.
pub fn generic_traversal_order<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> Result<EdgeOrder> {
    require_connected(g)?;
    let mut permutation = Vec::with_capacity(g.m());
    if g.m() == 0 {
        return Ok(EdgeOrder {
            permutation,
            kind: OrderKind::GenericTraversal,
            start_vertex: None,
            seed: None,
        });
    }
    let mut in_component = vec![false; g.n()];
    // indexed candidate set: `pos[e]` is the slot of edge `e` in `frontier`
    let mut frontier: Vec<usize> = Vec::new();
    let mut pos = vec![usize::MAX; g.m()];
    let mut emitted = vec![false; g.m()];

    let absorb = |v: usize,
                      in_component: &mut Vec<bool>,
                      frontier: &mut Vec<usize>,
                      pos: &mut Vec<usize>,
                      emitted: &Vec<bool>| {
        if std::mem::replace(&mut in_component[v], true) {
            return;
        }
        for &(_, e) in g.incident(v) {
            if !emitted[e] && pos[e] == usize::MAX {
                pos[e] = frontier.len();
                frontier.push(e);
            }
        }
    };

    let mut next = rng.gen_range(0..g.m());
    loop {
        emitted[next] = true;
        if pos[next] != usize::MAX {
            let slot = pos[next];
            frontier.swap_remove(slot);
            if let Some(&moved) = frontier.get(slot) {
                pos[moved] = slot;
            }
            pos[next] = usize::MAX;
        }
        permutation.push(next);
        let (u, v) = g.edge(next);
        absorb(u, &mut in_component, &mut frontier, &mut pos, &emitted);
        absorb(v, &mut in_component, &mut frontier, &mut pos, &emitted);
        if frontier.is_empty() {
            break;
        }
        next = frontier[rng.gen_range(0..frontier.len())];
    }
    Ok(EdgeOrder {
        permutation,
        kind: OrderKind::GenericTraversal,
        start_vertex: None,
        seed: None,
    })
}

/// For the worst-case tree: every child-to-leaf edge, then every root edge.
pub fn worst_case_order(t: &Graph) -> Result<EdgeOrder> {
    let Some(GraphFamily::WorstCaseTree { n }) = t.family() else {
        return Err(Error::InvalidOrder(
            "worst-case order is only defined for the worst-case tree".into(),
        ));
    };
    let c = (n - 1) / 3;
    let permutation = (c..t.m()).chain(0..c).collect();
    Ok(EdgeOrder {
        permutation,
        kind: OrderKind::WorstCase,
        start_vertex: None,
        seed: None,
    })
}

/// Uniformly random permutation of all edges.
pub fn random_order<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> EdgeOrder {
    let mut permutation: Vec<usize> = (0..g.m()).collect();
    permutation.shuffle(rng);
    EdgeOrder {
        permutation,
        kind: OrderKind::UniformRandom,
        start_vertex: None,
        seed: None,
    }
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.parent[ra] = rb;
    }
}

/// True iff no inserted edge joins two distinct components of the
/// edge-induced prefix subgraph. An edge between two previously unseen
/// vertices opens a new component and is allowed. Invalid permutations
/// yield `false`.
pub fn is_traversal_order(g: &Graph, order: &EdgeOrder) -> bool {
    if order.validate(g).is_err() {
        return false;
    }
    let mut seen = vec![false; g.n()];
    let mut sets = DisjointSets::new(g.n());
    for &e in &order.permutation {
        let (u, v) = g.edge(e);
        if seen[u] && seen[v] && sets.find(u) != sets.find(v) {
            return false;
        }
        seen[u] = true;
        seen[v] = true;
        sets.union(u, v);
    }
    true
}
