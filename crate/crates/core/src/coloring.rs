//! Binary vertex colorings over a growing edge prefix.
//!
//! The state is split in two: [`PrefixGraph`] holds the inserted edges and
//! [`Coloring`] holds colors plus conflict bookkeeping. Islands and
//! offspring clone only the `Coloring` and share one prefix.
//!
//! For every vertex the coloring tracks how many inserted incident edges are
//! monochromatic, so `flip_delta` is O(1) and `apply_flip` is O(deg). The
//! vertices with a nonzero count form an indexed set that supports O(1)
//! uniform sampling.

use std::collections::HashSet;

use rand::Rng;

use crate::error::{Error, Result};

const ABSENT: u32 = u32::MAX;

/// Edges inserted so far, as adjacency lists over all `n` vertices.
#[derive(Clone, Debug, Default)]
pub struct PrefixGraph {
    adjacency: Vec<Vec<u32>>,
    edges: Vec<(usize, usize)>,
    keys: HashSet<(u32, u32)>,
}

impl PrefixGraph {
    pub fn new(n: usize) -> Self {
        PrefixGraph {
            adjacency: vec![Vec::new(); n],
            edges: Vec::new(),
            keys: HashSet::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[v].iter().map(|&w| w as usize)
    }

    fn insert(&mut self, u: usize, v: usize) -> Result<()> {
        let n = self.n();
        if u >= n || v >= n {
            return Err(Error::VertexOutOfRange(u.max(v)));
        }
        if u == v {
            return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
        }
        let key = (u.min(v) as u32, u.max(v) as u32);
        if !self.keys.insert(key) {
            return Err(Error::DuplicateEdge(u, v));
        }
        self.adjacency[u].push(v as u32);
        self.adjacency[v].push(u as u32);
        self.edges.push((u, v));
        Ok(())
    }
}

/// Colors in {0, 1} with incrementally maintained conflicts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    colors: Vec<u8>,
    /// Monochromatic inserted edges incident to each vertex.
    same: Vec<u32>,
    conflicts: usize,
    members: Vec<u32>,
    slot: Vec<u32>,
}

/// Outcome of flipping one vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlipResult {
    pub vertex: usize,
    pub delta: i64,
}

impl Coloring {
    /// Conflict-free coloring with the given colors (no edges yet).
    pub fn from_colors(colors: Vec<u8>) -> Self {
        let n = colors.len();
        Coloring {
            colors: colors.into_iter().map(|c| c & 1).collect(),
            same: vec![0; n],
            conflicts: 0,
            members: Vec::new(),
            slot: vec![ABSENT; n],
        }
    }

    pub fn colors(&self) -> &[u8] {
        &self.colors
    }

    pub fn color(&self, v: usize) -> u8 {
        self.colors[v]
    }

    pub fn conflict_count(&self) -> usize {
        self.conflicts
    }

    pub fn is_proper(&self) -> bool {
        self.conflicts == 0
    }

    /// Vertices incident to at least one conflicting edge, in unspecified order.
    pub fn conflicting_vertices(&self) -> &[u32] {
        &self.members
    }

    /// Conflicting inserted edges incident to `v`.
    pub fn conflict_degree(&self, v: usize) -> usize {
        self.same[v] as usize
    }

    pub fn random_conflicting<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<usize> {
        if self.members.is_empty() {
            None
        } else {
            Some(self.members[crate::rng::index(rng, self.members.len())] as usize)
        }
    }

    fn refresh(&mut self, v: usize) {
        let present = self.slot[v] != ABSENT;
        if self.same[v] > 0 && !present {
            self.slot[v] = self.members.len() as u32;
            self.members.push(v as u32);
        } else if self.same[v] == 0 && present {
            let at = self.slot[v] as usize;
            self.members.swap_remove(at);
            if let Some(&moved) = self.members.get(at) {
                self.slot[moved as usize] = at as u32;
            }
            self.slot[v] = ABSENT;
        }
    }

    /// Bookkeeping for a freshly inserted edge; returns the conflict delta.
    fn on_insert(&mut self, u: usize, v: usize) -> i64 {
        if self.colors[u] != self.colors[v] {
            return 0;
        }
        self.conflicts += 1;
        self.same[u] += 1;
        self.same[v] += 1;
        self.refresh(u);
        self.refresh(v);
        1
    }

    /// Change in conflicts if `v` were flipped.
    #[inline]
    pub fn flip_delta(&self, prefix: &PrefixGraph, v: usize) -> i64 {
        prefix.degree(v) as i64 - 2 * self.same[v] as i64
    }

    pub fn apply_flip(&mut self, prefix: &PrefixGraph, v: usize) -> FlipResult {
        let delta = self.flip_delta(prefix, v);
        let new = self.colors[v] ^ 1;
        self.colors[v] = new;
        self.same[v] = prefix.degree(v) as u32 - self.same[v];
        for w in prefix.neighbors(v) {
            if self.colors[w] == new {
                self.same[w] += 1;
            } else {
                self.same[w] -= 1;
            }
            self.refresh(w);
        }
        self.refresh(v);
        self.conflicts = (self.conflicts as i64 + delta) as usize;
        FlipResult { vertex: v, delta }
    }

    pub fn to_bit_string(&self) -> String {
        self.colors.iter().map(|&c| if c == 1 { '1' } else { '0' }).collect()
    }
}

/// A coloring together with the edge prefix it is evaluated on.
#[derive(Clone, Debug)]
pub struct ColoringState {
    prefix: PrefixGraph,
    coloring: Coloring,
    evaluations: u64,
}

impl ColoringState {
    /// Uniformly random colors on `n` isolated vertices.
    pub fn init_random_coloring<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameters("coloring needs n >= 1".into()));
        }
        let colors = (0..n).map(|_| rng.gen_range(0..=1u8)).collect();
        Ok(Self::from_colors(colors))
    }

    pub fn from_colors(colors: Vec<u8>) -> Self {
        ColoringState {
            prefix: PrefixGraph::new(colors.len()),
            coloring: Coloring::from_colors(colors),
            evaluations: 0,
        }
    }

    /// Parses a `0`/`1` string, one character per vertex.
    pub fn from_bit_string(bits: &str) -> Result<Self> {
        let colors = bits
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Parse(format!("invalid color character {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        if colors.is_empty() {
            return Err(Error::Parse("empty coloring".into()));
        }
        Ok(Self::from_colors(colors))
    }

    pub fn to_bit_string(&self) -> String {
        self.coloring.to_bit_string()
    }

    pub fn n(&self) -> usize {
        self.prefix.n()
    }

    pub fn prefix(&self) -> &PrefixGraph {
        &self.prefix
    }

    pub fn coloring(&self) -> &Coloring {
        &self.coloring
    }

    /// Replaces the coloring, e.g. with the result of an island run.
    pub fn set_coloring(&mut self, coloring: Coloring) {
        assert_eq!(coloring.colors.len(), self.n(), "coloring size mismatch");
        self.coloring = coloring;
    }

    /// Split borrow for optimizers that mutate the coloring in place.
    pub fn parts_mut(&mut self) -> (&PrefixGraph, &mut Coloring) {
        (&self.prefix, &mut self.coloring)
    }

    pub fn colors(&self) -> &[u8] {
        self.coloring.colors()
    }

    pub fn active_edge_count(&self) -> usize {
        self.prefix.edge_count()
    }

    pub fn conflict_count(&self) -> usize {
        self.coloring.conflict_count()
    }

    pub fn conflicting_vertices(&self) -> &[u32] {
        self.coloring.conflicting_vertices()
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn add_evaluations(&mut self, count: u64) {
        self.evaluations += count;
    }

    /// Inserts `{u, v}` and returns the change in conflicts (0 or 1).
    pub fn insert_edge(&mut self, u: usize, v: usize) -> Result<i64> {
        self.prefix.insert(u, v)?;
        Ok(self.coloring.on_insert(u, v))
    }

    pub fn flip_delta(&self, v: usize) -> i64 {
        self.coloring.flip_delta(&self.prefix, v)
    }

    pub fn apply_flip(&mut self, v: usize) -> FlipResult {
        self.coloring.apply_flip(&self.prefix, v)
    }

    pub fn is_proper(&self) -> bool {
        self.coloring.is_proper()
    }
}
