//! Loopless connected undirected multigraphs with stable vertex and edge
//! identifiers.
//!
//! Vertices are named by strings and keep their first-appearance order;
//! edges keep declaration order and may be parallel. All tie-breaking in the
//! rest of the crate is by lexicographic vertex name, then edge index.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::divisor::Divisor;
use crate::error::{Error, Result};

/// Dense vertex index, assigned in first-appearance order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub usize);

/// Dense edge index, assigned in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub usize);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// A finite loopless connected undirected multigraph.
#[derive(Debug, Clone)]
pub struct Multigraph {
    names: Vec<String>,
    by_name: BTreeMap<String, VertexId>,
    edges: Vec<(VertexId, VertexId)>,
    /// Per vertex: incident edges with the opposite endpoint, in edge order.
    incidence: Vec<Vec<(EdgeId, VertexId)>>,
    /// Vertex ids sorted by name.
    lex: Vec<VertexId>,
    /// Rank of each vertex in the lexicographic order.
    lex_rank: Vec<usize>,
    fingerprint: u64,
}

pub(crate) fn fnv1a(bytes: &[u8], mut state: u64) -> u64 {
    for &b in bytes {
        state ^= b as u64;
        state = state.wrapping_mul(0x100000001b3);
    }
    state
}

pub(crate) const FNV_OFFSET: u64 = 0xcbf29ce484222325;

impl Multigraph {
    /// Build a multigraph from named vertices and index pairs.
    ///
    /// Rejects loops and disconnected inputs; a single vertex with no edges
    /// is allowed (it is trivially connected).
    pub fn new(names: Vec<String>, edge_pairs: Vec<(usize, usize)>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut by_name = BTreeMap::new();
        for (i, name) in names.iter().enumerate() {
            if by_name.insert(name.clone(), VertexId(i)).is_some() {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("duplicate vertex name `{name}`"),
                });
            }
        }
        let mut edges = Vec::with_capacity(edge_pairs.len());
        let mut incidence = vec![Vec::new(); names.len()];
        for (k, (a, b)) in edge_pairs.into_iter().enumerate() {
            if a >= names.len() || b >= names.len() {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("edge {k} references a missing vertex"),
                });
            }
            if a == b {
                return Err(Error::LoopEdge(names[a].clone()));
            }
            let e = EdgeId(k);
            edges.push((VertexId(a), VertexId(b)));
            incidence[a].push((e, VertexId(b)));
            incidence[b].push((e, VertexId(a)));
        }

        // Connectivity from vertex 0, ignoring orientation.
        let mut seen = vec![false; names.len()];
        let mut stack = vec![VertexId(0)];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(_, u) in &incidence[v.0] {
                if !seen[u.0] {
                    seen[u.0] = true;
                    stack.push(u);
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::Disconnected {
                vertex: names[i].clone(),
                root: names[0].clone(),
            });
        }

        let mut lex: Vec<VertexId> = (0..names.len()).map(VertexId).collect();
        lex.sort_by(|a, b| names[a.0].cmp(&names[b.0]));
        let mut lex_rank = vec![0usize; names.len()];
        for (rank, v) in lex.iter().enumerate() {
            lex_rank[v.0] = rank;
        }

        let mut fp = FNV_OFFSET;
        for name in &names {
            fp = fnv1a(name.as_bytes(), fp);
            fp = fnv1a(&[0xff], fp);
        }
        for &(a, b) in &edges {
            fp = fnv1a(&(a.0 as u64).to_le_bytes(), fp);
            fp = fnv1a(&(b.0 as u64).to_le_bytes(), fp);
        }

        Ok(Multigraph {
            names,
            by_name,
            edges,
            incidence,
            lex,
            lex_rank,
            fingerprint: fp,
        })
    }

    /// Convenience constructor from endpoint-name pairs, first-appearance
    /// vertex order.
    pub fn from_pairs(pairs: &[(&str, &str)]) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        let mut index: BTreeMap<&str, usize> = BTreeMap::new();
        let mut edges = Vec::new();
        for &(a, b) in pairs {
            let ia = *index.entry(a).or_insert_with(|| {
                names.push(a.to_string());
                names.len() - 1
            });
            let ib = *index.entry(b).or_insert_with(|| {
                names.push(b.to_string());
                names.len() - 1
            });
            edges.push((ia, ib));
        }
        Multigraph::new(names, edges)
    }

    /// Parse the edge-list format: one `u v` pair per line, `#` starts a
    /// comment line, blank lines are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != 2 {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("expected `u v`, got `{line}`"),
                });
            }
            if tokens[0] == tokens[1] {
                return Err(Error::LoopEdge(tokens[0].to_string()));
            }
            let mut id_of = |name: &str| -> usize {
                if let Some(&i) = index.get(name) {
                    i
                } else {
                    names.push(name.to_string());
                    index.insert(name.to_string(), names.len() - 1);
                    names.len() - 1
                }
            };
            let a = id_of(tokens[0]);
            let b = id_of(tokens[1]);
            edges.push((a, b));
        }
        if names.is_empty() {
            return Err(Error::EmptyGraph);
        }
        Multigraph::new(names, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.names.len()).map(VertexId)
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v.0]
    }

    /// Resolve a vertex by name.
    pub fn vertex(&self, name: &str) -> Result<VertexId> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e.0]
    }

    /// The endpoint of `e` other than `v`.
    pub fn opposite(&self, e: EdgeId, v: VertexId) -> VertexId {
        let (a, b) = self.edges[e.0];
        if a == v {
            b
        } else {
            debug_assert_eq!(b, v);
            a
        }
    }

    pub fn is_endpoint(&self, e: EdgeId, v: VertexId) -> bool {
        let (a, b) = self.edges[e.0];
        a == v || b == v
    }

    /// Incident edges of `v` with their opposite endpoints, in edge order.
    pub fn incident(&self, v: VertexId) -> &[(EdgeId, VertexId)] {
        &self.incidence[v.0]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.incidence[v.0].len()
    }

    /// Vertices sorted by name.
    pub fn lex_vertices(&self) -> &[VertexId] {
        &self.lex
    }

    /// The lexicographically least vertex, the crate-wide base point.
    pub fn lex_least(&self) -> VertexId {
        self.lex[0]
    }

    /// Rank of `v` in the lexicographic vertex order.
    pub fn lex_rank(&self, v: VertexId) -> usize {
        self.lex_rank[v.0]
    }

    /// g = |E| - |V| + 1, the cycle-space dimension.
    pub fn genus(&self) -> i64 {
        self.edges.len() as i64 - self.names.len() as i64 + 1
    }

    /// K(v) = deg(v) - 2.
    pub fn canonical_divisor(&self) -> Divisor {
        Divisor::from_fn(self, |v| self.degree(v) as i64 - 2)
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Number of spanning trees, by exact integer determinant of the reduced
    /// Laplacian (fraction-free Bareiss elimination). Overflow is a hard
    /// error.
    pub fn spanning_tree_count(&self) -> i64 {
        let n = self.names.len();
        if n == 1 {
            return 1;
        }
        // Reduced Laplacian: delete the row and column of vertex 0.
        let mut m = vec![vec![0i128; n - 1]; n - 1];
        for i in 1..n {
            m[i - 1][i - 1] = self.degree(VertexId(i)) as i128;
        }
        for &(a, b) in &self.edges {
            if a.0 > 0 && b.0 > 0 {
                m[a.0 - 1][b.0 - 1] -= 1;
                m[b.0 - 1][a.0 - 1] -= 1;
            }
        }
        let det = bareiss_det(m);
        i64::try_from(det).expect("spanning tree count overflows i64")
    }
}

/// Exact integer determinant via fraction-free Bareiss elimination.
pub(crate) fn bareiss_det(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            let Some(swap) = (k + 1..n).find(|&r| m[r][k] != 0) else {
                return 0;
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[i][j]
                    .checked_mul(m[k][k])
                    .and_then(|x| x.checked_sub(m[i][k].checked_mul(m[k][j]).expect("det overflow")))
                    .expect("det overflow");
                debug_assert_eq!(num % prev, 0, "Bareiss division must be exact");
                m[i][j] = num / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn c3() -> Multigraph {
        Multigraph::parse("a b\nb c\nc a").unwrap()
    }

    #[test]
    fn parse_c3() {
        let g = c3();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.name(VertexId(0)), "a");
        assert_eq!(g.endpoints(EdgeId(2)), (VertexId(2), VertexId(0)));
    }

    #[test]
    fn parse_banana_keeps_parallel_edges() {
        let g = Multigraph::parse("u v\nu v\nu v").unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.genus(), 2);
    }

    #[test]
    fn parse_rejects_loops() {
        assert!(matches!(Multigraph::parse("a a"), Err(Error::LoopEdge(_))));
    }

    #[test]
    fn parse_rejects_disconnected() {
        assert!(matches!(
            Multigraph::parse("a b\nc d"),
            Err(Error::Disconnected { .. })
        ));
    }

    #[test]
    fn parse_rejects_empty() {
        assert!(matches!(Multigraph::parse(""), Err(Error::EmptyGraph)));
        assert!(matches!(
            Multigraph::parse("# only comments\n\n"),
            Err(Error::EmptyGraph)
        ));
    }

    #[test]
    fn comments_and_blanks_ignored() {
        let g = Multigraph::parse("# triangle\na b\n\nb c\nc a\n").unwrap();
        assert_eq!(g.edge_count(), 3);
    }

    #[test]
    fn genus_values() {
        assert_eq!(c3().genus(), 1);
        assert_eq!(Multigraph::parse("u v\nu v\nu v").unwrap().genus(), 2);
        assert_eq!(k4().genus(), 3);
    }

    pub(crate) fn k4() -> Multigraph {
        Multigraph::parse("a b\na c\na d\nb c\nb d\nc d").unwrap()
    }

    #[test]
    fn canonical_divisor_values() {
        let g = c3();
        assert_eq!(g.canonical_divisor().values(), &[0, 0, 0]);
        let b3 = Multigraph::parse("u v\nu v\nu v").unwrap();
        assert_eq!(b3.canonical_divisor().values(), &[1, 1]);
        let k = k4().canonical_divisor();
        assert_eq!(k.values(), &[1, 1, 1, 1]);
        assert_eq!(k.degree(), 2 * k4().genus() - 2);
    }

    #[test]
    fn spanning_tree_counts() {
        assert_eq!(c3().spanning_tree_count(), 3);
        assert_eq!(
            Multigraph::parse("u v\nu v\nu v").unwrap().spanning_tree_count(),
            3
        );
        assert_eq!(k4().spanning_tree_count(), 16);
        // Single vertex: one (empty) spanning tree.
        assert_eq!(
            Multigraph::new(vec!["a".into()], vec![]).unwrap().spanning_tree_count(),
            1
        );
    }

    /// Brute-force spanning tree count by edge-subset enumeration.
    pub(crate) fn brute_tree_count(g: &Multigraph) -> i64 {
        let n = g.vertex_count();
        let m = g.edge_count();
        if n == 1 {
            return 1;
        }
        if m < n - 1 {
            return 0;
        }
        let mut count = 0i64;
        for mask in 0u32..(1 << m) {
            if mask.count_ones() as usize != n - 1 {
                continue;
            }
            // Union-find over the selected edges.
            let mut parent: Vec<usize> = (0..n).collect();
            fn find(parent: &mut [usize], mut x: usize) -> usize {
                while parent[x] != x {
                    parent[x] = parent[parent[x]];
                    x = parent[x];
                }
                x
            }
            let mut merged = 0;
            for e in 0..m {
                if mask & (1 << e) != 0 {
                    let (a, b) = g.endpoints(EdgeId(e));
                    let (ra, rb) = (find(&mut parent, a.0), find(&mut parent, b.0));
                    if ra != rb {
                        parent[ra] = rb;
                        merged += 1;
                    }
                }
            }
            if merged == n - 1 {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn tree_count_matches_brute_force() {
        for text in [
            "a b",
            "a b\nb c\nc a",
            "u v\nu v\nu v",
            "a b\nb c\nc d\nd a",
            "a b\nb c\nc d\nd a\na c",
            "a b\na c\na d\nb c\nb d\nc d",
            "a b\na b\nb c\nc a\nc d",
            // 8 edges: complete graph on four vertices plus two parallels.
            "a b\na c\na d\nb c\nb d\nc d\na b\nc d",
        ] {
            let g = Multigraph::parse(text).unwrap();
            assert_eq!(g.spanning_tree_count(), brute_tree_count(&g), "{text}");
        }
    }

    #[test]
    fn lex_order_independent_of_appearance() {
        let g = Multigraph::parse("z y\ny x\nx z").unwrap();
        assert_eq!(g.name(g.lex_least()), "x");
        let names: Vec<&str> = g.lex_vertices().iter().map(|&v| g.name(v)).collect();
        assert_eq!(names, ["x", "y", "z"]);
    }
}
