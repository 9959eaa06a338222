//! Partial orientations and the local moves of the generalized cycle-cocycle
//! reversal system.
//!
//! Orientation state is stored per edge identifier so parallel edges flip
//! independently and certificates can name edges. Every `apply_move` checks
//! the move's precondition strictly; nothing is auto-completed.

use serde::{Deserialize, Serialize};

use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::graph::{fnv1a, EdgeId, Multigraph, VertexId, FNV_OFFSET};

/// Per-edge orientation state. `TowardSecond` points an edge `(u, v)` at v
/// (the `>` of the file format), `TowardFirst` at u (`<`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeState {
    Unoriented,
    TowardFirst,
    TowardSecond,
}

/// An orientation of a subset of the edges.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialOrientation {
    graph_fp: u64,
    states: Vec<EdgeState>,
}

impl PartialOrientation {
    pub fn empty(g: &Multigraph) -> Self {
        PartialOrientation {
            graph_fp: g.fingerprint(),
            states: vec![EdgeState::Unoriented; g.edge_count()],
        }
    }

    /// Orient every edge toward its second endpoint, in declaration order.
    pub fn all_forward(g: &Multigraph) -> Self {
        PartialOrientation {
            graph_fp: g.fingerprint(),
            states: vec![EdgeState::TowardSecond; g.edge_count()],
        }
    }

    pub fn from_states(g: &Multigraph, states: Vec<EdgeState>) -> Self {
        assert_eq!(states.len(), g.edge_count());
        PartialOrientation {
            graph_fp: g.fingerprint(),
            states,
        }
    }

    /// Parse the orientation format: `edgeIndex >|<|-` lines, `#` comments;
    /// omitted edges stay unoriented.
    pub fn parse(g: &Multigraph, text: &str) -> Result<Self> {
        let mut states = vec![EdgeState::Unoriented; g.edge_count()];
        let mut seen = vec![false; g.edge_count()];
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != 2 {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("expected `edgeIndex >|<|-`, got `{line}`"),
                });
            }
            let idx: usize = tokens[0].parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                msg: format!("`{}` is not an edge index", tokens[0]),
            })?;
            if idx >= g.edge_count() {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("edge index {idx} out of range"),
                });
            }
            if seen[idx] {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("edge {idx} listed twice"),
                });
            }
            seen[idx] = true;
            states[idx] = match tokens[1] {
                ">" => EdgeState::TowardSecond,
                "<" => EdgeState::TowardFirst,
                "-" => EdgeState::Unoriented,
                other => {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        msg: format!("`{other}` is not one of > < -"),
                    })
                }
            };
        }
        Ok(PartialOrientation {
            graph_fp: g.fingerprint(),
            states,
        })
    }

    /// One `edgeIndex char` line per edge, in index order.
    pub fn to_lines(&self) -> Vec<String> {
        self.states
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let c = match s {
                    EdgeState::TowardSecond => '>',
                    EdgeState::TowardFirst => '<',
                    EdgeState::Unoriented => '-',
                };
                format!("{i} {c}")
            })
            .collect()
    }

    /// Arrow diagram, one edge per line.
    pub fn to_ascii(&self, g: &Multigraph) -> Vec<String> {
        g.edges()
            .map(|e| {
                let (a, b) = g.endpoints(e);
                let arrow = match self.states[e.0] {
                    EdgeState::TowardSecond => "->",
                    EdgeState::TowardFirst => "<-",
                    EdgeState::Unoriented => "--",
                };
                format!("{} {} {}", g.name(a), arrow, g.name(b))
            })
            .collect()
    }

    pub fn states(&self) -> &[EdgeState] {
        &self.states
    }

    pub fn state(&self, e: EdgeId) -> EdgeState {
        self.states[e.0]
    }

    pub fn same_graph(&self, g: &Multigraph) -> bool {
        self.graph_fp == g.fingerprint()
    }

    pub fn is_oriented(&self, e: EdgeId) -> bool {
        self.states[e.0] != EdgeState::Unoriented
    }

    /// The head of `e`, if oriented.
    pub fn head(&self, g: &Multigraph, e: EdgeId) -> Option<VertexId> {
        let (a, b) = g.endpoints(e);
        match self.states[e.0] {
            EdgeState::Unoriented => None,
            EdgeState::TowardFirst => Some(a),
            EdgeState::TowardSecond => Some(b),
        }
    }

    /// The tail of `e`, if oriented.
    pub fn tail(&self, g: &Multigraph, e: EdgeId) -> Option<VertexId> {
        let (a, b) = g.endpoints(e);
        match self.states[e.0] {
            EdgeState::Unoriented => None,
            EdgeState::TowardFirst => Some(b),
            EdgeState::TowardSecond => Some(a),
        }
    }

    pub fn set_state(&mut self, e: EdgeId, s: EdgeState) {
        self.states[e.0] = s;
    }

    /// Orient `e` toward `head`, regardless of its current state.
    pub(crate) fn orient_toward(&mut self, g: &Multigraph, e: EdgeId, head: VertexId) {
        let (a, b) = g.endpoints(e);
        self.states[e.0] = if head == b {
            EdgeState::TowardSecond
        } else {
            debug_assert_eq!(head, a);
            EdgeState::TowardFirst
        };
    }

    pub fn oriented_count(&self) -> usize {
        self.states
            .iter()
            .filter(|&&s| s != EdgeState::Unoriented)
            .count()
    }

    pub fn indegree(&self, g: &Multigraph, v: VertexId) -> usize {
        g.incident(v)
            .iter()
            .filter(|&&(e, _)| self.head(g, e) == Some(v))
            .count()
    }

    /// Binds a certificate to an orientation value.
    pub fn fingerprint(&self) -> u64 {
        let mut fp = fnv1a(&self.graph_fp.to_le_bytes(), FNV_OFFSET);
        for s in &self.states {
            let byte = match s {
                EdgeState::Unoriented => 0u8,
                EdgeState::TowardFirst => 1,
                EdgeState::TowardSecond => 2,
            };
            fp = fnv1a(&[byte], fp);
        }
        fp
    }
}

/// D_O(v) = indeg(v) - 1.
pub fn indegree_divisor(g: &Multigraph, o: &PartialOrientation) -> Divisor {
    Divisor::from_fn(g, |v| o.indegree(g, v) as i64 - 1)
}

/// Forward closure of `from` along oriented edges only.
pub fn reachable(g: &Multigraph, o: &PartialOrientation, from: &[VertexId]) -> Vec<VertexId> {
    let mut seen = vec![false; g.vertex_count()];
    let mut stack: Vec<VertexId> = Vec::new();
    for &v in from {
        if !seen[v.0] {
            seen[v.0] = true;
            stack.push(v);
        }
    }
    while let Some(v) = stack.pop() {
        for &(e, u) in g.incident(v) {
            if o.tail(g, e) == Some(v) && !seen[u.0] {
                seen[u.0] = true;
                stack.push(u);
            }
        }
    }
    (0..g.vertex_count())
        .map(VertexId)
        .filter(|v| seen[v.0])
        .collect()
}

/// Structural flags of one orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrientationFlags {
    pub acyclic: bool,
    pub sourceless: bool,
    pub full: bool,
}

/// Cycle detection over oriented edges (iterative DFS, edge order), source
/// detection, and fullness. Sourcelessness is cross-checked against
/// effectivity of the indegree divisor.
pub fn classify(g: &Multigraph, o: &PartialOrientation) -> OrientationFlags {
    let sourceless = g.vertices().all(|v| o.indegree(g, v) > 0);
    debug_assert_eq!(sourceless, indegree_divisor(g, o).is_effective());
    let full = o.oriented_count() == g.edge_count();

    // Iterative DFS with colors; only oriented edges transmit.
    let n = g.vertex_count();
    let mut color = vec![0u8; n]; // 0 white, 1 gray, 2 black
    let mut acyclic = true;
    'outer: for root in 0..n {
        if color[root] != 0 {
            continue;
        }
        // Stack of (vertex, next incident index).
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        color[root] = 1;
        while let Some(&(v, idx)) = stack.last() {
            let inc = g.incident(VertexId(v));
            if idx >= inc.len() {
                color[v] = 2;
                stack.pop();
                continue;
            }
            stack.last_mut().unwrap().1 += 1;
            let (e, u) = inc[idx];
            if o.tail(g, e) != Some(VertexId(v)) {
                continue;
            }
            match color[u.0] {
                0 => {
                    color[u.0] = 1;
                    stack.push((u.0, 0));
                }
                1 => {
                    acyclic = false;
                    break 'outer;
                }
                _ => {}
            }
        }
    }

    OrientationFlags {
        acyclic,
        sourceless,
        full,
    }
}

/// Whether every vertex is reachable from q by a directed path.
pub fn is_q_connected(g: &Multigraph, o: &PartialOrientation, q: VertexId) -> bool {
    reachable(g, o, &[q]).len() == g.vertex_count()
}

/// Source vertices (indegree zero), in dense-id order.
pub fn sources(g: &Multigraph, o: &PartialOrientation) -> Vec<VertexId> {
    g.vertices().filter(|&v| o.indegree(g, v) == 0).collect()
}

/// One local transformation of the reversal system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Move {
    /// Unorient `incoming` (oriented toward `pivot`) and orient `unoriented`
    /// toward `pivot`. Preserves the indegree divisor.
    EdgePivot {
        incoming: EdgeId,
        unoriented: EdgeId,
        pivot: VertexId,
    },
    /// Reverse a consistently oriented simple cycle. Preserves the divisor.
    CycleReversal { edges: Vec<EdgeId> },
    /// Reverse the saturated, consistently oriented cut (S, S^c).
    CutReversal { side: Vec<VertexId> },
    /// Reverse a directed path; changes the divisor by +(start) - (end).
    PathReversal { edges: Vec<EdgeId> },
    /// Pivot cascade along a directed path ending at a vertex with an
    /// unoriented edge; frees the initial path edge. Preserves the divisor.
    JacobsLadder {
        path: Vec<EdgeId>,
        terminal: EdgeId,
    },
    /// Unorient an oriented edge; divisor loses a chip at the old head.
    UnorientEdge { edge: EdgeId },
    /// Orient an unoriented edge toward `head`; divisor gains a chip there.
    OrientEdge { edge: EdgeId, head: VertexId },
}

fn violated(kind: &'static str, detail: String) -> Error {
    Error::PreconditionViolated { kind, detail }
}

/// Check that `edges` is a consistently directed trail and return its vertex
/// sequence (tail of first edge first).
fn directed_path_vertices(
    g: &Multigraph,
    o: &PartialOrientation,
    edges: &[EdgeId],
    kind: &'static str,
) -> Result<Vec<VertexId>> {
    if edges.is_empty() {
        return Err(violated(kind, "empty edge sequence".into()));
    }
    let mut verts = Vec::with_capacity(edges.len() + 1);
    for (i, &e) in edges.iter().enumerate() {
        let (Some(tail), Some(head)) = (o.tail(g, e), o.head(g, e)) else {
            return Err(violated(kind, format!("edge {e} is unoriented")));
        };
        if i == 0 {
            verts.push(tail);
        } else if *verts.last().unwrap() != tail {
            return Err(violated(kind, format!("edge {e} does not continue the path")));
        }
        verts.push(head);
    }
    let mut distinct = edges.to_vec();
    distinct.sort();
    distinct.dedup();
    if distinct.len() != edges.len() {
        return Err(violated(kind, "repeated edge".into()));
    }
    Ok(verts)
}

/// Apply one move with strict precondition checking, returning the new
/// orientation.
pub fn apply_move(g: &Multigraph, o: &PartialOrientation, m: &Move) -> Result<PartialOrientation> {
    if !o.same_graph(g) {
        return Err(Error::GraphMismatch);
    }
    let mut next = o.clone();
    match m {
        Move::EdgePivot {
            incoming,
            unoriented,
            pivot,
        } => {
            if o.head(g, *incoming) != Some(*pivot) {
                return Err(violated(
                    "edge_pivot",
                    format!("edge {incoming} is not oriented toward {}", g.name(*pivot)),
                ));
            }
            if o.is_oriented(*unoriented) {
                return Err(violated(
                    "edge_pivot",
                    format!("edge {unoriented} is not unoriented"),
                ));
            }
            if !g.is_endpoint(*unoriented, *pivot) {
                return Err(violated(
                    "edge_pivot",
                    format!("edge {unoriented} is not incident to {}", g.name(*pivot)),
                ));
            }
            if incoming == unoriented {
                return Err(violated("edge_pivot", "pivot needs two distinct edges".into()));
            }
            next.set_state(*incoming, EdgeState::Unoriented);
            next.orient_toward(g, *unoriented, *pivot);
        }
        Move::CycleReversal { edges } => {
            let verts = directed_path_vertices(g, o, edges, "cycle_reversal")?;
            if verts.first() != verts.last() {
                return Err(violated("cycle_reversal", "edges do not close a cycle".into()));
            }
            let mut interior = verts[..verts.len() - 1].to_vec();
            interior.sort();
            interior.dedup();
            if interior.len() != verts.len() - 1 {
                return Err(violated("cycle_reversal", "cycle revisits a vertex".into()));
            }
            for &e in edges {
                let tail = o.tail(g, e).unwrap();
                next.orient_toward(g, e, tail);
            }
        }
        Move::CutReversal { side } => {
            let mut in_side = vec![false; g.vertex_count()];
            for &v in side {
                in_side[v.0] = true;
            }
            let size = in_side.iter().filter(|&&b| b).count();
            if size == 0 || size == g.vertex_count() {
                return Err(violated("cut_reversal", "side must be a proper subset".into()));
            }
            // Saturated and consistently oriented: every cut edge oriented,
            // all the same direction across the cut.
            let mut toward_side: Option<bool> = None;
            for e in g.edges() {
                let (a, b) = g.endpoints(e);
                if in_side[a.0] == in_side[b.0] {
                    continue;
                }
                let Some(head) = o.head(g, e) else {
                    return Err(violated(
                        "cut_reversal",
                        format!("cut edge {e} is unoriented (cut not saturated)"),
                    ));
                };
                let this_toward = in_side[head.0];
                match toward_side {
                    None => toward_side = Some(this_toward),
                    Some(t) if t != this_toward => {
                        return Err(violated(
                            "cut_reversal",
                            "cut is not consistently oriented".into(),
                        ))
                    }
                    _ => {}
                }
            }
            if toward_side.is_none() {
                return Err(violated("cut_reversal", "cut is empty".into()));
            }
            for e in g.edges() {
                let (a, b) = g.endpoints(e);
                if in_side[a.0] != in_side[b.0] {
                    let tail = o.tail(g, e).unwrap();
                    next.orient_toward(g, e, tail);
                }
            }
        }
        Move::PathReversal { edges } => {
            directed_path_vertices(g, o, edges, "path_reversal")?;
            for &e in edges {
                let tail = o.tail(g, e).unwrap();
                next.orient_toward(g, e, tail);
            }
        }
        Move::JacobsLadder { path, terminal } => {
            let verts = directed_path_vertices(g, o, path, "jacobs_ladder")?;
            let end = *verts.last().unwrap();
            if o.is_oriented(*terminal) {
                return Err(violated(
                    "jacobs_ladder",
                    format!("terminal edge {terminal} is not unoriented"),
                ));
            }
            if !g.is_endpoint(*terminal, end) {
                return Err(violated(
                    "jacobs_ladder",
                    format!("terminal edge {terminal} is not incident to the path end"),
                ));
            }
            // Successive pivots from the path end backwards: the terminal
            // edge turns toward the end, every later path edge reverses, and
            // the initial edge becomes unoriented.
            let mut carried = *terminal;
            for &e in path.iter().rev() {
                let head = o.head(g, e).unwrap();
                next.set_state(e, EdgeState::Unoriented);
                next.orient_toward(g, carried, head);
                carried = e;
            }
        }
        Move::UnorientEdge { edge } => {
            if !o.is_oriented(*edge) {
                return Err(violated("unorient_edge", format!("edge {edge} is unoriented")));
            }
            next.set_state(*edge, EdgeState::Unoriented);
        }
        Move::OrientEdge { edge, head } => {
            if o.is_oriented(*edge) {
                return Err(violated("orient_edge", format!("edge {edge} is oriented")));
            }
            if !g.is_endpoint(*edge, *head) {
                return Err(violated(
                    "orient_edge",
                    format!("edge {edge} is not incident to {}", g.name(*head)),
                ));
            }
            next.orient_toward(g, *edge, *head);
        }
    }
    Ok(next)
}

/// A replayable move sequence bound to its endpoints by fingerprints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveCertificate {
    pub initial: u64,
    pub moves: Vec<Move>,
    #[serde(rename = "final")]
    pub final_: u64,
}

/// Replay a certificate from `o`, checking fingerprints and every move's
/// precondition.
pub fn replay(
    g: &Multigraph,
    cert: &MoveCertificate,
    o: &PartialOrientation,
) -> Result<PartialOrientation> {
    let got = o.fingerprint();
    if got != cert.initial {
        return Err(Error::FingerprintMismatch {
            stage: "initial",
            expected: cert.initial,
            got,
        });
    }
    let mut cur = o.clone();
    for m in &cert.moves {
        cur = apply_move(g, &cur, m)?;
    }
    let got = cur.fingerprint();
    if got != cert.final_ {
        return Err(Error::FingerprintMismatch {
            stage: "final",
            expected: cert.final_,
            got,
        });
    }
    Ok(cur)
}

/// Accumulates checked moves into a certificate.
pub(crate) struct Session<'a> {
    g: &'a Multigraph,
    pub current: PartialOrientation,
    initial: u64,
    moves: Vec<Move>,
}

impl<'a> Session<'a> {
    pub fn new(g: &'a Multigraph, start: PartialOrientation) -> Self {
        let initial = start.fingerprint();
        Session {
            g,
            current: start,
            initial,
            moves: Vec::new(),
        }
    }

    pub fn graph(&self) -> &'a Multigraph {
        self.g
    }

    pub fn apply(&mut self, m: Move) -> Result<()> {
        self.current = apply_move(self.g, &self.current, &m)?;
        self.moves.push(m);
        Ok(())
    }

    pub fn steps(&self) -> usize {
        self.moves.len()
    }

    pub fn finish(self) -> (PartialOrientation, MoveCertificate) {
        let cert = MoveCertificate {
            initial: self.initial,
            moves: self.moves,
            final_: self.current.fingerprint(),
        };
        (self.current, cert)
    }
}
