//! The core algorithms on the generalized cycle-cocycle reversal system:
//! oriented burning, unfurling, modified unfurling, construction of partial
//! orientations, q-connected normalization, the equivalence decision, and
//! rank via directed path reversals.
//!
//! Every operation returns a `MoveCertificate` that replays move-by-move
//! from its input. Tie-breaking is lexicographic by vertex name, then edge
//! index, so certificates are reproducible.

use serde::{Deserialize, Serialize};

use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Multigraph, VertexId};
use crate::orientation::{
    classify, indegree_divisor, is_q_connected, reachable, sources, Move, MoveCertificate,
    PartialOrientation, Session,
};
use crate::rank::{rank, RankCertificate};
use crate::reduce::linearly_equivalent;

/// Cooperative limits for the long-running searches: a step budget plus an
/// optional cancellation flag, both checked between moves.
///
/// The termination theorems bound every loop, so the default budget is never
/// reached by correct code; callers that want an external kill switch pass
/// their own flag.
#[derive(Debug, Clone)]
pub struct Budget {
    max_steps: u64,
    cancel: Option<std::sync::Arc<std::sync::atomic::AtomicBool>>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_steps: 1_000_000,
            cancel: None,
        }
    }
}

impl Budget {
    pub fn with_max_steps(max_steps: u64) -> Self {
        Budget {
            max_steps,
            cancel: None,
        }
    }

    pub fn cancelled_by(mut self, flag: std::sync::Arc<std::sync::atomic::AtomicBool>) -> Self {
        self.cancel = Some(flag);
        self
    }

    fn check(&self, steps: usize) -> Result<()> {
        if let Some(flag) = &self.cancel {
            if flag.load(std::sync::atomic::Ordering::Relaxed) {
                return Err(Error::Interrupted("cancelled"));
            }
        }
        if steps as u64 >= self.max_steps {
            return Err(Error::Interrupted("step budget exhausted"));
        }
        Ok(())
    }
}

/// Outcome of the dichotomy-producing algorithms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Acyclic,
    Sourceless,
    /// The grown source side X: the cut (X, X^c) is saturated toward X^c and
    /// G[X^c] is sourceless, so every pivot-equivalent orientation keeps a
    /// directed cycle. X is empty exactly when the input had no sources.
    CycleLocked { locked: Vec<VertexId> },
    /// An edge is now oriented toward the protected source set.
    EdgeIntoS { edge: EdgeId },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DichotomyResult {
    pub outcome: Outcome,
    pub orientation: PartialOrientation,
    pub certificate: MoveCertificate,
}

/// Lexicographic vertex iteration helper.
fn lex_filter<'a>(
    g: &'a Multigraph,
    pred: impl Fn(VertexId) -> bool + 'a,
) -> impl Iterator<Item = VertexId> + 'a {
    g.lex_vertices().iter().copied().filter(move |&v| pred(v))
}

/// One growth pass of the oriented burning process, shared by
/// `oriented_dhar` and `unfurl`. Grows `x` (a set of vertices containing
/// the sources) by edge pivots; returns true when X reached V.
///
/// Invariant: no cut edge of (X, X^c) is ever oriented toward X.
fn dhar_growth(session: &mut Session<'_>, x: &mut [bool], budget: &Budget) -> Result<bool> {
    let g = session.graph();
    loop {
        budget.check(session.steps())?;
        // Edge pivots at boundary-of-X^c vertices: orient an unoriented cut
        // edge toward v while unorienting an incoming edge inside G[X^c].
        let mut pivoted = true;
        while pivoted {
            pivoted = false;
            for v in g.lex_vertices().iter().copied() {
                if x[v.0] {
                    continue;
                }
                loop {
                    let unoriented_cut = g
                        .incident(v)
                        .iter()
                        .find(|&&(e, u)| x[u.0] && !session.current.is_oriented(e))
                        .map(|&(e, _)| e);
                    let inside_in = g
                        .incident(v)
                        .iter()
                        .find(|&&(e, u)| !x[u.0] && session.current.head(g, e) == Some(v))
                        .map(|&(e, _)| e);
                    let (Some(un), Some(inc)) = (unoriented_cut, inside_in) else {
                        break;
                    };
                    session.apply(Move::EdgePivot {
                        incoming: inc,
                        unoriented: un,
                        pivot: v,
                    })?;
                    pivoted = true;
                    budget.check(session.steps())?;
                }
            }
        }

        // Add every boundary vertex with no incoming edge inside G[X^c].
        let mut added = Vec::new();
        for v in g.lex_vertices().iter().copied() {
            if x[v.0] {
                continue;
            }
            let on_boundary = g.incident(v).iter().any(|&(_, u)| x[u.0]);
            if !on_boundary {
                continue;
            }
            let inside_in = g
                .incident(v)
                .iter()
                .any(|&(e, u)| !x[u.0] && session.current.head(g, e) == Some(v));
            if !inside_in {
                added.push(v);
            }
        }
        if added.is_empty() {
            return Ok(false);
        }
        for v in added {
            x[v.0] = true;
        }
        if x.iter().all(|&b| b) {
            return Ok(true);
        }
    }
}

/// Oriented burning: grow X from the sources by edge pivots.
///
/// Returns `Acyclic` (with the divisor unchanged) when X reaches V, and
/// otherwise `CycleLocked(X)`, certifying that no pivot-equivalent
/// orientation is acyclic. Inputs that are already acyclic come back
/// unchanged; sourceless inputs lock immediately with X empty.
pub fn oriented_dhar(g: &Multigraph, o: &PartialOrientation) -> DichotomyResult {
    oriented_dhar_with(g, o, &Budget::default()).expect("default budget suffices")
}

/// `oriented_dhar` under a caller-supplied budget.
pub fn oriented_dhar_with(
    g: &Multigraph,
    o: &PartialOrientation,
    budget: &Budget,
) -> Result<DichotomyResult> {
    let session = Session::new(g, o.clone());
    if classify(g, o).acyclic {
        let (orientation, certificate) = session.finish();
        return Ok(DichotomyResult {
            outcome: Outcome::Acyclic,
            orientation,
            certificate,
        });
    }
    let src = sources(g, o);
    if src.is_empty() {
        let (orientation, certificate) = session.finish();
        return Ok(DichotomyResult {
            outcome: Outcome::CycleLocked { locked: vec![] },
            orientation,
            certificate,
        });
    }
    let mut session = session;
    let mut x = vec![false; g.vertex_count()];
    for v in src {
        x[v.0] = true;
    }
    let full = dhar_growth(&mut session, &mut x, budget)?;
    let locked: Vec<VertexId> = g.vertices().filter(|v| x[v.0]).collect();
    let (orientation, certificate) = session.finish();
    if full {
        debug_assert!(classify(g, &orientation).acyclic);
        debug_assert_eq!(indegree_divisor(g, &orientation), indegree_divisor(g, o));
        Ok(DichotomyResult {
            outcome: Outcome::Acyclic,
            orientation,
            certificate,
        })
    } else {
        Ok(DichotomyResult {
            outcome: Outcome::CycleLocked { locked },
            orientation,
            certificate,
        })
    }
}

/// Iterated oriented burning: on a lock, reverse the consistently oriented
/// cut (X, X^c) and restart. Terminates with an acyclic or sourceless
/// orientation whose divisor is linearly equivalent to the input's.
pub fn unfurl(g: &Multigraph, o: &PartialOrientation) -> DichotomyResult {
    unfurl_with(g, o, &Budget::default()).expect("default budget suffices")
}

/// `unfurl` under a caller-supplied budget.
pub fn unfurl_with(
    g: &Multigraph,
    o: &PartialOrientation,
    budget: &Budget,
) -> Result<DichotomyResult> {
    let d_in = indegree_divisor(g, o);
    let mut session = Session::new(g, o.clone());
    loop {
        budget.check(session.steps())?;
        let flags = classify(g, &session.current);
        if flags.acyclic {
            break;
        }
        if flags.sourceless {
            break;
        }
        let mut x = vec![false; g.vertex_count()];
        for v in sources(g, &session.current) {
            x[v.0] = true;
        }
        let full = dhar_growth(&mut session, &mut x, budget)?;
        if full {
            break;
        }
        // The cut (X, X^c) is saturated toward X^c; reverse it.
        let side: Vec<VertexId> = g.vertices().filter(|v| x[v.0]).collect();
        debug_assert!(!side.is_empty() && side.len() < g.vertex_count());
        session
            .apply(Move::CutReversal { side })
            .expect("growth terminates with a saturated consistent cut");
    }
    let (orientation, certificate) = session.finish();
    let flags = classify(g, &orientation);
    let outcome = if flags.acyclic {
        Outcome::Acyclic
    } else {
        Outcome::Sourceless
    };
    assert!(
        linearly_equivalent(g, &d_in, &indegree_divisor(g, &orientation)),
        "unfurl must stay in the divisor class"
    );
    Ok(DichotomyResult {
        outcome,
        orientation,
        certificate,
    })
}

/// Modified unfurling: protect a connected source set S.
///
/// Unlike `unfurl`, a vertex joins X as soon as an unoriented cut edge
/// reaches it (incoming edges inside G[X^c] are not consulted), the cut is
/// reversed whenever it saturates, and X resets to S after each reversal.
/// Ends with an edge oriented into S, or acyclic with the guarantee that S
/// stays a subset of the sources across the whole equivalence class.
pub fn modified_unfurl(
    g: &Multigraph,
    o: &PartialOrientation,
    s: &[VertexId],
) -> Result<DichotomyResult> {
    modified_unfurl_with(g, o, s, &Budget::default())
}

/// `modified_unfurl` under a caller-supplied budget.
pub fn modified_unfurl_with(
    g: &Multigraph,
    o: &PartialOrientation,
    s: &[VertexId],
    budget: &Budget,
) -> Result<DichotomyResult> {
    if s.is_empty() {
        return Err(Error::PreconditionViolated {
            kind: "modified_unfurl",
            detail: "S must be nonempty".into(),
        });
    }
    for &v in s {
        if o.indegree(g, v) != 0 {
            return Err(Error::PreconditionViolated {
                kind: "modified_unfurl",
                detail: format!("{} is not a source", g.name(v)),
            });
        }
    }
    // G[S] connected.
    {
        let mut in_s = vec![false; g.vertex_count()];
        for &v in s {
            in_s[v.0] = true;
        }
        let mut seen = vec![false; g.vertex_count()];
        let mut stack = vec![s[0]];
        seen[s[0].0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(_, u) in g.incident(v) {
                if in_s[u.0] && !seen[u.0] {
                    seen[u.0] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        if count != s.len() {
            return Err(Error::PreconditionViolated {
                kind: "modified_unfurl",
                detail: "G[S] is not connected".into(),
            });
        }
    }

    let mut session = Session::new(g, o.clone());
    let mut x = vec![false; g.vertex_count()];
    for &v in s {
        x[v.0] = true;
    }
    if x.iter().all(|&b| b) {
        // Every vertex is a protected source: the orientation is empty,
        // hence already acyclic.
        let (orientation, certificate) = session.finish();
        debug_assert!(classify(g, &orientation).acyclic);
        return Ok(DichotomyResult {
            outcome: Outcome::Acyclic,
            orientation,
            certificate,
        });
    }
    loop {
        budget.check(session.steps())?;
        // Pivots at boundary-of-X^c vertices, exactly as in the plain
        // growth.
        let mut pivoted = true;
        while pivoted {
            pivoted = false;
            for v in g.lex_vertices().iter().copied() {
                if x[v.0] {
                    continue;
                }
                loop {
                    let unoriented_cut = g
                        .incident(v)
                        .iter()
                        .find(|&&(e, u)| x[u.0] && !session.current.is_oriented(e))
                        .map(|&(e, _)| e);
                    let inside_in = g
                        .incident(v)
                        .iter()
                        .find(|&&(e, u)| !x[u.0] && session.current.head(g, e) == Some(v))
                        .map(|&(e, _)| e);
                    let (Some(un), Some(inc)) = (unoriented_cut, inside_in) else {
                        break;
                    };
                    session.apply(Move::EdgePivot {
                        incoming: inc,
                        unoriented: un,
                        pivot: v,
                    })?;
                    pivoted = true;
                    budget.check(session.steps())?;
                }
            }
        }

        // Cross any unoriented cut edge, incoming edges notwithstanding.
        let crossed = lex_filter(g, |v| !x[v.0]).find(|&v| {
            g.incident(v)
                .iter()
                .any(|&(e, u)| x[u.0] && !session.current.is_oriented(e))
        });
        if let Some(v) = crossed {
            x[v.0] = true;
            if x.iter().all(|&b| b) {
                let (orientation, certificate) = session.finish();
                debug_assert!(classify(g, &orientation).acyclic);
                return Ok(DichotomyResult {
                    outcome: Outcome::Acyclic,
                    orientation,
                    certificate,
                });
            }
            continue;
        }

        // The cut is saturated toward X^c: reverse it.
        let side: Vec<VertexId> = g.vertices().filter(|v| x[v.0]).collect();
        session
            .apply(Move::CutReversal { side })
            .expect("saturated cut after pivot exhaustion");

        // Did the reversal orient an edge into S?
        let mut in_s = vec![false; g.vertex_count()];
        for &v in s {
            in_s[v.0] = true;
        }
        let hit = g
            .edges()
            .find(|&e| matches!(session.current.head(g, e), Some(h) if in_s[h.0]));
        if let Some(edge) = hit {
            let (orientation, certificate) = session.finish();
            return Ok(DichotomyResult {
                outcome: Outcome::EdgeIntoS { edge },
                orientation,
                certificate,
            });
        }
        for b in x.iter_mut() {
            *b = false;
        }
        for &v in s {
            x[v.0] = true;
        }
    }
}

/// Result of `construct_orientation`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Construction {
    /// An orientation whose divisor is linearly equivalent to the input.
    Realized {
        orientation: PartialOrientation,
        certificate: MoveCertificate,
    },
    /// A proof that no such orientation exists: d_prime ~ input and
    /// d_prime < D_O for the acyclic orientation returned.
    Obstructed {
        d_prime: Divisor,
        orientation: PartialOrientation,
        certificate: MoveCertificate,
    },
}

impl Construction {
    pub fn certificate(&self) -> &MoveCertificate {
        match self {
            Construction::Realized { certificate, .. } => certificate,
            Construction::Obstructed { certificate, .. } => certificate,
        }
    }

    pub fn orientation(&self) -> &PartialOrientation {
        match self {
            Construction::Realized { orientation, .. } => orientation,
            Construction::Obstructed { orientation, .. } => orientation,
        }
    }

    pub fn is_realized(&self) -> bool {
        matches!(self, Construction::Realized { .. })
    }
}

/// Build a partial orientation whose divisor is linearly equivalent to `d`,
/// or certify that none exists. Starts from the empty orientation and works
/// with pairs (O_i, D_i) keeping D_{O_i} + D_i ~ d.
pub fn construct_orientation(g: &Multigraph, d: &Divisor) -> Result<Construction> {
    construct_orientation_with(g, d, &Budget::default())
}

/// `construct_orientation` under a caller-supplied budget.
pub fn construct_orientation_with(
    g: &Multigraph,
    d: &Divisor,
    budget: &Budget,
) -> Result<Construction> {
    let gmax = g.genus() - 1;
    if d.degree() > gmax {
        return Err(Error::DegreeTooHigh {
            got: d.degree(),
            max: gmax,
        });
    }
    let mut session = Session::new(g, PartialOrientation::empty(g));
    // remaining = d - D_O, updated incrementally as chips are placed.
    let mut remaining = d.minus(&indegree_divisor(g, &session.current));

    loop {
        budget.check(session.steps())?;
        if remaining.values().iter().all(|&v| v == 0) {
            let (orientation, certificate) = session.finish();
            debug_assert!(linearly_equivalent(g, d, &indegree_divisor(g, &orientation)));
            return Ok(Construction::Realized {
                orientation,
                certificate,
            });
        }
        let o = &session.current;
        let pos: Vec<VertexId> = lex_filter(g, |v| remaining.get(v) > 0).collect();
        let neg: Vec<VertexId> = lex_filter(g, |v| remaining.get(v) < 0).collect();
        let full = o.oriented_count() == g.edge_count();

        if !pos.is_empty() && !full {
            // Case 1: deliver a chip to some s in the positive support by a
            // pivot cascade that frees an edge at s.
            let reach = reachable(g, o, &pos);
            let mut reach_set = vec![false; g.vertex_count()];
            for &v in &reach {
                reach_set[v.0] = true;
            }
            // A reachable vertex incident to an unoriented edge?
            let target = path_to_unoriented(g, o, &pos);
            if let Some((path, terminal, s)) = target {
                if path.is_empty() {
                    // s itself touches an unoriented edge.
                    session.apply(Move::OrientEdge {
                        edge: terminal,
                        head: s,
                    })?;
                } else {
                    let first = path[0];
                    session.apply(Move::JacobsLadder {
                        path,
                        terminal,
                    })?;
                    session.apply(Move::OrientEdge {
                        edge: first,
                        head: s,
                    })?;
                }
                remaining.add_chips(s, -1);
                continue;
            }
            // No reachable unoriented edge: G[reach] is fully oriented and
            // the cut is saturated toward it. Reverse the cut and retry.
            let side: Vec<VertexId> = g.vertices().filter(|v| reach_set[v.0]).collect();
            debug_assert!(side.len() < g.vertex_count(), "full orientation handled above");
            session
                .apply(Move::CutReversal { side })
                .expect("stuck reachable set has a saturated cut");
            continue;
        }

        if !pos.is_empty() && !neg.is_empty() && full {
            // Case 2: move a chip from the positive to the negative support
            // along a directed path, or grow reachability by a cut reversal.
            if let Some(path) = shortest_path_to(g, o, &pos, |v| remaining.get(v) < 0) {
                let s = o.tail(g, path[0]).unwrap();
                let r = o.head(g, *path.last().unwrap()).unwrap();
                session.apply(Move::PathReversal { edges: path })?;
                remaining.add_chips(s, -1);
                remaining.add_chips(r, 1);
            } else {
                let reach = reachable(g, o, &pos);
                let mut reach_set = vec![false; g.vertex_count()];
                for &v in &reach {
                    reach_set[v.0] = true;
                }
                let side: Vec<VertexId> = g.vertices().filter(|v| reach_set[v.0]).collect();
                debug_assert!(side.len() < g.vertex_count());
                session
                    .apply(Move::CutReversal { side })
                    .expect("unreaching full orientation has a saturated cut");
            }
            continue;
        }

        // Case 3: no positive support left; absorb debt.
        debug_assert!(!neg.is_empty());
        let absorb = neg
            .iter()
            .copied()
            .find_map(|r| incoming_edge(g, o, r).map(|e| (r, e)));
        if let Some((r, e)) = absorb {
            session.apply(Move::UnorientEdge { edge: e })?;
            remaining.add_chips(r, 1);
            continue;
        }
        // Every debtor is a source. Protect the connected component of the
        // lexicographically least debtor and run the modified unfurling.
        let mut in_r = vec![false; g.vertex_count()];
        for &v in &neg {
            in_r[v.0] = true;
        }
        let mut comp = vec![neg[0]];
        let mut seen = vec![false; g.vertex_count()];
        seen[neg[0].0] = true;
        let mut idx = 0;
        while idx < comp.len() {
            let v = comp[idx];
            idx += 1;
            for &(_, u) in g.incident(v) {
                if in_r[u.0] && !seen[u.0] {
                    seen[u.0] = true;
                    comp.push(u);
                }
            }
        }
        comp.sort_by_key(|&v| g.lex_rank(v));
        let sub = modified_unfurl_with(g, &session.current, &comp, budget)?;
        for m in &sub.certificate.moves {
            session.apply(m.clone())?;
        }
        match sub.outcome {
            Outcome::EdgeIntoS { edge } => {
                let r = session.current.head(g, edge).unwrap();
                debug_assert!(remaining.get(r) < 0);
                session.apply(Move::UnorientEdge { edge })?;
                remaining.add_chips(r, 1);
            }
            Outcome::Acyclic => {
                let (orientation, certificate) = session.finish();
                let d_prime = indegree_divisor(g, &orientation).plus(&remaining);
                debug_assert!(linearly_equivalent(g, d, &d_prime));
                debug_assert!(indegree_divisor(g, &orientation).strictly_dominates(&d_prime));
                return Ok(Construction::Obstructed {
                    d_prime,
                    orientation,
                    certificate,
                });
            }
            _ => unreachable!("modified unfurl returns EdgeIntoS or Acyclic"),
        }
    }
}

/// Shortest directed path (as edges) from the positive support to a vertex
/// incident to an unoriented edge, together with that edge and the start
/// vertex. BFS layered over `starts` in lex order; ties by edge id.
fn path_to_unoriented(
    g: &Multigraph,
    o: &PartialOrientation,
    starts: &[VertexId],
) -> Option<(Vec<EdgeId>, EdgeId, VertexId)> {
    let path = shortest_path_to(g, o, starts, |v| {
        g.incident(v).iter().any(|&(e, _)| !o.is_oriented(e))
    })?;
    let (start, end) = if path.is_empty() {
        let s = starts
            .iter()
            .copied()
            .find(|&v| g.incident(v).iter().any(|&(e, _)| !o.is_oriented(e)))
            .unwrap();
        (s, s)
    } else {
        (o.tail(g, path[0]).unwrap(), o.head(g, *path.last().unwrap()).unwrap())
    };
    let terminal = g
        .incident(end)
        .iter()
        .find(|&&(e, _)| !o.is_oriented(e))
        .map(|&(e, _)| e)
        .unwrap();
    Some((path, terminal, start))
}

/// BFS over oriented edges from `starts` (already in preference order) to
/// the nearest vertex satisfying `goal`; returns the edge sequence, which is
/// empty when a start vertex already satisfies the goal.
fn shortest_path_to(
    g: &Multigraph,
    o: &PartialOrientation,
    starts: &[VertexId],
    goal: impl Fn(VertexId) -> bool,
) -> Option<Vec<EdgeId>> {
    let n = g.vertex_count();
    let mut pred: Vec<Option<(EdgeId, VertexId)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    for &v in starts {
        if !seen[v.0] {
            seen[v.0] = true;
            queue.push_back(v);
            if goal(v) {
                return Some(vec![]);
            }
        }
    }
    while let Some(v) = queue.pop_front() {
        for &(e, u) in g.incident(v) {
            if o.tail(g, e) == Some(v) && !seen[u.0] {
                seen[u.0] = true;
                pred[u.0] = Some((e, v));
                if goal(u) {
                    let mut path = Vec::new();
                    let mut cur = u;
                    while let Some((e, p)) = pred[cur.0] {
                        path.push(e);
                        cur = p;
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(u);
            }
        }
    }
    None
}

fn incoming_edge(g: &Multigraph, o: &PartialOrientation, v: VertexId) -> Option<EdgeId> {
    g.incident(v)
        .iter()
        .find(|&&(e, _)| o.head(g, e) == Some(v))
        .map(|&(e, _)| e)
}

/// Normalize to a q-connected partial orientation by edge pivots and cut
/// reversals. Requires a sourceless input, q as the unique source, or a
/// full orientation.
pub fn to_q_connected(
    g: &Multigraph,
    o: &PartialOrientation,
    q: VertexId,
) -> Result<(PartialOrientation, MoveCertificate)> {
    to_q_connected_with(g, o, q, &Budget::default())
}

/// `to_q_connected` under a caller-supplied budget.
pub fn to_q_connected_with(
    g: &Multigraph,
    o: &PartialOrientation,
    q: VertexId,
    budget: &Budget,
) -> Result<(PartialOrientation, MoveCertificate)> {
    let src = sources(g, o);
    let full = o.oriented_count() == g.edge_count();
    let ok = full || src.is_empty() || (src.len() == 1 && src[0] == q);
    if !ok {
        return Err(Error::PreconditionViolated {
            kind: "to_q_connected",
            detail: "input must be full, sourceless, or have q as its unique source".into(),
        });
    }
    let mut session = Session::new(g, o.clone());
    loop {
        budget.check(session.steps())?;
        let reach = reachable(g, &session.current, &[q]);
        if reach.len() == g.vertex_count() {
            break;
        }
        let mut in_reach = vec![false; g.vertex_count()];
        for &v in &reach {
            in_reach[v.0] = true;
        }
        // Pivot at a boundary-of-complement vertex: orient an unoriented cut
        // edge toward it while unorienting an incoming edge from inside the
        // complement.
        let pivot = g.lex_vertices().iter().copied().find_map(|v| {
            if in_reach[v.0] {
                return None;
            }
            let un = g
                .incident(v)
                .iter()
                .find(|&&(e, u)| in_reach[u.0] && !session.current.is_oriented(e))
                .map(|&(e, _)| e)?;
            let inc = g
                .incident(v)
                .iter()
                .find(|&&(e, u)| !in_reach[u.0] && session.current.head(g, e) == Some(v))
                .map(|&(e, _)| e)?;
            Some((inc, un, v))
        });
        if let Some((incoming, unoriented, pivot)) = pivot {
            session.apply(Move::EdgePivot {
                incoming,
                unoriented,
                pivot,
            })?;
            continue;
        }
        // The cut is saturated toward the reachable side; reverse it.
        let side: Vec<VertexId> = g.vertices().filter(|v| in_reach[v.0]).collect();
        session
            .apply(Move::CutReversal { side })
            .expect("unreachable boundary leaves a saturated cut");
    }
    debug_assert!(is_q_connected(g, &session.current, q));
    Ok(session.finish())
}

/// Equivalence in the generalized cycle-cocycle reversal system, decided
/// through linear equivalence of the associated divisors.
pub fn equivalent(
    g: &Multigraph,
    o1: &PartialOrientation,
    o2: &PartialOrientation,
) -> Result<bool> {
    if !o1.same_graph(g) || !o2.same_graph(g) {
        return Err(Error::GraphMismatch);
    }
    Ok(linearly_equivalent(
        g,
        &indegree_divisor(g, o1),
        &indegree_divisor(g, o2),
    ))
}

/// Rank of D_O together with a move certificate that reaches an acyclic
/// orientation using exactly rank + 1 directed path reversals (plus pivots
/// and cut reversals, which do not change the class distance).
pub fn rank_via_path_reversals(g: &Multigraph, o: &PartialOrientation) -> (i64, MoveCertificate) {
    rank_via_path_reversals_with(g, o, &Budget::default()).expect("default budget suffices")
}

/// `rank_via_path_reversals` under a caller-supplied budget.
pub fn rank_via_path_reversals_with(
    g: &Multigraph,
    o: &PartialOrientation,
    budget: &Budget,
) -> Result<(i64, MoveCertificate)> {
    let d_o = indegree_divisor(g, o);
    let cert = rank(g, &d_o);
    let r = cert.rank;
    if r == -1 {
        let res = unfurl_with(g, o, budget)?;
        assert_eq!(res.outcome, Outcome::Acyclic, "rank -1 classes contain acyclics");
        return Ok((-1, res.certificate));
    }

    let (positives, negatives) = reversal_schedule(g, &d_o, &cert, budget)?;

    let mut session = Session::new(g, o.clone());
    for (p, q) in positives.iter().zip(&negatives) {
        // Normalize: unfurl to a sourceless representative, then make it
        // q-connected so a directed path q -> p exists.
        let res = unfurl_with(g, &session.current, budget)?;
        debug_assert_eq!(res.outcome, Outcome::Sourceless);
        for m in res.certificate.moves {
            session.apply(m).expect("unfurl moves replay");
        }
        let (_, qcert) = to_q_connected_with(g, &session.current, *q, budget)?;
        for m in qcert.moves {
            session.apply(m).expect("q-connected moves replay");
        }
        let path = shortest_path_to(g, &session.current, &[*q], |v| v == *p)
            .expect("q-connected orientation reaches p");
        debug_assert!(!path.is_empty());
        session
            .apply(Move::PathReversal { edges: path })
            .expect("BFS path is directed");
    }
    // The remaining class has rank -1; finish with an unfurl to an acyclic
    // representative.
    let res = unfurl_with(g, &session.current, budget)?;
    assert_eq!(res.outcome, Outcome::Acyclic);
    for m in res.certificate.moves {
        session.apply(m).expect("unfurl moves replay");
    }
    let (final_o, certificate) = session.finish();
    debug_assert!(classify(g, &final_o).acyclic);
    Ok((r, certificate))
}

/// Decompose D_O - nu = sum (p_i) - (q_i) with r + 1 terms, where nu is a
/// rank -1 divisor of the same degree minimizing deg^+(D_O - nu). The
/// positive chips come from the rank certificate's losing removal; the
/// negative chips from a rank -1 extension of D_O minus that removal.
fn reversal_schedule(
    g: &Multigraph,
    d_o: &Divisor,
    cert: &RankCertificate,
    budget: &Budget,
) -> Result<(Vec<VertexId>, Vec<VertexId>)> {
    let r = cert.rank;
    let e1 = &cert.losing_removal;
    debug_assert_eq!(e1.degree(), r + 1);
    let d_prime = d_o.minus(e1);

    // Find an acyclic partial orientation dominating a representative of
    // d_prime's class.
    let (dominated, acyclic) = match construct_orientation_with(g, &d_prime, budget)? {
        Construction::Realized { orientation, .. } => {
            let res = unfurl_with(g, &orientation, budget)?;
            assert_eq!(res.outcome, Outcome::Acyclic, "rank -1 divisor unfurls acyclic");
            (indegree_divisor(g, &res.orientation), res.orientation)
        }
        Construction::Obstructed {
            d_prime: dominated,
            orientation,
            ..
        } => (dominated, orientation),
    };

    // Extend to a full acyclic orientation by a linear extension: repeatedly
    // orient unoriented edges from the reachable order.
    let full = extend_acyclic(g, &acyclic);
    let nu_top = indegree_divisor(g, &full);
    debug_assert_eq!(nu_top.degree(), g.genus() - 1);

    // Pull the domination back to d_prime itself.
    let nu_for_dprime = nu_top.minus(&dominated).plus(&d_prime);
    let extension = nu_for_dprime.minus(&d_prime);
    debug_assert!(extension.is_effective());

    // Keep only r + 1 extension chips, taken in lex vertex order.
    let mut quota = r + 1;
    let mut e2 = Divisor::zeros(g);
    for &v in g.lex_vertices() {
        let take = extension.get(v).min(quota);
        if take > 0 {
            e2.add_chips(v, take);
            quota -= take;
        }
    }
    assert_eq!(quota, 0, "extension must cover r + 1 chips");

    // f = e1 - e2 has disjoint supports by minimality of the losing removal.
    let mut positives = Vec::new();
    let mut negatives = Vec::new();
    for &v in g.lex_vertices() {
        debug_assert!(
            e1.get(v) == 0 || e2.get(v) == 0,
            "losing removal and extension supports must be disjoint"
        );
        for _ in 0..e1.get(v) {
            positives.push(v);
        }
        for _ in 0..e2.get(v) {
            negatives.push(v);
        }
    }
    debug_assert_eq!(positives.len() as i64, r + 1);
    debug_assert_eq!(negatives.len() as i64, r + 1);
    Ok((positives, negatives))
}

/// Greedily extend an acyclic partial orientation to a full acyclic
/// orientation along a linear extension (Kahn order, lex tie-break).
pub(crate) fn extend_acyclic(g: &Multigraph, o: &PartialOrientation) -> PartialOrientation {
    let n = g.vertex_count();
    let mut indeg: Vec<usize> = (0..n).map(|i| o.indegree(g, VertexId(i))).collect();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let v = g
            .lex_vertices()
            .iter()
            .copied()
            .find(|&v| !placed[v.0] && indeg[v.0] == 0)
            .expect("acyclic orientation has a linear extension");
        placed[v.0] = true;
        order.push(v);
        for &(e, u) in g.incident(v) {
            if o.tail(g, e) == Some(v) && !placed[u.0] {
                indeg[u.0] -= 1;
            }
        }
    }
    let mut posn = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        posn[v.0] = i;
    }
    let mut out = o.clone();
    for e in g.edges() {
        if !o.is_oriented(e) {
            let (a, b) = g.endpoints(e);
            let head = if posn[a.0] < posn[b.0] { b } else { a };
            out.orient_toward(g, e, head);
        }
    }
    debug_assert!(classify(g, &out).acyclic);
    debug_assert!(indegree_divisor(g, &out).dominates(&indegree_divisor(g, o)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orientation::{replay, EdgeState};

    fn c3() -> Multigraph {
        Multigraph::parse("a b\nb c\nc a").unwrap()
    }

    fn b3() -> Multigraph {
        Multigraph::parse("u v\nu v\nu v").unwrap()
    }

    /// Triangle b-c-d with a stalk a-b.
    fn tadpole() -> Multigraph {
        Multigraph::parse("a b\nb c\nc d\nd b").unwrap()
    }

    fn div(g: &Multigraph, v: &[i64]) -> Divisor {
        Divisor::from_values(g, v.to_vec())
    }

    #[test]
    fn oriented_dhar_acyclic_input_is_untouched() {
        let g = c3();
        let o = PartialOrientation::parse(&g, "0 >\n1 >\n2 <").unwrap();
        let res = oriented_dhar(&g, &o);
        assert_eq!(res.outcome, Outcome::Acyclic);
        assert!(res.certificate.moves.is_empty());
        assert_eq!(res.orientation, o);
    }

    #[test]
    fn oriented_dhar_sourceless_locks_with_empty_x() {
        let g = c3();
        let o = PartialOrientation::all_forward(&g);
        let res = oriented_dhar(&g, &o);
        assert_eq!(res.outcome, Outcome::CycleLocked { locked: vec![] });
        assert!(res.certificate.moves.is_empty());
    }

    #[test]
    fn oriented_dhar_tadpole_locks_at_stalk() {
        let g = tadpole();
        let o = PartialOrientation::all_forward(&g); // a->b, b->c, c->d, d->b
        let res = oriented_dhar(&g, &o);
        let a = g.vertex("a").unwrap();
        assert_eq!(res.outcome, Outcome::CycleLocked { locked: vec![a] });
        // The divisor never changes under pivots.
        assert_eq!(
            indegree_divisor(&g, &res.orientation),
            indegree_divisor(&g, &o)
        );
        assert_eq!(replay(&g, &res.certificate, &o).unwrap(), res.orientation);
    }

    #[test]
    fn unfurl_tadpole_turns_sourceless() {
        let g = tadpole();
        let o = PartialOrientation::all_forward(&g);
        let res = unfurl(&g, &o);
        assert_eq!(res.outcome, Outcome::Sourceless);
        assert_eq!(
            indegree_divisor(&g, &res.orientation).values(),
            &[0, 0, 0, 0]
        );
        assert_eq!(replay(&g, &res.certificate, &o).unwrap(), res.orientation);
    }

    #[test]
    fn unfurl_trivial_cases() {
        let g = c3();
        let acyc = PartialOrientation::parse(&g, "0 >\n1 >\n2 <").unwrap();
        assert_eq!(unfurl(&g, &acyc).outcome, Outcome::Acyclic);
        let cyc = PartialOrientation::all_forward(&g);
        let res = unfurl(&g, &cyc);
        assert_eq!(res.outcome, Outcome::Sourceless);
        assert!(res.certificate.moves.is_empty());
    }

    #[test]
    fn modified_unfurl_preconditions() {
        let g = c3();
        let a = g.vertex("a").unwrap();
        let cyc = PartialOrientation::all_forward(&g);
        // a is not a source in the cyclic orientation.
        assert!(matches!(
            modified_unfurl(&g, &cyc, &[a]),
            Err(Error::PreconditionViolated { .. })
        ));
        // Disconnected S on a path graph.
        let path = Multigraph::parse("a b\nb c").unwrap();
        let o = PartialOrientation::empty(&path);
        let (pa, pc) = (path.vertex("a").unwrap(), path.vertex("c").unwrap());
        assert!(matches!(
            modified_unfurl(&path, &o, &[pa, pc]),
            Err(Error::PreconditionViolated { .. })
        ));
    }

    #[test]
    fn modified_unfurl_one_move_edge_into_s() {
        let g = Multigraph::parse("a b").unwrap();
        let a = g.vertex("a").unwrap();
        let o = PartialOrientation::parse(&g, "0 >").unwrap(); // a->b, a is a source
        let res = modified_unfurl(&g, &o, &[a]).unwrap();
        assert!(matches!(res.outcome, Outcome::EdgeIntoS { .. }));
        assert_eq!(res.certificate.moves.len(), 1);
        assert_eq!(replay(&g, &res.certificate, &o).unwrap(), res.orientation);
    }

    #[test]
    fn modified_unfurl_terminates_on_c3() {
        let g = c3();
        let a = g.vertex("a").unwrap();
        let o = PartialOrientation::parse(&g, "1 >").unwrap(); // only b->c
        let res = modified_unfurl(&g, &o, &[a]).unwrap();
        match res.outcome {
            Outcome::EdgeIntoS { edge } => {
                assert_eq!(res.orientation.head(&g, edge), Some(a));
            }
            Outcome::Acyclic => {
                assert!(classify(&g, &res.orientation).acyclic);
            }
            other => panic!("unexpected outcome {other:?}"),
        }
        assert_eq!(replay(&g, &res.certificate, &o).unwrap(), res.orientation);
    }

    #[test]
    fn construct_realizes_zero_on_c3() {
        let g = c3();
        let d = div(&g, &[0, 0, 0]);
        match construct_orientation(&g, &d).unwrap() {
            Construction::Realized { orientation, certificate } => {
                assert!(linearly_equivalent(
                    &g,
                    &indegree_divisor(&g, &orientation),
                    &d
                ));
                let empty = PartialOrientation::empty(&g);
                assert_eq!(replay(&g, &certificate, &empty).unwrap(), orientation);
            }
            other => panic!("expected Realized, got {other:?}"),
        }
    }

    #[test]
    fn construct_empty_orientation_case() {
        let g = b3();
        let d = div(&g, &[-1, -1]);
        match construct_orientation(&g, &d).unwrap() {
            Construction::Realized { orientation, certificate } => {
                assert_eq!(orientation, PartialOrientation::empty(&g));
                assert!(certificate.moves.is_empty());
            }
            other => panic!("expected Realized, got {other:?}"),
        }
    }

    #[test]
    fn construct_case3_divisor() {
        let g = c3();
        let d = div(&g, &[-2, 0, 1]);
        // rank(D + 1) >= 0, so this must realize.
        assert!(crate::rank::rank(&g, &d.plus(&Divisor::constant(&g, 1))).rank >= 0);
        match construct_orientation(&g, &d).unwrap() {
            Construction::Realized { orientation, .. } => {
                assert!(linearly_equivalent(
                    &g,
                    &indegree_divisor(&g, &orientation),
                    &d
                ));
            }
            other => panic!("expected Realized, got {other:?}"),
        }
    }

    #[test]
    fn construct_obstructed_divisor() {
        let g = c3();
        let d = div(&g, &[-2, -1, 0]);
        assert_eq!(crate::rank::rank(&g, &d.plus(&Divisor::constant(&g, 1))).rank, -1);
        match construct_orientation(&g, &d).unwrap() {
            Construction::Obstructed {
                d_prime,
                orientation,
                certificate,
            } => {
                assert!(linearly_equivalent(&g, &d_prime, &d));
                assert!(classify(&g, &orientation).acyclic);
                assert!(indegree_divisor(&g, &orientation).strictly_dominates(&d_prime));
                let empty = PartialOrientation::empty(&g);
                assert_eq!(replay(&g, &certificate, &empty).unwrap(), orientation);
            }
            other => panic!("expected Obstructed, got {other:?}"),
        }
    }

    #[test]
    fn construct_rejects_high_degree() {
        let g = c3();
        assert!(matches!(
            construct_orientation(&g, &div(&g, &[1, 0, 0])),
            Err(Error::DegreeTooHigh { .. })
        ));
    }

    #[test]
    fn q_connected_normalization() {
        let g = c3();
        let a = g.vertex("a").unwrap();
        let cyc = PartialOrientation::all_forward(&g);
        let (o, cert) = to_q_connected(&g, &cyc, a).unwrap();
        assert_eq!(o, cyc);
        assert!(cert.moves.is_empty());

        // Anticyclic is also a directed cycle, hence a-connected.
        let anti = PartialOrientation::parse(&g, "0 <\n1 <\n2 <").unwrap();
        let (o, cert) = to_q_connected(&g, &anti, a).unwrap();
        assert_eq!(o, anti);
        assert!(cert.moves.is_empty());
    }

    #[test]
    fn q_connected_tadpole_single_cut() {
        let g = tadpole();
        let a = g.vertex("a").unwrap();
        // b->a, b->c, c->d, d->b
        let o = PartialOrientation::parse(&g, "0 <\n1 >\n2 >\n3 >").unwrap();
        let (out, cert) = to_q_connected(&g, &o, a).unwrap();
        assert!(is_q_connected(&g, &out, a));
        assert_eq!(cert.moves.len(), 1);
        assert!(matches!(cert.moves[0], Move::CutReversal { .. }));
    }

    #[test]
    fn q_connected_precondition() {
        let g = tadpole();
        let d_vertex = g.vertex("d").unwrap();
        // Two sources (a and c): neither full nor unique-source.
        let o = PartialOrientation::parse(&g, "0 >\n2 >").unwrap();
        assert!(matches!(
            to_q_connected(&g, &o, d_vertex),
            Err(Error::PreconditionViolated { .. })
        ));
    }

    #[test]
    fn equivalence_spec_examples() {
        let g = c3();
        let cyc = PartialOrientation::all_forward(&g);
        let anti = PartialOrientation::parse(&g, "0 <\n1 <\n2 <").unwrap();
        assert!(equivalent(&g, &cyc, &anti).unwrap());
        let acyc = PartialOrientation::parse(&g, "0 >\n1 >\n2 <").unwrap();
        assert!(!equivalent(&g, &cyc, &acyc).unwrap());
        assert!(equivalent(&g, &cyc, &cyc).unwrap());

        let other = b3();
        let o2 = PartialOrientation::empty(&other);
        assert!(matches!(equivalent(&g, &cyc, &o2), Err(Error::GraphMismatch)));
    }

    fn count_path_reversals(cert: &MoveCertificate) -> usize {
        cert.moves
            .iter()
            .filter(|m| matches!(m, Move::PathReversal { .. }))
            .count()
    }

    #[test]
    fn rank_via_reversals_c3_cycle() {
        let g = c3();
        let cyc = PartialOrientation::all_forward(&g);
        let (r, cert) = rank_via_path_reversals(&g, &cyc);
        assert_eq!(r, 0);
        assert_eq!(count_path_reversals(&cert), 1);
        let final_o = replay(&g, &cert, &cyc).unwrap();
        assert!(classify(&g, &final_o).acyclic);
    }

    #[test]
    fn rank_via_reversals_acyclic() {
        let g = c3();
        let acyc = PartialOrientation::parse(&g, "0 >\n1 >\n2 <").unwrap();
        let (r, cert) = rank_via_path_reversals(&g, &acyc);
        assert_eq!(r, -1);
        assert_eq!(count_path_reversals(&cert), 0);
    }

    #[test]
    fn rank_via_reversals_b3() {
        let g = b3();
        // Two edges u->v, one v->u: D_O = (0, 1).
        let o = PartialOrientation::parse(&g, "0 >\n1 >\n2 <").unwrap();
        assert_eq!(indegree_divisor(&g, &o).values(), &[0, 1]);
        let (r, cert) = rank_via_path_reversals(&g, &o);
        assert_eq!(r, crate::rank::rank(&g, &indegree_divisor(&g, &o)).rank);
        assert_eq!(count_path_reversals(&cert) as i64, r + 1);
        let final_o = replay(&g, &cert, &o).unwrap();
        assert!(classify(&g, &final_o).acyclic);
    }

    #[test]
    fn rank_via_reversals_matches_rank_everywhere_small() {
        let g = c3();
        // All 27 partial orientations.
        for code in 0..27u32 {
            let states: Vec<EdgeState> = (0..3)
                .map(|i| match (code / 3u32.pow(i)) % 3 {
                    0 => EdgeState::Unoriented,
                    1 => EdgeState::TowardFirst,
                    _ => EdgeState::TowardSecond,
                })
                .collect();
            let o = PartialOrientation::from_states(&g, states);
            let d = indegree_divisor(&g, &o);
            let (r, cert) = rank_via_path_reversals(&g, &o);
            assert_eq!(r, crate::rank::rank(&g, &d).rank);
            assert_eq!(count_path_reversals(&cert) as i64, r + 1);
            let final_o = replay(&g, &cert, &o).unwrap();
            assert!(classify(&g, &final_o).acyclic);
        }
    }
}

#[cfg(test)]
mod budget_tests {
    use super::*;
    use std::sync::atomic::{AtomicBool, Ordering};
    use std::sync::Arc;

    #[test]
    fn exhausted_step_budget_interrupts() {
        let g = Multigraph::parse("a b\nb c\nc d\nd b").unwrap();
        let o = PartialOrientation::all_forward(&g);
        let tiny = Budget::with_max_steps(0);
        assert!(matches!(
            unfurl_with(&g, &o, &tiny),
            Err(Error::Interrupted(_))
        ));
    }

    #[test]
    fn cancellation_flag_interrupts() {
        let g = Multigraph::parse("a b\nb c\nc d\nd b").unwrap();
        let o = PartialOrientation::all_forward(&g);
        let flag = Arc::new(AtomicBool::new(true));
        let budget = Budget::default().cancelled_by(flag.clone());
        assert!(matches!(
            unfurl_with(&g, &o, &budget),
            Err(Error::Interrupted(_))
        ));
        flag.store(false, Ordering::Relaxed);
        assert!(unfurl_with(&g, &o, &budget).is_ok());
    }
}

#[cfg(test)]
mod certificate_composition_tests {
    use super::*;
    use crate::caps::Caps;
    use crate::oracle::enumerate_partial_orientations;

    #[test]
    fn oriented_dhar_emits_only_pivots() {
        let g = Multigraph::parse("a b\nb c\nc d\nd b").unwrap();
        for o in enumerate_partial_orientations(&g, &Caps::default()).unwrap() {
            let res = oriented_dhar(&g, &o);
            assert!(res
                .certificate
                .moves
                .iter()
                .all(|m| matches!(m, Move::EdgePivot { .. })));
        }
    }

    #[test]
    fn unfurl_emits_only_pivots_and_cut_reversals() {
        let g = Multigraph::parse("a b\nb c\nc d\nd b").unwrap();
        for o in enumerate_partial_orientations(&g, &Caps::default()).unwrap() {
            let res = unfurl(&g, &o);
            assert!(res.certificate.moves.iter().all(|m| matches!(
                m,
                Move::EdgePivot { .. } | Move::CutReversal { .. }
            )));
        }
    }
}
