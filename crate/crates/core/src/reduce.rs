//! Dhar's burning algorithm, q-reduced normal forms, and linear equivalence.

use serde::{Deserialize, Serialize};

use crate::divisor::{fire, Divisor};
use crate::graph::{Multigraph, VertexId};

/// The unique q-reduced representative together with a replayable firing
/// vector: `fire(input, firing) == divisor` and `firing[q] == 0`.
///
/// Entries of `firing` may be negative (the out-of-debt phase borrows at
/// indebted vertices); anchoring the vector at q makes it unique.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedForm {
    pub divisor: Divisor,
    pub firing: Vec<i64>,
}

/// Outcome of one run of the burning process from q.
pub(crate) struct Burn {
    /// True when the fire consumed all of V \ {q}.
    pub burnt_all: bool,
    /// The unburnt vertices (a nonempty subset of V \ {q} when not all
    /// burnt); firing it sends no vertex into debt.
    pub unburnt: Vec<VertexId>,
}

/// Run Dhar's burning process from q: start with S = V \ {q} and repeatedly
/// remove the lexicographically least v in S with outdeg_S(v) > D(v).
///
/// Requires D(v) >= 0 for v != q to be meaningful; callers check that first.
pub(crate) fn burn(g: &Multigraph, d: &Divisor, q: VertexId) -> Burn {
    let n = g.vertex_count();
    let mut in_s = vec![true; n];
    in_s[q.0] = false;
    // outdeg_S(v): edges from v to burnt vertices.
    let mut out: Vec<i64> = (0..n)
        .map(|i| {
            g.incident(VertexId(i))
                .iter()
                .filter(|&&(_, u)| u == q)
                .count() as i64
        })
        .collect();
    let mut remaining = n - 1;
    loop {
        let victim = g
            .lex_vertices()
            .iter()
            .copied()
            .find(|&v| in_s[v.0] && out[v.0] > d.get(v));
        let Some(v) = victim else { break };
        in_s[v.0] = false;
        remaining -= 1;
        for &(_, u) in g.incident(v) {
            if in_s[u.0] {
                out[u.0] += 1;
            }
        }
    }
    Burn {
        burnt_all: remaining == 0,
        unburnt: (0..n).map(VertexId).filter(|v| in_s[v.0]).collect(),
    }
}

/// Whether D is q-reduced: D(v) >= 0 off q and the burning process from q
/// consumes every vertex.
pub fn is_q_reduced(g: &Multigraph, d: &Divisor, q: VertexId) -> bool {
    if g.vertices().any(|v| v != q && d.get(v) < 0) {
        return false;
    }
    burn(g, d, q).burnt_all
}

/// Reduce D to its unique q-reduced representative.
///
/// Phase one brings every v != q out of debt by borrowing (firing {v}^c,
/// recorded as `firing[v] -= 1`); phase two repeatedly fires the unburnt set
/// from the burning process. Both phases are legal set firings, so the
/// recorded vector replays exactly: `fire(input, firing) == reduced`.
pub fn reduce(g: &Multigraph, d: &Divisor, q: VertexId) -> ReducedForm {
    let n = g.vertex_count();
    let mut cur = d.clone();
    let mut firing = vec![0i64; n];

    // Out-of-debt phase: borrow at the lexicographically least debtor.
    loop {
        let debtor = g
            .lex_vertices()
            .iter()
            .copied()
            .find(|&v| v != q && cur.get(v) < 0);
        let Some(v) = debtor else { break };
        let deg = g.degree(v) as i64;
        // Borrow enough to clear the debt in one step.
        let k = (-cur.get(v) + deg - 1) / deg;
        firing[v.0] -= k;
        cur.add_chips(v, k * deg);
        for &(_, u) in g.incident(v) {
            cur.add_chips(u, -k);
        }
    }

    // Burning phase: fire the unburnt set until the fire consumes V.
    loop {
        let b = burn(g, &cur, q);
        if b.burnt_all {
            break;
        }
        let mut f = vec![0i64; n];
        for &v in &b.unburnt {
            f[v.0] = 1;
            firing[v.0] += 1;
        }
        cur = fire(g, &cur, &f);
    }

    debug_assert_eq!(firing[q.0], 0);
    ReducedForm {
        divisor: cur,
        firing,
    }
}

/// Linear equivalence, decided through q-reduced normal forms at the
/// lexicographically least vertex.
pub fn linearly_equivalent(g: &Multigraph, d1: &Divisor, d2: &Divisor) -> bool {
    if d1.degree() != d2.degree() {
        return false;
    }
    let q = g.lex_least();
    reduce(g, d1, q).divisor == reduce(g, d2, q).divisor
}
