//! Brute-force ground truth on tiny instances.
//!
//! Nothing here calls the production search code: linear equivalence is
//! decided by an exact integer solve against the reduced Laplacian, rank by
//! exhaustive enumeration of effective divisors, acyclicity by a local
//! check. Only the `Multigraph`, `Divisor`, and `PartialOrientation` value
//! types are shared. Caps are enforced strictly; exceeding one is an error.

use crate::caps::Caps;
use crate::divisor::Divisor;
use crate::error::{Error, Result};
use crate::graph::{bareiss_det, EdgeId, Multigraph, VertexId};
use crate::orientation::{apply_move, EdgeState, Move, PartialOrientation};

/// All 3^|E| partial orientations in lexicographic edge-state order
/// (unoriented < toward-first < toward-second, last edge fastest).
pub fn enumerate_partial_orientations<'g>(
    g: &'g Multigraph,
    caps: &Caps,
) -> Result<impl Iterator<Item = PartialOrientation> + 'g> {
    let m = g.edge_count();
    if m > caps.partial_edges {
        return Err(Error::TooLarge(format!(
            "3^{m} partial orientations; cap is 3^{}",
            caps.partial_edges
        )));
    }
    let total = 3u64.pow(m as u32);
    Ok((0..total).map(move |code| {
        let mut c = code;
        let mut states = vec![EdgeState::Unoriented; m];
        for i in (0..m).rev() {
            states[i] = match c % 3 {
                0 => EdgeState::Unoriented,
                1 => EdgeState::TowardFirst,
                _ => EdgeState::TowardSecond,
            };
            c /= 3;
        }
        PartialOrientation::from_states(g, states)
    }))
}

/// All 2^|E| full orientations in lexicographic order.
pub fn enumerate_full_orientations<'g>(
    g: &'g Multigraph,
    caps: &Caps,
) -> Result<impl Iterator<Item = PartialOrientation> + 'g> {
    let m = g.edge_count();
    if m > caps.partial_edges {
        return Err(Error::TooLarge(format!(
            "2^{m} full orientations; cap is 2^{}",
            caps.partial_edges
        )));
    }
    let total = 1u64 << m;
    Ok((0..total).map(move |code| {
        let states = (0..m)
            .map(|i| {
                if (code >> (m - 1 - i)) & 1 == 0 {
                    EdgeState::TowardFirst
                } else {
                    EdgeState::TowardSecond
                }
            })
            .collect();
        PartialOrientation::from_states(g, states)
    }))
}

/// Whether `diff` lies in the integer span of the Laplacian columns,
/// decided by an exact Cramer solve against the reduced Laplacian.
pub fn in_lattice(g: &Multigraph, diff: &Divisor) -> bool {
    if diff.degree() != 0 {
        return false;
    }
    let n = g.vertex_count();
    if n == 1 {
        return true;
    }
    // Reduced Laplacian with vertex 0 deleted.
    let mut a = vec![vec![0i128; n - 1]; n - 1];
    for i in 1..n {
        a[i - 1][i - 1] = g.degree(VertexId(i)) as i128;
    }
    for e in g.edges() {
        let (u, v) = g.endpoints(e);
        if u.0 > 0 && v.0 > 0 {
            a[u.0 - 1][v.0 - 1] -= 1;
            a[v.0 - 1][u.0 - 1] -= 1;
        }
    }
    let det = bareiss_det(a.clone());
    debug_assert!(det != 0, "connected graphs have nonzero tree count");
    let b: Vec<i128> = (1..n).map(|i| diff.values()[i] as i128).collect();
    // Cramer: x_i integral iff det divides each column-replaced determinant.
    for col in 0..n - 1 {
        let mut m = a.clone();
        for (row, item) in m.iter_mut().enumerate() {
            item[col] = b[row];
        }
        if bareiss_det(m) % det != 0 {
            return false;
        }
    }
    true
}

/// Independent linear-equivalence test.
pub fn equivalent_divisors(g: &Multigraph, d1: &Divisor, d2: &Divisor) -> bool {
    d1.degree() == d2.degree() && in_lattice(g, &d1.minus(d2))
}

/// All effective divisors of the given degree, lexicographic by dense
/// vertex id.
pub fn effective_divisors(g: &Multigraph, degree: i64) -> Vec<Divisor> {
    let mut out = Vec::new();
    if degree < 0 {
        return out;
    }
    let n = g.vertex_count();
    let mut values = vec![0i64; n];
    fn go(values: &mut Vec<i64>, idx: usize, left: i64, out: &mut Vec<Vec<i64>>) {
        if idx + 1 == values.len() {
            values[idx] = left;
            out.push(values.clone());
            return;
        }
        for take in 0..=left {
            values[idx] = take;
            go(values, idx + 1, left - take, out);
        }
    }
    let mut raw = Vec::new();
    go(&mut values, 0, degree, &mut raw);
    for v in raw {
        out.push(Divisor::from_values(g, v));
    }
    out
}

/// All divisors with per-vertex bounds, low to high, lexicographic.
pub fn divisors_in_box(g: &Multigraph, lo: &[i64], hi: &[i64]) -> Vec<Divisor> {
    let n = g.vertex_count();
    assert_eq!(lo.len(), n);
    assert_eq!(hi.len(), n);
    let mut out = Vec::new();
    let mut values = lo.to_vec();
    'all: loop {
        out.push(Divisor::from_values(g, values.clone()));
        let mut i = n;
        loop {
            if i == 0 {
                break 'all;
            }
            i -= 1;
            values[i] += 1;
            if values[i] <= hi[i] {
                break;
            }
            values[i] = lo[i];
        }
    }
    out
}

/// Whether `d` is linearly equivalent to an effective divisor, by full
/// enumeration of candidates plus the lattice test.
fn brute_effective_equivalent(g: &Multigraph, d: &Divisor) -> bool {
    let deg = d.degree();
    if deg < 0 {
        return false;
    }
    effective_divisors(g, deg)
        .iter()
        .any(|e| in_lattice(g, &d.minus(e)))
}

/// Exhaustive Baker-Norine rank, fully independent of the production
/// search: try all effective removals of increasing degree.
pub fn brute_rank(g: &Multigraph, d: &Divisor, caps: &Caps) -> Result<i64> {
    if g.vertex_count() > caps.rank_vertices {
        return Err(Error::TooLarge(format!(
            "brute rank over {} vertices; cap is {}",
            g.vertex_count(),
            caps.rank_vertices
        )));
    }
    if d.degree().abs() > caps.rank_degree {
        return Err(Error::TooLarge(format!(
            "brute rank at degree {}; cap is {}",
            d.degree(),
            caps.rank_degree
        )));
    }
    if d.degree() < 0 {
        return Ok(-1);
    }
    for t in 0..=(d.degree() + 1) {
        let all_winnable = effective_divisors(g, t)
            .iter()
            .all(|e| brute_effective_equivalent(g, &d.minus(e)));
        if !all_winnable {
            return Ok(t - 1);
        }
    }
    unreachable!("degree+1 removals always defeat the divisor");
}

/// One equivalence class of orientations keyed by its lexicographically
/// least member divisor.
#[derive(Debug, Clone)]
pub struct ClassEntry {
    pub representative: Divisor,
    pub members: Vec<PartialOrientation>,
}

/// Equivalence classes of all full orientations; the class count equals the
/// number of spanning trees.
#[derive(Debug, Clone)]
pub struct ClassTable {
    pub classes: Vec<ClassEntry>,
}

impl ClassTable {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }
}

fn bucket_by_class(
    g: &Multigraph,
    items: impl Iterator<Item = PartialOrientation>,
) -> Vec<ClassEntry> {
    let mut classes: Vec<(Divisor, ClassEntry)> = Vec::new();
    for o in items {
        let d = crate::orientation::indegree_divisor(g, &o);
        match classes
            .iter_mut()
            .find(|(probe, _)| equivalent_divisors(g, probe, &d))
        {
            Some((_, entry)) => {
                if d.values() < entry.representative.values() {
                    entry.representative = d.clone();
                }
                entry.members.push(o);
            }
            None => classes.push((
                d.clone(),
                ClassEntry {
                    representative: d,
                    members: vec![o],
                },
            )),
        }
    }
    classes.into_iter().map(|(_, e)| e).collect()
}

/// Bucket all 2^|E| full orientations into equivalence classes.
pub fn class_table_full(g: &Multigraph, caps: &Caps) -> Result<ClassTable> {
    let m = g.edge_count();
    if m > caps.class_edges {
        return Err(Error::TooLarge(format!(
            "class table over 2^{m} orientations; cap is 2^{}",
            caps.class_edges
        )));
    }
    let relaxed = Caps {
        partial_edges: caps.class_edges.max(caps.partial_edges),
        ..*caps
    };
    let items = enumerate_full_orientations(g, &relaxed)?;
    Ok(ClassTable {
        classes: bucket_by_class(g, items),
    })
}

/// Oracle-local acyclicity: repeatedly strip vertices with no oriented
/// in-edges.
fn is_acyclic(g: &Multigraph, o: &PartialOrientation) -> bool {
    let n = g.vertex_count();
    let mut alive = vec![true; n];
    loop {
        let strip: Vec<usize> = (0..n)
            .filter(|&v| {
                alive[v]
                    && !g.incident(VertexId(v)).iter().any(|&(e, u)| {
                        alive[u.0] && o.head(g, e) == Some(VertexId(v)) && u.0 != v
                    })
            })
            .collect();
        if strip.is_empty() {
            break;
        }
        for v in strip {
            alive[v] = false;
        }
    }
    alive.iter().all(|&a| !a)
}

/// All directed simple paths (as edge lists, length >= 1) in `o`.
fn directed_simple_paths(g: &Multigraph, o: &PartialOrientation) -> Vec<Vec<EdgeId>> {
    let mut out = Vec::new();
    fn extend(
        g: &Multigraph,
        o: &PartialOrientation,
        visited: &mut Vec<bool>,
        at: VertexId,
        path: &mut Vec<EdgeId>,
        out: &mut Vec<Vec<EdgeId>>,
    ) {
        for &(e, u) in g.incident(at) {
            if o.tail(g, e) == Some(at) && !visited[u.0] {
                path.push(e);
                out.push(path.clone());
                visited[u.0] = true;
                extend(g, o, visited, u, path, out);
                visited[u.0] = false;
                path.pop();
            }
        }
    }
    for v in g.vertices() {
        let mut visited = vec![false; g.vertex_count()];
        visited[v.0] = true;
        let mut path = Vec::new();
        extend(g, o, &mut visited, v, &mut path, &mut out);
    }
    out
}

/// Reverse a directed path given by edges, without the production move
/// machinery.
fn flip_path(g: &Multigraph, o: &PartialOrientation, path: &[EdgeId]) -> PartialOrientation {
    let mut states = o.states().to_vec();
    for &e in path {
        states[e.0] = match states[e.0] {
            EdgeState::TowardFirst => EdgeState::TowardSecond,
            EdgeState::TowardSecond => EdgeState::TowardFirst,
            EdgeState::Unoriented => unreachable!("directed path edges are oriented"),
        };
    }
    PartialOrientation::from_states(g, states)
}

/// Literal BFS on the class graph of fixed divisor degree: nodes are
/// equivalence classes of partial orientations, edges are single directed
/// path reversals between any members. Returns the distance from `o`'s
/// class to
/// the acyclic-containing classes.
pub fn path_reversal_distance(g: &Multigraph, o: &PartialOrientation, caps: &Caps) -> Result<i64> {
    let m = g.edge_count();
    if m > caps.distance_edges {
        return Err(Error::TooLarge(format!(
            "distance BFS over 3^{m} orientations; cap is 3^{}",
            caps.distance_edges
        )));
    }
    let k = o.oriented_count();
    let relaxed = Caps {
        partial_edges: caps.distance_edges.max(caps.partial_edges),
        ..*caps
    };
    let all: Vec<PartialOrientation> = enumerate_partial_orientations(g, &relaxed)?
        .filter(|cand| cand.oriented_count() == k)
        .collect();

    // Group into classes.
    let entries = bucket_by_class(g, all.iter().cloned());
    let class_of = |cand: &PartialOrientation| -> usize {
        let d = crate::orientation::indegree_divisor(g, cand);
        entries
            .iter()
            .position(|e| equivalent_divisors(g, &e.representative, &d))
            .expect("every orientation belongs to a class")
    };

    // Class adjacency via single path reversals from every member.
    let nclasses = entries.len();
    let mut adj = vec![std::collections::BTreeSet::new(); nclasses];
    for (ci, entry) in entries.iter().enumerate() {
        for member in &entry.members {
            for path in directed_simple_paths(g, member) {
                let flipped = flip_path(g, member, &path);
                let cj = class_of(&flipped);
                if ci != cj {
                    adj[ci].insert(cj);
                    adj[cj].insert(ci);
                }
            }
        }
    }

    let acyclic_classes: Vec<usize> = entries
        .iter()
        .enumerate()
        .filter(|(_, e)| e.members.iter().any(|m| is_acyclic(g, m)))
        .map(|(i, _)| i)
        .collect();

    let start = class_of(o);
    let mut dist = vec![i64::MAX; nclasses];
    let mut queue = std::collections::VecDeque::new();
    for &c in &acyclic_classes {
        dist[c] = 0;
        queue.push_back(c);
    }
    while let Some(c) = queue.pop_front() {
        for &d in &adj[c] {
            if dist[d] == i64::MAX {
                dist[d] = dist[c] + 1;
                queue.push_back(d);
            }
        }
    }
    assert!(dist[start] < i64::MAX, "every class reaches an acyclic class");
    Ok(dist[start])
}

/// Which move kinds the class BFS may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoveKinds {
    pub pivots: bool,
    pub cycles: bool,
    pub cuts: bool,
}

/// All orientations reachable from `o` under the selected move kinds, by
/// BFS with exhaustive move generation.
pub fn orientation_class(g: &Multigraph, o: &PartialOrientation, kinds: MoveKinds) -> Vec<PartialOrientation> {
    let mut seen = std::collections::BTreeSet::new();
    let key = |c: &PartialOrientation| -> Vec<u8> {
        c.states()
            .iter()
            .map(|s| match s {
                EdgeState::Unoriented => 0u8,
                EdgeState::TowardFirst => 1,
                EdgeState::TowardSecond => 2,
            })
            .collect()
    };
    let mut queue = std::collections::VecDeque::from([o.clone()]);
    seen.insert(key(o));
    let mut out = Vec::new();
    while let Some(cur) = queue.pop_front() {
        for m in available_moves(g, &cur, kinds) {
            let next = apply_move(g, &cur, &m).expect("generated moves satisfy preconditions");
            if seen.insert(key(&next)) {
                queue.push_back(next);
            }
        }
        out.push(cur);
    }
    out
}

/// Generate every legal move of the selected kinds.
fn available_moves(g: &Multigraph, o: &PartialOrientation, kinds: MoveKinds) -> Vec<Move> {
    let mut moves = Vec::new();
    if kinds.pivots {
        for v in g.vertices() {
            for &(e_in, _) in g.incident(v) {
                if o.head(g, e_in) != Some(v) {
                    continue;
                }
                for &(e_un, _) in g.incident(v) {
                    if e_un != e_in && !o.is_oriented(e_un) {
                        moves.push(Move::EdgePivot {
                            incoming: e_in,
                            unoriented: e_un,
                            pivot: v,
                        });
                    }
                }
            }
        }
    }
    if kinds.cycles {
        for cycle in directed_simple_cycles(g, o) {
            moves.push(Move::CycleReversal { edges: cycle });
        }
    }
    if kinds.cuts {
        let n = g.vertex_count();
        'mask: for mask in 1u64..((1 << n) - 1) {
            let mut any = false;
            let mut toward: Option<bool> = None;
            for e in g.edges() {
                let (a, b) = g.endpoints(e);
                let a_in = (mask >> a.0) & 1 == 1;
                let b_in = (mask >> b.0) & 1 == 1;
                if a_in == b_in {
                    continue;
                }
                any = true;
                let Some(h) = o.head(g, e) else { continue 'mask };
                let h_in = (mask >> h.0) & 1 == 1;
                match toward {
                    None => toward = Some(h_in),
                    Some(t) if t != h_in => continue 'mask,
                    _ => {}
                }
            }
            if any {
                moves.push(Move::CutReversal {
                    side: (0..n).map(VertexId).filter(|v| (mask >> v.0) & 1 == 1).collect(),
                });
            }
        }
    }
    moves
}

/// Directed simple cycles, each reported once starting from its least
/// vertex.
fn directed_simple_cycles(g: &Multigraph, o: &PartialOrientation) -> Vec<Vec<EdgeId>> {
    let mut out = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn extend(
        g: &Multigraph,
        o: &PartialOrientation,
        root: VertexId,
        at: VertexId,
        visited: &mut Vec<bool>,
        path: &mut Vec<EdgeId>,
        out: &mut Vec<Vec<EdgeId>>,
    ) {
        for &(e, u) in g.incident(at) {
            if o.tail(g, e) != Some(at) {
                continue;
            }
            if u == root && !path.is_empty() {
                // Rooting at the least cycle vertex makes each directed
                // simple cycle appear exactly once.
                let mut cycle = path.clone();
                cycle.push(e);
                out.push(cycle);
                continue;
            }
            if u.0 > root.0 && !visited[u.0] {
                visited[u.0] = true;
                path.push(e);
                extend(g, o, root, u, visited, path, out);
                path.pop();
                visited[u.0] = false;
            }
        }
    }
    for root in g.vertices() {
        let mut visited = vec![false; g.vertex_count()];
        visited[root.0] = true;
        let mut path = Vec::new();
        extend(g, o, root, root, &mut visited, &mut path, &mut out);
    }
    out
}

/// Every connected loopless multigraph with at most `max_edges` edges, as
/// labeled edge multisets over up to max_edges + 1 vertices. Includes the
/// single-vertex graph.
pub fn connected_multigraphs(max_edges: usize) -> Vec<Multigraph> {
    let mut out = vec![Multigraph::new(vec!["v0".into()], vec![]).unwrap()];
    for n in 2..=(max_edges + 1) {
        let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .collect();
        // Multisets of pairs with total size in [n-1, max_edges].
        let mut counts = vec![0usize; pairs.len()];
        fn go(
            counts: &mut Vec<usize>,
            idx: usize,
            left: usize,
            names: &[String],
            pairs: &[(usize, usize)],
            out: &mut Vec<Multigraph>,
            min_edges: usize,
        ) {
            if idx == counts.len() {
                let total: usize = counts.iter().sum();
                if total < min_edges {
                    return;
                }
                let mut edges = Vec::new();
                for (c, &(a, b)) in counts.iter().zip(pairs) {
                    for _ in 0..*c {
                        edges.push((a, b));
                    }
                }
                if let Ok(g) = Multigraph::new(names.to_vec(), edges) {
                    out.push(g);
                }
                return;
            }
            for take in 0..=left {
                counts[idx] = take;
                go(counts, idx + 1, left - take, names, pairs, out, min_edges);
            }
            counts[idx] = 0;
        }
        go(&mut counts, 0, max_edges, &names, &pairs, &mut out, n - 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orientation::indegree_divisor;
    use crate::rank::rank;
    use crate::reduce::linearly_equivalent;

    fn c3() -> Multigraph {
        Multigraph::parse("a b\nb c\nc a").unwrap()
    }

    fn b3() -> Multigraph {
        Multigraph::parse("u v\nu v\nu v").unwrap()
    }

    fn k4() -> Multigraph {
        Multigraph::parse("a b\na c\na d\nb c\nb d\nc d").unwrap()
    }

    fn div(g: &Multigraph, v: &[i64]) -> Divisor {
        Divisor::from_values(g, v.to_vec())
    }

    #[test]
    fn enumeration_counts() {
        let caps = Caps::default();
        let p2 = Multigraph::parse("a b").unwrap();
        assert_eq!(enumerate_partial_orientations(&p2, &caps).unwrap().count(), 3);
        let g = c3();
        assert_eq!(enumerate_partial_orientations(&g, &caps).unwrap().count(), 27);
        assert_eq!(enumerate_full_orientations(&g, &caps).unwrap().count(), 8);
        assert_eq!(
            enumerate_partial_orientations(&b3(), &caps).unwrap().count(),
            27
        );
        let tight = Caps {
            partial_edges: 2,
            ..caps
        };
        assert!(enumerate_partial_orientations(&g, &tight).is_err());
    }

    #[test]
    fn lattice_test_agrees_with_reduction() {
        for g in [c3(), b3(), k4()] {
            let n = g.vertex_count();
            for seed in 0..4i64.pow(n as u32) {
                let mut s = seed;
                let mut values: Vec<i64> = (0..n)
                    .map(|_| {
                        let v = s % 4 - 2;
                        s /= 4;
                        v
                    })
                    .collect();
                // Force degree zero.
                let total: i64 = values.iter().sum();
                values[n - 1] -= total;
                let d = Divisor::from_values(&g, values);
                assert_eq!(
                    in_lattice(&g, &d),
                    linearly_equivalent(&g, &d, &Divisor::zeros(&g)),
                    "{:?}",
                    d.values()
                );
            }
        }
    }

    #[test]
    fn class_tables_match_tree_counts() {
        let caps = Caps::default();
        let t = class_table_full(&c3(), &caps).unwrap();
        assert_eq!(t.class_count(), 3);
        assert_eq!(t.classes.iter().map(|c| c.members.len()).sum::<usize>(), 8);

        let t = class_table_full(&b3(), &caps).unwrap();
        assert_eq!(t.class_count(), 3);

        let t = class_table_full(&k4(), &caps).unwrap();
        assert_eq!(t.class_count(), 16);
        assert_eq!(t.classes.iter().map(|c| c.members.len()).sum::<usize>(), 64);
    }

    #[test]
    fn brute_rank_examples() {
        let caps = Caps::default();
        let g = c3();
        assert_eq!(brute_rank(&g, &div(&g, &[0, 0, 0]), &caps).unwrap(), 0);
        assert_eq!(brute_rank(&g, &div(&g, &[1, 1, 1]), &caps).unwrap(), 2);
        assert_eq!(brute_rank(&g, &div(&g, &[-1, 0, 0]), &caps).unwrap(), -1);
    }

    #[test]
    fn brute_rank_matches_production_rank() {
        let caps = Caps::default();
        for g in [c3(), b3()] {
            let n = g.vertex_count();
            for seed in 0..5i64.pow(n as u32) {
                let mut s = seed;
                let values: Vec<i64> = (0..n)
                    .map(|_| {
                        let v = s % 5 - 2;
                        s /= 5;
                        v
                    })
                    .collect();
                let d = Divisor::from_values(&g, values);
                assert_eq!(
                    brute_rank(&g, &d, &caps).unwrap(),
                    rank(&g, &d).rank,
                    "{:?}",
                    d.values()
                );
            }
        }
    }

    #[test]
    fn distance_examples() {
        let caps = Caps::default();
        let g = c3();
        let cyc = PartialOrientation::all_forward(&g);
        assert_eq!(path_reversal_distance(&g, &cyc, &caps).unwrap(), 1);
        let acyc = PartialOrientation::parse(&g, "0 >\n1 >\n2 <").unwrap();
        assert_eq!(path_reversal_distance(&g, &acyc, &caps).unwrap(), 0);

        let g = b3();
        let all_in = PartialOrientation::all_forward(&g); // three edges toward v
        let d = indegree_divisor(&g, &all_in);
        let r = brute_rank(&g, &d, &caps).unwrap();
        assert_eq!(path_reversal_distance(&g, &all_in, &caps).unwrap(), r + 1);
    }

    #[test]
    fn distance_is_rank_plus_one_everywhere_on_c3() {
        let caps = Caps::default();
        let g = c3();
        for o in enumerate_partial_orientations(&g, &caps).unwrap() {
            let d = indegree_divisor(&g, &o);
            let dist = path_reversal_distance(&g, &o, &caps).unwrap();
            assert_eq!(dist, brute_rank(&g, &d, &caps).unwrap() + 1);
        }
    }

    /// Pivot + cycle reachability coincides with equality of divisors.
    #[test]
    fn pivot_cycle_classes_are_divisor_fibers() {
        let g = b3();
        let caps = Caps::default();
        let kinds = MoveKinds {
            pivots: true,
            cycles: true,
            cuts: false,
        };
        let all: Vec<PartialOrientation> =
            enumerate_partial_orientations(&g, &caps).unwrap().collect();
        for o in &all {
            let class = orientation_class(&g, o, kinds);
            let d = indegree_divisor(&g, o);
            let fiber: Vec<&PartialOrientation> = all
                .iter()
                .filter(|c| indegree_divisor(&g, c) == d)
                .collect();
            assert_eq!(class.len(), fiber.len(), "{:?}", o.states());
        }
    }

    /// Pivots alone connect any orientation to an equal-divisor acyclic one.
    #[test]
    fn pivots_reach_acyclic_partners() {
        let g = c3();
        let caps = Caps::default();
        let kinds = MoveKinds {
            pivots: true,
            cycles: false,
            cuts: false,
        };
        for o in enumerate_partial_orientations(&g, &caps).unwrap() {
            let d = indegree_divisor(&g, &o);
            for target in enumerate_partial_orientations(&g, &caps).unwrap() {
                if indegree_divisor(&g, &target) != d || !is_acyclic(&g, &target) {
                    continue;
                }
                let class = orientation_class(&g, &o, kinds);
                assert!(class.contains(&target));
            }
        }
    }

    #[test]
    fn multigraph_harness_small_counts() {
        let graphs = connected_multigraphs(3);
        // Every graph is connected with at most three edges.
        assert!(graphs.iter().all(|g| g.edge_count() <= 3));
        // The single-vertex graph plus at least P2, B2, B3, P3, C3, stars...
        assert!(graphs.len() > 10);
        // No duplicates as labeled edge lists.
        let mut keys: Vec<String> = graphs
            .iter()
            .map(|g| {
                let edges: Vec<String> = g
                    .edges()
                    .map(|e| {
                        let (a, b) = g.endpoints(e);
                        format!("{}-{}", g.name(a), g.name(b))
                    })
                    .collect();
                format!("{}|{}", g.vertex_count(), edges.join(","))
            })
            .collect();
        keys.sort();
        let before = keys.len();
        keys.dedup();
        assert_eq!(before, keys.len());
    }
}
