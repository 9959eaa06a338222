//! Divisors (chip configurations) and the Euler-characteristic functionals
//! chi and chi-bar.
//!
//! Chip counts are 64-bit with checked arithmetic; overflow is a hard error.

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::graph::{Multigraph, VertexId};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Integer chip count per vertex, indexed by dense vertex id.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Divisor {
    values: Vec<i64>,
}

fn add(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("chip count overflow")
}

fn sub(a: i64, b: i64) -> i64 {
    a.checked_sub(b).expect("chip count overflow")
}

impl Divisor {
    pub fn zeros(g: &Multigraph) -> Self {
        Divisor {
            values: vec![0; g.vertex_count()],
        }
    }

    pub fn constant(g: &Multigraph, c: i64) -> Self {
        Divisor {
            values: vec![c; g.vertex_count()],
        }
    }

    pub fn from_values(g: &Multigraph, values: Vec<i64>) -> Self {
        assert_eq!(
            values.len(),
            g.vertex_count(),
            "divisor must be defined on exactly the vertex set"
        );
        Divisor { values }
    }

    pub fn from_fn(g: &Multigraph, f: impl Fn(VertexId) -> i64) -> Self {
        Divisor {
            values: g.vertices().map(f).collect(),
        }
    }

    /// One chip at `v`.
    pub fn chip(g: &Multigraph, v: VertexId) -> Self {
        let mut d = Divisor::zeros(g);
        d.values[v.0] = 1;
        d
    }

    /// Parse the divisor format: `vertex integer` lines, `#` comments,
    /// omitted vertices default to 0. Duplicate lines are rejected.
    pub fn parse(g: &Multigraph, text: &str) -> Result<Self> {
        let mut values = vec![0i64; g.vertex_count()];
        let mut seen = vec![false; g.vertex_count()];
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != 2 {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("expected `vertex integer`, got `{line}`"),
                });
            }
            let v = g.vertex(tokens[0])?;
            let value: i64 = tokens[1].parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                msg: format!("`{}` is not an integer", tokens[1]),
            })?;
            if seen[v.0] {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("vertex `{}` listed twice", tokens[0]),
                });
            }
            seen[v.0] = true;
            values[v.0] = value;
        }
        Ok(Divisor { values })
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn get(&self, v: VertexId) -> i64 {
        self.values[v.0]
    }

    pub fn set(&mut self, v: VertexId, value: i64) {
        self.values[v.0] = value;
    }

    pub fn add_chips(&mut self, v: VertexId, k: i64) {
        self.values[v.0] = add(self.values[v.0], k);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// deg(D): the net number of chips.
    pub fn degree(&self) -> i64 {
        self.values.iter().fold(0i64, |acc, &v| add(acc, v))
    }

    /// Sum of the positive entries.
    pub fn degree_plus(&self) -> i64 {
        self.values
            .iter()
            .filter(|&&v| v > 0)
            .fold(0i64, |acc, &v| add(acc, v))
    }

    /// Absolute sum of the negative entries.
    pub fn degree_minus(&self) -> i64 {
        self.values
            .iter()
            .filter(|&&v| v < 0)
            .fold(0i64, |acc, &v| sub(acc, v))
    }

    pub fn is_effective(&self) -> bool {
        self.values.iter().all(|&v| v >= 0)
    }

    /// Pointwise comparison D >= other.
    pub fn dominates(&self, other: &Divisor) -> bool {
        self.values
            .iter()
            .zip(&other.values)
            .all(|(&a, &b)| a >= b)
    }

    /// Strict domination: >= everywhere and not equal.
    pub fn strictly_dominates(&self, other: &Divisor) -> bool {
        self.dominates(other) && self != other
    }

    pub fn plus(&self, other: &Divisor) -> Divisor {
        assert_eq!(self.values.len(), other.values.len());
        Divisor {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| add(a, b))
                .collect(),
        }
    }

    pub fn minus(&self, other: &Divisor) -> Divisor {
        assert_eq!(self.values.len(), other.values.len());
        Divisor {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| sub(a, b))
                .collect(),
        }
    }

    /// `(name, value)` pairs sorted by vertex name.
    pub fn pairs_lex(&self, g: &Multigraph) -> Vec<(String, i64)> {
        g.lex_vertices()
            .iter()
            .map(|&v| (g.name(v).to_string(), self.values[v.0]))
            .collect()
    }

    /// The `vertex value` line format, vertices sorted lexicographically.
    /// This is the bit-exact output contract for golden tests.
    pub fn canonical_lines(&self, g: &Multigraph) -> String {
        let mut out = String::new();
        for &v in g.lex_vertices() {
            out.push_str(g.name(v));
            out.push(' ');
            out.push_str(&self.values[v.0].to_string());
            out.push('\n');
        }
        out
    }
}

/// D - Laplacian * f for an arbitrary integer firing vector `f`
/// (set firing is `f = chi_A`). Degree is preserved.
pub fn fire(g: &Multigraph, d: &Divisor, f: &[i64]) -> Divisor {
    assert_eq!(f.len(), g.vertex_count());
    let mut out = d.values.to_vec();
    for e in g.edges() {
        let (a, b) = g.endpoints(e);
        let delta = sub(f[a.0], f[b.0]);
        out[a.0] = sub(out[a.0], delta);
        out[b.0] = add(out[b.0], delta);
    }
    Divisor { values: out }
}

/// Fire the vertex set given as a mask over dense vertex ids.
#[cfg(test)]
pub(crate) fn fire_set(g: &Multigraph, d: &Divisor, set: u64) -> Divisor {
    let f: Vec<i64> = (0..g.vertex_count())
        .map(|i| ((set >> i) & 1) as i64)
        .collect();
    fire(g, d, &f)
}

/// chi and chi-bar of one subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetReport {
    /// The subset, as dense vertex ids in increasing order.
    pub subset: Vec<VertexId>,
    pub chi: i64,
    pub chi_bar: i64,
}

fn mask_of(g: &Multigraph, subset: &[VertexId]) -> Result<u64> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    assert!(g.vertex_count() <= 64, "mask-based subsets need |V| <= 64");
    let mut mask = 0u64;
    for &v in subset {
        assert!(v.0 < g.vertex_count(), "vertex outside graph");
        mask |= 1 << v.0;
    }
    Ok(mask)
}

fn report_for_mask(g: &Multigraph, d: &Divisor, mask: u64) -> SubsetReport {
    let mut deg_in_s = 0i64;
    for i in 0..g.vertex_count() {
        if (mask >> i) & 1 == 1 {
            deg_in_s = add(deg_in_s, d.values[i]);
        }
    }
    let mut edges_in_s = 0i64;
    let mut edges_in_comp = 0i64;
    for e in g.edges() {
        let (a, b) = g.endpoints(e);
        let a_in = (mask >> a.0) & 1 == 1;
        let b_in = (mask >> b.0) & 1 == 1;
        if a_in && b_in {
            edges_in_s += 1;
        } else if !a_in && !b_in {
            edges_in_comp += 1;
        }
    }
    let size = mask.count_ones() as i64;
    let chi = add(deg_in_s, size - edges_in_s);
    let chi_bar = sub(g.edge_count() as i64 - edges_in_comp - size, deg_in_s);
    let subset = (0..g.vertex_count())
        .filter(|i| (mask >> i) & 1 == 1)
        .map(VertexId)
        .collect();
    SubsetReport {
        subset,
        chi,
        chi_bar,
    }
}

/// chi(S, D) = deg(D|_S) + chi(S) and
/// chi_bar(S, D) = |E| - |E(G[S^c])| - |S| - deg(D|_S) for one subset.
pub fn chi_report(g: &Multigraph, d: &Divisor, subset: &[VertexId]) -> Result<SubsetReport> {
    let mask = mask_of(g, subset)?;
    Ok(report_for_mask(g, d, mask))
}

/// Global minima of chi and chi-bar with one minimizing subset each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChiGlobal {
    pub chi: i64,
    pub chi_witness: Vec<VertexId>,
    pub chi_bar: i64,
    pub chi_bar_witness: Vec<VertexId>,
}

struct MaskMinima {
    chi: i64,
    chi_mask: u64,
    chi_bar: i64,
    chi_bar_mask: u64,
}

fn scan_masks(g: &Multigraph, d: &Divisor, lo: u64, hi: u64) -> MaskMinima {
    let mut best = MaskMinima {
        chi: i64::MAX,
        chi_mask: 0,
        chi_bar: i64::MAX,
        chi_bar_mask: 0,
    };
    for mask in lo..hi {
        if mask == 0 {
            continue;
        }
        let r = report_for_mask(g, d, mask);
        if r.chi < best.chi {
            best.chi = r.chi;
            best.chi_mask = mask;
        }
        if r.chi_bar < best.chi_bar {
            best.chi_bar = r.chi_bar;
            best.chi_bar_mask = mask;
        }
    }
    best
}

fn merge(a: MaskMinima, b: MaskMinima) -> MaskMinima {
    // Lower mask wins ties so the witness is independent of chunking.
    let (chi, chi_mask) = if (b.chi, b.chi_mask) < (a.chi, a.chi_mask) {
        (b.chi, b.chi_mask)
    } else {
        (a.chi, a.chi_mask)
    };
    let (chi_bar, chi_bar_mask) = if (b.chi_bar, b.chi_bar_mask) < (a.chi_bar, a.chi_bar_mask) {
        (b.chi_bar, b.chi_bar_mask)
    } else {
        (a.chi_bar, a.chi_bar_mask)
    };
    MaskMinima {
        chi,
        chi_mask,
        chi_bar,
        chi_bar_mask,
    }
}

fn finish(g: &Multigraph, m: MaskMinima) -> ChiGlobal {
    let to_subset = |mask: u64| {
        (0..g.vertex_count())
            .filter(|i| (mask >> i) & 1 == 1)
            .map(VertexId)
            .collect()
    };
    ChiGlobal {
        chi: m.chi,
        chi_witness: to_subset(m.chi_mask),
        chi_bar: m.chi_bar,
        chi_bar_witness: to_subset(m.chi_bar_mask),
    }
}

/// Minimize chi and chi-bar over all nonempty subsets, sequentially.
pub fn chi_global_sequential(g: &Multigraph, d: &Divisor, caps: &Caps) -> Result<ChiGlobal> {
    let n = g.vertex_count();
    if n > caps.chi_vertices {
        return Err(Error::TooLarge(format!(
            "chi_global enumerates 2^{n} subsets; cap is 2^{}",
            caps.chi_vertices
        )));
    }
    Ok(finish(g, scan_masks(g, d, 1, 1u64 << n)))
}

/// Minimize chi and chi-bar over all nonempty subsets.
///
/// With the `parallel` feature the mask range is swept with rayon; the
/// result (including witnesses) is identical to the sequential scan.
pub fn chi_global_with(g: &Multigraph, d: &Divisor, caps: &Caps) -> Result<ChiGlobal> {
    let n = g.vertex_count();
    if n > caps.chi_vertices {
        return Err(Error::TooLarge(format!(
            "chi_global enumerates 2^{n} subsets; cap is 2^{}",
            caps.chi_vertices
        )));
    }
    #[cfg(feature = "parallel")]
    {
        let total = 1u64 << n;
        if total >= (1 << 14) {
            const CHUNK: u64 = 1 << 12;
            let minima = (0..total.div_ceil(CHUNK))
                .into_par_iter()
                .map(|c| scan_masks(g, d, c * CHUNK, ((c + 1) * CHUNK).min(total)))
                .reduce(
                    || MaskMinima {
                        chi: i64::MAX,
                        chi_mask: 0,
                        chi_bar: i64::MAX,
                        chi_bar_mask: 0,
                    },
                    merge,
                );
            return Ok(finish(g, minima));
        }
    }
    Ok(finish(g, scan_masks(g, d, 1, 1u64 << n)))
}

/// `chi_global_with` under the default caps.
pub fn chi_global(g: &Multigraph, d: &Divisor) -> Result<ChiGlobal> {
    chi_global_with(g, d, &Caps::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c3() -> Multigraph {
        Multigraph::parse("a b\nb c\nc a").unwrap()
    }

    fn b3() -> Multigraph {
        Multigraph::parse("u v\nu v\nu v").unwrap()
    }

    fn k4() -> Multigraph {
        Multigraph::parse("a b\na c\na d\nb c\nb d\nc d").unwrap()
    }

    fn vs(ids: &[usize]) -> Vec<VertexId> {
        ids.iter().map(|&i| VertexId(i)).collect()
    }

    #[test]
    fn parse_defaults_to_zero() {
        let g = c3();
        let d = Divisor::parse(&g, "b 2\n# comment\n").unwrap();
        assert_eq!(d.values(), &[0, 2, 0]);
        assert!(Divisor::parse(&g, "x 1").is_err());
        assert!(Divisor::parse(&g, "a 1\na 2").is_err());
    }

    #[test]
    fn fire_laplacian_row() {
        let g = c3();
        let d = Divisor::from_values(&g, vec![2, -1, -1]);
        let fired = fire(&g, &d, &[1, 0, 0]);
        assert_eq!(fired.values(), &[0, 0, 0]);
    }

    #[test]
    fn fire_all_ones_is_identity() {
        let g = k4();
        let d = Divisor::from_values(&g, vec![3, -2, 0, 7]);
        assert_eq!(fire(&g, &d, &[1, 1, 1, 1]), d);
    }

    #[test]
    fn fire_single_vertex_column() {
        let g = c3();
        let d = Divisor::zeros(&g);
        let fired = fire(&g, &d, &[0, 1, 0]);
        assert_eq!(fired.values(), &[1, -2, 1]);
    }

    #[test]
    fn fire_preserves_degree_and_composes() {
        let g = k4();
        let d = Divisor::from_values(&g, vec![1, -2, 3, 0]);
        let f1 = [2, 0, -1, 3];
        let f2 = [-1, 1, 0, 2];
        let once = fire(&g, &d, &[1, 1, -1, 5]);
        assert_eq!(once.degree(), d.degree());
        let sum: Vec<i64> = f1.iter().zip(&f2).map(|(a, b)| a + b).collect();
        assert_eq!(fire(&g, &fire(&g, &d, &f1), &f2), fire(&g, &d, &sum));
    }

    #[test]
    fn chi_report_examples() {
        let g = c3();
        let zero = Divisor::zeros(&g);
        let r = chi_report(&g, &zero, &vs(&[0, 1, 2])).unwrap();
        assert_eq!((r.chi, r.chi_bar), (0, 0));
        let r = chi_report(&g, &zero, &vs(&[0])).unwrap();
        assert_eq!((r.chi, r.chi_bar), (1, 1));

        let g = k4();
        let k = g.canonical_divisor();
        let r = chi_report(&g, &k, &vs(&[0, 1, 2, 3])).unwrap();
        assert_eq!((r.chi, r.chi_bar), (2, -2));

        assert!(matches!(
            chi_report(&g, &k, &[]),
            Err(Error::EmptySubset)
        ));
    }

    #[test]
    fn chi_global_c3_zero() {
        let g = c3();
        let r = chi_global(&g, &Divisor::zeros(&g)).unwrap();
        assert_eq!(r.chi, 0);
        assert_eq!(r.chi_witness, vs(&[0, 1, 2]));
        assert_eq!(r.chi_bar, 0);
        assert_eq!(r.chi_bar_witness, vs(&[0, 1, 2]));
    }

    #[test]
    fn chi_global_b3() {
        let g = b3();
        let d = Divisor::from_values(&g, vec![2, 0]);
        let r = chi_global(&g, &d).unwrap();
        assert_eq!(r.chi_bar, -1);
        assert_eq!(r.chi_bar_witness, vs(&[0, 1]));
    }

    #[test]
    fn chi_global_c3_negative_chip() {
        // chi(V, D) = -1 + (3 - 3) = -1 is the true minimum here.
        let g = c3();
        let d = Divisor::from_values(&g, vec![-1, 0, 0]);
        let r = chi_global(&g, &d).unwrap();
        assert_eq!(r.chi, -1);
        assert_eq!(r.chi_witness, vs(&[0, 1, 2]));
    }

    #[test]
    fn chi_global_matches_sequential() {
        let g = k4();
        let d = Divisor::from_values(&g, vec![2, -1, 0, 1]);
        let caps = Caps::default();
        assert_eq!(
            chi_global_with(&g, &d, &caps).unwrap(),
            chi_global_sequential(&g, &d, &caps).unwrap()
        );
    }

    #[test]
    fn chi_global_cap() {
        let g = c3();
        let caps = Caps {
            chi_vertices: 2,
            ..Caps::default()
        };
        assert!(matches!(
            chi_global_with(&g, &Divisor::zeros(&g), &caps),
            Err(Error::TooLarge(_))
        ));
    }

    /// For deg(D) = g-1: chi(S, D) >= 0 iff chi_bar(S^c, D) >= 0, pointwise.
    #[test]
    fn chi_duality_at_degree_g_minus_1() {
        for g in [c3(), b3(), k4()] {
            let target = g.genus() - 1;
            let n = g.vertex_count();
            // A few divisors of degree g-1 with small entries.
            for seed in 0..81i64 {
                let mut values: Vec<i64> = (0..n as i64).map(|i| (seed >> i) % 3 - 1).collect();
                let d: i64 = values.iter().sum();
                values[0] += target - d;
                let d = Divisor::from_values(&g, values);
                let full = (1u64 << n) - 1;
                for mask in 1..full {
                    let s = report_for_mask(&g, &d, mask);
                    let comp = report_for_mask(&g, &d, full & !mask);
                    assert_eq!(s.chi >= 0, comp.chi_bar >= 0);
                }
            }
        }
    }

    /// Submodularity of chi and chi-bar over all subset pairs.
    #[test]
    fn chi_submodular() {
        for g in [c3(), b3(), k4()] {
            let n = g.vertex_count();
            let d = Divisor::from_fn(&g, |v| (v.0 as i64 % 3) - 1);
            for s1 in 1u64..(1 << n) {
                for s2 in 1u64..(1 << n) {
                    let union = s1 | s2;
                    let inter = s1 & s2;
                    if inter == 0 {
                        continue;
                    }
                    let (a, b) = (report_for_mask(&g, &d, s1), report_for_mask(&g, &d, s2));
                    let (u, i) = (report_for_mask(&g, &d, union), report_for_mask(&g, &d, inter));
                    assert!(u.chi + i.chi <= a.chi + b.chi);
                    assert!(u.chi_bar + i.chi_bar <= a.chi_bar + b.chi_bar);
                }
            }
        }
    }

    #[test]
    fn canonical_lines_sorted() {
        let g = Multigraph::parse("z y\ny x\nx z").unwrap();
        let d = Divisor::from_values(&g, vec![1, 2, 3]);
        assert_eq!(d.canonical_lines(&g), "x 3\ny 2\nz 1\n");
    }
}
