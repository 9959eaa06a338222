//! Enumeration caps. Exceeding a cap is an error, never silent truncation.

/// Size limits for the exhaustive procedures.
///
/// The defaults are desk-scale; every field can be raised by the caller
/// (the CLI reads overrides from the `ORIENT_RR_CAPS` environment variable).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Max vertex count for subset enumeration (`chi_global`).
    pub chi_vertices: usize,
    /// Max edge count for enumerating all 3^|E| partial orientations.
    pub partial_edges: usize,
    /// Max edge count for full-orientation class tables.
    pub class_edges: usize,
    /// Max vertex count for the brute-force rank.
    pub rank_vertices: usize,
    /// Max |deg(D)| for the brute-force rank.
    pub rank_degree: i64,
    /// Max edge count for the path-reversal distance BFS.
    pub distance_edges: usize,
    /// Max total capacity for the parallel-edge expansion in
    /// `mfmc_via_orientability`.
    pub expansion_capacity: i64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            chi_vertices: 20,
            partial_edges: 12,
            class_edges: 8,
            rank_vertices: 6,
            rank_degree: 12,
            distance_edges: 5,
            expansion_capacity: 10_000,
        }
    }
}

impl Caps {
    /// Parse overrides of the form `"chi=24,partial=13,class=9"`.
    ///
    /// Recognised keys: `chi`, `partial`, `class`, `rank-v`, `rank-deg`,
    /// `distance`, `expansion`. Unknown keys or malformed values are
    /// reported as an error string.
    pub fn with_overrides(mut self, spec: &str) -> Result<Self, String> {
        for item in spec.split(',') {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| format!("cap override `{item}` is not of the form key=value"))?;
            let parse = |v: &str| {
                v.trim()
                    .parse::<i64>()
                    .map_err(|_| format!("cap value `{v}` is not an integer"))
            };
            let v = parse(value)?;
            if v < 0 {
                return Err(format!("cap value for `{key}` must be nonnegative"));
            }
            match key.trim() {
                "chi" => self.chi_vertices = v as usize,
                "partial" => self.partial_edges = v as usize,
                "class" => self.class_edges = v as usize,
                "rank-v" => self.rank_vertices = v as usize,
                "rank-deg" => self.rank_degree = v,
                "distance" => self.distance_edges = v as usize,
                "expansion" => self.expansion_capacity = v,
                other => return Err(format!("unknown cap key `{other}`")),
            }
        }
        Ok(self)
    }
}
