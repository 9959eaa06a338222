//! Named verification suites: each one checks a structural theorem against
//! brute-force ground truth on a given graph and reports the first
//! counterexample.
//!
//! The outer sweeps are data-parallel; with the `parallel` feature they run
//! on rayon, and every suite also has a `_sequential` form with identical
//! results (the criterion benches compare the two).

use serde::{Deserialize, Serialize};

use rand::seq::SliceRandom;
use rand::SeedableRng;

use crate::caps::Caps;
use crate::divisor::{chi_global_sequential, Divisor};
use crate::engine::{rank_via_path_reversals, unfurl, Outcome};
use crate::error::{Error, Result};
use crate::flow::{break_divisor_from, torsor_act};
use crate::graph::Multigraph;
use crate::oracle;
use crate::orientation::{classify, indegree_divisor, replay, PartialOrientation};
use crate::rank::rr_verify;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Outcome of one suite run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    /// Number of instances checked.
    pub cases: u64,
    /// Human-readable description of the first failure, if any.
    pub counterexample: Option<String>,
}

impl SuiteReport {
    fn pass(suite: &str, cases: u64) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            pass: true,
            cases,
            counterexample: None,
        }
    }

    fn fail(suite: &str, cases: u64, counterexample: String) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            pass: false,
            cases,
            counterexample: Some(counterexample),
        }
    }
}

/// Run `check` over `items`, returning the first failure in item order.
fn sweep<T, F>(items: Vec<T>, check: F) -> (u64, Option<String>)
where
    T: Send + Sync,
    F: Fn(&T) -> Option<String> + Sync,
{
    let cases = items.len() as u64;
    #[cfg(feature = "parallel")]
    {
        let failure = items
            .par_iter()
            .enumerate()
            .filter_map(|(i, item)| check(item).map(|msg| (i, msg)))
            .min_by_key(|&(i, _)| i)
            .map(|(_, msg)| msg);
        (cases, failure)
    }
    #[cfg(not(feature = "parallel"))]
    {
        let failure = items.iter().find_map(&check);
        (cases, failure)
    }
}

fn sweep_sequential<T, F>(items: Vec<T>, check: F) -> (u64, Option<String>)
where
    F: Fn(&T) -> Option<String>,
{
    let cases = items.len() as u64;
    let failure = items.iter().find_map(&check);
    (cases, failure)
}

fn full_box(g: &Multigraph, bound: i64) -> (Vec<i64>, Vec<i64>) {
    let n = g.vertex_count();
    (vec![-bound; n], vec![bound; n])
}

/// Divisors with entries in [-bound, bound], optionally sampled.
fn divisor_pool(
    g: &Multigraph,
    bound: i64,
    sample: Option<(usize, u64)>,
) -> Vec<Divisor> {
    let (lo, hi) = full_box(g, bound);
    let mut all = oracle::divisors_in_box(g, &lo, &hi);
    if let Some((count, seed)) = sample {
        if count < all.len() {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            all.shuffle(&mut rng);
            all.truncate(count);
        }
    }
    all
}

fn rr_check(g: &Multigraph, d: &Divisor) -> Option<String> {
    match rr_verify(g, d) {
        Ok(_) => None,
        Err(e) => Some(format!("D = {:?}: {e}", d.values())),
    }
}

/// Riemann-Roch identity over every divisor with entries in
/// [-bound, bound], optionally sampled with a fixed seed.
pub fn rr(g: &Multigraph, bound: i64, sample: Option<(usize, u64)>) -> SuiteReport {
    let pool = divisor_pool(g, bound, sample);
    let (cases, failure) = sweep(pool, |d| rr_check(g, d));
    match failure {
        None => SuiteReport::pass("rr", cases),
        Some(c) => SuiteReport::fail("rr", cases, c),
    }
}

pub fn rr_sequential(g: &Multigraph, bound: i64, sample: Option<(usize, u64)>) -> SuiteReport {
    let pool = divisor_pool(g, bound, sample);
    let (cases, failure) = sweep_sequential(pool, |d| rr_check(g, d));
    match failure {
        None => SuiteReport::pass("rr", cases),
        Some(c) => SuiteReport::fail("rr", cases, c),
    }
}

/// Full-orientation class count versus the spanning tree count.
pub fn gioan(g: &Multigraph, caps: &Caps) -> Result<SuiteReport> {
    let table = oracle::class_table_full(g, caps)?;
    let classes = table.class_count() as i64;
    let trees = g.spanning_tree_count();
    let total: usize = table.classes.iter().map(|c| c.members.len()).sum();
    if total != 1usize << g.edge_count() {
        return Ok(SuiteReport::fail(
            "gioan",
            total as u64,
            format!("classes cover {total} of {} orientations", 1usize << g.edge_count()),
        ));
    }
    if classes == trees {
        Ok(SuiteReport::pass("gioan", total as u64))
    } else {
        Ok(SuiteReport::fail(
            "gioan",
            total as u64,
            format!("{classes} classes but {trees} spanning trees"),
        ))
    }
}

/// The partial-orientability characterization: the divisors of partial
/// orientations are exactly the divisors with D >= -1 everywhere and
/// chi_bar(G, D) >= 0.
pub fn eulerpar(g: &Multigraph, caps: &Caps) -> Result<SuiteReport> {
    let mut image = std::collections::BTreeSet::new();
    for o in oracle::enumerate_partial_orientations(g, caps)? {
        image.insert(indegree_divisor(g, &o).values().to_vec());
    }
    // The image is contained in the box [-1, deg(v) - 1].
    let lo = vec![-1i64; g.vertex_count()];
    let hi: Vec<i64> = g.vertices().map(|v| g.degree(v) as i64 - 1).collect();
    let pool = oracle::divisors_in_box(g, &lo, &hi);
    let (cases, failure) = sweep(pool, |d| {
        let predicted = chi_global_sequential(g, d, caps)
            .map(|r| r.chi_bar >= 0)
            .unwrap_or(false);
        let in_image = image.contains(d.values());
        let by_op = crate::flow::is_partially_orientable_with(g, d, caps).ok()?;
        if predicted != in_image || by_op != in_image {
            Some(format!(
                "D = {:?}: chi_bar says {predicted}, enumeration says {in_image}, op says {by_op}",
                d.values()
            ))
        } else {
            None
        }
    });
    // Image members outside the box are impossible; also confirm every image
    // member satisfies the predicate (covered by the box sweep).
    match failure {
        None => Ok(SuiteReport::pass("eulerpar", cases)),
        Some(c) => Ok(SuiteReport::fail("eulerpar", cases, c)),
    }
}

fn rank_distance_check(
    g: &Multigraph,
    caps: &Caps,
    o: &PartialOrientation,
) -> Option<String> {
    let (r, cert) = rank_via_path_reversals(g, o);
    let dist = match oracle::path_reversal_distance(g, o, caps) {
        Ok(d) => d,
        Err(e) => return Some(format!("{:?}: {e}", o.states())),
    };
    if r != dist - 1 {
        return Some(format!(
            "{:?}: rank {r} but reversal distance {dist}",
            o.states()
        ));
    }
    match replay(g, &cert, o) {
        Ok(final_o) if classify(g, &final_o).acyclic => None,
        Ok(_) => Some(format!("{:?}: certificate does not end acyclic", o.states())),
        Err(e) => Some(format!("{:?}: certificate replay failed: {e}", o.states())),
    }
}

/// Rank equals path-reversal distance minus one, for every partial
/// orientation, with every certificate replaying to an acyclic orientation.
pub fn rank_distance(g: &Multigraph, caps: &Caps) -> Result<SuiteReport> {
    let pool: Vec<PartialOrientation> = {
        let relaxed = Caps {
            partial_edges: caps.partial_edges.max(caps.distance_edges),
            ..*caps
        };
        if g.edge_count() > caps.distance_edges {
            return Err(Error::TooLarge(format!(
                "rank-distance needs |E| <= {}",
                caps.distance_edges
            )));
        }
        oracle::enumerate_partial_orientations(g, &relaxed)?.collect()
    };
    let (cases, failure) = sweep(pool, |o| rank_distance_check(g, caps, o));
    match failure {
        None => Ok(SuiteReport::pass("rank-distance", cases)),
        Some(c) => Ok(SuiteReport::fail("rank-distance", cases, c)),
    }
}

pub fn rank_distance_sequential(g: &Multigraph, caps: &Caps) -> Result<SuiteReport> {
    if g.edge_count() > caps.distance_edges {
        return Err(Error::TooLarge(format!(
            "rank-distance needs |E| <= {}",
            caps.distance_edges
        )));
    }
    let pool: Vec<PartialOrientation> =
        oracle::enumerate_partial_orientations(g, caps)?.collect();
    let (cases, failure) = sweep_sequential(pool, |o| rank_distance_check(g, caps, o));
    match failure {
        None => Ok(SuiteReport::pass("rank-distance", cases)),
        Some(c) => Ok(SuiteReport::fail("rank-distance", cases, c)),
    }
}

/// The degree-zero class group acts on full-orientation classes: well
/// defined and simply transitive.
pub fn torsor(g: &Multigraph, caps: &Caps) -> Result<SuiteReport> {
    let table = oracle::class_table_full(g, caps)?;
    let nclasses = table.class_count();

    // Degree-zero class representatives from a small box.
    let (lo, hi) = full_box(g, 2);
    let mut zero_reps: Vec<Divisor> = Vec::new();
    for d in oracle::divisors_in_box(g, &lo, &hi) {
        if d.degree() != 0 {
            continue;
        }
        if !zero_reps.iter().any(|z| oracle::equivalent_divisors(g, z, &d)) {
            zero_reps.push(d);
        }
    }
    if zero_reps.len() != nclasses {
        return Ok(SuiteReport::fail(
            "torsor",
            0,
            format!(
                "found {} degree-zero classes but {} orientation classes",
                zero_reps.len(),
                nclasses
            ),
        ));
    }

    let class_of = |d: &Divisor| -> usize {
        table
            .classes
            .iter()
            .position(|c| oracle::equivalent_divisors(g, &c.representative, d))
            .expect("orientation divisor belongs to a class")
    };

    let mut cases = 0u64;
    for entry in &table.classes {
        for z in &zero_reps {
            cases += 1;
            // Well-defined: acting on any two members lands in one class.
            let mut landed: Option<usize> = None;
            for member in entry.members.iter().take(2) {
                let acted = torsor_act(g, member, z)?;
                let c = class_of(&indegree_divisor(g, &acted));
                match landed {
                    None => landed = Some(c),
                    Some(prev) if prev != c => {
                        return Ok(SuiteReport::fail(
                            "torsor",
                            cases,
                            format!(
                                "action of {:?} on class {:?} is not well defined",
                                z.values(),
                                entry.representative.values()
                            ),
                        ));
                    }
                    _ => {}
                }
            }
            // Free: only the identity stabilizes.
            let acted_class = landed.unwrap();
            let start_class = class_of(&entry.representative);
            let z_trivial = oracle::equivalent_divisors(g, z, &Divisor::zeros(g));
            if (acted_class == start_class) != z_trivial {
                return Ok(SuiteReport::fail(
                    "torsor",
                    cases,
                    format!("z = {:?} stabilizes a class it should not", z.values()),
                ));
            }
        }
    }

    // Transitive: the difference divisor moves any class to any other.
    for from in &table.classes {
        for to in &table.classes {
            cases += 1;
            let z = to.representative.minus(&from.representative);
            let acted = torsor_act(g, &from.members[0], &z)?;
            if !oracle::equivalent_divisors(
                g,
                &indegree_divisor(g, &acted),
                &to.representative,
            ) {
                return Ok(SuiteReport::fail(
                    "torsor",
                    cases,
                    format!(
                        "difference action failed from {:?} to {:?}",
                        from.representative.values(),
                        to.representative.values()
                    ),
                ));
            }
        }
    }

    Ok(SuiteReport::pass("torsor", cases))
}

/// Unfurl dichotomy: acyclic outcomes coincide with rank -1 and sourceless
/// outcomes with rank >= 0, and no class contains both kinds.
pub fn dichotomy(g: &Multigraph, caps: &Caps) -> Result<SuiteReport> {
    let pool: Vec<PartialOrientation> =
        oracle::enumerate_partial_orientations(g, caps)?.collect();
    let (cases, failure) = sweep(pool, |o| {
        let d = indegree_divisor(g, o);
        let r = match oracle::brute_rank(g, &d, caps) {
            Ok(r) => r,
            Err(e) => return Some(format!("{:?}: {e}", o.states())),
        };
        let res = unfurl(g, o);
        let ok = match res.outcome {
            Outcome::Acyclic => r == -1,
            Outcome::Sourceless => r >= 0,
            _ => false,
        };
        if !ok {
            return Some(format!(
                "{:?}: unfurl {:?} but brute rank {r}",
                o.states(),
                res.outcome
            ));
        }
        if replay(g, &res.certificate, o).is_err() {
            return Some(format!("{:?}: unfurl certificate does not replay", o.states()));
        }
        None
    });
    match failure {
        None => Ok(SuiteReport::pass("dichotomy", cases)),
        Some(c) => Ok(SuiteReport::fail("dichotomy", cases, c)),
    }
}

/// The break-divisor map: idempotent, constant on classes, independent of
/// the base vertex, and its image counts spanning trees.
pub fn break_divisors(g: &Multigraph, bound: i64) -> Result<SuiteReport> {
    let (lo, hi) = full_box(g, bound);
    let target = g.genus();
    let pool: Vec<Divisor> = oracle::divisors_in_box(g, &lo, &hi)
        .into_iter()
        .filter(|d| d.degree() == target)
        .collect();
    let mut image = std::collections::BTreeSet::new();
    let mut cases = 0u64;
    for d in &pool {
        cases += 1;
        let q0 = g.lex_least();
        let (bd, _) = break_divisor_from(g, d, q0)?;
        if !oracle::equivalent_divisors(g, &bd, d) {
            return Ok(SuiteReport::fail(
                "break",
                cases,
                format!("break divisor of {:?} left its class", d.values()),
            ));
        }
        let (again, _) = break_divisor_from(g, &bd, q0)?;
        if again != bd {
            return Ok(SuiteReport::fail(
                "break",
                cases,
                format!("break divisor of {:?} is not idempotent", d.values()),
            ));
        }
        for &q in g.lex_vertices().iter().skip(1) {
            let (other, _) = break_divisor_from(g, d, q)?;
            if other != bd {
                return Ok(SuiteReport::fail(
                    "break",
                    cases,
                    format!(
                        "break divisor of {:?} depends on the base vertex {}",
                        d.values(),
                        g.name(q)
                    ),
                ));
            }
        }
        image.insert(bd.values().to_vec());
    }
    let trees = g.spanning_tree_count() as usize;
    if image.len() != trees {
        return Ok(SuiteReport::fail(
            "break",
            cases,
            format!("image has {} divisors but {} spanning trees", image.len(), trees),
        ));
    }
    Ok(SuiteReport::pass("break", cases))
}
