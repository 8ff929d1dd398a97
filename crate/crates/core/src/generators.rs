//! Instance families: adversarial worst cases, seeded random ensembles,
//! and the two-seller weight pathology.
//!
//! Every family is deterministic given its spec (including the seed), and
//! every generated instance passes `validate`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::graph::{BipartiteInstance, FullyOnlineInstance, Instance, Timestamp};

/// Serializable description of a generated instance; regenerating from an
/// equal spec yields an identical instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GeneratorSpec {
    UpperTriangular {
        n: usize,
    },
    RandomBipartite {
        n_sellers: usize,
        n_buyers: usize,
        p: f64,
        seed: u64,
        /// Log-uniform weight range (lo, hi); None for unweighted.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weight_range: Option<(f64, f64)>,
    },
    Figure1,
    RandomFullyOnline {
        n: usize,
        p: f64,
        seed: u64,
    },
    DisjointPerfect {
        n: usize,
    },
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<Instance> {
        match *self {
            GeneratorSpec::UpperTriangular { n } => {
                Ok(Instance::Bipartite(gen_upper_triangular(n)?))
            }
            GeneratorSpec::RandomBipartite {
                n_sellers,
                n_buyers,
                p,
                seed,
                weight_range,
            } => Ok(Instance::Bipartite(gen_random_bipartite(
                n_sellers,
                n_buyers,
                p,
                seed,
                weight_range,
            )?)),
            GeneratorSpec::Figure1 => Ok(Instance::Bipartite(gen_figure1())),
            GeneratorSpec::RandomFullyOnline { n, p, seed } => {
                Ok(Instance::FullyOnline(gen_random_fully_online(n, p, seed)?))
            }
            GeneratorSpec::DisjointPerfect { n } => {
                Ok(Instance::Bipartite(gen_disjoint_perfect(n)?))
            }
        }
    }
}

/// Compact `family(params)` form, used as instance provenance ids.
impl std::fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GeneratorSpec::UpperTriangular { n } => write!(f, "upper_triangular(n={n})"),
            GeneratorSpec::RandomBipartite {
                n_sellers,
                n_buyers,
                p,
                seed,
                weight_range,
            } => {
                write!(
                    f,
                    "random_bipartite(ns={n_sellers},nb={n_buyers},p={p},seed={seed}"
                )?;
                if let Some((lo, hi)) = weight_range {
                    write!(f, ",w=[{lo},{hi}]")?;
                }
                write!(f, ")")
            }
            GeneratorSpec::Figure1 => write!(f, "figure1"),
            GeneratorSpec::RandomFullyOnline { n, p, seed } => {
                write!(f, "random_fully_online(n={n},p={p},seed={seed})")
            }
            GeneratorSpec::DisjointPerfect { n } => write!(f, "disjoint_perfect(n={n})"),
        }
    }
}

/// n sellers, n buyers, buyer i adjacent to sellers {i, ..., n-1}, arrival
/// order 0..n. Admits the diagonal perfect matching {(i, i)} and drives
/// rank-based matching toward its worst case.
pub fn gen_upper_triangular(n: usize) -> Result<BipartiteInstance> {
    if n == 0 {
        return domain("upper_triangular needs n >= 1");
    }
    let mut edges = Vec::with_capacity(n * (n + 1) / 2);
    for buyer in 0..n {
        for seller in buyer..n {
            edges.push((buyer, seller));
        }
    }
    BipartiteInstance::from_edges(n, n, &edges, (0..n).collect())
}

/// Erdős–Rényi bipartite instance: each (buyer, seller) pair is an edge
/// with probability `p`, arrival order is a uniform shuffle, and weights
/// (when a range is given) are log-uniform in `[lo, hi]`. Draw order is
/// fixed: edges buyer-major, then the arrival shuffle, then weights.
pub fn gen_random_bipartite(
    n_sellers: usize,
    n_buyers: usize,
    p: f64,
    seed: u64,
    weight_range: Option<(f64, f64)>,
) -> Result<BipartiteInstance> {
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("edge probability {p} outside [0, 1]"));
    }
    if let Some((lo, hi)) = weight_range {
        if !lo.is_finite() || !hi.is_finite() || lo <= 0.0 || hi < lo {
            return domain(format!("weight range [{lo}, {hi}] is not positive and ordered"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for buyer in 0..n_buyers {
        for seller in 0..n_sellers {
            if rng.gen::<f64>() < p {
                edges.push((buyer, seller));
            }
        }
    }
    let mut arrival: Vec<usize> = (0..n_buyers).collect();
    arrival.shuffle(&mut rng);
    let mut instance = BipartiteInstance::from_edges(n_sellers, n_buyers, &edges, arrival)?;
    if let Some((lo, hi)) = weight_range {
        let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
        let weights = (0..n_sellers)
            .map(|_| (ln_lo + rng.gen::<f64>() * (ln_hi - ln_lo)).exp())
            .collect();
        instance = instance.with_weights(weights);
    }
    Ok(instance)
}

/// Two sellers with weights 1 and 10^10 and a single buyer adjacent to
/// both. The light seller can outscore the heavy one when the heavy rank
/// is pushed toward 1, so one rank coordinate can swing the objective by
/// ten orders of magnitude.
pub fn gen_figure1() -> BipartiteInstance {
    BipartiteInstance::from_edges(2, 1, &[(0, 0), (0, 1)], vec![0])
        .expect("static instance")
        .with_weights(vec![1.0, 1e10])
}

/// Random fully-online instance: the integers 0..2n are shuffled and
/// consecutive pairs become (arrival, departure) intervals, so all 2n
/// timestamps are distinct and every interval is nonempty by
/// construction. Each vertex pair is then an edge with probability `p`.
pub fn gen_random_fully_online(n: usize, p: f64, seed: u64) -> Result<FullyOnlineInstance> {
    if n < 2 {
        return domain("random_fully_online needs n >= 2");
    }
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("edge probability {p} outside [0, 1]"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stamps: Vec<i64> = (0..2 * n as i64).collect();
    stamps.shuffle(&mut rng);
    let mut arrival = Vec::with_capacity(n);
    let mut departure = Vec::with_capacity(n);
    for v in 0..n {
        let (a, b) = (stamps[2 * v], stamps[2 * v + 1]);
        arrival.push(Timestamp::from(a.min(b)));
        departure.push(Timestamp::from(a.max(b)));
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    let instance = FullyOnlineInstance::from_edges(arrival, departure, &edges)?;
    debug_assert!(instance.validate().is_valid());
    Ok(instance)
}

/// n disjoint edges (buyer i — seller i): every engine matches everything,
/// which makes this the calibration family.
pub fn gen_disjoint_perfect(n: usize) -> Result<BipartiteInstance> {
    if n == 0 {
        return domain("disjoint_perfect needs n >= 1");
    }
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, i)).collect();
    BipartiteInstance::from_edges(n, n, &edges, (0..n).collect())
}
