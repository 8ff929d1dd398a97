//! Seeded Monte Carlo campaigns, analytic tail-bound calculators, and the
//! statistical comparison of empirical tails against those bounds.
//!
//! A campaign is reproducible bit-exactly from
//! `(instance, engine, eps, master_seed, trials)`: trial `k` draws its
//! ranks from the stream documented in [`crate::seeding`], and results are
//! aggregated by trial index, so the parallel and sequential paths return
//! identical values.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::engines::Engine;
use crate::error::{domain, Result};
use crate::graph::Instance;
use crate::seeding::trial_ranks;
use crate::stats;

/// Competitive ratio of Fully Online Ranking on general graphs.
pub const RHO_GENERAL: f64 = 0.521;
/// Competitive ratio of Fully Online Ranking on bipartite graphs.
pub const RHO_BIPARTITE: f64 = 0.567;

/// 1 - 1/e, the expectation guarantee of the unweighted engines.
pub fn one_minus_inv_e() -> f64 {
    1.0 - (1.0 / std::f64::consts::E)
}

/// Default alpha grid: 0.05, 0.10, ..., 0.50. Below 0.05 the bounds are
/// vacuous at desk scale; above 0.5 the thresholds drop under the
/// maximal-matching floor.
pub fn default_alpha_grid() -> Vec<f64> {
    (1..=10).map(|k| k as f64 / 20.0).collect()
}

/// McDiarmid tail bound exp(-2 t^2 / sum(c_i^2)) for a function with
/// per-coordinate bounded differences `c`.
pub fn mcdiarmid_bound(c: &[f64], t: f64) -> Result<f64> {
    if !t.is_finite() || t <= 0.0 {
        return domain(format!("t must be positive and finite, got {t}"));
    }
    let mut sum_sq = 0.0;
    for &ci in c {
        if !ci.is_finite() || ci < 0.0 {
            return domain(format!("bounded differences must be >= 0, got {ci}"));
        }
        sum_sq += ci * ci;
    }
    if sum_sq == 0.0 {
        return domain("sum of squared bounded differences must be positive");
    }
    Ok((-2.0 * t * t / sum_sq).exp())
}

/// Which tail theorem a comparison is made against, with its instance
/// parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TheoremInputs {
    /// Unweighted bipartite: tail < exp(-2 a^2 n) below (1 - 1/e - a) n.
    T1 { n: usize },
    /// Fully online: tail < exp(-a^2 n) below (rho - a) n.
    T2 { n: usize, rho: f64 },
    /// Vertex-weighted: tail < exp(-a^4 w(M*)^2 / (50 |w|^2)) below
    /// (1 - 1/e - a) w(M*).
    T3 { opt_weight: f64, w_l2_sq: f64 },
}

impl TheoremInputs {
    pub fn theorem_name(&self) -> &'static str {
        match self {
            TheoremInputs::T1 { .. } => "T1",
            TheoremInputs::T2 { .. } => "T2",
            TheoremInputs::T3 { .. } => "T3",
        }
    }
}

/// An analytic guarantee: the probability bound and the objective
/// threshold it applies below.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBound {
    pub bound: f64,
    pub threshold: f64,
}

/// Evaluate the tail bound and guarantee threshold for one alpha.
pub fn theoretical_tail(inputs: TheoremInputs, alpha: f64) -> Result<TailBound> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return domain(format!("alpha must be positive and finite, got {alpha}"));
    }
    match inputs {
        TheoremInputs::T1 { n } => {
            if n < 1 {
                return domain("T1 needs n >= 1");
            }
            let n = n as f64;
            Ok(TailBound {
                bound: (-2.0 * alpha * alpha * n).exp(),
                threshold: (one_minus_inv_e() - alpha) * n,
            })
        }
        TheoremInputs::T2 { n, rho } => {
            if n < 1 {
                return domain("T2 needs n >= 1");
            }
            if !(rho > 0.0 && rho <= 1.0) {
                return domain(format!("rho must lie in (0, 1], got {rho}"));
            }
            let n = n as f64;
            Ok(TailBound {
                bound: (-alpha * alpha * n).exp(),
                threshold: (rho - alpha) * n,
            })
        }
        TheoremInputs::T3 {
            opt_weight,
            w_l2_sq,
        } => {
            if !opt_weight.is_finite() || opt_weight <= 0.0 {
                return domain(format!("w(M*) must be positive, got {opt_weight}"));
            }
            if !w_l2_sq.is_finite() || w_l2_sq <= 0.0 {
                return domain(format!("|w|_2^2 must be positive, got {w_l2_sq}"));
            }
            let a4 = alpha * alpha * alpha * alpha;
            Ok(TailBound {
                bound: (-a4 * opt_weight * opt_weight / (50.0 * w_l2_sq)).exp(),
                threshold: (one_minus_inv_e() - alpha) * opt_weight,
            })
        }
    }
}

/// Per-trial objective values from one seeded campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    pub values: Vec<f64>,
    pub trials: usize,
    pub master_seed: u64,
    pub instance_id: String,
    pub engine: Engine,
    pub eps: Option<f64>,
    /// Worst relative accounting residual |sum(r)+sum(u)-w(M)| / w(M)
    /// observed across trials; 0 for unweighted engines.
    pub max_accounting_gap: f64,
}

fn campaign_trial(
    instance: &Instance,
    engine: Engine,
    eps: Option<f64>,
    master_seed: u64,
    dim: usize,
    k: usize,
) -> Result<(f64, f64)> {
    let ranks = trial_ranks(master_seed, k as u64, dim);
    let record = engine.run(instance, &ranks, eps)?;
    let gap = if engine.is_weighted() {
        record.accounting_gap_relative()
    } else {
        0.0
    };
    Ok((record.objective, gap))
}

fn assemble(
    instance_id: &str,
    engine: Engine,
    eps: Option<f64>,
    master_seed: u64,
    outcomes: Vec<(f64, f64)>,
) -> EmpiricalDistribution {
    let trials = outcomes.len();
    let mut values = Vec::with_capacity(trials);
    let mut max_gap = 0.0f64;
    for (value, gap) in outcomes {
        values.push(value);
        max_gap = max_gap.max(gap);
    }
    EmpiricalDistribution {
        values,
        trials,
        master_seed,
        instance_id: instance_id.to_string(),
        engine,
        eps,
        max_accounting_gap: max_gap,
    }
}

/// Run a seeded campaign: trial k executes `engine` on ranks derived from
/// `(master_seed, k)` and records the objective. Runs trials in parallel
/// when the `parallel` feature is enabled; the result is independent of
/// the schedule either way.
pub fn monte_carlo(
    instance: &Instance,
    instance_id: &str,
    engine: Engine,
    eps: Option<f64>,
    trials: usize,
    master_seed: u64,
) -> Result<EmpiricalDistribution> {
    if trials < 1 {
        return domain("trials must be >= 1");
    }
    let dim = engine.rank_dim(instance)?;
    #[cfg(feature = "parallel")]
    let outcomes: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|k| campaign_trial(instance, engine, eps, master_seed, dim, k))
        .collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<(f64, f64)> = (0..trials)
        .map(|k| campaign_trial(instance, engine, eps, master_seed, dim, k))
        .collect::<Result<_>>()?;
    Ok(assemble(instance_id, engine, eps, master_seed, outcomes))
}

/// Sequential twin of [`monte_carlo`], always available. Exists so the
/// schedule-independence contract is testable and benchmarkable against
/// the parallel path.
pub fn monte_carlo_sequential(
    instance: &Instance,
    instance_id: &str,
    engine: Engine,
    eps: Option<f64>,
    trials: usize,
    master_seed: u64,
) -> Result<EmpiricalDistribution> {
    if trials < 1 {
        return domain("trials must be >= 1");
    }
    let dim = engine.rank_dim(instance)?;
    let outcomes: Vec<(f64, f64)> = (0..trials)
        .map(|k| campaign_trial(instance, engine, eps, master_seed, dim, k))
        .collect::<Result<_>>()?;
    Ok(assemble(instance_id, engine, eps, master_seed, outcomes))
}

/// Exact E[|M|] for the unweighted bipartite engine by enumerating all
/// |S|! rank orderings, each equally likely. Valid because the engine's
/// behavior depends on the ranks only through their induced order.
/// This is the independent cross-check for [`monte_carlo`]: it goes
/// through the permutation-driven engine, not the rank-driven one.
pub fn exact_expectation_small(instance: &Instance, engine: Engine) -> Result<f64> {
    use itertools::Itertools;

    if engine != Engine::Ranking {
        return domain(format!(
            "exact enumeration only covers the order-driven engine ranking, not {engine}"
        ));
    }
    let g = instance.as_bipartite()?;
    if g.weights().is_some() {
        return domain("exact enumeration needs an unweighted instance");
    }
    let n = g.sellers();
    if n > 8 {
        return domain(format!("exact enumeration caps at 8 sellers, got {n}"));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    let mut count = 0usize;
    for perm in (0..n).permutations(n) {
        total += crate::engines::run_ranking_permutation(g, &perm)?.objective;
        count += 1;
    }
    Ok(total / count as f64)
}

/// One row of a tail comparison: the empirical tail at the theorem's
/// threshold for one alpha, with its Wilson bounds, against the analytic
/// bound. A violation is claimed only when statistically significant,
/// i.e. when even the Wilson 99% lower bound exceeds the analytic bound.
#[derive(Debug, Clone, PartialEq)]
pub struct TailComparison {
    pub alpha: f64,
    pub threshold: f64,
    pub empirical_tail: f64,
    pub ci_upper: f64,
    pub theoretical_bound: f64,
    pub satisfied: bool,
}

/// Compare the empirical tail of `dist` against the theorem bound at each
/// alpha in `alphas`.
pub fn compare_tail(
    dist: &EmpiricalDistribution,
    inputs: TheoremInputs,
    alphas: &[f64],
) -> Result<Vec<TailComparison>> {
    if dist.values.is_empty() {
        return domain("empirical distribution is empty");
    }
    alphas
        .iter()
        .map(|&alpha| {
            let TailBound { bound, threshold } = theoretical_tail(inputs, alpha)?;
            let below = dist.values.iter().filter(|&&v| v < threshold).count();
            let empirical_tail = below as f64 / dist.values.len() as f64;
            let ci_upper = stats::wilson_upper_99(below, dist.values.len());
            let ci_lower = stats::wilson_lower_99(below, dist.values.len());
            Ok(TailComparison {
                alpha,
                threshold,
                empirical_tail,
                ci_upper,
                theoretical_bound: bound,
                satisfied: empirical_tail <= bound || ci_lower <= bound,
            })
        })
        .collect()
}

/// Summary of per-trial objective / offline optimum ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioSummary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub std: f64,
    /// One-sided 99% lower confidence bound on the mean ratio.
    pub lower99: f64,
}

pub fn competitive_ratio_summary(
    dist: &EmpiricalDistribution,
    oracle_objective: f64,
) -> Result<RatioSummary> {
    if !oracle_objective.is_finite() || oracle_objective <= 0.0 {
        return domain(format!(
            "oracle objective must be positive, got {oracle_objective}"
        ));
    }
    if dist.values.is_empty() {
        return domain("empirical distribution is empty");
    }
    let ratios: Vec<f64> = dist.values.iter().map(|v| v / oracle_objective).collect();
    let (mean, std) = stats::mean_std(&ratios);
    Ok(RatioSummary {
        mean,
        min: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        max: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        std,
        lower99: stats::mean_lower_99(&ratios),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_disjoint_perfect, gen_upper_triangular};

    fn bip(g: crate::graph::BipartiteInstance) -> Instance {
        Instance::Bipartite(g)
    }

    #[test]
    fn mcdiarmid_matches_hand_arithmetic() {
        let bound = mcdiarmid_bound(&vec![1.0; 100], 10.0).unwrap();
        assert!((bound - (-2.0f64).exp()).abs() < 1e-12);
        let bound = mcdiarmid_bound(&[3.0, 4.0], 5.0).unwrap();
        assert!((bound - (-2.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn mcdiarmid_decreases_in_t() {
        let c = vec![1.0; 10];
        let mut last = 1.0;
        for t in [1.0, 2.0, 3.0, 4.0] {
            let b = mcdiarmid_bound(&c, t).unwrap();
            assert!(b < last);
            last = b;
        }
    }

    #[test]
    fn mcdiarmid_domain_errors() {
        assert!(mcdiarmid_bound(&[1.0], 0.0).is_err());
        assert!(mcdiarmid_bound(&[-1.0], 1.0).is_err());
        assert!(mcdiarmid_bound(&[0.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn theoretical_tail_hand_values() {
        let t1 = theoretical_tail(TheoremInputs::T1 { n: 20 }, 0.3).unwrap();
        assert!((t1.bound - (-3.6f64).exp()).abs() < 1e-12);
        assert!((t1.threshold - (one_minus_inv_e() - 0.3) * 20.0).abs() < 1e-12);
        assert!((t1.threshold - 6.64).abs() < 0.01);

        let t2 = theoretical_tail(TheoremInputs::T2 { n: 20, rho: RHO_GENERAL }, 0.3).unwrap();
        assert!((t2.bound - (-1.8f64).exp()).abs() < 1e-12);

        let t3 = theoretical_tail(
            TheoremInputs::T3 {
                opt_weight: 10.0,
                w_l2_sq: 10.0,
            },
            0.5,
        )
        .unwrap();
        assert!((t3.bound - (-0.0125f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn theoretical_tail_domain_errors() {
        assert!(theoretical_tail(TheoremInputs::T1 { n: 0 }, 0.1).is_err());
        assert!(theoretical_tail(TheoremInputs::T1 { n: 5 }, 0.0).is_err());
        assert!(theoretical_tail(TheoremInputs::T2 { n: 5, rho: 1.5 }, 0.1).is_err());
        assert!(theoretical_tail(
            TheoremInputs::T3 {
                opt_weight: 0.0,
                w_l2_sq: 1.0
            },
            0.1
        )
        .is_err());
    }

    #[test]
    fn single_edge_campaign_is_constant() {
        let g = bip(gen_disjoint_perfect(1).unwrap());
        let dist = monte_carlo(&g, "single_edge", Engine::Ranking, None, 500, 3).unwrap();
        assert!(dist.values.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn upper_triangular_2_mean_near_three_halves() {
        let g = bip(gen_upper_triangular(2).unwrap());
        let dist = monte_carlo(&g, "ut2", Engine::Ranking, None, 100_000, 42).unwrap();
        let mean = stats::mean(&dist.values);
        assert!((1.494..=1.506).contains(&mean), "mean {mean}");
    }

    #[test]
    fn upper_triangular_3_mean_near_thirteen_sixths() {
        let g = bip(gen_upper_triangular(3).unwrap());
        let dist = monte_carlo(&g, "ut3", Engine::Ranking, None, 100_000, 42).unwrap();
        let mean = stats::mean(&dist.values);
        let exact = 13.0 / 6.0;
        assert!((mean - exact).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn exact_expectation_enumerates_orderings() {
        let ut2 = bip(gen_upper_triangular(2).unwrap());
        assert_eq!(exact_expectation_small(&ut2, Engine::Ranking).unwrap(), 1.5);
        let ut3 = bip(gen_upper_triangular(3).unwrap());
        let value = exact_expectation_small(&ut3, Engine::Ranking).unwrap();
        assert!((value - 13.0 / 6.0).abs() < 1e-12);
        for n in 1..=4 {
            let g = bip(gen_disjoint_perfect(n).unwrap());
            assert_eq!(
                exact_expectation_small(&g, Engine::Ranking).unwrap(),
                n as f64
            );
        }
    }

    #[test]
    fn exact_expectation_rejects_unsupported_inputs() {
        let g = bip(gen_upper_triangular(9).unwrap());
        assert!(exact_expectation_small(&g, Engine::Ranking).is_err());
        let g = bip(gen_upper_triangular(2).unwrap().with_weights(vec![1.0, 2.0]));
        assert!(exact_expectation_small(&g, Engine::Ranking).is_err());
        let g = bip(gen_upper_triangular(2).unwrap());
        assert!(exact_expectation_small(&g, Engine::VertexWeighted).is_err());
    }

    #[test]
    fn monte_carlo_matches_exact_expectation_within_four_se() {
        for n in 2..=5 {
            let g = bip(gen_upper_triangular(n).unwrap());
            let exact = exact_expectation_small(&g, Engine::Ranking).unwrap();
            let dist = monte_carlo(&g, "ut", Engine::Ranking, None, 40_000, 9).unwrap();
            let (mean, std) = stats::mean_std(&dist.values);
            let se = std / (dist.trials as f64).sqrt();
            assert!(
                (mean - exact).abs() <= 4.0 * se.max(1e-9),
                "n={n} mean={mean} exact={exact} se={se}"
            );
        }
    }

    #[test]
    fn campaigns_are_reproducible_and_schedule_independent() {
        let g = bip(gen_upper_triangular(6).unwrap());
        let a = monte_carlo(&g, "ut6", Engine::Ranking, None, 4000, 11).unwrap();
        let b = monte_carlo(&g, "ut6", Engine::Ranking, None, 4000, 11).unwrap();
        assert_eq!(a, b);
        let seq = monte_carlo_sequential(&g, "ut6", Engine::Ranking, None, 4000, 11).unwrap();
        assert_eq!(a, seq);
        let other = monte_carlo(&g, "ut6", Engine::Ranking, None, 4000, 12).unwrap();
        assert_ne!(a.values, other.values);
    }

    #[test]
    fn constant_distribution_has_zero_tails() {
        let g = bip(gen_disjoint_perfect(10).unwrap());
        let dist = monte_carlo(&g, "dp10", Engine::Ranking, None, 2000, 5).unwrap();
        let rows = compare_tail(&dist, TheoremInputs::T1 { n: 10 }, &default_alpha_grid()).unwrap();
        for row in rows {
            assert_eq!(row.empirical_tail, 0.0);
            assert!(row.satisfied);
        }
    }

    #[test]
    fn tails_are_monotone_in_the_threshold() {
        let g = bip(gen_upper_triangular(8).unwrap());
        let dist = monte_carlo(&g, "ut8", Engine::Ranking, None, 5000, 17).unwrap();
        let count_below =
            |t: f64| dist.values.iter().filter(|&&v| v < t).count() as f64 / dist.trials as f64;
        let mut last = 0.0;
        for t in [2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0] {
            let tail = count_below(t);
            assert!(tail >= last);
            last = tail;
        }
    }

    #[test]
    fn unweighted_trials_respect_floor_and_ceiling() {
        use crate::oracles::max_matching_bipartite;
        for seed in 0..10 {
            let g = crate::generators::gen_random_bipartite(8, 8, 0.4, seed, None).unwrap();
            let opt = max_matching_bipartite(&g).objective;
            let dist = monte_carlo(&bip(g), "rb", Engine::Ranking, None, 2000, seed).unwrap();
            for &v in &dist.values {
                assert!(v <= opt, "seed {seed}");
                assert!(v >= (opt / 2.0).ceil(), "seed {seed}");
            }
        }
    }

    #[test]
    fn ratio_summary_on_calibration_families() {
        let g = bip(gen_disjoint_perfect(6).unwrap());
        let dist = monte_carlo(&g, "dp6", Engine::Ranking, None, 2000, 2).unwrap();
        let summary = competitive_ratio_summary(&dist, 6.0).unwrap();
        assert_eq!(summary.mean, 1.0);
        assert_eq!(summary.min, 1.0);
        assert_eq!(summary.lower99, 1.0);

        let g = bip(gen_upper_triangular(2).unwrap());
        let dist = monte_carlo(&g, "ut2", Engine::Ranking, None, 100_000, 42).unwrap();
        let summary = competitive_ratio_summary(&dist, 2.0).unwrap();
        assert!((summary.mean - 0.75).abs() < 0.005, "mean {}", summary.mean);
        assert_eq!(summary.min, 0.5);
        assert_eq!(summary.max, 1.0);

        assert!(competitive_ratio_summary(&dist, 0.0).is_err());
    }
}
