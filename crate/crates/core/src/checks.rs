//! Exact per-run verification of the structural properties that drive the
//! tail bounds: bounded differences of the objective in a single rank
//! coordinate, the vertex-removal sandwich, utility monotonicity under
//! removal, and the per-edge revenue + utility expectation.
//!
//! Unweighted comparisons are integer-exact; weighted ones carry 1e-9
//! absolute slack for float noise. Checks never mutate their inputs.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use rand::Rng;

use crate::engines::Engine;
use crate::error::{domain, Result};
use crate::generators;
use crate::graph::{Instance, RankVector};
use crate::seeding::{draw_ranks, trial_ranks, trial_rng, trial_seed};
use crate::stats;

/// Absolute slack for weighted comparisons.
pub const WEIGHTED_SLACK: f64 = 1e-9;

/// Structural property identifiers, as used in `check` CSV output.
///
/// - `L3` / `L5` / `L7`: one rank coordinate moves the objective by at
///   most 1 (ranking, fully_online) or (1 + 2/eps) w_j (eps_ranking);
/// - `L4` / `L6` / `L8`: removing a vertex moves the objective by at most
///   1, or into [w(M) - (2/eps) w_j, w(M) + w_j] for eps_ranking;
/// - `L8u`: no buyer's utility drops when a seller is added back;
/// - `L9`: E[r_j + u_i] >= (1 - 1/e - eps) w_j per edge (statistical).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lemma {
    L3,
    L4,
    L5,
    L6,
    L7,
    L8,
    L8Utility,
    L9,
}

impl Lemma {
    pub const ALL: [Lemma; 8] = [
        Lemma::L3,
        Lemma::L4,
        Lemma::L5,
        Lemma::L6,
        Lemma::L7,
        Lemma::L8,
        Lemma::L8Utility,
        Lemma::L9,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Lemma::L3 => "L3",
            Lemma::L4 => "L4",
            Lemma::L5 => "L5",
            Lemma::L6 => "L6",
            Lemma::L7 => "L7",
            Lemma::L8 => "L8",
            Lemma::L8Utility => "L8u",
            Lemma::L9 => "L9",
        }
    }

    pub fn engine(self) -> Engine {
        match self {
            Lemma::L3 | Lemma::L4 => Engine::Ranking,
            Lemma::L5 | Lemma::L6 => Engine::FullyOnline,
            Lemma::L7 | Lemma::L8 | Lemma::L8Utility | Lemma::L9 => Engine::EpsRanking,
        }
    }

    /// Exact checks gate the `check` command's exit code; L9 rows are
    /// informational because the property is an expectation.
    pub fn is_exact(self) -> bool {
        self != Lemma::L9
    }
}

impl std::fmt::Display for Lemma {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Lemma {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Lemma::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| {
                format!(
                    "unknown suite {s:?}; expected one of {}",
                    Lemma::ALL.map(|l| l.name()).join(", ")
                )
            })
    }
}

/// Outcome of one structural check. `f_x` / `f_x_prime` are the compared
/// quantities: the objectives under x and x' for bounded differences, the
/// objectives on G and G_{-j} for removal, the worst buyer's utilities
/// for L8u, and (estimate, lower confidence bound) for L9.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaReport {
    pub lemma: Lemma,
    pub engine: Engine,
    pub holds: bool,
    pub f_x: f64,
    pub f_x_prime: f64,
    /// Allowed change: 1 for the unweighted checks, (1 + 2/eps) w_j for
    /// L7, (2/eps) w_j for L8's lower side, the slack for L8u, and the
    /// guarantee threshold for L9.
    pub bound: f64,
    /// Worst relative accounting residual of the underlying runs
    /// (weighted engines only).
    pub accounting_gap: Option<f64>,
}

fn bounded_difference_engine(engine: Engine) -> Result<()> {
    match engine {
        Engine::Ranking | Engine::FullyOnline | Engine::EpsRanking => Ok(()),
        other => domain(format!(
            "structural checks cover ranking, fully_online and eps_ranking, not {other}"
        )),
    }
}

fn check_eps_param(engine: Engine, eps: Option<f64>) -> Result<Option<f64>> {
    match (engine, eps) {
        (Engine::EpsRanking, Some(e)) if e > 0.0 && e.is_finite() => Ok(Some(e)),
        (Engine::EpsRanking, Some(e)) => domain(format!("eps must be positive, got {e}")),
        (Engine::EpsRanking, None) => domain("eps_ranking checks need eps"),
        (_, None) => Ok(None),
        (other, Some(_)) => domain(format!("engine {other} takes no eps")),
    }
}

/// Compare f(x) against f(x') where x' replaces coordinate `j_star` with
/// `theta`. Holds when |f(x) - f(x')| stays within the engine's bound:
/// 1 for the unweighted engines, (1 + 2/eps) w_{j*} for eps_ranking.
pub fn check_bounded_difference(
    instance: &Instance,
    engine: Engine,
    x: &RankVector,
    j_star: usize,
    theta: f64,
    eps: Option<f64>,
) -> Result<LemmaReport> {
    bounded_difference_engine(engine)?;
    let eps = check_eps_param(engine, eps)?;
    let x_prime = x.with_coordinate(j_star, theta)?;
    let run = engine.run(instance, x, eps)?;
    let run_prime = engine.run(instance, &x_prime, eps)?;
    let diff = (run.objective - run_prime.objective).abs();
    let (lemma, bound, holds, gap) = match engine {
        Engine::Ranking => (Lemma::L3, 1.0, diff <= 1.0, None),
        Engine::FullyOnline => (Lemma::L5, 1.0, diff <= 1.0, None),
        Engine::EpsRanking => {
            let eps = eps.expect("validated above");
            let w = instance.as_bipartite()?.weights().expect("engine ran")[j_star];
            let bound = (1.0 + 2.0 / eps) * w;
            let gap = run
                .accounting_gap_relative()
                .max(run_prime.accounting_gap_relative());
            (Lemma::L7, bound, diff <= bound + WEIGHTED_SLACK, Some(gap))
        }
        _ => unreachable!(),
    };
    Ok(LemmaReport {
        lemma,
        engine,
        holds,
        f_x: run.objective,
        f_x_prime: run_prime.objective,
        bound,
        accounting_gap: gap,
    })
}

/// Run an engine on G and on G_{-j} with the same ranks and test the
/// sandwich: |M_{-j}| <= |M| <= |M_{-j}| + 1 for the unweighted engines,
/// w(M_{-j}) - (2/eps) w_j <= w(M) <= w(M_{-j}) + w_j for eps_ranking.
pub fn check_vertex_removal(
    instance: &Instance,
    engine: Engine,
    x: &RankVector,
    j: usize,
    eps: Option<f64>,
) -> Result<LemmaReport> {
    bounded_difference_engine(engine)?;
    let eps = check_eps_param(engine, eps)?;
    let removed = instance.remove_vertex(j)?;
    let run = engine.run(instance, x, eps)?;
    let run_removed = engine.run(&removed, x, eps)?;
    let f = run.objective;
    let f_removed = run_removed.objective;
    let (lemma, bound, holds, gap) = match engine {
        Engine::Ranking => (
            Lemma::L4,
            1.0,
            f_removed <= f && f <= f_removed + 1.0,
            None,
        ),
        Engine::FullyOnline => (
            Lemma::L6,
            1.0,
            f_removed <= f && f <= f_removed + 1.0,
            None,
        ),
        Engine::EpsRanking => {
            let eps = eps.expect("validated above");
            let w = instance.as_bipartite()?.weights().expect("engine ran")[j];
            let lower_allowance = 2.0 / eps * w;
            let holds = f_removed - lower_allowance - WEIGHTED_SLACK <= f
                && f <= f_removed + w + WEIGHTED_SLACK;
            let gap = run
                .accounting_gap_relative()
                .max(run_removed.accounting_gap_relative());
            (Lemma::L8, lower_allowance, holds, Some(gap))
        }
        _ => unreachable!(),
    };
    Ok(LemmaReport {
        lemma,
        engine,
        holds,
        f_x: f,
        f_x_prime: f_removed,
        bound,
        accounting_gap: gap,
    })
}

/// No buyer's utility under eps_ranking may be smaller on G than on
/// G_{-j} (removing a seller can only hurt the buyers). `f_x` and
/// `f_x_prime` report the utilities of the buyer with the worst margin.
pub fn check_utility_monotonicity(
    instance: &Instance,
    x: &RankVector,
    j: usize,
    eps: f64,
) -> Result<LemmaReport> {
    if !eps.is_finite() || eps < 0.0 {
        return domain(format!("eps must be finite and >= 0, got {eps}"));
    }
    let g = instance.as_bipartite()?;
    if g.weights().is_none() {
        return Err(crate::error::Error::WeightsAbsent);
    }
    let removed = instance.remove_vertex(j)?;
    let run = crate::engines::run_eps_ranking(g, x, eps)?;
    let run_removed = crate::engines::run_eps_ranking(removed.as_bipartite()?, x, eps)?;
    let mut worst: Option<(f64, f64)> = None;
    let mut holds = true;
    for (u_full, u_removed) in run.utility.iter().zip(&run_removed.utility) {
        let margin = u_full - u_removed;
        if margin < -WEIGHTED_SLACK {
            holds = false;
        }
        if worst.is_none_or(|(a, b)| margin < a - b) {
            worst = Some((*u_full, *u_removed));
        }
    }
    let (f_x, f_x_prime) = worst.unwrap_or((0.0, 0.0));
    let gap = run
        .accounting_gap_relative()
        .max(run_removed.accounting_gap_relative());
    Ok(LemmaReport {
        lemma: Lemma::L8Utility,
        engine: Engine::EpsRanking,
        holds,
        f_x,
        f_x_prime,
        bound: WEIGHTED_SLACK,
        accounting_gap: Some(gap),
    })
}

/// Monte Carlo estimate of E[r_j + u_i] for one edge under eps_ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeBoundReport {
    /// (buyer, seller).
    pub edge: (usize, usize),
    pub eps: f64,
    pub trials: usize,
    /// Mean of r_j + u_i across trials.
    pub estimate: f64,
    /// Mean of r_j alone (closed form 1 - 1/e per unit weight when j is
    /// matched in every trial at eps = 0).
    pub mean_revenue: f64,
    pub std_error: f64,
    /// One-sided 99% lower confidence bound on E[r_j + u_i].
    pub lower99: f64,
    /// (1 - 1/e - eps) w_j.
    pub target: f64,
    /// Whether the lower confidence bound clears the target. Statistical,
    /// not exact.
    pub holds: bool,
}

/// Estimate E[r_j + u_i] >= (1 - 1/e - eps) w_j for `edge = (buyer,
/// seller)` by sampling fresh ranks per trial.
pub fn check_revenue_utility_edge_bound(
    instance: &Instance,
    eps: f64,
    edge: (usize, usize),
    trials: usize,
    seed: u64,
) -> Result<EdgeBoundReport> {
    let g = instance.as_bipartite()?;
    let weights = g.weights().ok_or(crate::error::Error::WeightsAbsent)?;
    let (buyer, seller) = edge;
    if !g.has_edge(buyer, seller) {
        return domain(format!("({buyer}, {seller}) is not an edge of the instance"));
    }
    if trials < 1000 {
        return domain(format!("edge bound estimation needs trials >= 1000, got {trials}"));
    }
    if !eps.is_finite() || eps < 0.0 {
        return domain(format!("eps must be finite and >= 0, got {eps}"));
    }
    let dim = g.sellers();
    let sample = |k: usize| -> Result<(f64, f64)> {
        let ranks = trial_ranks(seed, k as u64, dim);
        let record = crate::engines::run_eps_ranking(g, &ranks, eps)?;
        Ok((
            record.revenue[seller] + record.utility[buyer],
            record.revenue[seller],
        ))
    };
    #[cfg(feature = "parallel")]
    let samples: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(sample)
        .collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let samples: Vec<(f64, f64)> = (0..trials).map(sample).collect::<Result<_>>()?;

    let totals: Vec<f64> = samples.iter().map(|&(t, _)| t).collect();
    let revenues: Vec<f64> = samples.iter().map(|&(_, r)| r).collect();
    let (estimate, std) = stats::mean_std(&totals);
    let std_error = std / (trials as f64).sqrt();
    let lower99 = estimate - stats::Z_99 * std_error;
    let target = (crate::experiments::one_minus_inv_e() - eps) * weights[seller];
    Ok(EdgeBoundReport {
        edge,
        eps,
        trials,
        estimate,
        mean_revenue: stats::mean(&revenues),
        std_error,
        lower99,
        target,
        holds: lower99 >= target,
    })
}

/// Configuration for a randomized suite of one structural check.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub lemma: Lemma,
    pub cases: usize,
    pub seed: u64,
    /// Fixed eps for the weighted suites; when `None` cases cycle through
    /// {0.1, 0.25, 0.5}.
    pub eps: Option<f64>,
    /// Trials per case, L9 only.
    pub trials: usize,
}

impl SuiteConfig {
    pub fn new(lemma: Lemma, cases: usize, seed: u64) -> Self {
        Self {
            lemma,
            cases,
            seed,
            eps: None,
            trials: 1000,
        }
    }

    pub fn with_eps(mut self, eps: Option<f64>) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }
}

/// One row of a suite run.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteCase {
    pub case_seed: u64,
    pub report: LemmaReport,
}

/// Aggregated suite outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub lemma: Lemma,
    pub cases: Vec<SuiteCase>,
    pub violations: usize,
    /// Worst relative accounting residual across all weighted runs.
    pub max_accounting_gap: f64,
}

const SUITE_EPS_CYCLE: [f64; 3] = [0.1, 0.25, 0.5];
const SUITE_P_CYCLE: [f64; 3] = [0.2, 0.5, 0.8];
const SUITE_MAX_SIDE: usize = 12;
const SUITE_WEIGHT_RANGE: (f64, f64) = (1.0, 1e4);

/// Random bipartite case for the suites: Erdős–Rényi with p cycling
/// through {0.2, 0.5, 0.8}, sides up to 12, log-uniform weights in
/// [1, 1e4] when weighted.
fn random_bipartite_case(
    rng: &mut rand_chacha::ChaCha8Rng,
    p: f64,
    weighted: bool,
) -> Result<crate::graph::BipartiteInstance> {
    let n_sellers = rng.gen_range(1..=SUITE_MAX_SIDE);
    let n_buyers = rng.gen_range(1..=SUITE_MAX_SIDE);
    let weight_range = weighted.then_some(SUITE_WEIGHT_RANGE);
    generators::gen_random_bipartite(n_sellers, n_buyers, p, rng.gen(), weight_range)
}

fn suite_case(config: &SuiteConfig, k: usize) -> Result<SuiteCase> {
    let case_seed = trial_seed(config.seed, k as u64);
    let mut rng = trial_rng(config.seed, k as u64);
    let p = SUITE_P_CYCLE[k % SUITE_P_CYCLE.len()];
    let eps = config
        .eps
        .unwrap_or(SUITE_EPS_CYCLE[k % SUITE_EPS_CYCLE.len()]);
    let report = match config.lemma {
        Lemma::L3 | Lemma::L4 => {
            let g = Instance::Bipartite(random_bipartite_case(&mut rng, p, false)?);
            let dim = g.as_bipartite()?.sellers();
            let x = draw_ranks(&mut rng, dim);
            let j = rng.gen_range(0..dim);
            if config.lemma == Lemma::L3 {
                let theta = rng.gen::<f64>();
                check_bounded_difference(&g, Engine::Ranking, &x, j, theta, None)?
            } else {
                check_vertex_removal(&g, Engine::Ranking, &x, j, None)?
            }
        }
        Lemma::L5 | Lemma::L6 => {
            let n = rng.gen_range(2..=SUITE_MAX_SIDE);
            let g = Instance::FullyOnline(generators::gen_random_fully_online(n, p, rng.gen())?);
            let x = draw_ranks(&mut rng, n);
            let j = rng.gen_range(0..n);
            if config.lemma == Lemma::L5 {
                let theta = rng.gen::<f64>();
                check_bounded_difference(&g, Engine::FullyOnline, &x, j, theta, None)?
            } else {
                check_vertex_removal(&g, Engine::FullyOnline, &x, j, None)?
            }
        }
        Lemma::L7 | Lemma::L8 | Lemma::L8Utility => {
            let g = Instance::Bipartite(random_bipartite_case(&mut rng, p, true)?);
            let dim = g.as_bipartite()?.sellers();
            let x = draw_ranks(&mut rng, dim);
            let j = rng.gen_range(0..dim);
            match config.lemma {
                Lemma::L7 => {
                    let theta = rng.gen::<f64>();
                    check_bounded_difference(&g, Engine::EpsRanking, &x, j, theta, Some(eps))?
                }
                Lemma::L8 => check_vertex_removal(&g, Engine::EpsRanking, &x, j, Some(eps))?,
                _ => check_utility_monotonicity(&g, &x, j, eps)?,
            }
        }
        Lemma::L9 => {
            // resample until the instance has at least one edge
            let g = loop {
                let candidate = random_bipartite_case(&mut rng, p, true)?;
                if candidate.edge_count() > 0 {
                    break candidate;
                }
            };
            let edges: Vec<(usize, usize)> = g.edges().collect();
            let edge = edges[rng.gen_range(0..edges.len())];
            let report =
                check_revenue_utility_edge_bound(&Instance::Bipartite(g), eps, edge, config.trials, rng.gen())?;
            LemmaReport {
                lemma: Lemma::L9,
                engine: Engine::EpsRanking,
                holds: report.holds,
                f_x: report.estimate,
                f_x_prime: report.lower99,
                bound: report.target,
                accounting_gap: None,
            }
        }
    };
    Ok(SuiteCase { case_seed, report })
}

/// Run `config.cases` independently seeded random cases of one check.
/// Cases run in parallel under the `parallel` feature; the outcome is
/// schedule-independent because every case derives its seed from its
/// index.
pub fn run_lemma_suite(config: &SuiteConfig) -> Result<SuiteOutcome> {
    if config.cases < 1 {
        return domain("suite needs cases >= 1");
    }
    if let Some(eps) = config.eps {
        if !eps.is_finite() || eps <= 0.0 {
            return domain(format!("eps must be positive, got {eps}"));
        }
    }
    #[cfg(feature = "parallel")]
    let cases: Vec<SuiteCase> = (0..config.cases)
        .into_par_iter()
        .map(|k| suite_case(config, k))
        .collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let cases: Vec<SuiteCase> = (0..config.cases)
        .map(|k| suite_case(config, k))
        .collect::<Result<_>>()?;

    let violations = cases
        .iter()
        .filter(|c| config.lemma.is_exact() && !c.report.holds)
        .count();
    let max_accounting_gap = cases
        .iter()
        .filter_map(|c| c.report.accounting_gap)
        .fold(0.0f64, f64::max);
    Ok(SuiteOutcome {
        lemma: config.lemma,
        cases,
        violations,
        max_accounting_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_figure1, gen_upper_triangular};

    fn ranks(values: &[f64]) -> RankVector {
        RankVector::new(values.to_vec()).unwrap()
    }

    #[test]
    fn identity_perturbation_changes_nothing() {
        let g = Instance::Bipartite(gen_upper_triangular(4).unwrap());
        let x = ranks(&[0.4, 0.1, 0.8, 0.3]);
        let report =
            check_bounded_difference(&g, Engine::Ranking, &x, 2, x.get(2), None).unwrap();
        assert!(report.holds);
        assert_eq!(report.f_x, report.f_x_prime);
        assert_eq!(report.lemma, Lemma::L3);
    }

    #[test]
    fn upper_triangular_2_bounded_difference_witness() {
        let g = Instance::Bipartite(gen_upper_triangular(2).unwrap());
        let x = ranks(&[0.3, 0.6]);
        let report = check_bounded_difference(&g, Engine::Ranking, &x, 0, 0.9, None).unwrap();
        assert_eq!(report.f_x, 2.0);
        assert_eq!(report.f_x_prime, 1.0);
        assert_eq!(report.bound, 1.0);
        assert!(report.holds);
    }

    #[test]
    fn upper_triangular_2_removal_witness() {
        let g = Instance::Bipartite(gen_upper_triangular(2).unwrap());
        let x = ranks(&[0.6, 0.3]);
        let report = check_vertex_removal(&g, Engine::Ranking, &x, 1, None).unwrap();
        assert_eq!(report.lemma, Lemma::L4);
        assert_eq!(report.f_x, 1.0);
        assert_eq!(report.f_x_prime, 1.0);
        assert!(report.holds);
    }

    #[test]
    fn removing_an_isolated_seller_is_a_no_op() {
        let g = crate::graph::BipartiteInstance::from_edges(2, 1, &[(0, 0)], vec![0]).unwrap();
        let g = Instance::Bipartite(g);
        let x = ranks(&[0.5, 0.7]);
        let report = check_vertex_removal(&g, Engine::Ranking, &x, 1, None).unwrap();
        assert_eq!(report.f_x, report.f_x_prime);
        assert!(report.holds);
    }

    #[test]
    fn weight_pathology_utilities_are_monotone_under_removal() {
        let g = Instance::Bipartite(gen_figure1());
        for x1 in [0.01, 0.5, 1.0 - 1e-12] {
            let x = ranks(&[0.3, x1]);
            let report = check_utility_monotonicity(&g, &x, 1, 0.1).unwrap();
            assert!(report.holds);
        }
    }

    #[test]
    fn parameter_domains_are_enforced() {
        let g = Instance::Bipartite(gen_upper_triangular(2).unwrap());
        let x = ranks(&[0.3, 0.6]);
        // theta outside [0,1)
        assert!(check_bounded_difference(&g, Engine::Ranking, &x, 0, 1.0, None).is_err());
        // j out of range
        assert!(check_bounded_difference(&g, Engine::Ranking, &x, 5, 0.5, None).is_err());
        // eps for an unweighted engine
        assert!(check_bounded_difference(&g, Engine::Ranking, &x, 0, 0.5, Some(0.1)).is_err());
        // eps_ranking without eps
        let w = Instance::Bipartite(gen_upper_triangular(2).unwrap().with_weights(vec![1.0, 2.0]));
        assert!(check_bounded_difference(&w, Engine::EpsRanking, &x, 0, 0.5, None).is_err());
        assert!(check_bounded_difference(&w, Engine::EpsRanking, &x, 0, 0.5, Some(0.0)).is_err());
        // engine outside the check family
        assert!(check_bounded_difference(&w, Engine::SingleValued, &x, 0, 0.5, None).is_err());
    }

    #[test]
    fn l7_bound_column_is_one_plus_two_over_eps_times_weight() {
        let g = Instance::Bipartite(gen_figure1());
        let x = ranks(&[0.2, 0.9]);
        let report =
            check_bounded_difference(&g, Engine::EpsRanking, &x, 0, 0.7, Some(0.25)).unwrap();
        assert_eq!(report.lemma, Lemma::L7);
        assert_eq!(report.bound, 9.0 * 1.0);
        assert!(report.holds);
    }

    #[test]
    fn single_edge_revenue_matches_the_closed_form() {
        let g = crate::graph::BipartiteInstance::from_edges(1, 1, &[(0, 0)], vec![0])
            .unwrap()
            .with_weights(vec![1.0]);
        let report = check_revenue_utility_edge_bound(
            &Instance::Bipartite(g),
            0.0,
            (0, 0),
            20_000,
            7,
        )
        .unwrap();
        // j is matched in every trial: E[r_j] = integral of e^(t-1) = 1 - 1/e,
        // and r_j + u_i = w_j exactly.
        let expect = crate::experiments::one_minus_inv_e();
        assert!((report.mean_revenue - expect).abs() < 0.02, "{report:?}");
        assert!((report.estimate - 1.0).abs() < 1e-9);
        assert!(report.holds);
    }

    #[test]
    fn weight_pathology_edge_bound_holds_with_smoothing() {
        let g = Instance::Bipartite(gen_figure1());
        let report = check_revenue_utility_edge_bound(&g, 0.1, (0, 1), 5000, 11).unwrap();
        assert!(report.holds);
        assert!(report.estimate >= report.target);
    }

    #[test]
    fn edge_bound_ci_half_width_is_small_at_1e5_trials() {
        // r + u lies in [0, w], so the sample sd is at most w/2 and the
        // 99% half-width at 1e5 trials stays well under 0.02 w
        let g = crate::generators::gen_random_bipartite(6, 8, 0.5, 3, Some((1.0, 1e4))).unwrap();
        let edge = g.edges().next().unwrap();
        let w = g.weights().unwrap()[edge.1];
        let report =
            check_revenue_utility_edge_bound(&Instance::Bipartite(g), 0.25, edge, 100_000, 5)
                .unwrap();
        let half_width = stats::Z_99 * report.std_error;
        assert!(half_width <= 0.02 * w, "half width {half_width} vs w {w}");
    }

    #[test]
    fn edge_bound_rejects_bad_parameters() {
        let g = Instance::Bipartite(gen_figure1());
        assert!(check_revenue_utility_edge_bound(&g, 0.1, (0, 1), 10, 1).is_err());
        assert!(check_revenue_utility_edge_bound(&g, 0.1, (1, 1), 5000, 1).is_err());
        assert!(check_revenue_utility_edge_bound(&g, -0.1, (0, 1), 5000, 1).is_err());
    }

    #[test]
    fn small_suites_have_zero_violations() {
        for lemma in [
            Lemma::L3,
            Lemma::L4,
            Lemma::L5,
            Lemma::L6,
            Lemma::L7,
            Lemma::L8,
            Lemma::L8Utility,
        ] {
            let outcome = run_lemma_suite(&SuiteConfig::new(lemma, 400, 123)).unwrap();
            assert_eq!(outcome.violations, 0, "{lemma}");
            assert_eq!(outcome.cases.len(), 400);
            assert!(outcome.max_accounting_gap <= 1e-9, "{lemma}");
        }
    }

    #[test]
    fn suites_are_reproducible() {
        let a = run_lemma_suite(&SuiteConfig::new(Lemma::L4, 200, 5)).unwrap();
        let b = run_lemma_suite(&SuiteConfig::new(Lemma::L4, 200, 5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn removal_never_grows_the_matching_of_the_removed_run() {
        // monotone direction of the sandwich, separately assertable
        let outcome = run_lemma_suite(&SuiteConfig::new(Lemma::L4, 300, 77)).unwrap();
        for case in &outcome.cases {
            assert!(case.report.f_x_prime <= case.report.f_x);
        }
        let outcome = run_lemma_suite(&SuiteConfig::new(Lemma::L6, 300, 78)).unwrap();
        for case in &outcome.cases {
            assert!(case.report.f_x_prime <= case.report.f_x);
        }
    }

    #[test]
    fn l9_suite_is_informational_but_consistent() {
        let outcome = run_lemma_suite(
            &SuiteConfig::new(Lemma::L9, 10, 99).with_trials(2000),
        )
        .unwrap();
        assert_eq!(outcome.violations, 0); // L9 rows never count as violations
        for case in &outcome.cases {
            assert!(case.report.holds, "statistical check failed: {case:?}");
        }
    }
}
