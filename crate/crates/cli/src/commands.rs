//! Implementations of the five subcommands. Every command is
//! deterministic given its arguments; all randomness flows through the
//! seeds recorded in the output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ranking_core::checks::{run_lemma_suite, Lemma, SuiteConfig};
use ranking_core::experiments::{
    compare_tail, competitive_ratio_summary, monte_carlo, TheoremInputs, RHO_BIPARTITE,
    RHO_GENERAL,
};
use ranking_core::format;
use ranking_core::generators::GeneratorSpec;
use ranking_core::oracles::{
    max_matching_bipartite, max_matching_general_with_cap, max_weight_seller_matching,
};
use ranking_core::seeding::trial_ranks;
use ranking_core::{Engine, Instance, Matching, RankVector};

use crate::config::{ExperimentConfig, InstanceSource};
use crate::error::{CliError, Result};

fn load_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    let instance = format::from_json(&text)
        .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    Ok(instance)
}

fn require_valid(instance: &Instance, what: &str) -> Result<()> {
    let report = instance.validate();
    if report.is_valid() {
        Ok(())
    } else {
        Err(CliError::usage(format!("{what} is not valid: {report}")))
    }
}

fn resolve_instance(source: &InstanceSource) -> Result<(Instance, String)> {
    let instance = match source {
        InstanceSource::Path(path) => load_instance(path)?,
        InstanceSource::Generator(spec) => spec.build()?,
    };
    require_valid(&instance, &source.id())?;
    Ok((instance, source.id()))
}

fn pairs_line(matching: &Matching) -> String {
    if matching.is_empty() {
        return "-".to_string();
    }
    matching
        .pairs()
        .iter()
        .map(|(a, b)| format!("({a},{b})"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn oracle_lines(instance: &Instance, cap: usize) -> Result<Vec<String>> {
    let mut lines = Vec::new();
    match instance {
        Instance::Bipartite(g) => {
            let cardinality = max_matching_bipartite(g);
            lines.push(format!("max_matching: {}", cardinality.objective));
            lines.push(format!("matching: {}", pairs_line(&cardinality.matching)));
            if g.weights().is_some() {
                let weighted = max_weight_seller_matching(g)?;
                lines.push(format!("max_weight: {}", weighted.objective));
                lines.push(format!("weight_matching: {}", pairs_line(&weighted.matching)));
            }
        }
        Instance::FullyOnline(g) => {
            let result = max_matching_general_with_cap(g, cap)?;
            lines.push(format!("max_matching: {}", result.objective));
            lines.push(format!("matching: {}", pairs_line(&result.matching)));
        }
    }
    Ok(lines)
}

/// `generate`: build an instance from a family spec, write the instance
/// file, and record the spec alongside it as provenance.
pub fn cmd_generate(spec: &GeneratorSpec, output: &Path, with_oracle: bool) -> Result<()> {
    let instance = spec.build()?;
    debug_assert!(instance.validate().is_valid());
    fs::write(output, format::to_json(&instance))
        .map_err(|e| CliError::io(format!("{}: {e}", output.display())))?;
    let spec_path = output.with_extension("spec.json");
    let mut spec_json = serde_json::to_string_pretty(spec).expect("spec serializes");
    spec_json.push('\n');
    fs::write(&spec_path, spec_json)
        .map_err(|e| CliError::io(format!("{}: {e}", spec_path.display())))?;
    println!("wrote {} (spec: {})", output.display(), spec_path.display());
    if with_oracle {
        for line in oracle_lines(&instance, ranking_core::oracles::DEFAULT_BRUTE_FORCE_CAP)? {
            if line.starts_with("max_") {
                println!("{line}");
            }
        }
    }
    Ok(())
}

/// `oracle`: print the exact offline optima of an instance file.
pub fn cmd_oracle(path: &Path, cap: usize) -> Result<()> {
    let instance = load_instance(path)?;
    require_valid(&instance, &path.display().to_string())?;
    println!("kind: {}", instance.kind());
    for line in oracle_lines(&instance, cap)? {
        println!("{line}");
    }
    Ok(())
}

/// Where `run` takes its rank vector from.
pub enum RankSource {
    Seed(u64),
    File(PathBuf),
}

fn load_ranks(source: &RankSource, dim: usize) -> Result<RankVector> {
    match source {
        RankSource::Seed(seed) => Ok(trial_ranks(*seed, 0, dim)),
        RankSource::File(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
            let mut values = Vec::new();
            for token in text.split_whitespace() {
                let value: f64 = token.parse().map_err(|_| {
                    CliError::usage(format!(
                        "{}: {token:?} is not a decimal literal",
                        path.display()
                    ))
                })?;
                values.push(value);
            }
            if values.len() != dim {
                return Err(CliError::usage(format!(
                    "{}: has {} ranks, engine needs {dim}",
                    path.display(),
                    values.len()
                )));
            }
            Ok(RankVector::new(values)?)
        }
    }
}

/// `run`: one engine execution with pinned randomness, printing the
/// matching, objective, trace, and (for weighted engines) the per-vertex
/// revenue/utility accounting.
pub fn cmd_run(
    path: &Path,
    engine: Engine,
    eps: Option<f64>,
    ranks: &RankSource,
) -> Result<()> {
    let instance = load_instance(path)?;
    require_valid(&instance, &path.display().to_string())?;
    let dim = engine.rank_dim(&instance)?;
    let x = load_ranks(ranks, dim)?;
    let record = engine.run(&instance, &x, eps)?;

    println!("instance: {} ({})", path.display(), instance.kind());
    match eps {
        Some(e) => println!("engine: {engine} eps={e}"),
        None => println!("engine: {engine}"),
    }
    println!("objective: {}", record.objective);
    println!("matching: {}", pairs_line(&record.matching));
    let trace = record
        .trace
        .iter()
        .map(|(v, choice)| match choice {
            Some(j) => format!("{v}->{j}"),
            None => format!("{v}->-"),
        })
        .collect::<Vec<_>>()
        .join(" ");
    println!("trace: {trace}");
    if engine.is_weighted() {
        for (j, r) in record.revenue.iter().enumerate() {
            if *r != 0.0 {
                println!("revenue[{j}]: {r}");
            }
        }
        for (i, u) in record.utility.iter().enumerate() {
            if *u != 0.0 {
                println!("utility[{i}]: {u}");
            }
        }
        println!(
            "accounting: revenue={} utility={} objective={}",
            record.total_revenue(),
            record.total_utility(),
            record.objective
        );
    }
    Ok(())
}

/// `check`: run a randomized suite of one structural property, emit one
/// CSV row per case, and report whether any exact case failed.
pub fn cmd_check(
    suite: Lemma,
    cases: usize,
    seed: u64,
    eps: Option<f64>,
    trials: usize,
    output: Option<&Path>,
) -> Result<bool> {
    let config = SuiteConfig::new(suite, cases, seed)
        .with_eps(eps)
        .with_trials(trials);
    let outcome = run_lemma_suite(&config)?;

    let sink: Box<dyn Write> = match output {
        Some(path) => Box::new(
            fs::File::create(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?,
        ),
        None => Box::new(std::io::stdout()),
    };
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(["lemma_id", "engine", "seed", "holds", "f_x", "f_xprime", "bound"])?;
    for case in &outcome.cases {
        let r = &case.report;
        writer.write_record([
            r.lemma.name().to_string(),
            r.engine.name().to_string(),
            case.case_seed.to_string(),
            r.holds.to_string(),
            r.f_x.to_string(),
            r.f_x_prime.to_string(),
            r.bound.to_string(),
        ])?;
    }
    writer.flush().map_err(|e| CliError::io(e.to_string()))?;

    eprintln!(
        "{}: {} cases, {} violations",
        suite,
        outcome.cases.len(),
        outcome.violations
    );
    Ok(outcome.violations == 0)
}

struct ResultRow {
    eps: Option<f64>,
    alpha: f64,
    threshold: f64,
    empirical_tail: f64,
    ci_upper: f64,
    theoretical_bound: f64,
    satisfied: bool,
    mean_ratio: f64,
}

/// `concentrate`: Monte Carlo campaigns against the tail bound matching
/// the engine, one CSV row per alpha.
pub fn cmd_concentrate(config: &ExperimentConfig) -> Result<()> {
    if config.trials < 1 {
        return Err(CliError::usage("config needs trials >= 1"));
    }
    if config.alpha_grid.is_empty() {
        return Err(CliError::usage("config needs a nonempty alpha_grid"));
    }
    for &alpha in &config.alpha_grid {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(CliError::usage(format!("alpha must be positive, got {alpha}")));
        }
    }
    let (instance, instance_id) = resolve_instance(&config.instance)?;
    let engine = config.engine;

    let mut rows: Vec<ResultRow> = Vec::new();
    let oracle_objective: f64;
    match engine {
        Engine::Ranking | Engine::FullyOnline => {
            let inputs = match (&instance, engine) {
                (Instance::Bipartite(g), Engine::Ranking) => {
                    oracle_objective = max_matching_bipartite(g).objective;
                    TheoremInputs::T1 {
                        n: oracle_objective as usize,
                    }
                }
                (Instance::FullyOnline(g), Engine::FullyOnline) => {
                    oracle_objective = max_matching_general_with_cap(
                        g,
                        ranking_core::oracles::DEFAULT_BRUTE_FORCE_CAP,
                    )?
                    .objective;
                    let rho = config.rho.unwrap_or(if g.is_bipartite() {
                        RHO_BIPARTITE
                    } else {
                        RHO_GENERAL
                    });
                    TheoremInputs::T2 {
                        n: oracle_objective as usize,
                        rho,
                    }
                }
                _ => {
                    return Err(CliError::usage(format!(
                        "engine {engine} cannot run on a {} instance",
                        instance.kind()
                    )))
                }
            };
            if oracle_objective < 1.0 {
                return Err(CliError::usage(
                    "instance admits no matching; tail comparison is undefined",
                ));
            }
            if config.eps.is_some() {
                return Err(CliError::usage(format!("engine {engine} does not take eps")));
            }
            let dist = monte_carlo(
                &instance,
                &instance_id,
                engine,
                None,
                config.trials,
                config.master_seed,
            )?;
            let ratio = competitive_ratio_summary(&dist, oracle_objective)?;
            for comparison in compare_tail(&dist, inputs, &config.alpha_grid)? {
                rows.push(ResultRow {
                    eps: None,
                    alpha: comparison.alpha,
                    threshold: comparison.threshold,
                    empirical_tail: comparison.empirical_tail,
                    ci_upper: comparison.ci_upper,
                    theoretical_bound: comparison.theoretical_bound,
                    satisfied: comparison.satisfied,
                    mean_ratio: ratio.mean,
                });
            }
        }
        Engine::VertexWeighted | Engine::EpsRanking => {
            let g = instance.as_bipartite()?;
            let optimum = max_weight_seller_matching(g)?;
            oracle_objective = optimum.objective;
            if oracle_objective <= 0.0 {
                return Err(CliError::usage(
                    "instance admits no weighted matching; tail comparison is undefined",
                ));
            }
            let inputs = TheoremInputs::T3 {
                opt_weight: oracle_objective,
                w_l2_sq: g.weight_l2_squared()?,
            };
            for &alpha in &config.alpha_grid {
                // the weighted guarantee is about the alpha/2-smoothed
                // variant unless the config pins eps
                let eps = match engine {
                    Engine::EpsRanking => Some(config.eps.unwrap_or(alpha / 2.0)),
                    _ => None,
                };
                let dist = monte_carlo(
                    &instance,
                    &instance_id,
                    engine,
                    eps,
                    config.trials,
                    config.master_seed,
                )?;
                let ratio = competitive_ratio_summary(&dist, oracle_objective)?;
                let comparison = compare_tail(&dist, inputs, &[alpha])?;
                let comparison = &comparison[0];
                rows.push(ResultRow {
                    eps: eps.or(Some(0.0)),
                    alpha,
                    threshold: comparison.threshold,
                    empirical_tail: comparison.empirical_tail,
                    ci_upper: comparison.ci_upper,
                    theoretical_bound: comparison.theoretical_bound,
                    satisfied: comparison.satisfied,
                    mean_ratio: ratio.mean,
                });
            }
        }
        Engine::SingleValued => {
            return Err(CliError::usage(
                "no tail comparison is defined for single_valued",
            ));
        }
    }

    let mut writer = csv::Writer::from_path(&config.output)
        .map_err(|e| CliError::io(format!("{}: {e}", config.output.display())))?;
    writer.write_record([
        "instance_id",
        "engine",
        "eps",
        "master_seed",
        "trials",
        "alpha",
        "threshold",
        "empirical_tail",
        "ci_upper",
        "theoretical_bound",
        "satisfied",
        "mean_ratio",
        "oracle_objective",
    ])?;
    for row in &rows {
        writer.write_record([
            instance_id.clone(),
            engine.name().to_string(),
            row.eps.map(|e| e.to_string()).unwrap_or_default(),
            config.master_seed.to_string(),
            config.trials.to_string(),
            row.alpha.to_string(),
            row.threshold.to_string(),
            row.empirical_tail.to_string(),
            row.ci_upper.to_string(),
            row.theoretical_bound.to_string(),
            row.satisfied.to_string(),
            row.mean_ratio.to_string(),
            oracle_objective.to_string(),
        ])?;
    }
    writer.flush().map_err(|e| CliError::io(e.to_string()))?;

    println!("instance: {instance_id}");
    println!("engine: {engine}");
    println!("oracle_objective: {oracle_objective}");
    println!("trials: {} master_seed: {}", config.trials, config.master_seed);
    println!("alpha\tthreshold\tempirical_tail\ttheoretical_bound\tsatisfied\tmean_ratio");
    let mut all_satisfied = true;
    for row in &rows {
        all_satisfied &= row.satisfied;
        println!(
            "{}\t{}\t{}\t{}\t{}\t{}",
            row.alpha,
            row.threshold,
            row.empirical_tail,
            row.theoretical_bound,
            row.satisfied,
            row.mean_ratio
        );
    }
    println!("all_satisfied: {all_satisfied}");
    println!("results: {}", config.output.display());
    Ok(())
}
