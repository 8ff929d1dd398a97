//! Deterministic execution of the five Ranking variants.
//!
//! Engines are pure functions of `(instance, ranks, eps)`; sampling the
//! ranks is the caller's job (see [`crate::seeding`]), so identical inputs
//! produce bit-identical [`RunRecord`]s. Ties in ranks or scores are
//! broken toward the lower seller index; under the uniform model they
//! have probability zero, the fixed rule only pins down float edge cases.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::graph::{
    BipartiteInstance, EventKind, FullyOnlineInstance, Instance, Matching, RankVector,
};

/// Engine selector, by the names used in CLI arguments and experiment
/// configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Ranking,
    FullyOnline,
    VertexWeighted,
    EpsRanking,
    SingleValued,
}

impl Engine {
    pub const ALL: [Engine; 5] = [
        Engine::Ranking,
        Engine::FullyOnline,
        Engine::VertexWeighted,
        Engine::EpsRanking,
        Engine::SingleValued,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Ranking => "ranking",
            Engine::FullyOnline => "fully_online",
            Engine::VertexWeighted => "vertex_weighted",
            Engine::EpsRanking => "eps_ranking",
            Engine::SingleValued => "single_valued",
        }
    }

    /// Instance kind this engine runs on.
    pub fn instance_kind(self) -> &'static str {
        match self {
            Engine::FullyOnline => "fully_online",
            _ => "bipartite",
        }
    }

    pub fn is_weighted(self) -> bool {
        matches!(
            self,
            Engine::VertexWeighted | Engine::EpsRanking | Engine::SingleValued
        )
    }

    /// Number of rank coordinates the engine consumes on `instance`:
    /// one per seller for bipartite engines, one per vertex fully online.
    pub fn rank_dim(self, instance: &Instance) -> Result<usize> {
        match (self, instance) {
            (Engine::FullyOnline, Instance::FullyOnline(g)) => Ok(g.vertices()),
            (Engine::FullyOnline, Instance::Bipartite(_)) => Err(Error::EngineMismatch {
                engine: self.name(),
                kind: "bipartite",
            }),
            (_, Instance::Bipartite(g)) => Ok(g.sellers()),
            (_, Instance::FullyOnline(_)) => Err(Error::EngineMismatch {
                engine: self.name(),
                kind: "fully_online",
            }),
        }
    }

    /// Dispatch to the engine run function. `eps` is required for
    /// `eps_ranking` and rejected elsewhere (`vertex_weighted` is the
    /// eps = 0 variant by definition).
    pub fn run(self, instance: &Instance, ranks: &RankVector, eps: Option<f64>) -> Result<RunRecord> {
        if self != Engine::EpsRanking && eps.is_some() {
            return domain(format!("engine {} does not take eps", self.name()));
        }
        match self {
            Engine::Ranking => run_ranking(instance.as_bipartite()?, ranks),
            Engine::FullyOnline => run_fully_online_ranking(instance.as_fully_online()?, ranks),
            Engine::VertexWeighted => run_eps_ranking(instance.as_bipartite()?, ranks, 0.0),
            Engine::EpsRanking => {
                let eps = eps.ok_or_else(|| Error::Domain("eps_ranking needs eps".into()))?;
                run_eps_ranking(instance.as_bipartite()?, ranks, eps)
            }
            Engine::SingleValued => run_single_valued_ranking(instance.as_bipartite()?, ranks),
        }
    }
}

impl std::fmt::Display for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Engine::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| {
                format!(
                    "unknown engine {s:?}; expected one of {}",
                    Engine::ALL.map(|e| e.name()).join(", ")
                )
            })
    }
}

/// Outcome of one engine run: the matching, its objective, the per-vertex
/// revenue/utility accounting, and the decision trace.
///
/// For the weighted engines each matched edge (i, j) splits its weight
/// into a seller price r_j = w_j e^(x_j - 1 - eps) and buyer surplus
/// u_i = w_j - r_j, so sum(r) + sum(u) equals the objective. Unweighted
/// engines leave both vectors at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub matching: Matching,
    pub objective: f64,
    /// Indexed by seller (bipartite) or vertex (fully online).
    pub revenue: Vec<f64>,
    /// Indexed by buyer (bipartite) or vertex (fully online).
    pub utility: Vec<f64>,
    /// One entry per decision point, in decision order: the arriving buyer
    /// (or departing vertex) and the partner it matched, if any.
    pub trace: Vec<(usize, Option<usize>)>,
}

impl RunRecord {
    pub fn total_revenue(&self) -> f64 {
        self.revenue.iter().sum()
    }

    pub fn total_utility(&self) -> f64 {
        self.utility.iter().sum()
    }

    /// |sum(r) + sum(u) - objective|, the accounting identity residual.
    pub fn accounting_gap(&self) -> f64 {
        (self.total_revenue() + self.total_utility() - self.objective).abs()
    }

    /// Accounting residual relative to the objective (absolute when the
    /// objective is zero).
    pub fn accounting_gap_relative(&self) -> f64 {
        let gap = self.accounting_gap();
        if self.objective > 0.0 {
            gap / self.objective
        } else {
            gap
        }
    }
}

fn check_rank_dim(ranks: &RankVector, want: usize) -> Result<()> {
    if ranks.len() != want {
        return Err(Error::RankDimension {
            got: ranks.len(),
            want,
        });
    }
    Ok(())
}

/// Ranking driven by an explicit seller permutation: each arriving buyer
/// matches its unmatched neighbor that appears earliest in `perm`.
pub fn run_ranking_permutation(
    instance: &BipartiteInstance,
    perm: &[usize],
) -> Result<RunRecord> {
    let sellers = instance.sellers();
    if perm.len() != sellers {
        return Err(Error::InvalidPermutation { len: sellers });
    }
    let mut position = vec![usize::MAX; sellers];
    for (pos, &seller) in perm.iter().enumerate() {
        if seller >= sellers || position[seller] != usize::MAX {
            return Err(Error::InvalidPermutation { len: sellers });
        }
        position[seller] = pos;
    }

    let mut seller_matched = vec![false; sellers];
    let mut matching = Matching::default();
    let mut trace = Vec::with_capacity(instance.buyers());
    for &buyer in instance.arrival_order() {
        let choice = instance
            .neighbors(buyer)
            .iter()
            .copied()
            .filter(|&j| !seller_matched[j])
            .min_by_key(|&j| position[j]);
        if let Some(j) = choice {
            seller_matched[j] = true;
            matching.push(j, buyer);
        }
        trace.push((buyer, choice));
    }
    let objective = matching.len() as f64;
    Ok(RunRecord {
        matching,
        objective,
        revenue: vec![0.0; sellers],
        utility: vec![0.0; instance.buyers()],
        trace,
    })
}

/// Rank-based Ranking: each arriving buyer matches its unmatched neighbor
/// of minimum rank. Equivalent to [`run_ranking_permutation`] on the
/// argsort of `ranks`.
pub fn run_ranking(instance: &BipartiteInstance, ranks: &RankVector) -> Result<RunRecord> {
    check_rank_dim(ranks, instance.sellers())?;
    let mut seller_matched = vec![false; instance.sellers()];
    let mut matching = Matching::default();
    let mut trace = Vec::with_capacity(instance.buyers());
    for &buyer in instance.arrival_order() {
        let mut choice: Option<usize> = None;
        for &j in instance.neighbors(buyer) {
            if seller_matched[j] {
                continue;
            }
            // adjacency is ascending, so strict < keeps the lowest index on ties
            if choice.is_none_or(|best| ranks.get(j) < ranks.get(best)) {
                choice = Some(j);
            }
        }
        if let Some(j) = choice {
            seller_matched[j] = true;
            matching.push(j, buyer);
        }
        trace.push((buyer, choice));
    }
    let objective = matching.len() as f64;
    Ok(RunRecord {
        matching,
        objective,
        revenue: vec![0.0; instance.sellers()],
        utility: vec![0.0; instance.buyers()],
        trace,
    })
}

/// Fully Online Ranking: events replay in timestamp order; when an
/// unmatched vertex departs it matches its present (arrived, not yet
/// departed) unmatched neighbor of minimum rank. A vertex that departs
/// unmatched is gone for good.
pub fn run_fully_online_ranking(
    instance: &FullyOnlineInstance,
    ranks: &RankVector,
) -> Result<RunRecord> {
    let n = instance.vertices();
    check_rank_dim(ranks, n)?;
    let mut arrived = vec![false; n];
    let mut departed = vec![false; n];
    let mut matched = vec![false; n];
    let mut matching = Matching::default();
    let mut trace = Vec::with_capacity(n);
    for (_, vertex, kind) in instance.sorted_events() {
        match kind {
            EventKind::Arrive => arrived[vertex] = true,
            EventKind::Depart => {
                if !matched[vertex] {
                    let mut choice: Option<usize> = None;
                    for &j in instance.neighbors(vertex) {
                        if !arrived[j] || departed[j] || matched[j] {
                            continue;
                        }
                        if choice.is_none_or(|best| ranks.get(j) < ranks.get(best)) {
                            choice = Some(j);
                        }
                    }
                    if let Some(j) = choice {
                        matched[vertex] = true;
                        matched[j] = true;
                        matching.push(j, vertex);
                    }
                    trace.push((vertex, choice));
                }
                departed[vertex] = true;
            }
        }
    }
    let objective = matching.len() as f64;
    Ok(RunRecord {
        matching,
        objective,
        revenue: vec![0.0; n],
        utility: vec![0.0; n],
        trace,
    })
}

/// Seller score under the smoothed weighted rule.
pub fn eps_score(weight: f64, rank: f64, eps: f64) -> f64 {
    weight * (1.0 - (rank - 1.0 - eps).exp())
}

/// Seller price: the revenue booked when the seller is matched.
pub fn eps_price(weight: f64, rank: f64, eps: f64) -> f64 {
    weight * (rank - 1.0 - eps).exp()
}

fn check_eps(eps: f64) -> Result<()> {
    if !eps.is_finite() || eps < 0.0 {
        return domain(format!("eps must be finite and >= 0, got {eps}"));
    }
    Ok(())
}

/// Vertex-weighted Ranking with smoothing `eps`: each arriving buyer
/// matches its unmatched neighbor maximizing w_j (1 - e^(x_j - 1 - eps)).
/// `eps = 0` is plain Vertex-Weighted Ranking; `eps > 0` floors every
/// score away from zero, which caps how much one rank coordinate can
/// swing the objective.
pub fn run_eps_ranking(
    instance: &BipartiteInstance,
    ranks: &RankVector,
    eps: f64,
) -> Result<RunRecord> {
    check_rank_dim(ranks, instance.sellers())?;
    check_eps(eps)?;
    let weights = instance.weights().ok_or(Error::WeightsAbsent)?;
    if weights.len() != instance.sellers() {
        return domain("weights length does not match seller count");
    }

    let mut seller_matched = vec![false; instance.sellers()];
    let mut matching = Matching::default();
    let mut revenue = vec![0.0; instance.sellers()];
    let mut utility = vec![0.0; instance.buyers()];
    let mut objective = 0.0;
    let mut trace = Vec::with_capacity(instance.buyers());
    for &buyer in instance.arrival_order() {
        let mut choice: Option<usize> = None;
        let mut best_score = f64::NEG_INFINITY;
        for &j in instance.neighbors(buyer) {
            if seller_matched[j] {
                continue;
            }
            let score = eps_score(weights[j], ranks.get(j), eps);
            // strict > keeps the lowest index on ties
            if score > best_score {
                best_score = score;
                choice = Some(j);
            }
        }
        if let Some(j) = choice {
            seller_matched[j] = true;
            matching.push(j, buyer);
            let price = eps_price(weights[j], ranks.get(j), eps);
            revenue[j] = price;
            utility[buyer] = weights[j] - price;
            objective += weights[j];
        }
        trace.push((buyer, choice));
    }
    Ok(RunRecord {
        matching,
        objective,
        revenue,
        utility,
        trace,
    })
}

/// Capacitated weighted Ranking: seller j stays eligible until matched
/// c_j times, reusing the same rank for every copy. Equivalent to
/// eps = 0 scoring with multi-use sellers.
pub fn run_single_valued_ranking(
    instance: &BipartiteInstance,
    ranks: &RankVector,
) -> Result<RunRecord> {
    check_rank_dim(ranks, instance.sellers())?;
    let weights = instance.weights().ok_or(Error::WeightsAbsent)?;
    if weights.len() != instance.sellers() {
        return domain("weights length does not match seller count");
    }
    let capacities = instance.capacities().ok_or(Error::CapacitiesAbsent)?;
    if capacities.len() != instance.sellers() {
        return domain("capacities length does not match seller count");
    }

    let mut remaining: Vec<u32> = capacities.to_vec();
    let mut matching = Matching::default();
    let mut revenue = vec![0.0; instance.sellers()];
    let mut utility = vec![0.0; instance.buyers()];
    let mut objective = 0.0;
    let mut trace = Vec::with_capacity(instance.buyers());
    for &buyer in instance.arrival_order() {
        let mut choice: Option<usize> = None;
        let mut best_score = f64::NEG_INFINITY;
        for &j in instance.neighbors(buyer) {
            if remaining[j] == 0 {
                continue;
            }
            let score = eps_score(weights[j], ranks.get(j), 0.0);
            if score > best_score {
                best_score = score;
                choice = Some(j);
            }
        }
        if let Some(j) = choice {
            remaining[j] -= 1;
            matching.push(j, buyer);
            let price = eps_price(weights[j], ranks.get(j), 0.0);
            revenue[j] += price;
            utility[buyer] = weights[j] - price;
            objective += weights[j];
        }
        trace.push((buyer, choice));
    }
    Ok(RunRecord {
        matching,
        objective,
        revenue,
        utility,
        trace,
    })
}

/// Argsort of a rank vector: sellers ordered by ascending rank, ties by
/// lower index. `run_ranking(g, x)` equals
/// `run_ranking_permutation(g, argsort_ranks(x))`.
pub fn argsort_ranks(ranks: &RankVector) -> Vec<usize> {
    let mut order: Vec<usize> = (0..ranks.len()).collect();
    order.sort_by(|&a, &b| ranks.get(a).total_cmp(&ranks.get(b)).then(a.cmp(&b)));
    order
}
