//! Exact offline optima, used as competitive-ratio denominators and as
//! ground truth for the randomized test suites.
//!
//! Three routes are deliberately kept independent of each other:
//! augmenting paths for bipartite cardinality, matroid greedy for seller
//! weight, and capped exhaustive enumeration as the cross-check.

use crate::error::{domain, Error, Result};
use crate::graph::{BipartiteInstance, FullyOnlineInstance, Matching};

/// Edge-count cap for the exhaustive oracles.
pub const DEFAULT_BRUTE_FORCE_CAP: usize = 24;

/// An exact optimum: the matching and its objective (cardinality, or
/// total matched seller weight for the weighted oracle).
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub matching: Matching,
    pub objective: f64,
}

/// Maximum-cardinality bipartite matching via augmenting paths.
pub fn max_matching_bipartite(instance: &BipartiteInstance) -> OracleResult {
    let sellers = instance.sellers();
    let mut seller_of_buyer: Vec<Option<usize>> = vec![None; instance.buyers()];
    let mut buyer_of_seller: Vec<Option<usize>> = vec![None; sellers];

    fn augment(
        instance: &BipartiteInstance,
        buyer: usize,
        visited: &mut [bool],
        seller_of_buyer: &mut [Option<usize>],
        buyer_of_seller: &mut [Option<usize>],
    ) -> bool {
        for &seller in instance.neighbors(buyer) {
            if seller >= visited.len() || visited[seller] {
                continue;
            }
            visited[seller] = true;
            let free = match buyer_of_seller[seller] {
                None => true,
                Some(other) => augment(instance, other, visited, seller_of_buyer, buyer_of_seller),
            };
            if free {
                buyer_of_seller[seller] = Some(buyer);
                seller_of_buyer[buyer] = Some(seller);
                return true;
            }
        }
        false
    }

    for buyer in 0..instance.buyers() {
        let mut visited = vec![false; sellers];
        augment(
            instance,
            buyer,
            &mut visited,
            &mut seller_of_buyer,
            &mut buyer_of_seller,
        );
    }

    let pairs: Vec<(usize, usize)> = buyer_of_seller
        .iter()
        .enumerate()
        .filter_map(|(seller, buyer)| buyer.map(|b| (seller, b)))
        .collect();
    let objective = pairs.len() as f64;
    OracleResult {
        matching: Matching::new(pairs),
        objective,
    }
}

/// Exhaustive maximum matching: enumerates every matching-forming edge
/// subset, buyer by buyer. Exact but capped at `DEFAULT_BRUTE_FORCE_CAP`
/// edges.
pub fn brute_force_max_matching(instance: &BipartiteInstance) -> Result<OracleResult> {
    let edges = instance.edge_count();
    if edges > DEFAULT_BRUTE_FORCE_CAP {
        return Err(Error::BruteForceCap {
            edges,
            cap: DEFAULT_BRUTE_FORCE_CAP,
        });
    }

    struct Search<'a> {
        instance: &'a BipartiteInstance,
        used: Vec<bool>,
        current: Vec<(usize, usize)>,
        best: Vec<(usize, usize)>,
    }

    impl Search<'_> {
        fn go(&mut self, buyer: usize) {
            if buyer == self.instance.buyers() {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
                return;
            }
            // leave this buyer unmatched
            self.go(buyer + 1);
            for idx in 0..self.instance.neighbors(buyer).len() {
                let seller = self.instance.neighbors(buyer)[idx];
                if seller < self.used.len() && !self.used[seller] {
                    self.used[seller] = true;
                    self.current.push((seller, buyer));
                    self.go(buyer + 1);
                    self.current.pop();
                    self.used[seller] = false;
                }
            }
        }
    }

    let mut search = Search {
        instance,
        used: vec![false; instance.sellers()],
        current: Vec::new(),
        best: Vec::new(),
    };
    search.go(0);
    let objective = search.best.len() as f64;
    Ok(OracleResult {
        matching: Matching::new(search.best),
        objective,
    })
}

/// Maximum matching of a fully-online instance over the feasible pairs,
/// i.e. edges whose presence intervals intersect. Exact via recursive
/// branch-and-bound over the feasible edge list, capped at `cap` edges.
pub fn max_matching_general_with_cap(
    instance: &FullyOnlineInstance,
    cap: usize,
) -> Result<OracleResult> {
    let feasible: Vec<(usize, usize)> = instance
        .edges()
        .into_iter()
        .filter(|&(u, v)| instance.intervals_overlap(u, v))
        .collect();
    if feasible.len() > cap {
        return Err(Error::BruteForceCap {
            edges: feasible.len(),
            cap,
        });
    }

    struct Search<'a> {
        edges: &'a [(usize, usize)],
        used: Vec<bool>,
        current: Vec<(usize, usize)>,
        best: Vec<(usize, usize)>,
    }

    impl Search<'_> {
        fn go(&mut self, idx: usize) {
            if self.current.len() + (self.edges.len() - idx) <= self.best.len() {
                return; // cannot beat the incumbent
            }
            if idx == self.edges.len() {
                self.best = self.current.clone();
                return;
            }
            let (u, v) = self.edges[idx];
            if !self.used[u] && !self.used[v] {
                self.used[u] = true;
                self.used[v] = true;
                self.current.push((u, v));
                self.go(idx + 1);
                self.current.pop();
                self.used[u] = false;
                self.used[v] = false;
            }
            self.go(idx + 1);
        }
    }

    let mut search = Search {
        edges: &feasible,
        used: vec![false; instance.vertices()],
        current: Vec::new(),
        best: Vec::new(),
    };
    search.go(0);
    let objective = search.best.len() as f64;
    Ok(OracleResult {
        matching: Matching::new(search.best),
        objective,
    })
}

/// [`max_matching_general_with_cap`] at the default cap.
pub fn max_matching_general(instance: &FullyOnlineInstance) -> Result<OracleResult> {
    max_matching_general_with_cap(instance, DEFAULT_BRUTE_FORCE_CAP)
}

/// Maximum total weight of a matched seller set.
///
/// Matchable seller sets form a transversal matroid, so the greedy scan —
/// sellers in descending weight (ties by lower index), keeping a seller
/// iff an augmenting path still saturates every seller kept so far — is
/// exact.
pub fn max_weight_seller_matching(instance: &BipartiteInstance) -> Result<OracleResult> {
    let weights = instance.weights().ok_or(Error::WeightsAbsent)?;
    if weights.len() != instance.sellers() {
        return domain("weights length does not match seller count");
    }

    // seller -> buyers adjacency
    let mut seller_adj = vec![Vec::new(); instance.sellers()];
    for (buyer, seller) in instance.edges() {
        if seller < instance.sellers() {
            seller_adj[seller].push(buyer);
        }
    }

    let mut order: Vec<usize> = (0..instance.sellers()).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));

    fn augment(
        seller_adj: &[Vec<usize>],
        seller: usize,
        visited: &mut [bool],
        seller_of_buyer: &mut [Option<usize>],
    ) -> bool {
        for &buyer in &seller_adj[seller] {
            if visited[buyer] {
                continue;
            }
            visited[buyer] = true;
            let free = match seller_of_buyer[buyer] {
                None => true,
                Some(other) => augment(seller_adj, other, visited, seller_of_buyer),
            };
            if free {
                seller_of_buyer[buyer] = Some(seller);
                return true;
            }
        }
        false
    }

    let mut seller_of_buyer: Vec<Option<usize>> = vec![None; instance.buyers()];
    let mut objective = 0.0;
    for &seller in &order {
        let mut visited = vec![false; instance.buyers()];
        if augment(&seller_adj, seller, &mut visited, &mut seller_of_buyer) {
            objective += weights[seller];
        }
    }

    let mut pairs: Vec<(usize, usize)> = seller_of_buyer
        .iter()
        .enumerate()
        .filter_map(|(buyer, seller)| seller.map(|s| (s, buyer)))
        .collect();
    pairs.sort_unstable();
    Ok(OracleResult {
        matching: Matching::new(pairs),
        objective,
    })
}
