//! Instance data model, validation, and instance surgery.
//!
//! Indices are dense and 0-based. Removing a vertex never reindexes:
//! the vertex is tombstoned (all incident edges deleted, slot kept) so
//! that a rank vector stays coordinate-aligned between an instance and
//! any surgered variant of it. All surgery is pure; inputs are never
//! mutated.

use num_rational::Rational64;

use crate::error::{domain, Error, Result};

/// Exact rational timestamp. Rationals keep the event-order invariant
/// decidable; floats could make two distinct events compare equal.
pub type Timestamp = Rational64;

/// Result of [`BipartiteInstance::validate`] / [`FullyOnlineInstance::validate`].
/// Violations are data, not failures: an empty report means the instance
/// satisfies every type invariant.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn flag(&mut self, msg: impl Into<String>) {
        self.violations.push(msg.into());
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_valid() {
            write!(f, "valid")
        } else {
            write!(f, "{}", self.violations.join("; "))
        }
    }
}

/// One uniform-[0,1) rank per vertex; the sole source of algorithmic
/// randomness for every engine.
#[derive(Debug, Clone, PartialEq)]
pub struct RankVector(Vec<f64>);

impl RankVector {
    pub fn new(ranks: Vec<f64>) -> Result<Self> {
        for &r in &ranks {
            if !(0.0..1.0).contains(&r) {
                return Err(Error::RankOutOfRange { value: r });
            }
        }
        Ok(Self(ranks))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Copy with coordinate `j` replaced by `theta` (the x' of the
    /// bounded-difference checks).
    pub fn with_coordinate(&self, j: usize, theta: f64) -> Result<Self> {
        if j >= self.0.len() {
            return Err(Error::IndexOutOfRange {
                what: "rank coordinate",
                index: j,
                len: self.0.len(),
            });
        }
        if !(0.0..1.0).contains(&theta) {
            return Err(Error::RankOutOfRange { value: theta });
        }
        let mut ranks = self.0.clone();
        ranks[j] = theta;
        Ok(Self(ranks))
    }
}

/// A set of matched pairs. Bipartite engines store `(seller, buyer)`;
/// fully-online engines store `(chosen neighbor, departing vertex)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Matching {
    pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn new(pairs: Vec<(usize, usize)>) -> Self {
        Self { pairs }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn push(&mut self, first: usize, second: usize) {
        self.pairs.push((first, second));
    }

    /// Pairs sorted lexicographically, for order-insensitive comparison.
    pub fn sorted_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = self.pairs.clone();
        pairs.sort_unstable();
        pairs
    }

    /// Seller indices covered by the matching (first components).
    pub fn covered_first(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.pairs.iter().map(|&(a, _)| a).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Offline sellers, online buyers with a fixed arrival order, optional
/// per-seller weights and capacities.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteInstance {
    sellers: usize,
    buyers: usize,
    /// Per buyer, the sorted list of adjacent seller indices.
    adjacency: Vec<Vec<usize>>,
    arrival_order: Vec<usize>,
    weights: Option<Vec<f64>>,
    capacities: Option<Vec<u32>>,
    removed: Vec<bool>,
}

impl BipartiteInstance {
    /// Build from an edge list of `(buyer, seller)` pairs. Buyer indices
    /// must fit the buyer count; everything else is left to `validate`.
    pub fn from_edges(
        sellers: usize,
        buyers: usize,
        edges: &[(usize, usize)],
        arrival_order: Vec<usize>,
    ) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); buyers];
        for &(buyer, seller) in edges {
            if buyer >= buyers {
                return Err(Error::IndexOutOfRange {
                    what: "buyer",
                    index: buyer,
                    len: buyers,
                });
            }
            adjacency[buyer].push(seller);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self {
            sellers,
            buyers,
            adjacency,
            arrival_order,
            weights: None,
            capacities: None,
            removed: vec![false; sellers],
        })
    }

    /// Raw constructor; no checks beyond shapes implied by the fields.
    pub fn from_parts(
        sellers: usize,
        buyers: usize,
        adjacency: Vec<Vec<usize>>,
        arrival_order: Vec<usize>,
        weights: Option<Vec<f64>>,
        capacities: Option<Vec<u32>>,
    ) -> Self {
        Self {
            sellers,
            buyers,
            adjacency,
            arrival_order,
            weights,
            capacities,
            removed: vec![false; sellers],
        }
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Self {
        self.weights = Some(weights);
        self
    }

    pub fn with_capacities(mut self, capacities: Vec<u32>) -> Self {
        self.capacities = Some(capacities);
        self
    }

    pub fn sellers(&self) -> usize {
        self.sellers
    }

    pub fn buyers(&self) -> usize {
        self.buyers
    }

    /// Sellers that have not been tombstoned by surgery.
    pub fn active_sellers(&self) -> usize {
        self.removed.iter().filter(|&&r| !r).count()
    }

    pub fn is_removed(&self, seller: usize) -> bool {
        self.removed[seller]
    }

    pub fn neighbors(&self, buyer: usize) -> &[usize] {
        &self.adjacency[buyer]
    }

    pub fn arrival_order(&self) -> &[usize] {
        &self.arrival_order
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn capacities(&self) -> Option<&[u32]> {
        self.capacities.as_deref()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    /// All `(buyer, seller)` edges, buyer-major.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(b, adj)| adj.iter().map(move |&s| (b, s)))
    }

    pub fn has_edge(&self, buyer: usize, seller: usize) -> bool {
        buyer < self.buyers && self.adjacency[buyer].binary_search(&seller).is_ok()
    }

    /// Sum of squared seller weights (over all seller slots).
    pub fn weight_l2_squared(&self) -> Result<f64> {
        let w = self.weights.as_ref().ok_or(Error::WeightsAbsent)?;
        Ok(w.iter().map(|x| x * x).sum())
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.adjacency.len() != self.buyers {
            report.flag(format!(
                "adjacency has {} buyer lists, expected {}",
                self.adjacency.len(),
                self.buyers
            ));
        }
        for (buyer, adj) in self.adjacency.iter().enumerate() {
            for &seller in adj {
                if seller >= self.sellers {
                    report.flag(format!(
                        "buyer {buyer} adjacent to seller {seller}, out of range (sellers = {})",
                        self.sellers
                    ));
                } else if self.removed[seller] {
                    report.flag(format!(
                        "removed seller {seller} still incident to buyer {buyer}"
                    ));
                }
            }
            for pair in adj.windows(2) {
                if pair[0] == pair[1] {
                    report.flag(format!(
                        "buyer {buyer} lists seller {} more than once",
                        pair[0]
                    ));
                }
            }
        }
        if self.arrival_order.len() != self.buyers {
            report.flag(format!(
                "arrival_order has length {}, expected {}",
                self.arrival_order.len(),
                self.buyers
            ));
        }
        let mut seen = vec![false; self.buyers];
        let mut bijective = self.arrival_order.len() == self.buyers;
        for &b in &self.arrival_order {
            if b >= self.buyers || seen[b] {
                bijective = false;
                break;
            }
            seen[b] = true;
        }
        if !bijective {
            report.flag("arrival_order not a bijection on buyer indices");
        }
        if let Some(w) = &self.weights {
            if w.len() != self.sellers {
                report.flag(format!(
                    "weights has length {}, expected {}",
                    w.len(),
                    self.sellers
                ));
            }
            for (j, &wj) in w.iter().enumerate() {
                if !wj.is_finite() || wj <= 0.0 {
                    report.flag(format!("weight of seller {j} is {wj}, must be positive"));
                }
            }
        }
        if let Some(c) = &self.capacities {
            if c.len() != self.sellers {
                report.flag(format!(
                    "capacities has length {}, expected {}",
                    c.len(),
                    self.sellers
                ));
            }
            for (j, &cj) in c.iter().enumerate() {
                if cj < 1 {
                    report.flag(format!("capacity of seller {j} is {cj}, must be >= 1"));
                }
            }
        }
        report
    }

    /// Error unless `m` is a capacity-respecting matching made of instance
    /// edges (seller appears at most c_j times, default 1; buyer at most
    /// once). Matching pairs are `(seller, buyer)`.
    pub fn check_matching(&self, m: &Matching) -> Result<()> {
        let mut seller_uses = vec![0u32; self.sellers];
        let mut buyer_used = vec![false; self.buyers];
        for &(seller, buyer) in m.pairs() {
            if seller >= self.sellers {
                return Err(Error::IndexOutOfRange {
                    what: "seller",
                    index: seller,
                    len: self.sellers,
                });
            }
            if buyer >= self.buyers {
                return Err(Error::IndexOutOfRange {
                    what: "buyer",
                    index: buyer,
                    len: self.buyers,
                });
            }
            if !self.has_edge(buyer, seller) {
                return domain(format!("pair (seller {seller}, buyer {buyer}) is not an edge"));
            }
            if buyer_used[buyer] {
                return domain(format!("buyer {buyer} matched twice"));
            }
            buyer_used[buyer] = true;
            seller_uses[seller] += 1;
            let cap = self.capacities.as_ref().map_or(1, |c| c[seller]);
            if seller_uses[seller] > cap {
                return domain(format!("seller {seller} matched more than {cap} times"));
            }
        }
        Ok(())
    }

    /// G_{-j}: seller `j` tombstoned and every incident edge deleted.
    /// Indices, arrival order, weights and capacities are preserved, so a
    /// rank vector for G is directly usable on the result.
    pub fn remove_seller(&self, seller: usize) -> Result<Self> {
        if seller >= self.sellers {
            return Err(Error::IndexOutOfRange {
                what: "seller",
                index: seller,
                len: self.sellers,
            });
        }
        let mut out = self.clone();
        for adj in &mut out.adjacency {
            adj.retain(|&s| s != seller);
        }
        out.removed[seller] = true;
        Ok(out)
    }

    /// G_M: keep only the sellers covered by `m` (tombstoning the rest);
    /// all buyers are kept.
    pub fn induce_on_matched_sellers(&self, m: &Matching) -> Result<Self> {
        self.check_matching(m)?;
        let mut covered = vec![false; self.sellers];
        for &(seller, _) in m.pairs() {
            covered[seller] = true;
        }
        let mut out = self.clone();
        for adj in &mut out.adjacency {
            adj.retain(|&s| covered[s]);
        }
        for (j, keep) in covered.iter().enumerate() {
            if !keep {
                out.removed[j] = true;
            }
        }
        Ok(out)
    }

    /// Replace each seller `j` by `c_j` unit-capacity copies that inherit
    /// its weight and adjacency. Returns the expanded instance and the
    /// copy-to-original index map.
    pub fn expand_capacities(&self) -> Result<(Self, Vec<usize>)> {
        let caps = self.capacities.as_ref().ok_or(Error::CapacitiesAbsent)?;
        if caps.len() != self.sellers {
            return domain("capacities length does not match seller count");
        }
        let mut copy_of = Vec::new();
        let mut first_copy = vec![0usize; self.sellers];
        for (j, &c) in caps.iter().enumerate() {
            first_copy[j] = copy_of.len();
            for _ in 0..c {
                copy_of.push(j);
            }
        }
        let expanded = copy_of.len();
        let adjacency = self
            .adjacency
            .iter()
            .map(|adj| {
                adj.iter()
                    .flat_map(|&j| {
                        let base = first_copy[j];
                        (0..caps[j] as usize).map(move |k| base + k)
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        let weights = self
            .weights
            .as_ref()
            .map(|w| copy_of.iter().map(|&j| w[j]).collect());
        let removed = copy_of.iter().map(|&j| self.removed[j]).collect();
        let out = Self {
            sellers: expanded,
            buyers: self.buyers,
            adjacency,
            arrival_order: self.arrival_order.clone(),
            weights,
            capacities: Some(vec![1; expanded]),
            removed,
        };
        Ok((out, copy_of))
    }
}

/// Event kind in a fully-online timeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Arrive,
    Depart,
}

/// Vertices that arrive and depart at exact rational timestamps, with a
/// symmetric (general, not necessarily bipartite) edge set.
#[derive(Debug, Clone, PartialEq)]
pub struct FullyOnlineInstance {
    vertices: usize,
    arrival: Vec<Timestamp>,
    departure: Vec<Timestamp>,
    /// Per vertex, sorted neighbor indices.
    adjacency: Vec<Vec<usize>>,
    removed: Vec<bool>,
}

impl FullyOnlineInstance {
    /// Build from per-vertex intervals and an undirected edge list. Edge
    /// endpoints must be in range; all other invariants are left to
    /// `validate`.
    pub fn from_edges(
        arrival: Vec<Timestamp>,
        departure: Vec<Timestamp>,
        edges: &[(usize, usize)],
    ) -> Result<Self> {
        let vertices = arrival.len();
        if departure.len() != vertices {
            return domain(format!(
                "{} arrival timestamps but {} departure timestamps",
                vertices,
                departure.len()
            ));
        }
        let mut adjacency = vec![Vec::new(); vertices];
        for &(u, v) in edges {
            for &end in &[u, v] {
                if end >= vertices {
                    return Err(Error::IndexOutOfRange {
                        what: "vertex",
                        index: end,
                        len: vertices,
                    });
                }
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self {
            vertices,
            arrival,
            departure,
            adjacency,
            removed: vec![false; vertices],
        })
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn active_vertices(&self) -> usize {
        self.removed.iter().filter(|&&r| !r).count()
    }

    pub fn is_removed(&self, v: usize) -> bool {
        self.removed[v]
    }

    pub fn arrival(&self, v: usize) -> Timestamp {
        self.arrival[v]
    }

    pub fn departure(&self, v: usize) -> Timestamp {
        self.departure[v]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    /// Undirected edges, each reported once as (u, v) with u < v.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, adj) in self.adjacency.iter().enumerate() {
            for &v in adj {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.vertices && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Presence intervals [arrival, departure) of `u` and `v` intersect.
    pub fn intervals_overlap(&self, u: usize, v: usize) -> bool {
        self.arrival[u] < self.departure[v] && self.arrival[v] < self.departure[u]
    }

    /// The full timeline, sorted by timestamp. Ties are impossible on a
    /// valid instance; they sort arbitrarily but deterministically here.
    pub fn sorted_events(&self) -> Vec<(Timestamp, usize, EventKind)> {
        let mut events = Vec::with_capacity(2 * self.vertices);
        for v in 0..self.vertices {
            events.push((self.arrival[v], v, EventKind::Arrive));
            events.push((self.departure[v], v, EventKind::Depart));
        }
        events.sort_by_key(|&(t, v, kind)| (t, v, kind == EventKind::Depart));
        events
    }

    /// Two-color the active edge set; true when no odd cycle exists.
    pub fn is_bipartite(&self) -> bool {
        let mut color = vec![None::<bool>; self.vertices];
        for start in 0..self.vertices {
            if color[start].is_some() || self.adjacency[start].is_empty() {
                continue;
            }
            color[start] = Some(false);
            let mut queue = vec![start];
            while let Some(u) = queue.pop() {
                let cu = color[u].unwrap();
                for &v in &self.adjacency[u] {
                    match color[v] {
                        None => {
                            color[v] = Some(!cu);
                            queue.push(v);
                        }
                        Some(cv) if cv == cu => return false,
                        _ => {}
                    }
                }
            }
        }
        true
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for v in 0..self.vertices {
            if self.arrival[v] >= self.departure[v] {
                report.flag(format!(
                    "vertex {v} arrives at {} but departs at {}",
                    self.arrival[v], self.departure[v]
                ));
            }
        }
        let mut stamps: Vec<(Timestamp, String)> = Vec::with_capacity(2 * self.vertices);
        for v in 0..self.vertices {
            stamps.push((self.arrival[v], format!("arrival of vertex {v}")));
            stamps.push((self.departure[v], format!("departure of vertex {v}")));
        }
        stamps.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        for pair in stamps.windows(2) {
            if pair[0].0 == pair[1].0 {
                report.flag(format!(
                    "timestamps not distinct: {} equals {} ({})",
                    pair[0].1, pair[1].1, pair[0].0
                ));
            }
        }
        for (u, adj) in self.adjacency.iter().enumerate() {
            for &v in adj {
                if v >= self.vertices {
                    report.flag(format!(
                        "vertex {u} adjacent to vertex {v}, out of range (vertices = {})",
                        self.vertices
                    ));
                    continue;
                }
                if v == u {
                    report.flag(format!("vertex {u} has a self-loop"));
                }
                if !self.adjacency[v].contains(&u) {
                    report.flag(format!("edge ({u}, {v}) is not symmetric"));
                }
                if self.removed[u] || self.removed[v] {
                    report.flag(format!("removed vertex incident to edge ({u}, {v})"));
                }
            }
            for pair in adj.windows(2) {
                if pair[0] == pair[1] {
                    report.flag(format!("vertex {u} lists vertex {} more than once", pair[0]));
                }
            }
        }
        report
    }

    /// Error unless `m` is a matching made of instance edges with no
    /// vertex used twice.
    pub fn check_matching(&self, m: &Matching) -> Result<()> {
        let mut used = vec![false; self.vertices];
        for &(u, v) in m.pairs() {
            for &end in &[u, v] {
                if end >= self.vertices {
                    return Err(Error::IndexOutOfRange {
                        what: "vertex",
                        index: end,
                        len: self.vertices,
                    });
                }
            }
            if !self.has_edge(u, v) {
                return domain(format!("pair ({u}, {v}) is not an edge"));
            }
            if used[u] || used[v] {
                return domain(format!("vertex reused by pair ({u}, {v})"));
            }
            used[u] = true;
            used[v] = true;
        }
        Ok(())
    }

    /// G_{-v}: vertex `v` tombstoned and every incident edge deleted.
    pub fn remove_vertex(&self, v: usize) -> Result<Self> {
        if v >= self.vertices {
            return Err(Error::IndexOutOfRange {
                what: "vertex",
                index: v,
                len: self.vertices,
            });
        }
        let mut out = self.clone();
        out.adjacency[v].clear();
        for adj in &mut out.adjacency {
            adj.retain(|&u| u != v);
        }
        out.removed[v] = true;
        Ok(out)
    }
}

/// Either instance kind, as loaded from an instance file.
#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Bipartite(BipartiteInstance),
    FullyOnline(FullyOnlineInstance),
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Bipartite(_) => "bipartite",
            Instance::FullyOnline(_) => "fully_online",
        }
    }

    pub fn validate(&self) -> ValidationReport {
        match self {
            Instance::Bipartite(g) => g.validate(),
            Instance::FullyOnline(g) => g.validate(),
        }
    }

    /// G_{-v}; `v` is a seller index on bipartite instances and a vertex
    /// index on fully-online ones.
    pub fn remove_vertex(&self, v: usize) -> Result<Instance> {
        match self {
            Instance::Bipartite(g) => Ok(Instance::Bipartite(g.remove_seller(v)?)),
            Instance::FullyOnline(g) => Ok(Instance::FullyOnline(g.remove_vertex(v)?)),
        }
    }

    pub fn as_bipartite(&self) -> Result<&BipartiteInstance> {
        match self {
            Instance::Bipartite(g) => Ok(g),
            Instance::FullyOnline(_) => domain("expected a bipartite instance"),
        }
    }

    pub fn as_fully_online(&self) -> Result<&FullyOnlineInstance> {
        match self {
            Instance::FullyOnline(g) => Ok(g),
            Instance::Bipartite(_) => domain("expected a fully_online instance"),
        }
    }
}
