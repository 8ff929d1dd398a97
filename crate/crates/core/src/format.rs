//! JSON instance file format.
//!
//! Two kinds, discriminated by the top-level `kind` field:
//!
//! ```json
//! {"kind": "bipartite", "sellers": 2, "buyers": 2,
//!  "edges": [[0, 0], [0, 1], [1, 1]], "arrival_order": [0, 1],
//!  "weights": [1.0, 2.5], "capacities": [1, 3]}
//! ```
//!
//! `weights` and `capacities` are optional; bipartite edges are
//! `[buyer, seller]` pairs.
//!
//! ```json
//! {"kind": "fully_online", "vertices": 2,
//!  "events": [[0, "arrive", 0, 1], [1, "arrive", 1, 2],
//!             [0, "depart", 3, 1], [1, "depart", 4, 1]],
//!  "edges": [[0, 1]]}
//! ```
//!
//! Each event is `[vertex, "arrive"|"depart", numerator, denominator]`
//! with an exact rational timestamp. Loading only rejects files that
//! cannot be represented at all (unknown fields, out-of-range buyer or
//! vertex indices, missing or duplicate events, zero denominators);
//! everything else round-trips and is judged by `validate`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BipartiteInstance, FullyOnlineInstance, Instance, Timestamp};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
enum InstanceFile {
    #[serde(rename = "bipartite")]
    Bipartite {
        sellers: usize,
        buyers: usize,
        /// `[buyer, seller]` pairs.
        edges: Vec<(usize, usize)>,
        arrival_order: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        capacities: Option<Vec<u32>>,
    },
    #[serde(rename = "fully_online")]
    FullyOnline {
        vertices: usize,
        /// `[vertex, "arrive"|"depart", num, den]` rows.
        events: Vec<(usize, String, i64, i64)>,
        edges: Vec<(usize, usize)>,
    },
}

fn to_file(instance: &Instance) -> InstanceFile {
    match instance {
        Instance::Bipartite(g) => InstanceFile::Bipartite {
            sellers: g.sellers(),
            buyers: g.buyers(),
            edges: g.edges().collect(),
            arrival_order: g.arrival_order().to_vec(),
            weights: g.weights().map(<[f64]>::to_vec),
            capacities: g.capacities().map(<[u32]>::to_vec),
        },
        Instance::FullyOnline(g) => {
            let mut events = Vec::with_capacity(2 * g.vertices());
            for (t, v, kind) in g.sorted_events() {
                let kind = match kind {
                    crate::graph::EventKind::Arrive => "arrive",
                    crate::graph::EventKind::Depart => "depart",
                };
                events.push((v, kind.to_string(), *t.numer(), *t.denom()));
            }
            InstanceFile::FullyOnline {
                vertices: g.vertices(),
                events,
                edges: g.edges(),
            }
        }
    }
}

fn from_file(file: InstanceFile) -> Result<Instance> {
    match file {
        InstanceFile::Bipartite {
            sellers,
            buyers,
            edges,
            arrival_order,
            weights,
            capacities,
        } => {
            let mut g = BipartiteInstance::from_edges(sellers, buyers, &edges, arrival_order)
                .map_err(|e| Error::Format(e.to_string()))?;
            if let Some(w) = weights {
                g = g.with_weights(w);
            }
            if let Some(c) = capacities {
                g = g.with_capacities(c);
            }
            Ok(Instance::Bipartite(g))
        }
        InstanceFile::FullyOnline {
            vertices,
            events,
            edges,
        } => {
            let mut arrival = vec![None; vertices];
            let mut departure = vec![None; vertices];
            for (v, kind, num, den) in events {
                if v >= vertices {
                    return Err(Error::Format(format!(
                        "event vertex {v} out of range (vertices = {vertices})"
                    )));
                }
                if den == 0 {
                    return Err(Error::Format(format!(
                        "event for vertex {v} has a zero denominator"
                    )));
                }
                let t = Timestamp::new(num, den);
                let slot = match kind.as_str() {
                    "arrive" => &mut arrival[v],
                    "depart" => &mut departure[v],
                    other => {
                        return Err(Error::Format(format!(
                            "unknown event kind {other:?} (expected \"arrive\" or \"depart\")"
                        )))
                    }
                };
                if slot.replace(t).is_some() {
                    return Err(Error::Format(format!(
                        "vertex {v} has more than one {kind} event"
                    )));
                }
            }
            let unwrap_all = |slots: Vec<Option<Timestamp>>, what: &str| -> Result<Vec<Timestamp>> {
                slots
                    .into_iter()
                    .enumerate()
                    .map(|(v, t)| {
                        t.ok_or_else(|| Error::Format(format!("vertex {v} has no {what} event")))
                    })
                    .collect()
            };
            let arrival = unwrap_all(arrival, "arrive")?;
            let departure = unwrap_all(departure, "depart")?;
            let g = FullyOnlineInstance::from_edges(arrival, departure, &edges)
                .map_err(|e| Error::Format(e.to_string()))?;
            Ok(Instance::FullyOnline(g))
        }
    }
}

/// Serialize to the instance file format. Output is canonical: edges
/// buyer-major (bipartite) or with u < v (fully online), events in
/// timestamp order, so equal instances produce identical bytes.
pub fn to_json(instance: &Instance) -> String {
    let mut s = serde_json::to_string_pretty(&to_file(instance)).expect("instance serializes");
    s.push('\n');
    s
}

/// Parse the instance file format. The result may still fail
/// [`Instance::validate`]; see the module docs for what is rejected here.
pub fn from_json(text: &str) -> Result<Instance> {
    let file: InstanceFile =
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    from_file(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bipartite_normative_fields_parse() {
        let text = r#"{
            "kind": "bipartite",
            "sellers": 2,
            "buyers": 2,
            "edges": [[0, 0], [0, 1], [1, 1]],
            "arrival_order": [1, 0],
            "weights": [1.0, 10000000000.0]
        }"#;
        let instance = from_json(text).unwrap();
        let g = instance.as_bipartite().unwrap();
        assert_eq!(g.sellers(), 2);
        assert_eq!(g.neighbors(0), &[0, 1]);
        assert_eq!(g.neighbors(1), &[1]);
        assert_eq!(g.arrival_order(), &[1, 0]);
        assert_eq!(g.weights(), Some(&[1.0, 1e10][..]));
        assert!(instance.validate().is_valid());
    }

    #[test]
    fn fully_online_normative_fields_parse() {
        let text = r#"{
            "kind": "fully_online",
            "vertices": 2,
            "events": [[0, "arrive", 0, 1], [1, "arrive", 1, 2],
                       [0, "depart", 3, 1], [1, "depart", 4, 1]],
            "edges": [[0, 1]]
        }"#;
        let instance = from_json(text).unwrap();
        let g = instance.as_fully_online().unwrap();
        assert_eq!(g.vertices(), 2);
        assert_eq!(g.arrival(1), Timestamp::new(1, 2));
        assert!(g.has_edge(0, 1));
        assert!(instance.validate().is_valid());
    }

    #[test]
    fn serialized_output_uses_normative_keys() {
        let g = BipartiteInstance::from_edges(2, 1, &[(0, 1), (0, 0)], vec![0])
            .unwrap()
            .with_weights(vec![2.0, 3.0]);
        let json = to_json(&Instance::Bipartite(g));
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["kind"], "bipartite");
        assert_eq!(value["sellers"], 2);
        assert_eq!(value["buyers"], 1);
        assert_eq!(value["edges"][0][0], 0); // buyer first
        assert_eq!(value["edges"][0][1], 0);
        assert_eq!(value["arrival_order"][0], 0);
        assert_eq!(value["weights"][1], 3.0);
        assert!(value.get("capacities").is_none());
    }

    #[test]
    fn round_trip_preserves_instances() {
        let g = BipartiteInstance::from_edges(3, 2, &[(0, 0), (0, 2), (1, 1)], vec![1, 0])
            .unwrap()
            .with_capacities(vec![1, 2, 1]);
        let instance = Instance::Bipartite(g);
        let back = from_json(&to_json(&instance)).unwrap();
        assert_eq!(instance, back);

        let g = FullyOnlineInstance::from_edges(
            vec![Timestamp::new(1, 3), Timestamp::from(2)],
            vec![Timestamp::from(5), Timestamp::new(11, 2)],
            &[(0, 1)],
        )
        .unwrap();
        let instance = Instance::FullyOnline(g);
        let back = from_json(&to_json(&instance)).unwrap();
        assert_eq!(instance, back);
    }

    #[test]
    fn malformed_files_are_rejected() {
        assert!(from_json("{\"kind\": \"triangle\"}").is_err());
        // buyer out of range cannot be represented
        let text = r#"{"kind": "bipartite", "sellers": 1, "buyers": 1,
                       "edges": [[3, 0]], "arrival_order": [0]}"#;
        assert!(from_json(text).is_err());
        // missing depart event
        let text = r#"{"kind": "fully_online", "vertices": 1,
                       "events": [[0, "arrive", 0, 1]], "edges": []}"#;
        assert!(from_json(text).is_err());
        // zero denominator
        let text = r#"{"kind": "fully_online", "vertices": 1,
                       "events": [[0, "arrive", 0, 0], [0, "depart", 1, 1]], "edges": []}"#;
        assert!(from_json(text).is_err());
    }

    #[test]
    fn invalid_but_representable_data_loads_and_fails_validate() {
        // arrival_order is not a bijection: loads fine, validate flags it
        let text = r#"{"kind": "bipartite", "sellers": 1, "buyers": 2,
                       "edges": [[0, 0]], "arrival_order": [0, 0]}"#;
        let instance = from_json(text).unwrap();
        assert!(!instance.validate().is_valid());
    }
}
