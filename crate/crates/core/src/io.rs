//! JSON files for scenarios and behaviors.
//!
//! Scenario:
//! `{"measurements": [...], "outcomes": {"A1": ["0","1"], ...}, "contexts": [["A1","B1"], ...]}`.
//!
//! Behavior: `{"scenario": <scenario object or path>, "tables": [...], "metadata": {...}}`
//! where each table is either `{"context": ["A1","B1"], "probs": {"0,1": "1/2", ...}}`
//! (missing entries are zero) or `{"context": [...], "possible": [["0","1"], ...]}`.
//! A table may list its context in any order; outcome keys follow that
//! order. A scenario path is resolved relative to the behavior file.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::behavior::{Behavior, PossibilisticBehavior};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::scenario::Scenario;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    measurements: Vec<String>,
    outcomes: BTreeMap<String, Vec<String>>,
    contexts: Vec<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTable {
    context: Vec<String>,
    #[serde(default)]
    probs: Option<Map<String, Value>>,
    #[serde(default)]
    possible: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBehavior {
    scenario: Value,
    tables: Vec<RawTable>,
    #[serde(default)]
    metadata: Option<Value>,
}

/// A loaded behavior file.
#[derive(Debug, Clone, PartialEq)]
pub enum BehaviorData {
    Probabilistic(Behavior),
    Possibilistic(PossibilisticBehavior),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BehaviorFile {
    pub data: BehaviorData,
    pub metadata: Option<Value>,
}

impl BehaviorFile {
    pub fn scenario(&self) -> &Arc<Scenario> {
        match &self.data {
            BehaviorData::Probabilistic(b) => b.scenario(),
            BehaviorData::Possibilistic(p) => p.scenario(),
        }
    }

    /// The possibility table (the collapse for probabilistic data).
    pub fn possibilistic(&self) -> PossibilisticBehavior {
        match &self.data {
            BehaviorData::Probabilistic(b) => b.collapse(),
            BehaviorData::Possibilistic(p) => p.clone(),
        }
    }
}

fn json_err(origin: &str, msg: impl std::fmt::Display) -> Error {
    Error::Json(format!("{origin}: {msg}"))
}

pub fn scenario_from_value(v: Value, origin: &str) -> Result<Scenario> {
    let raw: RawScenario = serde_json::from_value(v).map_err(|e| json_err(origin, e))?;
    let outcomes = raw
        .measurements
        .iter()
        .map(|m| {
            raw.outcomes
                .get(m)
                .cloned()
                .ok_or_else(|| json_err(origin, format!("no outcomes listed for measurement `{m}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some(extra) = raw.outcomes.keys().find(|k| !raw.measurements.contains(k)) {
        return Err(json_err(origin, format!("outcomes given for unknown measurement `{extra}`")));
    }
    Scenario::new(raw.measurements, outcomes, &raw.contexts).map_err(|e| json_err(origin, e))
}

pub fn scenario_to_value(s: &Scenario) -> Value {
    let outcomes: Map<String, Value> = (0..s.measurement_count())
        .map(|m| (s.name(m).to_string(), json!(s.outcomes(m))))
        .collect();
    let contexts: Vec<Vec<&str>> = s
        .contexts()
        .iter()
        .map(|c| c.iter().map(|&m| s.name(m)).collect())
        .collect();
    json!({
        "measurements": s.measurements(),
        "outcomes": outcomes,
        "contexts": contexts,
    })
}

fn read(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| json_err(&path.display().to_string(), e))?;
    serde_json::from_str(&text).map_err(|e| json_err(&path.display().to_string(), e))
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    scenario_from_value(read(path)?, &path.display().to_string())
}

/// Maps a table's listed context onto a scenario context and gives, for
/// each scenario position, the position in the listed order.
fn match_context(s: &Scenario, listed: &[String], origin: &str) -> Result<(usize, Vec<usize>)> {
    let members = listed
        .iter()
        .map(|name| {
            s.index_of(name)
                .ok_or_else(|| json_err(origin, format!("unknown measurement `{name}`")))
        })
        .collect::<Result<Vec<usize>>>()?;
    let c = s
        .find_context(&members)
        .filter(|&c| s.context(c).len() == members.len())
        .ok_or_else(|| json_err(origin, format!("[{}] is not a context of the scenario", listed.join(","))))?;
    let perm = s
        .context(c)
        .iter()
        .map(|m| members.iter().position(|x| x == m).unwrap())
        .collect();
    Ok((c, perm))
}

fn parse_outcome(s: &Scenario, c: usize, perm: &[usize], labels: &[&str], origin: &str) -> Result<Vec<usize>> {
    if labels.len() != perm.len() {
        return Err(json_err(origin, format!("expected {} labels, got {}", perm.len(), labels.len())));
    }
    s.context(c)
        .iter()
        .zip(perm)
        .map(|(&m, &p)| {
            s.outcome_index(m, labels[p]).ok_or_else(|| {
                json_err(origin, format!("`{}` is not an outcome of {}", labels[p], s.name(m)))
            })
        })
        .collect()
}

pub fn behavior_from_value(v: Value, origin: &str, base: Option<&Path>) -> Result<BehaviorFile> {
    let raw: RawBehavior = serde_json::from_value(v).map_err(|e| json_err(origin, e))?;
    let scenario = match raw.scenario {
        Value::String(p) => {
            let path = base.map_or_else(|| Path::new(&p).to_path_buf(), |b| b.join(&p));
            load_scenario(&path)?
        }
        other => scenario_from_value(other, &format!("{origin}: scenario"))?,
    };
    let s = Arc::new(scenario);
    let kinds: Vec<(bool, bool)> = raw.tables.iter().map(|t| (t.probs.is_some(), t.possible.is_some())).collect();
    let probabilistic = kinds.iter().all(|&(p, q)| p && !q);
    let possibilistic = kinds.iter().all(|&(p, q)| q && !p);
    if !probabilistic && !possibilistic {
        return Err(json_err(
            origin,
            "every table needs exactly one of `probs` or `possible`, the same for all tables",
        ));
    }
    let mut seen: Vec<Option<usize>> = vec![None; s.context_count()];
    let mut probs: Vec<Vec<Rational>> = (0..s.context_count()).map(|c| vec![Rational::zero(); s.joint_count(c)]).collect();
    let mut poss: Vec<Vec<bool>> = (0..s.context_count()).map(|c| vec![false; s.joint_count(c)]).collect();
    for (t, table) in raw.tables.iter().enumerate() {
        let at = format!("{origin}: tables[{t}] (context {})", table.context.join(","));
        let (c, perm) = match_context(&s, &table.context, &at)?;
        if let Some(prev) = seen[c] {
            return Err(json_err(&at, format!("context already given by tables[{prev}]")));
        }
        seen[c] = Some(t);
        if let Some(map) = &table.probs {
            for (key, value) in map {
                let entry = format!("{at}, entry \"{key}\"");
                let labels: Vec<&str> = key.split(',').map(str::trim).collect();
                let o = parse_outcome(&s, c, &perm, &labels, &entry)?;
                let text = match value {
                    Value::String(x) => x.clone(),
                    Value::Number(x) => x.to_string(),
                    other => return Err(json_err(&entry, format!("expected a number or string, got {other}"))),
                };
                probs[c][s.encode(c, &o)] = rational::parse(&text).map_err(|e| json_err(&entry, e))?;
            }
        }
        if let Some(list) = &table.possible {
            for (k, labels) in list.iter().enumerate() {
                let labels: Vec<&str> = labels.iter().map(String::as_str).collect();
                let o = parse_outcome(&s, c, &perm, &labels, &format!("{at}, possible[{k}]"))?;
                poss[c][s.encode(c, &o)] = true;
            }
        }
    }
    if let Some(c) = seen.iter().position(Option::is_none) {
        let names: Vec<&str> = s.context(c).iter().map(|&m| s.name(m)).collect();
        return Err(json_err(origin, format!("no table for context {}", names.join(","))));
    }
    let data = if probabilistic {
        BehaviorData::Probabilistic(Behavior::new(s, probs).map_err(|e| json_err(origin, e))?)
    } else {
        BehaviorData::Possibilistic(PossibilisticBehavior::new(s, poss).map_err(|e| json_err(origin, e))?)
    };
    Ok(BehaviorFile {
        data,
        metadata: raw.metadata,
    })
}

pub fn load_behavior(path: &Path) -> Result<BehaviorFile> {
    behavior_from_value(read(path)?, &path.display().to_string(), path.parent())
}

fn context_names(s: &Scenario, c: usize) -> Vec<&str> {
    s.context(c).iter().map(|&m| s.name(m)).collect()
}

/// Nonzero entries only, keyed `"x,y,..."` in scenario context order.
pub fn behavior_to_value(b: &Behavior, metadata: Option<Value>) -> Value {
    let s = b.scenario();
    let tables: Vec<Value> = (0..s.context_count())
        .map(|c| {
            let probs: Map<String, Value> = b
                .table(c)
                .iter()
                .enumerate()
                .filter(|(_, p)| !p.is_zero())
                .map(|(i, p)| (s.labels(c, &s.decode(c, i)).join(","), json!(rational::format(p))))
                .collect();
            json!({"context": context_names(s, c), "probs": probs})
        })
        .collect();
    with_metadata(json!({"scenario": scenario_to_value(s), "tables": tables}), metadata)
}

pub fn possibilistic_to_value(pb: &PossibilisticBehavior, metadata: Option<Value>) -> Value {
    let s = pb.scenario();
    let tables: Vec<Value> = (0..s.context_count())
        .map(|c| {
            let possible: Vec<Vec<String>> = pb.possible_outcomes(c).iter().map(|o| s.labels(c, o)).collect();
            json!({"context": context_names(s, c), "possible": possible})
        })
        .collect();
    with_metadata(json!({"scenario": scenario_to_value(s), "tables": tables}), metadata)
}

fn with_metadata(mut v: Value, metadata: Option<Value>) -> Value {
    if let Some(m) = metadata {
        v["metadata"] = m;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::ratio;

    #[test]
    fn behavior_round_trip_is_exact() {
        let b = fixtures::hardy_model().uniform_completion();
        let v = behavior_to_value(&b, Some(json!({"note": "uniform"})));
        let back = behavior_from_value(v, "test", None).unwrap();
        assert_eq!(back.data, BehaviorData::Probabilistic(b));
        assert_eq!(back.metadata, Some(json!({"note": "uniform"})));
    }

    #[test]
    fn possibilistic_round_trip() {
        let pb = fixtures::pr_box();
        let back = behavior_from_value(possibilistic_to_value(&pb, None), "test", None).unwrap();
        assert_eq!(back.data, BehaviorData::Possibilistic(pb));
    }

    #[test]
    fn tables_may_list_contexts_in_another_order() {
        let v = json!({
            "scenario": scenario_to_value(&fixtures::chsh_cycle()),
            "tables": [
                {"context": ["B1", "A1"], "probs": {"0,0": "1/2", "1,1": 0.5}},
                {"context": ["B1", "A2"], "probs": {"0,0": "1/2", "1,1": "1/2"}},
                {"context": ["A2", "B2"], "probs": {"0,0": "1/2", "1,1": "1/2"}},
                {"context": ["B2", "A1"], "probs": {"0,1": "1/2", "1,0": "1/2"}}
            ]
        });
        let f = behavior_from_value(v, "test", None).unwrap();
        let BehaviorData::Probabilistic(b) = f.data else { panic!() };
        assert_eq!(*b.prob(0, &[1, 1]), ratio(1, 2));
        assert_eq!(b.collapse(), fixtures::pr_box());
    }

    #[test]
    fn errors_point_at_the_entry() {
        let v = json!({
            "scenario": scenario_to_value(&fixtures::chsh_cycle()),
            "tables": [{"context": ["A1", "B1"], "probs": {"0,x": "1"}}]
        });
        let e = behavior_from_value(v, "f.json", None).unwrap_err().to_string();
        assert!(e.contains("f.json: tables[0] (context A1,B1), entry \"0,x\""), "{e}");
        let v = json!({
            "scenario": scenario_to_value(&fixtures::chsh_cycle()),
            "tables": [{"context": ["A1", "A2"], "possible": [["0", "0"]]}]
        });
        let e = behavior_from_value(v, "f.json", None).unwrap_err().to_string();
        assert!(e.contains("not a context"), "{e}");
        let e = behavior_from_value(json!({"tables": []}), "f.json", None).unwrap_err();
        assert!(matches!(e, Error::Json(_)));
    }

    #[test]
    fn scenario_paths_resolve_next_to_the_behavior() {
        let dir = std::env::temp_dir().join(format!("ctx-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let s = fixtures::chsh_cycle();
        std::fs::write(dir.join("chsh.json"), scenario_to_value(&s).to_string()).unwrap();
        let mut v = possibilistic_to_value(&fixtures::bell_model(), None);
        v["scenario"] = json!("chsh.json");
        std::fs::write(dir.join("bell.json"), v.to_string()).unwrap();
        let f = load_behavior(&dir.join("bell.json")).unwrap();
        assert_eq!(f.data, BehaviorData::Possibilistic(fixtures::bell_model()));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
