//! Text and JSON forms of values, strategies and witnesses. States are
//! always referred to by name and listed in declaration order.
//!
//! - values: `{"values":{"q1":"1/1","q2":"-inf"}}`
//! - memoryless strategy: one `q -> q'` per line
//! - multi-strategy: one `q -> {a,b}` per line
//! - witness: `{"threshold":"1/1","trap":[..],"node":{"parity":..,
//!   "strategy":{..},"trapT":[..],"children":[..]}}`

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value as Json};
use thiserror::Error;

use crate::certificates::{NpWitness, WitnessNode};
use crate::game::{Game, Owner, StateId};
use crate::penalty::MultiStrategy;
use crate::set::StateSet;
use crate::strategy::MemorylessStrategy;
use crate::value::{Rat, Value, ValueFunction};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IoError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("invalid strategy: {0}")]
    Strategy(String),
    #[error("invalid witness: {0}")]
    Witness(String),
    #[error("invalid JSON: {0}")]
    Json(String),
}

fn state(g: &Game, name: &str) -> Result<StateId, IoError> {
    g.state_by_name(name)
        .ok_or_else(|| IoError::UnknownState(name.to_string()))
}

pub fn values_json(g: &Game, v: &ValueFunction) -> Json {
    let mut m = Map::new();
    for (q, x) in v.iter() {
        m.insert(g.name(q).to_string(), Json::String(x.to_string()));
    }
    let mut top = Map::new();
    top.insert("values".into(), Json::Object(m));
    Json::Object(top)
}

/// Compact values document followed by a newline.
pub fn format_values(g: &Game, v: &ValueFunction) -> String {
    format!("{}\n", values_json(g, v))
}

pub fn parse_values(g: &Game, text: &str) -> Result<ValueFunction, IoError> {
    let doc: Json = serde_json::from_str(text).map_err(|e| IoError::Json(e.to_string()))?;
    let m = doc
        .get("values")
        .and_then(Json::as_object)
        .ok_or_else(|| IoError::Json("missing `values` object".into()))?;
    let mut out = ValueFunction::empty(g.num_states());
    for (name, x) in m {
        let x = x
            .as_str()
            .and_then(|s| s.parse::<Value>().ok())
            .ok_or_else(|| IoError::Json(format!("bad value for `{name}`")))?;
        out.set(state(g, name)?, x);
    }
    Ok(out)
}

fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap().trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn arrow(line: usize, l: &str) -> Result<(&str, &str), IoError> {
    l.split_once("->")
        .map(|(a, b)| (a.trim(), b.trim()))
        .ok_or_else(|| IoError::Syntax {
            line,
            msg: "expected `<state> -> <successor>`".into(),
        })
}

pub fn format_strategy(g: &Game, s: &MemorylessStrategy) -> String {
    s.iter()
        .map(|(q, d)| format!("{} -> {}\n", g.name(q), g.name(d)))
        .collect()
}

/// Reads a memoryless strategy; its owner is the owner of the listed
/// states, all of whose states must be listed exactly once.
pub fn parse_strategy(g: &Game, text: &str) -> Result<MemorylessStrategy, IoError> {
    parse_owned(g, None, text)
}

/// Like [`parse_strategy`] with the owner fixed, so an empty file is the
/// strategy of a player without states.
pub fn parse_strategy_of(g: &Game, owner: Owner, text: &str) -> Result<MemorylessStrategy, IoError> {
    parse_owned(g, Some(owner), text)
}

fn parse_owned(
    g: &Game,
    mut owner: Option<Owner>,
    text: &str,
) -> Result<MemorylessStrategy, IoError> {
    let mut choice = vec![None; g.num_states()];
    for (line, l) in lines(text) {
        let (a, b) = arrow(line, l)?;
        let (q, d) = (state(g, a)?, state(g, b)?);
        match owner {
            None => owner = Some(g.owner(q)),
            Some(o) if o != g.owner(q) => {
                return Err(IoError::Strategy(format!(
                    "line {line}: `{a}` is not a Player {o} state"
                )))
            }
            _ => {}
        }
        if choice[q.0].replace(d).is_some() {
            return Err(IoError::Strategy(format!("line {line}: `{a}` listed twice")));
        }
    }
    let owner = owner.ok_or_else(|| IoError::Strategy("no moves".into()))?;
    MemorylessStrategy::new(g, owner, choice).map_err(|e| IoError::Strategy(e.to_string()))
}

pub fn format_multi(g: &Game, s: &MultiStrategy) -> String {
    s.iter()
        .map(|(q, set)| {
            let names: Vec<&str> = set.iter().map(|&d| g.name(d)).collect();
            format!("{} -> {{{}}}\n", g.name(q), names.join(","))
        })
        .collect()
}

pub fn parse_multi(g: &Game, text: &str) -> Result<MultiStrategy, IoError> {
    let mut allowed: Vec<Option<Vec<StateId>>> = vec![None; g.num_states()];
    for (line, l) in lines(text) {
        let (a, b) = arrow(line, l)?;
        let inner = b
            .strip_prefix('{')
            .and_then(|b| b.strip_suffix('}'))
            .ok_or_else(|| IoError::Syntax {
                line,
                msg: "expected `{a,b,...}`".into(),
            })?;
        let set = inner
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| state(g, s))
            .collect::<Result<Vec<_>, _>>()?;
        let q = state(g, a)?;
        if allowed[q.0].replace(set).is_some() {
            return Err(IoError::Strategy(format!("line {line}: `{a}` listed twice")));
        }
    }
    MultiStrategy::new(g, allowed).map_err(|e| IoError::Strategy(e.to_string()))
}

#[derive(Serialize, Deserialize)]
struct WitnessDoc {
    threshold: String,
    trap: Vec<String>,
    node: NodeDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    parity: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    strategy: Option<Map<String, Json>>,
    #[serde(rename = "trapT", default, skip_serializing_if = "Option::is_none")]
    trap_t: Option<Vec<String>>,
    children: Vec<NodeDoc>,
}

fn names(g: &Game, s: &StateSet) -> Vec<String> {
    s.iter().map(|q| g.name(q).to_string()).collect()
}

fn node_doc(g: &Game, n: &WitnessNode) -> NodeDoc {
    match n {
        WitnessNode::Empty => NodeDoc {
            parity: "empty".into(),
            strategy: None,
            trap_t: None,
            children: Vec::new(),
        },
        WitnessNode::Even { strategy, child } => {
            let mut sorted = strategy.clone();
            sorted.sort();
            NodeDoc {
                parity: "even".into(),
                strategy: Some(
                    sorted
                        .iter()
                        .map(|&(q, d)| (g.name(q).to_string(), Json::String(g.name(d).to_string())))
                        .collect(),
                ),
                trap_t: None,
                children: vec![node_doc(g, child)],
            }
        }
        WitnessNode::Odd { trap, inside, rest } => NodeDoc {
            parity: "odd".into(),
            strategy: None,
            trap_t: Some(names(g, trap)),
            children: vec![node_doc(g, inside), node_doc(g, rest)],
        },
    }
}

pub fn format_witness(g: &Game, w: &NpWitness) -> String {
    let doc = WitnessDoc {
        threshold: w.threshold.to_string(),
        trap: names(g, &w.trap),
        node: node_doc(g, &w.root),
    };
    format!("{}\n", serde_json::to_string_pretty(&doc).expect("plain data"))
}

fn state_set(g: &Game, names: &[String]) -> Result<StateSet, IoError> {
    let mut s = StateSet::new(g.num_states());
    for n in names {
        s.insert(state(g, n)?);
    }
    Ok(s)
}

fn parse_node(g: &Game, d: NodeDoc) -> Result<WitnessNode, IoError> {
    let bad = |m: &str| Err(IoError::Witness(m.to_string()));
    let mut children = d.children.into_iter();
    let mut next = |g: &Game| -> Result<Box<WitnessNode>, IoError> {
        let c = children
            .next()
            .ok_or_else(|| IoError::Witness("missing child".into()))?;
        Ok(Box::new(parse_node(g, c)?))
    };
    let node = match (d.parity.as_str(), d.strategy, d.trap_t) {
        ("empty", None, None) => WitnessNode::Empty,
        ("even", Some(m), None) => {
            let mut strategy = Vec::new();
            for (q, t) in m {
                let t = t
                    .as_str()
                    .ok_or_else(|| IoError::Witness(format!("successor of `{q}` is not a name")))?;
                strategy.push((state(g, &q)?, state(g, t)?));
            }
            WitnessNode::Even {
                strategy,
                child: next(g)?,
            }
        }
        ("odd", None, Some(t)) => WitnessNode::Odd {
            trap: state_set(g, &t)?,
            inside: next(g)?,
            rest: next(g)?,
        },
        ("empty" | "even" | "odd", _, _) => return bad("fields do not match the parity"),
        (p, _, _) => return Err(IoError::Witness(format!("unknown parity `{p}`"))),
    };
    if children.next().is_some() {
        return bad("too many children");
    }
    Ok(node)
}

pub fn parse_witness(g: &Game, text: &str) -> Result<NpWitness, IoError> {
    let doc: WitnessDoc = serde_json::from_str(text).map_err(|e| IoError::Json(e.to_string()))?;
    let threshold: Rat = doc
        .threshold
        .parse()
        .map_err(|_| IoError::Witness(format!("bad threshold `{}`", doc.threshold)))?;
    Ok(NpWitness {
        threshold,
        trap: state_set(g, &doc.trap)?,
        root: parse_node(g, doc.node)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificates::make_np_witness;
    use crate::game::parse_game;
    use crate::mpp::solve_mpp;

    const DELAY: &str = "mppg v1
kind mean-payoff-parity
state q1 owner=1 priority=1
state q2 owner=1 priority=0
edge q1 q1 weight=1
edge q1 q2 weight=0
edge q2 q1 weight=0
";

    const BLOCKING: &str = "mppg v1
kind mean-penalty-parity
state q1 owner=1 priority=1
state q2 owner=2 priority=0
edge q1 q1 weight=2
edge q1 q2 weight=2
edge q2 q1 weight=0
";

    #[test]
    fn delay_values_document() {
        let g = parse_game(DELAY).unwrap();
        let v = solve_mpp(&g);
        let text = format_values(&g, &v);
        assert_eq!(text, "{\"values\":{\"q1\":\"1/1\",\"q2\":\"1/1\"}}\n");
        assert_eq!(parse_values(&g, &text).unwrap(), v);
    }

    #[test]
    fn infinite_values_are_words() {
        let g = parse_game(DELAY).unwrap();
        let v = ValueFunction::from_values(vec![Value::NegInf, Value::PosInf]);
        assert_eq!(format_values(&g, &v), "{\"values\":{\"q1\":\"-inf\",\"q2\":\"inf\"}}\n");
    }

    #[test]
    fn strategy_text() {
        let g = parse_game(DELAY).unwrap();
        let s = parse_strategy(&g, "q1 -> q2  # leave\nq2 -> q1\n").unwrap();
        assert_eq!(s.owner(), Owner::P1);
        assert_eq!(format_strategy(&g, &s), "q1 -> q2\nq2 -> q1\n");
        assert!(matches!(parse_strategy(&g, "q1 -> q3\n"), Err(IoError::UnknownState(_))));
        assert!(matches!(parse_strategy(&g, "q1 q2\n"), Err(IoError::Syntax { line: 1, .. })));
        // q2 missing
        assert!(matches!(parse_strategy(&g, "q1 -> q1\n"), Err(IoError::Strategy(_))));
        assert!(parse_strategy(&g, "").is_err());
    }

    #[test]
    fn multi_strategy_text() {
        let g = parse_game(BLOCKING).unwrap();
        let s = parse_multi(&g, "q1 -> {q2, q1}\n").unwrap();
        // kept in successor declaration order
        assert_eq!(format_multi(&g, &s), "q1 -> {q1,q2}\n");
        assert!(parse_multi(&g, "q1 -> {}\n").is_err());
        assert!(parse_multi(&g, "q1 -> q2\n").is_err());
        assert!(parse_multi(&g, "q2 -> {q1}\n").is_err());
    }

    #[test]
    fn witness_round_trip() {
        let g = parse_game(DELAY).unwrap();
        let w = make_np_witness(&g, Rat::from_int(1)).unwrap();
        let text = format_witness(&g, &w);
        assert!(text.contains("\"parity\": \"even\""));
        let back = parse_witness(&g, &text).unwrap();
        assert_eq!(format_witness(&g, &back), text);
    }

    #[test]
    fn witness_shape_errors() {
        let g = parse_game(DELAY).unwrap();
        let doc = |node: &str| format!("{{\"threshold\":\"0\",\"trap\":[\"q1\"],\"node\":{node}}}");
        let odd_without_trap = doc("{\"parity\":\"odd\",\"children\":[]}");
        assert!(matches!(parse_witness(&g, &odd_without_trap), Err(IoError::Witness(_))));
        let extra = doc("{\"parity\":\"empty\",\"children\":[{\"parity\":\"empty\",\"children\":[]}]}");
        assert!(matches!(parse_witness(&g, &extra), Err(IoError::Witness(_))));
        assert!(matches!(parse_witness(&g, "{"), Err(IoError::Json(_))));
        let ok = doc("{\"parity\":\"empty\",\"children\":[]}");
        assert_eq!(parse_witness(&g, &ok).unwrap().root, WitnessNode::Empty);
    }
}
