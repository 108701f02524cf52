//! Serialization of posets (JSON and Graphviz DOT).

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::poset::label::LabeledPoset;
use crate::poset::FinitePoset;

/// `{"elements": [...], "covers": [[i, j], ...], "rank": [...]}`, with
/// optional per-cover `"labels"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetJson {
    pub elements: Vec<String>,
    pub covers: Vec<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rank: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub labels: Option<Vec<String>>,
}

impl PosetJson {
    pub fn from_poset(p: &FinitePoset) -> Self {
        PosetJson {
            elements: p.keys().to_vec(),
            covers: p.covers().iter().map(|&(a, b)| [a, b]).collect(),
            rank: p.rank().map(<[i64]>::to_vec),
            labels: None,
        }
    }

    pub fn from_labeled(lp: &LabeledPoset) -> Self {
        let mut json = Self::from_poset(&lp.poset);
        json.labels = Some(lp.labels.iter().map(|l| l.display()).collect());
        json
    }

    pub fn to_poset(&self) -> Result<FinitePoset> {
        FinitePoset::new(
            self.elements.clone(),
            self.covers.iter().map(|&[a, b]| (a, b)).collect(),
            self.rank.clone(),
        )
    }
}

/// Hasse diagram in DOT, bottom to top; `labels` are per-cover edge labels.
pub fn poset_to_dot(p: &FinitePoset, labels: Option<&[String]>) -> String {
    let mut out = String::from("digraph poset {\n  rankdir=BT;\n  node [shape=plaintext];\n");
    for (i, key) in p.keys().iter().enumerate() {
        let _ = writeln!(out, "  n{i} [label={key:?}];");
    }
    for (k, &(a, b)) in p.covers().iter().enumerate() {
        match labels.and_then(|l| l.get(k)) {
            Some(l) => {
                let _ = writeln!(out, "  n{a} -> n{b} [label={l:?}];");
            }
            None => {
                let _ = writeln!(out, "  n{a} -> n{b};");
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_dot() {
        let p = FinitePoset::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![(0, 1), (0, 2)],
            Some(vec![0, 1, 1]),
        )
        .unwrap();
        let json = PosetJson::from_poset(&p);
        let text = serde_json::to_string(&json).unwrap();
        assert_eq!(
            text,
            r#"{"elements":["a","b","c"],"covers":[[0,1],[0,2]],"rank":[0,1,1]}"#
        );
        let back: PosetJson = serde_json::from_str(&text).unwrap();
        assert_eq!(PosetJson::from_poset(&back.to_poset().unwrap()), json);
        let dot = poset_to_dot(&p, None);
        assert!(dot.contains("n0 -> n1;") && dot.starts_with("digraph"));
    }
}
