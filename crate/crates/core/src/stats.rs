//! Evaluation counters.
//!
//! Counters are monotone within one evaluation. Per-(subgoal, clause)
//! application counts are tracked per tree build and folded into the
//! report as the maximum over builds, so they bound the reuse of a
//! clause by variant subgoals within a single generalized tree.

use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug, Default)]
pub struct Stats {
    pub slt_calls: u64,
    pub sltp_calls: u64,
    pub generalized_trees_built: u64,
    pub clause_applications: u64,
    pub tabled_answer_applications: u64,
    pub subgoal_comparisons: u64,
    /// (canonical subgoal, clause id) -> max applications in any one build.
    pub apps: BTreeMap<(String, usize), u64>,
    /// Canonical subgoals selected anywhere during the evaluation.
    pub subgoals_seen: BTreeSet<String>,
}

impl Stats {
    /// Fold one build's per-(subgoal, clause) counts into the report.
    pub fn fold_build_apps(&mut self, build: &BTreeMap<(String, usize), u64>) {
        for (key, count) in build {
            let slot = self.apps.entry(key.clone()).or_insert(0);
            *slot = (*slot).max(*count);
        }
    }

    /// Flat JSON object: counter name -> integer.
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        map.insert("slt_calls".into(), self.slt_calls.into());
        map.insert("sltp_calls".into(), self.sltp_calls.into());
        map.insert(
            "generalized_trees_built".into(),
            self.generalized_trees_built.into(),
        );
        map.insert(
            "clause_applications".into(),
            self.clause_applications.into(),
        );
        map.insert(
            "tabled_answer_applications".into(),
            self.tabled_answer_applications.into(),
        );
        map.insert(
            "subgoal_comparisons".into(),
            self.subgoal_comparisons.into(),
        );
        for ((subgoal, clause), count) in &self.apps {
            map.insert(format!("apps.{subgoal}.C{}", clause + 1), (*count).into());
        }
        serde_json::Value::Object(map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fold_takes_max_over_builds() {
        let mut s = Stats::default();
        let mut b1 = BTreeMap::new();
        b1.insert(("p(V0)".to_string(), 0), 3u64);
        b1.insert(("q".to_string(), 1), 1u64);
        s.fold_build_apps(&b1);
        let mut b2 = BTreeMap::new();
        b2.insert(("p(V0)".to_string(), 0), 2u64);
        b2.insert(("r".to_string(), 2), 5u64);
        s.fold_build_apps(&b2);
        assert_eq!(s.apps[&("p(V0)".to_string(), 0)], 3);
        assert_eq!(s.apps[&("q".to_string(), 1)], 1);
        assert_eq!(s.apps[&("r".to_string(), 2)], 5);
    }

    #[test]
    fn json_is_flat_and_sorted() {
        let mut s = Stats::default();
        s.slt_calls = 2;
        s.sltp_calls = 3;
        s.apps.insert(("p(V0)".to_string(), 1), 4);
        let v = s.to_json();
        let obj = v.as_object().unwrap();
        assert_eq!(obj["slt_calls"], 2);
        assert_eq!(obj["sltp_calls"], 3);
        assert_eq!(obj["apps.p(V0).C2"], 4);
        assert!(obj.values().all(|v| v.is_u64()));
    }
}
