//! Multi-agent knowledge: per-agent valuations over a shared frame,
//! threshold voting into a single derived valuation, and the
//! shared-knowledge reading that quantifies over all agents.

use crate::error::{Error, Result};
use crate::semantics::{eval, PeriodicModel};
use crate::syntax::Formula;
use serde_json::{json, Value};

/// A group of agents with structurally identical models (same letters,
/// bound and shape) whose valuations may differ, plus the vote threshold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentProfile {
    agents: Vec<PeriodicModel>,
    threshold: usize,
}

/// The default quota: strictly more than half of the agents.
pub fn strict_majority(agent_count: usize) -> usize {
    agent_count / 2 + 1
}

impl AgentProfile {
    pub fn new(agents: Vec<PeriodicModel>, threshold: usize) -> Result<AgentProfile> {
        let Some(first) = agents.first() else {
            return Err(Error::IncompatibleAgents("no agents".into()));
        };
        for (i, agent) in agents.iter().enumerate().skip(1) {
            if agent.letters() != first.letters() {
                return Err(Error::IncompatibleAgents(format!(
                    "agents[{i}]: letters differ from agents[0]"
                )));
            }
            if agent.bound() != first.bound() {
                return Err(Error::IncompatibleAgents(format!(
                    "agents[{i}]: bound differs from agents[0]"
                )));
            }
            if agent.prefix_len() != first.prefix_len() || agent.loop_len() != first.loop_len() {
                return Err(Error::IncompatibleAgents(format!(
                    "agents[{i}]: prefix/loop shape differs from agents[0]"
                )));
            }
        }
        if threshold < 1 || threshold > agents.len() {
            return Err(Error::IncompatibleAgents(format!(
                "threshold {threshold} out of range 1..={}",
                agents.len()
            )));
        }
        Ok(AgentProfile { agents, threshold })
    }

    pub fn agents(&self) -> &[PeriodicModel] {
        &self.agents
    }

    pub fn threshold(&self) -> usize {
        self.threshold
    }

    /// The voted model: a letter is true at a position when at least
    /// `threshold` agents make it true there; bound and shape are
    /// inherited from the agents.
    pub fn vote_model(&self) -> PeriodicModel {
        let first = &self.agents[0];
        let letters = first.letters().to_vec();
        let voted_row = |a: usize| -> Vec<bool> {
            (0..letters.len())
                .map(|i| {
                    let votes = self.agents.iter().filter(|agent| agent.row(a)[i]).count();
                    votes >= self.threshold
                })
                .collect()
        };
        let prefix = (0..first.prefix_len()).map(voted_row).collect();
        let loop_rows = (first.prefix_len()..first.prefix_len() + first.loop_len())
            .map(voted_row)
            .collect();
        PeriodicModel::new(letters, prefix, loop_rows, first.bound().clone())
            .expect("voting preserves the agents' shape")
    }

    /// Evaluates a formula (knowledge operators welcome) over the voted
    /// valuation.
    pub fn eval_voted_knowledge(&self, f: &Formula, a: usize) -> Result<bool> {
        eval(&self.vote_model(), f, a)
    }

    /// Shared parameterized knowledge: `phi S psi` must hold at `a` under
    /// every agent's own valuation. Knowledge operators inside the
    /// arguments are rejected; no semantics is defined for nesting them
    /// across several valuations.
    pub fn eval_shared_knowledge(&self, psi: &Formula, phi: &Formula, a: usize) -> Result<bool> {
        if contains_knowledge_op(psi) || contains_knowledge_op(phi) {
            return Err(Error::NestedKnowledgeUnsupported);
        }
        let body = Formula::since(phi.clone(), psi.clone());
        for agent in &self.agents {
            if !eval(agent, &body, a)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    // {"threshold": 2, "agents": [<model>, ...]}
    pub fn from_json_str(text: &str) -> Result<AgentProfile> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| Error::InvalidModel(format!("not valid JSON: {e}")))?;
        AgentProfile::from_json(&value)
    }

    pub fn from_json(value: &Value) -> Result<AgentProfile> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::InvalidModel("root: expected an object".into()))?;
        let threshold = obj
            .get("threshold")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::InvalidModel("threshold: expected a natural".into()))?;
        let agents_json = obj
            .get("agents")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidModel("agents: expected an array".into()))?;
        let agents: Vec<PeriodicModel> = agents_json
            .iter()
            .enumerate()
            .map(|(i, v)| {
                PeriodicModel::from_json(v).map_err(|e| match e {
                    Error::InvalidModel(msg) => Error::InvalidModel(format!("agents[{i}].{msg}")),
                    other => other,
                })
            })
            .collect::<Result<_>>()?;
        AgentProfile::new(agents, threshold as usize)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "threshold": self.threshold,
            "agents": self.agents.iter().map(PeriodicModel::to_json).collect::<Vec<_>>(),
        })
    }
}

fn contains_knowledge_op(f: &Formula) -> bool {
    match f {
        Formula::K1(_) | Formula::K2(_) | Formula::KPar { .. } => true,
        Formula::Atom(_) | Formula::Top | Formula::Bottom => false,
        Formula::Not(g) | Formula::Next(g) | Formula::Box(g) | Formula::Diamond(g) => {
            contains_knowledge_op(g)
        }
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Since(l, r) => {
            contains_knowledge_op(l) || contains_knowledge_op(r)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::Bound;
    use crate::syntax::parse_formula;

    fn f(text: &str) -> Formula {
        parse_formula(text).unwrap()
    }

    fn agent(letters: &[&str], prefix: &[&[u8]], loop_rows: &[&[u8]], m: u32) -> PeriodicModel {
        let conv = |rows: &[&[u8]]| {
            rows.iter()
                .map(|r| r.iter().map(|b| *b != 0).collect())
                .collect()
        };
        PeriodicModel::new(
            letters.iter().map(|s| s.to_string()).collect(),
            conv(prefix),
            conv(loop_rows),
            Bound::Uniform(m),
        )
        .unwrap()
    }

    #[test]
    fn unanimous_profile_votes_to_the_shared_valuation() {
        let a = agent(&["p"], &[&[1], &[0]], &[&[1]], 1);
        for threshold in 1..=3 {
            let profile =
                AgentProfile::new(vec![a.clone(), a.clone(), a.clone()], threshold).unwrap();
            assert_eq!(profile.vote_model(), a);
        }
    }

    #[test]
    fn majority_vote_on_split_opinions() {
        let yes = agent(&["p"], &[&[1]], &[&[0]], 1);
        let no = agent(&["p"], &[&[0]], &[&[0]], 1);
        let two_of_three =
            AgentProfile::new(vec![yes.clone(), yes.clone(), no.clone()], 2).unwrap();
        assert!(two_of_three.vote_model().row(0)[0]);
        let one_of_three = AgentProfile::new(vec![yes, no.clone(), no], 2).unwrap();
        assert!(!one_of_three.vote_model().row(0)[0]);
    }

    #[test]
    fn raising_the_threshold_never_adds_truths() {
        let a = agent(&["p", "q"], &[&[1, 0]], &[&[0, 1], &[1, 1]], 1);
        let b = agent(&["p", "q"], &[&[1, 1]], &[&[0, 0], &[1, 0]], 1);
        let c = agent(&["p", "q"], &[&[0, 0]], &[&[0, 1], &[0, 0]], 1);
        for t in 1..3 {
            let low = AgentProfile::new(vec![a.clone(), b.clone(), c.clone()], t)
                .unwrap()
                .vote_model();
            let high = AgentProfile::new(vec![a.clone(), b.clone(), c.clone()], t + 1)
                .unwrap()
                .vote_model();
            for pos in 0..3 {
                for i in 0..2 {
                    assert!(!high.row(pos)[i] || low.row(pos)[i]);
                }
            }
        }
    }

    #[test]
    fn voted_knowledge_goes_through_the_voted_model() {
        let all_p = agent(&["p", "q"], &[], &[&[1, 0]], 1);
        let profile = AgentProfile::new(vec![all_p.clone(), all_p.clone()], 2).unwrap();
        for a in 0..4 {
            assert!(profile.eval_voted_knowledge(&f("K2 p"), a).unwrap());
            // K1 collapses to its argument under any valuation.
            assert_eq!(
                profile.eval_voted_knowledge(&f("K1 q"), a).unwrap(),
                profile.eval_voted_knowledge(&f("q"), a).unwrap()
            );
        }
    }

    #[test]
    fn parameterized_knowledge_with_a_next_step_trigger() {
        // Voted q true at position 1, voted p true at 0: K[q] p holds at 0.
        let a1 = agent(&["p", "q"], &[&[1, 0], &[0, 1]], &[&[0, 0]], 1);
        let a2 = agent(&["p", "q"], &[&[1, 0], &[1, 1]], &[&[0, 0]], 1);
        let a3 = agent(&["p", "q"], &[&[0, 1], &[0, 1]], &[&[0, 0]], 1);
        let profile = AgentProfile::new(vec![a1, a2, a3], 2).unwrap();
        let voted = profile.vote_model();
        assert!(voted.row(0)[0] && !voted.row(0)[1]);
        assert!(voted.row(1)[1]);
        assert!(profile.eval_voted_knowledge(&f("K[q] p"), 0).unwrap());
    }

    #[test]
    fn shared_knowledge_quantifies_over_every_agent() {
        let holds = agent(&["p", "q"], &[], &[&[1, 1]], 1);
        let fails = agent(&["p", "q"], &[], &[&[0, 0]], 1);

        let single = AgentProfile::new(vec![holds.clone()], 1).unwrap();
        assert_eq!(
            single.eval_shared_knowledge(&f("q"), &f("p"), 0).unwrap(),
            eval(&holds, &f("p S q"), 0).unwrap()
        );

        let dissent = AgentProfile::new(vec![holds.clone(), fails], 1).unwrap();
        assert!(!dissent.eval_shared_knowledge(&f("q"), &f("p"), 0).unwrap());

        let both = AgentProfile::new(vec![holds.clone(), holds], 1).unwrap();
        assert!(both.eval_shared_knowledge(&f("q"), &f("p"), 0).unwrap());
    }

    #[test]
    fn nested_knowledge_in_shared_arguments_is_rejected() {
        let a = agent(&["p", "q"], &[], &[&[1, 1]], 1);
        let profile = AgentProfile::new(vec![a], 1).unwrap();
        assert_eq!(
            profile.eval_shared_knowledge(&f("q"), &f("K1 p"), 0),
            Err(Error::NestedKnowledgeUnsupported)
        );
        assert_eq!(
            profile.eval_shared_knowledge(&f("K[q] p"), &f("p"), 0),
            Err(Error::NestedKnowledgeUnsupported)
        );
    }

    #[test]
    fn profile_validation_and_json() {
        let a = agent(&["p"], &[&[1]], &[&[0]], 1);
        let wrong_letters = agent(&["q"], &[&[1]], &[&[0]], 1);
        assert!(matches!(
            AgentProfile::new(vec![a.clone(), wrong_letters], 1),
            Err(Error::IncompatibleAgents(_))
        ));
        let wrong_shape = agent(&["p"], &[], &[&[0]], 1);
        assert!(matches!(
            AgentProfile::new(vec![a.clone(), wrong_shape], 1),
            Err(Error::IncompatibleAgents(_))
        ));
        let wrong_bound = agent(&["p"], &[&[1]], &[&[0]], 2);
        assert!(matches!(
            AgentProfile::new(vec![a.clone(), wrong_bound], 1),
            Err(Error::IncompatibleAgents(_))
        ));
        assert!(matches!(
            AgentProfile::new(vec![a.clone()], 2),
            Err(Error::IncompatibleAgents(_))
        ));

        let profile = AgentProfile::new(vec![a.clone(), a], 2).unwrap();
        let json = profile.to_json();
        let back = AgentProfile::from_json(&json).unwrap();
        assert_eq!(back, profile);
        assert_eq!(strict_majority(2), 2);
        assert_eq!(strict_majority(5), 3);
    }
}
