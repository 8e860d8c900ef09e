//! Admissibility of inference rules: sound certificates and bounded
//! counterexample search.
//!
//! A rule is admissible when every substitution that turns all premises
//! into theorems also turns the conclusion into a theorem. Three
//! certificates give definite positive answers:
//!
//! * frame validity — a rule that holds in every model stays valid under
//!   instantiation, because instances are evaluated over the same models;
//! * the Next-elimination pattern — a Boolean template whose premise slots
//!   carry `N phi` (or `(N phi) S (N psi)`) and whose conclusion drops the
//!   `N`s is admissible even where it is frame-invalid;
//! * derivability — the premise-to-conclusion implication is itself a
//!   theorem (used when the frame-validity check runs out of budget).
//!
//! A definite negative answer is a substitution whose premise instances
//! all check as theorems while the conclusion instance has a countermodel.
//! When neither side lands within the search budget the verdict is an
//! explicit `Unknown` carrying the bounds that were tried.

use crate::decision::{
    frame_valid_rule_budgeted, is_theorem_budgeted, LassoWitness, Theoremhood,
    DEFAULT_NODE_BUDGET,
};
use crate::error::{Error, Result};
use crate::normal_form::to_single_premise;
use crate::syntax::{Formula, Rule, Substitution};
use serde_json::{json, Value};
use std::collections::BTreeSet;

/// Bounds for the substitution search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchBudget {
    /// Maximum operator depth of substituted formulas.
    pub max_depth: u32,
    /// Fresh letters added to the rule's own alphabet.
    pub extra_letters: u32,
    /// Window length of the logic under test.
    pub m: u32,
    /// Node budget handed to every theoremhood check.
    pub node_budget: u64,
    /// Cap on how many substitutions the stream may try; the stream is
    /// size-ordered, so small witnesses are always found first.
    pub max_candidates: usize,
}

impl Default for SearchBudget {
    fn default() -> SearchBudget {
        SearchBudget {
            max_depth: 2,
            extra_letters: 1,
            m: 1,
            node_budget: DEFAULT_NODE_BUDGET,
            max_candidates: 5000,
        }
    }
}

impl SearchBudget {
    pub fn with_m(m: u32) -> SearchBudget {
        SearchBudget {
            m,
            ..SearchBudget::default()
        }
    }
}

/// Positive certificate attached to an `Admissible` verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    FrameValidity,
    NEliminationPattern { template: String },
    Derivable,
}

/// Everything a negative verdict has to show for itself: the substitution,
/// the premise instances that passed the theorem check, and a countermodel
/// for the conclusion instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonAdmissibilityWitness {
    pub substitution: Substitution,
    pub premise_instances: Vec<Formula>,
    pub conclusion_instance: Formula,
    pub countermodel: LassoWitness,
}

/// The alphabet and depth a returned `Unknown` was searched under.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchBounds {
    pub letters: Vec<String>,
    pub max_depth: u32,
    pub m: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdmissibilityVerdict {
    Admissible(Certificate),
    NotAdmissible(Box<NonAdmissibilityWitness>),
    Unknown(SearchBounds),
}

impl AdmissibilityVerdict {
    pub fn to_json(&self) -> Value {
        match self {
            AdmissibilityVerdict::Admissible(cert) => {
                let certificate = match cert {
                    Certificate::FrameValidity => json!({ "type": "frame_validity" }),
                    Certificate::NEliminationPattern { template } => {
                        json!({ "type": "n_elimination", "template": template })
                    }
                    Certificate::Derivable => json!({ "type": "derivable" }),
                };
                json!({ "verdict": "admissible", "certificate": certificate })
            }
            AdmissibilityVerdict::NotAdmissible(w) => {
                let mut map = serde_json::Map::new();
                for (k, v) in w.substitution.iter() {
                    map.insert(k.clone(), Value::String(v.to_string()));
                }
                json!({
                    "verdict": "not_admissible",
                    "witness": Value::Object(map),
                    "premise_instances":
                        w.premise_instances.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
                    "conclusion_instance": w.conclusion_instance.to_string(),
                    "countermodel": w.countermodel.to_json(),
                })
            }
            AdmissibilityVerdict::Unknown(b) => json!({
                "verdict": "unknown",
                "bounds": { "letters": b.letters, "max_depth": b.max_depth, "m": b.m },
            }),
        }
    }
}

// --- substitution enumeration ------------------------------------------------

/// All core formulas over `letters` plus the constants, with operator depth
/// at most `max_depth`, ordered by size and then structurally. Atoms sort
/// before `true` before `false`, so the stream tries letters first.
pub fn formula_stream(letters: &[String], max_depth: u32) -> Vec<Formula> {
    let mut by_size: Vec<Vec<(Formula, u32)>> = vec![Vec::new()];
    let mut leaves: Vec<Formula> = letters.iter().map(|l| Formula::Atom(l.clone())).collect();
    leaves.push(Formula::Top);
    leaves.push(Formula::Bottom);
    by_size.push(leaves.into_iter().map(|f| (f, 0)).collect());

    let max_size = (1usize << (max_depth + 1)) - 1;
    for size in 2..=max_size {
        let mut layer: Vec<(Formula, u32)> = Vec::new();
        for (g, d) in &by_size[size - 1] {
            if d + 1 <= max_depth {
                layer.push((Formula::not(g.clone()), d + 1));
                layer.push((Formula::next(g.clone()), d + 1));
            }
        }
        for left_size in 1..size - 1 {
            let right_size = size - 1 - left_size;
            for li in 0..by_size[left_size].len() {
                for ri in 0..by_size[right_size].len() {
                    let (l, dl) = &by_size[left_size][li];
                    let (r, dr) = &by_size[right_size][ri];
                    let d = (*dl).max(*dr) + 1;
                    if d <= max_depth {
                        let (l, r) = (l.clone(), r.clone());
                        layer.push((Formula::and(l.clone(), r.clone()), d));
                        layer.push((Formula::or(l.clone(), r.clone()), d));
                        layer.push((Formula::implies(l.clone(), r.clone()), d));
                        layer.push((Formula::since(l, r), d));
                    }
                }
            }
        }
        by_size.push(layer);
    }

    let mut out = Vec::new();
    for layer in &mut by_size {
        layer.sort_by(|(a, _), (b, _)| a.cmp(b));
        out.extend(layer.iter().map(|(f, _)| f.clone()));
    }
    out
}

/// Size-ordered stream of substitutions for `vars`, drawing candidate
/// formulas from `pool`. Tuples are ordered by total size, then by the
/// size composition, then pointwise by the pool order.
struct SubstitutionStream<'a> {
    vars: &'a [String],
    pool: &'a [Formula],
    by_size: Vec<Vec<usize>>,
    tuples: Vec<Vec<usize>>,
    at: usize,
    total: usize,
    max_total: usize,
    exhausted: bool,
}

impl<'a> SubstitutionStream<'a> {
    fn new(vars: &'a [String], pool: &'a [Formula]) -> SubstitutionStream<'a> {
        let max_size = pool.iter().map(Formula::size).max().unwrap_or(0);
        let mut by_size: Vec<Vec<usize>> = vec![Vec::new(); max_size + 1];
        for (i, f) in pool.iter().enumerate() {
            by_size[f.size()].push(i);
        }
        SubstitutionStream {
            vars,
            pool,
            by_size,
            tuples: Vec::new(),
            at: 0,
            total: vars.len().saturating_sub(1),
            max_total: max_size * vars.len(),
            exhausted: false,
        }
    }

    fn refill(&mut self) {
        self.tuples.clear();
        self.at = 0;
        while self.tuples.is_empty() && !self.exhausted {
            self.total += 1;
            if self.vars.is_empty() {
                // A variable-free rule has exactly one candidate: the empty
                // substitution.
                if self.total == 1 {
                    self.tuples.push(Vec::new());
                } else {
                    self.exhausted = true;
                }
                return;
            }
            if self.total > self.max_total {
                self.exhausted = true;
                return;
            }
            let mut current = Vec::new();
            self.compose(0, self.total, &mut current);
        }
    }

    fn compose(&mut self, slot: usize, remaining: usize, current: &mut Vec<usize>) {
        if slot == self.vars.len() - 1 {
            if remaining < self.by_size.len() {
                let indices = self.by_size[remaining].clone();
                for idx in indices {
                    current.push(idx);
                    self.tuples.push(current.clone());
                    current.pop();
                }
            }
            return;
        }
        let slots_after = self.vars.len() - slot - 1;
        for size in 1..=remaining.saturating_sub(slots_after) {
            if size >= self.by_size.len() || self.by_size[size].is_empty() {
                continue;
            }
            let indices = self.by_size[size].clone();
            for idx in indices {
                current.push(idx);
                self.compose(slot + 1, remaining - size, current);
                current.pop();
            }
        }
    }
}

impl<'a> Iterator for SubstitutionStream<'a> {
    type Item = Substitution;

    fn next(&mut self) -> Option<Substitution> {
        while self.at >= self.tuples.len() {
            if self.exhausted {
                return None;
            }
            self.refill();
        }
        let tuple = &self.tuples[self.at];
        self.at += 1;
        Some(
            self.vars
                .iter()
                .cloned()
                .zip(tuple.iter().map(|i| self.pool[*i].clone()))
                .collect(),
        )
    }
}

fn fresh_letters(used: &BTreeSet<String>, count: u32) -> Vec<String> {
    let preferred = ["p", "q", "r"].into_iter().map(str::to_string);
    let alphabet = (b'a'..=b'z').map(|c| (c as char).to_string());
    let numbered = (1u32..).map(|i| format!("p{i}"));
    let mut out = Vec::new();
    for cand in preferred.chain(alphabet).chain(numbered) {
        if out.len() == count as usize {
            break;
        }
        if !used.contains(&cand) && !out.contains(&cand) {
            out.push(cand);
        }
    }
    out
}

fn search_alphabet(rule: &Rule, budget: &SearchBudget) -> Vec<String> {
    let used = rule.variables();
    let mut letters: Vec<String> = used.iter().cloned().collect();
    letters.extend(fresh_letters(&used, budget.extra_letters));
    letters.sort();
    letters
}

// --- operations ---------------------------------------------------------------

/// Enumerates substitutions in the deterministic size-ordered stream and
/// returns the first one whose premise instances are all theorems while
/// the conclusion instance is not. `None` means no witness within the
/// budget; that is not a proof of admissibility.
pub fn find_non_admissibility_witness(
    rule: &Rule,
    budget: &SearchBudget,
) -> Result<Option<NonAdmissibilityWitness>> {
    let rule = rule.expand_derived();
    let vars: Vec<String> = rule.variables().into_iter().collect();
    let letters = search_alphabet(&rule, budget);
    let pool = formula_stream(&letters, budget.max_depth);
    let stream = SubstitutionStream::new(&vars, &pool);

    'candidates: for subst in stream.take(budget.max_candidates) {
        let mut premise_instances = Vec::new();
        for premise in rule.premises() {
            let instance = premise.apply_substitution(&subst);
            match is_theorem_budgeted(&instance, budget.m, budget.node_budget)? {
                Theoremhood::Theorem => premise_instances.push(instance),
                Theoremhood::NotTheorem(_) => continue 'candidates,
            }
        }
        let conclusion_instance = rule.conclusion().apply_substitution(&subst);
        if let Theoremhood::NotTheorem(countermodel) =
            is_theorem_budgeted(&conclusion_instance, budget.m, budget.node_budget)?
        {
            return Ok(Some(NonAdmissibilityWitness {
                substitution: subst,
                premise_instances,
                conclusion_instance,
                countermodel,
            }));
        }
    }
    Ok(None)
}

/// Same stream as the witness search, succeeding as soon as a substitution
/// turns every premise into a theorem. `None` within the budget leaves the
/// premises possibly passive (never unifiable).
pub fn premises_unifiable(rule: &Rule, budget: &SearchBudget) -> Result<Option<Substitution>> {
    let rule = rule.expand_derived();
    let vars: Vec<String> = rule.variables().into_iter().collect();
    let letters = search_alphabet(&rule, budget);
    let pool = formula_stream(&letters, budget.max_depth);
    let stream = SubstitutionStream::new(&vars, &pool);

    'candidates: for subst in stream.take(budget.max_candidates) {
        for premise in rule.premises() {
            let instance = premise.apply_substitution(&subst);
            if !is_theorem_budgeted(&instance, budget.m, budget.node_budget)?.holds() {
                continue 'candidates;
            }
        }
        return Ok(Some(subst));
    }
    Ok(None)
}

struct MatchState {
    premise_slots: Vec<(Formula, String)>,
    since_slots: Vec<((Formula, Formula), String)>,
}

impl MatchState {
    fn p_slot(&mut self, arg: &Formula) -> Formula {
        for (seen, name) in &self.premise_slots {
            if seen == arg {
                return Formula::Atom(name.clone());
            }
        }
        let name = format!("p{}", self.premise_slots.len() + 1);
        self.premise_slots.push((arg.clone(), name.clone()));
        Formula::Atom(name)
    }

    fn q_slot(&mut self, left: &Formula, right: &Formula) -> Formula {
        for (seen, name) in &self.since_slots {
            if seen.0 == *left && seen.1 == *right {
                return Formula::Atom(name.clone());
            }
        }
        let name = format!("q{}", self.since_slots.len() + 1);
        self.since_slots
            .push(((left.clone(), right.clone()), name.clone()));
        Formula::Atom(name)
    }
}

fn match_slots(p: &Formula, c: &Formula, st: &mut MatchState) -> Option<Formula> {
    match (p, c) {
        (Formula::Not(a), Formula::Not(b)) => Some(Formula::not(match_slots(a, b, st)?)),
        (Formula::And(a1, a2), Formula::And(b1, b2)) => Some(Formula::and(
            match_slots(a1, b1, st)?,
            match_slots(a2, b2, st)?,
        )),
        (Formula::Or(a1, a2), Formula::Or(b1, b2)) => Some(Formula::or(
            match_slots(a1, b1, st)?,
            match_slots(a2, b2, st)?,
        )),
        (Formula::Implies(a1, a2), Formula::Implies(b1, b2)) => Some(Formula::implies(
            match_slots(a1, b1, st)?,
            match_slots(a2, b2, st)?,
        )),
        (Formula::Since(a1, a2), Formula::Since(b1, b2)) => {
            if let (Formula::Next(u), Formula::Next(v)) = (a1.as_ref(), a2.as_ref()) {
                if u.as_ref() == b1.as_ref() && v.as_ref() == b2.as_ref() {
                    return Some(st.q_slot(b1, b2));
                }
            }
            None
        }
        (Formula::Next(a), _) if a.as_ref() == c => Some(st.p_slot(c)),
        _ => None,
    }
}

/// Matches the rule against the admissible family "drop one `N` from every
/// temporal slot of a Boolean template": premise slots carry `N phi` or
/// `(N phi) S (N psi)`, the conclusion carries `phi` or `phi S psi` in the
/// same template.
pub fn match_n_elimination(rule: &Rule) -> Option<Certificate> {
    let rule = to_single_premise(&rule.expand_derived());
    let mut st = MatchState {
        premise_slots: Vec::new(),
        since_slots: Vec::new(),
    };
    let template = match_slots(&rule.premises()[0], rule.conclusion(), &mut st)?;
    Some(Certificate::NEliminationPattern {
        template: template.to_string(),
    })
}

/// The certificate pipeline: frame validity, then the Next-elimination
/// pattern, then the bounded counterexample search, and an explicit
/// `Unknown` when all three come back empty. When the frame-validity check
/// exceeds its budget, theoremhood of the premise-to-conclusion
/// implication is tried as a weaker positive certificate.
pub fn admissible_status(rule: &Rule, budget: &SearchBudget) -> Result<AdmissibilityVerdict> {
    match frame_valid_rule_budgeted(rule, budget.m, budget.node_budget) {
        Ok(None) => return Ok(AdmissibilityVerdict::Admissible(Certificate::FrameValidity)),
        Ok(Some(_)) => {}
        Err(Error::CapacityExceeded { .. }) => {
            let single = to_single_premise(rule);
            let implication =
                Formula::implies(single.premises()[0].clone(), single.conclusion().clone());
            if let Ok(Theoremhood::Theorem) =
                is_theorem_budgeted(&implication, budget.m, budget.node_budget)
            {
                return Ok(AdmissibilityVerdict::Admissible(Certificate::Derivable));
            }
        }
        Err(e) => return Err(e),
    }

    if let Some(cert) = match_n_elimination(rule) {
        return Ok(AdmissibilityVerdict::Admissible(cert));
    }

    if let Some(witness) = find_non_admissibility_witness(rule, budget)? {
        return Ok(AdmissibilityVerdict::NotAdmissible(Box::new(witness)));
    }

    Ok(AdmissibilityVerdict::Unknown(SearchBounds {
        letters: search_alphabet(&rule.expand_derived(), budget),
        max_depth: budget.max_depth,
        m: budget.m,
    }))
}

/// The reduction route: compile to reduced normal form, re-render as a
/// rule and run the pipeline on that. Definite verdicts from the two
/// routes must never contradict each other; tests enforce it.
pub fn admissible_status_via_rnf(
    rule: &Rule,
    budget: &SearchBudget,
) -> Result<AdmissibilityVerdict> {
    let nf = crate::normal_form::rnf_transform(rule)?;
    let reduced = crate::normal_form::rnf_to_rule(&nf);
    admissible_status(&reduced, budget)
}

/// True when two verdicts do not give contradicting definite answers.
pub fn verdicts_consistent(a: &AdmissibilityVerdict, b: &AdmissibilityVerdict) -> bool {
    use AdmissibilityVerdict::*;
    !matches!(
        (a, b),
        (Admissible(_), NotAdmissible(_)) | (NotAdmissible(_), Admissible(_))
    )
}
