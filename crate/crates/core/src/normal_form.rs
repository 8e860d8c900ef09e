//! Compilation of rules into reduced normal form.
//!
//! A rule in reduced normal form is `eps / x1` where `x1` is the first
//! variable and `eps` is a disjunction of total state descriptions: each
//! disjunct fixes a sign for every atom `x_i`, `N x_i` and `x_i S x_k`
//! (`i != k`) over the variable set.
//!
//! The construction: conjoin the premises, introduce one fresh variable per
//! distinct non-atomic argument of a temporal operator (plus a fresh
//! conclusion variable when the conclusion is not an atom, and an alias
//! variable when both arguments of a `Since` land on the same variable),
//! conjoin the definitional equivalences with the premise, and expand the
//! result into the set of total sign assignments that satisfy it. The
//! compiled rule is refutable over the frame exactly when the original rule
//! is; that equivalence is what the decision module and the test suite
//! exercise.

use crate::error::{Error, Result};
use crate::syntax::{Formula, Rule};
use serde_json::{json, Value};
use std::collections::{BTreeSet, HashMap};

/// Default cap on the number of disjuncts `rnf_transform` may emit.
pub const DEFAULT_DISJUNCT_BUDGET: u64 = 1 << 20;

/// One total state description: the claimed truth values of every `x_i`
/// (`t0`), every `N x_i` (`t1`) and every `x_i S x_k` (`ts`), bit-packed by
/// variable index. Bit set means the positive literal (the formula holds).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RnfDisjunct {
    pub(crate) t0: u64,
    pub(crate) t1: u64,
    pub(crate) ts: u128,
}

/// Index of the ordered pair `(i, k)`, `i != k`, in the `ts` bit block.
pub(crate) fn pair_index(n: usize, i: usize, k: usize) -> usize {
    debug_assert!(i != k && i < n && k < n);
    i * (n - 1) + if k < i { k } else { k - 1 }
}

pub(crate) fn bit(mask: u64, i: usize) -> bool {
    mask >> i & 1 == 1
}

impl RnfDisjunct {
    /// Claimed value of `x_i`.
    pub fn value(&self, i: usize) -> bool {
        bit(self.t0, i)
    }

    /// Claimed value of `N x_i`.
    pub fn next_value(&self, i: usize) -> bool {
        bit(self.t1, i)
    }

    /// Claimed value of `x_i S x_k`.
    pub fn since_value(&self, n: usize, i: usize, k: usize) -> bool {
        self.ts >> pair_index(n, i, k) & 1 == 1
    }
}

/// A rule in reduced normal form. The conclusion is always the first
/// variable; the disjunct list is duplicate-free and sorted by sign
/// vectors (positive literals first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RnfRule {
    variables: Vec<String>,
    disjuncts: Vec<RnfDisjunct>,
}

impl RnfRule {
    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn conclusion(&self) -> &str {
        &self.variables[0]
    }

    pub fn disjuncts(&self) -> &[RnfDisjunct] {
        &self.disjuncts
    }

    pub fn to_json(&self) -> Value {
        let n = self.variables.len();
        let disjuncts: Vec<Value> = self
            .disjuncts
            .iter()
            .map(|d| {
                let t0: Vec<bool> = (0..n).map(|i| d.value(i)).collect();
                let t1: Vec<bool> = (0..n).map(|i| d.next_value(i)).collect();
                let ts: Vec<Vec<Value>> = (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|k| {
                                if i == k {
                                    Value::Null
                                } else {
                                    Value::Bool(d.since_value(n, i, k))
                                }
                            })
                            .collect()
                    })
                    .collect();
                json!({ "t0": t0, "t1": t1, "tS": ts })
            })
            .collect();
        json!({
            "variables": self.variables,
            "conclusion": self.variables[0],
            "disjuncts": disjuncts,
        })
    }
}

/// Replaces the premise list by its left-folded conjunction.
pub fn to_single_premise(rule: &Rule) -> Rule {
    let mut premises = rule.premises().iter();
    let first = premises
        .next()
        .expect("rules have at least one premise")
        .clone();
    let conj = premises.fold(first, |acc, p| Formula::and(acc, p.clone()));
    Rule::new(vec![conj], rule.conclusion().clone())
}

/// A formula over the state-description atoms of a fixed variable set:
/// plain variables, `N`-of-variable and variable-`S`-variable leaves under
/// Boolean structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Flat {
    Var(usize),
    NextVar(usize),
    SinceVar(usize, usize),
    Top,
    Bottom,
    Not(Box<Flat>),
    And(Box<Flat>, Box<Flat>),
    Or(Box<Flat>, Box<Flat>),
    Implies(Box<Flat>, Box<Flat>),
}

impl Flat {
    /// True when evaluation needs no `N` or `S` atoms.
    pub(crate) fn is_row_local(&self) -> bool {
        match self {
            Flat::Var(_) | Flat::Top | Flat::Bottom => true,
            Flat::NextVar(_) | Flat::SinceVar(_, _) => false,
            Flat::Not(f) => f.is_row_local(),
            Flat::And(l, r) | Flat::Or(l, r) | Flat::Implies(l, r) => {
                l.is_row_local() && r.is_row_local()
            }
        }
    }
}

/// Evaluates a flat formula on an explicit state description.
pub(crate) fn eval_flat_desc(flat: &Flat, n: usize, t0: u64, t1: u64, ts: u128) -> bool {
    match flat {
        Flat::Var(i) => bit(t0, *i),
        Flat::NextVar(i) => bit(t1, *i),
        Flat::SinceVar(i, k) => ts >> pair_index(n, *i, *k) & 1 == 1,
        Flat::Top => true,
        Flat::Bottom => false,
        Flat::Not(f) => !eval_flat_desc(f, n, t0, t1, ts),
        Flat::And(l, r) => eval_flat_desc(l, n, t0, t1, ts) && eval_flat_desc(r, n, t0, t1, ts),
        Flat::Or(l, r) => eval_flat_desc(l, n, t0, t1, ts) || eval_flat_desc(r, n, t0, t1, ts),
        Flat::Implies(l, r) => {
            !eval_flat_desc(l, n, t0, t1, ts) || eval_flat_desc(r, n, t0, t1, ts)
        }
    }
}

/// The renamed form of a rule or formula: the final variable list, the
/// definitional equivalences `t0[i] <-> body` in dependency order, the
/// constraints asserted at every position, and the start condition the
/// decision module checks at position 0.
#[derive(Debug)]
pub(crate) struct Compiled {
    pub vars: Vec<String>,
    /// `defs[k] = (i, body)`: the value of variable `i` equals `body`.
    /// Bodies only mention `t0` bits of variables defined earlier (or free
    /// ones), so values can be derived in order.
    pub defs: Vec<(usize, Flat)>,
    /// Constraints required at every position (the asserted premise).
    pub asserts: Vec<Flat>,
    /// Condition singling out position 0 (negated conclusion for rules, the
    /// formula itself for satisfiability).
    pub start: Flat,
}

impl Compiled {
    pub fn n(&self) -> usize {
        self.vars.len()
    }

    /// `t0` indices not pinned by a definition.
    pub fn free_t0(&self) -> Vec<usize> {
        let pinned: BTreeSet<usize> = self.defs.iter().map(|(i, _)| *i).collect();
        (0..self.vars.len())
            .filter(|i| !pinned.contains(i))
            .collect()
    }
}

struct Flattener {
    vars: Vec<String>,
    used: BTreeSet<String>,
    defs: Vec<(usize, Flat)>,
    memo: HashMap<Formula, usize>,
    alias_memo: HashMap<usize, usize>,
    fresh_counter: usize,
}

impl Flattener {
    fn new(vars: Vec<String>) -> Flattener {
        let used = vars.iter().cloned().collect();
        Flattener {
            vars,
            used,
            defs: Vec::new(),
            memo: HashMap::new(),
            alias_memo: HashMap::new(),
            fresh_counter: 0,
        }
    }

    fn fresh(&mut self) -> usize {
        let name = loop {
            self.fresh_counter += 1;
            let candidate = format!("s{}", self.fresh_counter);
            if !self.used.contains(&candidate) {
                break candidate;
            }
        };
        self.used.insert(name.clone());
        self.vars.push(name);
        self.vars.len() - 1
    }

    fn atom_index(&self, name: &str) -> usize {
        self.vars
            .iter()
            .position(|v| v == name)
            .expect("rule atoms are seeded into the variable list")
    }

    fn flatten(&mut self, f: &Formula) -> Flat {
        match f {
            Formula::Atom(a) => Flat::Var(self.atom_index(a)),
            Formula::Top => Flat::Top,
            Formula::Bottom => Flat::Bottom,
            Formula::Not(g) => Flat::Not(Box::new(self.flatten(g))),
            Formula::And(l, r) => Flat::And(Box::new(self.flatten(l)), Box::new(self.flatten(r))),
            Formula::Or(l, r) => Flat::Or(Box::new(self.flatten(l)), Box::new(self.flatten(r))),
            Formula::Implies(l, r) => {
                Flat::Implies(Box::new(self.flatten(l)), Box::new(self.flatten(r)))
            }
            Formula::Next(g) => Flat::NextVar(self.var_of(g)),
            Formula::Since(l, r) => {
                let i = self.var_of(l);
                let mut k = self.var_of(r);
                if i == k {
                    // The description atoms only exist for i != k; route the
                    // right argument through an alias variable.
                    k = self.alias_of(k);
                }
                Flat::SinceVar(i, k)
            }
            _ => unreachable!("flattening runs on expanded formulas"),
        }
    }

    /// Variable standing for a temporal-operator argument: the atom itself
    /// when the argument is an atom, otherwise a fresh defined variable
    /// (one per distinct subformula).
    fn var_of(&mut self, f: &Formula) -> usize {
        if let Formula::Atom(a) = f {
            return self.atom_index(a);
        }
        if let Some(i) = self.memo.get(f) {
            return *i;
        }
        let body = self.flatten(f);
        let i = self.fresh();
        self.defs.push((i, body));
        self.memo.insert(f.clone(), i);
        i
    }

    fn alias_of(&mut self, i: usize) -> usize {
        if let Some(j) = self.alias_memo.get(&i) {
            return *j;
        }
        let j = self.fresh();
        self.defs.push((j, Flat::Var(i)));
        self.alias_memo.insert(i, j);
        j
    }
}

/// Renames a rule: conclusion variable first, then the rule's atoms in
/// sorted order, then fresh variables in creation order.
pub(crate) fn compile_rule(rule: &Rule) -> Compiled {
    let rule = to_single_premise(&rule.expand_derived());
    let atoms = rule.variables();
    let conclusion_atom = match rule.conclusion() {
        Formula::Atom(a) => Some(a.clone()),
        _ => None,
    };

    let mut vars: Vec<String> = Vec::with_capacity(atoms.len() + 1);
    let fresh_conclusion = match &conclusion_atom {
        Some(a) => {
            vars.push(a.clone());
            vars.extend(atoms.iter().filter(|x| *x != a).cloned());
            false
        }
        None => {
            let mut name = "x1".to_string();
            let mut counter = 1;
            while atoms.contains(&name) {
                counter += 1;
                name = format!("x1_{counter}");
            }
            vars.push(name);
            vars.extend(atoms.iter().cloned());
            true
        }
    };

    let mut fl = Flattener::new(vars);
    let premise = fl.flatten(&rule.premises()[0]);
    if fresh_conclusion {
        let body = fl.flatten(rule.conclusion());
        fl.defs.push((0, body));
    }
    Compiled {
        vars: fl.vars,
        defs: fl.defs,
        asserts: vec![premise],
        start: Flat::Not(Box::new(Flat::Var(0))),
    }
}

/// Renames a formula for the satisfiability search: atoms in sorted order,
/// then fresh variables; nothing is asserted globally, the formula itself
/// is the start condition.
pub(crate) fn compile_formula(f: &Formula) -> Compiled {
    let f = f.expand_derived();
    let vars: Vec<String> = f.atoms().into_iter().collect();
    let mut fl = Flattener::new(vars);
    let root = fl.flatten(&f);
    Compiled {
        vars: fl.vars,
        defs: fl.defs,
        asserts: Vec::new(),
        start: root,
    }
}

/// Compiles a rule to reduced normal form with the default disjunct budget.
pub fn rnf_transform(rule: &Rule) -> Result<RnfRule> {
    rnf_transform_budgeted(rule, DEFAULT_DISJUNCT_BUDGET)
}

/// Compiles a rule to reduced normal form, materialising every satisfying
/// total sign assignment. Fails with `CapacityExceeded` when the assignment
/// space outgrows the budget.
pub fn rnf_transform_budgeted(rule: &Rule, budget: u64) -> Result<RnfRule> {
    let compiled = compile_rule(rule);
    let n = compiled.n();
    let free_t0 = compiled.free_t0();
    let ts_bits = n * (n - 1);
    let free_bits = free_t0.len() + n + ts_bits;

    let theoretical: u128 = if free_bits >= 128 {
        u128::MAX
    } else {
        1u128 << free_bits
    };
    if free_bits >= 63 || (1u64 << free_bits) > budget {
        return Err(Error::CapacityExceeded {
            what: format!("reduced normal form of `{rule}`"),
            needed: theoretical,
            budget: budget as u128,
        });
    }

    let mut disjuncts = Vec::new();
    'assignments: for raw in 0u64..1u64 << free_bits {
        // Unpack free bits: free t0 entries, then t1, then ts.
        let mut t0 = 0u64;
        for (pos, i) in free_t0.iter().enumerate() {
            if bit(raw, pos) {
                t0 |= 1 << i;
            }
        }
        let t1 = raw >> free_t0.len() & ((1u64 << n) - 1);
        let ts = if ts_bits == 0 {
            0
        } else {
            (raw >> (free_t0.len() + n)) as u128 & ((1u128 << ts_bits) - 1)
        };

        for (i, body) in &compiled.defs {
            if eval_flat_desc(body, n, t0, t1, ts) {
                t0 |= 1 << i;
            }
        }
        for a in &compiled.asserts {
            if !eval_flat_desc(a, n, t0, t1, ts) {
                continue 'assignments;
            }
        }
        disjuncts.push(RnfDisjunct { t0, t1, ts });
    }

    let max_count: u128 = if 2 * n + ts_bits >= 128 {
        u128::MAX
    } else {
        1u128 << (2 * n + ts_bits)
    };
    assert!(
        disjuncts.len() as u128 <= max_count,
        "disjunct count exceeds the state-description space"
    );

    // Sort by exponent vectors: positive literals order before negative.
    disjuncts.sort_by_key(|d| {
        let full = (1u64 << n) - 1;
        let ts_full = if ts_bits == 0 { 0 } else { (1u128 << ts_bits) - 1 };
        (
            reverse_low_bits(!d.t0 & full, n),
            reverse_low_bits(!d.t1 & full, n),
            reverse_low_bits_u128(!d.ts & ts_full, ts_bits),
        )
    });

    Ok(RnfRule {
        variables: compiled.vars,
        disjuncts,
    })
}

// Lexicographic order over sign sequences reads the lowest variable index
// first, so mirror the bits before comparing numerically.
fn reverse_low_bits(mask: u64, width: usize) -> u64 {
    let mut out = 0;
    for i in 0..width {
        if bit(mask, i) {
            out |= 1 << (width - 1 - i);
        }
    }
    out
}

fn reverse_low_bits_u128(mask: u128, width: usize) -> u128 {
    let mut out = 0;
    for i in 0..width {
        if mask >> i & 1 == 1 {
            out |= 1 << (width - 1 - i);
        }
    }
    out
}

/// Renders a reduced normal form back as an ordinary rule; the empty
/// disjunction is `false`.
pub fn rnf_to_rule(nf: &RnfRule) -> Rule {
    let n = nf.variables.len();
    let var = |i: usize| Formula::Atom(nf.variables[i].clone());
    let lit = |f: Formula, positive: bool| if positive { f } else { Formula::not(f) };

    let mut disjunction: Option<Formula> = None;
    for d in &nf.disjuncts {
        let mut literals = Vec::new();
        for i in 0..n {
            literals.push(lit(var(i), d.value(i)));
        }
        for i in 0..n {
            literals.push(lit(Formula::next(var(i)), d.next_value(i)));
        }
        for i in 0..n {
            for k in 0..n {
                if i != k {
                    literals.push(lit(Formula::since(var(i), var(k)), d.since_value(n, i, k)));
                }
            }
        }
        let mut it = literals.into_iter();
        let first = it.next().expect("a disjunct always has t0 literals");
        let conj = it.fold(first, Formula::and);
        disjunction = Some(match disjunction {
            None => conj,
            Some(acc) => Formula::or(acc, conj),
        });
    }
    Rule::new(
        vec![disjunction.unwrap_or(Formula::Bottom)],
        Formula::Atom(nf.variables[0].clone()),
    )
}

/// Evaluates the disjunction of a reduced normal form on an explicit state
/// description; used by the decision module for membership tests.
pub(crate) fn rnf_matches(nf: &RnfRule, t0: u64, t1: u64, ts: u128) -> bool {
    nf.disjuncts
        .iter()
        .any(|d| d.t0 == t0 && d.t1 == t1 && d.ts == ts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_rule};

    #[test]
    fn single_premise_folds_conjunction() {
        let r = parse_rule("a, b / c").unwrap();
        assert_eq!(to_single_premise(&r), parse_rule("a & b / c").unwrap());
        let r = parse_rule("a / c").unwrap();
        assert_eq!(to_single_premise(&r), r);
        let r = parse_rule("a, b, c / d").unwrap();
        assert_eq!(to_single_premise(&r), parse_rule("(a & b) & c / d").unwrap());
    }

    #[test]
    fn next_elimination_rule_has_two_disjuncts() {
        let nf = rnf_transform(&parse_rule("N x / x").unwrap()).unwrap();
        assert_eq!(nf.variables(), ["x"]);
        assert_eq!(nf.conclusion(), "x");
        assert_eq!(nf.disjuncts().len(), 2);
        // Sorted positive-first: {x, N x} then {~x, N x}; N x everywhere.
        assert!(nf.disjuncts()[0].value(0));
        assert!(!nf.disjuncts()[1].value(0));
        assert!(nf.disjuncts().iter().all(|d| d.next_value(0)));
    }

    #[test]
    fn identity_rule_fixes_the_variable_true() {
        let nf = rnf_transform(&parse_rule("x / x").unwrap()).unwrap();
        assert_eq!(nf.disjuncts().len(), 2);
        assert!(nf.disjuncts().iter().all(|d| d.value(0)));
        let nexts: Vec<bool> = nf.disjuncts().iter().map(|d| d.next_value(0)).collect();
        assert_eq!(nexts, vec![true, false]);
    }

    #[test]
    fn contradiction_premise_leaves_no_disjuncts() {
        let nf = rnf_transform(&parse_rule("x & ~x / x").unwrap()).unwrap();
        assert!(nf.disjuncts().is_empty());
        assert_eq!(rnf_to_rule(&nf), parse_rule("false / x").unwrap());
    }

    #[test]
    fn nonatomic_conclusion_gets_a_fresh_first_variable() {
        let nf = rnf_transform(&parse_rule("x / N x").unwrap()).unwrap();
        assert_eq!(nf.variables(), ["x1", "x"]);
        // x asserted, x1 pinned to N x.
        for d in nf.disjuncts() {
            assert!(d.value(1));
            assert_eq!(d.value(0), d.next_value(1));
        }
    }

    #[test]
    fn since_of_equal_arguments_goes_through_an_alias() {
        let nf = rnf_transform(&parse_rule("p S p / p").unwrap()).unwrap();
        assert_eq!(nf.variables(), ["p", "s1"]);
        let n = 2;
        for d in nf.disjuncts() {
            // The alias mirrors p, and the asserted premise is p S alias.
            assert_eq!(d.value(0), d.value(1));
            assert!(d.since_value(n, 0, 1));
        }
    }

    #[test]
    fn all_disjuncts_are_total_and_bounded() {
        let r = parse_rule("N x1 -> N x2 / x1 -> x2").unwrap();
        let nf = rnf_transform(&r).unwrap();
        let n = nf.variables().len();
        assert_eq!(n, 3);
        let limit = 1u128 << (2 * n + n * (n - 1));
        assert!(!nf.disjuncts().is_empty());
        assert!((nf.disjuncts().len() as u128) < limit);
        let mut seen = std::collections::HashSet::new();
        for d in nf.disjuncts() {
            assert!(seen.insert(*d), "duplicate disjunct");
        }
    }

    #[test]
    fn budget_is_enforced_with_theoretical_count() {
        let r = parse_rule("(N x1) S (N x2) / x1 S x2").unwrap();
        match rnf_transform(&r) {
            Err(crate::Error::CapacityExceeded { needed, budget, .. }) => {
                assert!(needed > budget);
            }
            other => panic!("expected CapacityExceeded, got {other:?}"),
        }
    }

    #[test]
    fn rnf_to_rule_round_trips_through_text() {
        for text in ["N x / x", "x / x", "x & ~x / x", "x / N x"] {
            let nf = rnf_transform(&parse_rule(text).unwrap()).unwrap();
            let back = rnf_to_rule(&nf);
            let reparsed = parse_rule(&back.to_string()).unwrap();
            assert_eq!(reparsed, back, "{text}");
        }
    }

    #[test]
    fn single_all_positive_disjunct_renders_conjunction() {
        let nf = RnfRule {
            variables: vec!["x1".into()],
            disjuncts: vec![RnfDisjunct { t0: 1, t1: 1, ts: 0 }],
        };
        assert_eq!(rnf_to_rule(&nf), parse_rule("x1 & N x1 / x1").unwrap());
    }

    #[test]
    fn json_shape_has_null_diagonal() {
        let nf = rnf_transform(&parse_rule("x S y / x").unwrap()).unwrap();
        let v = nf.to_json();
        assert_eq!(v["conclusion"], "x");
        let ts = &v["disjuncts"][0]["tS"];
        assert!(ts[0][0].is_null());
        assert!(ts[0][1].is_boolean());
    }

    #[test]
    fn compile_formula_tracks_subformula_sharing() {
        let f = parse_formula("(q S p) & ~(q S p)").unwrap();
        let c = compile_formula(&f);
        // S gets atom arguments here, so no fresh variables at all.
        assert_eq!(c.vars, vec!["p".to_string(), "q".to_string()]);
        assert!(c.defs.is_empty());

        let f = parse_formula("N (p & q)").unwrap();
        let c = compile_formula(&f);
        assert_eq!(c.vars.len(), 3);
        assert_eq!(c.defs.len(), 1);
    }
}
