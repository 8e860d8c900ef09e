//! Decision procedures over the uniform-window frame: refutability of
//! reduced-normal-form rules, satisfiability and theoremhood of formulas,
//! and frame validity of rules, each with a lasso witness. A brute-force
//! model enumerator serves as an independent oracle.
//!
//! All procedures run on the same window graph. A node is a window of
//! `m + 1` consecutive valuation rows over the (renamed) variables; the
//! values of `N x_i` and `x_i S x_k` at the window's first position are
//! derived from the rows, so checking a node checks exactly the
//! constraints of one position. Node `u` steps to `v` when `v` is `u`
//! shifted by one (the `m` overlapping rows agree). Infinite paths through
//! the graph are precisely the models whose every position passes its
//! check, and a finite graph has an infinite path from a node exactly when
//! that node reaches a cycle; that path-to-cycle shape is what the emitted
//! lasso witnesses spell out.

use crate::error::{Error, Result};
use crate::normal_form::{self, bit, Flat, RnfRule};
use crate::semantics::{eval, rule_holds, Bound, PeriodicModel};
use crate::syntax::{Formula, Rule};
use std::collections::{BTreeSet, HashMap, HashSet};

/// Default cap on candidate window-graph nodes.
pub const DEFAULT_NODE_BUDGET: u64 = 1 << 22;

/// Whether a witness model demonstrates satisfaction or refutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessVerdict {
    Sat,
    Refuted,
}

/// A concrete ultimately periodic model returned by a decision procedure,
/// together with the position the verdict talks about. Every witness is
/// re-checked through the semantics module before it is handed out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LassoWitness {
    pub model: PeriodicModel,
    pub position: usize,
    pub verdict: WitnessVerdict,
}

impl LassoWitness {
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = self.model.to_json();
        let obj = v.as_object_mut().expect("model serialises to an object");
        obj.insert("position".into(), serde_json::json!(self.position));
        obj.insert(
            "verdict".into(),
            serde_json::json!(match self.verdict {
                WitnessVerdict::Sat => "sat",
                WitnessVerdict::Refuted => "refuted",
            }),
        );
        v
    }
}

/// Outcome of a theoremhood check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Theoremhood {
    Theorem,
    NotTheorem(LassoWitness),
}

impl Theoremhood {
    pub fn holds(&self) -> bool {
        matches!(self, Theoremhood::Theorem)
    }

    pub fn countermodel(&self) -> Option<&LassoWitness> {
        match self {
            Theoremhood::Theorem => None,
            Theoremhood::NotTheorem(w) => Some(w),
        }
    }
}

// --- window graph -----------------------------------------------------------

fn since_over_window(window: &[u64], i: usize, k: usize) -> bool {
    for row in window {
        if bit(*row, k) {
            return true;
        }
        if !bit(*row, i) {
            return false;
        }
    }
    false
}

/// `x_i S x_k` values at the first position of a window, computed by the
/// bounded-Since clause from the rows.
fn derived_since(window: &[u64], n: usize) -> u128 {
    let mut ts = 0u128;
    for i in 0..n {
        for k in 0..n {
            if i != k && since_over_window(window, i, k) {
                ts |= 1 << normal_form::pair_index(n, i, k);
            }
        }
    }
    ts
}

/// Evaluates a flat constraint on a window: plain variables read the first
/// row, `N` reads the second, `S` pairs scan the window.
fn eval_flat_window(flat: &Flat, window: &[u64]) -> bool {
    match flat {
        Flat::Var(i) => bit(window[0], *i),
        Flat::NextVar(i) => bit(window[1], *i),
        Flat::SinceVar(i, k) => since_over_window(window, *i, *k),
        Flat::Top => true,
        Flat::Bottom => false,
        Flat::Not(f) => !eval_flat_window(f, window),
        Flat::And(l, r) => eval_flat_window(l, window) && eval_flat_window(r, window),
        Flat::Or(l, r) => eval_flat_window(l, window) || eval_flat_window(r, window),
        Flat::Implies(l, r) => !eval_flat_window(l, window) || eval_flat_window(r, window),
    }
}

fn eval_flat_row(flat: &Flat, row: u64) -> bool {
    match flat {
        Flat::Var(i) => bit(row, *i),
        Flat::Top => true,
        Flat::Bottom => false,
        Flat::Not(f) => !eval_flat_row(f, row),
        Flat::And(l, r) => eval_flat_row(l, row) && eval_flat_row(r, row),
        Flat::Or(l, r) => eval_flat_row(l, row) || eval_flat_row(r, row),
        Flat::Implies(l, r) => !eval_flat_row(l, row) || eval_flat_row(r, row),
        Flat::NextVar(_) | Flat::SinceVar(_, _) => {
            unreachable!("row-local constraints have no temporal leaves")
        }
    }
}

struct Lasso {
    prefix_rows: Vec<u64>,
    loop_rows: Vec<u64>,
}

struct GraphOutcome {
    lasso: Option<Lasso>,
    node_count: usize,
}

/// Builds the window graph, finds the least live node satisfying the start
/// condition, and extracts a shortest-path, shortest-cycle lasso from it.
fn solve_window_graph(
    what: &str,
    rows: &[u64],
    m: usize,
    node_budget: u64,
    window_ok: impl Fn(&[u64]) -> bool,
    start_ok: impl Fn(&[u64]) -> bool,
) -> Result<GraphOutcome> {
    let width = m + 1;
    if rows.is_empty() {
        return Ok(GraphOutcome {
            lasso: None,
            node_count: 0,
        });
    }
    let candidates = (rows.len() as u128)
        .checked_pow(width as u32)
        .unwrap_or(u128::MAX);
    if candidates > node_budget as u128 {
        return Err(Error::CapacityExceeded {
            what: format!("window graph for {what}"),
            needed: candidates,
            budget: node_budget as u128,
        });
    }

    // Candidate windows in lexicographic order, earliest row most
    // significant; the node list stays sorted for deterministic picks.
    let mut nodes: Vec<Vec<u64>> = Vec::new();
    let mut odo = vec![0usize; width];
    'enumerate: loop {
        let window: Vec<u64> = odo.iter().map(|i| rows[*i]).collect();
        if window_ok(&window) {
            nodes.push(window);
        }
        for slot in (0..width).rev() {
            odo[slot] += 1;
            if odo[slot] < rows.len() {
                continue 'enumerate;
            }
            odo[slot] = 0;
        }
        break;
    }
    let node_count = nodes.len();
    if node_count == 0 {
        return Ok(GraphOutcome {
            lasso: None,
            node_count,
        });
    }

    // u -> v iff suffix(u) == prefix(v).
    let mut by_prefix: HashMap<&[u64], Vec<usize>> = HashMap::new();
    let mut by_suffix: HashMap<&[u64], Vec<usize>> = HashMap::new();
    for (id, w) in nodes.iter().enumerate() {
        by_prefix.entry(&w[..m]).or_default().push(id);
        by_suffix.entry(&w[1..]).or_default().push(id);
    }
    const NO_SUCCS: &[usize] = &[];
    let adj: Vec<&[usize]> = nodes
        .iter()
        .map(|w| {
            by_prefix
                .get(&w[1..])
                .map(|v| v.as_slice())
                .unwrap_or(NO_SUCCS)
        })
        .collect();

    // Liveness: a node is live when it can reach a cycle. Components come
    // out of Tarjan in postorder, so successors are already settled.
    let sccs = tarjan_sccs(node_count, &adj);
    let mut live = vec![false; node_count];
    let mut in_cycle = vec![false; node_count];
    for scc in &sccs {
        let cyclic = scc.len() > 1 || adj[scc[0]].contains(&scc[0]);
        if cyclic {
            for u in scc {
                in_cycle[*u] = true;
            }
        }
        if cyclic || scc.iter().any(|u| adj[*u].iter().any(|v| live[*v])) {
            for u in scc {
                live[*u] = true;
            }
        }
    }

    let Some(start) = (0..node_count).find(|id| live[*id] && start_ok(&nodes[*id])) else {
        return Ok(GraphOutcome {
            lasso: None,
            node_count,
        });
    };

    // Shortest path from the start to a node on a cycle, least id on ties.
    let (dist, parent) = bfs(start, &adj);
    let target = (0..node_count)
        .filter(|id| in_cycle[*id] && dist[*id].is_some())
        .min_by_key(|id| (dist[*id].unwrap(), *id))
        .expect("a live start reaches some cycle");

    // Shortest cycle through the target: BFS from it and close over an
    // edge back into it (a self-loop closes at distance zero).
    let (dist_t, parent_t) = bfs(target, &adj);
    let closer = by_suffix
        .get(&nodes[target][..m])
        .expect("a cycle node has predecessors")
        .iter()
        .copied()
        .filter(|u| dist_t[*u].is_some())
        .min_by_key(|u| (dist_t[*u].unwrap(), *u))
        .expect("a cycle node closes a cycle");

    let path_to = |parent: &[Option<usize>], from: usize, to: usize| -> Vec<usize> {
        let mut path = vec![to];
        let mut at = to;
        while at != from {
            at = parent[at].expect("BFS reached the node");
            path.push(at);
        }
        path.reverse();
        path
    };
    let mut prefix_nodes = path_to(&parent, start, target);
    prefix_nodes.pop();
    let loop_nodes = path_to(&parent_t, target, closer);

    Ok(GraphOutcome {
        lasso: Some(Lasso {
            prefix_rows: prefix_nodes.iter().map(|id| nodes[*id][0]).collect(),
            loop_rows: loop_nodes.iter().map(|id| nodes[*id][0]).collect(),
        }),
        node_count,
    })
}

fn bfs(from: usize, adj: &[&[usize]]) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
    let mut dist = vec![None; adj.len()];
    let mut parent = vec![None; adj.len()];
    let mut queue = std::collections::VecDeque::new();
    dist[from] = Some(0);
    queue.push_back(from);
    while let Some(u) = queue.pop_front() {
        for v in adj[u] {
            if dist[*v].is_none() {
                dist[*v] = Some(dist[u].unwrap() + 1);
                parent[*v] = Some(u);
                queue.push_back(*v);
            }
        }
    }
    (dist, parent)
}

/// Iterative Tarjan; components are emitted in postorder.
fn tarjan_sccs(n: usize, adj: &[&[usize]]) -> Vec<Vec<usize>> {
    let mut index = vec![u32::MAX; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut sccs: Vec<Vec<usize>> = Vec::new();
    let mut next = 0u32;

    for root in 0..n {
        if index[root] != u32::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some((v, child)) = call.last().copied() {
            if child < adj[v].len() {
                call.last_mut().expect("nonempty").1 += 1;
                let w = adj[v][child];
                if index[w] == u32::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if low[v] == index[v] {
                    let mut scc = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        scc.push(w);
                        if w == v {
                            break;
                        }
                    }
                    scc.sort_unstable();
                    sccs.push(scc);
                }
                if let Some((p, _)) = call.last().copied() {
                    low[p] = low[p].min(low[v]);
                }
            }
        }
    }
    sccs
}

fn rows_to_vecs(masks: &[u64], n: usize) -> Vec<Vec<bool>> {
    masks
        .iter()
        .map(|mask| (0..n).map(|i| bit(*mask, i)).collect())
        .collect()
}

// --- decision operations ----------------------------------------------------

/// Searches for a model that validates the disjunction of `nf` at every
/// position while its conclusion variable fails somewhere (position 0 of
/// the witness). `None` means the compiled rule holds in every model.
pub fn refutable_rnf(nf: &RnfRule, m: u32) -> Result<Option<LassoWitness>> {
    refutable_rnf_budgeted(nf, m, DEFAULT_NODE_BUDGET)
}

pub fn refutable_rnf_budgeted(
    nf: &RnfRule,
    m: u32,
    node_budget: u64,
) -> Result<Option<LassoWitness>> {
    assert!(m >= 1, "the window length must be at least 1");
    let n = nf.variables().len();
    guard_pair_encoding(n, node_budget)?;

    let set: HashSet<(u64, u64, u128)> = nf
        .disjuncts()
        .iter()
        .map(|d| (d.t0, d.t1, d.ts))
        .collect();
    // A position of a refuting model must satisfy some total disjunct, so
    // its row is that disjunct's t0 block.
    let rows: Vec<u64> = nf
        .disjuncts()
        .iter()
        .map(|d| d.t0)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let outcome = solve_window_graph(
        &format!("the reduced rule over {:?}", nf.variables()),
        &rows,
        m as usize,
        node_budget,
        |w| set.contains(&(w[0], w[1], derived_since(w, n))),
        |w| !bit(w[0], 0),
    )?;
    let Some(lasso) = outcome.lasso else {
        return Ok(None);
    };

    let model = PeriodicModel::new(
        nf.variables().to_vec(),
        rows_to_vecs(&lasso.prefix_rows, n),
        rows_to_vecs(&lasso.loop_rows, n),
        Bound::Uniform(m),
    )
    .expect("witness rows are aligned with the variables");
    verify_rnf_witness(nf, &model);
    Ok(Some(LassoWitness {
        model,
        position: 0,
        verdict: WitnessVerdict::Refuted,
    }))
}

/// Re-checks a refutation through the semantics module: every position of
/// one full period satisfies some disjunct, and the conclusion variable is
/// false at position 0.
fn verify_rnf_witness(nf: &RnfRule, model: &PeriodicModel) {
    let n = nf.variables().len();
    let var = |i: usize| Formula::Atom(nf.variables()[i].to_string());
    let horizon = model.prefix_len() + model.loop_len();
    for a in 0..horizon {
        let mut t0 = 0u64;
        let mut t1 = 0u64;
        let mut ts = 0u128;
        for i in 0..n {
            if eval(model, &var(i), a).expect("witness letters cover the variables") {
                t0 |= 1 << i;
            }
            if eval(model, &Formula::next(var(i)), a).expect("witness evaluation") {
                t1 |= 1 << i;
            }
            for k in 0..n {
                if i != k
                    && eval(model, &Formula::since(var(i), var(k)), a).expect("witness evaluation")
                {
                    ts |= 1 << normal_form::pair_index(n, i, k);
                }
            }
        }
        assert!(
            normal_form::rnf_matches(nf, t0, t1, ts),
            "emitted witness fails the premise at position {a}"
        );
    }
    assert!(
        !eval(model, &var(0), 0).expect("witness evaluation"),
        "emitted witness does not falsify the conclusion at position 0"
    );
}

fn guard_pair_encoding(n: usize, node_budget: u64) -> Result<()> {
    // The ts block is packed into 128 bits; anything wider is far past any
    // practical node budget anyway.
    if n > 11 {
        return Err(Error::CapacityExceeded {
            what: format!("state descriptions over {n} variables"),
            needed: (1u128).checked_shl((n * (n - 1)) as u32).unwrap_or(u128::MAX),
            budget: node_budget as u128,
        });
    }
    Ok(())
}

/// Searches for a model making `f` true at position 0. `None` means `f` is
/// unsatisfiable over every model with window length `m`; by shift
/// invariance of the uniform frame, truth at any position implies truth at
/// position 0 of a shifted model.
pub fn satisfiable(f: &Formula, m: u32) -> Result<Option<LassoWitness>> {
    satisfiable_budgeted(f, m, DEFAULT_NODE_BUDGET)
}

pub fn satisfiable_budgeted(f: &Formula, m: u32, node_budget: u64) -> Result<Option<LassoWitness>> {
    Ok(satisfiable_with_node_count(f, m, node_budget)?.0)
}

/// As [`satisfiable`], also reporting how many window-graph nodes were
/// built; the brute-force oracle derives its completeness bound from it.
pub fn satisfiable_with_node_count(
    f: &Formula,
    m: u32,
    node_budget: u64,
) -> Result<(Option<LassoWitness>, usize)> {
    assert!(m >= 1, "the window length must be at least 1");
    let compiled = normal_form::compile_formula(f);
    let outcome = solve_compiled(&format!("`{f}`"), &compiled, m, node_budget, false)?;
    let Some(lasso) = outcome.lasso else {
        return Ok((None, outcome.node_count));
    };

    let n = compiled.n();
    let full = PeriodicModel::new(
        compiled.vars.clone(),
        rows_to_vecs(&lasso.prefix_rows, n),
        rows_to_vecs(&lasso.loop_rows, n),
        Bound::Uniform(m),
    )
    .expect("witness rows are aligned with the variables");
    let letters: Vec<String> = f.atoms().into_iter().collect();
    let model = full.project(&letters).expect("atoms are among the variables");
    assert!(
        eval(&model, f, 0).expect("witness letters cover the formula"),
        "emitted witness does not satisfy the formula at position 0"
    );
    Ok((
        Some(LassoWitness {
            model,
            position: 0,
            verdict: WitnessVerdict::Sat,
        }),
        outcome.node_count,
    ))
}

/// Runs the window graph for a compiled rule or formula. Definitions and
/// asserted constraints that only read plain variables filter the rows;
/// the rest are checked per window. For rules (`negate_start` false versus
/// true is decided by the compiler's start condition) the premise is one
/// of the asserted constraints.
fn solve_compiled(
    what: &str,
    compiled: &normal_form::Compiled,
    m: u32,
    node_budget: u64,
    _reserved: bool,
) -> Result<GraphOutcome> {
    let n = compiled.n();
    guard_pair_encoding(n, node_budget)?;
    if (1u128 << n) > node_budget as u128 {
        return Err(Error::CapacityExceeded {
            what: format!("valuation rows for {what}"),
            needed: 1u128 << n,
            budget: node_budget as u128,
        });
    }

    let mut local: Vec<Flat> = Vec::new();
    let mut windowed: Vec<(Option<usize>, Flat)> = Vec::new();
    for (i, body) in &compiled.defs {
        if body.is_row_local() {
            // t0[i] <-> body can be checked on a single row.
            local.push(Flat::And(
                Box::new(Flat::Implies(
                    Box::new(Flat::Var(*i)),
                    Box::new(body.clone()),
                )),
                Box::new(Flat::Implies(
                    Box::new(body.clone()),
                    Box::new(Flat::Var(*i)),
                )),
            ));
        } else {
            windowed.push((Some(*i), body.clone()));
        }
    }
    for a in &compiled.asserts {
        if a.is_row_local() {
            local.push(a.clone());
        } else {
            windowed.push((None, a.clone()));
        }
    }

    let rows: Vec<u64> = (0..1u64 << n)
        .filter(|row| local.iter().all(|c| eval_flat_row(c, *row)))
        .collect();

    solve_window_graph(
        what,
        &rows,
        m as usize,
        node_budget,
        |w| {
            windowed.iter().all(|(pin, body)| match pin {
                Some(i) => bit(w[0], *i) == eval_flat_window(body, w),
                None => eval_flat_window(body, w),
            })
        },
        |w| eval_flat_window(&compiled.start, w),
    )
}

/// Theoremhood: `f` holds at every position of every model with window
/// length `m` exactly when its negation is unsatisfiable.
pub fn is_theorem(f: &Formula, m: u32) -> Result<Theoremhood> {
    is_theorem_budgeted(f, m, DEFAULT_NODE_BUDGET)
}

pub fn is_theorem_budgeted(f: &Formula, m: u32, node_budget: u64) -> Result<Theoremhood> {
    let negated = Formula::not(f.clone());
    match satisfiable_budgeted(&negated, m, node_budget)? {
        None => Ok(Theoremhood::Theorem),
        Some(w) => {
            debug_assert!(!eval(&w.model, f, 0).unwrap_or(true));
            Ok(Theoremhood::NotTheorem(LassoWitness {
                model: w.model,
                position: 0,
                verdict: WitnessVerdict::Refuted,
            }))
        }
    }
}

/// Frame validity of a rule: `None` when the rule holds in every model
/// with window length `m`, otherwise a refuting model over the rule's own
/// atoms. Runs the window graph on the renamed rule, which is refutable
/// exactly when the rule is.
pub fn frame_valid_rule(rule: &Rule, m: u32) -> Result<Option<LassoWitness>> {
    frame_valid_rule_budgeted(rule, m, DEFAULT_NODE_BUDGET)
}

pub fn frame_valid_rule_budgeted(
    rule: &Rule,
    m: u32,
    node_budget: u64,
) -> Result<Option<LassoWitness>> {
    assert!(m >= 1, "the window length must be at least 1");
    let compiled = normal_form::compile_rule(rule);
    let outcome = solve_compiled(&format!("`{rule}`"), &compiled, m, node_budget, false)?;
    let Some(lasso) = outcome.lasso else {
        return Ok(None);
    };

    let n = compiled.n();
    let full = PeriodicModel::new(
        compiled.vars.clone(),
        rows_to_vecs(&lasso.prefix_rows, n),
        rows_to_vecs(&lasso.loop_rows, n),
        Bound::Uniform(m),
    )
    .expect("witness rows are aligned with the variables");
    let letters: Vec<String> = rule.variables().into_iter().collect();
    let model = full
        .project(&letters)
        .expect("rule atoms are among the variables");
    assert!(
        !rule_holds(&model, rule).expect("witness letters cover the rule"),
        "emitted witness does not refute the rule"
    );
    Ok(Some(LassoWitness {
        model,
        position: 0,
        verdict: WitnessVerdict::Refuted,
    }))
}

/// Exhaustively enumerates every model over `f`'s atoms with
/// `|prefix| + |loop| <= size_bound` in a fixed order (total size, then
/// prefix length, then row values) and returns the first satisfying one.
/// Independent of the window graph; the two are played against each other
/// in the acceptance suite.
pub fn brute_force_sat(f: &Formula, m: u32, size_bound: usize) -> Option<LassoWitness> {
    assert!(m >= 1, "the window length must be at least 1");
    let letters: Vec<String> = f.atoms().into_iter().collect();
    let k = letters.len();
    let row_values: u64 = 1 << k;

    for total in 1..=size_bound {
        for prefix_len in 0..total {
            let mut odo = vec![0u64; total];
            loop {
                let masks = &odo;
                let model = PeriodicModel::new(
                    letters.clone(),
                    rows_to_vecs(&masks[..prefix_len], k),
                    rows_to_vecs(&masks[prefix_len..], k),
                    Bound::Uniform(m),
                )
                .expect("enumerated rows are aligned");
                if eval(&model, f, 0).expect("letters cover the formula") {
                    return Some(LassoWitness {
                        model,
                        position: 0,
                        verdict: WitnessVerdict::Sat,
                    });
                }
                let mut slot = total;
                loop {
                    if slot == 0 {
                        break;
                    }
                    slot -= 1;
                    odo[slot] += 1;
                    if odo[slot] < row_values {
                        break;
                    }
                    odo[slot] = 0;
                }
                if odo.iter().all(|v| *v == 0) {
                    break;
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal_form::rnf_transform;
    use crate::syntax::{parse_formula, parse_rule};

    fn f(text: &str) -> Formula {
        parse_formula(text).unwrap()
    }

    #[test]
    fn contradiction_is_unsatisfiable() {
        for m in 1..=3 {
            assert!(satisfiable(&f("p & ~p"), m).unwrap().is_none());
        }
        assert!(brute_force_sat(&f("p & ~p"), 1, 3).is_none());
    }

    #[test]
    fn atom_is_satisfiable_with_a_true_start() {
        let w = satisfiable(&f("p"), 1).unwrap().expect("satisfiable");
        assert_eq!(w.position, 0);
        assert!(eval(&w.model, &f("p"), 0).unwrap());

        let bf = brute_force_sat(&f("p"), 1, 2).expect("satisfiable");
        assert_eq!(bf.model.prefix_len(), 0);
        assert_eq!(bf.model.loop_len(), 1);
        assert!(bf.model.row(0)[0]);
    }

    #[test]
    fn box_collapse_separates_from_the_transitive_reading() {
        // box x and not box box x is satisfiable under the bounded window.
        let w = satisfiable(&f("[]x & ~[][]x"), 1).unwrap().expect("satisfiable");
        assert!(eval(&w.model, &f("[]x & ~[][]x"), 0).unwrap());
        // ... so the implication is no theorem.
        let t = is_theorem(&f("[]x -> [][]x"), 1).unwrap();
        assert!(!t.holds());
        let counter = t.countermodel().unwrap();
        assert!(!eval(&counter.model, &f("[]x -> [][]x"), 0).unwrap());
    }

    #[test]
    fn excluded_middle_is_a_theorem() {
        assert!(is_theorem(&f("p | ~p"), 1).unwrap().holds());
        assert!(is_theorem(&f("p | ~p"), 2).unwrap().holds());
    }

    #[test]
    fn k1_collapse_makes_the_equivalence_a_theorem() {
        let enc = f("(K1 p -> p) & (p -> K1 p)");
        assert!(is_theorem(&enc, 1).unwrap().holds());
        assert!(is_theorem(&enc, 3).unwrap().holds());
    }

    #[test]
    fn identity_rule_is_frame_valid() {
        assert!(frame_valid_rule(&parse_rule("x / x").unwrap(), 1)
            .unwrap()
            .is_none());
    }

    #[test]
    fn next_elimination_rule_is_frame_invalid_with_witness() {
        let r = parse_rule("N x / x").unwrap();
        let w = frame_valid_rule(&r, 1).unwrap().expect("refutable");
        assert!(!rule_holds(&w.model, &r).unwrap());
        assert_eq!(w.verdict, WitnessVerdict::Refuted);
        // x false at 0, true from 1 on is the canonical shape.
        assert!(!eval(&w.model, &f("x"), 0).unwrap());
        assert!(eval(&w.model, &f("x"), 1).unwrap());
    }

    #[test]
    fn tautology_premise_rule_matches_theoremhood() {
        assert!(frame_valid_rule(&parse_rule("x -> x / p | ~p").unwrap(), 1)
            .unwrap()
            .is_none());
        let w = frame_valid_rule(&parse_rule("x -> x / ~p").unwrap(), 1)
            .unwrap()
            .expect("refutable");
        assert!(eval(&w.model, &f("p"), 0).unwrap() || {
            let tv = crate::semantics::truth_vector(&w.model, &f("p")).unwrap();
            !tv.all_true()
        });
    }

    #[test]
    fn refutable_rnf_on_compiled_rules() {
        // x / x: every disjunct asserts x, so x1 never fails.
        let nf = rnf_transform(&parse_rule("x / x").unwrap()).unwrap();
        assert!(refutable_rnf(&nf, 1).unwrap().is_none());

        // N x / x: witness has x false at 0, true afterwards.
        let nf = rnf_transform(&parse_rule("N x / x").unwrap()).unwrap();
        let w = refutable_rnf(&nf, 1).unwrap().expect("refutable");
        assert_eq!(w.model.letters(), ["x"]);
        assert!(!w.model.row(0)[0]);
        assert!(w.model.row(1)[0] && w.model.row(5)[0]);

        // Contradiction premise: no disjuncts, vacuously irrefutable.
        let nf = rnf_transform(&parse_rule("x & ~x / x").unwrap()).unwrap();
        assert!(refutable_rnf(&nf, 1).unwrap().is_none());
    }

    #[test]
    fn brute_force_and_graph_agree_on_simple_formulas() {
        for text in [
            "p",
            "~p",
            "p & ~p",
            "q S p",
            "N p & ~p",
            "[]x & ~[][]x",
            "~(true S p)",
            "(N p) S q -> p",
        ] {
            for m in [1u32, 2] {
                let (sat, nodes) =
                    satisfiable_with_node_count(&f(text), m, DEFAULT_NODE_BUDGET).unwrap();
                let bound = (m as usize + 1) + nodes.min(8);
                let bf = brute_force_sat(&f(text), m, bound);
                assert_eq!(sat.is_some(), bf.is_some(), "`{text}` at m={m}");
            }
        }
    }

    #[test]
    fn capacity_errors_are_reported_not_downgraded() {
        let r = parse_rule("(N x1) S (N x2) / x1 S x2").unwrap();
        let err = frame_valid_rule_budgeted(&r, 1, 4).unwrap_err();
        assert!(matches!(err, Error::CapacityExceeded { .. }));
    }

    #[test]
    fn frame_validity_handles_rules_beyond_explicit_rnf() {
        // The materialised normal form of this rule overflows the default
        // disjunct budget, but the graph decides it directly.
        let r = parse_rule("(N x1) S (N x2) / x1 S x2").unwrap();
        let w = frame_valid_rule(&r, 1).unwrap().expect("refutable");
        assert!(!rule_holds(&w.model, &r).unwrap());
    }

    #[test]
    fn deterministic_witnesses() {
        let r = parse_rule("N x / x").unwrap();
        let a = frame_valid_rule(&r, 1).unwrap().unwrap();
        let b = frame_valid_rule(&r, 1).unwrap().unwrap();
        assert_eq!(a, b);
        let s1 = satisfiable(&f("[]x & ~[][]x"), 2).unwrap().unwrap();
        let s2 = satisfiable(&f("[]x & ~[][]x"), 2).unwrap().unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn witness_json_carries_position_and_verdict() {
        let w = satisfiable(&f("p"), 1).unwrap().unwrap();
        let v = w.to_json();
        assert_eq!(v["verdict"], "sat");
        assert_eq!(v["position"], 0);
        assert!(v["loop"].is_array());
    }

    #[test]
    fn formulas_without_atoms() {
        assert!(satisfiable(&f("true"), 1).unwrap().is_some());
        assert!(satisfiable(&f("false"), 1).unwrap().is_none());
        assert!(is_theorem(&f("true"), 2).unwrap().holds());
    }
}
