//! Finitely presented infinite models and formula evaluation.
//!
//! A model is an ultimately periodic word of valuation rows: a finite
//! prefix followed by a loop repeated forever. Position `a` of the model
//! means row `prefix[a]` when `a < |prefix|` and the matching loop row
//! otherwise. Because `Since` only looks `m` steps ahead (further into the
//! past), truth of any formula is again ultimately periodic, so this
//! presentation loses nothing.

use crate::error::{Error, Result};
use crate::syntax::{is_valid_atom_name, Formula, Rule};
use serde_json::{json, Map, Value};

/// Window bound of a model: one fixed window length, or a per-position
/// (still ultimately periodic) assignment of window lengths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bound {
    Uniform(u32),
    NonUniform {
        window_prefix: Vec<u32>,
        window_loop: Vec<u32>,
    },
}

/// An ultimately periodic model: letters, prefix rows, loop rows and the
/// window bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicModel {
    letters: Vec<String>,
    prefix: Vec<Vec<bool>>,
    loop_rows: Vec<Vec<bool>>,
    bound: Bound,
}

impl PeriodicModel {
    /// Validates and builds a model. Rows are aligned with `letters`.
    ///
    /// The loop must be nonempty, every row must value every letter, a
    /// uniform bound must be at least 1, and a non-uniform bound must have
    /// nondecreasing window lengths with a constant loop part (the only
    /// shape an ultimately periodic nondecreasing sequence can have).
    pub fn new(
        letters: Vec<String>,
        prefix: Vec<Vec<bool>>,
        loop_rows: Vec<Vec<bool>>,
        bound: Bound,
    ) -> Result<PeriodicModel> {
        for (i, l) in letters.iter().enumerate() {
            if !is_valid_atom_name(l) {
                return Err(Error::InvalidModel(format!("letters[{i}]: bad name `{l}`")));
            }
            if letters[..i].contains(l) {
                return Err(Error::InvalidModel(format!("letters[{i}]: duplicate `{l}`")));
            }
        }
        if loop_rows.is_empty() {
            return Err(Error::InvalidModel("loop: must be nonempty".into()));
        }
        for (what, rows) in [("prefix", &prefix), ("loop", &loop_rows)] {
            for (i, row) in rows.iter().enumerate() {
                if row.len() != letters.len() {
                    return Err(Error::InvalidModel(format!(
                        "{what}[{i}]: row values {} letters, model has {}",
                        row.len(),
                        letters.len()
                    )));
                }
            }
        }
        match &bound {
            Bound::Uniform(m) => {
                if *m < 1 {
                    return Err(Error::InvalidModel("bound.uniform: must be >= 1".into()));
                }
            }
            Bound::NonUniform {
                window_prefix,
                window_loop,
            } => {
                if window_loop.is_empty() {
                    return Err(Error::InvalidModel(
                        "bound.window_loop: must be nonempty".into(),
                    ));
                }
                for (what, ws) in [("window_prefix", window_prefix), ("window_loop", window_loop)]
                {
                    if let Some(i) = ws.iter().position(|w| *w < 1) {
                        return Err(Error::InvalidModel(format!(
                            "bound.{what}[{i}]: window must be >= 1"
                        )));
                    }
                }
                if window_loop.iter().any(|w| *w != window_loop[0]) {
                    return Err(Error::InvalidModel(
                        "bound.window_loop: must be constant (window lengths may never shrink)"
                            .into(),
                    ));
                }
                for i in 1..window_prefix.len() {
                    if window_prefix[i] < window_prefix[i - 1] {
                        return Err(Error::InvalidModel(format!(
                            "bound.window_prefix[{i}]: window lengths may never shrink"
                        )));
                    }
                }
                if let Some(last) = window_prefix.last() {
                    if window_loop[0] < *last {
                        return Err(Error::InvalidModel(
                            "bound.window_loop: smaller than the last prefix window".into(),
                        ));
                    }
                }
            }
        }
        Ok(PeriodicModel {
            letters,
            prefix,
            loop_rows,
            bound,
        })
    }

    pub fn letters(&self) -> &[String] {
        &self.letters
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    pub fn loop_len(&self) -> usize {
        self.loop_rows.len()
    }

    pub fn bound(&self) -> &Bound {
        &self.bound
    }

    /// The valuation row at an arbitrary position.
    pub fn row(&self, a: usize) -> &[bool] {
        if a < self.prefix.len() {
            &self.prefix[a]
        } else {
            &self.loop_rows[(a - self.prefix.len()) % self.loop_rows.len()]
        }
    }

    /// Window length at a position.
    pub fn window(&self, a: usize) -> usize {
        match &self.bound {
            Bound::Uniform(m) => *m as usize,
            Bound::NonUniform {
                window_prefix,
                window_loop,
            } => {
                if a < window_prefix.len() {
                    window_prefix[a] as usize
                } else {
                    window_loop[(a - window_prefix.len()) % window_loop.len()] as usize
                }
            }
        }
    }

    fn letter_index(&self, name: &str) -> Result<usize> {
        self.letters
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| Error::UnknownAtom(name.to_string()))
    }

    /// Restricts the model to a subset of its letters.
    pub fn project(&self, letters: &[String]) -> Result<PeriodicModel> {
        let idx: Vec<usize> = letters
            .iter()
            .map(|l| self.letter_index(l))
            .collect::<Result<_>>()?;
        let pick = |row: &Vec<bool>| idx.iter().map(|i| row[*i]).collect::<Vec<bool>>();
        PeriodicModel::new(
            letters.to_vec(),
            self.prefix.iter().map(pick).collect(),
            self.loop_rows.iter().map(pick).collect(),
            self.bound.clone(),
        )
    }

    /// Drops the first `k` positions. Only uniform bounds keep their
    /// meaning under shifting.
    pub fn shift(&self, k: usize) -> Result<PeriodicModel> {
        let Bound::Uniform(_) = self.bound else {
            return Err(Error::NonUniformShift);
        };
        if k <= self.prefix.len() {
            Ok(PeriodicModel {
                letters: self.letters.clone(),
                prefix: self.prefix[k..].to_vec(),
                loop_rows: self.loop_rows.clone(),
                bound: self.bound.clone(),
            })
        } else {
            let r = (k - self.prefix.len()) % self.loop_rows.len();
            let mut rotated = self.loop_rows[r..].to_vec();
            rotated.extend_from_slice(&self.loop_rows[..r]);
            Ok(PeriodicModel {
                letters: self.letters.clone(),
                prefix: Vec::new(),
                loop_rows: rotated,
                bound: self.bound.clone(),
            })
        }
    }
}

/// Truth of one formula across a model, in the same prefix+loop shape.
/// For every `a >= offset`, entry `a` equals entry `a + loop_truth.len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthVector {
    pub prefix_truth: Vec<bool>,
    pub loop_truth: Vec<bool>,
    pub offset: usize,
}

impl TruthVector {
    pub fn get(&self, a: usize) -> bool {
        if a < self.offset {
            self.prefix_truth[a]
        } else {
            self.loop_truth[(a - self.offset) % self.loop_truth.len()]
        }
    }

    pub fn all_true(&self) -> bool {
        self.prefix_truth.iter().all(|b| *b) && self.loop_truth.iter().all(|b| *b)
    }
}

fn check_atoms(model: &PeriodicModel, f: &Formula) -> Result<()> {
    for a in f.atoms() {
        model.letter_index(&a)?;
    }
    Ok(())
}

/// Truth of `f` at position `a` under the bounded reading of `Since`:
/// `phi S psi` holds at `a` when some `b` in the window `[a, a + w(a)]`
/// satisfies `psi` and `phi` holds at every `c` with `a <= c < b`.
/// `b = a` is allowed, in which case only `psi` at `a` is required.
pub fn eval(model: &PeriodicModel, f: &Formula, a: usize) -> Result<bool> {
    check_atoms(model, f)?;
    Ok(eval_core(model, &f.expand_derived(), a))
}

fn eval_core(model: &PeriodicModel, f: &Formula, a: usize) -> bool {
    match f {
        Formula::Atom(name) => {
            let i = model
                .letter_index(name)
                .expect("atoms were checked before evaluation");
            model.row(a)[i]
        }
        Formula::Top => true,
        Formula::Bottom => false,
        Formula::Not(g) => !eval_core(model, g, a),
        Formula::And(l, r) => eval_core(model, l, a) && eval_core(model, r, a),
        Formula::Or(l, r) => eval_core(model, l, a) || eval_core(model, r, a),
        Formula::Implies(l, r) => !eval_core(model, l, a) || eval_core(model, r, a),
        Formula::Next(g) => eval_core(model, g, a + 1),
        Formula::Since(l, r) => {
            let w = model.window(a);
            for b in a..=a + w {
                if eval_core(model, r, b) {
                    return true;
                }
                // No witness at b; every later witness needs phi at b.
                if !eval_core(model, l, b) {
                    return false;
                }
            }
            false
        }
        _ => unreachable!("eval_core runs on expanded formulas"),
    }
}

/// Period-aware lookup into a truth table of length `prefix + loop`.
fn entry(table: &[bool], prefix_len: usize, loop_len: usize, a: usize) -> bool {
    if a < prefix_len {
        table[a]
    } else {
        table[prefix_len + (a - prefix_len) % loop_len]
    }
}

/// Computes the whole truth vector of `f` bottom-up over subformulas.
///
/// Agrees with [`eval`] at every position; the two are implemented
/// independently and cross-checked in tests.
pub fn truth_vector(model: &PeriodicModel, f: &Formula) -> Result<TruthVector> {
    check_atoms(model, f)?;
    let table = vector_core(model, &f.expand_derived(), false);
    let p = model.prefix_len();
    Ok(TruthVector {
        prefix_truth: table[..p].to_vec(),
        loop_truth: table[p..].to_vec(),
        offset: p,
    })
}

/// Truth vector of `f` under the unbounded (transitive) reading of `Since`,
/// where the witness `b` may be any position `>= a`. Computed by a least
/// fixpoint over the loop; the window bound of the model is ignored.
pub fn truth_vector_unbounded(model: &PeriodicModel, f: &Formula) -> Result<TruthVector> {
    check_atoms(model, f)?;
    let table = vector_core(model, &f.expand_derived(), true);
    let p = model.prefix_len();
    Ok(TruthVector {
        prefix_truth: table[..p].to_vec(),
        loop_truth: table[p..].to_vec(),
        offset: p,
    })
}

/// Truth at one position under the unbounded reading.
pub fn eval_unbounded(model: &PeriodicModel, f: &Formula, a: usize) -> Result<bool> {
    Ok(truth_vector_unbounded(model, f)?.get(a))
}

fn vector_core(model: &PeriodicModel, f: &Formula, unbounded: bool) -> Vec<bool> {
    let p = model.prefix_len();
    let l = model.loop_len();
    let total = p + l;
    match f {
        Formula::Atom(name) => {
            let i = model
                .letter_index(name)
                .expect("atoms were checked before evaluation");
            (0..total).map(|a| model.row(a)[i]).collect()
        }
        Formula::Top => vec![true; total],
        Formula::Bottom => vec![false; total],
        Formula::Not(g) => {
            let mut v = vector_core(model, g, unbounded);
            v.iter_mut().for_each(|b| *b = !*b);
            v
        }
        Formula::And(lhs, rhs) => {
            let lv = vector_core(model, lhs, unbounded);
            let rv = vector_core(model, rhs, unbounded);
            lv.into_iter().zip(rv).map(|(x, y)| x && y).collect()
        }
        Formula::Or(lhs, rhs) => {
            let lv = vector_core(model, lhs, unbounded);
            let rv = vector_core(model, rhs, unbounded);
            lv.into_iter().zip(rv).map(|(x, y)| x || y).collect()
        }
        Formula::Implies(lhs, rhs) => {
            let lv = vector_core(model, lhs, unbounded);
            let rv = vector_core(model, rhs, unbounded);
            lv.into_iter().zip(rv).map(|(x, y)| !x || y).collect()
        }
        Formula::Next(g) => {
            let gv = vector_core(model, g, unbounded);
            (0..total).map(|a| entry(&gv, p, l, a + 1)).collect()
        }
        Formula::Since(lhs, rhs) => {
            let lv = vector_core(model, lhs, unbounded);
            let rv = vector_core(model, rhs, unbounded);
            if unbounded {
                since_unbounded(&lv, &rv, p, l)
            } else {
                (0..total)
                    .map(|a| {
                        let w = model.window(a);
                        let mut ok = false;
                        for b in a..=a + w {
                            if entry(&rv, p, l, b) {
                                ok = true;
                                break;
                            }
                            if !entry(&lv, p, l, b) {
                                break;
                            }
                        }
                        ok
                    })
                    .collect()
            }
        }
        _ => unreachable!("vector_core runs on expanded formulas"),
    }
}

/// Least fixpoint of `S = psi or (phi and N S)` on a lasso word.
/// Backward sweeps over the loop stabilise after at most `loop + 1`
/// rounds; the prefix then falls out by one backward pass.
fn since_unbounded(phi: &[bool], psi: &[bool], p: usize, l: usize) -> Vec<bool> {
    let mut loop_s = vec![false; l];
    loop {
        let mut changed = false;
        for j in (0..l).rev() {
            let next = loop_s[(j + 1) % l];
            let v = psi[p + j] || (phi[p + j] && next);
            if v != loop_s[j] {
                loop_s[j] = v;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut out = vec![false; p + l];
    out[p..].copy_from_slice(&loop_s);
    for a in (0..p).rev() {
        out[a] = psi[a] || (phi[a] && out[a + 1]);
    }
    out
}

/// A rule holds in a model when: if all premises are true at every
/// position, then the conclusion is true at every position.
pub fn rule_holds(model: &PeriodicModel, rule: &Rule) -> Result<bool> {
    let mut premises_valid = true;
    for prem in rule.premises() {
        if !truth_vector(model, prem)?.all_true() {
            premises_valid = false;
            break;
        }
    }
    if !premises_valid {
        return Ok(true);
    }
    Ok(truth_vector(model, rule.conclusion())?.all_true())
}

// --- JSON model format -----------------------------------------------------
//
// { "letters": ["p", "q"],
//   "bound": {"uniform": 1} | {"window_prefix": [...], "window_loop": [...]},
//   "prefix": [ {"p": true, "q": false}, ... ],
//   "loop":   [ {...}, ... ] }

impl PeriodicModel {
    pub fn from_json_str(text: &str) -> Result<PeriodicModel> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| Error::InvalidModel(format!("not valid JSON: {e}")))?;
        PeriodicModel::from_json(&value)
    }

    pub fn from_json(value: &Value) -> Result<PeriodicModel> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::InvalidModel("root: expected an object".into()))?;
        let letters = parse_letters(obj)?;
        let bound = parse_bound(obj)?;
        let prefix = parse_rows(obj, "prefix", &letters, true)?;
        let loop_rows = parse_rows(obj, "loop", &letters, false)?;
        PeriodicModel::new(letters, prefix, loop_rows, bound)
    }

    pub fn to_json(&self) -> Value {
        let row_obj = |row: &Vec<bool>| {
            let mut map = Map::new();
            for (l, v) in self.letters.iter().zip(row) {
                map.insert(l.clone(), Value::Bool(*v));
            }
            Value::Object(map)
        };
        let bound = match &self.bound {
            Bound::Uniform(m) => json!({ "uniform": m }),
            Bound::NonUniform {
                window_prefix,
                window_loop,
            } => json!({ "window_prefix": window_prefix, "window_loop": window_loop }),
        };
        json!({
            "letters": self.letters,
            "bound": bound,
            "prefix": self.prefix.iter().map(row_obj).collect::<Vec<_>>(),
            "loop": self.loop_rows.iter().map(row_obj).collect::<Vec<_>>(),
        })
    }
}

fn parse_letters(obj: &Map<String, Value>) -> Result<Vec<String>> {
    let arr = obj
        .get("letters")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidModel("letters: expected an array".into()))?;
    arr.iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::InvalidModel(format!("letters[{i}]: expected a string")))
        })
        .collect()
}

fn parse_bound(obj: &Map<String, Value>) -> Result<Bound> {
    let bound = obj
        .get("bound")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::InvalidModel("bound: expected an object".into()))?;
    if let Some(m) = bound.get("uniform") {
        let m = m
            .as_u64()
            .ok_or_else(|| Error::InvalidModel("bound.uniform: expected a natural".into()))?;
        return Ok(Bound::Uniform(m as u32));
    }
    let nat_list = |key: &str| -> Result<Vec<u32>> {
        let arr = bound
            .get(key)
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidModel(format!("bound.{key}: expected an array")))?;
        arr.iter()
            .enumerate()
            .map(|(i, v)| {
                v.as_u64().map(|n| n as u32).ok_or_else(|| {
                    Error::InvalidModel(format!("bound.{key}[{i}]: expected a natural"))
                })
            })
            .collect()
    };
    Ok(Bound::NonUniform {
        window_prefix: nat_list("window_prefix")?,
        window_loop: nat_list("window_loop")?,
    })
}

fn parse_rows(
    obj: &Map<String, Value>,
    key: &str,
    letters: &[String],
    allow_missing: bool,
) -> Result<Vec<Vec<bool>>> {
    let arr = match obj.get(key) {
        Some(v) => v
            .as_array()
            .ok_or_else(|| Error::InvalidModel(format!("{key}: expected an array")))?,
        None if allow_missing => return Ok(Vec::new()),
        None => return Err(Error::InvalidModel(format!("{key}: expected an array"))),
    };
    arr.iter()
        .enumerate()
        .map(|(i, v)| {
            let row = v
                .as_object()
                .ok_or_else(|| Error::InvalidModel(format!("{key}[{i}]: expected an object")))?;
            for name in row.keys() {
                if !letters.contains(name) {
                    return Err(Error::InvalidModel(format!(
                        "{key}[{i}]: unknown letter `{name}`"
                    )));
                }
            }
            letters
                .iter()
                .map(|l| {
                    row.get(l)
                        .ok_or_else(|| {
                            Error::InvalidModel(format!("{key}[{i}]: missing letter `{l}`"))
                        })?
                        .as_bool()
                        .ok_or_else(|| {
                            Error::InvalidModel(format!("{key}[{i}].{l}: expected a boolean"))
                        })
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    fn f(text: &str) -> Formula {
        parse_formula(text).unwrap()
    }

    fn model(letters: &[&str], prefix: &[&[u8]], loop_rows: &[&[u8]], m: u32) -> PeriodicModel {
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
    fn box_example_from_m1_model() {
        // x holds at 0 and 1, fails from 2 on.
        let m = model(&["x"], &[&[1], &[1], &[0]], &[&[0]], 1);
        assert!(eval(&m, &f("[]x"), 0).unwrap());
        assert!(!eval(&m, &f("[][]x"), 0).unwrap());
        assert!(!eval(&m, &f("[]x -> [][]x"), 0).unwrap());

        let tv = truth_vector(&m, &f("[]x")).unwrap();
        assert_eq!(tv.prefix_truth, vec![true, false, false]);
        assert_eq!(tv.loop_truth, vec![false]);
        assert_eq!(tv.offset, 3);
    }

    #[test]
    fn window_length_decides_since() {
        // p only at position 2, q at 0 and 1.
        let rows: &[&[u8]] = &[&[0, 1], &[0, 1], &[1, 0]];
        let m2 = model(&["p", "q"], rows, &[&[0, 0]], 2);
        let m1 = model(&["p", "q"], rows, &[&[0, 0]], 1);
        assert!(eval(&m2, &f("q S p"), 0).unwrap());
        assert!(!eval(&m1, &f("q S p"), 0).unwrap());
    }

    #[test]
    fn since_witness_at_the_evaluation_point() {
        // psi at a is enough even when phi never holds.
        let m = model(&["p", "q"], &[], &[&[1, 0]], 1);
        assert!(eval(&m, &f("q S p"), 0).unwrap());
    }

    #[test]
    fn unbounded_reaches_past_the_window() {
        // p only at position 5, q everywhere.
        let m = model(
            &["p", "q"],
            &[&[0, 1], &[0, 1], &[0, 1], &[0, 1], &[0, 1], &[1, 1]],
            &[&[0, 1]],
            1,
        );
        assert!(eval_unbounded(&m, &f("q S p"), 0).unwrap());
        assert!(!eval(&m, &f("q S p"), 0).unwrap());
    }

    #[test]
    fn unbounded_since_on_the_loop() {
        // Witness sits on the loop, reachable only through the wrap-around.
        let m = model(&["p", "q"], &[], &[&[0, 1], &[0, 1], &[1, 1]], 1);
        let tv = truth_vector_unbounded(&m, &f("q S p")).unwrap();
        assert_eq!(tv.loop_truth, vec![true, true, true]);
        // And a loop where phi breaks the chain.
        let m = model(&["p", "q"], &[], &[&[0, 0], &[1, 1]], 1);
        let tv = truth_vector_unbounded(&m, &f("q S p")).unwrap();
        assert_eq!(tv.loop_truth, vec![false, true]);
    }

    #[test]
    fn k1_collapses_to_its_argument() {
        let m = model(&["p"], &[&[1], &[0]], &[&[1], &[0]], 2);
        for a in 0..8 {
            assert_eq!(
                eval(&m, &f("K1 p"), a).unwrap(),
                eval(&m, &f("p"), a).unwrap()
            );
        }
        let tv_k = truth_vector(&m, &f("K1 p")).unwrap();
        let tv_p = truth_vector(&m, &f("p")).unwrap();
        assert_eq!(tv_k, tv_p);
    }

    #[test]
    fn rule_validity_in_a_model() {
        let any = model(&["x"], &[&[1]], &[&[0]], 1);
        let r = crate::syntax::parse_rule("x / x").unwrap();
        assert!(rule_holds(&any, &r).unwrap());

        // Premise N x valid everywhere, conclusion fails at 0.
        let m = model(&["x"], &[&[0]], &[&[1]], 1);
        let r = crate::syntax::parse_rule("N x / x").unwrap();
        assert!(!rule_holds(&m, &r).unwrap());

        // A tautological premise exposes a falsifiable conclusion.
        let r = crate::syntax::parse_rule("x | ~x / x").unwrap();
        assert!(!rule_holds(&m, &r).unwrap());
    }

    #[test]
    fn truth_vector_matches_eval_by_sampling() {
        let m = model(
            &["p", "q"],
            &[&[1, 0], &[0, 0]],
            &[&[0, 1], &[1, 1], &[1, 0]],
            2,
        );
        for text in ["p", "q S p", "N (p S q)", "[]q", "<>p & ~q", "K[q] p"] {
            let g = f(text);
            let tv = truth_vector(&m, &g).unwrap();
            for a in 0..12 {
                assert_eq!(tv.get(a), eval(&m, &g, a).unwrap(), "{text} at {a}");
            }
            assert_eq!(tv.get(5), tv.get(5 + m.loop_len()), "{text} periodicity");
        }
    }

    #[test]
    fn shift_consumes_prefix_then_rotates_loop() {
        let m = model(&["p"], &[&[1], &[0]], &[&[1], &[0], &[0]], 1);
        let s0 = m.shift(0).unwrap();
        for a in 0..9 {
            assert_eq!(s0.row(a), m.row(a));
        }
        let s2 = m.shift(2).unwrap();
        assert_eq!(s2.prefix_len(), 0);
        let s4 = m.shift(4).unwrap();
        for a in 0..9 {
            assert_eq!(s4.row(a), m.row(a + 4), "position {a}");
        }
        let g = f("p S (N p)");
        for a in 0..6 {
            assert_eq!(
                eval(&m, &g, a + 4).unwrap(),
                eval(&s4, &g, a).unwrap(),
                "shift invariance at {a}"
            );
        }
    }

    #[test]
    fn shift_rejects_non_uniform_bounds() {
        let m = PeriodicModel::new(
            vec!["p".into()],
            vec![vec![true]],
            vec![vec![false]],
            Bound::NonUniform {
                window_prefix: vec![1],
                window_loop: vec![2],
            },
        )
        .unwrap();
        assert_eq!(m.shift(1), Err(Error::NonUniformShift));
    }

    #[test]
    fn non_uniform_windows_grow_with_position() {
        // Window 1 at position 0, window 3 from position 1 on.
        let m = PeriodicModel::new(
            vec!["p".into(), "q".into()],
            vec![vec![false, true], vec![false, true], vec![false, true]],
            vec![vec![true, true]],
            Bound::NonUniform {
                window_prefix: vec![1, 3],
                window_loop: vec![3],
            },
        )
        .unwrap();
        // p first true at position 3: out of reach from 0, in reach from 1.
        assert!(!eval(&m, &f("q S p"), 0).unwrap());
        assert!(eval(&m, &f("q S p"), 1).unwrap());
    }

    #[test]
    fn non_uniform_validation() {
        let shrinking = PeriodicModel::new(
            vec!["p".into()],
            vec![vec![true]],
            vec![vec![false]],
            Bound::NonUniform {
                window_prefix: vec![3, 2],
                window_loop: vec![3],
            },
        );
        assert!(matches!(shrinking, Err(Error::InvalidModel(_))));
        let nonconstant = PeriodicModel::new(
            vec!["p".into()],
            vec![],
            vec![vec![false], vec![true]],
            Bound::NonUniform {
                window_prefix: vec![],
                window_loop: vec![1, 2],
            },
        );
        assert!(matches!(nonconstant, Err(Error::InvalidModel(_))));
    }

    #[test]
    fn unknown_atom_is_reported() {
        let m = model(&["p"], &[], &[&[1]], 1);
        assert_eq!(
            eval(&m, &f("p & z"), 0),
            Err(Error::UnknownAtom("z".into()))
        );
    }

    #[test]
    fn model_json_round_trip_and_validation() {
        let text = r#"{
            "letters": ["p", "q"],
            "bound": {"uniform": 2},
            "prefix": [{"p": true, "q": false}],
            "loop": [{"p": false, "q": false}, {"p": true, "q": true}]
        }"#;
        let m = PeriodicModel::from_json_str(text).unwrap();
        assert_eq!(m.prefix_len(), 1);
        assert_eq!(m.loop_len(), 2);
        let again = PeriodicModel::from_json(&m.to_json()).unwrap();
        assert_eq!(again, m);

        let missing = r#"{
            "letters": ["p", "q"],
            "bound": {"uniform": 1},
            "prefix": [],
            "loop": [{"p": false}]
        }"#;
        match PeriodicModel::from_json_str(missing) {
            Err(Error::InvalidModel(msg)) => assert!(msg.contains("loop[0]"), "{msg}"),
            other => panic!("expected InvalidModel, got {other:?}"),
        }

        let empty_loop = r#"{
            "letters": ["p"],
            "bound": {"uniform": 1},
            "prefix": [{"p": true}],
            "loop": []
        }"#;
        assert!(matches!(
            PeriodicModel::from_json_str(empty_loop),
            Err(Error::InvalidModel(_))
        ));
    }
}
