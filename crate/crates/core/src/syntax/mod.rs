//! Formula and rule syntax: abstract syntax trees, the text grammar, the
//! printer, substitution and expansion of derived operators.

mod parse;

pub use parse::{parse_formula, parse_rule};

use std::collections::BTreeSet;
use std::fmt;

/// A formula of the past-directed temporal language.
///
/// Core connectives are `Atom`, `Top`, `Bottom`, `Not`, `And`, `Or`,
/// `Implies`, `Next` (one step into the past) and `Since` (bounded by the
/// model's window). The remaining kinds are derived operators that
/// [`Formula::expand_derived`] rewrites into core form:
///
/// * `Box phi` = `~(true S ~phi)` — phi held at every reachable point,
/// * `Diamond phi` = `true S phi` — phi holds somewhere in the window,
/// * `K1 phi` = `phi S phi` — knowledge as "held stable",
/// * `K2 phi` = `~(true S ~phi)` — knowledge as "always was true",
/// * `K[psi] phi` = `phi S psi` — knowledge since a trigger event.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    Top,
    Bottom,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Since(Box<Formula>, Box<Formula>),
    Box(Box<Formula>),
    Diamond(Box<Formula>),
    K1(Box<Formula>),
    K2(Box<Formula>),
    KPar {
        trigger: Box<Formula>,
        body: Box<Formula>,
    },
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        let name = name.into();
        debug_assert!(is_valid_atom_name(&name), "bad atom name `{name}`");
        Formula::Atom(name)
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn next(f: Formula) -> Formula {
        Formula::Next(Box::new(f))
    }

    pub fn since(l: Formula, r: Formula) -> Formula {
        Formula::Since(Box::new(l), Box::new(r))
    }

    pub fn box_(f: Formula) -> Formula {
        Formula::Box(Box::new(f))
    }

    pub fn diamond(f: Formula) -> Formula {
        Formula::Diamond(Box::new(f))
    }

    /// Set of atom names occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(name) => {
                out.insert(name.clone());
            }
            Formula::Top | Formula::Bottom => {}
            Formula::Not(f)
            | Formula::Next(f)
            | Formula::Box(f)
            | Formula::Diamond(f)
            | Formula::K1(f)
            | Formula::K2(f) => f.collect_atoms(out),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Since(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
            Formula::KPar { trigger, body } => {
                trigger.collect_atoms(out);
                body.collect_atoms(out);
            }
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Top | Formula::Bottom => 1,
            Formula::Not(f)
            | Formula::Next(f)
            | Formula::Box(f)
            | Formula::Diamond(f)
            | Formula::K1(f)
            | Formula::K2(f) => 1 + f.size(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Since(l, r) => {
                1 + l.size() + r.size()
            }
            Formula::KPar { trigger, body } => 1 + trigger.size() + body.size(),
        }
    }

    /// True when the tree contains only core node kinds.
    pub fn is_core(&self) -> bool {
        match self {
            Formula::Atom(_) | Formula::Top | Formula::Bottom => true,
            Formula::Not(f) | Formula::Next(f) => f.is_core(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Since(l, r) => {
                l.is_core() && r.is_core()
            }
            Formula::Box(_)
            | Formula::Diamond(_)
            | Formula::K1(_)
            | Formula::K2(_)
            | Formula::KPar { .. } => false,
        }
    }

    /// Rewrites every derived operator into core connectives.
    ///
    /// A no-op (up to cloning) on formulas that are already core.
    pub fn expand_derived(&self) -> Formula {
        match self {
            Formula::Atom(_) | Formula::Top | Formula::Bottom => self.clone(),
            Formula::Not(f) => Formula::not(f.expand_derived()),
            Formula::And(l, r) => Formula::and(l.expand_derived(), r.expand_derived()),
            Formula::Or(l, r) => Formula::or(l.expand_derived(), r.expand_derived()),
            Formula::Implies(l, r) => Formula::implies(l.expand_derived(), r.expand_derived()),
            Formula::Next(f) => Formula::next(f.expand_derived()),
            Formula::Since(l, r) => Formula::since(l.expand_derived(), r.expand_derived()),
            Formula::Box(f) | Formula::K2(f) => {
                let f = f.expand_derived();
                Formula::not(Formula::since(Formula::Top, Formula::not(f)))
            }
            Formula::Diamond(f) => Formula::since(Formula::Top, f.expand_derived()),
            Formula::K1(f) => {
                let f = f.expand_derived();
                Formula::since(f.clone(), f)
            }
            Formula::KPar { trigger, body } => {
                Formula::since(body.expand_derived(), trigger.expand_derived())
            }
        }
    }

    /// Applies a substitution: every mapped atom is replaced simultaneously,
    /// unmapped atoms stay as they are.
    pub fn apply_substitution(&self, subst: &Substitution) -> Formula {
        match self {
            Formula::Atom(name) => match subst.get(name) {
                Some(f) => f.clone(),
                None => self.clone(),
            },
            Formula::Top | Formula::Bottom => self.clone(),
            Formula::Not(f) => Formula::not(f.apply_substitution(subst)),
            Formula::And(l, r) => {
                Formula::and(l.apply_substitution(subst), r.apply_substitution(subst))
            }
            Formula::Or(l, r) => {
                Formula::or(l.apply_substitution(subst), r.apply_substitution(subst))
            }
            Formula::Implies(l, r) => {
                Formula::implies(l.apply_substitution(subst), r.apply_substitution(subst))
            }
            Formula::Next(f) => Formula::next(f.apply_substitution(subst)),
            Formula::Since(l, r) => {
                Formula::since(l.apply_substitution(subst), r.apply_substitution(subst))
            }
            Formula::Box(f) => Formula::Box(Box::new(f.apply_substitution(subst))),
            Formula::Diamond(f) => Formula::Diamond(Box::new(f.apply_substitution(subst))),
            Formula::K1(f) => Formula::K1(Box::new(f.apply_substitution(subst))),
            Formula::K2(f) => Formula::K2(Box::new(f.apply_substitution(subst))),
            Formula::KPar { trigger, body } => Formula::KPar {
                trigger: Box::new(trigger.apply_substitution(subst)),
                body: Box::new(body.apply_substitution(subst)),
            },
        }
    }

    /// How far past the evaluation point truth can depend on, for window
    /// length `m`: atoms reach 0, `Next` adds one, `Since` adds `m`.
    ///
    /// Derived operators count as their expansions.
    pub fn temporal_reach(&self, m: u32) -> u32 {
        match self {
            Formula::Atom(_) | Formula::Top | Formula::Bottom => 0,
            Formula::Not(f) => f.temporal_reach(m),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.temporal_reach(m).max(r.temporal_reach(m))
            }
            Formula::Next(f) => 1 + f.temporal_reach(m),
            Formula::Since(l, r) => m + l.temporal_reach(m).max(r.temporal_reach(m)),
            Formula::Box(f) | Formula::K2(f) | Formula::Diamond(f) | Formula::K1(f) => {
                m + f.temporal_reach(m)
            }
            Formula::KPar { trigger, body } => {
                m + trigger.temporal_reach(m).max(body.temporal_reach(m))
            }
        }
    }
}

pub fn is_valid_atom_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    name != "true"
        && name != "false"
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

// Binding strengths used by both the parser and the printer.
// implies < or < and < since < unary < leaf.
const PREC_IMPLIES: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_SINCE: u8 = 4;
const PREC_UNARY: u8 = 5;
const PREC_LEAF: u8 = 6;

impl Formula {
    fn prec(&self) -> u8 {
        match self {
            Formula::Atom(_) | Formula::Top | Formula::Bottom => PREC_LEAF,
            Formula::Not(_)
            | Formula::Next(_)
            | Formula::Box(_)
            | Formula::Diamond(_)
            | Formula::K1(_)
            | Formula::K2(_)
            | Formula::KPar { .. } => PREC_UNARY,
            Formula::Since(_, _) => PREC_SINCE,
            Formula::And(_, _) => PREC_AND,
            Formula::Or(_, _) => PREC_OR,
            Formula::Implies(_, _) => PREC_IMPLIES,
        }
    }

    fn fmt_prec(&self, out: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let own = self.prec();
        if own < min {
            write!(out, "(")?;
            self.fmt_prec(out, 0)?;
            return write!(out, ")");
        }
        match self {
            Formula::Atom(name) => write!(out, "{name}"),
            Formula::Top => write!(out, "true"),
            Formula::Bottom => write!(out, "false"),
            Formula::Not(f) => {
                write!(out, "~")?;
                f.fmt_prec(out, PREC_UNARY)
            }
            Formula::Next(f) => {
                write!(out, "N ")?;
                f.fmt_prec(out, PREC_UNARY)
            }
            Formula::Box(f) => {
                write!(out, "[]")?;
                f.fmt_prec(out, PREC_UNARY)
            }
            Formula::Diamond(f) => {
                write!(out, "<>")?;
                f.fmt_prec(out, PREC_UNARY)
            }
            Formula::K1(f) => {
                write!(out, "K1 ")?;
                f.fmt_prec(out, PREC_UNARY)
            }
            Formula::K2(f) => {
                write!(out, "K2 ")?;
                f.fmt_prec(out, PREC_UNARY)
            }
            Formula::KPar { trigger, body } => {
                write!(out, "K[")?;
                trigger.fmt_prec(out, 0)?;
                write!(out, "] ")?;
                body.fmt_prec(out, PREC_UNARY)
            }
            // Since is left-associative: the left child may print bare at the
            // same level, the right child needs parentheses to keep its shape.
            Formula::Since(l, r) => {
                l.fmt_prec(out, PREC_SINCE)?;
                write!(out, " S ")?;
                r.fmt_prec(out, PREC_UNARY)
            }
            Formula::And(l, r) => {
                l.fmt_prec(out, PREC_AND)?;
                write!(out, " & ")?;
                r.fmt_prec(out, PREC_SINCE)
            }
            Formula::Or(l, r) => {
                l.fmt_prec(out, PREC_OR)?;
                write!(out, " | ")?;
                r.fmt_prec(out, PREC_AND)
            }
            // Implication is right-associative.
            Formula::Implies(l, r) => {
                l.fmt_prec(out, PREC_OR)?;
                write!(out, " -> ")?;
                r.fmt_prec(out, PREC_IMPLIES)
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(out, 0)
    }
}

/// An inference rule: a nonempty list of premises and one conclusion.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    premises: Vec<Formula>,
    conclusion: Formula,
}

impl Rule {
    /// Panics when `premises` is empty; parsed rules are never empty.
    pub fn new(premises: Vec<Formula>, conclusion: Formula) -> Rule {
        assert!(!premises.is_empty(), "a rule needs at least one premise");
        Rule {
            premises,
            conclusion,
        }
    }

    pub fn premises(&self) -> &[Formula] {
        &self.premises
    }

    pub fn conclusion(&self) -> &Formula {
        &self.conclusion
    }

    /// Union of the atoms of all premises and the conclusion.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = self.conclusion.atoms();
        for p in &self.premises {
            out.append(&mut p.atoms());
        }
        out
    }

    pub fn expand_derived(&self) -> Rule {
        Rule {
            premises: self.premises.iter().map(Formula::expand_derived).collect(),
            conclusion: self.conclusion.expand_derived(),
        }
    }

    pub fn apply_substitution(&self, subst: &Substitution) -> Rule {
        Rule {
            premises: self
                .premises
                .iter()
                .map(|p| p.apply_substitution(subst))
                .collect(),
            conclusion: self.conclusion.apply_substitution(subst),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.premises.iter().enumerate() {
            if i > 0 {
                write!(out, ", ")?;
            }
            write!(out, "{p}")?;
        }
        write!(out, " / {}", self.conclusion)
    }
}

/// A finite map from atom names to formulas, applied simultaneously.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    map: std::collections::BTreeMap<String, Formula>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn bind(&mut self, atom: impl Into<String>, f: Formula) -> &mut Self {
        self.map.insert(atom.into(), f);
        self
    }

    pub fn get(&self, atom: &str) -> Option<&Formula> {
        self.map.get(atom)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Formula)> {
        self.map.iter()
    }

    /// The composition `self` after `first`: applying the result equals
    /// applying `first` and then `self`.
    pub fn compose_after(&self, first: &Substitution) -> Substitution {
        let mut map: std::collections::BTreeMap<String, Formula> = first
            .map
            .iter()
            .map(|(k, v)| (k.clone(), v.apply_substitution(self)))
            .collect();
        for (k, v) in &self.map {
            map.entry(k.clone()).or_insert_with(|| v.clone());
        }
        Substitution { map }
    }
}

impl FromIterator<(String, Formula)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (String, Formula)>>(iter: I) -> Substitution {
        Substitution {
            map: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "{{")?;
        for (i, (k, v)) in self.map.iter().enumerate() {
            if i > 0 {
                write!(out, ", ")?;
            }
            write!(out, "{k} -> {v}")?;
        }
        write!(out, "}}")
    }
}
