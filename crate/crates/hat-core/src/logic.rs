//! Vocabulary and formula AST for first-order logic with transitive closure,
//! extended with monadic set variables for the NP fragment.
//!
//! Surface syntax (ASCII): `0`, `1`, `p(v1,v2)`, `!f`, `f & g`, `f | g`,
//! `f -> g`, `f <-> g`, `E v1,v2: f`, `A v1,v2: f`,
//! `TC(v1,v2; f)(v3,v4)`, `p+(a,b)`, `p*(a,b)`, `v in $V`, `ES $V1,$V2: f`.
//!
//! Precedence, highest to lowest: `!`, `&`, `|`, `TC`, `->`/`<->`,
//! quantifiers. `&` and `|` associate to the left; `->` and `<->` to the
//! right (the right-hand side of either may be a quantified formula).
//!
//! All sugar is expanded at parse time: the AST has exactly seven
//! first-order constructors plus the two set-variable forms, so evaluators
//! and formula generators never see `&`, `->`, `<->` or `A` nodes.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::error::Error;

mod parser;
mod printer;

pub use parser::{parse_formula, parse_formula_np, ParseError};

/// Name of the designated equality predicate, always present in a vocabulary.
pub const EQ: &str = "eq";

/// First-order variables are plain identifiers.
pub type Var = String;

/// Set variables (written `$V` in the surface syntax) live in a namespace
/// disjoint from first-order variables.
pub type SetVar = String;

/// A predicate declaration: name plus arity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredDecl {
    pub name: String,
    pub arity: usize,
}

#[derive(Debug)]
struct VocInner {
    preds: Vec<PredDecl>,
    index: HashMap<String, usize>,
    max_arity: usize,
}

/// A finite predicate signature. The equality symbol `eq` (binary) is always
/// present at index 0; the remaining predicates keep declaration order.
///
/// Cloning is cheap (shared internally), and vocabularies are immutable
/// after construction.
#[derive(Clone)]
pub struct Vocabulary {
    inner: Arc<VocInner>,
}

impl Vocabulary {
    /// Builds a vocabulary from `(name, arity)` pairs. `eq` is inserted
    /// implicitly; declaring it explicitly with arity 2 is accepted and
    /// ignored. Duplicate names are rejected.
    pub fn new<S: Into<String>>(preds: impl IntoIterator<Item = (S, usize)>) -> Result<Self, Error> {
        let mut decls = vec![PredDecl { name: EQ.to_string(), arity: 2 }];
        let mut index = HashMap::new();
        index.insert(EQ.to_string(), 0usize);
        for (name, arity) in preds {
            let name = name.into();
            if name == EQ {
                if arity != 2 {
                    return Err(Error::BadEqArity { arity });
                }
                continue;
            }
            if !is_ident(&name) {
                return Err(Error::BadPredicateName { name });
            }
            if index.contains_key(&name) {
                return Err(Error::DuplicatePredicate { name });
            }
            index.insert(name.clone(), decls.len());
            decls.push(PredDecl { name, arity });
        }
        let max_arity = decls.iter().map(|d| d.arity).max().unwrap_or(2);
        Ok(Vocabulary { inner: Arc::new(VocInner { preds: decls, index, max_arity }) })
    }

    /// Number of predicates, including `eq`.
    pub fn len(&self) -> usize {
        self.inner.preds.len()
    }

    pub fn is_empty(&self) -> bool {
        false // eq is always present
    }

    /// Index of a predicate by name.
    pub fn pred_index(&self, name: &str) -> Option<usize> {
        self.inner.index.get(name).copied()
    }

    /// Index of the equality predicate (always 0).
    pub fn eq_index(&self) -> usize {
        0
    }

    pub fn arity(&self, pred: usize) -> usize {
        self.inner.preds[pred].arity
    }

    pub fn name(&self, pred: usize) -> &str {
        &self.inner.preds[pred].name
    }

    /// The largest declared arity (at least 2, because of `eq`).
    pub fn max_arity(&self) -> usize {
        self.inner.max_arity
    }

    pub fn decls(&self) -> impl Iterator<Item = (usize, &PredDecl)> {
        self.inner.preds.iter().enumerate()
    }

    /// Indices of all unary predicates, in declaration order.
    pub fn unary_indices(&self) -> Vec<usize> {
        self.indices_of_arity(1)
    }

    /// Indices of all nullary predicates, in declaration order.
    pub fn nullary_indices(&self) -> Vec<usize> {
        self.indices_of_arity(0)
    }

    pub fn indices_of_arity(&self, arity: usize) -> Vec<usize> {
        self.inner
            .preds
            .iter()
            .enumerate()
            .filter(|(_, d)| d.arity == arity)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.inner.index.contains_key(name)
    }
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.preds == other.inner.preds
    }
}

impl Eq for Vocabulary {}

impl std::fmt::Debug for Vocabulary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.inner.preds.iter().map(|d| format!("{}/{}", d.name, d.arity))).finish()
    }
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !parser::is_keyword(s)
}

/// Formula AST. Only the core constructors are represented; derived
/// connectives are expanded by the parser and the builder methods below.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    False,
    True,
    /// Predicate application; argument count matches the declared arity.
    Atom(String, Vec<Var>),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    /// `TC(bound.0, bound.1; body)(args.0, args.1)`. The bound pair is
    /// rebound inside `body`; the args are free occurrences.
    Tc {
        bound: (Var, Var),
        body: Box<Formula>,
        args: (Var, Var),
    },
    /// `v in $V`; NP fragment only.
    SetMember(Var, SetVar),
    /// `ES $V1,..,$Vn: body`; NP fragment only.
    ExistsSets(Vec<SetVar>, Box<Formula>),
}

impl Formula {
    #[allow(clippy::should_implement_trait)] // constructor, parallel to `or`/`and`
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    /// `a & b`, expanded to `!(!a | !b)`.
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::or(Formula::not(a), Formula::not(b)))
    }

    /// `a -> b`, expanded to `!a | b`.
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or(Formula::not(a), b)
    }

    /// `a <-> b`, expanded to `(a -> b) & (b -> a)`.
    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    }

    pub fn exists(v: impl Into<Var>, f: Formula) -> Formula {
        Formula::Exists(v.into(), Box::new(f))
    }

    /// `A v: f`, expanded to `!E v: !f`.
    pub fn forall(v: impl Into<Var>, f: Formula) -> Formula {
        Formula::not(Formula::exists(v, Formula::not(f)))
    }

    pub fn exists_all<V: Into<Var>>(vars: impl IntoIterator<Item = V>, f: Formula) -> Formula {
        let vars: Vec<Var> = vars.into_iter().map(Into::into).collect();
        vars.into_iter().rev().fold(f, |acc, v| Formula::Exists(v, Box::new(acc)))
    }

    pub fn forall_all<V: Into<Var>>(vars: impl IntoIterator<Item = V>, f: Formula) -> Formula {
        let vars: Vec<Var> = vars.into_iter().map(Into::into).collect();
        vars.into_iter().rev().fold(f, |acc, v| Formula::forall(v, acc))
    }

    /// Conjunction of a sequence; empty yields `1`.
    pub fn and_all(fs: impl IntoIterator<Item = Formula>) -> Formula {
        let mut iter = fs.into_iter();
        match iter.next() {
            None => Formula::True,
            Some(first) => iter.fold(first, Formula::and),
        }
    }

    /// Disjunction of a sequence; empty yields `0`.
    pub fn or_all(fs: impl IntoIterator<Item = Formula>) -> Formula {
        let mut iter = fs.into_iter();
        match iter.next() {
            None => Formula::False,
            Some(first) => iter.fold(first, Formula::or),
        }
    }

    /// Arity-checked atom construction.
    pub fn atom<V: Into<Var>>(
        voc: &Vocabulary,
        pred: &str,
        args: impl IntoIterator<Item = V>,
    ) -> Result<Formula, Error> {
        let args: Vec<Var> = args.into_iter().map(Into::into).collect();
        let idx = voc
            .pred_index(pred)
            .ok_or_else(|| Error::UnknownPredicate { name: pred.to_string() })?;
        let arity = voc.arity(idx);
        if args.len() != arity {
            return Err(Error::ArityMismatch { name: pred.to_string(), expected: arity, got: args.len() });
        }
        Ok(Formula::Atom(pred.to_string(), args))
    }

    /// `p+(a,b)`: transitive closure of a binary predicate, expanded to
    /// `TC(v1,v2; p(v1,v2))(a,b)`.
    pub fn tc_plus(pred: &str, a: impl Into<Var>, b: impl Into<Var>) -> Formula {
        Formula::Tc {
            bound: ("v1".to_string(), "v2".to_string()),
            body: Box::new(Formula::Atom(pred.to_string(), vec!["v1".to_string(), "v2".to_string()])),
            args: (a.into(), b.into()),
        }
    }

    /// `p*(a,b)`: reflexive transitive closure, expanded to `p+(a,b) | eq(a,b)`.
    pub fn tc_star(pred: &str, a: impl Into<Var>, b: impl Into<Var>) -> Formula {
        let a = a.into();
        let b = b.into();
        Formula::or(
            Formula::tc_plus(pred, a.clone(), b.clone()),
            Formula::Atom(EQ.to_string(), vec![a, b]),
        )
    }

    /// Free first-order variables. For `TC(v1,v2; body)(a1,a2)` these are
    /// `(free(body) - {v1,v2}) + {a1,a2}`.
    pub fn free_variables(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<Var>) {
        match self {
            Formula::False | Formula::True => {}
            Formula::Atom(_, args) => out.extend(args.iter().cloned()),
            Formula::Not(f) => f.collect_free(out),
            Formula::Or(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            Formula::Exists(v, f) => {
                let mut inner = BTreeSet::new();
                f.collect_free(&mut inner);
                inner.remove(v);
                out.extend(inner);
            }
            Formula::Tc { bound, body, args } => {
                let mut inner = BTreeSet::new();
                body.collect_free(&mut inner);
                inner.remove(&bound.0);
                inner.remove(&bound.1);
                out.extend(inner);
                out.insert(args.0.clone());
                out.insert(args.1.clone());
            }
            Formula::SetMember(v, _) => {
                out.insert(v.clone());
            }
            Formula::ExistsSets(_, f) => f.collect_free(out),
        }
    }

    /// Free set variables (those not bound by an enclosing `ES`).
    pub fn free_set_variables(&self) -> BTreeSet<SetVar> {
        let mut out = BTreeSet::new();
        self.collect_free_sets(&mut out);
        out
    }

    fn collect_free_sets(&self, out: &mut BTreeSet<SetVar>) {
        match self {
            Formula::False | Formula::True | Formula::Atom(..) => {}
            Formula::Not(f) => f.collect_free_sets(out),
            Formula::Or(a, b) => {
                a.collect_free_sets(out);
                b.collect_free_sets(out);
            }
            Formula::Exists(_, f) => f.collect_free_sets(out),
            Formula::Tc { body, .. } => body.collect_free_sets(out),
            Formula::SetMember(_, sv) => {
                out.insert(sv.clone());
            }
            Formula::ExistsSets(svs, f) => {
                let mut inner = BTreeSet::new();
                f.collect_free_sets(&mut inner);
                for sv in svs {
                    inner.remove(sv);
                }
                out.extend(inner);
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_variables().is_empty() && self.free_set_variables().is_empty()
    }

    /// True if the formula contains `SetMember` or `ExistsSets` nodes.
    pub fn uses_sets(&self) -> bool {
        match self {
            Formula::False | Formula::True | Formula::Atom(..) => false,
            Formula::Not(f) | Formula::Exists(_, f) => f.uses_sets(),
            Formula::Or(a, b) => a.uses_sets() || b.uses_sets(),
            Formula::Tc { body, .. } => body.uses_sets(),
            Formula::SetMember(..) | Formula::ExistsSets(..) => true,
        }
    }

    /// True if the formula contains a `TC` operator.
    pub fn uses_tc(&self) -> bool {
        match self {
            Formula::False | Formula::True | Formula::Atom(..) | Formula::SetMember(..) => false,
            Formula::Not(f) | Formula::Exists(_, f) | Formula::ExistsSets(_, f) => f.uses_tc(),
            Formula::Or(a, b) => a.uses_tc() || b.uses_tc(),
            Formula::Tc { .. } => true,
        }
    }

    /// Checks arity agreement of every atom against `voc`.
    pub fn check(&self, voc: &Vocabulary) -> Result<(), Error> {
        match self {
            Formula::False | Formula::True | Formula::SetMember(..) => Ok(()),
            Formula::Atom(p, args) => {
                let idx = voc
                    .pred_index(p)
                    .ok_or_else(|| Error::UnknownPredicate { name: p.clone() })?;
                if voc.arity(idx) != args.len() {
                    return Err(Error::ArityMismatch {
                        name: p.clone(),
                        expected: voc.arity(idx),
                        got: args.len(),
                    });
                }
                Ok(())
            }
            Formula::Not(f) | Formula::Exists(_, f) | Formula::ExistsSets(_, f) => f.check(voc),
            Formula::Or(a, b) => {
                a.check(voc)?;
                b.check(voc)
            }
            Formula::Tc { body, .. } => body.check(voc),
        }
    }

    /// Capture-avoiding substitution of variable `from` by variable `to`.
    pub fn substitute_var(&self, from: &Var, to: &Var) -> Formula {
        if from == to {
            return self.clone();
        }
        match self {
            Formula::False | Formula::True => self.clone(),
            Formula::Atom(p, args) => Formula::Atom(
                p.clone(),
                args.iter().map(|a| if a == from { to.clone() } else { a.clone() }).collect(),
            ),
            Formula::Not(f) => Formula::not(f.substitute_var(from, to)),
            Formula::Or(a, b) => Formula::or(a.substitute_var(from, to), b.substitute_var(from, to)),
            Formula::Exists(v, f) => {
                if v == from {
                    self.clone()
                } else if v == to {
                    let fresh = fresh_var(v, f);
                    let renamed = f.substitute_var(v, &fresh);
                    Formula::Exists(fresh, Box::new(renamed.substitute_var(from, to)))
                } else {
                    Formula::Exists(v.clone(), Box::new(f.substitute_var(from, to)))
                }
            }
            Formula::Tc { bound, body, args } => {
                let new_args = (
                    if &args.0 == from { to.clone() } else { args.0.clone() },
                    if &args.1 == from { to.clone() } else { args.1.clone() },
                );
                if &bound.0 == from || &bound.1 == from {
                    return Formula::Tc { bound: bound.clone(), body: body.clone(), args: new_args };
                }
                let mut bound = bound.clone();
                let mut body = (**body).clone();
                if &bound.0 == to {
                    let fresh = fresh_var(&bound.0, &body);
                    body = body.substitute_var(&bound.0, &fresh);
                    bound.0 = fresh;
                }
                if &bound.1 == to {
                    let fresh = fresh_var(&bound.1, &body);
                    body = body.substitute_var(&bound.1, &fresh);
                    bound.1 = fresh;
                }
                Formula::Tc {
                    bound,
                    body: Box::new(body.substitute_var(from, to)),
                    args: new_args,
                }
            }
            Formula::SetMember(v, sv) => {
                Formula::SetMember(if v == from { to.clone() } else { v.clone() }, sv.clone())
            }
            Formula::ExistsSets(svs, f) => {
                Formula::ExistsSets(svs.clone(), Box::new(f.substitute_var(from, to)))
            }
        }
    }

    /// Splits a formula into top-level conjuncts, seeing through the
    /// expanded `&` pattern, double negation, and negated disjunctions
    /// (`!(a | b)` contributes the conjuncts of `!a` and `!b`). The
    /// conjunction of the result is equivalent to the input.
    pub fn conjuncts(&self) -> Vec<Formula> {
        let mut out = Vec::new();
        collect_pos(self, &mut out);
        out
    }

    /// Names of predicates occurring in the formula.
    pub fn predicates(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_preds(&mut out);
        out
    }

    fn collect_preds(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::False | Formula::True | Formula::SetMember(..) => {}
            Formula::Atom(p, _) => {
                out.insert(p.clone());
            }
            Formula::Not(f) | Formula::Exists(_, f) | Formula::ExistsSets(_, f) => f.collect_preds(out),
            Formula::Or(a, b) => {
                a.collect_preds(out);
                b.collect_preds(out);
            }
            Formula::Tc { body, .. } => body.collect_preds(out),
        }
    }
}

fn collect_pos(f: &Formula, out: &mut Vec<Formula>) {
    if let Formula::Not(inner) = f {
        match &**inner {
            Formula::Or(l, r) => {
                collect_neg(l, out);
                collect_neg(r, out);
                return;
            }
            Formula::Not(g) => {
                collect_pos(g, out);
                return;
            }
            _ => {}
        }
    }
    out.push(f.clone());
}

fn collect_neg(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::Not(g) => collect_pos(g, out),
        Formula::Or(l, r) => {
            collect_neg(l, out);
            collect_neg(r, out);
        }
        _ => out.push(Formula::not(f.clone())),
    }
}

fn fresh_var(base: &str, avoid_in: &Formula) -> Var {
    let free = avoid_in.free_variables();
    let mut n = 0usize;
    loop {
        let candidate = format!("{base}_{n}");
        if !free.contains(&candidate) {
            return candidate;
        }
        n += 1;
    }
}

/// Renders a formula in the surface syntax. The output reparses to a
/// structurally equal AST.
pub fn print_formula(f: &Formula) -> String {
    printer::print(f)
}
