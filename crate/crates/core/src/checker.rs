//! The proof kernel. Proofs are explicit trees whose nodes name a rule, the
//! index of the principal formula and the rule's annotation; the kernel only
//! replays them.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::formula::{FixKind, Formula, HierarchyClass, Pred};
use crate::term::{name, Constructors, Name, Signature, Term};
use crate::unify::mgu;

/// `Σ ⊢ Γ`. Formulas are kept in order; rules address them by index.
#[derive(Clone, PartialEq, Eq)]
pub struct Sequent {
    pub sig: Signature,
    pub formulas: Vec<Formula>,
}

impl Sequent {
    pub fn new(sig: Signature, formulas: Vec<Formula>) -> Self {
        Sequent { sig, formulas }
    }

    /// The signature is taken to be the free variables of the formulas.
    pub fn closed_over(formulas: Vec<Formula>) -> Self {
        let mut sig = Signature::new();
        for f in &formulas {
            for x in f.free_vars() {
                sig.insert(x);
            }
        }
        Sequent { sig, formulas }
    }

    fn replace(&self, i: usize, with: Vec<Formula>) -> Vec<Formula> {
        let mut out = Vec::with_capacity(self.formulas.len() + with.len());
        out.extend_from_slice(&self.formulas[..i]);
        out.extend(with);
        out.extend_from_slice(&self.formulas[i + 1..]);
        out
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::syntax::printer::Printer::new().sequent(self))
    }
}

impl fmt::Debug for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Mode {
    Core,
    CorePlusAdmissible,
    MuLK,
    MuLKPlus,
}

impl Mode {
    pub fn has_unfold_init(self) -> bool {
        self != Mode::Core
    }
    pub fn has_cut(self) -> bool {
        matches!(self, Mode::CorePlusAdmissible | Mode::MuLKPlus)
    }
    pub fn has_structural(self) -> bool {
        matches!(self, Mode::MuLK | Mode::MuLKPlus)
    }
    pub fn keyword(self) -> &'static str {
        match self {
            Mode::Core => "core",
            Mode::CorePlusAdmissible => "core+",
            Mode::MuLK => "mulk",
            Mode::MuLKPlus => "mulk+",
        }
    }
    pub fn from_keyword(s: &str) -> Option<Mode> {
        Some(match s {
            "core" => Mode::Core,
            "core+" => Mode::CorePlusAdmissible,
            "mulk" => Mode::MuLK,
            "mulk+" => Mode::MuLKPlus,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RuleSet {
    pub mode: Mode,
    /// Every ν invariant must be purely positive.
    pub sigma1: bool,
    /// Exponentials are replaced by their fixed-point definitions before
    /// checking.
    pub exp: bool,
}

impl RuleSet {
    pub fn new(mode: Mode) -> Self {
        RuleSet { mode, sigma1: false, exp: false }
    }
    pub fn with_sigma1(self) -> Self {
        RuleSet { sigma1: true, ..self }
    }
    pub fn with_exp(self) -> Self {
        RuleSet { exp: true, ..self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Rule {
    /// Non-principal indices that go to the left premise.
    Tensor(Vec<usize>),
    One,
    Par,
    Bot,
    With,
    Top,
    Plus(Side),
    Eq,
    Neq,
    Exists(Term),
    Forall(Name),
    Mu,
    /// Invariant and the eigenvariables of the second premise (generated
    /// when empty and the arity is positive).
    Nu(Pred, Vec<Name>),
    MuNu,
    Unfold,
    Init,
    /// Cut formula and the indices that go to the left premise.
    Cut(Formula, Vec<usize>),
    Contract,
    Weaken,
    CNuNu(Pred, Pred, Vec<Name>),
}

impl Rule {
    pub fn keyword(&self) -> &'static str {
        match self {
            Rule::Tensor(_) => "tensor",
            Rule::One => "one",
            Rule::Par => "par",
            Rule::Bot => "bot",
            Rule::With => "with",
            Rule::Top => "top",
            Rule::Plus(_) => "plus",
            Rule::Eq => "eq",
            Rule::Neq => "neq",
            Rule::Exists(_) => "ex",
            Rule::Forall(_) => "all",
            Rule::Mu => "mu",
            Rule::Nu(..) => "nu",
            Rule::MuNu => "munu",
            Rule::Unfold => "unfold",
            Rule::Init => "init",
            Rule::Cut(..) => "cut",
            Rule::Contract => "contract",
            Rule::Weaken => "weaken",
            Rule::CNuNu(..) => "cnunu",
        }
    }

    /// Rules that act on the whole sequent rather than on one formula.
    pub fn is_whole_sequent(&self) -> bool {
        matches!(self, Rule::One | Rule::Eq | Rule::MuNu | Rule::Init | Rule::Cut(..))
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProofNode {
    pub rule: Rule,
    pub principal: usize,
    pub children: Vec<ProofNode>,
}

impl ProofNode {
    pub fn new(rule: Rule, principal: usize, children: Vec<ProofNode>) -> Self {
        ProofNode { rule, principal, children }
    }
    pub fn leaf(rule: Rule, principal: usize) -> Self {
        ProofNode { rule, principal, children: vec![] }
    }
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(ProofNode::size).sum::<usize>()
    }
    /// Pre-order walk with paths.
    pub fn visit<'a>(&'a self, path: &mut Vec<usize>, f: &mut impl FnMut(&[usize], &'a ProofNode)) {
        f(path, self);
        for (i, c) in self.children.iter().enumerate() {
            path.push(i);
            c.visit(path, f);
            path.pop();
        }
    }
    pub fn get_mut(&mut self, path: &[usize]) -> Option<&mut ProofNode> {
        match path.split_first() {
            None => Some(self),
            Some((i, rest)) => self.children.get_mut(*i)?.get_mut(rest),
        }
    }
    /// Replaces `?` and `!` in invariants and cut formulas by their
    /// fixed-point definitions, so the proof no longer needs `exp`.
    pub fn expand_exponentials(&self) -> ProofNode {
        let rule = match &self.rule {
            Rule::Nu(s, xs) => Rule::Nu(s.expand_exponentials(), xs.clone()),
            Rule::Cut(b, left) => Rule::Cut(b.expand_exponentials(), left.clone()),
            Rule::CNuNu(s, u, xs) => Rule::CNuNu(s.expand_exponentials(), u.expand_exponentials(), xs.clone()),
            r => r.clone(),
        };
        ProofNode::new(rule, self.principal, self.children.iter().map(ProofNode::expand_exponentials).collect())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckError {
    #[error("principal index {index} out of range for a sequent of {len} formulas")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("rule expects {expected} but the principal formula is {found}")]
    WrongConnective { expected: &'static str, found: String },
    #[error("rule expects {expected} premises, proof gives {found}")]
    ChildCount { expected: usize, found: usize },
    #[error("rule {0} is not available in mode {1}")]
    NotInMode(&'static str, &'static str),
    #[error("sequent is not an instance of the axiom: expected {expected}, found {found}")]
    NotAxiom { expected: &'static str, found: String },
    #[error("eigenvariable {0} is not fresh")]
    NotFresh(String),
    #[error("term {0} mentions variables outside the signature")]
    OutsideSignature(String),
    #[error("annotation {0} is not well formed")]
    IllFormed(String),
    #[error("invalid partition {0:?}")]
    BadPartition(Vec<usize>),
    #[error("arity mismatch: expected {expected}, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("invariant is {0}, but only P1 invariants are allowed")]
    NotSigma1(HierarchyClass),
    #[error("exponentials are not enabled")]
    Exponentials,
    #[error("the sigma1 restriction needs mode mulk or mulk+")]
    Sigma1Mode,
}

/// Where and why a proof was rejected.
#[derive(Clone, Debug, Serialize)]
pub struct CheckFailure {
    pub path: Vec<usize>,
    pub rule: String,
    pub sequent: String,
    pub message: String,
    #[serde(skip)]
    pub error: CheckError,
}

impl fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at {:?} ({}): {}\n  sequent: {}", self.path, self.rule, self.message, self.sequent)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: Option<String>,
    pub accepted: bool,
    pub nodes_checked: usize,
    pub failure: Option<CheckFailure>,
}

impl CheckReport {
    pub fn named(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }
}

/// Checks `proof` against `goal` using the default constructors `z` and `s`.
pub fn check(proof: &ProofNode, goal: &Sequent, rules: RuleSet) -> CheckReport {
    check_with(proof, goal, rules, &Constructors::new())
}

pub fn check_with(proof: &ProofNode, goal: &Sequent, rules: RuleSet, cons: &Constructors) -> CheckReport {
    let kernel = Kernel { rules, cons, nodes: 0 };
    kernel.run(proof, goal)
}

struct Kernel<'a> {
    rules: RuleSet,
    cons: &'a Constructors,
    nodes: usize,
}

type Step = Result<(), (Vec<usize>, String, String, CheckError)>;

impl Kernel<'_> {
    fn run(mut self, proof: &ProofNode, goal: &Sequent) -> CheckReport {
        let fail = |e: CheckError, goal: &Sequent| CheckReport {
            name: None,
            accepted: false,
            nodes_checked: 0,
            failure: Some(CheckFailure {
                path: vec![],
                rule: proof.rule.keyword().to_string(),
                sequent: goal.to_string(),
                message: e.to_string(),
                error: e,
            }),
        };
        if self.rules.sigma1 && !self.rules.mode.has_structural() {
            return fail(CheckError::Sigma1Mode, goal);
        }
        let goal = if self.rules.exp {
            Sequent::new(goal.sig.clone(), goal.formulas.iter().map(Formula::expand_exponentials).collect())
        } else {
            goal.clone()
        };
        if let Err(e) = self.well_formed(&goal) {
            return fail(e, &goal);
        }
        let mut path = Vec::new();
        match self.node(proof, &goal, &mut path) {
            Ok(()) => CheckReport { name: None, accepted: true, nodes_checked: self.nodes, failure: None },
            Err((path, rule, sequent, error)) => CheckReport {
                name: None,
                accepted: false,
                nodes_checked: self.nodes,
                failure: Some(CheckFailure { path, rule, sequent, message: error.to_string(), error }),
            },
        }
    }

    fn well_formed(&self, s: &Sequent) -> Result<(), CheckError> {
        for f in &s.formulas {
            self.formula_ok(f, &s.sig)?;
        }
        Ok(())
    }

    fn formula_ok(&self, f: &Formula, sig: &Signature) -> Result<(), CheckError> {
        if f.contains_exponentials() {
            return Err(CheckError::Exponentials);
        }
        if !f.is_locally_closed() {
            return Err(CheckError::IllFormed(f.to_string()));
        }
        if f.free_vars().iter().any(|x| !sig.contains(x)) {
            return Err(CheckError::OutsideSignature(f.to_string()));
        }
        Ok(())
    }

    fn annotation(&self, p: &Pred, sig: &Signature) -> Result<Pred, CheckError> {
        let p = if self.rules.exp { p.expand_exponentials() } else { p.clone() };
        if p.contains_exponentials() {
            return Err(CheckError::Exponentials);
        }
        let body = p.body_formula();
        if body.has_loose(p.arity() as u32, 0) {
            return Err(CheckError::IllFormed(format!("{p:?}")));
        }
        if let Some(x) = body.free_vars().into_iter().find(|x| !sig.contains(x)) {
            return Err(CheckError::OutsideSignature(x.to_string()));
        }
        Ok(p)
    }

    fn node(&mut self, n: &ProofNode, s: &Sequent, path: &mut Vec<usize>) -> Step {
        self.nodes += 1;
        let premises = self
            .premises(n, s)
            .map_err(|e| (path.clone(), n.rule.keyword().to_string(), s.to_string(), e))?;
        match premises {
            Premises::Expanded(macro_node) => self.node(&macro_node, s, path),
            Premises::List(ps) => {
                if ps.len() != n.children.len() {
                    let e = CheckError::ChildCount { expected: ps.len(), found: n.children.len() };
                    return Err((path.clone(), n.rule.keyword().to_string(), s.to_string(), e));
                }
                for (i, (c, p)) in n.children.iter().zip(ps.iter()).enumerate() {
                    path.push(i);
                    self.node(c, p, path)?;
                    path.pop();
                }
                Ok(())
            }
        }
    }

    fn principal<'s>(&self, n: &ProofNode, s: &'s Sequent) -> Result<&'s Formula, CheckError> {
        s.formulas
            .get(n.principal)
            .ok_or(CheckError::IndexOutOfRange { index: n.principal, len: s.formulas.len() })
    }

    fn require(&self, ok: bool, rule: &'static str) -> Result<(), CheckError> {
        if ok {
            Ok(())
        } else {
            Err(CheckError::NotInMode(rule, self.rules.mode.keyword()))
        }
    }

    fn premises(&self, n: &ProofNode, s: &Sequent) -> Result<Premises, CheckError> {
        use Formula as F;
        let i = n.principal;
        let wrong = |expected: &'static str, found: &Formula| CheckError::WrongConnective {
            expected,
            found: found.to_string(),
        };
        let same = |formulas: Vec<Formula>| Sequent::new(s.sig.clone(), formulas);
        let list = |v: Vec<Sequent>| Ok(Premises::List(v));
        match &n.rule {
            Rule::Tensor(left) => {
                let F::Tensor(b, c) = self.principal(n, s)? else {
                    return Err(wrong("a tensor", self.principal(n, s)?));
                };
                let (l, r) = split(s, left, Some(i))?;
                let l = l.into_iter().map(|j| if j == i { (**b).clone() } else { s.formulas[j].clone() });
                let r = r.into_iter().map(|j| if j == i { (**c).clone() } else { s.formulas[j].clone() });
                list(vec![same(l.collect()), same(r.collect())])
            }
            Rule::One => {
                if s.formulas.len() == 1 && s.formulas[0] == F::One {
                    list(vec![])
                } else {
                    Err(CheckError::NotAxiom { expected: "|- 1", found: s.to_string() })
                }
            }
            Rule::Par => match self.principal(n, s)? {
                F::Par(b, c) => list(vec![same(s.replace(i, vec![(**b).clone(), (**c).clone()]))]),
                f => Err(wrong("a par", f)),
            },
            Rule::Bot => match self.principal(n, s)? {
                F::Bot => list(vec![same(s.replace(i, vec![]))]),
                f => Err(wrong("bot", f)),
            },
            Rule::With => match self.principal(n, s)? {
                F::With(b, c) => list(vec![
                    same(s.replace(i, vec![(**b).clone()])),
                    same(s.replace(i, vec![(**c).clone()])),
                ]),
                f => Err(wrong("a with", f)),
            },
            Rule::Top => match self.principal(n, s)? {
                F::Top => list(vec![]),
                f => Err(wrong("top", f)),
            },
            Rule::Plus(side) => match self.principal(n, s)? {
                F::Plus(b, c) => {
                    let chosen = if *side == Side::Left { b } else { c };
                    list(vec![same(s.replace(i, vec![(**chosen).clone()]))])
                }
                f => Err(wrong("a plus", f)),
            },
            Rule::Eq => match s.formulas.as_slice() {
                [F::Eq(t, u)] if t == u => list(vec![]),
                _ => Err(CheckError::NotAxiom { expected: "|- t = t", found: s.to_string() }),
            },
            Rule::Neq => match self.principal(n, s)? {
                F::Neq(t, u) => match mgu(t, u) {
                    None => list(vec![]),
                    Some(theta) => {
                        let rest = s.replace(i, vec![]).iter().map(|f| f.subst(&theta)).collect();
                        list(vec![Sequent::new(s.sig.update(&theta), rest)])
                    }
                },
                f => Err(wrong("a disequality", f)),
            },
            Rule::Exists(t) => match self.principal(n, s)? {
                F::Exists(_, b) => {
                    if !t.is_locally_closed() || !self.cons.well_formed(t) {
                        return Err(CheckError::IllFormed(format!("{t:?}")));
                    }
                    if t.free_vars().iter().any(|x| !s.sig.contains(x)) {
                        return Err(CheckError::OutsideSignature(format!("{t:?}")));
                    }
                    list(vec![same(s.replace(i, vec![b.open(t)]))])
                }
                f => Err(wrong("an existential", f)),
            },
            Rule::Forall(y) => match self.principal(n, s)? {
                F::Forall(_, b) => {
                    if s.sig.contains(y) || self.cons.arity(y).is_some() {
                        return Err(CheckError::NotFresh(y.to_string()));
                    }
                    let f = b.open(&Term::Var(y.clone()));
                    list(vec![Sequent::new(s.sig.with(y.clone()), s.replace(i, vec![f]))])
                }
                f => Err(wrong("a universal", f)),
            },
            Rule::Mu => match self.principal(n, s)? {
                F::Mu(b, args) => {
                    let f = b.instantiate(&Pred::Fix(FixKind::Mu, b.clone()), args).map_err(arity)?;
                    list(vec![same(s.replace(i, vec![f]))])
                }
                f => Err(wrong("a least fixed point", f)),
            },
            Rule::Unfold => {
                self.require(self.rules.mode.has_unfold_init(), "unfold")?;
                match self.principal(n, s)? {
                    F::Nu(b, args) => {
                        let f = b.instantiate(&Pred::Fix(FixKind::Nu, b.clone()), args).map_err(arity)?;
                        list(vec![same(s.replace(i, vec![f]))])
                    }
                    f => Err(wrong("a greatest fixed point", f)),
                }
            }
            Rule::Nu(inv, xs) => match self.principal(n, s)? {
                F::Nu(b, args) => {
                    let inv = self.invariant(inv, b.arity(), &s.sig)?;
                    let xs = eigenvariables(xs, b.arity(), &s.sig, self.cons)?;
                    let xv: Vec<Term> = xs.iter().map(|x| Term::Var(x.clone())).collect();
                    let first = same(s.replace(i, vec![inv.apply(args).map_err(arity)?]));
                    let mut sig2 = s.sig.clone();
                    xs.iter().for_each(|x| {
                        sig2.insert(x.clone());
                    });
                    let second = Sequent::new(
                        sig2,
                        vec![b.instantiate(&inv, &xv).map_err(arity)?, inv.apply(&xv).map_err(arity)?.dual()],
                    );
                    list(vec![first, second])
                }
                f => Err(wrong("a greatest fixed point", f)),
            },
            Rule::MuNu => match s.formulas.as_slice() {
                [F::Mu(b, t), F::Nu(c, u)] | [F::Nu(c, u), F::Mu(b, t)] if t == u && **c == b.dual() => {
                    list(vec![])
                }
                _ => Err(CheckError::NotAxiom { expected: "|- mu B t, nu dual(B) t", found: s.to_string() }),
            },
            Rule::Init => {
                self.require(self.rules.mode.has_unfold_init(), "init")?;
                match s.formulas.as_slice() {
                    [a, b] if *b == a.dual() => list(vec![]),
                    _ => Err(CheckError::NotAxiom { expected: "|- B, dual(B)", found: s.to_string() }),
                }
            }
            Rule::Cut(b, left) => {
                self.require(self.rules.mode.has_cut(), "cut")?;
                let b = if self.rules.exp { b.expand_exponentials() } else { b.clone() };
                self.formula_ok(&b, &s.sig)?;
                let (l, r) = split(s, left, None)?;
                let mut l: Vec<Formula> = l.into_iter().map(|j| s.formulas[j].clone()).collect();
                let mut r: Vec<Formula> = r.into_iter().map(|j| s.formulas[j].clone()).collect();
                r.push(b.dual());
                l.push(b);
                list(vec![same(l), same(r)])
            }
            Rule::Contract => {
                self.require(self.rules.mode.has_structural(), "contract")?;
                let f = self.principal(n, s)?.clone();
                let mut fs = s.formulas.clone();
                fs.insert(i + 1, f);
                list(vec![same(fs)])
            }
            Rule::Weaken => {
                self.require(self.rules.mode.has_structural(), "weaken")?;
                self.principal(n, s)?;
                list(vec![same(s.replace(i, vec![]))])
            }
            Rule::CNuNu(..) => {
                self.require(self.rules.mode.has_structural(), "cnunu")?;
                Ok(Premises::Expanded(expand_cnunu(n)?))
            }
        }
    }

    fn invariant(&self, inv: &Pred, arity_needed: usize, sig: &Signature) -> Result<Pred, CheckError> {
        if inv.arity() != arity_needed {
            return Err(CheckError::Arity { expected: arity_needed, found: inv.arity() });
        }
        let inv = self.annotation(inv, sig)?;
        if self.rules.sigma1 {
            let class = inv.body_formula().classify().map_err(|_| CheckError::IllFormed(format!("{inv:?}")))?;
            if class != HierarchyClass::p(1) {
                return Err(CheckError::NotSigma1(class));
            }
        }
        Ok(inv)
    }
}

/// `Cνν` as the contraction and two `ν` rules it abbreviates.
pub fn expand_cnunu(n: &ProofNode) -> Result<ProofNode, CheckError> {
    let Rule::CNuNu(sv, uv, xs) = &n.rule else {
        return Err(CheckError::WrongConnective { expected: "a cnunu node", found: n.rule.keyword().to_string() });
    };
    if n.children.len() != 3 {
        return Err(CheckError::ChildCount { expected: 3, found: n.children.len() });
    }
    let i = n.principal;
    let [c0, c1, c2] = [&n.children[0], &n.children[1], &n.children[2]].map(Clone::clone);
    let inner = ProofNode::new(Rule::Nu(uv.clone(), xs.clone()), i + 1, vec![c0, c1]);
    let outer = ProofNode::new(Rule::Nu(sv.clone(), xs.clone()), i, vec![inner, c2]);
    Ok(ProofNode::new(Rule::Contract, i, vec![outer]))
}

/// The premises the kernel computes for one rule application, without
/// looking at the children. `cnunu` must be expanded first.
pub fn rule_premises(
    n: &ProofNode,
    s: &Sequent,
    rules: RuleSet,
    cons: &Constructors,
) -> Result<Vec<Sequent>, CheckError> {
    let kernel = Kernel { rules, cons, nodes: 0 };
    match kernel.premises(n, s)? {
        Premises::List(ps) => Ok(ps),
        Premises::Expanded(_) => Err(CheckError::WrongConnective { expected: "a primitive rule", found: "cnunu".into() }),
    }
}

enum Premises {
    List(Vec<Sequent>),
    Expanded(ProofNode),
}

fn arity(e: crate::formula::FormulaError) -> CheckError {
    match e {
        crate::formula::FormulaError::Arity { expected, found } => CheckError::Arity { expected, found },
        other => CheckError::IllFormed(other.to_string()),
    }
}

/// Splits the indices of `s` into the left premise (the listed ones) and the
/// right one. The principal, when present, goes to both.
fn split(s: &Sequent, left: &[usize], principal: Option<usize>) -> Result<(Vec<usize>, Vec<usize>), CheckError> {
    let len = s.formulas.len();
    let mut seen = vec![false; len];
    for &j in left {
        if j >= len || Some(j) == principal || seen[j] {
            return Err(CheckError::BadPartition(left.to_vec()));
        }
        seen[j] = true;
    }
    let l = (0..len).filter(|&j| seen[j] || Some(j) == principal).collect();
    let r = (0..len).filter(|&j| !seen[j]).collect();
    Ok((l, r))
}

fn eigenvariables(given: &[Name], n: usize, sig: &Signature, cons: &Constructors) -> Result<Vec<Name>, CheckError> {
    if given.is_empty() {
        let mut sig = sig.clone();
        return Ok((0..n)
            .map(|_| {
                let x = sig.fresh("x");
                sig.insert(x.clone());
                x
            })
            .collect());
    }
    if given.len() != n {
        return Err(CheckError::Arity { expected: n, found: given.len() });
    }
    for (k, x) in given.iter().enumerate() {
        if sig.contains(x) || given[..k].contains(x) || cons.arity(x).is_some() {
            return Err(CheckError::NotFresh(x.to_string()));
        }
    }
    Ok(given.to_vec())
}

/// Convenience for tests and builders.
pub fn names(xs: &[&str]) -> Vec<Name> {
    xs.iter().map(|x| name(x)).collect()
}
