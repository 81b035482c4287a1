//! Polarized formulas: De Morgan duality, fixed-point bodies and their
//! instantiation, polarity, the P/N hierarchy and the fixed-point encoding of
//! the exponentials.
//!
//! Two independent de Bruijn index spaces are used: term indices are bound by
//! quantifiers, fixed-point parameters and abstraction parameters; predicate
//! indices are bound only by fixed-point bodies.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use indexmap::IndexSet;
use thiserror::Error;

use crate::term::{Hint, Name, Substitution, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FixKind {
    Mu,
    Nu,
}

impl FixKind {
    pub fn dual(self) -> FixKind {
        match self {
            FixKind::Mu => FixKind::Nu,
            FixKind::Nu => FixKind::Mu,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Tensor(Box<Formula>, Box<Formula>),
    One,
    Par(Box<Formula>, Box<Formula>),
    Bot,
    With(Box<Formula>, Box<Formula>),
    Top,
    Plus(Box<Formula>, Box<Formula>),
    Zero,
    Eq(Term, Term),
    Neq(Term, Term),
    Forall(Hint, Box<Formula>),
    Exists(Hint, Box<Formula>),
    Mu(Arc<Body>, Vec<Term>),
    Nu(Arc<Body>, Vec<Term>),
    /// Predicate variable (de Bruijn index into enclosing fixed-point
    /// bodies) applied to its arguments.
    Var(u32, Vec<Term>),
    Bang(Box<Formula>),
    Quest(Box<Formula>),
}

/// `λp λx₁…xₙ. C`: the body of a fixed point of arity `n`.
#[derive(Clone)]
pub struct Body {
    pub pred: Hint,
    pub params: Vec<Hint>,
    pub formula: Formula,
    closed: bool,
    has_vars: bool,
}

impl Body {
    pub fn new(pred: Hint, params: Vec<Hint>, formula: Formula) -> Self {
        let closed = !formula.has_loose(params.len() as u32, 1);
        let has_vars = formula.mentions_vars();
        Body { pred, params, formula, closed, has_vars }
    }

    pub fn arity(&self) -> usize {
        self.params.len()
    }

    /// No index escapes the body's own binders.
    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn has_free_vars(&self) -> bool {
        self.has_vars
    }

    /// `λp λx̄. C̄`; the predicate variable is kept.
    pub fn dual(&self) -> Body {
        Body::new(self.pred.clone(), self.params.clone(), self.formula.dual())
    }

    /// Substitutes `pred` for the bound predicate variable and `args` for the
    /// parameters.
    pub fn instantiate(&self, pred: &Pred, args: &[Term]) -> Result<Formula, FormulaError> {
        if pred.arity() != self.arity() {
            return Err(FormulaError::Arity { expected: self.arity(), found: pred.arity() });
        }
        if args.len() != self.arity() {
            return Err(FormulaError::Arity { expected: self.arity(), found: args.len() });
        }
        Ok(self.formula.rewrite(&Inst { args, pred: Some(pred) }, 0, 0))
    }
}

impl PartialEq for Body {
    fn eq(&self, other: &Self) -> bool {
        self.params.len() == other.params.len() && self.formula == other.formula
    }
}

impl Eq for Body {}

impl Hash for Body {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.params.len().hash(state);
        self.formula.hash(state);
    }
}

/// `λx₁…xₙ. C`: a predicate abstraction, used for invariants and
/// non-recursive definitions.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Abstraction {
    pub params: Vec<Hint>,
    pub formula: Formula,
}

/// A predicate expression of type ι → … → ι → o.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Pred {
    Fix(FixKind, Arc<Body>),
    Lam(Arc<Abstraction>),
}

impl Pred {
    pub fn mu(body: Body) -> Pred {
        Pred::Fix(FixKind::Mu, Arc::new(body))
    }

    pub fn nu(body: Body) -> Pred {
        Pred::Fix(FixKind::Nu, Arc::new(body))
    }

    pub fn lam(params: Vec<Hint>, formula: Formula) -> Pred {
        Pred::Lam(Arc::new(Abstraction { params, formula }))
    }

    pub fn arity(&self) -> usize {
        match self {
            Pred::Fix(_, b) => b.arity(),
            Pred::Lam(a) => a.params.len(),
        }
    }

    pub fn param_hints(&self) -> &[Hint] {
        match self {
            Pred::Fix(_, b) => &b.params,
            Pred::Lam(a) => &a.params,
        }
    }

    /// β-reduces the predicate applied to `args`.
    pub fn apply(&self, args: &[Term]) -> Result<Formula, FormulaError> {
        if args.len() != self.arity() {
            return Err(FormulaError::Arity { expected: self.arity(), found: args.len() });
        }
        Ok(self.apply_unchecked(args))
    }

    fn apply_unchecked(&self, args: &[Term]) -> Formula {
        match self {
            Pred::Fix(FixKind::Mu, b) => Formula::Mu(b.clone(), args.to_vec()),
            Pred::Fix(FixKind::Nu, b) => Formula::Nu(b.clone(), args.to_vec()),
            Pred::Lam(a) => a.formula.rewrite(&Inst { args, pred: None }, 0, 0),
        }
    }

    pub fn dual(&self) -> Pred {
        match self {
            Pred::Fix(k, b) => Pred::Fix(k.dual(), Arc::new(b.dual())),
            Pred::Lam(a) => Pred::lam(a.params.clone(), a.formula.dual()),
        }
    }

    /// Shifts loose term indices by `dt` and loose predicate indices by `dp`.
    pub fn shift(&self, dt: u32, dp: u32) -> Pred {
        if dt == 0 && dp == 0 {
            return self.clone();
        }
        match self {
            Pred::Fix(k, b) => {
                if b.closed {
                    return self.clone();
                }
                let f = b.formula.rewrite(&Shift { dt, dp }, b.arity() as u32, 1);
                Pred::Fix(*k, Arc::new(Body::new(b.pred.clone(), b.params.clone(), f)))
            }
            Pred::Lam(a) => {
                let f = a.formula.rewrite(&Shift { dt, dp }, a.params.len() as u32, 0);
                Pred::lam(a.params.clone(), f)
            }
        }
    }

    /// The predicate applied to fresh parameters, i.e. its body as a formula
    /// with the parameters loose.
    pub fn body_formula(&self) -> Formula {
        let n = self.arity() as u32;
        let args: Vec<Term> = (0..n).map(|i| Term::Bound(n - 1 - i)).collect();
        self.apply_unchecked(&args)
    }

    pub fn free_vars(&self) -> Vec<Name> {
        self.body_formula().free_vars()
    }

    pub fn subst(&self, theta: &Substitution) -> Pred {
        match self {
            Pred::Fix(k, b) => {
                if !b.has_vars || theta.is_empty() {
                    return self.clone();
                }
                let f = b.formula.rewrite(&Subst(theta), b.arity() as u32, 1);
                Pred::Fix(*k, Arc::new(Body::new(b.pred.clone(), b.params.clone(), f)))
            }
            Pred::Lam(a) => Pred::lam(a.params.clone(), a.formula.subst(theta)),
        }
    }

    pub fn contains_exponentials(&self) -> bool {
        match self {
            Pred::Fix(_, b) => b.formula.contains_exponentials(),
            Pred::Lam(a) => a.formula.contains_exponentials(),
        }
    }

    pub fn expand_exponentials(&self) -> Pred {
        match self {
            Pred::Fix(k, b) => Pred::Fix(
                *k,
                Arc::new(Body::new(b.pred.clone(), b.params.clone(), b.formula.expand_exponentials())),
            ),
            Pred::Lam(a) => Pred::lam(a.params.clone(), a.formula.expand_exponentials()),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("arity mismatch: expected {expected}, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("predicate variable #{0} is not bound by any fixed point")]
    UnboundPredVar(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarity {
    Pos,
    Neg,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Pos => Polarity::Neg,
            Polarity::Neg => Polarity::Pos,
        }
    }
}

/// Membership in `P_n` or `N_n` with the least such `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HierarchyClass {
    pub side: Polarity,
    pub level: u32,
}

impl HierarchyClass {
    pub fn p(level: u32) -> Self {
        HierarchyClass { side: Polarity::Pos, level }
    }

    pub fn n(level: u32) -> Self {
        HierarchyClass { side: Polarity::Neg, level }
    }
}

impl fmt::Display for HierarchyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = match self.side {
            Polarity::Pos => 'P',
            Polarity::Neg => 'N',
        };
        write!(f, "{side}{}", self.level)
    }
}

/// Structural rewriting of the leaves of a formula, with the current binder
/// depths threaded through.
pub(crate) trait Rewrite {
    fn term(&self, t: &Term, td: u32) -> Term;
    fn pred_var(&self, k: u32, args: Vec<Term>, td: u32, pd: u32) -> Formula;
    fn touches(&self, body: &Body) -> bool;
}

struct Shift {
    dt: u32,
    dp: u32,
}

impl Rewrite for Shift {
    fn term(&self, t: &Term, td: u32) -> Term {
        t.shift(self.dt, td)
    }
    fn pred_var(&self, k: u32, args: Vec<Term>, _td: u32, pd: u32) -> Formula {
        Formula::Var(if k >= pd { k + self.dp } else { k }, args)
    }
    fn touches(&self, body: &Body) -> bool {
        !body.closed
    }
}

struct Inst<'a> {
    args: &'a [Term],
    pred: Option<&'a Pred>,
}

impl Rewrite for Inst<'_> {
    fn term(&self, t: &Term, td: u32) -> Term {
        if self.args.is_empty() {
            t.clone()
        } else {
            t.instantiate(td, self.args)
        }
    }
    fn pred_var(&self, k: u32, args: Vec<Term>, td: u32, pd: u32) -> Formula {
        match self.pred {
            None => Formula::Var(k, args),
            Some(_) if k < pd => Formula::Var(k, args),
            Some(p) if k == pd => p.shift(td, pd).apply_unchecked(&args),
            Some(_) => Formula::Var(k - 1, args),
        }
    }
    fn touches(&self, body: &Body) -> bool {
        !body.closed
    }
}

struct Subst<'a>(&'a Substitution);

impl Rewrite for Subst<'_> {
    fn term(&self, t: &Term, _td: u32) -> Term {
        t.apply(self.0)
    }
    fn pred_var(&self, k: u32, args: Vec<Term>, _td: u32, _pd: u32) -> Formula {
        Formula::Var(k, args)
    }
    fn touches(&self, body: &Body) -> bool {
        body.has_vars
    }
}

struct Abstract<'a>(&'a str);

impl Rewrite for Abstract<'_> {
    fn term(&self, t: &Term, td: u32) -> Term {
        t.abstract_var(self.0, td)
    }
    fn pred_var(&self, k: u32, args: Vec<Term>, _td: u32, _pd: u32) -> Formula {
        Formula::Var(k, args)
    }
    fn touches(&self, body: &Body) -> bool {
        body.has_vars || !body.closed
    }
}

fn bx(f: Formula) -> Box<Formula> {
    Box::new(f)
}

impl Formula {
    pub fn tensor(a: Formula, b: Formula) -> Formula {
        Formula::Tensor(bx(a), bx(b))
    }
    pub fn par(a: Formula, b: Formula) -> Formula {
        Formula::Par(bx(a), bx(b))
    }
    pub fn with(a: Formula, b: Formula) -> Formula {
        Formula::With(bx(a), bx(b))
    }
    pub fn plus(a: Formula, b: Formula) -> Formula {
        Formula::Plus(bx(a), bx(b))
    }
    pub fn forall(hint: &str, body: Formula) -> Formula {
        Formula::Forall(Hint::new(hint), bx(body))
    }
    pub fn exists(hint: &str, body: Formula) -> Formula {
        Formula::Exists(Hint::new(hint), bx(body))
    }
    pub fn bang(a: Formula) -> Formula {
        Formula::Bang(bx(a))
    }
    pub fn quest(a: Formula) -> Formula {
        Formula::Quest(bx(a))
    }
    /// `A ⊸ B`, i.e. `Ā ⅋ B`.
    pub fn lolli(a: Formula, b: Formula) -> Formula {
        Formula::par(a.dual(), b)
    }

    /// `∀x. B` where `x` is a free variable of `body`.
    pub fn forall_var(x: &str, body: &Formula) -> Formula {
        Formula::Forall(Hint::new(x), bx(body.abstract_var(x)))
    }

    pub fn exists_var(x: &str, body: &Formula) -> Formula {
        Formula::Exists(Hint::new(x), bx(body.abstract_var(x)))
    }

    pub(crate) fn rewrite<R: Rewrite>(&self, r: &R, td: u32, pd: u32) -> Formula {
        use Formula::*;
        match self {
            Tensor(a, b) => Tensor(bx(a.rewrite(r, td, pd)), bx(b.rewrite(r, td, pd))),
            Par(a, b) => Par(bx(a.rewrite(r, td, pd)), bx(b.rewrite(r, td, pd))),
            With(a, b) => With(bx(a.rewrite(r, td, pd)), bx(b.rewrite(r, td, pd))),
            Plus(a, b) => Plus(bx(a.rewrite(r, td, pd)), bx(b.rewrite(r, td, pd))),
            One | Bot | Top | Zero => self.clone(),
            Eq(t, u) => Eq(r.term(t, td), r.term(u, td)),
            Neq(t, u) => Neq(r.term(t, td), r.term(u, td)),
            Forall(h, b) => Forall(h.clone(), bx(b.rewrite(r, td + 1, pd))),
            Exists(h, b) => Exists(h.clone(), bx(b.rewrite(r, td + 1, pd))),
            Mu(body, args) | Nu(body, args) => {
                let args = args.iter().map(|t| r.term(t, td)).collect();
                let body = if r.touches(body) {
                    let f = body.formula.rewrite(r, td + body.arity() as u32, pd + 1);
                    Arc::new(Body::new(body.pred.clone(), body.params.clone(), f))
                } else {
                    body.clone()
                };
                if matches!(self, Mu(..)) {
                    Mu(body, args)
                } else {
                    Nu(body, args)
                }
            }
            Var(k, args) => {
                let args = args.iter().map(|t| r.term(t, td)).collect();
                r.pred_var(*k, args, td, pd)
            }
            Bang(a) => Bang(bx(a.rewrite(r, td, pd))),
            Quest(a) => Quest(bx(a.rewrite(r, td, pd))),
        }
    }

    /// Instantiates the outermost binder of a quantifier body with `t`.
    pub fn open(&self, t: &Term) -> Formula {
        self.rewrite(&Inst { args: std::slice::from_ref(t), pred: None }, 0, 0)
    }

    /// Instantiates several term binders at once (the last argument fills the
    /// innermost binder).
    pub fn open_many(&self, args: &[Term]) -> Formula {
        self.rewrite(&Inst { args, pred: None }, 0, 0)
    }

    pub fn shift(&self, dt: u32, dp: u32) -> Formula {
        if dt == 0 && dp == 0 {
            return self.clone();
        }
        self.rewrite(&Shift { dt, dp }, 0, 0)
    }

    /// Applies a substitution of free variables.
    pub fn subst(&self, theta: &Substitution) -> Formula {
        if theta.is_empty() {
            return self.clone();
        }
        self.rewrite(&Subst(theta), 0, 0)
    }

    /// Turns the free variable `x` into a loose index 0 (shifting other loose
    /// indices up by one), ready to be wrapped in a binder.
    pub fn abstract_var(&self, x: &str) -> Formula {
        self.rewrite(&Abstract(x), 0, 0)
    }

    /// True when some term index escapes `td` binders or some predicate index
    /// escapes `pd` binders.
    pub fn has_loose(&self, td: u32, pd: u32) -> bool {
        use Formula::*;
        match self {
            Tensor(a, b) | Par(a, b) | With(a, b) | Plus(a, b) => a.has_loose(td, pd) || b.has_loose(td, pd),
            One | Bot | Top | Zero => false,
            Eq(t, u) | Neq(t, u) => t.has_loose(td) || u.has_loose(td),
            Forall(_, b) | Exists(_, b) => b.has_loose(td + 1, pd),
            Mu(body, args) | Nu(body, args) => {
                args.iter().any(|t| t.has_loose(td))
                    || (!body.closed && body.formula.has_loose(td + body.arity() as u32, pd + 1))
            }
            Var(k, args) => *k >= pd || args.iter().any(|t| t.has_loose(td)),
            Bang(a) | Quest(a) => a.has_loose(td, pd),
        }
    }

    pub fn is_locally_closed(&self) -> bool {
        !self.has_loose(0, 0)
    }

    fn mentions_vars(&self) -> bool {
        use Formula::*;
        let t_has = |t: &Term| t.has_vars();
        match self {
            Tensor(a, b) | Par(a, b) | With(a, b) | Plus(a, b) => a.mentions_vars() || b.mentions_vars(),
            One | Bot | Top | Zero => false,
            Eq(t, u) | Neq(t, u) => t_has(t) || t_has(u),
            Forall(_, b) | Exists(_, b) => b.mentions_vars(),
            Mu(body, args) | Nu(body, args) => body.has_vars || args.iter().any(t_has),
            Var(_, args) => args.iter().any(t_has),
            Bang(a) | Quest(a) => a.mentions_vars(),
        }
    }

    /// Free term variables, in order of first occurrence.
    pub fn free_vars(&self) -> Vec<Name> {
        let mut out = IndexSet::new();
        self.collect_vars(&mut out);
        out.into_iter().collect()
    }

    pub(crate) fn collect_vars(&self, out: &mut IndexSet<Name>) {
        use Formula::*;
        match self {
            Tensor(a, b) | Par(a, b) | With(a, b) | Plus(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            One | Bot | Top | Zero => {}
            Eq(t, u) | Neq(t, u) => {
                t.collect_vars(out);
                u.collect_vars(out);
            }
            Forall(_, b) | Exists(_, b) => b.collect_vars(out),
            Mu(body, args) | Nu(body, args) => {
                if body.has_vars {
                    body.formula.collect_vars(out);
                }
                args.iter().for_each(|t| t.collect_vars(out));
            }
            Var(_, args) => args.iter().for_each(|t| t.collect_vars(out)),
            Bang(a) | Quest(a) => a.collect_vars(out),
        }
    }

    /// De Morgan dual. Predicate variables are kept as they are.
    pub fn dual(&self) -> Formula {
        use Formula::*;
        match self {
            Tensor(a, b) => Par(bx(a.dual()), bx(b.dual())),
            Par(a, b) => Tensor(bx(a.dual()), bx(b.dual())),
            With(a, b) => Plus(bx(a.dual()), bx(b.dual())),
            Plus(a, b) => With(bx(a.dual()), bx(b.dual())),
            One => Bot,
            Bot => One,
            Top => Zero,
            Zero => Top,
            Eq(t, u) => Neq(t.clone(), u.clone()),
            Neq(t, u) => Eq(t.clone(), u.clone()),
            Forall(h, b) => Exists(h.clone(), bx(b.dual())),
            Exists(h, b) => Forall(h.clone(), bx(b.dual())),
            Mu(body, args) => Nu(Arc::new(body.dual()), args.clone()),
            Nu(body, args) => Mu(Arc::new(body.dual()), args.clone()),
            Var(k, args) => Var(*k, args.clone()),
            Bang(a) => Quest(bx(a.dual())),
            Quest(a) => Bang(bx(a.dual())),
        }
    }

    /// Polarity of the top connective. A bare predicate variable takes the
    /// polarity of its binder, which `binders` supplies (innermost last).
    pub fn polarity_in(&self, binders: &[FixKind]) -> Result<Polarity, FormulaError> {
        use Formula::*;
        Ok(match self {
            Tensor(..) | One | Plus(..) | Zero | Eq(..) | Exists(..) | Mu(..) | Quest(..) => Polarity::Pos,
            Par(..) | Bot | With(..) | Top | Neq(..) | Forall(..) | Nu(..) | Bang(..) => Polarity::Neg,
            Var(k, _) => {
                let k = *k as usize;
                if k >= binders.len() {
                    return Err(FormulaError::UnboundPredVar(k as u32));
                }
                match binders[binders.len() - 1 - k] {
                    FixKind::Mu => Polarity::Pos,
                    FixKind::Nu => Polarity::Neg,
                }
            }
        })
    }

    pub fn polarity(&self) -> Result<Polarity, FormulaError> {
        self.polarity_in(&[])
    }

    /// Least class of the hierarchy containing the formula. Exponentials are
    /// classified through their fixed-point encoding.
    pub fn classify(&self) -> Result<HierarchyClass, FormulaError> {
        self.classify_in(&mut Vec::new())
    }

    pub fn classify_in(&self, binders: &mut Vec<FixKind>) -> Result<HierarchyClass, FormulaError> {
        if self.contains_exponentials() {
            return self.expand_exponentials().classify_in(binders);
        }
        let side = self.polarity_in(binders)?;
        let level = self.level(side, binders)?;
        Ok(HierarchyClass { side, level })
    }

    fn level(&self, side: Polarity, binders: &mut Vec<FixKind>) -> Result<u32, FormulaError> {
        use Formula::*;
        let child = |c: &Formula, binders: &mut Vec<FixKind>| -> Result<u32, FormulaError> {
            let p = c.polarity_in(binders)?;
            let l = c.level(p, binders)?;
            Ok(if p == side { l } else { l + 1 })
        };
        match self {
            Tensor(a, b) | Par(a, b) | With(a, b) | Plus(a, b) => Ok(child(a, binders)?.max(child(b, binders)?)),
            Forall(_, b) | Exists(_, b) | Bang(b) | Quest(b) => child(b, binders),
            Mu(body, _) | Nu(body, _) => {
                binders.push(if matches!(self, Mu(..)) { FixKind::Mu } else { FixKind::Nu });
                let l = child(&body.formula, binders);
                binders.pop();
                l
            }
            One | Bot | Top | Zero | Eq(..) | Neq(..) | Var(..) => Ok(1),
        }
    }

    pub fn contains_exponentials(&self) -> bool {
        use Formula::*;
        match self {
            Bang(_) | Quest(_) => true,
            Tensor(a, b) | Par(a, b) | With(a, b) | Plus(a, b) => {
                a.contains_exponentials() || b.contains_exponentials()
            }
            Forall(_, b) | Exists(_, b) => b.contains_exponentials(),
            Mu(body, _) | Nu(body, _) => body.formula.contains_exponentials(),
            _ => false,
        }
    }

    /// Replaces `?P` by `µp. ⊥ ⊕ (p ⅋ p) ⊕ P` and `!P` by its dual
    /// `νp. 1 & (p ⊗ p) & P`, innermost first.
    pub fn expand_exponentials(&self) -> Formula {
        use Formula::*;
        if !self.contains_exponentials() {
            return self.clone();
        }
        match self {
            Tensor(a, b) => Formula::tensor(a.expand_exponentials(), b.expand_exponentials()),
            Par(a, b) => Formula::par(a.expand_exponentials(), b.expand_exponentials()),
            With(a, b) => Formula::with(a.expand_exponentials(), b.expand_exponentials()),
            Plus(a, b) => Formula::plus(a.expand_exponentials(), b.expand_exponentials()),
            Forall(h, b) => Forall(h.clone(), bx(b.expand_exponentials())),
            Exists(h, b) => Exists(h.clone(), bx(b.expand_exponentials())),
            Mu(body, args) | Nu(body, args) => {
                let f = body.formula.expand_exponentials();
                let body = Arc::new(Body::new(body.pred.clone(), body.params.clone(), f));
                if matches!(self, Mu(..)) {
                    Mu(body, args.clone())
                } else {
                    Nu(body, args.clone())
                }
            }
            Quest(a) => Mu(Arc::new(quest_body(&a.expand_exponentials())), vec![]),
            Bang(a) => Nu(Arc::new(bang_body(&a.expand_exponentials())), vec![]),
            _ => self.clone(),
        }
    }

    /// Visits every term occurrence, including those inside fixed-point
    /// bodies.
    pub fn for_each_term(&self, f: &mut impl FnMut(&Term)) {
        use Formula::*;
        match self {
            Tensor(a, b) | Par(a, b) | With(a, b) | Plus(a, b) => {
                a.for_each_term(f);
                b.for_each_term(f);
            }
            One | Bot | Top | Zero => {}
            Eq(t, u) | Neq(t, u) => {
                f(t);
                f(u);
            }
            Forall(_, b) | Exists(_, b) | Bang(b) | Quest(b) => b.for_each_term(f),
            Mu(body, args) | Nu(body, args) => {
                body.formula.for_each_term(f);
                args.iter().for_each(&mut *f);
            }
            Var(_, args) => args.iter().for_each(f),
        }
    }

    pub fn size(&self) -> usize {
        use Formula::*;
        match self {
            Tensor(a, b) | Par(a, b) | With(a, b) | Plus(a, b) => 1 + a.size() + b.size(),
            Forall(_, b) | Exists(_, b) | Bang(b) | Quest(b) => 1 + b.size(),
            Mu(body, args) | Nu(body, args) => 1 + body.formula.size() + args.len(),
            Var(_, args) => 1 + args.len(),
            _ => 1,
        }
    }
}

/// Body of `?P`: `λp. ⊥ ⊕ (p ⅋ p) ⊕ P`. `p` must not occur in `P`.
pub fn quest_body(p: &Formula) -> Body {
    let inner = p.shift(0, 1);
    let pv = || Formula::Var(0, vec![]);
    Body::new(
        Hint::new("q"),
        vec![],
        Formula::plus(Formula::Bot, Formula::plus(Formula::par(pv(), pv()), inner)),
    )
}

/// Body of `!P`: `λp. 1 & (p ⊗ p) & P`.
pub fn bang_body(p: &Formula) -> Body {
    quest_body(&p.dual()).dual()
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::syntax::printer::Printer::new().formula(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::syntax::printer::Printer::new().formula(self))
    }
}

impl fmt::Debug for Body {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", Formula::Mu(Arc::new(self.clone()), vec![]))
    }
}

impl fmt::Debug for Pred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::syntax::printer::Printer::new().pred(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::numeral;

    fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    /// λp λx. x = z ⊕ ∃y. x = s (s y) ⊗ p y
    fn sample_body() -> Body {
        Body::new(
            Hint::new("p"),
            vec![Hint::new("x")],
            Formula::plus(
                eq(Term::Bound(0), Term::zero()),
                Formula::exists(
                    "y",
                    Formula::tensor(
                        eq(Term::Bound(1), Term::succ(Term::succ(Term::Bound(0)))),
                        Formula::Var(0, vec![Term::Bound(0)]),
                    ),
                ),
            ),
        )
    }

    #[test]
    fn dual_keeps_predicate_variable() {
        let d = sample_body().dual();
        let expected = Formula::with(
            Formula::Neq(Term::Bound(0), Term::zero()),
            Formula::forall(
                "y",
                Formula::par(
                    Formula::Neq(Term::Bound(1), Term::succ(Term::succ(Term::Bound(0)))),
                    Formula::Var(0, vec![Term::Bound(0)]),
                ),
            ),
        );
        assert_eq!(d.formula, expected);
        assert_eq!(Formula::One.dual(), Formula::Bot);
    }

    #[test]
    fn body_flags() {
        let b = sample_body();
        assert!(b.is_closed());
        assert!(!b.has_free_vars());
        let open = Body::new(Hint::new("p"), vec![], Formula::Var(1, vec![]));
        assert!(!open.is_closed());
        let with_var = Body::new(Hint::new("p"), vec![], eq(Term::var("x"), Term::zero()));
        assert!(with_var.has_free_vars());
    }

    #[test]
    fn unfolding_instantiates_parameters() {
        let b = Arc::new(sample_body());
        let mu = Pred::Fix(FixKind::Mu, b.clone());
        let out = b.instantiate(&mu, &[numeral(4)]).unwrap();
        let expected = Formula::plus(
            eq(numeral(4), Term::zero()),
            Formula::exists(
                "y",
                Formula::tensor(
                    eq(numeral(4), Term::succ(Term::succ(Term::Bound(0)))),
                    Formula::Mu(b.clone(), vec![Term::Bound(0)]),
                ),
            ),
        );
        assert_eq!(out, expected);
        assert!(b.instantiate(&mu, &[]).is_err());
    }

    #[test]
    fn lambda_invariant_substitution_under_binder() {
        // S = λx. x = s w ; instantiate inside ∃y so the argument is loose
        let s = Pred::lam(vec![Hint::new("x")], eq(Term::Bound(0), Term::succ(Term::var("w"))));
        let b = sample_body();
        let out = b.instantiate(&s, &[Term::var("a")]).unwrap();
        let Formula::Plus(_, r) = out else { panic!() };
        let Formula::Exists(_, inner) = *r else { panic!() };
        let Formula::Tensor(_, app) = *inner else { panic!() };
        assert_eq!(*app, eq(Term::Bound(0), Term::succ(Term::var("w"))));
    }

    #[test]
    fn instantiate_with_top() {
        let top = Pred::lam(vec![Hint::new("x")], Formula::Top);
        let nu_body = sample_body().dual();
        let out = nu_body.instantiate(&top, &[numeral(1)]).unwrap();
        let Formula::With(_, r) = out else { panic!() };
        let Formula::Forall(_, b) = *r else { panic!() };
        let Formula::Par(_, t) = *b else { panic!() };
        assert_eq!(*t, Formula::Top);
    }

    #[test]
    fn polarity_and_classes() {
        let mu = Formula::Mu(Arc::new(sample_body()), vec![numeral(1)]);
        assert_eq!(mu.polarity().unwrap(), Polarity::Pos);
        assert_eq!(mu.dual().polarity().unwrap(), Polarity::Neg);
        assert_eq!(mu.classify().unwrap(), HierarchyClass::p(1));
        assert_eq!(mu.dual().classify().unwrap(), HierarchyClass::n(1));
        assert!(Formula::Var(0, vec![]).polarity().is_err());
        let x = || Term::Bound(1);
        let y = || Term::Bound(0);
        let par = Formula::forall("x", Formula::forall("y", Formula::par(eq(x(), y()), Formula::Neq(x(), y()))));
        let plus = Formula::forall("x", Formula::forall("y", Formula::plus(eq(x(), y()), Formula::Neq(x(), y()))));
        assert_eq!(par.classify().unwrap(), HierarchyClass::n(2));
        assert_eq!(plus.classify().unwrap(), HierarchyClass::n(3));
        assert_eq!(plus.dual().classify().unwrap(), HierarchyClass::p(3));
    }

    #[test]
    fn exponential_expansion() {
        let q = Formula::Eq(Term::var("a"), Term::zero());
        let e = Formula::quest(q.clone()).expand_exponentials();
        let expected = Formula::Mu(
            Arc::new(Body::new(
                Hint::new("p"),
                vec![],
                Formula::plus(
                    Formula::Bot,
                    Formula::plus(Formula::par(Formula::Var(0, vec![]), Formula::Var(0, vec![])), q.clone()),
                ),
            )),
            vec![],
        );
        assert_eq!(e, expected);
        let b = Formula::bang(q.clone()).expand_exponentials();
        let expected_bang = Formula::Nu(
            Arc::new(Body::new(
                Hint::new("p"),
                vec![],
                Formula::with(
                    Formula::One,
                    Formula::with(Formula::tensor(Formula::Var(0, vec![]), Formula::Var(0, vec![])), q.clone()),
                ),
            )),
            vec![],
        );
        assert_eq!(b, expected_bang);
        assert_eq!(q.expand_exponentials(), q);
    }

    #[test]
    fn exponential_inside_body_shifts_outer_predicate() {
        // µp. ?(p) : the inner occurrence must point past the new binder
        let outer = Body::new(Hint::new("p"), vec![], Formula::quest(Formula::Var(0, vec![])));
        let e = Formula::Mu(Arc::new(outer), vec![]).expand_exponentials();
        let Formula::Mu(b, _) = e else { panic!() };
        let Formula::Mu(inner, _) = &b.formula else { panic!() };
        let Formula::Plus(_, r) = &inner.formula else { panic!() };
        let Formula::Plus(_, p) = &**r else { panic!() };
        assert_eq!(**p, Formula::Var(1, vec![]));
    }
}
