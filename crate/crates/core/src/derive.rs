//! Proofs built from other proofs: identity expansion, the admissible
//! `unfold` and `init` rules rewritten into core rules, and the structural
//! rules of the defined exponentials.

use std::sync::Arc;

use thiserror::Error;

use crate::checker::{expand_cnunu, rule_premises, CheckError, Mode, ProofNode, Rule, RuleSet, Sequent, Side};
use crate::formula::{Body, FixKind, Formula, Pred};
use crate::term::{Constructors, Name, Signature, Term};
use crate::unify::mgu;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DeriveError {
    #[error("cannot relate {0} and {1} by identity expansion")]
    Mismatch(String, String),
    #[error("input proof is rejected: {0}")]
    Rejected(#[from] CheckError),
    #[error("cut cannot be removed")]
    Cut,
    #[error("premise sequent does not have the expected shape: {0}")]
    Premise(String),
}

const MAX_UNFOLDS: u32 = 64;

/// `Σ ⊢ F, F̄` in core rules.
pub fn identity(f: &Formula, sig: &Signature) -> ProofNode {
    expand(f, &f.dual(), sig).expect("a formula and its dual always match")
}

/// `Σ ⊢ A, B` where `B` is the dual of `A` up to unfolding least fixed
/// points on either side.
pub fn expand(a: &Formula, b: &Formula, sig: &Signature) -> Result<ProofNode, DeriveError> {
    expand_at(a, b, sig, MAX_UNFOLDS)
}

fn unfold(body: &Arc<Body>, kind: FixKind, args: &[Term]) -> Formula {
    body.instantiate(&Pred::Fix(kind, body.clone()), args).expect("well-formed fixed point")
}

fn expand_at(a: &Formula, b: &Formula, sig: &Signature, fuel: u32) -> Result<ProofNode, DeriveError> {
    use Formula as F;
    let mismatch = || DeriveError::Mismatch(a.to_string(), b.to_string());
    let node = ProofNode::new;
    let leaf = ProofNode::leaf;
    Ok(match (a, b) {
        (F::Mu(x, t), F::Nu(y, u)) | (F::Nu(y, u), F::Mu(x, t)) if t == u && **y == x.dual() => leaf(Rule::MuNu, 0),
        (_, F::Mu(body, args)) if fuel > 0 && !matches!(a, F::Nu(..)) => {
            node(Rule::Mu, 1, vec![expand_at(a, &unfold(body, FixKind::Mu, args), sig, fuel - 1)?])
        }
        (F::Mu(body, args), _) if fuel > 0 && !matches!(b, F::Nu(..)) => {
            node(Rule::Mu, 0, vec![expand_at(&unfold(body, FixKind::Mu, args), b, sig, fuel - 1)?])
        }
        (F::Tensor(a1, a2), F::Par(b1, b2)) => node(
            Rule::Par,
            1,
            vec![node(Rule::Tensor(vec![1]), 0, vec![expand_at(a1, b1, sig, fuel)?, expand_at(a2, b2, sig, fuel)?])],
        ),
        (F::Par(a1, a2), F::Tensor(b1, b2)) => node(
            Rule::Par,
            0,
            vec![node(Rule::Tensor(vec![0]), 2, vec![expand_at(a1, b1, sig, fuel)?, expand_at(a2, b2, sig, fuel)?])],
        ),
        (F::With(a1, a2), F::Plus(b1, b2)) => node(
            Rule::With,
            0,
            vec![
                node(Rule::Plus(Side::Left), 1, vec![expand_at(a1, b1, sig, fuel)?]),
                node(Rule::Plus(Side::Right), 1, vec![expand_at(a2, b2, sig, fuel)?]),
            ],
        ),
        (F::Plus(a1, a2), F::With(b1, b2)) => node(
            Rule::With,
            1,
            vec![
                node(Rule::Plus(Side::Left), 0, vec![expand_at(a1, b1, sig, fuel)?]),
                node(Rule::Plus(Side::Right), 0, vec![expand_at(a2, b2, sig, fuel)?]),
            ],
        ),
        (F::Forall(_, a1), F::Exists(_, b1)) => {
            let y = sig.fresh("x");
            let v = Term::Var(y.clone());
            let inner = expand_at(&a1.open(&v), &b1.open(&v), &sig.with(y.clone()), fuel)?;
            node(Rule::Forall(y), 0, vec![node(Rule::Exists(v), 1, vec![inner])])
        }
        (F::Exists(_, a1), F::Forall(_, b1)) => {
            let y = sig.fresh("x");
            let v = Term::Var(y.clone());
            let inner = expand_at(&a1.open(&v), &b1.open(&v), &sig.with(y.clone()), fuel)?;
            node(Rule::Forall(y), 1, vec![node(Rule::Exists(v), 0, vec![inner])])
        }
        (F::One, F::Bot) => node(Rule::Bot, 1, vec![leaf(Rule::One, 0)]),
        (F::Bot, F::One) => node(Rule::Bot, 0, vec![leaf(Rule::One, 0)]),
        (F::Top, _) => leaf(Rule::Top, 0),
        (_, F::Top) => leaf(Rule::Top, 1),
        (F::Eq(t, u), F::Neq(v, w)) => equation(t, u, v, w, 1).ok_or_else(mismatch)?,
        (F::Neq(v, w), F::Eq(t, u)) => equation(t, u, v, w, 0).ok_or_else(mismatch)?,
        _ => return Err(mismatch()),
    })
}

/// `⊢ t = u, v ≠ w` closes when the mgu of `v, w` also equates `t, u`.
fn equation(t: &Term, u: &Term, v: &Term, w: &Term, neq_at: usize) -> Option<ProofNode> {
    match mgu(v, w) {
        None => Some(ProofNode::leaf(Rule::Neq, neq_at)),
        Some(theta) => {
            (t.apply(&theta) == u.apply(&theta)).then(|| ProofNode::new(Rule::Neq, neq_at, vec![ProofNode::leaf(Rule::Eq, 0)]))
        }
    }
}

/// The invariant `λx̄. B (νB) x̄` that makes the `ν` rule act as `unfold`.
pub fn unfolding_invariant(body: &Arc<Body>) -> Pred {
    let n = body.arity() as u32;
    let args: Vec<Term> = (0..n).map(|i| Term::Bound(n - 1 - i)).collect();
    Pred::lam(body.params.clone(), unfold(body, FixKind::Nu, &args))
}

/// Core derivation of `⊢ Γ, νB t̄` from a proof `premise` of `⊢ Γ, B (νB) t̄`
/// (the unfolded formula at the same index).
pub fn nu_unfold(conclusion: &Sequent, index: usize, premise: ProofNode) -> Result<ProofNode, DeriveError> {
    let Some(Formula::Nu(body, _)) = conclusion.formulas.get(index) else {
        return Err(DeriveError::Premise(conclusion.to_string()));
    };
    let inv = unfolding_invariant(body);
    let mut sig = conclusion.sig.clone();
    let mut xs: Vec<Name> = Vec::new();
    for _ in 0..body.arity() {
        let x = sig.fresh("x");
        sig.insert(x.clone());
        xs.push(x);
    }
    let xv: Vec<Term> = xs.iter().map(|x| Term::Var(x.clone())).collect();
    let stepped = body.instantiate(&inv, &xv).expect("arity");
    let hyp = inv.apply(&xv).expect("arity").dual();
    let step = expand(&stepped, &hyp, &sig)?;
    Ok(ProofNode::new(Rule::Nu(inv, xs), index, vec![premise, step]))
}

/// Rewrites `init`, `unfold` and `cnunu` into the rules they abbreviate,
/// and exponentials in annotations into their fixed points. A cut is an
/// error; weakening and contraction are left in place.
pub fn eliminate_admissible(proof: &ProofNode, goal: &Sequent, cons: &Constructors) -> Result<ProofNode, DeriveError> {
    let rules = RuleSet::new(Mode::MuLKPlus);
    let goal = Sequent::new(goal.sig.clone(), goal.formulas.iter().map(Formula::expand_exponentials).collect());
    walk(&proof.expand_exponentials(), &goal, rules, cons)
}

fn walk(n: &ProofNode, s: &Sequent, rules: RuleSet, cons: &Constructors) -> Result<ProofNode, DeriveError> {
    match &n.rule {
        Rule::CNuNu(..) => return walk(&expand_cnunu(n)?, s, rules, cons),
        Rule::Cut(..) => return Err(DeriveError::Cut),
        Rule::Init => {
            rule_premises(n, s, rules, cons)?;
            return Ok(identity(&s.formulas[0], &s.sig));
        }
        _ => {}
    }
    let premises = rule_premises(n, s, rules, cons)?;
    if premises.len() != n.children.len() {
        return Err(CheckError::ChildCount { expected: premises.len(), found: n.children.len() }.into());
    }
    let children = n
        .children
        .iter()
        .zip(&premises)
        .map(|(c, p)| walk(c, p, rules, cons))
        .collect::<Result<Vec<_>, _>>()?;
    if n.rule == Rule::Unfold {
        let [child] = <[ProofNode; 1]>::try_from(children).expect("unfold has one premise");
        return nu_unfold(s, n.principal, child);
    }
    Ok(ProofNode { rule: n.rule.clone(), principal: n.principal, children })
}

/// The structural rules made admissible by `?B = µp. ⊥ ⊕ (p ⅋ p) ⊕ B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Structural {
    /// `⊢ Γ` to `⊢ ?B, Γ`.
    Weaken,
    /// `⊢ ?B, ?B, Γ` to `⊢ ?B, Γ`.
    Contract,
    /// `⊢ B, Γ` to `⊢ ?B, Γ`.
    Dereliction,
}

/// `?B` with the exponential expanded.
pub fn quest(b: &Formula) -> Formula {
    Formula::quest(b.clone()).expand_exponentials()
}

/// Builds the conclusion `⊢ ?B, Γ` and its derivation from `premise`, a
/// proof of the premise sequent.
pub fn derived_structural(
    rule: Structural,
    b: &Formula,
    premise_sequent: &Sequent,
    premise: ProofNode,
) -> Result<(Sequent, ProofNode), DeriveError> {
    derived_structural_at(rule, b, 0, premise_sequent, premise)
}

/// As [`derived_structural`], acting at position `at`: the affected
/// formulas start there and `?B` takes their place.
pub fn derived_structural_at(
    rule: Structural,
    b: &Formula,
    at: usize,
    premise_sequent: &Sequent,
    premise: ProofNode,
) -> Result<(Sequent, ProofNode), DeriveError> {
    let q = quest(b);
    let fs = &premise_sequent.formulas;
    let bad = || DeriveError::Premise(premise_sequent.to_string());
    if at > fs.len() {
        return Err(bad());
    }
    let consumed = match rule {
        Structural::Weaken => 0,
        Structural::Contract if fs.len() >= at + 2 && fs[at] == q && fs[at + 1] == q => 2,
        Structural::Dereliction if fs.get(at) == Some(b) => 1,
        _ => return Err(bad()),
    };
    let mut conclusion = fs[..at].to_vec();
    conclusion.push(q);
    conclusion.extend_from_slice(&fs[at + consumed..]);
    let node = ProofNode::new;
    let body = match rule {
        Structural::Weaken => node(Rule::Plus(Side::Left), at, vec![node(Rule::Bot, at, vec![premise])]),
        Structural::Contract => node(
            Rule::Plus(Side::Right),
            at,
            vec![node(Rule::Plus(Side::Left), at, vec![node(Rule::Par, at, vec![premise])])],
        ),
        Structural::Dereliction => {
            node(Rule::Plus(Side::Right), at, vec![node(Rule::Plus(Side::Right), at, vec![premise])])
        }
    };
    Ok((Sequent::new(premise_sequent.sig.clone(), conclusion), node(Rule::Mu, at, vec![body])))
}
