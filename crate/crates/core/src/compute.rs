//! Computing values of purely positive relations by the state-transition
//! system `⟨Σ; B₁ … Bₘ; t⟩`, with backtracking search over its choices.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::checker::{ProofNode, Rule, Sequent, Side};
use crate::formula::{FixKind, Formula, HierarchyClass, Pred};
use crate::syntax::Printer;
use crate::term::{name, Hint, Name, Signature, Substitution, Term};
use crate::unify::{compose, mgu};

pub const DEFAULT_FUEL: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComputeError {
    #[error("goal {0} is not purely positive")]
    NotPositive(String),
    #[error("predicate is {0}, not P1")]
    NotP1(HierarchyClass),
    #[error("argument {0} is not ground")]
    NotGround(String),
    #[error("predicate of arity {arity} applied to {given} arguments plus the output")]
    Arity { arity: usize, given: usize },
    #[error("no successful computation yields {0} within the fuel")]
    NoTrace(String),
}

/// `⟨Σ; goals; value⟩`. Goals are kept as a stack with the leftmost goal on
/// top; fresh names come from a counter inherited along each branch, so a
/// name is never reused on one path.
#[derive(Clone, PartialEq, Eq)]
pub struct ComputeState {
    sig: Signature,
    stack: Vec<Formula>,
    value: Term,
    next_fresh: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Case {
    Eq,
    Tensor,
    PlusLeft,
    PlusRight,
    Mu,
    Exists,
    /// The unit `1` is discharged without changing the state.
    One,
}

impl Case {
    pub fn keyword(self) -> &'static str {
        match self {
            Case::Eq => "eq",
            Case::Tensor => "tensor",
            Case::PlusLeft => "plus-left",
            Case::PlusRight => "plus-right",
            Case::Mu => "mu",
            Case::Exists => "exists",
            Case::One => "one",
        }
    }
}

enum Successors {
    Dead,
    One(Case, ComputeState),
    Two(ComputeState, ComputeState),
}

impl ComputeState {
    /// Goals are given left to right.
    pub fn new(sig: Signature, goals: Vec<Formula>, value: Term) -> Self {
        let mut stack = goals;
        stack.reverse();
        ComputeState { sig, stack, value, next_fresh: 0 }
    }

    /// `⟨y; P args y; y⟩`.
    pub fn initial(p: &Pred, args: &[Term]) -> Result<Self, ComputeError> {
        check_relation(p, args)?;
        let y = name("y");
        let mut all: Vec<Term> = args.to_vec();
        all.push(Term::Var(y.clone()));
        let goal = p.apply(&all).expect("arity checked");
        Ok(ComputeState::new(Signature::from_names([y.clone()]), vec![goal], Term::Var(y)))
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    /// Goals from left to right.
    pub fn goals(&self) -> Vec<&Formula> {
        self.stack.iter().rev().collect()
    }

    pub fn value(&self) -> &Term {
        &self.value
    }

    /// Both the signature and the goals are empty.
    pub fn is_success(&self) -> bool {
        self.sig.is_empty() && self.stack.is_empty()
    }

    /// Hex prefix of the SHA-256 of the printed state.
    pub fn digest(&self) -> String {
        let h = Sha256::digest(self.to_string().as_bytes());
        h.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    fn fresh(&mut self) -> Name {
        loop {
            let n = name(&format!("_g{}", self.next_fresh));
            self.next_fresh += 1;
            if !self.sig.contains(&n) {
                return n;
            }
        }
    }

    /// Reduces the leftmost goal.
    fn step(mut self) -> Result<Successors, ComputeError> {
        let Some(goal) = self.stack.pop() else {
            return Ok(Successors::Dead);
        };
        Ok(match goal {
            Formula::Eq(u, v) => match mgu(&u, &v) {
                None => Successors::Dead,
                Some(theta) => {
                    self.apply(&theta);
                    Successors::One(Case::Eq, self)
                }
            },
            Formula::Tensor(a, b) => {
                self.stack.push(*b);
                self.stack.push(*a);
                Successors::One(Case::Tensor, self)
            }
            Formula::Plus(a, b) => {
                let mut right = self.clone();
                right.stack.push(*b);
                self.stack.push(*a);
                Successors::Two(self, right)
            }
            Formula::Mu(body, args) => {
                let unfolded = body.instantiate(&Pred::Fix(FixKind::Mu, body.clone()), &args).expect("well formed");
                self.stack.push(unfolded);
                Successors::One(Case::Mu, self)
            }
            Formula::Exists(_, b) => {
                let y = self.fresh();
                self.sig.insert(y.clone());
                self.stack.push(b.open(&Term::Var(y)));
                Successors::One(Case::Exists, self)
            }
            Formula::One => Successors::One(Case::One, self),
            Formula::Zero => Successors::Dead,
            other => return Err(ComputeError::NotPositive(other.to_string())),
        })
    }

    fn apply(&mut self, theta: &Substitution) {
        self.sig = self.sig.update(theta);
        for g in &mut self.stack {
            *g = g.subst(theta);
        }
        self.value = self.value.apply(theta);
    }
}

impl fmt::Display for ComputeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = Printer::new();
        let sig: Vec<String> = self.sig.iter().map(|x| x.to_string()).collect();
        let goals: Vec<String> = self.goals().into_iter().map(|g| p.formula(g)).collect();
        write!(f, "<{}; {}; {}>", sig.join(" "), goals.join(", "), p.term(&self.value))
    }
}

impl fmt::Debug for ComputeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// All successor states of the leftmost-goal selection.
pub fn transitions(s: &ComputeState) -> Result<Vec<ComputeState>, ComputeError> {
    Ok(match s.clone().step()? {
        Successors::Dead => vec![],
        Successors::One(_, t) => vec![t],
        Successors::Two(l, r) => vec![l, r],
    })
}

fn check_relation(p: &Pred, args: &[Term]) -> Result<(), ComputeError> {
    if p.arity() != args.len() + 1 {
        return Err(ComputeError::Arity { arity: p.arity(), given: args.len() });
    }
    if let Some(t) = args.iter().find(|t| !t.is_ground()) {
        return Err(ComputeError::NotGround(Printer::new().term(t)));
    }
    let class = p.body_formula().classify().map_err(|e| ComputeError::NotPositive(e.to_string()))?;
    if class != HierarchyClass::p(1) {
        return Err(ComputeError::NotP1(class));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Order {
    /// Leftmost goal, left branch first.
    Dfs,
    /// Depth-first with a doubling bound on path length.
    IterativeDeepening,
    /// Depth-first with branch order drawn from a seeded generator.
    RandomizedDfs(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SearchStrategy {
    pub order: Order,
    /// Maximum number of transitions.
    pub fuel: u64,
}

impl Default for SearchStrategy {
    fn default() -> Self {
        SearchStrategy { order: Order::IterativeDeepening, fuel: DEFAULT_FUEL }
    }
}

impl SearchStrategy {
    pub fn new(order: Order, fuel: u64) -> Self {
        SearchStrategy { order, fuel }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub case: Case,
    pub goal: usize,
    pub state: String,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.case.keyword(), self.goal, self.state)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success { value: Term, trace: Vec<TraceStep> },
    /// The whole search space was explored without success.
    Failure,
    FuelExhausted,
}

struct TraceNode {
    case: Case,
    prev: Option<Arc<TraceNode>>,
}

fn cases(mut t: &Option<Arc<TraceNode>>) -> Vec<Case> {
    let mut out = Vec::new();
    while let Some(n) = t {
        out.push(n.case);
        t = &n.prev;
    }
    out.reverse();
    out
}

enum Stop {
    /// The callback asked to stop.
    Requested,
    Fuel,
    /// Explored everything below the bound; `cut` tells whether the bound
    /// pruned anything.
    Done { cut: bool },
}

struct Explorer {
    fuel: u64,
    rng: Option<ChaCha8Rng>,
}

impl Explorer {
    fn new(strategy: &SearchStrategy) -> Self {
        let rng = match strategy.order {
            Order::RandomizedDfs(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
            _ => None,
        };
        Explorer { fuel: strategy.fuel, rng }
    }

    fn dfs(
        &mut self,
        init: &ComputeState,
        bound: Option<usize>,
        on_success: &mut impl FnMut(&ComputeState, &Option<Arc<TraceNode>>) -> bool,
    ) -> Result<Stop, ComputeError> {
        let mut stack: Vec<(ComputeState, usize, Option<Arc<TraceNode>>)> = vec![(init.clone(), 0, None)];
        let mut cut = false;
        while let Some((s, depth, trace)) = stack.pop() {
            if s.is_success() {
                if on_success(&s, &trace) {
                    return Ok(Stop::Requested);
                }
                continue;
            }
            if s.stack.is_empty() {
                continue;
            }
            if bound.is_some_and(|b| depth >= b) {
                cut = true;
                continue;
            }
            if self.fuel == 0 {
                return Ok(Stop::Fuel);
            }
            self.fuel -= 1;
            let link = |case: Case| Some(Arc::new(TraceNode { case, prev: trace.clone() }));
            match s.step()? {
                Successors::Dead => {}
                Successors::One(case, t) => stack.push((t, depth + 1, link(case))),
                Successors::Two(l, r) => {
                    let swap = self.rng.as_mut().is_some_and(|g| g.gen_bool(0.5));
                    let left = (l, depth + 1, link(Case::PlusLeft));
                    let right = (r, depth + 1, link(Case::PlusRight));
                    if swap {
                        stack.push(left);
                        stack.push(right);
                    } else {
                        stack.push(right);
                        stack.push(left);
                    }
                }
            }
        }
        Ok(Stop::Done { cut })
    }

    /// Runs the strategy, reporting every success; returns whether the space
    /// was exhausted.
    fn run(
        &mut self,
        order: Order,
        init: &ComputeState,
        on_success: &mut impl FnMut(&ComputeState, &Option<Arc<TraceNode>>) -> bool,
    ) -> Result<Stop, ComputeError> {
        match order {
            Order::Dfs | Order::RandomizedDfs(_) => self.dfs(init, None, on_success),
            Order::IterativeDeepening => {
                let mut bound = 16usize;
                loop {
                    match self.dfs(init, Some(bound), on_success)? {
                        Stop::Done { cut: true } => bound = bound.saturating_mul(2),
                        other => return Ok(other),
                    }
                }
            }
        }
    }
}

/// Replays a sequence of cases from `init`, recording the digest of each
/// resulting state and the fresh names introduced by existential steps.
fn replay(init: &ComputeState, path: &[Case]) -> (Vec<TraceStep>, Vec<Name>, Vec<Substitution>) {
    let mut s = init.clone();
    let mut steps = Vec::with_capacity(path.len());
    let mut fresh = Vec::new();
    let mut unifiers = Vec::new();
    for &case in path {
        if let Some(Formula::Eq(u, v)) = s.stack.last() {
            unifiers.push(mgu(u, v).expect("replayed unification succeeds"));
        }
        let before = s.next_fresh;
        s = match s.step().expect("replayed step is valid") {
            Successors::One(_, t) => t,
            Successors::Two(l, r) => {
                if case == Case::PlusLeft {
                    l
                } else {
                    r
                }
            }
            Successors::Dead => unreachable!("replayed path only contains live steps"),
        };
        if case == Case::Exists {
            fresh.push(name(&format!("_g{}", s.next_fresh - 1)));
            debug_assert!(s.next_fresh > before);
        }
        steps.push(TraceStep { case, goal: 0, state: s.digest() });
    }
    (steps, fresh, unifiers)
}

/// First success under `strategy`, or why there is none.
pub fn search(p: &Pred, args: &[Term], strategy: &SearchStrategy) -> Result<Outcome, ComputeError> {
    let init = ComputeState::initial(p, args)?;
    let mut found: Option<(Term, Vec<Case>)> = None;
    let stop = Explorer::new(strategy).run(strategy.order, &init, &mut |s, t| {
        found = Some((s.value.clone(), cases(t)));
        true
    })?;
    Ok(match (stop, found) {
        (_, Some((value, path))) => Outcome::Success { value, trace: replay(&init, &path).0 },
        (Stop::Fuel, None) => Outcome::FuelExhausted,
        _ => Outcome::Failure,
    })
}

/// Every success value found within `fuel` transitions of the default
/// strategy, without duplicates, in order of discovery.
pub fn enumerate_successes(p: &Pred, args: &[Term], fuel: u64) -> Result<Vec<Term>, ComputeError> {
    enumerate_successes_with(p, args, &SearchStrategy { order: Order::IterativeDeepening, fuel })
}

pub fn enumerate_successes_with(p: &Pred, args: &[Term], strategy: &SearchStrategy) -> Result<Vec<Term>, ComputeError> {
    let init = ComputeState::initial(p, args)?;
    let mut out: Vec<Term> = Vec::new();
    Explorer::new(strategy).run(strategy.order, &init, &mut |s, _| {
        if !out.contains(&s.value) {
            out.push(s.value.clone());
        }
        false
    })?;
    Ok(out)
}

/// A checked-by-construction proof of `⊢ ∃y. P args y`.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub goal: Sequent,
    pub proof: ProofNode,
    pub trace: Vec<TraceStep>,
}

/// `⊢ ∃y. P args y` as a sequent.
pub fn existence_goal(p: &Pred, args: &[Term]) -> Sequent {
    let mut all: Vec<Term> = args.to_vec();
    all.push(Term::Bound(0));
    let body = p.apply(&all).expect("arity checked by caller");
    Sequent::new(Signature::new(), vec![Formula::Exists(Hint::new("y"), Box::new(body))])
}

/// Finds a computation with result `value` and turns it into a proof whose
/// rules mirror the transitions: the witness of `∃y` is `value`, each fresh
/// existential gets the term the final substitution assigns to it.
pub fn certify(p: &Pred, args: &[Term], value: &Term, strategy: &SearchStrategy) -> Result<Certificate, ComputeError> {
    let init = ComputeState::initial(p, args)?;
    let mut found: Option<Vec<Case>> = None;
    Explorer::new(strategy).run(strategy.order, &init, &mut |s, t| {
        if s.value == *value {
            found = Some(cases(t));
            true
        } else {
            false
        }
    })?;
    let path = found.ok_or_else(|| ComputeError::NoTrace(Printer::new().term(value)))?;
    let (trace, fresh, unifiers) = replay(&init, &path);
    let sigma = unifiers.iter().fold(Substitution::new(), |acc, th| compose(&acc, th));
    let mut witnesses = fresh.iter().map(|x| Term::Var(x.clone()).apply(&sigma));
    let mut steps = path.iter().copied();
    let inner = build(&mut steps, &mut witnesses);
    let proof = ProofNode::new(Rule::Exists(value.clone()), 0, vec![inner]);
    Ok(Certificate { goal: existence_goal(p, args), proof, trace })
}

/// The goal tree is reduced in pre-order, so the proof is rebuilt by reading
/// the cases in sequence.
fn build(steps: &mut impl Iterator<Item = Case>, witnesses: &mut impl Iterator<Item = Term>) -> ProofNode {
    let case = steps.next().expect("trace covers the goal tree");
    match case {
        Case::Eq => ProofNode::leaf(Rule::Eq, 0),
        Case::One => ProofNode::leaf(Rule::One, 0),
        Case::Tensor => {
            let l = build(steps, witnesses);
            let r = build(steps, witnesses);
            ProofNode::new(Rule::Tensor(vec![]), 0, vec![l, r])
        }
        Case::PlusLeft => ProofNode::new(Rule::Plus(Side::Left), 0, vec![build(steps, witnesses)]),
        Case::PlusRight => ProofNode::new(Rule::Plus(Side::Right), 0, vec![build(steps, witnesses)]),
        Case::Mu => ProofNode::new(Rule::Mu, 0, vec![build(steps, witnesses)]),
        Case::Exists => {
            let w = witnesses.next().expect("one witness per existential");
            ProofNode::new(Rule::Exists(w), 0, vec![build(steps, witnesses)])
        }
    }
}
