//! Bounded three-valued truth in the standard model of numerals.
//!
//! Fixed points unfold at most `fuel` times along any path and quantifiers
//! enumerate the numerals `0..=qbound`. When a quantified body pins its
//! variable down by an equation (`∃x. x = t ⊗ …`, dually `∀x. x ≠ t ⅋ …`)
//! the single candidate is used instead, which is exact.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::checker::{check_with, ProofNode, RuleSet, Sequent};
use crate::formula::{FixKind, Formula, Pred};
use crate::syntax::Printer;
use crate::term::{name, numeral, Constructors, Term};
use crate::uformula::{UBody, UFormula};
use crate::unify::mgu;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl std::ops::Not for Truth {
    type Output = Truth;

    fn not(self) -> Truth {
        match self {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            Truth::Unknown => Truth::Unknown,
        }
    }
}

impl Truth {

    pub fn and(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::True, Truth::True) => Truth::True,
            _ => Truth::Unknown,
        }
    }

    pub fn or(self, other: Truth) -> Truth {
        !(!self).and(!other)
    }

    fn from_bool(b: bool) -> Truth {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }
}

impl fmt::Display for Truth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Truth::True => "True",
            Truth::False => "False",
            Truth::Unknown => "Unknown",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("formula has free variables: {0}")]
    Open(String),
    #[error("formula has an unbound predicate variable")]
    UnboundPredVar,
}

pub fn eval_bounded(f: &Formula, fuel: u32, qbound: u64) -> Result<Truth, EvalError> {
    let fv = f.free_vars();
    if !fv.is_empty() {
        let names: Vec<&str> = fv.iter().map(|x| &**x).collect();
        return Err(EvalError::Open(names.join(" ")));
    }
    if f.has_loose(0, 0) {
        return Err(EvalError::UnboundPredVar);
    }
    let f = if f.contains_exponentials() { f.expand_exponentials() } else { f.clone() };
    Ok(Evaluator { qbound, memo: RefCell::default() }.eval(&f, fuel))
}

/// Evaluates an unpolarized formula through any of its polarizations, which
/// all agree. Hatted quantifiers range over the same numerals as plain ones.
pub fn eval_unpolarized(u: &UFormula, fuel: u32, qbound: u64) -> Result<Truth, EvalError> {
    let plain = strip_hats(u);
    let f = plain.polarize(&vec![false; plain.connective_count()]).expect("choice count matches");
    eval_bounded(&f, fuel, qbound)
}

fn strip_hats(u: &UFormula) -> UFormula {
    use UFormula::*;
    let bx = |f: &UFormula| Box::new(strip_hats(f));
    match u {
        And(a, b) => And(bx(a), bx(b)),
        Or(a, b) => Or(bx(a), bx(b)),
        Forall(h, b) | HatForall(h, b) => Forall(h.clone(), bx(b)),
        Exists(h, b) | HatExists(h, b) => Exists(h.clone(), bx(b)),
        Mu(body, args) | Nu(body, args) => {
            let body = Arc::new(UBody { pred: body.pred.clone(), params: body.params.clone(), formula: strip_hats(&body.formula) });
            if matches!(u, Mu(..)) {
                Mu(body, args.clone())
            } else {
                Nu(body, args.clone())
            }
        }
        other => other.clone(),
    }
}

struct Evaluator {
    qbound: u64,
    /// Fixed-point nodes already evaluated, by remaining fuel. Without it
    /// relations like Ackermann's, whose recursive calls enumerate an
    /// intermediate result, take time exponential in the fuel.
    memo: RefCell<HashMap<(Formula, u32), Truth>>,
}

impl Evaluator {
    fn eval(&self, f: &Formula, fuel: u32) -> Truth {
        use Formula as F;
        match f {
            F::One | F::Top => Truth::True,
            F::Zero | F::Bot => Truth::False,
            F::Eq(t, u) => Truth::from_bool(t == u),
            F::Neq(t, u) => Truth::from_bool(t != u),
            F::Tensor(a, b) | F::With(a, b) => match self.eval(a, fuel) {
                Truth::False => Truth::False,
                x => x.and(self.eval(b, fuel)),
            },
            F::Par(a, b) | F::Plus(a, b) => match self.eval(a, fuel) {
                Truth::True => Truth::True,
                x => x.or(self.eval(b, fuel)),
            },
            F::Exists(_, b) => self.quantifier(b, fuel, true),
            F::Forall(_, b) => self.quantifier(b, fuel, false),
            F::Mu(body, args) | F::Nu(body, args) => {
                if fuel == 0 {
                    return Truth::Unknown;
                }
                if let Some(t) = self.memo.borrow().get(&(f.clone(), fuel)) {
                    return *t;
                }
                let kind = if matches!(f, F::Mu(..)) { FixKind::Mu } else { FixKind::Nu };
                let unfolded = body.instantiate(&Pred::Fix(kind, body.clone()), args).expect("closed formula");
                let t = self.eval(&unfolded, fuel - 1);
                self.memo.borrow_mut().insert((f.clone(), fuel), t);
                t
            }
            F::Var(..) => unreachable!("checked closed at the predicate level"),
            F::Bang(_) | F::Quest(_) => unreachable!("exponentials expanded"),
        }
    }

    /// `exists` picks the positive reading; the universal case is its exact
    /// dual so that evaluation commutes with negation.
    fn quantifier(&self, body: &Formula, fuel: u32, exists: bool) -> Truth {
        let hole = name("#x");
        let opened = body.open(&Term::Var(hole.clone()));
        let mut literals = Vec::new();
        chain(&opened, exists, &mut 0, &mut literals);
        for (u, v) in &literals {
            match mgu(u, v) {
                None => return Truth::from_bool(!exists),
                Some(theta) => {
                    if let Some(t) = theta.get(&hole).filter(|t| t.is_ground()) {
                        return self.eval(&body.open(t), fuel);
                    }
                }
            }
        }
        let decisive = if exists { Truth::True } else { Truth::False };
        for n in 0..=self.qbound {
            if self.eval(&body.open(&numeral(n)), fuel) == decisive {
                return decisive;
            }
        }
        Truth::Unknown
    }
}

/// Equations among the conjuncts (for `exists`) or disequations among the
/// disjuncts (otherwise) at the top of `f`, looking through nested
/// quantifiers of the same kind, whose variables become placeholders.
fn chain(f: &Formula, exists: bool, next: &mut u32, out: &mut Vec<(Term, Term)>) {
    use Formula as F;
    match f {
        F::Tensor(a, b) | F::With(a, b) if exists => {
            chain(a, exists, next, out);
            chain(b, exists, next, out);
        }
        F::Par(a, b) | F::Plus(a, b) if !exists => {
            chain(a, exists, next, out);
            chain(b, exists, next, out);
        }
        F::Exists(_, b) if exists => {
            *next += 1;
            chain(&b.open(&Term::Var(name(&format!("#y{next}")))), exists, next, out);
        }
        F::Forall(_, b) if !exists => {
            *next += 1;
            chain(&b.open(&Term::Var(name(&format!("#y{next}")))), exists, next, out);
        }
        F::Eq(u, v) if exists => out.push((u.clone(), v.clone())),
        F::Neq(u, v) if !exists => out.push((u.clone(), v.clone())),
        _ => {}
    }
}

/// `⊢_Σ Γ` read as `∀Σ. ⅋Γ`.
pub fn sequent_formula(s: &Sequent) -> Formula {
    let mut f = s.formulas.iter().cloned().reduce(Formula::par).unwrap_or(Formula::Bot);
    let vars: Vec<_> = s.sig.iter().cloned().collect();
    for x in vars.iter().rev() {
        f = Formula::forall_var(x, &f);
    }
    f
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepEntry {
    pub name: String,
    pub conclusion: String,
    pub truth: Truth,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SweepReport {
    pub entries: Vec<SweepEntry>,
    pub true_count: usize,
    pub unknown_count: usize,
    pub false_count: usize,
    /// Proofs the kernel rejected, which the sweep does not evaluate.
    pub skipped: Vec<String>,
}

impl SweepReport {
    pub fn ok(&self) -> bool {
        self.false_count == 0
    }
}

pub struct SweepItem<'a> {
    pub name: &'a str,
    pub proof: &'a ProofNode,
    pub goal: &'a Sequent,
    pub rules: RuleSet,
}

/// Evaluates the conclusion of every accepted proof; a `False` means the
/// kernel accepted something untrue.
pub fn soundness_sweep(items: &[SweepItem<'_>], cons: &Constructors, fuel: u32, qbound: u64) -> SweepReport {
    let mut report = SweepReport::default();
    let p = Printer::new();
    for item in items {
        if !check_with(item.proof, item.goal, item.rules, cons).accepted {
            report.skipped.push(item.name.to_string());
            continue;
        }
        let f = sequent_formula(item.goal);
        let truth = eval_bounded(&f, fuel, qbound).expect("sequent formula is closed");
        match truth {
            Truth::True => report.true_count += 1,
            Truth::False => report.false_count += 1,
            Truth::Unknown => report.unknown_count += 1,
        }
        report.entries.push(SweepEntry { name: item.name.to_string(), conclusion: p.sequent(item.goal), truth });
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_pred, Definitions};

    fn defs() -> Definitions {
        let mut d = Definitions::new();
        let c = Constructors::new();
        for (n, src) in [
            ("nat", "mu (N x => x = z + ex y. x = s y * N y)"),
            ("plus", "mu (P x y u => (x = z * y = u) + ex x'. ex u'. (x = s x' * u = s u' * P x' y u'))"),
        ] {
            let p = parse_pred(src, &d, &c).unwrap();
            d.insert(name(n), p);
        }
        d
    }

    fn formula(src: &str) -> Formula {
        parse_formula(src, &defs(), &Constructors::new()).unwrap().polarized().unwrap().clone()
    }

    #[test]
    fn numerals_and_addition() {
        assert_eq!(eval_bounded(&formula("nat 4"), 10, 0), Ok(Truth::True));
        assert_eq!(eval_bounded(&formula("nat 4"), 4, 0), Ok(Truth::Unknown));
        assert_eq!(eval_bounded(&formula("plus 2 2 4"), 20, 0), Ok(Truth::True));
        assert_eq!(eval_bounded(&formula("plus 2 2 3"), 20, 0), Ok(Truth::False));
    }

    #[test]
    fn bounded_quantifiers() {
        let f = formula("all x. ~nat x | ex y. plus x x y");
        assert_eq!(eval_bounded(&f, 30, 3), Ok(Truth::Unknown));
        let g = formula("ex y. plus 3 3 y");
        assert_eq!(eval_bounded(&g, 30, 0), Ok(Truth::Unknown));
        assert_eq!(eval_bounded(&g, 30, 6), Ok(Truth::True));
        assert_eq!(eval_bounded(&formula("all x. all y. x = y | x != y"), 5, 3), Ok(Truth::Unknown));
        assert_eq!(eval_bounded(&formula("all x. s x != z"), 5, 3), Ok(Truth::True));
        assert_eq!(eval_bounded(&formula("ex x. s x = z"), 5, 3), Ok(Truth::False));
    }

    #[test]
    fn duality_is_negation() {
        for src in ["plus 2 2 4", "plus 1 1 3", "ex y. plus 2 y 3", "all x. ~nat x | nat (s x)", "nat 7"] {
            let f = formula(src);
            let a = eval_bounded(&f, 6, 4).unwrap();
            assert_eq!(eval_bounded(&f.dual(), 6, 4).unwrap(), !a, "{src}");
        }
    }

    #[test]
    fn open_formulas_are_rejected() {
        assert!(matches!(eval_bounded(&formula("nat x"), 5, 5), Err(EvalError::Open(_))));
    }

    #[test]
    fn unpolarized_agrees() {
        let u = match parse_formula("all^ x. ex^ y. x = y /\\ tt", &defs(), &Constructors::new()).unwrap() {
            crate::syntax::AnyFormula::Unpolarized(u) => u,
            other => panic!("{other:?}"),
        };
        assert_eq!(eval_unpolarized(&u, 5, 3), Ok(Truth::Unknown));
    }

    #[test]
    fn empty_sweep() {
        let r = soundness_sweep(&[], &Constructors::new(), 50, 8);
        assert!(r.ok() && r.entries.is_empty());
    }
}
