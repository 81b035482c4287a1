//! Unpolarized formulas, their polarizations and the relativization of
//! hatted quantifiers through `nat`.

use std::sync::Arc;

use indexmap::IndexSet;
use thiserror::Error;

use crate::formula::{Body, Formula};
use crate::term::{Hint, Name, Term};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum UFormula {
    And(Box<UFormula>, Box<UFormula>),
    Tt,
    Or(Box<UFormula>, Box<UFormula>),
    Ff,
    Eq(Term, Term),
    Neq(Term, Term),
    Forall(Hint, Box<UFormula>),
    Exists(Hint, Box<UFormula>),
    /// Quantifiers ranging over `nat`, removed by [`UFormula::peano_translate`].
    HatForall(Hint, Box<UFormula>),
    HatExists(Hint, Box<UFormula>),
    Mu(Arc<UBody>, Vec<Term>),
    Nu(Arc<UBody>, Vec<Term>),
    Var(u32, Vec<Term>),
    /// An already polarized subformula, closed at the predicate level. Defined
    /// predicates such as `nat` enter unpolarized formulas this way.
    Fixed(Formula),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UBody {
    pub pred: Hint,
    pub params: Vec<Hint>,
    pub formula: UFormula,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolarizeError {
    #[error("expected {expected} polarity choices, got {found}")]
    ChoiceCount { expected: usize, found: usize },
    #[error("hatted quantifiers must be translated before polarizing")]
    Hatted,
}

fn bx(u: UFormula) -> Box<UFormula> {
    Box::new(u)
}

impl UFormula {
    pub fn and(a: UFormula, b: UFormula) -> UFormula {
        UFormula::And(bx(a), bx(b))
    }
    pub fn or(a: UFormula, b: UFormula) -> UFormula {
        UFormula::Or(bx(a), bx(b))
    }
    pub fn forall(h: &str, b: UFormula) -> UFormula {
        UFormula::Forall(Hint::new(h), bx(b))
    }
    pub fn exists(h: &str, b: UFormula) -> UFormula {
        UFormula::Exists(Hint::new(h), bx(b))
    }
    /// `P ⊃ Q`, read as `P̄ ∨ Q`.
    pub fn implies(a: UFormula, b: UFormula) -> UFormula {
        UFormula::or(a.dual(), b)
    }

    pub fn dual(&self) -> UFormula {
        use UFormula::*;
        match self {
            And(a, b) => Or(bx(a.dual()), bx(b.dual())),
            Or(a, b) => And(bx(a.dual()), bx(b.dual())),
            Tt => Ff,
            Ff => Tt,
            Eq(t, u) => Neq(t.clone(), u.clone()),
            Neq(t, u) => Eq(t.clone(), u.clone()),
            Forall(h, b) => Exists(h.clone(), bx(b.dual())),
            Exists(h, b) => Forall(h.clone(), bx(b.dual())),
            HatForall(h, b) => HatExists(h.clone(), bx(b.dual())),
            HatExists(h, b) => HatForall(h.clone(), bx(b.dual())),
            Mu(body, args) => Nu(Arc::new(body.dual()), args.clone()),
            Nu(body, args) => Mu(Arc::new(body.dual()), args.clone()),
            Var(k, args) => Var(*k, args.clone()),
            Fixed(f) => Fixed(f.dual()),
        }
    }

    /// Number of propositional connective occurrences (∧, ∨, tt, ff).
    pub fn connective_count(&self) -> usize {
        use UFormula::*;
        match self {
            And(a, b) | Or(a, b) => 1 + a.connective_count() + b.connective_count(),
            Tt | Ff => 1,
            Forall(_, b) | Exists(_, b) | HatForall(_, b) | HatExists(_, b) => b.connective_count(),
            Mu(body, _) | Nu(body, _) => body.formula.connective_count(),
            Eq(..) | Neq(..) | Var(..) | Fixed(_) => 0,
        }
    }

    /// Chooses a polarized version: bit `false` picks the negative connective
    /// (&, ⅋, ⊤, ⊥) and `true` the positive one (⊗, ⊕, 1, 0). Bits are consumed
    /// in pre-order.
    pub fn polarize(&self, choices: &[bool]) -> Result<Formula, PolarizeError> {
        let expected = self.connective_count();
        if choices.len() != expected {
            return Err(PolarizeError::ChoiceCount { expected, found: choices.len() });
        }
        let mut it = choices.iter().copied();
        self.polarize_with(&mut it)
    }

    fn polarize_with(&self, bits: &mut impl Iterator<Item = bool>) -> Result<Formula, PolarizeError> {
        use UFormula::*;
        Ok(match self {
            And(a, b) => {
                let pos = bits.next().unwrap_or(false);
                let (a, b) = (a.polarize_with(bits)?, b.polarize_with(bits)?);
                if pos {
                    Formula::tensor(a, b)
                } else {
                    Formula::with(a, b)
                }
            }
            Or(a, b) => {
                let pos = bits.next().unwrap_or(false);
                let (a, b) = (a.polarize_with(bits)?, b.polarize_with(bits)?);
                if pos {
                    Formula::plus(a, b)
                } else {
                    Formula::par(a, b)
                }
            }
            Tt => {
                if bits.next().unwrap_or(false) {
                    Formula::One
                } else {
                    Formula::Top
                }
            }
            Ff => {
                if bits.next().unwrap_or(false) {
                    Formula::Zero
                } else {
                    Formula::Bot
                }
            }
            Eq(t, u) => Formula::Eq(t.clone(), u.clone()),
            Neq(t, u) => Formula::Neq(t.clone(), u.clone()),
            Forall(h, b) => Formula::Forall(h.clone(), Box::new(b.polarize_with(bits)?)),
            Exists(h, b) => Formula::Exists(h.clone(), Box::new(b.polarize_with(bits)?)),
            HatForall(..) | HatExists(..) => return Err(PolarizeError::Hatted),
            Mu(body, args) | Nu(body, args) => {
                let f = body.formula.polarize_with(bits)?;
                let b = Arc::new(Body::new(body.pred.clone(), body.params.clone(), f));
                if matches!(self, Mu(..)) {
                    Formula::Mu(b, args.clone())
                } else {
                    Formula::Nu(b, args.clone())
                }
            }
            Var(k, args) => Formula::Var(*k, args.clone()),
            Fixed(f) => f.clone(),
        })
    }

    /// Forgets polarities. Exponentials are expanded first.
    pub fn depolarize(f: &Formula) -> UFormula {
        if f.contains_exponentials() {
            return UFormula::depolarize(&f.expand_exponentials());
        }
        use Formula as F;
        match f {
            F::Tensor(a, b) | F::With(a, b) => UFormula::and(Self::depolarize(a), Self::depolarize(b)),
            F::Par(a, b) | F::Plus(a, b) => UFormula::or(Self::depolarize(a), Self::depolarize(b)),
            F::One | F::Top => UFormula::Tt,
            F::Bot | F::Zero => UFormula::Ff,
            F::Eq(t, u) => UFormula::Eq(t.clone(), u.clone()),
            F::Neq(t, u) => UFormula::Neq(t.clone(), u.clone()),
            F::Forall(h, b) => UFormula::Forall(h.clone(), bx(Self::depolarize(b))),
            F::Exists(h, b) => UFormula::Exists(h.clone(), bx(Self::depolarize(b))),
            F::Mu(body, args) | F::Nu(body, args) => {
                let ub = Arc::new(UBody {
                    pred: body.pred.clone(),
                    params: body.params.clone(),
                    formula: Self::depolarize(&body.formula),
                });
                if matches!(f, F::Mu(..)) {
                    UFormula::Mu(ub, args.clone())
                } else {
                    UFormula::Nu(ub, args.clone())
                }
            }
            F::Var(k, args) => UFormula::Var(*k, args.clone()),
            F::Bang(_) | F::Quest(_) => unreachable!("expanded above"),
        }
    }

    /// Replaces `∀̂x. B` by `∀x. nat̄ x ∨ B` and `∃̂x. B` by `∃x. nat x ∧ B`.
    pub fn peano_translate(&self, nat: &Arc<Body>) -> UFormula {
        use UFormula::*;
        let rel = |b: &UFormula| b.peano_translate(nat);
        match self {
            And(a, b) => And(bx(rel(a)), bx(rel(b))),
            Or(a, b) => Or(bx(rel(a)), bx(rel(b))),
            Forall(h, b) => Forall(h.clone(), bx(rel(b))),
            Exists(h, b) => Exists(h.clone(), bx(rel(b))),
            HatForall(h, b) => {
                let guard = Fixed(Formula::Mu(nat.clone(), vec![Term::Bound(0)]).dual());
                Forall(h.clone(), bx(UFormula::or(guard, rel(b))))
            }
            HatExists(h, b) => {
                let guard = Fixed(Formula::Mu(nat.clone(), vec![Term::Bound(0)]));
                Exists(h.clone(), bx(UFormula::and(guard, rel(b))))
            }
            Mu(body, args) | Nu(body, args) => {
                let ub = Arc::new(UBody {
                    pred: body.pred.clone(),
                    params: body.params.clone(),
                    formula: rel(&body.formula),
                });
                if matches!(self, Mu(..)) {
                    Mu(ub, args.clone())
                } else {
                    Nu(ub, args.clone())
                }
            }
            Tt | Ff | Eq(..) | Neq(..) | Var(..) | Fixed(_) => self.clone(),
        }
    }

    pub fn has_hats(&self) -> bool {
        use UFormula::*;
        match self {
            HatForall(..) | HatExists(..) => true,
            And(a, b) | Or(a, b) => a.has_hats() || b.has_hats(),
            Forall(_, b) | Exists(_, b) => b.has_hats(),
            Mu(body, _) | Nu(body, _) => body.formula.has_hats(),
            _ => false,
        }
    }

    pub fn free_vars(&self) -> Vec<Name> {
        let mut out = IndexSet::new();
        self.collect_vars(&mut out);
        out.into_iter().collect()
    }

    fn collect_vars(&self, out: &mut IndexSet<Name>) {
        use UFormula::*;
        match self {
            And(a, b) | Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Tt | Ff => {}
            Eq(t, u) | Neq(t, u) => {
                t.free_vars().into_iter().for_each(|x| {
                    out.insert(x);
                });
                u.free_vars().into_iter().for_each(|x| {
                    out.insert(x);
                });
            }
            Forall(_, b) | Exists(_, b) | HatForall(_, b) | HatExists(_, b) => b.collect_vars(out),
            Mu(body, args) | Nu(body, args) => {
                body.formula.collect_vars(out);
                for t in args {
                    t.free_vars().into_iter().for_each(|x| {
                        out.insert(x);
                    });
                }
            }
            Var(_, args) => {
                for t in args {
                    t.free_vars().into_iter().for_each(|x| {
                        out.insert(x);
                    });
                }
            }
            Fixed(f) => f.collect_vars(out),
        }
    }
}

impl UBody {
    pub fn dual(&self) -> UBody {
        UBody { pred: self.pred.clone(), params: self.params.clone(), formula: self.formula.dual() }
    }
}

impl std::fmt::Debug for UFormula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", crate::syntax::printer::Printer::new().uformula(self))
    }
}

impl std::fmt::Display for UFormula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", crate::syntax::printer::Printer::new().uformula(self))
    }
}

impl std::fmt::Debug for UBody {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?}", UFormula::Mu(Arc::new(self.clone()), vec![]))
    }
}
