//! Proof checking and computation for linear logic with fixed points over
//! first-order terms.

pub mod checker;
pub mod compute;
pub mod derive;
pub mod formula;
pub mod lambda;
pub mod semantics;
pub mod stdlib;
pub mod syntax;
pub mod term;
pub mod uformula;
pub mod unify;

pub use checker::{check, CheckReport, Mode, ProofNode, Rule, RuleSet, Sequent};
pub use formula::{Body, FixKind, Formula, HierarchyClass, Polarity, Pred};
pub use term::{numeral, Name, Signature, Substitution, Term};
pub use uformula::UFormula;
