//! Concrete syntax of `.mumall` files: terms, formulas, definitions,
//! theorems, proof scripts and compute queries.
//!
//! ```text
//! constructor pair : i -> i -> i
//! define nat := mu (N x => x = z + ex y. x = s y * N y)
//! define even x := ex y. nat y * x = s (s y)
//! theorem two : nat 2
//! proof two [core] { mu { plus(1) { ex(1) { tensor { eq; mu { ... } } } } } }
//! query p22 := compute(plus, 2, 2)
//! ```

pub mod lexer;
pub mod parser;
pub mod printer;

use thiserror::Error;

use crate::checker::{ProofNode, RuleSet, Sequent};
use crate::formula::{Formula, Pred};
use crate::lambda::SimpleType;
use crate::term::{Constructors, Name, Signature, Term};
use crate::uformula::UFormula;

pub use parser::{parse, parse_formula, parse_pred, parse_proof, parse_term};
pub use printer::Printer;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {col}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl SyntaxError {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        SyntaxError { line, col, message: message.into() }
    }
}

/// A parsed formula: polarized unless it uses one of the unpolarized-only
/// connectives (`/\`, `\/`, `tt`, `ff`, `=>`, `all^`, `ex^`).
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AnyFormula {
    Polarized(Formula),
    Unpolarized(UFormula),
}

impl AnyFormula {
    pub fn polarized(&self) -> Option<&Formula> {
        match self {
            AnyFormula::Polarized(f) => Some(f),
            AnyFormula::Unpolarized(_) => None,
        }
    }
}

/// Named predicates, in declaration order.
#[derive(Clone, Default, Debug)]
pub struct Definitions {
    entries: Vec<(Name, Pred)>,
}

impl Definitions {
    pub fn new() -> Self {
        Self::default()
    }
    pub fn get(&self, name: &str) -> Option<&Pred> {
        self.entries.iter().rev().find(|(n, _)| &**n == name).map(|(_, p)| p)
    }
    pub fn insert(&mut self, name: Name, pred: Pred) {
        self.entries.push((name, pred));
    }
    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Pred)> {
        self.entries.iter().map(|(n, p)| (n, p))
    }
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofHeader {
    pub rules: RuleSet,
    /// Choice vector used when the theorem is unpolarized.
    pub polarization: Option<Vec<bool>>,
}

#[derive(Clone, Debug)]
pub enum Decl {
    Constructor { name: Name, ty: SimpleType },
    Define { name: Name, pred: Pred },
    Theorem { name: Name, formulas: Vec<AnyFormula> },
    Proof { name: Name, header: ProofHeader, tree: ProofNode },
    Query { name: Name, pred: Name, args: Vec<Term> },
}

#[derive(Clone, Debug, Default)]
pub struct SourceFile {
    pub decls: Vec<Decl>,
    pub constructors: Constructors,
    pub definitions: Definitions,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GoalError {
    #[error("no theorem named {0}")]
    Missing(String),
    #[error("theorem {0} is unpolarized; give a polarization")]
    NeedsPolarization(String),
    #[error("theorem {0}: {1}")]
    Polarize(String, crate::uformula::PolarizeError),
}

impl SourceFile {
    pub fn theorem(&self, name: &str) -> Option<&[AnyFormula]> {
        self.decls.iter().find_map(|d| match d {
            Decl::Theorem { name: n, formulas } if &**n == name => Some(formulas.as_slice()),
            _ => None,
        })
    }

    pub fn proofs(&self) -> impl Iterator<Item = (&Name, &ProofHeader, &ProofNode)> {
        self.decls.iter().filter_map(|d| match d {
            Decl::Proof { name, header, tree } => Some((name, header, tree)),
            _ => None,
        })
    }

    pub fn queries(&self) -> impl Iterator<Item = (&Name, &Name, &[Term])> {
        self.decls.iter().filter_map(|d| match d {
            Decl::Query { name, pred, args } => Some((name, pred, args.as_slice())),
            _ => None,
        })
    }

    pub fn query(&self, name: &str) -> Option<(&Name, &[Term])> {
        self.queries().find(|(n, _, _)| &***n == name).map(|(_, p, a)| (p, a))
    }

    /// The sequent a theorem denotes. Unpolarized formulas need a choice
    /// vector per formula, concatenated; hatted quantifiers are translated
    /// through `nat` when it is defined.
    pub fn goal(&self, name: &str, polarization: Option<&[bool]>) -> Result<Sequent, GoalError> {
        let formulas = self.theorem(name).ok_or_else(|| GoalError::Missing(name.to_string()))?;
        let mut bits = polarization.unwrap_or(&[]);
        let mut out = Vec::new();
        for f in formulas {
            match f {
                AnyFormula::Polarized(f) => out.push(f.clone()),
                AnyFormula::Unpolarized(u) => {
                    if polarization.is_none() {
                        return Err(GoalError::NeedsPolarization(name.to_string()));
                    }
                    let u = self.translate(u);
                    let n = u.connective_count().min(bits.len());
                    let (mine, rest) = bits.split_at(n);
                    bits = rest;
                    out.push(u.polarize(mine).map_err(|e| GoalError::Polarize(name.to_string(), e))?);
                }
            }
        }
        if !bits.is_empty() {
            let e = crate::uformula::PolarizeError::ChoiceCount {
                expected: polarization.map_or(0, |p| p.len()) - bits.len(),
                found: polarization.map_or(0, |p| p.len()),
            };
            return Err(GoalError::Polarize(name.to_string(), e));
        }
        let mut sig = Signature::new();
        for f in &out {
            for x in f.free_vars() {
                sig.insert(x);
            }
        }
        Ok(Sequent::new(sig, out))
    }

    /// Applies the relativization of hatted quantifiers when `nat` is
    /// defined as a least fixed point.
    pub fn translate(&self, u: &UFormula) -> UFormula {
        match self.definitions.get("nat") {
            Some(Pred::Fix(crate::formula::FixKind::Mu, body)) if u.has_hats() => u.peano_translate(body),
            _ => u.clone(),
        }
    }

    pub fn printer(&self) -> Printer {
        Printer::with_definitions(&self.definitions)
    }
}
