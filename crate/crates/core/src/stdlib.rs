//! Shipped definitions, proof scripts and derived-rule constructors.
//!
//! The corpus files under `corpus/` are compiled into the library, so the
//! shipped scripts are always available without a path.

use thiserror::Error;

use crate::checker::{check_with, CheckFailure, ProofNode, Rule, RuleSet, Sequent, Side};
use crate::semantics::{soundness_sweep, SweepItem, SweepReport};
use crate::syntax::{parse, AnyFormula, Decl, Definitions, GoalError, ProofHeader, SourceFile, SyntaxError};
use crate::term::{numeral, Name};
use crate::uformula::UFormula;

pub use crate::derive::{derived_structural, derived_structural_at, quest, Structural};
pub use crate::formula::quest_body;

pub const PRELUDE: &str = include_str!("../corpus/prelude.mumall");

/// Every shipped corpus file, by file name.
pub const CORPUS: &[(&str, &str)] = &[
    ("ack_totality.mumall", include_str!("../corpus/ack_totality.mumall")),
    ("arith.mumall", include_str!("../corpus/arith.mumall")),
    ("peano.mumall", include_str!("../corpus/peano.mumall")),
    ("plus_determinacy.mumall", include_str!("../corpus/plus_determinacy.mumall")),
    ("plus_totality.mumall", include_str!("../corpus/plus_totality.mumall")),
    ("prelude.mumall", PRELUDE),
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StdlibError {
    #[error("{file}: {error}")]
    Syntax { file: String, error: SyntaxError },
    #[error("{file}: {error}")]
    Goal { file: String, error: GoalError },
}

/// `nat`, `plus`, `mult` and `ack` as least fixed points.
pub fn definitions() -> Definitions {
    parse(PRELUDE).expect("the prelude parses").definitions
}

/// The parsed corpus, in file-name order.
pub fn corpus() -> Result<Vec<(&'static str, SourceFile)>, StdlibError> {
    CORPUS
        .iter()
        .map(|(file, src)| {
            parse(src).map(|f| (*file, f)).map_err(|error| StdlibError::Syntax { file: file.to_string(), error })
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct ShippedProof {
    pub file: &'static str,
    pub name: Name,
    pub header: ProofHeader,
    pub tree: ProofNode,
    pub goal: Sequent,
}

impl ShippedProof {
    pub fn check(&self) -> crate::checker::CheckReport {
        self.check_under(self.header.rules)
    }

    /// Checks against another rule set, e.g. with the Σ₁ restriction added.
    pub fn check_under(&self, rules: RuleSet) -> crate::checker::CheckReport {
        let cons = corpus_constructors(self.file);
        check_with(&self.tree, &self.goal, rules, &cons).named(&self.name)
    }
}

fn corpus_constructors(file: &str) -> crate::term::Constructors {
    let src = CORPUS.iter().find(|(f, _)| *f == file).map_or("", |(_, s)| s);
    parse(src).map(|f| f.constructors).unwrap_or_default()
}

fn proofs_of(file: &'static str, f: &SourceFile) -> Result<Vec<ShippedProof>, StdlibError> {
    f.proofs()
        .map(|(name, header, tree)| {
            let goal = f
                .goal(name, header.polarization.as_deref())
                .map_err(|error| StdlibError::Goal { file: file.to_string(), error })?;
            Ok(ShippedProof { file, name: name.clone(), header: header.clone(), tree: tree.clone(), goal })
        })
        .collect()
}

/// Every proof script in the corpus, sorted by name.
pub fn shipped_proofs() -> Result<Vec<ShippedProof>, StdlibError> {
    let mut out = Vec::new();
    for (file, f) in corpus()? {
        out.extend(proofs_of(file, &f)?);
    }
    out.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub file: &'static str,
    pub name: Name,
    pub rules: RuleSet,
    pub failure: Option<CheckFailure>,
}

impl CorpusEntry {
    pub fn accepted(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks every shipped proof in its declared mode.
pub fn check_corpus() -> Result<Vec<CorpusEntry>, StdlibError> {
    Ok(shipped_proofs()?
        .into_iter()
        .map(|p| {
            let r = p.check();
            CorpusEntry { file: p.file, name: p.name, rules: p.header.rules, failure: r.failure }
        })
        .collect())
}

/// Bounded evaluation of every accepted corpus conclusion.
pub fn corpus_sweep(fuel: u32, qbound: u64) -> Result<SweepReport, StdlibError> {
    let proofs = shipped_proofs()?;
    let mut report = SweepReport::default();
    // constructors differ per file, so sweep file by file and merge
    for (file, _) in CORPUS {
        let items: Vec<SweepItem<'_>> = proofs
            .iter()
            .filter(|p| p.file == *file)
            .map(|p| SweepItem { name: &p.name, proof: &p.tree, goal: &p.goal, rules: p.header.rules })
            .collect();
        let r = soundness_sweep(&items, &corpus_constructors(file), fuel, qbound);
        report.entries.extend(r.entries);
        report.true_count += r.true_count;
        report.unknown_count += r.unknown_count;
        report.false_count += r.false_count;
        report.skipped.extend(r.skipped);
    }
    Ok(report)
}

/// A derivation of `⊢ nat n` in Core mode.
pub fn nat_proof(n: u64) -> ProofNode {
    let node = ProofNode::new;
    let mut p = node(Rule::Mu, 0, vec![node(Rule::Plus(Side::Left), 0, vec![ProofNode::leaf(Rule::Eq, 0)])]);
    for k in 0..n {
        let step = node(Rule::Tensor(vec![]), 0, vec![ProofNode::leaf(Rule::Eq, 0), p]);
        p = node(Rule::Mu, 0, vec![node(Rule::Plus(Side::Right), 0, vec![node(Rule::Exists(numeral(k)), 0, vec![step])])]);
    }
    p
}

#[derive(Clone, Debug)]
pub struct PeanoAxiom {
    pub name: Name,
    /// Before relativization of the hatted quantifiers.
    pub formula: UFormula,
    pub proof: Option<ShippedProof>,
}

/// The six axioms in relational form followed by the induction instance
/// for `A x := plus x z x`, with the proofs that ship.
pub fn peano_axioms() -> Vec<PeanoAxiom> {
    let (file, src) = CORPUS.iter().find(|(f, _)| *f == "peano.mumall").expect("peano corpus file");
    let f = parse(src).expect("peano corpus parses");
    let proofs = proofs_of(file, &f).expect("peano goals polarize");
    const ORDER: [&str; 7] =
        ["succ_not_zero", "plus_succ", "succ_inj", "mult_zero", "plus_zero", "mult_succ", "induction"];
    ORDER
        .iter()
        .map(|n| {
            let formula = f
                .decls
                .iter()
                .find_map(|d| match d {
                    Decl::Theorem { name, formulas } if &**name == *n => match formulas.as_slice() {
                        [AnyFormula::Unpolarized(u)] => Some(u.clone()),
                        _ => None,
                    },
                    _ => None,
                })
                .expect("peano axiom is a single unpolarized formula");
            let proof = proofs.iter().find(|p| &*p.name == *n).cloned();
            PeanoAxiom { name: crate::term::name(n), formula, proof }
        })
        .collect()
}
