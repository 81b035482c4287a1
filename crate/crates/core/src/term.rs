//! First-order terms of type ι, numerals, substitutions and eigenvariable
//! signatures.
//!
//! Terms that appear inside formulas are always in canonical (β-normal,
//! η-short) first-order form: a free variable, a de Bruijn index pointing at
//! an enclosing quantifier or abstraction, or a constructor applied to
//! exactly its declared number of arguments. General simply-typed λ-terms
//! live in [`crate::lambda`] and are normalized into this shape.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use indexmap::IndexSet;

/// Interned-ish identifier used for variables, constructors and definitions.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

/// Display hint attached to a binder.
///
/// Hints never participate in comparisons, so structural equality on terms
/// and formulas is α-equivalence.
#[derive(Clone)]
pub struct Hint(pub Name);

impl Hint {
    pub fn new(s: &str) -> Self {
        Hint(name(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl PartialEq for Hint {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Hint {}

impl Hash for Hint {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

impl PartialOrd for Hint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Hint {
    fn cmp(&self, _: &Self) -> Ordering {
        Ordering::Equal
    }
}

impl fmt::Debug for Hint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub const ZERO: &str = "z";
pub const SUCC: &str = "s";

/// A canonical first-order term of type ι.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// Free (eigen)variable, a member of the ambient signature.
    Var(Name),
    /// De Bruijn index of an enclosing term binder.
    Bound(u32),
    /// Constructor applied to all of its arguments.
    Con(Name, Arc<[Term]>),
}

impl Term {
    pub fn var(s: &str) -> Term {
        Term::Var(name(s))
    }

    pub fn constant(c: &str) -> Term {
        Term::Con(name(c), Arc::from(Vec::new()))
    }

    pub fn app(c: &str, args: Vec<Term>) -> Term {
        Term::Con(name(c), Arc::from(args))
    }

    pub fn zero() -> Term {
        Term::constant(ZERO)
    }

    pub fn succ(t: Term) -> Term {
        Term::app(SUCC, vec![t])
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) | Term::Bound(_) => false,
            Term::Con(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// True when the term mentions no de Bruijn index.
    pub fn is_locally_closed(&self) -> bool {
        match self {
            Term::Var(_) => true,
            Term::Bound(_) => false,
            Term::Con(_, args) => args.iter().all(Term::is_locally_closed),
        }
    }

    /// True when some free variable occurs.
    pub fn has_vars(&self) -> bool {
        match self {
            Term::Var(_) => true,
            Term::Bound(_) => false,
            Term::Con(_, args) => args.iter().any(Term::has_vars),
        }
    }

    pub fn occurs(&self, x: &str) -> bool {
        match self {
            Term::Var(y) => &**y == x,
            Term::Bound(_) => false,
            Term::Con(_, args) => args.iter().any(|a| a.occurs(x)),
        }
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<Name> {
        let mut out = IndexSet::new();
        self.collect_vars(&mut out);
        out.into_iter().collect()
    }

    pub(crate) fn collect_vars(&self, out: &mut IndexSet<Name>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Bound(_) => {}
            Term::Con(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Bound(_) => 1,
            Term::Con(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Simultaneous replacement of free variables.
    pub fn apply(&self, theta: &Substitution) -> Term {
        if theta.is_empty() {
            return self.clone();
        }
        match self {
            Term::Var(x) => theta.get(x).cloned().unwrap_or_else(|| self.clone()),
            Term::Bound(_) => self.clone(),
            Term::Con(c, args) => {
                if !args.iter().any(|a| a.mentions_any(theta)) {
                    return self.clone();
                }
                Term::Con(c.clone(), args.iter().map(|a| a.apply(theta)).collect())
            }
        }
    }

    fn mentions_any(&self, theta: &Substitution) -> bool {
        match self {
            Term::Var(x) => theta.contains(x),
            Term::Bound(_) => false,
            Term::Con(_, args) => args.iter().any(|a| a.mentions_any(theta)),
        }
    }

    /// Adds `d` to every index at or above `cutoff`.
    pub fn shift(&self, d: u32, cutoff: u32) -> Term {
        if d == 0 {
            return self.clone();
        }
        match self {
            Term::Bound(k) if *k >= cutoff => Term::Bound(k + d),
            Term::Con(c, args) if !args.is_empty() => {
                Term::Con(c.clone(), args.iter().map(|a| a.shift(d, cutoff)).collect())
            }
            _ => self.clone(),
        }
    }

    /// Replaces the `args.len()` innermost binders seen from `depth` enclosing
    /// binders. `args[j]` fills the j-th parameter (the last parameter is the
    /// innermost binder) and is itself expressed relative to the context
    /// outside those `depth` binders.
    pub fn instantiate(&self, depth: u32, args: &[Term]) -> Term {
        let n = args.len() as u32;
        match self {
            Term::Bound(k) if *k >= depth => {
                let k = k - depth;
                if k < n {
                    args[(n - 1 - k) as usize].shift(depth, 0)
                } else {
                    Term::Bound(depth + k - n)
                }
            }
            Term::Con(c, a) if !a.is_empty() => {
                Term::Con(c.clone(), a.iter().map(|t| t.instantiate(depth, args)).collect())
            }
            _ => self.clone(),
        }
    }

    /// True when some index escapes `depth` binders.
    pub fn has_loose(&self, depth: u32) -> bool {
        match self {
            Term::Bound(k) => *k >= depth,
            Term::Var(_) => false,
            Term::Con(_, args) => args.iter().any(|a| a.has_loose(depth)),
        }
    }

    /// Replaces the free variable `x` by the de Bruijn index `depth`.
    pub fn abstract_var(&self, x: &str, depth: u32) -> Term {
        match self {
            Term::Var(y) if &**y == x => Term::Bound(depth),
            Term::Bound(k) if *k >= depth => Term::Bound(k + 1),
            Term::Con(c, args) if !args.is_empty() => {
                Term::Con(c.clone(), args.iter().map(|a| a.abstract_var(x, depth)).collect())
            }
            _ => self.clone(),
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = term_to_numeral(self) {
            return write!(f, "{n}");
        }
        match self {
            Term::Var(x) => write!(f, "{x}"),
            Term::Bound(k) => write!(f, "#{k}"),
            Term::Con(c, args) => {
                write!(f, "{c}")?;
                for a in args.iter() {
                    write!(f, " ")?;
                    if matches!(a, Term::Con(_, xs) if !xs.is_empty()) && term_to_numeral(a).is_none() {
                        write!(f, "({a:?})")?;
                    } else {
                        write!(f, "{a:?}")?;
                    }
                }
                Ok(())
            }
        }
    }
}

/// `s^n z`.
pub fn numeral(n: u64) -> Term {
    let mut t = Term::zero();
    for _ in 0..n {
        t = Term::succ(t);
    }
    t
}

/// Inverse of [`numeral`]; `None` for anything that is not a closed
/// `{z, s}` term.
pub fn term_to_numeral(t: &Term) -> Option<u64> {
    let mut n = 0u64;
    let mut cur = t;
    loop {
        match cur {
            Term::Con(c, args) if &**c == ZERO && args.is_empty() => return Some(n),
            Term::Con(c, args) if &**c == SUCC && args.len() == 1 => {
                n += 1;
                cur = &args[0];
            }
            _ => return None,
        }
    }
}

/// A finite idempotent map from variable names to terms.
///
/// Identity bindings `x ↦ x` are never stored.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    map: BTreeMap<Name, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(x: Name, t: Term) -> Self {
        let mut s = Self::new();
        s.insert(x, t);
        s
    }

    pub fn from_pairs<I: IntoIterator<Item = (Name, Term)>>(pairs: I) -> Self {
        let mut s = Self::new();
        for (x, t) in pairs {
            s.insert(x, t);
        }
        s
    }

    /// Raw insertion; callers are responsible for idempotence.
    pub fn insert(&mut self, x: Name, t: Term) {
        if matches!(&t, Term::Var(y) if *y == x) {
            self.map.remove(&x);
        } else {
            self.map.insert(x, t);
        }
    }

    pub fn get(&self, x: &str) -> Option<&Term> {
        self.map.get(x)
    }

    pub fn contains(&self, x: &str) -> bool {
        self.map.contains_key(x)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Term)> {
        self.map.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Name> {
        self.map.keys()
    }

    /// Free variables of the range, in domain order then occurrence order.
    pub fn range_vars(&self) -> Vec<Name> {
        let mut out = IndexSet::new();
        for t in self.map.values() {
            t.collect_vars(&mut out);
        }
        out.into_iter().collect()
    }

    pub fn is_idempotent(&self) -> bool {
        self.map
            .values()
            .all(|t| self.map.keys().all(|x| !t.occurs(x)))
    }

    pub(crate) fn map_values(&mut self, f: impl Fn(&Term) -> Term) {
        for v in self.map.values_mut() {
            *v = f(v);
        }
        self.map.retain(|x, t| !matches!(t, Term::Var(y) if y == x));
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (x, t)) in self.map.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x} ↦ {t:?}")?;
        }
        write!(f, "}}")
    }
}

/// Ordered set of eigenvariables, all of type ι.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Signature {
    vars: IndexSet<Name>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_names<I: IntoIterator<Item = Name>>(names: I) -> Self {
        Signature { vars: names.into_iter().collect() }
    }

    pub fn contains(&self, x: &str) -> bool {
        self.vars.contains(x)
    }

    /// Returns false when `x` was already present.
    pub fn insert(&mut self, x: Name) -> bool {
        self.vars.insert(x)
    }

    pub fn with(&self, x: Name) -> Signature {
        let mut s = self.clone();
        s.insert(x);
        s
    }

    pub fn remove(&mut self, x: &str) -> bool {
        self.vars.shift_remove(x)
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Name> {
        self.vars.iter()
    }

    /// Σθ: drop the domain of θ, then append the free variables of its range.
    pub fn update(&self, theta: &Substitution) -> Signature {
        let mut vars: IndexSet<Name> =
            self.vars.iter().filter(|x| !theta.contains(x)).cloned().collect();
        for x in theta.range_vars() {
            vars.insert(x);
        }
        Signature { vars }
    }

    /// A name of the form `{prefix}{n}` that is not in the signature.
    pub fn fresh(&self, prefix: &str) -> Name {
        (0..)
            .map(|i| format!("{prefix}{i}"))
            .find(|c| !self.vars.contains(c.as_str()))
            .map(|c| name(&c))
            .unwrap()
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.vars.iter()).finish()
    }
}

/// The ambient table of term constructors. Always contains `z : ι` and
/// `s : ι → ι`; users may add further first-order constructors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constructors {
    table: BTreeMap<Name, usize>,
}

impl Default for Constructors {
    fn default() -> Self {
        let mut table = BTreeMap::new();
        table.insert(name(ZERO), 0);
        table.insert(name(SUCC), 1);
        Constructors { table }
    }
}

impl Constructors {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn arity(&self, c: &str) -> Option<usize> {
        self.table.get(c).copied()
    }

    /// Returns false if the constructor already exists with a different arity.
    pub fn declare(&mut self, c: Name, arity: usize) -> bool {
        match self.table.get(&c) {
            Some(a) => *a == arity,
            None => {
                self.table.insert(c, arity);
                true
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, usize)> {
        self.table.iter().map(|(c, a)| (c, *a))
    }

    /// Every constructor application has the declared number of arguments.
    pub fn well_formed(&self, t: &Term) -> bool {
        match t {
            Term::Var(_) | Term::Bound(_) => true,
            Term::Con(c, args) => {
                self.arity(c) == Some(args.len()) && args.iter().all(|a| self.well_formed(a))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numerals() {
        assert_eq!(numeral(0), Term::zero());
        assert_eq!(
            numeral(4),
            Term::succ(Term::succ(Term::succ(Term::succ(Term::zero()))))
        );
        for n in 0..50 {
            assert_eq!(term_to_numeral(&numeral(n)), Some(n));
        }
        assert_eq!(term_to_numeral(&Term::succ(Term::var("x"))), None);
        assert_eq!(term_to_numeral(&Term::app("pair", vec![numeral(1), numeral(2)])), None);
    }

    #[test]
    fn apply_is_simultaneous() {
        let t = Term::app("pair", vec![Term::var("x"), Term::var("y")]);
        let theta = Substitution::from_pairs([(name("x"), Term::var("y")), (name("y"), Term::zero())]);
        assert_eq!(
            t.apply(&theta),
            Term::app("pair", vec![Term::var("y"), Term::zero()])
        );
        let theta = Substitution::singleton(name("x"), numeral(2));
        assert_eq!(Term::succ(Term::var("x")).apply(&theta), numeral(3));
        assert_eq!(t.apply(&Substitution::new()), t);
    }

    #[test]
    fn identity_bindings_are_dropped() {
        let s = Substitution::singleton(name("x"), Term::var("x"));
        assert!(s.is_empty());
    }

    #[test]
    fn signature_update() {
        let sig = Signature::from_names([name("x"), name("y")]);
        let th = Substitution::singleton(name("x"), Term::succ(Term::var("y")));
        assert_eq!(sig.update(&th), Signature::from_names([name("y")]));
        let sig = Signature::from_names([name("x")]);
        assert!(sig.update(&Substitution::singleton(name("x"), Term::zero())).is_empty());
        let th = Substitution::singleton(name("x"), Term::succ(Term::var("w")));
        assert_eq!(sig.update(&th), Signature::from_names([name("w")]));
    }

    #[test]
    fn instantiate_binders() {
        // two binders (a, b): b is index 0, a is index 1
        let body = Term::app("pair", vec![Term::Bound(1), Term::succ(Term::Bound(0))]);
        let out = body.instantiate(0, &[numeral(1), Term::var("y")]);
        assert_eq!(out, Term::app("pair", vec![numeral(1), Term::succ(Term::var("y"))]));
        // loose index beyond the instantiated binders shifts down
        assert_eq!(Term::Bound(3).instantiate(0, &[Term::zero()]), Term::Bound(2));
        // under one extra binder the replacement is shifted
        assert_eq!(Term::Bound(1).instantiate(1, &[Term::Bound(0)]), Term::Bound(1));
    }
}
