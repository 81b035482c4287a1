//! Simply-typed λ-terms over the base types ι and o.
//!
//! Binders are nameless (de Bruijn indices); the name stored at an
//! abstraction is a display hint only. Canonical form is β-normal and
//! η-short. First-order terms of type ι in canonical form convert losslessly
//! to [`Term`].

use std::fmt;

use thiserror::Error;

use crate::term::{name, Constructors, Hint, Name, Substitution, Term};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SimpleType {
    Iota,
    O,
    Arrow(Box<SimpleType>, Box<SimpleType>),
}

impl SimpleType {
    pub fn arrow(a: SimpleType, b: SimpleType) -> Self {
        SimpleType::Arrow(Box::new(a), Box::new(b))
    }

    /// `ι → … → ι → target` with `n` arguments.
    pub fn first_order(n: usize, target: SimpleType) -> Self {
        (0..n).fold(target, |acc, _| SimpleType::arrow(SimpleType::Iota, acc))
    }

    /// Number of leading ι arguments, if the type is `ι → … → ι`.
    pub fn iota_arity(&self) -> Option<usize> {
        match self {
            SimpleType::Iota => Some(0),
            SimpleType::O => None,
            SimpleType::Arrow(a, b) if **a == SimpleType::Iota => b.iota_arity().map(|n| n + 1),
            SimpleType::Arrow(..) => None,
        }
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimpleType::Iota => write!(f, "i"),
            SimpleType::O => write!(f, "o"),
            SimpleType::Arrow(a, b) => match **a {
                SimpleType::Arrow(..) => write!(f, "({a}) -> {b}"),
                _ => write!(f, "{a} -> {b}"),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LTerm {
    /// Free variable of type ι.
    Var(Name),
    Bound(u32),
    Const(Name),
    App(Box<LTerm>, Box<LTerm>),
    Abs(Hint, SimpleType, Box<LTerm>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TypeError {
    #[error("unknown constructor `{name}` at {path:?}")]
    UnknownConstructor { name: Name, path: Vec<u8> },
    #[error("unbound index {index} at {path:?}")]
    Unbound { index: u32, path: Vec<u8> },
    #[error("applying a term of type {found} at {path:?}")]
    NotAFunction { found: SimpleType, path: Vec<u8> },
    #[error("argument of type {found} where {expected} was expected at {path:?}")]
    Mismatch {
        expected: SimpleType,
        found: SimpleType,
        path: Vec<u8>,
    },
    #[error("term of type {found} is not first-order of type i")]
    NotFirstOrder { found: SimpleType },
}

impl LTerm {
    pub fn var(s: &str) -> Self {
        LTerm::Var(name(s))
    }

    pub fn cons(s: &str) -> Self {
        LTerm::Const(name(s))
    }

    pub fn app(f: LTerm, a: LTerm) -> Self {
        LTerm::App(Box::new(f), Box::new(a))
    }

    pub fn lam(hint: &str, ty: SimpleType, body: LTerm) -> Self {
        LTerm::Abs(Hint::new(hint), ty, Box::new(body))
    }

    /// Infers the type under `ctx` (innermost binder last). Loose indices past
    /// the context are taken to have type ι, matching how term arguments sit
    /// under formula-level quantifiers.
    pub fn type_of(&self, cons: &Constructors, ctx: &mut Vec<SimpleType>) -> Result<SimpleType, TypeError> {
        let mut path = Vec::new();
        self.infer(cons, ctx, &mut path)
    }

    fn infer(
        &self,
        cons: &Constructors,
        ctx: &mut Vec<SimpleType>,
        path: &mut Vec<u8>,
    ) -> Result<SimpleType, TypeError> {
        match self {
            LTerm::Var(_) => Ok(SimpleType::Iota),
            LTerm::Bound(k) => {
                let k = *k as usize;
                if k < ctx.len() {
                    Ok(ctx[ctx.len() - 1 - k].clone())
                } else {
                    Ok(SimpleType::Iota)
                }
            }
            LTerm::Const(c) => cons
                .arity(c)
                .map(|n| SimpleType::first_order(n, SimpleType::Iota))
                .ok_or_else(|| TypeError::UnknownConstructor { name: c.clone(), path: path.clone() }),
            LTerm::App(f, a) => {
                path.push(0);
                let ft = f.infer(cons, ctx, path)?;
                path.pop();
                path.push(1);
                let at = a.infer(cons, ctx, path)?;
                path.pop();
                match ft {
                    SimpleType::Arrow(dom, cod) => {
                        if *dom == at {
                            Ok(*cod)
                        } else {
                            Err(TypeError::Mismatch { expected: *dom, found: at, path: path.clone() })
                        }
                    }
                    other => Err(TypeError::NotAFunction { found: other, path: path.clone() }),
                }
            }
            LTerm::Abs(_, ty, body) => {
                ctx.push(ty.clone());
                path.push(0);
                let bt = body.infer(cons, ctx, path);
                path.pop();
                ctx.pop();
                Ok(SimpleType::arrow(ty.clone(), bt?))
            }
        }
    }

    fn shift(&self, d: i64, cutoff: u32) -> LTerm {
        match self {
            LTerm::Bound(k) if *k >= cutoff => LTerm::Bound((*k as i64 + d) as u32),
            LTerm::App(f, a) => LTerm::app(f.shift(d, cutoff), a.shift(d, cutoff)),
            LTerm::Abs(h, t, b) => LTerm::Abs(h.clone(), t.clone(), Box::new(b.shift(d, cutoff + 1))),
            _ => self.clone(),
        }
    }

    /// Substitutes `v` for index `j`, lowering the indices above it.
    fn subst_top(&self, j: u32, v: &LTerm) -> LTerm {
        match self {
            LTerm::Bound(k) if *k == j => v.shift(j as i64, 0),
            LTerm::Bound(k) if *k > j => LTerm::Bound(k - 1),
            LTerm::App(f, a) => LTerm::app(f.subst_top(j, v), a.subst_top(j, v)),
            LTerm::Abs(h, t, b) => LTerm::Abs(h.clone(), t.clone(), Box::new(b.subst_top(j + 1, v))),
            _ => self.clone(),
        }
    }

    fn mentions(&self, j: u32) -> bool {
        match self {
            LTerm::Bound(k) => *k == j,
            LTerm::App(f, a) => f.mentions(j) || a.mentions(j),
            LTerm::Abs(_, _, b) => b.mentions(j + 1),
            _ => false,
        }
    }

    fn beta(&self) -> LTerm {
        match self {
            LTerm::App(f, a) => {
                let f = f.beta();
                let a = a.beta();
                match f {
                    LTerm::Abs(_, _, body) => body.subst_top(0, &a).beta(),
                    f => LTerm::app(f, a),
                }
            }
            LTerm::Abs(h, t, b) => LTerm::Abs(h.clone(), t.clone(), Box::new(b.beta())),
            _ => self.clone(),
        }
    }

    fn eta(&self) -> LTerm {
        match self {
            LTerm::App(f, a) => LTerm::app(f.eta(), a.eta()),
            LTerm::Abs(h, t, b) => {
                let b = b.eta();
                if let LTerm::App(f, a) = &b {
                    if **a == LTerm::Bound(0) && !f.mentions(0) {
                        return f.shift(-1, 0);
                    }
                }
                LTerm::Abs(h.clone(), t.clone(), Box::new(b))
            }
            _ => self.clone(),
        }
    }

    /// β-normal, η-short form. The input must be well typed, which
    /// guarantees termination.
    pub fn normalize(&self) -> LTerm {
        self.beta().eta()
    }

    /// Type-checks, then normalizes.
    pub fn normalize_checked(&self, cons: &Constructors) -> Result<LTerm, TypeError> {
        self.type_of(cons, &mut Vec::new())?;
        Ok(self.normalize())
    }

    /// Capture-avoiding substitution of free variables; the result is
    /// normalized. Replacements are first-order and locally closed, so no
    /// index adjustment is required.
    pub fn apply_subst(&self, theta: &Substitution) -> LTerm {
        self.replace_vars(theta).normalize()
    }

    fn replace_vars(&self, theta: &Substitution) -> LTerm {
        match self {
            LTerm::Var(x) => theta.get(x).map(LTerm::from).unwrap_or_else(|| self.clone()),
            LTerm::App(f, a) => LTerm::app(f.replace_vars(theta), a.replace_vars(theta)),
            LTerm::Abs(h, t, b) => LTerm::Abs(h.clone(), t.clone(), Box::new(b.replace_vars(theta))),
            _ => self.clone(),
        }
    }

    /// Equality up to renaming of bound variables.
    pub fn alpha_eq(&self, other: &LTerm) -> bool {
        self == other
    }

    /// Converts a canonical term of type ι into the first-order
    /// representation.
    pub fn to_first_order(&self, cons: &Constructors) -> Result<Term, TypeError> {
        let ty = self.type_of(cons, &mut Vec::new())?;
        if ty != SimpleType::Iota {
            return Err(TypeError::NotFirstOrder { found: ty });
        }
        Ok(self.normalize().spine())
    }

    fn spine(&self) -> Term {
        let mut args = Vec::new();
        let mut head = self;
        while let LTerm::App(f, a) = head {
            args.push(a.spine());
            head = f;
        }
        args.reverse();
        match head {
            LTerm::Var(x) => Term::Var(x.clone()),
            LTerm::Bound(k) => Term::Bound(*k),
            LTerm::Const(c) => Term::Con(c.clone(), args.into()),
            // unreachable for well-typed canonical terms of type ι
            LTerm::Abs(..) | LTerm::App(..) => Term::Bound(u32::MAX),
        }
    }
}

impl From<&Term> for LTerm {
    fn from(t: &Term) -> Self {
        match t {
            Term::Var(x) => LTerm::Var(x.clone()),
            Term::Bound(k) => LTerm::Bound(*k),
            Term::Con(c, args) => args
                .iter()
                .fold(LTerm::Const(c.clone()), |f, a| LTerm::app(f, LTerm::from(a))),
        }
    }
}

impl fmt::Display for LTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn frees(t: &LTerm, out: &mut Vec<String>) {
            match t {
                LTerm::Var(x) => out.push(x.to_string()),
                LTerm::App(a, b) => {
                    frees(a, out);
                    frees(b, out);
                }
                LTerm::Abs(_, _, b) => frees(b, out),
                _ => {}
            }
        }
        fn go(t: &LTerm, names: &mut Vec<String>, f: &mut fmt::Formatter<'_>, arg: bool) -> fmt::Result {
            match t {
                LTerm::Var(x) => write!(f, "{x}"),
                LTerm::Const(c) => write!(f, "{c}"),
                LTerm::Bound(k) => {
                    let k = *k as usize;
                    if k < names.len() {
                        write!(f, "{}", names[names.len() - 1 - k])
                    } else {
                        write!(f, "#{}", k - names.len())
                    }
                }
                LTerm::App(a, b) => {
                    if arg {
                        write!(f, "(")?;
                    }
                    go(a, names, f, matches!(**a, LTerm::Abs(..)))?;
                    write!(f, " ")?;
                    go(b, names, f, true)?;
                    if arg {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
                LTerm::Abs(h, _, b) => {
                    let mut n = h.as_str().to_string();
                    while names.contains(&n) {
                        n.push('\'');
                    }
                    if arg {
                        write!(f, "(")?;
                    }
                    write!(f, "\\{n}. ")?;
                    names.push(n);
                    go(b, names, f, false)?;
                    names.pop();
                    if arg {
                        write!(f, ")")?;
                    }
                    Ok(())
                }
            }
        }
        let mut names = Vec::new();
        frees(self, &mut names);
        go(self, &mut names, f, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::numeral;

    fn iota() -> SimpleType {
        SimpleType::Iota
    }

    #[test]
    fn beta_redex() {
        // (λx. s x) z → s z
        let t = LTerm::app(LTerm::lam("x", iota(), LTerm::app(LTerm::cons("s"), LTerm::Bound(0))), LTerm::cons("z"));
        assert_eq!(t.normalize(), LTerm::app(LTerm::cons("s"), LTerm::cons("z")));
    }

    #[test]
    fn already_normal() {
        let t = LTerm::from(&numeral(2));
        assert_eq!(t.normalize(), t);
    }

    #[test]
    fn eta_case() {
        let t = LTerm::lam("x", iota(), LTerm::app(LTerm::cons("s"), LTerm::Bound(0)));
        assert_eq!(t.normalize(), LTerm::cons("s"));
        // λx. pair x x is not an η-redex
        let cons = {
            let mut c = Constructors::new();
            c.declare(name("pair"), 2);
            c
        };
        let u = LTerm::lam(
            "x",
            iota(),
            LTerm::app(LTerm::app(LTerm::cons("pair"), LTerm::Bound(0)), LTerm::Bound(0)),
        );
        assert_eq!(u.normalize_checked(&cons).unwrap(), u);
    }

    #[test]
    fn alpha() {
        let a = LTerm::lam("x", iota(), LTerm::app(LTerm::cons("s"), LTerm::Bound(0)));
        let b = LTerm::lam("y", iota(), LTerm::app(LTerm::cons("s"), LTerm::Bound(0)));
        assert!(a.alpha_eq(&b));
        assert!(!LTerm::from(&numeral(1)).alpha_eq(&LTerm::cons("z")));
        // λx.λy. pair x y vs λy.λx. pair y x
        let pair = |i, j| LTerm::app(LTerm::app(LTerm::cons("pair"), LTerm::Bound(i)), LTerm::Bound(j));
        let l = LTerm::lam("x", iota(), LTerm::lam("y", iota(), pair(1, 0)));
        let r = LTerm::lam("y", iota(), LTerm::lam("x", iota(), pair(1, 0)));
        assert!(l.alpha_eq(&r));
    }

    #[test]
    fn ill_typed_reports_path() {
        let t = LTerm::app(LTerm::cons("z"), LTerm::cons("z"));
        let err = t.type_of(&Constructors::new(), &mut Vec::new()).unwrap_err();
        assert!(matches!(err, TypeError::NotAFunction { .. }));
        let t = LTerm::app(LTerm::cons("s"), LTerm::lam("x", iota(), LTerm::Bound(0)));
        let err = t.type_of(&Constructors::new(), &mut Vec::new()).unwrap_err();
        assert!(matches!(err, TypeError::Mismatch { .. }));
    }

    #[test]
    fn subst_then_first_order() {
        let t = LTerm::app(LTerm::cons("s"), LTerm::var("x"));
        let th = Substitution::singleton(name("x"), numeral(2));
        assert_eq!(t.apply_subst(&th).to_first_order(&Constructors::new()).unwrap(), numeral(3));
        assert_eq!(t.apply_subst(&Substitution::new()), t);
    }

    #[test]
    fn substitution_under_lambda_is_capture_free() {
        // λy. pair y x with x ↦ y (free) must not capture
        let mut cons = Constructors::new();
        cons.declare(name("pair"), 2);
        let t = LTerm::lam(
            "y",
            iota(),
            LTerm::app(LTerm::app(LTerm::cons("pair"), LTerm::Bound(0)), LTerm::var("x")),
        );
        let th = Substitution::singleton(name("x"), Term::var("y"));
        let out = t.apply_subst(&th);
        assert_eq!(
            out,
            LTerm::lam("y", iota(), LTerm::app(LTerm::app(LTerm::cons("pair"), LTerm::Bound(0)), LTerm::var("y")))
        );
        assert_eq!(out.to_string(), "\\y'. pair y' y");
    }
}
