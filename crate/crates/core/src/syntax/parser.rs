//! Recursive-descent parser.
//!
//! Formula precedence, loosest first: `-o`/`=>`, quantifiers, `|` `+` `\/`,
//! `*` `&` `/\`, prefix `!` `?` `~`, atoms. Binary connectives associate to
//! the right. A quantifier in operand position extends as far right as the
//! additive level allows.

use std::sync::Arc;

use super::lexer::{tokenize, Tok, Token};
use super::{AnyFormula, Decl, Definitions, ProofHeader, SourceFile, SyntaxError};
use crate::checker::{Mode, ProofNode, Rule, RuleSet, Side};
use crate::formula::{Body, FixKind, Formula, Pred};
use crate::lambda::{LTerm, SimpleType};
use crate::term::{name, Constructors, Hint, Name, Term};
use crate::uformula::{UBody, UFormula};

pub const KEYWORDS: &[&str] = &[
    "all", "ex", "mu", "nu", "top", "bot", "tt", "ff", "constructor", "define", "theorem", "proof", "query", "compute",
];

const DECL_KEYWORDS: &[&str] = &["constructor", "define", "theorem", "proof", "query"];

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum BinOp {
    Tensor,
    Par,
    With,
    Plus,
    And,
    Or,
    Lolli,
    Implies,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Unit {
    One,
    Zero,
    Top,
    Bot,
    Tt,
    Ff,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Quant {
    All,
    Ex,
    HatAll,
    HatEx,
}

#[derive(Clone, Debug)]
enum Ast {
    Bin(BinOp, Box<Ast>, Box<Ast>),
    Unit(Unit),
    Eq(Term, Term),
    Neq(Term, Term),
    Quant(Quant, Hint, Box<Ast>),
    Fix(FixKind, Hint, Vec<Hint>, Box<Ast>, Vec<Term>),
    PVar(u32, Vec<Term>),
    Polar(Formula),
    Bang(Box<Ast>),
    Quest(Box<Ast>),
    Dual(Box<Ast>),
}

impl Ast {
    fn unpolarized(&self) -> bool {
        match self {
            Ast::Bin(op, a, b) => {
                matches!(op, BinOp::And | BinOp::Or | BinOp::Implies) || a.unpolarized() || b.unpolarized()
            }
            Ast::Unit(u) => matches!(u, Unit::Tt | Unit::Ff),
            Ast::Quant(q, _, b) => matches!(q, Quant::HatAll | Quant::HatEx) || b.unpolarized(),
            Ast::Fix(_, _, _, b, _) | Ast::Bang(b) | Ast::Quest(b) | Ast::Dual(b) => b.unpolarized(),
            Ast::Eq(..) | Ast::Neq(..) | Ast::PVar(..) | Ast::Polar(_) => false,
        }
    }

    fn to_formula(&self) -> Result<Formula, String> {
        Ok(match self {
            Ast::Bin(op, a, b) => {
                let (a, b) = (a.to_formula()?, b.to_formula()?);
                match op {
                    BinOp::Tensor => Formula::tensor(a, b),
                    BinOp::Par => Formula::par(a, b),
                    BinOp::With => Formula::with(a, b),
                    BinOp::Plus => Formula::plus(a, b),
                    BinOp::Lolli => Formula::lolli(a, b),
                    _ => return Err("unpolarized connective in a polarized formula".into()),
                }
            }
            Ast::Unit(u) => match u {
                Unit::One => Formula::One,
                Unit::Zero => Formula::Zero,
                Unit::Top => Formula::Top,
                Unit::Bot => Formula::Bot,
                _ => return Err("unpolarized unit in a polarized formula".into()),
            },
            Ast::Eq(t, u) => Formula::Eq(t.clone(), u.clone()),
            Ast::Neq(t, u) => Formula::Neq(t.clone(), u.clone()),
            Ast::Quant(q, h, b) => {
                let b = Box::new(b.to_formula()?);
                match q {
                    Quant::All => Formula::Forall(h.clone(), b),
                    Quant::Ex => Formula::Exists(h.clone(), b),
                    _ => return Err("hatted quantifier in a polarized formula".into()),
                }
            }
            Ast::Fix(k, p, params, b, args) => {
                let body = Arc::new(Body::new(p.clone(), params.clone(), b.to_formula()?));
                match k {
                    FixKind::Mu => Formula::Mu(body, args.clone()),
                    FixKind::Nu => Formula::Nu(body, args.clone()),
                }
            }
            Ast::PVar(k, args) => Formula::Var(*k, args.clone()),
            Ast::Polar(f) => f.clone(),
            Ast::Bang(a) => Formula::bang(a.to_formula()?),
            Ast::Quest(a) => Formula::quest(a.to_formula()?),
            Ast::Dual(a) => a.to_formula()?.dual(),
        })
    }

    fn to_uformula(&self) -> Result<UFormula, String> {
        Ok(match self {
            Ast::Bin(op, a, b) => {
                let (a, b) = (a.to_uformula()?, b.to_uformula()?);
                match op {
                    BinOp::And => UFormula::and(a, b),
                    BinOp::Or => UFormula::or(a, b),
                    BinOp::Implies => UFormula::implies(a, b),
                    _ => return Err("polarized connective in an unpolarized formula".into()),
                }
            }
            Ast::Unit(Unit::Tt) => UFormula::Tt,
            Ast::Unit(Unit::Ff) => UFormula::Ff,
            Ast::Unit(_) => return Err("polarized unit in an unpolarized formula".into()),
            Ast::Eq(t, u) => UFormula::Eq(t.clone(), u.clone()),
            Ast::Neq(t, u) => UFormula::Neq(t.clone(), u.clone()),
            Ast::Quant(q, h, b) => {
                let b = Box::new(b.to_uformula()?);
                match q {
                    Quant::All => UFormula::Forall(h.clone(), b),
                    Quant::Ex => UFormula::Exists(h.clone(), b),
                    Quant::HatAll => UFormula::HatForall(h.clone(), b),
                    Quant::HatEx => UFormula::HatExists(h.clone(), b),
                }
            }
            Ast::Fix(k, p, params, b, args) => {
                let body = Arc::new(UBody { pred: p.clone(), params: params.clone(), formula: b.to_uformula()? });
                match k {
                    FixKind::Mu => UFormula::Mu(body, args.clone()),
                    FixKind::Nu => UFormula::Nu(body, args.clone()),
                }
            }
            Ast::PVar(k, args) => UFormula::Var(*k, args.clone()),
            Ast::Polar(f) => UFormula::Fixed(f.clone()),
            Ast::Bang(_) | Ast::Quest(_) => return Err("exponential in an unpolarized formula".into()),
            Ast::Dual(a) => a.to_uformula()?.dual(),
        })
    }
}

pub(crate) struct Parser<'d> {
    toks: Vec<Token>,
    pos: usize,
    cons: Constructors,
    defs: &'d mut Definitions,
    /// Formula-level term binders, innermost last.
    tscope: Vec<Name>,
    /// Predicate binders with their arities, innermost last.
    pscope: Vec<(Name, usize)>,
    /// λ-binders inside terms, innermost last.
    lscope: Vec<Name>,
}

type PResult<T> = Result<T, SyntaxError>;

impl<'d> Parser<'d> {
    fn new(src: &str, cons: Constructors, defs: &'d mut Definitions) -> PResult<Self> {
        Ok(Parser { toks: tokenize(src)?, pos: 0, cons, defs, tscope: vec![], pscope: vec![], lscope: vec![] })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        let t = &self.toks[self.pos];
        Err(SyntaxError::new(t.line, t.col, msg))
    }

    fn err_at<T>(&self, pos: usize, msg: impl Into<String>) -> PResult<T> {
        let t = &self.toks[pos];
        Err(SyntaxError::new(t.line, t.col, msg))
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == w)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`, found {}", describe(self.peek())))
        }
    }

    fn expect_word(&mut self, w: &str) -> PResult<()> {
        if self.is_word(w) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{w}`, found {}", describe(self.peek())))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            t => self.err(format!("expected an identifier, found {}", describe(&t))),
        }
    }

    fn number(&mut self) -> PResult<u64> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(n)
            }
            t => self.err(format!("expected a number, found {}", describe(&t))),
        }
    }

    fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    // ---------------------------------------------------------------- terms

    fn starts_term_atom(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => !KEYWORDS.contains(&s.as_str()),
            Tok::Num(_) => true,
            Tok::Sym(s) => *s == "(" || *s == "\\",
            Tok::Eof => false,
        }
    }

    fn lterm(&mut self) -> PResult<LTerm> {
        let mut head = self.lterm_atom()?;
        while self.starts_term_atom() {
            let arg = self.lterm_atom()?;
            head = LTerm::app(head, arg);
        }
        Ok(head)
    }

    fn lterm_atom(&mut self) -> PResult<LTerm> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(LTerm::from(&crate::term::numeral(n)))
            }
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                if let Some(k) = self.lscope.iter().rev().position(|x| **x == *s) {
                    return Ok(LTerm::Bound(k as u32));
                }
                if self.tscope.iter().any(|x| **x == *s) {
                    return Ok(LTerm::var(&s));
                }
                if self.cons.arity(&s).is_some() {
                    return Ok(LTerm::cons(&s));
                }
                Ok(LTerm::var(&s))
            }
            Tok::Sym("(") => {
                self.bump();
                let t = self.lterm()?;
                self.expect_sym(")")?;
                Ok(t)
            }
            Tok::Sym("\\") => {
                self.bump();
                let x = self.ident()?;
                let ty = if self.eat_sym(":") { self.simple_type()? } else { SimpleType::Iota };
                self.expect_sym(".")?;
                self.lscope.push(name(&x));
                let body = self.lterm();
                self.lscope.pop();
                Ok(LTerm::lam(&x, ty, body?))
            }
            t => self.err(format!("expected a term, found {}", describe(&t))),
        }
    }

    fn finish_term(&self, start: usize, t: LTerm) -> PResult<Term> {
        let fo = t.to_first_order(&self.cons).or_else(|e| self.err_at(start, e.to_string()))?;
        Ok(bind_scope(&fo, &self.tscope))
    }

    fn term(&mut self) -> PResult<Term> {
        let start = self.pos;
        let t = self.lterm()?;
        self.finish_term(start, t)
    }

    fn term_atom(&mut self) -> PResult<Term> {
        let start = self.pos;
        let t = self.lterm_atom()?;
        self.finish_term(start, t)
    }

    fn term_atoms(&mut self, n: usize) -> PResult<Vec<Term>> {
        (0..n).map(|_| self.term_atom()).collect()
    }

    fn simple_type(&mut self) -> PResult<SimpleType> {
        let base = if self.eat_sym("(") {
            let t = self.simple_type()?;
            self.expect_sym(")")?;
            t
        } else {
            match self.ident()?.as_str() {
                "i" | "iota" => SimpleType::Iota,
                "o" => SimpleType::O,
                other => return self.err(format!("unknown type {other}")),
            }
        };
        if self.eat_sym("->") {
            Ok(SimpleType::arrow(base, self.simple_type()?))
        } else {
            Ok(base)
        }
    }

    // ------------------------------------------------------------- formulas

    fn ast(&mut self) -> PResult<Ast> {
        let lhs = self.quant_level()?;
        if self.eat_sym("-o") {
            Ok(Ast::Bin(BinOp::Lolli, Box::new(lhs), Box::new(self.ast()?)))
        } else if self.eat_sym("=>") {
            Ok(Ast::Bin(BinOp::Implies, Box::new(lhs), Box::new(self.ast()?)))
        } else {
            Ok(lhs)
        }
    }

    fn is_quantifier(&self) -> bool {
        self.is_word("all") || self.is_word("ex")
    }

    fn quant_level(&mut self) -> PResult<Ast> {
        if self.is_quantifier() {
            self.quantifier()
        } else {
            self.additive()
        }
    }

    fn quantifier(&mut self) -> PResult<Ast> {
        let all = self.is_word("all");
        self.bump();
        let hat = self.eat_sym("^");
        let q = match (all, hat) {
            (true, false) => Quant::All,
            (false, false) => Quant::Ex,
            (true, true) => Quant::HatAll,
            (false, true) => Quant::HatEx,
        };
        let mut xs = vec![self.ident()?];
        while !self.is_sym(".") {
            xs.push(self.ident()?);
        }
        self.bump();
        for x in &xs {
            self.tscope.push(name(x));
        }
        // the body extends as far right as possible, implications included
        let body = self.ast();
        self.tscope.truncate(self.tscope.len() - xs.len());
        let mut out = body?;
        for x in xs.iter().rev() {
            out = Ast::Quant(q, Hint::new(x), Box::new(out));
        }
        Ok(out)
    }

    fn additive(&mut self) -> PResult<Ast> {
        let lhs = self.multiplicative()?;
        let op = match self.peek() {
            Tok::Sym("|") => BinOp::Par,
            Tok::Sym("+") => BinOp::Plus,
            Tok::Sym("\\/") => BinOp::Or,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.quant_level_operand()?;
        Ok(Ast::Bin(op, Box::new(lhs), Box::new(rhs)))
    }

    /// Right operand at the additive level; a leading quantifier takes the
    /// rest of the additive expression as its body.
    fn quant_level_operand(&mut self) -> PResult<Ast> {
        if self.is_quantifier() {
            self.quantifier()
        } else {
            self.additive()
        }
    }

    fn multiplicative(&mut self) -> PResult<Ast> {
        let lhs = self.prefix()?;
        let op = match self.peek() {
            Tok::Sym("*") => BinOp::Tensor,
            Tok::Sym("&") => BinOp::With,
            Tok::Sym("/\\") => BinOp::And,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.multiplicative()?;
        Ok(Ast::Bin(op, Box::new(lhs), Box::new(rhs)))
    }

    fn prefix(&mut self) -> PResult<Ast> {
        if self.eat_sym("!") {
            return Ok(Ast::Bang(Box::new(self.prefix()?)));
        }
        if self.eat_sym("?") {
            return Ok(Ast::Quest(Box::new(self.prefix()?)));
        }
        if self.eat_sym("~") {
            return Ok(Ast::Dual(Box::new(self.prefix()?)));
        }
        self.atom()
    }

    fn try_equation(&mut self) -> Option<Ast> {
        let save = self.pos;
        let lhs = self.term().ok();
        if let Some(lhs) = lhs {
            let neg = if self.eat_sym("=") {
                Some(false)
            } else if self.eat_sym("!=") {
                Some(true)
            } else {
                None
            };
            if let Some(neg) = neg {
                if let Ok(rhs) = self.term() {
                    return Some(if neg { Ast::Neq(lhs, rhs) } else { Ast::Eq(lhs, rhs) });
                }
            }
        }
        self.pos = save;
        None
    }

    fn atom(&mut self) -> PResult<Ast> {
        if self.is_quantifier() {
            return self.quantifier();
        }
        match self.peek().clone() {
            Tok::Num(n) => {
                if let Some(eq) = self.try_equation() {
                    return Ok(eq);
                }
                self.bump();
                match n {
                    0 => Ok(Ast::Unit(Unit::Zero)),
                    1 => Ok(Ast::Unit(Unit::One)),
                    _ => self.err("a numeral is not a formula"),
                }
            }
            Tok::Ident(w) if matches!(w.as_str(), "top" | "bot" | "tt" | "ff") => {
                self.bump();
                Ok(Ast::Unit(match w.as_str() {
                    "top" => Unit::Top,
                    "bot" => Unit::Bot,
                    "tt" => Unit::Tt,
                    _ => Unit::Ff,
                }))
            }
            Tok::Ident(w) if w == "mu" || w == "nu" => {
                self.bump();
                let kind = if w == "mu" { FixKind::Mu } else { FixKind::Nu };
                let (p, params, body) = self.fix_body()?;
                let args = self.term_atoms(params.len())?;
                Ok(Ast::Fix(kind, p, params, Box::new(body), args))
            }
            Tok::Sym("(") => {
                if let Some(eq) = self.try_equation() {
                    return Ok(eq);
                }
                self.bump();
                let inner = self.ast()?;
                self.expect_sym(")")?;
                Ok(inner)
            }
            Tok::Ident(w) => {
                if let Some(k) = self.pscope.iter().rev().position(|(p, _)| **p == *w) {
                    let arity = self.pscope[self.pscope.len() - 1 - k].1;
                    self.bump();
                    let args = self.term_atoms(arity)?;
                    return Ok(Ast::PVar(k as u32, args));
                }
                if !self.tscope.iter().any(|x| **x == *w) {
                    if let Some(p) = self.defs.get(&w).cloned() {
                        let start = self.pos;
                        self.bump();
                        let args = self.term_atoms(p.arity())?;
                        return match p.apply(&args) {
                            Ok(f) => Ok(Ast::Polar(f)),
                            Err(e) => self.err_at(start, e.to_string()),
                        };
                    }
                }
                match self.try_equation() {
                    Some(eq) => Ok(eq),
                    None => self.err(format!("expected a formula at `{w}`")),
                }
            }
            t => match self.try_equation() {
                Some(eq) => Ok(eq),
                None => self.err(format!("expected a formula, found {}", describe(&t))),
            },
        }
    }

    /// `(P x1 .. xn => F)`
    fn fix_body(&mut self) -> PResult<(Hint, Vec<Hint>, Ast)> {
        self.expect_sym("(")?;
        let p = self.ident()?;
        let mut params = Vec::new();
        while !self.is_sym("=>") {
            params.push(self.ident()?);
        }
        self.bump();
        self.pscope.push((name(&p), params.len()));
        for x in &params {
            self.tscope.push(name(x));
        }
        let body = self.ast();
        self.tscope.truncate(self.tscope.len() - params.len());
        self.pscope.pop();
        let body = body?;
        self.expect_sym(")")?;
        Ok((Hint::new(&p), params.iter().map(|x| Hint::new(x)).collect(), body))
    }

    fn any_formula(&mut self) -> PResult<AnyFormula> {
        let start = self.pos;
        let ast = self.ast()?;
        let r = if ast.unpolarized() {
            ast.to_uformula().map(AnyFormula::Unpolarized)
        } else {
            ast.to_formula().map(AnyFormula::Polarized)
        };
        r.or_else(|e| self.err_at(start, e))
    }

    fn formula(&mut self) -> PResult<Formula> {
        let start = self.pos;
        match self.any_formula()? {
            AnyFormula::Polarized(f) => Ok(f),
            AnyFormula::Unpolarized(_) => self.err_at(start, "expected a polarized formula"),
        }
    }

    // ----------------------------------------------------------- predicates

    fn pred(&mut self) -> PResult<Pred> {
        if self.eat_sym("\\") {
            let mut xs = Vec::new();
            while !self.is_sym(".") {
                xs.push(self.ident()?);
            }
            self.bump();
            for x in &xs {
                self.tscope.push(name(x));
            }
            let body = self.formula();
            self.tscope.truncate(self.tscope.len() - xs.len());
            return Ok(Pred::lam(xs.iter().map(|x| Hint::new(x)).collect(), body?));
        }
        if self.eat_sym("~") {
            return Ok(self.pred()?.dual());
        }
        if self.is_word("mu") || self.is_word("nu") {
            let kind = if self.is_word("mu") { FixKind::Mu } else { FixKind::Nu };
            let start = self.pos;
            self.bump();
            let (p, params, body) = self.fix_body()?;
            let f = body.to_formula().or_else(|e| self.err_at(start, e))?;
            return Ok(Pred::Fix(kind, Arc::new(Body::new(p, params, f))));
        }
        if self.is_sym("(") {
            self.bump();
            let p = self.pred()?;
            self.expect_sym(")")?;
            return Ok(p);
        }
        let start = self.pos;
        let n = self.ident()?;
        match self.defs.get(&n) {
            Some(p) => Ok(p.clone()),
            None => self.err_at(start, format!("unknown predicate {n}")),
        }
    }

    // --------------------------------------------------------------- proofs

    fn indices(&mut self) -> PResult<Vec<usize>> {
        let mut out = Vec::new();
        while let Tok::Num(n) = self.peek() {
            out.push(*n as usize);
            self.bump();
            self.eat_sym(",");
        }
        Ok(out)
    }

    fn names(&mut self) -> PResult<Vec<Name>> {
        let mut out = Vec::new();
        while matches!(self.peek(), Tok::Ident(_)) {
            out.push(name(&self.ident()?));
            self.eat_sym(",");
        }
        Ok(out)
    }

    fn proof_node(&mut self) -> PResult<ProofNode> {
        let start = self.pos;
        let rule_name = match self.bump() {
            Tok::Ident(s) => s,
            t => return self.err_at(start, format!("expected a rule name, found {}", describe(&t))),
        };
        let principal = if self.eat_sym("@") { self.number()? as usize } else { 0 };
        let has_args = self.eat_sym("(");
        let rule = match (rule_name.as_str(), has_args) {
            ("tensor", false) => Rule::Tensor(vec![]),
            ("tensor", true) => Rule::Tensor(self.indices()?),
            ("one", _) => Rule::One,
            ("par", _) => Rule::Par,
            ("bot", _) => Rule::Bot,
            ("with", _) => Rule::With,
            ("top", _) => Rule::Top,
            ("plus", true) => match self.number()? {
                0 => Rule::Plus(Side::Left),
                1 => Rule::Plus(Side::Right),
                _ => return self.err("plus takes 0 or 1"),
            },
            ("eq", _) => Rule::Eq,
            ("neq", _) => Rule::Neq,
            ("ex", true) => Rule::Exists(self.term()?),
            ("all", true) => Rule::Forall(name(&self.ident()?)),
            ("mu", _) => Rule::Mu,
            ("nu", true) => {
                let s = self.pred()?;
                let xs = if self.eat_sym(";") { self.names()? } else { vec![] };
                Rule::Nu(s, xs)
            }
            ("munu", _) => Rule::MuNu,
            ("unfold", _) => Rule::Unfold,
            ("init", _) => Rule::Init,
            ("cut", true) => {
                let f = self.formula()?;
                let left = if self.eat_sym(";") { self.indices()? } else { vec![] };
                Rule::Cut(f, left)
            }
            ("contract", _) => Rule::Contract,
            ("weaken", _) => Rule::Weaken,
            ("cnunu", true) => {
                let s = self.pred()?;
                self.expect_sym(";")?;
                let u = self.pred()?;
                let xs = if self.eat_sym(";") { self.names()? } else { vec![] };
                Rule::CNuNu(s, u, xs)
            }
            (other, _) => return self.err_at(start, format!("unknown rule or missing annotation: {other}")),
        };
        if has_args {
            self.expect_sym(")")?;
        }
        let mut children = Vec::new();
        if self.eat_sym("{") {
            while !self.is_sym("}") {
                children.push(self.proof_node()?);
                if !self.eat_sym(";") {
                    break;
                }
            }
            self.expect_sym("}")?;
        }
        Ok(ProofNode { rule, principal, children })
    }

    fn proof_header(&mut self) -> PResult<ProofHeader> {
        let mut header = ProofHeader { rules: RuleSet::new(Mode::Core), polarization: None };
        if !self.eat_sym("[") {
            return Ok(header);
        }
        loop {
            let start = self.pos;
            let w = self.ident()?;
            match w.as_str() {
                "core" | "mulk" => {
                    let plus = self.eat_sym("+");
                    let kw = if plus { format!("{w}+") } else { w };
                    header.rules.mode = Mode::from_keyword(&kw).expect("known mode");
                }
                "sigma1" => header.rules.sigma1 = true,
                "exp" => header.rules.exp = true,
                "pol" => {
                    self.expect_sym("=")?;
                    let mut bits = Vec::new();
                    while let Tok::Num(n) = self.peek() {
                        match n {
                            0 => bits.push(false),
                            1 => bits.push(true),
                            _ => return self.err("polarization bits are 0 or 1"),
                        }
                        self.bump();
                    }
                    header.polarization = Some(bits);
                }
                other => return self.err_at(start, format!("unknown proof option {other}")),
            }
            if !self.eat_sym(",") {
                break;
            }
        }
        self.expect_sym("]")?;
        Ok(header)
    }

    // --------------------------------------------------------- declarations

    fn at_decl_end(&self) -> bool {
        match self.peek() {
            Tok::Eof => true,
            Tok::Ident(w) => DECL_KEYWORDS.contains(&w.as_str()),
            _ => false,
        }
    }

    fn decl(&mut self) -> PResult<Decl> {
        let start = self.pos;
        let kw = match self.bump() {
            Tok::Ident(w) if DECL_KEYWORDS.contains(&w.as_str()) => w,
            t => return self.err_at(start, format!("expected a declaration, found {}", describe(&t))),
        };
        match kw.as_str() {
            "constructor" => {
                let n = self.ident()?;
                self.expect_sym(":")?;
                let ty = self.simple_type()?;
                let Some(arity) = ty.iota_arity() else {
                    return self.err_at(start, "constructors must have type i -> ... -> i");
                };
                if !self.cons.declare(name(&n), arity) {
                    return self.err_at(start, format!("constructor {n} declared twice"));
                }
                Ok(Decl::Constructor { name: name(&n), ty })
            }
            "define" => {
                let n = self.ident()?;
                if self.defs.get(&n).is_some() {
                    return self.err_at(start, format!("{n} defined twice"));
                }
                let mut params = Vec::new();
                while !self.is_sym(":=") {
                    params.push(self.ident()?);
                }
                self.bump();
                let pred = if !params.is_empty() {
                    for x in &params {
                        self.tscope.push(name(x));
                    }
                    let f = self.formula();
                    self.tscope.clear();
                    Pred::lam(params.iter().map(|x| Hint::new(x)).collect(), f?)
                } else {
                    let save = self.pos;
                    match self.pred() {
                        Ok(p) if self.at_decl_end() => p,
                        _ => {
                            self.pos = save;
                            Pred::lam(vec![], self.formula()?)
                        }
                    }
                };
                self.defs.insert(name(&n), pred.clone());
                Ok(Decl::Define { name: name(&n), pred })
            }
            "theorem" => {
                let n = self.ident()?;
                self.expect_sym(":")?;
                self.eat_sym("|-");
                let mut formulas = vec![self.any_formula()?];
                while self.eat_sym(",") {
                    formulas.push(self.any_formula()?);
                }
                Ok(Decl::Theorem { name: name(&n), formulas })
            }
            "proof" => {
                let n = self.ident()?;
                let header = self.proof_header()?;
                self.expect_sym("{")?;
                let tree = self.proof_node()?;
                self.eat_sym(";");
                self.expect_sym("}")?;
                Ok(Decl::Proof { name: name(&n), header, tree })
            }
            "query" => {
                let n = self.ident()?;
                self.expect_sym(":=")?;
                self.expect_word("compute")?;
                self.expect_sym("(")?;
                let p = self.ident()?;
                let mut args = Vec::new();
                while self.eat_sym(",") {
                    args.push(self.term()?);
                }
                self.expect_sym(")")?;
                Ok(Decl::Query { name: name(&n), pred: name(&p), args })
            }
            _ => unreachable!(),
        }
    }
}

/// Replaces free occurrences of scope names by de Bruijn indices.
fn bind_scope(t: &Term, scope: &[Name]) -> Term {
    if scope.is_empty() {
        return t.clone();
    }
    match t {
        Term::Var(x) => match scope.iter().rev().position(|y| y == x) {
            Some(k) => Term::Bound(k as u32),
            None => t.clone(),
        },
        Term::Bound(_) => t.clone(),
        Term::Con(c, args) => Term::Con(c.clone(), args.iter().map(|a| bind_scope(a, scope)).collect()),
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Num(n) => format!("`{n}`"),
        Tok::Sym(s) => format!("`{s}`"),
        Tok::Eof => "end of input".to_string(),
    }
}

/// Parses a whole source file.
pub fn parse(src: &str) -> Result<SourceFile, SyntaxError> {
    let mut defs = Definitions::new();
    let mut p = Parser::new(src, Constructors::new(), &mut defs)?;
    let mut decls = Vec::new();
    let mut seen: Vec<(String, Name)> = Vec::new();
    while !p.at_eof() {
        let start = p.pos;
        let d = p.decl()?;
        let key = match &d {
            Decl::Constructor { name, .. } => ("constructor", name),
            Decl::Define { name, .. } => ("define", name),
            Decl::Theorem { name, .. } => ("theorem", name),
            Decl::Proof { name, .. } => ("proof", name),
            Decl::Query { name, .. } => ("query", name),
        };
        if seen.iter().any(|(k, n)| k == key.0 && n == key.1) {
            return p.err_at(start, format!("duplicate {} {}", key.0, key.1));
        }
        seen.push((key.0.to_string(), key.1.clone()));
        decls.push(d);
    }
    let constructors = p.cons.clone();
    drop(p);
    Ok(SourceFile { decls, constructors, definitions: defs })
}

fn standalone<T>(
    src: &str,
    defs: &Definitions,
    cons: &Constructors,
    f: impl FnOnce(&mut Parser) -> PResult<T>,
) -> Result<T, SyntaxError> {
    let mut defs = defs.clone();
    let mut p = Parser::new(src, cons.clone(), &mut defs)?;
    let out = f(&mut p)?;
    if !p.at_eof() {
        return p.err(format!("unexpected {}", describe(p.peek())));
    }
    Ok(out)
}

pub fn parse_formula(src: &str, defs: &Definitions, cons: &Constructors) -> Result<AnyFormula, SyntaxError> {
    standalone(src, defs, cons, |p| p.any_formula())
}

pub fn parse_term(src: &str, cons: &Constructors) -> Result<Term, SyntaxError> {
    standalone(src, &Definitions::new(), cons, |p| p.term())
}

pub fn parse_pred(src: &str, defs: &Definitions, cons: &Constructors) -> Result<Pred, SyntaxError> {
    standalone(src, defs, cons, |p| p.pred())
}

pub fn parse_proof(src: &str, defs: &Definitions, cons: &Constructors) -> Result<ProofNode, SyntaxError> {
    standalone(src, defs, cons, |p| p.proof_node())
}
