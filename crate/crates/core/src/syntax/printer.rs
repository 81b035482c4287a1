//! Pretty printer producing re-parseable text with minimal parentheses.
//!
//! Bound names are taken from binder hints and primed when they would clash
//! with a name in scope, a free variable, a constructor or a definition.

use std::collections::HashSet;
use std::sync::Arc;

use super::parser::KEYWORDS;
use super::Definitions;
use crate::checker::{ProofNode, Rule, Sequent, Side};
use crate::formula::{Body, FixKind, Formula, Pred};
use crate::term::{Name, Term};
use crate::uformula::UFormula;

const QUANT: u8 = 1;
const ADD: u8 = 2;
const MUL: u8 = 3;
const PREFIX: u8 = 4;
const ATOM: u8 = 5;

#[derive(Clone)]
struct Abbrev {
    name: Name,
    kind: FixKind,
    body: Arc<Body>,
    dual: Body,
}

#[derive(Clone, Default)]
pub struct Printer {
    abbrevs: Vec<Abbrev>,
}

#[derive(Default)]
struct Names {
    terms: Vec<String>,
    preds: Vec<String>,
    avoid: HashSet<String>,
}

impl Names {
    fn fresh(&self, hint: &str) -> String {
        let valid = hint.chars().next().is_some_and(super::lexer::is_ident_start)
            && hint.chars().all(super::lexer::is_ident_char)
            && !KEYWORDS.contains(&hint);
        let mut n = if valid { hint.to_string() } else { "x".to_string() };
        while self.avoid.contains(&n) || self.terms.contains(&n) || self.preds.contains(&n) {
            n.push('\'');
        }
        n
    }
}

fn wrap((s, level): (String, u8), min: u8) -> String {
    if level < min {
        format!("({s})")
    } else {
        s
    }
}

impl Printer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Least and greatest fixed points equal to a definition are printed by
    /// name, and their duals as `~name`.
    pub fn with_definitions(defs: &Definitions) -> Self {
        let abbrevs = defs
            .iter()
            .filter_map(|(n, p)| match p {
                Pred::Fix(kind, body) => {
                    Some(Abbrev { name: n.clone(), kind: *kind, body: body.clone(), dual: body.dual() })
                }
                Pred::Lam(_) => None,
            })
            .collect();
        Printer { abbrevs }
    }

    fn names_for(&self, vars: impl IntoIterator<Item = String>, cons: HashSet<String>) -> Names {
        let mut avoid: HashSet<String> = vars.into_iter().collect();
        avoid.extend(cons);
        avoid.extend(self.abbrevs.iter().map(|a| a.name.to_string()));
        Names { terms: vec![], preds: vec![], avoid }
    }

    fn formula_names(&self, fs: &[&Formula]) -> Names {
        let mut vars = Vec::new();
        let mut cons = HashSet::new();
        for f in fs {
            vars.extend(f.free_vars().iter().map(|x| x.to_string()));
            f.for_each_term(&mut |t| collect_cons(t, &mut cons));
        }
        self.names_for(vars, cons)
    }

    pub fn term(&self, t: &Term) -> String {
        term(t, &Names::default())
    }

    pub fn formula(&self, f: &Formula) -> String {
        let mut n = self.formula_names(&[f]);
        self.f(f, &mut n).0
    }

    pub fn pred(&self, p: &Pred) -> String {
        let body = p.body_formula();
        let mut n = self.formula_names(&[&body]);
        self.pred_in(p, &mut n)
    }

    pub fn uformula(&self, u: &UFormula) -> String {
        let mut cons = HashSet::new();
        ucons(u, &mut cons);
        let mut n = self.names_for(u.free_vars().iter().map(|x| x.to_string()), cons);
        self.u(u, &mut n).0
    }

    pub fn sequent(&self, s: &Sequent) -> String {
        let sig: Vec<String> = s.sig.iter().map(|x| x.to_string()).collect();
        let refs: Vec<&Formula> = s.formulas.iter().collect();
        let mut n = self.formula_names(&refs);
        n.avoid.extend(sig.iter().cloned());
        let fs: Vec<String> = s.formulas.iter().map(|f| self.f(f, &mut n).0).collect();
        if sig.is_empty() {
            format!("|- {}", fs.join(", "))
        } else {
            format!("{} |- {}", sig.join(" "), fs.join(", "))
        }
    }

    pub fn proof(&self, p: &ProofNode) -> String {
        let mut out = String::new();
        self.proof_into(p, 0, &mut out);
        out
    }

    fn proof_into(&self, p: &ProofNode, indent: usize, out: &mut String) {
        out.push_str(p.rule.keyword());
        if p.principal != 0 {
            out.push_str(&format!("@{}", p.principal));
        }
        let idx = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
        let names = |v: &[Name]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let args = match &p.rule {
            Rule::Tensor(l) if !l.is_empty() => Some(idx(l)),
            Rule::Plus(Side::Left) => Some("0".into()),
            Rule::Plus(Side::Right) => Some("1".into()),
            Rule::Exists(t) => Some(self.term(t)),
            Rule::Forall(y) => Some(y.to_string()),
            Rule::Nu(s, xs) if xs.is_empty() => Some(self.pred(s)),
            Rule::Nu(s, xs) => Some(format!("{}; {}", self.pred(s), names(xs))),
            Rule::Cut(f, l) => Some(format!("{}; {}", self.formula(f), idx(l))),
            Rule::CNuNu(s, u, xs) => Some(format!("{}; {}; {}", self.pred(s), self.pred(u), names(xs))),
            _ => None,
        };
        if let Some(a) = args {
            out.push_str(&format!("({a})"));
        }
        if p.children.is_empty() {
            return;
        }
        out.push_str(" {");
        let pad = "  ".repeat(indent + 1);
        for (i, c) in p.children.iter().enumerate() {
            out.push('\n');
            out.push_str(&pad);
            self.proof_into(c, indent + 1, out);
            if i + 1 < p.children.len() {
                out.push(';');
            }
        }
        out.push('\n');
        out.push_str(&"  ".repeat(indent));
        out.push('}');
    }

    fn pred_in(&self, p: &Pred, n: &mut Names) -> String {
        match p {
            Pred::Fix(kind, body) => {
                if let Some(a) = self.abbrev(*kind, body) {
                    return a;
                }
                let kw = if *kind == FixKind::Mu { "mu" } else { "nu" };
                format!("{kw} {}", self.fix_binder(body, n))
            }
            Pred::Lam(a) => {
                let xs: Vec<String> = a
                    .params
                    .iter()
                    .map(|h| {
                        let x = n.fresh(h.as_str());
                        n.terms.push(x.clone());
                        x
                    })
                    .collect();
                let body = self.f(&a.formula, n).0;
                n.terms.truncate(n.terms.len() - xs.len());
                if xs.is_empty() {
                    format!("\\. {body}")
                } else {
                    format!("\\{}. {body}", xs.join(" "))
                }
            }
        }
    }

    fn abbrev(&self, kind: FixKind, body: &Arc<Body>) -> Option<String> {
        for a in &self.abbrevs {
            if a.kind == kind && (Arc::ptr_eq(&a.body, body) || *a.body == **body) {
                return Some(a.name.to_string());
            }
            if a.kind != kind && a.dual == **body {
                return Some(format!("~{}", a.name));
            }
        }
        None
    }

    /// `(P x1 .. xn => F)`
    fn fix_binder(&self, body: &Body, n: &mut Names) -> String {
        let p = n.fresh(body.pred.as_str());
        n.preds.push(p.clone());
        let xs: Vec<String> = body
            .params
            .iter()
            .map(|h| {
                let x = n.fresh(h.as_str());
                n.terms.push(x.clone());
                x
            })
            .collect();
        let inner = self.f(&body.formula, n).0;
        n.terms.truncate(n.terms.len() - xs.len());
        n.preds.pop();
        let mut head = p;
        for x in &xs {
            head.push(' ');
            head.push_str(x);
        }
        format!("({head} => {inner})")
    }

    fn args(&self, args: &[Term], n: &Names) -> String {
        args.iter().map(|t| format!(" {}", term_atom(t, n))).collect()
    }

    fn f(&self, f: &Formula, n: &mut Names) -> (String, u8) {
        use Formula::*;
        match f {
            Tensor(a, b) => self.bin(a, b, "*", MUL, n),
            With(a, b) => self.bin(a, b, "&", MUL, n),
            Par(a, b) => self.bin(a, b, "|", ADD, n),
            Plus(a, b) => self.bin(a, b, "+", ADD, n),
            One => ("1".into(), ATOM),
            Zero => ("0".into(), ATOM),
            Top => ("top".into(), ATOM),
            Bot => ("bot".into(), ATOM),
            Eq(t, u) => (format!("{} = {}", term(t, n), term(u, n)), ATOM),
            Neq(t, u) => (format!("{} != {}", term(t, n), term(u, n)), ATOM),
            Forall(h, b) | Exists(h, b) => {
                let kw = if matches!(f, Forall(..)) { "all" } else { "ex" };
                let x = n.fresh(h.as_str());
                n.terms.push(x.clone());
                let body = wrap(self.f(b, n), QUANT);
                n.terms.pop();
                (format!("{kw} {x}. {body}"), QUANT)
            }
            Mu(body, args) | Nu(body, args) => {
                let kind = if matches!(f, Mu(..)) { FixKind::Mu } else { FixKind::Nu };
                let a = self.args(args, n);
                match self.abbrev(kind, body) {
                    Some(name) if name.starts_with('~') => (format!("{name}{a}"), PREFIX),
                    Some(name) => (format!("{name}{a}"), ATOM),
                    None => {
                        let kw = if kind == FixKind::Mu { "mu" } else { "nu" };
                        (format!("{kw} {}{a}", self.fix_binder(body, n)), ATOM)
                    }
                }
            }
            Var(k, args) => {
                let k = *k as usize;
                let p = if k < n.preds.len() { n.preds[n.preds.len() - 1 - k].clone() } else { format!("#P{k}") };
                (format!("{p}{}", self.args(args, n)), ATOM)
            }
            Bang(a) => (format!("!{}", wrap(self.f(a, n), PREFIX)), PREFIX),
            Quest(a) => (format!("?{}", wrap(self.f(a, n), PREFIX)), PREFIX),
        }
    }

    fn bin(&self, a: &Formula, b: &Formula, op: &str, level: u8, n: &mut Names) -> (String, u8) {
        let l = wrap(self.f(a, n), level + 1);
        let r = wrap(self.f(b, n), right_min(level));
        (format!("{l} {op} {r}"), level)
    }

    fn u(&self, u: &UFormula, n: &mut Names) -> (String, u8) {
        use UFormula::*;
        let bin = |a: &UFormula, b: &UFormula, op: &str, level: u8, n: &mut Names| {
            let l = wrap(self.u(a, n), level + 1);
            let r = wrap(self.u(b, n), right_min(level));
            (format!("{l} {op} {r}"), level)
        };
        match u {
            And(a, b) => bin(a, b, "/\\", MUL, n),
            Or(a, b) => bin(a, b, "\\/", ADD, n),
            Tt => ("tt".into(), ATOM),
            Ff => ("ff".into(), ATOM),
            Eq(t, v) => (format!("{} = {}", term(t, n), term(v, n)), ATOM),
            Neq(t, v) => (format!("{} != {}", term(t, n), term(v, n)), ATOM),
            Forall(h, b) | Exists(h, b) | HatForall(h, b) | HatExists(h, b) => {
                let kw = match u {
                    Forall(..) => "all",
                    Exists(..) => "ex",
                    HatForall(..) => "all^",
                    _ => "ex^",
                };
                let x = n.fresh(h.as_str());
                n.terms.push(x.clone());
                let body = wrap(self.u(b, n), QUANT);
                n.terms.pop();
                (format!("{kw} {x}. {body}"), QUANT)
            }
            Mu(body, args) | Nu(body, args) => {
                let kw = if matches!(u, Mu(..)) { "mu" } else { "nu" };
                let p = n.fresh(body.pred.as_str());
                n.preds.push(p.clone());
                let xs: Vec<String> = body
                    .params
                    .iter()
                    .map(|h| {
                        let x = n.fresh(h.as_str());
                        n.terms.push(x.clone());
                        x
                    })
                    .collect();
                let inner = self.u(&body.formula, n).0;
                n.terms.truncate(n.terms.len() - xs.len());
                n.preds.pop();
                let mut head = p;
                for x in &xs {
                    head.push(' ');
                    head.push_str(x);
                }
                (format!("{kw} ({head} => {inner}){}", self.args(args, n)), ATOM)
            }
            Var(k, args) => {
                let k = *k as usize;
                let p = if k < n.preds.len() { n.preds[n.preds.len() - 1 - k].clone() } else { format!("#P{k}") };
                (format!("{p}{}", self.args(args, n)), ATOM)
            }
            Fixed(f) => match self.f(f, n) {
                (s, level) if level >= PREFIX => (s, level),
                (s, _) => (format!("({s})"), ATOM),
            },
        }
    }
}

/// A quantifier may close an additive chain: its body then extends to the end
/// of that chain, which is exactly where the chain ends anyway.
fn right_min(level: u8) -> u8 {
    if level == ADD {
        QUANT
    } else {
        level
    }
}

fn collect_cons(t: &Term, out: &mut HashSet<String>) {
    if let Term::Con(c, args) = t {
        out.insert(c.to_string());
        args.iter().for_each(|a| collect_cons(a, out));
    }
}

fn ucons(u: &UFormula, out: &mut HashSet<String>) {
    use UFormula::*;
    match u {
        And(a, b) | Or(a, b) => {
            ucons(a, out);
            ucons(b, out);
        }
        Eq(t, v) | Neq(t, v) => {
            collect_cons(t, out);
            collect_cons(v, out);
        }
        Forall(_, b) | Exists(_, b) | HatForall(_, b) | HatExists(_, b) => ucons(b, out),
        Mu(body, args) | Nu(body, args) => {
            ucons(&body.formula, out);
            args.iter().for_each(|t| collect_cons(t, out));
        }
        Var(_, args) => args.iter().for_each(|t| collect_cons(t, out)),
        Fixed(f) => f.for_each_term(&mut |t| collect_cons(t, out)),
        Tt | Ff => {}
    }
}

fn term(t: &Term, n: &Names) -> String {
    match t {
        Term::Con(c, args) if !args.is_empty() => {
            let mut s = c.to_string();
            for a in args.iter() {
                s.push(' ');
                s.push_str(&term_atom(a, n));
            }
            s
        }
        _ => term_atom(t, n),
    }
}

fn term_atom(t: &Term, n: &Names) -> String {
    match t {
        Term::Var(x) => x.to_string(),
        Term::Bound(k) => {
            let k = *k as usize;
            if k < n.terms.len() {
                n.terms[n.terms.len() - 1 - k].clone()
            } else {
                format!("#{k}")
            }
        }
        Term::Con(c, args) if args.is_empty() => c.to_string(),
        Term::Con(..) => format!("({})", term(t, n)),
    }
}
