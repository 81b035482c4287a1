//! Random generators shared by the property and acceptance targets.
#![allow(dead_code)]

use std::sync::Arc;

use mumall::formula::{Body, Formula};
use mumall::term::{Hint, Term};
use proptest::prelude::*;

// ------------------------------------------------------------------ terms

pub fn term_over(vars: &'static [&'static str]) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(Term::zero()),
        proptest::sample::select(vars).prop_map(Term::var),
    ];
    leaf.prop_recursive(4, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Term::succ),
            (inner.clone(), inner).prop_map(|(a, b)| Term::app("p", vec![a, b])),
        ]
    })
}

pub fn nat_term() -> impl Strategy<Value = Term> {
    term_over(&["a", "b"]).prop_map(|t| strip_pairs(&t))
}

pub fn strip_pairs(t: &Term) -> Term {
    match t {
        Term::Con(c, xs) if &**c == "p" => strip_pairs(&xs[0]),
        Term::Con(c, xs) => Term::Con(c.clone(), xs.iter().map(strip_pairs).collect()),
        _ => t.clone(),
    }
}

// -------------------------------------------------------------- formulas

pub fn leaf_formula() -> impl Strategy<Value = Formula> {
    prop_oneof![
        Just(Formula::One),
        Just(Formula::Bot),
        Just(Formula::Top),
        Just(Formula::Zero),
        (nat_term(), nat_term()).prop_map(|(t, u)| Formula::Eq(t, u)),
        (nat_term(), nat_term()).prop_map(|(t, u)| Formula::Neq(t, u)),
    ]
}

pub fn connectives(inner: BoxedStrategy<Formula>, exps: bool) -> BoxedStrategy<Formula> {
    let bin = (inner.clone(), inner.clone(), 0..4u8).prop_map(|(a, b, k)| match k {
        0 => Formula::tensor(a, b),
        1 => Formula::par(a, b),
        2 => Formula::with(a, b),
        _ => Formula::plus(a, b),
    });
    let quant = (inner.clone(), proptest::sample::select(vec!["a", "b"]), any::<bool>())
        .prop_map(|(f, x, all)| if all { Formula::forall_var(x, &f) } else { Formula::exists_var(x, &f) });
    if exps {
        let exp = (inner, any::<bool>()).prop_map(|(f, b)| if b { Formula::bang(f) } else { Formula::quest(f) });
        prop_oneof![3 => bin, 2 => quant, 1 => exp].boxed()
    } else {
        prop_oneof![3 => bin, 2 => quant].boxed()
    }
}

/// A fixed-point body of arity one whose parameter is the free variable `p`
/// before abstraction.
pub fn body_formula() -> BoxedStrategy<Formula> {
    let term = term_over(&["a", "p"]).prop_map(|t| strip_pairs(&t));
    let pvar = term.prop_map(|t| Formula::Var(0, vec![t]));
    let leaf = prop_oneof![3 => leaf_formula(), 2 => pvar];
    leaf.prop_recursive(3, 10, 2, |inner| connectives(inner.boxed(), false)).boxed()
}

pub fn fixed_point() -> impl Strategy<Value = Formula> {
    (body_formula(), nat_term(), any::<bool>()).prop_map(|(b, arg, mu)| {
        let body = Arc::new(Body::new(Hint::new("P"), vec![Hint::new("x")], b.abstract_var("p")));
        if mu {
            Formula::Mu(body, vec![arg])
        } else {
            Formula::Nu(body, vec![arg])
        }
    })
}

pub fn formula_with(exps: bool) -> BoxedStrategy<Formula> {
    let leaf = prop_oneof![4 => leaf_formula(), 1 => fixed_point()];
    leaf.prop_recursive(4, 16, 2, move |inner| connectives(inner.boxed(), exps)).boxed()
}

pub fn formula() -> BoxedStrategy<Formula> {
    formula_with(true)
}
