//! Syntactic first-order unification.

use crate::term::{Signature, Substitution, Term};

/// Most general unifier of two locally closed first-order terms, or `None`
/// on a constructor clash or occurs-check failure.
///
/// The result is idempotent: no variable of its domain occurs in its range.
pub fn mgu(t: &Term, u: &Term) -> Option<Substitution> {
    mgu_all(&[(t.clone(), u.clone())])
}

/// Simultaneous unifier of a list of equations.
pub fn mgu_all(pairs: &[(Term, Term)]) -> Option<Substitution> {
    let mut theta = Substitution::new();
    let mut work: Vec<(Term, Term)> = pairs.iter().rev().cloned().collect();
    while let Some((a, b)) = work.pop() {
        let a = a.apply(&theta);
        let b = b.apply(&theta);
        match (&a, &b) {
            _ if a == b => {}
            (Term::Var(x), other) | (other, Term::Var(x)) => {
                if other.occurs(x) {
                    return None;
                }
                let bind = Substitution::singleton(x.clone(), other.clone());
                theta.map_values(|v| v.apply(&bind));
                theta.insert(x.clone(), other.clone());
            }
            (Term::Con(c, xs), Term::Con(d, ys)) => {
                if c != d || xs.len() != ys.len() {
                    return None;
                }
                for (x, y) in xs.iter().zip(ys.iter()).rev() {
                    work.push((x.clone(), y.clone()));
                }
            }
            // de Bruijn indices only meet each other structurally
            _ => return None,
        }
    }
    Some(theta)
}

/// `compose(θ, φ)` maps every variable `x` to `φ(θ(x))`.
pub fn compose(theta: &Substitution, phi: &Substitution) -> Substitution {
    let mut out = Substitution::new();
    for (x, t) in theta.iter() {
        out.insert(x.clone(), t.apply(phi));
    }
    for (x, t) in phi.iter() {
        if !theta.contains(x) {
            out.insert(x.clone(), t.clone());
        }
    }
    out
}

/// Σθ.
pub fn signature_update(sig: &Signature, theta: &Substitution) -> Signature {
    sig.update(theta)
}
