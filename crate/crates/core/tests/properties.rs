//! Property tests for the invariants of terms, unification, formulas,
//! syntax, the checker, computation and evaluation.

use std::collections::{BTreeSet, HashSet};

use mumall::checker::{check, check_with, rule_premises, Mode, ProofNode, Rule, RuleSet, Sequent};
use mumall::compute::{enumerate_successes_with, Order, SearchStrategy};
use mumall::formula::{Formula, Polarity};
use mumall::lambda::{LTerm, SimpleType};
use mumall::semantics::{eval_bounded, Truth};
use mumall::syntax::{parse_formula, parse_proof, printer::Printer, Definitions};
use mumall::term::{numeral, term_to_numeral, Constructors, Name, Substitution, Term};
use mumall::uformula::UFormula;
use mumall::unify::mgu;
use mumall::{stdlib, term::name};
use proptest::prelude::*;

mod common;
use common::*;

fn closed_numeral_term() -> impl Strategy<Value = Term> {
    (0u64..40).prop_map(numeral)
}

// ---------------------------------------------------------------- lambda

fn iota_lterm(depth: u32, ctx: u32) -> BoxedStrategy<LTerm> {
    let mut leaves: Vec<BoxedStrategy<LTerm>> =
        vec![Just(LTerm::cons("z")).boxed(), proptest::sample::select(vec!["a", "b"]).prop_map(LTerm::var).boxed()];
    if ctx > 0 {
        leaves.push((0..ctx).prop_map(LTerm::Bound).boxed());
    }
    let leaf = proptest::strategy::Union::new(leaves).boxed();
    if depth == 0 {
        return leaf;
    }
    let s = LTerm::cons("s");
    let succ = iota_lterm(depth - 1, ctx).prop_map(move |t| LTerm::app(s.clone(), t));
    // (λx:ι. body) arg
    let redex = (iota_lterm(depth - 1, ctx + 1), iota_lterm(depth - 1, ctx))
        .prop_map(|(b, a)| LTerm::app(LTerm::lam("x", SimpleType::Iota, b), a));
    // (λf:ι→ι. f arg) (λy:ι. s y), whose normal form is η-short
    let higher = iota_lterm(depth - 1, 0).prop_map(|a| {
        let f = LTerm::lam(
            "f",
            SimpleType::arrow(SimpleType::Iota, SimpleType::Iota),
            LTerm::app(LTerm::Bound(0), a),
        );
        LTerm::app(f, LTerm::lam("y", SimpleType::Iota, LTerm::app(LTerm::cons("s"), LTerm::Bound(0))))
    });
    prop_oneof![2 => leaf, 2 => succ, 1 => redex, 1 => higher].boxed()
}

fn closed_lterm() -> BoxedStrategy<LTerm> {
    iota_lterm(4, 0)
}

fn closed(f: Formula) -> Formula {
    let f = Formula::forall_var("a", &f);
    Formula::exists_var("b", &f)
}

/// Polarities of every connective, predicate variables taking the polarity
/// of their binder.
fn polarities(f: &Formula, binders: &mut Vec<Polarity>, out: &mut BTreeSet<u8>) {
    use Formula::*;
    let mark = |p: Polarity, out: &mut BTreeSet<u8>| {
        out.insert(matches!(p, Polarity::Pos) as u8);
    };
    match f {
        Tensor(a, b) | Plus(a, b) => {
            mark(Polarity::Pos, out);
            polarities(a, binders, out);
            polarities(b, binders, out);
        }
        Par(a, b) | With(a, b) => {
            mark(Polarity::Neg, out);
            polarities(a, binders, out);
            polarities(b, binders, out);
        }
        One | Zero | Eq(..) => mark(Polarity::Pos, out),
        Bot | Top | Neq(..) => mark(Polarity::Neg, out),
        Exists(_, b) => {
            mark(Polarity::Pos, out);
            polarities(b, binders, out);
        }
        Forall(_, b) => {
            mark(Polarity::Neg, out);
            polarities(b, binders, out);
        }
        Mu(body, _) | Nu(body, _) => {
            let p = if matches!(f, Mu(..)) { Polarity::Pos } else { Polarity::Neg };
            mark(p, out);
            binders.push(p);
            polarities(&body.formula, binders, out);
            binders.pop();
        }
        Var(k, _) => mark(binders[binders.len() - 1 - *k as usize], out),
        Bang(_) | Quest(_) => unreachable!("expanded before the walk"),
    }
}

fn dual_pair_ok(f: &Formula, d: &Formula) -> bool {
    use Formula::*;
    match (f, d) {
        (Tensor(..), Par(..)) | (Par(..), Tensor(..)) => true,
        (With(..), Plus(..)) | (Plus(..), With(..)) => true,
        (One, Bot) | (Bot, One) | (Top, Zero) | (Zero, Top) => true,
        (Eq(a, b), Neq(c, e)) | (Neq(a, b), Eq(c, e)) => a == c && b == e,
        (Forall(..), Exists(..)) | (Exists(..), Forall(..)) => true,
        (Mu(_, a), Nu(_, b)) | (Nu(_, a), Mu(_, b)) => a == b,
        (Bang(_), Quest(_)) | (Quest(_), Bang(_)) => true,
        _ => false,
    }
}

// ----------------------------------------------------------- unification

/// First-order matching: `ρ` with `ρ(pattern) = target`, extending `rho`.
fn matches(pattern: &Term, target: &Term, rho: &mut Substitution) -> bool {
    match (pattern, target) {
        (Term::Var(x), _) => match rho.get(x) {
            Some(t) => t == target,
            None => {
                rho.insert(x.clone(), target.clone());
                true
            }
        },
        (Term::Con(c, xs), Term::Con(d, ys)) => {
            c == d && xs.len() == ys.len() && xs.iter().zip(ys.iter()).all(|(x, y)| matches(x, y, rho))
        }
        _ => pattern == target,
    }
}

/// Replaces some subterms equal to the image of a variable by the variable.
fn generalize(t: &Term, sigma: &[(Name, Term)], choices: &mut impl Iterator<Item = u8>) -> Term {
    for (x, g) in sigma {
        if t == g && choices.next().unwrap_or(0).is_multiple_of(2) {
            return Term::Var(x.clone());
        }
    }
    match t {
        Term::Con(c, xs) => Term::Con(c.clone(), xs.iter().map(|x| generalize(x, sigma, choices)).collect()),
        _ => t.clone(),
    }
}

fn unifiable_pair() -> impl Strategy<Value = (Term, Term, Vec<(Name, Term)>)> {
    let ground = term_over(&["a"]).prop_map(|t| t.apply(&Substitution::singleton(name("a"), Term::zero())));
    (
        proptest::collection::vec(ground, 3),
        term_over(&["x", "y", "w"]),
        proptest::collection::vec(any::<u8>(), 64),
        proptest::collection::vec(any::<u8>(), 64),
    )
        .prop_map(|(gs, template, c1, c2)| {
            let sigma: Vec<(Name, Term)> = ["x", "y", "w"].iter().map(|s| name(s)).zip(gs).collect();
            let s = Substitution::from_pairs(sigma.clone());
            let g = template.apply(&s);
            let t = generalize(&g, &sigma, &mut c1.into_iter());
            let u = generalize(&g, &sigma, &mut c2.into_iter());
            (t, u, sigma)
        })
}

fn renaming_equivalent(a: &Substitution, b: &Substitution, vars: &[Name]) -> bool {
    // a and b agree up to a bijective renaming of the variables they introduce
    let mut r1 = Substitution::new();
    let mut r2 = Substitution::new();
    vars.iter().all(|x| {
        let ta = Term::Var(x.clone()).apply(a);
        let tb = Term::Var(x.clone()).apply(b);
        matches(&ta, &tb, &mut r1) && matches(&tb, &ta, &mut r2)
    }) && r1.iter().all(|(_, t)| matches!(t, Term::Var(_)))
        && r2.iter().all(|(_, t)| matches!(t, Term::Var(_)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn numerals_round_trip(n in 0u64..500) {
        prop_assert_eq!(term_to_numeral(&numeral(n)), Some(n));
    }

    #[test]
    fn numeral_terms_round_trip(t in closed_numeral_term()) {
        let n = term_to_numeral(&t).unwrap();
        prop_assert_eq!(numeral(n), t);
    }

    #[test]
    fn normalize_is_idempotent(t in closed_lterm()) {
        let cons = Constructors::new();
        prop_assert!(t.type_of(&cons, &mut Vec::new()).is_ok());
        let n = t.normalize();
        prop_assert_eq!(n.normalize(), n);
    }

    #[test]
    fn substitution_commutes_with_normalize(t in closed_lterm(), g in closed_numeral_term(), h in nat_term()) {
        let theta = Substitution::from_pairs([(name("a"), g), (name("b"), h)]);
        prop_assert_eq!(t.normalize().apply_subst(&theta), t.apply_subst(&theta).normalize());
    }

    #[test]
    fn mgu_is_symmetric(t in term_over(&["x", "y", "w"]), u in term_over(&["x", "y", "w"])) {
        let a = mgu(&t, &u);
        let b = mgu(&u, &t);
        prop_assert_eq!(a.is_some(), b.is_some());
        if let (Some(a), Some(b)) = (a, b) {
            prop_assert_eq!(t.apply(&a), u.apply(&a));
            let vars: Vec<Name> = ["x", "y", "w"].iter().map(|s| name(s)).collect();
            prop_assert!(renaming_equivalent(&a, &b, &vars));
        }
    }

    #[test]
    fn mgu_is_idempotent(t in term_over(&["x", "y", "w"]), u in term_over(&["x", "y", "w"])) {
        if let Some(theta) = mgu(&t, &u) {
            prop_assert_eq!(t.apply(&theta).apply(&theta), t.apply(&theta));
            prop_assert_eq!(u.apply(&theta).apply(&theta), u.apply(&theta));
        }
    }

    #[test]
    fn mgu_is_most_general((t, u, sigma) in unifiable_pair()) {
        let s = Substitution::from_pairs(sigma.clone());
        prop_assert_eq!(t.apply(&s), u.apply(&s));
        let theta = mgu(&t, &u).expect("a unifier exists");
        // solve for ρ with σ = ρ ∘ θ on every variable
        let mut rho = Substitution::new();
        for (x, g) in &sigma {
            let tx = Term::Var(x.clone()).apply(&theta);
            prop_assert!(matches(&tx, g, &mut rho), "{} under θ is {:?}, not an instance of {:?}", x, tx, g);
        }
    }

    #[test]
    fn dual_is_an_involution(f in formula()) {
        prop_assert_eq!(f.dual().dual(), f);
    }

    #[test]
    fn dual_swaps_the_top_connective(f in formula()) {
        prop_assert!(dual_pair_ok(&f, &f.dual()), "{} / {}", f, f.dual());
    }

    #[test]
    fn expansion_commutes_with_dual(f in formula()) {
        prop_assert_eq!(f.dual().expand_exponentials(), f.expand_exponentials().dual());
    }

    #[test]
    fn level_one_iff_single_polarity(f in formula()) {
        let class = f.classify().unwrap();
        let mut seen = BTreeSet::new();
        polarities(&f.expand_exponentials(), &mut Vec::new(), &mut seen);
        prop_assert_eq!(class.level == 1, seen.len() == 1, "{} classified {}", f, class);
    }

    #[test]
    fn polarizations_enumerate_and_round_trip(f in formula_with(false)) {
        let u = UFormula::depolarize(&f);
        let n = u.connective_count();
        prop_assume!(n <= 6);
        let mut seen = HashSet::new();
        for bits in 0u32..(1 << n) {
            let choice: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
            let p = u.polarize(&choice).unwrap();
            prop_assert_eq!(UFormula::depolarize(&p), u.clone());
            seen.insert(p);
        }
        prop_assert_eq!(seen.len(), 1 << n);
    }

    #[test]
    fn print_then_parse_is_identity(f in formula()) {
        let text = Printer::new().formula(&f);
        let back = parse_formula(&text, &Definitions::new(), &Constructors::new())
            .unwrap_or_else(|e| panic!("{text}: {e}"));
        prop_assert_eq!(back.polarized(), Some(&f), "{}", text);
    }

    #[test]
    fn unpolarized_print_then_parse_is_identity(f in formula_with(false)) {
        let u = UFormula::depolarize(&f);
        let text = Printer::new().uformula(&u);
        let back = parse_formula(&text, &Definitions::new(), &Constructors::new())
            .unwrap_or_else(|e| panic!("{text}: {e}"));
        let back = match back {
            mumall::syntax::AnyFormula::Unpolarized(b) => b,
            mumall::syntax::AnyFormula::Polarized(p) => UFormula::depolarize(&p),
        };
        prop_assert_eq!(back, u, "{}", text);
    }
}

// evaluation is exponential in fuel on random bodies, so the bounds stay small
proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn eval_is_monotone_in_its_bounds(f in formula(), fuel in 0u32..3, q in 0u64..3, df in 1u32..3, dq in 1u64..3) {
        let f = closed(f);
        let lo = eval_bounded(&f, fuel, q).unwrap();
        let hi = eval_bounded(&f, fuel + df, q + dq).unwrap();
        if lo != Truth::Unknown {
            prop_assert_eq!(lo, hi, "{}", f);
        }
    }

    #[test]
    fn eval_respects_duality(f in formula(), fuel in 0u32..5, q in 0u64..4) {
        let f = closed(f);
        prop_assert_eq!(eval_bounded(&f.dual(), fuel, q).unwrap(), !eval_bounded(&f, fuel, q).unwrap());
    }
}

// ------------------------------------------------------------ computation

fn arith(name: &str) -> mumall::formula::Pred {
    stdlib::definitions().get(name).unwrap().clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn more_fuel_never_loses_a_success(a in 0u64..4, b in 0u64..4, fuel in 1u64..400, pick in 0usize..2) {
        let p = arith(["plus", "mult"][pick]);
        let args = [numeral(a), numeral(b)];
        for order in [Order::Dfs, Order::IterativeDeepening, Order::RandomizedDfs(7)] {
            let lo: BTreeSet<_> = enumerate_successes_with(&p, &args, &SearchStrategy::new(order, fuel)).unwrap().into_iter().collect();
            let hi: BTreeSet<_> = enumerate_successes_with(&p, &args, &SearchStrategy::new(order, fuel * 4)).unwrap().into_iter().collect();
            prop_assert!(lo.is_subset(&hi));
        }
    }
}

#[test]
fn strategies_agree_on_the_value_sets() {
    for pname in ["plus", "mult"] {
        let p = arith(pname);
        for a in 0..=5 {
            for b in 0..=5 {
                let args = [numeral(a), numeral(b)];
                let fuel = 200_000;
                let dfs = enumerate_successes_with(&p, &args, &SearchStrategy::new(Order::Dfs, fuel)).unwrap();
                let id = enumerate_successes_with(&p, &args, &SearchStrategy::new(Order::IterativeDeepening, fuel)).unwrap();
                let sd: BTreeSet<_> = dfs.into_iter().collect();
                let si: BTreeSet<_> = id.into_iter().collect();
                assert_eq!(sd, si, "{pname} {a} {b}");
            }
        }
    }
}

#[test]
fn ground_arithmetic_agrees_with_compute() {
    let d = stdlib::definitions();
    for pname in ["plus", "mult"] {
        let p = arith(pname);
        for a in 0..=5u64 {
            for b in 0..=5u64 {
                let found = enumerate_successes_with(&p, &[numeral(a), numeral(b)], &SearchStrategy::default()).unwrap();
                for c in 0..=26u64 {
                    let fact = d.get(pname).unwrap().apply(&[numeral(a), numeral(b), numeral(c)]).unwrap();
                    // a false fact may stay unknown: its inner witness ranges past any bound
                    let truth = eval_bounded(&fact, 60, c).unwrap();
                    assert_eq!(truth == Truth::True, found.contains(&numeral(c)), "{pname} {a} {b} {c}");
                }
            }
        }
    }
}

// --------------------------------------------------------------- checker

fn core_modes() -> [Mode; 4] {
    [Mode::Core, Mode::CorePlusAdmissible, Mode::MuLK, Mode::MuLKPlus]
}

#[test]
fn acceptance_is_monotone_in_the_mode() {
    for p in stdlib::shipped_proofs().unwrap() {
        let base = p.header.rules.mode;
        let from = core_modes().iter().position(|m| *m == base).unwrap();
        for mode in &core_modes()[from..] {
            let rules = RuleSet { mode: *mode, ..p.header.rules };
            assert!(p.check_under(rules).accepted, "{} in {}", p.name, mode.keyword());
        }
    }
}

#[test]
fn checking_is_deterministic() {
    for p in stdlib::shipped_proofs().unwrap() {
        let a = p.check();
        let b = p.check();
        assert_eq!(a.accepted, b.accepted);
        assert_eq!(format!("{:?}", a.failure), format!("{:?}", b.failure));
    }
}

/// Every `all` node with the sequent it concludes.
fn forall_sites(n: &ProofNode, s: &Sequent, rules: RuleSet, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, Sequent)>) {
    if matches!(n.rule, Rule::Forall(_)) {
        out.push((path.clone(), s.clone()));
    }
    let premises = rule_premises(n, s, rules, &Constructors::new()).expect("shipped proofs check");
    for (k, (c, p)) in n.children.iter().zip(premises.iter()).enumerate() {
        path.push(k);
        forall_sites(c, p, rules, path, out);
        path.pop();
    }
}

#[test]
fn reusing_an_eigenvariable_is_rejected() {
    let mut tried = 0;
    for p in stdlib::shipped_proofs().unwrap() {
        let mut sites = Vec::new();
        forall_sites(&p.tree, &p.goal, p.header.rules, &mut Vec::new(), &mut sites);
        for (path, s) in sites {
            for stale in s.sig.iter() {
                let mut tree = p.tree.clone();
                tree.get_mut(&path).unwrap().rule = Rule::Forall(stale.clone());
                let r = check_with(&tree, &p.goal, p.header.rules, &Constructors::new());
                assert!(!r.accepted, "{}: reusing {stale} at {path:?} was accepted", p.name);
                tried += 1;
            }
        }
    }
    assert!(tried >= 20, "only {tried} mutants");
}

#[test]
fn shipped_proofs_print_and_parse_back() {
    let p = Printer::new();
    for (_, f) in stdlib::corpus().unwrap() {
        for (name, _, tree) in f.proofs() {
            let text = p.proof(tree);
            let back = parse_proof(&text, &f.definitions, &f.constructors).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
            assert_eq!(&back, tree, "{name}");
        }
    }
}

#[test]
fn unfold_needs_the_admissible_rules() {
    // sanity check that the rule-set plumbing used above is not vacuous
    let nat = arith("nat").apply(&[numeral(0)]).unwrap();
    let goal = Sequent::closed_over(vec![nat.dual(), nat]);
    let src = "unfold { with { neq { mu { plus(0) { eq } } }; all(y) { par { neq } } } }";
    let p = parse_proof(src, &Definitions::new(), &Constructors::new()).unwrap();
    assert!(!check(&p, &goal, RuleSet::new(Mode::Core)).accepted);
    assert!(check(&p, &goal, RuleSet::new(Mode::CorePlusAdmissible)).accepted);
}
