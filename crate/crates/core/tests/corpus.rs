use mumall::checker::{check_with, Mode, RuleSet};
use mumall::derive::eliminate_admissible;
use mumall::stdlib::{self, shipped_proofs};
use mumall::syntax::parse;

fn constructors(file: &str) -> mumall::term::Constructors {
    let (_, src) = stdlib::CORPUS.iter().find(|(f, _)| *f == file).unwrap();
    parse(src).unwrap().constructors
}

#[test]
fn admissible_rule_proofs_replay_in_core() {
    let mut replayed = Vec::new();
    for p in shipped_proofs().unwrap() {
        if p.header.rules.mode != Mode::CorePlusAdmissible {
            continue;
        }
        let cons = constructors(p.file);
        let core = eliminate_admissible(&p.tree, &p.goal, &cons).unwrap_or_else(|e| panic!("{}: {e}", p.name));
        let r = check_with(&core, &p.goal, RuleSet::new(Mode::Core), &cons);
        assert!(r.accepted, "{}: {:?}", p.name, r.failure);
        assert!(core.size() >= p.tree.size(), "{}", p.name);
        replayed.push(p.name.to_string());
    }
    replayed.sort();
    assert_eq!(replayed, ["plus22_compute", "plus_determinate"]);
}

#[test]
fn core_proofs_are_untouched_by_elimination() {
    for p in shipped_proofs().unwrap() {
        if p.header.rules.mode != Mode::Core {
            continue;
        }
        let core = eliminate_admissible(&p.tree, &p.goal, &constructors(p.file)).unwrap();
        assert_eq!(core, p.tree.expand_exponentials(), "{}", p.name);
    }
}

#[test]
fn declared_modes_are_the_weakest_that_work() {
    // a proof that checks in a weaker mode should say so in its header
    let weaker = |m: Mode| match m {
        Mode::Core => None,
        Mode::CorePlusAdmissible | Mode::MuLK => Some(Mode::Core),
        Mode::MuLKPlus => Some(Mode::MuLK),
    };
    // exception: this one is rechecked under the sigma1 restriction, which
    // only exists in the structural modes
    let sigma1_witness = "succ_not_zero_n1";
    for p in shipped_proofs().unwrap() {
        if &*p.name == sigma1_witness {
            continue;
        }
        if let Some(w) = weaker(p.header.rules.mode) {
            let rules = RuleSet { mode: w, ..p.header.rules };
            assert!(!p.check_under(rules).accepted, "{} also checks in {}", p.name, w.keyword());
        }
    }
}
