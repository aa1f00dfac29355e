use std::time::Instant;

use lexarg_core::blaf::{BlafBuilder, BlafCase, Role, EEX, EINC, INNOCENCE};
use lexarg_core::epistemic::Interval;
use lexarg_core::explain::{explain, Bound, ReasonKind};
use lexarg_core::oracle::oracle_entail_all;
use lexarg_core::rational::{format_interval, format_two_digits, int, ratio};

fn example1() -> BlafCase {
    BlafBuilder::legal()
        .argument("T1", Role::SubHypothesis)
        .argument("T2", Role::SubHypothesis)
        .argument("T3", Role::SubHypothesis)
        .argument("E1", Role::Evidence)
        .edge("T1", EINC, ratio(9, 10))
        .edge("E1", EINC, int(1))
        .edge("T2", EEX, int(1))
        .edge("T3", "T2", int(1))
        .build()
        .unwrap()
}

fn example2() -> BlafCase {
    let mut b = lexarg_core::blaf::extended_template(ratio(3, 10), ratio(3, 10));
    for e in ["V1", "V2", "D1", "D2", "W1", "E1"] {
        b = b.argument(e, Role::Evidence);
    }
    b.edge("V1", "Motive", ratio(4, 5))
        .edge("D1", "Motive", ratio(1, 10))
        .edge("W1", "Opportunity", ratio(1, 5))
        .edge("V2", "Ed", ratio(1, 5))
        .edge("E1", "D2", ratio(3, 10))
        .edge("E1", "Alibi", ratio(3, 10))
        .edge("D2", "Alibi", ratio(9, 10))
        .build()
        .unwrap()
}

fn assume_all(case: &BlafCase, texts: &[&str]) -> BlafCase {
    texts.iter().fold(case.clone(), |c, t| c.assume(t).unwrap().0)
}

fn cell(case: &BlafCase, arg: &str) -> String {
    let b = case.solve().unwrap();
    let i = b.get(arg).unwrap();
    if arg == INNOCENCE {
        format_two_digits(&i.upper)
    } else {
        format_interval(&i.lower, &i.upper)
    }
}

#[test]
fn example1_matches_world_oracle() {
    for extra in [&[][..], &["p(T3) >= 0.7"], &["p(E1) >= 0.9"]] {
        let case = assume_all(&example1(), extra);
        let marginal = case.solve().unwrap();
        let worlds = oracle_entail_all(case.graph(), &case.constraints()).unwrap();
        assert_eq!(marginal, worlds, "{extra:?}");
    }
}

#[test]
fn example1_third_column() {
    let case = assume_all(&example1(), &["p(E1) >= 0.9"]);
    let rows: Vec<String> =
        ["Innocence", "Einc", "Eex", "T1", "T2", "T3", "E1"].iter().map(|a| cell(&case, a)).collect();
    assert_eq!(rows, ["0.1", "[0.9, 1]", "[0, 0.1]", "[0, 1]", "[0, 0.1]", "[0, 0.1]", "[0.9, 1]"]);
}

#[test]
fn example2_reconstruction_against_world_oracle() {
    let columns: [&[&str]; 4] = [
        &[],
        &["p(W1) = 1", "p(E1) = 1"],
        &["p(W1) = 1", "p(E1) = 1", "p(D1) = 1"],
        &["p(W1) = 1", "p(E1) = 1", "p(D1) = 1", "p(V2) = 1"],
    ];
    let base = example2();
    assert_eq!(base.graph().len(), 15);
    for assumptions in columns {
        let case = assume_all(&base, assumptions);
        let started = Instant::now();
        let worlds = oracle_entail_all(case.graph(), &case.constraints()).unwrap();
        let elapsed = started.elapsed();
        assert_eq!(case.solve().unwrap(), worlds, "{assumptions:?} ({elapsed:?})");
    }
    let last = assume_all(&base, columns[3]);
    let b = last.solve().unwrap();
    assert_eq!(b.get("D2"), Some(&Interval::new(ratio(3, 10), ratio(8, 9))));
    assert_eq!(b.get(EINC), Some(&Interval::new(ratio(1, 5), ratio(7, 10))));
    assert_eq!(b.upper(INNOCENCE), Some(&ratio(4, 5)));
}

#[test]
fn d2_upper_is_explained_by_alibi() {
    let case = assume_all(&example2(), &["p(W1) = 1", "p(E1) = 1", "p(D1) = 1", "p(V2) = 1"]);
    let b = case.solve().unwrap();
    let e = explain(&case, &b, "D2", Bound::Upper, 1).unwrap();
    assert_eq!(e.reasons.len(), 1);
    assert_eq!(e.reasons[0].kind, ReasonKind::SupportedChild);
    assert_eq!(e.reasons[0].arguments[0].as_str(), "Alibi");
    assert_eq!(e.reasons[0].induced, ratio(8, 9));
}

fn camera() -> BlafCase {
    BlafBuilder::legal()
        .argument("Camera", Role::SubHypothesis)
        .argument("Camera1", Role::Evidence)
        .argument("Camera2", Role::Evidence)
        .edge("Camera1", "Camera", ratio(1, 2))
        .edge("Camera2", "Camera", ratio(1, 2))
        .edge("Camera", EINC, int(1))
        .collective("Camera", ["Camera1", "Camera2"])
        .build()
        .unwrap()
}

#[test]
fn camera_lower_bounds() {
    let both = assume_all(&camera(), &["p(Camera1) = 0.7", "p(Camera2) = 0.9"]);
    let b = both.solve().unwrap();
    assert_eq!(b.lower("Camera"), Some(&ratio(4, 5)));
    let e = explain(&both, &b, "Camera", Bound::Lower, 2).unwrap();
    assert_eq!(e.reasons[0].kind, ReasonKind::CsGroup);
    assert_eq!(e.reasons[0].induced, ratio(4, 5));

    let one_side = assume_all(&camera(), &["p(Camera1) = 1", "p(Camera2) = 0"]);
    assert_eq!(one_side.solve().unwrap().lower("Camera"), Some(&ratio(1, 2)));
    let worlds = oracle_entail_all(one_side.graph(), &one_side.constraints()).unwrap();
    assert_eq!(worlds.lower("Camera"), Some(&ratio(1, 2)));
}
