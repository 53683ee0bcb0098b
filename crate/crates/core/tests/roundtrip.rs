// SPDX-License-Identifier: Apache-2.0

mod common;

use fabric_est::fixtures::Fixture;
use fabric_est::ir::{validate, OpKind, ViolationKind};
use fabric_est::text::{parse, print};
use proptest::prelude::*;

fn assert_round_trip(g: &fabric_est::CircuitGraph) {
    assert!(validate(g).is_empty(), "{:?}", validate(g));
    let text = print(g);
    let back = parse(&text).unwrap_or_else(|d| panic!("{d:?}\n{text}"));
    assert!(
        back.is_isomorphic(g),
        "not isomorphic:\n{text}\n---\n{}",
        print(&back)
    );
    assert_eq!(print(&back), text);
}

#[test]
fn fixtures_round_trip() {
    for f in Fixture::ALL {
        assert_round_trip(&f.generate().unwrap());
    }
    for n in [1, 2, 3] {
        assert_round_trip(&Fixture::ArrayMult(n).generate().unwrap());
        assert_round_trip(&Fixture::RippleAdder(n).generate().unwrap());
    }
}

#[test]
fn random_boolean_graphs_round_trip() {
    let mut rng = common::rng(0x5eed_0001);
    for _ in 0..100 {
        assert_round_trip(&common::random_boolean(&mut rng, 16, false));
    }
}

#[test]
fn random_ckks_graphs_round_trip() {
    let mut rng = common::rng(0x5eed_0002);
    for _ in 0..100 {
        assert_round_trip(&common::random_ckks(&mut rng, 16));
    }
}

#[test]
fn isomorphism_detects_changed_attribute() {
    let g = Fixture::LutCanonicalize.generate().unwrap();
    let mut h = g.clone();
    h.operators[0].kind = OpKind::Lut2 { lut: 7 };
    assert!(!g.is_isomorphic(&h));
    let mut h = g.clone();
    h.operators[1].operands.swap(1, 2);
    assert!(!g.is_isomorphic(&h));
}

#[test]
fn removing_a_producer_is_use_before_def() {
    let mut rng = common::rng(0x5eed_0003);
    let mut checked = 0;
    for _ in 0..200 {
        let mut g = common::random_gate_circuit(&mut rng, 10);
        let consumed: Vec<usize> = (0..g.operators.len())
            .filter(|&p| {
                let r = g.operators[p].results[0];
                g.operators.iter().any(|op| op.operands.contains(&r)) || g.returns.contains(&r)
            })
            .collect();
        let Some(&victim) = consumed.first() else {
            continue;
        };
        g.operators.remove(victim);
        let v = validate(&g);
        assert!(
            v.iter()
                .any(|v| matches!(v.kind, ViolationKind::UseBeforeDef { .. })),
            "{v:?}"
        );
        checked += 1;
    }
    assert!(checked > 50);
}

#[test]
fn duplicated_result_is_double_def() {
    let mut g = Fixture::HalfAdder.generate().unwrap();
    let first = g.operators[0].results[0];
    g.operators[1].results[0] = first;
    let v = validate(&g);
    assert!(
        v.iter()
            .any(|v| matches!(v.kind, ViolationKind::DoubleDef { .. })),
        "{v:?}"
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printing_is_a_parse_fixed_point(seed in any::<u64>(), ckks in any::<bool>()) {
        let mut rng = common::rng(seed);
        let g = if ckks {
            common::random_ckks(&mut rng, 12)
        } else {
            common::random_boolean(&mut rng, 12, false)
        };
        let text = print(&g);
        let back = parse(&text).expect("printed text parses");
        prop_assert!(back.is_isomorphic(&g));
        prop_assert_eq!(print(&back), text);
    }

    #[test]
    fn parser_never_panics_on_mutated_text(seed in any::<u64>(), cut in 0usize..400, junk in "[ -~]{0,6}") {
        let mut rng = common::rng(seed);
        let text = print(&common::random_boolean(&mut rng, 8, false));
        let at = text.char_indices().map(|(i, _)| i).nth(cut % text.len()).unwrap_or(0);
        let mutated = format!("{}{}{}", &text[..at], junk, &text[at..]);
        if let Err(diags) = parse(&mutated) {
            prop_assert!(!diags.is_empty());
            prop_assert!(diags.len() <= fabric_est::text::MAX_DIAGNOSTICS);
        }
    }
}
