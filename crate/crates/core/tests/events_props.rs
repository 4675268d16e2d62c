mod common;

use std::collections::BTreeSet;

use hinev_core::events::EventError;
use hinev_core::synth::{generate, RandomSpec, SynthSpec, Template};
use hinev_core::{
    build_incident_matrices, generate_events, AnchorRule, EventSet, Hin, HinBuilder, NodeRef,
    Schema,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn as_sets(hin: &Hin, events: &EventSet) -> Vec<(NodeRef, BTreeSet<NodeRef>)> {
    events
        .events()
        .iter()
        .map(|e| {
            (
                hin.node(e.identifier).clone(),
                e.members.iter().map(|&m| hin.node(m).clone()).collect(),
            )
        })
        .collect()
}

proptest! {
    #[test]
    fn events_match_link_oracle(seed in any::<u64>(), papers in 0usize..10) {
        let hin = common::random_hin(seed, papers, 5);
        let events = generate_events(&hin, &AnchorRule::new("paper")).unwrap();
        prop_assert_eq!(as_sets(&hin, &events), common::oracle_events(&hin));
    }

    #[test]
    fn link_order_does_not_change_events(seed in any::<u64>(), papers in 1usize..10) {
        let hin = common::random_hin(seed, papers, 5);
        let mut links = hin.links().to_vec();
        links.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let shuffled = hin.with_links(links);
        let rule = AnchorRule::new("paper");
        let a: BTreeSet<_> = as_sets(&hin, &generate_events(&hin, &rule).unwrap()).into_iter().collect();
        let b: BTreeSet<_> = as_sets(&shuffled, &generate_events(&shuffled, &rule).unwrap()).into_iter().collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn incidence_sums(seed in any::<u64>(), papers in 0usize..10) {
        let hin = common::random_hin(seed, papers, 5);
        let events = generate_events(&hin, &AnchorRule::new("paper")).unwrap();
        let m = build_incident_matrices(&events, &hin);
        prop_assert_eq!(m.event_count(), events.len());
        for (j, e) in events.events().iter().enumerate() {
            let col_sum: usize = m.event_columns(j).iter().map(|c| c.len()).sum();
            prop_assert_eq!(col_sum, e.members.len());
        }
        let mut degree_total = 0;
        for t in 0..m.type_count() {
            let h = m.matrix(t);
            for i in 0..h.rows() {
                let n = hin.nodes_of_type(hinev_core::hin::TypeId(t))[i];
                prop_assert_eq!(m.degrees(t)[i], events.events_of(n).len());
                prop_assert_eq!(h.row(i).len(), h.degree(i));
                let dense_row: usize = (0..h.cols()).map(|j| h.get(i, j) as usize).sum();
                prop_assert_eq!(dense_row, m.degrees(t)[i]);
            }
            degree_total += m.degrees(t).iter().sum::<usize>();
        }
        let member_total: usize = events.events().iter().map(|e| e.members.len()).sum();
        prop_assert_eq!(degree_total, member_total);
    }
}

#[test]
fn synthetic_templates_match_expected_events() {
    let mut specs = vec![
        SynthSpec {
            template: Template::Fig2a,
            seed: 0,
        },
        SynthSpec {
            template: Template::Fig2b,
            seed: 0,
        },
        SynthSpec {
            template: Template::Fig3a,
            seed: 0,
        },
    ];
    for seed in 0..20 {
        specs.push(SynthSpec {
            template: Template::Random(RandomSpec::default()),
            seed,
        });
    }
    for spec in specs {
        let data = generate(&spec);
        let events = generate_events(&data.hin, &AnchorRule::new(data.anchor.clone())).unwrap();
        let got = as_sets(&data.hin, &events);
        let want: Vec<_> = data
            .expected
            .iter()
            .map(|e| (e.identifier.clone(), e.members.clone()))
            .collect();
        assert_eq!(got, want, "{spec:?}");
    }
}

#[test]
fn fig2a_events() {
    let data = generate(&SynthSpec {
        template: Template::Fig2a,
        seed: 0,
    });
    let events = generate_events(&data.hin, &AnchorRule::new("paper")).unwrap();
    assert_eq!(events.len(), 2);
    let everyone: BTreeSet<String> = data.hin.nodes().map(|(_, r)| r.id.clone()).collect();
    assert_eq!(
        everyone,
        ["a1", "a2", "c1", "p1", "p2"].map(String::from).into()
    );
}

#[test]
fn link_without_anchor_is_a_rule_violation() {
    let mut b = HinBuilder::new(Schema::new(common::TYPES).unwrap());
    b.add_link(("p1", "paper"), ("a1", "author")).unwrap();
    b.add_link(("a1", "author"), ("v1", "venue")).unwrap();
    let hin = b.build();
    match generate_events(&hin, &AnchorRule::new("paper")) {
        Err(EventError::RuleViolation { index, found, .. }) => {
            assert_eq!(index, 1);
            assert_eq!(found, 0);
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(
        generate_events(&hin, &AnchorRule::new("movie")),
        Err(EventError::UnknownAnchor(_))
    ));
}
