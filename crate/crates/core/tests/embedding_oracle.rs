mod common;

use hinev_core::embedding::EmbeddingError;
use hinev_core::proximity::{efp, esp};
use hinev_core::synth::{generate, RandomSpec, SynthSpec, Template};
use hinev_core::{
    build_incident_matrices, cosine, embed, generate_events, object_embeddings, AnchorRule,
    EventEmbeddings, NodeId, ObjectEmbeddings, TrainConfig,
};
use ndarray::Array2;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_z(events: usize, dim: usize, seed: u64) -> EventEmbeddings {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    EventEmbeddings {
        z: Array2::from_shape_fn((events, dim), |_| rng.random_range(-3.0..3.0)),
    }
}

proptest! {
    #[test]
    fn matrix_form_equals_mean_loop(seed in any::<u64>(), papers in 0usize..10, dim in 1usize..6) {
        let hin = common::random_hin(seed, papers, 5);
        let events = generate_events(&hin, &AnchorRule::new("paper")).unwrap();
        let m = build_incident_matrices(&events, &hin);
        let z = random_z(events.len(), dim, seed);
        let y = object_embeddings(&z, &m).unwrap();
        for (n, _) in hin.nodes() {
            match common::mean_loop(&hin, &z.z, n) {
                Some(want) => {
                    let got = y.vector(&hin, n).unwrap();
                    for (g, w) in got.iter().zip(&want) {
                        prop_assert!((g - w).abs() < 1e-12);
                    }
                }
                None => {
                    prop_assert!(y.vector(&hin, n).is_none());
                    let t = hin.type_of(n).0;
                    prop_assert!(y.is_excluded(t, hin.local_index(n)));
                    prop_assert!(y.row(t, hin.local_index(n)).iter().all(|&v| v == 0.0));
                }
            }
        }
    }

    #[test]
    fn identical_event_sets_have_unit_cosine(seed in any::<u64>(), dim in 1usize..8) {
        let d = generate(&SynthSpec { template: Template::Fig2a, seed: 0 });
        let events = generate_events(&d.hin, &AnchorRule::new("paper")).unwrap();
        let m = build_incident_matrices(&events, &d.hin);
        let y = object_embeddings(&random_z(events.len(), dim, seed), &m).unwrap();
        let a1 = y.vector(&d.hin, d.hin.find("a1", "author").unwrap()).unwrap();
        let a2 = y.vector(&d.hin, d.hin.find("a2", "author").unwrap()).unwrap();
        let c1 = y.vector(&d.hin, d.hin.find("c1", "venue").unwrap()).unwrap();
        prop_assert!((cosine(a1, a2).unwrap() - 1.0).abs() < 1e-9);
        prop_assert!((cosine(a1, c1).unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn trained_embeddings_of_identical_events_coincide() {
    // p1 and p2 have the same co-authors and venue, so their events differ
    // only in the paper row.
    let d = generate(&SynthSpec {
        template: Template::Fig2a,
        seed: 0,
    });
    let cfg = TrainConfig {
        dim: 8,
        epochs: 20,
        ..Default::default()
    };
    let e = embed(&d.hin, &AnchorRule::new("paper"), &cfg).unwrap();
    let a1 = e
        .objects
        .vector(&d.hin, d.hin.find("a1", "author").unwrap())
        .unwrap();
    let a2 = e
        .objects
        .vector(&d.hin, d.hin.find("a2", "author").unwrap())
        .unwrap();
    assert_eq!(a1, a2);
}

#[test]
fn zero_vectors_have_no_cosine() {
    let z = ndarray::array![0.0, 0.0];
    let u = ndarray::array![1.0, 0.0];
    assert!(matches!(
        cosine(z.view(), u.view()),
        Err(EmbeddingError::ZeroNorm)
    ));
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap());
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j < idx.len() && v[idx[j]] == v[idx[i]] {
            j += 1;
        }
        for &k in &idx[i..j] {
            r[k] = (i + j - 1) as f64 / 2.0;
        }
        i = j;
    }
    r
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

#[test]
fn cosine_tracks_event_proximity() {
    let mut correlations = Vec::new();
    for seed in 0..5 {
        let spec = RandomSpec {
            events: 40,
            ..Default::default()
        };
        let d = generate(&SynthSpec {
            template: Template::Random(spec),
            seed,
        });
        let cfg = TrainConfig {
            epochs: 200,
            seed,
            ..Default::default()
        };
        let e = embed(&d.hin, &AnchorRule::new("paper"), &cfg).unwrap();
        let authors: Vec<NodeId> = d
            .hin
            .nodes_of_type(d.hin.schema().type_id("author").unwrap())
            .to_vec();
        let (mut prox, mut cos) = (Vec::new(), Vec::new());
        for (k, &i) in authors.iter().enumerate() {
            for &j in &authors[k + 1..] {
                let s = efp(i, j, &e.events).unwrap() + esp(i, j, &e.events).unwrap();
                let (yi, yj) = (vector(&e.objects, &d.hin, i), vector(&e.objects, &d.hin, j));
                prox.push(s);
                cos.push(cosine(yi, yj).unwrap());
            }
        }
        correlations.push(pearson(&ranks(&prox), &ranks(&cos)));
    }
    assert!(correlations.iter().all(|&c| c > 0.0), "{correlations:?}");
}

fn vector<'a>(
    y: &'a ObjectEmbeddings,
    hin: &hinev_core::Hin,
    n: NodeId,
) -> ndarray::ArrayView1<'a, f64> {
    y.vector(hin, n).unwrap()
}
