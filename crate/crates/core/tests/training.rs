use hinev_core::autoencoder::{encode_all, TrainError};
use hinev_core::checkpoint::Checkpoint;
use hinev_core::synth::{generate, RandomSpec, SynthSpec, Template};
use hinev_core::{
    build_incident_matrices, embed, generate_events, train, train_with, AnchorRule,
    AutoencoderParams, IncidentMatrices, ObjectEmbeddings, TrainConfig,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn matrices(template: Template) -> IncidentMatrices {
    let d = generate(&SynthSpec { template, seed: 3 });
    let events = generate_events(&d.hin, &AnchorRule::new("paper")).unwrap();
    build_incident_matrices(&events, &d.hin)
}

#[test]
fn same_seed_same_model() {
    let m = matrices(Template::Random(RandomSpec::default()));
    let cfg = TrainConfig {
        dim: 16,
        epochs: 15,
        batch_size: 8,
        seed: 5,
        ..Default::default()
    };
    let a = train(&m, &cfg).unwrap();
    let b = train(&m, &cfg).unwrap();
    assert_eq!(a.params, b.params);
    assert_eq!(a.embeddings, b.embeddings);
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a.epoch_losses), bits(&b.epoch_losses));
    let c = train(&m, &TrainConfig { seed: 6, ..cfg }).unwrap();
    assert_ne!(a.params, c.params);
}

#[test]
fn zero_epochs_returns_the_initialisation() {
    let m = matrices(Template::Fig3a);
    let cfg = TrainConfig {
        dim: 4,
        epochs: 0,
        seed: 9,
        ..Default::default()
    };
    let model = train(&m, &cfg).unwrap();
    let init = AutoencoderParams::init(&m.type_sizes(), 4, 1, &mut ChaCha8Rng::seed_from_u64(9));
    assert_eq!(model.params, init);
    assert!(model.epoch_losses.is_empty());
    assert_eq!(model.embeddings, encode_all(&init, &m).unwrap());
}

#[test]
fn loss_decreases_on_the_two_paper_toy() {
    let m = matrices(Template::Fig2a);
    let cfg = TrainConfig {
        dim: 8,
        epochs: 500,
        ..Default::default()
    };
    let mut seen = Vec::new();
    let model = train_with(&m, &cfg, |e, l| seen.push((e, l))).unwrap();
    let l = &model.epoch_losses;
    assert_eq!(l.len(), 500);
    assert_eq!(seen.len(), 500);
    assert!(l[499] < 0.5 * l[0], "{} -> {}", l[0], l[499]);
}

#[test]
fn huge_learning_rate_diverges() {
    let m = matrices(Template::Fig3a);
    let cfg = TrainConfig {
        learning_rate: 1e300,
        epochs: 10,
        ..Default::default()
    };
    assert!(matches!(
        train(&m, &cfg),
        Err(TrainError::Divergence { .. })
    ));
}

#[test]
fn early_stopping_truncates_epochs() {
    let m = matrices(Template::Fig3a);
    let cfg = TrainConfig {
        epochs: 5000,
        min_rel_improvement: Some(1e-3),
        ..Default::default()
    };
    let model = train(&m, &cfg).unwrap();
    assert!(model.epoch_losses.len() < 5000);
}

#[test]
fn invalid_configs_are_rejected() {
    let m = matrices(Template::Fig3a);
    for cfg in [
        TrainConfig {
            dim: 0,
            ..Default::default()
        },
        TrainConfig {
            beta: 0.5,
            ..Default::default()
        },
        TrainConfig {
            alpha: -1.0,
            ..Default::default()
        },
        TrainConfig {
            batch_size: 0,
            ..Default::default()
        },
        TrainConfig {
            depth: 0,
            ..Default::default()
        },
    ] {
        assert!(
            matches!(train(&m, &cfg), Err(TrainError::Config(_))),
            "{cfg:?}"
        );
    }
}

#[test]
fn checkpoint_and_embeddings_round_trip() {
    let d = generate(&SynthSpec {
        template: Template::Fig3a,
        seed: 0,
    });
    let cfg = TrainConfig {
        dim: 6,
        epochs: 30,
        depth: 2,
        ..Default::default()
    };
    let e = embed(&d.hin, &AnchorRule::new("paper"), &cfg).unwrap();

    let ckpt = Checkpoint {
        type_tags: e.matrices.type_tags().to_vec(),
        beta: cfg.beta,
        alpha: cfg.alpha,
        seed: cfg.seed,
        params: e.model.params.clone(),
    };
    let mut buf = Vec::new();
    ckpt.write(&mut buf).unwrap();
    let back = Checkpoint::read(buf.as_slice()).unwrap();
    assert_eq!(back, ckpt);
    assert_eq!(
        encode_all(&back.params, &e.matrices).unwrap(),
        e.model.embeddings
    );

    let mut text = Vec::new();
    e.objects.write(&d.hin, &mut text).unwrap();
    let y = ObjectEmbeddings::read(text.as_slice(), &d.hin).unwrap();
    assert_eq!(y, e.objects);
}
