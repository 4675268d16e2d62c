//! Embeddings for heterogeneous information networks built from events.
//!
//! Links are merged into multi-object events ([`events`]), events are
//! embedded by a multi-branch autoencoder ([`autoencoder`]), and every object
//! is embedded as the mean of its events' embeddings ([`embedding`]).
//! [`proximity`] holds brute-force reference proximities and [`eval`] the
//! reconstruction, link-prediction and classification protocols.

pub mod autoencoder;
pub mod checkpoint;
pub mod embedding;
pub mod eval;
pub mod events;
pub mod hin;
pub mod presets;
pub mod proximity;
pub mod synth;

pub use autoencoder::{
    train, train_with, AutoencoderParams, EventEmbeddings, TrainConfig, TrainError, TrainedModel,
};
pub use checkpoint::Checkpoint;
pub use embedding::{cosine, object_embeddings, ObjectEmbeddings};
pub use eval::{EvalError, EvalReport};
pub use events::{
    build_incident_matrices, generate_events, AnchorRule, Event, EventId, EventIdentifier,
    EventSet, IncidentMatrices,
};
pub use hin::{load_edge_list, Hin, HinBuilder, Link, LoadOptions, NodeId, NodeRef, Schema};

/// Everything produced by one run of the embedding pipeline.
#[derive(Debug, Clone)]
pub struct Embedded {
    pub events: EventSet,
    pub matrices: IncidentMatrices,
    pub model: TrainedModel,
    pub objects: ObjectEmbeddings,
}

/// Events → incident matrices → trained autoencoder → object embeddings.
pub fn embed<R: EventIdentifier + ?Sized>(
    hin: &Hin,
    rule: &R,
    config: &TrainConfig,
) -> Result<Embedded, EvalError> {
    embed_with(hin, rule, config, |_, _| {})
}

pub fn embed_with<R: EventIdentifier + ?Sized>(
    hin: &Hin,
    rule: &R,
    config: &TrainConfig,
    on_epoch: impl FnMut(usize, f64),
) -> Result<Embedded, EvalError> {
    let events = generate_events(hin, rule)?;
    let matrices = build_incident_matrices(&events, hin);
    let model = train_with(&matrices, config, on_epoch)?;
    let objects = object_embeddings(&model.embeddings, &matrices)?;
    Ok(Embedded {
        events,
        matrices,
        model,
        objects,
    })
}
