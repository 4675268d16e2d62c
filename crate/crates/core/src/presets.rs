//! Named hyperparameter presets.
//!
//! The four dataset presets carry the published per-dataset β with `d = 64`
//! and learning rate 0.025; no data ships with them. `toy` is tuned for the
//! bundled synthetic templates.

use crate::autoencoder::TrainConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub anchor: &'static str,
    pub train: TrainConfig,
}

pub const NAMES: [&str; 5] = ["dblp", "douban", "imdb", "yelp", "toy"];

fn dataset(name: &'static str, anchor: &'static str, beta: f64) -> Preset {
    Preset {
        name,
        anchor,
        train: TrainConfig {
            dim: 64,
            beta,
            learning_rate: 0.025,
            ..Default::default()
        },
    }
}

pub fn preset(name: &str) -> Option<Preset> {
    Some(match name {
        "dblp" => dataset("dblp", "paper", 30.0),
        "douban" => dataset("douban", "movie", 100.0),
        "imdb" => dataset("imdb", "movie", 2.0),
        "yelp" => dataset("yelp", "business", 80.0),
        "toy" => Preset {
            name: "toy",
            anchor: "paper",
            train: TrainConfig {
                dim: 64,
                beta: 2.0,
                learning_rate: 0.025,
                epochs: 500,
                batch_size: 16,
                ..Default::default()
            },
        },
        _ => return None,
    })
}
