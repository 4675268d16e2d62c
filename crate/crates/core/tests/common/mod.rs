//! Random small networks and independent reference implementations.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use hinev_core::{Hin, HinBuilder, NodeId, NodeRef, Schema};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TYPES: [&str; 4] = ["author", "paper", "venue", "term"];

/// Bibliographic network with up to `max_per_type` objects of each
/// non-anchor type. Some objects may stay isolated.
pub fn random_hin(seed: u64, papers: usize, max_per_type: usize) -> Hin {
    random_hin_with(seed, papers, max_per_type, true)
}

pub fn random_hin_with(seed: u64, papers: usize, max_per_type: usize, isolated: bool) -> Hin {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = HinBuilder::new(Schema::new(TYPES).unwrap());
    let sizes: Vec<usize> = (0..3).map(|_| rng.random_range(1..=max_per_type)).collect();
    for p in 0..papers {
        let paper = format!("p{p}");
        for (t, &ty) in ["author", "venue", "term"].iter().enumerate() {
            for k in 0..sizes[t] {
                if rng.random_bool(0.4) {
                    b.add_link((&paper, "paper"), (&format!("{}{k}", &ty[..1]), ty))
                        .unwrap();
                }
            }
        }
        if isolated && rng.random_bool(0.2) {
            b.add_node(&format!("{paper}x"), "author").unwrap();
        }
        b.add_node(&paper, "paper").unwrap();
    }
    b.build()
}

/// Events recomputed from the raw link list: every paper plus its
/// neighbours, in order of the paper's first link.
pub fn oracle_events(hin: &Hin) -> Vec<(NodeRef, BTreeSet<NodeRef>)> {
    let mut order: Vec<NodeRef> = Vec::new();
    let mut members: BTreeMap<NodeRef, BTreeSet<NodeRef>> = BTreeMap::new();
    for l in hin.links() {
        let (a, b) = (hin.node(l.a).clone(), hin.node(l.b).clone());
        let (anchor, other) = if a.type_tag == "paper" {
            (a, b)
        } else {
            (b, a)
        };
        let set = members.entry(anchor.clone()).or_insert_with(|| {
            order.push(anchor.clone());
            BTreeSet::from([anchor.clone()])
        });
        set.insert(other);
    }
    order
        .into_iter()
        .map(|p| {
            let m = members.remove(&p).unwrap();
            (p, m)
        })
        .collect()
}

pub struct OracleProximity {
    events: Vec<BTreeSet<NodeRef>>,
}

impl OracleProximity {
    pub fn new(hin: &Hin) -> Self {
        OracleProximity {
            events: oracle_events(hin).into_iter().map(|(_, m)| m).collect(),
        }
    }

    fn omega(&self, n: &NodeRef) -> BTreeSet<usize> {
        (0..self.events.len())
            .filter(|&j| self.events[j].contains(n))
            .collect()
    }

    fn cos(&self, e: usize, k: usize) -> f64 {
        let (e, k) = (&self.events[e], &self.events[k]);
        let shared = e.intersection(k).count() as f64;
        shared / ((e.len() * k.len()) as f64).sqrt()
    }

    pub fn efp(&self, i: &NodeRef, j: &NodeRef) -> Option<f64> {
        let (oi, oj) = (self.omega(i), self.omega(j));
        let union = oi.union(&oj).count();
        (union > 0).then(|| oi.intersection(&oj).count() as f64 / union as f64)
    }

    pub fn esp(&self, i: &NodeRef, j: &NodeRef) -> Option<f64> {
        let (oi, oj) = (self.omega(i), self.omega(j));
        let union = oi.union(&oj).count();
        if union == 0 {
            return None;
        }
        let mut s = 0.0;
        for &e in &oi {
            for &k in &oj {
                if e != k {
                    s += self.cos(e, k);
                }
            }
        }
        Some(s / union as f64)
    }
}

/// Per-object mean of the rows of `z` over the events containing it.
pub fn mean_loop(hin: &Hin, z: &ndarray::Array2<f64>, n: NodeId) -> Option<Vec<f64>> {
    let me = hin.node(n);
    let rows: Vec<usize> = oracle_events(hin)
        .iter()
        .enumerate()
        .filter(|(_, (_, m))| m.contains(me))
        .map(|(j, _)| j)
        .collect();
    if rows.is_empty() {
        return None;
    }
    let mut acc = vec![0.0; z.ncols()];
    for &j in &rows {
        for (a, v) in acc.iter_mut().zip(z.row(j)) {
            *a += v;
        }
    }
    Some(acc.into_iter().map(|a| a / rows.len() as f64).collect())
}

pub fn max_rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-8)
}

/// Random instance for gradient checks: at most five objects per type.
pub fn gradient_instance(
    seed: u64,
) -> (
    hinev_core::IncidentMatrices,
    hinev_core::AutoencoderParams,
    hinev_core::TrainConfig,
) {
    use hinev_core::{build_incident_matrices, generate_events, AnchorRule};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hin = loop {
        let papers = rng.random_range(1..=5);
        let hin = random_hin_with(rng.random(), papers, 5, false);
        if hin.link_count() > 0 {
            break hin;
        }
    };
    let events = generate_events(&hin, &AnchorRule::new("paper")).unwrap();
    let m = build_incident_matrices(&events, &hin);
    let config = hinev_core::TrainConfig {
        dim: rng.random_range(1..=3),
        beta: [1.0, 2.0, 5.0][rng.random_range(0..3)],
        alpha: [0.0, 0.1][rng.random_range(0..2)],
        depth: 1,
        ..Default::default()
    };
    let mut params =
        hinev_core::AutoencoderParams::init(&m.type_sizes(), config.dim, config.depth, &mut rng);
    // nonzero biases so that every code path carries signal
    for block in params.blocks_mut() {
        for v in block.iter_mut() {
            *v += rng.random_range(-0.5..0.5);
        }
    }
    (m, params, config)
}

/// Largest relative deviation between analytic and central-difference
/// gradients over every parameter.
pub fn gradient_check(
    m: &hinev_core::IncidentMatrices,
    params: &hinev_core::AutoencoderParams,
    config: &hinev_core::TrainConfig,
    h: f64,
) -> f64 {
    use hinev_core::autoencoder::{gradients, loss};
    let batch: Vec<usize> = (0..m.event_count()).collect();
    let analytic = gradients(params, m, &batch, config).unwrap();
    let analytic: Vec<f64> = analytic.blocks().concat();
    let mut worst: f64 = 0.0;
    let mut probe = params.clone();
    let mut k = 0;
    for b in 0..probe.blocks().len() {
        for i in 0..probe.blocks()[b].len() {
            let orig = probe.blocks()[b][i];
            probe.blocks_mut()[b][i] = orig + h;
            let up = loss(&probe, m, &batch, config).unwrap();
            probe.blocks_mut()[b][i] = orig - h;
            let down = loss(&probe, m, &batch, config).unwrap();
            probe.blocks_mut()[b][i] = orig;
            let numeric = (up - down) / (2.0 * h);
            worst = worst.max(
                (analytic[k] - numeric).abs() / analytic[k].abs().max(numeric.abs()).max(1e-6),
            );
            k += 1;
        }
    }
    worst
}
