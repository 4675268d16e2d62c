//! Deterministic toy networks and their ground-truth events.
//!
//! All templates are bibliographic networks over the types
//! `author`, `paper`, `venue`, `term`, with `paper` identifying events.
//!
//! `fig3a` is the canonical five-paper toy with two author groups:
//!
//! ```text
//! p1: a1        c1 t1
//! p2: a2        c1 t1      a1, a2 never co-author but share venue and topic
//! p3: a3 a4     c2 t2
//! p4: a4 a5     c2 t2
//! p5: a3 a5     c2 t2      a3, a4, a5 co-author pairwise
//! ```
//!
//! Group labels (`g1` for p1, p2 and their objects, `g2` for the rest) are
//! emitted for classification checks.

use std::collections::BTreeSet;
use std::io::Write;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hin::{Hin, HinBuilder, NodeRef, Schema};

pub const TYPES: [&str; 4] = ["author", "paper", "venue", "term"];
pub const ANCHOR: &str = "paper";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomSpec {
    pub events: usize,
    pub communities: usize,
    pub authors_per_community: usize,
    pub venues_per_community: usize,
    pub terms_per_community: usize,
    pub max_authors: usize,
    pub max_terms: usize,
    /// Probability that an author or term is drawn from outside the paper's
    /// community.
    pub noise: f64,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            events: 50,
            communities: 4,
            authors_per_community: 6,
            venues_per_community: 1,
            terms_per_community: 4,
            max_authors: 3,
            max_terms: 2,
            noise: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Template {
    /// Two papers sharing both authors and the venue.
    Fig2a,
    /// Two single-author papers sharing venue and term.
    Fig2b,
    Fig3a,
    Random(RandomSpec),
}

impl FromStr for Template {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fig2a" => Ok(Template::Fig2a),
            "fig2b" => Ok(Template::Fig2b),
            "fig3a" => Ok(Template::Fig3a),
            "random" => Ok(Template::Random(RandomSpec::default())),
            other => Err(format!(
                "unknown template `{other}` (expected fig2a, fig2b, fig3a or random)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub template: Template,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectedEvent {
    pub identifier: NodeRef,
    pub members: BTreeSet<NodeRef>,
}

#[derive(Debug, Clone)]
pub struct SynthData {
    pub hin: Hin,
    pub expected: Vec<ExpectedEvent>,
    pub labels: Vec<(NodeRef, String)>,
    pub anchor: String,
}

impl SynthData {
    pub fn write_labels<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (n, l) in &self.labels {
            writeln!(w, "{}\t{}\t{l}", n.id, n.type_tag)?;
        }
        Ok(())
    }
}

pub fn schema() -> Schema {
    Schema::new(TYPES).expect("static schema is valid")
}

struct Paper<'a> {
    id: String,
    authors: Vec<String>,
    venue: &'a str,
    terms: Vec<String>,
    group: String,
}

fn assemble(papers: &[Paper]) -> SynthData {
    let mut b = HinBuilder::new(schema());
    let mut expected = Vec::new();
    let mut labels = Vec::new();
    let mut labelled = BTreeSet::new();
    for p in papers {
        let paper = (p.id.as_str(), "paper");
        let mut members = BTreeSet::from([NodeRef::new(&p.id, "paper")]);
        let mut label = |n: NodeRef| {
            if labelled.insert(n.clone()) {
                labels.push((n, p.group.clone()));
            }
        };
        label(NodeRef::new(&p.id, "paper"));
        for a in &p.authors {
            b.add_link((a, "author"), paper).expect("declared type");
            members.insert(NodeRef::new(a, "author"));
            label(NodeRef::new(a, "author"));
        }
        b.add_link(paper, (p.venue, "venue"))
            .expect("declared type");
        members.insert(NodeRef::new(p.venue, "venue"));
        label(NodeRef::new(p.venue, "venue"));
        for t in &p.terms {
            b.add_link(paper, (t, "term")).expect("declared type");
            members.insert(NodeRef::new(t, "term"));
            label(NodeRef::new(t, "term"));
        }
        expected.push(ExpectedEvent {
            identifier: NodeRef::new(&p.id, "paper"),
            members,
        });
    }
    SynthData {
        hin: b.build(),
        expected,
        labels,
        anchor: ANCHOR.to_string(),
    }
}

fn paper<'a>(id: &str, authors: &[&str], venue: &'a str, terms: &[&str], group: &str) -> Paper<'a> {
    Paper {
        id: id.to_string(),
        authors: authors.iter().map(|s| s.to_string()).collect(),
        venue,
        terms: terms.iter().map(|s| s.to_string()).collect(),
        group: group.to_string(),
    }
}

pub fn generate(spec: &SynthSpec) -> SynthData {
    match spec.template {
        Template::Fig2a => assemble(&[
            paper("p1", &["a1", "a2"], "c1", &[], "g1"),
            paper("p2", &["a1", "a2"], "c1", &[], "g1"),
        ]),
        Template::Fig2b => assemble(&[
            paper("p1", &["a1"], "c1", &["t1"], "g1"),
            paper("p2", &["a2"], "c1", &["t1"], "g1"),
        ]),
        Template::Fig3a => assemble(&[
            paper("p1", &["a1"], "c1", &["t1"], "g1"),
            paper("p2", &["a2"], "c1", &["t1"], "g1"),
            paper("p3", &["a3", "a4"], "c2", &["t2"], "g2"),
            paper("p4", &["a4", "a5"], "c2", &["t2"], "g2"),
            paper("p5", &["a3", "a5"], "c2", &["t2"], "g2"),
        ]),
        Template::Random(r) => random(&r, spec.seed),
    }
}

fn random(r: &RandomSpec, seed: u64) -> SynthData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let communities = r.communities.max(1);
    let pool = |prefix: &str, per: usize| -> Vec<Vec<String>> {
        (0..communities)
            .map(|c| {
                (0..per.max(1))
                    .map(|k| format!("{prefix}{c}_{k}"))
                    .collect()
            })
            .collect()
    };
    let authors = pool("a", r.authors_per_community);
    let venues = pool("v", r.venues_per_community);
    let terms = pool("t", r.terms_per_community);
    let pick = |pools: &[Vec<String>], home: usize, k: usize, rng: &mut ChaCha8Rng| {
        let mut chosen: Vec<String> = Vec::new();
        let mut guard = 0;
        while chosen.len() < k && guard < 100 * k {
            guard += 1;
            let c = if rng.random_bool(r.noise) {
                rng.random_range(0..communities)
            } else {
                home
            };
            let cand = pools[c].choose(rng).expect("nonempty pool").clone();
            if !chosen.contains(&cand) {
                chosen.push(cand);
            }
        }
        chosen
    };
    let mut papers = Vec::with_capacity(r.events);
    let mut venue_ids = Vec::with_capacity(r.events);
    let mut drafts = Vec::with_capacity(r.events);
    for e in 0..r.events {
        let home = rng.random_range(0..communities);
        let n_auth = rng.random_range(1..=r.max_authors.max(1));
        let n_term = rng.random_range(1..=r.max_terms.max(1));
        let a = pick(&authors, home, n_auth, &mut rng);
        let t = pick(&terms, home, n_term, &mut rng);
        let v = venues[home].choose(&mut rng).expect("nonempty").clone();
        venue_ids.push(v);
        drafts.push((format!("p{e}"), a, t, format!("c{home}")));
    }
    for ((id, a, t, g), v) in drafts.into_iter().zip(&venue_ids) {
        papers.push(Paper {
            id,
            authors: a,
            venue: v.as_str(),
            terms: t,
            group: g,
        });
    }
    let mut data = assemble(&papers);
    // Objects drawn across communities keep the label of their home pool.
    for (n, l) in &mut data.labels {
        if n.type_tag != "paper" {
            let c: String = n.id[1..].split('_').next().unwrap_or_default().to_string();
            *l = format!("c{c}");
        }
    }
    data
}
