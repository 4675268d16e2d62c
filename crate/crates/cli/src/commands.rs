use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use hinev_core::embedding::write_event_embeddings;
use hinev_core::eval::{
    link_prediction, node_classification, reconstruct_network, LabeledNodes, LogisticConfig,
    SplitSpec,
};
use hinev_core::proximity::write_proximity_table;
use hinev_core::synth::{generate, SynthData, SynthSpec, Template};
use hinev_core::{
    embed, embed_with, generate_events, load_edge_list, AnchorRule, Checkpoint, Embedded,
    EvalReport, Hin, LoadOptions, NodeId, ObjectEmbeddings, Schema, TrainConfig,
};

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Task {
    Reconstruction,
    Linkpred,
    LinkpredSweep,
    Classification,
}

impl Task {
    fn name(self) -> &'static str {
        match self {
            Task::Reconstruction => "reconstruction",
            Task::Linkpred => "linkpred",
            Task::LinkpredSweep => "linkpred_sweep",
            Task::Classification => "classification",
        }
    }

    fn primary_metric(self) -> &'static str {
        match self {
            Task::Classification => "micro_f1",
            _ => "auc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepParam {
    D,
    Beta,
    Depth,
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| io_err(path, e))
}

fn write_file(
    dir: &Path,
    name: &str,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let mut w = BufWriter::new(File::create(&path).map_err(|e| io_err(&path, e))?);
    body(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| io_err(&path, e))?;
    Ok(path)
}

fn prepare_out(cfg: &RunConfig) -> Result<&Path, CliError> {
    fs::create_dir_all(&cfg.out).map_err(|e| io_err(&cfg.out, e))?;
    write_file(&cfg.out, "config.txt", |w| {
        w.write_all(cfg.render().as_bytes())
    })?;
    Ok(&cfg.out)
}

/// The network to work on plus, for synthetic data, its generator output.
pub struct Network {
    pub hin: Hin,
    pub synth: Option<SynthData>,
}

pub fn load_network(cfg: &RunConfig) -> Result<Network, CliError> {
    if let Some(input) = &cfg.input {
        let schema_path = cfg
            .schema
            .as_ref()
            .ok_or_else(|| CliError::Usage("--schema is required with --input".to_string()))?;
        let schema = Schema::read(open(schema_path)?)?;
        let hin = load_edge_list(open(input)?, &schema, LoadOptions { dedup: cfg.dedup })?;
        return Ok(Network { hin, synth: None });
    }
    if let Some(t) = &cfg.synth {
        let template: Template = t.parse().map_err(CliError::Usage)?;
        let data = generate(&SynthSpec {
            template,
            seed: cfg.synth_seed,
        });
        return Ok(Network {
            hin: data.hin.clone(),
            synth: Some(data),
        });
    }
    Err(CliError::Usage(
        "no network given: pass --input with --schema, or --synth".to_string(),
    ))
}

fn rule(cfg: &RunConfig) -> AnchorRule {
    AnchorRule::new(cfg.anchor.clone())
}

pub fn events(cfg: &RunConfig) -> Result<(), CliError> {
    let net = load_network(cfg)?;
    let events = generate_events(&net.hin, &rule(cfg))?;
    let out = prepare_out(cfg)?;
    write_file(out, "events.tsv", |w| events.write_dump(&net.hin, w))?;
    println!("events\t{}", events.len());
    Ok(())
}

fn run_embedding(
    cfg: &RunConfig,
    hin: &Hin,
    train: &TrainConfig,
    echo: bool,
) -> Result<Embedded, CliError> {
    let result = if echo {
        embed_with(hin, &rule(cfg), train, |e, l| println!("{e}\t{l}"))
    } else {
        embed(hin, &rule(cfg), train)
    };
    Ok(result?)
}

pub fn write_artifacts(
    dir: &Path,
    hin: &Hin,
    cfg: &RunConfig,
    e: &Embedded,
) -> Result<(), CliError> {
    let ckpt = Checkpoint {
        type_tags: e.matrices.type_tags().to_vec(),
        beta: cfg.train.beta,
        alpha: cfg.train.alpha,
        seed: cfg.train.seed,
        params: e.model.params.clone(),
    };
    let path = dir.join("model.ckpt");
    let mut w = BufWriter::new(File::create(&path).map_err(|e| io_err(&path, e))?);
    ckpt.write(&mut w)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    w.flush().map_err(|e| io_err(&path, e))?;
    write_file(dir, "event_embeddings.tsv", |w| {
        write_event_embeddings(hin, &e.events, &e.model.embeddings, w)
    })?;
    write_file(dir, "object_embeddings.tsv", |w| e.objects.write(hin, w))?;
    write_file(dir, "loss.tsv", |w| {
        writeln!(w, "epoch\tloss")?;
        for (k, l) in e.model.epoch_losses.iter().enumerate() {
            writeln!(w, "{k}\t{l}")?;
        }
        Ok(())
    })?;
    Ok(())
}

pub fn train(cfg: &RunConfig) -> Result<(), CliError> {
    let net = load_network(cfg)?;
    let out = prepare_out(cfg)?;
    let e = run_embedding(cfg, &net.hin, &cfg.train, true)?;
    write_artifacts(out, &net.hin, cfg, &e)?;
    let excluded = e.objects.excluded_count();
    if excluded > 0 {
        eprintln!("{excluded} object(s) belong to no event and were given zero embeddings");
    }
    Ok(())
}

fn labels(cfg: &RunConfig, hin: &Hin) -> Result<LabeledNodes, CliError> {
    let path = cfg.labels.as_ref().ok_or_else(|| {
        CliError::Usage("classification needs a label file (--labels)".to_string())
    })?;
    let (labels, unknown) = LabeledNodes::read(open(path)?, hin)?;
    if unknown > 0 {
        eprintln!("{unknown} labelled object(s) are not in the network and were skipped");
    }
    Ok(labels)
}

/// Runs one task end to end (or on `stored` object embeddings) and returns
/// its report.
fn evaluate(
    cfg: &RunConfig,
    hin: &Hin,
    task: Task,
    train: &TrainConfig,
    stored: Option<&ObjectEmbeddings>,
) -> Result<EvalReport, CliError> {
    let runs = cfg.runs.max(1);
    let embeddings = |run: usize| -> Result<ObjectEmbeddings, CliError> {
        match stored {
            Some(y) => Ok(y.clone()),
            None => {
                let t = TrainConfig {
                    seed: train.seed.wrapping_add(run as u64),
                    ..train.clone()
                };
                Ok(run_embedding(cfg, hin, &t, false)?.objects)
            }
        }
    };
    let report = match task {
        Task::Reconstruction => {
            let reports = (0..runs)
                .map(|r| {
                    let y = embeddings(r)?;
                    Ok(reconstruct_network(
                        hin,
                        &y,
                        cfg.negative_ratio,
                        train.seed.wrapping_add(r as u64),
                    )?)
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            EvalReport::aggregate(&reports)?
        }
        Task::Linkpred => {
            if stored.is_some() {
                return Err(CliError::Usage(
                    "link prediction retrains on its own split; drop --embeddings".to_string(),
                ));
            }
            linkpred(cfg, hin, train, cfg.train_ratio)?
        }
        Task::Classification => {
            let labels = labels(cfg, hin)?;
            let y = embeddings(0)?;
            node_classification(
                hin,
                &y,
                &labels,
                cfg.train_fraction,
                train.seed,
                runs,
                &LogisticConfig {
                    seed: train.seed,
                    ..Default::default()
                },
            )?
        }
        Task::LinkpredSweep => unreachable!("handled by the caller"),
    };
    Ok(report)
}

fn linkpred(
    cfg: &RunConfig,
    hin: &Hin,
    train: &TrainConfig,
    ratio: f64,
) -> Result<EvalReport, CliError> {
    let reports = (0..cfg.runs.max(1))
        .map(|r| {
            let t = TrainConfig {
                seed: train.seed.wrapping_add(r as u64),
                ..train.clone()
            };
            let spec = SplitSpec {
                train_ratio: ratio,
                seed: t.seed,
            };
            Ok(link_prediction(
                hin,
                &spec,
                &t,
                &rule(cfg),
                cfg.negative_ratio,
            )?)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(EvalReport::aggregate(&reports)?)
}

pub fn eval(cfg: &RunConfig, task: Task, stored: Option<&Path>) -> Result<(), CliError> {
    let net = load_network(cfg)?;
    if task == Task::Classification && cfg.labels.is_none() {
        return Err(CliError::Usage(
            "classification needs a label file (--labels)".to_string(),
        ));
    }
    let out = prepare_out(cfg)?;
    if task == Task::LinkpredSweep {
        let mut rows = Vec::new();
        for k in 1..=9 {
            let ratio = k as f64 / 10.0;
            let r = linkpred(cfg, &net.hin, &cfg.train, ratio)?;
            let auc = &r.metrics["auc"];
            rows.push(format!("{ratio}\tauc\t{}\t{}", auc.mean, auc.std));
            println!("{ratio}\t{}", auc.mean);
        }
        write_file(out, "linkpred_sweep.tsv", |w| {
            writeln!(w, "train_ratio\tmetric\tmean\tstd")?;
            rows.iter().try_for_each(|r| writeln!(w, "{r}"))
        })?;
        return Ok(());
    }
    let stored = match stored {
        Some(p) => Some(ObjectEmbeddings::read(open(p)?, &net.hin)?),
        None => None,
    };
    let report = evaluate(cfg, &net.hin, task, &cfg.train, stored.as_ref())?;
    write_file(out, &format!("report_{}.txt", task.name()), |w| {
        report.write_kv(w)
    })?;
    write_file(out, &format!("report_{}.tsv", task.name()), |w| {
        report.write_tsv(w)
    })?;
    report
        .write_tsv(std::io::stdout().lock())
        .map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}

pub fn sweep(
    cfg: &RunConfig,
    param: SweepParam,
    values: &[String],
    task: Task,
    metric: Option<&str>,
) -> Result<(), CliError> {
    let values: Vec<&String> = values.iter().filter(|v| !v.trim().is_empty()).collect();
    if values.is_empty() {
        return Err(CliError::Usage(
            "sweep needs at least one value".to_string(),
        ));
    }
    if task == Task::LinkpredSweep {
        return Err(CliError::Usage(
            "sweep over linkpred_sweep is not supported".to_string(),
        ));
    }
    let net = load_network(cfg)?;
    if task == Task::Classification && cfg.labels.is_none() {
        return Err(CliError::Usage(
            "classification needs a label file (--labels)".to_string(),
        ));
    }
    let metric = metric.unwrap_or(task.primary_metric());
    let (key, name) = match param {
        SweepParam::D => ("dim", "d"),
        SweepParam::Beta => ("beta", "beta"),
        SweepParam::Depth => ("depth", "depth"),
    };
    let mut rows = Vec::with_capacity(values.len());
    for v in values {
        let v = v.trim();
        let mut c = cfg.clone();
        c.set(key, v)?;
        c.train.validate()?;
        let report = evaluate(&c, &net.hin, task, &c.train, None)?;
        let m = report.metrics.get(metric).ok_or_else(|| {
            CliError::Usage(format!("task {} does not report `{metric}`", task.name()))
        })?;
        println!("{name}={v}\t{metric}\t{}", m.mean);
        rows.push(format!("{name}\t{v}\t{metric}\t{}\t{}", m.mean, m.std));
    }
    let out = prepare_out(cfg)?;
    write_file(out, "sweep.tsv", |w| {
        writeln!(w, "param\tvalue\tmetric\tmean\tstd")?;
        rows.iter().try_for_each(|r| writeln!(w, "{r}"))
    })?;
    Ok(())
}

pub fn synth(cfg: &RunConfig) -> Result<(), CliError> {
    let net = load_network(cfg)?;
    let data = net
        .synth
        .ok_or_else(|| CliError::Usage("synth needs --synth <template>".to_string()))?;
    let out = prepare_out(cfg)?;
    write_file(out, "edges.tsv", |w| data.hin.write_edge_list(w))?;
    write_file(out, "schema.txt", |w| data.hin.schema().write(w))?;
    write_file(out, "labels.tsv", |w| data.write_labels(w))?;
    write_file(out, "expected_events.tsv", |w| {
        for (j, e) in data.expected.iter().enumerate() {
            write!(w, "{j}\t{}", e.identifier)?;
            for m in &e.members {
                write!(w, "\t{m}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    })?;
    println!(
        "objects\t{}\nlinks\t{}\nevents\t{}",
        data.hin.node_count(),
        data.hin.link_count(),
        data.expected.len()
    );
    Ok(())
}

pub fn proximity(cfg: &RunConfig, type_tag: Option<&str>) -> Result<(), CliError> {
    let net = load_network(cfg)?;
    let hin = &net.hin;
    let events = generate_events(hin, &rule(cfg))?;
    let nodes: Vec<NodeId> = match type_tag {
        Some(tag) => {
            let t = hin
                .schema()
                .type_id(tag)
                .ok_or_else(|| CliError::Usage(format!("type `{tag}` is not in the schema")))?;
            hin.nodes_of_type(t).to_vec()
        }
        None => hin.nodes().map(|(n, _)| n).collect(),
    };
    let pairs: Vec<(NodeId, NodeId)> = nodes
        .iter()
        .enumerate()
        .flat_map(|(k, &i)| nodes[k + 1..].iter().map(move |&j| (i, j)))
        .collect();
    let out = prepare_out(cfg)?;
    write_file(out, "proximity.tsv", |w| {
        write_proximity_table(hin, &events, &pairs, w)
    })?;
    println!("pairs\t{}", pairs.len());
    Ok(())
}
