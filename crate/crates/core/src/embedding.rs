//! Object embeddings as the mean of the embeddings of an object's events.
//!
//! Text format for object embeddings:
//!
//! ```text
//! #dim<TAB>d<TAB>number_of_types
//! #type<TAB>tag<TAB>count            (once per type, schema order)
//! id<TAB>type<TAB>v1 v2 ... vd        (count rows per type, local row order)
//! ```
//!
//! Values use 17 significant digits so a write/read cycle is lossless.
//! Objects outside every event are written as all-zero rows; since event
//! embeddings are strictly positive, a zero row marks exactly those objects.

use std::io::{BufRead, Write};

use ndarray::{Array2, ArrayView1};
use thiserror::Error;

use crate::autoencoder::EventEmbeddings;
use crate::events::{EventSet, IncidentMatrices};
use crate::hin::{Hin, NodeId, TypeId};

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("cosine similarity undefined for a zero-norm vector")]
    ZeroNorm,
    #[error("vectors have different lengths ({0} vs {1})")]
    Length(usize, usize),
    #[error("event embeddings have {got} rows but there are {expected} events")]
    RowCount { expected: usize, got: usize },
    #[error("embedding file line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("object {0} has no row in the embedding file")]
    Missing(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectEmbeddings {
    dim: usize,
    /// `Y^t`, one `|V^t| × d` matrix per type.
    per_type: Vec<Array2<f64>>,
    /// Per type, sorted local rows of zero-degree objects.
    excluded: Vec<Vec<usize>>,
}

impl ObjectEmbeddings {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn type_count(&self) -> usize {
        self.per_type.len()
    }

    pub fn matrix(&self, t: usize) -> &Array2<f64> {
        &self.per_type[t]
    }

    pub fn row(&self, t: usize, i: usize) -> ArrayView1<'_, f64> {
        self.per_type[t].row(i)
    }

    pub fn excluded(&self, t: usize) -> &[usize] {
        &self.excluded[t]
    }

    pub fn excluded_count(&self) -> usize {
        self.excluded.iter().map(Vec::len).sum()
    }

    pub fn is_excluded(&self, t: usize, i: usize) -> bool {
        self.excluded[t].binary_search(&i).is_ok()
    }

    /// Embedding of `node`, or `None` when it belongs to no event.
    pub fn vector(&self, hin: &Hin, node: NodeId) -> Option<ArrayView1<'_, f64>> {
        let (t, i) = (hin.type_of(node).0, hin.local_index(node));
        (!self.is_excluded(t, i)).then(|| self.row(t, i))
    }

    /// Excluded objects as node ids.
    pub fn excluded_nodes(&self, hin: &Hin) -> Vec<NodeId> {
        self.excluded
            .iter()
            .enumerate()
            .flat_map(|(t, rows)| rows.iter().map(move |&i| hin.nodes_of_type(TypeId(t))[i]))
            .collect()
    }

    /// Dense `|V| × d` feature matrix in node-id order.
    pub fn features(&self, hin: &Hin) -> Array2<f64> {
        let mut out = Array2::zeros((hin.node_count(), self.dim));
        for (n, _) in hin.nodes() {
            out.row_mut(n.0)
                .assign(&self.row(hin.type_of(n).0, hin.local_index(n)));
        }
        out
    }

    pub fn write<W: Write>(&self, hin: &Hin, mut w: W) -> std::io::Result<()> {
        writeln!(w, "#dim\t{}\t{}", self.dim, self.per_type.len())?;
        for (t, tag) in hin.schema().tags().iter().enumerate() {
            writeln!(w, "#type\t{tag}\t{}", self.per_type[t].nrows())?;
        }
        for (t, m) in self.per_type.iter().enumerate() {
            for (i, &n) in hin.nodes_of_type(TypeId(t)).iter().enumerate() {
                let node = hin.node(n);
                write!(w, "{}\t{}\t", node.id, node.type_tag)?;
                write_floats(&mut w, m.row(i))?;
            }
        }
        Ok(())
    }

    /// Reads an embedding file and aligns its rows to `hin`'s objects.
    pub fn read<R: BufRead>(reader: R, hin: &Hin) -> Result<Self, EmbeddingError> {
        let fmt = |line: usize, message: String| EmbeddingError::Format { line, message };
        let mut lines = reader.lines().enumerate();
        let mut next = || -> Result<(usize, String), EmbeddingError> {
            match lines.next() {
                Some((i, l)) => Ok((i + 1, l?)),
                None => Err(fmt(0, "unexpected end of file".to_string())),
            }
        };
        let (ln, header) = next()?;
        let f: Vec<&str> = header.split('\t').collect();
        if f.len() != 3 || f[0] != "#dim" {
            return Err(fmt(
                ln,
                "expected `#dim<TAB>d<TAB>types` header".to_string(),
            ));
        }
        let dim: usize = f[1].parse().map_err(|_| fmt(ln, "bad dim".to_string()))?;
        let types: usize = f[2]
            .parse()
            .map_err(|_| fmt(ln, "bad type count".to_string()))?;
        let mut counts = Vec::with_capacity(types);
        for _ in 0..types {
            let (ln, line) = next()?;
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 3 || f[0] != "#type" {
                return Err(fmt(
                    ln,
                    "expected `#type<TAB>tag<TAB>count` line".to_string(),
                ));
            }
            let count: usize = f[2].parse().map_err(|_| fmt(ln, "bad count".to_string()))?;
            counts.push(count);
        }
        let mut rows: std::collections::HashMap<(String, String), Vec<f64>> = Default::default();
        for _ in 0..counts.iter().sum::<usize>() {
            let (ln, line) = next()?;
            let f: Vec<&str> = line.splitn(3, '\t').collect();
            if f.len() != 3 {
                return Err(fmt(ln, "expected `id<TAB>type<TAB>values`".to_string()));
            }
            let values: Vec<f64> = f[2]
                .split(' ')
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| fmt(ln, "bad float".to_string()))?;
            if values.len() != dim {
                return Err(fmt(
                    ln,
                    format!("expected {dim} values, got {}", values.len()),
                ));
            }
            rows.insert((f[1].to_string(), f[0].to_string()), values);
        }
        let mut per_type = Vec::with_capacity(hin.schema().len());
        let mut excluded = Vec::with_capacity(hin.schema().len());
        for (t, tag) in hin.schema().tags().iter().enumerate() {
            let nodes = hin.nodes_of_type(TypeId(t));
            let mut m = Array2::zeros((nodes.len(), dim));
            let mut ex = Vec::new();
            for (i, &n) in nodes.iter().enumerate() {
                let key = (tag.clone(), hin.node(n).id.clone());
                let values = rows
                    .get(&key)
                    .ok_or_else(|| EmbeddingError::Missing(hin.node(n).to_string()))?;
                if values.iter().all(|&v| v == 0.0) {
                    ex.push(i);
                }
                m.row_mut(i).assign(&ArrayView1::from(values.as_slice()));
            }
            per_type.push(m);
            excluded.push(ex);
        }
        Ok(ObjectEmbeddings {
            dim,
            per_type,
            excluded,
        })
    }
}

fn write_floats<W: Write>(w: &mut W, values: ArrayView1<f64>) -> std::io::Result<()> {
    for (k, v) in values.iter().enumerate() {
        if k > 0 {
            w.write_all(b" ")?;
        }
        write!(w, "{v:.16e}")?;
    }
    writeln!(w)
}

/// `Y^t = (D_v^t)^{-1} H^t Z` for every type, with the inverse degree taken
/// as zero on rows of zero-degree objects.
pub fn object_embeddings(
    z: &EventEmbeddings,
    matrices: &IncidentMatrices,
) -> Result<ObjectEmbeddings, EmbeddingError> {
    if z.len() != matrices.event_count() {
        return Err(EmbeddingError::RowCount {
            expected: matrices.event_count(),
            got: z.len(),
        });
    }
    let dim = z.dim();
    let mut per_type = Vec::with_capacity(matrices.type_count());
    let mut excluded = Vec::with_capacity(matrices.type_count());
    for (t, h) in matrices.matrices().iter().enumerate() {
        let mut y = Array2::<f64>::zeros((h.rows(), dim));
        for i in 0..h.rows() {
            let mut row = y.row_mut(i);
            for &j in h.row(i) {
                row += &z.z.row(j);
            }
        }
        for (mut row, &deg) in y.rows_mut().into_iter().zip(matrices.degrees(t)) {
            let inv = if deg == 0 { 0.0 } else { 1.0 / deg as f64 };
            row *= inv;
        }
        per_type.push(y);
        excluded.push(matrices.zero_degree_rows(t));
    }
    Ok(ObjectEmbeddings {
        dim,
        per_type,
        excluded,
    })
}

pub fn cosine(u: ArrayView1<f64>, v: ArrayView1<f64>) -> Result<f64, EmbeddingError> {
    if u.len() != v.len() {
        return Err(EmbeddingError::Length(u.len(), v.len()));
    }
    // Rescaling by the largest magnitude keeps tiny vectors from underflowing.
    let max_abs = |x: &ArrayView1<f64>| x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (su, sv) = (max_abs(&u), max_abs(&v));
    if !(su > 0.0 && sv > 0.0) || !su.is_finite() || !sv.is_finite() {
        return Err(EmbeddingError::ZeroNorm);
    }
    let u = u.mapv(|x| x / su);
    let v = v.mapv(|x| x / sv);
    let (nu, nv) = (u.dot(&u).sqrt(), v.dot(&v).sqrt());
    Ok((u.dot(&v) / (nu * nv)).clamp(-1.0, 1.0))
}

/// Event embeddings as text: `#dim<TAB>d<TAB>events` then one
/// `event_id<TAB>identifier<TAB>values` row per event.
pub fn write_event_embeddings<W: Write>(
    hin: &Hin,
    events: &EventSet,
    z: &EventEmbeddings,
    mut w: W,
) -> std::io::Result<()> {
    writeln!(w, "#dim\t{}\t{}", z.dim(), z.len())?;
    for (j, e) in events.events().iter().enumerate() {
        write!(w, "{j}\t{}\t", hin.node(e.identifier))?;
        write_floats(&mut w, z.z.row(j))?;
    }
    Ok(())
}
