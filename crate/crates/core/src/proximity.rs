//! Brute-force event-driven proximities between two objects.
//!
//! First-order proximity is the Jaccard ratio of the objects' event sets.
//! Second-order proximity averages the cosine similarity of every ordered
//! pair of distinct events `(e, k)` with `e` from the first object's events
//! and `k` from the second's, normalised by the size of the union. Events are
//! compared as binary membership vectors over all objects.

use std::io::Write;

use thiserror::Error;

use crate::events::{Event, EventId, EventSet};
use crate::hin::{Hin, NodeId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProximityError {
    #[error("proximity undefined: neither object belongs to any event")]
    Undefined,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProximityPair {
    pub efp: f64,
    pub esp: f64,
}

fn sorted_intersection_len<T: Ord>(a: &[T], b: &[T]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

fn union_len(a: &[EventId], b: &[EventId]) -> Result<usize, ProximityError> {
    let union = a.len() + b.len() - sorted_intersection_len(a, b);
    if union == 0 {
        Err(ProximityError::Undefined)
    } else {
        Ok(union)
    }
}

pub fn efp(i: NodeId, j: NodeId, events: &EventSet) -> Result<f64, ProximityError> {
    let (oi, oj) = (events.events_of(i), events.events_of(j));
    let union = union_len(oi, oj)?;
    Ok(sorted_intersection_len(oi, oj) as f64 / union as f64)
}

/// Cosine of two events' binary membership vectors: `|e∩k| / sqrt(|e|·|k|)`.
pub fn event_cosine(e: &Event, k: &Event) -> f64 {
    let shared = sorted_intersection_len(&e.members, &k.members) as f64;
    shared / ((e.members.len() * k.members.len()) as f64).sqrt()
}

pub fn esp(i: NodeId, j: NodeId, events: &EventSet) -> Result<f64, ProximityError> {
    let (oi, oj) = (events.events_of(i), events.events_of(j));
    let union = union_len(oi, oj)?;
    let mut total = 0.0;
    for &e in oi {
        for &k in oj {
            if e != k {
                total += event_cosine(events.event(e), events.event(k));
            }
        }
    }
    Ok(total / union as f64)
}

pub fn proximity(i: NodeId, j: NodeId, events: &EventSet) -> Result<ProximityPair, ProximityError> {
    Ok(ProximityPair {
        efp: efp(i, j, events)?,
        esp: esp(i, j, events)?,
    })
}

/// Tab-separated table `id_i type_i id_j type_j efp esp`; undefined pairs
/// are written with `NA` in both value columns.
pub fn write_proximity_table<W: Write>(
    hin: &Hin,
    events: &EventSet,
    pairs: &[(NodeId, NodeId)],
    mut w: W,
) -> std::io::Result<()> {
    writeln!(w, "id_i\ttype_i\tid_j\ttype_j\tefp\tesp")?;
    for &(i, j) in pairs {
        let (a, b) = (hin.node(i), hin.node(j));
        write!(w, "{}\t{}\t{}\t{}\t", a.id, a.type_tag, b.id, b.type_tag)?;
        match proximity(i, j, events) {
            Ok(p) => writeln!(w, "{}\t{}", p.efp, p.esp)?,
            Err(_) => writeln!(w, "NA\tNA")?,
        }
    }
    Ok(())
}
