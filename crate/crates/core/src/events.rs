//! Merging links into events, and the per-type incident matrices derived
//! from them.

use std::collections::HashMap;
use std::io::Write;

use thiserror::Error;

use crate::hin::{Hin, Link, NodeId, TypeId};

#[derive(Debug, Error)]
pub enum EventError {
    #[error("anchor type `{0}` is not declared in the schema")]
    UnknownAnchor(String),
    #[error("link #{index} ({a} -- {b}) has {found} endpoints of anchor type `{anchor}`, expected exactly 1")]
    RuleViolation {
        index: usize,
        a: String,
        b: String,
        anchor: String,
        found: usize,
    },
}

/// Maps a link to the object that identifies its event.
pub trait EventIdentifier {
    fn identify(&self, hin: &Hin, index: usize, link: &Link) -> Result<NodeId, EventError>;
}

/// Links are merged by their endpoint of a fixed anchor type, e.g. every
/// paper in a bibliographic network identifies one event.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnchorRule {
    pub anchor_type: String,
}

impl AnchorRule {
    pub fn new(anchor_type: impl Into<String>) -> Self {
        AnchorRule {
            anchor_type: anchor_type.into(),
        }
    }

    fn resolve(&self, hin: &Hin) -> Result<TypeId, EventError> {
        hin.schema()
            .type_id(&self.anchor_type)
            .ok_or_else(|| EventError::UnknownAnchor(self.anchor_type.clone()))
    }
}

impl EventIdentifier for AnchorRule {
    fn identify(&self, hin: &Hin, index: usize, link: &Link) -> Result<NodeId, EventError> {
        let anchor = self.resolve(hin)?;
        let (ta, tb) = (hin.type_of(link.a), hin.type_of(link.b));
        match (ta == anchor, tb == anchor) {
            (true, false) => Ok(link.a),
            (false, true) => Ok(link.b),
            (a, b) => Err(EventError::RuleViolation {
                index,
                a: hin.node(link.a).to_string(),
                b: hin.node(link.b).to_string(),
                anchor: self.anchor_type.clone(),
                found: a as usize + b as usize,
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub identifier: NodeId,
    /// Sorted, duplicate-free; always contains `identifier`.
    pub members: Vec<NodeId>,
}

impl Event {
    pub fn contains(&self, n: NodeId) -> bool {
        self.members.binary_search(&n).is_ok()
    }
}

#[derive(Debug, Clone)]
pub struct EventSet {
    events: Vec<Event>,
    per_object: Vec<Vec<EventId>>,
}

impl EventSet {
    /// Builds an event set from explicit events over `node_count` objects.
    pub fn from_events(node_count: usize, mut events: Vec<Event>) -> Self {
        let mut per_object = vec![Vec::new(); node_count];
        for (j, e) in events.iter_mut().enumerate() {
            e.members.sort_unstable();
            e.members.dedup();
            for &m in &e.members {
                per_object[m.0].push(EventId(j));
            }
        }
        EventSet { events, per_object }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn event(&self, e: EventId) -> &Event {
        &self.events[e.0]
    }

    /// Events containing `n`, in ascending id order.
    pub fn events_of(&self, n: NodeId) -> &[EventId] {
        &self.per_object[n.0]
    }

    pub fn node_count(&self) -> usize {
        self.per_object.len()
    }

    /// One line per event: `event_id<TAB>identifier<TAB>member...`, objects
    /// rendered as `type:id`.
    pub fn write_dump<W: Write>(&self, hin: &Hin, mut w: W) -> std::io::Result<()> {
        for (j, e) in self.events.iter().enumerate() {
            write!(w, "{j}\t{}", hin.node(e.identifier))?;
            for &m in &e.members {
                write!(w, "\t{}", hin.node(m))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Events ordered by first appearance of their identifier in the link stream.
pub fn generate_events<R: EventIdentifier + ?Sized>(
    hin: &Hin,
    rule: &R,
) -> Result<EventSet, EventError> {
    let mut slot: HashMap<NodeId, usize> = HashMap::new();
    let mut events: Vec<Event> = Vec::new();
    for (index, link) in hin.links().iter().enumerate() {
        let q = rule.identify(hin, index, link)?;
        let j = *slot.entry(q).or_insert_with(|| {
            events.push(Event {
                identifier: q,
                members: vec![q],
            });
            events.len() - 1
        });
        let members = &mut events[j].members;
        members.push(link.a);
        members.push(link.b);
    }
    Ok(EventSet::from_events(hin.node_count(), events))
}

/// Binary |V^t| × |Ω| matrix stored both column- and row-wise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidentMatrix {
    rows: usize,
    /// Per event, sorted local row indices of member objects of this type.
    columns: Vec<Vec<usize>>,
    /// Per object row, sorted event indices.
    row_events: Vec<Vec<usize>>,
}

impl IncidentMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[usize] {
        &self.columns[j]
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.row_events[i]
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.columns[j].binary_search(&i).is_ok() as u8
    }

    pub fn degree(&self, i: usize) -> usize {
        self.row_events[i].len()
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let mut dense = vec![vec![0u8; self.cols()]; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for &i in col {
                dense[i][j] = 1;
            }
        }
        dense
    }
}

/// Incident matrices {H^t} and degree vectors {D_v^t}, one per object type.
#[derive(Debug, Clone)]
pub struct IncidentMatrices {
    type_tags: Vec<String>,
    matrices: Vec<IncidentMatrix>,
    degrees: Vec<Vec<usize>>,
}

impl IncidentMatrices {
    pub fn type_count(&self) -> usize {
        self.matrices.len()
    }

    pub fn type_tags(&self) -> &[String] {
        &self.type_tags
    }

    pub fn event_count(&self) -> usize {
        self.matrices.first().map_or(0, |m| m.cols())
    }

    pub fn matrix(&self, t: usize) -> &IncidentMatrix {
        &self.matrices[t]
    }

    pub fn matrices(&self) -> &[IncidentMatrix] {
        &self.matrices
    }

    pub fn type_sizes(&self) -> Vec<usize> {
        self.matrices.iter().map(|m| m.rows()).collect()
    }

    /// Diagonal of D_v^t.
    pub fn degrees(&self, t: usize) -> &[usize] {
        &self.degrees[t]
    }

    /// Per-type active rows of event `j`; the sparse form of the event's
    /// incidence columns.
    pub fn event_columns(&self, j: usize) -> Vec<&[usize]> {
        self.matrices.iter().map(|m| m.column(j)).collect()
    }

    /// Objects of type `t` that belong to no event.
    pub fn zero_degree_rows(&self, t: usize) -> Vec<usize> {
        self.degrees[t]
            .iter()
            .enumerate()
            .filter(|(_, &d)| d == 0)
            .map(|(i, _)| i)
            .collect()
    }
}

pub fn build_incident_matrices(events: &EventSet, hin: &Hin) -> IncidentMatrices {
    let type_count = hin.schema().len();
    let mut matrices: Vec<IncidentMatrix> = (0..type_count)
        .map(|t| IncidentMatrix {
            rows: hin.nodes_of_type(TypeId(t)).len(),
            columns: vec![Vec::new(); events.len()],
            row_events: vec![Vec::new(); hin.nodes_of_type(TypeId(t)).len()],
        })
        .collect();
    for (j, e) in events.events().iter().enumerate() {
        for &m in &e.members {
            let t = hin.type_of(m).0;
            let i = hin.local_index(m);
            matrices[t].columns[j].push(i);
            matrices[t].row_events[i].push(j);
        }
    }
    for m in &mut matrices {
        for col in &mut m.columns {
            col.sort_unstable();
        }
    }
    let degrees = matrices
        .iter()
        .map(|m| m.row_events.iter().map(Vec::len).collect())
        .collect();
    IncidentMatrices {
        type_tags: hin.schema().tags().to_vec(),
        matrices,
        degrees,
    }
}
