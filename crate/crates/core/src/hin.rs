//! Typed multigraph model and edge-list ingestion.
//!
//! Edge-list format: UTF-8 text, one link per line,
//! `src_id<TAB>src_type<TAB>dst_id<TAB>dst_type[<TAB>ignored...]`.
//! Lines whose first character is `#` and blank lines are skipped.
//! Schema format: one type tag per line, same comment rules.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{BufRead, Write};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HinError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: type tag `{tag}` is not declared in the schema")]
    UndeclaredType { line: usize, tag: String },
    #[error("invalid schema: {0}")]
    Schema(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Index of an object type within a [`Schema`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeId(pub usize);

/// Dense index of an object within a [`Hin`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

/// The declared set of object types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    tags: Vec<String>,
    index: HashMap<String, TypeId>,
}

impl Schema {
    pub fn new<I, S>(tags: I) -> Result<Self, HinError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut schema = Schema {
            tags: Vec::new(),
            index: HashMap::new(),
        };
        for tag in tags {
            let tag = tag.into();
            if tag.is_empty() || tag.contains(['\t', ':', '\n', '\r']) {
                return Err(HinError::Schema(format!("illegal type tag {tag:?}")));
            }
            if schema.index.contains_key(&tag) {
                return Err(HinError::Schema(format!("duplicate type tag `{tag}`")));
            }
            schema.index.insert(tag.clone(), TypeId(schema.tags.len()));
            schema.tags.push(tag);
        }
        Ok(schema)
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Self, HinError> {
        let mut tags = Vec::new();
        for line in reader.lines() {
            let line = line?;
            let tag = line.trim();
            if tag.is_empty() || tag.starts_with('#') {
                continue;
            }
            tags.push(tag.to_string());
        }
        Schema::new(tags)
    }

    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for tag in &self.tags {
            writeln!(w, "{tag}")?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn tags(&self) -> &[String] {
        &self.tags
    }

    pub fn tag(&self, t: TypeId) -> &str {
        &self.tags[t.0]
    }

    pub fn type_id(&self, tag: &str) -> Option<TypeId> {
        self.index.get(tag).copied()
    }
}

/// An object: opaque id plus its type tag. Identity is the pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeRef {
    pub id: String,
    pub type_tag: String,
}

impl NodeRef {
    pub fn new(id: impl Into<String>, type_tag: impl Into<String>) -> Self {
        NodeRef {
            id: id.into(),
            type_tag: type_tag.into(),
        }
    }
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.type_tag, self.id)
    }
}

/// Unordered pair of object types; the link type of a link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkType(pub TypeId, pub TypeId);

impl LinkType {
    pub fn new(a: TypeId, b: TypeId) -> Self {
        if a <= b {
            LinkType(a, b)
        } else {
            LinkType(b, a)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Link {
    pub a: NodeId,
    pub b: NodeId,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Drop repeated (unordered) endpoint pairs, keeping the first occurrence.
    pub dedup: bool,
}

/// A heterogeneous information network. Immutable once built.
///
/// Node ids are assigned in first-appearance order; each type keeps its own
/// local row order, also in first-appearance order.
#[derive(Debug, Clone)]
pub struct Hin {
    schema: Schema,
    nodes: Vec<NodeRef>,
    node_type: Vec<TypeId>,
    local: Vec<usize>,
    by_type: Vec<Vec<NodeId>>,
    lookup: HashMap<(TypeId, String), NodeId>,
    links: Vec<Link>,
}

impl Hin {
    pub fn empty(schema: Schema) -> Self {
        let by_type = vec![Vec::new(); schema.len()];
        Hin {
            schema,
            nodes: Vec::new(),
            node_type: Vec::new(),
            local: Vec::new(),
            by_type,
            lookup: HashMap::new(),
            links: Vec::new(),
        }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn node(&self, n: NodeId) -> &NodeRef {
        &self.nodes[n.0]
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &NodeRef)> {
        self.nodes.iter().enumerate().map(|(i, n)| (NodeId(i), n))
    }

    pub fn type_of(&self, n: NodeId) -> TypeId {
        self.node_type[n.0]
    }

    /// Row of `n` within its type.
    pub fn local_index(&self, n: NodeId) -> usize {
        self.local[n.0]
    }

    pub fn nodes_of_type(&self, t: TypeId) -> &[NodeId] {
        &self.by_type[t.0]
    }

    pub fn find(&self, id: &str, type_tag: &str) -> Option<NodeId> {
        let t = self.schema.type_id(type_tag)?;
        self.lookup.get(&(t, id.to_string())).copied()
    }

    pub fn link_type(&self, link: &Link) -> LinkType {
        LinkType::new(self.type_of(link.a), self.type_of(link.b))
    }

    /// Link types that actually occur (T_E).
    pub fn link_types(&self) -> BTreeSet<LinkType> {
        self.links.iter().map(|l| self.link_type(l)).collect()
    }

    /// `|T_V| + |T_E| > 2`.
    pub fn is_heterogeneous(&self) -> bool {
        self.schema.len() + self.link_types().len() > 2
    }

    /// Per-type object counts, including zero for declared-but-unused types.
    pub fn node_counts(&self) -> BTreeMap<String, usize> {
        self.schema
            .tags()
            .iter()
            .zip(&self.by_type)
            .map(|(tag, nodes)| (tag.clone(), nodes.len()))
            .collect()
    }

    /// Same node table, different link multiset. Used for train/test splits.
    pub fn with_links(&self, links: Vec<Link>) -> Hin {
        debug_assert!(links
            .iter()
            .all(|l| l.a.0 < self.nodes.len() && l.b.0 < self.nodes.len()));
        Hin {
            links,
            ..self.clone()
        }
    }

    pub fn write_edge_list<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for link in &self.links {
            let (a, b) = (self.node(link.a), self.node(link.b));
            writeln!(w, "{}\t{}\t{}\t{}", a.id, a.type_tag, b.id, b.type_tag)?;
        }
        Ok(())
    }

    fn intern(&mut self, t: TypeId, id: &str) -> NodeId {
        if let Some(&n) = self.lookup.get(&(t, id.to_string())) {
            return n;
        }
        let n = NodeId(self.nodes.len());
        self.nodes.push(NodeRef::new(id, self.schema.tag(t)));
        self.node_type.push(t);
        self.local.push(self.by_type[t.0].len());
        self.by_type[t.0].push(n);
        self.lookup.insert((t, id.to_string()), n);
        n
    }
}

/// Incremental construction of a [`Hin`], mainly for generators and tests.
#[derive(Debug)]
pub struct HinBuilder {
    hin: Hin,
    seen: Option<BTreeSet<(NodeId, NodeId)>>,
}

impl HinBuilder {
    pub fn new(schema: Schema) -> Self {
        HinBuilder {
            hin: Hin::empty(schema),
            seen: None,
        }
    }

    pub fn dedup(mut self, on: bool) -> Self {
        self.seen = on.then(BTreeSet::new);
        self
    }

    /// Declares an object without linking it.
    pub fn add_node(&mut self, id: &str, type_tag: &str) -> Result<NodeId, HinError> {
        let t = self
            .hin
            .schema
            .type_id(type_tag)
            .ok_or_else(|| HinError::UndeclaredType {
                line: 0,
                tag: type_tag.to_string(),
            })?;
        Ok(self.hin.intern(t, id))
    }

    pub fn add_link(
        &mut self,
        (src_id, src_type): (&str, &str),
        (dst_id, dst_type): (&str, &str),
    ) -> Result<(), HinError> {
        let a = self.add_node(src_id, src_type)?;
        let b = self.add_node(dst_id, dst_type)?;
        self.push(a, b);
        Ok(())
    }

    fn push(&mut self, a: NodeId, b: NodeId) {
        if let Some(seen) = &mut self.seen {
            let key = if a <= b { (a, b) } else { (b, a) };
            if !seen.insert(key) {
                return;
            }
        }
        self.hin.links.push(Link { a, b });
    }

    pub fn build(self) -> Hin {
        self.hin
    }
}

pub fn load_edge_list<R: BufRead>(
    reader: R,
    schema: &Schema,
    options: LoadOptions,
) -> Result<Hin, HinError> {
    let mut builder = HinBuilder::new(schema.clone()).dedup(options.dedup);
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 4 {
            return Err(HinError::Parse {
                line: lineno,
                message: format!("expected 4 tab-separated fields, found {}", fields.len()),
            });
        }
        if fields[..4].iter().any(|f| f.is_empty()) {
            return Err(HinError::Parse {
                line: lineno,
                message: "empty field".to_string(),
            });
        }
        let resolve = |tag: &str| {
            schema.type_id(tag).ok_or_else(|| HinError::UndeclaredType {
                line: lineno,
                tag: tag.to_string(),
            })
        };
        let ta = resolve(fields[1])?;
        let tb = resolve(fields[3])?;
        let a = builder.hin.intern(ta, fields[0]);
        let b = builder.hin.intern(tb, fields[2]);
        builder.push(a, b);
    }
    Ok(builder.build())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn biblio_schema() -> Schema {
        Schema::new(["author", "paper", "venue"]).unwrap()
    }

    fn load(text: &str, schema: &Schema) -> Result<Hin, HinError> {
        load_edge_list(text.as_bytes(), schema, LoadOptions::default())
    }

    #[test]
    fn bibliographic_network() {
        let text = "a1\tauthor\tp1\tpaper\na2\tauthor\tp1\tpaper\np1\tpaper\tc1\tvenue\n";
        let hin = load(text, &biblio_schema()).unwrap();
        assert_eq!(hin.node_count(), 4);
        assert_eq!(hin.link_count(), 3);
        assert_eq!(hin.schema().len(), 3);
        assert!(hin.is_heterogeneous());
        let counts = hin.node_counts();
        assert_eq!(counts["author"], 2);
        assert_eq!(counts["paper"], 1);
        assert_eq!(counts["venue"], 1);
    }

    #[test]
    fn empty_input() {
        let schema = Schema::new(["author", "paper"]).unwrap();
        let hin = load("", &schema).unwrap();
        assert_eq!(hin.node_count(), 0);
        assert_eq!(hin.link_count(), 0);
        let counts = hin.node_counts();
        assert_eq!(counts.len(), 2);
        assert_eq!(counts["author"], 0);
        assert_eq!(counts["paper"], 0);
    }

    #[test]
    fn duplicate_lines_are_kept() {
        let text = "a1\tauthor\tp1\tpaper\na1\tauthor\tp1\tpaper\n";
        let hin = load(text, &biblio_schema()).unwrap();
        assert_eq!(hin.link_count(), 2);
        assert_eq!(hin.node_count(), 2);

        let deduped = load_edge_list(
            text.as_bytes(),
            &biblio_schema(),
            LoadOptions { dedup: true },
        )
        .unwrap();
        assert_eq!(deduped.link_count(), 1);
    }

    #[test]
    fn comments_and_extra_fields() {
        let text = "# header\n\na1\tauthor\tp1\tpaper\t2019\n";
        let hin = load(text, &biblio_schema()).unwrap();
        assert_eq!(hin.link_count(), 1);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let text = "a1\tauthor\tp1\tpaper\na2 author p1 paper\n";
        match load(text, &biblio_schema()) {
            Err(HinError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn undeclared_type_is_named() {
        let text = "a1\tauthor\tt1\tterm\n";
        match load(text, &biblio_schema()) {
            Err(HinError::UndeclaredType { tag, line }) => {
                assert_eq!(tag, "term");
                assert_eq!(line, 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn same_id_different_types_are_distinct() {
        let schema = Schema::new(["paper", "term"]).unwrap();
        let hin = load("x\tpaper\tx\tterm\n", &schema).unwrap();
        assert_eq!(hin.node_count(), 2);
        assert_ne!(hin.find("x", "paper"), hin.find("x", "term"));
    }

    #[test]
    fn ids_are_case_sensitive() {
        let hin = load(
            "A1\tauthor\tp1\tpaper\na1\tauthor\tp1\tpaper\n",
            &biblio_schema(),
        )
        .unwrap();
        assert_eq!(hin.node_counts()["author"], 2);
    }

    #[test]
    fn homogeneous_flag() {
        let schema = Schema::new(["user"]).unwrap();
        let hin = load("u1\tuser\tu2\tuser\n", &schema).unwrap();
        assert!(!hin.is_heterogeneous());
    }

    #[test]
    fn schema_rejects_duplicates_and_bad_tags() {
        assert!(Schema::new(["a", "a"]).is_err());
        assert!(Schema::new(["a:b"]).is_err());
        let s = Schema::read("# types\nauthor\n\npaper\n".as_bytes()).unwrap();
        assert_eq!(s.tags(), &["author".to_string(), "paper".to_string()]);
    }

    #[test]
    fn local_indices_follow_first_appearance() {
        let text = "a2\tauthor\tp1\tpaper\na1\tauthor\tp1\tpaper\n";
        let hin = load(text, &biblio_schema()).unwrap();
        let a2 = hin.find("a2", "author").unwrap();
        let a1 = hin.find("a1", "author").unwrap();
        assert_eq!(hin.local_index(a2), 0);
        assert_eq!(hin.local_index(a1), 1);
    }
}
