//! Two-colored embedded chord diagrams: the combinatorial residue of a web.
//!
//! A diagram keeps the `4n` labeled boundary slots, the inner nodes with
//! their counterclockwise cyclic edge orders, and the colored edges; all
//! metric data is forgotten. Validation enforces the structural rules
//! (slot coverage, color and valency constraints, per-color acyclicity)
//! and embeddability in the disc with the given boundary order, via face
//! tracing and the Euler characteristic.
//!
//! [`CanonicalCode`] gives a renumbering-invariant string form: two
//! diagrams describe the same embedded picture over the same labeled
//! boundary exactly when their codes coincide.

use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use thiserror::Error;

use crate::webtrace::{slot_color, CurveEnd, Web};
pub use crate::webtrace::{Color, NodeKind};

#[derive(Debug, Error)]
pub enum DiagramError {
    #[error("invalid diagram: {0}")]
    Invalid(String),
    #[error("not embeddable in the disc: {0}")]
    NotPlanar(String),
    #[error("interchange format: {0}")]
    Format(String),
}

/// One end of a diagram edge: a boundary slot, or a position in a node's
/// cyclic order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EndRef {
    Leaf(usize),
    NodeSlot { node: usize, slot: usize },
}

/// An inner node: its kind and the counterclockwise list of incident edge
/// ends, one `(edge id, end index)` pair per slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramNode {
    pub kind: NodeKind,
    pub cyclic: Vec<(usize, u8)>,
}

/// A colored edge between two attachment points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramEdge {
    pub color: Color,
    pub ends: [EndRef; 2],
}

/// A validated two-colored embedded chord diagram on `4n` boundary slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChordDiagram {
    n: usize,
    nodes: Vec<DiagramNode>,
    edges: Vec<DiagramEdge>,
    source: Option<String>,
}

impl ChordDiagram {
    /// Builds and fully validates a diagram.
    pub fn new(
        n: usize,
        nodes: Vec<DiagramNode>,
        edges: Vec<DiagramEdge>,
    ) -> Result<Self, DiagramError> {
        let d = ChordDiagram {
            n,
            nodes,
            edges,
            source: None,
        };
        d.validate()?;
        Ok(d)
    }

    /// Attaches a provenance string carried through serialization.
    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = Some(source.into());
        self
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn leaf_count(&self) -> usize {
        4 * self.n
    }

    pub fn nodes(&self) -> &[DiagramNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[DiagramEdge] {
        &self.edges
    }

    pub fn source(&self) -> Option<&str> {
        self.source.as_deref()
    }

    /// The `(edge, end)` attached at boundary slot `k`.
    pub fn edge_at_leaf(&self, k: usize) -> Option<(usize, u8)> {
        for (ei, edge) in self.edges.iter().enumerate() {
            for (side, end) in edge.ends.iter().enumerate() {
                if *end == EndRef::Leaf(k) {
                    return Some((ei, side as u8));
                }
            }
        }
        None
    }

    /// A diagram is generic when every inner node is a root crossing: no
    /// critical point lies on either zero set.
    pub fn is_generic(&self) -> bool {
        self.nodes.iter().all(|nd| nd.kind == NodeKind::Root)
    }

    /// Structural and embeddability validation.
    fn validate(&self) -> Result<(), DiagramError> {
        let n = self.n;
        if n == 0 || n > 10_000 {
            return Err(DiagramError::Invalid(format!("degree {n} out of range")));
        }

        // index sanity and back-pointer consistency
        for (ei, edge) in self.edges.iter().enumerate() {
            for (side, end) in edge.ends.iter().enumerate() {
                match *end {
                    EndRef::Leaf(k) => {
                        if k >= 4 * n {
                            return Err(DiagramError::Invalid(format!(
                                "edge {ei} references slot {k} beyond 4n"
                            )));
                        }
                        if slot_color(k) != edge.color {
                            return Err(DiagramError::Invalid(format!(
                                "edge {ei} color disagrees with boundary slot {k}"
                            )));
                        }
                    }
                    EndRef::NodeSlot { node, slot } => {
                        let nd = self.nodes.get(node).ok_or_else(|| {
                            DiagramError::Invalid(format!("edge {ei} references missing node {node}"))
                        })?;
                        match nd.cyclic.get(slot) {
                            Some(&(e2, s2)) if e2 == ei && s2 as usize == side => {}
                            _ => {
                                return Err(DiagramError::Invalid(format!(
                                    "node {node} slot {slot} does not point back to edge {ei}"
                                )))
                            }
                        }
                    }
                }
            }
            if edge.ends[0] == edge.ends[1] {
                return Err(DiagramError::Invalid(format!("edge {ei} has equal ends")));
            }
        }
        for (ni, nd) in self.nodes.iter().enumerate() {
            for (slot, &(e, side)) in nd.cyclic.iter().enumerate() {
                let edge = self.edges.get(e).ok_or_else(|| {
                    DiagramError::Invalid(format!("node {ni} references missing edge {e}"))
                })?;
                if side > 1 {
                    return Err(DiagramError::Invalid(format!(
                        "node {ni} slot {slot} has end index {side}"
                    )));
                }
                if edge.ends[side as usize] != (EndRef::NodeSlot { node: ni, slot }) {
                    return Err(DiagramError::Invalid(format!(
                        "edge {e} end {side} does not point back to node {ni} slot {slot}"
                    )));
                }
            }
        }

        // every boundary slot attached exactly once
        let mut leaf_seen = vec![0usize; 4 * n];
        for edge in &self.edges {
            for end in &edge.ends {
                if let EndRef::Leaf(k) = *end {
                    leaf_seen[k] += 1;
                }
            }
        }
        if let Some(k) = leaf_seen.iter().position(|&c| c != 1) {
            return Err(DiagramError::Invalid(format!(
                "boundary slot {k} attached {} times",
                leaf_seen[k]
            )));
        }

        // node valency, color rules
        for (ni, nd) in self.nodes.iter().enumerate() {
            let v = nd.cyclic.len();
            let colors: Vec<Color> = nd
                .cyclic
                .iter()
                .map(|&(e, _)| self.edges[e].color)
                .collect();
            match nd.kind {
                NodeKind::Root => {
                    if v != 4 {
                        return Err(DiagramError::Invalid(format!(
                            "root node {ni} has valency {v}, expected 4"
                        )));
                    }
                    for i in 0..4 {
                        if colors[i] == colors[(i + 1) % 4] {
                            return Err(DiagramError::Invalid(format!(
                                "root node {ni} colors do not alternate"
                            )));
                        }
                    }
                }
                NodeKind::Critical => {
                    if v < 4 || v % 2 != 0 {
                        return Err(DiagramError::Invalid(format!(
                            "critical node {ni} has valency {v}"
                        )));
                    }
                    if colors.windows(2).any(|w| w[0] != w[1]) {
                        return Err(DiagramError::Invalid(format!(
                            "critical node {ni} has mixed edge colors"
                        )));
                    }
                }
            }
        }

        // per-color acyclicity (also rejects self-loop edges)
        for color in [Color::Re, Color::Im] {
            let offset = 4 * n;
            let mut uf = crate::util::UnionFind::new(offset + self.nodes.len());
            let vid = |end: EndRef| match end {
                EndRef::Leaf(k) => k,
                EndRef::NodeSlot { node, .. } => offset + node,
            };
            for (ei, edge) in self.edges.iter().enumerate() {
                if edge.color != color {
                    continue;
                }
                let (a, b) = (vid(edge.ends[0]), vid(edge.ends[1]));
                if uf.find(a) == uf.find(b) {
                    return Err(DiagramError::Invalid(format!(
                        "edge {ei} closes a cycle in its color family"
                    )));
                }
                uf.union(a, b);
            }
        }

        self.check_embeddable()
    }

    /// Face tracing over the rotation system, with the boundary circle added
    /// as `4n` arcs. The data embeds in the disc with the prescribed
    /// boundary order iff the traced map is connected and spherical:
    /// `V - E + F = 2`.
    fn check_embeddable(&self) -> Result<(), DiagramError> {
        let n4 = 4 * self.n;
        let chord_count = self.edges.len();
        let arc_base = chord_count; // arcs get edge ids after the chords
        let total_edges = chord_count + n4;
        let dart = |edge: usize, side: usize| 2 * edge + side;

        // counterclockwise rotation at each vertex (leaves then nodes)
        let vertex_count = n4 + self.nodes.len();
        let mut rotation: Vec<Vec<usize>> = vec![Vec::new(); vertex_count];
        for k in 0..n4 {
            let (e, side) = self
                .edge_at_leaf(k)
                .ok_or_else(|| DiagramError::Invalid(format!("slot {k} unattached")))?;
            // at a boundary point, counterclockwise order is: arc toward the
            // next slot, the chord (inward), arc toward the previous slot
            rotation[k] = vec![
                dart(arc_base + k, 0),
                dart(e, side as usize),
                dart(arc_base + (k + n4 - 1) % n4, 1),
            ];
        }
        for (ni, nd) in self.nodes.iter().enumerate() {
            rotation[n4 + ni] = nd
                .cyclic
                .iter()
                .map(|&(e, side)| dart(e, side as usize))
                .collect();
        }

        // vertex of each dart, and the successor within its rotation
        let dart_count = 2 * total_edges;
        let mut next_at_vertex = vec![usize::MAX; dart_count];
        let mut seen = vec![false; dart_count];
        for rot in &rotation {
            for (i, &d) in rot.iter().enumerate() {
                if seen[d] {
                    return Err(DiagramError::Invalid(
                        "edge end appears in two rotations".into(),
                    ));
                }
                seen[d] = true;
                next_at_vertex[d] = rot[(i + 1) % rot.len()];
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(DiagramError::Invalid(
                "edge end missing from every rotation".into(),
            ));
        }

        // faces: orbits of d -> next_at_vertex(reverse(d))
        let mut visited = vec![false; dart_count];
        let mut faces = 0usize;
        for d0 in 0..dart_count {
            if visited[d0] {
                continue;
            }
            faces += 1;
            let mut d = d0;
            loop {
                visited[d] = true;
                d = next_at_vertex[d ^ 1];
                if d == d0 {
                    break;
                }
            }
        }

        let euler = vertex_count as i64 - total_edges as i64 + faces as i64;
        if euler != 2 {
            return Err(DiagramError::NotPlanar(format!(
                "Euler characteristic {euler} with {vertex_count} vertices, {total_edges} edges, {faces} faces"
            )));
        }
        Ok(())
    }

    /// Components of the one-color subgraph, with roots smoothed away:
    /// each component lists its boundary slots in increasing order and the
    /// critical nodes of that color it contains.
    pub fn color_components(&self, color: Color) -> Vec<ColorComponent> {
        let offset = 4 * self.n;
        let mut uf = crate::util::UnionFind::new(offset + self.nodes.len());
        let vid = |end: EndRef| match end {
            EndRef::Leaf(k) => k,
            EndRef::NodeSlot { node, .. } => offset + node,
        };
        for edge in self.edges.iter().filter(|e| e.color == color) {
            uf.union(vid(edge.ends[0]), vid(edge.ends[1]));
        }
        let mut comps: std::collections::BTreeMap<usize, ColorComponent> = Default::default();
        for k in (0..offset).filter(|&k| slot_color(k) == color) {
            let root = uf.find(k);
            comps.entry(root).or_default().leaves.push(k);
        }
        for (ni, nd) in self.nodes.iter().enumerate() {
            if nd.kind == NodeKind::Critical
                && self.edges[nd.cyclic[0].0].color == color
            {
                let root = uf.find(offset + ni);
                comps.entry(root).or_default().criticals.push(ni);
            }
        }
        comps.into_values().collect()
    }

    /// For a diagram whose `color` family has no critical nodes, the perfect
    /// matching its chords induce on the `2n` boundary slots of that color.
    pub fn color_matching(&self, color: Color) -> Result<Vec<(usize, usize)>, DiagramError> {
        let mut pairs = Vec::new();
        for comp in self.color_components(color) {
            if !comp.criticals.is_empty() {
                return Err(DiagramError::Invalid(format!(
                    "{} family has a critical node",
                    match color {
                        Color::Re => "RE",
                        Color::Im => "IM",
                    }
                )));
            }
            if comp.leaves.len() != 2 {
                return Err(DiagramError::Invalid(format!(
                    "color component with {} boundary slots",
                    comp.leaves.len()
                )));
            }
            pairs.push((comp.leaves[0], comp.leaves[1]));
        }
        pairs.sort();
        Ok(pairs)
    }

    /// Renumbering-invariant code: node and edge identities are replaced by
    /// discovery order of a traversal seeded at the labeled boundary slots.
    pub fn canonical_form(&self) -> CanonicalCode {
        let mut edge_id = vec![usize::MAX; self.edges.len()];
        let mut node_id = vec![usize::MAX; self.nodes.len()];
        let mut node_entry = vec![usize::MAX; self.nodes.len()];
        let mut edge_order: Vec<usize> = Vec::new();
        let mut node_order: Vec<usize> = Vec::new();
        let mut edge_first_end: Vec<u8> = vec![0; self.edges.len()];

        let mut queue: VecDeque<usize> = VecDeque::new();
        let discover_edge = |e: usize,
                                 from_side: u8,
                                 edge_id: &mut Vec<usize>,
                                 edge_order: &mut Vec<usize>,
                                 edge_first_end: &mut Vec<u8>|
         -> bool {
            if edge_id[e] != usize::MAX {
                return false;
            }
            edge_id[e] = edge_order.len();
            edge_order.push(e);
            edge_first_end[e] = from_side;
            true
        };
        let touch_node = |nd: usize,
                              slot: usize,
                              node_id: &mut Vec<usize>,
                              node_order: &mut Vec<usize>,
                              node_entry: &mut Vec<usize>,
                              queue: &mut VecDeque<usize>| {
            if node_id[nd] == usize::MAX {
                node_id[nd] = node_order.len();
                node_order.push(nd);
                node_entry[nd] = slot;
                queue.push_back(nd);
            }
        };

        for k in 0..4 * self.n {
            let (e, side) = self.edge_at_leaf(k).expect("validated diagram");
            discover_edge(e, side, &mut edge_id, &mut edge_order, &mut edge_first_end);
            let other = self.edges[e].ends[1 - side as usize];
            if let EndRef::NodeSlot { node, slot } = other {
                touch_node(node, slot, &mut node_id, &mut node_order, &mut node_entry, &mut queue);
            }
            while let Some(nd) = queue.pop_front() {
                let valency = self.nodes[nd].cyclic.len();
                let entry = node_entry[nd];
                for i in 0..valency {
                    let slot = (entry + i) % valency;
                    let (e2, s2) = self.nodes[nd].cyclic[slot];
                    discover_edge(e2, s2, &mut edge_id, &mut edge_order, &mut edge_first_end);
                    let other = self.edges[e2].ends[1 - s2 as usize];
                    if let EndRef::NodeSlot { node, slot } = other {
                        touch_node(node, slot, &mut node_id, &mut node_order, &mut node_entry, &mut queue);
                    }
                }
            }
        }

        let render_end = |end: EndRef| -> String {
            match end {
                EndRef::Leaf(k) => format!("L{k}"),
                EndRef::NodeSlot { node, slot } => {
                    let valency = self.nodes[node].cyclic.len();
                    let rel = (slot + valency - node_entry[node]) % valency;
                    format!("N{}.{}", node_id[node], rel)
                }
            }
        };

        let mut parts: Vec<String> = vec![format!("n={}", self.n)];
        for &e in &edge_order {
            let edge = &self.edges[e];
            let first = edge_first_end[e] as usize;
            parts.push(format!(
                "E{}={}:{}-{}",
                edge_id[e],
                match edge.color {
                    Color::Re => "RE",
                    Color::Im => "IM",
                },
                render_end(edge.ends[first]),
                render_end(edge.ends[1 - first]),
            ));
        }
        for &ni in &node_order {
            let nd = &self.nodes[ni];
            let valency = nd.cyclic.len();
            let entry = node_entry[ni];
            let listed: Vec<String> = (0..valency)
                .map(|i| {
                    let (e, _) = nd.cyclic[(entry + i) % valency];
                    format!("E{}", edge_id[e])
                })
                .collect();
            parts.push(format!(
                "N{}={}[{}]",
                node_id[ni],
                match nd.kind {
                    NodeKind::Root => "ROOT",
                    NodeKind::Critical => "CRIT",
                },
                listed.join(",")
            ));
        }
        CanonicalCode(parts.join(";"))
    }
}

/// One component of a single-color subgraph.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ColorComponent {
    pub leaves: Vec<usize>,
    pub criticals: Vec<usize>,
}

/// Canonical string form of a diagram; equality of codes is equality of
/// labeled embedded diagrams.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCode(pub String);

impl std::fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Collapses a traced web to its chord diagram.
pub fn web_to_diagram(web: &Web) -> Result<ChordDiagram, DiagramError> {
    let edges: Vec<DiagramEdge> = web
        .curves
        .iter()
        .map(|c| DiagramEdge {
            color: c.color,
            ends: [map_end(c.ends.0), map_end(c.ends.1)],
        })
        .collect();
    let mut nodes: Vec<DiagramNode> = Vec::new();
    for (ni, wn) in web.nodes.iter().enumerate() {
        let mut cyclic = Vec::with_capacity(wn.slots.len());
        for slot in 0..wn.slots.len() {
            let (e, side) = web.node_slot_attachment(ni, slot).ok_or_else(|| {
                DiagramError::Invalid(format!("web node {ni} slot {slot} unattached"))
            })?;
            cyclic.push((e, side));
        }
        nodes.push(DiagramNode {
            kind: wn.kind,
            cyclic,
        });
    }
    ChordDiagram::new(web.degree, nodes, edges)
}

fn map_end(end: CurveEnd) -> EndRef {
    match end {
        CurveEnd::Leaf(i) => EndRef::Leaf(i),
        CurveEnd::Node { node, slot } => EndRef::NodeSlot { node, slot },
    }
}

// ---------------------------------------------------------------------------
// interchange format
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct JsonLeaf {
    index: usize,
    color: Color,
}

#[derive(Serialize, Deserialize)]
struct JsonCyclicEntry {
    edge: usize,
    end: u8,
}

#[derive(Serialize, Deserialize)]
struct JsonNode {
    id: usize,
    kind: NodeKind,
    cyclic: Vec<JsonCyclicEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum JsonEnd {
    Leaf { leaf: usize },
    Node { node: usize },
}

#[derive(Serialize, Deserialize)]
struct JsonEdge {
    id: usize,
    color: Color,
    ends: Vec<JsonEnd>,
}

#[derive(Serialize, Deserialize)]
struct JsonDiagram {
    n: usize,
    leaves: Vec<JsonLeaf>,
    nodes: Vec<JsonNode>,
    edges: Vec<JsonEdge>,
    #[serde(skip_serializing_if = "Option::is_none")]
    source_polynomial: Option<String>,
}

impl ChordDiagram {
    /// Serializes to the interchange JSON shape, arrays in id order.
    pub fn to_json(&self) -> String {
        let doc = JsonDiagram {
            n: self.n,
            leaves: (0..4 * self.n)
                .map(|k| JsonLeaf {
                    index: k,
                    color: slot_color(k),
                })
                .collect(),
            nodes: self
                .nodes
                .iter()
                .enumerate()
                .map(|(i, nd)| JsonNode {
                    id: i,
                    kind: nd.kind,
                    cyclic: nd
                        .cyclic
                        .iter()
                        .map(|&(edge, end)| JsonCyclicEntry { edge, end })
                        .collect(),
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .enumerate()
                .map(|(i, e)| JsonEdge {
                    id: i,
                    color: e.color,
                    ends: e
                        .ends
                        .iter()
                        .map(|end| match *end {
                            EndRef::Leaf(k) => JsonEnd::Leaf { leaf: k },
                            EndRef::NodeSlot { node, .. } => JsonEnd::Node { node },
                        })
                        .collect(),
                })
                .collect(),
            source_polynomial: self.source.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("serializable")
    }

    /// Parses and validates the interchange JSON shape. Node-side slots are
    /// recovered from the nodes' cyclic lists.
    pub fn from_json(text: &str) -> Result<Self, DiagramError> {
        let doc: JsonDiagram =
            serde_json::from_str(text).map_err(|e| DiagramError::Format(e.to_string()))?;
        if doc.leaves.len() != 4 * doc.n {
            return Err(DiagramError::Format(format!(
                "expected {} leaves, found {}",
                4 * doc.n,
                doc.leaves.len()
            )));
        }
        for (k, leaf) in doc.leaves.iter().enumerate() {
            if leaf.index != k || leaf.color != slot_color(k) {
                return Err(DiagramError::Format(format!("leaf {k} mislabeled")));
            }
        }
        for (i, nd) in doc.nodes.iter().enumerate() {
            if nd.id != i {
                return Err(DiagramError::Format(format!(
                    "node ids must be 0..len in order, found {} at {}",
                    nd.id, i
                )));
            }
        }
        for (i, e) in doc.edges.iter().enumerate() {
            if e.id != i {
                return Err(DiagramError::Format(format!(
                    "edge ids must be 0..len in order, found {} at {}",
                    e.id, i
                )));
            }
            if e.ends.len() != 2 {
                return Err(DiagramError::Format(format!(
                    "edge {i} has {} ends",
                    e.ends.len()
                )));
            }
        }

        let nodes: Vec<DiagramNode> = doc
            .nodes
            .iter()
            .map(|nd| DiagramNode {
                kind: nd.kind,
                cyclic: nd.cyclic.iter().map(|c| (c.edge, c.end)).collect(),
            })
            .collect();
        let mut edges = Vec::with_capacity(doc.edges.len());
        for (ei, e) in doc.edges.iter().enumerate() {
            let mut ends = [EndRef::Leaf(0); 2];
            for (side, end) in e.ends.iter().enumerate() {
                ends[side] = match *end {
                    JsonEnd::Leaf { leaf } => EndRef::Leaf(leaf),
                    JsonEnd::Node { node } => {
                        let nd = nodes.get(node).ok_or_else(|| {
                            DiagramError::Format(format!("edge {ei} references missing node {node}"))
                        })?;
                        let slot = nd
                            .cyclic
                            .iter()
                            .position(|&(e2, s2)| e2 == ei && s2 as usize == side)
                            .ok_or_else(|| {
                                DiagramError::Format(format!(
                                    "node {node} cyclic list lacks edge {ei} end {side}"
                                ))
                            })?;
                        EndRef::NodeSlot { node, slot }
                    }
                };
            }
            edges.push(DiagramEdge {
                color: e.color,
                ends,
            });
        }
        let mut d = ChordDiagram::new(doc.n, nodes, edges)?;
        d.source = doc.source_polynomial;
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::MonicPolynomial;
    use crate::webtrace::{extract_web, sign_grid_oracle, TraceParams};
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn diagram_of(coeffs: &[(f64, f64)]) -> ChordDiagram {
        let p = MonicPolynomial::new(coeffs.iter().map(|&(re, im)| c(re, im)).collect()).unwrap();
        let web = extract_web(&p, &TraceParams::default()).unwrap();
        web_to_diagram(&web).unwrap()
    }

    #[test]
    fn linear_diagram_shape() {
        let d = diagram_of(&[(-0.3, -0.2)]);
        assert_eq!(d.degree(), 1);
        assert_eq!(d.nodes().len(), 1);
        assert_eq!(d.edges().len(), 4);
        assert!(d.is_generic());
        assert_eq!(d.nodes()[0].kind, NodeKind::Root);
    }

    #[test]
    fn wall_diagram_is_not_generic() {
        // z² - 1 has its critical point on the Im zero set.
        let d = diagram_of(&[(-1.0, 0.0), (0.0, 0.0)]);
        assert!(!d.is_generic());
        assert_eq!(d.edges().len(), 10);
        assert_eq!(
            d.nodes().iter().filter(|nd| nd.kind == NodeKind::Critical).count(),
            1
        );
    }

    #[test]
    fn generic_degree_two_matchings() {
        // critical value 0.7 + 0.9i avoids both axes, so both families are
        // plain chords
        let d = diagram_of(&[(0.7, 0.9), (0.0, 0.0)]);
        assert!(d.is_generic());
        let im = d.color_matching(Color::Im).unwrap();
        let re = d.color_matching(Color::Re).unwrap();
        assert_eq!(im.len(), 2);
        assert_eq!(re.len(), 2);
        let all: Vec<usize> = im.iter().chain(re.iter()).flat_map(|&(a, b)| [a, b]).collect();
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn crossing_chords_without_a_node_are_rejected() {
        // Two chords L0-L2 and L1-L3 must cross inside the disc; with no
        // node provided the data is not embeddable.
        let edges = vec![
            DiagramEdge {
                color: Color::Im,
                ends: [EndRef::Leaf(0), EndRef::Leaf(2)],
            },
            DiagramEdge {
                color: Color::Re,
                ends: [EndRef::Leaf(1), EndRef::Leaf(3)],
            },
        ];
        match ChordDiagram::new(1, vec![], edges) {
            Err(DiagramError::NotPlanar(_)) => {}
            other => panic!("expected planarity rejection, got {other:?}"),
        }
    }

    #[test]
    fn unattached_slot_is_rejected() {
        let edges = vec![DiagramEdge {
            color: Color::Im,
            ends: [EndRef::Leaf(0), EndRef::Leaf(2)],
        }];
        match ChordDiagram::new(1, vec![], edges) {
            Err(DiagramError::Invalid(msg)) => assert!(msg.contains("slot 1")),
            other => panic!("expected invalid-structure rejection, got {other:?}"),
        }
    }

    #[test]
    fn canonical_code_is_stable() {
        let d = diagram_of(&[(-1.0, 0.0), (0.0, 0.0)]);
        let a = d.canonical_form();
        let b = d.canonical_form();
        assert_eq!(a, b);
        assert!(a.0.starts_with("n=2;"));
    }

    #[test]
    fn tracer_and_oracle_agree_up_to_canonical_code() {
        let cfg = crate::sampling::SampleConfig::default();
        for seed in 20..24u64 {
            let p = crate::sampling::random_web_polynomial(4, seed, &cfg);
            let traced = extract_web(&p, &TraceParams::default()).unwrap();
            let grid = sign_grid_oracle(&p, 256, &TraceParams::default()).unwrap();
            let da = web_to_diagram(&traced).unwrap();
            let db = web_to_diagram(&grid).unwrap();
            assert_eq!(da.canonical_form(), db.canonical_form(), "seed {seed}");
        }
    }

    /// Rebuilds the diagram with permuted node/edge ids, rotated cyclic
    /// lists, and swapped edge ends; the canonical code must not move.
    fn relabel(
        d: &ChordDiagram,
        node_perm: &[usize],
        edge_perm: &[usize],
        rotations: &[usize],
        swaps: &[bool],
    ) -> ChordDiagram {
        // node_perm[i] = new index of old node i, similarly edge_perm
        let mut new_nodes: Vec<DiagramNode> = vec![
            DiagramNode {
                kind: NodeKind::Root,
                cyclic: vec![]
            };
            d.nodes().len()
        ];
        let mut new_edges: Vec<DiagramEdge> = vec![
            DiagramEdge {
                color: Color::Re,
                ends: [EndRef::Leaf(0), EndRef::Leaf(0)]
            };
            d.edges().len()
        ];
        let map_end = |end: EndRef| -> EndRef {
            match end {
                EndRef::Leaf(k) => EndRef::Leaf(k),
                EndRef::NodeSlot { node, slot } => {
                    let v = d.nodes()[node].cyclic.len();
                    EndRef::NodeSlot {
                        node: node_perm[node],
                        slot: (slot + v - rotations[node] % v) % v,
                    }
                }
            }
        };
        for (i, edge) in d.edges().iter().enumerate() {
            let mut ends = [map_end(edge.ends[0]), map_end(edge.ends[1])];
            if swaps[i] {
                ends.swap(0, 1);
            }
            new_edges[edge_perm[i]] = DiagramEdge {
                color: edge.color,
                ends,
            };
        }
        for (i, nd) in d.nodes().iter().enumerate() {
            let v = nd.cyclic.len();
            let rot = rotations[i] % v;
            let cyclic: Vec<(usize, u8)> = (0..v)
                .map(|s| {
                    let (e, side) = nd.cyclic[(s + rot) % v];
                    let new_side = if swaps[e] { 1 - side } else { side };
                    (edge_perm[e], new_side)
                })
                .collect();
            new_nodes[node_perm[i]] = DiagramNode {
                kind: nd.kind,
                cyclic,
            };
        }
        ChordDiagram::new(d.degree(), new_nodes, new_edges).expect("relabeled diagram valid")
    }

    #[test]
    fn canonical_code_survives_relabeling() {
        use rand::seq::SliceRandom;
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let cfg = crate::sampling::SampleConfig::default();
        for seed in 0..8u64 {
            let p = crate::sampling::random_web_polynomial(3 + (seed as usize % 3), seed + 100, &cfg);
            let web = extract_web(&p, &TraceParams::default()).unwrap();
            let d = web_to_diagram(&web).unwrap();
            let code = d.canonical_form();
            for _ in 0..4 {
                let mut node_perm: Vec<usize> = (0..d.nodes().len()).collect();
                node_perm.shuffle(&mut rng);
                let mut edge_perm: Vec<usize> = (0..d.edges().len()).collect();
                edge_perm.shuffle(&mut rng);
                let rotations: Vec<usize> =
                    d.nodes().iter().map(|_| rng.gen_range(0..4usize)).collect();
                let swaps: Vec<bool> = d.edges().iter().map(|_| rng.gen_bool(0.5)).collect();
                let relabeled = relabel(&d, &node_perm, &edge_perm, &rotations, &swaps);
                assert_eq!(relabeled.canonical_form(), code, "seed {seed}");
            }
        }
    }

    #[test]
    fn json_round_trip_preserves_the_diagram() {
        let d = diagram_of(&[(-1.0, 0.0), (0.0, 0.0)]).with_source("2; -1,0; 0,0");
        let text = d.to_json();
        let back = ChordDiagram::from_json(&text).unwrap();
        assert_eq!(back.canonical_form(), d.canonical_form());
        assert_eq!(back.source(), Some("2; -1,0; 0,0"));
        // field names are part of the contract
        assert!(text.contains("\"n\""));
        assert!(text.contains("\"leaves\""));
        assert!(text.contains("\"cyclic\""));
        assert!(text.contains("\"source_polynomial\""));
        assert!(text.contains("\"ROOT\""));
    }

    #[test]
    fn json_rejects_inconsistent_input() {
        let d = diagram_of(&[(-0.3, -0.2)]);
        let text = d.to_json();
        // break the node kind: a critical node with alternating colors
        let broken = text.replace("\"ROOT\"", "\"CRITICAL\"");
        assert!(ChordDiagram::from_json(&broken).is_err());
    }
}
