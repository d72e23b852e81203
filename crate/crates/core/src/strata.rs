//! Generic strata, merge words, and dissipation between strata.
//!
//! A generic diagram is a pair of noncrossing perfect matchings — one per
//! color, on the interleaved boundary slots — whose superposition has
//! exactly `n` root crossings. Walls between strata carry critical nodes;
//! arrival at a wall is encoded by parenthesized words over the curve
//! letters, and [`dissipate`] drives an actual polynomial to such a wall by
//! steering one critical value to zero through its constant coefficient.

use num_complex::Complex64;
use std::collections::BTreeSet;
use thiserror::Error;

use crate::diagram::{
    web_to_diagram, CanonicalCode, ChordDiagram, DiagramEdge, DiagramError, DiagramNode, EndRef,
};
use crate::poly::MonicPolynomial;
use crate::webtrace::{extract_web, Color, NodeKind, TraceParams, WebError};

#[derive(Debug, Error)]
pub enum StrataError {
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("polynomial is not generic: {0}")]
    NotGeneric(String),
    #[error("invalid word operation: {0}")]
    InvalidWord(String),
    #[error("dissipation failed: {0}")]
    Dissipation(String),
    #[error(transparent)]
    Web(#[from] WebError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// The `m`-th Catalan number (`m ≤ 33` fits in u64).
pub fn catalan(m: usize) -> u64 {
    // C_0 = 1, C_{k+1} = sum C_i C_{k-i}
    let mut c = vec![0u64; m + 1];
    c[0] = 1;
    for k in 1..=m {
        for i in 0..k {
            c[k] += c[i] * c[k - 1 - i];
        }
    }
    c[m]
}

/// A noncrossing perfect matching of `2m` cyclically ordered points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoncrossingMatching {
    m: usize,
    pairs: Vec<(usize, usize)>,
}

impl NoncrossingMatching {
    pub fn new(m: usize, mut pairs: Vec<(usize, usize)>) -> Result<Self, StrataError> {
        if pairs.len() != m {
            return Err(StrataError::InvalidWord(format!(
                "expected {m} pairs, found {}",
                pairs.len()
            )));
        }
        for p in pairs.iter_mut() {
            if p.0 > p.1 {
                *p = (p.1, p.0);
            }
        }
        pairs.sort();
        let mut seen = vec![false; 2 * m];
        for &(a, b) in &pairs {
            if b >= 2 * m || a == b || seen[a] || seen[b] {
                return Err(StrataError::InvalidWord(format!(
                    "not a perfect matching at pair ({a}, {b})"
                )));
            }
            seen[a] = true;
            seen[b] = true;
        }
        for i in 0..pairs.len() {
            for j in (i + 1)..pairs.len() {
                let (a, b) = pairs[i];
                let (c, d) = pairs[j];
                // interleaved a < c < b < d means the chords cross
                if a < c && c < b && b < d {
                    return Err(StrataError::InvalidWord(format!(
                        "pairs ({a},{b}) and ({c},{d}) cross"
                    )));
                }
            }
        }
        Ok(NoncrossingMatching { m, pairs })
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}

/// All noncrossing perfect matchings of `2m` points; `|result| = Catalan(m)`.
pub fn noncrossing_matchings(m: usize) -> Result<Vec<NoncrossingMatching>, StrataError> {
    if !(1..=12).contains(&m) {
        return Err(StrataError::OutOfRange(format!(
            "matching size {m} outside 1..=12"
        )));
    }
    fn build(points: &[usize], acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if points.is_empty() {
            out.push(acc.clone());
            return;
        }
        let first = points[0];
        // pair the first point; an odd gap keeps both blocks even
        for j in (1..points.len()).step_by(2) {
            let partner = points[j];
            acc.push((first, partner));
            let inside: Vec<usize> = points[1..j].to_vec();
            let outside: Vec<usize> = points[j + 1..].to_vec();
            // inside and outside are independent
            let mut inner_results = Vec::new();
            build(&inside, &mut Vec::new(), &mut inner_results);
            for inner in inner_results {
                let mut acc2 = acc.clone();
                acc2.extend(inner);
                build(&outside, &mut acc2, out);
            }
            acc.pop();
        }
    }
    let points: Vec<usize> = (0..2 * m).collect();
    let mut raw = Vec::new();
    build(&points, &mut Vec::new(), &mut raw);
    let mut out: Vec<NoncrossingMatching> = raw
        .into_iter()
        .map(|pairs| NoncrossingMatching::new(m, pairs).expect("constructed noncrossing"))
        .collect();
    out.sort_by(|a, b| a.pairs.cmp(&b.pairs));
    out.dedup();
    Ok(out)
}

/// Whether boundary slot `x` lies strictly inside the counterclockwise arc
/// from `a` to `b` (all mod `m`).
fn in_arc(x: usize, a: usize, b: usize, m: usize) -> bool {
    let rel_x = (x + m - a) % m;
    let rel_b = (b + m - a) % m;
    rel_x > 0 && rel_x < rel_b
}

/// Builds the generic diagram determined by a pair of noncrossing
/// matchings, one per color, given on the actual boundary slots.
/// Returns the diagram together with its crossing count.
fn superpose(
    n: usize,
    im_chords: &[(usize, usize)],
    re_chords: &[(usize, usize)],
) -> Result<(ChordDiagram, usize), DiagramError> {
    let m = 4 * n;
    // crossing pairs: (im index, re index), and for each chord the ordered
    // crossings along its min-to-max orientation
    let mut node_of: std::collections::HashMap<(usize, usize), usize> = Default::default();
    let mut node_count = 0usize;
    let mut im_cross: Vec<Vec<usize>> = vec![Vec::new(); im_chords.len()];
    let mut re_cross: Vec<Vec<usize>> = vec![Vec::new(); re_chords.len()];
    for (i, &(a, b)) in im_chords.iter().enumerate() {
        for (j, &(p, q)) in re_chords.iter().enumerate() {
            let p_in = in_arc(p, a, b, m);
            let q_in = in_arc(q, a, b, m);
            if p_in != q_in {
                node_of.insert((i, j), node_count);
                node_count += 1;
            }
        }
    }
    // order crossings along each chord by the crossing chord's endpoint
    // inside the arc (valid because the crossing chords never cross each
    // other)
    for (i, &(a, b)) in im_chords.iter().enumerate() {
        let mut with_pos: Vec<(usize, usize)> = re_chords
            .iter()
            .enumerate()
            .filter(|&(j, _)| node_of.contains_key(&(i, j)))
            .map(|(j, &(p, q))| {
                let inside = if in_arc(p, a, b, m) { p } else { q };
                ((inside + m - a) % m, j)
            })
            .collect();
        with_pos.sort();
        im_cross[i] = with_pos.into_iter().map(|(_, j)| j).collect();
    }
    for (j, &(p, q)) in re_chords.iter().enumerate() {
        let mut with_pos: Vec<(usize, usize)> = im_chords
            .iter()
            .enumerate()
            .filter(|&(i, _)| node_of.contains_key(&(i, j)))
            .map(|(i, &(a, b))| {
                let inside = if in_arc(a, p, q, m) { a } else { b };
                ((inside + m - p) % m, i)
            })
            .collect();
        with_pos.sort();
        re_cross[j] = with_pos.into_iter().map(|(_, i)| i).collect();
    }

    // edges per chord: leaf - node - ... - node - leaf; node cyclic order is
    // [toward a, toward q, toward b, toward p] for the im chord (a→b)
    // crossed by the re chord with q inside and p outside the arc a→b
    let mut edges: Vec<DiagramEdge> = Vec::new();
    let mut cyclics: Vec<[(usize, u8); 4]> = vec![[(usize::MAX, 0); 4]; node_count];

    for (i, &(a, _b)) in im_chords.iter().enumerate() {
        let mut prev = EndRef::Leaf(a);
        for &j in &im_cross[i] {
            let nd = node_of[&(i, j)];
            let eid = edges.len();
            edges.push(DiagramEdge {
                color: Color::Im,
                ends: [prev, EndRef::NodeSlot { node: nd, slot: 0 }],
            });
            if let EndRef::NodeSlot { node, slot } = prev {
                cyclics[node][slot] = (eid, 0);
            }
            cyclics[nd][0] = (eid, 1);
            prev = EndRef::NodeSlot { node: nd, slot: 2 };
        }
        let eid = edges.len();
        edges.push(DiagramEdge {
            color: Color::Im,
            ends: [prev, EndRef::Leaf(im_chords[i].1)],
        });
        if let EndRef::NodeSlot { node, slot } = prev {
            cyclics[node][slot] = (eid, 0);
        }
    }
    for (j, &(p, q)) in re_chords.iter().enumerate() {
        let mut prev = EndRef::Leaf(p);
        for &i in &re_cross[j] {
            let (a, b) = im_chords[i];
            // toward-q is cyclic slot 1, toward-p slot 3; travelling p→q we
            // arrive on the p side and leave on the q side
            let (slot_in, slot_out) = if in_arc(p, a, b, m) { (1, 3) } else { (3, 1) };
            let nd = node_of[&(i, j)];
            let eid = edges.len();
            edges.push(DiagramEdge {
                color: Color::Re,
                ends: [
                    prev,
                    EndRef::NodeSlot {
                        node: nd,
                        slot: slot_in,
                    },
                ],
            });
            if let EndRef::NodeSlot { node, slot } = prev {
                cyclics[node][slot] = (eid, 0);
            }
            cyclics[nd][slot_in] = (eid, 1);
            prev = EndRef::NodeSlot {
                node: nd,
                slot: slot_out,
            };
        }
        let eid = edges.len();
        edges.push(DiagramEdge {
            color: Color::Re,
            ends: [prev, EndRef::Leaf(q)],
        });
        if let EndRef::NodeSlot { node, slot } = prev {
            cyclics[node][slot] = (eid, 0);
        }
    }

    let nodes: Vec<DiagramNode> = cyclics
        .into_iter()
        .map(|slots| DiagramNode {
            kind: NodeKind::Root,
            cyclic: slots.to_vec(),
        })
        .collect();
    let d = ChordDiagram::new(n, nodes, edges)?;
    Ok((d, node_count))
}

/// All generic diagrams of degree `n`: pairs of noncrossing single-color
/// matchings whose superposition has exactly `n` root crossings,
/// duplicate-free by canonical code.
pub fn enumerate_generic(n: usize) -> Result<Vec<ChordDiagram>, StrataError> {
    if !(1..=6).contains(&n) {
        return Err(StrataError::OutOfRange(format!("degree {n} outside 1..=6")));
    }
    let im_matchings = noncrossing_matchings(n)?;
    let re_matchings = noncrossing_matchings(n)?;
    let mut seen: BTreeSet<CanonicalCode> = BTreeSet::new();
    let mut out = Vec::new();
    for im in &im_matchings {
        let im_chords: Vec<(usize, usize)> =
            im.pairs().iter().map(|&(x, y)| (2 * x, 2 * y)).collect();
        for re in &re_matchings {
            let re_chords: Vec<(usize, usize)> = re
                .pairs()
                .iter()
                .map(|&(x, y)| (2 * x + 1, 2 * y + 1))
                .collect();
            let (d, crossings) = match superpose(n, &im_chords, &re_chords) {
                Ok(pair) => pair,
                Err(_) => continue,
            };
            if crossings != n {
                continue;
            }
            let code = d.canonical_form();
            if seen.insert(code) {
                out.push(d);
            }
        }
    }
    Ok(out)
}

/// The adjacent-pairing generic diagram: the `k`-th chord of each color
/// connects its two neighbouring same-color slots, crossing exactly once.
pub fn base_diagram(n: usize) -> Result<ChordDiagram, StrataError> {
    if n == 0 {
        return Err(StrataError::OutOfRange("degree 0".into()));
    }
    let im_chords: Vec<(usize, usize)> = (0..n).map(|k| (4 * k, 4 * k + 2)).collect();
    let re_chords: Vec<(usize, usize)> = (0..n).map(|k| (4 * k + 1, 4 * k + 3)).collect();
    let (d, crossings) = superpose(n, &im_chords, &re_chords)?;
    debug_assert_eq!(crossings, n);
    Ok(d)
}

/// Letters assigned to the chords of one color family in boundary order
/// (chord with the smaller minimum slot first), with their slot pairs.
pub fn chord_letters(
    d: &ChordDiagram,
    color: Color,
) -> Result<Vec<(char, (usize, usize))>, StrataError> {
    let mut chords = d.color_matching(color)?;
    chords.sort();
    Ok(chords
        .into_iter()
        .enumerate()
        .map(|(i, pair)| ((b'a' + i as u8) as char, pair))
        .collect())
}

// ---------------------------------------------------------------------------
// parenthesized words and merge records
// ---------------------------------------------------------------------------

/// A word in `n` letters with a well-nested set of intervals, each covering
/// at least two letters; one interval per critical point.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParenthesizedWord {
    n: usize,
    /// closed intervals `(lo, hi)` over letter positions, sorted
    intervals: Vec<(usize, usize)>,
}

impl ParenthesizedWord {
    pub fn new(n: usize, mut intervals: Vec<(usize, usize)>) -> Result<Self, StrataError> {
        if n == 0 || n > 26 {
            return Err(StrataError::OutOfRange(format!("letter count {n}")));
        }
        intervals.sort();
        for w in intervals.windows(2) {
            if w[0] == w[1] {
                return Err(StrataError::InvalidWord(format!(
                    "duplicate interval {:?}",
                    w[0]
                )));
            }
        }
        if intervals.len() > n.saturating_sub(1) {
            return Err(StrataError::InvalidWord(format!(
                "{} intervals exceed n - 1 = {}",
                intervals.len(),
                n - 1
            )));
        }
        for &(lo, hi) in &intervals {
            if lo >= hi || hi >= n {
                return Err(StrataError::InvalidWord(format!(
                    "interval ({lo}, {hi}) must cover at least two of {n} letters"
                )));
            }
        }
        for i in 0..intervals.len() {
            for j in (i + 1)..intervals.len() {
                let (a, b) = intervals[i];
                let (c, d) = intervals[j];
                let disjoint = b < c || d < a;
                let nested = (a <= c && d <= b) || (c <= a && b <= d);
                if !disjoint && !nested {
                    return Err(StrataError::InvalidWord(format!(
                        "intervals ({a},{b}) and ({c},{d}) partially overlap"
                    )));
                }
            }
        }
        Ok(ParenthesizedWord { n, intervals })
    }

    pub fn letter_count(&self) -> usize {
        self.n
    }

    pub fn intervals(&self) -> &[(usize, usize)] {
        &self.intervals
    }

    /// Letter count of each interval — the multiplicity of the critical
    /// point it records.
    pub fn multiplicities(&self) -> Vec<usize> {
        self.intervals.iter().map(|&(lo, hi)| hi - lo + 1).collect()
    }

    /// Drops one interval, yielding the word on the shared boundary.
    pub fn without_interval(&self, idx: usize) -> ParenthesizedWord {
        let mut intervals = self.intervals.clone();
        intervals.remove(idx);
        ParenthesizedWord {
            n: self.n,
            intervals,
        }
    }
}

impl std::fmt::Display for ParenthesizedWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut opens = vec![0usize; self.n];
        let mut closes = vec![0usize; self.n];
        for &(lo, hi) in &self.intervals {
            opens[lo] += 1;
            closes[hi] += 1;
        }
        for i in 0..self.n {
            for _ in 0..opens[i] {
                f.write_str("(")?;
            }
            write!(f, "{}", (b'a' + i as u8) as char)?;
            for _ in 0..closes[i] {
                f.write_str(")")?;
            }
        }
        Ok(())
    }
}

/// A sequence of curve merges starting from the base diagram: each event
/// fuses a run of currently-adjacent groups into one critical point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeRecord {
    n: usize,
    events: Vec<(usize, usize)>,
}

impl MergeRecord {
    pub fn new(n: usize) -> Result<Self, StrataError> {
        if n == 0 || n > 26 {
            return Err(StrataError::OutOfRange(format!("letter count {n}")));
        }
        Ok(MergeRecord {
            n,
            events: Vec::new(),
        })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn events(&self) -> &[(usize, usize)] {
        &self.events
    }

    /// Records the merge of the groups spanning letters `lo..=hi`. The span
    /// must cover whole existing groups and at least two of them.
    pub fn merge(&mut self, lo: usize, hi: usize) -> Result<(), StrataError> {
        if lo >= hi || hi >= self.n {
            return Err(StrataError::InvalidWord(format!(
                "merge span ({lo}, {hi}) invalid for {} letters",
                self.n
            )));
        }
        for &(a, b) in &self.events {
            if (lo, hi) == (a, b) {
                return Err(StrataError::InvalidWord(format!(
                    "span ({lo}, {hi}) already merged"
                )));
            }
            let disjoint = b < lo || hi < a;
            let new_contains_old = lo <= a && b <= hi;
            let old_contains_new = a <= lo && hi <= b;
            if !disjoint && !new_contains_old && !old_contains_new {
                return Err(StrataError::InvalidWord(format!(
                    "span ({lo}, {hi}) splits the existing group ({a}, {b})"
                )));
            }
            if old_contains_new {
                return Err(StrataError::InvalidWord(format!(
                    "span ({lo}, {hi}) lies inside the already-merged group ({a}, {b})"
                )));
            }
        }
        // the span must merge at least two current top-level groups
        let top_level: Vec<(usize, usize)> = self.top_level_groups();
        let covered: Vec<&(usize, usize)> = top_level
            .iter()
            .filter(|&&(a, b)| lo <= a && b <= hi)
            .collect();
        let span: usize = covered.iter().map(|&&(a, b)| b - a + 1).sum();
        if covered.len() < 2 || span != hi - lo + 1 {
            return Err(StrataError::InvalidWord(format!(
                "span ({lo}, {hi}) does not fuse two or more whole adjacent groups"
            )));
        }
        self.events.push((lo, hi));
        Ok(())
    }

    /// Current maximal groups: outermost merged intervals plus free letters.
    fn top_level_groups(&self) -> Vec<(usize, usize)> {
        let mut groups = Vec::new();
        let mut i = 0;
        while i < self.n {
            let outer = self
                .events
                .iter()
                .filter(|&&(a, b)| a <= i && i <= b)
                .max_by_key(|&&(a, b)| b - a);
            match outer {
                Some(&(a, b)) => {
                    groups.push((a, b));
                    i = b + 1;
                }
                None => {
                    groups.push((i, i));
                    i += 1;
                }
            }
        }
        groups
    }
}

/// The parenthesized word of a recorded merge sequence: one parenthesis
/// pair per critical point, letters in boundary order.
pub fn forest_to_word(record: &MergeRecord) -> Result<ParenthesizedWord, StrataError> {
    ParenthesizedWord::new(record.n, record.events.clone())
}

/// All maximal parenthesizations of `n` letters (full binary association
/// trees, outermost pair included); `|result| = Catalan(n-1)`.
pub fn maximal_parenthesizations(n: usize) -> Result<Vec<ParenthesizedWord>, StrataError> {
    if n == 0 || n > 12 {
        return Err(StrataError::OutOfRange(format!("letter count {n}")));
    }
    fn trees(lo: usize, hi: usize) -> Vec<Vec<(usize, usize)>> {
        if lo == hi {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for split in lo..hi {
            for left in trees(lo, split) {
                for right in trees(split + 1, hi) {
                    let mut t = left.clone();
                    t.extend(right.iter().copied());
                    t.push((lo, hi));
                    out.push(t);
                }
            }
        }
        out
    }
    let mut words: Vec<ParenthesizedWord> = trees(0, n - 1)
        .into_iter()
        .map(|intervals| ParenthesizedWord::new(n, intervals).expect("trees are well nested"))
        .collect();
    words.sort();
    words.dedup();
    Ok(words)
}

/// The pentagon of maximal parenthesizations of four letters, with edges
/// given by shared codimension-one boundary words.
#[derive(Debug, Clone)]
pub struct PentagonReport {
    pub vertices: Vec<ParenthesizedWord>,
    /// `(vertex, vertex, boundary word)` triples
    pub edges: Vec<(usize, usize, ParenthesizedWord)>,
    pub is_five_cycle: bool,
}

/// Builds the reassociation graph on the five maximal parenthesizations of
/// four letters and checks that it closes into a pentagon.
pub fn pentagon_check() -> PentagonReport {
    let vertices = maximal_parenthesizations(4).expect("n = 4 in range");
    let mut edges = Vec::new();
    for i in 0..vertices.len() {
        for j in (i + 1)..vertices.len() {
            let a: BTreeSet<(usize, usize)> = vertices[i].intervals().iter().copied().collect();
            let b: BTreeSet<(usize, usize)> = vertices[j].intervals().iter().copied().collect();
            let shared: Vec<(usize, usize)> = a.intersection(&b).copied().collect();
            if shared.len() == 2 {
                let boundary =
                    ParenthesizedWord::new(4, shared).expect("subset of nested intervals");
                edges.push((i, j, boundary));
            }
        }
    }
    let mut degree = vec![0usize; vertices.len()];
    for &(i, j, _) in &edges {
        degree[i] += 1;
        degree[j] += 1;
    }
    let five_vertices = vertices.len() == 5;
    let five_edges = edges.len() == 5;
    let all_degree_two = degree.iter().all(|&d| d == 2);
    // with five vertices, five edges and all degrees two, connectivity
    // makes the graph a single 5-cycle
    let mut uf = crate::util::UnionFind::new(vertices.len());
    for &(i, j, _) in &edges {
        uf.union(i, j);
    }
    let connected = vertices.is_empty() || (0..vertices.len()).all(|v| uf.find(v) == uf.find(0));
    PentagonReport {
        is_five_cycle: five_vertices && five_edges && all_degree_two && connected,
        vertices,
        edges,
    }
}

// ---------------------------------------------------------------------------
// dissipation
// ---------------------------------------------------------------------------

/// Record of one dissipation run: which letters merged, at which critical
/// point, and the canonical codes before, on, and past the wall.
#[derive(Debug, Clone)]
pub struct DissipationEvent {
    pub color: Color,
    pub letters: Vec<char>,
    pub critical_point: Complex64,
    /// Added to `a_0` to land exactly on the wall.
    pub wall_shift: Complex64,
    /// Added to `a_0` to pass the wall (includes the overshoot).
    pub total_shift: Complex64,
    pub old_code: CanonicalCode,
    pub wall_code: CanonicalCode,
    /// Code just past the wall; `None` when the overshoot lands inside the
    /// tracer's refusal band and re-tracing declines.
    pub new_code: Option<CanonicalCode>,
}

fn shift_constant(p: &MonicPolynomial, delta: Complex64) -> MonicPolynomial {
    let mut coeffs = p.lower_coefficients().to_vec();
    coeffs[0] += delta;
    MonicPolynomial::new(coeffs).expect("degree unchanged")
}

/// Drives `P` to the wall where the chords named by `target` fuse at one
/// critical point of the chosen color family, by zeroing that critical
/// value through the constant coefficient, and returns the polynomial just
/// past the wall together with the event record.
///
/// `eps` is the relative overshoot: the critical value is driven to
/// `-eps` times its original size rather than exactly to zero.
pub fn dissipate(
    p: &MonicPolynomial,
    target: &[char],
    color: Color,
    eps: f64,
    params: &TraceParams,
) -> Result<(MonicPolynomial, DissipationEvent), StrataError> {
    if target.len() < 2 {
        return Err(StrataError::Dissipation(
            "need at least two letters to merge".into(),
        ));
    }
    if !(eps > 0.0) {
        return Err(StrataError::Dissipation("overshoot must be positive".into()));
    }
    let web = extract_web(p, params)?;
    let d = web_to_diagram(&web)?;
    if !d.is_generic() {
        return Err(StrataError::NotGeneric(
            "dissipation starts from a generic polynomial".into(),
        ));
    }
    let letters = chord_letters(&d, color)?;
    let mut target_sorted: Vec<char> = target.to_vec();
    target_sorted.sort_unstable();
    target_sorted.dedup();
    let mut target_slots: BTreeSet<usize> = BTreeSet::new();
    for t in &target_sorted {
        let (_, (s1, s2)) = letters
            .iter()
            .find(|(l, _)| l == t)
            .ok_or_else(|| StrataError::Dissipation(format!("no chord letter '{t}'")))?;
        target_slots.insert(*s1);
        target_slots.insert(*s2);
    }
    let old_code = d.canonical_form();

    let part = |v: Complex64| match color {
        Color::Re => v.re,
        Color::Im => v.im,
    };
    let unit = match color {
        Color::Re => Complex64::new(1.0, 0.0),
        Color::Im => Complex64::new(0.0, 1.0),
    };

    let mut crits = p.critical_points(1e-12).map_err(WebError::from)?;
    crits.sort_by(|x, y| {
        part(p.evaluate(*x))
            .abs()
            .partial_cmp(&part(p.evaluate(*y)).abs())
            .unwrap()
    });

    let mut last_failure = String::from("no critical point candidates");
    for c in crits {
        let v = part(p.evaluate(c));
        let wall_shift = -unit * v;
        let wall_poly = shift_constant(p, wall_shift);
        let wall_web = match extract_web(&wall_poly, params) {
            Ok(w) => w,
            Err(e) => {
                last_failure = format!("wall re-trace failed at c = {c}: {e}");
                continue;
            }
        };
        let wall_diagram = match web_to_diagram(&wall_web) {
            Ok(d) => d,
            Err(e) => {
                last_failure = format!("wall diagram invalid at c = {c}: {e}");
                continue;
            }
        };
        // the wall must carry exactly one critical node, of our color, and
        // its component must cover exactly the target letters' slots
        let components = wall_diagram.color_components(color);
        let with_crit: Vec<_> = components
            .iter()
            .filter(|comp| !comp.criticals.is_empty())
            .collect();
        let total_criticals = wall_diagram
            .nodes()
            .iter()
            .filter(|nd| nd.kind == NodeKind::Critical)
            .count();
        if with_crit.len() != 1 || total_criticals != 1 {
            last_failure = format!(
                "zeroing the value at c = {c} creates {total_criticals} critical nodes"
            );
            continue;
        }
        let merged: BTreeSet<usize> = with_crit[0].leaves.iter().copied().collect();
        if merged != target_slots {
            let got: Vec<char> = letters
                .iter()
                .filter(|(_, (s1, s2))| merged.contains(s1) && merged.contains(s2))
                .map(|(l, _)| *l)
                .collect();
            last_failure = format!(
                "zeroing the value at c = {c} merges {:?}, not the target",
                got
            );
            continue;
        }
        let wall_code = wall_diagram.canonical_form();

        let total_shift = -unit * v * (1.0 + eps);
        let past_poly = shift_constant(p, total_shift);
        let new_code = match extract_web(&past_poly, params) {
            Ok(w) => match web_to_diagram(&w) {
                Ok(d2) => Some(d2.canonical_form()),
                Err(_) => None,
            },
            Err(WebError::NonGeneric(_)) => None,
            Err(e) => {
                return Err(StrataError::Dissipation(format!(
                    "re-trace past the wall failed: {e}"
                )))
            }
        };
        let event = DissipationEvent {
            color,
            letters: target_sorted,
            critical_point: c,
            wall_shift,
            total_shift,
            old_code,
            wall_code,
            new_code,
        };
        return Ok((past_poly, event));
    }
    Err(StrataError::Dissipation(last_failure))
}
