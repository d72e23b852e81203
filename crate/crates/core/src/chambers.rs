//! Chamber decomposition of the diagram-class set under the boundary
//! dihedral action: orbits, stabilizers, a fundamental domain, galleries.
//!
//! The construction is combinatorial. The measured boundary group acts on
//! canonical codes; the subgroup generated by every class stabilizer is
//! normal (stabilizers are conjugation-closed), and its orbits carve the
//! class set into chambers. The quotient by that kernel acts on the
//! chambers, simply transitively on each connected block, so chambers that
//! the action reaches from the fundamental chamber are its translates and
//! carry a group element as label. Every headline quantity — chamber count
//! against the nominal `4n`, kernel size, reachability, stability of the
//! fundamental chamber under the reflection — is measured and reported,
//! never assumed.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::diagram::{
    web_to_diagram, CanonicalCode, ChordDiagram, DiagramEdge, DiagramError, DiagramNode, EndRef,
};
use crate::dihedral::DihedralElement;
use crate::poly::MonicPolynomial;
use crate::util::closure_by;
use crate::webtrace::{extract_web, Color, NodeKind, TraceParams, WebError};

#[derive(Debug, Error)]
pub enum ChamberError {
    #[error("diagram set is not closed under the action: {0} escapees, first {1}")]
    NotClosed(usize, String),
    #[error("fundamental chamber is not unique: {0}")]
    Ambiguous(String),
    #[error("no gallery connects the chambers: {0}")]
    Disconnected(String),
    #[error("chamber query outside the decomposition: {0}")]
    Unknown(String),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Web(#[from] WebError),
}

/// All `8n` measured boundary transformations `s^k t^e`.
pub fn group_elements(n: usize) -> Vec<DihedralElement> {
    let mut out = Vec::with_capacity(8 * n);
    for reflect in [false, true] {
        for shift in 0..4 * n {
            out.push(DihedralElement::new(n, shift, reflect));
        }
    }
    out
}

/// The diagram traced by any polynomial of degree `n` with distinct real
/// roots: one diameter of the color that vanishes on the real axis,
/// carrying `n` root nodes interlaced with `n - 1` critical nodes, crossed
/// by `n` nested chords of the other color.
pub fn real_locus_diagram(n: usize) -> Result<ChordDiagram, ChamberError> {
    if n == 0 {
        return Err(ChamberError::Unknown("degree 0".into()));
    }
    let m = 4 * n;
    // nodes along the diameter from the slot-0 end: root, critical, root, …
    let node_count = 2 * n - 1;
    let mut edges: Vec<DiagramEdge> = Vec::new();
    let mut cyclics: Vec<[(usize, u8); 4]> = vec![[(usize::MAX, 0); 4]; node_count];

    // diameter, crossing every node; east side is slot 0
    let mut prev = EndRef::Leaf(0);
    for nd in 0..node_count {
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
        ends: [prev, EndRef::Leaf(2 * n)],
    });
    if let EndRef::NodeSlot { node, slot } = prev {
        cyclics[node][slot] = (eid, 0);
    }

    // transversal chords: slot 1 = north (upper leaf), slot 3 = south
    for nd in 0..node_count {
        let (color, upper) = if nd % 2 == 0 {
            // j-th root node carries the other-color chord (2j-1, 4n-2j+1)
            (Color::Re, nd + 1)
        } else {
            // k-th critical node carries the same-color chord (2k, 4n-2k)
            (Color::Im, nd + 1)
        };
        let lower = m - upper;
        let eid = edges.len();
        edges.push(DiagramEdge {
            color,
            ends: [EndRef::Leaf(upper), EndRef::NodeSlot { node: nd, slot: 1 }],
        });
        cyclics[nd][1] = (eid, 1);
        let eid = edges.len();
        edges.push(DiagramEdge {
            color,
            ends: [EndRef::NodeSlot { node: nd, slot: 3 }, EndRef::Leaf(lower)],
        });
        cyclics[nd][3] = (eid, 0);
    }

    let nodes: Vec<DiagramNode> = cyclics
        .iter()
        .enumerate()
        .map(|(i, slots)| DiagramNode {
            kind: if i % 2 == 0 {
                NodeKind::Root
            } else {
                NodeKind::Critical
            },
            cyclic: slots.to_vec(),
        })
        .collect();
    Ok(ChordDiagram::new(n, nodes, edges)?)
}

/// The canonical code of the generic class that the real locus resolves
/// into when every critical value is pushed to the upper half plane.
///
/// Traced from a polynomial with evenly spread distinct real roots whose
/// constant coefficient is nudged by `+iε`: the critical points stay put,
/// every critical value keeps its nonzero real part and gains imaginary
/// part exactly `ε`, so no axis is crossed and the class is the same for
/// every `ε > 0` that the tracer accepts.
pub fn resolved_real_locus_class(n: usize) -> Result<CanonicalCode, ChamberError> {
    if n == 0 {
        return Err(ChamberError::Unknown("degree 0".into()));
    }
    let roots: Vec<Complex64> = if n == 1 {
        vec![Complex64::new(0.0, 0.0)]
    } else {
        (0..n)
            .map(|k| Complex64::new(-1.0 + 2.0 * k as f64 / (n as f64 - 1.0), 0.0))
            .collect()
    };
    let real = MonicPolynomial::from_roots(&roots)
        .map_err(|e| ChamberError::Unknown(format!("real-rooted base polynomial: {e}")))?;
    let params = TraceParams::default();
    let mut eps = 1e-3;
    for _ in 0..12 {
        let mut coeffs = real.lower_coefficients().to_vec();
        coeffs[0] += Complex64::new(0.0, eps);
        let p = MonicPolynomial::new(coeffs)
            .map_err(|e| ChamberError::Unknown(format!("resolved polynomial: {e}")))?;
        match extract_web(&p, &params) {
            Ok(web) => return Ok(web_to_diagram(&web)?.canonical_form()),
            Err(_) => eps *= 4.0,
        }
    }
    Err(ChamberError::Unknown(
        "no generic resolution of the real locus was accepted by the tracer".into(),
    ))
}

/// One chamber: a cell of the decomposition, labeled by a group element
/// whenever the action carries the fundamental chamber onto it.
#[derive(Debug, Clone)]
pub struct Chamber {
    /// Lexicographically smallest member code.
    pub representative: CanonicalCode,
    /// Earliest group element mapping the fundamental chamber here
    /// (rotations before reflections, ascending shift); `None` when the
    /// action cannot reach this chamber from the fundamental one — a
    /// measured deviation from the nominal simply transitive picture.
    pub label: Option<DihedralElement>,
    /// Canonical codes of the classes in this chamber.
    pub members: BTreeSet<CanonicalCode>,
}

/// The full decomposition, with every measured quantity reported.
#[derive(Debug, Clone)]
pub struct ChamberDecomposition {
    pub n: usize,
    /// Chambers sorted by representative code.
    pub chambers: Vec<Chamber>,
    /// Index of the fundamental chamber (the one the real locus resolves
    /// into, or the one containing the real-locus class itself when the
    /// input includes it).
    pub fundamental: usize,
    /// Order of the kernel: the subgroup generated by all class
    /// stabilizers. Its orbits are the chambers.
    pub kernel_order: usize,
    /// Order of the group acting effectively on chambers (measured group
    /// order divided by the kernel order).
    pub effective_order: usize,
    /// The count the nominal picture predicts: `4n`.
    pub nominal_chamber_count: usize,
    /// Whether the reflection fixes the fundamental chamber (measured).
    pub fundamental_stable_under_t: bool,
    /// Chambers reachable from the fundamental one (they carry labels).
    pub reachable: Vec<usize>,
    /// Chambers the action cannot reach from the fundamental one.
    pub unreachable: Vec<usize>,
    index: BTreeMap<CanonicalCode, usize>,
    exemplars: BTreeMap<CanonicalCode, ChordDiagram>,
}

impl ChamberDecomposition {
    /// Number of diagram classes in the decomposition.
    pub fn class_count(&self) -> usize {
        self.index.len()
    }

    /// Chamber index of a class.
    pub fn chamber_of(&self, code: &CanonicalCode) -> Result<usize, ChamberError> {
        self.index
            .get(code)
            .copied()
            .ok_or_else(|| ChamberError::Unknown(format!("class {} not in the decomposition", code.0)))
    }

    /// Image class of `code` under `g`.
    pub fn apply(&self, g: &DihedralElement, code: &CanonicalCode) -> Result<CanonicalCode, ChamberError> {
        let d = self
            .exemplars
            .get(code)
            .ok_or_else(|| ChamberError::Unknown(format!("class {} not in the decomposition", code.0)))?;
        Ok(g.apply_to_diagram(d)?.canonical_form())
    }

    /// Chamber reached from `chamber` by acting with `g`. Well defined
    /// because the kernel is normal: every member maps into one chamber.
    pub fn move_chamber(&self, g: &DihedralElement, chamber: usize) -> Result<usize, ChamberError> {
        let rep = self
            .chambers
            .get(chamber)
            .ok_or_else(|| ChamberError::Unknown(format!("chamber {chamber} out of range")))?
            .representative
            .clone();
        let image = self.apply(g, &rep)?;
        self.chamber_of(&image)
    }
}

/// Decompose a closed set of diagram classes into chambers.
///
/// The input must contain every class the boundary action can produce from
/// it; otherwise the escapees are listed in the error. Chambers are the
/// orbits of the kernel (the subgroup generated by all class stabilizers),
/// so they partition the classes. The fundamental chamber is the one the
/// real locus resolves into; labels, reachability, and the reflection
/// stability of the fundamental chamber are measured afterwards.
pub fn chamber_decomposition(
    n: usize,
    diagrams: &[ChordDiagram],
) -> Result<ChamberDecomposition, ChamberError> {
    if n == 0 {
        return Err(ChamberError::Unknown("degree 0".into()));
    }
    let mut exemplars: BTreeMap<CanonicalCode, ChordDiagram> = BTreeMap::new();
    for d in diagrams {
        if d.degree() != n {
            return Err(ChamberError::Unknown(format!(
                "diagram of degree {} in a degree-{n} decomposition",
                d.degree()
            )));
        }
        exemplars.entry(d.canonical_form()).or_insert_with(|| d.clone());
    }
    if exemplars.is_empty() {
        return Err(ChamberError::Unknown("empty diagram set".into()));
    }

    let group = group_elements(n);
    // Action table and closure check in one pass.
    let mut action: BTreeMap<(usize, CanonicalCode), CanonicalCode> = BTreeMap::new();
    let mut escapees: Vec<String> = Vec::new();
    for (code, d) in &exemplars {
        for (gi, g) in group.iter().enumerate() {
            let image = g.apply_to_diagram(d)?.canonical_form();
            if !exemplars.contains_key(&image) {
                escapees.push(format!(
                    "s^{}t^{} applied to {} gives {}",
                    g.shift(),
                    u8::from(g.reflects()),
                    code.0,
                    image.0
                ));
            }
            action.insert((gi, code.clone()), image);
        }
    }
    if !escapees.is_empty() {
        let first = escapees[0].clone();
        return Err(ChamberError::NotClosed(escapees.len(), first));
    }

    // Kernel: subgroup generated by every element that fixes some class.
    let mut stabilizer_elements: BTreeSet<(usize, bool)> = BTreeSet::new();
    for code in exemplars.keys() {
        for (gi, g) in group.iter().enumerate() {
            if action[&(gi, code.clone())] == *code {
                stabilizer_elements.insert((g.shift(), g.reflects()));
            }
        }
    }
    let generators: Vec<DihedralElement> = stabilizer_elements
        .iter()
        .map(|&(s, r)| DihedralElement::new(n, s, r))
        .collect();
    let kernel = closure_by(DihedralElement::identity(n), &generators, |a, b| a.compose(b));
    let kernel_order = kernel.len();
    let effective_order = group.len() / kernel_order;

    // Chambers = kernel orbits, sorted by lex-min representative.
    let mut chamber_sets: Vec<BTreeSet<CanonicalCode>> = Vec::new();
    let mut assigned: BTreeSet<CanonicalCode> = BTreeSet::new();
    for code in exemplars.keys() {
        if assigned.contains(code) {
            continue;
        }
        let mut members = BTreeSet::new();
        for g in &kernel {
            let gi = group
                .iter()
                .position(|h| h.shift() == g.shift() && h.reflects() == g.reflects())
                .expect("kernel element is a group element");
            members.insert(action[&(gi, code.clone())].clone());
        }
        for m in &members {
            assigned.insert(m.clone());
        }
        chamber_sets.push(members);
    }
    chamber_sets.sort_by(|a, b| a.iter().next().cmp(&b.iter().next()));
    let mut index: BTreeMap<CanonicalCode, usize> = BTreeMap::new();
    for (ci, members) in chamber_sets.iter().enumerate() {
        for m in members {
            index.insert(m.clone(), ci);
        }
    }

    // Fundamental chamber: the real-locus class itself when present,
    // otherwise the class its resolution traces to.
    let rl_code = real_locus_diagram(n)?.canonical_form();
    let fundamental = if let Some(&ci) = index.get(&rl_code) {
        ci
    } else {
        let resolved = resolved_real_locus_class(n)?;
        *index.get(&resolved).ok_or_else(|| {
            ChamberError::Unknown(format!(
                "resolved real-locus class {} is outside the diagram set",
                resolved.0
            ))
        })?
    };

    // Labels: earliest group element carrying the fundamental chamber here.
    let fund_rep = chamber_sets[fundamental]
        .iter()
        .next()
        .expect("chambers are nonempty")
        .clone();
    let mut labels: Vec<Option<DihedralElement>> = vec![None; chamber_sets.len()];
    for g in &group {
        let gi = group
            .iter()
            .position(|h| h.shift() == g.shift() && h.reflects() == g.reflects())
            .expect("element of its own group");
        let target = index[&action[&(gi, fund_rep.clone())]];
        if labels[target].is_none() {
            labels[target] = Some(*g);
        }
    }
    let reachable: Vec<usize> = (0..chamber_sets.len()).filter(|&c| labels[c].is_some()).collect();
    let unreachable: Vec<usize> = (0..chamber_sets.len()).filter(|&c| labels[c].is_none()).collect();

    let t = DihedralElement::t(n);
    let ti = group
        .iter()
        .position(|h| h.shift() == t.shift() && h.reflects() == t.reflects())
        .expect("reflection is a group element");
    let fundamental_stable_under_t = index[&action[&(ti, fund_rep.clone())]] == fundamental;

    let chambers: Vec<Chamber> = chamber_sets
        .into_iter()
        .zip(labels)
        .map(|(members, label)| Chamber {
            representative: members.iter().next().expect("nonempty").clone(),
            label,
            members,
        })
        .collect();

    Ok(ChamberDecomposition {
        n,
        chambers,
        fundamental,
        kernel_order,
        effective_order,
        nominal_chamber_count: 4 * n,
        fundamental_stable_under_t,
        reachable,
        unreachable,
        index,
        exemplars,
    })
}

/// The chamber the real locus resolves into.
pub fn fundamental_chamber(dec: &ChamberDecomposition) -> &Chamber {
    &dec.chambers[dec.fundamental]
}

/// A shortest walk between two chambers through generator moves.
#[derive(Debug, Clone)]
pub struct Gallery {
    /// Visited chamber indices, endpoints included.
    pub chambers: Vec<usize>,
    /// One generator per step: the rotation, its inverse, or the reflection.
    pub moves: Vec<DihedralElement>,
}

impl Gallery {
    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }
}

/// Shortest gallery from one chamber to another by breadth-first search
/// over the generator moves. Errors when the action cannot connect them.
pub fn gallery(
    dec: &ChamberDecomposition,
    from: usize,
    to: usize,
) -> Result<Gallery, ChamberError> {
    let count = dec.chambers.len();
    if from >= count || to >= count {
        return Err(ChamberError::Unknown(format!(
            "chamber pair ({from}, {to}) out of range for {count} chambers"
        )));
    }
    let n = dec.n;
    let moves = [
        DihedralElement::s(n),
        DihedralElement::s(n).inverse(),
        DihedralElement::t(n),
    ];
    let mut back: Vec<Option<(usize, usize)>> = vec![None; count]; // (prev chamber, move idx)
    let mut seen = vec![false; count];
    let mut queue = VecDeque::new();
    seen[from] = true;
    queue.push_back(from);
    while let Some(c) = queue.pop_front() {
        if c == to {
            break;
        }
        for (mi, g) in moves.iter().enumerate() {
            let next = dec.move_chamber(g, c)?;
            if !seen[next] {
                seen[next] = true;
                back[next] = Some((c, mi));
                queue.push_back(next);
            }
        }
    }
    if !seen[to] {
        return Err(ChamberError::Disconnected(format!(
            "chamber {to} is not reachable from chamber {from}"
        )));
    }
    let mut chain = vec![to];
    let mut move_ids = Vec::new();
    let mut cur = to;
    while cur != from {
        let (prev, mi) = back[cur].expect("breadth-first predecessor");
        chain.push(prev);
        move_ids.push(mi);
        cur = prev;
    }
    chain.reverse();
    move_ids.reverse();
    Ok(Gallery {
        chambers: chain,
        moves: move_ids.into_iter().map(|mi| moves[mi]).collect(),
    })
}

/// Result of the path-lifting check: random walks on the chamber graph,
/// each verified to be the projection of the corresponding walk on classes.
#[derive(Debug, Clone, Copy)]
pub struct PathLiftingReport {
    pub walks: usize,
    pub length: usize,
    pub failures: usize,
}

impl PathLiftingReport {
    pub fn holds(&self) -> bool {
        self.failures == 0
    }
}

/// Walk random generator words simultaneously on classes and on chambers
/// and count the steps where the projection disagrees with the chamber
/// move — the path-lifting property of the quotient.
pub fn check_path_lifting(
    dec: &ChamberDecomposition,
    walks: usize,
    length: usize,
    seed: u64,
) -> Result<PathLiftingReport, ChamberError> {
    let n = dec.n;
    let moves = [
        DihedralElement::s(n),
        DihedralElement::s(n).inverse(),
        DihedralElement::t(n),
    ];
    let codes: Vec<CanonicalCode> = dec.index.keys().cloned().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for _ in 0..walks {
        let mut class = codes[rng.gen_range(0..codes.len())].clone();
        let mut chamber = dec.chamber_of(&class)?;
        let mut ok = true;
        for _ in 0..length {
            let g = &moves[rng.gen_range(0..moves.len())];
            class = dec.apply(g, &class)?;
            chamber = dec.move_chamber(g, chamber)?;
            if dec.chamber_of(&class)? != chamber {
                ok = false;
                break;
            }
        }
        if !ok {
            failures += 1;
        }
    }
    Ok(PathLiftingReport {
        walks,
        length,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strata::enumerate_generic;

    fn generic_decomposition(n: usize) -> ChamberDecomposition {
        chamber_decomposition(n, &enumerate_generic(n).unwrap()).unwrap()
    }

    #[test]
    fn real_locus_diagram_matches_a_real_rooted_trace() {
        let params = TraceParams::default();
        // z² - z has roots 0 and 1
        let p = MonicPolynomial::new(vec![
            num_complex::Complex64::new(0.0, 0.0),
            num_complex::Complex64::new(-1.0, 0.0),
        ])
        .unwrap();
        let traced = web_to_diagram(&extract_web(&p, &params).unwrap()).unwrap();
        let built = real_locus_diagram(2).unwrap();
        assert_eq!(built.canonical_form(), traced.canonical_form());
    }

    #[test]
    fn degree_one_has_a_single_chamber_fixed_by_everything() {
        let dec = generic_decomposition(1);
        assert_eq!(dec.chambers.len(), 1);
        assert_eq!(dec.class_count(), 1);
        assert_eq!(dec.kernel_order, 8);
        assert_eq!(dec.effective_order, 1);
        assert_eq!(dec.fundamental, 0);
        assert!(dec.fundamental_stable_under_t);
        assert!(dec.unreachable.is_empty());
        let label = dec.chambers[0].label.expect("fundamental chamber is labeled");
        assert_eq!((label.shift(), label.reflects()), (0, false));
    }

    #[test]
    fn chambers_partition_the_enumerated_classes() {
        for n in 1..=4 {
            let dec = generic_decomposition(n);
            let total: usize = dec.chambers.iter().map(|c| c.members.len()).sum();
            assert_eq!(total, dec.class_count(), "degree {n}");
            let mut seen = BTreeSet::new();
            for c in &dec.chambers {
                for m in &c.members {
                    assert!(seen.insert(m.clone()), "degree {n}: class in two chambers");
                }
            }
            // kernel orbits have one size within each connected block
            assert_eq!(dec.reachable.len() + dec.unreachable.len(), dec.chambers.len());
        }
    }

    #[test]
    fn chamber_counts_and_kernels_are_frozen() {
        // measured: chamber count, kernel order, and whether the count
        // matches the nominal 4n, for the enumerated generic classes
        let expected = [
            (1, 1, 8, false),
            (2, 2, 8, false),
            (3, 3, 24, false),
            (4, 16, 16, true),
        ];
        for (n, chambers, kernel, matches_nominal) in expected {
            let dec = generic_decomposition(n);
            assert_eq!(dec.chambers.len(), chambers, "degree {n} chamber count");
            assert_eq!(dec.kernel_order, kernel, "degree {n} kernel order");
            assert_eq!(
                dec.chambers.len() == dec.nominal_chamber_count,
                matches_nominal,
                "degree {n} against nominal"
            );
            assert_eq!(dec.effective_order * dec.kernel_order, 8 * n, "degree {n} orders");
        }
    }

    #[test]
    fn degree_two_chambers_are_mirror_twins() {
        let dec = generic_decomposition(2);
        assert_eq!(dec.chambers.len(), 2);
        assert!(dec.chambers.iter().all(|c| c.members.len() == 2));
        // both chambers carry labels: the quotient reaches everything
        assert!(dec.unreachable.is_empty());
        // the resolution of the real locus lands in the fundamental chamber
        let resolved = resolved_real_locus_class(2).unwrap();
        assert!(fundamental_chamber(&dec).members.contains(&resolved));
        // the reflection swaps the two chambers (measured; the nominal
        // picture would fix the fundamental chamber)
        assert!(!dec.fundamental_stable_under_t);
        let t = DihedralElement::t(2);
        let swapped = dec.move_chamber(&t, dec.fundamental).unwrap();
        assert_ne!(swapped, dec.fundamental);
    }

    #[test]
    fn chamber_labels_map_the_fundamental_representative() {
        for n in [2, 3, 4] {
            let dec = generic_decomposition(n);
            let fund_rep = fundamental_chamber(&dec).representative.clone();
            for (ci, chamber) in dec.chambers.iter().enumerate() {
                if let Some(g) = chamber.label {
                    let image = dec.apply(&g, &fund_rep).unwrap();
                    assert!(chamber.members.contains(&image), "degree {n} chamber {ci}");
                }
            }
            let fund_label = dec.chambers[dec.fundamental].label.expect("labeled");
            assert_eq!((fund_label.shift(), fund_label.reflects()), (0, false));
        }
    }

    #[test]
    fn including_the_real_locus_orbit_changes_the_fundamental_chamber() {
        let mut diagrams = enumerate_generic(2).unwrap();
        let rl = real_locus_diagram(2).unwrap();
        for g in group_elements(2) {
            diagrams.push(g.apply_to_diagram(&rl).unwrap());
        }
        let dec = chamber_decomposition(2, &diagrams).unwrap();
        // the kernel saturates: chambers are the two full orbits
        assert_eq!(dec.class_count(), 8);
        assert_eq!(dec.chambers.len(), 2);
        let fund = fundamental_chamber(&dec);
        assert!(fund.members.contains(&rl.canonical_form()));
        assert_eq!(fund.members.len(), 4);
        // the real-locus chamber is fixed by the reflection
        assert!(dec.fundamental_stable_under_t);
        // the generic chamber is not reachable from it: reported, not hidden
        assert_eq!(dec.unreachable.len(), 1);
        assert!(dec.chambers[dec.unreachable[0]].label.is_none());
    }

    #[test]
    fn independent_real_polynomials_resolve_into_one_class() {
        // unevenly spread real roots trace to the same resolved class as
        // the evenly spread ones used by the resolution rule
        let roots = [
            Complex64::new(-0.9, 0.0),
            Complex64::new(-0.1, 0.0),
            Complex64::new(0.7, 0.0),
        ];
        let real = MonicPolynomial::from_roots(&roots).unwrap();
        let mut coeffs = real.lower_coefficients().to_vec();
        coeffs[0] += Complex64::new(0.0, 2e-3);
        let p = MonicPolynomial::new(coeffs).unwrap();
        let web = extract_web(&p, &TraceParams::default()).unwrap();
        let traced = web_to_diagram(&web).unwrap().canonical_form();
        assert_eq!(traced, resolved_real_locus_class(3).unwrap());
    }

    #[test]
    fn galleries_measure_the_chamber_graph() {
        let dec = generic_decomposition(2);
        let f = dec.fundamental;
        let other = (0..dec.chambers.len()).find(|&c| c != f).unwrap();
        assert!(gallery(&dec, f, f).unwrap().is_empty());
        let walk = gallery(&dec, f, other).unwrap();
        assert_eq!(walk.len(), 1);
        assert_eq!(walk.chambers, vec![f, other]);
        // symmetry of the distance
        assert_eq!(gallery(&dec, other, f).unwrap().len(), 1);
        // replaying the moves reproduces the chamber chain
        let mut at = f;
        for (g, &expect) in walk.moves.iter().zip(&walk.chambers[1..]) {
            at = dec.move_chamber(g, at).unwrap();
            assert_eq!(at, expect);
        }
        // the half-turn lies in the kernel here, so the rotation
        // antipode of a chamber is itself (measured distance zero)
        let half_turn = DihedralElement::s(2).pow(4);
        assert_eq!(dec.move_chamber(&half_turn, f).unwrap(), f);
    }

    #[test]
    fn galleries_report_disconnection_honestly() {
        let dec = generic_decomposition(4);
        assert!(!dec.unreachable.is_empty());
        let f = dec.fundamental;
        let stranded = dec.unreachable[0];
        match gallery(&dec, f, stranded) {
            Err(ChamberError::Disconnected(_)) => {}
            other => panic!("expected a disconnection error, got {other:?}"),
        }
        // within the reachable block the gallery works
        let twin = dec
            .reachable
            .iter()
            .copied()
            .find(|&c| c != f)
            .expect("degree 4 has a reachable twin chamber");
        let walk = gallery(&dec, f, twin).unwrap();
        assert!(walk.len() >= 1);
    }

    #[test]
    fn path_lifting_commutes_on_random_walks() {
        for n in [2, 4] {
            let dec = generic_decomposition(n);
            let report = check_path_lifting(&dec, 100, 10, 7).unwrap();
            assert!(report.holds(), "degree {n}: {report:?}");
        }
    }

    #[test]
    fn closure_violations_are_reported() {
        let mut diagrams = enumerate_generic(2).unwrap();
        diagrams.pop();
        match chamber_decomposition(2, &diagrams) {
            Err(ChamberError::NotClosed(count, _)) => assert!(count > 0),
            other => panic!("expected a closure error, got {other:?}"),
        }
    }
}
