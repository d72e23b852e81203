//! Numerical extraction of the harmonic web of a monic polynomial.
//!
//! For `P` of degree `n`, the zero sets `{Re P = 0}` and `{Im P = 0}` are
//! clipped to the disc of radius `R = cauchy_radius(P) + 1`. Each set meets
//! the boundary circle in exactly `2n` points (*leaves*), interleaved by
//! color, and the union of the curves is a planar forest whose inner nodes
//! are the roots of `P` and the critical points lying on a zero set.
//!
//! Two independent extraction paths are provided: [`extract_web`] follows
//! curves with a tangent-predictor / Newton-corrector walk, and
//! [`sign_grid_oracle`] rebuilds the same structure from a marching-squares
//! pass over a sign grid. Agreement of the two is a strong correctness check
//! for both.

use num_complex::Complex64;
use std::collections::HashMap;
use thiserror::Error;

use crate::poly::{BivariatePoly, MonicPolynomial, PolyError};

/// Curve color: which harmonic part of `P` vanishes along it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Color {
    #[serde(rename = "RE")]
    Re,
    #[serde(rename = "IM")]
    Im,
}

impl Color {
    pub fn flipped(self) -> Color {
        match self {
            Color::Re => Color::Im,
            Color::Im => Color::Re,
        }
    }
}

/// Inner node kind: a root of `P`, or a critical point of one harmonic part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum NodeKind {
    #[serde(rename = "ROOT")]
    Root,
    #[serde(rename = "CRITICAL")]
    Critical,
}

/// Color of boundary slot `k` (angle `k·π/2n`): even slots carry `Im`
/// asymptotics (`sin nθ` zeros), odd slots carry `Re` (`cos nθ` zeros).
pub fn slot_color(k: usize) -> Color {
    if k % 2 == 0 {
        Color::Im
    } else {
        Color::Re
    }
}

/// A boundary leaf: the intersection of one curve with the clipping circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Leaf {
    /// Slot index `0..4n`, counterclockwise from angle 0.
    pub index: usize,
    pub color: Color,
    /// Refined angle; within `π/(2n)` of the asymptotic slot angle.
    pub angle: f64,
}

impl Leaf {
    pub fn position(&self, radius: f64) -> Complex64 {
        Complex64::from_polar(radius, self.angle)
    }
}

/// One attachment point of a curve: a boundary leaf or an inner-node slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CurveEnd {
    Leaf(usize),
    Node { node: usize, slot: usize },
}

/// A slot in a node's cyclic (counterclockwise) boundary order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeSlot {
    pub angle: f64,
    pub color: Color,
}

/// An inner node of the web with its cyclic slot order.
#[derive(Debug, Clone, PartialEq)]
pub struct WebNode {
    pub position: Complex64,
    pub kind: NodeKind,
    /// Counterclockwise by angle; alternating colors at a root.
    pub slots: Vec<NodeSlot>,
}

/// A traced curve segment between two attachment points.
#[derive(Debug, Clone, PartialEq)]
pub struct TracedCurve {
    pub color: Color,
    pub ends: (CurveEnd, CurveEnd),
    pub points: Vec<Complex64>,
}

/// The clipped harmonic web of a polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct Web {
    pub degree: usize,
    pub radius: f64,
    pub leaves: Vec<Leaf>,
    pub nodes: Vec<WebNode>,
    pub curves: Vec<TracedCurve>,
}

impl Web {
    /// The curve end attached at boundary leaf `i`.
    pub fn leaf_attachment(&self, i: usize) -> Option<(usize, u8)> {
        for (ci, curve) in self.curves.iter().enumerate() {
            if curve.ends.0 == CurveEnd::Leaf(i) {
                return Some((ci, 0));
            }
            if curve.ends.1 == CurveEnd::Leaf(i) {
                return Some((ci, 1));
            }
        }
        None
    }

    /// The curve end attached at slot `slot` of node `node`.
    pub fn node_slot_attachment(&self, node: usize, slot: usize) -> Option<(usize, u8)> {
        let want = CurveEnd::Node { node, slot };
        for (ci, curve) in self.curves.iter().enumerate() {
            if curve.ends.0 == want {
                return Some((ci, 0));
            }
            if curve.ends.1 == want {
                return Some((ci, 1));
            }
        }
        None
    }

    /// Plain-text dump with LEAVES / CURVES / NODES sections, 9 significant
    /// digits, intended for debugging and diffs.
    pub fn dump_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(out, "LEAVES");
        for leaf in &self.leaves {
            let p = leaf.position(self.radius);
            let _ = writeln!(
                out,
                "{} {} {:.8e} {:.8e} {:.8e}",
                leaf.index,
                color_tag(leaf.color),
                leaf.angle,
                p.re,
                p.im
            );
        }
        let _ = writeln!(out, "CURVES");
        for (i, curve) in self.curves.iter().enumerate() {
            let _ = writeln!(
                out,
                "{} {} {} {} {}",
                i,
                color_tag(curve.color),
                end_tag(curve.ends.0),
                end_tag(curve.ends.1),
                curve.points.len()
            );
            for p in &curve.points {
                let _ = writeln!(out, "  {:.8e} {:.8e}", p.re, p.im);
            }
        }
        let _ = writeln!(out, "NODES");
        for (i, node) in self.nodes.iter().enumerate() {
            let kind = match node.kind {
                NodeKind::Root => "ROOT",
                NodeKind::Critical => "CRITICAL",
            };
            let slots: Vec<String> = node
                .slots
                .iter()
                .map(|s| format!("{}:{:.8e}", color_tag(s.color), s.angle))
                .collect();
            let _ = writeln!(
                out,
                "{} {} {:.8e} {:.8e} {}",
                i,
                kind,
                node.position.re,
                node.position.im,
                slots.join(" ")
            );
        }
        out
    }
}

fn color_tag(c: Color) -> &'static str {
    match c {
        Color::Re => "RE",
        Color::Im => "IM",
    }
}

fn end_tag(e: CurveEnd) -> String {
    match e {
        CurveEnd::Leaf(i) => format!("L{i}"),
        CurveEnd::Node { node, slot } => format!("N{node}.{slot}"),
    }
}

/// Tunable tolerances for web extraction. Defaults implement the pinned
/// numeric policy; tests and the acceptance suite rely on these values.
#[derive(Debug, Clone)]
pub struct TraceParams {
    /// Corrector target: accept a point when `|F| < trace_tol · R^n`.
    pub trace_tol: f64,
    /// Node pin radius as a fraction of `R`.
    pub merge_tol_factor: f64,
    /// Initial predictor step `h₀ = R / step_divisor`.
    pub step_divisor: f64,
    /// Step floor `R / step_floor_divisor`; reaching it is a failure.
    pub step_floor_divisor: f64,
    /// Maximum Newton corrector iterations per step.
    pub corrector_max: usize,
    /// Hard cap on accepted steps per traced segment.
    pub step_budget: usize,
}

impl Default for TraceParams {
    fn default() -> Self {
        TraceParams {
            trace_tol: 1e-10,
            merge_tol_factor: 1e-4,
            step_divisor: 200.0,
            step_floor_divisor: 20000.0,
            corrector_max: 5,
            step_budget: 200_000,
        }
    }
}

impl TraceParams {
    pub fn merge_tol(&self, radius: f64) -> f64 {
        self.merge_tol_factor * radius
    }
}

#[derive(Debug, Error)]
pub enum WebError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("clipping radius {given} below cauchy radius {required} plus margin")]
    InvalidRadius { given: f64, required: f64 },
    #[error("non-generic within tolerance: {0}")]
    NonGeneric(String),
    #[error("trace failure: {0}")]
    Trace(String),
    #[error("sign-grid oracle failure: {0}")]
    Oracle(String),
}

const LEAF_BISECTIONS: usize = 90;

/// The `4n` boundary leaves of the web of `P` on the circle of radius `R`.
///
/// Each slot's refined angle is found by bisection between the adjacent
/// opposite-color asymptotic angles, where the relevant harmonic part has
/// provably opposite signs once `R ≥ cauchy_radius(P) + 1`.
pub fn leaves(p: &MonicPolynomial, radius: f64) -> Result<Vec<Leaf>, WebError> {
    let required = p.cauchy_radius() + 1.0;
    if radius < required - 1e-9 {
        return Err(WebError::InvalidRadius {
            given: radius,
            required,
        });
    }
    let n = p.degree();
    let (re, im) = p.harmonic_parts();
    let mut out = Vec::with_capacity(4 * n);
    for k in 0..4 * n {
        let color = slot_color(k);
        let f = match color {
            Color::Re => &re,
            Color::Im => &im,
        };
        let eval = |theta: f64| {
            let z = Complex64::from_polar(radius, theta);
            f.eval(z.re, z.im)
        };
        let half_slot = std::f64::consts::PI / (2.0 * n as f64);
        let mut a = (k as f64 - 1.0) * half_slot;
        let mut b = (k as f64 + 1.0) * half_slot;
        let (fa, fb) = (eval(a), eval(b));
        if fa == 0.0 {
            out.push(Leaf { index: k, color, angle: a });
            continue;
        }
        if fb == 0.0 {
            out.push(Leaf { index: k, color, angle: b });
            continue;
        }
        if fa.signum() == fb.signum() {
            return Err(WebError::Trace(format!(
                "no sign change bracketing boundary slot {k}"
            )));
        }
        for _ in 0..LEAF_BISECTIONS {
            let mid = 0.5 * (a + b);
            let fm = eval(mid);
            if fm == 0.0 {
                a = mid;
                b = mid;
                break;
            }
            if fm.signum() == fa.signum() {
                a = mid;
            } else {
                b = mid;
            }
        }
        out.push(Leaf {
            index: k,
            color,
            angle: 0.5 * (a + b),
        });
    }
    Ok(out)
}

/// Where a single trace stopped.
#[derive(Debug, Clone)]
pub enum TraceStop {
    /// Exited the clipping circle at this angle.
    Boundary { angle: f64 },
    /// Entered the pin disc of `nodes[index]`, approaching at this angle.
    Node { index: usize, approach_angle: f64 },
}

/// A traced polyline along `{F = 0}` with its stop condition.
#[derive(Debug, Clone)]
pub struct TraceOutcome {
    pub points: Vec<Complex64>,
    pub stop: TraceStop,
}

struct FGeom {
    f: BivariatePoly,
    fx: BivariatePoly,
    fy: BivariatePoly,
    scale: f64,
}

impl FGeom {
    fn new(f: BivariatePoly, radius: f64) -> Self {
        let scale = radius.powi(f.degree() as i32).max(1.0);
        FGeom {
            fx: f.partial_x(),
            fy: f.partial_y(),
            f,
            scale,
        }
    }

    fn value(&self, z: Complex64) -> f64 {
        self.f.eval(z.re, z.im)
    }

    fn gradient(&self, z: Complex64) -> Complex64 {
        Complex64::new(self.fx.eval(z.re, z.im), self.fy.eval(z.re, z.im))
    }
}

/// Follows the implicit curve `{F = 0}` from `start` (a point on or very
/// near the curve, at or inside the circle of radius `radius`) until it
/// re-hits the boundary circle or enters the pin disc of one of `nodes`.
///
/// The walk uses a unit tangent predictor and at most
/// `params.corrector_max` Newton corrector steps along the gradient; the
/// step starts at `R/step_divisor`, halves on corrector failure down to a
/// floor of `R/step_floor_divisor`, and shrinks automatically near nodes.
pub fn trace_curve(
    f: &BivariatePoly,
    start: Complex64,
    radius: f64,
    nodes: &[Complex64],
    params: &TraceParams,
) -> Result<TraceOutcome, WebError> {
    let geom = FGeom::new(f.clone(), radius);
    // Inward initial direction: the tangent signed against the radial ray.
    let g = geom.gradient(start);
    if g.norm() == 0.0 {
        return Err(WebError::Trace("vanishing gradient at start".into()));
    }
    let tangent = Complex64::new(-g.im, g.re) / g.norm();
    let radial = start / start.norm().max(1e-300);
    let dir = if tangent.re * radial.re + tangent.im * radial.im > 0.0 {
        -tangent
    } else {
        tangent
    };
    let pins = vec![params.merge_tol(radius); nodes.len()];
    trace_from(&geom, start, dir, radius, nodes, &pins, None, params)
}

/// Core tracer shared by the public entry points.
fn trace_from(
    geom: &FGeom,
    start: Complex64,
    dir0: Complex64,
    radius: f64,
    nodes: &[Complex64],
    pins: &[f64],
    skip_node: Option<usize>,
    params: &TraceParams,
) -> Result<TraceOutcome, WebError> {
    let h0 = radius / params.step_divisor;
    let floor = radius / params.step_floor_divisor;
    let tol_f = params.trace_tol * geom.scale;
    let grad_floor = 1e-11 * geom.scale / radius;
    let merge_tol = params.merge_tol(radius);

    let mut z = start;
    let mut dir = dir0;
    let mut h = h0;
    let mut points = vec![z];
    let mut armed = z.norm() < radius - 3.0 * h0;
    let mut skipped = skip_node;

    for _step in 0..params.step_budget {
        let mut d_near = f64::INFINITY;
        if let Some(s) = skipped {
            let release = (6.0 * merge_tol).max(3.0 * pins[s]);
            if (z - nodes[s]).norm() > release {
                skipped = None;
            }
        }
        for (i, &npos) in nodes.iter().enumerate() {
            if Some(i) == skipped {
                continue;
            }
            d_near = d_near.min((z - npos).norm());
        }
        let h_eff = h.min((d_near * 0.5).max(floor));

        // predictor + corrector
        let zp = z + dir * h_eff;
        let mut zc = zp;
        let mut ok = false;
        for _ in 0..=params.corrector_max {
            let fv = geom.value(zc);
            if fv.abs() <= tol_f {
                ok = true;
                break;
            }
            let g = geom.gradient(zc);
            let g2 = g.norm_sqr();
            if g2.sqrt() < grad_floor {
                return Err(WebError::Trace(format!(
                    "gradient below threshold at ({:.6}, {:.6})",
                    zc.re, zc.im
                )));
            }
            zc -= g * (fv / g2);
        }
        if !ok || (zc - zp).norm() > 0.6 * h_eff {
            h *= 0.5;
            if h < floor {
                return Err(WebError::Trace(format!(
                    "corrector stalled near ({:.6}, {:.6})",
                    zp.re, zp.im
                )));
            }
            continue;
        }

        // accept; refresh the tangent keeping the direction of motion.
        // A vanishing gradient at an accepted point is a curve crossing;
        // coast through on the previous heading (the straight continuation
        // is itself a branch there).
        let g = geom.gradient(zc);
        if g.norm() >= grad_floor {
            let mut t = Complex64::new(-g.im, g.re) / g.norm();
            let along = t.re * dir.re + t.im * dir.im;
            if along < 0.0 {
                t = -t;
            } else if along == 0.0 {
                return Err(WebError::Trace("tangent turned perpendicular".into()));
            }
            dir = t;
        }
        let prev = z;
        z = zc;
        points.push(z);
        h = (h * 1.5).min(h0);

        // node pinning; the angle is measured at the point before the
        // entering step — it is at least one pin radius out, where an
        // accepted point provably hugs the curve, while the point inside
        // the pin disc may sit anywhere in the acceptance blob.
        let mut pinned = None;
        for (i, &npos) in nodes.iter().enumerate() {
            if Some(i) == skipped {
                continue;
            }
            if (z - npos).norm() <= pins[i] {
                pinned = Some((i, npos));
                break;
            }
        }
        if let Some((i, npos)) = pinned {
            let approach = (prev - npos).arg();
            points.push(npos);
            return Ok(TraceOutcome {
                points,
                stop: TraceStop::Node {
                    index: i,
                    approach_angle: approach,
                },
            });
        }

        // boundary exit
        if !armed && z.norm() < radius - 3.0 * h0 {
            armed = true;
        }
        if z.norm() >= radius {
            if armed {
                let cross = circle_crossing(prev, z, radius);
                let last = points.len() - 1;
                points[last] = cross;
                return Ok(TraceOutcome {
                    points,
                    stop: TraceStop::Boundary { angle: cross.arg() },
                });
            }
            if z.norm() > radius + 2.0 * h0 {
                return Err(WebError::Trace("escaped the clipping disc".into()));
            }
        }
    }
    Err(WebError::Trace("step budget exhausted".into()))
}

/// Point where the segment `a → b` crosses the circle `|z| = r`
/// (`|a| < r ≤ |b|`), by bisection on the segment parameter.
fn circle_crossing(a: Complex64, b: Complex64, r: f64) -> Complex64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let p = a + (b - a) * mid;
        if p.norm() < r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p = a + (b - a) * (0.5 * (lo + hi));
    // project exactly onto the circle for stable downstream angles
    p / p.norm() * r
}

// ---------------------------------------------------------------------------
// node preparation
// ---------------------------------------------------------------------------

/// Everything known about the inner nodes before tracing: positions, kinds,
/// slot orders, and per-color ray angles.
struct NodePrep {
    nodes: Vec<WebNode>,
    /// per color: (web node index, position, ray angles ascending)
    color_nodes: [Vec<ColorNode>; 2],
}

struct ColorNode {
    node: usize,
    position: Complex64,
    /// ray angles, each paired with the slot index in `nodes[node].slots`
    rays: Vec<(f64, usize)>,
    /// Pin radius for the tracer: at least `merge_tol`, widened to dominate
    /// the blob where `|F| ≤ trace_tol · scale` cannot tell points from the
    /// curve (the corrector accepts anything inside that blob, so slot
    /// bookkeeping must not rely on geometry there).
    pin_radius: f64,
}

/// Refuse nodes whose acceptance blob outgrows this many merge tolerances:
/// the pin disc would swallow the local geometry.
const PIN_BUDGET: f64 = 20.0;

fn color_idx(c: Color) -> usize {
    match c {
        Color::Re => 0,
        Color::Im => 1,
    }
}

/// Ambiguity band for deciding whether a critical point lies on a zero set:
/// approach distance below `ON_BAND · merge_tol` counts as on-set, between
/// the two factors is refused as non-generic, above `OFF_BAND · merge_tol`
/// is clearly off-set.
const ON_BAND: f64 = 0.35;
const OFF_BAND: f64 = 3.0;

fn prepare_nodes(p: &MonicPolynomial, radius: f64, params: &TraceParams) -> Result<NodePrep, WebError> {
    let merge_tol = params.merge_tol(radius);
    let tol_f = params.trace_tol * radius.powi(p.degree() as i32).max(1.0);
    let pin_from_blob = |blob: f64, at: Complex64| -> Result<f64, WebError> {
        let pin = merge_tol.max(2.0 * blob);
        if pin > PIN_BUDGET * merge_tol {
            return Err(WebError::NonGeneric(format!(
                "acceptance blob of {blob:.4e} at ({:.6}, {:.6}) exceeds the pin budget",
                at.re, at.im
            )));
        }
        Ok(pin)
    };

    let roots = p.roots(1e-12)?;
    for w in roots.windows(2) {
        if w[0] == w[1] {
            return Err(WebError::NonGeneric(format!(
                "multiple root near ({:.6}, {:.6})",
                w[0].re, w[0].im
            )));
        }
    }
    let crits = p.critical_points(1e-12)?;
    for w in crits.windows(2) {
        if w[0] == w[1] {
            return Err(WebError::NonGeneric(format!(
                "degenerate critical point near ({:.6}, {:.6})",
                w[0].re, w[0].im
            )));
        }
    }

    let mut nodes: Vec<WebNode> = Vec::new();
    let mut color_nodes: [Vec<ColorNode>; 2] = [Vec::new(), Vec::new()];

    for &r in &roots {
        let dp = p.derivative_at(r);
        // Effectively-zero guard only: near-multiple roots are refused by
        // the pairwise node-separation check below.
        if dp.norm() < 1e-12 * radius {
            return Err(WebError::NonGeneric(format!(
                "derivative vanishes at root ({:.6}, {:.6})",
                r.re, r.im
            )));
        }
        let alpha = dp.arg();
        // Re rays solve cos(θ + α) = 0, Im rays solve sin(θ + α) = 0.
        let re_rays = [wrap_angle(std::f64::consts::FRAC_PI_2 - alpha), wrap_angle(1.5 * std::f64::consts::PI - alpha)];
        let im_rays = [wrap_angle(-alpha), wrap_angle(std::f64::consts::PI - alpha)];
        let mut slots: Vec<NodeSlot> = re_rays
            .iter()
            .map(|&a| NodeSlot { angle: a, color: Color::Re })
            .chain(im_rays.iter().map(|&a| NodeSlot { angle: a, color: Color::Im }))
            .collect();
        slots.sort_by(|a, b| a.angle.partial_cmp(&b.angle).unwrap());
        let node_idx = nodes.len();
        // Both harmonic parts grow linearly off a simple root, gradient
        // magnitude |P'(r)|, so the acceptance blob has radius tol/|P'|.
        let pin = pin_from_blob(tol_f / dp.norm(), r)?;
        for color in [Color::Re, Color::Im] {
            let rays = slots
                .iter()
                .enumerate()
                .filter(|(_, s)| s.color == color)
                .map(|(i, s)| (s.angle, i))
                .collect();
            color_nodes[color_idx(color)].push(ColorNode {
                node: node_idx,
                position: r,
                rays,
                pin_radius: pin,
            });
        }
        nodes.push(WebNode {
            position: r,
            kind: NodeKind::Root,
            slots,
        });
    }

    for &c in &crits {
        let value = p.evaluate(c);
        let hess = p.second_derivative_at(c);
        if hess.norm() < 1e-12 * radius {
            return Err(WebError::NonGeneric(format!(
                "flat critical point at ({:.6}, {:.6})",
                c.re, c.im
            )));
        }
        // Local model F ≈ F(c) + Re/Im of (P''(c)/2)(z-c)^2: the zero set
        // approaches to distance sqrt(2|F(c)| / |P''(c)|).
        for color in [Color::Re, Color::Im] {
            let v = match color {
                Color::Re => value.re,
                Color::Im => value.im,
            };
            let approach = (2.0 * v.abs() / hess.norm()).sqrt();
            if approach <= ON_BAND * merge_tol {
                // Quadratic model (P''(c)/2)(z-c)²: the chosen harmonic part
                // vanishes along four rays spaced π/2 apart.
                let alpha = (hess / 2.0).arg();
                let offset = match color {
                    Color::Re => std::f64::consts::FRAC_PI_2,
                    Color::Im => 0.0,
                };
                let mut rays: Vec<f64> = (0..4)
                    .map(|j| wrap_angle((offset + j as f64 * std::f64::consts::PI - alpha) / 2.0))
                    .collect();
                rays.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let slots: Vec<NodeSlot> = rays
                    .iter()
                    .map(|&a| NodeSlot { angle: a, color })
                    .collect();
                let node_idx = nodes.len();
                // Quadratic growth off the crossing: the blob where the
                // harmonic part stays under tol has radius
                // sqrt(2 (tol + |v|) / |P''|).
                let blob = (2.0 * (tol_f + v.abs()) / hess.norm()).sqrt();
                let pin = pin_from_blob(blob, c)?;
                color_nodes[color_idx(color)].push(ColorNode {
                    node: node_idx,
                    position: c,
                    rays: slots.iter().enumerate().map(|(i, s)| (s.angle, i)).collect(),
                    pin_radius: pin,
                });
                nodes.push(WebNode {
                    position: c,
                    kind: NodeKind::Critical,
                    slots,
                });
            } else if approach < OFF_BAND * merge_tol {
                return Err(WebError::NonGeneric(format!(
                    "critical value of {} part in ambiguity band at ({:.6}, {:.6})",
                    color_tag(color),
                    c.re,
                    c.im
                )));
            }
        }
    }

    // Genericity: all nodes pairwise separated.
    for i in 0..nodes.len() {
        for j in (i + 1)..nodes.len() {
            let d = (nodes[i].position - nodes[j].position).norm();
            if d < 10.0 * merge_tol {
                return Err(WebError::NonGeneric(format!(
                    "nodes at distance {d:.3e} below {:.3e}",
                    10.0 * merge_tol
                )));
            }
        }
    }

    Ok(NodePrep { nodes, color_nodes })
}

fn wrap_angle(a: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut x = a % tau;
    if x < 0.0 {
        x += tau;
    }
    x
}

/// Absolute circular distance in `[0, π]`.
fn ang_dist(a: f64, b: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut d = (a - b).abs() % tau;
    if d > std::f64::consts::PI {
        d = tau - d;
    }
    d
}

// ---------------------------------------------------------------------------
// full web extraction
// ---------------------------------------------------------------------------

/// Traces the full web of `P` inside the disc of radius
/// `cauchy_radius(P) + 1`.
///
/// Every boundary leaf and every node slot is traced once; each curve is
/// therefore found twice (once from each endpoint) and the two traversals
/// must agree, which catches mis-traces. Refuses near-degenerate inputs
/// (multiple roots, critical values inside the ambiguity band, nodes closer
/// than ten pin radii) rather than guessing.
pub fn extract_web(p: &MonicPolynomial, params: &TraceParams) -> Result<Web, WebError> {
    let n = p.degree();
    let radius = p.cauchy_radius() + 1.0;
    let leaf_list = leaves(p, radius)?;
    let prep = prepare_nodes(p, radius, params)?;
    let (re, im) = p.harmonic_parts();
    let geoms = [FGeom::new(re, radius), FGeom::new(im, radius)];
    let merge_tol = params.merge_tol(radius);

    // positions and pin radii per color for the tracer
    let node_positions: [Vec<Complex64>; 2] = [
        prep.color_nodes[0].iter().map(|cn| cn.position).collect(),
        prep.color_nodes[1].iter().map(|cn| cn.position).collect(),
    ];
    let node_pins: [Vec<f64>; 2] = [
        prep.color_nodes[0].iter().map(|cn| cn.pin_radius).collect(),
        prep.color_nodes[1].iter().map(|cn| cn.pin_radius).collect(),
    ];

    let mut routes: HashMap<CurveEnd, (CurveEnd, Vec<Complex64>)> = HashMap::new();

    let classify_stop = |color: Color, stop: &TraceStop| -> Result<CurveEnd, WebError> {
        let ci = color_idx(color);
        match stop {
            TraceStop::Boundary { angle } => {
                let mut best: Option<(f64, usize)> = None;
                for leaf in leaf_list.iter().filter(|l| l.color == color) {
                    let d = ang_dist(*angle, leaf.angle);
                    if best.map_or(true, |(bd, _)| d < bd) {
                        best = Some((d, leaf.index));
                    }
                }
                let (d, idx) = best.ok_or_else(|| WebError::Trace("no leaves of color".into()))?;
                let half_gap = std::f64::consts::PI / (2.0 * n as f64);
                if d > half_gap {
                    return Err(WebError::Trace(format!(
                        "boundary exit at angle {angle:.6} matches no {} leaf",
                        color_tag(color)
                    )));
                }
                Ok(CurveEnd::Leaf(idx))
            }
            TraceStop::Node { index, approach_angle } => {
                let cn = &prep.color_nodes[ci][*index];
                let mut best: Option<(f64, usize)> = None;
                for &(ray, slot) in &cn.rays {
                    let d = ang_dist(*approach_angle, ray);
                    if best.map_or(true, |(bd, _)| d < bd) {
                        best = Some((d, slot));
                    }
                }
                let (d, slot) = best.unwrap();
                // same-color rays are at least π/2 apart at these nodes
                if d > 0.45 * std::f64::consts::FRAC_PI_2 {
                    return Err(WebError::Trace(format!(
                        "node approach angle {approach_angle:.4} matches no ray (off by {d:.4})"
                    )));
                }
                Ok(CurveEnd::Node { node: cn.node, slot })
            }
        }
    };

    // trace from every leaf inward
    for leaf in &leaf_list {
        let ci = color_idx(leaf.color);
        let start = leaf.position(radius);
        let geom = &geoms[ci];
        let g = geom.gradient(start);
        if g.norm() == 0.0 {
            return Err(WebError::Trace("vanishing gradient at leaf".into()));
        }
        let tangent = Complex64::new(-g.im, g.re) / g.norm();
        let radial = start / radius;
        let dir = if tangent.re * radial.re + tangent.im * radial.im > 0.0 {
            -tangent
        } else {
            tangent
        };
        let outcome = trace_from(
            geom,
            start,
            dir,
            radius,
            &node_positions[ci],
            &node_pins[ci],
            None,
            params,
        )
        .map_err(|e| WebError::Trace(format!("from leaf {}: {e}", leaf.index)))?;
        let target = classify_stop(leaf.color, &outcome.stop)?;
        routes.insert(CurveEnd::Leaf(leaf.index), (target, outcome.points));
    }

    // trace from every node slot outward
    for color in [Color::Re, Color::Im] {
        let ci = color_idx(color);
        let geom = &geoms[ci];
        for (local_idx, cn) in prep.color_nodes[ci].iter().enumerate() {
            for &(ray, slot) in &cn.rays {
                let dir = Complex64::from_polar(1.0, ray);
                let launch = (3.0 * merge_tol).max(1.5 * cn.pin_radius);
                let mut start = cn.position + dir * launch;
                // settle onto the curve before walking
                for _ in 0..12 {
                    let fv = geom.value(start);
                    if fv.abs() <= params.trace_tol * geom.scale {
                        break;
                    }
                    let g = geom.gradient(start);
                    let g2 = g.norm_sqr();
                    if g2 == 0.0 {
                        break;
                    }
                    start -= g * (fv / g2);
                }
                let outcome = trace_from(
                    geom,
                    start,
                    dir,
                    radius,
                    &node_positions[ci],
                    &node_pins[ci],
                    Some(local_idx),
                    params,
                )
                .map_err(|e| {
                    WebError::Trace(format!("from node {} slot {slot}: {e}", cn.node))
                })?;
                let target = classify_stop(color, &outcome.stop)?;
                let source = CurveEnd::Node { node: cn.node, slot };
                if target == source {
                    return Err(WebError::Trace("segment loops back to its own slot".into()));
                }
                let mut points = outcome.points;
                points.insert(0, cn.position);
                routes.insert(source, (target, points));
            }
        }
    }

    // cross-validate the double coverage and keep one polyline per segment
    let mut curves: Vec<TracedCurve> = Vec::new();
    for (source, (target, points)) in routes.iter() {
        match routes.get(target) {
            None => {
                return Err(WebError::Trace(format!(
                    "missing reverse trace for {} -> {}",
                    end_tag(*source),
                    end_tag(*target)
                )))
            }
            Some((back, _)) if back != source => {
                return Err(WebError::Trace(format!(
                    "trace mismatch: {} -> {} but {} -> {}",
                    end_tag(*source),
                    end_tag(*target),
                    end_tag(*target),
                    end_tag(*back)
                )))
            }
            Some(_) => {}
        }
        if source < target {
            let color = end_color(*source, &leaf_list, &prep.nodes);
            debug_assert_eq!(color, end_color(*target, &leaf_list, &prep.nodes));
            curves.push(TracedCurve {
                color,
                ends: (*source, *target),
                points: points.clone(),
            });
        }
    }
    curves.sort_by_key(|c| c.ends);

    let web = Web {
        degree: n,
        radius,
        leaves: leaf_list,
        nodes: prep.nodes,
        curves,
    };
    validate_web(&web)?;
    Ok(web)
}

fn end_color(end: CurveEnd, leaf_list: &[Leaf], nodes: &[WebNode]) -> Color {
    match end {
        CurveEnd::Leaf(i) => leaf_list[i].color,
        CurveEnd::Node { node, slot } => nodes[node].slots[slot].color,
    }
}

/// Structural invariants shared by both extraction paths.
fn validate_web(web: &Web) -> Result<(), WebError> {
    let n = web.degree;
    if web.leaves.len() != 4 * n {
        return Err(WebError::Trace(format!(
            "expected {} leaves, found {}",
            4 * n,
            web.leaves.len()
        )));
    }
    // every leaf and every node slot used exactly once
    let mut leaf_seen = vec![0usize; web.leaves.len()];
    let mut slot_seen: Vec<Vec<usize>> = web.nodes.iter().map(|nd| vec![0; nd.slots.len()]).collect();
    for curve in &web.curves {
        for end in [curve.ends.0, curve.ends.1] {
            match end {
                CurveEnd::Leaf(i) => leaf_seen[i] += 1,
                CurveEnd::Node { node, slot } => slot_seen[node][slot] += 1,
            }
            if end_color(end, &web.leaves, &web.nodes) != curve.color {
                return Err(WebError::Trace("curve color disagrees with its attachment".into()));
            }
        }
    }
    if let Some(i) = leaf_seen.iter().position(|&c| c != 1) {
        return Err(WebError::Trace(format!(
            "leaf {i} used {} times",
            leaf_seen[i]
        )));
    }
    for (ni, counts) in slot_seen.iter().enumerate() {
        if let Some(si) = counts.iter().position(|&c| c != 1) {
            return Err(WebError::Trace(format!(
                "node {ni} slot {si} used {} times",
                counts[si]
            )));
        }
    }
    // node valencies and alternation at roots
    for node in &web.nodes {
        if node.slots.len() < 4 || node.slots.len() % 2 != 0 {
            return Err(WebError::Trace("inner node with invalid valency".into()));
        }
        if node.kind == NodeKind::Root {
            if node.slots.len() != 4 {
                return Err(WebError::Trace("root node valency is not 4".into()));
            }
            for i in 0..4 {
                if node.slots[i].color == node.slots[(i + 1) % 4].color {
                    return Err(WebError::Trace("root slot colors do not alternate".into()));
                }
            }
        }
    }
    // per-color acyclicity: vertices = leaves then nodes
    for color in [Color::Re, Color::Im] {
        let offset = web.leaves.len();
        let mut uf = crate::util::UnionFind::new(offset + web.nodes.len());
        for curve in web.curves.iter().filter(|c| c.color == color) {
            let vid = |e: CurveEnd| match e {
                CurveEnd::Leaf(i) => i,
                CurveEnd::Node { node, .. } => offset + node,
            };
            let (a, b) = (vid(curve.ends.0), vid(curve.ends.1));
            if uf.find(a) == uf.find(b) {
                return Err(WebError::Trace(format!(
                    "cycle in the {} family",
                    color_tag(color)
                )));
            }
            uf.union(a, b);
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// sign-grid oracle
// ---------------------------------------------------------------------------

/// Rebuilds the web from a marching-squares pass over sign grids of the two
/// harmonic parts, with node neighbourhoods excluded from the march and
/// reattached by incidence angle. Saddle-ambiguous cells are resolved by an
/// exact centre evaluation. Entirely independent of the curve tracer.
pub fn sign_grid_oracle(
    p: &MonicPolynomial,
    resolution: usize,
    params: &TraceParams,
) -> Result<Web, WebError> {
    if resolution < 64 {
        return Err(WebError::Oracle(format!(
            "resolution {resolution} below minimum 64"
        )));
    }
    let n = p.degree();
    let radius = p.cauchy_radius() + 1.0;
    let leaf_list = leaves(p, radius)?;
    let prep = prepare_nodes(p, radius, params)?;
    let (re, im) = p.harmonic_parts();
    let geoms = [FGeom::new(re, radius), FGeom::new(im, radius)];

    // Resolution must separate node neighbourhoods; refine as needed.
    let mut min_sep = f64::INFINITY;
    for ci in 0..2 {
        let list = &prep.color_nodes[ci];
        for i in 0..list.len() {
            for j in (i + 1)..list.len() {
                min_sep = min_sep.min((list[i].position - list[j].position).norm());
            }
        }
    }
    let mut res = resolution;
    if min_sep.is_finite() {
        let needed = (2.0 * radius / (min_sep / 16.0)).ceil() as usize;
        res = res.max(needed);
    }
    if res > 4096 {
        return Err(WebError::Oracle(format!(
            "grid resolution {res} required to separate nodes exceeds limit"
        )));
    }

    let mut curves: Vec<TracedCurve> = Vec::new();
    for color in [Color::Re, Color::Im] {
        let ci = color_idx(color);
        let some = march_one_color(
            &geoms[ci],
            color,
            res,
            radius,
            &prep.color_nodes[ci],
            &leaf_list,
            n,
            params.merge_tol(radius),
        )?;
        curves.extend(some);
    }
    curves.sort_by_key(|c| c.ends);

    let web = Web {
        degree: n,
        radius,
        leaves: leaf_list,
        nodes: prep.nodes,
        curves,
    };
    validate_web(&web).map_err(|e| WebError::Oracle(format!("invalid oracle web: {e}")))?;
    Ok(web)
}

/// Crossing-point key on the grid: (ix, iy, axis) for the edge from grid
/// point (ix, iy) toward +x (axis 0) or +y (axis 1).
type EdgeKey = (usize, usize, u8);

#[allow(clippy::too_many_arguments)]
fn march_one_color(
    geom: &FGeom,
    color: Color,
    res: usize,
    radius: f64,
    color_nodes: &[ColorNode],
    leaf_list: &[Leaf],
    degree: usize,
    merge_tol: f64,
) -> Result<Vec<TracedCurve>, WebError> {
    let cell = 2.0 * radius / res as f64;
    let coord = |i: usize| -radius + i as f64 * cell;
    // Node exclusion radius: enough cells to break every incident strand,
    // and at least the pin scale so near-node hyperbola shoulders detach.
    let r_node = (2.5 * cell).max(2.0 * merge_tol);

    // grid values and signs (exact zeros count as positive)
    let mut values = vec![0.0f64; (res + 1) * (res + 1)];
    for iy in 0..=res {
        let y = coord(iy);
        for ix in 0..=res {
            values[iy * (res + 1) + ix] = geom.f.eval(coord(ix), y);
        }
    }
    let positive = |ix: usize, iy: usize| values[iy * (res + 1) + ix] >= 0.0;

    // excluded cells: any corner within r_node of a node of this color
    let excluded = |ix: usize, iy: usize| -> bool {
        let (x0, y0) = (coord(ix), coord(iy));
        let (x1, y1) = (x0 + cell, y0 + cell);
        color_nodes.iter().any(|cn| {
            let cx = cn.position.re.clamp(x0, x1);
            let cy = cn.position.im.clamp(y0, y1);
            Complex64::new(cx - cn.position.re, cy - cn.position.im).norm() <= r_node
        })
    };

    // crossing point on a grid edge with a sign change
    let crossing = |a_ix: usize, a_iy: usize, b_ix: usize, b_iy: usize| -> Complex64 {
        let va = values[a_iy * (res + 1) + a_ix];
        let vb = values[b_iy * (res + 1) + b_ix];
        let t = if (vb - va).abs() < 1e-300 { 0.5 } else { (0.0 - va) / (vb - va) };
        let t = t.clamp(0.0, 1.0);
        Complex64::new(
            coord(a_ix) + (coord(b_ix) - coord(a_ix)) * t,
            coord(a_iy) + (coord(b_iy) - coord(a_iy)) * t,
        )
    };

    // collect marching-squares segments between edge keys
    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for iy in 0..res {
        for ix in 0..res {
            if excluded(ix, iy) {
                continue;
            }
            // corners: 1=bottom-left, 2=bottom-right, 4=top-right, 8=top-left
            let bl = positive(ix, iy) as u8;
            let br = positive(ix + 1, iy) as u8;
            let tr = positive(ix + 1, iy + 1) as u8;
            let tl = positive(ix, iy + 1) as u8;
            let pattern = bl | (br << 1) | (tr << 2) | (tl << 3);
            if pattern == 0 || pattern == 15 {
                continue;
            }
            let bottom: EdgeKey = (ix, iy, 0);
            let top: EdgeKey = (ix, iy + 1, 0);
            let left: EdgeKey = (ix, iy, 1);
            let right: EdgeKey = (ix + 1, iy, 1);
            let mut push = |a: EdgeKey, b: EdgeKey| segments.push((a, b));
            match pattern {
                1 | 14 => push(left, bottom),
                2 | 13 => push(bottom, right),
                4 | 11 => push(right, top),
                8 | 7 => push(top, left),
                3 | 12 => push(left, right),
                6 | 9 => push(bottom, top),
                5 | 10 => {
                    // saddle: the exact centre value decides the pairing
                    let cx = coord(ix) + 0.5 * cell;
                    let cy = coord(iy) + 0.5 * cell;
                    let cv = geom.f.eval(cx, cy);
                    if cv.abs() <= 1e-13 * geom.scale {
                        return Err(WebError::Oracle(format!(
                            "ambiguous saddle cell at ({cx:.6}, {cy:.6}) unresolved"
                        )));
                    }
                    // When the centre sign differs from the bottom-left
                    // corner, the two strands hug the bl and tr corners;
                    // otherwise they hug br and tl.
                    if (cv > 0.0) != (bl == 1) {
                        push(left, bottom);
                        push(right, top);
                    } else {
                        push(bottom, right);
                        push(top, left);
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    // chain segments into polylines
    let mut adjacency: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (si, &(a, b)) in segments.iter().enumerate() {
        adjacency.entry(a).or_default().push(si);
        adjacency.entry(b).or_default().push(si);
    }
    for (key, segs) in &adjacency {
        if segs.len() > 2 {
            return Err(WebError::Oracle(format!(
                "crossing point {key:?} belongs to {} segments",
                segs.len()
            )));
        }
    }
    let mut used = vec![false; segments.len()];
    let mut chains: Vec<Vec<EdgeKey>> = Vec::new();
    // open chains start at degree-1 points
    let mut endpoints: Vec<EdgeKey> = adjacency
        .iter()
        .filter(|(_, s)| s.len() == 1)
        .map(|(k, _)| *k)
        .collect();
    endpoints.sort();
    for start in endpoints {
        let first_seg = adjacency[&start][0];
        if used[first_seg] {
            continue;
        }
        let mut chain = vec![start];
        let mut here = start;
        let mut seg = first_seg;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == here { b } else { a };
            chain.push(next);
            here = next;
            match adjacency[&here].iter().find(|&&s| !used[s]) {
                Some(&s) => seg = s,
                None => break,
            }
        }
        chains.push(chain);
    }
    if used.iter().any(|&u| !u) {
        return Err(WebError::Oracle(
            "closed contour found; harmonic zero sets have no compact components".into(),
        ));
    }

    // classify chain endpoints and clip to the circle
    let edge_point = |k: EdgeKey| -> Complex64 {
        match k.2 {
            0 => crossing(k.0, k.1, k.0 + 1, k.1),
            _ => crossing(k.0, k.1, k.0, k.1 + 1),
        }
    };
    let half_gap = std::f64::consts::PI / (2.0 * degree as f64);

    let mut out: Vec<TracedCurve> = Vec::new();
    let mut leaf_used: HashMap<usize, ()> = HashMap::new();
    let mut slot_used: HashMap<(usize, usize), ()> = HashMap::new();

    for chain in chains {
        let mut pts: Vec<Complex64> = chain.iter().map(|&k| edge_point(k)).collect();
        if pts.iter().all(|p| p.norm() >= radius) {
            continue; // clipped corner fragment outside the disc
        }
        // trim trailing/leading runs outside the circle down to one crossing
        let inside: Vec<bool> = pts.iter().map(|p| p.norm() < radius).collect();
        let first_in = inside.iter().position(|&b| b).unwrap();
        let last_in = inside.iter().rposition(|&b| b).unwrap();
        if inside[first_in..=last_in].iter().any(|&b| !b) {
            return Err(WebError::Oracle(
                "contour re-enters the clipping disc; unexpected tangency".into(),
            ));
        }

        let mut ends: Vec<CurveEnd> = Vec::new();
        // head endpoint
        let head_end = if first_in > 0 {
            let cross = circle_crossing(pts[first_in], pts[first_in - 1], radius);
            pts = pts[first_in..].to_vec();
            pts.insert(0, cross);
            match_leaf(cross.arg(), color, leaf_list, half_gap)?
        } else {
            pts = pts[first_in..].to_vec();
            match_node_end(pts[0], color_nodes, r_node, cell)?
        };
        ends.push(head_end);
        // tail endpoint (indices relative to the trimmed vector)
        let tail_excess = chain.len() - 1 - last_in;
        let tail_end = if tail_excess > 0 {
            let len = pts.len();
            let cross = circle_crossing(pts[len - 1 - tail_excess], pts[len - tail_excess], radius);
            pts.truncate(len - tail_excess);
            pts.push(cross);
            match_leaf(cross.arg(), color, leaf_list, half_gap)?
        } else {
            match_node_end(*pts.last().unwrap(), color_nodes, r_node, cell)?
        };
        ends.push(tail_end);

        // append exact node positions for node-attached ends
        if let CurveEnd::Node { node, .. } = ends[0] {
            let pos = color_nodes.iter().find(|cn| cn.node == node).unwrap().position;
            pts.insert(0, pos);
        }
        if let CurveEnd::Node { node, .. } = ends[1] {
            let pos = color_nodes.iter().find(|cn| cn.node == node).unwrap().position;
            pts.push(pos);
        }

        for &e in &ends {
            match e {
                CurveEnd::Leaf(i) => {
                    if leaf_used.insert(i, ()).is_some() {
                        return Err(WebError::Oracle(format!("leaf {i} attached twice")));
                    }
                }
                CurveEnd::Node { node, slot } => {
                    if slot_used.insert((node, slot), ()).is_some() {
                        return Err(WebError::Oracle(format!(
                            "node {node} slot {slot} attached twice"
                        )));
                    }
                }
            }
        }
        let (a, b) = (ends[0], ends[1]);
        let (ends, points) = if a <= b {
            ((a, b), pts)
        } else {
            let mut rev = pts;
            rev.reverse();
            ((b, a), rev)
        };
        out.push(TracedCurve { color, ends, points });
    }
    Ok(out)
}

fn match_leaf(
    angle: f64,
    color: Color,
    leaf_list: &[Leaf],
    half_gap: f64,
) -> Result<CurveEnd, WebError> {
    let mut best: Option<(f64, usize)> = None;
    for leaf in leaf_list.iter().filter(|l| l.color == color) {
        let d = ang_dist(angle, leaf.angle);
        if best.map_or(true, |(bd, _)| d < bd) {
            best = Some((d, leaf.index));
        }
    }
    match best {
        Some((d, idx)) if d <= half_gap => Ok(CurveEnd::Leaf(idx)),
        _ => Err(WebError::Oracle(format!(
            "boundary crossing at angle {angle:.6} matches no {} leaf",
            color_tag(color)
        ))),
    }
}

fn match_node_end(
    endpoint: Complex64,
    color_nodes: &[ColorNode],
    r_node: f64,
    cell: f64,
) -> Result<CurveEnd, WebError> {
    let mut best: Option<(f64, usize)> = None;
    for (i, cn) in color_nodes.iter().enumerate() {
        let d = (endpoint - cn.position).norm();
        if best.map_or(true, |(bd, _)| d < bd) {
            best = Some((d, i));
        }
    }
    let (d, i) = best.ok_or_else(|| {
        WebError::Oracle("contour endpoint with no candidate node".into())
    })?;
    if d > r_node + 3.0 * cell {
        return Err(WebError::Oracle(format!(
            "contour endpoint at distance {d:.4e} from the nearest node"
        )));
    }
    let cn = &color_nodes[i];
    let approach = (endpoint - cn.position).arg();
    let mut best_ray: Option<(f64, usize)> = None;
    for &(ray, slot) in &cn.rays {
        let dd = ang_dist(approach, ray);
        if best_ray.map_or(true, |(bd, _)| dd < bd) {
            best_ray = Some((dd, slot));
        }
    }
    let (dd, slot) = best_ray.unwrap();
    if dd > 0.45 * std::f64::consts::FRAC_PI_2 {
        return Err(WebError::Oracle(format!(
            "node approach angle off the nearest ray by {dd:.4}"
        )));
    }
    Ok(CurveEnd::Node { node: cn.node, slot })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn poly(coeffs: &[(f64, f64)]) -> MonicPolynomial {
        MonicPolynomial::new(coeffs.iter().map(|&(re, im)| c(re, im)).collect()).unwrap()
    }

    #[test]
    fn slot_colors_alternate() {
        assert_eq!(slot_color(0), Color::Im);
        assert_eq!(slot_color(1), Color::Re);
        assert_eq!(slot_color(7), Color::Re);
    }

    #[test]
    fn leaves_of_identity() {
        // P = z: Im leaves at angles {0, π}, Re leaves at {π/2, 3π/2}
        let p = poly(&[(0.0, 0.0)]);
        let ls = leaves(&p, 3.0).unwrap();
        assert_eq!(ls.len(), 4);
        let expected = [0.0, std::f64::consts::FRAC_PI_2, std::f64::consts::PI, 1.5 * std::f64::consts::PI];
        for (leaf, &want) in ls.iter().zip(expected.iter()) {
            assert!(ang_dist(leaf.angle, want) < 1e-12, "leaf {} at {}", leaf.index, leaf.angle);
        }
        assert_eq!(ls[0].color, Color::Im);
        assert_eq!(ls[1].color, Color::Re);
    }

    #[test]
    fn leaves_count_and_interleave_for_degree_two() {
        let p = poly(&[(0.0, 1.0), (0.0, 0.0)]); // z^2 + i
        let r = p.cauchy_radius() + 1.0;
        let ls = leaves(&p, r).unwrap();
        assert_eq!(ls.len(), 8);
        for w in ls.windows(2) {
            assert!(w[0].angle < w[1].angle, "angles ascending");
            assert_ne!(w[0].color, w[1].color, "colors alternate");
        }
    }

    #[test]
    fn refined_leaf_deviation_is_second_order_in_radius() {
        // z^2 - 1 at R = 3: Re P = R² cos 2θ - 1 = 0 near π/4 gives the
        // closed form θ = acos(1/9)/2.
        let p = poly(&[(-1.0, 0.0), (0.0, 0.0)]);
        let ls = leaves(&p, 3.0).unwrap();
        let re_leaf = &ls[1];
        let expected = 0.5 * (1.0f64 / 9.0).acos();
        assert!(
            (re_leaf.angle - expected).abs() < 1e-10,
            "got {}, closed form {}",
            re_leaf.angle,
            expected
        );
        let deviation = (re_leaf.angle - std::f64::consts::FRAC_PI_4).abs();
        assert!(deviation < 1.0 / (3.0f64 * 3.0), "O(1/R²) deviation, got {deviation}");
    }

    #[test]
    fn trace_straight_line() {
        // F = x (re part of z): from (0, R) the curve runs to (0, -R).
        let p = poly(&[(0.0, 0.0)]);
        let (re, _) = p.harmonic_parts();
        let out = trace_curve(&re, c(0.0, 3.0), 3.0, &[], &TraceParams::default()).unwrap();
        match out.stop {
            TraceStop::Boundary { angle } => {
                assert!(ang_dist(angle, -std::f64::consts::FRAC_PI_2) < 1e-6)
            }
            other => panic!("expected boundary stop, got {other:?}"),
        }
        for pt in &out.points {
            assert!(pt.re.abs() < 1e-9, "stays on the axis: {pt}");
        }
    }

    #[test]
    fn trace_through_origin_without_declared_nodes() {
        // F = 2xy (im part of z²), start on the positive x-axis: with no
        // nodes declared the walk passes the origin and exits at angle π.
        let p = poly(&[(0.0, 0.0), (0.0, 0.0)]); // z^2
        let (_, im) = p.harmonic_parts();
        let out = trace_curve(&im, c(2.0, 0.0), 2.0, &[], &TraceParams::default()).unwrap();
        match out.stop {
            TraceStop::Boundary { angle } => {
                assert!(ang_dist(angle, std::f64::consts::PI) < 1e-6)
            }
            other => panic!("expected boundary stop, got {other:?}"),
        }
    }

    #[test]
    fn trace_stops_at_declared_node() {
        let p = poly(&[(0.0, 0.0), (0.0, 0.0)]); // z^2, im part = 2xy
        let (_, im) = p.harmonic_parts();
        let out = trace_curve(&im, c(2.0, 0.0), 2.0, &[c(0.0, 0.0)], &TraceParams::default()).unwrap();
        match out.stop {
            TraceStop::Node { index: 0, approach_angle } => {
                assert!(ang_dist(approach_angle, 0.0) < 0.1);
            }
            other => panic!("expected node stop, got {other:?}"),
        }
    }

    fn ends_set(web: &Web) -> Vec<(CurveEnd, CurveEnd)> {
        let mut v: Vec<_> = web.curves.iter().map(|c| c.ends).collect();
        v.sort();
        v
    }

    #[test]
    fn web_of_linear_polynomial() {
        // z - c: four leaf-to-node segments around one 4-valent root.
        let p = poly(&[(-0.3, -0.2)]); // root at 0.3 + 0.2i
        let web = extract_web(&p, &TraceParams::default()).unwrap();
        assert_eq!(web.leaves.len(), 4);
        assert_eq!(web.nodes.len(), 1);
        assert_eq!(web.nodes[0].kind, NodeKind::Root);
        assert!((web.nodes[0].position - c(0.3, 0.2)).norm() < 1e-9);
        assert_eq!(web.nodes[0].slots.len(), 4);
        assert_eq!(web.curves.len(), 4);
        for curve in &web.curves {
            assert!(matches!(curve.ends.0, CurveEnd::Leaf(_)));
            assert!(matches!(curve.ends.1, CurveEnd::Node { .. }));
        }
    }

    #[test]
    fn web_of_z_squared_minus_one() {
        // Roots ±1, critical point 0 on the Im zero set only.
        let p = poly(&[(-1.0, 0.0), (0.0, 0.0)]);
        let web = extract_web(&p, &TraceParams::default()).unwrap();
        assert_eq!(web.leaves.len(), 8);
        assert_eq!(web.nodes.len(), 3);
        let roots: Vec<_> = web.nodes.iter().filter(|n| n.kind == NodeKind::Root).collect();
        let crits: Vec<_> = web.nodes.iter().filter(|n| n.kind == NodeKind::Critical).collect();
        assert_eq!(roots.len(), 2);
        assert_eq!(crits.len(), 1);
        assert!(crits[0].position.norm() < 1e-9);
        assert!(crits[0].slots.iter().all(|s| s.color == Color::Im));
        assert_eq!(web.curves.len(), 10);
        let im_count = web.curves.iter().filter(|c| c.color == Color::Im).count();
        assert_eq!(im_count, 6);
    }

    #[test]
    fn degenerate_inputs_are_refused() {
        // z^3 - 1 has a double critical point at 0 on the Im zero set.
        let p = poly(&[(-1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        match extract_web(&p, &TraceParams::default()) {
            Err(WebError::NonGeneric(_)) => {}
            other => panic!("expected non-generic refusal, got {other:?}"),
        }
        // (z-1)²(z+2) has a multiple root.
        let q = MonicPolynomial::from_roots(&[c(1.0, 0.0), c(1.0, 0.0), c(-2.0, 0.0)]).unwrap();
        match extract_web(&q, &TraceParams::default()) {
            Err(WebError::NonGeneric(_)) => {}
            other => panic!("expected non-generic refusal, got {other:?}"),
        }
    }

    #[test]
    fn rotation_by_pi_preserves_degree_two_nodes() {
        // Web of z² - 1: node positions are symmetric under z ↦ -z.
        let p = poly(&[(-1.0, 0.0), (0.0, 0.0)]);
        let web = extract_web(&p, &TraceParams::default()).unwrap();
        for node in &web.nodes {
            let neg = -node.position;
            assert!(
                web.nodes.iter().any(|m| (m.position - neg).norm() < 1e-7),
                "no mirror node for {}",
                node.position
            );
        }
    }

    #[test]
    fn oracle_matches_tracer_on_identity() {
        let p = poly(&[(0.0, 0.0)]); // z
        let traced = extract_web(&p, &TraceParams::default()).unwrap();
        let grid = sign_grid_oracle(&p, 64, &TraceParams::default()).unwrap();
        assert_eq!(grid.nodes.len(), 1);
        assert_eq!(ends_set(&traced), ends_set(&grid));
        // the two straight zero lines produce straight polylines
        for curve in &grid.curves {
            let (a, b) = (curve.points[0], *curve.points.last().unwrap());
            for p in &curve.points {
                let cross = (b - a).re * (p - a).im - (b - a).im * (p - a).re;
                assert!(cross.abs() < 1e-6 * (b - a).norm(), "straightness violated");
            }
        }
    }

    #[test]
    fn oracle_matches_tracer_on_z_squared_minus_one() {
        let p = poly(&[(-1.0, 0.0), (0.0, 0.0)]);
        let traced = extract_web(&p, &TraceParams::default()).unwrap();
        let grid = sign_grid_oracle(&p, 128, &TraceParams::default()).unwrap();
        assert_eq!(ends_set(&traced), ends_set(&grid));
    }

    #[test]
    fn sampled_webs_extract_and_match_oracle() {
        let cfg = crate::sampling::SampleConfig::default();
        for seed in 0..6u64 {
            let degree = 3 + (seed as usize % 3);
            let p = crate::sampling::random_web_polynomial(degree, seed, &cfg);
            let web = extract_web(&p, &TraceParams::default())
                .unwrap_or_else(|e| panic!("seed {seed}: trace failed: {e}"));
            let grid = sign_grid_oracle(&p, 256, &TraceParams::default())
                .unwrap_or_else(|e| panic!("seed {seed}: oracle failed: {e}"));
            assert_eq!(ends_set(&web), ends_set(&grid), "seed {seed}");
            assert_eq!(web.leaves.len(), 4 * degree);
        }
    }

    #[test]
    fn web_dump_has_sections() {
        let p = poly(&[(0.0, 0.0)]);
        let web = extract_web(&p, &TraceParams::default()).unwrap();
        let dump = web.dump_text();
        assert!(dump.starts_with("LEAVES\n"));
        assert!(dump.contains("\nCURVES\n"));
        assert!(dump.contains("\nNODES\n"));
    }
}
