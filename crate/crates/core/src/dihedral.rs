//! The boundary dihedral action on polynomials and diagrams.
//!
//! The generator `s` sends `P(z)` to `i·P(e^{-iπ/2n} z)` — a rotation of
//! the web by one boundary slot, swapping the two colors — and `t` sends
//! `P` to the polynomial with conjugated coefficients — a reflection across
//! the real axis, preserving colors but reversing orientation. Both
//! preserve monicity on the nose.
//!
//! Elements are kept in the normal form `s^k t^e` with `k` mod `4n`. The
//! group these transformations actually generate on the colored boundary
//! slots is measured by closure and reported next to the nominal order
//! `4n`; the two are **not** silently reconciled when they differ.

use num_complex::Complex64;

use crate::diagram::{ChordDiagram, DiagramEdge, DiagramError, DiagramNode, EndRef};
use crate::poly::MonicPolynomial;
use crate::webtrace::{extract_web, TraceParams, WebError};
use crate::Color;

/// An element `s^k t^e` of the boundary action for degree `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DihedralElement {
    n: usize,
    shift: usize,
    reflect: bool,
}

impl DihedralElement {
    pub fn identity(n: usize) -> Self {
        DihedralElement {
            n,
            shift: 0,
            reflect: false,
        }
    }

    /// The rotation generator `s`.
    pub fn s(n: usize) -> Self {
        DihedralElement {
            n,
            shift: 1,
            reflect: false,
        }
    }

    /// The reflection generator `t`.
    pub fn t(n: usize) -> Self {
        DihedralElement {
            n,
            shift: 0,
            reflect: true,
        }
    }

    pub fn new(n: usize, shift: usize, reflect: bool) -> Self {
        DihedralElement {
            n,
            shift: shift % (4 * n),
            reflect,
        }
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn reflects(&self) -> bool {
        self.reflect
    }

    /// Group law in normal form: `t s = s^{-1} t`.
    pub fn compose(&self, other: &DihedralElement) -> DihedralElement {
        assert_eq!(self.n, other.n, "degree mismatch");
        let m = 4 * self.n;
        let shift = if self.reflect {
            (self.shift + m - other.shift % m) % m
        } else {
            (self.shift + other.shift) % m
        };
        DihedralElement {
            n: self.n,
            shift,
            reflect: self.reflect ^ other.reflect,
        }
    }

    pub fn inverse(&self) -> DihedralElement {
        let m = 4 * self.n;
        if self.reflect {
            // reflections are involutions
            *self
        } else {
            DihedralElement {
                n: self.n,
                shift: (m - self.shift) % m,
                reflect: false,
            }
        }
    }

    pub fn pow(&self, k: i64) -> DihedralElement {
        let mut acc = DihedralElement::identity(self.n);
        let base = if k >= 0 { *self } else { self.inverse() };
        for _ in 0..k.unsigned_abs() {
            acc = acc.compose(&base);
        }
        acc
    }

    /// Where boundary slot `k` is sent.
    pub fn apply_slot(&self, k: usize) -> usize {
        let m = 4 * self.n;
        let base = if self.reflect { (m - k % m) % m } else { k % m };
        (self.shift + base) % m
    }

    /// Whether this element exchanges the two colors (exactly when the slot
    /// shift is odd).
    pub fn swaps_colors(&self) -> bool {
        self.shift % 2 == 1
    }

    pub fn apply_color(&self, c: Color) -> Color {
        if self.swaps_colors() {
            c.flipped()
        } else {
            c
        }
    }

    /// The transformed polynomial. `s` maps coefficients by
    /// `a_k ↦ i·e^{-ikπ/2n}·a_k`; `t` conjugates them.
    pub fn apply_to_polynomial(&self, p: &MonicPolynomial) -> MonicPolynomial {
        assert_eq!(self.n, p.degree(), "degree mismatch");
        let mut coeffs: Vec<Complex64> = p.lower_coefficients().to_vec();
        if self.reflect {
            for c in coeffs.iter_mut() {
                *c = c.conj();
            }
        }
        if self.shift > 0 {
            // s^m: a_k ↦ i^m · e^{-ikmπ/2n} · a_k, applied in closed form
            let i_pow = match self.shift % 4 {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            };
            let step = -std::f64::consts::PI / (2.0 * self.n as f64) * self.shift as f64;
            for (k, c) in coeffs.iter_mut().enumerate() {
                *c *= i_pow * Complex64::from_polar(1.0, step * k as f64);
            }
        }
        MonicPolynomial::new(coeffs).expect("degree unchanged")
    }

    /// The transformed diagram: slots move by `k ± slot`, colors swap when
    /// the shift is odd, and a reflection reverses every cyclic order.
    pub fn apply_to_diagram(&self, d: &ChordDiagram) -> Result<ChordDiagram, DiagramError> {
        assert_eq!(self.n, d.degree(), "degree mismatch");
        let map_end = |end: EndRef| -> EndRef {
            match end {
                EndRef::Leaf(k) => EndRef::Leaf(self.apply_slot(k)),
                EndRef::NodeSlot { node, slot } => {
                    if self.reflect {
                        let v = d.nodes()[node].cyclic.len();
                        EndRef::NodeSlot {
                            node,
                            slot: v - 1 - slot,
                        }
                    } else {
                        EndRef::NodeSlot { node, slot }
                    }
                }
            }
        };
        let edges: Vec<DiagramEdge> = d
            .edges()
            .iter()
            .map(|e| DiagramEdge {
                color: self.apply_color(e.color),
                ends: [map_end(e.ends[0]), map_end(e.ends[1])],
            })
            .collect();
        let nodes: Vec<DiagramNode> = d
            .nodes()
            .iter()
            .map(|nd| {
                let cyclic = if self.reflect {
                    nd.cyclic.iter().rev().copied().collect()
                } else {
                    nd.cyclic.clone()
                };
                DiagramNode {
                    kind: nd.kind,
                    cyclic,
                }
            })
            .collect();
        ChordDiagram::new(d.degree(), nodes, edges)
    }
}

impl std::fmt::Display for DihedralElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "s^{} t^{}", self.shift, u8::from(self.reflect))
    }
}

/// Nominal order of the boundary group as stated for the action: `4n`.
pub fn nominal_group_order(n: usize) -> usize {
    4 * n
}

/// Order of the group actually generated by `s` and `t` on the colored
/// boundary slots, measured by closure over composition.
pub fn measured_group_order(n: usize) -> usize {
    let generators = [DihedralElement::s(n), DihedralElement::t(n)];
    crate::util::closure_by(DihedralElement::identity(n), &generators, |a, b| {
        a.compose(b)
    })
    .len()
}

/// Side-by-side report of the nominal and measured boundary group orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupOrderReport {
    pub n: usize,
    pub nominal: usize,
    pub measured: usize,
}

impl GroupOrderReport {
    pub fn compute(n: usize) -> Self {
        GroupOrderReport {
            n,
            nominal: nominal_group_order(n),
            measured: measured_group_order(n),
        }
    }

    pub fn matches(&self) -> bool {
        self.nominal == self.measured
    }
}

/// Checks `diagram(g·P) = g·diagram(P)` by canonical code, returning the
/// two codes for reporting.
pub fn check_equivariance(
    p: &MonicPolynomial,
    g: &DihedralElement,
    params: &TraceParams,
) -> Result<EquivarianceOutcome, WebError> {
    let transformed_poly = g.apply_to_polynomial(p);
    let web_of_transformed = extract_web(&transformed_poly, params)?;
    let web_of_original = extract_web(p, params)?;
    let d_transformed = crate::diagram::web_to_diagram(&web_of_transformed)
        .map_err(|e| WebError::Trace(format!("diagram of transformed input: {e}")))?;
    let d_original = crate::diagram::web_to_diagram(&web_of_original)
        .map_err(|e| WebError::Trace(format!("diagram of original input: {e}")))?;
    let d_acted = g
        .apply_to_diagram(&d_original)
        .map_err(|e| WebError::Trace(format!("action on diagram: {e}")))?;
    Ok(EquivarianceOutcome {
        lhs: d_transformed.canonical_form(),
        rhs: d_acted.canonical_form(),
    })
}

/// The two canonical codes whose equality expresses equivariance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivarianceOutcome {
    /// Code of the diagram traced from the transformed polynomial.
    pub lhs: crate::diagram::CanonicalCode,
    /// Code of the group element applied to the traced diagram.
    pub rhs: crate::diagram::CanonicalCode,
}

impl EquivarianceOutcome {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
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
    fn normal_form_relations() {
        let n = 3;
        let s = DihedralElement::s(n);
        let t = DihedralElement::t(n);
        assert_eq!(s.pow(4 * n as i64), DihedralElement::identity(n));
        assert_ne!(s.pow(2 * n as i64), DihedralElement::identity(n));
        assert_eq!(t.compose(&t), DihedralElement::identity(n));
        // t s t = s^{-1}
        assert_eq!(t.compose(&s).compose(&t), s.inverse());
        assert_eq!(format!("{}", s.compose(&t)), "s^1 t^1");
    }

    #[test]
    fn slot_action_is_a_group_action() {
        let n = 2;
        let g = DihedralElement::new(n, 3, true);
        let h = DihedralElement::new(n, 5, false);
        let gh = g.compose(&h);
        for k in 0..4 * n {
            assert_eq!(g.apply_slot(h.apply_slot(k)), gh.apply_slot(k));
        }
        let id = DihedralElement::identity(n);
        for k in 0..4 * n {
            assert_eq!(id.apply_slot(k), k);
        }
    }

    #[test]
    fn rotation_of_z_squared_minus_one() {
        // s·(z² - 1) = i·((e^{-iπ/4}z)² - 1) = z² - i
        let p = poly(&[(-1.0, 0.0), (0.0, 0.0)]);
        let q = DihedralElement::s(2).apply_to_polynomial(&p);
        let coeffs = q.lower_coefficients();
        assert!((coeffs[0] - c(0.0, -1.0)).norm() < 1e-12, "a0 = {}", coeffs[0]);
        assert!(coeffs[1].norm() < 1e-12);
    }

    #[test]
    fn half_turn_is_sign_alternation() {
        // s^{2n}·P = (-1)^n P(-z): coefficients pick up (-1)^{n+k}
        let p = poly(&[(0.3, 0.4), (-0.2, 0.1), (0.0, -0.7)]);
        let n = 3;
        let q = DihedralElement::s(n).pow(2 * n as i64).apply_to_polynomial(&p);
        for (k, (orig, got)) in p
            .lower_coefficients()
            .iter()
            .zip(q.lower_coefficients())
            .enumerate()
        {
            let sign = if (n + k) % 2 == 0 { 1.0 } else { -1.0 };
            assert!(
                (orig * sign - got).norm() < 1e-12,
                "coefficient {k}: {orig} vs {got}"
            );
        }
    }

    #[test]
    fn reflection_conjugates_coefficients() {
        let p = poly(&[(0.3, 0.4), (-0.2, 0.1)]);
        let q = DihedralElement::t(2).apply_to_polynomial(&p);
        for (orig, got) in p.lower_coefficients().iter().zip(q.lower_coefficients()) {
            assert_eq!(orig.conj(), *got);
        }
    }

    #[test]
    fn measured_group_is_twice_the_nominal_order() {
        for n in 1..=4 {
            let report = GroupOrderReport::compute(n);
            assert_eq!(report.nominal, 4 * n);
            assert_eq!(report.measured, 8 * n);
            assert!(!report.matches());
        }
    }

    #[test]
    fn rotation_equivariance_on_a_wall_polynomial() {
        let p = poly(&[(-1.0, 0.0), (0.0, 0.0)]);
        let out = check_equivariance(&p, &DihedralElement::s(2), &TraceParams::default()).unwrap();
        assert!(out.holds(), "lhs {} vs rhs {}", out.lhs, out.rhs);
    }

    #[test]
    fn equivariance_on_sampled_generic_polynomials() {
        let cfg = crate::sampling::SampleConfig::default();
        let params = TraceParams::default();
        for seed in 40..44u64 {
            let degree = 2 + (seed as usize % 3);
            let p = crate::sampling::random_web_polynomial(degree, seed, &cfg);
            for g in [
                DihedralElement::s(degree),
                DihedralElement::t(degree),
                DihedralElement::new(degree, 3, true),
            ] {
                let out = check_equivariance(&p, &g, &params)
                    .unwrap_or_else(|e| panic!("seed {seed}, g = {g}: {e}"));
                assert!(out.holds(), "seed {seed}, g = {g}");
            }
        }
    }

    #[test]
    fn action_composes_on_diagrams() {
        let p = poly(&[(0.7, 0.9), (0.0, 0.0)]);
        let web = extract_web(&p, &TraceParams::default()).unwrap();
        let d = crate::diagram::web_to_diagram(&web).unwrap();
        let g = DihedralElement::new(2, 2, true);
        let h = DihedralElement::new(2, 5, false);
        let lhs = g
            .apply_to_diagram(&h.apply_to_diagram(&d).unwrap())
            .unwrap();
        let rhs = g.compose(&h).apply_to_diagram(&d).unwrap();
        assert_eq!(lhs.canonical_form(), rhs.canonical_form());
    }
}
