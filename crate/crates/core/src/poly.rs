//! Monic complex polynomials: evaluation, roots, critical points, and the
//! real/imaginary harmonic parts as bivariate polynomials.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Largest supported degree. Root isolation quality and the curve-tracing
/// tolerances downstream are tuned for this range.
pub const MAX_DEGREE: usize = 12;

/// Relative distance below which two root approximations are treated as the
/// same root (multiplicity clustering).
pub const ROOT_CLUSTER_RTOL: f64 = 1e-6;

const ABERTH_BUDGET: usize = 200;
// Fixed seed for the initial-guess perturbation so that root output is a
// pure function of the coefficients.
const ABERTH_SEED: u64 = 0x5eed_ab34;

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("degree {0} outside supported range 1..={MAX_DEGREE}")]
    DegreeOutOfRange(usize),
    #[error("root iteration did not converge within {budget} sweeps (residual {residual:.3e})")]
    RootsDidNotConverge { budget: usize, residual: f64 },
}

/// A monic polynomial `z^n + a_{n-1} z^{n-1} + ... + a_0` over the complex
/// numbers. Only the lower coefficients are stored; the leading one is 1.
#[derive(Debug, Clone, PartialEq)]
pub struct MonicPolynomial {
    /// `coeffs[k]` is the coefficient of `z^k`, `k < n`.
    coeffs: Vec<Complex64>,
}

impl MonicPolynomial {
    /// Builds `z^n + coeffs[n-1] z^{n-1} + ... + coeffs[0]`.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self, PolyError> {
        let n = coeffs.len();
        if n == 0 || n > MAX_DEGREE {
            return Err(PolyError::DegreeOutOfRange(n));
        }
        Ok(MonicPolynomial { coeffs })
    }

    /// Expands `(z - r_1)...(z - r_n)`.
    pub fn from_roots(roots: &[Complex64]) -> Result<Self, PolyError> {
        if roots.is_empty() || roots.len() > MAX_DEGREE {
            return Err(PolyError::DegreeOutOfRange(roots.len()));
        }
        // full[k] is the z^k coefficient in ascending order, leading 1 included.
        let mut full = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); full.len() + 1];
            for (k, &q) in full.iter().enumerate() {
                next[k + 1] += q;
                next[k] -= r * q;
            }
            full = next;
        }
        full.pop(); // drop the leading 1
        Ok(MonicPolynomial { coeffs: full })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient of `z^k`; `k = n` yields 1.
    pub fn coefficient(&self, k: usize) -> Complex64 {
        if k == self.degree() {
            Complex64::new(1.0, 0.0)
        } else {
            self.coeffs[k]
        }
    }

    /// The stored lower coefficients `a_0 ..= a_{n-1}`.
    pub fn lower_coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Horner evaluation.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(1.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Coefficients of `P'` in ascending order (length `n`, leading `n`).
    pub fn derivative_coefficients(&self) -> Vec<Complex64> {
        let n = self.degree();
        let mut d = Vec::with_capacity(n);
        for k in 1..n {
            d.push(self.coeffs[k] * k as f64);
        }
        d.push(Complex64::new(n as f64, 0.0));
        d
    }

    pub fn derivative_at(&self, z: Complex64) -> Complex64 {
        eval_poly(&self.derivative_coefficients(), z)
    }

    pub fn second_derivative_at(&self, z: Complex64) -> Complex64 {
        let d1 = self.derivative_coefficients();
        let mut d2 = Vec::with_capacity(d1.len().saturating_sub(1));
        for (k, &c) in d1.iter().enumerate().skip(1) {
            d2.push(c * k as f64);
        }
        eval_poly(&d2, z)
    }

    /// `1 + max_k |a_k|`; every root of `P` (and by the Gauss–Lucas theorem
    /// every root of `P'`) has modulus strictly below this.
    pub fn cauchy_radius(&self) -> f64 {
        1.0 + self
            .coeffs
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// All roots with multiplicity, via the Aberth–Ehrlich simultaneous
    /// iteration. Near-coincident approximations (relative distance below
    /// [`ROOT_CLUSTER_RTOL`]) are merged and reported as repeated roots.
    /// Output is sorted by `(re, im)` and is deterministic.
    pub fn roots(&self, tol: f64) -> Result<Vec<Complex64>, PolyError> {
        let found = aberth(&self.coeffs, tol)?;
        Ok(cluster_roots(found))
    }

    /// Roots of `P'` (empty for degree 1). Multiplicities are reported the
    /// same way as in [`roots`](Self::roots).
    pub fn critical_points(&self, tol: f64) -> Result<Vec<Complex64>, PolyError> {
        let n = self.degree();
        if n == 1 {
            return Ok(Vec::new());
        }
        // Monic rescaling of P' = n z^{n-1} + ... : divide by n.
        let mut low = Vec::with_capacity(n - 1);
        for k in 1..n {
            low.push(self.coeffs[k] * (k as f64 / n as f64));
        }
        let found = aberth(&low, tol)?;
        Ok(cluster_roots(found))
    }

    /// Splits `P(x + iy)` into its real and imaginary parts as real
    /// bivariate polynomials `(Re P, Im P)`. Both are harmonic.
    pub fn harmonic_parts(&self) -> (BivariatePoly, BivariatePoly) {
        let n = self.degree();
        let mut sum = vec![vec![Complex64::new(0.0, 0.0); n + 1]; n + 1];
        // basis[j][k] holds the coefficient of x^j y^k in (x+iy)^m
        let mut basis = vec![vec![Complex64::new(0.0, 0.0); n + 1]; n + 1];
        basis[0][0] = Complex64::new(1.0, 0.0);
        for m in 0..=n {
            let a_m = self.coefficient(m);
            if a_m.norm_sqr() != 0.0 || m == n {
                for j in 0..=m {
                    for k in 0..=(m - j) {
                        sum[j][k] += a_m * basis[j][k];
                    }
                }
            }
            if m == n {
                break;
            }
            // multiply the basis by (x + iy)
            let mut next = vec![vec![Complex64::new(0.0, 0.0); n + 1]; n + 1];
            for j in 0..=m {
                for k in 0..=(m - j) {
                    let c = basis[j][k];
                    if c.norm_sqr() == 0.0 {
                        continue;
                    }
                    next[j + 1][k] += c;
                    next[j][k + 1] += c * Complex64::new(0.0, 1.0);
                }
            }
            basis = next;
        }
        let re = BivariatePoly::from_fn(n, |j, k| sum[j][k].re);
        let im = BivariatePoly::from_fn(n, |j, k| sum[j][k].im);
        (re, im)
    }
}

fn eval_poly(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// Aberth–Ehrlich iteration for the monic polynomial with the given lower
/// coefficients. Returns unclustered approximations.
fn aberth(low: &[Complex64], tol: f64) -> Result<Vec<Complex64>, PolyError> {
    let n = low.len();
    if n == 1 {
        return Ok(vec![-low[0]]);
    }
    let radius = 1.0 + low.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(ABERTH_SEED);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let jitter: f64 = rng.gen_range(-0.2..0.2);
            let angle = std::f64::consts::TAU * (k as f64 + 0.3871 + jitter) / n as f64;
            Complex64::from_polar(radius, angle)
        })
        .collect();

    let full: Vec<Complex64> = low
        .iter()
        .copied()
        .chain(std::iter::once(Complex64::new(1.0, 0.0)))
        .collect();
    let deriv: Vec<Complex64> = full
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * k as f64)
        .collect();

    // Sweep until the caller's tolerance holds, then keep polishing toward
    // machine precision so that clusters around multiple roots tighten well
    // below the clustering tolerance.
    let polish_tol = 1e-15_f64.min(tol);
    let mut converged_at: Option<usize> = None;
    let mut worst = f64::INFINITY;
    for sweep in 0..ABERTH_BUDGET {
        if let Some(done) = converged_at {
            if sweep >= done + 25 {
                break;
            }
        }
        worst = 0.0f64;
        let snapshot = z.clone();
        for k in 0..n {
            let zk = snapshot[k];
            let p = eval_poly(&full, zk);
            let scale = (1.0 + zk.norm()).powi(n as i32);
            worst = worst.max(p.norm() / scale);
            if p.norm() <= polish_tol * scale {
                continue;
            }
            let mut dp = eval_poly(&deriv, zk);
            if dp.norm() == 0.0 {
                dp = Complex64::new(1e-12, 1e-12);
            }
            let newton = p / dp;
            let mut repulsion = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    let d = zk - snapshot[j];
                    if d.norm() > 0.0 {
                        repulsion += d.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * repulsion;
            let step = if denom.norm() > 1e-300 { newton / denom } else { newton };
            z[k] = zk - step;
        }
        if worst <= tol && converged_at.is_none() {
            converged_at = Some(sweep);
        }
    }
    let ok = z
        .iter()
        .all(|&r| eval_poly(&full, r).norm() <= tol * (1.0 + r.norm()).powi(n as i32));
    if ok {
        Ok(z)
    } else {
        Err(PolyError::RootsDidNotConverge {
            budget: ABERTH_BUDGET,
            residual: worst,
        })
    }
}

/// Merges approximations within [`ROOT_CLUSTER_RTOL`] relative distance and
/// replaces each cluster by its centroid, repeated with multiplicity.
/// Result is sorted by `(re, im)`.
fn cluster_roots(mut points: Vec<Complex64>) -> Vec<Complex64> {
    points.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    let n = points.len();
    let mut uf = crate::util::UnionFind::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let scale = 1.0f64.max(points[i].norm()).max(points[j].norm());
            if (points[i] - points[j]).norm() <= ROOT_CLUSTER_RTOL * scale {
                uf.union(i, j);
            }
        }
    }
    let mut cluster_sum = vec![Complex64::new(0.0, 0.0); n];
    let mut cluster_size = vec![0usize; n];
    for i in 0..n {
        let r = uf.find(i);
        cluster_sum[r] += points[i];
        cluster_size[r] += 1;
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        if cluster_size[i] > 0 {
            let center = cluster_sum[i] / cluster_size[i] as f64;
            for _ in 0..cluster_size[i] {
                out.push(center);
            }
        }
    }
    out.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    out
}

/// A real polynomial in two variables, stored densely as `c[j][k] x^j y^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariatePoly {
    deg: usize,
    c: Vec<Vec<f64>>,
}

impl BivariatePoly {
    pub fn from_fn(deg: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let c = (0..=deg)
            .map(|j| (0..=deg).map(|k| if j + k <= deg { f(j, k) } else { 0.0 }).collect())
            .collect();
        BivariatePoly { deg, c }
    }

    pub fn zero(deg: usize) -> Self {
        BivariatePoly {
            deg,
            c: vec![vec![0.0; deg + 1]; deg + 1],
        }
    }

    pub fn degree(&self) -> usize {
        self.deg
    }

    pub fn coefficient(&self, j: usize, k: usize) -> f64 {
        if j <= self.deg && k <= self.deg {
            self.c[j][k]
        } else {
            0.0
        }
    }

    /// Horner evaluation in `x` with inner Horner in `y`.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let mut acc = 0.0;
        for j in (0..=self.deg).rev() {
            let row = &self.c[j];
            let mut ry = 0.0;
            for k in (0..=self.deg).rev() {
                ry = ry * y + row[k];
            }
            acc = acc * x + ry;
        }
        acc
    }

    pub fn partial_x(&self) -> BivariatePoly {
        let deg = self.deg.saturating_sub(1);
        BivariatePoly::from_fn(deg, |j, k| (j + 1) as f64 * self.coefficient(j + 1, k))
    }

    pub fn partial_y(&self) -> BivariatePoly {
        let deg = self.deg.saturating_sub(1);
        BivariatePoly::from_fn(deg, |j, k| (k + 1) as f64 * self.coefficient(j, k + 1))
    }

    /// `∂²/∂x² + ∂²/∂y²`, exact on the stored coefficients.
    pub fn laplacian(&self) -> BivariatePoly {
        let deg = self.deg.saturating_sub(2);
        BivariatePoly::from_fn(deg, |j, k| {
            ((j + 2) * (j + 1)) as f64 * self.coefficient(j + 2, k)
                + ((k + 2) * (k + 1)) as f64 * self.coefficient(j, k + 2)
        })
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.c
            .iter()
            .flatten()
            .map(|v| v.abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn p(coeffs: &[(f64, f64)]) -> MonicPolynomial {
        MonicPolynomial::new(coeffs.iter().map(|&(re, im)| c(re, im)).collect()).unwrap()
    }

    #[test]
    fn evaluates_by_horner() {
        // z^2 - 1 at 2i: (2i)^2 - 1 = -5
        let q = p(&[(-1.0, 0.0), (0.0, 0.0)]);
        assert_eq!(q.evaluate(c(0.0, 2.0)), c(-5.0, 0.0));
        // z^3 at 1+i: (1+i)^3 = -2 + 2i
        let cube = p(&[(0.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
        let v = cube.evaluate(c(1.0, 1.0));
        assert!((v - c(-2.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn from_roots_expands_products() {
        let q = MonicPolynomial::from_roots(&[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        assert_eq!(q.degree(), 2);
        assert!((q.coefficient(0) - c(-1.0, 0.0)).norm() < 1e-15);
        assert!(q.coefficient(1).norm() < 1e-15);

        let r = MonicPolynomial::from_roots(&[c(2.0, 0.0), c(0.0, 1.0), c(-1.0, -1.0)]).unwrap();
        for root in [c(2.0, 0.0), c(0.0, 1.0), c(-1.0, -1.0)] {
            assert!(r.evaluate(root).norm() < 1e-12);
        }
    }

    #[test]
    fn roots_of_quadratic() {
        let q = p(&[(-1.0, 0.0), (0.0, 0.0)]); // z^2 - 1
        let roots = q.roots(1e-12).unwrap();
        assert_eq!(roots.len(), 2);
        assert!((roots[0] - c(-1.0, 0.0)).norm() < 1e-9);
        assert!((roots[1] - c(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn roots_of_unity() {
        for n in 2..=8usize {
            let mut coeffs = vec![c(0.0, 0.0); n];
            coeffs[0] = c(-1.0, 0.0);
            let q = MonicPolynomial::new(coeffs).unwrap(); // z^n - 1
            let roots = q.roots(1e-12).unwrap();
            assert_eq!(roots.len(), n);
            for r in &roots {
                assert!((r.norm() - 1.0).abs() < 1e-9, "degree {n}: |root| = {}", r.norm());
                assert!(q.evaluate(*r).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn roots_recover_prescribed_values() {
        let targets = [c(0.3, -0.7), c(-1.2, 0.4), c(0.9, 0.9), c(-0.2, -0.1), c(1.5, 0.0)];
        let q = MonicPolynomial::from_roots(&targets).unwrap();
        let mut found = q.roots(1e-13).unwrap();
        let mut sorted: Vec<Complex64> = targets.to_vec();
        sorted.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        found.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        for (f, t) in found.iter().zip(sorted.iter()) {
            assert!((f - t).norm() < 1e-8, "found {f}, wanted {t}");
        }
    }

    #[test]
    fn multiplicity_detected_by_clustering() {
        // (z-1)^2 (z+2)
        let q = MonicPolynomial::from_roots(&[c(1.0, 0.0), c(1.0, 0.0), c(-2.0, 0.0)]).unwrap();
        let roots = q.roots(1e-12).unwrap();
        assert_eq!(roots.len(), 3);
        let ones: Vec<_> = roots.iter().filter(|r| (*r - c(1.0, 0.0)).norm() < 1e-4).collect();
        assert_eq!(ones.len(), 2, "double root reported twice: {roots:?}");
        assert_eq!(ones[0], ones[1], "cluster members share the centroid");
        assert!(roots.iter().any(|r| (r - c(-2.0, 0.0)).norm() < 1e-9));
    }

    #[test]
    fn critical_points_examples() {
        // z^3 - 3z: P' = 3z^2 - 3, critical points ±1
        let q = p(&[(0.0, 0.0), (-3.0, 0.0), (0.0, 0.0)]);
        let crit = q.critical_points(1e-12).unwrap();
        assert_eq!(crit.len(), 2);
        assert!((crit[0] - c(-1.0, 0.0)).norm() < 1e-9);
        assert!((crit[1] - c(1.0, 0.0)).norm() < 1e-9);

        // z^2: single critical point 0
        let sq = p(&[(0.0, 0.0), (0.0, 0.0)]);
        let crit = sq.critical_points(1e-12).unwrap();
        assert_eq!(crit.len(), 1);
        assert!(crit[0].norm() < 1e-9);

        // degree 1: none
        let lin = p(&[(5.0, -2.0)]);
        assert!(lin.critical_points(1e-12).unwrap().is_empty());
    }

    /// Distance from a point to the convex hull of a finite set.
    fn hull_distance(point: Complex64, hull_points: &[Complex64]) -> f64 {
        // distance to every segment of every pair bounds the hull distance
        // from above; for points inside any triangle it is zero.
        let inside = |p: Complex64| -> bool {
            // point is inside the hull iff it is a convex combination;
            // test via support: for every direction among pair normals the
            // point is not strictly outside all half-planes. For the small
            // sets in these tests, check all triangles.
            for i in 0..hull_points.len() {
                for j in 0..hull_points.len() {
                    for k in 0..hull_points.len() {
                        let (a, b, cc) = (hull_points[i], hull_points[j], hull_points[k]);
                        let sign = |p0: Complex64, p1: Complex64, p2: Complex64| {
                            (p1.re - p0.re) * (p2.im - p0.im) - (p1.im - p0.im) * (p2.re - p0.re)
                        };
                        let d1 = sign(p, a, b);
                        let d2 = sign(p, b, cc);
                        let d3 = sign(p, cc, a);
                        let has_neg = d1 < 0.0 || d2 < 0.0 || d3 < 0.0;
                        let has_pos = d1 > 0.0 || d2 > 0.0 || d3 > 0.0;
                        if !(has_neg && has_pos) {
                            return true;
                        }
                    }
                }
            }
            false
        };
        if inside(point) {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for i in 0..hull_points.len() {
            for j in 0..hull_points.len() {
                let (a, b) = (hull_points[i], hull_points[j]);
                let ab = b - a;
                let len2 = ab.norm_sqr();
                let t = if len2 == 0.0 {
                    0.0
                } else {
                    (((point - a).re * ab.re + (point - a).im * ab.im) / len2).clamp(0.0, 1.0)
                };
                best = best.min((point - (a + ab * t)).norm());
            }
        }
        best
    }

    #[test]
    fn critical_points_lie_in_root_hull() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let n = rng.gen_range(2..=6);
            let roots: Vec<Complex64> = (0..n)
                .map(|_| c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)))
                .collect();
            let q = MonicPolynomial::from_roots(&roots).unwrap();
            for cp in q.critical_points(1e-12).unwrap() {
                let d = hull_distance(cp, &roots);
                assert!(d < 1e-8, "critical point {cp} at hull distance {d}");
            }
        }
    }

    #[test]
    fn real_rooted_critical_points_interlace() {
        let roots = [-2.0, -0.5, 0.7, 1.9].map(|x| c(x, 0.0));
        let q = MonicPolynomial::from_roots(&roots).unwrap();
        let mut crit = q.critical_points(1e-12).unwrap();
        crit.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert_eq!(crit.len(), 3);
        for (i, cp) in crit.iter().enumerate() {
            assert!(cp.im.abs() < 1e-9);
            assert!(
                roots[i].re < cp.re && cp.re < roots[i + 1].re,
                "critical point {} outside ({}, {})",
                cp.re,
                roots[i].re,
                roots[i + 1].re
            );
        }
    }

    #[test]
    fn cauchy_radius_bounds_roots_and_critical_points() {
        let q = p(&[(-1.0, 0.0), (0.0, 0.0)]); // z^2 - 1
        assert_eq!(q.cauchy_radius(), 2.0);
        let big = p(&[(0.0, 0.0), (-3.0, 0.0), (0.0, 0.0)]); // z^3 - 3z
        assert_eq!(big.cauchy_radius(), 4.0);
        for poly in [q, big] {
            let r = poly.cauchy_radius();
            for root in poly.roots(1e-12).unwrap() {
                assert!(root.norm() < r);
            }
            for cp in poly.critical_points(1e-12).unwrap() {
                assert!(cp.norm() < r);
            }
        }
    }

    #[test]
    fn harmonic_parts_of_square() {
        // z^2 -> re = x^2 - y^2, im = 2xy
        let q = p(&[(0.0, 0.0), (0.0, 0.0)]);
        let (re, im) = q.harmonic_parts();
        assert_eq!(re.coefficient(2, 0), 1.0);
        assert_eq!(re.coefficient(0, 2), -1.0);
        assert_eq!(re.coefficient(1, 1), 0.0);
        assert_eq!(im.coefficient(1, 1), 2.0);
        assert_eq!(im.coefficient(2, 0), 0.0);
    }

    #[test]
    fn harmonic_parts_of_shifted_line() {
        // z + a_0 with a_0 = -0.25 - 1.5i -> re = x - 0.25, im = y - 1.5
        let q = p(&[(-0.25, -1.5)]);
        let (re, im) = q.harmonic_parts();
        assert_eq!(re.coefficient(1, 0), 1.0);
        assert_eq!(re.coefficient(0, 0), -0.25);
        assert_eq!(im.coefficient(0, 1), 1.0);
        assert_eq!(im.coefficient(0, 0), -1.5);
    }

    #[test]
    fn harmonic_parts_match_pointwise_and_are_harmonic() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in 1..=8usize {
            let coeffs: Vec<Complex64> = (0..n)
                .map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                .collect();
            let q = MonicPolynomial::new(coeffs).unwrap();
            let (re, im) = q.harmonic_parts();
            for _ in 0..20 {
                let (x, y) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                let v = q.evaluate(c(x, y));
                assert!((re.eval(x, y) - v.re).abs() < 1e-9 * (1.0 + v.norm()));
                assert!((im.eval(x, y) - v.im).abs() < 1e-9 * (1.0 + v.norm()));
            }
            let scale = re.max_abs_coefficient().max(im.max_abs_coefficient()).max(1.0);
            for part in [&re, &im] {
                let lap = part.laplacian();
                assert!(
                    lap.max_abs_coefficient() <= 1e-12 * scale * (n * n) as f64,
                    "Laplacian residue {} for degree {n}",
                    lap.max_abs_coefficient()
                );
            }
        }
    }

    #[test]
    fn bivariate_partials() {
        // f = x^2 y + 3y^2
        let mut f = BivariatePoly::zero(3);
        f.c[2][1] = 1.0;
        f.c[0][2] = 3.0;
        let fx = f.partial_x();
        let fy = f.partial_y();
        assert_eq!(fx.coefficient(1, 1), 2.0);
        assert_eq!(fy.coefficient(2, 0), 1.0);
        assert_eq!(fy.coefficient(0, 1), 6.0);
        assert!((f.eval(2.0, -1.0) - (-4.0 + 3.0)).abs() < 1e-12);
    }

    #[test]
    fn degree_bounds_enforced() {
        assert!(MonicPolynomial::new(vec![]).is_err());
        assert!(MonicPolynomial::new(vec![c(0.0, 0.0); 13]).is_err());
        assert!(MonicPolynomial::new(vec![c(0.0, 0.0); 12]).is_ok());
    }
}
