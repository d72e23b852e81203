//! Seeded random polynomials with separated roots.
//!
//! The web machinery refuses near-degenerate inputs, so test corpora are
//! drawn by rejection: roots land in a disc with a minimum pairwise
//! separation, and a candidate is kept only when its roots and critical
//! points are jointly separated as well. Sampling is deterministic in the
//! seed.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::poly::MonicPolynomial;

/// Rejection-sampling thresholds for web-friendly polynomials.
#[derive(Debug, Clone)]
pub struct SampleConfig {
    /// Roots are drawn uniformly from a disc of this radius.
    pub disc_radius: f64,
    /// Minimum pairwise distance between roots.
    pub min_root_separation: f64,
    /// Minimum pairwise distance among roots and critical points together.
    pub min_node_separation: f64,
    /// Attempts before giving up (a configuration error, not bad luck).
    pub max_attempts: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            disc_radius: 1.5,
            min_root_separation: 0.15,
            min_node_separation: 0.08,
            max_attempts: 10_000,
        }
    }
}

fn uniform_disc(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    loop {
        let x = rng.gen_range(-radius..radius);
        let y = rng.gen_range(-radius..radius);
        if x * x + y * y < radius * radius {
            return Complex64::new(x, y);
        }
    }
}

fn min_pairwise(points: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            best = best.min((points[i] - points[j]).norm());
        }
    }
    best
}

/// A random monic polynomial of the given degree whose roots and critical
/// points are pairwise well separated. Deterministic in `seed`.
pub fn random_web_polynomial(degree: usize, seed: u64, config: &SampleConfig) -> MonicPolynomial {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..config.max_attempts {
        let roots: Vec<Complex64> = (0..degree)
            .map(|_| uniform_disc(&mut rng, config.disc_radius))
            .collect();
        if degree > 1 && min_pairwise(&roots) < config.min_root_separation {
            continue;
        }
        let p = MonicPolynomial::from_roots(&roots).expect("degree within bounds");
        let crits = match p.critical_points(1e-12) {
            Ok(c) => c,
            Err(_) => continue,
        };
        let mut all = roots.clone();
        all.extend(crits);
        if degree > 1 && min_pairwise(&all) < config.min_node_separation {
            continue;
        }
        return p;
    }
    panic!(
        "no degree-{degree} polynomial met the separation thresholds in {} attempts",
        config.max_attempts
    );
}

/// A random monic polynomial with distinct real roots (real coefficients).
/// Deterministic in `seed`.
pub fn random_real_rooted(degree: usize, seed: u64, config: &SampleConfig) -> MonicPolynomial {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..config.max_attempts {
        let mut roots: Vec<f64> = (0..degree)
            .map(|_| rng.gen_range(-config.disc_radius..config.disc_radius))
            .collect();
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if degree > 1
            && roots
                .windows(2)
                .any(|w| (w[1] - w[0]).abs() < config.min_root_separation)
        {
            continue;
        }
        let complex: Vec<Complex64> = roots.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let p = MonicPolynomial::from_roots(&complex).expect("degree within bounds");
        // Real-rooted polynomials interlace roots and critical points on the
        // axis, so the root separation alone controls node separation; still
        // verify to keep the guarantee explicit.
        let crits = match p.critical_points(1e-12) {
            Ok(c) => c,
            Err(_) => continue,
        };
        let mut all = complex.clone();
        all.extend(crits);
        if degree > 1 && min_pairwise(&all) < config.min_node_separation {
            continue;
        }
        return p;
    }
    panic!(
        "no real-rooted degree-{degree} polynomial met the thresholds in {} attempts",
        config.max_attempts
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_deterministic_in_the_seed() {
        let cfg = SampleConfig::default();
        let a = random_web_polynomial(5, 42, &cfg);
        let b = random_web_polynomial(5, 42, &cfg);
        assert_eq!(a.lower_coefficients(), b.lower_coefficients());
        let c = random_web_polynomial(5, 43, &cfg);
        assert_ne!(a.lower_coefficients(), c.lower_coefficients());
    }

    #[test]
    fn sampled_roots_meet_thresholds() {
        let cfg = SampleConfig::default();
        for seed in 0..10 {
            let p = random_web_polynomial(4, seed, &cfg);
            let roots = p.roots(1e-12).unwrap();
            let crits = p.critical_points(1e-12).unwrap();
            for i in 0..roots.len() {
                for j in (i + 1)..roots.len() {
                    assert!((roots[i] - roots[j]).norm() >= cfg.min_root_separation);
                }
            }
            let mut all = roots.clone();
            all.extend(crits);
            for i in 0..all.len() {
                for j in (i + 1)..all.len() {
                    assert!((all[i] - all[j]).norm() >= cfg.min_node_separation * 0.99);
                }
            }
        }
    }

    #[test]
    fn real_rooted_sampler_gives_real_coefficients() {
        let cfg = SampleConfig::default();
        let p = random_real_rooted(5, 7, &cfg);
        for c in p.lower_coefficients() {
            assert!(c.im.abs() < 1e-12, "coefficient {c} not real");
        }
        let roots = p.roots(1e-12).unwrap();
        for r in roots {
            assert!(r.im.abs() < 1e-9, "root {r} not real");
        }
    }
}
