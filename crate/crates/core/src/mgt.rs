//! Finite-level modified Grothendieck–Teichmüller groups: the subgroup of
//! permutations of `Z/q` generated by the unit multiplications together
//! with the involution `a ↦ 1 − a`, its affine normal forms, the dihedral
//! subgroup generated by the two reflections, and the reduction maps down
//! the divisor tower.
//!
//! The headline identity `|group| = q·φ(q)` is never assumed: closures are
//! computed by breadth-first multiplication and the count is compared and
//! reported. Likewise the reduction maps are defined generator-wise and
//! their well-definedness is a computation, not an axiom.


use thiserror::Error;

use crate::util::closure_by;

#[derive(Debug, Error)]
pub enum MgtError {
    #[error("modulus {0} outside the supported range {1}..={2}")]
    ModulusRange(usize, usize, usize),
    #[error("{0} does not divide {1}")]
    NotDivisor(usize, usize),
    #[error("reduction is not well defined: {0}")]
    IllDefined(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub const MAX_MODULUS: usize = 200;

/// A permutation of `Z/q`, stored as its full table.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModularPermutation {
    q: usize,
    table: Vec<usize>,
}

impl ModularPermutation {
    pub fn new(q: usize, table: Vec<usize>) -> Result<Self, MgtError> {
        if q < 2 {
            return Err(MgtError::ModulusRange(q, 2, MAX_MODULUS));
        }
        if table.len() != q {
            return Err(MgtError::Invalid(format!(
                "table of length {} for modulus {q}",
                table.len()
            )));
        }
        let mut seen = vec![false; q];
        for &x in &table {
            if x >= q || seen[x] {
                return Err(MgtError::Invalid("table is not a bijection".into()));
            }
            seen[x] = true;
        }
        Ok(ModularPermutation { q, table })
    }

    pub fn identity(q: usize) -> Result<Self, MgtError> {
        ModularPermutation::new(q, (0..q).collect())
    }

    /// `a ↦ d·a` for a unit `d`.
    pub fn multiplication(q: usize, d: usize) -> Result<Self, MgtError> {
        if gcd(d % q, q) != 1 {
            return Err(MgtError::Invalid(format!("{d} is not a unit modulo {q}")));
        }
        ModularPermutation::new(q, (0..q).map(|a| d * a % q).collect())
    }

    /// The involution `θ: a ↦ 1 − a`.
    pub fn theta(q: usize) -> Result<Self, MgtError> {
        ModularPermutation::new(q, (0..q).map(|a| (q + 1 - a) % q).collect())
    }

    /// `a ↦ −a`.
    pub fn negation(q: usize) -> Result<Self, MgtError> {
        ModularPermutation::new(q, (0..q).map(|a| (q - a) % q).collect())
    }

    /// `a ↦ a + c`.
    pub fn translation(q: usize, c: usize) -> Result<Self, MgtError> {
        ModularPermutation::new(q, (0..q).map(|a| (a + c) % q).collect())
    }

    pub fn modulus(&self) -> usize {
        self.q
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, a: usize) -> usize {
        self.table[a % self.q]
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &ModularPermutation) -> Result<Self, MgtError> {
        if self.q != other.q {
            return Err(MgtError::Invalid(format!(
                "composing permutations of moduli {} and {}",
                self.q, other.q
            )));
        }
        Ok(ModularPermutation {
            q: self.q,
            table: other.table.iter().map(|&a| self.table[a]).collect(),
        })
    }

    /// Multiplicative order in the permutation group.
    pub fn order(&self) -> usize {
        let id: Vec<usize> = (0..self.q).collect();
        let mut power = self.table.clone();
        let mut k = 1;
        while power != id {
            power = power.iter().map(|&a| self.table[a]).collect();
            k += 1;
        }
        k
    }
}

/// The map `a ↦ d·a + e` with `d` a unit: the normal form of an affine
/// permutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AffineNormalForm {
    pub q: usize,
    pub d: usize,
    pub e: usize,
}

impl AffineNormalForm {
    /// The permutation this form denotes.
    pub fn permutation(&self) -> Result<ModularPermutation, MgtError> {
        if gcd(self.d % self.q, self.q) != 1 {
            return Err(MgtError::Invalid(format!(
                "{} is not a unit modulo {}",
                self.d, self.q
            )));
        }
        ModularPermutation::new(self.q, (0..self.q).map(|a| (self.d * a + self.e) % self.q).collect())
    }

    /// Coefficientwise reduction to a divisor modulus.
    pub fn reduce(&self, p: usize) -> Result<AffineNormalForm, MgtError> {
        if p < 2 || self.q % p != 0 {
            return Err(MgtError::NotDivisor(p, self.q));
        }
        Ok(AffineNormalForm {
            q: p,
            d: self.d % p,
            e: self.e % p,
        })
    }
}

/// Recognize `p` as `a ↦ d·a + e`: read `e = p(0)` and `d = p(1) − p(0)`,
/// then verify the whole table. `None` when the permutation is not affine.
pub fn affine_normal_form(p: &ModularPermutation) -> Option<AffineNormalForm> {
    let q = p.modulus();
    let e = p.apply(0);
    let d = (p.apply(1) + q - e) % q;
    for a in 0..q {
        if p.apply(a) != (d * a + e) % q {
            return None;
        }
    }
    Some(AffineNormalForm { q, d, e })
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Euler totient by direct count (moduli here are small).
pub fn euler_phi(q: usize) -> usize {
    (1..=q).filter(|&d| gcd(d, q) == 1).count()
}

/// The group generated inside `Sym(Z/q)` by every unit multiplication and
/// the involution `θ: a ↦ 1 − a`, as a sorted duplicate-free list.
pub fn mgt_group(q: usize) -> Result<Vec<ModularPermutation>, MgtError> {
    if !(2..=MAX_MODULUS).contains(&q) {
        return Err(MgtError::ModulusRange(q, 2, MAX_MODULUS));
    }
    let mut generators = vec![ModularPermutation::theta(q)?];
    for d in 1..q {
        if gcd(d, q) == 1 {
            generators.push(ModularPermutation::multiplication(q, d)?);
        }
    }
    let mut elements = closure_by(ModularPermutation::identity(q)?, &generators, |a, b| {
        a.compose(b).expect("same modulus")
    });
    elements.sort();
    Ok(elements)
}

/// The subgroup generated by the two reflections `a ↦ −a` and
/// `a ↦ 1 − a`, as a sorted duplicate-free list.
pub fn dihedral_subgroup(q: usize) -> Result<Vec<ModularPermutation>, MgtError> {
    if !(3..=MAX_MODULUS).contains(&q) {
        return Err(MgtError::ModulusRange(q, 3, MAX_MODULUS));
    }
    let generators = vec![ModularPermutation::negation(q)?, ModularPermutation::theta(q)?];
    let mut elements = closure_by(ModularPermutation::identity(q)?, &generators, |a, b| {
        a.compose(b).expect("same modulus")
    });
    elements.sort();
    Ok(elements)
}

/// Measurements of the dihedral presentation: the two generators square to
/// the identity and their product has order `q`, making the closure a
/// dihedral group of order `2q`.
#[derive(Debug, Clone, Copy)]
pub struct DihedralCheck {
    pub q: usize,
    pub order: usize,
    pub generators_are_involutions: bool,
    pub rotation_order: usize,
}

impl DihedralCheck {
    pub fn holds(&self) -> bool {
        self.order == 2 * self.q && self.generators_are_involutions && self.rotation_order == self.q
    }
}

pub fn dihedral_presentation_check(q: usize) -> Result<DihedralCheck, MgtError> {
    let neg = ModularPermutation::negation(q)?;
    let theta = ModularPermutation::theta(q)?;
    let id = ModularPermutation::identity(q)?;
    let generators_are_involutions =
        neg.compose(&neg)? == id && theta.compose(&theta)? == id;
    let rotation = neg.compose(&theta)?;
    Ok(DihedralCheck {
        q,
        order: dihedral_subgroup(q)?.len(),
        generators_are_involutions,
        rotation_order: rotation.order(),
    })
}

/// A generator of the group: a unit multiplication or the involution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MgtGenerator {
    Mult(usize),
    Theta,
}

/// Evaluate a generator word left to right: the word `[g1, g2]` denotes
/// `g2 ∘ g1` (apply `g1` first).
pub fn evaluate_word(q: usize, word: &[MgtGenerator]) -> Result<ModularPermutation, MgtError> {
    let mut acc = ModularPermutation::identity(q)?;
    for g in word {
        let step = match *g {
            MgtGenerator::Mult(d) => ModularPermutation::multiplication(q, d)?,
            MgtGenerator::Theta => ModularPermutation::theta(q)?,
        };
        acc = step.compose(&acc)?;
    }
    Ok(acc)
}

/// Generator-wise reduction of a word to a divisor modulus.
pub fn reduce_word(word: &[MgtGenerator], p: usize) -> Vec<MgtGenerator> {
    word.iter()
        .map(|g| match *g {
            MgtGenerator::Mult(d) => MgtGenerator::Mult(d % p),
            MgtGenerator::Theta => MgtGenerator::Theta,
        })
        .collect()
}

/// Reduce an element of the level-`q` group to level `p | q` through its
/// affine normal form `(d, e) ↦ (d mod p, e mod p)`. Elements that are not
/// affine cannot be reduced this way and are reported.
pub fn tower_map(q: usize, p: usize, x: &ModularPermutation) -> Result<ModularPermutation, MgtError> {
    if x.modulus() != q {
        return Err(MgtError::Invalid(format!(
            "element of modulus {} passed at level {q}",
            x.modulus()
        )));
    }
    if p < 2 || q % p != 0 {
        return Err(MgtError::NotDivisor(p, q));
    }
    let form = affine_normal_form(x).ok_or_else(|| {
        MgtError::IllDefined(format!(
            "element at level {q} is not affine, so the coefficientwise reduction does not apply"
        ))
    })?;
    form.reduce(p)?.permutation()
}

/// Reduce a generator word: evaluate its generator-wise image at level `p`.
pub fn tower_map_word(
    q: usize,
    p: usize,
    word: &[MgtGenerator],
) -> Result<ModularPermutation, MgtError> {
    if p < 2 || q % p != 0 {
        return Err(MgtError::NotDivisor(p, q));
    }
    // validate the word at level q first: a reduction of an invalid word
    // must not silently succeed
    evaluate_word(q, word)?;
    evaluate_word(p, &reduce_word(word, p))
}

/// Exhaustive well-definedness measurement for one tower step: the
/// reduction must send generators to generators and respect every product,
/// which together make any two words for the same element agree downstairs.
#[derive(Debug, Clone)]
pub struct TowerReport {
    pub q: usize,
    pub p: usize,
    pub elements: usize,
    pub pairs_checked: usize,
    /// Witnesses of products whose image differs from the image product.
    pub failures: Vec<String>,
}

impl TowerReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn tower_homomorphism_check(q: usize, p: usize) -> Result<TowerReport, MgtError> {
    let group = mgt_group(q)?;
    let mut failures = Vec::new();
    let mut pairs_checked = 0;
    for x in &group {
        for y in &group {
            pairs_checked += 1;
            let lhs = tower_map(q, p, &x.compose(y)?)?;
            let rhs = tower_map(q, p, x)?.compose(&tower_map(q, p, y)?)?;
            if lhs != rhs && failures.len() < 5 {
                failures.push(format!(
                    "images of a product of tables {:?} and {:?} disagree",
                    x.table(),
                    y.table()
                ));
            }
        }
    }
    Ok(TowerReport {
        q,
        p,
        elements: group.len(),
        pairs_checked,
        failures,
    })
}

/// Whether the two routes down a divisor chain agree on every element:
/// reducing `q → p → r` matches reducing `q → r` directly.
pub fn tower_compatibility(q: usize, p: usize, r: usize) -> Result<bool, MgtError> {
    if p < 2 || q % p != 0 {
        return Err(MgtError::NotDivisor(p, q));
    }
    if r < 2 || p % r != 0 {
        return Err(MgtError::NotDivisor(r, p));
    }
    for x in mgt_group(q)? {
        let via_p = tower_map(p, r, &tower_map(q, p, &x)?)?;
        let direct = tower_map(q, r, &x)?;
        if via_p != direct {
            return Ok(false);
        }
    }
    Ok(true)
}
