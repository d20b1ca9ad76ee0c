//! Deterministic randomized canonical structures for verification sweeps.
//!
//! Every case is drawn from its own ChaCha stream keyed by `(seed, id)`, so a
//! case can be regenerated in isolation and sweeps can run in parallel. The
//! first cases of a sweep are fixed templates that hit every diagonal and
//! pairwise rule of the pattern tables; the rest are random. Eigenvalue
//! parameters are dyadic rationals, so products and sums involving them are
//! exact in floating point.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::canonical::{excluded_h_lambda, BlockKind, CanonicalBlock, CanonicalStructure};
use crate::matcore::{ComplexMatrix, C64};
use crate::patterns::StarPattern;

/// Values whose inverses are also dyadic, used to force `λ = μ⁻¹` collisions.
const INVERTIBLE: [(f64, f64); 10] = [
    (2.0, 0.0),
    (0.5, 0.0),
    (-2.0, 0.0),
    (-0.5, 0.0),
    (4.0, 0.0),
    (0.25, 0.0),
    (0.0, 2.0),
    (0.0, -0.5),
    (1.0, 1.0),
    (0.5, -0.5),
];

const TEMPLATES: &[&str] = &[
    "H2(1,0) H2(1,0)",
    "H1(-1,0) H1(-1,0)",
    "H1(2,0) H1(2,0)",
    "H1(2,0) H1(0.5,0)",
    "H1(1,1) H1(0.5,-0.5)",
    "H1(2,0) H1(3,0)",
    "H1(1,0.5)",
    "G2 G2",
    "G3 G1",
    "G2 G1",
    "J3 J1",
    "J4 J2",
    "J2 J2",
    "J1 J1",
    "H1(-1,0) G2",
    "H2(1,0) G1",
    "H1(2,0) G1",
    "H1(2,0) J1",
    "H1(2,0) J2",
    "G1 J1",
    "G2 J2",
    "H1(-1,0) G1 J1",
    "H1(2,0) H1(0.5,0) J1",
];

#[derive(Clone, Debug, Serialize)]
pub struct SweepCase {
    pub id: usize,
    pub structure: CanonicalStructure,
}

/// Per-case generator; identical `(seed, id)` gives identical draws.
pub fn case_rng(seed: u64, id: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id as u64);
    rng
}

/// `count` structures of total dimension at most `n_max`.
pub fn sweep_structures(n_max: usize, count: usize, seed: u64) -> Vec<SweepCase> {
    let templates: Vec<CanonicalStructure> = TEMPLATES
        .iter()
        .map(|t| CanonicalStructure::parse_inline(t).expect("valid template"))
        .filter(|s| s.total_dim() <= n_max)
        .collect();
    (0..count)
        .map(|id| {
            let structure = match templates.get(id) {
                Some(s) => s.clone(),
                None => random_structure(n_max, &mut case_rng(seed, id)),
            };
            SweepCase { id, structure }
        })
        .collect()
}

fn dyadic(rng: &mut impl Rng, scale: i32) -> f64 {
    rng.gen_range(-scale..=scale) as f64 / 64.0
}

fn random_lambda(m: usize, existing: &[C64], rng: &mut impl Rng) -> C64 {
    let excluded = C64::new(excluded_h_lambda(m) as f64, 0.0);
    let valid = |z: C64| z != C64::new(0.0, 0.0) && z != excluded;
    let invertible = |z: C64| INVERTIBLE.iter().any(|&(re, im)| C64::new(re, im) == z);
    let draw: f64 = rng.gen();
    let candidate = if draw < 0.2 {
        Some(-excluded)
    } else if draw < 0.45 {
        existing.choose(rng).copied()
    } else if draw < 0.65 {
        let inv: Vec<C64> = existing.iter().copied().filter(|&z| invertible(z)).collect();
        inv.choose(rng).map(|&z| C64::new(1.0, 0.0) / z)
    } else if draw < 0.8 {
        INVERTIBLE.choose(rng).map(|&(re, im)| C64::new(re, im))
    } else {
        None
    };
    match candidate {
        Some(z) if valid(z) => z,
        _ => loop {
            let z = C64::new(dyadic(rng, 192), dyadic(rng, 192));
            if valid(z) && z != -excluded {
                break z;
            }
        },
    }
}

/// A random canonical structure of total dimension at most `n_max`.
pub fn random_structure(n_max: usize, rng: &mut impl Rng) -> CanonicalStructure {
    assert!(n_max >= 1);
    let target = rng.gen_range(1..=n_max);
    let mut budget = target;
    let mut blocks = Vec::new();
    let mut lambdas: Vec<C64> = Vec::new();
    let mut j_sizes: Vec<usize> = Vec::new();
    while budget > 0 {
        let kind = match rng.gen_range(0..3) {
            0 if budget >= 2 => BlockKind::H,
            0 | 1 => BlockKind::Gamma,
            _ => BlockKind::JordanZero,
        };
        let block = match kind {
            BlockKind::H => {
                let m = rng.gen_range(1..=(budget / 2).min(4));
                let lam = random_lambda(m, &lambdas, rng);
                lambdas.push(lam);
                CanonicalBlock::h(m, lam)
            }
            BlockKind::Gamma => CanonicalBlock::gamma(rng.gen_range(1..=budget.min(4))),
            BlockKind::JordanZero => {
                let tie = j_sizes.iter().copied().filter(|&k| k <= budget).collect::<Vec<_>>();
                let k = match tie.choose(rng) {
                    Some(&k) if rng.gen_bool(0.4) => k,
                    _ => rng.gen_range(1..=budget.min(4)),
                };
                j_sizes.push(k);
                CanonicalBlock::jordan_zero(k)
            }
        }
        .expect("generated block is valid");
        budget -= block.dim();
        blocks.push(block);
    }
    blocks.shuffle(rng);
    CanonicalStructure::new(blocks).expect("non-empty")
}

/// A matrix with dyadic random entries on the pattern and zeros elsewhere.
pub fn instantiate(pattern: &StarPattern, rng: &mut impl Rng) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(pattern.rows(), pattern.cols());
    for (i, j) in pattern.iter() {
        m[(i - 1, j - 1)] = C64::new(dyadic(rng, 64), dyadic(rng, 64));
    }
    m
}

/// A random complex matrix of Frobenius norm `norm`.
pub fn random_perturbation(n: usize, norm: f64, rng: &mut impl Rng) -> ComplexMatrix {
    let m = ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let f = m.frobenius_norm();
    if f == 0.0 {
        return m;
    }
    m.scale(C64::new(norm / f, 0.0))
}

/// Which rule of the pattern tables a block or block pair exercises.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Rule {
    HGeneric,
    HPlusOne,
    HMinusOne,
    GammaEven,
    GammaOdd,
    Jordan,
    HHPlusMinusOne,
    HHEqual,
    HHReciprocal,
    HHUnrelated,
    GammaGammaEven,
    GammaGammaOdd,
    JJOdd,
    JJEven,
    JJTie,
    HGammaMatch,
    HGammaNone,
    HJOdd,
    HJEven,
    GammaJOdd,
    GammaJEven,
}

impl Rule {
    pub const ALL: [Rule; 21] = [
        Rule::HGeneric,
        Rule::HPlusOne,
        Rule::HMinusOne,
        Rule::GammaEven,
        Rule::GammaOdd,
        Rule::Jordan,
        Rule::HHPlusMinusOne,
        Rule::HHEqual,
        Rule::HHReciprocal,
        Rule::HHUnrelated,
        Rule::GammaGammaEven,
        Rule::GammaGammaOdd,
        Rule::JJOdd,
        Rule::JJEven,
        Rule::JJTie,
        Rule::HGammaMatch,
        Rule::HGammaNone,
        Rule::HJOdd,
        Rule::HJEven,
        Rule::GammaJOdd,
        Rule::GammaJEven,
    ];
}

fn diagonal_rule(b: &CanonicalBlock) -> Rule {
    let one = C64::new(1.0, 0.0);
    match b.kind() {
        BlockKind::H if b.lambda() == Some(one) => Rule::HPlusOne,
        BlockKind::H if b.lambda() == Some(-one) => Rule::HMinusOne,
        BlockKind::H => Rule::HGeneric,
        BlockKind::Gamma if b.size() % 2 == 0 => Rule::GammaEven,
        BlockKind::Gamma => Rule::GammaOdd,
        BlockKind::JordanZero => Rule::Jordan,
    }
}

/// Rules for a pair taken in canonical order.
fn pair_rules(a: &CanonicalBlock, b: &CanonicalBlock) -> Vec<Rule> {
    let one = C64::new(1.0, 0.0);
    let (m, n) = (a.size(), b.size());
    match (a.kind(), b.kind()) {
        (BlockKind::H, BlockKind::H) => {
            let (l, u) = (a.lambda().unwrap(), b.lambda().unwrap());
            vec![if l == u && (l == one || l == -one) {
                Rule::HHPlusMinusOne
            } else if l == u {
                Rule::HHEqual
            } else if l * u == one {
                Rule::HHReciprocal
            } else {
                Rule::HHUnrelated
            }]
        }
        (BlockKind::Gamma, BlockKind::Gamma) => {
            vec![if (m + n) % 2 == 0 { Rule::GammaGammaEven } else { Rule::GammaGammaOdd }]
        }
        (BlockKind::JordanZero, BlockKind::JordanZero) => {
            let mut r = vec![if n % 2 == 1 { Rule::JJOdd } else { Rule::JJEven }];
            if m == n {
                r.push(Rule::JJTie);
            }
            r
        }
        (BlockKind::H, BlockKind::Gamma) => {
            let target = if n % 2 == 1 { one } else { -one };
            vec![if a.lambda() == Some(target) { Rule::HGammaMatch } else { Rule::HGammaNone }]
        }
        (BlockKind::H, BlockKind::JordanZero) => vec![if n % 2 == 1 { Rule::HJOdd } else { Rule::HJEven }],
        (BlockKind::Gamma, BlockKind::JordanZero) => {
            vec![if n % 2 == 1 { Rule::GammaJOdd } else { Rule::GammaJEven }]
        }
        _ => Vec::new(),
    }
}

/// The diagonal and pairwise rules exercised by one structure.
pub fn rules_of(structure: &CanonicalStructure) -> Vec<Rule> {
    let blocks = structure.blocks();
    let mut out: Vec<Rule> = blocks.iter().map(diagonal_rule).collect();
    for (i, a) in blocks.iter().enumerate() {
        for b in &blocks[i + 1..] {
            out.extend(pair_rules(a, b));
        }
    }
    out
}

/// How often each rule was exercised across a sweep.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Coverage {
    pub counts: BTreeMap<Rule, usize>,
}

impl Coverage {
    pub fn tally<'a>(structures: impl IntoIterator<Item = &'a CanonicalStructure>) -> Self {
        let mut counts: BTreeMap<Rule, usize> = Rule::ALL.iter().map(|&r| (r, 0)).collect();
        for s in structures {
            for r in rules_of(s) {
                *counts.entry(r).or_default() += 1;
            }
        }
        Self { counts }
    }

    pub fn missing(&self) -> Vec<Rule> {
        self.counts.iter().filter(|(_, &c)| c == 0).map(|(&r, _)| r).collect()
    }
}

impl fmt::Display for Coverage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (r, c) in &self.counts {
            writeln!(f, "{r:?}: {c}")?;
        }
        Ok(())
    }
}
