//! Seeded instance generators.
//!
//! Both families are our own choice of test distribution; neither comes with
//! any claim of being representative.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{beta_of, Beta, Instance};
use crate::error::{Error, Result};
use crate::rational::{ceil_root, format_rational, int, Rational};

/// Number of grid steps used to discretise `[1, 2β]`.
const UNIFORM_STEPS: i64 = 1000;
/// Points live on a `COORD_GRID × COORD_GRID` lattice in the unit square.
const COORD_GRID: i64 = 1000;
/// Irrational powered distances are rounded up to multiples of `1/ROUND_GRID`.
const ROUND_GRID: i64 = 1_000_000;

/// Weights drawn uniformly from the grid `1 + k (2β - 1) / 1000`,
/// `k = 0..=1000`. Every weight lies in `[1, 2β]`, so any weight is at most
/// `β` times the sum of two others and the declared β is always honest.
pub fn gen_uniform_beta(n: usize, beta: &Rational, seed: u64) -> Result<Instance> {
    if n < 3 {
        return Err(Error::Domain(format!("instance needs n >= 3, got {n}")));
    }
    if beta < &Rational::one() {
        return Err(Error::Domain(format!(
            "beta must be >= 1, got {}",
            format_rational(beta)
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = beta * int(2) - int(1);
    let step = span / int(UNIFORM_STEPS);
    let name = format!("uniform-beta-n{n}-b{}-s{seed}", format_rational(beta).replace('/', "_"));
    let inst = Instance::from_fn(name, n, |_, _| {
        let k = rng.gen_range(0..=UNIFORM_STEPS);
        int(1) + &step * int(k)
    })?;
    inst.with_declared_beta(beta.clone())
}

/// A point with exact rational coordinates.
pub type Point = (Rational, Rational);

/// The distance exponent `p` of [`gen_euclidean_power`], restricted to
/// integers and halves (`p = halves / 2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EuclideanPower {
    halves: u32,
}

impl EuclideanPower {
    pub fn new(p: &Rational) -> Result<Self> {
        let doubled = p * int(2);
        if p < &Rational::one() || !doubled.is_integer() {
            return Err(Error::Domain(format!(
                "power must be an integer or half-integer >= 1, got {}",
                format_rational(p)
            )));
        }
        let halves = doubled
            .to_integer()
            .to_u32()
            .ok_or_else(|| Error::Domain("power too large".into()))?;
        Ok(EuclideanPower { halves })
    }

    pub fn value(&self) -> Rational {
        Rational::new(BigInt::from(self.halves), BigInt::from(2))
    }

    /// `d^p` from the squared distance. Exact when `p` is an even integer,
    /// otherwise rounded up to the `1/ROUND_GRID` grid. Rounding up keeps the
    /// ordinary triangle inequality intact for `p = 1`.
    pub fn apply(&self, squared: &Rational) -> Rational {
        if self.halves.is_multiple_of(4) {
            return num_traits::pow(squared.clone(), (self.halves / 4) as usize);
        }
        // (ROUND_GRID * d^p)^4 = ROUND_GRID^4 * (d^2)^halves
        let q = int(ROUND_GRID);
        let fourth = num_traits::pow(q.clone(), 4) * num_traits::pow(squared.clone(), self.halves as usize);
        Rational::from_integer(ceil_root(&fourth, 4)) / q
    }
}

/// Powered Euclidean distances between the given points. `declared_beta` is
/// set to the computed β when that is finite.
pub fn instance_from_points(
    name: impl Into<String>,
    points: &[Point],
    power: EuclideanPower,
) -> Result<Instance> {
    let inst = Instance::from_fn(name, points.len(), |u, v| {
        let dx = &points[u].0 - &points[v].0;
        let dy = &points[u].1 - &points[v].1;
        power.apply(&(&dx * &dx + &dy * &dy))
    })?;
    match beta_of(&inst)? {
        Beta::Finite(b) => inst.with_declared_beta(b),
        Beta::Infinite => Ok(inst),
    }
}

/// `n` distinct lattice points in the unit square, weights `d(u,v)^p`.
pub fn gen_euclidean_power(n: usize, p: &Rational, seed: u64) -> Result<Instance> {
    if n < 3 {
        return Err(Error::Domain(format!("instance needs n >= 3, got {n}")));
    }
    let power = EuclideanPower::new(p)?;
    if (n as i64) > (COORD_GRID + 1) * (COORD_GRID + 1) {
        return Err(Error::Domain("too many points for the coordinate grid".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = std::collections::BTreeSet::new();
    let mut points = Vec::with_capacity(n);
    while points.len() < n {
        let x = rng.gen_range(0..=COORD_GRID);
        let y = rng.gen_range(0..=COORD_GRID);
        if seen.insert((x, y)) {
            let g = int(COORD_GRID);
            points.push((int(x) / &g, int(y) / &g));
        }
    }
    let name = format!("euclid-p{}-n{n}-s{seed}", format_rational(p).replace('/', "_"));
    let inst = instance_from_points(name, &points, power)?;
    debug_assert!(inst.declared_beta().is_some());
    debug_assert!(inst.pairs().all(|(u, v)| inst.weight(u, v).is_positive()));
    Ok(inst)
}
