//! Complete weighted graphs with exact rational weights, the relaxed
//! triangle parameter β, generators and file formats.

mod format;
mod generate;

pub use format::{parse_instance, write_native, Format};
pub use generate::{
    gen_euclidean_power, gen_uniform_beta, instance_from_points, EuclideanPower, Point,
};

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational};

pub type Vertex = usize;

/// Result of [`beta_of`]: the smallest β ≥ 1 for which the relaxed triangle
/// inequality holds, or `Infinite` when a positive weight is spanned by a
/// zero-weight two-path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Beta {
    Finite(Rational),
    Infinite,
}

impl Beta {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Beta::Finite(b) => Some(b),
            Beta::Infinite => None,
        }
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Beta::Finite(b) => write!(f, "{}", format_rational(b)),
            Beta::Infinite => write!(f, "inf"),
        }
    }
}

/// A complete graph on `n` vertices with a symmetric weight matrix.
///
/// Weights may be negative; operations that need the β-TSP setting check
/// non-negativity themselves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    name: String,
    n: usize,
    weights: Vec<Rational>,
    declared_beta: Option<Rational>,
}

impl Instance {
    /// Builds an instance from a full matrix, checking symmetry and the zero
    /// diagonal.
    pub fn from_matrix(name: impl Into<String>, matrix: Vec<Vec<Rational>>) -> Result<Self> {
        let n = matrix.len();
        if n < 3 {
            return Err(Error::Domain(format!("instance needs n >= 3, got {n}")));
        }
        let mut weights = Vec::with_capacity(n * n);
        for (u, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Domain(format!(
                    "row {u} has {} entries, expected {n}",
                    row.len()
                )));
            }
            weights.extend(row.iter().cloned());
        }
        for u in 0..n {
            if !weights[u * n + u].is_zero() {
                return Err(Error::Domain(format!("diagonal entry ({u},{u}) is not zero")));
            }
            for v in (u + 1)..n {
                if weights[u * n + v] != weights[v * n + u] {
                    return Err(Error::Domain(format!("weights ({u},{v}) and ({v},{u}) differ")));
                }
            }
        }
        Ok(Instance {
            name: name.into(),
            n,
            weights,
            declared_beta: None,
        })
    }

    /// Builds an instance from a weight function evaluated on pairs `u < v`.
    pub fn from_fn(
        name: impl Into<String>,
        n: usize,
        mut weight: impl FnMut(Vertex, Vertex) -> Rational,
    ) -> Result<Self> {
        if n < 3 {
            return Err(Error::Domain(format!("instance needs n >= 3, got {n}")));
        }
        let mut weights = vec![Rational::zero(); n * n];
        for u in 0..n {
            for v in (u + 1)..n {
                let w = weight(u, v);
                weights[u * n + v] = w.clone();
                weights[v * n + u] = w;
            }
        }
        Ok(Instance {
            name: name.into(),
            n,
            weights,
            declared_beta: None,
        })
    }

    /// Attaches a declared β after validating it against [`beta_of`].
    pub fn with_declared_beta(mut self, beta: Rational) -> Result<Self> {
        if beta < Rational::one() {
            return Err(Error::Domain(format!(
                "declared beta {} is below 1",
                format_rational(&beta)
            )));
        }
        match beta_of(&self)? {
            Beta::Finite(actual) if actual <= beta => {}
            actual => {
                return Err(Error::Domain(format!(
                    "declared beta {} is smaller than the instance's beta {}",
                    format_rational(&beta),
                    actual
                )))
            }
        }
        self.declared_beta = Some(beta);
        Ok(self)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn declared_beta(&self) -> Option<&Rational> {
        self.declared_beta.as_ref()
    }

    #[inline]
    pub fn weight(&self, u: Vertex, v: Vertex) -> &Rational {
        &self.weights[u * self.n + v]
    }

    pub fn is_nonnegative(&self) -> bool {
        self.weights.iter().all(|w| !w.is_negative())
    }

    /// Unordered pairs `(u, v)`, `u < v`, in lexicographic order. The position
    /// of a pair in this sequence is its edge index.
    pub fn pairs(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |u| ((u + 1)..n).map(move |v| (u, v)))
    }

    pub fn num_pairs(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    /// Lexicographic index of the pair `{u, v}`.
    pub fn pair_index(&self, u: Vertex, v: Vertex) -> usize {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        debug_assert!(a != b && b < self.n);
        a * (2 * self.n - a - 1) / 2 + (b - a - 1)
    }

    /// Weight of the closed tour visiting `order` in sequence.
    pub fn tour_weight(&self, order: &[Vertex]) -> Rational {
        let k = order.len();
        (0..k).fold(Rational::zero(), |acc, i| {
            acc + self.weight(order[i], order[(i + 1) % k])
        })
    }

    pub fn min_weight(&self) -> Rational {
        self.pairs()
            .map(|(u, v)| self.weight(u, v).clone())
            .min()
            .expect("n >= 3")
    }

    pub fn max_weight(&self) -> Rational {
        self.pairs()
            .map(|(u, v)| self.weight(u, v).clone())
            .max()
            .expect("n >= 3")
    }

    pub fn total_weight(&self) -> Rational {
        self.pairs()
            .fold(Rational::zero(), |acc, (u, v)| acc + self.weight(u, v))
    }
}

/// The smallest β ≥ 1 with `w(u,w) <= β (w(u,v) + w(v,w))` for every triple
/// of distinct vertices.
pub fn beta_of(inst: &Instance) -> Result<Beta> {
    if !inst.is_nonnegative() {
        return Err(Error::Domain(
            "beta is only defined for non-negative weights".into(),
        ));
    }
    let n = inst.n();
    let mut best = Rational::one();
    for mid in 0..n {
        for a in 0..n {
            if a == mid {
                continue;
            }
            for b in (a + 1)..n {
                if b == mid {
                    continue;
                }
                let num = inst.weight(a, b);
                let den = inst.weight(a, mid) + inst.weight(mid, b);
                if den.is_zero() {
                    if num.is_positive() {
                        return Ok(Beta::Infinite);
                    }
                    continue;
                }
                // num / den > best  <=>  num > best * den  (den > 0)
                if num > &(&best * &den) {
                    best = num / den;
                }
            }
        }
    }
    Ok(Beta::Finite(best))
}

/// `max(1, beta_of)` as a finite rational, rejecting infinite β.
pub fn effective_beta(inst: &Instance) -> Result<Rational> {
    match beta_of(inst)? {
        Beta::Finite(b) => Ok(b),
        Beta::Infinite => Err(Error::Domain(
            "instance has infinite beta (zero-weight two-path under a positive edge)".into(),
        )),
    }
}
