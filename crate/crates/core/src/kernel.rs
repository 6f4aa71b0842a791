//! Scaled-integer evaluation of interim expected utilities.
//!
//! For a fixed agent and own type, interim expected utilities of the agent's
//! strategies share the positive factor `1 / marginal`, so comparing them only
//! needs `Σ φ(θ) u(g(·), θ_i)`. Scaling the prior by the lcm of its
//! denominators and each agent's utilities by the lcm of theirs turns these
//! sums into integer sums with the same order. Small games run on `i128`
//! (bounds are checked once up front so no sum can overflow); anything else
//! runs on `BigInt`. Both paths are exact.

use std::ops::{AddAssign, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::game::{GameSpec, Mechanism};
use crate::rational::Rational;

pub(crate) trait Score: Clone + Zero + Ord + AddAssign + Send + Sync
where
    for<'a> &'a Self: Mul<&'a Self, Output = Self>,
{
}

impl Score for i128 {}
impl Score for BigInt {}

pub(crate) struct Tables<T> {
    // [agent][type] -> (scaled prior weight, type-profile index), zero weights dropped
    support: Vec<Vec<Vec<(T, usize)>>>,
    // [agent][type][outcome]
    utils: Vec<Vec<Vec<T>>>,
    thetas: Vec<Vec<usize>>,
}

pub(crate) enum Kernel {
    Small(Tables<i128>),
    Big(Tables<BigInt>),
}

/// A candidate profile: `strategy(agent, own_type)`.
pub(crate) trait ProfileView {
    fn strategy(&self, agent: usize, own_type: usize) -> usize;
}

impl<F: Fn(usize, usize) -> usize> ProfileView for F {
    fn strategy(&self, agent: usize, own_type: usize) -> usize {
        self(agent, own_type)
    }
}

fn lcm_of_denominators<'a>(values: impl Iterator<Item = &'a Rational>) -> BigInt {
    values.fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

fn scale(value: &Rational, factor: &BigInt) -> BigInt {
    value.numer() * (factor / value.denom())
}

impl Kernel {
    pub(crate) fn new(spec: &GameSpec) -> Result<Self> {
        let prior_lcm = lcm_of_denominators(spec.prior_table().iter());
        let weights: Vec<BigInt> = spec
            .prior_table()
            .iter()
            .map(|p| scale(p, &prior_lcm))
            .collect();
        let thetas: Vec<Vec<usize>> = spec.type_profiles().iter().collect();

        let mut support = Vec::with_capacity(spec.num_agents());
        let mut utils = Vec::with_capacity(spec.num_agents());
        let mut max_bits = 0u64;
        let mut max_support = 1usize;
        for (agent, table) in spec.utility_tables().iter().enumerate() {
            let n_types = spec.type_space(agent).len();
            let mut per_type: Vec<Vec<(BigInt, usize)>> = vec![Vec::new(); n_types];
            for (idx, theta) in thetas.iter().enumerate() {
                if !weights[idx].is_zero() {
                    per_type[theta[agent]].push((weights[idx].clone(), idx));
                }
            }
            for (t, entries) in per_type.iter().enumerate() {
                let mass: BigInt = entries.iter().map(|(w, _)| w).sum();
                if !mass.is_positive() {
                    return Err(Error::ZeroMarginal {
                        agent,
                        type_index: t,
                    });
                }
                max_support = max_support.max(entries.len());
            }
            let util_lcm = lcm_of_denominators(table.iter().flatten());
            // stored [type][outcome] for locality in the hot loop
            let scaled: Vec<Vec<BigInt>> = (0..n_types)
                .map(|t| table.iter().map(|row| scale(&row[t], &util_lcm)).collect())
                .collect();
            let w_bits = per_type
                .iter()
                .flatten()
                .map(|(w, _)| w.bits())
                .max()
                .unwrap_or(0);
            let u_bits = scaled.iter().flatten().map(BigInt::bits).max().unwrap_or(0);
            max_bits = max_bits.max(w_bits + u_bits);
            support.push(per_type);
            utils.push(scaled);
        }

        let support_bits = u64::from(usize::BITS - max_support.leading_zeros());
        if max_bits + support_bits < 126 {
            let to_small = |v: &BigInt| v.to_i128().expect("bounded by bit check");
            Ok(Kernel::Small(Tables {
                support: support
                    .iter()
                    .map(|a| {
                        a.iter()
                            .map(|t| t.iter().map(|(w, i)| (to_small(w), *i)).collect())
                            .collect()
                    })
                    .collect(),
                utils: utils
                    .iter()
                    .map(|a| a.iter().map(|t| t.iter().map(to_small).collect()).collect())
                    .collect(),
                thetas,
            }))
        } else {
            Ok(Kernel::Big(Tables {
                support,
                utils,
                thetas,
            }))
        }
    }

    #[cfg(test)]
    pub(crate) fn is_small(&self) -> bool {
        matches!(self, Kernel::Small(_))
    }

    /// Lexicographically first `(agent, type, deviation)` that strictly gains.
    pub(crate) fn first_deviation(
        &self,
        mech: &Mechanism,
        view: &impl ProfileView,
    ) -> Option<(usize, usize, usize)> {
        match self {
            Kernel::Small(t) => t.first_deviation(mech, view, &mut Vec::new()),
            Kernel::Big(t) => t.first_deviation(mech, view, &mut Vec::new()),
        }
    }

    /// Dense ranks of the agent's own strategies by interim expected utility
    /// against `view`: equal utilities get equal ranks, higher utility a
    /// higher rank.
    pub(crate) fn ranks(
        &self,
        mech: &Mechanism,
        view: &impl ProfileView,
        agent: usize,
        own_type: usize,
    ) -> Vec<usize> {
        match self {
            Kernel::Small(t) => t.ranks(mech, view, agent, own_type),
            Kernel::Big(t) => t.ranks(mech, view, agent, own_type),
        }
    }

    /// Indices in `[start, end)` of the flat profile encoding that are BNE.
    pub(crate) fn scan(
        &self,
        mech: &Mechanism,
        layout: &FlatLayout,
        start: u64,
        end: u64,
    ) -> Vec<Vec<usize>> {
        match self {
            Kernel::Small(t) => t.scan(mech, layout, start, end),
            Kernel::Big(t) => t.scan(mech, layout, start, end),
        }
    }
}

impl<T: Score> Tables<T>
where
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    fn scores(
        &self,
        mech: &Mechanism,
        view: &impl ProfileView,
        agent: usize,
        own_type: usize,
        out: &mut Vec<T>,
    ) {
        let n_own = mech.strategy_set(agent).len();
        let strides = mech.profiles().strides();
        let table = mech.outcome_table();
        let utils = &self.utils[agent][own_type];
        out.clear();
        out.resize(n_own, T::zero());
        for (w, idx) in &self.support[agent][own_type] {
            let theta = &self.thetas[*idx];
            let mut base = 0;
            for (j, &tj) in theta.iter().enumerate() {
                if j != agent {
                    base += strides[j] * view.strategy(j, tj);
                }
            }
            for (s, slot) in out.iter_mut().enumerate() {
                let x = table[base + strides[agent] * s];
                *slot += w * &utils[x];
            }
        }
    }

    fn first_deviation(
        &self,
        mech: &Mechanism,
        view: &impl ProfileView,
        scratch: &mut Vec<T>,
    ) -> Option<(usize, usize, usize)> {
        for agent in 0..self.support.len() {
            for own_type in 0..self.support[agent].len() {
                self.scores(mech, view, agent, own_type, scratch);
                let prescribed = &scratch[view.strategy(agent, own_type)];
                if let Some(dev) = scratch.iter().position(|s| s > prescribed) {
                    return Some((agent, own_type, dev));
                }
            }
        }
        None
    }

    fn ranks(
        &self,
        mech: &Mechanism,
        view: &impl ProfileView,
        agent: usize,
        own_type: usize,
    ) -> Vec<usize> {
        let mut scores = Vec::new();
        self.scores(mech, view, agent, own_type, &mut scores);
        let mut sorted = scores.clone();
        sorted.sort();
        sorted.dedup();
        scores
            .iter()
            .map(|s| sorted.binary_search(s).expect("present"))
            .collect()
    }

    fn scan(&self, mech: &Mechanism, layout: &FlatLayout, start: u64, end: u64) -> Vec<Vec<usize>> {
        let mut found = Vec::new();
        if start >= end {
            return found;
        }
        let mut digits = layout.digits(start);
        let mut scratch = Vec::new();
        let mut index = start;
        loop {
            let view = |agent: usize, t: usize| digits[layout.offsets[agent] + t];
            if self.first_deviation(mech, &view, &mut scratch).is_none() {
                found.push(digits.clone());
            }
            index += 1;
            if index == end {
                break;
            }
            layout.increment(&mut digits);
        }
        found
    }
}

/// Flat encoding of a strategy profile: one digit per (agent, type), agents in
/// order, types in order within an agent; the first digit is most significant.
pub(crate) struct FlatLayout {
    pub(crate) offsets: Vec<usize>,
    pub(crate) radices: Vec<u64>,
}

impl FlatLayout {
    pub(crate) fn new(spec: &GameSpec, mech: &Mechanism) -> Self {
        let mut offsets = Vec::with_capacity(spec.num_agents());
        let mut radices = Vec::new();
        for agent in 0..spec.num_agents() {
            offsets.push(radices.len());
            let r = mech.strategy_set(agent).len() as u64;
            radices.extend(std::iter::repeat_n(r, spec.type_space(agent).len()));
        }
        Self { offsets, radices }
    }

    pub(crate) fn digits(&self, mut index: u64) -> Vec<usize> {
        let mut out = vec![0; self.radices.len()];
        for (slot, &r) in out.iter_mut().zip(&self.radices).rev() {
            *slot = (index % r) as usize;
            index /= r;
        }
        out
    }

    pub(crate) fn increment(&self, digits: &mut [usize]) {
        for (d, &r) in digits.iter_mut().zip(&self.radices).rev() {
            *d += 1;
            if (*d as u64) < r {
                return;
            }
            *d = 0;
        }
    }

    pub(crate) fn split(&self, digits: &[usize]) -> Vec<Vec<usize>> {
        let mut bounds = self.offsets.clone();
        bounds.push(digits.len());
        bounds
            .windows(2)
            .map(|w| digits[w[0]..w[1]].to_vec())
            .collect()
    }
}
