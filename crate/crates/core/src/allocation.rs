//! Max-min fair subarray allocation.
//!
//! With ideal sub-precoders the rate of user `n` is bounded by a term
//! proportional to `alpha_tilde[n] * |S_n|`, where `alpha_tilde[n]` is the sum
//! of squared path-gain magnitudes over the band. Maximizing the smallest of
//! these products over real-valued counts summing to `N_RF` equalizes them:
//!
//! ```text
//! |S_n| = (N_RF / alpha_tilde[n]) / sum_n' (1 / alpha_tilde[n'])
//! ```
//!
//! Weak users get more subarrays. Integer counts come from flooring all but the
//! last user, who takes the remainder.

use alloc::vec::Vec;
use core::ops::RangeInclusive;

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};

// Slack for counts that are integral up to floating-point noise, so that e.g.
// 2.9999999999999996 floors to 3.
const FLOOR_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    /// Subarrays per user.
    pub counts: Vec<usize>,
    /// Consecutive 1-based subarray indices per user, in user order.
    pub ranges: Vec<RangeInclusive<usize>>,
    /// Real-valued counts before rounding.
    pub continuous_counts: Vec<f64>,
}

impl Allocation {
    fn from_counts(counts: Vec<usize>, continuous_counts: Vec<f64>) -> Self {
        let mut next = 1;
        let ranges = counts
            .iter()
            .map(|&c| {
                let r = next..=next + c - 1;
                next += c;
                r
            })
            .collect();
        Self {
            counts,
            ranges,
            continuous_counts,
        }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// User served by the 1-based subarray `l`.
    pub fn owner(&self, l: usize) -> Option<usize> {
        self.ranges.iter().position(|r| r.contains(&l))
    }

    /// Serving user of every subarray, indexed by `l - 1`.
    pub fn owners(&self) -> Vec<usize> {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(n, &c)| core::iter::repeat_n(n, c))
            .collect()
    }
}

/// `sum_k |alpha_{k,n}|^2` for every user.
pub fn sum_channel_gains(real: &ChannelRealization) -> Vec<f64> {
    real.users
        .iter()
        .map(|u| u.gains.iter().map(|g| g.norm_sqr()).sum())
        .collect()
}

/// Real-valued max-min allocation; all products `alpha_tilde[n] * |S_n|` come
/// out equal to `N_RF / sum_n (1/alpha_tilde[n])`.
pub fn continuous_allocation(alpha_tilde: &[f64], subarrays: usize) -> Result<Vec<f64>> {
    for &a in alpha_tilde {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Domain {
                name: "alpha_tilde",
                value: a,
            });
        }
    }
    let inv: Vec<f64> = alpha_tilde.iter().map(|a| 1.0 / a).collect();
    let inv_sum: f64 = inv.iter().sum();
    Ok(inv
        .iter()
        .map(|v| subarrays as f64 * (v / inv_sum))
        .collect())
}

/// Rounds a continuous allocation: floor for every user but the last, who takes
/// what is left. A user left with nothing is raised to one subarray, taken from
/// the largest count (lowest index on ties).
pub fn discretize_allocation(continuous: &[f64], subarrays: usize) -> Result<Allocation> {
    let users = continuous.len();
    if users == 0 || users > subarrays {
        return Err(Error::Infeasible { users, subarrays });
    }
    for &c in continuous {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Domain {
                name: "continuous_count",
                value: c,
            });
        }
    }
    let mut counts: Vec<usize> = continuous[..users - 1]
        .iter()
        .map(|&c| libm::floor(c + FLOOR_SLACK) as usize)
        .collect();
    let assigned: usize = counts.iter().sum();
    counts.push(subarrays.saturating_sub(assigned));
    // The floors can only overshoot through FLOOR_SLACK, and then by at most one
    // per user; take the excess back from the largest counts.
    let mut excess = assigned.saturating_sub(subarrays);
    while excess > 0 {
        let j = argmax(&counts);
        counts[j] -= 1;
        excess -= 1;
    }
    while let Some(z) = counts.iter().position(|&c| c == 0) {
        counts[z] = 1;
        let j = argmax(&counts);
        counts[j] -= 1;
    }
    Ok(Allocation::from_counts(counts, continuous.to_vec()))
}

fn argmax(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

/// Equal split; when `users` does not divide `subarrays` the first users get one
/// extra each.
pub fn uniform_allocation(users: usize, subarrays: usize) -> Result<Allocation> {
    if users == 0 || users > subarrays {
        return Err(Error::Infeasible { users, subarrays });
    }
    let base = subarrays / users;
    let extra = subarrays % users;
    let counts: Vec<usize> = (0..users).map(|n| base + usize::from(n < extra)).collect();
    let continuous = counts.iter().map(|&c| c as f64).collect();
    Ok(Allocation::from_counts(counts, continuous))
}

/// Proposed allocation straight from the channel.
pub fn fair_allocation(real: &ChannelRealization, subarrays: usize) -> Result<Allocation> {
    let alpha_tilde = sum_channel_gains(real);
    let continuous = continuous_allocation(&alpha_tilde, subarrays)?;
    discretize_allocation(&continuous, subarrays)
}
