//! Digital precoding on the receive-combined effective channel.
//!
//! With a single-path channel, user `n` at subcarrier `k` sees the `1 x N_RF`
//! row `beta_{k,n} * [u_{k,n,l}^H f_{k,l}]_l`, where `beta` is the scalar path
//! coefficient. Stacking the users gives the `N x N_RF` effective channel the
//! zero-forcing stage inverts.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::allocation::Allocation;
use crate::analog::{assemble_analog_precoder, AnalogPrecoder, BlockPrecoder};
use crate::channel::{subarray_response, ChannelRealization};
use crate::config::{DigitalScheme, SystemConfig};
use crate::error::{Error, Result};
use crate::grid::SubcarrierGrid;

/// Smallest-to-largest singular value ratio below which ZF is refused.
pub const CONDITION_FLOOR: f64 = 1e-10;

/// Analog-stage quantities at one subcarrier.
#[derive(Debug, Clone, PartialEq)]
pub struct SubcarrierLink {
    /// `u_{k,n,l}^H f_{k,l}` for every user `n` (row) and subarray `l` (column).
    pub coupling: DMatrix<Complex64>,
    /// Coupling rows scaled by each user's path coefficient.
    pub effective: DMatrix<Complex64>,
    /// `||f_{k,l}||^2` per subarray.
    pub block_power: Vec<f64>,
}

/// Effective channels of every subcarrier for one channel draw and analog design.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveLink {
    pub subcarriers: Vec<SubcarrierLink>,
}

fn coupling_matrix(
    real: &ChannelRealization,
    blocks: &BlockPrecoder,
    grid: &SubcarrierGrid,
    cfg: &SystemConfig,
    k: usize,
) -> Result<DMatrix<Complex64>> {
    let layout = cfg.layout();
    let users = real.user_count();
    let mut c = DMatrix::zeros(users, layout.rf_chains);
    for (n, user) in real.users.iter().enumerate() {
        for (l, f) in blocks.blocks.iter().enumerate() {
            let u = subarray_response(grid, user.psi, k, l + 1, &layout)?;
            c[(n, l)] = u.dotc(f);
        }
    }
    Ok(c)
}

fn scale_rows(
    coupling: &DMatrix<Complex64>,
    real: &ChannelRealization,
    grid: &SubcarrierGrid,
    cfg: &SystemConfig,
    k: usize,
) -> Result<DMatrix<Complex64>> {
    let mut g = coupling.clone();
    for n in 0..real.user_count() {
        let beta = real.path_coefficient(grid, cfg, k, n)?;
        for e in g.row_mut(n).iter_mut() {
            *e *= beta;
        }
    }
    Ok(g)
}

/// `N x N_RF` effective channel at the 1-based subcarrier `k`: row `n` is
/// `v_{k,n}^H H_{k,n} F_1 F_{2,k}`.
pub fn effective_channel(
    real: &ChannelRealization,
    analog: &AnalogPrecoder,
    grid: &SubcarrierGrid,
    cfg: &SystemConfig,
    k: usize,
) -> Result<DMatrix<Complex64>> {
    let blocks = assemble_analog_precoder(analog, grid, k)?;
    let c = coupling_matrix(real, &blocks, grid, cfg, k)?;
    scale_rows(&c, real, grid, cfg, k)
}

impl EffectiveLink {
    pub fn build(
        cfg: &SystemConfig,
        grid: &SubcarrierGrid,
        real: &ChannelRealization,
        analog: &AnalogPrecoder,
    ) -> Result<Self> {
        let subcarriers = (1..=grid.len())
            .map(|k| {
                let blocks = assemble_analog_precoder(analog, grid, k)?;
                let coupling = coupling_matrix(real, &blocks, grid, cfg, k)?;
                let effective = scale_rows(&coupling, real, grid, cfg, k)?;
                let block_power = blocks.blocks.iter().map(|b| b.norm_squared()).collect();
                Ok(SubcarrierLink {
                    coupling,
                    effective,
                    block_power,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { subcarriers })
    }

    /// Link of the 1-based subcarrier `k`.
    pub fn at(&self, k: usize) -> &SubcarrierLink {
        &self.subcarriers[k - 1]
    }
}

/// Right pseudo-inverse `G^H (G G^H)^{-1}`, so `G W = I`.
pub fn zf_precoder(g: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let sv = g.clone().singular_values();
    let largest = sv.max();
    let smallest = sv.min();
    if largest.is_nan() || largest <= 0.0 || smallest < CONDITION_FLOOR * largest {
        let ratio = if largest > 0.0 {
            smallest / largest
        } else {
            0.0
        };
        return Err(Error::Singular { ratio });
    }
    let gram = g * g.adjoint();
    let chol = gram.cholesky().ok_or(Error::Singular {
        ratio: smallest / largest,
    })?;
    Ok(g.adjoint() * chol.inverse())
}

/// Rescales every column to unit norm. Zero columns are left alone.
pub fn equalize_columns(mut w: DMatrix<Complex64>) -> DMatrix<Complex64> {
    for mut col in w.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col.unscale_mut(norm);
        }
    }
    w
}

/// `||F w||_F^2` for the whole digital matrix.
pub fn transmit_power(block_power: &[f64], w: &DMatrix<Complex64>) -> f64 {
    w.column_iter()
        .map(|col| {
            col.iter()
                .zip(block_power)
                .map(|(e, p)| e.norm_sqr() * p)
                .sum::<f64>()
        })
        .sum()
}

/// Scales `w` by one scalar so that `||F w||_F^2 = users`.
pub fn normalize_power(
    block_power: &[f64],
    w: DMatrix<Complex64>,
    users: usize,
) -> Result<DMatrix<Complex64>> {
    let power = transmit_power(block_power, &w);
    if !(power > 0.0 && power.is_finite()) {
        return Err(Error::DegeneratePower);
    }
    Ok(w * Complex64::from(libm::sqrt(users as f64 / power)))
}

/// Column `n` is the indicator of the subarrays allocated to user `n`.
pub fn matched_precoder(alloc: &Allocation, rf_chains: usize) -> DMatrix<Complex64> {
    let mut w = DMatrix::zeros(rf_chains, alloc.counts.len());
    for (n, range) in alloc.ranges.iter().enumerate() {
        for l in range.clone() {
            w[(l - 1, n)] = Complex64::new(1.0, 0.0);
        }
    }
    w
}

#[derive(Debug, Clone, PartialEq)]
pub struct DigitalPrecoder {
    /// `N_RF x N` matrix per subcarrier, in grid order.
    pub matrices: Vec<DMatrix<Complex64>>,
    /// Largest squared column norm over all subcarriers and users.
    pub omega: f64,
    /// Subcarriers where ZF was refused and the matched precoder was used.
    pub fallback_subcarriers: usize,
}

impl DigitalPrecoder {
    pub fn design(link: &EffectiveLink, alloc: &Allocation, scheme: DigitalScheme) -> Result<Self> {
        let users = alloc.counts.len();
        let mut fallback_subcarriers = 0;
        let matrices = link
            .subcarriers
            .iter()
            .map(|sub| {
                let w = match zf_precoder(&sub.effective) {
                    Ok(w) => match scheme {
                        DigitalScheme::ZfEqualPower => equalize_columns(w),
                        DigitalScheme::ZfCommonScale => w,
                    },
                    Err(Error::Singular { .. }) => {
                        fallback_subcarriers += 1;
                        matched_precoder(alloc, sub.block_power.len())
                    }
                    Err(e) => return Err(e),
                };
                normalize_power(&sub.block_power, w, users)
            })
            .collect::<Result<Vec<_>>>()?;
        let omega = max_column_power(&matrices);
        Ok(Self {
            matrices,
            omega,
            fallback_subcarriers,
        })
    }

    /// Digital matrix of the 1-based subcarrier `k`.
    pub fn at(&self, k: usize) -> &DMatrix<Complex64> {
        &self.matrices[k - 1]
    }
}

/// `max_{k,n} ||w_{k,n}||^2`.
pub fn max_column_power(matrices: &[DMatrix<Complex64>]) -> f64 {
    matrices
        .iter()
        .flat_map(|w| w.column_iter().map(|c| c.norm_squared()))
        .fold(0.0, f64::max)
}
