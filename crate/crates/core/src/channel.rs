//! Single-path far-field channels and uniform linear array responses.

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::config::{ArrayLayout, SystemConfig};
use crate::error::{Error, Result};
use crate::grid::SubcarrierGrid;
use crate::SPEED_OF_LIGHT;

/// Column vector of complex antenna weights or responses.
pub type ArrayVector = DVector<Complex64>;

/// Geometry and per-subcarrier gains of one user's path.
#[derive(Debug, Clone, PartialEq)]
pub struct UserPath {
    /// Spatial direction at the carrier, `sin` of the departure angle.
    pub psi: f64,
    /// Receive-side spatial direction, `sin` of the arrival angle.
    pub phi: f64,
    pub distance_m: f64,
    /// Propagation delay `distance / c`, seconds.
    pub delay_s: f64,
    /// Complex path gain per subcarrier, in grid order.
    pub gains: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub users: Vec<UserPath>,
}

/// Spreading loss at `freq_hz` over `distance_m` with an exponential absorption
/// term, as an amplitude.
pub fn path_amplitude(freq_hz: f64, distance_m: f64, absorption_per_m: f64) -> f64 {
    SPEED_OF_LIGHT / (4.0 * PI * freq_hz * distance_m)
        * libm::exp(-0.5 * absorption_per_m * distance_m)
}

/// Draws one channel: departure and arrival angles uniform on `[-pi/2, pi/2]`,
/// one uniform phase per user, deterministic spreading and absorption loss.
///
/// Random draws are consumed user by user in the order departure angle,
/// arrival angle, phase.
pub fn synthesize_channel<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    grid: &SubcarrierGrid,
    rng: &mut R,
) -> Result<ChannelRealization> {
    if cfg.distances_m.len() != cfg.users {
        return Err(Error::DistanceCount {
            expected: cfg.users,
            got: cfg.distances_m.len(),
        });
    }
    let mut users = Vec::with_capacity(cfg.users);
    for &d in &cfg.distances_m {
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::Domain {
                name: "distance_m",
                value: d,
            });
        }
        let departure = rng.random_range(-PI / 2.0..=PI / 2.0);
        let arrival = rng.random_range(-PI / 2.0..=PI / 2.0);
        let theta = rng.random_range(0.0..2.0 * PI);
        let rotation = Complex64::from_polar(1.0, theta);
        let gains = grid
            .freqs()
            .iter()
            .map(|&f| rotation * path_amplitude(f, d, cfg.absorption_per_m))
            .collect();
        users.push(UserPath {
            psi: libm::sin(departure),
            phi: libm::sin(arrival),
            distance_m: d,
            delay_s: d / SPEED_OF_LIGHT,
            gains,
        });
    }
    Ok(ChannelRealization { users })
}

impl ChannelRealization {
    pub fn user_count(&self) -> usize {
        self.users.len()
    }

    /// Gain of user `n` at the 1-based subcarrier `k`.
    pub fn gain(&self, k: usize, n: usize) -> Complex64 {
        self.users[n].gains[k - 1]
    }

    /// Scalar in front of `v u^H` in the channel matrix:
    /// `sqrt(N_t N_r) * alpha * exp(-j 2 pi f_k tau)`.
    pub fn path_coefficient(
        &self,
        grid: &SubcarrierGrid,
        cfg: &SystemConfig,
        k: usize,
        n: usize,
    ) -> Result<Complex64> {
        let f = grid.frequency(k)?;
        let user = &self.users[n];
        // Reduce f * tau to its fractional cycle before forming the phase.
        let cycles = f * user.delay_s;
        let frac = cycles - libm::floor(cycles);
        let scale = libm::sqrt((cfg.tx_antennas * cfg.rx_antennas) as f64);
        Ok(user.gains[k - 1] * scale * Complex64::from_polar(1.0, -2.0 * PI * frac))
    }
}

/// Entry `i` (0-based) of a half-wavelength ULA response with `len` elements:
/// `exp(-j pi xi psi i) / sqrt(len)`.
#[inline]
pub(crate) fn ula_entry(ratio: f64, direction: f64, i: usize, norm: f64) -> Complex64 {
    Complex64::from_polar(norm, -PI * ratio * direction * i as f64)
}

fn ula_response(
    grid: &SubcarrierGrid,
    direction: f64,
    k: usize,
    len: usize,
) -> Result<ArrayVector> {
    let ratio = grid.ratio(k)?;
    let norm = 1.0 / libm::sqrt(len as f64);
    Ok(ArrayVector::from_fn(len, |i, _| {
        ula_entry(ratio, direction, i, norm)
    }))
}

/// Transmit array response `u_{k}` for direction `psi` at 1-based subcarrier `k`.
pub fn tx_array_response(
    grid: &SubcarrierGrid,
    psi: f64,
    k: usize,
    tx_antennas: usize,
) -> Result<ArrayVector> {
    ula_response(grid, psi, k, tx_antennas)
}

/// Receive array response `v_{k}` for direction `phi`.
pub fn rx_array_response(
    grid: &SubcarrierGrid,
    phi: f64,
    k: usize,
    rx_antennas: usize,
) -> Result<ArrayVector> {
    ula_response(grid, phi, k, rx_antennas)
}

/// Slice of the transmit response that belongs to the 1-based subarray `l`.
/// Keeps the full-array normalization `1/sqrt(N_t)`, so the squared norm is
/// `1/N_RF`, and stacking all subarrays reproduces [`tx_array_response`].
pub fn subarray_response(
    grid: &SubcarrierGrid,
    psi: f64,
    k: usize,
    l: usize,
    layout: &ArrayLayout,
) -> Result<ArrayVector> {
    layout.check_subarray(l)?;
    let ratio = grid.ratio(k)?;
    let len = layout.subarray_len();
    let offset = (l - 1) * len;
    let norm = 1.0 / libm::sqrt(layout.tx_antennas as f64);
    Ok(ArrayVector::from_fn(len, |i, _| {
        ula_entry(ratio, psi, offset + i, norm)
    }))
}

/// Dense `N_r x N_t` channel of user `n` at 1-based subcarrier `k`.
pub fn channel_matrix(
    real: &ChannelRealization,
    grid: &SubcarrierGrid,
    k: usize,
    n: usize,
    cfg: &SystemConfig,
) -> Result<DMatrix<Complex64>> {
    let user = &real.users[n];
    let coeff = real.path_coefficient(grid, cfg, k, n)?;
    let v = rx_array_response(grid, user.phi, k, cfg.rx_antennas)?;
    let u = tx_array_response(grid, user.psi, k, cfg.tx_antennas)?;
    Ok((v * u.adjoint()) * coeff)
}
