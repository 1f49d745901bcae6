//! OFDM subcarrier grid and the discrete TTD delay set.

use alloc::vec::Vec;

use crate::config::SystemConfig;
use crate::error::{Error, Result};

/// Subcarrier frequencies `f_k`, their ratios `xi_k = f_k / f_c`, and the
/// mean squared ratio `Gamma = (1/K) sum_k xi_k^2`, which has the closed form
/// `1 + B^2 (K^2 - 1) / (12 f_c^2 K^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubcarrierGrid {
    carrier_hz: f64,
    freqs: Vec<f64>,
    ratios: Vec<f64>,
    gamma_factor: f64,
}

impl SubcarrierGrid {
    pub fn new(cfg: &SystemConfig) -> Self {
        let k_total = cfg.subcarriers;
        let fc = cfg.carrier_frequency_hz;
        let b = cfg.bandwidth_hz;
        let kf = k_total as f64;
        let center = (kf - 1.0) / 2.0;
        // k is 1-based here so that the offset reads k - 1 - (K - 1)/2.
        let freqs: Vec<f64> = (1..=k_total)
            .map(|k| fc + (b / kf) * ((k - 1) as f64 - center))
            .collect();
        let ratios = freqs.iter().map(|f| f / fc).collect();
        let gamma_factor = 1.0 + b * b * (kf * kf - 1.0) / (12.0 * fc * fc * kf * kf);
        Self {
            carrier_hz: fc,
            freqs,
            ratios,
            gamma_factor,
        }
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn carrier_hz(&self) -> f64 {
        self.carrier_hz
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn ratios(&self) -> &[f64] {
        &self.ratios
    }

    pub fn gamma_factor(&self) -> f64 {
        self.gamma_factor
    }

    /// 1-based index of the subcarrier sitting on the carrier.
    pub fn central_index(&self) -> usize {
        self.len().div_ceil(2)
    }

    /// Frequency of the 1-based subcarrier `k`.
    pub fn frequency(&self, k: usize) -> Result<f64> {
        self.slot(k).map(|i| self.freqs[i])
    }

    /// Ratio `f_k / f_c` of the 1-based subcarrier `k`.
    pub fn ratio(&self, k: usize) -> Result<f64> {
        self.slot(k).map(|i| self.ratios[i])
    }

    fn slot(&self, k: usize) -> Result<usize> {
        if k == 0 || k > self.len() {
            return Err(Error::IndexOutOfRange {
                what: "subcarrier",
                index: k,
                len: self.len(),
            });
        }
        Ok(k - 1)
    }
}

/// The uniform delay set `{0, step, 2 step, ..., (levels - 1) step}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TtdGrid {
    levels: usize,
    step_s: f64,
}

impl TtdGrid {
    pub fn new(levels: usize, step_s: f64) -> Result<Self> {
        if levels == 0 {
            return Err(Error::Domain {
                name: "ttd_levels",
                value: 0.0,
            });
        }
        if !(step_s > 0.0 && step_s.is_finite()) {
            return Err(Error::Domain {
                name: "ttd_step_s",
                value: step_s,
            });
        }
        Ok(Self { levels, step_s })
    }

    pub fn from_config(cfg: &SystemConfig) -> Result<Self> {
        Self::new(cfg.ttd_levels, cfg.ttd_step_s)
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn step_s(&self) -> f64 {
        self.step_s
    }

    pub fn max_delay_s(&self) -> f64 {
        (self.levels - 1) as f64 * self.step_s
    }

    pub fn value(&self, level: usize) -> f64 {
        level as f64 * self.step_s
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.levels).map(|i| self.value(i))
    }

    /// Whether `t` lies inside `[0, max_delay]`.
    pub fn in_range(&self, t: f64) -> bool {
        (0.0..=self.max_delay_s()).contains(&t)
    }

    /// Nearest grid delay to `t`. Ties go to the smaller delay, and values
    /// beyond either end land on that end.
    pub fn quantize(&self, t: f64) -> f64 {
        let top = self.levels - 1;
        let pos = t / self.step_s;
        if pos.is_nan() || pos <= 0.0 {
            return 0.0;
        }
        if pos >= top as f64 {
            return self.value(top);
        }
        let lo = libm::floor(pos) as usize;
        let hi = (lo + 1).min(top);
        let (lo_v, hi_v) = (self.value(lo), self.value(hi));
        if hi_v - t < t - lo_v {
            hi_v
        } else {
            lo_v
        }
    }
}

/// Free-function form of [`TtdGrid::quantize`].
pub fn quantize_delay(t: f64, grid: &TtdGrid) -> f64 {
    grid.quantize(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const PS: f64 = 1e-12;

    fn paper_grid() -> SubcarrierGrid {
        SubcarrierGrid::new(&SystemConfig::paper_scale())
    }

    #[test]
    fn central_subcarrier_sits_on_carrier() {
        let g = paper_grid();
        assert_eq!(g.central_index(), 513);
        assert_eq!(g.frequency(513).unwrap(), 300e9);
        assert_eq!(g.ratio(513).unwrap(), 1.0);
    }

    #[test]
    fn first_subcarrier() {
        let g = paper_grid();
        let f1 = 300e9 - 30e9 * (512.0 / 1025.0);
        let xi1 = 1.0 - 0.1 * 512.0 / 1025.0;
        assert!((g.frequency(1).unwrap() - f1).abs() <= 1e-15 * f1);
        assert!((g.ratio(1).unwrap() - xi1).abs() <= 1e-15);
    }

    #[test]
    fn gamma_matches_brute_force_mean_square() {
        let g = paper_grid();
        let closed = 1.0 + 0.01 * (1025.0f64 * 1025.0 - 1.0) / (12.0 * 1025.0 * 1025.0);
        assert!((g.gamma_factor() - closed).abs() < 1e-15);
        // independent route: evaluate every xi_k straight from the offset formula
        let brute: f64 = (1..=1025)
            .map(|k| {
                let xi = 1.0 + 0.1 * ((k as f64 - 1.0 - 512.0) / 1025.0);
                xi * xi
            })
            .sum::<f64>()
            / 1025.0;
        assert!((brute - closed).abs() < 1e-13);
    }

    #[test]
    fn subcarrier_index_bounds() {
        let g = paper_grid();
        assert!(g.frequency(0).is_err());
        assert!(g.frequency(1026).is_err());
        assert!(g.ratio(1025).is_ok());
    }

    #[test]
    fn quantizer_examples() {
        let grid = TtdGrid::new(400, 4.0 * PS).unwrap();
        assert_eq!(grid.quantize(0.0), 0.0);
        assert_eq!(grid.quantize(5.9 * PS), 4.0 * PS);
        assert_eq!(grid.quantize(-3.0 * PS), 0.0);
        assert_eq!(grid.quantize(1e-6), grid.max_delay_s());
        assert!((grid.max_delay_s() - 1596.0 * PS).abs() < 1e-24);
    }

    #[test]
    fn quantizer_ties_go_down() {
        let grid = TtdGrid::new(4, 1.0).unwrap();
        assert_eq!(grid.quantize(0.5), 0.0);
        assert_eq!(grid.quantize(1.5), 1.0);
        assert_eq!(grid.quantize(2.5), 2.0);
        assert_eq!(grid.quantize(2.5000001), 3.0);
    }

    #[test]
    fn ttd_grid_values() {
        let grid = TtdGrid::new(3, 2.0).unwrap();
        let v: alloc::vec::Vec<f64> = grid.values().collect();
        assert_eq!(v, [0.0, 2.0, 4.0]);
        assert!(TtdGrid::new(0, 1.0).is_err());
        assert!(TtdGrid::new(3, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn quantizer_idempotent(t in -1e-9f64..3e-9) {
            let grid = TtdGrid::new(400, 4.0 * PS).unwrap();
            let q = grid.quantize(t);
            prop_assert_eq!(grid.quantize(q), q);
        }

        #[test]
        fn quantizer_error_within_half_step(t in 0.0f64..1596e-12) {
            let grid = TtdGrid::new(400, 4.0 * PS).unwrap();
            prop_assert!((grid.quantize(t) - t).abs() <= 2.0 * PS * (1.0 + 1e-9));
        }

        #[test]
        fn quantizer_is_nearest_grid_point(t in -10.0f64..30.0, step in 0.1f64..3.0, levels in 1usize..20) {
            let grid = TtdGrid::new(levels, step).unwrap();
            let q = grid.quantize(t);
            let best = grid.values().map(|v| (v - t).abs()).fold(f64::INFINITY, f64::min);
            prop_assert!((q - t).abs() <= best + 1e-12);
        }

        #[test]
        fn ratio_sums(k_half in 0usize..600, fc in 1e9f64..1e12, frac in 0.0f64..0.5) {
            let cfg = SystemConfig {
                subcarriers: 2 * k_half + 1,
                carrier_frequency_hz: fc,
                bandwidth_hz: fc * frac + 1.0,
                ..SystemConfig::desk_scale()
            };
            let g = SubcarrierGrid::new(&cfg);
            let kf = cfg.subcarriers as f64;
            let sum: f64 = g.ratios().iter().sum();
            let sum_sq: f64 = g.ratios().iter().map(|x| x * x).sum();
            prop_assert!((sum - kf).abs() <= 1e-12 * kf);
            prop_assert!((sum_sq - g.gamma_factor() * kf).abs() <= 1e-12 * kf);
        }
    }
}
