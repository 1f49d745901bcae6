//! Joint phase-shifter / true-time-delay design per subarray.
//!
//! Subarray `l` forms `f_{k,l} = X_l exp(-j 2 pi f_k t_l)`: TTD `m` applies delay
//! `t_m` to `P` antennas, each with its own phase `pi * x_{m,p}`. We want
//! `f_{k,l}` to match the subarray response of the served user at every
//! subcarrier. In the phase domain, the mismatch of antenna `(m, p)` at
//! subcarrier `k` is
//!
//! ```text
//! r_{k,m,p} = -2 f_c xi_k t_m + x_{m,p} + xi_k gamma_{m,p},
//! gamma_{m,p} = ((l-1) M P + (m-1) P + p - 1) psi
//! ```
//!
//! and `sum_k sum_p r^2` separates per TTD. For fixed phases the best delay is
//! `(sum_p x / Gamma + sum_p gamma) / (2 f_c P)`; for a fixed delay the best
//! phases are `2 f_c t - gamma_p`. The solver alternates the two, snapping each
//! delay onto the TTD grid, until the normalized change falls below the
//! threshold.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::allocation::Allocation;
use crate::channel::{subarray_response, ArrayVector, ChannelRealization};
use crate::config::{ArrayLayout, SolverOptions, SystemConfig, UpdateOrder};
use crate::error::Result;
use crate::grid::{SubcarrierGrid, TtdGrid};

#[derive(Debug, Clone, PartialEq)]
pub struct SubarraySolution {
    /// Delay of each TTD, seconds.
    pub delays: Vec<f64>,
    /// Phase values `x_{m,p}` (applied as `exp(j pi x)`), `M x P`. Not wrapped.
    pub phases: DMatrix<f64>,
    /// Largest iteration count over the TTDs.
    pub iterations_used: usize,
    /// Largest final NMSE over the TTDs.
    pub final_nmse: f64,
    /// TTDs whose last unquantized delay fell outside the grid range.
    pub clamped_ttds: usize,
}

/// One row of the solver trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub l: usize,
    pub m: usize,
    pub iteration: usize,
    pub t_seconds: f64,
    pub nmse: f64,
}

/// `gamma_{m,p}` of subarray `l` (1-based) as an `M x P` matrix.
pub fn gamma_coefficients(psi: f64, l: usize, layout: &ArrayLayout) -> DMatrix<f64> {
    let (m_count, p_count) = (layout.ttds, layout.phase_shifters);
    let base = (l - 1) * m_count * p_count;
    DMatrix::from_fn(m_count, p_count, |m, p| {
        (base + m * p_count + p) as f64 * psi
    })
}

/// Minimizer of the phase-domain mismatch over the delay of one TTD with its
/// phases held fixed.
pub fn ttd_update(phases: &[f64], gammas: &[f64], grid: &SubcarrierGrid) -> f64 {
    let p = gammas.len() as f64;
    let sum_x: f64 = phases.iter().sum();
    let sum_gamma: f64 = gammas.iter().sum();
    (sum_x / grid.gamma_factor() + sum_gamma) / (2.0 * grid.carrier_hz() * p)
}

/// Minimizer over the phases of one TTD with its delay held fixed.
pub fn ps_update(t: f64, gammas: &[f64], carrier_hz: f64) -> Vec<f64> {
    let mut out = vec![0.0; gammas.len()];
    ps_update_into(t, gammas, carrier_hz, &mut out);
    out
}

fn ps_update_into(t: f64, gammas: &[f64], carrier_hz: f64, out: &mut [f64]) {
    for (x, g) in out.iter_mut().zip(gammas) {
        *x = 2.0 * carrier_hz * t - g;
    }
}

/// `sum_k sum_p (-2 f_c xi_k t + x_p + xi_k gamma_p)^2` for one TTD.
pub fn phase_domain_objective(
    t: f64,
    phases: &[f64],
    gammas: &[f64],
    grid: &SubcarrierGrid,
) -> f64 {
    let fc = grid.carrier_hz();
    grid.ratios()
        .iter()
        .map(|&xi| {
            phases
                .iter()
                .zip(gammas)
                .map(|(x, g)| {
                    let r = -2.0 * fc * xi * t + x + xi * g;
                    r * r
                })
                .sum::<f64>()
        })
        .sum()
}

fn nmse(x_new: &[f64], x_old: &[f64], t_new: f64, t_old: f64) -> f64 {
    let dt = t_new - t_old;
    let num: f64 = x_new
        .iter()
        .zip(x_old)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        + dt * dt;
    let den: f64 = x_new.iter().map(|a| a * a).sum::<f64>() + t_new * t_new;
    if den == 0.0 {
        // only the all-zero iterate gets here
        0.0
    } else {
        num / den
    }
}

/// Alternating PS/TTD design for the 1-based subarray `l` serving a user in
/// direction `psi`.
pub fn optimize_subarray(
    grid: &SubcarrierGrid,
    psi: f64,
    l: usize,
    ttd_grid: &TtdGrid,
    cfg: &SystemConfig,
) -> Result<SubarraySolution> {
    solve(grid, psi, l, ttd_grid, &cfg.layout(), &cfg.solver, None)
}

/// Same as [`optimize_subarray`], appending one [`TraceRow`] per iteration.
pub fn optimize_subarray_traced(
    grid: &SubcarrierGrid,
    psi: f64,
    l: usize,
    ttd_grid: &TtdGrid,
    cfg: &SystemConfig,
    trace: &mut Vec<TraceRow>,
) -> Result<SubarraySolution> {
    solve(
        grid,
        psi,
        l,
        ttd_grid,
        &cfg.layout(),
        &cfg.solver,
        Some(trace),
    )
}

fn solve(
    grid: &SubcarrierGrid,
    psi: f64,
    l: usize,
    ttd_grid: &TtdGrid,
    layout: &ArrayLayout,
    opts: &SolverOptions,
    mut trace: Option<&mut Vec<TraceRow>>,
) -> Result<SubarraySolution> {
    layout.check_subarray(l)?;
    let (m_count, p_count) = (layout.ttds, layout.phase_shifters);
    let fc = grid.carrier_hz();
    let gammas = gamma_coefficients(psi, l, layout);

    let mut delays = vec![0.0; m_count];
    let mut phases = DMatrix::zeros(m_count, p_count);
    let mut iterations_used = 0;
    let mut worst_nmse: f64 = 0.0;
    let mut clamped_ttds = 0;

    let mut gamma_row = vec![0.0; p_count];
    let mut x = vec![0.0; p_count];
    let mut x_next = vec![0.0; p_count];

    for m in 0..m_count {
        for (p, g) in gamma_row.iter_mut().enumerate() {
            *g = gammas[(m, p)];
        }
        let mut t = 0.0;
        x.fill(0.0);
        let mut iterations = 0;
        let mut last_nmse = f64::INFINITY;
        let mut clamped = false;
        let mut i = 1;
        while i < opts.max_iterations {
            let raw = ttd_update(&x, &gamma_row, grid);
            let t_next = if opts.quantize_delays {
                clamped = !ttd_grid.in_range(raw);
                ttd_grid.quantize(raw)
            } else {
                raw
            };
            let t_for_phases = match opts.update_order {
                UpdateOrder::GaussSeidel => t_next,
                UpdateOrder::Jacobi => t,
            };
            ps_update_into(t_for_phases, &gamma_row, fc, &mut x_next);
            last_nmse = nmse(&x_next, &x, t_next, t);
            t = t_next;
            core::mem::swap(&mut x, &mut x_next);
            iterations += 1;
            if let Some(tr) = trace.as_deref_mut() {
                tr.push(TraceRow {
                    l,
                    m: m + 1,
                    iteration: iterations,
                    t_seconds: t,
                    nmse: last_nmse,
                });
            }
            if last_nmse <= opts.nmse_threshold {
                break;
            }
            i += 1;
        }
        delays[m] = t;
        for (p, v) in x.iter().enumerate() {
            phases[(m, p)] = *v;
        }
        iterations_used = iterations_used.max(iterations);
        if iterations > 0 {
            worst_nmse = worst_nmse.max(last_nmse);
        }
        clamped_ttds += usize::from(clamped);
    }

    Ok(SubarraySolution {
        delays,
        phases,
        iterations_used,
        final_nmse: worst_nmse,
        clamped_ttds,
    })
}

/// The ideal analog sub-precoder: the served user's subarray response itself.
pub fn ideal_subprecoder(
    grid: &SubcarrierGrid,
    psi: f64,
    k: usize,
    l: usize,
    layout: &ArrayLayout,
) -> Result<ArrayVector> {
    subarray_response(grid, psi, k, l, layout)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalogMethod {
    /// Alternating PS/TTD design.
    Alternating,
    /// Exact match of every subarray response (not realizable in hardware).
    Ideal,
}

/// Analog stage of every subarray.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalogPrecoder {
    pub method: AnalogMethod,
    pub layout: ArrayLayout,
    /// Direction of the user served by each subarray, indexed by `l - 1`.
    pub steering: Vec<f64>,
    /// Per-subarray solutions; empty for [`AnalogMethod::Ideal`].
    pub solutions: Vec<SubarraySolution>,
}

impl AnalogPrecoder {
    /// Runs the alternating solver on every subarray for its allocated user.
    pub fn alternating(
        cfg: &SystemConfig,
        grid: &SubcarrierGrid,
        ttd_grid: &TtdGrid,
        real: &ChannelRealization,
        alloc: &Allocation,
    ) -> Result<Self> {
        let steering: Vec<f64> = alloc.owners().iter().map(|&n| real.users[n].psi).collect();
        let solutions = steering
            .iter()
            .enumerate()
            .map(|(i, &psi)| optimize_subarray(grid, psi, i + 1, ttd_grid, cfg))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            method: AnalogMethod::Alternating,
            layout: cfg.layout(),
            steering,
            solutions,
        })
    }

    pub fn ideal(cfg: &SystemConfig, real: &ChannelRealization, alloc: &Allocation) -> Self {
        Self {
            method: AnalogMethod::Ideal,
            layout: cfg.layout(),
            steering: alloc.owners().iter().map(|&n| real.users[n].psi).collect(),
            solutions: Vec::new(),
        }
    }

    /// Fraction of TTDs that hit the edge of the delay range.
    pub fn clamp_rate(&self) -> f64 {
        if self.solutions.is_empty() {
            return 0.0;
        }
        let clamped: usize = self.solutions.iter().map(|s| s.clamped_ttds).sum();
        clamped as f64 / (self.solutions.len() * self.layout.ttds) as f64
    }

    /// `f_{k,l}` for 1-based subcarrier `k` and subarray `l`.
    pub fn sub_precoder(&self, grid: &SubcarrierGrid, k: usize, l: usize) -> Result<ArrayVector> {
        self.layout.check_subarray(l)?;
        match self.method {
            AnalogMethod::Ideal => {
                ideal_subprecoder(grid, self.steering[l - 1], k, l, &self.layout)
            }
            AnalogMethod::Alternating => {
                let f = grid.frequency(k)?;
                let sol = &self.solutions[l - 1];
                let p_count = self.layout.phase_shifters;
                let norm = 1.0 / libm::sqrt(self.layout.tx_antennas as f64);
                Ok(DVector::from_fn(self.layout.subarray_len(), |i, _| {
                    let (m, p) = (i / p_count, i % p_count);
                    let cycles = f * sol.delays[m];
                    let delay_phase = 2.0 * PI * (cycles - libm::floor(cycles));
                    Complex64::from_polar(norm, PI * sol.phases[(m, p)] - delay_phase)
                }))
            }
        }
    }
}

/// Block-diagonal analog precoder `F_1 F_{2,k}` at one subcarrier, kept as its
/// `N_RF` column blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPrecoder {
    pub blocks: Vec<ArrayVector>,
}

impl BlockPrecoder {
    /// `||F w||^2` for a digital column `w`; blocks have disjoint supports.
    pub fn output_power(&self, w: &[Complex64]) -> f64 {
        self.blocks
            .iter()
            .zip(w)
            .map(|(b, wl)| b.norm_squared() * wl.norm_sqr())
            .sum()
    }

    /// Dense `N_t x N_RF` matrix.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let len = self.blocks.first().map_or(0, |b| b.len());
        let mut out = DMatrix::zeros(len * self.blocks.len(), self.blocks.len());
        for (l, b) in self.blocks.iter().enumerate() {
            out.view_mut((l * len, l), (len, 1)).copy_from(b);
        }
        out
    }
}

pub fn assemble_analog_precoder(
    analog: &AnalogPrecoder,
    grid: &SubcarrierGrid,
    k: usize,
) -> Result<BlockPrecoder> {
    let blocks = (1..=analog.layout.rf_chains)
        .map(|l| analog.sub_precoder(grid, k, l))
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockPrecoder { blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allocation::uniform_allocation;
    use crate::channel::UserPath;
    use proptest::prelude::*;

    fn desk() -> (SystemConfig, SubcarrierGrid, TtdGrid) {
        let cfg = SystemConfig::desk_scale();
        let grid = SubcarrierGrid::new(&cfg);
        let ttd = TtdGrid::from_config(&cfg).unwrap();
        (cfg, grid, ttd)
    }

    fn unquantized() -> (SystemConfig, SubcarrierGrid, TtdGrid) {
        let (mut cfg, grid, ttd) = desk();
        cfg.solver.quantize_delays = false;
        (cfg, grid, ttd)
    }

    /// Golden-section search for the minimizer of a unimodal function.
    fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        let r = (libm::sqrt(5.0) - 1.0) / 2.0;
        for _ in 0..300 {
            let c = b - r * (b - a);
            let d = a + r * (b - a);
            if f(c) < f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        (a + b) / 2.0
    }

    #[test]
    fn gamma_examples() {
        let layout = ArrayLayout {
            tx_antennas: 8,
            rf_chains: 2,
            ttds: 2,
            phase_shifters: 2,
        };
        assert!(gamma_coefficients(0.0, 2, &layout)
            .iter()
            .all(|&g| g == 0.0));
        assert_eq!(gamma_coefficients(0.7, 1, &layout)[(0, 0)], 0.0);
        assert_eq!(gamma_coefficients(0.5, 2, &layout)[(1, 0)], 3.0);
    }

    #[test]
    fn ttd_update_examples() {
        let (_, grid, _) = desk();
        assert_eq!(ttd_update(&[0.0; 4], &[0.0; 4], &grid), 0.0);
        let g = [0.3, 0.6, 0.9, 1.2];
        let expected = 3.0 / (2.0 * 300e9 * 4.0);
        assert!((ttd_update(&[0.0; 4], &g, &grid) - expected).abs() < 1e-24);
    }

    #[test]
    fn ps_update_examples() {
        assert_eq!(ps_update(0.0, &[0.0, 0.0], 300e9), vec![0.0, 0.0]);
        let x = ps_update(1e-12, &[0.1], 300e9);
        assert!((x[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ttd_update_minimizes_objective() {
        let (_, grid, _) = desk();
        let x = [0.4, -1.3, 2.2, 0.05];
        let g = [10.0, 10.4, 10.8, 11.2];
        let closed = ttd_update(&x, &g, &grid);
        let fc = grid.carrier_hz();
        // |d objective / dt| by brute force; V-shaped, so golden section resolves
        // its zero to machine precision where the flat quadratic cannot
        let slope = |t: f64| {
            let mut d = 0.0;
            for &xi in grid.ratios() {
                for (xp, gp) in x.iter().zip(&g) {
                    d += -4.0 * fc * xi * (-2.0 * fc * xi * t + xp + xi * gp);
                }
            }
            d.abs()
        };
        let scale = 1e-10;
        let searched = golden_min(|s| slope(s * scale), -50.0, 50.0) * scale;
        assert!((closed - searched).abs() <= 1e-12 * closed.abs());
        // and the objective really is lowest there
        let f0 = phase_domain_objective(closed, &x, &g, &grid);
        assert!(f0 <= phase_domain_objective(closed * 1.01, &x, &g, &grid));
        assert!(f0 <= phase_domain_objective(closed * 0.99, &x, &g, &grid));
    }

    #[test]
    fn ps_update_minimizes_objective() {
        let (_, grid, _) = desk();
        let t = 3.7e-11;
        let g = [5.0, -2.0, 0.25];
        let x = ps_update(t, &g, grid.carrier_hz());
        // per-p oracle: mean over k of (2 f_c xi t - xi gamma)
        for (p, gp) in g.iter().enumerate() {
            let mean: f64 = grid
                .ratios()
                .iter()
                .map(|xi| 2.0 * grid.carrier_hz() * xi * t - xi * gp)
                .sum::<f64>()
                / grid.len() as f64;
            assert!((x[p] - mean).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_direction_converges_immediately() {
        let (cfg, grid, ttd) = desk();
        let sol = optimize_subarray(&grid, 0.0, 3, &ttd, &cfg).unwrap();
        assert!(sol.delays.iter().all(|&t| t == 0.0));
        assert!(sol.phases.iter().all(|&x| x == 0.0));
        assert_eq!(sol.iterations_used, 1);
        assert_eq!(sol.final_nmse, 0.0);
    }

    #[test]
    fn unquantized_reaches_fixed_point() {
        let (cfg, grid, ttd) = unquantized();
        let layout = cfg.layout();
        for &(psi, l) in &[(0.37, 1usize), (-0.81, 4), (0.999, 8)] {
            let sol = optimize_subarray(&grid, psi, l, &ttd, &cfg).unwrap();
            let gammas = gamma_coefficients(psi, l, &layout);
            for m in 0..layout.ttds {
                let sum_g: f64 = gammas.row(m).iter().sum();
                let t_star = sum_g / (2.0 * 300e9 * layout.phase_shifters as f64);
                assert!((sol.delays[m] - t_star).abs() <= 1e-9 * t_star.abs().max(1e-12));
                for p in 0..layout.phase_shifters {
                    let x_star = 2.0 * 300e9 * t_star - gammas[(m, p)];
                    assert!((sol.phases[(m, p)] - x_star).abs() <= 1e-9);
                }
            }
            assert!(sol.iterations_used <= 3);
        }
    }

    #[test]
    fn paper_settings_land_on_grid() {
        let (cfg, grid, ttd) = desk();
        for (i, psi) in [-0.9, -0.2, 0.1, 0.55, 0.98].iter().enumerate() {
            let sol = optimize_subarray(&grid, *psi, i + 1, &ttd, &cfg).unwrap();
            assert!(sol.iterations_used <= cfg.solver.max_iterations);
            for &t in &sol.delays {
                let level = t / ttd.step_s();
                assert!((level - libm::round(level)).abs() < 1e-9);
                assert!(ttd.in_range(t));
            }
        }
    }

    #[test]
    fn negative_direction_clamps() {
        let (cfg, grid, ttd) = desk();
        let sol = optimize_subarray(&grid, -0.5, 2, &ttd, &cfg).unwrap();
        assert!(sol.delays.iter().all(|&t| t == 0.0));
        assert_eq!(sol.clamped_ttds, cfg.ttds_per_rf_chain);
    }

    #[test]
    fn jacobi_order_uses_stale_delay() {
        let (mut cfg, grid, ttd) = unquantized();
        cfg.solver.update_order = UpdateOrder::Jacobi;
        cfg.solver.max_iterations = 2;
        let psi = 0.4;
        let sol = optimize_subarray(&grid, psi, 1, &ttd, &cfg).unwrap();
        // one pass: phases come from t = 0, so x = -gamma
        let gammas = gamma_coefficients(psi, 1, &cfg.layout());
        for m in 0..cfg.ttds_per_rf_chain {
            for p in 0..cfg.phase_shifters_per_ttd {
                assert_eq!(sol.phases[(m, p)], -gammas[(m, p)]);
            }
        }
    }

    #[test]
    fn trace_records_iterations() {
        let (cfg, grid, ttd) = desk();
        let mut trace = Vec::new();
        let sol = optimize_subarray_traced(&grid, 0.3, 2, &ttd, &cfg, &mut trace).unwrap();
        assert!(!trace.is_empty());
        assert!(trace.iter().all(|r| r.l == 2));
        assert_eq!(
            trace.iter().map(|r| r.iteration).max().unwrap(),
            sol.iterations_used
        );
        let last_m1 = trace.iter().rev().find(|r| r.m == 1).unwrap();
        assert_eq!(last_m1.t_seconds, sol.delays[0]);
    }

    #[test]
    fn central_subcarrier_residual_vanishes_after_quantization() {
        let (cfg, grid, ttd) = desk();
        let layout = cfg.layout();
        let psi = 0.63;
        let sol = optimize_subarray(&grid, psi, 5, &ttd, &cfg).unwrap();
        let gammas = gamma_coefficients(psi, 5, &layout);
        for m in 0..layout.ttds {
            for p in 0..layout.phase_shifters {
                let r =
                    sol.phases[(m, p)] + gammas[(m, p)] - 2.0 * grid.carrier_hz() * sol.delays[m];
                assert!(r.abs() < 1e-9);
            }
        }
    }

    fn single_user(psi: f64) -> ChannelRealization {
        ChannelRealization {
            users: vec![UserPath {
                psi,
                phi: 0.0,
                distance_m: 10.0,
                delay_s: 0.0,
                gains: vec![Complex64::new(1.0, 0.0); 129],
            }],
        }
    }

    #[test]
    fn assembled_blocks_have_unit_modulus_entries() {
        let (cfg, grid, ttd) = desk();
        let real = single_user(0.42);
        let alloc = uniform_allocation(1, cfg.rf_chains).unwrap();
        let analog = AnalogPrecoder::alternating(&cfg, &grid, &ttd, &real, &alloc).unwrap();
        let norm = 1.0 / 16.0;
        for k in [1, 64, 129] {
            let f = assemble_analog_precoder(&analog, &grid, k).unwrap();
            let dense = f.to_dense();
            assert_eq!(dense.shape(), (256, 8));
            for (i, e) in dense.iter().enumerate() {
                let (row, col) = (i % 256, i / 256);
                if row / 32 == col {
                    assert!((e.norm() - norm).abs() < 1e-15);
                } else {
                    assert_eq!(*e, Complex64::new(0.0, 0.0));
                }
            }
            for b in &f.blocks {
                assert!((b.norm_squared() - 1.0 / 8.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_solution_gives_flat_block() {
        let (cfg, grid, ttd) = desk();
        let real = single_user(0.0);
        let alloc = uniform_allocation(1, cfg.rf_chains).unwrap();
        let analog = AnalogPrecoder::alternating(&cfg, &grid, &ttd, &real, &alloc).unwrap();
        let b = analog.sub_precoder(&grid, 17, 3).unwrap();
        assert!(b
            .iter()
            .all(|e| (e - Complex64::new(1.0 / 16.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn ideal_matches_subarray_response() {
        let (cfg, grid, _) = desk();
        let real = single_user(-0.35);
        let alloc = uniform_allocation(1, cfg.rf_chains).unwrap();
        let analog = AnalogPrecoder::ideal(&cfg, &real, &alloc);
        for l in 1..=8 {
            let f = analog.sub_precoder(&grid, 11, l).unwrap();
            let u = subarray_response(&grid, -0.35, 11, l, &cfg.layout()).unwrap();
            assert_eq!(f, u);
            let gain = u.dotc(&f).norm();
            assert!((gain - 1.0 / 8.0).abs() < 1e-14);
        }
        assert_eq!(analog.clamp_rate(), 0.0);
    }

    proptest! {
        #[test]
        fn alternating_pair_never_increases_objective(
            psi in -1.0f64..1.0,
            l in 1usize..=8,
            m in 0usize..8,
            x0 in proptest::collection::vec(-50.0f64..50.0, 4),
        ) {
            let (_, grid, _) = desk();
            let layout = SystemConfig::desk_scale().layout();
            let gammas = gamma_coefficients(psi, l, &layout);
            let g: Vec<f64> = gammas.row(m).iter().copied().collect();
            let mut x = x0.clone();
            let mut t = 0.0;
            let mut prev = phase_domain_objective(t, &x, &g, &grid);
            for _ in 0..4 {
                t = ttd_update(&x, &g, &grid);
                let mid = phase_domain_objective(t, &x, &g, &grid);
                x = ps_update(t, &g, grid.carrier_hz());
                let next = phase_domain_objective(t, &x, &g, &grid);
                prop_assert!(mid <= prev * (1.0 + 1e-9) + 1e-9);
                prop_assert!(next <= mid * (1.0 + 1e-9) + 1e-9);
                prev = next;
            }
        }

        #[test]
        fn fixed_point_zeroes_both_conditions(psi in -1.0f64..1.0, l in 1usize..=8, m in 0usize..8) {
            let (_, grid, _) = desk();
            let layout = SystemConfig::desk_scale().layout();
            let gammas = gamma_coefficients(psi, l, &layout);
            let g: Vec<f64> = gammas.row(m).iter().copied().collect();
            let t_star = g.iter().sum::<f64>() / (2.0 * grid.carrier_hz() * 4.0);
            let x_star = ps_update(t_star, &g, grid.carrier_hz());
            let t_again = ttd_update(&x_star, &g, &grid);
            prop_assert!((t_again - t_star).abs() <= 1e-12 * t_star.abs().max(1e-15));
            let x_again = ps_update(t_again, &g, grid.carrier_hz());
            for (a, b) in x_again.iter().zip(&x_star) {
                prop_assert!((a - b).abs() <= 1e-9);
            }
        }

        #[test]
        fn quantized_gain_never_beats_ideal(psi in -1.0f64..1.0, l in 1usize..=8, k in 1usize..=129) {
            let (cfg, grid, ttd) = desk();
            let sol = optimize_subarray(&grid, psi, l, &ttd, &cfg).unwrap();
            let analog = AnalogPrecoder {
                method: AnalogMethod::Alternating,
                layout: cfg.layout(),
                steering: vec![psi; 8],
                solutions: vec![sol; 8],
            };
            let f = analog.sub_precoder(&grid, k, l).unwrap();
            let u = subarray_response(&grid, psi, k, l, &cfg.layout()).unwrap();
            prop_assert!(u.dotc(&f).norm() <= 1.0 / 8.0 + 1e-12);
        }
    }
}
