//! Matched low/high-fidelity solutions of a 1D turbulent boundary-layer
//! slice.
//!
//! The slice spans y in (0, 1] (fraction of slice height) with no-slip at
//! the wall and unit edge velocity. The steady wall-normal momentum
//! balance d/dy[(nu + nu_t) du/dy] = dp/dx integrates once to a linear
//! total-stress profile tau(y) = tau_w + G y, with G an imposed
//! pressure-gradient parameter. Both fidelities close nu_t with a mixing
//! length; they differ in wall treatment:
//!
//! * High fidelity resolves the viscous sublayer (first cell center
//!   y+ < 1) with van Driest damping down to the wall.
//! * Low fidelity models [0, y_c] as an equilibrium constant-stress layer
//!   via the law of the wall, ignoring the pressure gradient there. That
//!   omission is the engineered fidelity gap: it discards the wall-layer
//!   momentum G*y_c exactly as textbook equilibrium wall functions do,
//!   so the two fidelities diverge with |beta_p| and first-cell height.

mod case;
mod mesh;
mod pool;
mod solve;
mod wall_law;

pub use case::{FidelityLevel, FlowCase, BETA_P_MAX, BETA_P_MIN, RE_DELTA_MAX, RE_DELTA_MIN};
pub use mesh::{build_mesh, build_mesh_with, default_n_nodes, Mesh};
pub use pool::{generate_pool, generate_pool_with, load_pool, save_pool, PoolPair, SamplePool};
pub use solve::{solve_case, solve_case_with, FieldSolution};
pub use wall_law::{law_of_the_wall, B_LOG, KAPPA};

/// Flat-plate skin-friction correlation c_f/2 = 0.0225 Re^(-1/4), used to
/// initialize the friction-velocity fixed point and to place meshes.
pub fn tau_w_flat_plate(re_delta: f64) -> f64 {
    0.0225 * re_delta.powf(-0.25)
}

/// Friction velocity implied by the flat-plate correlation.
pub fn u_tau_flat_plate(re_delta: f64) -> f64 {
    tau_w_flat_plate(re_delta).sqrt()
}

/// Slice height in wall units implied by the flat-plate correlation.
pub fn delta_plus_estimate(re_delta: f64) -> f64 {
    re_delta * u_tau_flat_plate(re_delta)
}

/// All tunable solver constants. The defaults are the calibrated values
/// used everywhere; tests and the calibration example may perturb them.
#[derive(Debug, Clone)]
pub struct SolverParams {
    /// Default node counts per fidelity (report mesh).
    pub n_low: usize,
    pub n_high: usize,
    /// Target y+ of the high-fidelity first cell center (must be < 1).
    pub yplus_high_center: f64,
    /// Low-fidelity first cell center targets this fraction of the
    /// estimated slice height in wall units...
    pub yplus_low_fraction: f64,
    /// ...clamped into this band (kept inside the admissible [30, 300]).
    pub yplus_low_min: f64,
    pub yplus_low_max: f64,
    /// Geometric chain starts at chain_start_factor x (low first center),
    /// shared by both fidelities so their outer nodes cover the same span.
    pub chain_start_factor: f64,
    /// Pressure-gradient scale: G = beta_p * sp_mult * tau_w_flat_plate(Re).
    pub sp_mult: f64,
    /// Van Driest damping constant A+.
    pub a_plus: f64,
    /// Outer mixing-length cap (fraction of slice height).
    pub l_max: f64,
    /// Internal quadrature refinement: subintervals for the high-fidelity
    /// wall region [y_c, y_b] and per chain segment.
    pub wall_subdivisions: usize,
    pub segment_subdivisions: usize,
    /// Damped fixed-point controls on tau_w.
    pub relax: f64,
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            n_low: 48,
            n_high: 94,
            yplus_high_center: 0.5,
            yplus_low_fraction: 0.25,
            yplus_low_min: 35.0,
            yplus_low_max: 300.0,
            chain_start_factor: 1.25,
            sp_mult: 6.0,
            a_plus: 26.0,
            l_max: 0.09,
            wall_subdivisions: 40,
            segment_subdivisions: 4,
            relax: 0.5,
            tol: 1e-8,
            max_iters: 10_000,
        }
    }
}
