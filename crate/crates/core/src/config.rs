//! Every tolerance and grid size used by the engine, in one place.

use crate::contact::ContactTolerance;
use crate::minkowski::DEFAULT_EPS_LIGHT;
use crate::newton::NewtonConfig;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    /// Relative band for lightlike classification.
    pub eps_light: f64,
    /// Contact-order zero band (after normalisation).
    pub contact_tol: f64,
    /// Ratio between the zero band and the nonzero band of the gap rule.
    pub gap_factor: f64,
    /// Grid size of the symmetry-set trace in each of `t1`, `t2`.
    pub grid_n: usize,
    /// Grid used to bracket lightlike points.
    pub lightlike_grid: usize,
    /// Parameter tolerance for bisection of scalar roots.
    pub root_tol: f64,
    /// After edge refinement `|g|` must be below this times `scale²`,
    /// otherwise the crossing is a pole and the cell is masked.
    pub refine_residual: f64,
    /// Grid used to enumerate tangencies `f'(t; c) = 0` along the curve.
    pub tangency_grid: usize,
    pub newton: NewtonConfig,
    /// Transition solver convergence threshold, times `scale²`.
    pub solver_tol: f64,
    /// Default number of family-parameter samples for scans.
    pub scan_steps: usize,
    /// Grid size for traces made during family scans.
    pub scan_grid_n: usize,
    /// Events closer than this in `u` (and in centre, times scale) merge.
    pub dedup_tol: f64,
    /// Indicator values below `seed_factor · solver_tol · scale²` seed the
    /// solver even without a sign change.
    pub seed_factor: f64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            eps_light: DEFAULT_EPS_LIGHT,
            contact_tol: 1e-6,
            gap_factor: 10.0,
            grid_n: 512,
            lightlike_grid: 4096,
            root_tol: 1e-12,
            refine_residual: 1e-10,
            tangency_grid: 512,
            newton: NewtonConfig::default(),
            solver_tol: 1e-10,
            scan_steps: 200,
            scan_grid_n: 128,
            dedup_tol: 1e-6,
            seed_factor: 10.0,
        }
    }
}

impl Config {
    pub fn contact_tolerance(&self) -> ContactTolerance {
        ContactTolerance { tol: self.contact_tol, gap: self.gap_factor }
    }

    /// Band around the diagonal `t1 = t2` excluded from traces on an
    /// `n`-point grid.
    pub fn diagonal_band(n: usize) -> f64 {
        2.0 * crate::math::TAU / n as f64
    }
}
