//! Exact eigenvalues of the unapproximated radial problem.
//!
//! For β > 0 the radial equation is integrated in the Mathieu coordinate,
//! R'' = (λ − 2q² cosh 2y) R on y ∈ [0, y0], with either R'(0) = 0 (even) or
//! R(0) = 0 (odd) at the defect core and R(y0) = 0 at the wall. λ and q² both
//! depend on the trial energy. Since d/dE (λ − 2q² cosh 2y) = mβ²(1 − cosh 2y) ≤ 0,
//! the number of sign changes of R on (0, y0] is nondecreasing in E and equals
//! the number of eigenvalues below E. Brackets are isolated with that count
//! and refined by bisection on the sign of R(y0).
//!
//! For β = 0 the map to y degenerates; [`finite_difference_baseline`] solves
//! the cylindrical box directly.

use crate::geometry::{
    effective_momentum, mathieu_parameters, DefectMedium, GeometryError, MathieuParameters,
    ModeNumbers,
};
use crate::specfun::{bessel_zero, BesselOrder, SpecfunError};
use crate::spectrum::Confinement;
use thiserror::Error;

/// Terminal-value change allowed when the RK4 step is halved.
pub const STEP_TOLERANCE: f64 = 1e-10;
/// Width in energy at which bisection stops.
pub const ENERGY_TOLERANCE: f64 = 1e-10;
/// Two eigenvalues closer than this are reported as a cluster.
pub const CLUSTER_WIDTH: f64 = 1e-8;
/// Interior points of the finite-difference baseline.
pub const BASELINE_POINTS: usize = 4000;

const RESCALE_THRESHOLD: f64 = 1e100;
const INITIAL_STEPS: usize = 256;
const MAX_STEPS: usize = 1 << 22;
const INITIAL_GRID: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
    #[error("the Mathieu oracle needs beta > 0; use the finite-difference baseline")]
    NotApplicable,
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("invalid energy window [{0}, {1}]")]
    InvalidWindow(f64, f64),
    #[error("window exhausted: found {} of {wanted} eigenvalues", found.len())]
    WindowExhausted {
        found: Vec<OracleEigenvalue>,
        wanted: usize,
    },
    #[error("eigenvalues cluster near E = {energy}")]
    Cluster { energy: f64 },
    #[error("step size underflow: no convergence with {steps} steps")]
    StepUnderflow { steps: usize },
    #[error("integration produced a non-finite value at E = {energy}")]
    Overflow { energy: f64 },
}

pub type Result<T> = std::result::Result<T, OracleError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryCondition {
    /// R'(0) = 0: analytic in r − β at the core.
    Even,
    /// R(0) = 0: behaves like √(r − β) at the core.
    Odd,
}

impl BoundaryCondition {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundaryCondition::Even => "even",
            BoundaryCondition::Odd => "odd",
        }
    }

    fn initial_state(&self) -> (f64, f64) {
        match self {
            BoundaryCondition::Even => (1.0, 0.0),
            BoundaryCondition::Odd => (0.0, 1.0),
        }
    }
}

/// The modified Mathieu eigenproblem for one (l, k, Ω) channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MathieuProblem {
    medium: DefectMedium,
    modes: ModeNumbers,
    omega: f64,
    r0: f64,
    y0: f64,
    bc: BoundaryCondition,
    mode_count: usize,
}

impl MathieuProblem {
    pub fn new(
        medium: DefectMedium,
        l: i32,
        k: f64,
        conf: &Confinement,
        omega: f64,
        bc: BoundaryCondition,
        mode_count: usize,
    ) -> Result<Self> {
        if medium.beta() == 0.0 {
            return Err(OracleError::NotApplicable);
        }
        if mode_count == 0 {
            return Err(OracleError::InvalidProblem(
                "mode_count must be >= 1".into(),
            ));
        }
        if !omega.is_finite() {
            return Err(OracleError::InvalidProblem(format!(
                "omega must be finite, got {omega}"
            )));
        }
        if conf.r0() <= medium.beta() {
            return Err(OracleError::InvalidProblem(format!(
                "wall r0 = {} must lie outside beta = {}",
                conf.r0(),
                medium.beta()
            )));
        }
        let modes = ModeNumbers::new(1, l, k)?;
        let y0 = (conf.r0() / medium.beta()).acosh();
        Ok(Self {
            medium,
            modes,
            omega,
            r0: conf.r0(),
            y0,
            bc,
            mode_count,
        })
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn with_bc(mut self, bc: BoundaryCondition) -> Self {
        self.bc = bc;
        self
    }

    pub fn y0(&self) -> f64 {
        self.y0
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn gamma(&self) -> f64 {
        effective_momentum(&self.medium, &self.modes).gamma
    }

    /// λ(E) and q²(E), with the rotating shift E → E + Ωγ inside κ².
    pub fn parameters(&self, energy: f64) -> MathieuParameters {
        mathieu_parameters(&self.medium, &self.modes, energy, self.omega)
    }

    /// [k²/2m, k²/2m + 4 (Θ_{mode_count+2,|γ|}/r0)²/2m] shifted by −Ωγ.
    pub fn default_window(&self) -> Result<(f64, f64)> {
        let two_m = 2.0 * self.medium.mass();
        let order = BesselOrder::new(self.gamma().abs())?;
        let theta = bessel_zero(order, self.mode_count + 2)?.value;
        let floor = self.modes.k * self.modes.k / two_m;
        let shift = self.omega * self.gamma();
        Ok((
            floor - shift,
            floor + 4.0 * (theta / self.r0).powi(2) / two_m - shift,
        ))
    }
}

/// Outcome of one integration from y = 0 to y0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shot {
    /// R(y0) divided by max |R| over the grid.
    pub terminal: f64,
    /// R(y0) / √(R(y0)² + (y0 R'(y0))²); smooth in the step size.
    pub wall_sine: f64,
    /// Sign changes of R on (0, y0], the terminal sample included.
    pub node_count: usize,
    /// Sign changes strictly inside the grid, the terminal sample excluded.
    pub interior_nodes: usize,
}

/// Fixed-step RK4 integrator with the cosh 2y samples precomputed.
#[derive(Debug, Clone)]
pub struct Shooter {
    problem: MathieuProblem,
    steps: usize,
    cosh_half_steps: Vec<f64>,
}

impl Shooter {
    pub fn new(problem: MathieuProblem, steps: usize) -> Self {
        let h = problem.y0 / steps as f64;
        let cosh_half_steps = (0..=2 * steps)
            .map(|i| (2.0 * (0.5 * h * i as f64)).cosh())
            .collect();
        Self {
            problem,
            steps,
            cosh_half_steps,
        }
    }

    /// Doubles the step count until halving the step moves
    /// [`Shot::wall_sine`] by less than [`STEP_TOLERANCE`] at `energy`.
    pub fn calibrated(problem: MathieuProblem, energy: f64) -> Result<Self> {
        let mut steps = INITIAL_STEPS;
        let mut coarse = Shooter::new(problem, steps).shoot(energy)?;
        loop {
            steps *= 2;
            if steps > MAX_STEPS {
                return Err(OracleError::StepUnderflow { steps });
            }
            let fine_shooter = Shooter::new(problem, steps);
            let fine = fine_shooter.shoot(energy)?;
            if (fine.wall_sine - coarse.wall_sine).abs() < STEP_TOLERANCE {
                return Ok(fine_shooter);
            }
            coarse = fine;
        }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn problem(&self) -> &MathieuProblem {
        &self.problem
    }

    pub fn shoot(&self, energy: f64) -> Result<Shot> {
        let params = self.problem.parameters(energy);
        self.shoot_parameters(params.lambda, params.q_squared)
            .ok_or(OracleError::Overflow { energy })
    }

    /// Integrates R'' = (λ − 2q² cosh 2y) R for explicit λ and q²; `None` if
    /// the solution stops being finite.
    pub fn shoot_parameters(&self, lambda: f64, q_squared: f64) -> Option<Shot> {
        let two_q_sq = 2.0 * q_squared;
        let h = self.problem.y0 / self.steps as f64;
        let potential = |i: usize| lambda - two_q_sq * self.cosh_half_steps[i];

        let (mut u, mut v) = self.problem.bc.initial_state();
        let mut peak = u.abs();
        let mut nodes = 0usize;
        let mut last_sign = sign_of(u);
        let mut nodes_before_last = 0usize;
        for step in 0..self.steps {
            let i = 2 * step;
            let (v0, v_mid, v1) = (potential(i), potential(i + 1), potential(i + 2));
            let k1u = v;
            let k1v = v0 * u;
            let k2u = v + 0.5 * h * k1v;
            let k2v = v_mid * (u + 0.5 * h * k1u);
            let k3u = v + 0.5 * h * k2v;
            let k3v = v_mid * (u + 0.5 * h * k2u);
            let k4u = v + h * k3v;
            let k4v = v1 * (u + h * k3u);
            u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            if !u.is_finite() || !v.is_finite() {
                return None;
            }
            let scale = u.abs().max(v.abs());
            if scale > RESCALE_THRESHOLD {
                u /= scale;
                v /= scale;
                peak /= scale;
            }
            peak = peak.max(u.abs());
            if step + 1 == self.steps {
                nodes_before_last = nodes;
            }
            let s = sign_of(u);
            if s != 0 {
                if last_sign != 0 && s != last_sign {
                    nodes += 1;
                }
                last_sign = s;
            }
        }
        Some(Shot {
            terminal: u / peak,
            wall_sine: u / u.hypot(self.problem.y0 * v),
            node_count: nodes,
            interior_nodes: nodes_before_last,
        })
    }
}

fn sign_of(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Integrates once at `energy` with a step calibrated at that energy.
pub fn shoot(problem: &MathieuProblem, energy: f64) -> Result<Shot> {
    Shooter::calibrated(*problem, energy)?.shoot(energy)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEigenvalue {
    pub energy: f64,
    /// 1-based position within the boundary-condition family.
    pub index: usize,
    pub node_count: usize,
    pub bc: BoundaryCondition,
    pub residual: f64,
}

/// Lowest `mode_count` eigenvalues inside `window`, ascending.
pub fn solve_eigenvalues(
    problem: &MathieuProblem,
    window: (f64, f64),
) -> Result<Vec<OracleEigenvalue>> {
    let (lo, hi) = window;
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(OracleError::InvalidWindow(lo, hi));
    }
    let shooter = Shooter::calibrated(*problem, hi)?;
    let brackets = isolate(&shooter, lo, hi, problem.mode_count)?;
    let mut found = Vec::with_capacity(brackets.len());
    for (a, b, index) in brackets {
        found.push(refine(&shooter, a, b, index)?);
    }
    if found.len() < problem.mode_count {
        return Err(OracleError::WindowExhausted {
            found,
            wanted: problem.mode_count,
        });
    }
    Ok(found)
}

/// Same as [`solve_eigenvalues`] over the problem's default window. The
/// reported energies are lab-frame E, found with κ² = 2m(E + Ωγ) − k².
pub fn rotating_oracle(problem: &MathieuProblem) -> Result<Vec<OracleEigenvalue>> {
    solve_eigenvalues(problem, problem.default_window()?)
}

struct Sample {
    energy: f64,
    count: usize,
}

// Brackets (a, b, index) each holding exactly one eigenvalue.
fn isolate(shooter: &Shooter, lo: f64, hi: f64, wanted: usize) -> Result<Vec<(f64, f64, usize)>> {
    let sample = |energy: f64| -> Result<Sample> {
        Ok(Sample {
            energy,
            count: shooter.shoot(energy)?.node_count,
        })
    };
    let mut grid = Vec::with_capacity(INITIAL_GRID + 1);
    for i in 0..=INITIAL_GRID {
        grid.push(sample(lo + (hi - lo) * i as f64 / INITIAL_GRID as f64)?);
    }
    let mut out = Vec::new();
    for pair in grid.windows(2) {
        split(&sample, &pair[0], &pair[1], &mut out, wanted)?;
        if out.len() >= wanted {
            break;
        }
    }
    out.truncate(wanted);
    Ok(out)
}

fn split<F>(
    sample: &F,
    a: &Sample,
    b: &Sample,
    out: &mut Vec<(f64, f64, usize)>,
    wanted: usize,
) -> Result<()>
where
    F: Fn(f64) -> Result<Sample>,
{
    if out.len() >= wanted || b.count <= a.count {
        return Ok(());
    }
    if b.count == a.count + 1 {
        out.push((a.energy, b.energy, b.count));
        return Ok(());
    }
    if b.energy - a.energy < CLUSTER_WIDTH {
        return Err(OracleError::Cluster { energy: a.energy });
    }
    let mid = sample(0.5 * (a.energy + b.energy))?;
    split(sample, a, &mid, out, wanted)?;
    split(sample, &mid, b, out, wanted)
}

fn refine(shooter: &Shooter, mut a: f64, mut b: f64, index: usize) -> Result<OracleEigenvalue> {
    let mut fa = shooter.shoot(a)?.terminal;
    while b - a > ENERGY_TOLERANCE {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = shooter.shoot(mid)?.terminal;
        if fm == 0.0 {
            a = mid;
            b = mid;
            break;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    let energy = 0.5 * (a + b);
    let shot = shooter.shoot(energy)?;
    Ok(OracleEigenvalue {
        energy,
        index,
        node_count: shot.interior_nodes,
        bc: shooter.problem.bc,
        residual: shot.terminal.abs(),
    })
}

/// Lowest `mode_count` energies of the defect-free cylindrical box,
/// from a finite-volume discretization on [`BASELINE_POINTS`] cells.
pub fn finite_difference_baseline(
    mass: f64,
    l: i32,
    k: f64,
    r0: f64,
    mode_count: usize,
) -> Result<Vec<f64>> {
    finite_difference_baseline_with(mass, l, k, r0, mode_count, BASELINE_POINTS)
}

/// As [`finite_difference_baseline`] with an explicit number of cells.
///
/// The operator −(1/r)(r R')' + l²/r² R is discretized on cell centres
/// r_i = (i − 1/2) h with fluxes through r_{i±1/2}; the flux through r = 0
/// vanishes and R = 0 at the node r0 = (N + 1/2) h. Scaling by √r_i makes
/// the matrix symmetric tridiagonal, whose eigenvalues are κ².
pub fn finite_difference_baseline_with(
    mass: f64,
    l: i32,
    k: f64,
    r0: f64,
    mode_count: usize,
    points: usize,
) -> Result<Vec<f64>> {
    if mass.is_nan()
        || mass <= 0.0
        || r0.is_nan()
        || r0 <= 0.0
        || !k.is_finite()
        || points < 2
        || mode_count == 0
        || mode_count > points
    {
        return Err(OracleError::InvalidProblem(format!(
            "baseline needs mass > 0, r0 > 0, finite k and 1 <= mode_count <= points (got m={mass}, r0={r0}, k={k}, modes={mode_count}, points={points})"
        )));
    }
    let h = r0 / (points as f64 + 0.5);
    let l_sq = (l as f64).powi(2);
    let centre = |i: usize| (i as f64 - 0.5) * h;
    let diag: Vec<f64> = (1..=points)
        .map(|i| {
            let r = centre(i);
            let flux = ((i - 1) as f64 * h + i as f64 * h) / (h * h);
            (flux + l_sq / r) / r
        })
        .collect();
    let off: Vec<f64> = (1..points)
        .map(|i| -(i as f64 * h) / (h * h * (centre(i) * centre(i + 1)).sqrt()))
        .collect();
    let tri = SymTridiagonal { diag, off };
    let two_m = 2.0 * mass;
    Ok((0..mode_count)
        .map(|j| (tri.eigenvalue(j) + k * k) / two_m)
        .collect())
}

struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiagonal {
    // Number of eigenvalues strictly below x (Sturm sequence of LDLᵀ pivots).
    fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut pivot = 1.0;
        for (i, &d) in self.diag.iter().enumerate() {
            let coupling = if i == 0 {
                0.0
            } else {
                self.off[i - 1] * self.off[i - 1]
            };
            pivot = d - x - if i == 0 { 0.0 } else { coupling / pivot };
            if pivot == 0.0 {
                pivot = -f64::EPSILON * (d.abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if pivot < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        (0..n).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
            let radius = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            (lo.min(self.diag[i] - radius), hi.max(self.diag[i] + radius))
        })
    }

    // j-th smallest eigenvalue, 0-based.
    fn eigenvalue(&self, j: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}
