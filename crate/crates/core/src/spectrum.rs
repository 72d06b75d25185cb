//! Hard-wall spectra, static and rotating, in closed and asymptotic form.
//!
//! With the wall at r0 the levels are
//!
//! ```text
//! E = Θ²_{n,|γ|} / (2m r0²) + k²/(2m) − Ωγ
//! ```
//!
//! where Θ_{n,ν} is the n-th positive zero of J_ν. The asymptotic variant
//! replaces Θ by π((n − 1) + |γ|/2 + 3/4).

use crate::geometry::{
    effective_momentum, DefectMedium, EffectiveMomentum, GeometryError, ModeNumbers,
};
use crate::specfun::{bessel_j, bessel_zero, bessel_zero_asymptotic, BesselOrder, SpecfunError};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid confinement: {0}")]
    InvalidConfinement(String),
    #[error("invalid rotation: {0}")]
    InvalidRotation(String),
    #[error("evanescent axial mode: kappa^2 = {kappa_squared} < 0")]
    Evanescent { kappa_squared: f64 },
    #[error("sample point x = {x} outside [0, {x0}]")]
    OutsideWall { x: f64, x0: f64 },
}

pub type Result<T> = std::result::Result<T, SpectrumError>;

/// Hard wall at radius r0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Confinement {
    r0: f64,
    y0: Option<f64>,
}

impl Confinement {
    pub fn new(r0: f64, medium: &DefectMedium) -> Result<Self> {
        if !r0.is_finite() || r0 <= 0.0 {
            return Err(SpectrumError::InvalidConfinement(format!(
                "r0 must be positive, got {r0}"
            )));
        }
        let beta = medium.beta();
        if r0 <= beta {
            return Err(SpectrumError::InvalidConfinement(format!(
                "wall r0 = {r0} must lie outside the defect core beta = {beta}"
            )));
        }
        let y0 = (beta > 0.0).then(|| (r0 / beta).acosh());
        Ok(Self { r0, y0 })
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    /// arccosh(r0/β); `None` for the defect-free medium.
    pub fn y0(&self) -> Option<f64> {
        self.y0
    }

    fn check_against(&self, medium: &DefectMedium) -> Result<()> {
        if self.r0 <= medium.beta() {
            return Err(SpectrumError::InvalidConfinement(format!(
                "wall r0 = {} must lie outside the defect core beta = {}",
                self.r0,
                medium.beta()
            )));
        }
        Ok(())
    }
}

/// Frame angular velocity Ω about the defect axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationFrame {
    omega: f64,
}

impl RotationFrame {
    pub fn new(omega: f64) -> Result<Self> {
        if !omega.is_finite() {
            return Err(SpectrumError::InvalidRotation(format!(
                "omega must be finite, got {omega}"
            )));
        }
        Ok(Self { omega })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ExactZero,
    Asymptotic,
    MathieuOracle,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ExactZero => "exact_zero",
            Method::Asymptotic => "asymptotic",
            Method::MathieuOracle => "mathieu_oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyLevel {
    pub energy: f64,
    pub modes: ModeNumbers,
    pub gamma: EffectiveMomentum,
    pub method: Method,
    pub omega: f64,
    /// Quantizing zero (exact or asymptotic) when the level came from one.
    pub theta: Option<f64>,
}

fn order_of(gamma: &EffectiveMomentum) -> Result<BesselOrder> {
    Ok(BesselOrder::new(gamma.magnitude)?)
}

fn level_from_zero(
    medium: &DefectMedium,
    modes: &ModeNumbers,
    conf: &Confinement,
    gamma: EffectiveMomentum,
    theta: f64,
    method: Method,
) -> EnergyLevel {
    let two_m = 2.0 * medium.mass();
    let energy = theta * theta / (two_m * conf.r0 * conf.r0) + modes.k * modes.k / two_m;
    EnergyLevel {
        energy,
        modes: *modes,
        gamma,
        method,
        omega: 0.0,
        theta: Some(theta),
    }
}

/// Θ²_{n,|γ|}/(2m r0²) + k²/(2m).
pub fn energy_hardwall(
    medium: &DefectMedium,
    modes: &ModeNumbers,
    conf: &Confinement,
) -> Result<EnergyLevel> {
    conf.check_against(medium)?;
    let gamma = effective_momentum(medium, modes);
    let theta = bessel_zero(order_of(&gamma)?, modes.n as usize)?.value;
    Ok(level_from_zero(
        medium,
        modes,
        conf,
        gamma,
        theta,
        Method::ExactZero,
    ))
}

/// π²/(2m r0²) [(n − 1) + |γ|/2 + 3/4]² + k²/(2m).
pub fn energy_asymptotic(
    medium: &DefectMedium,
    modes: &ModeNumbers,
    conf: &Confinement,
) -> Result<EnergyLevel> {
    conf.check_against(medium)?;
    let gamma = effective_momentum(medium, modes);
    let theta = bessel_zero_asymptotic(order_of(&gamma)?, modes.n as usize)?;
    Ok(level_from_zero(
        medium,
        modes,
        conf,
        gamma,
        theta,
        Method::Asymptotic,
    ))
}

fn rotate(mut level: EnergyLevel, frame: &RotationFrame) -> EnergyLevel {
    level.energy -= frame.omega * level.gamma.gamma;
    level.omega = frame.omega;
    level
}

/// Static hard-wall level shifted by −Ωγ; the Bessel order stays |γ|.
pub fn energy_rotating(
    medium: &DefectMedium,
    modes: &ModeNumbers,
    conf: &Confinement,
    frame: &RotationFrame,
) -> Result<EnergyLevel> {
    energy_hardwall(medium, modes, conf).map(|level| rotate(level, frame))
}

pub fn energy_rotating_asymptotic(
    medium: &DefectMedium,
    modes: &ModeNumbers,
    conf: &Confinement,
    frame: &RotationFrame,
) -> Result<EnergyLevel> {
    energy_asymptotic(medium, modes, conf).map(|level| rotate(level, frame))
}

/// √κ² · r0 for a static level of energy E, i.e. the argument of J at the wall.
pub fn wall_argument(
    medium: &DefectMedium,
    modes: &ModeNumbers,
    conf: &Confinement,
    energy: f64,
) -> Result<f64> {
    let kappa_squared = 2.0 * medium.mass() * energy - modes.k * modes.k;
    if kappa_squared < 0.0 {
        return Err(SpectrumError::Evanescent { kappa_squared });
    }
    Ok(kappa_squared.sqrt() * conf.r0)
}

/// A·J_|γ|(x) at the given points in [0, x0], scaled so that max |R| = 1.
pub fn radial_wavefunction(
    medium: &DefectMedium,
    modes: &ModeNumbers,
    conf: &Confinement,
    energy: f64,
    sample_points: &[f64],
) -> Result<Vec<f64>> {
    let x0 = wall_argument(medium, modes, conf, energy)?;
    let order = order_of(&effective_momentum(medium, modes))?;
    // allow the wall itself to be hit up to rounding
    let slack = 1e-12 * x0.max(1.0);
    let raw = sample_points
        .iter()
        .map(|&x| {
            if !(0.0..=x0 + slack).contains(&x) {
                return Err(SpectrumError::OutsideWall { x, x0 });
            }
            Ok(bessel_j(order, x)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    let peak = raw.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return Ok(raw);
    }
    Ok(raw.into_iter().map(|v| v / peak).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CrossingKind {
    /// E_a(Ω*) = E_b(Ω*) at Ω* inside the range.
    Crossing { omega: f64, energy: f64 },
    /// Equal slopes; `coincident` when the lines coincide.
    Parallel { coincident: bool },
    /// The lines meet at `omega`, outside the requested range.
    OutOfRange { omega: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub a: EnergyLevel,
    pub b: EnergyLevel,
    pub kind: CrossingKind,
}

/// Rotating levels are affine in Ω with slope −γ, so two levels meet once
/// unless their γ agree.
pub fn find_crossings(
    medium: &DefectMedium,
    conf: &Confinement,
    pairs: &[(ModeNumbers, ModeNumbers)],
    omega_range: (f64, f64),
) -> Result<Vec<Crossing>> {
    let (lo, hi) = omega_range;
    if !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(SpectrumError::InvalidRotation(format!(
            "omega range must be finite and ordered, got [{lo}, {hi}]"
        )));
    }
    pairs
        .iter()
        .map(|(ma, mb)| {
            let a = energy_hardwall(medium, ma, conf)?;
            let b = energy_hardwall(medium, mb, conf)?;
            Ok(Crossing {
                a,
                b,
                kind: crossing_kind(&a, &b, (lo, hi)),
            })
        })
        .collect()
}

fn crossing_kind(a: &EnergyLevel, b: &EnergyLevel, (lo, hi): (f64, f64)) -> CrossingKind {
    let slope_gap = a.gamma.gamma - b.gamma.gamma;
    let energy_gap = a.energy - b.energy;
    if slope_gap == 0.0 {
        return CrossingKind::Parallel {
            coincident: energy_gap == 0.0,
        };
    }
    let omega = energy_gap / slope_gap;
    if omega < lo || omega > hi {
        return CrossingKind::OutOfRange { omega };
    }
    CrossingKind::Crossing {
        omega,
        energy: a.energy - omega * a.gamma.gamma,
    }
}
