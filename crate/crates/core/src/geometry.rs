//! Screw-dislocation background and the separated radial equation.
//!
//! The medium is described by the line element
//!
//! ```text
//! ds² = dr² + r² dφ² + 2β dφ dz + dz²
//! ```
//!
//! whose spatial metric has determinant r² − β². With the ansatz
//! ψ = e^{ilφ + ikz} R(r), the Laplace-Beltrami Schrödinger equation reduces to
//!
//! ```text
//! R'' + r/(r² − β²) R' − γ²/(r² − β²) R + κ² R = 0,   γ = l − βk,  κ² = 2mE − k².
//! ```
//!
//! # The Mathieu form
//!
//! Put r = β cosh y, so dr/dy = β sinh y and r² − β² = β² sinh² y. Then
//!
//! ```text
//! R_r  = R_y / (β sinh y)
//! R_rr = (R_yy − coth y · R_y) / (β² sinh² y)
//! r/(r² − β²) R_r = coth y · R_y / (β² sinh² y)
//! ```
//!
//! The first-derivative terms cancel and, after multiplying by β² sinh² y,
//!
//! ```text
//! R_yy − γ² R + κ² β² sinh² y R = 0.
//! ```
//!
//! Using sinh² y = (cosh 2y − 1)/2 this is R_yy + [2q² cosh 2y − λ] R = 0 with
//!
//! ```text
//! λ  = γ² + β² κ² / 2
//! q² = β² κ² / 4
//! ```
//!
//! so 2q cosh y = β κ cosh y = κ r. The q² prefactor is β²/4; a β²/2 prefactor
//! would not reproduce the cosh 2y coefficient. The same derivation also shows
//! that the r-space residual at r = β cosh y is the y-space residual divided by
//! β² sinh² y.
//!
//! In a frame rotating at angular velocity Ω the separated rotation term only
//! shifts κ² to 2m(E + Ωγ) − k².

use thiserror::Error;

/// Physical points closer than this to r = β are reported as singular.
pub const SINGULARITY_GUARD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("invalid medium: {0}")]
    InvalidMedium(String),
    #[error("invalid mode numbers: {0}")]
    InvalidModes(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("evanescent axial mode: kappa^2 = {kappa_squared} < 0")]
    Evanescent { kappa_squared: f64 },
    #[error("radial coefficient singular at r = {r} (defect core at r = {beta})")]
    Singular { r: f64, beta: f64 },
}

pub type Result<T> = std::result::Result<T, GeometryError>;

/// Dislocation strength β and particle mass m (units ħ = c = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefectMedium {
    beta: f64,
    mass: f64,
}

impl DefectMedium {
    /// β = 0 is admitted as the defect-free baseline.
    pub fn new(beta: f64, mass: f64) -> Result<Self> {
        if !beta.is_finite() || !(0.0..1.0).contains(&beta) {
            return Err(GeometryError::InvalidMedium(format!(
                "beta must satisfy 0 <= beta < 1, got {beta}"
            )));
        }
        if !mass.is_finite() || mass <= 0.0 {
            return Err(GeometryError::InvalidMedium(format!(
                "mass must be positive, got {mass}"
            )));
        }
        Ok(Self { beta, mass })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }
}

/// Radial index n (1-based), angular momentum l, axial wavenumber k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeNumbers {
    pub n: u32,
    pub l: i32,
    pub k: f64,
}

impl ModeNumbers {
    pub fn new(n: u32, l: i32, k: f64) -> Result<Self> {
        if n == 0 {
            return Err(GeometryError::InvalidModes(
                "radial index n is 1-based".into(),
            ));
        }
        if !k.is_finite() {
            return Err(GeometryError::InvalidModes(format!(
                "k must be finite, got {k}"
            )));
        }
        Ok(Self { n, l, k })
    }
}

/// γ = l − βk and |γ|.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveMomentum {
    pub gamma: f64,
    pub magnitude: f64,
}

pub fn effective_momentum(medium: &DefectMedium, modes: &ModeNumbers) -> EffectiveMomentum {
    let gamma = modes.l as f64 - medium.beta * modes.k;
    EffectiveMomentum {
        gamma,
        magnitude: gamma.abs(),
    }
}

/// Spatial metric components at radius r, in (r, φ, z) order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSample {
    pub r: f64,
    pub g_rr: f64,
    pub g_phiphi: f64,
    pub g_phiz: f64,
    pub g_zz: f64,
    pub det_g: f64,
}

impl MetricSample {
    /// Determinant recomputed from the components.
    pub fn determinant(&self) -> f64 {
        self.g_rr * (self.g_phiphi * self.g_zz - self.g_phiz * self.g_phiz)
    }
}

/// Metric at radius r; the metric degenerates for r ≤ β, which is an error.
pub fn metric_sample(medium: &DefectMedium, r: f64) -> Result<MetricSample> {
    if !r.is_finite() || r <= 0.0 {
        return Err(GeometryError::Domain(format!(
            "radius must be positive, got {r}"
        )));
    }
    let beta = medium.beta;
    if r <= beta {
        return Err(GeometryError::Domain(format!(
            "metric is degenerate for r <= beta (r = {r}, beta = {beta})"
        )));
    }
    Ok(MetricSample {
        r,
        g_rr: 1.0,
        g_phiphi: r * r,
        g_phiz: beta,
        g_zz: 1.0,
        det_g: r * r - beta * beta,
    })
}

fn require_defect(medium: &DefectMedium) -> Result<f64> {
    if medium.beta == 0.0 {
        return Err(GeometryError::Domain(
            "the map r = beta cosh y is undefined for beta = 0".into(),
        ));
    }
    Ok(medium.beta)
}

/// r = β cosh y.
pub fn r_from_y(medium: &DefectMedium, y: f64) -> Result<f64> {
    let beta = require_defect(medium)?;
    if !y.is_finite() || y < 0.0 {
        return Err(GeometryError::Domain(format!(
            "y must be nonnegative, got {y}"
        )));
    }
    Ok(beta * y.cosh())
}

/// y = arccosh(r/β), defined for r ≥ β.
pub fn y_from_r(medium: &DefectMedium, r: f64) -> Result<f64> {
    let beta = require_defect(medium)?;
    if !r.is_finite() || r < beta {
        return Err(GeometryError::Domain(format!(
            "r must satisfy r >= beta = {beta}, got {r}"
        )));
    }
    Ok((r / beta).acosh())
}

/// λ, q² and the κ² they were built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MathieuParameters {
    pub lambda: f64,
    pub q_squared: f64,
    pub kappa_squared: f64,
}

/// κ² = 2m(E + Ωγ) − k².
pub fn kappa_squared(medium: &DefectMedium, modes: &ModeNumbers, energy: f64, omega: f64) -> f64 {
    let gamma = effective_momentum(medium, modes).gamma;
    2.0 * medium.mass * (energy + omega * gamma) - modes.k * modes.k
}

/// λ = γ² + β²κ²/2, q² = β²κ²/4. Ω = 0 is the static case.
pub fn mathieu_parameters(
    medium: &DefectMedium,
    modes: &ModeNumbers,
    energy: f64,
    omega: f64,
) -> MathieuParameters {
    let gamma = effective_momentum(medium, modes).gamma;
    let kappa_squared = kappa_squared(medium, modes, energy, omega);
    let beta_sq = medium.beta * medium.beta;
    MathieuParameters {
        lambda: gamma * gamma + 0.5 * beta_sq * kappa_squared,
        q_squared: 0.25 * beta_sq * kappa_squared,
        kappa_squared,
    }
}

/// x = 2q cosh y. At the wall this equals √κ² · r0.
pub fn x_from_y(
    medium: &DefectMedium,
    modes: &ModeNumbers,
    energy: f64,
    omega: f64,
    y: f64,
) -> Result<f64> {
    if !y.is_finite() || y < 0.0 {
        return Err(GeometryError::Domain(format!(
            "y must be nonnegative, got {y}"
        )));
    }
    let params = mathieu_parameters(medium, modes, energy, omega);
    if params.kappa_squared < 0.0 {
        return Err(GeometryError::Evanescent {
            kappa_squared: params.kappa_squared,
        });
    }
    Ok(2.0 * params.q_squared.sqrt() * y.cosh())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coordinate {
    PhysicalR,
    MathieuY,
}

/// Coefficients (a2, a1, a0) of a2 R'' + a1 R' + a0 R = 0 in one coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialOdeCoefficients {
    pub coordinate: Coordinate,
    beta: f64,
    gamma_squared: f64,
    params: MathieuParameters,
}

impl RadialOdeCoefficients {
    pub fn parameters(&self) -> MathieuParameters {
        self.params
    }

    /// Coefficients at `position` (r or y depending on the coordinate).
    pub fn at(&self, position: f64) -> Result<[f64; 3]> {
        match self.coordinate {
            Coordinate::PhysicalR => {
                let r = position;
                if (r - self.beta).abs() < SINGULARITY_GUARD {
                    return Err(GeometryError::Singular { r, beta: self.beta });
                }
                let core = r * r - self.beta * self.beta;
                Ok([
                    1.0,
                    r / core,
                    -self.gamma_squared / core + self.params.kappa_squared,
                ])
            }
            Coordinate::MathieuY => {
                let y = position;
                Ok([
                    1.0,
                    0.0,
                    2.0 * self.params.q_squared * (2.0 * y).cosh() - self.params.lambda,
                ])
            }
        }
    }

    /// a2 f'' + a1 f' + a0 f for a trial function given by its value and derivatives.
    pub fn residual(&self, position: f64, f: f64, df: f64, d2f: f64) -> Result<f64> {
        let [a2, a1, a0] = self.at(position)?;
        Ok(a2 * d2f + a1 * df + a0 * f)
    }
}

pub fn radial_ode_coefficients(
    medium: &DefectMedium,
    modes: &ModeNumbers,
    energy: f64,
    omega: f64,
    coordinate: Coordinate,
) -> Result<RadialOdeCoefficients> {
    if coordinate == Coordinate::MathieuY {
        require_defect(medium)?;
    }
    let gamma = effective_momentum(medium, modes).gamma;
    Ok(RadialOdeCoefficients {
        coordinate,
        beta: medium.beta,
        gamma_squared: gamma * gamma,
        params: mathieu_parameters(medium, modes, energy, omega),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn medium(beta: f64) -> DefectMedium {
        DefectMedium::new(beta, 1.0).unwrap()
    }

    fn modes(l: i32, k: f64) -> ModeNumbers {
        ModeNumbers::new(1, l, k).unwrap()
    }

    #[test]
    fn effective_momentum_examples() {
        assert_eq!(effective_momentum(&medium(0.0), &modes(3, 7.0)).gamma, 3.0);
        let g = effective_momentum(&medium(0.2), &modes(1, 2.0));
        assert!((g.gamma - 0.6).abs() < 1e-15);
        let g = effective_momentum(&medium(0.5), &modes(0, -2.0));
        assert_eq!(g.gamma, 1.0);
        assert_eq!(g.magnitude, 1.0);
        assert_eq!(
            effective_momentum(&medium(0.5), &modes(-3, 0.0)).magnitude,
            3.0
        );
    }

    #[test]
    fn coordinate_map_examples() {
        assert!((r_from_y(&medium(0.3), 0.0).unwrap() - 0.3).abs() < 1e-15);
        let y = y_from_r(&medium(0.3), 0.6).unwrap();
        assert!((y - (2.0 + 3.0_f64.sqrt()).ln()).abs() < 1e-14);
        assert!((y - 1.316_957_9).abs() < 1e-7);
        let r = r_from_y(&medium(0.1), 3.0).unwrap();
        assert!((r - 0.1 * 0.5 * (3.0_f64.exp() + (-3.0_f64).exp())).abs() < 1e-15);
        assert!((r - 1.006_766_2).abs() < 1e-7);
    }

    #[test]
    fn coordinate_map_errors() {
        assert!(r_from_y(&medium(0.0), 1.0).is_err());
        assert!(y_from_r(&medium(0.3), 0.2).is_err());
        assert!(r_from_y(&medium(0.3), -1.0).is_err());
    }

    #[test]
    fn mathieu_parameter_examples() {
        let p = mathieu_parameters(&medium(0.0), &modes(4, 3.0), 12.0, 0.0);
        assert_eq!((p.lambda, p.q_squared), (16.0, 0.0));

        let p = mathieu_parameters(&medium(0.1), &modes(1, 1.0), 10.0, 0.0);
        assert!((p.kappa_squared - 19.0).abs() < 1e-13);
        assert!((p.lambda - 0.905).abs() < 1e-13);
        assert!((p.q_squared - 0.0475).abs() < 1e-14);

        let p = mathieu_parameters(&medium(0.1), &modes(1, 1.0), 10.0, 0.5);
        assert!((p.kappa_squared - 19.9).abs() < 1e-13);
        assert!((p.lambda - 0.9095).abs() < 1e-13);
        assert!((p.q_squared - 0.049_75).abs() < 1e-14);
    }

    #[test]
    fn x_map_examples() {
        // q² = 0.0475 from the static example above
        let x = x_from_y(&medium(0.1), &modes(1, 1.0), 10.0, 0.0, 0.0).unwrap();
        assert!((x - 2.0 * 0.0475_f64.sqrt()).abs() < 1e-15);
        assert!((x - 0.435_889_9).abs() < 1e-7);

        assert_eq!(
            x_from_y(&medium(0.0), &modes(1, 1.0), 10.0, 0.0, 2.0).unwrap(),
            0.0
        );

        let j01 = 2.404_825_557_695_773;
        let y0 = 10.0_f64.acosh();
        let x = x_from_y(&medium(0.1), &modes(0, 0.0), 0.5 * j01 * j01, 0.0, y0).unwrap();
        assert!((x - j01).abs() < 1e-12);

        let err = x_from_y(&medium(0.1), &modes(0, 5.0), 1.0, 0.0, 0.0).unwrap_err();
        assert!(matches!(err, GeometryError::Evanescent { .. }));
    }

    #[test]
    fn ode_limits() {
        // beta = 0: R'' + R'/r - l² R/r² + κ² R
        let c = radial_ode_coefficients(
            &medium(0.0),
            &modes(2, 1.0),
            3.0,
            0.0,
            Coordinate::PhysicalR,
        )
        .unwrap();
        let [a2, a1, a0] = c.at(0.5).unwrap();
        assert_eq!(a2, 1.0);
        assert!((a1 - 2.0).abs() < 1e-15);
        assert!((a0 - (-4.0 / 0.25 + 5.0)).abs() < 1e-13);

        // q² = 0: R'' - λ R
        let c =
            radial_ode_coefficients(&medium(0.2), &modes(1, 0.0), 0.0, 0.0, Coordinate::MathieuY)
                .unwrap();
        assert_eq!(c.parameters().q_squared, 0.0);
        let [_, a1, a0] = c.at(1.7).unwrap();
        assert_eq!(a1, 0.0);
        assert!((a0 + c.parameters().lambda).abs() < 1e-15);
    }

    #[test]
    fn ode_errors() {
        assert!(radial_ode_coefficients(
            &medium(0.0),
            &modes(1, 0.0),
            1.0,
            0.0,
            Coordinate::MathieuY
        )
        .is_err());
        let c = radial_ode_coefficients(
            &medium(0.3),
            &modes(1, 0.0),
            1.0,
            0.0,
            Coordinate::PhysicalR,
        )
        .unwrap();
        assert!(matches!(
            c.at(0.3 + 1e-9),
            Err(GeometryError::Singular { .. })
        ));
        assert!(c.at(0.3 + 1e-6).is_ok());
    }

    #[test]
    fn chain_rule_equivalence_at_one_point() {
        // f(y) = sinh(y) e^{-y} = (1 - e^{-2y})/2
        let m = medium(0.3);
        let md = modes(1, 1.0);
        let energy = 10.0;
        let y: f64 = 1.0;
        let f = y.sinh() * (-y).exp();
        let fy = (-2.0 * y).exp();
        let fyy = -2.0 * (-2.0 * y).exp();
        let res_y = radial_ode_coefficients(&m, &md, energy, 0.0, Coordinate::MathieuY)
            .unwrap()
            .residual(y, f, fy, fyy)
            .unwrap();
        let s = 0.3 * y.sinh();
        let fr = fy / s;
        let frr = (fyy - y.cosh() / y.sinh() * fy) / (s * s);
        let r = 0.3 * y.cosh();
        let res_r = radial_ode_coefficients(&m, &md, energy, 0.0, Coordinate::PhysicalR)
            .unwrap()
            .residual(r, f, fr, frr)
            .unwrap();
        assert!((res_r - res_y / (s * s)).abs() < 1e-12 * res_r.abs().max(1.0));
    }

    #[test]
    fn metric_rejects_core() {
        assert!(metric_sample(&medium(0.4), 0.3).is_err());
        assert!(metric_sample(&medium(0.4), 0.4).is_err());
        let s = metric_sample(&medium(0.4), 0.5).unwrap();
        assert_eq!(s.g_phiz, 0.4);
    }

    #[test]
    fn invalid_inputs() {
        assert!(DefectMedium::new(1.0, 1.0).is_err());
        assert!(DefectMedium::new(-0.1, 1.0).is_err());
        assert!(DefectMedium::new(0.1, 0.0).is_err());
        assert!(DefectMedium::new(f64::NAN, 1.0).is_err());
        assert!(ModeNumbers::new(0, 0, 0.0).is_err());
        assert!(ModeNumbers::new(1, 0, f64::INFINITY).is_err());
    }
}
