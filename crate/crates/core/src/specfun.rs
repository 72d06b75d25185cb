//! Bessel functions of the first kind for real, nonnegative order.
//!
//! `bessel_j` switches between the ascending power series (x below
//! [`SERIES_SEAM`]) and Steed's method, which pairs the continued fraction for
//! J'/J with the complex continued fraction for (J' + iY')/(J + iY) and fixes
//! the normalization through the Wronskian. Both branches are exposed so the
//! seam can be checked directly.
//!
//! Zeros are located by scanning for sign changes from a point known to lie
//! below the first zero and refining each bracket with a safeguarded Newton
//! iteration seeded by McMahon's expansion. Scanning every bracket in order is
//! what guarantees that no zero is skipped.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use thiserror::Error;

/// Crossover between the power series and the continued-fraction branch.
pub const SERIES_SEAM: f64 = 8.0;

/// Absolute tolerance guaranteed for every zero returned by [`bessel_zero`].
pub const ZERO_TOLERANCE: f64 = 1e-10;

/// Iteration cap of the Newton/bisection refinement of a single zero.
pub const ZERO_MAX_ITER: usize = 200;

// Zeros of J_nu are never closer than ~2.4 apart, so a quarter step cannot
// straddle two of them.
const ZERO_SCAN_STEP: f64 = 0.25;
const ZERO_MAX_SCAN: usize = 4000;

const CF_EPS: f64 = 1e-16;
const CF_FPMIN: f64 = 1e-300;
const CF_MAX_ITER: usize = 100_000;
const RESCALE_LIMIT: f64 = 1e250;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecfunError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error(
        "zero of J_{order} with index {index} did not converge within {iterations} iterations"
    )]
    Convergence {
        order: f64,
        index: usize,
        iterations: usize,
    },
}

pub type Result<T> = std::result::Result<T, SpecfunError>;

/// Order of a Bessel function: finite and nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() {
            return Err(SpecfunError::Domain(format!(
                "order must be finite, got {nu}"
            )));
        }
        if nu < 0.0 {
            return Err(SpecfunError::Domain(format!(
                "order must be nonnegative, got {nu}"
            )));
        }
        Ok(Self(nu))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// A positive root of J_order, counted from 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselZero {
    pub order: BesselOrder,
    pub index: usize,
    pub value: f64,
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(z: f64) -> f64 {
    LANCZOS_COEF
        .iter()
        .enumerate()
        .skip(1)
        .fold(LANCZOS_COEF[0], |acc, (i, c)| acc + c / (z + i as f64))
}

/// Gamma function for arguments ≥ 0.5 (Lanczos, g = 7).
pub fn gamma(x: f64) -> f64 {
    debug_assert!(x >= 0.5);
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z)
}

/// Natural log of the gamma function for arguments ≥ 0.5.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x >= 0.5);
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
}

fn check_argument(x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(SpecfunError::Domain(format!(
            "argument must be finite, got {x}"
        )));
    }
    if x < 0.0 {
        return Err(SpecfunError::Domain(format!(
            "argument must be nonnegative, got {x}"
        )));
    }
    Ok(())
}

/// J_nu(x). Absolute error below 1e-12 for nu in [0, 50], x in [0, 200].
pub fn bessel_j(order: BesselOrder, x: f64) -> Result<f64> {
    bessel_j_with_derivative(order, x).map(|(j, _)| j)
}

/// J_nu(x) together with dJ_nu/dx.
pub fn bessel_j_with_derivative(order: BesselOrder, x: f64) -> Result<(f64, f64)> {
    check_argument(x)?;
    if x < SERIES_SEAM {
        Ok(series(order.0, x))
    } else {
        Ok(steed(order.0, x))
    }
}

/// Ascending power series branch, usable on its own for any x ≥ 0.
pub fn bessel_j_series(order: BesselOrder, x: f64) -> Result<f64> {
    check_argument(x)?;
    Ok(series(order.0, x).0)
}

/// Continued-fraction branch; only valid for x ≥ 2.
pub fn bessel_j_continued_fraction(order: BesselOrder, x: f64) -> Result<f64> {
    check_argument(x)?;
    if x < 2.0 {
        return Err(SpecfunError::Domain(format!(
            "continued-fraction branch needs x >= 2, got {x}"
        )));
    }
    Ok(steed(order.0, x).0)
}

fn series(nu: f64, x: f64) -> (f64, f64) {
    if x == 0.0 {
        let value = if nu == 0.0 { 1.0 } else { 0.0 };
        let slope = if nu == 0.0 || nu > 1.0 {
            0.0
        } else if nu == 1.0 {
            0.5
        } else {
            f64::INFINITY
        };
        return (value, slope);
    }
    let half = 0.5 * x;
    let leading = if nu + 1.0 <= 100.0 {
        half.powf(nu) / gamma(nu + 1.0)
    } else {
        (nu * half.ln() - ln_gamma(nu + 1.0)).exp()
    };
    if leading == 0.0 {
        return (0.0, 0.0);
    }
    let neg_quarter_sq = -half * half;
    let mut term = leading;
    let mut largest = leading.abs();
    let mut sum = 0.0;
    let mut dsum = 0.0;
    let mut k = 0.0_f64;
    loop {
        sum += term;
        dsum += term * (2.0 * k + nu);
        k += 1.0;
        term *= neg_quarter_sq / (k * (k + nu));
        largest = largest.max(term.abs());
        if k * (k + nu) > half * half && term.abs() <= 1e-17 * largest {
            break;
        }
        if k > 1000.0 {
            break;
        }
    }
    (sum, dsum / x)
}

fn steed(nu: f64, x: f64) -> (f64, f64) {
    // Recur downward from nu to mu so that mu stays below x, where CF2 converges.
    let nl = ((nu - x + 1.5).floor()).max(0.0) as usize;
    let mu = nu - nl as f64;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    // CF1: f_nu = J'_nu / J_nu, modified Lentz.
    let mut sign = 1.0;
    let mut h = (nu * xi).max(CF_FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    for _ in 0..CF_MAX_ITER {
        b += xi2;
        d = b - d;
        if d.abs() < CF_FPMIN {
            d = CF_FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < CF_FPMIN {
            c = CF_FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            sign = -sign;
        }
        if (del - 1.0).abs() < CF_EPS {
            break;
        }
    }

    // Unnormalized downward recurrence, rescaled to stay finite.
    let mut jl = sign * 1e-30;
    let mut jpl = h * jl;
    let mut jl_top = jl;
    let mut jpl_top = jpl;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let next = fact * jl + jpl;
        fact -= xi;
        jpl = fact * next - jl;
        jl = next;
        let scale = jl.abs().max(jpl.abs());
        if scale > RESCALE_LIMIT {
            jl /= scale;
            jpl /= scale;
            jl_top /= scale;
            jpl_top /= scale;
        }
    }
    if jl == 0.0 {
        jl = CF_EPS;
    }
    let f = jpl / jl;

    // CF2: p + iq = (J' + iY')/(J + iY) at order mu.
    let mut a = 0.25 - mu * mu;
    let mut p = -0.5 * xi;
    let mut q = 1.0;
    let br = 2.0 * x;
    let mut bi = 2.0;
    let mut fact = a * xi / (p * p + q * q);
    let mut cr = br + q * fact;
    let mut ci = bi + p * fact;
    let mut den = br * br + bi * bi;
    let mut dr = br / den;
    let mut di = -bi / den;
    let mut dlr = cr * dr - ci * di;
    let mut dli = cr * di + ci * dr;
    let mut temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    for i in 2..CF_MAX_ITER {
        a += 2.0 * (i - 1) as f64;
        bi += 2.0;
        dr = a * dr + br;
        di = a * di + bi;
        if dr.abs() + di.abs() < CF_FPMIN {
            dr = CF_FPMIN;
        }
        fact = a / (cr * cr + ci * ci);
        cr = br + cr * fact;
        ci = bi - ci * fact;
        if cr.abs() + ci.abs() < CF_FPMIN {
            cr = CF_FPMIN;
        }
        den = dr * dr + di * di;
        dr /= den;
        di /= -den;
        dlr = cr * dr - ci * di;
        dli = cr * di + ci * dr;
        temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        if (dlr - 1.0).abs() + dli.abs() < CF_EPS {
            break;
        }
    }
    let gam = (p - f) / q;
    let j_mu = (w / ((p - f) * gam + q)).sqrt().copysign(jl);
    let norm = j_mu / jl;
    (jl_top * norm, jpl_top * norm)
}

/// Large-argument cosine form sqrt(2/(pi x)) cos(x - nu pi/2 - pi/4).
///
/// Reproduces the leading asymptotic term only; it is not an accurate
/// evaluator for small x.
pub fn bessel_j_asymptotic(order: BesselOrder, x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(SpecfunError::Domain(format!(
            "argument must be positive and finite, got {x}"
        )));
    }
    Ok((2.0 / (PI * x)).sqrt() * (x - order.0 * FRAC_PI_2 - FRAC_PI_4).cos())
}

/// McMahon's expansion for the index-th zero, first correction included.
pub fn mcmahon_guess(order: BesselOrder, index: usize) -> f64 {
    let nu = order.0;
    let b = (index as f64 + 0.5 * nu - 0.25) * PI;
    let mu = 4.0 * nu * nu;
    b - (mu - 1.0) / (8.0 * b)
}

/// The first `count` positive zeros of J_order, ascending.
pub fn bessel_zeros(order: BesselOrder, count: usize) -> Result<Vec<BesselZero>> {
    let nu = order.0;
    let eval = |x: f64| bessel_j_with_derivative(order, x);
    // J_nu > 0 on (0, j_{nu,1}) and j_{nu,1} > max(nu, j_{0,1}).
    let mut lo = nu.max(2.0);
    let mut f_lo = eval(lo)?.0;
    let mut zeros = Vec::with_capacity(count);
    for index in 1..=count {
        let mut hi = lo + ZERO_SCAN_STEP;
        let mut f_hi = eval(hi)?.0;
        let mut scans = 0;
        while f_lo * f_hi > 0.0 {
            lo = hi;
            f_lo = f_hi;
            hi += ZERO_SCAN_STEP;
            f_hi = eval(hi)?.0;
            scans += 1;
            if scans > ZERO_MAX_SCAN {
                return Err(SpecfunError::Convergence {
                    order: nu,
                    index,
                    iterations: scans,
                });
            }
        }
        let value = if f_hi == 0.0 {
            hi
        } else if f_lo == 0.0 {
            lo
        } else {
            refine_zero(&eval, lo, hi, f_lo, mcmahon_guess(order, index)).ok_or(
                SpecfunError::Convergence {
                    order: nu,
                    index,
                    iterations: ZERO_MAX_ITER,
                },
            )?
        };
        zeros.push(BesselZero {
            order,
            index,
            value,
        });
        lo = value + ZERO_SCAN_STEP;
        f_lo = eval(lo)?.0;
    }
    Ok(zeros)
}

/// The index-th positive zero of J_order (1-based).
pub fn bessel_zero(order: BesselOrder, index: usize) -> Result<BesselZero> {
    if index == 0 {
        return Err(SpecfunError::Domain("zero index is 1-based".into()));
    }
    let mut zeros = bessel_zeros(order, index)?;
    Ok(zeros.pop().expect("index >= 1 yields at least one zero"))
}

/// pi ((index - 1) + nu/2 + 3/4): zeros of the large-argument cosine form.
pub fn bessel_zero_asymptotic(order: BesselOrder, index: usize) -> Result<f64> {
    if index == 0 {
        return Err(SpecfunError::Domain("zero index is 1-based".into()));
    }
    Ok(PI * ((index - 1) as f64 + 0.5 * order.0 + 0.75))
}

// Newton with bisection fallback on [lo, hi], f(lo) and f(hi) of opposite sign.
fn refine_zero<F>(eval: &F, lo: f64, hi: f64, f_lo: f64, guess: f64) -> Option<f64>
where
    F: Fn(f64) -> Result<(f64, f64)>,
{
    // orient so that f(neg) < 0 < f(pos)
    let (mut neg, mut pos) = if f_lo < 0.0 { (lo, hi) } else { (hi, lo) };
    let mut x = if guess > lo && guess < hi {
        guess
    } else {
        0.5 * (lo + hi)
    };
    let mut dx_old = (hi - lo).abs();
    let mut dx = dx_old;
    let (mut f, mut df) = eval(x).ok()?;
    for _ in 0..ZERO_MAX_ITER {
        if f == 0.0 {
            return Some(x);
        }
        let newton_leaves = ((x - pos) * df - f) * ((x - neg) * df - f) > 0.0;
        let too_slow = (2.0 * f).abs() > (dx_old * df).abs();
        if newton_leaves || too_slow {
            dx_old = dx;
            dx = 0.5 * (pos - neg);
            x = neg + dx;
        } else {
            dx_old = dx;
            dx = f / df;
            x -= dx;
        }
        let (nf, ndf) = eval(x).ok()?;
        f = nf;
        df = ndf;
        if f < 0.0 {
            neg = x;
        } else {
            pos = x;
        }
        if dx.abs() < ZERO_TOLERANCE {
            // one polishing step; Newton is quadratic this close to the root
            let polished = x - f / df;
            let (a, b) = if neg < pos { (neg, pos) } else { (pos, neg) };
            if df != 0.0 && polished >= a && polished <= b {
                return Some(polished);
            }
            return Some(x);
        }
    }
    None
}
