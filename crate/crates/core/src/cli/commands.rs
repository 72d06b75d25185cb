use super::config::{BcChoice, ConfigError, MethodChoice, ModeTriple, RunConfig};
use super::output::{Cell, Table};
use crate::geometry::{effective_momentum, DefectMedium, ModeNumbers};
use crate::mathieu_oracle::{
    finite_difference_baseline, rotating_oracle, BoundaryCondition, MathieuProblem,
};
use crate::specfun::{bessel_j, bessel_zero_asymptotic, bessel_zeros, mcmahon_guess, BesselOrder};
use crate::spectrum::{
    energy_rotating, energy_rotating_asymptotic, find_crossings, Confinement, CrossingKind,
    EnergyLevel, RotationFrame,
};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Upper bound on generated crossing pairs when none are listed.
pub const MAX_GENERATED_PAIRS: usize = 200_000;

pub const ROW_HEADER: [&str; 19] = [
    "beta",
    "mass",
    "r0",
    "omega",
    "k",
    "l",
    "n",
    "gamma",
    "method",
    "energy",
    "theta",
    "reference_energy",
    "abs_deviation",
    "rel_deviation",
    "bc",
    "residual",
    "node_count",
    "beta_slope",
    "status",
];

/// A finished table and how many of its rows failed.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub table: Table,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub beta: f64,
    pub mass: f64,
    pub r0: f64,
    pub omega: f64,
    pub k: f64,
    pub l: i32,
    pub n: u32,
    pub gamma: f64,
    pub method: &'static str,
    pub energy: Option<f64>,
    pub theta: Option<f64>,
    pub reference_energy: Option<f64>,
    pub bc: Option<&'static str>,
    pub residual: Option<f64>,
    pub node_count: Option<usize>,
    pub beta_slope: Option<f64>,
    pub status: String,
}

impl ResultRow {
    fn new(
        cfg: &RunConfig,
        beta: f64,
        omega: f64,
        k: f64,
        l: i32,
        n: u32,
        method: &'static str,
    ) -> Self {
        Self {
            beta,
            mass: cfg.mass,
            r0: cfg.r0,
            omega,
            k,
            l,
            n,
            gamma: l as f64 - beta * k,
            method,
            energy: None,
            theta: None,
            reference_energy: None,
            bc: None,
            residual: None,
            node_count: None,
            beta_slope: None,
            status: "ok".to_string(),
        }
    }

    fn failed(mut self, err: impl std::fmt::Display) -> Self {
        self.status = format!("error: {err}");
        self
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }

    pub fn deviation(&self) -> Option<f64> {
        Some(self.energy? - self.reference_energy?)
    }

    fn cells(&self) -> Vec<Cell> {
        let deviation = self.deviation();
        let relative = deviation.zip(self.reference_energy).map(|(d, r)| d / r);
        vec![
            self.beta.into(),
            self.mass.into(),
            self.r0.into(),
            self.omega.into(),
            self.k.into(),
            Cell::Int(self.l as i64),
            Cell::Int(self.n as i64),
            self.gamma.into(),
            self.method.into(),
            self.energy.into(),
            self.theta.into(),
            self.reference_energy.into(),
            deviation.map(f64::abs).into(),
            relative.map(f64::abs).into(),
            self.bc.map_or(Cell::Empty, Cell::from),
            self.residual.into(),
            self.node_count.map_or(Cell::Empty, |c| Cell::Int(c as i64)),
            self.beta_slope.into(),
            self.status.as_str().into(),
        ]
    }
}

fn report(rows: Vec<ResultRow>) -> Report {
    let mut table = Table::new(ROW_HEADER.to_vec());
    let failures = rows.iter().filter(|r| !r.is_ok()).count();
    for r in &rows {
        table.push(r.cells());
    }
    Report { table, failures }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct GridPoint {
    beta: f64,
    omega: f64,
    k: f64,
    l: i32,
    n: u32,
}

// canonical order: β, then Ω, k, l, n
fn grid(cfg: &RunConfig) -> Vec<GridPoint> {
    let mut out = Vec::new();
    for &beta in &cfg.betas {
        for &omega in &cfg.omegas {
            for &k in &cfg.ks {
                for l in cfg.ls() {
                    for n in 1..=cfg.n_max {
                        out.push(GridPoint {
                            beta,
                            omega,
                            k,
                            l,
                            n,
                        });
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ClosedForm {
    Exact,
    Asymptotic,
}

fn closed_form(cfg: &RunConfig, p: &GridPoint, form: ClosedForm) -> Result<EnergyLevel, String> {
    let medium = DefectMedium::new(p.beta, cfg.mass).map_err(|e| e.to_string())?;
    let conf = Confinement::new(cfg.r0, &medium).map_err(|e| e.to_string())?;
    let modes = ModeNumbers::new(p.n, p.l, p.k).map_err(|e| e.to_string())?;
    let frame = RotationFrame::new(p.omega).map_err(|e| e.to_string())?;
    match form {
        ClosedForm::Exact => energy_rotating(&medium, &modes, &conf, &frame),
        ClosedForm::Asymptotic => energy_rotating_asymptotic(&medium, &modes, &conf, &frame),
    }
    .map_err(|e| e.to_string())
}

fn level_row(cfg: &RunConfig, p: &GridPoint, form: ClosedForm) -> ResultRow {
    let method = match form {
        ClosedForm::Exact => "exact_zero",
        ClosedForm::Asymptotic => "asymptotic",
    };
    let row = ResultRow::new(cfg, p.beta, p.omega, p.k, p.l, p.n, method);
    match closed_form(cfg, p, form) {
        Ok(level) => ResultRow {
            energy: Some(level.energy),
            theta: level.theta,
            ..row
        },
        Err(e) => row.failed(e),
    }
}

/// Closed-form levels over the configured grid with the configured method.
pub fn spectrum(cfg: &RunConfig) -> Report {
    let forms: &[ClosedForm] = match cfg.method {
        MethodChoice::Exact => &[ClosedForm::Exact],
        MethodChoice::Asymptotic => &[ClosedForm::Asymptotic],
        MethodChoice::Both => &[ClosedForm::Exact, ClosedForm::Asymptotic],
    };
    let rows: Vec<ResultRow> = grid(cfg)
        .par_iter()
        .flat_map_iter(|p| forms.iter().map(move |&f| level_row(cfg, p, f)))
        .collect();
    report(rows)
}

/// Exact and asymptotic rows side by side; the asymptotic rows carry the
/// exact energy as their reference.
pub fn sweep(cfg: &RunConfig) -> Report {
    let rows: Vec<ResultRow> = grid(cfg)
        .par_iter()
        .flat_map_iter(|p| {
            let exact = level_row(cfg, p, ClosedForm::Exact);
            let mut asym = level_row(cfg, p, ClosedForm::Asymptotic);
            asym.reference_energy = exact.energy;
            [exact, asym]
        })
        .collect();
    report(rows)
}

#[derive(Debug, Clone, Copy)]
struct OracleUnit {
    beta: f64,
    omega: f64,
    k: f64,
    l: i32,
    bc: Option<BoundaryCondition>,
}

fn oracle_units(cfg: &RunConfig) -> Vec<OracleUnit> {
    let families: &[BoundaryCondition] = match cfg.bc {
        BcChoice::Even => &[BoundaryCondition::Even],
        BcChoice::Odd => &[BoundaryCondition::Odd],
        BcChoice::Both => &[BoundaryCondition::Even, BoundaryCondition::Odd],
    };
    let mut out = Vec::new();
    for &beta in &cfg.oracle_betas {
        for &omega in &cfg.omegas {
            for &k in &cfg.ks {
                for l in cfg.ls() {
                    if beta == 0.0 {
                        out.push(OracleUnit {
                            beta,
                            omega,
                            k,
                            l,
                            bc: None,
                        });
                    } else {
                        for &bc in families {
                            out.push(OracleUnit {
                                beta,
                                omega,
                                k,
                                l,
                                bc: Some(bc),
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

// energy, then residual and node count for oracle rows
type Solved = (f64, Option<(f64, usize)>);

fn oracle_rows(cfg: &RunConfig, u: &OracleUnit) -> Vec<ResultRow> {
    let method = if u.bc.is_some() {
        "mathieu_oracle"
    } else {
        "finite_difference"
    };
    let count = cfg.n_max as usize;
    let solved: Result<Vec<Solved>, String> = match u.bc {
        None => finite_difference_baseline(cfg.mass, u.l, u.k, cfg.r0, count)
            .map(|energies| {
                energies
                    .into_iter()
                    .map(|e| (e - u.omega * u.l as f64, None))
                    .collect()
            })
            .map_err(|e| e.to_string()),
        Some(bc) => DefectMedium::new(u.beta, cfg.mass)
            .map_err(|e| e.to_string())
            .and_then(|m| {
                let conf = Confinement::new(cfg.r0, &m).map_err(|e| e.to_string())?;
                MathieuProblem::new(m, u.l, u.k, &conf, u.omega, bc, count)
                    .map_err(|e| e.to_string())
            })
            .and_then(|p| rotating_oracle(&p).map_err(|e| e.to_string()))
            .map(|found| {
                found
                    .into_iter()
                    .map(|ev| (ev.energy, Some((ev.residual, ev.node_count))))
                    .collect()
            }),
    };
    if let Err(e) = &solved {
        log::warn!(
            "oracle failed at beta={} omega={} k={} l={}: {e}",
            u.beta,
            u.omega,
            u.k,
            u.l
        );
    }
    (1..=cfg.n_max)
        .map(|n| {
            let p = GridPoint {
                beta: u.beta,
                omega: u.omega,
                k: u.k,
                l: u.l,
                n,
            };
            let mut row = ResultRow::new(cfg, u.beta, u.omega, u.k, u.l, n, method);
            row.bc = u.bc.map(|b| b.as_str());
            match closed_form(cfg, &p, ClosedForm::Exact) {
                Ok(level) => {
                    row.reference_energy = Some(level.energy);
                    row.theta = level.theta;
                }
                Err(e) => return row.failed(e),
            }
            match &solved {
                Ok(levels) => {
                    let (energy, extra) = levels[n as usize - 1];
                    row.energy = Some(energy);
                    if let Some((residual, nodes)) = extra {
                        row.residual = Some(residual);
                        row.node_count = Some(nodes);
                    }
                    row
                }
                Err(e) => row.failed(e),
            }
        })
        .collect()
}

/// Least-squares slope of ln|y| against ln x.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 3
        || points
            .iter()
            .any(|&(x, y)| x <= 0.0 || y == 0.0 || !y.is_finite())
    {
        return None;
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.abs().ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Oracle energies paired with the closed form; β = 0 rows come from the
/// finite-difference baseline. Failed solves become flagged rows.
pub fn oracle(cfg: &RunConfig) -> Report {
    let mut rows: Vec<ResultRow> = oracle_units(cfg)
        .par_iter()
        .flat_map_iter(|u| oracle_rows(cfg, u))
        .collect();

    // β-scaling per (Ω, k, l, n, bc) over the defect rows
    let mut groups: BTreeMap<(u64, u64, i32, u32, &str), Vec<usize>> = BTreeMap::new();
    for (i, r) in rows.iter().enumerate() {
        if let Some(bc) = r.bc {
            groups
                .entry((r.omega.to_bits(), r.k.to_bits(), r.l, r.n, bc))
                .or_default()
                .push(i);
        }
    }
    for members in groups.values() {
        if members.len() < 3 || members.iter().any(|&i| !rows[i].is_ok()) {
            continue;
        }
        let points: Vec<(f64, f64)> = members
            .iter()
            .filter_map(|&i| Some((rows[i].beta, rows[i].deviation()?)))
            .collect();
        if let Some(s) = log_log_slope(&points) {
            for &i in members {
                rows[i].beta_slope = Some(s);
            }
        }
    }
    report(rows)
}

pub const CROSSING_HEADER: [&str; 19] = [
    "beta",
    "mass",
    "r0",
    "n_a",
    "l_a",
    "k_a",
    "gamma_a",
    "energy_a",
    "n_b",
    "l_b",
    "k_b",
    "gamma_b",
    "energy_b",
    "kind",
    "omega_star",
    "energy",
    "omega_lo",
    "omega_hi",
    "status",
];

fn crossing_pairs(cfg: &RunConfig) -> Result<Vec<(ModeTriple, ModeTriple)>, ConfigError> {
    if !cfg.pairs.is_empty() {
        return Ok(cfg.pairs.clone());
    }
    let mut levels = Vec::new();
    for &k in &cfg.ks {
        for l in cfg.ls() {
            for n in 1..=cfg.n_max {
                levels.push((n, l, k));
            }
        }
    }
    let total = levels.len() * levels.len().saturating_sub(1) / 2;
    if total > MAX_GENERATED_PAIRS {
        return Err(ConfigError::Invalid {
            field: "crossings.pairs".into(),
            message: format!(
                "the mode grid yields {total} pairs (limit {MAX_GENERATED_PAIRS}); list pairs explicitly"
            ),
        });
    }
    let mut pairs = Vec::with_capacity(total);
    for i in 0..levels.len() {
        for j in i + 1..levels.len() {
            pairs.push((levels[i], levels[j]));
        }
    }
    Ok(pairs)
}

/// Level crossings of the rotating spectrum inside `rotation.omega_range`.
pub fn crossings(cfg: &RunConfig) -> Result<Report, ConfigError> {
    let (lo, hi) = cfg.omega_range.ok_or_else(|| {
        ConfigError::Missing("rotation.omega_range is required for crossings".into())
    })?;
    let pairs = crossing_pairs(cfg)?;
    let units: Vec<(f64, (ModeTriple, ModeTriple))> = cfg
        .betas
        .iter()
        .flat_map(|&b| pairs.iter().map(move |&p| (b, p)))
        .collect();
    let rows: Vec<Vec<Cell>> = units
        .par_iter()
        .map(|&(beta, (a, b))| crossing_row(cfg, beta, a, b, (lo, hi)))
        .collect();
    let mut table = Table::new(CROSSING_HEADER.to_vec());
    let mut failures = 0;
    for row in rows {
        if matches!(row.last(), Some(Cell::Text(s)) if s != "ok") {
            failures += 1;
        }
        table.push(row);
    }
    Ok(Report { table, failures })
}

fn crossing_row(
    cfg: &RunConfig,
    beta: f64,
    a: ModeTriple,
    b: ModeTriple,
    range: (f64, f64),
) -> Vec<Cell> {
    let gamma = |t: ModeTriple| t.1 as f64 - beta * t.2;
    let mut row: Vec<Cell> = vec![
        beta.into(),
        cfg.mass.into(),
        cfg.r0.into(),
        Cell::Int(a.0 as i64),
        Cell::Int(a.1 as i64),
        a.2.into(),
        gamma(a).into(),
        Cell::Empty,
        Cell::Int(b.0 as i64),
        Cell::Int(b.1 as i64),
        b.2.into(),
        gamma(b).into(),
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        Cell::Empty,
        range.0.into(),
        range.1.into(),
        "ok".into(),
    ];
    let found = DefectMedium::new(beta, cfg.mass)
        .map_err(|e| e.to_string())
        .and_then(|m| {
            let conf = Confinement::new(cfg.r0, &m).map_err(|e| e.to_string())?;
            let ma = ModeNumbers::new(a.0, a.1, a.2).map_err(|e| e.to_string())?;
            let mb = ModeNumbers::new(b.0, b.1, b.2).map_err(|e| e.to_string())?;
            debug_assert_eq!(effective_momentum(&m, &ma).gamma, gamma(a));
            find_crossings(&m, &conf, &[(ma, mb)], range).map_err(|e| e.to_string())
        });
    match found {
        Ok(list) => {
            let c = list[0];
            row[7] = c.a.energy.into();
            row[12] = c.b.energy.into();
            let (kind, omega, energy) = match c.kind {
                CrossingKind::Crossing { omega, energy } => ("crossing", Some(omega), Some(energy)),
                CrossingKind::Parallel { coincident: true } => ("coincident", None, None),
                CrossingKind::Parallel { coincident: false } => ("parallel", None, None),
                CrossingKind::OutOfRange { omega } => ("out_of_range", Some(omega), None),
            };
            row[13] = kind.into();
            row[14] = omega.into();
            row[15] = energy.into();
        }
        Err(e) => row[18] = format!("error: {e}").into(),
    }
    row
}

pub const ZERO_HEADER: [&str; 7] = [
    "nu",
    "index",
    "zero",
    "residual",
    "mcmahon",
    "asymptotic",
    "status",
];

/// Bessel zeros with their residuals and the two approximations.
pub fn specfun_table(orders: &[f64], count: usize) -> Report {
    let rows: Vec<Vec<Vec<Cell>>> = orders
        .par_iter()
        .map(|&nu| {
            let failed = |e: String| {
                let mut row = vec![Cell::Empty; 7];
                row[0] = nu.into();
                row[6] = format!("error: {e}").into();
                vec![row]
            };
            let order = match BesselOrder::new(nu) {
                Ok(o) => o,
                Err(e) => return failed(e.to_string()),
            };
            match bessel_zeros(order, count) {
                Ok(zeros) => zeros
                    .iter()
                    .map(|z| {
                        let residual = bessel_j(order, z.value).map(f64::abs).ok();
                        vec![
                            nu.into(),
                            Cell::Int(z.index as i64),
                            z.value.into(),
                            residual.into(),
                            mcmahon_guess(order, z.index).into(),
                            bessel_zero_asymptotic(order, z.index).ok().into(),
                            "ok".into(),
                        ]
                    })
                    .collect(),
                Err(e) => failed(e.to_string()),
            }
        })
        .collect();
    let mut table = Table::new(ZERO_HEADER.to_vec());
    let mut failures = 0;
    for row in rows.into_iter().flatten() {
        if matches!(row.last(), Some(Cell::Text(s)) if s != "ok") {
            failures += 1;
        }
        table.push(row);
    }
    Report { table, failures }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_power_law() {
        let pts: Vec<(f64, f64)> = [0.05, 0.1, 0.2].iter().map(|&b| (b, 3.0 * b * b)).collect();
        assert!((log_log_slope(&pts).unwrap() - 2.0).abs() < 1e-12);
        assert!(log_log_slope(&pts[..2]).is_none());
        assert!(log_log_slope(&[(0.1, 1.0), (0.2, 0.0), (0.3, 1.0)]).is_none());
    }
}
