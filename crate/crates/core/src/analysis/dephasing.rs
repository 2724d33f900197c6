use super::search::log_grid;
use super::EnaqtResult;
use crate::error::{Error, Result};
use crate::model::{DensityState, SystemSpec};
use crate::solver::efficiency_regularized;

pub const GAMMA_GRID_MIN: f64 = 1e-4;
pub const GAMMA_GRID_MAX: f64 = 1e4;
pub const GAMMA_GRID_POINTS: usize = 64;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Scan-then-refine settings for the dephasing optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingSearch {
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub points: usize,
    /// Relative width at which golden-section refinement stops.
    pub rel_tol: f64,
}

impl Default for DephasingSearch {
    fn default() -> Self {
        Self {
            gamma_min: GAMMA_GRID_MIN,
            gamma_max: GAMMA_GRID_MAX,
            points: GAMMA_GRID_POINTS,
            rel_tol: 1e-4,
        }
    }
}

/// Maximizes `f` on `[a, b]` by golden-section search, assuming unimodality.
pub(crate) fn golden_max(
    mut f: impl FnMut(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

fn initial_state(spec: &SystemSpec) -> Result<DensityState> {
    DensityState::localized(spec.sites, spec.initial_site)
}

fn efficiency_at(spec: &SystemSpec, rho0: &DensityState, gamma: f64) -> Result<f64> {
    efficiency_regularized(&spec.clone().with_gamma(gamma), rho0)
        .map(|r| r.eta)
        .map_err(|e| e.at_gamma(gamma))
}

/// `(gamma, eta)` along `gamma_grid`, starting from the initial site of `spec`.
pub fn efficiency_curve(spec: &SystemSpec, gamma_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    if gamma_grid.is_empty() {
        return Err(Error::DegenerateInput("dephasing grid is empty"));
    }
    if let Some(&bad) = gamma_grid.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
        return Err(Error::InvalidRate {
            name: "gamma",
            value: bad,
        });
    }
    spec.validate()?;
    let rho0 = initial_state(spec)?;
    gamma_grid
        .iter()
        .map(|&g| efficiency_at(spec, &rho0, g).map(|eta| (g, eta)))
        .collect()
}

/// Best dephasing rate for a particle starting on the initial site of `spec`.
///
/// `mu = 0` is treated as the `mu -> 0+` limit.
pub fn optimize_dephasing(spec: &SystemSpec) -> Result<EnaqtResult> {
    spec.validate()?;
    optimize_dephasing_from(spec, &initial_state(spec)?, &DephasingSearch::default())
}

/// Scans a log grid of dephasing rates, refines around the best grid point by
/// golden-section search, and compares against `gamma = 0`.
pub fn optimize_dephasing_from(
    spec: &SystemSpec,
    rho0: &DensityState,
    search: &DephasingSearch,
) -> Result<EnaqtResult> {
    if !(search.gamma_min > 0.0 && search.gamma_max > search.gamma_min && search.points >= 2) {
        return Err(Error::DegenerateInput(
            "dephasing search needs 0 < min < max and 2+ points",
        ));
    }
    spec.validate()?;
    let eta = |g: f64| efficiency_at(spec, rho0, g);
    let eta0 = eta(0.0)?;
    let grid = log_grid(search.gamma_min, search.gamma_max, search.points);
    let values = grid.iter().map(|&g| eta(g)).collect::<Result<Vec<_>>>()?;

    let (best, &best_value) =
        values
            .iter()
            .enumerate()
            .fold((0, &f64::NEG_INFINITY), |acc, (i, v)| {
                if *v > *acc.1 {
                    (i, v)
                } else {
                    acc
                }
            });
    let (mut gamma_opt, mut eta_max) = (grid[best], best_value);

    let refined = if best == 0 {
        golden_max(eta, 0.0, grid[1], search.rel_tol * grid[1])?
    } else {
        let hi = grid[(best + 1).min(grid.len() - 1)];
        let (x, v) = golden_max(
            |u| eta(u.exp()),
            grid[best - 1].ln(),
            hi.ln(),
            search.rel_tol.ln_1p(),
        )?;
        (x.exp(), v)
    };
    if refined.1 > eta_max {
        (gamma_opt, eta_max) = refined;
    }

    if eta_max > eta0 {
        Ok(EnaqtResult {
            eta0,
            eta_max,
            gamma_opt,
            xi: eta_max - eta0,
        })
    } else {
        Ok(EnaqtResult {
            eta0,
            eta_max: eta0,
            gamma_opt: 0.0,
            xi: 0.0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_site() -> SystemSpec {
        SystemSpec::chain(3, 0, 1).with_kappa_mu(0.1, 0.01)
    }

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, v) = golden_max(|x| Ok(1.0 - (x - 0.3).powi(2)), -2.0, 5.0, 1e-9).unwrap();
        assert!((x - 0.3).abs() < 1e-8);
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn optimum_of_three_site_chain() {
        let r = optimize_dephasing(&three_site()).unwrap();
        assert!((r.gamma_opt - 0.31927).abs() < 1e-3, "{r:?}");
        assert!((r.xi - 0.037911).abs() < 1e-5, "{r:?}");
        assert_eq!(r.xi, r.eta_max - r.eta0);
    }

    #[test]
    fn no_gain_reports_zero_rate() {
        let r = optimize_dephasing(&three_site().with_kappa_mu(1.0, 1.0)).unwrap();
        assert_eq!(r.xi, 0.0);
        assert_eq!(r.gamma_opt, 0.0);
        assert_eq!(r.eta_max, r.eta0);
    }

    #[test]
    fn curve_limits() {
        let curve = efficiency_curve(&three_site(), &[0.0, 0.319, 1e4]).unwrap();
        assert!((curve[0].1 - 0.71290).abs() < 1e-5);
        assert!((curve[1].1 - 0.75081).abs() < 1e-4);
        assert!(curve[2].1 < 1e-2);
        let flat =
            efficiency_curve(&three_site().with_kappa_mu(0.0, 0.01), &[0.0, 1.0, 10.0]).unwrap();
        assert!(flat.iter().all(|&(_, eta)| eta == 0.0));
        assert!(efficiency_curve(&three_site(), &[]).is_err());
        assert!(efficiency_curve(&three_site(), &[-1.0]).is_err());
    }
}
