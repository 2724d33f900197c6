//! Searches for the largest dephasing gain over trapping and loss rates.

use super::dephasing::{golden_max, optimize_dephasing_from, DephasingSearch};
use super::infinite::infinite_chain_enaqt;
use super::{par_map, EnaqtResult};
use crate::error::{Error, Result};
use crate::model::{DensityState, SystemSpec, Topology};

/// `count` points spaced evenly in `log10` from `min` to `max` inclusive.
pub fn log_grid(min: f64, max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![min],
        _ => {
            let (a, b) = (min.log10(), max.log10());
            let step = (b - a) / (count - 1) as f64;
            (0..count)
                .map(|i| {
                    if i == count - 1 {
                        max
                    } else {
                        10f64.powf(a + step * i as f64)
                    }
                })
                .collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxEnaqtOptions {
    pub kappa_range: (f64, f64),
    pub mu_range: (f64, f64),
    /// Points per axis of the initial log grid.
    pub grid_points: usize,
    /// Local grid maxima that seed refinement.
    pub starts: usize,
    /// Refinement sweeps; the line-search half-width halves each round.
    pub rounds: usize,
    pub dephasing: DephasingSearch,
}

impl Default for MaxEnaqtOptions {
    fn default() -> Self {
        Self {
            kappa_range: (1e-4, 1e2),
            mu_range: (1e-4, 1e2),
            grid_points: 25,
            starts: 3,
            rounds: 4,
            dephasing: DephasingSearch::default(),
        }
    }
}

/// Best gain found over the `(kappa, mu)` box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxEnaqt {
    pub xi_max: f64,
    pub kappa_star: f64,
    pub mu_star: f64,
    pub gamma_opt: f64,
    pub eta0: f64,
    pub grid_points: usize,
    /// Initial grid spacing in decades along each axis.
    pub grid_step_decades: (f64, f64),
}

fn base_spec(topology: Topology, sites: usize, trap: usize, init: usize) -> Result<SystemSpec> {
    let spec =
        match topology {
            Topology::Chain => SystemSpec::chain(sites, trap, init),
            Topology::Ring => SystemSpec::ring(sites, trap, init),
            Topology::SemiInfinite => return Err(Error::DegenerateInput(
                "rate-box searches cover finite chains and rings; use the infinite-chain protocol",
            )),
        };
    spec.validate()?;
    Ok(spec)
}

/// [`max_enaqt_with`] on the default box `[1e-4, 1e2]^2` (0-based sites).
pub fn max_enaqt(topology: Topology, sites: usize, trap: usize, init: usize) -> Result<MaxEnaqt> {
    max_enaqt_with(topology, sites, trap, init, &MaxEnaqtOptions::default())
}

/// Maximizes the dephasing gain over `(kappa, mu)`: a log grid, then line
/// searches from the best local grid maxima along the two axes and the two
/// diagonals (gain ridges tend to follow fixed `mu / kappa`).
pub fn max_enaqt_with(
    topology: Topology,
    sites: usize,
    trap: usize,
    init: usize,
    opts: &MaxEnaqtOptions,
) -> Result<MaxEnaqt> {
    let base = base_spec(topology, sites, trap, init)?;
    let (k_lo, k_hi) = (opts.kappa_range.0.log10(), opts.kappa_range.1.log10());
    let (m_lo, m_hi) = (opts.mu_range.0.log10(), opts.mu_range.1.log10());
    if !(k_lo < k_hi && m_lo < m_hi && opts.grid_points >= 2) {
        return Err(Error::DegenerateInput(
            "rate box must be non-empty with 2+ grid points",
        ));
    }
    let rho0 = DensityState::localized(sites, init)?;
    let evaluate = |lk: f64, lm: f64| {
        let spec = base.clone().with_kappa_mu(10f64.powf(lk), 10f64.powf(lm));
        optimize_dephasing_from(&spec, &rho0, &opts.dephasing)
    };

    let g = opts.grid_points;
    let step = (
        (k_hi - k_lo) / (g - 1) as f64,
        (m_hi - m_lo) / (g - 1) as f64,
    );
    let cells: Vec<(f64, f64)> = (0..g * g)
        .map(|c| {
            (
                k_lo + step.0 * (c / g) as f64,
                m_lo + step.1 * (c % g) as f64,
            )
        })
        .collect();
    let values = par_map(&cells, |&(lk, lm)| evaluate(lk, lm))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let xi = |i: usize, j: usize| values[i * g + j].xi;
    let mut peaks: Vec<usize> = (0..g * g)
        .filter(|&c| {
            let (i, j) = (c / g, c % g);
            let v = xi(i, j);
            v > 0.0
                && (i.saturating_sub(1)..=(i + 1).min(g - 1))
                    .all(|a| (j.saturating_sub(1)..=(j + 1).min(g - 1)).all(|b| xi(a, b) <= v))
        })
        .collect();
    peaks.sort_by(|&a, &b| values[b].xi.total_cmp(&values[a].xi).then(a.cmp(&b)));
    peaks.truncate(opts.starts.max(1));

    let best_cell = (0..g * g)
        .max_by(|&a, &b| values[a].xi.total_cmp(&values[b].xi).then(b.cmp(&a)))
        .expect("grid is non-empty");
    let mut best = (values[best_cell], cells[best_cell]);

    let refined = par_map(&peaks, |&c| {
        refine(
            cells[c],
            values[c],
            step,
            ((k_lo, k_hi), (m_lo, m_hi)),
            opts.rounds,
            &evaluate,
        )
    });
    for r in refined {
        let (result, point) = r?;
        if result.xi > best.0.xi {
            best = (result, point);
        }
    }

    let (result, (lk, lm)) = best;
    Ok(MaxEnaqt {
        xi_max: result.xi,
        kappa_star: 10f64.powf(lk),
        mu_star: 10f64.powf(lm),
        gamma_opt: result.gamma_opt,
        eta0: result.eta0,
        grid_points: g,
        grid_step_decades: step,
    })
}

type Bounds = ((f64, f64), (f64, f64));

fn refine(
    start: (f64, f64),
    start_value: EnaqtResult,
    step: (f64, f64),
    bounds: Bounds,
    rounds: usize,
    evaluate: &(impl Fn(f64, f64) -> Result<EnaqtResult> + Sync),
) -> Result<(EnaqtResult, (f64, f64))> {
    let mut point = start;
    let mut best = start_value;
    let mut width = step.0.max(step.1);
    let directions = [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, -1.0)];
    for _ in 0..rounds {
        for &(dk, dm) in &directions {
            let (lo, hi) = segment(point, (dk, dm), width, bounds);
            if hi - lo <= 0.0 {
                continue;
            }
            let origin = point;
            let mut seen: Option<(EnaqtResult, (f64, f64))> = None;
            golden_max(
                |s| {
                    let p = (origin.0 + s * dk, origin.1 + s * dm);
                    let r = evaluate(p.0, p.1)?;
                    if seen.is_none_or(|(b, _)| r.xi > b.xi) {
                        seen = Some((r, p));
                    }
                    Ok(r.xi)
                },
                lo,
                hi,
                width * 1e-2,
            )?;
            if let Some((r, p)) = seen {
                if r.xi > best.xi {
                    best = r;
                    point = p;
                }
            }
        }
        width *= 0.5;
    }
    Ok((best, point))
}

/// Parameter range `[lo, hi]` of `point + s * dir` with `|s| <= width`,
/// clipped to the box.
fn segment(point: (f64, f64), dir: (f64, f64), width: f64, bounds: Bounds) -> (f64, f64) {
    let (mut lo, mut hi) = (-width, width);
    for (x, d, (a, b)) in [(point.0, dir.0, bounds.0), (point.1, dir.1, bounds.1)] {
        if d > 0.0 {
            lo = lo.max((a - x) / d);
            hi = hi.min((b - x) / d);
        } else if d < 0.0 {
            lo = lo.max((b - x) / d);
            hi = hi.min((a - x) / d);
        }
    }
    (lo, hi)
}

/// What a plane sweep evaluates in each cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepTarget {
    /// Finite chain or ring with 0-based trap and initial sites.
    Finite {
        topology: Topology,
        sites: usize,
        trap: usize,
        init: usize,
    },
    /// Truncated infinite chain, start `offset` sites right of the trap region.
    Infinite { offset: usize },
}

/// Per-cell optimization results over a `(kappa, mu)` grid.
#[derive(Debug, Clone)]
pub struct PlaneMap {
    pub target: SweepTarget,
    pub kappa_grid: Vec<f64>,
    pub mu_grid: Vec<f64>,
    /// Row-major in `(kappa index, mu index)`; failures are kept per cell.
    pub cells: Vec<Result<EnaqtResult>>,
}

impl PlaneMap {
    pub fn get(&self, kappa_index: usize, mu_index: usize) -> &Result<EnaqtResult> {
        &self.cells[kappa_index * self.mu_grid.len() + mu_index]
    }

    /// `(kappa, mu, result)` in grid order.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64, &Result<EnaqtResult>)> {
        let m = self.mu_grid.len();
        self.cells
            .iter()
            .enumerate()
            .map(move |(c, r)| (self.kappa_grid[c / m], self.mu_grid[c % m], r))
    }

    /// Cell with the largest gain among successful cells.
    pub fn best(&self) -> Option<(f64, f64, EnaqtResult)> {
        self.iter()
            .filter_map(|(k, m, r)| r.as_ref().ok().map(|r| (k, m, *r)))
            .fold(
                None,
                |acc: Option<(f64, f64, EnaqtResult)>, cur| match acc {
                    Some(a) if a.2.xi >= cur.2.xi => Some(a),
                    _ => Some(cur),
                },
            )
    }
}

fn check_grid(name: &'static str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::DegenerateInput("sweep grids must be non-empty"));
    }
    for &v in grid {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidRate { name, value: v });
        }
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter {
            name,
            value: grid[0],
            reason: "grid must be strictly increasing",
        });
    }
    Ok(())
}

/// Optimizes the dephasing rate in every cell of a `(kappa, mu)` grid. Cells are
/// independent; a failing cell is recorded, not fatal.
pub fn plane_sweep(target: SweepTarget, kappa_grid: &[f64], mu_grid: &[f64]) -> Result<PlaneMap> {
    check_grid("kappa", kappa_grid)?;
    check_grid("mu", mu_grid)?;
    let base = match target {
        SweepTarget::Finite {
            topology,
            sites,
            trap,
            init,
        } => Some((
            base_spec(topology, sites, trap, init)?,
            DensityState::localized(sites, init)?,
        )),
        SweepTarget::Infinite { offset } => {
            if offset == 0 {
                return Err(Error::InvalidParameter {
                    name: "offset",
                    value: 0.0,
                    reason: "offset must be at least 1",
                });
            }
            None
        }
    };
    let m = mu_grid.len();
    let cells: Vec<(f64, f64)> = (0..kappa_grid.len() * m)
        .map(|c| (kappa_grid[c / m], mu_grid[c % m]))
        .collect();
    let results = par_map(&cells, |&(kappa, mu)| match (&base, target) {
        (Some((spec, rho0)), _) => optimize_dephasing_from(
            &spec.clone().with_kappa_mu(kappa, mu),
            rho0,
            &DephasingSearch::default(),
        ),
        (None, SweepTarget::Infinite { offset }) => {
            infinite_chain_enaqt(kappa, mu, offset).map(|r| r.result)
        }
        (None, SweepTarget::Finite { .. }) => unreachable!("finite targets carry a spec"),
    });
    Ok(PlaneMap {
        target,
        kappa_grid: kappa_grid.to_vec(),
        mu_grid: mu_grid.to_vec(),
        cells: results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::optimize_dephasing;

    #[test]
    fn grid_endpoints() {
        let g = log_grid(1e-4, 1e2, 25);
        assert_eq!(g.len(), 25);
        assert!((g[0] - 1e-4).abs() < 1e-19);
        assert_eq!(g[24], 1e2);
        assert!((g[4] - 1e-3).abs() < 1e-17);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(log_grid(2.0, 3.0, 1), vec![2.0]);
    }

    #[test]
    fn segment_respects_box() {
        let b = ((0.0, 1.0), (0.0, 1.0));
        assert_eq!(segment((0.5, 0.5), (1.0, 0.0), 0.2, b), (-0.2, 0.2));
        let (lo, hi) = segment((0.9, 0.1), (1.0, -1.0), 0.5, b);
        assert!((lo + 0.5).abs() < 1e-15 && (hi - 0.1).abs() < 1e-15);
    }

    #[test]
    fn single_cell_matches_direct_optimization() {
        let target = SweepTarget::Finite {
            topology: Topology::Chain,
            sites: 3,
            trap: 0,
            init: 1,
        };
        let map = plane_sweep(target, &[0.1], &[0.01]).unwrap();
        let direct =
            optimize_dephasing(&SystemSpec::chain(3, 0, 1).with_kappa_mu(0.1, 0.01)).unwrap();
        assert_eq!(map.get(0, 0).as_ref().unwrap(), &direct);
        assert!(plane_sweep(target, &[0.2, 0.1], &[0.01]).is_err());
        assert!(plane_sweep(target, &[], &[0.01]).is_err());
    }

    #[test]
    fn three_site_maximum() {
        let r = max_enaqt(Topology::Chain, 3, 0, 1).unwrap();
        assert!((r.xi_max - (7.0 - 4.0 * 3f64.sqrt())).abs() < 1e-3, "{r:?}");
    }
}
