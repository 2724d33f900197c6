//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each export is a thin wrapper over a plain function of the same name with a
//! `_impl` suffix, so the numerics can be tested natively. Sites are 1-based,
//! as in the CLI. Results come back as flat `Float64Array`s.

use enaqt_core::analysis::{self, log_grid, SweepTarget};
use enaqt_core::{SystemSpec, Topology};
use wasm_bindgen::prelude::*;

fn topology(name: &str) -> Result<Topology, String> {
    match name {
        "chain" => Ok(Topology::Chain),
        "ring" => Ok(Topology::Ring),
        _ => Err(format!("unknown topology '{name}'")),
    }
}

fn spec(name: &str, n: usize, trap: usize, init: usize) -> Result<SystemSpec, String> {
    if trap == 0 || init == 0 {
        return Err("sites are numbered from 1".into());
    }
    let spec = match topology(name)? {
        Topology::Ring => SystemSpec::ring(n, trap - 1, init - 1),
        _ => SystemSpec::chain(n, trap - 1, init - 1),
    };
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

/// `[gamma_0, eta_0, gamma_1, eta_1, ...]`, starting at `gamma = 0` followed
/// by `points` log-spaced rates in `[gamma_min, gamma_max]`.
#[allow(clippy::too_many_arguments)]
pub fn efficiency_curve_impl(
    topology: &str,
    n: usize,
    trap: usize,
    init: usize,
    kappa: f64,
    mu: f64,
    gamma_min: f64,
    gamma_max: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    let spec = spec(topology, n, trap, init)?.with_kappa_mu(kappa, mu);
    if !(gamma_min > 0.0 && gamma_max > gamma_min) || points < 2 {
        return Err("need 0 < gamma_min < gamma_max and at least 2 points".into());
    }
    let grid: Vec<f64> = std::iter::once(0.0)
        .chain(log_grid(gamma_min, gamma_max, points))
        .collect();
    let curve = analysis::efficiency_curve(&spec, &grid).map_err(|e| e.to_string())?;
    Ok(curve.into_iter().flat_map(|(g, eta)| [g, eta]).collect())
}

/// `[eta0, eta_max, gamma_opt, xi]`.
pub fn optimize_impl(
    topology: &str,
    n: usize,
    trap: usize,
    init: usize,
    kappa: f64,
    mu: f64,
) -> Result<Vec<f64>, String> {
    let spec = spec(topology, n, trap, init)?.with_kappa_mu(kappa, mu);
    let r = analysis::optimize_dephasing(&spec).map_err(|e| e.to_string())?;
    Ok(vec![r.eta0, r.eta_max, r.gamma_opt, r.xi])
}

/// Gain `xi` on a `count x count` log grid over `[rate_min, rate_max]` for
/// both rates; row-major with kappa as the row index. Failed cells are NaN.
pub fn plane_map_impl(
    topology: &str,
    n: usize,
    trap: usize,
    init: usize,
    rate_min: f64,
    rate_max: f64,
    count: usize,
) -> Result<Vec<f64>, String> {
    let s = spec(topology, n, trap, init)?;
    if !(rate_min > 0.0 && rate_max > rate_min) || count < 2 {
        return Err("need 0 < rate_min < rate_max and at least 2 points".into());
    }
    let grid = log_grid(rate_min, rate_max, count);
    let target = SweepTarget::Finite {
        topology: s.topology,
        sites: n,
        trap: trap - 1,
        init: init - 1,
    };
    let map = analysis::plane_sweep(target, &grid, &grid).map_err(|e| e.to_string())?;
    Ok(map
        .cells
        .iter()
        .map(|c| c.as_ref().map_or(f64::NAN, |r| r.xi))
        .collect())
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn efficiency_curve(
    topology: &str,
    n: usize,
    trap: usize,
    init: usize,
    kappa: f64,
    mu: f64,
    gamma_min: f64,
    gamma_max: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    efficiency_curve_impl(
        topology, n, trap, init, kappa, mu, gamma_min, gamma_max, points,
    )
    .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn optimize(
    topology: &str,
    n: usize,
    trap: usize,
    init: usize,
    kappa: f64,
    mu: f64,
) -> Result<Vec<f64>, JsError> {
    optimize_impl(topology, n, trap, init, kappa, mu).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn plane_map(
    topology: &str,
    n: usize,
    trap: usize,
    init: usize,
    rate_min: f64,
    rate_max: f64,
    count: usize,
) -> Result<Vec<f64>, JsError> {
    plane_map_impl(topology, n, trap, init, rate_min, rate_max, count).map_err(|e| JsError::new(&e))
}
