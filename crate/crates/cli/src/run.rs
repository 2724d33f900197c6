//! Dispatch from a validated [`RunConfig`] to the core library.

use enaqt_core::analysis::{
    efficiency_curve, infinite_chain_enaqt, max_enaqt, optimize_dephasing, plane_sweep,
    EnaqtResult, SweepTarget,
};
use enaqt_core::solver::{
    efficiency_accumulator, efficiency_direct, efficiency_propagation, Method, DEFAULT_TOLERANCE,
};
use enaqt_core::{DensityState, SystemSpec};

use crate::config::{Job, Point, RunConfig, SweepSystem, TopologyArg};
use crate::error::CliError;
use crate::output::{echo, OutputRecord, Value, VERSION};

fn solver(context: impl Into<String>) -> impl FnOnce(enaqt_core::Error) -> CliError {
    let context = context.into();
    move |source| CliError::Solver { context, source }
}

fn spec(p: &Point, gamma: f64) -> SystemSpec {
    let base = match p.topology {
        TopologyArg::Ring => SystemSpec::ring(p.n, p.trap - 1, p.init - 1),
        _ => SystemSpec::chain(p.n, p.trap - 1, p.init - 1),
    };
    base.with_rates(p.kappa, p.mu, gamma)
        .with_coupling(p.coupling)
}

fn describe(p: &Point) -> String {
    format!(
        "{} N={} trap={} init={} kappa={} mu={}",
        p.topology, p.n, p.trap, p.init, p.kappa, p.mu
    )
}

fn enaqt_values(r: &EnaqtResult) -> Vec<Value> {
    vec![
        Value::Real(r.eta0),
        Value::Real(r.eta_max),
        Value::Real(r.gamma_opt),
        Value::Real(r.xi),
    ]
}

fn version() -> Value {
    Value::Text(VERSION.into())
}

/// Computes the records for `config`, ordered by grid index.
pub fn run(config: &RunConfig) -> Result<Vec<OutputRecord>, CliError> {
    let job = &config.job;
    let echo = echo(job);
    let (result_names, meta_names) = crate::output::result_columns(job.kind());
    let record = |results: Vec<Value>, meta: Vec<Value>| OutputRecord {
        echo: echo.clone(),
        results: result_names.iter().copied().zip(results).collect(),
        meta: meta_names.iter().copied().zip(meta).collect(),
    };

    let records = match job {
        Job::Efficiency {
            point,
            gamma,
            method,
        } => {
            let spec = spec(point, *gamma);
            let rho0 = DensityState::localized(spec.sites, spec.initial_site)
                .map_err(solver(describe(point)))?;
            let report = match method {
                Method::Direct => efficiency_direct(&spec, &rho0),
                Method::Accumulator => efficiency_accumulator(&spec, &rho0, 1.0),
                Method::Propagation => efficiency_propagation(&spec, &rho0, DEFAULT_TOLERANCE),
            }
            .map_err(solver(format!("{} gamma={gamma}", describe(point))))?;
            vec![record(
                vec![Value::Real(report.eta), Value::Real(report.eta_loss)],
                vec![
                    Value::Text(report.method.name().into()),
                    Value::Real(report.residual),
                    version(),
                ],
            )]
        }
        Job::Curve { point, gamma } => {
            let grid: Vec<f64> = std::iter::once(0.0)
                .chain(gamma.points().into_iter().filter(|&g| g > 0.0))
                .collect();
            efficiency_curve(&spec(point, 0.0), &grid)
                .map_err(solver(describe(point)))?
                .into_iter()
                .map(|(g, eta)| record(vec![Value::Real(g), Value::Real(eta)], vec![version()]))
                .collect()
        }
        Job::Optimize { point } => {
            let r = optimize_dephasing(&spec(point, 0.0)).map_err(solver(describe(point)))?;
            vec![record(enaqt_values(&r), vec![version()])]
        }
        Job::Sweep { system, kappa, mu } => {
            let target = match *system {
                SweepSystem::Finite {
                    topology,
                    n,
                    trap,
                    init,
                } => SweepTarget::Finite {
                    topology: topology.core(),
                    sites: n,
                    trap: trap - 1,
                    init: init - 1,
                },
                SweepSystem::Infinite { offset } => SweepTarget::Infinite { offset },
            };
            let map =
                plane_sweep(target, &kappa.points(), &mu.points()).map_err(solver("sweep"))?;
            map.iter()
                .map(|(k, m, cell)| {
                    let mut results = vec![Value::Param(k), Value::Param(m)];
                    let error = match cell {
                        Ok(r) => {
                            results.extend(enaqt_values(r));
                            Value::Missing
                        }
                        Err(e) => {
                            results.extend([
                                Value::Missing,
                                Value::Missing,
                                Value::Missing,
                                Value::Missing,
                            ]);
                            Value::Text(e.to_string())
                        }
                    };
                    record(results, vec![error, version()])
                })
                .collect()
        }
        Job::Table { topology, n } => table_pairs(*topology, *n)
            .into_iter()
            .map(|(trap, init)| {
                let best = max_enaqt(topology.core(), *n, trap - 1, init - 1).map_err(solver(
                    format!("table {topology} N={n} trap={trap} init={init}"),
                ))?;
                Ok(record(
                    vec![
                        Value::Int(trap),
                        Value::Int(init),
                        Value::Real(best.xi_max),
                        Value::Real(best.kappa_star),
                        Value::Real(best.mu_star),
                        Value::Real(best.gamma_opt),
                        Value::Real(best.eta0),
                    ],
                    vec![
                        Value::Int(best.grid_points),
                        Value::Real(best.grid_step_decades.0),
                        Value::Real(best.grid_step_decades.1),
                        version(),
                    ],
                ))
            })
            .collect::<Result<_, CliError>>()?,
        Job::Infinite { kappa, mu, offset } => {
            let r = infinite_chain_enaqt(*kappa, *mu, *offset).map_err(solver(format!(
                "infinite kappa={kappa} mu={mu} offset={offset}"
            )))?;
            vec![record(
                enaqt_values(&r.result),
                vec![
                    Value::Int(r.left),
                    Value::Int(r.right),
                    Value::Real(r.truncation_delta),
                    r.propagation_delta.map_or(Value::Missing, Value::Real),
                    version(),
                ],
            )]
        }
    };
    Ok(records)
}

/// 1-based `(trap, init)` pairs of a table. Mirror images of a chain and
/// rotations of a ring give identical rows, so chains list traps up to the
/// middle and rings fix the trap on site 1.
pub fn table_pairs(topology: TopologyArg, n: usize) -> Vec<(usize, usize)> {
    let traps = match topology {
        TopologyArg::Ring => 1..=1,
        _ => 1..=n.div_ceil(2),
    };
    traps
        .flat_map(|t| (1..=n).filter(move |&i| i != t).map(move |i| (t, i)))
        .collect()
}
