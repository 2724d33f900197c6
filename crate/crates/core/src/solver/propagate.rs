//! Adaptive Dormand–Prince 5(4) integration of the master equation.
//!
//! The trapped probability is integrated as one more ODE component (the
//! accumulator of the augmented generator with a zero diagonal), so it shares
//! the step sequence and error control of the state.

use num_complex::Complex64;

use super::{EfficiencyReport, Method};
use crate::error::{Error, Result};
use crate::model::liouvillian::trap_couplings;
use crate::model::{population_index, DensityState, Superoperator, SystemSpec};

/// Default local error tolerance (absolute and relative).
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Survival below which [`efficiency_propagation`] stops early.
const EFFICIENCY_SURVIVAL_FLOOR: f64 = 1e-15;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
/// Fifth- minus fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Which states a trajectory keeps. Scalar diagnostics are always kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StoreStates {
    All,
    /// Only the initial and final state.
    Endpoints,
    /// Every `k`-th accepted step, plus both endpoints.
    Every(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagateOptions {
    pub horizon: f64,
    pub tol: f64,
    pub store: StoreStates,
    /// Stop once the survival probability drops below this value.
    pub survival_floor: f64,
}

impl PropagateOptions {
    pub fn new(horizon: f64, tol: f64) -> Self {
        Self {
            horizon,
            tol,
            store: StoreStates::All,
            survival_floor: 0.0,
        }
    }

    /// Horizon `50 / mu`, after which at most `e^-100` of the particle remains.
    pub fn for_spec(spec: &SystemSpec) -> Result<Self> {
        if spec.mu.is_nan() || spec.mu <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "mu",
                value: spec.mu,
                reason: "the default horizon 50/mu needs mu > 0; pass a horizon explicitly",
            });
        }
        Ok(Self::new(50.0 / spec.mu, DEFAULT_TOLERANCE))
    }

    pub fn with_store(mut self, store: StoreStates) -> Self {
        self.store = store;
        self
    }

    pub fn with_survival_floor(mut self, floor: f64) -> Self {
        self.survival_floor = floor;
        self
    }
}

/// Time series of one propagation run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    sites: usize,
    times: Vec<f64>,
    survival: Vec<f64>,
    survival_rate: Vec<f64>,
    trapped: Vec<f64>,
    /// `2 kappa sum_t rho_tt` at the last accepted time.
    final_trap_rate: f64,
    states: Vec<DensityState>,
    horizon: f64,
}

impl Trajectory {
    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Accepted step times, starting at 0.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// `tr rho` at each accepted time.
    pub fn survival(&self) -> &[f64] {
        &self.survival
    }

    /// `2 kappa int_0^t sum_t rho_tt` at each accepted time.
    pub fn trapped_cumulative(&self) -> &[f64] {
        &self.trapped
    }

    pub fn states(&self) -> &[DensityState] {
        &self.states
    }

    /// Requested horizon; the run ends earlier if the survival floor was hit.
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory has an initial point")
    }

    pub fn final_survival(&self) -> f64 {
        *self
            .survival
            .last()
            .expect("trajectory has an initial point")
    }

    /// Trapped probability after the last step plus the share of the remaining
    /// population that the current branching ratio sends to the trap. The tail
    /// term never exceeds the remaining survival.
    pub fn efficiency_estimate(&self) -> f64 {
        let trapped = *self
            .trapped
            .last()
            .expect("trajectory has an initial point");
        trapped + self.final_survival() * self.tail_branching()
    }

    fn tail_branching(&self) -> f64 {
        let decay = -*self
            .survival_rate
            .last()
            .expect("trajectory has an initial point");
        if decay > 0.0 {
            (self.final_trap_rate / decay).clamp(0.0, 1.0)
        } else {
            0.0
        }
    }
}

fn axpy_stages(y: &[Complex64], h: f64, ks: &[&[Complex64]], a: &[f64], out: &mut [Complex64]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = ZERO;
        for (k, &w) in ks.iter().zip(a) {
            if w != 0.0 {
                acc += k[i] * w;
            }
        }
        *o = y[i] + acc * h;
    }
}

fn survival_and_rate(sites: usize, y: &[Complex64], f: &[Complex64]) -> (f64, f64) {
    (0..sites).fold((0.0, 0.0), |(s, r), m| {
        let p = population_index(sites, m);
        (s + y[p].re, r + f[p].re)
    })
}

/// Propagates `rho0` to `horizon`, storing every accepted state.
pub fn propagate(
    spec: &SystemSpec,
    rho0: &DensityState,
    horizon: f64,
    tol: f64,
) -> Result<Trajectory> {
    propagate_with(spec, rho0, &PropagateOptions::new(horizon, tol))
}

pub fn propagate_with(
    spec: &SystemSpec,
    rho0: &DensityState,
    opts: &PropagateOptions,
) -> Result<Trajectory> {
    spec.validate()?;
    if rho0.sites() != spec.sites {
        return Err(Error::InvalidSize {
            size: rho0.sites(),
            min: spec.sites,
        });
    }
    rho0.validate()?;
    if !(opts.horizon > 0.0 && opts.horizon.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "horizon",
            value: opts.horizon,
            reason: "horizon must be positive and finite",
        });
    }
    if !(opts.tol > 0.0 && opts.tol.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: opts.tol,
            reason: "tolerance must be positive and finite",
        });
    }
    if let StoreStates::Every(0) = opts.store {
        return Err(Error::InvalidParameter {
            name: "store",
            value: 0.0,
            reason: "state stride must be at least 1",
        });
    }

    let n = spec.sites;
    let op = Superoperator::matrix_free(spec)?.augmented(trap_couplings(spec), 0.0);
    let dim = op.dim();
    let acc = n * n;
    let tol = opts.tol;

    let mut y: Vec<Complex64> = rho0.as_slice().to_vec();
    y.push(ZERO);
    let mut k: Vec<Vec<Complex64>> = vec![vec![ZERO; dim]; 7];
    let mut stage = vec![ZERO; dim];
    let mut y_new = vec![ZERO; dim];
    op.apply_into(&y, &mut k[0]);

    let (s0, r0) = survival_and_rate(n, &y, &k[0]);
    let mut traj = Trajectory {
        sites: n,
        times: vec![0.0],
        survival: vec![s0],
        survival_rate: vec![r0],
        trapped: vec![0.0],
        final_trap_rate: k[0][acc].re,
        states: vec![DensityState::from_vec(n, y[..acc].to_vec(), 0.0)?],
        horizon: opts.horizon,
    };

    let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let (d0, d1) = (norm(&y), norm(&k[0]));
    let mut h = if d0 > 0.0 && d1 > 0.0 {
        0.01 * d0 / d1
    } else {
        1e-3
    };
    h = h.min(opts.horizon);

    let mut t = 0.0;
    let mut steps = 0usize;
    let mut rejected_last = false;
    while t < opts.horizon && traj.final_survival() >= opts.survival_floor {
        let last = t + h >= opts.horizon;
        if last {
            h = opts.horizon - t;
        }

        for (s, a) in [&A2[..], &A3[..], &A4[..], &A5[..], &A6[..]]
            .into_iter()
            .enumerate()
        {
            {
                let ks: Vec<&[Complex64]> = k[..=s].iter().map(|v| v.as_slice()).collect();
                axpy_stages(&y, h, &ks, a, &mut stage);
            }
            op.apply_into(&stage, &mut k[s + 1]);
        }
        {
            let ks: Vec<&[Complex64]> = k[..6].iter().map(|v| v.as_slice()).collect();
            axpy_stages(&y, h, &ks, &B, &mut y_new);
        }
        op.apply_into(&y_new, &mut k[6]);

        let mut err = 0.0;
        for i in 0..dim {
            let mut e = ZERO;
            for (kj, &w) in k.iter().zip(&E) {
                if w != 0.0 {
                    e += kj[i] * w;
                }
            }
            let scale = tol + tol * y[i].norm().max(y_new[i].norm());
            err += (e * h).norm_sqr() / (scale * scale);
        }
        let err = (err / dim as f64).sqrt();

        if err <= 1.0 {
            t = if last { opts.horizon } else { t + h };
            std::mem::swap(&mut y, &mut y_new);
            k.swap(0, 6);
            steps += 1;

            let (s, rate) = survival_and_rate(n, &y, &k[0]);
            traj.times.push(t);
            traj.survival.push(s);
            traj.survival_rate.push(rate);
            traj.trapped.push(y[acc].re);
            traj.final_trap_rate = k[0][acc].re;
            let keep = match opts.store {
                StoreStates::All => true,
                StoreStates::Endpoints => false,
                StoreStates::Every(stride) => steps.is_multiple_of(stride),
            };
            let done = t >= opts.horizon || s < opts.survival_floor;
            if keep || done {
                traj.states
                    .push(DensityState::from_vec(n, y[..acc].to_vec(), t)?);
            }

            let growth = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= if rejected_last {
                growth.min(1.0)
            } else {
                growth
            };
            rejected_last = false;
        } else {
            h *= (0.9 * err.powf(-0.2)).max(0.2);
            rejected_last = true;
        }
        if h < 1e-13 * t.abs().max(1.0) {
            return Err(Error::Stiffness { time: t, step: h });
        }
    }
    // The stored final state may not coincide with the last scalar sample only
    // if nothing was stored after it; push it so `states` always ends at t.
    if traj.states.last().map(|s| s.time()) != Some(t) {
        traj.states
            .push(DensityState::from_vec(n, y[..acc].to_vec(), t)?);
    }
    Ok(traj)
}

/// `tr rho(t)` by monotone cubic Hermite interpolation between accepted steps.
pub fn survival_probability(traj: &Trajectory, t: f64) -> Result<f64> {
    let end = traj.final_time();
    if !(t >= 0.0 && t <= end) {
        return Err(Error::OutOfRange {
            time: t,
            horizon: end,
        });
    }
    let times = &traj.times;
    let i = match times.binary_search_by(|x| x.total_cmp(&t)) {
        Ok(i) => return Ok(traj.survival[i].clamp(0.0, 1.0)),
        Err(i) => i - 1,
    };
    let (t0, t1) = (times[i], times[i + 1]);
    let (s0, s1) = (traj.survival[i], traj.survival[i + 1]);
    let (d0, d1) = (traj.survival_rate[i], traj.survival_rate[i + 1]);
    let h = t1 - t0;
    let u = (t - t0) / h;
    let (u2, u3) = (u * u, u * u * u);
    let value = (2.0 * u3 - 3.0 * u2 + 1.0) * s0
        + (u3 - 2.0 * u2 + u) * h * d0
        + (-2.0 * u3 + 3.0 * u2) * s1
        + (u3 - u2) * h * d1;
    let (lo, hi) = if s0 >= s1 { (s1, s0) } else { (s0, s1) };
    Ok(value.clamp(lo, hi).clamp(0.0, 1.0))
}

/// Efficiency by propagation to `50 / mu` (or until the survival is below
/// `1e-15`), plus the tail estimate. `residual` reports the final survival.
pub fn efficiency_propagation(
    spec: &SystemSpec,
    rho0: &DensityState,
    tol: f64,
) -> Result<EfficiencyReport> {
    let mut opts = PropagateOptions::for_spec(spec)?
        .with_store(StoreStates::Endpoints)
        .with_survival_floor(EFFICIENCY_SURVIVAL_FLOOR);
    opts.tol = tol;
    let traj = propagate_with(spec, rho0, &opts)?;
    let eta = traj.efficiency_estimate();
    let start = rho0.trace();
    Ok(EfficiencyReport {
        eta,
        eta_loss: start - eta,
        method: Method::Propagation,
        residual: traj.final_survival(),
    })
}
