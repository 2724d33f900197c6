use num_complex::Complex64;

use super::{EfficiencyReport, Method};
use crate::error::{Error, Result};
use crate::linalg::Factorization;
use crate::model::liouvillian::trap_couplings;
use crate::model::{build_liouvillian, population_index, DensityState, Superoperator, SystemSpec};

/// Largest accepted relative residual `||L x + rho0|| / ||rho0||`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;

/// Pivot spread above which the Liouvillian is treated as singular.
pub const PIVOT_RATIO_LIMIT: f64 = 1e13;

/// Loss rate substituted for `mu = 0` by [`efficiency_regularized`].
pub const DARK_STATE_MU: f64 = 1e-8;

/// Normwise backward error accepted when the relative residual alone is too
/// large. Near-dark systems have `||x|| ~ 1/mu`, so a backward-stable solve can
/// leave a residual of `eps * ||L|| * ||x||` that exceeds the fixed tolerance.
const BACKWARD_ERROR_LIMIT: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn check_inputs(spec: &SystemSpec, rho0: &DensityState) -> Result<()> {
    spec.validate()?;
    if rho0.sites() != spec.sites {
        return Err(Error::InvalidSize {
            size: rho0.sites(),
            min: spec.sites,
        });
    }
    rho0.validate()
}

fn norm_inf(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn operator_norm_inf(op: &Superoperator) -> f64 {
    let mut rows = vec![0.0; op.dim()];
    op.for_each_entry(|r, _, v| rows[r] += v.norm());
    rows.into_iter().fold(0.0, f64::max)
}

struct Solved {
    x: Vec<Complex64>,
    residual: f64,
    pivot_ratio: f64,
}

/// Solves `op x = rhs`, refines once if needed, and checks the result.
fn solve_checked(op: &Superoperator, fact: &Factorization, rhs: &[Complex64]) -> Result<Solved> {
    let pivot_ratio = fact.pivot_ratio();
    let singular = |residual: f64| Error::Singular {
        pivot_ratio,
        residual,
    };
    if pivot_ratio.is_nan() || pivot_ratio >= PIVOT_RATIO_LIMIT {
        return Err(singular(f64::INFINITY));
    }
    let mut x = fact.solve(rhs).ok_or_else(|| singular(f64::INFINITY))?;
    let rhs_norm = norm_inf(rhs).max(f64::MIN_POSITIVE);
    let residual_of = |x: &[Complex64]| -> Vec<Complex64> {
        let mut r = op.apply(x);
        for (ri, bi) in r.iter_mut().zip(rhs) {
            *ri -= bi;
        }
        r
    };

    let mut r = residual_of(&x);
    let mut rel = norm_inf(&r) / rhs_norm;
    if rel.is_nan() || rel > RESIDUAL_TOLERANCE {
        if let Some(dx) = fact.solve(&r) {
            let refined: Vec<Complex64> = x.iter().zip(&dx).map(|(a, d)| a - d).collect();
            let r2 = residual_of(&refined);
            let rel2 = norm_inf(&r2) / rhs_norm;
            if rel2 < rel {
                x = refined;
                r = r2;
                rel = rel2;
            }
        }
    }
    if !rel.is_finite() {
        return Err(singular(rel));
    }
    if rel > RESIDUAL_TOLERANCE {
        let backward = norm_inf(&r) / (operator_norm_inf(op) * norm_inf(&x) + rhs_norm);
        if backward.is_nan() || backward > BACKWARD_ERROR_LIMIT {
            return Err(singular(rel));
        }
    }
    Ok(Solved {
        x,
        residual: rel,
        pivot_ratio,
    })
}

fn factor_state_sector(op: &Superoperator) -> Factorization {
    if op.is_dense() {
        Factorization::dense(op.to_dense())
    } else {
        Factorization::banded(op)
    }
}

/// Tolerance on discarded imaginary parts. Rounding grows with the conditioning
/// of the solve, which the pivot spread tracks.
fn imag_tolerance(pivot_ratio: f64) -> f64 {
    1e-10f64.max(100.0 * f64::EPSILON * pivot_ratio)
}

fn real_part(quantity: &'static str, z: Complex64, pivot_ratio: f64) -> Result<f64> {
    if z.im.abs() > imag_tolerance(pivot_ratio) {
        return Err(Error::NonReal {
            quantity,
            imag: z.im,
        });
    }
    Ok(z.re)
}

/// Sums the populations `x_mm` over the given sites.
fn population_sum(
    sites: usize,
    x: &[Complex64],
    members: impl Iterator<Item = usize>,
) -> Complex64 {
    members.map(|m| x[population_index(sites, m)]).sum()
}

/// Efficiency from the resolvent `L x = -vec(rho0)`.
///
/// Fails with [`Error::Singular`] when the Liouvillian has a (near) zero mode,
/// which happens for `mu = 0` whenever a dark state exists; see
/// [`efficiency_regularized`].
pub fn efficiency_direct(spec: &SystemSpec, rho0: &DensityState) -> Result<EfficiencyReport> {
    check_inputs(spec, rho0)?;
    let op = build_liouvillian(spec)?;
    let fact = factor_state_sector(&op);
    let rhs: Vec<Complex64> = rho0.as_slice().iter().map(|z| -z).collect();
    let solved = solve_checked(&op, &fact, &rhs)?;
    let n = spec.sites;
    let trapped = population_sum(n, &solved.x, spec.trap_sites.iter().copied());
    let total = population_sum(n, &solved.x, 0..n);
    let eta = real_part("eta", trapped * (2.0 * spec.kappa), solved.pivot_ratio)?;
    let eta_loss = real_part("eta_loss", total * (2.0 * spec.mu), solved.pivot_ratio)?;
    Ok(EfficiencyReport {
        eta,
        eta_loss,
        method: Method::Direct,
        residual: solved.residual,
    })
}

/// [`efficiency_direct`] with `mu = 0` replaced by [`DARK_STATE_MU`], i.e. the
/// `mu -> 0+` limit.
pub fn efficiency_regularized(spec: &SystemSpec, rho0: &DensityState) -> Result<EfficiencyReport> {
    if spec.mu == 0.0 {
        let mut reg = spec.clone();
        reg.mu = DARK_STATE_MU;
        efficiency_direct(&reg, rho0)
    } else {
        efficiency_direct(spec, rho0)
    }
}

/// Efficiency read from the accumulator of the augmented system
/// `L~ sigma = epsilon * (vec(rho0), 0)`.
///
/// The accumulator entry comes out as `+eta`; its magnitude is reported so a
/// flipped sign convention cannot produce a negative efficiency. Dense systems
/// factor the full augmented matrix; large ones eliminate the accumulator row
/// by hand, since it never feeds back into the state sector.
pub fn efficiency_accumulator(
    spec: &SystemSpec,
    rho0: &DensityState,
    epsilon: f64,
) -> Result<EfficiencyReport> {
    check_inputs(spec, rho0)?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            value: epsilon,
            reason: "epsilon must be positive and finite",
        });
    }
    let n = spec.sites;
    let couplings = trap_couplings(spec);
    let base = build_liouvillian(spec)?;
    let augmented = base.clone().augmented(couplings.clone(), epsilon);
    let mut rhs: Vec<Complex64> = rho0.as_slice().iter().map(|z| z * epsilon).collect();
    rhs.push(ZERO);

    let (sigma, pivot_ratio, residual) = if augmented.is_dense() {
        let fact = Factorization::dense(augmented.to_dense());
        let solved = solve_checked(&augmented, &fact, &rhs)?;
        (solved.x, solved.pivot_ratio, solved.residual)
    } else {
        let fact = Factorization::banded(&base);
        let solved = solve_checked(&base, &fact, &rhs[..n * n])?;
        let mut sigma = solved.x;
        let feed: Complex64 = couplings.iter().map(|&(c, k)| sigma[c] * k).sum();
        sigma.push(-feed / epsilon);
        let mut r = augmented.apply(&sigma);
        for (ri, bi) in r.iter_mut().zip(&rhs) {
            *ri -= bi;
        }
        let residual = norm_inf(&r) / norm_inf(&rhs);
        (sigma, solved.pivot_ratio, residual)
    };

    let acc = sigma[n * n];
    let eta = real_part("eta", acc, pivot_ratio)?.abs();
    let total = population_sum(n, &sigma, 0..n) * (-2.0 * spec.mu / epsilon);
    let eta_loss = real_part("eta_loss", total, pivot_ratio)?;
    Ok(EfficiencyReport {
        eta,
        eta_loss,
        method: Method::Accumulator,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Topology;

    fn three_site() -> SystemSpec {
        SystemSpec::chain(3, 0, 1).with_kappa_mu(0.1, 0.01)
    }

    fn start(spec: &SystemSpec) -> DensityState {
        DensityState::localized(spec.sites, spec.initial_site).unwrap()
    }

    #[test]
    fn zero_dephasing_reference_value() {
        let spec = three_site();
        let r = efficiency_direct(&spec, &start(&spec)).unwrap();
        // alpha0 / beta0 of the three-site rational function
        let (k, m) = (0.1f64, 0.01f64);
        let a0 = k * (2.0 * k * m * m + k + 4.0 * m.powi(3) + 2.0 * m);
        let b0 = 2.0 * k.powi(3) * (m.powi(3) + m)
            + k * k * (10.0 * m.powi(4) + 13.0 * m * m + 1.0)
            + k * m * (16.0 * m.powi(4) + 29.0 * m * m + 6.0)
            + 4.0 * m * m * (2.0 * m.powi(4) + 5.0 * m * m + 2.0);
        assert!((r.eta - a0 / b0).abs() < 1e-12);
        assert!((r.eta + r.eta_loss - 1.0).abs() < 1e-12);
        assert!(r.residual < RESIDUAL_TOLERANCE);
        assert_eq!(r.method, Method::Direct);
    }

    #[test]
    fn no_trap_means_full_loss() {
        let spec = three_site().with_kappa_mu(0.0, 0.3).with_gamma(0.5);
        let r = efficiency_direct(&spec, &start(&spec)).unwrap();
        assert_eq!(r.eta, 0.0);
        assert!((r.eta_loss - 1.0).abs() < 1e-12);
        let acc = efficiency_accumulator(&spec, &start(&spec), 1.0).unwrap();
        assert_eq!(acc.eta, 0.0);
    }

    #[test]
    fn dark_state_is_refused_then_regularized() {
        // Antisymmetric combination around the middle trap never reaches it.
        let spec = SystemSpec::chain(3, 1, 0).with_kappa_mu(0.1, 0.0);
        let rho0 = start(&spec);
        let err = efficiency_direct(&spec, &rho0).unwrap_err();
        assert!(matches!(err, Error::Singular { .. }), "{err:?}");
        let reg = efficiency_regularized(&spec, &rho0).unwrap();
        assert!((reg.eta - 0.5).abs() < 1e-5, "{}", reg.eta);
    }

    #[test]
    fn no_attenuation_is_singular() {
        let spec = three_site().with_kappa_mu(0.0, 0.0).with_gamma(1.0);
        assert!(matches!(
            efficiency_direct(&spec, &start(&spec)),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn accumulator_is_epsilon_independent() {
        let spec = three_site().with_gamma(0.319);
        let rho0 = start(&spec);
        let direct = efficiency_direct(&spec, &rho0).unwrap().eta;
        for eps in [1e-3, 1.0, 1e3] {
            let r = efficiency_accumulator(&spec, &rho0, eps).unwrap();
            assert!((r.eta - direct).abs() < 1e-12, "eps={eps}");
            assert!((r.eta + r.eta_loss - 1.0).abs() < 1e-10);
        }
        assert!(efficiency_accumulator(&spec, &rho0, 0.0).is_err());
    }

    #[test]
    fn banded_path_matches_dense_path() {
        // 20 sites exceeds the dense limit; compare with a hand-built dense solve.
        let spec = SystemSpec::chain(20, 3, 9).with_rates(0.8, 0.05, 0.4);
        let rho0 = start(&spec);
        let banded = efficiency_direct(&spec, &rho0).unwrap();
        let op = Superoperator::dense(&spec).unwrap();
        let rhs: Vec<Complex64> = rho0.as_slice().iter().map(|z| -z).collect();
        let x = Factorization::dense(op.to_dense()).solve(&rhs).unwrap();
        let eta = (x[population_index(20, 3)] * 1.6).re;
        assert!((banded.eta - eta).abs() < 1e-11);
        let acc = efficiency_accumulator(&spec, &rho0, 2.0).unwrap();
        assert!((acc.eta - eta).abs() < 1e-11);
        assert!(acc.residual < RESIDUAL_TOLERANCE);
    }

    #[test]
    fn mismatched_state_is_rejected() {
        let spec = three_site();
        let rho0 = DensityState::localized(4, 1).unwrap();
        assert!(efficiency_direct(&spec, &rho0).is_err());
        assert_eq!(spec.topology, Topology::Chain);
    }
}
