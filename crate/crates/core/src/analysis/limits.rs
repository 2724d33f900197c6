//! Weak-attenuation estimates built from the coherent eigenstates.
//!
//! [`chain_amplitude`] and [`average_population`] take 1-based site labels
//! `l, m` as in the textbook eigenstate formulas; everything else is 0-based.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::Topology;

/// Time-averaged population of site `l` for a particle started on site `m`
/// (both 1-based) under coherent hopping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AveragePopulation {
    pub l: usize,
    pub m: usize,
    pub value: f64,
}

fn delta(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

fn check_label(label: usize, sites: usize) -> Result<()> {
    if label == 0 || label > sites {
        Err(Error::InvalidSite {
            index: label,
            sites,
        })
    } else {
        Ok(())
    }
}

fn check_size(topology: Topology, sites: usize) -> Result<()> {
    if topology == Topology::SemiInfinite {
        return Err(Error::DegenerateInput(
            "weak-attenuation formulas cover finite chains and rings only",
        ));
    }
    let min = topology.min_sites();
    if sites < min {
        return Err(Error::InvalidSize { size: sites, min });
    }
    Ok(())
}

/// Uniform-mixing estimate `1 / (1 + N mu / kappa)`: strong dephasing spreads
/// the particle evenly, so the trap holds `1/N` of it.
pub fn dephased_efficiency_estimate(sites: usize, kappa: f64, mu: f64) -> f64 {
    kappa / (kappa + sites as f64 * mu)
}

/// Amplitude `<l| e^{-iHt} |m>` on a chain with unit coupling (1-based labels).
pub fn chain_amplitude(sites: usize, l: usize, m: usize, t: f64) -> Result<Complex64> {
    check_size(Topology::Chain, sites)?;
    check_label(l, sites)?;
    check_label(m, sites)?;
    let np1 = (sites + 1) as f64;
    let norm = 2.0 / np1;
    let mut total = Complex64::new(0.0, 0.0);
    for k in 1..=sites {
        let q = PI * k as f64 / np1;
        let weight = norm * (q * l as f64).sin() * (q * m as f64).sin();
        total += Complex64::from_polar(weight, -2.0 * q.cos() * t);
    }
    Ok(total)
}

/// Infinite-time average of `|<l| e^{-iHt} |m>|^2` (1-based labels).
pub fn average_population(
    topology: Topology,
    sites: usize,
    l: usize,
    m: usize,
) -> Result<AveragePopulation> {
    check_size(topology, sites)?;
    check_label(l, sites)?;
    check_label(m, sites)?;
    let n = sites as f64;
    let value = match topology {
        Topology::Chain => (1.0 + 0.5 * delta(l, m) + 0.5 * delta(l, sites + 1 - m)) / (n + 1.0),
        Topology::Ring if sites % 2 == 1 => (n * (1.0 + delta(l, m)) - 1.0) / (n * n),
        Topology::Ring => {
            let opposite = (m - 1 + sites / 2) % sites + 1;
            (n * (1.0 + delta(l, m) + delta(l, opposite)) - 2.0) / (n * n)
        }
        Topology::SemiInfinite => unreachable!("rejected by check_size"),
    };
    Ok(AveragePopulation { l, m, value })
}

fn is_opposite(topology: Topology, sites: usize, trap: usize, init: usize) -> bool {
    match topology {
        Topology::Chain => trap + init + 1 == sites,
        Topology::Ring => sites.is_multiple_of(2) && (trap + sites - init) % sites == sites / 2,
        Topology::SemiInfinite => false,
    }
}

/// Weak-attenuation estimate of the dephasing gain (0-based sites). Zero when
/// the initial site is the mirror (chain) or antipode (ring) of the trap, where
/// coherent recurrences already beat uniform mixing.
///
/// The coherent side uses the uniform `1/(N+1)` trap population, so starts
/// next to an end trap (which see more of the trap early on) are
/// underestimated by a factor of two or more at `N = 5`.
pub fn enaqt_estimate(
    topology: Topology,
    sites: usize,
    kappa: f64,
    mu: f64,
    trap: usize,
    init: usize,
) -> Result<f64> {
    check_size(topology, sites)?;
    for site in [trap, init] {
        if site >= sites {
            return Err(Error::InvalidSite { index: site, sites });
        }
    }
    if trap == init {
        return Err(Error::CoincidentSites { site: init });
    }
    if is_opposite(topology, sites, trap, init) {
        return Ok(0.0);
    }
    let n = sites as f64;
    let r = mu / kappa;
    let coherent_weight = match topology {
        Topology::Chain => n + 1.0,
        _ => n * n / (n - 1.0),
    };
    Ok(1.0 / (1.0 + n * r) - 1.0 / (1.0 + coherent_weight * r))
}

/// Largest possible gain on a ring (0-based sites): 0 for antipodal sites, 1/2
/// otherwise.
pub fn circle_max_enaqt(sites: usize, trap: usize, init: usize) -> Result<f64> {
    check_size(Topology::Ring, sites)?;
    for site in [trap, init] {
        if site >= sites {
            return Err(Error::InvalidSite { index: site, sites });
        }
    }
    if trap == init {
        return Err(Error::CoincidentSites { site: init });
    }
    Ok(if is_opposite(Topology::Ring, sites, trap, init) {
        0.0
    } else {
        0.5
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amplitude_basics() {
        for l in 1..=4 {
            for m in 1..=4 {
                let a = chain_amplitude(4, l, m, 0.0).unwrap();
                assert!((a - Complex64::new(delta(l, m), 0.0)).norm() < 1e-14);
            }
        }
        for &t in &[0.3, 1.7, 12.0] {
            let a = chain_amplitude(2, 1, 1, t).unwrap();
            assert!((a.norm_sqr() - t.cos().powi(2)).abs() < 1e-14);
            let total: f64 = (1..=7)
                .map(|l| chain_amplitude(7, l, 3, t).unwrap().norm_sqr())
                .sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
        assert!(chain_amplitude(3, 0, 1, 1.0).is_err());
        assert!(chain_amplitude(3, 4, 1, 1.0).is_err());
    }

    #[test]
    fn average_population_examples() {
        let p = |top, n, l, m| average_population(top, n, l, m).unwrap().value;
        assert!((p(Topology::Chain, 3, 2, 2) - 0.5).abs() < 1e-15);
        assert!((p(Topology::Chain, 3, 1, 3) - 0.375).abs() < 1e-15);
        assert!((p(Topology::Ring, 4, 3, 1) - 0.375).abs() < 1e-15);
        assert!((p(Topology::Ring, 4, 2, 1) - 0.125).abs() < 1e-15);
        assert!((p(Topology::Ring, 4, 1, 3) - 0.375).abs() < 1e-15);
        assert!(average_population(Topology::SemiInfinite, 4, 1, 1).is_err());
    }

    #[test]
    fn average_population_normalized() {
        for top in [Topology::Chain, Topology::Ring] {
            for n in top.min_sites()..=12 {
                for m in 1..=n {
                    let total: f64 = (1..=n)
                        .map(|l| average_population(top, n, l, m).unwrap().value)
                        .sum();
                    assert!((total - 1.0).abs() < 1e-14, "{top} n={n} m={m}");
                }
            }
        }
    }

    #[test]
    fn mirror_enhancement() {
        for n in 3..=12usize {
            for m in 1..=n {
                if 2 * m == n + 1 {
                    continue;
                }
                let v = average_population(Topology::Chain, n, n + 1 - m, m)
                    .unwrap()
                    .value;
                assert!(v > 1.0 / n as f64);
            }
        }
    }

    #[test]
    fn estimates() {
        assert!((dephased_efficiency_estimate(3, 1e-3, 1e-3) - 0.25).abs() < 1e-15);
        let xi = enaqt_estimate(Topology::Chain, 3, 1e-3, 1e-3, 0, 1).unwrap();
        assert!((xi - 0.05).abs() < 1e-15);
        assert_eq!(
            enaqt_estimate(Topology::Chain, 5, 1.0, 1.0, 1, 3).unwrap(),
            0.0
        );
        assert_eq!(
            enaqt_estimate(Topology::Ring, 6, 1.0, 1.0, 1, 4).unwrap(),
            0.0
        );
        for n in 3..=10 {
            for r in [1e-3, 0.1, 1.0, 10.0, 1e3] {
                assert!(enaqt_estimate(Topology::Chain, n, 1.0, r, 0, 1).unwrap() > 0.0);
            }
        }
        assert!(enaqt_estimate(Topology::Chain, 3, 1.0, 1.0, 1, 1).is_err());
    }

    #[test]
    fn circle_dichotomy() {
        assert_eq!(circle_max_enaqt(4, 0, 2).unwrap(), 0.0);
        assert_eq!(circle_max_enaqt(4, 0, 1).unwrap(), 0.5);
        assert_eq!(circle_max_enaqt(4, 3, 1).unwrap(), 0.0);
        for d in 1..5 {
            assert_eq!(circle_max_enaqt(5, 0, d).unwrap(), 0.5);
        }
    }
}
