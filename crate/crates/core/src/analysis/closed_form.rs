//! Exact rational efficiency of the three-site chain with the trap on an end
//! site and the particle starting in the middle.

use crate::error::{Error, Result};
use crate::model::spec::check_rate;

/// Efficiency `(a2 g^2 + a1 g + a0) / (b3 g^3 + b2 g^2 + b1 g + b0)` for the
/// three-site chain, trap on site 0, start on site 1, unit coupling.
pub fn eta3_closed_form(gamma: f64, kappa: f64, mu: f64) -> Result<f64> {
    check_rate("gamma", gamma)?;
    check_rate("kappa", kappa)?;
    check_rate("mu", mu)?;
    let (g, k, m) = (gamma, kappa, mu);
    let (m2, m3, m4, m5) = (m * m, m.powi(3), m.powi(4), m.powi(5));
    let (k2, k3) = (k * k, k.powi(3));

    let a2 = 4.0 * k * m;
    let a1 = k * (2.0 + 2.0 * k * m + 8.0 * m2);
    let a0 = k * (2.0 * k * m2 + k + 4.0 * m3 + 2.0 * m);

    let b3 = 8.0 * m2 * (k + m);
    let b2 = 4.0 * m * (2.0 * k2 * m + k * (8.0 * m2 + 3.0) + 6.0 * m3 + 4.0 * m);
    let b1 = 2.0 * k3 * m2
        + 2.0 * k2 * m * (9.0 * m2 + 5.0)
        + 2.0 * k * (20.0 * m4 + 20.0 * m2 + 1.0)
        + 6.0 * (4.0 * m5 + 6.0 * m3 + m);
    let b0 = 2.0 * k3 * (m3 + m)
        + k2 * (10.0 * m4 + 13.0 * m2 + 1.0)
        + k * m * (16.0 * m4 + 29.0 * m2 + 6.0)
        + 4.0 * m2 * (2.0 * m4 + 5.0 * m2 + 2.0);

    let num = (a2 * g + a1) * g + a0;
    let den = ((b3 * g + b2) * g + b1) * g + b0;
    if den == 0.0 {
        return Err(Error::DegenerateInput(
            "three-site efficiency is undefined without trapping or loss",
        ));
    }
    Ok(num / den)
}

/// Polynomial whose sign decides whether the three-site efficiency can grow
/// with dephasing. The slope of the efficiency at zero dephasing is
/// `-2 kappa mu P / beta0^2`, so dephasing helps exactly where `P < 0`.
pub fn no_enaqt_polynomial(kappa: f64, mu: f64) -> f64 {
    let (k, m) = (kappa, mu);
    let (k2, k3, k4) = (k * k, k.powi(3), k.powi(4));
    -k4 * m + 4.0 * k3 * m.powi(4) - 2.0 * k3 * m * m
        + 2.0 * k3
        + k2 * (20.0 * m.powi(4) + 7.0 * m * m + 9.0) * m
        + 32.0 * k * m.powi(6)
        + 16.0 * k * m.powi(4)
        + 7.0 * k * m * m
        - k
        + 16.0 * m.powi(7)
        + 8.0 * m.powi(5)
        - 4.0 * m.powi(3)
        - 2.0 * m
}

/// True when no dephasing rate improves on coherent transport in the
/// three-site geometry of [`eta3_closed_form`], i.e. where the polynomial is
/// non-negative.
pub fn no_enaqt_region(kappa: f64, mu: f64) -> bool {
    no_enaqt_polynomial(kappa, mu) >= 0.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_rates() {
        assert!((eta3_closed_form(1.0, 1.0, 1.0).unwrap() - 25.0 / 401.0).abs() < 1e-15);
    }

    #[test]
    fn zero_dephasing_value() {
        assert!((eta3_closed_form(0.0, 0.1, 0.01).unwrap() - 0.712_90).abs() < 1e-5);
    }

    #[test]
    fn degenerate_and_invalid() {
        assert!(matches!(
            eta3_closed_form(0.0, 0.0, 0.0),
            Err(Error::DegenerateInput(_))
        ));
        assert!(eta3_closed_form(-1.0, 0.1, 0.1).is_err());
        assert_eq!(eta3_closed_form(3.0, 0.0, 0.2).unwrap(), 0.0);
    }

    #[test]
    fn region_examples() {
        assert!(no_enaqt_region(1.0, 1.0));
        assert!(no_enaqt_region(10.0, 0.1));
        assert!(!no_enaqt_region(0.1, 0.01));
        // Weak gain, but a gain: the slope at zero dephasing is positive.
        assert!(!no_enaqt_region(1e-3, 0.1));
    }

    #[test]
    fn polynomial_is_the_slope_at_zero_dephasing() {
        for &(k, m) in &[
            (1e-3, 0.1),
            (0.1, 0.01),
            (1.0, 1.0),
            (3.0, 0.02),
            (0.05, 2.0),
        ] {
            let h = 1e-6;
            let slope =
                (eta3_closed_form(h, k, m).unwrap() - eta3_closed_form(0.0, k, m).unwrap()) / h;
            let p = no_enaqt_polynomial(k, m);
            assert_eq!(slope > 0.0, p < 0.0, "kappa={k} mu={m} slope={slope} p={p}");
        }
    }
}
