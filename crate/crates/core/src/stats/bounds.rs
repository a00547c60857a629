//! Closed-form bound calculators.
//!
//! All functions are pure formula evaluations. Where the underlying theory
//! leaves constants unspecified, the calculator takes the constant as an
//! explicit parameter (pass 1.0 for an order-of-magnitude envelope);
//! experiment reports fit constants empirically and assert growth rates
//! only, never fabricated absolute values.

use crate::error::{Error, Result};

fn check_alpha(what: &'static str, alpha: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::Domain {
            what,
            reason: format!("needs 0 <= alpha < 1, got {alpha}"),
        });
    }
    Ok(())
}

/// `‖f‖_∞ · n · exp(−(1−α)·t/n)`: how far a chain run for `t` steps can
/// still be from stationarity in expectation of a bounded statistic.
pub fn bound_mixing_error(f_inf: f64, n: f64, alpha: f64, t: f64) -> Result<f64> {
    check_alpha("bound_mixing_error", alpha)?;
    if n <= 0.0 || t < 0.0 || f_inf < 0.0 {
        return Err(Error::Domain {
            what: "bound_mixing_error",
            reason: format!("needs n > 0, t >= 0, f_inf >= 0; got n={n}, t={t}, f_inf={f_inf}"),
        });
    }
    Ok(f_inf * n * (-(1.0 - alpha) * t / n).exp())
}

/// Asynchronous-estimation bias bound `K·(C(τ,α,d)·ln^d n + 1)` for a
/// function that is `K`-Lipschitz in the d-th power of the Hamming
/// distance. The moment-constant model is `C(τ,α,d) = c·τ·α/(1−α)`, which
/// reproduces the explicit d = 1 constant when `c = 1`.
pub fn bound_lipschitz_bias(
    k: f64,
    d: u32,
    tau: f64,
    alpha: f64,
    n: f64,
    constant: f64,
) -> Result<f64> {
    check_alpha("bound_lipschitz_bias", alpha)?;
    if k < 0.0 || tau < 0.0 || n <= 1.0 || d == 0 || constant < 0.0 {
        return Err(Error::Domain {
            what: "bound_lipschitz_bias",
            reason: format!(
                "needs k >= 0, tau >= 0, n > 1, d >= 1, constant >= 0; got k={k}, tau={tau}, n={n}, d={d}"
            ),
        });
    }
    let moment_term = constant * tau * alpha / (1.0 - alpha) * n.ln().powi(d as i32);
    Ok(k * (moment_term + 1.0))
}

/// Concentration tail `2·exp(−(1−α)·t^{2/d} / (c·‖a‖_∞^{2/d}·n))` for a
/// degree-d polynomial of the model.
pub fn bound_concentration_tail(
    a_inf: f64,
    d: u32,
    alpha: f64,
    n: f64,
    t: f64,
    constant: f64,
) -> Result<f64> {
    check_alpha("bound_concentration_tail", alpha)?;
    if a_inf <= 0.0 || n <= 0.0 || t < 0.0 || d == 0 || constant <= 0.0 {
        return Err(Error::Domain {
            what: "bound_concentration_tail",
            reason: format!(
                "needs a_inf > 0, n > 0, t >= 0, d >= 1, constant > 0; got a_inf={a_inf}, n={n}, t={t}, d={d}"
            ),
        });
    }
    let exponent = (1.0 - alpha) * t.powf(2.0 / f64::from(d))
        / (constant * a_inf.powf(2.0 / f64::from(d)) * n);
    Ok(2.0 * (-exponent).exp())
}

/// Expectation-magnitude bound `‖a‖_∞ · 2·(4·n·d·ln n / (1−α))^{d/2}` for a
/// degree-d polynomial. The coefficient normalization enters as an explicit
/// `a_inf` factor.
pub fn bound_marginals(a_inf: f64, n: f64, d: u32, alpha: f64) -> Result<f64> {
    check_alpha("bound_marginals", alpha)?;
    if a_inf < 0.0 || n <= 1.0 || d == 0 {
        return Err(Error::Domain {
            what: "bound_marginals",
            reason: format!("needs a_inf >= 0, n > 1, d >= 1; got a_inf={a_inf}, n={n}, d={d}"),
        });
    }
    let base = 4.0 * n * f64::from(d) * n.ln() / (1.0 - alpha);
    Ok(a_inf * 2.0 * base.powf(f64::from(d) / 2.0))
}

/// Asynchronous bias bound for degree-d polynomials. For d = 2 the explicit
/// shape `c·‖a‖_∞·(τ·α·ln n/(1−α)^{3/2})·(n·ln n)^{1/2}` is used; general d
/// falls back to the envelope `c·‖a‖_∞·(n·ln n)^{(d−1)/2}`.
pub fn bound_bias_degree_d(
    a_inf: f64,
    d: u32,
    tau: f64,
    alpha: f64,
    n: f64,
    constant: f64,
) -> Result<f64> {
    check_alpha("bound_bias_degree_d", alpha)?;
    if a_inf < 0.0 || tau < 0.0 || n <= 1.0 || d == 0 || constant < 0.0 {
        return Err(Error::Domain {
            what: "bound_bias_degree_d",
            reason: format!(
                "needs a_inf >= 0, tau >= 0, n > 1, d >= 1, constant >= 0; got a_inf={a_inf}, tau={tau}, n={n}, d={d}"
            ),
        });
    }
    if d == 2 {
        let log_n = n.ln();
        Ok(constant * a_inf * tau * alpha * log_n / (1.0 - alpha).powf(1.5) * (n * log_n).sqrt())
    } else {
        Ok(constant * a_inf * (n * n.ln()).powf(f64::from(d - 1) / 2.0))
    }
}
