//! Gamma and Bessel functions of the first kind for real order.
//!
//! `J_α(t)` is summed from its power series for small arguments. Above
//! [`SERIES_CROSSOVER`] the Steed/Barnett continued-fraction method is used
//! (CF1 for `J'/J`, CF2 for `p + iq`, Wronskian normalisation), which is
//! stable for all real orders and arguments up to a few thousand. Negative
//! orders in `[-1/2, 0)` are reflected through `Y_ν`.

use std::f64::consts::PI;

use crate::error::{DunklError, Result};

/// Arguments strictly below this value use the power series.
pub const SERIES_CROSSOVER: f64 = 10.0;

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const MAXIT: usize = 100_000;

/// Γ(x) for x > 0.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(DunklError::domain("gamma_fn", format!("argument {x} must be positive")));
    }
    Ok(statrs::function::gamma::gamma(x))
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(DunklError::domain("ln_gamma", format!("argument {x} must be positive")));
    }
    Ok(statrs::function::gamma::ln_gamma(x))
}

fn check_order(op: &'static str, alpha: f64, t: f64) -> Result<()> {
    if !(alpha >= -0.5) || !alpha.is_finite() {
        return Err(DunklError::domain(op, format!("order {alpha} below -1/2")));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(DunklError::domain(op, format!("argument {t} must be nonnegative")));
    }
    Ok(())
}

/// Bessel function of the first kind `J_α(t)`, `α ≥ -1/2`, `t ≥ 0`.
pub fn bessel_j(alpha: f64, t: f64) -> Result<f64> {
    check_order("bessel_j", alpha, t)?;
    if t == 0.0 {
        return Ok(if alpha == 0.0 {
            1.0
        } else if alpha > 0.0 {
            0.0
        } else {
            f64::INFINITY
        });
    }
    if t < SERIES_CROSSOVER {
        Ok(normalized_series(alpha, t) * t.powf(alpha))
    } else {
        Ok(j_large(alpha, t))
    }
}

/// `J_α(t) / t^α` with the power cancelled analytically; equals
/// `1 / (2^α Γ(α+1))` at the origin.
pub fn normalized_bessel(alpha: f64, t: f64) -> Result<f64> {
    check_order("normalized_bessel", alpha, t)?;
    if t < SERIES_CROSSOVER {
        Ok(normalized_series(alpha, t))
    } else {
        Ok(j_large(alpha, t) / t.powf(alpha))
    }
}

/// Modified counterpart `I_α(t) / t^α` by its (cancellation free) series.
/// Used for real-argument kernels; overflows past `t ≈ 700`.
pub fn normalized_bessel_i(alpha: f64, t: f64) -> Result<f64> {
    check_order("normalized_bessel_i", alpha, t)?;
    let q = 0.25 * t * t;
    let mut term = 1.0 / statrs::function::gamma::gamma(alpha + 1.0);
    let mut sum = term;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= q / (n * (n + alpha));
        sum += term;
        if term < EPS * sum && n > 0.5 * t {
            break;
        }
    }
    Ok(sum * 2f64.powf(-alpha))
}

/// Power series of `J_α(t)/t^α`.
pub(crate) fn normalized_series(alpha: f64, t: f64) -> f64 {
    let q = 0.25 * t * t;
    let mut term = 1.0 / statrs::function::gamma::gamma(alpha + 1.0);
    let mut sum = term;
    let mut n = 0.0;
    while n < 1000.0 {
        n += 1.0;
        term *= -q / (n * (n + alpha));
        sum += term;
        if term.abs() < EPS * sum.abs().max(FPMIN) && n > 0.5 * t {
            break;
        }
    }
    sum * 2f64.powf(-alpha)
}

/// Past this argument (and twice the squared order) the Hankel asymptotic
/// expansion is used.
const ASYMPTOTIC_FROM: f64 = 60.0;

/// `J_α(t) = √(2/πt) (P cos χ − Q sin χ)`, `χ = t − (α/2 + 1/4)π`, summed
/// until the terms stop decreasing.
fn j_asymptotic(alpha: f64, t: f64) -> f64 {
    let mu = 4.0 * alpha * alpha;
    let (mut p, mut q) = (0.0, 0.0);
    let mut term = 1.0;
    let mut prev = f64::INFINITY;
    for k in 0..60 {
        if k > 0 {
            let j = (2 * k - 1) as f64;
            term *= (mu - j * j) / (k as f64 * 8.0 * t);
        }
        if term.abs() > prev || term == 0.0 {
            break;
        }
        prev = term.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if term.abs() < EPS * p.abs() {
            break;
        }
    }
    let chi = t - (0.5 * alpha + 0.25) * PI;
    (2.0 / (PI * t)).sqrt() * (p * chi.cos() - q * chi.sin())
}

fn j_large(alpha: f64, t: f64) -> f64 {
    if t >= ASYMPTOTIC_FROM.max(2.0 * alpha * alpha) {
        return j_asymptotic(alpha, t);
    }
    if alpha >= 0.0 {
        steed_jy(alpha, t).0
    } else {
        let mu = -alpha;
        let (j, y) = steed_jy(mu, t);
        (mu * PI).cos() * j - (mu * PI).sin() * y
    }
}

/// Steed's method for `(J_ν(x), Y_ν(x))`, `ν ≥ 0`, `x ≥ 2`.
fn steed_jy(nu: f64, x: f64) -> (f64, f64) {
    debug_assert!(nu >= 0.0 && x >= 2.0);
    let nl = ((nu - x + 1.5).floor()).max(0.0) as usize;
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    // CF1: J'_ν / J_ν by modified Lentz.
    let mut isign = 1.0;
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    for _ in 0..MAXIT {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < EPS {
            break;
        }
    }

    // Downward recurrence to order μ = ν - nl.
    let mut rjl = isign * FPMIN;
    let mut rjpl = h * rjl;
    let rjl1 = rjl;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    // CF2: p + iq by complex Lentz.
    let mut a = 0.25 - xmu2;
    let mut p = -0.5 * xi;
    let mut q = 1.0;
    let br = 2.0 * x;
    let mut bi = 2.0;
    let mut fact = a * xi / (p * p + q * q);
    let mut cr = br + q * fact;
    let mut ci = bi + p * fact;
    let mut den = br * br + bi * bi;
    let mut dr = br / den;
    let mut di = -bi / den;
    let mut dlr = cr * dr - ci * di;
    let mut dli = cr * di + ci * dr;
    let mut temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    for i in 2..MAXIT {
        a += 2.0 * (i as f64 - 1.0);
        bi += 2.0;
        dr = a * dr + br;
        di = a * di + bi;
        if dr.abs() + di.abs() < FPMIN {
            dr = FPMIN;
        }
        fact = a / (cr * cr + ci * ci);
        cr = br + cr * fact;
        ci = bi - ci * fact;
        if cr.abs() + ci.abs() < FPMIN {
            cr = FPMIN;
        }
        den = dr * dr + di * di;
        dr /= den;
        di /= -den;
        dlr = cr * dr - ci * di;
        dli = cr * di + ci * dr;
        temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        if (dlr - 1.0).abs() + dli.abs() < EPS {
            break;
        }
    }
    let gam = (p - f) / q;
    let rjmu = (w / ((p - f) * gam + q)).sqrt().copysign(rjl);
    let rymu = rjmu * gam;
    let rymup = rymu * (p + q / gam);
    let mut ry1 = xmu * xi * rymu - rymup;

    let scale = rjmu / rjl;
    let rj = rjl1 * scale;
    let mut ry = rymu;
    for i in 1..=nl {
        let rytemp = (xmu + i as f64) * xi2 * ry1 - ry;
        ry = ry1;
        ry1 = rytemp;
    }
    (rj, ry)
}
