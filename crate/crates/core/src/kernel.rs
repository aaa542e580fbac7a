//! The Dunkl kernel for Z₂^d, the intertwining operator as a tensor
//! Gauss-Jacobi quadrature, and the Dunkl operators.

use std::ops::{Add, Mul};

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{check_dim, DunklError, Result};
use crate::multiplicity::Multiplicity;
use crate::quadrature::JacobiRule;
use crate::special::{gamma_fn, normalized_bessel, normalized_bessel_i};

fn prefactor(kappa: f64) -> f64 {
    gamma_fn(kappa + 0.5).expect("κ ≥ 0") * 2f64.powf(kappa - 0.5)
}

/// `E(x, −iy)` for Z₂ with multiplicity κ:
/// `Γ(κ+½)2^{κ−½}[j(κ−½, |xy|) − i·xy·j(κ+½, |xy|)]` with `j(α,t) = J_α(t)/t^α`.
pub fn kernel_1d(kappa: f64, x: f64, y: f64) -> Complex64 {
    let t = x * y;
    if t == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let c = prefactor(kappa);
    let a = t.abs();
    let even = normalized_bessel(kappa - 0.5, a).expect("order ≥ −½");
    let odd = normalized_bessel(kappa + 0.5, a).expect("order ≥ −½");
    Complex64::new(c * even, -c * t * odd)
}

/// Real-argument kernel `E(x, y)` for Z₂, the analytic continuation of
/// [`kernel_1d`] with modified Bessel functions. Equals `e^{xy}` at κ = 0.
/// For `xy < 0` the Bessel form cancels badly, so Kummer's form
/// `e^{xy} ₁F₁(κ; 2κ+1; −2xy)` is summed instead (all terms positive).
pub fn kernel_real_1d(kappa: f64, x: f64, y: f64) -> f64 {
    let t = x * y;
    if t == 0.0 {
        return 1.0;
    }
    if t < 0.0 {
        let z = -2.0 * t;
        let (mut term, mut sum, mut n) = (1.0, 1.0, 0.0);
        loop {
            term *= (kappa + n) / (2.0 * kappa + 1.0 + n) * z / (n + 1.0);
            sum += term;
            n += 1.0;
            if term < 1e-17 * sum && n > z {
                break;
            }
        }
        return t.exp() * sum;
    }
    let c = prefactor(kappa);
    let even = normalized_bessel_i(kappa - 0.5, t).expect("order ≥ −½");
    let odd = normalized_bessel_i(kappa + 0.5, t).expect("order ≥ −½");
    c * (even + t * odd)
}

/// `E(x, −iy)` for Z₂^d as the product of one-dimensional factors.
pub fn kernel_z2d(mult: &Multiplicity, x: &[f64], y: &[f64]) -> Result<Complex64> {
    check_dim(mult.d, x.len())?;
    check_dim(mult.d, y.len())?;
    Ok(mult
        .kappa
        .iter()
        .zip(x.iter().zip(y))
        .fold(Complex64::new(1.0, 0.0), |acc, (&k, (&xi, &yi))| acc * kernel_1d(k, xi, yi)))
}

/// Real-argument kernel `E(x, y)` for Z₂^d.
pub fn kernel_real_z2d(mult: &Multiplicity, x: &[f64], y: &[f64]) -> Result<f64> {
    check_dim(mult.d, x.len())?;
    check_dim(mult.d, y.len())?;
    Ok(mult
        .kappa
        .iter()
        .zip(x.iter().zip(y))
        .map(|(&k, (&xi, &yi))| kernel_real_1d(k, xi, yi))
        .product())
}

/// `V_κ f(x) = ∫ f(x₁u₁, …, x_d u_d) ∏ Φ_{κ_i}(u_i) du` by tensor quadrature.
/// Axes with κ_i = 0 carry the atomic rule, so they contribute `f` at `u_i = 1`.
/// Generic over real and complex integrands.
pub fn intertwine_z2d<T, F>(f: F, mult: &Multiplicity, x: &[f64], rules: &[JacobiRule]) -> Result<T>
where
    T: Copy + Zero + Add<Output = T> + Mul<f64, Output = T>,
    F: Fn(&[f64]) -> T,
{
    let d = mult.d;
    check_dim(d, x.len())?;
    check_dim(d, rules.len())?;
    for (r, &k) in rules.iter().zip(&mult.kappa) {
        if r.kappa != k {
            return Err(DunklError::MultiplicityMismatch);
        }
    }
    let mut idx = vec![0usize; d];
    let mut point: Vec<f64> = (0..d).map(|i| x[i] * rules[i].nodes[0]).collect();
    let mut acc = T::zero();
    loop {
        let w: f64 = (0..d).map(|i| rules[i].weights[idx[i]]).product();
        acc = acc + f(&point) * w;
        // odometer increment
        let mut axis = 0;
        loop {
            if axis == d {
                return Ok(acc);
            }
            idx[axis] += 1;
            if idx[axis] < rules[axis].nodes.len() {
                point[axis] = x[axis] * rules[axis].nodes[idx[axis]];
                break;
            }
            idx[axis] = 0;
            point[axis] = x[axis] * rules[axis].nodes[0];
            axis += 1;
        }
    }
}

/// Order of the Φ_κ rules that makes [`intertwine_z2d`] stable: starting
/// from `start`, doubles until two successive orders agree to `tol`
/// (relative), capped at `max_order`.
pub fn converged_order<F>(f: F, mult: &Multiplicity, x: &[f64], start: usize, tol: f64, max_order: usize) -> Result<usize>
where
    F: Fn(&[f64]) -> f64,
{
    let mut order = start.max(1);
    let mut prev = intertwine_z2d(&f, mult, x, &JacobiRule::for_multiplicity(mult, order)?)?;
    while order < max_order {
        let next_order = (2 * order).min(max_order);
        let next = intertwine_z2d(&f, mult, x, &JacobiRule::for_multiplicity(mult, next_order)?)?;
        if (next - prev).abs() <= tol * next.abs().max(1e-300) {
            return Ok(order);
        }
        prev = next;
        order = next_order;
    }
    Ok(order)
}

/// Below this |x_i| the reflection quotient is replaced by its limit.
const REFLECTION_TOL: f64 = 1e-5;

fn partial<F: Fn(&[f64]) -> f64>(f: &F, i: usize, x: &[f64]) -> f64 {
    // five-point stencil, step balancing O(h⁴) truncation against roundoff
    let h = f64::EPSILON.powf(0.2) * x[i].abs().max(1.0);
    let mut p = x.to_vec();
    let mut at = |s: f64| {
        p[i] = x[i] + s * h;
        f(&p)
    };
    let (m2, m1, p1, p2) = (at(-2.0), at(-1.0), at(1.0), at(2.0));
    (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h)
}

/// `𝒟_i f(x) = ∂_i f(x) + κ_i (f(x) − f(σ_i x)) / x_i`.
pub fn dunkl_derivative_z2d<F: Fn(&[f64]) -> f64>(f: F, mult: &Multiplicity, i: usize, x: &[f64]) -> Result<f64> {
    check_dim(mult.d, x.len())?;
    if i >= mult.d {
        return Err(DunklError::domain("dunkl_derivative_z2d", format!("axis {i} out of range")));
    }
    let d_i = partial(&f, i, x);
    let k = mult.kappa[i];
    if k == 0.0 {
        return Ok(d_i);
    }
    let diff = if x[i].abs() < REFLECTION_TOL {
        // (f(x) − f(σx))/x_i → 2 ∂_i f_odd, and ∂_i f_odd = ∂_i f at x_i = 0
        let odd = |p: &[f64]| {
            let mut q = p.to_vec();
            q[i] = -p[i];
            0.5 * (f(p) - f(&q))
        };
        2.0 * partial(&odd, i, x)
    } else {
        let mut xr = x.to_vec();
        xr[i] = -x[i];
        (f(x) - f(&xr)) / x[i]
    };
    Ok(d_i + k * diff)
}

/// `Δ_h f = Σ_i 𝒟_i² f`, composing [`dunkl_derivative_z2d`] with itself.
pub fn dunkl_laplacian_z2d<F: Fn(&[f64]) -> f64>(f: F, mult: &Multiplicity, x: &[f64]) -> Result<f64> {
    check_dim(mult.d, x.len())?;
    let mut total = 0.0;
    for i in 0..mult.d {
        let inner = |p: &[f64]| dunkl_derivative_z2d(&f, mult, i, p).expect("dimension checked");
        total += dunkl_derivative_z2d(inner, mult, i, x)?;
    }
    Ok(total)
}
