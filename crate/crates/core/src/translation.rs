//! Generalised translation τ_y by four routes: the explicit Z₂^d product
//! formula, the radial formula through V_κ, the spectral definition, and
//! closed forms (heat kernel, low-degree monomials).

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{check_dim, DunklError, Result};
use crate::grid::{norm, GridFunction, GridSpec, Profile, RadialProfile};
use crate::kernel::{intertwine_z2d, kernel_1d, kernel_real_1d};
use crate::multiplicity::Multiplicity;
use crate::quadrature::JacobiRule;
use crate::transform::{dunkl_transform_grid, inverse_dunkl_transform, lp_norm, DECAY_TOL};

/// Below this multiple of `|s|+|t|` the odd quotient `f_o(r)/r` is
/// replaced by a symmetric difference at a fixed small offset.
const SMALL_RADIUS: f64 = 1e-7;

/// One axis of the explicit formula, written through the even and odd parts
/// of f so that the integrand is smooth in u:
/// `τ_s f(t) = ∫ [f_e(√R) + (t−s) f_o(√R)/√R] Φ_κ(u) du`, `R = t²+s²−2stu`.
fn axis_translate<G: FnMut(f64) -> f64>(rule: &JacobiRule, s: f64, t: f64, mut g: G) -> f64 {
    if s == 0.0 {
        return g(t);
    }
    if rule.is_atomic() {
        return g(t - s);
    }
    let scale = s.abs() + t.abs();
    let mut acc = 0.0;
    for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
        let rad = (t * t + s * s - 2.0 * s * t * u).max(0.0);
        let r = rad.sqrt();
        let (a, b) = (g(r), g(-r));
        let even = 0.5 * (a + b);
        let odd_quotient = if r > SMALL_RADIUS * scale {
            0.5 * (a - b) / r
        } else {
            let h = 1e-5 * scale;
            0.5 * (g(h) - g(-h)) / h
        };
        acc += w * (even + (t - s) * odd_quotient);
    }
    acc
}

/// `τ_s f(t)` for Z₂ by Gauss-Jacobi quadrature of the explicit formula.
pub fn translate_1d<F: Fn(f64) -> f64>(kappa: f64, f: F, s: f64, t: f64, rule: &JacobiRule) -> Result<f64> {
    if rule.kappa != kappa {
        return Err(DunklError::MultiplicityMismatch);
    }
    Ok(axis_translate(rule, s, t, f))
}

fn nested(f: &dyn Fn(&[f64]) -> f64, rules: &[JacobiRule], y: &[f64], point: &mut Vec<f64>, axis: usize) -> f64 {
    if axis == rules.len() {
        return f(point);
    }
    let t = point[axis];
    let v = axis_translate(&rules[axis], y[axis], t, |z| {
        point[axis] = z;
        nested(f, rules, y, point, axis + 1)
    });
    point[axis] = t;
    v
}

fn check_rules(mult: &Multiplicity, rules: &[JacobiRule]) -> Result<()> {
    check_dim(mult.d, rules.len())?;
    if rules.iter().zip(&mult.kappa).any(|(r, &k)| r.kappa != k) {
        return Err(DunklError::MultiplicityMismatch);
    }
    Ok(())
}

/// `τ_y f(x) = τ_{y_1} ⋯ τ_{y_d} f(x)`, one explicit axis at a time.
/// Costs `(2·order)^{#active axes}` evaluations of f.
pub fn translate_z2d<F: Fn(&[f64]) -> f64>(mult: &Multiplicity, f: F, y: &[f64], x: &[f64], rules: &[JacobiRule]) -> Result<f64> {
    check_dim(mult.d, y.len())?;
    check_dim(mult.d, x.len())?;
    check_rules(mult, rules)?;
    let mut point = x.to_vec();
    Ok(nested(&f, rules, y, &mut point, 0))
}

/// [`translate_z2d`] at every node of a grid.
pub fn translate_grid<F: Fn(&[f64]) -> f64 + Sync>(
    mult: &Multiplicity,
    f: F,
    y: &[f64],
    spec: GridSpec,
    rules: &[JacobiRule],
) -> Result<GridFunction> {
    check_dim(mult.d, y.len())?;
    check_rules(mult, rules)?;
    let template = GridFunction::from_fn(mult, spec, |_| 0.0)?;
    let points = template.points();
    let values: Vec<Complex64> = points
        .par_iter()
        .map(|x| {
            let mut p = x.clone();
            Complex64::new(nested(&f, rules, y, &mut p, 0), 0.0)
        })
        .collect();
    template.with_values(values)
}

/// Radial route: `τ_y f(x) = V_κ[ξ ↦ f₀(√(|x|²+|y|²−2⟨x,ξ⟩))](y)`.
///
/// Written with independent `t_i ~ Φ_{κ_i}` as `E f₀(√(|x|²+|y|²−2Σx_iy_it_i))`,
/// which needs no case split when x or y vanish.
pub fn translate_radial(mult: &Multiplicity, p: &RadialProfile, y: &[f64], x: &[f64], rules: &[JacobiRule]) -> Result<f64> {
    check_dim(mult.d, y.len())?;
    check_dim(mult.d, x.len())?;
    check_rules(mult, rules)?;
    let base: f64 = x.iter().chain(y).map(|v| v * v).sum();
    let g = |xi: &[f64]| {
        let dot: f64 = x.iter().zip(xi).map(|(a, b)| a * b).sum();
        p.eval((base - 2.0 * dot).max(0.0).sqrt())
    };
    intertwine_z2d(g, mult, y, rules)
}

/// Spectral route from a precomputed transform:
/// `τ_y f(x) = c_h ∫ f̂(ξ) E(ix, ξ) E(−iy, ξ) h²(ξ) dξ`.
pub fn translate_spectral_from_hat(fhat: &GridFunction, y: &[f64], targets: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    check_dim(fhat.dim(), y.len())?;
    let mult = &fhat.mult;
    let nodes = fhat.node_sets();
    let factors: Vec<Vec<Complex64>> = (0..mult.d)
        .map(|i| nodes[i].iter().map(|&xi| kernel_1d(mult.kappa[i], y[i], xi)).collect())
        .collect();
    let shape = fhat.shape();
    let st = crate::grid::strides(&shape);
    let values: Vec<Complex64> = fhat
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let mut e = *v;
            for i in 0..mult.d {
                e *= factors[i][(k / st[i]) % shape[i]];
            }
            e
        })
        .collect();
    inverse_dunkl_transform(&fhat.with_values(values)?, targets)
}

/// Spectral route: transforms f onto its own grid, then applies
/// [`translate_spectral_from_hat`].
pub fn translate_spectral(f: &GridFunction, y: &[f64], targets: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    let fhat = dunkl_transform_grid(f, f.spec)?;
    fhat.warn_if_not_decayed("translate_spectral", DECAY_TOL);
    translate_spectral_from_hat(&fhat, y, targets)
}

/// `τ_y` of `e^{−t|·|²}` at x in closed form, `e^{−t(|x|²+|y|²)} E(2tx, y)`,
/// evaluated axis by axis to keep the factors bounded.
pub fn translate_heat_closed(mult: &Multiplicity, t: f64, x: &[f64], y: &[f64]) -> Result<f64> {
    if !(t > 0.0) {
        return Err(DunklError::domain("translate_heat_closed", format!("t = {t} must be positive")));
    }
    check_dim(mult.d, x.len())?;
    check_dim(mult.d, y.len())?;
    Ok((0..mult.d)
        .map(|i| (-t * (x[i] * x[i] + y[i] * y[i])).exp() * kernel_real_1d(mult.kappa[i], 2.0 * t * x[i], y[i]))
        .product())
}

/// Exact rational numbers from small integers.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `V_κ x_j = (x_j + κ Σ_i x_i)/(dκ + 1)` for the symmetric group S_d.
pub fn intertwine_linear_sd(kappa: &BigRational, x: &[BigRational], j: usize) -> BigRational {
    let d = BigRational::from_integer(BigInt::from(x.len()));
    let sum: BigRational = x.iter().cloned().sum();
    (&x[j] + kappa * sum) / (d * kappa + BigRational::one())
}

/// Degree-one translation, valid for every reflection group.
pub fn translate_linear(x: &[BigRational], y: &[BigRational], j: usize) -> BigRational {
    &x[j] - &y[j]
}

/// `τ_y{x_j x_k}(x)` for S_d in exact arithmetic:
/// `(x_j−y_j)(x_k−y_k) + 2Σ_v κ (v_j v_k/|v|²)[V⟨·,y⟩(x) − V⟨·,y⟩(xσ_v)]`
/// over the positive roots `v = e_a − e_b`.
pub fn translate_monomial_sd(d: usize, kappa: &BigRational, x: &[BigRational], y: &[BigRational], j: usize, k: usize) -> Result<BigRational> {
    check_dim(d, x.len())?;
    check_dim(d, y.len())?;
    if j >= d || k >= d {
        return Err(DunklError::domain("translate_monomial_sd", "axis out of range"));
    }
    if kappa < &BigRational::zero() {
        return Err(DunklError::domain("translate_monomial_sd", "negative kappa"));
    }
    let v_dot_y = |p: &[BigRational]| -> BigRational { (0..d).map(|i| &y[i] * intertwine_linear_sd(kappa, p, i)).sum() };
    let base = (&x[j] - &y[j]) * (&x[k] - &y[k]);
    let vx = v_dot_y(x);
    let mut corr = BigRational::zero();
    for a in 0..d {
        for b in (a + 1)..d {
            // v = e_a − e_b, |v|² = 2
            let vj = coord(a, b, j);
            let vk = coord(a, b, k);
            if vj * vk == 0 {
                continue;
            }
            let mut xs = x.to_vec();
            xs.swap(a, b);
            corr += rat(vj * vk, 2) * (&vx - v_dot_y(&xs));
        }
    }
    Ok(base + BigRational::from_integer(BigInt::from(2)) * kappa * corr)
}

fn coord(a: usize, b: usize, i: usize) -> i64 {
    if i == a {
        1
    } else if i == b {
        -1
    } else {
        0
    }
}

/// `τ_y{x_j x_k}(x)` for Z₂^d in exact arithmetic: `(x_j−y_j)² + 4κ_j x_j y_j/(2κ_j+1)`
/// when j = k, and `(x_j−y_j)(x_k−y_k)` otherwise.
pub fn translate_monomial_z2d(kappa: &[BigRational], x: &[BigRational], y: &[BigRational], j: usize, k: usize) -> Result<BigRational> {
    check_dim(kappa.len(), x.len())?;
    check_dim(kappa.len(), y.len())?;
    if j >= kappa.len() || k >= kappa.len() {
        return Err(DunklError::domain("translate_monomial_z2d", "axis out of range"));
    }
    let base = (&x[j] - &y[j]) * (&x[k] - &y[k]);
    if j != k {
        return Ok(base);
    }
    let kj = &kappa[j];
    let two = BigRational::from_integer(BigInt::from(2));
    Ok(base + &two * &two * kj * &x[j] * &y[j] / (&two * kj + BigRational::one()))
}

/// `‖τ_y f − f‖_{κ,p}` on the grid for each y, through the explicit route.
pub fn translation_continuity<F: Fn(&[f64]) -> f64 + Sync>(
    mult: &Multiplicity,
    f: F,
    spec: GridSpec,
    ys: &[Vec<f64>],
    p: f64,
    rules: &[JacobiRule],
) -> Result<Vec<f64>> {
    let base = GridFunction::from_fn(mult, spec, &f)?;
    ys.iter()
        .map(|y| {
            let ty = translate_grid(mult, &f, y, spec, rules)?;
            lp_norm(&ty.sub(&base)?, p)
        })
        .collect()
}

/// A radial profile as a function on ℝ^d.
pub fn radial_fn(f0: Profile) -> impl Fn(&[f64]) -> f64 + Send + Sync + Clone {
    move |x: &[f64]| f0(norm(x))
}
