//! Heat, Poisson and Bochner-Riesz summability, spherical means and
//! approximate-identity experiments.

use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, DunklError, Result};
use crate::grid::{norm, GridFunction, GridSpec, Profile, RadialProfile};
use crate::multiplicity::Multiplicity;
use crate::quadrature::{gauss_jacobi, JacobiRule, SphereRule};
use crate::special::{gamma_fn, normalized_bessel};
use crate::transform::{
    dunkl_transform_grid, dunkl_transform_nodes, inverse_dunkl_transform, inverse_dunkl_transform_grid, lp_norm,
    radial_dunkl_transform,
};
use crate::translation::translate_z2d;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Heat,
    Poisson,
    BochnerRiesz,
}

/// A radial summability kernel: multiplier `Φ(|ξ|)` and space profile `φ = Φ̂`.
///
/// `param` is `t` for the heat kernel, `ε` for the Poisson kernel and the
/// radius `R` for Bochner-Riesz means; `delta` is the Bochner-Riesz index.
#[derive(Clone, Debug)]
pub struct SummabilityKernel {
    pub family: Family,
    pub param: f64,
    pub delta: f64,
    pub multiplier: Multiplier,
    pub profile: RadialProfile,
}

/// Fourier-side multiplier as a function of `|ξ|`.
#[derive(Clone)]
pub struct Multiplier(pub Profile);

impl std::fmt::Debug for Multiplier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("Multiplier")
    }
}

impl Multiplier {
    pub fn at(&self, s: f64) -> f64 {
        (self.0)(s)
    }
}

fn positive(op: &'static str, name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(DunklError::domain(op, format!("{name} = {v} must be positive")))
    }
}

/// `q_t(x) = (2t)^{−N/2} e^{−|x|²/4t}` with multiplier `e^{−t|ξ|²}`.
pub fn heat_kernel(mult: &Multiplicity, t: f64) -> Result<SummabilityKernel> {
    positive("heat_kernel", "t", t)?;
    let n = mult.big_n;
    let f0: Profile = Arc::new(move |r| (2.0 * t).powf(-n / 2.0) * (-r * r / (4.0 * t)).exp());
    let width = (2.0 * t).sqrt();
    let breaks: Vec<f64> = (1..=16).map(|k| k as f64 * width).collect();
    Ok(SummabilityKernel {
        family: Family::Heat,
        param: t,
        delta: 0.0,
        multiplier: Multiplier(Arc::new(move |s| (-t * s * s).exp())),
        profile: RadialProfile::with_breaks(f0, mult, breaks, 20)?,
    })
}

/// `P_ε(x) = c_{d,κ} ε (ε²+|x|²)^{−(N+1)/2}` with multiplier `e^{−ε|ξ|}`.
///
/// The profile uses geometrically growing panels out to `ε·2^44` so that
/// the algebraic tail is integrated.
pub fn poisson_kernel(mult: &Multiplicity, eps: f64) -> Result<SummabilityKernel> {
    positive("poisson_kernel", "eps", eps)?;
    let c = mult.poisson_constant();
    let e = 0.5 * (mult.big_n + 1.0);
    let f0: Profile = Arc::new(move |r| c * eps / (eps * eps + r * r).powf(e));
    let breaks: Vec<f64> = (-2..=44).map(|k| eps * 2f64.powi(k)).collect();
    Ok(SummabilityKernel {
        family: Family::Poisson,
        param: eps,
        delta: 0.0,
        multiplier: Multiplier(Arc::new(move |s| (-eps * s).exp())),
        profile: RadialProfile::with_breaks(f0, mult, breaks, 20)?,
    })
}

/// Multiplier `(1 − |ξ|²/R²)_+^δ`; profile
/// `R^N 2^δ Γ(δ+1) J_{λ+δ+1}(R|x|)/(R|x|)^{λ+δ+1}`, sampled on `[0, 64/R]`.
pub fn bochner_riesz_kernel(mult: &Multiplicity, delta: f64, radius: f64) -> Result<SummabilityKernel> {
    if !(delta >= 0.0) {
        return Err(DunklError::domain("bochner_riesz_kernel", format!("index {delta} is negative")));
    }
    positive("bochner_riesz_kernel", "R", radius)?;
    let c = bochner_riesz_constant(delta)?;
    let order = mult.lambda_k + delta + 1.0;
    let scale = radius.powf(mult.big_n);
    let f0: Profile = Arc::new(move |r| scale * c * normalized_bessel(order, radius * r).expect("order above -1/2"));
    let breaks: Vec<f64> = (1..=64).map(|k| k as f64 / radius).collect();
    Ok(SummabilityKernel {
        family: Family::BochnerRiesz,
        param: radius,
        delta,
        multiplier: Multiplier(Arc::new(move |s| {
            let u = 1.0 - (s / radius).powi(2);
            if u > 0.0 {
                u.powf(delta)
            } else {
                0.0
            }
        })),
        profile: RadialProfile::with_breaks(f0, mult, breaks, 20)?,
    })
}

/// `2^δ Γ(δ+1)`: the factor turning `J_{λ+δ+1}(r)/r^{λ+δ+1}` into the
/// Bochner-Riesz profile for unit radius.
pub fn bochner_riesz_constant(delta: f64) -> Result<f64> {
    Ok(2f64.powf(delta) * gamma_fn(delta + 1.0)?)
}

/// Bochner-Riesz kernels are integrable exactly when `δ > (N−1)/2`.
pub fn bochner_riesz_integrable(mult: &Multiplicity, delta: f64) -> bool {
    delta > 0.5 * (mult.big_n - 1.0)
}

/// `H_λ[(1−r²)_+^δ](s)` by Gauss-Jacobi quadrature carrying both endpoint
/// singularities `(1−r)^δ` and `r^{2λ+1}` in the weight.
pub fn bochner_riesz_hankel(mult: &Multiplicity, delta: f64, s_targets: &[f64], order: usize) -> Result<Vec<f64>> {
    let lam = mult.lambda_k;
    let (u, w) = gauss_jacobi(order, delta, 2.0 * lam + 1.0)?;
    let scale = 2f64.powf(-delta - 2.0 * lam - 2.0);
    s_targets
        .iter()
        .map(|&s| {
            let mut acc = 0.0;
            for (&u, &w) in u.iter().zip(&w) {
                let r = 0.5 * (1.0 + u);
                acc += w * (1.0 + r).powf(delta) * normalized_bessel(lam, r * s)?;
            }
            Ok(acc * scale)
        })
        .collect()
}

/// `2^λ r^{−λ−δ−1} J_{λ+δ+1}(r)`, the bare Bessel form without the
/// Gamma bookkeeping.
pub fn bochner_riesz_bessel_form(mult: &Multiplicity, delta: f64, r: f64) -> Result<f64> {
    Ok(2f64.powf(mult.lambda_k) * normalized_bessel(mult.lambda_k + delta + 1.0, r)?)
}

/// Ratio between the Hankel route and the bare Bessel form, fitted over samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantFit {
    pub constant: f64,
    /// Largest relative deviation of an individual sample ratio.
    pub spread: f64,
}

pub fn fit_bochner_riesz_constant(mult: &Multiplicity, delta: f64) -> Result<ConstantFit> {
    let samples = [0.3, 1.1, 2.2, 4.1, 6.3, 9.7];
    let hankel = bochner_riesz_hankel(mult, delta, &samples, 120)?;
    let ratios: Vec<f64> = samples
        .iter()
        .zip(&hankel)
        .map(|(&r, &h)| Ok(h / bochner_riesz_bessel_form(mult, delta, r)?))
        .collect::<Result<_>>()?;
    let constant = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let spread = ratios.iter().map(|q| (q / constant - 1.0).abs()).fold(0.0, f64::max);
    Ok(ConstantFit { constant, spread })
}

/// `∫_{|x|<R} |φ| h²` of the unit-radius Bochner-Riesz profile at each R.
/// Converges with R when the kernel is integrable, grows otherwise.
pub fn bochner_riesz_l1_mass(mult: &Multiplicity, delta: f64, radii: &[f64]) -> Result<Vec<f64>> {
    let k = bochner_riesz_kernel(mult, delta, 1.0)?;
    radii
        .iter()
        .map(|&r_max| {
            let panels = (r_max / 0.5).ceil() as usize;
            let breaks: Vec<f64> = (1..=panels).map(|j| r_max * j as f64 / panels as f64).collect();
            let p = RadialProfile::with_breaks(k.profile.f0.clone(), mult, breaks, 16)?;
            Ok(p.with_f0(Arc::new({
                let f0 = k.profile.f0.clone();
                move |r| f0(r).abs()
            }))
            .integral())
        })
        .collect()
}

impl SummabilityKernel {
    /// `c_h ∫ φ h²`.
    pub fn normalization(&self) -> f64 {
        self.profile.mult.c_h * self.profile.integral()
    }

    /// Largest `|H_λ φ₀(s) − Φ(s)|` over `radii`.
    pub fn spectral_defect(&self, radii: &[f64]) -> Result<f64> {
        let d = self.profile.mult.d;
        let targets: Vec<Vec<f64>> = radii
            .iter()
            .map(|&s| {
                let mut v = vec![0.0; d];
                v[0] = s;
                v
            })
            .collect();
        let hat = radial_dunkl_transform(&self.profile, &targets)?;
        Ok(radii.iter().zip(hat).map(|(&s, h)| (h - self.multiplier.at(s)).abs()).fold(0.0, f64::max))
    }

    /// The kernel with multiplier `Φ(εξ)` and profile `φ_ε`.
    pub fn scaled(&self, eps: f64) -> Result<SummabilityKernel> {
        positive("SummabilityKernel::scaled", "eps", eps)?;
        let mult = &self.profile.mult;
        match self.family {
            Family::Heat => heat_kernel(mult, self.param * eps * eps),
            Family::Poisson => poisson_kernel(mult, self.param * eps),
            Family::BochnerRiesz => bochner_riesz_kernel(mult, self.delta, self.param / eps),
        }
    }

    /// Unit member of a family used for `T_ε`: heat at `t = ½` (the
    /// Gaussian), Poisson at `ε = 1`, Bochner-Riesz at `R = 1`.
    pub fn unit(mult: &Multiplicity, family: Family, delta: f64) -> Result<SummabilityKernel> {
        match family {
            Family::Heat => heat_kernel(mult, 0.5),
            Family::Poisson => poisson_kernel(mult, 1.0),
            Family::BochnerRiesz => bochner_riesz_kernel(mult, delta, 1.0),
        }
    }
}

/// `T_ε f = c_h ∫ f̂(ξ) Φ(ε|ξ|) E(ix, ξ) h²(ξ) dξ` on the grid of f, with the
/// transform sampled on `freq`.
pub fn summability_apply(f: &GridFunction, k: &SummabilityKernel, eps: f64, freq: GridSpec) -> Result<GridFunction> {
    positive("summability_apply", "eps", eps)?;
    if !k.profile.mult.same_as(&f.mult) {
        return Err(DunklError::MultiplicityMismatch);
    }
    let fhat = dunkl_transform_grid(f, freq)?;
    let damped = fhat.map(|xi, v| v * k.multiplier.at(eps * norm(xi)));
    inverse_dunkl_transform_grid(&damped, f.spec)
}

/// `u(x,t) = H_t f(x)` from a precomputed transform.
pub fn heat_solution(fhat: &GridFunction, t: f64, x: &[f64]) -> Result<f64> {
    let damped = fhat.map(|xi, v| v * (-t * xi.iter().map(|a| a * a).sum::<f64>()).exp());
    Ok(inverse_dunkl_transform(&damped, &[x.to_vec()])?[0].re)
}

/// Largest relative error of the subordination formula
/// `P_ε(r) = ∫_0^∞ q_{s/2}(r) ε(2π)^{−½} s^{−3/2} e^{−ε²/2s} ds` over `radii`.
pub fn poisson_subordination_defect(mult: &Multiplicity, eps: f64, radii: &[f64]) -> Result<f64> {
    let k = poisson_kernel(mult, eps)?;
    let n = mult.big_n;
    let (gx, gw) = gauss_jacobi(16, 0.0, 0.0)?;
    let mut worst: f64 = 0.0;
    for &r in radii {
        let a = 0.5 * (eps * eps + r * r);
        let start = a.ln() - 8.0;
        let mut acc = 0.0;
        for panel in 0..70 {
            let lo = start + panel as f64;
            for (&x, &w) in gx.iter().zip(&gw) {
                let u = lo + 0.5 * (1.0 + x);
                let s = u.exp();
                let heat = s.powf(-n / 2.0) * (-r * r / (2.0 * s)).exp();
                let sub = eps / (2.0 * std::f64::consts::PI).sqrt() * s.powf(-1.5) * (-eps * eps / (2.0 * s)).exp();
                acc += 0.5 * w * heat * sub * s;
            }
        }
        let exact = k.profile.eval(r);
        worst = worst.max((acc - exact).abs() / exact);
    }
    Ok(worst)
}

/// `S_r f(x) = a_κ ∫_S τ_{rω} f(x) h²(ω) dω` by the sphere rule.
pub fn spherical_mean<F: Fn(&[f64]) -> f64>(
    f: F,
    mult: &Multiplicity,
    r: f64,
    x: &[f64],
    sphere: &SphereRule,
    rules: &[JacobiRule],
) -> Result<f64> {
    check_dim(mult.d, x.len())?;
    check_dim(mult.d, sphere.d)?;
    if !(r >= 0.0) {
        return Err(DunklError::domain("spherical_mean", format!("radius {r} is negative")));
    }
    if r == 0.0 {
        return Ok(f(x));
    }
    let mut acc = 0.0;
    for (omega, &w) in sphere.points.iter().zip(&sphere.weights) {
        let y: Vec<f64> = omega.iter().map(|v| r * v).collect();
        acc += w * translate_z2d(mult, &f, &y, x, rules)?;
    }
    Ok(mult.a_k * acc)
}

/// `(c_h/a_κ) ∫_0^∞ S_r f(x) g₀(r) r^{2λ+1} dr` over the radial rule of g;
/// equals `f ∗ g(x)` for radial g.
pub fn convolution_by_spherical_means<F: Fn(&[f64]) -> f64>(
    f: F,
    g: &RadialProfile,
    x: &[f64],
    sphere: &SphereRule,
    rules: &[JacobiRule],
) -> Result<f64> {
    let mult = &g.mult;
    let mut acc = 0.0;
    for (&r, &w) in g.radial_rule.nodes.iter().zip(&g.radial_rule.weights) {
        let gr = g.eval(r);
        if gr == 0.0 {
            continue;
        }
        acc += w * gr * spherical_mean(&f, mult, r, x, sphere, rules)?;
    }
    Ok(mult.c_h / mult.a_k * acc)
}

/// Approximate identities accepted by [`convergence_experiment`].
#[derive(Debug, Clone)]
pub enum Approximant {
    Radial(SummabilityKernel),
    /// A sampled kernel with `c_h ∫ φ h² = 1`, not necessarily radial.
    Sampled(GridFunction),
}

impl Approximant {
    pub fn label(&self) -> String {
        match self {
            Approximant::Radial(k) => match k.family {
                Family::Heat => "heat".into(),
                Family::Poisson => "poisson".into(),
                Family::BochnerRiesz => format!("bochner_riesz(delta={})", k.delta),
            },
            Approximant::Sampled(_) => "sampled".into(),
        }
    }

    /// `φ̂(εξ)` on every node of `freq`.
    pub fn dilated_multiplier(&self, eps: f64, freq: GridSpec, mult: &Multiplicity) -> Result<Vec<Complex64>> {
        let template = GridFunction::from_fn(mult, freq, |_| 0.0)?;
        match self {
            Approximant::Radial(k) => Ok(template
                .points()
                .iter()
                .map(|xi| Complex64::new(k.multiplier.at(eps * norm(xi)), 0.0))
                .collect()),
            Approximant::Sampled(phi) => {
                let nodes: Vec<Vec<f64>> = template.node_sets().iter().map(|a| a.iter().map(|v| eps * v).collect()).collect();
                dunkl_transform_nodes(phi, &nodes)
            }
        }
    }
}

/// `f ∗ φ_ε` on the grid of f by the spectral route.
pub fn approximate(f: &GridFunction, phi: &Approximant, eps: f64, freq: GridSpec) -> Result<GridFunction> {
    approximate_from_hat(f, &dunkl_transform_grid(f, freq)?, phi, eps, freq)
}

fn approximate_from_hat(f: &GridFunction, fhat: &GridFunction, phi: &Approximant, eps: f64, freq: GridSpec) -> Result<GridFunction> {
    positive("approximate", "eps", eps)?;
    let m = phi.dilated_multiplier(eps, freq, &f.mult)?;
    let prod = fhat.with_values(fhat.values.iter().zip(&m).map(|(a, b)| a * b).collect())?;
    inverse_dunkl_transform_grid(&prod, f.spec)
}

/// Default scale schedule for approximate-identity experiments.
pub const DEFAULT_EPS_SCHEDULE: [f64; 6] = [1.0, 0.5, 0.25, 0.1, 0.05, 0.02];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub eps: f64,
    pub p: f64,
    pub norm: f64,
    pub relative: f64,
    pub runtime_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub kernel: String,
    pub reference_norm: f64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Errors strictly decrease along the schedule.
    pub fn decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].norm < w[0].norm)
    }

    pub fn final_relative(&self) -> f64 {
        self.rows.last().map_or(f64::NAN, |r| r.relative)
    }
}

/// `‖f ∗ φ_ε − f‖_p` along `eps_schedule`.
pub fn convergence_experiment(
    f: &GridFunction,
    phi: &Approximant,
    p: f64,
    eps_schedule: &[f64],
    freq: GridSpec,
) -> Result<ConvergenceTable> {
    if eps_schedule.is_empty() {
        return Err(DunklError::Empty("eps schedule"));
    }
    let reference_norm = lp_norm(f, p)?;
    let fhat = dunkl_transform_grid(f, freq)?;
    let mut rows = Vec::with_capacity(eps_schedule.len());
    for &eps in eps_schedule {
        let start = Instant::now();
        let approx = approximate_from_hat(f, &fhat, phi, eps, freq)?;
        let norm = lp_norm(&approx.sub(f)?, p)?;
        rows.push(ConvergenceRow {
            eps,
            p,
            norm,
            relative: norm / reference_norm,
            runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        });
    }
    Ok(ConvergenceTable { kernel: phi.label(), reference_norm, rows })
}

/// A sampled, non-radial, normalised kernel: an off-centre Gaussian bump
/// `C e^{−|x−a|²/2}` with C fixed by `c_h ∫ φ h² = 1`.
pub fn skewed_bump(mult: &Multiplicity, shift: &[f64], spec: GridSpec) -> Result<GridFunction> {
    check_dim(mult.d, shift.len())?;
    let a = shift.to_vec();
    let raw = GridFunction::from_fn(mult, spec, move |x| {
        (-0.5 * x.iter().zip(&a).map(|(x, a)| (x - a) * (x - a)).sum::<f64>()).exp()
    })?;
    let mass = mult.c_h * raw.integral().re;
    Ok(raw.scale(1.0 / mass))
}
