//! Dunkl convolution `f ∗ g(x) = c_h ∫ f(y) τ_x g^∨(y) h²(y) dy`, dilations
//! and Young-type norm ratios.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_dim, DunklError, Result};
use crate::grid::{norm, GridFunction, GridSpec, Profile, RadialProfile};
use crate::quadrature::JacobiRule;
use crate::transform::{dunkl_transform_grid, hankel_transform, inverse_dunkl_transform_grid, lp_norm};
use crate::translation::{translate_radial, translate_z2d};

/// Largest dimension handled by the stack buffers of the explicit route.
const MAX_DIM: usize = 8;

fn check_eps(op: &'static str, eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(DunklError::domain(op, format!("scale {eps} must be positive")))
    }
}

/// `φ_ε(x) = ε^{−N} φ(x/ε)`, which preserves `∫ φ h²`.
pub trait Dilate: Sized {
    fn dilate(&self, eps: f64) -> Result<Self>;
}

impl Dilate for RadialProfile {
    fn dilate(&self, eps: f64) -> Result<Self> {
        check_eps("dilate", eps)?;
        let scale = eps.powf(-self.mult.big_n);
        let f0 = self.f0.clone();
        let g: Profile = Arc::new(move |r| scale * f0(r / eps));
        let breaks = self.breaks.iter().map(|b| b * eps).collect();
        RadialProfile::with_breaks(g, &self.mult, breaks, self.per_panel)
    }
}

/// The dilated samples live on the dilated grid, whose nodes are exactly
/// `ε` times the original ones.
impl Dilate for GridFunction {
    fn dilate(&self, eps: f64) -> Result<Self> {
        check_eps("dilate", eps)?;
        let spec = GridSpec { x_max: self.spec.x_max * eps, ..self.spec };
        let scale = eps.powf(-self.mult.big_n);
        let template = GridFunction::from_fn(&self.mult, spec, |_| 0.0)?;
        template.with_values(self.values.iter().map(|v| v * scale).collect())
    }
}

/// Second operand of an explicit convolution.
#[derive(Clone, Copy)]
pub enum Operand<'a> {
    /// Any function; translated by the explicit product formula.
    Function(&'a (dyn Fn(&[f64]) -> f64 + Sync)),
    /// A radial function; translated by the radial formula.
    Radial(&'a RadialProfile),
}

/// `f ∗ g` at each target by quadrature of the defining integral over the
/// grid of `f`. Nodes where `|f|·w` is negligible are skipped.
pub fn convolve(f: &GridFunction, g: Operand<'_>, targets: &[Vec<f64>], rules: &[JacobiRule]) -> Result<Vec<Complex64>> {
    let d = f.dim();
    if d > MAX_DIM {
        return Err(DunklError::domain("convolve", format!("dimension {d} above {MAX_DIM}")));
    }
    if let Operand::Radial(p) = g {
        if !p.mult.same_as(&f.mult) {
            return Err(DunklError::MultiplicityMismatch);
        }
    }
    for t in targets {
        check_dim(d, t.len())?;
    }
    let peak = f.values.iter().zip(&f.quad_weights).map(|(v, w)| v.norm() * w).fold(0.0, f64::max);
    let active: Vec<(Vec<f64>, Complex64)> = (0..f.len())
        .filter(|&k| f.values[k].norm() * f.quad_weights[k] > 1e-17 * peak)
        .map(|k| (f.point(k), f.values[k] * f.quad_weights[k]))
        .collect();
    let c_h = f.mult.c_h;
    targets
        .par_iter()
        .map(|x| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (y, fw) in &active {
                let tau = match g {
                    Operand::Function(g) => {
                        let reflected = |z: &[f64]| {
                            let mut buf = [0.0; MAX_DIM];
                            for (b, v) in buf.iter_mut().zip(z) {
                                *b = -v;
                            }
                            g(&buf[..z.len()])
                        };
                        translate_z2d(&f.mult, reflected, x, y, rules)?
                    }
                    Operand::Radial(p) => translate_radial(&f.mult, p, x, y, rules)?,
                };
                acc += fw * tau;
            }
            Ok(acc * c_h)
        })
        .collect()
}

/// `f ∗ g` on the grid of `f` from `(f ∗ g)^ = f̂·ĝ`, with both transforms
/// sampled on the frequency grid `freq`. `ghat` is given pointwise.
pub fn convolve_spectral<G: Fn(&[f64]) -> Complex64>(f: &GridFunction, ghat: G, freq: GridSpec) -> Result<GridFunction> {
    let fhat = dunkl_transform_grid(f, freq)?;
    let prod = fhat.map(|xi, v| v * ghat(xi));
    inverse_dunkl_transform_grid(&prod, f.spec)
}

/// Transform of a radial profile sampled on every node of `freq`.
pub fn radial_hat_on_grid(g: &RadialProfile, freq: GridSpec) -> Result<GridFunction> {
    let template = GridFunction::from_fn(&g.mult, freq, |_| 0.0)?;
    let radii: Vec<f64> = template.points().iter().map(|p| norm(p)).collect();
    let hat = hankel_transform(g, g.mult.lambda_k, &radii)?;
    template.with_values(hat.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
}

/// Spectral convolution with a radial second operand.
pub fn convolve_spectral_radial(f: &GridFunction, g: &RadialProfile, freq: GridSpec) -> Result<GridFunction> {
    if !g.mult.same_as(&f.mult) {
        return Err(DunklError::MultiplicityMismatch);
    }
    let fhat = dunkl_transform_grid(f, freq)?;
    let ghat = radial_hat_on_grid(g, freq)?;
    let prod = fhat.with_values(fhat.values.iter().zip(&ghat.values).map(|(a, b)| a * b).collect())?;
    inverse_dunkl_transform_grid(&prod, f.spec)
}

/// Spectral convolution of two sampled functions.
pub fn convolve_spectral_grid(f: &GridFunction, g: &GridFunction, freq: GridSpec) -> Result<GridFunction> {
    if !g.mult.same_as(&f.mult) {
        return Err(DunklError::MultiplicityMismatch);
    }
    let fhat = dunkl_transform_grid(f, freq)?;
    let ghat = dunkl_transform_grid(g, freq)?;
    let prod = fhat.with_values(fhat.values.iter().zip(&ghat.values).map(|(a, b)| a * b).collect())?;
    inverse_dunkl_transform_grid(&prod, f.spec)
}

/// Outcome of one norm inequality `lhs ≤ c·bound`; `ratio = lhs / bound`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct YoungReport {
    pub p: f64,
    pub lhs: f64,
    pub bound: f64,
    pub ratio: f64,
}

/// `‖f ∗ g‖_p / (‖g‖_1 ‖f‖_p)` for radial g.
pub fn young_radial_ratio(f: &GridFunction, g: &RadialProfile, p: f64, freq: GridSpec) -> Result<YoungReport> {
    let conv = convolve_spectral_radial(f, g, freq)?;
    let lhs = lp_norm(&conv, p)?;
    let bound = g.lp_norm(1.0)? * lp_norm(f, p)?;
    Ok(YoungReport { p, lhs, bound, ratio: lhs / bound })
}

/// `‖f ∗ g‖_p / (‖f‖_q ‖g‖_r)` with `1/p = 1/q + 1/r − 1`, for any g.
pub fn young_general_ratio(f: &GridFunction, g: &GridFunction, q: f64, r: f64, freq: GridSpec) -> Result<YoungReport> {
    if !(q >= 1.0 && r >= 1.0) {
        return Err(DunklError::domain("young_general_ratio", "exponents must be at least 1"));
    }
    let inv_p = 1.0 / q + 1.0 / r - 1.0;
    if !(-1e-15..=1.0).contains(&inv_p) {
        return Err(DunklError::domain("young_general_ratio", format!("1/q + 1/r − 1 = {inv_p} outside [0, 1]")));
    }
    let p = if inv_p <= 0.0 { f64::INFINITY } else { 1.0 / inv_p };
    let conv = convolve_spectral_grid(f, g, freq)?;
    let lhs = lp_norm(&conv, p)?;
    let bound = lp_norm(f, q)? * lp_norm(g, r)?;
    Ok(YoungReport { p, lhs, bound, ratio: lhs / bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiplicity::make_multiplicity;
    use crate::transform::dunkl_transform_grid;
    use approx::assert_relative_eq;

    fn heat_profile(mult: &crate::multiplicity::Multiplicity, t: f64) -> RadialProfile {
        let n = mult.big_n;
        let f0: Profile = Arc::new(move |r| (2.0 * t).powf(-n / 2.0) * (-r * r / (4.0 * t)).exp());
        RadialProfile::auto(f0, mult, &[]).unwrap()
    }

    #[test]
    fn dilation_preserves_mass() {
        let mult = make_multiplicity(2, &[0.5, 1.0]).unwrap();
        let f = GridFunction::from_fn(&mult, GridSpec::new(8.0, 4, 12), |x| (-(x[0] - 0.5).powi(2) - x[1] * x[1]).exp()).unwrap();
        let m = f.integral().re;
        for eps in [0.5, 2.0] {
            assert_relative_eq!(f.dilate(eps).unwrap().integral().re, m, max_relative = 1e-12);
        }
        let p = heat_profile(&mult, 0.5);
        for eps in [0.3, 1.0, 3.0] {
            assert_relative_eq!(p.dilate(eps).unwrap().integral(), p.integral(), max_relative = 1e-10);
        }
        assert!(f.dilate(0.0).is_err());
    }

    #[test]
    fn gaussian_dilates_to_heat_kernel() {
        let mult = make_multiplicity(1, &[0.7]).unwrap();
        let g: Profile = Arc::new(|r| (-r * r / 2.0).exp());
        let t = 0.3f64;
        let q = RadialProfile::new(g, &mult, 12.0, &[]).unwrap().dilate((2.0 * t).sqrt()).unwrap();
        let exact = heat_profile(&mult, t);
        for r in [0.0, 0.4, 1.3, 2.0] {
            assert_relative_eq!(q.eval(r), exact.eval(r), max_relative = 1e-13);
        }
    }

    #[test]
    fn heat_semigroup_by_explicit_convolution() {
        // q_{1/2} ∗ q_t = q_{t+1/2}
        let mult = make_multiplicity(1, &[0.5]).unwrap();
        let rules = JacobiRule::for_multiplicity(&mult, 32).unwrap();
        let f = heat_profile(&mult, 0.5).to_grid(GridSpec::new(10.0, 5, 14)).unwrap();
        for t in [0.25, 1.0] {
            let g = heat_profile(&mult, t);
            let target = heat_profile(&mult, t + 0.5);
            let xs: Vec<Vec<f64>> = [-1.7, 0.0, 0.6, 2.5].iter().map(|&x| vec![x]).collect();
            let got = convolve(&f, Operand::Radial(&g), &xs, &rules).unwrap();
            for (x, v) in xs.iter().zip(got) {
                assert!((v.re - target.eval(x[0].abs())).abs() < 1e-9, "t={t} x={x:?}");
            }
        }
    }

    #[test]
    fn explicit_matches_spectral_and_commutes() {
        let mult = make_multiplicity(1, &[0.5]).unwrap();
        let rules = JacobiRule::for_multiplicity(&mult, 32).unwrap();
        let spec = GridSpec::new(10.0, 5, 14);
        let fa = |x: &[f64]| (-x[0] * x[0]).exp() * (1.0 + x[0]);
        let ga = |x: &[f64]| (-2.0 * (x[0] - 0.3).powi(2)).exp();
        let f = GridFunction::from_fn(&mult, spec, fa).unwrap();
        let g = GridFunction::from_fn(&mult, spec, ga).unwrap();
        let xs: Vec<Vec<f64>> = [-1.2, 0.1, 0.9].iter().map(|&x| vec![x]).collect();
        let fg = convolve(&f, Operand::Function(&ga), &xs, &rules).unwrap();
        let gf = convolve(&g, Operand::Function(&fa), &xs, &rules).unwrap();
        for (a, b) in fg.iter().zip(&gf) {
            assert!((a - b).norm() < 1e-9);
        }
        let spectral = convolve_spectral_grid(&f, &g, spec).unwrap();
        let explicit_on_grid = convolve(&f, Operand::Function(&ga), &spectral.points(), &rules).unwrap();
        let peak = spectral.sup_norm();
        for (a, b) in explicit_on_grid.iter().zip(&spectral.values) {
            assert!((a - b).norm() < 1e-8 * peak);
        }
        // transform identity on the full grid
        let conv = spectral.with_values(explicit_on_grid).unwrap();
        let lhs = dunkl_transform_grid(&conv, spec).unwrap();
        let fh = dunkl_transform_grid(&f, spec).unwrap();
        let gh = dunkl_transform_grid(&g, spec).unwrap();
        let top = lhs.sup_norm();
        for k in 0..lhs.len() {
            assert!((lhs.values[k] - fh.values[k] * gh.values[k]).norm() < 1e-8 * top);
        }
    }

    #[test]
    fn young_ratio_below_one() {
        let mult = make_multiplicity(2, &[0.5, 0.0]).unwrap();
        let spec = GridSpec::new(9.0, 6, 12);
        let f = GridFunction::from_fn(&mult, spec, |x| (-(x[0] - 1.0).powi(2) - 0.5 * x[1] * x[1]).exp()).unwrap();
        let g = heat_profile(&mult, 0.3);
        for p in [1.0, 2.0, f64::INFINITY] {
            let rep = young_radial_ratio(&f, &g, p, GridSpec::new(8.0, 5, 12)).unwrap();
            assert!(rep.ratio <= 1.0 + 1e-3, "p={p}: {rep:?}");
            assert!(rep.ratio > 0.3);
        }
        let gg = g.to_grid(spec).unwrap();
        let rep = young_general_ratio(&f, &gg, 2.0, 1.0, GridSpec::new(8.0, 5, 12)).unwrap();
        assert_eq!(rep.p, 2.0);
        assert!(rep.ratio.is_finite());
        assert!(young_general_ratio(&f, &gg, 1.5, 1.2, spec).is_ok());
        assert!(young_general_ratio(&f, &gg, 4.0, 2.0, spec).is_err());
    }
}
