//! The maximal function `M f(x) = sup_r |∫ f(y) τ_x χ_{B_r}(y) h²(y) dy| / |B_r|`,
//! weak-type and majorisation experiments, and reflection symmetrisation.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, DunklError, Result};
use crate::grid::{GridFunction, GridSpec, Profile, RadialProfile};
use crate::multiplicity::Multiplicity;
use crate::quadrature::{phi_survival, JacobiRule};
use crate::summability::SummabilityKernel;
use crate::special::normalized_bessel;
use crate::transform::{dunkl_transform_grid, inverse_dunkl_transform, inverse_dunkl_transform_grid};
use crate::translation::translate_radial;

/// Finite stand-in for the supremum over `r > 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadiusSchedule {
    pub radii: Vec<f64>,
    pub ball_masses: Vec<f64>,
}

impl RadiusSchedule {
    pub fn log_spaced(mult: &Multiplicity, r_min: f64, r_max: f64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(DunklError::Empty("radius schedule"));
        }
        if !(r_min > 0.0 && r_max >= r_min) {
            return Err(DunklError::domain("RadiusSchedule", format!("bad range [{r_min}, {r_max}]")));
        }
        let radii: Vec<f64> = if count == 1 {
            vec![r_min]
        } else {
            let step = (r_max / r_min).ln() / (count - 1) as f64;
            (0..count).map(|k| r_min * (step * k as f64).exp()).collect()
        };
        let ball_masses = radii.iter().map(|&r| mult.ball_mass(r)).collect();
        Ok(RadiusSchedule { radii, ball_masses })
    }

    /// `count` radii from one grid cell to twice the half-diagonal of the box.
    pub fn for_grid(f: &GridFunction, count: usize) -> Result<Self> {
        let cell = 2.0 * f.spec.x_max / f.spec.axis_len() as f64;
        let reach = 2.0 * f.spec.x_max * (f.dim() as f64).sqrt();
        Self::log_spaced(&f.mult, cell, reach, count)
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }
}

/// How `τ_x χ_{B_r}` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IndicatorMode {
    /// Distribution function of the intertwining measure: one axis in
    /// closed form, the others by Gauss-Jacobi quadrature.
    Exact,
    /// Radial route with the jump replaced by a linear ramp of the given width.
    Softened { width: f64 },
    /// Through `(f ∗ χ_{B_r})^ = f̂ χ̂_{B_r}` with
    /// `χ̂_{B_r}(ξ) = r^N J_{λ+1}(r|ξ|)/(r|ξ|)^{λ+1}`, f̂ sampled on `freq`.
    /// Resolves every radius for smooth f.
    Spectral { freq: GridSpec },
}

/// `P(a t ≥ z)` for `t ~ Φ_κ`, κ > 0.
fn tail(kappa: f64, a: f64, z: f64) -> f64 {
    if a > 0.0 {
        phi_survival(kappa, z / a)
    } else {
        1.0 - phi_survival(kappa, z / a)
    }
}

/// `P(a_p t_p + Σ a_j t_j ≥ c)` with the sum over `others[idx..]` integrated.
fn nested_tail(rules: &[JacobiRule], pivot: (usize, f64), others: &[(usize, f64)], idx: usize, c: f64, spread: f64) -> f64 {
    if c <= -spread {
        return 1.0;
    }
    if c > spread {
        return 0.0;
    }
    if idx == others.len() {
        return tail(rules[pivot.0].kappa, pivot.1, c);
    }
    let (axis, a) = others[idx];
    let rest = spread - a.abs();
    let rule = &rules[axis];
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&u, &w)| w * nested_tail(rules, pivot, others, idx + 1, c - a * u, rest))
        .sum()
}

/// `τ_x χ_{B_r}(y) = P(|x|² + |y|² − 2Σ x_i y_i t_i ≤ r²)` with independent
/// `t_i ~ Φ_{κ_i}` (a point mass at 1 when `κ_i = 0`).
pub fn ball_indicator_exact(mult: &Multiplicity, r: f64, x: &[f64], y: &[f64], rules: &[JacobiRule]) -> f64 {
    let mut fixed = 0.0;
    let mut base = 0.0;
    let mut cont: Vec<(usize, f64)> = Vec::with_capacity(x.len());
    for i in 0..mult.d {
        base += x[i] * x[i] + y[i] * y[i];
        let a = x[i] * y[i];
        if mult.kappa[i] == 0.0 {
            fixed += a;
        } else if a != 0.0 {
            cont.push((i, a));
        }
    }
    let c = 0.5 * (base - r * r) - fixed;
    let spread: f64 = cont.iter().map(|(_, a)| a.abs()).sum();
    if c <= -spread {
        return 1.0;
    }
    if c > spread || cont.is_empty() {
        return 0.0;
    }
    let pk = (0..cont.len())
        .max_by(|&i, &j| cont[i].1.abs().partial_cmp(&cont[j].1.abs()).unwrap())
        .expect("nonempty");
    let pivot = cont.remove(pk);
    nested_tail(rules, pivot, &cont, 0, c, spread)
}

/// Linear ramp from 1 at `r − w/2` to 0 at `r + w/2`.
fn ramp(r: f64, width: f64) -> Profile {
    Arc::new(move |rho| ((r + 0.5 * width - rho) / width).clamp(0.0, 1.0))
}

enum Indicators {
    Exact,
    Softened(Vec<RadialProfile>),
}

impl Indicators {
    fn new(mult: &Multiplicity, sched: &RadiusSchedule, mode: IndicatorMode) -> Result<Self> {
        match mode {
            IndicatorMode::Exact | IndicatorMode::Spectral { .. } => Ok(Indicators::Exact),
            IndicatorMode::Softened { width } => {
                if !(width > 0.0) {
                    return Err(DunklError::domain("IndicatorMode", "ramp width must be positive"));
                }
                let profiles = sched
                    .radii
                    .iter()
                    .map(|&r| RadialProfile::new(ramp(r, width), mult, r + width, &[]))
                    .collect::<Result<_>>()?;
                Ok(Indicators::Softened(profiles))
            }
        }
    }

    fn eval(&self, mult: &Multiplicity, k: usize, r: f64, x: &[f64], y: &[f64], rules: &[JacobiRule]) -> Result<f64> {
        match self {
            Indicators::Exact => Ok(ball_indicator_exact(mult, r, x, y, rules)),
            Indicators::Softened(p) => translate_radial(mult, &p[k], x, y, rules),
        }
    }
}

fn check_rules(mult: &Multiplicity, rules: &[JacobiRule]) -> Result<()> {
    check_dim(mult.d, rules.len())?;
    if rules.iter().zip(&mult.kappa).any(|(r, &k)| r.kappa != k) {
        return Err(DunklError::MultiplicityMismatch);
    }
    Ok(())
}

fn active_nodes(f: &GridFunction) -> Vec<(Vec<f64>, Complex64)> {
    (0..f.len())
        .filter(|&k| f.values[k] != Complex64::new(0.0, 0.0))
        .map(|k| (f.point(k), f.values[k] * f.quad_weights[k]))
        .collect()
}

fn averages_with(
    f: &GridFunction,
    active: &[(Vec<f64>, Complex64)],
    ind: &Indicators,
    x: &[f64],
    sched: &RadiusSchedule,
    rules: &[JacobiRule],
) -> Result<Vec<Complex64>> {
    sched
        .radii
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (y, fw) in active {
                acc += fw * ind.eval(&f.mult, k, r, x, y, rules)?;
            }
            Ok(acc / sched.ball_masses[k])
        })
        .collect()
}

/// Ball averages at each point (outer) and radius (inner) by the spectral route.
fn spectral_averages(f: &GridFunction, points: &[Vec<f64>], sched: &RadiusSchedule, freq: GridSpec) -> Result<Vec<Vec<Complex64>>> {
    let fhat = dunkl_transform_grid(f, freq)?;
    let lam = f.mult.lambda_k;
    let c_h = f.mult.c_h;
    let mut out = vec![Vec::with_capacity(sched.len()); points.len()];
    // tensor fast path when the targets are the grid itself
    let on_grid = points.len() == f.len() && points.iter().enumerate().all(|(k, p)| *p == f.point(k));
    for (&r, &mass) in sched.radii.iter().zip(&sched.ball_masses) {
        let lifted = fhat.map(|xi, v| {
            v * r.powf(2.0 * lam + 2.0) * normalized_bessel(lam + 1.0, r * crate::grid::norm(xi)).expect("order above -1/2")
        });
        let values = if on_grid {
            inverse_dunkl_transform_grid(&lifted, f.spec)?.values
        } else {
            inverse_dunkl_transform(&lifted, points)?
        };
        for (o, v) in out.iter_mut().zip(values) {
            o.push(v / (c_h * mass));
        }
    }
    Ok(out)
}

/// Ball averages at each point (outer) and radius (inner).
fn averages(
    f: &GridFunction,
    points: &[Vec<f64>],
    sched: &RadiusSchedule,
    mode: IndicatorMode,
    rules: &[JacobiRule],
) -> Result<Vec<Vec<Complex64>>> {
    if sched.is_empty() {
        return Err(DunklError::Empty("radius schedule"));
    }
    for p in points {
        check_dim(f.dim(), p.len())?;
    }
    if let IndicatorMode::Spectral { freq } = mode {
        return spectral_averages(f, points, sched, freq);
    }
    check_rules(&f.mult, rules)?;
    let ind = Indicators::new(&f.mult, sched, mode)?;
    let active = active_nodes(f);
    points.par_iter().map(|x| averages_with(f, &active, &ind, x, sched, rules)).collect()
}

/// Signed ball averages `∫ f τ_x χ_{B_r} h² / |B_r|` for every radius.
pub fn ball_averages(
    f: &GridFunction,
    x: &[f64],
    sched: &RadiusSchedule,
    mode: IndicatorMode,
    rules: &[JacobiRule],
) -> Result<Vec<Complex64>> {
    Ok(averages(f, &[x.to_vec()], sched, mode, rules)?.remove(0))
}

/// `M f` at each point: the largest modulus of the ball averages.
pub fn maximal_at(
    f: &GridFunction,
    points: &[Vec<f64>],
    sched: &RadiusSchedule,
    mode: IndicatorMode,
    rules: &[JacobiRule],
) -> Result<Vec<f64>> {
    Ok(averages(f, points, sched, mode, rules)?
        .iter()
        .map(|a| a.iter().map(|v| v.norm()).fold(0.0, f64::max))
        .collect())
}

/// `M f(x)` over a radius schedule.
pub fn maximal_function(
    f: &GridFunction,
    x: &[f64],
    sched: &RadiusSchedule,
    mode: IndicatorMode,
    rules: &[JacobiRule],
) -> Result<f64> {
    Ok(maximal_at(f, &[x.to_vec()], sched, mode, rules)?[0])
}

/// Log-spaced levels from `lo` to `hi`.
pub fn log_schedule(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![lo];
    }
    let step = (hi / lo).ln() / (count - 1) as f64;
    (0..count).map(|k| lo * (step * k as f64).exp()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakTypeRow {
    pub a: f64,
    pub levelset_mass: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakTypeTable {
    pub rows: Vec<WeakTypeRow>,
    /// Largest ratio over the schedule.
    pub constant: f64,
    /// Smallest ratio over the schedule.
    pub floor: f64,
    /// Least-squares slope of `log |E(a)|` against `log a`.
    pub slope: f64,
}

/// Level-set table from precomputed maximal values at the grid nodes.
pub fn weak_type_from_values(f: &GridFunction, maximal: &[f64], a_schedule: &[f64]) -> Result<WeakTypeTable> {
    check_dim(f.len(), maximal.len())?;
    if a_schedule.is_empty() {
        return Err(DunklError::Empty("level schedule"));
    }
    let c_h = f.mult.c_h;
    let l1: f64 = c_h * f.values.iter().zip(&f.quad_weights).map(|(v, w)| v.norm() * w).sum::<f64>();
    let rows: Vec<WeakTypeRow> = a_schedule
        .iter()
        .map(|&a| {
            let mass = c_h * maximal.iter().zip(&f.quad_weights).filter(|(m, _)| **m > a).map(|(_, w)| w).sum::<f64>();
            WeakTypeRow { a, levelset_mass: mass, ratio: a * mass / l1 }
        })
        .collect();
    let constant = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let floor = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.levelset_mass > 0.0).map(|r| (r.a.ln(), r.levelset_mass.ln())).collect();
    let slope = if pts.len() < 2 {
        f64::NAN
    } else {
        let n = pts.len() as f64;
        let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    };
    Ok(WeakTypeTable { rows, constant, floor, slope })
}

/// `a·|{M f > a}| / ‖f‖_1` for each level, with M f evaluated at every node.
pub fn weak_type_experiment(
    f: &GridFunction,
    a_schedule: &[f64],
    sched: &RadiusSchedule,
    mode: IndicatorMode,
    rules: &[JacobiRule],
) -> Result<WeakTypeTable> {
    let m = maximal_at(f, &f.points(), sched, mode, rules)?;
    weak_type_from_values(f, &m, a_schedule)
}

/// Largest `|∫ r^{2λ+2} |φ₀'(r)| dr|` truncation over geometric radii; fails
/// when the tails do not settle.
pub fn moment_hypothesis(profile: &RadialProfile) -> Result<f64> {
    let scale = profile.breaks[0].max(1e-3);
    let breaks: Vec<f64> = (-12..=34).map(|k| scale * 2f64.powi(k)).collect();
    let mult = &profile.mult;
    let f0 = profile.f0.clone();
    let deriv: Profile = Arc::new(move |r| {
        let h = 1e-6 * r.max(scale);
        ((f0(r + h) - f0((r - h).max(0.0))) / (r + h - (r - h).max(0.0))).abs() * r
    });
    // the rule weight is r^{2λ+1}; one extra power of r sits in `deriv`
    let p = RadialProfile::with_breaks(deriv, mult, breaks.clone(), 16)?;
    let mut partial = Vec::with_capacity(breaks.len());
    let mut acc = 0.0;
    let per = p.per_panel;
    for (j, chunk) in p.radial_rule.nodes.chunks(per).zip(p.radial_rule.weights.chunks(per)).enumerate() {
        acc += chunk.0.iter().zip(chunk.1).map(|(&r, &w)| w * p.eval(r)).sum::<f64>();
        partial.push((breaks[j], acc));
    }
    let at = |k: usize| partial[k].1;
    let (mid, end) = (partial.len() - 11, partial.len() - 1);
    let total = at(end);
    if !total.is_finite() || at(end) - at(mid) > 1e-3 * at(mid).max(f64::MIN_POSITIVE) {
        return Err(DunklError::Hypothesis(format!(
            "moment integral does not settle: {:.3e} at r = {:.1e}, {:.3e} at r = {:.1e}",
            at(mid),
            partial[mid].0,
            total,
            partial[end].0
        )));
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MajorizationRow {
    pub x: Vec<f64>,
    pub sup_conv: f64,
    pub maximal: f64,
    pub maximal_refined: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MajorizationTable {
    pub rows: Vec<MajorizationRow>,
    pub moment: f64,
    /// Largest ratio with the base schedule.
    pub constant: f64,
    /// Largest ratio with the doubled schedule.
    pub refined_constant: f64,
    /// Largest relative change of `M f` between the two schedules.
    pub movement: f64,
}

/// `sup_ε |f ∗ φ_ε(x)| / M f(x)` at each sample point, with M f also
/// recomputed on a schedule of twice the density.
#[allow(clippy::too_many_arguments)]
pub fn majorization_check(
    f: &GridFunction,
    phi: &SummabilityKernel,
    eps_schedule: &[f64],
    points: &[Vec<f64>],
    radius_count: usize,
    mode: IndicatorMode,
    rules: &[JacobiRule],
    freq: GridSpec,
) -> Result<MajorizationTable> {
    if eps_schedule.is_empty() {
        return Err(DunklError::Empty("eps schedule"));
    }
    let moment = moment_hypothesis(&phi.profile)?;
    let fhat = dunkl_transform_grid(f, freq)?;
    let mut sup = vec![0.0f64; points.len()];
    for &eps in eps_schedule {
        let damped = fhat.map(|xi, v| v * phi.multiplier.at(eps * crate::grid::norm(xi)));
        for (s, v) in sup.iter_mut().zip(inverse_dunkl_transform(&damped, points)?) {
            *s = s.max(v.norm());
        }
    }
    let base = maximal_at(f, points, &RadiusSchedule::for_grid(f, radius_count)?, mode, rules)?;
    let fine = maximal_at(f, points, &RadiusSchedule::for_grid(f, 2 * radius_count)?, mode, rules)?;
    let rows: Vec<MajorizationRow> = points
        .iter()
        .zip(sup.iter().zip(base.iter().zip(&fine)))
        .map(|(x, (&s, (&m, &mf)))| MajorizationRow { x: x.clone(), sup_conv: s, maximal: m, maximal_refined: mf, ratio: s / m })
        .collect();
    let constant = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let refined_constant = rows.iter().map(|r| r.sup_conv / r.maximal_refined).fold(0.0, f64::max);
    let movement = rows.iter().map(|r| (r.maximal_refined - r.maximal).abs() / r.maximal).fold(0.0, f64::max);
    Ok(MajorizationTable { rows, moment, constant, refined_constant, movement })
}

/// `F = 2^{−k} Σ_{σ} f∘σ` over all sign flips of the chosen axes.
pub fn reflection_symmetrize(f: &GridFunction, axes: &[usize]) -> Result<GridFunction> {
    let mut mask = 0usize;
    for &a in axes {
        if a >= f.dim() {
            return Err(DunklError::domain("reflection_symmetrize", format!("axis {a} out of range")));
        }
        mask |= 1 << a;
    }
    let subs: Vec<usize> = (0..=mask).filter(|s| s & !mask == 0).collect();
    let scale = 1.0 / subs.len() as f64;
    let values = (0..f.len())
        .map(|k| subs.iter().map(|&s| f.values[f.reflected_index(k, s)]).sum::<Complex64>() * scale)
        .collect();
    f.with_values(values)
}

/// `f∘σ` for the sign flips in `mask`, exact on the mirrored grid.
pub fn reflect(f: &GridFunction, mask: usize) -> GridFunction {
    let values = (0..f.len()).map(|k| f.values[f.reflected_index(k, mask)]).collect();
    GridFunction { values, ..f.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiplicity::make_multiplicity;
    use crate::summability::{heat_kernel, poisson_kernel, bochner_riesz_kernel};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn exact_indicator_matches_quadrature() {
        let m = make_multiplicity(2, &[0.5, 1.5]).unwrap();
        let rules = JacobiRule::for_multiplicity(&m, 24).unwrap();
        let fine = JacobiRule::for_multiplicity(&m, 400).unwrap();
        let (x, y) = ([0.8, -0.6], [0.5, 1.1]);
        for r in [0.4, 1.0, 1.7, 2.2] {
            let exact = ball_indicator_exact(&m, r, &x, &y, &rules);
            let brute = crate::kernel::intertwine_z2d(
                |t: &[f64]| {
                    let rho2: f64 = x.iter().chain(&y).map(|v| v * v).sum::<f64>() - 2.0 * (x[0] * t[0] + x[1] * t[1]);
                    if rho2 <= r * r { 1.0 } else { 0.0 }
                },
                &m,
                &y,
                &fine,
            )
            .unwrap();
            assert!((exact - brute).abs() < 5e-3, "r={r}: {exact} vs {brute}");
        }
        // classical limit
        let m0 = make_multiplicity(2, &[0.0, 0.0]).unwrap();
        let r0 = JacobiRule::for_multiplicity(&m0, 4).unwrap();
        assert_eq!(ball_indicator_exact(&m0, 1.0, &[0.5, 0.0], &[0.0, 0.5], &r0), 1.0);
        assert_eq!(ball_indicator_exact(&m0, 0.5, &[0.5, 0.0], &[0.0, 0.5], &r0), 0.0);
    }

    #[test]
    fn one_dimensional_indicator_is_distribution_function() {
        let m = make_multiplicity(1, &[0.5]).unwrap();
        let rules = JacobiRule::for_multiplicity(&m, 8).unwrap();
        let (x, y) = (1.0, 0.7);
        let mut prev = 0.0;
        for k in 0..60 {
            let r = 0.05 * k as f64;
            let v = ball_indicator_exact(&m, r, &[x], &[y], &rules);
            assert!(v >= prev - 1e-15 && v <= 1.0);
            prev = v;
        }
        assert_eq!(ball_indicator_exact(&m, 0.29, &[x], &[y], &rules), 0.0);
        assert_eq!(ball_indicator_exact(&m, 1.71, &[x], &[y], &rules), 1.0);
    }

    #[test]
    fn constants_average_to_themselves() {
        let m = make_multiplicity(1, &[1.0]).unwrap();
        let rules = JacobiRule::for_multiplicity(&m, 16).unwrap();
        let f = GridFunction::from_fn(&m, GridSpec::new(20.0, 80, 8), |_| 2.5).unwrap();
        let sched = RadiusSchedule::log_spaced(&m, 0.5, 8.0, 6).unwrap();
        let avg = ball_averages(&f, &[1.3], &sched, IndicatorMode::Exact, &rules).unwrap();
        for a in avg {
            assert!((a.re - 2.5).abs() < 2e-3, "{a}");
        }
    }

    #[test]
    fn ball_masses_match_quadrature() {
        for (d, k) in [(1, vec![0.5]), (2, vec![0.5, 1.0]), (2, vec![0.0, 0.0])] {
            let m = make_multiplicity(d, &k).unwrap();
            let sched = RadiusSchedule::log_spaced(&m, 0.5, 3.0, 3).unwrap();
            for (&r, &mass) in sched.radii.iter().zip(&sched.ball_masses) {
                let ball: Profile = Arc::new(move |rho| if rho <= r { 1.0 } else { 0.0 });
                let p = RadialProfile::new(ball, &m, r, &[]).unwrap();
                assert_relative_eq!(p.integral(), mass, max_relative = 1e-10);
            }
        }
    }

    fn pair(m: &Multiplicity) -> (GridFunction, GridFunction) {
        let spec = GridSpec::new(6.0, 6, 8);
        let f = GridFunction::from_fn(m, spec, |x| (-(x[0] + 1.5).powi(2) * 4.0).exp()).unwrap();
        let g = GridFunction::from_fn(m, spec, |x| (-(x[0] - 2.0).powi(2)).exp()).unwrap();
        (f, g)
    }

    #[test]
    fn sublinear_homogeneous_equivariant() {
        let m = make_multiplicity(1, &[0.5]).unwrap();
        let rules = JacobiRule::for_multiplicity(&m, 16).unwrap();
        let (f, g) = pair(&m);
        let sched = RadiusSchedule::for_grid(&f, 40).unwrap();
        let pts = vec![vec![-1.5], vec![0.3], vec![2.0]];
        let mf = maximal_at(&f, &pts, &sched, IndicatorMode::Exact, &rules).unwrap();
        let mg = maximal_at(&g, &pts, &sched, IndicatorMode::Exact, &rules).unwrap();
        let mfg = maximal_at(&f.add(&g).unwrap(), &pts, &sched, IndicatorMode::Exact, &rules).unwrap();
        for k in 0..pts.len() {
            assert!(mfg[k] <= mf[k] + mg[k] + 1e-12);
        }
        let m3 = maximal_at(&f.scale(3.0), &pts, &sched, IndicatorMode::Exact, &rules).unwrap();
        for k in 0..pts.len() {
            assert_relative_eq!(m3[k], 3.0 * mf[k], max_relative = 1e-13);
        }
        let flipped = reflect(&f, 1);
        let neg: Vec<Vec<f64>> = pts.iter().map(|p| vec![-p[0]]).collect();
        let mr = maximal_at(&flipped, &neg, &sched, IndicatorMode::Exact, &rules).unwrap();
        for k in 0..pts.len() {
            assert_relative_eq!(mr[k], mf[k], max_relative = 1e-12);
        }
    }

    #[test]
    fn softened_mode_is_close_to_exact() {
        let m = make_multiplicity(1, &[0.5]).unwrap();
        let rules = JacobiRule::for_multiplicity(&m, 48).unwrap();
        let (f, _) = pair(&m);
        let sched = RadiusSchedule::log_spaced(&m, 0.5, 6.0, 8).unwrap();
        let a = ball_averages(&f, &[0.4], &sched, IndicatorMode::Exact, &rules).unwrap();
        let b = ball_averages(&f, &[0.4], &sched, IndicatorMode::Softened { width: 0.05 }, &rules).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).norm() < 2e-2 * u.norm().max(1e-3), "{u} {v}");
        }
        let c = ball_averages(&f, &[0.4], &sched, IndicatorMode::Spectral { freq: GridSpec::new(12.0, 8, 12) }, &rules).unwrap();
        for (u, v) in a.iter().zip(&c) {
            assert!((u - v).norm() < 2e-2 * u.norm().max(1e-3), "{u} {v}");
        }
    }

    #[test]
    fn point_mass_weak_type_ratio_near_one() {
        let m = make_multiplicity(1, &[0.5]).unwrap();
        let rules = JacobiRule::for_multiplicity(&m, 16).unwrap();
        // unit point mass split over the two nodes nearest the origin
        let zero = GridFunction::from_fn(&m, GridSpec::new(8.0, 20, 8), |_| 0.0).unwrap();
        let mid = zero.len() / 2;
        let mut values = zero.values.clone();
        values[mid] = (0.5 / zero.quad_weights[mid]).into();
        values[mid - 1] = (0.5 / zero.quad_weights[mid - 1]).into();
        let f = zero.with_values(values).unwrap();
        let sched = RadiusSchedule::for_grid(&f, 80).unwrap();
        let m_vals = maximal_at(&f, &f.points(), &sched, IndicatorMode::Exact, &rules).unwrap();
        // a point mass μ has M(x) = μ/(d_κ|x|^N), so level a ↔ radius (μ/(d_κ a))^{1/N}
        let mu = f.integral().re;
        let level = |rho: f64| mu / (m.d_k * rho.powf(m.big_n));
        let levels = log_schedule(level(6.0), level(0.6), 9);
        let t = weak_type_from_values(&f, &m_vals, &levels).unwrap();
        assert!(t.constant < 1.3 && t.floor > 0.6, "{t:?}");
        assert!((t.slope + 1.0).abs() < 0.15, "{t:?}");
        let doubled: Vec<f64> = m_vals.iter().map(|v| 2.0 * v).collect();
        let two: Vec<f64> = levels.iter().map(|a| 2.0 * a).collect();
        let t2 = weak_type_from_values(&f.scale(2.0), &doubled, &two).unwrap();
        for (r1, r2) in t.rows.iter().zip(&t2.rows) {
            assert_eq!(r1.levelset_mass, r2.levelset_mass);
        }
        let empty = weak_type_from_values(&f, &m_vals, &[1e6]).unwrap();
        assert_eq!(empty.rows[0].levelset_mass, 0.0);
    }

    #[test]
    fn majorization_by_poisson_and_heat() {
        let m = make_multiplicity(1, &[0.5]).unwrap();
        let rules = JacobiRule::for_multiplicity(&m, 16).unwrap();
        let f = GridFunction::from_fn(&m, GridSpec::new(8.0, 8, 8), |x| (-(x[0] - 0.5).powi(2) * 2.0).exp()).unwrap();
        let pts = vec![vec![0.5], vec![-1.0], vec![2.5]];
        for k in [heat_kernel(&m, 0.5).unwrap(), poisson_kernel(&m, 1.0).unwrap()] {
            let freq = GridSpec::new(10.0, 5, 12);
            let t = majorization_check(&f, &k, &[2.0, 1.0, 0.5, 0.25, 0.1], &pts, 40, IndicatorMode::Spectral { freq }, &rules, freq).unwrap();
            assert!(t.constant.is_finite() && t.constant > 0.0 && t.constant <= 1.0 + 1e-9, "{t:?}");
            assert!(t.movement < 0.01, "{t:?}");
        }
        assert!(moment_hypothesis(&bochner_riesz_kernel(&m, 0.0, 1.0).unwrap().profile).is_err());
        assert!(moment_hypothesis(&bochner_riesz_kernel(&m, 2.5, 1.0).unwrap().profile).is_ok());
    }

    #[test]
    fn symmetrisation() {
        let m = make_multiplicity(2, &[0.5, 1.0]).unwrap();
        let spec = GridSpec::new(5.0, 3, 6);
        let odd = GridFunction::from_fn(&m, spec, |x| x[0] * x[1] * (-x[0] * x[0] - x[1] * x[1]).exp()).unwrap();
        assert!(reflection_symmetrize(&odd, &[0, 1]).unwrap().sup_norm() < 1e-15);
        assert_eq!(reflection_symmetrize(&odd, &[]).unwrap(), odd);
        assert!(reflection_symmetrize(&odd, &[2]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn symmetrisation_does_not_increase_l1(a in -2.0..2.0f64, b in -2.0..2.0f64, s in 0.3..1.5f64) {
            let m = make_multiplicity(2, &[0.5, 1.0]).unwrap();
            let f = GridFunction::from_fn(&m, GridSpec::new(6.0, 3, 6), |x| {
                ((x[0] - a).powi(2) + (x[1] - b).powi(2)).mul_add(-1.0 / s, 0.0).exp() * (x[0] - 0.3)
            }).unwrap();
            let n = crate::transform::lp_norm(&f, 1.0).unwrap();
            for axes in [vec![0], vec![1], vec![0, 1]] {
                let g = reflection_symmetrize(&f, &axes).unwrap();
                prop_assert!(crate::transform::lp_norm(&g, 1.0).unwrap() <= n * (1.0 + 1e-12));
            }
        }

        #[test]
        fn maximal_of_abs_dominates(c in -1.0..1.0f64) {
            let m = make_multiplicity(1, &[1.0]).unwrap();
            let rules = JacobiRule::for_multiplicity(&m, 8).unwrap();
            let f = GridFunction::from_fn(&m, GridSpec::new(5.0, 4, 6), |x| (x[0] - c) * (-x[0] * x[0]).exp()).unwrap();
            let sched = RadiusSchedule::for_grid(&f, 12).unwrap();
            let pts = vec![vec![c], vec![0.7]];
            let a = maximal_at(&f, &pts, &sched, IndicatorMode::Exact, &rules).unwrap();
            let b = maximal_at(&f.abs(), &pts, &sched, IndicatorMode::Exact, &rules).unwrap();
            for (u, v) in a.iter().zip(&b) {
                prop_assert!(u <= &(v + 1e-13));
            }
        }
    }
}
