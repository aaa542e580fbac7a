//! Forward and inverse Dunkl transforms on weighted grids, the Hankel
//! transform for radial profiles, and weighted norms.
//!
//! The kernel factorises over coordinates, so every transform is a
//! sequence of one-dimensional contractions. Transforms onto a tensor grid
//! cost `O(d·n^{d+1})`; transforms at scattered targets cost `O(M)` each.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{check_dim, DunklError, Result};
use crate::grid::{norm, GridFunction, GridSpec, RadialProfile};
use crate::kernel::kernel_1d;
use crate::quadrature::{AxisRule, HalfLineRule};
use crate::special::normalized_bessel;

/// Boundary-to-maximum ratio above which transforms warn.
pub const DECAY_TOL: f64 = 1e-10;

/// Weighted norm `(c_h Σ |f_k|^p w_k)^{1/p}`; `p = ∞` gives the sampled maximum.
pub fn lp_norm(f: &GridFunction, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(DunklError::domain("lp_norm", format!("p = {p} below 1")));
    }
    if p.is_infinite() {
        return Ok(f.sup_norm());
    }
    let s: f64 = f.values.iter().zip(&f.quad_weights).map(|(v, &w)| v.norm().powf(p) * w).sum();
    Ok((f.mult.c_h * s).powf(1.0 / p))
}

/// Applies the `m × n` row-major matrix `mat` along `axis` of a row-major
/// tensor of the given shape.
pub(crate) fn apply_axis(values: &[Complex64], shape: &[usize], axis: usize, mat: &[Complex64], m: usize) -> Vec<Complex64> {
    let n = shape[axis];
    debug_assert_eq!(mat.len(), m * n);
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let mut out = vec![Complex64::new(0.0, 0.0); outer * m * inner];
    out.par_chunks_mut(m * inner).enumerate().for_each(|(o, block)| {
        let src = &values[o * n * inner..(o + 1) * n * inner];
        for j in 0..m {
            let dst = &mut block[j * inner..(j + 1) * inner];
            for k in 0..n {
                let a = mat[j * n + k];
                let row = &src[k * inner..(k + 1) * inner];
                for (d, s) in dst.iter_mut().zip(row) {
                    *d += a * s;
                }
            }
        }
    });
    out
}

/// Contracts a tensor fully against one vector per axis.
fn contract(values: &[Complex64], shape: &[usize], rows: &[Vec<Complex64>]) -> Complex64 {
    let mut cur: Vec<Complex64> = values.to_vec();
    let mut len = cur.len();
    for axis in (0..shape.len()).rev() {
        let n = shape[axis];
        let row = &rows[axis];
        let next = len / n;
        for o in 0..next {
            let mut s = Complex64::new(0.0, 0.0);
            for (k, r) in row.iter().enumerate() {
                s += cur[o * n + k] * r;
            }
            cur[o] = s;
        }
        len = next;
    }
    cur[0]
}

/// One-dimensional kernel matrix `K[j,k] = E(x_k, −i y_j)·w_k`, conjugated
/// for the inverse direction.
fn kernel_matrix(kappa: f64, rule: &AxisRule, targets: &[f64], conj: bool) -> Vec<Complex64> {
    let n = rule.len();
    let mut mat = Vec::with_capacity(targets.len() * n);
    for &y in targets {
        for k in 0..n {
            let e = kernel_1d(kappa, rule.nodes[k], y) * rule.weights[k];
            mat.push(if conj { e.conj() } else { e });
        }
    }
    mat
}

fn scattered(f: &GridFunction, targets: &[Vec<f64>], conj: bool) -> Result<Vec<Complex64>> {
    for t in targets {
        check_dim(f.dim(), t.len())?;
    }
    let shape = f.shape();
    let c_h = f.mult.c_h;
    Ok(targets
        .par_iter()
        .map(|y| {
            let rows: Vec<Vec<Complex64>> = (0..f.dim())
                .map(|i| kernel_matrix(f.mult.kappa[i], &f.axes[i], &[y[i]], conj))
                .collect();
            contract(&f.values, &shape, &rows) * c_h
        })
        .collect())
}

/// Tensor transform onto arbitrary per-axis node sets, row-major.
fn onto_nodes(f: &GridFunction, node_sets: &[Vec<f64>], conj: bool) -> Result<Vec<Complex64>> {
    check_dim(f.dim(), node_sets.len())?;
    let mut shape = f.shape();
    let mut cur = f.values.clone();
    for i in 0..f.dim() {
        let mat = kernel_matrix(f.mult.kappa[i], &f.axes[i], &node_sets[i], conj);
        cur = apply_axis(&cur, &shape, i, &mat, node_sets[i].len());
        shape[i] = node_sets[i].len();
    }
    let c_h = f.mult.c_h;
    for v in cur.iter_mut() {
        *v *= c_h;
    }
    Ok(cur)
}

fn onto_grid(f: &GridFunction, spec: GridSpec, conj: bool) -> Result<GridFunction> {
    let template = GridFunction::from_fn(&f.mult, spec, |_| 0.0)?;
    let values = onto_nodes(f, &template.node_sets(), conj)?;
    template.with_values(values)
}

/// Transform on the tensor product of `node_sets` (row-major output).
pub fn dunkl_transform_nodes(f: &GridFunction, node_sets: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    f.warn_if_not_decayed("dunkl_transform", DECAY_TOL);
    onto_nodes(f, node_sets, false)
}

/// `f̂(y) = c_h Σ_k f(x_k) E(x_k, −iy) w_k` at each target.
pub fn dunkl_transform(f: &GridFunction, targets: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    f.warn_if_not_decayed("dunkl_transform", DECAY_TOL);
    scattered(f, targets, false)
}

/// `c_h Σ_k f̂(ξ_k) E(ix, ξ_k) w_k` at each target.
pub fn inverse_dunkl_transform(fhat: &GridFunction, targets: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    fhat.warn_if_not_decayed("inverse_dunkl_transform", DECAY_TOL);
    scattered(fhat, targets, true)
}

/// Transform sampled on the nodes of `spec` (tensor fast path).
pub fn dunkl_transform_grid(f: &GridFunction, spec: GridSpec) -> Result<GridFunction> {
    f.warn_if_not_decayed("dunkl_transform", DECAY_TOL);
    onto_grid(f, spec, false)
}

/// Inverse transform sampled on the nodes of `spec`.
pub fn inverse_dunkl_transform_grid(fhat: &GridFunction, spec: GridSpec) -> Result<GridFunction> {
    fhat.warn_if_not_decayed("inverse_dunkl_transform", DECAY_TOL);
    onto_grid(fhat, spec, true)
}

/// `H_α f₀(s) = ∫_0^∞ f₀(r) J_α(rs)/(rs)^α r^{2α+1} dr`.
///
/// With this normalisation the transform is its own inverse and fixes
/// `e^{−r²/2}`. Order `α = −½` (the cosine transform) is accepted.
pub fn hankel_transform(p: &RadialProfile, alpha: f64, s_targets: &[f64]) -> Result<Vec<f64>> {
    if !(alpha >= -0.5) {
        return Err(DunklError::domain("hankel_transform", format!("order {alpha} below -1/2")));
    }
    let power = 2.0 * alpha + 1.0;
    let own;
    let rule = if (power - p.radial_rule.power).abs() < 1e-15 {
        &p.radial_rule
    } else {
        own = HalfLineRule::with_breaks(power, &p.breaks, p.per_panel)?;
        &own
    };
    let samples: Vec<f64> = rule.nodes.iter().map(|&r| p.eval(r)).collect();
    Ok(s_targets
        .par_iter()
        .map(|&s| {
            rule.nodes
                .iter()
                .zip(&rule.weights)
                .zip(&samples)
                .map(|((&r, &w), &f)| w * f * normalized_bessel(alpha, r * s).expect("order checked"))
                .sum()
        })
        .collect())
}

/// Inverse Hankel transform; identical in form to the forward one.
pub fn inverse_hankel_transform(p: &RadialProfile, alpha: f64, r_targets: &[f64]) -> Result<Vec<f64>> {
    hankel_transform(p, alpha, r_targets)
}

/// Dunkl transform of a radial function, `f̂(y) = H_λ f₀(|y|)`.
pub fn radial_dunkl_transform(p: &RadialProfile, targets: &[Vec<f64>]) -> Result<Vec<f64>> {
    for t in targets {
        check_dim(p.mult.d, t.len())?;
    }
    let s: Vec<f64> = targets.iter().map(|y| norm(y)).collect();
    hankel_transform(p, p.mult.lambda_k, &s)
}

/// `|‖f̂‖₂ − ‖f‖₂| / ‖f‖₂` with f̂ sampled on the same grid as f.
pub fn plancherel_defect(f: &GridFunction) -> Result<f64> {
    let n = lp_norm(f, 2.0)?;
    if n == 0.0 {
        return Err(DunklError::domain("plancherel_defect", "zero input"));
    }
    let fhat = dunkl_transform_grid(f, f.spec)?;
    Ok((lp_norm(&fhat, 2.0)? - n).abs() / n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::dunkl_derivative_z2d;
    use crate::multiplicity::{make_multiplicity, Multiplicity};
    use std::sync::Arc;

    fn gauss(p: &[f64]) -> f64 {
        (-p.iter().map(|x| x * x).sum::<f64>() / 2.0).exp()
    }

    fn spec() -> GridSpec {
        GridSpec::new(10.0, 5, 14)
    }

    #[test]
    fn gaussian_is_fixed() {
        for kappa in [vec![0.0], vec![1.5], vec![0.5, 1.0], vec![0.0, 2.5]] {
            let m = make_multiplicity(kappa.len(), &kappa).unwrap();
            let g = GridFunction::from_fn(&m, spec(), gauss).unwrap();
            let targets: Vec<Vec<f64>> = (0..6).map(|k| (0..m.d).map(|i| 0.4 * k as f64 - 0.7 * i as f64).collect()).collect();
            let fh = dunkl_transform(&g, &targets).unwrap();
            for (t, v) in targets.iter().zip(&fh) {
                assert!((v - gauss(t)).norm() < 1e-10 * gauss(t).max(1e-3), "κ={kappa:?} t={t:?}: {v}");
            }
        }
    }

    #[test]
    fn classical_cosine_modulated_gaussian() {
        // ∫ e^{−x²/2} cos x e^{−ixy} dx /√(2π) = (e^{−(y−1)²/2} + e^{−(y+1)²/2})/2
        let m = Multiplicity::zero(1);
        let g = GridFunction::from_fn(&m, spec(), |p| gauss(p) * p[0].cos()).unwrap();
        for &y in &[0.0, 0.5, 1.3, 3.0] {
            let v = dunkl_transform(&g, &[vec![y]]).unwrap()[0];
            let expected = 0.5 * ((-(y - 1.0f64).powi(2) / 2.0).exp() + (-(y + 1.0f64).powi(2) / 2.0).exp());
            assert!((v.re - expected).abs() < 1e-12 && v.im.abs() < 1e-12);
        }
    }

    #[test]
    fn grid_and_scattered_paths_agree() {
        let m = make_multiplicity(2, &[0.5, 1.0]).unwrap();
        let s = GridSpec::new(8.0, 2, 10);
        let f = GridFunction::from_fn(&m, s, |p| gauss(p) * (1.0 + p[0] - 0.3 * p[1] * p[1])).unwrap();
        let fg = dunkl_transform_grid(&f, s).unwrap();
        let pts: Vec<Vec<f64>> = [3usize, 100, 777].iter().map(|&k| fg.point(k)).collect();
        let fs = dunkl_transform(&f, &pts).unwrap();
        for (k, v) in [3usize, 100, 777].iter().zip(&fs) {
            assert!((fg.values[*k] - v).norm() < 1e-13);
        }
    }

    #[test]
    fn round_trip_odd_gaussian() {
        let m = make_multiplicity(2, &[1.0, 0.5]).unwrap();
        let f = GridFunction::from_fn(&m, spec(), |p| gauss(p) * p[0]).unwrap();
        let fh = dunkl_transform_grid(&f, spec()).unwrap();
        let pts = vec![vec![0.3, -1.2], vec![2.0, 0.1]];
        let back = inverse_dunkl_transform(&fh, &pts).unwrap();
        for (p, v) in pts.iter().zip(&back) {
            assert!((v.re - gauss(p) * p[0]).abs() < 1e-8 && v.im.abs() < 1e-8);
        }
    }

    #[test]
    fn hankel_gaussian_and_round_trip() {
        let m = make_multiplicity(2, &[0.5, 1.0]).unwrap();
        let p = RadialProfile::auto(Arc::new(|r: f64| (-r * r / 2.0).exp()), &m, &[]).unwrap();
        for &alpha in &[-0.5, 0.0, 1.7, 4.0] {
            let s = [0.0, 0.5, 2.0, 5.0];
            let h = hankel_transform(&p, alpha, &s).unwrap();
            for (&si, &hi) in s.iter().zip(&h) {
                assert!((hi - (-si * si / 2.0).exp()).abs() < 1e-10, "α={alpha} s={si}: {hi}");
            }
        }
        assert!(hankel_transform(&p, -0.6, &[1.0]).is_err());
        // round trip on (1+r²)e^{−r²}
        let f0 = |r: f64| (1.0 + r * r) * (-r * r).exp();
        let q = RadialProfile::auto(Arc::new(f0), &m, &[]).unwrap();
        let sgrid = RadialProfile::auto(Arc::new(|r: f64| (-r * r / 8.0).exp()), &m, &[]).unwrap();
        // inverse by quadrature on nodes carrying the weight s^{2α+1}
        let rule = HalfLineRule::with_breaks(2.0 * 1.3 + 1.0, &sgrid.breaks, sgrid.per_panel).unwrap();
        let h = hankel_transform(&q, 1.3, &rule.nodes).unwrap();
        for &r in &[0.2, 1.0, 2.5] {
            let inv: f64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .zip(&h)
                .map(|((&s, &w), &hs)| w * hs * normalized_bessel(1.3, r * s).unwrap())
                .sum();
            assert!((inv - f0(r)).abs() < 1e-9, "r={r}: {inv} vs {}", f0(r));
        }
    }

    #[test]
    fn derivative_property() {
        let m = make_multiplicity(1, &[0.8]).unwrap();
        let f = |p: &[f64]| (-(p[0] - 0.4).powi(2)).exp();
        let df = GridFunction::from_fn(&m, spec(), |p| dunkl_derivative_z2d(f, &m, 0, p).unwrap()).unwrap();
        let g = GridFunction::from_fn(&m, spec(), f).unwrap();
        let ys: Vec<Vec<f64>> = [0.0, 0.7, 2.2, -3.1].iter().map(|&y| vec![y]).collect();
        let a = dunkl_transform(&df, &ys).unwrap();
        let b = dunkl_transform(&g, &ys).unwrap();
        for ((y, a), b) in ys.iter().zip(&a).zip(&b) {
            let expected = Complex64::new(0.0, y[0]) * b;
            assert!((a - expected).norm() < 1e-7, "y={y:?}: {a} vs {expected}");
        }
    }

    #[test]
    fn norms_and_plancherel() {
        let m = make_multiplicity(2, &[0.5, 2.5]).unwrap();
        let one = GridFunction::from_fn(&m, GridSpec::new(2.0, 1, 8), |_| 1.0).unwrap();
        let v = (m.c_h * one.box_volume()).powf(1.0 / 3.0);
        assert!((lp_norm(&one, 3.0).unwrap() - v).abs() < 1e-12 * v);
        assert_eq!(lp_norm(&one, f64::INFINITY).unwrap(), 1.0);
        assert!(lp_norm(&one, 0.9).is_err());
        let g = GridFunction::from_fn(&m, spec(), |p| gauss(p) * (1.0 + p[1]).sin()).unwrap();
        assert!(plancherel_defect(&g).unwrap() < 1e-9);
        let z = GridFunction::from_fn(&m, spec(), |_| 0.0).unwrap();
        assert!(plancherel_defect(&z).is_err());
    }
}
