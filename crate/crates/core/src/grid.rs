//! Sampled functions on weighted tensor grids and radial profiles.

use std::fmt;
use std::io::{BufRead, Write};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, DunklError, Result};
use crate::multiplicity::Multiplicity;
use crate::quadrature::{AxisRule, HalfLineRule};

/// Per-axis discretisation shared by all axes: `[−x_max, x_max]` split at 0
/// into `2·panels` panels of `per_panel` Gauss nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_max: f64,
    pub panels: usize,
    pub per_panel: usize,
}

impl GridSpec {
    pub fn new(x_max: f64, panels: usize, per_panel: usize) -> Self {
        GridSpec { x_max, panels, per_panel }
    }

    pub fn axes(&self, mult: &Multiplicity) -> Result<Vec<AxisRule>> {
        mult.kappa
            .iter()
            .map(|&k| AxisRule::new(k, self.x_max, self.panels, self.per_panel))
            .collect()
    }

    /// Nodes per axis.
    pub fn axis_len(&self) -> usize {
        2 * self.panels * self.per_panel
    }
}

/// Samples on the tensor grid of `axes`, stored row-major (axis 0 slowest),
/// with `quad_weights[k] = ∏ w_{k_i}` approximating `h²(x)dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub mult: Multiplicity,
    pub spec: GridSpec,
    pub axes: Vec<AxisRule>,
    pub values: Vec<Complex64>,
    pub quad_weights: Vec<f64>,
}

/// Row-major strides for a shape.
pub(crate) fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for i in (0..shape.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * shape[i + 1];
    }
    s
}

/// Calls `visit(flat_index, point)` for every node of the tensor grid.
pub(crate) fn for_each_point<F: FnMut(usize, &[f64])>(axes: &[Vec<f64>], mut visit: F) {
    let d = axes.len();
    let total: usize = axes.iter().map(|a| a.len()).product();
    if total == 0 {
        return;
    }
    let mut idx = vec![0usize; d];
    let mut p: Vec<f64> = axes.iter().map(|a| a[0]).collect();
    for flat in 0..total {
        visit(flat, &p);
        for axis in (0..d).rev() {
            idx[axis] += 1;
            if idx[axis] < axes[axis].len() {
                p[axis] = axes[axis][idx[axis]];
                break;
            }
            idx[axis] = 0;
            p[axis] = axes[axis][0];
        }
    }
}

impl GridFunction {
    fn build(mult: &Multiplicity, spec: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        let axes = spec.axes(mult)?;
        let node_sets: Vec<Vec<f64>> = axes.iter().map(|a| a.weights.clone()).collect();
        let mut quad_weights = vec![0.0; values.len()];
        for_each_point(&node_sets, |k, w| quad_weights[k] = w.iter().product());
        check_dim(quad_weights.len(), values.len())?;
        Ok(GridFunction { mult: mult.clone(), spec, axes, values, quad_weights })
    }

    /// Samples a complex function.
    pub fn from_complex_fn<F: Fn(&[f64]) -> Complex64>(mult: &Multiplicity, spec: GridSpec, f: F) -> Result<Self> {
        let axes = spec.axes(mult)?;
        let nodes: Vec<Vec<f64>> = axes.iter().map(|a| a.nodes.clone()).collect();
        let total: usize = nodes.iter().map(|a| a.len()).product();
        let mut values = vec![Complex64::new(0.0, 0.0); total];
        for_each_point(&nodes, |k, p| values[k] = f(p));
        Self::build(mult, spec, values)
    }

    /// Samples a real function.
    pub fn from_fn<F: Fn(&[f64]) -> f64>(mult: &Multiplicity, spec: GridSpec, f: F) -> Result<Self> {
        Self::from_complex_fn(mult, spec, |p| Complex64::new(f(p), 0.0))
    }

    /// Same grid, new values.
    pub fn with_values(&self, values: Vec<Complex64>) -> Result<Self> {
        check_dim(self.values.len(), values.len())?;
        Ok(GridFunction { values, ..self.clone() })
    }

    pub fn map<F: Fn(&[f64], Complex64) -> Complex64>(&self, f: F) -> Self {
        let nodes = self.node_sets();
        let mut values = self.values.clone();
        for_each_point(&nodes, |k, p| values[k] = f(p, self.values[k]));
        GridFunction { values, ..self.clone() }
    }

    pub fn dim(&self) -> usize {
        self.mult.d
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.len()).collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn node_sets(&self) -> Vec<Vec<f64>> {
        self.axes.iter().map(|a| a.nodes.clone()).collect()
    }

    /// Coordinates of the node with flat index `k`.
    pub fn point(&self, k: usize) -> Vec<f64> {
        let shape = self.shape();
        let st = strides(&shape);
        (0..self.dim()).map(|i| self.axes[i].nodes[(k / st[i]) % shape[i]]).collect()
    }

    /// All node coordinates in storage order.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(self.len());
        for_each_point(&self.node_sets(), |_, p| out.push(p.to_vec()));
        out
    }

    /// Flat index of the mirror image of node k under the sign flips in `mask`
    /// (bit i set flips axis i). Exact because axes are mirror symmetric.
    pub fn reflected_index(&self, k: usize, mask: usize) -> usize {
        let shape = self.shape();
        let st = strides(&shape);
        let mut out = 0;
        for i in 0..self.dim() {
            let mut c = (k / st[i]) % shape[i];
            if mask >> i & 1 == 1 {
                c = shape[i] - 1 - c;
            }
            out += c * st[i];
        }
        out
    }

    /// `Σ f_k w_k`, the grid value of `∫ f h² dx` (no `c_h`).
    pub fn integral(&self) -> Complex64 {
        self.values.iter().zip(&self.quad_weights).map(|(v, &w)| v * w).sum()
    }

    /// `∫_{box} h² dx` in closed form.
    pub fn box_volume(&self) -> f64 {
        self.mult
            .kappa
            .iter()
            .map(|&k| 2.0 * self.spec.x_max.powf(2.0 * k + 1.0) / (2.0 * k + 1.0))
            .product()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest |f| on the outermost node layer divided by the overall maximum.
    pub fn boundary_ratio(&self) -> f64 {
        let shape = self.shape();
        let st = strides(&shape);
        let mut edge: f64 = 0.0;
        for (k, v) in self.values.iter().enumerate() {
            let on_edge = (0..self.dim()).any(|i| {
                let c = (k / st[i]) % shape[i];
                c == 0 || c == shape[i] - 1
            });
            if on_edge {
                edge = edge.max(v.norm());
            }
        }
        let top = self.sup_norm();
        if top == 0.0 {
            0.0
        } else {
            edge / top
        }
    }

    /// Largest |f| on nodes with some |x_i| ≥ `frac·x_max`, relative to the maximum.
    pub fn shell_ratio(&self, frac: f64) -> f64 {
        let cut = frac * self.spec.x_max;
        let mut shell: f64 = 0.0;
        for_each_point(&self.node_sets(), |k, p| {
            if p.iter().any(|x| x.abs() >= cut) {
                shell = shell.max(self.values[k].norm());
            }
        });
        let top = self.sup_norm();
        if top == 0.0 {
            0.0
        } else {
            shell / top
        }
    }

    /// Logs a warning when the samples have not decayed at the boundary.
    pub fn warn_if_not_decayed(&self, op: &str, tol: f64) -> bool {
        let r = self.boundary_ratio();
        if r > tol {
            log::warn!("{op}: boundary/max ratio {r:.3e} exceeds {tol:.1e}; truncation may bias results");
            false
        } else {
            true
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        GridFunction { values: self.values.iter().map(|v| v * c).collect(), ..self.clone() }
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(GridFunction {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn abs(&self) -> Self {
        GridFunction {
            values: self.values.iter().map(|v| Complex64::new(v.norm(), 0.0)).collect(),
            ..self.clone()
        }
    }

    pub fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if !self.mult.same_as(&other.mult) {
            return Err(DunklError::MultiplicityMismatch);
        }
        if self.spec != other.spec {
            return Err(DunklError::Hypothesis("operands live on different grids".into()));
        }
        Ok(())
    }

    /// Header written before the CSV rows.
    pub fn header(&self) -> GridHeader {
        GridHeader {
            dimension: self.dim(),
            kappa: self.mult.kappa.clone(),
            truncation: self.spec.x_max,
            panels: self.spec.panels,
            per_panel: self.spec.per_panel,
            shape: self.shape(),
        }
    }

    /// Writes `# {json header}` followed by CSV columns `x1..xd,re,im`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut out = out;
        writeln!(out, "# {}", serde_json::to_string(&self.header()).map_err(|e| DunklError::Format(e.to_string()))?)?;
        let mut w = csv::Writer::from_writer(out);
        let mut cols: Vec<String> = (1..=self.dim()).map(|i| format!("x{i}")).collect();
        cols.push("re".into());
        cols.push("im".into());
        w.write_record(&cols).map_err(csv_err)?;
        let mut result = Ok(());
        for_each_point(&self.node_sets(), |k, p| {
            if result.is_err() {
                return;
            }
            let mut rec: Vec<String> = p.iter().map(|x| format!("{x:e}")).collect();
            rec.push(format!("{:e}", self.values[k].re));
            rec.push(format!("{:e}", self.values[k].im));
            result = w.write_record(&rec).map_err(csv_err);
        });
        result?;
        w.flush()?;
        Ok(())
    }

    /// Reads the format produced by [`GridFunction::write_csv`], checking that
    /// the node coordinates match the grid the header describes.
    /// Other `#` lines before the header are skipped.
    pub fn read_csv<R: BufRead>(mut input: R) -> Result<Self> {
        let h: GridHeader = loop {
            let mut line = String::new();
            if input.read_line(&mut line)? == 0 {
                return Err(DunklError::Format("missing '# {json}' header line".into()));
            }
            let comment = line
                .strip_prefix('#')
                .ok_or_else(|| DunklError::Format("missing '# {json}' header line".into()))?;
            if let Ok(h) = serde_json::from_str(comment.trim()) {
                break h;
            }
        };
        let mult = crate::multiplicity::make_multiplicity(h.dimension, &h.kappa)?;
        let spec = GridSpec::new(h.truncation, h.panels, h.per_panel);
        let template = GridFunction::from_fn(&mult, spec, |_| 0.0)?;
        if template.shape() != h.shape {
            return Err(DunklError::Format(format!("header shape {:?} inconsistent with grid", h.shape)));
        }
        let points = template.points();
        let mut rdr = csv::Reader::from_reader(input);
        let mut values = Vec::with_capacity(template.len());
        for (k, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            if rec.len() != h.dimension + 2 || k >= points.len() {
                return Err(DunklError::Format(format!("row {k}: unexpected shape")));
            }
            let num = |j: usize| -> Result<f64> {
                rec[j].trim().parse::<f64>().map_err(|e| DunklError::Format(format!("row {k}: {e}")))
            };
            for i in 0..h.dimension {
                let x = num(i)?;
                if (x - points[k][i]).abs() > 1e-12 * (1.0 + x.abs()) {
                    return Err(DunklError::Format(format!("row {k}: node {x} does not match grid")));
                }
            }
            values.push(Complex64::new(num(h.dimension)?, num(h.dimension + 1)?));
        }
        check_dim(template.len(), values.len())?;
        template.with_values(values)
    }
}

fn csv_err(e: csv::Error) -> DunklError {
    DunklError::Format(e.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridHeader {
    pub dimension: usize,
    pub kappa: Vec<f64>,
    pub truncation: f64,
    pub panels: usize,
    pub per_panel: usize,
    pub shape: Vec<usize>,
}

pub type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A radial function `f(x) = f₀(|x|)` with a rule for `∫_0^{R} g(r) r^{2λ+1} dr`.
#[derive(Clone)]
pub struct RadialProfile {
    pub f0: Profile,
    pub mult: Multiplicity,
    pub breaks: Vec<f64>,
    pub per_panel: usize,
    pub radial_rule: HalfLineRule,
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProfile")
            .field("kappa", &self.mult.kappa)
            .field("r_max", &self.r_max())
            .field("panels", &self.breaks.len())
            .field("per_panel", &self.per_panel)
            .finish()
    }
}

/// Default panel width and Gauss order for radial rules.
const RADIAL_PANEL: f64 = 1.0;
const RADIAL_NODES: usize = 20;

impl RadialProfile {
    /// Profile on `[0, r_max]` with the supplied interior breakpoints (e.g.
    /// the edge of a compact support) merged into unit-width panels.
    pub fn new(f0: Profile, mult: &Multiplicity, r_max: f64, extra_breaks: &[f64]) -> Result<Self> {
        if !(r_max > 0.0) {
            return Err(DunklError::domain("RadialProfile", format!("r_max {r_max} must be positive")));
        }
        let steps = (r_max / RADIAL_PANEL).ceil().max(1.0) as usize;
        let mut breaks: Vec<f64> = (1..=steps).map(|k| r_max * k as f64 / steps as f64).collect();
        breaks.extend(extra_breaks.iter().copied().filter(|&b| b > 0.0 && b < r_max));
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        Self::with_breaks(f0, mult, breaks, RADIAL_NODES)
    }

    pub fn with_breaks(f0: Profile, mult: &Multiplicity, breaks: Vec<f64>, per_panel: usize) -> Result<Self> {
        let radial_rule = HalfLineRule::with_breaks(2.0 * mult.lambda_k + 1.0, &breaks, per_panel)?;
        Ok(RadialProfile { f0, mult: mult.clone(), breaks, per_panel, radial_rule })
    }

    /// Chooses `R_max` as the smallest integer radius past which
    /// `|f₀(r)| r^{2λ+1} < 1e−12` on a sampled window `[R, 2R]`.
    pub fn auto(f0: Profile, mult: &Multiplicity, extra_breaks: &[f64]) -> Result<Self> {
        let p = 2.0 * mult.lambda_k + 1.0;
        let small = |r: f64| (f0(r).abs() * r.powf(p)) < 1e-12;
        let mut r_max = None;
        for r in 1..=400 {
            let r = r as f64;
            if (0..=32).all(|j| small(r * (1.0 + j as f64 / 32.0))) {
                r_max = Some(r);
                break;
            }
        }
        let r_max = r_max.ok_or_else(|| DunklError::Hypothesis("profile does not decay by r = 400".into()))?;
        Self::new(f0, mult, r_max, extra_breaks)
    }

    pub fn r_max(&self) -> f64 {
        *self.breaks.last().expect("nonempty")
    }

    pub fn eval(&self, r: f64) -> f64 {
        (self.f0)(r)
    }

    /// `∫_{ℝ^d} f h² dx = a_κ⁻¹ ∫ f₀(r) r^{2λ+1} dr` (no `c_h`).
    pub fn integral(&self) -> f64 {
        self.radial_rule.integrate(|r| (self.f0)(r)) / self.mult.a_k
    }

    /// `(c_h ∫ |f|^p h²)^{1/p}`, or the sampled maximum for p = ∞.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(DunklError::domain("lp_norm", format!("p = {p} below 1")));
        }
        if p.is_infinite() {
            return Ok(self.radial_rule.nodes.iter().map(|&r| (self.f0)(r).abs()).fold(0.0, f64::max));
        }
        let s = self.radial_rule.integrate(|r| (self.f0)(r).abs().powf(p));
        Ok((self.mult.c_h * s / self.mult.a_k).powf(1.0 / p))
    }

    pub fn to_grid(&self, spec: GridSpec) -> Result<GridFunction> {
        let f0 = self.f0.clone();
        GridFunction::from_fn(&self.mult, spec, move |p| f0(p.iter().map(|x| x * x).sum::<f64>().sqrt()))
    }

    /// Same profile, different function.
    pub fn with_f0(&self, f0: Profile) -> Self {
        RadialProfile { f0, ..self.clone() }
    }
}

/// Euclidean norm.
pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiplicity::make_multiplicity;
    use crate::special::gamma_fn;
    use approx::assert_relative_eq;

    fn gauss_profile(m: &Multiplicity) -> RadialProfile {
        RadialProfile::auto(Arc::new(|r: f64| (-r * r / 2.0).exp()), m, &[]).unwrap()
    }

    #[test]
    fn box_volume_matches_quadrature() {
        let m = make_multiplicity(2, &[0.5, 2.5]).unwrap();
        let g = GridFunction::from_fn(&m, GridSpec::new(3.0, 2, 8), |_| 1.0).unwrap();
        assert_relative_eq!(g.integral().re, g.box_volume(), max_relative = 1e-12);
        assert_eq!(g.shape(), vec![32, 32]);
    }

    #[test]
    fn points_and_reflections() {
        let m = make_multiplicity(2, &[0.5, 1.0]).unwrap();
        let g = GridFunction::from_fn(&m, GridSpec::new(2.0, 1, 3), |p| p[0] + 10.0 * p[1]).unwrap();
        for k in 0..g.len() {
            let p = g.point(k);
            assert_eq!(g.values[k].re, p[0] + 10.0 * p[1]);
            let r = g.reflected_index(k, 0b10);
            let q = g.point(r);
            assert_eq!(q, vec![p[0], -p[1]]);
        }
    }

    #[test]
    fn radial_rule_gaussian_constant() {
        for kappa in [vec![0.0], vec![0.5], vec![1.0, 0.5], vec![0.0, 2.5, 1.0]] {
            let m = make_multiplicity(kappa.len(), &kappa).unwrap();
            let p = gauss_profile(&m);
            // c_h ∫ e^{−|x|²/2} h² = 1
            assert_relative_eq!(m.c_h * p.integral(), 1.0, max_relative = 1e-10);
            let expected = 2f64.powf(m.lambda_k) * gamma_fn(m.lambda_k + 1.0).unwrap();
            assert_relative_eq!(p.radial_rule.integrate(|r| (-r * r / 2.0).exp()), expected, max_relative = 1e-10);
        }
    }

    #[test]
    fn auto_radius_respects_decay() {
        let m = make_multiplicity(1, &[1.0]).unwrap();
        let p = RadialProfile::auto(Arc::new(|r: f64| (-r).exp()), &m, &[]).unwrap();
        let rm = p.r_max();
        assert!((-rm).exp() * rm.powi(2) < 1e-12);
        assert!((-(rm - 1.0)).exp() * (rm - 1.0).powi(2) >= 1e-12);
    }

    #[test]
    fn csv_round_trip() {
        let m = make_multiplicity(2, &[0.5, 0.0]).unwrap();
        let g = GridFunction::from_complex_fn(&m, GridSpec::new(2.0, 1, 3), |p| Complex64::new(p[0], p[1] * p[1])).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let back = GridFunction::read_csv(std::io::BufReader::new(&buf[..])).unwrap();
        assert_eq!(back.values, g.values);
        assert_eq!(back.mult, g.mult);
        let text = String::from_utf8(buf).unwrap();
        let broken = text.replacen("\"truncation\":2.0", "\"truncation\":2.5", 1);
        assert!(GridFunction::read_csv(std::io::BufReader::new(broken.as_bytes())).is_err());
    }

    #[test]
    fn radial_norms() {
        let m = make_multiplicity(2, &[0.5, 1.0]).unwrap();
        let p = gauss_profile(&m);
        // ‖e^{−r²/2}‖₂² = c_h ∫ e^{−r²} h² = 2^{−(λ+1)}
        let n2 = p.lp_norm(2.0).unwrap();
        assert_relative_eq!(n2 * n2, 2f64.powf(-(m.lambda_k + 1.0)), max_relative = 1e-10);
        assert_relative_eq!(p.lp_norm(1.0).unwrap(), 1.0, max_relative = 1e-10);
        assert!(p.lp_norm(0.5).is_err());
    }
}
