//! Quadrature rules: Gauss-Jacobi on [−1,1], the Φ_κ measure of the
//! intertwining operator, weighted half-line and symmetric axis rules, and
//! sphere rules carrying the weight h² for d ≤ 3.

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::beta::beta_reg;

use crate::error::{DunklError, Result};
use crate::multiplicity::{jacobi_normalization, Multiplicity};
use crate::special::ln_gamma;

/// Nodes and weights of the n-point Gauss rule for `(1−u)^α (1+u)^β` on
/// [−1,1]. Nodes ascend. Computed by Golub-Welsch and polished by Newton's
/// method on the Jacobi polynomial, with weights from the Christoffel formula.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(DunklError::Empty("gauss_jacobi order"));
    }
    if !(alpha > -1.0 && beta > -1.0) {
        return Err(DunklError::domain("gauss_jacobi", format!("exponents ({alpha}, {beta}) must exceed -1")));
    }
    let ab = alpha + beta;
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let diag = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        jac[(k, k)] = diag;
        if k + 1 < n {
            let m = kf + 1.0;
            let b2 = if k == 0 {
                4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                let s = 2.0 * m + ab;
                4.0 * m * (m + alpha) * (m + beta) * (m + ab) / (s * s * (s + 1.0) * (s - 1.0))
            };
            let b = b2.sqrt();
            jac[(k, k + 1)] = b;
            jac[(k + 1, k)] = b;
        }
    }
    let eig = SymmetricEigen::new(jac);
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let nf = n as f64;
    let ln_c = (ab + 1.0) * 2f64.ln() + ln_gamma(nf + alpha + 1.0)? + ln_gamma(nf + beta + 1.0)?
        - ln_gamma(nf + ab + 1.0)?
        - ln_gamma(nf + 1.0)?;
    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = jacobi_p_and_derivative(n, alpha, beta, *x);
            let step = p / dp;
            let next = *x - step;
            if next > -1.0 && next < 1.0 {
                *x = next;
            }
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = jacobi_p_and_derivative(n, alpha, beta, *x);
        weights.push((ln_c - ((1.0 - *x * *x) * dp * dp).ln()).exp());
    }
    Ok((nodes, weights))
}

fn jacobi_p(n: usize, alpha: f64, beta: f64, x: f64) -> f64 {
    let ab = alpha + beta;
    let mut p0 = 1.0;
    if n == 0 {
        return p0;
    }
    let mut p1 = (alpha + 1.0) + (ab + 2.0) * (x - 1.0) / 2.0;
    for k in 2..=n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        let a1 = 2.0 * kf * (kf + ab) * (s - 2.0);
        let a2 = (s - 1.0) * (s * (s - 2.0) * x + alpha * alpha - beta * beta);
        let a3 = 2.0 * (kf + alpha - 1.0) * (kf + beta - 1.0) * s;
        let p2 = (a2 * p1 - a3 * p0) / a1;
        p0 = p1;
        p1 = p2;
    }
    p1
}

fn jacobi_p_and_derivative(n: usize, alpha: f64, beta: f64, x: f64) -> (f64, f64) {
    let p = jacobi_p(n, alpha, beta, x);
    let dp = 0.5 * (n as f64 + alpha + beta + 1.0) * jacobi_p(n - 1, alpha + 1.0, beta + 1.0, x);
    (p, dp)
}

/// Gauss rule for the probability measure `Φ_κ(u)du = b_κ(1+u)(1−u²)^{κ−1}du`.
///
/// Weights absorb the whole density, so `Σ w_k g(u_k) ≈ ∫ g Φ_κ`, exact for
/// polynomials of degree `2·order − 1`. For κ = 0 the measure is the point
/// mass at u = 1 and the rule is that single atom.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiRule {
    pub kappa: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub order: usize,
}

pub const DEFAULT_JACOBI_ORDER: usize = 64;

impl JacobiRule {
    pub fn new(kappa: f64, order: usize) -> Result<Self> {
        if !(kappa >= 0.0) {
            return Err(DunklError::domain("JacobiRule", format!("kappa {kappa} must be nonnegative")));
        }
        if kappa == 0.0 {
            return Ok(JacobiRule { kappa, nodes: vec![1.0], weights: vec![1.0], order: 1 });
        }
        let (nodes, mut weights) = gauss_jacobi(order, kappa - 1.0, kappa)?;
        // Φ_κ is a probability measure; normalising by the computed sum
        // removes the rounding of b_κ and the Christoffel weights
        let total: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= total;
        }
        Ok(JacobiRule { kappa, nodes, weights, order })
    }

    /// One rule per axis of `mult`.
    pub fn for_multiplicity(mult: &Multiplicity, order: usize) -> Result<Vec<Self>> {
        mult.kappa.iter().map(|&k| JacobiRule::new(k, order)).collect()
    }

    pub fn is_atomic(&self) -> bool {
        self.kappa == 0.0
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut g: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&u, &w)| w * g(u)).sum()
    }

    /// Moment `∫ u^k Φ_κ(u) du` in closed form (Beta integrals).
    pub fn exact_moment(kappa: f64, k: u32) -> f64 {
        if kappa == 0.0 {
            return 1.0;
        }
        // ∫ u^m (1−u²)^{κ−1} du = B((m+1)/2, κ) for even m, zero for odd m
        let even = |m: u32| -> f64 {
            if m % 2 == 1 {
                0.0
            } else {
                let a = (m as f64 + 1.0) / 2.0;
                (ln_gamma(a).unwrap() + ln_gamma(kappa).unwrap() - ln_gamma(a + kappa).unwrap()).exp()
            }
        };
        jacobi_normalization(kappa).unwrap() * (even(k) + even(k + 1))
    }
}

/// `P(U ≥ z)` for U distributed as Φ_κ, in closed form through the
/// regularised incomplete Beta function.
pub fn phi_survival(kappa: f64, z: f64) -> f64 {
    if z <= -1.0 {
        return 1.0;
    }
    if kappa == 0.0 {
        return if z <= 1.0 { 1.0 } else { 0.0 };
    }
    if z >= 1.0 {
        return 0.0;
    }
    let z2 = z * z;
    // symmetric part: U² ~ Beta(1/2, κ); odd part integrates in closed form
    let sym = if z2 == 0.0 { 0.0 } else { beta_reg(0.5, kappa, z2) };
    let sym_tail = 0.5 * (1.0 - z.signum() * sym);
    let b = jacobi_normalization(kappa).unwrap();
    sym_tail + b * (1.0 - z2).powf(kappa) / (2.0 * kappa)
}

/// Rule for `∫_0^X g(x) x^p dx` on composite panels. The panel touching 0
/// carries the weight `x^p` exactly through Gauss-Jacobi, the others use
/// Gauss-Legendre with `x^p` folded into the weights. Nodes never equal 0.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfLineRule {
    pub power: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl HalfLineRule {
    /// Panels with the given ascending breakpoints `0 < b_1 < … < b_m = X`.
    pub fn with_breaks(power: f64, breaks: &[f64], per_panel: usize) -> Result<Self> {
        if !(power > -1.0) {
            return Err(DunklError::domain("HalfLineRule", format!("power {power} must exceed -1")));
        }
        if breaks.is_empty() || per_panel == 0 {
            return Err(DunklError::Empty("HalfLineRule panels"));
        }
        let (ju, jw) = gauss_jacobi(per_panel, 0.0, power)?;
        let (lu, lw) = gauss_jacobi(per_panel, 0.0, 0.0)?;
        let mut nodes = Vec::with_capacity(breaks.len() * per_panel);
        let mut weights = Vec::with_capacity(nodes.capacity());
        let mut lo = 0.0;
        for (i, &hi) in breaks.iter().enumerate() {
            if !(hi > lo) {
                return Err(DunklError::domain("HalfLineRule", "breakpoints must increase"));
            }
            let half = 0.5 * (hi - lo);
            if i == 0 {
                let scale = half.powf(power + 1.0);
                for (&u, &w) in ju.iter().zip(&jw) {
                    nodes.push(half * (1.0 + u));
                    weights.push(scale * w);
                }
            } else {
                for (&u, &w) in lu.iter().zip(&lw) {
                    let x = lo + half * (1.0 + u);
                    nodes.push(x);
                    weights.push(half * w * x.powf(power));
                }
            }
            lo = hi;
        }
        Ok(HalfLineRule { power, nodes, weights })
    }

    /// `panels` equal panels on [0, X].
    pub fn uniform(power: f64, x_max: f64, panels: usize, per_panel: usize) -> Result<Self> {
        let breaks: Vec<f64> = (1..=panels).map(|k| x_max * k as f64 / panels as f64).collect();
        Self::with_breaks(power, &breaks, per_panel)
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut g: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * g(x)).sum()
    }
}

/// Symmetric rule on [−X, X] for `∫ g(x)|x|^{2κ} dx`: a half-line rule and
/// its exact mirror image. Nodes ascend and satisfy `x_{n−1−k} = −x_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisRule {
    pub kappa: f64,
    pub x_max: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl AxisRule {
    pub fn new(kappa: f64, x_max: f64, panels: usize, per_panel: usize) -> Result<Self> {
        if !(x_max > 0.0) {
            return Err(DunklError::domain("AxisRule", format!("half-width {x_max} must be positive")));
        }
        let half = HalfLineRule::uniform(2.0 * kappa, x_max, panels, per_panel)?;
        let n = half.nodes.len();
        let mut nodes = Vec::with_capacity(2 * n);
        let mut weights = Vec::with_capacity(2 * n);
        for k in (0..n).rev() {
            nodes.push(-half.nodes[k]);
            weights.push(half.weights[k]);
        }
        nodes.extend_from_slice(&half.nodes);
        weights.extend_from_slice(&half.weights);
        Ok(AxisRule { kappa, x_max, nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Points on the unit sphere with weights for `∫_S g h² dω` (so the weights
/// sum to `1/a_κ`). Built orthant by orthant in the coordinates `u_i = y_i²`,
/// where the weight becomes a Dirichlet density handled by Gauss-Jacobi.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereRule {
    pub d: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn new(mult: &Multiplicity, order: usize) -> Result<Self> {
        let k = &mult.kappa;
        // orthant rule in u-coordinates: list of (u, weight)
        let orthant: Vec<(Vec<f64>, f64)> = match mult.d {
            1 => vec![(vec![1.0], 1.0)],
            2 => {
                let (a1, a2) = (k[0] - 0.5, k[1] - 0.5);
                let (s, w) = gauss_jacobi(order, a2, a1)?;
                let scale = 0.5 * 2f64.powf(-a1 - a2 - 1.0);
                s.iter()
                    .zip(&w)
                    .map(|(&s, &w)| {
                        let u1 = 0.5 * (1.0 + s);
                        (vec![u1, 1.0 - u1], scale * w)
                    })
                    .collect()
            }
            3 => {
                let (a1, a2, a3) = (k[0] - 0.5, k[1] - 0.5, k[2] - 0.5);
                let bv = a2 + a3 + 1.0;
                let (sv, wv) = gauss_jacobi(order, bv, a1)?;
                let (sw, ww) = gauss_jacobi(order, a3, a2)?;
                let scale = 0.25 * 2f64.powf(-a1 - bv - 1.0) * 2f64.powf(-a2 - a3 - 1.0);
                let mut out = Vec::with_capacity(order * order);
                for (&tv, &wv) in sv.iter().zip(&wv) {
                    let v = 0.5 * (1.0 + tv);
                    for (&tw, &ww) in sw.iter().zip(&ww) {
                        let w = 0.5 * (1.0 + tw);
                        out.push((vec![v, (1.0 - v) * w, (1.0 - v) * (1.0 - w)], scale * wv * ww));
                    }
                }
                out
            }
            d => {
                return Err(DunklError::domain("SphereRule", format!("dimension {d} unsupported (1, 2 or 3)")));
            }
        };
        let d = mult.d;
        let mut points = Vec::with_capacity(orthant.len() << d);
        let mut weights = Vec::with_capacity(points.capacity());
        for (u, w) in &orthant {
            let y: Vec<f64> = u.iter().map(|&ui| ui.max(0.0).sqrt()).collect();
            for signs in 0..(1usize << d) {
                let p: Vec<f64> = (0..d)
                    .map(|i| if signs >> i & 1 == 1 { -y[i] } else { y[i] })
                    .collect();
                points.push(p);
                weights.push(*w);
            }
        }
        Ok(SphereRule { d, points, weights })
    }

    pub fn integrate<F: FnMut(&[f64]) -> f64>(&self, mut g: F) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, &w)| w * g(p)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiplicity::make_multiplicity;
    use crate::special::gamma_fn;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn legendre_small_orders() {
        let (x, w) = gauss_jacobi(2, 0.0, 0.0).unwrap();
        assert_relative_eq!(x[1], 1.0 / 3f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(w[0], 1.0, max_relative = 1e-14);
        let (x, w) = gauss_jacobi(1, 0.0, 0.0).unwrap();
        assert_eq!(x, vec![0.0]);
        assert_relative_eq!(w[0], 2.0, max_relative = 1e-15);
    }

    #[test]
    fn chebyshev_first_kind() {
        // α = β = −½: nodes cos((2k−1)π/2n), equal weights π/n
        let n = 9;
        let (x, w) = gauss_jacobi(n, -0.5, -0.5).unwrap();
        for k in 0..n {
            let expected = -(((2 * k + 1) as f64) * std::f64::consts::PI / (2 * n) as f64).cos();
            assert!((x[k] - expected).abs() < 1e-14);
            assert_relative_eq!(w[k], std::f64::consts::PI / n as f64, max_relative = 1e-12);
        }
    }

    #[test]
    fn jacobi_rule_moments_exact() {
        for &kappa in &[0.05, 0.5, 1.0, 2.5, 7.0] {
            let rule = JacobiRule::new(kappa, 12).unwrap();
            assert_relative_eq!(rule.integrate(|_| 1.0), 1.0, max_relative = 1e-12);
            for k in 0..(2 * 12) as u32 {
                let got = rule.integrate(|u| u.powi(k as i32));
                let expected = JacobiRule::exact_moment(kappa, k);
                assert!((got - expected).abs() < 1e-12, "κ={kappa} k={k}: {got} vs {expected}");
            }
            // first moment gives V x = x/(2κ+1)
            assert_relative_eq!(rule.integrate(|u| u), 1.0 / (2.0 * kappa + 1.0), max_relative = 1e-12);
        }
    }

    #[test]
    fn high_order_rule_is_stable() {
        let rule = JacobiRule::new(0.3, 200).unwrap();
        assert_relative_eq!(rule.integrate(|_| 1.0), 1.0, max_relative = 1e-12);
        assert!(rule.weights.iter().all(|&w| w > 0.0));
        assert!(rule.nodes.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn atomic_rule() {
        let rule = JacobiRule::new(0.0, 64).unwrap();
        assert!(rule.is_atomic());
        assert_eq!(rule.integrate(|u| u * 3.0), 3.0);
    }

    #[test]
    fn survival_against_reference() {
        // (κ, z, ∫_z^1 Φ_κ) at 30 digits, after w = (1−u)^κ removes the endpoint singularity
        let table: &[(f64, f64, f64)] = &[
            (0.2, -0.9, 0.99507403251901253),
            (0.2, -0.3, 0.94042300088195374),
            (0.2, 0.0, 0.89880975235242381),
            (0.2, 0.4, 0.81834684572250078),
            (0.2, 0.95, 0.50284218655062678),
            (0.5, -0.9, 0.99518176953180144),
            (0.5, -0.3, 0.90063496264996242),
            (0.5, 0.0, 0.81830988618379067),
            (0.5, 0.4, 0.66074594914354514),
            (0.5, 0.95, 0.20047485420866969),
            (1.0, -0.9, 0.9975),
            (1.0, -0.3, 0.8775),
            (1.0, 0.0, 0.75),
            (1.0, 0.4, 0.51),
            (1.0, 0.95, 0.049375),
            (3.0, -0.9, 0.99991359375),
            (3.0, -0.3, 0.88257609375),
            (3.0, 0.0, 0.65625),
            (3.0, 0.4, 0.25569),
            (3.0, 0.95, 0.00029527099609375),
        ];
        for &(kappa, z, expected) in table {
            let got = phi_survival(kappa, z);
            assert!((got - expected).abs() < 1e-13, "κ={kappa} z={z}: {got} vs {expected}");
        }
        assert_eq!(phi_survival(0.0, 0.99), 1.0);
        assert_eq!(phi_survival(0.0, 1.01), 0.0);
        assert_eq!(phi_survival(1.5, -1.0), 1.0);
    }

    #[test]
    fn half_line_moments() {
        // ∫_0^X x^{p+m} dx
        let rule = HalfLineRule::uniform(1.4, 3.0, 3, 10).unwrap();
        for m in 0..8 {
            let got = rule.integrate(|x| x.powi(m));
            let expected = 3f64.powf(1.4 + m as f64 + 1.0) / (1.4 + m as f64 + 1.0);
            assert_relative_eq!(got, expected, max_relative = 1e-13);
        }
    }

    #[test]
    fn axis_rule_is_symmetric() {
        let ax = AxisRule::new(0.5, 9.0, 4, 10).unwrap();
        let n = ax.len();
        for k in 0..n {
            assert_eq!(ax.nodes[k], -ax.nodes[n - 1 - k]);
            assert_eq!(ax.weights[k], ax.weights[n - 1 - k]);
            assert!(ax.nodes[k] != 0.0);
        }
        // ∫ |x| e^{−x²/2} over ℝ = 2
        let v: f64 = ax.nodes.iter().zip(&ax.weights).map(|(x, w)| w * (-x * x / 2.0).exp()).sum();
        assert_relative_eq!(v, 2.0, max_relative = 1e-10);
    }

    #[test]
    fn sphere_rule_total_mass() {
        for kappa in [vec![0.0], vec![2.0], vec![0.0, 0.0], vec![0.5, 1.0], vec![0.3, 0.0, 2.5], vec![0.0; 3]] {
            let m = make_multiplicity(kappa.len(), &kappa).unwrap();
            let rule = SphereRule::new(&m, 10).unwrap();
            assert_relative_eq!(rule.integrate(|_| 1.0), 1.0 / m.a_k, max_relative = 1e-12);
            for p in &rule.points {
                let norm: f64 = p.iter().map(|v| v * v).sum();
                assert!((norm - 1.0).abs() < 1e-14);
            }
        }
        assert!(SphereRule::new(&Multiplicity::zero(4), 4).is_err());
    }

    #[test]
    fn sphere_rule_even_moments() {
        // ∫_S y1² h² dω = 2Γ(κ1+3/2)Γ(κ2+1/2)/Γ(γ+d/2+1)
        let m = make_multiplicity(2, &[0.5, 1.0]).unwrap();
        let rule = SphereRule::new(&m, 8).unwrap();
        let got = rule.integrate(|y| y[0] * y[0]);
        let expected = 2.0 * gamma_fn(2.0).unwrap() * gamma_fn(1.5).unwrap() / gamma_fn(3.5).unwrap();
        assert_relative_eq!(got, expected, max_relative = 1e-12);
        // classical circle: odd moments vanish
        let c = SphereRule::new(&Multiplicity::zero(2), 16).unwrap();
        assert!(c.integrate(|y| y[0] * y[1].powi(3)).abs() < 1e-14);
        assert_relative_eq!(c.integrate(|y| (3.0 * y[0]).cos()), 2.0 * std::f64::consts::PI * crate::special::bessel_j(0.0, 3.0).unwrap(), max_relative = 1e-12);
    }

    proptest! {
        #[test]
        fn weights_positive_and_sum(alpha in -0.95f64..4.0, beta in -0.95f64..4.0, n in 1usize..40) {
            let (x, w) = gauss_jacobi(n, alpha, beta).unwrap();
            let mu0 = ((alpha + beta + 1.0) * 2f64.ln() + ln_gamma(alpha + 1.0).unwrap()
                + ln_gamma(beta + 1.0).unwrap() - ln_gamma(alpha + beta + 2.0).unwrap()).exp();
            let total: f64 = w.iter().sum();
            prop_assert!((total - mu0).abs() <= 1e-11 * mu0);
            prop_assert!(w.iter().all(|&v| v > 0.0));
            prop_assert!(x.iter().all(|&v| v > -1.0 && v < 1.0));
        }

        #[test]
        fn survival_monotone(kappa in 0.05f64..5.0, z1 in -1.0f64..1.0, z2 in -1.0f64..1.0) {
            let (lo, hi) = if z1 < z2 { (z1, z2) } else { (z2, z1) };
            prop_assert!(phi_survival(kappa, lo) + 1e-14 >= phi_survival(kappa, hi));
        }
    }
}
