//! Multiplicity vectors for Z₂^d and the normalisation constants derived
//! from them. Every other module reads its constants from here.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{DunklError, Result};
use crate::special::{gamma_fn, ln_gamma};

/// Multiplicity κ = (κ₁,…,κ_d) for the product weight `h(x)² = ∏|x_i|^{2κ_i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MultiplicitySpec", into = "MultiplicitySpec")]
pub struct Multiplicity {
    pub d: usize,
    pub kappa: Vec<f64>,
    /// γ = Σκ_i
    pub gamma_k: f64,
    /// λ = γ + (d−2)/2
    pub lambda_k: f64,
    /// N = d + 2γ
    pub big_n: f64,
    /// Gaussian normalisation, `c_h ∫ e^{−|x|²/2} h² dx = 1`.
    pub c_h: f64,
    /// Sphere normalisation, `a_κ ∫_S h² dω = 1`.
    pub a_k: f64,
    /// Ball constant: `∫_{B_r} h² = d_κ r^N`.
    pub d_k: f64,
    /// Per-axis constant b of the measure `b(1+u)(1−u²)^{κ−1}du`;
    /// zero on axes with κ_i = 0, whose measure is the point mass at 1.
    pub b_i: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MultiplicitySpec {
    kappa: Vec<f64>,
}

impl TryFrom<MultiplicitySpec> for Multiplicity {
    type Error = DunklError;
    fn try_from(s: MultiplicitySpec) -> Result<Self> {
        make_multiplicity(s.kappa.len(), &s.kappa)
    }
}

impl From<Multiplicity> for MultiplicitySpec {
    fn from(m: Multiplicity) -> Self {
        MultiplicitySpec { kappa: m.kappa }
    }
}

/// `b_κ = Γ(κ+½)/(√π Γ(κ))` for κ > 0.
pub fn jacobi_normalization(kappa: f64) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(DunklError::domain("jacobi_normalization", format!("kappa {kappa} must be positive")));
    }
    // log form keeps large κ finite
    Ok((ln_gamma(kappa + 0.5)? - ln_gamma(kappa)?).exp() / PI.sqrt())
}

/// Builds a multiplicity and all derived constants from closed forms.
pub fn make_multiplicity(d: usize, kappa: &[f64]) -> Result<Multiplicity> {
    if d == 0 {
        return Err(DunklError::domain("make_multiplicity", "dimension must be positive"));
    }
    crate::error::check_dim(d, kappa.len())?;
    if let Some(k) = kappa.iter().find(|k| !(**k >= 0.0) || !k.is_finite()) {
        return Err(DunklError::domain("make_multiplicity", format!("kappa entry {k} must be nonnegative")));
    }
    let gamma_k: f64 = kappa.iter().sum();
    let df = d as f64;
    let lambda_k = gamma_k + (df - 2.0) / 2.0;
    let big_n = df + 2.0 * gamma_k;

    let mut ln_ch_inv = 0.0;
    let mut ln_sphere = 2f64.ln() - ln_gamma(gamma_k + df / 2.0)?;
    for &k in kappa {
        let lg = ln_gamma(k + 0.5)?;
        ln_ch_inv += (k + 0.5) * 2f64.ln() + lg;
        ln_sphere += lg;
    }
    let c_h = (-ln_ch_inv).exp();
    let a_k = (-ln_sphere).exp();
    let d_k = ln_sphere.exp() / big_n;
    let b_i = kappa
        .iter()
        .map(|&k| if k > 0.0 { jacobi_normalization(k) } else { Ok(0.0) })
        .collect::<Result<Vec<_>>>()?;
    Ok(Multiplicity {
        d,
        kappa: kappa.to_vec(),
        gamma_k,
        lambda_k,
        big_n,
        c_h,
        a_k,
        d_k,
        b_i,
    })
}

impl Multiplicity {
    /// Classical (κ = 0) multiplicity in dimension d.
    pub fn zero(d: usize) -> Self {
        make_multiplicity(d, &vec![0.0; d]).expect("zero multiplicity is valid")
    }

    /// `h(x)² = ∏|x_i|^{2κ_i}`.
    pub fn weight_sq(&self, x: &[f64]) -> f64 {
        self.kappa
            .iter()
            .zip(x)
            .map(|(&k, &xi)| if k == 0.0 { 1.0 } else { xi.abs().powf(2.0 * k) })
            .product()
    }

    /// `∫_{B_r} h² dx`.
    pub fn ball_mass(&self, r: f64) -> f64 {
        self.d_k * r.powf(self.big_n)
    }

    /// Constant in the transform pair `e^{−|x|} ↔ c (1+|ξ|²)^{−γ−(d+1)/2}`.
    pub fn poisson_constant(&self) -> f64 {
        let s = self.gamma_k + (self.d as f64 + 1.0) / 2.0;
        2f64.powf(self.gamma_k + self.d as f64 / 2.0) * gamma_fn(s).expect("positive") / PI.sqrt()
    }

    pub fn same_as(&self, other: &Multiplicity) -> bool {
        self.kappa == other.kappa
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn classical_line() {
        let m = make_multiplicity(1, &[0.0]).unwrap();
        assert_eq!(m.lambda_k, -0.5);
        assert_eq!(m.big_n, 1.0);
        assert_relative_eq!(m.c_h, (2.0 * PI).powf(-0.5), max_relative = 1e-14);
        // sphere S⁰ = {±1} has counting measure 2
        assert_relative_eq!(m.a_k, 0.5, max_relative = 1e-14);
        assert_relative_eq!(m.ball_mass(3.0), 6.0, max_relative = 1e-14);
    }

    #[test]
    fn arithmetic_constants() {
        let m = make_multiplicity(2, &[1.0, 1.0]).unwrap();
        assert_eq!(m.gamma_k, 2.0);
        assert_eq!(m.lambda_k, 2.0);
        assert_eq!(m.big_n, 6.0);
    }

    #[test]
    fn half_kappa_line() {
        // ∫|t| e^{−t²/2} dt = 2
        let m = make_multiplicity(1, &[0.5]).unwrap();
        assert_relative_eq!(1.0 / m.c_h, 2.0, max_relative = 1e-13);
        assert_relative_eq!(m.b_i[0], 1.0 / PI.sqrt() / gamma_fn(0.5).unwrap(), max_relative = 1e-13);
    }

    #[test]
    fn classical_plane() {
        let m = Multiplicity::zero(2);
        assert_relative_eq!(1.0 / m.a_k, 2.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(m.d_k, PI, max_relative = 1e-14);
        assert_relative_eq!(m.c_h, 1.0 / (2.0 * PI), max_relative = 1e-14);
    }

    #[test]
    fn gaussian_and_sphere_constants_agree() {
        for kappa in [vec![0.3], vec![0.5, 2.5], vec![1.0, 0.0, 0.7]] {
            let m = make_multiplicity(kappa.len(), &kappa).unwrap();
            let rhs = 2f64.powf(m.lambda_k) * gamma_fn(m.lambda_k + 1.0).unwrap() / m.a_k;
            assert_relative_eq!(1.0 / m.c_h, rhs, max_relative = 1e-12);
            assert_relative_eq!(m.d_k, 1.0 / (m.a_k * m.big_n), max_relative = 1e-12);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(make_multiplicity(1, &[-0.1]).is_err());
        assert!(make_multiplicity(2, &[0.1]).is_err());
        assert!(make_multiplicity(0, &[]).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let m = make_multiplicity(2, &[0.5, 1.0]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        let back: Multiplicity = serde_json::from_str(&s).unwrap();
        assert_eq!(m, back);
        assert!(serde_json::from_str::<Multiplicity>(r#"{"kappa":[-1.0]}"#).is_err());
    }
}
