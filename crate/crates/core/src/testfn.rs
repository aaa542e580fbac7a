//! Named test functions and the fixed smooth suite used by the checks.

use std::sync::Arc;

use crate::error::{DunklError, Result};
use crate::grid::{GridFunction, GridSpec, Profile};
use crate::multiplicity::{make_multiplicity, Multiplicity};

pub type TestFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

fn sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Smooth radial bump supported in the ball of radius `b`.
pub fn bump_profile(b: f64) -> Profile {
    Arc::new(move |r| {
        let u = r / b;
        if u >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - u * u)).exp()
        }
    })
}

/// Radial profile of a named function, when it has one.
pub fn radial_profile(id: &str) -> Option<Profile> {
    Some(match id {
        "gaussian" => Arc::new(|r: f64| (-0.5 * r * r).exp()),
        "narrow_gaussian" => Arc::new(|r: f64| (-r * r).exp()),
        "wide_gaussian" => Arc::new(|r: f64| (-r * r / 32.0).exp()),
        "broad_gaussian" => Arc::new(|r: f64| (-r * r / 72.0).exp()),
        "exponential" => Arc::new(|r: f64| (-r).exp()),
        "radial_quadratic" => Arc::new(|r: f64| (-r * r).exp() * (1.0 + r * r)),
        "bump" => bump_profile(1.0),
        _ => return None,
    })
}

/// Names accepted by [`test_function`].
pub const NAMES: &[&str] = &[
    "gaussian",
    "narrow_gaussian",
    "wide_gaussian",
    "broad_gaussian",
    "exponential",
    "radial_quadratic",
    "bump",
    "gaussian_linear",
    "shifted_gaussian",
    "odd_product",
    "modulated",
    "quadratic",
];

/// A named function, defined in every dimension.
pub fn test_function(id: &str) -> Result<TestFn> {
    if let Some(p) = radial_profile(id) {
        return Ok(Arc::new(move |x: &[f64]| p(sq(x).sqrt())));
    }
    Ok(match id {
        "gaussian_linear" => Arc::new(|x: &[f64]| (-0.5 * sq(x)).exp() * (1.0 + x[0])),
        "shifted_gaussian" => Arc::new(|x: &[f64]| {
            let c = [0.5, -0.3, 0.2];
            (-x.iter().zip(c.iter().cycle()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()).exp()
        }),
        "odd_product" => Arc::new(|x: &[f64]| {
            let tail = if x.len() > 1 { x[x.len() - 1] } else { 1.0 };
            x[0] * tail * (-0.5 * sq(x)).exp()
        }),
        "modulated" => Arc::new(|x: &[f64]| (-0.5 * sq(x)).exp() * (2.0 * x[0]).cos()),
        "quadratic" => Arc::new(|x: &[f64]| (-sq(x)).exp() * (1.0 - x[0] + x[x.len() - 1] * x[x.len() - 1])),
        other => return Err(DunklError::domain("test_function", format!("unknown function `{other}`"))),
    })
}

/// One member of the fixed suite.
#[derive(Clone)]
pub struct SuiteEntry {
    pub id: &'static str,
    pub mult: Multiplicity,
    pub f: TestFn,
    pub radial: bool,
    /// Grid on which the function and its transform are resolved.
    pub spec: GridSpec,
}

impl SuiteEntry {
    pub fn label(&self) -> String {
        let k: Vec<String> = self.mult.kappa.iter().map(|k| format!("{k}")).collect();
        format!("{}[d={},κ=({})]", self.id, self.mult.d, k.join(","))
    }

    pub fn grid(&self) -> Result<GridFunction> {
        let f = self.f.clone();
        GridFunction::from_fn(&self.mult, self.spec, move |x| f(x))
    }
}

/// Twenty smooth, rapidly decaying functions over d ∈ {1,2,3} and
/// κ_i ∈ {0, 0.5, 1, 2.5}.
pub fn suite() -> Vec<SuiteEntry> {
    let table: [(&'static str, &[f64]); 20] = [
        ("gaussian", &[0.0]),
        ("gaussian_linear", &[0.5]),
        ("shifted_gaussian", &[1.0]),
        ("odd_product", &[2.5]),
        ("modulated", &[0.5]),
        ("radial_quadratic", &[1.0]),
        ("quadratic", &[2.5]),
        ("gaussian", &[0.0, 0.0]),
        ("radial_quadratic", &[0.5, 1.0]),
        ("shifted_gaussian", &[0.5, 0.0]),
        ("odd_product", &[1.0, 1.0]),
        ("gaussian_linear", &[2.5, 0.5]),
        ("modulated", &[0.0, 1.0]),
        ("shifted_gaussian", &[1.0, 2.5]),
        ("quadratic", &[0.5, 0.5]),
        ("gaussian", &[0.0, 0.0, 0.0]),
        ("gaussian_linear", &[0.5, 1.0, 0.0]),
        ("shifted_gaussian", &[1.0, 1.0, 1.0]),
        ("odd_product", &[2.5, 0.0, 0.5]),
        ("radial_quadratic", &[0.5, 0.5, 0.5]),
    ];
    table
        .iter()
        .map(|&(id, kappa)| {
            let mult = make_multiplicity(kappa.len(), kappa).expect("valid multiplicity");
            let spec = match kappa.len() {
                1 => GridSpec::new(10.0, 5, 14),
                2 => GridSpec::new(9.0, 6, 12),
                _ => GridSpec::new(7.5, 4, 10),
            };
            SuiteEntry { id, mult, f: test_function(id).expect("suite names are valid"), radial: radial_profile(id).is_some(), spec }
        })
        .collect()
}
