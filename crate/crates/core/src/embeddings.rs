//! Mollifiers, mollified delta distributions and a fixed, versioned gallery of
//! model nets and vector fields.
//!
//! Every mollifier is built from the profile `g(s) = exp(−1/(1−s))` (`s < 1`),
//! evaluated at `s = |y − center|² / R²`, so it is smooth with compact support
//! in the closed ball of radius `R`.

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::net::{ClosedForm, EpsilonGrid, NetFunction, NetVectorField, SmoothFunctionHandle};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::{E, PI};
use std::fmt;

/// Version of the gallery contents; bumped whenever an item changes meaning.
pub const GALLERY_VERSION: u32 = 1;

/// Derivative order every gallery member supports.
pub const GALLERY_MAX_ORDER: usize = 4;

/// Center offset `c` of the asymmetric bump along `x₁`.
pub const ASYMMETRIC_OFFSET: f64 = 0.5;
/// Support radius of the asymmetric bump.
pub const ASYMMETRIC_RADIUS: f64 = 0.3;
/// Decay rate of the truncated Gaussian shape, `exp(−GAUSS_RATE·s)·g(s)`.
pub const GAUSS_RATE: f64 = 4.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MollifierShape {
    /// `g(|y|²/R²)`: invariant under every rotation.
    RadialBump,
    /// `g(|y − c e₁|²/R²)`: a bump whose support misses the origin's rotation orbit.
    AsymmetricBump,
    /// `exp(−4.5·|y|²/R²)·g(|y|²/R²)`: a Gaussian cut off smoothly at radius `R`.
    GaussianTruncated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `∫ φ = 1`.
    MassOne,
    /// `max φ = 1`.
    SupOne,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MollifierSpec {
    pub dim: usize,
    pub shape: MollifierShape,
    /// Support radius `R`.
    pub radius: f64,
    pub normalization: Normalization,
    /// Center offset along `x₁`; only used by the asymmetric shape.
    #[serde(default = "default_offset")]
    pub offset: f64,
    #[serde(default = "default_max_order")]
    pub max_order: usize,
}

fn default_offset() -> f64 {
    ASYMMETRIC_OFFSET
}

fn default_max_order() -> usize {
    GALLERY_MAX_ORDER
}

impl MollifierSpec {
    /// Radial bump of radius 1 with unit mass.
    pub fn radial(dim: usize) -> MollifierSpec {
        MollifierSpec {
            dim,
            shape: MollifierShape::RadialBump,
            radius: 1.0,
            normalization: Normalization::MassOne,
            offset: 0.0,
            max_order: GALLERY_MAX_ORDER,
        }
    }

    /// Asymmetric bump centered at `(0.5, 0, …)`, radius 0.3, maximum 1.
    pub fn asymmetric(dim: usize) -> MollifierSpec {
        MollifierSpec {
            dim,
            shape: MollifierShape::AsymmetricBump,
            radius: ASYMMETRIC_RADIUS,
            normalization: Normalization::SupOne,
            offset: ASYMMETRIC_OFFSET,
            max_order: GALLERY_MAX_ORDER,
        }
    }

    /// Truncated Gaussian of radius 1 with unit mass.
    pub fn gaussian(dim: usize) -> MollifierSpec {
        MollifierSpec {
            shape: MollifierShape::GaussianTruncated,
            ..MollifierSpec::radial(dim)
        }
    }

    pub fn with_radius(self, radius: f64) -> MollifierSpec {
        MollifierSpec { radius, ..self }
    }

    pub fn with_normalization(self, normalization: Normalization) -> MollifierSpec {
        MollifierSpec { normalization, ..self }
    }

    pub fn with_max_order(self, max_order: usize) -> MollifierSpec {
        MollifierSpec { max_order, ..self }
    }

    fn center_offset(&self) -> f64 {
        match self.shape {
            MollifierShape::AsymmetricBump => self.offset,
            _ => 0.0,
        }
    }

    /// Radius of the smallest origin-centered ball containing the support.
    pub fn outer_radius(&self) -> f64 {
        self.center_offset().abs() + self.radius
    }

    fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::Precondition(format!(
                "mollifier radius must be positive, got {}",
                self.radius
            )));
        }
        if !(1..=crate::jet::MAX_VARS).contains(&self.dim) {
            return Err(Error::Capability(format!(
                "mollifiers are available in dimensions 1..={}, got {}",
                crate::jet::MAX_VARS,
                self.dim
            )));
        }
        if self.max_order > crate::jet::MAX_ORDER {
            return Err(Error::Capability(format!(
                "max_order {} exceeds {}",
                self.max_order,
                crate::jet::MAX_ORDER
            )));
        }
        Ok(())
    }

    /// Multiplier that realizes the normalization.
    pub fn normalization_constant(&self) -> f64 {
        match self.normalization {
            // every shape peaks at s = 0 with value exp(−1)
            Normalization::SupOne => E,
            Normalization::MassOne => 1.0 / self.unnormalized_mass(),
        }
    }

    /// `∫ profile(|y − c|²/R²) dy = R^n · ω_{n−1} · ∫₀¹ profile(r²) r^{n−1} dr`.
    fn unnormalized_mass(&self) -> f64 {
        let n = self.dim;
        let shape = self.shape;
        let radial = simpson(0.0, 1.0, 1 << 14, |r| profile_value(shape, r * r) * r.powi(n as i32 - 1));
        self.radius.powi(n as i32) * unit_sphere_area(n) * radial
    }
}

/// Surface area of the unit sphere in `ℝⁿ`.
pub fn unit_sphere_area(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        4 => 2.0 * PI * PI,
        _ => unreachable!("dimension validated"),
    }
}

fn simpson(a: f64, b: f64, intervals: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / intervals as f64;
    let mut acc = f(a) + f(b);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * i as f64);
    }
    acc * h / 3.0
}

fn profile_value(shape: MollifierShape, s: f64) -> f64 {
    let g = if s < 1.0 { (-1.0 / (1.0 - s)).exp() } else { 0.0 };
    match shape {
        MollifierShape::GaussianTruncated => (-GAUSS_RATE * s).exp() * g,
        _ => g,
    }
}

fn profile_jet(shape: MollifierShape, s: &Jet) -> Jet {
    let g = s.bump();
    match shape {
        MollifierShape::GaussianTruncated => &s.scale_by(-GAUSS_RATE).exp() * &g,
        _ => g,
    }
}

/// `φ(y)` on jets, for a validated spec and its normalization constant.
fn mollifier_jet(spec: &MollifierSpec, norm: f64, y: &[Jet]) -> Jet {
    let inv_r2 = 1.0 / (spec.radius * spec.radius);
    let c = spec.center_offset();
    let mut s = if c == 0.0 { &y[0] * &y[0] } else { y[0].add_const(-c).powi(2) };
    for yi in &y[1..] {
        s = &s + &(yi * yi);
    }
    profile_jet(spec.shape, &s.scale_by(inv_r2)).scale_by(norm)
}

/// The mollifier `φ` described by `spec`.
pub fn make_mollifier(spec: &MollifierSpec) -> Result<SmoothFunctionHandle> {
    spec.validate()?;
    let spec = *spec;
    let norm = spec.normalization_constant();
    Ok(ClosedForm::new(spec.dim, spec.max_order, move |y| mollifier_jet(&spec, norm, y)).handle())
}

/// `ε^{−p} φ(x/ε)` for every grid value.
fn scaled_net(spec: &MollifierSpec, grid: &EpsilonGrid, power: i32) -> Result<NetFunction> {
    spec.validate()?;
    let spec = *spec;
    let norm = spec.normalization_constant();
    Ok(NetFunction::closed_form(grid, spec.dim, spec.max_order, move |eps, x| {
        let inv = 1.0 / eps;
        let y: Vec<Jet> = x.iter().map(|xi| xi.scale_by(inv)).collect();
        let phi = mollifier_jet(&spec, norm, &y);
        if power == 0 {
            phi
        } else {
            phi.scale_by(inv.powi(power))
        }
    }))
}

/// Mollified delta distribution `u_ε(x) = ε^{−n} φ(x/ε)`.
pub fn embed_delta(spec: &MollifierSpec, grid: &EpsilonGrid) -> Result<NetFunction> {
    if spec.normalization != Normalization::MassOne {
        return Err(Error::Precondition("delta embeddings need a mass-one mollifier".into()));
    }
    scaled_net(spec, grid, spec.dim as i32)
}

/// Shrinking bump `u_ε(x) = φ(x/ε)` of an asymmetric mollifier (no ε prefactor).
pub fn shrinking_bump(spec: &MollifierSpec, grid: &EpsilonGrid) -> Result<NetFunction> {
    if spec.shape != MollifierShape::AsymmetricBump {
        return Err(Error::Precondition("shrinking bumps need an asymmetric mollifier".into()));
    }
    scaled_net(spec, grid, 0)
}

/// Kind of a gallery item.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ItemKind {
    Function,
    VectorField,
}

impl fmt::Display for ItemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ItemKind::Function => "function",
            ItemKind::VectorField => "vector_field",
        })
    }
}

/// Catalog entry of the gallery.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GalleryEntry {
    pub name: &'static str,
    pub kind: ItemKind,
    pub dim: usize,
    pub description: &'static str,
}

const fn f(name: &'static str, dim: usize, description: &'static str) -> GalleryEntry {
    GalleryEntry {
        name,
        kind: ItemKind::Function,
        dim,
        description,
    }
}

const fn v(name: &'static str, dim: usize, description: &'static str) -> GalleryEntry {
    GalleryEntry {
        name,
        kind: ItemKind::VectorField,
        dim,
        description,
    }
}

/// Every gallery item, in listing order.
pub const CATALOG: &[GalleryEntry] = &[
    f("delta_radial_1d", 1, "eps^-1 phi(x/eps), radial bump of radius 1, unit mass"),
    f("delta_radial_2d", 2, "eps^-2 phi(x/eps), radial bump of radius 1, unit mass"),
    f("delta_radial_3d", 3, "eps^-3 phi(x/eps), radial bump of radius 1, unit mass"),
    f("bump_asym_2d", 2, "phi(x/eps), bump of radius 0.3 centered at (0.5, 0), maximum 1"),
    f("bump_asym_3d", 3, "phi(x/eps), bump of radius 0.3 centered at (0.5, 0, 0), maximum 1"),
    f("gauss_radial_2d", 2, "eps^-2 phi(x/eps), truncated Gaussian of radius 1, unit mass"),
    f("norm_sq_2d", 2, "x1^2 + x2^2"),
    f("norm_sq_3d", 3, "x1^2 + x2^2 + x3^2"),
    f("norm_quartic_2d", 2, "(x1^2 + x2^2)^2"),
    f("coord_x1_2d", 2, "x1"),
    f("coord_x2_2d", 2, "x2"),
    f("x2_plus_eps5_sin_x1", 2, "x2 + eps^5 sin(x1)"),
    f("x2_plus_eps_sin_x1", 2, "x2 + eps sin(x1)"),
    f("delta_x2_2d", 2, "eps^-1 phi(x2/eps), 1D radial bump in x2, independent of x1"),
    f("radial_eps5_perturbed_2d", 2, "x1^2 + x2^2 + eps^5 x1"),
    f("radial_eps_perturbed_2d", 2, "x1^2 + x2^2 + eps x1"),
    f("eps5_sin_1d", 1, "eps^5 sin(x)"),
    f("eps_const_1d", 1, "eps"),
    f("log_eps_1d", 1, "|log eps|"),
    v("xi_12_rotation", 2, "(-x2, x1), generator of rotations of the plane"),
    v("xi_12_rotation_3d", 3, "(-x2, x1, 0)"),
    v("xi_13_rotation_3d", 3, "(-x3, 0, x1)"),
    v("xi_23_rotation_3d", 3, "(0, -x3, x2)"),
    v("const_dx_1d", 1, "(1)"),
    v("const_dx_2d", 2, "(1, 0)"),
    v("log_eps_dx_1d", 1, "(|log eps|)"),
    v("log_eps_dx_2d", 2, "(|log eps|, 0)"),
    v("inv_eps_dx_1d", 1, "(1/eps)"),
    v("inv_sqrt_eps_dx_1d", 1, "(eps^-1/2)"),
    v("linear_hyperbolic_2d", 2, "(x1, -x2)"),
    v("quadratic_1d", 1, "(x^2), finite-time blow-up"),
];

/// Catalog entry of `name`.
pub fn catalog_entry(name: &str) -> Result<&'static GalleryEntry> {
    CATALOG
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownGalleryItem(name.to_string()))
}

/// Names of every gallery item.
pub fn gallery_names() -> Vec<&'static str> {
    CATALOG.iter().map(|e| e.name).collect()
}

/// A gallery net or vector field.
#[derive(Clone, Debug)]
pub enum GalleryItem {
    Function(NetFunction),
    VectorField(NetVectorField),
}

/// The gallery realized on one ε-grid.
#[derive(Clone, Debug)]
pub struct Gallery {
    grid: EpsilonGrid,
    items: BTreeMap<&'static str, GalleryItem>,
}

/// The gallery on the default grid.
pub fn gallery() -> Gallery {
    Gallery::on(&EpsilonGrid::default())
}

impl Gallery {
    pub fn on(grid: &EpsilonGrid) -> Gallery {
        let items = CATALOG.iter().map(|e| (e.name, build(e.name, grid))).collect();
        Gallery {
            grid: grid.clone(),
            items,
        }
    }

    pub fn grid(&self) -> &EpsilonGrid {
        &self.grid
    }

    pub fn version(&self) -> u32 {
        GALLERY_VERSION
    }

    pub fn entries(&self) -> &'static [GalleryEntry] {
        CATALOG
    }

    pub fn names(&self) -> Vec<&'static str> {
        gallery_names()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.items.contains_key(name)
    }

    pub fn get(&self, name: &str) -> Result<&GalleryItem> {
        self.items
            .get(name)
            .ok_or_else(|| Error::UnknownGalleryItem(name.to_string()))
    }

    pub fn function(&self, name: &str) -> Result<NetFunction> {
        match self.get(name)? {
            GalleryItem::Function(u) => Ok(u.clone()),
            GalleryItem::VectorField(_) => Err(Error::Config(format!("`{name}` is a vector field, not a function"))),
        }
    }

    pub fn field(&self, name: &str) -> Result<NetVectorField> {
        match self.get(name)? {
            GalleryItem::VectorField(v) => Ok(v.clone()),
            GalleryItem::Function(_) => Err(Error::Config(format!("`{name}` is a function, not a vector field"))),
        }
    }

    /// Names of gallery functions on `ℝ^dim`.
    pub fn functions_of_dim(&self, dim: usize) -> Vec<&'static str> {
        CATALOG
            .iter()
            .filter(|e| e.kind == ItemKind::Function && e.dim == dim)
            .map(|e| e.name)
            .collect()
    }
}

/// `ξ(x) = A x + b` for the gallery fields that are affine and ε-independent.
pub fn affine_form(name: &str) -> Option<(DMatrix<f64>, DVector<f64>)> {
    let rot = |n: usize, i: usize, j: usize| {
        let mut a = DMatrix::zeros(n, n);
        a[(j, i)] = 1.0;
        a[(i, j)] = -1.0;
        (a, DVector::zeros(n))
    };
    Some(match name {
        "xi_12_rotation" => rot(2, 0, 1),
        "xi_12_rotation_3d" => rot(3, 0, 1),
        "xi_13_rotation_3d" => rot(3, 0, 2),
        "xi_23_rotation_3d" => rot(3, 1, 2),
        "const_dx_1d" => (DMatrix::zeros(1, 1), DVector::from_element(1, 1.0)),
        "const_dx_2d" => (DMatrix::zeros(2, 2), DVector::from_vec(vec![1.0, 0.0])),
        "linear_hyperbolic_2d" => (DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0])), DVector::zeros(2)),
        _ => return None,
    })
}

/// Designated `(vector field, function)` pairs on which the infinitesimal and
/// flow-sampled invariance tests are compared.
pub const FLOW_INVARIANCE_PAIRS: &[(&str, &str)] = &[
    ("xi_12_rotation", "delta_radial_2d"),
    ("xi_12_rotation", "bump_asym_2d"),
    ("xi_12_rotation", "norm_sq_2d"),
    ("xi_12_rotation", "coord_x1_2d"),
    ("xi_12_rotation", "gauss_radial_2d"),
    ("xi_12_rotation", "radial_eps5_perturbed_2d"),
    ("xi_12_rotation", "radial_eps_perturbed_2d"),
    ("const_dx_2d", "coord_x2_2d"),
    ("const_dx_2d", "x2_plus_eps5_sin_x1"),
    ("const_dx_2d", "coord_x1_2d"),
    ("const_dx_2d", "delta_x2_2d"),
];

/// Gallery functions on which the three translation criteria (axis `x₁`) are compared.
pub const TRANSLATION_NETS: &[&str] = &[
    "coord_x2_2d",
    "x2_plus_eps5_sin_x1",
    "delta_x2_2d",
    "coord_x1_2d",
    "x2_plus_eps_sin_x1",
    "norm_sq_2d",
    "delta_radial_2d",
    "bump_asym_2d",
    "eps5_sin_1d",
    "eps_const_1d",
];

fn build(name: &str, grid: &EpsilonGrid) -> GalleryItem {
    use GalleryItem::{Function as F, VectorField as V};
    let k = GALLERY_MAX_ORDER;
    let sq = |x: &[Jet]| x.iter().skip(1).fold(&x[0] * &x[0], |acc, xi| &acc + &(xi * xi));
    match name {
        "delta_radial_1d" => F(embed_delta(&MollifierSpec::radial(1), grid).expect("valid spec")),
        "delta_radial_2d" => F(embed_delta(&MollifierSpec::radial(2), grid).expect("valid spec")),
        "delta_radial_3d" => F(embed_delta(&MollifierSpec::radial(3), grid).expect("valid spec")),
        "bump_asym_2d" => F(shrinking_bump(&MollifierSpec::asymmetric(2), grid).expect("valid spec")),
        "bump_asym_3d" => F(shrinking_bump(&MollifierSpec::asymmetric(3), grid).expect("valid spec")),
        "gauss_radial_2d" => F(embed_delta(&MollifierSpec::gaussian(2), grid).expect("valid spec")),
        "norm_sq_2d" | "norm_sq_3d" => F(NetFunction::closed_form(grid, catalog_dim(name), k, move |_, x| sq(x))),
        "norm_quartic_2d" => F(NetFunction::closed_form(grid, 2, k, move |_, x| sq(x).powi(2))),
        "coord_x1_2d" => F(NetFunction::closed_form(grid, 2, k, |_, x| x[0].clone())),
        "coord_x2_2d" => F(NetFunction::closed_form(grid, 2, k, |_, x| x[1].clone())),
        "x2_plus_eps5_sin_x1" => F(NetFunction::closed_form(grid, 2, k, |e, x| {
            &x[1] + &x[0].sin().scale_by(e.powi(5))
        })),
        "x2_plus_eps_sin_x1" => F(NetFunction::closed_form(grid, 2, k, |e, x| &x[1] + &x[0].sin().scale_by(e))),
        "delta_x2_2d" => {
            let spec = MollifierSpec::radial(1);
            let norm = spec.normalization_constant();
            F(NetFunction::closed_form(grid, 2, k, move |e, x| {
                let inv = 1.0 / e;
                mollifier_jet(&spec, norm, &[x[1].scale_by(inv)]).scale_by(inv)
            }))
        }
        "radial_eps5_perturbed_2d" => F(NetFunction::closed_form(grid, 2, k, move |e, x| {
            &sq(x) + &x[0].scale_by(e.powi(5))
        })),
        "radial_eps_perturbed_2d" => F(NetFunction::closed_form(grid, 2, k, move |e, x| &sq(x) + &x[0].scale_by(e))),
        "eps5_sin_1d" => F(NetFunction::closed_form(grid, 1, k, |e, x| x[0].sin().scale_by(e.powi(5)))),
        "eps_const_1d" => F(NetFunction::closed_form(grid, 1, k, |e, x| x[0].lift(e))),
        "log_eps_1d" => F(NetFunction::closed_form(grid, 1, k, |e, x| x[0].lift(e.ln().abs()))),
        "xi_12_rotation" | "xi_12_rotation_3d" | "xi_13_rotation_3d" | "xi_23_rotation_3d" => {
            let (i, j) = match name {
                "xi_13_rotation_3d" => (0, 2),
                "xi_23_rotation_3d" => (1, 2),
                _ => (0, 1),
            };
            V(rotation_generator(grid, catalog_dim(name), i, j))
        }
        "const_dx_1d" => V(NetVectorField::closed_form(grid, 1, k, |_, x| vec![x[0].lift(1.0)])),
        "const_dx_2d" => V(NetVectorField::closed_form(grid, 2, k, |_, x| {
            vec![x[0].lift(1.0), x[0].lift(0.0)]
        })),
        "log_eps_dx_1d" => V(NetVectorField::closed_form(grid, 1, k, |e, x| vec![x[0].lift(e.ln().abs())])),
        "log_eps_dx_2d" => V(NetVectorField::closed_form(grid, 2, k, |e, x| {
            vec![x[0].lift(e.ln().abs()), x[0].lift(0.0)]
        })),
        "inv_eps_dx_1d" => V(NetVectorField::closed_form(grid, 1, k, |e, x| vec![x[0].lift(1.0 / e)])),
        "inv_sqrt_eps_dx_1d" => V(NetVectorField::closed_form(grid, 1, k, |e, x| vec![x[0].lift(e.powf(-0.5))])),
        "linear_hyperbolic_2d" => V(NetVectorField::closed_form(grid, 2, k, |_, x| vec![x[0].clone(), -&x[1]])),
        "quadratic_1d" => V(NetVectorField::closed_form(grid, 1, k, |_, x| vec![&x[0] * &x[0]])),
        _ => unreachable!("catalog and builder agree"),
    }
}

fn catalog_dim(name: &str) -> usize {
    catalog_entry(name).expect("catalog item").dim
}

/// `ξ_ij = x_i ∂_j − x_j ∂_i` on `ℝⁿ` (0-based `i < j`): component `j` is `x_i`, component `i` is `−x_j`.
pub fn rotation_generator(grid: &EpsilonGrid, n: usize, i: usize, j: usize) -> NetVectorField {
    assert!(i < j && j < n, "rotation plane ({i}, {j}) invalid in dimension {n}");
    NetVectorField::closed_form(grid, n, GALLERY_MAX_ORDER, move |_, x| {
        (0..n)
            .map(|c| {
                if c == i {
                    -&x[j]
                } else if c == j {
                    x[i].clone()
                } else {
                    x[0].lift(0.0)
                }
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::{classify, growth_profile, Thresholds, Verdict};
    use crate::net::CompactBox;
    use approx::assert_relative_eq;

    #[test]
    fn radial_bump_sup_one_1d() {
        let spec = MollifierSpec::radial(1).with_normalization(Normalization::SupOne);
        let phi = make_mollifier(&spec).unwrap();
        assert_relative_eq!(phi.eval(&[0.0]), 1.0, epsilon = 1e-15);
        assert_eq!(phi.eval(&[1.0]), 0.0);
        assert_eq!(phi.eval(&[-1.0]), 0.0);
    }

    #[test]
    fn radial_bump_is_rotation_invariant_2d() {
        let phi = make_mollifier(&MollifierSpec::radial(2)).unwrap();
        for k in 0..50 {
            let t = k as f64 * 0.37;
            let (x, y) = (0.8 * t.cos() * (k as f64 / 50.0), 0.8 * t.sin() * (k as f64 / 50.0));
            assert!((phi.eval(&[x, y]) - phi.eval(&[-y, x])).abs() <= 1e-12);
        }
    }

    #[test]
    fn asymmetric_bump_support() {
        let phi = make_mollifier(&MollifierSpec::asymmetric(2)).unwrap();
        assert!(phi.eval(&[0.5, 0.0]) > 0.0);
        assert_relative_eq!(phi.eval(&[0.5, 0.0]), 1.0, epsilon = 1e-15);
        assert_eq!(phi.eval(&[-0.5, 0.0]), 0.0);
        assert_eq!(phi.eval(&[0.0, 0.5]), 0.0);
    }

    #[test]
    fn unit_mass_in_one_dimension() {
        let spec = MollifierSpec::radial(1).with_normalization(Normalization::SupOne);
        // ∫ exp(−1/(1−x²)) dx over [−1, 1]
        assert_relative_eq!(E / spec.normalization_constant() * spec.unnormalized_mass(), 0.443993816, epsilon = 1e-8);
    }

    #[test]
    fn mass_one_by_midpoint_rule() {
        for shape in [MollifierShape::RadialBump, MollifierShape::GaussianTruncated] {
            for n in 1..=2 {
                let spec = MollifierSpec { shape, ..MollifierSpec::radial(n) };
                let phi = make_mollifier(&spec).unwrap();
                let m = if n == 1 { 20000usize } else { 1000 };
                let h = 2.0 / m as f64;
                let mass = if n == 1 {
                    (0..m).map(|i| phi.eval(&[-1.0 + (i as f64 + 0.5) * h])).sum::<f64>() * h
                } else {
                    let mut acc = 0.0;
                    for i in 0..m {
                        for j in 0..m {
                            acc += phi.eval(&[-1.0 + (i as f64 + 0.5) * h, -1.0 + (j as f64 + 0.5) * h]);
                        }
                    }
                    acc * h * h
                };
                assert_relative_eq!(mass, 1.0, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn embed_delta_profile_and_support() {
        let grid = EpsilonGrid::default();
        let u = embed_delta(&MollifierSpec::radial(1), &grid).unwrap();
        let k = CompactBox::cube(1, -1.0, 1.0).unwrap();
        let p = growth_profile(&u, &k, &[0]).unwrap();
        let peak = make_mollifier(&MollifierSpec::radial(1)).unwrap().eval(&[0.0]);
        for &(e, s) in &p.entries {
            assert_relative_eq!(s, peak / e, max_relative = 1e-14);
        }
        let c = classify(&p, &Thresholds::default()).unwrap();
        assert_eq!(c.verdict, Verdict::Moderate(1));
        assert_eq!(u.eval(0.0625, &[0.3]).unwrap(), 0.0);
        assert!(embed_delta(&MollifierSpec::asymmetric(1), &grid).is_err());
    }

    #[test]
    fn shrinking_bump_profiles() {
        let grid = EpsilonGrid::default();
        let u = shrinking_bump(&MollifierSpec::asymmetric(2), &grid).unwrap();
        let full = CompactBox::cube(2, -1.0, 1.0).unwrap();
        let p = growth_profile(&u, &full, &[0, 0]).unwrap();
        let first = p.tail()[0].1;
        assert!(p.tail().iter().all(|&(_, s)| s == first));
        assert_eq!(classify(&p, &Thresholds::default()).unwrap().verdict, Verdict::Bounded);

        let annulus = CompactBox::new(vec![(0.5, 1.0), (-1.0, 1.0)]).unwrap();
        let q = growth_profile(&u, &annulus, &[0, 0]).unwrap();
        for &(e, s) in &q.entries {
            if e * 0.8 < 0.5 {
                assert_eq!(s, 0.0);
            }
        }

        let d = growth_profile(&u, &full, &[1, 0]).unwrap();
        let c = classify(&d, &Thresholds::default()).unwrap();
        assert_relative_eq!(c.slope.unwrap(), -1.0, epsilon = 1e-9);
    }

    #[test]
    fn gallery_contract() {
        let g = gallery();
        for name in ["delta_radial_2d", "bump_asym_2d", "xi_12_rotation"] {
            assert!(g.contains(name));
        }
        assert!(matches!(g.get("nope"), Err(Error::UnknownGalleryItem(_))));
        for e in CATALOG {
            match (g.get(e.name).unwrap(), e.kind) {
                (GalleryItem::Function(u), ItemKind::Function) => assert_eq!(u.dim(), e.dim),
                (GalleryItem::VectorField(v), ItemKind::VectorField) => assert_eq!(v.dim(), e.dim),
                _ => panic!("kind mismatch for {}", e.name),
            }
        }
        for (xi, u) in FLOW_INVARIANCE_PAIRS {
            assert!(affine_form(xi).is_some());
            assert_eq!(g.field(xi).unwrap().dim(), g.function(u).unwrap().dim());
        }
    }

    #[test]
    fn affine_forms_match_fields() {
        let g = gallery();
        let x = [0.3, -0.7, 1.1];
        for e in CATALOG.iter().filter(|e| e.kind == ItemKind::VectorField) {
            if let Some((a, b)) = affine_form(e.name) {
                let xs = DVector::from_column_slice(&x[..e.dim]);
                let expect = &a * &xs + &b;
                let got = g.field(e.name).unwrap().eval(0.0625, &x[..e.dim]).unwrap();
                for (p, q) in got.iter().zip(expect.iter()) {
                    assert_eq!(p, q);
                }
            }
        }
    }
}
