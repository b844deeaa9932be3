//! Built-in scenarios. The two six-dimensional fixtures pair a conformal
//! (x₃ resp. x₄)-block source metric with the matching y-coordinate target
//! metric, so the target is a genuine Kähler manifold and the map component
//! that survives into the conformal block keeps the horizontal frames
//! isometric. The map components are ordered so that the slant angle of the
//! mixed pair equals the angle parameter itself.
//!
//! The hemi fixture is isometric on the horizontal space only where
//! x₄ = 0 (the conformal factor of its source cannot be expressed in
//! target coordinates), so all of its sample points sit on that slice.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_6;

use crate::cstruct::ComplexStructure;
use crate::expr::{parse, Expr};
use crate::geom::ManifoldChart;
use crate::rmap::{MapError, MapScenario};
use crate::Tolerances;

/// Angle parameter of both paper fixtures (π/6).
pub const SLANT_ANGLE: f64 = FRAC_PI_6;

fn diag_chart(name: &str, coords: &[&str], diag: &[&str]) -> ManifoldChart {
    let n = coords.len();
    let mut metric = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let e = if i == j {
                parse(diag[i], coords).expect("fixture metric entry")
            } else {
                Expr::constant(0.0)
            };
            row.push(e);
        }
        metric.push(row);
    }
    ManifoldChart::new(name, coords.iter().map(|s| s.to_string()).collect(), metric)
        .expect("fixture chart")
}

fn components(coords: &[&str], texts: &[&str]) -> Vec<Expr> {
    texts
        .iter()
        .map(|t| parse(t, coords).expect("fixture map component"))
        .collect()
}

/// Semi-slant fixture on ℝ⁶: invariant pair {∂y₃, ∂y₄}, slant pair mixing
/// the (y₁, y₆)-plane with ∂y₅ at angle π/6, kernel {∂x₁, ∂x₆}.
pub fn paper_semi_slant() -> MapScenario {
    let xs = ["x1", "x2", "x3", "x4", "x5", "x6"];
    let ys = ["y1", "y2", "y3", "y4", "y5", "y6"];
    let source = diag_chart(
        "semi-slant-source",
        &xs,
        &["1", "1", "exp(2*x3)", "exp(2*x3)", "1", "1"],
    );
    let target = diag_chart(
        "semi-slant-target",
        &ys,
        &["1", "1", "exp(2*y3)", "exp(2*y3)", "1", "1"],
    );
    let comps = components(
        &xs,
        &[
            "x2*sin(0.5235987755982988)",
            "0",
            "x3",
            "x4",
            "x5",
            "x2*cos(0.5235987755982988)",
        ],
    );
    MapScenario::new(
        source,
        target,
        comps,
        Some(ComplexStructure::block_rotation(3)),
        Some(Expr::constant(0.0)),
        vec![
            vec![0.3, -0.7, 0.4, 1.1, -0.2, 0.5],
            vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            vec![-0.6, 0.8, -0.9, 0.3, 0.7, -0.4],
            vec![1.0, -0.3, 0.6, -1.2, 0.1, 0.9],
        ],
        Tolerances::default(),
    )
    .expect("semi-slant fixture")
}

/// Hemi-slant fixture on ℝ⁶: anti-invariant direction ∂y₃, slant pair at
/// angle π/6, kernel {∂x₁, ∂x₄, ∂x₆}. Sample points keep x₄ = 0.
pub fn paper_hemi_slant() -> MapScenario {
    let xs = ["x1", "x2", "x3", "x4", "x5", "x6"];
    let ys = ["y1", "y2", "y3", "y4", "y5", "y6"];
    let source = diag_chart(
        "hemi-slant-source",
        &xs,
        &["1", "1", "exp(2*x4)", "exp(2*x4)", "1", "1"],
    );
    let target = diag_chart(
        "hemi-slant-target",
        &ys,
        &["1", "1", "exp(2*y4)", "exp(2*y4)", "1", "1"],
    );
    let comps = components(
        &xs,
        &[
            "x2*sin(0.5235987755982988)",
            "0",
            "x3",
            "0",
            "x5",
            "x2*cos(0.5235987755982988)",
        ],
    );
    MapScenario::new(
        source,
        target,
        comps,
        Some(ComplexStructure::block_rotation(3)),
        None,
        vec![
            vec![0.3, -0.7, 0.4, 0.0, -0.2, 0.5],
            vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            vec![-0.6, 0.8, -0.9, 0.0, 0.7, -0.4],
            vec![1.0, -0.3, 0.6, 0.0, 0.1, 0.9],
        ],
        Tolerances::default(),
    )
    .expect("hemi-slant fixture")
}

/// The plane in polar coordinates submersed onto its radial coordinate.
/// Carries the classical Clairaut geometry: straight lines satisfy
/// r·sin ψ = const against the radial (horizontal) direction.
pub fn polar_plane() -> MapScenario {
    let xs = ["r", "phi"];
    let ys = ["s"];
    let source = diag_chart("polar-plane", &xs, &["1", "r^2"]);
    let target = diag_chart("radial-line", &ys, &["1"]);
    let comps = components(&xs, &["r"]);
    MapScenario::new(
        source,
        target,
        comps,
        None,
        None,
        vec![vec![1.0, 0.0], vec![1.5, 0.7853981633974483], vec![2.0, 3.0]],
        Tolerances::default(),
    )
    .expect("polar fixture")
}

/// Identity on flat ℝ⁴ with the standard block complex structure.
pub fn euclidean_identity() -> MapScenario {
    let xs = ["x1", "x2", "x3", "x4"];
    let ys = ["y1", "y2", "y3", "y4"];
    let source = diag_chart("euclidean-4", &xs, &["1", "1", "1", "1"]);
    let target = diag_chart("euclidean-4-target", &ys, &["1", "1", "1", "1"]);
    let comps = components(&xs, &["x1", "x2", "x3", "x4"]);
    MapScenario::new(
        source,
        target,
        comps,
        Some(ComplexStructure::block_rotation(2)),
        Some(Expr::constant(0.0)),
        vec![
            vec![0.0, 0.0, 0.0, 0.0],
            vec![0.4, -0.2, 0.7, 0.1],
            vec![-0.5, 0.9, 0.3, -0.8],
        ],
        Tolerances::default(),
    )
    .expect("identity fixture")
}

/// Flat plane mapped onto the horoplane y₁ = −10/3 inside the hyperbolic
/// half-space metric y₁⁻²(dy₁²+dy₂²+dy₃²). Umbilical with constant mean
/// curvature H = −(10/3)∂y₁ = −∇^N(0.3·y₁): an exact affine Clairaut
/// potential with a nonconstant gradient.
pub fn horosphere() -> MapScenario {
    let xs = ["x1", "x2"];
    let ys = ["y1", "y2", "y3"];
    let source = diag_chart("horoplane-source", &xs, &["0.09", "0.09"]);
    let target = diag_chart("hyperbolic-3", &ys, &["y1^-2", "y1^-2", "y1^-2"]);
    let comps = components(&xs, &["-3.3333333333333335", "x1", "x2"]);
    let potential = parse("0.3*y1", &ys).expect("horosphere potential");
    MapScenario::new(
        source,
        target,
        comps,
        None,
        Some(potential),
        vec![
            vec![0.0, 0.0],
            vec![0.5, -0.3],
            vec![-0.7, 0.2],
            vec![1.1, 0.8],
        ],
        Tolerances::default(),
    )
    .expect("horosphere fixture")
}

/// Unit-speed round circle of radius 2 in the flat plane. Umbilical (rank
/// one) with rotating mean curvature −(1/2)·radial, which no affine
/// potential can match at spread sample points.
pub fn circle_immersion() -> MapScenario {
    let xs = ["t"];
    let ys = ["y1", "y2"];
    let source = diag_chart("circle-source", &xs, &["1"]);
    let target = diag_chart("flat-plane", &ys, &["1", "1"]);
    let comps = components(&xs, &["2*cos(0.5*t)", "2*sin(0.5*t)"]);
    MapScenario::new(
        source,
        target,
        comps,
        Some(ComplexStructure::block_rotation(1)),
        None,
        vec![vec![0.0], vec![1.5], vec![3.1], vec![4.7]],
        Tolerances::default(),
    )
    .expect("circle fixture")
}

/// The line x ↦ k·x between flat lines; not a Riemannian map for k ≠ ±1.
pub fn line_scaling(k: f64) -> MapScenario {
    let xs = ["x"];
    let ys = ["y"];
    let source = diag_chart("line", &xs, &["1"]);
    let target = diag_chart("line-target", &ys, &["1"]);
    let comps = vec![Expr::mul(Expr::constant(k), Expr::var("x", 0))];
    MapScenario::new(
        source,
        target,
        comps,
        None,
        None,
        vec![vec![0.0], vec![1.0]],
        Tolerances::default(),
    )
    .expect("scaling fixture")
}

/// x ↦ x² with sample points straddling the critical point; the Jacobian
/// rank collapses at the origin, so construction must fail.
pub fn parabola_fold() -> Result<MapScenario, MapError> {
    let xs = ["x"];
    let ys = ["y"];
    let source = diag_chart("fold-source", &xs, &["1"]);
    let target = diag_chart("fold-target", &ys, &["1"]);
    let comps = components(&xs, &["x^2"]);
    MapScenario::new(
        source,
        target,
        comps,
        None,
        None,
        vec![vec![-1.0], vec![0.0], vec![1.0]],
        Tolerances::default(),
    )
}

/// The line embedded along the first axis of the flat J-plane; its range
/// is anti-invariant (J maps it into the perp space).
pub fn anti_invariant_line() -> MapScenario {
    let xs = ["t"];
    let ys = ["y1", "y2"];
    let source = diag_chart("aline-source", &xs, &["1"]);
    let target = diag_chart("aline-target", &ys, &["1", "1"]);
    let comps = components(&xs, &["t", "0"]);
    MapScenario::new(
        source,
        target,
        comps,
        Some(ComplexStructure::block_rotation(1)),
        None,
        vec![vec![0.0], vec![0.7]],
        Tolerances::default(),
    )
    .expect("anti-invariant fixture")
}

/// The flat J-closed plane embedded in ℝ⁴; its range is J-invariant.
pub fn invariant_plane() -> MapScenario {
    let xs = ["x1", "x2"];
    let ys = ["y1", "y2", "y3", "y4"];
    let source = diag_chart("iplane-source", &xs, &["1", "1"]);
    let target = diag_chart("iplane-target", &ys, &["1", "1", "1", "1"]);
    let comps = components(&xs, &["x1", "x2", "0", "0"]);
    MapScenario::new(
        source,
        target,
        comps,
        Some(ComplexStructure::block_rotation(2)),
        None,
        vec![vec![0.0, 0.0], vec![0.6, -0.4]],
        Tolerances::default(),
    )
    .expect("invariant fixture")
}

/// Semi-slant map into the product of a hyperbolic half-plane and flat ℝ⁴,
/// landing on a horocurve in the curved factor. Exercises slant frames
/// over a genuinely curved Kähler target.
pub fn curved_semi_slant() -> MapScenario {
    // target coordinates: (u, v) hyperbolic pair with metric u⁻²,
    // (w1..w4) flat; J pairs (u,v), (w1,w2), (w3,w4).
    let xs = ["x1", "x2", "x3", "x4"];
    let ys = ["u", "v", "w1", "w2", "w3", "w4"];
    let source = diag_chart("curved-semi-source", &xs, &["1", "1", "1", "1"]);
    let target = diag_chart(
        "half-plane-product",
        &ys,
        &["u^-2", "u^-2", "1", "1", "1", "1"],
    );
    // u ≡ 2: |∂v| = 1/2 on the target, so the v-component carries a
    // factor 2 and dF ∂x₁ = 2 sin α ∂v + cos α ∂w₂ stays unit. The slant
    // pair mixes the curved v-direction with the flat w₂-axis.
    let comps = components(
        &xs,
        &[
            "2",
            "2*x1*sin(0.5235987755982988)",
            "x2",
            "x1*cos(0.5235987755982988)",
            "x3",
            "x4",
        ],
    );
    MapScenario::new(
        source,
        target,
        comps,
        Some(ComplexStructure::block_rotation(3)),
        None,
        vec![
            vec![0.0, 0.0, 0.0, 0.0],
            vec![0.4, -0.6, 0.2, 0.8],
            vec![-0.3, 0.5, -0.9, 0.1],
        ],
        Tolerances::default(),
    )
    .expect("curved semi-slant fixture")
}
