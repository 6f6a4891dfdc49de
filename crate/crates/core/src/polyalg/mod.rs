//! Exact algebra for weighted homogeneous bivariate polynomials.

pub mod classify;
pub mod convexity;
pub mod factor;
pub mod fpoly;
pub mod homogeneity;
pub mod parametric;
pub mod parse;
pub mod poly;
pub mod univariate;

pub use classify::{check_prop_curve_order, classify_axis_case, classify_curve_case, AxisCase, CurveCase};
pub use convexity::{convexity_tag, ConvexityTag};
pub use factor::{
    curve_order, divisibility_order, factorize_mixed_homogeneous, CurveFactor, HomogeneousFactorization,
};
pub use fpoly::{FloatPoly, Jet};
pub use homogeneity::{detect_mixed_homogeneity, hessian_determinant, verify_determinant_weight, MixedHomogeneity};
pub use parametric::{taylor_shear_coefficient, ParametricPoly};
pub use parse::parse_poly;
pub use poly::BivariatePoly;
pub use univariate::{RealRoot, UniPoly};
