//! Reproducing kernels of weighted Bergman spaces `A²_h` on the unit disk,
//! for weights `h(z) = ∏ |(z - a_k) / (1 - conj(a_k) z)|^{p_k}`, and the
//! contractive zero divisors of finite `A^p` zero sets.
//!
//! The kernel is evaluated in closed form from a small Hermitian matrix of
//! scaled derivatives at the origin, which in turn comes from a Gram system
//! integrated numerically once per weight.
//!
//! ```
//! use bergman::{build_model, QuadConfig, WeightSpec};
//! use num_complex::Complex64;
//!
//! let spec = WeightSpec::from_pairs(&[(Complex64::new(0.0, 0.0), 2.0)]).unwrap();
//! let model = build_model(&spec, &QuadConfig::default()).unwrap();
//! let k = model.eval_main(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
//! assert!((k.re - 2.0).abs() < 1e-14);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod divisor;
pub mod error;
pub mod gauss;
pub mod json;
pub mod kernel;
pub mod linalg;
pub mod oracle;
pub mod origin;
pub mod poly;
pub mod quad;
pub mod weight;

pub use divisor::{build_divisor, DivisorModel, DivisorReport, Zero, ZeroSet};
pub use error::{Error, Result};
pub use kernel::{build_model, KernelModel};
pub use num_complex::Complex64;
pub use oracle::{closed_form_s1, hansbo_k00, TruncatedKernel, DEFAULT_TRUNCATION};
pub use origin::{solve_origin_derivatives, OriginDerivatives};
pub use poly::{ComplexPoly, RootSet};
pub use quad::{inner_product, integrate_disk, norm_p, Measure, QuadConfig, Singularity};
pub use weight::{weight_eval, WeightFactor, WeightSpec};
