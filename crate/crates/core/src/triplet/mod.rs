//! State-dependent Lévy triplets `(b(x), Q(x), N(x, dy))` built from a closed kernel catalog.
//!
//! | family             | density / law                        | outer `|y|^p` finite | inner `|y|^p` finite |
//! |--------------------|--------------------------------------|----------------------|----------------------|
//! | `symmetric_stable` | `c|y|^{-1-α}`                        | `p < α`              | `p > α`              |
//! | `tempered_stable`  | `c e^{-λ|y|}|y|^{-1-α}`              | all `p`              | `p > α`              |
//! | `compound_poisson` | rate `λ`, Gaussian / two-point / uniform | all `p`          | all `p`              |
//! | `none`             | no jumps                             | all `p`              | all `p`              |
//!
//! A truncation radius restricts (tempered) stable kernels to `|y| ≤ R`, making every
//! outer moment finite. Any parameter can be modulated in `x` by an [`Expr`].

mod expr;
mod kernel;
mod spec;
mod sups;

pub use expr::{Expr, Region};
pub use kernel::{
    kernel_fractional_moment, Compensation, Family, FrozenKernel, JumpKernel, JumpLaw, Measure, MomentRegion,
    NamedScale, StableScale,
};
pub use spec::{Diffusion, Drift, Flags, ProcessSpec};
pub use sups::{
    coefficient_sups, grid_sup, point_coefficients, search_bounds, standard_drift, CoefficientSups, PointCoefficients,
    SupMethod, Witness, SUP_GRID_POINTS,
};
