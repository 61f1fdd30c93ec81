//! Hankel transforms of integer order through B-spline wavelet expansions.
//!
//! The input function is expanded on `[0, R]` in a basis of B-spline scaling
//! functions and semi-orthogonal spline wavelets. Every basis atom is a
//! compactly supported piecewise polynomial, so its Hankel transform is a
//! finite sum of monomial integrals `∫₀^ζ r^{γ+1} J_ν(pr) dr`, each of which
//! has a closed form in terms of the hypergeometric function ₁F₂. The
//! transform of the function is the coefficient-weighted sum of the atom
//! transforms.
//!
//! Module map:
//!
//! * [`splines`] – B-splines, spline wavelets, Bernstein coefficients.
//! * [`piecewise`] – the [`PiecewisePoly`](piecewise::PiecewisePoly) container.
//! * [`specfun`] – Gamma, Bessel `J_n` and the ₚF_q series engine.
//! * [`hankel_kernel`] – closed-form transforms of monomials and atoms.
//! * [`expansion`] – expansion coefficients and reconstruction.
//! * [`pipeline`] – end-to-end transform with diagnostics.
//! * [`oracle`] – independent reference quadrature.
//! * [`cli`] – the command-line front end.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below are the types most callers want.

// Comparisons are written as `!(a < b)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod expansion;
pub mod function;
pub mod hankel_kernel;
pub mod oracle;
pub mod piecewise;
pub mod pipeline;
pub mod quadrature;
pub mod specfun;
pub mod splines;
pub mod sum;

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

pub use error::{Error, Result};

/// Floating-point scalar the library is generic over.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Sum + Send + Sync + 'static
{
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Display
        + Sum
        + Send
        + Sync
        + 'static
{
}

/// Converts an `f64` literal into `T`.
#[inline]
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

#[inline]
pub(crate) fn from_usize<T: Real>(n: usize) -> T {
    T::from_usize(n).expect("integer representable in scalar type")
}

#[inline]
pub(crate) fn from_i64<T: Real>(n: i64) -> T {
    T::from_i64(n).expect("integer representable in scalar type")
}

pub type PiecewisePoly64 = piecewise::PiecewisePoly<f64>;
pub type PiecewisePoly32 = piecewise::PiecewisePoly<f32>;
pub type FunctionSpec64 = function::FunctionSpec<f64>;
pub type ExpansionCoefficients64 = expansion::ExpansionCoefficients<f64>;
pub type TransformRequest64 = pipeline::TransformRequest<f64>;
pub type TransformResult64 = pipeline::TransformResult<f64>;
pub type KernelConfig64 = hankel_kernel::KernelConfig<f64>;
pub type QuadratureConfig64 = oracle::QuadratureConfig<f64>;

pub use expansion::{AtomId, ExpansionCoefficients, Normalization};
pub use function::{FunctionSpec, Interpolation, RadialFunction, SampledFunction};
pub use hankel_kernel::{AtomKind, BasisTransform, KernelConfig, MonomialIntegralQuery};
pub use oracle::QuadratureConfig;
pub use piecewise::PiecewisePoly;
pub use pipeline::{TransformRequest, TransformResult};
pub use specfun::Hyp1F2Params;
pub use splines::{SplineOrder, WaveletIndex};
