//! Special functions: Gamma, integer-order Bessel `J_n`, and generalized
//! hypergeometric series.

use crate::sum::NeumaierSum;
use crate::{from_usize, lit, Error, Real, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Largest argument handled by the ascending Bessel series; above it the
/// normalized downward recurrence takes over.
pub const BESSEL_SERIES_MAX: f64 = 8.0;

/// Relative error budget of a checked hypergeometric evaluation (f64).
pub const HYP_REL_TOL: f64 = 1e-10;

const MAX_SERIES_TERMS: usize = 4000;

/// `Γ(x)` by the Lanczos approximation, with reflection below `1/2`.
pub fn gamma_fn<T: Real>(x: T) -> Result<T> {
    if x <= T::zero() && x == x.floor() {
        return Err(Error::GammaPole(x.to_f64().unwrap_or(f64::NAN)));
    }
    if x < lit(0.5) {
        let pi = T::PI();
        return Ok(pi / ((pi * x).sin() * gamma_fn(T::one() - x)?));
    }
    let x = x - T::one();
    let mut a = lit::<T>(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a = a + lit::<T>(c) / (x + from_usize(i));
    }
    let t = x + lit(LANCZOS_G + 0.5);
    Ok((T::PI() + T::PI()).sqrt() * t.powf(x + lit(0.5)) * (-t).exp() * a)
}

/// `n!` as a floating-point value.
pub fn factorial<T: Real>(n: u32) -> T {
    (1..=n as usize).fold(T::one(), |acc, i| acc * from_usize(i))
}

/// Bessel function of the first kind `J_ν(x)` of integer order.
///
/// Ascending series for `|x| <= 8`, Miller's normalized downward recurrence
/// beyond. Negative `x` uses `J_ν(-x) = (-1)^ν J_ν(x)`.
pub fn bessel_j<T: Real>(nu: u32, x: T) -> T {
    if x < T::zero() {
        let v = bessel_j(nu, -x);
        return if nu.is_multiple_of(2) { v } else { -v };
    }
    if x == T::zero() {
        return if nu == 0 { T::one() } else { T::zero() };
    }
    if x <= lit(BESSEL_SERIES_MAX) {
        bessel_j_series(nu, x)
    } else {
        bessel_j_miller(nu, x)
    }
}

fn bessel_j_series<T: Real>(nu: u32, x: T) -> T {
    let half = x * lit(0.5);
    let z = -(half * half);
    let mut lead = T::one();
    for i in 1..=nu as usize {
        lead = lead * half / from_usize(i);
    }
    let mut term = T::one();
    let mut acc = NeumaierSum::new();
    acc.add(term);
    let nu_t: T = from_usize(nu as usize);
    for k in 1..MAX_SERIES_TERMS {
        let kt: T = from_usize(k);
        term = term * z / (kt * (nu_t + kt));
        acc.add(term);
        if term.abs() <= T::epsilon() * lit(0.25) * acc.total().abs() {
            break;
        }
    }
    lead * acc.total()
}

fn bessel_j_miller<T: Real>(nu: u32, x: T) -> T {
    let xf = x.to_f64().unwrap_or(f64::MAX);
    let base = (nu as f64).max(xf.ceil());
    let mut start = (base + 40.0 + 15.0 * xf.cbrt()).ceil() as usize;
    if start % 2 == 1 {
        start += 1;
    }
    let big = T::max_value().sqrt();
    let rescale = T::one() / big;
    let two_over_x = (T::one() + T::one()) / x;

    let mut upper = T::zero();
    let mut current = T::min_positive_value().sqrt();
    let mut norm = NeumaierSum::new();
    norm.add(current + current);
    let mut wanted = if start == nu as usize {
        current
    } else {
        T::zero()
    };
    for k in (1..=start).rev() {
        let lower = from_usize::<T>(k) * two_over_x * current - upper;
        upper = current;
        current = lower;
        if current.abs() > big {
            current = current * rescale;
            upper = upper * rescale;
            wanted = wanted * rescale;
            let partial = norm.total() * rescale;
            norm = NeumaierSum::new();
            norm.add(partial);
        }
        let order = k - 1;
        if order == nu as usize {
            wanted = current;
        }
        if order > 0 && order % 2 == 0 {
            norm.add(current + current);
        }
    }
    norm.add(current);
    wanted / norm.total()
}

/// A series value with an estimate of its absolute rounding error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue<T> {
    pub value: T,
    pub abs_error: T,
    pub terms: usize,
}

impl<T: Real> SeriesValue<T> {
    pub fn relative_error(&self) -> T {
        if self.value == T::zero() {
            if self.abs_error == T::zero() {
                T::zero()
            } else {
                T::infinity()
            }
        } else {
            self.abs_error / self.value.abs()
        }
    }
}

/// Generalized hypergeometric series `ₚF_q(a; b; z)` by term-ratio recurrence
/// with compensated summation. The error estimate tracks the cancellation
/// between terms.
pub fn hypergeometric_series<T: Real>(num: &[T], den: &[T], z: T) -> Result<SeriesValue<T>> {
    for &b in den {
        if b <= T::zero() && b == b.floor() {
            return Err(Error::invalid(
                "b",
                format!("denominator parameter {b} is a non-positive integer"),
            ));
        }
    }
    let eps = T::epsilon();
    let mut term = T::one();
    let mut acc = NeumaierSum::new();
    acc.add(term);
    let mut magnitude = T::one();
    for k in 0..MAX_SERIES_TERMS {
        let kt: T = from_usize(k);
        let mut ratio = z / (kt + T::one());
        for &a in num {
            ratio = ratio * (a + kt);
        }
        for &b in den {
            ratio = ratio / (b + kt);
        }
        term = term * ratio;
        if term == T::zero() {
            let value = acc.total();
            return Ok(SeriesValue {
                value,
                abs_error: eps * (value.abs() + magnitude),
                terms: k + 1,
            });
        }
        acc.add(term);
        magnitude = magnitude + term.abs() * (from_usize::<T>(k + 2)).sqrt() * lit(2.0);
        let sum = acc.total();
        if ratio.abs() < lit(0.5) && term.abs() <= eps * lit(0.125) * sum.abs() {
            return Ok(SeriesValue {
                value: sum,
                abs_error: eps * (sum.abs() + magnitude),
                terms: k + 2,
            });
        }
    }
    Err(Error::SeriesNonConvergence {
        z: z.to_f64().unwrap_or(f64::NAN),
        terms: MAX_SERIES_TERMS,
    })
}

/// Parameters of `₁F₂(a1; b1, b2; z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyp1F2Params<T> {
    pub a1: T,
    pub b1: T,
    pub b2: T,
    pub z: T,
}

impl<T: Real> Hyp1F2Params<T> {
    pub fn new(a1: T, b1: T, b2: T, z: T) -> Result<Self> {
        for (name, b) in [("b1", b1), ("b2", b2)] {
            if b <= T::zero() && b == b.floor() {
                return Err(Error::invalid(
                    name,
                    "must not be zero or a negative integer",
                ));
            }
        }
        Ok(Self { a1, b1, b2, z })
    }

    /// Parameters of the monomial Hankel integral
    /// `₁F₂(½(γ+2+ν); ½(γ+4+ν), ν+1; -p²ζ²/4)`.
    pub fn monomial(gamma: u32, nu: u32, p: T, zeta: T) -> Self {
        let g: T = from_usize((gamma + nu) as usize);
        let half = lit::<T>(0.5);
        let x = p * zeta * half;
        Self {
            a1: (g + lit(2.0)) * half,
            b1: (g + lit(4.0)) * half,
            b2: from_usize::<T>(nu as usize) + T::one(),
            z: -(x * x),
        }
    }
}

/// `₁F₂` series value with its error estimate, without the precision check.
pub fn hyp1f2_series<T: Real>(params: &Hyp1F2Params<T>) -> Result<SeriesValue<T>> {
    hypergeometric_series(&[params.a1], &[params.b1, params.b2], params.z)
}

/// `₁F₂(a1; b1, b2; z)`, rejecting results whose estimated relative error
/// exceeds [`HYP_REL_TOL`] (or a few thousand ulps for narrower types).
pub fn hyp1f2<T: Real>(params: &Hyp1F2Params<T>) -> Result<T> {
    let s = hyp1f2_series(params)?;
    let tol = lit::<T>(HYP_REL_TOL).max(T::epsilon() * lit(4096.0));
    let rel = s.relative_error();
    if !(rel <= tol) {
        return Err(Error::LossOfPrecision {
            z: params.z.to_f64().unwrap_or(f64::NAN),
            estimate: rel.to_f64().unwrap_or(f64::INFINITY),
        });
    }
    Ok(s.value)
}

/// `₀F₁(; b; z)`.
pub fn hyp0f1<T: Real>(b: T, z: T) -> Result<T> {
    Ok(hypergeometric_series(&[], &[b], z)?.value)
}
