//! Cardinal B-splines and the semi-orthogonal spline wavelets built from them.
//!
//! The scaling function of order `m` is the B-spline `N_m` with knots
//! `0, 1, …, m`. The wavelet is
//!
//! ```text
//! ψ_m(r) = Σ_{n=0}^{3m-2} q_n N_m(2r - n),
//! q_n    = (-1)^n / 2^{m-1} · Σ_{l=0}^{m} C(m, l) N_{2m}(n + 1 - l),
//! ```
//!
//! supported on `[0, 2m - 1]` with `m` vanishing moments. Atoms at level `j`
//! and shift `k` are the unnormalized `ψ_m(2^j r - k)`.

use crate::piecewise::{binomial, PiecewisePoly};
use crate::{from_i64, from_usize, lit, Error, Real, Result};

/// Order of a B-spline (polynomial degree + 1). `m = 1` is the Haar case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SplineOrder(u32);

impl SplineOrder {
    /// Orders above this are rejected: the binomial re-expansions of
    /// higher-degree pieces lose too many digits in double precision.
    pub const MAX: u32 = 8;

    pub fn new(m: u32) -> Result<Self> {
        if m == 0 || m > Self::MAX {
            return Err(Error::invalid(
                "m",
                format!("spline order must be in 1..={}, got {m}", Self::MAX),
            ));
        }
        Ok(Self(m))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub(crate) fn usize(self) -> usize {
        self.0 as usize
    }

    /// Support length of `N_m`.
    pub fn scaling_support(self) -> u32 {
        self.0
    }

    /// Support length of `ψ_m`.
    pub fn wavelet_support(self) -> u32 {
        2 * self.0 - 1
    }
}

impl std::fmt::Display for SplineOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Dyadic level `j` and translation `k` of a wavelet atom `ψ(2^j r - k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WaveletIndex {
    pub j: u32,
    pub k: u32,
}

impl WaveletIndex {
    pub fn new(j: u32, k: u32) -> Self {
        Self { j, k }
    }

    /// Support `[2^{-j} k, 2^{-j} (k + 2m - 1)]` of `ψ_m(2^j r - k)`.
    pub fn support<T: Real>(self, m: SplineOrder) -> (T, T) {
        let scale = lit::<T>(0.5).powi(self.j as i32);
        let k: T = from_usize(self.k as usize);
        (
            k * scale,
            (k + from_usize(m.wavelet_support() as usize)) * scale,
        )
    }
}

/// `N_m(x)` by the Cox–de Boor recurrence on the integer knots `0..=m`.
pub fn bspline_eval<T: Real>(m: SplineOrder, x: T) -> T {
    let m = m.usize();
    let upper: T = from_usize(m);
    if !(x >= T::zero() && x < upper) {
        return T::zero();
    }
    // b[i] holds N_k(x - i) for the current order k.
    let mut b = vec![T::zero(); m + 1];
    let cell = x.floor().to_usize().unwrap_or(0).min(m - 1);
    b[cell] = T::one();
    for k in 2..=m {
        let denom: T = from_usize(k - 1);
        for i in 0..=(m - k) {
            let fi: T = from_usize(i);
            let left = (x - fi) * b[i];
            let right = (fi + from_usize(k) - x) * b[i + 1];
            b[i] = (left + right) / denom;
        }
    }
    b[0]
}

/// Power-basis pieces of `N_m`: entry `α - 1` is the polynomial on
/// `[α - 1, α]` in the local variable `t = x - α + 1`.
pub fn bspline_pieces<T: Real>(m: SplineOrder) -> Vec<Vec<T>> {
    let mut pieces = vec![vec![T::one()]];
    for order in 2..=m.usize() {
        let denom: T = from_usize(order - 1);
        let mut next = Vec::with_capacity(order);
        for i in 0..order {
            let mut poly = vec![T::zero(); order];
            let fi: T = from_usize(i);
            // (t + i) · P_{order-1}[i](t)
            if let Some(p) = pieces.get(i) {
                for (d, &c) in p.iter().enumerate() {
                    poly[d] = poly[d] + fi * c;
                    poly[d + 1] = poly[d + 1] + c;
                }
            }
            // (order - i - t) · P_{order-1}[i-1](t)
            if i >= 1 {
                let w: T = from_usize(order - i);
                for (d, &c) in pieces[i - 1].iter().enumerate() {
                    poly[d] = poly[d] + w * c;
                    poly[d + 1] = poly[d + 1] - c;
                }
            }
            next.push(poly.into_iter().map(|c| c / denom).collect());
        }
        pieces = next;
    }
    pieces
}

/// The two-scale coefficients `q_0, …, q_{3m-2}` of `ψ_m`.
pub fn wavelet_coeffs<T: Real>(m: SplineOrder) -> Vec<T> {
    let order = m.usize();
    let double = SplineOrder(2 * m.get());
    let norm = lit::<T>(0.5).powi(order as i32 - 1);
    (0..=(3 * order - 2))
        .map(|n| {
            let mut acc = T::zero();
            for l in 0..=order {
                let arg = n as i64 + 1 - l as i64;
                acc = acc + binomial::<T>(order, l) * bspline_eval(double, from_i64::<T>(arg));
            }
            let sign = if n % 2 == 0 { T::one() } else { -T::one() };
            sign * norm * acc
        })
        .collect()
}

/// `ψ_m(2^j r - k)` as a piecewise polynomial in `r`.
pub fn wavelet_piecewise<T: Real>(m: SplineOrder, idx: WaveletIndex) -> PiecewisePoly<T> {
    wavelet_piecewise_at(m, idx.j, i64::from(idx.k))
}

/// [`wavelet_piecewise`] for any integer shift, including the negative shifts
/// of atoms straddling `r = 0`.
pub fn wavelet_piecewise_at<T: Real>(m: SplineOrder, j: u32, k: i64) -> PiecewisePoly<T> {
    let order = m.usize();
    let q = wavelet_coeffs::<T>(m);
    let base = bspline_pieces::<T>(m);
    // With y = 2^{j+1} r the atom is Σ_n q_n N_m(y - 2k - n); its pieces are the
    // unit y-intervals [2k + i, 2k + i + 1], i = 0..4m-2.
    let scale = lit::<T>(2.0).powi(j as i32 + 1);
    let inv_scale = T::one() / scale;
    let shift = 2 * k;
    let count = 4 * order - 2;
    let breakpoints = (0..=count)
        .map(|i| from_i64::<T>(shift + i as i64) * inv_scale)
        .collect();
    let pieces = (0..count)
        .map(|i| {
            let mut poly = vec![T::zero(); order];
            for (n, &qn) in q.iter().enumerate() {
                if n > i || i - n >= order {
                    continue;
                }
                for (d, &c) in base[i - n].iter().enumerate() {
                    poly[d] = poly[d] + qn * c;
                }
            }
            // t = scale · s
            let mut factor = T::one();
            for c in poly.iter_mut() {
                *c = *c * factor;
                factor = factor * scale;
            }
            poly
        })
        .collect();
    PiecewisePoly::from_parts(breakpoints, pieces)
}

/// `N_m(r - k)` as a piecewise polynomial.
pub fn scaling_piecewise<T: Real>(m: SplineOrder, k: i64) -> PiecewisePoly<T> {
    let order = m.usize();
    let breakpoints = (0..=order).map(|i| from_i64::<T>(k + i as i64)).collect();
    PiecewisePoly::from_parts(breakpoints, bspline_pieces(m))
}

/// `N_m(2^j r - k)` as a piecewise polynomial.
pub fn scaling_piecewise_at<T: Real>(m: SplineOrder, j: u32, k: i64) -> PiecewisePoly<T> {
    if j == 0 {
        return scaling_piecewise(m, k);
    }
    let order = m.usize();
    let scale = lit::<T>(2.0).powi(j as i32);
    let inv_scale = T::one() / scale;
    let breakpoints = (0..=order)
        .map(|i| from_i64::<T>(k + i as i64) * inv_scale)
        .collect();
    let pieces = bspline_pieces::<T>(m)
        .into_iter()
        .map(|p| {
            let mut factor = T::one();
            p.into_iter()
                .map(|c| {
                    let v = c * factor;
                    factor = factor * scale;
                    v
                })
                .collect()
        })
        .collect();
    PiecewisePoly::from_parts(breakpoints, pieces)
}

/// `ψ_m(2^j r - k)` by direct summation of the two-scale relation.
pub fn wavelet_eval<T: Real>(m: SplineOrder, idx: WaveletIndex, r: T) -> T {
    let y = r * lit::<T>(2.0).powi(idx.j as i32 + 1) - from_usize::<T>(2 * idx.k as usize);
    wavelet_coeffs::<T>(m)
        .iter()
        .enumerate()
        .map(|(n, &qn)| qn * bspline_eval(m, y - from_usize(n)))
        .fold(T::zero(), |a, b| a + b)
}

/// Bernstein coefficients of `N_m` restricted to `[α - 1, α]`.
///
/// Returns `a_0, …, a_{m-1}` with
/// `N_m(y) = Σ_l a_l C(m-1, l) (1-t)^{m-1-l} t^l`, `t = y - α + 1`.
pub fn bernstein_coeffs<T: Real>(m: SplineOrder, alpha: u32) -> Result<Vec<T>> {
    if alpha == 0 || alpha > m.get() {
        return Err(Error::invalid(
            "alpha",
            format!("must be in 1..={}, got {alpha}", m.get()),
        ));
    }
    let power = &bspline_pieces::<T>(m)[alpha as usize - 1];
    let degree = m.usize() - 1;
    Ok((0..=degree)
        .map(|l| {
            (0..=l)
                .map(|i| binomial::<T>(l, i) / binomial::<T>(degree, i) * power[i])
                .fold(T::zero(), |a, b| a + b)
        })
        .collect())
}

/// Evaluates a Bernstein expansion of degree `coeffs.len() - 1` at `t`.
pub fn bernstein_eval<T: Real>(coeffs: &[T], t: T) -> T {
    let d = coeffs.len() - 1;
    coeffs
        .iter()
        .enumerate()
        .map(|(l, &a)| {
            a * binomial::<T>(d, l) * (T::one() - t).powi((d - l) as i32) * t.powi(l as i32)
        })
        .fold(T::zero(), |a, b| a + b)
}
