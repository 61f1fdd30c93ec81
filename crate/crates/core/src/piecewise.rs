//! Compactly supported piecewise polynomials.

use crate::sum::NeumaierSum;
use crate::{from_usize, Error, Real, Result};

/// A function made of polynomial pieces on contiguous intervals.
///
/// Piece `i` lives on `[breakpoints[i], breakpoints[i + 1]]` and is stored in
/// the power basis of the local variable `s = x - breakpoints[i]`. The function
/// is zero outside `[first breakpoint, last breakpoint]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePoly<T> {
    breakpoints: Vec<T>,
    pieces: Vec<Vec<T>>,
    degree: usize,
}

impl<T: Real> PiecewisePoly<T> {
    pub fn new(breakpoints: Vec<T>, pieces: Vec<Vec<T>>) -> Result<Self> {
        if breakpoints.len() < 2 {
            if breakpoints.is_empty() && pieces.is_empty() {
                return Ok(Self::zero());
            }
            return Err(Error::invalid(
                "breakpoints",
                "need at least two breakpoints",
            ));
        }
        if pieces.len() + 1 != breakpoints.len() {
            return Err(Error::invalid(
                "pieces",
                format!(
                    "{} pieces for {} breakpoints",
                    pieces.len(),
                    breakpoints.len()
                ),
            ));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("breakpoints", "must be strictly increasing"));
        }
        if breakpoints.iter().any(|b| !b.is_finite())
            || pieces.iter().flatten().any(|c| !c.is_finite())
        {
            return Err(Error::invalid("pieces", "non-finite entry"));
        }
        Ok(Self::from_parts(breakpoints, pieces))
    }

    /// Builds without validation, padding every piece to a common length.
    pub(crate) fn from_parts(breakpoints: Vec<T>, mut pieces: Vec<Vec<T>>) -> Self {
        let len = pieces.iter().map(Vec::len).max().unwrap_or(1).max(1);
        for p in &mut pieces {
            p.resize(len, T::zero());
        }
        Self {
            breakpoints,
            pieces,
            degree: len - 1,
        }
    }

    /// The identically zero function (no pieces).
    pub fn zero() -> Self {
        Self {
            breakpoints: Vec::new(),
            pieces: Vec::new(),
            degree: 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Vec<T>] {
        &self.pieces
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn support(&self) -> Option<(T, T)> {
        Some((*self.breakpoints.first()?, *self.breakpoints.last()?))
    }

    /// Interval `[a, b]` of piece `i`.
    pub fn interval(&self, i: usize) -> (T, T) {
        (self.breakpoints[i], self.breakpoints[i + 1])
    }

    pub fn eval(&self, x: T) -> T {
        let Some((lo, hi)) = self.support() else {
            return T::zero();
        };
        if !(x >= lo && x <= hi) {
            return T::zero();
        }
        let i = self
            .breakpoints
            .partition_point(|&b| b <= x)
            .saturating_sub(1)
            .min(self.pieces.len() - 1);
        horner(&self.pieces[i], x - self.breakpoints[i])
    }

    /// `order`-th derivative of piece `i` at local coordinate `s`.
    pub fn piece_derivative(&self, i: usize, order: usize, s: T) -> T {
        let c = &self.pieces[i];
        let mut acc = T::zero();
        for d in (order..c.len()).rev() {
            let mut falling = T::one();
            for t in 0..order {
                falling = falling * from_usize(d - t);
            }
            acc = acc * s + c[d] * falling;
        }
        acc
    }

    pub fn scale(&self, factor: T) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|p| p.iter().map(|&c| c * factor).collect())
                .collect(),
            degree: self.degree,
        }
    }

    /// Pointwise sum, on the union of both breakpoint sets.
    pub fn add(&self, other: &Self) -> Self {
        if self.is_empty() {
            return other.clone();
        }
        if other.is_empty() {
            return self.clone();
        }
        let mut knots: Vec<T> = self
            .breakpoints
            .iter()
            .chain(other.breakpoints.iter())
            .copied()
            .collect();
        knots.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        knots.dedup();
        let mut pieces = Vec::with_capacity(knots.len() - 1);
        for w in knots.windows(2) {
            let a = self.local_at(w[0], w[1]);
            let b = other.local_at(w[0], w[1]);
            let n = a.len().max(b.len());
            pieces.push(
                (0..n)
                    .map(|i| {
                        a.get(i).copied().unwrap_or(T::zero())
                            + b.get(i).copied().unwrap_or(T::zero())
                    })
                    .collect(),
            );
        }
        Self::from_parts(knots, pieces)
    }

    /// Coefficients about `a` of the piece covering `[a, b]`, or zero when
    /// `[a, b]` lies outside the support. `[a, b]` must not straddle a
    /// breakpoint.
    fn local_at(&self, a: T, b: T) -> Vec<T> {
        let Some((lo, hi)) = self.support() else {
            return vec![T::zero()];
        };
        if b <= lo || a >= hi {
            return vec![T::zero()];
        }
        let mid = (a + b) / (T::one() + T::one());
        let i = self
            .breakpoints
            .partition_point(|&x| x <= mid)
            .saturating_sub(1)
            .min(self.pieces.len() - 1);
        taylor_shift(&self.pieces[i], a - self.breakpoints[i])
    }

    /// Restriction to `[lo, hi]` (zero outside).
    pub fn restrict(&self, lo: T, hi: T) -> Self {
        let Some((a, b)) = self.support() else {
            return Self::zero();
        };
        let lo = lo.max(a);
        let hi = hi.min(b);
        if !(lo < hi) {
            return Self::zero();
        }
        let mut knots = vec![lo];
        knots.extend(
            self.breakpoints
                .iter()
                .copied()
                .filter(|&x| x > lo && x < hi),
        );
        knots.push(hi);
        let pieces = knots
            .windows(2)
            .map(|w| self.local_at(w[0], w[1]))
            .collect();
        Self::from_parts(knots, pieces)
    }

    /// Exact `∫ x^power · self(x) dx`.
    pub fn moment(&self, power: usize) -> T {
        let mut acc = NeumaierSum::new();
        for (i, c) in self.pieces.iter().enumerate() {
            let (a, b) = self.interval(i);
            let h = b - a;
            // (a + s)^power = Σ_t C(power, t) a^(power - t) s^t
            let mut weight = vec![T::zero(); power + 1];
            for (t, w) in weight.iter_mut().enumerate() {
                *w = binomial::<T>(power, t) * a.powi((power - t) as i32);
            }
            for (d, &cd) in c.iter().enumerate() {
                if cd == T::zero() {
                    continue;
                }
                for (t, &wt) in weight.iter().enumerate() {
                    let e = d + t + 1;
                    acc.add(cd * wt * h.powi(e as i32) / from_usize(e));
                }
            }
        }
        acc.total()
    }

    /// Exact `∫ self(x) other(x) dx`.
    pub fn inner_product(&self, other: &Self) -> T {
        let (Some((a0, b0)), Some((a1, b1))) = (self.support(), other.support()) else {
            return T::zero();
        };
        let lo = a0.max(a1);
        let hi = b0.min(b1);
        if !(lo < hi) {
            return T::zero();
        }
        let mut knots: Vec<T> = self
            .breakpoints
            .iter()
            .chain(other.breakpoints.iter())
            .copied()
            .filter(|&x| x > lo && x < hi)
            .collect();
        knots.push(lo);
        knots.push(hi);
        knots.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        knots.dedup();
        let mut acc = NeumaierSum::new();
        for w in knots.windows(2) {
            let h = w[1] - w[0];
            let p = self.local_at(w[0], w[1]);
            let q = other.local_at(w[0], w[1]);
            for (i, &pi) in p.iter().enumerate() {
                for (j, &qj) in q.iter().enumerate() {
                    let e = i + j + 1;
                    acc.add(pi * qj * h.powi(e as i32) / from_usize(e));
                }
            }
        }
        acc.total()
    }

    /// Every piece as `(a, b, coefficients of x^γ about 0)`.
    pub fn monomial_pieces(&self) -> Vec<(T, T, Vec<T>)> {
        self.pieces
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let (a, b) = self.interval(i);
                (a, b, taylor_shift(c, -a))
            })
            .collect()
    }
}

/// Horner evaluation of `Σ c_i s^i`.
#[inline]
pub fn horner<T: Real>(c: &[T], s: T) -> T {
    c.iter().rev().fold(T::zero(), |acc, &ci| acc * s + ci)
}

/// Re-expands `p(s) = Σ c_i s^i` about a new origin: returns `d` with
/// `Σ d_i u^i = p(u + delta)`.
pub fn taylor_shift<T: Real>(c: &[T], delta: T) -> Vec<T> {
    let n = c.len();
    let mut out = vec![T::zero(); n];
    for (i, &ci) in c.iter().enumerate() {
        if ci == T::zero() {
            continue;
        }
        for (k, o) in out.iter_mut().enumerate().take(i + 1) {
            *o = *o + ci * binomial::<T>(i, k) * delta.powi((i - k) as i32);
        }
    }
    out
}

pub fn binomial<T: Real>(n: usize, k: usize) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    T::from_u128(acc).expect("binomial representable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hat() -> PiecewisePoly<f64> {
        PiecewisePoly::new(vec![0.0, 1.0, 2.0], vec![vec![0.0, 1.0], vec![1.0, -1.0]]).unwrap()
    }

    #[test]
    fn zero_outside_support() {
        let h = hat();
        assert_eq!(h.eval(-0.1), 0.0);
        assert_eq!(h.eval(2.1), 0.0);
        assert_eq!(h.eval(1.0), 1.0);
        assert_eq!(h.eval(0.5), 0.5);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(PiecewisePoly::new(vec![0.0, 0.0], vec![vec![1.0]]).is_err());
        assert!(PiecewisePoly::new(vec![0.0, 1.0], vec![]).is_err());
        assert!(PiecewisePoly::new(vec![0.0, 1.0], vec![vec![f64::NAN]]).is_err());
    }

    #[test]
    fn moments_of_hat() {
        let h = hat();
        assert!((h.moment(0) - 1.0).abs() < 1e-15);
        assert!((h.moment(1) - 1.0).abs() < 1e-15);
        // ∫ x² hat = 7/6
        assert!((h.moment(2) - 7.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn inner_product_of_hat_with_itself() {
        let h = hat();
        assert!((h.inner_product(&h) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn restrict_clips() {
        let r = hat().restrict(0.5, 1.5);
        assert_eq!(r.support(), Some((0.5, 1.5)));
        assert!((r.eval(0.75) - 0.75).abs() < 1e-15);
        assert_eq!(r.eval(0.25), 0.0);
        assert!((r.moment(0) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial::<f64>(5, 2), 10.0);
        assert_eq!(binomial::<f64>(7, 0), 1.0);
        assert_eq!(binomial::<f64>(3, 4), 0.0);
    }

    proptest! {
        #[test]
        fn taylor_shift_preserves_values(
            c in proptest::collection::vec(-3.0f64..3.0, 1..6),
            delta in -2.0f64..2.0,
            u in -1.0f64..1.0,
        ) {
            let d = taylor_shift(&c, delta);
            let lhs = horner(&d, u);
            let rhs = horner(&c, u + delta);
            prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + rhs.abs()));
        }

        #[test]
        fn add_is_pointwise(x in -0.5f64..3.5, s in -2.0f64..2.0) {
            let h = hat();
            let g = PiecewisePoly::new(vec![0.5, 3.0], vec![vec![1.0, 0.5, -0.25]]).unwrap();
            let sum = h.add(&g.scale(s));
            prop_assert!((sum.eval(x) - (h.eval(x) + s * g.eval(x))).abs() < 1e-12);
        }
    }
}
