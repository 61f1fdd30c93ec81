//! Reference transforms: brute-force panel quadrature and exact closed forms.
//!
//! Nothing here touches the series machinery. The Bessel function is computed
//! from its integral representation, and the transform integral by plain
//! Gauss–Legendre panels with doubling.

use crate::function::RadialFunction;
use crate::quadrature::gauss_legendre;
use crate::sum::NeumaierSum;
use crate::{from_usize, lit, Error, Real, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig<T> {
    pub abs_tol: T,
    pub max_panels: usize,
    pub points_per_panel: usize,
}

impl<T: Real> Default for QuadratureConfig<T> {
    fn default() -> Self {
        Self {
            abs_tol: lit(1e-10),
            max_panels: 1_000_000,
            points_per_panel: 16,
        }
    }
}

impl<T: Real> QuadratureConfig<T> {
    pub fn new(abs_tol: T, max_panels: usize, points_per_panel: usize) -> Result<Self> {
        if !(abs_tol > T::zero()) {
            return Err(Error::invalid("abs_tol", "must be positive"));
        }
        if max_panels == 0 {
            return Err(Error::invalid("max_panels", "must be at least 1"));
        }
        if points_per_panel == 0 {
            return Err(Error::invalid("points_per_panel", "must be at least 1"));
        }
        Ok(Self {
            abs_tol,
            max_panels,
            points_per_panel,
        })
    }
}

/// `J_n(x)` as the trapezoid rule for `(1/2π)∫₀^{2π} cos(nτ - x sin τ) dτ`.
///
/// The integrand is periodic and entire, so the rule converges geometrically
/// once the point count exceeds `|x| + n` by a margin.
pub fn bessel_j_trapezoid<T: Real>(n: u32, x: T) -> T {
    let ax = x.abs().to_f64().unwrap_or(0.0);
    let count = (1.1 * ax).ceil() as usize + n as usize + 12 * ax.cbrt().ceil() as usize + 32;
    let step = T::TAU() / from_usize(count);
    let nu: T = from_usize(n as usize);
    let mut acc = NeumaierSum::new();
    for i in 0..count {
        let tau = step * from_usize(i);
        acc.add((nu * tau - x * tau.sin()).cos());
    }
    acc.total() / from_usize(count)
}

/// `∫₀^R f(r) J_ν(pr) r dr` by Gauss–Legendre panels no wider than
/// `min(π/max(p,1), R/8)`, split at the breakpoints of `f`, doubling the panel
/// count until successive estimates differ by less than `abs_tol`.
pub fn quadrature_hankel<T, F>(
    f: &F,
    nu: u32,
    radius: T,
    p: T,
    cfg: &QuadratureConfig<T>,
) -> Result<T>
where
    T: Real,
    F: RadialFunction<T> + ?Sized,
{
    if !(radius > T::zero() && radius.is_finite()) {
        return Err(Error::invalid(
            "R",
            "truncation radius must be positive and finite",
        ));
    }
    if !(p >= T::zero() && p.is_finite()) {
        return Err(Error::invalid(
            "p",
            "frequency must be non-negative and finite",
        ));
    }
    let rule = gauss_legendre(cfg.points_per_panel);
    let width = (T::PI() / p.max(T::one())).min(radius / lit(8.0));

    let mut knots = vec![T::zero(), radius];
    knots.extend(
        f.breakpoints()
            .into_iter()
            .filter(|&x| x > T::zero() && x < radius),
    );
    knots.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    knots.dedup();

    let integrand = |r: T| f.eval(r) * bessel_j_trapezoid(nu, p * r) * r;
    let estimate = |scale: usize| -> (T, usize) {
        let mut acc = NeumaierSum::new();
        let mut used = 0;
        for w in knots.windows(2) {
            let panels = ((w[1] - w[0]) / width)
                .ceil()
                .to_usize()
                .unwrap_or(1)
                .max(1)
                * scale;
            used += panels;
            let h = (w[1] - w[0]) / from_usize(panels);
            for i in 0..panels {
                let a = w[0] + h * from_usize(i);
                let half = h * lit(0.5);
                let mid = a + half;
                for &(x, wt) in rule {
                    acc.add(lit::<T>(wt) * half * integrand(mid + half * lit(x)));
                }
            }
        }
        (acc.total(), used)
    };

    let (mut prev, mut used) = estimate(1);
    let mut scale = 1;
    loop {
        if used * 2 > cfg.max_panels {
            return Err(Error::QuadratureNonConvergence {
                a: 0.0,
                b: radius.to_f64().unwrap_or(f64::NAN),
                limit: cfg.max_panels,
            });
        }
        scale *= 2;
        let (next, n) = estimate(scale);
        used = n;
        if !next.is_finite() {
            return Err(Error::NonFiniteSample { r: f64::NAN });
        }
        let diff = (next - prev).abs();
        prev = next;
        if diff < cfg.abs_tol {
            return Ok(prev);
        }
    }
}

/// The ν = 0 transform of `exp(-(r/a)²)` over `[0, ∞)`: `(a²/2) exp(-p²a²/4)`.
pub fn gaussian_exact<T: Real>(a: T, p: T) -> T {
    let u = p * a * lit(0.5);
    a * a * lit(0.5) * (-(u * u)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::FunctionSpec;
    use crate::hankel_kernel::haar_closed_form;
    use crate::splines::{wavelet_piecewise, SplineOrder, WaveletIndex};

    #[test]
    fn trapezoid_bessel_values() {
        // Reference values from 30-digit arithmetic.
        let cases = [
            (0, 1.0f64, 0.7651976865579666),
            (1, 1.0, 0.4400505857449335),
            (0, 10.0, -0.2459357644513483),
            (2, 5.0, 0.04656511627775222),
            (5, 30.0, -0.143_240_295_512_077_1),
        ];
        for (n, x, want) in cases {
            assert!(
                (bessel_j_trapezoid(n, x) - want).abs() < 1e-14,
                "J_{n}({x})"
            );
        }
    }

    #[test]
    fn constant_disk() {
        let cfg = QuadratureConfig::default();
        let got = quadrature_hankel(&FunctionSpec::constant(1.0f64), 0, 1.0, 3.0, &cfg).unwrap();
        let want = bessel_j_trapezoid(1, 3.0f64) / 3.0;
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn zero_function() {
        let cfg = QuadratureConfig::default();
        let got = quadrature_hankel(&FunctionSpec::constant(0.0f64), 2, 5.0, 7.0, &cfg).unwrap();
        assert_eq!(got, 0.0);
    }

    #[test]
    fn haar_atom_agrees_with_closed_form() {
        let cfg = QuadratureConfig::default();
        let idx = WaveletIndex::new(1, 1);
        let atom = wavelet_piecewise::<f64>(SplineOrder::new(1).unwrap(), idx);
        let got = quadrature_hankel(&atom, 0, 1.0, 2.5, &cfg).unwrap();
        assert!((got - haar_closed_form(idx, 2.5f64)).abs() < 1e-9);
    }

    #[test]
    fn gaussian_examples() {
        assert_eq!(gaussian_exact(1.0f64, 0.0), 0.5);
        assert!((gaussian_exact(1.0f64, 2.0) - 0.18393972058572117).abs() < 1e-16);
        assert!((gaussian_exact(2.0f64, 1.0) - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
        let cfg = QuadratureConfig::default();
        let f = FunctionSpec::gaussian(1.0f64).unwrap();
        let q = quadrature_hankel(&f, 0, 10.0, 2.0, &cfg).unwrap();
        assert!((q - 0.5 * (-1.0f64).exp()).abs() < 1e-9);
        let f = FunctionSpec::gaussian(2.0f64).unwrap();
        let q = quadrature_hankel(&f, 0, 20.0, 1.0, &cfg).unwrap();
        assert!((q - 2.0 * (-1.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn gaussian_closed_form_matches_quadrature() {
        let cfg = QuadratureConfig::default();
        for &a in &[0.5f64, 1.0, 2.0] {
            let f = FunctionSpec::gaussian(a).unwrap();
            for i in 0..=20 {
                let p = i as f64 / a;
                let q = quadrature_hankel(&f, 0, 8.0 * a, p, &cfg).unwrap();
                assert!((q - gaussian_exact(a, p)).abs() < 1e-7, "a={a} p={p}");
            }
        }
    }

    #[test]
    fn scaling_law() {
        let cfg = QuadratureConfig::default();
        let f = FunctionSpec::gaussian(1.0f64).unwrap();
        for &lambda in &[0.5f64, 2.0] {
            let g = FunctionSpec::gaussian(lambda).unwrap();
            for &p in &[0.3f64, 1.0, 4.0] {
                let lhs = quadrature_hankel(&g, 0, 8.0 * lambda, p, &cfg).unwrap();
                let rhs =
                    lambda * lambda * quadrature_hankel(&f, 0, 8.0, lambda * p, &cfg).unwrap();
                assert!((lhs - rhs).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn halving_tolerance_is_stable() {
        let loose = QuadratureConfig::default();
        let tight = QuadratureConfig::new(5e-11f64, 1_000_000, 16).unwrap();
        let corpus = [
            FunctionSpec::constant(1.0f64),
            FunctionSpec::ramp(),
            FunctionSpec::gaussian(1.0).unwrap(),
        ];
        for f in &corpus {
            for nu in 0..=2 {
                for &p in &[0.0f64, 1.5, 12.0] {
                    let a = quadrature_hankel(f, nu, 4.0, p, &loose).unwrap();
                    let b = quadrature_hankel(f, nu, 4.0, p, &tight).unwrap();
                    assert!((a - b).abs() < loose.abs_tol);
                }
            }
        }
    }

    #[test]
    fn panel_budget_is_enforced() {
        let cfg = QuadratureConfig::new(1e-10f64, 4, 16).unwrap();
        let f = FunctionSpec::constant(1.0f64);
        assert!(matches!(
            quadrature_hankel(&f, 0, 8.0, 50.0, &cfg),
            Err(Error::QuadratureNonConvergence { .. })
        ));
        assert!(QuadratureConfig::new(0.0f64, 1, 16).is_err());
    }
}
