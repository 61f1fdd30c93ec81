//! Gauss–Legendre rules and composite integration helpers.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::{from_usize, lit, Error, Real, Result};

type RuleCache = Mutex<HashMap<usize, &'static [(f64, f64)]>>;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
///
/// Nodes are found by Newton iteration on `P_n` in `f64` and cached for the
/// lifetime of the process.
pub fn gauss_legendre(n: usize) -> &'static [(f64, f64)] {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("quadrature cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| Box::leak(compute_gauss_legendre(n).into_boxed_slice()))
}

fn compute_gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut rule = vec![(0.0, 0.0); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule[i] = (-x, w);
        rule[n - 1 - i] = (x, w);
    }
    rule
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Applies an `n`-point rule to `g` on `[a, b]`.
#[inline]
pub fn gauss_panel<T: Real, G: Fn(T) -> T>(g: &G, a: T, b: T, rule: &[(f64, f64)]) -> T {
    let half = (b - a) * lit(0.5);
    let mid = (a + b) * lit(0.5);
    let mut acc = T::zero();
    for &(x, w) in rule {
        acc = acc + lit::<T>(w) * g(mid + half * lit(x));
    }
    acc * half
}

/// Composite rule: `[a, b]` split into `panels` equal panels.
pub fn gauss_composite<T: Real, G: Fn(T) -> T>(
    g: &G,
    a: T,
    b: T,
    panels: usize,
    rule: &[(f64, f64)],
) -> T {
    let width = (b - a) / from_usize(panels);
    let mut acc = crate::sum::NeumaierSum::new();
    for i in 0..panels {
        let lo = a + width * from_usize(i);
        let hi = if i + 1 == panels { b } else { lo + width };
        acc.add(gauss_panel(g, lo, hi, rule));
    }
    acc.total()
}

/// Integral of `g` over `[a, b]` with 8-point Gauss–Legendre cells of width at
/// most `cell`, split at the supplied breakpoints, doubling the cell count until
/// successive estimates agree to `rel_tol`.
pub fn integrate_cells<T: Real, G: Fn(T) -> T>(
    g: &G,
    a: T,
    b: T,
    breaks: &[T],
    cell: T,
    rel_tol: T,
) -> Result<T> {
    if b <= a {
        return Ok(T::zero());
    }
    let rule = gauss_legendre(8);
    let mut segments = Vec::new();
    let mut lo = a;
    let start = breaks.partition_point(|&x| x <= a);
    for &x in &breaks[start..] {
        if x >= b {
            break;
        }
        segments.push((lo, x));
        lo = x;
    }
    segments.push((lo, b));

    let mut total = crate::sum::NeumaierSum::new();
    for (lo, hi) in segments {
        let cells = ((hi - lo) / cell).ceil().to_usize().unwrap_or(1).max(1);
        let mut panels = cells;
        let mut prev = gauss_composite(g, lo, hi, panels, rule);
        let mut converged = false;
        for _ in 0..14 {
            panels *= 2;
            let next = gauss_composite(g, lo, hi, panels, rule);
            let scale = next.abs().max(prev.abs());
            let diff = (next - prev).abs();
            prev = next;
            if diff <= rel_tol * scale || diff <= T::min_positive_value().sqrt() * (hi - lo) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::QuadratureNonConvergence {
                a: lo.to_f64().unwrap_or(f64::NAN),
                b: hi.to_f64().unwrap_or(f64::NAN),
                limit: panels,
            });
        }
        total.add(prev);
    }
    Ok(total.total())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 8, 16, 24] {
            let s: f64 = gauss_legendre(n).iter().map(|&(_, w)| w).sum();
            assert!((s - 2.0).abs() < 1e-14, "n={n}: {s}");
        }
    }

    #[test]
    fn integrates_polynomials_exactly() {
        let rule = gauss_legendre(16);
        for deg in 0..=31u32 {
            let got = gauss_panel(&|x: f64| x.powi(deg as i32), 0.0, 1.0, rule);
            let want = 1.0 / (deg as f64 + 1.0);
            assert!((got - want).abs() < 1e-14, "degree {deg}: {got} vs {want}");
        }
    }

    #[test]
    fn cells_handle_kinks_at_breakpoints() {
        let g = |x: f64| (x - 0.3).abs();
        let got = integrate_cells(&g, 0.0, 1.0, &[0.3], 1.0, 1e-12).unwrap();
        assert!((got - (0.045 + 0.245)).abs() < 1e-14);
    }
}
