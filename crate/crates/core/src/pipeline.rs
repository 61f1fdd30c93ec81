//! End-to-end transform: expand, then sum the weighted atom transforms.

use rayon::prelude::*;

use crate::expansion::{expand, AtomId, ExpansionCoefficients};
use crate::function::{FunctionSpec, RadialFunction};
use crate::hankel_kernel::{piecewise_hankel, KernelConfig};
use crate::oracle::{gaussian_exact, quadrature_hankel, QuadratureConfig};
use crate::piecewise::PiecewisePoly;
use crate::splines::SplineOrder;
use crate::sum::NeumaierSum;
use crate::{lit, Error, Real, Result};

/// Coefficients below this fraction of the largest magnitude are skipped.
pub const DROP_THRESHOLD: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct TransformRequest<T> {
    pub f: FunctionSpec<T>,
    pub nu: u32,
    pub m: SplineOrder,
    pub radius: T,
    pub max_level: u32,
    pub p_grid: Vec<T>,
    pub kernel: KernelConfig<T>,
}

impl<T: Real> TransformRequest<T> {
    pub fn new(
        f: FunctionSpec<T>,
        nu: u32,
        m: SplineOrder,
        radius: T,
        max_level: u32,
        p_grid: Vec<T>,
    ) -> Result<Self> {
        let req = Self {
            f,
            nu,
            m,
            radius,
            max_level,
            p_grid,
            kernel: KernelConfig::default(),
        };
        req.validate()?;
        Ok(req)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > T::zero() && self.radius.is_finite()) {
            return Err(Error::invalid(
                "R",
                "truncation radius must be positive and finite",
            ));
        }
        validate_grid(&self.p_grid)
    }
}

fn validate_grid<T: Real>(grid: &[T]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("p", "grid is empty"));
    }
    if grid.iter().any(|p| !(p.is_finite() && *p >= T::zero())) {
        return Err(Error::invalid(
            "p",
            "grid points must be finite and non-negative",
        ));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("p", "grid must be strictly increasing"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleComparison<T> {
    pub values: Vec<T>,
    pub abs_errors: Vec<T>,
    pub max_abs_error: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics<T> {
    pub coefficient_count: usize,
    pub dropped_count: usize,
    pub largest_dropped: T,
    /// `f(R)`: how much of the function the truncation cuts off.
    pub truncation_value: T,
    pub oracle: Option<OracleComparison<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformResult<T> {
    pub p_grid: Vec<T>,
    pub values: Vec<T>,
    pub coefficients: ExpansionCoefficients<T>,
    pub diagnostics: Diagnostics<T>,
}

/// `F_ν(p) = Σ c₀ₖ Φ^k(p) + Σ dⱼₖ Ψ^{jk}(p)` on the request grid.
pub fn transform<T: Real>(req: &TransformRequest<T>) -> Result<TransformResult<T>> {
    req.validate()?;
    let coefficients = expand(&req.f, req.m, req.radius, req.max_level)?;
    let series = series_transform(&coefficients, req.nu, &req.p_grid, &req.kernel)?;
    Ok(TransformResult {
        p_grid: req.p_grid.clone(),
        values: series.values,
        diagnostics: Diagnostics {
            coefficient_count: coefficients.len(),
            dropped_count: series.dropped_count,
            largest_dropped: series.largest_dropped,
            truncation_value: req.f.eval(req.radius),
            oracle: None,
        },
        coefficients,
    })
}

/// [`transform`] plus the deviation from [`reference_transform`] at each point.
pub fn transform_with_oracle<T: Real>(req: &TransformRequest<T>) -> Result<TransformResult<T>> {
    let mut result = transform(req)?;
    let cfg = QuadratureConfig::default();
    let values: Vec<T> = req
        .p_grid
        .par_iter()
        .map(|&p| reference_transform(&req.f, req.nu, req.radius, p, &cfg))
        .collect::<Result<_>>()?;
    let abs_errors: Vec<T> = values
        .iter()
        .zip(&result.values)
        .map(|(&o, &s)| (s - o).abs())
        .collect();
    let max_abs_error = abs_errors.iter().copied().fold(T::zero(), T::max);
    result.diagnostics.oracle = Some(OracleComparison {
        values,
        abs_errors,
        max_abs_error,
    });
    Ok(result)
}

/// The independent reference value: the closed form for a ν = 0 Gaussian
/// whose truncation at `R ≥ 8a` is below rounding, quadrature otherwise.
pub fn reference_transform<T: Real>(
    f: &FunctionSpec<T>,
    nu: u32,
    radius: T,
    p: T,
    cfg: &QuadratureConfig<T>,
) -> Result<T> {
    if let FunctionSpec::Gaussian { width, scale } = f {
        if nu == 0 && radius >= *width * lit(8.0) {
            return Ok(*scale * gaussian_exact(*width, p));
        }
    }
    quadrature_hankel(f, nu, radius, p, cfg)
}

/// Series values of a given expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesValues<T> {
    pub values: Vec<T>,
    pub dropped_count: usize,
    pub largest_dropped: T,
}

/// Sums the coefficient-weighted transforms of the atoms of `coeffs`, largest
/// coefficients first, with compensated accumulation.
pub fn series_transform<T: Real>(
    coeffs: &ExpansionCoefficients<T>,
    nu: u32,
    p_grid: &[T],
    kernel: &KernelConfig<T>,
) -> Result<SeriesValues<T>> {
    validate_grid(p_grid)?;
    let largest = coeffs.atoms().map(|(_, c)| c.abs()).fold(T::zero(), T::max);
    let threshold = largest * lit(DROP_THRESHOLD);
    let mut kept: Vec<(AtomId, T)> = Vec::new();
    let mut dropped_count = 0;
    let mut largest_dropped = T::zero();
    for (id, c) in coeffs.atoms() {
        if c == T::zero() || c.abs() < threshold {
            if c != T::zero() {
                dropped_count += 1;
                largest_dropped = largest_dropped.max(c.abs());
            }
        } else {
            kept.push((id, c));
        }
    }
    // Stable: ties keep storage order.
    kept.sort_by(|a, b| {
        b.1.abs()
            .partial_cmp(&a.1.abs())
            .expect("finite coefficients")
    });
    let terms: Vec<(AtomId, T, PiecewisePoly<T>)> = kept
        .into_iter()
        .map(|(id, c)| (id, c, coeffs.atom_poly(id)))
        .collect();

    let values = p_grid
        .par_iter()
        .map(|&p| {
            let mut acc = NeumaierSum::new();
            for (id, c, poly) in &terms {
                let term = *c * piecewise_hankel(poly, nu, p, kernel);
                if !term.is_finite() {
                    return Err(Error::NonFiniteTerm {
                        atom: id.to_string(),
                        p: p.to_f64().unwrap_or(f64::NAN),
                    });
                }
                acc.add(term);
            }
            Ok(acc.total())
        })
        .collect::<Result<_>>()?;
    Ok(SeriesValues {
        values,
        dropped_count,
        largest_dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::bessel_j_trapezoid;

    fn order(m: u32) -> SplineOrder {
        SplineOrder::new(m).unwrap()
    }

    fn grid(n: usize, max: f64) -> Vec<f64> {
        (0..n).map(|i| max * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn constant_disk() {
        for j in 0..3 {
            let req = TransformRequest::new(
                FunctionSpec::constant(1.0f64),
                0,
                order(1),
                1.0,
                j,
                grid(21, 20.0),
            )
            .unwrap();
            let out = transform(&req).unwrap();
            for (&p, &v) in out.p_grid.iter().zip(&out.values) {
                let want = if p == 0.0 {
                    0.5
                } else {
                    bessel_j_trapezoid(1, p) / p
                };
                assert!((v - want).abs() < 1e-9, "J={j} p={p}");
            }
        }
    }

    #[test]
    fn gaussian_against_oracle() {
        let req = TransformRequest::new(
            FunctionSpec::gaussian(1.0f64).unwrap(),
            0,
            order(1),
            8.0,
            3,
            grid(41, 20.0),
        )
        .unwrap();
        let out = transform_with_oracle(&req).unwrap();
        let oracle = out.diagnostics.oracle.unwrap();
        assert!(oracle.max_abs_error < 2e-2);
        assert!(out.diagnostics.truncation_value < 1e-27);
        assert_eq!(out.diagnostics.coefficient_count, 8 * 8);
    }

    #[test]
    fn zero_function_has_zero_error() {
        let req = TransformRequest::new(
            FunctionSpec::constant(0.0f64),
            1,
            order(2),
            3.0,
            2,
            grid(5, 4.0),
        )
        .unwrap();
        let out = transform_with_oracle(&req).unwrap();
        assert!(out.values.iter().all(|&v| v == 0.0));
        assert!(out
            .diagnostics
            .oracle
            .unwrap()
            .abs_errors
            .iter()
            .all(|&e| e == 0.0));
    }

    #[test]
    fn pipeline_is_linear() {
        let f = FunctionSpec::gaussian(1.5f64).unwrap();
        let base = TransformRequest::new(f.clone(), 1, order(2), 6.0, 2, grid(11, 8.0)).unwrap();
        let scaled = TransformRequest {
            f: f.scaled(-3.0),
            ..base.clone()
        };
        let a = transform(&base).unwrap();
        let b = transform(&scaled).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((-3.0 * x - y).abs() < 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn grid_independence() {
        let f = FunctionSpec::ramp();
        let full = TransformRequest::new(f.clone(), 0, order(2), 2.0, 2, grid(9, 16.0)).unwrap();
        let alone = TransformRequest {
            p_grid: vec![full.p_grid[5]],
            ..full.clone()
        };
        let a = transform(&full).unwrap();
        let b = transform(&alone).unwrap();
        assert_eq!(a.values[5].to_bits(), b.values[0].to_bits());
    }

    #[test]
    fn matches_oracle_for_smooth_basis() {
        let f = FunctionSpec::gaussian(1.0f64).unwrap();
        for nu in 0..=2 {
            let req =
                TransformRequest::new(f.clone(), nu, order(3), 8.0, 3, grid(11, 10.0)).unwrap();
            let out = transform_with_oracle(&req).unwrap();
            assert!(
                out.diagnostics.oracle.unwrap().max_abs_error < 1e-4,
                "ν={nu}"
            );
        }
    }

    #[test]
    fn rejects_bad_grids() {
        let f = FunctionSpec::constant(1.0f64);
        assert!(TransformRequest::new(f.clone(), 0, order(1), 1.0, 0, vec![]).is_err());
        assert!(TransformRequest::new(f.clone(), 0, order(1), 1.0, 0, vec![1.0, 1.0]).is_err());
        assert!(TransformRequest::new(f.clone(), 0, order(1), 1.0, 0, vec![-1.0]).is_err());
        assert!(TransformRequest::new(f, 0, order(1), -1.0, 0, vec![1.0]).is_err());
    }

    #[test]
    fn drops_negligible_coefficients() {
        let f = |r: f64| if r < 1.0 { 1.0 } else { 1e-20 };
        let coeffs = expand(&f, order(1), 2.0, 0).unwrap();
        let series = series_transform(&coeffs, 0, &[1.0], &KernelConfig::default()).unwrap();
        assert_eq!(series.dropped_count, 1);
        assert!((series.largest_dropped - 1e-20).abs() < 1e-30);
    }
}
