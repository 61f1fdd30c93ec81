//! Expansion coefficients of the input function in the spline basis.
//!
//! The function is expanded on `[0, K]` with `K = ⌈R⌉`, taking `f = 0` on
//! `(R, K]`. Atoms are unnormalized: `N_m(r - k)` and `ψ_m(2^j r - k)`, each
//! restricted to `[0, K]`. Level 0 carries the `K + m - 1` scaling atoms with
//! `k = -(m-1)..K-1`; level `j` carries `2^j K` wavelets with
//! `k = -(m-1)..2^j K - m`. Together they span the splines of order `m` on the
//! grid `2^{-J}` restricted to `[0, K]`.

use rayon::prelude::*;

use crate::function::RadialFunction;
use crate::hankel_kernel::AtomKind;
use crate::piecewise::{taylor_shift, PiecewisePoly};
use crate::quadrature::{gauss_composite, gauss_legendre, integrate_cells};
use crate::splines::{scaling_piecewise, wavelet_piecewise_at, SplineOrder};
use crate::sum::NeumaierSum;
use crate::{from_usize, lit, Error, Real, Result};

/// Relative tolerance of the coefficient integrals.
pub const COEFF_REL_TOL: f64 = 1e-11;

/// Largest accepted condition estimate of the scaled Gram matrix.
pub const MAX_CONDITION: f64 = 1e12;

/// Atom scaling convention of stored coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Normalization {
    /// Atoms `N_m(r - k)` and `ψ_m(2^j r - k)` without a `2^{j/2}` factor.
    Unnormalized,
}

/// One atom of the expansion basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomId {
    pub kind: AtomKind,
    /// Wavelet level; 0 for scaling atoms.
    pub level: u32,
    pub k: i64,
}

impl AtomId {
    pub fn scaling(k: i64) -> Self {
        Self {
            kind: AtomKind::Scaling,
            level: 0,
            k,
        }
    }

    pub fn wavelet(level: u32, k: i64) -> Self {
        Self {
            kind: AtomKind::Wavelet,
            level,
            k,
        }
    }

    /// Level column of the coefficient listing: `-1` for scaling atoms.
    pub fn listing_level(&self) -> i64 {
        match self.kind {
            AtomKind::Scaling => -1,
            AtomKind::Wavelet => i64::from(self.level),
        }
    }

    /// The unrestricted atom.
    pub fn poly<T: Real>(&self, m: SplineOrder) -> PiecewisePoly<T> {
        match self.kind {
            AtomKind::Scaling => scaling_piecewise(m, self.k),
            AtomKind::Wavelet => wavelet_piecewise_at(m, self.level, self.k),
        }
    }
}

impl std::fmt::Display for AtomId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.kind {
            AtomKind::Scaling => write!(f, "scaling k={}", self.k),
            AtomKind::Wavelet => write!(f, "wavelet j={} k={}", self.level, self.k),
        }
    }
}

/// Right end `K = ⌈R⌉` of the expansion domain.
pub fn domain_end<T: Real>(radius: T) -> T {
    radius.ceil()
}

/// The retained atoms in storage order: scaling atoms, then wavelets by level.
pub fn basis_atoms(m: SplineOrder, max_level: u32, domain: usize) -> Vec<AtomId> {
    let first = first_shift(m);
    let mut atoms: Vec<AtomId> = (first..domain as i64).map(AtomId::scaling).collect();
    for j in 0..max_level {
        let count = (domain as i64) << j;
        atoms.extend((first..first + count).map(|k| AtomId::wavelet(j, k)));
    }
    atoms
}

fn first_shift(m: SplineOrder) -> i64 {
    1 - i64::from(m.get())
}

fn validate_domain<T: Real>(radius: T, max_level: u32) -> Result<usize> {
    if !(radius > T::zero() && radius.is_finite()) {
        return Err(Error::invalid(
            "R",
            "truncation radius must be positive and finite",
        ));
    }
    if max_level > 20 {
        return Err(Error::invalid("J", "at most 20 levels are supported"));
    }
    domain_end(radius)
        .to_usize()
        .ok_or_else(|| Error::invalid("R", "truncation radius too large"))
}

/// Coefficients of the truncated expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionCoefficients<T> {
    order: SplineOrder,
    max_level: u32,
    radius: T,
    c0: Vec<T>,
    d: Vec<Vec<T>>,
    normalization: Normalization,
    sum: PiecewisePoly<T>,
}

impl<T: Real> ExpansionCoefficients<T> {
    /// `c0[i]` belongs to shift `k = i - (m-1)`, and so does `d[j][i]`.
    pub fn new(
        order: SplineOrder,
        max_level: u32,
        radius: T,
        c0: Vec<T>,
        d: Vec<Vec<T>>,
    ) -> Result<Self> {
        let domain = validate_domain(radius, max_level)?;
        let extra = order.usize() - 1;
        if c0.len() != domain + extra {
            return Err(Error::invalid(
                "c0",
                format!(
                    "expected {} scaling coefficients, got {}",
                    domain + extra,
                    c0.len()
                ),
            ));
        }
        if d.len() != max_level as usize {
            return Err(Error::invalid(
                "d",
                format!("expected {max_level} detail levels, got {}", d.len()),
            ));
        }
        for (j, level) in d.iter().enumerate() {
            if level.len() != domain << j {
                return Err(Error::invalid(
                    "d",
                    format!(
                        "level {j} needs {} coefficients, got {}",
                        domain << j,
                        level.len()
                    ),
                ));
            }
        }
        if c0.iter().chain(d.iter().flatten()).any(|c| !c.is_finite()) {
            return Err(Error::invalid("coefficients", "non-finite coefficient"));
        }
        let mut out = Self {
            order,
            max_level,
            radius,
            c0,
            d,
            normalization: Normalization::Unnormalized,
            sum: PiecewisePoly::zero(),
        };
        out.sum = out.assemble(domain);
        Ok(out)
    }

    pub fn order(&self) -> SplineOrder {
        self.order
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn domain_end(&self) -> T {
        domain_end(self.radius)
    }

    pub fn c0(&self) -> &[T] {
        &self.c0
    }

    pub fn d(&self) -> &[Vec<T>] {
        &self.d
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    /// Shift `k` of the first entry of `c0` and of every `d[j]`.
    pub fn first_shift(&self) -> i64 {
        first_shift(self.order)
    }

    pub fn len(&self) -> usize {
        self.c0.len() + self.d.iter().map(Vec::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every atom with its coefficient, in storage order.
    pub fn atoms(&self) -> impl Iterator<Item = (AtomId, T)> + '_ {
        let first = self.first_shift();
        let scaling = self
            .c0
            .iter()
            .enumerate()
            .map(move |(i, &c)| (AtomId::scaling(first + i as i64), c));
        let wavelets = self.d.iter().enumerate().flat_map(move |(j, level)| {
            level
                .iter()
                .enumerate()
                .map(move |(i, &c)| (AtomId::wavelet(j as u32, first + i as i64), c))
        });
        scaling.chain(wavelets)
    }

    /// The atom restricted to `[0, K]`.
    pub fn atom_poly(&self, id: AtomId) -> PiecewisePoly<T> {
        id.poly(self.order).restrict(T::zero(), self.domain_end())
    }

    /// The reconstruction as one piecewise polynomial on the grid `2^{-J}`.
    pub fn as_piecewise(&self) -> &PiecewisePoly<T> {
        &self.sum
    }

    /// Value of the truncated expansion at `r`; zero outside `[0, K]`.
    pub fn reconstruct(&self, r: T) -> T {
        self.sum.eval(r)
    }

    fn assemble(&self, domain: usize) -> PiecewisePoly<T> {
        let per_unit = 1usize << self.max_level;
        let h = T::one() / from_usize(per_unit);
        let cells = domain * per_unit;
        let mut pieces = vec![vec![T::zero(); self.order.usize()]; cells];
        for (id, c) in self.atoms() {
            if c == T::zero() {
                continue;
            }
            let atom = self.atom_poly(id);
            for (i, local) in atom.pieces().iter().enumerate() {
                let (a, b) = atom.interval(i);
                let first = (a / h).round().to_usize().unwrap_or(0);
                let last = (b / h).round().to_usize().unwrap_or(0).min(cells);
                for (cell, piece) in pieces.iter_mut().enumerate().take(last).skip(first) {
                    let shifted = taylor_shift(local, from_usize::<T>(cell) * h - a);
                    for (p, s) in piece.iter_mut().zip(shifted) {
                        *p = *p + c * s;
                    }
                }
            }
        }
        let grid = (0..=cells).map(|i| from_usize::<T>(i) * h).collect();
        PiecewisePoly::from_parts(grid, pieces)
    }
}

impl<T: Real> RadialFunction<T> for ExpansionCoefficients<T> {
    fn eval(&self, r: T) -> T {
        self.reconstruct(r)
    }

    fn breakpoints(&self) -> Vec<T> {
        self.sum.breakpoints().to_vec()
    }
}

/// `∫_a^b f(r) w(r) dr` with `f` cut off beyond `radius`, reporting non-finite
/// samples of `f`.
fn truncated_integral<T, F, W>(
    f: &F,
    weight: W,
    radius: T,
    a: T,
    b: T,
    breaks: &[T],
    cell: T,
) -> Result<T>
where
    T: Real,
    F: RadialFunction<T> + ?Sized,
    W: Fn(T) -> T,
{
    let b = b.min(radius);
    if !(b > a) {
        return Ok(T::zero());
    }
    let bad = std::cell::Cell::new(None);
    let g = |r: T| {
        let v = f.eval(r);
        if !v.is_finite() && bad.get().is_none() {
            bad.set(Some(r));
        }
        v * weight(r)
    };
    let rel_tol = lit::<T>(COEFF_REL_TOL).max(T::epsilon() * lit(16.0));
    let value = integrate_cells(&g, a, b, breaks, cell, rel_tol);
    if let Some(r) = bad.get() {
        return Err(Error::NonFiniteSample {
            r: r.to_f64().unwrap_or(f64::NAN),
        });
    }
    value
}

fn sorted_breaks<T: Real>(mut breaks: Vec<T>) -> Vec<T> {
    breaks.retain(|x| x.is_finite());
    breaks.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    breaks.dedup();
    breaks
}

/// Haar (`m = 1`) coefficients:
/// `c₀ₖ = ∫_k^{k+1} f` and `dⱼₖ = 2^j (∫ over the left half - ∫ over the right half)`
/// of `[2^{-j}k, 2^{-j}(k+1)]`.
pub fn haar_coefficients<T, F>(f: &F, radius: T, max_level: u32) -> Result<ExpansionCoefficients<T>>
where
    T: Real,
    F: RadialFunction<T> + ?Sized,
{
    let domain = validate_domain(radius, max_level)?;
    let per_unit = 1usize << max_level;
    let h = T::one() / from_usize(per_unit);
    let mut breaks = f.breakpoints();
    breaks.push(radius);
    let breaks = sorted_breaks(breaks);
    let cells: Vec<T> = (0..domain * per_unit)
        .into_par_iter()
        .map(|i| {
            let a = from_usize::<T>(i) * h;
            truncated_integral(f, |_| T::one(), radius, a, a + h, &breaks, h)
        })
        .collect::<Result<_>>()?;

    let block_sum = |start: usize, len: usize| -> T {
        cells[start..start + len]
            .iter()
            .copied()
            .collect::<NeumaierSum<T>>()
            .total()
    };
    let c0 = (0..domain)
        .map(|k| block_sum(k * per_unit, per_unit))
        .collect();
    let d = (0..max_level)
        .map(|j| {
            let half = per_unit >> (j + 1);
            let factor = lit::<T>(2.0).powi(j as i32);
            (0..domain << j)
                .map(|k| {
                    let start = 2 * k * half;
                    factor * (block_sum(start, half) - block_sum(start + half, half))
                })
                .collect()
        })
        .collect();
    ExpansionCoefficients::new(SplineOrder::new(1)?, max_level, radius, c0, d)
}

/// Least-squares coefficients on `[0, K]`: solves the Gram system of the
/// retained atoms against the inner products `⟨f, atom⟩`.
pub fn gram_coefficients<T, F>(
    f: &F,
    m: SplineOrder,
    radius: T,
    max_level: u32,
) -> Result<ExpansionCoefficients<T>>
where
    T: Real,
    F: RadialFunction<T> + ?Sized,
{
    let domain = validate_domain(radius, max_level)?;
    let end: T = from_usize(domain);
    let atoms = basis_atoms(m, max_level, domain);
    let polys: Vec<PiecewisePoly<T>> = atoms
        .par_iter()
        .map(|id| id.poly(m).restrict(T::zero(), end))
        .collect();
    let cell = T::one() / from_usize(1usize << max_level);
    let f_breaks = f.breakpoints();

    let rhs: Vec<T> = polys
        .par_iter()
        .map(|poly| {
            let Some((a, b)) = poly.support() else {
                return Ok(T::zero());
            };
            let mut breaks = f_breaks.clone();
            breaks.extend_from_slice(poly.breakpoints());
            breaks.push(radius);
            let breaks = sorted_breaks(breaks);
            truncated_integral(f, |r| poly.eval(r), radius, a, b, &breaks, cell)
        })
        .collect::<Result<_>>()?;

    let n = atoms.len();
    let supports: Vec<(T, T)> = polys
        .iter()
        .map(|p| p.support().unwrap_or((T::zero(), T::zero())))
        .collect();
    let gram: Vec<T> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let polys = &polys;
            let supports = &supports;
            (0..n).map(move |k| {
                let (a0, b0) = supports[i];
                let (a1, b1) = supports[k];
                if a0.max(a1) < b0.min(b1) {
                    polys[i].inner_product(&polys[k])
                } else {
                    T::zero()
                }
            })
        })
        .collect();

    let x = solve_gram(gram, rhs, n)?;
    let extra = m.usize() - 1;
    let (c0, rest) = x.split_at(domain + extra);
    let mut d = Vec::with_capacity(max_level as usize);
    let mut offset = 0;
    for j in 0..max_level as usize {
        let len = domain << j;
        d.push(rest[offset..offset + len].to_vec());
        offset += len;
    }
    ExpansionCoefficients::new(m, max_level, radius, c0.to_vec(), d)
}

/// Haar formulas for `m = 1`, Gram projection otherwise.
pub fn expand<T, F>(
    f: &F,
    m: SplineOrder,
    radius: T,
    max_level: u32,
) -> Result<ExpansionCoefficients<T>>
where
    T: Real,
    F: RadialFunction<T> + ?Sized,
{
    if m.get() == 1 {
        haar_coefficients(f, radius, max_level)
    } else {
        gram_coefficients(f, m, radius, max_level)
    }
}

/// `‖f - reconstruction‖` in `L²([0, K])`, with `f` cut off beyond `R`.
pub fn l2_error<T, F>(coeffs: &ExpansionCoefficients<T>, f: &F) -> T
where
    T: Real,
    F: RadialFunction<T> + ?Sized,
{
    let radius = coeffs.radius();
    let mut knots = coeffs.as_piecewise().breakpoints().to_vec();
    knots.extend(f.breakpoints());
    knots.push(radius);
    let end = coeffs.domain_end();
    knots.retain(|&x| x >= T::zero() && x <= end);
    let knots = sorted_breaks(knots);
    let rule = gauss_legendre(16);
    let g = |r: T| {
        let fr = if r <= radius { f.eval(r) } else { T::zero() };
        let e = fr - coeffs.reconstruct(r);
        e * e
    };
    let mut acc = NeumaierSum::new();
    for w in knots.windows(2) {
        acc.add(gauss_composite(&g, w[0], w[1], 4, rule));
    }
    acc.total().max(T::zero()).sqrt()
}

/// Solves `G x = b` for the symmetric positive definite Gram matrix `G`
/// (row-major, `n × n`) after symmetric diagonal scaling.
fn solve_gram<T: Real>(mut g: Vec<T>, b: Vec<T>, n: usize) -> Result<Vec<T>> {
    let scale: Vec<T> = (0..n)
        .map(|i| {
            let d = g[i * n + i];
            if d > T::zero() {
                T::one() / d.sqrt()
            } else {
                T::zero()
            }
        })
        .collect();
    if scale.iter().any(|&s| s == T::zero()) {
        return Err(Error::IllConditioned {
            estimate: f64::INFINITY,
        });
    }
    for i in 0..n {
        for k in 0..n {
            g[i * n + k] = g[i * n + k] * scale[i] * scale[k];
        }
    }
    let scaled = g.clone();
    let chol = cholesky(g, n).ok_or(Error::IllConditioned {
        estimate: f64::INFINITY,
    })?;
    let estimate = condition_estimate(&scaled, &chol, n);
    if !(estimate <= lit(MAX_CONDITION)) {
        return Err(Error::IllConditioned {
            estimate: estimate.to_f64().unwrap_or(f64::INFINITY),
        });
    }
    let rhs: Vec<T> = b.iter().zip(&scale).map(|(&bi, &s)| bi * s).collect();
    let y = cholesky_solve(&chol, &rhs, n);
    Ok(y.iter().zip(&scale).map(|(&yi, &s)| yi * s).collect())
}

/// Lower Cholesky factor, row-major; `None` if a pivot is not positive.
fn cholesky<T: Real>(mut a: Vec<T>, n: usize) -> Option<Vec<T>> {
    for j in 0..n {
        let mut diag = a[j * n + j];
        for k in 0..j {
            diag = diag - a[j * n + k] * a[j * n + k];
        }
        if !(diag > T::zero()) {
            return None;
        }
        let diag = diag.sqrt();
        a[j * n + j] = diag;
        for i in j + 1..n {
            let mut v = a[i * n + j];
            for k in 0..j {
                v = v - a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = v / diag;
        }
        for k in j + 1..n {
            a[j * n + k] = T::zero();
        }
    }
    Some(a)
}

fn cholesky_solve<T: Real>(l: &[T], b: &[T], n: usize) -> Vec<T> {
    let mut y = b.to_vec();
    for i in 0..n {
        let mut v = y[i];
        for k in 0..i {
            v = v - l[i * n + k] * y[k];
        }
        y[i] = v / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut v = y[i];
        for k in i + 1..n {
            v = v - l[k * n + i] * y[k];
        }
        y[i] = v / l[i * n + i];
    }
    y
}

/// `λ_max / λ_min` from power and inverse iteration.
fn condition_estimate<T: Real>(a: &[T], chol: &[T], n: usize) -> T {
    const ITERATIONS: usize = 40;
    let start: Vec<T> = (0..n)
        .map(|i| lit::<T>(((i as f64 + 1.0) * 0.7548776662466927).fract() + 0.5))
        .collect();
    let normalize = |v: &mut Vec<T>| {
        let norm = v.iter().map(|&x| x * x).sum::<T>().sqrt();
        for x in v.iter_mut() {
            *x = *x / norm;
        }
        norm
    };

    let mut v = start.clone();
    normalize(&mut v);
    let mut lambda_max = T::zero();
    for _ in 0..ITERATIONS {
        let mut w: Vec<T> = (0..n)
            .map(|i| (0..n).map(|k| a[i * n + k] * v[k]).sum())
            .collect();
        lambda_max = normalize(&mut w);
        v = w;
    }

    let mut v = start;
    normalize(&mut v);
    let mut inv_min = T::zero();
    for _ in 0..ITERATIONS {
        let mut w = cholesky_solve(chol, &v, n);
        inv_min = normalize(&mut w);
        v = w;
    }
    lambda_max * inv_min
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::FunctionSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn order(m: u32) -> SplineOrder {
        SplineOrder::new(m).unwrap()
    }

    #[test]
    fn constant_has_no_detail() {
        let c = haar_coefficients(&FunctionSpec::constant(1.0f64), 4.0, 2).unwrap();
        assert_eq!(c.c0().len(), 4);
        for &v in c.c0() {
            assert!((v - 1.0).abs() < 1e-14);
        }
        assert!(c.d().iter().flatten().all(|v| v.abs() < 1e-14));
        for &r in &[0.0, 0.3, 1.7, 3.99, 4.0] {
            assert!((c.reconstruct(r) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn ramp_level_one() {
        let c = haar_coefficients(&FunctionSpec::ramp(), 1.0f64, 1).unwrap();
        assert!((c.c0()[0] - 0.5).abs() < 1e-14);
        // 2^0 (∫_0^½ r - ∫_½^1 r) = 1/8 - 3/8
        assert!((c.d()[0][0] + 0.25).abs() < 1e-14);
        assert!((c.reconstruct(0.2) - 0.25).abs() < 1e-14);
        assert!((c.reconstruct(0.7) - 0.75).abs() < 1e-14);
    }

    #[test]
    fn ramp_cell_average() {
        let c = haar_coefficients(&FunctionSpec::ramp(), 1.0f64, 3).unwrap();
        // Cell [0.25, 0.375]: mean of r is 0.3125.
        let brute = (0..1000)
            .map(|i| 0.25 + 0.125 * (i as f64 + 0.5) / 1000.0)
            .sum::<f64>()
            / 1000.0;
        assert!((c.reconstruct(0.3) - brute).abs() < 1e-12);
    }

    #[test]
    fn haar_round_trip_on_dyadic_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let level = 4;
        let cells = 3 * 16;
        let values: Vec<f64> = (0..cells).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let grid = (0..=cells).map(|i| i as f64 / 16.0).collect();
        let poly = PiecewisePoly::new(grid, values.iter().map(|&v| vec![v]).collect()).unwrap();
        let c = haar_coefficients(&poly, 3.0, level).unwrap();
        for (i, &v) in values.iter().enumerate() {
            let r = (i as f64 + 0.5) / 16.0;
            assert!((c.reconstruct(r) - v).abs() < 1e-12);
        }
    }

    #[test]
    fn gram_reduces_to_haar() {
        let f = FunctionSpec::gaussian(1.0f64).unwrap();
        let haar = haar_coefficients(&f, 4.0, 3).unwrap();
        let gram = gram_coefficients(&f, order(1), 4.0, 3).unwrap();
        for ((_, a), (_, b)) in haar.atoms().zip(gram.atoms()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn basis_dimension_and_conditioning() {
        for m in 1..=4 {
            for j in 0..=4 {
                let c =
                    gram_coefficients(&FunctionSpec::constant(1.0f64), order(m), 5.0, j).unwrap();
                assert_eq!(c.len(), (5 << j) + m as usize - 1);
            }
        }
    }

    #[test]
    fn polynomial_reproduction() {
        for m in 2..=4 {
            let power = m - 1;
            let f = FunctionSpec::monomial(power).scaled(0.1f64);
            for j in 0..=2 {
                let c = gram_coefficients(&f, order(m), 8.0, j).unwrap();
                for i in 0..=80 {
                    let r = 0.1 * i as f64;
                    let want = 0.1 * r.powi(power as i32);
                    assert!(
                        (c.reconstruct(r) - want).abs() <= 1e-9 * want.abs().max(1.0),
                        "m={m} J={j} r={r}"
                    );
                }
            }
        }
    }

    #[test]
    fn projection_is_idempotent() {
        let f = FunctionSpec::gaussian(1.0f64).unwrap();
        let c = gram_coefficients(&f, order(2), 8.0, 3).unwrap();
        let again = gram_coefficients(&c, order(2), 8.0, 3).unwrap();
        for ((_, a), (_, b)) in c.atoms().zip(again.atoms()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn smoother_basis_approximates_better() {
        let f = FunctionSpec::gaussian(1.0f64).unwrap();
        let e1 = l2_error(&expand(&f, order(1), 8.0, 3).unwrap(), &f);
        let e2 = l2_error(&expand(&f, order(2), 8.0, 3).unwrap(), &f);
        assert!(e2 < e1, "{e2} vs {e1}");
    }

    #[test]
    fn error_decreases_with_level() {
        let f = FunctionSpec::gaussian(1.0f64).unwrap();
        for m in 1..=2 {
            let errors: Vec<f64> = (1..=5)
                .map(|j| l2_error(&expand(&f, order(m), 8.0, j).unwrap(), &f))
                .collect();
            for w in errors.windows(2) {
                assert!(w[1] <= w[0], "m={m}: {errors:?}");
            }
        }
    }

    #[test]
    fn perturbing_projection_increases_error() {
        let f = FunctionSpec::gaussian(1.0f64).unwrap();
        let c = gram_coefficients(&f, order(2), 8.0, 2).unwrap();
        let base = l2_error(&c, &f);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let mut c0 = c.c0().to_vec();
            let mut d = c.d().to_vec();
            let total = c.len();
            let pick = rng.gen_range(0..total);
            if pick < c0.len() {
                c0[pick] += 1e-3;
            } else {
                let mut idx = pick - c0.len();
                let level = d.iter().position(|l| {
                    if idx < l.len() {
                        true
                    } else {
                        idx -= l.len();
                        false
                    }
                });
                d[level.unwrap()][idx] += 1e-3;
            }
            let moved = ExpansionCoefficients::new(order(2), 2, 8.0, c0, d).unwrap();
            assert!(l2_error(&moved, &f) > base);
        }
    }

    #[test]
    fn coefficients_are_linear() {
        let f = FunctionSpec::gaussian(1.0f64).unwrap();
        let g = FunctionSpec::ramp();
        let h = |r: f64| 2.0 * f.eval(r) - 0.5 * g.eval(r);
        for m in 1..=2 {
            let cf = expand(&f, order(m), 4.0, 2).unwrap();
            let cg = expand(&g, order(m), 4.0, 2).unwrap();
            let ch = expand(&h, order(m), 4.0, 2).unwrap();
            for (((_, a), (_, b)), (_, c)) in cf.atoms().zip(cg.atoms()).zip(ch.atoms()) {
                assert!((2.0 * a - 0.5 * b - c).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn truncation_beyond_radius() {
        let c = haar_coefficients(&FunctionSpec::constant(1.0f64), 2.5, 1).unwrap();
        assert_eq!(c.c0().len(), 3);
        assert!((c.c0()[2] - 0.5).abs() < 1e-14);
        assert!((c.reconstruct(2.25) - 1.0).abs() < 1e-14);
        assert!(c.reconstruct(2.75).abs() < 1e-14);
    }

    #[test]
    fn non_finite_samples_are_reported() {
        let f = |r: f64| if r > 1.0 { f64::NAN } else { 1.0 };
        assert!(matches!(
            haar_coefficients(&f, 2.0, 1),
            Err(Error::NonFiniteSample { .. })
        ));
    }

    #[test]
    fn validation() {
        let f = FunctionSpec::constant(1.0f64);
        assert!(haar_coefficients(&f, 0.0, 1).is_err());
        assert!(haar_coefficients(&f, f64::INFINITY, 1).is_err());
        assert!(ExpansionCoefficients::new(order(1), 1, 1.0f64, vec![1.0], vec![]).is_err());
        assert!(ExpansionCoefficients::new(order(1), 0, 1.0f64, vec![f64::NAN], vec![]).is_err());
    }

    #[test]
    fn listing_level() {
        assert_eq!(AtomId::scaling(-1).listing_level(), -1);
        assert_eq!(AtomId::wavelet(3, 2).listing_level(), 3);
    }
}
