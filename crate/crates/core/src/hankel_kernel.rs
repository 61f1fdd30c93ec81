//! Closed-form Hankel transforms of monomials and spline atoms.
//!
//! The building block is
//!
//! ```text
//! ∫₀^ζ r^{γ+1} J_ν(pr) dr = p^ν ζ^{γ+2+ν} / (2^ν (γ+2+ν) Γ(ν+1))
//!                           · ₁F₂(½(γ+2+ν); ½(γ+4+ν), ν+1; -p²ζ²/4).
//! ```
//!
//! A polynomial piece on `[a, b]` re-expanded in powers of `r` transforms into
//! differences of these integrals at `b` and `a`. The ₁F₂ series cancels badly
//! once `pζ` grows, so every piece carries an error estimate and falls back to
//! Gauss–Legendre panel quadrature (panels no wider than `π/p`) when the
//! estimate exceeds its budget or `p²ζ²/4` exceeds [`Z_SWITCH`].

use crate::piecewise::{binomial, horner, taylor_shift, PiecewisePoly};
use crate::quadrature::{gauss_legendre, gauss_panel};
use crate::specfun::{bessel_j, factorial, hyp1f2, hyp1f2_series, Hyp1F2Params, SeriesValue};
use crate::splines::{
    bernstein_coeffs, scaling_piecewise_at, wavelet_coeffs, wavelet_piecewise, SplineOrder,
    WaveletIndex,
};
use crate::sum::NeumaierSum;
use crate::{from_i64, from_usize, lit, Error, Real, Result};

/// Largest `|z| = p²ζ²/4` at which the ₁F₂ series is used.
///
/// The series terms peak near `I₀(pζ)` while the sum decays like
/// `(pζ)^{-3/2}`; at `pζ = 8` the peak is about `4·10²`, which keeps the
/// worst-case cancellation of the literal wavelet sum within `1e-9`.
pub const Z_SWITCH: f64 = 16.0;

/// Points per Gauss–Legendre panel on the quadrature path.
pub const PANEL_POINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig<T> {
    /// Series/quadrature switch on `|z|`.
    pub z_switch: T,
    /// A piece is evaluated by series only if the estimated rounding error is
    /// below this fraction of `∫|piece(r)| r dr`.
    pub piece_rel_tol: T,
}

impl<T: Real> Default for KernelConfig<T> {
    fn default() -> Self {
        Self {
            z_switch: lit(Z_SWITCH),
            piece_rel_tol: lit::<T>(1e-12).max(T::epsilon() * lit(64.0)),
        }
    }
}

/// `∫₀^ζ r^γ J_ν(pr) r dr`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonomialIntegralQuery<T> {
    pub gamma: u32,
    pub nu: u32,
    pub zeta: T,
    pub p: T,
}

impl<T: Real> MonomialIntegralQuery<T> {
    pub fn new(gamma: u32, nu: u32, zeta: T, p: T) -> Result<Self> {
        if !(zeta > T::zero() && zeta.is_finite()) {
            return Err(Error::invalid(
                "zeta",
                "upper limit must be positive and finite",
            ));
        }
        if !(p >= T::zero() && p.is_finite()) {
            return Err(Error::invalid(
                "p",
                "frequency must be non-negative and finite",
            ));
        }
        Ok(Self { gamma, nu, zeta, p })
    }

    fn z(&self) -> T {
        let x = self.p * self.zeta * lit(0.5);
        x * x
    }
}

/// Closed form of the monomial integral with the ₁F₂ rounding estimate.
pub fn monomial_series<T: Real>(gamma: u32, nu: u32, zeta: T, p: T) -> Result<SeriesValue<T>> {
    if zeta == T::zero() {
        return Ok(SeriesValue {
            value: T::zero(),
            abs_error: T::zero(),
            terms: 0,
        });
    }
    if nu > 0 && p == T::zero() {
        return Ok(SeriesValue {
            value: T::zero(),
            abs_error: T::zero(),
            terms: 0,
        });
    }
    let f = hyp1f2_series(&Hyp1F2Params::monomial(gamma, nu, p, zeta))?;
    let prefactor = monomial_prefactor(gamma, nu, zeta, p);
    Ok(SeriesValue {
        value: prefactor * f.value,
        abs_error: prefactor.abs() * f.abs_error,
        terms: f.terms,
    })
}

/// `(pζ/2)^ν / ν! · ζ^{γ+2} / (γ+2+ν)`.
fn monomial_prefactor<T: Real>(gamma: u32, nu: u32, zeta: T, p: T) -> T {
    let half_x = p * zeta * lit(0.5);
    half_x.powi(nu as i32) / factorial::<T>(nu) * zeta.powi(gamma as i32 + 2)
        / from_usize((gamma + 2 + nu) as usize)
}

/// The monomial integral by panel quadrature on `[0, ζ]`.
pub fn monomial_quadrature<T: Real>(gamma: u32, nu: u32, zeta: T, p: T) -> T {
    panel_quadrature(
        &|r: T| r.powi(gamma as i32 + 1) * bessel_j(nu, p * r),
        T::zero(),
        zeta,
        p,
    )
}

/// `∫₀^ζ r^{γ+1} J_ν(pr) dr`: ₁F₂ series for `|z| ≤ z_switch` when its
/// relative error estimate is acceptable, panel quadrature otherwise.
pub fn monomial_hankel<T: Real>(q: &MonomialIntegralQuery<T>, cfg: &KernelConfig<T>) -> T {
    if q.z() <= cfg.z_switch {
        let params = Hyp1F2Params::monomial(q.gamma, q.nu, q.p, q.zeta);
        if q.nu > 0 && q.p == T::zero() {
            return T::zero();
        }
        if let Ok(f) = hyp1f2(&params) {
            return monomial_prefactor(q.gamma, q.nu, q.zeta, q.p) * f;
        }
    }
    monomial_quadrature(q.gamma, q.nu, q.zeta, q.p)
}

/// Gauss–Legendre quadrature of `g` over `[a, b]` with panels of width at most
/// `π/p`.
fn panel_quadrature<T: Real, G: Fn(T) -> T>(g: &G, a: T, b: T, p: T) -> T {
    if !(b > a) {
        return T::zero();
    }
    let rule = gauss_legendre(PANEL_POINTS);
    let panels = ((b - a) * p / T::PI())
        .ceil()
        .to_usize()
        .unwrap_or(1)
        .max(1);
    let width = (b - a) / from_usize(panels);
    let mut acc = NeumaierSum::new();
    for i in 0..panels {
        let lo = a + width * from_usize(i);
        let hi = if i + 1 == panels { b } else { lo + width };
        acc.add(gauss_panel(g, lo, hi, rule));
    }
    acc.total()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AtomKind {
    /// `N_m(2^j r - k)`.
    Scaling,
    /// `ψ_m(2^j r - k)`.
    Wavelet,
}

/// One basis atom and the transform order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisTransform {
    pub order: SplineOrder,
    pub nu: u32,
    pub kind: AtomKind,
    pub index: WaveletIndex,
}

impl BasisTransform {
    pub fn wavelet(order: SplineOrder, nu: u32, index: WaveletIndex) -> Self {
        Self {
            order,
            nu,
            kind: AtomKind::Wavelet,
            index,
        }
    }

    pub fn scaling(order: SplineOrder, nu: u32, k: u32) -> Self {
        Self {
            order,
            nu,
            kind: AtomKind::Scaling,
            index: WaveletIndex::new(0, k),
        }
    }

    pub fn atom<T: Real>(&self) -> PiecewisePoly<T> {
        match self.kind {
            AtomKind::Scaling => {
                scaling_piecewise_at(self.order, self.index.j, i64::from(self.index.k))
            }
            AtomKind::Wavelet => wavelet_piecewise(self.order, self.index),
        }
    }
}

/// Transform of a basis atom at frequency `p`.
pub fn atom_hankel<T: Real>(bt: &BasisTransform, p: T, cfg: &KernelConfig<T>) -> T {
    piecewise_hankel(&bt.atom(), bt.nu, p, cfg)
}

/// `∫ f(r) J_ν(pr) r dr` for a piecewise polynomial `f`.
pub fn piecewise_hankel<T: Real>(
    poly: &PiecewisePoly<T>,
    nu: u32,
    p: T,
    cfg: &KernelConfig<T>,
) -> T {
    let mut acc = NeumaierSum::new();
    for (i, local) in poly.pieces().iter().enumerate() {
        let (a, b) = poly.interval(i);
        acc.add(piece_hankel(a, b, local, nu, p, cfg));
    }
    acc.total()
}

/// Transform of the single piece `local(r - a)` on `[a, b]`.
pub fn piece_hankel<T: Real>(a: T, b: T, local: &[T], nu: u32, p: T, cfg: &KernelConfig<T>) -> T {
    if nu > 0 && p == T::zero() {
        return T::zero();
    }
    let x = p * b * lit(0.5);
    if x * x <= cfg.z_switch {
        if let Some(v) = piece_series(a, b, local, nu, p, cfg) {
            return v;
        }
    }
    panel_quadrature(
        &|r: T| horner(local, r - a) * r * bessel_j(nu, p * r),
        a,
        b,
        p,
    )
}

fn piece_series<T: Real>(
    a: T,
    b: T,
    local: &[T],
    nu: u32,
    p: T,
    cfg: &KernelConfig<T>,
) -> Option<T> {
    let about_zero = taylor_shift(local, -a);
    let eps = T::epsilon();
    let mut acc = NeumaierSum::new();
    let mut err = T::zero();
    for (gamma, &c) in about_zero.iter().enumerate() {
        if c == T::zero() {
            continue;
        }
        let hi = monomial_series(gamma as u32, nu, b, p).ok()?;
        let lo = monomial_series(gamma as u32, nu, a, p).ok()?;
        acc.add(c * hi.value);
        acc.add(-(c * lo.value));
        err =
            err + c.abs() * (hi.abs_error + lo.abs_error + eps * (hi.value.abs() + lo.value.abs()));
    }
    let h = b - a;
    let bound = local.iter().rev().fold(T::zero(), |s, &c| s * h + c.abs());
    let mass = bound * (b * b - a * a) * lit(0.5);
    if err <= cfg.piece_rel_tol * mass {
        Some(acc.total())
    } else {
        None
    }
}

/// The literal quintuple sum for `Ψ_m^{jk}(p)` over the B-spline pieces
/// `α`, two-scale terms `n`, Bernstein terms `l`, binomial terms `β` and
/// monomial powers `γ`, with paired ₁F₂ values at consecutive breakpoints.
///
/// Only the series is used; arguments beyond `z_switch` are rejected.
pub fn eq4_direct<T: Real>(
    m: SplineOrder,
    nu: u32,
    idx: WaveletIndex,
    p: T,
    cfg: &KernelConfig<T>,
) -> Result<T> {
    let (_, end) = idx.support::<T>(m);
    let x = p * end * lit(0.5);
    if x * x > cfg.z_switch {
        return Err(Error::OutOfRange {
            z: (x * x).to_f64().unwrap_or(f64::NAN),
            limit: cfg.z_switch.to_f64().unwrap_or(f64::NAN),
        });
    }
    let order = m.get();
    let q = wavelet_coeffs::<T>(m);
    let bern: Vec<Vec<T>> = (1..=order)
        .map(|alpha| bernstein_coeffs(m, alpha))
        .collect::<Result<_>>()?;
    let j = idx.j as i32;
    let k = i64::from(idx.k);
    let nu_i = nu as i32;
    let two = lit::<T>(2.0);
    // 2^{(j+2)ν + 2(j+1)} (γ+2+ν) Γ(ν+1), without the (γ+2+ν) factor.
    let denom_common = two.powi((j + 2) * nu_i + 2 * (j + 1)) * factorial::<T>(nu);
    let z_scale = two.powi(2 * (j + 2));
    let d = order as usize - 1;

    let hyp = |gamma: usize, y: T| -> Result<T> {
        if y == T::zero() {
            return Ok(T::zero());
        }
        let g: T = from_usize(gamma + nu as usize);
        let half = lit::<T>(0.5);
        let params = Hyp1F2Params::new(
            (g + two) * half,
            (g + lit(4.0)) * half,
            from_usize::<T>(nu as usize) + T::one(),
            -(p * p * y * y) / z_scale,
        )?;
        Ok(y.powi(gamma as i32 + 2 + nu_i) * hyp1f2_series(&params)?.value)
    };

    let mut acc = NeumaierSum::new();
    for alpha in 1..=order as i64 {
        for (n, &qn) in q.iter().enumerate() {
            let n = n as i64;
            let upper = from_i64::<T>(alpha + 2 * k + n);
            let lower = upper - T::one();
            let shift = from_i64::<T>(1 - 2 * k - n - alpha);
            for (l, &a_l) in bern[alpha as usize - 1].iter().enumerate().take(d + 1) {
                if a_l == T::zero() {
                    continue;
                }
                for beta in 0..=(d - l) {
                    let sign = if beta % 2 == 0 { T::one() } else { -T::one() };
                    for gamma in 0..=(beta + l) {
                        let coef = sign
                            * binomial::<T>(d, l)
                            * binomial::<T>(d - l, beta)
                            * binomial::<T>(beta + l, gamma)
                            * qn
                            * a_l
                            * shift.powi((beta + l - gamma) as i32);
                        let pre = p.powi(nu_i)
                            / (denom_common * from_usize::<T>(gamma + 2 + nu as usize));
                        let bracket = hyp(gamma, upper)? - hyp(gamma, lower)?;
                        acc.add(coef * pre * bracket);
                    }
                }
            }
        }
    }
    Ok(acc.total())
}

/// `r J₁(pr) / p`, with its Taylor series near `p = 0`.
fn weighted_j1<T: Real>(r: T, p: T, small: bool) -> T {
    if small {
        let u = p * r * lit(0.5);
        let u2 = u * u;
        r * r * lit(0.5) * (T::one() - u2 * lit(0.5) + u2 * u2 / lit(12.0))
    } else {
        r * bessel_j(1, p * r) / p
    }
}

/// ν = 0 transform of the unnormalized Haar atom `ψ₁(2^j r - k)`:
/// `(2^{-j}/p)[2(k+½)J₁(2^{-j}p(k+½)) - (k+1)J₁(2^{-j}p(k+1)) - kJ₁(2^{-j}pk)]`.
pub fn haar_closed_form<T: Real>(idx: WaveletIndex, p: T) -> T {
    let scale = lit::<T>(0.5).powi(idx.j as i32);
    let k: T = from_usize(idx.k as usize);
    let start = k * scale;
    let mid = (k + lit(0.5)) * scale;
    let end = (k + T::one()) * scale;
    let small = p < lit::<T>(1e-3) / end;
    weighted_j1(mid, p, small) * lit(2.0)
        - weighted_j1(end, p, small)
        - weighted_j1(start, p, small)
}

/// ν = 0 transform of the Haar scaling atom on `[k, k+1]`:
/// `(1/p)[(k+1)J₁(p(k+1)) - kJ₁(pk)]`.
pub fn haar_scaling_closed_form<T: Real>(k: u32, p: T) -> T {
    let lo: T = from_usize(k as usize);
    let hi = lo + T::one();
    let small = p < lit::<T>(1e-3) / hi;
    weighted_j1(hi, p, small) - weighted_j1(lo, p, small)
}
