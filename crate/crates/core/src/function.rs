//! Input functions: built-in closed forms and sampled data.

use std::io::Read;
use std::path::Path;

use crate::piecewise::PiecewisePoly;
use crate::{lit, Error, Real, Result};

/// A real function of the radius `r ≥ 0`.
pub trait RadialFunction<T: Real>: Sync {
    fn eval(&self, r: T) -> T;

    /// Points where the function or its low derivatives may jump. Quadrature
    /// splits its cells at these points.
    fn breakpoints(&self) -> Vec<T> {
        Vec::new()
    }
}

impl<T: Real, F: Fn(T) -> T + Sync> RadialFunction<T> for F {
    fn eval(&self, r: T) -> T {
        self(r)
    }
}

impl<T: Real> RadialFunction<T> for PiecewisePoly<T> {
    fn eval(&self, r: T) -> T {
        PiecewisePoly::eval(self, r)
    }

    fn breakpoints(&self) -> Vec<T> {
        PiecewisePoly::breakpoints(self).to_vec()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolation {
    Linear,
    /// Natural cubic spline.
    Cubic,
}

/// The input function of a transform.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec<T> {
    /// `scale · exp(-(r/a)²)`.
    Gaussian {
        width: T,
        scale: T,
    },
    /// `value` everywhere.
    Constant {
        value: T,
    },
    /// `scale · r^power`.
    Monomial {
        power: u32,
        scale: T,
    },
    /// An explicit piecewise polynomial, zero outside its breakpoints.
    Piecewise(PiecewisePoly<T>),
    Sampled(SampledFunction<T>),
}

impl<T: Real> FunctionSpec<T> {
    pub fn gaussian(width: T) -> Result<Self> {
        if !(width > T::zero() && width.is_finite()) {
            return Err(Error::invalid(
                "a",
                "Gaussian width must be positive and finite",
            ));
        }
        Ok(FunctionSpec::Gaussian {
            width,
            scale: T::one(),
        })
    }

    pub fn constant(value: T) -> Self {
        FunctionSpec::Constant { value }
    }

    pub fn ramp() -> Self {
        FunctionSpec::Monomial {
            power: 1,
            scale: T::one(),
        }
    }

    pub fn monomial(power: u32) -> Self {
        FunctionSpec::Monomial {
            power,
            scale: T::one(),
        }
    }

    /// The same function multiplied by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        match self {
            FunctionSpec::Gaussian { width, scale } => FunctionSpec::Gaussian {
                width: *width,
                scale: *scale * factor,
            },
            FunctionSpec::Constant { value } => FunctionSpec::Constant {
                value: *value * factor,
            },
            FunctionSpec::Monomial { power, scale } => FunctionSpec::Monomial {
                power: *power,
                scale: *scale * factor,
            },
            FunctionSpec::Piecewise(p) => FunctionSpec::Piecewise(p.scale(factor)),
            FunctionSpec::Sampled(s) => FunctionSpec::Sampled(s.scaled(factor)),
        }
    }
}

impl<T: Real> RadialFunction<T> for FunctionSpec<T> {
    fn eval(&self, r: T) -> T {
        match self {
            FunctionSpec::Gaussian { width, scale } => {
                let u = r / *width;
                *scale * (-(u * u)).exp()
            }
            FunctionSpec::Constant { value } => *value,
            FunctionSpec::Monomial { power, scale } => *scale * r.powi(*power as i32),
            FunctionSpec::Piecewise(p) => p.eval(r),
            FunctionSpec::Sampled(s) => s.eval(r),
        }
    }

    fn breakpoints(&self) -> Vec<T> {
        match self {
            FunctionSpec::Piecewise(p) => p.breakpoints().to_vec(),
            FunctionSpec::Sampled(s) => s.abscissae.clone(),
            _ => Vec::new(),
        }
    }
}

/// Tabulated `(r, f)` data with an interpolation rule; zero outside the
/// sampled range.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction<T> {
    abscissae: Vec<T>,
    values: Vec<T>,
    rule: Interpolation,
    /// Second derivatives at the nodes (cubic rule only).
    curvature: Vec<T>,
}

impl<T: Real> SampledFunction<T> {
    pub fn new(abscissae: Vec<T>, values: Vec<T>, rule: Interpolation) -> Result<Self> {
        if abscissae.len() != values.len() {
            return Err(Error::InputData(format!(
                "{} abscissae but {} values",
                abscissae.len(),
                values.len()
            )));
        }
        if abscissae.len() < 2 {
            return Err(Error::InputData("need at least two samples".into()));
        }
        if let Some(i) = abscissae.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(Error::InputData(format!(
                "abscissae must be strictly increasing (row {})",
                i + 2
            )));
        }
        if abscissae
            .iter()
            .chain(values.iter())
            .any(|v| !v.is_finite())
        {
            return Err(Error::InputData("non-finite sample".into()));
        }
        let curvature = match rule {
            Interpolation::Linear => Vec::new(),
            Interpolation::Cubic => natural_spline_curvature(&abscissae, &values),
        };
        Ok(Self {
            abscissae,
            values,
            rule,
            curvature,
        })
    }

    pub fn abscissae(&self) -> &[T] {
        &self.abscissae
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn rule(&self) -> Interpolation {
        self.rule
    }

    fn scaled(&self, factor: T) -> Self {
        Self {
            abscissae: self.abscissae.clone(),
            values: self.values.iter().map(|&v| v * factor).collect(),
            rule: self.rule,
            curvature: self.curvature.iter().map(|&v| v * factor).collect(),
        }
    }

    pub fn eval(&self, r: T) -> T {
        let n = self.abscissae.len();
        if !(r >= self.abscissae[0] && r <= self.abscissae[n - 1]) {
            return T::zero();
        }
        let i = self
            .abscissae
            .partition_point(|&x| x <= r)
            .saturating_sub(1)
            .min(n - 2);
        let (x0, x1) = (self.abscissae[i], self.abscissae[i + 1]);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let h = x1 - x0;
        let t = (r - x0) / h;
        match self.rule {
            Interpolation::Linear => y0 + (y1 - y0) * t,
            Interpolation::Cubic => {
                let a = T::one() - t;
                let six = lit::<T>(6.0);
                a * y0
                    + t * y1
                    + ((a * a * a - a) * self.curvature[i]
                        + (t * t * t - t) * self.curvature[i + 1])
                        * h
                        * h
                        / six
            }
        }
    }

    /// Reads two-column `r,f` CSV; a non-numeric first row is taken as a
    /// header.
    pub fn from_csv_reader<R: Read>(reader: R, rule: Interpolation) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::InputData(e.to_string()))?;
            if rec.len() < 2 {
                return Err(Error::InputData(format!(
                    "row {}: expected two columns, found {}",
                    line + 1,
                    rec.len()
                )));
            }
            let parsed = (rec[0].parse::<f64>(), rec[1].parse::<f64>());
            match parsed {
                (Ok(x), Ok(y)) => {
                    xs.push(lit(x));
                    ys.push(lit(y));
                }
                _ if line == 0 => continue,
                _ => {
                    return Err(Error::InputData(format!(
                        "row {}: cannot parse `{}`,`{}` as numbers",
                        line + 1,
                        &rec[0],
                        &rec[1]
                    )))
                }
            }
        }
        Self::new(xs, ys, rule)
    }

    pub fn from_csv_path(path: &Path, rule: Interpolation) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::InputData(format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(file, rule)
    }
}

/// Second derivatives of the natural cubic spline through the data
/// (tridiagonal solve, zero curvature at both ends).
fn natural_spline_curvature<T: Real>(x: &[T], y: &[T]) -> Vec<T> {
    let n = x.len();
    let mut m = vec![T::zero(); n];
    if n < 3 {
        return m;
    }
    let two = lit::<T>(2.0);
    let six = lit::<T>(6.0);
    let mut diag = vec![T::zero(); n];
    let mut rhs = vec![T::zero(); n];
    let mut upper = vec![T::zero(); n];
    for i in 1..n - 1 {
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        diag[i] = two * (h0 + h1);
        upper[i] = h1;
        rhs[i] = six * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
    }
    // Forward elimination over interior rows 1..n-1.
    for i in 2..n - 1 {
        let h0 = x[i] - x[i - 1];
        let w = h0 / diag[i - 1];
        diag[i] = diag[i] - w * upper[i - 1];
        rhs[i] = rhs[i] - w * rhs[i - 1];
    }
    for i in (1..n - 1).rev() {
        let next = if i + 1 < n - 1 { m[i + 1] } else { T::zero() };
        m[i] = (rhs[i] - upper[i] * next) / diag[i];
    }
    m
}
