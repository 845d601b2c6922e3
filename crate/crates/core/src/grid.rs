//! Uniform periodic grid with spectral calculus.
//!
//! Everything downstream samples real-valued functions on `n` equispaced
//! points of a periodic box of length `L` and differentiates, translates and
//! integrates them through the discrete Fourier transform. The whole-line
//! problem is approximated by making the box large enough that field tails
//! fall below roundoff at the boundary, so "integrals over the line" carry
//! only that truncation error.

use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Uniform periodic grid: `n` points `x_j = -L/2 + j*dx`, `dx = L/n`.
///
/// Immutable after construction; shared via `Arc`. The FFT plans it carries
/// are stateless and thread-safe.
pub struct Grid {
    n: usize,
    length: f64,
    dx: f64,
    points: Vec<f64>,
    /// Signed physical wavenumber 2*pi*m/L per FFT bin (Nyquist bin positive).
    wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n)
            .field("length", &self.length)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.length == other.length
    }
}

impl Grid {
    /// Builds a grid with `n` points on a box of length `length`.
    ///
    /// `n` must be a power of two, at least 16; `length` must be positive.
    pub fn new(n: usize, length: f64) -> Result<Arc<Grid>> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::Config(format!(
                "grid size n must be a power of two >= 16, got {n}"
            )));
        }
        if length <= 0.0 || !length.is_finite() {
            return Err(Error::Config(format!(
                "grid length must be positive and finite, got {length}"
            )));
        }
        let dx = length / n as f64;
        let points = (0..n).map(|j| -0.5 * length + j as f64 * dx).collect();
        let wavenumbers = (0..n)
            .map(|j| {
                let m = if j <= n / 2 {
                    j as i64
                } else {
                    j as i64 - n as i64
                };
                2.0 * std::f64::consts::PI * m as f64 / length
            })
            .collect();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        Ok(Arc::new(Grid {
            n,
            length,
            dx,
            points,
            wavenumbers,
            forward,
            inverse,
        }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Signed wavenumber of FFT bin `j`.
    pub fn wavenumber(&self, j: usize) -> f64 {
        self.wavenumbers[j]
    }

    /// Unnormalized forward DFT of real samples.
    pub fn fft(&self, values: &[f64]) -> Vec<Complex64> {
        debug_assert_eq!(values.len(), self.n);
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    /// Inverse DFT (with 1/n normalization), keeping the real part.
    pub fn ifft_real(&self, spectrum: &[Complex64]) -> Vec<f64> {
        debug_assert_eq!(spectrum.len(), self.n);
        let mut buf = spectrum.to_vec();
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        buf.iter().map(|c| c.re * scale).collect()
    }

    /// Spectral multiplier of the `order`-th derivative for FFT bin `j`.
    ///
    /// Odd orders zero the Nyquist bin so real input maps to real output.
    pub fn derivative_multiplier(&self, j: usize, order: u32) -> Complex64 {
        let k = self.wavenumbers[j];
        let nyquist = j == self.n / 2;
        match order {
            1 => {
                if nyquist {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, k)
                }
            }
            2 => Complex64::new(-k * k, 0.0),
            3 => {
                if nyquist {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, -k * k * k)
                }
            }
            _ => unreachable!("derivative order validated by caller"),
        }
    }

    /// True when FFT bin `j` survives the 2/3-rule (|m| <= n/3).
    pub fn dealias_keep(&self, j: usize) -> bool {
        let m = if j <= self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        };
        3 * m.unsigned_abs() as usize <= self.n
    }

    /// Samples a function of x on the grid.
    pub fn field_from_fn(self: &Arc<Self>, f: impl Fn(f64) -> f64) -> GridField {
        let values = self.points.iter().map(|&x| f(x)).collect();
        GridField {
            grid: Arc::clone(self),
            values,
        }
    }

    pub fn zeros(self: &Arc<Self>) -> GridField {
        GridField {
            grid: Arc::clone(self),
            values: vec![0.0; self.n],
        }
    }

    pub fn field_from_values(self: &Arc<Self>, values: Vec<f64>) -> GridField {
        assert_eq!(values.len(), self.n, "value count must match grid size");
        GridField {
            grid: Arc::clone(self),
            values,
        }
    }
}

/// Real-valued function sampled on a [`Grid`]; the atom of all numerics.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl GridField {
    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Pointwise map.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridField {
        GridField {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination with another field on the same grid.
    pub fn zip_with(&self, other: &GridField, f: impl Fn(f64, f64) -> f64) -> GridField {
        assert_grid_eq(self, other);
        GridField {
            grid: Arc::clone(&self.grid),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn add(&self, other: &GridField) -> GridField {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridField) -> GridField {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &GridField) -> GridField {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> GridField {
        self.map(|v| c * v)
    }

    /// Spectral derivative of order 1, 2 or 3.
    pub fn derivative(&self, order: u32) -> Result<GridField> {
        if !(1..=3).contains(&order) {
            return Err(Error::Config(format!(
                "derivative order must be 1, 2 or 3, got {order}"
            )));
        }
        if !self.is_finite() {
            return Err(Error::Numeric("derivative of non-finite field".into()));
        }
        let mut spectrum = self.grid.fft(&self.values);
        for (j, c) in spectrum.iter_mut().enumerate() {
            *c *= self.grid.derivative_multiplier(j, order);
        }
        Ok(GridField {
            grid: Arc::clone(&self.grid),
            values: self.grid.ifft_real(&spectrum),
        })
    }

    /// Periodic trapezoid quadrature: `dx * sum_j f(x_j)`.
    pub fn integrate(&self) -> f64 {
        self.grid.dx * self.values.iter().sum::<f64>()
    }

    /// `f(x - s)` via spectral phase shift (periodic wrap-around).
    pub fn translate(&self, s: f64) -> GridField {
        let mut spectrum = self.grid.fft(&self.values);
        for (j, c) in spectrum.iter_mut().enumerate() {
            let k = self.grid.wavenumber(j);
            *c *= Complex64::from_polar(1.0, -k * s);
        }
        GridField {
            grid: Arc::clone(&self.grid),
            values: self.grid.ifft_real(&spectrum),
        }
    }

    /// Zeroes all modes with |m| above 2/3 of the Nyquist index.
    pub fn dealias(&self) -> GridField {
        let mut spectrum = self.grid.fft(&self.values);
        for (j, c) in spectrum.iter_mut().enumerate() {
            if !self.grid.dealias_keep(j) {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        GridField {
            grid: Arc::clone(&self.grid),
            values: self.grid.ifft_real(&spectrum),
        }
    }

    /// L2 inner product `dx * sum f_j g_j`.
    pub fn inner(&self, other: &GridField) -> f64 {
        assert_grid_eq(self, other);
        self.grid.dx
            * self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| a * b)
                .sum::<f64>()
    }

    /// Squared L2 norm.
    pub fn norm_sq(&self) -> f64 {
        self.inner(self)
    }
}

pub(crate) fn assert_grid_eq(a: &GridField, b: &GridField) {
    assert!(
        Arc::ptr_eq(&a.grid, &b.grid) || *a.grid == *b.grid,
        "fields live on different grids"
    );
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{fd8_derivative, max_abs_diff};
    use std::f64::consts::PI;

    #[test]
    fn grid_construction_examples() {
        let g = Grid::new(16, 16.0).unwrap();
        assert_eq!(g.dx(), 1.0);
        assert_eq!(g.points()[0], -8.0);
        let g = Grid::new(1024, 80.0).unwrap();
        assert_eq!(g.dx(), 0.078125);
        // dx * n recovers L exactly for these representable values
        assert_eq!(g.dx() * g.n() as f64, 80.0);
        assert!(Grid::new(15, 10.0).is_err());
        assert!(Grid::new(8, 10.0).is_err());
        assert!(Grid::new(1024, 0.0).is_err());
        assert!(Grid::new(1024, -2.0).is_err());
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let g = Grid::new(64, 10.0).unwrap();
        let f = g.field_from_fn(|_| 3.25);
        for order in 1..=3 {
            let d = f.derivative(order).unwrap();
            assert!(d.values().iter().all(|v| v.abs() < 1e-13));
        }
    }

    #[test]
    fn derivative_matches_sine_and_fd_oracle() {
        let g = Grid::new(256, 8.0).unwrap();
        let k = 2.0 * PI / g.length();
        let f = g.field_from_fn(|x| (k * x).sin());
        let d = f.derivative(1).unwrap();
        let exact = g.field_from_fn(|x| k * (k * x).cos());
        assert!(max_abs_diff(d.values(), exact.values()) <= 1e-12);
        let fd = fd8_derivative(f.values(), g.dx(), 1);
        assert!(max_abs_diff(d.values(), &fd) <= 1e-12);
    }

    #[test]
    fn third_derivative_matches_fd_oracle_on_gaussian() {
        let g = Grid::new(1024, 40.0).unwrap();
        let f = g.field_from_fn(|x| (-x * x).exp());
        let d3 = f.derivative(3).unwrap();
        let fd = fd8_derivative(f.values(), g.dx(), 3);
        assert!(
            max_abs_diff(d3.values(), &fd) <= 1e-8,
            "fd mismatch {}",
            max_abs_diff(d3.values(), &fd)
        );
    }

    #[test]
    fn derivative_rejects_bad_inputs() {
        let g = Grid::new(64, 10.0).unwrap();
        let f = g.field_from_fn(|_| 1.0);
        assert!(f.derivative(4).is_err());
        assert!(f.derivative(0).is_err());
        let bad = g.field_from_fn(|x| if x == g.points()[3] { f64::NAN } else { 0.0 });
        assert!(bad.derivative(1).is_err());
    }

    #[test]
    fn integrate_examples() {
        let g = Grid::new(1024, 80.0).unwrap();
        assert_eq!(g.zeros().integrate(), 0.0);
        let c = g.field_from_fn(|_| 2.5);
        assert!((c.integrate() - 2.5 * 80.0).abs() < 1e-12);
        // integral of sech^2(x/2) over the line is 2/kappa = 4 for kappa = 1/2
        let f = g.field_from_fn(|x| sech(0.5 * x).powi(2));
        assert!((f.integrate() - 4.0).abs() <= 1e-12);
        let oracle =
            crate::testutil::adaptive_simpson(|x| sech(0.5 * x).powi(2), -60.0, 60.0, 1e-13);
        assert!((oracle - 4.0).abs() <= 1e-11);
    }

    #[test]
    fn translate_identities() {
        let g = Grid::new(128, 20.0).unwrap();
        let f = g.field_from_fn(|x| (-x * x / 4.0).exp() + 0.3 * (2.0 * PI * x / 20.0).cos());
        let same = f.translate(0.0);
        assert!(max_abs_diff(f.values(), same.values()) <= 1e-13);
        let wrapped = f.translate(g.length());
        assert!(max_abs_diff(f.values(), wrapped.values()) <= 1e-10);
    }

    #[test]
    fn lattice_translate_matches_index_roll() {
        let g = Grid::new(128, 20.0).unwrap();
        let f = g.field_from_fn(|x| (-x * x / 9.0).exp() * (1.0 + 0.5 * (PI * x / 10.0).sin()));
        for m in [1usize, 5, 63, 127] {
            let t = f.translate(m as f64 * g.dx());
            // rolled oracle: g(x_j) = f(x_{j-m})
            let rolled: Vec<f64> = (0..g.n())
                .map(|j| f.values()[(j + g.n() - m) % g.n()])
                .collect();
            assert!(
                max_abs_diff(t.values(), &rolled) <= 1e-12,
                "m = {m}: {}",
                max_abs_diff(t.values(), &rolled)
            );
        }
    }

    #[test]
    fn dealias_examples() {
        let n = 96usize.next_power_of_two(); // 128
        let g = Grid::new(n, 2.0 * PI).unwrap();
        // low-mode field is untouched
        let f = g.field_from_fn(|x| (3.0 * x).cos() - 0.2 * (7.0 * x).sin());
        let d = f.dealias();
        assert!(max_abs_diff(f.values(), d.values()) <= 1e-12);
        // pure Nyquist mode is wiped out
        let hi = g.field_from_fn(|x| ((n as f64 / 2.0) * x).cos());
        let dh = hi.dealias();
        assert!(dh.values().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn dealiased_product_matches_fine_grid_oracle() {
        let n = 128;
        let g = Grid::new(n, 2.0 * PI).unwrap();
        // both factors band-limited to |m| <= n/3
        let f = g.field_from_fn(|x| (11.0 * x).cos() + 0.4 * (40.0 * x).sin());
        let h = g.field_from_fn(|x| 0.7 * (35.0 * x).cos() - (2.0 * x).sin());
        let coarse = f.mul(&h).dealias();

        // oracle: evaluate the exact product on a 4x finer grid, truncate its
        // spectrum to the coarse keep-band, and restrict to the coarse points
        let fine = Grid::new(4 * n, 2.0 * PI).unwrap();
        let ff = fine.field_from_fn(|x| (11.0 * x).cos() + 0.4 * (40.0 * x).sin());
        let hf = fine.field_from_fn(|x| 0.7 * (35.0 * x).cos() - (2.0 * x).sin());
        let prod = ff.mul(&hf);
        let mut spec = fine.fft(prod.values());
        for (j, c) in spec.iter_mut().enumerate() {
            let m = if j <= fine.n() / 2 {
                j as i64
            } else {
                j as i64 - fine.n() as i64
            };
            if 3 * m.unsigned_abs() as usize > n {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        let fine_vals = fine.ifft_real(&spec);
        let restricted: Vec<f64> = (0..n).map(|j| fine_vals[4 * j]).collect();
        assert!(
            max_abs_diff(coarse.values(), &restricted) <= 1e-10,
            "{}",
            max_abs_diff(coarse.values(), &restricted)
        );
    }

    #[test]
    fn parseval_identity() {
        let g = Grid::new(256, 30.0).unwrap();
        let f = g.field_from_fn(|x| (-x * x / 16.0).exp() + 0.1 * (PI * x / 15.0).sin());
        let direct = f.mul(&f).integrate();
        let spec = g.fft(f.values());
        let via_modes = g.dx() / g.n() as f64 * spec.iter().map(|c| c.norm_sqr()).sum::<f64>();
        assert!((direct - via_modes).abs() <= 1e-10 * direct.abs());
    }

    fn sech(x: f64) -> f64 {
        1.0 / x.cosh()
    }
}
