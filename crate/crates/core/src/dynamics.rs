//! Right-hand side of the coupled system and time integration.
//!
//! The linear dispersive term `-d^3/dx^3` makes explicit stepping stiff
//! (dt ~ dx^3), so the default scheme propagates it exactly in Fourier space
//! (integrating factor) and applies classical RK4 only to the nonlinear
//! remainder. Classical RK4 on the full right-hand side is retained as a
//! cross-check scheme.
//!
//! Quadratic products are formed pointwise and dealiased with the 2/3 rule
//! once per right-hand-side evaluation; `u u'` is computed in the
//! conservative form `(u^2)'/2`.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{sup_abs, CliffordField, SimState};
use crate::grid::{Grid, GridField};

/// Time stepping scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Exact spectral propagation of -d^3/dx^3, RK4 on the nonlinearity.
    #[default]
    IntegratingFactorRk4,
    /// RK4 on the full right-hand side; stable only for tiny dt.
    ClassicalRk4,
}

/// Step size, scheme and dealiasing switch.
#[derive(Debug, Clone, Copy)]
pub struct IntegratorConfig {
    dt: f64,
    scheme: Scheme,
    dealias: bool,
}

impl IntegratorConfig {
    /// Validates `dt` against the advective stability heuristic
    /// `dt <= 0.5 dx / max(1, sup|u|)` for the given initial state.
    pub fn new(dt: f64, scheme: Scheme, dealias: bool, state: &SimState) -> Result<Self> {
        if dt <= 0.0 || !dt.is_finite() {
            return Err(Error::Config(format!("dt must be positive, got {dt}")));
        }
        let limit = 0.5 * state.grid().dx() / sup_abs(&state.u).max(1.0);
        if dt > limit {
            return Err(Error::Config(format!(
                "dt = {dt} exceeds the advective step bound {limit:.3e}"
            )));
        }
        Ok(IntegratorConfig {
            dt,
            scheme,
            dealias,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn dealias(&self) -> bool {
        self.dealias
    }
}

/// Spectral-space stepper with precomputed multipliers.
struct Stepper {
    grid: Arc<Grid>,
    /// i k (Nyquist zeroed): first derivative.
    d1: Vec<Complex64>,
    /// Linear operator of the system: u_t = -u''' has symbol +i k^3.
    lin: Vec<f64>,
    /// 2/3-rule mask (all-pass when dealiasing is off).
    mask: Vec<f64>,
}

impl Stepper {
    fn new(grid: &Arc<Grid>, dealias: bool) -> Stepper {
        let n = grid.n();
        let d1 = (0..n).map(|j| grid.derivative_multiplier(j, 1)).collect();
        let lin = (0..n)
            .map(|j| -grid.derivative_multiplier(j, 3).im)
            .collect();
        let mask = (0..n)
            .map(|j| {
                if !dealias || grid.dealias_keep(j) {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        Stepper {
            grid: Arc::clone(grid),
            d1,
            lin,
            mask,
        }
    }

    fn fft_state(&self, state: &SimState) -> Vec<Vec<Complex64>> {
        let mut spectra = Vec::with_capacity(1 + state.xi.k());
        spectra.push(self.grid.fft(state.u.values()));
        for c in state.xi.components() {
            spectra.push(self.grid.fft(c.values()));
        }
        spectra
    }

    fn to_state(&self, t: f64, spectra: &[Vec<Complex64>]) -> SimState {
        let u = self
            .grid
            .field_from_values(self.grid.ifft_real(&spectra[0]));
        let comps = spectra[1..]
            .iter()
            .map(|s| self.grid.field_from_values(self.grid.ifft_real(s)))
            .collect();
        SimState::new(t, u, CliffordField::new(comps).expect("k >= 1"))
    }

    /// Nonlinear part in spectral space:
    /// N_u = -(1/2)(u^2)' - (1/4) P', N_phi_i = -(1/2)(phi_i u)'.
    fn nonlinear(&self, spectra: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        let n = self.grid.n();
        let u = self.grid.ifft_real(&spectra[0]);
        let phis: Vec<Vec<f64>> = spectra[1..]
            .iter()
            .map(|s| self.grid.ifft_real(s))
            .collect();

        let u_sq: Vec<f64> = u.iter().map(|&v| v * v).collect();
        let mut body = vec![0.0; n];
        for phi in &phis {
            for (b, &p) in body.iter_mut().zip(phi) {
                *b += p * p;
            }
        }
        let u_sq_hat = self.grid.fft(&u_sq);
        let body_hat = self.grid.fft(&body);

        let mut out = Vec::with_capacity(spectra.len());
        let mut nu = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            nu[j] = self.d1[j] * self.mask[j] * (-0.5 * u_sq_hat[j] - 0.25 * body_hat[j]);
        }
        out.push(nu);
        for phi in &phis {
            let prod: Vec<f64> = phi.iter().zip(&u).map(|(&p, &uv)| p * uv).collect();
            let prod_hat = self.grid.fft(&prod);
            let mut nphi = vec![Complex64::new(0.0, 0.0); n];
            for j in 0..n {
                nphi[j] = self.d1[j] * self.mask[j] * (-0.5 * prod_hat[j]);
            }
            out.push(nphi);
        }
        out
    }

    /// One integrating-factor RK4 step of (possibly negative) size dt.
    fn step_if_rk4(&self, spectra: &[Vec<Complex64>], dt: f64) -> Vec<Vec<Complex64>> {
        let n = self.grid.n();
        let e_half: Vec<Complex64> = self
            .lin
            .iter()
            .map(|&l| Complex64::from_polar(1.0, l * 0.5 * dt))
            .collect();
        let e_full: Vec<Complex64> = self
            .lin
            .iter()
            .map(|&l| Complex64::from_polar(1.0, l * dt))
            .collect();

        let na = self.nonlinear(spectra);
        let a: Vec<Vec<Complex64>> = combine(spectra, &na, dt / 2.0, Some(&e_half), n);
        let nb = self.nonlinear(&a);
        let b: Vec<Vec<Complex64>> = {
            let mut out = scale_by(spectra, &e_half, n);
            add_scaled(&mut out, &nb, dt / 2.0, n);
            out
        };
        let nc = self.nonlinear(&b);
        let c: Vec<Vec<Complex64>> = {
            let mut out = scale_by(spectra, &e_full, n);
            let enc = scale_by(&nc, &e_half, n);
            add_scaled(&mut out, &enc, dt, n);
            out
        };
        let nd = self.nonlinear(&c);

        let mut next = scale_by(spectra, &e_full, n);
        for (f, fields) in next.iter_mut().enumerate() {
            for j in 0..n {
                let acc = e_full[j] * na[f][j] + 2.0 * e_half[j] * (nb[f][j] + nc[f][j]) + nd[f][j];
                fields[j] += dt / 6.0 * acc;
            }
        }
        next
    }

    /// One classical RK4 step on the full right-hand side.
    fn step_classical_rk4(&self, spectra: &[Vec<Complex64>], dt: f64) -> Vec<Vec<Complex64>> {
        let n = self.grid.n();
        let full = |s: &[Vec<Complex64>]| -> Vec<Vec<Complex64>> {
            let mut f = self.nonlinear(s);
            for (field, src) in f.iter_mut().zip(s) {
                for j in 0..n {
                    field[j] += Complex64::new(0.0, self.lin[j]) * src[j];
                }
            }
            f
        };
        let k1 = full(spectra);
        let k2 = full(&combine(spectra, &k1, dt / 2.0, None, n));
        let k3 = full(&combine(spectra, &k2, dt / 2.0, None, n));
        let k4 = full(&combine(spectra, &k3, dt, None, n));
        let mut next = spectra.to_vec();
        for f in 0..next.len() {
            for j in 0..n {
                next[f][j] += dt / 6.0 * (k1[f][j] + 2.0 * (k2[f][j] + k3[f][j]) + k4[f][j]);
            }
        }
        next
    }

    fn step(&self, spectra: &[Vec<Complex64>], dt: f64, scheme: Scheme) -> Vec<Vec<Complex64>> {
        match scheme {
            Scheme::IntegratingFactorRk4 => self.step_if_rk4(spectra, dt),
            Scheme::ClassicalRk4 => self.step_classical_rk4(spectra, dt),
        }
    }
}

/// (base + w * delta), optionally multiplied by a diagonal factor.
fn combine(
    base: &[Vec<Complex64>],
    delta: &[Vec<Complex64>],
    w: f64,
    factor: Option<&[Complex64]>,
    n: usize,
) -> Vec<Vec<Complex64>> {
    base.iter()
        .zip(delta)
        .map(|(b, d)| {
            (0..n)
                .map(|j| {
                    let v = b[j] + w * d[j];
                    match factor {
                        Some(f) => f[j] * v,
                        None => v,
                    }
                })
                .collect()
        })
        .collect()
}

fn scale_by(fields: &[Vec<Complex64>], factor: &[Complex64], n: usize) -> Vec<Vec<Complex64>> {
    fields
        .iter()
        .map(|f| (0..n).map(|j| factor[j] * f[j]).collect())
        .collect()
}

fn add_scaled(target: &mut [Vec<Complex64>], addend: &[Vec<Complex64>], w: f64, n: usize) {
    for (t, a) in target.iter_mut().zip(addend) {
        for j in 0..n {
            t[j] += w * a[j];
        }
    }
}

fn spectra_finite(spectra: &[Vec<Complex64>]) -> bool {
    spectra
        .iter()
        .all(|f| f.iter().all(|c| c.re.is_finite() && c.im.is_finite()))
}

/// Instantaneous right-hand side of the coupled system (products dealiased).
pub fn rhs(state: &SimState) -> Result<(GridField, CliffordField)> {
    if !state.is_finite() {
        return Err(Error::Numeric(format!(
            "right-hand side of non-finite state at t = {}",
            state.t
        )));
    }
    let stepper = Stepper::new(state.grid(), true);
    let spectra = stepper.fft_state(state);
    let mut n = stepper.nonlinear(&spectra);
    // add the linear dispersive part: symbol i k^3
    for (field, src) in n.iter_mut().zip(&spectra) {
        for j in 0..state.grid().n() {
            field[j] += Complex64::new(0.0, stepper.lin[j]) * src[j];
        }
    }
    if !spectra_finite(&n) {
        return Err(Error::BlowUp {
            t: state.t,
            message: "non-finite right-hand side".into(),
        });
    }
    let grid = state.grid();
    let du = grid.field_from_values(grid.ifft_real(&n[0]));
    let dxi = CliffordField::new(
        n[1..]
            .iter()
            .map(|s| grid.field_from_values(grid.ifft_real(s)))
            .collect(),
    )?;
    Ok((du, dxi))
}

/// Advances the state by one step of `cfg.dt()`.
pub fn step(state: &SimState, cfg: &IntegratorConfig) -> Result<SimState> {
    step_with_dt(state, cfg, cfg.dt)
}

/// Advances by one step of arbitrary (possibly negative) size; used by the
/// reversibility checks.
pub fn step_with_dt(state: &SimState, cfg: &IntegratorConfig, dt: f64) -> Result<SimState> {
    let stepper = Stepper::new(state.grid(), cfg.dealias);
    let spectra = stepper.fft_state(state);
    let next = stepper.step(&spectra, dt, cfg.scheme);
    if !spectra_finite(&next) {
        return Err(Error::BlowUp {
            t: state.t + dt,
            message: "non-finite state after step".into(),
        });
    }
    Ok(stepper.to_state(state.t + dt, &next))
}

/// Integrates to `t_end`, sampling every `sample_every` steps (first and
/// final states always included).
pub fn simulate(
    initial: &SimState,
    t_end: f64,
    cfg: &IntegratorConfig,
    sample_every: usize,
) -> Result<Vec<SimState>> {
    if t_end <= initial.t {
        return Err(Error::Config(format!(
            "t_end = {t_end} must exceed the initial time {}",
            initial.t
        )));
    }
    if sample_every == 0 {
        return Err(Error::Config("sample_every must be at least 1".into()));
    }
    let span = t_end - initial.t;
    let exact = span / cfg.dt;
    let n_steps = if (exact - exact.round()).abs() < 1e-9 {
        exact.round() as usize
    } else {
        exact.ceil() as usize
    }
    .max(1);

    let stepper = Stepper::new(initial.grid(), cfg.dealias);
    let mut spectra = stepper.fft_state(initial);
    let mut trajectory = Vec::with_capacity(n_steps / sample_every + 2);
    trajectory.push(initial.clone());
    for i in 1..=n_steps {
        spectra = stepper.step(&spectra, cfg.dt, cfg.scheme);
        let t = initial.t + i as f64 * cfg.dt;
        if !spectra_finite(&spectra) {
            return Err(Error::BlowUp {
                t,
                message: format!("non-finite state at step {i}"),
            });
        }
        if i % sample_every == 0 || i == n_steps {
            trajectory.push(stepper.to_state(t, &spectra));
        }
    }
    Ok(trajectory)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charges::{charge_h1, charge_h_half, charge_m, charge_v};
    use crate::field::{h1_norm, l2_norm};
    use crate::soliton::{soliton_profile, SolitonParams};
    use crate::Grid;

    fn soliton_state(n: usize, length: f64, k: usize) -> SimState {
        let g = Grid::new(n, length).unwrap();
        let p = SolitonParams::new(1.0).unwrap();
        SimState::new(
            0.0,
            soliton_profile(&p, 0.0, &g).field,
            CliffordField::zeros(&g, k),
        )
    }

    #[test]
    fn zero_state_has_zero_rhs_and_step() {
        let g = Grid::new(128, 40.0).unwrap();
        let s = SimState::new(0.0, g.zeros(), CliffordField::zeros(&g, 2));
        let (du, dxi) = rhs(&s).unwrap();
        assert!(du.values().iter().all(|&v| v.abs() < 1e-14));
        assert!(dxi
            .components()
            .iter()
            .all(|c| c.values().iter().all(|&v| v.abs() < 1e-14)));
        let cfg = IntegratorConfig::new(1e-3, Scheme::IntegratingFactorRk4, true, &s).unwrap();
        let next = step(&s, &cfg).unwrap();
        assert_eq!(next.t, 1e-3);
        assert!(next.u.values().iter().all(|&v| v.abs() < 1e-14));
    }

    #[test]
    fn rhs_without_xi_reduces_to_kdv_form() {
        let g = Grid::new(256, 40.0).unwrap();
        let u = g.field_from_fn(|x| (-x * x / 6.0).exp());
        let s = SimState::new(0.0, u.clone(), CliffordField::zeros(&g, 2));
        let (du, dxi) = rhs(&s).unwrap();
        // xi part of the rhs vanishes identically
        for c in dxi.components() {
            assert!(c.values().iter().all(|&v| v.abs() < 1e-14));
        }
        let expect = u
            .derivative(3)
            .unwrap()
            .scale(-1.0)
            .sub(&u.mul(&u.derivative(1).unwrap()));
        for (a, b) in du.values().iter().zip(expect.values()) {
            assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn soliton_rhs_selects_speed_c() {
        let s = soliton_state(1024, 80.0, 1);
        let (du, _) = rhs(&s).unwrap();
        let dphi = s.u.derivative(1).unwrap();
        // candidate speeds: v = C = 1 and v = 1 + C = 2
        let resid_c = du
            .zip_with(&dphi, |a, b| a + 1.0 * b)
            .values()
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        let resid_1c = du
            .zip_with(&dphi, |a, b| a + 2.0 * b)
            .values()
            .iter()
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        assert!(resid_c <= 1e-8, "v = C residual {resid_c}");
        assert!(resid_1c > 0.1, "v = 1 + C residual {resid_1c}");
    }

    #[test]
    fn config_rejects_bad_dt() {
        let s = soliton_state(256, 80.0, 1);
        assert!(IntegratorConfig::new(0.0, Scheme::default(), true, &s).is_err());
        assert!(IntegratorConfig::new(-1e-3, Scheme::default(), true, &s).is_err());
        // dx = 0.3125, sup|u| = 3 -> limit ~ 0.052
        assert!(IntegratorConfig::new(0.1, Scheme::default(), true, &s).is_err());
        assert!(IntegratorConfig::new(1e-3, Scheme::default(), true, &s).is_ok());
    }

    #[test]
    fn forward_backward_returns_to_start() {
        let s = soliton_state(512, 80.0, 2);
        let cfg = IntegratorConfig::new(1e-3, Scheme::IntegratingFactorRk4, true, &s).unwrap();
        let fwd = step(&s, &cfg).unwrap();
        let back = step_with_dt(&fwd, &cfg, -1e-3).unwrap();
        let num = back.u.sub(&s.u).norm_sq().sqrt();
        let den = s.u.norm_sq().sqrt();
        assert!(num / den <= 1e-10, "relative L2 return error {}", num / den);
    }

    #[test]
    fn stepper_is_fourth_order() {
        // fixed-horizon self-convergence against a dt/10 reference
        let s = soliton_state(256, 80.0, 1);
        let t_end = 0.08;
        let run = |dt: f64| {
            let cfg = IntegratorConfig::new(dt, Scheme::IntegratingFactorRk4, true, &s).unwrap();
            simulate(&s, t_end, &cfg, usize::MAX / 2)
                .unwrap()
                .pop()
                .unwrap()
        };
        let reference = run(8e-4);
        let coarse = run(8e-3);
        let fine = run(4e-3);
        let err = |a: &SimState| a.u.sub(&reference.u).norm_sq().sqrt();
        let ratio = err(&coarse) / err(&fine);
        assert!(
            ratio > 10.0 && ratio < 26.0,
            "convergence ratio {ratio} (expected ~16)"
        );
    }

    #[test]
    fn xi_stays_zero_when_starting_zero() {
        let s = soliton_state(256, 80.0, 2);
        let cfg = IntegratorConfig::new(1e-3, Scheme::IntegratingFactorRk4, true, &s).unwrap();
        let traj = simulate(&s, 0.05, &cfg, 10).unwrap();
        for state in &traj {
            for c in state.xi.components() {
                assert!(c.values().iter().all(|&v| v == 0.0));
            }
        }
    }

    #[test]
    fn trajectory_sampling_includes_ends() {
        let s = soliton_state(256, 80.0, 1);
        let cfg = IntegratorConfig::new(1e-3, Scheme::IntegratingFactorRk4, true, &s).unwrap();
        let traj = simulate(&s, s.t + 1e-3, &cfg, 1).unwrap();
        assert_eq!(traj.len(), 2);
        let traj = simulate(&s, 0.0105, &cfg, 4).unwrap();
        // steps = 11 (ceil), samples at 0, 4, 8, 11
        assert_eq!(traj.len(), 4);
        assert!((traj.last().unwrap().t - 0.011).abs() < 1e-12);
    }

    #[test]
    fn charges_drift_slowly_on_short_run() {
        let g = Grid::new(512, 80.0).unwrap();
        let p = SolitonParams::new(1.0).unwrap();
        let u = soliton_profile(&p, 0.0, &g).field;
        let bump = g.field_from_fn(|x| 0.05 * (-(x - 3.0) * (x - 3.0) / 4.0).exp());
        let xi = CliffordField::new(vec![bump.clone(), bump.scale(0.5)]).unwrap();
        let s = SimState::new(0.0, u.add(&bump), xi);
        let cfg = IntegratorConfig::new(1e-3, Scheme::IntegratingFactorRk4, true, &s).unwrap();
        let traj = simulate(&s, 1.0, &cfg, 200).unwrap();
        let (v0, m0) = (charge_v(&s), charge_m(&s));
        let h0 = charge_h1(&s.u);
        let hh0 = charge_h_half(&s.xi);
        for state in &traj {
            assert!((charge_v(state) - v0).abs() / v0.abs() <= 1e-9);
            assert!((charge_m(state) - m0).abs() / m0.abs() <= 1e-8);
            assert!((charge_h1(&state.u) - h0).abs() <= 1e-10);
            for (a, b) in charge_h_half(&state.xi).iter().zip(&hh0) {
                assert!((a - b).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn soliton_translates_without_changing_shape() {
        let s = soliton_state(512, 80.0, 1);
        let cfg = IntegratorConfig::new(1e-3, Scheme::IntegratingFactorRk4, true, &s).unwrap();
        let traj = simulate(&s, 2.0, &cfg, 500).unwrap();
        let last = traj.last().unwrap();
        // the profile at t should be the initial one translated by C t
        let expect = s.u.translate(1.0 * last.t);
        let err = last.u.sub(&expect).norm_sq().sqrt() / s.u.norm_sq().sqrt();
        assert!(err <= 1e-6, "shape error {err}");
    }

    #[test]
    fn classical_rk4_blow_up_is_reported() {
        // dt within the advective heuristic but way past the dispersive
        // stability limit of explicit RK4
        let s = soliton_state(256, 80.0, 1);
        let cfg = IntegratorConfig::new(5e-3, Scheme::ClassicalRk4, true, &s).unwrap();
        match simulate(&s, 1.0, &cfg, 100) {
            Err(Error::BlowUp { t, .. }) => assert!(t > 0.0),
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn classical_and_if_agree_at_tiny_dt() {
        let s = soliton_state(128, 80.0, 1);
        // dispersive limit ~ 2.8/k_max^3: k_max = pi*128/80 ~ 5.03, fine
        let cfg_if = IntegratorConfig::new(2e-3, Scheme::IntegratingFactorRk4, true, &s).unwrap();
        let cfg_cl = IntegratorConfig::new(2e-3, Scheme::ClassicalRk4, true, &s).unwrap();
        let a = simulate(&s, 0.5, &cfg_if, usize::MAX / 2)
            .unwrap()
            .pop()
            .unwrap();
        let b = simulate(&s, 0.5, &cfg_cl, usize::MAX / 2)
            .unwrap()
            .pop()
            .unwrap();
        let err = a.u.sub(&b.u).norm_sq().sqrt() / l2_norm(&s.u, &s.xi);
        assert!(err <= 1e-7, "scheme disagreement {err}");
        assert!(h1_norm(&a.u, &a.xi).is_finite());
    }
}
