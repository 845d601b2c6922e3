//! Conserved functionals of the coupled system and the a priori bound
//! built from them.
//!
//! The charges are
//!
//! ```text
//! H_half_i = int phi_i dx          H_1 = int u dx
//! V  = int (u^2 + P(xi)) dx
//! M  = int (-u^3/3 - u P(xi)/2 + u'^2 + sum phi_i'^2) dx
//! ```
//!
//! and every trajectory obeys `||(u,xi)||_H1 <= (d + sqrt(d^2 + 4e))/2` with
//! `d = V/(2 sqrt 2)`, `e = V + M`, evaluated on the initial data. Charge
//! densities are integrated with the same spectral derivative and trapezoid
//! quadrature as the dynamics; mixing discretizations would create phantom
//! drift.

use serde::Serialize;

use crate::field::{body_projection, h1_norm, CliffordField, SimState};
use crate::grid::GridField;

/// V = int (u^2 + P(xi)) dx. Nonnegative: it is the squared L2 norm of the
/// pair.
pub fn charge_v(state: &SimState) -> f64 {
    let p = body_projection(&state.xi);
    state.u.mul(&state.u).add(&p).integrate()
}

/// M = int (-u^3/3 - u P/2 + u'^2 + sum phi_i'^2) dx.
pub fn charge_m(state: &SimState) -> f64 {
    let u = &state.u;
    let p = body_projection(&state.xi);
    let du = u.derivative(1).expect("finite field");
    let mut density = u.zip_with(&p, |uv, pv| -uv * uv * uv / 3.0 - 0.5 * uv * pv);
    density = density.zip_with(&du, |d, duv| d + duv * duv);
    for c in state.xi.components() {
        let dc = c.derivative(1).expect("finite field");
        density = density.zip_with(&dc, |d, v| d + v * v);
    }
    density.integrate()
}

/// Component-wise odd charge: int phi_i dx for each component.
pub fn charge_h_half(xi: &CliffordField) -> Vec<f64> {
    xi.components().iter().map(GridField::integrate).collect()
}

/// H_1 = int u dx.
pub fn charge_h1(u: &GridField) -> f64 {
    u.integrate()
}

/// A priori Sobolev bound computed from V and M.
///
/// `discriminant = d^2 + 4e` should be nonnegative whenever (v, m) come from
/// an actual state; a violation is flagged instead of aborting the run, since
/// it would indicate either discretization error or a counterexample worth
/// logging.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AprioriBound {
    pub value: f64,
    pub discriminant: f64,
    pub violated: bool,
}

/// (d + sqrt(d^2 + 4e))/2 with d = v/(2 sqrt 2), e = v + m.
pub fn apriori_bound(v: f64, m: f64) -> AprioriBound {
    let d = v / (2.0 * 2.0_f64.sqrt());
    let e = v + m;
    let discriminant = d * d + 4.0 * e;
    AprioriBound {
        value: 0.5 * (d + discriminant.max(0.0).sqrt()),
        discriminant,
        violated: discriminant < 0.0,
    }
}

/// Charge values, Sobolev norm, and a priori bound of one state.
#[derive(Debug, Clone, Serialize)]
pub struct ChargeReport {
    pub t: f64,
    pub h_half: Vec<f64>,
    pub h_1: f64,
    pub v: f64,
    pub m: f64,
    pub h1_norm: f64,
    pub apriori_bound: f64,
    pub apriori_violated: bool,
}

pub fn charge_report(state: &SimState) -> ChargeReport {
    let v = charge_v(state);
    let m = charge_m(state);
    let bound = apriori_bound(v, m);
    ChargeReport {
        t: state.t,
        h_half: charge_h_half(&state.xi),
        h_1: charge_h1(&state.u),
        v,
        m,
        h1_norm: h1_norm(&state.u, &state.xi),
        apriori_bound: bound.value,
        apriori_violated: bound.violated,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::h1_norm_sq;
    use crate::grid::Grid;
    use crate::testutil::adaptive_simpson;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn sech(x: f64) -> f64 {
        1.0 / x.cosh()
    }

    fn soliton_state(g: &Arc<Grid>) -> SimState {
        let u = g.field_from_fn(|x| 3.0 * sech(0.5 * x).powi(2));
        SimState::new(0.0, u, CliffordField::zeros(g, 2))
    }

    fn random_state(g: &Arc<Grid>, rng: &mut ChaCha8Rng, k: usize) -> SimState {
        let bump = |rng: &mut ChaCha8Rng| {
            let a: f64 = rng.random_range(-1.5..1.5);
            let w: f64 = rng.random_range(1.0..4.0);
            let x0: f64 = rng.random_range(-12.0..12.0);
            move |x: f64| a * (-(x - x0).powi(2) / (w * w)).exp()
        };
        let b0 = bump(rng);
        let b1 = bump(rng);
        let u = g.field_from_fn(|x| b0(x) + b1(x));
        let comps = (0..k)
            .map(|_| {
                let b = bump(rng);
                g.field_from_fn(b)
            })
            .collect();
        SimState::new(0.0, u, CliffordField::new(comps).unwrap())
    }

    #[test]
    fn zero_state_has_zero_charges() {
        let g = Grid::new(256, 40.0).unwrap();
        let s = SimState::new(0.0, g.zeros(), CliffordField::zeros(&g, 2));
        assert_eq!(charge_v(&s), 0.0);
        assert_eq!(charge_m(&s), 0.0);
        assert_eq!(charge_h1(&s.u), 0.0);
        assert!(charge_h_half(&s.xi).iter().all(|&h| h == 0.0));
    }

    #[test]
    fn soliton_charges_match_quadrature_oracle() {
        // V = 24 C^{3/2}, M = -72/5 C^{5/2}, H_1 = 12 sqrt(C) at C = 1;
        // oracle: adaptive quadrature of the closed-form densities.
        let g = Grid::new(1024, 80.0).unwrap();
        let s = soliton_state(&g);
        let v_oracle = adaptive_simpson(
            |x| (3.0 * sech(0.5 * x).powi(2)).powi(2),
            -60.0,
            60.0,
            1e-13,
        );
        assert!((v_oracle - 24.0).abs() <= 1e-10, "oracle {v_oracle}");
        assert!((charge_v(&s) - 24.0).abs() <= 1e-9);

        let m_oracle = adaptive_simpson(
            |x| {
                let phi = 3.0 * sech(0.5 * x).powi(2);
                let dphi = -3.0 * sech(0.5 * x).powi(2) * (0.5 * x).tanh();
                -phi.powi(3) / 3.0 + dphi * dphi
            },
            -60.0,
            60.0,
            1e-13,
        );
        assert!((m_oracle + 14.4).abs() <= 1e-9, "oracle {m_oracle}");
        assert!((charge_m(&s) + 14.4).abs() <= 1e-8);

        assert!((charge_h1(&s.u) - 12.0).abs() <= 1e-10);
    }

    #[test]
    fn v_of_pure_xi_is_l2_norm_squared() {
        let g = Grid::new(256, 40.0).unwrap();
        let phi1 = g.field_from_fn(|x| (-x * x / 3.0).exp());
        let xi = CliffordField::new(vec![phi1.clone()]).unwrap();
        let s = SimState::new(0.0, g.zeros(), xi);
        assert!((charge_v(&s) - phi1.norm_sq()).abs() <= 1e-13);
    }

    #[test]
    fn odd_component_integrates_to_zero() {
        let g = Grid::new(256, 40.0).unwrap();
        let odd = g.field_from_fn(|x| x * (-x * x / 4.0).exp());
        let xi = CliffordField::new(vec![odd]).unwrap();
        let h = charge_h_half(&xi);
        assert!(h[0].abs() <= 1e-12);
    }

    #[test]
    fn sign_flip_changes_only_cubic_terms() {
        let g = Grid::new(256, 40.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let s = random_state(&g, &mut rng, 2);
            let flipped = SimState::new(s.t, s.u.scale(-1.0), s.xi.clone());
            let p = body_projection(&s.xi);
            let expect = 2.0 / 3.0 * s.u.map(|v| v * v * v).integrate() + s.u.mul(&p).integrate();
            let diff = charge_m(&flipped) - charge_m(&s);
            assert!((diff - expect).abs() <= 1e-10 * (1.0 + expect.abs()));
        }
    }

    #[test]
    fn apriori_bound_examples() {
        let b = apriori_bound(0.0, 0.0);
        assert_eq!(b.value, 0.0);
        assert!(!b.violated);

        // independent arithmetic: d = 24/(2 sqrt 2) = 8.4853..., e = 9.6,
        // bound = (d + sqrt(d^2 + 38.4))/2 = 9.4962...
        let b = apriori_bound(24.0, -14.4);
        let d = 24.0 / (2.0 * 2.0_f64.sqrt());
        let expect = 0.5 * (d + (d * d + 4.0 * 9.6).sqrt());
        assert!((b.value - expect).abs() <= 1e-12);
        assert!((b.value - 9.4962).abs() <= 5e-4);

        let b = apriori_bound(1.0, -10.0);
        assert!(b.violated);
        assert!(b.discriminant < 0.0);
    }

    #[test]
    fn bound_dominates_h1_norm_on_random_states() {
        let g = Grid::new(256, 80.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..1000 {
            let s = random_state(&g, &mut rng, 2);
            let v = charge_v(&s);
            let m = charge_m(&s);
            let b = apriori_bound(v, m);
            assert!(!b.violated, "discriminant {}", b.discriminant);
            let h1 = h1_norm(&s.u, &s.xi);
            assert!(h1 <= b.value * (1.0 + 1e-6), "h1 {h1} bound {}", b.value);
        }
    }

    #[test]
    fn defining_inequality_chain_holds() {
        // ||(u,xi)||_H1^2 <= V + M + (1/2) int |u| (u^2 + P) dx
        let g = Grid::new(256, 80.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..1000 {
            let s = random_state(&g, &mut rng, 2);
            let p = body_projection(&s.xi);
            let cubic =
                s.u.zip_with(&p, |uv, pv| 0.5 * uv.abs() * (uv * uv + pv))
                    .integrate();
            let lhs = h1_norm_sq(&s.u, &s.xi);
            let rhs = charge_v(&s) + charge_m(&s) + cubic;
            assert!(lhs <= rhs + 1e-8, "lhs {lhs} rhs {rhs}");
        }
    }

    #[test]
    fn charges_are_translation_invariant() {
        let g = Grid::new(256, 40.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = random_state(&g, &mut rng, 2);
        for shift in [0.7, -3.3, 11.25] {
            let moved = SimState::new(s.t, s.u.translate(shift), s.xi.map(|c| c.translate(shift)));
            assert!((charge_v(&moved) - charge_v(&s)).abs() <= 1e-10);
            assert!((charge_m(&moved) - charge_m(&s)).abs() <= 1e-10);
            assert!((charge_h1(&moved.u) - charge_h1(&s.u)).abs() <= 1e-10);
        }
    }
}
