//! Property tests for the spectral calculus.

use proptest::prelude::*;
use skdv::Grid;

#[derive(Debug, Clone)]
struct Bumps(Vec<(f64, f64, f64)>);

// resolved fields that decay below roundoff at the box edges: widths of a
// few grid cells, centers well inside the box (|x0| + 5.5 w < L/2)
fn bumps() -> impl Strategy<Value = Bumps> {
    prop::collection::vec((-2.0..2.0_f64, 0.8..1.8_f64, -10.0..10.0_f64), 1..4).prop_map(Bumps)
}

fn field_of(grid: &std::sync::Arc<Grid>, b: &Bumps) -> skdv::GridField {
    let bumps = b.0.clone();
    grid.field_from_fn(move |x| {
        bumps
            .iter()
            .map(|(a, w, x0)| a * (-(x - x0) * (x - x0) / (w * w)).exp())
            .sum()
    })
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn derivative_is_linear(f in bumps(), g in bumps(), a in -3.0..3.0_f64, b in -3.0..3.0_f64) {
        let grid = Grid::new(256, 40.0).unwrap();
        let ff = field_of(&grid, &f);
        let gg = field_of(&grid, &g);
        let lhs = ff.scale(a).add(&gg.scale(b)).derivative(1).unwrap();
        let rhs = ff.derivative(1).unwrap().scale(a).add(&gg.derivative(1).unwrap().scale(b));
        let scale = max_abs(rhs.values()).max(1.0);
        let diff = lhs.sub(&rhs);
        prop_assert!(max_abs(diff.values()) <= 1e-12 * scale);
    }

    #[test]
    fn total_derivative_integrates_to_zero(f in bumps(), order in 1u32..4) {
        let grid = Grid::new(256, 40.0).unwrap();
        let ff = field_of(&grid, &f);
        let d = ff.derivative(order).unwrap();
        prop_assert!(d.integrate().abs() <= 1e-10);
    }

    #[test]
    fn parseval_holds(f in bumps()) {
        let grid = Grid::new(256, 40.0).unwrap();
        let ff = field_of(&grid, &f);
        let direct = ff.mul(&ff).integrate();
        let spec = grid.fft(ff.values());
        let modes = grid.dx() / grid.n() as f64
            * spec.iter().map(|c| c.norm_sqr()).sum::<f64>();
        prop_assert!((direct - modes).abs() <= 1e-10 * direct.max(1e-30));
    }

    #[test]
    fn translations_compose(f in bumps(), a in -30.0..30.0_f64, b in -30.0..30.0_f64) {
        let grid = Grid::new(256, 40.0).unwrap();
        let ff = field_of(&grid, &f);
        let two_step = ff.translate(a).translate(b);
        let one_step = ff.translate(a + b);
        let diff = two_step.sub(&one_step);
        prop_assert!(max_abs(diff.values()) <= 1e-10);
    }

    #[test]
    fn dealias_is_a_projection(f in bumps()) {
        let grid = Grid::new(256, 40.0).unwrap();
        let ff = field_of(&grid, &f);
        let once = ff.dealias();
        let twice = once.dealias();
        let diff = once.sub(&twice);
        prop_assert!(max_abs(diff.values()) <= 1e-12);
    }
}
