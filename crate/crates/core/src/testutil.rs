//! Small independent oracles shared by unit tests. Everything here is
//! deliberately dumb and slow: loops and finite differences, no FFTs, so the
//! spectral implementations are checked against a different computational
//! path.

/// 8th-order central finite differences, applied `order` times (periodic).
pub fn fd8_derivative(values: &[f64], dx: f64, order: u32) -> Vec<f64> {
    const C: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
    let n = values.len();
    let mut cur = values.to_vec();
    for _ in 0..order {
        let mut next = vec![0.0; n];
        for j in 0..n {
            let mut acc = 0.0;
            for (i, &c) in C.iter().enumerate() {
                let off = i + 1;
                let fwd = cur[(j + off) % n];
                let bwd = cur[(j + n - off) % n];
                acc += c * (fwd - bwd);
            }
            next[j] = acc / dx;
        }
        cur = next;
    }
    cur
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Adaptive Simpson quadrature on [a, b].
pub fn adaptive_simpson(f: impl Fn(f64) -> f64 + Copy, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
    }
    fn recurse(
        f: impl Fn(f64) -> f64 + Copy,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let left = simpson(f, a, m);
        let right = simpson(f, m, b);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            recurse(f, a, m, left, 0.5 * tol, depth - 1)
                + recurse(f, m, b, right, 0.5 * tol, depth - 1)
        }
    }
    recurse(f, a, b, simpson(f, a, b), tol, 40)
}
