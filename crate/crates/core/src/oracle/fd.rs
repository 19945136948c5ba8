//! Central-difference cross-check of the exact trig derivatives.

use serde::Serialize;

use super::TrigPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    T,
    X,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FdReport {
    pub direction: Direction,
    pub order: u32,
    pub h: f64,
    /// Errors at `h` and `h / 2`.
    pub errors: [f64; 2],
    /// `errors[0] / errors[1]`, close to 4 for a second-order stencil.
    pub ratio: f64,
}

fn stencil(f: &TrigPoly, dir: Direction, order: u32, t: f64, x: f64, h: f64) -> num_complex::Complex64 {
    let at = |s: f64| match dir {
        Direction::T => f.eval(0, 0, t + s, x),
        Direction::X => f.eval(0, 0, t, x + s),
    };
    match order {
        1 => (at(h) - at(-h)) / (2.0 * h),
        _ => (at(h) - 2.0 * at(0.0) + at(-h)) / (h * h),
    }
}

/// Compares the exact first or second derivative with central differences
/// at steps `h` and `h / 2`. Errors are the maximum over `points`: at a
/// single point the leading error term can vanish and the ratio with it.
pub fn finite_difference_crosscheck(f: &TrigPoly, dir: Direction, order: u32, points: &[(f64, f64)], h: f64) -> FdReport {
    assert!(order == 1 || order == 2, "only first and second derivatives");
    assert!(!points.is_empty(), "need at least one point");
    let err = |step: f64| {
        points
            .iter()
            .map(|&(t, x)| {
                let exact = match dir {
                    Direction::T => f.eval(order, 0, t, x),
                    Direction::X => f.eval(0, order, t, x),
                };
                (stencil(f, dir, order, t, x, step) - exact).norm()
            })
            .fold(0.0, f64::max)
    };
    let (e0, e1) = (err(h), err(h / 2.0));
    FdReport { direction: dir, order, h, errors: [e0, e1], ratio: e0 / e1 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn second_order_convergence() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..5 {
            let f = TrigPoly::random(&mut rng, 4);
            for dir in [Direction::T, Direction::X] {
                for order in [1, 2] {
                    let r = finite_difference_crosscheck(&f, dir, order, &[(0.3, -0.2), (0.1, 0.4)], 1e-2);
                    assert!(r.errors[0] < 1e-3, "{r:?}");
                    assert!((r.ratio - 4.0).abs() < 0.2, "{r:?}");
                }
            }
        }
    }
}
