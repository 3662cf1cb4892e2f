//! One-dimensional searches used for suprema and infima.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Location and value of an extremum found by [`golden_max`] / [`golden_min`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub x: f64,
    pub value: f64,
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
///
/// Stops when the bracket is narrower than `tol`. The best evaluated point is
/// returned, endpoints included, so the value never falls below `f(a)` or `f(b)`.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Extremum {
    assert!(a <= b, "empty bracket [{a}, {b}]");
    let mut best = Extremum { x: a, value: f(a) };
    let fb = f(b);
    if fb > best.value {
        best = Extremum { x: b, value: fb };
    }
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        for (x, v) in [(x1, f1), (x2, f2)] {
            if v > best.value {
                best = Extremum { x, value: v };
            }
        }
    }
    best
}

/// Golden-section search for the minimum of a unimodal `f` on `[a, b]`.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Extremum {
    let e = golden_max(|x| -f(x), a, b, tol);
    Extremum {
        x: e.x,
        value: -e.value,
    }
}

/// Grid scan followed by golden-section polish around the best grid point.
///
/// `grid` must be sorted ascending. The polish bracket is the pair of grid
/// neighbours of the best node, so the result is at least the grid maximum.
pub fn grid_then_golden_max<F: FnMut(f64) -> f64>(mut f: F, grid: &[f64], tol: f64) -> Extremum {
    assert!(!grid.is_empty());
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let mut k = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[k] {
            k = i;
        }
    }
    let grid_best = Extremum {
        x: grid[k],
        value: values[k],
    };
    if grid.len() == 1 {
        return grid_best;
    }
    let lo = grid[k.saturating_sub(1)];
    let hi = grid[(k + 1).min(grid.len() - 1)];
    let polished = golden_max(&mut f, lo, hi, tol);
    if polished.value > grid_best.value {
        polished
    } else {
        grid_best
    }
}

/// Minimising counterpart of [`grid_then_golden_max`].
pub fn grid_then_golden_min<F: FnMut(f64) -> f64>(mut f: F, grid: &[f64], tol: f64) -> Extremum {
    let e = grid_then_golden_max(|x| -f(x), grid, tol);
    Extremum {
        x: e.x,
        value: -e.value,
    }
}

/// `n` evenly spaced points covering `[a, b]`, endpoints included.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let step = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { b } else { a + step * i as f64 })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola() {
        let e = golden_max(|x| -(x - 0.3) * (x - 0.3) + 2.0, 0.0, 1.0, 1e-12);
        assert!((e.x - 0.3).abs() < 1e-6);
        assert!((e.value - 2.0).abs() < 1e-12);
        let m = golden_min(|x| (x + 1.0).powi(2), -3.0, 2.0, 1e-12);
        assert!((m.x + 1.0).abs() < 1e-6);
    }

    #[test]
    fn endpoint_maximum() {
        let e = golden_max(|x| x, 0.0, 1.0, 1e-10);
        assert_eq!(e.value, 1.0);
    }

    #[test]
    fn grid_polish_beats_grid() {
        let grid = linspace(0.0, 6.0, 7);
        let e = grid_then_golden_max(|x| (x - 3.37f64).cos(), &grid, 1e-12);
        assert!((e.x - 3.37).abs() < 1e-6);
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
    }
}
