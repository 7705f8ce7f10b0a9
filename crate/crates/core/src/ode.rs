//! Fixed-step classical Runge–Kutta for small first-order systems.

use std::ops::{Add, Mul};

/// One RK4 step of y' = f(z, y) from `z` with step `h` (which may be negative).
pub fn rk4_step<T, F, const N: usize>(f: &F, z: f64, y: &[T; N], h: f64) -> [T; N]
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T>,
    F: Fn(f64, &[T; N]) -> [T; N],
{
    let axpy = |y: &[T; N], k: &[T; N], s: f64| -> [T; N] {
        let mut out = *y;
        for (o, &ki) in out.iter_mut().zip(k) {
            *o = *o + ki * s;
        }
        out
    };
    let k1 = f(z, y);
    let k2 = f(z + 0.5 * h, &axpy(y, &k1, 0.5 * h));
    let k3 = f(z + 0.5 * h, &axpy(y, &k2, 0.5 * h));
    let k4 = f(z + h, &axpy(y, &k3, h));
    let mut out = *y;
    for i in 0..N {
        out[i] = out[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
    }
    out
}

/// Integrates from `z0` to `z1` in `steps` equal steps, calling `visit`
/// with every node including both ends.
pub fn integrate<T, F, V, const N: usize>(
    f: F,
    z0: f64,
    z1: f64,
    steps: usize,
    y0: [T; N],
    mut visit: V,
) -> [T; N]
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T>,
    F: Fn(f64, &[T; N]) -> [T; N],
    V: FnMut(f64, &[T; N]),
{
    let h = (z1 - z0) / steps as f64;
    let mut y = y0;
    visit(z0, &y);
    for i in 0..steps {
        let z = z0 + i as f64 * h;
        y = rk4_step(&f, z, &y, h);
        let zn = if i + 1 == steps { z1 } else { z0 + (i + 1) as f64 * h };
        visit(zn, &y);
    }
    y
}
