//! Bracketing root finders used by every critical-value solve.

use crate::error::{Error, Result};

/// Bisection on `[a, b]`, which must bracket a sign change of `f`.
///
/// Stops when the bracket is below `rel_tol · max(|a|, |b|)` (or `abs_floor`).
pub fn bisect<F>(mut f: F, mut a: f64, mut b: f64, rel_tol: f64, abs_floor: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut fa = f(a)?;
    let fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoRoot(format!("[{a}, {b}] does not bracket a sign change")));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= (rel_tol * a.abs().max(b.abs())).max(abs_floor) || m == a || m == b {
            return Ok(m);
        }
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// All sign changes of `f` between consecutive grid points, refined by bisection.
///
/// Points where `f` fails are skipped. An exact zero on the grid is reported once.
pub fn scan_roots<F>(f: F, grid: &[f64], rel_tol: f64) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    let values: Vec<Option<f64>> = grid.iter().map(|&x| f(x).ok().filter(|v| v.is_finite())).collect();
    let mut roots = Vec::new();
    for i in 0..grid.len() {
        if values[i] == Some(0.0) {
            roots.push(grid[i]);
            continue;
        }
        if i + 1 == grid.len() {
            break;
        }
        if let (Some(u), Some(v)) = (values[i], values[i + 1]) {
            if v != 0.0 && u.signum() != v.signum() {
                roots.push(bisect(&f, grid[i], grid[i + 1], rel_tol, 0.0)?);
            }
        }
    }
    Ok(roots)
}

/// `n` points from `start` to `stop`, evenly spaced or geometric.
pub fn grid(start: f64, stop: f64, n: usize, log: bool) -> Result<Vec<f64>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![start]);
    }
    if log && !(start > 0.0 && stop > 0.0) {
        return Err(Error::invalid("log grid needs positive end points"));
    }
    let last = (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            let t = i as f64 / last;
            if log {
                (start.ln() + t * (stop.ln() - start.ln())).exp()
            } else {
                start + t * (stop - start)
            }
        })
        .collect())
}
