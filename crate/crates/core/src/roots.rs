//! Zero finding for real characteristic functions.
//!
//! The scan variable is `t = sign(lambda) sqrt|lambda|`, in which the zeros of
//! a characteristic function become asymptotically equispaced. Sign changes
//! between consecutive scan points are refined with the Illinois variant of
//! regula falsi; a same-sign local minimum of `|f|` is searched by golden
//! section for a hidden pair of close zeros.

use crate::error::{Error, Result};

/// `lambda(t) = t |t|`.
pub(crate) fn lambda_of(t: f64) -> f64 {
    t * t.abs()
}

/// Relative depth below which a non-crossing dip is reported as a double root.
pub(crate) const DOUBLE_ROOT_DEPTH: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Scan {
    pub t_start: f64,
    pub dt: f64,
    /// Number of zeros wanted.
    pub count: usize,
    /// Hard upper limit for the scan variable.
    pub t_limit: f64,
}

/// Smallest `count` zeros of `f` above `lambda(t_start)`, in increasing order.
pub(crate) fn scan_zeros<F>(f: &F, scan: Scan) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut zeros: Vec<f64> = Vec::with_capacity(scan.count + 2);
    // window of the last three (lambda, value) pairs
    let mut window: Vec<(f64, f64)> = Vec::with_capacity(3);
    let mut j = 0usize;
    while zeros.len() < scan.count {
        let t = scan.t_start + j as f64 * scan.dt;
        if t > scan.t_limit {
            return Err(Error::NonConvergent(format!(
                "found {} of {} zeros before the scan limit lambda = {:.6e}; increase the scan range",
                zeros.len(),
                scan.count,
                lambda_of(scan.t_limit)
            )));
        }
        let lam = lambda_of(t);
        let val = f(lam)?;
        if val == 0.0 {
            zeros.push(lam);
        }
        if let Some(&(lp, fp)) = window.last() {
            if fp != 0.0 && val != 0.0 && (fp < 0.0) != (val < 0.0) {
                zeros.push(illinois(f, lp, fp, lam, val)?);
            }
        }
        window.push((lam, val));
        if window.len() > 3 {
            window.remove(0);
        }
        if window.len() == 3 {
            let [(la, fa), (_, fb), (lc, fc)] = [window[0], window[1], window[2]];
            let same_sign = fa != 0.0
                && fb != 0.0
                && fc != 0.0
                && (fa < 0.0) == (fb < 0.0)
                && (fb < 0.0) == (fc < 0.0);
            if same_sign && fb.abs() < fa.abs() && fb.abs() < fc.abs() {
                if let Some(split) = probe_dip(f, la, fa, lc, fc)? {
                    let (lm, fm) = split;
                    zeros.push(illinois(f, la, fa, lm, fm)?);
                    zeros.push(illinois(f, lm, fm, lc, fc)?);
                }
            }
        }
        j += 1;
    }
    zeros.sort_by(f64::total_cmp);
    zeros.dedup();
    zeros.truncate(scan.count);
    Ok(zeros)
}

/// Illinois-modified regula falsi on a sign-changing bracket.
pub(crate) fn illinois<F>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let (mut a, mut fa, mut b, mut fb) = (a, fa, b, fb);
    let mut side = 0i8;
    for _ in 0..200 {
        let tol = 2.0 * f64::EPSILON * a.abs().max(b.abs()) + 1e-300;
        if (b - a).abs() <= tol {
            break;
        }
        let mut c = (a * fb - b * fa) / (fb - fa);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        if !(c > lo && c < hi) {
            c = 0.5 * (a + b);
            if !(c > lo && c < hi) {
                break;
            }
        }
        let fc = f(c)?;
        if fc == 0.0 {
            return Ok(c);
        }
        if (fc < 0.0) == (fb < 0.0) {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Ok(if fa.abs() < fb.abs() { a } else { b })
}

/// Golden-section search for the minimum of `sign * f` on `[a, c]`.
///
/// Returns a point where `f` has the opposite sign (splitting the dip into two
/// brackets), `None` for an ordinary dip, or a double-root error when the dip
/// touches zero without crossing.
fn probe_dip<F>(f: &F, a: f64, fa: f64, c: f64, fc: f64) -> Result<Option<(f64, f64)>>
where
    F: Fn(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let sign = fa.signum();
    let g = |x: f64| -> Result<(f64, f64)> {
        let v = f(x)?;
        Ok((sign * v, v))
    };
    let (mut lo, mut hi) = (a, c);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut g1, v1) = g(x1)?;
    if g1 <= 0.0 {
        return Ok(Some((x1, v1)));
    }
    let (mut g2, v2) = g(x2)?;
    if g2 <= 0.0 {
        return Ok(Some((x2, v2)));
    }
    for _ in 0..120 {
        if hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()) + 1e-300 {
            break;
        }
        if g1 < g2 {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - INV_PHI * (hi - lo);
            let (gv, v) = g(x1)?;
            if gv <= 0.0 {
                return Ok(Some((x1, v)));
            }
            g1 = gv;
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + INV_PHI * (hi - lo);
            let (gv, v) = g(x2)?;
            if gv <= 0.0 {
                return Ok(Some((x2, v)));
            }
            g2 = gv;
        }
    }
    let depth = g1.min(g2);
    if depth <= DOUBLE_ROOT_DEPTH * fa.abs().max(fc.abs()) {
        return Err(Error::DoubleRoot(if g1 < g2 { x1 } else { x2 }));
    }
    Ok(None)
}
