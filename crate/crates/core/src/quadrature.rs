//! Adaptive Simpson quadrature in `f64`, used for cross-checks and for
//! envelope primitives without a closed form.

/// `int_a^b f` to relative tolerance `rel_tol` (absolute floor `1e-300`).
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    // a composite first pass sets the scale, so a coarse estimate that
    // happens to vanish cannot demand unbounded refinement
    const PANELS: usize = 32;
    let h = (b - a) / PANELS as f64;
    let mut panels = Vec::with_capacity(PANELS);
    let mut scale = 0.0;
    let mut fl = f(a);
    for i in 0..PANELS {
        let lo = a + h * i as f64;
        let hi = if i + 1 == PANELS { b } else { lo + h };
        let fm = f(0.5 * (lo + hi));
        let fh = f(hi);
        let whole = (hi - lo) / 6.0 * (fl + 4.0 * fm + fh);
        scale += whole.abs();
        panels.push((lo, hi, fl, fm, fh, whole));
        fl = fh;
    }
    let scale = scale.max(1e-300);
    let floor = 64.0 * f64::EPSILON * scale / PANELS as f64;
    let tol = (rel_tol * scale / PANELS as f64).max(floor);
    panels
        .into_iter()
        .map(|(lo, hi, fa, fm, fb, whole)| recurse(f, lo, hi, fa, fm, fb, whole, tol, floor, 40))
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    floor: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    // halving stops at the rounding floor so noise cannot force full refinement
    let child = (tol / 2.0).max(floor);
    recurse(f, a, m, fa, flm, fm, left, child, floor, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, child, floor, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_integrals() {
        let v = adaptive_simpson(&|x: f64| x.exp(), 0.0, 1.0, 1e-12);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-11);
        let v = adaptive_simpson(&|x: f64| 1.0 / x, 1.0, 1000.0, 1e-12);
        assert!((v - 1000f64.ln()).abs() < 1e-10);
        assert_eq!(adaptive_simpson(&|x: f64| x, 2.0, 2.0, 1e-9), 0.0);
    }
}
