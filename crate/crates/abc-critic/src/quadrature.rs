//! Adaptive Simpson quadrature.
//!
//! Used to normalize location-family error posteriors and to integrate
//! model densities against priors. The adaptive pass starts from a fixed
//! panel grid so that narrow integrands inside a wide interval are not
//! missed by the first three samples.

/// Absolute tolerance used by the posterior normalization routines.
pub const DEFAULT_TOL: f64 = 1e-10;

const MAX_DEPTH: u32 = 48;

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if depth >= MAX_DEPTH || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)
        + adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)
}

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`, seeding the
/// adaptive refinement with `panels` equal subintervals.
pub fn adaptive_simpson_panels<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    panels: usize,
) -> f64 {
    debug_assert!(a.is_finite() && b.is_finite() && a < b);
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    let per_panel_tol = tol / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let pa = a + i as f64 * width;
        let pb = if i + 1 == panels { b } else { pa + width };
        let pm = 0.5 * (pa + pb);
        let fa = f(pa);
        let fm = f(pm);
        let fb = f(pb);
        let whole = simpson(fa, fm, fb, pb - pa);
        total += adapt(&f, pa, pb, fa, fm, fb, whole, per_panel_tol, 0);
    }
    total
}

/// Integrate `f` over `[a, b]` with the default panel count.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    adaptive_simpson_panels(f, a, b, tol, 32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        let v = adaptive_simpson(|x| 3.0 * x * x, 0.0, 2.0, 1e-12);
        assert!((v - 8.0).abs() < 1e-10);
    }

    #[test]
    fn standard_normal_mass() {
        let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
        let v = adaptive_simpson(phi, -8.0, 8.0, 1e-12);
        assert!((v - 1.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn narrow_bump_in_wide_interval_is_found() {
        // Unit-mass Gaussian of width 1 centered at 137 inside [-800, 800];
        // the panel seeding must not let the refinement miss it.
        let bump = |x: f64| (-0.5 * (x - 137.0) * (x - 137.0)).exp() / (2.0 * PI).sqrt();
        let v = adaptive_simpson_panels(bump, -800.0, 800.0, 1e-10, 256);
        assert!((v - 1.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn oscillatory_integrand() {
        let v = adaptive_simpson(|x: f64| x.sin(), 0.0, PI, 1e-12);
        assert!((v - 2.0).abs() < 1e-10);
    }
}
