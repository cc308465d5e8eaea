//! Simple and double roots of the characteristic function.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::charfun::{char_at, char_d, count_below, CharValue, ROOT_RTOL};
use crate::error::{Error, Result};

/// All real roots `E` of `D(λ, ·)` in `[e_lo, e_hi)`, ascending, at most
/// `max_count` of them (the lowest ones).
///
/// Each eigenvalue is isolated by bisecting the exact Sturm count of
/// eigenvalues below `E`, so pairs separated by exponentially small gaps
/// are resolved down to the floating-point spacing.
pub fn real_roots_in_e(lambda: f64, e_lo: f64, e_hi: f64, max_count: usize) -> Result<Vec<f64>> {
    if !(e_lo < e_hi) {
        return Err(Error::Domain(format!("empty interval [{e_lo}, {e_hi})")));
    }
    let n_lo = count_below(lambda, e_lo);
    let n_hi = count_below(lambda, e_hi);
    let last = n_hi.min(n_lo + max_count);
    let mut roots = Vec::with_capacity(last.saturating_sub(n_lo));
    let mut floor = e_lo;
    for index in n_lo + 1..=last {
        let e = nth_eigenvalue_in(lambda, index, floor, e_hi)?;
        if let Some(&prev) = roots.last() {
            if e <= prev {
                return Err(Error::GridTooCoarse { near: e });
            }
        }
        roots.push(e);
        floor = e;
    }
    Ok(roots)
}

/// The `index`-th Schrödinger eigenvalue at real `λ`, known to lie in `[lo, hi)`.
pub(crate) fn nth_eigenvalue_in(lambda: f64, index: usize, lo: f64, hi: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if count_below(lambda, mid) >= index {
            b = mid;
        } else {
            a = mid;
        }
    }
    if count_below(lambda, b) > index {
        return Err(Error::GridTooCoarse { near: b });
    }
    let l = Complex64::new(lambda, 0.0);
    let da = char_d(l, Complex64::new(a, 0.0)).norm();
    let db = char_d(l, Complex64::new(b, 0.0)).norm();
    let mut e = if da < db { a } else { b };
    // one guarded Newton step for bisections that stopped short of the ulp
    let cv = char_at(l, Complex64::new(e, 0.0));
    if cv.d.norm() > cv.root_tolerance(l, Complex64::new(e, 0.0)) && cv.d_e.re != 0.0 {
        let cand = e - cv.d.re / cv.d_e.re;
        let margin = 4.0 * (b - a).max(f64::EPSILON * e.abs());
        if (cand - e).abs() <= margin && char_d(l, Complex64::new(cand, 0.0)).norm() < cv.d.norm() {
            e = cand;
        }
    }
    Ok(e)
}

/// Complex Newton for a root of `D(λ, ·)` starting from `e0`.
pub fn polish_e(lambda: Complex64, e0: Complex64, max_iter: usize) -> Result<Complex64> {
    let mut e = e0;
    for _ in 0..max_iter {
        let cv = char_at(lambda, e);
        let step = cv.d / cv.d_e;
        if !step.is_finite() {
            break;
        }
        e -= step;
        if cv.d.norm() <= cv.root_tolerance(lambda, e)
            || step.norm() <= 4.0 * f64::EPSILON * e.norm().max(1.0)
        {
            let cv = char_at(lambda, e);
            if cv.d.norm() <= 1e3 * cv.root_tolerance(lambda, e) {
                return Ok(e);
            }
        }
    }
    Err(Error::NonConvergence {
        what: "Newton in E",
        iterations: max_iter,
    })
}

/// Complex Newton for a root of `D(·, E)` starting from `l0`.
pub fn polish_lambda(e: Complex64, l0: Complex64, max_iter: usize) -> Result<Complex64> {
    let mut l = l0;
    for _ in 0..max_iter {
        let cv = char_at(l, e);
        let step = cv.d / cv.d_lambda;
        if !step.is_finite() {
            break;
        }
        l -= step;
        if cv.d.norm() <= cv.root_tolerance(l, e)
            || step.norm() <= 4.0 * f64::EPSILON * l.norm().max(1.0)
        {
            let cv = char_at(l, e);
            if cv.d.norm() <= 1e3 * cv.root_tolerance(l, e) {
                return Ok(l);
            }
        }
    }
    Err(Error::NonConvergence {
        what: "Newton in λ",
        iterations: max_iter,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Rectangle {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rectangle {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        if !(re_min < re_max && im_min < im_max) {
            return Err(Error::Domain(format!(
                "degenerate rectangle [{re_min}, {re_max}] x [{im_min}, {im_max}]"
            )));
        }
        Ok(Self {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }

    /// Square `[−r, r] × [−r, r]`.
    pub fn centered_square(radius: f64) -> Result<Self> {
        Self::new(-radius, radius, -radius, radius)
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(
            0.5 * (self.re_min + self.re_max),
            0.5 * (self.im_min + self.im_max),
        )
    }

    pub fn diameter(&self) -> f64 {
        (self.re_max - self.re_min).hypot(self.im_max - self.im_min)
    }

    fn contains(&self, z: Complex64, margin: f64) -> bool {
        z.re >= self.re_min - margin
            && z.re <= self.re_max + margin
            && z.im >= self.im_min - margin
            && z.im <= self.im_max + margin
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }

    fn split(&self, fx: f64, fy: f64) -> [Rectangle; 4] {
        let xm = self.re_min + fx * (self.re_max - self.re_min);
        let ym = self.im_min + fy * (self.im_max - self.im_min);
        [
            Rectangle { re_max: xm, im_max: ym, ..*self },
            Rectangle { re_min: xm, im_max: ym, ..*self },
            Rectangle { re_max: xm, im_min: ym, ..*self },
            Rectangle { re_min: xm, im_min: ym, ..*self },
        ]
    }
}

/// A root of `D(·, E)`; `multiplicity > 1` only for clusters that could not
/// be separated at the floating-point scale (double roots).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComplexRoot {
    pub lambda: Complex64,
    pub multiplicity: usize,
}

const INITIAL_SIDE_SAMPLES: usize = 64;
const MAX_ARG_REFINE_DEPTH: usize = 40;
const MAX_SPLIT_DEPTH: usize = 40;
const SPLIT_OFFSETS: [f64; 6] = [0.0, 0.0173, -0.0291, 0.0419, -0.0557, 0.0731];

struct Contour<'a> {
    e: Complex64,
    clearance: f64,
    rect: &'a Rectangle,
}

impl Contour<'_> {
    /// `D(z)` and the Newton distance `|D/D_λ|`, a lower bound on the
    /// distance to the nearest root up to its multiplicity.
    fn sample(&self, z: Complex64) -> Result<(Complex64, f64)> {
        let cv = char_at(z, self.e);
        let dist = cv.d.norm() / cv.d_lambda.norm();
        if !(dist >= self.clearance) && !(cv.d.norm() > 0.0 && cv.d_lambda.norm() == 0.0) {
            return Err(Error::BoundaryRoot { re: z.re, im: z.im });
        }
        Ok((cv.d, dist))
    }

    fn arg_change(
        &self,
        a: Complex64,
        b: Complex64,
        fa: (Complex64, f64),
        fb: (Complex64, f64),
        depth: usize,
    ) -> Result<f64> {
        let d = (fb.0 / fa.0).arg();
        // a segment long against the root distance can hide a full turn
        if d.abs() < FRAC_PI_2 && (b - a).norm() <= 0.5 * fa.1.min(fb.1) {
            return Ok(d);
        }
        if depth >= MAX_ARG_REFINE_DEPTH {
            return Err(Error::BoundaryRoot { re: a.re, im: a.im });
        }
        let m = 0.5 * (a + b);
        let fm = self.sample(m)?;
        Ok(self.arg_change(a, m, fa, fm, depth + 1)? + self.arg_change(m, b, fm, fb, depth + 1)?)
    }

    fn winding(&self) -> Result<i64> {
        let corners = self.rect.corners();
        let mut total = 0.0;
        for side in 0..4 {
            let (a, b) = (corners[side], corners[(side + 1) % 4]);
            let mut z_prev = a;
            let mut f_prev = self.sample(a)?;
            for k in 1..=INITIAL_SIDE_SAMPLES {
                let z = a + (b - a) * (k as f64 / INITIAL_SIDE_SAMPLES as f64);
                let f = self.sample(z)?;
                total += self.arg_change(z_prev, z, f_prev, f, 0)?;
                z_prev = z;
                f_prev = f;
            }
        }
        let w = total / TAU;
        let rounded = w.round();
        if (w - rounded).abs() > 1e-3 {
            let c = self.rect.center();
            return Err(Error::BoundaryRoot { re: c.re, im: c.im });
        }
        Ok(rounded as i64)
    }
}

fn clearance_for(rect: &Rectangle) -> f64 {
    1e-6 * rect.diameter()
}

/// Number of roots of `D(·, E)` inside `rect` by the argument principle.
pub fn winding_number(e: Complex64, rect: &Rectangle) -> Result<i64> {
    Contour {
        e,
        clearance: clearance_for(rect),
        rect,
    }
    .winding()
}

/// Every `λ`-root of `D(·, E)` inside `rect`, sorted by `(Re, Im)`.
pub fn complex_roots_in_rectangle(e: Complex64, rect: &Rectangle) -> Result<Vec<ComplexRoot>> {
    let w = winding_number(e, rect)?;
    let mut out = Vec::new();
    solve_rect(e, rect, w, 0, &mut out)?;
    out.sort_by(|a, b| {
        a.lambda
            .re
            .total_cmp(&b.lambda.re)
            .then(a.lambda.im.total_cmp(&b.lambda.im))
    });
    let mut merged: Vec<ComplexRoot> = Vec::with_capacity(out.len());
    for r in out {
        match merged.last_mut() {
            Some(last)
                if (last.lambda - r.lambda).norm() <= 1e-8 * r.lambda.norm().max(1.0) =>
            {
                last.multiplicity = last.multiplicity.max(r.multiplicity);
            }
            _ => merged.push(r),
        }
    }
    Ok(merged)
}

fn solve_rect(
    e: Complex64,
    rect: &Rectangle,
    w: i64,
    depth: usize,
    out: &mut Vec<ComplexRoot>,
) -> Result<()> {
    if w <= 0 {
        return Ok(());
    }
    if w == 1 {
        if let Some(l) = newton_inside(e, rect) {
            out.push(ComplexRoot {
                lambda: l,
                multiplicity: 1,
            });
            return Ok(());
        }
    }
    let c = rect.center();
    if w >= 2 && rect.diameter() <= 1e-7 * c.norm().max(1.0) {
        out.push(ComplexRoot {
            lambda: cluster_center(e, rect),
            multiplicity: w as usize,
        });
        return Ok(());
    }
    if depth >= MAX_SPLIT_DEPTH {
        return Err(Error::NonConvergence {
            what: "rectangle quadrisection",
            iterations: depth,
        });
    }
    let mut last_err = Error::BoundaryRoot { re: c.re, im: c.im };
    'offsets: for (i, &dx) in SPLIT_OFFSETS.iter().enumerate() {
        let dy = SPLIT_OFFSETS[(i * 2 + 1) % SPLIT_OFFSETS.len()];
        let children = rect.split(0.5 + dx, 0.5 + dy);
        let mut windings = [0i64; 4];
        for (k, child) in children.iter().enumerate() {
            match (Contour {
                e,
                clearance: clearance_for(child),
                rect: child,
            })
            .winding()
            {
                Ok(cw) => windings[k] = cw,
                Err(err) => {
                    last_err = err;
                    continue 'offsets;
                }
            }
        }
        if windings.iter().sum::<i64>() != w {
            continue;
        }
        for (child, cw) in children.iter().zip(windings) {
            solve_rect(e, child, cw, depth + 1, out)?;
        }
        return Ok(());
    }
    // a multiple root inside the rounding-noise zone of D cannot be split
    if w >= 2 && rect.diameter() <= 1e-5 * c.norm().max(1.0) {
        out.push(ComplexRoot {
            lambda: cluster_center(e, rect),
            multiplicity: w as usize,
        });
        return Ok(());
    }
    Err(last_err)
}

fn newton_inside(e: Complex64, rect: &Rectangle) -> Option<Complex64> {
    let diam = rect.diameter();
    let mut l = rect.center();
    for _ in 0..60 {
        let cv = char_at(l, e);
        let mut step = cv.d / cv.d_lambda;
        if !step.is_finite() {
            return None;
        }
        if step.norm() > diam {
            step *= diam / step.norm();
        }
        l -= step;
        if !rect.contains(l, diam) {
            return None;
        }
        let small_step = step.norm() <= 4.0 * f64::EPSILON * l.norm().max(1.0);
        let cv2 = char_at(l, e);
        let tol = cv2.root_tolerance(l, e);
        if cv2.d.norm() <= tol || (small_step && cv2.d.norm() <= 1e3 * tol) {
            return rect.contains(l, 1e-9 * diam).then_some(l);
        }
    }
    None
}

fn cluster_center(e: Complex64, rect: &Rectangle) -> Complex64 {
    // a double root is a simple root of D_λ
    let mut l = rect.center();
    for _ in 0..30 {
        let cv = char_at(l, e);
        let step = cv.d_lambda / cv.d_ll;
        if !step.is_finite() {
            break;
        }
        let next = l - step;
        if !rect.contains(next, rect.diameter()) {
            break;
        }
        l = next;
        if step.norm() <= 4.0 * f64::EPSILON * l.norm().max(1.0) {
            break;
        }
    }
    l
}

/// Which partial joins `D` in the double-root system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum DoubleRootMode {
    /// `D = D_E = 0`: two Schrödinger eigenvalues coincide.
    SchrodingerBranch,
    /// `D = D_λ = 0`: two eigencouplings coincide (a Schrödinger critical point).
    RichardsonBranch,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DoubleRootSpec {
    pub mode: DoubleRootMode,
    pub seed_lambda: Complex64,
    pub seed_e: Complex64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DoubleRoot {
    pub mode: DoubleRootMode,
    pub lambda: Complex64,
    pub e: Complex64,
    pub iterations: usize,
    /// The first partial not constrained by the system (`D_λ` or `D_E`).
    pub other_partial: Complex64,
    /// `D_EE` for Schrödinger branch points, `D_λλ` for Richardson ones.
    pub second_partial: Complex64,
}

impl DoubleRoot {
    /// Square-root type certificate: both the free first partial and the
    /// relevant second partial are bounded away from zero.
    pub fn is_nondegenerate(&self) -> bool {
        let s = self.lambda.norm().max(self.e.norm()).max(1.0);
        self.other_partial.norm() * s > 1e-8 && self.second_partial.norm() * s * s > 1e-8
    }
}

struct System {
    f: [Complex64; 2],
    jac: [[Complex64; 2]; 2],
    scale: [f64; 2],
}

fn system(mode: DoubleRootMode, l: Complex64, e: Complex64) -> (System, CharValue) {
    let cv = char_at(l, e);
    let (g, g_l, g_e) = match mode {
        DoubleRootMode::SchrodingerBranch => (cv.d_e, cv.d_le, cv.d_ee),
        DoubleRootMode::RichardsonBranch => (cv.d_lambda, cv.d_ll, cv.d_le),
    };
    let scale = [
        1f64.max(cv.d_e.norm() * e.norm()).max(cv.d_lambda.norm() * l.norm()),
        1f64.max(g_e.norm() * e.norm()).max(g_l.norm() * l.norm()),
    ];
    (
        System {
            f: [cv.d, g],
            jac: [[cv.d_lambda, cv.d_e], [g_l, g_e]],
            scale,
        },
        cv,
    )
}

fn merit(s: &System) -> f64 {
    s.f[0].norm() / s.scale[0] + s.f[1].norm() / s.scale[1]
}

/// Newton's method on the 2×2 system `(D, D_E)` or `(D, D_λ)` with the
/// analytic Jacobian built from second partials.
pub fn double_root(spec: &DoubleRootSpec) -> Result<DoubleRoot> {
    const MAX_ITER: usize = 100;
    let mode = spec.mode;
    let (mut l, mut e) = (spec.seed_lambda, spec.seed_e);
    let (mut sys, mut cv) = system(mode, l, e);
    for it in 0..MAX_ITER {
        if sys.f[0].norm() <= ROOT_RTOL * sys.scale[0] && sys.f[1].norm() <= ROOT_RTOL * sys.scale[1]
        {
            let (l, e, cv) = polish(mode, l, e, sys, cv);
            return Ok(finish(mode, l, e, it, &cv));
        }
        let [[a, b], [c, d]] = sys.jac;
        let det = a * d - b * c;
        let det_scale = (a.norm() + b.norm()) * (c.norm() + d.norm());
        if !(det.norm() > 1e-14 * det_scale) {
            return Err(Error::DegenerateJacobian { det: det.norm() });
        }
        let dl = (d * sys.f[0] - b * sys.f[1]) / det;
        let de = (a * sys.f[1] - c * sys.f[0]) / det;
        let m0 = merit(&sys);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let (nl, ne) = (l - dl * t, e - de * t);
            let (ns, ncv) = system(mode, nl, ne);
            if merit(&ns) < m0 || t < 1e-3 {
                l = nl;
                e = ne;
                sys = ns;
                cv = ncv;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
        let tiny = (dl * t).norm() <= 8.0 * f64::EPSILON * l.norm().max(1.0)
            && (de * t).norm() <= 8.0 * f64::EPSILON * e.norm().max(1.0);
        if tiny
            && sys.f[0].norm() <= 1e2 * ROOT_RTOL * sys.scale[0]
            && sys.f[1].norm() <= 1e2 * ROOT_RTOL * sys.scale[1]
        {
            return Ok(finish(mode, l, e, it + 1, &cv));
        }
    }
    Err(Error::NonConvergence {
        what: "double-root Newton",
        iterations: MAX_ITER,
    })
}

/// A few extra full Newton steps past the tolerance, kept only while the
/// residual keeps dropping.
fn polish(
    mode: DoubleRootMode,
    mut l: Complex64,
    mut e: Complex64,
    mut sys: System,
    mut cv: CharValue,
) -> (Complex64, Complex64, CharValue) {
    for _ in 0..4 {
        let [[a, b], [c, d]] = sys.jac;
        let det = a * d - b * c;
        let dl = (d * sys.f[0] - b * sys.f[1]) / det;
        let de = (a * sys.f[1] - c * sys.f[0]) / det;
        if !(dl.is_finite() && de.is_finite()) {
            break;
        }
        let (nl, ne) = (l - dl, e - de);
        let (ns, ncv) = system(mode, nl, ne);
        if !(merit(&ns) < merit(&sys)) {
            break;
        }
        (l, e, sys, cv) = (nl, ne, ns, ncv);
    }
    (l, e, cv)
}

fn finish(mode: DoubleRootMode, l: Complex64, e: Complex64, iterations: usize, cv: &CharValue) -> DoubleRoot {
    let (other_partial, second_partial) = match mode {
        DoubleRootMode::SchrodingerBranch => (cv.d_lambda, cv.d_ee),
        DoubleRootMode::RichardsonBranch => (cv.d_e, cv.d_ll),
    };
    DoubleRoot {
        mode,
        lambda: l,
        e,
        iterations,
        other_partial,
        second_partial,
    }
}

/// Reference value `π²/4` used throughout.
pub const QUARTER_PI_SQ: f64 = PI * PI / 4.0;

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn free_well_real_roots() {
        let r = real_roots_in_e(0.0, 0.0, 30.0, 10).unwrap();
        assert_eq!(r.len(), 3);
        for (n, e) in r.iter().enumerate() {
            let exact = ((n + 1) * (n + 1)) as f64 * QUARTER_PI_SQ;
            assert!((e - exact).abs() < 1e-12, "{e} vs {exact}");
        }
        assert_eq!(real_roots_in_e(0.0, 0.0, 30.0, 2).unwrap().len(), 2);
    }

    #[test]
    fn lattice_root_is_found() {
        let r = real_roots_in_e(PI * PI, 0.0, 20.0, 10).unwrap();
        assert!(r.iter().any(|e| (e - 1.25 * PI * PI).abs() < 1e-12));
    }

    #[test]
    fn reject_empty_interval() {
        assert!(real_roots_in_e(0.0, 1.0, 1.0, 3).is_err());
        assert!(Rectangle::new(1.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn winding_around_single_root() {
        let rect = Rectangle::new(2.0, 3.0, -0.5, 0.5).unwrap();
        assert_eq!(winding_number(c(QUARTER_PI_SQ, 0.0), &rect).unwrap(), 0);
        // E = π²/4 has λ = 0 as a double root
        let rect = Rectangle::new(-0.3, 0.31, -0.29, 0.3).unwrap();
        assert_eq!(winding_number(c(QUARTER_PI_SQ, 0.0), &rect).unwrap(), 2);
        let rect = Rectangle::new(-2.0, 2.01, -2.03, 2.0).unwrap();
        let e = c(QUARTER_PI_SQ + 0.01, 0.0);
        assert_eq!(winding_number(e, &rect).unwrap(), 2);
        let roots = complex_roots_in_rectangle(e, &rect).unwrap();
        assert_eq!(roots.len(), 2);
        for r in &roots {
            assert_eq!(r.multiplicity, 1);
            assert!(r.lambda.re.abs() < 1e-9 && r.lambda.im.abs() > 0.05, "{}", r.lambda);
        }
        assert!((roots[0].lambda + roots[1].lambda).norm() < 1e-9);
    }

    #[test]
    fn real_pair_at_zero_energy() {
        // E = 0: λ = s² with sin s cosh s + cos s sinh s = 0, s in (π/2, π)
        let f = |s: f64| s.sin() * s.cosh() + s.cos() * s.sinh();
        let (mut a, mut b) = (FRAC_PI_2, PI);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(a) * f(m) <= 0.0 {
                b = m;
            } else {
                a = m;
            }
        }
        let l0 = 0.5 * (a + b);
        let l0 = l0 * l0;
        let rect = Rectangle::new(-10.0, 10.01, -10.02, 10.0).unwrap();
        let roots = complex_roots_in_rectangle(c(0.0, 0.0), &rect).unwrap();
        assert_eq!(roots.len(), 2, "{roots:?}");
        assert!((roots[0].lambda - c(-l0, 0.0)).norm() < 1e-9);
        assert!((roots[1].lambda - c(l0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn double_root_counts_twice() {
        // the rounded π²/4 splits the double root by about √ulp
        let rect = Rectangle::new(-0.3, 0.31, -0.29, 0.3).unwrap();
        let roots = complex_roots_in_rectangle(c(QUARTER_PI_SQ, 0.0), &rect).unwrap();
        assert_eq!(roots.iter().map(|r| r.multiplicity).sum::<usize>(), 2);
        assert!(roots.iter().all(|r| r.lambda.norm() < 1e-6), "{roots:?}");
    }

    #[test]
    fn boundary_root_is_reported() {
        // the positive root at E = 0 sits on the right edge
        let l0 = polish_lambda(c(0.0, 0.0), c(5.6, 0.0), 50).unwrap();
        let rect = Rectangle::new(l0.re - 1.0, l0.re, -1.0, 1.0).unwrap();
        assert!(matches!(
            winding_number(c(0.0, 0.0), &rect),
            Err(Error::BoundaryRoot { .. })
        ));
    }

    #[test]
    fn schrodinger_branch_point_from_table() {
        let r = double_root(&DoubleRootSpec {
            mode: DoubleRootMode::SchrodingerBranch,
            seed_lambda: c(0.0, 4.5),
            seed_e: c(6.4, 0.0),
        })
        .unwrap();
        assert!((r.lambda - c(0.0, 4.475309)).norm() < 1e-6, "{}", r.lambda);
        assert!((r.e - c(6.401903, 0.0)).norm() < 1e-6, "{}", r.e);
        assert!(r.is_nondegenerate());
    }

    #[test]
    fn richardson_branch_points() {
        let r = double_root(&DoubleRootSpec {
            mode: DoubleRootMode::RichardsonBranch,
            seed_lambda: c(6.2, 0.0),
            seed_e: c(22.0, 0.0),
        })
        .unwrap();
        assert!((r.lambda - c(6.151546, 0.0)).norm() < 1e-6, "{}", r.lambda);
        assert!((r.e - c(21.996039, 0.0)).norm() < 1e-6, "{}", r.e);

        let r = double_root(&DoubleRootSpec {
            mode: DoubleRootMode::RichardsonBranch,
            seed_lambda: c(9.9, 0.0),
            seed_e: c(12.3, 0.0),
        })
        .unwrap();
        assert!((r.lambda - c(PI * PI, 0.0)).norm() < 1e-10);
        assert!((r.e - c(1.25 * PI * PI, 0.0)).norm() < 1e-10);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn winding_counts_found_roots(
                cx in -20.0..20.0f64, cy in -10.0..10.0f64,
                w in 0.5..8.0f64, e in -5.0..40.0f64,
            ) {
                let rect = Rectangle::new(cx - w, cx + w * 1.01, cy - w * 0.97, cy + w).unwrap();
                let ec = Complex64::new(e, 0.0);
                if let Ok(n) = winding_number(ec, &rect) {
                    let roots = complex_roots_in_rectangle(ec, &rect).unwrap();
                    let total: usize = roots.iter().map(|r| r.multiplicity).sum();
                    prop_assert_eq!(total as i64, n);
                    for r in roots {
                        let cv = char_at(r.lambda, ec);
                        prop_assert!(cv.d.norm() <= 1e3 * cv.root_tolerance(r.lambda, ec));
                    }
                }
            }
        }
    }
}
