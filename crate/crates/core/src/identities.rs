//! Numerical checks of the analytic identities tying the two descriptions
//! together: derivative formulas, reciprocity, defect orthogonality,
//! generalized eigenfunctions and the Hermitian signature.

use num_complex::Complex64;
use serde::Serialize;

use crate::charfun::{char_at, check_eigenpair, inner_products, kernel, normalization, EIGENPAIR_SLACK};
use crate::error::{Error, Result};
use crate::lattice::UNIT;
use crate::schrodinger::{BranchPoint, CriticalPoint, RealLocus};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub name: String,
    pub location: (Complex64, Complex64),
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl IdentityReport {
    pub fn new(name: impl Into<String>, location: (Complex64, Complex64), residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            location,
            residual,
            tolerance,
            // NaN fails
            pass: residual <= tolerance,
        }
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Newton in `E` run to the floating-point floor.
fn settle_e(lambda: Complex64, e0: Complex64) -> Complex64 {
    let mut e = e0;
    for _ in 0..40 {
        let cv = char_at(lambda, e);
        let step = cv.d / cv.d_e;
        if !step.is_finite() {
            break;
        }
        e -= step;
        if step.norm() <= 2.0 * f64::EPSILON * e.norm().max(1.0) {
            break;
        }
    }
    e
}

/// Central difference with one Richardson extrapolation step.
fn extrapolated_difference(f: impl Fn(f64) -> Complex64, h: f64) -> Complex64 {
    let d = |h: f64| (f(h) - f(-h)) / (2.0 * h);
    let (d1, d2) = (d(h), d(0.5 * h));
    (4.0 * d2 - d1) / 3.0
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DerivativeCheck {
    /// `∂E/∂λ` from the inner products, `−⟨ψ|sgn|ψ⟩_R / ⟨ψ|ψ⟩_R`.
    pub formula: Complex64,
    /// `−D_λ / D_E`.
    pub implicit: Complex64,
    /// Difference quotient of the continued root `E(λ)`.
    pub finite_difference: Complex64,
    /// `∂λ/∂E = −D_E / D_λ`.
    pub inverse: Complex64,
    /// Largest relative disagreement among the three slopes.
    pub agreement: IdentityReport,
    /// `|formula · inverse − 1|`: the inner-product slope against the
    /// characteristic function's inverse slope.
    pub reciprocity: IdentityReport,
}

pub const DERIVATIVE_RTOL: f64 = 1e-6;
pub const RECIPROCITY_TOL: f64 = 1e-8;

/// Slope of the eigenvalue through `(λ, E)` three ways, and the reciprocity
/// of the two inverse slopes.
pub fn derivative_check(lambda: Complex64, e: Complex64) -> Result<DerivativeCheck> {
    let ip = inner_products(lambda, e)?;
    if ip.rr.norm() < 1e-10 {
        return Err(Error::NearDegenerate { value: ip.rr.norm() });
    }
    let cv = char_at(lambda, e);
    let formula = -ip.rvr / ip.rr;
    let implicit = cv.de_dlambda();

    let h = 1e-4 * lambda.norm().max(1.0);
    let finite_difference = extrapolated_difference(
        |dl| {
            let l = lambda + dl;
            settle_e(l, e + implicit * dl)
        },
        h,
    );
    let inverse = cv.dlambda_de();

    let scale = formula.norm().max(implicit.norm()).max(finite_difference.norm());
    let spread = (formula - implicit)
        .norm()
        .max((formula - finite_difference).norm())
        .max((implicit - finite_difference).norm());
    let rel = if scale > 0.0 { spread / scale } else { 0.0 };
    let loc = (lambda, e);
    Ok(DerivativeCheck {
        formula,
        implicit,
        finite_difference,
        inverse,
        agreement: IdentityReport::new("derivative agreement", loc, rel, DERIVATIVE_RTOL),
        reciprocity: IdentityReport::new(
            "reciprocity",
            loc,
            (formula * inverse - 1.0).norm(),
            RECIPROCITY_TOL,
        ),
    })
}

pub const IM_IDENTITY_TOL: f64 = 1e-8;

/// `Im E + Im λ · ⟨ψ|sgn|ψ⟩_H / ⟨ψ|ψ⟩_H`, which vanishes at every eigenpair.
pub fn im_identity(lambda: Complex64, e: Complex64) -> Result<IdentityReport> {
    let ip = inner_products(lambda, e)?;
    let r = (e.im + lambda.im * ip.hvh / ip.hh).abs();
    Ok(IdentityReport::new("imaginary-part identity", (lambda, e), r, IM_IDENTITY_TOL))
}

/// A point where two roots of `D` coincide, in either variable.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum DegeneratePoint {
    /// Double root in `E`: two Schrödinger eigenvalues collide.
    Schrodinger { lambda: Complex64, e: Complex64 },
    /// Double root in `λ`: a critical point of a real eigencurve.
    Richardson { lambda: Complex64, e: Complex64 },
}

impl DegeneratePoint {
    pub fn location(&self) -> (Complex64, Complex64) {
        match *self {
            DegeneratePoint::Schrodinger { lambda, e } | DegeneratePoint::Richardson { lambda, e } => (lambda, e),
        }
    }
}

impl From<&BranchPoint> for DegeneratePoint {
    fn from(b: &BranchPoint) -> Self {
        DegeneratePoint::Schrodinger {
            lambda: b.lambda,
            e: b.e,
        }
    }
}

impl From<&CriticalPoint> for DegeneratePoint {
    fn from(p: &CriticalPoint) -> Self {
        DegeneratePoint::Richardson {
            lambda: c(p.lambda),
            e: c(p.e),
        }
    }
}

pub const DEFECT_TOL: f64 = 1e-8;

/// The bilinear product that must vanish at a degenerate point:
/// `⟨ψ|ψ⟩_R` for a branch point, `⟨ψ|sgn|ψ⟩_R` for a critical point,
/// relative to `⟨ψ|ψ⟩_H`.
pub fn defect_check(point: &DegeneratePoint) -> Result<IdentityReport> {
    let (l, e) = point.location();
    let ip = inner_products(l, e)?;
    let (name, v) = match point {
        DegeneratePoint::Schrodinger { .. } => ("defect <psi|psi>_R", ip.rr),
        DegeneratePoint::Richardson { .. } => ("defect <psi|sgn|psi>_R", ip.rvr),
    };
    Ok(IdentityReport::new(name, (l, e), v.norm() / ip.hh, DEFECT_TOL))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChainSample {
    pub x: f64,
    pub psi: Complex64,
    pub psi_tilde: Complex64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeneralizedEigenfunction {
    pub samples: Vec<ChainSample>,
    /// `max(|ψ̃(−1)|, |ψ̃(1)|)`.
    pub boundary: IdentityReport,
    /// Second-difference residual of the inhomogeneous equation.
    pub operator: IdentityReport,
}

pub const STENCIL_H: f64 = 1e-4;
pub const BOUNDARY_TOL: f64 = 1e-8;
pub const OPERATOR_TOL: f64 = 1e-5;

/// `ψ` and the particular part of `ψ̃` in kernel form, split by side.
struct Chain {
    lambda: Complex64,
    e: Complex64,
    /// `S(u)`, `S(v)`: kernel-form amplitudes of the left and right pieces.
    a: Complex64,
    b: Complex64,
    /// Sign of the inhomogeneity on each side.
    sigma: (f64, f64),
    alpha: Complex64,
    beta: Complex64,
    scale: Complex64,
}

impl Chain {
    fn eval(&self, x: f64) -> (Complex64, Complex64) {
        let (u, v) = (self.e + self.lambda, self.e - self.lambda);
        if x <= 0.0 {
            let t = 1.0 + x;
            let k = kernel(v * (t * t));
            let psi = self.a * t * k.s;
            let part = self.sigma.0 * self.a * t * t * t * k.ds;
            (self.scale * psi, self.scale * (part + self.alpha * psi))
        } else {
            let r = 1.0 - x;
            let k = kernel(u * (r * r));
            let psi = self.b * r * k.s;
            let part = self.sigma.1 * self.b * r * r * r * k.ds;
            (self.scale * psi, self.scale * (part + self.beta * psi))
        }
    }

    /// Composite Simpson on each half; both functions are continuous at 0.
    fn integrate(&self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Complex64 {
        const N: usize = 2000;
        let h = 1.0 / N as f64;
        let mut total = Complex64::new(0.0, 0.0);
        for lo in [-1.0, 0.0] {
            for i in 0..=N {
                let (p, q) = self.eval(lo + i as f64 * h);
                let w = if i == 0 || i == N { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                total += f(p, q) * (w * h / 3.0);
            }
        }
        total
    }
}

/// Builds the partner `ψ̃` of `ψ` at a degenerate point by variation of
/// parameters on each half:
/// `(−d² − λ sgn − E) ψ̃ = ψ` at a branch point and `= −sgn·ψ` at a
/// critical point. The free multiple of `ψ` is fixed by
/// `⟨ψ|ψ̃⟩_R = 0`, or by `⟨ψ|ψ̃⟩_H = 0` where `⟨ψ|ψ⟩_R` itself vanishes.
/// `ψ` is scaled to unit Hermitian norm.
pub fn generalized_eigenfunction(point: &DegeneratePoint, xs: &[f64]) -> Result<GeneralizedEigenfunction> {
    let defect = defect_check(point)?;
    if !defect.pass {
        return Err(Error::FredholmViolated { value: defect.residual });
    }
    let (lambda, e) = point.location();
    check_eigenpair(lambda, e, EIGENPAIR_SLACK)?;
    let sigma = match point {
        DegeneratePoint::Schrodinger { .. } => (1.0, 1.0),
        DegeneratePoint::Richardson { .. } => (1.0, -1.0),
    };
    let (u, v) = (e + lambda, e - lambda);
    let (ku, kv) = (kernel(u), kernel(v));
    let (a, b) = (ku.s, kv.s);

    // C¹ matching at 0 for (α, β); rank one, ψ itself spans the kernel
    let rows = [
        ([a * kv.s, -b * ku.s], sigma.1 * b * ku.ds - sigma.0 * a * kv.ds),
        ([a * kv.c, b * ku.c], -sigma.1 * b * ku.dc - sigma.0 * a * kv.dc),
    ];
    let row_norm = |r: &[Complex64; 2]| (r[0].norm_sqr() + r[1].norm_sqr()).sqrt();
    let (main, other) = if row_norm(&rows[0].0) >= row_norm(&rows[1].0) {
        (rows[0], rows[1])
    } else {
        (rows[1], rows[0])
    };
    let n2 = main.0[0].norm_sqr() + main.0[1].norm_sqr();
    if n2 == 0.0 {
        return Err(Error::DegenerateEigenfunction {
            lambda: lambda.re,
            e: e.re,
        });
    }
    let alpha = main.0[0].conj() * main.1 / n2;
    let beta = main.0[1].conj() * main.1 / n2;
    let inconsistency = (other.0[0] * alpha + other.0[1] * beta - other.1).norm();
    let scale = n2.sqrt() * alpha.norm().max(beta.norm()).max(1.0) + main.1.norm().max(other.1.norm());
    if inconsistency > 1e-6 * scale {
        return Err(Error::FredholmViolated {
            value: inconsistency / scale,
        });
    }

    let ip = inner_products(lambda, e)?;
    let scale = normalization(lambda, e) / ip.hh.sqrt();
    let mut chain = Chain {
        lambda,
        e,
        a,
        b,
        sigma,
        alpha,
        beta,
        scale,
    };
    let pp_r = chain.integrate(|p, _| p * p);
    let pt_r = chain.integrate(|p, q| p * q);
    let shift = if pp_r.norm() > 1e-6 {
        -pt_r / pp_r
    } else {
        let pp_h = chain.integrate(|p, _| Complex64::new(p.norm_sqr(), 0.0));
        let pt_h = chain.integrate(|p, q| p.conj() * q);
        -pt_h / pp_h
    };
    // adding s·ψ shifts both amplitudes by s
    chain.alpha += shift;
    chain.beta += shift;

    let boundary = chain.eval(-1.0).1.norm().max(chain.eval(1.0).1.norm());
    let h = STENCIL_H;
    let mut worst = 0.0f64;
    for &x in xs {
        // the potential jumps at 0: keep the stencil on one side
        if x.abs() < 1.5 * h || x - h < -1.0 || x + h > 1.0 {
            continue;
        }
        let (psi, q) = chain.eval(x);
        let qm = chain.eval(x - h).1;
        let qp = chain.eval(x + h).1;
        let sgn = x.signum();
        let lhs = -(qp - 2.0 * q + qm) / (h * h) - lambda * sgn * q - e * q;
        let rhs = match point {
            DegeneratePoint::Schrodinger { .. } => psi,
            DegeneratePoint::Richardson { .. } => -sgn * psi,
        };
        worst = worst.max((lhs - rhs).norm());
    }
    let samples = xs
        .iter()
        .map(|&x| {
            let (psi, psi_tilde) = chain.eval(x);
            ChainSample { x, psi, psi_tilde }
        })
        .collect();
    let loc = (lambda, e);
    Ok(GeneralizedEigenfunction {
        samples,
        boundary: IdentityReport::new("generalized eigenfunction boundary", loc, boundary, BOUNDARY_TOL),
        operator: IdentityReport::new("generalized eigenfunction operator", loc, worst, OPERATOR_TOL),
    })
}

pub const SIGNATURE_TOL: f64 = 1e-7;

/// Largest `|⟨ψ|sgn|ψ⟩_H| / ⟨ψ|ψ⟩_H` over the stored points of a locus.
pub fn signature_check(locus: &RealLocus) -> Result<IdentityReport> {
    let mut worst = (0.0f64, (c(0.0), c(0.0)));
    for p in &locus.points {
        let loc = (p.lambda, c(p.e));
        let ip = inner_products(loc.0, loc.1)?;
        let r = ip.hvh.abs() / ip.hh;
        if r >= worst.0 {
            worst = (r, loc);
        }
    }
    Ok(IdentityReport::new("signature", worst.1, worst.0, SIGNATURE_TOL))
}

/// Largest `|E(λ) − E(±λ)|`, `|E(λ) − E(±λ*)|` over the stored points of a
/// locus, with `E` at the reflected points obtained by Newton.
pub fn quadrupling_check(locus: &RealLocus) -> Result<IdentityReport> {
    let mut worst = (0.0f64, (c(0.0), c(0.0)));
    for p in &locus.points {
        let e = c(p.e);
        for l in [-p.lambda, p.lambda.conj(), -p.lambda.conj()] {
            let image = crate::rootfind::polish_e(l, e, 30)?;
            let r = (image - e).norm();
            if r >= worst.0 {
                worst = (r, (p.lambda, e));
            }
        }
    }
    Ok(IdentityReport::new("quadrupling", worst.1, worst.0, 1e-8))
}

/// Characteristic function of the reference problem with weight `1`:
/// `−ψ'' − λψ = Eψ` on `[−1, 1]`, Dirichlet.
pub fn reference_char(lambda: f64, e: f64) -> f64 {
    2.0 * kernel(c(4.0 * (e + lambda))).s.re
}

/// Checks the reference problem on each energy of the grid: its first
/// `n_max` couplings, found by sign changes, equal `n²π²/4 − E`, each has
/// slope `−1`, and none is a double root.
pub fn herglotz_reference(e_grid: &[f64], n_max: usize) -> Vec<IdentityReport> {
    let mut out = Vec::with_capacity(3 * e_grid.len());
    for &e in e_grid {
        let f = |l: f64| reference_char(l, e);
        let roots = sign_change_roots(&f, -e - 1.0, (n_max as f64 + 0.5).powi(2) * UNIT - e, 4000);
        let loc = (c(0.0), c(e));
        let mut pos = 0.0f64;
        let mut slope = 0.0f64;
        let mut flat = f64::INFINITY;
        if roots.len() != n_max {
            pos = f64::INFINITY;
        }
        for (n, &l) in (1..).zip(&roots) {
            pos = pos.max((l - (n * n) as f64 * UNIT + e).abs());
            let h = 1e-4;
            let moved = |de: f64| {
                let g = |x: f64| reference_char(x, e + de);
                bisect(&g, l - 0.1, l + 0.1)
            };
            slope = slope.max(((moved(h) - moved(-h)) / (2.0 * h) + 1.0).abs());
            let dl = (f(l + 1e-6) - f(l - 1e-6)) / 2e-6;
            flat = flat.min(dl.abs());
        }
        out.push(IdentityReport::new("reference couplings", loc, pos, 1e-10));
        out.push(IdentityReport::new("reference slope", loc, slope, 1e-6));
        // a simple root keeps |D_λ| away from zero; report its inverse
        out.push(IdentityReport::new("reference simple roots", loc, 1.0 / flat, 1e3));
    }
    out
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn sign_change_roots(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    let h = (hi - lo) / steps as f64;
    let mut out = Vec::new();
    let mut prev = f(lo);
    for i in 1..=steps {
        let x = lo + i as f64 * h;
        let y = f(x);
        if (y > 0.0) != (prev > 0.0) {
            out.push(bisect(f, x - h, x));
        }
        prev = y;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootfind::{double_root, DoubleRootMode, DoubleRootSpec};
    use crate::schrodinger::eigenvalue;
    use std::f64::consts::PI;

    fn table1_point() -> DegeneratePoint {
        let r = double_root(&DoubleRootSpec {
            mode: DoubleRootMode::SchrodingerBranch,
            seed_lambda: Complex64::new(0.0, 4.475),
            seed_e: c(6.4),
        })
        .unwrap();
        DegeneratePoint::Schrodinger { lambda: r.lambda, e: r.e }
    }

    fn table2_point() -> DegeneratePoint {
        let r = double_root(&DoubleRootSpec {
            mode: DoubleRootMode::RichardsonBranch,
            seed_lambda: c(6.15),
            seed_e: c(22.0),
        })
        .unwrap();
        DegeneratePoint::Richardson { lambda: r.lambda, e: r.e }
    }

    fn xs() -> Vec<f64> {
        (0..=200).map(|i| -1.0 + i as f64 / 100.0).collect()
    }

    #[test]
    fn slopes_at_symmetric_points() {
        let d = derivative_check(c(0.0), c(UNIT)).unwrap();
        assert!(d.formula.norm() < 1e-12 && d.implicit.norm() < 1e-12);
        let d = derivative_check(c(PI * PI), c(5.0 * UNIT)).unwrap();
        assert!(d.formula.norm() < 1e-9, "{:?}", d.formula);
    }

    #[test]
    fn slopes_agree_at_generic_point() {
        let e = eigenvalue(1.0, 1).unwrap();
        let d = derivative_check(c(1.0), c(e)).unwrap();
        assert!(d.agreement.pass, "{:?}", d);
        assert!(d.reciprocity.pass, "{:?}", d);
        let d = derivative_check(Complex64::new(2.0, 1.5), settle_e(Complex64::new(2.0, 1.5), c(3.0))).unwrap();
        assert!(d.agreement.pass && d.reciprocity.pass, "{d:?}");
    }

    #[test]
    fn im_identity_off_axis() {
        let l = Complex64::new(3.0, 2.0);
        let e = settle_e(l, c(4.0));
        assert!(im_identity(l, e).unwrap().pass);
    }

    #[test]
    fn defects_vanish_at_degenerate_points() {
        assert!(defect_check(&table1_point()).unwrap().pass);
        assert!(defect_check(&table2_point()).unwrap().pass);
        let e = eigenvalue(1.0, 1).unwrap();
        let generic = DegeneratePoint::Schrodinger { lambda: c(1.0), e: c(e) };
        assert!(defect_check(&generic).unwrap().residual > 0.1);
    }

    #[test]
    fn partner_at_branch_point() {
        let g = generalized_eigenfunction(&table1_point(), &xs()).unwrap();
        assert!(g.boundary.pass, "{:?}", g.boundary);
        assert!(g.operator.pass, "{:?}", g.operator);
        assert_eq!(g.samples.len(), 201);
    }

    #[test]
    fn partner_at_critical_point() {
        let g = generalized_eigenfunction(&table2_point(), &xs()).unwrap();
        assert!(g.boundary.pass && g.operator.pass, "{g:?}");
        // the chosen admixture is bilinear-orthogonal to ψ: trapezoid oracle
        let w = |i: usize| if i == 0 || i == 200 { 0.005 } else { 0.01 };
        let dot: Complex64 = g.samples.iter().enumerate().map(|(i, s)| s.psi * s.psi_tilde * w(i)).sum();
        let norm: f64 = g.samples.iter().enumerate().map(|(i, s)| s.psi.norm_sqr() * w(i)).sum();
        assert!(dot.norm() < 1e-3 * norm, "{dot}");
    }

    #[test]
    fn fredholm_violation_rejected() {
        let e = eigenvalue(1.0, 1).unwrap();
        let p = DegeneratePoint::Schrodinger { lambda: c(1.0), e: c(e) };
        assert!(matches!(generalized_eigenfunction(&p, &xs()), Err(Error::FredholmViolated { .. })));
    }

    #[test]
    fn signature_on_imaginary_axis() {
        let l = Complex64::new(0.0, 2.0);
        let e = settle_e(l, c(3.0));
        assert!(e.im.abs() < 1e-12);
        let ip = inner_products(l, e).unwrap();
        assert!(ip.hvh.abs() / ip.hh < 1e-10);
    }

    #[test]
    fn reference_problem() {
        let reports = herglotz_reference(&[0.0, 7.5, 31.0, 50.0], 5);
        for r in &reports {
            assert!(r.pass, "{r:?}");
        }
    }
}
