//! Schrödinger side: eigencurves `E_n(λ)`, their critical points, the
//! complex-`λ` branch points and the real loci `Im E_n(λ) = 0`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::charfun::{char_at, check_eigenpair, node_count, oscillation_index, CharValue};
use crate::error::{Error, Result};
use crate::lattice::{self, UNIT};
use crate::rootfind::{double_root, nth_eigenvalue_in, real_roots_in_e, DoubleRootMode, DoubleRootSpec};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EigenPair {
    pub lambda: Complex64,
    pub e: Complex64,
    pub sheet: usize,
    /// Interior node count; only for real pairs.
    pub osc: Option<usize>,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn e_upper(lambda: f64, n: usize) -> f64 {
    (n * n) as f64 * UNIT + lambda.abs() + 1.0
}

/// `E_n(λ)` for real `λ`.
pub fn eigenvalue(lambda: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("sheet index starts at 1".into()));
    }
    nth_eigenvalue_in(lambda, n, -lambda.abs() - 1.0, e_upper(lambda, n))
}

/// The lowest `n_max` eigenpairs at a single real `λ`.
pub fn eigenpairs_at(lambda: f64, n_max: usize) -> Result<Vec<EigenPair>> {
    let roots = real_roots_in_e(lambda, -lambda.abs() - 1.0, e_upper(lambda, n_max), n_max)?;
    if roots.len() != n_max {
        return Err(Error::GridTooCoarse { near: lambda });
    }
    roots
        .into_iter()
        .enumerate()
        .map(|(k, e)| {
            let osc = oscillation_index(lambda, e);
            if osc != k {
                return Err(Error::NodeCountMismatch {
                    closed_form: k,
                    sampled: osc,
                });
            }
            match node_count(lambda, e) {
                Ok(nc) if nc != osc => {
                    return Err(Error::NodeCountMismatch {
                        closed_form: nc,
                        sampled: osc,
                    })
                }
                Ok(_) | Err(Error::DegenerateEigenfunction { .. }) => {}
                Err(err) => return Err(err),
            }
            Ok(EigenPair {
                lambda: c(lambda),
                e: c(e),
                sheet: k + 1,
                osc: Some(osc),
            })
        })
        .collect()
}

/// Eigencurves on a sorted grid: for every grid point the lowest `n_max`
/// eigenpairs, grid-major.
pub fn eigencurves(n_max: usize, lambda_grid: &[f64]) -> Result<Vec<EigenPair>> {
    if n_max == 0 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    if lambda_grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::Domain("λ grid must be sorted".into()));
    }
    let rows: Vec<Vec<EigenPair>> = lambda_grid
        .par_iter()
        .map(|&l| eigenpairs_at(l, n_max))
        .collect::<Result<_>>()?;
    Ok(rows.concat())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CriticalKind {
    Max,
    Min,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub lambda: f64,
    pub e: f64,
    pub sheet: usize,
    pub kind: CriticalKind,
    /// Taken from the closed-form lattice rather than solved for.
    pub exact: bool,
}

/// The `n` maxima of sheet `n`, from the lattice formula.
pub fn lattice_maxima(n: usize) -> Vec<CriticalPoint> {
    lattice::sheet_maxima(n as u64)
        .into_iter()
        .map(|s| CriticalPoint {
            lambda: s.lambda(),
            e: s.e(),
            sheet: n,
            kind: CriticalKind::Max,
            exact: true,
        })
        .collect()
}

const SCAN_STEP: f64 = 0.25;

/// Maxima and minima of `E_n` located numerically: a scan at spacing 0.25
/// seeds the `(D, D_λ)` double-root solver. Both lists ascend in `λ`.
pub fn numeric_extrema(n: usize) -> Result<(Vec<CriticalPoint>, Vec<CriticalPoint>)> {
    if n == 0 {
        return Err(Error::Domain("sheet index starts at 1".into()));
    }
    let span = (n * (n - 1)) as f64 * PI * PI / 2.0 + 10.0;
    let count = (span / SCAN_STEP).ceil() as usize + 2;
    let values: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|k| eigenvalue(k as f64 * SCAN_STEP, n))
        .collect::<Result<_>>()?;

    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    // λ = 0 is always critical by symmetry
    let kind0 = if values[0] > values[1] {
        CriticalKind::Max
    } else {
        CriticalKind::Min
    };
    let origin = CriticalPoint {
        lambda: 0.0,
        e: values[0],
        sheet: n,
        kind: kind0,
        exact: false,
    };
    let mut positive = Vec::new();
    for k in 1..count - 1 {
        let (a, b, d) = (values[k - 1], values[k], values[k + 1]);
        let kind = if b > a && b >= d {
            CriticalKind::Max
        } else if b < a && b <= d {
            CriticalKind::Min
        } else {
            continue;
        };
        let curv = a - 2.0 * b + d;
        let shift = if curv != 0.0 { 0.5 * SCAN_STEP * (a - d) / curv } else { 0.0 };
        let seed = k as f64 * SCAN_STEP + shift.clamp(-SCAN_STEP, SCAN_STEP);
        let root = double_root(&DoubleRootSpec {
            mode: DoubleRootMode::RichardsonBranch,
            seed_lambda: c(seed),
            seed_e: c(eigenvalue(seed, n)?),
        })?;
        let (l, e) = (root.lambda.re, root.e.re);
        if (l - seed).abs() > 2.0 * SCAN_STEP || oscillation_index(l, e) + 1 != n {
            return Err(Error::MissingExtremum {
                sheet: n,
                found: maxima.len() + minima.len(),
                expected: 2 * n - 1,
            });
        }
        positive.push(CriticalPoint {
            lambda: l,
            e,
            sheet: n,
            kind,
            exact: false,
        });
    }
    let mut all: Vec<CriticalPoint> = positive
        .iter()
        .map(|p| CriticalPoint {
            lambda: -p.lambda,
            ..*p
        })
        .collect();
    all.push(origin);
    all.extend(positive);
    all.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    for p in all {
        match p.kind {
            CriticalKind::Max => maxima.push(p),
            CriticalKind::Min => minima.push(p),
        }
    }
    Ok((maxima, minima))
}

/// Critical points of sheets `1..=n_max`: lattice maxima and numeric minima,
/// sorted by sheet then `λ`.
pub fn critical_catalog(n_max: usize) -> Result<Vec<CriticalPoint>> {
    if n_max == 0 || n_max > 10 {
        return Err(Error::Domain(format!("n_max must be in 1..=10, got {n_max}")));
    }
    let per_sheet: Vec<Vec<CriticalPoint>> = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let (numeric_max, minima) = numeric_extrema(n)?;
            let maxima = lattice_maxima(n);
            let found = numeric_max.len().min(maxima.len()) + minima.len();
            if numeric_max.len() != n || found != 2 * n - 1 {
                return Err(Error::MissingExtremum {
                    sheet: n,
                    found: numeric_max.len() + minima.len(),
                    expected: 2 * n - 1,
                });
            }
            let mut all = maxima;
            all.extend(minima);
            all.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
            Ok(all)
        })
        .collect::<Result<_>>()?;
    Ok(per_sheet.concat())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BranchPoint {
    pub lambda: Complex64,
    pub e: Complex64,
    /// The two colliding sheets, lower first.
    pub sheets: (usize, usize),
}

/// Roots of `D(λ(t), ·)` followed along a path by Taylor prediction and
/// Newton correction.
struct Followed {
    ts: Vec<f64>,
    roots: Vec<Vec<Complex64>>,
}

fn newton_e_capped(l: Complex64, e0: Complex64, max_iter: usize) -> Option<Complex64> {
    let mut e = e0;
    for _ in 0..max_iter {
        let cv = char_at(l, e);
        if cv.d.norm() <= cv.root_tolerance(l, e) {
            return Some(e);
        }
        let step = cv.d / cv.d_e;
        if !step.is_finite() {
            return None;
        }
        e -= step;
        if step.norm() <= 4.0 * f64::EPSILON * e.norm().max(1.0) {
            let cv = char_at(l, e);
            return (cv.d.norm() <= 1e3 * cv.root_tolerance(l, e)).then_some(e);
        }
    }
    let cv = char_at(l, e);
    (cv.d.norm() <= cv.root_tolerance(l, e)).then_some(e)
}

fn taylor_e(l: Complex64, e: Complex64, dl: Complex64) -> Complex64 {
    let cv = char_at(l, e);
    let e1 = -cv.d_lambda / cv.d_e;
    let e2 = -(cv.d_ll + 2.0 * cv.d_le * e1 + cv.d_ee * e1 * e1) / cv.d_e;
    e + e1 * dl + 0.5 * e2 * dl * dl
}

fn correct_all(l: Complex64, preds: &[Complex64]) -> Option<(Vec<Complex64>, f64)> {
    let mut out = Vec::with_capacity(preds.len());
    let mut quality = 0.0f64;
    for (k, &p) in preds.iter().enumerate() {
        let sep = preds
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .map(|(_, &q)| (q - p).norm())
            .fold(f64::INFINITY, f64::min);
        let e = newton_e_capped(l, p, 8)?;
        let dev = (e - p).norm();
        if !(dev <= 0.25 * sep) {
            return None;
        }
        quality = quality.max(dev / sep.min(p.norm().max(1.0)));
        out.push(e);
    }
    Some((out, quality))
}

fn follow_roots<P: Fn(f64) -> Complex64>(
    path: P,
    t_end: f64,
    start: Vec<Complex64>,
    h_max: f64,
    record: bool,
) -> Result<Followed> {
    let mut t = 0.0;
    let mut roots = start;
    let mut h = h_max;
    let mut out = Followed {
        ts: vec![0.0],
        roots: vec![roots.clone()],
    };
    while t < t_end {
        let step = h.min(t_end - t);
        let (l0, l1) = (path(t), path(t + step));
        let preds: Vec<Complex64> = roots.iter().map(|&e| taylor_e(l0, e, l1 - l0)).collect();
        match correct_all(l1, &preds) {
            Some((next, quality)) => {
                t = if step == t_end - t { t_end } else { t + step };
                roots = next;
                if record {
                    out.ts.push(t);
                    out.roots.push(roots.clone());
                }
                if quality < 0.02 {
                    h = (1.5 * h).min(h_max);
                }
            }
            None => {
                h *= 0.5;
                if h < 1e-11 * t_end.max(1.0) {
                    return Err(Error::LostTrack {
                        at: format!("λ = {}", path(t)),
                    });
                }
            }
        }
    }
    if !record {
        out.ts.push(t);
        out.roots.push(roots);
    }
    Ok(out)
}

fn free_well_levels(k: usize) -> Vec<Complex64> {
    (1..=k).map(|n| c((n * n) as f64 * UNIT)).collect()
}

const RAY_H_MAX: f64 = 0.5;
const RAY_ARC_SPACING: f64 = 0.5;

/// Double-root seeds from local minima of the gaps between continued roots
/// along one ray.
fn ray_seeds(theta: f64, r_max: f64, tracked: usize, pair_limit: usize) -> Result<Vec<(Complex64, Complex64)>> {
    let dir = Complex64::from_polar(1.0, theta);
    let f = follow_roots(|t| dir * t, r_max, free_well_levels(tracked), RAY_H_MAX, true)?;
    let mut seeds = Vec::new();
    for a in 0..pair_limit {
        for b in a + 1..pair_limit {
            let gap: Vec<f64> = f.roots.iter().map(|r| (r[a] - r[b]).norm()).collect();
            for i in 1..gap.len().saturating_sub(1) {
                if gap[i] < gap[i - 1] && gap[i] <= gap[i + 1] {
                    seeds.push((dir * f.ts[i], 0.5 * (f.roots[i][a] + f.roots[i][b])));
                }
            }
        }
    }
    Ok(seeds)
}

/// Sheet labels of a branch point: the two roots that collide when the
/// roots are continued from `λ = 0` along a ray just beside the point.
pub fn label_branch_point(lambda: Complex64, e: Complex64, tracked: usize) -> Result<Option<(usize, usize)>> {
    let r_b = lambda.norm();
    let th = lambda.arg();
    let th = if th > 1e-2 { th - 1e-3 } else { th + 1e-3 };
    let dir = Complex64::from_polar(1.0, th);
    let r_end = 0.999 * r_b;
    let f = follow_roots(|t| dir * t, r_end, free_well_levels(tracked), RAY_H_MAX, false)?;
    let end = f.roots.last().expect("at least the start");
    let cv = char_at(lambda, e);
    let dist = (dir * r_end - lambda).norm();
    let s = (2.0 * cv.d_lambda.norm() * dist / cv.d_ee.norm()).sqrt();
    let mut order: Vec<usize> = (0..end.len()).collect();
    order.sort_by(|&i, &j| (end[i] - e).norm().total_cmp(&(end[j] - e).norm()));
    let d = |k: usize| (end[order[k]] - e).norm();
    if d(1) <= 3.0 * s + 1e-9 && (order.len() < 3 || d(2) > 3.0 * s) {
        let (lo, hi) = (order[0].min(order[1]), order[0].max(order[1]));
        return Ok(Some((lo + 1, hi + 1)));
    }
    Ok(None)
}

fn same_point(a: (Complex64, Complex64), b: (Complex64, Complex64)) -> bool {
    let scale = a.0.norm().max(a.1.norm()).max(1.0);
    (a.0 - b.0).norm() + (a.1 - b.1).norm() <= 1e-7 * scale
}

fn sort_dedup(points: &mut Vec<(Complex64, Complex64)>) {
    points.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    let mut out: Vec<(Complex64, Complex64)> = Vec::with_capacity(points.len());
    for &p in points.iter() {
        if !out.iter().any(|&q| same_point(p, q)) {
            out.push(p);
        }
    }
    *points = out;
}

/// All Schrödinger branch points with `|λ| ≤ radius` joining sheet pairs
/// whose lower sheet is at most `n_max`, closed under `λ → −λ, λ*`.
pub fn branch_catalog(n_max: usize, radius: f64) -> Result<Vec<BranchPoint>> {
    if n_max == 0 || !(radius > 0.0) {
        return Err(Error::Domain(format!(
            "need n_max ≥ 1 and radius > 0, got {n_max}, {radius}"
        )));
    }
    let tracked = n_max + 3;
    let pair_limit = n_max + 2;
    let n_theta = ((FRAC_PI_2 * radius / RAY_ARC_SPACING).ceil() as usize).max(16);
    let r_max = 1.05 * radius + 1.0;
    let seeds: Vec<Vec<(Complex64, Complex64)>> = (0..n_theta)
        .into_par_iter()
        .map(|j| ray_seeds((j as f64 + 0.5) * FRAC_PI_2 / n_theta as f64, r_max, tracked, pair_limit))
        .collect::<Result<_>>()?;
    let seeds = seeds.concat();

    let mut found: Vec<(Complex64, Complex64)> = seeds
        .par_iter()
        .filter_map(|&(l, e)| {
            double_root(&DoubleRootSpec {
                mode: DoubleRootMode::SchrodingerBranch,
                seed_lambda: l,
                seed_e: e,
            })
            .ok()
        })
        .filter(|r| {
            r.is_nondegenerate()
                && r.lambda.norm() <= radius
                && r.lambda.re >= -1e-9
                && r.lambda.im > 1e-9
        })
        .map(|r| (r.lambda, r.e))
        .collect();
    sort_dedup(&mut found);

    let labels: Vec<Option<(usize, usize)>> = found
        .par_iter()
        .map(|&(l, e)| label_branch_point(l, e, tracked + 1))
        .collect::<Result<_>>()?;

    let mut out = Vec::new();
    for (&(l, e), label) in found.iter().zip(labels) {
        let Some(sheets) = label else { continue };
        if sheets.0 > n_max {
            continue;
        }
        let mut quad = vec![(l, e)];
        for (ml, me) in [(-l, e), (l.conj(), e.conj()), (-l.conj(), e.conj())] {
            let r = double_root(&DoubleRootSpec {
                mode: DoubleRootMode::SchrodingerBranch,
                seed_lambda: ml,
                seed_e: me,
            })
            .map_err(|_| Error::SymmetryViolation { re: ml.re, im: ml.im })?;
            if !same_point((r.lambda, r.e), (ml, me)) {
                return Err(Error::SymmetryViolation { re: ml.re, im: ml.im });
            }
            quad.push((r.lambda, r.e));
        }
        sort_dedup(&mut quad);
        out.extend(quad.into_iter().map(|(lambda, e)| BranchPoint { lambda, e, sheets }));
    }
    out.sort_by(|a, b| {
        a.sheets
            .cmp(&b.sheets)
            .then(a.lambda.re.total_cmp(&b.lambda.re))
            .then(a.lambda.im.total_cmp(&b.lambda.im))
    });
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Monodromy {
    pub radius: f64,
    /// The two roots at the start of the circle.
    pub start: [Complex64; 2],
    /// The same roots after one full turn.
    pub end: [Complex64; 2],
    pub swapped: bool,
}

/// Continues the two colliding `E`-roots once around a small circle
/// centred on the branch point.
pub fn monodromy(bp: &BranchPoint) -> Result<Monodromy> {
    let radius = 1e-3 * bp.lambda.norm().max(1.0);
    let cv = char_at(bp.lambda, bp.e);
    let l0 = bp.lambda + radius;
    let de = (-2.0 * cv.d_lambda * radius / cv.d_ee).sqrt();
    let start = [bp.e + de, bp.e - de]
        .map(|e| newton_e_capped(l0, e, 40).ok_or(Error::NonConvergence { what: "monodromy start", iterations: 40 }));
    let start = [start[0].clone()?, start[1].clone()?];
    if (start[0] - start[1]).norm() < 0.1 * de.norm() {
        return Err(Error::LostTrack {
            at: "monodromy start roots coincide".into(),
        });
    }
    let f = follow_roots(
        |t| bp.lambda + Complex64::from_polar(radius, t),
        TAU,
        start.to_vec(),
        TAU / 64.0,
        false,
    )?;
    let last = f.roots.last().expect("at least the start");
    let end = [last[0], last[1]];
    let swapped = (end[0] - start[1]).norm() < 1e-3 * (start[0] - start[1]).norm()
        && (end[1] - start[0]).norm() < 1e-3 * (start[0] - start[1]).norm();
    Ok(Monodromy {
        radius,
        start,
        end,
        swapped,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum LocusKind {
    /// The real axis.
    A,
    /// A segment of the imaginary axis.
    B,
    /// An off-axis curve.
    C,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LocusPoint {
    pub lambda: Complex64,
    pub e: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RealLocus {
    pub kind: LocusKind,
    /// Sheets of the real-axis points visited.
    pub sheets: Vec<usize>,
    pub points: Vec<LocusPoint>,
    pub closed: bool,
    /// Critical points where the curve meets the real axis, start first.
    pub crossings: Vec<LocusPoint>,
    /// Branch points at which the trace ended.
    pub branch_points: Vec<LocusPoint>,
}

/// The critical point at `λ = 0` on sheet `n`, where type-B loci start.
pub fn axis_start(sheet: usize) -> CriticalPoint {
    CriticalPoint {
        lambda: 0.0,
        e: (sheet * sheet) as f64 * UNIT,
        sheet,
        kind: if sheet % 2 == 1 {
            CriticalKind::Max
        } else {
            CriticalKind::Min
        },
        exact: sheet % 2 == 1,
    }
}

const LOCUS_H_MIN: f64 = 1e-4;
const LOCUS_H_MAX: f64 = 0.045;
/// Largest `|Δλ|` between stored locus points.
pub const LOCUS_SPACING: f64 = 0.05;
const LOCUS_MAX_STEPS: usize = 200_000;
const LOCUS_MAX_CROSSINGS: usize = 16;
const LOCUS_LAMBDA_BOUND: f64 = 1e3;

type X3 = [f64; 3];

fn cv_at(x: &X3) -> (Complex64, Complex64, CharValue) {
    let l = Complex64::new(x[0], x[1]);
    let e = c(x[2]);
    (l, e, char_at(l, e))
}

fn jac_rows(cv: &CharValue) -> (X3, X3) {
    let (dl, de) = (cv.d_lambda, cv.d_e);
    ([dl.re, -dl.im, de.re], [dl.im, dl.re, de.im])
}

fn dot(a: &X3, b: &X3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn tangent(cv: &CharValue) -> Option<X3> {
    let (p, q) = jac_rows(cv);
    let t = [
        p[1] * q[2] - p[2] * q[1],
        p[2] * q[0] - p[0] * q[2],
        p[0] * q[1] - p[1] * q[0],
    ];
    let n = dot(&t, &t).sqrt();
    (n > 0.0 && n.is_finite()).then(|| [t[0] / n, t[1] / n, t[2] / n])
}

fn solve3(m: [X3; 3], rhs: X3) -> Option<X3> {
    let mut a = [
        [m[0][0], m[0][1], m[0][2], rhs[0]],
        [m[1][0], m[1][1], m[1][2], rhs[1]],
        [m[2][0], m[2][1], m[2][2], rhs[2]],
    ];
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col] == 0.0 {
            return None;
        }
        a.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut s = a[row][3];
        for k in row + 1..3 {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Newton on `D = 0` restricted to the hyperplane through `pred` normal to `t`.
fn corrector(pred: X3, t: X3) -> Option<(X3, usize)> {
    let mut x = pred;
    for it in 0..12 {
        let (l, e, cv) = cv_at(&x);
        if cv.d.norm() <= cv.root_tolerance(l, e) {
            return Some((x, it));
        }
        let (p, q) = jac_rows(&cv);
        let off = [x[0] - pred[0], x[1] - pred[1], x[2] - pred[2]];
        let dx = solve3([p, q, t], [-cv.d.re, -cv.d.im, -dot(&t, &off)])?;
        for k in 0..3 {
            x[k] += dx[k];
        }
    }
    let (l, e, cv) = cv_at(&x);
    (cv.d.norm() <= cv.root_tolerance(l, e)).then_some((x, 12))
}

/// First point off a real critical point, at `Im λ = ±h`, where the real
/// locus leaves the axis vertically.
fn leave_critical(lc: f64, ec: f64, sign: f64) -> Result<X3> {
    let h = 1e-3;
    let cv = char_at(c(lc), c(ec));
    let e2 = (-cv.d_ll / cv.d_e).re;
    let b = sign * h;
    let (mut a, mut e) = (lc, ec - 0.5 * e2 * h * h);
    for _ in 0..40 {
        let l = Complex64::new(a, b);
        let cv = char_at(l, c(e));
        if cv.d.norm() <= cv.root_tolerance(l, c(e)) {
            return Ok([a, b, e]);
        }
        let (m11, m12, m21, m22) = (cv.d_lambda.re, cv.d_e.re, cv.d_lambda.im, cv.d_e.im);
        let det = m11 * m22 - m12 * m21;
        if det == 0.0 || !det.is_finite() {
            break;
        }
        a -= (m22 * cv.d.re - m12 * cv.d.im) / det;
        e -= (m11 * cv.d.im - m21 * cv.d.re) / det;
    }
    Err(Error::LostTrack {
        at: format!("leaving critical point ({lc}, {ec})"),
    })
}

enum ArmEnd {
    Closed,
    Branch,
    Exhausted,
}

struct Arm {
    points: Vec<LocusPoint>,
    crossings: Vec<LocusPoint>,
    branch: Option<LocusPoint>,
    end: ArmEnd,
}

fn lp(x: &X3) -> LocusPoint {
    LocusPoint {
        lambda: Complex64::new(x[0], x[1]),
        e: x[2],
    }
}

fn try_branch_point(x: &X3, cv: &CharValue) -> Option<LocusPoint> {
    let l = Complex64::new(x[0], x[1]);
    let e = c(x[2]);
    let de = cv.d_e / cv.d_ee;
    let seed_e = e - de;
    let seed_l = l + 0.5 * cv.d_e * de / cv.d_lambda;
    let r = double_root(&DoubleRootSpec {
        mode: DoubleRootMode::SchrodingerBranch,
        seed_lambda: seed_l,
        seed_e,
    })
    .ok()?;
    let close = (r.lambda - l).norm() <= 0.1 + 4.0 * de.norm();
    let real = r.e.im.abs() <= 1e-8 * r.e.norm().max(1.0);
    (close && real).then_some(LocusPoint {
        lambda: r.lambda,
        e: r.e.re,
    })
}

fn try_crossing(x: &X3, t: &X3) -> Option<LocusPoint> {
    if t[1] == 0.0 {
        return None;
    }
    let s = -x[1] / t[1];
    let r = double_root(&DoubleRootSpec {
        mode: DoubleRootMode::RichardsonBranch,
        seed_lambda: c(x[0] + s * t[0]),
        seed_e: c(x[2] + s * t[2]),
    })
    .ok()?;
    let scale = r.lambda.norm().max(r.e.norm()).max(1.0);
    let real = r.lambda.im.abs() <= 1e-9 * scale && r.e.im.abs() <= 1e-9 * scale;
    let near = (r.lambda.re - x[0]).abs() <= 4.0 * s.abs() + 1e-6;
    (real && near).then_some(LocusPoint {
        lambda: c(r.lambda.re),
        e: r.e.re,
    })
}

fn is_same(a: &LocusPoint, b: &LocusPoint) -> bool {
    (a.lambda - b.lambda).norm() + (a.e - b.e).abs() <= 1e-6
}

fn trace_arm(origin: LocusPoint, sign: f64, through_axis: bool) -> Result<Arm> {
    let mut arm = Arm {
        points: Vec::new(),
        crossings: Vec::new(),
        branch: None,
        end: ArmEnd::Exhausted,
    };
    let mut x = leave_critical(origin.lambda.re, origin.e, sign)?;
    arm.points.push(lp(&x));
    let mut t_prev = [0.0, sign, 0.0];
    let mut h: f64 = 0.01;
    for _ in 0..LOCUS_MAX_STEPS {
        let (_, _, cv) = cv_at(&x);
        let Some(mut t) = tangent(&cv) else {
            return Err(Error::LostTrack {
                at: format!("singular tangent at λ = {} + {}i", x[0], x[1]),
            });
        };
        if dot(&t, &t_prev) < 0.0 {
            t = t.map(|v| -v);
        }

        if 2.0 * (cv.d_e / cv.d_ee).norm() < (4.0 * h).max(0.02) {
            if let Some(bp) = try_branch_point(&x, &cv) {
                arm.points.push(bp);
                arm.branch = Some(bp);
                arm.end = ArmEnd::Branch;
                return Ok(arm);
            }
        }

        let pred = [x[0] + h * t[0], x[1] + h * t[1], x[2] + h * t[2]];
        if through_axis && pred[1] * x[1] <= 0.0 {
            if let Some(cp) = try_crossing(&x, &t) {
                arm.points.push(cp);
                if is_same(&cp, &origin) {
                    arm.end = ArmEnd::Closed;
                    return Ok(arm);
                }
                arm.crossings.push(cp);
                if arm.crossings.len() >= LOCUS_MAX_CROSSINGS {
                    return Ok(arm);
                }
                let down = -x[1].signum();
                x = leave_critical(cp.lambda.re, cp.e, down)?;
                arm.points.push(lp(&x));
                t_prev = [0.0, down, 0.0];
                continue;
            }
            h *= 0.5;
            if h < LOCUS_H_MIN {
                return Err(Error::LostTrack {
                    at: format!("real-axis crossing near λ = {}", x[0]),
                });
            }
            continue;
        }

        match corrector(pred, t) {
            Some((xn, iters)) => {
                let (_, _, cvn) = cv_at(&xn);
                let turn = tangent(&cvn).map_or(0.0, |tn| dot(&tn, &t).abs());
                let moved = ((xn[0] - pred[0]).powi(2) + (xn[1] - pred[1]).powi(2) + (xn[2] - pred[2]).powi(2)).sqrt();
                let dl = (xn[0] - x[0]).hypot(xn[1] - x[1]);
                if turn < 0.95 || moved > 0.3 * h || dl > LOCUS_SPACING {
                    h *= 0.5;
                } else {
                    x = xn;
                    t_prev = t;
                    arm.points.push(lp(&x));
                    if iters <= 3 {
                        h = (1.5 * h).min(LOCUS_H_MAX);
                    }
                    if x[0].hypot(x[1]) > LOCUS_LAMBDA_BOUND {
                        return Ok(arm);
                    }
                    continue;
                }
            }
            None => h *= 0.5,
        }
        if h < LOCUS_H_MIN {
            return Err(Error::LostTrack {
                at: format!("λ = {} + {}i, E = {}", x[0], x[1], x[2]),
            });
        }
    }
    Ok(arm)
}

/// Traces the real locus leaving the real critical point `start`
/// perpendicularly to the real axis. At `λ = 0` this is the type-B segment
/// of the imaginary axis, traced both ways to its branch points; elsewhere
/// a type-C curve, followed through its real-axis crossings until it
/// returns to `start`.
pub fn trace_real_locus(start: &CriticalPoint) -> Result<RealLocus> {
    let cv = check_eigenpair(c(start.lambda), c(start.e), 1e3)?;
    let scale = cv.d_e.norm() * start.e.abs().max(1.0);
    if cv.d_lambda.norm() > 1e-6 * scale.max(1.0) {
        return Err(Error::Domain(format!(
            "({}, {}) is not a critical point",
            start.lambda, start.e
        )));
    }
    let origin = LocusPoint {
        lambda: c(start.lambda),
        e: start.e,
    };
    let sheet_of = |p: &LocusPoint| oscillation_index(p.lambda.re, p.e) + 1;
    if start.lambda == 0.0 {
        let up = trace_arm(origin, 1.0, false)?;
        let down = trace_arm(origin, -1.0, false)?;
        let mut points: Vec<LocusPoint> = down.points.into_iter().rev().collect();
        points.push(origin);
        points.extend(up.points);
        let branch_points: Vec<LocusPoint> = down.branch.into_iter().chain(up.branch).collect();
        return Ok(RealLocus {
            kind: LocusKind::B,
            sheets: vec![start.sheet],
            points,
            closed: false,
            crossings: vec![origin],
            branch_points,
        });
    }
    let arm = trace_arm(origin, 1.0, true)?;
    let mut points = vec![origin];
    points.extend(arm.points);
    let mut crossings = vec![origin];
    crossings.extend(arm.crossings);
    let mut sheets: Vec<usize> = crossings.iter().map(sheet_of).collect();
    sheets.sort_unstable();
    sheets.dedup();
    Ok(RealLocus {
        kind: LocusKind::C,
        sheets,
        points,
        closed: matches!(arm.end, ArmEnd::Closed),
        crossings,
        branch_points: arm.branch.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charfun::char_d;

    #[test]
    fn free_well_levels_and_lattice_maximum() {
        assert!((eigenvalue(0.0, 1).unwrap() - UNIT).abs() < 1e-12);
        let e2 = eigenvalue(PI * PI, 2).unwrap();
        assert!((e2 - 5.0 * UNIT).abs() < 1e-10);
        for dl in [-0.3, 0.3] {
            assert!(eigenvalue(PI * PI + dl, 2).unwrap() < e2);
        }
    }

    #[test]
    fn eigencurves_are_even_and_labelled() {
        let grid: Vec<f64> = (-40..=40).map(|k| k as f64 * 0.75).collect();
        let pairs = eigencurves(4, &grid).unwrap();
        assert_eq!(pairs.len(), grid.len() * 4);
        let m = grid.len();
        for g in 0..m {
            for n in 0..4 {
                let p = pairs[g * 4 + n];
                let q = pairs[(m - 1 - g) * 4 + n];
                assert_eq!(p.osc, Some(n));
                assert_eq!(p.sheet, n + 1);
                assert!((p.e - q.e).norm() <= 1e-10 * p.e.norm().max(1.0));
            }
        }
        assert!(eigencurves(0, &grid).is_err());
        assert!(eigencurves(2, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn critical_points_low_sheets() {
        let cat = critical_catalog(4).unwrap();
        let sheet1: Vec<_> = cat.iter().filter(|p| p.sheet == 1).collect();
        assert_eq!(sheet1.len(), 1);
        assert_eq!((sheet1[0].lambda, sheet1[0].kind), (0.0, CriticalKind::Max));
        let mins3: Vec<_> = cat
            .iter()
            .filter(|p| p.sheet == 3 && p.kind == CriticalKind::Min)
            .collect();
        assert_eq!(mins3.len(), 2);
        assert!((mins3[1].lambda - 6.151546).abs() < 1e-6);
        assert!((mins3[1].e - 21.996039).abs() < 1e-6);
        assert!((mins3[0].lambda + 6.151546).abs() < 1e-6);
        let outer = cat
            .iter()
            .filter(|p| p.sheet == 4 && p.kind == CriticalKind::Max)
            .next_back()
            .unwrap();
        assert!((outer.lambda - 6.0 * PI * PI).abs() < 1e-12);
        assert!((outer.e - 25.0 * UNIT).abs() < 1e-12);
        for n in 1..=4 {
            assert_eq!(cat.iter().filter(|p| p.sheet == n).count(), 2 * n - 1);
        }
    }

    #[test]
    fn numeric_maxima_sit_on_the_lattice() {
        for n in 1..=4 {
            let (maxima, _) = numeric_extrema(n).unwrap();
            let exact = lattice_maxima(n);
            assert_eq!(maxima.len(), n);
            for (m, x) in maxima.iter().zip(&exact) {
                assert!((m.lambda - x.lambda).abs() < 1e-10, "{m:?} vs {x:?}");
                assert!((m.e - x.e).abs() < 1e-10, "{m:?} vs {x:?}");
            }
        }
    }

    #[test]
    fn first_branch_points() {
        let cat = branch_catalog(2, 12.0).unwrap();
        let pair12: Vec<_> = cat.iter().filter(|b| b.sheets == (1, 2)).collect();
        assert_eq!(pair12.len(), 2, "{cat:?}");
        assert!((pair12[1].lambda - Complex64::new(0.0, 4.475309)).norm() < 1e-5);
        assert!((pair12[1].e - c(6.401903)).norm() < 1e-5);
        let pair23: Vec<_> = cat.iter().filter(|b| b.sheets == (2, 3)).collect();
        assert_eq!(pair23.len(), 4, "{cat:?}");
        let q1 = pair23
            .iter()
            .find(|b| b.lambda.re > 0.0 && b.lambda.im > 0.0)
            .unwrap();
        assert!((q1.lambda - Complex64::new(9.264139, 6.834853)).norm() < 1e-5);
        assert!((q1.e - Complex64::new(17.617719, 0.960866)).norm() < 1e-5);
        for b in &cat {
            let cv = char_at(b.lambda, b.e);
            assert!(cv.d.norm() <= cv.root_tolerance(b.lambda, b.e));
        }
    }

    #[test]
    fn monodromy_swaps_roots() {
        let bp = BranchPoint {
            lambda: Complex64::new(0.0, 4.475309),
            e: c(6.401903),
            sheets: (1, 2),
        };
        let r = double_root(&DoubleRootSpec {
            mode: DoubleRootMode::SchrodingerBranch,
            seed_lambda: bp.lambda,
            seed_e: bp.e,
        })
        .unwrap();
        let bp = BranchPoint {
            lambda: r.lambda,
            e: r.e,
            ..bp
        };
        let m = monodromy(&bp).unwrap();
        assert!(m.swapped, "{m:?}");
    }

    #[test]
    fn imaginary_axis_locus_of_ground_state() {
        let locus = trace_real_locus(&axis_start(1)).unwrap();
        assert_eq!(locus.kind, LocusKind::B);
        assert_eq!(locus.branch_points.len(), 2);
        let mut ends: Vec<f64> = locus.branch_points.iter().map(|p| p.lambda.im).collect();
        ends.sort_by(f64::total_cmp);
        assert!((ends[0] + 4.475309).abs() < 1e-5 && (ends[1] - 4.475309).abs() < 1e-5);
        for p in &locus.points {
            assert!(p.lambda.re.abs() < 1e-9);
            assert!(char_d(p.lambda, c(p.e)).norm() < 1e-8);
        }
    }

    #[test]
    fn closed_loop_through_sheets_two_and_three() {
        let start = lattice_maxima(2)[1];
        let locus = trace_real_locus(&start).unwrap();
        assert!(locus.closed, "{:?}", locus.crossings);
        assert_eq!(locus.sheets, vec![2, 3]);
        let cross = locus.crossings[1];
        assert!((cross.lambda.re - 6.151546).abs() < 1e-6);
        assert!((cross.e - 21.996039).abs() < 1e-6);
        let last = locus.points.last().unwrap();
        assert!((last.lambda - c(start.lambda)).norm() <= 1e-6);
        for w in locus.points.windows(2) {
            assert!((w[1].lambda - w[0].lambda).norm() <= LOCUS_SPACING);
        }
    }
}
