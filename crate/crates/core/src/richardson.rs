//! Richardson side: eigencouplings `λ_n^±(E)` at real energy, their
//! spectral-type segments, the Zettl bound and the oscillation census.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::charfun::{char_at, count_below, node_count, oscillation_index};
use crate::error::{Error, Result};
use crate::lattice::{self, UNIT};
use crate::rootfind::{complex_roots_in_rectangle, double_root, DoubleRootMode, DoubleRootSpec, Rectangle};
use crate::schrodinger::{CriticalKind, CriticalPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

/// `λ_n^+` or `λ_n^-`: the coupling that is the `n`-th positive (negative)
/// one below the first free-well level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SheetLabel {
    pub n: usize,
    pub sign: Sign,
}

impl SheetLabel {
    pub fn new(n: usize, sign: Sign) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("sheet index starts at 1".into()));
        }
        Ok(Self { n, sign })
    }

    fn orient(&self) -> f64 {
        match self.sign {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl fmt::Display for SheetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.sign {
            Sign::Plus => '+',
            Sign::Minus => '-',
        };
        write!(f, "{}{}", self.n, s)
    }
}

impl FromStr for SheetLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (digits, sign) = match s.chars().last() {
            Some('+') => (&s[..s.len() - 1], Sign::Plus),
            Some('-') => (&s[..s.len() - 1], Sign::Minus),
            _ => return Err(Error::Domain(format!("sheet label must look like 1+ or 2-, got {s:?}"))),
        };
        let n = digits
            .parse()
            .map_err(|_| Error::Domain(format!("bad sheet index in {s:?}")))?;
        Self::new(n, sign)
    }
}

impl Serialize for SheetLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SpectralType {
    R,
    #[serde(rename = "iR")]
    IR,
    C,
}

impl fmt::Display for SpectralType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpectralType::R => "R",
            SpectralType::IR => "iR",
            SpectralType::C => "C",
        })
    }
}

/// Real / imaginary / complex with tolerance `1e−7·max(1, |λ|)`.
pub fn classify(lambda: Complex64) -> SpectralType {
    let tol = 1e-7 * lambda.norm().max(1.0);
    if lambda.im.abs() <= tol {
        SpectralType::R
    } else if lambda.re.abs() <= tol {
        SpectralType::IR
    } else {
        SpectralType::C
    }
}

/// `2m`, with `m` the number of negative eigencouplings of the
/// definite-weight problem, `λ_n = n²π²/4 − E`.
pub fn zettl_bound(e: f64) -> usize {
    2 * (1..).take_while(|&n: &usize| ((n * n) as f64) * UNIT < e).count()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Coupling {
    pub lambda: Complex64,
    pub kind: SpectralType,
    /// 2 for a pair merged at a branch point.
    pub multiplicity: usize,
    pub label: Option<SheetLabel>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CouplingSet {
    pub e: f64,
    pub couplings: Vec<Coupling>,
    pub zettl_bound: usize,
}

impl CouplingSet {
    pub fn non_real_count(&self) -> usize {
        self.couplings
            .iter()
            .filter(|c| c.kind != SpectralType::R)
            .map(|c| c.multiplicity)
            .sum()
    }
}

fn search_rect(radius: f64) -> Result<Rectangle> {
    // irrational-looking offsets keep the axes' roots off the contour
    Rectangle::new(
        -radius * 1.000_123_7,
        radius * 1.000_311_9,
        -radius * 1.000_271_3,
        radius * 1.000_057_1,
    )
}

/// Roots of `D(·, E)` with `|λ| ≤ radius`, pairs closer than the
/// double-root splitting scale merged, sorted by `(Re, Im)`.
pub fn coupling_roots(e: f64, radius: f64) -> Result<Vec<Coupling>> {
    if !(radius > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {radius}")));
    }
    let roots = complex_roots_in_rectangle(Complex64::new(e, 0.0), &search_rect(radius)?)?;
    let mut merged: Vec<(Complex64, usize)> = Vec::with_capacity(roots.len());
    for r in roots {
        let near = merged
            .iter_mut()
            .find(|(l, _)| (*l - r.lambda).norm() <= 1e-6 * r.lambda.norm().max(1.0));
        match near {
            Some((l, m)) => {
                *l = (*l * *m as f64 + r.lambda * r.multiplicity as f64) / (*m + r.multiplicity) as f64;
                *m += r.multiplicity;
            }
            None => merged.push((r.lambda, r.multiplicity)),
        }
    }
    Ok(merged
        .into_iter()
        .filter(|(l, _)| l.norm() <= radius)
        .map(|(mut lambda, multiplicity)| {
            let kind = classify(lambda);
            match kind {
                SpectralType::R => lambda.im = 0.0,
                SpectralType::IR => lambda.re = 0.0,
                SpectralType::C => {}
            }
            Coupling {
                lambda,
                kind,
                multiplicity,
                label: None,
            }
        })
        .collect())
}

/// All eigencouplings at real `E` with `|λ| ≤ radius`, labelled by
/// continuation from the all-real region below `π²/4`.
pub fn eigencouplings(e: f64, radius: f64) -> Result<CouplingSet> {
    let mut couplings = coupling_roots(e, radius)?;
    let e0 = start_energy(e);
    let n_labels = count_below(radius, e0);
    let labels: Vec<SheetLabel> = (1..=n_labels)
        .flat_map(|n| [SheetLabel { n, sign: Sign::Plus }, SheetLabel { n, sign: Sign::Minus }])
        .collect();
    let ends: Vec<Option<Complex64>> = labels
        .par_iter()
        .map(|l| sweep(*l, e0, e, false).ok().map(|s| s.end))
        .collect();
    for (label, end) in labels.into_iter().zip(ends) {
        let Some(end) = end else { continue };
        if let Some(c) = couplings
            .iter_mut()
            .filter(|c| c.label.is_none())
            .min_by(|a, b| (a.lambda - end).norm().total_cmp(&(b.lambda - end).norm()))
        {
            if (c.lambda - end).norm() <= 1e-5 * end.norm().max(1.0) {
                c.label = Some(label);
            }
        }
    }
    Ok(CouplingSet {
        e,
        couplings,
        zettl_bound: zettl_bound(e),
    })
}

fn start_energy(e: f64) -> f64 {
    e.min(0.0)
}

/// `λ_n^±(E)` for `E < π²/4`, where all couplings are real: the `n`-th
/// crossing of the Sturm count.
pub fn initial_coupling(label: SheetLabel, e: f64) -> Result<f64> {
    if !(e < UNIT) {
        return Err(Error::Domain(format!(
            "couplings are labelled below π²/4, got E = {e}"
        )));
    }
    let n = label.n;
    let mut hi = 1.0f64;
    while count_below(hi, e) < n {
        hi *= 2.0;
        if hi > 1e9 {
            return Err(Error::NonConvergence {
                what: "coupling bracket",
                iterations: 30,
            });
        }
    }
    let mut lo = 0.0f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(mid, e) >= n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let ec = Complex64::new(e, 0.0);
    let mut l = 0.5 * (lo + hi);
    // a couple of real Newton steps from the bisection midpoint
    for _ in 0..3 {
        let cv = char_at(Complex64::new(l, 0.0), ec);
        let step = cv.d.re / cv.d_lambda.re;
        if !step.is_finite() || (l - step - l).abs() > (hi - lo) {
            break;
        }
        l -= step;
    }
    Ok(label.orient() * l)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrackPoint {
    pub e: f64,
    pub lambda: Complex64,
}

/// A Richardson branch point passed during a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Crossing {
    pub e: f64,
    pub lambda: Complex64,
}

pub struct Sweep {
    pub points: Vec<TrackPoint>,
    pub crossings: Vec<Crossing>,
    pub end: Complex64,
}

const SWEEP_H_MAX: f64 = 0.05;
const SWEEP_H_MIN: f64 = 1e-12;

fn jump_gap(e: f64) -> f64 {
    1e-7 * e.abs().max(1.0)
}

fn newton_lambda(e: Complex64, l0: Complex64, max_iter: usize) -> Option<Complex64> {
    let mut l = l0;
    for _ in 0..max_iter {
        let cv = char_at(l, e);
        if cv.d.norm() <= cv.root_tolerance(l, e) {
            return Some(l);
        }
        let step = cv.d / cv.d_lambda;
        if !step.is_finite() {
            return None;
        }
        l -= step;
        if step.norm() <= 4.0 * f64::EPSILON * l.norm().max(1.0) {
            let cv = char_at(l, e);
            return (cv.d.norm() <= 1e3 * cv.root_tolerance(l, e)).then_some(l);
        }
    }
    let cv = char_at(l, e);
    (cv.d.norm() <= cv.root_tolerance(l, e)).then_some(l)
}

/// Branch point ahead of `(E, λ)` from the local quadratic model, refined.
fn branch_point_ahead(e: f64, l: Complex64, h: f64) -> Option<Crossing> {
    let ec = Complex64::new(e, 0.0);
    let cv = char_at(l, ec);
    let est = ec + cv.d_lambda * cv.d_lambda / (2.0 * cv.d_ll * cv.d_e);
    let ahead = est.re - e;
    if !(ahead > -h && ahead < 4.0 * h) || est.im.abs() > 0.5 * ahead.abs() + h {
        return None;
    }
    let r = double_root(&DoubleRootSpec {
        mode: DoubleRootMode::RichardsonBranch,
        seed_lambda: l - cv.d_lambda / cv.d_ll,
        seed_e: Complex64::new(est.re, 0.0),
    })
    .ok()?;
    let scale = r.e.norm().max(1.0);
    let rho = 2.0 * (cv.d_lambda / cv.d_ll).norm();
    (r.e.im.abs() <= 1e-9 * scale && r.e.re > e && (r.lambda - l).norm() <= 2.0 * rho + 1e-6).then_some(Crossing {
        e: r.e.re,
        lambda: r.lambda,
    })
}

/// Continues the labelled coupling in real `E` from `e0 < π²/4` up to
/// `e_end`, passing each branch point on the `E + i0` side.
pub fn sweep(label: SheetLabel, e0: f64, e_end: f64, record: bool) -> Result<Sweep> {
    let mut e = e0;
    let mut l = Complex64::new(initial_coupling(label, e0)?, 0.0);
    let mut out = Sweep {
        points: vec![TrackPoint { e, lambda: l }],
        crossings: Vec::new(),
        end: l,
    };
    let mut h = SWEEP_H_MAX.min((e_end - e0).max(0.0));
    let mut pending: Option<Crossing> = None;
    while e < e_end {
        if pending.is_none() {
            pending = branch_point_ahead(e, l, h).filter(|c| c.e <= e_end);
        }
        if let Some(bp) = pending {
            let gap = bp.e - e;
            if gap <= jump_gap(bp.e) {
                let before = Complex64::new(e - bp.e, 0.0).sqrt();
                let w = (l - bp.lambda) / before;
                let e_new = (bp.e + jump_gap(bp.e)).min(e_end);
                let after = Complex64::new(e_new - bp.e, 0.0).sqrt();
                let pred = bp.lambda + w * after;
                let sep = 2.0 * (w * after).norm();
                let next = newton_lambda(Complex64::new(e_new, 0.0), pred, 20)
                    .filter(|n| (n - pred).norm() <= 0.25 * sep.max(1e-14));
                let Some(next) = next else {
                    return Err(Error::LostTrack {
                        at: format!("{label} across the branch point at E = {}", bp.e),
                    });
                };
                out.crossings.push(bp);
                e = e_new;
                l = next;
                if record {
                    out.points.push(TrackPoint { e, lambda: l });
                }
                pending = None;
                continue;
            }
        }

        let mut step = h.min(e_end - e);
        if let Some(bp) = pending {
            let gap = bp.e - e;
            step = step.min(if gap > 2.0 * jump_gap(bp.e) {
                0.5 * gap
            } else {
                gap - 0.5 * jump_gap(bp.e)
            });
        }
        let ec = Complex64::new(e, 0.0);
        let cv = char_at(l, ec);
        let l1 = -cv.d_e / cv.d_lambda;
        let l2 = -(cv.d_ee + 2.0 * cv.d_le * l1 + cv.d_ll * l1 * l1) / cv.d_lambda;
        let pred = l + l1 * step + 0.5 * l2 * step * step;
        let rho = 2.0 * (cv.d_lambda / cv.d_ll).norm();
        let e_new = if step == e_end - e { e_end } else { e + step };
        let accepted = newton_lambda(Complex64::new(e_new, 0.0), pred, 8).filter(|n| {
            let dev = (n - pred).norm();
            let moved = (pred - l).norm();
            dev <= 0.25 * rho
                && dev <= 0.1 * moved + 1e-9 * n.norm().max(1.0)
                && (classify(*n) == classify(l) || pending.is_some())
        });
        match accepted {
            Some(n) => {
                e = e_new;
                l = n;
                if record {
                    out.points.push(TrackPoint { e, lambda: l });
                }
                h = (1.5 * h).min(SWEEP_H_MAX);
            }
            None => {
                h *= 0.5;
                if h < SWEEP_H_MIN {
                    return Err(Error::LostTrack {
                        at: format!("{label} at E = {e}, λ = {l}"),
                    });
                }
                if pending.is_none() {
                    pending = branch_point_ahead(e, l, h).filter(|c| c.e <= e_end);
                }
            }
        }
    }
    out.end = l;
    if !record {
        out.points.push(TrackPoint { e, lambda: l });
    }
    Ok(out)
}

/// The labelled coupling at one energy.
pub fn coupling_at(label: SheetLabel, e: f64) -> Result<Complex64> {
    Ok(sweep(label, start_energy(e), e, false)?.end)
}

/// End of a segment: a branch point, with the Schrödinger critical point
/// it is the image of when it lies on the real axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SegmentBoundary {
    pub e: f64,
    pub lambda: Complex64,
    pub critical: Option<CriticalPoint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralSegment {
    pub sheet: SheetLabel,
    pub e_lo: f64,
    pub e_hi: f64,
    pub kind: SpectralType,
    /// Oscillation count, for real segments.
    pub osc: Option<usize>,
    /// The branch point closing the segment; `None` when it runs to `e_hi`.
    pub end: Option<SegmentBoundary>,
}

fn as_critical(c: &Crossing) -> Option<CriticalPoint> {
    if c.lambda.im.abs() > 1e-9 * c.lambda.norm().max(1.0) {
        return None;
    }
    let (l, e) = (c.lambda.re, c.e);
    let cv = char_at(Complex64::new(l, 0.0), Complex64::new(e, 0.0));
    let kind = if (-cv.d_ll / cv.d_e).re < 0.0 {
        CriticalKind::Max
    } else {
        CriticalKind::Min
    };
    let sheet = oscillation_index(l, e) + 1;
    let exact = kind == CriticalKind::Max
        && lattice::sheet_maxima(sheet as u64)
            .iter()
            .any(|s| (s.lambda() - l).abs() <= 1e-8 && (s.e() - e).abs() <= 1e-8);
    Some(CriticalPoint {
        lambda: if exact { (l / UNIT).round() * UNIT } else { l },
        e,
        sheet,
        kind,
        exact,
    })
}

/// Spectral-type segments of one labelled coupling on `[e_lo, e_hi]`.
pub fn classify_segments(label: SheetLabel, e_lo: f64, e_hi: f64) -> Result<Vec<SpectralSegment>> {
    if !(e_lo < e_hi) {
        return Err(Error::Domain(format!("empty energy range [{e_lo}, {e_hi}]")));
    }
    let s = sweep(label, start_energy(e_lo), e_hi, true)?;
    let cuts: Vec<&Crossing> = s
        .crossings
        .iter()
        .filter(|c| c.e > e_lo && c.e < e_hi)
        .collect();
    let mut bounds = vec![e_lo];
    bounds.extend(cuts.iter().map(|c| c.e));
    bounds.push(e_hi);

    let mut segments: Vec<SpectralSegment> = Vec::new();
    for (k, w) in bounds.windows(2).enumerate() {
        let mid = 0.5 * (w[0] + w[1]);
        let p = s
            .points
            .iter()
            .filter(|p| p.e > w[0] && p.e < w[1])
            .min_by(|a, b| (a.e - mid).abs().total_cmp(&(b.e - mid).abs()))
            .copied()
            .map_or_else(|| coupling_at(label, mid).map(|l| TrackPoint { e: mid, lambda: l }), Ok)?;
        let kind = classify(p.lambda);
        let osc = (kind == SpectralType::R).then(|| {
            node_count(p.lambda.re, p.e).unwrap_or_else(|_| oscillation_index(p.lambda.re, p.e))
        });
        let end = cuts.get(k).map(|c| SegmentBoundary {
            e: c.e,
            lambda: c.lambda,
            critical: as_critical(c),
        });
        match segments.last_mut() {
            Some(last) if last.kind == kind && last.osc == osc => {
                last.e_hi = w[1];
                last.end = end;
            }
            _ => segments.push(SpectralSegment {
                sheet: label,
                e_lo: w[0],
                e_hi: w[1],
                kind,
                osc,
                end,
            }),
        }
    }
    Ok(segments)
}

/// Default search radius for the census.
pub const CENSUS_RADIUS: f64 = 400.0;

/// Smallest radius, at least [`CENSUS_RADIUS`], that passes the census
/// coverage check for `m_max` at `E`.
pub fn census_radius(e: f64, m_max: usize) -> f64 {
    let last_max = lattice::sheet_maxima(m_max as u64 + 1)
        .last()
        .map_or(0.0, |s| s.lambda());
    let mut r = CENSUS_RADIUS.max(1.25 * last_max);
    while count_below(r, e) < m_max + 1 {
        r *= 1.25;
    }
    r
}

/// `N_m` for `m = 0..=m_max`: the number of real couplings at `E` whose
/// eigenfunction has `m` interior nodes. A pair merged at a branch point
/// counts once.
pub fn oscillation_census(e: f64, m_max: usize, radius: f64) -> Result<Vec<usize>> {
    let sheets = m_max as u64 + 1;
    let last_max = lattice::sheet_maxima(sheets)
        .last()
        .map_or(0.0, |s| s.lambda());
    if !(radius > last_max) || count_below(radius, e) < m_max + 1 || count_below(-radius, e) < m_max + 1 {
        return Err(Error::Domain(format!(
            "radius {radius} does not cover every coupling with up to {m_max} nodes at E = {e}"
        )));
    }
    let mut census = vec![0usize; m_max + 1];
    for c in coupling_roots(e, radius)? {
        if c.kind != SpectralType::R {
            continue;
        }
        let m = oscillation_index(c.lambda.re, e);
        if m <= m_max {
            census[m] += 1;
        }
    }
    Ok(census)
}

/// Couplings of the reference problem with weight `|sgn x| = 1`:
/// `λ_n = n²π²/4 − E`.
pub fn reference_couplings(e: f64, n_max: usize) -> Vec<f64> {
    (1..=n_max).map(|n| (n * n) as f64 * UNIT - e).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn lambda0() -> f64 {
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
        let s = 0.5 * (a + b);
        s * s
    }

    #[test]
    fn labels_round_trip() {
        let l: SheetLabel = "3-".parse().unwrap();
        assert_eq!(l, SheetLabel { n: 3, sign: Sign::Minus });
        assert_eq!(l.to_string(), "3-");
        assert!("0+".parse::<SheetLabel>().is_err());
        assert!("3".parse::<SheetLabel>().is_err());
    }

    #[test]
    fn zettl_values() {
        assert_eq!(zettl_bound(2.0), 0);
        assert_eq!(zettl_bound(5.0), 2);
        assert_eq!(zettl_bound(10.0), 4);
    }

    #[test]
    fn initial_coupling_matches_oracle() {
        let l = initial_coupling(SheetLabel { n: 1, sign: Sign::Plus }, 0.0).unwrap();
        assert!((l - lambda0()).abs() < 1e-9);
        let l = initial_coupling(SheetLabel { n: 1, sign: Sign::Minus }, 0.0).unwrap();
        assert!((l + lambda0()).abs() < 1e-9);
        assert!(initial_coupling(SheetLabel { n: 1, sign: Sign::Plus }, 3.0).is_err());
    }

    #[test]
    fn couplings_at_zero_energy() {
        let set = eigencouplings(0.0, 30.0).unwrap();
        assert!(set.couplings.iter().all(|c| c.kind == SpectralType::R));
        let one_plus = set
            .couplings
            .iter()
            .find(|c| c.label == Some(SheetLabel { n: 1, sign: Sign::Plus }))
            .unwrap();
        assert!((one_plus.lambda.re - lambda0()).abs() < 1e-9);
        assert_eq!(set.zettl_bound, 0);
    }

    #[test]
    fn imaginary_pair_at_five() {
        let set = eigencouplings(5.0, 40.0).unwrap();
        let non_real: Vec<_> = set.couplings.iter().filter(|c| c.kind != SpectralType::R).collect();
        assert_eq!(non_real.len(), 2);
        assert!(non_real.iter().all(|c| c.kind == SpectralType::IR));
        assert_eq!(set.non_real_count(), set.zettl_bound);
        assert!(non_real.iter().all(|c| c.label.is_some_and(|l| l.n == 1)));
    }

    #[test]
    fn ground_sheet_segments() {
        let plus = classify_segments(SheetLabel { n: 1, sign: Sign::Plus }, 0.0, 25.0).unwrap();
        let kinds: Vec<SpectralType> = plus.iter().map(|s| s.kind).collect();
        use SpectralType::*;
        assert_eq!(kinds, [R, IR, R, C, R]);
        let expect = [UNIT, PI * PI, 5.0 * UNIT, 21.996039];
        for (s, e) in plus.iter().zip(expect) {
            assert!((s.e_hi - e).abs() < 1e-5, "{s:?}");
            let cp = s.end.unwrap().critical.unwrap();
            assert!((cp.e - s.e_hi).abs() < 1e-12);
        }
        assert!(plus[4].end.is_none());
        assert_eq!(plus[0].osc, Some(0));
        assert_eq!(plus[2].osc, Some(1));

        let minus = classify_segments(SheetLabel { n: 1, sign: Sign::Minus }, 0.0, 25.0).unwrap();
        assert_eq!(minus.len(), plus.len());
        for (a, b) in plus.iter().zip(&minus) {
            assert_eq!((a.kind, a.osc), (b.kind, b.osc));
            assert!((a.e_hi - b.e_hi).abs() < 1e-9);
        }
    }

    #[test]
    fn census_low_energies() {
        let r = CENSUS_RADIUS;
        assert_eq!(oscillation_census(1.0, 4, r).unwrap(), vec![2; 5]);
        assert_eq!(oscillation_census(5.0, 4, r).unwrap(), vec![0, 2, 2, 2, 2]);
        assert_eq!(oscillation_census(11.0, 4, r).unwrap(), vec![0, 4, 2, 2, 2]);
        assert_eq!(oscillation_census(PI * PI, 4, r).unwrap(), vec![0, 3, 2, 2, 2]);
        assert_eq!(oscillation_census(5.0 * UNIT, 4, r).unwrap(), vec![0, 2, 2, 2, 2]);
        assert!(oscillation_census(5.0, 4, 20.0).is_err());
        let r8 = census_radius(1.0, 8);
        assert!(r8 > CENSUS_RADIUS);
        assert_eq!(oscillation_census(1.0, 8, r8).unwrap(), vec![2; 9]);
    }

    #[test]
    fn pair_at_origin_on_free_levels() {
        for n in 1..=4 {
            let e = (n * n) as f64 * UNIT;
            let roots = coupling_roots(e, 30.0).unwrap();
            let origin = roots.iter().find(|c| c.lambda.norm() < 1e-6).unwrap();
            assert_eq!(origin.multiplicity, 2, "n = {n}");
        }
    }

    #[test]
    fn imaginary_excursion_peaks_at_branch_image() {
        let l = coupling_at(SheetLabel { n: 1, sign: Sign::Plus }, 6.401903).unwrap();
        assert!(l.re.abs() < 1e-7 && (l.im.abs() - 4.475309).abs() < 1e-5, "{l}");
        for de in [-0.05, 0.05] {
            let m = coupling_at(SheetLabel { n: 1, sign: Sign::Plus }, 6.401903 + de).unwrap();
            assert!(m.im.abs() < l.im.abs());
        }
    }

    #[test]
    fn reference_problem() {
        let r = reference_couplings(0.0, 3);
        assert_eq!(r, vec![UNIT, 4.0 * UNIT, 9.0 * UNIT]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn non_real_couplings_respect_bound(e in 0.0..40.0f64) {
                let set = eigencouplings(e, 60.0).unwrap();
                prop_assert!(set.non_real_count() <= set.zettl_bound);
                // non-real couplings come in conjugate pairs
                prop_assert_eq!(set.non_real_count() % 2, 0);
            }
        }
    }
}
