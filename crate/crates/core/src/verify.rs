//! The acceptance suite: reference values and one check per criterion.

use std::f64::consts::PI;
use std::fmt;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::identities::{
    defect_check, derivative_check, im_identity, quadrupling_check, signature_check, DegeneratePoint,
};
use crate::lattice::{self, UNIT};
use crate::richardson::{self, classify_segments, coupling_roots, zettl_bound, Sign, SheetLabel, SpectralType};
use crate::rootfind::polish_e;
use crate::schrodinger::{
    axis_start, branch_catalog, critical_catalog, eigenvalue, lattice_maxima, monodromy, numeric_extrema,
    trace_real_locus, BranchPoint, CriticalKind, CriticalPoint, LocusKind,
};

/// Reference branch points in the first quadrant:
/// `(sheet_lo, sheet_hi, Re λ, Im λ, Re E, Im E)`.
pub const BRANCH_POINTS_REFERENCE: [(usize, usize, f64, f64, f64, f64); 6] = [
    (1, 2, 0.0, 4.475309, 6.401903, 0.0),
    (2, 3, 9.264139, 6.834853, 17.617719, 0.960866),
    (3, 4, 0.0, 12.801544, 30.979714, 0.0),
    (3, 4, 28.204239, 7.318111, 37.550337, 1.481781),
    (4, 5, 16.798312, 15.527134, 52.144783, 1.436416),
    (4, 5, 57.481587, 7.358543, 67.167957, 1.676906),
];

/// Reference eigencurve minima off the axis: `(sheet, |λ|, E)`.
pub const MINIMA_REFERENCE: [(usize, f64, f64); 6] = [
    (3, 6.151546, 21.996039),
    (4, 23.271272, 41.909383),
    (5, 10.258305, 61.478860),
    (5, 52.084097, 71.536568),
    (6, 34.746014, 91.264186),
    (6, 91.259508, 111.019851),
];

/// Smallest reduced energy with defective multiplicity `1, 2, …, 10`.
pub const MULTIPLICITY_REFERENCE: [u64; 10] = [1, 5, 25, 65, 625, 325, 15625, 1105, 4225, 8125];

/// `(E, N_0..=N_4)` for the census.
pub fn census_reference() -> [(f64, [usize; 5]); 5] {
    [
        (1.0, [2, 2, 2, 2, 2]),
        (5.0, [0, 2, 2, 2, 2]),
        (11.0, [0, 4, 2, 2, 2]),
        (PI * PI, [0, 3, 2, 2, 2]),
        (5.0 * UNIT, [0, 2, 2, 2, 2]),
    ]
}

pub const MATCH_TOL: f64 = 1e-5;
pub const LATTICE_TOL: f64 = 1e-10;
const SEED: u64 = 0x5eed_2024;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    #[serde(serialize_with = "seconds")]
    pub elapsed: Duration,
}

fn seconds<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {:<28} {:>7.2}s  {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

pub const CRITERIA: [(usize, &str); 12] = [
    (1, "branch points"),
    (2, "minima"),
    (3, "lattice maxima"),
    (4, "defective multiplicities"),
    (5, "ground coupling segments"),
    (6, "oscillation census"),
    (7, "non-real coupling bound"),
    (8, "defect orthogonality"),
    (9, "identity suite"),
    (10, "real loci"),
    (11, "critical and branch counts"),
    (12, "monodromy"),
];

/// Runs one criterion; errors count as failures.
pub fn run_criterion(id: usize) -> CriterionResult {
    let name = CRITERIA
        .iter()
        .find(|(i, _)| *i == id)
        .map_or("unknown", |(_, n)| n);
    let start = Instant::now();
    let outcome = match id {
        1 => branch_points(),
        2 => minima(),
        3 => lattice_exactness(),
        4 => multiplicities(),
        5 => segments(),
        6 => census(),
        7 => coupling_bound(),
        8 => defects(),
        9 => identity_suite(),
        10 => real_loci(),
        11 => counts(),
        12 => monodromies(),
        _ => Ok((false, format!("no criterion {id}"))),
    };
    let (pass, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionResult {
        id,
        name,
        pass,
        detail,
        elapsed: start.elapsed(),
    }
}

pub fn run_all() -> Vec<CriterionResult> {
    CRITERIA.iter().map(|(id, _)| run_criterion(*id)).collect()
}

type Outcome = Result<(bool, String)>;

fn match_branch_points(catalog: &[BranchPoint]) -> Vec<Option<BranchPoint>> {
    BRANCH_POINTS_REFERENCE
        .iter()
        .map(|&(lo, hi, lr, li, er, ei)| {
            catalog
                .iter()
                .find(|b| {
                    b.sheets == (lo, hi)
                        && (b.lambda.re - lr).abs() <= MATCH_TOL
                        && (b.lambda.im - li).abs() <= MATCH_TOL
                        && (b.e.re - er).abs() <= MATCH_TOL
                        && (b.e.im.abs() - ei).abs() <= MATCH_TOL
                })
                .copied()
        })
        .collect()
}

fn reference_branch_points() -> Result<Vec<Option<BranchPoint>>> {
    Ok(match_branch_points(&branch_catalog(5, 70.0)?))
}

fn branch_points() -> Outcome {
    let start = Instant::now();
    let found = reference_branch_points()?;
    let secs = start.elapsed().as_secs_f64();
    let hits = found.iter().filter(|b| b.is_some()).count();
    Ok((
        hits == found.len() && secs < 60.0,
        format!("{hits}/{} matched to {MATCH_TOL:e} in {secs:.2}s", found.len()),
    ))
}

fn reference_minima() -> Result<Vec<Option<CriticalPoint>>> {
    let catalog = critical_catalog(6)?;
    Ok(MINIMA_REFERENCE
        .iter()
        .map(|&(n, l, e)| {
            catalog
                .iter()
                .find(|p| {
                    p.sheet == n
                        && p.kind == CriticalKind::Min
                        && (p.lambda - l).abs() <= MATCH_TOL
                        && (p.e - e).abs() <= MATCH_TOL
                })
                .copied()
        })
        .collect())
}

fn minima() -> Outcome {
    let found = reference_minima()?;
    let hits = found.iter().filter(|p| p.is_some()).count();
    Ok((hits == found.len(), format!("{hits}/{} matched to {MATCH_TOL:e}", found.len())))
}

fn lattice_exactness() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    let mut complete = true;
    for n in 1..=6 {
        let (maxima, _) = numeric_extrema(n)?;
        let exact = lattice_maxima(n);
        complete &= maxima.len() == exact.len();
        for m in &maxima {
            let d = exact
                .iter()
                .map(|x| (x.lambda - m.lambda).abs().max((x.e - m.e).abs()))
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(d);
            count += 1;
        }
    }
    Ok((
        complete && worst <= LATTICE_TOL,
        format!("{count} maxima, worst deviation {worst:.2e}"),
    ))
}

fn multiplicities() -> Outcome {
    let mut table = Vec::new();
    for k in 1..=MULTIPLICITY_REFERENCE.len() as u64 {
        table.push(lattice::smallest_with_multiplicity(k, lattice::DEFAULT_SEARCH_CEILING)?);
    }
    let table_ok = table == MULTIPLICITY_REFERENCE;
    let mut mismatches = 0;
    for e in (1..=20001u64).step_by(2) {
        if lattice::defective_multiplicity(e)? != lattice::sites_with_energy(e)?.len() as u64 {
            mismatches += 1;
        }
    }
    Ok((
        table_ok && mismatches == 0,
        format!("smallest energies {table:?}; {mismatches} formula/enumeration mismatches up to 20001"),
    ))
}

fn segments() -> Outcome {
    use SpectralType::*;
    let segs = classify_segments(SheetLabel { n: 1, sign: Sign::Plus }, 0.0, 25.0)?;
    let kinds: Vec<SpectralType> = segs.iter().map(|s| s.kind).collect();
    let bounds: Vec<f64> = segs.iter().skip(1).map(|s| s.e_lo).collect();
    let expect = [UNIT, PI * PI, 5.0 * UNIT, 21.996039];
    let kinds_ok = kinds == [R, IR, R, C, R];
    let bounds_ok = bounds.len() == expect.len() && bounds.iter().zip(expect).all(|(b, e)| (b - e).abs() <= MATCH_TOL);
    let osc: Vec<Option<usize>> = segs.iter().filter(|s| s.kind == R).map(|s| s.osc).collect();
    let osc_ok = osc.len() >= 2 && osc[0] == Some(0) && osc[1] == Some(1);
    let kinds_str: Vec<String> = kinds.iter().map(|k| k.to_string()).collect();
    Ok((
        kinds_ok && bounds_ok && osc_ok,
        format!(
            "types {} at {:?}, osc {:?}",
            kinds_str.join(" "),
            bounds.iter().map(|b| format!("{b:.6}")).collect::<Vec<_>>(),
            osc
        ),
    ))
}

fn census() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (e, expect) in census_reference() {
        let got = richardson::oscillation_census(e, 4, richardson::census_radius(e, 4))?;
        ok &= got == expect;
        parts.push(format!("E={e:.4}: {got:?}"));
    }
    Ok((ok, parts.join("; ")))
}

/// Non-real couplings within this radius are counted for the bound.
const BOUND_RADIUS: f64 = 150.0;

fn non_real(e: f64) -> Result<usize> {
    Ok(coupling_roots(e, BOUND_RADIUS)?
        .iter()
        .filter(|c| c.kind != SpectralType::R)
        .map(|c| c.multiplicity)
        .sum())
}

fn coupling_bound() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED);
    let energies: Vec<f64> = (0..200).map(|_| rng.gen_range(0.0..60.0)).collect();
    let counts: Vec<(f64, usize)> = energies
        .par_iter()
        .map(|&e| non_real(e).map(|n| (e, n)))
        .collect::<Result<_>>()?;
    let violations: Vec<&(f64, usize)> = counts.iter().filter(|(e, n)| *n > zettl_bound(*e)).collect();
    let at5 = non_real(5.0)?;
    let above = non_real(5.0 * UNIT + 1e-3)?;
    Ok((
        violations.is_empty() && at5 == 2 && above == 4,
        format!(
            "{} violations in 200 energies; saturation {at5} at E=5, {above} just above 5π²/4",
            violations.len()
        ),
    ))
}

fn defects() -> Outcome {
    let bps = reference_branch_points()?;
    let mins = reference_minima()?;
    let mut worst: f64 = 0.0;
    let mut ok = bps.iter().all(Option::is_some) && mins.iter().all(Option::is_some);
    for b in bps.iter().flatten() {
        let r = defect_check(&DegeneratePoint::from(b))?;
        ok &= r.pass;
        worst = worst.max(r.residual);
    }
    for m in mins.iter().flatten() {
        let r = defect_check(&DegeneratePoint::from(m))?;
        ok &= r.pass;
        worst = worst.max(r.residual);
    }
    Ok((ok, format!("worst relative defect product {worst:.2e}")))
}

/// Random real eigenpairs on sheets 1–5, at least 0.1 from any critical λ.
fn random_real_pairs(count: usize, rng: &mut StdRng) -> Result<Vec<(f64, f64)>> {
    let catalog = critical_catalog(5)?;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.gen_range(1..=5usize);
        let l: f64 = rng.gen_range(-40.0..40.0);
        if catalog.iter().any(|p| p.sheet == n && (p.lambda - l).abs() < 0.1) {
            continue;
        }
        out.push((l, eigenvalue(l, n)?));
    }
    Ok(out)
}

fn random_complex_pairs(count: usize, rng: &mut StdRng) -> Result<Vec<(Complex64, Complex64)>> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.gen_range(1..=5usize);
        let l = Complex64::new(rng.gen_range(-30.0..30.0), rng.gen_range(-10.0..10.0));
        if l.im.abs() < 1e-3 {
            continue;
        }
        let seed = Complex64::new(eigenvalue(l.re, n)?, 0.0);
        if let Ok(e) = polish_e(l, seed, 60) {
            out.push((l, e));
        }
    }
    Ok(out)
}

fn identity_suite() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED ^ 9);
    let real = random_real_pairs(100, &mut rng)?;
    let complex = random_complex_pairs(100, &mut rng)?;
    let checks: Vec<_> = real
        .par_iter()
        .map(|&(l, e)| derivative_check(Complex64::new(l, 0.0), Complex64::new(e, 0.0)))
        .collect::<Result<_>>()?;
    let worst_slope = checks.iter().map(|c| c.agreement.residual).fold(0.0, f64::max);
    let worst_recip = checks.iter().map(|c| c.reciprocity.residual).fold(0.0, f64::max);
    let ims: Vec<_> = complex
        .par_iter()
        .map(|&(l, e)| im_identity(l, e))
        .collect::<Result<_>>()?;
    let worst_im = ims.iter().map(|r| r.residual).fold(0.0, f64::max);
    let ok = checks.iter().all(|c| c.agreement.pass && c.reciprocity.pass) && ims.iter().all(|r| r.pass);
    Ok((
        ok,
        format!("slopes {worst_slope:.2e} (1e-6), reciprocity {worst_recip:.2e} (1e-8), imaginary part {worst_im:.2e} (1e-8)"),
    ))
}

fn real_loci() -> Outcome {
    let axis = trace_real_locus(&axis_start(1))?;
    let mut ends: Vec<f64> = axis.branch_points.iter().map(|p| p.lambda.im).collect();
    ends.sort_by(f64::total_cmp);
    let axis_ok = axis.kind == LocusKind::B
        && ends.len() == 2
        && (ends[0] + 4.475309).abs() <= MATCH_TOL
        && (ends[1] - 4.475309).abs() <= MATCH_TOL
        && axis.branch_points.iter().all(|p| p.lambda.re.abs() <= MATCH_TOL);

    let start = lattice_maxima(2)[1];
    let lp = trace_real_locus(&start)?;
    let ret = lp
        .points
        .last()
        .map_or(f64::INFINITY, |p| (p.lambda - Complex64::new(start.lambda, 0.0)).norm());
    let loop_ok = lp.kind == LocusKind::C && lp.closed && lp.sheets == [2, 3] && ret <= 1e-6;
    let quad = quadrupling_check(&lp)?;
    let sig = signature_check(&lp)?;
    Ok((
        axis_ok && loop_ok && quad.pass && sig.pass,
        format!(
            "axis ends {ends:?}; loop return {ret:.2e} over {} points, quadrupling {:.2e}, signature {:.2e}",
            lp.points.len(),
            quad.residual,
            sig.residual
        ),
    ))
}

fn counts() -> Outcome {
    let catalog = critical_catalog(6)?;
    let crit: Vec<usize> = (1..=6).map(|n| catalog.iter().filter(|p| p.sheet == n).count()).collect();
    let crit_ok = crit.iter().zip(1..).all(|(&c, n)| c == 2 * n - 1);
    let bps = branch_catalog(5, 70.0)?;
    let part: Vec<usize> = (1..=3)
        .map(|n| bps.iter().filter(|b| b.sheets.0 == n || b.sheets.1 == n).count())
        .collect();
    let part_ok = part.iter().zip(1..).all(|(&c, n)| c == 4 * n - 2);
    Ok((
        crit_ok && part_ok,
        format!("critical points per sheet {crit:?}; branch points per sheet {part:?}"),
    ))
}

fn monodromies() -> Outcome {
    let found = reference_branch_points()?;
    let mut swapped = 0;
    for b in found.iter().flatten() {
        if monodromy(b)?.swapped {
            swapped += 1;
        }
    }
    Ok((swapped == found.len(), format!("{swapped}/{} swap", found.len())))
}
