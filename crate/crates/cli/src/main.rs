mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use richardson_sl::lattice::{self, UNIT};
use richardson_sl::richardson::{self, SheetLabel};
use richardson_sl::schrodinger::{self, CriticalKind, CriticalPoint};
use richardson_sl::{verify, Complex64, Error};

use table::{Format, Table};

/// Spectra of the sign-potential well `−ψ'' − λ sgn(x) ψ = E ψ` on [−1, 1]
/// in both the Schrödinger (E at real λ) and Richardson (λ at real E)
/// descriptions. Set RAYON_NUM_THREADS to limit worker threads.
#[derive(Debug, Parser)]
#[command(name = "richardson", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Output {
    /// Output file; standard output when absent.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[arg(short, long, value_enum, default_value = "csv", global = true)]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Eigenvalues E_n(λ) on a uniform λ grid.
    /// Columns: lambda, sheet, E, osc.
    Eigencurves {
        #[arg(long, default_value_t = 5)]
        nmax: usize,
        #[arg(long, default_value_t = -60.0, allow_negative_numbers = true)]
        lambda_min: f64,
        #[arg(long, default_value_t = 60.0, allow_negative_numbers = true)]
        lambda_max: f64,
        #[arg(long, default_value_t = 241)]
        points: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Schrödinger branch points (double roots in E).
    /// Columns: sheet_lo, sheet_hi, re_lambda, im_lambda, re_E, im_E.
    BranchPoints {
        #[arg(long, default_value_t = 5)]
        nmax: usize,
        #[arg(long, default_value_t = 70.0)]
        radius: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Critical points of the real eigencurves.
    /// Columns: sheet, kind, lambda, E, exact.
    CriticalPoints {
        #[arg(long, default_value_t = 6)]
        nmax: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Curve of real E through complex λ, started at the critical point of
    /// `sheet` nearest to `lambda`.
    /// Columns: index, re_lambda, im_lambda, E.
    TraceLocus {
        #[arg(long)]
        sheet: usize,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        lambda: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Eigencouplings λ(E) on a uniform E grid.
    /// Columns: E, label, re_lambda, im_lambda, type.
    RichardsonCurves {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        e_min: f64,
        #[arg(long, default_value_t = 40.0, allow_negative_numbers = true)]
        e_max: f64,
        #[arg(long, default_value_t = 81)]
        points: usize,
        #[arg(long, default_value_t = 60.0)]
        radius: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Spectral-type segments of one labelled coupling, e.g. `--sheet 1+`.
    /// Columns: sheet, type, E_lo, E_hi, osc, end_re_lambda, end_im_lambda,
    /// critical_sheet, critical_kind.
    Segments {
        #[arg(long)]
        sheet: SheetLabel,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        e_min: f64,
        #[arg(long, default_value_t = 25.0, allow_negative_numbers = true)]
        e_max: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Real couplings by node count at each energy.
    /// Columns: E, m, N.
    Census {
        #[arg(long = "energy", short = 'e', required = true, num_args = 1.., allow_negative_numbers = true)]
        energies: Vec<f64>,
        #[arg(long, default_value_t = 4)]
        mmax: usize,
        /// Search radius; by default the smallest one covering `mmax`.
        #[arg(long)]
        radius: Option<f64>,
        #[command(flatten)]
        out: Output,
    },
    /// Lattice of eigencurve maxima.
    /// Default columns: i, j, n, lambda_red, E_red, lambda, E, multiplicity.
    /// With --table3: N_d, E_red. With --matrix: i, j, E_red.
    Lattice {
        /// Smallest reduced energy for each multiplicity 1..=10.
        #[arg(long, conflicts_with = "matrix")]
        table3: bool,
        /// Reduced energy matrix of this size.
        #[arg(long)]
        matrix: Option<u64>,
        /// Sheets listed by default.
        #[arg(long, default_value_t = 10)]
        nmax: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Acceptance suite; exit status 1 if any criterion fails.
    Verify {
        /// Run only these criteria.
        #[arg(long, num_args = 1..)]
        criterion: Vec<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// JSON report instead of text lines.
        #[arg(long)]
        json: bool,
    },
}

enum Failure {
    Usage(String),
    Runtime(String),
    Verification,
    Closed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(msg) => Failure::Usage(msg),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        if e.kind() == io::ErrorKind::BrokenPipe {
            return Failure::Closed;
        }
        Failure::Runtime(e.to_string())
    }
}

fn sink(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(table: Table, out: &Output) -> Result<(), Failure> {
    let mut w = sink(&out.output)?;
    table.write(out.format, &mut w)?;
    w.flush()?;
    Ok(())
}

fn grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, Failure> {
    if points < 2 || !(lo < hi) {
        return Err(Failure::Usage(format!(
            "need at least 2 points on a non-empty range, got {points} on [{lo}, {hi}]"
        )));
    }
    Ok((0..points)
        .map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64)
        .collect())
}

/// Drops a component that is rounding noise relative to the other.
fn tidy(z: Complex64) -> Complex64 {
    let floor = 1e-12 * z.norm().max(1.0);
    let clip = |x: f64| if x.abs() < floor { 0.0 } else { x };
    Complex64::new(clip(z.re), clip(z.im))
}

fn kind_name(k: CriticalKind) -> &'static str {
    match k {
        CriticalKind::Max => "max",
        CriticalKind::Min => "min",
    }
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Eigencurves {
            nmax,
            lambda_min,
            lambda_max,
            points,
            out,
        } => {
            let pairs = schrodinger::eigencurves(nmax, &grid(lambda_min, lambda_max, points)?)?;
            let mut t = Table::new(&["lambda", "sheet", "E", "osc"]);
            for p in pairs {
                t.push(vec![p.lambda.re.into(), p.sheet.into(), p.e.re.into(), p.osc.into()]);
            }
            emit(t, &out)
        }
        Command::BranchPoints { nmax, radius, out } => {
            let mut t = Table::new(&["sheet_lo", "sheet_hi", "re_lambda", "im_lambda", "re_E", "im_E"]);
            for b in schrodinger::branch_catalog(nmax, radius)? {
                let (l, e) = (tidy(b.lambda), tidy(b.e));
                t.push(vec![
                    b.sheets.0.into(),
                    b.sheets.1.into(),
                    l.re.into(),
                    l.im.into(),
                    e.re.into(),
                    e.im.into(),
                ]);
            }
            emit(t, &out)
        }
        Command::CriticalPoints { nmax, out } => {
            let mut t = Table::new(&["sheet", "kind", "lambda", "E", "exact"]);
            for p in schrodinger::critical_catalog(nmax)? {
                t.push(vec![
                    p.sheet.into(),
                    kind_name(p.kind).into(),
                    p.lambda.into(),
                    p.e.into(),
                    (if p.exact { "true" } else { "false" }).into(),
                ]);
            }
            emit(t, &out)
        }
        Command::TraceLocus { sheet, lambda, out } => {
            let start: CriticalPoint = schrodinger::critical_catalog(sheet)?
                .into_iter()
                .filter(|p| p.sheet == sheet)
                .min_by(|a, b| (a.lambda - lambda).abs().total_cmp(&(b.lambda - lambda).abs()))
                .ok_or_else(|| Failure::Usage(format!("no critical point on sheet {sheet}")))?;
            let locus = schrodinger::trace_real_locus(&start)?;
            let mut t = Table::new(&["index", "re_lambda", "im_lambda", "E"]);
            for (k, p) in locus.points.iter().enumerate() {
                t.push(vec![k.into(), p.lambda.re.into(), p.lambda.im.into(), p.e.into()]);
            }
            emit(t, &out)
        }
        Command::RichardsonCurves {
            e_min,
            e_max,
            points,
            radius,
            out,
        } => {
            let sets: Vec<_> = grid(e_min, e_max, points)?
                .par_iter()
                .map(|&e| richardson::eigencouplings(e, radius))
                .collect::<Result<_, _>>()?;
            let mut t = Table::new(&["E", "label", "re_lambda", "im_lambda", "type"]);
            for set in sets {
                for c in set.couplings {
                    let l = tidy(c.lambda);
                    t.push(vec![
                        set.e.into(),
                        c.label.map(|l| l.to_string()).into(),
                        l.re.into(),
                        l.im.into(),
                        c.kind.to_string().into(),
                    ]);
                }
            }
            emit(t, &out)
        }
        Command::Segments { sheet, e_min, e_max, out } => {
            let mut t = Table::new(&[
                "sheet",
                "type",
                "E_lo",
                "E_hi",
                "osc",
                "end_re_lambda",
                "end_im_lambda",
                "critical_sheet",
                "critical_kind",
            ]);
            for s in richardson::classify_segments(sheet, e_min, e_max)? {
                let crit = s.end.and_then(|b| b.critical);
                t.push(vec![
                    s.sheet.to_string().into(),
                    s.kind.to_string().into(),
                    s.e_lo.into(),
                    s.e_hi.into(),
                    s.osc.into(),
                    s.end.map(|b| tidy(b.lambda).re).into(),
                    s.end.map(|b| tidy(b.lambda).im).into(),
                    crit.map(|c| c.sheet).into(),
                    crit.map(|c| kind_name(c.kind)).into(),
                ]);
            }
            emit(t, &out)
        }
        Command::Census {
            energies,
            mmax,
            radius,
            out,
        } => {
            let mut t = Table::new(&["E", "m", "N"]);
            for e in energies {
                let r = radius.unwrap_or_else(|| richardson::census_radius(e, mmax));
                for (m, n) in richardson::oscillation_census(e, mmax, r)?.into_iter().enumerate() {
                    t.push(vec![e.into(), m.into(), n.into()]);
                }
            }
            emit(t, &out)
        }
        Command::Lattice {
            table3,
            matrix,
            nmax,
            out,
        } => {
            if table3 {
                let mut t = Table::new(&["N_d", "E_red"]);
                for k in 1..=10u64 {
                    let e = lattice::smallest_with_multiplicity(k, lattice::DEFAULT_SEARCH_CEILING)?;
                    t.push(vec![k.into(), e.into()]);
                }
                return emit(t, &out);
            }
            if let Some(size) = matrix {
                let mut t = Table::new(&["i", "j", "E_red"]);
                for (i, row) in lattice::reduced_energy_matrix(size).into_iter().enumerate() {
                    for (j, e) in row.into_iter().enumerate() {
                        t.push(vec![(i + 1).into(), (j + 1).into(), e.into()]);
                    }
                }
                return emit(t, &out);
            }
            let mut t = Table::new(&["i", "j", "n", "lambda_red", "E_red", "lambda", "E", "multiplicity"]);
            for n in 1..=nmax {
                for s in lattice::sheet_maxima(n) {
                    t.push(vec![
                        s.i.into(),
                        s.j.into(),
                        s.n.into(),
                        s.lambda_red.into(),
                        s.e_red.into(),
                        s.lambda().into(),
                        (s.e_red as f64 * UNIT).into(),
                        lattice::defective_multiplicity(s.e_red)?.into(),
                    ]);
                }
            }
            emit(t, &out)
        }
        Command::Verify {
            criterion,
            output,
            json,
        } => {
            let ids: Vec<usize> = if criterion.is_empty() {
                verify::CRITERIA.iter().map(|(id, _)| *id).collect()
            } else {
                criterion
            };
            if let Some(bad) = ids.iter().find(|id| !verify::CRITERIA.iter().any(|(k, _)| k == *id)) {
                return Err(Failure::Usage(format!("no criterion {bad}; valid ids are 1..=12")));
            }
            let mut w = sink(&output)?;
            let mut all_pass = true;
            let mut results = Vec::new();
            for id in ids {
                let r = verify::run_criterion(id);
                all_pass &= r.pass;
                if !json {
                    writeln!(w, "{r}")?;
                    w.flush()?;
                }
                results.push(r);
            }
            if json {
                serde_json::to_writer_pretty(&mut w, &results).map_err(io::Error::from)?;
                writeln!(w)?;
            }
            w.flush()?;
            if all_pass {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) | Err(Failure::Closed) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verification) => ExitCode::from(1),
    }
}
