//! Command-line front end. Exit status 0 means success or a passing check, 1
//! a failing check (report on standard output), 2 invalid input (message on
//! standard error).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::eisenstein::{
    compare_jacobi, engine_raise, expected_jacobi_eigenvalue, jacobi_eisenstein, siegel_eisenstein, slice_identity_check,
    Agreement,
};
use crate::hecke::{apply_op, coset_sanity, eigenvalue_of, op_to_json, reps_for, Eigen, HeckeError, OpLabel};
use crate::io::{jacobi_to_json, paramodular_to_json, read_document, Document};
use crate::jacobi::{index_raise, JacobiExpansion};
use crate::maass::{
    corollary2_profile, fricke_check, lemma1_check, maass_check, relevant_primes, CheckReport, LiftSource, Lemma1Mode,
    Profile, Status, Witness,
};
use crate::ntheory::{big_rat, divisor_sigma, format_rational, rat};
use crate::paramod::{divisors_of_level, fj_slice, is_cusp, CoefficientSource, ExpansionBox, FourierIndex, JacobiSlice};

#[derive(Parser, Debug)]
#[command(name = "paramodular", version, about = "Exact Fourier expansions of paramodular forms of degree 2")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// The Eisenstein series E_{k,N} on a box.
    Eisenstein {
        #[arg(long)]
        weight: i64,
        #[arg(long)]
        level: i64,
        #[arg(long)]
        nmax: i64,
        #[arg(long)]
        mmax: i64,
        /// Write to this file instead of standard output.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// The lift of a Jacobi form of index N read from a file.
    Lift {
        #[arg(long)]
        weight: i64,
        #[arg(long)]
        level: i64,
        #[arg(long)]
        jacobi: PathBuf,
        #[arg(long)]
        nmax: i64,
        #[arg(long)]
        mmax: i64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Applies a Hecke operator to an expansion.
    Hecke {
        #[arg(long)]
        op: CliOp,
        #[arg(long)]
        q: i64,
        #[arg(long = "in")]
        input: PathBuf,
        /// Report the eigenvalue instead of the image.
        #[arg(long)]
        eigen: bool,
        /// Treat a Jacobi input as the lift it determines.
        #[arg(long)]
        lift: bool,
        /// Output box; by default the largest box the input determines.
        #[arg(long, requires = "mmax")]
        nmax: Option<i64>,
        #[arg(long, requires = "nmax")]
        mmax: Option<i64>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Runs a check suite and prints a JSON report.
    Check {
        #[arg(long)]
        suite: Suite,
        #[arg(long = "in")]
        input: PathBuf,
        /// Prime for lemma1; all relevant primes by default.
        #[arg(long)]
        p: Option<i64>,
        /// Divisor of the level for fricke, raising level for corollary6.
        #[arg(long)]
        d: Option<i64>,
        /// Prime for corollary3 and corollary5.
        #[arg(long)]
        q: Option<i64>,
        #[arg(long, default_value = "ii")]
        mode: Mode,
        /// cusp: accept phi(f) = 0 as sufficient.
        #[arg(long)]
        assume_extended: bool,
    },
    /// The m-th Fourier-Jacobi coefficient.
    Slice {
        #[arg(long)]
        m: i64,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Dumps a table of coset representatives with a sanity report.
    Reps {
        #[arg(long)]
        op: CliOp,
        #[arg(long)]
        q: i64,
        #[arg(long)]
        level: i64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CliOp {
    Identity,
    Tnq,
    Tstarq,
    Fjraise,
    Jdiag,
    L1diag,
    Usum,
}

impl From<CliOp> for OpLabel {
    fn from(op: CliOp) -> Self {
        match op {
            CliOp::Identity => OpLabel::Identity,
            CliOp::Tnq => OpLabel::TN,
            CliOp::Tstarq => OpLabel::TStarN,
            CliOp::Fjraise => OpLabel::FjRaise,
            CliOp::Jdiag => OpLabel::JDiag,
            CliOp::L1diag => OpLabel::L1Diag,
            CliOp::Usum => OpLabel::USum,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Suite {
    Maass,
    Lemma1,
    Fricke,
    Corollary2,
    Corollary3,
    Corollary5,
    Corollary6,
    Cusp,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Ii,
    Iii,
}

/// Invalid input: printed to standard error, exit status 2.
#[derive(Debug)]
struct Invalid(String);

impl<E: std::fmt::Display> From<E> for Invalid {
    fn from(e: E) -> Self {
        Invalid(e.to_string())
    }
}

/// Text for standard output (or the `--json` file) and whether it passed.
struct Outcome(String, bool, Option<PathBuf>);

fn read(path: &Path) -> Result<Document, Invalid> {
    let text = std::fs::read_to_string(path).map_err(|e| Invalid(format!("{}: {e}", path.display())))?;
    read_document(&text).map_err(|e| Invalid(format!("{}: {e}", path.display())))
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn report_text(r: &CheckReport) -> Outcome {
    Outcome(pretty(r), r.passed(), None)
}

fn single(status: bool, checked: usize, witness: Option<Witness>) -> CheckReport {
    CheckReport {
        status: if status { Status::Pass } else { Status::Fail },
        checked,
        skipped: 0,
        failures: usize::from(!status),
        witnesses: witness.into_iter().collect(),
    }
}

fn agreement_report(a: &Agreement, row: i64) -> CheckReport {
    let witness = a.mismatch.as_ref().map(|(n, r, x, y)| Witness::new(FourierIndex::new(*n, *r, row), x, y));
    let mut report = single(a.passed(), a.compared, witness);
    if a.mismatch.is_none() && !a.passed() {
        report.witnesses.clear();
    }
    report
}

fn first_jacobi(doc: Document) -> Result<JacobiExpansion, Invalid> {
    match doc {
        Document::Jacobi(phi) => Ok(phi),
        Document::Paramodular(f) => Ok(fj_slice(&f, 1)?),
    }
}

/// Engine failures that say the input is not invariant count as failed
/// checks; everything else is invalid input.
fn engine_error(e: HeckeError) -> Result<Outcome, Invalid> {
    match e {
        HeckeError::FractionalResidue { .. } | HeckeError::Irrational { .. } => {
            Ok(Outcome(pretty(&json!({"status": "fail", "reason": e.to_string()})), false, None))
        }
        other => Err(Invalid(other.to_string())),
    }
}

fn execute(cli: Cli) -> Result<Outcome, Invalid> {
    match cli.command {
        Command::Eisenstein { weight, level, nmax, mmax, json } => {
            let f = siegel_eisenstein(weight, level, ExpansionBox::new(nmax, mmax))?;
            Ok(Outcome(paramodular_to_json(&f), true, json))
        }
        Command::Lift { weight, level, jacobi, nmax, mmax, json } => {
            let Document::Jacobi(phi) = read(&jacobi)? else {
                return Err(Invalid("--jacobi expects a Jacobi expansion".into()));
            };
            if phi.weight() != weight {
                return Err(Invalid(format!("file has weight {}, not {weight}", phi.weight())));
            }
            if phi.index() != level {
                return Err(Invalid(format!("file has index {}, not the level {level}", phi.index())));
            }
            let f = LiftSource::new(phi, level)?.expand(ExpansionBox::new(nmax, mmax))?;
            Ok(Outcome(paramodular_to_json(&f), true, json))
        }
        Command::Hecke { op, q, input, eigen, lift, nmax, mmax, json } => {
            let doc = read(&input)?;
            let target = nmax.zip(mmax).map(|(a, b)| ExpansionBox::new(a, b));
            let label = OpLabel::from(op);
            let (src, row): (Box<dyn CoefficientSource>, Option<i64>) = match doc {
                Document::Paramodular(f) => (Box::new(f), None),
                Document::Jacobi(phi) if lift => {
                    let level = phi.index();
                    (Box::new(LiftSource::new(phi, level)?), None)
                }
                Document::Jacobi(phi) => {
                    let level = phi.index();
                    let slice = JacobiSlice::periodic(phi.clone(), level, 1).or_else(|_| JacobiSlice::new(phi, level, 1))?;
                    let row = if label == OpLabel::FjRaise { q } else { 1 };
                    (Box::new(slice), Some(row))
                }
            };
            let op = reps_for(label, q, src.level())?;
            if eigen {
                let (value, app) = match eigenvalue_of(src.as_ref(), &op, target) {
                    Ok(x) => x,
                    Err(e) => return engine_error(e),
                };
                let bx = app.expansion.expansion_box();
                let body = match value {
                    Eigen::Value(l) => json!({
                        "eigenvalue": format_rational(&l),
                        "nmax": bx.n_max,
                        "mmax": bx.m_max,
                        "stats": app.stats,
                    }),
                    Eigen::NotEigen { index, expected, actual } => json!({
                        "eigenvalue": null,
                        "witness": {"n": index.n, "r": index.r, "m": index.m,
                                    "expected": format_rational(&expected), "actual": format_rational(&actual)},
                        "stats": app.stats,
                    }),
                };
                let passed = !body["eigenvalue"].is_null();
                return Ok(Outcome(pretty(&body), passed, json));
            }
            let app = match apply_op(src.as_ref(), &op, target) {
                Ok(app) => app,
                Err(e) => return engine_error(e),
            };
            let text = match row {
                Some(m) if app.expansion.expansion_box().m_max >= m => jacobi_to_json(&fj_slice(&app.expansion, m)?),
                Some(m) => return Err(Invalid(format!("the input does not determine the row m = {m}"))),
                None => paramodular_to_json(&app.expansion),
            };
            Ok(Outcome(text, true, json))
        }
        Command::Check { suite, input, p, d, q, mode, assume_extended } => check(suite, read(&input)?, p, d, q, mode, assume_extended),
        Command::Slice { m, input, json } => {
            let f = match read(&input)? {
                Document::Paramodular(f) => f,
                Document::Jacobi(_) => return Err(Invalid("slice expects a paramodular expansion".into())),
            };
            Ok(Outcome(jacobi_to_json(&fj_slice(&f, m)?), true, json))
        }
        Command::Reps { op, q, level } => {
            let op = reps_for(op.into(), q, level)?;
            let sanity = coset_sanity(&op);
            let passed = sanity.passed;
            let body = json!({"operator": op_to_json(&op), "sanity": sanity});
            Ok(Outcome(pretty(&body), passed, None))
        }
    }
}

fn paramodular(doc: Document) -> Result<crate::paramod::ParamodularExpansion, Invalid> {
    match doc {
        Document::Paramodular(f) => Ok(f),
        Document::Jacobi(_) => Err(Invalid("this suite expects a paramodular expansion".into())),
    }
}

fn check(
    suite: Suite,
    doc: Document,
    p: Option<i64>,
    d: Option<i64>,
    q: Option<i64>,
    mode: Mode,
    assume_extended: bool,
) -> Result<Outcome, Invalid> {
    let need_q = || q.ok_or_else(|| Invalid("--q is required for this suite".into()));
    match suite {
        Suite::Maass => Ok(report_text(&maass_check(&paramodular(doc)?))),
        Suite::Lemma1 => {
            let f = paramodular(doc)?;
            let mode = match mode {
                Mode::Ii => Lemma1Mode::ConditionII,
                Mode::Iii => Lemma1Mode::ConditionIII,
            };
            let primes = p.map(|p| vec![p]).unwrap_or_else(|| relevant_primes(&f));
            let reports = primes.into_iter().map(|p| lemma1_check(&f, p, mode)).collect::<Result<Vec<_>, _>>()?;
            Ok(report_text(&CheckReport::merge(reports)))
        }
        Suite::Fricke => {
            let f = paramodular(doc)?;
            let ds = d.map(|d| vec![d]).unwrap_or_else(|| divisors_of_level(f.level()));
            let reports = ds.into_iter().map(|d| fricke_check(&f, d)).collect::<Result<Vec<_>, _>>()?;
            Ok(report_text(&CheckReport::merge(reports)))
        }
        Suite::Corollary2 => {
            let f = paramodular(doc)?;
            let report = match corollary2_profile(&f) {
                Profile::Consistent(profile) => single(true, profile.len(), None),
                Profile::Conflict { first, second, .. } => {
                    let mut w = Witness::new(first, &f.coeff(first), &f.coeff(second));
                    w.other = Some(second);
                    single(false, 1, Some(w))
                }
            };
            Ok(report_text(&report))
        }
        Suite::Corollary3 => {
            let q = need_q()?;
            let agreement = match doc {
                Document::Jacobi(phi) => {
                    let level = phi.index();
                    let src = LiftSource::new(phi, level)?;
                    slice_identity_check(&src, src.jacobi(), q, None)
                }
                Document::Paramodular(f) => {
                    let phi = fj_slice(&f, 1)?;
                    slice_identity_check(&f, &phi, q, None)
                }
            };
            match agreement {
                Ok(a) => Ok(report_text(&agreement_report(&a, 1))),
                Err(e) => engine_error(e),
            }
        }
        Suite::Corollary5 => {
            let q = need_q()?;
            let phi = first_jacobi(doc)?;
            let level = phi.index();
            let expected = expected_jacobi_eigenvalue(phi.weight(), q);
            let slice = JacobiSlice::periodic(phi.clone(), level, 1).or_else(|_| JacobiSlice::new(phi, level, 1))?;
            let op = reps_for(OpLabel::JDiag, q, level)?;
            let (value, app) = match eigenvalue_of(&slice, &op, None) {
                Ok(x) => x,
                Err(e) => return engine_error(e),
            };
            let checked = app.expansion.expansion_box().cardinality(level);
            let report = match value {
                Eigen::Value(l) if l == expected => single(true, checked, None),
                Eigen::Value(l) => single(false, checked, Some(Witness::new(FourierIndex::new(0, 0, 1), &l, &expected))),
                Eigen::NotEigen { index, expected, actual } => single(false, checked, Some(Witness::new(index, &actual, &expected))),
            };
            Ok(report_text(&report))
        }
        Suite::Corollary6 => {
            let phi = first_jacobi(doc)?;
            if phi.index() != 1 {
                return Err(Invalid(format!("corollary6 expects index 1, found {}", phi.index())));
            }
            let l = d.ok_or_else(|| Invalid("--d is required for corollary6".into()))?;
            let (via_engine, stats) = match engine_raise(&phi, l, None) {
                Ok(x) => x,
                Err(e) => return engine_error(e),
            };
            let n = via_engine.n_max();
            let sigma = big_rat(divisor_sigma((phi.weight() - 1) as u32, l)?);
            let eisenstein = jacobi_eisenstein(phi.weight(), l, n)?.scale(&sigma);
            let raised = index_raise(&phi.truncate(n * l), l)?;
            let a = compare_jacobi(&raised, &via_engine, stats.clone());
            let b = compare_jacobi(&eisenstein, &via_engine, stats);
            let report = CheckReport::merge([agreement_report(&a, l), agreement_report(&b, l)]);
            Ok(report_text(&report))
        }
        Suite::Cusp => {
            let f = paramodular(doc)?;
            let verdict = is_cusp(&f, assume_extended);
            let zero = rat(0);
            let witnesses: Vec<Witness> = verdict
                .witnesses
                .iter()
                .map(|(t, v)| Witness::new(*t, &crate::ntheory::parse_rational(v).unwrap_or_default(), &zero))
                .collect();
            let mut report = single(verdict.cusp, verdict.singular_checked, None);
            report.witnesses = witnesses;
            Ok(report_text(&report))
        }
    }
}

/// Runs the command line `args` (program name first) and returns the exit
/// status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli) {
        Ok(Outcome(text, passed, path)) => {
            let written = match path {
                Some(p) => std::fs::write(&p, &text).map_err(|e| format!("{}: {e}", p.display())),
                None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: {e}");
                return 2;
            }
            if passed {
                0
            } else {
                1
            }
        }
        Err(Invalid(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}
