//! `segre-kstab` command line.
//!
//! Exit codes: 0 success, 1 verification or mathematical failure, 2 usage or
//! parse error. Results go to stdout, diagnostics to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand};

use crate::bigraded::{AmbientShape, EnumerationCap, OneParameterSubgroup};
use crate::certificate::{emit, verify_with_cap};
use crate::dfcalc::{
    decide_instability_with_cap, df_closed, df_general, expansion_with_cap, Decision, Polarization,
};
use crate::error::Error;
use crate::exactmath::{approx_decimal, parse_rational, Rational};
use crate::geometry::{
    is_normal, is_smooth, normalize, semiinvariant_alpha, BilinearForm, NormalForm,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "segre-kstab",
    version,
    about = "Exact Donaldson-Futaki invariants for (1,1) hypersurfaces in P^m x P^n"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rank, smoothness and normality of a hypersurface
    Analyze(AnalyzeArgs),
    /// DF of the product test configuration induced by a diagonal subgroup
    Df(DfArgs),
    /// Build the destabilizing subgroup and write a certificate
    Destabilize(DestabilizeArgs),
    /// Re-derive every claim in a certificate file
    Verify { cert: PathBuf },
    /// Tabulate DF over polarizations O(d,e)
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// CSV of rationals; rows are x variables, columns are y variables
    #[arg(long, conflicts_with_all = ["m", "n", "r"])]
    matrix: Option<PathBuf>,
    #[arg(long, required_unless_present = "matrix")]
    m: Option<usize>,
    #[arg(long, required_unless_present = "matrix")]
    n: Option<usize>,
    #[arg(long, required_unless_present = "matrix")]
    r: Option<usize>,
}

#[derive(Args, Debug)]
struct NormalFormArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    /// Defaults to min(m, n), the smooth case
    #[arg(long)]
    r: Option<usize>,
}

#[derive(Args, Debug)]
struct PolarizationArgs {
    #[arg(long)]
    d: u64,
    #[arg(long)]
    e: u64,
}

#[derive(Args, Debug)]
struct DfArgs {
    #[command(flatten)]
    form: NormalFormArgs,
    #[command(flatten)]
    pol: PolarizationArgs,
    /// Weights on x_0..x_m, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    u: Vec<i64>,
    /// Weights on y_0..y_n, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    v: Vec<i64>,
    /// Append approximate decimals (display only)
    #[arg(long)]
    decimal: bool,
}

#[derive(Args, Debug)]
struct DestabilizeArgs {
    #[command(flatten)]
    form: NormalFormArgs,
    #[command(flatten)]
    pol: PolarizationArgs,
    /// Certificate path; printed to stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    form: NormalFormArgs,
    #[arg(long)]
    dmax: u64,
    #[arg(long)]
    emax: u64,
    /// Worker threads
    #[arg(long, default_value_t = 1)]
    parallel: usize,
    #[arg(long)]
    decimal: bool,
}

/// Error carrying its exit code.
struct Exit {
    code: u8,
    message: String,
}

impl Exit {
    fn usage(message: impl ToString) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }

    fn failure(message: impl ToString) -> Self {
        Self {
            code: EXIT_FAILURE,
            message: message.to_string(),
        }
    }
}

impl From<Error> for Exit {
    fn from(err: Error) -> Self {
        match err {
            Error::Parse(_)
            | Error::InvalidShape(_)
            | Error::LengthMismatch(_)
            | Error::NotAHypersurface => Exit::usage(err),
            _ => Exit::failure(err),
        }
    }
}

type CmdResult = Result<u8, Exit>;

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let cap = EnumerationCap::from_env();
    let result = match cli.command {
        Command::Analyze(args) => analyze(args, out),
        Command::Df(args) => df(args, cap, out),
        Command::Destabilize(args) => destabilize(args, cap, out),
        Command::Verify { cert } => verify_file(&cert, cap, out),
        Command::Sweep(args) => sweep(args, cap, out),
    };
    match result {
        Ok(code) => code,
        Err(exit) => {
            let _ = writeln!(err, "{}", exit.message);
            exit.code
        }
    }
}

fn io_err(e: std::io::Error) -> Exit {
    Exit::usage(format!("io error: {e}"))
}

impl NormalFormArgs {
    fn build(&self) -> Result<NormalForm, Exit> {
        let shape = AmbientShape::new(self.m, self.n)?;
        let r = self.r.unwrap_or(self.m.min(self.n));
        Ok(NormalForm::new(shape, r)?)
    }
}

impl PolarizationArgs {
    fn build(&self) -> Result<Polarization, Exit> {
        Ok(Polarization::new(self.d, self.e)?)
    }
}

/// Rows of comma separated rationals; blank lines and `#` comments skipped.
pub fn read_matrix_csv(text: &str) -> crate::Result<BilinearForm> {
    let rows = text
        .lines()
        .map(str::trim)
        .filter(|line| !line.is_empty() && !line.starts_with('#'))
        .map(|line| {
            line.split(',')
                .map(parse_rational)
                .collect::<crate::Result<Vec<_>>>()
        })
        .collect::<crate::Result<Vec<_>>>()?;
    BilinearForm::new(rows)
}

fn yes_no(flag: bool) -> &'static str {
    if flag {
        "yes"
    } else {
        "no"
    }
}

fn analyze(args: AnalyzeArgs, out: &mut dyn Write) -> CmdResult {
    let nf = match &args.matrix {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(io_err)?;
            normalize(&read_matrix_csv(&text)?)?
        }
        None => NormalFormArgs {
            m: args.m.unwrap_or_default(),
            n: args.n.unwrap_or_default(),
            r: args.r,
        }
        .build()?,
    };
    let normal = if is_normal(&nf) {
        "yes".to_string()
    } else {
        format!("no (r={})", nf.r)
    };
    let applies = if !is_normal(&nf) {
        "no (not normal)"
    } else if nf.theorem_applies() {
        "yes"
    } else {
        "no (m=n, smooth)"
    };
    writeln!(out, "m={} n={} r={}", nf.shape.m, nf.shape.n, nf.r).map_err(io_err)?;
    writeln!(
        out,
        "normal: {normal}, smooth: {}, theorem applies: {applies}",
        yes_no(is_smooth(&nf))
    )
    .map_err(io_err)?;
    Ok(EXIT_OK)
}

fn show(q: &Rational, decimal: bool) -> String {
    if decimal {
        format!("{q} (~{})", approx_decimal(q))
    } else {
        q.to_string()
    }
}

fn df(args: DfArgs, cap: EnumerationCap, out: &mut dyn Write) -> CmdResult {
    let nf = args.form.build()?;
    let pol = args.pol.build()?;
    if !is_normal(&nf) {
        return Err(Error::NotNormal.into());
    }
    let lambda = OneParameterSubgroup::new(args.u, args.v);
    lambda.fits(nf.shape)?;
    let alpha = semiinvariant_alpha(&nf, &lambda)?;
    let coeffs = expansion_with_cap(nf.shape, pol, &lambda, alpha, cap)?;
    let general = df_general(&coeffs)?;
    let closed = df_closed(nf.shape, pol, alpha);
    let status = if general == closed {
        "paths agree"
    } else {
        "PATHS DISAGREE"
    };
    let dec = args.decimal;
    writeln!(out, "alpha={alpha} DF={} ({status})", show(&general, dec)).map_err(io_err)?;
    writeln!(
        out,
        "a0={} a1={} b0={} b1={}",
        show(&coeffs.a0, dec),
        show(&coeffs.a1, dec),
        show(&coeffs.b0, dec),
        show(&coeffs.b1, dec)
    )
    .map_err(io_err)?;
    writeln!(
        out,
        "DF general={} closed={}",
        show(&general, dec),
        show(&closed, dec)
    )
    .map_err(io_err)?;
    if general != closed {
        return Ok(EXIT_FAILURE);
    }
    Ok(EXIT_OK)
}

fn inconclusive(nf: &NormalForm) -> Exit {
    if is_normal(nf) {
        Exit::failure("inconclusive: m=n and X smooth")
    } else {
        Exit::failure("not normal: r=0")
    }
}

fn destabilize(args: DestabilizeArgs, cap: EnumerationCap, out: &mut dyn Write) -> CmdResult {
    let nf = args.form.build()?;
    let pol = args.pol.build()?;
    if !is_normal(&nf) {
        return Err(inconclusive(&nf));
    }
    let cert = match decide_instability_with_cap(&nf, pol, cap)? {
        Decision::Unstable(cert) => *cert,
        Decision::Inconclusive { .. } => return Err(inconclusive(&nf)),
    };
    let text = emit(&cert)?;
    let join = |w: &[i64]| w.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
    writeln!(
        out,
        "lambda u=({}) v=({})",
        join(&cert.lambda_u),
        join(&cert.lambda_v)
    )
    .map_err(io_err)?;
    writeln!(out, "factor_swapped={}", cert.factor_swapped).map_err(io_err)?;
    writeln!(out, "alpha={} DF={}", cert.alpha, cert.df).map_err(io_err)?;
    match &args.out {
        Some(path) => {
            std::fs::write(path, &text).map_err(io_err)?;
            writeln!(out, "certificate written to {}", path.display()).map_err(io_err)?;
        }
        None => write!(out, "{text}").map_err(io_err)?,
    }
    Ok(EXIT_OK)
}

fn verify_file(path: &Path, cap: EnumerationCap, out: &mut dyn Write) -> CmdResult {
    let text = std::fs::read_to_string(path).map_err(io_err)?;
    let verdict = verify_with_cap(&text, cap).map_err(|e| match e {
        Error::Parse(msg) => Exit::usage(format!("parse error: {msg}")),
        other => Exit::from(other),
    })?;
    if verdict.ok {
        writeln!(out, "OK").map_err(io_err)?;
        return Ok(EXIT_OK);
    }
    for failure in &verdict.failures {
        writeln!(out, "FAIL {failure}").map_err(io_err)?;
    }
    Ok(EXIT_FAILURE)
}

/// One cell of a sweep table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepCell {
    pub d: u64,
    pub e: u64,
    pub df: Rational,
}

/// Runs the full certified pipeline on every `(d, e)` in `1..=dmax x
/// 1..=emax`, spread over `workers` threads. Output order is row-major
/// regardless of the thread count.
pub fn sweep_cells(
    nf: &NormalForm,
    dmax: u64,
    emax: u64,
    workers: usize,
    cap: EnumerationCap,
) -> crate::Result<Vec<SweepCell>> {
    let grid: Vec<(u64, u64)> = (1..=dmax)
        .flat_map(|d| (1..=emax).map(move |e| (d, e)))
        .collect();
    let slots: Vec<Mutex<Option<crate::Result<SweepCell>>>> =
        grid.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let work = || loop {
        let i = next.fetch_add(1, Ordering::Relaxed);
        let Some(&(d, e)) = grid.get(i) else { break };
        let cell = Polarization::new(d, e)
            .and_then(|pol| decide_instability_with_cap(nf, pol, cap))
            .and_then(|decision| match decision {
                Decision::Unstable(cert) => Ok(SweepCell { d, e, df: cert.df }),
                Decision::Inconclusive { reason } => Err(Error::MethodInapplicable(reason)),
            });
        *slots[i].lock().unwrap() = Some(cell);
    };
    let workers = workers.clamp(1, grid.len().max(1));
    if workers == 1 {
        work();
    } else {
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(work);
            }
        });
    }
    slots
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("every cell visited"))
        .collect()
}

fn sweep(args: SweepArgs, cap: EnumerationCap, out: &mut dyn Write) -> CmdResult {
    let nf = args.form.build()?;
    if args.dmax == 0 || args.emax == 0 {
        return Err(Exit::usage("dmax and emax must be at least 1"));
    }
    if !is_normal(&nf) || !nf.theorem_applies() {
        return Err(inconclusive(&nf));
    }
    let cells = sweep_cells(&nf, args.dmax, args.emax, args.parallel, cap)?;
    writeln!(
        out,
        "DF over O(d,e) for m={} n={} r={} (each cell: definition = closed form)",
        nf.shape.m, nf.shape.n, nf.r
    )
    .map_err(io_err)?;
    for cell in &cells {
        writeln!(
            out,
            "d={} e={} DF={}",
            cell.d,
            cell.e,
            show(&cell.df, args.decimal)
        )
        .map_err(io_err)?;
    }
    writeln!(out, "{} cells, all negative", cells.len()).map_err(io_err)?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat;

    fn run_cli(args: &[&str]) -> (u8, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["segre-kstab"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn matrix_csv_parsing() {
        let form = read_matrix_csv("# rank one\n1, 2/2, 1\n\n2,2,2\n").unwrap();
        assert_eq!(normalize(&form).unwrap().r, 0);
        assert!(read_matrix_csv("1,x\n0,1\n").is_err());
        assert!(read_matrix_csv("1,0\n0\n").is_err());
    }

    #[test]
    fn analyze_flags() {
        let (code, out, _) = run_cli(&["analyze", "--m", "2", "--n", "3", "--r", "1"]);
        assert_eq!(code, 0);
        assert!(
            out.contains("normal: yes, smooth: no, theorem applies: yes"),
            "{out}"
        );
        let (_, out, _) = run_cli(&["analyze", "--m", "2", "--n", "2", "--r", "2"]);
        assert!(
            out.contains("smooth: yes, theorem applies: no (m=n, smooth)"),
            "{out}"
        );
    }

    #[test]
    fn df_flags() {
        let (code, out, _) = run_cli(&[
            "df", "--m", "1", "--n", "2", "--r", "1", "--d", "1", "--e", "1", "--u", "0,0", "--v",
            "-1,-1,2",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("alpha=1 DF=-4/9 (paths agree)"), "{out}");
        let (code, out, _) = run_cli(&[
            "df", "--m", "1", "--n", "2", "--d", "1", "--e", "1", "--u", "0,0", "--v", "0,0,0",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("DF=0"), "{out}");
        let (code, _, err) = run_cli(&[
            "df", "--m", "1", "--n", "2", "--d", "1", "--e", "1", "--u", "0,0", "--v", "-1,-1,1",
        ]);
        assert_eq!(code, 1);
        assert!(err.contains("SL condition violated: sum(v) = -1"), "{err}");
        let (code, _, _) = run_cli(&[
            "df", "--m", "1", "--n", "2", "--d", "1", "--e", "1", "--u", "0", "--v", "0,0,0",
        ]);
        assert_eq!(code, 2);
    }

    #[test]
    fn df_decimal_is_marked_approximate() {
        let (_, out, _) = run_cli(&[
            "df",
            "--m",
            "1",
            "--n",
            "2",
            "--d",
            "1",
            "--e",
            "1",
            "--u",
            "0,0",
            "--v",
            "-1,-1,2",
            "--decimal",
        ]);
        assert!(out.contains("DF=-4/9 (~-0.444444)"), "{out}");
    }

    #[test]
    fn destabilize_to_stdout() {
        let (code, out, _) = run_cli(&[
            "destabilize",
            "--m",
            "3",
            "--n",
            "1",
            "--r",
            "1",
            "--d",
            "1",
            "--e",
            "1",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("DF=-3/8"), "{out}");
        assert!(out.contains("\"factor_swapped\":true"), "{out}");
        let (code, _, err) = run_cli(&[
            "destabilize",
            "--m",
            "2",
            "--n",
            "2",
            "--r",
            "2",
            "--d",
            "1",
            "--e",
            "1",
        ]);
        assert_eq!(code, 1);
        assert!(err.contains("inconclusive: m=n and X smooth"));
        let (code, _, err) = run_cli(&[
            "destabilize",
            "--m",
            "2",
            "--n",
            "3",
            "--r",
            "0",
            "--d",
            "1",
            "--e",
            "1",
        ]);
        assert_eq!(code, 1);
        assert!(err.contains("not normal: r=0"));
    }

    #[test]
    fn sweep_cells_and_parallel_determinism() {
        let nf = NormalForm::new(AmbientShape::new(1, 2).unwrap(), 1).unwrap();
        let cells = sweep_cells(&nf, 2, 2, 1, EnumerationCap::default()).unwrap();
        let dfs: Vec<_> = cells.iter().map(|c| c.df.clone()).collect();
        assert_eq!(dfs, vec![rat(-4, 9), rat(-1, 2), rat(-8, 25), rat(-4, 9)]);
        let threaded = sweep_cells(&nf, 2, 2, 4, EnumerationCap::default()).unwrap();
        assert_eq!(threaded, cells);

        let (_, one, _) = run_cli(&[
            "sweep", "--m", "2", "--n", "3", "--r", "1", "--dmax", "3", "--emax", "2",
        ]);
        let (_, many, _) = run_cli(&[
            "sweep",
            "--m",
            "2",
            "--n",
            "3",
            "--r",
            "1",
            "--dmax",
            "3",
            "--emax",
            "2",
            "--parallel",
            "3",
        ]);
        assert_eq!(one, many);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_cli(&[]).0, 2);
        assert_eq!(run_cli(&["analyze", "--m", "2"]).0, 2);
        assert_eq!(
            run_cli(&["analyze", "--m", "0", "--n", "1", "--r", "0"]).0,
            2
        );
        assert_eq!(run_cli(&["verify", "/nonexistent/cert.json"]).0, 2);
        assert_eq!(run_cli(&["--help"]).0, 0);
    }
}
