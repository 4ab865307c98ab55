//! Command-line front end.
//!
//! ```text
//! plq-epssub eval  FILE X
//! plq-epssub esub  FILE XBAR EPS [--oracle] [--check]
//! plq-epssub graph FILE EPS [--table OUT] [--sample M OUT [--script OUT]] [--xrange LO HI]
//! plq-epssub gen   N SEED OUT
//! plq-epssub bench [--sizes 4000,40000] [--queries Q] [--seed S] [--eps E]
//! ```
//!
//! Exit codes: 0 success, 2 usage or input error, 3 verification mismatch.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::bench::{format_report, run_bench};
use crate::error::Error;
use crate::generate::generate_convex_plq;
use crate::graph::build_graph;
use crate::oracle::eps_sub_reference;
use crate::plq::{Interval, PlqFunction};
use crate::point::eps_subdifferential;
use crate::text::{fmt_num, parse_num, parse_plq, to_plq_text};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_MISMATCH: i32 = 3;

/// Largest relative endpoint deviation tolerated by `esub --check`.
pub const CHECK_TOLERANCE: f64 = 1e-6;

/// Half-width of the sampling window used for unbounded domains.
const DEFAULT_WINDOW: f64 = 10.0;

#[derive(Debug, Parser)]
#[command(
    name = "plq-epssub",
    version,
    about = "ε-subdifferentials of convex PLQ functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print f(x).
    #[command(allow_negative_numbers = true)]
    Eval {
        file: PathBuf,
        #[arg(value_parser = number)]
        x: f64,
    },
    /// Print the ε-subdifferential at XBAR.
    #[command(allow_negative_numbers = true)]
    Esub {
        file: PathBuf,
        #[arg(value_parser = number)]
        xbar: f64,
        #[arg(value_parser = number)]
        eps: f64,
        /// Use the conjugate-based reference instead of the logarithmic search.
        #[arg(long, conflicts_with = "check")]
        oracle: bool,
        /// Run both algorithms and report their largest endpoint deviation.
        #[arg(long)]
        check: bool,
    },
    /// Build the graph of the ε-subdifferential.
    #[command(allow_negative_numbers = true)]
    Graph {
        file: PathBuf,
        #[arg(value_parser = number)]
        eps: f64,
        /// Write both lower-bound tables as CSV.
        #[arg(long, value_name = "OUT")]
        table: Option<PathBuf>,
        /// Write M samples `x,lower,upper` as CSV.
        #[arg(long, num_args = 2, value_names = ["M", "OUT"])]
        sample: Option<Vec<String>>,
        /// Sampling window, clipped to the domain.
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], value_parser = number)]
        xrange: Option<Vec<f64>>,
        /// Write a gnuplot script plotting the sampled band.
        #[arg(long, value_name = "OUT", requires = "sample")]
        script: Option<PathBuf>,
    },
    /// Write a random convex PLQ function alternating quadratic and linear pieces.
    Gen { n: usize, seed: u64, out: PathBuf },
    /// Time pointwise queries of both algorithms and the graph build.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "4000,40000")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 200)]
        queries: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1.0, value_parser = number)]
        eps: f64,
    },
}

fn number(s: &str) -> Result<f64, String> {
    parse_num(s)
        .filter(|v| !v.is_nan())
        .ok_or_else(|| format!("invalid number `{s}`"))
}

/// Failure of one command, carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::input(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::input(e.to_string())
    }
}

/// Parses `args` (program name first) and runs the command. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn load(path: &Path) -> Result<PlqFunction, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    parse_plq(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn positive_eps(eps: f64) -> Result<(), Failure> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveEpsilon { eps }.into())
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Eval { file, x } => {
            let f = load(&file)?;
            writeln!(out, "{}", fmt_num(f.eval(x)))?;
            Ok(EXIT_OK)
        }
        Command::Esub {
            file,
            xbar,
            eps,
            oracle,
            check,
        } => {
            let f = load(&file)?;
            positive_eps(eps)?;
            if oracle {
                writeln!(out, "{}", eps_sub_reference(&f, xbar, eps)?)?;
                return Ok(EXIT_OK);
            }
            let fast = eps_subdifferential(&f, xbar, eps)?;
            writeln!(out, "{fast}")?;
            if check {
                let reference = eps_sub_reference(&f, xbar, eps)?;
                let dev = deviation(fast, reference);
                writeln!(out, "reference {reference}")?;
                writeln!(out, "max deviation {}", fmt_num(dev))?;
                if dev > CHECK_TOLERANCE {
                    return Ok(EXIT_MISMATCH);
                }
            }
            Ok(EXIT_OK)
        }
        Command::Graph {
            file,
            eps,
            table,
            sample,
            xrange,
            script,
        } => {
            let f = load(&file)?;
            positive_eps(eps)?;
            let graph = build_graph(&f, eps)?;
            if table.is_none() && sample.is_none() {
                write!(out, "{}", graph.to_csv())?;
            }
            if let Some(path) = table {
                fs::write(&path, graph.to_csv())?;
            }
            if let Some(sample_args) = sample {
                let m: usize = sample_args[0].parse().map_err(|_| {
                    Failure::input(format!("invalid sample count `{}`", sample_args[0]))
                })?;
                let path = PathBuf::from(&sample_args[1]);
                let (lo, hi) = sample_window(&f, xrange.as_deref())?;
                let xs = linspace(lo, hi, m);
                let bands = graph.eval_grid(&xs)?;
                fs::write(&path, sample_csv(&xs, &bands))?;
                if let Some(script_path) = script {
                    fs::write(&script_path, gnuplot_script(&path, eps))?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Gen { n, seed, out: path } => {
            if n == 0 {
                return Err(Failure::input("need at least one piece"));
            }
            fs::write(&path, to_plq_text(&generate_convex_plq(n, seed)))?;
            Ok(EXIT_OK)
        }
        Command::Bench {
            sizes,
            queries,
            seed,
            eps,
        } => {
            positive_eps(eps)?;
            let rows = run_bench(&sizes, queries, seed, eps);
            write!(out, "{}", format_report(&rows))?;
            Ok(EXIT_OK)
        }
    }
}

/// Largest endpoint difference, relative to `max(1, |a|, |b|)`; infinite when the
/// intervals disagree on emptiness or on an infinite endpoint.
pub fn deviation(a: Interval, b: Interval) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() == b.is_empty() {
            0.0
        } else {
            f64::INFINITY
        };
    }
    let end = |x: f64, y: f64| {
        if x == y {
            0.0
        } else if !x.is_finite() || !y.is_finite() {
            f64::INFINITY
        } else {
            (x - y).abs() / 1f64.max(x.abs()).max(y.abs())
        }
    };
    end(a.lo(), b.lo()).max(end(a.hi(), b.hi()))
}

fn sample_window(f: &PlqFunction, xrange: Option<&[f64]>) -> Result<(f64, f64), Failure> {
    let (lo, hi) = match xrange {
        Some([lo, hi]) => (*lo, *hi),
        _ => (-DEFAULT_WINDOW, DEFAULT_WINDOW),
    };
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Failure::input(
            "sampling window must be finite with LO <= HI",
        ));
    }
    let dom = f.domain();
    let (lo, hi) = if xrange.is_some() {
        (lo.max(dom.lo), hi.min(dom.hi))
    } else {
        (
            if dom.lo.is_finite() { dom.lo } else { lo },
            if dom.hi.is_finite() { dom.hi } else { hi },
        )
    };
    if lo > hi {
        return Err(Failure::input("sampling window does not meet the domain"));
    }
    Ok((lo, hi))
}

fn linspace(lo: f64, hi: f64, m: usize) -> Vec<f64> {
    match m {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (m - 1) as f64;
            (0..m)
                .map(|k| if k + 1 == m { hi } else { lo + step * k as f64 })
                .collect()
        }
    }
}

fn sample_csv(xs: &[f64], bands: &[Interval]) -> String {
    let mut out = String::from("x,lower,upper\n");
    for (x, band) in xs.iter().zip(bands) {
        let (lo, hi) = if band.is_empty() {
            (f64::NAN, f64::NAN)
        } else {
            (band.lo(), band.hi())
        };
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_num(*x),
            fmt_num(lo),
            fmt_num(hi)
        ));
    }
    out
}

fn gnuplot_script(sample: &Path, eps: f64) -> String {
    let data = sample.display();
    format!(
        "set datafile separator ','\n\
         set key top left\n\
         set xlabel 'x'\n\
         set ylabel 's'\n\
         set title 'epsilon-subdifferential, eps = {eps}'\n\
         plot '{data}' using 1:2:3 skip 1 with filledcurves fillcolor rgb '#c6dbef' title 'graph', \\\n\
         \x20    '' using 1:2 skip 1 with lines linewidth 2 title 'lower', \\\n\
         \x20    '' using 1:3 skip 1 with lines linewidth 2 title 'upper'\n",
        eps = fmt_num(eps),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut full = vec!["plq-epssub"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn deviation_of_intervals() {
        let a = Interval::new(0.0, 1.0);
        assert_eq!(deviation(a, a), 0.0);
        assert_eq!(deviation(a, Interval::EMPTY), f64::INFINITY);
        assert_eq!(deviation(Interval::EMPTY, Interval::EMPTY), 0.0);
        assert_eq!(
            deviation(a, Interval::new(f64::NEG_INFINITY, 1.0)),
            f64::INFINITY
        );
        let b = Interval::new(0.0, 4.0);
        assert!((deviation(b, Interval::new(0.0, 4.0 + 4e-6)) - 1e-6).abs() < 1e-11);
    }

    #[test]
    fn windows_and_grids() {
        let abs =
            PlqFunction::new(&[[0.0, 0.0, -1.0, 0.0], [f64::INFINITY, 0.0, 1.0, 0.0]]).unwrap();
        assert_eq!(sample_window(&abs, None).unwrap(), (-10.0, 10.0));
        assert_eq!(
            sample_window(&abs, Some(&[-1.0, 1.0])).unwrap(),
            (-1.0, 1.0)
        );
        assert!(sample_window(&abs, Some(&[1.0, -1.0])).is_err());
        let boxed = PlqFunction::new(&[
            [-1.0, 0.0, 0.0, f64::INFINITY],
            [2.0, 0.0, 0.0, 0.0],
            [f64::INFINITY, 0.0, 0.0, f64::INFINITY],
        ])
        .unwrap();
        assert_eq!(sample_window(&boxed, None).unwrap(), (-1.0, 2.0));
        assert_eq!(linspace(-1.0, 1.0, 5), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(linspace(3.0, 4.0, 1), vec![3.0]);
        assert!(linspace(3.0, 4.0, 0).is_empty());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_capture(&[]).0, EXIT_INPUT);
        assert_eq!(run_capture(&["eval"]).0, EXIT_INPUT);
        assert_eq!(
            run_capture(&["esub", "missing.plq", "x", "1"]).0,
            EXIT_INPUT
        );
        let (code, _, err) = run_capture(&["eval", "/nonexistent/file.plq", "0"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("nonexistent"));
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("esub"));
    }
}
