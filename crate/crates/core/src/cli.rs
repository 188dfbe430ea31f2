//! The `beg` command line.
//!
//! Subcommands print CSV (header row first) or JSON. Numbers are written
//! with 9 significant digits and a `.` decimal point; the JSON form carries
//! the same rounded values. Exit status: 0 success, 1 a verification check
//! failed, 2 usage, parse or runtime error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::bounds::{beta_critical, exponents, lemma2_bound, lemma3_bound, r_of_t, theorem1_bound};
use crate::error::{Error, Result};
use crate::model::{classify_region, ModelParams};
use crate::region::{solve_t_d, UniquenessCurve};
use crate::specification::exact_max_tv;
use crate::verify::{log_grid, run_sweep, CheckKind, FailureScan, SweepSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Significant digits in numeric output.
pub const SIGNIFICANT_DIGITS: usize = 9;

#[derive(Parser, Debug)]
#[command(
    name = "beg",
    version,
    about = "Dobrushin uniqueness region of the Blume-Emery-Griffiths model"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct Point {
    #[arg(short = 'd', long = "dim", default_value_t = 2)]
    pub d: usize,
    #[arg(short = 'x', allow_negative_numbers = true)]
    pub x: f64,
    #[arg(short = 'y', allow_negative_numbers = true)]
    pub y: f64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify (x, y) and test membership in the uniqueness region.
    Region {
        #[command(flatten)]
        point: Point,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Tabulate the uniqueness curve x(d, y).
    Curve {
        #[arg(short = 'd', long = "dim", default_value_t = 2)]
        d: usize,
        #[arg(long, allow_negative_numbers = true, default_value_t = -5.0)]
        y_min: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 5.0)]
        y_max: f64,
        #[arg(long, default_value_t = 101)]
        steps: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Evaluate the closed-form bounds and the exact worst case at one β.
    Bounds {
        #[command(flatten)]
        point: Point,
        #[arg(short = 'b', long, allow_negative_numbers = true)]
        beta: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Scan β and report the exact worst-case distance at each grid point.
    Scan {
        #[command(flatten)]
        point: Point,
        #[arg(long, default_value_t = 1e-3)]
        beta_min: f64,
        #[arg(long, default_value_t = 50.0)]
        beta_max: f64,
        #[arg(long, default_value_t = 40)]
        steps: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run a verification sweep and write its JSON report.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Default)]
pub struct VerifyArgs {
    /// Sweep description (TOML key/value file). Flags override its values.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(short = 'd', long = "dim")]
    pub d: Option<usize>,
    /// Report path; stdout when absent.
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
    #[arg(long, env = "BEG_WORKERS")]
    pub workers: Option<usize>,
    #[arg(long)]
    pub per_region: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub beta_min: Option<f64>,
    #[arg(long)]
    pub beta_max: Option<f64>,
    #[arg(long)]
    pub beta_steps: Option<usize>,
}

/// Contents of a `verify --spec` file. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyFile {
    pub d: Option<usize>,
    pub points: Option<Vec<[f64; 2]>>,
    pub sample_per_region: Option<usize>,
    pub seed: Option<u64>,
    pub beta_grid: Option<Vec<f64>>,
    pub beta_min: Option<f64>,
    pub beta_max: Option<f64>,
    pub beta_steps: Option<usize>,
    pub checks: Option<Vec<String>>,
    pub output: Option<PathBuf>,
    pub workers: Option<usize>,
}

pub const DEFAULT_SEED: u64 = 20_240_101;
pub const DEFAULT_PER_REGION: usize = 20;

impl VerifyFile {
    pub fn parse(text: &str) -> Result<VerifyFile> {
        toml::from_str(text).map_err(|e| Error::InvalidSweep(format!("spec file: {e}")))
    }
}

/// Merges flags over the file and builds the sweep. Without a spec file the
/// default certification run is used (20 random points per strip).
pub fn resolve_verify(
    args: &VerifyArgs,
    file: Option<VerifyFile>,
) -> Result<(SweepSpec, Option<PathBuf>)> {
    let has_file = file.is_some();
    let file = file.unwrap_or_default();
    let d = args.d.or(file.d).unwrap_or(2);
    let per_region = args
        .per_region
        .or(file.sample_per_region)
        .unwrap_or(if has_file { 0 } else { DEFAULT_PER_REGION });
    let seed = args.seed.or(file.seed).unwrap_or(DEFAULT_SEED);

    let mut points: Vec<(f64, f64)> = file
        .points
        .unwrap_or_default()
        .into_iter()
        .map(|[x, y]| (x, y))
        .collect();
    if per_region > 0 {
        points.extend(SweepSpec::certification(d, per_region, seed)?.points);
    }

    let grid_flags =
        args.beta_min.is_some() || args.beta_max.is_some() || args.beta_steps.is_some();
    let beta_grid = match file.beta_grid {
        Some(g) if !grid_flags => g,
        _ => log_grid(
            args.beta_min.or(file.beta_min).unwrap_or(1e-3),
            args.beta_max.or(file.beta_max).unwrap_or(50.0),
            args.beta_steps.or(file.beta_steps).unwrap_or(40),
        )?,
    };
    let checks: Vec<CheckKind> = match file.checks {
        Some(names) => names.iter().map(|n| n.parse()).collect::<Result<_>>()?,
        None => CheckKind::BOUND_CHAIN.to_vec(),
    };
    let spec =
        SweepSpec::new(d, points, beta_grid, checks)?.with_workers(args.workers.or(file.workers));
    Ok((spec, args.output.clone().or(file.output)))
}

/// Formats `v` with [`SIGNIFICANT_DIGITS`] significant digits: fixed notation
/// for magnitudes in `[1e-5, 1e9)`, scientific otherwise.
pub fn format_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v);
    let exp: i32 = sci
        .rsplit('e')
        .next()
        .and_then(|e| e.parse().ok())
        .unwrap_or(0);
    if (-5..9).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        sci
    }
}

/// `v` rounded to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(v: f64) -> f64 {
    if v.is_finite() {
        format_sig(v).parse().expect("formatted float parses")
    } else {
        v
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    /// Undefined at this point: empty in CSV, `null` in JSON.
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format_sig(*v),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(t) => t.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => json!(round_sig(*v)),
            Cell::Num(_) | Cell::Missing => Value::Null,
            Cell::Int(i) => json!(i),
            Cell::Bool(b) => json!(b),
            Cell::Text(t) => json!(t),
        }
    }
}

/// Column-ordered table rendered as CSV or as a JSON array of row objects.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Table {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.to_string(), v.json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

fn emit(out: &mut dyn Write, args: &OutputArgs, text: &str) -> Result<()> {
    match &args.output {
        Some(path) => write_file(path, text),
        None => out.write_all(text.as_bytes()).map_err(io_err),
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text)
        .map_err(|e| Error::InvalidParams(format!("cannot write {}: {e}", path.display())))
}

fn io_err(e: std::io::Error) -> Error {
    Error::InvalidParams(format!("write failed: {e}"))
}

fn render(table: &Table, format: Format, extra: Option<Map<String, Value>>) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let value = match extra {
                None => table.to_json_rows(),
                Some(mut obj) => {
                    obj.insert("rows".into(), table.to_json_rows());
                    Value::Object(obj)
                }
            };
            let mut s = serde_json::to_string_pretty(&value).expect("json");
            s.push('\n');
            s
        }
    }
}

pub fn region_table(d: usize, x: f64, y: f64) -> Result<Table> {
    let label = classify_region(x, y);
    let curve = UniquenessCurve::new(d)?;
    let mut t = Table::new(vec!["d", "x", "y", "major", "sub", "curve_x", "inside"]);
    t.push(vec![
        Cell::Int(d as i64),
        Cell::Num(x),
        Cell::Num(y),
        Cell::Text(label.major.to_string()),
        Cell::Text(label.sub.to_string()),
        Cell::Num(curve.evaluate(y)),
        Cell::Bool(curve.contains(x, y)),
    ]);
    Ok(t)
}

pub fn curve_table(d: usize, y_min: f64, y_max: f64, steps: usize) -> Result<Table> {
    if steps < 2 {
        return Err(Error::InvalidParams(format!(
            "curve needs at least 2 steps, got {steps}"
        )));
    }
    if y_min.is_nan() || y_max.is_nan() || y_max < y_min {
        return Err(Error::InvalidParams(format!(
            "empty y range [{y_min}, {y_max}]"
        )));
    }
    let curve = UniquenessCurve::new(d)?;
    let mut t = Table::new(vec!["y", "x_curve"]);
    for i in 0..steps {
        let y = if i == steps - 1 {
            y_max
        } else {
            y_min + (y_max - y_min) * i as f64 / (steps - 1) as f64
        };
        t.push(vec![Cell::Num(y), Cell::Num(curve.evaluate(y))]);
    }
    Ok(t)
}

pub fn bounds_table(d: usize, x: f64, y: f64, beta: f64) -> Result<Table> {
    let params = ModelParams::new(x, y, beta, d)?;
    let label = classify_region(x, y);
    let exact = exact_max_tv(&params)?;
    let mut t = Table::new(vec![
        "d",
        "x",
        "y",
        "beta",
        "sub",
        "a",
        "b",
        "lemma2",
        "lemma3",
        "theorem1",
        "beta_c",
        "rate",
        "exact_max_tv",
        "satisfied",
    ]);
    let mut row = vec![
        Cell::Int(d as i64),
        Cell::Num(x),
        Cell::Num(y),
        Cell::Num(beta),
        Cell::Text(label.sub.to_string()),
    ];
    if label.sub.in_u() {
        let ep = exponents(&params)?;
        row.extend([
            Cell::Num(ep.a),
            Cell::Num(ep.b),
            Cell::Num(lemma2_bound(&params)?),
            Cell::Num(lemma3_bound(&params)?),
            Cell::Num(theorem1_bound(&params)?),
            Cell::Num(beta_critical(&ep)?),
            Cell::Num(r_of_t(ep.ratio())?),
        ]);
    } else {
        row.extend((0..7).map(|_| Cell::Missing));
    }
    row.extend([Cell::Num(exact.max_tv), Cell::Bool(exact.satisfied)]);
    t.push(row);
    Ok(t)
}

pub fn scan_table(
    d: usize,
    x: f64,
    y: f64,
    beta_min: f64,
    beta_max: f64,
    steps: usize,
) -> Result<(Table, Option<f64>)> {
    let grid = log_grid(beta_min, beta_max, steps)?;
    let in_u = classify_region(x, y).sub.in_u();
    let mut t = Table::new(vec!["beta", "max_tv", "row_sum", "theorem1", "satisfied"]);
    for beta in grid {
        let params = ModelParams::new(x, y, beta, d)?;
        let r = exact_max_tv(&params)?;
        let thm = if in_u {
            Cell::Num(theorem1_bound(&params)?)
        } else {
            Cell::Missing
        };
        t.push(vec![
            Cell::Num(beta),
            Cell::Num(r.max_tv),
            Cell::Num(r.row_sum),
            thm,
            Cell::Bool(r.satisfied),
        ]);
    }
    let failure = FailureScan {
        beta_min,
        beta_max,
        steps,
        ..FailureScan::default()
    }
    .run(d, x, y)?;
    Ok((t, failure))
}

fn run_verify(args: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let file = match &args.spec {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::InvalidSweep(format!("cannot read {}: {e}", path.display())))?;
            Some(VerifyFile::parse(&text)?)
        }
        None => None,
    };
    let (spec, output) = resolve_verify(args, file)?;
    let report = run_sweep(&spec)?;
    let mut json = report.to_json();
    json.push('\n');
    match &output {
        Some(path) => write_file(path, &json)?,
        None => out.write_all(json.as_bytes()).map_err(io_err)?,
    }
    let status = |w: &mut dyn Write| -> std::io::Result<()> {
        for c in &report.checks {
            let worst = c.worst_slack.map(format_sig).unwrap_or_else(|| "-".into());
            writeln!(
                w,
                "{} {}: {}/{} cells failed, worst slack {}, {} points skipped",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.cells_failed,
                c.cells_checked,
                worst,
                c.skipped_points.len()
            )?;
            if let Some(wit) = c.witnesses.first() {
                writeln!(
                    w,
                    "  first failure at (x, y) = ({}, {}), beta = {}, slack {}",
                    format_sig(wit.x),
                    format_sig(wit.y),
                    format_sig(wit.beta),
                    format_sig(wit.slack)
                )?;
            }
        }
        Ok(())
    };
    // report on stdout means the summary goes to stderr
    if output.is_some() {
        status(out).map_err(io_err)?;
    } else {
        status(err).map_err(io_err)?;
    }
    Ok(if report.all_pass() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Region { point, out: o } => {
            let t = region_table(point.d, point.x, point.y)?;
            emit(out, &o, &render(&t, o.format, None))?;
        }
        Command::Curve {
            d,
            y_min,
            y_max,
            steps,
            out: o,
        } => {
            let t = curve_table(d, y_min, y_max, steps)?;
            let extra = (o.format == Format::Json).then(|| {
                let mut m = Map::new();
                m.insert("d".into(), json!(d));
                m.insert(
                    "t_d".into(),
                    json!(round_sig(solve_t_d(d).expect("d checked"))),
                );
                m
            });
            emit(out, &o, &render(&t, o.format, extra))?;
        }
        Command::Bounds {
            point,
            beta,
            out: o,
        } => {
            let t = bounds_table(point.d, point.x, point.y, beta)?;
            emit(out, &o, &render(&t, o.format, None))?;
        }
        Command::Scan {
            point,
            beta_min,
            beta_max,
            steps,
            out: o,
        } => {
            let (t, failure) = scan_table(point.d, point.x, point.y, beta_min, beta_max, steps)?;
            let extra = (o.format == Format::Json).then(|| {
                let mut m = Map::new();
                m.insert(
                    "failure_beta".into(),
                    failure.map(|b| json!(round_sig(b))).unwrap_or(Value::Null),
                );
                m
            });
            emit(out, &o, &render(&t, o.format, extra))?;
            if o.format == Format::Csv {
                match failure {
                    Some(b) => writeln!(err, "first failing beta: {}", format_sig(b)),
                    None => writeln!(err, "condition holds on the whole scan"),
                }
                .map_err(io_err)?;
            }
        }
        Command::Verify(args) => return run_verify(&args, out, err),
    }
    Ok(EXIT_OK)
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    EXIT_OK
                }
                _ => EXIT_USAGE,
            };
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("beg").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(-3.696575321), "-3.69657532");
        assert_eq!(format_sig(0.25), "0.25");
        assert_eq!(format_sig(1.0), "1");
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(1.234567891e-7), "1.23456789e-7");
        assert_eq!(format_sig(123456789.4), "123456789");
        assert_eq!(round_sig(1.0 / 7.0), 0.142857143);
    }

    #[test]
    fn region_command() {
        let (code, out, _) = run_capture(&["region", "-d", "2", "-x", "-6", "-y", "0"]);
        assert_eq!(code, 0);
        let mut lines = out.lines();
        assert_eq!(lines.next().unwrap(), "d,x,y,major,sub,curve_x,inside");
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(&row[..5], &["2", "-6", "0", "Disordered", "B"]);
        assert!((row[5].parse::<f64>().unwrap() + 3.69658).abs() < 1e-4);
        assert_eq!(row[6], "true");

        let (_, out, _) = run_capture(&["region", "-d", "2", "-x", "1", "-y", "-3"]);
        assert!(out.contains(",Antiquadrupolar,OutsideU,"));
        assert!(out.trim_end().ends_with("false"));

        let (_, out, _) = run_capture(&["region", "-x", "-5", "-y", "2", "--format", "json"]);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v[0]["sub"], "A");
        assert_eq!(v[0]["inside"], false);
        assert!((v[0]["curve_x"].as_f64().unwrap() + 7.0448625).abs() < 1e-4);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(
            run_capture(&["region", "-d", "2", "-x", "abc", "-y", "0"]).0,
            EXIT_USAGE
        );
        assert_eq!(run_capture(&["region", "-x", "1"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["nonsense"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["curve", "--steps", "1"]).0, EXIT_USAGE);
        assert_eq!(
            run_capture(&["bounds", "-x", "-6", "-y", "0", "--beta", "-1"]).0,
            EXIT_USAGE
        );
    }

    #[test]
    fn curve_json_matches_csv() {
        let (_, csv, _) = run_capture(&[
            "curve", "-d", "3", "--y-min", "-2", "--y-max", "2", "--steps", "9",
        ]);
        let (_, js, _) = run_capture(&[
            "curve", "-d", "3", "--y-min", "-2", "--y-max", "2", "--steps", "9", "--format", "json",
        ]);
        let v: Value = serde_json::from_str(&js).unwrap();
        let rows = v["rows"].as_array().unwrap();
        for (line, row) in csv.lines().skip(1).zip(rows) {
            let mut it = line.split(',').map(|s| s.parse::<f64>().unwrap());
            assert_eq!(it.next().unwrap(), row["y"].as_f64().unwrap());
            assert_eq!(it.next().unwrap(), row["x_curve"].as_f64().unwrap());
        }
        assert_eq!(rows.len(), 9);
    }

    #[test]
    fn verify_file_parsing() {
        let f =
            VerifyFile::parse("d = 3\npoints = [[0.0, -2.0]]\nchecks = [\"DobrushinSatisfied\"]\n")
                .unwrap();
        assert_eq!(f.d, Some(3));
        assert!(VerifyFile::parse("bogus = 1").is_err());
        let args = VerifyArgs {
            d: Some(2),
            ..Default::default()
        };
        let (spec, out) = resolve_verify(&args, Some(f)).unwrap();
        assert_eq!(spec.d, 2);
        assert_eq!(spec.points, vec![(0.0, -2.0)]);
        assert_eq!(spec.beta_grid.len(), 40);
        assert_eq!(spec.checks.len(), 1);
        assert!(out.is_none());
    }

    #[test]
    fn verify_defaults_to_certification() {
        let (spec, _) = resolve_verify(&VerifyArgs::default(), None).unwrap();
        assert_eq!(spec.points.len(), 60);
        assert_eq!(spec.checks.len(), CheckKind::BOUND_CHAIN.len());
    }
}
