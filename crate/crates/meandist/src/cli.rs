//! Command-line front end.
//!
//! [`run`] parses `argv`, writes results to `out` and diagnostics to `err`,
//! and returns the process exit code: 0 on success, 1 on usage or input
//! errors, 2 when `verify` finds a disagreement.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::catalog::{self, Solid};
use crate::geom::{Polytope, P3};
use crate::oracle::mc::{self, Exec, McEstimate};
use crate::oracle::sample::Sampler;
use crate::reduction::{self, Budget};
use crate::{auxint, polygon2d, Error, MomentResult, Normalize, Provenance};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;

/// Caps the rayon pool when set to a positive integer.
pub const MAX_THREADS_ENV: &str = "MEANDIST_MAX_THREADS";

#[derive(Debug, Parser)]
#[command(name = "meandist", version, about = "Distance moments in polytopes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// L^(p) of a Platonic solid or the ball.
    Moments(MomentsArgs),
    /// L^(p) of an arbitrary tetrahedron.
    Tetra(TetraArgs),
    /// L^(p) of a closed polyhedron by the general reduction.
    General(GeneralArgs),
    /// L^(p) of a regular polygon with circumradius 1.
    Polygon(PolygonArgs),
    /// The auxiliary integral I^(p)_ij(q, γ).
    Auxint(AuxintArgs),
    /// Compare a closed form against Monte Carlo.
    Verify(VerifyArgs),
    /// Reproduce the reference tables.
    Table(TableArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Markdown,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum NormalizeArg {
    #[default]
    None,
    Volume,
    V1,
}

impl From<NormalizeArg> for Normalize {
    fn from(n: NormalizeArg) -> Self {
        match n {
            NormalizeArg::None => Normalize::None,
            NormalizeArg::Volume => Normalize::UnitVolume,
            NormalizeArg::V1 => Normalize::UnitV1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    /// Mean distance at unit volume.
    UnitVolume,
    /// First intrinsic volume per unit edge.
    V1,
    /// Normalised mean distance L / V1 with the bounds.
    Normalised,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    /// Decimal places.
    #[arg(long, default_value_t = 12)]
    pub digits: usize,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    /// Solid name, `ball`, or `all`.
    #[arg(long)]
    pub solid: String,
    #[arg(long, allow_hyphen_values = true)]
    pub p: i32,
    #[arg(long, value_enum, default_value_t)]
    pub normalize: NormalizeArg,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct TetraArgs {
    /// Polytope JSON with four vertices.
    #[arg(long, conflicts_with = "vertices", required_unless_present = "vertices")]
    pub file: Option<PathBuf>,
    /// Inline vertices `x,y,z;x,y,z;x,y,z;x,y,z`.
    #[arg(long, allow_hyphen_values = true)]
    pub vertices: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub p: i32,
    #[arg(long, value_enum, default_value_t)]
    pub normalize: NormalizeArg,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct GeneralArgs {
    /// Polytope JSON.
    #[arg(long, conflicts_with = "solid", required_unless_present = "solid")]
    pub file: Option<PathBuf>,
    /// Catalog solid, run through the general reduction.
    #[arg(long)]
    pub solid: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub p: i32,
    #[arg(long, default_value_t = Budget::default().max_terms)]
    pub max_terms: usize,
    #[arg(long, default_value_t = Budget::default().mc_samples, value_parser = parse_count)]
    pub mc_samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Evaluate reduced terms on one thread.
    #[arg(long)]
    pub sequential: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct PolygonArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, allow_hyphen_values = true, required_unless_present = "limit")]
    pub p: Option<i32>,
    /// Also evaluate the cosine-polynomial form (even p from 2 to 14).
    #[arg(long)]
    pub closed_form: bool,
    /// Report the p → −2 limit and the disk asymptotics.
    #[arg(long)]
    pub limit: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct AuxintArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub p: i32,
    #[arg(long)]
    pub i: u32,
    #[arg(long)]
    pub j: u32,
    /// Expression, e.g. `sqrt(2)/4`.
    #[arg(long, allow_hyphen_values = true)]
    pub q: String,
    /// Expression, e.g. `2pi/5` or `atan(sqrt(5-2sqrt(5))/3)`.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: String,
    /// Also integrate numerically.
    #[arg(long)]
    pub check: bool,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    /// Significant digits.
    #[arg(long, default_value_t = 15)]
    pub digits: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Catalog solid or `ball`.
    #[arg(long, group = "target")]
    pub solid: Option<String>,
    /// Tetrahedron or polyhedron JSON.
    #[arg(long, group = "target")]
    pub file: Option<PathBuf>,
    /// Regular polygon with this many sides.
    #[arg(long, group = "target")]
    pub polygon: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub p: i32,
    /// Sample count; accepts `1e6`.
    #[arg(long, default_value_t = 1_000_000, value_parser = parse_count)]
    pub samples: u64,
    #[arg(long)]
    pub seed: u64,
    /// Agreement threshold in standard errors.
    #[arg(long, default_value_t = 4.0)]
    pub sigma: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long, value_enum)]
    pub which: Which,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    #[arg(long, default_value_t = 8)]
    pub digits: usize,
}

/// A rendered result: column headers and rows of cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(i64),
    /// A real rounded to a number of decimals.
    Fixed(f64, usize),
    /// A real rounded to a number of significant digits.
    Sig(f64, usize),
    Bool(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Fixed(x, d) => format_fixed(*x, *d),
            Cell::Sig(x, d) => format_sig(*x, *d),
            Cell::Bool(b) => if *b { "PASS" } else { "FAIL" }.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Int(i) => json!(i),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Fixed(..) | Cell::Sig(..) => {
                let s = self.render();
                match s.parse::<f64>().ok().and_then(serde_json::Number::from_f64) {
                    Some(n) => Value::Number(n),
                    None => Value::String(s),
                }
            }
        }
    }
}

/// Fixed-point rendering. Rust's float formatting is exact and breaks ties
/// to even, which is the rounding rule for all output.
pub fn format_fixed(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{x:.digits$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Rendering with `sig` significant digits.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format_fixed(x, sig.saturating_sub(1));
    }
    let mag = x.abs().log10().floor() as i64;
    if !(-5..=15).contains(&mag) {
        return format!("{:.*e}", sig.saturating_sub(1), x);
    }
    let decimals = (sig as i64 - 1 - mag).max(0) as usize;
    format_fixed(x, decimals)
}

impl Report {
    fn new(headers: &[&str]) -> Self {
        Self { headers: headers.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut m = Map::new();
                for (h, c) in self.headers.iter().zip(r) {
                    m.insert(h.clone(), c.json());
                }
                Value::Object(m)
            })
            .collect();
        Value::Array(rows)
    }

    pub fn render(&self, format: Format) -> String {
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Cell::render).collect()).collect();
        match format {
            Format::Text => {
                let mut widths: Vec<usize> = self.headers.iter().map(|h| h.chars().count()).collect();
                for r in &cells {
                    for (w, c) in widths.iter_mut().zip(r) {
                        *w = (*w).max(c.chars().count());
                    }
                }
                let line = |r: &[String]| {
                    let parts: Vec<String> = r.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
                    parts.join("  ").trim_end().to_string() + "\n"
                };
                // A single unnamed column is printed bare.
                let bare = self.headers.len() == 1 && self.headers[0].is_empty();
                let mut s = if bare { String::new() } else { line(&self.headers) };
                for r in &cells {
                    s += &line(r);
                }
                s
            }
            Format::Csv => {
                let esc = |c: &str| {
                    if c.contains([',', '"', '\n']) {
                        format!("\"{}\"", c.replace('"', "\"\""))
                    } else {
                        c.to_string()
                    }
                };
                let mut s = self.headers.iter().map(|h| esc(h)).collect::<Vec<_>>().join(",") + "\n";
                for r in &cells {
                    s += &(r.iter().map(|c| esc(c)).collect::<Vec<_>>().join(",") + "\n");
                }
                s
            }
            Format::Markdown => {
                let mut s = format!("| {} |\n", self.headers.join(" | "));
                s += &format!("|{}\n", "---|".repeat(self.headers.len()));
                for r in &cells {
                    s += &format!("| {} |\n", r.join(" | "));
                }
                s
            }
            Format::Json => serde_json::to_string_pretty(&self.to_json()).expect("JSON values always serialize") + "\n",
        }
    }
}

/// Evaluates an angle or length expression: numbers, `pi`, `phi`, `+ − * / ^`,
/// parentheses, implicit products such as `2pi` or `2sqrt(5)`, and the
/// functions `sqrt`, `sin`, `cos`, `tan`, `asin`, `acos`, `atan`, `ln`, `exp`.
pub fn parse_expr(src: &str) -> Result<f64, Error> {
    let mut p = ExprParser { s: src.as_bytes(), i: 0 };
    let v = p.sum()?;
    p.ws();
    if p.i != p.s.len() {
        return Err(p.err("unexpected input"));
    }
    if !v.is_finite() {
        return Err(Error::Input(format!("`{src}` is not finite")));
    }
    Ok(v)
}

struct ExprParser<'a> {
    s: &'a [u8],
    i: usize,
}

impl ExprParser<'_> {
    fn err(&self, what: &str) -> Error {
        Error::Input(format!("{what} at column {} of `{}`", self.i + 1, String::from_utf8_lossy(self.s)))
    }

    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.i).copied()
    }

    fn sum(&mut self) -> Result<f64, Error> {
        let mut v = self.product()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.i += 1;
            let r = self.product()?;
            v = if c == b'+' { v + r } else { v - r };
        }
        Ok(v)
    }

    fn product(&mut self) -> Result<f64, Error> {
        let mut v = self.unary()?;
        loop {
            match self.peek() {
                Some(c @ (b'*' | b'/')) => {
                    self.i += 1;
                    let r = self.unary()?;
                    v = if c == b'*' { v * r } else { v / r };
                }
                // Implicit product: `2pi`, `3(1+x)`, `2sqrt(5)`.
                Some(c) if c.is_ascii_alphabetic() || c == b'(' => v *= self.power()?,
                _ => return Ok(v),
            }
        }
    }

    fn unary(&mut self) -> Result<f64, Error> {
        match self.peek() {
            Some(b'-') => {
                self.i += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.i += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<f64, Error> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.i += 1;
            let e = self.unary()?;
            return Ok(base.powf(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<f64, Error> {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let v = self.sum()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.i += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.i;
                while self.i < self.s.len() && (self.s[self.i].is_ascii_digit() || self.s[self.i] == b'.') {
                    self.i += 1;
                }
                if self.i < self.s.len() && matches!(self.s[self.i], b'e' | b'E') {
                    let save = self.i;
                    self.i += 1;
                    if self.i < self.s.len() && matches!(self.s[self.i], b'+' | b'-') {
                        self.i += 1;
                    }
                    if self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
                            self.i += 1;
                        }
                    } else {
                        self.i = save;
                    }
                }
                let text = std::str::from_utf8(&self.s[start..self.i]).expect("ASCII slice");
                text.parse().map_err(|_| self.err("bad number"))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.i;
                while self.i < self.s.len() && self.s[self.i].is_ascii_alphabetic() {
                    self.i += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.i]).expect("ASCII slice").to_ascii_lowercase();
                match name.as_str() {
                    "pi" => return Ok(std::f64::consts::PI),
                    "phi" => return Ok(catalog::PHI),
                    _ => {}
                }
                let f: fn(f64) -> f64 = match name.as_str() {
                    "sqrt" => f64::sqrt,
                    "sin" => f64::sin,
                    "cos" => f64::cos,
                    "tan" => f64::tan,
                    "asin" | "arcsin" => f64::asin,
                    "acos" | "arccos" => f64::acos,
                    "atan" | "arctan" => f64::atan,
                    "ln" => f64::ln,
                    "exp" => f64::exp,
                    _ => {
                        self.i = start;
                        return Err(self.err(&format!("unknown name `{name}`")));
                    }
                };
                if self.peek() != Some(b'(') {
                    return Err(self.err("expected `(`"));
                }
                Ok(f(self.atom()?))
            }
            _ => Err(self.err("expected a number")),
        }
    }
}

/// Applies `MEANDIST_MAX_THREADS` to the global rayon pool. Invalid values
/// are ignored with a warning; repeated calls are harmless.
pub fn configure_threads() {
    let Ok(v) = std::env::var(MAX_THREADS_ENV) else { return };
    match v.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            #[cfg(feature = "parallel")]
            if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
                log::debug!("rayon pool already initialised");
            }
            #[cfg(not(feature = "parallel"))]
            let _ = n;
        }
        _ => log::warn!("ignoring {MAX_THREADS_ENV}={v}"),
    }
}

/// Parses `argv` and runs one command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    configure_threads();
    match execute(&cli.command) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn execute(cmd: &Command) -> Result<(String, i32), Error> {
    match cmd {
        Command::Moments(a) => moments(a).map(|r| (r.render(a.output.format), EXIT_OK)),
        Command::Tetra(a) => tetra(a).map(|r| (r.render(a.output.format), EXIT_OK)),
        Command::General(a) => general(a).map(|r| (r.render(a.output.format), EXIT_OK)),
        Command::Polygon(a) => polygon(a).map(|r| (r.render(a.output.format), EXIT_OK)),
        Command::Auxint(a) => auxint_cmd(a).map(|r| (r.render(a.format), EXIT_OK)),
        Command::Verify(a) => {
            let (r, pass) = verify(a)?;
            Ok((r.render(a.output.format), if pass { EXIT_OK } else { EXIT_VERIFY_FAILED }))
        }
        Command::Table(a) => table(a.which, a.digits).map(|r| (r.render(a.format), EXIT_OK)),
    }
}

fn read_polytope(path: &PathBuf) -> Result<Polytope, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    Polytope::from_json(&text)
}

fn tetra_vertices(k: &Polytope) -> Result<[P3; 4], Error> {
    if k.dim_intrinsic != 3 || k.vertices.len() != 4 {
        return Err(Error::Input(format!("expected a tetrahedron, got {} vertices", k.vertices.len())));
    }
    Ok([k.vertices[0], k.vertices[1], k.vertices[2], k.vertices[3]])
}

/// A non-negative integer count, written plainly or as `1e6`.
fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x <= 2f64.powi(53) => Ok(x as u64),
        _ => Err(format!("`{s}` is not a whole count")),
    }
}

fn parse_vertices(s: &str) -> Result<[P3; 4], Error> {
    let pts: Vec<P3> = s
        .split(';')
        .map(|v| {
            let c: Vec<f64> = v.split(',').map(|x| x.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|e| Error::Input(format!("bad coordinate in `{v}`: {e}")))?;
            if c.len() != 3 {
                return Err(Error::Input(format!("vertex `{v}` needs three coordinates")));
            }
            Ok(P3::new(c[0], c[1], c[2]))
        })
        .collect::<Result<_, _>>()?;
    pts.try_into().map_err(|v: Vec<P3>| Error::Input(format!("a tetrahedron needs 4 vertices, got {}", v.len())))
}

fn moment_row(name: &str, p: i32, r: &MomentResult, digits: usize) -> Vec<Cell> {
    vec![
        Cell::Text(name.to_string()),
        Cell::Int(p as i64),
        Cell::Fixed(r.value, digits),
        Cell::Sig(r.error, 3),
        Cell::Text(r.provenance_label()),
    ]
}

const MOMENT_HEADERS: [&str; 5] = ["solid", "p", "value", "error", "provenance"];

fn single_value(report: Report, value_col: usize, prov_col: Option<usize>, format: Format) -> Report {
    // Text output of a single value is just `value (provenance)`.
    if format != Format::Text || report.rows.len() != 1 {
        return report;
    }
    let row = &report.rows[0];
    let mut text = row[value_col].render();
    if let Some(c) = prov_col {
        text = format!("{text} ({})", row[c].render());
    }
    Report { headers: vec![String::new()], rows: vec![vec![Cell::Text(text)]] }
}

fn moments(a: &MomentsArgs) -> Result<Report, Error> {
    let normalize = Normalize::from(a.normalize);
    let names: Vec<String> = if a.solid.eq_ignore_ascii_case("all") {
        Solid::ALL.iter().map(|s| s.name().to_string()).chain(["ball".to_string()]).collect()
    } else {
        vec![a.solid.clone()]
    };
    let mut rep = Report::new(&MOMENT_HEADERS);
    for name in &names {
        let r = if name.eq_ignore_ascii_case("ball") {
            MomentResult::closed_form(catalog::ball_moment(a.p, normalize)?)
        } else {
            catalog::platonic_moment(name, a.p, normalize)?
        };
        let canonical = if name.eq_ignore_ascii_case("ball") { "ball".to_string() } else { name.parse::<Solid>()?.name().to_string() };
        rep.push(moment_row(&canonical, a.p, &r, a.output.digits));
    }
    Ok(single_value(rep, 2, Some(4), a.output.format))
}

fn tetra(a: &TetraArgs) -> Result<Report, Error> {
    let v = match (&a.file, &a.vertices) {
        (Some(f), _) => tetra_vertices(&read_polytope(f)?)?,
        (None, Some(s)) => parse_vertices(s)?,
        (None, None) => return Err(Error::Input("give --file or --vertices".into())),
    };
    let raw = reduction::tetrahedron_moment(&v, a.p)?;
    let k = Polytope::tetrahedron(v)?;
    let normalize = Normalize::from(a.normalize);
    let v1 = if normalize == Normalize::UnitV1 { crate::geom::first_intrinsic_volume(&k)? } else { 1.0 };
    let value = catalog::normalize_moment(raw, a.p, k.measure()?, v1, normalize);
    let mut rep = Report::new(&MOMENT_HEADERS);
    rep.push(moment_row("tetrahedron", a.p, &MomentResult::closed_form(value), a.output.digits));
    Ok(single_value(rep, 2, Some(4), a.output.format))
}

fn general(a: &GeneralArgs) -> Result<Report, Error> {
    let (name, k) = match (&a.file, &a.solid) {
        (Some(f), _) => (f.display().to_string(), read_polytope(f)?),
        (None, Some(s)) => {
            let r = catalog::get_recipe(s)?;
            (r.name().to_string(), r.polytope)
        }
        (None, None) => return Err(Error::Input("give --file or --solid".into())),
    };
    let budget = Budget { max_terms: a.max_terms, mc_samples: a.mc_samples, seed: a.seed };
    let weights = reduction::default_basic_weights(&k)?;
    let exec = if a.sequential { Exec::Sequential } else { Exec::Parallel };
    let r = reduction::general_moment_with(&k, a.p, &budget, &weights, exec)?;
    let mut rep = Report::new(&MOMENT_HEADERS);
    rep.push(moment_row(&name, a.p, &r, a.output.digits));
    Ok(single_value(rep, 2, Some(4), a.output.format))
}

fn polygon(a: &PolygonArgs) -> Result<Report, Error> {
    let d = a.output.digits;
    if a.limit {
        let l = polygon2d::polygon_limit_checks(a.n)?;
        let mut rep = Report::new(&["quantity", "value"]);
        let mut kv = |k: &str, v: f64| rep.push(vec![Cell::Text(k.into()), Cell::Fixed(v, d)]);
        kv("limit_p_minus2", l.limit_minus2);
        kv("limit_p_minus2_reduction", l.limit_minus2_reduction);
        kv("limit_p_minus2_area", l.limit_minus2_area);
        kv("disk_mean", l.disk_mean);
        kv("asymptotic_mean", l.asymptotic_mean);
        kv("mean", l.mean);
        if let Some(p) = a.p {
            kv("disk_moment", polygon2d::disk_moment(p as f64));
        }
        return Ok(rep);
    }
    let p = a.p.ok_or_else(|| Error::Input("--p is required without --limit".into()))?;
    let value = polygon2d::polygon_moment(a.n, p)?;
    if a.closed_form {
        let closed = polygon2d::even_moment_closed(a.n, p)?;
        let mut rep = Report::new(&["n", "p", "reduction", "closed_form", "difference"]);
        rep.push(vec![Cell::Int(a.n as i64), Cell::Int(p as i64), Cell::Fixed(value, d), Cell::Fixed(closed, d), Cell::Sig(closed - value, 3)]);
        return Ok(rep);
    }
    let mut rep = Report::new(&["n", "p", "value", "provenance"]);
    rep.push(vec![Cell::Int(a.n as i64), Cell::Int(p as i64), Cell::Fixed(value, d), Cell::Text(Provenance::ClosedForm.to_string())]);
    Ok(single_value(rep, 2, Some(3), a.output.format))
}

fn auxint_cmd(a: &AuxintArgs) -> Result<Report, Error> {
    let q = parse_expr(&a.q)?;
    let gamma = parse_expr(&a.gamma)?;
    let v = auxint::i(a.p, a.i, a.j, q, gamma)?;
    let sig = a.digits;
    if !a.check {
        let mut rep = Report::new(&["p", "i", "j", "q", "gamma", "value"]);
        rep.push(vec![Cell::Int(a.p as i64), Cell::Int(a.i as i64), Cell::Int(a.j as i64), Cell::Sig(q, sig), Cell::Sig(gamma, sig), Cell::Sig(v.value, sig)]);
        return Ok(single_value(rep, 5, None, a.format));
    }
    let quad = crate::oracle::quad::quad2d(
        |x, y| x.powi(a.i as i32) * y.powi(a.j as i32) * crate::auxint::pow_half(1.0 + x * x + y * y, a.p),
        &[crate::oracle::quad::Triangle([0.0, 0.0], [q, 0.0], [q, q * gamma.tan()])],
        1e-13,
    )?;
    let mut rep = Report::new(&["p", "i", "j", "q", "gamma", "value", "quadrature", "difference"]);
    rep.push(vec![
        Cell::Int(a.p as i64),
        Cell::Int(a.i as i64),
        Cell::Int(a.j as i64),
        Cell::Sig(q, sig),
        Cell::Sig(gamma, sig),
        Cell::Sig(v.value, sig),
        Cell::Sig(quad.value, sig),
        Cell::Sig(v.value - quad.value, 3),
    ]);
    Ok(rep)
}

fn verify(a: &VerifyArgs) -> Result<(Report, bool), Error> {
    if a.samples < 2 {
        return Err(Error::Input("--samples must be at least 2".into()));
    }
    let (name, closed, est): (String, f64, McEstimate) = match (&a.solid, &a.file, a.polygon) {
        (Some(s), _, _) if s.eq_ignore_ascii_case("ball") => {
            let v = catalog::ball_moment(a.p, Normalize::None)?;
            let b = Sampler::ball(P3::zeros(), 1.0);
            ("ball".into(), v, mc::estimate_moments(&b, &b, &[a.p], a.samples, a.seed)[0])
        }
        (Some(s), _, _) => {
            let r = catalog::get_recipe(s)?;
            let v = catalog::platonic_moment(s, a.p, Normalize::None)?.value;
            (r.name().to_string(), v, mc::estimate_moment(&r.polytope, &r.polytope, a.p, a.samples, a.seed)?)
        }
        (None, Some(f), _) => {
            let k = read_polytope(f)?;
            let v = if k.dim_intrinsic == 3 && k.vertices.len() == 4 {
                reduction::tetrahedron_moment(&tetra_vertices(&k)?, a.p)?
            } else {
                reduction::general_moment(&k, a.p, &Budget { seed: a.seed, ..Budget::default() })?.value
            };
            (f.display().to_string(), v, mc::estimate_moment(&k, &k, a.p, a.samples, a.seed)?)
        }
        (None, None, Some(n)) => {
            let v = polygon2d::polygon_moment(n, a.p)?;
            let verts: Vec<[f64; 2]> = (0..n)
                .map(|i| {
                    let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                    [t.cos(), t.sin()]
                })
                .collect();
            // The inner integral is done exactly so that p = −1 keeps a finite variance.
            let est = mc::estimate_planar_self_moment(&Polytope::polygon2(&verts)?, a.p, a.samples, a.seed)?;
            (format!("{n}-gon"), v, est)
        }
        _ => return Err(Error::Input("give one of --solid, --file or --polygon".into())),
    };
    let pass = est.agrees(closed, a.sigma);
    let d = a.output.digits;
    let mut rep = Report::new(&["target", "p", "closed_form", "monte_carlo", "stderr", "z", "samples", "seed", "result"]);
    rep.push(vec![
        Cell::Text(name),
        Cell::Int(a.p as i64),
        Cell::Fixed(closed, d),
        Cell::Fixed(est.mean, d),
        Cell::Sig(est.stderr, 3),
        Cell::Fixed(est.z(closed), 2),
        Cell::Int(a.samples as i64),
        Cell::Text(a.seed.to_string()),
        Cell::Bool(pass),
    ]);
    Ok((rep, pass))
}

/// The reference tables, computed from the closed forms.
pub fn table(which: Which, digits: usize) -> Result<Report, Error> {
    let fx = |x: f64| Cell::Fixed(x, digits);
    match which {
        Which::UnitVolume => {
            let mut rep = Report::new(&["solid", "mean_distance"]);
            rep.push(vec![Cell::Text("ball".into()), fx(catalog::ball_moment(1, Normalize::UnitVolume)?)]);
            for s in [Solid::Icosahedron, Solid::Dodecahedron, Solid::Octahedron, Solid::Cube, Solid::Tetrahedron] {
                rep.push(vec![Cell::Text(s.name().into()), fx(catalog::platonic_moment(s.name(), 1, Normalize::UnitVolume)?.value)]);
            }
            Ok(rep)
        }
        Which::V1 => {
            let mut rep = Report::new(&["solid", "v1_per_edge"]);
            for s in [Solid::Tetrahedron, Solid::Cube, Solid::Octahedron, Solid::Dodecahedron, Solid::Icosahedron] {
                let r = catalog::recipe(s);
                rep.push(vec![Cell::Text(s.name().into()), fx(r.first_intrinsic_volume() / r.edge)]);
            }
            Ok(rep)
        }
        Which::Normalised => {
            let refs = catalog::reference();
            let mut rep = Report::new(&["solid", "gamma"]);
            rep.push(vec![Cell::Text("lower bound".into()), fx(refs.gamma_lower)]);
            for s in [Solid::Tetrahedron, Solid::Octahedron, Solid::Cube, Solid::Icosahedron, Solid::Dodecahedron] {
                rep.push(vec![Cell::Text(s.name().into()), fx(catalog::platonic_moment(s.name(), 1, Normalize::UnitV1)?.value)]);
            }
            rep.push(vec![Cell::Text("ball".into()), fx(catalog::ball_moment(1, Normalize::UnitV1)?)]);
            rep.push(vec![Cell::Text("upper bound".into()), fx(refs.gamma_upper)]);
            Ok(rep)
        }
    }
}
