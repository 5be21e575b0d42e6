//! `anning`: triple points, integer-weight enumeration, constructions,
//! property suites and SVG rendering from the command line.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 domain error,
//! 3 failed assertion (bound check or property suite).

use std::fmt;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anning_core::constructions::{
    grid_set, norm_for_integer_distances, pythagorean_circle_set, PythagoreanTriple,
};
use anning_core::enumerate::{enumerate_candidates, TriangleSpec};
use anning_core::io::{rational_set_json, to_json_string, parse_point_set, PointSetJson};
use anning_core::render::{render_svg, RenderSpec};
use anning_core::surface::{cone_distance, cone_equilateral_set, ConePoint};
use anning_core::verify::{run_suite, Suite, SuiteReport};
use anning_core::{
    triple_points, Diagram, DistanceField, Point, Rect, SolverConfig, WeightedSite,
};
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "anning", version, about = "Weighted Voronoi diagrams and integer-distance sets")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Distance field JSON, overriding the one in the input document.
    #[arg(long, global = true, value_name = "FILE")]
    field: Option<PathBuf>,
    /// Write the JSON result here instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Also write an SVG picture.
    #[arg(long, global = true, value_name = "FILE")]
    svg: Option<PathBuf>,
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Residual tolerance of the triple-point solver.
    #[arg(long, global = true, value_name = "X")]
    tol: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Points equidistant from three weighted sites.
    Triple {
        /// Diagram JSON (`-` for standard input).
        input: PathBuf,
    },
    /// Sweep integer weights over a triangle and report every triple point.
    Enumerate {
        /// Triangle JSON (`-` for standard input).
        input: PathBuf,
        /// Exit 3 if the candidate count exceeds the bound.
        #[arg(long)]
        assert_bound: bool,
    },
    /// Build an integer-distance point set or norm.
    #[command(subcommand)]
    Construct(Construct),
    /// Run a named property suite.
    Verify {
        /// One of star, lipschitz, non-overlap, triple-cap, torus-cap, cone,
        /// constructions, or `all`.
        #[arg(long)]
        suite: String,
    },
    /// Rasterize a diagram to SVG.
    Render {
        input: PathBuf,
        /// `minx,miny,maxx,maxy`; defaults to a padded box around the sites.
        #[arg(long, value_parser = parse_bbox, allow_hyphen_values = true)]
        bbox: Option<Rect>,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        grid: bool,
        #[arg(long)]
        no_rays: bool,
        /// Overlay the triple points of a three-site diagram.
        #[arg(long)]
        triple: bool,
    },
}

#[derive(Subcommand, Debug)]
enum Construct {
    /// Rational points on the unit circle from powers of `(a + bi)/c`.
    Pythagorean {
        #[arg(long)]
        a: u64,
        #[arg(long)]
        b: u64,
        #[arg(long)]
        c: u64,
        #[arg(long)]
        n: usize,
        /// Include the origin.
        #[arg(long)]
        center: bool,
        /// Multiply by the common denominator.
        #[arg(long)]
        scaled: bool,
        /// Emit coordinates as exact rational strings.
        #[arg(long)]
        exact: bool,
    },
    /// The `n×n` integer grid.
    Grid {
        #[arg(long)]
        n: usize,
    },
    /// A strictly convex norm under which the given points have integer
    /// distances after scaling.
    NormForSet {
        /// Point set JSON; omit to use `--random`.
        input: Option<PathBuf>,
        /// Use this many seeded random points in the unit square.
        #[arg(long, conflicts_with = "input")]
        random: Option<usize>,
    },
    /// `k` points on the infinite cone at mutual distance 1.
    ConeEquilateral {
        #[arg(long)]
        k: usize,
    },
}

enum Failure {
    Usage(String),
    Domain(anning_core::Error),
    Assertion(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Domain(_) => 2,
            Failure::Assertion(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Assertion(m) => f.write_str(m),
            Failure::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl From<anning_core::Error> for Failure {
    fn from(e: anning_core::Error) -> Self {
        Failure::Domain(e)
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let g = &cli.global;
    match &cli.command {
        Command::Triple { input } => cmd_triple(g, input),
        Command::Enumerate { input, assert_bound } => cmd_enumerate(g, input, *assert_bound),
        Command::Construct(c) => cmd_construct(g, c),
        Command::Verify { suite } => cmd_verify(g, suite),
        Command::Render {
            input,
            bbox,
            resolution,
            grid,
            no_rays,
            triple,
        } => {
            let (diagram, spec) = load_diagram(g, input)?;
            let mut spec = spec.unwrap_or_else(|| RenderSpec::new(auto_bbox(diagram.sites().iter().map(|s| s.point))));
            if let Some(b) = bbox {
                spec.bbox = *b;
            }
            if let Some(r) = resolution {
                spec.resolution = *r;
            }
            spec.show.grid |= *grid;
            spec.show.rays &= !*no_rays;
            let overlay = if *triple {
                let sites: &[WeightedSite; 3] = diagram.sites().try_into().map_err(|_| {
                    Failure::Usage(format!("--triple needs 3 sites, got {}", diagram.len()))
                })?;
                triple_points(diagram.field(), sites, &solver(g))?.points
            } else {
                Vec::new()
            };
            let svg = render_svg(&diagram, &spec, &overlay)?;
            let target = g.svg.as_ref().or(g.out.as_ref());
            write_output(target.map(PathBuf::as_path), &svg)
        }
    }
}

fn solver(g: &Global) -> SolverConfig {
    let mut cfg = SolverConfig::default();
    if let Some(t) = g.tol {
        cfg.residual_tol = t;
    }
    cfg
}

fn read_input(path: &Path) -> CliResult<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Usage(format!("reading standard input: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &Path) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| Failure::Usage(format!("{}: {e}", what.display())))
}

fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Usage(format!("writing standard output: {e}"))),
    }
}

fn emit<T: Serialize>(g: &Global, value: &T) -> CliResult<()> {
    write_output(g.out.as_deref(), &to_json_string(value)?)
}

/// Field from `--field`, else from the document, else the Euclidean plane.
fn resolve_field(g: &Global, from_doc: Option<DistanceField>) -> CliResult<DistanceField> {
    if let Some(path) = &g.field {
        return parse_json(&read_input(path)?, path);
    }
    Ok(from_doc.unwrap_or_else(DistanceField::euclidean))
}

#[derive(Deserialize)]
struct DiagramInput {
    #[serde(default)]
    field: Option<DistanceField>,
    sites: Vec<WeightedSite>,
    #[serde(default)]
    render: Option<RenderSpec>,
}

fn load_diagram(g: &Global, path: &Path) -> CliResult<(Diagram, Option<RenderSpec>)> {
    let doc: DiagramInput = parse_json(&read_input(path)?, path)?;
    let field = resolve_field(g, doc.field)?;
    Ok((Diagram::new(field, doc.sites)?, doc.render))
}

/// Square box around `points`, padded by a quarter of its size.
fn auto_bbox(points: impl IntoIterator<Item = Point>) -> Rect {
    let (mut lo, mut hi) = (Point::new(f64::INFINITY, f64::INFINITY), Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for p in points.into_iter().filter(|p| p.is_finite()) {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    if !lo.is_finite() {
        return Rect::centered(Point::ORIGIN, 1.0);
    }
    let half = 0.5 * (hi.x - lo.x).max(hi.y - lo.y).max(1.0) * 1.5;
    Rect::centered(lo.lerp(hi, 0.5), half)
}

fn parse_bbox(s: &str) -> Result<Rect, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}")))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [x0, y0, x1, y1] if x0 < x1 && y0 < y1 => Ok(Rect::new(Point::new(x0, y0), Point::new(x1, y1))),
        [_, _, _, _] => Err("need minx < maxx and miny < maxy".into()),
        _ => Err("expected minx,miny,maxx,maxy".into()),
    }
}

fn cmd_triple(g: &Global, input: &Path) -> CliResult<()> {
    let (diagram, spec) = load_diagram(g, input)?;
    let sites: &[WeightedSite; 3] = diagram
        .sites()
        .try_into()
        .map_err(|_| Failure::Usage(format!("expected exactly 3 sites, got {}", diagram.len())))?;
    let set = triple_points(diagram.field(), sites, &solver(g))?;
    if let Some(svg_path) = &g.svg {
        let spec = spec.unwrap_or_else(|| {
            RenderSpec::new(auto_bbox(sites.iter().map(|s| s.point).chain(set.points.iter().copied())))
        });
        let svg = render_svg(&diagram, &spec, &set.points)?;
        write_output(Some(svg_path), &svg)?;
    }
    emit(g, &set)
}

#[derive(Deserialize)]
struct TriangleInput {
    #[serde(default)]
    field: Option<DistanceField>,
    s1: Point,
    s2: Point,
    s3: Point,
}

fn cmd_enumerate(g: &Global, input: &Path, assert_bound: bool) -> CliResult<()> {
    let doc: TriangleInput = parse_json(&read_input(input)?, input)?;
    let field = resolve_field(g, doc.field)?;
    let triangle = TriangleSpec::new(field, doc.s1, doc.s2, doc.s3)?;
    let report = enumerate_candidates(&triangle, &solver(g))?;
    if let Some(svg_path) = &g.svg {
        let sites = triangle.points().map(|p| WeightedSite::new(p, 0.0)).to_vec();
        let diagram = Diagram::new(triangle.field.clone(), sites)?;
        let pts: Vec<Point> = report.integer_points.iter().map(|c| c.point()).collect();
        let spec = RenderSpec::new(auto_bbox(triangle.points().into_iter().chain(pts.iter().copied())));
        write_output(Some(svg_path), &render_svg(&diagram, &spec, &pts)?)?;
    }
    emit(g, &report)?;
    if assert_bound && !report.within_bound() {
        return Err(Failure::Assertion(format!(
            "{} candidates exceed the bound {}",
            report.candidates.len(),
            report.bound
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct ConeSetJson {
    points: Vec<ConePoint>,
    distances: Vec<Vec<f64>>,
}

fn cmd_construct(g: &Global, c: &Construct) -> CliResult<()> {
    match c {
        Construct::Pythagorean {
            a,
            b,
            c,
            n,
            center,
            scaled,
            exact,
        } => {
            let triple = PythagoreanTriple::new(*a, *b, *c)?;
            let set = pythagorean_circle_set(triple, *n, *center)?;
            emit(g, &rational_set_json(&set, *scaled, *exact)?)
        }
        Construct::Grid { n } => emit(g, &PointSetJson::from_points(&grid_set(*n)?)),
        Construct::NormForSet { input, random } => {
            let points = match (input, random) {
                (Some(path), _) => parse_point_set(&read_input(path)?).map_err(|e| {
                    Failure::Usage(format!("{}: {e}", path.display()))
                })?,
                (None, Some(k)) => {
                    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(g.seed.unwrap_or(42));
                    (0..*k)
                        .map(|_| Point::new(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)))
                        .collect()
                }
                (None, None) => {
                    return Err(Failure::Usage("give a point set file or --random N".into()))
                }
            };
            emit(g, &norm_for_integer_distances(&points)?)
        }
        Construct::ConeEquilateral { k } => {
            let points = cone_equilateral_set(*k)?;
            let distances = points
                .iter()
                .map(|&p| points.iter().map(|&q| if p == q { Ok(0.0) } else { cone_distance(p, q) }).collect())
                .collect::<Result<_, _>>()?;
            emit(g, &ConeSetJson { points, distances })
        }
    }
}

fn cmd_verify(g: &Global, name: &str) -> CliResult<()> {
    let suites: Vec<Suite> = if name == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![name.parse().map_err(|e: anning_core::Error| Failure::Usage(e.to_string()))?]
    };
    let seed = g.seed.unwrap_or(0);
    let reports: Vec<SuiteReport> = suites.into_iter().map(|s| run_suite(s, seed)).collect();
    let mut text = String::new();
    for r in &reports {
        for p in &r.properties {
            text.push_str(&format!(
                "{} {}/{} checked={} failures={}{}\n",
                if p.passed { "PASS" } else { "FAIL" },
                r.suite,
                p.name,
                p.checked,
                p.failures,
                if p.detail.is_empty() { String::new() } else { format!(" ({})", p.detail) },
            ));
        }
    }
    write_output(None, &text)?;
    if let Some(out) = &g.out {
        write_output(Some(out), &to_json_string(&reports)?)?;
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    if failed > 0 {
        return Err(Failure::Assertion(format!("{failed} suite(s) failed")));
    }
    Ok(())
}
