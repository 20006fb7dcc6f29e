//! The `figint` command line.
//!
//! ```text
//! figint green --region disk:4096 --field rot --levels 4..9
//! figint gauss --region icosphere:4 --field radial --levels 3..6 --output x1.csv
//! figint jordan --config run.cfg --levels 5..8
//! ```
//!
//! Every option may also come from a `key = value` file given by `--config`;
//! keys are the long flag names, and `[section]` headers restrict the keys
//! below them to the command of that name (`[run]` applies to all). A flag on
//! the command line wins over the file.
//!
//! The CSV report goes to `--output` or, without it, to standard output.
//! The last line on standard output is always the `PASS`/`FAIL` summary.
//! Exit status is 0 on pass, 1 on fail and 2 on a usage or input error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::fields::{catalog, parse_field, CatalogField};
use crate::gauss3d::{cube, gauss_verify, icosphere, read_mesh, Box3, GaussParams, TriMesh};
use crate::geom2d::Rect;
use crate::integral::{jordan_content, Levels, CSV_SCHEMA};
use crate::quadrature::QuadratureSpec;
use crate::region2d::{disk, lshape, read_curve, square, Curve};
use crate::verify::{additivity_study, green_verify, VerifyParams, ADDITIVITY_COLUMNS};

#[derive(Debug, Parser)]
#[command(name = "figint", version, about = "Figure integrals and Green/Gauss checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Inner and outer Jordan content of a planar region.
    Jordan(RunArgs),
    /// Line integral against the circulation figure integral.
    Green(RunArgs),
    /// Surface flux against the voxel flux figure integral.
    Gauss(RunArgs),
    /// Split random rectangles at panel lines and report the worst defect.
    Additivity(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Study {
    Jordan,
    Green,
    Gauss,
    Additivity,
}

impl Study {
    fn name(self) -> &'static str {
        match self {
            Study::Jordan => "jordan",
            Study::Green => "green",
            Study::Gauss => "gauss",
            Study::Additivity => "additivity",
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
struct RunArgs {
    /// square, disk:N, lshape, icosphere:D, cube or file:PATH.
    #[arg(long)]
    region: Option<String>,
    /// Field spec, e.g. rot or weier:a=0.5,b=3,K=30.
    #[arg(long)]
    field: Option<String>,
    /// Refinement levels as MIN..MAX.
    #[arg(long)]
    levels: Option<String>,
    #[arg(long)]
    tol_line: Option<f64>,
    #[arg(long)]
    tol_figure: Option<f64>,
    /// Gauss-Legendre nodes per panel.
    #[arg(long)]
    order: Option<usize>,
    /// Panel width.
    #[arg(long)]
    h_q: Option<f64>,
    /// Longest polyline segment for line integrals.
    #[arg(long)]
    max_seg: Option<f64>,
    /// Triangle subdivision depth for surface fluxes.
    #[arg(long)]
    refine_depth: Option<u32>,
    /// Grid bounds: x0,x1,y0,y1 (and z0,z1 for gauss).
    #[arg(long)]
    bbox: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Largest defect the additivity study accepts.
    #[arg(long)]
    tol_additivity: Option<f64>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker threads; output does not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Where the region comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum RegionSource {
    Square,
    Disk(usize),
    LShape,
    Icosphere(u32),
    Cube,
    File(PathBuf),
}

impl RegionSource {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let int = |a: Option<&str>, what: &str| -> Result<u64> {
            a.ok_or_else(|| Error::validation(format!("region `{name}` needs {what}")))?
                .parse()
                .map_err(|_| Error::validation(format!("region `{s}`: {what} must be an integer")))
        };
        Ok(match name {
            "square" => RegionSource::Square,
            "lshape" => RegionSource::LShape,
            "cube" => RegionSource::Cube,
            "disk" => RegionSource::Disk(int(arg, "a vertex count")? as usize),
            "icosphere" => RegionSource::Icosphere(int(arg, "a depth")? as u32),
            "file" => RegionSource::File(PathBuf::from(
                arg.filter(|p| !p.is_empty())
                    .ok_or_else(|| Error::validation("region `file` needs a path"))?,
            )),
            _ => return Err(Error::validation(format!("unknown region `{s}`"))),
        })
    }

    fn label(&self) -> String {
        match self {
            RegionSource::Square => "square".into(),
            RegionSource::Disk(n) => format!("disk:{n}"),
            RegionSource::LShape => "lshape".into(),
            RegionSource::Icosphere(d) => format!("icosphere:{d}"),
            RegionSource::Cube => "cube".into(),
            RegionSource::File(p) => format!("file:{}", p.display()),
        }
    }

    fn is_generator(&self) -> bool {
        !matches!(self, RegionSource::File(_))
    }

    /// The planar curve for this source.
    pub fn curve(&self) -> Result<Curve> {
        match self {
            RegionSource::Square => Ok(square(0.0, 0.0, 1.0)),
            RegionSource::Disk(n) => disk(0.0, 0.0, 1.0, *n),
            RegionSource::LShape => Ok(lshape()),
            RegionSource::File(p) => read_curve(p),
            other => Err(Error::validation(format!("`{}` is not a planar region", other.label()))),
        }
    }

    /// The closed mesh for this source.
    pub fn mesh(&self) -> Result<TriMesh> {
        match self {
            RegionSource::Icosphere(d) if *d <= 7 => Ok(icosphere(*d)),
            RegionSource::Icosphere(d) => Err(Error::domain(format!("icosphere depth {d} exceeds 7"))),
            RegionSource::Cube => Ok(cube([-0.5; 3], 1.0)),
            RegionSource::File(p) => read_mesh(p),
            other => Err(Error::validation(format!("`{}` is not a closed surface", other.label()))),
        }
    }
}

/// Fully resolved run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub study: Study,
    pub region: RegionSource,
    /// `None` runs every catalog field (additivity only).
    pub field: Option<String>,
    pub levels: Levels,
    pub tol_line: f64,
    pub tol_figure: Option<f64>,
    pub order: usize,
    pub h_q: Option<f64>,
    pub max_seg: f64,
    pub refine_depth: u32,
    pub bbox: Option<Vec<f64>>,
    pub samples: usize,
    pub seed: u64,
    pub tol_additivity: f64,
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl RunConfig {
    /// Defaults for `study`.
    pub fn new(study: Study) -> Self {
        let (region, field, levels) = match study {
            Study::Jordan => (RegionSource::Disk(4096), None, (4, 9)),
            Study::Green => (RegionSource::Disk(4096), Some("rot"), (4, 9)),
            Study::Gauss => (RegionSource::Icosphere(4), Some("radial"), (3, 6)),
            Study::Additivity => (RegionSource::Square, None, (1, 1)),
        };
        RunConfig {
            study,
            region,
            field: field.map(str::to_string),
            levels: Levels::new(levels.0, levels.1).expect("default levels are valid"),
            tol_line: 1e-4,
            tol_figure: None,
            order: QuadratureSpec::DEFAULT_ORDER,
            h_q: None,
            max_seg: 1e-4,
            refine_depth: 2,
            bbox: None,
            samples: 1000,
            seed: 1,
            tol_additivity: 1e-10,
            output: None,
            threads: None,
        }
    }

    /// Apply `key = value` settings, as read from a config file or flags.
    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let num = |v: &str| -> Result<f64> {
            v.parse::<f64>()
                .map_err(|_| Error::validation(format!("`{key}` expects a number, got `{v}`")))
        };
        let int = |v: &str| -> Result<u64> {
            v.parse::<u64>()
                .map_err(|_| Error::validation(format!("`{key}` expects a non-negative integer, got `{v}`")))
        };
        match key {
            "region" => self.region = RegionSource::parse(value)?,
            "field" => self.field = Some(value.to_string()),
            "levels" => self.levels = parse_levels(value)?,
            "tol-line" => self.tol_line = positive(key, num(value)?)?,
            "tol-figure" => self.tol_figure = Some(positive(key, num(value)?)?),
            "order" => self.order = int(value)? as usize,
            "h-q" => self.h_q = Some(positive(key, num(value)?)?),
            "max-seg" => self.max_seg = positive(key, num(value)?)?,
            "refine-depth" => self.refine_depth = int(value)? as u32,
            "bbox" => {
                self.bbox = Some(
                    value
                        .split(',')
                        .map(|t| num(t.trim()))
                        .collect::<Result<Vec<_>>>()?,
                )
            }
            "samples" => self.samples = int(value)? as usize,
            "seed" => self.seed = int(value)?,
            "tol-additivity" => self.tol_additivity = positive(key, num(value)?)?,
            "output" => self.output = Some(PathBuf::from(value)),
            "threads" => {
                let n = int(value)? as usize;
                if n == 0 {
                    return Err(Error::validation("`threads` must be at least 1"));
                }
                self.threads = Some(n);
            }
            _ => return Err(Error::validation(format!("unknown setting `{key}`"))),
        }
        Ok(())
    }

    fn rect_bounds(&self) -> Result<Option<Rect>> {
        match self.bbox.as_deref() {
            None => Ok(None),
            Some(&[x0, x1, y0, y1]) => Ok(Some(Rect::new(x0, x1, y0, y1)?)),
            Some(_) => Err(Error::validation("bbox needs four numbers x0,x1,y0,y1")),
        }
    }

    fn box_bounds(&self) -> Result<Option<Box3>> {
        match self.bbox.as_deref() {
            None => Ok(None),
            Some(&[x0, x1, y0, y1, z0, z1]) => Ok(Some(Box3::new([x0, y0, z0], [x1, y1, z1])?)),
            Some(_) => Err(Error::validation("bbox needs six numbers x0,x1,y0,y1,z0,z1")),
        }
    }

    /// Generated regions are measured on the fixed box `[-2, 2]^d`; files
    /// get the default box around their extent.
    fn generator_box(&self) -> bool {
        self.bbox.is_none() && self.region.is_generator()
    }
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::validation(format!("`{key}` must be > 0, got {v}")))
    }
}

/// `MIN..MAX` or `MIN..=MAX`.
pub fn parse_levels(s: &str) -> Result<Levels> {
    let (a, b) = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .ok_or_else(|| Error::validation(format!("levels `{s}` must look like MIN..MAX")))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<u32>()
            .map_err(|_| Error::validation(format!("levels `{s}`: `{t}` is not a level")))
    };
    Levels::new(parse(a)?, parse(b)?)
}

/// Settings from a config file, in file order, keeping only the keys that
/// apply to `study`.
pub fn parse_config(text: &str, source_name: &str, study: Study) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut active = true;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| Error::parse(source_name, line_no, "unterminated section header"))?
                .trim();
            active = match name {
                "run" => true,
                "jordan" | "green" | "gauss" | "additivity" => name == study.name(),
                _ => return Err(Error::parse(source_name, line_no, format!("unknown section `{name}`"))),
            };
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(source_name, line_no, "expected `key = value`"))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim().trim_matches('"').to_string();
        if key.is_empty() || value.is_empty() {
            return Err(Error::parse(source_name, line_no, "expected `key = value`"));
        }
        if matches!(key.as_str(), "config") {
            return Err(Error::parse(source_name, line_no, "`config` cannot be nested"));
        }
        // Check the value now so the error carries the line number.
        let mut probe = RunConfig::new(study);
        probe
            .set(&key, &value)
            .map_err(|e| Error::parse(source_name, line_no, e.to_string()))?;
        if active {
            out.push((key, value));
        }
    }
    Ok(out)
}

fn flag_settings(a: &RunArgs) -> Vec<(&'static str, String)> {
    let mut v = Vec::new();
    let mut put = |k: &'static str, s: Option<String>| {
        if let Some(s) = s {
            v.push((k, s));
        }
    };
    put("region", a.region.clone());
    put("field", a.field.clone());
    put("levels", a.levels.clone());
    put("tol-line", a.tol_line.map(|x| x.to_string()));
    put("tol-figure", a.tol_figure.map(|x| x.to_string()));
    put("order", a.order.map(|x| x.to_string()));
    put("h-q", a.h_q.map(|x| x.to_string()));
    put("max-seg", a.max_seg.map(|x| x.to_string()));
    put("refine-depth", a.refine_depth.map(|x| x.to_string()));
    put("bbox", a.bbox.clone());
    put("samples", a.samples.map(|x| x.to_string()));
    put("seed", a.seed.map(|x| x.to_string()));
    put("tol-additivity", a.tol_additivity.map(|x| x.to_string()));
    put("output", a.output.as_ref().map(|p| p.display().to_string()));
    put("threads", a.threads.map(|x| x.to_string()));
    v
}

fn resolve(study: Study, args: &RunArgs) -> Result<RunConfig> {
    let mut cfg = RunConfig::new(study);
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        for (k, v) in parse_config(&text, &path.display().to_string(), study)? {
            cfg.set(&k, &v)?;
        }
    }
    for (k, v) in flag_settings(args) {
        cfg.set(k, &v)?;
    }
    Ok(cfg)
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub pass: bool,
    pub csv: String,
    pub summary: String,
}

/// Execute a resolved configuration on the current thread pool.
pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.study {
        Study::Jordan => run_jordan(cfg),
        Study::Green => run_green(cfg),
        Study::Gauss => run_gauss(cfg),
        Study::Additivity => run_additivity(cfg),
    }
}

fn world2() -> Rect {
    Rect::new(-2.0, 2.0, -2.0, 2.0).expect("valid")
}

fn world3() -> Box3 {
    Box3::cube([0.0; 3], 2.0).expect("valid")
}

fn run_jordan(cfg: &RunConfig) -> Result<Outcome> {
    let c = cfg.region.curve()?;
    let bounds = if cfg.generator_box() { Some(world2()) } else { cfg.rect_bounds()? };
    let mut rep = jordan_content(&c, cfg.levels, bounds)?;
    if let Some(t) = cfg.tol_figure {
        rep.tolerance = t;
        rep.converged = rep.gap() <= t;
    }
    let pass = rep.converged && rep.is_monotone();
    let last = rep.last();
    let summary = format!(
        "{} jordan {}: estimate={:e} inner={:e} outer={:e} gap={:e} level={} monotone={}",
        if pass { "PASS" } else { "FAIL" },
        cfg.region.label(),
        rep.estimate,
        last.inner,
        last.outer,
        last.gap,
        last.level,
        rep.is_monotone()
    );
    Ok(Outcome {
        pass,
        csv: rep.to_csv(),
        summary,
    })
}

fn plane_field(spec: &str) -> Result<crate::fields::VectorField2> {
    match parse_field(spec)? {
        CatalogField::Plane(v) => Ok(v),
        CatalogField::Space(_) => Err(Error::validation(format!("`{spec}` is a 3D field"))),
    }
}

fn run_green(cfg: &RunConfig) -> Result<Outcome> {
    let c = cfg.region.curve()?;
    let v = plane_field(cfg.field.as_deref().unwrap_or("rot"))?;
    let mut params = VerifyParams::new(cfg.levels);
    params.bounds = if cfg.generator_box() { Some(world2()) } else { cfg.rect_bounds()? };
    params.quadrature_order = cfg.order;
    params.panel_width = cfg.h_q;
    params.max_seg = cfg.max_seg;
    params.tol_line = cfg.tol_line;
    params.tol_figure = cfg.tol_figure;
    let rep = green_verify(&v, &c, &cfg.region.label(), &params)?;
    Ok(Outcome {
        pass: rep.pass,
        csv: rep.to_csv(),
        summary: rep.verdict(),
    })
}

fn run_gauss(cfg: &RunConfig) -> Result<Outcome> {
    let m = cfg.region.mesh()?;
    let spec = cfg.field.as_deref().unwrap_or("radial");
    let v = match parse_field(spec)? {
        CatalogField::Space(v) => v,
        CatalogField::Plane(_) => return Err(Error::validation(format!("`{spec}` is a 2D field"))),
    };
    let mut params = GaussParams::new(cfg.levels);
    params.bounds = if cfg.generator_box() { Some(world3()) } else { cfg.box_bounds()? };
    params.quadrature_order = cfg.order;
    params.panel_width = cfg.h_q;
    params.refine_depth = cfg.refine_depth;
    params.tol_line = cfg.tol_line;
    params.tol_figure = cfg.tol_figure;
    let rep = gauss_verify(&v, &m, &cfg.region.label(), &params)?;
    Ok(Outcome {
        pass: rep.pass,
        csv: rep.to_csv(),
        summary: rep.verdict(),
    })
}

fn run_additivity(cfg: &RunConfig) -> Result<Outcome> {
    let fields: Vec<CatalogField> = match &cfg.field {
        Some(spec) => vec![parse_field(spec)?],
        None => catalog().into_iter().map(|(_, f)| f).collect(),
    };
    let q = QuadratureSpec::new(cfg.order, cfg.h_q.unwrap_or(1.0 / 16.0))?;
    let rows = additivity_study(&fields, cfg.samples, cfg.seed, &q)?;
    let mut csv = format!("{CSV_SCHEMA}\n{ADDITIVITY_COLUMNS}\n");
    for r in &rows {
        writeln!(csv, "{},{},{:e}", r.function, r.samples, r.max_defect).unwrap();
    }
    let area_exact = rows[0].max_defect == 0.0;
    let worst = rows.iter().map(|r| r.max_defect).fold(0.0, f64::max);
    let pass = area_exact && worst <= cfg.tol_additivity;
    let summary = format!(
        "{} additivity: functions={} samples={} max_defect={:e} tol={:e} area_exact={}",
        if pass { "PASS" } else { "FAIL" },
        rows.len(),
        cfg.samples,
        worst,
        cfg.tol_additivity,
        area_exact
    );
    Ok(Outcome { pass, csv, summary })
}

fn write_output(path: &Path, csv: &str) -> Result<()> {
    std::fs::write(path, csv).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn run_resolved(cfg: &RunConfig) -> Result<Outcome> {
    let go = || execute(cfg);
    match cfg.threads {
        None => go(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::validation(format!("cannot start {n} threads: {e}")))?
            .install(go),
    }
}

/// Parse `args` (program name first), run, print, and return the exit
/// status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (study, args) = match &cli.command {
        Command::Jordan(a) => (Study::Jordan, a),
        Command::Green(a) => (Study::Green, a),
        Command::Gauss(a) => (Study::Gauss, a),
        Command::Additivity(a) => (Study::Additivity, a),
    };
    let cfg = match resolve(study, args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("figint: {e}");
            return 2;
        }
    };
    let outcome = match run_resolved(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("figint {}: {e}", study.name());
            return 2;
        }
    };
    match &cfg.output {
        Some(path) => {
            if let Err(e) = write_output(path, &outcome.csv) {
                eprintln!("figint: {e}");
                return 2;
            }
        }
        None => print!("{}", outcome.csv),
    }
    println!("{}", outcome.summary);
    if outcome.pass {
        0
    } else {
        1
    }
}

/// Resolve flags (program name first) without running anything.
pub fn resolve_args<I, T>(args: I) -> Result<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Error::validation(e.to_string()))?;
    match &cli.command {
        Command::Jordan(a) => resolve(Study::Jordan, a),
        Command::Green(a) => resolve(Study::Green, a),
        Command::Gauss(a) => resolve(Study::Gauss, a),
        Command::Additivity(a) => resolve(Study::Additivity, a),
    }
}
