//! Command-line front end. Each invocation runs one command and prints one
//! JSON document.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use santalo_core::chamber::{cell_of, enumerate_cells, Cell};
use santalo_core::continuation::{
    homotopy_to_one, independent_seed, ml_solutions, patch_witness_set, track_santalo_path_sampled, ParametricSystem,
    SolutionSet, TrackerOptions,
};
use santalo_core::exact::{to_f64_vec, ExactMatrix, Rational};
use santalo_core::polytope::{hrep_to_fiber, project_q, FiberEmbedding, FiberProblem, HRep};
use santalo_core::santalo::{santalo_point, santalo_point_hrep, SantaloResult};
use santalo_core::volume::{adjoint_y, DualVolume, PolytopeDualVolume};

use crate::error::{exit, CliError, Result};
use crate::format::{parse_rational_csv, read_matrix};
use crate::json::{document, rationals, PolynomialJson, SolutionSetJson};

#[derive(Debug, Parser)]
#[command(name = "santalo", version, about = "Santaló points of polytope fibers P_b = {x >= 0 : Ax = b}")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Adjoint polynomial of the fiber (or of Q with --W/--c).
    Adjoint(RunConfig),
    /// Exact dual volume at the point --at.
    Volume(RunConfig),
    /// Cells of the chamber complex of A.
    Chamber(RunConfig),
    /// Santaló point by Newton's method (or --homotopy).
    Santalo(RunConfig),
    /// Track the Santaló point from b to b1 inside one cell.
    Track(RunConfig),
    /// ML degree of the Wachspress model by monodromy.
    Mldeg(RunConfig),
    /// Degree of the patch variety of the cell of b.
    Patchdeg(RunConfig),
    /// Membership of --at in the Santaló region of level --level.
    Region(RunConfig),
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Matrix file for A (rows on lines, entries integer or p/q).
    #[arg(long = "A", value_name = "FILE")]
    pub a: Option<PathBuf>,
    /// Right-hand side as comma-separated rationals.
    #[arg(long, value_name = "CSV", allow_hyphen_values = true)]
    pub b: Option<String>,
    /// Target right-hand side for `track`.
    #[arg(long, value_name = "CSV", allow_hyphen_values = true)]
    pub b1: Option<String>,
    /// Kernel basis file (n rows, n - d columns).
    #[arg(long = "B", value_name = "FILE")]
    pub kernel: Option<PathBuf>,
    /// Facet normals of Q = {W y + c >= 0}.
    #[arg(long = "W", value_name = "FILE")]
    pub w: Option<PathBuf>,
    #[arg(long, value_name = "CSV", allow_hyphen_values = true)]
    pub c: Option<String>,
    /// Evaluation point (`volume`, `region`).
    #[arg(long, value_name = "CSV", allow_hyphen_values = true)]
    pub at: Option<String>,
    /// Region level `a` for `region`.
    #[arg(long)]
    pub level: Option<f64>,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, env = "SANTALO_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub target_count: Option<usize>,
    /// Use the monodromy + parameter homotopy route in `santalo`.
    #[arg(long)]
    pub homotopy: bool,
    /// Write plot-ready CSV data to this path.
    #[arg(long, value_name = "PATH")]
    pub plot_data: Option<PathBuf>,
    /// Write the JSON document here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    fn require<'a, T>(&'a self, value: &'a Option<T>, flag: &str) -> Result<&'a T> {
        value.as_ref().ok_or_else(|| CliError::Usage(format!("missing required argument --{flag}")))
    }

    fn vector(&self, value: &Option<String>, flag: &str) -> Result<Vec<Rational>> {
        parse_rational_csv(self.require(value, flag)?)
    }

    fn uses_hrep(&self) -> bool {
        self.w.is_some() || self.c.is_some()
    }

    fn matrix_a(&self) -> Result<ExactMatrix> {
        read_matrix(self.require(&self.a, "A")?)
    }

    fn fiber(&self) -> Result<FiberProblem> {
        let a = self.matrix_a()?;
        let b = self.vector(&self.b, "b")?;
        Ok(match &self.kernel {
            Some(path) => FiberProblem::with_kernel(a, b, read_matrix(path)?)?,
            None => FiberProblem::new(a, b)?,
        })
    }

    fn hrep(&self) -> Result<HRep> {
        let w = read_matrix(self.require(&self.w, "W")?)?;
        let c = self.vector(&self.c, "c")?;
        Ok(HRep::new(w, c)?)
    }

    fn tracker(&self) -> TrackerOptions {
        TrackerOptions { max_loops: 10_000, ..TrackerOptions::with_seed(self.seed) }
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::SUCCESS };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(()) => exit::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn config(command: &Command) -> (&'static str, &RunConfig) {
    match command {
        Command::Adjoint(c) => ("adjoint", c),
        Command::Volume(c) => ("volume", c),
        Command::Chamber(c) => ("chamber", c),
        Command::Santalo(c) => ("santalo", c),
        Command::Track(c) => ("track", c),
        Command::Mldeg(c) => ("mldeg", c),
        Command::Patchdeg(c) => ("patchdeg", c),
        Command::Region(c) => ("region", c),
    }
}

/// Runs a command and writes its document to stdout or `--out`.
pub fn execute(command: &Command) -> Result<()> {
    let (_, cfg) = config(command);
    let doc = evaluate(command)?;
    let text = serde_json::to_string_pretty(&doc)?;
    match &cfg.out {
        Some(path) => write_file(path, &(text + "\n")),
        None => {
            let mut stdout = std::io::stdout().lock();
            match writeln!(stdout, "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(CliError::Io { path: PathBuf::from("<stdout>"), source: e })
                }
                _ => Ok(()),
            }
        }
    }
}

/// Runs a command and returns its JSON document, writing plot data if asked.
pub fn evaluate(command: &Command) -> Result<Value> {
    let (name, cfg) = config(command);
    if cfg.tol.is_nan() || cfg.tol <= 0.0 {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    let body = match command {
        Command::Adjoint(c) => cmd_adjoint(c)?,
        Command::Volume(c) => cmd_volume(c)?,
        Command::Chamber(c) => cmd_chamber(c)?,
        Command::Santalo(c) => cmd_santalo(c)?,
        Command::Track(c) => cmd_track(c)?,
        Command::Mldeg(c) => cmd_mldeg(c)?,
        Command::Patchdeg(c) => cmd_patchdeg(c)?,
        Command::Region(c) => cmd_region(c)?,
    };
    Ok(document(name, body))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn cell_json(cell: &Cell) -> Value {
    json!({
        "facet_support": cell.facet_support,
        "n_c": cell.n_c(),
        "vertex_family": cell.vertex_family,
        "inequalities": cell.inequalities.iter().map(|h| h.iter().map(|v| v.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "interior_point": rationals(&cell.interior_point()),
    })
}

fn result_json(res: &SantaloResult, method: &str) -> Value {
    json!({
        "x_star": res.x_star,
        "y_star": res.y_star,
        "objective": res.objective,
        "gradient_norm": res.gradient_norm,
        "iterations": res.iterations,
        "method": method,
    })
}

pub fn cmd_adjoint(cfg: &RunConfig) -> Result<Value> {
    if cfg.uses_hrep() {
        let h = cfg.hrep()?;
        let alpha = adjoint_y(&h)?;
        return Ok(json!({
            "coordinates": "y",
            "degree": alpha.total_degree(),
            "polynomial": PolynomialJson::from(&alpha),
        }));
    }
    let fp = cfg.fiber()?;
    let dv = DualVolume::for_fiber(&fp)?;
    Ok(json!({
        "coordinates": "x",
        "degree": dv.numerator().total_degree(),
        "facet_support": dv.support(),
        "vertex_family": dv.vertex_family(),
        "polynomial": PolynomialJson::from(dv.numerator()),
    }))
}

pub fn cmd_volume(cfg: &RunConfig) -> Result<Value> {
    let at = cfg.vector(&cfg.at, "at")?;
    let value = if cfg.uses_hrep() {
        let dv = PolytopeDualVolume::new(&cfg.hrep()?)?;
        if at.len() != dv.hrep().m() {
            return Err(CliError::Usage(format!("--at must have {} entries", dv.hrep().m())));
        }
        dv.volume_exact(&at)?
    } else {
        let fp = cfg.fiber()?;
        if at.len() != fp.n() {
            return Err(CliError::Usage(format!("--at must have {} entries", fp.n())));
        }
        DualVolume::for_fiber(&fp)?.value_exact(&at)?
    };
    Ok(json!({
        "at": rationals(&at),
        "value": value.to_string(),
        "value_f64": santalo_core::exact::to_f64(&value),
    }))
}

pub fn cmd_chamber(cfg: &RunConfig) -> Result<Value> {
    let a = cfg.matrix_a()?;
    let cells = enumerate_cells(&a)?;
    let mut profile: BTreeMap<usize, usize> = BTreeMap::new();
    for cell in &cells {
        *profile.entry(cell.n_c()).or_default() += 1;
    }
    let mut body = json!({
        "count": cells.len(),
        "facet_count_profile": profile.iter().map(|(k, v)| (k.to_string(), json!(v))).collect::<serde_json::Map<_, _>>(),
        "cells": cells.iter().map(cell_json).collect::<Vec<_>>(),
    });
    if cfg.b.is_some() {
        let b = cfg.vector(&cfg.b, "b")?;
        let cell = cell_of(&a, &b)?;
        body["cell_of_b"] = json!(cells.iter().position(|c| *c == cell));
    }
    Ok(body)
}

/// Fiber of the input: either `--A/--b` directly or the embedding of
/// `--W/--c`, with the map back to `y` coordinates.
fn fiber_input(cfg: &RunConfig) -> Result<(FiberProblem, Option<FiberEmbedding>)> {
    if cfg.uses_hrep() {
        let emb = hrep_to_fiber(&cfg.hrep()?)?;
        Ok((emb.fiber.clone(), Some(emb)))
    } else {
        Ok((cfg.fiber()?, None))
    }
}

fn homotopy_santalo(fp: &FiberProblem, cfg: &RunConfig) -> Result<SantaloResult> {
    let opts = cfg.tracker();
    let sols = ml_solutions(fp, &opts, cfg.target_count)?;
    let dv = DualVolume::for_fiber(fp)?;
    let ps = ParametricSystem::likelihood(fp, &dv);
    Ok(homotopy_to_one(&ps, fp.b(), &sols, &opts)?)
}

pub fn cmd_santalo(cfg: &RunConfig) -> Result<Value> {
    let method = if cfg.homotopy { "homotopy" } else { "newton" };
    if cfg.uses_hrep() && !cfg.homotopy {
        return Ok(result_json(&santalo_point_hrep(&cfg.hrep()?, cfg.tol)?, method));
    }
    let (fp, emb) = fiber_input(cfg)?;
    let mut res = if cfg.homotopy { homotopy_santalo(&fp, cfg)? } else { santalo_point(&fp, cfg.tol)? };
    if let Some(emb) = emb {
        res.y_star = emb.to_y_f64(&res.x_star);
    }
    Ok(result_json(&res, method))
}

pub fn cmd_track(cfg: &RunConfig) -> Result<Value> {
    let fp = cfg.fiber()?;
    let b1 = cfg.vector(&cfg.b1, "b1")?;
    if b1.len() != fp.d() {
        return Err(CliError::Usage(format!("--b1 must have {} entries", fp.d())));
    }
    let cell = cell_of(fp.a(), fp.b())?;
    if !cell.contains(&b1) {
        return Err(CliError::CellMismatch(
            "b1 is not in the closed cell of b; compute the Santaló point at b1 directly with `santalo` \
             (or restart from `mldeg`)"
                .into(),
        ));
    }
    let start = santalo_point(&fp, cfg.tol)?;
    let (end, samples) =
        track_santalo_path_sampled(&fp, &cell, fp.b(), &start.x_star, &b1, &cfg.tracker(), cfg.plot_data.is_some())?;
    if let Some(path) = &cfg.plot_data {
        let mut csv = String::from("t");
        for i in 1..=fp.n() {
            let _ = write!(csv, ",x{i}");
        }
        csv.push('\n');
        for (t, x) in &samples {
            let _ = write!(csv, "{t}");
            for v in x {
                let _ = write!(csv, ",{v}");
            }
            csv.push('\n');
        }
        write_file(path, &csv)?;
    }
    let kernel = fp.kernel().to_f64_rows();
    let y_end: Vec<f64> = (0..fp.m()).map(|j| (0..fp.n()).map(|i| kernel[i][j] * end[i]).sum::<f64>()).collect();
    Ok(json!({
        "b0": rationals(fp.b()),
        "b1": rationals(&b1),
        "x_start": start.x_star,
        "x_end": end,
        "y_end": y_end,
        "samples": samples.len(),
    }))
}

fn solutions_csv(path: &Path, set: &SolutionSet) -> Result<()> {
    let n = set.solutions.first().map_or(0, Vec::len);
    let mut csv = String::new();
    for i in 1..=n {
        let _ = write!(csv, "{}re{i},im{i}", if i == 1 { "" } else { "," });
    }
    csv.push('\n');
    for x in &set.solutions {
        let row: Vec<String> = x.iter().map(|z| format!("{},{}", z.re, z.im)).collect();
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    write_file(path, &csv)
}

pub fn cmd_mldeg(cfg: &RunConfig) -> Result<Value> {
    let (fp, _) = fiber_input(cfg)?;
    let opts = cfg.tracker();
    let first = ml_solutions(&fp, &opts, cfg.target_count)?;
    let mut seeds = vec![opts.seed];
    if cfg.target_count.is_none() {
        let second_opts = TrackerOptions { seed: independent_seed(opts.seed), ..opts };
        let second = ml_solutions(&fp, &second_opts, None)?;
        seeds.push(second_opts.seed);
        if second.len() != first.len() {
            return Err(santalo_core::Error::SeedDisagreement { first: first.len(), second: second.len() }.into());
        }
    }
    if let Some(path) = &cfg.plot_data {
        solutions_csv(path, &first)?;
    }
    let dv = DualVolume::for_fiber(&fp)?;
    let ps = ParametricSystem::likelihood(&fp, &dv);
    Ok(json!({
        "ml_degree": first.len(),
        "bezout_bound": ps.bezout_bound(),
        "seeds": seeds,
        "solution_set": SolutionSetJson::from(&first),
    }))
}

pub fn cmd_patchdeg(cfg: &RunConfig) -> Result<Value> {
    let (fp, _) = fiber_input(cfg)?;
    let cell = cell_of(fp.a(), fp.b())?;
    let set = patch_witness_set(fp.a(), &cell, &cfg.tracker())?;
    if let Some(path) = &cfg.plot_data {
        solutions_csv(path, &set)?;
    }
    Ok(json!({
        "patch_degree": set.len(),
        "cell": cell_json(&cell),
        "solution_set": SolutionSetJson::from(&set),
    }))
}

pub fn cmd_region(cfg: &RunConfig) -> Result<Value> {
    let h = if cfg.uses_hrep() { cfg.hrep()? } else { project_q(&cfg.fiber()?)? };
    let level = *cfg.require(&cfg.level, "level")?;
    let at = to_f64_vec(&cfg.vector(&cfg.at, "at")?);
    if at.len() != h.m() {
        return Err(CliError::Usage(format!("--at must have {} entries", h.m())));
    }
    let star = santalo_point_hrep(&h, cfg.tol)?;
    let dv = PolytopeDualVolume::new(&h)?;
    let minimum = dv.volume(&star.y_star)?;
    let (inside, excess) = match dv.volume(&at) {
        Ok(v) => (v - minimum <= level, Some(v - minimum)),
        Err(santalo_core::Error::NotInterior) => (false, None),
        Err(e) => return Err(e.into()),
    };
    if let Some(path) = &cfg.plot_data {
        region_grid(path, &h, &dv, minimum)?;
    }
    Ok(json!({
        "at": at,
        "level": level,
        "inside": inside,
        "excess": excess,
        "y_star": star.y_star,
        "minimum_volume": minimum,
    }))
}

/// Excess dual volume on a 41 x 41 grid over the bounding box of a polygon.
fn region_grid(path: &Path, h: &HRep, dv: &PolytopeDualVolume, minimum: f64) -> Result<()> {
    if h.m() != 2 {
        return Err(CliError::Usage("--plot-data for `region` needs a polygon".into()));
    }
    let vertices: Vec<Vec<f64>> = h.vertex_data()?.vertices.iter().map(|v| to_f64_vec(v)).collect();
    let lo: Vec<f64> = (0..2).map(|k| vertices.iter().map(|v| v[k]).fold(f64::INFINITY, f64::min)).collect();
    let hi: Vec<f64> = (0..2).map(|k| vertices.iter().map(|v| v[k]).fold(f64::NEG_INFINITY, f64::max)).collect();
    let mut csv = String::from("y1,y2,excess\n");
    for i in 0..=40 {
        for j in 0..=40 {
            let y = [lo[0] + (hi[0] - lo[0]) * i as f64 / 40.0, lo[1] + (hi[1] - lo[1]) * j as f64 / 40.0];
            if let Ok(v) = dv.volume(&y) {
                let _ = writeln!(csv, "{},{},{}", y[0], y[1], v - minimum);
            }
        }
    }
    write_file(path, &csv)
}
