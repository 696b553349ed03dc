//! Experiment configuration, named building presets, multi-seed runs, the
//! single-substrate comparison and plot-ready exports.
//!
//! A config file is TOML. Every key is optional when `preset` is given;
//! present keys override the preset field by field:
//!
//! ```toml
//! preset = "n2-paper"
//! mode = "cro-sl"            # or "standalone:DE", "standalone:HS", ...
//! seeds = [0, 1, 2]
//! n_tmds = 2
//! fixed_floors = [2, 2]      # freeze placement
//!
//! [building]
//! masses = [2.0, 1.0]
//! stiffnesses = [1000.0, 500.0]
//! xi_s = 0.01
//! damping_anchors = "highest-pair"
//!
//! [bounds]
//! omega = [0.0, 50.0]
//! xi = [0.0, 0.3]
//! mass = [0.0, 0.05]
//!
//! [cro]
//! alpha = 1000
//!
//! [cro.operators.de]
//! scale = 0.6
//!
//! [frf]
//! max_step = 0.01
//! ```

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::building::{BuildingModel, DampingAnchors};
use crate::cro::{self, CroParams, RunReport, TmdProblem};
use crate::encoding::{Interval, SearchSpace};
use crate::error::{Error, Result};
use crate::frf::{FitnessEvaluator, FitnessValue, FrfConfig, FrfCurves};
use crate::operators::SubstrateTag;
use crate::tmd::TmdDesign;

pub const DEFAULT_SEEDS: u64 = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    CroSl,
    Standalone(SubstrateTag),
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::CroSl => f.write_str("cro-sl"),
            Mode::Standalone(t) => write!(f, "standalone:{}", t.label()),
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("cro-sl") {
            return Ok(Mode::CroSl);
        }
        match s.split_once(':') {
            Some((head, tag)) if head.eq_ignore_ascii_case("standalone") => {
                tag.parse().map(Mode::Standalone).map_err(|e| Error::Config(format!("mode {s:?}: {e}")))
            }
            _ => Err(Error::Config(format!("unknown mode {s:?}; expected cro-sl or standalone:<substrate>"))),
        }
    }
}

impl Serialize for Mode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Mode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Mode {
    /// Directory-safe name, e.g. `cro-sl` or `standalone-DE`.
    pub fn slug(&self) -> String {
        self.to_string().replace(':', "-")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub omega: [f64; 2],
    pub xi: [f64; 2],
    pub mass: [f64; 2],
}

/// Fully resolved experiment settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    pub mode: Mode,
    pub seeds: Vec<u64>,
    pub n_tmds: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_floors: Option<Vec<usize>>,
    pub building: BuildingModel,
    pub bounds: Bounds,
    pub cro: CroParams,
    pub frf: FrfConfig,
}

pub const PRESETS: [&str; 3] = ["n2-paper", "n4-paper", "n2-lab"];

/// Named building and bounds with default settings.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let (masses, stiffnesses, xi_s, bounds) = match name {
        "n2-paper" => (
            vec![2.0, 1.0],
            vec![1000.0, 500.0],
            0.01,
            Bounds { omega: [0.0, 50.0], xi: [0.0, 0.3], mass: [0.0, 0.05] },
        ),
        "n4-paper" => (
            vec![2.0, 2.0, 2.0, 1.0],
            vec![2000.0, 1500.0, 1000.0, 500.0],
            0.01,
            Bounds { omega: [0.0, 50.0], xi: [0.0, 0.3], mass: [0.0, 0.05] },
        ),
        "n2-lab" => (
            vec![2.14, 1.88],
            vec![1111.8, 389.1],
            0.006,
            Bounds { omega: [0.0, 50.0], xi: [0.0, 0.2], mass: [0.0, 0.1] },
        ),
        other => return Err(Error::Config(format!("unknown preset {other:?}; known: {}", PRESETS.join(", ")))),
    };
    let n = masses.len();
    let cfg = ExperimentConfig {
        preset: Some(name.to_string()),
        mode: Mode::CroSl,
        seeds: (0..DEFAULT_SEEDS).collect(),
        n_tmds: n,
        fixed_floors: None,
        building: BuildingModel::new(masses, stiffnesses, xi_s)?,
        bounds,
        cro: CroParams::default(),
        frf: FrfConfig::default(),
    };
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBuilding {
    masses: Option<Vec<f64>>,
    stiffnesses: Option<Vec<f64>>,
    xi_s: Option<f64>,
    damping_anchors: Option<DampingAnchors>,
    explicit_damping: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBounds {
    omega: Option<[f64; 2]>,
    xi: Option<[f64; 2]>,
    mass: Option<[f64; 2]>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    preset: Option<String>,
    mode: Option<Mode>,
    seeds: Option<Vec<u64>>,
    n_tmds: Option<usize>,
    fixed_floors: Option<Vec<usize>>,
    building: Option<RawBuilding>,
    bounds: Option<RawBounds>,
    cro: Option<toml::Table>,
    frf: Option<toml::Table>,
}

/// Deep-merges `overlay` into `base`.
fn merge(base: &mut toml::Table, overlay: toml::Table) {
    for (k, v) in overlay {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

fn overlay<T: Serialize + for<'de> Deserialize<'de>>(base: &T, patch: Option<toml::Table>, section: &str) -> Result<T> {
    let Some(patch) = patch else { return Ok(T::deserialize(toml::Value::try_from(base).map_err(cfg_err)?).map_err(cfg_err)?) };
    let mut table = toml::Table::try_from(base).map_err(cfg_err)?;
    merge(&mut table, patch);
    T::deserialize(toml::Value::Table(table)).map_err(|e| Error::Config(format!("[{section}]: {e}")))
}

fn cfg_err(e: impl fmt::Display) -> Error {
    Error::Config(e.to_string())
}

fn missing(key: &str) -> Error {
    Error::Config(format!("missing key `{key}` (no preset to inherit it from)"))
}

/// Parses and validates a config document; `origin` names it in errors.
pub fn parse_config(text: &str, origin: &Path) -> Result<ExperimentConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::parse(origin, e))?;
    let base = raw.preset.as_deref().map(preset).transpose()?;

    let rb = raw.building.unwrap_or_default();
    let pb = base.as_ref().map(|b| &b.building);
    let mut building = BuildingModel {
        masses: rb.masses.or_else(|| pb.map(|b| b.masses.clone())).ok_or_else(|| missing("building.masses"))?,
        stiffnesses: rb
            .stiffnesses
            .or_else(|| pb.map(|b| b.stiffnesses.clone()))
            .ok_or_else(|| missing("building.stiffnesses"))?,
        xi_s: rb.xi_s.or(pb.map(|b| b.xi_s)).ok_or_else(|| missing("building.xi_s"))?,
        damping_anchors: rb.damping_anchors.or(pb.map(|b| b.damping_anchors)).unwrap_or_default(),
        explicit_damping: None,
    };
    building.explicit_damping = rb.explicit_damping.or_else(|| pb.and_then(|b| b.explicit_damping.clone()));

    let rbo = raw.bounds.unwrap_or_default();
    let pbo = base.as_ref().map(|b| b.bounds);
    let bounds = Bounds {
        omega: rbo.omega.or(pbo.map(|b| b.omega)).ok_or_else(|| missing("bounds.omega"))?,
        xi: rbo.xi.or(pbo.map(|b| b.xi)).ok_or_else(|| missing("bounds.xi"))?,
        mass: rbo.mass.or(pbo.map(|b| b.mass)).ok_or_else(|| missing("bounds.mass"))?,
    };

    let defaults_cro = base.as_ref().map(|b| b.cro.clone()).unwrap_or_default();
    let defaults_frf = base.as_ref().map(|b| b.frf.clone()).unwrap_or_default();
    let cfg = ExperimentConfig {
        preset: raw.preset,
        mode: raw.mode.or(base.as_ref().map(|b| b.mode)).unwrap_or(Mode::CroSl),
        seeds: raw.seeds.unwrap_or_else(|| (0..DEFAULT_SEEDS).collect()),
        n_tmds: raw.n_tmds.unwrap_or(building.masses.len()),
        fixed_floors: raw.fixed_floors,
        cro: overlay(&defaults_cro, raw.cro, "cro")?,
        frf: overlay(&defaults_frf, raw.frf, "frf")?,
        building,
        bounds,
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, path)
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.building.validate().map_err(|e| Error::Config(e.to_string()))?;
        let n = self.building.n_floors();
        if n < 2 && self.building.explicit_damping.is_none() {
            return Err(Error::Config("optimisation needs at least two floors or an explicit damping matrix".into()));
        }
        if self.n_tmds == 0 {
            return Err(Error::Config("n_tmds must be at least 1".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("seed list is empty".into()));
        }
        self.space().map_err(|e| Error::Config(e.to_string()))?;
        self.cro.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.frf.validate()
    }

    pub fn space(&self) -> Result<SearchSpace> {
        let b = self.bounds;
        let space = SearchSpace::new(
            self.n_tmds,
            Interval::from(b.omega),
            Interval::from(b.xi),
            Interval::from(b.mass),
            self.building.n_floors(),
        )?;
        match &self.fixed_floors {
            Some(f) => space.with_pinned_floors(f.clone()),
            None => Ok(space),
        }
    }

    pub fn evaluator(&self) -> Result<FitnessEvaluator> {
        FitnessEvaluator::new(&self.building, self.frf.clone())
    }

    pub fn problem(&self) -> Result<TmdProblem> {
        Ok(TmdProblem { evaluator: self.evaluator()?, space: self.space()? })
    }

    /// Engine parameters for `mode`; standalone modes put one substrate on
    /// the whole reef.
    pub fn params_for(&self, mode: Mode, max_evaluations: Option<u64>) -> CroParams {
        let mut p = self.cro.clone();
        if let Mode::Standalone(tag) = mode {
            p.substrates = vec![tag];
        }
        if max_evaluations.is_some() {
            p.max_evaluations = max_evaluations;
        }
        p
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(cfg_err)
    }
}

pub fn run_single(problem: &TmdProblem, cfg: &ExperimentConfig, mode: Mode, seed: u64, budget: Option<u64>) -> Result<RunReport> {
    cro::run(problem, &cfg.params_for(mode, budget), &problem.space, seed)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub mode: Mode,
    pub min: f64,
    pub mean: f64,
    pub runs: usize,
}

/// Min and mean final fitness per mode.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonTable {
    pub fn from_runs<'a>(runs: impl IntoIterator<Item = (Mode, &'a RunReport)>) -> Self {
        let mut rows: Vec<(Mode, Vec<f64>)> = Vec::new();
        for (mode, r) in runs {
            let v = r.final_best.fitness.value;
            match rows.iter_mut().find(|(m, _)| *m == mode) {
                Some((_, vals)) => vals.push(v),
                None => rows.push((mode, vec![v])),
            }
        }
        ComparisonTable {
            rows: rows
                .into_iter()
                .map(|(mode, vals)| ComparisonRow {
                    mode,
                    min: vals.iter().copied().fold(f64::INFINITY, f64::min),
                    mean: vals.iter().sum::<f64>() / vals.len() as f64,
                    runs: vals.len(),
                })
                .collect(),
        }
    }

    pub fn row(&self, mode: Mode) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.mode == mode)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::parse(path, e))?;
        w.write_record(["mode", "min", "mean", "runs"]).map_err(|e| Error::parse(path, e))?;
        for r in &self.rows {
            w.write_record([r.mode.to_string(), r.min.to_string(), r.mean.to_string(), r.runs.to_string()])
                .map_err(|e| Error::parse(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

impl fmt::Display for ComparisonTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<16} {:>10} {:>10} {:>5}", "mode", "min", "mean", "runs")?;
        for r in &self.rows {
            writeln!(f, "{:<16} {:>10.4} {:>10.4} {:>5}", r.mode.to_string(), r.min, r.mean, r.runs)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    pub table: ComparisonTable,
    pub reports: Vec<(Mode, RunReport)>,
}

/// Runs `cfg.mode` for every seed. A standalone run without an explicit
/// evaluation budget first runs cro-sl on the same seed and adopts its
/// evaluation count, which the paired report is returned alongside.
/// `on_run` sees every finished report before the next run starts.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    seeds: &[u64],
    mut on_run: impl FnMut(Mode, &RunReport) -> Result<()>,
) -> Result<ExperimentOutcome> {
    let problem = cfg.problem()?;
    let mut reports = Vec::new();
    for &seed in seeds {
        let budget = match (cfg.mode, cfg.cro.max_evaluations) {
            (Mode::Standalone(_), None) => {
                let paired = run_single(&problem, cfg, Mode::CroSl, seed, None)?;
                on_run(Mode::CroSl, &paired)?;
                let b = paired.evaluations_used;
                reports.push((Mode::CroSl, paired));
                Some(b)
            }
            _ => None,
        };
        let r = run_single(&problem, cfg, cfg.mode, seed, budget)?;
        on_run(cfg.mode, &r)?;
        reports.push((cfg.mode, r));
    }
    let table = ComparisonTable::from_runs(reports.iter().map(|(m, r)| (*m, r)));
    Ok(ExperimentOutcome { table, reports })
}

/// cro-sl against each single-substrate reef on the same seeds, every
/// standalone run capped at the evaluations its cro-sl twin used.
pub fn compare(
    cfg: &ExperimentConfig,
    seeds: &[u64],
    standalone: &[SubstrateTag],
    mut on_run: impl FnMut(Mode, &RunReport) -> Result<()>,
) -> Result<ExperimentOutcome> {
    let problem = cfg.problem()?;
    let mut reports = Vec::new();
    for &seed in seeds {
        let reference = run_single(&problem, cfg, Mode::CroSl, seed, cfg.cro.max_evaluations)?;
        on_run(Mode::CroSl, &reference)?;
        let budget = reference.evaluations_used;
        reports.push((Mode::CroSl, reference));
        for &tag in standalone {
            let mode = Mode::Standalone(tag);
            let r = run_single(&problem, cfg, mode, seed, Some(budget))?;
            on_run(mode, &r)?;
            reports.push((mode, r));
        }
    }
    let table = ComparisonTable::from_runs(reports.iter().map(|(m, r)| (*m, r)));
    Ok(ExperimentOutcome { table, reports })
}

pub fn parse_design(text: &str, origin: &Path) -> Result<TmdDesign> {
    toml::from_str(text).map_err(|e| Error::parse(origin, e))
}

pub fn load_design(path: impl AsRef<Path>) -> Result<TmdDesign> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_design(&text, path)
}

pub fn design_to_toml(design: &TmdDesign) -> Result<String> {
    toml::to_string(design).map_err(cfg_err)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DesignEvaluation {
    pub fitness: FitnessValue,
    pub bare: FitnessValue,
    pub bare_curves: FrfCurves,
    pub design_curves: FrfCurves,
}

pub fn evaluate_design(cfg: &ExperimentConfig, design: &TmdDesign) -> Result<DesignEvaluation> {
    let n = cfg.building.n_floors();
    design.validate(n)?;
    let ev = cfg.evaluator()?;
    let empty = TmdDesign::default();
    Ok(DesignEvaluation {
        fitness: ev.evaluate(design)?,
        bare: ev.evaluate(&empty)?,
        bare_curves: ev.curves(&empty)?,
        design_curves: ev.curves(design)?,
    })
}

pub fn write_frf(curves: &FrfCurves, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    curves.write_csv(std::io::BufWriter::new(file)).map_err(|e| Error::parse(path, e))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExportedFiles {
    pub report: PathBuf,
    pub convergence: PathBuf,
    pub substrates: PathBuf,
    pub best_design: PathBuf,
    pub frf_bare: PathBuf,
    pub frf_best: PathBuf,
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn convergence_csv(report: &RunReport) -> String {
    let mut out = String::from("iteration,best_fitness\n");
    for (k, v) in report.best_per_iteration.iter().enumerate() {
        out.push_str(&format!("{},{}\n", k + 1, v));
    }
    out
}

fn substrates_csv(report: &RunReport) -> String {
    let mut out = String::from("iteration");
    for t in &report.substrates {
        out.push(',');
        out.push_str(t.label());
    }
    out.push('\n');
    for (k, ratios) in report.substrate_ratios().iter().enumerate() {
        out.push_str(&(k + 1).to_string());
        for r in ratios {
            out.push_str(&format!(",{r}"));
        }
        out.push('\n');
    }
    out
}

/// Writes the report and its traces into `dir`. Same report and config,
/// same bytes.
pub fn export_traces(report: &RunReport, cfg: &ExperimentConfig, dir: &Path) -> Result<ExportedFiles> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = ExportedFiles {
        report: dir.join("report.json"),
        convergence: dir.join("convergence.csv"),
        substrates: dir.join("substrates.csv"),
        best_design: dir.join("best_design.toml"),
        frf_bare: dir.join("frf_bare.csv"),
        frf_best: dir.join("frf_best.csv"),
    };
    let json = serde_json::to_string_pretty(report).map_err(cfg_err)?;
    write_text(&files.report, &(json + "\n"))?;
    write_text(&files.convergence, &convergence_csv(report))?;
    write_text(&files.substrates, &substrates_csv(report))?;
    let design = cfg.space()?.decode(&report.final_best.genome)?;
    write_text(&files.best_design, &design_to_toml(&design)?)?;
    let ev = cfg.evaluator()?;
    write_frf(&ev.curves(&TmdDesign::default())?, &files.frf_bare)?;
    write_frf(&ev.curves(&design)?, &files.frf_best)?;
    Ok(files)
}

pub fn read_report(path: &Path) -> Result<RunReport> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(path, e))
}

fn read_rows(path: &Path) -> Result<(csv::StringRecord, Vec<csv::StringRecord>)> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::parse(path, e))?;
    let header = r.headers().map_err(|e| Error::parse(path, e))?.clone();
    let rows = r.records().collect::<std::result::Result<Vec<_>, _>>().map_err(|e| Error::parse(path, e))?;
    Ok((header, rows))
}

fn field(path: &Path, row: &csv::StringRecord, i: usize) -> Result<f64> {
    row.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::parse(path, format!("bad value in column {i} of row {row:?}")))
}

/// Best fitness per iteration, in file order.
pub fn read_convergence(path: &Path) -> Result<Vec<f64>> {
    let (_, rows) = read_rows(path)?;
    rows.iter().map(|row| field(path, row, 1)).collect()
}

/// Substrate labels and the cumulative win fractions per iteration.
pub fn read_substrate_ratios(path: &Path) -> Result<(Vec<SubstrateTag>, Vec<Vec<f64>>)> {
    let (header, rows) = read_rows(path)?;
    let tags = header
        .iter()
        .skip(1)
        .map(|h| h.parse::<SubstrateTag>().map_err(|e| Error::parse(path, e)))
        .collect::<Result<Vec<_>>>()?;
    let ratios = rows
        .iter()
        .map(|row| (1..=tags.len()).map(|i| field(path, row, i)).collect())
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok((tags, ratios))
}

pub fn read_frf(path: &Path) -> Result<FrfCurves> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    FrfCurves::read_csv(file).map_err(|e| Error::parse(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(preset_name: &str) -> ExperimentConfig {
        let mut cfg = preset(preset_name).unwrap();
        cfg.cro.alpha = 3;
        cfg.frf.max_step = 0.1;
        cfg
    }

    #[test]
    fn presets_match_published_setups() {
        let n2 = preset("n2-paper").unwrap();
        assert_eq!(n2.building.masses, vec![2.0, 1.0]);
        assert_eq!(n2.bounds.omega, [0.0, 50.0]);
        assert_eq!(n2.bounds.xi, [0.0, 0.3]);
        assert_eq!(n2.bounds.mass, [0.0, 0.05]);
        assert_eq!(n2.space().unwrap().n_floors(), 2);
        let n4 = preset("n4-paper").unwrap();
        assert_eq!(n4.n_tmds, 4);
        assert_eq!(n4.space().unwrap().n_floors(), 4);
        let lab = preset("n2-lab").unwrap();
        assert_eq!(lab.building.stiffnesses, vec![1111.8, 389.1]);
        assert_eq!(lab.building.masses, vec![2.14, 1.88]);
        assert_eq!(lab.building.xi_s, 0.006);
        assert!(preset("n3").is_err());
    }

    #[test]
    fn overrides_merge_into_preset() {
        let text = "preset = \"n4-paper\"\nmode = \"standalone:DE\"\nseeds = [4, 5]\n[cro]\nalpha = 7\n[cro.operators.de]\nscale = 0.4\n[building]\nxi_s = 0.02\n";
        let cfg = parse_config(text, Path::new("t.toml")).unwrap();
        assert_eq!(cfg.mode, Mode::Standalone(SubstrateTag::DifferentialEvolution));
        assert_eq!(cfg.seeds, vec![4, 5]);
        assert_eq!(cfg.cro.alpha, 7);
        assert_eq!(cfg.cro.operators.de.scale, 0.4);
        assert_eq!(cfg.cro.operators.de.crossover_rate, 0.9);
        assert_eq!(cfg.cro.reef_rows, 10);
        assert_eq!(cfg.building.xi_s, 0.02);
        assert_eq!(cfg.building.masses.len(), 4);
        let back = parse_config(&cfg.to_toml().unwrap(), Path::new("r.toml")).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn config_errors_are_named() {
        let cases = [
            ("[building]\nmasses = [1.0, 1.0]\n", "stiffnesses"),
            ("preset = \"n2-paper\"\nbogus = 1\n", "bogus"),
            ("preset = \"n2-paper\"\nfixed_floors = [1]\n", "pinned"),
            ("preset = \"n2-paper\"\n[building]\nmasses = [1.0]\n", "building"),
            ("preset = \"n2-paper\"\n[cro]\nrho = 2.0\n", "rho"),
            ("preset = \"n2-paper\"\nmode = \"solo\"\n", "mode"),
        ];
        for (text, needle) in cases {
            let err = parse_config(text, Path::new("bad.toml")).unwrap_err();
            assert!(matches!(err, Error::Config(_) | Error::Parse { .. }), "{text}: {err}");
            assert!(err.to_string().contains(needle), "{text}: {err}");
            assert_eq!(err.exit_code(), 2);
        }
    }

    #[test]
    fn single_seed_single_iteration_table() {
        let mut cfg = quick("n2-paper");
        cfg.cro.alpha = 1;
        let out = run_experiment(&cfg, &[9], |_, _| Ok(())).unwrap();
        assert_eq!(out.table.rows.len(), 1);
        let row = &out.table.rows[0];
        assert_eq!(row.runs, 1);
        assert_eq!(row.min, row.mean);
    }

    #[test]
    fn standalone_budget_follows_cro_sl() {
        let cfg = quick("n2-paper");
        let out = compare(&cfg, &[1], &[SubstrateTag::Gaussian, SubstrateTag::HarmonySearch], |_, _| Ok(())).unwrap();
        let reference = out.reports[0].1.evaluations_used;
        for (_, r) in &out.reports[1..] {
            assert!(r.evaluations_used >= reference);
            assert!(r.evaluations_used < reference + cfg.cro.reef_size() as u64);
        }
    }

    #[test]
    fn exports_round_trip_and_repeat() {
        let cfg = quick("n2-paper");
        let problem = cfg.problem().unwrap();
        let report = run_single(&problem, &cfg, Mode::CroSl, 3, None).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let a = export_traces(&report, &cfg, &dir.path().join("a")).unwrap();
        let b = export_traces(&report, &cfg, &dir.path().join("b")).unwrap();
        for (x, y) in [(&a.report, &b.report), (&a.convergence, &b.convergence), (&a.substrates, &b.substrates), (&a.frf_best, &b.frf_best)] {
            assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap());
        }
        assert_eq!(read_report(&a.report).unwrap(), report);
        assert_eq!(read_convergence(&a.convergence).unwrap(), report.best_per_iteration);
        let (tags, ratios) = read_substrate_ratios(&a.substrates).unwrap();
        assert_eq!(tags, report.substrates);
        assert_eq!(ratios, report.substrate_ratios());
        assert!(ratios.iter().all(|r| r.iter().sum::<f64>() <= 1.0 + 1e-12));
        let design = load_design(&a.best_design).unwrap();
        let again = evaluate_design(&cfg, &design).unwrap();
        assert_eq!(again.fitness, report.final_best.fitness);
    }

    #[test]
    fn design_dimension_mismatch() {
        let cfg = quick("n2-paper");
        let d = parse_design("[[tmd]]\nomega = 10.0\nxi = 0.1\nmass = 0.02\nfloor = 3\n", Path::new("d.toml")).unwrap();
        assert!(matches!(evaluate_design(&cfg, &d), Err(Error::InvalidDesign(_))));
    }

    #[test]
    fn mode_labels() {
        for m in [Mode::CroSl, Mode::Standalone(SubstrateTag::TwoPoint)] {
            assert_eq!(m.to_string().parse::<Mode>().unwrap(), m);
        }
        assert_eq!(Mode::Standalone(SubstrateTag::TwoPoint).slug(), "standalone-2Px");
    }
}
