//! Instance files and the `qpskew` command line.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path as FsPath, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::action::{normalize, ChoiceData, ChoiceOverrides, Normalized, RawAction, RawGenerator};
use crate::construct::ConstructError;
use crate::group::AbelianGroup;
use crate::pipeline::{Pipeline, PipelineError};
use crate::quiver::{Potential, Quiver};
use crate::scalar::Scalar;
use crate::skew::DEFAULT_TRUNCATION;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NOT_INVARIANT: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    NotInvariant(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => EXIT_INVALID,
            CliError::NotInvariant(_) => EXIT_NOT_INVARIANT,
            CliError::VerificationFailed(_) => EXIT_VERIFY_FAILED,
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(err: PipelineError) -> Self {
        match err {
            PipelineError::Construct(ConstructError::NotInvariant(w)) => CliError::NotInvariant(format!(
                "potential is not invariant: {} moves it, cycle `{}` differs",
                w.element, w.cycle
            )),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArrowSpec {
    pub id: String,
    pub source: String,
    pub target: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuiverSpec {
    pub vertices: Vec<String>,
    pub arrows: Vec<ArrowSpec>,
}

/// Images of one group generator; vertices and arrows left out are fixed.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(default)]
    pub vertices: BTreeMap<String, String>,
    /// Arrow id to a list of `(coefficient, arrow id)` pairs.
    #[serde(default)]
    pub arrows: BTreeMap<String, Vec<(String, String)>>,
}

/// One term of a potential; `cycle` lists arrows target to source, `a_n … a_1`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermSpec {
    pub coeff: String,
    pub cycle: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RSpec {
    pub from: String,
    pub to: String,
    pub vertices: Vec<String>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ChoicesSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub representatives: Option<Vec<String>>,
    #[serde(default)]
    pub kappa: BTreeMap<String, Vec<i64>>,
    #[serde(default, rename = "R")]
    pub r: Vec<RSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(default)]
    pub group: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conductor: Option<u32>,
    pub quiver: QuiverSpec,
    #[serde(default)]
    pub action: Vec<GeneratorSpec>,
    #[serde(default)]
    pub potential: Vec<TermSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choices: Option<ChoicesSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
}

/// A parsed and validated instance, before normalization.
pub struct Instance {
    pub conductor: u32,
    pub raw: RawAction,
    pub potential: Potential,
    pub choices: ChoicesSpec,
    pub truncation: usize,
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<InstanceFile, CliError> {
        serde_json::from_str(text).map_err(|e| invalid(format!("line {}, column {}: {e}", e.line(), e.column())))
    }

    pub fn load(path: &FsPath) -> Result<InstanceFile, CliError> {
        let text = fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn parse(&self) -> Result<Instance, CliError> {
        if self.group.contains(&0) {
            return Err(invalid("group: cyclic factors must be positive"));
        }
        let group = AbelianGroup::new(self.group.clone());
        let conductor = self.conductor.unwrap_or(group.exponent());
        if conductor == 0 || !conductor.is_multiple_of(group.exponent()) {
            return Err(invalid(format!("conductor {conductor} is not a multiple of the group exponent {}", group.exponent())));
        }
        let arrows: Vec<(&str, &str, &str)> =
            self.quiver.arrows.iter().map(|a| (a.id.as_str(), a.source.as_str(), a.target.as_str())).collect();
        let quiver = Quiver::new(&self.quiver.vertices, &arrows).map_err(|e| invalid(format!("quiver: {e}")))?;
        if self.action.len() > group.factors().len() {
            return Err(invalid(format!(
                "action: {} generators given for {} cyclic factors",
                self.action.len(),
                group.factors().len()
            )));
        }
        let scalar = |text: &str, at: &str| {
            Scalar::parse(text, conductor).map_err(|e| invalid(format!("{at}: bad coefficient `{text}`: {e}")))
        };
        let mut generators = Vec::new();
        for k in 0..group.factors().len() {
            let spec = self.action.get(k).cloned().unwrap_or_default();
            let mut vertices: Vec<usize> = (0..quiver.vertex_count()).collect();
            for (v, w) in &spec.vertices {
                let at = format!("action[{k}].vertices");
                let v = quiver.vertex(v).map_err(|e| invalid(format!("{at}: {e}")))?;
                vertices[v] = quiver.vertex(w).map_err(|e| invalid(format!("{at}: {e}")))?;
            }
            let mut images: Vec<Vec<(usize, Scalar)>> =
                (0..quiver.arrow_count()).map(|a| vec![(a, Scalar::one())]).collect();
            for (a, terms) in &spec.arrows {
                let at = format!("action[{k}].arrows.{a}");
                let a = quiver.arrow_by_id(a).map_err(|e| invalid(format!("{at}: {e}")))?;
                images[a] = terms
                    .iter()
                    .map(|(c, b)| Ok((quiver.arrow_by_id(b).map_err(|e| invalid(format!("{at}: {e}")))?, scalar(c, &at)?)))
                    .collect::<Result<_, CliError>>()?;
            }
            generators.push(RawGenerator { vertices, arrows: images });
        }
        let mut potential = Potential::zero(&quiver);
        for (n, t) in self.potential.iter().enumerate() {
            let at = format!("potential[{n}]");
            if t.cycle.is_empty() {
                return Err(invalid(format!("{at}: empty cycle")));
            }
            let ids: Vec<&str> = t.cycle.iter().map(String::as_str).collect();
            let p = quiver.path(&ids).map_err(|e| invalid(format!("{at}: {e}")))?;
            potential.add_cycle(&p, scalar(&t.coeff, &at)?).map_err(|e| invalid(format!("{at}: {e}")))?;
        }
        let truncation = self.truncation.unwrap_or(DEFAULT_TRUNCATION);
        if truncation == 0 {
            return Err(invalid("truncation must be positive"));
        }
        Ok(Instance {
            conductor,
            raw: RawAction { group, quiver, generators },
            potential,
            choices: self.choices.clone().unwrap_or_default(),
            truncation,
        })
    }
}

impl ChoicesSpec {
    fn overrides(&self, q: &Quiver, group: &AbelianGroup) -> Result<ChoiceOverrides, CliError> {
        let vertex = |v: &str| q.vertex(v).map_err(|e| invalid(format!("choices: {e}")));
        let reps = match &self.representatives {
            Some(list) => Some(list.iter().map(|v| vertex(v)).collect::<Result<Vec<_>, _>>()?),
            None => None,
        };
        let mut kappa = BTreeMap::new();
        for (v, res) in &self.kappa {
            let g = group.element(res).map_err(|e| invalid(format!("choices.kappa.{v}: {e}")))?;
            kappa.insert(vertex(v)?, g);
        }
        let mut r = BTreeMap::new();
        for spec in &self.r {
            let list = spec.vertices.iter().map(|v| vertex(v)).collect::<Result<Vec<_>, _>>()?;
            r.insert((vertex(&spec.from)?, vertex(&spec.to)?), list);
        }
        Ok(ChoiceOverrides { reps, kappa, r })
    }
}

/// The normalized action with the potential rewritten in the new arrows.
pub fn normalize_instance(inst: &Instance) -> Result<(Normalized, Potential), CliError> {
    let n = normalize(&inst.raw).map_err(|e| invalid(e.to_string()))?;
    let w = n.transform_potential(&inst.potential);
    Ok((n, w))
}

pub fn run_pipeline(inst: &Instance) -> Result<Pipeline, CliError> {
    let (n, w) = normalize_instance(inst)?;
    let overrides = inst.choices.overrides(n.action.quiver(), &inst.raw.group)?;
    Ok(Pipeline::new(n.action, w, &overrides, inst.truncation)?)
}

fn potential_spec(w: &Potential) -> Vec<TermSpec> {
    let q = w.quiver();
    w.terms()
        .iter()
        .map(|(c, k)| TermSpec { coeff: k.to_string(), cycle: c.arrows().map(|a| q.arrow(a).id.clone()).collect() })
        .collect()
}

fn quiver_spec(q: &Quiver) -> QuiverSpec {
    QuiverSpec {
        vertices: q.vertices().to_vec(),
        arrows: q
            .arrows()
            .iter()
            .map(|a| ArrowSpec {
                id: a.id.clone(),
                source: q.vertex_id(a.source).to_string(),
                target: q.vertex_id(a.target).to_string(),
            })
            .collect(),
    }
}

/// `qg.json`: the quiver `Q_G` plus the pair `(rep, character)` of each vertex and the
/// distinguished arrow of each arrow.
pub fn qg_json(p: &Pipeline) -> Value {
    let q = p.act.quiver();
    let qq = &p.qg.quiver;
    let vertices: Vec<Value> = p
        .qg
        .vertices
        .iter()
        .enumerate()
        .map(|(k, v)| {
            serde_json::json!({
                "id": qq.vertex_id(k),
                "rep": q.vertex_id(v.rep),
                "character": v.character.name(),
            })
        })
        .collect();
    let arrows: Vec<Value> = p
        .qg
        .arrows
        .iter()
        .enumerate()
        .map(|(k, a)| {
            serde_json::json!({
                "id": qq.arrow(k).id,
                "source": qq.vertex_id(a.source),
                "target": qq.vertex_id(a.target),
                "origin": q.arrow(a.origin).id,
            })
        })
        .collect();
    serde_json::json!({
        "group": p.act.group().factors(),
        "quiver": quiver_spec(qq),
        "vertices": vertices,
        "arrows": arrows,
    })
}

pub fn wg_json(p: &Pipeline, conductor: u32) -> Value {
    serde_json::json!({ "conductor": conductor, "potential": potential_spec(&p.wg) })
}

pub fn choices_json(p: &Pipeline) -> Value {
    let q = p.act.quiver();
    let grp = p.act.group();
    let ch: &ChoiceData = &p.choices;
    let kappa: BTreeMap<&str, &[u32]> = (0..q.vertex_count()).map(|v| (q.vertex_id(v), grp.residues(ch.kappa[v]))).collect();
    let r: Vec<RSpec> = ch
        .r
        .iter()
        .map(|(&(i, j), list)| RSpec {
            from: q.vertex_id(i).into(),
            to: q.vertex_id(j).into(),
            vertices: list.iter().map(|&v| q.vertex_id(v).to_string()).collect(),
        })
        .collect();
    let distinguished: Vec<Value> = ch
        .distinguished
        .iter()
        .map(|a| serde_json::json!({ "arrow": q.arrow(*a).id, "character": ch.chi[a].name() }))
        .collect();
    serde_json::json!({
        "representatives": ch.reps.iter().map(|&v| q.vertex_id(v)).collect::<Vec<_>>(),
        "kappa": kappa,
        "R": r,
        "distinguished": distinguished,
    })
}

/// The normalized instance and its base changes.
pub fn normalized_json(file: &InstanceFile, inst: &Instance, n: &Normalized, w: &Potential) -> Value {
    let q = n.action.quiver();
    let grp = n.action.group();
    let action: Vec<GeneratorSpec> = (0..grp.factors().len())
        .map(|k| {
            let g = grp.generator(k);
            let mut spec = GeneratorSpec::default();
            for v in 0..q.vertex_count() {
                let w = n.action.vertex_image(g, v);
                if w != v {
                    spec.vertices.insert(q.vertex_id(v).into(), q.vertex_id(w).into());
                }
            }
            for a in 0..q.arrow_count() {
                let (c, b) = n.action.arrow_image(g, a);
                if b != a || !c.is_one() {
                    spec.arrows.insert(q.arrow(a).id.clone(), vec![(c.to_string(), q.arrow(b).id.clone())]);
                }
            }
            spec
        })
        .collect();
    let out = InstanceFile {
        group: grp.factors().to_vec(),
        conductor: Some(inst.conductor),
        quiver: quiver_spec(q),
        action,
        potential: potential_spec(w),
        choices: file.choices.clone(),
        truncation: file.truncation,
    };
    let old = &n.old_quiver;
    let changes: Vec<Value> = n
        .changes
        .iter()
        .map(|c| {
            serde_json::json!({
                "source": old.vertex_id(c.source),
                "target": old.vertex_id(c.target),
                "old": c.old_arrows.iter().map(|&a| old.arrow(a).id.clone()).collect::<Vec<_>>(),
                "new": c.new_arrows.iter().map(|&a| q.arrow(a).id.clone()).collect::<Vec<_>>(),
                "matrix": c.matrix.iter().map(|r| r.iter().map(Scalar::to_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
            })
        })
        .collect();
    serde_json::json!({ "instance": out, "identity": n.is_identity(), "changes": changes })
}

#[derive(Parser, Debug)]
#[command(name = "qpskew", version, about = "Skew group algebras of quivers with potentials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute Q_G and W_G; writes qg.json, wg.json and choices.json.
    Build {
        file: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run every property check and the dg-isomorphism checks; writes report.json.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        #[arg(long)]
        negative_control: bool,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Rewrite the action in monomial form; prints the new instance and base changes.
    Normalize {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn write_json(dir: &FsPath, name: &str, value: &Value) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| invalid(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value).expect("json");
    text.push('\n');
    fs::write(&path, text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn load(file: &FsPath) -> Result<(InstanceFile, Instance), CliError> {
    let f = InstanceFile::load(file)?;
    let inst = f.parse()?;
    Ok((f, inst))
}

pub fn cmd_build(file: &FsPath, out: &FsPath) -> Result<String, CliError> {
    let (_, inst) = load(file)?;
    let p = run_pipeline(&inst)?;
    write_json(out, "qg.json", &qg_json(&p))?;
    write_json(out, "wg.json", &wg_json(&p, inst.conductor))?;
    write_json(out, "choices.json", &choices_json(&p))?;
    Ok(format!(
        "Q_G: {} vertices, {} arrows\nW_G: {}",
        p.qg.quiver.vertex_count(),
        p.qg.quiver.arrow_count(),
        p.wg
    ))
}

pub fn cmd_verify(file: &FsPath, max_len: usize, negative_control: bool, out: &FsPath) -> Result<String, CliError> {
    let (_, inst) = load(file)?;
    let p = run_pipeline(&inst)?;
    let report = p.verify(max_len, negative_control)?;
    let value = serde_json::json!({
        "negative_control": negative_control,
        "max_len": max_len,
        "passed": report.passed(),
        "checks": report.checks,
    });
    write_json(out, "report.json", &value)?;
    let lines: Vec<String> = report
        .checks
        .iter()
        .map(|c| format!("{} {} ({} cases)", if c.passed { "PASS" } else { "FAIL" }, c.name, c.cases))
        .collect();
    match report.first_failure() {
        None => Ok(lines.join("\n")),
        Some(c) => {
            let f = c.failure.as_ref().expect("failed check has a failure");
            Err(CliError::VerificationFailed(format!(
                "{}\n{} at {}: {} != {}",
                lines.join("\n"),
                c.name,
                f.generator,
                f.lhs,
                f.rhs
            )))
        }
    }
}

pub fn cmd_normalize(file: &FsPath, out: Option<&FsPath>) -> Result<String, CliError> {
    let (f, inst) = load(file)?;
    let (n, w) = normalize_instance(&inst)?;
    let value = normalized_json(&f, &inst, &n, &w);
    match out {
        Some(dir) => {
            write_json(dir, "normalized.json", &value["instance"])?;
            write_json(dir, "changes.json", &value["changes"])?;
            Ok(format!("{} span(s) changed", n.changes.len()))
        }
        None => Ok(serde_json::to_string_pretty(&value).expect("json")),
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with(args: impl IntoIterator<Item = String>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    if let Some(n) = std::env::var("QPSKEW_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let result = match &cli.command {
        Command::Build { file, out } => cmd_build(file, out),
        Command::Verify { file, max_len, negative_control, out } => cmd_verify(file, *max_len, *negative_control, out),
        Command::Normalize { file, out } => cmd_normalize(file, out.as_deref()),
    };
    match result {
        Ok(text) => {
            let _ = writeln!(std::io::stdout(), "{text}");
            EXIT_OK
        }
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
