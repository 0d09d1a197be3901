//! Command-line front end: JSON job in, JSON result (and optional SVG) out.
//!
//! Exit codes: 0 success (and YES for `two-center`), 1 NO for `two-center`,
//! 2 malformed input or validation failure.

use std::io::{IsTerminal, Read, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::arcgeom::{ArcChain, Circle};
use crate::ballops::{ball_hull, ball_intersection, chebyshev_set, circumradius, PointSet};
use crate::error::GeomError;
use crate::norm::{Gauge, NormSpec, Vec2};
use crate::svg::{write_svg, Scene};
use crate::sweep::{decide_with, DecideOptions, Verdict, Witness};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Hull,
    Intersection,
    Chebyshev,
    TwoCenter,
    ValidateNorm,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Hull => "hull",
            Command::Intersection => "intersection",
            Command::Chebyshev => "chebyshev",
            Command::TwoCenter => "two-center",
            Command::ValidateNorm => "validate-norm",
        }
    }
}

/// A job file. Command-line flags override the matching fields.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub norm: NormSpec,
    #[serde(default)]
    pub points: Vec<[f64; 2]>,
    #[serde(default)]
    pub command: Option<Command>,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub r1: Option<f64>,
    #[serde(default)]
    pub r2: Option<f64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub svg: Option<PathBuf>,
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub exhaustive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcDoc {
    pub center: [f64; 2],
    pub radius: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub start: [f64; 2],
    pub end: [f64; 2],
    pub full: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub label: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainDoc {
    pub name: String,
    /// `empty`, `point` or `region`.
    pub kind: String,
    pub vertices: Vec<[f64; 2]>,
    pub arcs: Vec<ArcDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessDoc {
    pub center1: [f64; 2],
    pub center2: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub host: Option<usize>,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDoc {
    pub command: String,
    pub version: String,
    pub tolerance: f64,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub verdict: Option<String>,
    /// Scalar results, keyed by name (sorted in the output).
    #[serde(default)]
    pub values: std::collections::BTreeMap<String, serde_json::Value>,
    #[serde(default)]
    pub chains: Vec<ChainDoc>,
    #[serde(default)]
    pub witnesses: Vec<WitnessDoc>,
    pub timing_ms: f64,
}

#[derive(Debug, Parser)]
#[command(name = "normplane", version, about = "Ball hulls, ball intersections and 2-center decisions in strictly convex normed planes")]
pub struct Args {
    /// Command to run; overrides the job file.
    #[arg(value_enum)]
    pub command_pos: Option<Command>,
    #[arg(long, value_enum)]
    pub command: Option<Command>,
    /// Job file (JSON); `-` or absent reads standard input.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Result path; standard output by default.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Report a witness for every sweep segment that has one.
    #[arg(long)]
    pub exhaustive: bool,
}

/// Rounds to 12 significant digits; also maps `-0` to `0`.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().unwrap()
}

fn pt(v: Vec2) -> [f64; 2] {
    [sig12(v.x), sig12(v.y)]
}

pub fn chain_doc(name: &str, chain: &ArcChain) -> ChainDoc {
    let kind = match chain {
        ArcChain::Empty => "empty",
        ArcChain::Point(_) => "point",
        ArcChain::Region(_) => "region",
    };
    ChainDoc {
        name: name.into(),
        kind: kind.into(),
        vertices: chain.vertices().into_iter().map(pt).collect(),
        arcs: chain
            .arcs()
            .iter()
            .map(|a| ArcDoc {
                center: pt(a.circle.center),
                radius: sig12(a.circle.radius),
                t_start: sig12(a.t_start),
                t_end: sig12(a.t_end),
                start: pt(a.start),
                end: pt(a.end),
                full: a.full,
                label: a.label,
            })
            .collect(),
    }
}

fn witness_doc(w: &Witness) -> WitnessDoc {
    WitnessDoc {
        center1: pt(w.center1),
        center2: pt(w.center2),
        host: w.host,
        t: sig12(w.t),
    }
}

fn num(x: f64) -> serde_json::Value {
    serde_json::json!(sig12(x))
}

/// Input problem, reported with exit code 2.
#[derive(Debug)]
pub struct JobError(pub String);

impl From<GeomError> for JobError {
    fn from(e: GeomError) -> JobError {
        JobError(e.to_string())
    }
}

fn need(v: Option<f64>, field: &str) -> Result<f64, JobError> {
    match v {
        None => Err(JobError(format!("missing field `{field}` required by this command"))),
        Some(x) if !x.is_finite() || x <= 0.0 => Err(JobError(format!("field `{field}` must be positive and finite, got {x}"))),
        Some(x) => Ok(x),
    }
}

fn gauge_of(job: &JobSpec) -> Result<Gauge, JobError> {
    let g = Gauge::from_spec(&job.norm).map_err(|e| JobError(format!("field `norm`: {e}")))?;
    if !g.validate_strict_convexity(4096) {
        return Err(JobError(
            "field `norm`: unit circle fails the strict convexity check (a sampled boundary chord lies on the boundary)".into(),
        ));
    }
    match job.tolerance {
        None => Ok(g),
        Some(t) if t.is_finite() && t > 0.0 && t < 1e-2 => Ok(g.with_tolerance(t)),
        Some(t) => Err(JobError(format!("field `tolerance` must lie in (0, 0.01), got {t}"))),
    }
}

fn points_of(job: &JobSpec) -> Result<PointSet, JobError> {
    if job.points.is_empty() {
        return Err(JobError("field `points` must be nonempty for this command".into()));
    }
    let v: Vec<Vec2> = job.points.iter().map(|&[x, y]| Vec2::new(x, y)).collect();
    PointSet::new(&v).map_err(|e| JobError(format!("field `points`: {e}")))
}

fn execute(job: &JobSpec, command: Command, doc: &mut ResultDoc) -> Result<(Option<Scene>, Gauge), JobError> {
    let g = gauge_of(job)?;
    doc.tolerance = g.tolerance();
    let mut scene = None;
    match command {
        Command::ValidateNorm => {
            let (lo, hi) = g.radial_bounds();
            doc.values.insert("strictly_convex".into(), true.into());
            doc.values.insert("radial_min".into(), num(lo));
            doc.values.insert("radial_max".into(), num(hi));
        }
        Command::Hull => {
            let lambda = need(job.lambda, "lambda")?;
            let k = points_of(job)?;
            let h = ball_hull(&g, &k, lambda)?;
            let (lk, _) = circumradius(&g, &k);
            doc.values.insert("lambda".into(), num(lambda));
            doc.values.insert("lambda_k".into(), num(lk));
            doc.values.insert("near_convex_hull".into(), h.near_convex_hull.into());
            doc.values.insert("vertex_indices".into(), serde_json::json!(h.vertex_indices));
            doc.chains.push(chain_doc("hull", &h.chain));
            scene = Some(Scene::new(k.points()).layer("hull", h.chain));
        }
        Command::Intersection => {
            let lambda = need(job.lambda, "lambda")?;
            let k = points_of(job)?;
            let bi = ball_intersection(&g, &k, lambda)?;
            doc.values.insert("lambda".into(), num(lambda));
            doc.values.insert("empty".into(), bi.chain.is_empty().into());
            doc.chains.push(chain_doc("intersection", &bi.chain));
            scene = Some(Scene::new(k.points()).layer("intersection", bi.chain));
        }
        Command::Chebyshev => {
            let k = points_of(job)?;
            let (lk, _) = circumradius(&g, &k);
            let c = chebyshev_set(&g, &k);
            doc.values.insert("lambda_k".into(), num(lk));
            doc.chains.push(chain_doc("chebyshev", &c));
            let bi = ball_intersection(&g, &k, lk)?.chain;
            scene = Some(Scene::new(k.points()).layer("chebyshev", c).layer("intersection", bi));
        }
        Command::TwoCenter => {
            let r1 = need(job.r1, "r1")?;
            let r2 = need(job.r2, "r2")?;
            let k = points_of(job)?;
            let opts = DecideOptions {
                parallel: true,
                exhaustive: job.exhaustive,
                ..Default::default()
            };
            let d = decide_with(&g, &k, r1, r2, &opts)?;
            doc.values.insert("r1".into(), num(r1));
            doc.values.insert("r2".into(), num(r2));
            doc.values.insert("events".into(), d.stats.events.into());
            doc.values.insert("segments".into(), d.stats.segments.into());
            doc.verdict = Some(match d.verdict {
                Verdict::Yes => "YES",
                Verdict::No => "NO",
            }
            .into());
            let mut ws: Vec<Witness> = d.witness.into_iter().collect();
            for w in d.all_witnesses {
                if !ws.contains(&w) {
                    ws.push(w);
                }
            }
            doc.witnesses = ws.iter().map(witness_doc).collect();
            let mut sc = Scene::new(k.points());
            if let Some(w) = ws.first() {
                sc = sc
                    .layer("disc1", ArcChain::disc(&g, Circle { center: w.center1, radius: r1 }, None))
                    .layer("disc2", ArcChain::disc(&g, Circle { center: w.center2, radius: r2 }, None));
            }
            if d.verdict == Verdict::No {
                doc.exit_code = EXIT_NO;
            }
            scene = Some(sc);
        }
    }
    Ok((scene, g))
}

/// Runs one job. `command` overrides the job's own command.
pub fn run(job: &JobSpec, command: Option<Command>) -> (i32, ResultDoc) {
    let start = Instant::now();
    let command = command.or(job.command);
    let mut doc = ResultDoc {
        command: command.map(|c| c.name()).unwrap_or("").into(),
        version: crate::VERSION.into(),
        tolerance: crate::norm::DEFAULT_TOLERANCE,
        exit_code: EXIT_OK,
        error: None,
        verdict: None,
        values: Default::default(),
        chains: Vec::new(),
        witnesses: Vec::new(),
        timing_ms: 0.0,
    };
    let res = match command {
        None => Err(JobError("missing field `command` (give it in the job file or on the command line)".into())),
        Some(c) => execute(job, c, &mut doc).and_then(|(scene, g)| {
            if let (Some(path), Some(scene)) = (&job.svg, scene) {
                write_svg(&g, &scene, path).map_err(|e| JobError(format!("field `svg`: {e}")))?;
            }
            Ok(())
        }),
    };
    if let Err(JobError(msg)) = res {
        doc = ResultDoc {
            error: Some(msg),
            exit_code: EXIT_INPUT,
            verdict: None,
            values: Default::default(),
            chains: Vec::new(),
            witnesses: Vec::new(),
            ..doc
        };
    }
    doc.timing_ms = (start.elapsed().as_secs_f64() * 1e3 * 1e3).round() / 1e3;
    (doc.exit_code, doc)
}

/// Parses a job from JSON text, naming the offending field on failure.
pub fn parse_job(text: &str) -> Result<JobSpec, JobError> {
    serde_json::from_str(text).map_err(|e| JobError(format!("malformed job: {e}")))
}

fn diagnose(msg: &str) {
    let mut err = std::io::stderr();
    let color = err.is_terminal() && std::env::var_os("NO_COLOR").is_none();
    let tag = if color { "\x1b[31merror\x1b[0m" } else { "error" };
    let _ = writeln!(err, "{tag}: {msg}");
}

fn read_input(path: &Option<PathBuf>) -> std::io::Result<String> {
    let mut s = String::new();
    match path {
        Some(p) if p.as_os_str() != "-" => s = std::fs::read_to_string(p)?,
        _ => {
            std::io::stdin().read_to_string(&mut s)?;
        }
    }
    Ok(s)
}

fn emit(doc: &ResultDoc, path: &Option<PathBuf>) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(doc).expect("result serializes");
    text.push('\n');
    match path {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

/// Entry point shared by the binary; returns the process exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let command = args.command.or(args.command_pos);
    let text = match read_input(&args.input) {
        Ok(t) => t,
        Err(e) => {
            diagnose(&format!("cannot read input: {e}"));
            return EXIT_INPUT;
        }
    };
    let mut job = match parse_job(&text) {
        Ok(j) => j,
        Err(JobError(msg)) => {
            diagnose(&msg);
            let doc = ResultDoc {
                command: command.map(|c| c.name()).unwrap_or("").into(),
                version: crate::VERSION.into(),
                tolerance: crate::norm::DEFAULT_TOLERANCE,
                exit_code: EXIT_INPUT,
                error: Some(msg),
                verdict: None,
                values: Default::default(),
                chains: Vec::new(),
                witnesses: Vec::new(),
                timing_ms: 0.0,
            };
            let _ = emit(&doc, &args.output);
            return EXIT_INPUT;
        }
    };
    if args.output.is_some() {
        job.output = args.output.clone();
    }
    if args.svg.is_some() {
        job.svg = args.svg.clone();
    }
    if args.tolerance.is_some() {
        job.tolerance = args.tolerance;
    }
    job.exhaustive |= args.exhaustive;
    let (code, doc) = run(&job, command);
    if let Some(e) = &doc.error {
        diagnose(e);
    }
    if let Err(e) = emit(&doc, &job.output) {
        diagnose(&format!("cannot write result: {e}"));
        return EXIT_INPUT;
    }
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job(text: &str) -> JobSpec {
        parse_job(text).unwrap()
    }

    #[test]
    fn sig12_rounds() {
        assert_eq!(sig12(0.1 + 0.2), 0.3);
        assert_eq!(sig12(-0.0), 0.0);
        assert_eq!(sig12(3f64.sqrt() / 2.0), 0.866025403784);
    }

    #[test]
    fn chebyshev_example() {
        let (code, doc) = run(&job(r#"{"norm":{"type":"lp","p":2},"points":[[0,0],[2,0]],"command":"chebyshev"}"#), None);
        assert_eq!(code, 0);
        assert_eq!(doc.chains[0].vertices, vec![[1.0, 0.0]]);
        assert_eq!(doc.values["lambda_k"], serde_json::json!(1.0));
    }

    #[test]
    fn exit_codes() {
        let pts = r#"[[0,0],[0,2],[10,0],[10,2]]"#;
        let yes = format!(r#"{{"norm":{{"type":"lp","p":2}},"points":{pts},"r1":1.5,"r2":1}}"#);
        let (code, doc) = run(&job(&yes), Some(Command::TwoCenter));
        assert_eq!(code, EXIT_OK);
        assert_eq!(doc.verdict.as_deref(), Some("YES"));
        let no = format!(r#"{{"norm":{{"type":"lp","p":2}},"points":{pts},"r1":0.9,"r2":0.5}}"#);
        assert_eq!(run(&job(&no), Some(Command::TwoCenter)).0, EXIT_NO);
        let bad = r#"{"norm":{"type":"lp","p":1.0},"points":[[0,0]],"command":"hull","lambda":1}"#;
        let (code, doc) = run(&job(bad), None);
        assert_eq!(code, EXIT_INPUT);
        assert!(doc.error.unwrap().contains("p outside admitted strictly convex range"));
    }

    #[test]
    fn diagnostics_name_the_field() {
        let (code, doc) = run(&job(r#"{"norm":{"type":"lp","p":2},"points":[[0,0]],"command":"hull"}"#), None);
        assert_eq!(code, EXIT_INPUT);
        assert!(doc.error.unwrap().contains("`lambda`"));
        let (_, doc) = run(&job(r#"{"norm":{"type":"lp","p":2},"command":"chebyshev"}"#), None);
        assert!(doc.error.unwrap().contains("`points`"));
        let e = parse_job(r#"{"norm":{"type":"lp","p":2},"pointz":[]}"#).unwrap_err();
        assert!(e.0.contains("pointz"));
    }

    #[test]
    fn result_round_trips() {
        let (_, doc) = run(&job(r#"{"norm":{"type":"lp","p":3},"points":[[0,0],[1,0],[0.3,0.8]],"command":"hull","lambda":1.5}"#), None);
        let text = serde_json::to_string(&doc).unwrap();
        let back: ResultDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(doc.chains[0].arcs.len(), 3);
    }
}
