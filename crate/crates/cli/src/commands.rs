use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use idealflow::ideal::{entropy, PROPERTY_TOLERANCE};
use idealflow::io::{
    convergence_to_csv, matrix_to_csv, stationary_to_csv, to_json_pretty, CsvCell,
    IdealFlowDocument, MatrixDocument, SetMatrixDocument,
};
use idealflow::sim::Simulation;
use idealflow::{
    relative_flow, verify_identities, verify_inequality, verify_premagic, CheckpointSpacing,
    Classification, CountMatrix, DirectedGraph, Error, IdealFlowAnalysis, Matrix, ScaleMode,
    SimConfig, TrajectorySet, VerificationReport,
};
use serde::Serialize;

use crate::{Cli, Command, Format, OutputArgs};

pub const EXIT_VERIFY_FAILED: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_NOT_STRONGLY_CONNECTED: u8 = 3;

/// A failed command: exit code, primary error, and per-item details for stderr.
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
    pub details: Vec<String>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotStronglyConnected => EXIT_NOT_STRONGLY_CONNECTED,
            _ => EXIT_INPUT,
        };
        let details = match &e {
            Error::InvalidTrajectories(list) => list.iter().map(ToString::to_string).collect(),
            _ => Vec::new(),
        };
        Failure {
            code,
            error: e.into(),
            details,
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure {
            code: EXIT_INPUT,
            error,
            details: Vec::new(),
        }
    }
}

type CmdResult = Result<u8, Failure>;

struct Ctx {
    verbose: u8,
}

impl Ctx {
    fn info(&self, msg: impl AsRef<str>) {
        if self.verbose > 0 {
            eprintln!("{}", msg.as_ref());
        }
    }
}

pub fn run(cli: Cli) -> CmdResult {
    let ctx = Ctx {
        verbose: cli.verbose,
    };
    match cli.command {
        Command::Matrices { graph, output } => matrices(&ctx, &graph, &output),
        Command::Ideal {
            graph,
            output,
            mode,
            tol,
        } => ideal(&ctx, &graph, &output, mode.into(), tol),
        Command::Simulate {
            graph,
            output,
            agents,
            steps,
            seed,
            checkpoints,
            log_checkpoints,
            warmup,
            record,
        } => {
            let cfg = SimConfig {
                agents,
                steps,
                seed,
                checkpoints,
                record_trajectories: record,
                warmup,
                spacing: if log_checkpoints {
                    CheckpointSpacing::Logarithmic
                } else {
                    CheckpointSpacing::Even
                },
            };
            simulate(&ctx, &graph, &output, &cfg)
        }
        Command::Analyze {
            graph,
            trajectories,
            output,
        } => analyze(&ctx, &graph, &trajectories, &output),
        Command::Verify {
            graph,
            trajectories,
            output,
            tol,
            inject_defect,
        } => verify(
            &ctx,
            &graph,
            &trajectories,
            &output,
            tol,
            inject_defect.as_deref(),
        ),
    }
}

fn load_graph(path: &Path) -> Result<DirectedGraph, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading graph file {}", path.display()))?;
    Ok(DirectedGraph::parse_edge_list(&text)?)
}

fn load_trajectories(path: &Path, graph: &DirectedGraph) -> Result<TrajectorySet, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading trajectory file {}", path.display()))?;
    Ok(TrajectorySet::parse(&text, graph)?)
}

struct Writer<'a> {
    dir: &'a Path,
    format: Format,
    labels: &'a [String],
}

impl<'a> Writer<'a> {
    fn new(output: &'a OutputArgs, graph: &'a DirectedGraph) -> Result<Self, Failure> {
        fs::create_dir_all(&output.out)
            .with_context(|| format!("creating output directory {}", output.out.display()))?;
        Ok(Writer {
            dir: &output.out,
            format: output.format,
            labels: graph.labels(),
        })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn write(&self, name: &str, contents: &str) -> Result<(), Failure> {
        let path = self.path(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }

    /// Writes `<stem>.csv` or `<stem>.json` depending on the format flag.
    fn matrix<T: CsvCell + Clone + Serialize>(
        &self,
        stem: &str,
        m: &Matrix<T>,
    ) -> Result<(), Failure> {
        match self.format {
            Format::Csv => self.write(&format!("{stem}.csv"), &matrix_to_csv(self.labels, m)?),
            Format::Json => self.write(
                &format!("{stem}.json"),
                &to_json_pretty(&MatrixDocument::new(self.labels, m))?,
            ),
        }
    }

    fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), Failure> {
        self.write(name, &to_json_pretty(value)?)
    }
}

fn matrices(ctx: &Ctx, graph_path: &Path, output: &OutputArgs) -> CmdResult {
    let graph = load_graph(graph_path)?;
    let s = graph.structure_matrices();
    let w = Writer::new(output, &graph)?;
    w.matrix("A", &s.a)?;
    w.matrix("P", &s.p)?;
    w.matrix("E", &s.e)?;
    w.matrix("Phat", &s.phat)?;
    w.matrix("Ehat", &s.ehat)?;
    ctx.info(format!("wrote 5 matrices to {}", output.out.display()));

    let connected = graph.is_strongly_connected();
    let period = match graph.period() {
        Ok(p) => p.to_string(),
        Err(_) => "none".to_string(),
    };
    println!(
        "n={} edges={} strongly-connected={} period={}",
        graph.node_count(),
        graph.edge_count(),
        connected,
        period
    );
    Ok(0)
}

#[derive(Serialize)]
struct IdealReport<'a> {
    nodes: &'a [String],
    scale_mode: ScaleMode,
    classification: Classification,
    period: u32,
    periodic: bool,
    premagic: VerificationReport,
    stationary_entropy_bits: f64,
    row_entropy_bits: Vec<f64>,
}

fn ideal(
    ctx: &Ctx,
    graph_path: &Path,
    output: &OutputArgs,
    mode: ScaleMode,
    tol: f64,
) -> CmdResult {
    let graph = load_graph(graph_path)?;
    let analysis = IdealFlowAnalysis::compute(&graph, mode, tol).map_err(|e| match e {
        Error::SinkNode(i) => Failure::from(anyhow!(
            "SinkNode: node `{}` has no outgoing edge",
            graph.label(i)
        )),
        other => other.into(),
    })?;
    if analysis.is_periodic() {
        eprintln!(
            "warning: graph has period {}; the walk does not converge pointwise, ideal flow is the time average",
            analysis.period
        );
    }
    let w = Writer::new(output, &graph)?;
    match output.format {
        Format::Csv => w.matrix("ideal_flow", analysis.flow.matrix())?,
        Format::Json => w.json(
            "ideal_flow.json",
            &IdealFlowDocument::new(graph.labels(), &analysis.flow),
        )?,
    }
    w.write(
        "pi.csv",
        &stationary_to_csv(graph.labels(), &analysis.stationary)?,
    )?;
    let report = IdealReport {
        nodes: graph.labels(),
        scale_mode: mode,
        classification: analysis.classification,
        period: analysis.period,
        periodic: analysis.is_periodic(),
        premagic: verify_premagic(analysis.flow.matrix(), tol)?.label_with(&graph),
        stationary_entropy_bits: entropy(analysis.stationary.as_slice())?,
        row_entropy_bits: analysis.transition.row_entropies(),
    };
    w.json("report.json", &report)?;
    ctx.info(format!("wrote ideal flow to {}", output.out.display()));
    println!(
        "classification={} period={}",
        serde_json::to_value(analysis.classification.class)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default(),
        analysis.period
    );
    Ok(0)
}

fn simulate(ctx: &Ctx, graph_path: &Path, output: &OutputArgs, cfg: &SimConfig) -> CmdResult {
    let graph = load_graph(graph_path)?;
    let sim = Simulation::run(&graph, cfg).map_err(|e| match e {
        Error::SinkNode(i) => Failure::from(anyhow!(
            "SinkNode: node `{}` has no outgoing edge",
            graph.label(i)
        )),
        other => other.into(),
    })?;
    let w = Writer::new(output, &graph)?;
    let aggregate = sim.final_aggregate();
    w.matrix("R", &aggregate.counts)?;
    w.matrix("relative_flow", &relative_flow(aggregate)?)?;
    if let Some(trajectories) = &sim.trajectories {
        w.write("trajectories.txt", &trajectories.to_text(&graph))?;
    }

    let final_distance = match IdealFlowAnalysis::compute(
        &graph,
        ScaleMode::Probability,
        PROPERTY_TOLERANCE,
    ) {
        Ok(analysis) => {
            let series = sim.convergence(&analysis.flow)?;
            w.write("convergence.csv", &convergence_to_csv(&series))?;
            series.final_distance()
        }
        Err(Error::NotStronglyConnected) => {
            eprintln!("warning: graph is not strongly connected; counts are valid but there is no convergence target");
            None
        }
        Err(e) => return Err(e.into()),
    };
    ctx.info(format!(
        "wrote simulation outputs to {}",
        output.out.display()
    ));
    match final_distance {
        Some(d) => println!(
            "total_steps={} final_linf={}",
            aggregate.total_steps,
            idealflow::io::format_real(d)
        ),
        None => println!("total_steps={}", aggregate.total_steps),
    }
    Ok(0)
}

fn analyze(ctx: &Ctx, graph_path: &Path, trajectory_path: &Path, output: &OutputArgs) -> CmdResult {
    let graph = load_graph(graph_path)?;
    let trajectories = load_trajectories(trajectory_path, &graph)?;
    let utilization = trajectories.utilization(&graph.adjacency_matrix())?;
    let w = Writer::new(output, &graph)?;
    for (stem, levels) in utilization.named() {
        w.json(
            &format!("{stem}_set.json"),
            &SetMatrixDocument::new(graph.labels(), &levels.sets),
        )?;
        w.matrix(stem, &levels.counts)?;
        w.matrix(&format!("{stem}_bin"), &levels.structure)?;
    }
    ctx.info(format!("wrote 15 matrices to {}", output.out.display()));
    println!("trajectories={}", trajectories.len());
    Ok(0)
}

#[derive(Serialize)]
struct VerifyReport {
    holds: bool,
    reports: Vec<VerificationReport>,
    notices: Vec<String>,
}

fn inject(spec: &str, graph: &DirectedGraph, mats: [&mut CountMatrix; 4]) -> Result<(), Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [name, row, col, value] = parts[..] else {
        return Err(anyhow!("--inject-defect expects MATRIX:ROW:COL:VALUE").into());
    };
    let idx = |label: &str| {
        graph
            .index_of(label)
            .ok_or_else(|| Failure::from(Error::UnknownNode(label.to_string())))
    };
    let (i, j) = (idx(row)?, idx(col)?);
    let value: u64 = value
        .parse()
        .map_err(|_| anyhow!("bad injected value `{value}`"))?;
    let [f, d, l, t] = mats;
    let target = match name {
        "F" => f,
        "D" => d,
        "L" => l,
        "T" => t,
        other => return Err(anyhow!("unknown matrix `{other}` (expected F, D, L or T)").into()),
    };
    target[(i, j)] = value;
    Ok(())
}

fn verify(
    ctx: &Ctx,
    graph_path: &Path,
    trajectory_path: &Path,
    output: &OutputArgs,
    tol: f64,
    inject_defect: Option<&str>,
) -> CmdResult {
    let graph = load_graph(graph_path)?;
    let trajectories = load_trajectories(trajectory_path, &graph)?;
    let s = graph.structure_matrices();
    let u = trajectories.utilization(&s.a)?;
    let (mut f, mut d, mut l, mut t) = (
        u.flow.counts.clone(),
        u.od.counts.clone(),
        u.indirect.counts.clone(),
        u.alternative.counts.clone(),
    );
    if let Some(spec) = inject_defect {
        inject(spec, &graph, [&mut f, &mut d, &mut l, &mut t])?;
        ctx.info(format!("injected defect {spec}"));
    }

    let mut reports = vec![verify_inequality(&f, &s.a, &d)?];
    reports.extend(verify_identities(&f, &d, &l, &t, &s.a, &s.phat, &s.ehat)?);
    let mut notices = Vec::new();
    match IdealFlowAnalysis::compute(&graph, ScaleMode::MinNormalized, tol) {
        Ok(analysis) => reports.push(verify_premagic(analysis.flow.matrix(), tol)?),
        Err(Error::NotStronglyConnected | Error::SinkNode(_)) => {
            notices.push("premagic check skipped: graph is not strongly connected".to_string())
        }
        Err(e) => return Err(e.into()),
    }
    let reports: Vec<_> = reports.into_iter().map(|r| r.label_with(&graph)).collect();
    let holds = reports.iter().all(|r| r.holds);

    for notice in &notices {
        eprintln!("notice: {notice}");
    }
    for r in &reports {
        if r.holds {
            println!("PASS {}", r.identity);
        } else {
            println!("FAIL {} ({} defect cell(s))", r.identity, r.defect_count);
            for defect in &r.defects {
                println!(
                    "  ({}, {}): {} vs {}",
                    defect.row_label.as_deref().unwrap_or("?"),
                    defect.col_label.as_deref().unwrap_or("?"),
                    defect.lhs,
                    defect.rhs
                );
            }
        }
    }

    let w = Writer::new(output, &graph)?;
    w.json(
        "report.json",
        &VerifyReport {
            holds,
            reports,
            notices,
        },
    )?;
    Ok(if holds { 0 } else { EXIT_VERIFY_FAILED })
}
