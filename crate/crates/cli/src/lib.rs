//! Command implementations behind the `dqf` binary.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dqf::analysis::{anomaly_scores, knn_loo, loo_classify_collection, PipelineConfig, SvmParams};
use dqf::batch::{all_pairs_dqf, summarize, AverageScaling, BatchConfig, Support};
use dqf::io::{
    read_dataset, write_anomaly_csv, write_dqf_csv, write_points_csv, write_predictions_csv,
    write_summaries_csv, write_zplot_csv, zplot_svg, Dataset, InputKind, LabelColumn, PairFilter,
    RunConfig, ZplotRow, ZplotSeries,
};
use dqf::synthetic::{SynthSpec, BALL_RADIUS, HOLE_RADIUS};
use dqf::{
    compute_pair_frame, gram_from_kernel, sigma_sweep, ConeConfig, DqfError, InnerProductView,
    KernelSpec, Result,
};

#[derive(Debug, Parser)]
#[command(name = "dqf", version, about = "Pairwise depth quantile functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// All-pairs functions and per-observation summaries.
    Compute(ComputeArgs),
    /// Z1-Z2 coordinates of one pair, optionally over an RBF bandwidth sweep.
    Zplot(ZplotArgs),
    /// Leave-one-out classification from class-conditional summaries.
    Classify(ClassifyArgs),
    /// Single-level anomaly scores.
    Anomaly(AnomalyArgs),
    /// Write a synthetic dataset.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PairsArg {
    All,
    Within,
    Between,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    Linear,
    Rbf,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Input CSV with a header row.
    #[arg(long)]
    pub input: PathBuf,
    /// Treat the input as a Gram matrix instead of coordinates.
    #[arg(long)]
    pub gram: bool,
    /// Label column, by header name or 0-based index.
    #[arg(long, value_name = "COL")]
    pub labels: Option<String>,
    /// Full cone opening angle in degrees.
    #[arg(long, value_name = "DEG", default_value_t = 90.0)]
    pub alpha: f64,
    /// Tip support as a multiple of the largest entry offset.
    #[arg(long, value_name = "F", default_value_t = dqf::quantile::DEFAULT_MARGIN)]
    pub margin: f64,
    /// Number of δ grid points.
    #[arg(long, value_name = "M", default_value_t = dqf::quantile::DEFAULT_GRID)]
    pub grid: usize,
    /// Leave the two pair points out of the depth counts.
    #[arg(long)]
    pub exclude_pair_points: bool,
    #[arg(long, value_enum, default_value_t = KernelArg::Linear)]
    pub kernel: KernelArg,
    /// RBF bandwidth: K(x, y) = exp(-|x - y|^2 / sigma^2).
    #[arg(long, value_name = "S")]
    pub sigma: Option<f64>,
    #[arg(long, value_name = "N", default_value_t = 0)]
    pub seed: u64,
    /// Output directory (created if missing).
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Which pairs to write to dqf.csv.
    #[arg(long, value_enum, default_value_t = PairsArg::All)]
    pub pairs: PairsArg,
    /// Divide observation averages by n instead of the number of partners.
    #[arg(long)]
    pub sample_size_scaling: bool,
}

#[derive(Debug, Args)]
pub struct ZplotArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub i: usize,
    #[arg(long)]
    pub j: usize,
    /// Comma-separated RBF bandwidths; draws one path per observation.
    #[arg(long, value_name = "S1,S2,...", value_delimiter = ',')]
    pub sweep: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// fPCA scores kept per class block.
    #[arg(long, default_value_t = dqf::analysis::DEFAULT_COMPONENTS)]
    pub components: usize,
    /// One fPCA model shared by all class blocks.
    #[arg(long)]
    pub fpca_joint: bool,
    #[arg(long, default_value_t = 1.0)]
    pub cost: f64,
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    /// Also report a k-nearest-neighbour baseline on the raw coordinates.
    #[arg(long, value_name = "K")]
    pub knn: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AnomalyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_name = "D", default_value_t = dqf::analysis::DEFAULT_DELTA_STAR)]
    pub delta_star: f64,
    /// Divide by the value at δ = 1.
    #[arg(long)]
    pub normalized: bool,
    /// Label value marking outliers; with --labels, the ROC AUC is reported.
    #[arg(long, value_name = "Y", default_value_t = 1)]
    pub outlier_label: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SynthKind {
    Ball,
    AnnulusShell,
    BallVsShell,
    DiscVsRing,
    ParaboloidLift,
    Contaminated,
    Blobs,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub kind: SynthKind,
    /// Points (per class for labeled kinds; inliers for contaminated).
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 8)]
    pub d: usize,
    #[arg(long, default_value_t = BALL_RADIUS)]
    pub radius: f64,
    #[arg(long, default_value_t = HOLE_RADIUS)]
    pub r_in: f64,
    #[arg(long, default_value_t = BALL_RADIUS)]
    pub r_out: f64,
    #[arg(long, default_value_t = 5)]
    pub outliers: usize,
    #[arg(long, default_value_t = 10.0)]
    pub separation: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV file.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

/// Runs one command; the caller maps errors to exit codes.
pub fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Compute(a) => cmd_compute(&a),
        Command::Zplot(a) => cmd_zplot(&a),
        Command::Classify(a) => cmd_classify(&a),
        Command::Anomaly(a) => cmd_anomaly(&a),
        Command::Synth(a) => cmd_synth(&a),
    }
}

fn kernel_spec(c: &CommonArgs) -> Result<KernelSpec> {
    match (c.kernel, c.sigma) {
        (KernelArg::Linear, None) => Ok(KernelSpec::Linear),
        (KernelArg::Linear, Some(_)) => Err(DqfError::usage("--sigma needs --kernel rbf")),
        (KernelArg::Rbf, Some(s)) => KernelSpec::rbf(s),
        (KernelArg::Rbf, None) => Err(DqfError::usage("--kernel rbf needs --sigma")),
    }
}

fn run_config(command: &str, c: &CommonArgs) -> Result<RunConfig> {
    Ok(RunConfig {
        command: command.to_string(),
        inputs: vec![c.input.clone()],
        input_kind: if c.gram {
            InputKind::Gram
        } else {
            InputKind::Coords
        },
        label_column: c.labels.clone(),
        aperture_deg: c.alpha,
        margin: c.margin,
        grid: c.grid,
        include_pair_points: !c.exclude_pair_points,
        kernel: kernel_spec(c)?,
        seed: c.seed,
        out_dir: c.out.clone(),
        ..RunConfig::default()
    })
}

fn load(c: &CommonArgs) -> Result<Dataset> {
    let kind = if c.gram {
        InputKind::Gram
    } else {
        InputKind::Coords
    };
    let label = c.labels.as_deref().map(LabelColumn::from);
    read_dataset(&c.input, kind, label.as_ref())
}

/// The inner-product view after applying the kernel choice.
fn view_for(c: &CommonArgs, data: &Dataset) -> Result<InnerProductView> {
    match kernel_spec(c)? {
        KernelSpec::Linear => data.view(),
        spec if data.kind == InputKind::Coords => {
            InnerProductView::from_gram(gram_from_kernel(&data.cloud()?, spec)?)
        }
        _ => Err(DqfError::usage(
            "an RBF kernel needs coordinate input, not a Gram matrix",
        )),
    }
}

fn batch_config(c: &CommonArgs) -> Result<BatchConfig> {
    if c.grid == 0 {
        return Err(DqfError::usage("--grid must be at least 1"));
    }
    Ok(BatchConfig {
        cone: ConeConfig::new(c.alpha)?.include_pair_points(!c.exclude_pair_points),
        support: Support::Auto { margin: c.margin },
        grid_size: c.grid,
    })
}

fn out_dir(dir: &Path) -> Result<&Path> {
    std::fs::create_dir_all(dir)?;
    Ok(dir)
}

fn warnings_text(view: &InnerProductView) -> String {
    view.warnings()
        .iter()
        .map(|w| format!("warning: {w}\n"))
        .collect()
}

pub fn cmd_compute(a: &ComputeArgs) -> Result<String> {
    let c = &a.common;
    let mut cfg = run_config("compute", c)?;
    cfg.pairs = match a.pairs {
        PairsArg::All => PairFilter::All,
        PairsArg::Within => PairFilter::Within,
        PairsArg::Between => PairFilter::Between,
    };
    let data = load(c)?;
    let view = view_for(c, &data)?;
    let coll = all_pairs_dqf(&view, &batch_config(c)?)?;
    let scaling = if a.sample_size_scaling {
        AverageScaling::SampleSize
    } else {
        AverageScaling::PairCount
    };
    let summaries = summarize(&coll, data.labels.as_deref(), scaling)?;

    let dir = out_dir(&c.out)?;
    let rows = write_dqf_csv(&dir.join("dqf.csv"), &coll, &summaries, cfg.pairs)?;
    write_summaries_csv(&dir.join("summaries.csv"), &summaries)?;
    cfg.write(dir)?;

    let mut msg = warnings_text(&view);
    for (i, j) in &coll.skipped {
        msg += &format!("warning: pair ({i}, {j}) skipped: observations coincide\n");
    }
    msg += &format!(
        "{} pair functions on a grid of {} (support half-width {}); {rows} rows written to {}\n",
        coll.len(),
        coll.grid().len(),
        dqf::io::fmt_sig(coll.config.tip.half_width, 9),
        dir.join("dqf.csv").display()
    );
    Ok(msg)
}

pub fn cmd_zplot(a: &ZplotArgs) -> Result<String> {
    let c = &a.common;
    let cfg = run_config("zplot", c)?;
    let data = load(c)?;
    let n = data.n();
    if a.i >= n || a.j >= n || a.i == a.j {
        return Err(DqfError::usage(format!(
            "pair ({}, {}) invalid for {n} observations",
            a.i, a.j
        )));
    }
    let labels = data.labels.clone();
    let class = |k: usize| labels.as_ref().map(|y| y[k]);
    let others = (0..n).filter(|&k| k != a.i && k != a.j);

    let (rows, series) = if a.sweep.is_empty() {
        let view = view_for(c, &data)?;
        let f = compute_pair_frame(&view, a.i, a.j)?;
        let rows: Vec<ZplotRow> = others
            .map(|k| ZplotRow {
                k,
                z1: f.z1[k],
                z2: f.z2[k],
                sigma: None,
            })
            .collect();
        let series = rows
            .iter()
            .map(|r| ZplotSeries {
                k: r.k,
                points: vec![(r.z1, r.z2)],
                class: class(r.k),
            })
            .collect::<Vec<_>>();
        (rows, series)
    } else {
        let mut sigmas = a.sweep.clone();
        sigmas.sort_by(f64::total_cmp);
        let sweep = sigma_sweep(&data.cloud()?, a.i, a.j, &sigmas)?;
        let mut rows = Vec::new();
        let mut series = Vec::new();
        for k in others {
            let path = sweep.trajectory(k);
            rows.extend(path.iter().map(|&(s, z1, z2)| ZplotRow {
                k,
                z1,
                z2,
                sigma: Some(s),
            }));
            series.push(ZplotSeries {
                k,
                points: path.iter().map(|&(_, z1, z2)| (z1, z2)).collect(),
                class: class(k),
            });
        }
        (rows, series)
    };

    let dir = out_dir(&c.out)?;
    write_zplot_csv(&dir.join("zplot.csv"), &rows)?;
    let title = format!("Z1-Z2 plot, pair ({}, {})", a.i, a.j);
    std::fs::write(dir.join("zplot.svg"), zplot_svg(&series, &title))?;
    cfg.write(dir)?;
    Ok(format!(
        "{} rows written to {}\n",
        rows.len(),
        dir.join("zplot.csv").display()
    ))
}

pub fn cmd_classify(a: &ClassifyArgs) -> Result<String> {
    let c = &a.common;
    let cfg = run_config("classify", c)?;
    let data = load(c)?;
    let labels = data
        .labels
        .clone()
        .ok_or_else(|| DqfError::usage("classify needs --labels"))?;
    let view = view_for(c, &data)?;
    let pipeline = PipelineConfig {
        batch: batch_config(c)?,
        components: a.components,
        fpca_joint: a.fpca_joint,
        svm: SvmParams {
            cost: a.cost,
            epochs: a.epochs,
            seed: c.seed,
        },
    };
    let coll = all_pairs_dqf(&view, &pipeline.batch)?;
    let report = loo_classify_collection(&coll, &labels, &pipeline)?;

    let dir = out_dir(&c.out)?;
    write_predictions_csv(&dir.join("predictions.csv"), &report)?;
    cfg.write(dir)?;
    let mut msg = warnings_text(&view);
    msg += &format!("leave-one-out rate: {}\n", dqf::io::fmt_sig(report.rate, 9));
    if let Some(k) = a.knn {
        let (_, rate) = knn_loo(
            &data
                .cloud()?
                .rows()
                .map(<[f64]>::to_vec)
                .collect::<Vec<_>>(),
            &labels,
            k,
        )?;
        msg += &format!(
            "knn (k={k}) leave-one-out rate: {}\n",
            dqf::io::fmt_sig(rate, 9)
        );
    }
    Ok(msg)
}

pub fn cmd_anomaly(a: &AnomalyArgs) -> Result<String> {
    let c = &a.common;
    let mut cfg = run_config("anomaly", c)?;
    cfg.delta_star = a.delta_star;
    cfg.normalized = a.normalized;
    let data = load(c)?;
    let view = view_for(c, &data)?;
    let coll = all_pairs_dqf(&view, &batch_config(c)?)?;
    let summaries = summarize(&coll, None, AverageScaling::PairCount)?;
    let mut report = anomaly_scores(&summaries, a.delta_star, a.normalized)?;

    let outlier: Option<Vec<bool>> = data
        .labels
        .as_ref()
        .map(|y| y.iter().map(|&v| v == a.outlier_label).collect());
    let mut msg = warnings_text(&view);
    msg += &format!(
        "scores read at δ = {}{}\n",
        dqf::io::fmt_sig(report.delta_used, 9),
        if a.normalized { ", normalized" } else { "" }
    );
    if let Some(flags) = &outlier {
        let auc = report.evaluate(flags)?;
        msg += &format!(
            "ROC AUC (low score = outlying): {}\n",
            dqf::io::fmt_sig(auc, 9)
        );
    }
    let dir = out_dir(&c.out)?;
    write_anomaly_csv(&dir.join("anomaly.csv"), &report, outlier.as_deref())?;
    cfg.write(dir)?;
    Ok(msg)
}

pub fn synth_spec(a: &SynthArgs) -> SynthSpec {
    let (n, d, seed) = (a.n, a.d, a.seed);
    match a.kind {
        SynthKind::Ball => SynthSpec::Ball {
            n,
            d,
            radius: a.radius,
            seed,
        },
        SynthKind::AnnulusShell => SynthSpec::AnnulusShell {
            n,
            d,
            r_in: a.r_in,
            r_out: a.r_out,
            seed,
        },
        SynthKind::BallVsShell => SynthSpec::BallVsShell { n, d, seed },
        SynthKind::DiscVsRing => SynthSpec::DiscVsRing { n, seed },
        SynthKind::ParaboloidLift => SynthSpec::ParaboloidLift { n, seed },
        SynthKind::Contaminated => SynthSpec::Contaminated {
            inliers: n,
            outliers: a.outliers,
            d,
            seed,
        },
        SynthKind::Blobs => SynthSpec::Blobs {
            n,
            d,
            separation: a.separation,
            seed,
        },
    }
}

pub fn cmd_synth(a: &SynthArgs) -> Result<String> {
    let spec = synth_spec(a);
    let cloud = spec.generate()?;
    if let Some(parent) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    write_points_csv(&a.out, &cloud)?;
    let json = serde_json::to_string(&spec).expect("spec serializes");
    Ok(format!(
        "{} points written to {} ({json})\n",
        cloud.n(),
        a.out.display()
    ))
}
