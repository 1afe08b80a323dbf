use std::ffi::OsString;
use std::path::{Path, PathBuf};

use centerlab_core::datagen::{gen_gaussian, gen_toy, gen_two_block, ToySpec, TwoBlockSpec, TwoBlockTruth};
use centerlab_core::{
    abs_cosine, center, compute_means, correlation_ledger, energy_breakdown, energy_test, pls_sequential, pls_svd,
    svd_modes, CenteringKind, DMatrix, DVector, EnergyBreakdown, EnergyTestConfig, EnergyTestResult, PlsMethod,
    PlsModel, TwoBlockData,
};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::io::{
    load_labels, load_matrix, write_json, write_text, Headers, LoadedMatrix, MatrixFile, TableWriter, Transform,
    DEFAULT_DIGITS,
};
use crate::plot::{render_plot, PlotData, PlotKind, PlotSpec};

/// Exit status for runtime failures.
pub const EXIT_FAILURE: i32 = 1;
/// Exit status for usage and flag-validation errors.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "centerlab",
    version,
    about = "Centering-aware modes of variation, diagnostics and two-block PLS"
)]
pub struct Cli {
    /// Directory artifacts are written to.
    #[arg(long, global = true, env = "CENTERLAB_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,

    /// Significant digits for numeric CSV output.
    #[arg(long, global = true, default_value_t = DEFAULT_DIGITS as u8, value_parser = clap::value_parser!(u8).range(1..=17))]
    digits: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Centering {
    None,
    Grand,
    Object,
    Trait,
    Double,
}

impl From<Centering> for CenteringKind {
    fn from(c: Centering) -> Self {
        match c {
            Centering::None => CenteringKind::None,
            Centering::Grand => CenteringKind::Grand,
            Centering::Object => CenteringKind::Object,
            Centering::Trait => CenteringKind::Trait,
            Centering::Double => CenteringKind::Double,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Svd,
    Sequential,
}

#[derive(Debug, Args)]
struct ReadArgs {
    /// Transform applied to every entry after parsing.
    #[arg(long, value_enum, default_value_t = Transform::None)]
    transform: Transform,

    /// File rows are objects rather than traits.
    #[arg(long)]
    transpose: bool,

    /// Label row/column handling.
    #[arg(long, value_enum, default_value_t = Headers::Auto)]
    headers: Headers,

    #[arg(long, default_value_t = ',')]
    delimiter: char,
}

impl ReadArgs {
    fn delimiter(&self) -> Result<u8> {
        u8::try_from(self.delimiter).ok().filter(u8::is_ascii).ok_or_else(|| {
            CliError::Validation(format!(
                "delimiter {:?} is not a single ASCII character",
                self.delimiter
            ))
        })
    }

    fn load(&self, path: &Path) -> Result<LoadedMatrix> {
        let file = MatrixFile {
            path: path.to_owned(),
            transpose: self.transpose,
            headers: self.headers,
            delimiter: self.delimiter()?,
        };
        load_matrix(&file, self.transform)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the centered matrix.
    Center {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Centering::Double)]
        centering: Centering,
        #[command(flatten)]
        read: ReadArgs,
    },
    /// Write the grand mean and the object- and trait-mean vectors.
    Means {
        input: PathBuf,
        #[command(flatten)]
        read: ReadArgs,
    },
    /// SVD modes of variation: loadings, scores and energy shares.
    Modes {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Centering::Double)]
        centering: Centering,
        /// Keep only the leading components.
        #[arg(long)]
        rank: Option<usize>,
        #[command(flatten)]
        read: ReadArgs,
    },
    /// Maximum score and loading correlations under each centering.
    Ledger {
        input: PathBuf,
        #[command(flatten)]
        read: ReadArgs,
    },
    /// Direction-energy test for the constant direction.
    EnergyTest {
        input: PathBuf,
        /// Number of null directions.
        #[arg(short = 'B', long = "samples", default_value_t = centerlab_core::diagnostics::DEFAULT_NULL_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = centerlab_core::diagnostics::DEFAULT_THRESHOLD)]
        threshold: f64,
        /// Leave the null samples out of the report.
        #[arg(long)]
        omit_null: bool,
        #[command(flatten)]
        read: ReadArgs,
    },
    /// Energy shares of the leading object- and double-centered components.
    Breakdown {
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        rank: usize,
        #[command(flatten)]
        read: ReadArgs,
    },
    /// Two-block partial least squares.
    Pls {
        block1: PathBuf,
        block2: PathBuf,
        #[arg(long, value_enum, default_value_t = Centering::Double)]
        centering: Centering,
        #[arg(long, value_enum, default_value_t = Method::Sequential)]
        method: Method,
        #[arg(short = 'K', long = "components", default_value_t = 2)]
        components: usize,
        /// Planted-model JSON from `synth two-block`; writes an alignment report.
        #[arg(long)]
        truth: Option<PathBuf>,
        #[command(flatten)]
        read: ReadArgs,
    },
    /// Generate synthetic data.
    Synth {
        #[command(subcommand)]
        kind: SynthKind,
    },
    /// Render an SVG plot.
    Plot {
        #[arg(value_enum)]
        kind: PlotKind,
        /// Matrix CSV for heatmap and curves, an objects × components table for
        /// scatter-matrix, or a JSON report for energy-test and energy-breakdown.
        input: PathBuf,
        /// Centering applied before heatmap and curves plots.
        #[arg(long, value_enum, default_value_t = Centering::None)]
        centering: Centering,
        /// `object,group` CSV used to color objects.
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Heatmap color-bar half range.
        #[arg(long)]
        color_max: Option<f64>,
        #[arg(long)]
        title: Option<String>,
        #[arg(long)]
        x_label: Option<String>,
        #[arg(long)]
        y_label: Option<String>,
        /// Do not join scatter points in object order.
        #[arg(long)]
        no_connect: bool,
        /// Output file name inside the output directory.
        #[arg(long, short)]
        output: Option<String>,
        #[command(flatten)]
        read: ReadArgs,
    },
}

#[derive(Debug, Subcommand)]
enum SynthKind {
    /// Cubic object mean, linear trait mean and a planar-wave residual.
    Toy {
        #[arg(long, default_value_t = 50)]
        traits: usize,
        #[arg(long, default_value_t = 25)]
        objects: usize,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Two blocks sharing a rank-2 signal, with planted mean effects.
    TwoBlock {
        #[arg(long, default_value_t = 300)]
        traits1: usize,
        #[arg(long, default_value_t = 500)]
        traits2: usize,
        #[arg(long, default_value_t = 200)]
        objects: usize,
        #[arg(long, default_value_t = 1.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Independent standard Gaussian entries.
    Gaussian {
        #[arg(short = 'd', long, default_value_t = 100)]
        traits: usize,
        #[arg(short = 'n', long, default_value_t = 100)]
        objects: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit status. Errors are reported on stderr as
/// `{"error":{"kind":..,"message":..}}`.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    report("usage", e.to_string().trim_end());
                    EXIT_USAGE
                }
            };
        }
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();

    match execute(&cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            0
        }
        Err(e) => {
            report(e.kind(), &e.to_string());
            match e {
                CliError::Validation(_) => EXIT_USAGE,
                _ => EXIT_FAILURE,
            }
        }
    }
}

fn report(kind: &str, message: &str) {
    let body = serde_json::json!({ "error": { "kind": kind, "message": message } });
    eprintln!("{body}");
}

struct Out {
    dir: PathBuf,
    table: TableWriter,
    written: Vec<PathBuf>,
}

impl Out {
    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        log::info!("writing {}", p.display());
        self.written.push(p.clone());
        p
    }
}

fn execute(cli: &Cli) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(&cli.out_dir).map_err(|e| CliError::io(&cli.out_dir, e))?;
    let mut out = Out {
        dir: cli.out_dir.clone(),
        table: TableWriter::new(cli.digits as usize, b','),
        written: Vec::new(),
    };
    match &cli.command {
        Command::Center { input, centering, read } => {
            let m = read.load(input)?;
            let c = center(&m.matrix, (*centering).into());
            let p = out.path("centered.csv");
            out.table
                .matrix(&p, c.as_matrix(), m.trait_labels.as_deref(), m.object_labels.as_deref())?;
        }
        Command::Means { input, read } => means(&mut out, &read.load(input)?)?,
        Command::Modes {
            input,
            centering,
            rank,
            read,
        } => modes(&mut out, &read.load(input)?, (*centering).into(), *rank)?,
        Command::Ledger { input, read } => ledger(&mut out, &read.load(input)?)?,
        Command::EnergyTest {
            input,
            samples,
            seed,
            threshold,
            omit_null,
            read,
        } => {
            let m = read.load(input)?;
            let config = EnergyTestConfig {
                samples: *samples,
                seed: *seed,
                threshold: *threshold,
            };
            let mut result = energy_test(&m.matrix, &config)?;
            if *omit_null {
                result.null_samples.clear();
            }
            let p = out.path("energy_test.json");
            write_json(&p, &result)?;
        }
        Command::Breakdown { input, rank, read } => {
            let b = energy_breakdown(&read.load(input)?.matrix, *rank)?;
            let p = out.path("breakdown.json");
            write_json(&p, &b)?;
            let p = out.path("breakdown.csv");
            out.table.columns(
                &p,
                &["object_centered_share", "double_centered_share"],
                &[b.object_centered_shares.clone(), b.double_centered_shares.clone()],
            )?;
        }
        Command::Pls {
            block1,
            block2,
            centering,
            method,
            components,
            truth,
            read,
        } => pls(
            &mut out,
            read,
            [block1, block2],
            (*centering).into(),
            *method,
            *components,
            truth.as_deref(),
        )?,
        Command::Synth { kind } => synth(&mut out, kind)?,
        Command::Plot {
            kind,
            input,
            centering,
            labels,
            color_max,
            title,
            x_label,
            y_label,
            no_connect,
            output,
            read,
        } => {
            let spec = PlotSpec {
                kind: *kind,
                title: title.clone(),
                x_label: x_label.clone(),
                y_label: y_label.clone(),
                color_max: *color_max,
                groups: None,
                connect: !no_connect,
            };
            plot(
                &mut out,
                read,
                input,
                spec,
                (*centering).into(),
                labels.as_deref(),
                output.as_deref(),
            )?;
        }
    }
    Ok(out.written)
}

#[derive(Serialize)]
struct MeansReport {
    grand_mean: f64,
    /// Mean over objects, one entry per trait.
    object_mean: Vec<f64>,
    /// Mean over traits, one entry per object.
    trait_mean: Vec<f64>,
}

fn means(out: &mut Out, m: &LoadedMatrix) -> Result<()> {
    let means = compute_means(&m.matrix);
    let object_mean: Vec<f64> = means.object_vector.iter().copied().collect();
    let trait_mean: Vec<f64> = means.trait_vector.iter().copied().collect();
    let p = out.path("object_mean.csv");
    out.table
        .columns(&p, &["object_mean"], std::slice::from_ref(&object_mean))?;
    let p = out.path("trait_mean.csv");
    out.table
        .columns(&p, &["trait_mean"], std::slice::from_ref(&trait_mean))?;
    let p = out.path("means.json");
    write_json(
        &p,
        &MeansReport {
            grand_mean: means.grand,
            object_mean,
            trait_mean,
        },
    )
}

fn component_names(k: usize) -> Vec<String> {
    (1..=k).map(|j| format!("component_{j}")).collect()
}

#[derive(Serialize)]
struct ModesReport {
    centering: CenteringKind,
    traits: usize,
    objects: usize,
    rank: usize,
    total_energy: f64,
    singular_values: Vec<f64>,
    energy_shares: Vec<f64>,
}

fn modes(out: &mut Out, m: &LoadedMatrix, centering: CenteringKind, rank: Option<usize>) -> Result<()> {
    let modes = svd_modes(&m.matrix, centering, rank)?;
    let names = component_names(modes.rank());
    let p = out.path("loadings.csv");
    out.table
        .matrix(&p, &modes.loadings, m.trait_labels.as_deref(), Some(&names))?;
    let p = out.path("scores.csv");
    out.table
        .matrix(&p, &modes.score_coordinates(), m.object_labels.as_deref(), Some(&names))?;
    let shares = modes.energy_shares();
    let p = out.path("singular_values.csv");
    out.table.columns(
        &p,
        &["singular_value", "energy_share"],
        &[modes.singular_values.clone(), shares.proportions.clone()],
    )?;
    let (traits, objects) = m.matrix.shape();
    let p = out.path("modes.json");
    write_json(
        &p,
        &ModesReport {
            centering,
            traits,
            objects,
            rank: modes.rank(),
            total_energy: modes.total_energy,
            singular_values: modes.singular_values.clone(),
            energy_shares: shares.proportions,
        },
    )
}

fn ledger(out: &mut Out, m: &LoadedMatrix) -> Result<()> {
    let ledger = correlation_ledger(&m.matrix)?;
    let p = out.path("ledger.json");
    write_json(&p, &ledger)?;
    let p = out.path("ledger.csv");
    let mut w = csv::Writer::from_path(&p)?;
    w.write_record([
        "centering",
        "rank",
        "scores_max_abs_correlation",
        "loadings_max_abs_correlation",
        "scores_max_abs_inner",
        "loadings_max_abs_inner",
    ])?;
    let digits = out.table.digits();
    let cell = |v: Option<f64>| v.map_or_else(|| "NA".to_owned(), |v| crate::io::format_number(v, digits));
    for row in &ledger.rows {
        w.write_record([
            row.centering.as_str().to_owned(),
            row.rank.to_string(),
            cell(row.scores_max_abs_correlation),
            cell(row.loadings_max_abs_correlation),
            cell(row.scores_max_abs_inner),
            cell(row.loadings_max_abs_inner),
        ])?;
    }
    w.flush().map_err(|e| CliError::io(&p, e))
}

#[derive(Serialize)]
struct PlsReport {
    centering: CenteringKind,
    method: PlsMethod,
    components: usize,
    truncated: bool,
    covariances: Vec<f64>,
}

#[derive(Serialize)]
struct ComponentAlignment {
    component: usize,
    block1_weights_vs_signal: [f64; 2],
    block2_weights_vs_signal: [f64; 2],
    block1_scores_vs_signal: [f64; 2],
    block2_scores_vs_signal: [f64; 2],
    block2_weights_vs_trait_mean: f64,
    block2_scores_vs_trait_mean: f64,
}

#[derive(Serialize)]
struct AlignmentReport {
    centering: CenteringKind,
    method: PlsMethod,
    components: Vec<ComponentAlignment>,
}

fn alignment(model: &PlsModel, truth: &TwoBlockTruth, blocks: &TwoBlockData) -> Result<AlignmentReport> {
    let (d1, d2, n) = (blocks.first().traits(), blocks.second().traits(), blocks.objects());
    if truth.block1_loadings.iter().any(|v| v.len() != d1)
        || truth.block2_loadings.iter().any(|v| v.len() != d2)
        || truth.shared_scores.iter().any(|v| v.len() != n)
        || truth.block2_trait_mean_loading.len() != d2
        || truth.block2_trait_mean_score.len() != n
    {
        return Err(CliError::Validation(format!(
            "truth file does not match block shapes {d1}x{n} and {d2}x{n}"
        )));
    }
    let v = |x: &Vec<f64>| DVector::from_vec(x.clone());
    let pair = |x: &DVector<f64>, t: &[Vec<f64>; 2]| [abs_cosine(x, &v(&t[0])), abs_cosine(x, &v(&t[1]))];
    let components = model
        .components
        .iter()
        .enumerate()
        .map(|(k, c)| ComponentAlignment {
            component: k + 1,
            block1_weights_vs_signal: pair(&c.block1.weights, &truth.block1_loadings),
            block2_weights_vs_signal: pair(&c.block2.weights, &truth.block2_loadings),
            block1_scores_vs_signal: pair(&c.block1.scores, &truth.shared_scores),
            block2_scores_vs_signal: pair(&c.block2.scores, &truth.shared_scores),
            block2_weights_vs_trait_mean: abs_cosine(&c.block2.weights, &v(&truth.block2_trait_mean_loading)),
            block2_scores_vs_trait_mean: abs_cosine(&c.block2.scores, &v(&truth.block2_trait_mean_score)),
        })
        .collect();
    Ok(AlignmentReport {
        centering: model.centering,
        method: model.method,
        components,
    })
}

fn pls(
    out: &mut Out,
    read: &ReadArgs,
    paths: [&PathBuf; 2],
    centering: CenteringKind,
    method: Method,
    k: usize,
    truth: Option<&Path>,
) -> Result<()> {
    if !matches!(centering, CenteringKind::Object | CenteringKind::Double) {
        return Err(CliError::Validation(format!(
            "pls does not accept --centering {centering}: object centering is required to form the \
             cross-covariance matrix, so use object or double"
        )));
    }
    let b1 = read.load(paths[0])?;
    let b2 = read.load(paths[1])?;
    let blocks = TwoBlockData::new(b1.matrix.clone(), b2.matrix.clone())?;
    let model = match method {
        Method::Svd => pls_svd(&blocks, k, centering)?,
        Method::Sequential => pls_sequential(&blocks, k, centering)?,
    };
    let names = component_names(model.len());
    let objects = b1.object_labels.as_deref().or(b2.object_labels.as_deref());
    for (b, loaded) in [(0, &b1), (1, &b2)] {
        let tag = b + 1;
        let p = out.path(&format!("block{tag}_weights.csv"));
        out.table.matrix(
            &p,
            &model.stacked(b, |c| &c.weights),
            loaded.trait_labels.as_deref(),
            Some(&names),
        )?;
        let p = out.path(&format!("block{tag}_loadings.csv"));
        out.table.matrix(
            &p,
            &model.stacked(b, |c| &c.loadings),
            loaded.trait_labels.as_deref(),
            Some(&names),
        )?;
        let p = out.path(&format!("block{tag}_scores.csv"));
        out.table
            .matrix(&p, &model.stacked(b, |c| &c.scores), objects, Some(&names))?;
    }
    let p = out.path("pls.json");
    write_json(
        &p,
        &PlsReport {
            centering,
            method: model.method,
            components: model.len(),
            truncated: model.truncated,
            covariances: model.covariances(),
        },
    )?;
    if let Some(path) = truth {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let truth: TwoBlockTruth = serde_json::from_str(&text)?;
        let report = alignment(&model, &truth, &blocks)?;
        let p = out.path("alignment.json");
        write_json(&p, &report)?;
    }
    Ok(())
}

fn synth(out: &mut Out, kind: &SynthKind) -> Result<()> {
    match kind {
        SynthKind::Toy {
            traits,
            objects,
            noise,
            seed,
        } => {
            let toy = gen_toy(&ToySpec {
                traits: *traits,
                objects: *objects,
                noise: *noise,
                seed: *seed,
                ..ToySpec::default()
            })?;
            let p = out.path("toy.csv");
            out.table.matrix(&p, toy.matrix.as_matrix(), None, None)?;
        }
        SynthKind::TwoBlock {
            traits1,
            traits2,
            objects,
            noise,
            seed,
        } => {
            let sample = gen_two_block(&TwoBlockSpec {
                traits1: *traits1,
                traits2: *traits2,
                objects: *objects,
                noise: *noise,
                seed: *seed,
                ..TwoBlockSpec::default()
            })?;
            let p = out.path("block1.csv");
            out.table.matrix(&p, sample.data.first().as_matrix(), None, None)?;
            let p = out.path("block2.csv");
            out.table.matrix(&p, sample.data.second().as_matrix(), None, None)?;
            let p = out.path("truth.json");
            write_json(&p, &sample.truth)?;
        }
        SynthKind::Gaussian { traits, objects, seed } => {
            let m = gen_gaussian(*traits, *objects, *seed)?;
            let p = out.path("gaussian.csv");
            out.table.matrix(&p, m.as_matrix(), None, None)?;
        }
    }
    Ok(())
}

fn numeric_labels(labels: Option<&[String]>) -> Option<Vec<f64>> {
    labels?.iter().map(|s| s.trim().parse::<f64>().ok()).collect()
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn plot(
    out: &mut Out,
    read: &ReadArgs,
    input: &Path,
    mut spec: PlotSpec,
    centering: CenteringKind,
    labels: Option<&Path>,
    output: Option<&str>,
) -> Result<()> {
    let (data, objects) = match spec.kind {
        PlotKind::Heatmap | PlotKind::Curves => {
            let m = read.load(input)?;
            let c = center(&m.matrix, centering).into_matrix();
            let objects = c.ncols();
            let data = if spec.kind == PlotKind::Heatmap {
                PlotData::Matrix(c)
            } else {
                PlotData::Curves {
                    x: numeric_labels(m.trait_labels.as_deref()),
                    curves: c,
                }
            };
            (data, objects)
        }
        PlotKind::ScatterMatrix => {
            let m = read.load(input)?;
            let scores: DMatrix<f64> = m.matrix.into_matrix();
            let names = m.object_labels.unwrap_or_else(|| component_names(scores.ncols()));
            let objects = scores.nrows();
            (PlotData::Scores { scores, names }, objects)
        }
        PlotKind::EnergyTest => (PlotData::EnergyTest(read_json::<EnergyTestResult>(input)?), 0),
        PlotKind::EnergyBreakdown => (PlotData::EnergyBreakdown(read_json::<EnergyBreakdown>(input)?), 0),
    };
    if let Some(path) = labels {
        if objects == 0 {
            return Err(CliError::Validation(
                "--labels applies only to heatmap, curves and scatter-matrix plots".into(),
            ));
        }
        spec.groups = Some(load_labels(path, objects)?);
    }
    let svg = render_plot(&data, &spec)?;
    let default_name = format!(
        "{}.svg",
        spec.kind
            .to_possible_value()
            .map_or("plot".into(), |v| v.get_name().to_owned())
    );
    let p = out.path(output.unwrap_or(&default_name));
    write_text(&p, &svg)
}
