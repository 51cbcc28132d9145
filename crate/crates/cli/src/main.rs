//! Command-line front end: K-sample and independence tests on CSV data,
//! plus a simulation laboratory for level and power studies.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mvproj::error::Error;
use mvproj::generate::{GeneratedData, Scenario};
use mvproj::io;
use mvproj::model::{CenterOrigin, CenterSpec};
use mvproj::pipeline::{run_pipeline, PipelineConfig, Problem};
use mvproj::pooling::PoolingRule;
use mvproj::power::{power_study, ScenarioSpec};
use mvproj::projection::CenterStrategy;
use mvproj::univariate::TestId;
use mvproj::Result;

#[derive(Parser)]
#[command(name = "mvproj", version, about = "Multivariate tests from univariate tests on distances to center points")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Two-sample test of equal distributions (K = 2).
    TwoSample(TestArgs),
    /// K-sample test of equal distributions (K from the label column).
    KSample(TestArgs),
    /// Independence test between two blocks of columns.
    Independence(TestArgs),
    /// Level/power study over a grid of sample sizes.
    Power(PowerArgs),
    /// Run the built-in identity checks and worked examples.
    Selftest(SelftestArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Number of sampled centers M (bbox/gauss strategies).
    #[arg(long)]
    centers: Option<usize>,
    /// Center strategy: fixed, bbox, gauss, sample-points.
    #[arg(long)]
    center_strategy: Option<String>,
    /// CSV of center coordinates (required for --center-strategy fixed).
    #[arg(long)]
    centers_file: Option<PathBuf>,
    /// Bounding-box expansion fraction for the bbox strategy.
    #[arg(long)]
    expansion: Option<f64>,
    /// Univariate test: ks, cvm, kw, hoeffding, thas.
    #[arg(long)]
    test: Option<String>,
    /// Pooling rule: minp, maxp, fisher, sumstat, maxstat, meanstat,
    /// bonferroni, hommel.
    #[arg(long)]
    pool: Option<String>,
    /// Permutation budget B.
    #[arg(long)]
    perms: Option<usize>,
    /// Master seed (falls back to MVPROJ_SEED, then 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Significance level.
    #[arg(long)]
    alpha: Option<f64>,
    /// Enumerate all assignments exactly instead of sampling B.
    #[arg(long)]
    exact: bool,
    /// Output file (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Report format: json or csv.
    #[arg(long)]
    format: Option<String>,
    /// key=value file supplying defaults for any long flag.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads (defaults to the rayon heuristic).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct TestArgs {
    /// Input CSV with a header row.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Group column name for K-sample problems.
    #[arg(long)]
    label_col: Option<String>,
    /// Comma-separated x-block columns (independence).
    #[arg(long, value_delimiter = ',')]
    x_cols: Option<Vec<String>>,
    /// Comma-separated y-block columns (independence; optional subset for
    /// K-sample).
    #[arg(long, value_delimiter = ',')]
    y_cols: Option<Vec<String>>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct PowerArgs {
    /// Scenario: null-gaussian, null-lognormal, location-shift,
    /// scale-shift, linear-dep, quadratic-dep, circle-dep, null-indep.
    #[arg(long)]
    scenario: Option<String>,
    /// y-dimension q.
    #[arg(long)]
    dim_q: Option<usize>,
    /// x-dimension p (independence scenarios).
    #[arg(long)]
    dim_p: Option<usize>,
    /// Number of groups for the null scenarios.
    #[arg(long)]
    k: Option<usize>,
    /// Location-shift magnitude.
    #[arg(long)]
    delta: Option<f64>,
    /// Scale-shift ratio.
    #[arg(long)]
    ratio: Option<f64>,
    /// Linear-dependence strength.
    #[arg(long)]
    rho: Option<f64>,
    /// Noise level for quadratic/circle scenarios.
    #[arg(long)]
    noise: Option<f64>,
    /// Comma-separated grid of per-group sample sizes.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<usize>>,
    /// Replications per grid point.
    #[arg(long)]
    reps: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long)]
    seed: Option<u64>,
}

/// Flat key=value file mirroring the long flags; explicit flags override.
struct ConfigFile {
    map: HashMap<String, String>,
}

impl ConfigFile {
    fn load(path: Option<&Path>) -> Result<Self> {
        let mut map = HashMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| Error::InvalidConfig {
                    reason: format!("config line {} is not key=value: {line:?}", lineno + 1),
                })?;
                map.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(Self { map })
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| Error::InvalidConfig {
                reason: format!("cannot parse config value {key}={raw}"),
            }),
        }
    }

    fn get_flag(&self, key: &str) -> Result<bool> {
        Ok(self.get::<bool>(key)?.unwrap_or(false))
    }
}

fn seed_fallback() -> u64 {
    std::env::var("MVPROJ_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

struct Resolved {
    strategy_id: String,
    centers: usize,
    centers_file: Option<PathBuf>,
    expansion: f64,
    test: Option<String>,
    pool: String,
    perms: usize,
    seed: u64,
    alpha: f64,
    exact: bool,
    output: Option<PathBuf>,
    format: String,
    threads: Option<usize>,
}

impl Resolved {
    fn from(common: &CommonArgs, file: &ConfigFile) -> Result<Self> {
        Ok(Self {
            strategy_id: common
                .center_strategy
                .clone()
                .or(file.get("center-strategy")?)
                .unwrap_or_else(|| "bbox".to_string()),
            centers: common.centers.or(file.get("centers")?).unwrap_or(50),
            centers_file: common.centers_file.clone().or(file.get("centers-file")?),
            expansion: common.expansion.or(file.get("expansion")?).unwrap_or(0.1),
            test: common.test.clone().or(file.get("test")?),
            pool: common
                .pool
                .clone()
                .or(file.get("pool")?)
                .unwrap_or_else(|| "minp".to_string()),
            perms: common.perms.or(file.get("perms")?).unwrap_or(1000),
            seed: match common.seed.or(file.get("seed")?) {
                Some(s) => s,
                None => seed_fallback(),
            },
            alpha: common.alpha.or(file.get("alpha")?).unwrap_or(0.05),
            exact: common.exact || file.get_flag("exact")?,
            output: common.output.clone().or(file.get("output")?),
            format: common
                .format
                .clone()
                .or(file.get("format")?)
                .unwrap_or_else(|| "json".to_string()),
            threads: common.threads.or(file.get("threads")?),
        })
    }

    fn parse_test(&self, default: TestId) -> Result<TestId> {
        match self.test.as_deref() {
            None => Ok(default),
            Some("ks") => Ok(TestId::Ks),
            Some("cvm") => Ok(TestId::Cvm),
            Some("kw") => Ok(TestId::KruskalWallis),
            Some("hoeffding") => Ok(TestId::HoeffdingD),
            Some("thas") => Ok(TestId::ThasSum),
            Some(other) => Err(Error::InvalidConfig {
                reason: format!("unknown test {other:?}"),
            }),
        }
    }

    fn parse_pool(&self) -> Result<PoolingRule> {
        PoolingRule::from_id(&self.pool).ok_or_else(|| Error::InvalidConfig {
            reason: format!("unknown pooling rule {:?}", self.pool),
        })
    }

    fn strategy(&self, problem: Problem, dims: (usize, usize)) -> Result<CenterStrategy> {
        match self.strategy_id.as_str() {
            "bbox" => Ok(CenterStrategy::UniformBoundingBox {
                m: self.centers,
                expansion: self.expansion,
            }),
            "gauss" => Ok(CenterStrategy::GaussianMomentFit { m: self.centers }),
            "sample-points" => Ok(CenterStrategy::SamplePoints),
            "fixed" => {
                let path = self.centers_file.as_ref().ok_or_else(|| Error::InvalidConfig {
                    reason: "--center-strategy fixed requires --centers-file".to_string(),
                })?;
                read_fixed_centers(path, problem, dims)
            }
            other => Err(Error::InvalidConfig {
                reason: format!("unknown center strategy {other:?}"),
            }),
        }
    }
}

/// Fixed centers: one row per center. K-sample files carry q columns;
/// independence files carry p x-side columns followed by q y-side columns.
/// Header names are free-form, only the column count matters.
fn read_fixed_centers(path: &Path, problem: Problem, (p, q): (usize, usize)) -> Result<CenterStrategy> {
    let mut reader = csv::Reader::from_path(path).map_err(Error::Csv)?;
    let width = reader.headers().map_err(Error::Csv)?.len();
    let expected = match problem {
        Problem::Independence => p + q,
        _ => q,
    };
    if width != expected {
        return Err(Error::InvalidConfig {
            reason: format!("centers file has {width} columns, data needs {expected}"),
        });
    }
    let mut centers = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(Error::Csv)?;
        let values: Vec<f64> = record
            .iter()
            .enumerate()
            .map(|(col, cell)| {
                cell.trim().parse::<f64>().map_err(|_| Error::ParseValue {
                    value: cell.to_string(),
                    row,
                    col,
                })
            })
            .collect::<Result<_>>()?;
        let center = match problem {
            Problem::Independence => CenterSpec::independence(
                values[..p].to_vec().into(),
                values[p..].to_vec().into(),
            ),
            _ => CenterSpec::two_sample(values.into()),
        };
        centers.push(center.with_origin(CenterOrigin::Fixed));
    }
    if centers.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(CenterStrategy::FixedList(centers))
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

fn run_test_command(args: &TestArgs, problem: Problem) -> Result<()> {
    let file = ConfigFile::load(args.common.config.as_deref())?;
    let resolved = Resolved::from(&args.common, &file)?;
    let input = args
        .input
        .clone()
        .or(file.get("input")?)
        .ok_or_else(|| Error::InvalidConfig {
            reason: "--input is required".to_string(),
        })?;
    let label_col = args
        .label_col
        .clone()
        .or(file.get("label-col")?)
        .unwrap_or_else(|| "label".to_string());

    let (data, dims) = match problem {
        Problem::TwoSample | Problem::KSample => {
            let d = io::read_labeled_csv(&input, &label_col, args.y_cols.as_deref())?;
            let q = d.dim();
            (GeneratedData::KSample(d), (0, q))
        }
        Problem::Independence => {
            let x_cols = args.x_cols.clone().ok_or_else(|| Error::InvalidConfig {
                reason: "--x-cols is required for independence".to_string(),
            })?;
            let y_cols = args.y_cols.clone().ok_or_else(|| Error::InvalidConfig {
                reason: "--y-cols is required for independence".to_string(),
            })?;
            let d = io::read_paired_csv(&input, &x_cols, &y_cols)?;
            let dims = (d.dim_x(), d.dim_y());
            (GeneratedData::Independence(d), dims)
        }
    };

    let default_test = match (problem, &data) {
        (Problem::Independence, _) => TestId::HoeffdingD,
        (Problem::KSample, GeneratedData::KSample(d)) if d.k() > 2 => TestId::KruskalWallis,
        _ => TestId::Ks,
    };
    // a K-sample run with two groups is the two-sample problem
    let problem = match (&data, problem) {
        (GeneratedData::KSample(d), Problem::KSample) if d.k() == 2 => Problem::TwoSample,
        _ => problem,
    };

    let mut config = PipelineConfig::new(
        problem,
        resolved.strategy(problem, dims)?,
        resolved.parse_test(default_test)?,
        resolved.parse_pool()?,
        resolved.perms,
        resolved.seed,
    );
    config.alpha = resolved.alpha;
    config.exact = resolved.exact;

    let report = with_pool(resolved.threads, || run_pipeline(&config, &data))?;
    let rendered = match resolved.format.as_str() {
        "json" => io::report_to_json(&report),
        "csv" => io::report_to_csv(&report)?,
        other => {
            return Err(Error::InvalidConfig {
                reason: format!("unknown format {other:?}"),
            })
        }
    };
    io::write_output(&rendered, resolved.output.as_deref())
}

fn build_scenario(args: &PowerArgs, file: &ConfigFile) -> Result<Scenario> {
    let id = args
        .scenario
        .clone()
        .or(file.get("scenario")?)
        .unwrap_or_else(|| "location-shift".to_string());
    let q = args.dim_q.or(file.get("dim-q")?).unwrap_or(3);
    let p = args.dim_p.or(file.get("dim-p")?).unwrap_or(1);
    let k = args.k.or(file.get("k")?).unwrap_or(2);
    let delta = args.delta.or(file.get("delta")?).unwrap_or(0.5);
    let ratio = args.ratio.or(file.get("ratio")?).unwrap_or(1.5);
    let rho = args.rho.or(file.get("rho")?).unwrap_or(0.5);
    let noise = args.noise.or(file.get("noise")?).unwrap_or(0.1);
    Ok(match id.as_str() {
        "null-gaussian" => Scenario::NullGaussian { q, k },
        "null-lognormal" => Scenario::NullLogNormal { q, k },
        "location-shift" => Scenario::LocationShift { q, delta },
        "scale-shift" => Scenario::ScaleShift { q, ratio },
        "linear-dep" => Scenario::LinearDep { p, q, rho },
        "quadratic-dep" => Scenario::QuadraticDep { p, q, noise },
        "circle-dep" => Scenario::CircleDep { noise },
        "null-indep" => Scenario::NullIndep { p, q },
        other => {
            return Err(Error::InvalidScenario {
                reason: format!("unknown scenario {other:?}"),
            })
        }
    })
}

fn run_power_command(args: &PowerArgs) -> Result<()> {
    let file = ConfigFile::load(args.common.config.as_deref())?;
    let resolved = Resolved::from(&args.common, &file)?;
    let scenario = build_scenario(args, &file)?;
    let grid = args
        .grid
        .clone()
        .or_else(|| {
            file.map.get("grid").map(|raw| {
                raw.split(',')
                    .filter_map(|s| s.trim().parse().ok())
                    .collect()
            })
        })
        .unwrap_or_else(|| vec![50, 100, 200]);
    let reps = args.reps.or(file.get("reps")?).unwrap_or(200);

    let problem = if scenario.is_k_sample() {
        match &scenario {
            Scenario::NullGaussian { k, .. } | Scenario::NullLogNormal { k, .. } if *k > 2 => {
                Problem::KSample
            }
            _ => Problem::TwoSample,
        }
    } else {
        Problem::Independence
    };
    let default_test = match problem {
        Problem::Independence => TestId::HoeffdingD,
        Problem::KSample => TestId::KruskalWallis,
        Problem::TwoSample => TestId::Ks,
    };
    let mut config = PipelineConfig::new(
        problem,
        resolved.strategy(problem, (0, 0))?,
        resolved.parse_test(default_test)?,
        resolved.parse_pool()?,
        resolved.perms,
        resolved.seed,
    );
    config.alpha = resolved.alpha;
    config.exact = resolved.exact;

    let spec = ScenarioSpec {
        scenario,
        replications: reps,
        n_grid: grid,
    };
    let report = with_pool(resolved.threads, || power_study(&config, &spec))?;
    let rendered = match resolved.format.as_str() {
        "json" => io::power_report_to_json(&report),
        "csv" => io::power_report_to_csv(&report)?,
        other => {
            return Err(Error::InvalidConfig {
                reason: format!("unknown format {other:?}"),
            })
        }
    };
    io::write_output(&rendered, resolved.output.as_deref())
}

fn run_selftest(args: &SelftestArgs) -> Result<bool> {
    use mvproj::pooling;
    use mvproj::reference::{
        energy_scores, energy_stat, hhg_stat, mean_leave_one_out_u_statistic,
        summed_thas_over_sample_points, u_lift, u_statistic_lifted, KernelSpec,
    };
    use mvproj::univariate::pearson_2x2;

    let seed = args.seed.unwrap_or_else(seed_fallback);
    let mut all_ok = true;
    let mut check = |name: &str, ok: bool| {
        println!("[{}] {}", if ok { "PASS" } else { "FAIL" }, name);
        all_ok &= ok;
    };

    let mut energy_ok = true;
    for i in 0..20u64 {
        let data = match mvproj::generate::generate(
            &Scenario::NullGaussian { q: 3, k: 2 },
            10 + (i as usize) % 5,
            seed.wrapping_add(i),
        )? {
            GeneratedData::KSample(d) => d,
            _ => unreachable!(),
        };
        let e = energy_stat(&data)?;
        let s: f64 = energy_scores(&data)?.iter().sum();
        energy_ok &= (e - s).abs() <= 1e-10;
    }
    check("energy statistic equals sum of per-observation scores", energy_ok);

    let mut hhg_ok = true;
    for i in 0..8u64 {
        let data = match mvproj::generate::generate(
            &Scenario::LinearDep { p: 2, q: 2, rho: 0.5 },
            5 + (i as usize) % 10,
            seed.wrapping_add(100 + i),
        )? {
            GeneratedData::Independence(d) => d,
            _ => unreachable!(),
        };
        let direct = hhg_stat(&data)?;
        let decomposed = summed_thas_over_sample_points(&data)?;
        hhg_ok &= (direct - decomposed).abs() <= 1e-10;
    }
    check("HHG equals Thas statistics summed over sample-point centers", hhg_ok);

    let mut lift_ok = true;
    let kernels = [
        KernelSpec::new(1, |p: &[(f64, f64)]| p[0].0 * p[0].1),
        KernelSpec::new(2, |p: &[(f64, f64)]| {
            (p[0].0 - p[1].0).abs() * (p[0].1 - p[1].1).abs()
        }),
    ];
    for (ki, h) in kernels.iter().enumerate() {
        for i in 0..5u64 {
            let data = match mvproj::generate::generate(
                &Scenario::NullIndep { p: 2, q: 2 },
                6,
                seed.wrapping_add(200 + ki as u64 * 10 + i),
            )? {
                GeneratedData::Independence(d) => d,
                _ => unreachable!(),
            };
            let lifted = u_statistic_lifted(&u_lift(h), &data)?;
            let loo = mean_leave_one_out_u_statistic(h, &data)?;
            lift_ok &= (lifted - loo).abs() <= 1e-12;
        }
    }
    check("lifted U-statistic equals mean leave-one-out U-statistic", lift_ok);

    let global_ok = (pooling::hommel_global(&[0.01, 0.5])? - 0.03).abs() < 1e-12
        && (pooling::hommel_global(&[0.04])? - 0.04).abs() < 1e-12
        && (pooling::bonferroni_global(&[0.01, 0.5, 0.9])? - 0.03).abs() < 1e-12
        && pooling::bonferroni_global(&[0.5, 0.9])? == 1.0;
    check("Bonferroni and Hommel worked examples", global_ok);

    let pearson_ok = pearson_2x2(1, 1, 1, 1) == 0.0
        && pearson_2x2(2, 0, 0, 2) == 4.0
        && pearson_2x2(0, 0, 3, 7) == 0.0;
    check("Pearson 2x2 worked examples", pearson_ok);

    Ok(all_ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::TwoSample(args) => run_test_command(args, Problem::TwoSample),
        Command::KSample(args) => run_test_command(args, Problem::KSample),
        Command::Independence(args) => run_test_command(args, Problem::Independence),
        Command::Power(args) => run_power_command(args),
        Command::Selftest(args) => match run_selftest(args) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(1),
            Err(e) => Err(e),
        },
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
