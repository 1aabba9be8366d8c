use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use meandric::analytics::{
    inversions, is_baxter, is_semi_baxter, is_strong_baxter, lds, lis, pattern_density_estimate,
    pattern_occurrences, EXACT_HOST_CAP, EXACT_PATTERN_CAP,
};
use meandric::enumerate::{count_class, enumerate_class, enumerate_meanders, noncrossing_matchings};
use meandric::experiments::{self, write_csv, ScalingRecord};
use meandric::io::{meander_to_json, permutation_to_json, read_records, report_to_json};
use meandric::permuton::{box_counting, box_distance, sample_pattern, PermutonQuery};
use meandric::rng::derived_seed;
use meandric::sampler::{run_chain, sample_class, ChainConfig};
use meandric::{ClassTag, Permutation};

#[derive(Parser)]
#[command(name = "meandric", version, about = "Meanders, meandric permutations and permutons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count a class exhaustively, optionally writing every object.
    Enumerate {
        #[arg(long)]
        class: ClassTag,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Draw meanders from the chain, or class members by rejection.
    Sample(SampleArgs),
    /// Per-permutation statistics as CSV.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "lis,lds")]
        stats: Vec<Stat>,
        /// Also report the occurrence density of this pattern, e.g. 231.
        #[arg(long)]
        pattern: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        pattern_samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Permuton views of each input permutation as CSV.
    Permuton {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        op: PermutonOp,
        #[arg(long, default_value = "3..6", value_parser = parse_depths)]
        depths: (u32, u32),
        #[arg(long, default_value_t = 256)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a study and write records.csv and summary.json.
    Exp {
        study: Study,
        #[command(flatten)]
        shared: ExpArgs,
    },
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    n: usize,
    /// Chain steps; for the pattern classes, the number of samples.
    #[arg(long)]
    steps: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "meander")]
    class: ClassTag,
    #[arg(long)]
    burn_in: Option<u64>,
    #[arg(long)]
    thin: Option<u64>,
    #[arg(long)]
    emit: Option<PathBuf>,
    /// Append acceptance and timing as a final JSON line.
    #[arg(long)]
    stats: bool,
}

#[derive(Args)]
struct ExpArgs {
    #[arg(long, value_delimiter = ',', default_value = "128,256,512,1024,2048")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 30)]
    replicates: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Box-count depth range.
    #[arg(long, default_value = "3..6", value_parser = parse_depths)]
    depths: (u32, u32),
    /// Chain steps for the uniformity study.
    #[arg(long, default_value_t = 100_000)]
    steps: u64,
    #[arg(long, default_value_t = 10)]
    thin: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Stat {
    Lis,
    Lds,
    Baxter,
    Inversions,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PermutonOp {
    Boxcount,
    Boxdist,
    Pattern,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Study {
    LisScaling,
    RrInvariance,
    Cyclic,
    Boxcount,
    Uniformity,
}

fn parse_depths(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .ok_or_else(|| format!("expected a range like 3..6, got {s:?}"))?;
    let num = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("{t:?}: {e}"));
    let (a, b) = (num(a)?, num(b)?);
    if a >= b {
        return Err(format!("empty or single-depth range {s:?}"));
    }
    Ok((a, b))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load(path: &Path) -> Result<Vec<Permutation>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let records = read_records(BufReader::new(file)).with_context(|| format!("reading {}", path.display()))?;
    Ok(records.iter().map(|r| r.permutation()).collect())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Enumerate { class, n, emit } => enumerate(class, n, emit.as_deref()),
        Command::Sample(args) => sample(&args),
        Command::Analyze {
            input,
            stats,
            pattern,
            pattern_samples,
            seed,
            out,
        } => analyze(&input, &stats, pattern.as_deref(), pattern_samples, seed, out.as_deref()),
        Command::Permuton {
            input,
            op,
            depths,
            k,
            seed,
            out,
        } => permuton(&input, op, depths, k, seed, out.as_deref()),
        Command::Exp { study, shared } => exp(study, &shared),
    }
}

fn enumerate(class: ClassTag, n: usize, emit: Option<&Path>) -> Result<()> {
    let report = if let Some(path) = emit {
        let start = Instant::now();
        let mut out = output(Some(path))?;
        let mut count = 0u64;
        match class {
            ClassTag::Meander => {
                for m in enumerate_meanders(n)? {
                    writeln!(out, "{}", meander_to_json(&m))?;
                    count += 1;
                }
            }
            ClassTag::NoncrossingMatching => {
                // a matching is written as its partner involution
                for a in noncrossing_matchings(n) {
                    writeln!(out, "{}", permutation_to_json(&Permutation::new(a.to_one_based())?))?;
                    count += 1;
                }
            }
            _ => {
                for p in enumerate_class(n, class)? {
                    writeln!(out, "{}", permutation_to_json(&p))?;
                    count += 1;
                }
            }
        }
        let report = meandric::EnumerationReport {
            n,
            count,
            class_tag: class,
            elapsed_ns: start.elapsed().as_nanos(),
        };
        writeln!(out, "{}", report_to_json(&report))?;
        out.flush()?;
        report
    } else {
        count_class(n, class)?
    };
    println!("{}", serde_json::to_string(&report)?);
    Ok(())
}

fn sample(args: &SampleArgs) -> Result<()> {
    let start = Instant::now();
    let mut out = output(args.emit.as_deref())?;
    let stats = if args.class == ClassTag::Meander {
        let mut cfg = ChainConfig::new(args.n, args.steps, args.seed);
        if let Some(b) = args.burn_in {
            cfg.burn_in = b;
        }
        if let Some(t) = args.thin {
            cfg.thin = t;
        }
        let mut run = run_chain(&cfg)?;
        let mut emitted = 0u64;
        for m in run.by_ref() {
            writeln!(out, "{}", meander_to_json(&m))?;
            emitted += 1;
        }
        let chain = run.state();
        json!({
            "class": "meander",
            "emitted": emitted,
            "proposed": chain.proposed(),
            "accepted": chain.accepted(),
            "acceptance_rate": chain.acceptance_rate(),
            "elapsed_ms": start.elapsed().as_secs_f64() * 1e3,
        })
    } else {
        for i in 0..args.steps {
            let p = sample_class(args.n, args.class, derived_seed(args.seed, i))?;
            writeln!(out, "{}", permutation_to_json(&p))?;
        }
        json!({
            "class": args.class.name(),
            "emitted": args.steps,
            "elapsed_ms": start.elapsed().as_secs_f64() * 1e3,
        })
    };
    if args.stats {
        writeln!(out, "{}", report_to_json(&stats))?;
    }
    out.flush()?;
    Ok(())
}

fn analyze(
    input: &Path,
    stats: &[Stat],
    pattern: Option<&str>,
    pattern_samples: u64,
    seed: u64,
    out: Option<&Path>,
) -> Result<()> {
    let perms = load(input)?;
    let pattern = pattern
        .map(|p| {
            let digits: Option<Vec<usize>> = p.chars().map(|c| c.to_digit(10).map(|d| d as usize)).collect();
            let values = if p.contains(',') {
                p.split(',').map(|t| t.trim().parse()).collect::<Result<Vec<usize>, _>>().ok()
            } else {
                digits
            };
            Permutation::new(values.with_context(|| format!("bad pattern {p:?}"))?).map_err(anyhow::Error::from)
        })
        .transpose()?;
    let mut out = output(out)?;
    let mut header = vec!["index".to_string(), "size".to_string()];
    for s in stats {
        match s {
            Stat::Lis => header.push("lis".into()),
            Stat::Lds => header.push("lds".into()),
            Stat::Baxter => header.extend(["semibaxter", "baxter", "strongbaxter"].map(String::from)),
            Stat::Inversions => header.push("inversions".into()),
        }
    }
    if let Some(p) = &pattern {
        let tag: String = p.values().iter().map(|v| v.to_string()).collect::<Vec<_>>().join("_");
        header.push(format!("pattern_{tag}_density"));
    }
    writeln!(out, "{}", header.join(","))?;
    for (i, sigma) in perms.iter().enumerate() {
        let mut row = vec![i.to_string(), sigma.len().to_string()];
        for s in stats {
            match s {
                Stat::Lis => row.push(lis(sigma).to_string()),
                Stat::Lds => row.push(lds(sigma).to_string()),
                Stat::Baxter => {
                    for f in [is_semi_baxter, is_baxter, is_strong_baxter] {
                        row.push((f(sigma) as u8).to_string());
                    }
                }
                Stat::Inversions => row.push(inversions(sigma).to_string()),
            }
        }
        if let Some(p) = &pattern {
            row.push(pattern_density(sigma, p, pattern_samples, derived_seed(seed, i as u64))?.to_string());
        }
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// Exact when the exhaustive count is affordable, sampled otherwise.
fn pattern_density(sigma: &Permutation, p: &Permutation, samples: u64, seed: u64) -> Result<f64> {
    let (m, k) = (sigma.len(), p.len());
    if k > m {
        return Ok(0.0);
    }
    if k <= EXACT_PATTERN_CAP && m <= EXACT_HOST_CAP {
        let total: f64 = (0..k).map(|i| (m - i) as f64 / (i + 1) as f64).product();
        return Ok(pattern_occurrences(sigma, p)? as f64 / total);
    }
    Ok(pattern_density_estimate(sigma, p, samples, seed)?.proportion)
}

fn permuton(input: &Path, op: PermutonOp, depths: (u32, u32), k: usize, seed: u64, out: Option<&Path>) -> Result<()> {
    let queries: Vec<PermutonQuery> = load(input)?.into_iter().map(PermutonQuery::new).collect();
    let mut out = output(out)?;
    match op {
        PermutonOp::Boxcount => {
            writeln!(out, "index,size,depth,boxes_hit,slope")?;
            for (i, q) in queries.iter().enumerate() {
                for b in box_counting(q, depths.0..=depths.1)? {
                    writeln!(out, "{i},{},{},{},{}", q.size(), b.scale_exponent, b.boxes_hit, b.slope_estimate)?;
                }
            }
        }
        PermutonOp::Boxdist => {
            // each input against the identity permuton
            writeln!(out, "index,size,depth,distance_to_identity")?;
            for (i, q) in queries.iter().enumerate() {
                let id = PermutonQuery::new(Permutation::identity(q.size()));
                for d in depths.0..=depths.1 {
                    writeln!(out, "{i},{},{d},{}", q.size(), box_distance(q, &id, d)?)?;
                }
            }
        }
        PermutonOp::Pattern => {
            if k == 0 {
                bail!("--k must be positive");
            }
            writeln!(out, "index,size,k,seed,lis,lis_ratio")?;
            for (i, q) in queries.iter().enumerate() {
                let s = derived_seed(seed, i as u64);
                let l = lis(&sample_pattern(q, k, s));
                writeln!(out, "{i},{},{k},{s},{l},{}", q.size(), l as f64 / k as f64)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn write_records(dir: &Path, name: &str, records: &[ScalingRecord]) -> Result<()> {
    let mut f = BufWriter::new(File::create(dir.join(name))?);
    write_csv(&mut f, records)?;
    f.flush()?;
    Ok(())
}

fn write_summary(dir: &Path, summary: &serde_json::Value) -> Result<()> {
    fs::write(dir.join("summary.json"), serde_json::to_string_pretty(summary)? + "\n")?;
    Ok(())
}

fn exp(study: Study, a: &ExpArgs) -> Result<()> {
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let summary = match study {
        Study::LisScaling => {
            let r = experiments::experiment_lis_scaling(&a.sizes, a.replicates, a.seed)?;
            write_records(&a.out, "records.csv", &r.records)?;
            write_records(&a.out, "baseline.csv", &r.baseline_records)?;
            serde_json::to_value(&r)?
        }
        Study::RrInvariance => {
            let mut reports = Vec::new();
            let mut plain = Vec::new();
            let mut rooted = Vec::new();
            for (i, &n) in a.sizes.iter().enumerate() {
                let r = experiments::experiment_rr_invariance(n, a.replicates, derived_seed(a.seed, i as u64))?;
                plain.extend_from_slice(&r.statistical.plain);
                rooted.extend_from_slice(&r.statistical.rooted);
                reports.push(r);
            }
            write_records(&a.out, "records.csv", &plain)?;
            write_records(&a.out, "rerooted.csv", &rooted)?;
            serde_json::to_value(&reports)?
        }
        Study::Cyclic => {
            let r = experiments::experiment_cyclic_displacement(&a.sizes, a.replicates, a.seed)?;
            write_records(&a.out, "records.csv", &r.records)?;
            serde_json::to_value(&r)?
        }
        Study::Boxcount => {
            let mut reports = Vec::new();
            let mut arms: [Vec<ScalingRecord>; 3] = Default::default();
            for (i, &n) in a.sizes.iter().enumerate() {
                let r = experiments::experiment_boxcount(n, a.depths, a.replicates, derived_seed(a.seed, i as u64))?;
                arms[0].extend_from_slice(&r.meandric);
                arms[1].extend_from_slice(&r.uniform);
                arms[2].extend_from_slice(&r.identity);
                reports.push(r);
            }
            write_records(&a.out, "records.csv", &arms[0])?;
            write_records(&a.out, "uniform.csv", &arms[1])?;
            write_records(&a.out, "identity.csv", &arms[2])?;
            serde_json::to_value(&reports)?
        }
        Study::Uniformity => {
            let reports = a
                .sizes
                .iter()
                .enumerate()
                .map(|(i, &n)| experiments::experiment_uniformity(n, a.steps, a.thin, derived_seed(a.seed, i as u64)))
                .collect::<meandric::Result<Vec<_>>>()?;
            write_records(&a.out, "records.csv", &[])?;
            serde_json::to_value(&reports)?
        }
    };
    write_summary(&a.out, &summary)?;
    println!("{}", serde_json::to_string(&summary)?);
    Ok(())
}
