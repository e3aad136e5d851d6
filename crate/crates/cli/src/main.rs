use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use preper_core::arith::{format_rational, parse_rational, Rational};
use preper_core::asymptotics::{
    all_constants, convergence_report, count_image_phi, count_image_psi, squarefull_census, Quantity,
};
use preper_core::census::{export, run_census_checkpoints, CensusConfig, CsvRowWriter, ExportFormat};
use preper_core::engine::{compute_preper, EngineConfig};
use preper_core::family::{builtin_family, FamilyLift};
use preper_core::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser)]
#[command(name = "preper", version, about = "Rational preperiodic points of one-parameter families of maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep every parameter t with H(t) ≤ X and report the total count 𝒜(X),
    /// the excess ℛ(X) over the generic portrait, N(E, X), N(Z_l, X) and, for
    /// the quadratic family, the Poonen class tallies with both identities.
    Census {
        /// Family: quadratic, crit2, cubic, a template such as
        /// `unicritical:3`, or a JSON family file.
        #[arg(long)]
        family: String,
        /// Height bound X.
        #[arg(long)]
        height: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Write one row per parameter here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Exit with status 2 if an excess portrait fits no Poonen class.
        #[arg(long)]
        strict: bool,
        /// Also list the parameters with a cycle longer than l.
        #[arg(long)]
        l: Option<u32>,
    },
    /// Print the rational preperiodic portrait PrePer(f_t, ℚ) of one member
    /// f_t: nodes, edges, (period, tail) types and the method that decided it.
    Preper {
        family: String,
        /// Parameter t as `a/b` or an integer.
        #[arg(allow_hyphen_values = true)]
        t: String,
    },
    /// Recompute the lattice counts N(φ₋₃(ℚ^×), 100) = 53, N(φ₁(ℚ^×), 100) = 64
    /// and N(ψ(ℚ), 100) = 65 and compare them with the published figures.
    VerifyFigures {
        #[arg(long, default_value_t = 100)]
        height: u64,
        /// Show the class breakdown of N(φ_c(ℚ^×), X) for this c only.
        #[arg(long, allow_hyphen_values = true)]
        c: Option<i64>,
        /// Also sample this many coprime pairs with this seed and check the
        /// gcd classification d ∈ {1, 16, 4} behind the region counts.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print C_{2,1}, C_{4,2}, C_{4,0}, γ(1), γ(−3), C₁, C₂, ζ(3/2)/ζ(3) and
    /// the slope (3/π²)γ(1) of N(ψ(ℚ), X) as JSON.
    Constants {
        #[arg(long, default_value_t = 20)]
        digits: usize,
    },
    /// Tabulate a counting function against X with its ratio to X: NE and R
    /// (N(E, X) and ℛ(X) of the quadratic census, slopes C₁ and C₂),
    /// image-phi1, image-phi-3 and image-psi.
    Trend {
        quantity: String,
        /// Comma-separated height bounds.
        #[arg(long, value_delimiter = ',', default_value = "100,200,400")]
        checkpoints: Vec<u64>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Write `<out>.value.dat` and `<out>.ratio.dat` instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count N(φ_c(ℚ^×), X) for φ_c(t) = c/4 − t² by residue class of the
    /// denominator, or N(ψ(ℚ), X) for ψ(r) = r² − r with --psi.
    ImageCount {
        #[arg(long)]
        height: u64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 1)]
        c: i64,
        #[arg(long)]
        psi: bool,
    },
    /// Count squarefull n ≤ X through n = b²m³ and compare with
    /// ζ(3/2)/ζ(3)·√X.
    Squarefull {
        #[arg(long)]
        height: u64,
    },
}

fn load_family(spec: &str) -> preper_core::Result<FamilyLift> {
    let path = Path::new(spec);
    if spec.ends_with(".json") || path.is_file() {
        FamilyLift::from_json_file(path)
    } else {
        builtin_family(spec)
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::ResourceLimit { .. } | Error::FactorizationLimit(..) | Error::Overflow(_)) => EXIT_RESOURCE,
        _ => EXIT_USAGE,
    }
}

fn print_json(v: &impl serde::Serialize) -> anyhow::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn truncate_digits(decimal: &str, digits: usize) -> String {
    match decimal.split_once('.') {
        Some((ip, fp)) => format!("{ip}.{}", &fp[..fp.len().min(digits)]),
        None => decimal.to_string(),
    }
}

fn census(
    family: &str,
    height: u64,
    workers: usize,
    out: Option<&Path>,
    format: Format,
    strict: bool,
    l: Option<u32>,
) -> anyhow::Result<u8> {
    let lift = load_family(family)?;
    let cfg = CensusConfig {
        workers,
        engine: EngineConfig::default(),
    };
    let summary = match (out, format) {
        (Some(path), Format::Csv) => {
            let file = File::create(path).map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
            let mut writer = CsvRowWriter::new(BufWriter::new(file));
            let mut s = run_census_checkpoints(&lift, &[height], &cfg, |row| writer.write(row))?;
            writer.finish()?.flush()?;
            s.pop().expect("one checkpoint")
        }
        (Some(path), Format::Json) => {
            let mut rows = Vec::new();
            let mut s = run_census_checkpoints(&lift, &[height], &cfg, |row| {
                rows.push(row.clone());
                Ok(())
            })?;
            let s = s.pop().expect("one checkpoint");
            export(&s, &rows, ExportFormat::Json, path)?;
            s
        }
        (None, _) => run_census_checkpoints(&lift, &[height], &cfg, |_| Ok(()))?
            .pop()
            .expect("one checkpoint"),
    };
    print_json(&summary)?;
    if let Some(l) = l {
        let long: Vec<String> = summary
            .long_cycles
            .get(&l)
            .map(|ts| ts.iter().map(format_rational).collect())
            .unwrap_or_default();
        println!("cycles longer than {l}: {}", long.len());
        for t in long {
            println!("{t}");
        }
    }
    if strict && !summary.unclassified.is_empty() {
        eprintln!("{} unclassified portrait(s)", summary.unclassified.len());
        return Ok(EXIT_VERIFY);
    }
    Ok(0)
}

fn preper(family: &str, t: &str) -> anyhow::Result<u8> {
    let lift = load_family(family)?;
    let t: Rational = parse_rational(t)?;
    let m = lift.specialize(&t)?;
    let r = compute_preper(&m, Some(&lift), &EngineConfig::default())?;
    let record = r.portrait.record(&t);
    print_json(&json!({
        "family": lift.name(),
        "t": record.t,
        "count": r.count,
        "nodes": record.nodes,
        "edges": record.edges,
        "types": record.types,
        "method": r.method,
        "witness": r.witness.map(|w| w.to_string()),
        "search_bound": r.search_bound.map(|b| format_rational(&b)),
    }))?;
    Ok(0)
}

fn verify_figures(height: u64, c: Option<i64>, seed: Option<u64>) -> anyhow::Result<u8> {
    let captions = [(-3, [9, 35, 9], 53), (1, [13, 41, 10], 64)];
    let mut ok = true;
    if let Some(c) = c {
        let r = count_image_phi(c, height)?;
        println!("c = {c}, X = {height}: {} + {} + {} = {}", r.classes[0], r.classes[1], r.classes[2], r.total);
        if let Some((_, classes, total)) = captions.iter().find(|(cc, _, _)| *cc == c).filter(|_| height == 100) {
            ok &= r.classes == *classes && r.total == *total;
        }
    } else {
        let mut marks = Vec::new();
        for (c, classes, total) in captions {
            let r = count_image_phi(c, height)?;
            let pass = height != 100 || (r.classes == classes && r.total == total);
            if !pass {
                eprintln!("phi_{c}: expected {classes:?} = {total}, got {:?} = {}", r.classes, r.total);
            }
            ok &= pass;
            marks.push(format!("{} {}", r.total, if pass { "✓" } else { "✗" }));
        }
        let psi = count_image_psi(height)?;
        let pass = height != 100 || psi == 65;
        if !pass {
            eprintln!("psi: expected 65, got {psi}");
        }
        ok &= pass;
        marks.push(format!("{psi} {}", if pass { "✓" } else { "✗" }));
        println!("{}", marks.join(" "));
    }
    if let Some(seed) = seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bad = 0;
        for _ in 0..10_000 {
            let (a, b): (i64, i64) = (rng.gen_range(1..5000), rng.gen_range(1..5000));
            if num_integer::gcd(a, b) != 1 {
                continue;
            }
            let d = [4, 1, 16, 1][(b % 4) as usize];
            for c in [1i64, -3] {
                if num_integer::gcd(c * b * b - 4 * a * a, 4 * b * b) != d {
                    bad += 1;
                }
            }
        }
        println!("gcd classification (seed {seed}): {bad} mismatches");
        ok &= bad == 0;
    }
    Ok(if ok { 0 } else { EXIT_VERIFY })
}

fn constants(digits: usize) -> anyhow::Result<u8> {
    let reports: Vec<_> = all_constants()?
        .into_iter()
        .map(|c| {
            json!({
                "name": c.name,
                "decimal": truncate_digits(&c.decimal, digits),
                "formula": c.formula,
            })
        })
        .collect();
    print_json(&reports)?;
    Ok(0)
}

fn trend(quantity: &str, checkpoints: &[u64], workers: usize, out: Option<&Path>) -> anyhow::Result<u8> {
    let q: Quantity = quantity.parse()?;
    if checkpoints.is_empty() || checkpoints.contains(&0) {
        anyhow::bail!(Error::InvalidArgument("checkpoints must be positive".into()));
    }
    let rows = convergence_report(q, checkpoints, workers)?;
    let value: String = rows.iter().map(|r| format!("{} {}\n", r.x, r.value)).collect();
    let ratio: String = rows.iter().map(|r| format!("{} {:.6}\n", r.x, r.ratio)).collect();
    match out {
        Some(prefix) => {
            for (suffix, body) in [("value.dat", &value), ("ratio.dat", &ratio)] {
                let path = PathBuf::from(format!("{}.{suffix}", prefix.display()));
                std::fs::write(&path, body).map_err(|source| Error::Io { path, source })?;
            }
        }
        None => {
            println!("# X value");
            print!("{value}");
            println!();
            println!("# X value/X (slope {:.6})", rows[0].slope);
            print!("{ratio}");
        }
    }
    Ok(0)
}

fn image_count(height: u64, c: i64, psi: bool) -> anyhow::Result<u8> {
    if psi {
        println!("X,total");
        println!("{height},{}", count_image_psi(height)?);
    } else {
        let r = count_image_phi(c, height)?;
        println!("X,total,class_2_1,class_4_2,class_4_0");
        println!("{height},{},{},{},{}", r.total, r.classes[0], r.classes[1], r.classes[2]);
    }
    Ok(0)
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Census {
            family,
            height,
            workers,
            out,
            format,
            strict,
            l,
        } => census(&family, height, workers, out.as_deref(), format, strict, l),
        Command::Preper { family, t } => preper(&family, &t),
        Command::VerifyFigures { height, c, seed } => verify_figures(height, c, seed),
        Command::Constants { digits } => constants(digits),
        Command::Trend {
            quantity,
            checkpoints,
            workers,
            out,
        } => trend(&quantity, &checkpoints, workers, out.as_deref()),
        Command::ImageCount { height, c, psi } => image_count(height, c, psi),
        Command::Squarefull { height } => {
            print_json(&squarefull_census(height)?)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
