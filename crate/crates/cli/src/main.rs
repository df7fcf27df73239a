use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand};
use extlap::transforms::basis::set_basis_store;
use extlap_cli::cache::DiskCache;
use extlap_cli::config::{parse_args, parse_file, Diagnostic, Origin};
use extlap_cli::experiments::{execute, seed_entry, Experiment, ExperimentConfig};
use extlap_cli::output::{write_outputs, CacheInfo};

/// Numerical experiments for the Dirichlet Laplacian outside the unit ball.
#[derive(Parser)]
#[command(name = "extlap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment suite. Exit status: 0 all checks pass, 1 a check failed,
    /// 2 invalid configuration, 3 computation or I/O error.
    Run {
        experiment: String,
        /// `key=value` settings; they override the config file.
        settings: Vec<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory [default: extlap-out/<experiment>].
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads [default: all cores].
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Do not read or write the mode-table cache.
        #[arg(long)]
        no_cache: bool,
    },
    /// List experiments and the statement each one checks.
    List {
        /// Also print every parameter with its default.
        #[arg(long)]
        params: bool,
    },
}

fn fail_config(diags: &[Diagnostic]) -> ExitCode {
    let mut diags = diags.to_vec();
    diags.sort_by_key(|d| d.origin.rank());
    for d in &diags {
        eprintln!("error: {d}");
    }
    ExitCode::from(2)
}

fn list(params: bool) {
    for e in Experiment::ALL {
        println!("{:<20} {}", e.name(), e.statement());
        if params {
            for p in e.params() {
                println!("    {:<18} {:<28} {}", p.key, p.default.unwrap_or("(derived)"), p.help);
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run(
    name: &str,
    settings: &[String],
    config: Option<PathBuf>,
    out: Option<PathBuf>,
    jobs: Option<usize>,
    seed: Option<u64>,
    no_cache: bool,
) -> ExitCode {
    let Some(experiment) = Experiment::from_name(name) else {
        let known: Vec<&str> = Experiment::ALL.iter().map(|e| e.name()).collect();
        return fail_config(&[Diagnostic::new(Origin::Default, format!("unknown experiment `{name}` (one of: {})", known.join(", ")))]);
    };
    let mut entries = Vec::new();
    let mut diags = Vec::new();
    if let Some(path) = &config {
        let shown = path.display().to_string();
        match std::fs::read(path).map(String::from_utf8) {
            Ok(Ok(text)) => {
                let (e, d) = parse_file(&text, &shown);
                entries.extend(e);
                diags.extend(d);
            }
            Ok(Err(_)) => diags.push(Diagnostic::new(Origin::Flag("--config"), format!("{shown} is not valid UTF-8"))),
            Err(e) => diags.push(Diagnostic::new(Origin::Flag("--config"), format!("cannot read {shown}: {e}"))),
        }
    }
    let (e, d) = parse_args(settings);
    entries.extend(e);
    diags.extend(d);
    if let Some(s) = seed {
        entries.push(seed_entry(s));
    }
    if jobs == Some(0) {
        diags.push(Diagnostic::new(Origin::Flag("--jobs"), "needs at least one thread"));
    }
    let cfg = match ExperimentConfig::build(experiment, &entries) {
        Ok(cfg) if diags.is_empty() => cfg,
        Ok(_) => return fail_config(&diags),
        Err(more) => {
            diags.extend(more);
            return fail_config(&diags);
        }
    };

    if let Some(n) = jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} worker threads: {e}");
            return ExitCode::from(3);
        }
    }
    let cache = if no_cache {
        None
    } else {
        let dir = DiskCache::default_dir();
        match DiskCache::open(&dir, extlap::VERSION) {
            Ok(c) => Some(Arc::new(c)),
            Err(e) => {
                return fail_config(&[Diagnostic::new(
                    Origin::Flag("cache"),
                    format!("cache directory {} is not writable ({e}); set EXTLAP_CACHE_DIR or pass --no-cache", dir.display()),
                )])
            }
        }
    };
    if let Some(c) = &cache {
        set_basis_store(Some(c.clone()));
    }

    let out = out.unwrap_or_else(|| PathBuf::from("extlap-out").join(experiment.name()));
    let t0 = Instant::now();
    let result = match execute(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {} failed: {e}", experiment.name());
            return ExitCode::from(3);
        }
    };
    let info = cache.as_ref().map(|c| CacheInfo { dir: c.dir(), stats: c.stats() });
    if let Err(e) = write_outputs(&out, &cfg, &result, info, t0.elapsed().as_secs_f64()) {
        eprintln!("error: cannot write outputs to {}: {e}", out.display());
        return ExitCode::from(3);
    }

    println!("{}: {}", experiment.name(), experiment.statement());
    for c in &result.checks {
        println!("{} {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    println!("outputs in {}", out.display());
    let failed: Vec<_> = result.checks.iter().filter(|c| !c.passed).collect();
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        for c in failed {
            eprintln!("invariant failed: {}: {}", c.name, c.detail);
        }
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::List { params } => {
            list(params);
            ExitCode::SUCCESS
        }
        Command::Run { experiment, settings, config, out, jobs, seed, no_cache } => {
            run(&experiment, &settings, config, out, jobs, seed, no_cache)
        }
    }
}
