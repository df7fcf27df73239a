//! Report, table, plot-data and manifest files.
//!
//! `report.json` depends only on the configuration, so identical configs give byte-identical
//! reports. Timings, cache statistics and file checksums go to `manifest.json`.

use std::fs;
use std::io;
use std::path::Path;

use serde_json::json;
use sha2::{Digest, Sha256};

use crate::cache::CacheStats;
use crate::experiments::{ExperimentConfig, Run};

pub fn config_hash(cfg: &ExperimentConfig) -> String {
    hex::encode(Sha256::digest(cfg.canonical().as_bytes()))
}

fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

pub fn report_json(cfg: &ExperimentConfig, run: &Run) -> String {
    let report = json!({
        "header": {
            "experiment": cfg.experiment.name(),
            "statement": cfg.experiment.statement(),
            "config_hash": config_hash(cfg),
            "library_version": extlap::VERSION,
            "seed": cfg.seed(),
        },
        "parameters": cfg.params.to_json(),
        "passed": run.passed(),
        "checks": run.checks,
        "results": run.results,
    });
    let mut s = serde_json::to_string_pretty(&report).expect("reports serialize");
    s.push('\n');
    s
}

pub struct CacheInfo<'a> {
    pub dir: &'a Path,
    pub stats: CacheStats,
}

/// Writes every output under `dir`; `tables/` and `plotdata/` are replaced wholesale.
pub fn write_outputs(dir: &Path, cfg: &ExperimentConfig, run: &Run, cache: Option<CacheInfo<'_>>, seconds: f64) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let mut outputs = Vec::new();
    let mut emit = |rel: String, bytes: &[u8]| -> io::Result<()> {
        write_atomic(&dir.join(&rel), bytes)?;
        outputs.push(json!({ "path": rel, "sha256": hex::encode(Sha256::digest(bytes)) }));
        Ok(())
    };
    for (sub, files, ext) in [("tables", &run.tables, "csv"), ("plotdata", &run.plots, "dat")] {
        let d = dir.join(sub);
        if d.exists() {
            fs::remove_dir_all(&d)?;
        }
        fs::create_dir_all(&d)?;
        for (name, body) in files {
            emit(format!("{sub}/{name}.{ext}"), body.as_bytes())?;
        }
    }
    emit("report.json".into(), report_json(cfg, run).as_bytes())?;

    let manifest = json!({
        "config_hash": config_hash(cfg),
        "config": cfg.canonical(),
        "experiment": cfg.experiment.name(),
        "statement": cfg.experiment.statement(),
        "library_version": extlap::VERSION,
        "cli_version": env!("CARGO_PKG_VERSION"),
        "threads": rayon::current_num_threads(),
        "stages": run.stages,
        "total_seconds": seconds,
        "cache": cache.map(|c| json!({ "dir": c.dir.display().to_string(), "stats": c.stats })),
        "outputs": outputs,
    });
    let mut s = serde_json::to_string_pretty(&manifest).expect("manifests serialize");
    s.push('\n');
    write_atomic(&dir.join("manifest.json"), s.as_bytes())
}
