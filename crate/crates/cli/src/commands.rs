use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;
use serde_json::json;

use seaweed_core::ecology::Factor;
use seaweed_core::engine::{read_trace, run_replay, write_trace, EventKind};
use seaweed_core::genmodel::{bundled_datasets, fit_mlp, FitParams, ResponseCurveDataset};
use seaweed_core::policy::{simulate as run_policy, PolicyScript};
use seaweed_core::{Engine, EngineConfig};
use seaweed_service::{StreamOptions, World};

use crate::WorldArgs;

#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
}

impl From<seaweed_core::Error> for CliError {
    fn from(e: seaweed_core::Error) -> Self {
        Self {
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    seaweed_core::Error::io(path, e).into()
}

type CliResult = Result<(), CliError>;

fn load_config(args: &WorldArgs) -> Result<EngineConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => EngineConfig::load(path)?,
        None => EngineConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> CliResult {
    fs::write(path, contents).map_err(|e| io_err(path, e))
}

fn create_dir(dir: &Path) -> CliResult {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

pub fn serve(args: &WorldArgs, bind: &str, stream_hz: f64, record: Option<&Path>) -> CliResult {
    if !(stream_hz > 0.0 && stream_hz.is_finite()) {
        return Err(seaweed_core::Error::Input("--stream-hz must be positive".into()).into());
    }
    let engine = Engine::new(load_config(args)?)?;
    let mut world = World::new(engine);
    if let Some(path) = record {
        let file = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| io_err(path, e))?;
        world = world.with_recorder(std::io::BufWriter::new(file));
    }
    let world = Arc::new(world);

    let rt = tokio::runtime::Runtime::new().map_err(|e| io_err(Path::new("<runtime>"), e))?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind(bind)
            .await
            .map_err(|e| CliError {
                kind: "bind",
                message: format!("cannot listen on {bind}: {e}"),
            })?;
        let addr = listener
            .local_addr()
            .map_err(|e| io_err(Path::new(bind), e))?;
        println!("{}", json!({"listening": addr.to_string()}));
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        seaweed_service::serve(
            listener,
            world,
            StreamOptions { rate_hz: stream_hz },
            shutdown,
        )
        .await
        .map_err(|e| io_err(Path::new(bind), e))
    })
}

pub fn simulate(
    args: &WorldArgs,
    policy: Option<&Path>,
    duration: f64,
    out: &Path,
    sample_every: u64,
) -> CliResult {
    let cfg = load_config(args)?;
    let policy = match policy {
        Some(p) => PolicyScript::load(p)?,
        None => PolicyScript::idle(),
    };
    let run = run_policy(&cfg, &policy, duration, sample_every)?;
    create_dir(out)?;
    write(&out.join("timeseries.csv"), run.to_csv())?;
    let state =
        serde_json::to_string_pretty(&run.final_state).map_err(seaweed_core::Error::from)?;
    write(&out.join("final_state.json"), state + "\n")?;
    let mut trace = Vec::new();
    write_trace(&mut trace, &run.trace)?;
    write(&out.join("trace.jsonl"), trace)?;
    let st = &run.final_state;
    println!(
        "{}",
        json!({
            "final_hash": run.final_hash,
            "tick": st.tick,
            "stage": st.eco.stage,
            "plants": st.swarm.plants.len(),
            "extinct": st.swarm.extinct,
            "dispensed": st.ledger.dispensed,
        })
    );
    Ok(())
}

#[derive(Serialize)]
struct FactorReport {
    factor: String,
    status: &'static str,
    mse: Option<f64>,
    threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

pub fn fit(data: Option<&Path>, out: &Path, params: &FitParams, threshold: f64) -> CliResult {
    let datasets: Vec<ResponseCurveDataset> = match data {
        None => bundled_datasets(),
        Some(dir) => Factor::ALL
            .iter()
            .map(|f| ResponseCurveDataset::load(dir.join(format!("{}.json", f.label()))))
            .collect::<Result<_, _>>()?,
    };
    create_dir(out)?;
    let mut reports = Vec::new();
    for ds in &datasets {
        let report = match fit_mlp(ds, params) {
            Ok(fit) => {
                write(
                    &out.join(format!("{}.json", ds.factor)),
                    fit.model.to_json()? + "\n",
                )?;
                FactorReport {
                    factor: ds.factor.clone(),
                    status: if fit.mse < threshold {
                        "ok"
                    } else {
                        "above_threshold"
                    },
                    mse: Some(fit.mse),
                    threshold,
                    error: None,
                }
            }
            Err(e) => FactorReport {
                factor: ds.factor.clone(),
                status: "diverged",
                mse: None,
                threshold,
                error: Some(e.to_string()),
            },
        };
        reports.push(report);
    }
    let summary = json!({"params": params, "factors": reports});
    let text = serde_json::to_string_pretty(&summary).map_err(seaweed_core::Error::from)?;
    write(&out.join("fit_report.json"), text + "\n")?;
    println!(
        "{}",
        serde_json::to_string(&summary).map_err(seaweed_core::Error::from)?
    );

    let failed: Vec<String> = reports
        .iter()
        .filter(|r| r.status != "ok")
        .map(|r| format!("{} {}", r.factor, r.status))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError {
            kind: "fitting",
            message: failed.join(", "),
        })
    }
}

pub fn replay(
    args: &WorldArgs,
    trace_path: &Path,
    ticks: Option<u64>,
    out: Option<&Path>,
    snapshot_every: u64,
) -> CliResult {
    let cfg = load_config(args)?;
    let trace = read_trace(trace_path)?;
    let ticks = ticks.unwrap_or_else(|| {
        let tail = trace
            .iter()
            .rposition(|e| e.kind == EventKind::Reset)
            .map_or(&trace[..], |i| &trace[i + 1..]);
        tail.iter().map(|e| e.tick + 1).max().unwrap_or(0)
    });
    let result = run_replay(&cfg, &trace, ticks, out.map(|_| snapshot_every))?;
    if let Some(dir) = out {
        create_dir(dir)?;
        let mut lines = String::new();
        for s in &result.snapshots {
            lines.push_str(&s.to_json());
            lines.push('\n');
        }
        write(&dir.join("snapshots.jsonl"), lines)?;
    }
    println!(
        "{}",
        json!({"final_hash": result.final_hash, "tick": result.final_state.tick, "events": trace.len()})
    );
    Ok(())
}
