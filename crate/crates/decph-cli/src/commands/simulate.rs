use super::{write_json_atomic, Context};
use crate::manifest::RunManifest;
use clap::Args;
use decph::dynamics::{
    config::{build_initial_p, build_initial_u},
    lookup_variant, simulate, SimConfig, SimulationRecord,
};
use decph::ops;
use decph::{DecError, Result};
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// JSON run configuration.
    pub config: PathBuf,

    /// Also run the reduced twin of a canonical config and record the
    /// sup-norm distance between the projected trajectories.
    #[arg(long)]
    pub compare_reduced: bool,
}

/// Parse the config, keeping the path to the first offending field.
fn parse_config(text: &str) -> Result<SimConfig> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| DecError::Config {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

/// Per-time sup distance between the projected canonical trajectory and
/// the reduced one. Projection sends (rho, pi) to (d rho, pi).
fn compare_reduced_column(
    config: &SimConfig,
    canonical: &SimulationRecord,
    run: &decph::dynamics::config::PreparedRun,
) -> Result<Vec<f64>> {
    let complex = &run.complex;
    let k = config.k;
    let d = ops::exterior_derivative(complex, k)?;
    let reduced_variant = lookup_variant("reduced")?;
    let reduced_system = reduced_variant.build(complex, k, config.tension, config.mu)?;
    let u = build_initial_u(complex, k, &config.initial.u, "initial.u")?;
    let p = build_initial_p(complex, k, &config.initial.p, "initial.p")?;
    let z0 = reduced_variant.initial_state(complex, k, &u, &p)?;
    let reduced = simulate(&reduced_system, &run.laws, &z0, run.dt, run.steps)?;

    let rho_dim = run.system.state_spaces[0].dim;
    let mut column = Vec::with_capacity(canonical.states.len());
    for (zc, zr) in canonical.states.iter().zip(reduced.states.iter()) {
        let mut projected = d.apply_vec(&zc[..rho_dim]);
        projected.extend_from_slice(&zc[rho_dim..]);
        let sup = projected
            .iter()
            .zip(zr.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        column.push(sup);
    }
    Ok(column)
}

fn trajectory_csv(record: &SimulationRecord, compare: Option<&[f64]>) -> String {
    let mut out = String::new();
    out.push_str("t,H,P_b,E_b_cumulative,balance_residual");
    if compare.is_some() {
        out.push_str(",sup_distance_reduced");
    }
    out.push('\n');
    for i in 0..record.times.len() {
        let _ = write!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            record.times[i],
            record.hamiltonian[i],
            record.boundary_power[i],
            record.boundary_energy[i],
            record.balance_residual[i],
        );
        if let Some(col) = compare {
            let _ = write!(out, ",{:.16e}", col[i]);
        }
        out.push('\n');
    }
    out
}

pub fn run(ctx: &Context, args: &SimulateArgs) -> Result<u8> {
    let text = std::fs::read_to_string(&args.config)?;
    let config = parse_config(&text)?;
    let snapshot: serde_json::Value = serde_json::from_str(&text)?;

    if args.compare_reduced && config.variant != "canonical" {
        return Err(DecError::InvalidArgument(format!(
            "--compare-reduced needs a canonical config, got variant '{}'",
            config.variant
        )));
    }

    let run = config.prepare()?;
    let record = simulate(&run.system, &run.laws, &run.initial_state, run.dt, run.steps)?;
    let compare = if args.compare_reduced {
        Some(compare_reduced_column(&config, &record, &run)?)
    } else {
        None
    };

    ctx.ensure_out_dir()?;
    let csv = trajectory_csv(&record, compare.as_deref());
    decph::write_atomic(&ctx.path("trajectory.csv"), csv.as_bytes())?;
    write_json_atomic(&ctx.path("states.json"), &record)?;

    let mut manifest = RunManifest::new(ctx.seed, snapshot);
    manifest.add_input(&args.config)?;
    manifest.add_output("trajectory.csv");
    manifest.add_output("states.json");
    manifest.write(&ctx.out_dir)?;

    let threshold = run.balance_tol * record.max_hamiltonian().max(1.0);
    println!(
        "simulated {} steps of dt = {:.16e} ({} variant)",
        record.steps(),
        record.dt,
        record.variant
    );
    if let Some(col) = &compare {
        let sup = col.iter().cloned().fold(0.0, f64::max);
        println!("max projected distance to reduced run: {:.16e}", sup);
    }
    println!(
        "final balance residual: {:.16e} (threshold {:.16e})",
        record.final_residual(),
        threshold
    );
    Ok(if record.final_residual() <= threshold { 0 } else { 1 })
}
