use super::{write_json_atomic, Context};
use crate::manifest::RunManifest;
use clap::Args;
use decph::mesh::read_mesh_file;
use decph::reduction::reduction_report;
use decph::{DecError, Result};
use std::path::PathBuf;

#[derive(Debug, Args)]
pub struct ReduceArgs {
    /// Mesh file written by the mesh command.
    pub mesh: PathBuf,

    /// Degree of the configuration form.
    #[arg(long, default_value_t = 0)]
    pub k: usize,

    /// Random effort samples for the reduced isotropy check.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,

    /// Residual tolerance for sampled checks.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

pub fn run(ctx: &Context, args: &ReduceArgs) -> Result<u8> {
    let complex = read_mesh_file(&args.mesh)?;
    let n = complex.dim();
    if args.k >= n {
        return Err(DecError::DegreeOutOfRange {
            degree: args.k,
            dim: n,
        });
    }
    let report = reduction_report(&complex, args.k, args.samples, args.tol, ctx.seed)?;

    ctx.ensure_out_dir()?;
    write_json_atomic(&ctx.path("reduction_report.json"), &report)?;
    let mut manifest = RunManifest::new(
        ctx.seed,
        serde_json::json!({
            "mesh": args.mesh.display().to_string(),
            "k": args.k,
            "samples": args.samples,
            "tol": args.tol,
        }),
    );
    manifest.add_input(&args.mesh)?;
    manifest.add_output("reduction_report.json");
    manifest.write(&ctx.out_dir)?;

    println!(
        "reduction (n = {}, k = {}): commutation residual {:.16e}, reduced dim {}",
        report.n, report.k, report.commutation_residual, report.dim_reduced
    );
    println!(
        "  isotropy: {}",
        if report.isotropy_pass { "pass" } else { "FAIL" }
    );
    println!(
        "  sign conversion: {}",
        if report.sign_conversion_pass {
            "pass"
        } else {
            "FAIL"
        }
    );
    let pass =
        report.commutation_residual <= 1e-14 && report.isotropy_pass && report.sign_conversion_pass;
    println!("reduce: {}", if pass { "pass" } else { "FAIL" });
    Ok(if pass { 0 } else { 1 })
}
