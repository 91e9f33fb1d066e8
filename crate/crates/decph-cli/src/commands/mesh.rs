use super::{write_json_atomic, Context};
use crate::manifest::RunManifest;
use clap::Args;
use decph::mesh::{build_interval_complex, build_triangle_strip_complex, validate_complex};
use decph::{DecError, Result};

#[derive(Debug, Args)]
pub struct MeshArgs {
    /// Interval length (with --cells).
    #[arg(long, default_value_t = 1.0)]
    pub length: f64,

    /// Interval cell count; selects a one-dimensional mesh.
    #[arg(long)]
    pub cells: Option<usize>,

    /// Strip row count; selects a two-dimensional mesh together with --cols.
    #[arg(long)]
    pub rows: Option<usize>,

    /// Strip column count.
    #[arg(long)]
    pub cols: Option<usize>,

    /// Strip edge length (with --rows/--cols).
    #[arg(long, default_value_t = 1.0)]
    pub edge_len: f64,
}

pub fn run(ctx: &Context, args: &MeshArgs) -> Result<u8> {
    let complex = match (args.cells, args.rows, args.cols) {
        (Some(cells), None, None) => build_interval_complex(args.length, cells)?,
        (None, Some(rows), Some(cols)) => {
            build_triangle_strip_complex(rows, cols, args.edge_len)?
        }
        _ => {
            return Err(DecError::InvalidArgument(
                "give --cells for an interval, or --rows and --cols for a strip".into(),
            ))
        }
    };
    ctx.ensure_out_dir()?;
    decph::mesh::write_mesh_file(&complex, &ctx.path("mesh.json"))?;
    let report = validate_complex(&complex);
    write_json_atomic(&ctx.path("validation.json"), &report)?;

    let mut manifest = RunManifest::new(
        ctx.seed,
        serde_json::json!({
            "length": args.length,
            "cells": args.cells,
            "rows": args.rows,
            "cols": args.cols,
            "edge_len": args.edge_len,
        }),
    );
    manifest.add_output("mesh.json");
    manifest.add_output("validation.json");
    manifest.write(&ctx.out_dir)?;

    println!(
        "mesh: dimension {}, {} vertices, {} top simplices",
        complex.dim(),
        complex.simplex_count(0),
        complex.simplex_count(complex.dim())
    );
    for check in &report.checks {
        println!(
            "  {}: {}",
            check.name,
            if check.pass { "pass" } else { "FAIL" }
        );
    }
    println!("validation: {}", if report.pass { "pass" } else { "FAIL" });
    Ok(if report.pass { 0 } else { 1 })
}
