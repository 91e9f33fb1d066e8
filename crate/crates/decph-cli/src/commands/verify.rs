use super::{write_json_atomic, Context};
use crate::manifest::RunManifest;
use clap::Args;
use decph::dirac::{check_maximal_isotropy, SimplicialDiracStructure, StructureBlock};
use decph::mesh::{read_mesh_file, ComplexSkeleton};
use decph::ops::{self, TraceKind};
use decph::reduction::{sign_convert_to_stokes_dirac, Reduction};
use decph::{sign, sparse, DecError, Result};
use serde::Serialize;
use std::path::PathBuf;

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Mesh file written by the mesh command.
    pub mesh: PathBuf,

    /// Degree of the configuration form.
    #[arg(long, default_value_t = 0)]
    pub k: usize,

    /// Expected mesh dimension; rejected if the file disagrees.
    #[arg(long)]
    pub n: Option<usize>,

    /// Random effort samples for the isotropy check.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,

    /// Residual tolerance for sampled checks.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,

    /// Export every operator as coordinate-list text with a JSON
    /// descriptor header, for cross-checking against other tools.
    #[arg(long)]
    pub dump_operators: bool,

    /// Test hook: flip one structure block sign before checking.
    #[arg(long, hide = true)]
    pub corrupt_sign: bool,
}

#[derive(Debug, Serialize)]
struct VerifyCheck {
    name: String,
    pass: bool,
    residual: Option<f64>,
    detail: String,
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    mesh: String,
    n: usize,
    k: usize,
    samples: usize,
    tol: f64,
    seed: u64,
    corrupt_sign: bool,
    checks: Vec<VerifyCheck>,
    pass: bool,
}

fn max_abs_entry(m: &sparse::CsrMatrix<f64>) -> f64 {
    m.triplet_iter().map(|(_, _, v)| v.abs()).fold(0.0, f64::max)
}

pub fn run(ctx: &Context, args: &VerifyArgs) -> Result<u8> {
    let complex = read_mesh_file(&args.mesh)?;
    let n = complex.dim();
    if let Some(expected) = args.n {
        if expected != n {
            return Err(DecError::InvalidArgument(format!(
                "mesh file has dimension {}, --n asked for {}",
                n, expected
            )));
        }
    }
    if args.k >= n {
        return Err(DecError::DegreeOutOfRange {
            degree: args.k,
            dim: n,
        });
    }
    let k = args.k;
    let mut checks = Vec::new();

    // 1. d following d vanishes, primal and dual, wherever defined.
    {
        let mut residual = 0.0_f64;
        for j in 0..n.saturating_sub(1) {
            let d0 = ops::exterior_derivative(&complex, j)?;
            let d1 = ops::exterior_derivative(&complex, j + 1)?;
            residual = residual.max(max_abs_entry(&sparse::matmul(&d1.matrix, &d0.matrix)));
            let di0 = ops::dual_exterior_derivative(&complex, n - j - 2, j + 2)?;
            let di1 = ops::dual_exterior_derivative(&complex, n - j - 1, j + 1)?;
            residual = residual.max(max_abs_entry(&sparse::matmul(&di1.matrix, &di0.matrix)));
        }
        checks.push(VerifyCheck {
            name: "d_after_d_vanishes".into(),
            pass: residual == 0.0,
            residual: Some(residual),
            detail: "compositions of consecutive derivatives, primal and dual".into(),
        });
    }

    // 2. Adjointness: the dual derivatives are the signed transposes of
    // the primal derivative and the trace, bit exact.
    {
        let mut ok = true;
        let mut residual = 0.0_f64;
        for q in 1..=n {
            let p = n + 1 - q;
            let di = ops::dual_exterior_derivative(&complex, n - q, q)?;
            let d = ops::exterior_derivative(&complex, n - p)?;
            let want = sparse::scale(&sparse::transpose(&d.matrix), sign::neg_one_pow(q));
            ok &= sparse::exactly_equal(&di.matrix, &want);
            residual = residual.max(sparse::max_abs_diff(&di.matrix, &want));
            let db = ops::boundary_dual_derivative(&complex, n - q)?;
            let tr = ops::trace_map(&complex, n - p, TraceKind::Primal)?;
            let want = sparse::scale(&sparse::transpose(&tr.matrix), sign::neg_one_pow(n - p));
            ok &= sparse::exactly_equal(&db.matrix, &want);
            residual = residual.max(sparse::max_abs_diff(&db.matrix, &want));
        }
        checks.push(VerifyCheck {
            name: "adjointness".into(),
            pass: ok,
            residual: Some(residual),
            detail: "dual derivatives equal signed transposes of d and tr".into(),
        });
    }

    // 3 + 4. Isotropy and maximality of the simplicial structure for
    // (p, q) = (n - k, k + 1), with the optional corruption hook.
    {
        let base = SimplicialDiracStructure::new(&complex, n - k, k + 1)?;
        let structure = if args.corrupt_sign {
            base.flip_block(StructureBlock::DualDerivative)
        } else {
            base
        };
        let report = check_maximal_isotropy(&structure, args.samples, args.tol, ctx.seed)?;
        let residual = report.max_self_pairing.max(report.max_cross_pairing);
        checks.push(VerifyCheck {
            name: "isotropy".into(),
            pass: residual <= args.tol,
            residual: Some(residual),
            detail: format!(
                "max |<(f,e),(f,e)>| over {} random graph samples",
                report.samples
            ),
        });
        checks.push(VerifyCheck {
            name: "maximality".into(),
            pass: report.dim_d == report.dim_f,
            residual: None,
            detail: format!(
                "graph rank {} vs flow dimension {}",
                report.dim_d, report.dim_f
            ),
        });
    }

    // 5. The composed reduction equals its closed form.
    {
        let reduction = Reduction::new(&complex, k)?;
        checks.push(VerifyCheck {
            name: "diagram_commutation".into(),
            pass: reduction.commutation_residual <= 1e-14,
            residual: Some(reduction.commutation_residual),
            detail: "tangent-sharp-cotangent composition vs closed form".into(),
        });

        // 6. The sign conversion lands bit exact on the direct structure.
        let conversion = sign_convert_to_stokes_dirac(&complex, &reduction);
        checks.push(VerifyCheck {
            name: "sign_conversion".into(),
            pass: conversion.is_ok(),
            residual: None,
            detail: match &conversion {
                Ok(c) => format!("relabeled map equals the ({}, {}) structure", c.p, c.q),
                Err(e) => e.to_string(),
            },
        });
    }

    let pass = checks.iter().all(|c| c.pass);
    let report = VerifyReport {
        mesh: args.mesh.display().to_string(),
        n,
        k,
        samples: args.samples,
        tol: args.tol,
        seed: ctx.seed,
        corrupt_sign: args.corrupt_sign,
        checks,
        pass,
    };

    ctx.ensure_out_dir()?;
    write_json_atomic(&ctx.path("verify_report.json"), &report)?;
    let mut manifest = RunManifest::new(
        ctx.seed,
        serde_json::json!({
            "mesh": report.mesh,
            "k": k,
            "samples": args.samples,
            "tol": args.tol,
            "corrupt_sign": args.corrupt_sign,
            "dump_operators": args.dump_operators,
        }),
    );
    manifest.add_input(&args.mesh)?;
    manifest.add_output("verify_report.json");
    if args.dump_operators {
        let written = dump_operators(ctx, &complex)?;
        for name in &written {
            manifest.add_output(name);
        }
    }
    manifest.write(&ctx.out_dir)?;

    for check in &report.checks {
        match check.residual {
            Some(r) => println!(
                "  {}: {} (residual {:.16e})",
                check.name,
                if check.pass { "pass" } else { "FAIL" },
                r
            ),
            None => println!(
                "  {}: {}",
                check.name,
                if check.pass { "pass" } else { "FAIL" }
            ),
        }
    }
    println!("verify: {}", if report.pass { "pass" } else { "FAIL" });
    Ok(if report.pass { 0 } else { 1 })
}

/// Write every operator on this complex as `operators/<name>.txt`: one
/// JSON descriptor line, then sorted `row col value` triplets.
fn dump_operators(ctx: &Context, c: &ComplexSkeleton) -> Result<Vec<String>> {
    let n = c.dim();
    let dir = ctx.path("operators");
    std::fs::create_dir_all(&dir)?;
    let mut named: Vec<(String, decph::LinearMap)> = Vec::new();
    for j in 0..n {
        named.push((format!("d{}", j), ops::exterior_derivative(c, j)?));
        named.push((format!("tr{}", j), ops::trace_map(c, j, TraceKind::Primal)?));
        let m = n - j - 1;
        named.push((
            format!("d_dual{}", m),
            ops::dual_exterior_derivative(c, m, j + 1)?,
        ));
        named.push((
            format!("d_boundary{}", m),
            ops::boundary_dual_derivative(c, m)?,
        ));
    }
    for j in 0..=n {
        named.push((format!("star{}", j), ops::hodge_star(c, j)?));
        named.push((
            format!("star_dual{}", n - j),
            ops::hodge_star_dual(c, j)?,
        ));
    }
    let mut written = Vec::new();
    for (name, map) in named {
        let header = serde_json::json!({
            "operator": name,
            "domain": map.domain,
            "codomain": map.codomain,
            "rows": map.matrix.nrows(),
            "cols": map.matrix.ncols(),
            "nnz": map.matrix.nnz(),
        });
        let mut text = serde_json::to_string(&header)?;
        text.push('\n');
        text.push_str(&sparse::to_coo_text(&map.matrix));
        decph::write_atomic(&dir.join(format!("{}.txt", name)), text.as_bytes())?;
        written.push(format!("operators/{}.txt", name));
    }
    Ok(written)
}
