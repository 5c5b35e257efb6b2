//! One function per subcommand.

use std::fs;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use moikit_core::frechet::{
    fd_oracle_step, matrix_function_derivative, remainder_schatten_check_with_slack,
    richardson_derivative, taylor_remainder_direct, taylor_remainder_integral,
    taylor_remainder_moi, DerivativeRequest, DerivativeStrategy, DEFAULT_FD_STEP,
};
use moikit_core::moi::{moi_evaluate, MoiOperands, MoiSymbol};
use moikit_core::scalar::{divided_difference_recursive, NodeTuple};
use moikit_core::spectral::validate_decomposition;
use moikit_core::suite::{bounded_hermitian, run_suite, SuiteConfig};
use moikit_core::{
    functional_calculus, hermitian_eigendecompose, CheckRecord, ComplexDenseMatrix, CounterRng,
    Error, ScalarFunction, VerificationReport, WienerAtomic,
};

use crate::config::{Command, RunConfig};
use crate::report::ReportDocument;
use crate::CliError;

pub fn run(config: RunConfig) -> Result<ReportDocument, CliError> {
    let mut doc = match config.command {
        Command::Eval => cmd_eval(config)?,
        Command::Derivative => cmd_derivative(config)?,
        Command::Remainder => cmd_remainder(config)?,
        Command::Verify => cmd_verify(config),
        Command::Bench => cmd_bench(config)?,
    };
    doc.finalize();
    Ok(doc)
}

fn load_function(config: &RunConfig) -> Result<ScalarFunction, CliError> {
    let path = config
        .function
        .as_ref()
        .ok_or_else(|| CliError::Parse(format!("`{}` needs --function", config.command.name())))?;
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    ScalarFunction::from_json_str(&text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn load_matrix(path: &Path) -> Result<ComplexDenseMatrix, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    ComplexDenseMatrix::from_json_str(&text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn load_matrices(
    config: &RunConfig,
    what: &str,
    min: usize,
) -> Result<Vec<ComplexDenseMatrix>, CliError> {
    if config.matrices.len() < min {
        return Err(CliError::Parse(format!(
            "`{}` needs {what} (got {} --matrix)",
            config.command.name(),
            config.matrices.len()
        )));
    }
    config.matrices.iter().map(|p| load_matrix(p)).collect()
}

/// Error relative to `1 + ‖want‖_F`, so vanishing references stay meaningful.
fn relative(got: &ComplexDenseMatrix, want: &ComplexDenseMatrix) -> f64 {
    (got - want).frobenius_norm() / (1.0 + want.frobenius_norm())
}

fn elapsed(start: Instant) -> f64 {
    start.elapsed().as_secs_f64()
}

fn cmd_eval(config: RunConfig) -> Result<ReportDocument, CliError> {
    let f = load_function(&config)?;
    let matrices = load_matrices(&config, "one matrix", 1)?;
    if matrices.len() != 1 {
        return Err(CliError::Parse("`eval` takes exactly one --matrix".into()));
    }
    let start = Instant::now();
    let d = hermitian_eigendecompose(&matrices[0], None)?;
    let value = functional_calculus(&f, &d)?;
    let mut doc = ReportDocument::new(config);
    doc.reports.push(validate_decomposition(&d));
    doc.result = Some(value.to_file());
    doc.timings.insert("eval".into(), elapsed(start));
    Ok(doc)
}

fn cmd_derivative(config: RunConfig) -> Result<ReportDocument, CliError> {
    let f = load_function(&config)?;
    let mut matrices = load_matrices(&config, "A and at least one direction", 2)?;
    let a = matrices.remove(0);
    let k = config.order.unwrap_or(matrices.len());
    if k == 0 {
        return Err(CliError::Parse("--order must be at least 1".into()));
    }
    let directions = if matrices.len() == 1 && k > 1 {
        vec![matrices[0].clone(); k]
    } else if matrices.len() == k {
        matrices
    } else {
        return Err(CliError::Parse(format!(
            "--order {k} needs {k} directions, got {}",
            matrices.len()
        )));
    };
    let tol = config.tolerances();
    let strategy: DerivativeStrategy = config.strategy.into();
    let reference = config.reference.as_deref().map(load_matrix).transpose()?;
    let check = config.check;

    let start = Instant::now();
    let req = DerivativeRequest::new(f, a, directions).with_strategy(strategy);
    let value = matrix_function_derivative(&req)?;
    let mut doc = ReportDocument::new(config);
    doc.timings.insert("derivative".into(), elapsed(start));

    if check {
        let start = Instant::now();
        let oracle = if strategy == DerivativeStrategy::FiniteDifference {
            matrix_function_derivative(&req.clone().with_strategy(DerivativeStrategy::Moi))?
        } else {
            richardson_derivative(
                &req.f,
                &req.a,
                &req.directions,
                fd_oracle_step(DEFAULT_FD_STEP, k),
            )?
        };
        let rec = CheckRecord::compare(
            "derivative_fd",
            "D^k f(A)[B] = sum_pi (I^{A..A} f^[k])[B_pi] vs finite differences",
            value.frobenius_norm(),
            oracle.frobenius_norm(),
            relative(&value, &oracle),
            tol.get("derivative_fd"),
        );
        doc.reports.push(VerificationReport::new(
            "derivative_check",
            "cross-strategy check",
            vec![rec],
        ));
        doc.timings.insert("check".into(), elapsed(start));
    }
    if let Some(want) = reference {
        want.check_same_dim(&value)?;
        let rec = CheckRecord::compare(
            "reference",
            "result matches the supplied reference matrix",
            value.frobenius_norm(),
            want.frobenius_norm(),
            relative(&value, &want),
            tol.get("derivative_fd"),
        );
        doc.reports.push(VerificationReport::new(
            "reference_check",
            "reference matrix",
            vec![rec],
        ));
    }
    doc.result = Some(value.to_file());
    Ok(doc)
}

fn cmd_remainder(config: RunConfig) -> Result<ReportDocument, CliError> {
    let f = load_function(&config)?;
    let matrices = load_matrices(&config, "a and b", 2)?;
    if matrices.len() != 2 {
        return Err(CliError::Parse(
            "`remainder` takes exactly two --matrix (a, b)".into(),
        ));
    }
    let (a, b) = (&matrices[0], &matrices[1]);
    let k = config.order.unwrap_or(1);
    if k == 0 {
        return Err(CliError::Parse("--order must be at least 1".into()));
    }
    let tol = config.tolerances();
    let (p, steps) = (config.schatten_p, config.steps);
    let mut doc = ReportDocument::new(config);

    let start = Instant::now();
    let direct = taylor_remainder_direct(&f, k, a, b)?;
    doc.timings.insert("direct".into(), elapsed(start));
    let start = Instant::now();
    let moi = taylor_remainder_moi(&f, k, a, b)?;
    doc.timings.insert("moi".into(), elapsed(start));
    let start = Instant::now();
    let integral = taylor_remainder_integral(&f, k, a, b, steps)?;
    doc.timings.insert("integral".into(), elapsed(start));

    let scale = 1.0 + direct.frobenius_norm();
    let checks = vec![
        CheckRecord::compare(
            "remainder_moi",
            "R_k(b) = (I^{a+b, a, .., a} f^[k])[b, .., b]",
            moi.frobenius_norm(),
            direct.frobenius_norm(),
            (&moi - &direct).frobenius_norm() / scale,
            tol.get("remainder_moi"),
        ),
        CheckRecord::compare(
            "remainder_integral",
            "R_k(b) = k int_0^1 (1-t)^{k-1} (I^{a+tb..} f^[k])[b..b] dt",
            integral.frobenius_norm(),
            direct.frobenius_norm(),
            (&integral - &direct).frobenius_norm() / scale,
            tol.get("remainder_integral"),
        ),
        CheckRecord::compare(
            "remainder_moi_integral",
            "MOI and integral forms of R_k(b) agree",
            moi.frobenius_norm(),
            integral.frobenius_norm(),
            (&moi - &integral).frobenius_norm() / scale,
            tol.get("remainder_integral"),
        ),
    ];
    doc.reports.push(VerificationReport::new(
        "remainder_strategies",
        "Taylor remainder formula",
        checks,
    ));
    match f.as_wiener() {
        Some(w) => doc.reports.push(remainder_schatten_check_with_slack(
            w,
            k,
            a,
            b,
            p,
            tol.get("schatten_bound"),
        )?),
        None => log::info!("Schatten bound check needs a Wiener function; skipped"),
    }
    doc.result = Some(direct.to_file());
    Ok(doc)
}

fn cmd_verify(config: RunConfig) -> ReportDocument {
    let suite = SuiteConfig {
        seed: config.seed,
        tolerances: config.tolerances(),
        filter: config.filter.clone(),
    };
    let start = Instant::now();
    let run = run_suite(&suite);
    let mut doc = ReportDocument::new(config);
    for (name, t) in run.timings {
        doc.timings.insert(name, t);
    }
    doc.timings.insert("total".into(), elapsed(start));
    doc.suite = Some(run.report);
    doc
}

/// Fixed-size timings of the main kernels; the body lists what was timed.
fn cmd_bench(config: RunConfig) -> Result<ReportDocument, CliError> {
    let mut rng = CounterRng::new(config.seed);
    let n = 6;
    let a = bounded_hermitian(&mut rng, n, 1.0);
    let b: Vec<_> = (0..3)
        .map(|_| bounded_hermitian(&mut rng, n, 1.0))
        .collect();
    let f: ScalarFunction = WienerAtomic::cos(1.0).into();
    let reps = 20;
    let mut doc = ReportDocument::new(config);
    let mut time =
        |name: &str, run: &mut dyn FnMut() -> Result<(), Error>| -> Result<(), CliError> {
            let start = Instant::now();
            for _ in 0..reps {
                run()?;
            }
            doc.timings
                .insert(name.to_string(), elapsed(start) / reps as f64);
            Ok(())
        };
    time("eigendecompose_n6", &mut || {
        hermitian_eigendecompose(&a, None).map(drop)
    })?;
    let d = Arc::new(hermitian_eigendecompose(&a, None)?);
    let ops = MoiOperands::uniform(d, b[..2].to_vec())?;
    let sym = MoiSymbol::divided_difference(&f, 2);
    time("moi_evaluate_k2_n6", &mut || {
        moi_evaluate(&sym, &ops).map(drop)
    })?;
    let req = DerivativeRequest::new(f.clone(), a.clone(), b.clone());
    time("derivative_moi_k3_n6", &mut || {
        matrix_function_derivative(&req).map(drop)
    })?;
    let fd = req
        .clone()
        .with_strategy(DerivativeStrategy::FiniteDifference);
    time("derivative_fd_k3_n6", &mut || {
        matrix_function_derivative(&fd).map(drop)
    })?;
    let nodes = NodeTuple::new((0..9).map(|i| i as f64 * 0.25 - 1.0).collect())?;
    time("divided_difference_k8", &mut || {
        divided_difference_recursive(&f, &nodes, None).map(drop)
    })?;
    doc.reports.push(VerificationReport::new(
        "bench",
        "kernel timings (seconds per call) in `timings`",
        Vec::new(),
    ));
    Ok(doc)
}
