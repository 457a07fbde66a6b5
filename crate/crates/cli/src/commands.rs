use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use pmm_ahp::elicitation::{aggregate_panel, coin_to_matrix, revision_hint, synthesize_hierarchy};
use pmm_ahp::io::{parse, parse_csv_rows, parse_real, rows_to_csv, to_csv, Format};
use pmm_ahp::metric::{
    hilbert_distance, induced_integral_distance, induced_max_distance, IntegralEstimate,
    MaxEstimate,
};
use pmm_ahp::montecarlo::{
    census_csv, consistency_census_with, parse_dimensions, CensusConfig, MonteCarloRi,
    FULL_CENSUS_SAMPLES,
};
use pmm_ahp::priority::{
    consistency_report, deviation_matrix, eigen_weights, llsm_weights, nearest_transitive,
    ConsistencyReport, EigenOptions,
};
use pmm_ahp::rate::{complex_eigenbasis, decompose_rate, DecompositionJson, EigenbasisJson};
use pmm_ahp::{
    CoinVector, ComparisonMatrix, Normalization, Panel, PanelWeights, PortfolioPoint,
    PriorityVector, RandomIndex, RevisionHint, RiTable, SamplingPlan,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::args::*;
use crate::output::*;
use crate::CliError;

pub fn run(cli: Cli) -> Result<(), CliError> {
    let verb = cli.command.name();
    let output = match cli.command {
        Command::Weights {
            input,
            method,
            normalization,
        } => weights(input, method, normalization)?,
        Command::Consistency { input, report } => consistency(&read_matrix(input)?, &report)?,
        Command::Nearest { input } => nearest(input)?,
        Command::Deviation { input } => deviation(input)?,
        Command::Coin { input, report } => coin(input, &report)?,
        Command::Aggregate { input } => aggregate(input)?,
        Command::Synthesize { input } => synthesize(input)?,
        Command::Hilbert { x, y } => hilbert(&x, &y)?,
        Command::Induced {
            a,
            b,
            kind,
            samples,
            no_refine,
            seed,
        } => {
            let plan = SamplingPlan {
                samples,
                seed: seed.seed,
                refine: !no_refine,
            };
            induced(&a, &b, kind, plan)?
        }
        Command::Decompose { input } => decompose(input)?,
        Command::Eigenbasis { input } => eigenbasis(input)?,
        Command::Census {
            n,
            samples,
            threshold,
            full,
            seed,
        } => {
            let samples = if full { FULL_CENSUS_SAMPLES } else { samples };
            census(&n, samples, threshold, seed.seed)?
        }
        Command::Serve {
            addr,
            data_dir,
            ri_samples,
            ri_seed,
        } => {
            return serve(addr, data_dir, ri_samples, ri_seed);
        }
    };
    let text = output.render(verb, cli.format, cli.pretty)?;
    let mut stdout = std::io::stdout().lock();
    stdout
        .write_all(text.as_bytes())
        .and_then(|_| stdout.flush())
        .map_err(|e| CliError::Invalid(format!("cannot write output: {e}")))
}

fn read_text(path: Option<&Path>) -> Result<String, CliError> {
    let mut text = String::new();
    match path {
        None => std::io::stdin().read_to_string(&mut text).map(|_| text),
        Some(p) if p == Path::new("-") => std::io::stdin().read_to_string(&mut text).map(|_| text),
        Some(p) => std::fs::read_to_string(p),
    }
    .map_err(|e| {
        let source = path.map_or("standard input".into(), |p| p.display().to_string());
        CliError::Invalid(format!("cannot read {source}: {e}"))
    })
}

fn read_matrix(path: Option<PathBuf>) -> Result<ComparisonMatrix, CliError> {
    Ok(parse(&read_text(path.as_deref())?)?)
}

fn read_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("invalid JSON input: {e}")))
}

/// Numbers from a JSON array or from every CSV field, in reading order.
fn read_numbers(text: &str) -> Result<Vec<f64>, CliError> {
    match Format::detect(text) {
        Format::Json => read_json(text),
        Format::Csv if text.trim_start().starts_with('[') => read_json(text),
        Format::Csv => Ok(parse_csv_rows(text)?.into_iter().flatten().collect()),
    }
}

fn normalization(arg: NormalizationArg) -> Normalization {
    match arg {
        NormalizationArg::SumOne => Normalization::SumOne,
        NormalizationArg::ProductOne => Normalization::ProductOne,
    }
}

fn weights(
    input: Option<PathBuf>,
    method: Method,
    norm: NormalizationArg,
) -> Result<Output, CliError> {
    let m = read_matrix(input)?;
    let norm = normalization(norm);
    #[derive(Serialize)]
    struct Weights {
        method: &'static str,
        normalization: Normalization,
        weights: Vec<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        lambda_max: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        iterations: Option<usize>,
    }
    let (w, out) = match method {
        Method::Eigen => {
            let r = eigen_weights(&m, EigenOptions::default())?;
            let w = r.weights.renormalized(norm);
            let out = Weights {
                method: "eigen",
                normalization: norm,
                weights: w.as_slice().to_vec(),
                lambda_max: Some(r.lambda_max),
                iterations: Some(r.iterations),
            };
            (w, out)
        }
        Method::Llsm => {
            let w = llsm_weights(&m).renormalized(norm);
            let out = Weights {
                method: "llsm",
                normalization: norm,
                weights: w.as_slice().to_vec(),
                lambda_max: None,
                iterations: None,
            };
            (w, out)
        }
    };
    Ok(Output::new(&out)?
        .csv(weights_csv(w.as_slice()))
        .table(weights_table(w.as_slice(), &w.ranking())))
}

fn ri_source(args: &ReportArgs) -> (Box<dyn RandomIndex>, serde_json::Value) {
    match args.ri {
        RiSource::MonteCarlo => (
            Box::new(MonteCarloRi::new(args.ri_samples, args.seed.seed)),
            json!({"method": "monte_carlo", "samples": args.ri_samples, "seed": args.seed.seed}),
        ),
        RiSource::Saaty => (Box::new(RiTable::saaty()), json!({"method": "saaty_table"})),
    }
}

#[derive(Serialize)]
struct ReportOut {
    #[serde(flatten)]
    report: ConsistencyReport,
    ri_source: serde_json::Value,
}

fn report_out(m: &ComparisonMatrix, args: &ReportArgs) -> Result<ReportOut, CliError> {
    let (ri, source) = ri_source(args);
    Ok(ReportOut {
        report: consistency_report(m, &*ri, args.delta)?,
        ri_source: source,
    })
}

fn consistency(m: &ComparisonMatrix, args: &ReportArgs) -> Result<Output, CliError> {
    let out = Output::new(&report_out(m, args)?)?;
    let (csv, table) = (fields_csv(&out.json), fields_table(&out.json));
    Ok(out.csv(csv).table(table))
}

fn nearest(input: Option<PathBuf>) -> Result<Output, CliError> {
    let t = nearest_transitive(&read_matrix(input)?);
    Ok(Output::new(&t)?
        .csv(to_csv(&t))
        .table(matrix_table(&t.rows())))
}

fn hint_line(hint: &RevisionHint) -> String {
    match hint {
        RevisionHint::Revise { row, col, current_value, suggested_value, residual } => format!(
            "revise ({row}, {col}): {current_value} -> {suggested_value:.6} (log residual {residual:.6})\n"
        ),
        RevisionHint::NothingToRevise => "nothing to revise: the matrix is transitive\n".into(),
    }
}

fn deviation(input: Option<PathBuf>) -> Result<Output, CliError> {
    let m = read_matrix(input)?;
    let dev = deviation_matrix(&m);
    let hint = revision_hint(&m);
    let table = matrix_table(&dev.residuals) + &hint_line(&hint);
    Ok(
        Output::new(&json!({"deviation": dev, "revision_hint": hint}))?
            .csv(rows_to_csv(&dev.residuals))
            .table(table),
    )
}

fn coin(input: Option<PathBuf>, args: &ReportArgs) -> Result<Output, CliError> {
    let prices = CoinVector::new(read_numbers(&read_text(input.as_deref())?)?)?;
    let m = coin_to_matrix(&prices);
    let report = report_out(&m, args)?;
    let out = json!({
        "inputs": prices.n(),
        "pairwise_slots": m.pairwise_slots(),
        "weights": prices.weights(),
        "matrix": m,
        "report": report,
    });
    let table = format!(
        "{} prices determine all {} pairwise judgments\n",
        prices.n(),
        m.pairwise_slots()
    ) + &weights_table(prices.weights().as_slice(), &prices.weights().ranking())
        + &fields_table(&out["report"]);
    Ok(Output::new(&out)?.csv(to_csv(&m)).table(table))
}

fn read_panel(text: &str) -> Result<Panel, CliError> {
    match Format::detect(text) {
        Format::Json => read_json(text),
        Format::Csv => {
            let rows = parse_csv_rows(text)?;
            let importance = PanelWeights::new(rows.iter().map(|r| r[0]).collect())?;
            let vectors = rows
                .into_iter()
                .map(|r| CoinVector::new(r[1..].to_vec()))
                .collect::<Result<_, _>>()?;
            Ok(Panel {
                importance,
                vectors,
            })
        }
    }
}

fn aggregate(input: Option<PathBuf>) -> Result<Output, CliError> {
    let panel = read_panel(&read_text(input.as_deref())?)?;
    let prices = aggregate_panel(&panel.vectors, &panel.importance)?;
    let m = coin_to_matrix(&prices);
    let out = json!({"prices": prices, "weights": prices.weights(), "matrix": m});
    let csv = rows_to_csv(&[prices.prices().to_vec()]);
    Ok(Output::new(&out)?
        .csv(csv)
        .table(matrix_table(&[prices.prices().to_vec()])))
}

/// A SUM_ONE vector given bare or in its `{weights, normalization}` form.
#[derive(Deserialize)]
#[serde(untagged)]
enum WeightsInput {
    Bare(Vec<f64>),
    Full(PriorityVector),
}

impl WeightsInput {
    fn into_vector(self) -> Result<PriorityVector, CliError> {
        Ok(match self {
            WeightsInput::Bare(w) => PriorityVector::new(w, Normalization::SumOne)?,
            WeightsInput::Full(p) => p,
        })
    }
}

#[derive(Deserialize)]
struct Hierarchy {
    criteria: WeightsInput,
    alternatives: Vec<WeightsInput>,
}

fn synthesize(input: Option<PathBuf>) -> Result<Output, CliError> {
    let h: Hierarchy = read_json(&read_text(input.as_deref())?)?;
    let criteria = h.criteria.into_vector()?;
    let alternatives = h
        .alternatives
        .into_iter()
        .map(WeightsInput::into_vector)
        .collect::<Result<Vec<_>, _>>()?;
    let global = synthesize_hierarchy(&criteria, &alternatives)?;
    Ok(Output::new(&global)?
        .csv(weights_csv(global.as_slice()))
        .table(weights_table(global.as_slice(), &global.ranking())))
}

fn parse_vector(text: &str) -> Result<PortfolioPoint, CliError> {
    Ok(PortfolioPoint::new(read_numbers(text)?)?)
}

fn hilbert(x: &str, y: &str) -> Result<Output, CliError> {
    let d = hilbert_distance(&parse_vector(x)?, &parse_vector(y)?)?;
    let out = json!({"distance": d});
    let (csv, table) = (fields_csv(&out), fields_table(&out));
    Ok(Output::new(&out)?.csv(csv).table(table))
}

fn induced(a: &Path, b: &Path, kind: InducedKind, plan: SamplingPlan) -> Result<Output, CliError> {
    let ma = parse_real(&read_text(Some(a))?)?;
    let mb = parse_real(&read_text(Some(b))?)?;
    #[derive(Serialize)]
    struct Induced {
        seed: u64,
        samples: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        max: Option<MaxEstimate>,
        #[serde(skip_serializing_if = "Option::is_none")]
        integral: Option<IntegralEstimate>,
    }
    let max = match kind {
        InducedKind::Max | InducedKind::Both => Some(induced_max_distance(&ma, &mb, &plan)?),
        InducedKind::Integral => None,
    };
    let integral = match kind {
        InducedKind::Integral | InducedKind::Both => {
            Some(induced_integral_distance(&ma, &mb, &plan)?)
        }
        InducedKind::Max => None,
    };
    let out = Output::new(&Induced {
        seed: plan.seed,
        samples: plan.samples,
        max,
        integral,
    })?;
    let table = fields_table(&out.json);
    Ok(out.table(table))
}

fn decompose(input: Option<PathBuf>) -> Result<Output, CliError> {
    let m = parse_real(&read_text(input.as_deref())?)?;
    let parts = DecompositionJson::from(&decompose_rate(&m)?);
    let table = format!(
        "flows\n{}growths\n{}",
        matrix_table(&parts.flows),
        matrix_table(&parts.growths)
    );
    Ok(Output::new(&parts)?.table(table))
}

fn eigenbasis(input: Option<PathBuf>) -> Result<Output, CliError> {
    let m = parse_real(&read_text(input.as_deref())?)?;
    let basis = EigenbasisJson::from(&complex_eigenbasis(&m)?);
    let rows: Vec<Vec<String>> = basis
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, z)| {
            vec![
                i.to_string(),
                format!("{:.9}", z.re),
                format!("{:.9}", z.im),
            ]
        })
        .collect();
    let table = table(&["k", "re", "im"], &rows)
        + &format!(
            "reconstruction error {:e}, condition {:e}\n",
            basis.reconstruction_error, basis.condition
        );
    Ok(Output::new(&basis)?.table(table))
}

fn census(n: &str, samples: usize, threshold: f64, seed: u64) -> Result<Output, CliError> {
    let config = CensusConfig {
        threshold,
        ..CensusConfig::new(parse_dimensions(n)?, samples, seed)
    };
    let results = consistency_census_with(&config, |r| {
        eprintln!(
            "n={}: {} of {} below CR {} (RI {:.4})",
            r.n, r.cr_below_threshold, r.samples, r.threshold, r.ri_estimate
        );
    })?;
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.samples.to_string(),
                format!("{:.4} ± {:.4}", r.ri_estimate, r.ri_std_error),
                r.cr_below_threshold.to_string(),
                format!("{:.6}", r.fraction),
            ]
        })
        .collect();
    let table = format!("seed {seed}, CR threshold {threshold}\n")
        + &table(&["n", "samples", "RI", "CR below", "fraction"], &rows);
    Ok(Output::new(&results)?
        .csv(census_csv(&results))
        .table(table))
}

fn serve(
    addr: std::net::SocketAddr,
    data_dir: PathBuf,
    ri_samples: usize,
    ri_seed: u64,
) -> Result<(), CliError> {
    let config = pmm_ahp_service::ServiceConfig {
        data_dir,
        ri_samples,
        ri_seed,
    };
    let runtime = tokio::runtime::Runtime::new()
        .map_err(|e| CliError::Invalid(format!("cannot start runtime: {e}")))?;
    runtime.block_on(async move {
        let (listener, state) = pmm_ahp_service::bind(addr, &config)
            .await
            .map_err(|e| CliError::Invalid(format!("cannot listen on {addr}: {e}")))?;
        let local = listener
            .local_addr()
            .map_err(|e| CliError::Invalid(e.to_string()))?;
        println!("listening on {local}");
        std::io::stdout().flush().ok();
        let shutdown = async {
            tokio::signal::ctrl_c().await.ok();
        };
        pmm_ahp_service::serve(listener, state, shutdown)
            .await
            .map_err(|e| CliError::Invalid(format!("server failed: {e}")))
    })
}
