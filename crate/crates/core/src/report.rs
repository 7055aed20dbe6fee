//! CSV ingestion, the per-company analysis pipeline over all three
//! families, and emission of the report tables and plot-data files.
//!
//! Input CSV: UTF-8 with header `company,period,premium`, period as
//! YYYY-MM, premium a positive decimal. Output tables mirror the
//! per-family report layout: an h column (0.000/1.000 reject flag) next
//! to each p-value, numbers to three decimals.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::{
    density_compare_series, excess_cdf_series, exp_qq_series, hill_plot_series, histogram_series,
    mean_excess_series, residual_qq_series, tail_series, zipf_series, BinCount, PlotSeries,
};
use crate::distributions::DistributionModel;
use crate::error::{Error, Result};
use crate::estimation::{fit_gev, fit_gpd, fit_lognormal, FitMethod, FitResult, ThresholdChoice};
use crate::extremes::{block_maxima, exceedances, hill_series, BlockSpec, Sample};
use crate::gof::{ad_test, chi_square_test, ks_test, BinSpec, GofResult, PValueMethod};
use crate::numerics::SeededRng;

/// Parsed input: one positive series per company.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub companies: BTreeMap<String, Sample>,
    pub source_path: PathBuf,
    pub warnings: Vec<String>,
}

/// One family's fitted parameters and test results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyRow {
    pub fit: FitResult,
    pub ks: Option<GofResult>,
    pub chi_square: Option<GofResult>,
    pub ad: Option<GofResult>,
}

/// Full per-company analysis: three family rows plus warnings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompanyReport {
    pub company: String,
    pub lognormal: Option<FamilyRow>,
    pub gev: Option<FamilyRow>,
    pub gpd: Option<FamilyRow>,
    pub warnings: Vec<String>,
}

/// Which pipeline the GEV row uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GevPipeline {
    /// Fit the full series directly (the default alongside the POT GPD row).
    Pot,
    /// Fit per-block maxima.
    BlockMaxima,
}

/// Analysis configuration; the defaults mirror the reporting conventions
/// (alpha 0.05, 10 blocks, POT method, bootstrap p-values).
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub alpha: f64,
    pub bootstrap_reps: usize,
    pub seed: u64,
    pub threshold: ThresholdChoice,
    pub block_count: usize,
    pub method: GevPipeline,
    pub out_dir: PathBuf,
    pub emit_plots: bool,
    pub p_method: PValueMethod,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            alpha: 0.05,
            bootstrap_reps: 1000,
            seed: 42,
            threshold: ThresholdChoice::Auto,
            block_count: 10,
            method: GevPipeline::Pot,
            out_dir: PathBuf::from("out"),
            emit_plots: false,
            p_method: PValueMethod::Bootstrap,
        }
    }
}

/// Table file format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

fn parse_period(s: &str) -> Option<(i32, u32)> {
    let (y, m) = s.split_once('-')?;
    if y.len() != 4 || m.len() != 2 {
        return None;
    }
    let year: i32 = y.parse().ok()?;
    let month: u32 = m.parse().ok()?;
    if !(1..=12).contains(&month) {
        return None;
    }
    Some((year, month))
}

fn next_month((y, m): (i32, u32)) -> (i32, u32) {
    if m == 12 {
        (y + 1, 1)
    } else {
        (y, m + 1)
    }
}

/// Load a `company,period,premium` CSV into per-company samples sorted by
/// period. Duplicate (company, period) pairs are an error; gaps in the
/// month sequence are recorded as warnings.
pub fn load_csv(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => Error::io(path, std::io::Error::other(e.to_string())),
            _ => Error::data(e.to_string()),
        })?;

    let headers = reader
        .headers()
        .map_err(|e| Error::data(format!("{}: {e}", path.display())))?;
    let expected = ["company", "period", "premium"];
    if headers.iter().map(str::trim).collect::<Vec<_>>() != expected {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: format!(
                "malformed header: expected `company,period,premium`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    type PeriodRow = ((i32, u32), String, f64);
    let mut rows: BTreeMap<String, Vec<PeriodRow>> = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::data(format!("{}: {e}", path.display())))?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        };
        if record.len() != 3 {
            return Err(parse_err(format!(
                "expected 3 fields, got {}",
                record.len()
            )));
        }
        let company = record[0].trim().to_string();
        if company.is_empty() {
            return Err(parse_err("empty company name".to_string()));
        }
        let period_raw = record[1].trim().to_string();
        let period = parse_period(&period_raw)
            .ok_or_else(|| parse_err(format!("period `{period_raw}` is not YYYY-MM")))?;
        let premium: f64 = record[2]
            .trim()
            .parse()
            .map_err(|_| parse_err(format!("premium `{}` is not a number", &record[2])))?;
        if !premium.is_finite() || premium <= 0.0 {
            return Err(parse_err(format!(
                "premium must be positive, got {premium}"
            )));
        }
        let entry = rows.entry(company.clone()).or_default();
        if entry.iter().any(|(p, _, _)| *p == period) {
            return Err(parse_err(format!(
                "duplicate period {period_raw} for company {company}"
            )));
        }
        entry.push((period, period_raw, premium));
    }

    let mut warnings = Vec::new();
    let mut companies = BTreeMap::new();
    for (company, mut entries) in rows {
        entries.sort_by_key(|(p, _, _)| *p);
        for pair in entries.windows(2) {
            if pair[1].0 != next_month(pair[0].0) {
                warnings.push(format!(
                    "{company}: missing months between {} and {}",
                    pair[0].1, pair[1].1
                ));
            }
        }
        let values: Vec<f64> = entries.iter().map(|(_, _, v)| *v).collect();
        let sample = Sample::new(values, company.clone())?
            .with_periods(entries[0].1.clone(), entries[entries.len() - 1].1.clone());
        companies.insert(company, sample);
    }
    if companies.is_empty() {
        return Err(Error::data(format!("{}: no data rows", path.display())));
    }
    Ok(Dataset {
        companies,
        source_path: path.to_path_buf(),
        warnings,
    })
}

struct TestStreams {
    ks: SeededRng,
    chi: SeededRng,
    ad: SeededRng,
}

fn family_tests(
    values: &[f64],
    model: &DistributionModel,
    config: &RunConfig,
    streams: &TestStreams,
    family: &str,
    warnings: &mut Vec<String>,
) -> (Option<GofResult>, Option<GofResult>, Option<GofResult>) {
    let mut run = |label: &str, r: Result<GofResult>| match r {
        Ok(res) => {
            if res.refit_retries > 0 {
                warnings.push(format!(
                    "{family}: {label} bootstrap redrew {} replicate(s)",
                    res.refit_retries
                ));
            }
            Some(res)
        }
        Err(e) => {
            warnings.push(format!("{family}: {label} test skipped: {e}"));
            None
        }
    };
    let ks = run(
        "KS",
        ks_test(
            values,
            model,
            config.alpha,
            config.p_method,
            config.bootstrap_reps,
            &streams.ks,
        ),
    );
    let chi = run(
        "chi-square",
        chi_square_test(
            values,
            model,
            config.alpha,
            BinSpec::Auto,
            model.param_count(),
            config.p_method,
            config.bootstrap_reps,
            &streams.chi,
        ),
    );
    let ad = run(
        "AD",
        ad_test(
            values,
            model,
            config.alpha,
            config.bootstrap_reps,
            &streams.ad,
        ),
    );
    (ks, chi, ad)
}

fn streams_for(rng: &SeededRng, family_index: u64) -> TestStreams {
    let family = rng.derive(family_index);
    TestStreams {
        ks: family.derive(0),
        chi: family.derive(1),
        ad: family.derive(2),
    }
}

/// Analyze one company: fit the three families and run the three tests
/// against each fit. Individual failures become warnings; remaining
/// families still report. All randomness comes from streams derived off
/// `rng`, so identical inputs give identical reports.
pub fn analyze_company(
    sample: &Sample,
    config: &RunConfig,
    rng: &SeededRng,
) -> Result<CompanyReport> {
    let n = sample.len();
    if n < 30 {
        return Err(Error::data(format!(
            "{}: need at least 30 observations, got {n}",
            sample.label()
        )));
    }
    let mut warnings = Vec::new();
    if n < 60 {
        warnings.push(format!(
            "{}: only {n} observations; test power is limited",
            sample.label()
        ));
    }

    let lognormal = match fit_lognormal(sample.values()) {
        Ok(fit) => {
            let (ks, chi_square, ad) = family_tests(
                sample.values(),
                &fit.model,
                config,
                &streams_for(rng, 0),
                "lognormal",
                &mut warnings,
            );
            Some(FamilyRow {
                fit,
                ks,
                chi_square,
                ad,
            })
        }
        Err(e) => {
            warnings.push(format!("lognormal: fit failed: {e}"));
            None
        }
    };

    // The GEV row fits the full series in POT mode; block-maxima mode is
    // the classical pipeline and tests against the per-block maxima.
    let gev = {
        let fit_and_data: Result<(FitResult, Vec<f64>)> = match config.method {
            GevPipeline::Pot => fit_gev(sample.values()).map(|f| (f, sample.values().to_vec())),
            GevPipeline::BlockMaxima => {
                block_maxima(sample, &BlockSpec::contiguous(config.block_count)).and_then(
                    |maxima| {
                        let mut fit = fit_gev(maxima.values())?;
                        fit.method = FitMethod::BlockMaxima;
                        fit.n_used = config.block_count;
                        Ok((fit, maxima.values().to_vec()))
                    },
                )
            }
        };
        match fit_and_data {
            Ok((fit, data)) => {
                if !fit.converged {
                    warnings.push("gev: optimizer did not converge".to_string());
                }
                let (ks, chi_square, ad) = family_tests(
                    &data,
                    &fit.model,
                    config,
                    &streams_for(rng, 1),
                    "gev",
                    &mut warnings,
                );
                Some(FamilyRow {
                    fit,
                    ks,
                    chi_square,
                    ad,
                })
            }
            Err(e) => {
                warnings.push(format!("gev: fit failed: {e}"));
                None
            }
        }
    };

    let gpd = {
        let attempt: Result<(FitResult, Vec<f64>)> = (|| {
            let u = match config.threshold {
                ThresholdChoice::Fixed(u) => u,
                ThresholdChoice::Auto => {
                    let series = hill_series(sample)?;
                    let cfg = crate::extremes::StabilityConfig::for_len(series.points.len());
                    crate::extremes::select_threshold(&series, &cfg)?.threshold
                }
            };
            let excess = exceedances(sample, u)?;
            let mut fit = fit_gpd(&excess)?;
            fit.method = FitMethod::Pot;
            fit.n_used = excess.n_exceed;
            Ok((fit, excess.exceedances))
        })();
        match attempt {
            Ok((fit, data)) => {
                if !fit.converged {
                    warnings.push("gpd: profile search hit its domain boundary".to_string());
                }
                let (ks, chi_square, ad) = family_tests(
                    &data,
                    &fit.model,
                    config,
                    &streams_for(rng, 2),
                    "gpd",
                    &mut warnings,
                );
                Some(FamilyRow {
                    fit,
                    ks,
                    chi_square,
                    ad,
                })
            }
            Err(e) => {
                warnings.push(format!("gpd: fit failed: {e}"));
                None
            }
        }
    };

    Ok(CompanyReport {
        company: sample.label().to_string(),
        lognormal,
        gev,
        gpd,
        warnings,
    })
}

/// Analyze every company in the dataset with per-company derived streams.
/// Companies that cannot be analyzed (too short) are skipped with a
/// warning returned alongside the reports.
pub fn analyze_dataset(dataset: &Dataset, config: &RunConfig) -> (Vec<CompanyReport>, Vec<String>) {
    let root = SeededRng::new(config.seed, 0);
    let mut reports = Vec::new();
    let mut skipped = Vec::new();
    for (name, sample) in &dataset.companies {
        let rng = root.derive_label(name);
        match analyze_company(sample, config, &rng) {
            Ok(report) => reports.push(report),
            Err(e) => skipped.push(format!("{name}: skipped: {e}")),
        }
    }
    (reports, skipped)
}

fn fmt3(v: f64) -> String {
    format!("{v:.3}")
}

fn gof_cells(result: &Option<GofResult>) -> [String; 2] {
    match result {
        Some(r) => [
            if r.reject { "1.000" } else { "0.000" }.to_string(),
            fmt3(r.p_value),
        ],
        None => [String::new(), String::new()],
    }
}

fn push_row(out: &mut String, cells: &[String]) {
    let _ = writeln!(out, "{}", cells.join(","));
}

/// Quote a CSV field if it contains separators.
fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

const LOGNORMAL_HEADER: &str = "Company,Scale,Shape,KS,KS P,Chi-Square,Chi-Square P,AD,AD P";
const GEV_HEADER: &str = "Company,Shape,Scale,Location,KS,KS P,Chi-Square,Chi-Square P,AD,AD P";
const GPD_HEADER: &str = "Company,Shape,Scale,KS,KS P,Chi-Square,Chi-Square P,AD,AD P";

fn lognormal_table(reports: &[CompanyReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{LOGNORMAL_HEADER}");
    for r in reports {
        if let Some(row) = &r.lognormal {
            if let DistributionModel::Lognormal(p) = row.fit.model {
                let mut cells = vec![csv_field(&r.company), fmt3(p.mu), fmt3(p.sigma)];
                cells.extend(gof_cells(&row.ks));
                cells.extend(gof_cells(&row.chi_square));
                cells.extend(gof_cells(&row.ad));
                push_row(&mut out, &cells);
            }
        }
    }
    out
}

fn gev_table(reports: &[CompanyReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{GEV_HEADER}");
    for r in reports {
        if let Some(row) = &r.gev {
            if let DistributionModel::Gev(p) = row.fit.model {
                let mut cells = vec![
                    csv_field(&r.company),
                    fmt3(p.shape),
                    fmt3(p.scale),
                    fmt3(p.location),
                ];
                cells.extend(gof_cells(&row.ks));
                cells.extend(gof_cells(&row.chi_square));
                cells.extend(gof_cells(&row.ad));
                push_row(&mut out, &cells);
            }
        }
    }
    out
}

fn gpd_table(reports: &[CompanyReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{GPD_HEADER}");
    for r in reports {
        if let Some(row) = &r.gpd {
            if let DistributionModel::Gpd(p) = row.fit.model {
                let mut cells = vec![csv_field(&r.company), fmt3(p.shape), fmt3(p.scale)];
                cells.extend(gof_cells(&row.ks));
                cells.extend(gof_cells(&row.chi_square));
                cells.extend(gof_cells(&row.ad));
                push_row(&mut out, &cells);
            }
        }
    }
    out
}

#[derive(Serialize)]
struct NamedRow<'a> {
    company: &'a str,
    #[serde(flatten)]
    row: &'a FamilyRow,
}

fn json_table(
    reports: &[CompanyReport],
    pick: impl Fn(&CompanyReport) -> &Option<FamilyRow>,
) -> Result<String> {
    let rows: Vec<NamedRow> = reports
        .iter()
        .filter_map(|r| {
            pick(r).as_ref().map(|row| NamedRow {
                company: &r.company,
                row,
            })
        })
        .collect();
    serde_json::to_string_pretty(&rows).map_err(|e| Error::data(e.to_string()))
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).map_err(|e| Error::io(path, e))
}

/// Write the three per-family tables (and, for JSON, the full reports as
/// `reports.json`). Returns the written paths.
pub fn render_tables(
    reports: &[CompanyReport],
    format: OutputFormat,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    if reports.is_empty() {
        return Err(Error::data("no reports to render"));
    }
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();
    match format {
        OutputFormat::Csv => {
            for (name, content) in [
                ("table_lognormal.csv", lognormal_table(reports)),
                ("table_gev.csv", gev_table(reports)),
                ("table_gpd.csv", gpd_table(reports)),
            ] {
                let path = out_dir.join(name);
                write_file(&path, &content)?;
                written.push(path);
            }
        }
        OutputFormat::Json => {
            let tables = [
                (
                    "table_lognormal.json",
                    json_table(reports, |r| &r.lognormal)?,
                ),
                ("table_gev.json", json_table(reports, |r| &r.gev)?),
                ("table_gpd.json", json_table(reports, |r| &r.gpd)?),
                (
                    "reports.json",
                    serde_json::to_string_pretty(reports)
                        .map_err(|e| Error::data(e.to_string()))?,
                ),
            ];
            for (name, content) in tables {
                let path = out_dir.join(name);
                write_file(&path, &content)?;
                written.push(path);
            }
        }
    }
    Ok(written)
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

/// Write one CSV per series as `<company>_<series-name>.csv`: meta as
/// `# key=value` comment lines, then an `x,y` header and the points.
pub fn emit_plot_files(
    company: &str,
    series: &[PlotSeries],
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();
    for s in series {
        let mut content = String::new();
        for (k, v) in &s.meta {
            let _ = writeln!(content, "# {k}={v}");
        }
        content.push_str("x,y\n");
        for &(x, y) in &s.points {
            let _ = writeln!(content, "{x},{y}");
        }
        let path = out_dir.join(format!("{}_{}.csv", sanitize(company), s.name));
        write_file(&path, &content)?;
        written.push(path);
    }
    Ok(written)
}

/// Build the full diagnostic series set for one company: histogram,
/// exponential QQ, Zipf, mean excess, Hill, and the fit-dependent series
/// for the configured GEV pipeline and the POT GPD. Failures are
/// collected as warnings rather than aborting.
pub fn company_plot_series(sample: &Sample, config: &RunConfig) -> (Vec<PlotSeries>, Vec<String>) {
    let mut series = Vec::new();
    let mut warnings = Vec::new();
    let note = |label: &str, e: Error, warnings: &mut Vec<String>| {
        warnings.push(format!("{}: {label}: {e}", sample.label()));
    };

    match histogram_series(sample.values(), BinCount::Auto) {
        Ok(s) => series.push(s),
        Err(e) => note("hist", e, &mut warnings),
    }
    match exp_qq_series(sample.values()) {
        Ok(s) => series.push(s),
        Err(e) => note("exp_qq", e, &mut warnings),
    }
    match zipf_series(sample.values()) {
        Ok(s) => series.push(s),
        Err(e) => note("zipf", e, &mut warnings),
    }
    match hill_series(sample) {
        Ok(h) => series.push(hill_plot_series(&h)),
        Err(e) => note("hill", e, &mut warnings),
    }

    // GPD side: threshold, exceedances, fit.
    let gpd_fit = (|| -> Result<(FitResult, crate::extremes::ExceedanceSet)> {
        let u = match config.threshold {
            ThresholdChoice::Fixed(u) => u,
            ThresholdChoice::Auto => {
                let h = hill_series(sample)?;
                let cfg = crate::extremes::StabilityConfig::for_len(h.points.len());
                crate::extremes::select_threshold(&h, &cfg)?.threshold
            }
        };
        let excess = exceedances(sample, u)?;
        let mut fit = fit_gpd(&excess)?;
        fit.method = FitMethod::Pot;
        fit.n_used = excess.n_exceed;
        Ok((fit, excess))
    })();

    let gpd_params = match &gpd_fit {
        Ok((fit, _)) => match fit.model {
            DistributionModel::Gpd(p) => Some(p),
            _ => None,
        },
        Err(_) => None,
    };
    match mean_excess_series(sample, gpd_params.as_ref()) {
        Ok(s) => series.push(s),
        Err(e) => note("mean_excess", e, &mut warnings),
    }

    match gpd_fit {
        Ok((fit, excess)) => {
            match residual_qq_series(&fit, &excess.exceedances) {
                Ok(mut s) => {
                    s.name = "residual_qq_gpd".to_string();
                    series.push(s);
                }
                Err(e) => note("residual_qq_gpd", e, &mut warnings),
            }
            match excess_cdf_series(&excess, &fit) {
                Ok((a, b)) => {
                    series.push(a);
                    series.push(b);
                }
                Err(e) => note("excess_cdf", e, &mut warnings),
            }
            match tail_series(sample, &fit) {
                Ok((a, b)) => {
                    series.push(a);
                    series.push(b);
                }
                Err(e) => note("tail", e, &mut warnings),
            }
        }
        Err(e) => note("gpd diagnostics", e, &mut warnings),
    }

    // GEV side, per the configured pipeline.
    let gev_fit: Result<(FitResult, Vec<f64>)> = match config.method {
        GevPipeline::Pot => fit_gev(sample.values()).map(|f| (f, sample.values().to_vec())),
        GevPipeline::BlockMaxima => {
            block_maxima(sample, &BlockSpec::contiguous(config.block_count)).and_then(|m| {
                let mut fit = fit_gev(m.values())?;
                fit.method = FitMethod::BlockMaxima;
                fit.n_used = config.block_count;
                Ok((fit, m.values().to_vec()))
            })
        }
    };
    match gev_fit {
        Ok((fit, data)) => {
            match residual_qq_series(&fit, &data) {
                Ok(mut s) => {
                    s.name = "residual_qq_gev".to_string();
                    series.push(s);
                }
                Err(e) => note("residual_qq_gev", e, &mut warnings),
            }
            match density_compare_series(&data, &fit) {
                Ok((a, b)) => {
                    series.push(a);
                    series.push(b);
                }
                Err(e) => note("density_compare", e, &mut warnings),
            }
        }
        Err(e) => note("gev diagnostics", e, &mut warnings),
    }

    (series, warnings)
}
