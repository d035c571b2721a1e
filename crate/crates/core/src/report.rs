//! Aggregation of run results into per-set, per-model, and cross-model
//! summary statistics, plus the stable text/CSV report renderers.
//!
//! Averages are unweighted across runs, sets, and models unless the
//! `_weighted` variant is used. Two uncertainty figures are computed and
//! labeled side by side — the standard error of the mean over run
//! accuracies and the pooled binomial standard error — because they answer
//! different questions and neither subsumes the other.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::harness::RunResult;
use crate::sample::{parse_set_name, Form, Provenance};

/// A test-set family: provenance crossed with language form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SetFamily {
    pub provenance: Provenance,
    pub form: Form,
}

impl SetFamily {
    pub const ALL: [SetFamily; 4] = [
        SetFamily {
            provenance: Provenance::Seen,
            form: Form::Lean,
        },
        SetFamily {
            provenance: Provenance::Seen,
            form: Form::Translated,
        },
        SetFamily {
            provenance: Provenance::Unseen,
            form: Form::Lean,
        },
        SetFamily {
            provenance: Provenance::Unseen,
            form: Form::Translated,
        },
    ];

    pub fn label(&self) -> String {
        format!("{} {}", self.provenance.as_str(), self.form.as_str())
    }
}

/// Per-family aggregate over a group of runs of equal size.
#[derive(Debug, Clone, PartialEq)]
pub struct SetSummary {
    pub family: SetFamily,
    pub total: usize,
    pub run_accuracies: Vec<f64>,
    pub run_correct: Vec<f64>,
    pub mean_accuracy: f64,
    pub mean_correct: f64,
    pub mean_incorrect: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReportError {
    #[error("no runs to aggregate")]
    Empty,
    #[error("runs mix test-set families or sizes")]
    MixedFamilies,
    #[error("summaries do not cover each set family exactly once")]
    MissingCell,
    #[error("standard error of the mean needs at least two runs")]
    TooFewRuns,
    #[error("test-set name {name:?} does not follow provenance-form-replica")]
    BadSetName { name: String },
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Aggregate runs of one family into a [`SetSummary`]. The family is read
/// from each run's `test_set_name` (`{provenance}-{form}-{replica}`); mixed
/// families or sizes are rejected.
pub fn aggregate_runs(results: &[RunResult]) -> Result<SetSummary, ReportError> {
    let first = results.first().ok_or(ReportError::Empty)?;
    let (provenance, form, _) =
        parse_set_name(&first.test_set_name).ok_or_else(|| ReportError::BadSetName {
            name: first.test_set_name.clone(),
        })?;
    let family = SetFamily { provenance, form };
    let total = first.total;
    let mut run_accuracies = Vec::with_capacity(results.len());
    let mut run_correct = Vec::with_capacity(results.len());
    for r in results {
        let (p, f, _) = parse_set_name(&r.test_set_name).ok_or_else(|| ReportError::BadSetName {
            name: r.test_set_name.clone(),
        })?;
        if (p, f) != (provenance, form) || r.total != total {
            return Err(ReportError::MixedFamilies);
        }
        run_accuracies.push(r.accuracy().map_err(|_| ReportError::Empty)?);
        run_correct.push(r.correct as f64);
    }
    let mean_accuracy = mean(&run_accuracies);
    let mean_correct = mean(&run_correct);
    Ok(SetSummary {
        family,
        total,
        run_accuracies,
        run_correct,
        mean_accuracy,
        mean_correct,
        mean_incorrect: total as f64 - mean_correct,
    })
}

/// Unweighted mean over the four family cells; each must appear once.
pub fn cross_set_average(summaries: &[SetSummary]) -> Result<f64, ReportError> {
    if summaries.len() != 4 {
        return Err(ReportError::MissingCell);
    }
    for family in SetFamily::ALL {
        if summaries.iter().filter(|s| s.family == family).count() != 1 {
            return Err(ReportError::MissingCell);
        }
    }
    Ok(mean(
        &summaries
            .iter()
            .map(|s| s.mean_accuracy)
            .collect::<Vec<f64>>(),
    ))
}

/// Query-count-weighted variant of [`cross_set_average`].
pub fn cross_set_average_weighted(summaries: &[SetSummary]) -> Result<f64, ReportError> {
    if summaries.len() != 4 {
        return Err(ReportError::MissingCell);
    }
    let weight: f64 = summaries.iter().map(|s| s.total as f64).sum();
    Ok(summaries
        .iter()
        .map(|s| s.mean_accuracy * s.total as f64)
        .sum::<f64>()
        / weight)
}

/// Unweighted mean of one family cell across models. All summaries must be
/// the same family.
pub fn cross_model_average(summaries: &[&SetSummary]) -> Result<f64, ReportError> {
    let first = summaries.first().ok_or(ReportError::Empty)?;
    if summaries.iter().any(|s| s.family != first.family) {
        return Err(ReportError::MixedFamilies);
    }
    Ok(mean(
        &summaries
            .iter()
            .map(|s| s.mean_accuracy)
            .collect::<Vec<f64>>(),
    ))
}

/// Both uncertainty figures over a group of runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uncertainty {
    /// Standard error of the mean over run accuracies; needs two runs.
    pub sem: Option<f64>,
    /// Pooled binomial standard error, in percent.
    pub binomial_se: f64,
}

/// Sample-standard-deviation / sqrt(n) over run accuracies.
pub fn sem(run_accuracies: &[f64]) -> Result<f64, ReportError> {
    let n = run_accuracies.len();
    if n < 2 {
        return Err(ReportError::TooFewRuns);
    }
    let m = mean(run_accuracies);
    let var = run_accuracies
        .iter()
        .map(|a| (a - m) * (a - m))
        .sum::<f64>()
        / (n - 1) as f64;
    Ok(libm::sqrt(var) / libm::sqrt(n as f64))
}

/// Pooled binomial standard error: `100·sqrt(p(1−p)/N)` with `p` estimated
/// from the pooled correct counts and `N` the pooled query count.
pub fn binomial_se(run_accuracies: &[f64], totals: &[usize]) -> Result<f64, ReportError> {
    if run_accuracies.is_empty() || run_accuracies.len() != totals.len() {
        return Err(ReportError::Empty);
    }
    let pooled_n: f64 = totals.iter().map(|t| *t as f64).sum();
    let pooled_correct: f64 = run_accuracies
        .iter()
        .zip(totals)
        .map(|(a, t)| a / 100.0 * *t as f64)
        .sum();
    let p = pooled_correct / pooled_n;
    Ok(100.0 * libm::sqrt(p * (1.0 - p) / pooled_n))
}

/// Compute both figures. `sem` is absent with fewer than two runs.
pub fn uncertainty(run_accuracies: &[f64], totals: &[usize]) -> Result<Uncertainty, ReportError> {
    Ok(Uncertainty {
        sem: sem(run_accuracies).ok(),
        binomial_se: binomial_se(run_accuracies, totals)?,
    })
}

/// One model's four set summaries plus derived statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSummary {
    pub model_label: String,
    /// In [`SetFamily::ALL`] order.
    pub sets: Vec<SetSummary>,
    pub cross_set_mean: f64,
    pub uncertainty: Uncertainty,
}

impl ModelSummary {
    /// Arrange the four cells canonically and derive the cross-set mean and
    /// uncertainty over all of the model's runs.
    pub fn from_sets(
        model_label: impl Into<String>,
        mut sets: Vec<SetSummary>,
    ) -> Result<Self, ReportError> {
        let cross_set_mean = cross_set_average(&sets)?;
        sets.sort_by_key(|s| {
            SetFamily::ALL
                .iter()
                .position(|f| *f == s.family)
                .expect("family is one of the four cells")
        });
        let accs: Vec<f64> = sets
            .iter()
            .flat_map(|s| s.run_accuracies.iter().copied())
            .collect();
        let totals: Vec<usize> = sets
            .iter()
            .flat_map(|s| core::iter::repeat_n(s.total, s.run_accuracies.len()))
            .collect();
        let uncertainty = uncertainty(&accs, &totals)?;
        Ok(ModelSummary {
            model_label: model_label.into(),
            sets,
            cross_set_mean,
            uncertainty,
        })
    }

    pub fn cell(&self, family: SetFamily) -> Option<&SetSummary> {
        self.sets.iter().find(|s| s.family == family)
    }
}

/// Mean accuracy of a model's two cells with the given provenance.
pub fn provenance_mean(model: &ModelSummary, provenance: Provenance) -> f64 {
    let cells: Vec<f64> = model
        .sets
        .iter()
        .filter(|s| s.family.provenance == provenance)
        .map(|s| s.mean_accuracy)
        .collect();
    mean(&cells)
}

/// A computed accuracy delta compared against an externally claimed one.
/// `matches` is false when they disagree beyond the tolerance — the
/// discrepancy is reported, never forced into agreement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SizeEffect {
    pub computed: f64,
    pub claimed: f64,
    pub discrepancy: f64,
    pub matches: bool,
}

pub fn compare_size_effect(computed: f64, claimed: f64, tolerance: f64) -> SizeEffect {
    let discrepancy = computed - claimed;
    SizeEffect {
        computed,
        claimed,
        discrepancy,
        matches: libm::fabs(discrepancy) <= tolerance,
    }
}

/// Format with ten significant digits, trailing zeros trimmed, matching
/// the fixture tables' number style (`76.66666667`, `383.3333333`, `96.4`).
pub fn format_sig10(value: f64) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    let magnitude = libm::floor(libm::log10(libm::fabs(value))) as i32;
    let decimals = (9 - magnitude).clamp(0, 17) as usize;
    let formatted = format!("{value:.decimals$}");
    if formatted.contains('.') {
        formatted
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string()
    } else {
        formatted
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Csv,
}

const TEXT_HEADER: &str = "model                 set                            accuracy         correct          incorrect";

fn text_row(model: &str, set: &str, acc: &str, correct: &str, incorrect: &str) -> String {
    let row = format!("{model:<22}{set:<31}{acc:<17}{correct:<17}{incorrect}");
    row.trim_end().to_string()
}

fn set_label(summary: &SetSummary) -> String {
    let tag = if summary.family.provenance == Provenance::Seen
        && summary.family.form == Form::Lean
    {
        " benchmark"
    } else {
        ""
    };
    format!("{} ({}){}", summary.family.label(), summary.total, tag)
}

fn render_text(models: &[ModelSummary]) -> String {
    let mut out = String::new();
    out.push_str(TEXT_HEADER);
    out.push('\n');
    for m in models {
        for s in &m.sets {
            out.push_str(&text_row(
                &m.model_label,
                &set_label(s),
                &format_sig10(s.mean_accuracy),
                &format_sig10(s.mean_correct),
                &format_sig10(s.mean_incorrect),
            ));
            out.push('\n');
            for (i, (acc, correct)) in s.run_accuracies.iter().zip(&s.run_correct).enumerate() {
                out.push_str(&text_row(
                    &m.model_label,
                    &format!("  run {}", i + 1),
                    &format_sig10(*acc),
                    &format_sig10(*correct),
                    &format_sig10(s.total as f64 - correct),
                ));
                out.push('\n');
            }
        }
        out.push_str(&text_row(
            &m.model_label,
            "cross-set mean",
            &format_sig10(m.cross_set_mean),
            "",
            "",
        ));
        out.push('\n');
        let sem_text = match m.uncertainty.sem {
            Some(v) => format!("sem ±{}", format_sig10(v)),
            None => "sem n/a".to_string(),
        };
        out.push_str(&text_row(
            &m.model_label,
            "uncertainty",
            &sem_text,
            &format!("binomial ±{}", format_sig10(m.uncertainty.binomial_se)),
            "",
        ));
        out.push('\n');
    }
    out
}

pub const CSV_HEADER: &str = "model_label,provenance,form,run_index,accuracy,correct,total";

fn render_csv(models: &[ModelSummary]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for m in models {
        for s in &m.sets {
            for (i, (acc, correct)) in s.run_accuracies.iter().zip(&s.run_correct).enumerate() {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    m.model_label,
                    s.family.provenance.as_str(),
                    s.family.form.as_str(),
                    i + 1,
                    format_sig10(*acc),
                    format_sig10(*correct),
                    s.total
                ));
            }
        }
    }
    out
}

/// Render all model summaries as the stable text table or the per-run CSV.
pub fn render_report(models: &[ModelSummary], format: ReportFormat) -> String {
    match format {
        ReportFormat::Text => render_text(models),
        ReportFormat::Csv => render_csv(models),
    }
}

/// Plot-ready matrix: one row per model, one column of mean accuracy per
/// set family.
pub fn figure_matrix_csv(models: &[ModelSummary]) -> String {
    let mut out =
        String::from("model_label,seen_lean,seen_translated,unseen_lean,unseen_translated\n");
    for m in models {
        let cells: Vec<String> = SetFamily::ALL
            .iter()
            .map(|f| {
                m.cell(*f)
                    .map(|s| format_sig10(s.mean_accuracy))
                    .unwrap_or_default()
            })
            .collect();
        out.push_str(&format!("{},{}\n", m.model_label, cells.join(",")));
    }
    out
}
