//! Run-result files and report emission.
//!
//! Each evaluated test set becomes one JSON run file carrying the model
//! label, family, run index, a validity flag, and the full scored result.
//! Reporting groups the valid files by model and family, aggregates, and
//! emits the text table, the per-run CSV, and the plot-ready matrix CSV.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use proplang_core::{
    aggregate_runs, compare_size_effect, cross_model_average, cross_set_average_weighted,
    format_sig10, provenance_mean, render_report, uncertainty, Form, ModelSummary, Provenance,
    ReportFormat, RunResult, SetFamily, SizeEffect,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecordFile {
    pub model_label: String,
    pub provenance: Provenance,
    pub form: Form,
    pub run_index: u32,
    /// False when the run aborted; invalid runs are kept for audit but
    /// excluded from aggregation.
    pub valid: bool,
    pub result: RunResult,
}

pub fn run_file_path(dir: &Path, record: &RunRecordFile) -> PathBuf {
    dir.join(format!(
        "run-{}-{}-{}-{}.json",
        record.model_label,
        record.provenance.as_str(),
        record.form.as_str(),
        record.run_index
    ))
}

pub fn write_run_file(dir: &Path, record: &RunRecordFile) -> Result<PathBuf, CliError> {
    let path = run_file_path(dir, record);
    let json = serde_json::to_string_pretty(record)
        .map_err(|e| CliError::data(format!("serializing run file: {e}")))?;
    crate::write_string(&path, &json)?;
    Ok(path)
}

/// Read every `run-*.json` in `dir`, sorted by file name.
pub fn read_run_files(dir: &Path) -> Result<Vec<RunRecordFile>, CliError> {
    let entries =
        std::fs::read_dir(dir).map_err(|e| CliError::io(format!("listing {}", dir.display()), e))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("run-") && n.ends_with(".json"))
        })
        .collect();
    paths.sort();
    let mut records = Vec::new();
    for path in paths {
        let text = crate::read_to_string(&path)?;
        let record: RunRecordFile = serde_json::from_str(&text)
            .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        records.push(record);
    }
    Ok(records)
}

/// Group valid runs into per-model summaries (models sorted by label).
/// Runs within a family are ordered by run index.
pub fn build_model_summaries(records: &[RunRecordFile]) -> Result<Vec<ModelSummary>, CliError> {
    let mut by_model: BTreeMap<&str, BTreeMap<(Provenance, Form), Vec<&RunRecordFile>>> =
        BTreeMap::new();
    for record in records.iter().filter(|r| r.valid) {
        by_model
            .entry(&record.model_label)
            .or_default()
            .entry((record.provenance, record.form))
            .or_default()
            .push(record);
    }
    let mut models = Vec::new();
    for (label, families) in by_model {
        let mut sets = Vec::new();
        for runs in families.into_values() {
            let mut runs = runs;
            runs.sort_by_key(|r| r.run_index);
            let results: Vec<RunResult> = runs.iter().map(|r| r.result.clone()).collect();
            let summary = aggregate_runs(&results)
                .map_err(|e| CliError::data(format!("model {label}: {e}")))?;
            sets.push(summary);
        }
        let summary = ModelSummary::from_sets(label, sets)
            .map_err(|e| CliError::data(format!("model {label}: {e}")))?;
        models.push(summary);
    }
    Ok(models)
}

/// Cross-model means per family over every model present, with both
/// uncertainty figures.
pub fn cross_model_section(models: &[ModelSummary]) -> String {
    let mut out = String::from("cross-model means\n");
    for family in SetFamily::ALL {
        let cells: Vec<&proplang_core::SetSummary> =
            models.iter().filter_map(|m| m.cell(family)).collect();
        if cells.is_empty() {
            continue;
        }
        let mean = cross_model_average(&cells).expect("cells share a family");
        let accs: Vec<f64> = cells
            .iter()
            .flat_map(|s| s.run_accuracies.iter().copied())
            .collect();
        let totals: Vec<usize> = cells
            .iter()
            .flat_map(|s| std::iter::repeat_n(s.total, s.run_accuracies.len()))
            .collect();
        let u = uncertainty(&accs, &totals).expect("non-empty runs");
        let sem_text = u
            .sem
            .map(format_sig10)
            .unwrap_or_else(|| "n/a".to_string());
        out.push_str(&format!(
            "  {:<20} {:<14} sem ±{}  binomial ±{}\n",
            family.label(),
            format_sig10(mean),
            sem_text,
            format_sig10(u.binomial_se)
        ));
    }
    out
}

/// Weighted cross-set means per model, for the `--weighted` flag.
pub fn weighted_section(models: &[ModelSummary]) -> String {
    let mut out = String::from("query-count-weighted cross-set means\n");
    for m in models {
        let weighted = cross_set_average_weighted(&m.sets).expect("four cells");
        out.push_str(&format!(
            "  {:<20} {}\n",
            m.model_label,
            format_sig10(weighted)
        ));
    }
    out
}

/// Accuracy change between two models (e.g. two training sizes) for one
/// provenance, compared against an externally claimed delta.
pub fn size_effect(
    models: &[ModelSummary],
    after_label: &str,
    before_label: &str,
    provenance: Provenance,
    claimed: f64,
    tolerance: f64,
) -> Result<SizeEffect, CliError> {
    let find = |label: &str| {
        models
            .iter()
            .find(|m| m.model_label == label)
            .ok_or_else(|| CliError::data(format!("no runs for model label {label:?}")))
    };
    let after = find(after_label)?;
    let before = find(before_label)?;
    let computed = provenance_mean(after, provenance) - provenance_mean(before, provenance);
    Ok(compare_size_effect(computed, claimed, tolerance))
}

pub fn size_effect_lines(
    models: &[ModelSummary],
    after_label: &str,
    before_label: &str,
    claims: &[(Provenance, f64)],
    tolerance: f64,
) -> Result<String, CliError> {
    let mut out = format!("training-size effect: {before_label} -> {after_label}\n");
    for (provenance, claimed) in claims {
        let effect = size_effect(models, after_label, before_label, *provenance, *claimed, tolerance)?;
        let verdict = if effect.matches {
            "matches claim"
        } else {
            "DISAGREES with claim"
        };
        out.push_str(&format!(
            "  {:<8} computed {:+.4}  claimed {:+.4}  ({verdict}, gap {:+.4})\n",
            provenance.as_str(),
            effect.computed,
            effect.claimed,
            effect.discrepancy
        ));
    }
    Ok(out)
}

/// Simple grouped-bar SVG of mean accuracy per model and family.
pub fn svg_chart(models: &[ModelSummary]) -> String {
    const BAR: f64 = 18.0;
    const GAP: f64 = 8.0;
    const GROUP_GAP: f64 = 28.0;
    const PLOT_H: f64 = 280.0;
    const LEFT: f64 = 50.0;
    const TOP: f64 = 20.0;
    let colors = ["#4e79a7", "#f28e2b", "#59a14f", "#e15759"];

    let group_w = 4.0 * BAR + 3.0 * GAP;
    let width = LEFT + models.len() as f64 * (group_w + GROUP_GAP) + 40.0;
    let height = TOP + PLOT_H + 90.0;
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" font-family=\"sans-serif\" font-size=\"11\">\n"
    );
    for tick in [0, 25, 50, 75, 100] {
        let y = TOP + PLOT_H * (1.0 - tick as f64 / 100.0);
        s.push_str(&format!(
            "<line x1=\"{LEFT}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"#ddd\"/>\n<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{tick}</text>\n",
            width - 20.0,
            LEFT - 6.0,
            y + 4.0
        ));
    }
    for (mi, m) in models.iter().enumerate() {
        let x0 = LEFT + mi as f64 * (group_w + GROUP_GAP) + GROUP_GAP / 2.0;
        for (fi, family) in SetFamily::ALL.iter().enumerate() {
            if let Some(cell) = m.cell(*family) {
                let h = PLOT_H * cell.mean_accuracy / 100.0;
                let x = x0 + fi as f64 * (BAR + GAP);
                let y = TOP + PLOT_H - h;
                s.push_str(&format!(
                    "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{BAR}\" height=\"{h:.1}\" fill=\"{}\"><title>{} {}: {}</title></rect>\n",
                    colors[fi],
                    m.model_label,
                    family.label(),
                    format_sig10(cell.mean_accuracy)
                ));
            }
        }
        s.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>\n",
            x0 + group_w / 2.0,
            TOP + PLOT_H + 16.0,
            m.model_label
        ));
    }
    for (fi, family) in SetFamily::ALL.iter().enumerate() {
        let y = TOP + PLOT_H + 36.0 + fi as f64 * 16.0;
        s.push_str(&format!(
            "<rect x=\"{LEFT}\" y=\"{:.1}\" width=\"12\" height=\"12\" fill=\"{}\"/>\n<text x=\"{:.1}\" y=\"{:.1}\">{}</text>\n",
            y - 10.0,
            colors[fi],
            LEFT + 18.0,
            y,
            family.label()
        ));
    }
    s.push_str("</svg>\n");
    s
}

/// Write report.txt, runs.csv, and figure1.csv into `out_dir`.
pub fn emit_report_files(models: &[ModelSummary], out_dir: &Path) -> Result<(), CliError> {
    let mut text = render_report(models, ReportFormat::Text);
    text.push('\n');
    text.push_str(&cross_model_section(models));
    crate::write_string(&out_dir.join("report.txt"), &text)?;
    crate::write_string(
        &out_dir.join("runs.csv"),
        &render_report(models, ReportFormat::Csv),
    )?;
    crate::write_string(
        &out_dir.join("figure1.csv"),
        &proplang_core::figure_matrix_csv(models),
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proplang_core::RunResult;

    fn record(label: &str, prov: Provenance, form: Form, run: u32, total: usize, correct: usize) -> RunRecordFile {
        let name = proplang_core::set_name(prov, form, run);
        RunRecordFile {
            model_label: label.into(),
            provenance: prov,
            form,
            run_index: run,
            valid: true,
            result: RunResult::from_counts(name, total, correct),
        }
    }

    fn full_grid(label: &str) -> Vec<RunRecordFile> {
        let mut out = Vec::new();
        for (prov, form, total, corrects) in [
            (Provenance::Seen, Form::Lean, 500, [381, 372, 397]),
            (Provenance::Seen, Form::Translated, 500, [482, 485, 479]),
            (Provenance::Unseen, Form::Lean, 200, [200, 200, 200]),
            (Provenance::Unseen, Form::Translated, 200, [196, 196, 194]),
        ] {
            for (i, c) in corrects.iter().enumerate() {
                out.push(record(label, prov, form, i as u32 + 1, total, *c));
            }
        }
        out
    }

    #[test]
    fn run_files_round_trip_and_aggregate() {
        let dir = tempfile::tempdir().unwrap();
        for r in full_grid("key1-25214") {
            write_run_file(dir.path(), &r).unwrap();
        }
        let records = read_run_files(dir.path()).unwrap();
        assert_eq!(records.len(), 12);
        let models = build_model_summaries(&records).unwrap();
        assert_eq!(models.len(), 1);
        assert!((models[0].cross_set_mean - 92.68333333333334).abs() < 1e-9);
    }

    #[test]
    fn invalid_runs_are_excluded_from_aggregation() {
        let mut records = full_grid("m");
        records[0].valid = false;
        // family now has two valid runs; aggregation still works
        let models = build_model_summaries(&records).unwrap();
        assert_eq!(models[0].sets[0].run_accuracies.len(), 2);
    }

    #[test]
    fn size_effect_flags_disagreement() {
        let mut records = full_grid("after");
        for mut r in full_grid("before") {
            // shift the before model down by replacing seen-translated counts
            if r.provenance == Provenance::Seen && r.form == Form::Translated {
                r.result = RunResult::from_counts(r.result.test_set_name.clone(), 500, 400);
            }
            records.push(r);
        }
        let models = build_model_summaries(&records).unwrap();
        let effect = size_effect(&models, "after", "before", Provenance::Seen, 2.7, 0.05).unwrap();
        assert!(effect.computed > 0.0);
        assert!(!effect.matches);

        let text =
            size_effect_lines(&models, "after", "before", &[(Provenance::Seen, 2.7)], 0.05)
                .unwrap();
        assert!(text.contains("DISAGREES"));
    }

    #[test]
    fn chart_and_sections_render() {
        let models = build_model_summaries(&full_grid("m")).unwrap();
        let svg = svg_chart(&models);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("seen lean"));
        assert!(cross_model_section(&models).contains("binomial"));
        assert!(weighted_section(&models).contains("m"));
    }
}
