use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{one_sample_t, paired_t, summarize, SummaryStats, TTestResult};
use crate::config::{ContextGranularity, ModelParams, Weighting};
use crate::error::{Error, Result};
use crate::experiments::{design_metrics, design_pairs, DesignKind, DesignRun};
use crate::pipeline::Representations;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
    Text,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "text" => Ok(ReportFormat::Text),
            _ => Err(format!("unknown format `{s}`, expected csv, json or text")),
        }
    }
}

/// What a report was computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub seed: u64,
    pub params_hash: String,
    pub dataset: String,
    pub designs: Vec<String>,
    pub participants: Vec<usize>,
    pub visual_clusters: usize,
    pub auditory_clusters: usize,
    pub context_granularity: String,
    pub histogram_weighting: String,
}

impl Manifest {
    pub fn new(
        seed: u64,
        params: &ModelParams,
        repr: &Representations,
        dataset: impl Into<String>,
        runs: &[DesignRun],
    ) -> Self {
        Manifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            params_hash: params.hash(),
            dataset: dataset.into(),
            designs: runs.iter().map(|r| r.design.id.clone()).collect(),
            participants: runs.iter().map(|r| r.participants.len()).collect(),
            visual_clusters: repr.visual_size(),
            auditory_clusters: repr.auditory_size(),
            context_granularity: match params.context_granularity {
                ContextGranularity::Trial => "trial",
                ContextGranularity::Pair => "pair",
            }
            .into(),
            histogram_weighting: match params.histogram_weighting {
                Weighting::Counts => "counts",
                Weighting::Binary => "binary",
            }
            .into(),
        }
    }

    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let join = |v: Vec<String>| v.join(" ");
        vec![
            ("version", self.version.clone()),
            ("seed", self.seed.to_string()),
            ("params_hash", self.params_hash.clone()),
            ("dataset", self.dataset.clone()),
            ("designs", join(self.designs.clone())),
            (
                "participants",
                join(self.participants.iter().map(|n| n.to_string()).collect()),
            ),
            ("visual_clusters", self.visual_clusters.to_string()),
            ("auditory_clusters", self.auditory_clusters.to_string()),
            ("context_granularity", self.context_granularity.clone()),
            ("histogram_weighting", self.histogram_weighting.clone()),
        ]
    }
}

/// One score of one participant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub design: String,
    pub participant: usize,
    pub seed: u64,
    pub metric: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub design: String,
    pub metric: String,
    pub summary: SummaryStats,
    pub chance: Option<f64>,
    /// Test of the mean against `chance`.
    pub test: Option<TTestResult>,
    /// Why `test` is absent although a chance line exists.
    pub note: Option<String>,
}

/// Paired comparison of two metrics over participants with the same index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedRow {
    pub design_a: String,
    pub metric_a: String,
    pub design_b: String,
    pub metric_b: String,
    pub n: usize,
    pub mean_diff: f64,
    pub test: Option<TTestResult>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub manifest: Manifest,
    pub participants: Vec<ScoreRow>,
    pub aggregate: Vec<AggregateRow>,
    pub paired: Vec<PairedRow>,
}

impl Report {
    pub fn aggregate_row(&self, design: &str, metric: &str) -> Option<&AggregateRow> {
        self.aggregate
            .iter()
            .find(|r| r.design == design && r.metric == metric)
    }

    pub fn paired_row(&self, metric_a: &str, metric_b: &str) -> Option<&PairedRow> {
        self.paired
            .iter()
            .find(|r| r.metric_a == metric_a && r.metric_b == metric_b)
    }

    pub fn paired_designs(&self, design_a: &str, design_b: &str) -> Option<&PairedRow> {
        self.paired
            .iter()
            .find(|r| r.design_a == design_a && r.design_b == design_b)
    }
}

fn scores_of(run: &DesignRun, metric: &str) -> BTreeMap<usize, f64> {
    run.participants
        .iter()
        .filter_map(|p| p.scores.get(metric).map(|v| (p.participant, *v)))
        .collect()
}

fn paired_row(a: (&DesignRun, &str), b: (&DesignRun, &str)) -> Option<PairedRow> {
    let sa = scores_of(a.0, a.1);
    let sb = scores_of(b.0, b.1);
    let (xs, ys): (Vec<f64>, Vec<f64>) = sa
        .iter()
        .filter_map(|(i, x)| sb.get(i).map(|y| (*x, *y)))
        .unzip();
    if xs.is_empty() {
        return None;
    }
    let mean_diff = xs.iter().zip(&ys).map(|(x, y)| x - y).sum::<f64>() / xs.len() as f64;
    let (test, note) = match paired_t(&xs, &ys) {
        Ok(t) => (Some(t), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Some(PairedRow {
        design_a: a.0.design.id.clone(),
        metric_a: a.1.to_string(),
        design_b: b.0.design.id.clone(),
        metric_b: b.1.to_string(),
        n: xs.len(),
        mean_diff,
        test,
        note,
    })
}

/// Per-participant scores, per-metric summaries with tests against chance,
/// and paired tests within designs and across the conditions of an
/// uncertainty experiment.
pub fn build_report(runs: &[DesignRun], manifest: Manifest) -> Result<Report> {
    if runs.is_empty() {
        return Err(Error::EmptyInput("design runs"));
    }
    if runs.iter().any(|r| r.participants.is_empty()) {
        return Err(Error::EmptyInput("participants"));
    }
    let mut participants = Vec::new();
    let mut aggregate = Vec::new();
    let mut paired = Vec::new();
    for run in runs {
        for p in &run.participants {
            let extra = [
                ("association_nodes", p.association_nodes as f64),
                ("context_groups", p.context_groups as f64),
            ];
            let rows = p.scores.iter().map(|(k, v)| (k.as_str(), *v)).chain(extra);
            for (metric, value) in rows {
                participants.push(ScoreRow {
                    design: run.design.id.clone(),
                    participant: p.participant,
                    seed: p.seed,
                    metric: metric.to_string(),
                    value,
                });
            }
        }
        for m in design_metrics(&run.design) {
            let values: Vec<f64> = scores_of(run, &m.name).into_values().collect();
            if values.is_empty() {
                continue;
            }
            let summary = summarize(&values)?;
            let (test, note) = match m.chance.map(|c| one_sample_t(&values, c)) {
                Some(Ok(t)) => (Some(t), None),
                Some(Err(e)) => (None, Some(e.to_string())),
                None => (None, None),
            };
            aggregate.push(AggregateRow {
                design: run.design.id.clone(),
                metric: m.name,
                summary,
                chance: m.chance,
                test,
                note,
            });
        }
        for (a, b) in design_pairs(&run.design) {
            paired.extend(paired_row((run, &a), (run, &b)));
        }
    }
    let uncertainty: Vec<&DesignRun> = runs
        .iter()
        .filter(|r| matches!(r.design.kind, DesignKind::Uncertainty { .. }))
        .collect();
    for (i, a) in uncertainty.iter().enumerate() {
        for b in &uncertainty[i + 1..] {
            paired.extend(paired_row((a, "accuracy"), (b, "accuracy")));
        }
    }
    Ok(Report {
        manifest,
        participants,
        aggregate,
        paired,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn test_fields(t: &Option<TTestResult>) -> [String; 6] {
    match t {
        Some(t) => [
            t.t.to_string(),
            t.df.to_string(),
            t.p_two_sided.to_string(),
            t.p_one_sided.to_string(),
            t.significant_1pct.to_string(),
            t.significant_5pct.to_string(),
        ],
        None => Default::default(),
    }
}

const TEST_HEADER: [&str; 6] = [
    "t",
    "df",
    "p_two_sided",
    "p_one_sided",
    "sig_1pct",
    "sig_5pct",
];

fn csv_file(path: &Path, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_err = |e: csv::Error| Error::Malformed(format!("csv: {e}"));
    w.write_record(header).map_err(to_err)?;
    for r in rows {
        w.write_record(&r).map_err(to_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Malformed(format!("csv: {e}")))?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn write_csv(report: &Report, dir: &Path) -> Result<Vec<PathBuf>> {
    let paths: Vec<PathBuf> = [
        "participants.csv",
        "aggregate.csv",
        "paired.csv",
        "manifest.csv",
    ]
    .iter()
    .map(|f| dir.join(f))
    .collect();
    csv_file(
        &paths[0],
        &["design", "participant", "seed", "metric", "value"],
        report
            .participants
            .iter()
            .map(|r| {
                vec![
                    r.design.clone(),
                    r.participant.to_string(),
                    r.seed.to_string(),
                    r.metric.clone(),
                    r.value.to_string(),
                ]
            })
            .collect(),
    )?;
    let mut header = vec!["design", "metric", "n", "mean", "sd", "se", "chance"];
    header.extend(TEST_HEADER);
    header.push("note");
    csv_file(
        &paths[1],
        &header,
        report
            .aggregate
            .iter()
            .map(|r| {
                let mut v = vec![
                    r.design.clone(),
                    r.metric.clone(),
                    r.summary.n.to_string(),
                    r.summary.mean.to_string(),
                    r.summary.sd.to_string(),
                    r.summary.se.to_string(),
                    opt(r.chance),
                ];
                v.extend(test_fields(&r.test));
                v.push(r.note.clone().unwrap_or_default());
                v
            })
            .collect(),
    )?;
    let mut header = vec![
        "design_a",
        "metric_a",
        "design_b",
        "metric_b",
        "n",
        "mean_diff",
    ];
    header.extend(TEST_HEADER);
    header.push("note");
    csv_file(
        &paths[2],
        &header,
        report
            .paired
            .iter()
            .map(|r| {
                let mut v = vec![
                    r.design_a.clone(),
                    r.metric_a.clone(),
                    r.design_b.clone(),
                    r.metric_b.clone(),
                    r.n.to_string(),
                    r.mean_diff.to_string(),
                ];
                v.extend(test_fields(&r.test));
                v.push(r.note.clone().unwrap_or_default());
                v
            })
            .collect(),
    )?;
    csv_file(
        &paths[3],
        &["key", "value"],
        report
            .manifest
            .entries()
            .into_iter()
            .map(|(k, v)| vec![k.to_string(), v])
            .collect(),
    )?;
    Ok(paths)
}

fn p_text(t: &TTestResult) -> String {
    let stars = if t.significant_1pct {
        " **"
    } else if t.significant_5pct {
        " *"
    } else {
        ""
    };
    format!(
        "t({})={:.3} p={:.2e} p1={:.2e}{stars}",
        t.df, t.t, t.p_two_sided, t.p_one_sided
    )
}

/// Human-readable summary.
pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    for (k, v) in report.manifest.entries() {
        writeln!(out, "{k}: {v}").unwrap();
    }
    let mut design = "";
    for r in &report.aggregate {
        if r.design != design {
            design = &r.design;
            writeln!(out, "\n[{design}]").unwrap();
        }
        let s = &r.summary;
        write!(
            out,
            "  {:<16} n={:<3} mean={:.3} sd={:.3} se={:.3}",
            r.metric, s.n, s.mean, s.sd, s.se
        )
        .unwrap();
        if let Some(c) = r.chance {
            write!(out, " chance={c}").unwrap();
        }
        if let Some(t) = &r.test {
            write!(out, " {}", p_text(t)).unwrap();
        }
        if let Some(n) = &r.note {
            write!(out, " ({n})").unwrap();
        }
        out.push('\n');
    }
    if !report.paired.is_empty() {
        writeln!(out, "\n[paired]").unwrap();
    }
    for r in &report.paired {
        let a = format!("{}.{}", r.design_a, r.metric_a);
        let b = format!("{}.{}", r.design_b, r.metric_b);
        write!(out, "  {a} - {b}: n={} diff={:.3}", r.n, r.mean_diff).unwrap();
        if let Some(t) = &r.test {
            write!(out, " {}", p_text(t)).unwrap();
        }
        if let Some(n) = &r.note {
            write!(out, " ({n})").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Writes `report` into `dir` (created if missing) and returns the files
/// written.
pub fn emit_report(report: &Report, dir: &Path, format: ReportFormat) -> Result<Vec<PathBuf>> {
    if report.participants.is_empty() {
        return Err(Error::EmptyInput("participants"));
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    match format {
        ReportFormat::Csv => write_csv(report, dir),
        ReportFormat::Json => {
            let path = dir.join("report.json");
            let mut text = serde_json::to_string_pretty(report)?;
            text.push('\n');
            fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
            Ok(vec![path])
        }
        ReportFormat::Text => {
            let path = dir.join("report.txt");
            fs::write(&path, render_text(report)).map_err(|e| Error::io(&path, e))?;
            Ok(vec![path])
        }
    }
}

pub fn read_report_json(path: &Path) -> Result<Report> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{ExperimentDesign, ParticipantResult};

    fn participant(design: &str, i: usize, scores: &[(&str, f64)]) -> ParticipantResult {
        ParticipantResult {
            design: design.into(),
            participant: i,
            seed: i as u64,
            scores: scores.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            items: Vec::new(),
            created_per_trial: Vec::new(),
            trial_correct: Vec::new(),
            association_nodes: 10 + i,
            context_groups: 2,
        }
    }

    fn manifest() -> Manifest {
        Manifest {
            version: "0".into(),
            seed: 1,
            params_hash: "ab".into(),
            dataset: "synthetic".into(),
            designs: vec![],
            participants: vec![],
            visual_clusters: 35,
            auditory_clusters: 13,
            context_granularity: "trial".into(),
            histogram_weighting: "counts".into(),
        }
    }

    fn exp1_runs() -> Vec<DesignRun> {
        let accs = [
            [0.9, 0.8, 0.85, 0.7],
            [0.7, 0.6, 0.8, 0.65],
            [0.5, 0.55, 0.6, 0.3],
        ];
        ["exp1_2x2", "exp1_3x3", "exp1_4x4"]
            .iter()
            .zip(accs)
            .map(|(id, a)| DesignRun {
                design: ExperimentDesign::builtin(id).unwrap(),
                participants: a
                    .iter()
                    .enumerate()
                    .map(|(i, v)| participant(id, i, &[("accuracy", *v)]))
                    .collect(),
            })
            .collect()
    }

    #[test]
    fn exp1_rows_carry_chance() {
        let r = build_report(&exp1_runs(), manifest()).unwrap();
        for id in ["exp1_2x2", "exp1_3x3", "exp1_4x4"] {
            let row = r.aggregate_row(id, "accuracy").unwrap();
            assert_eq!(row.chance, Some(0.25));
            assert!(row.test.is_some());
        }
        let p = r.paired_designs("exp1_2x2", "exp1_4x4").unwrap();
        assert_eq!(p.n, 4);
        assert!((p.mean_diff - 0.325).abs() < 1e-12);
        assert_eq!(r.paired.len(), 3);
        // 4 participants x (accuracy + two counts) x 3 designs
        assert_eq!(r.participants.len(), 36);
    }

    #[test]
    fn empty_runs_are_rejected() {
        assert!(build_report(&[], manifest()).is_err());
        let mut runs = exp1_runs();
        runs[1].participants.clear();
        assert!(build_report(&runs, manifest()).is_err());
    }

    #[test]
    fn degenerate_cells_keep_a_note() {
        let mut runs = exp1_runs();
        for p in &mut runs[0].participants {
            p.scores.insert("accuracy".into(), 1.0);
        }
        let r = build_report(&runs, manifest()).unwrap();
        let row = r.aggregate_row("exp1_2x2", "accuracy").unwrap();
        assert!(row.test.is_none() && row.note.is_some());
        assert_eq!(row.summary.sd, 0.0);
    }

    #[test]
    fn json_round_trip_and_stable_bytes() {
        let r = build_report(&exp1_runs(), manifest()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a");
        let b = dir.path().join("b");
        for fmt in [ReportFormat::Json, ReportFormat::Csv, ReportFormat::Text] {
            let fa = emit_report(&r, &a, fmt).unwrap();
            let fb = emit_report(&r, &b, fmt).unwrap();
            for (x, y) in fa.iter().zip(&fb) {
                assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap());
            }
        }
        let back = read_report_json(&a.join("report.json")).unwrap();
        assert_eq!(back, r);
        let agg = fs::read_to_string(a.join("aggregate.csv")).unwrap();
        assert!(agg
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("exp1_2x2,accuracy,4,"));
    }

    #[test]
    fn unwritable_directory_fails() {
        let r = build_report(&exp1_runs(), manifest()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("f");
        fs::write(&file, "x").unwrap();
        let err = emit_report(&r, &file.join("sub"), ReportFormat::Json).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn format_names() {
        assert_eq!("csv".parse::<ReportFormat>(), Ok(ReportFormat::Csv));
        assert!("xml".parse::<ReportFormat>().is_err());
    }
}
