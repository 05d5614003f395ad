//! CSV layouts for traces, summaries and time series.

use std::io::Write;

use crate::organization::PeriodOutcome;
use crate::simulation::ScenarioSummary;

/// Per-period trace, one row per period, full float precision.
pub fn write_trace_csv<W: Write>(
    out: W,
    run_id: usize,
    optimum: f64,
    periods: &[PeriodOutcome],
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let managers = periods.first().map_or(0, |p| p.managers.len());
    let mut header: Vec<String> = ["run_id", "t", "V", "V_norm", "altered"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for r in 1..=managers {
        for field in ["aspiration", "s_max", "s", "satisfied", "delta"] {
            header.push(format!("{field}_{r}"));
        }
    }
    w.write_record(&header)?;
    for p in periods {
        let mut row = vec![
            run_id.to_string(),
            p.period.to_string(),
            p.performance.to_string(),
            (p.performance / optimum).to_string(),
            u8::from(p.altered).to_string(),
        ];
        for rec in &p.managers {
            row.push(rec.aspiration.to_string());
            row.push(rec.max_search.to_string());
            row.push(rec.options_evaluated.to_string());
            row.push(u8::from(rec.satisfied()).to_string());
            row.push(rec.realized_delta.to_string());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub const SUMMARY_HEADER: [&str; 8] = [
    "strategy",
    "kEx",
    "runs",
    "perf_change_first_periods",
    "final_performance",
    "final_performance_ci",
    "global_max_found",
    "altered_config_ratio",
];

/// One row per scenario, four decimals.
pub fn write_summary_csv<W: Write>(out: W, summaries: &[ScenarioSummary]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for s in summaries {
        w.write_record([
            s.strategy.to_string(),
            s.k_ex.to_string(),
            s.runs.to_string(),
            format!("{:+.4}", s.early_gain),
            format!("{:.4}", s.final_performance),
            s.final_performance_ci
                .map_or_else(|| "NA".to_string(), |ci| format!("{ci:.4}")),
            format!("{:.4}", s.global_max_frequency),
            format!("{:.4}", s.alteration_ratio),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Long-format mean series: `scenario, t, metric, value`.
pub fn write_series_csv<W: Write>(out: W, summaries: &[ScenarioSummary]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["scenario", "t", "metric", "value"])?;
    for s in summaries {
        let label = s.label();
        let series = [
            ("performance", &s.series.performance),
            ("aspiration", &s.series.aspiration),
            ("search_space", &s.series.search_space),
        ];
        for (metric, values) in series {
            for (t, v) in values.iter().enumerate() {
                w.write_record([label.as_str(), &t.to_string(), metric, &v.to_string()])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
