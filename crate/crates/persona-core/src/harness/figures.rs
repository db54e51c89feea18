//! Tabular data emission for the report figures. Plotting stays out of
//! scope; these CSVs carry exactly the plotted quantities.

use std::path::{Path, PathBuf};

use crate::sim::Category;

use super::experiment::ExperimentReport;
use super::HarnessError;

/// Writes the per-day category-distribution table and the survival table
/// for one or more experiment reports. Re-emission over the same reports is
/// byte-idempotent. Returns the files written.
pub fn emit_figures(
    reports: &[ExperimentReport],
    out_dir: &Path,
) -> Result<Vec<PathBuf>, HarnessError> {
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();

    let mut distribution = String::from("personality,day,category,percent\n");
    for report in reports {
        for day in &report.days {
            for category in Category::ALL {
                let share = day.category_shares.get(&category).copied().unwrap_or(0.0);
                distribution.push_str(&format!(
                    "{},{},{},{:.2}\n",
                    report.personality, day.day, category, share
                ));
            }
        }
    }
    let path = out_dir.join("category_distribution.csv");
    std::fs::write(&path, distribution)?;
    written.push(path);

    let mut survival = String::from("personality,day,survival_hours,final_battery_percent\n");
    for report in reports {
        for day in &report.days {
            survival.push_str(&format!(
                "{},{},{:.2},{:.2}\n",
                report.personality,
                day.day,
                day.survival_ticks as f64 / 60.0,
                day.final_battery_percent
            ));
        }
    }
    let path = out_dir.join("survival.csv");
    std::fs::write(&path, survival)?;
    written.push(path);

    Ok(written)
}
