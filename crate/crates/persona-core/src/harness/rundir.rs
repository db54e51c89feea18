//! Run-directory layout, the manifest, replay verification and
//! determinism diffing.
//!
//! Layout:
//!
//! ```text
//! <run>/
//!   manifest.json          inputs + created timestamp
//!   episodic.jsonl         the append-only memory log
//!   specs/spec_v<k>.json   reward-spec chain, version 0..=D
//!   goals/goals_v<k>.json  goal-set chain, version 0..=D
//!   reflections/day_<d>.json
//!   trace.json             long-term per-day trace
//!   report.json            the experiment report
//!   figures/*.csv          emitted data files
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::memory::LongTermTrace;
use crate::reflect::{GoalSet, ReflectionOutput};
use crate::reward::RewardSpec;

use super::experiment::ExperimentReport;
use super::HarnessError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub personality: String,
    pub days: u32,
    pub seed: u64,
    pub mode: String,
    pub reflector: String,
    /// Wall-clock creation time; excluded from determinism comparisons.
    pub created_unix: u64,
}

#[derive(Debug, Clone)]
pub struct RunDir {
    root: PathBuf,
}

impl RunDir {
    pub fn create(root: impl Into<PathBuf>, manifest: &Manifest) -> Result<Self, HarnessError> {
        let root = root.into();
        std::fs::create_dir_all(root.join("specs"))?;
        std::fs::create_dir_all(root.join("goals"))?;
        std::fs::create_dir_all(root.join("reflections"))?;
        std::fs::create_dir_all(root.join("figures"))?;
        let run = RunDir { root };
        std::fs::write(
            run.root.join("manifest.json"),
            serde_json::to_string_pretty(manifest)?,
        )?;
        Ok(run)
    }

    pub fn open(root: impl Into<PathBuf>) -> Result<Self, HarnessError> {
        let root = root.into();
        if !root.join("manifest.json").exists() {
            return Err(HarnessError::Config(format!(
                "{} is not a run directory (no manifest.json)",
                root.display()
            )));
        }
        Ok(RunDir { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn episodic_log(&self) -> PathBuf {
        self.root.join("episodic.jsonl")
    }

    pub fn manifest(&self) -> Result<Manifest, HarnessError> {
        Ok(serde_json::from_str(&std::fs::read_to_string(
            self.root.join("manifest.json"),
        )?)?)
    }

    pub fn save_spec(&self, spec: &RewardSpec) -> Result<(), HarnessError> {
        let path = self.root.join("specs").join(format!("spec_v{}.json", spec.version));
        std::fs::write(path, spec.canonical_json())?;
        Ok(())
    }

    pub fn load_spec(&self, version: u32) -> Result<RewardSpec, HarnessError> {
        let path = self.root.join("specs").join(format!("spec_v{version}.json"));
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn save_goals(&self, goals: &GoalSet) -> Result<(), HarnessError> {
        let path = self
            .root
            .join("goals")
            .join(format!("goals_v{}.json", goals.version));
        std::fs::write(path, goals.canonical_json())?;
        Ok(())
    }

    pub fn load_goals(&self, version: u32) -> Result<GoalSet, HarnessError> {
        let path = self.root.join("goals").join(format!("goals_v{version}.json"));
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn save_reflection(&self, day: u32, output: &ReflectionOutput) -> Result<(), HarnessError> {
        let path = self.root.join("reflections").join(format!("day_{day}.json"));
        std::fs::write(path, serde_json::to_string_pretty(output)?)?;
        Ok(())
    }

    pub fn load_reflection(&self, day: u32) -> Result<ReflectionOutput, HarnessError> {
        let path = self.root.join("reflections").join(format!("day_{day}.json"));
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn save_trace(&self, trace: &LongTermTrace) -> Result<(), HarnessError> {
        std::fs::write(
            self.root.join("trace.json"),
            serde_json::to_string_pretty(trace)?,
        )?;
        Ok(())
    }

    pub fn load_trace(&self) -> Result<LongTermTrace, HarnessError> {
        Ok(serde_json::from_str(&std::fs::read_to_string(
            self.root.join("trace.json"),
        )?)?)
    }

    pub fn save_report(&self, report: &ExperimentReport) -> Result<(), HarnessError> {
        std::fs::write(
            self.root.join("report.json"),
            serde_json::to_string_pretty(report)?,
        )?;
        Ok(())
    }

    pub fn load_report(&self) -> Result<ExperimentReport, HarnessError> {
        Ok(serde_json::from_str(&std::fs::read_to_string(
            self.root.join("report.json"),
        )?)?)
    }

    pub fn figures_dir(&self) -> PathBuf {
        self.root.join("figures")
    }

    /// Number of days recorded (reflection files present).
    pub fn recorded_days(&self) -> Result<u32, HarnessError> {
        let mut day = 0;
        while self
            .root
            .join("reflections")
            .join(format!("day_{}.json", day + 1))
            .exists()
        {
            day += 1;
        }
        Ok(day)
    }
}

/// Replays the recorded reflection outputs against the version-0 artifacts
/// and verifies the final spec and goals are reproduced byte-identically,
/// with gapless version chains.
pub fn replay_run_dir(run: &RunDir) -> Result<(RewardSpec, GoalSet), HarnessError> {
    let days = run.recorded_days()?;
    let mut spec = run.load_spec(0)?;
    let mut goals = run.load_goals(0)?;
    for day in 1..=days {
        let reflection = run.load_reflection(day)?;
        if reflection.patch.base_version != spec.version {
            return Err(HarnessError::Invariant(format!(
                "day {day}: patch base {} breaks the version chain at {}",
                reflection.patch.base_version, spec.version
            )));
        }
        spec = spec.apply_patch(&reflection.patch)?;
        if reflection.next_goals.version != goals.version + 1 {
            return Err(HarnessError::Invariant(format!(
                "day {day}: goal version {} breaks the chain at {}",
                reflection.next_goals.version, goals.version
            )));
        }
        if reflection.next_goals.ultimate_goal != goals.ultimate_goal {
            return Err(HarnessError::Invariant(
                "ultimate goal changed during replay".to_string(),
            ));
        }
        goals = reflection.next_goals;
    }
    // Byte-identical reproduction of the recorded final artifacts.
    let recorded_spec = run.load_spec(days)?;
    if spec.canonical_json() != recorded_spec.canonical_json() {
        return Err(HarnessError::Invariant(
            "replayed spec differs from the recorded final spec".to_string(),
        ));
    }
    let recorded_goals = run.load_goals(days)?;
    if goals.canonical_json() != recorded_goals.canonical_json() {
        return Err(HarnessError::Invariant(
            "replayed goals differ from the recorded final goals".to_string(),
        ));
    }
    Ok((spec, goals))
}

/// Compares two run directories file by file. The manifests are compared
/// with `created_unix` erased; every other file must match byte for byte.
/// Returns the list of differing relative paths.
pub fn diff_run_dirs(a: &Path, b: &Path) -> Result<Vec<String>, HarnessError> {
    fn walk(root: &Path, base: &Path, out: &mut Vec<String>) -> std::io::Result<()> {
        for entry in std::fs::read_dir(root)? {
            let entry = entry?;
            let path = entry.path();
            if path.is_dir() {
                walk(&path, base, out)?;
            } else {
                out.push(
                    path.strip_prefix(base)
                        .expect("walked under base")
                        .to_string_lossy()
                        .to_string(),
                );
            }
        }
        Ok(())
    }
    let mut files_a = Vec::new();
    let mut files_b = Vec::new();
    walk(a, a, &mut files_a)?;
    walk(b, b, &mut files_b)?;
    files_a.sort();
    files_b.sort();

    let mut diffs = Vec::new();
    for f in files_a.iter().chain(files_b.iter()) {
        if !files_a.contains(f) || !files_b.contains(f) {
            if !diffs.contains(f) {
                diffs.push(f.clone());
            }
        }
    }
    for f in &files_a {
        if !files_b.contains(f) {
            continue;
        }
        let ca = std::fs::read(a.join(f))?;
        let cb = std::fs::read(b.join(f))?;
        let equal = if f == "manifest.json" {
            let mut ma: serde_json::Value = serde_json::from_slice(&ca)?;
            let mut mb: serde_json::Value = serde_json::from_slice(&cb)?;
            ma.as_object_mut().map(|m| m.remove("created_unix"));
            mb.as_object_mut().map(|m| m.remove("created_unix"));
            ma == mb
        } else {
            ca == cb
        };
        if !equal {
            diffs.push(f.clone());
        }
    }
    Ok(diffs)
}
