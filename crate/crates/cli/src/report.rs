//! Result-file formats: CSV tables and JSON archives, with readers so
//! every file the tool writes can be parsed back.
//!
//! Numbers are written with Rust's shortest round-trip float formatting;
//! apart from wall-clock time columns (and `timing.csv`), every file is a
//! pure function of the flags and seed.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use rlip_core::model::ObjectiveVector;
use rlip_core::ArchiveEntry;

#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct SolveArtifact {
    pub algorithm: String,
    pub seed: u64,
    pub facility_count: Option<usize>,
    pub entries: Vec<ArchiveEntry>,
}

pub fn write_archive_json(path: &Path, artifact: &SolveArtifact) -> std::io::Result<()> {
    fs::write(path, serde_json::to_string_pretty(artifact).expect("archive serializes"))
}

pub fn read_archive_json(path: &Path) -> std::io::Result<SolveArtifact> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
}

fn fmt_opt_usize(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn fmt_opt_f64(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn parse_opt<T: std::str::FromStr>(s: &str) -> Option<T> {
    if s.is_empty() { None } else { s.parse().ok() }
}

/// One per-archive-point row of `run.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub algorithm: String,
    pub seed: u64,
    pub facility_count: Option<usize>,
    pub archive_size: usize,
    pub objectives: ObjectiveVector,
    pub spacing: Option<f64>,
    pub diversity: f64,
}

pub const RUN_HEADER: &str =
    "algorithm,seed,facility_count,archive_size,obj1,obj2,spacing,diversity";

pub fn write_run_csv(path: &Path, rows: &[RunRow]) -> std::io::Result<()> {
    let mut out = String::from(RUN_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.algorithm,
            r.seed,
            fmt_opt_usize(r.facility_count),
            r.archive_size,
            r.objectives.obj1,
            r.objectives.obj2,
            fmt_opt_f64(r.spacing),
            r.diversity,
        ));
    }
    fs::write(path, out)
}

pub fn read_run_csv(path: &Path) -> std::io::Result<Vec<RunRow>> {
    let text = fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 8 {
            return Err(std::io::Error::new(
                std::io::ErrorKind::InvalidData,
                format!("run.csv line {}: expected 8 fields", idx + 1),
            ));
        }
        rows.push(RunRow {
            algorithm: f[0].to_string(),
            seed: f[1].parse().map_err(bad_data)?,
            facility_count: parse_opt(f[2]),
            archive_size: f[3].parse().map_err(bad_data)?,
            objectives: ObjectiveVector::new(
                f[4].parse().map_err(bad_data)?,
                f[5].parse().map_err(bad_data)?,
            ),
            spacing: parse_opt(f[6]),
            diversity: f[7].parse().map_err(bad_data)?,
        });
    }
    Ok(rows)
}

fn bad_data<E: std::fmt::Display>(e: E) -> std::io::Error {
    std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string())
}

/// One grid-cell row of the comparison result tables.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultsRow {
    pub n: usize,
    pub q_pct: f64,
    pub pareto_count: usize,
    pub solution_time_s: f64,
    pub facility_count: usize,
    pub obj1: f64,
    pub obj2: f64,
    pub diversity: f64,
    pub spacing: Option<f64>,
}

pub const RESULTS_HEADER: &str =
    "n,q_pct,pareto_count,solution_time_s,facility_count,obj1,obj2,diversity,spacing";

pub fn write_results_csv(path: &Path, rows: &[ResultsRow]) -> std::io::Result<()> {
    let mut out = String::from(RESULTS_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{:.6},{},{},{},{},{}\n",
            r.n,
            r.q_pct,
            r.pareto_count,
            r.solution_time_s,
            r.facility_count,
            r.obj1,
            r.obj2,
            r.diversity,
            fmt_opt_f64(r.spacing),
        ));
    }
    fs::write(path, out)
}

pub fn read_results_csv(path: &Path) -> std::io::Result<Vec<ResultsRow>> {
    let text = fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 9 {
            return Err(bad_data(format!("results line {}: expected 9 fields", idx + 1)));
        }
        rows.push(ResultsRow {
            n: f[0].parse().map_err(bad_data)?,
            q_pct: f[1].parse().map_err(bad_data)?,
            pareto_count: f[2].parse().map_err(bad_data)?,
            solution_time_s: f[3].parse().map_err(bad_data)?,
            facility_count: f[4].parse().map_err(bad_data)?,
            obj1: f[5].parse().map_err(bad_data)?,
            obj2: f[6].parse().map_err(bad_data)?,
            diversity: f[7].parse().map_err(bad_data)?,
            spacing: parse_opt(f[8]),
        });
    }
    Ok(rows)
}

/// Win percentages per grid cell. Comparison directions follow the
/// adopted reporting convention: lower diversity wins, higher spacing
/// wins. Ties score for neither side.
#[derive(Debug, Clone, PartialEq)]
pub struct WinsRow {
    pub q: f64,
    pub facility_count: usize,
    pub nsga2_diversity_win_pct: f64,
    pub moss_diversity_win_pct: f64,
    pub nsga2_spacing_win_pct: f64,
    pub moss_spacing_win_pct: f64,
}

pub const WINS_HEADER: &str =
    "q,facility_count,nsga2_diversity_win_pct,moss_diversity_win_pct,nsga2_spacing_win_pct,moss_spacing_win_pct";

pub fn write_wins_csv(path: &Path, rows: &[WinsRow]) -> std::io::Result<()> {
    let mut out = String::from(WINS_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.q,
            r.facility_count,
            r.nsga2_diversity_win_pct,
            r.moss_diversity_win_pct,
            r.nsga2_spacing_win_pct,
            r.moss_spacing_win_pct,
        ));
    }
    fs::write(path, out)
}

/// Tidy long-format rows for the time comparison and the obj1-vs-q plot.
pub const TIMES_HEADER: &str = "facility_count,q,algorithm,solution_time_s";
pub const FIG1_HEADER: &str = "algorithm,facility_count,q,obj1";

pub fn write_times_csv(
    path: &Path,
    rows: &[(usize, f64, &str, f64)],
) -> std::io::Result<()> {
    let mut out = String::from(TIMES_HEADER);
    out.push('\n');
    for (p, q, algo, t) in rows {
        out.push_str(&format!("{p},{q},{algo},{t:.6}\n"));
    }
    fs::write(path, out)
}

pub fn write_fig1_csv(path: &Path, rows: &[(String, usize, f64, f64)]) -> std::io::Result<()> {
    let mut out = String::from(FIG1_HEADER);
    out.push('\n');
    for (algo, p, q, obj1) in rows {
        out.push_str(&format!("{algo},{p},{q},{obj1}\n"));
    }
    fs::write(path, out)
}

/// One exact-front point with its witness solution.
#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct OracleWitness {
    pub objectives: ObjectiveVector,
    pub solution: rlip_core::Solution,
}

pub fn write_witnesses_json(
    path: &Path,
    front: &[(rlip_core::Solution, ObjectiveVector)],
) -> std::io::Result<()> {
    let records: Vec<OracleWitness> = front
        .iter()
        .map(|(solution, objectives)| OracleWitness {
            objectives: *objectives,
            solution: solution.clone(),
        })
        .collect();
    fs::write(path, serde_json::to_string_pretty(&records).expect("witnesses serialize"))
}

pub fn read_witnesses_json(path: &Path) -> std::io::Result<Vec<OracleWitness>> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
}

/// Simple two-column front table used by the oracle outputs.
pub const FRONT_HEADER: &str = "obj1,obj2";

pub fn write_front_csv(path: &Path, front: &[ObjectiveVector]) -> std::io::Result<()> {
    let mut out = String::from(FRONT_HEADER);
    out.push('\n');
    for v in front {
        out.push_str(&format!("{},{}\n", v.obj1, v.obj2));
    }
    fs::write(path, out)
}

pub fn read_front_csv(path: &Path) -> std::io::Result<Vec<ObjectiveVector>> {
    let text = fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 {
            continue;
        }
        let (a, b) = line
            .split_once(',')
            .ok_or_else(|| bad_data(format!("front line {}: expected 2 fields", idx + 1)))?;
        rows.push(ObjectiveVector::new(
            a.parse().map_err(bad_data)?,
            b.parse().map_err(bad_data)?,
        ));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rlip_core::{Genotype, Solution};

    #[test]
    fn run_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.csv");
        let rows = vec![
            RunRow {
                algorithm: "nsga2".into(),
                seed: 42,
                facility_count: Some(3),
                archive_size: 2,
                objectives: ObjectiveVector::new(123.456, 0.1),
                spacing: Some(0.5),
                diversity: 5.0,
            },
            RunRow {
                algorithm: "moss".into(),
                seed: 42,
                facility_count: None,
                archive_size: 2,
                objectives: ObjectiveVector::new(200.0, 0.05),
                spacing: None,
                diversity: 5.0,
            },
        ];
        write_run_csv(&path, &rows).unwrap();
        assert_eq!(read_run_csv(&path).unwrap(), rows);
    }

    #[test]
    fn archive_json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("archive.json");
        let artifact = SolveArtifact {
            algorithm: "nsga2".into(),
            seed: 9,
            facility_count: Some(1),
            entries: vec![ArchiveEntry {
                genotype: Genotype { site_bits: vec![true, false], priority: vec![1, 0] },
                solution: Solution {
                    open: vec![true, false],
                    assignments: vec![vec![0], vec![0]],
                    lost_level: vec![None, None],
                },
                objectives: ObjectiveVector::new(1.0, 2.0),
            }],
        };
        write_archive_json(&path, &artifact).unwrap();
        assert_eq!(read_archive_json(&path).unwrap(), artifact);
    }

    #[test]
    fn front_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("front.csv");
        let front = vec![ObjectiveVector::new(0.125, 7.5), ObjectiveVector::new(2.0, 1.0)];
        write_front_csv(&path, &front).unwrap();
        assert_eq!(read_front_csv(&path).unwrap(), front);
    }

    #[test]
    fn results_csv_round_trips_everything_but_time_precision() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("results.csv");
        let rows = vec![ResultsRow {
            n: 1,
            q_pct: 10.0,
            pareto_count: 4,
            solution_time_s: 0.125,
            facility_count: 5,
            obj1: 61272.42,
            obj2: 11920.77,
            diversity: 274.057,
            spacing: Some(0.6276383),
        }];
        write_results_csv(&path, &rows).unwrap();
        assert_eq!(read_results_csv(&path).unwrap(), rows);
    }
}
