//! Result files.
//!
//! ```text
//! <out>/results.csv
//! <out>/manifest.txt
//! <out>/sr_cdf_<snr>.csv              one P_M value
//! <out>/pm_<p_m>/sr_cdf_<snr>.csv     several P_M values
//! ```
//!
//! Numbers use Rust's shortest round-trip formatting, so identical
//! records give byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use ssm_core::metrics::empirical_cdf;
use ssm_core::{MetricsRecord, SystemConfig};

use crate::config::{render_config, SweepSpec};

pub const RESULTS_HEADER: &str =
    "method,snr_db,p_m,avg_sr,ber,avg_sjnr_db,n_realizations,n_zfc_infeasible";
pub const CDF_HEADER: &str = "method,sr,cdf";

#[derive(Debug, thiserror::Error)]
#[error("cannot write {}: {source}", path.display())]
pub struct OutputError {
    pub path: PathBuf,
    pub source: io::Error,
}

fn write(path: &Path, contents: &str) -> Result<(), OutputError> {
    fs::write(path, contents).map_err(|source| OutputError {
        path: path.to_path_buf(),
        source,
    })
}

fn create_dir(path: &Path) -> Result<(), OutputError> {
    fs::create_dir_all(path).map_err(|source| OutputError {
        path: path.to_path_buf(),
        source,
    })
}

pub fn results_csv(records: &[MetricsRecord]) -> String {
    let mut s = String::from(RESULTS_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.method,
            r.snr_db,
            r.p_m,
            r.avg_sr,
            r.ber,
            r.avg_sjnr_db,
            r.trial_counts.realizations,
            r.trial_counts.zfc_infeasible
        );
    }
    s
}

/// CDF rows of every record at one `(snr, p_m)` point.
pub fn cdf_csv<'a>(records: impl IntoIterator<Item = &'a MetricsRecord>) -> String {
    let mut s = String::from(CDF_HEADER);
    s.push('\n');
    for r in records {
        for (x, f) in empirical_cdf(&r.sr_samples) {
            let _ = writeln!(s, "{},{},{}", r.method, x, f);
        }
    }
    s
}

pub fn manifest(cfg: &SystemConfig, spec: &SweepSpec) -> String {
    format!(
        "# {} {}\n{}",
        env!("CARGO_PKG_NAME"),
        env!("CARGO_PKG_VERSION"),
        render_config(cfg, spec)
    )
}

/// Path of the SR CDF file for `(snr, p_m)` relative to the output root.
pub fn cdf_path(spec: &SweepSpec, snr_db: f64, p_m: f64) -> PathBuf {
    let file = format!("sr_cdf_{snr_db}.csv");
    if spec.p_m_list.len() > 1 {
        PathBuf::from(format!("pm_{p_m}")).join(file)
    } else {
        PathBuf::from(file)
    }
}

/// Writes every result file under `dir`; returns the paths written.
pub fn write_outputs(
    dir: &Path,
    cfg: &SystemConfig,
    spec: &SweepSpec,
    records: &[MetricsRecord],
) -> Result<Vec<PathBuf>, OutputError> {
    create_dir(dir)?;
    let mut written = Vec::new();

    let path = dir.join("results.csv");
    write(&path, &results_csv(records))?;
    written.push(path);

    for &p_m in &spec.p_m_list {
        for &snr in &spec.snr_grid_db {
            let path = dir.join(cdf_path(spec, snr, p_m));
            if let Some(parent) = path.parent() {
                create_dir(parent)?;
            }
            let at_point = records.iter().filter(|r| r.snr_db == snr && r.p_m == p_m);
            write(&path, &cdf_csv(at_point))?;
            written.push(path);
        }
    }

    let path = dir.join("manifest.txt");
    write(&path, &manifest(cfg, spec))?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ssm_core::{Method, TrialCounts};

    fn record(method: Method, snr_db: f64, samples: Vec<f64>) -> MetricsRecord {
        MetricsRecord {
            method,
            snr_db,
            p_m: 1.0,
            avg_sr: 0.5,
            ber: 0.125,
            ber_std_err: 0.0,
            avg_sjnr_db: -3.25,
            sr_samples: samples,
            trial_counts: TrialCounts {
                realizations: 3,
                zfc_infeasible: 1,
                ..Default::default()
            },
        }
    }

    #[test]
    fn empty_records_give_header_only() {
        assert_eq!(results_csv(&[]), format!("{RESULTS_HEADER}\n"));
        assert_eq!(cdf_csv([]), format!("{CDF_HEADER}\n"));
    }

    #[test]
    fn results_row_format() {
        let csv = results_csv(&[record(Method::MaxRpZfc, -5.0, vec![])]);
        assert_eq!(
            csv.lines().nth(1).unwrap(),
            "MaxRPZFC,-5,1,0.5,0.125,-3.25,3,1"
        );
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn cdf_rows_sorted_and_monotone() {
        let csv = cdf_csv([&record(Method::MaxRp, 0.0, vec![0.3, 0.1, 0.2, 0.1])]);
        let rows: Vec<(f64, f64)> = csv
            .lines()
            .skip(1)
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                assert_eq!(f[0], "MaxRP");
                (f[1].parse().unwrap(), f[2].parse().unwrap())
            })
            .collect();
        assert_eq!(rows.len(), 4);
        assert!(rows.windows(2).all(|w| w[0].0 <= w[1].0 && w[0].1 < w[1].1));
        assert_eq!(rows.last().unwrap().1, 1.0);
    }

    #[test]
    fn cdf_layout_depends_on_p_m_count() {
        let mut spec = SweepSpec::default();
        assert_eq!(
            cdf_path(&spec, -2.0, 10.0),
            PathBuf::from("pm_10/sr_cdf_-2.csv")
        );
        spec.p_m_list = vec![10.0];
        assert_eq!(cdf_path(&spec, 2.5, 10.0), PathBuf::from("sr_cdf_2.5.csv"));
    }

    #[test]
    fn unwritable_directory_names_path() {
        let tmp = tempfile::tempdir().unwrap();
        let blocker = tmp.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let target = blocker.join("out");
        let err = write_outputs(
            &target,
            &SystemConfig::default(),
            &SweepSpec::default(),
            &[],
        )
        .unwrap_err();
        assert_eq!(err.path, target);
        assert!(err.to_string().contains(&target.display().to_string()));
    }
}
