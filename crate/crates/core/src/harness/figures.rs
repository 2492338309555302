use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::study::StudyResult;
use crate::error::{Error, Result};
use crate::sampling::PerturbationMode;
use crate::testing::Method;

pub const CURVE_HEADER: &str = "corruption,fraction_corrupted,relative_sd,mode,replicates,\
rejection_rate,mean_bic,bic_sd,bic_low,bic_high,bic_negative_fraction";
pub const MATRIX_HEADER: &str = "corruption,relative_sd,mode,row,col,code,reject_rate";
pub const PROFILE_HEADER: &str = "corruption,relative_sd,mode,rank,p,bh_line";

fn mode_str(mode: PerturbationMode) -> &'static str {
    match mode {
        PerturbationMode::Population => "population",
        PerturbationMode::PerIndividual => "per-individual",
    }
}

/// The rejection curve, one row per sweep point, with per-method mean rejection fractions.
pub fn rejection_curve_csv(result: &StudyResult) -> String {
    let mut out = String::from(CURVE_HEADER);
    for m in &result.methods {
        write!(out, ",{}", m.as_str().replace('-', "_")).unwrap();
    }
    out.push('\n');
    for p in &result.points {
        write!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            p.corruption,
            p.fraction_corrupted,
            p.relative_sd,
            mode_str(p.mode),
            p.replicates,
            p.global_rejection_rate,
            p.mean_bic,
            p.bic_sd,
            p.bic_low,
            p.bic_high,
            p.bic_negative_fraction
        )
        .unwrap();
        for m in &p.methods {
            write!(out, ",{}", m.mean_rejection_fraction).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Long-format rejection matrices for one method: the first replicate's code
/// and the across-replicate reject rate of every cell.
pub fn rejection_matrix_csv(result: &StudyResult, method: Method) -> String {
    let mut out = format!("{MATRIX_HEADER}\n");
    for p in &result.points {
        let Some(m) = p.methods.iter().find(|m| m.method == method) else {
            continue;
        };
        for (row, (codes, rates)) in m.example_matrix.iter().zip(&m.reject_rate).enumerate() {
            for (col, (code, rate)) in codes.iter().zip(rates).enumerate() {
                writeln!(
                    out,
                    "{},{},{},{row},{col},{code},{rate}",
                    p.corruption,
                    p.relative_sd,
                    mode_str(p.mode)
                )
                .unwrap();
            }
        }
    }
    out
}

pub fn p_profile_csv(result: &StudyResult, method: Method) -> String {
    let mut out = format!("{PROFILE_HEADER}\n");
    for p in &result.points {
        let Some(m) = p.methods.iter().find(|m| m.method == method) else {
            continue;
        };
        for (i, point) in m.example_profile.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                p.corruption,
                p.relative_sd,
                mode_str(p.mode),
                i + 1,
                point.p,
                point.bh_line
            )
            .unwrap();
        }
    }
    out
}

type PointKey = (usize, f64, PerturbationMode);

/// A code matrix recovered from a long-format matrix CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedMatrix {
    pub corruption: usize,
    pub relative_sd: f64,
    pub mode: PerturbationMode,
    pub codes: Vec<Vec<u8>>,
}

/// Parses a long-format matrix CSV back into one code matrix per sweep point.
pub fn parse_rejection_matrix_csv(text: &str) -> Result<Vec<ParsedMatrix>> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: PathBuf::from("<rejection matrix>"),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let mut cells: Vec<(PointKey, usize, usize, u8)> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| parse_err(line, e.to_string()))?;
        if record.len() != 7 {
            return Err(parse_err(line, format!("expected 7 fields, got {}", record.len())));
        }
        let field = |j: usize| record[j].trim();
        let int = |j: usize| field(j).parse::<usize>().map_err(|e| parse_err(line, e.to_string()));
        let sd: f64 = field(1).parse().map_err(|_| parse_err(line, format!("bad relative_sd {:?}", field(1))))?;
        let mode: PerturbationMode = field(2).parse()?;
        let code: u8 = field(5).parse().map_err(|_| parse_err(line, format!("bad code {:?}", field(5))))?;
        if code > 3 {
            return Err(parse_err(line, format!("decision code {code} out of range")));
        }
        cells.push(((int(0)?, sd, mode), int(3)?, int(4)?, code));
    }
    let mut out: Vec<ParsedMatrix> = Vec::new();
    let mut start = 0;
    while start < cells.len() {
        let key = cells[start].0;
        let end = start + cells[start..].iter().take_while(|c| c.0 == key).count();
        let k = (((end - start) as f64).sqrt()) as usize;
        if k * k != end - start {
            return Err(parse_err(start + 2, "matrix block is not square".into()));
        }
        let mut codes = vec![vec![0u8; k]; k];
        for &(_, row, col, code) in &cells[start..end] {
            if row >= k || col >= k {
                return Err(parse_err(start + 2, format!("cell ({row}, {col}) outside {k} x {k}")));
            }
            codes[row][col] = code;
        }
        out.push(ParsedMatrix {
            corruption: key.0,
            relative_sd: key.1,
            mode: key.2,
            codes,
        });
        start = end;
    }
    Ok(out)
}

/// Writes `rejection_curve.csv` and per-method matrix and profile CSVs.
pub fn emit_figures(result: &StudyResult, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = vec![(dir.join("rejection_curve.csv"), rejection_curve_csv(result))];
    for &m in &result.methods {
        files.push((dir.join(format!("rejection_matrix_{m}.csv")), rejection_matrix_csv(result, m)));
        files.push((dir.join(format!("p_profile_{m}.csv")), p_profile_csv(result, m)));
    }
    let mut written = Vec::with_capacity(files.len());
    for (path, text) in files {
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{run_study, StudyConfig};

    fn result(counts: &str) -> StudyResult {
        let config = StudyConfig::from_json_str(&format!(
            r#"{{"block_size": 5, "n_params": 1, "n_reps": 2, "graphs_per_population": 3,
                 "corruption_counts": {counts}}}"#
        ))
        .unwrap();
        run_study(&config).unwrap()
    }

    #[test]
    fn empty_sweep_writes_headers_only() {
        let dir = tempfile::tempdir().unwrap();
        let files = emit_figures(&result("[]"), dir.path()).unwrap();
        assert_eq!(files.len(), 9);
        for f in files {
            let text = fs::read_to_string(&f).unwrap();
            assert_eq!(text.lines().count(), 1, "{}", f.display());
        }
    }

    #[test]
    fn matrix_round_trip() {
        let r = result("[0, 10]");
        for &m in &r.methods {
            let parsed = parse_rejection_matrix_csv(&rejection_matrix_csv(&r, m)).unwrap();
            assert_eq!(parsed.len(), r.points.len());
            for (pm, point) in parsed.iter().zip(&r.points) {
                let summary = point.methods.iter().find(|s| s.method == m).unwrap();
                assert_eq!(pm.codes, summary.example_matrix);
                assert_eq!((pm.corruption, pm.mode), (point.corruption, point.mode));
            }
        }
    }

    #[test]
    fn profiles_sorted_and_curve_rows() {
        let r = result("[0, 10]");
        let curve = rejection_curve_csv(&r);
        assert_eq!(curve.lines().count(), 1 + r.points.len());
        let text = p_profile_csv(&r, Method::WilksAggregated);
        let mut last: Option<(String, f64)> = None;
        for line in text.lines().skip(1) {
            let f: Vec<&str> = line.split(',').collect();
            let key = f[..3].join(",");
            let p: f64 = f[4].parse().unwrap();
            if let Some((k, q)) = &last {
                if *k == key {
                    assert!(*q <= p);
                }
            }
            last = Some((key, p));
        }
    }

    #[test]
    fn parser_rejects_garbage() {
        let parse = |body: &str| parse_rejection_matrix_csv(&format!("{MATRIX_HEADER}\n{body}"));
        assert!(parse("0,0,population,0,0,1,0\n").is_ok());
        assert!(parse("0,0,population,0,0,9,0\n").is_err());
        assert!(parse("0,0,population,0,0,1,0\n0,0,population,0,1,1,0\n").is_err());
        assert!(parse("0,x,population,0,0,1,0\n").is_err());
        assert!(parse("0,0,sideways,0,0,1,0\n").is_err());
    }

    #[test]
    fn unwritable_directory() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        assert!(emit_figures(&result("[]"), blocker.join("sub")).is_err());
    }
}
