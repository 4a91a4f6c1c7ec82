//! Text formats: edge lists, ball distributions, timeline dumps,
//! trajectory and estimate CSVs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use serde::Serialize;

use cplab_core::contact_process::{FirstPassage, Timeline, Trajectory};
use cplab_core::local_convergence::{BallDistribution, CanonicalKey};
use cplab_core::Graph;

use crate::stats::Estimate;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn parse_err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse { line, message: message.into() }
}

/// Writes `n m` followed by one `u v` line per edge with `u < v`.
pub fn write_edge_list<W: Write>(g: &Graph, mut w: W) -> io::Result<()> {
    writeln!(w, "{} {}", g.n(), g.m())?;
    for (u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    w.flush()
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize), FormatError> {
    let mut it = line.split(' ');
    let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
        return Err(parse_err(lineno, format!("expected two space-separated integers, got {line:?}")));
    };
    let a = a.parse().map_err(|_| parse_err(lineno, format!("not a non-negative integer: {a:?}")))?;
    let b = b.parse().map_err(|_| parse_err(lineno, format!("not a non-negative integer: {b:?}")))?;
    Ok((a, b))
}

/// Reads the edge-list format strictly: header `n m`, exactly `m` lines
/// `u v` with `u < v < n`, no duplicates, every line newline-terminated.
pub fn read_edge_list<R: BufRead>(mut r: R) -> Result<Graph, FormatError> {
    let mut lines = Vec::new();
    loop {
        let mut buf = String::new();
        if r.read_line(&mut buf)? == 0 {
            break;
        }
        lines.push(buf);
    }
    if lines.is_empty() {
        return Err(parse_err(1, "missing header line"));
    }
    for (i, l) in lines.iter().enumerate() {
        if !l.ends_with('\n') {
            return Err(parse_err(i + 1, "line is not newline-terminated"));
        }
    }
    let (n, m) = parse_pair(lines[0].trim_end_matches('\n'), 1)?;
    if lines.len() - 1 != m {
        return Err(parse_err(lines.len(), format!("header declares {m} edges, found {}", lines.len() - 1)));
    }
    let mut edges = Vec::with_capacity(m);
    let mut seen = std::collections::HashSet::with_capacity(m);
    for (i, l) in lines.iter().enumerate().skip(1) {
        let (u, v) = parse_pair(l.trim_end_matches('\n'), i + 1)?;
        if u >= v {
            return Err(parse_err(i + 1, format!("expected u < v, got {u} {v}")));
        }
        if v >= n {
            return Err(parse_err(i + 1, format!("vertex {v} out of range for n = {n}")));
        }
        if !seen.insert((u, v)) {
            return Err(parse_err(i + 1, format!("duplicate edge {u} {v}")));
        }
        edges.push((u, v));
    }
    Graph::from_simple_edges(n, &edges).map_err(|e| parse_err(1, e.to_string()))
}

/// `key_hex,weight` rows sorted by key bytes.
pub fn write_ball_distribution<W: Write>(d: &BallDistribution, w: W) -> Result<(), FormatError> {
    let mut csv = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    csv.write_record(["key_hex", "weight"])?;
    for (key, weight) in d.atoms() {
        csv.write_record([hex::encode(key.as_bytes()), weight.to_string()])?;
    }
    csv.flush()?;
    Ok(())
}

pub fn read_ball_distribution<R: io::Read>(depth: usize, r: R) -> Result<BallDistribution, FormatError> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut atoms = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let key = hex::decode(rec.get(0).unwrap_or("")).map_err(|e| parse_err(line, e.to_string()))?;
        let weight: f64 =
            rec.get(1).unwrap_or("").parse().map_err(|_| parse_err(line, "weight is not a number"))?;
        atoms.insert(CanonicalKey::from_bytes(key), weight);
    }
    BallDistribution::from_weights(depth, atoms).map_err(|e| parse_err(1, e.to_string()))
}

/// Debug dump of a timeline: `EDGES` lines `u v time dir` (dir `1` for
/// `u -> v`, `-1` for `v -> u`) and `RECOVERIES` lines `v time`, times with
/// 17 significant digits.
pub fn timeline_dump(tl: &Timeline) -> String {
    let mut s = String::new();
    writeln!(s, "EDGES").unwrap();
    for (&(u, v), arrows) in tl.edges.iter().zip(&tl.arrows) {
        for a in arrows {
            writeln!(s, "{u} {v} {:.16e} {}", a.time, if a.forward { 1 } else { -1 }).unwrap();
        }
    }
    writeln!(s, "RECOVERIES").unwrap();
    for (v, times) in tl.recoveries.iter().enumerate() {
        for t in times {
            writeln!(s, "{v} {t:.16e}").unwrap();
        }
    }
    s
}

fn first_passage_field(fp: &FirstPassage) -> String {
    match fp {
        FirstPassage::Hit(t) => t.to_string(),
        FirstPassage::Never => "never".into(),
        FirstPassage::Censored => "censored".into(),
    }
}

/// `trial,extinction_time,censored,tau_R_<R>...,r_eps`.
pub fn write_trajectories<W: Write>(radii: &[usize], runs: &[Trajectory], w: W) -> Result<(), FormatError> {
    let mut csv = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    let mut header = vec!["trial".to_string(), "extinction_time".into(), "censored".into()];
    header.extend(radii.iter().map(|r| format!("tau_R_{r}")));
    header.push("r_eps".into());
    csv.write_record(&header)?;
    for (i, tr) in runs.iter().enumerate() {
        let mut rec = vec![i.to_string(), tr.extinction.time().to_string(), tr.extinction.is_censored().to_string()];
        rec.extend(tr.first_passage.iter().map(|(_, fp)| first_passage_field(fp)));
        rec.push(tr.low_density_time.map(|r| r.to_string()).unwrap_or_default());
        csv.write_record(&rec)?;
    }
    csv.flush()?;
    Ok(())
}

/// One row of estimator output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateRecord {
    pub estimator: String,
    pub params: serde_json::Value,
    pub estimate: Estimate,
    pub seed: u64,
}

impl EstimateRecord {
    pub fn new(estimator: &str, params: serde_json::Value, estimate: Estimate, seed: u64) -> Self {
        EstimateRecord { estimator: estimator.into(), params, estimate, seed }
    }
}

pub const ESTIMATE_HEADER: [&str; 9] = ["estimator", "param_json", "mean", "stderr", "n", "n_censored", "ci_lo", "ci_hi", "seed"];

/// `estimator,param_json,mean,stderr,n,n_censored,ci_lo,ci_hi,seed`.
pub fn write_estimates<W: Write>(records: &[EstimateRecord], w: W) -> Result<(), FormatError> {
    let mut csv = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    csv.write_record(ESTIMATE_HEADER)?;
    for r in records {
        let e = &r.estimate;
        csv.write_record([
            r.estimator.clone(),
            r.params.to_string(),
            e.mean.to_string(),
            e.stderr.to_string(),
            e.n_samples.to_string(),
            e.n_censored.to_string(),
            e.ci.0.to_string(),
            e.ci.1.to_string(),
            r.seed.to_string(),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

/// Generic table writer: header plus rows of already formatted fields.
pub fn write_table<W: Write>(header: &[&str], rows: &[Vec<String>], w: W) -> Result<(), FormatError> {
    let mut csv = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    csv.write_record(header)?;
    for row in rows {
        csv.write_record(row)?;
    }
    csv.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use cplab_core::graphs::generate_star;

    #[test]
    fn star_edge_list_text() {
        let mut buf = Vec::new();
        write_edge_list(&generate_star(3), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "4 3\n0 1\n0 2\n0 3\n");
    }

    fn read(s: &str) -> Result<Graph, FormatError> {
        read_edge_list(s.as_bytes())
    }

    #[test]
    fn reader_rejects_violations_with_line_numbers() {
        let cases = [
            ("3 1\n1 0\n", 2),
            ("3 1\n0 3\n", 2),
            ("3 2\n0 1\n0 1\n", 3),
            ("3 2\n0 1\n", 2),
            ("3 1\n0 1", 2),
            ("3 1\n0 x\n", 2),
            ("3\n", 1),
            ("3 1\n0  1\n", 2),
        ];
        for (text, line) in cases {
            match read(text) {
                Err(FormatError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
        assert!(matches!(read(""), Err(FormatError::Parse { line: 1, .. })));
        assert_eq!(read("2 0\n").unwrap().n(), 2);
    }

    #[test]
    fn ball_distribution_csv_round_trip() {
        let g = cplab_core::graphs::generate_lattice_box(2, 5).unwrap();
        let d = cplab_core::local_convergence::empirical_ball_distribution(&g, 2);
        let mut buf = Vec::new();
        write_ball_distribution(&d, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("key_hex,weight\n"));
        let back = read_ball_distribution(2, buf.as_slice()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn timeline_dump_sections() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let tl = cplab_core::sample_timeline(&g, 1.0, 2.0, &mut cplab_core::rng::seeded(3));
        let dump = timeline_dump(&tl);
        let mut lines = dump.lines();
        assert_eq!(lines.next(), Some("EDGES"));
        assert_eq!(dump.lines().filter(|l| l.starts_with("0 1 ")).count(), tl.arrow_count());
        assert!(dump.contains("RECOVERIES\n"));
        // 17 significant digits: d.dddddddddddddddde±x
        let first = dump.lines().nth(1).unwrap();
        let time = first.split(' ').nth(2).unwrap();
        assert_eq!(time.split('e').next().unwrap().len(), 18);
    }

    #[test]
    fn estimate_rows_quote_json() {
        let rec = EstimateRecord::new("eta_geq_R", serde_json::json!({"lambda": 0.5, "R": 2}), Estimate::exact(0.0), 7);
        let mut buf = Vec::new();
        write_estimates(&[rec], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "estimator,param_json,mean,stderr,n,n_censored,ci_lo,ci_hi,seed\neta_geq_R,\"{\"\"R\"\":2,\"\"lambda\"\":0.5}\",0,0,0,0,0,0,7\n"
        );
    }
}
