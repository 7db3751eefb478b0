//! Edge-list and label-file formats.
//!
//! Edge list: UTF-8 text, line 1 `"n m"`, then `m` lines `"u v"` with
//! `0 <= u < v < n`, newline-terminated. Labels: one `0` or `1` per line,
//! `n` lines, in a sidecar file.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sbm::SparseGraph;

/// Reads a graph from the edge-list format. Labels are not part of this
/// file; attach them with [`read_labels`] + [`SparseGraph::with_labels`].
pub fn read_graph(path: impl AsRef<Path>) -> Result<SparseGraph> {
    let text = fs::read_to_string(path)?;
    parse_graph(&text)
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_graph(text: &str) -> Result<SparseGraph> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "missing 'n m' header"))?;
    let mut it = header.split_whitespace();
    let n: usize = it
        .next()
        .ok_or_else(|| parse_err(1, "missing n"))?
        .parse()
        .map_err(|e| parse_err(1, format!("bad n: {e}")))?;
    let m: usize = it
        .next()
        .ok_or_else(|| parse_err(1, "missing m"))?
        .parse()
        .map_err(|e| parse_err(1, format!("bad m: {e}")))?;
    if it.next().is_some() {
        return Err(parse_err(1, "trailing tokens after 'n m'"));
    }

    let mut edges = Vec::with_capacity(m);
    let mut seen = std::collections::HashSet::with_capacity(m);
    let mut read = 0usize;
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        if read == m {
            return Err(parse_err(lineno, format!("more than m = {m} edge lines")));
        }
        let mut it = line.split_whitespace();
        let u: u32 = it
            .next()
            .ok_or_else(|| parse_err(lineno, "missing u"))?
            .parse()
            .map_err(|e| parse_err(lineno, format!("bad u: {e}")))?;
        let v: u32 = it
            .next()
            .ok_or_else(|| parse_err(lineno, "missing v"))?
            .parse()
            .map_err(|e| parse_err(lineno, format!("bad v: {e}")))?;
        if it.next().is_some() {
            return Err(parse_err(lineno, "trailing tokens after 'u v'"));
        }
        if u == v {
            return Err(parse_err(lineno, format!("self-loop {u} {v}")));
        }
        if u > v {
            return Err(parse_err(lineno, format!("edges must have u < v, got {u} {v}")));
        }
        if v as usize >= n {
            return Err(parse_err(lineno, format!("node {v} out of range for n = {n}")));
        }
        if !seen.insert((u, v)) {
            return Err(parse_err(lineno, format!("duplicate edge {u} {v}")));
        }
        edges.push((u, v));
        read += 1;
    }
    if read != m {
        return Err(parse_err(
            text.lines().count(),
            format!("expected m = {m} edges, found {read}"),
        ));
    }
    SparseGraph::from_edges(n, edges)
}

/// Writes the edge-list format (sorted edges, `u < v`).
pub fn write_graph(g: &SparseGraph, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::with_capacity(16 + 12 * g.edge_count());
    out.push_str(&format!("{} {}\n", g.node_count(), g.edge_count()));
    for &(u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    let mut f = fs::File::create(path)?;
    f.write_all(out.as_bytes())?;
    Ok(())
}

/// Reads a label sidecar file: one `0`/`1` per line.
pub fn read_labels(path: impl AsRef<Path>) -> Result<Vec<u8>> {
    let text = fs::read_to_string(path)?;
    let mut labels = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        match t {
            "0" => labels.push(0),
            "1" => labels.push(1),
            other => return Err(parse_err(idx + 1, format!("label must be 0 or 1, got {other:?}"))),
        }
    }
    Ok(labels)
}

/// Writes the label sidecar file.
pub fn write_labels(labels: &[u8], path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::with_capacity(2 * labels.len());
    for &l in labels {
        out.push_str(if l == 0 { "0\n" } else { "1\n" });
    }
    let mut f = fs::File::create(path)?;
    f.write_all(out.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sbm::sample_sbm;
    use crate::theory::SbmParams;

    #[test]
    fn path_graph_from_text() {
        let g = parse_graph("3 2\n0 1\n1 2\n").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn round_trip_preserves_graph() {
        let params = SbmParams::new(4.0, -0.3, 1.5, 120).unwrap();
        let g = sample_sbm(&params, 9).unwrap();
        let dir = std::env::temp_dir().join("sbm_ising_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let gp = dir.join("g.txt");
        let lp = dir.join("labels.txt");
        write_graph(&g, &gp).unwrap();
        write_labels(g.labels().unwrap(), &lp).unwrap();
        let h = read_graph(&gp).unwrap().with_labels(read_labels(&lp).unwrap()).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        // self-loop
        let err = parse_graph("3 1\n2 2\n").unwrap_err();
        match err {
            Error::Parse { line, msg } => {
                assert_eq!(line, 2);
                assert!(msg.contains("self-loop"));
            }
            other => panic!("unexpected error {other:?}"),
        }
        // duplicate
        assert!(matches!(
            parse_graph("3 2\n0 1\n0 1\n").unwrap_err(),
            Error::Parse { line: 3, .. }
        ));
        // out of range
        assert!(matches!(
            parse_graph("3 1\n0 3\n").unwrap_err(),
            Error::Parse { line: 2, .. }
        ));
        // u >= v
        assert!(matches!(
            parse_graph("3 1\n1 0\n").unwrap_err(),
            Error::Parse { line: 2, .. }
        ));
        // malformed token
        assert!(matches!(
            parse_graph("3 1\n0 x\n").unwrap_err(),
            Error::Parse { line: 2, .. }
        ));
        // wrong count
        assert!(parse_graph("3 2\n0 1\n").is_err());
    }

    #[test]
    fn label_file_round_trip() {
        let dir = std::env::temp_dir().join("sbm_ising_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("l.txt");
        write_labels(&[0, 1, 1, 0], &p).unwrap();
        assert_eq!(read_labels(&p).unwrap(), vec![0, 1, 1, 0]);
    }
}
