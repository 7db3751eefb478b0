//! The curve.csv format: provenance comments, a context block, then
//! `r,free_energy,std_err,n_graphs` rows.

use std::fs;
use std::path::Path;

use sbm_ising::inference::{CurvePoint, FreeEnergyCurve};
use sbm_ising::ising::TiConfig;
use sbm_ising::{Error, Result};

/// Writes the curve with its `(d, λ, β, n)` context and the TI settings,
/// so `estimate-r` can reproduce the observed-graph computation.
pub fn write_curve(
    path: &Path,
    curve: &FreeEnergyCurve,
    ti: &TiConfig,
    provenance: &str,
) -> Result<()> {
    let mut out = String::new();
    out.push_str(provenance);
    out.push_str(&format!("# d: {}\n", curve.d));
    out.push_str(&format!("# lambda: {}\n", curve.lambda));
    out.push_str(&format!("# beta: {}\n", curve.beta));
    out.push_str(&format!("# n: {}\n", curve.n));
    out.push_str(&format!(
        "# ti: {}\n",
        serde_json::to_string(ti).expect("ti serializes")
    ));
    out.push_str("r,free_energy,std_err,n_graphs\n");
    for p in &curve.points {
        out.push_str(&format!("{},{},{},{}\n", p.r, p.free_energy, p.std_err, p.n_graphs));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads a curve file; context keys are required (the file must come from
/// `build-curve`).
pub fn read_curve(path: &Path) -> Result<(FreeEnergyCurve, TiConfig)> {
    let text = fs::read_to_string(path)?;
    let mut d = None;
    let mut lambda = None;
    let mut beta = None;
    let mut n = None;
    let mut ti = None;
    let mut points = Vec::new();
    let mut header_seen = false;

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some((key, value)) = rest.split_once(':') {
                let value = value.trim();
                match key.trim() {
                    "d" => d = Some(parse_num(value, lineno)?),
                    "lambda" => lambda = Some(parse_num(value, lineno)?),
                    "beta" => beta = Some(parse_num(value, lineno)?),
                    "n" => {
                        n = Some(parse_num(value, lineno)? as usize);
                    }
                    "ti" => {
                        ti = Some(serde_json::from_str(value).map_err(|e| Error::Parse {
                            line: lineno,
                            msg: format!("bad ti config: {e}"),
                        })?);
                    }
                    _ => {}
                }
            }
            continue;
        }
        if !header_seen {
            if line != "r,free_energy,std_err,n_graphs" {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected curve header, got {line:?}"),
                });
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected 4 fields, got {}", fields.len()),
            });
        }
        points.push(CurvePoint {
            r: parse_num(fields[0], lineno)?,
            free_energy: parse_num(fields[1], lineno)?,
            std_err: parse_num(fields[2], lineno)?,
            n_graphs: parse_num(fields[3], lineno)? as usize,
        });
    }

    let missing = |what: &str| Error::Parse {
        line: 0,
        msg: format!("curve file lacks the '# {what}:' context line (use build-curve)"),
    };
    let curve = FreeEnergyCurve {
        points,
        d: d.ok_or_else(|| missing("d"))?,
        lambda: lambda.ok_or_else(|| missing("lambda"))?,
        beta: beta.ok_or_else(|| missing("beta"))?,
        n: n.ok_or_else(|| missing("n"))?,
    };
    if curve.points.is_empty() {
        return Err(Error::Parse { line: 0, msg: "curve has no data rows".into() });
    }
    Ok((curve, ti.ok_or_else(|| missing("ti"))?))
}

fn parse_num(token: &str, line: usize) -> Result<f64> {
    token
        .trim()
        .parse()
        .map_err(|e| Error::Parse { line, msg: format!("bad number {token:?}: {e}") })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let curve = FreeEnergyCurve {
            points: vec![
                CurvePoint { r: 1.0, free_energy: -0.83, std_err: 0.002, n_graphs: 20 },
                CurvePoint { r: 2.0, free_energy: -0.89, std_err: 0.003, n_graphs: 20 },
            ],
            d: 50.0,
            lambda: -0.5,
            beta: 0.1414,
            n: 1000,
        };
        let ti = TiConfig::default();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("curve.csv");
        write_curve(&path, &curve, &ti, "# timestamp: x\n").unwrap();
        let (back, ti_back) = read_curve(&path).unwrap();
        assert_eq!(curve, back);
        assert_eq!(ti, ti_back);
    }

    #[test]
    fn missing_context_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        fs::write(&path, "r,free_energy,std_err,n_graphs\n1,0.5,0.01,4\n").unwrap();
        assert!(read_curve(&path).is_err());
    }
}
