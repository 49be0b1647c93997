// SPDX-License-Identifier: Apache-2.0

//! Norm specifications and the CSV / JSON formats of the pipelines.
//!
//! CSV files start with `# key: value` metadata lines followed by a header
//! row. Floats are written with 17 significant digits so a table read back
//! reproduces the written values exactly.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::curvature::{CurvatureProfile, SuperCurvature};
use crate::error::{Error, Result};
use crate::estimator::EstimateProfile;
use crate::linalg::{Mat2, Vec2};
use crate::norm::{make_lp_norm, make_radial_norm_from_samples, Norm2D};
use crate::reconstruct::{IsometryReport, ReconstructedCurve};
use crate::sphere_param::{ArcLengthTable, NaturalCurve};

/// A norm as written in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NormSpec {
    Euclidean,
    Lp {
        p: f64,
    },
    Radial {
        /// `(theta, h(theta))` pairs.
        samples: Vec<(f64, f64)>,
        #[serde(default = "default_interpolation")]
        interpolation: String,
    },
}

fn default_interpolation() -> String {
    "cubic".into()
}

impl NormSpec {
    /// Parses `euclidean`, `lp:P`, or `@FILE` (JSON, or TOML for `.toml`).
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some(path) = text.strip_prefix('@') {
            let body = fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
            return if path.ends_with(".toml") {
                toml::from_str(&body).map_err(|e| Error::Parse(format!("{path}: {e}")))
            } else {
                serde_json::from_str(&body).map_err(|e| Error::Parse(format!("{path}: {e}")))
            };
        }
        if text.eq_ignore_ascii_case("euclidean") {
            return Ok(NormSpec::Euclidean);
        }
        if let Some(p) = text.strip_prefix("lp:") {
            let p: f64 = p
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in norm spec {text:?}")))?;
            return Ok(NormSpec::Lp { p });
        }
        Err(Error::Parse(format!(
            "unknown norm spec {text:?}; expected euclidean, lp:P or @FILE"
        )))
    }

    pub fn build(&self) -> Result<Norm2D> {
        match self {
            NormSpec::Euclidean => Ok(Norm2D::euclidean()),
            NormSpec::Lp { p } if *p == 2.0 => Ok(Norm2D::euclidean()),
            NormSpec::Lp { p } => make_lp_norm(*p),
            NormSpec::Radial {
                samples,
                interpolation,
            } => {
                if interpolation != "cubic" {
                    return Err(Error::InvalidParameter(format!(
                        "unsupported radial interpolation {interpolation:?}"
                    )));
                }
                make_radial_norm_from_samples(samples)
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            NormSpec::Euclidean => "euclidean".into(),
            NormSpec::Lp { p } => format!("lp:{p}"),
            NormSpec::Radial { samples, .. } => format!("radial:{}", samples.len()),
        }
    }
}

/// Parses `[[a, b], [c, d]]`.
pub fn parse_matrix(text: &str) -> Result<Mat2> {
    let rows: [[f64; 2]; 2] =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("matrix {text:?}: {e}")))?;
    Ok(Mat2::from_rows(rows))
}

/// Parses a comma-separated list of floats.
pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number {t:?} in list {text:?}")))
        })
        .collect()
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV table with metadata, built in memory.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub metadata: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            metadata: Vec::new(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn push_floats(&mut self, row: &[f64]) {
        self.rows.push(row.iter().map(|&x| fmt_f64(x)).collect());
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}: {v}")?;
        }
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&self.header)?;
            for r in &self.rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        Ok(out)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes()?).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut metadata = Vec::new();
        let mut body = String::new();
        for line in text.lines() {
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.split_once(':') {
                    metadata.push((k.trim().to_string(), v.trim().to_string()));
                }
            } else {
                body.push_str(line);
                body.push('\n');
            }
        }
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(body.as_bytes());
        let header = rdr.headers()?.iter().map(String::from).collect();
        let rows = rdr
            .records()
            .map(|r| r.map(|rec| rec.iter().map(String::from).collect()))
            .collect::<std::result::Result<Vec<Vec<String>>, _>>()?;
        Ok(Self {
            metadata,
            header,
            rows,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn metadata_value(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Numeric column by header name.
    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self
            .header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse(format!("missing column {name:?}")))?;
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r.get(idx)
                    .and_then(|v| v.parse::<f64>().ok())
                    .ok_or_else(|| Error::Parse(format!("row {i}: bad value in column {name:?}")))
            })
            .collect()
    }
}

/// `(t, s)` on the table's knots.
pub fn arc_length_table(table: &ArcLengthTable) -> Table {
    let mut t = Table::new(&["t", "s"]).meta("half_length", fmt_f64(table.half_length()));
    for (ti, si) in table.t_grid().iter().zip(table.s_values()) {
        t.push_floats(&[*ti, *si]);
    }
    t
}

/// `(s, r1, r2, r1p, r2p)` on `n` uniform points of `[0, 2L)`.
pub fn natural_table(curve: &NaturalCurve, n: usize) -> Table {
    let l = curve.half_length();
    let mut t = Table::new(&["s", "r1", "r2", "r1p", "r2p"]).meta("half_length", fmt_f64(l));
    for k in 0..n {
        let s = 2.0 * l * k as f64 / n as f64;
        let (r, d) = curve.point_and_derivative(s);
        t.push_floats(&[s, r.x, r.y, d.x, d.y]);
    }
    t
}

pub fn curvature_table(
    profile: &CurvatureProfile,
    sup: &SuperCurvature,
    norm_label: &str,
) -> Table {
    let bands: Vec<String> = profile
        .excluded
        .iter()
        .map(|(a, b)| format!("[{}, {}]", fmt_f64(*a), fmt_f64(*b)))
        .collect();
    let mut t = Table::new(&["s", "rho", "tau", "Rho", "Tau", "psi", "phi"])
        .meta("norm", norm_label)
        .meta("c", fmt_f64(sup.constants.c))
        .meta("C", fmt_f64(sup.constants.big_c))
        .meta("half_length", fmt_f64(profile.half_length))
        .meta("grid", profile.nominal_grid)
        .meta(
            "excluded",
            if bands.is_empty() {
                "none".to_string()
            } else {
                bands.join(" ")
            },
        );
    for i in 0..profile.s.len() {
        t.push_floats(&[
            profile.s[i],
            profile.rho[i],
            profile.tau[i],
            sup.big_rho[i],
            sup.big_tau[i],
            sup.psi[i],
            sup.phi[i],
        ]);
    }
    t
}

/// Reads `s, rho, tau` and the `half_length` metadata back into a profile.
pub fn read_curvature_table(table: &Table) -> Result<CurvatureProfile> {
    let half_length: f64 = table
        .metadata_value("half_length")
        .ok_or_else(|| Error::Parse("profile lacks half_length metadata".into()))?
        .parse()
        .map_err(|_| Error::Parse("bad half_length metadata".into()))?;
    let s = table.column("s")?;
    let nominal_grid = table
        .metadata_value("grid")
        .and_then(|g| g.parse().ok())
        .unwrap_or(s.len());
    Ok(CurvatureProfile {
        rho: table.column("rho")?,
        tau: table.column("tau")?,
        s,
        half_length,
        nominal_grid,
        excluded: Vec::new(),
    })
}

pub fn estimate_table(est: &EstimateProfile, norm_label: &str, schedule: &[f64]) -> Table {
    let sched: Vec<String> = schedule.iter().map(|e| fmt_f64(*e)).collect();
    let mut t = Table::new(&["s", "rho_hat", "class", "psi_prime_hat", "tau_hat"])
        .meta("norm", norm_label)
        .meta("half_length", fmt_f64(est.half_length))
        .meta("eps", sched.join(","));
    for i in 0..est.s.len() {
        t.push(vec![
            fmt_f64(est.s[i]),
            fmt_f64(est.rho_hat[i]),
            est.class[i].to_string(),
            fmt_f64(est.psi_prime_hat[i]),
            fmt_f64(est.tau_hat[i]),
        ]);
    }
    t
}

/// Samples `(s, r)` of a natural parameterization with the half-length, if recorded.
pub type Samples = (Vec<(f64, Vec2)>, Option<f64>);

/// Samples for a sampled distance oracle.
pub fn read_samples(table: &Table) -> Result<Samples> {
    let s = table.column("s")?;
    let x = table.column("r1")?;
    let y = table.column("r2")?;
    let half = table
        .metadata_value("half_length")
        .and_then(|v| v.parse().ok());
    Ok((
        s.into_iter()
            .zip(x.into_iter().zip(y))
            .map(|(s, (x, y))| (s, Vec2::new(x, y)))
            .collect(),
        half,
    ))
}

/// Every `stride`-th state of a reconstructed curve.
pub fn curve_table(rec: &ReconstructedCurve, stride: usize) -> Table {
    let mut t = Table::new(&["s", "r1", "r2", "r1p", "r2p"])
        .meta("half_length", fmt_f64(rec.half_length))
        .meta("step", fmt_f64(rec.step))
        .meta("antipodal_residual", fmt_f64(rec.antipodal_residual))
        .meta("periodic_residual", fmt_f64(rec.periodic_residual));
    for st in rec.states.iter().step_by(stride.max(1)) {
        t.push_floats(&[st.s, st.r.x, st.r.y, st.r_prime.x, st.r_prime.y]);
    }
    t
}

pub fn isometry_json(report: &IsometryReport) -> serde_json::Value {
    let mut v = json!({
        "F": report.f.rows(),
        "det": report.det,
        "max_sphere_residual": report.max_sphere_residual,
        "frame_residual": report.frame_residual,
        "curvature_mismatch": { "rho": report.rho_mismatch, "tau": report.tau_mismatch },
        "half_length": { "x": report.half_length_x, "y": report.half_length_y },
    });
    if let Some(d) = report.reference_deviation {
        v["reference_deviation"] = json!(d);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_strings() {
        assert_eq!(NormSpec::parse("euclidean").unwrap(), NormSpec::Euclidean);
        assert_eq!(NormSpec::parse("lp:4").unwrap(), NormSpec::Lp { p: 4.0 });
        assert!(NormSpec::parse("lp:x").is_err());
        assert!(NormSpec::parse("sup").is_err());
        assert!(NormSpec::parse("lp:1").unwrap().build().is_err());
        let n = NormSpec::parse("lp:2").unwrap().build().unwrap();
        assert!((n.eval(Vec2::new(3.0, 4.0)) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn spec_files() {
        let dir = std::env::temp_dir().join(format!("spherekit-io-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let j = dir.join("n.json");
        fs::write(&j, r#"{"kind": "lp", "p": 3}"#).unwrap();
        assert_eq!(
            NormSpec::parse(&format!("@{}", j.display())).unwrap(),
            NormSpec::Lp { p: 3.0 }
        );
        let samples: Vec<String> = (0..64)
            .map(|k| format!("[{}, 1.0]", std::f64::consts::TAU * k as f64 / 64.0))
            .collect();
        let t = dir.join("n.toml");
        fs::write(
            &t,
            format!("kind = \"radial\"\nsamples = [{}]\n", samples.join(", ")),
        )
        .unwrap();
        let spec = NormSpec::parse(&format!("@{}", t.display())).unwrap();
        let norm = spec.build().unwrap();
        assert!((norm.eval(Vec2::new(1.0, 1.0)) - 2f64.sqrt()).abs() < 1e-9);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn table_round_trip() {
        let mut t = Table::new(&["s", "v"]).meta("half_length", fmt_f64(1.5));
        t.push_floats(&[0.1, 1.0 / 3.0]);
        t.push_floats(&[0.2, -2.0e-300]);
        let back = Table::parse(std::str::from_utf8(&t.to_bytes().unwrap()).unwrap()).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.column("v").unwrap(), vec![1.0 / 3.0, -2.0e-300]);
        assert!(back.column("w").is_err());
    }

    #[test]
    fn curve_tables() {
        let curve = NaturalCurve::new(&Norm2D::euclidean(), 256).unwrap();
        let t = natural_table(&curve, 8);
        assert_eq!(t.rows.len(), 8);
        let r2 = t.column("r2").unwrap();
        assert!((r2[2] - 1.0).abs() < 1e-12);
        let a = arc_length_table(curve.table());
        let s = a.column("s").unwrap();
        assert_eq!(s[0], 0.0);
        assert!((s[s.len() - 1] - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn matrices_and_lists() {
        let m = parse_matrix("[[1.2,0.3],[0.1,0.9]]").unwrap();
        assert_eq!(m, Mat2::new(1.2, 0.3, 0.1, 0.9));
        assert_eq!(
            parse_list("1e-2, 5e-3,2.5e-3").unwrap(),
            vec![1e-2, 5e-3, 2.5e-3]
        );
        assert!(parse_list("1,,2").is_err());
    }
}
