//! Output records and their CSV / JSON serialization.
//!
//! Columns are ordered parameters, then results, then metadata. Parameters are
//! written with full round-trip precision so they re-parse to the same run;
//! computed values are rounded to 12 significant digits.

use std::io::Write;
use std::path::Path;

use serde_json::{Map, Number, Value as Json};

use crate::config::{CommandKind, Format, Grid, Job, Point, SweepSystem, TopologyArg};
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Text(String),
    Int(usize),
    /// Input parameter, kept exact.
    Param(f64),
    /// Computed number, rounded to 12 significant digits.
    Real(f64),
    Missing,
}

fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

impl Value {
    fn number(x: f64) -> Json {
        Number::from_f64(x).map_or(Json::Null, Json::Number)
    }

    pub fn to_json(&self) -> Json {
        match self {
            Value::Text(s) => Json::String(s.clone()),
            Value::Int(i) => Json::from(*i),
            Value::Param(x) => Value::number(*x),
            Value::Real(x) => Value::number(round12(*x)),
            Value::Missing => Json::Null,
        }
    }

    /// Text form, as written to CSV and read back by the config parser.
    pub fn to_text(&self) -> String {
        match self.to_json() {
            Json::String(s) => s,
            Json::Null => String::new(),
            other => other.to_string(),
        }
    }
}

/// One output row.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputRecord {
    /// Settings that reproduce the run, as `key = value` pairs.
    pub echo: Vec<(&'static str, Value)>,
    pub results: Vec<(&'static str, Value)>,
    pub meta: Vec<(&'static str, Value)>,
}

impl OutputRecord {
    pub fn fields(&self) -> impl Iterator<Item = &(&'static str, Value)> {
        self.echo.iter().chain(&self.results).chain(&self.meta)
    }

    /// The echoed parameters as config-file text.
    pub fn echo_config(&self) -> String {
        self.echo
            .iter()
            .map(|(k, v)| format!("{k} = {}\n", v.to_text()))
            .collect()
    }
}

fn point_echo(p: &Point) -> Vec<(&'static str, Value)> {
    vec![
        ("topology", Value::Text(p.topology.to_string())),
        ("n", Value::Int(p.n)),
        ("trap", Value::Int(p.trap)),
        ("init", Value::Int(p.init)),
        ("kappa", Value::Param(p.kappa)),
        ("mu", Value::Param(p.mu)),
        ("coupling", Value::Param(p.coupling)),
    ]
}

fn grid_echo(keys: [&'static str; 4], g: &Grid) -> [(&'static str, Value); 4] {
    [
        (keys[0], Value::Param(g.min)),
        (keys[1], Value::Param(g.max)),
        (keys[2], Value::Int(g.count)),
        (keys[3], Value::Text(g.scale.to_string())),
    ]
}

/// Settings that reproduce `job`.
pub fn echo(job: &Job) -> Vec<(&'static str, Value)> {
    match job {
        Job::Efficiency {
            point,
            gamma,
            method,
        } => {
            let mut e = point_echo(point);
            e.push(("gamma", Value::Param(*gamma)));
            e.push(("method", Value::Text(method.name().into())));
            e
        }
        Job::Curve { point, gamma } => {
            let mut e = point_echo(point);
            e.extend(grid_echo(
                ["gamma-min", "gamma-max", "gamma-count", "gamma-scale"],
                gamma,
            ));
            e
        }
        Job::Optimize { point } => point_echo(point),
        Job::Sweep { system, kappa, mu } => {
            let mut e = match system {
                SweepSystem::Finite {
                    topology,
                    n,
                    trap,
                    init,
                } => vec![
                    ("topology", Value::Text(topology.to_string())),
                    ("n", Value::Int(*n)),
                    ("trap", Value::Int(*trap)),
                    ("init", Value::Int(*init)),
                ],
                SweepSystem::Infinite { offset } => vec![
                    ("topology", Value::Text(TopologyArg::Infinite.to_string())),
                    ("offset", Value::Int(*offset)),
                ],
            };
            e.extend(grid_echo(
                ["kappa-min", "kappa-max", "kappa-count", "kappa-scale"],
                kappa,
            ));
            e.extend(grid_echo(["mu-min", "mu-max", "mu-count", "mu-scale"], mu));
            e
        }
        Job::Table { topology, n } => vec![
            ("topology", Value::Text(topology.to_string())),
            ("n", Value::Int(*n)),
        ],
        Job::Infinite { kappa, mu, offset } => vec![
            ("kappa", Value::Param(*kappa)),
            ("mu", Value::Param(*mu)),
            ("offset", Value::Int(*offset)),
        ],
    }
}

/// Result and metadata column names for a subcommand.
pub fn result_columns(kind: CommandKind) -> (&'static [&'static str], &'static [&'static str]) {
    match kind {
        CommandKind::Efficiency => (&["eta", "eta_loss"], &["method", "residual", "version"]),
        CommandKind::Curve => (&["gamma", "eta"], &["version"]),
        CommandKind::Optimize => (&["eta0", "eta_max", "gamma_opt", "xi"], &["version"]),
        CommandKind::Sweep => (
            &["kappa", "mu", "eta0", "eta_max", "gamma_opt", "xi"],
            &["error", "version"],
        ),
        CommandKind::Table => (
            &[
                "trap",
                "init",
                "xi_max",
                "kappa_star",
                "mu_star",
                "gamma_opt",
                "eta0",
            ],
            &[
                "grid_points",
                "kappa_step_decades",
                "mu_step_decades",
                "version",
            ],
        ),
        CommandKind::Infinite => (
            &["eta0", "eta_max", "gamma_opt", "xi"],
            &[
                "left_sites",
                "right_sites",
                "truncation_delta",
                "propagation_delta",
                "version",
            ],
        ),
    }
}

/// Full header for `job`, matching every record it produces.
pub fn columns(job: &Job) -> Vec<&'static str> {
    let (results, meta) = result_columns(job.kind());
    echo(job)
        .into_iter()
        .map(|(k, _)| k)
        .chain(results.iter().copied())
        .chain(meta.iter().copied())
        .collect()
}

fn check_shape(columns: &[&str], records: &[OutputRecord]) -> Result<(), CliError> {
    for r in records {
        if !r.fields().map(|(k, _)| *k).eq(columns.iter().copied()) {
            return Err(CliError::Format(
                "record columns do not match the header".into(),
            ));
        }
    }
    Ok(())
}

/// Serializes records; header-only CSV or `[]` when there are none.
pub fn render(
    records: &[OutputRecord],
    columns: &[&str],
    format: Format,
) -> Result<Vec<u8>, CliError> {
    check_shape(columns, records)?;
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let fail = |e: csv::Error| CliError::Format(e.to_string());
            w.write_record(columns).map_err(fail)?;
            for r in records {
                w.write_record(r.fields().map(|(_, v)| v.to_text()))
                    .map_err(fail)?;
            }
            w.into_inner().map_err(|e| CliError::Format(e.to_string()))
        }
        Format::Json => {
            let rows: Vec<Json> = records
                .iter()
                .map(|r| {
                    let obj: Map<String, Json> = r
                        .fields()
                        .map(|(k, v)| (k.to_string(), v.to_json()))
                        .collect();
                    Json::Object(obj)
                })
                .collect();
            let mut out = serde_json::to_vec_pretty(&Json::Array(rows))
                .map_err(|e| CliError::Format(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

/// Writes the rendered records to `path` atomically (temporary file in the
/// same directory, then rename), or to stdout when `path` is `None`.
pub fn emit(
    records: &[OutputRecord],
    columns: &[&str],
    format: Format,
    path: Option<&Path>,
) -> Result<(), CliError> {
    let bytes = render(records, columns, format)?;
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        return out
            .write_all(&bytes)
            .and_then(|_| out.flush())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            });
    };
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(&bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(Value::Real(1.0 / 3.0).to_text(), "0.333333333333");
        assert_eq!(Value::Real(2.0e-7 / 3.0).to_text(), "6.66666666667e-8");
        assert_eq!(Value::Param(1.0 / 3.0).to_text(), "0.3333333333333333");
        assert_eq!(Value::Real(f64::NAN).to_text(), "");
        assert_eq!(Value::Int(7).to_text(), "7");
    }

    #[test]
    fn empty_outputs() {
        let cols = ["a", "b"];
        assert_eq!(render(&[], &cols, Format::Csv).unwrap(), b"a,b\n");
        assert_eq!(render(&[], &cols, Format::Json).unwrap(), b"[]\n");
    }

    #[test]
    fn quoting_and_order() {
        let r = OutputRecord {
            echo: vec![("z", Value::Text("a,b".into()))],
            results: vec![("a", Value::Real(0.5))],
            meta: vec![],
        };
        let csv = render(std::slice::from_ref(&r), &["z", "a"], Format::Csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap(), "z,a\n\"a,b\",0.5\n");
        let json =
            String::from_utf8(render(std::slice::from_ref(&r), &["z", "a"], Format::Json).unwrap())
                .unwrap();
        assert!(json.find("\"z\"").unwrap() < json.find("\"a\"").unwrap());
        assert!(render(&[r], &["a", "z"], Format::Csv).is_err());
    }
}
