//! Command-line front end: JSON in, JSON out.
//!
//! Exit status is 0 on success, 1 when the invocation or its input cannot be
//! parsed, and 2 when the input parses but is mathematically inadmissible.

use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Error;
use crate::lattice::{PolarizationType, PolarizedPeriodMatrix};
use crate::projective::{
    equivalent, normalize, MarkedConfiguration, Marking, MarkingKind, NormalizedConfiguration,
    ProjPoint,
};
use crate::prym::{
    prym_forward, prym_inverse_as, verify_prym, HalfPeriodTriple, PrymCase, PrymResult,
    VerificationReport,
};
use crate::serde_complex;
use crate::torsion::{classify_subgroup, enumerate_klein_subgroups, KleinSubgroup, SubgroupLabel};

#[derive(Debug, Parser)]
#[command(name = "kleinprym", version, about = "Prym varieties of Klein coverings of genus-2 curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Read JSON input from this file instead of stdin.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Write JSON output to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Tolerance for locus membership.
    #[arg(long, global = true, default_value_t = crate::DEFAULT_TOLERANCE)]
    pub tolerance: f64,
    /// Force the isotropic or non-isotropic case.
    #[arg(long, global = true, value_enum)]
    pub case: Option<CaseArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// List the 35 Klein four-subgroups of the 2-torsion with their labels.
    ClassifySubgroups,
    /// Canonical form of a marked configuration of six points.
    Normalize,
    /// Prym period matrix of a configuration.
    Prym,
    /// Configuration recovered from a period matrix.
    Invert,
    /// Structural checks on a period matrix or Prym result.
    Verify,
    /// Forward map, inverse map and the equivalence verdict.
    Roundtrip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    Iso,
    NonIso,
}

impl From<CaseArg> for PrymCase {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::Iso => PrymCase::Isotropic,
            CaseArg::NonIso => PrymCase::NonIsotropic,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Exit status 1.
    Parse(String),
    /// Exit status 2.
    Domain(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 1,
            CliError::Domain(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

fn parse_err(e: impl std::fmt::Display) -> CliError {
    CliError::Parse(e.to_string())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMarked {
    points: [ProjPoint; 6],
    marking: Marking,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNormalized {
    #[serde(with = "serde_complex::array")]
    b: [num_complex::Complex64; 3],
    kind: MarkingKind,
}

/// Either configuration format, validated separately from parsing.
pub fn parse_configuration(v: &Value, case: Option<PrymCase>) -> Result<MarkedConfiguration, CliError> {
    if let Ok(raw) = serde_json::from_value::<RawMarked>(v.clone()) {
        let cfg = MarkedConfiguration::new(raw.points, raw.marking)?;
        if let Some(c) = case {
            if c.kind() != cfg.kind() {
                return Err(Error::MarkingKindMismatch.into());
            }
        }
        return Ok(cfg);
    }
    match serde_json::from_value::<RawNormalized>(v.clone()) {
        Ok(raw) => {
            let kind = case.map_or(raw.kind, PrymCase::kind);
            Ok(NormalizedConfiguration::new(kind, raw.b)?.to_marked())
        }
        Err(e) => Err(CliError::Parse(format!(
            "expected {{\"points\", \"marking\"}} or {{\"b\", \"kind\"}}: {e}"
        ))),
    }
}

#[derive(Deserialize)]
struct RawMatrix {
    #[serde(rename = "Z")]
    big_z: [[[f64; 2]; 3]; 3],
    #[serde(rename = "D")]
    d: [u64; 3],
    #[serde(default)]
    case: Option<PrymCase>,
    #[serde(default)]
    z: Option<[[f64; 2]; 3]>,
}

/// A period matrix, optionally wrapped in a Prym result.
pub struct MatrixInput {
    pub matrix: PolarizedPeriodMatrix,
    pub case: Option<PrymCase>,
    pub z: Option<HalfPeriodTriple>,
}

pub fn parse_matrix(v: &Value) -> Result<MatrixInput, CliError> {
    let raw: RawMatrix = serde_json::from_value(v.clone()).map_err(parse_err)?;
    let d = PolarizationType::new(raw.d)?;
    let z = nalgebra::Matrix3::from_fn(|i, j| serde_complex::from_pair(raw.big_z[i][j]));
    let matrix = PolarizedPeriodMatrix::new(z, d)?;
    let half = raw.z.map(HalfPeriodTriple::try_from).transpose()?;
    Ok(MatrixInput { matrix, case: raw.case, z: half })
}

fn resolve_case(input: &MatrixInput, forced: Option<PrymCase>) -> Result<PrymCase, CliError> {
    forced
        .or(input.case)
        .or_else(|| PrymCase::from_polarization(input.matrix.polarization()))
        .ok_or_else(|| {
            Error::NotInPrymLocus(format!(
                "polarization type {} is neither (1,1,4) nor (1,2,2)",
                input.matrix.polarization()
            ))
            .into()
        })
}

#[derive(Serialize)]
struct Counts {
    total: usize,
    isotropic: usize,
    non_isotropic: usize,
}

#[derive(Serialize)]
struct SubgroupEntry {
    #[serde(flatten)]
    subgroup: KleinSubgroup,
    label: SubgroupLabel,
}

#[derive(Serialize)]
struct Census {
    counts: Counts,
    subgroups: Vec<SubgroupEntry>,
}

fn census() -> Census {
    let subgroups: Vec<SubgroupEntry> = enumerate_klein_subgroups()
        .into_iter()
        .map(|g| SubgroupEntry { label: classify_subgroup(&g), subgroup: g })
        .collect();
    let isotropic = subgroups.iter().filter(|e| e.subgroup.is_isotropic()).count();
    Census {
        counts: Counts { total: subgroups.len(), isotropic, non_isotropic: subgroups.len() - isotropic },
        subgroups,
    }
}

#[derive(Serialize)]
struct Roundtrip {
    configuration: MarkedConfiguration,
    forward: PrymResult,
    inverse: MarkedConfiguration,
    equivalent: bool,
}

fn to_json<T: Serialize>(v: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(v).map_err(parse_err)
}

/// Runs one subcommand on already-read input text.
pub fn execute(cli: &Cli, input: impl FnOnce() -> Result<String, CliError>) -> Result<String, CliError> {
    let forced = cli.case.map(PrymCase::from);
    let value = |text: String| serde_json::from_str::<Value>(&text).map_err(parse_err);
    match cli.command {
        Command::ClassifySubgroups => to_json(&census()),
        Command::Normalize => {
            let cfg = parse_configuration(&value(input()?)?, forced)?;
            to_json(&normalize(&cfg)?.to_marked())
        }
        Command::Prym => {
            let cfg = parse_configuration(&value(input()?)?, forced)?;
            to_json(&prym_forward(&normalize(&cfg)?)?)
        }
        Command::Invert => {
            let m = parse_matrix(&value(input()?)?)?;
            let case = resolve_case(&m, forced)?;
            to_json(&prym_inverse_as(&m.matrix, case, cli.tolerance)?.to_marked())
        }
        Command::Verify => {
            let m = parse_matrix(&value(input()?)?)?;
            let case = resolve_case(&m, forced)?;
            let report: VerificationReport = verify_prym(&m.matrix, case, m.z.as_ref(), cli.tolerance);
            to_json(&report)
        }
        Command::Roundtrip => {
            let cfg = parse_configuration(&value(input()?)?, forced)?;
            let normal = normalize(&cfg)?;
            let forward = prym_forward(&normal)?;
            let case = forward.case;
            let inverse = prym_inverse_as(&forward.period_matrix, case, cli.tolerance)?.to_marked();
            let verdict = equivalent(&inverse, &cfg)?;
            to_json(&Roundtrip { configuration: normal.to_marked(), forward, inverse, equivalent: verdict })
        }
    }
}

/// Full invocation with explicit streams; returns the exit status.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    1
                }
            };
        }
    };
    let read_input = || -> Result<String, CliError> {
        match &cli.input {
            Some(path) => fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display()))),
            None => {
                let mut s = String::new();
                stdin.read_to_string(&mut s).map_err(parse_err)?;
                Ok(s)
            }
        }
    };
    let out = match execute(&cli, read_input) {
        Ok(out) => out + "\n",
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    let written = match &cli.output {
        Some(path) => fs::write(path, out).map_err(|e| format!("{}: {e}", path.display())),
        None => stdout.write_all(out.as_bytes()).map_err(|e| e.to_string()),
    };
    match written {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn invoke(args: &[&str], input: &str) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("kleinprym").chain(args.iter().copied());
        let code = run(argv, &mut input.as_bytes(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    const TRIPLE: &str = r#"{"points":[[0,0],[1,0],"inf",[2,0],[3,0],[4,0]],"marking":{"triple":[0,1,2]}}"#;

    #[test]
    fn census_counts() {
        let (code, out, _) = invoke(&["classify-subgroups"], "");
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["counts"], serde_json::json!({"total": 35, "isotropic": 15, "non_isotropic": 20}));
        assert_eq!(v["subgroups"].as_array().unwrap().len(), 35);
    }

    #[test]
    fn prym_then_verify() {
        let (code, out, _) = invoke(&["prym"], TRIPLE);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["D"], serde_json::json!([1, 1, 4]));
        let (code, report, _) = invoke(&["verify"], &out);
        assert_eq!(code, 0);
        let r: VerificationReport = serde_json::from_str(&report).unwrap();
        assert!(r.passed(), "{report}");
    }

    #[test]
    fn roundtrip_verdict() {
        let (code, out, _) = invoke(&["roundtrip"], TRIPLE);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["equivalent"], Value::Bool(true));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(invoke(&["prym"], "{not json").0, 1);
        assert_eq!(invoke(&["prym"], r#"{"points":[]}"#).0, 1);
        assert_eq!(invoke(&["frobnicate"], "").0, 1);
        let degenerate = r#"{"points":[[0,0],[1,0],"inf",[2,0],[2,0],[4,0]],"marking":{"triple":[0,1,2]}}"#;
        assert_eq!(invoke(&["prym"], degenerate).0, 2);
        assert_eq!(invoke(&["prym", "--case", "iso"], TRIPLE).0, 2);
        assert_eq!(invoke(&["--help"], "").0, 0);
    }

    #[test]
    fn invert_rejects_off_locus() {
        let m = r#"{"Z":[[[0,1],[0,0],[0,0]],[[0,0],[0,1],[0,0]],[[0,0],[0,0],[0,1]]],"D":[1,1,4]}"#;
        let (code, _, err) = invoke(&["invert"], m);
        assert_eq!(code, 2, "{err}");
    }

    #[test]
    fn outputs_parse_as_inputs() {
        let (_, normal, _) = invoke(&["normalize"], TRIPLE);
        assert_eq!(invoke(&["normalize"], &normal).1, normal);
        let (_, result, _) = invoke(&["prym"], &normal);
        let (code, inverse, _) = invoke(&["invert"], &result);
        assert_eq!(code, 0);
        let parse = |s: &str| parse_configuration(&serde_json::from_str(s).unwrap(), None).unwrap();
        assert!(equivalent(&parse(&inverse), &parse(&normal)).unwrap());
    }

    #[test]
    fn deterministic() {
        let a = invoke(&["roundtrip"], TRIPLE).1;
        let b = invoke(&["roundtrip"], TRIPLE).1;
        assert_eq!(a, b);
    }
}
