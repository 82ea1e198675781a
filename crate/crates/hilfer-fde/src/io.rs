//! Problem files, CSV samples and JSON reports.
//!
//! The problem file is flat key-value text with sections:
//!
//! ```text
//! # composite relaxation, τ1 = τ2 = 1
//! [equation]
//! term = 1.0, 1.0, 1.0     # order, type, coefficient; first line is leading
//! term = 0.5, 0.5, 1.0
//! term = 0.0, 1.0, 1.0
//! [initial]
//! iv.0.0 = 1.0             # iv.<term>.<k> = value
//! [forcing]
//! kind = zero              # zero | power | exp | sin | table
//! [domain]
//! end = 1.0
//! ```
//!
//! Equation lines are the summands of Σ c_i D^{αi,βi} y = g; internally the
//! lower terms flip sign into the canonical `D^{α0,β0} y - Σ a_i D^{αi,βi} y`
//! form and the leading coefficient is normalized away.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::{FdeError, Result};
use crate::fracops::SampledFunction;
use crate::problem::{
    CaseKind, DerivedIndices, ExistenceReport, FdeProblem, ForcingSpec, FractionalTerm,
    InterpOrder, Verdict,
};
use crate::solver::ClosedFormSolution;

fn parse_num(line_no: usize, key: &str, s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| FdeError::Parse {
        line: line_no,
        msg: format!("key `{key}`: `{}` is not a number", s.trim()),
    })
}

/// Parse a problem from file contents.
pub fn parse_problem_str(text: &str) -> Result<FdeProblem> {
    #[derive(PartialEq, Clone, Copy)]
    enum Section {
        None,
        Equation,
        Initial,
        Forcing,
        Domain,
    }
    let mut section = Section::None;
    let mut terms: Vec<(usize, FractionalTerm)> = Vec::new();
    let mut initial: Vec<(usize, usize, f64)> = Vec::new();
    let mut forcing_kv: BTreeMap<String, (usize, String)> = BTreeMap::new();
    let mut end: Option<f64> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') {
            section = match line {
                "[equation]" => Section::Equation,
                "[initial]" => Section::Initial,
                "[forcing]" => Section::Forcing,
                "[domain]" => Section::Domain,
                other => {
                    return Err(FdeError::Parse {
                        line: line_no,
                        msg: format!("unknown section {other}"),
                    })
                }
            };
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| FdeError::Parse {
            line: line_no,
            msg: format!("expected `key = value`, got `{line}`"),
        })?;
        let key = key.trim();
        let value = value.trim();
        match section {
            Section::None => {
                return Err(FdeError::Parse {
                    line: line_no,
                    msg: format!("key `{key}` before any section header"),
                })
            }
            Section::Equation => {
                if key != "term" {
                    return Err(FdeError::Parse {
                        line: line_no,
                        msg: format!("key `{key}`: only `term` is allowed in [equation]"),
                    });
                }
                let parts: Vec<&str> = value.split(',').collect();
                if parts.len() != 3 {
                    return Err(FdeError::Parse {
                        line: line_no,
                        msg: format!("key `term`: expected `order, type, coefficient`, got `{value}`"),
                    });
                }
                let order = parse_num(line_no, "term", parts[0])?;
                let type_param = parse_num(line_no, "term", parts[1])?;
                let coefficient = parse_num(line_no, "term", parts[2])?;
                let t = FractionalTerm::new(order, type_param, coefficient).map_err(|e| {
                    FdeError::Parse { line: line_no, msg: format!("key `term`: {e}") }
                })?;
                terms.push((line_no, t));
            }
            Section::Initial => {
                let mut it = key.split('.');
                let (Some("iv"), Some(i), Some(k), None) =
                    (it.next(), it.next(), it.next(), it.next())
                else {
                    return Err(FdeError::Parse {
                        line: line_no,
                        msg: format!("key `{key}`: expected `iv.<term>.<k>`"),
                    });
                };
                let i: usize = i.parse().map_err(|_| FdeError::Parse {
                    line: line_no,
                    msg: format!("key `{key}`: `{i}` is not a term index"),
                })?;
                let k: usize = k.parse().map_err(|_| FdeError::Parse {
                    line: line_no,
                    msg: format!("key `{key}`: `{k}` is not a derivative index"),
                })?;
                initial.push((i, k, parse_num(line_no, key, value)?));
            }
            Section::Forcing => {
                forcing_kv.insert(key.to_string(), (line_no, value.to_string()));
            }
            Section::Domain => {
                if key != "end" {
                    return Err(FdeError::Parse {
                        line: line_no,
                        msg: format!("key `{key}`: only `end` is allowed in [domain]"),
                    });
                }
                end = Some(parse_num(line_no, "end", value)?);
            }
        }
    }

    if terms.is_empty() {
        return Err(FdeError::Parse {
            line: 0,
            msg: "no [equation] terms; at least the leading term is required".into(),
        });
    }
    let leading = terms[0].1;
    // summand convention: c_i D y on the left ↦ a_i = -c_i in canonical form
    let lower: Vec<FractionalTerm> = terms[1..]
        .iter()
        .map(|(_, t)| FractionalTerm { coefficient: -t.coefficient, ..*t })
        .collect();

    let forcing = parse_forcing(&forcing_kv)?;
    let mut p = FdeProblem::new(leading, lower, forcing, end.unwrap_or(crate::config::DEFAULT_END));
    for (i, k, v) in initial {
        p.initial_values.insert((i, k), v);
    }
    Ok(p)
}

fn parse_forcing(kv: &BTreeMap<String, (usize, String)>) -> Result<ForcingSpec> {
    let get = |key: &str| kv.get(key).map(|(l, v)| (*l, v.as_str()));
    let num_or = |key: &str, default: f64| -> Result<f64> {
        match get(key) {
            Some((l, v)) => parse_num(l, key, v),
            None => Ok(default),
        }
    };
    let Some((kind_line, kind)) = get("kind") else {
        if kv.is_empty() {
            return Ok(ForcingSpec::Zero);
        }
        let (line, _) = kv.values().next().unwrap();
        return Err(FdeError::Parse { line: *line, msg: "forcing needs `kind = …`".into() });
    };
    match kind {
        "zero" => Ok(ForcingSpec::Zero),
        "power" => Ok(ForcingSpec::Power {
            scale: num_or("scale", 1.0)?,
            exponent: num_or("exponent", 0.0)?,
        }),
        "exp" => Ok(ForcingSpec::Exponential {
            scale: num_or("scale", 1.0)?,
            rate: num_or("rate", 1.0)?,
        }),
        "sin" => Ok(ForcingSpec::Sinusoid {
            scale: num_or("scale", 1.0)?,
            angular_freq: num_or("angular_freq", 1.0)?,
            phase: num_or("phase", 0.0)?,
        }),
        "table" => {
            let (l, step) = get("step").ok_or(FdeError::Parse {
                line: kind_line,
                msg: "table forcing needs `step = h`".into(),
            })?;
            let step = parse_num(l, "step", step)?;
            let (l, values) = get("values").ok_or(FdeError::Parse {
                line: kind_line,
                msg: "table forcing needs `values = v0, v1, …`".into(),
            })?;
            let values = values
                .split(',')
                .map(|s| parse_num(l, "values", s))
                .collect::<Result<Vec<f64>>>()?;
            let interp = match num_or("interp", 1.0)? as i64 {
                0 => InterpOrder::Constant,
                1 => InterpOrder::Linear,
                other => {
                    return Err(FdeError::Parse {
                        line: kind_line,
                        msg: format!("key `interp`: expected 0 or 1, got {other}"),
                    })
                }
            };
            let samples = SampledFunction::new(step, values).map_err(|e| FdeError::Parse {
                line: l,
                msg: format!("key `values`: {e}"),
            })?;
            Ok(ForcingSpec::Tabulated { samples, interp })
        }
        other => Err(FdeError::Parse {
            line: kind_line,
            msg: format!("key `kind`: unknown forcing `{other}`"),
        }),
    }
}

pub fn parse_problem_file(path: &Path) -> Result<FdeProblem> {
    let text = std::fs::read_to_string(path)?;
    parse_problem_str(&text)
}

/// CSV with header `x,y` and full-precision values (17 significant digits).
pub fn to_csv(samples: &SampledFunction) -> String {
    let mut out = String::from("x,y\n");
    for (j, v) in samples.values().iter().enumerate() {
        let _ = writeln!(out, "{:.16e},{:.16e}", samples.node(j), v);
    }
    out
}

#[derive(Debug, Serialize)]
pub struct CaseReport {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_bound: Option<i64>,
}

#[derive(Debug, Serialize)]
pub struct MandatoryZeroReport {
    pub term: usize,
    pub k: usize,
    pub supplied: f64,
}

#[derive(Debug, Serialize)]
pub struct PowerTermReport {
    pub coeff: f64,
    pub exponent: f64,
}

#[derive(Debug, Serialize)]
pub struct MlTermReport {
    pub coeff: f64,
    pub exponent: f64,
    pub b: f64,
}

#[derive(Debug, Serialize)]
pub struct ForcingReport {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angular_freq: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase: Option<f64>,
}

impl ForcingReport {
    fn from(f: &ForcingSpec) -> Self {
        let empty = ForcingReport {
            kind: "zero",
            scale: None,
            exponent: None,
            rate: None,
            angular_freq: None,
            phase: None,
        };
        match f {
            ForcingSpec::Zero => empty,
            ForcingSpec::Power { scale, exponent } => ForcingReport {
                kind: "power",
                scale: Some(*scale),
                exponent: Some(*exponent),
                ..empty
            },
            ForcingSpec::Exponential { scale, rate } => ForcingReport {
                kind: "exp",
                scale: Some(*scale),
                rate: Some(*rate),
                ..empty
            },
            ForcingSpec::Sinusoid { scale, angular_freq, phase } => ForcingReport {
                kind: "sin",
                scale: Some(*scale),
                angular_freq: Some(*angular_freq),
                phase: Some(*phase),
                ..empty
            },
            ForcingSpec::Tabulated { .. } => ForcingReport { kind: "table", ..empty },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SolutionReport {
    pub ml_weights: Vec<f64>,
    pub ml_args_scale: Vec<f64>,
    pub power_terms: Vec<PowerTermReport>,
    pub ml_terms: Vec<MlTermReport>,
    pub convolution: Option<ForcingReport>,
    pub origin_unbounded: bool,
}

#[derive(Debug, Serialize)]
pub struct SolveReport {
    pub verdict: &'static str,
    pub case: CaseReport,
    pub m: Vec<usize>,
    pub gamma: Vec<f64>,
    pub mandatory_zero: Vec<MandatoryZeroReport>,
    pub solution: Option<SolutionReport>,
}

pub fn solve_report(
    report: &ExistenceReport,
    idx: &DerivedIndices,
    sol: Option<&ClosedFormSolution>,
) -> SolveReport {
    let case = match report.case {
        CaseKind::AllGammaEqual => CaseReport { kind: "all_gamma_equal", l: None, m_bound: None },
        CaseKind::Split { l, m_bound } => {
            CaseReport { kind: "split", l: Some(l), m_bound: Some(m_bound) }
        }
    };
    SolveReport {
        verdict: match report.verdict {
            Verdict::Solvable => "solvable",
            Verdict::Unsolvable => "unsolvable",
        },
        case,
        m: idx.m.clone(),
        gamma: idx.gamma.clone(),
        mandatory_zero: report
            .mandatory_zero
            .iter()
            .map(|z| MandatoryZeroReport { term: z.term, k: z.k, supplied: z.supplied })
            .collect(),
        solution: sol.map(|s| SolutionReport {
            ml_weights: s.ml_weights.clone(),
            ml_args_scale: s.ml_args_scale.clone(),
            power_terms: s
                .power_terms
                .iter()
                .map(|t| PowerTermReport { coeff: t.coeff, exponent: t.exponent })
                .collect(),
            ml_terms: s
                .ml_terms
                .iter()
                .map(|t| MlTermReport { coeff: t.coeff, exponent: t.exponent, b: t.b })
                .collect(),
            convolution: s.convolution.as_ref().map(|c| ForcingReport::from(&c.forcing)),
            origin_unbounded: s.origin_unbounded(),
        }),
    }
}

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub max_residual: f64,
    pub oracle_max_rel: f64,
    pub residual_threshold: f64,
    pub rel_threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct MlReport {
    pub value: f64,
    pub terms_used: usize,
    pub truncation_bound: f64,
}

/// Pretty JSON with a trailing newline; key order follows struct
/// declaration order, so output is byte-stable.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports are serializable");
    s.push('\n');
    s
}
