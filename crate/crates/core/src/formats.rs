//! File formats: judgment TSV, TREC-style run files, JSON-lines click
//! logs, JSON parameter files, and multi-rater label TSV.
//!
//! Formats at a glance:
//!
//! * judgments — `qid<TAB>docid<TAB>topical<TAB>perceived<TAB>snippet`,
//!   labels `0..=4` or `-` for missing, `#` starts a comment line; a
//!   repeated (qid, docid) pair wins last and bumps a warning counter.
//! * run — whitespace-separated `qid Q0 docid rank score tag`.
//! * clicks — one JSON object per line with keys `session_id`, `qid`,
//!   `docs` (array of strings) and `clicks` (array of 0/1, same length).
//! * params — a single JSON object: `model` (`"dcm"` or `"dbn"`),
//!   `attractiveness` (grade-string to number), `dcm_stop` (array, DCM),
//!   `dbn_satisfaction` and `dbn_continuation` (DBN), and `gain`
//!   (`{"kind", "max_grade"}`).
//! * rater labels — `qid<TAB>docid<TAB>aspect<TAB>grade`, one row per
//!   rater vote.
//!
//! Every row-level format error names the offending 1-based line.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::RaterLabelSet;
use crate::click_models::{ClickModel, ClickModelParams};
use crate::error::{Error, Result};
use crate::estimation::Session;
use crate::relevance::{
    Aspect, GainKind, GainScheme, Grade, JudgmentStore, LabelTriple,
};
use crate::run::{RankedRun, RunEntry};

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Format(format!("cannot open {}: {e}", path.display())))
}

fn parse_label(field: &str, line: usize) -> Result<Option<Grade>> {
    if field == "-" {
        return Ok(None);
    }
    let value: u8 = field
        .parse()
        .map_err(|_| Error::format_at(line, format!("invalid label '{field}'")))?;
    Grade::new(value)
        .map(Some)
        .map_err(|_| Error::format_at(line, format!("grade {value} out of range 0..=4")))
}

/// Parses the judgment TSV from a reader.
pub fn parse_judgments_reader<R: Read>(reader: R) -> Result<JudgmentStore> {
    let mut store = JudgmentStore::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let row = line.trim_end_matches(['\r', '\n']);
        if row.is_empty() || row.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = row.split('\t').collect();
        if fields.len() != 5 {
            return Err(Error::format_at(
                lineno,
                format!("expected 5 tab-separated fields, found {}", fields.len()),
            ));
        }
        let triple = LabelTriple {
            topical: parse_label(fields[2], lineno)?,
            perceived: parse_label(fields[3], lineno)?,
            snippet: parse_label(fields[4], lineno)?,
        };
        store.insert(fields[0], fields[1], triple);
    }
    Ok(store)
}

/// Parses the judgment TSV at `path`.
pub fn parse_judgments(path: &Path) -> Result<JudgmentStore> {
    parse_judgments_reader(open(path)?)
}

/// Parses a whitespace-separated run file from a reader.
pub fn parse_run_reader<R: Read>(reader: R) -> Result<RankedRun> {
    let mut entries = Vec::new();
    let mut seen: BTreeMap<(String, usize), usize> = BTreeMap::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let row = line.trim();
        if row.is_empty() || row.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = row.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(Error::format_at(
                lineno,
                format!("expected 6 fields 'qid Q0 docid rank score tag', found {}", fields.len()),
            ));
        }
        let rank: usize = fields[3]
            .parse()
            .map_err(|_| Error::format_at(lineno, format!("invalid rank '{}'", fields[3])))?;
        if rank == 0 {
            return Err(Error::format_at(lineno, "rank must be >= 1"));
        }
        let score: f64 = fields[4]
            .parse()
            .map_err(|_| Error::format_at(lineno, format!("invalid score '{}'", fields[4])))?;
        if let Some(first) = seen.insert((fields[0].to_string(), rank), lineno) {
            return Err(Error::format_at(
                lineno,
                format!(
                    "duplicate rank {rank} for query '{}' (first on line {first})",
                    fields[0]
                ),
            ));
        }
        entries.push(RunEntry {
            query_id: fields[0].to_string(),
            doc_id: fields[2].to_string(),
            rank,
            score,
            tag: fields[5].to_string(),
        });
    }
    RankedRun::from_entries(entries)
}

/// Parses the run file at `path`.
pub fn parse_run(path: &Path) -> Result<RankedRun> {
    parse_run_reader(open(path)?)
}

#[derive(Debug, Serialize, Deserialize)]
struct ClickLine {
    session_id: String,
    qid: String,
    docs: Vec<String>,
    clicks: Vec<u8>,
}

/// Parses a JSON-lines click log from a reader.
pub fn parse_clicks_reader<R: Read>(reader: R) -> Result<Vec<Session>> {
    let mut sessions = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: ClickLine = serde_json::from_str(&line)
            .map_err(|e| Error::format_at(lineno, format!("invalid click record: {e}")))?;
        if parsed.docs.len() != parsed.clicks.len() {
            return Err(Error::format_at(
                lineno,
                format!(
                    "{} docs but {} click flags",
                    parsed.docs.len(),
                    parsed.clicks.len()
                ),
            ));
        }
        let mut clicks = Vec::with_capacity(parsed.clicks.len());
        for &c in &parsed.clicks {
            match c {
                0 => clicks.push(false),
                1 => clicks.push(true),
                other => {
                    return Err(Error::format_at(
                        lineno,
                        format!("click flag must be 0 or 1, found {other}"),
                    ))
                }
            }
        }
        sessions.push(
            Session::new(parsed.session_id, parsed.qid, parsed.docs, clicks)
                .map_err(|e| Error::format_at(lineno, e))?,
        );
    }
    Ok(sessions)
}

/// Parses the click log at `path`.
pub fn parse_clicks(path: &Path) -> Result<Vec<Session>> {
    parse_clicks_reader(open(path)?)
}

/// Writes sessions as a JSON-lines click log.
pub fn write_clicks<W: Write>(mut writer: W, sessions: &[Session]) -> Result<()> {
    for s in sessions {
        let line = ClickLine {
            session_id: s.session_id().to_string(),
            qid: s.query_id().to_string(),
            docs: s.docs().to_vec(),
            clicks: s.clicks().iter().map(|&c| u8::from(c)).collect(),
        };
        let json = serde_json::to_string(&line)
            .map_err(|e| Error::Format(format!("cannot encode click record: {e}")))?;
        writeln!(writer, "{json}")?;
    }
    Ok(())
}

/// Writes sessions to the click log at `path`.
pub fn write_clicks_file(path: &Path, sessions: &[Session]) -> Result<()> {
    let file = File::create(path)
        .map_err(|e| Error::Format(format!("cannot create {}: {e}", path.display())))?;
    write_clicks(file, sessions)
}

#[derive(Debug, Serialize, Deserialize)]
struct GainFile {
    kind: String,
    max_grade: u8,
}

#[derive(Debug, Serialize, Deserialize)]
struct ParamsFile {
    model: String,
    attractiveness: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dcm_stop: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dbn_satisfaction: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dbn_continuation: Option<f64>,
    gain: GainFile,
}

fn grade_map_from_file(map: BTreeMap<String, f64>, what: &str) -> Result<BTreeMap<Grade, f64>> {
    let mut out = BTreeMap::new();
    for (key, value) in map {
        let grade: u8 = key
            .parse()
            .map_err(|_| Error::Format(format!("{what}: invalid grade key '{key}'")))?;
        let grade = Grade::new(grade)
            .map_err(|_| Error::Format(format!("{what}: grade {grade} out of range 0..=4")))?;
        out.insert(grade, value);
    }
    Ok(out)
}

fn grade_map_to_file(map: &BTreeMap<Grade, f64>) -> BTreeMap<String, f64> {
    map.iter().map(|(g, &v)| (g.value().to_string(), v)).collect()
}

/// Reads a parameter file: the click model parameters plus the gain scheme
/// they were fitted or intended for.
pub fn read_params(path: &Path) -> Result<(ClickModelParams, GainScheme)> {
    let file: ParamsFile = serde_json::from_reader(open(path)?)
        .map_err(|e| Error::Format(format!("invalid parameter file: {e}")))?;

    let gain_kind = match file.gain.kind.as_str() {
        "exponential" => GainKind::Exponential,
        "linear" => GainKind::Linear,
        other => return Err(Error::Format(format!("unknown gain kind '{other}'"))),
    };
    let gain = GainScheme::new(gain_kind, file.gain.max_grade)
        .map_err(|e| Error::Format(e.to_string()))?;

    let attractiveness = grade_map_from_file(file.attractiveness, "attractiveness")?;
    let params = match file.model.as_str() {
        "dcm" => {
            let stop = file
                .dcm_stop
                .ok_or_else(|| Error::Format("dcm parameters need 'dcm_stop'".into()))?;
            ClickModelParams::dcm(attractiveness, stop)
                .map_err(|e| Error::Format(e.to_string()))?
        }
        "dbn" => {
            let satisfaction = file.dbn_satisfaction.ok_or_else(|| {
                Error::Format("dbn parameters need 'dbn_satisfaction'".into())
            })?;
            let continuation = file.dbn_continuation.ok_or_else(|| {
                Error::Format("dbn parameters need 'dbn_continuation'".into())
            })?;
            ClickModelParams::dbn(
                attractiveness,
                grade_map_from_file(satisfaction, "dbn_satisfaction")?,
                continuation,
            )
            .map_err(|e| Error::Format(e.to_string()))?
        }
        other => return Err(Error::Format(format!("unknown model '{other}'"))),
    };
    Ok((params, gain))
}

/// Writes a parameter file readable by [`read_params`].
pub fn write_params(path: &Path, params: &ClickModelParams, gain: &GainScheme) -> Result<()> {
    let file = ParamsFile {
        model: params.model().to_string(),
        attractiveness: grade_map_to_file(params.attractiveness()),
        dcm_stop: match params.model() {
            ClickModel::Dcm => Some(params.dcm_stop().to_vec()),
            ClickModel::Dbn => None,
        },
        dbn_satisfaction: match params.model() {
            ClickModel::Dcm => None,
            ClickModel::Dbn => Some(grade_map_to_file(params.dbn_satisfaction())),
        },
        dbn_continuation: match params.model() {
            ClickModel::Dcm => None,
            ClickModel::Dbn => Some(params.dbn_continuation()),
        },
        gain: GainFile {
            kind: gain.kind().to_string(),
            max_grade: gain.max_grade(),
        },
    };
    let json = serde_json::to_string_pretty(&file)
        .map_err(|e| Error::Format(format!("cannot encode parameters: {e}")))?;
    let mut out = File::create(path)
        .map_err(|e| Error::Format(format!("cannot create {}: {e}", path.display())))?;
    writeln!(out, "{json}")?;
    Ok(())
}

/// Parses a multi-rater label TSV from a reader, grouping rows into one
/// label set per (query, document, aspect).
pub fn parse_rater_labels_reader<R: Read>(reader: R) -> Result<Vec<RaterLabelSet>> {
    let mut grouped: BTreeMap<(String, String, String), Vec<Grade>> = BTreeMap::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let row = line.trim_end_matches(['\r', '\n']);
        if row.is_empty() || row.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = row.split('\t').collect();
        if fields.len() != 4 {
            return Err(Error::format_at(
                lineno,
                format!("expected 4 tab-separated fields, found {}", fields.len()),
            ));
        }
        let aspect: Aspect = fields[2]
            .parse()
            .map_err(|e: Error| Error::format_at(lineno, e))?;
        let grade = parse_label(fields[3], lineno)?.ok_or_else(|| {
            Error::format_at(lineno, "rater rows cannot carry a missing label")
        })?;
        grouped
            .entry((
                fields[0].to_string(),
                fields[1].to_string(),
                aspect.to_string(),
            ))
            .or_default()
            .push(grade);
    }
    let mut out = Vec::with_capacity(grouped.len());
    for ((qid, docid, aspect), labels) in grouped {
        let aspect: Aspect = aspect.parse()?;
        out.push(RaterLabelSet::new(qid, docid, aspect, labels)?);
    }
    Ok(out)
}

/// Parses the multi-rater label file at `path`.
pub fn parse_rater_labels(path: &Path) -> Result<Vec<RaterLabelSet>> {
    parse_rater_labels_reader(open(path)?)
}
