//! Long-format CSV datasets: one row per (menu, observation, alternative)
//! with columns `menu_id, obs_id, alternative, value, prob`.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::choice::{self, ChoiceError, Dataset, DatasetWarning, Menu, RawRecord, ValueVector};

pub const COLUMNS: [&str; 5] = ["menu_id", "obs_id", "alternative", "value", "prob"];

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("line {line}: negative probability {value}")]
    NegativeEntry { line: u64, value: f64 },
    #[error("line {line}: duplicate row for menu `{menu}`, observation `{obs}`, alternative `{alternative}`")]
    DuplicateRow {
        line: u64,
        menu: String,
        obs: String,
        alternative: String,
    },
    #[error(
        "menu `{menu}`, observation `{obs}` (line {line}): no row for alternative `{alternative}`"
    )]
    MissingAlternative {
        line: u64,
        menu: String,
        obs: String,
        alternative: String,
    },
    #[error("menu `{menu}`, observation `{obs}` (line {line}): {source}")]
    Validation {
        line: u64,
        menu: String,
        obs: String,
        source: ChoiceError,
    },
    #[error("menu `{menu}`: {source}")]
    Menu { menu: String, source: ChoiceError },
    #[error("no data rows")]
    Empty,
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// One menu's dataset plus validation warnings.
#[derive(Debug, Clone)]
pub struct ParsedMenu {
    pub dataset: Dataset,
    pub warnings: Vec<DatasetWarning>,
}

#[derive(Default)]
struct MenuRows {
    alternatives: Vec<String>,
    obs_order: Vec<String>,
    // obs id -> alternative -> (value, prob, line)
    cells: HashMap<String, HashMap<String, (f64, f64, u64)>>,
    first_line: HashMap<String, u64>,
}

fn read_rows<R: Read>(
    reader: R,
    require_prob: bool,
    tol: f64,
) -> Result<BTreeMap<String, MenuRows>, CsvError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let column = |name: &str| headers.iter().position(|h| h == name);
    let mut idx = [0usize; 5];
    for (k, name) in COLUMNS.iter().enumerate() {
        match column(name) {
            Some(i) => idx[k] = i,
            None if *name == "prob" && !require_prob => idx[k] = usize::MAX,
            None => return Err(CsvError::MissingColumn(name.to_string())),
        }
    }

    let mut menus: BTreeMap<String, MenuRows> = BTreeMap::new();
    for result in rdr.records() {
        let record = result?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |k: usize| record.get(idx[k]).unwrap_or("");
        let number = |k: usize| -> Result<f64, CsvError> {
            let raw = field(k);
            let x: f64 = raw.parse().map_err(|_| CsvError::Parse {
                line,
                message: format!("`{raw}` is not a number in column `{}`", COLUMNS[k]),
            })?;
            if !x.is_finite() {
                return Err(CsvError::Parse {
                    line,
                    message: format!("non-finite {} `{raw}`", COLUMNS[k]),
                });
            }
            Ok(x)
        };
        let (menu, obs, alt) = (field(0), field(1), field(2));
        if menu.is_empty() || obs.is_empty() || alt.is_empty() {
            return Err(CsvError::Parse {
                line,
                message: "empty menu_id, obs_id or alternative".into(),
            });
        }
        let value = number(3)?;
        let prob = if idx[4] == usize::MAX {
            0.0
        } else {
            number(4)?
        };
        if prob < -tol {
            return Err(CsvError::NegativeEntry { line, value: prob });
        }

        let rows = menus.entry(menu.to_string()).or_default();
        if !rows.alternatives.iter().any(|a| a == alt) {
            rows.alternatives.push(alt.to_string());
        }
        if !rows.cells.contains_key(obs) {
            rows.obs_order.push(obs.to_string());
            rows.first_line.insert(obs.to_string(), line);
        }
        let cells = rows.cells.entry(obs.to_string()).or_default();
        if cells.insert(alt.to_string(), (value, prob, line)).is_some() {
            return Err(CsvError::DuplicateRow {
                line,
                menu: menu.into(),
                obs: obs.into(),
                alternative: alt.into(),
            });
        }
    }
    if menus.is_empty() {
        return Err(CsvError::Empty);
    }
    Ok(menus)
}

fn ordered_cells(
    menu_id: &str,
    rows: &MenuRows,
    obs: &str,
) -> Result<Vec<(f64, f64, u64)>, CsvError> {
    let cells = &rows.cells[obs];
    rows.alternatives
        .iter()
        .map(|alt| {
            cells
                .get(alt)
                .copied()
                .ok_or_else(|| CsvError::MissingAlternative {
                    line: rows.first_line[obs],
                    menu: menu_id.into(),
                    obs: obs.into(),
                    alternative: alt.clone(),
                })
        })
        .collect()
}

/// Parse a dataset file. Menus are returned sorted by id; within a menu,
/// alternatives and observations keep their order of first appearance.
pub fn parse_dataset_csv(path: &Path, tol: f64) -> Result<Vec<ParsedMenu>, CsvError> {
    let file = std::fs::File::open(path).map_err(|source| CsvError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_dataset_reader(file, tol)
}

pub fn parse_dataset_reader<R: Read>(reader: R, tol: f64) -> Result<Vec<ParsedMenu>, CsvError> {
    let menus = read_rows(reader, true, tol)?;
    let mut out = Vec::with_capacity(menus.len());
    for (menu_id, rows) in &menus {
        let menu = Menu::new(menu_id.clone(), rows.alternatives.clone()).map_err(|source| {
            CsvError::Menu {
                menu: menu_id.clone(),
                source,
            }
        })?;
        let mut records = Vec::with_capacity(rows.obs_order.len());
        for obs in &rows.obs_order {
            let cells = ordered_cells(menu_id, rows, obs)?;
            records.push(RawRecord {
                menu_id: menu_id.clone(),
                obs_id: obs.clone(),
                values: cells.iter().map(|c| c.0).collect(),
                probs: cells.iter().map(|c| c.1).collect(),
            });
        }
        let validated = choice::validate_dataset(menu, &records, tol).map_err(|e| match e {
            ChoiceError::InvalidRecords(mut errs) => {
                let first = errs.swap_remove(0);
                let obs = rows.obs_order[first.index].clone();
                CsvError::Validation {
                    line: rows.first_line[&obs],
                    menu: menu_id.clone(),
                    obs,
                    source: first.error,
                }
            }
            other => CsvError::Menu {
                menu: menu_id.clone(),
                source: other,
            },
        })?;
        out.push(ParsedMenu {
            dataset: validated.dataset,
            warnings: validated.warnings,
        });
    }
    Ok(out)
}

/// A menu, its observation ids, and the value vector of each observation.
pub type ValueDesign = (Menu, Vec<String>, Vec<ValueVector>);

/// A design of value vectors per menu, read from the same layout with the
/// `prob` column optional and ignored.
pub fn parse_value_design<R: Read>(reader: R) -> Result<Vec<ValueDesign>, CsvError> {
    let menus = read_rows(reader, false, f64::INFINITY)?;
    let mut out = Vec::with_capacity(menus.len());
    for (menu_id, rows) in &menus {
        let menu = Menu::new(menu_id.clone(), rows.alternatives.clone()).map_err(|source| {
            CsvError::Menu {
                menu: menu_id.clone(),
                source,
            }
        })?;
        let mut values = Vec::with_capacity(rows.obs_order.len());
        for obs in &rows.obs_order {
            let cells = ordered_cells(menu_id, rows, obs)?;
            values.push(
                ValueVector::new(cells.iter().map(|c| c.0).collect()).map_err(|source| {
                    CsvError::Menu {
                        menu: menu_id.clone(),
                        source,
                    }
                })?,
            );
        }
        out.push((menu, rows.obs_order.clone(), values));
    }
    Ok(out)
}

/// Seventeen significant digits: enough to round-trip any `f64`.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write datasets in the long layout, LF line endings.
pub fn write_datasets<W: Write>(writer: W, datasets: &[Dataset]) -> Result<(), CsvError> {
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    wtr.write_record(COLUMNS)?;
    for d in datasets {
        for obs in d.observations() {
            for (a, alt) in d.menu().alternatives().iter().enumerate() {
                wtr.write_record([
                    d.menu().id(),
                    obs.id.as_str(),
                    alt.as_str(),
                    &format_f64(obs.values.as_slice()[a]),
                    &format_f64(obs.probs.as_slice()[a]),
                ])?;
            }
        }
    }
    wtr.flush().map_err(|source| CsvError::Io {
        path: "<output>".into(),
        source,
    })?;
    Ok(())
}
