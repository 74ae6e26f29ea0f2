//! MPS reader (fixed and free format) and lowering to [`GeneralFormLP`].

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use log::warn;
use thiserror::Error;

use crate::error::Result;
use crate::lp::GeneralFormLP;
use crate::sparse::SparseMatrix;

#[derive(Debug, Error, PartialEq)]
pub enum MpsError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: unsupported MPS feature: {what}")]
    Unsupported { line: usize, what: String },
    #[error("missing ENDATA")]
    MissingEndata,
    #[error("no objective (N) row")]
    NoObjective,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowType {
    N,
    E,
    L,
    G,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RowRecord {
    pub name: String,
    pub kind: RowType,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundType {
    Up,
    Lo,
    Fx,
    Fr,
    Mi,
    Pl,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundEntry {
    pub kind: BoundType,
    pub col: usize,
    pub value: f64,
}

/// Faithful record of an MPS file. Row and column references are indices into `rows`/`columns`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MpsProblem {
    pub name: String,
    pub rows: Vec<RowRecord>,
    /// Index into `rows` of the selected objective.
    pub objective: Option<usize>,
    pub columns: Vec<String>,
    /// `(col, row, value)` with duplicates already summed.
    pub entries: Vec<(usize, usize, f64)>,
    pub rhs: Vec<(usize, f64)>,
    pub ranges: Vec<(usize, f64)>,
    pub bounds: Vec<BoundEntry>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Section {
    None,
    Rows,
    Columns,
    Rhs,
    Ranges,
    Bounds,
}

/// Splits a fixed-format line into its six fields (1-based columns 2-3, 5-12, 15-22, 25-36, 40-47, 50-61).
fn fixed_fields(line: &str) -> Vec<String> {
    let bytes = line.as_bytes();
    let slice = |a: usize, b: usize| -> String {
        if a >= bytes.len() {
            return String::new();
        }
        String::from_utf8_lossy(&bytes[a..b.min(bytes.len())])
            .trim()
            .to_string()
    };
    let fields = [(1, 3), (4, 12), (14, 22), (24, 36), (39, 47), (49, 61)];
    fields.iter().map(|&(a, b)| slice(a, b)).collect()
}

fn parse_num(s: &str, line: usize) -> Result<f64, MpsError> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| MpsError::Parse {
            line,
            msg: format!("bad number '{s}'"),
        })
}

struct Parser {
    p: MpsProblem,
    row_index: HashMap<String, usize>,
    col_index: HashMap<String, usize>,
    entry_index: HashMap<(usize, usize), usize>,
}

impl Parser {
    fn row(&self, name: &str, line: usize) -> Result<usize, MpsError> {
        self.row_index.get(name).copied().ok_or_else(|| MpsError::Parse {
            line,
            msg: format!("undeclared row '{name}'"),
        })
    }

    fn col(&self, name: &str, line: usize) -> Result<usize, MpsError> {
        self.col_index.get(name).copied().ok_or_else(|| MpsError::Parse {
            line,
            msg: format!("undeclared column '{name}'"),
        })
    }

    fn add_entry(&mut self, col: usize, row: usize, v: f64, line: usize) {
        if let Some(&k) = self.entry_index.get(&(col, row)) {
            warn!(
                "line {line}: duplicate entry ({}, {}), summing",
                self.p.columns[col], self.p.rows[row].name
            );
            self.p.entries[k].2 += v;
        } else {
            self.entry_index.insert((col, row), self.p.entries.len());
            self.p.entries.push((col, row, v));
        }
    }

    /// `(row, value)` pairs from an RHS/RANGES line, with or without a set name.
    fn pairs(&self, tokens: &[&str], line: usize) -> Result<Vec<(usize, f64)>, MpsError> {
        let data = match tokens.len() {
            2 | 4 => tokens,
            3 | 5 => &tokens[1..],
            _ => {
                return Err(MpsError::Parse {
                    line,
                    msg: "expected [set] row value [row value]".into(),
                })
            }
        };
        data.chunks(2)
            .map(|c| Ok((self.row(c[0], line)?, parse_num(c[1], line)?)))
            .collect()
    }
}

fn valid_count(section: Section, tokens: &[&str]) -> bool {
    match section {
        Section::Rows => tokens.len() == 2,
        Section::Columns => tokens.len() == 3 || tokens.len() == 5 || tokens.contains(&"'MARKER'"),
        Section::Rhs | Section::Ranges => (2..=5).contains(&tokens.len()),
        Section::Bounds => match tokens.first().map(|t| t.to_ascii_uppercase()) {
            Some(t) if ["FR", "MI", "PL", "BV"].contains(&t.as_str()) => tokens.len() == 2 || tokens.len() == 3,
            Some(_) => tokens.len() == 3 || tokens.len() == 4,
            None => false,
        },
        Section::None => true,
    }
}

pub fn parse_mps(text: &str) -> Result<MpsProblem, MpsError> {
    let mut ps = Parser {
        p: MpsProblem::default(),
        row_index: HashMap::new(),
        col_index: HashMap::new(),
        entry_index: HashMap::new(),
    };
    let mut section = Section::None;
    let mut seen_end = false;
    let mut rhs_seen: HashMap<usize, usize> = HashMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let trimmed = raw.trim_end();
        if trimmed.trim().is_empty() || trimmed.starts_with('*') {
            continue;
        }
        if !raw.starts_with(' ') && !raw.starts_with('\t') {
            let mut it = trimmed.split_whitespace();
            let head = it.next().unwrap_or_default().to_ascii_uppercase();
            section = match head.as_str() {
                "NAME" => {
                    ps.p.name = it.collect::<Vec<_>>().join(" ");
                    Section::None
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "RANGES" => Section::Ranges,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => {
                    seen_end = true;
                    break;
                }
                "SOS" | "MARKER" => return Err(MpsError::Unsupported { line, what: head }),
                _ => {
                    return Err(MpsError::Parse {
                        line,
                        msg: format!("unknown section '{head}'"),
                    })
                }
            };
            continue;
        }
        let free: Vec<&str> = trimmed.split_whitespace().collect();
        let fixed_owned;
        let tokens: Vec<&str> = if valid_count(section, &free) {
            free
        } else {
            fixed_owned = fixed_fields(trimmed);
            fixed_owned
                .iter()
                .map(String::as_str)
                .filter(|s| !s.is_empty())
                .collect()
        };
        match section {
            Section::None => {
                return Err(MpsError::Parse {
                    line,
                    msg: "data line outside of a section".into(),
                })
            }
            Section::Rows => {
                let [kind, name] = tokens[..] else {
                    return Err(MpsError::Parse {
                        line,
                        msg: "expected row type and name".into(),
                    });
                };
                let kind = match kind.to_ascii_uppercase().as_str() {
                    "N" => RowType::N,
                    "E" => RowType::E,
                    "L" => RowType::L,
                    "G" => RowType::G,
                    other => {
                        return Err(MpsError::Parse {
                            line,
                            msg: format!("unknown row type '{other}'"),
                        })
                    }
                };
                if ps.row_index.contains_key(name) {
                    return Err(MpsError::Parse {
                        line,
                        msg: format!("row '{name}' declared twice"),
                    });
                }
                let idx = ps.p.rows.len();
                if kind == RowType::N && ps.p.objective.is_none() {
                    ps.p.objective = Some(idx);
                }
                ps.row_index.insert(name.to_string(), idx);
                ps.p.rows.push(RowRecord {
                    name: name.to_string(),
                    kind,
                });
            }
            Section::Columns => {
                if tokens.contains(&"'MARKER'") {
                    return Err(MpsError::Unsupported {
                        line,
                        what: "integer MARKER".into(),
                    });
                }
                if tokens.len() != 3 && tokens.len() != 5 {
                    return Err(MpsError::Parse {
                        line,
                        msg: "expected column row value [row value]".into(),
                    });
                }
                let col = match ps.col_index.get(tokens[0]) {
                    Some(&c) => c,
                    None => {
                        let c = ps.p.columns.len();
                        ps.col_index.insert(tokens[0].to_string(), c);
                        ps.p.columns.push(tokens[0].to_string());
                        c
                    }
                };
                for pair in tokens[1..].chunks(2) {
                    let row = ps.row(pair[0], line)?;
                    let v = parse_num(pair[1], line)?;
                    ps.add_entry(col, row, v, line);
                }
            }
            Section::Rhs => {
                for (row, v) in ps.pairs(&tokens, line)? {
                    if let Some(prev) = rhs_seen.insert(row, ps.p.rhs.len()) {
                        warn!(
                            "line {line}: rhs for '{}' given twice, keeping the last",
                            ps.p.rows[row].name
                        );
                        ps.p.rhs[prev].1 = v;
                        rhs_seen.insert(row, prev);
                    } else {
                        ps.p.rhs.push((row, v));
                    }
                }
            }
            Section::Ranges => {
                for (row, v) in ps.pairs(&tokens, line)? {
                    if ps.p.rows[row].kind == RowType::N {
                        return Err(MpsError::Parse {
                            line,
                            msg: "range on objective row".into(),
                        });
                    }
                    ps.p.ranges.push((row, v));
                }
            }
            Section::Bounds => {
                let kind_tok = tokens[0].to_ascii_uppercase();
                let kind = match kind_tok.as_str() {
                    "UP" => BoundType::Up,
                    "LO" => BoundType::Lo,
                    "FX" => BoundType::Fx,
                    "FR" => BoundType::Fr,
                    "MI" => BoundType::Mi,
                    "PL" => BoundType::Pl,
                    "BV" | "LI" | "UI" | "SC" => {
                        return Err(MpsError::Unsupported {
                            line,
                            what: format!("{kind_tok} bound"),
                        })
                    }
                    other => {
                        return Err(MpsError::Parse {
                            line,
                            msg: format!("unknown bound type '{other}'"),
                        })
                    }
                };
                let needs_value = matches!(kind, BoundType::Up | BoundType::Lo | BoundType::Fx);
                let (col_tok, value) = match (needs_value, tokens.len()) {
                    (true, 4) => (tokens[2], parse_num(tokens[3], line)?),
                    (true, 3) => (tokens[1], parse_num(tokens[2], line)?),
                    (false, 3) => (tokens[2], 0.0),
                    (false, 2) => (tokens[1], 0.0),
                    _ => {
                        return Err(MpsError::Parse {
                            line,
                            msg: "malformed bound".into(),
                        })
                    }
                };
                let col = ps.col(col_tok, line)?;
                ps.p.bounds.push(BoundEntry { kind, col, value });
            }
        }
    }
    if !seen_end {
        return Err(MpsError::MissingEndata);
    }
    if ps.p.objective.is_none() {
        return Err(MpsError::NoObjective);
    }
    Ok(ps.p)
}

pub fn read_mps(mut reader: impl Read) -> Result<MpsProblem> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    Ok(parse_mps(&text)?)
}

/// Parses and lowers the MPS file at `path`.
pub fn load_problem(path: impl AsRef<Path>) -> Result<GeneralFormLP> {
    let text = std::fs::read_to_string(path)?;
    lower_to_general_form(&parse_mps(&text)?)
}

impl MpsProblem {
    pub fn row_count(&self, kind: RowType) -> usize {
        self.rows.iter().filter(|r| r.kind == kind).count()
    }

    /// Constant term implied by an RHS entry on the objective row (`-rhs`, by convention).
    pub fn objective_constant(&self) -> f64 {
        let obj = self.objective.expect("validated at parse time");
        self.rhs.iter().filter(|(r, _)| *r == obj).map(|(_, v)| -v).sum()
    }

    /// Effective `[lo, up]` for every column.
    pub fn column_bounds(&self) -> Vec<(f64, f64)> {
        let mut b = vec![(0.0, f64::INFINITY); self.columns.len()];
        for e in &self.bounds {
            let (lo, up) = &mut b[e.col];
            match e.kind {
                BoundType::Up => {
                    if e.value < 0.0 && *lo == 0.0 {
                        warn!(
                            "negative UP bound on '{}' with default lower bound; making it -inf",
                            self.columns[e.col]
                        );
                        *lo = f64::NEG_INFINITY;
                    }
                    *up = e.value;
                }
                BoundType::Lo => *lo = e.value,
                BoundType::Fx => {
                    *lo = e.value;
                    *up = e.value;
                }
                BoundType::Fr => {
                    *lo = f64::NEG_INFINITY;
                    *up = f64::INFINITY;
                }
                BoundType::Mi => *lo = f64::NEG_INFINITY,
                BoundType::Pl => *up = f64::INFINITY,
            }
        }
        b
    }

    /// `[lo, hi]` activity interval of each constraint row (objective rows get `None`).
    pub fn row_intervals(&self) -> Vec<Option<(f64, f64)>> {
        let mut rhs = vec![0.0; self.rows.len()];
        for &(r, v) in &self.rhs {
            rhs[r] = v;
        }
        let mut range = vec![None; self.rows.len()];
        for &(r, v) in &self.ranges {
            range[r] = Some(v);
        }
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let r = rhs[i];
                let inf = f64::INFINITY;
                match (row.kind, range[i]) {
                    (RowType::N, _) => None,
                    (RowType::E, None) => Some((r, r)),
                    (RowType::E, Some(v)) if v >= 0.0 => Some((r, r + v)),
                    (RowType::E, Some(v)) => Some((r + v, r)),
                    (RowType::L, None) => Some((-inf, r)),
                    (RowType::L, Some(v)) => Some((r - v.abs(), r)),
                    (RowType::G, None) => Some((r, inf)),
                    (RowType::G, Some(v)) => Some((r, r + v.abs())),
                }
            })
            .collect()
    }

    fn row_activities(&self, x: &[f64]) -> Vec<f64> {
        let mut act = vec![0.0; self.rows.len()];
        let mut sorted = self.entries.clone();
        sorted.sort_by_key(|&(c, r, _)| (r, c));
        for (c, r, v) in sorted {
            act[r] += v * x[c];
        }
        act
    }

    /// Largest constraint or bound violation of `x`, straight from MPS semantics.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let act = self.row_activities(x);
        let mut worst = 0.0_f64;
        for (a, iv) in act.iter().zip(self.row_intervals()) {
            if let Some((lo, hi)) = iv {
                if lo == hi {
                    worst = worst.max((a - lo).abs());
                } else {
                    worst = worst.max(lo - a).max(a - hi);
                }
            }
        }
        for (xj, (lo, up)) in x.iter().zip(self.column_bounds()) {
            if lo == up {
                worst = worst.max((xj - lo).abs());
            } else {
                worst = worst.max(lo - xj).max(xj - up);
            }
        }
        worst
    }
}

/// Lowers to `Ax = b, Bx <= d` without adding variables. Constraint rows come first in file
/// order, then one or two bound rows per column. Rows with no nonzeros are dropped after
/// checking that their interval contains zero.
pub fn lower_to_general_form(mps: &MpsProblem) -> Result<GeneralFormLP> {
    let n = mps.columns.len();
    let obj = mps.objective.ok_or(MpsError::NoObjective)?;
    let mut by_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); mps.rows.len()];
    let mut c = vec![0.0; n];
    for &(col, row, v) in &mps.entries {
        if row == obj {
            c[col] += v;
        } else if v != 0.0 {
            by_row[row].push((col, v));
        }
    }
    let constant = mps.objective_constant();
    if constant != 0.0 {
        log::info!(
            "{}: objective constant {constant} is not part of the lowered objective",
            mps.name
        );
    }
    let mut eq: Vec<(usize, usize, f64)> = Vec::new();
    let mut b = Vec::new();
    let mut ineq: Vec<(usize, usize, f64)> = Vec::new();
    let mut d = Vec::new();
    for (i, iv) in mps.row_intervals().into_iter().enumerate() {
        let Some((lo, hi)) = iv else {
            continue;
        };
        let entries = &by_row[i];
        if entries.is_empty() {
            if lo > 0.0 || hi < 0.0 {
                return Err(crate::error::Error::InvalidProblem(format!(
                    "empty row '{}' requires activity in [{lo}, {hi}]",
                    mps.rows[i].name
                )));
            }
            warn!("dropping empty row '{}'", mps.rows[i].name);
            continue;
        }
        if lo == hi {
            let r = b.len();
            eq.extend(entries.iter().map(|&(col, v)| (r, col, v)));
            b.push(lo);
            continue;
        }
        if hi.is_finite() {
            let r = d.len();
            ineq.extend(entries.iter().map(|&(col, v)| (r, col, v)));
            d.push(hi);
        }
        if lo.is_finite() {
            let r = d.len();
            ineq.extend(entries.iter().map(|&(col, v)| (r, col, -v)));
            d.push(-lo);
        }
    }
    for (j, (lo, up)) in mps.column_bounds().into_iter().enumerate() {
        if lo == up {
            let r = b.len();
            eq.push((r, j, 1.0));
            b.push(lo);
            continue;
        }
        if lo.is_finite() {
            let r = d.len();
            ineq.push((r, j, -1.0));
            d.push(-lo);
        }
        if up.is_finite() {
            let r = d.len();
            ineq.push((r, j, 1.0));
            d.push(up);
        }
    }
    let a = SparseMatrix::from_triplets(b.len(), n, &eq);
    let bm = SparseMatrix::from_triplets(d.len(), n, &ineq);
    let name = if mps.name.is_empty() {
        "unnamed".to_string()
    } else {
        mps.name.clone()
    };
    GeneralFormLP::new(name, c, a, b, bm, d)
}
