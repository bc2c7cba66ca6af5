//! What a run produced, before it is written anywhere.

use std::fmt::Write as _;

use sfwm_core::spectral::Jsa;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Number(f64),
    Text(String),
}

impl Cell {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            Cell::Number(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Number(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// How to draw a table: `y` columns against column `x`, or, with `group`,
/// one curve per distinct label of that column.
#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x: usize,
    pub y: Vec<usize>,
    pub group: Option<usize>,
    pub x_label: String,
    pub y_label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub plot: Option<Plot>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            plot: None,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn with_plot(mut self, plot: Plot) -> Self {
        self.plot = Some(plot);
        self
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric column by header; `None` if absent or not all numbers.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let index = self.column_index(name)?;
        self.rows.iter().map(|row| row[index].as_number()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Derived {
    pub name: String,
    pub value: f64,
    pub unit: String,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub command: String,
    pub config_echo: String,
    pub derived: Vec<Derived>,
    pub tables: Vec<Table>,
    pub warnings: Vec<String>,
    /// Set by `jsa-dump`.
    pub jsa: Option<Jsa>,
}

impl RunReport {
    pub fn new(command: &str, config_echo: String) -> Self {
        RunReport {
            command: command.to_string(),
            config_echo,
            derived: Vec::new(),
            tables: Vec::new(),
            warnings: Vec::new(),
            jsa: None,
        }
    }

    pub fn derive(&mut self, name: &str, value: f64, unit: &str) {
        self.derived.push(Derived {
            name: name.to_string(),
            value,
            unit: unit.to_string(),
        });
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.derived.iter().find(|d| d.name == name).map(|d| d.value)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        let message = message.into();
        if !self.warnings.contains(&message) {
            self.warnings.push(message);
        }
    }

    /// Plain-text summary: derived constants, warnings, then the echoed
    /// configuration.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# sfwm {}", self.command);
        let _ = writeln!(out, "\n## derived");
        let width = self.derived.iter().map(|d| d.name.len()).max().unwrap_or(0);
        for d in &self.derived {
            let _ = writeln!(out, "{:width$}  {:<24?} {}", d.name, d.value, d.unit);
        }
        let _ = writeln!(out, "\n## warnings");
        if self.warnings.is_empty() {
            let _ = writeln!(out, "none");
        }
        for w in &self.warnings {
            let _ = writeln!(out, "- {w}");
        }
        let _ = writeln!(out, "\n## tables");
        for t in &self.tables {
            let _ = writeln!(out, "{} ({} rows): {}", t.name, t.rows.len(), t.columns.join(", "));
        }
        let _ = writeln!(out, "\n## config\n{}", self.config_echo);
        out
    }
}
