//! The `--symbol` mini-grammar: `heat:<t>`, `power:<a>`, `table:<path>`.

use std::path::Path;

use hermult_core::{MultiIndex, Symbol};

use crate::error::CliError;

pub fn parse_symbol(spec: &str, n: usize) -> Result<Symbol, CliError> {
    let (kind, arg) = spec
        .split_once(':')
        .ok_or_else(|| CliError::Config(format!("symbol '{spec}' is not of the form kind:argument")))?;
    let number = || {
        arg.trim()
            .parse::<f64>()
            .map_err(|_| CliError::Config(format!("symbol parameter '{arg}' is not a number")))
    };
    match kind {
        "heat" => Ok(Symbol::heat(number()?)?),
        "power" => Ok(Symbol::power(number()?)?),
        "table" => read_table(Path::new(arg), n),
        other => Err(CliError::Config(format!("unknown symbol kind '{other}' (expected heat, power or table)"))),
    }
}

/// A CSV with a header row and columns `ν₁, …, ν_n, value`.
fn read_table(path: &Path, n: usize) -> Result<Symbol, CliError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let mut entries = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let row = line + 2;
        if record.len() != n + 1 {
            return Err(CliError::Config(format!(
                "{}:{row}: expected {} columns for n = {n}, found {}",
                path.display(),
                n + 1,
                record.len()
            )));
        }
        let bad = |field: &str| CliError::Config(format!("{}:{row}: cannot parse '{field}'", path.display()));
        let nu = record
            .iter()
            .take(n)
            .map(|f| f.parse::<u32>().map_err(|_| bad(f)))
            .collect::<Result<Vec<_>, _>>()?;
        let value = record[n].parse::<f64>().map_err(|_| bad(&record[n]))?;
        entries.push((MultiIndex::new(nu)?, value));
    }
    Ok(Symbol::table(entries)?)
}
