//! Characterization library: CSV with header `kind,critical_bits`.
//! Lines starting with `#` are comments.

use tmrdep_core::ComponentLibrary;

use crate::error::{Error, Result};

pub fn parse_library(text: &str) -> Result<ComponentLibrary> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| Error::Library(e.to_string()))?;
    if header.iter().collect::<Vec<_>>() != ["kind", "critical_bits"] {
        return Err(Error::Library(format!(
            "header must be `kind,critical_bits`, found `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut lib = ComponentLibrary::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Library(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let kind = &record[0];
        if kind.is_empty() {
            return Err(Error::Library(format!("line {line}: empty kind")));
        }
        let bits: u64 = record[1].parse().map_err(|_| {
            Error::Library(format!(
                "line {line}: critical_bits `{}` is not a nonnegative integer",
                &record[1]
            ))
        })?;
        if lib.critical_bits(kind).is_some() {
            return Err(Error::Library(format!("line {line}: duplicate kind `{kind}`")));
        }
        lib.insert(kind, bits);
    }
    Ok(lib)
}

pub fn write_library(lib: &ComponentLibrary) -> String {
    let mut out = String::from("kind,critical_bits\n");
    for (kind, bits) in lib.iter() {
        out.push_str(&format!("{kind},{bits}\n"));
    }
    out
}
