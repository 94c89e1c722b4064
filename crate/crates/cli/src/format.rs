use std::fmt::Write as _;

/// 17 significant digits, identical on every platform.
pub fn real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// `# isoqec <version> key=value ...`
pub fn provenance(command: &str, fields: &[(&str, String)]) -> String {
    let mut line = format!("# isoqec {} command={command}", env!("CARGO_PKG_VERSION"));
    for (k, v) in fields {
        let _ = write!(line, " {k}={v}");
    }
    line
}

pub fn csv_row<I, S>(cells: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    cells.into_iter().map(|c| c.as_ref().to_owned()).collect::<Vec<_>>().join(",")
}
