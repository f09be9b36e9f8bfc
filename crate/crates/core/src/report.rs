//! Byte-stable number formatting and small CSV helpers shared by every emitter.

/// 17 significant digits in scientific notation; `-0` is printed as `0`.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0.0000000000000000e0".to_string();
    }
    format!("{x:.16e}")
}

/// Rounds to 17 significant digits so JSON output matches the CSV text.
pub fn round17(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    fmt_f64(x).parse().unwrap_or(x)
}

pub fn csv_line<I, S>(cells: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut line = cells.into_iter().map(|c| c.as_ref().to_string()).collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}
