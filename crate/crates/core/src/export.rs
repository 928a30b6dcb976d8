//! Plain CSV output helpers.

use std::io::{self, Write};

/// Shortest round-trip decimal form of `v`.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}

/// Writes each line prefixed with `# `.
pub fn write_metadata<W: Write, S: AsRef<str>>(w: &mut W, lines: &[S]) -> io::Result<()> {
    for line in lines {
        writeln!(w, "# {}", line.as_ref())?;
    }
    Ok(())
}
