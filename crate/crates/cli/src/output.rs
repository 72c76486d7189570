//! Deterministic data emission: `#`-prefixed header comments followed by
//! comma-separated rows, floats fixed to 17 significant digits.

use std::fmt::Write as _;

use magnomech::RunConfig;

/// Accumulates one output document in memory so reruns are byte-identical.
pub struct Document {
    buf: String,
}

pub fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

impl Document {
    pub fn new(command: &str, config_path: &str, config: &RunConfig, grid_desc: &str) -> Self {
        let mut buf = String::new();
        let _ = writeln!(buf, "# magnomech {} — {command}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(buf, "# config: {config_path}");
        let _ = writeln!(buf, "# grid: {grid_desc}");
        for (k, v) in &config.resolved {
            let _ = writeln!(buf, "# {k} = {v}");
        }
        Document { buf }
    }

    pub fn comment(&mut self, text: &str) {
        let _ = writeln!(self.buf, "# {text}");
    }

    pub fn columns(&mut self, names: &[&str]) {
        let _ = writeln!(self.buf, "{}", names.join(","));
    }

    pub fn row(&mut self, fields: &[String]) {
        let _ = writeln!(self.buf, "{}", fields.join(","));
    }

    pub fn into_string(self) -> String {
        self.buf
    }
}
