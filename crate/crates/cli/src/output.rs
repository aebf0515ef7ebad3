use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use anyhow::Context;
use serde::Serialize;

/// Buffered command output, written in one piece at the end.
#[derive(Debug, Default)]
pub struct Sink {
    buf: String,
}

/// Resolved configuration as a JSON object tagged with the command name.
pub fn config_value(command: &str, args: &impl Serialize) -> anyhow::Result<serde_json::Value> {
    let mut value = serde_json::to_value(args)?;
    if let serde_json::Value::Object(map) = &mut value {
        map.insert("command".into(), command.into());
    }
    Ok(value)
}

impl Sink {
    /// CSV preamble: the config comment followed by the header row.
    pub fn csv(config: &serde_json::Value, header: &str) -> Self {
        let mut s = Sink::default();
        s.comment(&format!("config: {config}"));
        s.line(header);
        s
    }

    pub fn line(&mut self, text: &str) {
        self.buf.push_str(text);
        self.buf.push('\n');
    }

    pub fn row(&mut self, fields: &[String]) {
        self.line(&fields.join(","));
    }

    pub fn comment(&mut self, text: &str) {
        let _ = writeln!(self.buf, "# {text}");
    }

    pub fn json(value: &impl Serialize) -> anyhow::Result<Self> {
        let mut buf = serde_json::to_string_pretty(value)?;
        buf.push('\n');
        Ok(Sink { buf })
    }

    pub fn finish(self, path: Option<&Path>) -> anyhow::Result<()> {
        match path {
            Some(p) => std::fs::write(p, &self.buf).with_context(|| format!("writing {}", p.display())),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(self.buf.as_bytes())?;
                out.flush()?;
                Ok(())
            }
        }
    }
}

/// Shortest round-trip decimal form.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}
