//! Run reports: a human-readable rendering for stdout and a `key<TAB>value`
//! machine rendering for files. Values are preformatted strings, so both
//! renderings are byte-deterministic.

use cognid::features::format_sig12;

pub struct Report {
    title: String,
    fields: Vec<(String, String)>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report {
            title: title.into(),
            fields: Vec::new(),
        }
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.fields.push((key.into(), value.into()));
    }

    pub fn push_float(&mut self, key: impl Into<String>, value: f64) {
        self.fields.push((key.into(), format_sig12(value)));
    }

    pub fn push_count(&mut self, key: impl Into<String>, value: usize) {
        self.fields.push((key.into(), value.to_string()));
    }

    #[cfg(test)]
    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render_human(&self) -> String {
        let width = self
            .fields
            .iter()
            .map(|(k, _)| k.len())
            .max()
            .unwrap_or(0);
        let mut out = format!("{}\n", self.title);
        for (key, value) in &self.fields {
            out.push_str(&format!("  {key:width$}  {value}\n"));
        }
        out
    }

    pub fn render_machine(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.fields {
            out.push_str(key);
            out.push('\t');
            out.push_str(value);
            out.push('\n');
        }
        out
    }
}
