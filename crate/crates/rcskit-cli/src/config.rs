//! Key-value config files: `key = value` lines, `#` comments, unknown keys
//! rejected.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use rcskit_core::dsp::ClutterEcho;

#[derive(Debug)]
pub struct Config {
    path: String,
    entries: BTreeMap<String, (usize, String)>,
    consumed: std::cell::RefCell<Vec<String>>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, path: &str) -> Result<Self, String> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("{path}:{line_no}: expected key = value, got {raw:?}"))?;
            let key = key.trim().to_string();
            if entries.contains_key(&key) {
                return Err(format!("{path}:{line_no}: duplicate key {key:?}"));
            }
            entries.insert(key, (line_no, value.trim().to_string()));
        }
        Ok(Config {
            path: path.to_string(),
            entries,
            consumed: Default::default(),
        })
    }

    fn take(&self, key: &str) -> Option<&(usize, String)> {
        self.consumed.borrow_mut().push(key.to_string());
        self.entries.get(key)
    }

    pub fn f64(&self, key: &str) -> Result<f64, String> {
        let (line, value) = self
            .take(key)
            .ok_or_else(|| format!("{}: missing key {key:?}", self.path))?;
        value
            .parse()
            .map_err(|e| format!("{}:{line}: bad number for {key}: {e}", self.path))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, String> {
        match self.take(key) {
            None => Ok(default),
            Some((line, value)) => value
                .parse()
                .map_err(|e| format!("{}:{line}: bad number for {key}: {e}", self.path)),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, String> {
        match self.take(key) {
            None => Ok(default),
            Some((line, value)) => value
                .parse()
                .map_err(|e| format!("{}:{line}: bad integer for {key}: {e}", self.path)),
        }
    }

    /// Echo list: `delay_ns:re:im` triples separated by `;`.
    pub fn echoes(&self, key: &str) -> Result<Vec<ClutterEcho>, String> {
        let Some((line, value)) = self.take(key) else {
            return Ok(Vec::new());
        };
        let mut echoes = Vec::new();
        for part in value.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let fields: Vec<&str> = part.split(':').collect();
            if fields.len() != 3 {
                return Err(format!(
                    "{}:{line}: echo {part:?} must be delay_ns:re:im",
                    self.path
                ));
            }
            let nums: Result<Vec<f64>, _> = fields.iter().map(|f| f.trim().parse()).collect();
            let nums = nums.map_err(|e| format!("{}:{line}: bad echo number: {e}", self.path))?;
            echoes.push(ClutterEcho {
                delay_s: nums[0] * 1e-9,
                amplitude: Complex64::new(nums[1], nums[2]),
            });
        }
        Ok(echoes)
    }

    /// Error out if the file holds keys this command never read.
    pub fn reject_unknown(&self) -> Result<(), String> {
        let consumed = self.consumed.borrow();
        for (key, (line, _)) in &self.entries {
            if !consumed.iter().any(|c| c == key) {
                return Err(format!("{}:{line}: unknown key {key:?}", self.path));
            }
        }
        Ok(())
    }

    /// Canonical `key = value` text of the parsed entries, for hashing.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        for (key, (_, value)) in &self.entries {
            out.push_str(&format!("{key} = {value}\n"));
        }
        out
    }
}
