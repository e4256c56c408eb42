//! Verification results in a stable text and JSON form.

use std::fmt;

/// One checked criterion: a scalar metric compared against a tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub name: String,
    pub metric: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub details: Vec<(String, String)>,
}

impl VerificationReport {
    /// Passes when `metric` is finite and `metric <= tolerance`.
    pub fn check(name: impl Into<String>, metric: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            metric,
            tolerance,
            passed: metric.is_finite() && metric <= tolerance,
            details: Vec::new(),
        }
    }

    /// A criterion that could not be evaluated.
    pub fn failed(name: impl Into<String>, reason: impl fmt::Display) -> Self {
        let mut r = Self::check(name, f64::NAN, 0.0);
        r.details.push(("error".into(), reason.to_string()));
        r
    }

    pub fn with(mut self, key: impl Into<String>, value: impl fmt::Display) -> Self {
        self.details.push((key.into(), value.to_string()));
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = format!(
            "{{\"name\":{},\"metric\":{},\"tolerance\":{},\"passed\":{}",
            json_str(&self.name),
            json_num(self.metric),
            json_num(self.tolerance),
            self.passed
        );
        s.push_str(",\"details\":{");
        for (i, (k, v)) in self.details.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&format!("{}:{}", json_str(k), json_str(v)));
        }
        s.push_str("}}");
        s
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} metric={:.16e} tol={:.16e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.metric,
            self.tolerance
        )?;
        for (k, v) in &self.details {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

/// Reports as a JSON array, one object per line.
pub fn reports_to_json(reports: &[VerificationReport]) -> String {
    let body: Vec<String> = reports.iter().map(|r| format!("  {}", r.to_json())).collect();
    format!("[\n{}\n]\n", body.join(",\n"))
}

/// Numbers keep 17 significant digits; non-finite values become `null`.
pub fn json_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

pub fn json_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_fail_and_nan() {
        assert!(VerificationReport::check("a", 1e-9, 1e-8).passed);
        assert!(!VerificationReport::check("a", 1e-7, 1e-8).passed);
        assert!(!VerificationReport::check("a", f64::NAN, 1.0).passed);
    }

    #[test]
    fn json_shape() {
        let r = VerificationReport::check("x\"y", 0.5, 1.0).with("n", 3);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["name"], "x\"y");
        assert_eq!(v["metric"], 0.5);
        assert_eq!(v["details"]["n"], "3");
        let all: serde_json::Value = serde_json::from_str(&reports_to_json(&[r.clone(), r])).unwrap();
        assert_eq!(all.as_array().unwrap().len(), 2);
    }
}
