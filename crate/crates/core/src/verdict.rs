use std::fmt;

use serde::Serialize;

/// Outcome of one named check. `margin` is positive when the check passes
/// with room to spare, in the units of the quantity being compared.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub margin: f64,
    pub detail: String,
}

impl Verdict {
    pub fn new(name: impl Into<String>, pass: bool, margin: f64, detail: impl Into<String>) -> Self {
        Verdict {
            name: name.into(),
            pass,
            margin,
            detail: detail.into(),
        }
    }

    /// Pass iff `value <= limit`, margin `limit - value`.
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64, detail: impl Into<String>) -> Self {
        Verdict::new(name, value <= limit, limit - value, detail)
    }

    /// Pass iff `value > limit`, margin `value - limit`.
    pub fn above(name: impl Into<String>, value: f64, limit: f64, detail: impl Into<String>) -> Self {
        Verdict::new(name, value > limit, value - limit, detail)
    }

    pub fn label(&self) -> &'static str {
        if self.pass {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

/// `check,verdict,margin,detail`, one line per verdict.
pub fn verdicts_csv(verdicts: &[Verdict]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut put = |rec: [String; 4]| w.write_record(&rec).expect("writing to memory");
    put(["check".into(), "verdict".into(), "margin".into(), "detail".into()]);
    for v in verdicts {
        put([
            v.name.clone(),
            v.label().into(),
            format!("{:.9e}", v.margin),
            v.detail.clone(),
        ]);
    }
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is utf-8")
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} (margin {:.6e}) {}",
            self.label(),
            self.name,
            self.margin,
            self.detail
        )
    }
}
