//! One-shot decisions on a user-supplied list of observations.

use std::fs;
use std::path::Path;

use fdrfnr::{Branch, NullDensity, ProcedureKind, ProcedureSpec, RandomizationTrace, Setting};

use crate::error::{config, runtime, HarnessError, Result};
use crate::seed::child_rng;
use crate::spec::{ModelSpec, ProcedureChoice};

/// Observations with their 1-based line numbers. Blank lines are skipped.
pub fn read_observations(path: &Path) -> Result<Vec<(usize, f64)>> {
    let text = fs::read_to_string(path).map_err(|e| runtime(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| {
            HarnessError::Runtime(format!("{}: line {}: `{line}` is not a number", path.display(), i + 1))
        })?;
        if !v.is_finite() {
            return Err(runtime(format!("{}: line {}: `{line}` is not finite", path.display(), i + 1)));
        }
        out.push((i + 1, v));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionRow {
    pub index: usize,
    pub x: f64,
    pub w_hat: Option<f64>,
    pub reject: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecideOutput {
    pub rows: Vec<DecisionRow>,
    pub trace: Option<RandomizationTrace<f64>>,
}

impl DecideOutput {
    pub fn rejections(&self) -> usize {
        self.rows.iter().filter(|r| r.reject).count()
    }
}

/// Applies one procedure to the observations.
///
/// `model` is needed by the oracle rules (`np`, `oracle`, `est=oracle`); its
/// null must agree with `null`.
pub fn run_decide(
    obs: &[(usize, f64)],
    choice: &ProcedureChoice,
    alpha: f64,
    pi0: f64,
    null: NullDensity,
    model: Option<&ModelSpec>,
    seed: u64,
) -> Result<DecideOutput> {
    if let Some(m) = model {
        if m.null() != null {
            return Err(config("model: its null density does not match --null"));
        }
        if m.pi0 != pi0 {
            return Err(config("model: pi0 does not match --pi0"));
        }
    }
    if !(pi0 > 0.0 && pi0 < 1.0) {
        return Err(config(format!("pi0: {pi0} is not in (0,1)")));
    }
    let setting = Setting {
        pi0,
        null,
        model: model.map(|m| m.model.clone()),
    };
    let prepared = ProcedureSpec {
        kind: choice.kind,
        alpha,
    }
    .prepare(&setting)
    .map_err(|e| config(format!("procedure `{}`: {e}", choice.label)))?;
    let x: Vec<f64> = obs.iter().map(|o| o.1).collect();
    let w: Option<Vec<f64>> = match (choice.kind, model) {
        (ProcedureKind::NpOracle | ProcedureKind::OracleRandomized, Some(m)) => Some(
            x.iter()
                .map(|v| m.model.lfdr(*v))
                .collect::<fdrfnr::Result<Vec<f64>>>()
                .map_err(runtime)?,
        ),
        _ => prepared.w_hat(&x).map_err(runtime)?.map(|w| w.w_hat),
    };
    let mut rng = child_rng(seed, 0, 0, 0);
    let d = prepared.apply(&x, &mut rng).map_err(runtime)?;
    let rows = obs
        .iter()
        .zip(&d.reject)
        .enumerate()
        .map(|(i, ((index, x), reject))| DecisionRow {
            index: *index,
            x: *x,
            w_hat: w.as_ref().map(|w| w[i]),
            reject: *reject,
        })
        .collect();
    Ok(DecideOutput { rows, trace: d.trace })
}

fn pair(p: Option<(f64, f64)>) -> String {
    p.map_or("-".into(), |(a, b)| format!("{a}:{b}"))
}

/// CSV body plus `#` footer lines with the rejection count and trace.
pub fn decide_text(out: &DecideOutput) -> Result<String> {
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(["index", "x", "w_hat", "reject"])?;
        for r in &out.rows {
            w.write_record([
                r.index.to_string(),
                r.x.to_string(),
                r.w_hat.map_or(String::new(), |v| v.to_string()),
                u8::from(r.reject).to_string(),
            ])?;
        }
        w.flush()?;
    }
    let mut text = String::from_utf8(buf).map_err(runtime)?;
    text.push_str(&format!("# R={}\n", out.rejections()));
    match &out.trace {
        None => text.push_str("# trace=none\n"),
        Some(t) => {
            let branch = match t.branch {
                Some(Branch::Lower) => "lower",
                Some(Branch::Upper) => "upper",
                None => "-",
            };
            text.push_str(&format!(
                "# trace branch={branch} p_lower={} levels={} thresholds={} tie_draws={}\n",
                t.branch_prob,
                pair(t.levels),
                pair(t.thresholds),
                t.tie_draws
            ));
            if !t.knots.is_empty() {
                let knots: Vec<String> = t.knots.iter().map(|(s, v)| format!("{s}:{v}")).collect();
                text.push_str(&format!("# knots {}\n", knots.join(" ")));
            }
        }
    }
    Ok(text)
}
