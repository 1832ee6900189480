//! Spec-string grammars: models, procedures and alpha grids.

use std::fs;
use std::path::Path;

use fdrfnr::{DensityEstimator, DensityTable, Family, MixtureModel, NullDensity, ProcedureKind};

use crate::error::{config, Result};

/// `name` or `name(key=value, ...)`; values may themselves contain parentheses.
fn parse_call(text: &str) -> Result<(String, Vec<(String, String)>)> {
    let text = text.trim();
    let Some(open) = text.find('(') else {
        if text.is_empty() {
            return Err(config("empty spec"));
        }
        return Ok((text.to_string(), Vec::new()));
    };
    if !text.ends_with(')') {
        return Err(config(format!("`{text}`: missing closing parenthesis")));
    }
    let name = text[..open].trim().to_string();
    let inner = &text[open + 1..text.len() - 1];
    let mut args = Vec::new();
    for part in split_top_level(inner)? {
        if part.trim().is_empty() {
            continue;
        }
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| config(format!("`{text}`: argument `{part}` is not key=value")))?;
        args.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok((name, args))
}

/// Splits at commas that are not inside parentheses.
pub fn split_top_level(text: &str) -> Result<Vec<String>> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in text.chars() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(config(format!("`{text}`: unbalanced parentheses")));
                }
            }
            ',' if depth == 0 => {
                parts.push(std::mem::take(&mut cur).trim().to_string());
                continue;
            }
            _ => {}
        }
        cur.push(c);
    }
    if depth != 0 {
        return Err(config(format!("`{text}`: unbalanced parentheses")));
    }
    parts.push(cur.trim().to_string());
    Ok(parts)
}

fn only_keys(name: &str, args: &[(String, String)], allowed: &[&str]) -> Result<()> {
    match args.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
        Some((k, _)) => Err(config(format!("{name}: unknown argument `{k}`"))),
        None => Ok(()),
    }
}

fn arg<'a>(args: &'a [(String, String)], key: &str) -> Option<&'a str> {
    args.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
}

pub fn parse_real(field: &str, value: &str) -> Result<f64> {
    let v: f64 = value
        .trim()
        .parse()
        .map_err(|_| config(format!("{field}: `{value}` is not a number")))?;
    if !v.is_finite() {
        return Err(config(format!("{field}: `{value}` is not finite")));
    }
    Ok(v)
}

/// A parsed model together with the text it came from.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    /// Family spec as written, e.g. `ustep(cut=0.5)`.
    pub family_text: String,
    pub pi0: f64,
    pub model: MixtureModel<f64>,
}

impl ModelSpec {
    /// Single-token label used in CSV output, e.g. `ustep(cut=0.5);pi0=0.75`.
    pub fn label(&self) -> String {
        format!("{};pi0={}", self.family_text, self.pi0)
    }

    pub fn null(&self) -> NullDensity {
        NullDensity::of_model(&self.model)
    }

    /// Gaussian location parameter, if any.
    pub fn mu(&self) -> Option<f64> {
        match self.model.family() {
            Family::GaussianLocation { mu } => Some(*mu),
            _ => None,
        }
    }
}

/// Reads a two-column density table (`x,y` or whitespace separated; `#` comments).
pub fn read_density_table(path: &Path) -> Result<DensityTable<f64>> {
    let text = fs::read_to_string(path).map_err(|e| config(format!("ucustom: cannot read {}: {e}", path.display())))?;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        if cols.len() != 2 {
            return Err(config(format!("ucustom: {}:{}: expected two columns", path.display(), i + 1)));
        }
        let field = format!("ucustom {}:{}", path.display(), i + 1);
        xs.push(parse_real(&field, cols[0])?);
        ys.push(parse_real(&field, cols[1])?);
    }
    DensityTable::new(xs, ys).map_err(|e| config(format!("ucustom: {e}")))
}

/// Parses `gaussian(mu=..)`, `usqrt`, `ustep(cut=..)` or `ucustom(file=..)`.
/// Relative table paths are resolved against `base_dir`.
pub fn parse_model(text: &str, pi0: f64, base_dir: &Path) -> Result<ModelSpec> {
    let (name, args) = parse_call(text)?;
    if !(pi0 > 0.0 && pi0 < 1.0) {
        return Err(config(format!("pi0: {pi0} is not in (0,1)")));
    }
    let family = match name.as_str() {
        "gaussian" => {
            only_keys("gaussian", &args, &["mu"])?;
            let mu = arg(&args, "mu").ok_or_else(|| config("gaussian: missing mu"))?;
            Family::GaussianLocation {
                mu: parse_real("gaussian mu", mu)?,
            }
        }
        "usqrt" => {
            only_keys("usqrt", &args, &[])?;
            Family::UniformSqrt
        }
        "ustep" => {
            only_keys("ustep", &args, &["cut"])?;
            let cut = arg(&args, "cut").map_or(Ok(0.5), |v| parse_real("ustep cut", v))?;
            Family::UniformStep { cut }
        }
        "ucustom" => {
            only_keys("ucustom", &args, &["file"])?;
            let file = arg(&args, "file").ok_or_else(|| config("ucustom: missing file"))?;
            Family::UniformCustom(read_density_table(&base_dir.join(file))?)
        }
        other => return Err(config(format!("model: unknown family `{other}`"))),
    };
    let model = MixtureModel::new(pi0, family).map_err(|e| config(format!("model: {e}")))?;
    Ok(ModelSpec {
        family_text: text.trim().to_string(),
        pi0,
        model,
    })
}

/// Parses a label written by [`ModelSpec::label`].
pub fn parse_model_label(label: &str, base_dir: &Path) -> Result<ModelSpec> {
    let (family, pi0) = label
        .rsplit_once(";pi0=")
        .ok_or_else(|| config(format!("model label `{label}` has no pi0")))?;
    parse_model(family, parse_real("pi0", pi0)?, base_dir)
}

/// Parses the `--null` argument of `decide`.
pub fn parse_null(text: &str) -> Result<NullDensity> {
    match text.trim() {
        "uniform" | "unif" => Ok(NullDensity::Uniform),
        "normal" | "gaussian" | "n01" => Ok(NullDensity::StandardNormal),
        other => Err(config(format!("null: unknown null `{other}` (uniform|normal)"))),
    }
}

fn parse_estimator(text: &str, null: NullDensity) -> Result<DensityEstimator<f64>> {
    let (name, args) = parse_call(text)?;
    match name.as_str() {
        "grenander" => {
            only_keys("grenander", &args, &[])?;
            if null != NullDensity::Uniform {
                return Err(config("est: grenander needs a uniform null"));
            }
            Ok(DensityEstimator::Grenander)
        }
        "kde" => {
            only_keys("kde", &args, &["h"])?;
            let bandwidth = match arg(&args, "h") {
                Some(h) => {
                    let h = parse_real("kde h", h)?;
                    if h <= 0.0 {
                        return Err(config("kde h: bandwidth must be positive"));
                    }
                    Some(h)
                }
                None => None,
            };
            Ok(DensityEstimator::Kde { bandwidth })
        }
        "oracle" => {
            only_keys("oracle", &args, &[])?;
            Ok(DensityEstimator::Oracle)
        }
        other => Err(config(format!("est: unknown estimator `{other}`"))),
    }
}

fn default_estimator(null: NullDensity) -> DensityEstimator<f64> {
    match null {
        NullDensity::Uniform => DensityEstimator::Grenander,
        NullDensity::StandardNormal => DensityEstimator::Kde { bandwidth: None },
    }
}

/// A procedure spec string and its parsed kind.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcedureChoice {
    pub label: String,
    pub kind: ProcedureKind<f64>,
}

/// Parses `np`, `oracle`, `trivial`, `bh`, `suncai[(est=..)]` or
/// `datadriven[(est=grenander|kde|kde(h=..)|oracle)]`. Without `est`, the
/// Grenander estimator is used for a uniform null and the kernel estimator
/// otherwise.
pub fn parse_procedure(text: &str, null: NullDensity) -> Result<ProcedureChoice> {
    let (name, args) = parse_call(text)?;
    let estimator = || -> Result<DensityEstimator<f64>> {
        match arg(&args, "est") {
            Some(e) => parse_estimator(e, null),
            None => Ok(default_estimator(null)),
        }
    };
    let kind = match name.as_str() {
        "np" | "oracle" | "trivial" | "bh" => {
            only_keys(&name, &args, &[])?;
            match name.as_str() {
                "np" => ProcedureKind::NpOracle,
                "oracle" => ProcedureKind::OracleRandomized,
                "trivial" => ProcedureKind::Trivial,
                _ => ProcedureKind::BhOracle,
            }
        }
        "suncai" => {
            only_keys(&name, &args, &["est"])?;
            ProcedureKind::SunCai { estimator: estimator()? }
        }
        "datadriven" => {
            only_keys(&name, &args, &["est"])?;
            ProcedureKind::DataDriven { estimator: estimator()? }
        }
        other => return Err(config(format!("procedure: unknown procedure `{other}`"))),
    };
    Ok(ProcedureChoice {
        label: text.trim().to_string(),
        kind,
    })
}

/// Parses a comma-separated procedure list.
pub fn parse_procedures(text: &str, null: NullDensity) -> Result<Vec<ProcedureChoice>> {
    let list: Vec<ProcedureChoice> = split_top_level(text)?
        .iter()
        .filter(|p| !p.is_empty())
        .map(|p| parse_procedure(p, null))
        .collect::<Result<_>>()?;
    if list.is_empty() {
        return Err(config("procedures: empty list"));
    }
    Ok(list)
}

/// Parses `start:stop:step` (inclusive of `stop`) or a comma-separated list.
/// Values must lie in `[0,1]`.
pub fn parse_alphas(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    let alphas = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(config(format!("alphas: `{text}` is not start:stop:step")));
        }
        let (a, b, step) = (
            parse_real("alphas start", parts[0])?,
            parse_real("alphas stop", parts[1])?,
            parse_real("alphas step", parts[2])?,
        );
        if step <= 0.0 || b < a {
            return Err(config(format!("alphas: `{text}` needs start <= stop and step > 0")));
        }
        let count = ((b - a) / step + 1e-9).floor() as usize + 1;
        // round away accumulated binary error so 0.1 + 2*0.1 prints as 0.3
        (0..count).map(|i| ((a + i as f64 * step) * 1e10).round() / 1e10).collect()
    } else {
        text.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| parse_real("alphas", s))
            .collect::<Result<Vec<f64>>>()?
    };
    if alphas.is_empty() {
        return Err(config("alphas: empty grid"));
    }
    if let Some(bad) = alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(config(format!("alphas: {bad} is not in [0,1]")));
    }
    Ok(alphas)
}
