use num_complex::Complex64;
use std::path::PathBuf;
use std::sync::Arc;

use super::CliError;
use crate::field::ComplexField;
use crate::nevanlinna::{MeromorphicHandle, Weierstrass};

/// Complex literal such as `2`, `-i`, `2i` or `1.5-0.25i`.
pub fn parse_complex(text: &str) -> Result<Complex64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("`{text}` is not a complex number");
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let re = if re.is_empty() { 0.0 } else { re.parse::<f64>().map_err(|_| bad())? };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => v.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

/// `x,y` as a complex number.
pub fn parse_point(flag: &str, text: &str) -> Result<Complex64, CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [x, y] => match (x.parse::<f64>(), y.parse::<f64>()) {
            (Ok(x), Ok(y)) => Ok(Complex64::new(x, y)),
            _ => Err(CliError::Usage(format!("{flag} expects `x,y`, got `{text}`"))),
        },
        _ => Err(CliError::Usage(format!("{flag} expects `x,y`, got `{text}`"))),
    }
}

pub fn parse_list(flag: &str, text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("{flag}: `{t}` is not a number"))))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum FunctionSpec {
    Identity,
    Exp,
    Sin,
    Wp(Complex64, Complex64),
    Grid(PathBuf),
}

/// `id`, `exp`, `sin`, `builtin:NAME`, `wp`, `wp:P1,P2` or `G:PATH`.
pub fn parse_function(text: &str) -> Result<FunctionSpec, CliError> {
    let builtin = text.strip_prefix("builtin:").unwrap_or(text);
    match builtin {
        "id" | "identity" => return Ok(FunctionSpec::Identity),
        "exp" => return Ok(FunctionSpec::Exp),
        "sin" => return Ok(FunctionSpec::Sin),
        "wp" => return Ok(FunctionSpec::Wp(Complex64::new(2.0, 0.0), Complex64::new(0.0, 2.0))),
        _ => {}
    }
    if let Some(path) = text.strip_prefix("G:") {
        return Ok(FunctionSpec::Grid(PathBuf::from(path)));
    }
    if let Some(periods) = text.strip_prefix("wp:") {
        let parts: Vec<&str> = periods.split(',').collect();
        if let [p1, p2] = parts.as_slice() {
            let p1 = parse_complex(p1).map_err(|e| CliError::Usage(format!("--function: {e}")))?;
            let p2 = parse_complex(p2).map_err(|e| CliError::Usage(format!("--function: {e}")))?;
            if (p1.conj() * p2).im.abs() < 1e-12 {
                return Err(CliError::Usage("--function: wp periods must be independent over R".into()));
            }
            return Ok(FunctionSpec::Wp(p1, p2));
        }
    }
    Err(CliError::Usage(format!(
        "--function must be id, exp, sin, builtin:NAME, wp[:P1,P2] or G:PATH, got `{text}`"
    )))
}

fn load_grid(path: &PathBuf) -> Result<Arc<ComplexField>, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::Usage(format!("--function G:{}: {e}", path.display())))?;
    ComplexField::read_csv(file)
        .map(Arc::new)
        .map_err(|e| CliError::Usage(format!("--function G:{}: {e}", path.display())))
}

impl FunctionSpec {
    pub fn handle(&self, lattice_cutoff: f64) -> Result<MeromorphicHandle, CliError> {
        Ok(match self {
            FunctionSpec::Identity => MeromorphicHandle::identity(),
            FunctionSpec::Exp => MeromorphicHandle::exp(),
            FunctionSpec::Sin => MeromorphicHandle::sin(),
            FunctionSpec::Wp(p1, p2) => MeromorphicHandle::weierstrass(Weierstrass::new(*p1, *p2, lattice_cutoff)),
            FunctionSpec::Grid(path) => {
                let grid = load_grid(path)?;
                MeromorphicHandle::entire("G", move |z| grid.bicubic(z).unwrap_or(Complex64::new(f64::NAN, f64::NAN)), None)
            }
        })
    }

    /// Entire evaluator for sampling; grid functions are NaN off their grid.
    pub fn entire(&self) -> Result<Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>, CliError> {
        Ok(match self {
            FunctionSpec::Identity => Arc::new(|z| z),
            FunctionSpec::Exp => Arc::new(|z: Complex64| z.exp()),
            FunctionSpec::Sin => Arc::new(|z: Complex64| z.sin()),
            FunctionSpec::Wp(..) => return Err(CliError::Usage("this subcommand needs an entire function".into())),
            FunctionSpec::Grid(path) => {
                let grid = load_grid(path)?;
                Arc::new(move |z| grid.bicubic(z).unwrap_or(Complex64::new(f64::NAN, f64::NAN)))
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        let c = Complex64::new;
        assert_eq!(parse_complex("2").unwrap(), c(2.0, 0.0));
        assert_eq!(parse_complex("2i").unwrap(), c(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("1.5-0.25i").unwrap(), c(1.5, -0.25));
        assert_eq!(parse_complex("1e-3+2e+1i").unwrap(), c(1e-3, 20.0));
        assert!(parse_complex("two").is_err());
    }

    #[test]
    fn function_names() {
        assert_eq!(parse_function("builtin:exp").unwrap(), FunctionSpec::Exp);
        assert_eq!(
            parse_function("wp:2,2i").unwrap(),
            FunctionSpec::Wp(Complex64::new(2.0, 0.0), Complex64::new(0.0, 2.0))
        );
        assert!(parse_function("wp:2,4").is_err());
        assert!(parse_function("cosh").is_err());
    }
}
