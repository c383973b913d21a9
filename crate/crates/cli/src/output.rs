//! Number formatting and JSON shapes shared by the subcommands.

use gerber_shiu::{CMatrix64, ExpPoly, C64};
use serde::Serialize;
use serde_json::{json, Value};

/// Six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.5e}");
    let mag: i32 = sci[sci.find('e').map_or(sci.len(), |i| i + 1)..].parse().unwrap_or(0);
    if (-5..=6).contains(&mag) {
        let decimals = (5 - mag).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.5e}")
    }
}

pub fn complex_text(z: C64) -> String {
    if z.im == 0.0 {
        sig6(z.re)
    } else if z.im > 0.0 {
        format!("{}+{}i", sig6(z.re), sig6(z.im))
    } else {
        format!("{}-{}i", sig6(z.re), sig6(-z.im))
    }
}

pub fn matrix_text(m: &CMatrix64) -> String {
    let rows: Vec<String> =
        (0..m.dim()).map(|i| (0..m.dim()).map(|j| complex_text(m[(i, j)])).collect::<Vec<_>>().join(", ")).collect();
    format!("[[{}]]", rows.join("], ["))
}

#[derive(Serialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

pub fn complex_json(z: C64) -> ComplexJson {
    ComplexJson { re: z.re, im: z.im }
}

pub fn complex_list(zs: &[C64]) -> Vec<ComplexJson> {
    zs.iter().map(|&z| complex_json(z)).collect()
}

/// `[{coeff, rate, power}, ...]` for `sum coeff x^power e^(-rate x)`.
pub fn terms_json(f: &ExpPoly<f64>) -> Value {
    Value::Array(
        f.terms()
            .iter()
            .map(|t| json!({ "coeff": complex_json(t.coeff), "rate": complex_json(t.rate), "power": t.power }))
            .collect(),
    )
}

/// Parses `start:stop:step` into the grid points `start, start + step, ...`
/// up to `stop` inclusive.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid `{text}` is not start:stop:step"));
    }
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("grid `{text}`: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !(start.is_finite() && stop.is_finite() && step > 0.0 && step.is_finite()) || start < 0.0 || stop < start {
        return Err(format!("grid `{text}` needs 0 <= start <= stop and step > 0"));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|k| start + k as f64 * step).collect())
}

pub fn parse_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|p| {
            let x = p.trim().parse::<f64>().map_err(|e| format!("list `{text}`: {e}"))?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(format!("list `{text}`: non-finite value"))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(0.8043123456), "0.804312");
        assert_eq!(sig6(2.06411520809), "2.06412");
        assert_eq!(sig6(0.0806231285), "0.0806231");
        assert_eq!(sig6(3.90908733), "3.90909");
        assert_eq!(sig6(1.0), "1.00000");
        assert_eq!(sig6(-0.00861), "-0.00861000");
        assert_eq!(sig6(4.4e-16), "4.40000e-16");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(0.9999999999999998), "1.00000");
        assert_eq!(sig6(9.999996), "10.0000");
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("0:0.3:0.1").unwrap().len(), 4);
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert_eq!(parse_list("0.5, 2,5").unwrap(), vec![0.5, 2.0, 5.0]);
        assert!(parse_list("a").is_err());
    }
}
