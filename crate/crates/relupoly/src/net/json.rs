//! Network JSON: `{"architecture": [...], "layers": [{"W": [[...]], "b": [...]}, ...]}`.

use serde::{Deserialize, Serialize};

use super::{Architecture, Layer, Parameter};
use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, Matrix, Rational};

/// A scalar written either as a string (`"p/q"` or a decimal) or a JSON number.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Text(String),
    Int(i64),
    Float(f64),
}

impl Scalar {
    fn to_rational(&self) -> Result<Rational> {
        match self {
            Scalar::Text(s) => parse_rational(s),
            Scalar::Int(i) => Ok(crate::exact::rational::int(*i)),
            // Shortest round-trip decimal, read exactly.
            Scalar::Float(f) => parse_rational(&format!("{f:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerJson {
    #[serde(rename = "W")]
    pub w: Vec<Vec<Scalar>>,
    pub b: Vec<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkJson {
    pub architecture: Vec<usize>,
    pub layers: Vec<LayerJson>,
}

impl NetworkJson {
    pub fn to_parameter(&self) -> Result<Parameter> {
        let arch = Architecture::new(self.architecture.clone())?;
        if self.layers.len() != arch.0.len() - 1 {
            return Err(Error::Shape(format!(
                "architecture {arch} needs {} layers, found {}",
                arch.0.len() - 1,
                self.layers.len()
            )));
        }
        let mut layers = Vec::with_capacity(self.layers.len());
        for (l, lj) in self.layers.iter().enumerate() {
            let cols = arch.0[l];
            let rows =
                lj.w.iter()
                    .map(|r| {
                        if r.len() != cols {
                            return Err(Error::Shape(format!(
                                "layer {}: row of length {} (expected {cols})",
                                l + 1,
                                r.len()
                            )));
                        }
                        r.iter().map(Scalar::to_rational).collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
            let b = lj.b.iter().map(Scalar::to_rational).collect::<Result<Vec<_>>>()?;
            layers.push(Layer { w: Matrix::from_rows(cols, rows), b });
        }
        Parameter::new(arch, layers)
    }

    pub fn from_parameter(p: &Parameter) -> Self {
        let text = |q: &Rational| Scalar::Text(format_rational(q));
        NetworkJson {
            architecture: p.arch.0.clone(),
            layers: p
                .layers
                .iter()
                .map(|layer| LayerJson {
                    w: layer.w.rows_vec().iter().map(|r| r.iter().map(text).collect()).collect(),
                    b: layer.b.iter().map(text).collect(),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::frac;

    #[test]
    fn parses_mixed_scalars() {
        let s = r#"{"architecture":[2,1,1],"layers":[{"W":[["1/2", 0.25]],"b":[-1]},{"W":[["-3"]],"b":["0.5"]}]}"#;
        let p = Parameter::from_json_str(s).unwrap();
        assert_eq!(p.w(1)[(0, 0)], frac(1, 2));
        assert_eq!(p.w(1)[(0, 1)], frac(1, 4));
        assert_eq!(p.b(2)[0], frac(1, 2));
        let back = Parameter::from_json_str(&p.to_json_string()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn rejects_bad_shapes() {
        let s = r#"{"architecture":[2,1,1],"layers":[{"W":[["1"]],"b":["0"]},{"W":[["1"]],"b":["0"]}]}"#;
        assert!(Parameter::from_json_str(s).is_err());
        let s = r#"{"architecture":[2,1,1],"layers":[{"W":[["1","x"]],"b":["0"]},{"W":[["1"]],"b":["0"]}]}"#;
        assert!(Parameter::from_json_str(s).is_err());
    }
}
