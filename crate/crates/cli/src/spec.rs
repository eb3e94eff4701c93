//! Model specifications: `ellipsoid:A:B:L`, `s1xs2:N`,
//! `random:[SEED:]N:DENSITY`, `unit`, or a path to a complex file.

use std::path::Path;

use anyhow::{Context, Result};
use ech_calc::homalg::GradedComplex;
use ech_calc::{io, models, rational, Error};

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Ellipsoid {
        a: ech_calc::Rational,
        b: ech_calc::Rational,
        l: ech_calc::Rational,
    },
    S1xS2 {
        depth: usize,
    },
    Random {
        seed: Option<u64>,
        n: usize,
        density: f64,
    },
    Unit,
    File(String),
}

fn parse_err(spec: &str, what: &str) -> Error {
    Error::Parse(format!("model spec {spec:?}: {what}"))
}

impl ModelSpec {
    pub fn parse(spec: &str) -> Result<Self, Error> {
        let parts: Vec<&str> = spec.split(':').collect();
        let int = |s: &str, what: &str| s.trim().parse::<usize>().map_err(|_| parse_err(spec, what));
        match parts.as_slice() {
            ["ellipsoid", a, b, l] => Ok(ModelSpec::Ellipsoid {
                a: rational::parse(a)?,
                b: rational::parse(b)?,
                l: rational::parse(l)?,
            }),
            ["ellipsoid", ..] => Err(parse_err(spec, "expected ellipsoid:A:B:L")),
            ["s1xs2", n] => Ok(ModelSpec::S1xS2 {
                depth: int(n, "depth is not a count")?,
            }),
            ["s1xs2", ..] => Err(parse_err(spec, "expected s1xs2:N")),
            ["random", rest @ ..] if rest.len() == 2 || rest.len() == 3 => {
                let (seed, n, d) = match rest {
                    [s, n, d] => (Some(s.trim().parse::<u64>().map_err(|_| parse_err(spec, "bad seed"))?), n, d),
                    [n, d] => (None, n, d),
                    _ => unreachable!(),
                };
                let density: f64 = d.trim().parse().map_err(|_| parse_err(spec, "bad density"))?;
                if !(0.0..=1.0).contains(&density) {
                    return Err(parse_err(spec, "density must lie in [0, 1]"));
                }
                Ok(ModelSpec::Random {
                    seed,
                    n: int(n, "bad generator count")?,
                    density,
                })
            }
            ["random", ..] => Err(parse_err(spec, "expected random:[SEED:]N:DENSITY")),
            ["unit"] => Ok(ModelSpec::Unit),
            _ => Ok(ModelSpec::File(spec.to_string())),
        }
    }

    pub fn build(&self, default_seed: u64) -> Result<GradedComplex> {
        Ok(match self {
            ModelSpec::Ellipsoid { a, b, l } => models::ellipsoid(*a, *b, *l)?.complex,
            ModelSpec::S1xS2 { depth } => models::s1_x_s2(*depth)?.complex,
            ModelSpec::Random { seed, n, density } => models::random_model(seed.unwrap_or(default_seed), *n, *density)?,
            ModelSpec::Unit => models::unit(),
            ModelSpec::File(path) => io::read_complex(Path::new(path)).with_context(|| format!("reading {path}"))?,
        })
    }
}

pub fn load(spec: &str, seed: u64) -> Result<GradedComplex> {
    ModelSpec::parse(spec)?.build(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn specs() {
        assert!(matches!(ModelSpec::parse("ellipsoid:1:141421/100000:3").unwrap(), ModelSpec::Ellipsoid { .. }));
        assert_eq!(ModelSpec::parse("s1xs2:4").unwrap(), ModelSpec::S1xS2 { depth: 4 });
        assert_eq!(
            ModelSpec::parse("random:7:10:0.3").unwrap(),
            ModelSpec::Random { seed: Some(7), n: 10, density: 0.3 }
        );
        assert_eq!(
            ModelSpec::parse("random:10:0.3").unwrap(),
            ModelSpec::Random { seed: None, n: 10, density: 0.3 }
        );
        assert_eq!(ModelSpec::parse("x.json").unwrap(), ModelSpec::File("x.json".into()));
        assert!(ModelSpec::parse("ellipsoid:1:2").is_err());
        assert!(ModelSpec::parse("random:1:2:3:4").is_err());
        assert!(ModelSpec::parse("random:5:1.5").is_err());
        assert!(ModelSpec::parse("s1xs2:-1").is_err());
    }
}
