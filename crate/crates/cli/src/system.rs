//! Flags describing a weight sequence and a degree pattern.

use std::error::Error;
use std::path::PathBuf;

use clap::Args;
use num_rational::BigRational;

use wandering::pattern::DegreePattern;
use wandering::scalar::{parse_rational, Regime};
use wandering::weights::{override_block, WeightSequence, WeightSpec};

#[derive(Args, Clone, Debug)]
pub struct SystemArgs {
    /// Dirichlet exponent, as an integer, decimal or `p/q`.
    #[arg(long, default_value = "-16", allow_hyphen_values = true)]
    pub alpha: String,
    /// JSON weight description; replaces --alpha.
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// Dirichlet exponent of a base sequence that receives the twelve matrix
    /// weights of the sequence above.
    #[arg(long, allow_hyphen_values = true)]
    pub override_base: Option<String>,
    #[arg(long, default_value_t = 6)]
    pub k: u64,
    #[arg(long, default_value_t = 0)]
    pub phi2: u64,
    #[arg(long, default_value_t = 0)]
    pub phi3: u64,
    /// Six explicit degrees; replaces --phi2 and --phi3.
    #[arg(long, value_delimiter = ',', num_args = 6)]
    pub gamma: Option<Vec<u64>>,
    /// rational, interval or float; defaults to the natural regime of the weights.
    #[arg(long)]
    pub regime: Option<Regime>,
}

impl SystemArgs {
    pub fn pattern(&self) -> Result<DegreePattern, Box<dyn Error>> {
        Ok(match &self.gamma {
            Some(g) => DegreePattern::new(self.k, [g[0], g[1], g[2], g[3], g[4], g[5]])?,
            None => DegreePattern::searchable(self.k, self.phi2, self.phi3)?,
        })
    }

    pub fn sequence(&self, pattern: &DegreePattern) -> Result<WeightSequence, Box<dyn Error>> {
        let seq = match &self.weights {
            Some(path) => {
                let spec: WeightSpec = serde_json::from_str(&std::fs::read_to_string(path)?)?;
                WeightSequence::from_spec(spec)?
            }
            None => WeightSequence::dirichlet(parse_rational(&self.alpha)?),
        };
        Ok(match &self.override_base {
            Some(base) => override_block(&WeightSequence::dirichlet(parse_rational(base)?), &seq, pattern)?,
            None => seq,
        })
    }

    pub fn regime(&self, seq: &WeightSequence) -> Regime {
        self.regime.unwrap_or_else(|| seq.natural_regime())
    }
}

/// `d_1,d_2,d_3`, or `d_0,..,d_3` normalised to `d_0 = 1`.
pub fn parse_d(values: &[String]) -> Result<[BigRational; 3], Box<dyn Error>> {
    let parsed = values.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?;
    match parsed.as_slice() {
        [a, b, c] => Ok([a.clone(), b.clone(), c.clone()]),
        [d0, a, b, c] if d0 > &BigRational::default() => Ok([a / d0, b / d0, c / d0]),
        [_, _, _, _] => Err("d_0 must be positive".into()),
        _ => Err(format!("--d takes 3 or 4 values, got {}", values.len()).into()),
    }
}
