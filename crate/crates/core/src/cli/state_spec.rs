use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};

/// The `--state` argument.
#[derive(Clone, Debug, PartialEq)]
pub enum StateSpec {
    /// `dicke`: the pure Dicke state for the chosen `m`.
    Dicke,
    /// `dicke+noise[:p]`
    DickeNoise(Option<f64>),
    /// `mix[:p,q]`: `p D_2 + q D_3 + (1-p-q) 1/2^n`
    Mix(Option<(f64, f64)>),
    /// `file:PATH` or an existing path: a density-matrix file.
    File(PathBuf),
    /// `table:PATH`: an expectation-value CSV.
    Table(PathBuf),
}

fn number(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("invalid number {s:?} in state spec")))
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        match (head, arg) {
            ("dicke", None) => Ok(StateSpec::Dicke),
            ("dicke+noise", None) => Ok(StateSpec::DickeNoise(None)),
            ("dicke+noise", Some(p)) => Ok(StateSpec::DickeNoise(Some(number(p)?))),
            ("mix", None) => Ok(StateSpec::Mix(None)),
            ("mix", Some(pq)) => {
                let (p, q) = pq
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("expected mix:p,q, got {s:?}")))?;
                Ok(StateSpec::Mix(Some((number(p)?, number(q)?))))
            }
            ("file", Some(path)) if !path.is_empty() => Ok(StateSpec::File(path.into())),
            ("table", Some(path)) if !path.is_empty() => Ok(StateSpec::Table(path.into())),
            _ if std::path::Path::new(s).is_file() => Ok(StateSpec::File(s.into())),
            _ => Err(Error::Parse(format!(
                "unrecognized state {s:?}; use dicke, dicke+noise:p, mix:p,q, file:PATH or table:PATH"
            ))),
        }
    }
}
