//! Interleaver sources given on the command line or in config files.
//!
//! ```text
//! qpp N f1 f2          quadratic permutation polynomial
//! poly N c1 c2 ...     general polynomial, coefficients of x, x^2, ...
//! identity N
//! srandom N S SEED     S-random interleaver
//! file PATH            plain-text interleaver file
//! PATH                 shorthand for `file PATH`
//! ```

use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use qpp_core::interleave::{generate_s_random, read_interleaver};
use qpp_core::poly::materialize;
use qpp_core::{Interleaver, PolySpec};
use serde::Serialize;

const SRANDOM_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Source {
    Qpp { n: u64, f1: u64, f2: u64 },
    Poly { n: u64, coeffs: Vec<u64> },
    Identity { n: usize },
    Srandom { n: usize, s: usize, seed: u64 },
    File { path: PathBuf },
}

fn int<T: std::str::FromStr>(token: &str, what: &str) -> Result<T>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    token
        .parse()
        .with_context(|| format!("malformed {what}: {token:?}"))
}

impl Source {
    pub fn parse<S: AsRef<str>>(tokens: &[S]) -> Result<Self> {
        let tokens: Vec<&str> = tokens.iter().map(AsRef::as_ref).collect();
        let arity = |k: usize| -> Result<()> {
            if tokens.len() != k + 1 {
                bail!("`{}` source takes {k} arguments, got {}", tokens[0], tokens.len() - 1);
            }
            Ok(())
        };
        match tokens.first().copied() {
            None => bail!("missing interleaver source"),
            Some("qpp") => {
                arity(3)?;
                Ok(Source::Qpp {
                    n: int(tokens[1], "N")?,
                    f1: int(tokens[2], "f1")?,
                    f2: int(tokens[3], "f2")?,
                })
            }
            Some("poly") => {
                if tokens.len() < 3 {
                    bail!("`poly` source needs N and at least one coefficient");
                }
                Ok(Source::Poly {
                    n: int(tokens[1], "N")?,
                    coeffs: tokens[2..]
                        .iter()
                        .map(|t| int(t, "coefficient"))
                        .collect::<Result<_>>()?,
                })
            }
            Some("identity") => {
                arity(1)?;
                Ok(Source::Identity {
                    n: int(tokens[1], "N")?,
                })
            }
            Some("srandom") => {
                arity(3)?;
                Ok(Source::Srandom {
                    n: int(tokens[1], "N")?,
                    s: int(tokens[2], "S")?,
                    seed: int(tokens[3], "seed")?,
                })
            }
            Some("file") => {
                arity(1)?;
                Ok(Source::File {
                    path: tokens[1].into(),
                })
            }
            Some(path) if tokens.len() == 1 => Ok(Source::File { path: path.into() }),
            Some(other) => bail!("unknown interleaver source {other:?}"),
        }
    }

    /// Whitespace-separated form, as accepted by [`Source::parse`].
    pub fn parse_str(s: &str) -> Result<Self> {
        Self::parse(&s.split_whitespace().collect::<Vec<_>>())
    }

    pub fn load(&self) -> Result<Interleaver> {
        let pi = match self {
            Source::Qpp { n, f1, f2 } => materialize(&PolySpec::quadratic(*n, *f1, *f2)?)?,
            Source::Poly { n, coeffs } => materialize(&PolySpec::new(*n, coeffs.clone())?)?,
            Source::Identity { n } => {
                if *n == 0 {
                    bail!("identity interleaver needs N >= 1");
                }
                Interleaver::identity(*n)
            }
            Source::Srandom { n, s, seed } => generate_s_random(*n, *s, *seed, SRANDOM_ATTEMPTS)?,
            Source::File { path } => {
                let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
                read_interleaver(BufReader::new(file))
                    .with_context(|| format!("invalid interleaver file {}", path.display()))?
            }
        };
        Ok(pi)
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Qpp { n, f1, f2 } => write!(f, "qpp {n} {f1} {f2}"),
            Source::Poly { n, coeffs } => {
                write!(f, "poly {n}")?;
                coeffs.iter().try_for_each(|c| write!(f, " {c}"))
            }
            Source::Identity { n } => write!(f, "identity {n}"),
            Source::Srandom { n, s, seed } => write!(f, "srandom {n} {s} {seed}"),
            Source::File { path } => write!(f, "file {}", path.display()),
        }
    }
}
