//! Job configuration: JSON in, validated core descriptors out. Unknown
//! fields are rejected and every validation failure names the field
//! path it came from.

use std::path::Path;

use hilbtaut_core::graded::GradedDims;
use hilbtaut_core::lattice::{PolFamily, SurfaceDesc, SurfaceKind};
use hilbtaut_core::rat::Rat;
use hilbtaut_core::taut::{SheafDesc, SheafFlags};
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable, malformed or semantically invalid configuration and
    /// usage errors; exit code 2.
    #[error("CONFIG_INVALID: {0}")]
    Config(String),
    /// An engine rejected the request; the message carries the engine's
    /// own tag; exit code 2.
    #[error("{0}")]
    Module(String),
}

pub fn module_err(e: impl std::fmt::Display) -> CliError {
    CliError::Module(e.to_string())
}

// ---- Raw JSON shape ----

/// A rational number in configuration: a plain integer or a "p/q"
/// string.
#[derive(Deserialize)]
#[serde(untagged)]
pub enum RatSpec {
    Int(i64),
    Text(String),
}

pub fn parse_rat(spec: &RatSpec, path: &str) -> Result<Rat, CliError> {
    match spec {
        RatSpec::Int(n) => Ok(Rat::int(*n)),
        RatSpec::Text(s) => {
            let parse_int = |part: &str| {
                part.trim()
                    .parse::<i64>()
                    .map_err(|_| CliError::Config(format!("{path}: `{s}` is not a rational")))
            };
            match s.split_once('/') {
                None => Ok(Rat::int(parse_int(s)?)),
                Some((num, den)) => {
                    let den = parse_int(den)?;
                    if den == 0 {
                        return Err(CliError::Config(format!("{path}: zero denominator")));
                    }
                    Ok(Rat::new(parse_int(num)?, den))
                }
            }
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case", tag = "kind")]
pub enum SurfaceSpec {
    AbelianStar,
    K3RankOne { h_square: i64 },
    EllipticK3,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlagsSpec {
    pub mu_stable: bool,
    pub torsion_free: bool,
    pub locally_free: bool,
    pub symmetric: bool,
    pub det_trivial: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SheafSpec {
    pub rank: u32,
    pub c1: Vec<RatSpec>,
    #[serde(default)]
    pub coh: Option<Vec<u64>>,
    #[serde(default)]
    pub ext_self: Option<Vec<u64>>,
    pub flags: FlagsSpec,
}

#[derive(Deserialize, Clone, Copy, PartialEq, Eq, Debug)]
#[serde(rename_all = "kebab-case")]
pub enum TargetSpec {
    Hilb,
    Kummer,
    GenKummer,
}

#[derive(Deserialize, Clone, Copy, PartialEq, Eq, Debug)]
pub enum PolSpec {
    #[serde(rename = "HN")]
    Hn,
    #[serde(rename = "HNm")]
    Hnm,
    #[serde(rename = "HNKm")]
    Hnkm,
    #[serde(rename = "HNK")]
    Hnk,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub surface: SurfaceSpec,
    pub sheaf: SheafSpec,
    pub n: usize,
    pub target: TargetSpec,
    #[serde(default)]
    pub polarisation: Option<PolSpec>,
}

// ---- Resolution into core descriptors ----

/// A validated job: core descriptors plus the resolved polarisation
/// family.
#[derive(Debug)]
pub struct Job {
    pub surface: SurfaceDesc,
    pub sheaf: SheafDesc,
    pub n: usize,
    pub target: TargetSpec,
    pub pol: PolFamily,
}

impl JobConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn resolve(&self) -> Result<Job, CliError> {
        let surface = match &self.surface {
            SurfaceSpec::AbelianStar => SurfaceDesc::abelian_star(),
            SurfaceSpec::K3RankOne { h_square } => SurfaceDesc::k3_rank_one(*h_square)
                .map_err(|e| CliError::Config(format!("surface.h_square: {e}")))?,
            SurfaceSpec::EllipticK3 => SurfaceDesc::elliptic_k3(),
        };
        if self.sheaf.c1.len() != surface.rank() {
            return Err(CliError::Config(format!(
                "sheaf.c1: the chosen surface lattice has rank {}, got {} coordinates",
                surface.rank(),
                self.sheaf.c1.len()
            )));
        }
        let c1 = self
            .sheaf
            .c1
            .iter()
            .enumerate()
            .map(|(i, spec)| parse_rat(spec, &format!("sheaf.c1[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let flags = SheafFlags {
            mu_stable: self.sheaf.flags.mu_stable,
            torsion_free: self.sheaf.flags.torsion_free,
            locally_free: self.sheaf.flags.locally_free,
            symmetric: self.sheaf.flags.symmetric,
            det_trivial: self.sheaf.flags.det_trivial,
        };
        let coh = self.sheaf.coh.as_deref().map(GradedDims::new);
        let ext_self = self.sheaf.ext_self.as_deref().map(GradedDims::new);
        let sheaf = SheafDesc::new(&surface, self.sheaf.rank, c1, coh, ext_self, flags)
            .map_err(|e| CliError::Config(format!("sheaf: {e}")))?;
        match self.target {
            TargetSpec::Hilb => {
                if self.n < 2 {
                    return Err(CliError::Config(
                        "n: induced sheaves live on Hilbert schemes with n >= 2".into(),
                    ));
                }
            }
            TargetSpec::Kummer => {
                if self.n != 2 {
                    return Err(CliError::Config(
                        "n: the quotient-surface target sits inside level n = 2".into(),
                    ));
                }
            }
            TargetSpec::GenKummer => {
                if self.n != 3 {
                    return Err(CliError::Config(
                        "n: the 4-dimensional summation fibre sits inside level n = 3".into(),
                    ));
                }
            }
        }
        if self.target != TargetSpec::Hilb && surface.kind() != SurfaceKind::AbelianStar {
            return Err(CliError::Config(
                "target: quotient targets need the abelian surface".into(),
            ));
        }
        let pol = match self.polarisation {
            Some(PolSpec::Hn) => PolFamily::HN,
            Some(PolSpec::Hnm) => PolFamily::HNm,
            Some(PolSpec::Hnkm) => PolFamily::HNKm,
            Some(PolSpec::Hnk) => PolFamily::HNK,
            None => match (self.target, surface.kind()) {
                (TargetSpec::Hilb, SurfaceKind::AbelianStar) => PolFamily::HNm,
                (TargetSpec::Hilb, _) => PolFamily::HN,
                (TargetSpec::Kummer, _) => PolFamily::HNKm,
                (TargetSpec::GenKummer, _) => PolFamily::HNK,
            },
        };
        Ok(Job {
            surface,
            sheaf,
            n: self.n,
            target: self.target,
            pol,
        })
    }
}

// ---- Tests ----

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(json: &str) -> Result<Job, CliError> {
        let config: JobConfig =
            serde_json::from_str(json).map_err(|e| CliError::Config(e.to_string()))?;
        config.resolve()
    }

    const GOOD: &str = r#"{
        "surface": {"kind": "abelian-star"},
        "sheaf": {
            "rank": 1,
            "c1": [1],
            "flags": {
                "mu_stable": true, "torsion_free": true, "locally_free": true,
                "symmetric": false, "det_trivial": false
            }
        },
        "n": 3,
        "target": "hilb"
    }"#;

    #[test]
    fn valid_config_resolves_with_default_polarisation() {
        let job = parse(GOOD).unwrap();
        assert_eq!(job.n, 3);
        assert_eq!(job.pol, PolFamily::HNm);
        assert_eq!(job.sheaf.rank(), 1);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let bad = GOOD.replace("\"n\": 3", "\"n\": 3, \"extra\": 1");
        let err = parse(&bad).unwrap_err();
        assert!(err.to_string().contains("unknown field"));
    }

    #[test]
    fn coordinate_count_mismatch_names_the_field() {
        let bad = GOOD.replace("\"c1\": [1]", "\"c1\": [1, 2]");
        let err = parse(&bad).unwrap_err();
        let msg = err.to_string();
        assert!(msg.starts_with("CONFIG_INVALID"), "{msg}");
        assert!(msg.contains("sheaf.c1"), "{msg}");
    }

    #[test]
    fn rationals_parse_from_strings_and_reject_garbage() {
        let good = GOOD.replace("\"c1\": [1]", "\"c1\": [\"3/2\"]");
        assert!(parse(&good).is_ok());
        let bad = GOOD.replace("\"c1\": [1]", "\"c1\": [\"1/0\"]");
        let msg = parse(&bad).unwrap_err().to_string();
        assert!(msg.contains("zero denominator"), "{msg}");
        let bad = GOOD.replace("\"c1\": [1]", "\"c1\": [\"x\"]");
        assert!(parse(&bad).is_err());
    }

    #[test]
    fn quotient_targets_pin_the_level() {
        let bad = GOOD
            .replace("\"target\": \"hilb\"", "\"target\": \"kummer\"");
        let msg = parse(&bad).unwrap_err().to_string();
        assert!(msg.contains("n = 2"), "{msg}");
        let good = bad.replace("\"n\": 3", "\"n\": 2");
        let job = parse(&good).unwrap();
        assert_eq!(job.pol, PolFamily::HNKm);
    }

    #[test]
    fn quotient_targets_need_the_abelian_surface() {
        let bad = GOOD
            .replace(
                "{\"kind\": \"abelian-star\"}",
                "{\"kind\": \"k3-rank-one\", \"h_square\": 2}",
            )
            .replace("\"target\": \"hilb\"", "\"target\": \"gen-kummer\"");
        let msg = parse(&bad).unwrap_err().to_string();
        assert!(msg.contains("abelian"), "{msg}");
    }
}
