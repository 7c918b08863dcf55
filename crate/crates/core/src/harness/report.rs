//! Campaign records and their serialized forms.
//!
//! A campaign produces one record per suite. Records serialize to JSON lines
//! for machine diffing and render to a fixed-column CSV table for reading.
//! Nothing time-dependent goes into a record, so two runs with the same
//! configuration produce byte-identical files.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::iso::TruncationParams;

/// One verification suite of the embedding campaign.
///
/// The declaration order is the canonical run order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Isomorphic pairs embed to isomorphic pairs, and transported
    /// witnesses verify at the higher level.
    Welldef,
    /// Non-isomorphic pairs embed to non-isomorphic pairs.
    Injective,
    /// Orbit samples of embedded forms split to second order in `u`.
    Saturation,
    /// Embedded forms carry no first- or second-order `u` terms and recover
    /// their source under the inverse index map.
    Closedness,
    /// Verdict kinds do not change under one deepening step.
    Stabilization,
    /// Refutations persist under one deepening step.
    Monotonicity,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Welldef,
        Suite::Injective,
        Suite::Saturation,
        Suite::Closedness,
        Suite::Stabilization,
        Suite::Monotonicity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Welldef => "welldef",
            Suite::Injective => "injective",
            Suite::Saturation => "saturation",
            Suite::Closedness => "closedness",
            Suite::Stabilization => "stabilization",
            Suite::Monotonicity => "monotonicity",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::BadCampaignConfig(format!("unknown suite `{s}`")))
    }
}

/// What to run: corpus size and seed at the base level, the truncation box
/// for decisions there, which suites to execute, and where to store the
/// artifacts. With `out` set, the report goes to that path and the
/// certificates to a sibling file ending in `.certs.jsonl`.
#[derive(Clone, Debug)]
pub struct CampaignConfig {
    pub j: i32,
    pub pairs: usize,
    pub seed: u64,
    pub params: TruncationParams,
    pub suites: Vec<Suite>,
    pub out: Option<PathBuf>,
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.pairs == 0 {
            return Err(Error::BadCampaignConfig(
                "corpus needs at least one pair".into(),
            ));
        }
        if self.suites.is_empty() {
            return Err(Error::BadCampaignConfig("no suites selected".into()));
        }
        self.params.validated_for_level(self.j)?;
        Ok(())
    }
}

/// Result line for one suite: a configuration echo plus tallies.
///
/// `checks` counts individual assertions, `failures` the ones that did not
/// hold. The verdict columns tally every decision made while running the
/// suite, which is more than one per pair for suites that re-decide at a
/// deeper truncation. `certificates` counts the stored witnesses backing
/// this suite's positive verdicts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteRecord {
    pub j: i32,
    pub pairs: usize,
    pub seed: u64,
    #[serde(rename = "U")]
    pub u_max: i32,
    #[serde(rename = "Z")]
    pub z_max: i32,
    pub suite: Suite,
    pub checks: usize,
    pub failures: usize,
    pub iso: usize,
    pub non_iso: usize,
    pub undecided: usize,
    pub certificates: usize,
}

pub const CSV_HEADER: &str =
    "j,pairs,seed,U,Z,suite,checks,failures,iso,non_iso,undecided,certificates";

impl SuiteRecord {
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.j,
            self.pairs,
            self.seed,
            self.u_max,
            self.z_max,
            self.suite,
            self.checks,
            self.failures,
            self.iso,
            self.non_iso,
            self.undecided,
            self.certificates
        )
    }
}

/// All suite records of one campaign run, in canonical suite order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub records: Vec<SuiteRecord>,
}

impl CampaignReport {
    pub fn all_passed(&self) -> bool {
        !self.records.is_empty() && self.records.iter().all(|r| r.failures == 0)
    }

    /// One JSON object per line, field order fixed by the struct.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for record in &self.records {
            out.push_str(&serde_json::to_string(record).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    /// Parses report lines, skipping blank ones.
    pub fn from_jsonl(text: &str) -> Result<Self, Error> {
        let mut records = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            records.push(serde_json::from_str(line)?);
        }
        if records.is_empty() {
            return Err(Error::EmptyInput("no report records".into()));
        }
        Ok(Self { records })
    }

    /// Fixed-column table, one row per record.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for record in &self.records {
            out.push_str(&record.to_csv_row());
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(suite: Suite, failures: usize) -> SuiteRecord {
        SuiteRecord {
            j: 2,
            pairs: 4,
            seed: 7,
            u_max: 4,
            z_max: 8,
            suite,
            checks: 8,
            failures,
            iso: 4,
            non_iso: 0,
            undecided: 0,
            certificates: 4,
        }
    }

    #[test]
    fn suite_names_roundtrip() {
        for suite in Suite::ALL {
            assert_eq!(suite.name().parse::<Suite>().unwrap(), suite);
        }
        assert!("welldefined".parse::<Suite>().is_err());
        assert!("".parse::<Suite>().is_err());
    }

    #[test]
    fn jsonl_line_is_stable() {
        let report = CampaignReport {
            records: vec![record(Suite::Welldef, 0)],
        };
        assert_eq!(
            report.to_jsonl(),
            "{\"j\":2,\"pairs\":4,\"seed\":7,\"U\":4,\"Z\":8,\"suite\":\"welldef\",\
             \"checks\":8,\"failures\":0,\"iso\":4,\"non_iso\":0,\"undecided\":0,\
             \"certificates\":4}\n"
        );
    }

    #[test]
    fn jsonl_roundtrips_and_skips_blanks() {
        let report = CampaignReport {
            records: vec![record(Suite::Welldef, 0), record(Suite::Closedness, 1)],
        };
        let mut text = String::from("\n");
        text.push_str(&report.to_jsonl());
        text.push('\n');
        assert_eq!(CampaignReport::from_jsonl(&text).unwrap(), report);
        assert!(matches!(
            CampaignReport::from_jsonl("  \n\n"),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn csv_has_fixed_columns() {
        let report = CampaignReport {
            records: vec![record(Suite::Injective, 0)],
        };
        assert_eq!(
            report.to_csv(),
            "j,pairs,seed,U,Z,suite,checks,failures,iso,non_iso,undecided,certificates\n\
             2,4,7,4,8,injective,8,0,4,0,0,4\n"
        );
    }

    #[test]
    fn pass_requires_records_and_no_failures() {
        assert!(!CampaignReport::default().all_passed());
        let good = CampaignReport {
            records: vec![record(Suite::Welldef, 0)],
        };
        assert!(good.all_passed());
        let bad = CampaignReport {
            records: vec![record(Suite::Welldef, 0), record(Suite::Saturation, 2)],
        };
        assert!(!bad.all_passed());
    }

    #[test]
    fn config_validation_rejects_degenerate_requests() {
        let base = CampaignConfig {
            j: 2,
            pairs: 4,
            seed: 0,
            params: TruncationParams::defaults_for_level(2),
            suites: vec![Suite::Welldef],
            out: None,
        };
        assert!(base.validate().is_ok());

        let mut empty_corpus = base.clone();
        empty_corpus.pairs = 0;
        assert!(matches!(
            empty_corpus.validate(),
            Err(Error::BadCampaignConfig(_))
        ));

        let mut no_suites = base.clone();
        no_suites.suites.clear();
        assert!(matches!(
            no_suites.validate(),
            Err(Error::BadCampaignConfig(_))
        ));

        let mut tiny_box = base;
        tiny_box.params = TruncationParams::new(1, 3, 0);
        assert!(matches!(
            tiny_box.validate(),
            Err(Error::WindowTooSmall { .. })
        ));
    }
}
