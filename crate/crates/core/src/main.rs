//! Command-line front door: seeded form generation, isomorphism decisions,
//! the level-raising embedding, certificate verification, orbit sampling,
//! verification campaigns, and CSV rendering of stored reports.
//!
//! Every subcommand reads and writes one JSON record per line. Input comes
//! from a file argument or stdin (`-` also means stdin), records go to
//! stdout unless `--out` names a file. Exit codes: 0 on success, 1 on
//! operational errors, 2 when the requested check did not hold (a failed
//! campaign suite, a certificate that does not verify, an undecided pair
//! under `--fail-on-undecided`).

use std::fs;
use std::io::Read as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use blowup_moduli::bundles::CanonicalForm;
use blowup_moduli::harness::{run_campaign, CampaignConfig, CampaignReport, Suite};
use blowup_moduli::iso::{
    decide_iso, sample_orbit, verify_certificate, Certificate, TruncationParams, Verdict,
};
use blowup_moduli::Error;

const CHECK_FAILED: u8 = 2;

#[derive(Parser)]
#[command(
    name = "blowup-moduli",
    version,
    about = "Exact isomorphism decisions for rank-2 bundles on the blown-up plane"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Truncation box for the gauge unknowns; defaults depend on the level.
#[derive(Args, Clone, Copy)]
struct BoxArgs {
    /// Highest u power of a gauge entry (default 2j)
    #[arg(long = "U")]
    u_max: Option<i32>,
    /// Highest z power of a gauge entry (default 4j)
    #[arg(long = "Z")]
    z_max: Option<i32>,
    /// Deepening retries before a pair is reported undecided
    #[arg(long, default_value_t = 2)]
    cap: u32,
}

impl BoxArgs {
    fn params_for(self, j: i32) -> TruncationParams {
        let defaults = TruncationParams::defaults_for_level(j);
        TruncationParams::new(
            self.u_max.unwrap_or(defaults.u_max),
            self.z_max.unwrap_or(defaults.z_max),
            self.cap,
        )
    }
}

#[derive(Subcommand)]
enum Command {
    /// Emit seeded random canonical forms
    Gen {
        /// Level of the forms
        #[arg(long)]
        j: i32,
        /// How many forms to emit
        #[arg(long, default_value_t = 1)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide isomorphism for consecutive pairs of form records
    Iso {
        /// Form records, two per decision
        file: Option<PathBuf>,
        #[command(flatten)]
        box_args: BoxArgs,
        /// Exit nonzero if any pair stays undecided
        #[arg(long)]
        fail_on_undecided: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Send each form one level up, or invert that map
    Phi {
        file: Option<PathBuf>,
        /// Recover the lower-level form; fails on records outside the image
        #[arg(long)]
        inverse: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-verify certificate records exactly, with no truncation
    Verify {
        file: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample gauge-equivalent forms, emitting witness certificates
    Orbit {
        file: Option<PathBuf>,
        /// Samples per input form
        #[arg(long, default_value_t = 1)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        box_args: BoxArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run embedding verification suites over seeded corpora
    Campaign {
        /// Base level; suites exercise the embedding into the next one
        #[arg(long)]
        j: i32,
        /// Corpus size per kind of pair
        #[arg(long, default_value_t = 8)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        box_args: BoxArgs,
        /// Comma-separated subset of welldef, injective, saturation,
        /// closedness, stabilization, monotonicity; default all
        #[arg(long, value_delimiter = ',')]
        suites: Vec<String>,
        /// Also store the report here and certificates alongside it
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a stored campaign report as CSV
    Report {
        file: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct PairVerdict {
    pair: usize,
    #[serde(flatten)]
    verdict: Verdict,
}

#[derive(Serialize)]
struct VerifyOutcome {
    index: usize,
    ok: bool,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn read_input(path: Option<&Path>) -> Result<String, Error> {
    match path {
        Some(p) if p.as_os_str() != "-" => Ok(fs::read_to_string(p)?),
        _ => {
            let mut text = String::new();
            std::io::stdin().read_to_string(&mut text)?;
            Ok(text)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => fs::write(p, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_records<T: DeserializeOwned>(text: &str, what: &str) -> Result<Vec<T>, Error> {
    let mut records = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        records.push(serde_json::from_str(line)?);
    }
    if records.is_empty() {
        return Err(Error::EmptyInput(what.into()));
    }
    Ok(records)
}

fn to_jsonl<T: Serialize>(records: impl IntoIterator<Item = T>) -> Result<String, Error> {
    let mut text = String::new();
    for record in records {
        text.push_str(&serde_json::to_string(&record)?);
        text.push('\n');
    }
    Ok(text)
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Gen {
            j,
            pairs,
            seed,
            out,
        } => {
            let mut forms = Vec::with_capacity(pairs);
            for i in 0..pairs {
                forms.push(CanonicalForm::random(j, seed.wrapping_add(i as u64), 3)?);
            }
            emit(out.as_deref(), &to_jsonl(forms)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Iso {
            file,
            box_args,
            fail_on_undecided,
            out,
        } => {
            let forms: Vec<CanonicalForm> =
                parse_records(&read_input(file.as_deref())?, "no form records")?;
            if forms.len() % 2 != 0 {
                return Err(Error::OddPairInput(forms.len()));
            }
            let mut undecided = 0usize;
            let mut records = Vec::with_capacity(forms.len() / 2);
            for (pair, chunk) in forms.chunks(2).enumerate() {
                let params = box_args.params_for(chunk[0].level());
                let verdict = decide_iso(&chunk[0], &chunk[1], params)?;
                if verdict.is_undecided() {
                    undecided += 1;
                }
                records.push(PairVerdict { pair, verdict });
            }
            emit(out.as_deref(), &to_jsonl(records)?)?;
            Ok(if fail_on_undecided && undecided > 0 {
                ExitCode::from(CHECK_FAILED)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Phi { file, inverse, out } => {
            let forms: Vec<CanonicalForm> =
                parse_records(&read_input(file.as_deref())?, "no form records")?;
            let mut mapped = Vec::with_capacity(forms.len());
            for (index, form) in forms.iter().enumerate() {
                mapped.push(if inverse {
                    form.embed_preimage().ok_or(Error::NotInImage { index })?
                } else {
                    form.embed()
                });
            }
            emit(out.as_deref(), &to_jsonl(mapped)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { file, out } => {
            let certs: Vec<Certificate> =
                parse_records(&read_input(file.as_deref())?, "no certificate records")?;
            let outcomes: Vec<VerifyOutcome> = certs
                .iter()
                .enumerate()
                .map(|(index, cert)| VerifyOutcome {
                    index,
                    ok: verify_certificate(cert),
                })
                .collect();
            let all_ok = outcomes.iter().all(|o| o.ok);
            emit(out.as_deref(), &to_jsonl(outcomes)?)?;
            Ok(if all_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(CHECK_FAILED)
            })
        }
        Command::Orbit {
            file,
            pairs,
            seed,
            box_args,
            out,
        } => {
            let forms: Vec<CanonicalForm> =
                parse_records(&read_input(file.as_deref())?, "no form records")?;
            let mut certs = Vec::with_capacity(forms.len() * pairs);
            for (i, form) in forms.iter().enumerate() {
                let params = box_args.params_for(form.level());
                for k in 0..pairs {
                    let sample_seed = seed.wrapping_add((i * pairs + k) as u64);
                    let (_, cert) = sample_orbit(form, sample_seed, params)?;
                    certs.push(cert);
                }
            }
            emit(out.as_deref(), &to_jsonl(certs)?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Campaign {
            j,
            pairs,
            seed,
            box_args,
            suites,
            out,
        } => {
            let suites = if suites.is_empty() {
                Suite::ALL.to_vec()
            } else {
                suites
                    .iter()
                    .map(|s| s.trim().parse())
                    .collect::<Result<Vec<Suite>, Error>>()?
            };
            let config = CampaignConfig {
                j,
                pairs,
                seed,
                params: box_args.params_for(j),
                suites,
                out,
            };
            let (report, _) = run_campaign(&config)?;
            print!("{}", report.to_jsonl());
            Ok(if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(CHECK_FAILED)
            })
        }
        Command::Report { file, out } => {
            let report = CampaignReport::from_jsonl(&read_input(file.as_deref())?)?;
            emit(out.as_deref(), &report.to_csv())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
