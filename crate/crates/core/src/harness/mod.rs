//! Campaign driver and numerical cross-check.
//!
//! A campaign builds seeded corpora at one level and runs verification
//! suites against the embedding into the next level: pairs known
//! isomorphic (orbit samples with witnesses), pairs certified
//! non-isomorphic (found by scanning random pairs), and the base forms
//! themselves. Reports contain nothing time-dependent; wall-clock timings
//! go to stderr so report files stay byte-identical across runs.

pub mod crosscheck;
pub mod report;

pub use crosscheck::{cross_check_float, AgreementRecord, FLOAT_TOLERANCE};
pub use report::{CampaignConfig, CampaignReport, Suite, SuiteRecord};

use std::time::Instant;

use crate::bundles::CanonicalForm;
use crate::error::Error;
use crate::iso::{
    decide_iso, sample_orbit, splits_at_level, transport_witness_up, verify_certificate,
    Certificate, Verdict,
};

/// Coefficient bound for corpus forms: real and imaginary parts of each
/// window coefficient are integers in `[-3, 3]`.
const COEFF_BOUND: u32 = 3;

/// The refuted-pair scan gives up after this many candidates per requested
/// pair. At level 1 every pair is isomorphic, so the scan must be able to
/// fail cleanly.
const SCAN_CAP_PER_PAIR: usize = 64;

struct Corpus {
    base: Vec<CanonicalForm>,
    /// `(p, q, witness)` with `q` in the orbit of `p`. Empty unless a
    /// selected suite consumes it.
    orbit: Vec<(CanonicalForm, CanonicalForm, Certificate)>,
    /// Pairs certified non-isomorphic at the base level. Empty unless a
    /// selected suite consumes it.
    refuted: Vec<(CanonicalForm, CanonicalForm)>,
}

#[derive(Default)]
struct Tally {
    checks: usize,
    failures: usize,
    iso: usize,
    non_iso: usize,
    undecided: usize,
    certificates: usize,
}

impl Tally {
    fn check(&mut self, ok: bool) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
        }
    }

    fn store(&mut self, cert: Certificate, certificates: &mut Vec<Certificate>) {
        self.certificates += 1;
        certificates.push(cert);
    }

    /// Tallies a verdict and stores its certificate when it carries one, so
    /// every positive verdict a report counts is backed by a stored witness.
    fn observe(&mut self, verdict: &Verdict, certificates: &mut Vec<Certificate>) {
        match verdict {
            Verdict::CertifiedIso { certificate } => {
                self.iso += 1;
                self.store(certificate.clone(), certificates);
            }
            Verdict::CertifiedNonIso { .. } => self.non_iso += 1,
            Verdict::Undecided { .. } => self.undecided += 1,
        }
    }
}

fn build_corpus(config: &CampaignConfig, suites: &[Suite]) -> Result<Corpus, Error> {
    let j = config.j;
    let params = config.params.validated_for_level(j)?;

    let needs_orbit = suites
        .iter()
        .any(|s| matches!(s, Suite::Welldef | Suite::Stabilization));
    let needs_refuted = suites
        .iter()
        .any(|s| matches!(s, Suite::Injective | Suite::Stabilization | Suite::Monotonicity));

    let mut base = Vec::with_capacity(config.pairs);
    for i in 0..config.pairs {
        base.push(CanonicalForm::random(
            j,
            config.seed.wrapping_add(i as u64),
            COEFF_BOUND,
        )?);
    }

    let mut orbit = Vec::new();
    if needs_orbit {
        for (i, p) in base.iter().enumerate() {
            let (q, cert) = sample_orbit(p, config.seed.wrapping_add(i as u64), params)?;
            orbit.push((p.clone(), q, cert));
        }
    }

    let mut refuted = Vec::new();
    if needs_refuted {
        // A stream of candidate pairs disjoint from the base corpus seeds.
        let mut cursor = config.seed ^ 0x9e37_79b9_7f4a_7c15;
        let cap = config.pairs * SCAN_CAP_PER_PAIR;
        let mut attempts = 0;
        while refuted.len() < config.pairs {
            if attempts >= cap {
                return Err(Error::BadCampaignConfig(format!(
                    "found only {} of {} refutable pairs at level {j} after {attempts} candidates",
                    refuted.len(),
                    config.pairs
                )));
            }
            attempts += 1;
            let p = CanonicalForm::random(j, cursor, COEFF_BOUND)?;
            let q = CanonicalForm::random(j, cursor.wrapping_add(1), COEFF_BOUND)?;
            cursor = cursor.wrapping_add(2);
            if decide_iso(&p, &q, params)?.is_non_iso() {
                refuted.push((p, q));
            }
        }
    }

    Ok(Corpus {
        base,
        orbit,
        refuted,
    })
}

fn run_suite(
    suite: Suite,
    config: &CampaignConfig,
    corpus: &Corpus,
    certificates: &mut Vec<Certificate>,
) -> Result<Tally, Error> {
    let params = config.params.validated_for_level(config.j)?;
    // Decisions one level up use a box grown by one deepening step, which
    // matches how the per-level defaults grow.
    let params_up = params.deepened().validated_for_level(config.j + 1)?;
    let mut tally = Tally::default();

    match suite {
        Suite::Welldef => {
            for (p, q, cert) in &corpus.orbit {
                let verdict = decide_iso(&p.embed(), &q.embed(), params_up)?;
                tally.check(verdict.is_iso());
                tally.observe(&verdict, certificates);
                let transported = transport_witness_up(cert)?;
                let ok = verify_certificate(&transported);
                tally.check(ok);
                if ok {
                    tally.store(transported, certificates);
                }
            }
        }
        Suite::Injective => {
            for (p, q) in &corpus.refuted {
                let verdict = decide_iso(&p.embed(), &q.embed(), params_up)?;
                tally.check(verdict.is_non_iso());
                tally.observe(&verdict, certificates);
            }
        }
        Suite::Saturation => {
            for (i, p) in corpus.base.iter().enumerate() {
                let image = p.embed();
                let (q, cert) =
                    sample_orbit(&image, config.seed.wrapping_add(i as u64), params_up)?;
                tally.check(splits_at_level(&q, 2, params_up)?);
                // The sample's class contains an image point with a defined
                // inverse, so it comes from downstairs up to equivalence.
                tally.check(image.embed_preimage().as_ref() == Some(p));
                tally.store(cert, certificates);
            }
        }
        Suite::Closedness => {
            for p in &corpus.base {
                let image = p.embed();
                tally.check(image.in_embedded_image());
                tally.check(image.embed_preimage().as_ref() == Some(p));
            }
        }
        Suite::Stabilization => {
            let deeper = params.deepened();
            for (p, q) in corpus
                .orbit
                .iter()
                .map(|(p, q, _)| (p, q))
                .chain(corpus.refuted.iter().map(|(p, q)| (p, q)))
            {
                let shallow = decide_iso(p, q, params)?;
                let deep = decide_iso(p, q, deeper)?;
                tally.check(shallow.kind() == deep.kind());
                tally.observe(&shallow, certificates);
                tally.observe(&deep, certificates);
            }
        }
        Suite::Monotonicity => {
            let deeper = params.deepened();
            for (p, q) in &corpus.refuted {
                let verdict = decide_iso(p, q, deeper)?;
                tally.check(verdict.is_non_iso());
                tally.observe(&verdict, certificates);
            }
        }
    }
    Ok(tally)
}

/// Runs the selected suites and returns their records together with every
/// certificate produced and verified along the way.
///
/// Suites run in canonical order regardless of the order given, duplicates
/// collapsed, so equal configurations yield byte-identical reports. With
/// `config.out` set, the report is written there and the certificates to a
/// sibling file ending in `.certs.jsonl`.
pub fn run_campaign(config: &CampaignConfig) -> Result<(CampaignReport, Vec<Certificate>), Error> {
    config.validate()?;
    let mut suites = config.suites.clone();
    suites.sort_unstable();
    suites.dedup();

    let started = Instant::now();
    let corpus = build_corpus(config, &suites)?;
    eprintln!(
        "corpus: {} base forms, {} orbit pairs, {} refuted pairs in {:.2}s",
        corpus.base.len(),
        corpus.orbit.len(),
        corpus.refuted.len(),
        started.elapsed().as_secs_f64()
    );

    let params = config.params.validated_for_level(config.j)?;
    let mut records = Vec::with_capacity(suites.len());
    let mut certificates = Vec::new();
    for suite in suites {
        let started = Instant::now();
        let tally = run_suite(suite, config, &corpus, &mut certificates)?;
        eprintln!(
            "{suite}: {} checks, {} failures in {:.2}s",
            tally.checks,
            tally.failures,
            started.elapsed().as_secs_f64()
        );
        records.push(SuiteRecord {
            j: config.j,
            pairs: config.pairs,
            seed: config.seed,
            u_max: params.u_max,
            z_max: params.z_max,
            suite,
            checks: tally.checks,
            failures: tally.failures,
            iso: tally.iso,
            non_iso: tally.non_iso,
            undecided: tally.undecided,
            certificates: tally.certificates,
        });
    }

    let report = CampaignReport { records };
    if let Some(path) = &config.out {
        std::fs::write(path, report.to_jsonl())?;
        let mut certs_text = String::new();
        for cert in &certificates {
            certs_text.push_str(&serde_json::to_string(cert)?);
            certs_text.push('\n');
        }
        std::fs::write(path.with_extension("certs.jsonl"), certs_text)?;
    }
    Ok((report, certificates))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iso::TruncationParams;

    fn config(j: i32, pairs: usize, suites: Vec<Suite>) -> CampaignConfig {
        CampaignConfig {
            j,
            pairs,
            seed: 41,
            params: TruncationParams::defaults_for_level(j),
            suites,
            out: None,
        }
    }

    #[test]
    fn full_campaign_passes_at_level_two() {
        let cfg = config(2, 2, Suite::ALL.to_vec());
        let (report, certificates) = run_campaign(&cfg).unwrap();
        assert_eq!(report.records.len(), 6);
        assert!(report.all_passed(), "{report:?}");
        // Two witnesses per orbit pair from welldef, one per base form from
        // saturation, two per orbit pair from the stabilization re-decides.
        assert_eq!(certificates.len(), 5 * cfg.pairs);
        assert!(certificates.iter().all(verify_certificate));
        let counted: usize = report.records.iter().map(|r| r.certificates).sum();
        assert_eq!(counted, certificates.len());
    }

    #[test]
    fn out_path_stores_report_and_certificates() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.jsonl");
        let mut cfg = config(2, 1, vec![Suite::Welldef]);
        cfg.out = Some(path.clone());
        let (report, certificates) = run_campaign(&cfg).unwrap();

        let stored = std::fs::read_to_string(&path).unwrap();
        assert_eq!(stored, report.to_jsonl());
        let certs_text = std::fs::read_to_string(dir.path().join("run.certs.jsonl")).unwrap();
        let stored_certs: Vec<Certificate> = certs_text
            .lines()
            .map(|line| serde_json::from_str(line).unwrap())
            .collect();
        assert_eq!(stored_certs, certificates);
        assert!(stored_certs.iter().all(verify_certificate));
    }

    #[test]
    fn reports_are_deterministic_and_order_insensitive() {
        let forward = config(2, 1, vec![Suite::Closedness, Suite::Injective]);
        let backward = config(2, 1, vec![Suite::Injective, Suite::Closedness]);
        let (a, _) = run_campaign(&forward).unwrap();
        let (b, _) = run_campaign(&backward).unwrap();
        assert_eq!(a.to_jsonl(), b.to_jsonl());
        assert_eq!(
            a.records.iter().map(|r| r.suite).collect::<Vec<_>>(),
            vec![Suite::Injective, Suite::Closedness]
        );
    }

    #[test]
    fn duplicate_suites_collapse() {
        let cfg = config(2, 1, vec![Suite::Closedness, Suite::Closedness]);
        let (report, _) = run_campaign(&cfg).unwrap();
        assert_eq!(report.records.len(), 1);
        assert_eq!(report.records[0].checks, 2);
    }

    #[test]
    fn level_one_closedness_is_vacuous_but_green() {
        let cfg = config(1, 2, vec![Suite::Closedness, Suite::Welldef]);
        let (report, _) = run_campaign(&cfg).unwrap();
        assert!(report.all_passed(), "{report:?}");
    }

    #[test]
    fn rejects_empty_requests() {
        assert!(run_campaign(&config(2, 0, vec![Suite::Welldef])).is_err());
        assert!(run_campaign(&config(2, 1, Vec::new())).is_err());
    }
}
