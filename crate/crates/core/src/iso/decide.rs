//! The decision procedure and its two derived searches.
//!
//! [`decide_iso`] alternates two exact linear systems per truncation box:
//! the necessity system refutes (its nullspace provably contains the
//! truncation of every exact witness, so an identically vanishing origin
//! determinant rules the isomorphism out), and the sufficiency system
//! certifies (a nullspace vector with nonzero origin determinant is an exact
//! witness). When neither side fires, the box deepens, up to a configured
//! cap.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bundles::{window, CanonicalForm};
use crate::error::Error;
use crate::laurent::{BiLaurent, Monomial};
use crate::linalg::{ExactMatrix, SpanEvaluation};
use crate::scalar::GaussianRational;

use super::system::{
    assemble_rows, det_origin_form, gauge_from_vector, symbolic_conjugate, ColumnLayout,
    LinLaurent,
};
use super::{
    conjugate, verify_certificate, Certificate, GaugeCandidate, TruncationParams, Verdict,
};

/// Decides whether two canonical forms at the same level present isomorphic
/// bundles.
///
/// Outcomes are one-sided certain: `CertifiedIso` carries a witness that
/// [`verify_certificate`] rechecks without truncation, and `CertifiedNonIso`
/// reports the box whose necessity system already forces every candidate
/// gauge to degenerate at the origin. `Undecided` only says the deepening
/// budget ran out.
pub fn decide_iso(
    p: &CanonicalForm,
    p2: &CanonicalForm,
    params: TruncationParams,
) -> Result<Verdict, Error> {
    if p.level() != p2.level() {
        return Err(Error::LevelMismatch(p.level(), p2.level()));
    }
    let j = p.level();
    let params = params.validated_for_level(j)?;
    let (mut u, mut z) = (params.u_max, params.z_max);
    for _ in 0..=params.deepening_cap {
        let layout = ColumnLayout::new(u, z);
        let sym = symbolic_conjugate(p.perturbation(), p2.perturbation(), j, layout);
        let q = det_origin_form(layout);

        let mz = z - 2 * j;
        let necessity = assemble_rows(&sym, layout, |m| m.u <= u && m.z <= mz);
        let nec_basis = necessity.matrix.nullspace();
        match q.evaluate_on_span(&nec_basis) {
            SpanEvaluation::VanishesIdentically => {
                return Ok(Verdict::CertifiedNonIso {
                    u_max: u,
                    z_window: mz,
                });
            }
            SpanEvaluation::Witness(_) => {
                let sufficiency = assemble_rows(&sym, layout, |_| true);
                let suf_basis = sufficiency.matrix.nullspace();
                if let SpanEvaluation::Witness(w) = q.evaluate_on_span(&suf_basis) {
                    let gauge = gauge_from_vector(layout, &w);
                    let cert = Certificate::new(p.clone(), p2.clone(), gauge, u, z, 0)?;
                    debug_assert!(verify_certificate(&cert));
                    return Ok(Verdict::CertifiedIso { certificate: cert });
                }
            }
        }
        u += 2;
        z += 4;
    }
    Ok(Verdict::Undecided {
        u_max: u - 2,
        z_max: z - 4,
    })
}

/// Whether the truncation of `p` to `u` order `k` splits off the trivial
/// extension, i.e. is gauge-equivalent to the zero form through the order-`k`
/// infinitesimal neighborhood.
///
/// Rows and gauge unknowns are both pinned to `u <= k`: conjugate rows at
/// `u <= k` read no gauge coefficient above `u = k`, so this is exactly the
/// computation modulo `u^(k+1)`. Only the `z` window deepens on retries.
///
/// `true` always comes from a witness gauge rechecked against the exact
/// conjugate; `false` covers both a certified refutation and an exhausted
/// deepening budget.
pub fn splits_at_level(p: &CanonicalForm, k: u32, params: TruncationParams) -> Result<bool, Error> {
    let j = p.level();
    let params = params.validated_for_level(j)?;
    let k = k as i32;
    let p_trunc = p.perturbation().truncate_u(k);
    if p_trunc.is_zero() {
        return Ok(true);
    }
    let truncated_form = CanonicalForm::new(j, p_trunc.clone())?;
    let zero_form = CanonicalForm::zero(j)?;
    let mut z = params.z_max;
    for _ in 0..=params.deepening_cap {
        let layout = ColumnLayout::new(k, z);
        let sym = symbolic_conjugate(&p_trunc, &BiLaurent::zero(), j, layout);
        let q = det_origin_form(layout);

        let mz = z - 2 * j;
        let necessity = assemble_rows(&sym, layout, |m| m.u <= k && m.z <= mz);
        match q.evaluate_on_span(&necessity.matrix.nullspace()) {
            SpanEvaluation::VanishesIdentically => return Ok(false),
            SpanEvaluation::Witness(_) => {
                let sufficiency = assemble_rows(&sym, layout, |m| m.u <= k);
                if let SpanEvaluation::Witness(w) =
                    q.evaluate_on_span(&sufficiency.matrix.nullspace())
                {
                    let gauge = gauge_from_vector(layout, &w);
                    let conj = conjugate(&truncated_form, &zero_form, &gauge)?;
                    let holomorphic_mod_uk = conj
                        .entries()
                        .iter()
                        .all(|(_, e)| e.truncate_u(k).is_v_holomorphic());
                    if holomorphic_mod_uk && !gauge.det_at_origin().is_zero() {
                        return Ok(true);
                    }
                }
            }
        }
        z += 4;
    }
    Ok(false)
}

const SAMPLE_ATTEMPTS: u32 = 16;

/// Draws a pseudo-random point of the gauge orbit of `p`, returning the new
/// canonical form together with the certificate that proves it equivalent.
/// Deterministic in `(p, seed, params)`.
pub fn sample_orbit(
    p: &CanonicalForm,
    seed: u64,
    params: TruncationParams,
) -> Result<(CanonicalForm, Certificate), Error> {
    let j = p.level();
    let params = params.validated_for_level(j)?;
    // Units stay inside the gauge box promised by the certificate.
    let max_deg = (params.u_max - (2 * j - 2)).min(2);
    for attempt in 0..SAMPLE_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, attempt as u64));
        let a = random_unit(&mut rng, max_deg);
        let d = random_unit(&mut rng, max_deg);
        if let Ok(out) = sample_orbit_with_units(p, &a, &d, seed, params) {
            return Ok(out);
        }
    }
    Err(Error::OrbitSampleExhausted {
        seed,
        attempts: SAMPLE_ATTEMPTS,
    })
}

/// Orbit sampling with chosen diagonal units: looks for `p2` in the window
/// and an upper-right entry `b` such that `G = [[a, b], [0, d]]` carries `p`
/// to `p2` exactly.
///
/// With zero lower-left entry the first and last conjugate entries are `a`
/// and `d` themselves, so `a` and `d` must be holomorphic on both charts
/// (polynomials in `v = z u` do) and invertible at the origin. The remaining
/// condition is linear in `(p2, b)` and always solvable when `d` is a unit:
/// window rows are triangular in the `u` grading with the invertible
/// constant of `d` on the diagonal, and every leftover forbidden monomial
/// sits at `z >= 2j` where `b` absorbs it.
pub fn sample_orbit_with_units(
    p: &CanonicalForm,
    a: &BiLaurent,
    d: &BiLaurent,
    seed: u64,
    params: TruncationParams,
) -> Result<(CanonicalForm, Certificate), Error> {
    let j = p.level();
    let params = params.validated_for_level(j)?;
    for (entry, poly) in [('a', a), ('d', d)] {
        let unit = !poly.is_zero()
            && poly.is_z_holomorphic()
            && poly.is_v_holomorphic()
            && !poly.coeff(0, 0).is_zero();
        if !unit {
            return Err(Error::InvalidUnit { entry });
        }
    }
    let unit_deg = a.max_u().unwrap_or(0).max(d.max_u().unwrap_or(0));
    let b_u_max = 2 * j - 2 + unit_deg;
    let b_z_max = (unit_deg - 1).max(0);
    if b_u_max > params.u_max || b_z_max > params.z_max || a.max_z().unwrap_or(0) > params.z_max {
        return Err(Error::WindowTooSmall {
            j,
            u_max: params.u_max,
            z_max: params.z_max,
            u_min: b_u_max,
            z_min: b_z_max,
        });
    }

    // Unknown layout: window slots for p2 first, then the b box.
    let slots_p2: Vec<(usize, Monomial)> = window(j)?.into_iter().enumerate().collect();
    let n_win = slots_p2.len();
    let mut slots_b = Vec::new();
    let mut col = n_win;
    for u in 0..=b_u_max {
        for z in 0..=b_z_max {
            slots_b.push((col, Monomial::new(u, z)));
            col += 1;
        }
    }
    let ncols = col;

    // beta = z^2j b + z^j (p2 d - a p): linear part in (p2, b), constant -z^j a p.
    let p2_lin = LinLaurent::from_slots(&slots_p2);
    let b_lin = LinLaurent::from_slots(&slots_b);
    let mut beta = b_lin.shifted(0, 2 * j);
    beta.add_product(d, &p2_lin, 1, j);
    let beta_const = a.mul(p.perturbation()).shift_z(j).neg();

    let mut row_monomials: BTreeSet<Monomial> = beta
        .rows()
        .map(|(m, _)| m)
        .filter(|m| m.z > m.u)
        .collect();
    row_monomials.extend(beta_const.terms().map(|(m, _)| m).filter(|m| m.z > m.u));

    let mut rows = Vec::with_capacity(row_monomials.len());
    let mut rhs = Vec::with_capacity(row_monomials.len());
    let empty = super::system::LinForm::default();
    let by_monomial: std::collections::BTreeMap<Monomial, &super::system::LinForm> =
        beta.rows().collect();
    for m in &row_monomials {
        let lf = by_monomial.get(m).copied().unwrap_or(&empty);
        rows.push(lf.to_dense(ncols));
        rhs.push(-&beta_const.coeff(m.u, m.z));
    }
    let matrix = if rows.is_empty() {
        ExactMatrix::zeros(0, ncols)
    } else {
        ExactMatrix::from_rows(rows)
    };
    let x = matrix
        .solve(&rhs)
        .expect("unit-led orbit system is triangular and always consistent");

    let p2_terms = slots_p2
        .iter()
        .filter(|(idx, _)| !x[*idx].is_zero())
        .map(|(idx, m)| (m.u, m.z, x[*idx].clone()));
    let p2 = CanonicalForm::new(j, BiLaurent::from_terms(p2_terms)?)?;
    let b_terms = slots_b
        .iter()
        .filter(|(idx, _)| !x[*idx].is_zero())
        .map(|(idx, m)| (m.u, m.z, x[*idx].clone()));
    let b = BiLaurent::from_terms(b_terms)?;

    let gauge = GaugeCandidate::new(a.clone(), b, BiLaurent::zero(), d.clone())?;
    let cert = Certificate::new(
        p.clone(),
        p2.clone(),
        gauge,
        params.u_max,
        params.z_max,
        seed,
    )?;
    assert!(
        verify_certificate(&cert),
        "sampled certificate failed exact verification"
    );
    Ok((p2, cert))
}

fn random_unit(rng: &mut ChaCha8Rng, max_deg: i32) -> BiLaurent {
    let deg = rng.gen_range(0..=max_deg.max(0));
    let mut terms = Vec::new();
    for k in 0..=deg {
        let re_num = if k == 0 {
            // The origin value must not vanish.
            loop {
                let n = rng.gen_range(-3i64..=3);
                if n != 0 {
                    break n;
                }
            }
        } else {
            rng.gen_range(-3i64..=3)
        };
        let re_den = rng.gen_range(1i64..=2);
        let im_num = rng.gen_range(-2i64..=2);
        let im_den = rng.gen_range(1i64..=2);
        terms.push((
            k,
            k,
            GaussianRational::from_fractions(re_num, re_den, im_num, im_den),
        ));
    }
    BiLaurent::from_terms(terms).unwrap()
}

fn mix(seed: u64, salt: u64) -> u64 {
    let mut x = seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}
