//! Floating-point shadow of the exact necessity computation.
//!
//! The exact path computes a nullspace dimension and a polarization verdict
//! for the origin determinant on that nullspace. This module redoes both in
//! `f64`: nullity by singular value decomposition, the determinant verdict
//! by evaluating it on pseudo-random unit vectors of the numerical
//! nullspace. Disagreement flags either a conditioning problem in the float
//! path or a bug in the exact one; agreement on a corpus is the regression
//! signal.

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bundles::CanonicalForm;
use crate::error::Error;
use crate::iso::{assemble_necessity_system, det_origin_form, ColumnLayout, TruncationParams};
use crate::linalg::SpanEvaluation;

/// Singular values at or below this are treated as zero, and the float
/// determinant probe is compared against it as well.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

const PROBE_VECTORS: usize = 16;
const PROBE_SEED: u64 = 0x5eed_cafe_f00d_0001;

/// Side-by-side outcome of the exact and floating-point necessity analyses.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AgreementRecord {
    pub exact_nullity: usize,
    pub float_nullity: usize,
    pub nullity_match: bool,
    /// Exact polarization found a nullspace vector with nonzero origin
    /// determinant.
    pub exact_nonvanishing: bool,
    /// The float probe found a numerical nullspace vector whose origin
    /// determinant exceeds the tolerance.
    pub probe_nonvanishing: bool,
    pub probe_match: bool,
    pub agree: bool,
}

/// Runs the exact necessity analysis and its floating-point shadow on one
/// pair of forms at the given truncation box (no deepening).
pub fn cross_check_float(
    p: &CanonicalForm,
    p2: &CanonicalForm,
    params: TruncationParams,
) -> Result<AgreementRecord, Error> {
    let j = p.level();
    let params = params.validated_for_level(j)?;
    let layout = ColumnLayout::new(params.u_max, params.z_max);
    let system = assemble_necessity_system(p, p2, layout)?;
    let q = det_origin_form(layout);

    let exact_basis = system.matrix.nullspace();
    let exact_nullity = exact_basis.len();
    let exact_nonvanishing = matches!(
        q.evaluate_on_span(&exact_basis),
        SpanEvaluation::Witness(_)
    );

    // Zero rows appended below the float copy make it at least square, so
    // the full right factor of the decomposition is available and spans all
    // null directions. Zero rows change no singular value structure.
    let rows = system.matrix.rows();
    let cols = system.matrix.cols();
    let frows = rows.max(cols);
    let mut fm = DMatrix::<Complex<f64>>::zeros(frows, cols);
    for r in 0..rows {
        for c in 0..cols {
            let v = system.matrix.get(r, c);
            if !v.is_zero() {
                let (re, im) = v.to_complex_f64();
                fm[(r, c)] = Complex::new(re, im);
            }
        }
    }
    let svd = fm.svd(false, true);
    let float_rank = svd
        .singular_values
        .iter()
        .filter(|s| **s > FLOAT_TOLERANCE)
        .count();
    let float_nullity = cols - float_rank;

    // Numerical nullspace basis: rows of V^H whose singular value is zero
    // (missing entries count as zero when the matrix was padded).
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let mut null_rows: Vec<usize> = (0..v_t.nrows())
        .filter(|&i| {
            svd.singular_values
                .get(i)
                .map_or(true, |s| *s <= FLOAT_TOLERANCE)
        })
        .collect();
    null_rows.sort_unstable();

    let a00 = layout.column(crate::iso::GaugeEntry::A, 0, 0);
    let b00 = layout.column(crate::iso::GaugeEntry::B, 0, 0);
    let c00 = layout.column(crate::iso::GaugeEntry::C, 0, 0);
    let d00 = layout.column(crate::iso::GaugeEntry::D, 0, 0);

    let mut probe_nonvanishing = false;
    if !null_rows.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
        for _ in 0..PROBE_VECTORS {
            let mut x = vec![Complex::new(0.0, 0.0); cols];
            for &row in &null_rows {
                let g = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                for c in 0..cols {
                    // Row of V^H conjugated back to a column of V.
                    x[c] += g * v_t[(row, c)].conj();
                }
            }
            let norm: f64 = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            if norm < FLOAT_TOLERANCE {
                continue;
            }
            for v in x.iter_mut() {
                *v /= norm;
            }
            let det = x[a00] * x[d00] - x[b00] * x[c00];
            if det.norm() > FLOAT_TOLERANCE {
                probe_nonvanishing = true;
                break;
            }
        }
    }

    let nullity_match = exact_nullity == float_nullity;
    let probe_match = exact_nonvanishing == probe_nonvanishing;
    Ok(AgreementRecord {
        exact_nullity,
        float_nullity,
        nullity_match,
        exact_nonvanishing,
        probe_nonvanishing,
        probe_match,
        agree: nullity_match && probe_match,
    })
}
