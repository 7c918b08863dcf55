//! Linear systems over unknown gauge coefficients.
//!
//! The gauge entries are treated as generic polynomials on an exponent box,
//! one scalar unknown per `(entry, u, z)` slot. Conjugation is linear in the
//! gauge, so each monomial of the symbolic conjugate carries a linear form
//! in those unknowns, and second-chart holomorphy turns into one homogeneous
//! equation per forbidden monomial (`z` exponent above `u` exponent).
//!
//! Two row selections matter:
//!
//! - the *necessity* system keeps only forbidden rows with `u <= u_max` and
//!   `z <= z_max - 2j`. Such a row reads nothing outside the box (the worst
//!   stretch is the lower-left conjugate entry, which shifts `z` by `2j`), so
//!   truncating any exact gauge solution to the box still satisfies every
//!   kept row and keeps its origin determinant. If the determinant form
//!   vanishes on this system's whole nullspace, no isomorphism exists.
//! - the *sufficiency* system keeps every forbidden row of the symbolic
//!   conjugate. A nullspace vector with nonzero origin determinant is then a
//!   complete witness: its conjugate is exactly V-holomorphic.

use std::collections::BTreeMap;

use crate::bundles::CanonicalForm;
use crate::error::Error;
use crate::laurent::{BiLaurent, Monomial};
use crate::linalg::{ExactMatrix, QuadraticForm};
use crate::scalar::GaussianRational;

/// Which gauge entry a column belongs to.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum GaugeEntry {
    A,
    B,
    C,
    D,
}

impl GaugeEntry {
    pub const ALL: [GaugeEntry; 4] = [GaugeEntry::A, GaugeEntry::B, GaugeEntry::C, GaugeEntry::D];

    fn index(self) -> usize {
        match self {
            GaugeEntry::A => 0,
            GaugeEntry::B => 1,
            GaugeEntry::C => 2,
            GaugeEntry::D => 3,
        }
    }
}

/// Which conjugate entry a row came from.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum ConjEntry {
    Alpha,
    Beta,
    Gamma,
    Delta,
}

impl ConjEntry {
    pub const ALL: [ConjEntry; 4] = [
        ConjEntry::Alpha,
        ConjEntry::Beta,
        ConjEntry::Gamma,
        ConjEntry::Delta,
    ];
}

/// Column indexing: column-major over `(entry, u, z)`, `z` fastest. One
/// column per unknown gauge coefficient in the box `u <= u_max`,
/// `0 <= z <= z_max`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ColumnLayout {
    pub u_max: i32,
    pub z_max: i32,
}

impl ColumnLayout {
    pub fn new(u_max: i32, z_max: i32) -> Self {
        assert!(u_max >= 0 && z_max >= 0);
        Self { u_max, z_max }
    }

    fn box_size(&self) -> usize {
        (self.u_max as usize + 1) * (self.z_max as usize + 1)
    }

    pub fn ncols(&self) -> usize {
        4 * self.box_size()
    }

    pub fn contains(&self, u: i32, z: i32) -> bool {
        u >= 0 && u <= self.u_max && z >= 0 && z <= self.z_max
    }

    pub fn column(&self, entry: GaugeEntry, u: i32, z: i32) -> usize {
        assert!(self.contains(u, z), "({u}, {z}) outside the box");
        (entry.index() * (self.u_max as usize + 1) + u as usize) * (self.z_max as usize + 1)
            + z as usize
    }

    pub fn decode(&self, col: usize) -> (GaugeEntry, i32, i32) {
        assert!(col < self.ncols());
        let width = self.z_max as usize + 1;
        let z = (col % width) as i32;
        let rest = col / width;
        let height = self.u_max as usize + 1;
        let u = (rest % height) as i32;
        (GaugeEntry::ALL[rest / height], u, z)
    }
}

/// Sparse linear form over column indices.
#[derive(Clone, Default, Debug)]
pub(crate) struct LinForm {
    coeffs: BTreeMap<usize, GaussianRational>,
}

impl LinForm {
    fn singleton(col: usize) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(col, GaussianRational::one());
        Self { coeffs }
    }

    fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn add_scaled(&mut self, other: &LinForm, k: &GaussianRational) {
        if k.is_zero() {
            return;
        }
        for (col, coef) in &other.coeffs {
            let add = coef * k;
            match self.coeffs.entry(*col) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(add);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let sum = e.get() + &add;
                    if sum.is_zero() {
                        e.remove();
                    } else {
                        *e.get_mut() = sum;
                    }
                }
            }
        }
    }

    pub(crate) fn to_dense(&self, ncols: usize) -> Vec<GaussianRational> {
        let mut row = vec![GaussianRational::zero(); ncols];
        for (col, coef) in &self.coeffs {
            row[*col] = coef.clone();
        }
        row
    }
}

/// A Laurent expression whose coefficients are linear forms in the unknowns.
#[derive(Clone, Default)]
pub(crate) struct LinLaurent {
    terms: BTreeMap<Monomial, LinForm>,
}

impl LinLaurent {
    fn zero() -> Self {
        Self::default()
    }

    /// The generic polynomial `sum_{u, z in box} x_{entry, u, z} u^u z^z`.
    fn generic(layout: ColumnLayout, entry: GaugeEntry) -> Self {
        let mut terms = BTreeMap::new();
        for u in 0..=layout.u_max {
            for z in 0..=layout.z_max {
                terms.insert(
                    Monomial::new(u, z),
                    LinForm::singleton(layout.column(entry, u, z)),
                );
            }
        }
        Self { terms }
    }

    /// Sum of `x_col u^u z^z` over an explicit slot list (used for systems
    /// whose unknowns are not gauge boxes).
    pub(crate) fn from_slots(slots: &[(usize, Monomial)]) -> Self {
        let mut terms = BTreeMap::new();
        for (col, m) in slots {
            terms.insert(*m, LinForm::singleton(*col));
        }
        Self { terms }
    }

    fn add_scaled_shifted(&mut self, other: &LinLaurent, k: &GaussianRational, du: i32, dz: i32) {
        if k.is_zero() {
            return;
        }
        for (m, lf) in &other.terms {
            let target = Monomial::new(m.u + du, m.z + dz);
            assert!(target.u >= 0);
            let slot = self.terms.entry(target).or_default();
            slot.add_scaled(lf, k);
        }
        self.terms.retain(|_, lf| !lf.is_empty());
    }

    /// Adds `poly * other` (a known polynomial times an unknown-linear one).
    pub(crate) fn add_product(&mut self, poly: &BiLaurent, other: &LinLaurent, sign: i64, dz: i32) {
        for (mp, cp) in poly.terms() {
            let k = if sign < 0 { -cp } else { cp.clone() };
            self.add_scaled_shifted(other, &k, mp.u, mp.z + dz);
        }
    }

    pub(crate) fn shifted(&self, du: i32, dz: i32) -> Self {
        let mut out = Self::zero();
        out.add_scaled_shifted(self, &GaussianRational::one(), du, dz);
        out
    }

    pub(crate) fn rows(&self) -> impl Iterator<Item = (Monomial, &LinForm)> {
        self.terms.iter().map(|(m, lf)| (*m, lf))
    }
}

/// One row's provenance: which conjugate entry and which monomial of it.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct RowLabel {
    pub entry: ConjEntry,
    pub u: i32,
    pub z: i32,
}

/// A fully materialized linear system over gauge-box unknowns.
pub struct AssembledSystem {
    pub matrix: ExactMatrix,
    pub layout: ColumnLayout,
    pub row_labels: Vec<RowLabel>,
}

/// The four symbolic conjugate entries for generic gauge unknowns on the box.
pub(crate) fn symbolic_conjugate(
    p: &BiLaurent,
    p2: &BiLaurent,
    j: i32,
    layout: ColumnLayout,
) -> [LinLaurent; 4] {
    let a = LinLaurent::generic(layout, GaugeEntry::A);
    let b = LinLaurent::generic(layout, GaugeEntry::B);
    let c = LinLaurent::generic(layout, GaugeEntry::C);
    let d = LinLaurent::generic(layout, GaugeEntry::D);

    // alpha = a + z^-j p2 c
    let mut alpha = a.clone();
    alpha.add_product(p2, &c, 1, -j);

    // beta = z^2j b + z^j (p2 d - a p) - p p2 c
    let mut beta = b.shifted(0, 2 * j);
    beta.add_product(p2, &d, 1, j);
    beta.add_product(p, &a, -1, j);
    beta.add_product(&p.mul(p2), &c, -1, 0);

    // gamma = z^-2j c
    let gamma = c.shifted(0, -2 * j);

    // delta = d - z^-j p c
    let mut delta = d;
    delta.add_product(p, &c, -1, -j);

    [alpha, beta, gamma, delta]
}

/// Materializes the forbidden rows of a symbolic conjugate that pass `keep`.
pub(crate) fn assemble_rows(
    sym: &[LinLaurent; 4],
    layout: ColumnLayout,
    mut keep: impl FnMut(Monomial) -> bool,
) -> AssembledSystem {
    let ncols = layout.ncols();
    let mut rows = Vec::new();
    let mut row_labels = Vec::new();
    for (entry, lin) in ConjEntry::ALL.iter().zip(sym.iter()) {
        for (m, lf) in lin.rows() {
            if m.z <= m.u || lf.is_empty() || !keep(m) {
                continue;
            }
            rows.push(lf.to_dense(ncols));
            row_labels.push(RowLabel {
                entry: *entry,
                u: m.u,
                z: m.z,
            });
        }
    }
    let matrix = if rows.is_empty() {
        ExactMatrix::zeros(0, ncols)
    } else {
        ExactMatrix::from_rows(rows)
    };
    AssembledSystem {
        matrix,
        layout,
        row_labels,
    }
}

/// Necessity system for a pair of forms: forbidden rows restricted to
/// `u <= u_max`, `z <= z_max - 2j`, over gauge unknowns on the layout box.
pub fn assemble_necessity_system(
    p: &CanonicalForm,
    p2: &CanonicalForm,
    layout: ColumnLayout,
) -> Result<AssembledSystem, Error> {
    if p.level() != p2.level() {
        return Err(Error::LevelMismatch(p.level(), p2.level()));
    }
    let j = p.level();
    let sym = symbolic_conjugate(p.perturbation(), p2.perturbation(), j, layout);
    let mz = layout.z_max - 2 * j;
    Ok(assemble_rows(&sym, layout, |m| {
        m.u <= layout.u_max && m.z <= mz
    }))
}

/// Sufficiency system: every forbidden row of the symbolic conjugate.
pub fn assemble_sufficiency_system(
    p: &CanonicalForm,
    p2: &CanonicalForm,
    layout: ColumnLayout,
) -> Result<AssembledSystem, Error> {
    if p.level() != p2.level() {
        return Err(Error::LevelMismatch(p.level(), p2.level()));
    }
    let sym = symbolic_conjugate(p.perturbation(), p2.perturbation(), p.level(), layout);
    Ok(assemble_rows(&sym, layout, |_| true))
}

/// The origin determinant `x_a00 x_d00 - x_b00 x_c00` as a quadratic form on
/// layout columns.
pub fn det_origin_form(layout: ColumnLayout) -> QuadraticForm {
    QuadraticForm::new(
        layout.ncols(),
        vec![
            (
                layout.column(GaugeEntry::A, 0, 0),
                layout.column(GaugeEntry::D, 0, 0),
                GaussianRational::one(),
            ),
            (
                layout.column(GaugeEntry::B, 0, 0),
                layout.column(GaugeEntry::C, 0, 0),
                -&GaussianRational::one(),
            ),
        ],
    )
}

/// Reads a gauge candidate off a column vector.
pub(crate) fn gauge_from_vector(
    layout: ColumnLayout,
    v: &[GaussianRational],
) -> crate::iso::GaugeCandidate {
    assert_eq!(v.len(), layout.ncols());
    let mut entries = [
        BiLaurent::zero(),
        BiLaurent::zero(),
        BiLaurent::zero(),
        BiLaurent::zero(),
    ];
    for (col, coef) in v.iter().enumerate() {
        if coef.is_zero() {
            continue;
        }
        let (entry, u, z) = layout.decode(col);
        let term = BiLaurent::term(u, z, coef.clone()).unwrap();
        entries[entry.index()] = entries[entry.index()].add(&term);
    }
    let [a, b, c, d] = entries;
    crate::iso::GaugeCandidate::new(a, b, c, d).expect("box exponents are nonnegative")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iso::conjugate;
    use crate::linalg::SpanEvaluation;

    fn int_term(u: i32, z: i32, n: i64) -> BiLaurent {
        BiLaurent::term(u, z, GaussianRational::from_integers(n, 0)).unwrap()
    }

    #[test]
    fn layout_roundtrips_and_is_column_major() {
        let layout = ColumnLayout::new(2, 3);
        assert_eq!(layout.ncols(), 4 * 3 * 4);
        let mut seen = vec![false; layout.ncols()];
        for e in GaugeEntry::ALL {
            for u in 0..=2 {
                for z in 0..=3 {
                    let col = layout.column(e, u, z);
                    assert!(!seen[col]);
                    seen[col] = true;
                    assert_eq!(layout.decode(col), (e, u, z));
                }
            }
        }
        assert!(seen.iter().all(|&s| s));
        // z moves fastest, then u, then entry.
        assert_eq!(layout.column(GaugeEntry::A, 0, 0), 0);
        assert_eq!(layout.column(GaugeEntry::A, 0, 1), 1);
        assert_eq!(layout.column(GaugeEntry::A, 1, 0), 4);
        assert_eq!(layout.column(GaugeEntry::B, 0, 0), 12);
    }

    /// Evaluates a symbolic conjugate at a concrete gauge vector and compares
    /// against the exact conjugate, entry by entry.
    #[test]
    fn symbolic_conjugate_matches_exact_conjugation() {
        let j = 2;
        let p = CanonicalForm::new(j, int_term(1, 0, 1).add(&int_term(2, 1, 3))).unwrap();
        let p2 = CanonicalForm::new(j, int_term(1, 1, -2)).unwrap();
        let layout = ColumnLayout::new(3, 4);
        let sym = symbolic_conjugate(p.perturbation(), p2.perturbation(), j, layout);

        // A concrete gauge inside the box.
        let a = int_term(0, 0, 2).add(&int_term(1, 1, 5));
        let b = int_term(2, 0, -1);
        let c = int_term(3, 2, 7).add(&int_term(0, 0, 1));
        let d = int_term(0, 0, 3).add(&int_term(2, 4, -4));
        let g = crate::iso::GaugeCandidate::new(a, b, c, d).unwrap();

        let mut v = vec![GaussianRational::zero(); layout.ncols()];
        for (entry, poly) in [
            (GaugeEntry::A, g.a()),
            (GaugeEntry::B, g.b()),
            (GaugeEntry::C, g.c()),
            (GaugeEntry::D, g.d()),
        ] {
            for (m, coef) in poly.terms() {
                v[layout.column(entry, m.u, m.z)] = coef.clone();
            }
        }

        let exact = conjugate(&p, &p2, &g).unwrap();
        for (lin, want) in sym.iter().zip([&exact.alpha, &exact.beta, &exact.gamma, &exact.delta])
        {
            let mut got = BiLaurent::zero();
            for (m, lf) in lin.rows() {
                let mut acc = GaussianRational::zero();
                for (col, coef) in lf.to_dense(layout.ncols()).iter().enumerate() {
                    if !coef.is_zero() && !v[col].is_zero() {
                        acc = &acc + &(coef * &v[col]);
                    }
                }
                got = got.add(&BiLaurent::term(m.u, m.z, acc).unwrap());
            }
            assert_eq!(&got, want);
        }
    }

    #[test]
    fn necessity_rows_stay_inside_the_safe_strip() {
        let j = 2;
        let p = CanonicalForm::new(j, int_term(1, 0, 1)).unwrap();
        let p2 = CanonicalForm::zero(j).unwrap();
        let layout = ColumnLayout::new(4, 8);
        let nec = assemble_necessity_system(&p, &p2, layout).unwrap();
        assert!(!nec.row_labels.is_empty());
        for label in &nec.row_labels {
            assert!(label.z > label.u, "only forbidden monomials become rows");
            assert!(label.u <= 4);
            assert!(label.z <= 8 - 2 * j);
        }
        let suf = assemble_sufficiency_system(&p, &p2, layout).unwrap();
        assert!(suf.row_labels.len() > nec.row_labels.len());
        for label in &suf.row_labels {
            assert!(label.z > label.u);
        }
    }

    #[test]
    fn hand_refutation_rows_appear() {
        // For p = u vs p2 = 0 at level 2, beta = z^4 b - z^2 u a. The row at
        // (u=1, z=2) pins a(0,0); the row at (u=0, z=4) pins b(0,0).
        let j = 2;
        let p = CanonicalForm::new(j, int_term(1, 0, 1)).unwrap();
        let p2 = CanonicalForm::zero(j).unwrap();
        let layout = ColumnLayout::new(4, 8);
        let nec = assemble_necessity_system(&p, &p2, layout).unwrap();
        let beta_rows: Vec<&RowLabel> = nec
            .row_labels
            .iter()
            .filter(|l| l.entry == ConjEntry::Beta)
            .collect();
        assert!(beta_rows.iter().any(|l| l.u == 1 && l.z == 2));
        assert!(beta_rows.iter().any(|l| l.u == 0 && l.z == 4));
    }

    #[test]
    fn origin_determinant_vanishes_on_the_refuted_nullspace() {
        // The full pipeline on the hand-checked non-isomorphic pair.
        let j = 2;
        let p = CanonicalForm::new(j, int_term(1, 0, 1)).unwrap();
        let p2 = CanonicalForm::zero(j).unwrap();
        let layout = ColumnLayout::new(4, 8);
        let nec = assemble_necessity_system(&p, &p2, layout).unwrap();
        let basis = nec.matrix.nullspace();
        assert!(!basis.is_empty());
        let q = det_origin_form(layout);
        assert_eq!(q.evaluate_on_span(&basis), SpanEvaluation::VanishesIdentically);
    }

    #[test]
    fn identity_pair_nullspace_carries_an_invertible_gauge() {
        let j = 2;
        let p = CanonicalForm::new(j, int_term(1, 0, 1)).unwrap();
        let layout = ColumnLayout::new(4, 8);
        let suf = assemble_sufficiency_system(&p, &p, layout).unwrap();
        let basis = suf.matrix.nullspace();
        let q = det_origin_form(layout);
        match q.evaluate_on_span(&basis) {
            SpanEvaluation::Witness(w) => {
                let g = gauge_from_vector(layout, &w);
                let conj = conjugate(&p, &p, &g).unwrap();
                assert!(conj.is_v_holomorphic());
                assert!(!g.det_at_origin().is_zero());
            }
            SpanEvaluation::VanishesIdentically => panic!("identity gauge must be reachable"),
        }
    }
}
