//! Canonical transition data for rank-2 bundles on the blown-up plane.
//!
//! A bundle at level `j >= 1` is presented by the transition matrix
//! `[[z^j, p], [0, z^-j]]` between the two charts. The perturbation `p` can
//! always be normalized to a polynomial supported on a finite window of
//! exponents, and that normalized window is what [`CanonicalForm`] stores.
//! Two canonical forms can still present isomorphic bundles; deciding that
//! is the job of [`crate::iso`].

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::laurent::{BiLaurent, Monomial};
use crate::scalar::GaussianRational;

/// Exponent window for level `j`: all `(i, l)` with `1 <= i <= 2j-2` and
/// `i-j+1 <= l <= j-1`, meaning the term `u^i z^l` is admissible. Ordered by
/// `(i, l)`. Level 1 has an empty window.
pub fn window(j: i32) -> Result<Vec<Monomial>, Error> {
    if j < 1 {
        return Err(Error::InvalidLevel(j as i64));
    }
    let mut out = Vec::new();
    for i in 1..=(2 * j - 2) {
        for l in (i - j + 1)..=(j - 1) {
            out.push(Monomial::new(i, l));
        }
    }
    Ok(out)
}

/// Membership test matching [`window`].
pub fn window_contains(j: i32, u: i32, z: i32) -> bool {
    j >= 1 && u >= 1 && u <= 2 * j - 2 && z >= u - j + 1 && z <= j - 1
}

/// A level together with a perturbation supported on that level's window.
#[derive(Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    j: i32,
    p: BiLaurent,
}

impl CanonicalForm {
    pub fn new(j: i32, p: BiLaurent) -> Result<Self, Error> {
        if j < 1 {
            return Err(Error::InvalidLevel(j as i64));
        }
        for (m, _) in p.terms() {
            if !window_contains(j, m.u, m.z) {
                return Err(Error::OutsideWindow { j, u: m.u, z: m.z });
            }
        }
        Ok(Self { j, p })
    }

    /// The unperturbed form `[[z^j, 0], [0, z^-j]]`.
    pub fn zero(j: i32) -> Result<Self, Error> {
        Self::new(j, BiLaurent::zero())
    }

    pub fn level(&self) -> i32 {
        self.j
    }

    pub fn perturbation(&self) -> &BiLaurent {
        &self.p
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero()
    }

    /// The full transition matrix `[[z^j, p], [0, z^-j]]`.
    pub fn transition_matrix(&self) -> [[BiLaurent; 2]; 2] {
        let zj = BiLaurent::term(0, self.j, GaussianRational::one()).unwrap();
        let zmj = BiLaurent::term(0, -self.j, GaussianRational::one()).unwrap();
        [[zj, self.p.clone()], [BiLaurent::zero(), zmj]]
    }

    /// Level-raising map: `p` at level `j` goes to `z u^2 p` at level `j+1`.
    /// Index-wise each `(i, l)` moves to `(i+2, l+1)`, which lands inside the
    /// level `j+1` window, so this never fails.
    pub fn embed(&self) -> CanonicalForm {
        let p = self.p.mul_monomial(2, 1);
        CanonicalForm::new(self.j + 1, p).expect("shifted window stays admissible")
    }

    /// True when this form is the [`embed`](Self::embed) image of a level
    /// `j-1` form: every coefficient with `u` exponent 1 or 2 vanishes.
    /// Level 1 has no predecessor, so the answer there is always false.
    pub fn in_embedded_image(&self) -> bool {
        self.j >= 2 && self.p.terms().all(|(m, _)| m.u != 1 && m.u != 2)
    }

    /// Inverts [`embed`](Self::embed) when possible: defined exactly when
    /// [`in_embedded_image`](Self::in_embedded_image) holds.
    pub fn embed_preimage(&self) -> Option<CanonicalForm> {
        if !self.in_embedded_image() {
            return None;
        }
        let p = self
            .p
            .div_u_exact(2)
            .expect("window terms with u >= 3 divide by u^2")
            .shift_z(-1);
        Some(CanonicalForm::new(self.j - 1, p).expect("unshifted window stays admissible"))
    }

    /// Deterministic pseudo-random form: every window slot gets a coefficient
    /// with numerators in `[-bound, bound]` and denominators in `[1, bound]`
    /// for both real and imaginary parts. Same arguments, same form.
    pub fn random(j: i32, seed: u64, bound: u32) -> Result<CanonicalForm, Error> {
        if bound < 1 {
            return Err(Error::BadCampaignConfig(format!(
                "coefficient bound must be at least 1, got {bound}"
            )));
        }
        let slots = window(j)?;
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, j, bound));
        let b = bound as i64;
        let mut terms = Vec::new();
        for m in slots {
            let re_n = rng.gen_range(-b..=b);
            let re_d = rng.gen_range(1..=b);
            let im_n = rng.gen_range(-b..=b);
            let im_d = rng.gen_range(1..=b);
            terms.push((m.u, m.z, GaussianRational::from_fractions(re_n, re_d, im_n, im_d)));
        }
        let p = BiLaurent::from_terms(terms)?;
        CanonicalForm::new(j, p)
    }
}

fn mix_seed(seed: u64, j: i32, bound: u32) -> u64 {
    let mut x = seed
        ^ (j as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
        ^ (bound as u64).wrapping_mul(0xd1b5_4a32_d192_ed03);
    // splitmix64 finalizer
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

impl std::fmt::Debug for CanonicalForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CanonicalForm(j={}, p={})", self.j, self.p)
    }
}

#[derive(Serialize, Deserialize)]
struct FormRecord {
    j: i32,
    coeffs: BiLaurent,
}

impl Serialize for CanonicalForm {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        FormRecord {
            j: self.j,
            coeffs: self.p.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CanonicalForm {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rec = FormRecord::deserialize(deserializer)?;
        CanonicalForm::new(rec.j, rec.coeffs).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn int_term(u: i32, z: i32, n: i64) -> BiLaurent {
        BiLaurent::term(u, z, GaussianRational::from_integers(n, 0)).unwrap()
    }

    #[test]
    fn window_sizes_follow_the_closed_formula() {
        let expected = [0usize, 3, 10, 21, 36, 55, 78, 105];
        for (k, want) in expected.iter().enumerate() {
            let j = (k + 1) as i32;
            let w = window(j).unwrap();
            assert_eq!(w.len(), *want, "level {j}");
            assert_eq!(w.len() as i32, (j - 1) * (2 * j - 1), "level {j}");
        }
        assert!(window(0).is_err());
        assert!(window(-3).is_err());
    }

    #[test]
    fn level_two_window_is_exactly_three_slots() {
        let w = window(2).unwrap();
        assert_eq!(
            w,
            vec![Monomial::new(1, 0), Monomial::new(1, 1), Monomial::new(2, 1)]
        );
        for m in &w {
            assert!(window_contains(2, m.u, m.z));
        }
        assert!(!window_contains(2, 1, -1));
        assert!(!window_contains(2, 3, 1));
        assert!(!window_contains(2, 0, 0));
        assert!(!window_contains(2, 2, 0));
    }

    #[test]
    fn construction_rejects_support_outside_the_window() {
        assert!(CanonicalForm::new(2, int_term(1, 0, 2)).is_ok());
        assert!(matches!(
            CanonicalForm::new(2, int_term(2, 0, 1)),
            Err(Error::OutsideWindow { j: 2, u: 2, z: 0 })
        ));
        assert!(matches!(
            CanonicalForm::new(0, BiLaurent::zero()),
            Err(Error::InvalidLevel(0))
        ));
        // Level 1 admits only the zero perturbation.
        assert!(CanonicalForm::new(1, int_term(1, 0, 1)).is_err());
        assert!(CanonicalForm::zero(1).unwrap().is_zero());
    }

    #[test]
    fn transition_matrix_shape() {
        let cf = CanonicalForm::new(2, int_term(1, 1, 3)).unwrap();
        let m = cf.transition_matrix();
        assert_eq!(m[0][0], int_term(0, 2, 1));
        assert_eq!(m[0][1], int_term(1, 1, 3));
        assert!(m[1][0].is_zero());
        assert_eq!(m[1][1], int_term(0, -2, 1));
    }

    #[test]
    fn embed_moves_each_index_up_and_right() {
        // 2u + 3zu + 5zu^2 at level 2 -> 2zu^3 + 3z^2u^3 + 5z^2u^4 at level 3.
        let p = int_term(1, 0, 2).add(&int_term(1, 1, 3)).add(&int_term(2, 1, 5));
        let cf = CanonicalForm::new(2, p).unwrap();
        let img = cf.embed();
        assert_eq!(img.level(), 3);
        let want = int_term(3, 1, 2).add(&int_term(3, 2, 3)).add(&int_term(4, 2, 5));
        assert_eq!(img.perturbation(), &want);
    }

    #[test]
    fn image_membership_is_vanishing_of_low_u_rows() {
        // u z^-1 is admissible at level 3 and has u exponent 1.
        let not_image = CanonicalForm::new(3, int_term(1, -1, 1)).unwrap();
        assert!(!not_image.in_embedded_image());
        assert!(not_image.embed_preimage().is_none());

        // u^3 z at level 3 has no u in {1, 2}: it is z u^2 * (u) from level 2.
        let image = CanonicalForm::new(3, int_term(3, 1, 7)).unwrap();
        assert!(image.in_embedded_image());
        let pre = image.embed_preimage().unwrap();
        assert_eq!(pre.level(), 2);
        assert_eq!(pre.perturbation(), &int_term(1, 0, 7));

        // Level 1 has no predecessor level.
        let ground = CanonicalForm::zero(1).unwrap();
        assert!(!ground.in_embedded_image());
        assert!(ground.embed_preimage().is_none());

        // The zero form at level >= 2 is the image of the zero form.
        let z2 = CanonicalForm::zero(2).unwrap();
        assert!(z2.in_embedded_image());
        assert!(z2.embed_preimage().unwrap().is_zero());
    }

    #[test]
    fn random_forms_are_deterministic_and_admissible() {
        let a = CanonicalForm::random(3, 41, 3).unwrap();
        let b = CanonicalForm::random(3, 41, 3).unwrap();
        assert_eq!(a, b);
        let c = CanonicalForm::random(3, 42, 3).unwrap();
        assert_ne!(a, c);
        assert!(CanonicalForm::random(2, 7, 0).is_err());
        // Level 1 window is empty, so every random form there is zero.
        assert!(CanonicalForm::random(1, 99, 3).unwrap().is_zero());
    }

    #[test]
    fn serde_carries_level_and_coefficients() {
        let cf = CanonicalForm::new(2, int_term(2, 1, 4)).unwrap();
        let json = serde_json::to_string(&cf).unwrap();
        assert!(json.contains("\"j\":2"));
        assert!(json.contains("\"coeffs\""));
        let back: CanonicalForm = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cf);

        let outside = r#"{"j": 2, "coeffs": [{"u": 2, "z": 0, "re": "1", "im": "0"}]}"#;
        assert!(serde_json::from_str::<CanonicalForm>(outside).is_err());
        let bad_level = r#"{"j": 0, "coeffs": []}"#;
        assert!(serde_json::from_str::<CanonicalForm>(bad_level).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn embed_preimage_inverts_embed(j in 1i32..5, seed in 0u64..500) {
            let cf = CanonicalForm::random(j, seed, 4).unwrap();
            let img = cf.embed();
            prop_assert_eq!(img.level(), j + 1);
            prop_assert!(img.in_embedded_image());
            let back = img.embed_preimage().unwrap();
            prop_assert_eq!(back, cf);
        }

        #[test]
        fn image_test_agrees_with_preimage_definedness(j in 1i32..5, seed in 0u64..500) {
            let cf = CanonicalForm::random(j, seed, 4).unwrap();
            prop_assert_eq!(cf.in_embedded_image(), cf.embed_preimage().is_some());
        }
    }
}
