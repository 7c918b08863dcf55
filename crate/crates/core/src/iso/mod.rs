//! Gauge equivalence of canonical forms.
//!
//! A gauge candidate is a matrix `G = [[a, b], [c, d]]` whose entries are
//! polynomials in `(z, u)`. Conjugating the level-`j` transition matrix of a
//! form `p` by `G` and asking the result to be the transition matrix of `p2`
//! produces the matrix [`conjugate`]:
//!
//! ```text
//! alpha = a + z^-j  p2 c          beta  = z^2j b + z^j (p2 d - a p) - p p2 c
//! gamma = z^-2j c                 delta = d - z^-j p c
//! ```
//!
//! `p` and `p2` present isomorphic bundles exactly when some `G` makes all
//! four entries holomorphic on the second chart and stays invertible at the
//! origin of the exceptional curve, which is the single scalar condition
//! `a(0,0) d(0,0) - b(0,0) c(0,0) != 0`.
//!
//! [`decide_iso`] searches for such a `G` by exact linear algebra and returns
//! a self-contained [`Certificate`] or a refutation; [`verify_certificate`]
//! rechecks a certificate from scratch, with no truncation anywhere.

mod decide;
mod system;

pub use decide::{decide_iso, sample_orbit, sample_orbit_with_units, splits_at_level};
pub use system::{
    assemble_necessity_system, assemble_sufficiency_system, det_origin_form, AssembledSystem,
    ColumnLayout, ConjEntry, GaugeEntry, RowLabel,
};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bundles::CanonicalForm;
use crate::error::Error;
use crate::laurent::BiLaurent;
use crate::scalar::GaussianRational;

/// A 2x2 matrix of `(z, u)`-polynomials, the candidate change of frame on
/// the first chart. Entries are checked to have no negative `z` powers.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GaugeCandidate {
    a: BiLaurent,
    b: BiLaurent,
    c: BiLaurent,
    d: BiLaurent,
}

impl GaugeCandidate {
    pub fn new(a: BiLaurent, b: BiLaurent, c: BiLaurent, d: BiLaurent) -> Result<Self, Error> {
        for (entry, poly) in [('a', &a), ('b', &b), ('c', &c), ('d', &d)] {
            if let Some((m, _)) = poly.terms().find(|(m, _)| m.z < 0) {
                return Err(Error::GaugeNotHolomorphic {
                    entry,
                    u: m.u,
                    z: m.z,
                });
            }
        }
        Ok(Self { a, b, c, d })
    }

    pub fn identity() -> Self {
        Self::new(BiLaurent::one(), BiLaurent::zero(), BiLaurent::zero(), BiLaurent::one())
            .unwrap()
    }

    /// `diag(lambda, mu)`.
    pub fn diagonal(lambda: GaussianRational, mu: GaussianRational) -> Result<Self, Error> {
        Self::new(
            BiLaurent::term(0, 0, lambda)?,
            BiLaurent::zero(),
            BiLaurent::zero(),
            BiLaurent::term(0, 0, mu)?,
        )
    }

    pub fn a(&self) -> &BiLaurent {
        &self.a
    }

    pub fn b(&self) -> &BiLaurent {
        &self.b
    }

    pub fn c(&self) -> &BiLaurent {
        &self.c
    }

    pub fn d(&self) -> &BiLaurent {
        &self.d
    }

    /// `a(0,0) d(0,0) - b(0,0) c(0,0)`: the determinant at the origin, which
    /// is the only part of the determinant not forced by holomorphy on both
    /// charts.
    pub fn det_at_origin(&self) -> GaussianRational {
        &(&self.a.coeff(0, 0) * &self.d.coeff(0, 0))
            - &(&self.b.coeff(0, 0) * &self.c.coeff(0, 0))
    }

    /// Largest `u` and `z` exponent over all four entries.
    pub fn degree_box(&self) -> (i32, i32) {
        let u = [&self.a, &self.b, &self.c, &self.d]
            .iter()
            .filter_map(|p| p.max_u())
            .max()
            .unwrap_or(0);
        let z = [&self.a, &self.b, &self.c, &self.d]
            .iter()
            .filter_map(|p| p.max_z())
            .max()
            .unwrap_or(0);
        (u, z)
    }
}

/// The conjugated transition matrix, expanded into its four entries.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConjugateMatrix {
    pub alpha: BiLaurent,
    pub beta: BiLaurent,
    pub gamma: BiLaurent,
    pub delta: BiLaurent,
}

impl ConjugateMatrix {
    /// All four entries holomorphic on the second chart.
    pub fn is_v_holomorphic(&self) -> bool {
        self.alpha.is_v_holomorphic()
            && self.beta.is_v_holomorphic()
            && self.gamma.is_v_holomorphic()
            && self.delta.is_v_holomorphic()
    }

    pub fn entries(&self) -> [(&'static str, &BiLaurent); 4] {
        [
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("gamma", &self.gamma),
            ("delta", &self.delta),
        ]
    }
}

/// Exact conjugation of the level-`j` transition matrix of `p` toward `p2`
/// by the gauge `g`. No truncation: the result is the literal polynomial
/// identity, so a V-holomorphic result plus an invertible origin determinant
/// is a complete isomorphism proof.
pub fn conjugate(
    p: &CanonicalForm,
    p2: &CanonicalForm,
    g: &GaugeCandidate,
) -> Result<ConjugateMatrix, Error> {
    if p.level() != p2.level() {
        return Err(Error::LevelMismatch(p.level(), p2.level()));
    }
    let j = p.level();
    let pp = p.perturbation();
    let qq = p2.perturbation();

    let alpha = g.a.add(&qq.mul(&g.c).shift_z(-j));
    let beta = g
        .b
        .shift_z(2 * j)
        .add(&qq.mul(&g.d).sub(&g.a.mul(pp)).shift_z(j))
        .sub(&pp.mul(qq).mul(&g.c));
    let gamma = g.c.shift_z(-2 * j);
    let delta = g.d.sub(&pp.mul(&g.c).shift_z(-j));

    Ok(ConjugateMatrix {
        alpha,
        beta,
        gamma,
        delta,
    })
}

/// Truncation box for the linear systems: gauge entries range over
/// `u <= u_max`, `0 <= z <= z_max`, and deepening retries enlarge the box.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct TruncationParams {
    pub u_max: i32,
    pub z_max: i32,
    pub deepening_cap: u32,
}

impl TruncationParams {
    pub fn new(u_max: i32, z_max: i32, deepening_cap: u32) -> Self {
        Self {
            u_max,
            z_max,
            deepening_cap,
        }
    }

    /// Level defaults: `u_max = 2j`, `z_max = 4j`, two deepening rounds.
    pub fn defaults_for_level(j: i32) -> Self {
        Self::new(2 * j, 4 * j, 2)
    }

    /// Rejects boxes too small to express any witness at level `j`:
    /// `u_max >= 2j-2` and `z_max >= 2j+1`.
    pub fn validated_for_level(self, j: i32) -> Result<Self, Error> {
        let (u_min, z_min) = (2 * j - 2, 2 * j + 1);
        if self.u_max < u_min || self.z_max < z_min {
            return Err(Error::WindowTooSmall {
                j,
                u_max: self.u_max,
                z_max: self.z_max,
                u_min,
                z_min,
            });
        }
        Ok(self)
    }

    /// One deepening step: `u_max + 2`, `z_max + 4`.
    pub fn deepened(self) -> Self {
        Self::new(self.u_max + 2, self.z_max + 4, self.deepening_cap)
    }
}

/// A self-contained isomorphism proof: the two forms, the gauge, the box the
/// gauge was found in, and the sampling seed when one was involved.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Certificate {
    p: CanonicalForm,
    p2: CanonicalForm,
    gauge: GaugeCandidate,
    u_max: i32,
    z_max: i32,
    seed: u64,
}

impl Certificate {
    pub fn new(
        p: CanonicalForm,
        p2: CanonicalForm,
        gauge: GaugeCandidate,
        u_max: i32,
        z_max: i32,
        seed: u64,
    ) -> Result<Self, Error> {
        if p.level() != p2.level() {
            return Err(Error::LevelMismatch(p.level(), p2.level()));
        }
        Ok(Self {
            p,
            p2,
            gauge,
            u_max,
            z_max,
            seed,
        })
    }

    pub fn level(&self) -> i32 {
        self.p.level()
    }

    pub fn p(&self) -> &CanonicalForm {
        &self.p
    }

    pub fn p2(&self) -> &CanonicalForm {
        &self.p2
    }

    pub fn gauge(&self) -> &GaugeCandidate {
        &self.gauge
    }

    pub fn params(&self) -> (i32, i32) {
        (self.u_max, self.z_max)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Rechecks a certificate with no shared state and no truncation:
/// (a) the gauge fits the declared exponent box,
/// (b) the exact conjugate is holomorphic on the second chart,
/// (c) the determinant at the origin is nonzero.
pub fn verify_certificate(cert: &Certificate) -> bool {
    let (du, dz) = cert.gauge.degree_box();
    if du > cert.u_max || dz > cert.z_max {
        return false;
    }
    let Ok(conj) = conjugate(&cert.p, &cert.p2, &cert.gauge) else {
        return false;
    };
    conj.is_v_holomorphic() && !cert.gauge.det_at_origin().is_zero()
}

/// Lifts an isomorphism certificate one level up: if `G` carries `p` to `p2`
/// at level `j` and `u^2` divides its lower-left entry, then
/// `[[a, u^2 b], [c/u^2, d]]` carries the embedded forms at level `j+1`.
/// The conjugate transforms entrywise as `(alpha, z^2 u^2 beta, gamma/(z^2 u^2),
/// delta)`, which keeps second-chart holomorphy, and the origin determinant
/// is unchanged because `c(0,0) = 0` under the precondition.
pub fn transport_witness_up(cert: &Certificate) -> Result<Certificate, Error> {
    let Some(c_shifted) = cert.gauge.c().div_u_exact(2) else {
        return Err(Error::TransportPrecondition);
    };
    let gauge = GaugeCandidate::new(
        cert.gauge.a().clone(),
        cert.gauge.b().mul_monomial(2, 0),
        c_shifted,
        cert.gauge.d().clone(),
    )?;
    Certificate::new(
        cert.p.embed(),
        cert.p2.embed(),
        gauge,
        cert.u_max + 2,
        cert.z_max,
        cert.seed,
    )
}

/// Outcome of [`decide_iso`].
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum Verdict {
    /// Isomorphic, with a re-verifiable witness.
    CertifiedIso { certificate: Certificate },
    /// Not isomorphic: every gauge truncated to the reported box
    /// (`u <= U`, forbidden rows up to `z = Mz`) degenerates at the origin.
    CertifiedNonIso {
        #[serde(rename = "U")]
        u_max: i32,
        #[serde(rename = "Mz")]
        z_window: i32,
    },
    /// Neither certified within the deepening budget.
    Undecided {
        #[serde(rename = "U")]
        u_max: i32,
        #[serde(rename = "Z")]
        z_max: i32,
    },
}

impl Verdict {
    pub fn is_iso(&self) -> bool {
        matches!(self, Verdict::CertifiedIso { .. })
    }

    pub fn is_non_iso(&self) -> bool {
        matches!(self, Verdict::CertifiedNonIso { .. })
    }

    pub fn is_undecided(&self) -> bool {
        matches!(self, Verdict::Undecided { .. })
    }

    /// Same constructor, ignoring window sizes and certificate contents.
    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::CertifiedIso { .. } => "CertifiedIso",
            Verdict::CertifiedNonIso { .. } => "CertifiedNonIso",
            Verdict::Undecided { .. } => "Undecided",
        }
    }
}

#[derive(Serialize, Deserialize)]
struct GaugeRecord {
    a: BiLaurent,
    b: BiLaurent,
    c: BiLaurent,
    d: BiLaurent,
}

#[derive(Serialize, Deserialize)]
struct ParamsRecord {
    #[serde(rename = "U")]
    u: i32,
    #[serde(rename = "Z")]
    z: i32,
}

#[derive(Serialize, Deserialize)]
struct CertificateRecord {
    j: i32,
    p: BiLaurent,
    pprime: BiLaurent,
    #[serde(rename = "G")]
    g: GaugeRecord,
    params: ParamsRecord,
    seed: u64,
}

impl Serialize for Certificate {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        CertificateRecord {
            j: self.level(),
            p: self.p.perturbation().clone(),
            pprime: self.p2.perturbation().clone(),
            g: GaugeRecord {
                a: self.gauge.a.clone(),
                b: self.gauge.b.clone(),
                c: self.gauge.c.clone(),
                d: self.gauge.d.clone(),
            },
            params: ParamsRecord {
                u: self.u_max,
                z: self.z_max,
            },
            seed: self.seed,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Certificate {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rec = CertificateRecord::deserialize(deserializer)?;
        let p = CanonicalForm::new(rec.j, rec.p).map_err(D::Error::custom)?;
        let p2 = CanonicalForm::new(rec.j, rec.pprime).map_err(D::Error::custom)?;
        let gauge =
            GaugeCandidate::new(rec.g.a, rec.g.b, rec.g.c, rec.g.d).map_err(D::Error::custom)?;
        Certificate::new(p, p2, gauge, rec.params.u, rec.params.z, rec.seed)
            .map_err(D::Error::custom)
    }
}
