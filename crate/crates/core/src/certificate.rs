//! Self-verifying JSON certificates for accepted surfaces.
//!
//! A certificate stores the monad matrices together with every number derived
//! from them. [`verify`] recomputes each number from the stored matrices and
//! reports the first stage that disagrees.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adjunction::{verify_family, DivisorClass};
use crate::emod::{EMatrix, EMatrixJson};
use crate::error::{Error, Result};
use crate::monad::{
    check_ab, homology_dimensions, ideal_of_surface, surface_hilbert_polynomial, tate_left_window, Monad,
    CHI, DEGREE, SECTIONAL_GENUS,
};
use crate::poly::{GbOptions, HilbertPolynomial, Ideal, Poly, Smoothness};
use crate::search::{run_pipeline, tangent_dimension, ModuliReport, PipelineOptions, Stage, SECTION_DIMS};

pub const CERTIFICATE_SCHEMA: u32 = 1;

/// Stream used for the randomized steps (saturation, smoothness) when a
/// certificate is derived, so the derivation only depends on `B`.
const DERIVATION_SEED: u64 = 0x5eed_0ce7;

/// Where the matrices came from.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub construction: String,
    pub master_seed: Option<u64>,
    pub trial_index: Option<u64>,
    pub a1: Option<EMatrixJson>,
    pub n_invariant: Option<usize>,
    /// Hyperplane class in `Pic` of the blown-up plane, for the adjunction ledger.
    pub adjunction_class: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: u32,
    pub provenance: Provenance,
    pub b: EMatrixJson,
    pub a: EMatrixJson,
    pub betti_b: String,
    /// Twist-4 and twist-5 minimal syzygies of `A`.
    pub ab_syzygies: (usize, usize),
    /// `h⁰I_X(4 + k)` for `k = 1, 2, 3`.
    pub section_dimensions: Vec<usize>,
    pub ideal_generators: Vec<String>,
    pub hilbert_polynomial: String,
    pub smooth: String,
    pub quintic_residual: String,
    pub six_secant_lines: Option<usize>,
    pub tate_window: Vec<BTreeMap<i32, usize>>,
    pub tangent: ModuliReport,
}

pub fn smoothness_label(s: &Smoothness) -> String {
    match s {
        Smoothness::Smooth => "smooth".into(),
        Smoothness::Singular { .. } => "singular".into(),
        Smoothness::Undetermined(_) => "undetermined".into(),
    }
}

fn derivation_rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(DERIVATION_SEED)
}

impl Certificate {
    /// Run the full pipeline on `B` and record everything. Fails unless the
    /// pipeline accepts.
    pub fn derive(b: &EMatrix, provenance: Provenance) -> Result<Certificate> {
        let mut rng = derivation_rng();
        let out = run_pipeline(b, &mut rng, &PipelineOptions::default())?;
        if out.stage != Stage::Accepted {
            return Err(Error::Rejected { stage: format!("{:?}", out.stage), reason: out.reason.unwrap_or_default() });
        }
        let monad = out.monad.expect("accepted outcomes carry a monad");
        let surface = out.surface.expect("accepted outcomes carry an ideal");
        let f = monad.field().clone();
        let chk = check_ab(&monad.a);
        let mut section_dimensions = Vec::new();
        for k in 1..=3 {
            section_dimensions.push(homology_dimensions(&monad, k)?.2);
        }
        let residual = surface.quintic_residual(&mut rng)?;
        Ok(Certificate {
            schema: CERTIFICATE_SCHEMA,
            provenance,
            b: monad.b.to_json(),
            a: monad.a.to_json(),
            betti_b: out.betti.expect("accepted outcomes carry a table").to_string(),
            ab_syzygies: (chk.twist4, chk.twist5),
            section_dimensions,
            ideal_generators: surface.ideal.gens.iter().map(|g| g.to_text(&f)).collect(),
            hilbert_polynomial: surface.ideal.hilbert_polynomial()?.to_string(),
            smooth: smoothness_label(out.smoothness.as_ref().expect("accepted outcomes carry a verdict")),
            quintic_residual: residual.hilbert_polynomial,
            six_secant_lines: residual.lines,
            tate_window: tate_left_window(&monad, 2)?,
            tangent: tangent_dimension(&monad)?,
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }

    pub fn from_json_str(s: &str) -> Result<Certificate> {
        Ok(serde_json::from_str(s)?)
    }
}

/// One verification stage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub stage: &'static str,
    pub ok: bool,
    pub detail: String,
}

fn check(stage: &'static str, ok: bool, detail: impl Into<String>) -> Check {
    Check { stage, ok, detail: detail.into() }
}

/// Report of [`verify`]; stages run in order and stop at the first failure.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn failed_stage(&self) -> Option<&'static str> {
        self.checks.iter().find(|c| !c.ok).map(|c| c.stage)
    }
}

fn same_ideal(i: &Ideal<crate::ff::PrimeField>, j: &Ideal<crate::ff::PrimeField>) -> Result<bool> {
    let f = &i.field;
    let gi = i.groebner(&GbOptions::default())?;
    let gj = j.groebner(&GbOptions::default())?;
    Ok(j.gens.iter().all(|g| gi.contains(g, f)) && i.gens.iter().all(|g| gj.contains(g, f)))
}

/// Recompute every stored field of `cert` from its matrices.
pub fn verify(cert: &Certificate) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    macro_rules! stage {
        ($c:expr) => {{
            let c = $c;
            let ok = c.ok;
            checks.push(c);
            if !ok {
                return Ok(VerifyReport { checks });
            }
        }};
    }
    stage!(check(
        "schema",
        cert.schema == CERTIFICATE_SCHEMA,
        format!("schema {} (supported {CERTIFICATE_SCHEMA})", cert.schema)
    ));
    let (b, a) = match (EMatrix::from_json(&cert.b), EMatrix::from_json(&cert.a)) {
        (Ok(b), Ok(a)) => (b, a),
        (Err(e), _) | (_, Err(e)) => {
            stage!(check("parse", false, e.to_string()));
            unreachable!()
        }
    };
    let monad = match Monad::new(b.clone(), a) {
        Ok(m) => m,
        Err(e) => {
            stage!(check("complex", false, e.to_string()));
            unreachable!()
        }
    };
    stage!(check("complex", true, "B∘A = 0"));
    let f = monad.field().clone();

    let betti = b.betti_window(3)?.to_string();
    stage!(check("betti", betti == cert.betti_b, format!("recomputed\n{betti}")));

    let chk = check_ab(&monad.a);
    stage!(check(
        "check_ab",
        chk.ok && (chk.twist4, chk.twist5) == cert.ab_syzygies,
        format!("A syzygies: {} of twist 4, {} of twist 5", chk.twist4, chk.twist5)
    ));

    let mut dims = Vec::new();
    for k in 1..=3 {
        dims.push(homology_dimensions(&monad, k)?.2);
    }
    stage!(check(
        "sections",
        dims == cert.section_dimensions && dims == SECTION_DIMS,
        format!("homology dimensions {dims:?}")
    ));

    let gens: Vec<Poly> = cert.ideal_generators.iter().map(|g| Poly::parse(g, &f)).collect::<Result<_>>()?;
    let stored = Ideal::new(f.clone(), 5, gens)?;
    let hp = stored.hilbert_polynomial()?;
    let want = HilbertPolynomial::from_integers(&surface_hilbert_polynomial(DEGREE, SECTIONAL_GENUS, CHI));
    let mut rng = derivation_rng();
    let recomputed = ideal_of_surface(&monad, 7, &mut rng)?;
    let same = same_ideal(&stored, &recomputed.ideal)?;
    stage!(check(
        "polyring",
        hp.to_string() == cert.hilbert_polynomial && hp == want && same,
        format!("Hilbert polynomial {hp}; stored generators {} the monad's ideal", if same { "generate" } else { "differ from" })
    ));

    let verdict = smoothness_label(&stored.smoothness(2, &mut rng, PipelineOptions::default().smoothness_rows)?);
    stage!(check("smoothness", verdict == cert.smooth && verdict == "smooth", verdict));

    let residual = recomputed.quintic_residual(&mut rng)?;
    stage!(check(
        "residual",
        residual.hilbert_polynomial == cert.quintic_residual && residual.lines == cert.six_secant_lines,
        format!("quintic residual {} ({:?} lines)", residual.hilbert_polynomial, residual.lines)
    ));

    let window = tate_left_window(&monad, 2)?;
    let step1 = BTreeMap::from([(5, 13)]);
    stage!(check(
        "tate",
        window == cert.tate_window && window.first() == Some(&step1),
        format!("window {window:?}")
    ));

    let tangent = tangent_dimension(&monad)?;
    stage!(check(
        "tangent",
        tangent == cert.tangent && tangent.tangent_dim == 38,
        format!("ker dφ {}, tangent {}, moduli {}", tangent.kernel_dim, tangent.tangent_dim, tangent.moduli_dim)
    ));

    if let Some(a1) = &cert.provenance.a1 {
        let a1 = EMatrix::from_json(a1)?;
        let n = crate::search::N_invariant(&a1, &monad.b.select_columns(&[2, 3]))?;
        stage!(check("n_invariant", Some(n) == cert.provenance.n_invariant, format!("N = {n}")));
    }

    if let Some(class) = &cert.provenance.adjunction_class {
        let h: DivisorClass = class.parse()?;
        let rep = verify_family(&h, None, residual.lines);
        stage!(check(
            "adjunction",
            rep.ok(),
            format!("d = {}, π = {}, {} exceptional lines + {:?} six-secants", rep.invariants.degree, rep.invariants.sectional_genus, rep.exceptional_lines, rep.six_secants)
        ));
    }
    Ok(VerifyReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::Field;
    use crate::fixtures;
    use crate::search::{assemble_b, construct1_trial, QuotientSampler};

    pub(crate) fn search_surface() -> EMatrix {
        let b1 = fixtures::b1_f5();
        let s = QuotientSampler::new(&b1);
        let opts = PipelineOptions { full: false, ..Default::default() };
        let (rec, _) = construct1_trial(&s, &b1, 42, 5520, &opts).unwrap();
        assemble_b(&EMatrix::from_json(rec.b2.as_ref().unwrap()).unwrap(), &b1)
    }

    #[test]
    fn certificates_verify_and_detect_tampering() {
        let prov = Provenance {
            construction: "construct1".into(),
            master_seed: Some(42),
            trial_index: Some(5520),
            adjunction_class: Some(crate::adjunction::family("i").unwrap().to_string()),
            ..Default::default()
        };
        let cert = Certificate::derive(&search_surface(), prov).unwrap();
        assert_eq!(cert.hilbert_polynomial, "6t^2 - 6t + 1");
        let rep = verify(&cert).unwrap();
        assert!(rep.passed(), "{rep:?}");

        let mut flipped = cert.clone();
        let mut b = EMatrix::from_json(&cert.b).unwrap();
        let f = b.field().clone();
        let mut e = *b.get(0, 0);
        let (m, c) = e.terms().next().unwrap();
        e.set_coeff(crate::extalg::ExtMonomial(m), f.add(c, 1));
        b.set(0, 0, e);
        flipped.b = b.to_json();
        let rep = verify(&flipped).unwrap();
        assert_eq!(rep.failed_stage(), Some("complex"));

        let mut doctored = cert.clone();
        doctored.hilbert_polynomial = "6t^2 - 6t + 2".into();
        assert_eq!(verify(&doctored).unwrap().failed_stage(), Some("polyring"));
    }
}
