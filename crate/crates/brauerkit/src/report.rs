//! Machine-readable verification reports: one row per check with a
//! re-verifiable witness payload, stable field order and a versioned
//! schema, so two runs with the same parameters agree byte for byte
//! (runtime_ms aside).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ec::{
    IntegralityCertificate, KPoint, NondivisibilityCertificate, SurjectivityWitnessReport,
    TorsionCertificate,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// Witness payloads carry everything needed to re-verify the row from
/// scratch (curves are reconstructed from their coefficient ids).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    None,
    Note {
        text: String,
    },
    /// anisotropic_places(form) equals `places`.
    PlaceSet {
        form: Vec<String>,
        places: Vec<String>,
    },
    /// is_square_in_qp agreement for each (x, place, expected) triple.
    SquareChecks {
        checks: Vec<(String, String, bool)>,
    },
    /// Hilbert symbol value at one place.
    Hilbert {
        a: String,
        b: String,
        place: String,
        value: i32,
    },
    /// Nonzero vector annihilating the form.
    IsotropicVector {
        form: Vec<String>,
        vector: Vec<String>,
    },
    /// Simple roots of the degeneration polynomial and the rank-3
    /// residual form at each.
    DegenerateFibres {
        roots: Vec<String>,
        multiplicities: Vec<u32>,
        residual_form: Vec<String>,
    },
    /// Primes split in Q(sqrt(disc)).
    SplitPrimes {
        disc: i64,
        primes: Vec<u64>,
    },
    /// b/c/disc invariants of the named curve.
    CurveInvariants {
        curve_id: String,
        b2: String,
        b4: String,
        b6: String,
        b8: String,
        c4: String,
        c6: String,
        disc: String,
        short_p: String,
        short_q: String,
    },
    TorsionChain {
        curve_id: String,
        entries: Vec<(i64, TorsionCertificate)>,
    },
    /// Rational points found on the named curves (one list per curve).
    RationalPoints {
        curves: Vec<String>,
        points: Vec<Vec<[String; 2]>>,
        height_bound: u64,
    },
    Mod2Image {
        curve_id: String,
        irreducible: bool,
        disc_nonsquare: bool,
    },
    GaloisReports {
        curve_id: String,
        reports: Vec<SurjectivityWitnessReport>,
    },
    /// Signs of r at the marked arguments under all real embeddings.
    TotalSigns {
        short_p: String,
        short_q: String,
        a: String,
        b: String,
        r_a: String,
        r_b: String,
        r_a_totally_positive: bool,
        r_b_totally_negative: bool,
    },
    /// Local isotropy data for the Albert subform over the real
    /// quadratic field.
    SubformLocal {
        base_disc: i64,
        form: Vec<String>,
        q_anisotropic_places: Vec<String>,
        hensel: HenselData,
        real_isotropic_both_embeddings: bool,
    },
    Ramification {
        base_disc: i64,
        a: String,
        b: String,
        r_b_class: String,
        locus: Vec<String>,
    },
    PullbackResidues {
        base_disc: i64,
        short_p: String,
        short_q: String,
        a: String,
        b: String,
        at_b_trivial: bool,
        at_b_field_degree: u8,
        at_a_trivial: bool,
        at_a_field_degree: u8,
    },
    ValueAtInfinity {
        base_disc: i64,
        a: String,
        b: String,
        r_b_class: String,
        pair: [String; 2],
        fibre_form: Vec<String>,
        fibre_anisotropic_q_places: Vec<String>,
        hensel_at_two_isotropic: bool,
    },
    Nondivisibility {
        curve_id: String,
        point: KPoint,
        field_c: i64,
        field_d: i64,
        certs: Vec<NondivisibilityCertificate>,
    },
    Integrality {
        cert: IntegralityCertificate,
    },
    CohomologyRow {
        group: String,
        n: u64,
        order: u64,
        h0_size: Option<u64>,
        invariant_factors: Option<Vec<u64>>,
        exponent: Option<u64>,
        annihilator_bound: Option<u64>,
    },
}

/// Serializable Hensel certificate mirror (exact strings for the
/// arbitrary-precision data).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HenselData {
    pub c: String,
    pub status: String,
    pub coefficients: Vec<[String; 2]>,
    pub vector: Vec<[String; 2]>,
    pub level: u32,
    pub coordinate: usize,
    pub value_valuation: Option<i64>,
    pub gradient_valuation: i64,
    pub precision: u32,
}

impl HenselData {
    pub fn from_certificate(cert: &crate::quadfield::LocalCertificate) -> Self {
        let pair = |p: &(num_bigint::BigInt, num_bigint::BigInt)| -> [String; 2] {
            [p.0.to_string(), p.1.to_string()]
        };
        HenselData {
            c: cert.c.to_string(),
            status: match cert.status {
                crate::quadfield::LocalCertStatus::Isotropic => "isotropic".into(),
                crate::quadfield::LocalCertStatus::Anisotropic => "anisotropic".into(),
            },
            coefficients: cert.coefficients.iter().map(pair).collect(),
            vector: cert
                .witness
                .as_ref()
                .map(|w| w.vector.iter().map(pair).collect())
                .unwrap_or_default(),
            level: cert.witness.as_ref().map(|w| w.level).unwrap_or(0),
            coordinate: cert.witness.as_ref().map(|w| w.coordinate).unwrap_or(0),
            value_valuation: cert.witness.as_ref().and_then(|w| w.value_valuation),
            gradient_valuation: cert
                .witness
                .as_ref()
                .map(|w| w.gradient_valuation)
                .unwrap_or(0),
            precision: cert.precision,
        }
    }

    pub fn to_certificate(&self) -> Option<crate::quadfield::LocalCertificate> {
        let pair = |p: &[String; 2]| -> Option<(num_bigint::BigInt, num_bigint::BigInt)> {
            Some((p[0].parse().ok()?, p[1].parse().ok()?))
        };
        let coefficients: Option<Vec<_>> = self.coefficients.iter().map(pair).collect();
        let status = match self.status.as_str() {
            "isotropic" => crate::quadfield::LocalCertStatus::Isotropic,
            "anisotropic" => crate::quadfield::LocalCertStatus::Anisotropic,
            _ => return None,
        };
        let witness = if self.vector.is_empty() {
            None
        } else {
            let vector: Option<Vec<_>> = self.vector.iter().map(pair).collect();
            Some(crate::quadfield::HenselWitness {
                vector: vector?,
                level: self.level,
                coordinate: self.coordinate,
                value_valuation: self.value_valuation,
                gradient_valuation: self.gradient_valuation,
            })
        };
        Some(crate::quadfield::LocalCertificate {
            status,
            witness,
            precision: self.precision,
            c: self.c.parse().ok()?,
            coefficients: coefficients?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check_id: String,
    pub statement: String,
    pub paper_ref: String,
    pub status: Status,
    pub required: bool,
    pub witness: Witness,
    pub parameters: BTreeMap<String, String>,
    pub runtime_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub toolkit_version: String,
    pub pipeline: String,
    pub checks: Vec<CheckResult>,
    pub overall: Verdict,
}

impl Report {
    pub fn assemble(pipeline: &str, checks: Vec<CheckResult>) -> Report {
        let any_fail = checks.iter().any(|c| c.status == Status::Fail);
        let required_inconclusive = checks
            .iter()
            .any(|c| c.required && c.status == Status::Inconclusive);
        let overall = if any_fail {
            Verdict::Fail
        } else if required_inconclusive {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        };
        Report {
            schema: SCHEMA_VERSION,
            toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
            pipeline: pipeline.to_string(),
            checks,
            overall,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Report, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// Exit code contract: 0 all pass, 1 any fail, 2 required
    /// inconclusive (without failures).
    pub fn exit_code(&self) -> i32 {
        match self.overall {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 2,
        }
    }
}

/// Builder measuring wall time per check and freezing the outcome.
pub struct CheckBuilder {
    check_id: String,
    statement: String,
    paper_ref: String,
    required: bool,
    parameters: BTreeMap<String, String>,
}

impl CheckBuilder {
    pub fn new(check_id: &str, statement: &str, paper_ref: &str, required: bool) -> Self {
        CheckBuilder {
            check_id: check_id.to_string(),
            statement: statement.to_string(),
            paper_ref: paper_ref.to_string(),
            required,
            parameters: BTreeMap::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn run(self, f: impl FnOnce() -> (Status, Witness)) -> CheckResult {
        let start = std::time::Instant::now();
        let (status, witness) = f();
        CheckResult {
            check_id: self.check_id,
            statement: self.statement,
            paper_ref: self.paper_ref,
            status,
            required: self.required,
            witness,
            parameters: self.parameters,
            runtime_ms: start.elapsed().as_millis() as u64,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report() -> Report {
        let check = CheckBuilder::new("t.1", "one equals one", "arithmetic", true)
            .param("bound", 10)
            .run(|| (Status::Pass, Witness::Note { text: "ok".into() }));
        Report::assemble("test", vec![check])
    }

    #[test]
    fn verdict_rules() {
        let mk = |status, required| CheckResult {
            check_id: "x".into(),
            statement: "s".into(),
            paper_ref: "r".into(),
            status,
            required,
            witness: Witness::None,
            parameters: BTreeMap::new(),
            runtime_ms: 0,
        };
        let r = Report::assemble("t", vec![mk(Status::Pass, true)]);
        assert_eq!(r.overall, Verdict::Pass);
        assert_eq!(r.exit_code(), 0);
        let r = Report::assemble("t", vec![mk(Status::Pass, true), mk(Status::Fail, false)]);
        assert_eq!(r.overall, Verdict::Fail);
        assert_eq!(r.exit_code(), 1);
        // bounded inconclusive does not block the verdict
        let r = Report::assemble(
            "t",
            vec![mk(Status::Pass, true), mk(Status::Inconclusive, false)],
        );
        assert_eq!(r.overall, Verdict::Pass);
        // required inconclusive does
        let r = Report::assemble(
            "t",
            vec![mk(Status::Pass, true), mk(Status::Inconclusive, true)],
        );
        assert_eq!(r.overall, Verdict::Inconclusive);
        assert_eq!(r.exit_code(), 2);
    }

    #[test]
    fn json_roundtrip() {
        let r = sample_report();
        let s = r.to_json();
        let back = Report::from_json(&s).unwrap();
        assert_eq!(r, back);
        assert!(s.contains("\"schema\": 1"));
        assert!(s.contains("\"paper_ref\""));
    }
}
