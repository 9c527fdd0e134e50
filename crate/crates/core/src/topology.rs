//! Genus bounds for compact stable CMC surfaces, evaluated from the
//! inequality chains that test the second variation with a balanced
//! holomorphic map `φ: Σ → S²`.
//!
//! Every chain has the shape `∫ (pointwise LHS) dA ≤ c(g)·π` with `c(g)` an
//! integer. Only the sign of the left-hand side is known, so a genus is
//! excluded when the sign contradicts `c(g)`; equality cases (`c(g) = 0`
//! against a nonnegative integrand) are resolved by the rigidity argument
//! attached to each chain. All right-hand sides are exact integers.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Serialize, Serializer};

use crate::closedform::{find_h0, ISOPERIMETRIC_THRESHOLD_S2XR};
use crate::error::{Error, Result};

/// Genera checked by every report. The right-hand sides are non-increasing
/// in `g ≥ 1`, so an arithmetic exclusion at the end of the scan excludes
/// every larger genus.
pub const GENUS_SCAN: u32 = 8;

/// Window within which a floating-point `H` counts as exactly `1/√3` or `1/√2`.
pub const EXACT_WINDOW: f64 = 1e-12;

pub fn inv_sqrt3() -> f64 {
    1.0 / 3f64.sqrt()
}

fn floor_half(g: u32) -> i64 {
    i64::from(g.div_ceil(2))
}

/// `deg φ ≤ 1 + ⌊(g+1)/2⌋` for the holomorphic map of least degree.
pub fn degree_bound(g: i64) -> Result<i64> {
    if g < 0 {
        return Err(Error::InvalidArgument(format!(
            "genus must be nonnegative, got {g}"
        )));
    }
    Ok(1 + (g + 1) / 2)
}

/// Right-hand sides as integer multiples of `π`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RhsValues {
    /// `8(2 − g + ⌊(g+1)/2⌋)`
    pub rhs_holo1: i64,
    /// `8(1 − g + ⌊(g+1)/2⌋)`
    pub rhs_g23: i64,
    /// `8(−g + ⌊(g+1)/2⌋)`
    pub rhs_neg: i64,
}

pub fn rhs_values(g: u32) -> RhsValues {
    let g_i = i64::from(g);
    let f = floor_half(g);
    RhsValues {
        rhs_holo1: 8 * (2 - g_i + f),
        rhs_g23: 8 * (1 - g_i + f),
        rhs_neg: 8 * (-g_i + f),
    }
}

/// `4(3 − 2g + 2⌊(g+1)/2⌋)`, the chain for nonnegative scalar curvature.
pub fn rhs_scalar(g: u32) -> i64 {
    4 * (3 - 2 * i64::from(g) + 2 * floor_half(g))
}

/// What is known about the sign of `∫ LHS dA`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LhsSign {
    Positive,
    /// `≥ 0`, with equality only in a rigid configuration.
    NonNegative,
    /// Negative integrand of unknown total; the chain says nothing.
    Indefinite,
}

/// Result of comparing the LHS sign with the RHS alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Arithmetic {
    Satisfiable,
    Equality,
    Violated,
}

pub fn arithmetic(sign: LhsSign, rhs_pi: i64) -> Arithmetic {
    match sign {
        LhsSign::Positive if rhs_pi <= 0 => Arithmetic::Violated,
        LhsSign::NonNegative if rhs_pi < 0 => Arithmetic::Violated,
        LhsSign::NonNegative if rhs_pi == 0 => Arithmetic::Equality,
        _ => Arithmetic::Satisfiable,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Admitted,
    /// Equality holds throughout; the genus survives with a qualifier.
    AdmittedEqualityCase,
    ExcludedArithmetic,
    /// Equality holds throughout and the rigid configuration is impossible.
    ExcludedEqualityCase,
    /// Consistent with the chain but excluded by a separate argument.
    ExcludedByClause,
}

impl Outcome {
    pub fn admits(self) -> bool {
        matches!(self, Outcome::Admitted | Outcome::AdmittedEqualityCase)
    }

    fn consistent_with(self, a: Arithmetic) -> bool {
        match self {
            Outcome::Admitted | Outcome::ExcludedByClause => a == Arithmetic::Satisfiable,
            Outcome::AdmittedEqualityCase | Outcome::ExcludedEqualityCase => {
                a == Arithmetic::Equality
            }
            Outcome::ExcludedArithmetic => a == Arithmetic::Violated,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub inequality: &'static str,
    pub genus: u32,
    pub lhs: &'static str,
    pub lhs_sign: LhsSign,
    /// Right-hand side divided by `π`.
    pub rhs_pi: i64,
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<&'static str>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenusBound {
    Nonexistence,
    SphereOnly,
    AtMost(u32),
    /// The chains exclude no genus.
    NoBound,
}

impl Serialize for GenusBound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            GenusBound::AtMost(g) => s.serialize_u32(*g),
            GenusBound::Nonexistence => s.serialize_str("nonexistence"),
            GenusBound::SphereOnly => s.serialize_str("sphere-only"),
            GenusBound::NoBound => s.serialize_str("none"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvatureAssumption {
    RicciNonneg,
    ScalarNonneg,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Scenario {
    ConformallyFlatRicciNonneg,
    ConformallyFlatScalarNonneg,
    H2xR {
        #[serde(rename = "H")]
        h: f64,
        exact_inv_sqrt3: bool,
    },
    S2xR,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct S2rClassification {
    pub alternatives: Vec<String>,
    #[serde(rename = "H0")]
    pub h0: f64,
    /// `(0, H₀)`: no compact stable CMC surface has mean curvature here.
    pub forbidden_band: (f64, f64),
    /// Mean curvature above which rotational spheres bound isoperimetric regions.
    #[serde(rename = "H1")]
    pub isoperimetric_threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenusBoundReport {
    pub scenario: Scenario,
    pub embedded: Option<bool>,
    pub max_genus: GenusBound,
    pub inequality_trace: Vec<TraceEntry>,
    pub theorem_case: String,
    pub qualifiers: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<S2rClassification>,
}

impl GenusBoundReport {
    /// Re-derives the bound from the trace, checking every recorded outcome
    /// against its arithmetic.
    pub fn reproduce(&self) -> Result<GenusBound> {
        if self.max_genus == GenusBound::Nonexistence {
            return Ok(GenusBound::Nonexistence);
        }
        for e in &self.inequality_trace {
            let a = arithmetic(e.lhs_sign, e.rhs_pi);
            if !e.outcome.consistent_with(a) {
                return Err(Error::Internal(format!(
                    "trace entry {} at g = {} records {:?} but the arithmetic gives {:?}",
                    e.inequality, e.genus, e.outcome, a
                )));
            }
        }
        Ok(bound_from_trace(self.scenario, &self.inequality_trace))
    }
}

/// In the product spaces genus zero means the rotational sphere.
fn bound_from_trace(scenario: Scenario, trace: &[TraceEntry]) -> GenusBound {
    let admitted = |g: u32| {
        trace
            .iter()
            .filter(|e| e.genus == g)
            .all(|e| e.outcome.admits())
    };
    let product = matches!(scenario, Scenario::H2xR { .. } | Scenario::S2xR);
    match (0..=GENUS_SCAN).rev().find(|&g| admitted(g)) {
        Some(GENUS_SCAN) => GenusBound::NoBound,
        Some(0) if product => GenusBound::SphereOnly,
        Some(g) => GenusBound::AtMost(g),
        None => GenusBound::Nonexistence,
    }
}

/// One inequality of a chain, evaluated at every genus it applies to.
struct Chain {
    id: &'static str,
    lhs: &'static str,
    sign: LhsSign,
    rhs: fn(u32) -> i64,
    min_genus: u32,
    /// Resolution of an equality case at genus `g`.
    equality: fn(u32) -> (Outcome, &'static str),
}

impl Chain {
    fn entries(&self) -> impl Iterator<Item = TraceEntry> + '_ {
        (self.min_genus..=GENUS_SCAN).map(move |g| {
            let rhs_pi = (self.rhs)(g);
            let (outcome, reason) = match arithmetic(self.sign, rhs_pi) {
                Arithmetic::Satisfiable => (Outcome::Admitted, None),
                Arithmetic::Violated => (Outcome::ExcludedArithmetic, None),
                Arithmetic::Equality => {
                    let (o, r) = (self.equality)(g);
                    (o, Some(r))
                }
            };
            TraceEntry {
                inequality: self.id,
                genus: g,
                lhs: self.lhs,
                lhs_sign: self.sign,
                rhs_pi,
                outcome,
                reason,
            }
        })
    }
}

fn g23(g: u32) -> i64 {
    rhs_values(g).rhs_g23
}

fn neg(g: u32) -> i64 {
    rhs_values(g).rhs_neg
}

fn no_equality(_: u32) -> (Outcome, &'static str) {
    unreachable!("strict chain has no equality case")
}

fn willmore_rigidity(_: u32) -> (Outcome, &'static str) {
    (
        Outcome::ExcludedEqualityCase,
        "equality in the Willmore bound forces a totally umbilic sphere",
    )
}

fn torus_index_one(_: u32) -> (Outcome, &'static str) {
    (
        Outcome::ExcludedEqualityCase,
        "equality makes phi a holomorphic map of index one, which tori do not carry",
    )
}

fn genus_three_degree(g: u32) -> (Outcome, &'static str) {
    if g == 3 {
        (
            Outcome::ExcludedEqualityCase,
            "equality makes phi of index one, but deg(phi) = 3 while index-one maps on genus 3 have degree 2",
        )
    } else {
        (
            Outcome::AdmittedEqualityCase,
            "equality throughout: L = Delta + |grad phi|^2 and phi has index one",
        )
    }
}

fn horizontal_normal(_: u32) -> (Outcome, &'static str) {
    (
        Outcome::ExcludedEqualityCase,
        "equality forces Ric(N) = -1, so N is horizontal everywhere on a closed surface",
    )
}

fn ricci_chains(embedded: bool) -> Vec<Chain> {
    let mut chains = vec![Chain {
        id: "holo1+willmore",
        lhs: "int 2H^2 + Ric(N) dA",
        sign: LhsSign::NonNegative,
        rhs: g23,
        min_genus: 0,
        equality: willmore_rigidity,
    }];
    if !embedded {
        chains.push(Chain {
            id: "holo1+li-yau",
            lhs: "int 2H^2 + Ric(N) dA",
            sign: LhsSign::NonNegative,
            rhs: neg,
            min_genus: 1,
            equality: torus_index_one,
        });
    }
    chains
}

fn collect(chains: &[Chain]) -> Vec<TraceEntry> {
    let mut trace: Vec<TraceEntry> = chains.iter().flat_map(Chain::entries).collect();
    trace.sort_by_key(|e| e.genus);
    trace
}

pub fn genus_bound_conformally_flat(
    assumption: CurvatureAssumption,
    embedded: bool,
) -> GenusBoundReport {
    match assumption {
        CurvatureAssumption::RicciNonneg => {
            let trace = collect(&ricci_chains(embedded));
            let max_genus = bound_from_trace(Scenario::ConformallyFlatRicciNonneg, &trace);
            GenusBoundReport {
                scenario: Scenario::ConformallyFlatRicciNonneg,
                embedded: Some(embedded),
                max_genus,
                inequality_trace: trace,
                theorem_case: if embedded {
                    "Ric >= 0: a sphere or an embedded torus".into()
                } else {
                    "Ric >= 0: a torus must be embedded, so a non-embedded surface is a sphere".into()
                },
                qualifiers: vec![
                    "a disconnected stable surface is a union of totally geodesic surfaces with Ric(N) = 0".into(),
                ],
                classification: None,
            }
        }
        CurvatureAssumption::ScalarNonneg => {
            let mut chains = vec![Chain {
                id: "holo3+willmore",
                lhs: "int 3H^2 + S dA",
                sign: LhsSign::NonNegative,
                rhs: rhs_scalar,
                min_genus: 0,
                equality: no_equality,
            }];
            if !embedded {
                chains.push(Chain {
                    id: "holo3+li-yau",
                    lhs: "int 3H^2 + S dA",
                    sign: LhsSign::NonNegative,
                    rhs: g23,
                    min_genus: 0,
                    equality: genus_three_degree,
                });
            }
            let trace = collect(&chains);
            let max_genus = bound_from_trace(Scenario::ConformallyFlatScalarNonneg, &trace);
            let mut qualifiers = vec!["if g = 3 the surface is embedded".to_string()];
            if !embedded {
                qualifiers.push(
                    "if g = 2 and the surface is not embedded, it is minimal and S vanishes on it"
                        .into(),
                );
            }
            GenusBoundReport {
                scenario: Scenario::ConformallyFlatScalarNonneg,
                embedded: Some(embedded),
                max_genus,
                inequality_trace: trace,
                theorem_case: "S >= 0, connected: genus at most 3".into(),
                qualifiers,
                classification: None,
            }
        }
    }
}

/// Bound for compact stable CMC surfaces in `H²×R`. `exact_inv_sqrt3`
/// declares `H = 1/√3` exactly; values within [`EXACT_WINDOW`] are treated
/// the same way.
pub fn genus_bound_h2r(h: f64, exact_inv_sqrt3: bool) -> Result<GenusBoundReport> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "H must be positive and finite, got {h}"
        )));
    }
    let at_inv_sqrt3 = exact_inv_sqrt3 || (h - inv_sqrt3()).abs() <= EXACT_WINDOW;
    let h = if at_inv_sqrt3 { inv_sqrt3() } else { h };
    let scenario = Scenario::H2xR {
        h,
        exact_inv_sqrt3: at_inv_sqrt3,
    };
    if h <= 0.5 {
        return Ok(GenusBoundReport {
            scenario,
            embedded: None,
            max_genus: GenusBound::Nonexistence,
            inequality_trace: Vec::new(),
            theorem_case: "no compact CMC surface exists: closed CMC surfaces in H2xR have H > 1/2"
                .into(),
            qualifiers: Vec::new(),
            classification: None,
        });
    }
    let at_inv_sqrt2 = (h - FRAC_1_SQRT_2).abs() <= EXACT_WINDOW;

    let sign_a = if at_inv_sqrt2 {
        LhsSign::NonNegative
    } else if h > FRAC_1_SQRT_2 {
        LhsSign::Positive
    } else {
        LhsSign::Indefinite
    };
    let sign_b = if at_inv_sqrt3 {
        LhsSign::NonNegative
    } else if h > inv_sqrt3() {
        LhsSign::Positive
    } else {
        LhsSign::Indefinite
    };
    // genus zero is the rotational sphere; the chains need non-embeddedness,
    // which holds for g >= 1 by Alexandrov reflection
    let chains = [
        Chain {
            id: "holo2+li-yau",
            lhs: "int 2H^2 + Ric(N) dA >= (2H^2 - 1) A",
            sign: sign_a,
            rhs: neg,
            min_genus: 1,
            equality: horizontal_normal,
        },
        Chain {
            id: "holo2-scalar+li-yau",
            lhs: "int 3H^2 - 1 dA",
            sign: sign_b,
            rhs: g23,
            min_genus: 1,
            equality: genus_three_degree,
        },
    ];
    let mut trace = collect(&chains);
    trace.insert(
        0,
        TraceEntry {
            inequality: "genus-zero",
            genus: 0,
            lhs: "rotational CMC sphere",
            lhs_sign: LhsSign::Indefinite,
            rhs_pi: 0,
            outcome: Outcome::Admitted,
            reason: Some("embedded spheres are rotational and exist for every H > 1/2"),
        },
    );
    let max_genus = bound_from_trace(scenario, &trace);
    let (theorem_case, qualifiers) = match max_genus {
        GenusBound::SphereOnly if at_inv_sqrt2 => (
            "H >= 1/sqrt2: a rotational sphere (H = 1/sqrt2 by the horizontality argument)".to_string(),
            vec![],
        ),
        GenusBound::SphereOnly => ("H >= 1/sqrt2: a rotational sphere".to_string(), vec![]),
        GenusBound::AtMost(2) => (
            "H = 1/sqrt3: genus at most 2".to_string(),
            vec!["g = 2 only with equality throughout, L = Delta + |grad phi|^2".to_string()],
        ),
        GenusBound::AtMost(1) => ("1/sqrt3 < H < 1/sqrt2: genus at most 1".to_string(), vec![]),
        _ => (
            "1/2 < H < 1/sqrt3: no theorem clause; the chains have a negative left-hand side and exclude no genus"
                .to_string(),
            vec![],
        ),
    };
    Ok(GenusBoundReport {
        scenario,
        embedded: None,
        max_genus,
        inequality_trace: trace,
        theorem_case,
        qualifiers,
        classification: None,
    })
}

/// Compact stable CMC surfaces in `S²×R`: slices, or rotational spheres
/// with `H ≥ H₀`.
pub fn classify_s2r_compact_stable() -> Result<GenusBoundReport> {
    let h0 = find_h0()?;
    let mut trace = collect(&ricci_chains(true));
    for e in trace.iter_mut().filter(|e| e.genus == 1) {
        e.outcome = Outcome::ExcludedByClause;
        e.reason = Some("a stable torus is symmetric under a height reflection; a rotational Jacobi field then forces it to be rotational about an axis it meets");
    }
    let max_genus = bound_from_trace(Scenario::S2xR, &trace);
    Ok(GenusBoundReport {
        scenario: Scenario::S2xR,
        embedded: None,
        max_genus,
        inequality_trace: trace,
        theorem_case:
            "S2xR: a finite union of horizontal slices or a rotational sphere with H >= H0".into(),
        qualifiers: vec![format!(
            "no compact stable CMC surface has 0 < H < H0 = {h0:.12}"
        )],
        classification: Some(S2rClassification {
            alternatives: vec![
                "finite union of horizontal slices".into(),
                format!("rotational sphere with H >= H0 = {h0:.12}"),
            ],
            h0,
            forbidden_band: (0.0, h0),
            isoperimetric_threshold: ISOPERIMETRIC_THRESHOLD_S2XR,
        }),
    })
}
