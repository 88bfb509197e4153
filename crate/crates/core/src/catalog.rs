//! The thirteen 2-fold symmetry lattices and their derived parameters.

use std::fmt;

use serde::Serialize;

use crate::arithmetic::{ExtOrder, PiRational};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LatticeSignature {
    pub p: u32,
    pub k: u32,
    pub p_prime: u32,
}

impl LatticeSignature {
    pub const fn new(p: u32, k: u32, p_prime: u32) -> Self {
        LatticeSignature { p, k, p_prime }
    }

    pub fn is_catalog(&self) -> bool {
        CATALOG.contains(self)
    }
}

impl fmt::Display for LatticeSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.p, self.k, self.p_prime)
    }
}

const CATALOG: [LatticeSignature; 13] = [
    LatticeSignature::new(6, 6, 3),
    LatticeSignature::new(10, 10, 5),
    LatticeSignature::new(12, 12, 6),
    LatticeSignature::new(18, 18, 9),
    LatticeSignature::new(4, 4, 3),
    LatticeSignature::new(4, 4, 5),
    LatticeSignature::new(4, 4, 6),
    LatticeSignature::new(3, 3, 4),
    LatticeSignature::new(3, 3, 3),
    LatticeSignature::new(2, 6, 6),
    LatticeSignature::new(2, 4, 3),
    LatticeSignature::new(2, 3, 3),
    LatticeSignature::new(3, 4, 4),
];

/// The catalog in its printed order.
pub fn catalog() -> Vec<LatticeSignature> {
    CATALOG.to_vec()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DerivedParams {
    pub alpha: PiRational,
    pub theta: PiRational,
    pub phi: PiRational,
    pub k_prime: ExtOrder,
    pub l: ExtOrder,
    pub l_prime: ExtOrder,
    pub d: ExtOrder,
}

impl DerivedParams {
    /// `π/k′ = π + θ + φ − 2α`, as a multiple of π.
    pub fn k_prime_angle(&self) -> PiRational {
        PiRational::pi() + self.theta + self.phi - self.alpha * 2
    }

    pub fn l_angle(&self) -> PiRational {
        self.alpha - self.theta - self.phi
    }

    pub fn l_prime_angle(&self) -> PiRational {
        PiRational::pi() - self.alpha - self.phi
    }

    pub fn d_angle(&self) -> PiRational {
        PiRational::pi() - self.alpha - self.theta
    }
}

pub fn derive_params(sig: LatticeSignature) -> Result<DerivedParams> {
    for (name, v) in [("p", sig.p), ("k", sig.k), ("p'", sig.p_prime)] {
        if v < 2 {
            return Err(Error::PreconditionFailed(format!("{name} = {v} < 2")));
        }
    }
    let theta = PiRational::new(1, sig.p as i64);
    let phi = PiRational::new(1, sig.k as i64);
    let alpha = PiRational::new(1, 2) + PiRational::new(1, sig.p_prime as i64);
    let mut dp = DerivedParams {
        alpha,
        theta,
        phi,
        k_prime: ExtOrder::Infinite,
        l: ExtOrder::Infinite,
        l_prime: ExtOrder::Infinite,
        d: ExtOrder::Infinite,
    };
    dp.k_prime = ExtOrder::from_reciprocal(dp.k_prime_angle().ratio())?;
    dp.l = ExtOrder::from_reciprocal(dp.l_angle().ratio())?;
    dp.l_prime = ExtOrder::from_reciprocal(dp.l_prime_angle().ratio())?;
    dp.d = ExtOrder::from_reciprocal(dp.d_angle().ratio())?;
    Ok(dp)
}

/// `(θ₀, …, θ₄)` of the cone metric with β = α.
pub fn cone_angles(sig: LatticeSignature) -> Result<[PiRational; 5]> {
    let dp = derive_params(sig)?;
    let (a, t, f) = (dp.alpha, dp.theta, dp.phi);
    let pi = PiRational::pi();
    let angles = [
        (pi + f - a) * 2,
        a * 2,
        a * 2,
        (pi + t - a) * 2,
        (pi - t - f) * 2,
    ];
    let two_pi = PiRational::new(2, 1);
    for th in angles {
        if !(th.is_positive() && th < two_pi) {
            return Err(Error::AngleOutOfRange(th.to_string()));
        }
    }
    let curvature = angles
        .iter()
        .fold(PiRational::zero(), |acc, &th| acc + two_pi - th);
    // Gauss-Bonnet; a failure here is a formula bug, not bad input.
    assert_eq!(curvature, PiRational::new(4, 1));
    Ok(angles)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParamStatus {
    PositiveFinite,
    Negative,
    Infinite,
}

impl From<ExtOrder> for ParamStatus {
    fn from(o: ExtOrder) -> Self {
        match o {
            ExtOrder::PositiveInt(_) => ParamStatus::PositiveFinite,
            ExtOrder::NegativeInt(_) => ParamStatus::Negative,
            ExtOrder::Infinite => ParamStatus::Infinite,
        }
    }
}

/// Ridges of the glued polyhedron referenced by the collapse rules and
/// the tessellation checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ridge {
    QQinv,
    KR0inv,
    KinvR0,
    A0R2inv,
    R2R1inv,
    A0invR1,
    A0A0inv,
    KR1,
    KKinv,
}

impl Ridge {
    pub const ALL: [Ridge; 9] = [
        Ridge::QQinv,
        Ridge::KR0inv,
        Ridge::KinvR0,
        Ridge::A0R2inv,
        Ridge::R2R1inv,
        Ridge::A0invR1,
        Ridge::A0A0inv,
        Ridge::KR1,
        Ridge::KKinv,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Ridge::QQinv => "F(Q,Q⁻¹)",
            Ridge::KR0inv => "F(K,R′₀⁻¹)",
            Ridge::KinvR0 => "F(K⁻¹,R′₀)",
            Ridge::A0R2inv => "F(A′₀,R′₂⁻¹)",
            Ridge::R2R1inv => "F(R′₂,R′₁⁻¹)",
            Ridge::A0invR1 => "F(A′₀⁻¹,R′₁)",
            Ridge::A0A0inv => "F(A′₀,A′₀⁻¹)",
            Ridge::KR1 => "F(K,R′₁)",
            Ridge::KKinv => "F(K,K⁻¹)",
        }
    }

    /// ASCII identifier used on the command line.
    pub fn id(self) -> &'static str {
        match self {
            Ridge::QQinv => "Q,Qinv",
            Ridge::KR0inv => "K,R0inv",
            Ridge::KinvR0 => "Kinv,R0",
            Ridge::A0R2inv => "A0,R2inv",
            Ridge::R2R1inv => "R2,R1inv",
            Ridge::A0invR1 => "A0inv,R1",
            Ridge::A0A0inv => "A0,A0inv",
            Ridge::KR1 => "K,R1",
            Ridge::KKinv => "K,Kinv",
        }
    }

    pub fn from_id(s: &str) -> Option<Ridge> {
        Ridge::ALL.into_iter().find(|r| r.id().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for Ridge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for Ridge {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegeneracyReport {
    pub k_prime: ParamStatus,
    pub l: ParamStatus,
    pub l_prime: ParamStatus,
    pub d: ParamStatus,
    pub collapsed: Vec<Ridge>,
}

impl DegeneracyReport {
    pub fn is_collapsed(&self, r: Ridge) -> bool {
        self.collapsed.contains(&r)
    }
}

pub fn classify_degeneracies(params: &DerivedParams) -> DegeneracyReport {
    let status = |o: ExtOrder| ParamStatus::from(o);
    let bad = |o: ExtOrder| o.is_degenerate();
    let mut collapsed = Vec::new();
    if bad(params.d) {
        collapsed.push(Ridge::QQinv);
    }
    if bad(params.l) {
        collapsed.extend([Ridge::KR0inv, Ridge::KinvR0]);
    }
    if bad(params.l_prime) {
        collapsed.extend([Ridge::A0R2inv, Ridge::R2R1inv, Ridge::A0invR1]);
    }
    if bad(params.k_prime) {
        collapsed.push(Ridge::A0A0inv);
    }
    collapsed.sort();
    DegeneracyReport {
        k_prime: status(params.k_prime),
        l: status(params.l),
        l_prime: status(params.l_prime),
        d: status(params.d),
        collapsed,
    }
}

/// The published collapse table: lattice
/// groups, their degenerate parameter names and collapsing ridges.
const PRINTED_COLLAPSE_TABLE: &[(&[(u32, u32, u32)], &[&str], &[Ridge])] = &[
    (&[(4, 4, 6), (4, 4, 5)], &[], &[]),
    (
        &[(3, 4, 4), (2, 4, 3), (3, 3, 4)],
        &["l'", "d"],
        &[Ridge::A0R2inv, Ridge::R2R1inv, Ridge::A0invR1, Ridge::QQinv],
    ),
    (
        &[(2, 6, 6)],
        &["l", "d"],
        &[Ridge::QQinv, Ridge::KR0inv, Ridge::KinvR0],
    ),
    (
        &[(2, 3, 3)],
        &["l", "l'", "d"],
        &[
            Ridge::QQinv,
            Ridge::KR0inv,
            Ridge::KinvR0,
            Ridge::A0R2inv,
            Ridge::R2R1inv,
            Ridge::A0invR1,
        ],
    ),
    (
        &[(3, 3, 3), (4, 4, 3), (6, 6, 3)],
        &["k'", "l'", "d"],
        &[Ridge::A0A0inv, Ridge::QQinv, Ridge::R2R1inv, Ridge::A0invR1],
    ),
    (&[(2, 3, 3)], &["k'"], &[Ridge::A0A0inv]),
];

/// Differences between the computed classification and the printed
/// collapse table, one message per discrepancy.
pub fn collapse_table_discrepancies() -> Vec<String> {
    let mut out = Vec::new();
    for sig in catalog() {
        let key = (sig.p, sig.k, sig.p_prime);
        let rows: Vec<_> = PRINTED_COLLAPSE_TABLE
            .iter()
            .filter(|(sigs, _, _)| sigs.contains(&key))
            .collect();
        let computed = match derive_params(sig) {
            Ok(dp) => classify_degeneracies(&dp),
            Err(e) => {
                out.push(format!("{sig}: {e}"));
                continue;
            }
        };
        match rows.len() {
            0 => out.push(format!(
                "{sig} is absent from the printed collapse table; parameter signs give {}",
                ridge_list(&computed.collapsed)
            )),
            1 => {
                let mut printed = rows[0].2.to_vec();
                printed.sort();
                if printed != computed.collapsed {
                    out.push(format!(
                        "{sig}: printed collapse {} but parameter signs give {}",
                        ridge_list(&printed),
                        ridge_list(&computed.collapsed)
                    ));
                }
            }
            n => out.push(format!(
                "{sig} appears in {n} rows of the printed collapse table; parameter signs give {}",
                ridge_list(&computed.collapsed)
            )),
        }
    }
    out
}

fn ridge_list(rs: &[Ridge]) -> String {
    if rs.is_empty() {
        return "{}".into();
    }
    let labels: Vec<_> = rs.iter().map(|r| r.label()).collect();
    format!("{{{}}}", labels.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_shape() {
        let c = catalog();
        assert_eq!(c.len(), 13);
        assert_eq!(c[0], LatticeSignature::new(6, 6, 3));
        assert_eq!(c[9], LatticeSignature::new(2, 6, 6));
        assert!(!LatticeSignature::new(9, 9, 9).is_catalog());
    }

    #[test]
    fn params_examples() {
        let dp = derive_params(LatticeSignature::new(6, 6, 3)).unwrap();
        assert_eq!(dp.k_prime, ExtOrder::NegativeInt(3));
        assert_eq!(dp.l, ExtOrder::PositiveInt(2));
        assert_eq!(dp.l_prime, ExtOrder::Infinite);
        assert_eq!(dp.d, ExtOrder::Infinite);
    }

    #[test]
    fn non_integer_order_is_rejected() {
        // α = π/2 + π/5, θ = π/7, φ = π/7 gives 1/l = 1/2 + 1/5 - 2/7, not a unit fraction.
        assert!(matches!(
            derive_params(LatticeSignature::new(7, 7, 5)),
            Err(Error::NonIntegerOrder(_))
        ));
    }

    #[test]
    fn degeneracy_examples() {
        let rep = |p, k, q| classify_degeneracies(&derive_params(LatticeSignature::new(p, k, q)).unwrap());
        assert_eq!(
            rep(2, 6, 6).collapsed,
            vec![Ridge::QQinv, Ridge::KR0inv, Ridge::KinvR0]
        );
        assert!(rep(4, 4, 6).collapsed.is_empty());
        assert_eq!(rep(12, 12, 6).collapsed, vec![Ridge::A0A0inv]);
    }

    #[test]
    fn ridge_ids_round_trip() {
        for r in Ridge::ALL {
            assert_eq!(Ridge::from_id(r.id()), Some(r));
        }
    }
}
