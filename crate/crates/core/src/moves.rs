//! Configuration-tracked moves between cone-metric charts.
//!
//! A move is a matrix together with the configuration it starts from and the
//! one it lands in. Composition refuses to glue maps whose configurations do
//! not match exactly.

use std::fmt;

use serde::Serialize;

use crate::arithmetic::{max_abs, normalize_max, projective_equal, Cx, HermitianForm3, Mat3, PiRational};
use crate::catalog::{derive_params, LatticeSignature};
use crate::error::{Error, Result};
use crate::tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ConfigTag {
    C1,
    C2,
    C3,
    Generic,
}

/// A chart `(α, β, θ, φ)`. Equality compares the four angles only.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Configuration {
    pub alpha: PiRational,
    pub beta: PiRational,
    pub theta: PiRational,
    pub phi: PiRational,
    pub tag: ConfigTag,
}

impl PartialEq for Configuration {
    fn eq(&self, o: &Self) -> bool {
        self.angles() == o.angles()
    }
}

impl Eq for Configuration {}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.alpha, self.beta, self.theta, self.phi)
    }
}

impl Configuration {
    /// Tags C1 when α = β and C3 when β = π + θ − α; C2 cannot be recognised
    /// from the angles alone and is only assigned by [`configurations_of`].
    pub fn new(alpha: PiRational, beta: PiRational, theta: PiRational, phi: PiRational) -> Self {
        let tag = if alpha == beta {
            ConfigTag::C1
        } else if beta == PiRational::pi() + theta - alpha {
            ConfigTag::C3
        } else {
            ConfigTag::Generic
        };
        Configuration { alpha, beta, theta, phi, tag }
    }

    pub fn with_tag(mut self, tag: ConfigTag) -> Self {
        self.tag = tag;
        self
    }

    pub fn angles(&self) -> [PiRational; 4] {
        [self.alpha, self.beta, self.theta, self.phi]
    }

    /// α, β, θ, φ, α−φ, β−θ, θ+φ all strictly inside (0, π).
    pub fn is_standard(&self) -> bool {
        let (a, b, t, f) = (self.alpha, self.beta, self.theta, self.phi);
        [a, b, t, f, a - f, b - t, t + f].iter().all(|x| x.in_open_unit())
    }

    /// `θ′ = α + β − π` of the s-frame.
    pub fn theta_s(&self) -> PiRational {
        self.alpha + self.beta - PiRational::pi()
    }

    /// `φ′ = π + θ + φ − α − β` of the s-frame.
    pub fn phi_s(&self) -> PiRational {
        PiRational::pi() + self.theta + self.phi - self.alpha - self.beta
    }

    pub fn r1_target(&self) -> Configuration {
        Configuration::new(self.alpha, PiRational::pi() + self.theta - self.beta, self.theta, self.phi)
    }

    pub fn r2_target(&self) -> Configuration {
        let (a, b, t, f) = (self.alpha, self.beta, self.theta, self.phi);
        Configuration::new(b, a, t + a - b, f + b - a)
    }

    pub fn p_target(&self) -> Configuration {
        self.r2_target().r1_target()
    }

    pub fn p_inverse_target(&self) -> Configuration {
        let (a, b, t, f) = (self.alpha, self.beta, self.theta, self.phi);
        let pi = PiRational::pi();
        Configuration::new(pi + t - b, a, a + b - pi, pi + t + f - a - b)
    }
}

/// A matrix with its source and target charts.
#[derive(Clone, Debug)]
pub struct ConfiguredMap {
    pub matrix: Mat3,
    pub source: Configuration,
    pub target: Configuration,
    pub label: String,
}

impl ConfiguredMap {
    pub fn identity(c: Configuration) -> Self {
        ConfiguredMap { matrix: Mat3::identity(), source: c, target: c, label: "I".into() }
    }

    pub fn apply(&self, v: &crate::arithmetic::Vec3) -> crate::arithmetic::Vec3 {
        self.matrix * v
    }
}

fn nonzero_sin(q: PiRational, what: &str) -> Result<f64> {
    if q.is_integer() {
        return Err(Error::DegenerateDenominator(format!("sin({what}) = sin({q}) = 0")));
    }
    Ok(q.sin())
}

fn s(q: PiRational) -> f64 {
    q.sin()
}

fn e(q: PiRational) -> Cx {
    q.cis()
}

fn re(x: f64) -> Cx {
    Cx::new(x, 0.0)
}

/// The diagonal area form of a chart.
///
/// Accepts any chart with non-vanishing denominators; the k′-negative chart
/// (φ < 0) goes through the same formula.
pub fn hermitian_form(c: &Configuration) -> Result<HermitianForm3> {
    let (a, b, t, f) = (c.alpha, c.beta, c.theta, c.phi);
    let saf = nonzero_sin(a - f, "α−φ")?;
    let sbt = nonzero_sin(b - t, "β−θ")?;
    let stf = nonzero_sin(t + f, "θ+φ")?;
    Ok(HermitianForm3::diagonal(
        -s(f) * s(a) / saf,
        -s(t) * s(b) / sbt,
        s(f) * s(t) / stf,
    ))
}

pub fn move_r1(c: &Configuration) -> Result<ConfiguredMap> {
    let sbt = nonzero_sin(c.beta - c.theta, "β−θ")?;
    let mut m = Mat3::identity();
    m[(1, 1)] = e(c.theta) * (s(c.beta) / sbt);
    Ok(ConfiguredMap { matrix: m, source: *c, target: c.r1_target(), label: "R1".into() })
}

/// The two printed expressions for the corner entry `A`.
pub fn a_entry_lines(c: &Configuration) -> (Cx, Cx) {
    let (a, b, t, f) = (c.alpha, c.beta, c.theta, c.phi);
    let tp = t + a - b;
    let fp = f + b - a;
    let first = re(s(t) * s(fp)) - e(a) * (s(t + f) * s(b));
    let second = re(s(f) * s(tp)) - e(b) * (s(t + f) * s(a));
    (first, second)
}

/// Unscaled printed matrix shared by R2 and P; `p_row` selects P's middle row.
fn r2_like(c: &Configuration, p_row: bool) -> Result<Mat3> {
    let (a, b, t, f) = (c.alpha, c.beta, c.theta, c.phi);
    let tp = t + a - b;
    let fp = f + b - a;
    let stp = nonzero_sin(tp, "θ+α−β")?;
    let sfp = nonzero_sin(fp, "φ+β−α")?;
    let (aa, _) = a_entry_lines(c);
    let row0 = [
        e(a - f) * (s(a) * stp),
        e(a) * (s(a - f) * stp),
        -e(a) * (s(a - f) * stp),
    ];
    let row1 = if p_row {
        let sbt = nonzero_sin(b - t, "β−θ")?;
        [
            e(a + t) * (s(a) * sfp),
            e(a) * (sfp * s(b) * s(a) / sbt),
            -e(a + t) * (s(a) * sfp),
        ]
    } else {
        [
            e(b) * (s(b - t) * sfp),
            e(b - t) * (sfp * s(b)),
            -e(b) * (s(b - t) * sfp),
        ]
    };
    let row2 = [e(b) * (s(t + f) * s(a)), e(a) * (s(t + f) * s(b)), aa];
    let m = Mat3::new(
        row0[0], row0[1], row0[2], row1[0], row1[1], row1[2], row2[0], row2[1], row2[2],
    );
    Ok(m / re(stp * sfp))
}

pub fn move_r2(c: &Configuration) -> Result<ConfiguredMap> {
    Ok(ConfiguredMap { matrix: r2_like(c, false)?, source: *c, target: c.r2_target(), label: "R2".into() })
}

pub fn move_a1(c: &Configuration) -> Result<ConfiguredMap> {
    let mut m = Mat3::identity();
    m[(0, 0)] = e(c.phi * 2);
    Ok(ConfiguredMap { matrix: m, source: *c, target: *c, label: "A1".into() })
}

/// The printed P, rescaled by `1/(sin θ′ sin φ′)` so that it is an isometry.
pub fn move_p(c: &Configuration) -> Result<ConfiguredMap> {
    Ok(ConfiguredMap { matrix: r2_like(c, true)?, source: *c, target: c.p_target(), label: "P".into() })
}

/// `J = P A₁`: the printed P with its first column turned by `e^{2iφ}`.
pub fn move_j(c: &Configuration) -> Result<ConfiguredMap> {
    let mut m = r2_like(c, true)?;
    let turn = e(c.phi * 2);
    for i in 0..3 {
        m[(i, 0)] *= turn;
    }
    Ok(ConfiguredMap { matrix: m, source: *c, target: c.p_target(), label: "J".into() })
}

/// The printed P⁻¹ with θ′ = α+β−π and φ′ = π+θ+φ−α−β, rescaled by
/// `1/(sin θ′ sin φ′)`.
pub fn move_p_inverse(c: &Configuration) -> Result<ConfiguredMap> {
    let (a, b, t, f) = (c.alpha, c.beta, c.theta, c.phi);
    let tp = c.theta_s();
    let fp = c.phi_s();
    let stp = nonzero_sin(tp, "α+β−π")?;
    let sfp = nonzero_sin(fp, "π+θ+φ−α−β")?;
    let sbt = nonzero_sin(b - t, "β−θ")?;
    let corner = re(-stp * s(f)) - e(b - t) * (s(t + f) * s(a));
    let m = Mat3::new(
        -e(f - a) * (s(a) * stp),
        -e(-(a + t)) * (s(a - f) * stp * s(b) / sbt),
        e(-a) * (s(a - f) * stp),
        e(b - t) * (s(b) * sfp),
        e(b - t) * (s(b) * sfp),
        -e(b - t) * (s(b) * sfp),
        e(b - t) * (s(t + f) * s(a)),
        -e(-(a + t)) * (s(t + f) * s(b)),
        corner,
    );
    Ok(ConfiguredMap {
        matrix: m / re(stp * sfp),
        source: *c,
        target: c.p_inverse_target(),
        label: "P⁻¹".into(),
    })
}

/// `f ∘ g`; requires `f.source == g.target`.
pub fn compose(f: &ConfiguredMap, g: &ConfiguredMap) -> Result<ConfiguredMap> {
    if f.source != g.target {
        return Err(Error::ConfigMismatch {
            left: format!("{} source {}", f.label, f.source),
            right: format!("{} target {}", g.label, g.target),
        });
    }
    Ok(ConfiguredMap {
        matrix: f.matrix * g.matrix,
        source: g.source,
        target: f.target,
        label: format!("{}∘{}", f.label, g.label),
    })
}

/// Left-to-right product `maps[0] ∘ maps[1] ∘ …`.
pub fn compose_all(maps: &[&ConfiguredMap]) -> Result<ConfiguredMap> {
    let (last, rest) = maps.split_last().expect("empty product");
    let mut acc = (*last).clone();
    for f in rest.iter().rev() {
        acc = compose(f, &acc)?;
    }
    Ok(acc)
}

pub fn inverse(f: &ConfiguredMap) -> Result<ConfiguredMap> {
    let n = normalize_max(&f.matrix);
    if max_abs(&f.matrix) == 0.0 || n.determinant().norm() <= 1e-12 {
        return Err(Error::SingularMatrix(f.label.clone()));
    }
    let inv = f
        .matrix
        .try_inverse()
        .ok_or_else(|| Error::SingularMatrix(f.label.clone()))?;
    let label = if f.label.chars().count() <= 2 {
        format!("{}⁻¹", f.label)
    } else {
        format!("({})⁻¹", f.label)
    };
    Ok(ConfiguredMap { matrix: inv, source: f.target, target: f.source, label })
}

/// Compares `R₁R₂R₁` with `R₂R₁R₂`, both starting at `c`.
pub fn check_braid(c: &Configuration) -> Result<bool> {
    let r1 = move_r1(c)?;
    let r2 = move_r2(&r1.target)?;
    let r1b = move_r1(&r2.target)?;
    let left = compose_all(&[&r1b, &r2, &r1])?;

    let s2 = move_r2(c)?;
    let s1 = move_r1(&s2.target)?;
    let s2b = move_r2(&s1.target)?;
    let right = compose_all(&[&s2b, &s1, &s2])?;

    if left.target != right.target {
        return Err(Error::ConfigMismatch {
            left: left.target.to_string(),
            right: right.target.to_string(),
        });
    }
    projective_equal(&left.matrix, &right.matrix, tolerances::PROJECTIVE)
}

/// `M* H(target) M = H(source)` entrywise.
pub fn check_isometry(f: &ConfiguredMap) -> Result<bool> {
    Ok(isometry_defect(f)? <= tolerances::ISOMETRY)
}

pub fn isometry_defect(f: &ConfiguredMap) -> Result<f64> {
    let hs = hermitian_form(&f.source)?;
    let ht = hermitian_form(&f.target)?;
    let pulled = f.matrix.adjoint() * ht.matrix() * f.matrix;
    Ok(max_abs(&(pulled - hs.matrix())))
}

/// The three charts of a lattice.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LatticeConfigs {
    pub c1: Configuration,
    pub c2: Configuration,
    pub c3: Configuration,
    /// C2 has φ ≤ 0, i.e. k′ negative or infinite.
    pub kneg: bool,
}

impl LatticeConfigs {
    pub fn all(&self) -> [Configuration; 3] {
        [self.c1, self.c2, self.c3]
    }
}

pub fn configurations_of(sig: LatticeSignature) -> Result<LatticeConfigs> {
    let dp = derive_params(sig)?;
    let (a, t, f) = (dp.alpha, dp.theta, dp.phi);
    let pi = PiRational::pi();
    let c1 = Configuration::new(a, a, t, f).with_tag(ConfigTag::C1);
    let c2 = Configuration::new(pi + t - a, a, a * 2 - pi, pi + t + f - a * 2).with_tag(ConfigTag::C2);
    let c3 = Configuration::new(a, pi + t - a, t, f).with_tag(ConfigTag::C3);
    Ok(LatticeConfigs { c1, c2, c3, kneg: !c2.phi.is_positive() })
}

/// Every move available at `c`, skipping none; errors are returned per move.
pub fn all_moves(c: &Configuration) -> Vec<(&'static str, Result<ConfiguredMap>)> {
    vec![
        ("R1", move_r1(c)),
        ("R2", move_r2(c)),
        ("A1", move_a1(c)),
        ("P", move_p(c)),
        ("J", move_j(c)),
        ("P⁻¹", move_p_inverse(c)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> PiRational {
        PiRational::new(n, d)
    }

    #[test]
    fn form_example() {
        let c = Configuration::new(q(5, 6), q(5, 6), q(1, 6), q(1, 6));
        let h = hermitian_form(&c).unwrap();
        let d = h.matrix().diagonal();
        let v = 0.5 * 0.5 / (3f64.sqrt() / 2.0);
        assert!((d[0].re + v).abs() < 1e-12);
        assert!((d[1].re + v).abs() < 1e-12);
        assert!((d[2].re - v).abs() < 1e-12);
    }

    #[test]
    fn degenerate_denominator() {
        let c = Configuration::new(q(1, 3), q(1, 2), q(1, 2), q(1, 3));
        assert!(matches!(hermitian_form(&c), Err(Error::DegenerateDenominator(_))));
    }

    #[test]
    fn configurations_446() {
        let cs = configurations_of(LatticeSignature::new(4, 4, 6)).unwrap();
        assert_eq!(cs.c1.angles(), [q(2, 3), q(2, 3), q(1, 4), q(1, 4)]);
        assert_eq!(cs.c2.angles(), [q(7, 12), q(2, 3), q(1, 3), q(1, 6)]);
        assert!(!cs.kneg);
        let neg = configurations_of(LatticeSignature::new(6, 6, 3)).unwrap();
        assert_eq!(neg.c2.phi, q(-1, 3));
        assert!(neg.kneg);
    }

    #[test]
    fn wrong_order_composition() {
        let c = Configuration::new(q(2, 3), q(7, 12), q(1, 4), q(1, 4));
        let r2 = move_r2(&c).unwrap();
        let r1 = move_r1(&r2.target).unwrap();
        assert!(compose(&r1, &r2).is_ok());
        assert!(matches!(compose(&r2, &r1), Err(Error::ConfigMismatch { .. })));
    }

    #[test]
    fn a1_inverse_is_conjugate_phase() {
        let c = Configuration::new(q(2, 3), q(2, 3), q(1, 4), q(1, 4));
        let inv = inverse(&move_a1(&c).unwrap()).unwrap();
        assert!((inv.matrix[(0, 0)] - q(-1, 2).cis()).norm() < 1e-15);
        assert_eq!(inv.matrix[(1, 1)], Cx::new(1.0, 0.0));
    }
}
