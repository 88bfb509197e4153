//! Group-level checks: relations, cycle transformations, stabiliser orders,
//! the orbifold Euler characteristic and the tessellation sign tables.

use std::collections::HashMap;
use std::fmt;

use num_rational::Rational64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::arithmetic::{
    dehomogenize, max_abs, projective_defect, projective_order, serialize_ratio, Cx, ExtOrder,
    Mat3, Vec3,
};
use crate::catalog::{classify_degeneracies, derive_params, DerivedParams, LatticeSignature, Ridge};
use crate::check::Status;
use crate::domain::{in_d_union, vertices_d, DomainD};
use crate::error::{Error, Result};
use crate::polyhedron::{star_normal, vertices_t};

/// A lattice parameter appearing in a stabiliser order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Param {
    P,
    K,
    PPrime,
    KPrime,
    L,
    LPrime,
    D,
}

impl Param {
    fn symbol(self) -> &'static str {
        match self {
            Param::P => "p",
            Param::K => "k",
            Param::PPrime => "p′",
            Param::KPrime => "k′",
            Param::L => "l",
            Param::LPrime => "l′",
            Param::D => "d",
        }
    }

    /// Signed value, `None` for ∞.
    fn value(self, sig: LatticeSignature, dp: &DerivedParams) -> Option<i64> {
        match self {
            Param::P => Some(sig.p as i64),
            Param::K => Some(sig.k as i64),
            Param::PPrime => Some(sig.p_prime as i64),
            Param::KPrime => dp.k_prime.value(),
            Param::L => dp.l.value(),
            Param::LPrime => dp.l_prime.value(),
            Param::D => dp.d.value(),
        }
    }
}

/// `coeff · Π factors`, e.g. `2k′` or `2d²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrderExpr {
    pub coeff: i64,
    pub factors: &'static [Param],
}

impl OrderExpr {
    pub const fn new(coeff: i64, factors: &'static [Param]) -> Self {
        OrderExpr { coeff, factors }
    }

    /// The value, or `None` when a factor is infinite.
    pub fn eval(&self, sig: LatticeSignature, dp: &DerivedParams) -> Option<i64> {
        self.factors
            .iter()
            .try_fold(self.coeff, |acc, f| f.value(sig, dp).map(|v| acc * v))
    }

    pub fn is_trivial(&self) -> bool {
        self.coeff == 1 && self.factors.is_empty()
    }
}

impl fmt::Display for OrderExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "{}", self.coeff);
        }
        if self.coeff != 1 {
            write!(f, "{}", self.coeff)?;
        }
        let mut i = 0;
        while i < self.factors.len() {
            let p = self.factors[i];
            let run = self.factors[i..].iter().take_while(|&&q| q == p).count();
            write!(f, "{}", p.symbol())?;
            if run == 2 {
                write!(f, "²")?;
            } else if run > 2 {
                write!(f, "^{run}")?;
            }
            i += run;
        }
        Ok(())
    }
}

impl Serialize for OrderExpr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Group elements named in the stabiliser and cycle tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Word {
    A1,
    R1,
    R0,
    R2,
    A0,
    K,
    Q,
    Q2,
    R0K,
    QKinv,
    A0R2R1,
    R1A0R2,
    R2invK,
}

impl Word {
    pub fn label(self) -> &'static str {
        match self {
            Word::A1 => "A1",
            Word::R1 => "R′1",
            Word::R0 => "R′0",
            Word::R2 => "R′2",
            Word::A0 => "A′0",
            Word::K => "K",
            Word::Q => "Q",
            Word::Q2 => "Q²",
            Word::R0K => "R′0K",
            Word::QKinv => "QK⁻¹",
            Word::A0R2R1 => "A′0R′2R′1",
            Word::R1A0R2 => "R′1A′0R′2",
            Word::R2invK => "R′2⁻¹K",
        }
    }

    pub fn matrix(self, dom: &DomainD) -> Result<Mat3> {
        let sp = &dom.pairings;
        let inv = |m: &Mat3| m.try_inverse().ok_or_else(|| Error::SingularMatrix(self.label().into()));
        let (k, q, r0, r1, r2, a0) = (sp.k.matrix, sp.q.matrix, sp.r0.matrix, sp.r1.matrix, sp.r2.matrix, sp.a0.matrix);
        Ok(match self {
            Word::A1 => sp.a1.matrix,
            Word::R1 => r1,
            Word::R0 => r0,
            Word::R2 => r2,
            Word::A0 => a0,
            Word::K => k,
            Word::Q => q,
            Word::Q2 => q * q,
            Word::R0K => r0 * k,
            Word::QKinv => q * inv(&k)?,
            Word::A0R2R1 => a0 * r2 * r1,
            Word::R1A0R2 => r1 * a0 * r2,
            Word::R2invK => inv(&r2)? * k,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitRow {
    pub dimension: u8,
    /// Position within its dimension in the undegenerated table.
    pub index: usize,
    pub label: &'static str,
    pub stabiliser: &'static [Word],
    pub order: OrderExpr,
}

use Param::*;

const fn row(dimension: u8, index: usize, label: &'static str, stabiliser: &'static [Word], order: OrderExpr) -> OrbitRow {
    OrbitRow { dimension, index, label, stabiliser, order }
}

const ONE: OrderExpr = OrderExpr::new(1, &[]);

/// The 44 facet orbits of D with stabilisers, for all parameters positive
/// and finite.
pub fn base_orbit_table() -> Vec<OrbitRow> {
    use Word as W;
    let e = OrderExpr::new;
    vec![
        row(0, 0, "v1, v2", &[W::A1, W::R1], e(1, &[K, P])),
        row(0, 1, "v3, v4", &[W::Q2, W::R1], e(1, &[P, D])),
        row(0, 2, "v16, v5", &[W::Q2, W::R0], e(1, &[PPrime, D])),
        row(0, 3, "v6, v10", &[W::R0K, W::R1], e(1, &[P, L])),
        row(0, 4, "v7, v11", &[W::R0K, W::A0], e(1, &[KPrime, L])),
        row(0, 5, "v8, v9, v17, v24", &[W::QKinv, W::R0K], e(1, &[K, L])),
        row(0, 6, "v18, v14, v20, v22, v23, v12", &[W::A0R2R1, W::A1], e(1, &[LPrime, K])),
        row(0, 7, "v19, v13, v21", &[W::A0R2R1, W::R0], e(1, &[PPrime, LPrime])),
        row(0, 8, "v0", &[W::R0, W::A0], e(1, &[KPrime, PPrime])),
        row(1, 0, "γ_{1,3}, γ_{2,4}", &[W::R1], e(1, &[P])),
        row(1, 1, "γ_{1,6}, γ_{2,10}", &[W::R1], e(1, &[P])),
        row(1, 2, "γ_{1,12}, γ_{2,23}, γ_{2,14}, γ_{1,18}", &[W::A1], e(1, &[K])),
        row(1, 3, "γ_{3,5}, γ_{4,16}, γ_{4,5}, γ_{3,16}", &[W::Q2], e(1, &[D])),
        row(1, 4, "γ_{3,6}, γ_{4,10}", &[W::R1], e(1, &[P])),
        row(1, 5, "γ_{5,13}, γ_{16,19}, γ_{16,21}", &[W::R0], e(1, &[PPrime])),
        row(1, 6, "γ_{6,8}, γ_{10,24}, γ_{9,10}, γ_{6,17}", &[W::R0K], e(1, &[L])),
        row(1, 7, "γ_{7,8}, γ_{11,24}, γ_{9,11}, γ_{7,17}", &[W::R0K], e(1, &[L])),
        row(1, 8, "γ_{7,11}", &[W::K], e(2, &[KPrime])),
        row(1, 9, "γ_{7,15}, γ_{11,15}", &[W::A0], e(1, &[KPrime])),
        row(1, 10, "γ_{8,14}, γ_{22,24}, γ_{17,20}, γ_{9,18}, γ_{23,8}, γ_{9,12}", &[W::A1], e(1, &[K])),
        row(1, 11, "γ_{12,13}, γ_{21,22}, γ_{18,19}, γ_{21,23}, γ_{19,20}, γ_{13,14}", &[W::R1A0R2], e(1, &[LPrime])),
        row(1, 12, "γ_{12,14}, γ_{22,23}, γ_{18,20}", &[W::R2invK], e(2, &[LPrime])),
        row(1, 13, "γ_{15,19}, γ_{15,21}", &[W::R0], e(1, &[PPrime])),
        row(2, 0, "F(K,Q), F(K⁻¹,Q⁻¹)", &[W::A1], e(1, &[K])),
        row(2, 1, "F(K⁻¹,R′0), F(K,R′0⁻¹)", &[W::R0K], e(1, &[L])),
        row(2, 2, "F(R′0,R′0⁻¹)", &[W::R0], e(1, &[PPrime])),
        row(2, 3, "F(Q,Q⁻¹)", &[W::Q], e(2, &[D])),
        row(2, 4, "F(R′1,A′0⁻¹), F(R′1⁻¹,R′2), F(R′2⁻¹,A′0)", &[W::R1A0R2], e(1, &[LPrime])),
        row(2, 5, "F(R′1,R′1⁻¹)", &[W::R1], e(1, &[P])),
        row(2, 6, "F(R′2,R′2⁻¹)", &[W::R2], e(1, &[P])),
        row(2, 7, "F(A′0,A′0⁻¹)", &[W::A0], e(1, &[KPrime])),
        row(2, 8, "F(K,R′1), F(K,R′1⁻¹), F(K⁻¹,R′2⁻¹), F(K⁻¹,R′2)", &[], ONE),
        row(2, 9, "F(R′1,Q), F(R′2,Q⁻¹), F(R′2⁻¹,Q⁻¹), F(R′1⁻¹,Q)", &[], ONE),
        row(2, 10, "F(A′0,R′0), F(A′0⁻¹,R′0), F(A′0⁻¹,R′0⁻¹), F(A′0,R′0⁻¹)", &[], ONE),
        row(2, 11, "F(K,K⁻¹), F(K⁻¹,A′0), F(K,A′0⁻¹)", &[], ONE),
        row(2, 12, "F(R′1,R′0⁻¹), F(R′1⁻¹,Q⁻¹), F(Q,R′0)", &[], ONE),
        row(2, 13, "F(R′0⁻¹,Q⁻¹), F(Q,R′2), F(R′2⁻¹,R′0)", &[], ONE),
        row(3, 0, "S(K), S(K⁻¹)", &[], ONE),
        row(3, 1, "S(Q), S(Q⁻¹)", &[], ONE),
        row(3, 2, "S(R′2), S(R′2⁻¹)", &[], ONE),
        row(3, 3, "S(R′1), S(R′1⁻¹)", &[], ONE),
        row(3, 4, "S(R′0), S(R′0⁻¹)", &[], ONE),
        row(3, 5, "S(A′0), S(A′0⁻¹)", &[], ONE),
        row(4, 0, "D", &[], ONE),
    ]
}

/// One degeneration rule: rows removed and, for a negative parameter, the
/// merged vertex orbit that replaces them.
struct Rule {
    param: Param,
    deleted: &'static [(u8, usize)],
    merged: OrbitRow,
}

const RULES: [Rule; 3] = [
    Rule {
        param: D,
        deleted: &[(0, 1), (0, 2), (1, 3), (2, 3)],
        merged: row(0, 9, "v3 = v4 = v5 = v16", &[Word::R1, Word::R0], OrderExpr::new(2, &[D, D])),
    },
    Rule {
        param: LPrime,
        deleted: &[(0, 6), (0, 7), (1, 11), (1, 12), (2, 4)],
        merged: row(0, 10, "v12 = v13 = v14, v18 = v19 = v20, v21 = v22 = v23", &[Word::R0, Word::A1], OrderExpr::new(2, &[LPrime, LPrime])),
    },
    Rule {
        param: KPrime,
        deleted: &[(0, 4), (0, 8), (1, 8), (1, 9), (2, 7)],
        merged: row(0, 11, "v0 = v7 = v11", &[Word::R0, Word::K], OrderExpr::new(2, &[KPrime, KPrime])),
    },
];

const L_INFINITE: &[(u8, usize)] = &[(0, 3), (0, 4), (0, 5), (1, 6), (1, 7), (2, 1)];

#[derive(Clone, Debug, Serialize)]
pub struct DegeneratedTable {
    pub rows: Vec<OrbitRow>,
    pub applied_rules: Vec<String>,
    pub notes: Vec<String>,
}

pub fn apply_degenerations(rows: Vec<OrbitRow>, sig: LatticeSignature, dp: &DerivedParams) -> Result<DegeneratedTable> {
    if dp.l.is_negative() {
        return Err(Error::UnsupportedDegeneracy(format!("l = {} is negative", dp.l)));
    }
    let mut deleted: Vec<(u8, usize)> = Vec::new();
    let mut merged = Vec::new();
    let mut applied = Vec::new();
    let mut notes = Vec::new();
    if dp.l.is_infinite() {
        deleted.extend_from_slice(L_INFINITE);
        applied.push("l = ∞: vertex orbits pl, k′l, kl, both edge orbits l and ridge orbit l removed".to_string());
    }
    for rule in &RULES {
        let v = match rule.param {
            D => dp.d,
            LPrime => dp.l_prime,
            KPrime => dp.k_prime,
            _ => unreachable!(),
        };
        if v.is_positive_finite() {
            continue;
        }
        deleted.extend_from_slice(rule.deleted);
        let name = rule.param.symbol();
        if v.is_negative() {
            if rule.param == KPrime && dp.l.is_infinite() {
                notes.push("l = ∞ and k′ < 0 both remove row k′l; the l rule's deletion stands".to_string());
            }
            merged.push(rule.merged.clone());
            let order = rule.merged.order.eval(sig, dp).unwrap_or(0);
            applied.push(format!("{name} = {v}: orbits merged into one vertex orbit of order {} = {order}", rule.merged.order));
        } else {
            applied.push(format!("{name} = ∞: collapsing vertex, edge and ridge orbits removed"));
        }
    }
    let mut out: Vec<OrbitRow> = rows
        .into_iter()
        .filter(|r| !deleted.contains(&(r.dimension, r.index)))
        .collect();
    let split = out.iter().position(|r| r.dimension > 0).unwrap_or(out.len());
    out.splice(split..split, merged);
    Ok(DegeneratedTable { rows: out, applied_rules: applied, notes })
}

fn ser_ratio<S: Serializer>(q: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    serialize_ratio(*q, s)
}

fn ser_ratios<S: Serializer>(qs: &[Rational64; 5], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    #[derive(Serialize)]
    struct R(#[serde(serialize_with = "ser_ratio")] Rational64);
    let mut seq = s.serialize_seq(Some(5))?;
    for q in qs {
        seq.serialize_element(&R(*q))?;
    }
    seq.end()
}

#[derive(Clone, Debug, Serialize)]
pub struct EulerReport {
    pub signature: LatticeSignature,
    #[serde(serialize_with = "ser_ratio")]
    pub chi: Rational64,
    /// Volume is `volume_coeff · π²`.
    #[serde(serialize_with = "ser_ratio")]
    pub volume_coeff: Rational64,
    pub applied_rules: Vec<String>,
    pub notes: Vec<String>,
    /// Signed contribution of each dimension.
    #[serde(serialize_with = "ser_ratios")]
    pub per_dimension: [Rational64; 5],
    pub rows: usize,
}

pub fn euler_characteristic(sig: LatticeSignature) -> Result<EulerReport> {
    if !sig.is_catalog() {
        return Err(Error::NotCatalog(sig.p, sig.k, sig.p_prime));
    }
    let dp = derive_params(sig)?;
    let table = apply_degenerations(base_orbit_table(), sig, &dp)?;
    let mut per_dimension = [Rational64::zero(); 5];
    for r in &table.rows {
        let n = r.order.eval(sig, &dp).filter(|&n| n != 0).ok_or_else(|| {
            Error::UnsupportedDegeneracy(format!("row {} has order {} = ∞ after degenerations", r.label, r.order))
        })?;
        let sign = if r.dimension % 2 == 0 { 1 } else { -1 };
        per_dimension[r.dimension as usize] += Rational64::new(sign, n);
    }
    let chi = per_dimension.iter().fold(Rational64::zero(), |a, &b| a + b);
    Ok(EulerReport {
        signature: sig,
        chi,
        volume_coeff: chi * Rational64::new(8, 3),
        applied_rules: table.applied_rules,
        notes: table.notes,
        per_dimension,
        rows: table.rows.len(),
    })
}

/// Scales `m` so that its first near-largest entry equals 1.
fn canonical(m: &Mat3) -> Mat3 {
    let big = max_abs(m);
    let pivot = m
        .iter()
        .copied()
        .find(|z| z.norm() > big * (1.0 - 1e-4))
        .unwrap_or(Cx::new(1.0, 0.0));
    m / pivot
}

fn hash_key(m: &Mat3) -> Vec<i64> {
    m.iter()
        .flat_map(|z| [z.re, z.im])
        .map(|x| (x * 1e6).round() as i64)
        .collect()
}

/// Order of the projective group generated by `generators`, by breadth-first
/// closure.
pub fn stabilizer_bfs(generators: &[Mat3], max_size: usize, tol: f64) -> Result<usize> {
    let gens: Vec<Mat3> = generators.iter().map(canonical).collect();
    let id = Mat3::identity();
    let mut seen: HashMap<Vec<i64>, Vec<Mat3>> = HashMap::new();
    seen.insert(hash_key(&id), vec![id]);
    let mut count = 1;
    let mut queue = std::collections::VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in &gens {
            let y = canonical(&(x * g));
            let bucket = seen.entry(hash_key(&y)).or_default();
            let mut known = false;
            for m in bucket.iter() {
                let d = projective_defect(&y, m)?;
                if d <= tol {
                    known = true;
                    break;
                }
                if d < 10.0 * tol {
                    return Err(Error::HashCollisionAmbiguity(d));
                }
            }
            if !known {
                bucket.push(y);
                count += 1;
                if count > max_size {
                    return Err(Error::ExceededBound(max_size));
                }
                queue.push_back(y);
            }
        }
    }
    Ok(count)
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderEntry {
    pub name: String,
    /// Symbolic order, e.g. `2k′`.
    pub symbolic: String,
    pub expected: ExtOrder,
    pub measured: Option<u64>,
    pub status: Status,
    pub detail: String,
}

impl OrderEntry {
    fn skipped(name: impl Into<String>, symbolic: String, expected: ExtOrder, why: String) -> Self {
        OrderEntry { name: name.into(), symbolic, expected, measured: None, status: Status::Skipped, detail: why }
    }
}

/// BFS against every finite stabiliser order `≤ cap` of the degenerated table.
pub fn bfs_oracle(dom: &DomainD, cap: i64, tol: f64) -> Result<Vec<OrderEntry>> {
    let sig = dom.signature;
    let table = apply_degenerations(base_orbit_table(), sig, &dom.params)?;
    let mut out = Vec::new();
    for r in table.rows.iter().filter(|r| !r.stabiliser.is_empty()) {
        let gens: Vec<&str> = r.stabiliser.iter().map(|w| w.label()).collect();
        let name = format!("⟨{}⟩ at {}", gens.join(", "), r.label);
        let sym = r.order.to_string();
        let Some(n) = r.order.eval(sig, &dom.params) else {
            out.push(OrderEntry::skipped(name, sym, ExtOrder::Infinite, "infinite".into()));
            continue;
        };
        let expected = ExtOrder::from_reciprocal(Rational64::new(1, n))?;
        if n <= 0 || n > cap {
            out.push(OrderEntry::skipped(name, sym, expected, format!("order {n} outside 1..={cap}")));
            continue;
        }
        let mats = r.stabiliser.iter().map(|w| w.matrix(dom)).collect::<Result<Vec<_>>>()?;
        let (measured, status, detail) = match stabilizer_bfs(&mats, cap as usize * 4, tol) {
            Ok(m) => (Some(m as u64), if m as i64 == n { Status::Pass } else { Status::Fail }, format!("{m} elements")),
            Err(e) => (None, Status::Fail, e.to_string()),
        };
        out.push(OrderEntry { name, symbolic: sym, expected, measured, status, detail });
    }
    Ok(out)
}

fn positive(x: Option<i64>) -> Option<u64> {
    x.filter(|&v| v > 0).map(|v| v as u64)
}

fn ext(x: Option<i64>) -> ExtOrder {
    match x {
        None => ExtOrder::Infinite,
        Some(v) if v > 0 => ExtOrder::PositiveInt(v as u64),
        Some(v) => ExtOrder::NegativeInt(v.unsigned_abs()),
    }
}

fn order_entry(name: &str, m: Result<Mat3>, expr: OrderExpr, dom: &DomainD, max_order: usize, tol: f64) -> OrderEntry {
    let value = expr.eval(dom.signature, &dom.params);
    let (sym, expected) = (expr.to_string(), ext(value));
    let Some(n) = positive(value) else {
        return OrderEntry::skipped(name, sym, expected, format!("{expr} = {expected} is not positive finite"));
    };
    let m = match m {
        Ok(m) => m,
        Err(e) => return OrderEntry { name: name.into(), symbolic: sym, expected, measured: None, status: Status::Fail, detail: e.to_string() },
    };
    match projective_order(&m, max_order, tol) {
        Ok(o) => {
            let got = o.value().unwrap_or(0) as u64;
            OrderEntry {
                name: name.into(),
                symbolic: sym,
                expected,
                measured: Some(got),
                status: if got == n { Status::Pass } else { Status::Fail },
                detail: format!("projective order {got}"),
            }
        }
        Err(Error::ExceededBound(b)) => OrderEntry {
            name: name.into(),
            symbolic: sym,
            expected,
            measured: None,
            status: Status::Fail,
            detail: format!("order ≥ {b}"),
        },
        Err(e) => OrderEntry { name: name.into(), symbolic: sym, expected, measured: None, status: Status::Fail, detail: e.to_string() },
    }
}

fn identity_entry(name: &str, pair: Result<(Mat3, Mat3)>, tol: f64) -> OrderEntry {
    let (status, detail) = match pair.and_then(|(a, b)| projective_defect(&a, &b)) {
        Ok(d) => (if d <= tol { Status::Pass } else { Status::Fail }, format!("defect {d:.2e}")),
        Err(e) => (Status::Fail, e.to_string()),
    };
    OrderEntry { name: name.into(), symbolic: "1".into(), expected: ExtOrder::PositiveInt(1), measured: None, status, detail }
}

fn braid(t: &Mat3, s: &Mat3, len: usize) -> (Mat3, Mat3) {
    let mut a = Mat3::identity();
    let mut b = Mat3::identity();
    for i in 0..len {
        let (x, y) = if i % 2 == 0 { (t, s) } else { (s, t) };
        a *= x;
        b *= y;
    }
    (a, b)
}

fn inv(m: &Mat3) -> Result<Mat3> {
    m.try_inverse().ok_or_else(|| Error::SingularMatrix("side pairing".into()))
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationReport {
    pub entries: Vec<OrderEntry>,
}

impl RelationReport {
    pub fn none_failed(&self) -> bool {
        self.entries.iter().all(|e| e.status != Status::Fail)
    }
}

/// The presentation relations, both presentations.
pub fn check_relations(dom: &DomainD, max_order: usize, tol: f64) -> RelationReport {
    let sp = &dom.pairings;
    let (k, q, r0, r1, r2, a0, a1) = (sp.k.matrix, sp.q.matrix, sp.r0.matrix, sp.r1.matrix, sp.r2.matrix, sp.a0.matrix, sp.a1.matrix);
    let e = OrderExpr::new;
    let mut out = vec![
        order_entry("R′1^p", Ok(r1), e(1, &[P]), dom, max_order, tol),
        order_entry("R′2^p", Ok(r2), e(1, &[P]), dom, max_order, tol),
        order_entry("R′0^p′", Ok(r0), e(1, &[PPrime]), dom, max_order, tol),
        order_entry("A′0^k′", Ok(a0), e(1, &[KPrime]), dom, max_order, tol),
        order_entry("(Q⁻¹K)^k", inv(&q).map(|qi| qi * k), e(1, &[K]), dom, max_order, tol),
        order_entry("(R′0K)^l", Ok(r0 * k), e(1, &[L]), dom, max_order, tol),
        order_entry("(A′0R′2R′1)^l′", Ok(a0 * r2 * r1), e(1, &[LPrime]), dom, max_order, tol),
        order_entry("Q^2d", Ok(q), e(2, &[D]), dom, max_order, tol),
        identity_entry("Q = R′1R′0", Ok((q, r1 * r0)), tol),
        identity_entry("Q = R′0R′2", Ok((q, r0 * r2)), tol),
        identity_entry("Q = R′2⁻¹QR′1", inv(&r2).map(|r2i| (q, r2i * q * r1)), tol),
        identity_entry("R′0⁻¹A′0R′0 = A′0", inv(&r0).map(|r0i| (r0i * a0 * r0, a0)), tol),
        identity_entry("A′0 = K⁻²", inv(&(k * k)).map(|m| (a0, m)), tol),
        identity_entry("R′2K = KR′1", Ok((r2 * k, k * r1)), tol),
    ];
    let x = r1 * r0 * a1;
    out.extend([
        order_entry("(R′1R′0A1)^2k′", Ok(x), e(2, &[KPrime]), dom, max_order, tol),
        order_entry("A1^k", Ok(a1), e(1, &[K]), dom, max_order, tol),
        order_entry("(R′0R′1R′0A1)^l", Ok(r0 * r1 * r0 * a1), e(1, &[L]), dom, max_order, tol),
        order_entry("(A1R′0)^2l′", Ok(a1 * r0), e(2, &[LPrime]), dom, max_order, tol),
        order_entry("(R′1R′0)^2d", Ok(r1 * r0), e(2, &[D]), dom, max_order, tol),
        identity_entry("br4(R′1, R′0)", Ok(braid(&r1, &r0, 4)), tol),
        identity_entry("br2((R′1R′0A1)⁻², R′0)", inv(&(x * x)).map(|y| braid(&y, &r0, 2)), tol),
        identity_entry("br2(A1, R′1)", Ok(braid(&a1, &r1, 2)), tol),
    ]);
    RelationReport { entries: out }
}

#[derive(Clone, Debug, Serialize)]
pub struct CycleReport {
    pub entries: Vec<OrderEntry>,
    /// `Q²` acting on the surviving vertices of `F(Q,Q⁻¹)`.
    pub q_square_fixes_ridge: Option<crate::check::Check>,
}

impl CycleReport {
    pub fn none_failed(&self) -> bool {
        self.entries.iter().all(|e| e.status != Status::Fail)
            && self.q_square_fixes_ridge.as_ref().is_none_or(|c| !c.failed_check())
    }
}

/// Cycle transformations: projective orders `ℓm` and the identity cycles.
pub fn cycle_orders(dom: &DomainD, max_order: usize, tol: f64) -> Result<CycleReport> {
    let sp = &dom.pairings;
    let (k, q, r0, r1, r2, a0) = (sp.k.matrix, sp.q.matrix, sp.r0.matrix, sp.r1.matrix, sp.r2.matrix, sp.a0.matrix);
    let e = OrderExpr::new;
    let r2i_k = inv(&r2)? * k;
    let entries = vec![
        order_entry("Q⁻¹K (ℓ=1, m=k)", Ok(inv(&q)? * k), e(1, &[K]), dom, max_order, tol),
        order_entry("A′0 (ℓ=1, m=k′)", Ok(a0), e(1, &[KPrime]), dom, max_order, tol),
        order_entry("R′0 (ℓ=1, m=p′)", Ok(r0), e(1, &[PPrime]), dom, max_order, tol),
        order_entry("R′1A′0R′2 (ℓ=1, m=l′)", Ok(r1 * a0 * r2), e(1, &[LPrime]), dom, max_order, tol),
        order_entry("R′2 (ℓ=1, m=p)", Ok(r2), e(1, &[P]), dom, max_order, tol),
        order_entry("R′1 (ℓ=1, m=p)", Ok(r1), e(1, &[P]), dom, max_order, tol),
        order_entry("Q (ℓ=2, m=d)", Ok(q), e(2, &[D]), dom, max_order, tol),
        order_entry("R′0K (ℓ=1, m=l)", Ok(r0 * k), e(1, &[L]), dom, max_order, tol),
        identity_entry("R′1A′0R′2 = (R′2⁻¹K)⁻²", inv(&(r2i_k * r2i_k)).map(|m| (r1 * a0 * r2, m)), tol),
        identity_entry("R′0Q⁻¹R′1 = I", Ok((r0 * inv(&q)? * r1, Mat3::identity())), tol),
        identity_entry("R′2Q⁻¹R′0 = I", Ok((r2 * inv(&q)? * r0, Mat3::identity())), tol),
        identity_entry("R′1K⁻¹R′2⁻¹K = I", Ok((r1 * inv(&k)? * inv(&r2)? * k, Mat3::identity())), tol),
        identity_entry("R′1⁻¹Q⁻¹R′2Q = I", Ok((inv(&r1)? * inv(&q)? * r2 * q, Mat3::identity())), tol),
        identity_entry("A′0R′0⁻¹A′0⁻¹R′0 = I", Ok((a0 * inv(&r0)? * inv(&a0)? * r0, Mat3::identity())), tol),
        identity_entry("KA′0K = I", Ok((k * a0 * k, Mat3::identity())), tol),
    ];
    let q_square_fixes_ridge = if dom.params.d.is_positive_finite() {
        Some(q_square_on_ridge(dom, &(q * q), tol)?)
    } else {
        None
    };
    Ok(CycleReport { entries, q_square_fixes_ridge })
}

/// `Q² v = λ v` with a single `λ` for `v ∈ {v3, v4, v5, v16}`.
fn q_square_on_ridge(dom: &DomainD, q2: &Mat3, tol: f64) -> Result<crate::check::Check> {
    let table = vertices_d(dom)?;
    let mut lambdas = Vec::new();
    let mut residual = 0.0f64;
    for label in [3, 4, 5, 16] {
        let Some(v) = table.get(label).and_then(|v| v.point) else { continue };
        let img = q2 * v;
        let lambda = v.dotc(&img) / v.dotc(&v);
        residual = residual.max((img - v * lambda).norm() / v.norm());
        lambdas.push(lambda);
    }
    let spread = lambdas.iter().map(|l| (l - lambdas[0]).norm()).fold(0.0, f64::max);
    let scale = lambdas.first().map_or(1.0, |l| l.norm());
    let ok = residual <= tol * scale.max(1.0) && spread <= tol * scale.max(1.0);
    Ok(crate::check::Check::new(
        "Q² is scalar on F(Q,Q⁻¹)",
        ok,
        format!("eigen-residual {residual:.1e}, eigenvalue spread {spread:.1e} over {} vertices", lambdas.len()),
    ))
}

/// Order `4ab / (2a + 2b − ab)` of the `(2,a,b)` triangle group; `None` when
/// the group is infinite.
pub fn triangle_group_order(a: i64, b: i64) -> Option<Rational64> {
    let den = 2 * a + 2 * b - a * b;
    (den != 0).then(|| Rational64::new(4 * a * b, den))
}

/// Triangle-group orders against `−2d`, `−2l′`, `−2k′` for each negative
/// parameter.
pub fn triangle_checks(sig: LatticeSignature, dp: &DerivedParams) -> Vec<crate::check::Check> {
    let (p, k, pp) = (sig.p as i64, sig.k as i64, sig.p_prime as i64);
    let cases = [("d", dp.d, p, pp), ("l′", dp.l_prime, pp, k), ("k′", dp.k_prime, pp, dp.l.value().unwrap_or(0))];
    let mut out = Vec::new();
    for (name, v, a, b) in cases {
        let Some(n) = v.value().filter(|&n| n < 0) else { continue };
        let got = triangle_group_order(a, b);
        let want = Rational64::from_integer(-2 * n);
        out.push(crate::check::Check::new(
            format!("(2,{a},{b}) triangle group has order −2{name}"),
            got == Some(want),
            format!("{} vs {want}", got.map_or("∞".into(), |g| g.to_string())),
        ));
    }
    out
}

/// One row of the commensurability table.
#[derive(Clone, Debug, Serialize)]
pub struct CommensurabilityEntry {
    pub signature: LatticeSignature,
    #[serde(serialize_with = "ser_ratio")]
    pub computed_chi: Rational64,
    #[serde(serialize_with = "ser_ratio")]
    pub printed_chi: Rational64,
    #[serde(serialize_with = "ser_ratio")]
    pub partner_chi: Rational64,
    pub partner: &'static str,
    #[serde(serialize_with = "ser_ratio")]
    pub ratio: Rational64,
    pub ratio_is_six: bool,
    pub printed_matches: bool,
}

/// Index-6 pairs: lattice, printed χ, partner, printed partner χ.
pub const INDEX_SIX_PAIRS: [((u32, u32, u32), (i64, i64), &str, (i64, i64)); 7] = [
    ((6, 6, 3), (1, 12), "(6,2)", (1, 72)),
    ((10, 10, 5), (3, 20), "(10,2)", (1, 40)),
    ((12, 12, 6), (7, 48), "(12,2)", (7, 288)),
    ((18, 18, 9), (13, 108), "(18,2)", (13, 648)),
    ((4, 4, 3), (1, 12), "(4,3)", (1, 72)),
    ((4, 4, 5), (297, 400), "(4,5)", (33, 800)),
    ((4, 4, 6), (13, 48), "(4,6)", (13, 288)),
];

pub fn commensurability_check() -> Result<Vec<CommensurabilityEntry>> {
    INDEX_SIX_PAIRS
        .iter()
        .map(|&((p, k, pp), printed, partner, other)| {
            let sig = LatticeSignature::new(p, k, pp);
            let chi = euler_characteristic(sig)?.chi;
            let partner_chi = Rational64::new(other.0, other.1);
            let ratio = chi / partner_chi;
            let printed_chi = Rational64::new(printed.0, printed.1);
            Ok(CommensurabilityEntry {
                signature: sig,
                computed_chi: chi,
                printed_chi,
                partner_chi,
                partner,
                ratio,
                ratio_is_six: ratio == Rational64::from_integer(6),
                printed_matches: printed_chi == chi,
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SignRow {
    pub image: &'static str,
    pub expected: [i8; 4],
    pub samples: usize,
    pub matches: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct TessellationReport {
    pub signature: LatticeSignature,
    pub ridge: &'static str,
    pub seed: u64,
    pub tries: usize,
    pub rows: Vec<SignRow>,
    /// Points seen in more than one image (boundary hits).
    pub overlaps: usize,
}

impl TessellationReport {
    pub fn passed(&self, n: usize) -> bool {
        self.rows.iter().all(|r| r.samples >= n && r.matches == r.samples)
    }
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// Sign patterns of the four images of D meeting along a ridge, or the
/// three-way separation around a Giraud ridge.
pub fn tessellation_sign_table(dom: &DomainD, ridge: Ridge, n: usize, seed: u64) -> Result<TessellationReport> {
    if classify_degeneracies(&dom.params).is_collapsed(ridge) {
        return Err(Error::RidgeCollapsed(ridge.label().into()));
    }
    match ridge {
        Ridge::KR1 => lagrangian_ridge(dom, n, seed),
        Ridge::KKinv => giraud_ridge(dom, n, seed),
        other => Err(Error::UnsupportedRidge(other.label().into())),
    }
}

fn lagrangian_ridge(dom: &DomainD, n: usize, seed: u64) -> Result<TessellationReport> {
    let c3 = &dom.configs.c3;
    let (t, f) = (c3.theta, c3.phi);
    let radius = 1.5 * vertices_t(c3)?.max_modulus();
    let (k, r1) = (dom.pairings.k.matrix, dom.pairings.r1.matrix);
    // The image M(D) contains p when M⁻¹p ∈ D.
    let pulls: [(&'static str, Mat3, [i8; 4]); 4] = [
        ("D", Mat3::identity(), [-1, 1, 1, -1]),
        ("R′1⁻¹(D)", r1, [-1, 1, -1, -1]),
        ("K⁻¹(D)", k, [-1, -1, 1, -1]),
        ("R′1⁻¹K⁻¹(D)", k * r1, [-1, -1, -1, -1]),
    ];
    let mut rows: Vec<SignRow> = pulls
        .iter()
        .map(|(image, _, expected)| SignRow { image, expected: *expected, samples: 0, matches: 0 })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut tries, mut overlaps) = (0, 0);
    let cap = 400 * n.max(1);
    let (ef, et, emt) = (f.cis(), t.cis(), (-t).cis());
    while rows.iter().any(|r| r.samples < n) && tries < cap {
        tries += 1;
        let (r_1, r_2) = (rng.random_range(0.0..radius), rng.random_range(0.0..radius));
        let (e1, e2) = (rng.random_range(-0.05..0.05), rng.random_range(-0.05..0.05));
        let p = Vec3::new(
            Cx::from_polar(r_1, (-f.coeff() + e1) * std::f64::consts::PI),
            Cx::from_polar(r_2, (-t.coeff() + e2) * std::f64::consts::PI),
            Cx::new(1.0, 0.0),
        );
        let s = [sign(p[0].im), sign((ef * p[0]).im), sign((et * p[1]).im), sign((emt * p[1]).im)];
        let mut hits = 0;
        for ((_, m, _), row) in pulls.iter().zip(rows.iter_mut()) {
            let Ok(q) = dehomogenize(&(m * p)) else { continue };
            if in_d_union(&q, dom, 0.0)? {
                hits += 1;
                row.samples += 1;
                row.matches += (s == row.expected) as usize;
            }
        }
        overlaps += (hits > 1) as usize;
    }
    Ok(TessellationReport { signature: dom.signature, ridge: Ridge::KR1.label(), seed, tries, rows, overlaps })
}

fn giraud_ridge(dom: &DomainD, n: usize, seed: u64) -> Result<TessellationReport> {
    let c3 = &dom.configs.c3;
    let radius = 1.5 * vertices_t(c3)?.max_modulus();
    let k = dom.pairings.k.matrix;
    let ki = inv(&k)?;
    let n0 = star_normal(c3, 0)?;
    let cands = [n0, k * n0, ki * n0];
    let mut rows = vec![
        SignRow { image: "D", expected: [1, 0, 0, 0], samples: 0, matches: 0 },
        SignRow { image: "K(D)", expected: [0, 1, 0, 0], samples: 0, matches: 0 },
        SignRow { image: "K⁻¹(D)", expected: [0, 0, 1, 0], samples: 0, matches: 0 },
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut tries, mut inside) = (0, 0);
    let cap = 400 * n.max(1);
    while inside < n && tries < cap {
        tries += 1;
        let z = crate::polyhedron::sample_box(&mut rng, radius);
        if !in_d_union(&z, dom, 0.0)? {
            continue;
        }
        inside += 1;
        for (i, img) in [z, k * z, ki * z].iter().enumerate() {
            let d: Vec<f64> = cands.iter().map(|c| dom.h.inner(img, c).norm()).collect();
            let nearest = (0..3).min_by(|&a, &b| d[a].total_cmp(&d[b])).unwrap_or(0);
            rows[i].samples += 1;
            rows[i].matches += (nearest == i) as usize;
        }
    }
    Ok(TessellationReport { signature: dom.signature, ridge: Ridge::KKinv.label(), seed, tries, rows, overlaps: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_census() {
        let rows = base_orbit_table();
        let count = |d| rows.iter().filter(|r| r.dimension == d).count();
        assert_eq!([count(0), count(1), count(2), count(3), count(4)], [9, 14, 14, 6, 1]);
    }

    #[test]
    fn order_expr_display() {
        assert_eq!(OrderExpr::new(2, &[D, D]).to_string(), "2d²");
        assert_eq!(OrderExpr::new(1, &[PPrime, LPrime]).to_string(), "p′l′");
        assert_eq!(OrderExpr::new(2, &[KPrime]).to_string(), "2k′");
    }

    #[test]
    fn triangle_orders() {
        // (2,3,3) is the tetrahedral group, (2,3,4) octahedral, (2,3,5) icosahedral.
        assert_eq!(triangle_group_order(3, 3), Some(Rational64::from_integer(12)));
        assert_eq!(triangle_group_order(3, 4), Some(Rational64::from_integer(24)));
        assert_eq!(triangle_group_order(3, 5), Some(Rational64::from_integer(60)));
        assert_eq!(triangle_group_order(4, 4), None);
    }

    #[test]
    fn bfs_cyclic_and_dihedral() {
        let w = Cx::from_polar(1.0, 2.0 * std::f64::consts::PI / 5.0);
        let rot = Mat3::from_diagonal(&Vec3::new(Cx::new(1.0, 0.0), w, Cx::new(1.0, 0.0)));
        assert_eq!(stabilizer_bfs(&[rot], 100, 1e-9), Ok(5));
        let one = Cx::new(1.0, 0.0);
        let zero = Cx::new(0.0, 0.0);
        let swap = Mat3::new(zero, one, zero, one, zero, zero, zero, zero, one);
        let rot2 = Mat3::from_diagonal(&Vec3::new(w, w.conj(), one));
        assert_eq!(stabilizer_bfs(&[rot2, swap], 100, 1e-9), Ok(10));
        assert_eq!(stabilizer_bfs(&[rot], 3, 1e-9), Err(Error::ExceededBound(3)));
    }
}
