//! The single-chart polyhedron D(α, β, θ, φ).
//!
//! Lines and vertices are given in two affine frames: `t` (the chart's own
//! coordinates) and `s = P⁻¹ t`. All vertices have third coordinate 1.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arithmetic::{arg_pi, dehomogenize, Cx, HermitianForm3, PiRational, Vec3};
use crate::error::{Error, Result};
use crate::moves::{
    hermitian_form, inverse, move_j, move_p, move_p_inverse, move_r1, move_r2, Configuration,
    ConfiguredMap,
};
use crate::tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum LineLabel {
    Star0,
    Star1,
    Star2,
    Star3,
    L01,
    L02,
    L03,
    L12,
    L13,
    L23,
}

impl LineLabel {
    pub const ALL: [LineLabel; 10] = [
        LineLabel::Star0,
        LineLabel::Star1,
        LineLabel::Star2,
        LineLabel::Star3,
        LineLabel::L01,
        LineLabel::L02,
        LineLabel::L03,
        LineLabel::L12,
        LineLabel::L13,
        LineLabel::L23,
    ];

    pub fn star(i: usize) -> LineLabel {
        [LineLabel::Star0, LineLabel::Star1, LineLabel::Star2, LineLabel::Star3][i]
    }
}

impl fmt::Display for LineLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LineLabel::Star0 => "L*0",
            LineLabel::Star1 => "L*1",
            LineLabel::Star2 => "L*2",
            LineLabel::Star3 => "L*3",
            LineLabel::L01 => "L01",
            LineLabel::L02 => "L02",
            LineLabel::L03 => "L03",
            LineLabel::L12 => "L12",
            LineLabel::L13 => "L13",
            LineLabel::L23 => "L23",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Frame {
    T,
    S,
}

/// `a·x₁ + b·x₂ = c` in the given frame.
#[derive(Clone, Copy, Debug)]
pub struct ComplexLine {
    pub label: LineLabel,
    pub a: Cx,
    pub b: Cx,
    pub c: Cx,
    pub frame: Frame,
}

impl ComplexLine {
    pub fn residual(&self, v: &Vec3) -> f64 {
        (self.a * v[0] + self.b * v[1] - self.c).norm()
    }
}

fn nz(q: PiRational, what: &str) -> Result<f64> {
    if q.is_integer() {
        return Err(Error::DegenerateDenominator(format!("sin({what}) = 0")));
    }
    Ok(q.sin())
}

fn s(q: PiRational) -> f64 {
    q.sin()
}

fn e(q: PiRational) -> Cx {
    q.cis()
}

fn r(x: f64) -> Cx {
    Cx::new(x, 0.0)
}

/// Denominators common to every table of a chart.
struct Sines {
    a: f64,
    b: f64,
    af: f64,
    bt: f64,
    tf: f64,
}

fn sines(c: &Configuration) -> Result<Sines> {
    let (a, b, t, f) = (c.alpha, c.beta, c.theta, c.phi);
    Ok(Sines {
        a: nz(a, "α")?,
        b: nz(b, "β")?,
        af: nz(a - f, "α−φ")?,
        bt: nz(b - t, "β−θ")?,
        tf: nz(t + f, "θ+φ")?,
    })
}

fn line(label: LineLabel, a: Cx, b: Cx, c: Cx, frame: Frame) -> ComplexLine {
    ComplexLine { label, a, b, c, frame }
}

pub fn lines_t(c: &Configuration) -> Result<Vec<ComplexLine>> {
    let (t, f) = (c.theta, c.phi);
    let d = sines(c)?;
    let one = r(1.0);
    let zero = r(0.0);
    let u = e(f) * (d.a / d.af);
    let w = e(-t) * (d.b / d.bt);
    use LineLabel::*;
    Ok(vec![
        line(Star0, one, zero, r(d.af * s(t) / (d.a * d.tf)), Frame::T),
        line(Star1, one, zero, e(-f) * (s(t) / d.tf), Frame::T),
        line(Star2, zero, one, e(t) * (s(f) / d.tf), Frame::T),
        line(Star3, zero, one, r(d.bt * s(f) / (d.b * d.tf)), Frame::T),
        line(L01, one, zero, zero, Frame::T),
        line(L02, u, one, one, Frame::T),
        line(L03, u, w, one, Frame::T),
        line(L12, one, one, one, Frame::T),
        line(L13, one, w, one, Frame::T),
        line(L23, zero, one, zero, Frame::T),
    ])
}

pub fn lines_s(c: &Configuration) -> Result<Vec<ComplexLine>> {
    let (a, b, t, f) = (c.alpha, c.beta, c.theta, c.phi);
    let d = sines(c)?;
    let one = r(1.0);
    let zero = r(0.0);
    let ab = a + b;
    let abtf = a + b - t - f;
    let u = -e(abtf) * (d.bt / d.af);
    let w = -e(-ab) * (d.a / d.b);
    use LineLabel::*;
    Ok(vec![
        line(Star0, one, zero, r(-d.af * s(ab) / (d.bt * d.tf)), Frame::S),
        line(Star1, zero, one, -e(ab) * (s(abtf) / d.tf), Frame::S),
        line(Star2, zero, one, r(s(abtf) * d.b / (d.a * d.tf)), Frame::S),
        line(Star3, one, zero, e(-abtf) * (s(ab) / d.tf), Frame::S),
        line(L01, u, one, one, Frame::S),
        line(L02, u, w, one, Frame::S),
        line(L03, one, zero, zero, Frame::S),
        line(L12, zero, one, zero, Frame::S),
        line(L13, one, one, one, Frame::S),
        line(L23, one, w, one, Frame::S),
    ])
}

pub fn find_line(lines: &[ComplexLine], label: LineLabel) -> ComplexLine {
    *lines.iter().find(|l| l.label == label).expect("all ten lines are present")
}

/// A vector `n` with `⟨x, n⟩ = 0` for every `x` on the line.
///
/// Two points on the line give two rows `x*H`; their cross product spans the
/// kernel. The result is scaled so `|⟨n, n⟩| = 1` and its largest entry is
/// real positive.
pub fn line_normal(l: &ComplexLine, h: &HermitianForm3) -> Result<Vec3> {
    let one = r(1.0);
    let zero = r(0.0);
    let (p1, p2) = if l.b.norm() > l.a.norm() {
        (Vec3::new(zero, l.c / l.b, one), Vec3::new(one, (l.c - l.a) / l.b, one))
    } else {
        if l.a.norm() == 0.0 {
            return Err(Error::SingularSystem);
        }
        (Vec3::new(l.c / l.a, zero, one), Vec3::new((l.c - l.b) / l.a, one, one))
    };
    let r1 = (p1.adjoint() * h.matrix()).transpose();
    let r2 = (p2.adjoint() * h.matrix()).transpose();
    let n = Vec3::new(
        r1[1] * r2[2] - r1[2] * r2[1],
        r1[2] * r2[0] - r1[0] * r2[2],
        r1[0] * r2[1] - r1[1] * r2[0],
    );
    let size = n.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if size < 1e-14 {
        return Err(Error::SingularSystem);
    }
    let nn = h.inner(&n, &n).re.abs();
    let n = if nn > 1e-14 * size * size { n / r(nn.sqrt()) } else { n / r(size) };
    let big = n.iter().copied().fold(zero, |acc, z| if z.norm() > acc.norm() { z } else { acc });
    Ok(n * (big.conj() / big.norm()))
}

/// Normal to `L*i` in chart `c`, with respect to `H(c)`.
pub fn star_normal(c: &Configuration, i: usize) -> Result<Vec3> {
    let h = hermitian_form(c)?;
    line_normal(&find_line(&lines_t(c)?, LineLabel::star(i)), &h)
}

/// The defining line pair of each vertex `t₁ … t₁₄`.
pub const VERTEX_LINES: [(LineLabel, LineLabel); 14] = {
    use LineLabel::*;
    [
        (L01, L23),
        (L03, L12),
        (Star0, L23),
        (Star0, L12),
        (Star0, L13),
        (Star1, L23),
        (Star1, L02),
        (Star1, L03),
        (Star3, L01),
        (Star3, L12),
        (Star3, L02),
        (Star2, L01),
        (Star2, L13),
        (Star2, L03),
    ]
};

#[derive(Clone, Debug)]
pub struct VertexSet {
    pub frame: Frame,
    points: Vec<Vec3>,
}

impl VertexSet {
    /// Vertex `t_k`, `k` in 1..=14.
    pub fn get(&self, k: usize) -> Vec3 {
        self.points[k - 1]
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Vec3)> + '_ {
        self.points.iter().enumerate().map(|(i, v)| (i + 1, *v))
    }

    /// Largest coordinate modulus over all vertices.
    pub fn max_modulus(&self) -> f64 {
        self.points
            .iter()
            .flat_map(|v| [v[0].norm(), v[1].norm()])
            .fold(0.0, f64::max)
    }
}

fn pt(x: Cx, y: Cx) -> Vec3 {
    Vec3::new(x, y, r(1.0))
}

fn nonzero(z: Cx, what: &str) -> Result<Cx> {
    if z.norm() < 1e-14 {
        return Err(Error::DegenerateDenominator(what.into()));
    }
    Ok(z)
}

pub fn vertices_t(c: &Configuration) -> Result<VertexSet> {
    let (a, b, t, f) = (c.alpha, c.beta, c.theta, c.phi);
    let d = sines(c)?;
    let zero = r(0.0);
    let den = nonzero(e(f) * (d.a * d.bt) - e(-t) * (d.b * d.af), "t₂ denominator")?;
    let l0 = r(d.af * s(t) / (d.a * d.tf));
    let l1 = e(-f) * (s(t) / d.tf);
    let l3 = r(d.bt * s(f) / (d.b * d.tf));
    let l2 = e(t) * (s(f) / d.tf);
    let points = vec![
        pt(zero, zero),
        pt(r(d.af) * (r(d.bt) - e(-t) * d.b) / den, e(a) * (d.bt * s(f)) / den),
        pt(l0, zero),
        pt(l0, r(s(a + t) * s(f) / (d.a * d.tf))),
        pt(l0, e(t) * (s(a + t) * d.bt * s(f) / (d.a * d.b * d.tf))),
        pt(l1, zero),
        pt(l1, r(s(a - t - f) * s(f) / (d.af * d.tf))),
        pt(l1, e(t) * (s(a - t - f) * d.bt * s(f) / (d.af * d.b * d.tf))),
        pt(zero, l3),
        pt(r(s(b + f) * s(t) / (d.b * d.tf)), l3),
        pt(e(-f) * (d.af * s(b + f) * s(t) / (d.a * d.b * d.tf)), l3),
        pt(zero, l2),
        pt(r(s(b - t - f) * s(t) / (d.bt * d.tf)), l2),
        pt(e(-f) * (d.af * s(b - t - f) * s(t) / (d.a * d.bt * d.tf)), l2),
    ];
    Ok(VertexSet { frame: Frame::T, points })
}

pub fn vertices_s(c: &Configuration) -> Result<VertexSet> {
    let (a, b, t, f) = (c.alpha, c.beta, c.theta, c.phi);
    let d = sines(c)?;
    let zero = r(0.0);
    let ab = a + b;
    let abtf = a + b - t - f;
    let den = nonzero(r(d.af * d.b) - e(-(t + f)) * (d.a * d.bt), "s₁ denominator")?;
    let s0 = r(-d.af * s(ab) / (d.bt * d.tf));
    let s1 = -e(ab) * (s(abtf) / d.tf);
    let s3 = e(-abtf) * (s(ab) / d.tf);
    let s2 = r(d.b * s(abtf) / (d.a * d.tf));
    let points = vec![
        pt(e(-a) * (d.af * s(ab)) / den, e(b - t) * (d.b * s(abtf)) / den),
        pt(zero, zero),
        pt(s0, -e(ab) * (s(a + t) * d.b * s(abtf) / (d.bt * d.a * d.tf))),
        pt(s0, zero),
        pt(s0, r(s(a + t) * s(abtf) / (d.bt * d.tf))),
        pt(r(s(ab) * s(t + f - a) / (d.b * d.tf)), s1),
        pt(-e(-abtf) * (d.af * s(ab) * s(t + f - a) / (d.bt * d.b * d.tf)), s1),
        pt(zero, s1),
        pt(s3, r(s(b + f) * s(abtf) / (d.af * d.tf))),
        pt(s3, zero),
        pt(s3, -e(ab) * (s(b + f) * d.b * s(abtf) / (d.af * d.a * d.tf))),
        pt(-e(-abtf) * (d.af * s(t + f - b) * s(ab) / (d.bt * d.a * d.tf)), s2),
        pt(r(s(t + f - b) * s(ab) / (d.a * d.tf)), s2),
        pt(zero, s2),
    ];
    Ok(VertexSet { frame: Frame::S, points })
}

/// Largest residual of any vertex in its two defining lines, over both frames.
pub fn incidence_residual(c: &Configuration) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (lines, verts) in [(lines_t(c)?, vertices_t(c)?), (lines_s(c)?, vertices_s(c)?)] {
        for (k, v) in verts.iter() {
            let (l1, l2) = VERTEX_LINES[k - 1];
            worst = worst
                .max(find_line(&lines, l1).residual(&v))
                .max(find_line(&lines, l2).residual(&v));
        }
    }
    Ok(worst)
}

pub fn check_incidence(c: &Configuration) -> Result<bool> {
    Ok(incidence_residual(c)? < tolerances::INCIDENCE)
}

/// `max_k |normalize(P⁻¹ t_k) − s_k|`.
pub fn s_consistency_defect(c: &Configuration) -> Result<f64> {
    let pinv = move_p_inverse(c)?;
    let vt = vertices_t(c)?;
    let vs = vertices_s(c)?;
    let mut worst: f64 = 0.0;
    for (k, v) in vt.iter() {
        let image = dehomogenize(&(pinv.matrix * v))?;
        worst = worst.max((image - vs.get(k)).iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    Ok(worst)
}

pub fn check_s_consistency(c: &Configuration) -> Result<bool> {
    Ok(s_consistency_defect(c)? <= tolerances::VERTEX)
}

/// Is `arg z` inside `[lo, hi]` (units of π), widened by `tol`? Zero counts
/// as inside.
pub fn arg_in(z: Cx, lo: f64, hi: f64, tol: f64) -> bool {
    if z.norm() <= tol.max(1e-300) {
        return true;
    }
    let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let a = arg_pi(z);
    [-2.0, 0.0, 2.0]
        .iter()
        .any(|k| a + k >= lo - tol && a + k <= hi + tol)
}

/// Membership in the closure of D(c), tested by the four argument windows.
pub fn in_d(point: &Vec3, c: &Configuration, tol: f64) -> Result<bool> {
    let t = dehomogenize(point)?;
    let sv = dehomogenize(&(move_p_inverse(c)?.matrix * t))?;
    let (th, ph) = (c.theta.coeff(), c.phi.coeff());
    // With φ_s < 0 the s₂ axis is reversed, as for y₂ in the k′-negative regime.
    let s2 = if c.phi_s().is_negative() { -sv[1] } else { sv[1] };
    Ok(arg_in(t[0], -ph, 0.0, tol)
        && arg_in(t[1], 0.0, th, tol)
        && arg_in(sv[0], 0.0, c.phi_s().coeff(), tol)
        && arg_in(s2, 0.0, c.theta_s().coeff(), tol))
}

/// Collapse of the vertex triples on `L*0 … L*3` (boundary cases included).
pub fn collapse_status(c: &Configuration) -> [bool; 4] {
    let (a, b, t, f) = (c.alpha, c.beta, c.theta, c.phi);
    let pi = PiRational::pi();
    [
        !(pi - a - t).is_positive(),
        !(a - t - f).is_positive(),
        !(b - t - f).is_positive(),
        !(pi - b - f).is_positive(),
    ]
}

/// Vertices on `L*i`.
pub const STAR_VERTICES: [[usize; 3]; 4] = [[3, 4, 5], [6, 7, 8], [12, 13, 14], [9, 10, 11]];

pub fn collapsed_vertices(c: &Configuration) -> BTreeSet<usize> {
    let st = collapse_status(c);
    (0..4)
        .filter(|&i| st[i])
        .flat_map(|i| STAR_VERTICES[i])
        .collect()
}

/// Signs required for the charts reached by P and P⁻¹ to make sense.
pub fn pp_possible(c: &Configuration) -> Result<()> {
    let (a, b, t, f) = (c.alpha, c.beta, c.theta, c.phi);
    let pi = PiRational::pi();
    let checks = [
        (a + b - pi, "sin(α+β−π)"),
        (pi + t + f - a - b, "sin(π+θ+φ−α−β)"),
        (a + t - b, "sin(α+θ−β)"),
        (b + f - a, "sin(β+φ−α)"),
    ];
    for (q, name) in checks {
        if q.sin() < 0.0 {
            return Err(Error::PreconditionFailed(format!("{name} < 0 at {c}")));
        }
    }
    if !c.is_standard() {
        return Err(Error::PreconditionFailed(format!("{c} is not a standard chart")));
    }
    Ok(())
}

/// One side `S(T)` and the bisector containing it.
#[derive(Clone, Copy, Debug)]
pub struct SideSpec {
    pub name: &'static str,
    pub frame: Frame,
    /// Coordinate index (0 or 1) whose argument is fixed on the side.
    pub coord: usize,
    pub vertices: [usize; 8],
}

pub const SIDES: [SideSpec; 8] = [
    SideSpec { name: "S(P)", frame: Frame::T, coord: 0, vertices: [1, 3, 4, 5, 9, 10, 12, 13] },
    SideSpec { name: "S(P⁻¹)", frame: Frame::S, coord: 0, vertices: [2, 3, 4, 5, 6, 8, 13, 14] },
    SideSpec { name: "S(J)", frame: Frame::T, coord: 0, vertices: [1, 6, 7, 8, 9, 11, 12, 14] },
    SideSpec { name: "S(J⁻¹)", frame: Frame::S, coord: 0, vertices: [2, 7, 8, 9, 10, 11, 12, 14] },
    SideSpec { name: "S(R1)", frame: Frame::T, coord: 1, vertices: [1, 3, 4, 6, 7, 9, 10, 11] },
    SideSpec { name: "S(R1⁻¹)", frame: Frame::T, coord: 1, vertices: [1, 3, 5, 6, 8, 12, 13, 14] },
    SideSpec { name: "S(R2)", frame: Frame::S, coord: 1, vertices: [2, 4, 5, 9, 10, 12, 13, 14] },
    SideSpec { name: "S(R2⁻¹)", frame: Frame::S, coord: 1, vertices: [2, 3, 4, 6, 7, 8, 10, 11] },
];

/// Phase `ψ` (units of π) with `im(e^{iψ}x) = 0` on the bisector of each side.
pub fn side_phases(c: &Configuration) -> [PiRational; 8] {
    let z = PiRational::zero();
    [z, z, c.phi, -c.phi_s(), z, -c.theta, z, -c.theta_s()]
}

/// Modulus bounds of the fixed coordinate over each side.
///
/// The bound on `S(R2⁻¹)` is the `|s₂|` value on `L*1`,
/// `sin(α+β−θ−φ)/sin(θ+φ)`.
pub fn side_bounds(c: &Configuration) -> Result<[f64; 8]> {
    let (a, b, t, f) = (c.alpha, c.beta, c.theta, c.phi);
    let d = sines(c)?;
    let abtf = (a + b - t - f).sin();
    Ok([
        d.af * s(t) / (d.a * d.tf),
        -d.af * s(a + b) / (d.bt * d.tf),
        s(t) / d.tf,
        -s(a + b) / d.tf,
        d.bt * s(f) / (d.b * d.tf),
        s(f) / d.tf,
        abtf * d.b / (d.a * d.tf),
        abtf / d.tf,
    ])
}

/// Per-side excess `max |x| − bound` over the surviving vertices.
pub fn side_bound_excess(c: &Configuration) -> Result<Vec<(&'static str, f64)>> {
    pp_possible(c)?;
    let vt = vertices_t(c)?;
    let vs = vertices_s(c)?;
    let bounds = side_bounds(c)?;
    let gone = collapsed_vertices(c);
    let mut out = Vec::new();
    for (side, bound) in SIDES.iter().zip(bounds) {
        let verts = if side.frame == Frame::T { &vt } else { &vs };
        let worst = side
            .vertices
            .iter()
            .filter(|k| !gone.contains(k))
            .map(|&k| verts.get(k)[side.coord].norm())
            .fold(f64::NEG_INFINITY, f64::max);
        out.push((side.name, worst - bound));
    }
    Ok(out)
}

pub fn side_bound_check(c: &Configuration) -> Result<bool> {
    Ok(side_bound_excess(c)?
        .iter()
        .all(|(_, x)| *x <= tolerances::SIDE_BOUND))
}

/// Largest `|im(e^{iψ}x)|` of a surviving vertex on its side's bisector.
pub fn bisector_vertex_defect(c: &Configuration) -> Result<f64> {
    let vt = vertices_t(c)?;
    let vs = vertices_s(c)?;
    let gone = collapsed_vertices(c);
    let mut worst: f64 = 0.0;
    for (side, psi) in SIDES.iter().zip(side_phases(c)) {
        let verts = if side.frame == Frame::T { &vt } else { &vs };
        for &k in side.vertices.iter().filter(|k| !gone.contains(k)) {
            worst = worst.max((psi.cis() * verts.get(k)[side.coord]).im.abs());
        }
    }
    Ok(worst)
}

/// `condition(x) ⟺ |⟨p, n_a⟩| ≤ |⟨p, n_b⟩|`, where `condition` is
/// `sense · im(e^{iψ} x_coord) ≥ 0`, `p` is the sampled point and `x` its
/// image in frame number `frame` (0 is the sampling frame itself).
#[derive(Clone, Debug)]
pub struct Bullet {
    pub name: String,
    pub frame: usize,
    pub coord: usize,
    pub phase: PiRational,
    pub sense: f64,
    pub n_a: Vec3,
    pub n_b: Vec3,
}

/// `m·v` for a vector `v` living in chart `from`, landing in chart `to`.
pub fn carry(m: &ConfiguredMap, from: &Configuration, to: &Configuration, v: Vec3) -> Result<Vec3> {
    for (have, want) in [(&m.source, from), (&m.target, to)] {
        if have != want {
            return Err(Error::ConfigMismatch { left: format!("{} at {have}", m.label), right: want.to_string() });
        }
    }
    Ok(m.matrix * v)
}

const T: usize = 0;
const S: usize = 1;

/// The eight bisector equivalences, all evaluated in the t-frame of `c`
/// with `H(c)`. Images of normals are carried into chart `c` by the move
/// that lands there.
pub fn bisector_bullets(c: &Configuration) -> Result<Vec<Bullet>> {
    let c_p = c.p_target();
    let c_pi = c.p_inverse_target();
    let c_r1 = c.r1_target();
    let c_r2 = c.r2_target();
    let n = star_normal;
    let mk = |name: &str, frame, coord, phase, sense, n_a, n_b| Bullet {
        name: name.into(),
        frame,
        coord,
        phase,
        sense,
        n_a,
        n_b,
    };
    let z = PiRational::zero();
    Ok(vec![
        mk("im t1 ≤ 0", T, 0, z, -1.0, n(c, 1)?,
            carry(&inverse(&move_p(c)?)?, &c_p, c, n(&c_p, 3)?)?),
        mk("im s1 ≥ 0", S, 0, z, 1.0, n(c, 3)?,
            carry(&move_p(&c_pi)?, &c_pi, c, n(&c_pi, 1)?)?),
        mk("im e^{iφ}t1 ≥ 0", T, 0, c.phi, 1.0, n(c, 0)?,
            carry(&inverse(&move_j(c)?)?, &c_p, c, n(&c_p, 0)?)?),
        mk("im e^{-iφ′}s1 ≤ 0", S, 0, -c.phi_s(), -1.0, n(c, 0)?,
            carry(&move_j(&c_pi)?, &c_pi, c, n(&c_pi, 0)?)?),
        mk("im t2 ≥ 0", T, 1, z, 1.0, n(c, 2)?,
            carry(&inverse(&move_r1(c)?)?, &c_r1, c, n(&c_r1, 3)?)?),
        mk("im e^{-iθ}t2 ≤ 0", T, 1, -c.theta, -1.0, n(c, 3)?,
            carry(&move_r1(&c_r1)?, &c_r1, c, n(&c_r1, 2)?)?),
        mk("im s2 ≥ 0", S, 1, z, 1.0, n(c, 1)?,
            carry(&inverse(&move_r2(c)?)?, &c_r2, c, n(&c_r2, 2)?)?),
        mk("im e^{-iθ′}s2 ≤ 0", S, 1, -c.theta_s(), -1.0, n(c, 2)?,
            carry(&move_r2(&c_r2)?, &c_r2, c, n(&c_r2, 1)?)?),
    ])
}

#[derive(Clone, Debug, Serialize)]
pub struct BulletTally {
    pub name: String,
    pub agree: usize,
    pub counted: usize,
    /// Samples inside the neutral zone of either side.
    pub neutral: usize,
    /// Largest `| |⟨t,n_b⟩|² − |⟨t,n_a⟩|² |` among samples whose argument
    /// expression fell in the neutral zone.
    pub max_neutral_gap: f64,
}

impl BulletTally {
    pub fn fraction(&self) -> f64 {
        if self.counted == 0 {
            0.0
        } else {
            self.agree as f64 / self.counted as f64
        }
    }

    pub fn all_agree(&self) -> bool {
        self.counted > 0 && self.agree == self.counted
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleReport {
    pub samples: usize,
    pub seed: u64,
    pub bullets: Vec<BulletTally>,
}

impl SampleReport {
    pub fn all_agree(&self) -> bool {
        self.bullets.iter().all(|b| b.all_agree())
    }
}

/// Uniform point of the box `|re|, |im| ≤ radius` in both affine coordinates.
pub fn sample_box(rng: &mut ChaCha8Rng, radius: f64) -> Vec3 {
    let mut u = || rng.random_range(-radius..=radius);
    Vec3::new(Cx::new(u(), u()), Cx::new(u(), u()), r(1.0))
}

/// Frame maps for a sampler: each takes a point of the sampling frame.
pub type FrameMap<'a> = &'a dyn Fn(&Vec3) -> Result<Vec3>;

/// Tallies sign agreement of `bullets` over `n` points of the box of the
/// given radius. `frames[i]` maps a sample into frame `i + 1`.
pub fn sample_bullets(
    h: &HermitianForm3,
    radius: f64,
    bullets: &[Bullet],
    frames: &[FrameMap<'_>],
    n: usize,
    seed: u64,
) -> Result<SampleReport> {
    let mut tallies: Vec<BulletTally> = bullets
        .iter()
        .map(|b| BulletTally { name: b.name.clone(), agree: 0, counted: 0, neutral: 0, max_neutral_gap: 0.0 })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n {
        let p = sample_box(&mut rng, radius);
        let mut images = vec![p];
        for f in frames {
            images.push(f(&p)?);
        }
        for (b, tally) in bullets.iter().zip(tallies.iter_mut()) {
            let x = images[b.frame];
            let lhs = b.sense * (b.phase.cis() * x[b.coord]).im;
            let rhs = h.inner(&p, &b.n_b).norm_sqr() - h.inner(&p, &b.n_a).norm_sqr();
            if lhs.abs() < tolerances::NEUTRAL_ZONE || rhs.abs() < tolerances::NEUTRAL_ZONE {
                tally.neutral += 1;
                if lhs.abs() < tolerances::NEUTRAL_ZONE {
                    tally.max_neutral_gap = tally.max_neutral_gap.max(rhs.abs());
                }
                continue;
            }
            tally.counted += 1;
            if (lhs > 0.0) == (rhs > 0.0) {
                tally.agree += 1;
            }
        }
    }
    Ok(SampleReport { samples: n, seed, bullets: tallies })
}

pub fn bisector_equivalence_sample(c: &Configuration, n: usize, seed: u64) -> Result<SampleReport> {
    pp_possible(c)?;
    let bullets = bisector_bullets(c)?;
    let pinv = move_p_inverse(c)?;
    let h = hermitian_form(c)?;
    let radius = 1.5 * vertices_t(c)?.max_modulus();
    let to_s = |t: &Vec3| dehomogenize(&(pinv.matrix * t));
    sample_bullets(&h, radius, &bullets, &[&to_s], n, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::LatticeSignature;
    use crate::moves::configurations_of;

    fn c3(p: u32, k: u32, q: u32) -> Configuration {
        configurations_of(LatticeSignature::new(p, k, q)).unwrap().c3
    }

    #[test]
    fn geodesic_midpoint_in_d() {
        let c = c3(4, 4, 6);
        let h = hermitian_form(&c).unwrap();
        let vt = vertices_t(&c).unwrap();
        let (v, w) = (vt.get(3), vt.get(6));
        let unit = |x: &Vec3| x.unscale(h.inner(x, x).re.abs().sqrt());
        let phase = h.inner(&w, &v);
        let m = unit(&v) + unit(&w) * (phase / phase.norm());
        assert!(crate::arithmetic::hermitian_eval(&h, &m).unwrap() > 0.0);
        assert!(in_d(&m, &c, tolerances::MEMBERSHIP).unwrap());
    }

    #[test]
    fn printed_line_entries() {
        let c = c3(4, 4, 6);
        let lt = lines_t(&c).unwrap();
        let l1 = find_line(&lt, LineLabel::Star1);
        let want = c.phi.cis().conj() * (c.theta.sin() / (c.theta + c.phi).sin());
        assert!((l1.c - want).norm() < 1e-15);
        let l23 = find_line(&lt, LineLabel::L23);
        assert_eq!((l23.a, l23.b, l23.c), (r(0.0), r(1.0), r(0.0)));
        let l13 = find_line(&lines_s(&c).unwrap(), LineLabel::L13);
        assert_eq!((l13.a, l13.b, l13.c), (r(1.0), r(1.0), r(1.0)));
    }

    #[test]
    fn coordinate_hyperplane_normals() {
        let c = c3(4, 4, 6);
        let h = hermitian_form(&c).unwrap();
        let lt = lines_t(&c).unwrap();
        let n01 = line_normal(&find_line(&lt, LineLabel::L01), &h).unwrap();
        assert!(n01[1].norm() < 1e-14 && n01[2].norm() < 1e-14);
        let n23 = line_normal(&find_line(&lt, LineLabel::L23), &h).unwrap();
        assert!(n23[0].norm() < 1e-14 && n23[2].norm() < 1e-14);
    }

    #[test]
    fn origin_vertices() {
        let c = c3(4, 4, 6);
        let vt = vertices_t(&c).unwrap();
        assert_eq!(vt.get(1), pt(r(0.0), r(0.0)));
        assert_eq!(vertices_s(&c).unwrap().get(2), pt(r(0.0), r(0.0)));
    }

    #[test]
    fn incidence_detects_perturbation() {
        let c = c3(4, 4, 6);
        assert!(check_incidence(&c).unwrap());
        let lt = lines_t(&c).unwrap();
        let v5 = vertices_t(&c).unwrap().get(5) + Vec3::new(r(1e-3), r(0.0), r(0.0));
        assert!(find_line(&lt, LineLabel::Star0).residual(&v5) > 1e-4);
    }

    #[test]
    fn collapse_examples() {
        assert!(collapse_status(&c3(6, 6, 3))[0]);
        assert_eq!(collapse_status(&c3(4, 4, 6)), [false; 4]);
        assert!(collapse_status(&c3(4, 4, 3))[0]);
    }

    #[test]
    fn arg_window_wraps() {
        let z = Cx::from_polar(1.0, -0.99 * std::f64::consts::PI);
        assert!(arg_in(z, 0.9, 1.1, 0.0));
        assert!(!arg_in(z, 0.0, 0.5, 0.0));
        assert!(arg_in(r(0.0), 0.2, 0.3, 1e-9));
    }
}
