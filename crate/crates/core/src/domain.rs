//! The glued polyhedron `D = D₁ ∪ D₂ ∪ D₃` of a lattice.
//!
//! Everything is expressed in the z-frame, the t-frame of C3. The other
//! frames are `x = R₁(C3) z` (C1), `z = R₂(C2) y` (C2) and `w = Q⁻¹ z`.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arithmetic::{
    dehomogenize, hermitian_eval, max_abs, normalize_max, signature, Cx, HermitianForm3, Mat3,
    PiRational, Vec3,
};
use crate::catalog::{derive_params, DerivedParams, LatticeSignature};
use crate::check::{Check, Status};
use crate::error::{Error, Result};
use crate::moves::{
    compose, compose_all, configurations_of, hermitian_form, inverse, move_a1, move_j, move_p,
    move_p_inverse, move_r1, move_r2, Configuration, ConfiguredMap, LatticeConfigs,
};
use crate::polyhedron::{
    arg_in, carry, find_line, in_d, lines_t, sample_box, sample_bullets, star_normal, vertices_t,
    Bullet, LineLabel, SampleReport,
};
use crate::tolerances;

fn named(mut m: ConfiguredMap, label: &str) -> ConfiguredMap {
    m.label = label.into();
    m
}

/// The six side pairings and `A₁`, all self-maps of C3.
#[derive(Clone, Debug)]
pub struct SidePairingSet {
    pub k: ConfiguredMap,
    pub q: ConfiguredMap,
    pub r0: ConfiguredMap,
    pub r1: ConfiguredMap,
    pub r2: ConfiguredMap,
    pub a0: ConfiguredMap,
    pub a1: ConfiguredMap,
    /// How `R′₂` was built.
    pub r2_route: &'static str,
}

impl SidePairingSet {
    pub fn named(&self) -> [(&'static str, &ConfiguredMap); 7] {
        [
            ("K", &self.k),
            ("Q", &self.q),
            ("R′0", &self.r0),
            ("R′1", &self.r1),
            ("R′2", &self.r2),
            ("A′0", &self.a0),
            ("A1", &self.a1),
        ]
    }
}

pub fn side_pairings_of(cs: &LatticeConfigs) -> Result<SidePairingSet> {
    let (c1, c2, c3) = (&cs.c1, &cs.c2, &cs.c3);
    let r1_c3 = move_r1(c3)?;
    let q = named(compose(&move_p(c1)?, &r1_c3)?, "Q");
    let k = named(compose(&move_j(c1)?, &r1_c3)?, "K");
    let r1 = named(compose(&move_r1(c1)?, &r1_c3)?, "R′1");
    let r0 = named(compose(&inverse(&r1)?, &q)?, "R′0");
    let direct = move_r2(c2)
        .and_then(|a| compose(&a, &move_r2(c3)?))
        .and_then(|m| inverse(&m).map(|_| m));
    let (r2, r2_route) = match direct {
        Ok(m) => (m, "R2(C2)∘R2(C3)"),
        // R2 at C2 is rank deficient when C2 has φ = 0.
        Err(_) => (compose_all(&[&inverse(&r0)?, &r1, &r0])?, "R′0⁻¹R′1R′0"),
    };
    let r2 = named(r2, "R′2");
    let a0 = named(inverse(&compose(&k, &k)?)?, "A′0");
    let a1 = named(move_a1(c3)?, "A1");
    Ok(SidePairingSet { k, q, r0, r1, r2, a0, a1, r2_route })
}

#[derive(Clone, Debug)]
pub struct DomainD {
    pub signature: LatticeSignature,
    pub params: DerivedParams,
    pub configs: LatticeConfigs,
    /// k′ negative or infinite.
    pub kneg: bool,
    /// C2 has φ = 0, so the y-chart carries no form and `R₂(C2)` is singular.
    pub y_degenerate: bool,
    pub pairings: SidePairingSet,
    /// `H(C3)`.
    pub h: HermitianForm3,
    /// z → x.
    pub r1_c3: ConfiguredMap,
    /// y → z.
    pub r2_c2: ConfiguredMap,
    y_of_z: Option<Mat3>,
    w_of_z: Mat3,
    pub diagram: Vec<Check>,
}

pub fn build_domain(sig: LatticeSignature) -> Result<DomainD> {
    let params = derive_params(sig)?;
    let configs = configurations_of(sig)?;
    let kneg = params.k_prime.is_negative() || params.k_prime.is_infinite();
    let y_degenerate = configs.c2.phi.is_zero();
    let pairings = side_pairings_of(&configs)?;
    let r1_c3 = move_r1(&configs.c3)?;
    let r2_c2 = move_r2(&configs.c2)?;
    let y_of_z = if y_degenerate { None } else { Some(inverse(&r2_c2)?.matrix) };
    let w_of_z = inverse(&pairings.q)?.matrix;
    let h = hermitian_form(&configs.c3)?;
    let mut dom = DomainD {
        signature: sig,
        params,
        configs,
        kneg,
        y_degenerate,
        pairings,
        h,
        r1_c3,
        r2_c2,
        y_of_z,
        w_of_z,
        diagram: Vec::new(),
    };
    dom.diagram = coordinate_diagram(&dom);
    Ok(dom)
}

impl DomainD {
    pub fn y_of(&self, z: &Vec3) -> Option<Result<Vec3>> {
        self.y_of_z.as_ref().map(|m| dehomogenize(&(m * z)))
    }

    pub fn w_of(&self, z: &Vec3) -> Result<Vec3> {
        dehomogenize(&(self.w_of_z * z))
    }

    pub fn x_of(&self, z: &Vec3) -> Result<Vec3> {
        dehomogenize(&(self.r1_c3.matrix * z))
    }

    /// `θ′ = 2α − π` and `φ′ = π + θ + φ − 2α`, the angles of C2.
    pub fn primed(&self) -> (PiRational, PiRational) {
        (self.configs.c2.theta, self.configs.c2.phi)
    }

    fn y_check(&self, name: &str, pair: Result<(Mat3, Mat3)>) -> Check {
        match pair {
            Err(e) if self.y_degenerate => {
                Check::skipped(name, format!("y-chart degenerate (C2 has φ = 0): {e}"))
            }
            other => Check::projective(name, other, tolerances::PROJECTIVE),
        }
    }
}

/// The relations between the six coordinate systems.
pub fn coordinate_diagram(dom: &DomainD) -> Vec<Check> {
    let (c1, c2, c3) = (&dom.configs.c1, &dom.configs.c2, &dom.configs.c3);
    let v_is_y = || -> Result<(Mat3, Mat3)> {
        let m = compose_all(&[&move_p_inverse(c1)?, &dom.r1_c3, &dom.r2_c2])?;
        Ok((m.matrix, Mat3::identity()))
    };
    let u_from_w = || -> Result<(Mat3, Mat3)> {
        let rhs = compose_all(&[&dom.r1_c3, &move_p_inverse(c2)?, &inverse(&dom.r2_c2)?])?;
        Ok((move_p_inverse(c3)?.matrix, rhs.matrix))
    };
    let w_from_z = || -> Result<(Mat3, Mat3)> {
        let rhs = compose(&move_p_inverse(c2)?, &inverse(&dom.r2_c2)?)?;
        Ok((inverse(&dom.pairings.q)?.matrix, rhs.matrix))
    };
    vec![
        dom.y_check("v = P⁻¹x equals y", v_is_y()),
        dom.y_check("u = P⁻¹z equals R₁(C3)w", u_from_w()),
        dom.y_check("w = P⁻¹y equals Q⁻¹z", w_from_z()),
    ]
}

/// Alternative factorizations, printed matrices and isometry of the pairings.
pub fn side_pairing_checks(dom: &DomainD) -> Vec<Check> {
    let (c1, c2, c3) = (&dom.configs.c1, &dom.configs.c2, &dom.configs.c3);
    let sp = &dom.pairings;
    let tol = tolerances::PROJECTIVE;
    let mut out = Vec::new();

    let k_alt = || -> Result<(Mat3, Mat3)> {
        Ok((sp.k.matrix, compose(&dom.r2_c2, &move_j(c3)?)?.matrix))
    };
    out.push(dom.y_check("K = J·R₁ = R₂·J", k_alt()));
    let q_alt = || -> Result<(Mat3, Mat3)> {
        Ok((sp.q.matrix, compose(&dom.r2_c2, &move_p(c3)?)?.matrix))
    };
    out.push(dom.y_check("Q = P·R₁ = R₂·P", q_alt()));
    let r0_a = || -> Result<(Mat3, Mat3)> {
        let m = compose_all(&[&inverse(&dom.r1_c3)?, &move_r2(c1)?, &dom.r1_c3])?;
        Ok((sp.r0.matrix, m.matrix))
    };
    out.push(Check::projective("R′₀ = R₁⁻¹R₂R₁", r0_a(), tol));
    let r0_b = || -> Result<(Mat3, Mat3)> {
        let m = compose_all(&[&dom.r2_c2, &move_r1(c2)?, &inverse(&dom.r2_c2)?])?;
        Ok((sp.r0.matrix, m.matrix))
    };
    out.push(dom.y_check("R′₀ = R₂R₁R₂⁻¹", r0_b()));
    let r2_alt = || -> Result<(Mat3, Mat3)> {
        let direct = compose(&dom.r2_c2, &move_r2(c3)?)?;
        let conj = compose_all(&[&inverse(&sp.r0)?, &sp.r1, &sp.r0])?;
        Ok((direct.matrix, conj.matrix))
    };
    out.push(dom.y_check("R′₂ = R₂R₂ = R′₀⁻¹R′₁R′₀", r2_alt()));
    let a0_alt = || -> Result<(Mat3, Mat3)> {
        let m = compose_all(&[
            &inverse(&dom.r1_c3)?,
            &inverse(&move_j(c1)?)?,
            &inverse(&move_j(c3)?)?,
            &inverse(&dom.r2_c2)?,
        ])?;
        Ok((sp.a0.matrix, m.matrix))
    };
    out.push(dom.y_check("A′₀ = R₁⁻¹J⁻¹J⁻¹R₂⁻¹ = K⁻²", a0_alt()));
    let k_qa = compose(&sp.q, &sp.a1).map(|m| (sp.k.matrix, m.matrix));
    out.push(Check::projective("K = Q·A₁", k_qa, tol));

    let theta = c3.theta;
    let want_r1 = Mat3::from_diagonal(&Vec3::new(Cx::new(1.0, 0.0), (theta * 2).cis(), Cx::new(1.0, 0.0)));
    out.push(Check::defect(
        "R′₁ = diag(1, e^{2iθ}, 1)",
        Ok(max_abs(&(sp.r1.matrix - want_r1))),
        tolerances::HERMITIAN,
    ));
    let r0_y = || -> Result<(Mat3, Mat3)> {
        let m = compose_all(&[&inverse(&dom.r2_c2)?, &sp.r0, &dom.r2_c2])?;
        let a = c3.alpha;
        let want = Mat3::from_diagonal(&Vec3::new(Cx::new(1.0, 0.0), -(a * 2).cis(), Cx::new(1.0, 0.0)));
        Ok((m.matrix, want))
    };
    out.push(dom.y_check("R′₀ in the y-frame = diag(1, −e^{2iα}, 1)", r0_y()));

    for (name, m) in sp.named() {
        let defect = max_abs(&(m.matrix.adjoint() * dom.h.matrix() * m.matrix - dom.h.matrix()));
        out.push(Check::defect(format!("{name} preserves H(C3)"), Ok(defect), tolerances::ISOMETRY));
    }
    out
}

/// `{im z₂ = 0} ∩ D₃ = {im e^{−iθ}x₂ = 0} ∩ D₁`, on ball points with `z₂ > 0`.
pub fn glue_check(dom: &DomainD, n: usize, seed: u64) -> Result<Check> {
    let name = "D₁ and D₃ glue along im z₂ = 0";
    if dom.y_degenerate {
        return Ok(Check::skipped(name, "P⁻¹(C1) is undefined when C2 has φ = 0"));
    }
    let (c1, c3) = (&dom.configs.c1, &dom.configs.c3);
    let radius = 1.5 * vertices_t(c3)?.max_modulus();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = 1e-9;
    let origin = Vec3::new(Cx::new(0.0, 0.0), Cx::new(0.0, 0.0), Cx::new(1.0, 0.0));
    let sign = hermitian_eval(&dom.h, &origin)?.signum();
    let (mut agree, mut inside, mut off_plane) = (0, 0, 0.0f64);
    let mut taken = 0;
    while taken < n {
        let mut z = sample_box(&mut rng, radius);
        z[1] = Cx::new(rng.random_range(0.0..radius), 0.0);
        if hermitian_eval(&dom.h, &z)? * sign <= 0.0 {
            continue;
        }
        taken += 1;
        let x = dom.x_of(&z)?;
        off_plane = off_plane.max(((-c3.theta).cis() * x[1]).im.abs());
        let in3 = in_d(&z, c3, tol)?;
        let in1 = in_d(&x, c1, tol)?;
        inside += in3 as usize;
        agree += (in3 == in1) as usize;
    }
    Ok(Check::new(
        name,
        agree == n && off_plane < 1e-12,
        format!("{agree}/{n} agree, {inside} inside, max |im e^(-iθ)x₂| {off_plane:.1e}"),
    ))
}

/// The three coincidences of star lines across the charts.
pub fn same_lines_checks(dom: &DomainD, seed: u64) -> Result<Vec<Check>> {
    let (c1, c2, c3) = (&dom.configs.c1, &dom.configs.c2, &dom.configs.c3);
    let (l1, l2, l3) = (lines_t(c1)?, lines_t(c2)?, lines_t(c3)?);
    let triples = [
        (LineLabel::Star0, LineLabel::Star0, LineLabel::Star0),
        (LineLabel::Star3, LineLabel::Star3, LineLabel::Star2),
        (LineLabel::Star1, LineLabel::Star2, LineLabel::Star1),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (in3, in2, in1) in triples {
        let base = find_line(&l3, in3);
        let (mut dx, mut dy) = (0.0f64, 0.0f64);
        for _ in 0..20 {
            let s = Cx::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let z = if base.a.norm() > base.b.norm() {
                Vec3::new((base.c - base.b * s) / base.a, s, Cx::new(1.0, 0.0))
            } else {
                Vec3::new(s, (base.c - base.a * s) / base.b, Cx::new(1.0, 0.0))
            };
            dx = dx.max(find_line(&l1, in1).residual(&dom.x_of(&z)?));
            if let Some(y) = dom.y_of(&z) {
                dy = dy.max(find_line(&l2, in2).residual(&y?));
            }
        }
        let name = format!("{in3}(C3) = {in2}(C2) = {in1}(C1)");
        if dom.y_degenerate {
            out.push(Check {
                name,
                status: if dx <= tolerances::PROJECTIVE { Status::Pass } else { Status::Fail },
                detail: format!("x residual {dx:.1e}; y-chart degenerate, not compared"),
            });
        } else {
            out.push(Check::new(
                name,
                dx.max(dy) <= tolerances::PROJECTIVE,
                format!("x residual {dx:.1e}, y residual {dy:.1e}"),
            ));
        }
    }
    Ok(out)
}

/// A printed argument in the vertex table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ang {
    Zero,
    Theta,
    NegTheta,
    Phi,
    NegPhi,
    ThetaP,
    PhiP,
    NegPhiP,
}

impl Ang {
    pub fn label(self) -> &'static str {
        match self {
            Ang::Zero => "0",
            Ang::Theta => "θ",
            Ang::NegTheta => "−θ",
            Ang::Phi => "φ",
            Ang::NegPhi => "−φ",
            Ang::ThetaP => "θ′",
            Ang::PhiP => "φ′",
            Ang::NegPhiP => "−φ′",
        }
    }
}

/// A cell of the vertex table: empty, a vanishing coordinate, or an argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cell {
    Empty,
    Vanish,
    Arg(Ang),
}

#[derive(Clone, Copy, Debug)]
pub struct VertexSpec {
    pub label: usize,
    /// Index of the vertex in D₃, D₁, D₂.
    pub z: Option<usize>,
    pub x: Option<usize>,
    pub y: Option<usize>,
    /// `arg z₁, arg z₂, arg w₁, arg w₂, arg y₁, arg y₂`.
    pub cells: [Cell; 6],
}

pub const COLUMNS: [&str; 6] = ["z1", "z2", "w1", "w2", "y1", "y2"];

/// The 24 vertices of D.
///
/// `v₁₄` has `arg w₁ = 0` in print but its `w₁` vanishes identically, so the
/// cell is recorded as a vanishing coordinate.
pub const VERTEX_TABLE: [VertexSpec; 24] = {
    use Ang::*;
    use Cell::{Arg as A, Empty as E, Vanish as Z};
    const fn v(label: usize, z: usize, x: usize, y: usize, cells: [Cell; 6]) -> VertexSpec {
        const fn opt(i: usize) -> Option<usize> {
            if i == 0 {
                None
            } else {
                Some(i)
            }
        }
        VertexSpec { label, z: opt(z), x: opt(x), y: opt(y), cells }
    }
    [
        v(0, 0, 2, 1, [E, E, E, E, Z, Z]),
        v(1, 1, 1, 0, [Z, Z, E, E, E, E]),
        v(2, 2, 0, 2, [E, E, Z, Z, E, E]),
        v(3, 3, 3, 5, [A(Zero), Z, A(Zero), A(Zero), A(Zero), A(ThetaP)]),
        v(4, 4, 5, 4, [A(Zero), A(Zero), A(Zero), Z, A(Zero), A(Zero)]),
        v(5, 5, 0, 0, [A(Zero), A(Theta), A(Zero), A(NegTheta), E, E]),
        v(6, 6, 6, 13, [A(NegPhi), Z, A(Zero), A(Zero), A(Zero), A(ThetaP)]),
        v(7, 7, 8, 12, [A(NegPhi), A(Zero), A(Phi), A(Zero), Z, A(ThetaP)]),
        v(8, 8, 0, 14, [A(NegPhi), A(Theta), Z, A(Zero), A(NegPhiP), A(ThetaP)]),
        v(9, 9, 12, 0, [Z, A(Zero), A(Phi), A(NegTheta), A(PhiP), A(Zero)]),
        v(10, 10, 13, 10, [A(Zero), A(Zero), A(Phi), Z, A(Zero), A(Zero)]),
        v(11, 11, 14, 9, [A(NegPhi), A(Zero), A(Phi), A(Zero), Z, A(Zero)]),
        v(12, 12, 0, 0, [Z, A(Theta), A(Phi), A(NegTheta), E, E]),
        v(13, 13, 0, 0, [A(Zero), A(Theta), A(Zero), A(NegTheta), E, E]),
        v(14, 14, 0, 0, [A(NegPhi), A(Theta), Z, A(NegTheta), E, E]),
        v(16, 0, 4, 3, [A(Zero), A(NegTheta), A(Zero), A(Theta), A(Zero), Z]),
        v(17, 0, 7, 0, [A(NegPhi), A(NegTheta), E, E, A(PhiP), A(ThetaP)]),
        v(18, 0, 9, 0, [Z, A(NegTheta), E, E, A(PhiP), A(Zero)]),
        v(19, 0, 10, 0, [A(Zero), A(NegTheta), E, E, A(PhiP), Z]),
        v(20, 0, 11, 0, [A(NegPhi), A(NegTheta), E, E, A(PhiP), A(ThetaP)]),
        v(21, 0, 0, 6, [E, E, A(Zero), A(Theta), A(NegPhiP), Z]),
        v(22, 0, 0, 7, [E, E, A(Phi), A(Theta), A(NegPhiP), A(Zero)]),
        v(23, 0, 0, 8, [E, E, Z, A(Theta), A(NegPhiP), A(ThetaP)]),
        v(24, 0, 0, 11, [E, E, A(Phi), A(Theta), A(NegPhiP), A(Zero)]),
    ]
};

/// Vertices merged into a single point by each degenerate parameter.
pub fn collapsed_labels(p: &DerivedParams) -> BTreeSet<usize> {
    let mut s = BTreeSet::new();
    if p.d.is_degenerate() {
        s.extend([3, 4, 5, 16]);
    }
    if p.l.is_degenerate() {
        s.extend([6, 7, 8, 9, 10, 11, 17, 24]);
    }
    if p.l_prime.is_degenerate() {
        s.extend([12, 13, 14, 18, 19, 20, 21, 22, 23]);
    }
    if p.k_prime.is_degenerate() {
        s.extend([0, 7, 11]);
    }
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct CellResult {
    pub column: &'static str,
    pub printed: String,
    pub value: Option<[f64; 2]>,
    pub defect: Option<f64>,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DomainVertex {
    pub label: usize,
    /// z-frame point `[re₁, im₁, re₂, im₂]`, when available.
    pub z: Option<[f64; 4]>,
    pub collapsed: bool,
    /// Set when no source frame survives (y-only vertices with a degenerate
    /// y-chart).
    pub unavailable: bool,
    /// Largest disagreement between the D₃, D₁, D₂ descriptions.
    pub alias_defect: f64,
    pub cells: Vec<CellResult>,
    #[serde(skip)]
    pub point: Option<Vec3>,
}

impl DomainVertex {
    /// Checked and in agreement with the table (collapsed vertices are not
    /// checked).
    pub fn matches(&self) -> bool {
        self.collapsed
            || self.unavailable
            || (self.alias_defect <= tolerances::VERTEX && self.cells.iter().all(|c| c.ok))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DomainVertexTable {
    pub vertices: Vec<DomainVertex>,
}

impl DomainVertexTable {
    pub fn all_match(&self) -> bool {
        self.vertices.iter().all(|v| v.matches())
    }

    pub fn get(&self, label: usize) -> Option<&DomainVertex> {
        self.vertices.iter().find(|v| v.label == label)
    }
}

fn angle(dom: &DomainD, a: Ang) -> PiRational {
    let c3 = &dom.configs.c3;
    let (tp, fp) = dom.primed();
    match a {
        Ang::Zero => PiRational::zero(),
        Ang::Theta => c3.theta,
        Ang::NegTheta => -c3.theta,
        Ang::Phi => c3.phi,
        Ang::NegPhi => -c3.phi,
        Ang::ThetaP => tp,
        Ang::PhiP => fp,
        Ang::NegPhiP => -fp,
    }
}

fn pack(z: &Vec3) -> [f64; 4] {
    [z[0].re, z[0].im, z[1].re, z[1].im]
}

/// Assembles the 24 vertices in the z-frame and checks every printed cell.
///
/// In the k′-negative regime `y₂` is compared after a sign change. When the
/// y-chart is degenerate, y descriptions and y columns are skipped.
pub fn vertices_d(dom: &DomainD) -> Result<DomainVertexTable> {
    let (c1, c2, c3) = (&dom.configs.c1, &dom.configs.c2, &dom.configs.c3);
    let vz = vertices_t(c3)?;
    let vx = vertices_t(c1)?;
    let vy = vertices_t(c2)?;
    let x_to_z = inverse(&dom.r1_c3)?.matrix;
    let gone = collapsed_labels(&dom.params);
    let mut out = Vec::new();
    for spec in VERTEX_TABLE.iter() {
        let mut cands = Vec::new();
        if let Some(k) = spec.z {
            cands.push(vz.get(k));
        }
        if let Some(k) = spec.x {
            cands.push(dehomogenize(&(x_to_z * vx.get(k)))?);
        }
        if let (Some(k), false) = (spec.y, dom.y_degenerate) {
            cands.push(dehomogenize(&(dom.r2_c2.matrix * vy.get(k)))?);
        }
        let collapsed = gone.contains(&spec.label);
        let Some(&z) = cands.first() else {
            out.push(DomainVertex {
                label: spec.label,
                z: None,
                collapsed,
                unavailable: true,
                alias_defect: 0.0,
                cells: Vec::new(),
                point: None,
            });
            continue;
        };
        let alias_defect = cands
            .iter()
            .map(|c| (c - z).iter().map(|e| e.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        let w = dom.w_of(&z).ok();
        let y = dom.y_of(&z).and_then(|r| r.ok());
        let coords: [Option<Cx>; 6] = [
            Some(z[0]),
            Some(z[1]),
            w.map(|w| w[0]),
            w.map(|w| w[1]),
            y.map(|y| y[0]),
            y.map(|y| if dom.kneg { -y[1] } else { y[1] }),
        ];
        let mut cells = Vec::new();
        for (i, cell) in spec.cells.iter().enumerate() {
            if *cell == Cell::Empty || (i >= 4 && dom.y_degenerate) {
                continue;
            }
            let value = coords[i];
            let (printed, defect, ok) = match (cell, value) {
                (_, None) => ("?".to_string(), None, false),
                (Cell::Vanish, Some(c)) => ("= 0".to_string(), Some(c.norm()), c.norm() < tolerances::ZERO_COORD),
                (Cell::Arg(a), Some(c)) => {
                    let d = if c.norm() < 1e-12 {
                        f64::INFINITY
                    } else {
                        (c / c.norm() - angle(dom, *a).cis()).norm()
                    };
                    (a.label().to_string(), Some(d), d <= tolerances::VERTEX)
                }
                (Cell::Empty, _) => unreachable!(),
            };
            cells.push(CellResult {
                column: COLUMNS[i],
                printed,
                value: value.map(|c| [c.re, c.im]),
                defect,
                ok,
            });
        }
        out.push(DomainVertex {
            label: spec.label,
            z: Some(pack(&z)),
            collapsed,
            unavailable: false,
            alias_defect,
            cells,
            point: Some(z),
        });
    }
    Ok(DomainVertexTable { vertices: out })
}

/// Membership in the closure of D by the six argument windows.
pub fn in_d_union(point: &Vec3, dom: &DomainD, tol: f64) -> Result<bool> {
    let z = dehomogenize(point)?;
    let w = dom.w_of(&z)?;
    let (t, f) = (dom.configs.c3.theta.coeff(), dom.configs.c3.phi.coeff());
    let base = arg_in(z[0], -f, 0.0, tol)
        && arg_in(z[1], -t, t, tol)
        && arg_in(w[0], 0.0, f, tol)
        && arg_in(w[1], -t, t, tol);
    let Some(y) = dom.y_of(&z) else {
        return Ok(base);
    };
    let y = y?;
    let (tp, fp) = dom.primed();
    let y2 = if dom.kneg { -y[1] } else { y[1] };
    Ok(base && arg_in(y[0], -fp.coeff(), fp.coeff(), tol) && arg_in(y2, 0.0, tp.coeff(), tol))
}

const Z: usize = 0;
const Y: usize = 1;
const W: usize = 2;

/// The twelve inequalities for D, with all normals taken in C3.
pub fn bisd_bullets(dom: &DomainD) -> Result<Vec<Bullet>> {
    let (c2, c3) = (&dom.configs.c2, &dom.configs.c3);
    let sp = &dom.pairings;
    let n = |i| star_normal(c3, i);
    let (t, f) = (c3.theta, c3.phi);
    let (tp, fp) = dom.primed();
    let zero = PiRational::zero();
    let app = |m: &ConfiguredMap, v: Vec3| carry(m, c3, c3, v);
    let k2 = compose(&sp.k, &sp.k)?;
    let mk = |name: &str, frame, coord, phase, sense, n_a, n_b| Bullet {
        name: name.into(),
        frame,
        coord,
        phase,
        sense,
        n_a,
        n_b,
    };
    Ok(vec![
        mk("im z1 ≤ 0", Z, 0, zero, -1.0, n(1)?,
            carry(&inverse(&move_p(c3)?)?, c2, c3, star_normal(c2, 3)?)?),
        mk("im e^{iφ}z1 ≥ 0", Z, 0, f, 1.0, n(0)?, app(&inverse(&sp.k)?, n(0)?)?),
        mk("im e^{-iθ}z2 ≤ 0", Z, 1, -t, -1.0, n(3)?, app(&sp.r1, n(3)?)?),
        mk("im e^{iθ}z2 ≥ 0", Z, 1, t, 1.0, n(3)?, app(&inverse(&sp.r1)?, n(3)?)?),
        mk("im e^{iφ′}y1 ≥ 0", Y, 0, fp, 1.0, n(0)?, app(&k2, n(0)?)?),
        mk("im y2 ≥ 0", Y, 1, zero, 1.0, n(1)?,
            app(&compose(&inverse(&sp.q)?, &sp.r1)?, n(3)?)?),
        mk("im e^{-iθ′}y2 ≤ 0", Y, 1, -tp, -1.0, n(3)?,
            app(&compose(&inverse(&sp.r1)?, &sp.q)?, n(1)?)?),
        mk("im e^{-iφ′}y1 ≤ 0", Y, 0, -fp, -1.0, n(0)?, app(&inverse(&k2)?, n(0)?)?),
        mk("im w1 ≥ 0", W, 0, zero, 1.0, n(3)?, app(&sp.q, n(1)?)?),
        mk("im e^{-iφ}w1 ≤ 0", W, 0, -f, -1.0, n(0)?, app(&sp.k, n(0)?)?),
        mk("im e^{-iθ}w2 ≤ 0", W, 1, -t, -1.0, n(1)?, app(&sp.r2, n(1)?)?),
        mk("im e^{iθ}w2 ≥ 0", W, 1, t, 1.0, n(1)?, app(&inverse(&sp.r2)?, n(1)?)?),
    ])
}

/// Samples the twelve bisD equivalences around the vertex cloud of C3.
pub fn bisd_sample(dom: &DomainD, bullets: &[Bullet], n: usize, seed: u64) -> Result<SampleReport> {
    let radius = 1.5 * vertices_t(&dom.configs.c3)?.max_modulus();
    let to_y = |z: &Vec3| dom.y_of(z).unwrap_or(Err(Error::SingularSystem));
    let to_w = |z: &Vec3| dom.w_of(z);
    sample_bullets(&dom.h, radius, bullets, &[&to_y, &to_w], n, seed)
}

pub fn bisd_check(dom: &DomainD, n: usize, seed: u64) -> Result<SampleReport> {
    if dom.kneg {
        return Err(Error::PreconditionFailed(format!(
            "{} is in the k′-negative regime",
            dom.signature
        )));
    }
    bisd_sample(dom, &bisd_bullets(dom)?, n, seed)
}

/// The diagonal area form of a chart with `φ < 0`.
pub fn kneg_form(c: &Configuration) -> Result<HermitianForm3> {
    if !c.phi.is_negative() {
        return Err(Error::PreconditionFailed(format!("φ = {} is not negative", c.phi)));
    }
    let h = hermitian_form(c)?;
    let sig = signature(&h, 1e-12);
    if (sig.0, sig.1) != (1, 2) {
        return Err(Error::UnsupportedDegeneracy(format!("signature {sig:?} at {c}")));
    }
    Ok(h)
}

#[derive(Clone, Debug, Serialize)]
pub struct KnegVertex {
    /// z-frame point, `[re₁, im₁, re₂, im₂, re₃, im₃]`.
    pub z: [f64; 6],
    /// `⟨v, v⟩` under `H(C3)`, with `v` scaled to unit largest entry.
    pub norm: f64,
    /// The `e₁` entry of `H(C2)`.
    pub chart_norm: f64,
    pub on_boundary: bool,
    /// `on_boundary` holds exactly when k′ is infinite.
    pub consistent: bool,
    #[serde(skip)]
    pub point: Vec3,
}

/// `v*₂₃`, where `v₀, v₇, v₁₁` meet: the first basis vector of the y-chart.
pub fn kneg_collapsed_vertex(dom: &DomainD) -> Result<KnegVertex> {
    if !dom.kneg {
        return Err(Error::PreconditionFailed(format!("k′ = {} is positive", dom.params.k_prime)));
    }
    let col = dom.r2_c2.matrix.column(0).into_owned();
    let size = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if size == 0.0 {
        return Err(Error::SingularSystem);
    }
    let big = col.iter().copied().fold(Cx::new(0.0, 0.0), |a, z| if z.norm() > a.norm() { z } else { a });
    let v = col / big;
    let norm = hermitian_eval(&dom.h, &v)?;
    let chart_norm = hermitian_form(&dom.configs.c2)?.matrix()[(0, 0)].re;
    let on_boundary = norm.abs() < tolerances::NULL_NORM;
    Ok(KnegVertex {
        z: [v[0].re, v[0].im, v[1].re, v[1].im, v[2].re, v[2].im],
        norm,
        chart_norm,
        on_boundary,
        consistent: on_boundary == dom.params.k_prime.is_infinite(),
        point: v,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryVertex {
    pub parameter: &'static str,
    pub vertex: &'static str,
    pub norm: f64,
}

impl BoundaryVertex {
    pub fn is_null(&self) -> bool {
        self.norm.abs() < tolerances::NULL_NORM
    }
}

/// The collapsed vertex of every infinite parameter, with its `H(C3)` norm.
pub fn boundary_vertices(dom: &DomainD) -> Result<Vec<BoundaryVertex>> {
    let p = &dom.params;
    let vz = vertices_t(&dom.configs.c3)?;
    let mut out = Vec::new();
    let mut push = |parameter, vertex, v: Vec3| -> Result<()> {
        let v = normalize_vec(&v);
        out.push(BoundaryVertex { parameter, vertex, norm: hermitian_eval(&dom.h, &v)? });
        Ok(())
    };
    if p.d.is_infinite() {
        push("d", "v3 = v4 = v5", vz.get(3))?;
    }
    if p.l.is_infinite() {
        push("l", "v6 = v7 = v8", vz.get(6))?;
        push("l", "v9 = v10 = v11", vz.get(9))?;
    }
    if p.l_prime.is_infinite() {
        push("l′", "v12 = v13 = v14", vz.get(12))?;
    }
    if p.k_prime.is_infinite() {
        push("k′", "v*23", kneg_collapsed_vertex(dom)?.point)?;
    }
    Ok(out)
}

fn normalize_vec(v: &Vec3) -> Vec3 {
    let big = v.iter().copied().fold(Cx::new(0.0, 0.0), |a, z| if z.norm() > a.norm() { z } else { a });
    v / big
}

/// `normalize_max` for a matrix, re-exported for report code.
pub fn canonical(m: &Mat3) -> Mat3 {
    normalize_max(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dom(p: u32, k: u32, q: u32) -> DomainD {
        build_domain(LatticeSignature::new(p, k, q)).unwrap()
    }

    #[test]
    fn kneg_flags() {
        assert!(!dom(4, 4, 6).kneg);
        assert!(dom(6, 6, 3).kneg);
        assert!(dom(3, 3, 3).y_degenerate);
    }

    #[test]
    fn origin_is_v1() {
        let d = dom(4, 4, 6);
        let t = vertices_d(&d).unwrap();
        let v1 = t.get(1).unwrap();
        assert_eq!(v1.z, Some([0.0, 0.0, 0.0, 0.0]));
        assert!(in_d_union(&v1.point.unwrap(), &d, 1e-6).unwrap());
    }

    #[test]
    fn kneg_form_precondition() {
        let d = dom(4, 4, 6);
        assert!(matches!(kneg_form(&d.configs.c2), Err(Error::PreconditionFailed(_))));
        assert!(matches!(kneg_collapsed_vertex(&d), Err(Error::PreconditionFailed(_))));
    }
}
