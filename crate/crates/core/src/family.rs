//! The four-parameter family of generalized quasi-Sasaki structures on
//! six-dimensional Lie groups, written on the coframe `e1..e5, A2`.

use std::fmt;

use crate::acms::{phi_invariance_type, unit, AdaptedStructure, Geometry, Predicates, Tensor3, XI};
use crate::connection::{curvature, torsion_type, CharacteristicConnection, CurvatureData, TorsionType};
use crate::error::{Error, Result};
use crate::exterior::{d_squared_zero, ext_d, Coframe, Form, Symbol, DIM};
use crate::frames::{frame_change_verify, koszul_connection, CanonicalAlgebra, ConnectionForms, FrameChange};
use crate::scalar::{rat, rational_sqrt, Rational, Scalar, TrigBasis, TrigScalar};
use crate::spinor::SpinorSpace;
use crate::torsionclass::{cartan_decompose, ClassReport, WModule, WSubspaces};

/// Position of the auxiliary 1-form `A2` on the family coframe.
pub const A2: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FamilyParams {
    a: [Rational; 4],
}

impl FamilyParams {
    /// Requires `a1 a4 = a2 a3`.
    pub fn new(a1: Rational, a2: Rational, a3: Rational, a4: Rational) -> Result<Self> {
        let lhs = &a1 * &a4;
        let rhs = &a2 * &a3;
        if lhs != rhs {
            return Err(Error::IntegrabilityConstraint {
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            });
        }
        Ok(FamilyParams { a: [a1, a2, a3, a4] })
    }

    pub fn from_ints(a1: i64, a2: i64, a3: i64, a4: i64) -> Result<Self> {
        Self::new(rat(a1, 1), rat(a2, 1), rat(a3, 1), rat(a4, 1))
    }

    /// `a_k` for `k = 1..4`.
    pub fn a(&self, k: usize) -> &Rational {
        &self.a[k - 1]
    }

    pub fn values(&self) -> &[Rational; 4] {
        &self.a
    }

    /// `α = -2((a1 - a3)(2a1 + a3) + (a2 - a4)(2a2 + a4))`.
    pub fn alpha(&self) -> Rational {
        alpha(&self.a)
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(Scalar::is_zero)
    }
}

impl fmt::Display for FamilyParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a1, a2, a3, a4] = &self.a;
        write!(f, "({a1}, {a2}, {a3}, {a4})")
    }
}

fn alpha(a: &[Rational; 4]) -> Rational {
    let [a1, a2, a3, a4] = a;
    let two = rat(2, 1);
    -&two * ((a1 - a3) * (&two * a1 + a3) + (a2 - a4) * (&two * a2 + a4))
}

fn e(i: usize) -> Form {
    Form::generator(i - 1)
}

fn ee(i: usize, j: usize) -> Form {
    Form::product(&[i - 1, j - 1], rat(1, 1))
}

fn a2_wedge(i: usize) -> Form {
    Form::product(&[A2, i - 1], rat(1, 1))
}

pub fn f_form() -> Form {
    ee(1, 2).sub(&ee(3, 4))
}

pub fn z1() -> Form {
    ee(1, 3).sub(&ee(2, 4))
}

pub fn z2() -> Form {
    ee(1, 4).add(&ee(2, 3))
}

fn family_symbols() -> Vec<Symbol> {
    let mut s: Vec<Symbol> = (1..=DIM).map(|i| Symbol::metric(format!("e{i}"), i)).collect();
    s.push(Symbol::auxiliary("A2"));
    s
}

/// The structure equations with `dA2 = αF` for arbitrary parameters, without
/// the integrability check.
pub fn structure_equations(a: &[Rational; 4]) -> Coframe {
    let [a1, a2, a3, a4] = a;
    let two = rat(2, 1);
    let p = &two * a1 + a3;
    let q = &two * a2 + a4;
    let d = vec![
        a2_wedge(2).sub(&ee(3, 5).scale(&p)).sub(&ee(4, 5).scale(&q)),
        a2_wedge(1).neg().add(&ee(4, 5).scale(&p)).sub(&ee(3, 5).scale(&q)),
        a2_wedge(4).neg().add(&ee(1, 5).scale(&p)).add(&ee(2, 5).scale(&q)),
        a2_wedge(3).sub(&ee(2, 5).scale(&p)).add(&ee(1, 5).scale(&q)),
        z1().scale(&(-&two * (a1 - a3))).sub(&z2().scale(&(&two * (a2 - a4)))),
        f_form().scale(&alpha(a)),
    ];
    Coframe::new(family_symbols(), d, [1, 2, 3, 4, 5]).expect("family coframe is well formed")
}

/// Levi-Civita connection forms of the family, as tabulated.
pub fn omega_table(params: &FamilyParams) -> ConnectionForms {
    let [a1, a2, a3, a4] = params.values();
    let two = rat(2, 1);
    let s1 = a1 + &two * a3;
    let s2 = a2 + &two * a4;
    let d1 = a1 - a3;
    let d2 = a2 - a4;
    let a = Form::generator(A2);
    ConnectionForms::zero()
        .with(0, 1, a.clone())
        .with(0, 2, e(5).scale(&s1))
        .with(0, 3, e(5).scale(&s2))
        .with(1, 2, e(5).scale(&s2))
        .with(1, 3, e(5).scale(&(-&s1)))
        .with(2, 3, a.neg())
        .with(0, 4, e(3).scale(&(-&d1)).sub(&e(4).scale(&d2)))
        .with(1, 4, e(3).scale(&(-&d2)).add(&e(4).scale(&d1)))
        .with(2, 4, e(1).scale(&d1).add(&e(2).scale(&d2)))
        .with(3, 4, e(1).scale(&d2).sub(&e(2).scale(&d1)))
}

#[derive(Debug, Clone)]
pub struct FamilyInstance {
    pub params: FamilyParams,
    pub coframe: Coframe,
    pub alpha: Rational,
    pub f: Form,
    pub z1: Form,
    pub z2: Form,
    pub omega_g: ConnectionForms,
}

/// Builds the instance and checks `d² = 0`, the tabulated connection forms
/// against the structure equations, and the table against the Koszul solve.
pub fn build(params: FamilyParams) -> Result<FamilyInstance> {
    let coframe = structure_equations(params.values());
    let d2 = d_squared_zero(&coframe)?;
    if let Some((name, f)) = d2.failures().next() {
        return Err(Error::InternalConsistency(format!(
            "d^2 {name} = {} for admissible parameters {params}",
            coframe.render(f)
        )));
    }
    let omega_g = omega_table(&params);
    let koszul = koszul_connection(&coframe)?;
    if koszul != omega_g {
        return Err(Error::InternalConsistency(
            "tabulated connection forms differ from the Koszul solution".into(),
        ));
    }
    // Geometry::new re-checks the first structure equation
    Geometry::new(coframe.clone(), omega_g.clone())?;
    Ok(FamilyInstance {
        alpha: params.alpha(),
        params,
        coframe,
        f: f_form(),
        z1: z1(),
        z2: z2(),
        omega_g,
    })
}

impl FamilyInstance {
    pub fn geometry(&self) -> Geometry {
        Geometry::new(self.coframe.clone(), self.omega_g.clone()).expect("checked at build time")
    }
}

/// One replayed identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineItem {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct FamilyReport {
    pub params: FamilyParams,
    pub items: Vec<LineItem>,
    pub class: ClassReport,
    pub predicates: Predicates,
    pub torsion_type: TorsionType,
    pub curvature: CurvatureData,
    pub characteristic: CharacteristicConnection,
}

impl FamilyReport {
    pub fn all_passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    pub fn failures(&self) -> Vec<&LineItem> {
        self.items.iter().filter(|i| !i.passed).collect()
    }
}

fn item(items: &mut Vec<LineItem>, name: &str, passed: bool, detail: String) {
    items.push(LineItem {
        name: name.to_string(),
        passed,
        detail,
    });
}

fn render(f: &Form, c: &Coframe) -> String {
    c.render(f)
}

/// Recomputes every tensor of the instance from its structure equations and
/// compares with the closed-form statements about the family.
pub fn replay(inst: &FamilyInstance) -> Result<FamilyReport> {
    let [a1, a2, a3, a4] = inst.params.values().clone();
    let zero = |q: &Rational| Scalar::is_zero(q);
    let c = &inst.coframe;
    let geo = inst.geometry();
    let mut items = Vec::new();

    let predicates = geo.predicates()?;
    item(
        &mut items,
        "generalized quasi-Sasaki",
        predicates.generalized_quasi_sasaki,
        format!("{predicates:?}"),
    );

    let d_eta = geo.d_eta()?;
    let gamma = geo.gamma()?;
    let six = rat(6, 1);
    let lhs = gamma.add(&d_eta.scale(&rat(2, 1)));
    let rhs = inst.z1.scale(&(&six * &a3)).add(&inst.z2.scale(&(&six * &a4)));
    item(&mut items, "gamma + 2 d(eta) = 6 a3 Z1 + 6 a4 Z2", lhs == rhs, render(&lhs, c));
    let lhs = gamma.sub(&d_eta);
    let rhs = inst.z1.scale(&(&six * &a1)).add(&inst.z2.scale(&(&six * &a2)));
    item(&mut items, "gamma - d(eta) = 6 a1 Z1 + 6 a2 Z2", lhs == rhs, render(&lhs, c));

    let n = geo.nijenhuis()?;
    let n_xi = n.slot(XI);
    item(
        &mut items,
        "N(xi, X, Y) = 2 d(eta)(X, Y)",
        n_xi == d_eta.scale(&rat(2, 1)),
        render(&n_xi, c),
    );
    let n_parts = cartan_decompose(&n);
    item(
        &mut items,
        "N totally skew iff a3 = a4 = 0",
        n.is_totally_skew() == (zero(&a3) && zero(&a4)),
        format!("totally skew: {}", n.is_totally_skew()),
    );
    item(
        &mut items,
        "N traceless cyclic iff a1 = a2 = 0",
        n_parts.is_traceless_cyclic() == (zero(&a1) && zero(&a2)),
        format!("traceless cyclic: {}", n_parts.is_traceless_cyclic()),
    );

    let df = ext_d(&inst.f, c)?;
    item(&mut items, "dF = 0", df.is_zero(), render(&df, c));

    let cc = geo.characteristic_connection()?;
    let a = Form::generator(A2);
    let expected = ConnectionForms::zero().with(0, 1, a.clone()).with(2, 3, a.neg());
    item(
        &mut items,
        "nabla^c is determined by A2 alone",
        cc.omega_c == expected,
        format!("omega^c_12 = {}", render(cc.omega_c.get(0, 1), c)),
    );

    let cd = curvature(c, &cc.omega_c)?;
    let mut r_ok = true;
    for i in 0..DIM {
        for j in 0..DIM {
            let want = inst.f.scale(&(&inst.alpha * inst.f.eval(&[i, j])));
            r_ok &= cd.get(i, j) == &want;
        }
    }
    item(
        &mut items,
        "R^c = alpha F (x) F",
        r_ok,
        format!("alpha = {}, R12 = {}", inst.alpha, render(cd.get(0, 1), c)),
    );
    let mut ric_ok = true;
    for x in 0..DIM {
        for y in 0..DIM {
            let want = if x == y && x != XI { -inst.alpha.clone() } else { rat(0, 1) };
            ric_ok &= cd.ricci.get(x, y) == &want;
        }
    }
    item(
        &mut items,
        "Ric^c = -alpha diag(1,1,1,1,0)",
        ric_ok,
        format!("Ric(E1,E1) = {}", cd.ricci.get(0, 0)),
    );
    let hol_ok = if zero(&inst.alpha) {
        cd.holonomy_basis.is_empty()
    } else {
        cd.holonomy_basis.len() == 1
            && inst.f.metric_coordinates().iter().zip(cd.holonomy_basis[0].metric_coordinates()).all(
                |(x, y)| {
                    let k = cd.holonomy_basis[0].eval(&[0, 1]);
                    x * &k == y
                },
            )
    };
    item(
        &mut items,
        "holonomy algebra spanned by F",
        hol_ok,
        format!("dim = {}", cd.holonomy_basis.len()),
    );

    let spin = SpinorSpace::new()?;
    let kernel = spin.kernel(&inst.f)?;
    let parallel = kernel.iter().all(|psi| spin.annihilates(&cc.omega_c, c.len(), psi));
    item(
        &mut items,
        "two parallel spinors in the kernel of F",
        kernel.len() == 2 && parallel,
        format!("kernel dim = {}, annihilated = {parallel}", kernel.len()),
    );

    let gamma_t = geo.intrinsic_torsion()?;
    let class = WSubspaces::new().classify(&gamma_t);
    let class_ok = zero(class.norm(WModule::W3))
        && zero(class.norm(WModule::W5))
        && zero(class.norm(WModule::W6))
        && zero(&class.residual)
        && zero(class.norm(WModule::W4)) == (zero(&a1) && zero(&a2))
        && zero(class.norm(WModule::W7)) == (zero(&a3) && zero(&a4));
    item(&mut items, "class W4 + W7 with W4/W7 strictness", class_ok, class.strict_class());

    let (_, ttype) = torsion_type(&cc);
    let parts = cartan_decompose(&cc.torsion);
    item(
        &mut items,
        "torsion skew iff a3 = a4 = 0, traceless cyclic iff a1 = a2 = 0",
        parts.is_skew() == (zero(&a3) && zero(&a4)) && parts.is_traceless_cyclic() == (zero(&a1) && zero(&a2)),
        ttype.tag().to_string(),
    );

    let g = geo.nabla_phi_endomorphism()?;
    let two = rat(2, 1);
    let four = rat(4, 1);
    let want = inst
        .z1
        .scale(&(-&two * &a2 - &four * &a4))
        .add(&inst.z2.scale(&(&two * &a1 + &four * &a3)));
    let got = g.slot(XI);
    item(&mut items, "g((nabla_xi phi)X, Y)", got == want, render(&got, c));
    let want = inst.z1.scale(&(&a2 - &a4)).sub(&inst.z2.scale(&(&a1 - &a3)));
    let got = Form::from_terms(
        2,
        crate::exterior::metric_monomials(2).into_iter().map(|m| {
            let x = m.trailing_zeros() as usize;
            let y = (m & (m - 1)).trailing_zeros() as usize;
            (m, g.get(x, XI, y).clone())
        }),
    );
    let antisym = (0..DIM).all(|x| (0..DIM).all(|y| g.get(x, XI, y) == &-g.get(y, XI, x)));
    item(&mut items, "g((nabla_X phi)xi, Y)", antisym && got == want, render(&got, c));
    let phi = |v: usize| AdaptedStructure::phi(&unit::<Rational>(v));
    let horizontal_zero = (0..DIM).all(|x| {
        (0..DIM).all(|y| (0..DIM).all(|z| Scalar::is_zero(&g.apply(&phi(x), &phi(y), &phi(z)))))
    });
    item(&mut items, "g((nabla_phiX phi)phiY, phiZ) = 0", horizontal_zero, String::new());

    let five = rat(5, 1);
    let nearly_expected = a1 == -&five * &a3 && a2 == -&five * &a4;
    item(
        &mut items,
        "nearly cosymplectic iff a1 = -5 a3, a2 = -5 a4",
        predicates.nearly_cosymplectic == nearly_expected,
        format!("nearly cosymplectic: {}", predicates.nearly_cosymplectic),
    );
    let quasi_expected = a1 == -&two * &a3 && a2 == -&two * &a4;
    item(
        &mut items,
        "quasi-cosymplectic iff a1 = -2 a3, a2 = -2 a4",
        predicates.quasi_cosymplectic == quasi_expected,
        format!("quasi-cosymplectic: {}", predicates.quasi_cosymplectic),
    );

    // dη ∈ Λ²₂: anti-invariant under φ
    if !d_eta.is_zero() {
        let t = phi_invariance_type(&d_eta)?;
        item(&mut items, "d(eta) is phi-anti-invariant", t == -1, format!("type {t}"));
    }

    Ok(FamilyReport {
        params: inst.params.clone(),
        items,
        class,
        predicates,
        torsion_type: ttype,
        curvature: cd,
        characteristic: cc,
    })
}

/// [`replay`], failing on the first mismatching identity.
pub fn verify_family(inst: &FamilyInstance) -> Result<FamilyReport> {
    let report = replay(inst)?;
    let failed: Vec<String> = report.failures().iter().map(|i| i.name.clone()).collect();
    if !failed.is_empty() {
        return Err(Error::Verification(format!(
            "{} at parameters {}",
            failed.join("; "),
            inst.params
        )));
    }
    Ok(report)
}

/// The intrinsic torsion tensor in closed form:
/// `Γ(e5) = (a1 + 2a3) Z1 + (a2 + 2a4) Z2`,
/// `Γ(e1) = (a1 - a3) e35 + (a2 - a4) e45`, and so on.
pub fn closed_form_gamma(params: &FamilyParams) -> Tensor3 {
    let omega = omega_table(params);
    // metric legs of the table, read as a tensor; A2 sits in u(2)
    let t = Tensor3::from_fn(|x, i, j| omega.get(i, j).coefficient(1 << x));
    crate::acms::pr_w(&t)
}

/// Certificate state for a group identification.
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    Emitted(FrameChange),
    NotEmitted(String),
}

impl Certificate {
    pub fn frame_change(&self) -> Option<&FrameChange> {
        match self {
            Self::Emitted(f) => Some(f),
            Self::NotEmitted(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Identification {
    /// `None` when no parameter vanishes.
    pub algebra: Option<CanonicalAlgebra>,
    pub case: &'static str,
    pub certificate: Certificate,
}

impl Identification {
    pub fn label(&self) -> String {
        match self.algebra {
            None => "unclassified-here".to_string(),
            Some(a) if self.case == "i" => format!("{a} (Stiefel-type W4 structure)"),
            Some(a) => a.to_string(),
        }
    }
}

pub const NOT_EMITTED: &str = "requires quadratic extension — not emitted";

fn names() -> [&'static str; 6] {
    ["u1", "u2", "u3", "v1", "v2", "v3"]
}

/// `u1 = s(b1 e1 + b2 e2 + r e4)`, `u2 = s(-b2 e1 + b1 e2 + r e3)`,
/// `u3 = A2 + t e5`, and `v` with `-r`, `-t`.
fn block_certificate(b1: &Rational, b2: &Rational, r: &Rational, t: &Rational) -> Vec<Form> {
    let a = Form::generator(A2);
    let mut out = Vec::new();
    for sign in [rat(1, 1), rat(-1, 1)] {
        let r = r * &sign;
        let t = t * &sign;
        out.push(e(1).scale(b1).add(&e(2).scale(b2)).add(&e(4).scale(&r)));
        out.push(e(1).scale(&-b2).add(&e(2).scale(b1)).add(&e(3).scale(&r)));
        out.push(a.add(&e(5).scale(&t)));
    }
    out
}

fn trig(c: &[(usize, TrigScalar)]) -> Form<TrigScalar> {
    c.iter()
        .fold(Form::zero(1), |acc, (p, s)| acc.add(&Form::monomial(1 << p, s.clone())))
}

fn rotation_pair(basis_f: bool, plus: bool, swap_order: bool) -> (Form<TrigScalar>, Form<TrigScalar>) {
    let (s, co) = if basis_f {
        (TrigScalar::basis(TrigBasis::SinF), TrigScalar::basis(TrigBasis::CosF))
    } else {
        (TrigScalar::basis(TrigBasis::SinG), TrigScalar::basis(TrigBasis::CosG))
    };
    let sg = if plus { rat(1, 1) } else { rat(-1, 1) };
    // x = e1 ± e4, y = e2 ± e3
    let x = |k: &TrigScalar| vec![(0, k.clone()), (3, k.scale(&sg))];
    let y = |k: &TrigScalar| vec![(1, k.clone()), (2, k.scale(&sg))];
    // cos·x - sin·y and sin·x + cos·y
    let first = trig(&[x(&co), y(&s.neg())].concat());
    let second = trig(&[x(&s), y(&co)].concat());
    if swap_order {
        (second, first)
    } else {
        (first, second)
    }
}

/// Certificates for `a2 = a4 = 0`.
fn identify_real(a1: &Rational, a3: &Rational) -> (CanonicalAlgebra, &'static str, Certificate) {
    let two = rat(2, 1);
    let three = rat(3, 1);
    let a = Form::generator(A2);
    if a1 == a3 {
        let df = a.add(&e(5).scale(&(&three * a1)));
        let dg = a.sub(&e(5).scale(&(&three * a1)));
        let (u1, u2) = rotation_pair(true, true, false);
        let (u3, u4) = rotation_pair(false, false, false);
        let lift = |f: &Form| f.map(|q| TrigScalar::constant(q.clone()));
        let forms = vec![u1, u2, u3, u4, lift(&df), lift(&dg)];
        let fc = FrameChange::trig(&["u1", "u2", "u3", "u4", "u5", "u6"], forms, df, dg);
        return (CanonicalAlgebra::Abelian6, "iii-a", Certificate::Emitted(fc));
    }
    if a3 == &(-&two * a1) {
        let (u1, u2) = rotation_pair(true, true, false);
        let (u3, u4) = rotation_pair(true, false, true);
        let u5 = e(5).scale(&(rat(-2, 3) / a1)).map(|q| TrigScalar::constant(q.clone()));
        let u6 = a.map(|q| TrigScalar::constant(q.clone()));
        let forms = vec![u1, u2, u3, u4, u5, u6];
        let fc = FrameChange::trig(&["u1", "u2", "u3", "u4", "u5", "u6"], forms, a.clone(), a.clone());
        return (CanonicalAlgebra::Heis5R, "iii-b", Certificate::Emitted(fc));
    }
    let k = &two * (a1 - a3) * (&two * a1 + a3);
    let t = &two * a1 + a3;
    let forms = vec![
        e(1).add(&e(4)),
        e(2).add(&e(3)),
        a.add(&e(5).scale(&t)),
        e(1).sub(&e(4)),
        e(2).sub(&e(3)),
        a.sub(&e(5).scale(&t)),
    ];
    let (target, case, s) = if k > rat(0, 1) {
        (CanonicalAlgebra::Su2Su2, "iii-c", k.clone())
    } else {
        (CanonicalAlgebra::Sl2Sl2, "iii-d", -k.clone())
    };
    let one = rat(1, 1);
    let fc = FrameChange::new(&names(), forms).with_scale_squares(vec![
        s.clone(),
        s.clone(),
        one.clone(),
        s.clone(),
        s,
        one,
    ]);
    (target, case, Certificate::Emitted(fc))
}

/// Substitutes `e3 -> e4`, `e4 -> -e3`.
fn swap_form<S: Scalar>(f: &Form<S>) -> Form<S> {
    let c3 = f.coefficient(1 << 2);
    let c4 = f.coefficient(1 << 3);
    let rest = Form::from_terms(1, f.terms().filter(|(m, _)| *m != 4 && *m != 8).map(|(m, c)| (m, c.clone())));
    rest.add(&Form::monomial(1 << 3, c3)).add(&Form::monomial(1 << 2, c4.neg()))
}

fn swap_certificate(c: Certificate) -> Certificate {
    match c {
        Certificate::Emitted(fc) => Certificate::Emitted(FrameChange {
            forms: fc.forms.iter().map(swap_form).collect(),
            phases: fc.phases.map(|(df, dg)| (swap_form(&df), swap_form(&dg))),
            ..fc
        }),
        other => other,
    }
}

/// Identifies the Lie algebra of the group carrying `params` whenever one of
/// the parameters vanishes, with a frame-change certificate.
pub fn identify_group(params: &FamilyParams) -> Result<Identification> {
    if params.is_zero() {
        return Err(Error::Degenerate("all parameters vanish".into()));
    }
    let [a1, a2, a3, a4] = params.values();
    let z = |q: &Rational| Scalar::is_zero(q);
    if !params.values().iter().any(z) {
        return Ok(Identification {
            algebra: None,
            case: "none",
            certificate: Certificate::NotEmitted("no parameter vanishes".into()),
        });
    }
    let quadratic = |x: &Rational, y: &Rational| rational_sqrt(&(x * x + y * y));
    let two = rat(2, 1);
    let one = rat(1, 1);
    if z(a3) && z(a4) {
        let certificate = match quadratic(a1, a2) {
            Some(r) => {
                let forms = block_certificate(a1, a2, &r, &(&two * &r))
                    .into_iter()
                    .enumerate()
                    .map(|(k, f)| if k % 3 == 2 { f } else { f.scale(&two) })
                    .collect();
                Certificate::Emitted(FrameChange::new(&names(), forms))
            }
            None => Certificate::NotEmitted(NOT_EMITTED.into()),
        };
        return Ok(Identification {
            algebra: Some(CanonicalAlgebra::Su2Su2),
            case: "i",
            certificate,
        });
    }
    if z(a1) && z(a2) {
        let certificate = match quadratic(a3, a4) {
            Some(r) => {
                let forms = block_certificate(a3, a4, &r, &r);
                let two_sq = vec![two.clone(), two.clone(), one.clone(), two.clone(), two.clone(), one.clone()];
                Certificate::Emitted(FrameChange::new(&names(), forms).with_scale_squares(two_sq))
            }
            None => Certificate::NotEmitted(NOT_EMITTED.into()),
        };
        return Ok(Identification {
            algebra: Some(CanonicalAlgebra::Sl2Sl2),
            case: "ii",
            certificate,
        });
    }
    if z(a2) && z(a4) {
        let (algebra, case, certificate) = identify_real(a1, a3);
        return Ok(Identification {
            algebra: Some(algebra),
            case,
            certificate,
        });
    }
    if z(a1) && z(a3) {
        let (algebra, case, certificate) = identify_real(a2, a4);
        let case = match case {
            "iii-a" => "iv-a",
            "iii-b" => "iv-b",
            "iii-c" => "iv-c",
            _ => "iv-d",
        };
        return Ok(Identification {
            algebra: Some(algebra),
            case,
            certificate: swap_certificate(certificate),
        });
    }
    // one parameter zero forces a second one by a1 a4 = a2 a3
    Err(Error::InternalConsistency(format!("unreachable parameter pattern {params}")))
}

/// Runs the certificate of `identify_group` through `frame_change_verify`.
pub fn verify_identification(params: &FamilyParams, id: &Identification) -> Result<bool> {
    let (Some(algebra), Some(fc)) = (id.algebra, id.certificate.frame_change()) else {
        return Ok(false);
    };
    let inst = build(params.clone())?;
    frame_change_verify(&inst.coframe, fc, algebra)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: [i64; 4]) -> FamilyParams {
        FamilyParams::from_ints(a[0], a[1], a[2], a[3]).unwrap()
    }

    #[test]
    fn constraint_enforced() {
        assert!(matches!(
            FamilyParams::from_ints(1, 0, 0, 1),
            Err(Error::IntegrabilityConstraint { .. })
        ));
    }

    #[test]
    fn structure_equations_for_first_parameter() {
        let inst = build(p([1, 0, 0, 0])).unwrap();
        assert_eq!(inst.alpha, rat(-4, 1));
        assert_eq!(inst.coframe.d_of(4), &z1().scale(&rat(-2, 1)));
        assert_eq!(inst.coframe.d_of(0), &a2_wedge(2).sub(&ee(3, 5).scale(&rat(2, 1))));
        let inst = build(p([0, 0, 1, 0])).unwrap();
        assert_eq!(inst.coframe.d_of(4), &z1().scale(&rat(2, 1)));
        assert_eq!(inst.alpha, rat(2, 1));
    }

    #[test]
    fn replay_passes_on_pure_types() {
        for a in [[1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 0]] {
            let r = verify_family(&build(p(a)).unwrap()).unwrap();
            assert!(r.all_passed());
        }
    }

    #[test]
    fn closed_form_gamma_matches_formula() {
        let params = p([1, 2, 3, 6]);
        let g = closed_form_gamma(&params);
        let [a1, a2, a3, a4] = params.values();
        let two = rat(2, 1);
        assert_eq!(g.slot(XI), z1().scale(&(a1 + &two * a3)).add(&z2().scale(&(a2 + &two * a4))));
        assert_eq!(g.slot(0), ee(3, 5).scale(&(a1 - a3)).add(&ee(4, 5).scale(&(a2 - a4))));
    }

    #[test]
    fn certificates_verify() {
        for (a, tag) in [
            ([3, 4, 0, 0], "su2+su2"),
            ([0, 0, 3, 4], "sl2+sl2"),
            ([1, 0, 1, 0], "abelian6"),
            ([-1, 0, 2, 0], "heis5+R"),
            ([1, 0, 0, 0], "su2+su2"),
            ([2, 0, 1, 0], "su2+su2"),
            ([1, 0, 3, 0], "sl2+sl2"),
            ([0, 1, 0, 1], "abelian6"),
            ([0, -1, 0, 2], "heis5+R"),
            ([0, 2, 0, 1], "su2+su2"),
        ] {
            let params = p(a);
            let id = identify_group(&params).unwrap();
            assert_eq!(id.algebra.unwrap().tag(), tag, "{a:?}");
            assert!(verify_identification(&params, &id).unwrap(), "{a:?}");
        }
    }

    #[test]
    fn irrational_radical_is_not_emitted() {
        let id = identify_group(&p([1, 1, 0, 0])).unwrap();
        assert_eq!(id.certificate, Certificate::NotEmitted(NOT_EMITTED.into()));
        assert!(matches!(identify_group(&p([0, 0, 0, 0])), Err(Error::Degenerate(_))));
        assert_eq!(identify_group(&p([1, 2, 3, 6])).unwrap().label(), "unclassified-here");
    }
}
