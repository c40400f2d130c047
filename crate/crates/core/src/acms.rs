//! The almost contact metric structure in the adapted frame.
//!
//! `Φ = e12 + e34`, `η = e5`, `ξ = E5` and `φE1 = -E2, φE2 = E1, φE3 = -E4,
//! φE4 = E3, φξ = 0`, so that `Φ(X, Y) = g(X, φY)`.
//!
//! First-order tensors (∇Φ, ∇φ, ∇ξ, N, dΦ, dη, δ) are computed from a
//! [`PointwiseFrame`], usually by two or three independent formulas that are
//! required to agree. [`Geometry`] ties a coframe and its connection forms
//! together and evaluates those tensors with auxiliary symbols eliminated by
//! linearity.

use crate::error::{Error, Result};
use crate::exterior::{ext_d, hodge, metric_monomials, sort_sign, Coframe, Form, DIM, METRIC_MASK};
use crate::frames::{koszul_connection, verify_first_structure, ConnectionForms, PointwiseFrame};
use crate::linalg::{Matrix, Projector};
use crate::scalar::{rat, Field, Rational, Scalar};

/// Frame index of the Reeb vector field `ξ`.
pub const XI: usize = 4;

pub type Vector<S> = [S; DIM];

pub fn unit<S: Scalar>(i: usize) -> Vector<S> {
    std::array::from_fn(|k| if k == i { S::one() } else { S::zero() })
}

/// Constant data of the adapted frame.
#[derive(Debug, Clone, Copy, Default)]
pub struct AdaptedStructure;

impl AdaptedStructure {
    pub fn fundamental_form<S: Scalar>() -> Form<S> {
        Form::product(&[0, 1], S::one()).add(&Form::product(&[2, 3], S::one()))
    }

    pub fn eta<S: Scalar>() -> Form<S> {
        Form::generator(XI)
    }

    pub fn phi<S: Scalar>(v: &Vector<S>) -> Vector<S> {
        [v[1].clone(), v[0].neg(), v[3].clone(), v[2].neg(), S::zero()]
    }

    /// `P[c][a]` is the `E_c` component of `φ(E_a)`.
    pub fn phi_matrix<S: Field>() -> Matrix<S> {
        Matrix::from_fn(DIM, DIM, |c, a| Self::phi(&unit::<S>(a))[c].clone())
    }

    /// `Φ(E_a, E_b)`.
    pub fn phi_entry<S: Scalar>(a: usize, b: usize) -> S {
        match (a, b) {
            (0, 1) | (2, 3) => S::one(),
            (1, 0) | (3, 2) => S::one().neg(),
            _ => S::zero(),
        }
    }
}

fn phi_col<S: Scalar>(a: usize) -> Vector<S> {
    AdaptedStructure::phi(&unit(a))
}

/// Trilinear tensor on the frame, antisymmetric in its last two slots.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3<S = Rational> {
    v: Vec<S>,
}

const fn idx(x: usize, a: usize, b: usize) -> usize {
    x * DIM * DIM + a * DIM + b
}

impl<S: Scalar> Tensor3<S> {
    pub fn zero() -> Self {
        Tensor3 {
            v: vec![S::zero(); DIM * DIM * DIM],
        }
    }

    /// Evaluates `f` for `a < b` and fills the rest by antisymmetry.
    pub fn from_fn(mut f: impl FnMut(usize, usize, usize) -> S) -> Self {
        let mut t = Self::zero();
        for x in 0..DIM {
            for a in 0..DIM {
                for b in a + 1..DIM {
                    let val = f(x, a, b);
                    t.v[idx(x, b, a)] = val.neg();
                    t.v[idx(x, a, b)] = val;
                }
            }
        }
        t
    }

    /// Evaluates `f` on every index triple; `None` unless the result is
    /// antisymmetric in the last two slots.
    pub fn try_from_full(mut f: impl FnMut(usize, usize, usize) -> S) -> Option<Self> {
        let mut t = Self::zero();
        for x in 0..DIM {
            for a in 0..DIM {
                for b in 0..DIM {
                    t.v[idx(x, a, b)] = f(x, a, b);
                }
            }
        }
        t.is_antisymmetric().then_some(t)
    }

    fn is_antisymmetric(&self) -> bool {
        (0..DIM).all(|x| {
            (0..DIM).all(|a| (0..DIM).all(|b| self.get(x, a, b).add(self.get(x, b, a)).is_zero()))
        })
    }

    pub fn get(&self, x: usize, a: usize, b: usize) -> &S {
        &self.v[idx(x, a, b)]
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Tensor3 {
            v: self.v.iter().zip(&rhs.v).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        Tensor3 {
            v: self.v.iter().map(S::neg).collect(),
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Tensor3 {
            v: self.v.iter().map(|a| a.scale(q)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.v.iter().all(S::is_zero)
    }

    /// Nonzero components with `a < b`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, usize, &S)> + '_ {
        (0..DIM).flat_map(move |x| {
            (0..DIM).flat_map(move |a| {
                (a + 1..DIM).filter_map(move |b| {
                    let s = self.get(x, a, b);
                    (!s.is_zero()).then_some((x, a, b, s))
                })
            })
        })
    }

    /// The 2-form `A(E_x, ·, ·)`.
    pub fn slot(&self, x: usize) -> Form<S> {
        Form::from_terms(
            2,
            metric_monomials(2).into_iter().map(|m| {
                let a = m.trailing_zeros() as usize;
                let b = (m & (m - 1)).trailing_zeros() as usize;
                (m, self.get(x, a, b).clone())
            }),
        )
    }

    pub fn from_slots(slots: &[Form<S>]) -> Self {
        assert_eq!(slots.len(), DIM);
        Self::from_fn(|x, a, b| slots[x].eval(&[a, b]))
    }

    pub fn from_three_form(f: &Form<S>) -> Self {
        assert_eq!(f.degree(), 3);
        Self::from_fn(|x, a, b| f.eval(&[x, a, b]))
    }

    /// `A(X, Y, Z) + A(Y, X, Z) = 0`.
    pub fn is_totally_skew(&self) -> bool {
        (0..DIM).all(|x| {
            (0..DIM).all(|a| (0..DIM).all(|b| self.get(x, a, b).add(self.get(a, x, b)).is_zero()))
        })
    }

    pub fn to_three_form(&self) -> Option<Form<S>> {
        self.is_totally_skew().then(|| {
            Form::from_terms(
                3,
                metric_monomials(3).into_iter().map(|m| {
                    let p: Vec<usize> = crate::exterior::positions_of(m);
                    (m, self.get(p[0], p[1], p[2]).clone())
                }),
            )
        })
    }

    /// All 125 components, `x`-major.
    pub fn components(&self) -> &[S] {
        &self.v
    }

    pub fn from_components(v: Vec<S>) -> Option<Self> {
        (v.len() == DIM * DIM * DIM)
            .then_some(Tensor3 { v })
            .filter(Self::is_antisymmetric)
    }

    pub fn render(&self, label: &str) -> Vec<String> {
        self.entries()
            .map(|(x, a, b, s)| format!("{label}(E{},E{},E{}) = {}", x + 1, a + 1, b + 1, s.render()))
            .collect()
    }
}

impl<S: Field> Tensor3<S> {
    pub fn mul(&self, s: &S) -> Self {
        Tensor3 {
            v: self.v.iter().map(|a| a.mul(s)).collect(),
        }
    }

    /// Componentwise inner product over all index triples.
    pub fn inner(&self, rhs: &Self) -> S {
        crate::linalg::dot(&self.v, &rhs.v)
    }

    pub fn norm2(&self) -> S {
        self.inner(self)
    }

    pub fn apply(&self, x: &Vector<S>, y: &Vector<S>, z: &Vector<S>) -> S {
        let mut acc = S::zero();
        for i in 0..DIM {
            if x[i].is_zero() {
                continue;
            }
            for a in 0..DIM {
                if y[a].is_zero() {
                    continue;
                }
                for b in 0..DIM {
                    if !z[b].is_zero() {
                        acc = acc.add(&x[i].mul(&y[a]).mul(&z[b]).mul(self.get(i, a, b)));
                    }
                }
            }
        }
        acc
    }
}

/// Values whose vanishing can be tested; used to detect auxiliary residue.
pub trait Vanish {
    fn vanishes(&self) -> bool;
}

impl Vanish for Rational {
    fn vanishes(&self) -> bool {
        Scalar::is_zero(self)
    }
}

impl Vanish for f64 {
    fn vanishes(&self) -> bool {
        Scalar::is_zero(self)
    }
}

impl Vanish for bool {
    fn vanishes(&self) -> bool {
        !*self
    }
}

impl<S: Scalar> Vanish for Tensor3<S> {
    fn vanishes(&self) -> bool {
        self.is_zero()
    }
}

impl<S: Scalar> Vanish for Form<S> {
    fn vanishes(&self) -> bool {
        self.is_zero()
    }
}

impl<S: Field> Vanish for Matrix<S> {
    fn vanishes(&self) -> bool {
        self.is_zero()
    }
}

impl<T: Vanish> Vanish for Vec<T> {
    fn vanishes(&self) -> bool {
        self.iter().all(Vanish::vanishes)
    }
}

impl<A: Vanish, B: Vanish> Vanish for (A, B) {
    fn vanishes(&self) -> bool {
        self.0.vanishes() && self.1.vanishes()
    }
}

impl<A: Vanish, B: Vanish, C: Vanish> Vanish for (A, B, C) {
    fn vanishes(&self) -> bool {
        self.0.vanishes() && self.1.vanishes() && self.2.vanishes()
    }
}

fn flat<S: Scalar>() -> Coframe<S> {
    Coframe::standard(&[], vec![Form::zero(2); DIM]).expect("flat coframe")
}

fn metric_hodge<S: Scalar>(beta: &Form<S>) -> Form<S> {
    hodge(beta, &flat()).expect("metric form")
}

fn unsupported(beta_support: u32, operation: &'static str) -> Error {
    let p = (beta_support & !METRIC_MASK).trailing_zeros();
    Error::UnsupportedSymbol {
        symbol: format!("symbol #{}", p + 1),
        operation,
    }
}

/// The U(2)-decomposition `Λ² = Λ²₁ ⊕ Λ²₂ ⊕ Λ²₃ ⊕ Λ²₄`, each part obtained as
/// the solution space of its defining equations.
#[derive(Debug, Clone)]
pub struct Lambda2<S> {
    parts: Vec<Projector<S>>,
    u2: Projector<S>,
    u2_perp: Projector<S>,
}

impl<S: Field> Default for Lambda2<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Field> Lambda2<S> {
    pub fn new() -> Self {
        let basis = metric_monomials(2);
        let unit2 = |m| Form::<S>::monomial(m, S::one());
        let phi = AdaptedStructure::fundamental_form::<S>();
        let eta = AdaptedStructure::eta::<S>();
        // columns of a linear map on 2-forms, stacked as rows of coordinates
        let kernel = |maps: &[&dyn Fn(&Form<S>) -> Form<S>]| -> Vec<Vec<S>> {
            let mut rows: Vec<Vec<S>> = Vec::new();
            for map in maps {
                let images: Vec<Vec<S>> = basis.iter().map(|&m| map(&unit2(m)).metric_coordinates()).collect();
                for r in 0..images[0].len() {
                    rows.push(images.iter().map(|col| col[r].clone()).collect());
                }
            }
            Matrix::from_rows(&rows).nullspace()
        };
        let wedge_phi = |b: &Form<S>| phi.wedge(b);
        let self_dual = |b: &Form<S>| metric_hodge(b).sub(&eta.wedge(b));
        let anti_self_dual = |b: &Form<S>| metric_hodge(b).add(&eta.wedge(b));
        let wedge_eta = |b: &Form<S>| eta.wedge(b);
        let spans = [
            vec![phi.metric_coordinates()],
            kernel(&[&wedge_phi, &self_dual]),
            kernel(&[&anti_self_dual]),
            kernel(&[&wedge_eta]),
        ];
        let parts: Vec<Projector<S>> = spans.iter().map(|s| Projector::new(s)).collect();
        let u2 = Projector::new(&[spans[0].clone(), spans[2].clone()].concat());
        let u2_perp = Projector::new(&[spans[1].clone(), spans[3].clone()].concat());
        Lambda2 { parts, u2, u2_perp }
    }

    fn projector(&self, part: usize) -> &Projector<S> {
        assert!((1..=4).contains(&part), "Λ² parts are numbered 1..4");
        &self.parts[part - 1]
    }

    pub fn dim(&self, part: usize) -> usize {
        self.projector(part).dim()
    }

    /// Mutually orthogonal basis of the part.
    pub fn basis(&self, part: usize) -> Vec<Form<S>> {
        self.projector(part)
            .basis()
            .iter()
            .map(|c| Form::from_metric_coordinates(2, c))
            .collect()
    }

    fn apply(&self, p: &Projector<S>, beta: &Form<S>, op: &'static str) -> Result<Form<S>> {
        assert_eq!(beta.degree(), 2, "Λ² projections act on 2-forms");
        if !beta.is_metric() {
            return Err(unsupported(beta.support(), op));
        }
        Ok(Form::from_metric_coordinates(2, &p.project(&beta.metric_coordinates())))
    }

    pub fn project(&self, beta: &Form<S>, part: usize) -> Result<Form<S>> {
        self.apply(self.projector(part), beta, "lambda2_project")
    }

    pub fn project_u2(&self, beta: &Form<S>) -> Result<Form<S>> {
        self.apply(&self.u2, beta, "u(2) projection")
    }

    pub fn project_u2_perp(&self, beta: &Form<S>) -> Result<Form<S>> {
        self.apply(&self.u2_perp, beta, "u(2)-perp projection")
    }

    /// `pr_W`: projects every first-slot 2-form onto `Λ²₂ ⊕ Λ²₄`.
    pub fn pr_w(&self, a: &Tensor3<S>) -> Tensor3<S> {
        let slots: Vec<Form<S>> = (0..DIM)
            .map(|x| self.project_u2_perp(&a.slot(x)).expect("metric slot"))
            .collect();
        Tensor3::from_slots(&slots)
    }
}

pub fn lambda2_project<S: Field>(beta: &Form<S>, part: usize) -> Result<Form<S>> {
    Lambda2::new().project(beta, part)
}

/// `+1`, `-1` or `0` according to `β(φX, φY) = ±β(X, Y)` or `= 0`, found by
/// evaluating on all basis pairs.
pub fn phi_invariance_type<S: Field>(beta: &Form<S>) -> Result<i32> {
    if !beta.is_metric() {
        return Err(unsupported(beta.support(), "phi_invariance_type"));
    }
    if beta.is_zero() {
        return Err(Error::AmbiguousType);
    }
    let mut fits = [true, true, true];
    for a in 0..DIM {
        for b in 0..DIM {
            let rotated = eval2(beta, &phi_col(a), &phi_col(b));
            let plain = beta.eval(&[a, b]);
            fits[0] &= rotated == plain;
            fits[1] &= rotated == plain.neg();
            fits[2] &= rotated.is_zero();
        }
    }
    match fits {
        [true, false, false] => Ok(1),
        [false, true, false] => Ok(-1),
        [false, false, true] => Ok(0),
        _ => Err(Error::AmbiguousType),
    }
}

fn eval2<S: Field>(beta: &Form<S>, x: &Vector<S>, y: &Vector<S>) -> S {
    let mut acc = S::zero();
    for a in 0..DIM {
        for b in 0..DIM {
            if !x[a].is_zero() && !y[b].is_zero() {
                acc = acc.add(&x[a].mul(&y[b]).mul(&beta.eval(&[a, b])));
            }
        }
    }
    acc
}

/// `θ(β)(X, Y, Z) = *β(X, Y, Z)`.
pub fn theta<S: Field>(beta: &Form<S>) -> Result<Tensor3<S>> {
    if !beta.is_metric() {
        return Err(unsupported(beta.support(), "theta"));
    }
    Ok(Tensor3::from_three_form(&metric_hodge(beta)))
}

/// `ϑ(β)(X, Y, Z) = 3 η(X) β(Y, Z) - *β(X, Y, Z)`.
pub fn vartheta<S: Field>(beta: &Form<S>) -> Result<Tensor3<S>> {
    let star = theta(beta)?;
    let three = S::from_int(3);
    Ok(Tensor3::from_fn(|x, a, b| {
        let first = if x == XI { three.mul(&beta.eval(&[a, b])) } else { S::zero() };
        first.sub(star.get(x, a, b))
    }))
}

pub fn pr_w<S: Field>(a: &Tensor3<S>) -> Tensor3<S> {
    Lambda2::new().pr_w(a)
}

// ---------------------------------------------------------------------------
// pointwise formulas

/// The connection as a tensor: `Ω(E_x)(E_i, E_j) = ω_ij(E_x)`.
pub fn connection_tensor<S: Field>(pf: &PointwiseFrame<S>) -> Tensor3<S> {
    Tensor3::from_fn(|x, i, j| pf.value(i, j, x).clone())
}

/// `(∇_{E_x} Φ)(E_a, E_b)` straight from the connection values.
pub fn nabla_phi<S: Field>(pf: &PointwiseFrame<S>) -> Tensor3<S> {
    Tensor3::from_fn(|x, a, b| {
        let mut acc = S::zero();
        for j in 0..DIM {
            acc = acc.sub(&pf.value(a, j, x).mul(&AdaptedStructure::phi_entry(j, b)));
            acc = acc.sub(&pf.value(b, j, x).mul(&AdaptedStructure::phi_entry(a, j)));
        }
        acc
    })
}

/// `(∇_X Φ)(Y, Z) = Σ_i Γ(X)(e_i, Y) Φ(e_i, Z) - Γ(X)(e_i, Z) Φ(e_i, Y)`.
pub fn nabla_phi_via_gamma<S: Field>(gamma: &Tensor3<S>) -> Tensor3<S> {
    Tensor3::from_fn(|x, a, b| {
        let mut acc = S::zero();
        for i in 0..DIM {
            acc = acc.add(&gamma.get(x, i, a).mul(&AdaptedStructure::phi_entry(i, b)));
            acc = acc.sub(&gamma.get(x, i, b).mul(&AdaptedStructure::phi_entry(i, a)));
        }
        acc
    })
}

/// `g((∇_{E_x} φ) E_a, E_b)` from `(∇_X φ)Y = ∇_X(φY) - φ(∇_X Y)`.
pub fn nabla_phi_endomorphism<S: Field>(pf: &PointwiseFrame<S>) -> Tensor3<S> {
    let g = |x: usize, a: usize, b: usize| {
        let ex = unit::<S>(x);
        let lhs = pf.nabla(&ex, &phi_col(a));
        let rhs = AdaptedStructure::phi(&pf.nabla(&ex, &unit(a)));
        lhs[b].sub(&rhs[b])
    };
    Tensor3::try_from_full(g).expect("∇φ is skew for a metric connection")
}

/// The vector `(∇_X φ) Y` for constant-coefficient `X`, `Y`.
fn nabla_phi_vec<S: Field>(pf: &PointwiseFrame<S>, x: &Vector<S>, y: &Vector<S>) -> Vector<S> {
    let lhs = pf.nabla(x, &AdaptedStructure::phi(y));
    let rhs = AdaptedStructure::phi(&pf.nabla(x, y));
    std::array::from_fn(|j| lhs[j].sub(&rhs[j]))
}

/// `g(∇_{E_x} ξ, E_b)` as a matrix `(x, b)`.
pub fn nabla_xi<S: Field>(pf: &PointwiseFrame<S>) -> Matrix<S> {
    Matrix::from_fn(DIM, DIM, |x, b| pf.value(XI, b, x).clone())
}

/// `(∇_X Φ)(ξ, φY)` as a matrix `(x, y)`.
pub fn nabla_xi_via_phi<S: Field>(h: &Tensor3<S>) -> Matrix<S> {
    Matrix::from_fn(DIM, DIM, |x, y| h.apply(&unit(x), &unit(XI), &phi_col(y)))
}

fn vsub<S: Field>(a: &Vector<S>, b: &Vector<S>) -> Vector<S> {
    std::array::from_fn(|j| a[j].sub(&b[j]))
}

fn vadd<S: Field>(a: &Vector<S>, b: &Vector<S>) -> Vector<S> {
    std::array::from_fn(|j| a[j].add(&b[j]))
}

/// `N(X, Y, Z) = g(X, [φ, φ](Y, Z)) + η(X) dη(Y, Z)` with the Nijenhuis
/// torsion built from Lie brackets.
pub fn nijenhuis_bracket<S: Field>(pf: &PointwiseFrame<S>) -> Tensor3<S> {
    let phi = AdaptedStructure::phi::<S>;
    let n = |x: usize, a: usize, b: usize| {
        let (ea, eb) = (unit::<S>(a), unit::<S>(b));
        let mut t = pf.bracket_vec(&phi(&ea), &phi(&eb));
        t = vadd(&t, &phi(&phi(&pf.bracket_vec(&ea, &eb))));
        t = vsub(&t, &phi(&pf.bracket_vec(&phi(&ea), &eb)));
        t = vsub(&t, &phi(&pf.bracket_vec(&ea, &phi(&eb))));
        let eta_term = if x == XI { pf.induced_d(XI, a, b) } else { S::zero() };
        t[x].add(&eta_term)
    };
    Tensor3::try_from_full(n).expect("Nijenhuis tensor is skew in its last slots")
}

/// Same tensor with `[φ, φ](Y, Z) = (∇_{φY} φ)Z - (∇_{φZ} φ)Y
/// + φ((∇_Z φ)Y - (∇_Y φ)Z)`.
pub fn nijenhuis_covariant<S: Field>(pf: &PointwiseFrame<S>) -> Tensor3<S> {
    let phi = AdaptedStructure::phi::<S>;
    let n = |x: usize, a: usize, b: usize| {
        let (ea, eb) = (unit::<S>(a), unit::<S>(b));
        let mut t = nabla_phi_vec(pf, &phi(&ea), &eb);
        t = vsub(&t, &nabla_phi_vec(pf, &phi(&eb), &ea));
        t = vadd(&t, &phi(&vsub(&nabla_phi_vec(pf, &eb, &ea), &nabla_phi_vec(pf, &ea, &eb))));
        let eta_term = if x == XI { pf.induced_d(XI, a, b) } else { S::zero() };
        t[x].add(&eta_term)
    };
    Tensor3::try_from_full(n).expect("Nijenhuis tensor is skew in its last slots")
}

/// The Nijenhuis tensor expressed through `H = ∇Φ` alone.
pub fn nijenhuis_from_nabla_phi<S: Field>(h: &Tensor3<S>) -> Tensor3<S> {
    let n = |x: usize, a: usize, b: usize| {
        let (ex, ea, eb, xi) = (unit::<S>(x), unit::<S>(a), unit::<S>(b), unit::<S>(XI));
        let (px, pa, pb) = (phi_col::<S>(x), phi_col::<S>(a), phi_col::<S>(b));
        let mut acc = h.apply(&pa, &ex, &eb);
        acc = acc.sub(&h.apply(&pb, &ex, &ea));
        acc = acc.add(&h.apply(&ea, &px, &eb));
        acc = acc.sub(&h.apply(&eb, &px, &ea));
        if x == XI {
            acc = acc.add(&h.apply(&ea, &xi, &pb));
            acc = acc.sub(&h.apply(&eb, &xi, &pa));
        }
        acc
    };
    Tensor3::try_from_full(n).expect("Nijenhuis tensor is skew in its last slots")
}

/// `∇_{E_x} α` for a metric form.
pub fn covariant_derivative<S: Field>(pf: &PointwiseFrame<S>, x: usize, alpha: &Form<S>) -> Form<S> {
    let k = alpha.degree();
    let terms = metric_monomials(k).into_iter().map(|m| {
        let slots = crate::exterior::positions_of(m);
        let mut acc = S::zero();
        for l in 0..k {
            for j in 0..DIM {
                let w = pf.value(slots[l], j, x);
                if w.is_zero() {
                    continue;
                }
                let mut moved = slots.clone();
                moved[l] = j;
                acc = acc.sub(&w.mul(&alpha.eval(&moved)));
            }
        }
        (m, acc)
    });
    Form::from_terms(k, terms)
}

/// `dα = Σ_i e_i ∧ ∇_{e_i} α`.
pub fn d_via_connection<S: Field>(pf: &PointwiseFrame<S>, alpha: &Form<S>) -> Form<S> {
    (0..DIM).fold(Form::zero(alpha.degree() + 1), |acc, i| {
        acc.add(&Form::generator(i).wedge(&covariant_derivative(pf, i, alpha)))
    })
}

/// `dα` by the Leibniz rule from the structure equations the frame induces.
pub fn d_via_structure<S: Field>(pf: &PointwiseFrame<S>, alpha: &Form<S>) -> Form<S> {
    let c = Coframe::standard(&[], (0..DIM).map(|i| pf.induced_d_form(i)).collect()).expect("metric coframe");
    ext_d(alpha, &c).expect("constant metric coefficients")
}

/// `δα = -Σ_i e_i ⌟ ∇_{e_i} α`.
pub fn codifferential_pointwise<S: Field>(pf: &PointwiseFrame<S>, alpha: &Form<S>) -> Form<S> {
    (0..DIM).fold(Form::zero(alpha.degree().saturating_sub(1)), |acc, i| {
        acc.sub(&covariant_derivative(pf, i, alpha).interior(i))
    })
}

/// `dΦ(X, Y, Z) = (∇_X Φ)(Y, Z) - (∇_Y Φ)(X, Z) + (∇_Z Φ)(X, Y)`.
pub fn d_phi_from_nabla_phi<S: Field>(h: &Tensor3<S>) -> Form<S> {
    Form::from_terms(
        3,
        metric_monomials(3).into_iter().map(|m| {
            let p = crate::exterior::positions_of(m);
            let (x, y, z) = (p[0], p[1], p[2]);
            (m, h.get(x, y, z).sub(h.get(y, x, z)).add(h.get(z, x, y)))
        }),
    )
}

fn eval3<S: Field>(f: &Form<S>, x: &Vector<S>, y: &Vector<S>, z: &Vector<S>) -> S {
    Tensor3::from_three_form(f).apply(x, y, z)
}

/// Named structure types, each decided from its defining tensor equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Predicates {
    pub normal: bool,
    pub semi_cosymplectic: bool,
    pub almost_cosymplectic: bool,
    pub cosymplectic: bool,
    pub quasi_sasaki: bool,
    pub nearly_cosymplectic: bool,
    pub quasi_cosymplectic: bool,
    pub generalized_quasi_sasaki: bool,
    pub xi_killing: bool,
}

impl Predicates {
    pub fn named(&self) -> Vec<(&'static str, bool)> {
        vec![
            ("normal", self.normal),
            ("semi_cosymplectic", self.semi_cosymplectic),
            ("almost_cosymplectic", self.almost_cosymplectic),
            ("cosymplectic", self.cosymplectic),
            ("quasi_sasaki", self.quasi_sasaki),
            ("nearly_cosymplectic", self.nearly_cosymplectic),
            ("quasi_cosymplectic", self.quasi_cosymplectic),
            ("generalized_quasi_sasaki", self.generalized_quasi_sasaki),
            ("xi_killing", self.xi_killing),
        ]
    }
}

/// A coframe with its Levi-Civita connection forms.
///
/// Connection forms may involve auxiliary symbols. Each auxiliary symbol `a`
/// contributes `y_ij a` to `ω_ij`; its values on the frame are unknown, so
/// every tensor is evaluated on the metric part and, separately, on each
/// "unit" auxiliary frame `ω_ij(E_k) = y_ij δ_km`. A tensor is well defined
/// exactly when all auxiliary evaluations vanish.
#[derive(Debug, Clone)]
pub struct Geometry<S = Rational> {
    coframe: Coframe<S>,
    omega: ConnectionForms<S>,
    base: PointwiseFrame<S>,
    aux: Vec<(String, PointwiseFrame<S>)>,
    lambda2: Lambda2<S>,
}

impl<S: Field> Geometry<S> {
    /// Checks the connection forms against the structure equations.
    pub fn new(coframe: Coframe<S>, omega: ConnectionForms<S>) -> Result<Self> {
        if coframe.orientation_sign() != 1 {
            return Err(Error::InvalidCoframe(
                "the adapted frame needs the orientation e1^e2^e3^e4^e5".into(),
            ));
        }
        if !omega.is_antisymmetric() {
            return Err(Error::InvalidCoframe("connection forms are not antisymmetric".into()));
        }
        if omega.support() & !((1u32 << coframe.len()) - 1) != 0 {
            return Err(Error::InvalidCoframe("connection forms use undeclared symbols".into()));
        }
        let report = verify_first_structure(&coframe, &omega)?;
        if let Some((name, r)) = report.residuals.iter().find(|(_, r)| !r.is_zero()) {
            return Err(Error::Verification(format!(
                "connection forms violate the structure equation of {name}: residual {}",
                coframe.render(r)
            )));
        }
        let base = PointwiseFrame::from_upper(|i, j, k| omega.get(i, j).coefficient(1 << k));
        let mut aux = Vec::new();
        for p in coframe.aux_positions() {
            for m in 0..DIM {
                let frame = PointwiseFrame::from_upper(|i, j, k| {
                    if k == m {
                        omega.get(i, j).coefficient(1 << p)
                    } else {
                        S::zero()
                    }
                });
                if !frame.is_zero() {
                    aux.push((coframe.symbol(p).name.clone(), frame));
                }
            }
        }
        Ok(Geometry {
            coframe,
            omega,
            base,
            aux,
            lambda2: Lambda2::new(),
        })
    }

    /// Levi-Civita connection by the Koszul solve.
    pub fn from_coframe(coframe: Coframe<S>) -> Result<Self> {
        let omega = koszul_connection(&coframe)?;
        Self::new(coframe, omega)
    }

    /// Geometry of bare pointwise data; the structure equations are the
    /// induced ones.
    pub fn from_pointwise(pf: PointwiseFrame<S>) -> Self {
        let d = (0..DIM).map(|i| pf.induced_d_form(i)).collect();
        let coframe = Coframe::standard(&[], d).expect("metric coframe");
        let mut omega = ConnectionForms::zero();
        for i in 0..DIM {
            for j in i + 1..DIM {
                omega.set(i, j, Form::from_terms(1, (0..DIM).map(|k| (1 << k, pf.value(i, j, k).clone()))));
            }
        }
        Geometry {
            coframe,
            omega,
            base: pf,
            aux: Vec::new(),
            lambda2: Lambda2::new(),
        }
    }

    pub fn coframe(&self) -> &Coframe<S> {
        &self.coframe
    }

    pub fn omega(&self) -> &ConnectionForms<S> {
        &self.omega
    }

    pub fn base(&self) -> &PointwiseFrame<S> {
        &self.base
    }

    pub fn lambda2(&self) -> &Lambda2<S> {
        &self.lambda2
    }

    /// Evaluates a linear pointwise quantity, rejecting auxiliary residue.
    pub fn eval<T: Vanish>(&self, tensor: &'static str, f: impl Fn(&PointwiseFrame<S>) -> T) -> Result<T> {
        for (symbol, frame) in &self.aux {
            if !f(frame).vanishes() {
                return Err(Error::SymbolicResidue {
                    symbol: symbol.clone(),
                    tensor,
                });
            }
        }
        Ok(f(&self.base))
    }

    fn agree<T: PartialEq>(what: &str, a: T, b: T) -> Result<T> {
        if a == b {
            Ok(a)
        } else {
            Err(Error::InternalConsistency(format!("{what}: independent formulas disagree")))
        }
    }

    /// `(∇_X Φ)(Y, Z)`; the direct formula and the one through the
    /// intrinsic torsion must agree.
    pub fn nabla_phi(&self) -> Result<Tensor3<S>> {
        let (h, via) = self.eval("nabla Phi", |pf| {
            let h = nabla_phi(pf);
            let via = nabla_phi_via_gamma(&self.lambda2.pr_w(&connection_tensor(pf)));
            (h, via)
        })?;
        Self::agree("nabla Phi", h, via)
    }

    /// `g((∇_X φ)Y, Z)`, cross-checked against `(∇_X Φ)(Z, Y)`.
    pub fn nabla_phi_endomorphism(&self) -> Result<Tensor3<S>> {
        let g = self.eval("nabla phi", nabla_phi_endomorphism)?;
        let h = self.nabla_phi()?;
        let swapped = Tensor3::from_fn(|x, a, b| h.get(x, b, a).clone());
        Self::agree("nabla phi", g, swapped)
    }

    /// `g(∇_X ξ, Y)`, cross-checked against `(∇_X Φ)(ξ, φY)`.
    pub fn nabla_xi(&self) -> Result<Matrix<S>> {
        let m = self.eval("nabla xi", nabla_xi)?;
        let via = nabla_xi_via_phi(&self.nabla_phi()?);
        Self::agree("nabla xi", m, via)
    }

    /// The Nijenhuis tensor by brackets, by `∇φ` and by `∇Φ`.
    pub fn nijenhuis(&self) -> Result<Tensor3<S>> {
        let (a, b) = self.eval("N", |pf| (nijenhuis_bracket(pf), nijenhuis_covariant(pf)))?;
        let a = Self::agree("N (brackets vs covariant)", a, b)?;
        let c = nijenhuis_from_nabla_phi(&self.nabla_phi()?);
        Self::agree("N (brackets vs nabla Phi)", a, c)
    }

    fn d_of(&self, alpha: &Form<S>, tensor: &'static str) -> Result<Form<S>> {
        let (a, b) = self.eval(tensor, |pf| (d_via_connection(pf, alpha), d_via_structure(pf, alpha)))?;
        let a = Self::agree(tensor, a, b)?;
        let symbolic = ext_d(alpha, &self.coframe)?;
        symbolic.ensure_metric(&self.coframe, tensor)?;
        Self::agree(tensor, a, symbolic)
    }

    pub fn d_eta(&self) -> Result<Form<S>> {
        self.d_of(&AdaptedStructure::eta(), "d eta")
    }

    /// `dΦ` from the structure equations, from `Σ e_i ∧ ∇_{e_i}Φ`, and as the
    /// alternation of `∇Φ`.
    pub fn d_phi(&self) -> Result<Form<S>> {
        let d = self.d_of(&AdaptedStructure::fundamental_form(), "d Phi")?;
        Self::agree("d Phi", d, d_phi_from_nabla_phi(&self.nabla_phi()?))
    }

    pub fn codifferential(&self, alpha: &Form<S>) -> Result<Form<S>> {
        if !alpha.is_metric() {
            return Err(unsupported(alpha.support(), "codifferential"));
        }
        self.eval("codifferential", |pf| codifferential_pointwise(pf, alpha))
    }

    pub fn xi_killing(&self) -> Result<bool> {
        let m = self.nabla_xi()?;
        Ok((0..DIM).all(|x| (0..DIM).all(|y| m.get(x, y).add(m.get(y, x)).is_zero())))
    }

    pub fn predicates(&self) -> Result<Predicates> {
        let n = self.nijenhuis()?;
        let d_phi = self.d_phi()?;
        let d_eta = self.d_eta()?;
        let delta_phi = self.codifferential(&AdaptedStructure::fundamental_form())?;
        let delta_eta = self.codifferential(&AdaptedStructure::eta())?;
        let g = self.nabla_phi_endomorphism()?;
        let nxi = self.nabla_xi()?;
        let xi_killing = self.xi_killing()?;

        let normal = n.is_zero();
        let almost_cosymplectic = d_phi.is_zero() && d_eta.is_zero();
        let nearly = (0..DIM).all(|x| {
            (0..DIM).all(|a| (0..DIM).all(|b| g.get(x, a, b).add(g.get(a, x, b)).is_zero()))
        });
        // (∇_X φ)Y + (∇_{φX} φ)(φY) = η(Y) ∇_{φX} ξ
        let quasi = (0..DIM).all(|x| {
            (0..DIM).all(|a| {
                (0..DIM).all(|b| {
                    let px = phi_col::<S>(x);
                    let pa = phi_col::<S>(a);
                    let mut lhs = g.get(x, a, b).clone();
                    lhs = lhs.add(&g.apply(&px, &pa, &unit(b)));
                    if a == XI {
                        for c in 0..DIM {
                            lhs = lhs.sub(&px[c].mul(nxi.get(c, b)));
                        }
                    }
                    lhs.is_zero()
                })
            })
        });
        let horizontal = 0..XI;
        let n_h = horizontal.clone().all(|x| {
            horizontal
                .clone()
                .all(|a| horizontal.clone().all(|b| n.get(x, a, b).is_zero()))
        });
        let dphi_h = horizontal.clone().all(|x| {
            horizontal
                .clone()
                .all(|a| horizontal.clone().all(|b| d_phi.eval(&[x, a, b]).is_zero()))
        });
        Ok(Predicates {
            normal,
            semi_cosymplectic: delta_phi.is_zero() && delta_eta.is_zero(),
            almost_cosymplectic,
            cosymplectic: normal && almost_cosymplectic,
            quasi_sasaki: normal && d_phi.is_zero(),
            nearly_cosymplectic: nearly,
            quasi_cosymplectic: quasi,
            generalized_quasi_sasaki: n_h && dphi_h && xi_killing,
            xi_killing,
        })
    }

    /// `γ(X, Y) = dΦ(ξ, φX, Y) = N(φX, φY, ξ)`; both expressions must agree
    /// and be alternating, which holds exactly for generalized quasi-Sasaki
    /// structures.
    pub fn gamma(&self) -> Result<Form<S>> {
        if !self.predicates()?.generalized_quasi_sasaki {
            return Err(Error::NotGeneralizedQuasiSasaki(
                "N or dPhi does not vanish on the horizontal distribution, or xi is not Killing".into(),
            ));
        }
        let d_phi = self.d_phi()?;
        let n = self.nijenhuis()?;
        let xi = unit::<S>(XI);
        let first = Matrix::from_fn(DIM, DIM, |a, b| eval3(&d_phi, &xi, &phi_col(a), &unit(b)));
        let second = Matrix::from_fn(DIM, DIM, |a, b| n.apply(&phi_col(a), &phi_col(b), &xi));
        if first != second {
            return Err(Error::NotGeneralizedQuasiSasaki(
                "dPhi(xi, phi X, Y) and N(phi X, phi Y, xi) disagree".into(),
            ));
        }
        if !first.add(&first.transpose()).is_zero() {
            return Err(Error::NotGeneralizedQuasiSasaki("gamma is not alternating".into()));
        }
        Ok(Form::from_terms(
            2,
            metric_monomials(2).into_iter().map(|m| {
                let a = m.trailing_zeros() as usize;
                let b = (m & (m - 1)).trailing_zeros() as usize;
                (m, first.get(a, b).clone())
            }),
        ))
    }

    /// `c` with `dη = cΦ`, if such a constant exists.
    pub fn sasaki_constant(&self) -> Result<Option<S>> {
        let d_eta = self.d_eta()?;
        let phi = AdaptedStructure::fundamental_form::<S>();
        let c = d_eta.eval(&[0, 1]);
        Ok((phi.mul(&c) == d_eta).then_some(c))
    }
}

/// `(∇_X Φ)(Y, Z)` for a coframe and its connection forms.
pub fn nabla_phi_of<S: Field>(c: &Coframe<S>, omega: &ConnectionForms<S>) -> Result<Tensor3<S>> {
    Geometry::new(c.clone(), omega.clone())?.nabla_phi()
}

pub fn nijenhuis<S: Field>(c: &Coframe<S>, omega: &ConnectionForms<S>) -> Result<Tensor3<S>> {
    Geometry::new(c.clone(), omega.clone())?.nijenhuis()
}

pub fn gamma_form<S: Field>(c: &Coframe<S>, omega: &ConnectionForms<S>) -> Result<Form<S>> {
    Geometry::new(c.clone(), omega.clone())?.gamma()
}

pub fn codifferential<S: Field>(alpha: &Form<S>, c: &Coframe<S>, omega: &ConnectionForms<S>) -> Result<Form<S>> {
    Geometry::new(c.clone(), omega.clone())?.codifferential(alpha)
}

pub fn predicates<S: Field>(c: &Coframe<S>, omega: &ConnectionForms<S>) -> Result<Predicates> {
    Geometry::new(c.clone(), omega.clone())?.predicates()
}

/// Sign of the permutation `(i, j, k)` of three distinct indices, else 0.
pub fn levi_civita3(i: usize, j: usize, k: usize) -> i32 {
    sort_sign(&[i, j, k])
}

/// Rational constant helper for generic scalars.
pub fn q<S: Scalar>(n: i64, d: i64) -> S {
    S::from_rational(&rat(n, d))
}
