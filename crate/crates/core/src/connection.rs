//! The characteristic connection `∇^c` of a generalized quasi-Sasaki
//! structure, its torsion type, curvature, Ricci tensor and holonomy.

use crate::acms::{nabla_phi_endomorphism, AdaptedStructure, Geometry, Tensor3, XI};
use crate::error::{Error, Result};
use crate::exterior::{d_squared_zero, ext_d, metric_monomials, Coframe, Form, DIM};
use crate::frames::{verify_first_structure, ConnectionForms, PointwiseFrame};
use crate::linalg::{span_basis, Matrix};
use crate::scalar::{rat, Field, Rational};
use crate::torsionclass::{cartan_decompose, CartanParts};

/// `g(∇^c_X Y, Z) = g(∇^g_X Y, Z) + A^c(X, Y, Z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicConnection<S = Rational> {
    pub omega_c: ConnectionForms<S>,
    pub a_c: Tensor3<S>,
    /// `T(X, Y, Z) = A^c(X, Y, Z) - A^c(Y, X, Z)`, stored as `(Z, X, Y)` so
    /// that the last two slots are the antisymmetric pair.
    pub torsion: Tensor3<S>,
}

/// Which parallelity conditions a metric connection satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Compatibility {
    pub xi: bool,
    pub eta: bool,
    pub phi: bool,
}

impl Compatibility {
    pub fn all(&self) -> bool {
        self.xi && self.eta && self.phi
    }
}

/// `ω_ij + Σ_k A(E_k, E_i, E_j) e_k`.
pub fn shift_connection<S: Field>(omega: &ConnectionForms<S>, a: &Tensor3<S>) -> ConnectionForms<S> {
    let mut out = omega.clone();
    for i in 0..DIM {
        for j in i + 1..DIM {
            let shift = Form::from_terms(1, (0..DIM).map(|k| (1 << k, a.get(k, i, j).clone())));
            out.set(i, j, omega.get(i, j).add(&shift));
        }
    }
    out
}

/// Frame values `w[i][j][0] = coefficient of symbol p in ω_ij`.
fn symbol_frame<S: Field>(omega: &ConnectionForms<S>, p: usize) -> PointwiseFrame<S> {
    PointwiseFrame::from_upper(|i, j, k| {
        if k == 0 {
            omega.get(i, j).coefficient(1 << p)
        } else {
            S::zero()
        }
    })
}

/// Evaluates `∇ξ = 0`, `∇η = 0` and `∇φ = 0` for the connection forms, leg
/// by leg over every symbol of the coframe.
pub fn compatibility<S: Field>(omega: &ConnectionForms<S>, symbols: usize) -> Compatibility {
    let mut out = Compatibility {
        xi: true,
        eta: true,
        phi: true,
    };
    for p in 0..symbols {
        let w = symbol_frame(omega, p);
        // ∇ξ = Σ_b ω_5b ⊗ E_b
        out.xi &= (0..DIM).all(|b| w.value(XI, b, 0).is_zero());
        // (∇η)(E_b) = -Σ_j ω_bj η(E_j)
        out.eta &= (0..DIM).all(|b| w.value(b, XI, 0).is_zero());
        let g = nabla_phi_endomorphism(&w);
        out.phi &= (0..DIM).all(|a| (0..DIM).all(|b| g.get(0, a, b).is_zero()));
    }
    out
}

/// `T(X, Y, Z) = A(X, Y, Z) - A(Y, X, Z)` re-indexed as `(Z, X, Y)`.
pub fn torsion_of<S: Field>(a: &Tensor3<S>) -> Tensor3<S> {
    Tensor3::from_fn(|z, x, y| a.get(x, y, z).sub(a.get(y, x, z)))
}

impl<S: Field> Geometry<S> {
    /// `A^c = ½ ((dη - γ) ∧ η - N)`; the resulting connection is checked for
    /// `∇^c ξ = ∇^c η = ∇^c φ = 0` and for its torsion against the first
    /// structure equation.
    pub fn characteristic_connection(&self) -> Result<CharacteristicConnection<S>> {
        let gamma = self.gamma()?;
        let d_eta = self.d_eta()?;
        let n = self.nijenhuis()?;
        let skew = Tensor3::from_three_form(&d_eta.sub(&gamma).wedge(&AdaptedStructure::eta()));
        let a_c = skew.sub(&n).scale(&rat(1, 2));
        let omega_c = shift_connection(self.omega(), &a_c);
        let compat = compatibility(&omega_c, self.coframe().len());
        if !compat.all() {
            return Err(Error::InternalConsistency(format!(
                "characteristic connection fails parallelity: {compat:?}"
            )));
        }
        let torsion = torsion_of(&a_c);
        let report = verify_first_structure(self.coframe(), &omega_c)?;
        for (i, (_, r)) in report.residuals.iter().enumerate() {
            if *r != torsion.slot(i) {
                return Err(Error::InternalConsistency(format!(
                    "torsion of the characteristic connection disagrees in slot {}",
                    i + 1
                )));
            }
        }
        Ok(CharacteristicConnection { omega_c, a_c, torsion })
    }
}

pub fn characteristic_connection<S: Field>(
    c: &Coframe<S>,
    omega_g: &ConnectionForms<S>,
) -> Result<CharacteristicConnection<S>> {
    Geometry::new(c.clone(), omega_g.clone())?.characteristic_connection()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TorsionType {
    Zero,
    Skew,
    TracelessCyclic,
    Mixed,
}

impl TorsionType {
    pub fn tag(self) -> &'static str {
        match self {
            Self::Zero => "zero",
            Self::Skew => "skew",
            Self::TracelessCyclic => "traceless-cyclic",
            Self::Mixed => "mixed",
        }
    }
}

impl std::fmt::Display for TorsionType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

pub fn torsion_type<S: Field>(cc: &CharacteristicConnection<S>) -> (CartanParts<S>, TorsionType) {
    let parts = cartan_decompose(&cc.torsion);
    let tag = match (parts.is_skew(), parts.is_traceless_cyclic()) {
        (true, true) => TorsionType::Zero,
        (true, false) => TorsionType::Skew,
        (false, true) => TorsionType::TracelessCyclic,
        (false, false) => TorsionType::Mixed,
    };
    (parts, tag)
}

/// Curvature forms, Ricci tensor and holonomy algebra of a connection.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureData<S = Rational> {
    /// `R_ij = dω_ij - Σ_k ω_ik ∧ ω_kj`.
    pub r: Vec<Vec<Form<S>>>,
    /// `Ric(E_a, E_b) = Σ_i R_ib(E_a, E_i)`.
    pub ricci: Matrix<S>,
    /// Basis of the bracket closure of the curvature endomorphisms, as
    /// 2-forms under `so(5) ≅ Λ²`.
    pub holonomy_basis: Vec<Form<S>>,
}

impl<S: Field> CurvatureData<S> {
    pub fn get(&self, i: usize, j: usize) -> &Form<S> {
        &self.r[i][j]
    }

    /// Index pairs `i < j` with `R_ij ≠ 0`.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..DIM {
            for j in i + 1..DIM {
                if !self.r[i][j].is_zero() {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn is_flat(&self) -> bool {
        self.support().is_empty()
    }
}

fn to_matrix<S: Field>(beta: &Form<S>) -> Matrix<S> {
    Matrix::from_fn(DIM, DIM, |i, j| beta.eval(&[i, j]))
}

fn from_matrix<S: Field>(m: &Matrix<S>) -> Form<S> {
    Form::from_terms(
        2,
        metric_monomials(2).into_iter().map(|mono| {
            let i = mono.trailing_zeros() as usize;
            let j = (mono & (mono - 1)).trailing_zeros() as usize;
            (mono, m.get(i, j).clone())
        }),
    )
}

/// `[α, β]` of two 2-forms read as skew matrices.
pub fn so_bracket<S: Field>(a: &Form<S>, b: &Form<S>) -> Form<S> {
    let (x, y) = (to_matrix(a), to_matrix(b));
    from_matrix(&x.mul(&y).sub(&y.mul(&x)))
}

/// Basis of the smallest bracket-closed subspace containing `gens`.
pub fn bracket_closure<S: Field>(gens: &[Form<S>]) -> Vec<Form<S>> {
    let coords = |fs: &[Form<S>]| fs.iter().map(|f| f.metric_coordinates()).collect::<Vec<_>>();
    let mut basis = span_basis(&coords(gens));
    loop {
        let forms: Vec<Form<S>> = basis.iter().map(|c| Form::from_metric_coordinates(2, c)).collect();
        let mut all = coords(&forms);
        for a in &forms {
            for b in &forms {
                all.push(so_bracket(a, b).metric_coordinates());
            }
        }
        let next = span_basis(&all);
        if next.len() == basis.len() {
            return forms;
        }
        basis = next;
    }
}

/// Curvature of the connection forms `omega` over the coframe. Auxiliary
/// symbols are eliminated through their exterior derivatives; the coframe
/// must satisfy `d² = 0`.
pub fn curvature<S: Field>(c: &Coframe<S>, omega: &ConnectionForms<S>) -> Result<CurvatureData<S>> {
    let d2 = d_squared_zero(c)?;
    if let Some((name, f)) = d2.failures().next() {
        return Err(Error::Verification(format!(
            "curvature needs d² = 0, but d²{name} = {}",
            c.render(f)
        )));
    }
    let mut r = vec![vec![Form::zero(2); DIM]; DIM];
    for i in 0..DIM {
        for j in i + 1..DIM {
            let mut f = ext_d(omega.get(i, j), c)?;
            for k in 0..DIM {
                f = f.sub(&omega.get(i, k).wedge(omega.get(k, j)));
            }
            f.ensure_metric(c, "curvature")?;
            r[j][i] = f.neg();
            r[i][j] = f;
        }
    }
    let ricci = Matrix::from_fn(DIM, DIM, |a, b| {
        (0..DIM).fold(S::zero(), |acc, i| acc.add(&r[i][b].eval(&[a, i])))
    });
    let mut gens = Vec::new();
    for a in 0..DIM {
        for b in a + 1..DIM {
            let m = Matrix::from_fn(DIM, DIM, |i, j| r[i][j].eval(&[a, b]));
            let g = from_matrix(&m);
            if !g.is_zero() {
                gens.push(g);
            }
        }
    }
    Ok(CurvatureData {
        r,
        ricci,
        holonomy_basis: bracket_closure(&gens),
    })
}
