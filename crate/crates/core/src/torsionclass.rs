//! Intrinsic torsion, its splitting over the submodules `S3..S7` of
//! `W = Λ¹ ⊗ u(2)^⊥`, and the Cartan splitting of (3,0) tensors.

use crate::acms::{
    connection_tensor, d_phi_from_nabla_phi, nabla_phi_via_gamma, nabla_xi_via_phi, nijenhuis_from_nabla_phi,
    theta, vartheta, Geometry, Lambda2, Tensor3, Vector, XI,
};
use crate::error::{Error, Result};
use crate::exterior::{Form, DIM, METRIC_MASK};
use crate::frames::ConnectionForms;
use crate::linalg::{rank_of, Projector};
use crate::scalar::{rat, Field, Rational};

/// `Γ(e_k) ∈ Λ²₂ ⊕ Λ²₄` for `k = 1..5`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntrinsicTorsion<S = Rational> {
    tensor: Tensor3<S>,
}

impl<S: Field> IntrinsicTorsion<S> {
    /// Fails unless every slot already lies in `u(2)^⊥`.
    pub fn from_tensor(t: Tensor3<S>) -> Result<Self> {
        let l2 = Lambda2::new();
        if l2.pr_w(&t) != t {
            return Err(Error::InternalConsistency(
                "intrinsic torsion must take values in u(2)-perp".into(),
            ));
        }
        Ok(IntrinsicTorsion { tensor: t })
    }

    pub fn tensor(&self) -> &Tensor3<S> {
        &self.tensor
    }

    pub fn component(&self, k: usize) -> Form<S> {
        self.tensor.slot(k)
    }

    pub fn components(&self) -> Vec<Form<S>> {
        (0..DIM).map(|k| self.component(k)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.tensor.is_zero()
    }

    pub fn norm2(&self) -> S {
        self.tensor.norm2()
    }
}

impl<S: Field> Geometry<S> {
    pub fn intrinsic_torsion(&self) -> Result<IntrinsicTorsion<S>> {
        let t = self.eval("intrinsic torsion", |pf| self.lambda2().pr_w(&connection_tensor(pf)))?;
        Ok(IntrinsicTorsion { tensor: t })
    }
}

/// `Γ(X) = pr_{u(2)^⊥} Ω(X)`. Auxiliary symbols must drop out under the
/// projection.
pub fn intrinsic_torsion<S: Field>(omega: &ConnectionForms<S>) -> Result<IntrinsicTorsion<S>> {
    let l2 = Lambda2::<S>::new();
    let slot = |m: u32| {
        Tensor3::from_fn(|_, i, j| omega.get(i, j).coefficient(m))
            .slot(0)
    };
    let aux = omega.support() & !METRIC_MASK;
    for p in (DIM as u32)..32 {
        if aux & (1 << p) != 0 && !l2.project_u2_perp(&slot(1 << p))?.is_zero() {
            return Err(Error::SymbolicResidue {
                symbol: format!("symbol #{}", p + 1),
                tensor: "intrinsic torsion",
            });
        }
    }
    let slots: Vec<Form<S>> = (0..DIM).map(|k| l2.project_u2_perp(&slot(1 << k))).collect::<Result<_>>()?;
    Ok(IntrinsicTorsion {
        tensor: Tensor3::from_slots(&slots),
    })
}

/// The explicitly constructed submodules of `W`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WModule {
    W3,
    W4,
    W5,
    W6,
    W7,
}

impl WModule {
    pub const ALL: [WModule; 5] = [Self::W3, Self::W4, Self::W5, Self::W6, Self::W7];

    pub fn label(self) -> &'static str {
        match self {
            Self::W3 => "W3",
            Self::W4 => "W4",
            Self::W5 => "W5",
            Self::W6 => "W6",
            Self::W7 => "W7",
        }
    }
}

impl std::fmt::Display for WModule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// `S3..S6 = pr_W θ(Λ²₁..Λ²₄)` and `S7 = ϑ(Λ²₂)`, as orthogonal bases in
/// the 125 tensor components.
#[derive(Debug, Clone)]
pub struct WSubspaces<S> {
    projectors: Vec<Projector<S>>,
    spanning: Vec<Vec<Tensor3<S>>>,
}

impl<S: Field> Default for WSubspaces<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Field> WSubspaces<S> {
    pub fn new() -> Self {
        let l2 = Lambda2::<S>::new();
        let mut spanning = Vec::new();
        for part in 1..=4 {
            spanning.push(
                l2.basis(part)
                    .iter()
                    .map(|b| l2.pr_w(&theta(b).expect("metric basis")))
                    .collect::<Vec<_>>(),
            );
        }
        spanning.push(
            l2.basis(2)
                .iter()
                .map(|b| l2.pr_w(&vartheta(b).expect("metric basis")))
                .collect(),
        );
        let projectors = spanning
            .iter()
            .map(|ts| Projector::new(&ts.iter().map(|t| t.components().to_vec()).collect::<Vec<_>>()))
            .collect();
        WSubspaces { projectors, spanning }
    }

    fn index(m: WModule) -> usize {
        m as usize
    }

    pub fn dim(&self, m: WModule) -> usize {
        self.projectors[Self::index(m)].dim()
    }

    /// Orthogonal (unnormalized) basis.
    pub fn basis(&self, m: WModule) -> Vec<Tensor3<S>> {
        self.projectors[Self::index(m)]
            .basis()
            .iter()
            .map(|c| Tensor3::from_components(c.clone()).expect("antisymmetric basis"))
            .collect()
    }

    /// The images of the `Λ²` basis before orthogonalization.
    pub fn spanning_set(&self, m: WModule) -> &[Tensor3<S>] {
        &self.spanning[Self::index(m)]
    }

    pub fn project(&self, m: WModule, t: &Tensor3<S>) -> Tensor3<S> {
        let p = &self.projectors[Self::index(m)];
        Tensor3::from_components(p.project(t.components())).expect("antisymmetric projection")
    }

    /// `t` minus its projections onto `S3..S7`.
    pub fn residual(&self, t: &Tensor3<S>) -> Tensor3<S> {
        WModule::ALL.iter().fold(t.clone(), |acc, &m| acc.sub(&self.project(m, t)))
    }

    /// Rank of all twelve spanning tensors together.
    pub fn total_rank(&self) -> usize {
        let all: Vec<Vec<S>> = self.spanning.iter().flatten().map(|t| t.components().to_vec()).collect();
        rank_of(&all)
    }

    pub fn classify(&self, gamma: &IntrinsicTorsion<S>) -> ClassReport<S> {
        let t = gamma.tensor();
        let norms: Vec<(WModule, S)> = WModule::ALL.iter().map(|&m| (m, self.project(m, t).norm2())).collect();
        let residual = self.residual(t).norm2();
        let mut tags: Vec<String> = norms
            .iter()
            .filter(|(_, n)| !n.is_zero())
            .map(|(m, _)| m.label().to_string())
            .collect();
        if !residual.is_zero() {
            tags.push(OUTSIDE.to_string());
        }
        ClassReport { norms, residual, tags }
    }
}

/// The 30 tensors `E_x^* ⊗ β` with `β` running over the `Λ²₂ ⊕ Λ²₄` basis.
pub fn w_space_basis<S: Field>() -> Vec<Tensor3<S>> {
    let l2 = Lambda2::<S>::new();
    let forms: Vec<Form<S>> = [l2.basis(2), l2.basis(4)].concat();
    let mut out = Vec::new();
    for x in 0..DIM {
        for f in &forms {
            let slots: Vec<Form<S>> = (0..DIM).map(|k| if k == x { f.clone() } else { Form::zero(2) }).collect();
            out.push(Tensor3::from_slots(&slots));
        }
    }
    out
}

pub const OUTSIDE: &str = "outside S3..S7";

pub fn w_subspaces<S: Field>() -> WSubspaces<S> {
    WSubspaces::new()
}

pub fn classify<S: Field>(gamma: &IntrinsicTorsion<S>) -> ClassReport<S> {
    WSubspaces::new().classify(gamma)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassReport<S = Rational> {
    pub norms: Vec<(WModule, S)>,
    pub residual: S,
    pub tags: Vec<String>,
}

impl<S: Field> ClassReport<S> {
    pub fn norm(&self, m: WModule) -> &S {
        &self.norms.iter().find(|(k, _)| *k == m).expect("all modules present").1
    }

    pub fn total(&self) -> S {
        self.norms.iter().fold(self.residual.clone(), |acc, (_, n)| acc.add(n))
    }

    pub fn is_zero(&self) -> bool {
        self.tags.is_empty()
    }

    /// `"W4⊕W7"`, or the cosymplectic label when `Γ = 0`.
    pub fn strict_class(&self) -> String {
        if self.is_zero() {
            "cosymplectic (integrable)".to_string()
        } else {
            self.tags.join("⊕")
        }
    }
}

/// Tensor conditions that the intrinsic torsion alone determines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorsionConditions {
    pub nijenhuis_totally_skew: bool,
    pub xi_interior_d_phi_zero: bool,
    pub xi_killing: bool,
    pub generalized_quasi_sasaki: bool,
}

/// Evaluates `N`, `dΦ` and `∇ξ` through `∇Φ` built from `Γ`.
pub fn torsion_conditions<S: Field>(gamma: &IntrinsicTorsion<S>) -> TorsionConditions {
    let h = nabla_phi_via_gamma(gamma.tensor());
    let n = nijenhuis_from_nabla_phi(&h);
    let d_phi = d_phi_from_nabla_phi(&h);
    let nxi = nabla_xi_via_phi(&h);
    let horizontal = |f: &dyn Fn(usize, usize, usize) -> bool| {
        (0..XI).all(|x| (0..XI).all(|a| (0..XI).all(|b| f(x, a, b))))
    };
    let killing = (0..DIM).all(|x| (0..DIM).all(|y| nxi.get(x, y).add(nxi.get(y, x)).is_zero()));
    TorsionConditions {
        nijenhuis_totally_skew: n.is_totally_skew(),
        xi_interior_d_phi_zero: d_phi.interior(XI).is_zero(),
        xi_killing: killing,
        generalized_quasi_sasaki: killing
            && horizontal(&|x, a, b| n.get(x, a, b).is_zero())
            && horizontal(&|x, a, b| d_phi.eval(&[x, a, b]).is_zero()),
    }
}

/// The O(5)-splitting of `Λ¹ ⊗ Λ²` into vectorial, totally skew and
/// traceless cyclic parts.
#[derive(Debug, Clone, PartialEq)]
pub struct CartanParts<S = Rational> {
    pub vector: Vector<S>,
    pub vectorial: Tensor3<S>,
    pub skew: Tensor3<S>,
    pub cyclic: Tensor3<S>,
}

fn cyclic_sum<S: Field>(a: &Tensor3<S>, x: usize, y: usize, z: usize) -> S {
    a.get(x, y, z).add(a.get(y, z, x)).add(a.get(z, x, y))
}

fn trace<S: Field>(a: &Tensor3<S>, z: usize) -> S {
    (0..DIM).fold(S::zero(), |acc, i| acc.add(a.get(i, i, z)))
}

/// `g(X, Y) V(Z) - g(X, Z) V(Y)`.
pub fn vectorial_tensor<S: Field>(v: &Vector<S>) -> Tensor3<S> {
    Tensor3::from_fn(|x, a, b| {
        let mut s = S::zero();
        if x == a {
            s = s.add(&v[b]);
        }
        if x == b {
            s = s.sub(&v[a]);
        }
        s
    })
}

pub fn cartan_decompose<S: Field>(a: &Tensor3<S>) -> CartanParts<S> {
    let quarter = S::from_rational(&rat(1, 4));
    let third = S::from_rational(&rat(1, 3));
    let vector: Vector<S> = std::array::from_fn(|z| trace(a, z).mul(&quarter));
    let vectorial = vectorial_tensor(&vector);
    let skew = Tensor3::from_fn(|x, y, z| cyclic_sum(a, x, y, z).mul(&third));
    let cyclic = a.sub(&vectorial).sub(&skew);
    CartanParts {
        vector,
        vectorial,
        skew,
        cyclic,
    }
}

impl<S: Field> CartanParts<S> {
    pub fn sum(&self) -> Tensor3<S> {
        self.vectorial.add(&self.skew).add(&self.cyclic)
    }

    /// Each part satisfies its defining condition.
    pub fn check(&self) -> bool {
        let idx = || (0..DIM).flat_map(|x| (0..DIM).flat_map(move |y| (0..DIM).map(move |z| (x, y, z))));
        self.vectorial == vectorial_tensor(&self.vector)
            && self.skew.is_totally_skew()
            && idx().all(|(x, y, z)| cyclic_sum(&self.cyclic, x, y, z).is_zero())
            && (0..DIM).all(|z| trace(&self.cyclic, z).is_zero())
    }

    pub fn is_skew(&self) -> bool {
        self.vectorial.is_zero() && self.cyclic.is_zero()
    }

    pub fn is_traceless_cyclic(&self) -> bool {
        self.vectorial.is_zero() && self.skew.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acms::unit;
    use crate::exterior::Coframe;

    fn z1() -> Form {
        Form::product(&[0, 2], rat(1, 1)).sub(&Form::product(&[1, 3], rat(1, 1)))
    }

    #[test]
    fn w_dimensions_and_rank() {
        let w = WSubspaces::<Rational>::new();
        let dims: Vec<usize> = WModule::ALL.iter().map(|&m| w.dim(m)).collect();
        assert_eq!(dims, vec![1, 2, 3, 4, 2]);
        assert_eq!(w.total_rank(), 12);
        for m in WModule::ALL {
            for t in w.basis(m) {
                assert_eq!(Lambda2::new().pr_w(&t), t);
            }
        }
    }

    #[test]
    fn s4_orthogonal_to_s7() {
        let w = WSubspaces::<Rational>::new();
        for a in w.spanning_set(WModule::W4) {
            for b in w.spanning_set(WModule::W7) {
                assert_eq!(a.inner(b), rat(0, 1));
            }
        }
    }

    #[test]
    fn single_module_members_classify_strictly() {
        let w = WSubspaces::<Rational>::new();
        for m in WModule::ALL {
            for b in w.basis(m) {
                let r = w.classify(&IntrinsicTorsion::from_tensor(b).unwrap());
                assert_eq!(r.tags, vec![m.label().to_string()]);
            }
        }
    }

    #[test]
    fn outside_component_is_residual() {
        // e15 in every slot lies in W but has a component outside S3..S7
        let e15 = Form::product(&[0, 4], rat(1, 1));
        let t = Tensor3::from_slots(&vec![e15; DIM]);
        let g = IntrinsicTorsion::from_tensor(t).unwrap();
        let r = classify(&g);
        assert!(r.tags.contains(&OUTSIDE.to_string()));
        assert_eq!(r.total(), g.norm2());
    }

    #[test]
    fn flat_torsion_vanishes() {
        let c = Coframe::<Rational>::standard(&[], vec![Form::zero(2); DIM]).unwrap();
        let g = Geometry::from_coframe(c).unwrap();
        let it = g.intrinsic_torsion().unwrap();
        assert!(it.is_zero());
        assert_eq!(classify(&it).strict_class(), "cosymplectic (integrable)");
    }

    #[test]
    fn connection_forms_route_matches_geometry() {
        let mut d = vec![Form::zero(2); DIM];
        d[4] = z1().scale(&rat(-2, 1));
        d[0] = Form::product(&[2, 4], rat(-2, 1));
        let c = Coframe::<Rational>::standard(&[], d).unwrap();
        let g = Geometry::from_coframe(c).unwrap();
        let it = g.intrinsic_torsion().unwrap();
        assert!(!it.is_zero());
        assert_eq!(intrinsic_torsion(g.omega()).unwrap(), it);
    }

    #[test]
    fn auxiliary_in_u2_cancels_and_outside_does_not() {
        let a = 1u32 << 5;
        let f = Form::monomial(a, rat(1, 1));
        let inside = ConnectionForms::zero().with(0, 1, f.clone()).with(2, 3, f.neg());
        assert!(intrinsic_torsion(&inside).unwrap().is_zero());
        let outside = ConnectionForms::zero().with(0, 2, f);
        assert!(matches!(intrinsic_torsion(&outside), Err(Error::SymbolicResidue { .. })));
    }

    #[test]
    fn cartan_examples() {
        let v = unit::<Rational>(0);
        let a = vectorial_tensor(&v);
        let p = cartan_decompose(&a);
        assert_eq!(p.vectorial, a);
        assert!(p.skew.is_zero() && p.cyclic.is_zero());
        let e123 = Form::product(&[0, 1, 2], rat(1, 1));
        let s = Tensor3::from_three_form(&e123);
        let p = cartan_decompose(&s);
        assert_eq!(p.skew, s);
        assert!(p.check() && p.is_skew());
    }
}
