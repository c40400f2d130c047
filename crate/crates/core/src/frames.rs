//! Connection forms, pointwise frame data, the Levi-Civita solve and
//! frame-change certificates against a small catalog of Lie algebras.

use crate::error::{Error, Result};
use crate::exterior::{ext_d, mask_of, Coframe, Form, DIM, METRIC_MASK};
use crate::linalg::Matrix;
use crate::scalar::{rat, rational_sqrt, Field, PhasePoint, Rational, Scalar, TrigScalar};

/// Antisymmetric 5×5 matrix of 1-forms, `ω_ij = g(∇ e_i, e_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionForms<S = Rational> {
    omega: Vec<Vec<Form<S>>>,
}

impl<S: Scalar> ConnectionForms<S> {
    pub fn zero() -> Self {
        ConnectionForms {
            omega: vec![vec![Form::zero(1); DIM]; DIM],
        }
    }

    /// Sets `ω_ij = f` and `ω_ji = -f`.
    pub fn set(&mut self, i: usize, j: usize, f: Form<S>) {
        assert!(i != j, "diagonal connection forms vanish");
        assert_eq!(f.degree(), 1, "connection forms are 1-forms");
        self.omega[j][i] = f.neg();
        self.omega[i][j] = f;
    }

    pub fn with(mut self, i: usize, j: usize, f: Form<S>) -> Self {
        self.set(i, j, f);
        self
    }

    pub fn get(&self, i: usize, j: usize) -> &Form<S> {
        &self.omega[i][j]
    }

    pub fn is_antisymmetric(&self) -> bool {
        (0..DIM).all(|i| {
            self.omega[i][i].is_zero() && (0..DIM).all(|j| self.omega[i][j] == self.omega[j][i].neg())
        })
    }

    /// Union of symbols used by any entry.
    pub fn support(&self) -> u32 {
        self.omega.iter().flatten().fold(0, |acc, f| acc | f.support())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> ConnectionForms<T> {
        ConnectionForms {
            omega: self
                .omega
                .iter()
                .map(|row| row.iter().map(|x| x.map(&f)).collect())
                .collect(),
        }
    }
}

/// Values `ω_ij(E_k)` of a connection at a point, stored as `w[i][j][k]`.
///
/// Every first-order tensor of the structure is linear in these values, so a
/// frame with auxiliary legs is handled as one such value set per leg and
/// direction (see [`ConnectionForms`] decomposition in the `acms` module).
#[derive(Debug, Clone, PartialEq)]
pub struct PointwiseFrame<S> {
    w: [[[S; DIM]; DIM]; DIM],
}

impl<S: Scalar> PointwiseFrame<S> {
    pub fn zero() -> Self {
        PointwiseFrame {
            w: std::array::from_fn(|_| std::array::from_fn(|_| std::array::from_fn(|_| S::zero()))),
        }
    }

    /// Builds the frame from the values with `i < j`; the rest follows by
    /// antisymmetry.
    pub fn from_upper(mut f: impl FnMut(usize, usize, usize) -> S) -> Self {
        let mut out = Self::zero();
        for i in 0..DIM {
            for j in i + 1..DIM {
                for k in 0..DIM {
                    let v = f(i, j, k);
                    out.w[j][i][k] = v.neg();
                    out.w[i][j][k] = v;
                }
            }
        }
        out
    }

    /// `ω_ij(E_k)`.
    pub fn value(&self, i: usize, j: usize, k: usize) -> &S {
        &self.w[i][j][k]
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self::from_upper(|i, j, k| self.w[i][j][k].add(&rhs.w[i][j][k]))
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self::from_upper(|i, j, k| self.w[i][j][k].scale(q))
    }

    pub fn is_zero(&self) -> bool {
        self.w.iter().flatten().flatten().all(S::is_zero)
    }

    /// `de_i(E_a, E_b) = ω_ib(E_a) - ω_ia(E_b)` (torsion-free first structure
    /// equation).
    pub fn induced_d(&self, i: usize, a: usize, b: usize) -> S {
        self.w[i][b][a].sub(&self.w[i][a][b])
    }

    pub fn induced_d_form(&self, i: usize) -> Form<S> {
        let mut terms = Vec::new();
        for a in 0..DIM {
            for b in a + 1..DIM {
                terms.push((mask_of(&[a, b]), self.induced_d(i, a, b)));
            }
        }
        Form::from_terms(2, terms)
    }

    /// Components of `[E_a, E_b] = ∇_{E_a} E_b - ∇_{E_b} E_a`.
    pub fn bracket(&self, a: usize, b: usize) -> [S; DIM] {
        std::array::from_fn(|j| self.w[b][j][a].sub(&self.w[a][j][b]))
    }
}

impl<S: Field> PointwiseFrame<S> {
    /// `∇_X V` for constant-coefficient vectors `X`, `V` in the frame.
    pub fn nabla(&self, x: &[S; DIM], v: &[S; DIM]) -> [S; DIM] {
        std::array::from_fn(|j| {
            let mut acc = S::zero();
            for a in 0..DIM {
                if v[a].is_zero() {
                    continue;
                }
                for k in 0..DIM {
                    if !x[k].is_zero() {
                        acc = acc.add(&v[a].mul(&x[k]).mul(&self.w[a][j][k]));
                    }
                }
            }
            acc
        })
    }

    /// Lie bracket of constant-coefficient vectors.
    pub fn bracket_vec(&self, x: &[S; DIM], y: &[S; DIM]) -> [S; DIM] {
        let a = self.nabla(x, y);
        let b = self.nabla(y, x);
        std::array::from_fn(|j| a[j].sub(&b[j]))
    }
}

/// Per metric generator the 2-form `de_i - Σ_j ω_ij ∧ e_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstStructureReport<S> {
    pub residuals: Vec<(String, Form<S>)>,
}

impl<S: Scalar> FirstStructureReport<S> {
    pub fn ok(&self) -> bool {
        self.residuals.iter().all(|(_, f)| f.is_zero())
    }
}

pub fn verify_first_structure<S: Scalar>(
    c: &Coframe<S>,
    omega: &ConnectionForms<S>,
) -> Result<FirstStructureReport<S>> {
    let mut residuals = Vec::with_capacity(DIM);
    for i in 0..DIM {
        let mut r = c.d_of(i).clone();
        for j in 0..DIM {
            r = r.sub(&omega.get(i, j).try_wedge(&Form::generator(j))?);
        }
        residuals.push((c.symbol(i).name.clone(), r));
    }
    Ok(FirstStructureReport { residuals })
}

/// Levi-Civita connection forms of the left-invariant metric making the
/// coframe orthonormal.
///
/// Auxiliary symbols are accepted when they enter `de_i` only through terms
/// `y_il a ∧ e_l` with `y` antisymmetric in `(i, l)`; such a term is carried
/// by `ω_il`. The result is always re-checked against the structure
/// equations.
pub fn koszul_connection<S: Field>(c: &Coframe<S>) -> Result<ConnectionForms<S>> {
    // metric part: D[i][a][b] = de_i(E_a, E_b)
    let mut d = vec![vec![vec![S::zero(); DIM]; DIM]; DIM];
    let mut aux: Vec<Vec<Vec<S>>> = vec![vec![vec![S::zero(); DIM]; DIM]; c.len()];
    for i in 0..DIM {
        for (m, coeff) in c.d_of(i).terms() {
            if !coeff.is_constant() {
                return Err(Error::UnsupportedSymbol {
                    symbol: coeff.render(),
                    operation: "koszul_connection (non-constant coefficient)",
                });
            }
            let metric = m & METRIC_MASK;
            let extra = m & !METRIC_MASK;
            match extra.count_ones() {
                0 => {
                    let a = metric.trailing_zeros() as usize;
                    let b = (metric & (metric - 1)).trailing_zeros() as usize;
                    d[i][a][b] = coeff.clone();
                    d[i][b][a] = coeff.neg();
                }
                1 => {
                    let p = extra.trailing_zeros() as usize;
                    let l = metric.trailing_zeros() as usize;
                    // stored monomial is e_l ∧ a (p > l); y_il multiplies a ∧ e_l
                    aux[p][i][l] = coeff.neg();
                }
                _ => {
                    return Err(Error::UnsupportedSymbol {
                        symbol: c.symbol((extra.trailing_zeros()) as usize).name.clone(),
                        operation: "koszul_connection (product of auxiliary symbols)",
                    })
                }
            }
        }
    }
    for p in c.aux_positions() {
        for i in 0..DIM {
            for l in 0..DIM {
                if aux[p][i][l] != aux[p][l][i].neg() {
                    return Err(Error::UnsupportedSymbol {
                        symbol: c.symbol(p).name.clone(),
                        operation: "koszul_connection (auxiliary coefficients not antisymmetric)",
                    });
                }
            }
        }
    }
    let half = S::from_rational(&rat(1, 2));
    let mut omega = ConnectionForms::zero();
    for i in 0..DIM {
        for j in i + 1..DIM {
            let mut terms = Vec::new();
            for k in 0..DIM {
                // ω_ij(E_k) = ½ (D_ikj + D_jik - D_kji)
                let v = d[i][k][j].add(&d[j][i][k]).sub(&d[k][j][i]).mul(&half);
                terms.push((1 << k, v));
            }
            for p in c.aux_positions() {
                terms.push((1 << p, aux[p][i][j].clone()));
            }
            omega.set(i, j, Form::from_terms(1, terms));
        }
    }
    let report = verify_first_structure(c, &omega)?;
    if let Some((name, r)) = report.residuals.iter().find(|(_, r)| !r.is_zero()) {
        return Err(Error::InternalConsistency(format!(
            "Koszul solution fails the structure equation of {name}: residual {}",
            c.render(r)
        )));
    }
    Ok(omega)
}

/// Six-dimensional Lie algebras used as identification targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CanonicalAlgebra {
    Su2Su2,
    Sl2Sl2,
    Abelian6,
    Heis5R,
}

impl CanonicalAlgebra {
    pub const ALL: [CanonicalAlgebra; 4] = [Self::Su2Su2, Self::Sl2Sl2, Self::Abelian6, Self::Heis5R];

    pub fn tag(self) -> &'static str {
        match self {
            Self::Su2Su2 => "su2+su2",
            Self::Sl2Sl2 => "sl2+sl2",
            Self::Abelian6 => "abelian6",
            Self::Heis5R => "heis5+R",
        }
    }

    /// Structure constants: `du_k = Σ c u_i ∧ u_j` listed as `(k, i, j, c)`.
    pub fn structure(self) -> Vec<(usize, usize, usize, i64)> {
        let block = |o: usize, top: i64| {
            vec![(o, o + 1, o + 2, -1), (o + 1, o + 2, o, -1), (o + 2, o, o + 1, top)]
        };
        match self {
            Self::Su2Su2 => [block(0, -1), block(3, -1)].concat(),
            Self::Sl2Sl2 => [block(0, 1), block(3, 1)].concat(),
            Self::Abelian6 => Vec::new(),
            Self::Heis5R => vec![(4, 0, 1, 2), (4, 2, 3, 2)],
        }
    }

    /// The algebra's Maurer-Cartan equations on generators `u1..u6`.
    pub fn coframe(self) -> Coframe<Rational> {
        let mut d = vec![Form::zero(2); 6];
        for (k, i, j, c) in self.structure() {
            d[k] = d[k].add(&Form::product(&[i, j], rat(c, 1)));
        }
        let mut symbols: Vec<_> = (1..=DIM)
            .map(|i| crate::exterior::Symbol::metric(format!("u{i}"), i))
            .collect();
        symbols.push(crate::exterior::Symbol::auxiliary("u6"));
        Coframe::new(symbols, d, [1, 2, 3, 4, 5]).expect("catalog coframe is well formed")
    }
}

impl std::fmt::Display for CanonicalAlgebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// New 1-forms `u_i = √s_i · forms[i]` on a six-symbol coframe, possibly
/// with trigonometric coefficients in phase functions whose differentials
/// are part of the certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameChange {
    pub names: Vec<String>,
    pub forms: Vec<Form<TrigScalar>>,
    /// Positive squares of the rescaling factors.
    pub scale_squares: Vec<Rational>,
    pub phases: Option<(Form<Rational>, Form<Rational>)>,
}

impl FrameChange {
    pub fn new(names: &[&str], forms: Vec<Form<Rational>>) -> Self {
        let n = forms.len();
        FrameChange {
            names: names.iter().map(|s| s.to_string()).collect(),
            forms: forms
                .iter()
                .map(|f| f.map(|q| TrigScalar::constant(q.clone())))
                .collect(),
            scale_squares: vec![rat(1, 1); n],
            phases: None,
        }
    }

    pub fn trig(names: &[&str], forms: Vec<Form<TrigScalar>>, df: Form<Rational>, dg: Form<Rational>) -> Self {
        let n = forms.len();
        FrameChange {
            names: names.iter().map(|s| s.to_string()).collect(),
            forms,
            scale_squares: vec![rat(1, 1); n],
            phases: Some((df, dg)),
        }
    }

    pub fn with_scale_squares(mut self, s: Vec<Rational>) -> Self {
        assert_eq!(s.len(), self.forms.len());
        self.scale_squares = s;
        self
    }

    /// The same change with generators reordered by `perm` (new position
    /// `p` takes old generator `perm[p]`).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        FrameChange {
            names: perm.iter().map(|&p| self.names[p].clone()).collect(),
            forms: perm.iter().map(|&p| self.forms[p].clone()).collect(),
            scale_squares: perm.iter().map(|&p| self.scale_squares[p].clone()).collect(),
            phases: self.phases.clone(),
        }
    }
}

fn eval_form(f: &Form<TrigScalar>, p: &PhasePoint) -> Form<Rational> {
    f.map(|c| c.evaluate(p))
}

/// Checks that the new forms satisfy the target's Maurer-Cartan equations.
///
/// `d` of each new form is computed symbolically (trig coefficients
/// differentiated through the phase rules); the comparison with the
/// quadratic right-hand side is made exactly at the 25 phase-torus points of
/// [`PhasePoint::grid`], which determine trig polynomials of degree two in
/// each phase. Independence of the new forms is checked at the same points.
pub fn frame_change_verify(c: &Coframe<Rational>, f: &FrameChange, target: CanonicalAlgebra) -> Result<bool> {
    let n = c.len();
    if f.forms.len() != n || n != 6 {
        return Err(Error::Rank { expected: 6, found: f.forms.len() });
    }
    if f.forms.iter().any(|u| u.degree() != 1) {
        return Err(Error::InvalidCoframe("frame change forms must be 1-forms".into()));
    }
    if f.scale_squares.iter().any(|s| s <= &rat(0, 1)) {
        return Err(Error::IrrationalScale("non-positive scale square".into()));
    }
    let mut tc = c.map_scalars(|q| TrigScalar::constant(q.clone()));
    if let Some((df, dg)) = &f.phases {
        tc = tc.with_phase_rules(
            df.map(|q| TrigScalar::constant(q.clone())),
            dg.map(|q| TrigScalar::constant(q.clone())),
        )?;
        // the phases exist locally only if df and dg are closed
        if !ext_d(df, c)?.is_zero() || !ext_d(dg, c)?.is_zero() {
            return Ok(false);
        }
    }
    let du: Vec<Form<TrigScalar>> = f.forms.iter().map(|u| ext_d(u, &tc)).collect::<Result<_>>()?;

    // d(form_k) = Σ c √(s_i s_j / s_k) form_i ∧ form_j
    let mut rhs_terms: Vec<Vec<(usize, usize, Rational)>> = vec![Vec::new(); n];
    for (k, i, j, coeff) in target.structure() {
        let ratio = &f.scale_squares[i] * &f.scale_squares[j] / &f.scale_squares[k];
        let r = rational_sqrt(&ratio).ok_or_else(|| Error::IrrationalScale(ratio.to_string()))?;
        rhs_terms[k].push((i, j, r * rat(coeff, 1)));
    }

    for p in PhasePoint::grid() {
        let forms: Vec<Form<Rational>> = f.forms.iter().map(|u| eval_form(u, &p)).collect();
        let m = Matrix::from_fn(n, n, |a, b| forms[a].coefficient(1 << b));
        let rank = m.rank();
        if rank != n {
            return Err(Error::Rank { expected: n, found: rank });
        }
        for k in 0..n {
            let lhs = eval_form(&du[k], &p);
            let mut rhs = Form::zero(2);
            for (i, j, r) in &rhs_terms[k] {
                rhs = rhs.add(&forms[*i].wedge(&forms[*j]).scale(r));
            }
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::d_squared_zero;

    fn e(i: usize) -> Form {
        Form::generator(i - 1)
    }

    fn ee(i: usize, j: usize) -> Form {
        Form::product(&[i - 1, j - 1], rat(1, 1))
    }

    /// su(2) ⊕ R²: du1 = -u2∧u3 (cyclic), du4 = du5 = 0.
    fn su2_plus_r2() -> Coframe {
        let mut d = vec![Form::zero(2); 5];
        d[0] = ee(2, 3).neg();
        d[1] = ee(3, 1).neg();
        d[2] = ee(1, 2).neg();
        Coframe::standard(&[], d).unwrap()
    }

    /// Independent oracle: Koszul formula
    /// 2 g(∇_X Y, Z) = g([X,Y],Z) - g([Y,Z],X) + g([Z,X],Y)
    /// with [E_a, E_b] = -Σ_i de_i(E_a,E_b) E_i.
    fn oracle(c: &Coframe, i: usize, j: usize, k: usize) -> Rational {
        let br = |a: usize, b: usize, t: usize| -c.d_of(t).eval(&[a, b]);
        // ω_ij(E_k) = g(∇_{E_k} E_i, E_j)
        (br(k, i, j) - br(i, j, k) + br(j, k, i)) / rat(2, 1)
    }

    #[test]
    fn abelian_connection_vanishes() {
        let c = Coframe::<Rational>::standard(&[], vec![Form::zero(2); 5]).unwrap();
        let w = koszul_connection(&c).unwrap();
        assert_eq!(w, ConnectionForms::zero());
    }

    #[test]
    fn su2_connection_matches_oracle() {
        let c = su2_plus_r2();
        let w = koszul_connection(&c).unwrap();
        assert_eq!(w.get(0, 1), &e(3).scale(&rat(1, 2)));
        assert_eq!(w.get(1, 2), &e(1).scale(&rat(1, 2)));
        assert_eq!(w.get(2, 0), &e(2).scale(&rat(1, 2)));
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    assert_eq!(w.get(i, j).eval(&[k]), oracle(&c, i, j, k), "ω_{i}{j}(E_{k})");
                }
            }
        }
    }

    #[test]
    fn koszul_is_unique() {
        let c = su2_plus_r2();
        let w = koszul_connection(&c).unwrap();
        for (i, j, k) in [(0, 1, 2), (0, 4, 0), (2, 3, 4), (1, 2, 0)] {
            let bumped = w.get(i, j).add(&e(k + 1));
            let w2 = w.clone().with(i, j, bumped);
            assert!(!verify_first_structure(&c, &w2).unwrap().ok());
        }
    }

    #[test]
    fn zero_connection_fails_on_nonflat_coframe() {
        let r = verify_first_structure(&su2_plus_r2(), &ConnectionForms::zero()).unwrap();
        assert!(!r.ok());
    }

    #[test]
    fn auxiliary_terms_need_antisymmetry() {
        let mut d = vec![Form::zero(2); 6];
        d[0] = Form::product(&[5, 1], rat(1, 1));
        let c = Coframe::standard(&["A2"], d.clone()).unwrap();
        assert!(matches!(koszul_connection(&c), Err(Error::UnsupportedSymbol { .. })));
        d[1] = Form::product(&[5, 0], rat(-1, 1));
        let c = Coframe::standard(&["A2"], d).unwrap();
        let w = koszul_connection(&c).unwrap();
        assert_eq!(w.get(0, 1), &Form::generator(5));
    }

    #[test]
    fn pointwise_brackets_are_torsion_free() {
        let c = su2_plus_r2();
        let w = koszul_connection(&c).unwrap();
        let pf = PointwiseFrame::from_upper(|i, j, k| w.get(i, j).eval(&[k]));
        for i in 0..DIM {
            assert_eq!(pf.induced_d_form(i), *c.d_of(i));
        }
        // [E1, E2] = E3 for du3 = -u1∧u2
        let b = pf.bracket(0, 1);
        assert_eq!(b, [rat(0, 1), rat(0, 1), rat(1, 1), rat(0, 1), rat(0, 1)]);
    }

    #[test]
    fn catalog_is_integrable() {
        for alg in CanonicalAlgebra::ALL {
            assert!(d_squared_zero(&alg.coframe()).unwrap().ok(), "{alg}");
        }
    }

    #[test]
    fn identity_change_certifies_the_catalog_itself() {
        for alg in CanonicalAlgebra::ALL {
            let c = alg.coframe();
            let fc = FrameChange::new(&["u1", "u2", "u3", "u4", "u5", "u6"], (0..6).map(Form::generator).collect());
            assert!(frame_change_verify(&c, &fc, alg).unwrap());
            for other in CanonicalAlgebra::ALL {
                if other != alg {
                    assert!(!frame_change_verify(&c, &fc, other).unwrap(), "{alg} vs {other}");
                }
            }
        }
    }

    #[test]
    fn dependent_forms_are_a_rank_error() {
        let c = CanonicalAlgebra::Abelian6.coframe();
        let mut forms: Vec<Form> = (0..6).map(Form::generator).collect();
        forms[5] = forms[4].clone();
        let fc = FrameChange::new(&["a", "b", "c", "d", "e", "f"], forms);
        assert!(matches!(
            frame_change_verify(&c, &fc, CanonicalAlgebra::Abelian6),
            Err(Error::Rank { expected: 6, found: 5 })
        ));
    }

    #[test]
    fn rescaled_su2_needs_rational_ratios() {
        // u_i = 2 w_i turns du = -u∧u into dw = -2 w∧w
        let mut d = vec![Form::zero(2); 6];
        for (k, i, j, c) in CanonicalAlgebra::Su2Su2.structure() {
            d[k] = d[k].add(&Form::product(&[i, j], rat(2 * c, 1)));
        }
        let mut symbols: Vec<_> = (1..=5).map(|i| crate::exterior::Symbol::metric(format!("w{i}"), i)).collect();
        symbols.push(crate::exterior::Symbol::auxiliary("w6"));
        let c = Coframe::new(symbols, d, [1, 2, 3, 4, 5]).unwrap();
        let names = ["u1", "u2", "u3", "v1", "v2", "v3"];
        let plain = FrameChange::new(&names, (0..6).map(Form::generator).collect());
        assert!(!frame_change_verify(&c, &plain, CanonicalAlgebra::Su2Su2).unwrap());
        let scaled = plain.clone().with_scale_squares(vec![rat(4, 1); 6]);
        assert!(frame_change_verify(&c, &scaled, CanonicalAlgebra::Su2Su2).unwrap());
        let irrational = plain.with_scale_squares(vec![rat(2, 1), rat(1, 1), rat(1, 1), rat(1, 1), rat(1, 1), rat(1, 1)]);
        assert!(matches!(
            frame_change_verify(&c, &irrational, CanonicalAlgebra::Su2Su2),
            Err(Error::IrrationalScale(_))
        ));
    }
}
