//! Exterior algebra over a coframe of at most six symbols.
//!
//! A monomial is a bitmask over symbol positions; bit `p` is the symbol at
//! position `p` of the owning [`Coframe`]. Positions `0..5` are always the
//! metric legs `e1..e5` in index order, auxiliary symbols follow.
//!
//! Wedge and evaluation use the determinant convention without `1/k!`
//! weights: `(a ∧ b)(X, Y) = a(X) b(Y) - a(Y) b(X)` and `e_I(E_I) = 1`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{Field, Rational, Scalar};

/// Number of metric legs.
pub const DIM: usize = 5;
/// Largest supported symbol set (five metric legs plus one auxiliary form).
pub const MAX_SYMBOLS: usize = 6;

pub type Monomial = u32;

/// Bitmask of the metric legs.
pub const METRIC_MASK: Monomial = (1 << DIM) - 1;
/// `e1 ∧ e2 ∧ e3 ∧ e4 ∧ e5`.
pub const VOLUME: Monomial = METRIC_MASK;

pub fn mask_of(positions: &[usize]) -> Monomial {
    positions.iter().fold(0, |m, &p| m | (1 << p))
}

pub fn positions_of(m: Monomial) -> Vec<usize> {
    (0..32).filter(|p| m & (1 << p) != 0).collect()
}

/// Sign of `e_I ∧ e_J` relative to `e_{I ∪ J}`; zero if they overlap.
pub fn wedge_sign(i: Monomial, j: Monomial) -> i32 {
    if i & j != 0 {
        return 0;
    }
    let mut inversions = 0;
    let mut rest = j;
    while rest != 0 {
        let b = rest.trailing_zeros();
        rest &= rest - 1;
        inversions += (i >> (b + 1)).count_ones();
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sign of the permutation sorting `slots`, or zero if an entry repeats.
pub fn sort_sign(slots: &[usize]) -> i32 {
    let mut sign = 1;
    for a in 0..slots.len() {
        for b in a + 1..slots.len() {
            match slots[a].cmp(&slots[b]) {
                std::cmp::Ordering::Equal => return 0,
                std::cmp::Ordering::Greater => sign = -sign,
                std::cmp::Ordering::Less => {}
            }
        }
    }
    sign
}

fn signed<S: Scalar>(s: &S, sign: i32) -> S {
    match sign {
        1 => s.clone(),
        -1 => s.neg(),
        _ => S::zero(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymbolKind {
    /// Orthonormal coframe leg with index 1..=5.
    Metric(usize),
    Auxiliary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    pub kind: SymbolKind,
}

impl Symbol {
    pub fn metric(name: impl Into<String>, index: usize) -> Self {
        Symbol {
            name: name.into(),
            kind: SymbolKind::Metric(index),
        }
    }

    pub fn auxiliary(name: impl Into<String>) -> Self {
        Symbol {
            name: name.into(),
            kind: SymbolKind::Auxiliary,
        }
    }
}

/// Homogeneous exterior form with coefficients in `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct Form<S = Rational> {
    degree: usize,
    terms: BTreeMap<Monomial, S>,
}

impl<S: Scalar> Form<S> {
    pub fn zero(degree: usize) -> Self {
        Form {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(s: S) -> Self {
        let mut f = Self::zero(0);
        f.accumulate(0, s);
        f
    }

    /// The generator at symbol position `p`.
    pub fn generator(p: usize) -> Self {
        Self::monomial(1 << p, S::one())
    }

    pub fn monomial(m: Monomial, coeff: S) -> Self {
        let mut f = Self::zero(m.count_ones() as usize);
        f.accumulate(m, coeff);
        f
    }

    /// `coeff · e_{p1} ∧ … ∧ e_{pk}` for positions in any order.
    pub fn product(positions: &[usize], coeff: S) -> Self {
        let sign = sort_sign(positions);
        let mut f = Self::zero(positions.len());
        if sign != 0 {
            f.accumulate(mask_of(positions), signed(&coeff, sign));
        }
        f
    }

    pub fn from_terms(degree: usize, terms: impl IntoIterator<Item = (Monomial, S)>) -> Self {
        let mut f = Self::zero(degree);
        for (m, c) in terms {
            assert_eq!(m.count_ones() as usize, degree, "monomial degree mismatch");
            f.accumulate(m, c);
        }
        f
    }

    fn accumulate(&mut self, m: Monomial, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            Some(old) => {
                let sum = old.add(&c);
                if !sum.is_zero() {
                    self.terms.insert(m, sum);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Monomial, &S)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: Monomial) -> S {
        self.terms.get(&m).cloned().unwrap_or_else(S::zero)
    }

    /// Union of all symbols that occur.
    pub fn support(&self) -> Monomial {
        self.terms.keys().fold(0, |acc, m| acc | m)
    }

    pub fn is_metric(&self) -> bool {
        self.support() & !METRIC_MASK == 0
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.degree, rhs.degree, "adding forms of different degree");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.accumulate(*m, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn scale(&self, q: &Rational) -> Self {
        self.map(|c| c.scale(q))
    }

    pub fn try_scale(&self, s: &S) -> Result<Self> {
        let mut out = Self::zero(self.degree);
        for (m, c) in &self.terms {
            out.accumulate(*m, s.try_mul(c)?);
        }
        Ok(out)
    }

    pub fn map<T: Scalar>(&self, mut f: impl FnMut(&S) -> T) -> Form<T> {
        let mut out = Form::zero(self.degree);
        for (m, c) in &self.terms {
            out.accumulate(*m, f(c));
        }
        out
    }

    pub fn try_wedge(&self, rhs: &Self) -> Result<Self> {
        let mut out = Self::zero(self.degree + rhs.degree);
        if out.degree > MAX_SYMBOLS {
            return Ok(out);
        }
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                let sign = wedge_sign(*a, *b);
                if sign != 0 {
                    out.accumulate(a | b, signed(&x.try_mul(y)?, sign));
                }
            }
        }
        Ok(out)
    }

    /// Contraction with the metric frame vector `E_i` (position `i`) in the
    /// first slot. Auxiliary legs are independent directions and never
    /// contract.
    pub fn interior(&self, i: usize) -> Self {
        assert!(i < DIM, "interior product needs a metric direction");
        let bit = 1 << i;
        let mut out = Self::zero(self.degree.saturating_sub(1));
        for (m, c) in &self.terms {
            if m & bit != 0 {
                let below = (m & (bit - 1)).count_ones();
                out.accumulate(m & !bit, signed(c, if below % 2 == 0 { 1 } else { -1 }));
            }
        }
        out
    }

    /// Value on metric frame vectors given by position.
    pub fn eval(&self, slots: &[usize]) -> S {
        assert_eq!(slots.len(), self.degree, "wrong number of arguments");
        let sign = sort_sign(slots);
        if sign == 0 {
            return S::zero();
        }
        signed(&self.coefficient(mask_of(slots)), sign)
    }

    /// Error unless only metric symbols occur.
    pub fn ensure_metric(&self, coframe: &Coframe<S>, tensor: &'static str) -> Result<()> {
        let aux = self.support() & !METRIC_MASK;
        if aux == 0 {
            Ok(())
        } else {
            Err(Error::SymbolicResidue {
                symbol: coframe.symbol(aux.trailing_zeros() as usize).name.clone(),
                tensor,
            })
        }
    }

    pub fn render(&self, names: &[&str]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let mono = positions_of(*m)
                .iter()
                .map(|&p| names.get(p).copied().unwrap_or("?"))
                .collect::<Vec<_>>()
                .join("^");
            let coeff = c.render();
            let (neg, body) = match coeff.strip_prefix('-') {
                Some(rest) if !rest.contains(' ') => (true, rest.to_string()),
                _ => (false, coeff),
            };
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            match (body.as_str(), mono.is_empty()) {
                (b, true) => out.push_str(b),
                ("1", false) => out.push_str(&mono),
                (b, false) if b.contains(' ') => out.push_str(&format!("({b}) {mono}")),
                (b, false) => out.push_str(&format!("{b} {mono}")),
            }
        }
        out
    }
}

impl<S: Field> Form<S> {
    pub fn wedge(&self, rhs: &Self) -> Self {
        self.try_wedge(rhs).expect("field multiplication is total")
    }

    pub fn mul(&self, s: &S) -> Self {
        self.map(|c| c.mul(s))
    }

    /// Monomial inner product `Σ_I a_I b_I`.
    pub fn dot(&self, rhs: &Self) -> S {
        self.terms
            .iter()
            .filter_map(|(m, c)| rhs.terms.get(m).map(|d| c.mul(d)))
            .fold(S::zero(), |acc, x| acc.add(&x))
    }

    /// Coordinates over the metric monomials of this degree (lexicographic).
    pub fn metric_coordinates(&self) -> Vec<S> {
        metric_monomials(self.degree)
            .iter()
            .map(|m| self.coefficient(*m))
            .collect()
    }

    pub fn from_metric_coordinates(degree: usize, coords: &[S]) -> Self {
        let basis = metric_monomials(degree);
        assert_eq!(basis.len(), coords.len());
        Self::from_terms(degree, basis.into_iter().zip(coords.iter().cloned()))
    }
}

impl<S: Scalar> fmt::Display for Form<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&DEFAULT_NAMES))
    }
}

const DEFAULT_NAMES: [&str; MAX_SYMBOLS] = ["e1", "e2", "e3", "e4", "e5", "x6"];

/// Metric monomials of degree `k`, in lexicographic order of index tuples.
pub fn metric_monomials(k: usize) -> Vec<Monomial> {
    fn rec(start: usize, k: usize, acc: Monomial, out: &mut Vec<Monomial>) {
        if k == 0 {
            out.push(acc);
            return;
        }
        for p in start..DIM {
            rec(p + 1, k - 1, acc | (1 << p), out);
        }
    }
    let mut out = Vec::new();
    if k <= DIM {
        rec(0, k, 0, &mut out);
    }
    out
}

/// Phase functions `f`, `g` with prescribed differentials.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRules<S> {
    pub df: Form<S>,
    pub dg: Form<S>,
}

/// Symbols, exterior derivatives of the generators, orientation and optional
/// phase rules.
#[derive(Debug, Clone, PartialEq)]
pub struct Coframe<S = Rational> {
    symbols: Vec<Symbol>,
    d_table: Vec<Form<S>>,
    orientation: [usize; DIM],
    phases: Option<PhaseRules<S>>,
}

impl<S: Scalar> Coframe<S> {
    /// `symbols` must list `e1..e5` (metric, in index order) followed by
    /// auxiliary symbols; `d_table[p]` is the derivative of symbol `p`;
    /// `orientation` lists metric indices (1-based).
    pub fn new(symbols: Vec<Symbol>, d_table: Vec<Form<S>>, orientation: [usize; DIM]) -> Result<Self> {
        if symbols.len() < DIM || symbols.len() > MAX_SYMBOLS {
            return Err(Error::InvalidCoframe(format!(
                "expected 5 metric symbols and at most {} auxiliary ones, got {} symbols",
                MAX_SYMBOLS - DIM,
                symbols.len()
            )));
        }
        for (p, s) in symbols.iter().enumerate() {
            let ok = match s.kind {
                SymbolKind::Metric(i) => p < DIM && i == p + 1,
                SymbolKind::Auxiliary => p >= DIM,
            };
            if !ok {
                return Err(Error::InvalidCoframe(format!(
                    "symbol `{}` out of place: metric symbols e1..e5 must come first in index order",
                    s.name
                )));
            }
            if symbols[..p].iter().any(|t| t.name == s.name) {
                return Err(Error::InvalidCoframe(format!("duplicate symbol `{}`", s.name)));
            }
        }
        if d_table.len() != symbols.len() {
            return Err(Error::InvalidCoframe(format!(
                "derivative table has {} entries for {} symbols",
                d_table.len(),
                symbols.len()
            )));
        }
        let all = (1u32 << symbols.len()) - 1;
        for (s, d) in symbols.iter().zip(&d_table) {
            if d.degree() != 2 {
                return Err(Error::InvalidCoframe(format!("d{} is not a 2-form", s.name)));
            }
            if d.support() & !all != 0 {
                return Err(Error::InvalidCoframe(format!("d{} uses undeclared symbols", s.name)));
            }
        }
        let mut seen = orientation;
        seen.sort_unstable();
        if seen != [1, 2, 3, 4, 5] {
            return Err(Error::InvalidCoframe(
                "orientation must be a permutation of the metric symbols".into(),
            ));
        }
        Ok(Coframe {
            symbols,
            d_table,
            orientation,
            phases: None,
        })
    }

    /// Coframe `e1..e5` plus the named auxiliary symbols, standard orientation.
    pub fn standard(aux: &[&str], d_table: Vec<Form<S>>) -> Result<Self> {
        let mut symbols: Vec<Symbol> = (1..=DIM).map(|i| Symbol::metric(format!("e{i}"), i)).collect();
        symbols.extend(aux.iter().map(|a| Symbol::auxiliary(*a)));
        Self::new(symbols, d_table, [1, 2, 3, 4, 5])
    }

    pub fn with_phase_rules(mut self, df: Form<S>, dg: Form<S>) -> Result<Self> {
        let all = (1u32 << self.symbols.len()) - 1;
        for (name, f) in [("df", &df), ("dg", &dg)] {
            if f.degree() != 1 || f.support() & !all != 0 {
                return Err(Error::InvalidCoframe(format!(
                    "{name} must be a 1-form in the declared symbols"
                )));
            }
        }
        self.phases = Some(PhaseRules { df, dg });
        Ok(self)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn symbol(&self, p: usize) -> &Symbol {
        &self.symbols[p]
    }

    pub fn names(&self) -> Vec<&str> {
        self.symbols.iter().map(|s| s.name.as_str()).collect()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn aux_positions(&self) -> std::ops::Range<usize> {
        DIM..self.symbols.len()
    }

    pub fn d_of(&self, p: usize) -> &Form<S> {
        &self.d_table[p]
    }

    pub fn d_table(&self) -> &[Form<S>] {
        &self.d_table
    }

    pub fn orientation(&self) -> [usize; DIM] {
        self.orientation
    }

    /// `+1` if the orientation agrees with `e1 ∧ … ∧ e5`.
    pub fn orientation_sign(&self) -> i32 {
        sort_sign(&self.orientation)
    }

    pub fn phase_rules(&self) -> Option<&PhaseRules<S>> {
        self.phases.as_ref()
    }

    pub fn render(&self, f: &Form<S>) -> String {
        f.render(&self.names())
    }

    /// Same coframe with coefficients carried into another ring.
    pub fn map_scalars<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Coframe<T> {
        Coframe {
            symbols: self.symbols.clone(),
            d_table: self.d_table.iter().map(|d| d.map(&f)).collect(),
            orientation: self.orientation,
            phases: self.phases.as_ref().map(|r| PhaseRules {
                df: r.df.map(&f),
                dg: r.dg.map(&f),
            }),
        }
    }

    fn check_symbols(&self, a: &Form<S>) -> Result<()> {
        let all = (1u32 << self.symbols.len()) - 1;
        if a.support() & !all != 0 {
            return Err(Error::InvalidCoframe("form uses symbols outside the coframe".into()));
        }
        Ok(())
    }
}

/// Hodge star for the metric legs, normalized by `e_I ∧ *e_I = ±e12345`
/// with the sign of the coframe orientation.
pub fn hodge<S: Scalar>(a: &Form<S>, c: &Coframe<S>) -> Result<Form<S>> {
    let aux = a.support() & !METRIC_MASK;
    if aux != 0 {
        return Err(Error::UnsupportedSymbol {
            symbol: c.symbol(aux.trailing_zeros() as usize).name.clone(),
            operation: "hodge",
        });
    }
    let orient = c.orientation_sign();
    let mut out = Form::zero(DIM - a.degree());
    for (m, x) in a.terms() {
        let comp = VOLUME & !m;
        out.accumulate(comp, signed(x, wedge_sign(m, comp) * orient));
    }
    Ok(out)
}

pub fn interior<S: Scalar>(i: usize, a: &Form<S>) -> Form<S> {
    a.interior(i)
}

pub fn wedge<S: Field>(a: &Form<S>, b: &Form<S>) -> Form<S> {
    a.wedge(b)
}

/// Exterior derivative from the coframe's derivative table, extended by the
/// graded Leibniz rule; non-constant coefficients are differentiated with the
/// phase rules.
pub fn ext_d<S: Scalar>(a: &Form<S>, c: &Coframe<S>) -> Result<Form<S>> {
    c.check_symbols(a)?;
    let mut out = Form::zero(a.degree() + 1);
    for (m, coeff) in a.terms() {
        let mono = Form::monomial(m, S::one());
        if !coeff.is_constant() {
            let rules = c
                .phase_rules()
                .ok_or_else(|| Error::MissingDerivation(coeff.render()))?;
            let (cf, cg) = coeff.phase_partials();
            out = out.add(&rules.df.try_scale(&cf)?.try_wedge(&mono)?);
            out = out.add(&rules.dg.try_scale(&cg)?.try_wedge(&mono)?);
        }
        // d(e_I) = Σ_l (-1)^(l-1) de_{i_l} ∧ e_{I \ i_l}
        for (l, p) in positions_of(m).into_iter().enumerate() {
            let rest = Form::monomial(m & !(1 << p), S::one());
            let term = c.d_of(p).try_wedge(&rest)?.try_scale(coeff)?;
            out = if l % 2 == 0 { out.add(&term) } else { out.sub(&term) };
        }
    }
    Ok(out)
}

/// Per generator (and per phase differential) the 3-form `d(d x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DSquaredReport<S> {
    pub entries: Vec<(String, Form<S>)>,
}

impl<S: Scalar> DSquaredReport<S> {
    pub fn ok(&self) -> bool {
        self.entries.iter().all(|(_, f)| f.is_zero())
    }

    pub fn failures(&self) -> impl Iterator<Item = &(String, Form<S>)> {
        self.entries.iter().filter(|(_, f)| !f.is_zero())
    }
}

pub fn d_squared_zero<S: Scalar>(c: &Coframe<S>) -> Result<DSquaredReport<S>> {
    let mut entries = Vec::new();
    for (s, d) in c.symbols().iter().zip(c.d_table()) {
        entries.push((s.name.clone(), ext_d(d, c)?));
    }
    if let Some(rules) = c.phase_rules() {
        entries.push(("df".into(), ext_d(&rules.df, c)?));
        entries.push(("dg".into(), ext_d(&rules.dg, c)?));
    }
    Ok(DSquaredReport { entries })
}
