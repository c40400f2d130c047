//! Classification reports: built once, rendered as JSON or text.

use acm5_core::connection::{curvature, torsion_type};
use acm5_core::exterior::DIM;
use acm5_core::linalg::Matrix;
use acm5_core::scalar::{Rational, Scalar};
use acm5_core::spinor::{Gaussian, SpinorSpace};
use acm5_core::{Coframe, Form, Geometry, Tensor3, WModule, WSubspaces};
use serde::{Deserialize, Serialize};

/// How numbers are written: exact `p/q` strings or decimal approximations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Numbers {
    Exact,
    Float,
}

struct Fmt<'a> {
    names: Vec<&'a str>,
    numbers: Numbers,
}

impl Fmt<'_> {
    fn num(&self, q: &Rational) -> String {
        match self.numbers {
            Numbers::Exact => q.render(),
            Numbers::Float => f64::from_rational(q).render(),
        }
    }

    fn form(&self, f: &Form) -> String {
        match self.numbers {
            Numbers::Exact => f.render(&self.names),
            Numbers::Float => f.map(f64::from_rational).render(&self.names),
        }
    }

    /// Slot forms `T(e_k, ., .)` of a tensor, zero slots omitted.
    fn slots(&self, t: &Tensor3<Rational>, label: &str) -> Vec<Entry> {
        (0..DIM)
            .filter_map(|k| {
                let f = t.slot(k);
                (!f.is_zero()).then(|| Entry {
                    name: format!("{label}({})", self.names[k]),
                    value: self.form(&f),
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub name: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub numbers: String,
    pub symbols: Vec<String>,
    pub intrinsic_torsion: TorsionSection,
    pub class: ClassSection,
    pub predicates: Vec<Flag>,
    pub characteristic_connection: Option<CharacteristicSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorsionSection {
    pub norm2: String,
    pub components: Vec<Entry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSection {
    pub norms: Vec<Entry>,
    pub residual: String,
    pub strict: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flag {
    pub name: String,
    pub value: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicSection {
    pub torsion_type: String,
    pub torsion: Vec<Entry>,
    pub cartan_norms: Vec<Entry>,
    pub curvature: Vec<Entry>,
    pub ricci: Vec<Vec<String>>,
    pub holonomy_dim: usize,
    pub holonomy_basis: Vec<String>,
    pub spinors: SpinorSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinorSection {
    /// Spinors killed by the Clifford action of every holonomy generator.
    pub holonomy_invariant: usize,
    /// Constant spinors with `σ(ω^c) ψ = 0` on every leg.
    pub parallel: usize,
}

pub const NOT_GQS_NOTE: &str = "characteristic connection omitted: the structure is not generalized quasi-Sasaki";

fn common_kernel(mats: &[Matrix<Gaussian>]) -> usize {
    if mats.is_empty() {
        return 4;
    }
    let rows: Vec<Vec<Gaussian>> = mats.iter().flat_map(|m| (0..m.rows()).map(|i| m.row(i).to_vec())).collect();
    Matrix::from_rows(&rows).nullspace().len()
}

pub fn build(coframe: &Coframe, numbers: Numbers) -> acm5_core::Result<Report> {
    let fmt = Fmt {
        names: coframe.names(),
        numbers,
    };
    let geometry = Geometry::from_coframe(coframe.clone())?;
    let gamma = geometry.intrinsic_torsion()?;
    let w = WSubspaces::<Rational>::new();
    let class = w.classify(&gamma);
    let predicates = geometry.predicates()?;

    let intrinsic_torsion = TorsionSection {
        norm2: fmt.num(&gamma.norm2()),
        components: fmt.slots(gamma.tensor(), "Gamma"),
    };
    let class_section = ClassSection {
        norms: WModule::ALL
            .iter()
            .map(|&m| Entry {
                name: m.label().to_string(),
                value: fmt.num(class.norm(m)),
            })
            .collect(),
        residual: fmt.num(&class.residual),
        strict: class.strict_class(),
    };
    let flags = predicates
        .named()
        .into_iter()
        .map(|(name, value)| Flag {
            name: name.to_string(),
            value,
        })
        .collect();

    let (characteristic_connection, note) = if predicates.generalized_quasi_sasaki {
        let cc = geometry.characteristic_connection()?;
        let (parts, tag) = torsion_type(&cc);
        let cd = curvature(coframe, &cc.omega_c)?;
        let spin = SpinorSpace::new()?;
        let hol: Vec<_> = cd
            .holonomy_basis
            .iter()
            .map(|h| spin.clifford_action(h))
            .collect::<acm5_core::Result<_>>()?;
        let section = CharacteristicSection {
            torsion_type: tag.tag().to_string(),
            torsion: fmt.slots(&cc.torsion, "T"),
            cartan_norms: [("vectorial", &parts.vectorial), ("skew", &parts.skew), ("cyclic", &parts.cyclic)]
                .into_iter()
                .map(|(name, t)| Entry {
                    name: name.to_string(),
                    value: fmt.num(&t.norm2()),
                })
                .collect(),
            curvature: cd
                .support()
                .into_iter()
                .map(|(i, j)| Entry {
                    name: format!("R{}{}", i + 1, j + 1),
                    value: fmt.form(cd.get(i, j)),
                })
                .collect(),
            ricci: (0..DIM)
                .map(|a| (0..DIM).map(|b| fmt.num(cd.ricci.get(a, b))).collect())
                .collect(),
            holonomy_dim: cd.holonomy_basis.len(),
            holonomy_basis: cd.holonomy_basis.iter().map(|h| fmt.form(h)).collect(),
            spinors: SpinorSection {
                holonomy_invariant: common_kernel(&hol),
                parallel: common_kernel(&spin.spin_lift(&cc.omega_c, coframe.len())),
            },
        };
        (Some(section), None)
    } else {
        (None, Some(NOT_GQS_NOTE.to_string()))
    };

    Ok(Report {
        numbers: match numbers {
            Numbers::Exact => "exact".into(),
            Numbers::Float => "float".into(),
        },
        symbols: fmt.names.iter().map(|s| s.to_string()).collect(),
        intrinsic_torsion,
        class: class_section,
        predicates: flags,
        characteristic_connection,
        note,
    })
}

pub struct Style {
    pub color: bool,
}

impl Style {
    /// `ACM5_COLOR=1|always|true` turns on ANSI colour.
    pub fn from_env() -> Self {
        let color = std::env::var("ACM5_COLOR")
            .map(|v| matches!(v.to_ascii_lowercase().as_str(), "1" | "always" | "true" | "yes"))
            .unwrap_or(false);
        Style { color }
    }

    pub fn heading(&self, s: &str) -> String {
        if self.color {
            format!("\x1b[1m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    }

    pub fn verdict(&self, ok: bool) -> String {
        let (word, code) = if ok { ("PASS", 32) } else { ("FAIL", 31) };
        if self.color {
            format!("\x1b[{code}m{word}\x1b[0m")
        } else {
            word.to_string()
        }
    }

    fn flag(&self, v: bool) -> String {
        if self.color {
            format!("\x1b[{}m{v}\x1b[0m", if v { 32 } else { 90 })
        } else {
            v.to_string()
        }
    }
}

pub fn render_text(r: &Report, style: &Style) -> String {
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    line(format!("symbols: {} (numbers: {})", r.symbols.join(", "), r.numbers));
    line(String::new());
    line(style.heading("intrinsic torsion"));
    line(format!("  |Gamma|^2 = {}", r.intrinsic_torsion.norm2));
    for e in &r.intrinsic_torsion.components {
        line(format!("  {} = {}", e.name, e.value));
    }
    line(String::new());
    line(style.heading("class"));
    line(format!("  strict: {}", r.class.strict));
    for e in &r.class.norms {
        line(format!("  |{}|^2 = {}", e.name, e.value));
    }
    line(format!("  residual = {}", r.class.residual));
    line(String::new());
    line(style.heading("structure predicates"));
    for f in &r.predicates {
        line(format!("  {}: {}", f.name, style.flag(f.value)));
    }
    line(String::new());
    line(style.heading("characteristic connection"));
    match &r.characteristic_connection {
        None => line(format!("  {}", r.note.as_deref().unwrap_or(""))),
        Some(c) => {
            line(format!("  torsion type: {}", c.torsion_type));
            for e in &c.torsion {
                line(format!("  {} = {}", e.name, e.value));
            }
            for e in &c.cartan_norms {
                line(format!("  |{} part|^2 = {}", e.name, e.value));
            }
            if c.curvature.is_empty() {
                line("  curvature: flat".into());
            }
            for e in &c.curvature {
                line(format!("  {} = {}", e.name, e.value));
            }
            line("  Ricci:".into());
            for row in &c.ricci {
                line(format!("    [{}]", row.join(", ")));
            }
            line(format!("  holonomy algebra: dim {}", c.holonomy_dim));
            for h in &c.holonomy_basis {
                line(format!("    {h}"));
            }
            line(format!(
                "  spinors: {} holonomy-invariant, {} parallel",
                c.spinors.holonomy_invariant, c.spinors.parallel
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use acm5_core::family::structure_equations;
    use acm5_core::scalar::rat;

    #[test]
    fn json_round_trip() {
        for a in [[1, 0, 0, 0], [0, 0, 3, 4], [1, 0, 2, 0]] {
            let c = structure_equations(&a.map(|x| rat(x, 1)));
            let r = build(&c, Numbers::Exact).unwrap();
            let text = serde_json::to_string(&r).unwrap();
            let back: Report = serde_json::from_str(&text).unwrap();
            assert_eq!(back, r);
            assert_eq!(serde_json::to_string(&back).unwrap(), text);
        }
    }

    #[test]
    fn non_gqs_reports_carry_a_note() {
        let mut d = vec![Form::zero(2); DIM];
        d[2] = Form::product(&[0, 1], rat(1, 1));
        let c = Coframe::standard(&[], d).unwrap();
        let r = build(&c, Numbers::Exact).unwrap();
        assert!(r.characteristic_connection.is_none());
        assert_eq!(r.note.as_deref(), Some(NOT_GQS_NOTE));
        assert!(render_text(&r, &Style { color: false }).contains(NOT_GQS_NOTE));
    }
}
