//! JSON coframe files: `{"symbols": [...], "d": {...}, "orientation": [...], "trig": {...}}`.

use std::collections::BTreeMap;

use acm5_core::exterior::{positions_of, Monomial, PhaseRules};
use acm5_core::scalar::{parse_rational, Rational, Scalar};
use acm5_core::{Coframe, Form, Symbol, SymbolKind};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoframeFile {
    pub symbols: Vec<SymbolEntry>,
    pub d: BTreeMap<String, Vec<Term>>,
    pub orientation: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trig: Option<TrigEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolEntry {
    pub name: String,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Metric,
    Auxiliary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub coeff: Coeff,
    pub wedge: Vec<String>,
}

/// `"p/q"` or a bare integer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Int(i64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigEntry {
    pub df: Vec<Term>,
    pub dg: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FileError {
    /// Malformed JSON, with 1-based position.
    Parse { line: usize, column: usize, message: String },
    Schema(String),
}

impl std::fmt::Display for FileError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FileError::Parse { line, column, message } => {
                write!(f, "parse error at line {line}, column {column}: {message}")
            }
            FileError::Schema(m) => write!(f, "schema error: {m}"),
        }
    }
}

fn schema(msg: impl Into<String>) -> FileError {
    FileError::Schema(msg.into())
}

pub fn parse(text: &str) -> Result<CoframeFile, FileError> {
    serde_json::from_str(text).map_err(|e| {
        let message = e.to_string();
        // serde_json appends " at line L column C"; keep only the reason
        let message = match message.rfind(" at line ") {
            Some(k) => message[..k].to_string(),
            None => message,
        };
        if e.is_data() {
            FileError::Schema(format!("{message} (line {}, column {})", e.line(), e.column()))
        } else {
            FileError::Parse {
                line: e.line(),
                column: e.column(),
                message,
            }
        }
    })
}

impl CoframeFile {
    /// Schema checks plus conversion to a [`Coframe`].
    pub fn to_coframe(&self) -> Result<Coframe, FileError> {
        let mut symbols = Vec::new();
        for (p, s) in self.symbols.iter().enumerate() {
            if s.name.is_empty() || s.name.chars().any(|c| c.is_whitespace() || c == '^') {
                return Err(schema(format!("symbols[{p}]: invalid name `{}`", s.name)));
            }
            match (s.kind, s.index) {
                (Kind::Metric, Some(i)) => {
                    if i != p + 1 {
                        return Err(schema(format!(
                            "symbols[{p}]: metric symbols must be listed first with indices 1..5 in order (`{}` has index {i})",
                            s.name
                        )));
                    }
                    symbols.push(Symbol::metric(s.name.clone(), i));
                }
                (Kind::Metric, None) => return Err(schema(format!("symbols[{p}]: metric symbol `{}` needs an index", s.name))),
                (Kind::Auxiliary, Some(_)) => {
                    return Err(schema(format!("symbols[{p}]: auxiliary symbol `{}` takes no index", s.name)))
                }
                (Kind::Auxiliary, None) => symbols.push(Symbol::auxiliary(s.name.clone())),
            }
        }
        let position = |name: &str| symbols.iter().position(|s| s.name == name);

        for key in self.d.keys() {
            if position(key).is_none() {
                return Err(schema(format!("d: unknown symbol `{key}`")));
            }
        }
        let mut table = Vec::new();
        for s in &symbols {
            let terms = self
                .d
                .get(&s.name)
                .ok_or_else(|| schema(format!("d: missing entry for `{}`", s.name)))?;
            table.push(form_of(terms, 2, &format!("d.{}", s.name), &position)?);
        }

        let mut orientation = [0usize; 5];
        if self.orientation.len() != 5 {
            return Err(schema("orientation must list the five metric symbols"));
        }
        for (k, name) in self.orientation.iter().enumerate() {
            match position(name).map(|p| &symbols[p].kind) {
                Some(SymbolKind::Metric(i)) => orientation[k] = *i,
                Some(SymbolKind::Auxiliary) => return Err(schema(format!("orientation: `{name}` is auxiliary"))),
                None => return Err(schema(format!("orientation: unknown symbol `{name}`"))),
            }
        }

        let coframe = Coframe::new(symbols.clone(), table, orientation).map_err(|e| schema(e.to_string()))?;
        match &self.trig {
            None => Ok(coframe),
            Some(t) => {
                let df = form_of(&t.df, 1, "trig.df", &position)?;
                let dg = form_of(&t.dg, 1, "trig.dg", &position)?;
                coframe.with_phase_rules(df, dg).map_err(|e| schema(e.to_string()))
            }
        }
    }

    pub fn from_coframe(c: &Coframe) -> Self {
        let names: Vec<&str> = c.names();
        let symbols = c
            .symbols()
            .iter()
            .map(|s| SymbolEntry {
                name: s.name.clone(),
                kind: match s.kind {
                    SymbolKind::Metric(_) => Kind::Metric,
                    SymbolKind::Auxiliary => Kind::Auxiliary,
                },
                index: match s.kind {
                    SymbolKind::Metric(i) => Some(i),
                    SymbolKind::Auxiliary => None,
                },
            })
            .collect();
        let d = c
            .symbols()
            .iter()
            .zip(c.d_table())
            .map(|(s, f)| (s.name.clone(), terms_of(f, &names)))
            .collect();
        let orientation = c.orientation().iter().map(|&i| names[i - 1].to_string()).collect();
        let trig = c.phase_rules().map(|PhaseRules { df, dg }| TrigEntry {
            df: terms_of(df, &names),
            dg: terms_of(dg, &names),
        });
        CoframeFile {
            symbols,
            d,
            orientation,
            trig,
        }
    }
}

fn coefficient(c: &Coeff, at: &str) -> Result<Rational, FileError> {
    match c {
        Coeff::Int(n) => Ok(Rational::from_integer((*n).into())),
        Coeff::Text(s) => parse_rational(s).map_err(|e| schema(format!("{at}: {e}"))),
    }
}

fn form_of(
    terms: &[Term],
    degree: usize,
    at: &str,
    position: &dyn Fn(&str) -> Option<usize>,
) -> Result<Form, FileError> {
    let mut seen: Vec<Monomial> = Vec::new();
    let mut out = Vec::new();
    for (k, t) in terms.iter().enumerate() {
        let here = format!("{at}[{k}]");
        if t.wedge.len() != degree {
            return Err(schema(format!("{here}: expected {degree} factors, got {}", t.wedge.len())));
        }
        let mut mask: Monomial = 0;
        let mut last = None;
        for name in &t.wedge {
            let p = position(name).ok_or_else(|| schema(format!("{here}: unknown symbol `{name}`")))?;
            if last.is_some_and(|l| p <= l) {
                return Err(schema(format!("{here}: wedge list must be strictly increasing in symbol order")));
            }
            last = Some(p);
            mask |= 1 << p;
        }
        if seen.contains(&mask) {
            return Err(schema(format!("{here}: repeated monomial {}", t.wedge.join("^"))));
        }
        seen.push(mask);
        out.push((mask, coefficient(&t.coeff, &here)?));
    }
    Ok(Form::from_terms(degree, out))
}

fn terms_of(f: &Form, names: &[&str]) -> Vec<Term> {
    f.terms()
        .map(|(m, c)| Term {
            coeff: Coeff::Text(c.render()),
            wedge: positions_of(m).iter().map(|&p| names[p].to_string()).collect(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use acm5_core::family::structure_equations;
    use acm5_core::scalar::rat;

    fn family(a: [i64; 4]) -> Coframe {
        structure_equations(&a.map(|x| rat(x, 1)))
    }

    #[test]
    fn round_trip() {
        let c = family([1, 0, 2, 0]);
        let file = CoframeFile::from_coframe(&c);
        let text = serde_json::to_string_pretty(&file).unwrap();
        let back = parse(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_coframe().unwrap(), c);
    }

    #[test]
    fn truncated_json_reports_position() {
        let text = serde_json::to_string_pretty(&CoframeFile::from_coframe(&family([1, 0, 0, 0]))).unwrap();
        let cut = &text[..text.len() / 2];
        match parse(cut) {
            Err(FileError::Parse { line, .. }) => assert!(line > 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn schema_violations() {
        let base = CoframeFile::from_coframe(&family([1, 0, 0, 0]));

        let mut f = base.clone();
        f.d.get_mut("e1").unwrap()[0].wedge = vec!["e5".into(), "e3".into()];
        assert!(matches!(f.to_coframe(), Err(FileError::Schema(m)) if m.contains("strictly increasing")));

        let mut f = base.clone();
        f.d.get_mut("e1").unwrap()[0].wedge[0] = "e9".into();
        assert!(matches!(f.to_coframe(), Err(FileError::Schema(m)) if m.contains("unknown symbol `e9`")));

        let mut f = base.clone();
        f.d.get_mut("e1").unwrap()[0].coeff = Coeff::Text("2/4".into());
        assert!(matches!(f.to_coframe(), Err(FileError::Schema(m)) if m.contains("lowest terms")));

        let mut f = base.clone();
        f.d.get_mut("e2").unwrap()[0].coeff = Coeff::Int(-3);
        assert!(f.to_coframe().is_ok());

        let mut f = base.clone();
        f.d.remove("A2");
        assert!(matches!(f.to_coframe(), Err(FileError::Schema(m)) if m.contains("missing entry")));

        let mut f = base;
        f.orientation[0] = "A2".into();
        assert!(matches!(f.to_coframe(), Err(FileError::Schema(m)) if m.contains("auxiliary")));
    }

    #[test]
    fn unknown_fields_are_schema_errors() {
        let text = r#"{"symbols": [], "d": {}, "orientation": [], "extra": 1}"#;
        assert!(matches!(parse(text), Err(FileError::Schema(_))));
    }
}
