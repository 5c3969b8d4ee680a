//! A small CSL subset.
//!
//! | form                              | meaning                               |
//! |-----------------------------------|---------------------------------------|
//! | `P=?[G[0,T] label]`               | stay inside `label` over `[0, T]`     |
//! | `P=?[F[0,T] label]`               | reach `label` within `[0, T]`         |
//! | `S=?[label]`                      | long-run probability of `label`       |
//! | `R{"up_time"}=?[C<=T]/T`          | expected fraction of `[0, T]` up      |
//! | `filter(forall, P>0 [X label])`   | every reachable state can step into   |
//! | `forall next label`               | `label` (the two are synonyms)        |
//!
//! `T` is a duration such as `730h`, a bare number of seconds, or the letter
//! `T` for the configured mission time. Labels are `up`, `down`,
//! `operational` (alias `oper`), `degraded` and `failed`.

use std::fmt;

use tmrdep_core::composed::StateLabel;
use tmrdep_core::{engine, ComposedCtmc};

use crate::error::{Error, Result};
use crate::units::{format_duration, parse_duration};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Horizon {
    Seconds(f64),
    /// The configured mission time.
    Mission,
}

impl Horizon {
    pub fn resolve(self, mission_time: f64) -> f64 {
        match self {
            Horizon::Seconds(s) => s,
            Horizon::Mission => mission_time,
        }
    }
}

impl fmt::Display for Horizon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Horizon::Seconds(s) => f.write_str(&format_duration(*s)),
            Horizon::Mission => f.write_str("T"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PropertyQuery {
    Reliability { horizon: Horizon, label: StateLabel },
    Reachability { horizon: Horizon, label: StateLabel },
    SteadyState { label: StateLabel },
    Availability { horizon: Horizon },
    Correctness { label: StateLabel },
}

impl fmt::Display for PropertyQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyQuery::Reliability { horizon, label } => {
                write!(f, "P=?[G[0,{horizon}] {}]", label.name())
            }
            PropertyQuery::Reachability { horizon, label } => {
                write!(f, "P=?[F[0,{horizon}] {}]", label.name())
            }
            PropertyQuery::SteadyState { label } => write!(f, "S=?[{}]", label.name()),
            PropertyQuery::Availability { horizon } => {
                write!(f, "R{{\"up_time\"}}=?[C<={horizon}]/{horizon}")
            }
            PropertyQuery::Correctness { label } => {
                write!(f, "filter(forall, P>0 [X {}])", label.name())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PropertyValue {
    Probability(f64),
    Boolean(bool),
}

impl fmt::Display for PropertyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyValue::Probability(p) => write!(f, "{p}"),
            PropertyValue::Boolean(b) => write!(f, "{b}"),
        }
    }
}

/// Evaluates `query` on `chain`; `mission_time` resolves the `T` horizon.
pub fn evaluate(
    query: &PropertyQuery,
    chain: &ComposedCtmc,
    mission_time: f64,
    eps: f64,
) -> tmrdep_core::Result<PropertyValue> {
    let init = chain.initial_distribution();
    Ok(match *query {
        PropertyQuery::Reliability { horizon, label } => PropertyValue::Probability(engine::globally(
            chain.rates(),
            &init,
            &chain.label_mask(label),
            horizon.resolve(mission_time),
            eps,
        )?),
        PropertyQuery::Reachability { horizon, label } => {
            PropertyValue::Probability(engine::eventually(
                chain.rates(),
                &init,
                &chain.label_mask(label),
                horizon.resolve(mission_time),
                eps,
            )?)
        }
        PropertyQuery::SteadyState { label } => {
            PropertyValue::Probability(engine::steady_state_mass(chain, &chain.label_mask(label))?)
        }
        PropertyQuery::Availability { horizon } => {
            PropertyValue::Probability(engine::availability(chain, horizon.resolve(mission_time), eps)?)
        }
        PropertyQuery::Correctness { label } => PropertyValue::Boolean(engine::forall_next(
            chain.rates(),
            chain.initial_state(),
            &chain.label_mask(label),
        )),
    })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    /// Numeric literal with an optional glued unit suffix, e.g. `730h`.
    Number(String),
    Str(String),
    Sym(&'static str),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Number(s) => write!(f, "`{s}`"),
            Tok::Str(s) => write!(f, "\"{s}\""),
            Tok::Sym(s) => write!(f, "`{s}`"),
        }
    }
}

const SYMBOLS: [&str; 18] = [
    "=?", "<=", ">=", "[", "]", "{", "}", "(", ")", ",", "/", "<", ">", "=", "!", "&", "|", "?",
];

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < text.len() {
        let c = text[i..].chars().next().expect("in bounds");
        if c.is_whitespace() {
            i += c.len_utf8();
        } else if c.is_ascii_alphabetic() || c == '_' {
            let end = scan(text, i, |c| c.is_ascii_alphanumeric() || c == '_');
            out.push((i, Tok::Ident(text[i..end].into())));
            i = end;
        } else if c.is_ascii_digit() || c == '.' {
            let mut end = i;
            while end < text.len() {
                let b = bytes[end];
                let exponent = (b == b'e' || b == b'E')
                    && bytes.get(end + 1).is_some_and(|n| n.is_ascii_digit() || *n == b'-' || *n == b'+');
                if b.is_ascii_digit() || b == b'.' {
                    end += 1;
                } else if exponent {
                    end += 2;
                } else {
                    break;
                }
            }
            let end = scan(text, end, |c| c.is_ascii_alphabetic());
            out.push((i, Tok::Number(text[i..end].into())));
            i = end;
        } else if c == '"' {
            let close = text[i + 1..].find('"').ok_or_else(|| Error::PropertySyntax {
                position: i,
                message: "unterminated string".into(),
            })?;
            out.push((i, Tok::Str(text[i + 1..i + 1 + close].into())));
            i += close + 2;
        } else if let Some(sym) = SYMBOLS.iter().find(|s| text[i..].starts_with(**s)) {
            out.push((i, Tok::Sym(sym)));
            i += sym.len();
        } else {
            return Err(Error::PropertySyntax {
                position: i,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

fn scan(text: &str, start: usize, keep: impl Fn(char) -> bool) -> usize {
    text[start..]
        .char_indices()
        .find(|&(_, c)| !keep(c))
        .map_or(text.len(), |(k, _)| start + k)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::PropertySyntax {
            position: self.offset(),
            message: message.into(),
        })
    }

    fn unsupported<T>(&self, construct: impl Into<String>) -> Result<T> {
        Err(Error::Unsupported {
            position: self.offset(),
            construct: construct.into(),
        })
    }

    fn found(&self) -> String {
        self.peek().map_or("end of input".into(), |t| format!("{t}"))
    }

    fn expect_sym(&mut self, sym: &'static str) -> Result<()> {
        if self.peek() == Some(&Tok::Sym(sym)) {
            self.pos += 1;
            Ok(())
        } else {
            self.syntax(format!("expected `{sym}`, found {}", self.found()))
        }
    }

    fn is_ident(&self, name: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == name)
    }

    fn expect_ident(&mut self, name: &str) -> Result<()> {
        if self.is_ident(name) {
            self.pos += 1;
            Ok(())
        } else {
            self.syntax(format!("expected `{name}`, found {}", self.found()))
        }
    }

    fn reject_connective(&self) -> Result<()> {
        if let Some(Tok::Sym(s @ ("!" | "&" | "|"))) = self.peek() {
            return self.unsupported(format!("boolean connective `{s}`"));
        }
        Ok(())
    }

    fn label(&mut self) -> Result<StateLabel> {
        self.reject_connective()?;
        let name = match self.peek() {
            Some(Tok::Ident(s) | Tok::Str(s)) => s.clone(),
            _ => return self.syntax(format!("expected a label, found {}", self.found())),
        };
        match StateLabel::from_name(&name) {
            Some(l) => {
                self.pos += 1;
                Ok(l)
            }
            None => self.syntax(format!(
                "unknown label `{name}` (expected up, down, operational, degraded or failed)"
            )),
        }
    }

    fn horizon(&mut self) -> Result<Horizon> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) if s == "T" => {
                self.pos += 1;
                Ok(Horizon::Mission)
            }
            Some(Tok::Number(n)) => {
                let parsed = if n.ends_with(|c: char| c.is_ascii_digit() || c == '.') {
                    n.parse::<f64>().map_err(|e| e.to_string())
                } else {
                    parse_duration(&n)
                };
                match parsed {
                    Ok(s) if s > 0.0 && s.is_finite() => {
                        self.pos += 1;
                        Ok(Horizon::Seconds(s))
                    }
                    Ok(_) => self.syntax("time bound must be positive"),
                    Err(e) => self.syntax(e),
                }
            }
            _ => self.syntax(format!("expected a time bound, found {}", self.found())),
        }
    }

    /// `[0,T]` after `G` or `F`.
    fn interval(&mut self, op: &str) -> Result<Horizon> {
        if self.peek() != Some(&Tok::Sym("[")) {
            return self.unsupported(format!("unbounded `{op}`"));
        }
        self.pos += 1;
        let lower_at = self.offset();
        match self.next() {
            Some(Tok::Number(n)) if n.parse::<f64>() == Ok(0.0) => {}
            Some(_) => {
                return Err(Error::Unsupported {
                    position: lower_at,
                    construct: "time interval with a nonzero lower bound".into(),
                })
            }
            None => return self.syntax("unexpected end of input"),
        }
        self.expect_sym(",")?;
        let h = self.horizon()?;
        self.expect_sym("]")?;
        Ok(h)
    }

    fn reject_bound(&self, op: &str) -> Result<()> {
        if let Some(Tok::Sym(s @ ("<" | ">" | "<=" | ">=" | "="))) = self.peek() {
            return self.unsupported(format!("{op}{s} bound (only {op}=? queries are supported)"));
        }
        Ok(())
    }

    fn probability(&mut self) -> Result<PropertyQuery> {
        self.expect_ident("P")?;
        self.reject_bound("P")?;
        self.expect_sym("=?")?;
        self.expect_sym("[")?;
        let q = match self.next() {
            Some(Tok::Ident(op)) if op == "G" || op == "F" => {
                let horizon = self.interval(&op)?;
                let label = self.label()?;
                if op == "G" {
                    PropertyQuery::Reliability { horizon, label }
                } else {
                    PropertyQuery::Reachability { horizon, label }
                }
            }
            Some(Tok::Ident(op)) if op == "X" => {
                self.pos -= 1;
                return self.unsupported("next operator `X` outside `filter(forall, P>0 [X ...])`");
            }
            Some(Tok::Ident(_) | Tok::Str(_)) => {
                if self.is_ident("U") {
                    return self.unsupported("until operator `U`");
                }
                self.pos -= 1;
                return self.syntax("expected `G` or `F`");
            }
            _ => {
                self.pos -= 1;
                return self.syntax(format!("expected a path formula, found {}", self.found()));
            }
        };
        if self.is_ident("U") {
            return self.unsupported("until operator `U`");
        }
        self.reject_connective()?;
        self.expect_sym("]")?;
        Ok(q)
    }

    fn steady(&mut self) -> Result<PropertyQuery> {
        self.expect_ident("S")?;
        self.reject_bound("S")?;
        self.expect_sym("=?")?;
        self.expect_sym("[")?;
        let label = self.label()?;
        self.reject_connective()?;
        self.expect_sym("]")?;
        Ok(PropertyQuery::SteadyState { label })
    }

    fn reward(&mut self) -> Result<PropertyQuery> {
        self.expect_ident("R")?;
        self.expect_sym("{")?;
        match self.peek() {
            Some(Tok::Str(s) | Tok::Ident(s)) if s == "up_time" => self.pos += 1,
            Some(Tok::Str(s) | Tok::Ident(s)) => {
                let s = s.clone();
                return self.unsupported(format!("reward structure `{s}` (only \"up_time\")"));
            }
            _ => return self.syntax(format!("expected a reward name, found {}", self.found())),
        }
        self.expect_sym("}")?;
        self.reject_bound("R")?;
        self.expect_sym("=?")?;
        self.expect_sym("[")?;
        match self.peek() {
            Some(Tok::Ident(s)) if s == "C" => self.pos += 1,
            Some(Tok::Ident(s)) if s == "I" || s == "F" || s == "S" => {
                let s = s.clone();
                return self.unsupported(format!("`{s}` reward operator (only cumulative `C<=T`)"));
            }
            _ => return self.syntax(format!("expected `C`, found {}", self.found())),
        }
        self.expect_sym("<=")?;
        let horizon = self.horizon()?;
        self.expect_sym("]")?;
        if self.peek() != Some(&Tok::Sym("/")) {
            return self.unsupported("expected cumulative reward without `/T` normalization");
        }
        self.pos += 1;
        let divisor_at = self.offset();
        let divisor = self.horizon()?;
        let same = match (horizon, divisor) {
            (Horizon::Mission, Horizon::Mission) => true,
            (Horizon::Seconds(a), Horizon::Seconds(b)) => a == b,
            _ => false,
        };
        if !same {
            return Err(Error::PropertySyntax {
                position: divisor_at,
                message: "divisor must equal the cumulative bound".into(),
            });
        }
        Ok(PropertyQuery::Availability { horizon })
    }

    fn filter(&mut self) -> Result<PropertyQuery> {
        self.expect_ident("filter")?;
        self.expect_sym("(")?;
        match self.peek() {
            Some(Tok::Ident(s)) if s == "forall" => self.pos += 1,
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                return self.unsupported(format!("filter operator `{s}` (only forall)"));
            }
            _ => return self.syntax(format!("expected `forall`, found {}", self.found())),
        }
        self.expect_sym(",")?;
        self.expect_ident("P")?;
        self.expect_sym(">")?;
        match self.next() {
            Some(Tok::Number(n)) if n.parse::<f64>() == Ok(0.0) => {}
            _ => {
                self.pos -= 1;
                return self.unsupported("probability bound other than `P>0`");
            }
        }
        self.expect_sym("[")?;
        if !self.is_ident("X") {
            return self.unsupported("path formula other than `X label` inside filter");
        }
        self.pos += 1;
        let label = self.label()?;
        self.reject_connective()?;
        self.expect_sym("]")?;
        self.expect_sym(")")?;
        Ok(PropertyQuery::Correctness { label })
    }

    fn forall_next(&mut self) -> Result<PropertyQuery> {
        self.expect_ident("forall")?;
        self.expect_ident("next")?;
        let label = self.label()?;
        Ok(PropertyQuery::Correctness { label })
    }

    fn query(&mut self) -> Result<PropertyQuery> {
        let q = match self.peek() {
            Some(Tok::Ident(s)) => match s.as_str() {
                "P" => self.probability()?,
                "S" => self.steady()?,
                "R" => self.reward()?,
                "filter" => self.filter()?,
                "forall" => self.forall_next()?,
                "E" | "A" => return self.unsupported(format!("path quantifier `{s}`")),
                _ => return self.syntax(format!("expected a query, found {}", self.found())),
            },
            _ => return self.syntax(format!("expected a query, found {}", self.found())),
        };
        if self.peek().is_some() {
            return self.syntax(format!("unexpected trailing {}", self.found()));
        }
        Ok(q)
    }
}

pub fn parse_property(text: &str) -> Result<PropertyQuery> {
    let toks = lex(text)?;
    Parser {
        toks,
        pos: 0,
        end: text.len(),
    }
    .query()
}
