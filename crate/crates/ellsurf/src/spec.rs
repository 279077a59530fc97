//! Curve spec files: a single JSON document per curve.

use ellsurf_core::funcfield::Place;
use ellsurf_core::gf::{Gf, GfError, Poly};
use ellsurf_core::wmodel::{ModelError, WeierstrassCurve};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Mutex;

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("line {line}, column {column}: {msg}")]
    Json { line: usize, column: usize, msg: String },
    #[error("{field}: {msg}")]
    Field { field: String, msg: String },
    #[error("discriminant vanishes identically (SingularCurve)")]
    SingularCurve,
    #[error("characteristic {0} is not supported (need p >= 5)")]
    UnsupportedCharacteristic(u64),
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
}

impl SpecError {
    fn field(field: impl Into<String>, msg: impl ToString) -> SpecError {
        SpecError::Field { field: field.into(), msg: msg.to_string() }
    }
}

/// A coefficient of `a_i(t)`: an integer, or power-basis coordinates over
/// `F_p` for an extension field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Int(i64),
    List(Vec<i64>),
}

/// `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6` over `F_{p^n}(t)`;
/// polynomials are constant term first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub p: u64,
    #[serde(default = "one")]
    pub n: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
    #[serde(default)]
    pub a1: Vec<Coeff>,
    #[serde(default)]
    pub a2: Vec<Coeff>,
    #[serde(default)]
    pub a3: Vec<Coeff>,
    #[serde(default)]
    pub a4: Vec<Coeff>,
    #[serde(default)]
    pub a6: Vec<Coeff>,
}

fn one() -> u32 {
    1
}

type FieldKey = (u64, u32, Option<Vec<u64>>);

static FIELDS: Mutex<BTreeMap<FieldKey, Gf>> = Mutex::new(BTreeMap::new());

const NAMES: [&str; 5] = ["a1", "a2", "a3", "a4", "a6"];

impl CurveSpec {
    pub fn parse(text: &str) -> Result<CurveSpec, SpecError> {
        serde_json::from_str(text).map_err(|e| SpecError::Json { line: e.line(), column: e.column(), msg: e.to_string() })
    }

    pub fn read(path: &std::path::Path) -> Result<CurveSpec, SpecError> {
        let text = std::fs::read_to_string(path).map_err(|e| SpecError::Io { path: path.display().to_string(), msg: e.to_string() })?;
        CurveSpec::parse(&text)
    }

    /// Compact JSON with a fixed key order. Parsing and re-serializing a
    /// canonical document reproduces it byte for byte.
    pub fn to_canonical(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    /// The short curve `y^2 = x^3 + a4 x + a6` over `F_p`.
    pub fn short(p: u64, a4: &[i64], a6: &[i64]) -> CurveSpec {
        let ints = |c: &[i64]| c.iter().map(|&x| Coeff::Int(x)).collect();
        CurveSpec { p, n: 1, modulus: None, a1: vec![], a2: vec![], a3: vec![], a4: ints(a4), a6: ints(a6) }
    }

    fn coeff_lists(&self) -> [&Vec<Coeff>; 5] {
        [&self.a1, &self.a2, &self.a3, &self.a4, &self.a6]
    }

    /// The coefficient field. Handles are shared per field so that lookup
    /// tables built for one curve serve the next.
    pub fn field(&self) -> Result<Gf, SpecError> {
        if matches!(self.p, 2 | 3) {
            return Err(SpecError::UnsupportedCharacteristic(self.p));
        }
        let key = (self.p, self.n, self.modulus.clone());
        let mut cache = FIELDS.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(f) = cache.get(&key) {
            return Ok(f.clone());
        }
        let f = Gf::new(self.p, self.n, self.modulus.as_deref()).map_err(|e| match e {
            GfError::NotPrime(_) => SpecError::field("p", e),
            GfError::DegreeMismatch { .. } if self.modulus.is_none() => SpecError::field("n", e),
            e => SpecError::field("modulus", e),
        })?;
        cache.insert(key, f.clone());
        Ok(f)
    }

    pub fn curve(&self) -> Result<WeierstrassCurve, SpecError> {
        let f = self.field()?;
        let mut polys = Vec::with_capacity(5);
        for (name, list) in NAMES.iter().zip(self.coeff_lists()) {
            let mut c = Vec::with_capacity(list.len());
            for (i, tok) in list.iter().enumerate() {
                c.push(coeff_value(&f, tok).map_err(|msg| SpecError::field(format!("{}[{}]", name, i), msg))?);
            }
            polys.push(Poly::new(&f, c));
        }
        let a: [Poly; 5] = polys.try_into().expect("five coefficients");
        WeierstrassCurve::from_polys(&f, a).map_err(|e| match e {
            ModelError::SingularCurve => SpecError::SingularCurve,
            ModelError::UnsupportedCharacteristic(p) => SpecError::UnsupportedCharacteristic(p),
            e => SpecError::field("curve", e),
        })
    }

    /// Canonical spec of a polynomial curve: coefficients reduced, trailing
    /// zeros dropped, integers for elements of the prime field and coordinate
    /// lists otherwise.
    pub fn from_curve(e: &WeierstrassCurve) -> Option<CurveSpec> {
        let f = e.field();
        let mut lists = Vec::with_capacity(5);
        for a in e.coeffs() {
            let poly = a.as_poly()?;
            lists.push(poly.coeffs().iter().map(|&c| token(f, c)).collect::<Vec<_>>());
        }
        let [a1, a2, a3, a4, a6]: [Vec<Coeff>; 5] = lists.try_into().ok()?;
        let canonical = Gf::new(f.characteristic(), f.degree(), None).ok()?;
        let modulus = (f.degree() > 1 && canonical.modulus() != f.modulus()).then(|| f.modulus().to_vec());
        Some(CurveSpec { p: f.characteristic(), n: f.degree(), modulus, a1, a2, a3, a4, a6 })
    }
}

fn coeff_value(f: &Gf, tok: &Coeff) -> Result<u64, String> {
    match tok {
        Coeff::Int(c) => Ok(f.from_int(*c)),
        Coeff::List(d) => {
            if d.len() > f.degree() as usize {
                return Err(format!("coefficient list has {} entries, field degree is {}", d.len(), f.degree()));
            }
            let digits: Vec<u64> = d.iter().map(|&c| f.from_int(c)).collect();
            f.from_digits(&digits).map_err(|e| e.to_string())
        }
    }
}

fn token(f: &Gf, c: u64) -> Coeff {
    let mut d: Vec<i64> = f.digits(c).into_iter().map(|x| x as i64).collect();
    while d.last() == Some(&0) {
        d.pop();
    }
    if d.len() <= 1 {
        Coeff::Int(d.first().copied().unwrap_or(0))
    } else {
        Coeff::List(d)
    }
}

/// Parse a place: `inf`, or a monic irreducible polynomial in `t` written as
/// in place labels (`t`, `t+2`, `t^2+t+2`, `[1,2]*t+3`).
pub fn parse_place(f: &Gf, s: &str) -> Result<Place, SpecError> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s == "inf" || s == "infinity" {
        return Ok(Place::Infinity);
    }
    let bad = |msg: &str| SpecError::field(format!("place '{}'", s), msg);
    let mut coeffs: Vec<u64> = Vec::new();
    for (sign, term) in split_terms(&s) {
        if term.is_empty() {
            return Err(bad("empty term"));
        }
        let (c, k) = parse_term(f, term).ok_or_else(|| bad("cannot parse term"))?;
        if coeffs.len() <= k {
            coeffs.resize(k + 1, 0);
        }
        let c = if sign < 0 { f.neg(c) } else { c };
        coeffs[k] = f.add(coeffs[k], c);
    }
    let pi = Poly::new(f, coeffs);
    if pi.degree().unwrap_or(0) == 0 {
        return Err(bad("not a place: constant polynomial"));
    }
    if !pi.is_monic() {
        return Err(bad("polynomial is not monic"));
    }
    if !pi.is_irreducible() {
        return Err(bad("polynomial is reducible"));
    }
    Ok(Place::finite(pi))
}

// splits on +/- outside brackets
fn split_terms(s: &str) -> Vec<(i32, &str)> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut start = 0;
    let mut sign = 1;
    for (i, ch) in s.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            '+' | '-' if depth == 0 => {
                if i > start {
                    out.push((sign, &s[start..i]));
                } else if i > 0 {
                    out.push((sign, ""));
                }
                sign = if ch == '-' { -1 } else { 1 };
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push((sign, &s[start..]));
    out
}

fn parse_term(f: &Gf, term: &str) -> Option<(u64, usize)> {
    let (coef, mono) = match term.find('t') {
        None => return Some((parse_coeff(f, term)?, 0)),
        Some(i) => (term[..i].strip_suffix('*').unwrap_or(&term[..i]), &term[i..]),
    };
    let c = if coef.is_empty() { f.one() } else { parse_coeff(f, coef)? };
    let k = match mono.strip_prefix('t')? {
        "" => 1,
        rest => rest.strip_prefix('^')?.parse().ok()?,
    };
    Some((c, k))
}

fn parse_coeff(f: &Gf, s: &str) -> Option<u64> {
    if let Some(body) = s.strip_prefix('[').and_then(|b| b.strip_suffix(']')) {
        let d: Option<Vec<i64>> = body.split(',').map(|x| x.parse().ok()).collect();
        coeff_value(f, &Coeff::List(d?)).ok()
    } else {
        Some(f.from_int(s.parse().ok()?))
    }
}
