//! Document formats, the bundled corpus, and report emission.
//!
//! Documents are TOML with a `format = "legsurg-<kind>/1"` tag.  Coefficients
//! are exact rationals written as strings (`"-3/2"`); floating point is never
//! accepted.  Parsing returns either a validated value or a list of schema
//! errors carrying line and column positions.  Emission is canonical:
//! `emit(parse(emit(x))) == emit(x)` byte for byte.

use std::collections::{BTreeMap, HashSet};
use std::fmt::{self, Write as _};
use std::ops::Range;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::Spanned;

use crate::algebra::{format_rational, parse_rational, Alphabet, Element, GenId, Generator, Word, Q};
use crate::dga::{Augmentation, Dga, DgaMorphism, ValidationReport};
use crate::homology::{betti, BettiTable, GradedChainComplex, Guard, HomologyError};
use crate::lefschetz::{AinfConstant, DirectedAinfSpec, IntersectionPoint, Morph};
use crate::surgery::{Count, FillingModel, Orbit, SurgeryCountTable};

pub const DGA_FORMAT: &str = "legsurg-dga/1";
pub const FILLING_FORMAT: &str = "legsurg-filling/1";
pub const COUNTS_FORMAT: &str = "legsurg-counts/1";
pub const AINF_FORMAT: &str = "legsurg-ainf/1";
pub const MORPHISM_FORMAT: &str = "legsurg-morphism/1";
pub const AUGMENTATION_FORMAT: &str = "legsurg-augmentation/1";

/// One problem in a document.  `line == 0` means the whole document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
        }
    }
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
    #[error("{}", join_errors(.0))]
    Schema(Vec<SchemaError>),
    #[error("unknown example `{0}` (see `examples list`)")]
    UnknownExample(String),
    #[error("example `{name}` is a {found} document, expected {expected}")]
    WrongKind { name: String, found: String, expected: String },
    #[error("malformed report: {0}")]
    Report(String),
}

impl IoError {
    pub fn errors(&self) -> &[SchemaError] {
        match self {
            IoError::Schema(v) => v,
            _ => &[],
        }
    }
}

fn join_errors(v: &[SchemaError]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
}

/// Byte offsets to line/column positions.
struct Source<'a> {
    text: &'a str,
    errors: Vec<SchemaError>,
}

impl<'a> Source<'a> {
    fn new(text: &'a str) -> Self {
        Source { text, errors: Vec::new() }
    }
    fn position(&self, offset: usize) -> (usize, usize) {
        let before = &self.text[..offset.min(self.text.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, column)
    }
    fn error_at(&mut self, span: Range<usize>, message: impl Into<String>) {
        let (line, column) = self.position(span.start);
        self.errors.push(SchemaError { line, column, message: message.into() });
    }
    fn error(&mut self, message: impl Into<String>) {
        self.errors.push(SchemaError { line: 0, column: 0, message: message.into() });
    }
    fn finish<T>(self, value: T) -> Result<T, IoError> {
        if self.errors.is_empty() {
            Ok(value)
        } else {
            Err(IoError::Schema(self.errors))
        }
    }
    fn deserialize<T: for<'de> Deserialize<'de>>(&self) -> Result<T, IoError> {
        toml::from_str(self.text).map_err(|e| {
            let (line, column) = e.span().map_or((0, 0), |s| self.position(s.start));
            IoError::Schema(vec![SchemaError { line, column, message: e.message().trim().to_string() }])
        })
    }
    fn check_format(&mut self, found: &Spanned<String>, expected: &str) {
        if found.get_ref() != expected {
            self.error_at(found.span(), format!("format `{}` is not supported, expected `{expected}`", found.get_ref()));
        }
    }
    fn rational(&mut self, s: &Spanned<String>) -> Option<Q> {
        match parse_rational(s.get_ref()) {
            Ok(q) => Some(q),
            Err(_) => {
                self.error_at(s.span(), format!("`{}` is not an exact rational (write p/q)", s.get_ref()));
                None
            }
        }
    }
}

/// An integer, or a linear expression in the dimension parameter `n`
/// (`"n"`, `"n-1"`, `"2n+3"`).
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum Param {
    Int(i64),
    Expr(String),
}

/// `a n + b` from a linear expression in `n`.
fn linear_in_n(s: &str) -> Option<(i64, i64)> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).map(|c| if c == '\u{2212}' { '-' } else { c }).collect();
    if t.is_empty() {
        return None;
    }
    let (mut a, mut b) = (0i64, 0i64);
    let bytes = t.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let mut sign = 1;
        if bytes[i] == b'+' || bytes[i] == b'-' {
            sign = if bytes[i] == b'-' { -1 } else { 1 };
            i += 1;
        } else if i > 0 {
            return None;
        }
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let digits = &t[start..i];
        let has_n = if bytes.get(i) == Some(&b'n') {
            i += 1;
            true
        } else if bytes.get(i) == Some(&b'*') && bytes.get(i + 1) == Some(&b'n') && !digits.is_empty() {
            i += 2;
            true
        } else {
            false
        };
        if has_n {
            let k: i64 = if digits.is_empty() { 1 } else { digits.parse().ok()? };
            a += sign * k;
        } else {
            if digits.is_empty() {
                return None;
            }
            b += sign * digits.parse::<i64>().ok()?;
        }
    }
    Some((a, b))
}

impl Source<'_> {
    fn param(&mut self, p: &Spanned<Param>, n: Option<i64>, what: &str) -> Option<i64> {
        match p.get_ref() {
            Param::Int(v) => Some(*v),
            Param::Expr(s) => match linear_in_n(s) {
                None => {
                    self.error_at(p.span(), format!("{what} `{s}` is neither an integer nor a linear expression in n"));
                    None
                }
                Some((0, b)) => Some(b),
                Some((a, b)) => match n {
                    Some(n) => Some(a * n + b),
                    None => {
                        self.error_at(p.span(), format!("{what} `{s}` depends on n: supply the dimension"));
                        None
                    }
                },
            },
        }
    }
}

/// `"p/q"` or a plain TOML string, quoted for emission.
fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

fn key(s: &str) -> String {
    if !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        s.to_string()
    } else {
        quote(s)
    }
}

fn string_list(v: &[String]) -> String {
    format!("[{}]", v.iter().map(|s| quote(s)).collect::<Vec<_>>().join(", "))
}

// ---------------------------------------------------------------- DGA ----

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDga {
    format: Spanned<String>,
    field: Option<Spanned<String>>,
    components: Spanned<usize>,
    ambient_dim: Spanned<Param>,
    #[serde(default)]
    unknown: Vec<Spanned<String>>,
    #[serde(default)]
    generators: Vec<RawGenerator>,
    #[serde(default)]
    differential: BTreeMap<String, Spanned<Vec<RawTerm>>>,
    #[serde(default)]
    metadata: Metadata,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGenerator {
    name: Spanned<String>,
    grading: Spanned<Param>,
    src: Spanned<usize>,
    dst: Spanned<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    coeff: Spanned<String>,
    word: Spanned<RawWord>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum RawWord {
    Unit(String),
    Letters(Vec<String>),
}

/// Free-form provenance carried along with a document.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default)]
    pub notes: Vec<String>,
    #[serde(default)]
    pub sign_provenance: Option<SignProvenance>,
}

/// The sign choice made for a DGA known only up to signs, and what fixed it.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignProvenance {
    pub choice: String,
    #[serde(default)]
    pub constraints: Vec<String>,
}

/// A parsed DGA document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgaDocument {
    pub dga: Dga,
    pub metadata: Metadata,
}

impl Source<'_> {
    /// Resolve a list of terms against an alphabet: the words must be known,
    /// composable, run from `src` to `dst`, and have the given grading.
    #[allow(clippy::too_many_arguments)]
    fn terms(
        &mut self,
        alpha: &Alphabet,
        terms: &Spanned<Vec<RawTerm>>,
        owner: &str,
        src: usize,
        dst: usize,
        grading: i64,
    ) -> Element {
        let mut out = Element::zero();
        for t in terms.get_ref() {
            let Some(c) = self.rational(&t.coeff) else { continue };
            let word = match t.word.get_ref() {
                RawWord::Unit(s) => {
                    let comp = s.strip_prefix("e_").and_then(|i| i.parse::<usize>().ok());
                    match comp {
                        Some(i) if (1..=alpha.components()).contains(&i) => Word::Unit(i),
                        _ => {
                            self.error_at(t.word.span(), format!("`{s}` is not an idempotent e_1..e_{}", alpha.components()));
                            continue;
                        }
                    }
                }
                RawWord::Letters(names) if names.is_empty() => {
                    self.error_at(t.word.span(), "empty word: write the idempotent as \"e_i\"");
                    continue;
                }
                RawWord::Letters(names) => {
                    let mut ids = Vec::new();
                    for name in names {
                        match alpha.id(name) {
                            Ok(id) => ids.push(id),
                            Err(_) => self.error_at(t.word.span(), format!("unknown generator `{name}` in {owner}")),
                        }
                    }
                    if ids.len() != names.len() {
                        continue;
                    }
                    Word::Path(ids)
                }
            };
            let ends_ok = match &word {
                Word::Unit(i) => *i == src && *i == dst,
                Word::Path(p) => alpha.is_composable(p) && alpha.end_of(&word) == dst && alpha.origin_of(&word) == src,
            };
            if !ends_ok {
                self.error_at(t.word.span(), format!("`{}` in {owner} is not a path from {src} to {dst}", alpha.display_word(&word)));
                continue;
            }
            let g = alpha.grading_of(&word);
            if g != grading {
                self.error_at(t.word.span(), format!("`{}` in {owner} has grading {g}, expected {grading}", alpha.display_word(&word)));
                continue;
            }
            out.add_term(word, c);
        }
        out
    }
}

/// Parse a DGA document.  `n` resolves gradings written in terms of the
/// dimension parameter.
pub fn parse_dga(text: &str, n: Option<i64>) -> Result<DgaDocument, IoError> {
    let mut src = Source::new(text);
    let raw: RawDga = src.deserialize()?;
    src.check_format(&raw.format, DGA_FORMAT);
    if let Some(f) = &raw.field {
        if f.get_ref() != "Q" {
            src.error_at(f.span(), format!("field `{}` is not supported (only Q)", f.get_ref()));
        }
    }
    let k = *raw.components.get_ref();
    if k == 0 {
        src.error_at(raw.components.span(), "at least one component is required");
    }
    let ambient = src.param(&raw.ambient_dim, n, "ambient_dim");
    if let (Some(a), Some(n)) = (ambient, n) {
        if a != n && matches!(raw.ambient_dim.get_ref(), Param::Int(_)) {
            src.error_at(raw.ambient_dim.span(), format!("document is for n = {a}, but n = {n} was requested"));
        }
    }
    let mut alpha = Alphabet::new(k.max(1)).expect("k >= 1");
    for g in &raw.generators {
        let grading = src.param(&g.grading, n, "grading").unwrap_or(0);
        for e in [&g.src, &g.dst] {
            if !(1..=k.max(1)).contains(e.get_ref()) {
                src.error_at(e.span(), format!("component {} is outside 1..={k}", e.get_ref()));
            }
        }
        let name = g.name.get_ref();
        let bad = name.is_empty() || name.chars().any(char::is_whitespace) || name.starts_with("e_");
        if bad {
            src.error_at(g.name.span(), format!("invalid generator name `{name}`"));
            continue;
        }
        let gen = Generator { name: name.clone(), grading, src: *g.src.get_ref(), dst: *g.dst.get_ref() };
        if alpha.push(gen).is_err() {
            src.error_at(g.name.span(), format!("duplicate generator `{name}`"));
        }
    }
    let mut dga = Dga::new(alpha.clone(), ambient.unwrap_or(0));
    let mut unknown = HashSet::new();
    for u in &raw.unknown {
        if alpha.id(u.get_ref()).is_err() {
            src.error_at(u.span(), format!("unknown generator `{}` in `unknown`", u.get_ref()));
        }
        unknown.insert(u.get_ref().clone());
    }
    for (name, terms) in &raw.differential {
        let Ok(c) = alpha.id(name) else {
            src.error_at(terms.span(), format!("differential given for unknown generator `{name}`"));
            continue;
        };
        if unknown.contains(name) {
            src.error_at(terms.span(), format!("`{name}` is listed as unknown but has a differential"));
        }
        let g = alpha.gen(c).clone();
        let dc = src.terms(&alpha, terms, &format!("d({name})"), g.src, g.dst, g.grading - 1);
        dga.set_differential(c, dc).expect("terms were checked");
    }
    for g in &raw.generators {
        let name = g.name.get_ref();
        if !raw.differential.contains_key(name) && !unknown.contains(name) {
            src.error_at(g.name.span(), format!("no differential for `{name}`: give one (`{name} = []` for a cycle) or list it in `unknown`"));
        }
    }
    src.finish(DgaDocument { dga, metadata: raw.metadata })
}

fn emit_terms(alpha: &Alphabet, e: &Element) -> String {
    let parts: Vec<String> = e
        .iter()
        .map(|(w, c)| {
            let word = match w {
                Word::Unit(i) => quote(&format!("e_{i}")),
                Word::Path(p) => string_list(&p.iter().map(|&l| alpha.name(l).to_string()).collect::<Vec<_>>()),
            };
            format!("{{ coeff = {}, word = {word} }}", quote(&format_rational(c)))
        })
        .collect();
    format!("[{}]", parts.join(", "))
}

fn emit_metadata(out: &mut String, m: &Metadata) {
    if m.notes.is_empty() && m.sign_provenance.is_none() {
        return;
    }
    out.push_str("\n[metadata]\n");
    if !m.notes.is_empty() {
        let _ = writeln!(out, "notes = {}", string_list(&m.notes));
    }
    if let Some(sp) = &m.sign_provenance {
        out.push_str("\n[metadata.sign_provenance]\n");
        let _ = writeln!(out, "choice = {}", quote(&sp.choice));
        let _ = writeln!(out, "constraints = {}", string_list(&sp.constraints));
    }
}

/// Canonical text of a DGA document.
pub fn emit_dga(doc: &DgaDocument) -> String {
    let dga = &doc.dga;
    let alpha = dga.alphabet();
    let mut out = String::new();
    let _ = writeln!(out, "format = {}", quote(DGA_FORMAT));
    out.push_str("field = \"Q\"\n");
    let _ = writeln!(out, "components = {}", alpha.components());
    let _ = writeln!(out, "ambient_dim = {}", dga.ambient_dim());
    let unknown = dga.unknown_generators();
    if !unknown.is_empty() {
        let _ = writeln!(out, "unknown = {}", string_list(&unknown));
    }
    for g in alpha.generators() {
        let _ = write!(out, "\n[[generators]]\nname = {}\ngrading = {}\nsrc = {}\ndst = {}\n", quote(&g.name), g.grading, g.src, g.dst);
    }
    let known: Vec<GenId> = (0..alpha.len() as GenId).filter(|&c| dga.differential(c).is_some()).collect();
    if !known.is_empty() {
        out.push_str("\n[differential]\n");
        for c in known {
            let _ = writeln!(out, "{} = {}", key(alpha.name(c)), emit_terms(alpha, dga.differential(c).unwrap()));
        }
    }
    emit_metadata(&mut out, &doc.metadata);
    out
}

// ------------------------------------------------------- augmentation ----

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAugmentation {
    format: Spanned<String>,
    #[serde(default)]
    values: BTreeMap<String, Spanned<String>>,
}

/// Parse an augmentation of `dga`; it must be supported on grading-0
/// self-chords and annihilate the known differential.
pub fn parse_augmentation(text: &str, dga: &Dga) -> Result<Augmentation, IoError> {
    let mut src = Source::new(text);
    let raw: RawAugmentation = src.deserialize()?;
    src.check_format(&raw.format, AUGMENTATION_FORMAT);
    let alpha = dga.alphabet();
    let mut aug = Augmentation::trivial(dga);
    for (name, v) in &raw.values {
        let Ok(c) = alpha.id(name) else {
            src.error_at(v.span(), format!("unknown generator `{name}`"));
            continue;
        };
        if let Some(q) = src.rational(v) {
            aug.values[c as usize] = q;
        }
    }
    if src.errors.is_empty() {
        if let Err(e) = aug.validate(dga) {
            src.error(e.to_string());
        }
    }
    src.finish(aug)
}

/// Canonical text of an augmentation.
pub fn emit_augmentation(aug: &Augmentation, dga: &Dga) -> String {
    let alpha = dga.alphabet();
    let mut out = format!("format = {}\n\n[values]\n", quote(AUGMENTATION_FORMAT));
    for (c, v) in aug.values.iter().enumerate() {
        if !num_traits::Zero::is_zero(v) {
            let _ = writeln!(out, "{} = {}", key(alpha.name(c as GenId)), quote(&format_rational(v)));
        }
    }
    out
}

// ---------------------------------------------------------- morphism ----

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMorphism {
    format: Spanned<String>,
    source: Spanned<String>,
    target: Spanned<String>,
    #[serde(default)]
    components: Option<Spanned<Vec<usize>>>,
    #[serde(default)]
    images: BTreeMap<String, Spanned<Vec<RawTerm>>>,
}

/// Resolve a DGA reference: `corpus:<name>` or a path relative to `base`.
pub fn load_dga_ref(reference: &str, base: Option<&Path>, n: Option<i64>) -> Result<DgaDocument, IoError> {
    if let Some(name) = reference.strip_prefix("corpus:") {
        return corpus_dga(name, n);
    }
    let path = match base {
        Some(b) => b.join(reference),
        None => PathBuf::from(reference),
    };
    parse_dga(&read(&path)?, n)
}

/// Parse a morphism document; source and target are resolved with
/// [`load_dga_ref`].  Generators without an image map to zero.
pub fn parse_morphism(text: &str, base: Option<&Path>, n: Option<i64>) -> Result<DgaMorphism, IoError> {
    let mut src = Source::new(text);
    let raw: RawMorphism = src.deserialize()?;
    src.check_format(&raw.format, MORPHISM_FORMAT);
    let load = |r: &Spanned<String>, src: &mut Source| match load_dga_ref(r.get_ref(), base, n) {
        Ok(d) => Some(d.dga),
        Err(e) => {
            src.error_at(r.span(), format!("cannot load `{}`: {e}", r.get_ref()));
            None
        }
    };
    let source = load(&raw.source, &mut src);
    let target = load(&raw.target, &mut src);
    let (Some(source), Some(target)) = (source, target) else {
        return Err(IoError::Schema(src.errors));
    };
    let components: Vec<usize> = match &raw.components {
        Some(c) => {
            if c.get_ref().len() != source.components() || c.get_ref().iter().any(|&j| j == 0 || j > target.components()) {
                src.error_at(c.span(), "components must send each source component into the target");
            }
            c.get_ref().clone()
        }
        None => {
            if source.components() != target.components() {
                src.error_at(raw.target.span(), "component counts differ; give `components`");
            }
            (1..=source.components()).collect()
        }
    };
    let (sa, ta) = (source.alphabet().clone(), target.alphabet().clone());
    let mut assignment = vec![Element::zero(); sa.len()];
    for (name, terms) in &raw.images {
        let Ok(c) = sa.id(name) else {
            src.error_at(terms.span(), format!("image given for unknown source generator `{name}`"));
            continue;
        };
        let g = sa.gen(c);
        let (s, d) = (components.get(g.src - 1).copied().unwrap_or(1), components.get(g.dst - 1).copied().unwrap_or(1));
        assignment[c as usize] = src.terms(&ta, terms, &format!("f({name})"), s, d, g.grading);
    }
    src.finish(DgaMorphism { source, target, components, assignment })
}

// ----------------------------------------------------------- filling ----

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFilling {
    format: Spanned<String>,
    n: Spanned<Param>,
    #[serde(default)]
    notes: Vec<String>,
    #[serde(default)]
    orbits: Vec<RawOrbit>,
    #[serde(default)]
    morse: Vec<RawMorse>,
    #[serde(default)]
    orbit_counts: Vec<RawCount>,
    #[serde(default)]
    mixed_counts: Vec<RawCount>,
    #[serde(default)]
    morse_counts: Vec<RawCount>,
    #[serde(default)]
    plane_counts: Vec<RawCount>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOrbit {
    label: Spanned<String>,
    grading: Spanned<Param>,
    kappa: Spanned<u32>,
    #[serde(default = "yes")]
    good: bool,
}

fn yes() -> bool {
    true
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMorse {
    label: Spanned<String>,
    grading: Spanned<Param>,
}

/// A count between two generators; `gap` restates the grading difference
/// the count must respect.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCount {
    from: Spanned<String>,
    to: Spanned<String>,
    value: Spanned<String>,
    gap: Spanned<i64>,
}

/// Required `|from| - |to|` for each kind of filling count.
pub const ORBIT_COUNT_GAP: i64 = 1;
pub const MIXED_COUNT_GAP: i64 = 2;
pub const MORSE_COUNT_GAP: i64 = 1;
pub const PLANE_COUNT_GAP: i64 = 1;

/// Parse a filling model; every count is checked against its gap.
pub fn parse_filling(text: &str, n: Option<i64>) -> Result<FillingModel, IoError> {
    let mut src = Source::new(text);
    let raw: RawFilling = src.deserialize()?;
    src.check_format(&raw.format, FILLING_FORMAT);
    let dim = src.param(&raw.n, n, "n").unwrap_or(0);
    if dim < 2 {
        src.error_at(raw.n.span(), format!("n must be at least 2, got {dim}"));
    }
    let mut orbits = Vec::new();
    let mut grading: BTreeMap<String, (i64, bool)> = BTreeMap::new();
    for o in &raw.orbits {
        let g = src.param(&o.grading, n.or(Some(dim)), "grading").unwrap_or(0);
        if *o.kappa.get_ref() == 0 {
            src.error_at(o.kappa.span(), "kappa must be at least 1");
        }
        if grading.insert(o.label.get_ref().clone(), (g, o.good)).is_some() {
            src.error_at(o.label.span(), format!("duplicate orbit `{}`", o.label.get_ref()));
        }
        orbits.push(Orbit { label: o.label.get_ref().clone(), grading: g, kappa: *o.kappa.get_ref(), good: o.good });
    }
    let mut morse = Vec::new();
    let mut morse_grading: BTreeMap<String, i64> = BTreeMap::new();
    for m in &raw.morse {
        let g = src.param(&m.grading, n.or(Some(dim)), "grading").unwrap_or(0);
        if morse_grading.insert(m.label.get_ref().clone(), g).is_some() || grading.contains_key(m.label.get_ref()) {
            src.error_at(m.label.span(), format!("duplicate label `{}`", m.label.get_ref()));
        }
        morse.push((m.label.get_ref().clone(), g));
    }
    let orbit_g = |l: &str| grading.get(l).map(|x| x.0);
    let morse_g = |l: &str| morse_grading.get(l).copied();
    type Lookup<'a> = &'a dyn Fn(&str) -> Option<i64>;
    let counts = |list: &[RawCount], what: &str, need: i64, from: Lookup, to: Lookup, src: &mut Source| -> Vec<Count> {
        let mut out = Vec::new();
        for c in list {
            let (f, t) = (from(c.from.get_ref()), to(c.to.get_ref()));
            if f.is_none() {
                src.error_at(c.from.span(), format!("{what}: unknown source `{}`", c.from.get_ref()));
            }
            if t.is_none() {
                src.error_at(c.to.span(), format!("{what}: unknown target `{}`", c.to.get_ref()));
            }
            if *c.gap.get_ref() != need {
                src.error_at(c.gap.span(), format!("{what} must have gap {need}, got {}", c.gap.get_ref()));
            }
            if let (Some(f), Some(t)) = (f, t) {
                if f - t != need {
                    src.error_at(c.from.span(), format!("{what} {} -> {}: |from| - |to| = {} != {need}", c.from.get_ref(), c.to.get_ref(), f - t));
                }
            }
            if let Some(v) = src.rational(&c.value) {
                out.push(Count { from: c.from.get_ref().clone(), to: c.to.get_ref().clone(), value: v });
            }
        }
        out
    };
    let orbit_counts = counts(&raw.orbit_counts, "orbit count", ORBIT_COUNT_GAP, &orbit_g, &orbit_g, &mut src);
    let mixed_counts = counts(&raw.mixed_counts, "mixed count", MIXED_COUNT_GAP, &orbit_g, &orbit_g, &mut src);
    let morse_counts = counts(&raw.morse_counts, "Morse count", MORSE_COUNT_GAP, &morse_g, &morse_g, &mut src);
    let plane_counts = counts(&raw.plane_counts, "plane count", PLANE_COUNT_GAP, &orbit_g, &morse_g, &mut src);
    for c in &raw.plane_counts {
        if grading.get(c.from.get_ref()).is_some_and(|x| !x.1) {
            src.error_at(c.from.span(), format!("plane count from bad orbit `{}`", c.from.get_ref()));
        }
    }
    let f = FillingModel { n: dim, orbits, orbit_counts, mixed_counts, morse, morse_counts, plane_counts, notes: raw.notes };
    if src.errors.is_empty() {
        if let Err(e) = f.validate() {
            src.error(e.to_string());
        }
    }
    src.finish(f)
}

/// Canonical text of a filling model.
pub fn emit_filling(f: &FillingModel) -> String {
    let mut out = format!("format = {}\nn = {}\n", quote(FILLING_FORMAT), f.n);
    if !f.notes.is_empty() {
        let _ = writeln!(out, "notes = {}", string_list(&f.notes));
    }
    for o in &f.orbits {
        let _ = write!(out, "\n[[orbits]]\nlabel = {}\ngrading = {}\nkappa = {}\ngood = {}\n", quote(&o.label), o.grading, o.kappa, o.good);
    }
    for (p, g) in &f.morse {
        let _ = write!(out, "\n[[morse]]\nlabel = {}\ngrading = {g}\n", quote(p));
    }
    for (table, list, gap) in [
        ("orbit_counts", &f.orbit_counts, ORBIT_COUNT_GAP),
        ("mixed_counts", &f.mixed_counts, MIXED_COUNT_GAP),
        ("morse_counts", &f.morse_counts, MORSE_COUNT_GAP),
        ("plane_counts", &f.plane_counts, PLANE_COUNT_GAP),
    ] {
        for c in list {
            let _ = write!(
                out,
                "\n[[{table}]]\nfrom = {}\nto = {}\nvalue = {}\ngap = {gap}\n",
                quote(&c.from),
                quote(&c.to),
                quote(&format_rational(&c.value))
            );
        }
    }
    out
}

// ------------------------------------------------------------ counts ----

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCounts {
    format: Spanned<String>,
    #[serde(default)]
    notes: Vec<String>,
    #[serde(default)]
    cyclic: Vec<RawWordCount>,
    #[serde(default)]
    check: Vec<RawWordCount>,
    #[serde(default)]
    hat: Vec<RawWordCount>,
    #[serde(default)]
    tau: Vec<RawTauCount>,
    #[serde(default)]
    morse_tau: Vec<RawTauCount>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWordCount {
    orbit: Spanned<String>,
    word: Spanned<Vec<String>>,
    value: Spanned<String>,
    gap: Spanned<i64>,
}

/// `orbit` names an orbit for `tau` and a Morse generator for `morse_tau`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTauCount {
    from: Spanned<String>,
    component: Spanned<usize>,
    value: Spanned<String>,
    gap: Spanned<i64>,
}

/// Required gradings: `|gamma| - |w|` for word counts, `|gamma|` (or the
/// Morse index) for counts to an idempotent.
pub const CYCLIC_COUNT_GAP: i64 = 1;
pub const CHECK_COUNT_GAP: i64 = 1;
pub const HAT_COUNT_GAP: i64 = 2;
pub const TAU_COUNT_GAP: i64 = 1;

/// Parse a surgery count table against a filling and a Legendrian DGA.
pub fn parse_counts(text: &str, f: &FillingModel, dga: &Dga) -> Result<SurgeryCountTable, IoError> {
    let mut src = Source::new(text);
    let raw: RawCounts = src.deserialize()?;
    src.check_format(&raw.format, COUNTS_FORMAT);
    let alpha = dga.alphabet();
    let orbit = |l: &str| f.orbits.iter().find(|o| o.label == l).map(|o| o.grading);
    let words = |list: &[RawWordCount], what: &str, need: i64, src: &mut Source| {
        let mut out = Vec::new();
        for c in list {
            let og = orbit(c.orbit.get_ref());
            if og.is_none() {
                src.error_at(c.orbit.span(), format!("{what}: unknown orbit `{}`", c.orbit.get_ref()));
            }
            if *c.gap.get_ref() != need {
                src.error_at(c.gap.span(), format!("{what} must have gap {need}, got {}", c.gap.get_ref()));
            }
            let names: Vec<&str> = c.word.get_ref().iter().map(String::as_str).collect();
            match alpha.ids(&names) {
                Err(_) => {
                    let bad = names.iter().find(|n| alpha.id(n).is_err()).copied().unwrap_or("");
                    src.error_at(c.word.span(), format!("{what}: unknown generator `{bad}`"));
                }
                Ok(ids) if ids.is_empty() || !alpha.is_cyclically_composable(&ids) => {
                    src.error_at(c.word.span(), format!("{what}: `{}` is not a cyclically composable word", names.join(" ")));
                }
                Ok(ids) => {
                    if let Some(og) = og {
                        let wg = alpha.word_grading(&ids);
                        if og - wg != need {
                            src.error_at(c.word.span(), format!("{what}: |{}| - |{}| = {} != {need}", c.orbit.get_ref(), names.join(" "), og - wg));
                        }
                    }
                }
            }
            if let Some(v) = src.rational(&c.value) {
                out.push((c.orbit.get_ref().clone(), c.word.get_ref().clone(), v));
            }
        }
        out
    };
    let cyclic = words(&raw.cyclic, "cyclic count", CYCLIC_COUNT_GAP, &mut src);
    let check = words(&raw.check, "check count", CHECK_COUNT_GAP, &mut src);
    let hat = words(&raw.hat, "hat count", HAT_COUNT_GAP, &mut src);
    let morse_g = |l: &str| f.morse.iter().find(|(p, _)| p == l).map(|(_, g)| *g);
    let taus = |list: &[RawTauCount], what: &str, look: &dyn Fn(&str) -> Option<i64>, src: &mut Source| {
        let mut out = Vec::new();
        for c in list {
            match look(c.from.get_ref()) {
                None => src.error_at(c.from.span(), format!("{what}: unknown source `{}`", c.from.get_ref())),
                Some(g) if g != TAU_COUNT_GAP => {
                    src.error_at(c.from.span(), format!("{what}: `{}` has grading {g}, expected {TAU_COUNT_GAP}", c.from.get_ref()))
                }
                _ => {}
            }
            if *c.gap.get_ref() != TAU_COUNT_GAP {
                src.error_at(c.gap.span(), format!("{what} must have gap {TAU_COUNT_GAP}, got {}", c.gap.get_ref()));
            }
            if !(1..=alpha.components()).contains(c.component.get_ref()) {
                src.error_at(c.component.span(), format!("{what}: component {} is outside 1..={}", c.component.get_ref(), alpha.components()));
            }
            if let Some(v) = src.rational(&c.value) {
                out.push((c.from.get_ref().clone(), *c.component.get_ref(), v));
            }
        }
        out
    };
    let tau = taus(&raw.tau, "tau count", &orbit, &mut src);
    let morse_tau = taus(&raw.morse_tau, "Morse tau count", &morse_g, &mut src);
    src.finish(SurgeryCountTable { cyclic, check, hat, tau, morse_tau, notes: raw.notes })
}

/// Canonical text of a count table.
pub fn emit_counts(t: &SurgeryCountTable) -> String {
    let mut out = format!("format = {}\n", quote(COUNTS_FORMAT));
    if !t.notes.is_empty() {
        let _ = writeln!(out, "notes = {}", string_list(&t.notes));
    }
    for (table, list, gap) in [("cyclic", &t.cyclic, CYCLIC_COUNT_GAP), ("check", &t.check, CHECK_COUNT_GAP), ("hat", &t.hat, HAT_COUNT_GAP)] {
        for (o, w, v) in list {
            let _ = write!(
                out,
                "\n[[{table}]]\norbit = {}\nword = {}\nvalue = {}\ngap = {gap}\n",
                quote(o),
                string_list(w),
                quote(&format_rational(v))
            );
        }
    }
    for (table, list) in [("tau", &t.tau), ("morse_tau", &t.morse_tau)] {
        for (o, j, v) in list {
            let _ = write!(
                out,
                "\n[[{table}]]\nfrom = {}\ncomponent = {j}\nvalue = {}\ngap = {TAU_COUNT_GAP}\n",
                quote(o),
                quote(&format_rational(v))
            );
        }
    }
    out
}

// -------------------------------------------------------------- ainf ----

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAinf {
    format: Spanned<String>,
    dim: Option<Spanned<Param>>,
    components: Spanned<usize>,
    #[serde(default)]
    points: Vec<RawPoint>,
    #[serde(default)]
    operations: Vec<RawOperation>,
    #[serde(default)]
    order: Option<Spanned<BTreeMap<String, Vec<String>>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPoint {
    name: Spanned<String>,
    lower: usize,
    upper: usize,
    grading: i64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOperation {
    inputs: Spanned<Vec<String>>,
    output: Spanned<String>,
    coeff: Spanned<String>,
}

/// Parse directed A-infinity data.  The dimension comes from `dim` in the
/// document or from `n`; when both are concrete they must agree.
pub fn parse_ainf(text: &str, n: Option<i64>) -> Result<DirectedAinfSpec, IoError> {
    let mut src = Source::new(text);
    let raw: RawAinf = src.deserialize()?;
    src.check_format(&raw.format, AINF_FORMAT);
    let dim = match &raw.dim {
        Some(d) => {
            let v = src.param(d, n, "dim");
            if let (Some(v), Some(n), Param::Int(_)) = (v, n, d.get_ref()) {
                if v != n {
                    src.error_at(d.span(), format!("document is for n = {v}, but n = {n} was requested"));
                }
            }
            v
        }
        None => {
            if n.is_none() {
                src.error("the dimension is not given: set `dim` or supply it");
            }
            n
        }
    };
    let mut spec = DirectedAinfSpec {
        n: dim.unwrap_or(3),
        components: *raw.components.get_ref(),
        points: raw
            .points
            .iter()
            .map(|p| IntersectionPoint { name: p.name.get_ref().clone(), lower: p.lower, upper: p.upper, grading: p.grading })
            .collect(),
        constants: Vec::new(),
        order: None,
    };
    if let Some(order) = &raw.order {
        let mut map = BTreeMap::new();
        for (k, v) in order.get_ref() {
            match k.parse::<usize>() {
                Ok(i) if (1..=spec.components).contains(&i) => {
                    for name in v {
                        if !spec.points.iter().any(|p| &p.name == name && (p.lower == i || p.upper == i)) {
                            src.error_at(order.span(), format!("order of component {i} lists `{name}`, which is not on it"));
                        }
                    }
                    map.insert(i, v.clone());
                }
                _ => src.error_at(order.span(), format!("order key `{k}` is not a component")),
            }
        }
        spec.order = Some(map);
    }
    let base = DirectedAinfSpec { constants: Vec::new(), ..spec.clone() };
    if let Err(e) = base.validate() {
        let span = raw.points.first().map_or(raw.components.span(), |p| p.name.span());
        src.error_at(span, e.to_string());
        return Err(IoError::Schema(src.errors));
    }
    for op in &raw.operations {
        let mut inputs = Vec::new();
        for s in op.inputs.get_ref() {
            match spec.parse_morph(s) {
                Ok(m) => inputs.push(m),
                Err(e) => src.error_at(op.inputs.span(), e.to_string()),
            }
        }
        let output = match spec.parse_morph(op.output.get_ref()) {
            Ok(m) => Some(m),
            Err(e) => {
                src.error_at(op.output.span(), e.to_string());
                None
            }
        };
        let coef = src.rational(&op.coeff);
        let (Some(output), Some(coef)) = (output, coef) else { continue };
        if inputs.len() != op.inputs.get_ref().len() {
            continue;
        }
        let c = AinfConstant { inputs, output, coef };
        let single = DirectedAinfSpec { constants: vec![c.clone()], ..base.clone() };
        match single.validate() {
            Ok(()) => spec.constants.push(c),
            Err(e) => src.error_at(op.inputs.span(), e.to_string()),
        }
    }
    src.finish(spec)
}

/// Canonical text of directed A-infinity data.
pub fn emit_ainf(spec: &DirectedAinfSpec) -> String {
    let mut out = format!("format = {}\ndim = {}\ncomponents = {}\n", quote(AINF_FORMAT), spec.n, spec.components);
    for p in &spec.points {
        let _ = write!(out, "\n[[points]]\nname = {}\nlower = {}\nupper = {}\ngrading = {}\n", quote(&p.name), p.lower, p.upper, p.grading);
    }
    for c in &spec.constants {
        let ins: Vec<String> = c.inputs.iter().map(|&m| spec.morph_name(m)).collect();
        let _ = write!(
            out,
            "\n[[operations]]\ninputs = {}\noutput = {}\ncoeff = {}\n",
            string_list(&ins),
            quote(&spec.morph_name(c.output)),
            quote(&format_rational(&c.coef))
        );
    }
    if let Some(order) = &spec.order {
        out.push_str("\n[order]\n");
        for (i, v) in order {
            let _ = writeln!(out, "{i} = {}", string_list(v));
        }
    }
    out
}

/// Names of the morphisms of a spec, for messages.
pub fn morph_names(spec: &DirectedAinfSpec, ms: &[Morph]) -> String {
    ms.iter().map(|&m| spec.morph_name(m)).collect::<Vec<_>>().join(", ")
}

// ------------------------------------------------------------ corpus ----

const MANIFEST: &str = include_str!("../corpus/manifest.toml");

const FILES: &[(&str, &str)] = &[
    ("unknot.dga", include_str!("../corpus/unknot.dga")),
    ("chekanov_a.dga", include_str!("../corpus/chekanov_a.dga")),
    ("chekanov_c.dga", include_str!("../corpus/chekanov_c.dga")),
    ("a_six.dga", include_str!("../corpus/a_six.dga")),
    ("dc1_vanishing.dga", include_str!("../corpus/dc1_vanishing.dga")),
    ("lambda_t.dga", include_str!("../corpus/lambda_t.dga")),
    ("chekanov_phi.morph", include_str!("../corpus/chekanov_phi.morph")),
    ("chekanov_a_eps.aug", include_str!("../corpus/chekanov_a_eps.aug")),
    ("lefschetz_min.ainf", include_str!("../corpus/lefschetz_min.ainf")),
    ("ball3.filling", include_str!("../corpus/ball3.filling")),
    ("zero_counts.counts", include_str!("../corpus/zero_counts.counts")),
];

/// Kinds of bundled documents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DocumentKind {
    Dga,
    Morphism,
    Augmentation,
    Ainf,
    Filling,
    Counts,
}

impl fmt::Display for DocumentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("serializable");
        write!(f, "{}", s.as_str().unwrap_or("?"))
    }
}

/// A bundled example document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusEntry {
    pub name: String,
    pub kind: DocumentKind,
    pub file: String,
    /// Needs the dimension parameter `n`.
    pub parametric: bool,
    pub description: String,
    pub text: &'static str,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    format: String,
    examples: Vec<RawManifestEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifestEntry {
    name: String,
    kind: DocumentKind,
    file: String,
    parametric: bool,
    description: String,
}

/// Every bundled example, in manifest order.
pub fn corpus() -> Vec<CorpusEntry> {
    let m: RawManifest = toml::from_str(MANIFEST).expect("bundled manifest parses");
    assert_eq!(m.format, "legsurg-corpus/1");
    m.examples
        .into_iter()
        .map(|e| {
            let text = FILES.iter().find(|(f, _)| *f == e.file).map(|(_, t)| *t).expect("manifest file is bundled");
            CorpusEntry { name: e.name, kind: e.kind, file: e.file, parametric: e.parametric, description: e.description, text }
        })
        .collect()
}

pub fn corpus_entry(name: &str) -> Result<CorpusEntry, IoError> {
    corpus().into_iter().find(|e| e.name == name).ok_or_else(|| IoError::UnknownExample(name.into()))
}

fn expect_kind(e: &CorpusEntry, kind: DocumentKind) -> Result<(), IoError> {
    if e.kind != kind {
        return Err(IoError::WrongKind { name: e.name.clone(), found: e.kind.to_string(), expected: kind.to_string() });
    }
    Ok(())
}

/// A bundled DGA document by name.
pub fn corpus_dga(name: &str, n: Option<i64>) -> Result<DgaDocument, IoError> {
    let e = corpus_entry(name)?;
    expect_kind(&e, DocumentKind::Dga)?;
    parse_dga(e.text, n)
}

/// A bundled directed A-infinity document by name.
pub fn corpus_ainf(name: &str, n: Option<i64>) -> Result<DirectedAinfSpec, IoError> {
    let e = corpus_entry(name)?;
    expect_kind(&e, DocumentKind::Ainf)?;
    parse_ainf(e.text, n)
}

/// A bundled morphism by name (its references are resolved in the corpus).
pub fn corpus_morphism(name: &str) -> Result<DgaMorphism, IoError> {
    let e = corpus_entry(name)?;
    expect_kind(&e, DocumentKind::Morphism)?;
    parse_morphism(e.text, None, None)
}

pub fn read(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|e| IoError::Read { path: path.display().to_string(), message: e.to_string() })
}

/// Text of a document given as a path or as `corpus:<name>`.
pub fn read_document(reference: &str) -> Result<(String, Option<PathBuf>), IoError> {
    if let Some(name) = reference.strip_prefix("corpus:") {
        return Ok((corpus_entry(name)?.text.to_string(), None));
    }
    let p = PathBuf::from(reference);
    let text = read(&p)?;
    Ok((text, p.parent().map(Path::to_path_buf)))
}

// ----------------------------------------------------------- reports ----

/// Number of basis labels shown per degree in reports.
pub const BASIS_PREVIEW: usize = 4;

/// A Betti table with its window, truncation verdict and basis summary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyReport {
    pub title: String,
    pub window: (i64, i64),
    pub max_len: usize,
    pub betti: BettiTable,
    /// First basis labels per degree, with the number omitted.
    pub basis: BTreeMap<i64, (Vec<String>, usize)>,
    pub notes: Vec<String>,
}

impl HomologyReport {
    pub fn new(title: &str, c: &GradedChainComplex) -> Result<Self, HomologyError> {
        let betti = betti(c)?;
        let basis = (c.window.0..=c.window.1)
            .map(|d| {
                let b = c.basis_at(d);
                (d, (b.iter().take(BASIS_PREVIEW).cloned().collect(), b.len().saturating_sub(BASIS_PREVIEW)))
            })
            .collect();
        Ok(HomologyReport { title: title.into(), window: c.window, max_len: c.max_len, betti, basis, notes: Vec::new() })
    }

    /// Aligned text table; a truncated verdict is announced on its own line.
    pub fn to_text(&self) -> String {
        let mut out = format!("# {}\n", self.title);
        let guard = match self.betti.guard {
            Guard::Exact => "exact",
            Guard::Truncated => "truncated",
        };
        let _ = writeln!(out, "window: {}..{}  max_len: {}  guard: {guard}", self.window.0, self.window.1, self.max_len);
        if self.betti.guard == Guard::Truncated {
            let _ = writeln!(
                out,
                "TRUNCATED: words are bounded by an action filtration (max_len {}); ranks are those of the truncated complex",
                self.max_len
            );
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        let _ = writeln!(out, "{:>6}  {:>4}  {:>5}  {:<5}  basis", "degree", "rank", "dim", "flags");
        for (d, (labels, more)) in &self.basis {
            let flags = if self.betti.is_edge(*d) { "edge" } else { "" };
            let mut b = labels.join(", ");
            if *more > 0 {
                let _ = write!(b, ", ... (+{more})");
            }
            let row = format!(
                "{:>6}  {:>4}  {:>5}  {:<5}  {}",
                d,
                self.betti.ranks.get(d).copied().unwrap_or(0),
                self.betti.dims.get(d).copied().unwrap_or(0),
                flags,
                b
            );
            let _ = writeln!(out, "{}", row.trim_end());
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, IoError> {
        serde_json::from_str(s).map_err(|e| IoError::Report(e.to_string()))
    }
}

/// Outcome of `validate` on a DGA document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationSummary {
    pub generators: usize,
    pub components: usize,
    pub ambient_dim: i64,
    pub unknown: Vec<String>,
    pub grading_violations: Vec<String>,
    pub endpoint_violations: Vec<String>,
    pub d_squared_failures: Vec<String>,
    pub skipped: Vec<String>,
    pub passes: bool,
}

impl ValidationSummary {
    pub fn new(dga: &Dga, rep: &ValidationReport) -> Self {
        let alpha = dga.alphabet();
        ValidationSummary {
            generators: alpha.len(),
            components: alpha.components(),
            ambient_dim: dga.ambient_dim(),
            unknown: dga.unknown_generators(),
            grading_violations: rep.grading_violations.clone(),
            endpoint_violations: rep.endpoint_violations.clone(),
            d_squared_failures: rep.d_squared.iter().map(|(c, e)| format!("d(d {c}) = {}", alpha.display(e))).collect(),
            skipped: rep.skipped.clone(),
            passes: rep.passes(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "generators: {}  components: {}  ambient dimension: {}\n",
            self.generators, self.components, self.ambient_dim
        );
        if !self.unknown.is_empty() {
            let _ = writeln!(out, "PARTIAL: unknown differential for {}", self.unknown.join(", "));
        }
        for (what, v) in [
            ("grading violation", &self.grading_violations),
            ("endpoint violation", &self.endpoint_violations),
            ("d^2 != 0", &self.d_squared_failures),
        ] {
            for x in v {
                let _ = writeln!(out, "{what}: {x}");
            }
        }
        if !self.skipped.is_empty() {
            let _ = writeln!(out, "not checked (unknown data): {}", self.skipped.join(", "));
        }
        let _ = writeln!(out, "{}", if self.passes { "valid" } else { "INVALID" });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::qi;
    use crate::examples;
    use crate::surgery::builtin_ball_filling;

    #[test]
    fn linear_expressions() {
        assert_eq!(linear_in_n("n-1"), Some((1, -1)));
        assert_eq!(linear_in_n("2n + 3"), Some((2, 3)));
        assert_eq!(linear_in_n("-n"), Some((-1, 0)));
        assert_eq!(linear_in_n("7"), Some((0, 7)));
        assert_eq!(linear_in_n("n*2"), None);
        assert_eq!(linear_in_n("m"), None);
        assert_eq!(linear_in_n(""), None);
    }

    #[test]
    fn unknot_document_is_parametric() {
        let doc = corpus_dga("unknot", Some(3)).unwrap();
        let alpha = doc.dga.alphabet();
        assert_eq!((alpha.len(), alpha.grading(0), doc.dga.ambient_dim()), (1, 2, 3));
        assert_eq!(doc.dga, examples::unknot(3));
        let err = corpus_dga("unknot", None).unwrap_err();
        assert!(err.to_string().contains("depends on n"), "{err}");
        let lines: Vec<usize> = err.errors().iter().map(|e| e.line).collect();
        assert_eq!(lines, vec![5, 9]);
    }

    #[test]
    fn corpus_matches_builtins() {
        assert_eq!(corpus_dga("chekanov_a", None).unwrap().dga, examples::chekanov_a());
        assert_eq!(corpus_dga("chekanov_c", None).unwrap().dga, examples::chekanov_c());
        assert_eq!(corpus_dga("a_six", None).unwrap().dga, examples::a_six());
        assert_eq!(corpus_dga("dc1_vanishing", None).unwrap().dga, examples::dc1_vanishing());
        assert_eq!(corpus_dga("lambda_t", None).unwrap().dga, examples::lambda_t());
        let f = parse_filling(corpus_entry("ball3").unwrap().text, None).unwrap();
        assert_eq!(f, builtin_ball_filling(3, 10).unwrap());
        let (phi, _) = examples::chekanov_phi();
        let parsed = corpus_morphism("chekanov_phi").unwrap();
        assert_eq!(parsed.assignment, phi.assignment);
        assert!(parsed.check().is_chain_map);
        let sp = corpus_dga("chekanov_a", None).unwrap().metadata.sign_provenance.unwrap();
        assert!(sp.choice.contains("d a1"));
    }

    #[test]
    fn every_corpus_entry_parses() {
        let names: Vec<String> = corpus().iter().map(|e| e.name.clone()).collect();
        for required in ["unknot", "chekanov_a", "chekanov_c", "dc1_vanishing", "lefschetz_min"] {
            assert!(names.iter().any(|n| n == required), "{required} missing");
        }
        for e in corpus() {
            let n = e.parametric.then_some(3);
            match e.kind {
                DocumentKind::Dga => {
                    corpus_dga(&e.name, n).unwrap();
                }
                DocumentKind::Ainf => {
                    corpus_ainf(&e.name, n).unwrap();
                }
                DocumentKind::Morphism => {
                    corpus_morphism(&e.name).unwrap();
                }
                DocumentKind::Augmentation => {
                    parse_augmentation(e.text, &examples::chekanov_a()).unwrap();
                }
                DocumentKind::Filling => {
                    parse_filling(e.text, n).unwrap();
                }
                DocumentKind::Counts => {
                    parse_counts(e.text, &builtin_ball_filling(3, 8).unwrap(), &examples::unknot(3)).unwrap();
                }
            }
        }
        assert!(FILES.iter().all(|(f, _)| corpus().iter().any(|e| &e.file == f)));
    }

    #[test]
    fn dangling_letter_is_named_with_position() {
        let text = "format = \"legsurg-dga/1\"\ncomponents = 1\nambient_dim = 2\n\n[[generators]]\nname = \"c\"\ngrading = 1\nsrc = 1\ndst = 1\n\n[differential]\nc = [{ coeff = \"1\", word = [\"zz\"] }]\n";
        let err = parse_dga(text, None).unwrap_err();
        let e = &err.errors()[0];
        assert!(e.message.contains("`zz`"), "{e}");
        assert_eq!(e.line, 12);
    }

    #[test]
    fn schema_errors() {
        let base = "format = \"legsurg-dga/1\"\ncomponents = 1\nambient_dim = 2\n\n[[generators]]\nname = \"c\"\ngrading = 1\nsrc = 1\ndst = 1\n";
        let float = format!("{base}\n[differential]\nc = [{{ coeff = \"0.5\", word = \"e_1\" }}]\n");
        assert!(parse_dga(&float, None).unwrap_err().to_string().contains("exact rational"));
        let missing = base.to_string();
        assert!(parse_dga(&missing, None).unwrap_err().to_string().contains("no differential for `c`"));
        let grading = format!("{base}\n[differential]\nc = [{{ coeff = \"1\", word = [\"c\"] }}]\n");
        assert!(parse_dga(&grading, None).unwrap_err().to_string().contains("grading 1, expected 0"));
        let unknown_field = format!("{base}colour = 3\n\n[differential]\nc = []\n");
        let e = parse_dga(&unknown_field, None).unwrap_err();
        assert!(e.errors()[0].line > 0, "{e}");
        let syntax = "format = \n";
        assert_eq!(parse_dga(syntax, None).unwrap_err().errors()[0].line, 1);
        let version = base.replace("dga/1", "dga/9") + "\n[differential]\nc = []\n";
        assert!(parse_dga(&version, None).unwrap_err().to_string().contains("not supported"));
    }

    #[test]
    fn round_trips() {
        for name in ["chekanov_a", "chekanov_c", "a_six", "dc1_vanishing", "lambda_t"] {
            let doc = corpus_dga(name, None).unwrap();
            let text = emit_dga(&doc);
            let back = parse_dga(&text, None).unwrap();
            assert_eq!(back, doc, "{name}");
            assert_eq!(emit_dga(&back), text, "{name}");
        }
        let f = builtin_ball_filling(4, 15).unwrap();
        let t = emit_filling(&f);
        assert_eq!(parse_filling(&t, None).unwrap(), f);
        assert_eq!(emit_filling(&parse_filling(&t, None).unwrap()), t);
        let spec = corpus_ainf("lefschetz_min", Some(2)).unwrap();
        let t = emit_ainf(&spec);
        assert_eq!(parse_ainf(&t, None).unwrap(), spec);
        let dga = examples::chekanov_a();
        let aug = parse_augmentation(corpus_entry("chekanov_a_eps").unwrap().text, &dga).unwrap();
        assert_eq!(parse_augmentation(&emit_augmentation(&aug, &dga), &dga).unwrap(), aug);
    }

    #[test]
    fn filling_gap_is_enforced() {
        let f = builtin_ball_filling(3, 8).unwrap();
        let text = emit_filling(&f).replacen("gap = 2", "gap = 1", 1);
        let err = parse_filling(&text, None).unwrap_err();
        assert!(err.to_string().contains("must have gap 2"), "{err}");
        let bad = emit_filling(&f).replacen("from = \"g2\"", "from = \"g3\"", 1);
        let err = parse_filling(&bad, None).unwrap_err();
        assert!(err.to_string().contains("|from| - |to| = 4"), "{err}");
    }

    #[test]
    fn counts_are_checked_against_gradings() {
        let f = builtin_ball_filling(3, 8).unwrap();
        let dga = examples::unknot(3);
        let t = SurgeryCountTable {
            cyclic: vec![("g2".into(), vec!["a".into(), "a".into(), "a".into()], qi(1))],
            hat: vec![("g1".into(), vec!["a".into()], qi(-2))],
            ..Default::default()
        };
        let err = parse_counts(&emit_counts(&t), &f, &dga).unwrap_err();
        assert!(err.to_string().contains("|g2| - |a a a| = 0"), "{err}");
        let ok = SurgeryCountTable { cyclic: vec![], ..t };
        let text = emit_counts(&ok);
        assert_eq!(parse_counts(&text, &f, &dga).unwrap(), ok);
        let typo = text.replace("[\"a\"]", "[\"b\"]");
        assert!(parse_counts(&typo, &f, &dga).unwrap_err().to_string().contains("unknown generator `b`"));
    }

    #[test]
    fn ainf_errors() {
        let text = corpus_entry("lefschetz_min").unwrap().text;
        assert!(parse_ainf(text, None).unwrap_err().to_string().contains("depends on n"));
        let with_op = format!("{text}\n[[operations]]\ninputs = [\"a\", \"a*\"]\noutput = \"e2\"\ncoeff = \"1\"\n");
        let e = parse_ainf(&with_op, Some(3)).unwrap_err();
        assert!(e.errors()[0].line > 10, "{e}");
        let no_order = text.replace("[order]\n1 = [\"a\"]\n2 = [\"a\"]\n", "");
        assert!(parse_ainf(&no_order, Some(2)).is_err());
        assert!(parse_ainf(&no_order, Some(3)).is_ok());
    }

    #[test]
    fn reports_round_trip_and_flag_truncation() {
        use crate::complexes::{build_cyclic_complex, build_ho_complex, Bounds, HoComplexSpec};
        let c = build_cyclic_complex(&examples::unknot(3), &Bounds::new(0, 12, 0)).unwrap();
        let rep = HomologyReport::new("LH^cyc unknot n=3", &c).unwrap();
        let back = HomologyReport::from_json(&rep.to_json()).unwrap();
        assert_eq!(back, rep);
        assert_eq!(back.betti, betti(&c).unwrap());
        assert!(!rep.to_text().contains("TRUNCATED"));
        assert_eq!(rep.to_text(), HomologyReport::new("LH^cyc unknot n=3", &c).unwrap().to_text());
        let t = build_ho_complex(&HoComplexSpec::new(examples::lambda_t().assume_unknown_zero()), &Bounds::truncated(0, 4, 0)).unwrap();
        let text = HomologyReport::new("truncated", &t).unwrap().to_text();
        assert!(text.lines().any(|l| l.starts_with("TRUNCATED:")), "{text}");
    }
}
