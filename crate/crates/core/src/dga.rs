//! Semi-free DGAs over the path algebra: Leibniz extension, validation,
//! morphisms, augmentations, linearization, and the point-class constructions
//! (adjoining `q`, and the relative algebra `B` with its map `Phi`).

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{multiply, qi, sign_pow, AlgebraError, Alphabet, Element, GenId, Generator, Word, Q};
use crate::homology::{ComplexBuilder, GradedChainComplex, Guard};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DgaError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("differential of `{0}` is unknown in this partial document")]
    UnknownDifferential(String),
    #[error("term `{term}` of d({gen}) does not match the endpoints of `{gen}`")]
    Endpoints { gen: String, term: String },
    #[error("grading mismatch: {0}")]
    GradingMismatch(String),
    #[error("invalid augmentation: {0}")]
    InvalidAugmentation(String),
    #[error("deformation data: {0}")]
    Deformation(String),
    #[error("q^2 = 0 is inconsistent with the differential: {0}")]
    QSquared(String),
    #[error("component map: {0}")]
    ComponentMap(String),
}

/// A semi-free DGA: generators with gradings and endpoints, and the
/// differential of every generator (or `None` when unknown).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dga {
    alpha: Alphabet,
    ambient_dim: i64,
    diff: Vec<Option<Element>>,
}

/// Everything wrong with a DGA: grading and endpoint violations and
/// generators with `d(d c) != 0`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub grading_violations: Vec<String>,
    pub endpoint_violations: Vec<String>,
    /// Generators whose `d(d c)` is nonzero, with the offending element.
    pub d_squared: Vec<(String, Element)>,
    /// Generators skipped because their `d(d c)` involves unknown data.
    pub skipped: Vec<String>,
}

impl ValidationReport {
    pub fn passes(&self) -> bool {
        self.grading_violations.is_empty() && self.endpoint_violations.is_empty() && self.d_squared.is_empty()
    }
}

impl Dga {
    /// A DGA with the given generators, all with unknown differential.
    pub fn new(alpha: Alphabet, ambient_dim: i64) -> Self {
        let diff = vec![None; alpha.len()];
        Dga { alpha, ambient_dim, diff }
    }

    /// A DGA where every generator is a cycle until set otherwise.
    pub fn with_zero_differential(alpha: Alphabet, ambient_dim: i64) -> Self {
        let diff = vec![Some(Element::zero()); alpha.len()];
        Dga { alpha, ambient_dim, diff }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alpha
    }
    pub fn ambient_dim(&self) -> i64 {
        self.ambient_dim
    }
    pub fn components(&self) -> usize {
        self.alpha.components()
    }

    /// Set `d(c)`; the element must consist of words with the endpoints of `c`.
    pub fn set_differential(&mut self, c: GenId, dc: Element) -> Result<(), DgaError> {
        let g = self.alpha.gen(c).clone();
        for (w, _) in dc.iter() {
            let ok = match w {
                Word::Unit(i) => g.src == *i && g.dst == *i,
                Word::Path(p) => {
                    self.alpha.is_composable(p)
                        && self.alpha.end_of(w) == g.dst
                        && self.alpha.origin_of(w) == g.src
                }
            };
            if !ok {
                return Err(DgaError::Endpoints { gen: g.name.clone(), term: self.alpha.display_word(w) });
            }
        }
        self.diff[c as usize] = Some(dc);
        Ok(())
    }

    /// Set `d(c)` from `(coefficient, letter names)` pairs; an empty name list
    /// is the unit of the generator's component.
    pub fn set_differential_named(&mut self, c: &str, terms: &[(Q, &[&str])]) -> Result<(), DgaError> {
        let id = self.alpha.id(c)?;
        let comp = self.alpha.gen(id).dst;
        let mut dc = Element::zero();
        for (coef, names) in terms {
            let w = if names.is_empty() { Word::Unit(comp) } else { Word::Path(self.alpha.ids(names)?) };
            dc.add_term(w, coef.clone());
        }
        self.set_differential(id, dc)
    }

    pub fn mark_unknown(&mut self, c: GenId) {
        self.diff[c as usize] = None;
    }

    pub fn differential(&self, c: GenId) -> Option<&Element> {
        self.diff[c as usize].as_ref()
    }

    pub fn is_partial(&self) -> bool {
        self.diff.iter().any(Option::is_none)
    }

    /// Names of the generators whose differential is unknown.
    pub fn unknown_generators(&self) -> Vec<String> {
        (0..self.alpha.len() as GenId).filter(|&c| self.diff[c as usize].is_none()).map(|c| self.alpha.name(c).to_string()).collect()
    }

    /// The same algebra with every unknown differential replaced by zero.
    /// Used only for properties that hold for any completion of the known
    /// relations (e.g. vanishing forced by `d c = 1`).
    pub fn assume_unknown_zero(&self) -> Dga {
        let mut out = self.clone();
        for d in out.diff.iter_mut() {
            if d.is_none() {
                *d = Some(Element::zero());
            }
        }
        out
    }

    fn d_gen(&self, c: GenId) -> Result<&Element, DgaError> {
        self.diff[c as usize].as_ref().ok_or_else(|| DgaError::UnknownDifferential(self.alpha.name(c).to_string()))
    }

    /// Leibniz expansion of a single word into raw (unnormalized) terms:
    /// `d(c_1...c_m) = sum_j (-1)^{|c_1...c_{j-1}|} c_1...c_{j-1} d(c_j) c_{j+1}...c_m`,
    /// with units absorbed; a full collapse gives the idempotent.
    pub fn d_word_terms(&self, w: &[GenId]) -> Result<Vec<(Word, Q)>, DgaError> {
        let mut out = Vec::new();
        let mut prefix_grading = 0i64;
        for j in 0..w.len() {
            let dc = self.d_gen(w[j])?;
            let s = sign_pow(prefix_grading);
            for (y, coef) in dc.iter() {
                let mut letters = Vec::with_capacity(w.len() + y.len());
                letters.extend_from_slice(&w[..j]);
                letters.extend_from_slice(y.letters());
                letters.extend_from_slice(&w[j + 1..]);
                let word = if letters.is_empty() {
                    match y {
                        Word::Unit(i) => Word::Unit(*i),
                        Word::Path(_) => unreachable!(),
                    }
                } else {
                    Word::Path(letters)
                };
                let c = if s == 1 { coef.clone() } else { -coef };
                out.push((word, c));
            }
            prefix_grading += self.alpha.grading(w[j]);
        }
        Ok(out)
    }

    /// `d` on an arbitrary element (units are cycles).
    pub fn extend_leibniz(&self, x: &Element) -> Result<Element, DgaError> {
        let mut out = Element::zero();
        for (w, coef) in x.iter() {
            if let Word::Path(p) = w {
                for (t, c) in self.d_word_terms(p)? {
                    out.add_term(t, c * coef);
                }
            }
        }
        Ok(out)
    }

    /// Grading bookkeeping, endpoint checks and `d^2 = 0` on every generator.
    pub fn check_d_squared(&self) -> ValidationReport {
        let mut rep = ValidationReport::default();
        for c in 0..self.alpha.len() as GenId {
            let name = self.alpha.name(c).to_string();
            let Some(dc) = self.differential(c) else { continue };
            for (w, _) in dc.iter() {
                let g = self.alpha.grading_of(w);
                if g != self.alpha.grading(c) - 1 {
                    rep.grading_violations.push(format!(
                        "term `{}` of d({name}) has grading {g}, expected {}",
                        self.alpha.display_word(w),
                        self.alpha.grading(c) - 1
                    ));
                }
                let gen = self.alpha.gen(c);
                let ends_ok = match w {
                    Word::Unit(i) => gen.src == *i && gen.dst == *i,
                    Word::Path(p) => {
                        self.alpha.is_composable(p) && self.alpha.end_of(w) == gen.dst && self.alpha.origin_of(w) == gen.src
                    }
                };
                if !ends_ok {
                    rep.endpoint_violations.push(format!("term `{}` of d({name})", self.alpha.display_word(w)));
                }
            }
            match self.extend_leibniz(dc) {
                Ok(ddc) if !ddc.is_zero() => rep.d_squared.push((name, ddc)),
                Ok(_) => {}
                Err(_) => rep.skipped.push(name),
            }
        }
        rep
    }

    /// Generators of grading 0 that start and end on the same component:
    /// the only ones an augmentation may be nonzero on.
    pub fn augmentable_generators(&self) -> Vec<GenId> {
        (0..self.alpha.len() as GenId)
            .filter(|&c| {
                let g = self.alpha.gen(c);
                g.grading == 0 && g.src == g.dst
            })
            .collect()
    }
}

/// A DGA map given on generators; components map through `components`
/// (source component `i` goes to target component `components[i-1]`).
#[derive(Clone, Debug)]
pub struct DgaMorphism {
    pub source: Dga,
    pub target: Dga,
    pub components: Vec<usize>,
    pub assignment: Vec<Element>,
}

/// Outcome of the chain-map check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismReport {
    pub is_chain_map: bool,
    /// First failing generator with `f(d c)` and `d(f(c))`.
    pub counterexample: Option<(String, Element, Element)>,
    /// Source generators not checked because some differential is unknown.
    pub skipped: Vec<String>,
}

impl DgaMorphism {
    /// Build from named images; components default to the identity map.
    pub fn from_named(source: Dga, target: Dga, images: &[(&str, Element)]) -> Result<Self, DgaError> {
        if source.components() != target.components() {
            return Err(DgaError::ComponentMap("component counts differ; give an explicit map".into()));
        }
        let components = (1..=source.components()).collect();
        let mut assignment = vec![Element::zero(); source.alphabet().len()];
        for (name, img) in images {
            assignment[source.alphabet().id(name)? as usize] = img.clone();
        }
        let f = DgaMorphism { source, target, components, assignment };
        f.check_gradings()?;
        Ok(f)
    }

    /// Every term of `f(c)` must have the grading of `c`.
    pub fn check_gradings(&self) -> Result<(), DgaError> {
        if self.components.len() != self.source.components()
            || self.components.iter().any(|&c| c == 0 || c > self.target.components())
        {
            return Err(DgaError::ComponentMap("map must send each source component into the target".into()));
        }
        let (sa, ta) = (self.source.alphabet(), self.target.alphabet());
        for (c, img) in self.assignment.iter().enumerate() {
            for (w, _) in img.iter() {
                if ta.grading_of(w) != sa.grading(c as GenId) {
                    return Err(DgaError::GradingMismatch(format!(
                        "f({}) contains `{}` of grading {}, expected {}",
                        sa.name(c as GenId),
                        ta.display_word(w),
                        ta.grading_of(w),
                        sa.grading(c as GenId)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Multiplicative extension to an element of the source.
    pub fn apply(&self, x: &Element) -> Element {
        let ta = self.target.alphabet();
        let mut out = Element::zero();
        for (w, coef) in x.iter() {
            let img = match w {
                Word::Unit(i) => Element::unit(self.components[i - 1]),
                Word::Path(p) => {
                    let mut acc = Element::unit(self.components[self.source.alphabet().gen(p[0]).dst - 1]);
                    for &c in p {
                        acc = multiply(ta, &acc, &self.assignment[c as usize]);
                        if acc.is_zero() {
                            break;
                        }
                    }
                    acc
                }
            };
            out.add_assign(&img.scale(coef));
        }
        out
    }

    /// `f(d c) == d(f(c))` generator by generator.
    pub fn check(&self) -> MorphismReport {
        let mut skipped = Vec::new();
        for c in 0..self.source.alphabet().len() as GenId {
            let name = self.source.alphabet().name(c).to_string();
            let Some(dc) = self.source.differential(c) else {
                skipped.push(name);
                continue;
            };
            let lhs = self.apply(dc);
            let Ok(rhs) = self.target.extend_leibniz(&self.assignment[c as usize]) else {
                skipped.push(name);
                continue;
            };
            if lhs != rhs {
                return MorphismReport { is_chain_map: false, counterexample: Some((name, lhs, rhs)), skipped };
            }
        }
        MorphismReport { is_chain_map: true, counterexample: None, skipped }
    }

    /// `g . self`.
    pub fn then(&self, g: &DgaMorphism) -> DgaMorphism {
        let assignment = self.assignment.iter().map(|x| g.apply(x)).collect();
        let components = self.components.iter().map(|&c| g.components[c - 1]).collect();
        DgaMorphism { source: self.source.clone(), target: g.target.clone(), components, assignment }
    }

    /// The identity morphism of a DGA.
    pub fn identity(dga: &Dga) -> DgaMorphism {
        let assignment = (0..dga.alphabet().len() as GenId).map(Element::letter).collect();
        DgaMorphism {
            source: dga.clone(),
            target: dga.clone(),
            components: (1..=dga.components()).collect(),
            assignment,
        }
    }
}

/// A graded algebra map to Q: values on grading-0 self-chords, `e_i -> 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Augmentation {
    pub values: Vec<Q>,
}

impl Augmentation {
    pub fn trivial(dga: &Dga) -> Self {
        Augmentation { values: vec![Q::zero(); dga.alphabet().len()] }
    }

    pub fn from_named(dga: &Dga, values: &[(&str, Q)]) -> Result<Self, DgaError> {
        let mut a = Augmentation::trivial(dga);
        for (n, v) in values {
            a.values[dga.alphabet().id(n)? as usize] = v.clone();
        }
        Ok(a)
    }

    pub fn eval(&self, x: &Element) -> Q {
        x.iter()
            .map(|(w, c)| {
                let prod = w.letters().iter().fold(Q::one(), |acc, &l| acc * &self.values[l as usize]);
                prod * c
            })
            .sum()
    }

    /// Supported on grading-0 self-chords and annihilates every known `d c`.
    pub fn validate(&self, dga: &Dga) -> Result<(), DgaError> {
        let alpha = dga.alphabet();
        let allowed = dga.augmentable_generators();
        for (c, v) in self.values.iter().enumerate() {
            if !v.is_zero() && !allowed.contains(&(c as GenId)) {
                return Err(DgaError::InvalidAugmentation(format!(
                    "nonzero value on `{}`, which is not a grading-0 self-chord",
                    alpha.name(c as GenId)
                )));
            }
        }
        for c in 0..alpha.len() as GenId {
            if let Some(dc) = dga.differential(c) {
                if !self.eval(dc).is_zero() {
                    return Err(DgaError::InvalidAugmentation(format!("epsilon(d {}) != 0", alpha.name(c))));
                }
            }
        }
        Ok(())
    }
}

/// All augmentations with values in `value_set` (exhaustive search over the
/// grading-0 self-chords).
pub fn enumerate_augmentations(dga: &Dga, value_set: &[Q]) -> Vec<Augmentation> {
    let free = dga.augmentable_generators();
    let mut out = Vec::new();
    if value_set.is_empty() && !free.is_empty() {
        return out;
    }
    let mut idx = vec![0usize; free.len()];
    loop {
        let mut aug = Augmentation::trivial(dga);
        for (slot, &c) in idx.iter().zip(&free) {
            aug.values[c as usize] = value_set[*slot].clone();
        }
        if aug.validate(dga).is_ok() {
            out.push(aug);
        }
        // Odometer increment.
        let mut k = 0;
        loop {
            if k == idx.len() {
                return out;
            }
            idx[k] += 1;
            if idx[k] < value_set.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// The linearized complex: generators as basis, and
/// `d_eps(c) = sum over words b_1..b_m of d(c), over positions j, of
/// (prod_{i != j} eps(b_i)) b_j` (the linear part of `d` after `c -> c + eps(c)`).
pub fn linearize(dga: &Dga, eps: &Augmentation) -> Result<GradedChainComplex, DgaError> {
    eps.validate(dga)?;
    let alpha = dga.alphabet();
    let gradings: Vec<i64> = alpha.generators().iter().map(|g| g.grading).collect();
    let lo = gradings.iter().copied().min().unwrap_or(0) - 1;
    let hi = gradings.iter().copied().max().unwrap_or(0) + 1;
    let mut b = ComplexBuilder::new();
    for g in alpha.generators() {
        b.cell(g.grading, g.name.clone()).expect("generator names are unique");
    }
    for c in 0..alpha.len() as GenId {
        let dc = dga.differential(c).ok_or_else(|| DgaError::UnknownDifferential(alpha.name(c).to_string()))?;
        for (w, coef) in dc.iter() {
            let letters = w.letters();
            for j in 0..letters.len() {
                let others = letters
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != j)
                    .fold(Q::one(), |acc, (_, &l)| acc * &eps.values[l as usize]);
                if !others.is_zero() {
                    b.entry(c as usize, alpha.name(letters[j]).to_string(), others * coef);
                }
            }
        }
    }
    Ok(b.finish((lo, hi), Guard::Exact, 1))
}

/// Degree of the point-class element `q` for a cycle of homological degree `k`.
pub fn q_grading(n: i64, k: i64) -> i64 {
    n - k - 2
}

/// Added terms of one generator's differential: `(generator, [(coefficient, word)])`.
pub type DeformationTerms<'a> = (&'a str, Vec<(Q, Vec<&'a str>)>);

/// Adjoin a cycle `q` (a point class on `component`) and add the supplied
/// deformation terms to the differentials of the old generators.  Every
/// deformation term must contain `q` and respect gradings.
pub fn adjoin_q(
    dga: &Dga,
    component: usize,
    grading: i64,
    deformation: &[DeformationTerms<'_>],
) -> Result<Dga, DgaError> {
    if dga.is_partial() {
        return Err(DgaError::Deformation(format!(
            "missing deformed-differential data: differentials of {:?} are unknown",
            dga.unknown_generators()
        )));
    }
    let mut alpha = dga.alphabet().clone();
    let qid = alpha.push(Generator { name: "q".into(), grading, src: component, dst: component })?;
    let mut out = Dga::with_zero_differential(alpha, dga.ambient_dim());
    for c in 0..dga.alphabet().len() as GenId {
        out.diff[c as usize] = dga.diff[c as usize].clone();
    }
    for (name, terms) in deformation {
        let c = out.alpha.id(name)?;
        let mut extra = Element::zero();
        for (coef, letters) in terms {
            let w = out.alpha.ids(letters)?;
            if !w.contains(&qid) {
                return Err(DgaError::Deformation(format!("term `{}` of d({name}) contains no q", letters.join(" "))));
            }
            let g = out.alpha.word_grading(&w);
            if g != out.alpha.grading(c) - 1 {
                return Err(DgaError::GradingMismatch(format!(
                    "deformed term `{}` of d({name}) has grading {g}, expected {}",
                    letters.join(" "),
                    out.alpha.grading(c) - 1
                )));
            }
            extra.add_term(Word::Path(w), coef.clone());
        }
        let total = out.diff[c as usize].clone().unwrap_or_default().add(&extra);
        out.set_differential(c, total)?;
    }
    Ok(out)
}

/// Output of the relative construction.
#[derive(Clone, Debug)]
pub struct RelQ {
    /// `B`, presented on generators `g[w] = w q`.
    pub b: Dga,
    /// The free DGA on `x-[w]x+` and `a` with `d a = x-[]x+`.
    pub target: Dga,
    pub phi: DgaMorphism,
}

/// Build `B`, its target and `Phi(w q) = x_- w x_+` for chord words `w`
/// (not containing `q`) of length at most `max_len` that start and end on
/// the component of `q`.  Target generators whose differential would leave
/// the truncation are marked unknown.  Fails when some generator
/// differential produces `q q`, which `q^2 = 0` would kill but `Phi` cannot.
pub fn rel_q_construction(dga_q: &Dga, max_len: usize) -> Result<RelQ, DgaError> {
    let alpha = dga_q.alphabet();
    let qid = alpha.id("q")?;
    let n = dga_q.ambient_dim();
    let comp = alpha.gen(qid).src;
    // Enumerate chord words w at comp (composable, from comp back to comp).
    let chords: Vec<GenId> = (0..alpha.len() as GenId).filter(|&c| c != qid).collect();
    let mut words: Vec<Vec<GenId>> = vec![Vec::new()];
    let mut frontier: Vec<Vec<GenId>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for &c in &chords {
                let g = alpha.gen(c);
                let fits = match w.last() {
                    None => g.dst == comp,
                    Some(&l) => alpha.gen(l).src == g.dst,
                };
                if fits {
                    let mut v = w.clone();
                    v.push(c);
                    next.push(v);
                }
            }
        }
        words.extend(next.iter().filter(|w| alpha.gen(*w.last().unwrap()).src == comp).cloned());
        frontier = next;
    }
    let label = |w: &[GenId]| format!("[{}]", alpha.word_string(w));
    let mut b_alpha = Alphabet::new(1)?;
    let mut t_alpha = Alphabet::new(1)?;
    for w in &words {
        let g = alpha.word_grading(w);
        b_alpha.push(Generator { name: format!("g{}", label(w)), grading: g + alpha.grading(qid), src: 1, dst: 1 })?;
        t_alpha.push(Generator { name: format!("x-{}x+", label(w)), grading: g + n - 2, src: 1, dst: 1 })?;
    }
    let a_id = t_alpha.push(Generator { name: "a".into(), grading: n - 1, src: 1, dst: 1 })?;
    let index: BTreeMap<Vec<GenId>, GenId> = words.iter().enumerate().map(|(i, w)| (w.clone(), i as GenId)).collect();

    // Split a word ending in q at its q's: w_1 q w_2 q ... -> [w_1, w_2, ...].
    let split = |w: &[GenId]| -> Result<Option<Vec<GenId>>, DgaError> {
        let mut pieces = Vec::new();
        let mut cur: Vec<GenId> = Vec::new();
        for (i, &c) in w.iter().enumerate() {
            if c == qid {
                if i > 0 && w[i - 1] == qid {
                    return Err(DgaError::QSquared(format!("term contains `q q`: {}", alpha.word_string(w))));
                }
                match index.get(&cur) {
                    Some(&id) => pieces.push(id),
                    None => return Ok(None),
                }
                cur.clear();
            } else {
                cur.push(c);
            }
        }
        debug_assert!(cur.is_empty(), "B words end with q");
        Ok(Some(pieces))
    };

    let mut b = Dga::new(b_alpha, n);
    let mut target = Dga::new(t_alpha, n);
    for (i, w) in words.iter().enumerate() {
        let mut wq = w.clone();
        wq.push(qid);
        let terms = dga_q.d_word_terms(&wq)?;
        let mut d_b = Element::zero();
        let mut complete = true;
        for (t, coef) in terms {
            match split(t.letters())? {
                Some(pieces) => d_b.add_term(Word::Path(pieces), coef),
                None => complete = false,
            }
        }
        if complete {
            b.set_differential(i as GenId, d_b.clone())?;
            // Phi sends g[w] to x-[w]x+ letter for letter.
            target.set_differential(i as GenId, d_b)?;
        }
    }
    let empty = index[&Vec::new()];
    target.set_differential(a_id, Element::letter(empty))?;
    let assignment = (0..words.len() as GenId).map(Element::letter).collect();
    let phi = DgaMorphism { source: b.clone(), target: target.clone(), components: vec![1], assignment };
    phi.check_gradings()?;
    Ok(RelQ { b, target, phi })
}

/// Integer-valued rational helper for callers building examples.
pub fn coef(n: i64) -> Q {
    qi(n)
}
