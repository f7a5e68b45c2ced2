//! The free graded path algebra over the idempotent ring `R = Q<e_1..e_k>`.
//!
//! Letters are Reeb chords (generators) with an integer grading and two
//! endpoints: the component where the chord starts (`src`, its origin) and the
//! component where it ends (`dst`).  A word `c_1 c_2 ... c_m` is composable
//! when the origin of each letter is the end of the next one,
//! `src(c_i) == dst(c_{i+1})`.  Read right to left it is a path
//! `src(c_m) -> ... -> dst(c_1)`.  Empty words are the idempotents `e_i`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational coefficients.
pub type Q = BigRational;

/// Index of a generator inside its [`Alphabet`].
pub type GenId = u32;

/// Build a rational from a numerator and denominator.
pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Build an integral rational.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `(-1)^e` as a small integer.
pub fn sign_pow(e: i64) -> i32 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Parse a rational written as `p`, `p/q`, with an ASCII or Unicode minus.
pub fn parse_rational(s: &str) -> Result<Q, AlgebraError> {
    let t = s.trim().replace('\u{2212}', "-");
    let bad = || AlgebraError::BadRational(s.to_string());
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim().to_string(), b.trim().to_string()),
        None => (t.clone(), "1".to_string()),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Q::new(num, den))
}

/// Canonical text form of a rational (`-3/2`, `5`).
pub fn format_rational(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("base ring needs at least one component")]
    NoComponents,
    #[error("component {0} is out of range 1..={1}")]
    ComponentOutOfRange(usize, usize),
    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("word `{0}` is not composable")]
    NotComposable(String),
    #[error("word `{0}` is not cyclically composable")]
    NotCyclic(String),
    #[error("truncation orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("malformed rational `{0}`")]
    BadRational(String),
}

/// A Reeb chord: a letter of the path algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub grading: i64,
    /// Component of the chord's origin (1-based).
    pub src: usize,
    /// Component of the chord's end (1-based).
    pub dst: usize,
}

/// The quiver underlying a path algebra: `k` components and a list of chords.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    k: usize,
    gens: Vec<Generator>,
    by_name: HashMap<String, GenId>,
}

impl Alphabet {
    pub fn new(k: usize) -> Result<Self, AlgebraError> {
        if k == 0 {
            return Err(AlgebraError::NoComponents);
        }
        Ok(Alphabet { k, gens: Vec::new(), by_name: HashMap::new() })
    }

    /// Add a chord; returns its id.
    pub fn push(&mut self, g: Generator) -> Result<GenId, AlgebraError> {
        for c in [g.src, g.dst] {
            if c == 0 || c > self.k {
                return Err(AlgebraError::ComponentOutOfRange(c, self.k));
            }
        }
        if self.by_name.contains_key(&g.name) {
            return Err(AlgebraError::DuplicateGenerator(g.name));
        }
        let id = self.gens.len() as GenId;
        self.by_name.insert(g.name.clone(), id);
        self.gens.push(g);
        Ok(id)
    }

    /// Convenience constructor for tests and built-ins.
    pub fn with_generators(k: usize, gens: &[(&str, i64, usize, usize)]) -> Result<Self, AlgebraError> {
        let mut a = Alphabet::new(k)?;
        for &(name, grading, src, dst) in gens {
            a.push(Generator { name: name.to_string(), grading, src, dst })?;
        }
        Ok(a)
    }

    pub fn components(&self) -> usize {
        self.k
    }
    pub fn len(&self) -> usize {
        self.gens.len()
    }
    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }
    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }
    pub fn gen(&self, id: GenId) -> &Generator {
        &self.gens[id as usize]
    }
    pub fn grading(&self, id: GenId) -> i64 {
        self.gens[id as usize].grading
    }
    pub fn id(&self, name: &str) -> Result<GenId, AlgebraError> {
        self.by_name.get(name).copied().ok_or_else(|| AlgebraError::UnknownGenerator(name.to_string()))
    }
    pub fn name(&self, id: GenId) -> &str {
        &self.gens[id as usize].name
    }

    /// Resolve a list of names into ids.
    pub fn ids(&self, names: &[&str]) -> Result<Vec<GenId>, AlgebraError> {
        names.iter().map(|n| self.id(n)).collect()
    }

    pub fn word_grading(&self, w: &[GenId]) -> i64 {
        w.iter().map(|&c| self.grading(c)).sum()
    }

    pub fn is_composable(&self, w: &[GenId]) -> bool {
        w.windows(2).all(|p| self.gen(p[0]).src == self.gen(p[1]).dst)
    }

    pub fn is_cyclically_composable(&self, w: &[GenId]) -> bool {
        !w.is_empty()
            && self.is_composable(w)
            && self.gen(w[w.len() - 1]).src == self.gen(w[0]).dst
    }

    /// Grading of a word (0 for units).
    pub fn grading_of(&self, w: &Word) -> i64 {
        match w {
            Word::Unit(_) => 0,
            Word::Path(p) => self.word_grading(p),
        }
    }

    /// The component where a nonempty word ends (left endpoint).
    pub fn end_of(&self, w: &Word) -> usize {
        match w {
            Word::Unit(i) => *i,
            Word::Path(p) => self.gen(p[0]).dst,
        }
    }

    /// The component where a word starts (right endpoint).
    pub fn origin_of(&self, w: &Word) -> usize {
        match w {
            Word::Unit(i) => *i,
            Word::Path(p) => self.gen(p[p.len() - 1]).src,
        }
    }

    /// Human-readable word: letters separated by spaces, units as `e_i`.
    pub fn word_string(&self, w: &[GenId]) -> String {
        w.iter().map(|&c| self.name(c)).collect::<Vec<_>>().join(" ")
    }

    pub fn display_word(&self, w: &Word) -> String {
        match w {
            Word::Unit(i) => format!("e{i}"),
            Word::Path(p) => self.word_string(p),
        }
    }

    /// Human-readable element, e.g. `1 e1 - a7 - a7 a6 a5`.
    pub fn display(&self, x: &Element) -> String {
        if x.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (w, c)) in x.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if !mag.is_one() {
                out.push_str(&format_rational(&mag));
                out.push(' ');
            }
            out.push_str(&self.display_word(w));
        }
        out
    }
}

/// A word of the path algebra: an idempotent `e_i` or a nonempty path.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Word {
    Unit(usize),
    Path(Vec<GenId>),
}

impl Word {
    pub fn len(&self) -> usize {
        match self {
            Word::Unit(_) => 0,
            Word::Path(p) => p.len(),
        }
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    pub fn is_unit(&self) -> bool {
        matches!(self, Word::Unit(_))
    }
    pub fn letters(&self) -> &[GenId] {
        match self {
            Word::Unit(_) => &[],
            Word::Path(p) => p,
        }
    }
}

impl Ord for Word {
    /// Total word order: length first, units by component, then lexicographic ids.
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Word::Unit(a), Word::Unit(b)) => a.cmp(b),
            (Word::Unit(_), Word::Path(_)) => Ordering::Less,
            (Word::Path(_), Word::Unit(_)) => Ordering::Greater,
            (Word::Path(a), Word::Path(b)) => a.len().cmp(&b.len()).then_with(|| a.cmp(b)),
        }
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Word::Unit(i) => write!(f, "e{i}"),
            Word::Path(p) => write!(f, "{p:?}"),
        }
    }
}

/// Concatenate two words; `None` if they do not compose.
pub fn word_product(alpha: &Alphabet, u: &Word, v: &Word) -> Option<Word> {
    if alpha.origin_of(u) != alpha.end_of(v) {
        return None;
    }
    Some(match (u, v) {
        (Word::Unit(_), _) => v.clone(),
        (_, Word::Unit(_)) => u.clone(),
        (Word::Path(a), Word::Path(b)) => {
            let mut w = Vec::with_capacity(a.len() + b.len());
            w.extend_from_slice(a);
            w.extend_from_slice(b);
            Word::Path(w)
        }
    })
}

/// A normalized finite linear combination of words.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Element {
    terms: BTreeMap<Word, Q>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }
    pub fn unit(i: usize) -> Self {
        Element::monomial(Word::Unit(i), Q::one())
    }
    pub fn letter(c: GenId) -> Self {
        Element::monomial(Word::Path(vec![c]), Q::one())
    }
    pub fn monomial(w: Word, coef: Q) -> Self {
        let mut e = Element::zero();
        e.add_term(w, coef);
        e
    }
    pub fn path(w: Vec<GenId>, coef: Q) -> Self {
        Element::monomial(Word::Path(w), coef)
    }

    /// Add `coef * w`, keeping the normal form (no zero coefficients).
    pub fn add_term(&mut self, w: Word, coef: Q) {
        if coef.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(c) => {
                *c += coef;
                if c.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, coef);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn len(&self) -> usize {
        self.terms.len()
    }
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn iter(&self) -> impl Iterator<Item = (&Word, &Q)> {
        self.terms.iter()
    }
    pub fn coefficient(&self, w: &Word) -> Q {
        self.terms.get(w).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }
    pub fn add_assign(&mut self, other: &Element) {
        for (w, c) in other.iter() {
            self.add_term(w.clone(), c.clone());
        }
    }
    pub fn sub(&self, other: &Element) -> Element {
        self.add(&other.scale(&-Q::one()))
    }
    pub fn scale(&self, s: &Q) -> Element {
        let mut out = Element::zero();
        for (w, c) in self.iter() {
            out.add_term(w.clone(), c * s);
        }
        out
    }

    /// The grading when all terms share one, `None` for zero or mixed elements.
    pub fn homogeneous_grading(&self, alpha: &Alphabet) -> Option<i64> {
        let mut it = self.iter().map(|(w, _)| alpha.grading_of(w));
        let first = it.next()?;
        it.all(|g| g == first).then_some(first)
    }
}

impl FromIterator<(Word, Q)> for Element {
    fn from_iter<T: IntoIterator<Item = (Word, Q)>>(iter: T) -> Self {
        let mut e = Element::zero();
        for (w, c) in iter {
            e.add_term(w, c);
        }
        e
    }
}

/// Bilinear concatenation product; non-composable pairs contribute zero.
pub fn multiply(alpha: &Alphabet, a: &Element, b: &Element) -> Element {
    let mut out = Element::zero();
    for (u, cu) in a.iter() {
        for (v, cv) in b.iter() {
            if let Some(w) = word_product(alpha, u, v) {
                out.add_term(w, cu * cv);
            }
        }
    }
    out
}

/// Graded cyclic permutation `c_1 c_2 ... c_l -> c_2 ... c_l c_1` with the
/// Koszul sign `(-1)^{|c_1| (|c_2| + ... + |c_l|)}`.
pub fn koszul_rotate(alpha: &Alphabet, w: &[GenId]) -> Result<(Vec<GenId>, i32), AlgebraError> {
    if !alpha.is_cyclically_composable(w) {
        return Err(AlgebraError::NotCyclic(alpha.word_string(w)));
    }
    Ok(rotate_unchecked(w, |c| alpha.grading(c)))
}

/// Rotation with a caller-supplied grading (used for decorated letters).
pub(crate) fn rotate_unchecked(w: &[GenId], grading: impl Fn(GenId) -> i64) -> (Vec<GenId>, i32) {
    let first = grading(w[0]);
    let rest: i64 = w[1..].iter().map(|&c| grading(c)).sum();
    let mut out = w[1..].to_vec();
    out.push(w[0]);
    (out, sign_pow(first * rest))
}

/// A power series in `t` with element coefficients, truncated at `t^N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    order: usize,
    coeffs: Vec<Element>,
}

impl TruncatedSeries {
    pub fn zero(order: usize) -> Self {
        TruncatedSeries { order, coeffs: vec![Element::zero(); order + 1] }
    }
    pub fn order(&self) -> usize {
        self.order
    }
    /// Coefficient of `t^p` (zero beyond the truncation).
    pub fn coeff(&self, p: usize) -> Element {
        self.coeffs.get(p).cloned().unwrap_or_default()
    }
    /// Add `x t^p`; powers above the order are discarded.
    pub fn add_at(&mut self, p: usize, x: &Element) {
        if p <= self.order {
            self.coeffs[p].add_assign(x);
        }
    }
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Element::is_zero)
    }
}

/// Cauchy product truncated at the common order.
pub fn series_multiply(
    alpha: &Alphabet,
    s1: &TruncatedSeries,
    s2: &TruncatedSeries,
) -> Result<TruncatedSeries, AlgebraError> {
    if s1.order != s2.order {
        return Err(AlgebraError::OrderMismatch(s1.order, s2.order));
    }
    let mut out = TruncatedSeries::zero(s1.order);
    for (i, a) in s1.coeffs.iter().enumerate() {
        for (j, b) in s2.coeffs.iter().enumerate() {
            if i + j <= s1.order && !a.is_zero() && !b.is_zero() {
                let prod = multiply(alpha, a, b);
                out.add_at(i + j, &prod);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_comp() -> Alphabet {
        // c goes from component 2 to component 1, b is a self-chord of 2.
        Alphabet::with_generators(2, &[("c", 1, 2, 1), ("b", 2, 2, 2), ("a", 1, 1, 1)]).unwrap()
    }

    #[test]
    fn idempotents_act_by_endpoints() {
        let al = two_comp();
        let c = Element::letter(al.id("c").unwrap());
        // e_1 . c = c because c ends on component 1.
        assert_eq!(multiply(&al, &Element::unit(1), &c), c);
        assert!(multiply(&al, &Element::unit(2), &c).is_zero());
        assert_eq!(multiply(&al, &c, &Element::unit(2)), c);
        assert!(multiply(&al, &Element::unit(1), &Element::unit(2)).is_zero());
        assert_eq!(multiply(&al, &Element::unit(2), &Element::unit(2)), Element::unit(2));
    }

    #[test]
    fn self_chords_concatenate() {
        let al = Alphabet::with_generators(1, &[("a7", 0, 1, 1), ("a8", 0, 1, 1)]).unwrap();
        let p = multiply(&al, &Element::letter(1), &Element::letter(0));
        assert_eq!(al.display(&p), "a8 a7");
    }

    #[test]
    fn rotation_examples() {
        let al = Alphabet::with_generators(1, &[("a", 1, 1, 1), ("b", 2, 1, 1)]).unwrap();
        assert_eq!(koszul_rotate(&al, &[0, 1]).unwrap(), (vec![1, 0], 1));
        assert_eq!(koszul_rotate(&al, &[0, 0]).unwrap(), (vec![0, 0], -1));
        assert_eq!(koszul_rotate(&al, &[0]).unwrap(), (vec![0], 1));
        let two = two_comp();
        // c b is composable (src c = 2 = dst b) but not cyclic (src b = 2 != dst c = 1).
        assert!(koszul_rotate(&two, &[0, 1]).is_err());
    }

    #[test]
    fn series_examples() {
        let al = Alphabet::with_generators(1, &[("a", 1, 1, 1), ("b", 2, 1, 1)]).unwrap();
        let mut te = TruncatedSeries::zero(1);
        te.add_at(1, &Element::unit(1));
        assert!(series_multiply(&al, &te, &te).unwrap().is_zero());

        let mut s = TruncatedSeries::zero(2);
        s.add_at(0, &Element::unit(1));
        s.add_at(1, &Element::letter(0));
        let mut e = TruncatedSeries::zero(2);
        e.add_at(0, &Element::unit(1));
        assert_eq!(series_multiply(&al, &s, &e).unwrap(), s);

        let mut ta = TruncatedSeries::zero(3);
        ta.add_at(1, &Element::letter(0));
        let mut tb = TruncatedSeries::zero(3);
        tb.add_at(1, &Element::letter(1));
        let prod = series_multiply(&al, &ta, &tb).unwrap();
        assert_eq!(prod.coeff(2), Element::path(vec![0, 1], qi(1)));
        assert!(prod.coeff(1).is_zero() && prod.coeff(3).is_zero());
        assert!(series_multiply(&al, &ta, &te).is_err());
    }

    #[test]
    fn rationals_round_trip() {
        assert_eq!(parse_rational("\u{2212}3/2").unwrap(), q(-3, 2));
        assert_eq!(format_rational(&q(-3, 2)), "-3/2");
        assert_eq!(format_rational(&qi(4)), "4");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    /// Independent sign oracle: the sign of a permutation of graded letters is
    /// (-1) to the number of inversions between odd letters.
    fn rotation_sign_oracle(grades: &[i64], r: usize) -> i32 {
        let l = grades.len();
        let perm: Vec<usize> = (0..l).map(|i| (i + r) % l).collect();
        let mut s = 1;
        for i in 0..l {
            for j in i + 1..l {
                if perm[i] > perm[j] && grades[perm[i]] % 2 != 0 && grades[perm[j]] % 2 != 0 {
                    s = -s;
                }
            }
        }
        s
    }

    fn one_comp(grades: &[i64]) -> Alphabet {
        let names: Vec<String> = (0..grades.len()).map(|i| format!("g{i}")).collect();
        let gens: Vec<(&str, i64, usize, usize)> =
            names.iter().zip(grades).map(|(n, &g)| (n.as_str(), g, 1, 1)).collect();
        Alphabet::with_generators(1, &gens).unwrap()
    }

    proptest! {
        #[test]
        fn multiply_is_associative(
            xs in proptest::collection::vec((0u32..3, 0u32..3, -3i64..4), 1..4),
            ys in proptest::collection::vec((0u32..3, 0u32..3, -3i64..4), 1..4),
            zs in proptest::collection::vec((0u32..3, 0u32..3, -3i64..4), 1..4),
        ) {
            let al = two_comp();
            let mk = |v: &Vec<(u32, u32, i64)>| -> Element {
                v.iter().map(|&(a, b, c)| (Word::Path(vec![a, b]), qi(c))).collect()
            };
            let (x, y, z) = (mk(&xs), mk(&ys), mk(&zs));
            let left = multiply(&al, &multiply(&al, &x, &y), &z);
            let right = multiply(&al, &x, &multiply(&al, &y, &z));
            prop_assert_eq!(left, right);
        }

        #[test]
        fn product_grading_adds(w1 in proptest::collection::vec(0u32..3, 1..4), w2 in proptest::collection::vec(0u32..3, 1..4)) {
            let al = one_comp(&[1, -2, 3]);
            let x = Element::path(w1.clone(), qi(1));
            let y = Element::path(w2.clone(), qi(1));
            let p = multiply(&al, &x, &y);
            prop_assert_eq!(
                p.homogeneous_grading(&al),
                Some(al.word_grading(&w1) + al.word_grading(&w2))
            );
        }

        #[test]
        fn rotation_matches_inversion_oracle(grades in proptest::collection::vec(-3i64..4, 1..6)) {
            let al = one_comp(&grades);
            let w: Vec<GenId> = (0..grades.len() as u32).collect();
            let mut cur = w.clone();
            let mut total = 1;
            for r in 1..=grades.len() {
                let (next, s) = koszul_rotate(&al, &cur).unwrap();
                total *= s;
                prop_assert_eq!(total, rotation_sign_oracle(&grades, r % grades.len()));
                cur = next;
            }
            prop_assert_eq!(cur, w);
            prop_assert_eq!(total, 1);
        }
    }
}
