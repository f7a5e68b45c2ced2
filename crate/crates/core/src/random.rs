//! Random valid DGAs for property tests and sweeps.
//!
//! Generators are added in order of grading; the differential of each new
//! generator is a random combination of cycles built from earlier
//! generators: products of earlier generators with zero differential,
//! boundaries `d(y)` of earlier words, and (for a grading-1 self-chord) the
//! idempotent.  Such a differential squares to zero by construction.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::algebra::{qi, Alphabet, Element, GenId, Generator, Word};
use crate::dga::Dga;

/// Shape of the random DGAs.
#[derive(Clone, Copy, Debug)]
pub struct RandomDgaShape {
    pub max_generators: usize,
    pub max_components: usize,
    pub min_grading: i64,
    pub max_grading: i64,
    /// Longest word used in a differential.
    pub max_word: usize,
    pub ambient_dim: i64,
}

impl Default for RandomDgaShape {
    fn default() -> Self {
        RandomDgaShape { max_generators: 4, max_components: 2, min_grading: 1, max_grading: 4, max_word: 3, ambient_dim: 3 }
    }
}

/// Composable words over `letters` of length `1..=max_len` with grading `g`
/// running from component `src` to component `dst`.
fn words_between(alpha: &Alphabet, letters: &[GenId], g: i64, src: usize, dst: usize, max_len: usize) -> Vec<Vec<GenId>> {
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<GenId>> = letters.iter().filter(|&&c| alpha.gen(c).dst == dst).map(|&c| vec![c]).collect();
    for _ in 0..max_len {
        for w in &frontier {
            if alpha.word_grading(w) == g && alpha.gen(*w.last().unwrap()).src == src {
                out.push(w.clone());
            }
        }
        let mut next = Vec::new();
        for w in &frontier {
            let end = alpha.gen(*w.last().unwrap()).src;
            for &c in letters {
                if alpha.gen(c).dst == end {
                    let mut v = w.clone();
                    v.push(c);
                    next.push(v);
                }
            }
        }
        frontier = next;
    }
    out
}

/// A random DGA satisfying `d^2 = 0`, gradings in the shape's range.
pub fn random_dga<R: Rng>(rng: &mut R, shape: &RandomDgaShape) -> Dga {
    let k = rng.gen_range(1..=shape.max_components);
    let n = rng.gen_range(1..=shape.max_generators);
    let mut gradings: Vec<i64> = (0..n).map(|_| rng.gen_range(shape.min_grading..=shape.max_grading)).collect();
    gradings.sort_unstable();
    let mut alpha = Alphabet::new(k).expect("k >= 1");
    for (i, &g) in gradings.iter().enumerate() {
        let (src, dst) = (rng.gen_range(1..=k), rng.gen_range(1..=k));
        alpha.push(Generator { name: format!("g{}", i + 1), grading: g, src, dst }).expect("fresh name");
    }
    let mut dga = Dga::with_zero_differential(alpha.clone(), shape.ambient_dim);
    for c in 0..n as GenId {
        let gen = alpha.gen(c).clone();
        let earlier: Vec<GenId> = (0..c).filter(|&l| alpha.grading(l) < gen.grading || gen.grading <= 0).collect();
        let cycles: Vec<GenId> = earlier.iter().copied().filter(|&l| dga.differential(l).is_some_and(Element::is_zero)).collect();
        let mut dc = Element::zero();
        let cycle_words = words_between(&alpha, &cycles, gen.grading - 1, gen.src, gen.dst, shape.max_word);
        for _ in 0..rng.gen_range(0..=2) {
            if let Some(w) = cycle_words.choose(rng) {
                dc.add_term(Word::Path(w.clone()), qi(rng.gen_range(-2..=2)));
            }
        }
        let ys = words_between(&alpha, &earlier, gen.grading, gen.src, gen.dst, shape.max_word);
        if let Some(y) = ys.choose(rng) {
            if rng.gen_bool(0.7) {
                let dy = dga.extend_leibniz(&Element::path(y.clone(), qi(1))).expect("complete so far");
                dc.add_assign(&dy.scale(&qi(rng.gen_range(-2..=2))));
            }
        }
        if gen.grading == 1 && gen.src == gen.dst && rng.gen_bool(0.4) {
            dc.add_term(Word::Unit(gen.src), qi(rng.gen_range(-1..=1)));
        }
        dga.set_differential(c, dc).expect("endpoints respected");
    }
    debug_assert!(dga.check_d_squared().passes());
    dga
}
