//! Built-in example algebras.  The same data ships as TOML documents in the
//! corpus (see [`crate::io::corpus`]); these constructors are the in-memory
//! counterparts used by tests and the CLI.

use crate::algebra::{qi, Alphabet, Element};
use crate::dga::{Dga, DgaMorphism};

/// The standard unknot `Lambda_U` in `S^{2n-1}`: one chord `a` of grading
/// `n - 1` and zero differential.
pub fn unknot(n: i64) -> Dga {
    let alpha = Alphabet::with_generators(1, &[("a", n - 1, 1, 1)]).expect("valid alphabet");
    Dga::with_zero_differential(alpha, n)
}

/// One chord `c` of grading 1 with `d c = 1`.
pub fn dc1_vanishing() -> Dga {
    let alpha = Alphabet::with_generators(1, &[("c", 1, 1, 1)]).expect("valid alphabet");
    let mut d = Dga::with_zero_differential(alpha, 2);
    d.set_differential_named("c", &[(qi(1), &[])]).expect("valid differential");
    d
}

/// Gradings of the chords of the Chekanov knot `Lambda_a`.
pub const CHEKANOV_A_GRADINGS: [(&str, i64); 9] =
    [("a1", 1), ("a2", 1), ("a3", 1), ("a4", 1), ("a5", 2), ("a6", -2), ("a7", 0), ("a8", 0), ("a9", 0)];

/// The Chekanov knot `Lambda_a` with the sign choice
/// `d a1 = 1 - a7 - a7 a6 a5`, `d a2 = 1 - a9 - a5 a6 a9`,
/// `d a3 = 1 + a8 a7`, `d a4 = 1 + a8 a9`.
pub fn chekanov_a() -> Dga {
    let gens: Vec<(&str, i64, usize, usize)> = CHEKANOV_A_GRADINGS.iter().map(|&(n, g)| (n, g, 1, 1)).collect();
    let mut d = Dga::with_zero_differential(Alphabet::with_generators(1, &gens).expect("valid alphabet"), 2);
    let one: &[&str] = &[];
    d.set_differential_named("a1", &[(qi(1), one), (qi(-1), &["a7"]), (qi(-1), &["a7", "a6", "a5"])]).unwrap();
    d.set_differential_named("a2", &[(qi(1), one), (qi(-1), &["a9"]), (qi(-1), &["a5", "a6", "a9"])]).unwrap();
    d.set_differential_named("a3", &[(qi(1), one), (qi(1), &["a8", "a7"])]).unwrap();
    d.set_differential_named("a4", &[(qi(1), one), (qi(1), &["a8", "a9"])]).unwrap();
    d
}

/// The Chekanov knot `Lambda_c`: gradings only, differential unknown.
pub fn chekanov_c() -> Dga {
    let names = ["c1", "c2", "c3", "c4", "c5", "c6", "c7", "c8", "c9"];
    let gens: Vec<(&str, i64, usize, usize)> =
        names.iter().enumerate().map(|(i, &n)| (n, if i < 4 { 1 } else { 0 }, 1, 1)).collect();
    Dga::new(Alphabet::with_generators(1, &gens).expect("valid alphabet"), 2)
}

/// The free algebra `Q<a6>` with `|a6| = -2` and zero differential.
pub fn a_six() -> Dga {
    Dga::with_zero_differential(Alphabet::with_generators(1, &[("a6", -2, 1, 1)]).expect("valid alphabet"), 2)
}

/// The map `phi: LHA(Lambda_a) -> Q<a6>`: `a6 -> a6`, `a7, a9 -> 1`,
/// `a8 -> -1`, the other chords to 0.  Returns the map and its target.
pub fn chekanov_phi() -> (DgaMorphism, Dga) {
    let target = a_six();
    let images = [
        ("a6", Element::letter(0)),
        ("a7", Element::unit(1)),
        ("a8", Element::unit(1).scale(&qi(-1))),
        ("a9", Element::unit(1)),
    ];
    let f = DgaMorphism::from_named(chekanov_a(), target.clone(), &images).expect("grading-preserving");
    (f, target)
}

/// The sphere `Lambda_T` (default `n = 4`) as a partial algebra: all chords
/// with their gradings, `d b1min = d b2min = 1`, everything else unknown.
pub fn lambda_t_dim(n: i64) -> Dga {
    let gens: Vec<(&str, i64, usize, usize)> = vec![
        ("a", n - 1, 1, 1),
        ("cmax", n - 1, 1, 1),
        ("b1max", n - 1, 1, 1),
        ("b2max", n, 1, 1),
        ("e1max", n - 2, 1, 1),
        ("e2max", n - 2, 1, 1),
        ("e3max", n - 2, 1, 1),
        ("cmin", 1, 1, 1),
        ("b1min", 1, 1, 1),
        ("b2min", 1, 1, 1),
        ("e1min", 0, 1, 1),
        ("e2min", 0, 1, 1),
        ("e3min", 0, 1, 1),
    ];
    let mut d = Dga::new(Alphabet::with_generators(1, &gens).expect("valid alphabet"), n);
    let one: &[&str] = &[];
    d.set_differential_named("b1min", &[(qi(1), one)]).unwrap();
    d.set_differential_named("b2min", &[(qi(1), one)]).unwrap();
    d
}

/// [`lambda_t_dim`] at `n = 4`.
pub fn lambda_t() -> Dga {
    lambda_t_dim(4)
}
