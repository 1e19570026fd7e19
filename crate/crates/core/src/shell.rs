//! Shells, Cartesian components and quartet-class algebra.
//!
//! Components of a shell are ordered lexicographically descending in
//! `(ax, ay)`, so a d shell is `xx, xy, xz, yy, yz, zz`. All ERI buffers,
//! packed streams and oracle outputs use this order.

use std::fmt;
use std::str::FromStr;

use crate::error::{EriError, Result};

/// Highest supported angular momentum (f shells).
pub const MAX_L: usize = 3;

/// 1 Å in Bohr.
pub const ANGSTROM_TO_BOHR: f64 = 1.889_725_988_6;

const SHELL_LETTERS: [char; 4] = ['s', 'p', 'd', 'f'];

/// Angular momentum of a shell, `0..=3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Shell(u8);

impl Shell {
    pub const S: Shell = Shell(0);
    pub const P: Shell = Shell(1);
    pub const D: Shell = Shell(2);
    pub const F: Shell = Shell(3);

    pub fn new(l: usize) -> Result<Self> {
        if l > MAX_L {
            return Err(EriError::AngularMomentum(l));
        }
        Ok(Shell(l as u8))
    }

    pub fn l(self) -> usize {
        self.0 as usize
    }

    pub fn letter(self) -> char {
        SHELL_LETTERS[self.l()]
    }

    fn from_letter(c: char) -> Option<Self> {
        SHELL_LETTERS
            .iter()
            .position(|&x| x == c.to_ascii_lowercase())
            .map(|l| Shell(l as u8))
    }

    pub fn num_gtos(self) -> usize {
        let l = self.l();
        (l + 1) * (l + 2) / 2
    }
}

/// Number of Cartesian GTOs in a shell of angular momentum `l`.
pub fn num_gtos(l: usize) -> Result<usize> {
    Ok(Shell::new(l)?.num_gtos())
}

/// Exponent vector `(ax, ay, az)` of one Cartesian GTO.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CartesianComponent {
    pub ax: u8,
    pub ay: u8,
    pub az: u8,
}

impl CartesianComponent {
    pub fn new(ax: u8, ay: u8, az: u8) -> Self {
        CartesianComponent { ax, ay, az }
    }

    pub fn l(&self) -> usize {
        (self.ax + self.ay + self.az) as usize
    }

    /// Exponent along axis 0 (x), 1 (y) or 2 (z).
    #[inline]
    pub fn axis(&self, xi: usize) -> usize {
        match xi {
            0 => self.ax as usize,
            1 => self.ay as usize,
            _ => self.az as usize,
        }
    }
}

/// Components of a shell in the fixed ordering.
pub fn cartesian_components(l: usize) -> Result<Vec<CartesianComponent>> {
    Shell::new(l)?;
    let l = l as u8;
    let mut out = Vec::with_capacity((l as usize + 1) * (l as usize + 2) / 2);
    for ax in (0..=l).rev() {
        for ay in (0..=l - ax).rev() {
            out.push(CartesianComponent::new(ax, ay, l - ax - ay));
        }
    }
    Ok(out)
}

fn double_factorial_odd(l: usize) -> f64 {
    // (2l-1)!!, with (-1)!! = 1
    (1..=l).map(|k| (2 * k - 1) as f64).product()
}

/// Normalization constant shared by all components of a shell.
///
/// Chosen so that the axis-aligned member (`x^L`) has unit self-overlap.
pub fn normalization(alpha: f64, comp: CartesianComponent) -> f64 {
    shell_normalization(alpha, comp.l())
}

pub(crate) fn shell_normalization(alpha: f64, l: usize) -> f64 {
    let base = (2.0 * alpha / std::f64::consts::PI).powf(0.75);
    base * (4.0 * alpha).powf(l as f64 / 2.0) / double_factorial_odd(l).sqrt()
}

/// The four angular momenta of a quartet `[ab|cd]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuartetClass {
    pub shells: [Shell; 4],
}

impl QuartetClass {
    pub fn new(la: usize, lb: usize, lc: usize, ld: usize) -> Result<Self> {
        Ok(QuartetClass {
            shells: [Shell::new(la)?, Shell::new(lb)?, Shell::new(lc)?, Shell::new(ld)?],
        })
    }

    /// Index in `0..256`, with `la` most significant.
    pub fn index(&self) -> usize {
        self.shells.iter().fold(0, |acc, s| acc * 4 + s.l())
    }

    pub fn from_index(idx: usize) -> Self {
        assert!(idx < 256);
        let l = |k: usize| Shell(((idx >> (2 * (3 - k))) & 3) as u8);
        QuartetClass {
            shells: [l(0), l(1), l(2), l(3)],
        }
    }

    /// All 256 generic classes in index order.
    pub fn all() -> impl Iterator<Item = QuartetClass> {
        (0..256).map(QuartetClass::from_index)
    }

    /// The 55 canonical classes in index order.
    pub fn all_canonical() -> impl Iterator<Item = QuartetClass> {
        QuartetClass::all().filter(|c| c.is_canonical())
    }

    pub fn ls(&self) -> [usize; 4] {
        self.shells.map(|s| s.l())
    }

    pub fn la(&self) -> usize {
        self.shells[0].l()
    }
    pub fn lb(&self) -> usize {
        self.shells[1].l()
    }
    pub fn lc(&self) -> usize {
        self.shells[2].l()
    }
    pub fn ld(&self) -> usize {
        self.shells[3].l()
    }

    pub fn total_l(&self) -> usize {
        self.ls().iter().sum()
    }

    pub fn n_g(&self) -> [usize; 4] {
        self.shells.map(|s| s.num_gtos())
    }

    pub fn n_ab(&self) -> usize {
        let g = self.n_g();
        g[0] * g[1]
    }

    pub fn n_cd(&self) -> usize {
        let g = self.n_g();
        g[2] * g[3]
    }

    /// Number of Rys roots, `floor(L/2) + 1`.
    pub fn n_rys(&self) -> usize {
        self.total_l() / 2 + 1
    }

    pub fn is_canonical(&self) -> bool {
        let [la, lb, lc, ld] = self.ls();
        la >= lb && lc >= ld && self.n_ab() >= self.n_cd()
    }

    /// Canonical representative and the permutation taking `self` onto it.
    ///
    /// Among permutations reaching the canonical class, the one with the
    /// fewest flags set is returned.
    pub fn canonicalize(&self) -> (QuartetClass, QuartetPermutation) {
        for p in QuartetPermutation::all_by_weight() {
            let c = self.permuted(p);
            if c.is_canonical() {
                return (c, p);
            }
        }
        unreachable!("every symmetry orbit contains a canonical class")
    }

    pub fn permuted(&self, p: QuartetPermutation) -> QuartetClass {
        QuartetClass {
            shells: p.apply(self.shells),
        }
    }

    /// Number of ERIs per quartet.
    pub fn num_eriq(&self) -> usize {
        self.n_g().iter().product()
    }

    /// Position of `[a b|c d]` (component indices) in the logical ERI order:
    /// fused `ab = a*n_gb + b` runs fastest, fused `cd = c*n_gd + d` outermost.
    #[inline]
    pub fn eri_index(&self, a: usize, b: usize, c: usize, d: usize) -> usize {
        let g = self.n_g();
        (c * g[3] + d) * g[0] * g[1] + a * g[1] + b
    }
}

/// Number of ERIs in one quartet of `class`.
pub fn num_eriq(class: &QuartetClass) -> usize {
    class.num_eriq()
}

impl fmt::Display for QuartetClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.shells.map(|s| s.letter());
        write!(f, "[{}{}|{}{}]", s[0], s[1], s[2], s[3])
    }
}

impl FromStr for QuartetClass {
    type Err = EriError;

    /// Accepts `[fd|ps]`, `fd|ps`, `fd,ps`, `fdps` (case-insensitive).
    fn from_str(s: &str) -> Result<Self> {
        let letters: Vec<char> = s
            .trim()
            .chars()
            .filter(|c| !matches!(c, '[' | ']' | '|' | ',' | ' ' | '(' | ')'))
            .collect();
        if letters.len() != 4 {
            return Err(EriError::ClassSyntax(s.to_string()));
        }
        let mut shells = [Shell::S; 4];
        for (slot, &c) in shells.iter_mut().zip(&letters) {
            *slot = Shell::from_letter(c).ok_or_else(|| EriError::ClassSyntax(s.to_string()))?;
        }
        Ok(QuartetClass { shells })
    }
}

/// Element of the eightfold symmetry group of `[ab|cd]`.
///
/// Applied as: swap a and b, then swap c and d, then exchange bra and ket.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct QuartetPermutation {
    pub swap_ab: bool,
    pub swap_cd: bool,
    pub swap_braket: bool,
}

impl QuartetPermutation {
    pub const IDENTITY: QuartetPermutation = QuartetPermutation {
        swap_ab: false,
        swap_cd: false,
        swap_braket: false,
    };

    pub fn from_bits(bits: u8) -> Self {
        QuartetPermutation {
            swap_ab: bits & 1 != 0,
            swap_cd: bits & 2 != 0,
            swap_braket: bits & 4 != 0,
        }
    }

    pub fn all() -> impl Iterator<Item = QuartetPermutation> {
        (0..8u8).map(QuartetPermutation::from_bits)
    }

    fn all_by_weight() -> impl Iterator<Item = QuartetPermutation> {
        let mut v: Vec<_> = QuartetPermutation::all().collect();
        v.sort_by_key(|p| (p.weight(), p.swap_braket, p.swap_cd));
        v.into_iter()
    }

    fn weight(&self) -> u8 {
        self.swap_ab as u8 + self.swap_cd as u8 + self.swap_braket as u8
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    pub fn apply<T: Copy>(&self, x: [T; 4]) -> [T; 4] {
        let mut y = x;
        if self.swap_ab {
            y.swap(0, 1);
        }
        if self.swap_cd {
            y.swap(2, 3);
        }
        if self.swap_braket {
            y = [y[2], y[3], y[0], y[1]];
        }
        y
    }

    pub fn inverse(&self) -> QuartetPermutation {
        if self.swap_braket {
            QuartetPermutation {
                swap_ab: self.swap_cd,
                swap_cd: self.swap_ab,
                swap_braket: true,
            }
        } else {
            *self
        }
    }
}

impl fmt::Display for QuartetPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "identity");
        }
        let names: Vec<&str> = [
            (self.swap_ab, "swap_ab"),
            (self.swap_cd, "swap_cd"),
            (self.swap_braket, "swap_braket"),
        ]
        .iter()
        .filter(|(on, _)| *on)
        .map(|(_, n)| *n)
        .collect();
        write!(f, "{}", names.join("+"))
    }
}

/// Canonical class of `class` plus the permutation that reaches it.
pub fn canonicalize(class: &QuartetClass) -> (QuartetClass, QuartetPermutation) {
    class.canonicalize()
}

pub fn is_canonical(class: &QuartetClass) -> bool {
    class.is_canonical()
}

/// One primitive Cartesian shell: center (Bohr), exponent and angular momentum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrimitiveShell {
    pub center: [f64; 3],
    pub exponent: f64,
    pub shell: Shell,
}

impl PrimitiveShell {
    pub fn new(center: [f64; 3], exponent: f64, l: usize) -> Result<Self> {
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(EriError::Exponent(exponent));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(EriError::Center);
        }
        Ok(PrimitiveShell {
            center,
            exponent,
            shell: Shell::new(l)?,
        })
    }

    pub fn normalization(&self) -> f64 {
        shell_normalization(self.exponent, self.shell.l())
    }
}

/// The four primitive shells of one quartet, in `a, b, c, d` order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuartetInput {
    pub shells: [PrimitiveShell; 4],
}

impl QuartetInput {
    pub fn new(shells: [PrimitiveShell; 4]) -> Self {
        QuartetInput { shells }
    }

    pub fn class(&self) -> QuartetClass {
        QuartetClass {
            shells: self.shells.map(|s| s.shell),
        }
    }

    /// Copy with every center moved by `shift`.
    pub fn translated(&self, shift: [f64; 3]) -> QuartetInput {
        let mut out = *self;
        for s in out.shells.iter_mut() {
            for (c, d) in s.center.iter_mut().zip(shift) {
                *c += d;
            }
        }
        out
    }
}

/// Reorder the shells of `q` according to `p`.
pub fn permute_input(q: &QuartetInput, p: QuartetPermutation) -> QuartetInput {
    QuartetInput {
        shells: p.apply(q.shells),
    }
}

/// Reindex ERIs of `class` (logical order) into the order of the permuted class.
///
/// If `values` are the ERIs of input `q`, the result equals the ERIs of
/// `permute_input(q, p)`.
pub fn permute_eris<T: Copy>(class: &QuartetClass, values: &[T], p: QuartetPermutation) -> Vec<T> {
    let new_class = class.permuted(p);
    let src = p.apply([0usize, 1, 2, 3]);
    let g = new_class.n_g();
    let mut out = Vec::with_capacity(values.len());
    // iterate in new logical order: cd outer, ab inner
    for c in 0..g[2] {
        for d in 0..g[3] {
            for a in 0..g[0] {
                for b in 0..g[1] {
                    let new_idx = [a, b, c, d];
                    let mut old = [0usize; 4];
                    for slot in 0..4 {
                        old[src[slot]] = new_idx[slot];
                    }
                    out.push(values[class.eri_index(old[0], old[1], old[2], old[3])]);
                }
            }
        }
    }
    out
}
