//! The Lie superalgebra of loop modes on one even pair `(a, b)` and one odd
//! pair `(phi, psi)`.
//!
//! The only nonzero brackets are `[a_i, b_{-i}] = [psi_i, phi_{-i}] = 1`, so a
//! bracket is always a central scalar. Modes are indexed so that `x_n` shifts
//! conformal weight by `-n`.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::linalg::{int, Scalar};

/// Generator kinds in the fixed PBW order `A < B < Phi < Psi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Kind {
    A,
    B,
    Phi,
    Psi,
}

impl Kind {
    pub const ALL: [Kind; 4] = [Kind::A, Kind::B, Kind::Phi, Kind::Psi];

    pub fn is_odd(self) -> bool {
        matches!(self, Kind::Phi | Kind::Psi)
    }

    /// The kind with which this one has a nonzero bracket.
    pub fn partner(self) -> Kind {
        match self {
            Kind::A => Kind::B,
            Kind::B => Kind::A,
            Kind::Phi => Kind::Psi,
            Kind::Psi => Kind::Phi,
        }
    }

    /// Conformal weight of the generating field (`a`, `psi` have weight one).
    pub fn field_weight(self) -> i64 {
        match self {
            Kind::A | Kind::Psi => 1,
            Kind::B | Kind::Phi => 0,
        }
    }

    pub fn fermion(self) -> i64 {
        match self {
            Kind::Phi => 1,
            Kind::Psi => -1,
            _ => 0,
        }
    }

    /// Eigenvalue of the Euler field `b d/db`: `b`, `phi` carry `+1`; `a`, `psi` carry `-1`.
    pub fn charge(self) -> i64 {
        match self {
            Kind::B | Kind::Phi => 1,
            Kind::A | Kind::Psi => -1,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Kind::A => "a",
            Kind::B => "b",
            Kind::Phi => "phi",
            Kind::Psi => "psi",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Kind> {
        Kind::ALL.into_iter().find(|k| k.symbol() == s)
    }
}

/// One loop mode `x_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GenMode {
    pub kind: Kind,
    pub mode: i64,
}

impl GenMode {
    pub const fn new(kind: Kind, mode: i64) -> Self {
        Self { kind, mode }
    }
    pub const fn a(mode: i64) -> Self {
        Self::new(Kind::A, mode)
    }
    pub const fn b(mode: i64) -> Self {
        Self::new(Kind::B, mode)
    }
    pub const fn phi(mode: i64) -> Self {
        Self::new(Kind::Phi, mode)
    }
    pub const fn psi(mode: i64) -> Self {
        Self::new(Kind::Psi, mode)
    }

    pub fn is_odd(&self) -> bool {
        self.kind.is_odd()
    }

    pub fn weight_shift(&self) -> i64 {
        -self.mode
    }

    pub fn degree(&self) -> i64 {
        match (self.kind, self.mode) {
            (Kind::B, 0) => 1,
            (Kind::A, 0) => -1,
            (_, n) => n,
        }
    }

    pub fn fermion_shift(&self) -> i64 {
        self.kind.fermion()
    }

    pub fn charge_shift(&self) -> i64 {
        self.kind.charge()
    }

    /// Creation modes generate the module from its weight-zero part.
    pub fn is_creation(&self) -> bool {
        self.mode < 0
    }

    /// Whether the mode sits on the annihilation side of the field normal
    /// ordering, i.e. `x_n = x_(n + Δ - 1)` with a non-negative index in
    /// parentheses. This differs from `mode > 0` only for `a_0` and `psi_0`.
    pub fn is_field_annihilator(&self) -> bool {
        self.mode >= 1 - self.kind.field_weight()
    }
}

impl fmt::Display for GenMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.kind.symbol(), self.mode)
    }
}

/// A generator with a sign, as produced by the antiinvolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignedGen {
    pub sign: i64,
    pub gen: GenMode,
}

impl SignedGen {
    pub fn coefficient(&self) -> Scalar {
        int(self.sign)
    }
}

/// The central value of the supercommutator `[x, y]`.
pub fn super_bracket(x: GenMode, y: GenMode) -> Scalar {
    if x.mode + y.mode != 0 {
        return Scalar::zero();
    }
    match (x.kind, y.kind) {
        (Kind::A, Kind::B) => Scalar::one(),
        (Kind::B, Kind::A) => -Scalar::one(),
        (Kind::Psi, Kind::Phi) | (Kind::Phi, Kind::Psi) => Scalar::one(),
        _ => Scalar::zero(),
    }
}

/// The antiinvolution: mode index negated, sign `-1` for `a` and `psi`.
pub fn eta(x: GenMode) -> SignedGen {
    let sign = match x.kind {
        Kind::A | Kind::Psi => -1,
        Kind::B | Kind::Phi => 1,
    };
    SignedGen { sign, gen: GenMode::new(x.kind, -x.mode) }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grading {
    pub weight_shift: i64,
    pub degree: i64,
    pub odd: bool,
}

pub fn grading(x: GenMode) -> Grading {
    Grading { weight_shift: x.weight_shift(), degree: x.degree(), odd: x.is_odd() }
}

/// `(-1)^(p q)` for parities `p`, `q`.
pub fn koszul(p: bool, q: bool) -> Scalar {
    if p && q {
        -Scalar::one()
    } else {
        Scalar::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_modes(bound: i64) -> Vec<GenMode> {
        Kind::ALL
            .into_iter()
            .flat_map(|k| (-bound..=bound).map(move |n| GenMode::new(k, n)))
            .collect()
    }

    #[test]
    fn bracket_examples() {
        assert_eq!(super_bracket(GenMode::a(1), GenMode::b(-1)), int(1));
        assert_eq!(super_bracket(GenMode::psi(2), GenMode::phi(-2)), int(1));
        assert_eq!(super_bracket(GenMode::a(1), GenMode::b(-2)), int(0));
        assert_eq!(super_bracket(GenMode::phi(2), GenMode::phi(-2)), int(0));
        assert_eq!(super_bracket(GenMode::b(-1), GenMode::a(1)), int(-1));
    }

    #[test]
    fn eta_examples() {
        assert_eq!(eta(GenMode::b(3)), SignedGen { sign: 1, gen: GenMode::b(-3) });
        assert_eq!(eta(GenMode::a(2)), SignedGen { sign: -1, gen: GenMode::a(-2) });
        assert_eq!(eta(GenMode::psi(0)), SignedGen { sign: -1, gen: GenMode::psi(0) });
    }

    #[test]
    fn grading_examples() {
        assert_eq!(grading(GenMode::b(0)), Grading { weight_shift: 0, degree: 1, odd: false });
        assert_eq!(grading(GenMode::a(-3)), Grading { weight_shift: 3, degree: -3, odd: false });
        assert_eq!(grading(GenMode::phi(0)), Grading { weight_shift: 0, degree: 0, odd: true });
    }

    #[test]
    fn bracket_super_antisymmetry() {
        for x in all_modes(4) {
            for y in all_modes(4) {
                let lhs = super_bracket(y, x);
                let rhs = -koszul(x.is_odd(), y.is_odd()) * super_bracket(x, y);
                assert_eq!(lhs, rhs, "{x} {y}");
            }
        }
    }

    #[test]
    fn eta_is_an_antiinvolution_on_brackets() {
        for x in all_modes(4) {
            let ex = eta(x);
            let back = eta(ex.gen);
            assert_eq!(back.gen, x);
            assert_eq!(ex.sign * back.sign, 1);
            for y in all_modes(4) {
                // eta(x y) = (-1)^(x y) eta(y) eta(x), so on central values
                // [eta y, eta x] = (-1)^(x y) [x, y].
                let ey = eta(y);
                let reversed = ex.coefficient() * ey.coefficient() * super_bracket(ey.gen, ex.gen);
                let expected = koszul(x.is_odd(), y.is_odd()) * super_bracket(x, y);
                assert_eq!(reversed, expected, "{x} {y}");
            }
        }
    }

    #[test]
    fn nonzero_brackets_are_balanced() {
        for x in all_modes(4) {
            for y in all_modes(4) {
                if !super_bracket(x, y).is_zero() {
                    assert_eq!(x.weight_shift() + y.weight_shift(), 0);
                    assert_eq!(x.degree() + y.degree(), 0);
                }
            }
        }
    }
}
