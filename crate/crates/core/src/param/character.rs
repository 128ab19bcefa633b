//! Unitary characters of E^x modulo the free-abelian model: integer exponents over
//! named generators, each carrying its restriction grade to F^x, times a power of
//! `|.|_E`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;

use num_rational::Ratio;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use super::ParamError;
use crate::sign::Sign;

/// Restriction of a character to F^x: trivial or the quadratic character omega_{E/F}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Grade {
    Trivial,
    Omega,
}

impl Grade {
    /// omega^k.
    pub fn from_parity(k: i64) -> Grade {
        if k.rem_euclid(2) == 0 {
            Grade::Trivial
        } else {
            Grade::Omega
        }
    }

    fn parity(self) -> i64 {
        match self {
            Grade::Trivial => 0,
            Grade::Omega => 1,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Grade::Trivial => "trivial",
            Grade::Omega => "omega",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    pub name: String,
    pub grade: Grade,
}

impl Generator {
    pub fn new(name: impl Into<String>, grade: Grade) -> Self {
        Generator { name: name.into(), grade }
    }
}

pub type Slope = Ratio<i64>;

/// A character `prod g^e * |.|_E^slope`, always kept in normal form (no zero exponents).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CharE {
    exponents: BTreeMap<Generator, i64>,
    slope: Slope,
}

impl Default for CharE {
    fn default() -> Self {
        CharE::trivial()
    }
}

impl CharE {
    pub fn trivial() -> CharE {
        CharE { exponents: BTreeMap::new(), slope: Slope::from_integer(0) }
    }

    pub fn generator(g: &Generator) -> CharE {
        let mut exponents = BTreeMap::new();
        exponents.insert(g.clone(), 1);
        CharE { exponents, slope: Slope::from_integer(0) }
    }

    /// `|.|_E^s`.
    pub fn abs_power(s: Slope) -> CharE {
        CharE { exponents: BTreeMap::new(), slope: s }
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.is_empty() && self.slope == Slope::from_integer(0)
    }

    pub fn slope(&self) -> Slope {
        self.slope
    }

    pub fn is_unitary(&self) -> bool {
        self.slope == Slope::from_integer(0)
    }

    pub fn exponents(&self) -> impl Iterator<Item = (&Generator, i64)> {
        self.exponents.iter().map(|(g, e)| (g, *e))
    }

    pub fn exponent(&self, name: &str) -> i64 {
        self.exponents.iter().find(|(g, _)| g.name == name).map(|(_, e)| *e).unwrap_or(0)
    }

    pub fn inv(&self) -> CharE {
        CharE { exponents: self.exponents.iter().map(|(g, e)| (g.clone(), -e)).collect(), slope: -self.slope }
    }

    pub fn pow(&self, k: i64) -> CharE {
        let mut out = CharE { exponents: self.exponents.iter().map(|(g, e)| (g.clone(), e * k)).collect(), slope: self.slope * k };
        out.normalize();
        out
    }

    /// Restriction to F^x; `|.|_E` restricts to `|.|_F^2`, which does not affect the grade.
    pub fn grade(&self) -> Grade {
        Grade::from_parity(self.exponents.iter().map(|(g, e)| g.grade.parity() * e).sum())
    }

    /// Sign of a unitary character as a conjugate self-dual representation:
    /// +1 when it restricts trivially to F^x, -1 when it restricts to omega.
    pub fn conj_dual_sign(&self) -> Result<Sign, ParamError> {
        if !self.is_unitary() {
            return Err(ParamError::NonUnitarySlope(self.to_string()));
        }
        Ok(match self.grade() {
            Grade::Trivial => Sign::Plus,
            Grade::Omega => Sign::Minus,
        })
    }

    /// `c(mu)^v`. The unitary part is conjugate self-dual, so only the slope flips.
    pub fn conj_dual(&self) -> CharE {
        CharE { exponents: self.exponents.clone(), slope: -self.slope }
    }

    /// Replace every occurrence of the generator `name` by `value`.
    pub fn substitute(&self, name: &str, value: &CharE) -> CharE {
        let mut out = CharE { exponents: BTreeMap::new(), slope: self.slope };
        for (g, e) in &self.exponents {
            if g.name == name {
                out = &out * &value.pow(*e);
            } else {
                out = &out * &CharE::generator(g).pow(*e);
            }
        }
        out
    }

    fn normalize(&mut self) {
        self.exponents.retain(|_, e| *e != 0);
    }
}

impl Mul for &CharE {
    type Output = CharE;
    fn mul(self, rhs: &CharE) -> CharE {
        let mut exponents = self.exponents.clone();
        for (g, e) in &rhs.exponents {
            *exponents.entry(g.clone()).or_insert(0) += e;
        }
        let mut out = CharE { exponents, slope: self.slope + rhs.slope };
        out.normalize();
        out
    }
}

impl Mul for CharE {
    type Output = CharE;
    fn mul(self, rhs: CharE) -> CharE {
        &self * &rhs
    }
}

impl fmt::Display for CharE {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return f.write_str("1");
        }
        let mut parts: Vec<String> =
            self.exponents.iter().map(|(g, e)| if *e == 1 { g.name.clone() } else { format!("{}^{}", g.name, e) }).collect();
        if !self.is_unitary() {
            parts.push(format!("|.|^{}", self.slope));
        }
        f.write_str(&parts.join(" * "))
    }
}

impl Serialize for CharE {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let exps: BTreeMap<&str, i64> = self.exponents.iter().map(|(g, e)| (g.name.as_str(), *e)).collect();
        let mut map = serializer.serialize_map(Some(2))?;
        map.serialize_entry("exponents", &exps)?;
        map.serialize_entry("slope", &self.slope.to_string())?;
        map.end()
    }
}

/// The three characters the theta and GGP machinery is phrased in:
/// chi (restricting to omega), chi_V and chi_W.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardCharacters {
    pub chi: CharE,
    pub chi_v: CharE,
    pub chi_w: CharE,
}

impl StandardCharacters {
    /// Independent generators, graded for `dim V = n + 2` and `dim W = n`.
    pub fn independent(n: u32) -> Self {
        let chi = CharE::generator(&Generator::new("chi", Grade::Omega));
        let g = Grade::from_parity(n as i64);
        StandardCharacters {
            chi,
            chi_v: CharE::generator(&Generator::new("chi_V", g)),
            chi_w: CharE::generator(&Generator::new("chi_W", g)),
        }
    }

    /// `chi_V = chi^(n+2)`, `chi_W = chi^n`.
    pub fn identified(n: u32) -> Self {
        let chi = CharE::generator(&Generator::new("chi", Grade::Omega));
        StandardCharacters { chi_v: chi.pow(n as i64 + 2), chi_w: chi.pow(n as i64), chi }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gens() -> (CharE, CharE, CharE) {
        let s = StandardCharacters::independent(3);
        (s.chi, s.chi_v, s.chi_w)
    }

    #[test]
    fn conj_dual_sign_follows_grade() {
        let (chi, chi_v, chi_w) = gens();
        assert_eq!(chi.conj_dual_sign().unwrap(), Sign::Minus);
        let even = StandardCharacters::independent(4);
        assert_eq!(even.chi_w.conj_dual_sign().unwrap(), Sign::Plus);
        // dim V = n + 1 = 4, dim W = n = 3: chi_V^-1 chi_W restricts to omega^(3-4).
        let s = StandardCharacters::independent(3);
        let v4 = CharE::generator(&Generator::new("chi_V4", Grade::Trivial));
        assert_eq!((&v4.inv() * &s.chi_w).conj_dual_sign().unwrap(), Sign::Minus);
        assert_eq!((&chi_v * &chi_w).grade(), Grade::Trivial);
        assert_eq!((&chi * &chi_w).grade(), Grade::Trivial);
    }

    #[test]
    fn slope_blocks_conj_dual_sign() {
        let (_, _, chi_w) = gens();
        let half = &chi_w * &CharE::abs_power(Slope::new(1, 2));
        assert!(matches!(half.conj_dual_sign(), Err(ParamError::NonUnitarySlope(_))));
        assert_eq!(half.conj_dual(), &chi_w * &CharE::abs_power(Slope::new(-1, 2)));
    }

    #[test]
    fn normal_form_and_inverse() {
        let (chi, chi_v, _) = gens();
        let a = &(&chi * &chi_v) * &chi.inv();
        assert_eq!(a, chi_v);
        assert!((&a * &a.inv()).is_trivial());
        assert_eq!(a.to_string(), "chi_V");
        assert_eq!(chi_v.inv().to_string(), "chi_V^-1");
        assert_eq!(CharE::trivial().to_string(), "1");
    }

    #[test]
    fn identification_substitutes() {
        let ind = StandardCharacters::independent(3);
        let id = StandardCharacters::identified(3);
        let mu = &ind.chi_v.inv() * &ind.chi_w;
        let sub = mu.substitute("chi_V", &id.chi_v).substitute("chi_W", &id.chi_w);
        assert_eq!(sub, id.chi.pow(-2));
    }
}
