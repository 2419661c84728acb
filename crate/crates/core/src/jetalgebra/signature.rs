use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Names of the independent variables `x^1..x^m` and of the dependent
/// variables `u^α`, `α ∈ A`.
///
/// Dependent ids are positions in [`Signature::dependent`]. A signature may
/// carry formal covector families: each family repeats the base dependent
/// set under fresh names, and the extra ids follow the base ones.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    independent: Vec<String>,
    dependent: Vec<String>,
    base: usize,
}

impl Signature {
    pub fn new<I, J, S, T>(independent: I, dependent: J) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = T>,
        S: Into<String>,
        T: Into<String>,
    {
        let independent: Vec<String> = independent.into_iter().map(Into::into).collect();
        let dependent: Vec<String> = dependent.into_iter().map(Into::into).collect();
        if independent.is_empty() {
            return Err(Error::InvalidSignature("at least one independent variable is required".into()));
        }
        if dependent.is_empty() {
            return Err(Error::InvalidSignature("at least one dependent variable is required".into()));
        }
        let all: Vec<&String> = independent.iter().chain(dependent.iter()).collect();
        for (k, name) in all.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::InvalidSignature("empty variable name".into()));
            }
            if all[..k].contains(name) {
                return Err(Error::InvalidSignature(format!("duplicate variable name `{name}`")));
            }
        }
        let base = dependent.len();
        Ok(Signature { independent, dependent, base })
    }

    /// The scalar setting: one independent `x`, one dependent `u`.
    pub fn scalar() -> Self {
        Signature::new(["x"], ["u"]).expect("valid names")
    }

    /// Number of independent variables `m`.
    pub fn m(&self) -> usize {
        self.independent.len()
    }

    /// Number of dependent ids, formal families included.
    pub fn dep_count(&self) -> usize {
        self.dependent.len()
    }

    /// `|A|`, the dependent variables the signature was declared with.
    pub fn base_dep_count(&self) -> usize {
        self.base
    }

    pub fn formal_family_count(&self) -> usize {
        (self.dependent.len() - self.base) / self.base
    }

    pub fn independent(&self) -> &[String] {
        &self.independent
    }

    pub fn dependent(&self) -> &[String] {
        &self.dependent
    }

    pub fn independent_id(&self, name: &str) -> Option<usize> {
        self.independent.iter().position(|n| n == name)
    }

    pub fn dependent_id(&self, name: &str) -> Option<usize> {
        self.dependent.iter().position(|n| n == name)
    }

    pub fn check_independent(&self, mu: usize) -> Result<()> {
        if mu < self.m() {
            Ok(())
        } else {
            Err(Error::IndependentOutOfRange { index: mu, count: self.m() })
        }
    }

    pub fn check_dependent(&self, alpha: usize) -> Result<()> {
        if alpha < self.dep_count() {
            Ok(())
        } else {
            Err(Error::DependentOutOfRange { index: alpha, count: self.dep_count() })
        }
    }

    /// Appends `count` formal covector families `θ^k = (θ^k_α)`, `α ∈ A`.
    ///
    /// Family names use `θ`, which the expression syntax never produces, so
    /// they cannot collide with declared names.
    pub fn with_formal_families(&self, count: usize) -> Signature {
        let mut out = self.clone();
        let start = self.formal_family_count();
        for k in start..start + count {
            for name in &self.dependent[..self.base] {
                let fresh = if self.base == 1 {
                    format!("θ{}", k + 1)
                } else {
                    format!("θ{}{}", k + 1, name)
                };
                out.dependent.push(fresh);
            }
        }
        out
    }

    /// The dependent id of `θ^family_α` (`family` counts from zero).
    pub fn formal_id(&self, family: usize, alpha: usize) -> usize {
        debug_assert!(family < self.formal_family_count() && alpha < self.base);
        self.base * (family + 1) + alpha
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_names() {
        assert!(Signature::new(Vec::<String>::new(), ["u"]).is_err());
        assert!(Signature::new(["x"], Vec::<String>::new()).is_err());
        assert!(Signature::new(["x", "x"], ["u"]).is_err());
        assert!(Signature::new(["x"], ["x"]).is_err());
        assert!(Signature::new(["x"], [""]).is_err());
    }

    #[test]
    fn formal_families_follow_base() {
        let sig = Signature::new(["x"], ["u", "v"]).unwrap().with_formal_families(3);
        assert_eq!(sig.dep_count(), 8);
        assert_eq!(sig.base_dep_count(), 2);
        assert_eq!(sig.formal_family_count(), 3);
        assert_eq!(sig.formal_id(2, 1), 7);
        assert_eq!(sig.dependent()[7], "θ3v");
        assert!(sig.check_dependent(7).is_ok());
        assert!(sig.check_independent(1).is_err());
    }
}
