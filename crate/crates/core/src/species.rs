//! Chemical species and the fixed component ordering shared by every 3-vector.

use std::fmt;

/// Universal gas constant, J/mol/K.
pub const GAS_CONSTANT: f64 = 8.314_462_618;

/// Component amounts or flows in the order `[H2O, H2, O2]`.
pub type SpeciesVec = [f64; 3];

/// The three components of the plant. The discriminant is the vector index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Species {
    Water = 0,
    Hydrogen = 1,
    Oxygen = 2,
}

impl Species {
    pub const ALL: [Species; 3] = [Species::Water, Species::Hydrogen, Species::Oxygen];

    pub const fn index(self) -> usize {
        self as usize
    }

    /// Chemical formula, also used as the key in correlation data files.
    pub const fn formula(self) -> &'static str {
        match self {
            Species::Water => "H2O",
            Species::Hydrogen => "H2",
            Species::Oxygen => "O2",
        }
    }

    pub fn from_formula(s: &str) -> Option<Species> {
        Species::ALL.into_iter().find(|sp| sp.formula() == s)
    }

    /// Number of hydrogen and oxygen atoms per molecule.
    pub const fn atoms(self) -> (f64, f64) {
        match self {
            Species::Water => (2.0, 1.0),
            Species::Hydrogen => (2.0, 0.0),
            Species::Oxygen => (0.0, 2.0),
        }
    }
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.formula())
    }
}

/// A vector holding only `amount` of `species`.
pub fn pure(species: Species, amount: f64) -> SpeciesVec {
    let mut v = [0.0; 3];
    v[species.index()] = amount;
    v
}

/// Hydrogen and oxygen atom totals of a species vector.
pub fn atom_totals(n: &SpeciesVec) -> (f64, f64) {
    Species::ALL.iter().fold((0.0, 0.0), |(h, o), sp| {
        let (ah, ao) = sp.atoms();
        (h + ah * n[sp.index()], o + ao * n[sp.index()])
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_water_hydrogen_oxygen() {
        assert_eq!(Species::Water.index(), 0);
        assert_eq!(Species::Hydrogen.index(), 1);
        assert_eq!(Species::Oxygen.index(), 2);
        assert_eq!(Species::from_formula("O2"), Some(Species::Oxygen));
        assert_eq!(Species::from_formula("N2"), None);
    }

    #[test]
    fn electrolysis_conserves_atoms() {
        // H2O -> H2 + 1/2 O2
        let before = atom_totals(&[1.0, 0.0, 0.0]);
        let after = atom_totals(&[0.0, 1.0, 0.5]);
        assert_eq!(before, after);
    }
}
