//! Pure-component correlation constants loaded from a TOML data file.

use serde::{Deserialize, Serialize};

use super::ThermoError;
use crate::species::Species;

/// The data file shipped with the crate.
pub const STANDARD_DATA: &str = include_str!("../../data/correlations.toml");

/// Constants of one species in one phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseCorrelation {
    /// Standard formation enthalpy at the reference state, J/mol.
    pub h_formation: f64,
    /// Standard molar entropy at the reference state, J/mol/K.
    pub s_standard: f64,
    /// Heat capacity polynomial `sum c_k T^k`, J/mol/K.
    pub cp_coefficients: Vec<f64>,
    /// Temperatures (K) between which the polynomial may be evaluated.
    pub cp_valid_range: [f64; 2],
    /// Liquid density, kg/m^3. Only meaningful for liquids.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<f64>,
}

impl PhaseCorrelation {
    pub fn cp(&self, t: f64) -> f64 {
        // Horner
        self.cp_coefficients.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    /// `int_{t0}^{t} cp dT`
    pub fn cp_integral(&self, t0: f64, t: f64) -> f64 {
        let mut sum = 0.0;
        let (mut tp, mut t0p) = (t, t0);
        for (k, c) in self.cp_coefficients.iter().enumerate() {
            sum += c * (tp - t0p) / (k + 1) as f64;
            tp *= t;
            t0p *= t0;
        }
        sum
    }

    /// `int_{t0}^{t} cp / T dT`
    pub fn cp_over_t_integral(&self, t0: f64, t: f64) -> f64 {
        let mut coeffs = self.cp_coefficients.iter();
        let mut sum = match coeffs.next() {
            Some(c0) => c0 * (t / t0).ln(),
            None => 0.0,
        };
        let (mut tp, mut t0p) = (t, t0);
        for (k, c) in coeffs.enumerate() {
            sum += c * (tp - t0p) / (k + 1) as f64;
            tp *= t;
            t0p *= t0;
        }
        sum
    }

    pub fn in_range(&self, t: f64) -> bool {
        t >= self.cp_valid_range[0] && t <= self.cp_valid_range[1]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesCorrelation {
    pub name: String,
    /// kg/mol
    pub molar_mass: f64,
    pub gas: PhaseCorrelation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub liquid: Option<PhaseCorrelation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CorrelationFile {
    version: String,
    reference_temperature: f64,
    reference_pressure: f64,
    species: Vec<SpeciesCorrelation>,
}

/// Validated correlation constants for H2O, H2 and O2, indexed by [`Species`].
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTable {
    pub version: String,
    /// T0, K
    pub reference_temperature: f64,
    /// P0, Pa
    pub reference_pressure: f64,
    species: [SpeciesCorrelation; 3],
}

impl CorrelationTable {
    pub fn standard() -> Self {
        Self::from_toml(STANDARD_DATA).expect("shipped correlation data is valid")
    }

    pub fn from_toml(text: &str) -> Result<Self, ThermoError> {
        let file: CorrelationFile =
            toml::from_str(text).map_err(|e| ThermoError::Data(e.to_string()))?;
        let t0 = file.reference_temperature;
        let p0 = file.reference_pressure;
        if !(t0 > 0.0 && p0 > 0.0) {
            return Err(ThermoError::Data(
                "reference temperature and pressure must be positive".into(),
            ));
        }

        let mut slots: [Option<SpeciesCorrelation>; 3] = [None, None, None];
        for sc in file.species {
            let sp = Species::from_formula(&sc.name)
                .ok_or_else(|| ThermoError::Data(format!("unknown species '{}'", sc.name)))?;
            validate_species(&sc, t0)?;
            if slots[sp.index()].replace(sc).is_some() {
                return Err(ThermoError::Data(format!("species '{sp}' listed twice")));
            }
        }
        let missing: Vec<_> = Species::ALL
            .iter()
            .filter(|sp| slots[sp.index()].is_none())
            .map(|sp| sp.formula())
            .collect();
        if !missing.is_empty() {
            return Err(ThermoError::Data(format!(
                "missing species: {}",
                missing.join(", ")
            )));
        }
        let [a, b, c] = slots;
        let water = a.expect("checked");
        if water.liquid.is_none() {
            return Err(ThermoError::Data("H2O requires a liquid block".into()));
        }
        Ok(CorrelationTable {
            version: file.version,
            reference_temperature: t0,
            reference_pressure: p0,
            species: [water, b.expect("checked"), c.expect("checked")],
        })
    }

    pub fn to_toml(&self) -> String {
        let file = CorrelationFile {
            version: self.version.clone(),
            reference_temperature: self.reference_temperature,
            reference_pressure: self.reference_pressure,
            species: self.species.to_vec(),
        };
        toml::to_string(&file).expect("correlation table serializes")
    }

    pub fn species(&self, sp: Species) -> &SpeciesCorrelation {
        &self.species[sp.index()]
    }
}

fn validate_species(sc: &SpeciesCorrelation, t0: f64) -> Result<(), ThermoError> {
    let bad = |what: &str| ThermoError::Data(format!("{}: {what}", sc.name));
    if !(sc.molar_mass > 0.0) {
        return Err(bad("molar_mass must be positive"));
    }
    for (label, pc) in std::iter::once(("gas", &sc.gas)).chain(sc.liquid.as_ref().map(|l| ("liquid", l))) {
        let [lo, hi] = pc.cp_valid_range;
        if pc.cp_coefficients.is_empty() {
            return Err(bad(&format!("{label} cp_coefficients is empty")));
        }
        if !(lo > 0.0 && lo < hi) {
            return Err(bad(&format!("{label} cp_valid_range must satisfy 0 < lo < hi")));
        }
        if !pc.in_range(t0) {
            return Err(bad(&format!(
                "{label} cp_valid_range must contain the reference temperature"
            )));
        }
    }
    if let Some(liq) = &sc.liquid {
        match liq.density {
            Some(rho) if rho > 0.0 => {}
            _ => return Err(bad("liquid block needs a positive density")),
        }
    }
    Ok(())
}
