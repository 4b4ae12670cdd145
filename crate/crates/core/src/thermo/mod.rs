//! Thermodynamic properties of H2O/H2/O2 streams and holdups.
//!
//! Every property is extensive and evaluated as a function of temperature,
//! pressure and the component amounts in a stated phase:
//!
//! - gas: ideal gas with polynomial heat capacities and ideal mixing,
//! - liquid: incompressible ideal liquid (water only) with constant molar volume.
//!
//! Enthalpies carry formation offsets at the reference state (T0, P0), so
//! reaction enthalpies fall out of stream enthalpy differences. Internal and
//! Gibbs energy follow from `U = H - PV` and `G = H - TS`.
//!
//! Flow properties (`enthalpy_flow`, `entropy_flow`) use the same formulas
//! with mole amounts replaced by mole flows, giving W and W/K.

mod correlation;

use std::sync::OnceLock;

use thiserror::Error;

pub use correlation::{CorrelationTable, PhaseCorrelation, SpeciesCorrelation, STANDARD_DATA};

use crate::species::{Species, SpeciesVec, GAS_CONSTANT};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThermoError {
    #[error("temperature must be positive, got {0} K")]
    NonPositiveTemperature(f64),
    #[error("pressure must be positive, got {0} Pa")]
    NonPositivePressure(f64),
    #[error("negative amount of {species}: {value}")]
    NegativeAmount { species: Species, value: f64 },
    #[error("{species} ({phase}) correlation is valid for {lo}..{hi} K, got {t} K")]
    OutOfRange {
        species: Species,
        phase: Phase,
        t: f64,
        lo: f64,
        hi: f64,
    },
    #[error("{species} has no {phase} correlation")]
    PhaseNotAvailable { species: Species, phase: Phase },
    #[error("correlation data: {0}")]
    Data(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Liquid,
    Gas,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Phase::Liquid => "liquid",
            Phase::Gas => "gas",
        })
    }
}

/// Argument bundle for property evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoState {
    /// K
    pub t: f64,
    /// Pa
    pub p: f64,
    /// mol, or mol/s for flow properties
    pub n: SpeciesVec,
    pub phase: Phase,
}

impl ThermoState {
    pub fn new(t: f64, p: f64, n: SpeciesVec, phase: Phase) -> Self {
        ThermoState { t, p, n, phase }
    }

    pub fn gas(t: f64, p: f64, n: SpeciesVec) -> Self {
        Self::new(t, p, n, Phase::Gas)
    }

    pub fn liquid(t: f64, p: f64, n: SpeciesVec) -> Self {
        Self::new(t, p, n, Phase::Liquid)
    }
}

/// Property evaluator over an immutable correlation table.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermoModel {
    table: CorrelationTable,
}

impl Default for ThermoModel {
    fn default() -> Self {
        Self::standard().clone()
    }
}

impl ThermoModel {
    pub fn new(table: CorrelationTable) -> Self {
        ThermoModel { table }
    }

    /// Model backed by the shipped data file, parsed once per process.
    pub fn standard() -> &'static ThermoModel {
        static STANDARD: OnceLock<ThermoModel> = OnceLock::new();
        STANDARD.get_or_init(|| ThermoModel::new(CorrelationTable::standard()))
    }

    pub fn from_file(path: impl AsRef<std::path::Path>) -> Result<Self, ThermoError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| ThermoError::Data(format!("{}: {e}", path.as_ref().display())))?;
        Ok(Self::new(CorrelationTable::from_toml(&text)?))
    }

    pub fn table(&self) -> &CorrelationTable {
        &self.table
    }

    pub fn reference_temperature(&self) -> f64 {
        self.table.reference_temperature
    }

    pub fn reference_pressure(&self) -> f64 {
        self.table.reference_pressure
    }

    pub fn molar_mass(&self, sp: Species) -> f64 {
        self.table.species(sp).molar_mass
    }

    fn correlation(&self, sp: Species, phase: Phase) -> Result<&PhaseCorrelation, ThermoError> {
        let sc = self.table.species(sp);
        match phase {
            Phase::Gas => Ok(&sc.gas),
            Phase::Liquid => sc
                .liquid
                .as_ref()
                .ok_or(ThermoError::PhaseNotAvailable { species: sp, phase }),
        }
    }

    fn checked(&self, sp: Species, phase: Phase, t: f64) -> Result<&PhaseCorrelation, ThermoError> {
        let pc = self.correlation(sp, phase)?;
        if !pc.in_range(t) {
            let [lo, hi] = pc.cp_valid_range;
            return Err(ThermoError::OutOfRange { species: sp, phase, t, lo, hi });
        }
        Ok(pc)
    }

    /// Heat capacity of one mole, J/mol/K.
    pub fn cp(&self, sp: Species, phase: Phase, t: f64) -> Result<f64, ThermoError> {
        Ok(self.checked(sp, phase, t)?.cp(t))
    }

    /// Liquid molar volume (molar mass over density), m^3/mol.
    pub fn liquid_molar_volume(&self, sp: Species) -> Result<f64, ThermoError> {
        let pc = self.correlation(sp, Phase::Liquid)?;
        let rho = pc.density.expect("validated at load");
        Ok(self.molar_mass(sp) / rho)
    }

    /// Enthalpy of one mole of pure `sp`, J/mol.
    pub fn molar_enthalpy(&self, sp: Species, phase: Phase, t: f64, p: f64) -> Result<f64, ThermoError> {
        check_tp(t, p)?;
        let pc = self.checked(sp, phase, t)?;
        let t0 = self.reference_temperature();
        let sensible = pc.h_formation + pc.cp_integral(t0, t);
        Ok(match phase {
            Phase::Gas => sensible,
            Phase::Liquid => sensible + self.liquid_molar_volume(sp)? * (p - self.reference_pressure()),
        })
    }

    /// Entropy of one mole of pure `sp` at total pressure `p`, J/mol/K.
    pub fn molar_entropy(&self, sp: Species, phase: Phase, t: f64, p: f64) -> Result<f64, ThermoError> {
        check_tp(t, p)?;
        let pc = self.checked(sp, phase, t)?;
        let t0 = self.reference_temperature();
        let s = pc.s_standard + pc.cp_over_t_integral(t0, t);
        Ok(match phase {
            Phase::Gas => s - GAS_CONSTANT * (p / self.reference_pressure()).ln(),
            Phase::Liquid => s,
        })
    }

    pub fn enthalpy(&self, state: &ThermoState) -> Result<f64, ThermoError> {
        check_state(state)?;
        let mut h = 0.0;
        for sp in Species::ALL {
            let n = state.n[sp.index()];
            if n > 0.0 {
                h += n * self.molar_enthalpy(sp, state.phase, state.t, state.p)?;
            }
        }
        Ok(h)
    }

    pub fn entropy(&self, state: &ThermoState) -> Result<f64, ThermoError> {
        check_state(state)?;
        let total: f64 = state.n.iter().sum();
        let mut s = 0.0;
        for sp in Species::ALL {
            let n = state.n[sp.index()];
            if n > 0.0 {
                s += n * self.molar_entropy(sp, state.phase, state.t, state.p)?;
                if state.phase == Phase::Gas {
                    // ideal mixing: each component at its partial pressure
                    s -= n * GAS_CONSTANT * (n / total).ln();
                }
            }
        }
        Ok(s)
    }

    pub fn volume(&self, state: &ThermoState) -> Result<f64, ThermoError> {
        check_state(state)?;
        match state.phase {
            Phase::Gas => {
                let total: f64 = state.n.iter().sum();
                Ok(total * GAS_CONSTANT * state.t / state.p)
            }
            Phase::Liquid => {
                let n = state.n[Species::Water.index()];
                if n > 0.0 {
                    Ok(n * self.liquid_molar_volume(Species::Water)?)
                } else {
                    Ok(0.0)
                }
            }
        }
    }

    pub fn internal_energy(&self, state: &ThermoState) -> Result<f64, ThermoError> {
        Ok(self.enthalpy(state)? - state.p * self.volume(state)?)
    }

    pub fn gibbs_energy(&self, state: &ThermoState) -> Result<f64, ThermoError> {
        Ok(self.enthalpy(state)? - state.t * self.entropy(state)?)
    }

    /// Enthalpy flow of a stream with molar flows `f` (mol/s), W.
    pub fn enthalpy_flow(&self, t: f64, p: f64, f: &SpeciesVec, phase: Phase) -> Result<f64, ThermoError> {
        self.enthalpy(&ThermoState::new(t, p, *f, phase))
    }

    /// Entropy flow of a stream with molar flows `f` (mol/s), W/K.
    pub fn entropy_flow(&self, t: f64, p: f64, f: &SpeciesVec, phase: Phase) -> Result<f64, ThermoError> {
        self.entropy(&ThermoState::new(t, p, *f, phase))
    }

    /// Enthalpy flow of a two-phase stream whose water is liquid and whose
    /// H2 and O2 are gas (stack and separator inlets).
    pub fn split_stream_enthalpy_flow(&self, t: f64, p: f64, f: &SpeciesVec) -> Result<f64, ThermoError> {
        let (liquid, gas) = split_phases(f);
        Ok(self.enthalpy_flow(t, p, &liquid, Phase::Liquid)? + self.enthalpy_flow(t, p, &gas, Phase::Gas)?)
    }
}

/// Water as liquid, everything else as gas.
pub fn split_phases(n: &SpeciesVec) -> (SpeciesVec, SpeciesVec) {
    ([n[0], 0.0, 0.0], [0.0, n[1], n[2]])
}

fn check_tp(t: f64, p: f64) -> Result<(), ThermoError> {
    if !(t > 0.0) {
        return Err(ThermoError::NonPositiveTemperature(t));
    }
    if !(p > 0.0) {
        return Err(ThermoError::NonPositivePressure(p));
    }
    Ok(())
}

fn check_state(state: &ThermoState) -> Result<(), ThermoError> {
    check_tp(state.t, state.p)?;
    for sp in Species::ALL {
        let v = state.n[sp.index()];
        if v < 0.0 || v.is_nan() {
            return Err(ThermoError::NegativeAmount { species: sp, value: v });
        }
        if state.phase == Phase::Liquid && sp != Species::Water && v > 0.0 {
            return Err(ThermoError::PhaseNotAvailable { species: sp, phase: Phase::Liquid });
        }
    }
    Ok(())
}
