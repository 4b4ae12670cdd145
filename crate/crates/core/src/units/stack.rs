//! Stack mass split and energy balance.

use super::UnitError;
use crate::electrochem::StackParams;
use crate::species::SpeciesVec;
use crate::thermo::{Phase, ThermoModel};

/// Stoichiometry of the anode product per mole of H2: water carried over and half an O2.
pub const ANODE_STOICHIOMETRY: SpeciesVec = [1.0, 0.0, 0.5];
/// Cathode: two waters consumed per H2 formed.
pub const CATHODE_STOICHIOMETRY: SpeciesVec = [-2.0, 1.0, 0.0];

/// Outflows of the two stack chambers, mol/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowSplit {
    pub anode: SpeciesVec,
    pub cathode: SpeciesVec,
}

impl FlowSplit {
    pub fn total(&self) -> SpeciesVec {
        std::array::from_fn(|i| self.anode[i] + self.cathode[i])
    }
}

/// Cathode water deficit, mol/s, below which the outflow is taken as zero.
const STARVATION_TOLERANCE: f64 = 1e-12;

/// Chamber outflows for inlet water `f_in` (split evenly) and reaction rate `r`.
pub fn stack_outflows(f_in: &SpeciesVec, r: f64) -> Result<FlowSplit, UnitError> {
    if f_in[1] != 0.0 || f_in[2] != 0.0 {
        return Err(UnitError::Precondition("stack inlet must be pure water".into()));
    }
    if f_in[0] < 0.0 || r < 0.0 {
        return Err(UnitError::Precondition(format!("negative stack flow (f_in = {}, r = {r})", f_in[0])));
    }
    let half = 0.5 * f_in[0];
    let mut split = FlowSplit {
        anode: std::array::from_fn(|i| [half, 0.0, 0.0][i] + ANODE_STOICHIOMETRY[i] * r),
        cathode: std::array::from_fn(|i| [half, 0.0, 0.0][i] + CATHODE_STOICHIOMETRY[i] * r),
    };
    // Round-off sized deficits (a vanishing current with no inlet water) are not starvation.
    if split.cathode[0] < -STARVATION_TOLERANCE {
        return Err(UnitError::WaterStarvation { deficit: -split.cathode[0] });
    }
    split.cathode[0] = split.cathode[0].max(0.0);
    Ok(split)
}

/// Individual terms of the stack energy balance, W.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StackEnergyTerms {
    pub enthalpy_in: f64,
    pub enthalpy_out: f64,
    /// `A_s h_c (T - T_amb)`
    pub ambient_loss: f64,
    pub electrical: f64,
}

impl StackEnergyTerms {
    /// `dU_el/dt`
    pub fn net(&self) -> f64 {
        self.enthalpy_in - self.enthalpy_out - self.ambient_loss + self.electrical
    }
}

#[allow(clippy::too_many_arguments)]
pub fn stack_energy_terms(
    thermo: &ThermoModel,
    t: f64,
    t_in: f64,
    pressure: f64,
    f_in: &SpeciesVec,
    flows: &FlowSplit,
    power: f64,
    t_amb: f64,
    p: &StackParams,
) -> Result<StackEnergyTerms, UnitError> {
    let enthalpy_in = thermo.enthalpy_flow(t_in, pressure, f_in, Phase::Liquid)?;
    let enthalpy_out = thermo.split_stream_enthalpy_flow(t, pressure, &flows.total())?;
    Ok(StackEnergyTerms {
        enthalpy_in,
        enthalpy_out,
        ambient_loss: p.ambient_conductance() * (t - t_amb),
        electrical: power,
    })
}

/// Stack temperature derivative, K/s.
#[allow(clippy::too_many_arguments)]
pub fn stack_energy_rhs(
    thermo: &ThermoModel,
    t: f64,
    t_in: f64,
    pressure: f64,
    f_in: &SpeciesVec,
    flows: &FlowSplit,
    power: f64,
    t_amb: f64,
    p: &StackParams,
) -> Result<f64, UnitError> {
    Ok(stack_energy_terms(thermo, t, t_in, pressure, f_in, flows, power, t_amb, p)?.net() / p.heat_capacity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::species::atom_totals;
    use proptest::prelude::*;

    #[test]
    fn no_reaction_splits_inlet_evenly() {
        let s = stack_outflows(&[10.0, 0.0, 0.0], 0.0).unwrap();
        assert_eq!(s.anode, [5.0, 0.0, 0.0]);
        assert_eq!(s.cathode, [5.0, 0.0, 0.0]);
    }

    #[test]
    fn stoichiometric_hand_check() {
        let s = stack_outflows(&[10.0, 0.0, 0.0], 1.0).unwrap();
        assert_eq!(s.anode, [6.0, 0.0, 0.5]);
        assert_eq!(s.cathode, [3.0, 1.0, 0.0]);
        assert_eq!(s.total()[0], 9.0);
    }

    #[test]
    fn starvation_names_the_deficit() {
        let err = stack_outflows(&[2.0, 0.0, 0.0], 1.0).unwrap_err();
        assert_eq!(err, UnitError::WaterStarvation { deficit: 1.0 });
    }

    #[test]
    fn equilibrium_gives_zero_temperature_rate() {
        let th = ThermoModel::standard();
        let p = StackParams::default();
        let f_in = [100.0, 0.0, 0.0];
        let flows = stack_outflows(&f_in, 0.0).unwrap();
        let rate = stack_energy_rhs(th, 300.0, 300.0, 101_325.0, &f_in, &flows, 0.0, 300.0, &p).unwrap();
        assert_eq!(rate, 0.0);
    }

    #[test]
    fn electrical_power_enters_linearly() {
        let th = ThermoModel::standard();
        let p = StackParams::default();
        let f_in = [100.0, 0.0, 0.0];
        let flows = stack_outflows(&f_in, 2.0).unwrap();
        let a = stack_energy_rhs(th, 350.0, 340.0, 101_325.0, &f_in, &flows, 1e6, 298.15, &p).unwrap();
        let b = stack_energy_rhs(th, 350.0, 340.0, 101_325.0, &f_in, &flows, 1.5e6, 298.15, &p).unwrap();
        assert!(((b - a) - 0.5e6 / p.heat_capacity).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn atoms_are_conserved(f in 0.0..500.0f64, frac in 0.0..1.0f64) {
            let r = frac * f / 4.0;
            let s = stack_outflows(&[f, 0.0, 0.0], r).unwrap();
            let (h_in, o_in) = atom_totals(&[f, 0.0, 0.0]);
            let (h_out, o_out) = atom_totals(&s.total());
            prop_assert!((h_in - h_out).abs() <= 1e-12 * h_in.max(1.0));
            prop_assert!((o_in - o_out).abs() <= 1e-12 * o_in.max(1.0));
            prop_assert_eq!(s.anode[1], 0.0);
            prop_assert_eq!(s.cathode[2], 0.0);
        }
    }
}
