//! Variable and equation layout of the plant DAE.
//!
//! Differential state (9):
//! `[T, n_sep1_H2O, n_sep1_O2, U_sep1, n_sep2_H2O, n_sep2_H2, U_sep2, n_tank, U_tank]`
//!
//! Algebraic state (15):
//! `[xi_cell, I, T_sep1, P_sep1, T_sep2, P_sep2, T_comp1, T_comp2, T_comp3,
//!   T_tank, P_tank, T_HX1, T_HX2, f_in_H2O, T_in]`
//!
//! Separator 1 is the oxygen (anode) side, separator 2 the hydrogen (cathode) side.

use serde::{Deserialize, Serialize};

pub const N_DIFF: usize = 9;
pub const N_ALG: usize = 15;
pub const N_EQ: usize = N_DIFF + N_ALG;

/// Equation labels in residual order.
pub const EQUATION_NAMES: [&str; N_EQ] = [
    "stack energy",
    "sep1 H2O balance",
    "sep1 O2 balance",
    "sep1 energy",
    "sep2 H2O balance",
    "sep2 H2 balance",
    "sep2 energy",
    "tank H2 balance",
    "tank energy",
    "g_el polarization",
    "g_el power",
    "g_sep1 energy closure",
    "g_sep1 volume closure",
    "g_sep2 energy closure",
    "g_sep2 volume closure",
    "g_comp stage 1 isentrope",
    "g_comp stage 2 isentrope",
    "g_comp stage 3 isentrope",
    "g_tank energy closure",
    "g_tank volume closure",
    "g_HX1 energy",
    "g_HX2 energy",
    "g_mixer mass",
    "g_mixer energy",
];

/// Equation index ranges of each algebraic block.
pub mod eq {
    pub const STACK_ENERGY: usize = 0;
    pub const SEP1: usize = 1;
    pub const SEP2: usize = 4;
    pub const TANK: usize = 7;
    pub const G_EL: usize = 9;
    pub const G_SEP1: usize = 11;
    pub const G_SEP2: usize = 13;
    pub const G_COMP: usize = 15;
    pub const G_TANK: usize = 18;
    pub const G_HX: usize = 20;
    pub const G_MIXER: usize = 22;
}

macro_rules! named_vector {
    ($(#[$meta:meta])* $name:ident, $len:expr, { $($(#[$fmeta:meta])* $field:ident => $label:expr),* $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
        pub struct $name {
            $($(#[$fmeta])* pub $field: f64,)*
        }

        impl $name {
            pub const LEN: usize = $len;
            /// Column labels with units.
            pub const NAMES: [&'static str; $len] = [$($label),*];

            pub fn to_array(&self) -> [f64; $len] {
                [$(self.$field),*]
            }

            pub fn from_array(a: &[f64]) -> Self {
                assert_eq!(a.len(), $len, concat!(stringify!($name), " needs ", stringify!($len), " entries"));
                let mut it = a.iter().copied();
                $name { $($field: it.next().unwrap()),* }
            }
        }
    };
}

named_vector!(
    /// Differential variables `x`.
    DifferentialVars, 9, {
        /// Stack temperature, K
        t_stack => "T_K",
        n_sep1_water => "n_sep1_H2O_mol",
        n_sep1_oxygen => "n_sep1_O2_mol",
        /// J
        u_sep1 => "U_sep1_J",
        n_sep2_water => "n_sep2_H2O_mol",
        n_sep2_hydrogen => "n_sep2_H2_mol",
        u_sep2 => "U_sep2_J",
        n_tank => "n_tank_mol",
        u_tank => "U_tank_J",
    }
);

named_vector!(
    /// Algebraic variables `y`.
    AlgebraicVars, 15, {
        /// Cell voltage, V
        voltage => "xi_cell_V",
        /// Stack current, A
        current => "I_A",
        t_sep1 => "T_sep1_K",
        p_sep1 => "P_sep1_Pa",
        t_sep2 => "T_sep2_K",
        p_sep2 => "P_sep2_Pa",
        t_comp1 => "T_comp1_K",
        t_comp2 => "T_comp2_K",
        t_comp3 => "T_comp3_K",
        t_tank => "T_tank_K",
        p_tank => "P_tank_Pa",
        t_hx1 => "T_HX1_K",
        t_hx2 => "T_HX2_K",
        /// Stack inlet water, mol/s
        f_in => "f_in_H2O_mol_s",
        /// Stack inlet temperature, K
        t_in => "T_in_K",
    }
);

named_vector!(
    /// Manipulated inputs `u`, all molar flows in mol/s and duties in W.
    Inputs, 8, {
        f_sep1_water => "f_sep1_H2O_mol_s",
        f_sep2_water => "f_sep2_H2O_mol_s",
        f_make_up => "f_make_up_mol_s",
        f_tank_out => "f_tank_H2_mol_s",
        q_hx1 => "Q_HX1_W",
        q_hx2 => "Q_HX2_W",
        f_sep1_oxygen => "f_sep1_O2_mol_s",
        f_sep2_hydrogen => "f_sep2_H2_mol_s",
    }
);

named_vector!(
    /// Disturbances `d`.
    Disturbances, 3, {
        t_amb => "T_amb_K",
        power => "P_in_W",
        t_make_up => "T_make_up_K",
    }
);

impl AlgebraicVars {
    pub fn t_comp(&self) -> [f64; 3] {
        [self.t_comp1, self.t_comp2, self.t_comp3]
    }
}

impl Inputs {
    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in Self::NAMES.iter().zip(self.to_array()) {
            if !(v >= 0.0) {
                return Err(format!("{name} must be non-negative, got {v}"));
            }
        }
        Ok(())
    }
}

impl Disturbances {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.power >= 0.0) {
            return Err(format!("P_in must be non-negative, got {}", self.power));
        }
        if !(self.t_amb > 0.0 && self.t_make_up > 0.0) {
            return Err("temperatures must be positive".into());
        }
        Ok(())
    }
}

/// `(x, y)` at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlantState {
    pub x: DifferentialVars,
    pub y: AlgebraicVars,
}

impl PlantState {
    pub fn to_vec(&self) -> Vec<f64> {
        self.x.to_array().into_iter().chain(self.y.to_array()).collect()
    }

    pub fn from_slice(z: &[f64]) -> Self {
        assert_eq!(z.len(), N_EQ);
        PlantState { x: DifferentialVars::from_array(&z[..N_DIFF]), y: AlgebraicVars::from_array(&z[N_DIFF..]) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_has_24_equations() {
        assert_eq!(DifferentialVars::LEN, 9);
        assert_eq!(AlgebraicVars::LEN, 15);
        assert_eq!(EQUATION_NAMES.len(), 24);
        assert_eq!(Inputs::LEN, 8);
        assert_eq!(Disturbances::LEN, 3);
        assert_eq!(eq::G_MIXER + 2, N_EQ);
    }

    #[test]
    fn arrays_round_trip() {
        let z: Vec<f64> = (0..N_EQ).map(|i| i as f64 * 1.5).collect();
        let s = PlantState::from_slice(&z);
        assert_eq!(s.to_vec(), z);
        assert_eq!(s.x.u_tank, 8.0 * 1.5);
        assert_eq!(s.y.t_in, 23.0 * 1.5);
    }
}
