/// Component values for the discrete-transistor excitable circuit this
/// library's presets are often compared against. These constants are
/// documentation and config-templating material only: no ODE in this crate
/// consumes them, and the preset is not simulable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaedaCircuitPreset {
    /// Membrane capacitance, mF.
    pub c: f64,
    /// Recovery capacitance, mF.
    pub c_n: f64,
    /// Load resistance, kOhm.
    pub r_l: f64,
    pub r_1: f64,
    pub r_2: f64,
    pub r_3: f64,
    /// Supply rails standing in for ionic reversal potentials, V.
    pub e_na: f64,
    pub e_k: f64,
    pub e_l: f64,
    /// External bias current, mA.
    pub i_ext: f64,
}

pub const MAEDA_CIRCUIT: MaedaCircuitPreset = MaedaCircuitPreset {
    c: 0.5,
    c_n: 1.0,
    r_l: 100.0,
    r_1: 200.0,
    r_2: 2.0,
    r_3: 100.0,
    e_na: 5.0,
    e_k: -0.4,
    e_l: 0.0,
    i_ext: 0.025,
};

/// Transistor complement: T1 and T3 are NPN 2N3904, T2 is PNP 2N3906.
pub const MAEDA_TRANSISTORS: &str = "T1/T3: NPN 2N3904, T2: PNP 2N3906";

impl MaedaCircuitPreset {
    /// One-line component listing for the preset catalog.
    pub fn summary(&self) -> String {
        format!(
            "C={} mF, C_n={} mF, R_L={} kOhm, R_1={} kOhm, R_2={} kOhm, R_3={} kOhm, \
             E_Na={} V, E_K={} V, E_L={} V, I_ext={} mA; {}",
            self.c,
            self.c_n,
            self.r_l,
            self.r_1,
            self.r_2,
            self.r_3,
            self.e_na,
            self.e_k,
            self.e_l,
            self.i_ext,
            MAEDA_TRANSISTORS
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_lists_the_bias_current() {
        let s = MAEDA_CIRCUIT.summary();
        assert!(s.contains("I_ext=0.025 mA"));
        assert!(s.contains("2N3904"));
    }
}
