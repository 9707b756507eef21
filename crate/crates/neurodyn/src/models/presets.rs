//! Named parameter sets with validated defaults, recommended integration
//! settings and spike-detector settings. Every simulable preset is covered
//! by pinned regression fixtures (see `checks`); the defaults themselves
//! are conventional values, documented in the catalog rather than asserted
//! as ground truth.

use std::sync::Arc;

use crate::models::fhn::FitzHughNagumo;
use crate::models::fhn_cell::FhnCell;
use crate::models::hh::HodgkinHuxley;
use crate::models::hr::HindmarshRose;
use crate::models::izhikevich::Izhikevich;
use crate::models::maeda::MAEDA_CIRCUIT;
use crate::models::ml::MorrisLecar;
use crate::system::ModelSystem;

pub struct PresetInfo {
    pub name: &'static str,
    pub title: &'static str,
    /// Default initial state (resting point or a point on the attractor).
    pub initial: &'static [f64],
    /// Recommended fixed step for rk4.
    pub dt: f64,
    /// Default spike-detector settings for the voltage channel.
    pub threshold: f64,
    pub refractory: f64,
    /// False for documentation-only entries.
    pub simulable: bool,
    notes: &'static str,
    build_fn: Option<fn() -> Arc<dyn ModelSystem>>,
}

impl PresetInfo {
    pub fn build(&self) -> Option<Arc<dyn ModelSystem>> {
        self.build_fn.map(|f| f())
    }
}

fn build_hh() -> Arc<dyn ModelSystem> {
    Arc::new(HodgkinHuxley::default())
}

fn build_izh() -> Arc<dyn ModelSystem> {
    Arc::new(Izhikevich::default())
}

fn build_fhn() -> Arc<dyn ModelSystem> {
    Arc::new(FitzHughNagumo::default())
}

fn build_hr() -> Arc<dyn ModelSystem> {
    Arc::new(HindmarshRose::default())
}

fn build_ml() -> Arc<dyn ModelSystem> {
    Arc::new(MorrisLecar::default())
}

fn build_fhn_cell() -> Arc<dyn ModelSystem> {
    Arc::new(FhnCell::default())
}

static PRESETS: &[PresetInfo] = &[
    PresetInfo {
        name: "hh",
        title: "Hodgkin-Huxley squid-axon membrane",
        initial: &[
            -64.99972243373457,
            0.052934217620863985,
            0.5961110463468278,
            0.3176811675797812,
        ],
        dt: 0.01,
        threshold: 0.0,
        refractory: 2.0,
        simulable: true,
        notes: "state [V, m, h, n]; mV, ms, uA/cm^2\n\
                C V' = I - g_na m^3 h (V - v_na) - g_k n^4 (V - v_k) - g_l (V - v_l)\n\
                gating: x' = alpha_x(V)(1 - x) - beta_x(V) x, squid rates at 6.3 C,\n\
                resting potential near -65 mV; m, h, n clamped to [0, 1] each step\n\
                c_m=1 g_na=120 g_k=36 g_l=0.3 v_na=50 v_k=-77 v_l=-54.4\n\
                init = resting equilibrium; typical drive I = 10",
        build_fn: Some(build_hh),
    },
    PresetInfo {
        name: "izhikevich_rs",
        title: "Izhikevich regular-spiking cell",
        initial: &[-65.0, -13.0],
        dt: 0.01,
        threshold: 29.9,
        refractory: 2.0,
        simulable: true,
        notes: "state [v, u]; mV-like scale, ms\n\
                v' = 0.04 v^2 + 5 v + 140 - u + I; u' = a (b v - u)\n\
                reset: v >= 30 -> v = c, u = u + d (applied after each full step)\n\
                a=0.02 b=0.2 c=-65 d=8 threshold=30\n\
                init [-65, -13]; typical drive I = 10",
        build_fn: Some(build_izh),
    },
    PresetInfo {
        name: "fhn",
        title: "FitzHugh-Nagumo relaxation oscillator (van der Pol scaling)",
        initial: &[-1.199408035244035, -0.6242600440550437],
        dt: 0.05,
        threshold: 1.0,
        refractory: 2.0,
        simulable: true,
        notes: "state [v, u]; dimensionless, time in ms-equivalent units\n\
                v' = c (v - u + I - v^3/3); u' = (v - b u + a) / c\n\
                a=0.7 b=0.8 c=3\n\
                init = rest point at I=0; oscillates for I around 0.5..1.1",
        build_fn: Some(build_fhn),
    },
    PresetInfo {
        name: "hr",
        title: "Hindmarsh-Rose bursting cell",
        initial: &[-1.6, -10.0, 0.0],
        dt: 0.01,
        threshold: 1.0,
        refractory: 2.0,
        simulable: true,
        notes: "state [v, u, w]; dimensionless\n\
                v' = u - v^3 + b v^2 + I - w; u' = 1 - 5 v^2 - u;\n\
                w' = mu (s (v - v_rest) - w)\n\
                b=3 mu=0.01 s=4 v_rest=-1.6\n\
                init [-1.6, -10, 0]; typical drive I = 2",
        build_fn: Some(build_hr),
    },
    PresetInfo {
        name: "ml",
        title: "Morris-Lecar membrane (oscillatory constant set)",
        initial: &[-60.85538223230949, 0.014915024953999358],
        dt: 0.01,
        threshold: 0.0,
        refractory: 2.0,
        simulable: true,
        notes: "state [V, N]; mV, ms, uA/cm^2\n\
                C V' = I - g_l (V - v_l) - g_ca m_ss(V) (V - v_ca) - g_k N (V - v_k)\n\
                N' = (n_ss(V) - N) / tau_n(V), tanh activations; N clamped to [0, 1]\n\
                c=20 g_l=2 g_ca=4.4 g_k=8 v_l=-60 v_ca=120 v_k=-84\n\
                v1=-1.2 v2=18 v3=2 v4=30 phi=0.04\n\
                init = resting equilibrium; typical drive I = 100",
        build_fn: Some(build_ml),
    },
    PresetInfo {
        name: "fhn_cell",
        title: "slow-fast FitzHugh-Nagumo cell (pair-coupling building block)",
        initial: &[1.0, 0.0],
        dt: 0.02,
        threshold: 1.0,
        refractory: 2.0,
        simulable: true,
        notes: "state [v, w]; dimensionless\n\
                v' = v - v^3/3 - w + I; w' = eps (g(v) - w - eta)\n\
                eps=0.08 eta=0.1 g=linear (tanh selectable)\n\
                init [1, 0]; autonomous (I = 0), period about 39 time units",
        build_fn: Some(build_fhn_cell),
    },
    PresetInfo {
        name: "maeda_circuit",
        title: "discrete-transistor excitable circuit components (metadata only)",
        initial: &[],
        dt: 0.0,
        threshold: 0.0,
        refractory: 0.0,
        simulable: false,
        notes: "", // rendered from the component record, see catalog_text
        build_fn: None,
    },
];

pub fn all() -> &'static [PresetInfo] {
    PRESETS
}

pub fn find(name: &str) -> Option<&'static PresetInfo> {
    PRESETS.iter().find(|p| p.name == name)
}

/// Builds the model behind a simulable preset.
pub fn build(name: &str) -> Option<Arc<dyn ModelSystem>> {
    find(name).and_then(|p| p.build())
}

/// Human-readable catalog, one entry per registered preset. Entry headers
/// sit at column zero; body lines are indented.
pub fn catalog_text() -> String {
    let mut out = String::new();
    for p in PRESETS {
        out.push_str(p.name);
        out.push_str("\n    ");
        out.push_str(p.title);
        out.push('\n');
        if p.simulable {
            for line in p.notes.lines() {
                out.push_str("    ");
                out.push_str(line.trim_start());
                out.push('\n');
            }
            out.push_str(&format!(
                "    defaults: dt={} (rk4); detector threshold {}, refractory {}\n",
                p.dt, p.threshold, p.refractory
            ));
        } else {
            out.push_str("    ");
            out.push_str(&MAEDA_CIRCUIT.summary());
            out.push('\n');
            out.push_str("    component values for reference and config templating; not simulable\n");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_simulable_preset_builds_with_matching_initial_state() {
        for p in all() {
            if p.simulable {
                let m = p.build().expect(p.name);
                assert_eq!(m.dimension(), p.initial.len(), "{}", p.name);
            } else {
                assert!(p.build().is_none());
            }
        }
    }

    #[test]
    fn catalog_entry_count_matches_registry() {
        let text = catalog_text();
        let headers = text
            .lines()
            .filter(|l| !l.is_empty() && !l.starts_with(' '))
            .count();
        assert_eq!(headers, all().len());
        assert_eq!(headers, 7);
    }

    #[test]
    fn catalog_documents_reset_rule_and_circuit_bias() {
        let text = catalog_text();
        assert!(text.contains("reset: v >= 30"));
        assert!(text.contains("I_ext=0.025 mA"));
    }

    #[test]
    fn lookup_by_name() {
        assert!(find("izhikevich_rs").is_some());
        assert!(find("izh_rs_typo").is_none());
        assert!(build("hh").is_some());
        assert!(build("maeda_circuit").is_none());
    }
}
