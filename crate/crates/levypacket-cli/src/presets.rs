//! Built-in figure presets.  Each preset is stored as a config document in
//! the same text format accepted by `evolve --config`, so the registry also
//! serves as a set of working examples.

use crate::config::{parse_config, RunConfig};
use levypacket::{Error, Result};

/// One registered preset: name, one-line description, config text.
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub text: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "fig-gauss",
        description: "Brownian noise acting on a Gaussian packet: density and wave side by side",
        text: "
[scenario]
noise = normal
tau = 0.5
initial = normal
mode = both

[grid]
n = 4096
half_width = 60

[times]
list = 0, 0.5, 1, 2, 4
",
    },
    Preset {
        name: "fig-cauchycauchy",
        description: "Cauchy noise on a Cauchy start: the density stays Cauchy with growing scale",
        text: "
[scenario]
noise = cauchy
initial = cauchy
mode = process

[grid]
n = 32768
half_width = 2000

[times]
list = 0, 0.5, 1, 2, 4
",
    },
    Preset {
        name: "fig-cauchystudent",
        description: "Cauchy noise on a Student start: rational densities at every time",
        text: "
[scenario]
noise = cauchy
initial = student3
mode = process

[grid]
n = 32768
half_width = 2000

[times]
list = 0, 0.5, 1, 2, 4
",
    },
    Preset {
        name: "fig-studentwf",
        description: "Cauchy generator on a Student packet: bimodal splitting of the wave profile",
        text: "
[scenario]
noise = cauchy
initial = student3
mode = schrodinger

[grid]
n = 32768
half_width = 2000

[times]
list = 0, 0.5, 1, 2, 4
",
    },
    Preset {
        name: "fig-cauchywf",
        description: "Cauchy generator on a Cauchy packet: slow logarithmic-type spreading",
        text: "
[scenario]
noise = cauchy
initial = cauchy
mode = schrodinger

[grid]
n = 524288
half_width = 30000

[times]
list = 0, 0.5, 1, 2, 4
",
    },
    Preset {
        name: "fig-vg-process-nu1",
        description: "Variance-Gamma noise with shape 1 on its own invariant start (cusped density)",
        text: "
[scenario]
noise = vg(nu=1)
initial = vg(nu=1)
mode = process

[grid]
n = 131072
half_width = 40

[times]
list = 0, 0.5, 1, 2, 4

[tolerances]
aliasing = 1e-7
",
    },
    Preset {
        name: "fig-vg-process-nu2",
        description: "Variance-Gamma noise with shape 2 on its own invariant start (smooth density)",
        text: "
[scenario]
noise = vg(nu=1)
initial = vg(nu=2)
mode = process

[grid]
n = 4096
half_width = 40

[times]
list = 0, 0.5, 1, 2, 4
",
    },
    Preset {
        name: "fig-vg-wf",
        description: "Variance-Gamma generator on its packet, shape 1.75: smooth spectral decay",
        text: "
[scenario]
noise = vg(nu=1)
initial = vg(nu=1.75)
mode = schrodinger

[grid]
n = 8192
half_width = 45

[times]
list = 0, 0.5, 1, 2, 4
",
    },
    Preset {
        name: "fig-vg-wf-sing",
        description: "Variance-Gamma packet with shape 0.8: slowly decaying spectrum, relaxed aliasing",
        text: "
[scenario]
noise = vg(nu=1)
initial = vg(nu=0.8)
mode = schrodinger

[grid]
n = 131072
half_width = 45

[times]
list = 0, 0.5, 1, 2, 4

[tolerances]
aliasing = 1e-5
",
    },
    Preset {
        name: "fig-poisson-normal",
        description: "Wiener background plus Gaussian jumps: density and wave of the jump-diffusion",
        text: "
[scenario]
noise = wiener_poisson(gamma=1.4142135623730951, rate=1, jump=normal)
initial = normal
mode = both

[grid]
n = 4096
half_width = 40

[times]
list = 0, 0.5, 1, 2, 4
",
    },
    Preset {
        name: "fig-poisson-dirac",
        description: "Wiener background plus unit point jumps: Gaussian comb density and its wave",
        text: "
[scenario]
noise = wiener_poisson(gamma=1.4142135623730951, rate=1, jump=bernoulli)
initial = normal
mode = both

[grid]
n = 4096
half_width = 40

[times]
list = 0, 0.5, 1, 2, 4
",
    },
    Preset {
        name: "fig-rqm",
        description: "Relativistic noise on the relativistic invariant packet, density and wave",
        text: "
[scenario]
noise = relativistic(nu=1)
initial = relativistic(nu=1)
mode = both

[grid]
n = 4096
half_width = 40

[times]
list = 0, 0.5, 1, 2, 4
",
    },
];

/// Look a preset up by name and parse its config text.
pub fn load_preset(name: &str) -> Result<RunConfig> {
    for preset in PRESETS {
        if preset.name == name {
            return parse_config(preset.text, preset.name);
        }
    }
    Err(Error::Config(format!(
        "unknown preset `{name}`; run `levypacket list` for the registered names"
    )))
}
