//! Ready-made experiment configurations, written out by the `presets`
//! subcommand so a run can start from a known-good file.

use std::path::{Path, PathBuf};

use crate::CliResult;

/// One bundled configuration: a file stem, a one-line description, and the
/// TOML text itself.
pub struct PresetConfig {
    pub name: &'static str,
    pub describe: &'static str,
    pub toml: &'static str,
}

pub const ALL: &[PresetConfig] = &[
    PresetConfig {
        name: "reduced-generic",
        describe: "batch of four random sphere-flow trajectories, fully distinct moments",
        toml: "mode = \"reduced\"\n\
               dimension = 3\n\
               mass = [1.0, 2.0, 3.0]\n\
               \n\
               [initial]\n\
               kind = \"random\"\n\
               seed = 7\n\
               count = 4\n\
               \n\
               [integrator]\n\
               steps = 20000\n\
               \n\
               [outputs]\n\
               stride = 20\n",
    },
    PresetConfig {
        name: "full-generic",
        describe: "one random attitude trajectory of the constrained flow in dimension four",
        toml: "mode = \"full\"\n\
               dimension = 4\n\
               mass = [0.8, 1.4, 2.1, 2.9]\n\
               \n\
               [initial]\n\
               kind = \"random\"\n\
               seed = 3\n\
               count = 1\n\
               \n\
               [integrator]\n\
               steps = 10000\n\
               \n\
               [outputs]\n\
               stride = 10\n",
    },
    PresetConfig {
        name: "steady-rotation-full",
        describe: "uniform rotation in the (0,1) principal plane, integrated in the group",
        toml: "mode = \"full\"\n\
               dimension = 3\n\
               mass = [1.0, 2.0, 3.0]\n\
               \n\
               [initial]\n\
               kind = \"steady-rotation\"\n\
               plane = [0, 1]\n\
               speed = 2.0\n\
               \n\
               [integrator]\n\
               steps = 4000\n",
    },
    PresetConfig {
        name: "cyl-releq",
        describe: "cone-variable flow started at the relative equilibrium for h = 1, P = 6",
        toml: "mode = \"cyl\"\n\
               dimension = 4\n\
               mass = [1.0, 1.0, 2.0, 2.0]\n\
               \n\
               [initial]\n\
               kind = \"cyl-releq\"\n\
               h = 1.0\n\
               p_sq = 6.0\n\
               \n\
               [integrator]\n\
               steps = 4000\n",
    },
    PresetConfig {
        name: "axi-canoe",
        describe: "axisymmetric two-variable flow from an interior point of the canoe",
        toml: "mode = \"axi\"\n\
               dimension = 3\n\
               mass = [1.0, 2.0, 2.0]\n\
               \n\
               [initial]\n\
               kind = \"explicit\"\n\
               q1 = 0.3\n\
               p1 = 0.4\n\
               p_sq = 2.0\n\
               \n\
               [integrator]\n\
               steps = 20000\n\
               \n\
               [outputs]\n\
               stride = 100\n",
    },
    PresetConfig {
        name: "cyl-cone",
        describe: "two-block invariants integrated from an interior point of the cone",
        toml: "mode = \"cyl\"\n\
               dimension = 4\n\
               mass = [1.0, 1.0, 2.0, 2.0]\n\
               \n\
               [initial]\n\
               kind = \"explicit\"\n\
               a = 0.55\n\
               b = 2.4\n\
               p_sq = 6.0\n\
               d = 0.05\n\
               \n\
               [integrator]\n\
               steps = 20000\n\
               \n\
               [outputs]\n\
               stride = 100\n",
    },
    PresetConfig {
        name: "em-map",
        describe: "energy-momentum wedge sampling and steady-rotation ray slopes",
        toml: "mode = \"em-map\"\n\
               dimension = 3\n\
               mass = [1.0, 2.0, 3.0]\n\
               \n\
               [em_map]\n\
               samples = 2000\n",
    },
    PresetConfig {
        name: "axis-trace",
        describe: "spatial axis traces of two random axisymmetric orbits (cylinder check)",
        toml: "mode = \"axis-trace\"\n\
               dimension = 3\n\
               mass = [1.0, 2.0, 2.0]\n\
               \n\
               [initial]\n\
               kind = \"random\"\n\
               seed = 11\n\
               count = 2\n\
               \n\
               [integrator]\n\
               steps = 20000\n\
               \n\
               [outputs]\n\
               stride = 10\n",
    },
    PresetConfig {
        name: "verify",
        describe: "full check battery for a generic three-dimensional body",
        toml: "mode = \"verify\"\n\
               dimension = 3\n\
               mass = [1.0, 2.0, 3.0]\n",
    },
    PresetConfig {
        name: "verify-axi",
        describe: "check battery including the axisymmetric closed-form comparison",
        toml: "mode = \"verify\"\n\
               dimension = 3\n\
               mass = [1.0, 2.0, 2.0]\n",
    },
    PresetConfig {
        name: "verify-cyl",
        describe: "check battery including the two-block cone closed form",
        toml: "mode = \"verify\"\n\
               dimension = 4\n\
               mass = [1.0, 1.0, 2.0, 2.0]\n",
    },
    PresetConfig {
        name: "spectrum-axi-reduced",
        describe: "frequency count of the axisymmetric sphere-variable channels",
        toml: "mode = \"spectrum\"\n\
               \n\
               [spectrum]\n\
               preset = \"axi-reduced\"\n",
    },
    PresetConfig {
        name: "spectrum-axi-attitude",
        describe: "frequency count of the axisymmetric attitude channels",
        toml: "mode = \"spectrum\"\n\
               \n\
               [spectrum]\n\
               preset = \"axi-attitude\"\n",
    },
    PresetConfig {
        name: "spectrum-cyl-reduced",
        describe: "frequency count of the two-block sphere-variable channels",
        toml: "mode = \"spectrum\"\n\
               \n\
               [spectrum]\n\
               preset = \"cyl-reduced\"\n",
    },
    PresetConfig {
        name: "spectrum-cyl-attitude",
        describe: "frequency count of the two-block attitude channels",
        toml: "mode = \"spectrum\"\n\
               \n\
               [spectrum]\n\
               preset = \"cyl-attitude\"\n",
    },
    PresetConfig {
        name: "spectrum-releq-attitude",
        describe: "frequency count of the attitude above a cone relative equilibrium",
        toml: "mode = \"spectrum\"\n\
               \n\
               [spectrum]\n\
               preset = \"releq-attitude\"\n",
    },
];

/// Writes every bundled configuration into `dir` as `<name>.toml`, creating
/// the directory if needed, and returns the written paths.
pub fn write_all(dir: &Path) -> CliResult<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::with_capacity(ALL.len());
    for p in ALL {
        let path = dir.join(format!("{}.toml", p.name));
        std::fs::write(&path, p.toml)?;
        written.push(path);
    }
    Ok(written)
}
