#pragma once

#include <filesystem>
#include <string>

#include "exwave/training.hpp"

namespace exwave {

/// Everything one command run needs: training hyperparameters, geometry,
/// paths and output flags. Parsed from a sectioned `key = value` file;
/// unknown keys are errors.
struct RunConfig {
    TrainConfig train;
    // geometry as multiples of the wavelength would hide unit errors; the
    // file stores plain meters.
    double wavelength = kDefaultWavelength;
    double pitch = kDefaultPitchFactor * kDefaultWavelength;
    double spacing = kDefaultSpacingFactor * kDefaultWavelength;

    std::filesystem::path data_dir = "data/mnist";
    std::filesystem::path out_dir = "out";
    std::filesystem::path checkpoint;  // empty = <out_dir>/checkpoint.bin
    bool render_phases = false;

    PropagationGeometry geometry_for(int side) const {
        return PropagationGeometry(side, pitch, wavelength, spacing);
    }

    /// The TrainConfig with the geometry section applied.
    TrainConfig resolved_train() const {
        TrainConfig t = train;
        t.geometry = geometry_for(t.side);
        return t;
    }
};

RunConfig parse_config_file(const std::filesystem::path& path);

/// Apply one `section.key = value` assignment (what the file parser and the
/// flag layer both call). Throws on unknown keys or malformed values.
void apply_config_entry(RunConfig& config, const std::string& section,
                        const std::string& key, const std::string& value);

/// Echo of the fully resolved configuration; parsing it back reproduces the
/// run.
void write_resolved_config(const std::filesystem::path& path, const RunConfig& config);

}  // namespace exwave
