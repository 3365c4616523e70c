#pragma once

#include <string>

#include "skirmish/marl.hpp"

namespace skirmish {

// Versioned binary checkpoint (magic, algo tag, shapes, little-endian f64
// parameters) plus a <path>.json metadata sidecar.
void save_checkpoint(const Learner& learner, const std::string& path,
                     const std::string& metadata_json);

// Throws std::runtime_error on a missing file or format mismatch.
Learner load_checkpoint(const std::string& path);

std::string checkpoint_metadata(const std::string& path);  // sidecar contents

}  // namespace skirmish
