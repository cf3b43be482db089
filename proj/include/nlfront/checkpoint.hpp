#pragma once

#include <cstdint>
#include <string>

#include "nlfront/free_boundary.hpp"

namespace nlfront {

// Complete restart state for a moving-domain run. Floating-point fields are
// stored as hexfloats, so a resumed run continues bit for bit where the
// original would have gone; the fingerprint ties the file to the physics
// block of the configuration that produced it.
struct checkpoint_data {
  std::uint64_t fingerprint = 0;
  front_state state;
  std::uint64_t steps = 0;
  double next_record = 0.0;
  double aux_span = 0.0;  // graded-mesh rebuild bookkeeping; 0 on lattices
};

std::string encode_checkpoint(const checkpoint_data& cp);

// Throws VersionMismatch for a foreign header and CorruptCheckpoint for
// checksum or structural damage.
checkpoint_data decode_checkpoint(const std::string& bytes);

void save_checkpoint(const std::string& path, const checkpoint_data& cp);
checkpoint_data load_checkpoint(const std::string& path);

}  // namespace nlfront
