#pragma once

#include <string>

#include "fnls/field.hpp"
#include "fnls/model.hpp"

namespace fnls {

/// Field snapshot with the parameters it was produced under.
struct Snapshot {
  Field u;            ///< physical representation
  ModelParams params;
  double t = 0.0;
};

/// Binary field format, little-endian:
///   magic "FNLS", u32 version = 1, u32 N,
///   u64 n_j per axis, f64 L_j per axis, f64 s, f64 sigma, f64 t,
///   then interleaved re/im f64 pairs in row-major axis order.
/// Writes are atomic (temp file + rename).
void write_snapshot(const std::string& path, const Field& u,
                    const ModelParams& params, double t);

Snapshot read_snapshot(const std::string& path);

} // namespace fnls
