#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "dynabc/config.hpp"
#include "dynabc/solver.hpp"

namespace dynabc {

// shortest decimal form that round-trips the exact double
std::string format_shortest(double v);

/// Writes series.csv (one row per step) into `dir`. Columns:
/// step,t,norm_H,grad_norm,surf_grad_norm,energy_GL,newton_iters
void write_series_csv(const std::filesystem::path& dir, const RunResult& result);

/// Writes meta.json: config echo (canonical key/value), seed, fingerprint
/// and run summary.
void write_meta_json(const std::filesystem::path& dir, const RunConfig& config,
                     std::uint64_t seed, const RunResult& result);

/// Optional flat binary state dump: little-endian header
/// (magic "DBCS", u32 nx, u32 ny, u32 save_every, u32 frame count)
/// followed by frame-count * nx * ny doubles.
void write_states_bin(const std::filesystem::path& dir, const RunConfig& config,
                      const RunResult& result);

/// Persists one run directory: series.csv + meta.json (+ states.bin when
/// config.save_states is set).
void persist_run(const std::filesystem::path& dir, const RunConfig& config, std::uint64_t seed,
                 const RunResult& result);

}  // namespace dynabc
