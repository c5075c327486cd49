#include "dynabc/run_io.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace dynabc {

namespace {

std::ofstream open_out(const std::filesystem::path& p, std::ios_base::openmode mode) {
  std::ofstream f(p, mode);
  if (!f) throw std::runtime_error("cannot open for writing: " + p.string());
  return f;
}

}  // namespace

std::string format_shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_series_csv(const std::filesystem::path& dir, const RunResult& result) {
  std::filesystem::create_directories(dir);
  auto f = open_out(dir / "series.csv", std::ios_base::out | std::ios_base::trunc);
  f << "step,t,norm_H,grad_norm,surf_grad_norm,energy_GL,newton_iters\n";
  for (const auto& row : result.series) {
    f << row.step << ',' << format_shortest(row.t) << ',' << format_shortest(row.norm_h) << ','
      << format_shortest(row.grad_norm) << ',' << format_shortest(row.surf_grad_norm) << ','
      << format_shortest(row.energy_gl) << ',' << row.newton_iters << '\n';
  }
}

void write_meta_json(const std::filesystem::path& dir, const RunConfig& config,
                     std::uint64_t seed, const RunResult& result) {
  std::filesystem::create_directories(dir);
  nlohmann::json meta;
  meta["seed"] = seed;
  meta["fingerprint"] = config.fingerprint();
  meta["config"] = config.canonical();
  meta["valid"] = result.valid;
  if (!result.valid) meta["error"] = result.error;
  meta["steps"] = result.series.empty() ? 0 : result.series.back().step;
  meta["saved_states"] = result.states.size();
  meta["increment_checksum"] = result.increment_checksum;
  meta["max_newton_iters"] = result.max_newton_iters;
  meta["total_newton_iters"] = result.total_newton_iters;
  auto f = open_out(dir / "meta.json", std::ios_base::out | std::ios_base::trunc);
  f << meta.dump(2) << '\n';
}

void write_states_bin(const std::filesystem::path& dir, const RunConfig& config,
                      const RunResult& result) {
  std::filesystem::create_directories(dir);
  auto f = open_out(dir / "states.bin",
                    std::ios_base::out | std::ios_base::trunc | std::ios_base::binary);
  const char magic[4] = {'D', 'B', 'C', 'S'};
  f.write(magic, 4);
  auto write_u32 = [&f](std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    f.write(reinterpret_cast<const char*>(b), 4);
  };
  write_u32(static_cast<std::uint32_t>(config.nx));
  write_u32(static_cast<std::uint32_t>(config.ny));
  write_u32(static_cast<std::uint32_t>(config.save_every));
  write_u32(static_cast<std::uint32_t>(result.states.size()));
  for (const auto& s : result.states) {
    // node order is the grid's flat index; doubles are stored little-endian,
    // which is the native layout on every supported target
    f.write(reinterpret_cast<const char*>(s.x().data()),
            static_cast<std::streamsize>(s.x().size() * sizeof(double)));
  }
}

void persist_run(const std::filesystem::path& dir, const RunConfig& config, std::uint64_t seed,
                 const RunResult& result) {
  write_series_csv(dir, result);
  write_meta_json(dir, config, seed, result);
  if (config.save_states) write_states_bin(dir, config, result);
}

}  // namespace dynabc
