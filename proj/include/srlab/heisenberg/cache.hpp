#pragma once

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "srlab/core/error.hpp"
#include "srlab/core/io.hpp"
#include "srlab/heisenberg/spectrum.hpp"

namespace srlab::heisenberg {

inline constexpr int spectrum_format_version = 1;
inline constexpr const char* cache_env_var = "SRLAB_CACHE_DIR";

/// Parameters a cached spectrum depends on.
struct SpectrumKey {
  double lambda_max = 0;
  int intervals = 2048;
  int levels = 2;
  double half_width = 0;

  std::string canonical() const {
    return "heisenberg;lambda_max=" + format_double(lambda_max) + ";intervals=" + std::to_string(intervals) +
           ";levels=" + std::to_string(levels) + ";half_width=" + format_double(half_width) +
           ";format=" + std::to_string(spectrum_format_version);
  }
  std::string hash() const { return hex64(fnv1a(canonical())); }
};

inline std::string spectrum_csv(const SpectrumTable& t, const SpectrumKey& key) {
  std::ostringstream os;
  os << "# srlab-spectrum format=" << spectrum_format_version << " hash=" << key.hash()
     << " lambda_max=" << format_double(key.lambda_max) << "\n";
  os << "lambda,mult,family,m,ell,residue,origin\n";
  for (const auto& e : t.entries())
    os << format_double(e.lambda) << ',' << e.multiplicity << ',' << to_string(e.family) << ',' << e.m << ','
       << e.ell << ',' << e.residue << ',' << to_string(e.origin) << '\n';
  return os.str();
}

/// Parses a cache file; throws if the header does not match `key`.
inline SpectrumTable parse_spectrum_csv(const std::string& text, const SpectrumKey& key) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw StructuralError("spectrum cache: empty file");
  const std::string expect = "# srlab-spectrum format=" + std::to_string(spectrum_format_version) +
                             " hash=" + key.hash() + " lambda_max=" + format_double(key.lambda_max);
  if (line != expect) throw StructuralError("spectrum cache: header mismatch");
  if (!std::getline(is, line) || line != "lambda,mult,family,m,ell,residue,origin")
    throw StructuralError("spectrum cache: bad column header");
  std::vector<EigenPair> rows;
  int lineno = 2;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 7) throw StructuralError("spectrum cache: line " + std::to_string(lineno) + " has wrong arity");
    EigenPair e;
    e.lambda = std::strtod(f[0].c_str(), nullptr);
    e.multiplicity = std::stoll(f[1]);
    e.family = f[2] == "torus" ? Family::Torus : Family::Sector;
    e.m = std::stoi(f[3]);
    e.ell = std::stoi(f[4]);
    e.residue = std::stoi(f[5]);
    e.origin = f[6] == "numeric" ? Origin::Numeric : Origin::Exact;
    rows.push_back(std::move(e));
  }
  return SpectrumTable(std::move(rows), key.lambda_max);
}

/// $SRLAB_CACHE_DIR if set, else `fallback`.
inline std::filesystem::path cache_directory(const std::filesystem::path& fallback) {
  if (const char* env = std::getenv(cache_env_var); env && *env) return env;
  return fallback;
}

struct CachedSpectrum {
  SpectrumTable table;
  std::filesystem::path file;
  bool hit = false;
};

/// Exact table through the cache: read when a matching file exists, else compute and store.
inline CachedSpectrum cached_exact_spectrum(const SpectrumKey& key, const std::filesystem::path& dir,
                                            bool force_recompute = false, const SpectrumBudget& budget = {}) {
  CachedSpectrum out;
  out.file = dir / ("heisenberg_" + key.hash() + ".csv");
  if (!force_recompute && std::filesystem::exists(out.file)) {
    try {
      out.table = parse_spectrum_csv(read_file(out.file), key);
      out.hit = true;
      return out;
    } catch (const StructuralError&) {
      // stale or foreign file: recompute and overwrite
    }
  }
  out.table = exact_spectrum(key.lambda_max, budget);
  write_atomic(out.file, spectrum_csv(out.table, key));
  return out;
}

}  // namespace srlab::heisenberg
